//! Analytic and semi-analytic references used to validate and interpret the
//! Monte-Carlo results.

mod modesum;
mod opfa;
mod oracle;
mod pfa;
mod plates;

use serde::{Deserialize, Serialize};

pub use modesum::{image_sum_constant, periodic_modesum_constant, zeta_modesum_constant, Polarizations};
pub use opfa::{opfa_gratings, GeodesicGrid};
pub use oracle::{small_lattice_gaussian_oracle, OracleMoments, ORACLE_MAX_LINKS};
pub use pfa::{grating_surface_heights, pfa_gratings};
pub use plates::{periodic_plate_pair_factor, plates_analytic_energy, plates_lattice_coefficient, CASIMIR_PLATE_CONSTANT};

/// How a reference value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    ModeSum,
    Quadrature,
}

/// A reference value with its origin and, for numerical results, an
/// estimate of the remaining discretization or truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticResult {
    pub value: f64,
    pub provenance: Provenance,
    /// Refinement or truncation parameter of the final evaluation.
    pub refinement: usize,
    /// Difference to the next-coarser evaluation; zero for closed forms.
    pub convergence: f64,
}
