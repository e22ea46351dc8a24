use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `pi^2 / 720`: the energy of two ideal plates at unit separation per unit area.
pub const CASIMIR_PLATE_CONSTANT: f64 = PI * PI / 720.0;

/// Magnitude of the plate interaction energy, `pi^2 S / (720 D^3)`.
pub fn plates_analytic_energy(area: f64, separation: f64) -> Result<f64> {
    if !(area > 0.0 && separation > 0.0) || !area.is_finite() || !separation.is_finite() {
        return Err(Error::Reference(format!(
            "plate area and separation must be positive, got S={area}, D={separation}"
        )));
    }
    Ok(CASIMIR_PLATE_CONSTANT * area / separation.powi(3))
}

/// Coefficient of `1/R^3` for plates of `n x n` sites at `R` z-steps on a
/// lattice with anisotropy `alpha`: `pi^2 n^2 / (720 alpha^3)`, in `1/a`.
pub fn plates_lattice_coefficient(n: usize, alpha: f64) -> Result<f64> {
    if n < 1 || !(alpha > 0.0) {
        return Err(Error::Reference(format!(
            "need n >= 1 and alpha > 0, got n={n}, alpha={alpha}"
        )));
    }
    Ok(CASIMIR_PLATE_CONSTANT * (n * n) as f64 / alpha.powi(3))
}

/// Geometric factor of the four-scene interaction energy of two plates
/// `r` steps apart on a z-periodic lattice of extent `nz`, in units of the
/// coefficient from [`plates_lattice_coefficient`].
///
/// Both plates bound two cavities (`r` and `nz - r`); each plate alone
/// bounds one of length `nz`; the free periodic lattice contributes
/// sixteen times the plate constant over `nz^3`. The combination
/// `full - A - B + free` is therefore
/// `-(1/r^3 + 1/(nz-r)^3 + 14/nz^3)`; the magnitude is returned.
pub fn periodic_plate_pair_factor(r: usize, nz: usize) -> Result<f64> {
    if r < 1 || r >= nz {
        return Err(Error::Reference(format!(
            "plate separation {r} must lie in 1..{nz}"
        )));
    }
    let (r, g, n) = (r as f64, (nz - r) as f64, nz as f64);
    Ok(r.powi(-3) + g.powi(-3) + 14.0 / n.powi(3))
}
