//! Exact second moments of plaquettes on very small lattices.
//!
//! The action restricted to the unmasked links is `1/2 U^T M U` with
//! `M = beta Q^T W Q`, where row `P` of `Q` holds the signed incidence of the
//! links in plaquette `P` and `W` the plaquette weights. Pure-gauge and
//! constant modes lie in the null space of `M`; plaquettes are orthogonal to
//! it, so `<theta theta^T> = Q M^+ Q^T` with the pseudo-inverse on the row
//! space. The moments are formed twice, from a symmetric eigendecomposition
//! and from extrapolated Cholesky solves of `M + d I`, and must agree.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMask, DielectricMap};
use crate::lattice::{LatticeShape, PlaquetteWeights, SimulationParams, PLANES, T};

/// Largest number of unmasked links the dense oracle accepts.
pub const ORACLE_MAX_LINKS: usize = 512;

/// Exact Gaussian plaquette moments of one small scene.
#[derive(Clone, Debug)]
pub struct OracleMoments {
    pub shape: LatticeShape,
    /// `(site, mu, nu)` with `mu < nu`, in site-major `PLANES` order.
    pub plaquettes: Vec<(usize, usize, usize)>,
    /// `<theta_P theta_Q>` for every pair.
    pub covariance: DMatrix<f64>,
    /// Rank of the quadratic form.
    pub rank: usize,
    /// `<S>`; equals `rank / 2` by equipartition.
    pub mean_action: f64,
    /// Largest entry-wise difference between the two linear-algebra routes.
    pub route_discrepancy: f64,
}

impl OracleMoments {
    fn index(&self, site: usize, mu: usize, nu: usize) -> usize {
        let (a, b) = if mu < nu { (mu, nu) } else { (nu, mu) };
        let plane = PLANES.iter().position(|&p| p == (a, b)).expect("distinct directions");
        site * PLANES.len() + plane
    }

    /// `<theta_{mu nu}(x)^2>`.
    pub fn theta_sq(&self, site: usize, mu: usize, nu: usize) -> f64 {
        let i = self.index(site, mu, nu);
        self.covariance[(i, i)]
    }

    /// `<theta_P^2>` for every plaquette, in `plaquettes` order.
    pub fn second_moments(&self) -> Vec<f64> {
        (0..self.plaquettes.len()).map(|i| self.covariance[(i, i)]).collect()
    }

    /// Expectation of the energy estimator (site sum over `N_t`).
    pub fn mean_energy(&self, params: &SimulationParams, eps: Option<&DielectricMap>) -> Result<f64> {
        let w = PlaquetteWeights::new(&self.shape, params, eps)?;
        let sum: f64 = self
            .plaquettes
            .iter()
            .map(|&(site, mu, nu)| {
                let term = w.weight(site, mu, nu) * self.theta_sq(site, mu, nu);
                if nu == T {
                    -term
                } else {
                    term
                }
            })
            .sum();
        Ok(0.5 * params.beta() * sum / self.shape.extent(T) as f64)
    }
}

pub fn small_lattice_gaussian_oracle(
    shape: &LatticeShape,
    params: &SimulationParams,
    mask: Option<&BoundaryMask>,
    eps: Option<&DielectricMap>,
) -> Result<OracleMoments> {
    if let Some(m) = mask {
        shape.check_same(m.shape())?;
    }
    let free: Vec<usize> = (0..shape.link_count())
        .filter(|&l| !mask.is_some_and(|m| m.contains_link(l)))
        .collect();
    let n = free.len();
    if n > ORACLE_MAX_LINKS {
        return Err(Error::Reference(format!(
            "{n} unmasked links exceed the dense oracle limit of {ORACLE_MAX_LINKS}"
        )));
    }
    let column: HashMap<usize, usize> = free.iter().enumerate().map(|(c, &l)| (l, c)).collect();
    let w = PlaquetteWeights::new(shape, params, eps)?;

    let v = shape.volume();
    let mut plaquettes = Vec::with_capacity(v * PLANES.len());
    let mut q = DMatrix::<f64>::zeros(v * PLANES.len(), n);
    let mut weights = Vec::with_capacity(v * PLANES.len());
    for site in 0..v {
        for &(mu, nu) in &PLANES {
            let row = plaquettes.len();
            // theta = U_nu(x+mu) - U_nu(x) - U_mu(x+nu) + U_mu(x)
            let terms = [
                (shape.link_index(nu, shape.forward(site, mu)), 1.0),
                (shape.link_index(nu, site), -1.0),
                (shape.link_index(mu, shape.forward(site, nu)), -1.0),
                (shape.link_index(mu, site), 1.0),
            ];
            for (link, sign) in terms {
                if let Some(&c) = column.get(&link) {
                    q[(row, c)] += sign;
                }
            }
            plaquettes.push((site, mu, nu));
            weights.push(w.weight(site, mu, nu));
        }
    }

    let mut wq = q.clone();
    for (r, &wr) in weights.iter().enumerate() {
        wq.row_mut(r).scale_mut(wr);
    }
    let m = (q.transpose() * &wq) * params.beta();

    // Route 1: eigendecomposition.
    let eig = SymmetricEigen::new(m.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-10 * lmax.max(1e-300);
    let mut inv_diag = DMatrix::<f64>::zeros(n, n);
    let mut rank = 0;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > tol {
            inv_diag[(i, i)] = 1.0 / lam;
            rank += 1;
        } else if lam < -tol {
            return Err(Error::Internal(format!("quadratic form not positive: {lam}")));
        }
    }
    let pinv_eig = &eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();

    // Route 2: Cholesky solves of the regularized form M + d I at two
    // regularizations, extrapolated to d = 0 (the bias is linear in d on the
    // row space and the null space never reaches Q).
    let tikhonov = |d: f64| -> Result<DMatrix<f64>> {
        let reg = &m + DMatrix::<f64>::identity(n, n) * d;
        let chol = reg
            .cholesky()
            .ok_or_else(|| Error::Internal("regularized quadratic form not positive".into()))?;
        let x = chol.solve(&q.transpose());
        Ok(&q * x)
    };
    let d = 1e-6 * lmax.max(1e-300);
    let covariance_reg = tikhonov(d)? * 2.0 - tikhonov(2.0 * d)?;

    let covariance = &q * &pinv_eig * q.transpose();
    let route_discrepancy = (&covariance - &covariance_reg).amax();
    let scale = covariance.amax().max(1e-300);
    if route_discrepancy > 1e-7 * scale {
        return Err(Error::Internal(format!(
            "oracle routes disagree by {route_discrepancy:e}"
        )));
    }

    let mean_action = 0.5
        * params.beta()
        * weights
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * covariance[(i, i)])
            .sum::<f64>();

    Ok(OracleMoments {
        shape: *shape,
        plaquettes,
        covariance,
        rank,
        mean_action,
        route_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_plate_mask;
    use crate::lattice::{X, Y, Z};

    #[test]
    fn equipartition_on_free_lattices() {
        for n in [2usize, 3] {
            let s = LatticeShape::new(n, n, n, n).unwrap();
            let p = SimulationParams::isotropic(1.0).unwrap();
            let o = small_lattice_gaussian_oracle(&s, &p, None, None).unwrap();
            assert!((o.mean_action - 0.5 * o.rank as f64).abs() < 1e-9 * o.rank as f64);
            assert!(o.route_discrepancy < 1e-8);
        }
    }

    #[test]
    fn rank_excludes_gauge_and_constant_modes() {
        // 3^4 torus: 4V links, V-1 gauge directions, 4 constant modes.
        let s = LatticeShape::new(3, 3, 3, 3).unwrap();
        let o = small_lattice_gaussian_oracle(&s, &SimulationParams::isotropic(1.0).unwrap(), None, None).unwrap();
        assert_eq!(o.rank, 4 * 81 - 80 - 4);
    }

    #[test]
    fn moments_scale_with_inverse_beta() {
        let s = LatticeShape::new(2, 2, 3, 2).unwrap();
        let mask = build_plate_mask(0, &s).unwrap();
        let a = small_lattice_gaussian_oracle(&s, &SimulationParams::new(1.0, 0.5).unwrap(), Some(&mask), None).unwrap();
        let b = small_lattice_gaussian_oracle(&s, &SimulationParams::new(2.0, 0.5).unwrap(), Some(&mask), None).unwrap();
        for (x, y) in a.second_moments().iter().zip(b.second_moments()) {
            assert!((x / 2.0 - y).abs() < 1e-12);
        }
        assert!((a.mean_action - b.mean_action).abs() < 1e-9);
    }

    #[test]
    fn isotropic_free_lattice_has_symmetric_moments() {
        let s = LatticeShape::new(3, 3, 3, 3).unwrap();
        let p = SimulationParams::isotropic(1.0).unwrap();
        let o = small_lattice_gaussian_oracle(&s, &p, None, None).unwrap();
        let first = o.theta_sq(0, X, Y);
        for i in 0..s.volume() {
            for &(mu, nu) in &PLANES {
                assert!((o.theta_sq(i, mu, nu) - first).abs() < 1e-10);
            }
        }
        assert!(o.mean_energy(&p, None).unwrap().abs() < 1e-10);
        assert!((o.theta_sq(4, Z, Y) - o.theta_sq(4, Y, Z)).abs() == 0.0);
    }

    #[test]
    fn size_limit() {
        let s = LatticeShape::new(4, 4, 4, 4).unwrap();
        assert!(small_lattice_gaussian_oracle(&s, &SimulationParams::isotropic(1.0).unwrap(), None, None).is_err());
    }
}

