//! The 4D hypercubic lattice, noncompact link fields and the gauge action.
//!
//! Directions are indexed `0..4` as `x, y, z, t`. The z direction is the one
//! that may be deformed (lattice step `alpha * a`); t is Euclidean time.
//! Sites are stored row-major over `(x, y, z, t)`, so t varies fastest, and
//! links are stored as `direction * volume + site`. Every direction wraps
//! periodically.
//!
//! The plaquette variable is the lattice curl
//!
//! ```text
//! theta_{mu nu}(x) = [U_nu(x + mu) - U_nu(x)] - [U_mu(x + nu) - U_mu(x)]
//! ```
//!
//! and the action is `S = beta/2 * sum_x sum_{mu<nu} w_{mu nu}(x) theta^2`, with
//! `w = alpha` for planes not containing z, `w = 1/alpha` for planes containing
//! z, and an extra factor `eps(x)` on the electric planes `(t, i)` inside a
//! dielectric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DielectricMap;

pub const NDIM: usize = 4;

/// The six unordered planes `(mu, nu)` with `mu < nu`.
pub const PLANES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
    Z,
    T,
}

impl Direction {
    pub const ALL: [Direction; NDIM] = [Direction::X, Direction::Y, Direction::Z, Direction::T];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }
}

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const T: usize = 3;

/// Lattice extents `(N_x, N_y, N_z, N_t)`; all directions periodic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeShape {
    extents: [usize; NDIM],
    strides: [usize; NDIM],
}

impl LatticeShape {
    pub fn new(nx: usize, ny: usize, nz: usize, nt: usize) -> Result<Self> {
        Self::from_extents([nx, ny, nz, nt])
    }

    pub fn from_extents(extents: [usize; NDIM]) -> Result<Self> {
        if let Some(bad) = extents.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "every lattice extent must be at least 2, got {bad} in {extents:?}"
            )));
        }
        let volume = extents.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        match volume {
            Some(v) if v.checked_mul(NDIM).is_some_and(|l| l < u32::MAX as usize) => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "lattice {extents:?} is too large to index"
                )))
            }
        }
        let strides = [
            extents[1] * extents[2] * extents[3],
            extents[2] * extents[3],
            extents[3],
            1,
        ];
        Ok(Self { extents, strides })
    }

    #[inline]
    pub fn extents(&self) -> [usize; NDIM] {
        self.extents
    }

    #[inline]
    pub fn extent(&self, dir: usize) -> usize {
        self.extents[dir]
    }

    #[inline]
    pub fn volume(&self) -> usize {
        self.extents.iter().product()
    }

    #[inline]
    pub fn link_count(&self) -> usize {
        NDIM * self.volume()
    }

    /// Sites per Euclidean time slice.
    #[inline]
    pub fn spatial_volume(&self) -> usize {
        self.extents[X] * self.extents[Y] * self.extents[Z]
    }

    #[inline]
    pub fn site_index(&self, coords: [usize; NDIM]) -> usize {
        coords
            .iter()
            .zip(self.extents.iter().zip(self.strides.iter()))
            .map(|(&c, (&n, &s))| (c % n) * s)
            .sum()
    }

    /// Site index from possibly negative or out-of-range coordinates (wrapped).
    pub fn site_index_wrapped(&self, coords: [i64; NDIM]) -> usize {
        let mut wrapped = [0usize; NDIM];
        for d in 0..NDIM {
            wrapped[d] = coords[d].rem_euclid(self.extents[d] as i64) as usize;
        }
        self.site_index(wrapped)
    }

    #[inline]
    pub fn coords(&self, site: usize) -> [usize; NDIM] {
        let mut c = [0; NDIM];
        for d in 0..NDIM {
            c[d] = (site / self.strides[d]) % self.extents[d];
        }
        c
    }

    #[inline]
    pub fn coord(&self, site: usize, dir: usize) -> usize {
        (site / self.strides[dir]) % self.extents[dir]
    }

    #[inline]
    pub fn forward(&self, site: usize, dir: usize) -> usize {
        if self.coord(site, dir) + 1 == self.extents[dir] {
            site + self.strides[dir] - self.extents[dir] * self.strides[dir]
        } else {
            site + self.strides[dir]
        }
    }

    #[inline]
    pub fn backward(&self, site: usize, dir: usize) -> usize {
        if self.coord(site, dir) == 0 {
            site + (self.extents[dir] - 1) * self.strides[dir]
        } else {
            site - self.strides[dir]
        }
    }

    #[inline]
    pub fn link_index(&self, dir: usize, site: usize) -> usize {
        dir * self.volume() + site
    }

    /// Inverse of [`link_index`](Self::link_index): `(direction, site)`.
    #[inline]
    pub fn link_parts(&self, link: usize) -> (usize, usize) {
        let v = self.volume();
        (link / v, link % v)
    }

    /// Index of the spatial site `(x, y, z)` a 4D site belongs to.
    #[inline]
    pub fn spatial_index(&self, site: usize) -> usize {
        site / self.extents[T]
    }

    pub fn check_same(&self, other: &LatticeShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", self.extents),
                found: format!("{:?}", other.extents),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for LatticeShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.extents;
        write!(f, "{a}x{b}x{c}x{d}")
    }
}

/// Forward/backward neighbour tables, one entry per site and direction.
#[derive(Clone, Debug)]
pub struct Neighbors {
    fwd: Vec<[u32; NDIM]>,
    bwd: Vec<[u32; NDIM]>,
}

impl Neighbors {
    pub fn new(shape: &LatticeShape) -> Self {
        let v = shape.volume();
        let mut fwd = Vec::with_capacity(v);
        let mut bwd = Vec::with_capacity(v);
        for site in 0..v {
            let mut f = [0u32; NDIM];
            let mut b = [0u32; NDIM];
            for d in 0..NDIM {
                f[d] = shape.forward(site, d) as u32;
                b[d] = shape.backward(site, d) as u32;
            }
            fwd.push(f);
            bwd.push(b);
        }
        Self { fwd, bwd }
    }

    #[inline(always)]
    pub fn fwd(&self, site: usize, dir: usize) -> usize {
        self.fwd[site][dir] as usize
    }

    #[inline(always)]
    pub fn bwd(&self, site: usize, dir: usize) -> usize {
        self.bwd[site][dir] as usize
    }
}

/// Coupling `beta = 1/e^2` and anisotropy `alpha = a_z / a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    beta: f64,
    alpha: f64,
}

impl SimulationParams {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { beta, alpha })
    }

    pub fn isotropic(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Anisotropy weight of the plane `(mu, nu)`.
    #[inline]
    pub fn plane_weight(&self, mu: usize, nu: usize) -> f64 {
        if mu == Z || nu == Z {
            1.0 / self.alpha
        } else {
            self.alpha
        }
    }
}

/// Per-plaquette weights: anisotropy composed with an optional dielectric.
#[derive(Clone, Copy, Debug)]
pub struct PlaquetteWeights<'a> {
    base: [[f64; NDIM]; NDIM],
    shape: LatticeShape,
    eps: Option<&'a DielectricMap>,
}

impl<'a> PlaquetteWeights<'a> {
    pub fn new(
        shape: &LatticeShape,
        params: &SimulationParams,
        eps: Option<&'a DielectricMap>,
    ) -> Result<Self> {
        if let Some(map) = eps {
            shape.check_same(map.shape())?;
        }
        let mut base = [[0.0; NDIM]; NDIM];
        for mu in 0..NDIM {
            for nu in 0..NDIM {
                if mu != nu {
                    base[mu][nu] = params.plane_weight(mu, nu);
                }
            }
        }
        // A uniform vacuum map carries no information; skip the lookups.
        let eps = eps.filter(|m| !m.is_vacuum());
        Ok(Self {
            base,
            shape: *shape,
            eps,
        })
    }

    /// Weight of the plaquette based at `site` in the plane `(mu, nu)`.
    #[inline(always)]
    pub fn weight(&self, site: usize, mu: usize, nu: usize) -> f64 {
        let w = self.base[mu][nu];
        match self.eps {
            Some(map) if mu == T || nu == T => w * map.at_spatial(self.shape.spatial_index(site)),
            _ => w,
        }
    }

    #[inline]
    pub fn has_dielectric(&self) -> bool {
        self.eps.is_some()
    }
}

/// One real value per link; the sampled noncompact gauge configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkField {
    shape: LatticeShape,
    values: Vec<f64>,
}

impl LinkField {
    pub fn zeros(shape: LatticeShape) -> Self {
        Self {
            values: vec![0.0; shape.link_count()],
            shape,
        }
    }

    pub fn from_values(shape: LatticeShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.link_count() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} links", shape.link_count()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self { shape, values })
    }

    /// Builds a field by evaluating `f(direction, site)` on every link.
    pub fn from_fn(shape: LatticeShape, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let v = shape.volume();
        let values = (0..shape.link_count()).map(|l| f(l / v, l % v)).collect();
        Self { shape, values }
    }

    #[inline]
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    #[inline]
    pub fn get(&self, dir: usize, site: usize) -> f64 {
        self.values[self.shape.link_index(dir, site)]
    }

    #[inline]
    pub fn set(&mut self, dir: usize, site: usize, value: f64) {
        let i = self.shape.link_index(dir, site);
        self.values[i] = value;
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Plaquette without argument checks; `mu != nu` is the caller's job.
    #[inline]
    pub(crate) fn theta_unchecked(&self, site: usize, mu: usize, nu: usize) -> f64 {
        let s = &self.shape;
        let v = s.volume();
        let u = &self.values;
        let x_mu = s.forward(site, mu);
        let x_nu = s.forward(site, nu);
        (u[nu * v + x_mu] - u[nu * v + site]) - (u[mu * v + x_nu] - u[mu * v + site])
    }

    #[inline(always)]
    pub(crate) fn theta_with(&self, nb: &Neighbors, site: usize, mu: usize, nu: usize) -> f64 {
        let v = self.shape.volume();
        let u = &self.values;
        (u[nu * v + nb.fwd(site, mu)] - u[nu * v + site])
            - (u[mu * v + nb.fwd(site, nu)] - u[mu * v + site])
    }
}

/// Scalar gauge function on sites, used to probe gauge invariance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeScalarField {
    shape: LatticeShape,
    values: Vec<f64>,
}

impl GaugeScalarField {
    pub fn zeros(shape: LatticeShape) -> Self {
        Self {
            values: vec![0.0; shape.volume()],
            shape,
        }
    }

    pub fn from_fn(shape: LatticeShape, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            values: (0..shape.volume()).map(f).collect(),
            shape,
        }
    }

    #[inline]
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    #[inline]
    pub fn get(&self, site: usize) -> f64 {
        self.values[site]
    }

    /// The pure-gauge link field `U_mu(x) = g(x + mu) - g(x)`.
    pub fn pure_gauge_field(&self) -> LinkField {
        apply_gauge_transform(&LinkField::zeros(self.shape), self)
            .expect("shapes agree by construction")
    }
}

fn check_directions(mu: usize, nu: usize) -> Result<()> {
    if mu >= NDIM || nu >= NDIM {
        return Err(Error::InvalidArgument(format!(
            "direction out of range: ({mu}, {nu})"
        )));
    }
    if mu == nu {
        return Err(Error::InvalidArgument(format!(
            "plaquette needs two distinct directions, got ({mu}, {nu})"
        )));
    }
    Ok(())
}

/// `theta_{mu nu}(x)`, with periodic wrap for the neighbours.
pub fn theta_plaquette(field: &LinkField, site: usize, mu: usize, nu: usize) -> Result<f64> {
    check_directions(mu, nu)?;
    if site >= field.shape.volume() {
        return Err(Error::InvalidArgument(format!(
            "site {site} outside lattice {}",
            field.shape
        )));
    }
    Ok(field.theta_unchecked(site, mu, nu))
}

/// The (optionally dielectric) anisotropic action of a configuration.
pub fn total_action(
    field: &LinkField,
    params: &SimulationParams,
    eps: Option<&DielectricMap>,
) -> Result<f64> {
    let shape = *field.shape();
    let weights = PlaquetteWeights::new(&shape, params, eps)?;
    let sum: f64 = (0..shape.volume())
        .map(|site| {
            PLANES
                .iter()
                .map(|&(mu, nu)| {
                    let th = field.theta_unchecked(site, mu, nu);
                    weights.weight(site, mu, nu) * th * th
                })
                .sum::<f64>()
        })
        .sum();
    Ok(0.5 * params.beta() * sum)
}

/// `U'_mu(x) = U_mu(x) + g(x + mu) - g(x)`.
pub fn apply_gauge_transform(field: &LinkField, g: &GaugeScalarField) -> Result<LinkField> {
    field.shape().check_same(g.shape())?;
    let shape = *field.shape();
    let mut out = field.clone();
    for dir in 0..NDIM {
        for site in 0..shape.volume() {
            let fwd = shape.forward(site, dir);
            let i = shape.link_index(dir, site);
            out.values[i] += g.values[fwd] - g.values[site];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(shape: LatticeShape, seed: u64) -> LinkField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LinkField::from_fn(shape, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn shape_rejects_short_extents() {
        assert!(LatticeShape::new(1, 4, 4, 4).is_err());
        let s = LatticeShape::new(2, 3, 4, 5).unwrap();
        assert_eq!(s.link_count(), 4 * 2 * 3 * 4 * 5);
    }

    #[test]
    fn coords_round_trip_and_wrap() {
        let s = LatticeShape::new(3, 4, 5, 2).unwrap();
        for site in 0..s.volume() {
            assert_eq!(s.site_index(s.coords(site)), site);
            for d in 0..NDIM {
                assert_eq!(s.backward(s.forward(site, d), d), site);
            }
        }
        let last = s.site_index([2, 0, 0, 0]);
        assert_eq!(s.forward(last, X), s.site_index([0, 0, 0, 0]));
        assert_eq!(s.site_index_wrapped([-1, 4, 5, -2]), s.site_index([2, 0, 0, 0]));
    }

    #[test]
    fn theta_rejects_equal_directions() {
        let s = LatticeShape::new(2, 2, 2, 2).unwrap();
        let f = LinkField::zeros(s);
        assert!(theta_plaquette(&f, 0, 1, 1).is_err());
        assert_eq!(theta_plaquette(&f, 3, 0, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_link_enters_two_plaquettes_per_plane() {
        let s = LatticeShape::new(4, 4, 4, 4).unwrap();
        let x = s.site_index([1, 2, 3, 0]);
        for nu in 0..NDIM {
            for mu in (0..NDIM).filter(|&m| m != nu) {
                let mut f = LinkField::zeros(s);
                f.set(nu, x, 1.0);
                assert_eq!(theta_plaquette(&f, x, mu, nu).unwrap(), -1.0);
                assert_eq!(theta_plaquette(&f, s.backward(x, mu), mu, nu).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn antisymmetry() {
        let s = LatticeShape::new(3, 3, 3, 3).unwrap();
        let f = random_field(s, 1);
        for site in 0..s.volume() {
            for &(mu, nu) in &PLANES {
                let a = theta_plaquette(&f, site, mu, nu).unwrap();
                let b = theta_plaquette(&f, site, nu, mu).unwrap();
                assert_eq!(a, -b);
            }
        }
    }

    #[test]
    fn one_link_action_is_three_beta_u_squared() {
        let s = LatticeShape::new(4, 4, 4, 4).unwrap();
        let p = SimulationParams::new(1.7, 1.0).unwrap();
        let mut f = LinkField::zeros(s);
        f.set(2, 17, 0.3);
        let got = total_action(&f, &p, None).unwrap();
        assert!((got - 3.0 * 1.7 * 0.09).abs() < 1e-14);
        assert_eq!(total_action(&LinkField::zeros(s), &p, None).unwrap(), 0.0);
    }

    #[test]
    fn anisotropic_one_link_action() {
        // A z-link sits only in z-planes (weight 1/alpha); an x-link sits in
        // four non-z plaquettes and two z plaquettes.
        let s = LatticeShape::new(4, 4, 4, 4).unwrap();
        let p = SimulationParams::new(1.0, 1.0 / 3.0).unwrap();
        let mut f = LinkField::zeros(s);
        f.set(Z, 5, 1.0);
        assert!((total_action(&f, &p, None).unwrap() - 0.5 * 18.0).abs() < 1e-12);
        let mut f = LinkField::zeros(s);
        f.set(X, 5, 1.0);
        assert!((total_action(&f, &p, None).unwrap() - 0.5 * 22.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn isotropic_action_matches_naive_sum() {
        let s = LatticeShape::new(3, 2, 4, 3).unwrap();
        let f = random_field(s, 7);
        let p = SimulationParams::isotropic(0.8).unwrap();
        // Literal form: beta/2 * sum_x sum_{mu<nu} theta^2 with explicit coordinates.
        let mut naive = 0.0;
        for site in 0..s.volume() {
            let c = s.coords(site);
            for mu in 0..NDIM {
                for nu in (mu + 1)..NDIM {
                    let mut cm = c;
                    cm[mu] = (cm[mu] + 1) % s.extent(mu);
                    let mut cn = c;
                    cn[nu] = (cn[nu] + 1) % s.extent(nu);
                    let th = f.get(nu, s.site_index(cm)) - f.get(nu, site)
                        - f.get(mu, s.site_index(cn))
                        + f.get(mu, site);
                    naive += th * th;
                }
            }
        }
        naive *= 0.4;
        let got = total_action(&f, &p, None).unwrap();
        assert!((got - naive).abs() <= 1e-12 * naive.abs());
    }

    #[test]
    fn pure_gauge_is_flat() {
        let s = LatticeShape::new(3, 4, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GaugeScalarField::from_fn(s, |_| rng.random_range(-5.0..5.0));
        let f = g.pure_gauge_field();
        for site in 0..s.volume() {
            for &(mu, nu) in &PLANES {
                assert!(theta_plaquette(&f, site, mu, nu).unwrap().abs() < 1e-12 * 10.0);
            }
        }
        let p = SimulationParams::new(1.0, 0.5).unwrap();
        assert!(total_action(&f, &p, None).unwrap().abs() < 1e-20);
    }

    #[test]
    fn identity_gauge_transform() {
        let s = LatticeShape::new(2, 3, 2, 2).unwrap();
        let f = random_field(s, 11);
        let g = GaugeScalarField::zeros(s);
        assert_eq!(apply_gauge_transform(&f, &g).unwrap(), f);
        let other = GaugeScalarField::zeros(LatticeShape::new(2, 2, 2, 2).unwrap());
        assert!(apply_gauge_transform(&f, &other).is_err());
    }

    #[test]
    fn locality_of_one_link_change() {
        let s = LatticeShape::new(4, 3, 4, 3).unwrap();
        let f = random_field(s, 5);
        let mut g = f.clone();
        let (dir, site) = (1, 29);
        g.set(dir, site, f.get(dir, site) + 0.5);
        let mut changed = 0;
        for x in 0..s.volume() {
            for &(mu, nu) in &PLANES {
                let a = theta_plaquette(&f, x, mu, nu).unwrap();
                let b = theta_plaquette(&g, x, mu, nu).unwrap();
                if (a - b).abs() > 1e-15 {
                    changed += 1;
                }
            }
        }
        assert_eq!(changed, 6);
    }

    #[test]
    fn params_validation() {
        assert!(SimulationParams::new(0.0, 1.0).is_err());
        assert!(SimulationParams::new(1.0, -1.0).is_err());
        assert!(SimulationParams::new(f64::NAN, 1.0).is_err());
    }
}
