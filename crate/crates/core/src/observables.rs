//! Vacuum energy observable, error analysis and the four-scene subtraction.
//!
//! The per-site estimator is the Euclidean Hamiltonian density
//! `beta/2 [ -sum_i w_ti theta_ti^2 + sum_{i<j} w_ij theta_ij^2 ]`, with the
//! same plaquette weights as the action. Summing it over all sites and
//! dividing by `N_t` gives the energy of one time slice in units of `1/a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DielectricMap;
use crate::lattice::{LatticeShape, LinkField, Neighbors, PlaquetteWeights, SimulationParams, PLANES, T, X, Y, Z};
use crate::sampler::SceneContext;

/// One real per site; the local value of the energy estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDensityField {
    shape: LatticeShape,
    values: Vec<f64>,
}

impl EnergyDensityField {
    pub fn zeros(shape: LatticeShape) -> Self {
        Self {
            values: vec![0.0; shape.volume()],
            shape,
        }
    }

    pub fn from_values(shape: LatticeShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.volume() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} sites", shape.volume()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self { shape, values })
    }

    #[inline]
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, site: usize) -> f64 {
        self.values[site]
    }

    pub fn site_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Energy of one time slice, `site_sum / N_t`, in `1/a`.
    pub fn energy(&self) -> f64 {
        self.site_sum() / self.shape.extent(T) as f64
    }

    /// `(x, z)` cross-section averaged over `y` and `t`; `map[z][x]`.
    pub fn cross_section_xz(&self) -> Vec<Vec<f64>> {
        let s = &self.shape;
        let (nx, ny, nz, nt) = (s.extent(X), s.extent(Y), s.extent(Z), s.extent(T));
        let mut map = vec![vec![0.0; nx]; nz];
        for (site, v) in self.values.iter().enumerate() {
            let c = s.coords(site);
            map[c[Z]][c[X]] += v;
        }
        let norm = (ny * nt) as f64;
        for row in &mut map {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
        map
    }

    /// Average over `x`, `y` and `t`: the density profile along `z`.
    pub fn z_profile(&self) -> Vec<f64> {
        let s = &self.shape;
        let nz = s.extent(Z);
        let mut prof = vec![0.0; nz];
        for (site, v) in self.values.iter().enumerate() {
            prof[s.coord(site, Z)] += v;
        }
        let norm = (s.volume() / nz) as f64;
        prof.iter_mut().for_each(|v| *v /= norm);
        prof
    }
}

/// Per-site energy estimator of one configuration.
pub fn energy_density_observable(
    field: &LinkField,
    params: &SimulationParams,
    eps: Option<&DielectricMap>,
) -> Result<EnergyDensityField> {
    let shape = *field.shape();
    let w = PlaquetteWeights::new(&shape, params, eps)?;
    let nb = Neighbors::new(&shape);
    let half_beta = 0.5 * params.beta();
    let values = (0..shape.volume())
        .map(|site| half_beta * site_energy(field, &nb, &w, site))
        .collect();
    Ok(EnergyDensityField { shape, values })
}

/// Lattice sum of the estimator divided by `N_t`, without building the field.
pub fn energy_of(field: &LinkField, params: &SimulationParams, eps: Option<&DielectricMap>) -> Result<f64> {
    let shape = *field.shape();
    let w = PlaquetteWeights::new(&shape, params, eps)?;
    let nb = Neighbors::new(&shape);
    let sum: f64 = (0..shape.volume()).map(|site| site_energy(field, &nb, &w, site)).sum();
    Ok(0.5 * params.beta() * sum / shape.extent(T) as f64)
}

#[inline]
fn site_energy(field: &LinkField, nb: &Neighbors, w: &PlaquetteWeights<'_>, site: usize) -> f64 {
    let mut e = 0.0;
    for &(mu, nu) in &PLANES {
        let th = field.theta_with(nb, site, mu, nu);
        let term = w.weight(site, mu, nu) * th * th;
        // Electric planes carry the time index; their sign is flipped.
        if nu == T {
            e -= term;
        } else {
            e += term;
        }
    }
    e
}

/// A scalar result with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub bins: usize,
    pub measurements: usize,
}

impl EnergyEstimate {
    /// An exact value (standard error zero).
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            bins: 0,
            measurements: 0,
        }
    }
}

/// Mean and jackknife standard error of `series` in bins of `bin_size`.
///
/// A trailing partial bin is dropped. For the sample mean the jackknife
/// estimate equals the standard error of the bin means.
pub fn binned_jackknife(series: &[f64], bin_size: usize) -> Result<EnergyEstimate> {
    if bin_size == 0 {
        return Err(Error::InvalidArgument("bin size must be >= 1".into()));
    }
    let nbins = series.len() / bin_size;
    if nbins < 2 {
        return Err(Error::Statistics(format!(
            "{} measurements in bins of {bin_size} leave fewer than 2 bins",
            series.len()
        )));
    }
    let used = nbins * bin_size;
    let bin_means: Vec<f64> = series[..used]
        .chunks_exact(bin_size)
        .map(|c| c.iter().sum::<f64>() / bin_size as f64)
        .collect();
    let total: f64 = bin_means.iter().sum();
    let n = nbins as f64;
    let mean = total / n;
    // Leave-one-bin-out estimates.
    let var_jk = bin_means
        .iter()
        .map(|b| {
            let loo = (total - b) / (n - 1.0);
            (loo - mean).powi(2)
        })
        .sum::<f64>()
        * (n - 1.0)
        / n;
    Ok(EnergyEstimate {
        mean,
        std_error: var_jk.sqrt(),
        bins: nbins,
        measurements: series.len(),
    })
}

/// Integrated autocorrelation time with Sokal's automatic window (`c = 6`).
pub fn integrated_autocorrelation_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 0.5;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0 = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = (0..n - t)
            .map(|i| (series[i] - mean) * (series[i + t] - mean))
            .sum::<f64>()
            / n as f64;
        tau += ct / c0;
        if (t as f64) >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Bin size of about four autocorrelation times, keeping at least
/// `min_bins` bins when the series allows it.
pub fn choose_bin_size(series: &[f64], min_bins: usize) -> usize {
    let tau = integrated_autocorrelation_time(series);
    let wanted = (4.0 * tau).ceil().max(1.0) as usize;
    let cap = (series.len() / min_bins.max(2)).max(1);
    wanted.min(cap)
}

/// Streaming accumulator for one scene: per-site running sums plus the
/// per-measurement energy series.
#[derive(Clone, Debug)]
pub struct EnergyAccumulator {
    shape: LatticeShape,
    site_sums: Vec<f64>,
    series: Vec<f64>,
}

impl EnergyAccumulator {
    pub fn new(shape: LatticeShape) -> Self {
        Self {
            site_sums: vec![0.0; shape.volume()],
            series: Vec::new(),
            shape,
        }
    }

    pub fn push(&mut self, density: &EnergyDensityField) -> Result<()> {
        self.shape.check_same(density.shape())?;
        for (acc, v) in self.site_sums.iter_mut().zip(&density.values) {
            *acc += v;
        }
        self.series.push(density.energy());
        Ok(())
    }

    /// Measures `field` in the scene of `ctx` and adds it, without
    /// materializing the density. Bit-identical to `push` of
    /// [`energy_density_observable`].
    pub fn push_field(&mut self, field: &LinkField, ctx: &SceneContext) -> Result<()> {
        self.shape.check_same(field.shape())?;
        let w = ctx.weights();
        let nb = ctx.neighbors();
        let half_beta = 0.5 * ctx.params().beta();
        let mut total = -0.0;
        for (site, acc) in self.site_sums.iter_mut().enumerate() {
            let v = half_beta * site_energy(field, nb, &w, site);
            *acc += v;
            total += v;
        }
        self.series.push(total / self.shape.extent(T) as f64);
        Ok(())
    }

    /// Rebuilds an accumulator from saved running sums and series.
    pub fn from_parts(shape: LatticeShape, site_sums: Vec<f64>, series: Vec<f64>) -> Result<Self> {
        if site_sums.len() != shape.volume() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} site sums", shape.volume()),
                found: site_sums.len().to_string(),
            });
        }
        Ok(Self { shape, site_sums, series })
    }

    pub fn site_sums(&self) -> &[f64] {
        &self.site_sums
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn series(&self) -> &[f64] {
        &self.series
    }

    /// Finalizes with the given bin size, or an automatic one if `None`.
    pub fn finish(self, bin_size: Option<usize>) -> Result<SceneStatistics> {
        let n = self.series.len();
        if n < 2 {
            return Err(Error::Statistics(format!("need >= 2 measurements, have {n}")));
        }
        let bin = bin_size.unwrap_or_else(|| choose_bin_size(&self.series, 16));
        let estimate = binned_jackknife(&self.series, bin)?;
        let inv = 1.0 / n as f64;
        let mean = EnergyDensityField {
            shape: self.shape,
            values: self.site_sums.iter().map(|s| s * inv).collect(),
        };
        Ok(SceneStatistics {
            mean,
            estimate,
            series: self.series,
            bin_size: bin,
        })
    }
}

/// Mean density, scalar energy estimate and the raw energy series of a scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneStatistics {
    pub mean: EnergyDensityField,
    pub estimate: EnergyEstimate,
    pub series: Vec<f64>,
    pub bin_size: usize,
}

/// Per-site means and the binned-jackknife energy of a stream of fields.
pub fn accumulate_statistics<I>(stream: I, bin_size: Option<usize>) -> Result<SceneStatistics>
where
    I: IntoIterator<Item = EnergyDensityField>,
{
    let mut iter = stream.into_iter().peekable();
    let shape = match iter.peek() {
        Some(f) => *f.shape(),
        None => return Err(Error::Statistics("empty measurement stream".into())),
    };
    let mut acc = EnergyAccumulator::new(shape);
    for f in iter {
        acc.push(&f)?;
    }
    acc.finish(bin_size)
}

/// How the errors of the four scenes are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCombination {
    /// Independent chains: variances add.
    #[default]
    Independent,
    /// Chains share their noise: the four series are combined measurement
    /// by measurement before binning.
    Correlated,
}

/// `full - only_a - only_b + free`, per site and for the total.
pub fn renormalize_interaction_energy(
    full: &SceneStatistics,
    only_a: &SceneStatistics,
    only_b: &SceneStatistics,
    free: &SceneStatistics,
    combination: ErrorCombination,
) -> Result<(EnergyDensityField, EnergyEstimate)> {
    let shape = *full.mean.shape();
    for s in [only_a, only_b, free] {
        shape.check_same(s.mean.shape())?;
    }
    let values = full
        .mean
        .values
        .iter()
        .zip(&only_a.mean.values)
        .zip(&only_b.mean.values)
        .zip(&free.mean.values)
        .map(|(((f, a), b), o)| f - a - b + o)
        .collect();
    let density = EnergyDensityField { shape, values };
    let estimate = match combination {
        ErrorCombination::Independent => {
            let mean = full.estimate.mean - only_a.estimate.mean - only_b.estimate.mean
                + free.estimate.mean;
            let var: f64 = [full, only_a, only_b, free]
                .iter()
                .map(|s| s.estimate.std_error.powi(2))
                .sum();
            EnergyEstimate {
                mean,
                std_error: var.sqrt(),
                bins: [full, only_a, only_b, free].iter().map(|s| s.estimate.bins).min().unwrap(),
                measurements: full.estimate.measurements,
            }
        }
        ErrorCombination::Correlated => {
            let n = full.series.len();
            if [only_a, only_b, free].iter().any(|s| s.series.len() != n) {
                return Err(Error::Statistics(
                    "correlated combination needs equally long series".into(),
                ));
            }
            let combined: Vec<f64> = (0..n)
                .map(|i| full.series[i] - only_a.series[i] - only_b.series[i] + free.series[i])
                .collect();
            let bin = choose_bin_size(&combined, 16);
            binned_jackknife(&combined, bin)?
        }
    };
    Ok((density, estimate))
}

/// Row of the lateral-shift table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LateralPoint {
    pub shift: usize,
    pub energy: f64,
    pub energy_err: f64,
    /// `-dE/ds` by symmetric difference, in `1/a` per x step.
    pub force: f64,
    pub force_err: f64,
}

/// Energy curve over one full period of shifts and the lateral force
/// `F(s) = -[E(s+1) - E(s-1)] / 2` with periodic wrap.
///
/// `energies[s]` must hold the estimate for shift `s`, for `s` in `0..period`.
pub fn lateral_curve_and_force(energies: &[EnergyEstimate]) -> Result<Vec<LateralPoint>> {
    let p = energies.len();
    if p < 3 {
        return Err(Error::InvalidArgument(format!(
            "a lateral curve needs at least 3 shifts, got {p}"
        )));
    }
    Ok((0..p)
        .map(|s| {
            let up = &energies[(s + 1) % p];
            let down = &energies[(s + p - 1) % p];
            LateralPoint {
                shift: s,
                energy: energies[s].mean,
                energy_err: energies[s].std_error,
                force: -(up.mean - down.mean) / 2.0,
                force_err: 0.5 * (up.std_error.powi(2) + down.std_error.powi(2)).sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_gauge_transform, GaugeScalarField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shape() -> LatticeShape {
        LatticeShape::new(3, 4, 3, 2).unwrap()
    }

    fn random_field(seed: u64) -> LinkField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LinkField::from_fn(shape(), |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn push_field_matches_push() {
        use crate::geometry::{Body, BoxRegion, SceneSpec};
        let params = SimulationParams::new(1.3, 0.5).unwrap();
        let region = BoxRegion { lo: [0.0, 0.0, 1.0], hi: [3.0, 3.0, 2.0] };
        let scene = SceneSpec::new(shape(), params, vec![
            Body::Plate { z: 0 },
            Body::Dielectric { region, epsilon: 4.0 },
        ])
        .unwrap();
        let ctx = SceneContext::new(&scene).unwrap();
        let eps = scene.dielectric().unwrap();
        let mut a = EnergyAccumulator::new(shape());
        let mut b = EnergyAccumulator::new(shape());
        for seed in 0..3 {
            let f = random_field(seed);
            a.push(&energy_density_observable(&f, &params, eps.as_ref()).unwrap()).unwrap();
            b.push_field(&f, &ctx).unwrap();
        }
        assert_eq!(a.series(), b.series());
        assert_eq!(a.site_sums(), b.site_sums());
        let c = EnergyAccumulator::from_parts(shape(), b.site_sums().to_vec(), b.series().to_vec()).unwrap();
        assert_eq!(c.finish(Some(1)).unwrap(), a.finish(Some(1)).unwrap());
    }

    #[test]
    fn zero_and_pure_gauge_fields_have_zero_density() {
        let p = SimulationParams::new(1.0, 0.4).unwrap();
        let d = energy_density_observable(&LinkField::zeros(shape()), &p, None).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = GaugeScalarField::from_fn(shape(), |_| rng.random_range(-3.0..3.0));
        let d = energy_density_observable(&g.pure_gauge_field(), &p, None).unwrap();
        assert!(d.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn single_link_density_by_hand() {
        // A lone x link of size u enters planes (x,y), (x,z) and (x,t) twice each.
        let s = LatticeShape::new(4, 4, 4, 4).unwrap();
        let mut f = LinkField::zeros(s);
        f.set(X, 0, 2.0);
        let p = SimulationParams::new(3.0, 0.5).unwrap();
        let e = energy_of(&f, &p, None).unwrap();
        let (a, inv) = (0.5, 2.0);
        // magnetic: 2 (x,y) at alpha + 2 (x,z) at 1/alpha; electric: 2 (x,t) at alpha.
        let expect = 0.5 * 3.0 * 4.0 * (2.0 * a + 2.0 * inv - 2.0 * a) / 4.0;
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn observable_is_gauge_invariant() {
        let p = SimulationParams::new(1.7, 1.0 / 3.0).unwrap();
        let f = random_field(9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = GaugeScalarField::from_fn(shape(), |_| rng.random_range(-5.0..5.0));
        let a = energy_density_observable(&f, &p, None).unwrap();
        let b = energy_density_observable(&apply_gauge_transform(&f, &g).unwrap(), &p, None).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-3));
        }
        assert!((a.energy() - energy_of(&f, &p, None).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cross_section_shape_and_average() {
        let s = LatticeShape::new(5, 2, 3, 2).unwrap();
        let d = EnergyDensityField::from_values(s, (0..s.volume()).map(|i| s.coord(i, X) as f64).collect()).unwrap();
        let m = d.cross_section_xz();
        assert_eq!((m.len(), m[0].len()), (3, 5));
        assert_eq!(m[2][4], 4.0);
        assert_eq!(d.z_profile(), vec![2.0; 3]);
    }

    #[test]
    fn constant_stream_has_zero_error() {
        let s = shape();
        let f = EnergyDensityField::from_values(s, vec![0.25; s.volume()]).unwrap();
        let st = accumulate_statistics(vec![f.clone(), f.clone(), f], Some(1)).unwrap();
        assert_eq!(st.estimate.std_error, 0.0);
        assert_eq!(st.mean.values()[5], 0.25);
        assert!((st.estimate.mean - 0.25 * s.volume() as f64 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn alternating_series_error() {
        for n in [10usize, 40, 1000] {
            let series: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let e = binned_jackknife(&series, 1).unwrap();
            assert_eq!(e.mean, 0.0);
            assert!((e.std_error - 1.0 / ((n - 1) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_bins_is_an_error() {
        assert!(binned_jackknife(&[1.0, 2.0, 3.0], 2).is_err());
        assert!(accumulate_statistics(Vec::<EnergyDensityField>::new(), None).is_err());
    }

    #[test]
    fn renormalization_is_the_four_term_sum() {
        let s = shape();
        let mk = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fields: Vec<_> = (0..8)
                .map(|_| EnergyDensityField::from_values(s, (0..s.volume()).map(|_| rng.random()).collect()).unwrap())
                .collect();
            accumulate_statistics(fields, Some(2)).unwrap()
        };
        let (f, a, b, o) = (mk(1), mk(2), mk(3), mk(4));
        for comb in [ErrorCombination::Independent, ErrorCombination::Correlated] {
            let (d, e) = renormalize_interaction_energy(&f, &a, &b, &o, comb).unwrap();
            for i in 0..s.volume() {
                assert_eq!(d.get(i), f.mean.get(i) - a.mean.get(i) - b.mean.get(i) + o.mean.get(i));
            }
            let direct = f.estimate.mean - a.estimate.mean - b.estimate.mean + o.estimate.mean;
            assert!((e.mean - direct).abs() < 1e-12);
        }
        let (d, e) = renormalize_interaction_energy(&f, &f, &f, &f, ErrorCombination::Correlated).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
        assert_eq!((e.mean, e.std_error), (0.0, 0.0));
        // Body B absent: the result is full - only_a.
        let (d, _) = renormalize_interaction_energy(&f, &a, &o, &o, ErrorCombination::Independent).unwrap();
        for i in 0..s.volume() {
            assert!((d.get(i) - (f.mean.get(i) - a.mean.get(i))).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_scenes_are_rejected() {
        let mk = |s: LatticeShape| accumulate_statistics(vec![EnergyDensityField::zeros(s); 4], Some(1)).unwrap();
        let a = mk(shape());
        let b = mk(LatticeShape::new(4, 4, 3, 2).unwrap());
        assert!(renormalize_interaction_energy(&a, &a, &b, &a, ErrorCombination::Independent).is_err());
    }

    #[test]
    fn lateral_force_by_symmetric_difference() {
        let e: Vec<EnergyEstimate> = (0..6)
            .map(|s| EnergyEstimate { mean: (s as f64).powi(2), std_error: 0.1, bins: 4, measurements: 8 })
            .collect();
        let pts = lateral_curve_and_force(&e).unwrap();
        assert_eq!(pts[2].force, -(9.0 - 1.0) / 2.0);
        assert_eq!(pts[0].force, -(1.0 - 25.0) / 2.0);
        assert!((pts[3].force_err - 0.5 * 0.02f64.sqrt()).abs() < 1e-15);
        assert!(lateral_curve_and_force(&e[..2]).is_err());
    }

    #[test]
    fn autocorrelated_error_grows_to_plateau() {
        // AR(1) with coefficient rho: the true error of the mean is
        // sigma/sqrt(n) * sqrt((1+rho)/(1-rho)).
        let rho: f64 = 0.8;
        let n = 1 << 17;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut x = 0.0;
        let series: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                x = rho * x + (1.0 - rho * rho).sqrt() * z;
                x
            })
            .collect();
        let truth = ((1.0 + rho) / (1.0 - rho)).sqrt() / (n as f64).sqrt();
        let errs: Vec<f64> = [1, 2, 4, 8, 16, 32, 64, 128]
            .iter()
            .map(|&b| binned_jackknife(&series, b).unwrap().std_error)
            .collect();
        for w in errs.windows(2).take(4) {
            assert!(w[1] > w[0]);
        }
        assert!((errs[0] * (n as f64).sqrt() - 1.0).abs() < 0.02);
        assert!((errs[7] / truth - 1.0).abs() < 0.1, "{} vs {truth}", errs[7]);
        let tau = integrated_autocorrelation_time(&series);
        let tau_true = 0.5 * (1.0 + rho) / (1.0 - rho);
        assert!((tau / tau_true - 1.0).abs() < 0.15, "tau {tau} vs {tau_true}");
        let auto = binned_jackknife(&series, choose_bin_size(&series, 16)).unwrap();
        assert!((auto.std_error / truth - 1.0).abs() < 0.15);
    }
}
