//! Experiment definitions: which scenes to sample, how to combine them and
//! which reference columns to attach.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::geometry::{renormalization_scenes, Body, SceneSpec};
use crate::lattice::{LatticeShape, PLANES};
use crate::observables::{
    binned_jackknife, choose_bin_size, renormalize_interaction_energy, EnergyAccumulator, EnergyEstimate,
    ErrorCombination, SceneStatistics,
};
use crate::reference::{
    opfa_gratings, periodic_modesum_constant, periodic_plate_pair_factor, pfa_gratings, plates_lattice_coefficient,
    small_lattice_gaussian_oracle,
};
use crate::runner::config::{grating_pair_specs, ExperimentKind, RunConfig};
use crate::runner::output::{Cell, OutputRecord, OutputSet, RunStatus};
use crate::runner::tasks::{run_key, run_tasks, SceneTask, TaskSettings};
use crate::sampler::{Chain, SceneContext};

/// Column sets of the main table of each experiment kind.
pub const PLATES_COLUMNS: &[&str] = &["R", "E_MC", "err", "E_ref", "E_ref_err"];
pub const PERIODIC_COLUMNS: &[&str] = &["R", "T00_R4", "err", "modesum", "modesum_err"];
pub const GRATING_COLUMNS: &[&str] =
    &["shift", "E_MC", "err", "E_PFA", "E_PFA_err", "E_OPFA", "E_OPFA_err", "F_lat", "F_err"];
pub const SCENE_COLUMNS: &[&str] = &["quantity", "E_MC", "err"];
pub const ORACLE_COLUMNS: &[&str] = &["plane", "z", "oracle", "oracle_err", "mc", "err", "z_score"];

const SCENE_NAMES: [&str; 4] = ["full", "only_a", "only_b", "free"];

/// Execution knobs that do not change results.
#[derive(Clone, Debug, Default)]
pub struct ExecOptions {
    /// Overrides the configured worker count.
    pub workers: Option<usize>,
    /// Where per-task checkpoints live; `None` disables checkpointing.
    pub checkpoint_dir: Option<PathBuf>,
    /// Report finished tasks on stderr.
    pub progress: bool,
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    settings: TaskSettings,
    workers: usize,
    combination: ErrorCombination,
    failures: Vec<String>,
}

impl Runner<'_> {
    /// Stream of a task: shared by the scenes of a data point when the
    /// chains are correlated, unique otherwise.
    fn stream(&self, point: usize, unique: usize) -> u64 {
        if self.cfg.correlated() {
            point as u64
        } else {
            unique as u64
        }
    }

    fn run(&mut self, tasks: &[SceneTask]) -> Vec<Option<SceneStatistics>> {
        run_tasks(tasks, &self.settings, self.workers)
            .into_iter()
            .zip(tasks)
            .map(|(r, t)| match r {
                Ok(s) => Some(s),
                Err(e) => {
                    self.failures.push(format!("{}: {e}", t.label));
                    None
                }
            })
            .collect()
    }

    fn combine(
        &mut self,
        label: &str,
        s: [&Option<SceneStatistics>; 4],
    ) -> Option<(crate::observables::EnergyDensityField, EnergyEstimate)> {
        let [Some(f), Some(a), Some(b), Some(o)] = s else {
            return None;
        };
        match renormalize_interaction_energy(f, a, b, o, self.combination) {
            Ok(r) => Some(r),
            Err(e) => {
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }

    fn status(&self) -> RunStatus {
        if self.failures.is_empty() {
            RunStatus::Complete
        } else {
            RunStatus::Incomplete(self.failures.join("; "))
        }
    }
}

/// Runs the experiment described by `cfg`.
///
/// Setup problems are returned as errors. Failures of individual chains
/// abort the remaining ones; the data points that were fully measured are
/// still returned, in an output set marked incomplete.
pub fn execute_experiment(cfg: &RunConfig, opts: &ExecOptions) -> Result<OutputSet> {
    let mut keyed = cfg.clone();
    keyed.workers = None;
    keyed.output_dir = None;
    let settings = TaskSettings {
        sampler: cfg.sampler_config(),
        bin_size: cfg.bin_size(),
        checkpoint_dir: opts.checkpoint_dir.clone(),
        checkpoint_every: cfg.checkpoint_every(),
        run_key: run_key(&keyed.to_toml()),
        progress: opts.progress,
    };
    let mut runner = Runner {
        cfg,
        settings,
        workers: opts.workers.unwrap_or_else(|| cfg.workers()),
        combination: if cfg.correlated() {
            ErrorCombination::Correlated
        } else {
            ErrorCombination::Independent
        },
        failures: Vec::new(),
    };
    let records = match cfg.experiment {
        ExperimentKind::PlatesSweep => plates_sweep(&mut runner)?,
        ExperimentKind::PeriodicSweep => periodic_sweep(&mut runner)?,
        ExperimentKind::GratingLateral => grating_lateral(&mut runner)?,
        ExperimentKind::SingleScene => single_scene(&mut runner)?,
        ExperimentKind::OracleCheck => oracle_check(cfg)?,
    };
    Ok(OutputSet {
        config: cfg.clone(),
        records,
        status: runner.status(),
    })
}

fn four_tasks(runner: &Runner<'_>, scene: &SceneSpec, prefix: &str, point: usize) -> Result<Vec<SceneTask>> {
    let scenes = renormalization_scenes(scene)?;
    Ok(scenes
        .as_array()
        .into_iter()
        .zip(SCENE_NAMES)
        .enumerate()
        .map(|(j, (s, name))| SceneTask {
            label: format!("{prefix}-{name}"),
            scene: s.clone(),
            stream: runner.stream(point, 4 * point + j),
        })
        .collect())
}

fn plates_sweep(runner: &mut Runner<'_>) -> Result<Vec<OutputRecord>> {
    let cfg = runner.cfg;
    let p = cfg.plates.as_ref().expect("validated");
    let params = cfg.params();
    let (n, nt, factor) = (p.lateral, p.time.unwrap(), p.nz_factor.unwrap());
    let coefficient = plates_lattice_coefficient(n, params.alpha())?;

    let mut tasks = Vec::new();
    for (i, &r) in p.separations.iter().enumerate() {
        let shape = LatticeShape::new(n, n, factor * r, nt)?;
        let scene = SceneSpec::new(shape, params, vec![Body::Plate { z: 0 }, Body::Plate { z: r }])?;
        tasks.extend(four_tasks(runner, &scene, &format!("R{r:03}"), i)?);
    }
    let stats = runner.run(&tasks);

    let mut table = OutputRecord::table("plates_sweep", PLATES_COLUMNS);
    let (mut sum_eg, mut sum_gg, mut sum_var) = (0.0, 0.0, 0.0);
    let mut fitted = 0;
    for (i, &r) in p.separations.iter().enumerate() {
        let s = &stats[4 * i..4 * i + 4];
        let Some((_, e)) = runner.combine(&format!("R{r:03}"), [&s[0], &s[1], &s[2], &s[3]]) else {
            continue;
        };
        let g = periodic_plate_pair_factor(r, factor * r)?;
        table.push(vec![r.into(), e.mean.into(), e.std_error.into(), (-coefficient * g).into(), 0.0.into()]);
        if r >= p.fit_min_separation.unwrap() {
            sum_eg += e.mean * g;
            sum_gg += g * g;
            sum_var += g * g * e.std_error * e.std_error;
            fitted += 1;
        }
    }
    // E = P1 g(R), unweighted least squares; g(R) reduces to 1/R^3 for a
    // long periodic z-extent.
    let (fit, fit_err) = if fitted > 0 {
        (sum_eg / sum_gg, sum_var.sqrt() / sum_gg)
    } else {
        (f64::NAN, f64::NAN)
    };
    table.push(vec!["fit_P1".into(), fit.into(), fit_err.into(), (-coefficient).into(), 0.0.into()]);
    Ok(vec![table])
}

fn periodic_sweep(runner: &mut Runner<'_>) -> Result<Vec<OutputRecord>> {
    let cfg = runner.cfg;
    let p = cfg.periodic.as_ref().expect("validated");
    let params = cfg.params();
    let n = p.lateral;
    let tasks = p
        .lengths
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            Ok(SceneTask {
                label: format!("L{r:03}"),
                scene: SceneSpec::empty(LatticeShape::new(n, n, r, n)?, params),
                stream: i as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = runner.run(&tasks);
    let reference = periodic_modesum_constant();
    let mut table = OutputRecord::table("periodic_sweep", PERIODIC_COLUMNS);
    for (&r, s) in p.lengths.iter().zip(&stats) {
        let Some(s) = s else { continue };
        // Energy density E / (N^2 R) times R^4.
        let scale = (r as f64).powi(3) / (n * n) as f64;
        table.push(vec![
            r.into(),
            (s.estimate.mean * scale).into(),
            (s.estimate.std_error * scale).into(),
            reference.value.into(),
            reference.convergence.into(),
        ]);
    }
    Ok(vec![table])
}

/// `-[E(s+1) - E(s-1)] / 2` from the shift-dependent scenes only; the
/// shift-independent ones cancel in the difference.
fn lateral_force(
    combination: ErrorCombination,
    up: (&SceneStatistics, &SceneStatistics),
    down: (&SceneStatistics, &SceneStatistics),
) -> Result<EnergyEstimate> {
    match combination {
        ErrorCombination::Independent => {
            let mean = -0.5
                * (up.0.estimate.mean - up.1.estimate.mean - down.0.estimate.mean + down.1.estimate.mean);
            let var: f64 = [up.0, up.1, down.0, down.1].iter().map(|s| s.estimate.std_error.powi(2)).sum();
            Ok(EnergyEstimate {
                mean,
                std_error: 0.5 * var.sqrt(),
                bins: up.0.estimate.bins,
                measurements: up.0.estimate.measurements,
            })
        }
        ErrorCombination::Correlated => {
            let series: Vec<f64> = (0..up.0.series.len())
                .map(|i| -0.5 * (up.0.series[i] - up.1.series[i] - down.0.series[i] + down.1.series[i]))
                .collect();
            binned_jackknife(&series, choose_bin_size(&series, 16))
        }
    }
}

fn grating_lateral(runner: &mut Runner<'_>) -> Result<Vec<OutputRecord>> {
    let cfg = runner.cfg;
    let g = cfg.grating.as_ref().expect("validated");
    let params = cfg.params();
    let shape = LatticeShape::new(g.nx, g.ny.unwrap(), g.nz.unwrap(), g.nt.unwrap())?;
    let shifts = g.shifts.clone().unwrap();
    let period = (g.tooth_width + g.gap_width) as i64;
    let (bottom, _) = grating_pair_specs(g, 0);

    let mut tasks = vec![
        SceneTask {
            label: "free".into(),
            scene: SceneSpec::empty(shape, params),
            stream: runner.stream(0, 0),
        },
        SceneTask {
            label: "only_a".into(),
            scene: SceneSpec::new(shape, params, vec![Body::Grating(bottom)])?,
            stream: runner.stream(0, 1),
        },
    ];
    for (i, &s) in shifts.iter().enumerate() {
        let (_, top) = grating_pair_specs(g, s);
        let full = SceneSpec::new(shape, params, vec![Body::Grating(bottom), Body::Grating(top)])?;
        let scenes = renormalization_scenes(&full)?;
        tasks.push(SceneTask {
            label: format!("s{s:+03}-full"),
            scene: scenes.full,
            stream: runner.stream(0, 2 + 2 * i),
        });
        tasks.push(SceneTask {
            label: format!("s{s:+03}-only_b"),
            scene: scenes.only_b,
            stream: runner.stream(0, 3 + 2 * i),
        });
    }
    let stats = runner.run(&tasks);
    let (free, only_a) = (&stats[0], &stats[1]);
    let full = |i: usize| &stats[2 + 2 * i];
    let only_b = |i: usize| &stats[3 + 2 * i];

    let whole_period = shifts.len() == period as usize && shifts.iter().enumerate().all(|(i, &s)| s == i as i64);
    let mut table = OutputRecord::table("grating_lateral", GRATING_COLUMNS);
    let mut maps = Vec::new();
    for (i, &s) in shifts.iter().enumerate() {
        let label = format!("s{s:+03}");
        let Some((density, e)) = runner.combine(&label, [full(i), only_a, only_b(i), free]) else {
            continue;
        };
        let (_, top) = grating_pair_specs(g, s);
        let pfa = -pfa_gratings(&bottom, &top, &shape, params.alpha())?;
        let opfa = opfa_gratings(&bottom, &top, &shape, params.alpha(), g.opfa_refinement.unwrap())?;
        let force = if whole_period {
            let up = (i + 1) % shifts.len();
            let down = (i + shifts.len() - 1) % shifts.len();
            match (full(up), only_b(up), full(down), only_b(down)) {
                (Some(fu), Some(bu), Some(fd), Some(bd)) => {
                    Some(lateral_force(runner.combination, (fu, bu), (fd, bd))?)
                }
                _ => None,
            }
        } else {
            None
        };
        let (f, f_err) = force.map_or((f64::NAN, f64::NAN), |f| (f.mean, f.std_error));
        table.push(vec![
            Cell::Int(s),
            e.mean.into(),
            e.std_error.into(),
            pfa.into(),
            0.0.into(),
            opfa.value.into(),
            opfa.convergence.into(),
            f.into(),
            f_err.into(),
        ]);
        if g.density_maps.unwrap() {
            maps.push(OutputRecord::density_map(&format!("density_shift_{s:02}"), &density.cross_section_xz()));
        }
    }
    let mut records = vec![table];
    records.extend(maps);
    Ok(records)
}

fn single_scene(runner: &mut Runner<'_>) -> Result<Vec<OutputRecord>> {
    let cfg = runner.cfg;
    let sc = cfg.scene.as_ref().expect("validated");
    let scene = sc.scene(cfg.params())?;
    let mut table = OutputRecord::table("single_scene", SCENE_COLUMNS);
    let mut records = Vec::new();
    if sc.renormalize.unwrap() {
        let tasks = four_tasks(runner, &scene, "scene", 0)?;
        let stats = runner.run(&tasks);
        if let Some((density, e)) = runner.combine("scene", [&stats[0], &stats[1], &stats[2], &stats[3]]) {
            table.push(vec!["interaction".into(), e.mean.into(), e.std_error.into()]);
            records.push(OutputRecord::density_map("density", &density.cross_section_xz()));
        }
        for (name, s) in SCENE_NAMES.iter().zip(&stats) {
            if let Some(s) = s {
                table.push(vec![(*name).into(), s.estimate.mean.into(), s.estimate.std_error.into()]);
            }
        }
    } else {
        let task = SceneTask {
            label: "scene".into(),
            scene,
            stream: 0,
        };
        if let Some(s) = &runner.run(&[task])[0] {
            table.push(vec!["energy".into(), s.estimate.mean.into(), s.estimate.std_error.into()]);
            records.push(OutputRecord::density_map("density", &s.mean.cross_section_xz()));
        }
    }
    records.insert(0, table);
    Ok(records)
}

const AXES: [char; 4] = ['x', 'y', 'z', 't'];

/// Samples a small scene and compares the second moment of every
/// plaquette class `(plane, z)` and the energy with the exact Gaussian result.
pub fn oracle_check(cfg: &RunConfig) -> Result<Vec<OutputRecord>> {
    let o = cfg.oracle.as_ref().expect("validated");
    let shape = LatticeShape::from_extents(o.extents)?;
    let params = cfg.params();
    let bodies = o.plate_z.map(|z| vec![Body::Plate { z }]).unwrap_or_default();
    let scene = SceneSpec::new(shape, params, bodies)?;
    let ctx = SceneContext::new(&scene)?;
    let oracle = small_lattice_gaussian_oracle(&shape, &params, Some(ctx.mask()), None)?;

    let nz = shape.extent(crate::lattice::Z);
    let classes = PLANES.len() * nz;
    let class_of = |site: usize, plane: usize| plane * nz + shape.coord(site, crate::lattice::Z);
    let per_class = (shape.volume() / nz) as f64;

    let mut exact = vec![0.0; classes];
    for site in 0..shape.volume() {
        for (p, &(mu, nu)) in PLANES.iter().enumerate() {
            exact[class_of(site, p)] += oracle.theta_sq(site, mu, nu) / per_class;
        }
    }

    let mut series = vec![Vec::new(); classes];
    let mut energies = EnergyAccumulator::new(shape);
    let mut chain = Chain::new(&ctx, cfg.sampler_config(), 0)?;
    while let Some(field) = chain.next_measurement()? {
        let mut sums = vec![0.0; classes];
        for site in 0..shape.volume() {
            for (p, &(mu, nu)) in PLANES.iter().enumerate() {
                let th = field.theta_with(ctx.neighbors(), site, mu, nu);
                sums[class_of(site, p)] += th * th / per_class;
            }
        }
        for (s, v) in series.iter_mut().zip(sums) {
            s.push(v);
        }
        energies.push_field(field, &ctx)?;
    }

    let estimate = |s: &[f64]| -> Result<EnergyEstimate> {
        let bin = cfg.bin_size().unwrap_or_else(|| choose_bin_size(s, 16));
        binned_jackknife(s, bin)
    };
    let z_score = |mc: &EnergyEstimate, exact: f64| {
        let d = mc.mean - exact;
        if d == 0.0 {
            0.0
        } else {
            d / mc.std_error
        }
    };
    let mut table = OutputRecord::table("oracle_check", ORACLE_COLUMNS);
    for (p, &(mu, nu)) in PLANES.iter().enumerate() {
        for z in 0..nz {
            let c = p * nz + z;
            let mc = estimate(&series[c])?;
            table.push(vec![
                Cell::Text(format!("{}{}", AXES[mu], AXES[nu])),
                z.into(),
                exact[c].into(),
                0.0.into(),
                mc.mean.into(),
                mc.std_error.into(),
                z_score(&mc, exact[c]).into(),
            ]);
        }
    }
    let e_exact = oracle.mean_energy(&params, None)?;
    let e_mc = estimate(energies.series())?;
    table.push(vec![
        "energy".into(),
        "all".into(),
        e_exact.into(),
        0.0.into(),
        e_mc.mean.into(),
        e_mc.std_error.into(),
        z_score(&e_mc, e_exact).into(),
    ]);
    if !table.rows.iter().all(|r| r.iter().all(|c| c.as_f64().is_none_or(|v| !v.is_nan()))) {
        return Err(Error::Statistics("oracle comparison produced NaN".into()));
    }
    Ok(vec![table])
}
