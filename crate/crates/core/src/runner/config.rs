//! Experiment configuration: a TOML document with flat sections.
//!
//! Parsing fills every default, so the resolved config written back into
//! output headers (and `run.toml`) parses to the same value.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{grating_tip_gap, BoxRegion, Body, GratingSpec, Orientation, SceneSpec};
use crate::lattice::{LatticeShape, SimulationParams};
use crate::reference::ORACLE_MAX_LINKS;
use crate::sampler::{SamplerConfig, UpdateOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PlatesSweep,
    PeriodicSweep,
    GratingLateral,
    SingleScene,
    OracleCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PlatesSweep => "plates_sweep",
            ExperimentKind::PeriodicSweep => "periodic_sweep",
            ExperimentKind::GratingLateral => "grating_lateral",
            ExperimentKind::SingleScene => "single_scene",
            ExperimentKind::OracleCheck => "oracle_check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub thermalization_sweeps: Option<usize>,
    pub measurements: Option<usize>,
    pub interval: Option<usize>,
    pub update_order: Option<UpdateOrder>,
    /// Drive the four scenes of a data point with the same noise and combine
    /// them measurement by measurement.
    pub correlated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_size: Option<usize>,
    /// Measurements between checkpoints.
    pub checkpoint_every: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatesSection {
    /// N_x = N_y.
    pub lateral: usize,
    /// N_t; defaults to `lateral`.
    pub time: Option<usize>,
    pub separations: Vec<usize>,
    /// N_z = nz_factor * R.
    pub nz_factor: Option<usize>,
    pub fit_min_separation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicSection {
    /// N_x = N_y = N_t.
    pub lateral: usize,
    /// Periodic z-extents.
    pub lengths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingSection {
    pub nx: usize,
    pub ny: Option<usize>,
    pub nt: Option<usize>,
    pub tooth_width: usize,
    pub gap_width: usize,
    pub tooth_height: usize,
    /// Tip-to-tip gap in z-steps.
    pub separation: usize,
    /// Defaults to `2 H + R`: the two base planes coincide modulo N_z.
    pub nz: Option<usize>,
    pub shifts: Option<Vec<i64>>,
    pub opfa_refinement: Option<usize>,
    pub density_maps: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyEntry {
    Plate {
        z: usize,
    },
    Grating {
        tooth_width: usize,
        gap_width: usize,
        tooth_height: usize,
        base_z: usize,
        orientation: Orientation,
        #[serde(default)]
        shift: i64,
    },
    Dielectric {
        lo: [f64; 3],
        hi: [f64; 3],
        epsilon: f64,
    },
}

impl BodyEntry {
    fn to_body(&self) -> Body {
        match *self {
            BodyEntry::Plate { z } => Body::Plate { z },
            BodyEntry::Grating {
                tooth_width,
                gap_width,
                tooth_height,
                base_z,
                orientation,
                shift,
            } => Body::Grating(GratingSpec {
                tooth_width,
                gap_width,
                tooth_height,
                base_z,
                orientation,
                lateral_shift: shift,
            }),
            BodyEntry::Dielectric { lo, hi, epsilon } => Body::Dielectric {
                region: BoxRegion { lo, hi },
                epsilon,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    pub extents: [usize; 4],
    /// Run the four-scene subtraction (needs exactly two bodies).
    pub renormalize: Option<bool>,
    #[serde(default)]
    pub bodies: Vec<BodyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub extents: [usize; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plate_z: Option<usize>,
}

/// A validated experiment description with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub physics: Option<PhysicsSection>,
    pub sampler: Option<SamplerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plates: Option<PlatesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grating: Option<GratingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

/// 1-based line of `key` inside `[section]` (or the top level).
fn locate(text: &str, section: Option<&str>, key: &str) -> usize {
    let mut current: Option<String> = None;
    let mut fallback = 0;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            let name = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if section == Some(name.as_str()) && fallback == 0 {
                fallback = i + 1;
            }
            current = Some(name);
            continue;
        }
        let in_section = match section {
            None => current.is_none(),
            Some(s) => current.as_deref().is_some_and(|c| c == s || c.starts_with(&format!("{s}."))),
        };
        if in_section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    fallback
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: Option<&str>, key: &str, message: impl Into<String>) -> Error {
        let full = match section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        };
        Error::Config {
            line: locate(self.text, section, key),
            key: full,
            message: message.into(),
        }
    }
}

fn from_toml_error(text: &str, e: toml::de::Error) -> Error {
    let message = e.message().to_string();
    let mut line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    // Errors inside a table of an array point at the whole table; move to
    // the line holding the offending value.
    if let Some(value) = message.strip_prefix("unknown variant `").and_then(|m| m.split('`').next()) {
        let quoted = format!("\"{value}\"");
        if let Some(i) = text
            .lines()
            .enumerate()
            .skip(line.saturating_sub(1))
            .find(|(_, l)| l.contains('=') && l.contains(&quoted))
            .map(|(i, _)| i)
        {
            line = i + 1;
        }
    }
    let key = message
        .split('`')
        .nth(1)
        .filter(|_| message.contains("field"))
        .map(str::to_string)
        .or_else(|| {
            let l = text.lines().nth(line.saturating_sub(1))?;
            let (k, _) = l.split_once('=')?;
            Some(k.trim().to_string())
        })
        .unwrap_or_default();
    Error::Config { key, line, message }
}

/// Parses and validates a config document, filling every default.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| from_toml_error(text, e))?;
    let cx = Ctx { text };
    resolve(&mut cfg, &cx)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

impl RunConfig {
    /// The resolved config as TOML text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn params(&self) -> SimulationParams {
        let p = self.physics.as_ref().expect("resolved");
        SimulationParams::new(p.beta.unwrap(), p.alpha.unwrap()).expect("validated")
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        let s = self.sampler.as_ref().expect("resolved");
        SamplerConfig {
            seed: self.seed,
            thermalization_sweeps: s.thermalization_sweeps.unwrap(),
            measurement_count: s.measurements.unwrap(),
            decorrelation_interval: s.interval.unwrap(),
            update_order: s.update_order.unwrap(),
        }
    }

    pub fn correlated(&self) -> bool {
        self.sampler.as_ref().and_then(|s| s.correlated).unwrap_or(false)
    }

    pub fn bin_size(&self) -> Option<usize> {
        self.sampler.as_ref().and_then(|s| s.bin_size)
    }

    pub fn checkpoint_every(&self) -> usize {
        self.sampler.as_ref().and_then(|s| s.checkpoint_every).unwrap_or(50)
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("casimir-out"))
    }
}

fn section_missing(cx: &Ctx<'_>, name: &str, kind: ExperimentKind) -> Error {
    cx.err(None, "experiment", format!("experiment `{}` needs a [{name}] section", kind.name()))
}

fn resolve(cfg: &mut RunConfig, cx: &Ctx<'_>) -> Result<()> {
    let kind = cfg.experiment;
    let default_alpha = match kind {
        ExperimentKind::PlatesSweep | ExperimentKind::GratingLateral => 1.0 / 3.0,
        _ => 1.0,
    };
    let physics = cfg.physics.get_or_insert(PhysicsSection { beta: None, alpha: None });
    let beta = *physics.beta.get_or_insert(1.0);
    let alpha = *physics.alpha.get_or_insert(default_alpha);
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(cx.err(Some("physics"), "beta", format!("must be positive, got {beta}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(cx.err(Some("physics"), "alpha", format!("must be positive, got {alpha}")));
    }
    if cfg.workers == Some(0) {
        return Err(cx.err(None, "workers", "must be >= 1"));
    }
    cfg.workers.get_or_insert(1);
    cfg.output_dir.get_or_insert_with(|| PathBuf::from("casimir-out"));

    let s = cfg.sampler.get_or_insert(SamplerSection {
        thermalization_sweeps: None,
        measurements: None,
        interval: None,
        update_order: None,
        correlated: None,
        bin_size: None,
        checkpoint_every: None,
    });
    let interval = *s.interval.get_or_insert(2);
    s.measurements.get_or_insert(200);
    s.thermalization_sweeps.get_or_insert(10 * interval);
    s.update_order.get_or_insert(UpdateOrder::Fixed);
    s.correlated.get_or_insert(false);
    s.checkpoint_every.get_or_insert(50);
    for (key, v) in [
        ("interval", s.interval),
        ("measurements", s.measurements),
        ("thermalization_sweeps", s.thermalization_sweeps),
        ("checkpoint_every", s.checkpoint_every),
        ("bin_size", s.bin_size.or(Some(1))),
    ] {
        if v == Some(0) {
            return Err(cx.err(Some("sampler"), key, "must be >= 1"));
        }
    }
    if s.measurements.unwrap() < 2 {
        return Err(cx.err(Some("sampler"), "measurements", "need at least 2 measurements"));
    }
    let checkerboard = s.update_order == Some(UpdateOrder::Checkerboard);
    let even = |cx: &Ctx<'_>, section: &str, key: &str, extents: &[usize]| -> Result<()> {
        if checkerboard && extents.iter().any(|n| n % 2 != 0) {
            return Err(cx.err(Some(section), key, "checkerboard updates need even extents"));
        }
        Ok(())
    };

    let present = [
        ("plates", cfg.plates.is_some()),
        ("periodic", cfg.periodic.is_some()),
        ("grating", cfg.grating.is_some()),
        ("scene", cfg.scene.is_some()),
        ("oracle", cfg.oracle.is_some()),
    ];
    let wanted = match kind {
        ExperimentKind::PlatesSweep => "plates",
        ExperimentKind::PeriodicSweep => "periodic",
        ExperimentKind::GratingLateral => "grating",
        ExperimentKind::SingleScene => "scene",
        ExperimentKind::OracleCheck => "oracle",
    };
    for (name, is) in present {
        if is && name != wanted {
            return Err(cx.err(
                None,
                "experiment",
                format!("section [{name}] does not apply to `{}`", kind.name()),
            ));
        }
    }

    match kind {
        ExperimentKind::PlatesSweep => {
            let p = cfg.plates.as_mut().ok_or_else(|| section_missing(cx, "plates", kind))?;
            let time = *p.time.get_or_insert(p.lateral);
            let factor = *p.nz_factor.get_or_insert(2);
            p.fit_min_separation.get_or_insert(4);
            if p.separations.is_empty() {
                return Err(cx.err(Some("plates"), "separations", "must list at least one separation"));
            }
            if factor < 2 {
                return Err(cx.err(Some("plates"), "nz_factor", "must be >= 2 so both plates fit"));
            }
            for &r in &p.separations {
                if r < 1 {
                    return Err(cx.err(Some("plates"), "separations", "separations must be >= 1"));
                }
                let ext = [p.lateral, p.lateral, factor * r, time];
                LatticeShape::from_extents(ext).map_err(|e| cx.err(Some("plates"), "lateral", e.to_string()))?;
                even(cx, "plates", "separations", &ext)?;
            }
        }
        ExperimentKind::PeriodicSweep => {
            let p = cfg.periodic.as_ref().ok_or_else(|| section_missing(cx, "periodic", kind))?;
            if alpha != 1.0 {
                return Err(cx.err(
                    Some("physics"),
                    "alpha",
                    "the periodic sweep relies on the isotropic lattice (alpha = 1)",
                ));
            }
            if p.lengths.is_empty() {
                return Err(cx.err(Some("periodic"), "lengths", "must list at least one length"));
            }
            for &r in &p.lengths {
                let ext = [p.lateral, p.lateral, r, p.lateral];
                LatticeShape::from_extents(ext).map_err(|e| cx.err(Some("periodic"), "lengths", e.to_string()))?;
                even(cx, "periodic", "lengths", &ext)?;
            }
        }
        ExperimentKind::GratingLateral => {
            let g = cfg.grating.as_mut().ok_or_else(|| section_missing(cx, "grating", kind))?;
            g.ny.get_or_insert(g.nx);
            g.nt.get_or_insert(g.nx);
            let nz = *g.nz.get_or_insert(2 * g.tooth_height + g.separation);
            let period = g.tooth_width + g.gap_width;
            g.shifts.get_or_insert_with(|| (0..period as i64).collect());
            g.opfa_refinement.get_or_insert(8);
            g.density_maps.get_or_insert(true);
            if g.tooth_width < 1 || g.gap_width < 1 {
                return Err(cx.err(Some("grating"), "tooth_width", "tooth and gap widths must be >= 1"));
            }
            if g.nx % period != 0 {
                return Err(cx.err(
                    Some("grating"),
                    "nx",
                    format!("tooth_width + gap_width = {period} does not divide nx = {}", g.nx),
                ));
            }
            if g.separation < 1 {
                return Err(cx.err(Some("grating"), "separation", "must be >= 1"));
            }
            if nz < 2 * g.tooth_height + g.separation {
                return Err(cx.err(Some("grating"), "nz", "too small for two combs and their gap"));
            }
            if g.opfa_refinement == Some(0) {
                return Err(cx.err(Some("grating"), "opfa_refinement", "must be >= 1"));
            }
            let ext = [g.nx, g.ny.unwrap(), nz, g.nt.unwrap()];
            LatticeShape::from_extents(ext).map_err(|e| cx.err(Some("grating"), "nx", e.to_string()))?;
            even(cx, "grating", "nx", &ext)?;
            let (bottom, top) = grating_pair_specs(g, 0);
            let shape = LatticeShape::from_extents(ext)?;
            bottom.validate(&shape).map_err(|e| cx.err(Some("grating"), "tooth_height", e.to_string()))?;
            top.validate(&shape).map_err(|e| cx.err(Some("grating"), "tooth_height", e.to_string()))?;
            grating_tip_gap(&bottom, &top, &shape)?;
        }
        ExperimentKind::SingleScene => {
            let sc = cfg.scene.as_mut().ok_or_else(|| section_missing(cx, "scene", kind))?;
            let renorm = *sc.renormalize.get_or_insert(sc.bodies.len() == 2);
            if renorm && sc.bodies.len() != 2 {
                return Err(cx.err(Some("scene"), "renormalize", "the subtraction needs exactly two bodies"));
            }
            let shape = LatticeShape::from_extents(sc.extents)
                .map_err(|e| cx.err(Some("scene"), "extents", e.to_string()))?;
            even(cx, "scene", "extents", &sc.extents)?;
            let params = SimulationParams::new(beta, alpha)?;
            SceneSpec::new(shape, params, sc.bodies.iter().map(BodyEntry::to_body).collect())
                .map_err(|e| cx.err(Some("scene"), "bodies", e.to_string()))?;
        }
        ExperimentKind::OracleCheck => {
            let o = cfg.oracle.as_ref().ok_or_else(|| section_missing(cx, "oracle", kind))?;
            let shape = LatticeShape::from_extents(o.extents)
                .map_err(|e| cx.err(Some("oracle"), "extents", e.to_string()))?;
            if shape.link_count() > ORACLE_MAX_LINKS {
                return Err(cx.err(
                    Some("oracle"),
                    "extents",
                    format!("{} links exceed the oracle limit of {ORACLE_MAX_LINKS}", shape.link_count()),
                ));
            }
            even(cx, "oracle", "extents", &o.extents)?;
            if let Some(z) = o.plate_z {
                if z >= o.extents[2] {
                    return Err(cx.err(Some("oracle"), "plate_z", "plate outside the lattice"));
                }
            }
        }
    }
    Ok(())
}

/// Bottom comb (teeth up from z = 0) and top comb (teeth down, shifted by
/// `shift`) of a grating experiment.
pub fn grating_pair_specs(g: &GratingSection, shift: i64) -> (GratingSpec, GratingSpec) {
    let bottom = GratingSpec {
        tooth_width: g.tooth_width,
        gap_width: g.gap_width,
        tooth_height: g.tooth_height,
        base_z: 0,
        orientation: Orientation::Up,
        lateral_shift: 0,
    };
    let top = GratingSpec {
        base_z: 2 * g.tooth_height + g.separation,
        orientation: Orientation::Down,
        lateral_shift: shift,
        ..bottom
    };
    (bottom, top)
}

impl SceneSection {
    pub fn scene(&self, params: SimulationParams) -> Result<SceneSpec> {
        SceneSpec::new(
            LatticeShape::from_extents(self.extents)?,
            params,
            self.bodies.iter().map(BodyEntry::to_body).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLATES: &str = r#"
experiment = "plates_sweep"
seed = 7

[plates]
lateral = 8
separations = [2, 3, 4]
"#;

    #[test]
    fn plates_defaults() {
        let c = parse_config(PLATES).unwrap();
        let p = c.physics.as_ref().unwrap();
        assert_eq!(p.beta, Some(1.0));
        assert_eq!(p.alpha, Some(1.0 / 3.0));
        let pl = c.plates.as_ref().unwrap();
        assert_eq!((pl.time, pl.nz_factor, pl.fit_min_separation), (Some(8), Some(2), Some(4)));
        let s = c.sampler_config();
        assert_eq!((s.measurement_count, s.decorrelation_interval, s.thermalization_sweeps), (200, 2, 20));
        assert_eq!(c.workers(), 1);
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = parse_config(PLATES).unwrap();
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = PLATES.replace("lateral = 8", "lateral = 8\nlaterall = 9");
        match parse_config(&text) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "laterall");
                assert_eq!(line, 7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch_is_reported() {
        let text = PLATES.replace("seed = 7", "seed = \"seven\"");
        match parse_config(&text) {
            Err(Error::Config { key, line, .. }) => assert_eq!((key.as_str(), line), ("seed", 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_beta_is_rejected() {
        let text = format!("{PLATES}\n[physics]\nbeta = -1.0\n");
        match parse_config(&text) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "physics.beta");
                assert_eq!(line, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grating_period_must_divide_nx() {
        let text = r#"
experiment = "grating_lateral"
seed = 1
[grating]
nx = 40
tooth_width = 7
gap_width = 7
tooth_height = 7
separation = 8
"#;
        match parse_config(text) {
            Err(Error::Config { key, line, .. }) => assert_eq!((key.as_str(), line), ("grating.nx", 5)),
            other => panic!("{other:?}"),
        }
        let ok = parse_config(&text.replace("nx = 40", "nx = 42")).unwrap();
        let g = ok.grating.unwrap();
        assert_eq!(g.nz, Some(22));
        assert_eq!(g.shifts.unwrap().len(), 14);
    }

    #[test]
    fn scene_bodies_parse() {
        let text = r#"
experiment = "single_scene"
seed = 3
[scene]
extents = [4, 4, 8, 4]
[[scene.bodies]]
kind = "plate"
z = 0
[[scene.bodies]]
kind = "dielectric"
lo = [0.0, 0.0, 3.0]
hi = [4.0, 4.0, 5.0]
epsilon = 10.0
"#;
        let c = parse_config(text).unwrap();
        let sc = c.scene.as_ref().unwrap();
        assert_eq!(sc.renormalize, Some(true));
        let scene = sc.scene(c.params()).unwrap();
        assert_eq!(scene.bodies.len(), 2);
        assert!(parse_config(&text.replace("epsilon = 10.0", "epsilon = 10.0\ncolour = 1")).is_err());
        let bad = text.replace("kind = \"plate\"\nz = 0", "kind = \"grating\"\ntooth_width = 1\ngap_width = 1\ntooth_height = 1\nbase_z = 0\norientation = \"sideways\"");
        match parse_config(&bad) {
            Err(Error::Config { key, line, .. }) => assert_eq!((key.as_str(), line), ("orientation", 12)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_sections_and_missing_sections() {
        let text = format!("{PLATES}\n[oracle]\nextents = [2, 2, 2, 2]\n");
        assert!(matches!(parse_config(&text), Err(Error::Config { .. })));
        let text = "experiment = \"oracle_check\"\nseed = 1\n";
        assert!(matches!(parse_config(text), Err(Error::Config { .. })));
    }

    #[test]
    fn periodic_needs_isotropy() {
        let text = "experiment = \"periodic_sweep\"\nseed = 1\n[periodic]\nlateral = 8\nlengths = [4]\n[physics]\nalpha = 0.5\n";
        assert!(parse_config(text).is_err());
        assert!(parse_config(&text.replace("alpha = 0.5", "alpha = 1.0")).is_ok());
    }
}
