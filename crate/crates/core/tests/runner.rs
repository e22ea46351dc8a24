//! End-to-end runs of small experiments through the runner.

use std::fs;

use casimir_lattice::reference::periodic_plate_pair_factor;
use casimir_lattice::runner::{
    emit_outputs, execute_experiment, parse_config, ExecOptions, RecordKind, RunStatus, GRATING_COLUMNS,
    PERIODIC_COLUMNS, PLATES_COLUMNS,
};

const GRATING: &str = r#"
experiment = "grating_lateral"
seed = 8
[sampler]
measurements = 4
interval = 1
thermalization_sweeps = 1
[grating]
nx = 14
ny = 2
nt = 2
tooth_width = 7
gap_width = 7
tooth_height = 1
separation = 1
"#;

const PLATES: &str = r#"
experiment = "plates_sweep"
seed = 3
[sampler]
measurements = 16
interval = 1
[plates]
lateral = 4
separations = [2, 3, 4, 5]
fit_min_separation = 3
"#;

#[test]
fn grating_schema_and_density_maps() {
    let cfg = parse_config(GRATING).unwrap();
    let set = execute_experiment(&cfg, &ExecOptions::default()).unwrap();
    assert_eq!(set.status, RunStatus::Complete);
    let table = set.record("grating_lateral").unwrap();
    assert_eq!(table.columns, GRATING_COLUMNS);
    assert_eq!(table.rows.len(), 14);
    let shifts: Vec<_> = table.column("shift").unwrap().into_iter().map(Option::unwrap).collect();
    assert_eq!(shifts, (0..14).map(f64::from).collect::<Vec<_>>());
    // Every estimate carries a finite error; references carry zero or a convergence bound.
    for name in ["err", "F_err", "E_PFA_err", "E_OPFA_err"] {
        assert!(table.column(name).unwrap().into_iter().all(|v| v.unwrap().is_finite() && v.unwrap() >= 0.0));
    }
    let maps: Vec<_> = set.records.iter().filter(|r| r.kind == RecordKind::DensityMap).collect();
    assert_eq!(maps.len(), 14);
    assert!(maps.iter().all(|m| m.rows.len() == 3 && m.rows.iter().all(|r| r.len() == 14)));
}

#[test]
fn plates_fit_row_is_least_squares_over_window() {
    let cfg = parse_config(PLATES).unwrap();
    let set = execute_experiment(&cfg, &ExecOptions::default()).unwrap();
    let table = &set.records[0];
    assert_eq!(table.columns, PLATES_COLUMNS);
    assert_eq!(table.rows.len(), 5);
    let r = table.column("R").unwrap();
    let e = table.column("E_MC").unwrap();
    assert_eq!(r[4], None, "fit row is labelled");
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..4 {
        let sep = r[i].unwrap() as usize;
        if sep >= 3 {
            let g = periodic_plate_pair_factor(sep, 2 * sep).unwrap();
            num += e[i].unwrap() * g;
            den += g * g;
        }
    }
    assert!((e[4].unwrap() - num / den).abs() < 1e-12 * (num / den).abs());
    // Reference of the fit row is the signed lattice coefficient.
    let reference = table.column("E_ref").unwrap()[4].unwrap();
    assert!((reference + std::f64::consts::PI.powi(2) * 16.0 / 720.0 * 27.0).abs() < 1e-9);
}

#[test]
fn periodic_schema() {
    let text = "experiment = \"periodic_sweep\"\nseed = 1\n[sampler]\nmeasurements = 8\n\
                [periodic]\nlateral = 4\nlengths = [2, 3, 4]\n";
    let set = execute_experiment(&parse_config(text).unwrap(), &ExecOptions::default()).unwrap();
    let t = &set.records[0];
    assert_eq!(t.columns, PERIODIC_COLUMNS);
    assert_eq!(t.rows.len(), 3);
    let modesum = t.column("modesum").unwrap();
    assert!(modesum.iter().all(|m| (m.unwrap() + std::f64::consts::PI.powi(2) / 45.0).abs() < 1e-12));
}

fn files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn runs_are_byte_reproducible_across_workers_and_checkpoints() {
    let cfg = parse_config(GRATING).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, workers, checkpoints: bool| {
        let out = tmp.path().join(name);
        let opts = ExecOptions {
            workers: Some(workers),
            checkpoint_dir: checkpoints.then(|| tmp.path().join("ck")),
            progress: false,
        };
        let set = execute_experiment(&cfg, &opts).unwrap();
        emit_outputs(&set, &out).unwrap();
        files(&out)
    };
    let a = run("a", 1, false);
    assert_eq!(a.len(), 15);
    assert_eq!(a, run("b", 3, false));
    assert_eq!(a, run("c", 2, true));
    // Second pass reads the finished chains back from their checkpoints.
    assert_eq!(a, run("d", 1, true));
}

#[test]
fn failed_tasks_mark_outputs_incomplete() {
    let cfg = parse_config(PLATES).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("not-a-dir");
    fs::write(&blocker, "x").unwrap();
    let opts = ExecOptions {
        checkpoint_dir: Some(blocker),
        ..ExecOptions::default()
    };
    let set = execute_experiment(&cfg, &opts).unwrap();
    assert!(matches!(set.status, RunStatus::Incomplete(_)));
    let paths = emit_outputs(&set, &tmp.path().join("out")).unwrap();
    let text = fs::read_to_string(&paths[0]).unwrap();
    assert!(text.contains("# status: INCOMPLETE"));
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = fs::read_to_string(&path).unwrap();
            if let Err(e) = parse_config(&text) {
                panic!("{}: {e}", path.display());
            }
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
