//! Scene chains as isolated tasks on a worker pool, with per-task
//! checkpoints so an interrupted run resumes bit-exactly.

use std::fs;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::SceneSpec;
use crate::observables::{EnergyAccumulator, SceneStatistics};
use crate::sampler::{Chain, Checkpoint, SamplerConfig, SceneContext};

/// One Monte-Carlo chain on one scene.
#[derive(Clone, Debug)]
pub struct SceneTask {
    /// Unique within a run; names the checkpoint files.
    pub label: String,
    pub scene: SceneSpec,
    pub stream: u64,
}

#[derive(Clone, Debug)]
pub struct TaskSettings {
    pub sampler: SamplerConfig,
    pub bin_size: Option<usize>,
    pub checkpoint_dir: Option<PathBuf>,
    pub checkpoint_every: usize,
    /// Identifies the run; checkpoints from another run are ignored.
    pub run_key: [u8; 32],
    pub progress: bool,
}

const ACC_MAGIC: &[u8; 8] = b"CASMACCU";
const ACC_VERSION: u32 = 1;

fn tmp_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".tmp");
    PathBuf::from(s)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Accumulator file: magic, version, run key, scene fingerprint, sweep
/// counter of the paired chain checkpoint, then the running sums and the
/// energy series, all little endian.
fn encode_accumulator(key: &[u8; 32], fingerprint: &[u8; 32], sweeps: u64, acc: &EnergyAccumulator) -> Vec<u8> {
    let mut b = Vec::with_capacity(64 + 8 * (acc.site_sums().len() + acc.len()));
    b.extend_from_slice(ACC_MAGIC);
    b.extend_from_slice(&ACC_VERSION.to_le_bytes());
    b.extend_from_slice(key);
    b.extend_from_slice(fingerprint);
    b.extend_from_slice(&sweeps.to_le_bytes());
    b.extend_from_slice(&(acc.site_sums().len() as u64).to_le_bytes());
    b.extend_from_slice(&(acc.len() as u64).to_le_bytes());
    for v in acc.site_sums().iter().chain(acc.series()) {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

struct SavedAccumulator {
    key: [u8; 32],
    fingerprint: [u8; 32],
    sweeps: u64,
    site_sums: Vec<f64>,
    series: Vec<f64>,
}

fn decode_accumulator(mut r: impl Read) -> Result<SavedAccumulator> {
    let bad = |m: &str| Error::Checkpoint(format!("accumulator file: {m}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("truncated"))?;
    if &magic != ACC_MAGIC {
        return Err(bad("bad magic"));
    }
    let mut u32b = [0u8; 4];
    r.read_exact(&mut u32b).map_err(|_| bad("truncated"))?;
    if u32::from_le_bytes(u32b) != ACC_VERSION {
        return Err(bad("unsupported version"));
    }
    let mut key = [0u8; 32];
    let mut fingerprint = [0u8; 32];
    r.read_exact(&mut key).map_err(|_| bad("truncated"))?;
    r.read_exact(&mut fingerprint).map_err(|_| bad("truncated"))?;
    let mut u64s = [0u64; 3];
    for v in &mut u64s {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| bad("truncated"))?;
        *v = u64::from_le_bytes(b);
    }
    let [sweeps, nsites, nseries] = u64s;
    let mut read_f64s = |n: u64| -> Result<Vec<f64>> {
        let mut bytes = vec![0u8; 8 * n as usize];
        r.read_exact(&mut bytes).map_err(|_| bad("truncated"))?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    };
    let site_sums = read_f64s(nsites)?;
    let series = read_f64s(nseries)?;
    Ok(SavedAccumulator { key, fingerprint, sweeps, site_sums, series })
}

fn task_paths(dir: &Path, label: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{label}.ckpt")), dir.join(format!("{label}.acc")))
}

/// Chain and accumulator from a previous attempt, if they belong to this
/// run and scene and agree with each other.
fn try_resume<'a>(
    ctx: &'a SceneContext,
    settings: &TaskSettings,
    dir: &Path,
    label: &str,
) -> Option<(Chain<'a>, EnergyAccumulator)> {
    let (ckpt_path, acc_path) = task_paths(dir, label);
    let saved = decode_accumulator(fs::File::open(&acc_path).ok()?).ok()?;
    if saved.key != settings.run_key || saved.fingerprint != ctx.fingerprint() {
        return None;
    }
    let ck = Checkpoint::load(&ckpt_path).ok()?;
    if ck.sweeps != saved.sweeps {
        return None;
    }
    let chain = Chain::restore(ctx, settings.sampler, &ck).ok()?;
    if chain.measurements_done() != saved.series.len() {
        return None;
    }
    let acc = EnergyAccumulator::from_parts(*ctx.shape(), saved.site_sums, saved.series).ok()?;
    Some((chain, acc))
}

fn save_progress(
    settings: &TaskSettings,
    dir: &Path,
    label: &str,
    chain: &Chain<'_>,
    acc: &EnergyAccumulator,
) -> Result<()> {
    let (ckpt_path, acc_path) = task_paths(dir, label);
    let ck = chain.checkpoint();
    let mut bytes = Vec::new();
    ck.write_to(&mut bytes).map_err(|e| Error::io(&ckpt_path, e))?;
    write_atomic(&acc_path, &encode_accumulator(&settings.run_key, &ck.fingerprint, ck.sweeps, acc))?;
    write_atomic(&ckpt_path, &bytes)
}

/// Runs one chain to completion and returns its statistics.
pub fn run_scene_task(task: &SceneTask, settings: &TaskSettings, abort: &AtomicBool) -> Result<SceneStatistics> {
    let ctx = SceneContext::new(&task.scene)?;
    let dir = settings.checkpoint_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let (mut chain, mut acc) = match dir.and_then(|d| try_resume(&ctx, settings, d, &task.label)) {
        Some(resumed) => resumed,
        None => (
            Chain::new(&ctx, settings.sampler, task.stream)?,
            EnergyAccumulator::new(*ctx.shape()),
        ),
    };
    let every = settings.checkpoint_every.max(1);
    let mut dirty = false;
    while !chain.is_finished() {
        if abort.load(Ordering::Relaxed) {
            return Err(Error::Internal(format!("task {} aborted", task.label)));
        }
        let field = chain.next_measurement()?.expect("chain not finished");
        acc.push_field(field, &ctx)?;
        dirty = true;
        if let Some(d) = dir {
            if acc.len() % every == 0 {
                save_progress(settings, d, &task.label, &chain, &acc)?;
                dirty = false;
            }
        }
    }
    if let (Some(d), true) = (dir, dirty) {
        save_progress(settings, d, &task.label, &chain, &acc)?;
    }
    if settings.progress {
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "done: {} ({} measurements)", task.label, acc.len());
    }
    acc.finish(settings.bin_size)
}

/// Runs `tasks` on a pool of `workers` threads. Results come back over a
/// channel and are returned in task order. The first failure stops tasks
/// that have not finished yet.
pub fn run_tasks(tasks: &[SceneTask], settings: &TaskSettings, workers: usize) -> Vec<Result<SceneStatistics>> {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            return tasks
                .iter()
                .map(|_| Err(Error::Internal(format!("worker pool: {e}"))))
                .collect()
        }
    };
    let abort = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel();
    pool.scope(|s| {
        for (i, task) in tasks.iter().enumerate() {
            let tx = tx.clone();
            let abort = &abort;
            s.spawn(move |_| {
                let result = catch_unwind(AssertUnwindSafe(|| run_scene_task(task, settings, abort)))
                    .unwrap_or_else(|_| Err(Error::Internal(format!("task {} panicked", task.label))));
                if result.is_err() {
                    abort.store(true, Ordering::Relaxed);
                }
                let _ = tx.send((i, result));
            });
        }
    });
    drop(tx);
    let mut out: Vec<Option<Result<SceneStatistics>>> = tasks.iter().map(|_| None).collect();
    for (i, r) in rx {
        out[i] = Some(r);
    }
    out.into_iter()
        .map(|r| r.unwrap_or_else(|| Err(Error::Internal("task result lost".into()))))
        .collect()
}

/// Hash of the parts of a config that determine the measurement streams.
pub fn run_key(parts: &str) -> [u8; 32] {
    Sha256::digest(parts.as_bytes()).into()
}
