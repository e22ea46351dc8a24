//! Batch front-end: configuration, orchestration of scene chains over a
//! worker pool, and CSV output.

mod config;
mod experiment;
mod output;
mod tasks;

pub use config::{
    grating_pair_specs, load_config, parse_config, BodyEntry, ExperimentKind, GratingSection, OracleSection,
    PeriodicSection, PhysicsSection, PlatesSection, RunConfig, SamplerSection, SceneSection,
};
pub use experiment::{
    execute_experiment, oracle_check, ExecOptions, GRATING_COLUMNS, ORACLE_COLUMNS, PERIODIC_COLUMNS,
    PLATES_COLUMNS, SCENE_COLUMNS,
};
pub use output::{emit_outputs, render_record, Cell, OutputRecord, OutputSet, RecordKind, RunStatus, CODE_VERSION};
pub use tasks::{run_scene_task, run_tasks, SceneTask, TaskSettings};
