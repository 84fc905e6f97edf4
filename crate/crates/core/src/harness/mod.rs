//! Truth specification, trajectory runs, replications and persistence.

pub mod config;
pub mod dataset;
pub mod parallel;
pub mod persist;
pub mod replicate;
pub mod trajectory;

pub use config::{evaluation_grid, ModelKind, RunConfig, TruthSpec};
pub use dataset::ingest_dataset;
pub use parallel::{par_map, parallel_enabled};
pub use persist::{
    read_run_config, read_sidecar, read_trajectory_csv, trajectory_paths, write_record, write_summary,
    write_trajectory_csv,
};
pub use replicate::{run_replications, summarize, Replication, Summary};
pub use trajectory::{generate_data, run_trajectory, GridError, Sidecar, TrajectoryRecord};
