//! Batch front end for the `nightdehaze` pipeline: dehaze image sets, run the
//! ablation variants, synthesize hazy fixtures and score results.

pub mod ablate;
pub mod dehaze;
pub mod files;
pub mod metrics;
pub mod report;
pub mod synth;

use std::path::Path;

use nightdehaze::pipeline::PipelineConfig;

pub use ablate::{cmd_ablate, AblationRow};
pub use dehaze::{cmd_dehaze, DehazeOptions};
pub use metrics::{cmd_metrics, MetricsRow, PairEntry};
pub use report::{ImageRecord, RunReport};
pub use synth::{cmd_gen_scenes, cmd_synth, AirlightSpec, HazeSpec, SynthEntry, TransmittanceSpec};

/// Process exit status shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// At least one input failed; the rest were processed.
    Partial = 1,
    ConfigError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_failures(failed: usize) -> Self {
        if failed == 0 {
            ExitStatus::Success
        } else {
            ExitStatus::Partial
        }
    }
}

/// Defaults when no file is given.
pub fn load_config(path: Option<&Path>) -> nightdehaze::Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

/// Worker pool with `threads` workers, or one per core for 0.
pub fn thread_pool(threads: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
