//! Config-file driven batch runs.

mod config;
mod run;

pub use config::{
    parse_config, CmdBlock, Command, CompareBlock, ConvergenceBlock, Method, ModelBlock,
    ObservableSpec, ObservablesBlock, OracleBlock, Resolved, RunConfig, SamplerBlock,
    SpectrumBlock, ThermoBlock,
};
pub use run::{
    exit_code, run, run_file, thread_count, RunOptions, RunReport, EXIT_OK, EXIT_RUNTIME,
    EXIT_VALIDATION, THREADS_ENV,
};
