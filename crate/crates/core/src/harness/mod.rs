//! Deterministic loss-behaviour experiments driven by config files, plus the
//! built-in self-test. Everything here runs in `f64`.

mod boundary;
mod config;
mod descent;
mod selftest;
mod sweep;
mod table;

pub use boundary::{
    boundary_fixtures, run_boundary_cases, run_boundary_cases_with, BoundaryCase, BoundaryReport,
    BoundaryRow,
};
pub use config::{
    load_config, parse_config, run_config, Experiment, ExperimentKind, HarnessConfig, Section,
};
pub use descent::{
    run_descent, DescentLoss, DescentSpec, Iterate, StopReason, Trajectory, DEFAULT_GWD_LR,
    DEFAULT_MAX_ITERS, DEFAULT_RECORD_EVERY, DEFAULT_SMOOTH_L1_LR,
};
pub use selftest::{run_selftest, CheckResult, SelfTestReport};
pub use sweep::{default_loss_columns, run_sweep, LossColumn, SweepKind, SweepSpec};
pub use table::{emit_csv, emit_svg, Table};
