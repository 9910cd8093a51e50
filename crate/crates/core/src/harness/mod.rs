//! Experiment harness: batches of seeded episodes, statistics, CSV output
//! and SVG trajectory plots.
//!
//! An [`ExperimentSpec`] names a scenario, a controller and a grid of
//! parameter values. Every grid point is a configuration; each is run
//! `runs` times with seeds derived from the master seed, configuration index
//! and run index, so repeated experiments produce byte-identical files.

mod plot;
mod run;
mod spec;
mod stats;
mod sweeps;
mod trace;

pub use plot::{buffer_color, marching_squares, render_svg, render_trajectory_plot};
pub use run::{run_and_write, run_experiment, write_outputs, ExperimentResult, RUNS_HEADER, SUMMARY_HEADER};
pub use spec::{Configuration, Controller, ExperimentSpec, ParamGrid, PnOptions, PtOptions};
pub use stats::{confidence_interval, StatsSummary};
pub use sweeps::{builtin_sweep, PT_RATE_MAX, SWEEP_NAMES};
pub use trace::{format_float, read_trace, trace_rows, write_trace, TraceRow, TRACE_HEADER};
