//! Configuration, parallel grid sweeps and output persistence behind the
//! `felpair` command-line tool.
//!
//! Every verb writes a CSV and/or JSON summary into the output directory.
//! Summaries embed a [`RunManifest`]; CSV files start with a `#` line
//! carrying the same config hash. Wall-clock data go to a separate
//! `<verb>.timing.json` so that result files are byte-identical across runs
//! and worker counts.

pub mod commands;
pub mod config;
pub mod grid;
pub mod manifest;

pub use commands::{execute, Command};
pub use config::{
    ApertureConfig, AngleUnit, Axis, AxisName, Config, DetectorConfig, FixedValues, OutputKind,
    PhaseChoice, ScalingConfig, Spacing, SweepSpec,
};
pub use grid::{evaluate_point, expand, run_grid, run_physical_grid, AmplitudeSource, GridCoords, PointRecord};
pub use manifest::{config_hash, RunManifest};
