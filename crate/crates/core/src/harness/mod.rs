//! Experiment configs, figure presets and result files.

pub mod config;
pub mod presets;
pub mod record;
pub mod run;

pub use config::{
    DisorderConfig, ExcitationConfig, ExperimentConfig, ExperimentKind, SweepConfig, SCHEMA_VERSION,
};
pub use presets::{
    preset_fig1, preset_fig2, preset_fig3b, preset_fig4, Fig2Variant, Preset, ZGrid, DEFAULT_G,
};
pub use record::{emit_csv, emit_gnuplot, PpdcRow, Rows, RunRecord, Summary, TptsRow};
pub use run::{run_config, run_experiment};
