//! Configured end-to-end experiments writing CSV, JSON and SVG reports.

mod config;
mod plot;
mod report;
mod run;

pub use config::{
    ExperimentConfig, ExperimentKind, ExponentLawSettings, FourierSettings, GeometrySettings,
    LatticeSettings, SpectrumSettings, TruncationSettings,
};
pub use plot::{emit_plot, PlotSeries, PlotStyle};
pub use report::{Cell, Check, Quantity, Summary, Table};
pub use run::{execute, run, Outcome, RunReport};
