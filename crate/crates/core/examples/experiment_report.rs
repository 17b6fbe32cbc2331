//! Run a bundled experiment in-process and write its CSV, JSON and SVG.
//!
//! `cargo run --example experiment_report -- fourier-lemma /tmp/out`

use cusp_spectra::experiment::{run, ExperimentConfig, ExperimentKind};

fn main() -> cusp_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ExperimentKind = args.next().as_deref().unwrap_or("fourier-lemma").parse()?;
    let mut config = ExperimentConfig::preset(kind);
    config.output_dir = args.next().unwrap_or_else(|| "results".into()).into();
    let report = run(&config)?;
    println!("{}", report.summary.to_json()?);
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
