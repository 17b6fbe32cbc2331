use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use cusp_spectra::experiment::{run, ExperimentConfig, ExperimentKind};

/// Eigenvalue and singular-value decay experiments for cusped model wavefunctions.
///
/// Exit status is 0 when every check passes, 1 when a check fails and 2 on errors.
#[derive(Parser)]
#[command(name = "cusp-spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// TOML experiment config; the bundled preset is used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config)
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Replace every pass/fail tolerance of the experiment.
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,
    /// Write the SVG plot.
    #[arg(long, global = true, overrides_with = "no_plot")]
    plot: bool,
    /// Skip the SVG plot
    #[arg(long, global = true, overrides_with = "plot")]
    no_plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Occupation-number decay of the bundled two-particle model.
    GammaDecay,
    /// Kinetic density matrix decay of the same model.
    TauDecay,
    /// Both decays for a pair-antisymmetric model.
    AntisymmetricDecay,
    /// Fourier envelope of a windowed cusp function.
    FourierLemma,
    /// Rank bound from truncated cube Fourier series.
    TruncationBound,
    /// Singular values of synthetic cusp kernels.
    ExponentLaw(ExponentLawArgs),
    /// Bound constants across a family of envelopes.
    LatticeNorms,
    /// Randomized Schatten-class inequalities.
    PropSuite,
    /// Gram eigenvalues against squared singular values on a shared grid.
    Factorization,
    /// Lipschitz coalescence distances and antisymmetric zeros.
    Geometry,
}

#[derive(Args)]
struct ExponentLawArgs {
    /// Dimension, 1 or 3.
    #[arg(long = "d")]
    dim: Option<usize>,
    /// A single cusp order instead of the configured list.
    #[arg(long)]
    alpha: Option<f64>,
    /// Grid points per axis (default 2048 for d = 1, 12 for d = 3).
    #[arg(long)]
    resolution: Option<usize>,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::GammaDecay => ExperimentKind::GammaDecay,
            Command::TauDecay => ExperimentKind::TauDecay,
            Command::AntisymmetricDecay => ExperimentKind::AntisymmetricDecay,
            Command::FourierLemma => ExperimentKind::FourierLemma,
            Command::TruncationBound => ExperimentKind::TruncationBound,
            Command::ExponentLaw(_) => ExperimentKind::ExponentLaw,
            Command::LatticeNorms => ExperimentKind::LatticeNorms,
            Command::PropSuite => ExperimentKind::PropSuite,
            Command::Factorization => ExperimentKind::Factorization,
            Command::Geometry => ExperimentKind::Geometry,
        }
    }
}

fn configure(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let kind = cli.command.kind();
    let g = &cli.global;
    let mut config = match &g.config {
        Some(path) => {
            let c = ExperimentConfig::from_path(path)?;
            if c.kind()? != kind {
                bail!(
                    "{} configures `{}`, not `{kind}`",
                    path.display(),
                    c.experiment
                );
            }
            c
        }
        None => ExperimentConfig::preset(kind),
    };
    if let Some(out) = &g.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    if let Some(tol) = g.tolerance {
        config.override_tolerance(tol)?;
    }
    if g.plot {
        config.plot = true;
    }
    if g.no_plot {
        config.plot = false;
    }
    if let Command::ExponentLaw(a) = &cli.command {
        let e = &mut config.exponent_law;
        if let Some(d) = a.dim {
            if d != e.dim && a.resolution.is_none() {
                e.resolution = if d == 3 { 12 } else { 2048 };
            }
            e.dim = d;
        }
        if let Some(alpha) = a.alpha {
            e.alphas = vec![alpha];
        }
        if let Some(n) = a.resolution {
            e.resolution = n;
        }
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let result =
        configure(&cli).and_then(|config| run(&config).with_context(|| format!("{kind} failed")));
    match result {
        Ok(report) => {
            for c in &report.summary.checks {
                let value = c.exponent.or(c.measured).unwrap_or(f64::NAN);
                let target = match c.predicted {
                    Some(p) => format!("predicted {p:.4}, tolerance {}", c.tolerance),
                    None => format!("limit {:e}", c.tolerance),
                };
                println!(
                    "{} {}: {value:.6e} ({target})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name
                );
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
