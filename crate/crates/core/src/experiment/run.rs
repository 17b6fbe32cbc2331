use std::f64::consts::PI;
use std::path::PathBuf;

use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind};
use super::plot::{emit_plot, PlotSeries, PlotStyle};
use super::report::{write_file, Cell, Check, Summary, Table};
use crate::density::{lattice_norm, LatticeNormConfig, RadialDensity, SampledField};
use crate::error::{Error, Result};
use crate::fourier::{
    exponent_law_experiment, fourier_decay_fit, log_shells, synth_kernel, truncation_sweep,
    Amplitude, ExponentLawConfig, RadialCuspFunction, SampleGrid, Trajectory,
};
use crate::model::{coalescence_probes, lipschitz_check, ModelConfig, ModelWavefunction, Symmetry};
use crate::spectra::{
    discretize_gamma, discretize_psi_map, discretize_tau, discretize_v_map, partial_wave_spectra,
    run_property_suite, singular_values, symmetric_eigenvalues, Ensemble, SpectrumResult,
};

/// Gauss nodes per radial integral when tabulating `ρ(r)`.
const DENSITY_NODES: usize = 48;
/// Eigenvalues below this fraction of the largest are left out of the factorization gap.
const GAP_FLOOR: f64 = 1e-6;

/// Everything a run produces, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    /// `(suffix, table)`; the empty suffix is the main CSV.
    pub tables: Vec<(String, Table)>,
    pub plot: Option<(PlotSeries, PlotStyle)>,
}

/// Paths written by [`run`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    /// Process exit status: zero iff every check passed.
    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            0
        } else {
            1
        }
    }
}

/// Validate, compute and write `<out>/<experiment>.{csv,json,svg}`.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let outcome = execute(config)?;
    let name = config.experiment.as_str();
    let dir = &config.output_dir;
    let mut files = Vec::new();
    for (suffix, table) in &outcome.tables {
        let file = if suffix.is_empty() {
            format!("{name}.csv")
        } else {
            format!("{name}_{suffix}.csv")
        };
        files.push(write_file(&dir.join(file), &table.to_csv())?);
    }
    files.push(write_file(
        &dir.join(format!("{name}.json")),
        &outcome.summary.to_json()?,
    )?);
    if config.plot {
        if let Some((series, style)) = &outcome.plot {
            files.push(write_file(
                &dir.join(format!("{name}.svg")),
                &emit_plot(series, style)?,
            )?);
        }
    }
    Ok(RunReport {
        summary: outcome.summary,
        files,
    })
}

/// Compute an experiment without writing anything.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    match config.kind()? {
        ExperimentKind::GammaDecay => decay(config, Which::Gamma),
        ExperimentKind::TauDecay => decay(config, Which::Tau),
        ExperimentKind::AntisymmetricDecay => decay(config, Which::Both),
        ExperimentKind::LatticeNorms => lattice_norms(config),
        ExperimentKind::ExponentLaw => exponent_law(config),
        ExperimentKind::FourierLemma => fourier_lemma(config),
        ExperimentKind::TruncationBound => truncation(config),
        ExperimentKind::PropSuite => prop_suite(config),
        ExperimentKind::Factorization => factorization(config),
        ExperimentKind::Geometry => geometry(config),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Which {
    Gamma,
    Tau,
    Both,
}

fn default_model(config: &ExperimentConfig) -> Result<ModelConfig> {
    config.model_config(|| {
        if config.kind().ok() == Some(ExperimentKind::AntisymmetricDecay) {
            ModelConfig::two_particle_antisymmetric(2.0)
        } else {
            ModelConfig::two_particle(2.0, 1.0)
        }
    })
}

fn spectrum_details(r: &SpectrumResult) -> serde_json::Value {
    json!({
        "count": r.values.len(),
        "largest": r.values.first(),
        "trace": r.values.iter().sum::<f64>(),
        "amplitude": r.fit.amplitude,
        "exponent": r.fit.exponent,
        "log_residual": r.fit.residual,
        "window": [r.fit.window.start, r.fit.window.end],
        "weak_quasinorms": r.quasinorms.iter().map(|(p, v)| json!({"p": p, "value": v})).collect::<Vec<_>>(),
    })
}

fn spectrum_plot(label: &str, r: &SpectrumResult, predicted: f64) -> (PlotSeries, PlotStyle) {
    (
        PlotSeries::spectrum(label, &r.values),
        PlotStyle {
            title: format!("{label} eigenvalues"),
            x_label: "k".into(),
            y_label: "lambda_k".into(),
            fit_range: Some((r.fit.window.start as f64, r.fit.window.end as f64)),
            predicted: Some(predicted),
        },
    )
}

fn decay(config: &ExperimentConfig, which: Which) -> Result<Outcome> {
    let model = default_model(config)?;
    let wf = ModelWavefunction::new(model.clone())?;
    let antisym = wf.symmetry() == Symmetry::PairAntisymmetric;
    let (gamma_pred, tau_pred) = if antisym {
        (10.0 / 3.0, 8.0 / 3.0)
    } else {
        (8.0 / 3.0, 2.0)
    };
    let spectra = partial_wave_spectra(&wf, &config.spectrum.partial_wave())?;
    let window = Some(config.spectrum.window());

    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut details = serde_json::Map::new();
    details.insert(
        "model".into(),
        serde_json::to_value(&model).map_err(|e| Error::Serialization(e.to_string()))?,
    );
    details.insert("partial_wave".into(), json!(config.spectrum));
    let mut plot = None;

    if which != Which::Tau {
        let r = SpectrumResult::new(spectra.gamma.clone(), window, &[1.0 / gamma_pred])?;
        checks.push(Check::exponent(
            "gamma",
            r.fit.exponent,
            gamma_pred,
            config.tolerance("gamma", 0.30),
        ));
        details.insert("gamma".into(), spectrum_details(&r));
        tables.push((String::new(), Table::spectrum(&r.values)));
        plot = Some(spectrum_plot("gamma", &r, gamma_pred));
    }
    if which != Which::Gamma {
        let r = SpectrumResult::new(spectra.tau.clone(), window, &[1.0 / tau_pred])?;
        checks.push(Check::exponent(
            "tau",
            r.fit.exponent,
            tau_pred,
            config.tolerance("tau", 0.25),
        ));
        details.insert("tau".into(), spectrum_details(&r));
        let suffix = if which == Which::Tau {
            String::new()
        } else {
            "tau".to_string()
        };
        tables.push((suffix, Table::spectrum(&r.values)));
        if plot.is_none() {
            plot = Some(spectrum_plot("tau", &r, tau_pred));
        }
    }
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details.into()),
        tables,
        plot,
    })
}

/// `max_{k ∈ [start, end]} λ_k k^{s} / norm`.
fn bound_ratio(values: &[f64], exponent: f64, norm: f64, (start, end): (usize, usize)) -> f64 {
    values
        .iter()
        .enumerate()
        .take(end)
        .skip(start - 1)
        .map(|(k, v)| v * ((k + 1) as f64).powf(exponent) / norm)
        .fold(0.0, f64::max)
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn lattice_norms(config: &ExperimentConfig) -> Result<Outcome> {
    let base = config.model_config(|| ModelConfig::two_particle(2.0, 1.0))?;
    let l = &config.lattice;
    let pw = config.spectrum.partial_wave();
    // the decay window; the head k < start reflects the envelope, not the cusps
    let window = (config.spectrum.window_start, config.spectrum.window_end);
    let head = (1, window.1);
    let mut table = Table::new(&[
        "beta",
        "rho_norm_3_8",
        "rho_norm_1_2",
        "gamma_ratio",
        "tau_ratio",
        "gamma_ratio_from_1",
        "tau_ratio_from_1",
        "rho_mass",
    ]);
    let (mut g_ratios, mut t_ratios, mut rows) = (Vec::new(), Vec::new(), Vec::new());
    let (mut g_head, mut t_head) = (Vec::new(), Vec::new());
    for &beta in &l.betas {
        let model = ModelConfig {
            exponents: vec![beta; base.particles],
            label: format!("{} beta={beta}", base.label),
            ..base.clone()
        };
        let wf = ModelWavefunction::new(model)?;
        let spectra = partial_wave_spectra(&wf, &pw)?;
        let density =
            RadialDensity::tabulate(&wf, pw.radial_extent, l.radial_points, DENSITY_NODES)?;
        let field = SampledField::from_fn(l.half_extent, l.spacing, |x| {
            density.at((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
        })?;
        let n38 = lattice_norm(&field, &LatticeNormConfig::unit(3.0 / 8.0))?;
        let n12 = lattice_norm(&field, &LatticeNormConfig::unit(0.5))?;
        let g = bound_ratio(&spectra.gamma, 8.0 / 3.0, n38.value, window);
        let t = bound_ratio(&spectra.tau, 2.0, n12.value, window);
        let gh = bound_ratio(&spectra.gamma, 8.0 / 3.0, n38.value, head);
        let th = bound_ratio(&spectra.tau, 2.0, n12.value, head);
        table.push(vec![
            beta.into(),
            n38.value.into(),
            n12.value.into(),
            g.into(),
            t.into(),
            gh.into(),
            th.into(),
            field.total().into(),
        ]);
        rows.push(json!({
            "beta": beta,
            "rho_norm_3_8": n38.value,
            "rho_norm_1_2": n12.value,
            "gamma_ratio": g,
            "tau_ratio": t,
            "gamma_ratio_from_1": gh,
            "tau_ratio_from_1": th,
            "grid_covers_cubes": n38.grid_covers_cubes,
            "tail_mass": n38.tail_mass,
        }));
        g_ratios.push(g);
        t_ratios.push(t);
        g_head.push(gh);
        t_head.push(th);
    }
    let checks = vec![
        Check::upper_limit(
            "gamma-spread",
            spread(&g_ratios),
            config.tolerance("gamma-spread", 10.0),
        ),
        Check::upper_limit(
            "tau-spread",
            spread(&t_ratios),
            config.tolerance("tau-spread", 10.0),
        ),
    ];
    let details = json!({
        "window": [window.0, window.1],
        "gamma_spread_from_1": spread(&g_head),
        "tau_spread_from_1": spread(&t_head),
        "max_gamma_ratio": g_ratios.iter().copied().fold(0.0, f64::max),
        "max_tau_ratio": t_ratios.iter().copied().fold(0.0, f64::max),
        "family": rows,
    });
    let plot = PlotSeries {
        label: "max_k lambda_k k^(8/3) / |||rho|||_(3/8)".into(),
        points: l
            .betas
            .iter()
            .copied()
            .zip(g_ratios.iter().copied())
            .collect(),
    };
    let style = PlotStyle {
        title: "bound constant across envelope exponents".into(),
        x_label: "beta".into(),
        y_label: "ratio".into(),
        ..PlotStyle::default()
    };
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: Some((plot, style)),
    })
}

fn exponent_law(config: &ExperimentConfig) -> Result<Outcome> {
    let e = &config.exponent_law;
    let tol = config.tolerance("exponent", 0.10);
    let mut checks = Vec::new();
    let mut laws = Vec::new();
    for &alpha in &e.alphas {
        let law = exponent_law_experiment(&ExponentLawConfig::new(e.dim, alpha, e.resolution))?;
        let name = if e.alphas.len() == 1 {
            "exponent".to_string()
        } else {
            format!("exponent alpha={alpha}")
        };
        checks.push(Check::relative_exponent(
            &name,
            law.fit.exponent,
            law.predicted,
            tol,
        ));
        laws.push(law);
    }
    let mut header = vec!["k".to_string()];
    header.extend(e.alphas.iter().map(|a| format!("alpha={a}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header);
    let rank = laws.iter().map(|l| l.values.len()).min().unwrap_or(0);
    for k in 0..rank {
        let mut row: Vec<Cell> = vec![(k + 1).into()];
        row.extend(laws.iter().map(|l| Cell::from(l.values[k])));
        table.push(row);
    }
    let details = json!({
        "dim": e.dim,
        "resolution": e.resolution,
        "fits": laws.iter().map(|l| json!({
            "alpha": l.config.alpha,
            "predicted": l.predicted,
            "exponent": l.fit.exponent,
            "relative_error": l.relative_error(),
            "window": [l.fit.window.start, l.fit.window.end],
            "log_residual": l.fit.residual,
        })).collect::<Vec<_>>(),
    });
    let first = &laws[0];
    let plot = (
        PlotSeries::spectrum(&format!("alpha = {}", first.config.alpha), &first.values),
        PlotStyle {
            title: format!("singular values, d = {}", e.dim),
            x_label: "k".into(),
            y_label: "s_k".into(),
            fit_range: Some((first.fit.window.start as f64, first.fit.window.end as f64)),
            predicted: Some(first.predicted),
        },
    );
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: Some(plot),
    })
}

/// Closed-form transform of `e^{-|x|}` on the whole space, `d = 1` or `3`.
fn exponential_oracle(dim: usize, xi: f64) -> f64 {
    let s = 1.0 + xi * xi;
    match dim {
        1 => (2.0 / PI).sqrt() / s,
        _ => (2.0 * PI).powf(-1.5) * 8.0 * PI / (s * s),
    }
}

fn fourier_lemma(config: &ExperimentConfig) -> Result<Outcome> {
    let f = &config.fourier;
    let u = RadialCuspFunction::exponential(f.dim)?;
    let fit = fourier_decay_fit(&u, &log_shells(f.shell_min, f.shell_max, f.shells))?;
    let mut table = Table::new(&["xi", "envelope", "value", "oracle"]);
    let mut oracle_ratio = Vec::new();
    for ((xi, env), v) in fit.shells.iter().zip(&fit.envelope).zip(&fit.values) {
        let o = exponential_oracle(f.dim, *xi);
        oracle_ratio.push(v / o);
        table.push(vec![(*xi).into(), (*env).into(), (*v).into(), o.into()]);
    }
    // the oracle has exponent d + 1 too, fitted the same way
    let xs: Vec<f64> = fit
        .shells
        .iter()
        .map(|s| (1.0 + s * s).sqrt().ln())
        .collect();
    let ys: Vec<f64> = fit
        .shells
        .iter()
        .map(|s| exponential_oracle(f.dim, *s).ln())
        .collect();
    let oracle_exponent = -crate::fourier::least_squares(&xs, &ys).0;
    let checks = vec![Check::exponent(
        "exponent",
        fit.exponent,
        fit.predicted,
        config.tolerance("exponent", 0.2),
    )];
    let details = json!({
        "dim": f.dim,
        "shells": [f.shell_min, f.shell_max, f.shells],
        "log_residual": fit.residual,
        "oracle_exponent": oracle_exponent,
        "value_over_oracle_at_max_shell": oracle_ratio.last(),
    });
    let plot = (
        PlotSeries {
            label: "running max of |u^(xi)|".into(),
            points: fit
                .shells
                .iter()
                .copied()
                .zip(fit.envelope.iter().copied())
                .collect(),
        },
        PlotStyle {
            title: format!("Fourier envelope, d = {}", f.dim),
            x_label: "|xi|".into(),
            y_label: "envelope".into(),
            fit_range: None,
            predicted: Some(fit.predicted),
        },
    );
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: Some(plot),
    })
}

fn truncation(config: &ExperimentConfig) -> Result<Outcome> {
    let t = &config.truncation;
    let kernel = synth_kernel(
        1,
        t.alpha,
        vec![Trajectory::scaled(vec![0.05], 0.97)],
        Amplitude::default(),
    )?;
    let grid = SampleGrid::midpoint(1, t.t_samples, -PI, PI)?;
    let sweep = truncation_sweep(&kernel, &grid, &t.orders, t.points)?;
    let mut table = Table::new(&["M", "m", "bound", "actual", "ratio"]);
    for b in &sweep {
        table.push(vec![
            b.order.into(),
            b.m.into(),
            b.bound.into(),
            b.actual.into(),
            b.ratio().into(),
        ]);
    }
    let violations = sweep.iter().filter(|b| !b.holds()).count();
    let max_ratio = sweep.iter().map(|b| b.ratio()).fold(0.0, f64::max);
    let checks = vec![
        Check::violations("bound", violations, 0.0),
        Check::upper_limit("max-ratio", max_ratio, config.tolerance("max-ratio", 1e3)),
    ];
    let details = json!({
        "alpha": t.alpha,
        "t_samples": t.t_samples,
        "points": t.points,
        "sweep": sweep,
    });
    let plot = (
        PlotSeries {
            label: "m^(-1/2) ||T - T_M||_2".into(),
            points: sweep.iter().map(|b| (b.m as f64, b.bound)).collect(),
        },
        PlotStyle {
            title: "truncation bound".into(),
            x_label: "m".into(),
            y_label: "bound".into(),
            fit_range: None,
            predicted: Some(1.0 + t.alpha),
        },
    );
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: Some(plot),
    })
}

fn prop_suite(config: &ExperimentConfig) -> Result<Outcome> {
    let ensemble = Ensemble {
        seed: config.seed,
        ..config.suite
    };
    let reports = run_property_suite(&ensemble)?;
    let mut table = Table::new(&["property", "draws", "violations", "worst_ratio"]);
    let mut checks = Vec::new();
    for r in &reports {
        table.push(vec![
            r.name.as_str().into(),
            r.draws.into(),
            r.violations.into(),
            r.worst_ratio.into(),
        ]);
        checks.push(Check::violations(&r.name, r.violations, 0.0));
    }
    let details = json!({ "ensemble": ensemble, "properties": reports });
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: None,
    })
}

/// Largest `|λ_k - s_k²| / λ_k` over `λ_k ≥ GAP_FLOOR · λ_1`.
fn factor_gap(eigen: &[f64], singular: &[f64]) -> f64 {
    let top = eigen.first().copied().unwrap_or(0.0);
    eigen
        .iter()
        .zip(singular)
        .filter(|(e, _)| **e >= GAP_FLOOR * top)
        .map(|(e, s)| (e - s * s).abs() / e)
        .fold(0.0, f64::max)
}

fn factor_table(eigen: &[f64], singular: &[f64]) -> Table {
    let mut t = Table::new(&["k", "eigenvalue", "squared_singular_value"]);
    for (k, (e, s)) in eigen.iter().zip(singular).enumerate() {
        t.push(vec![(k + 1).into(), (*e).into(), (s * s).into()]);
    }
    t
}

fn factorization(config: &ExperimentConfig) -> Result<Outcome> {
    let model = config.model_config(|| ModelConfig::two_particle(2.0, 1.0))?;
    let wf = ModelWavefunction::new(model)?;
    let g = &config.factorization;
    let hat = g.hat_scheme(&wf)?;
    let grid = g.grid()?;
    let psi = singular_values(discretize_psi_map(&wf, &hat, &grid)?.matrix.view())?;
    let gamma = symmetric_eigenvalues(discretize_gamma(&wf, &hat, &grid)?.matrix.view())?;
    let v = singular_values(discretize_v_map(&wf, &hat, &grid)?.matrix.view())?;
    let tau = symmetric_eigenvalues(discretize_tau(&wf, &hat, &grid)?.matrix.view())?;
    let (gg, tg) = (factor_gap(&gamma, &psi), factor_gap(&tau, &v));
    let checks = vec![
        Check::upper_limit("gamma-gap", gg, config.tolerance("gamma-gap", 1e-8)),
        Check::upper_limit("tau-gap", tg, config.tolerance("tau-gap", 1e-8)),
    ];
    let details = json!({
        "grid": g,
        "grid_nodes": grid.len(),
        "hat_nodes": hat.len(),
        "eigenvalue_floor": GAP_FLOOR,
        "gamma_trace": gamma.iter().sum::<f64>(),
        "tau_trace": tau.iter().sum::<f64>(),
    });
    let plot = (
        PlotSeries::spectrum("gamma (Cartesian grid)", &gamma),
        PlotStyle {
            title: "discretized gamma".into(),
            y_label: "lambda_k".into(),
            ..PlotStyle::default()
        },
    );
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![
            (String::new(), factor_table(&gamma, &psi)),
            ("tau".into(), factor_table(&tau, &v)),
        ],
        plot: Some(plot),
    })
}

fn geometry(config: &ExperimentConfig) -> Result<Outcome> {
    let g = &config.geometry;
    let lip = lipschitz_check(
        g.particles,
        g.pairs,
        config.tolerance("lipschitz", 1e-12),
        config.seed,
    )?;
    let mut models = vec![config.model_config(|| ModelConfig::two_particle_antisymmetric(2.0))?];
    if g.particles != models[0].particles {
        models.push(ModelConfig {
            particles: g.particles,
            exponents: Vec::new(),
            label: format!("{}-particle antisymmetric", g.particles),
            ..ModelConfig::two_particle_antisymmetric(2.0)
        });
    }
    let mut table = Table::new(&["check", "samples", "violations", "worst"]);
    table.push(vec![
        "lipschitz".into(),
        lip.pairs.into(),
        lip.violations.into(),
        lip.worst_excess.into(),
    ]);
    let mut checks = vec![Check::upper_limit(
        "lipschitz",
        lip.worst_excess,
        lip.tolerance,
    )];
    let mut probes = Vec::new();
    for model in models {
        let wf = ModelWavefunction::new(model.clone())?;
        if wf.symmetry() != Symmetry::PairAntisymmetric {
            return Err(Error::invalid(
                "model",
                "coalescence probes need a pair-antisymmetric model",
            ));
        }
        let v = coalescence_probes(&wf, g.probes, config.seed);
        let name = format!("vanishing N={}", model.particles);
        table.push(vec![
            name.as_str().into(),
            v.probes.into(),
            usize::from(!v.pass()).into(),
            v.max_abs.into(),
        ]);
        checks.push(Check::upper_limit(&name, v.max_abs, 0.0));
        probes
            .push(json!({"particles": model.particles, "probes": v.probes, "max_abs": v.max_abs}));
    }
    let details = json!({ "lipschitz": lip, "coalescence": probes });
    Ok(Outcome {
        summary: Summary::new(&config.experiment, checks, details),
        tables: vec![(String::new(), table)],
        plot: None,
    })
}
