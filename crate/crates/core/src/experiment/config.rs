use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectra::{Ensemble, FitWindow, GridConfig, PartialWaveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    GammaDecay,
    TauDecay,
    AntisymmetricDecay,
    FourierLemma,
    TruncationBound,
    ExponentLaw,
    LatticeNorms,
    PropSuite,
    Factorization,
    Geometry,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::ExponentLaw,
        ExperimentKind::GammaDecay,
        ExperimentKind::TauDecay,
        ExperimentKind::AntisymmetricDecay,
        ExperimentKind::LatticeNorms,
        ExperimentKind::FourierLemma,
        ExperimentKind::TruncationBound,
        ExperimentKind::PropSuite,
        ExperimentKind::Factorization,
        ExperimentKind::Geometry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GammaDecay => "gamma-decay",
            ExperimentKind::TauDecay => "tau-decay",
            ExperimentKind::AntisymmetricDecay => "antisymmetric-decay",
            ExperimentKind::FourierLemma => "fourier-lemma",
            ExperimentKind::TruncationBound => "truncation-bound",
            ExperimentKind::ExponentLaw => "exponent-law",
            ExperimentKind::LatticeNorms => "lattice-norms",
            ExperimentKind::PropSuite => "prop-suite",
            ExperimentKind::Factorization => "factorization",
            ExperimentKind::Geometry => "geometry",
        }
    }

    /// Check names whose tolerance a single override replaces.
    pub fn tolerance_keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::GammaDecay => &["gamma"],
            ExperimentKind::TauDecay => &["tau"],
            ExperimentKind::AntisymmetricDecay => &["gamma", "tau"],
            ExperimentKind::FourierLemma | ExperimentKind::ExponentLaw => &["exponent"],
            ExperimentKind::TruncationBound => &["max-ratio"],
            ExperimentKind::LatticeNorms => &["gamma-spread", "tau-spread"],
            ExperimentKind::PropSuite => &[],
            ExperimentKind::Factorization => &["gamma-gap", "tau-gap"],
            ExperimentKind::Geometry => &["lipschitz"],
        }
    }

    /// Bundled preset (TOML).
    pub fn preset(self) -> &'static str {
        match self {
            ExperimentKind::GammaDecay => include_str!("../../presets/gamma-decay.toml"),
            ExperimentKind::TauDecay => include_str!("../../presets/tau-decay.toml"),
            ExperimentKind::AntisymmetricDecay => {
                include_str!("../../presets/antisymmetric-decay.toml")
            }
            ExperimentKind::FourierLemma => include_str!("../../presets/fourier-lemma.toml"),
            ExperimentKind::TruncationBound => include_str!("../../presets/truncation-bound.toml"),
            ExperimentKind::ExponentLaw => include_str!("../../presets/exponent-law.toml"),
            ExperimentKind::LatticeNorms => include_str!("../../presets/lattice-norms.toml"),
            ExperimentKind::PropSuite => include_str!("../../presets/prop-suite.toml"),
            ExperimentKind::Factorization => include_str!("../../presets/factorization.toml"),
            ExperimentKind::Geometry => include_str!("../../presets/geometry.toml"),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Partial-wave resolution and fit window shared by the `γ`/`τ` experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSettings {
    pub radial_nodes: usize,
    pub radial_extent: f64,
    pub max_l: usize,
    pub pair_nodes: usize,
    pub window_start: usize,
    pub window_end: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self {
            radial_nodes: 80,
            radial_extent: 6.0,
            max_l: 40,
            pair_nodes: 64,
            window_start: 10,
            window_end: 500,
        }
    }
}

impl SpectrumSettings {
    pub fn partial_wave(&self) -> PartialWaveConfig {
        PartialWaveConfig {
            radial_nodes: self.radial_nodes,
            radial_extent: self.radial_extent,
            max_l: self.max_l,
            pair_nodes: self.pair_nodes,
        }
    }

    pub fn window(&self) -> FitWindow {
        FitWindow::new(self.window_start, self.window_end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSettings {
    /// Envelope exponents of the model family.
    pub betas: Vec<f64>,
    pub half_extent: f64,
    pub spacing: f64,
    /// Radii tabulated for `ρ(r)`.
    pub radial_points: usize,
}

impl Default for LatticeSettings {
    fn default() -> Self {
        Self {
            betas: vec![0.5, 0.75, 1.0, 1.5, 2.0],
            half_extent: 12.5,
            spacing: 0.125,
            radial_points: 961,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentLawSettings {
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub resolution: usize,
}

impl Default for ExponentLawSettings {
    fn default() -> Self {
        Self {
            dim: 1,
            alphas: vec![0.5, 1.0, 1.5, 2.0],
            resolution: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierSettings {
    pub dim: usize,
    pub shell_min: f64,
    pub shell_max: f64,
    pub shells: usize,
}

impl Default for FourierSettings {
    fn default() -> Self {
        Self {
            dim: 3,
            shell_min: 2.0,
            shell_max: 200.0,
            shells: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSettings {
    pub alpha: f64,
    pub orders: Vec<usize>,
    pub t_samples: usize,
    pub points: usize,
}

impl Default for TruncationSettings {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            orders: vec![4, 8, 16, 32],
            t_samples: 256,
            points: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySettings {
    pub particles: usize,
    pub pairs: usize,
    pub probes: usize,
}

impl Default for GeometrySettings {
    fn default() -> Self {
        Self {
            particles: 3,
            pairs: 10_000,
            probes: 1_000,
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn yes() -> bool {
    true
}

/// One experiment run, read from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "yes")]
    pub plot: bool,
    /// Pass/fail tolerance per check name; checks not listed use their defaults.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Inline model description.
    #[serde(default)]
    pub model: Option<ModelConfig>,
    /// Model description in a separate file, relative to the config file.
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default)]
    pub spectrum: SpectrumSettings,
    #[serde(default)]
    pub lattice: LatticeSettings,
    #[serde(default)]
    pub exponent_law: ExponentLawSettings,
    #[serde(default)]
    pub fourier: FourierSettings,
    #[serde(default)]
    pub truncation: TruncationSettings,
    #[serde(default)]
    pub suite: Ensemble,
    #[serde(default)]
    pub factorization: GridConfig,
    #[serde(default)]
    pub geometry: GeometrySettings,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        let config: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        config.kind().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn preset(kind: ExperimentKind) -> Self {
        Self::from_toml_str(kind.preset()).expect("bundled presets parse")
    }

    /// Read a config; a relative `model_file` is resolved against its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml_str(&text).map_err(|message| Error::Config {
            path: path.to_path_buf(),
            message,
        })?;
        if let (Some(file), Some(dir)) = (&config.model_file, path.parent()) {
            if file.is_relative() {
                config.model_file = Some(dir.join(file));
            }
        }
        Ok(config)
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.experiment.parse()
    }

    /// The model: inline, from `model_file`, or `fallback`.
    pub fn model_config(&self, fallback: impl FnOnce() -> ModelConfig) -> Result<ModelConfig> {
        match (&self.model, &self.model_file) {
            (Some(_), Some(_)) => Err(Error::invalid(
                "model",
                "give either `model` or `model_file`, not both",
            )),
            (Some(m), None) => Ok(m.clone()),
            (None, Some(path)) => ModelConfig::from_path(path),
            (None, None) => Ok(fallback()),
        }
    }

    /// Tolerance for `check`, falling back to `default`.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }

    /// Replace every tolerance the experiment uses with `value`.
    pub fn override_tolerance(&mut self, value: f64) -> Result<()> {
        let keys = self.kind()?.tolerance_keys();
        if keys.is_empty() {
            return Err(Error::invalid(
                "tolerance",
                format!(
                    "`{}` has no tolerance: any violation fails",
                    self.experiment
                ),
            ));
        }
        for c in keys {
            self.tolerances.insert((*c).to_string(), value);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        for (name, tol) in &self.tolerances {
            if !(*tol >= 0.0 && tol.is_finite()) {
                return Err(Error::invalid(
                    "tolerances",
                    format!("`{name}` must be a finite non-negative number"),
                ));
            }
        }
        match kind {
            ExperimentKind::GammaDecay
            | ExperimentKind::TauDecay
            | ExperimentKind::AntisymmetricDecay => {
                self.spectrum.partial_wave().validate()?;
                let w = self.spectrum.window();
                if w.start < 1 || w.len() < 5 {
                    return Err(Error::invalid(
                        "spectrum",
                        "fit window needs start >= 1 and at least 5 points",
                    ));
                }
            }
            ExperimentKind::LatticeNorms => {
                self.spectrum.partial_wave().validate()?;
                let l = &self.lattice;
                if l.betas.is_empty() || l.betas.iter().any(|b| !(*b > 0.0)) {
                    return Err(Error::invalid(
                        "lattice.betas",
                        "need positive envelope exponents",
                    ));
                }
                if !(l.half_extent > 0.0 && l.spacing > 0.0) || l.radial_points < 2 {
                    return Err(Error::invalid(
                        "lattice",
                        "extent, spacing and radial points must be positive",
                    ));
                }
            }
            ExperimentKind::ExponentLaw => {
                let e = &self.exponent_law;
                if e.alphas.is_empty() || e.resolution == 0 {
                    return Err(Error::invalid(
                        "exponent_law",
                        "need at least one alpha and a positive resolution",
                    ));
                }
            }
            ExperimentKind::FourierLemma => {
                let f = &self.fourier;
                if !(f.shell_min > 0.0 && f.shell_max > f.shell_min) || f.shells < 3 {
                    return Err(Error::invalid(
                        "fourier",
                        "need 0 < shell_min < shell_max and at least 3 shells",
                    ));
                }
            }
            ExperimentKind::TruncationBound => {
                let t = &self.truncation;
                if t.orders.is_empty() || t.t_samples == 0 || t.points == 0 {
                    return Err(Error::invalid(
                        "truncation",
                        "need orders, t samples and points",
                    ));
                }
            }
            ExperimentKind::PropSuite => {
                let s = &self.suite;
                if s.draws == 0 || s.min_size == 0 || s.max_size < s.min_size {
                    return Err(Error::invalid(
                        "suite",
                        "need draws > 0 and 0 < min_size <= max_size",
                    ));
                }
            }
            ExperimentKind::Factorization => {
                let g = &self.factorization;
                if g.nodes_per_axis == 0 || g.hat_nodes_per_axis == 0 || !(g.half_width > 0.0) {
                    return Err(Error::invalid(
                        "factorization",
                        "grid sizes and half width must be positive",
                    ));
                }
            }
            ExperimentKind::Geometry => {
                let g = &self.geometry;
                if g.particles < 2 || g.pairs == 0 || g.probes == 0 {
                    return Err(Error::invalid(
                        "geometry",
                        "need at least two particles, pairs and probes",
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::preset(kind);
            assert_eq!(c.kind().unwrap(), kind);
            c.validate().unwrap();
        }
    }

    #[test]
    fn unknown_names_and_fields_are_rejected() {
        let err = ExperimentConfig::from_toml_str("experiment = \"nope\"").unwrap_err();
        assert!(err.contains("nope"));
        assert!(
            ExperimentConfig::from_toml_str("experiment = \"gamma-decay\"\nbogus = 1").is_err()
        );
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = ExperimentConfig::from_path(Path::new("/no/such/config.toml")).unwrap_err();
        assert!(err.to_string().contains("/no/such/config.toml"));
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mut c = ExperimentConfig::preset(ExperimentKind::GammaDecay);
        c.spectrum.window_end = c.spectrum.window_start + 2;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::preset(ExperimentKind::LatticeNorms);
        c.lattice.betas.push(-1.0);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::preset(ExperimentKind::FourierLemma);
        c.tolerances.insert("exponent".into(), f64::NAN);
        assert!(c.validate().is_err());
    }

    #[test]
    fn tolerance_override_covers_every_check() {
        let mut c = ExperimentConfig::preset(ExperimentKind::AntisymmetricDecay);
        c.override_tolerance(1.0).unwrap();
        assert_eq!(c.tolerance("gamma", 0.0), 1.0);
        assert_eq!(c.tolerance("tau", 0.0), 1.0);
        assert!(ExperimentConfig::preset(ExperimentKind::PropSuite)
            .override_tolerance(1.0)
            .is_err());
        // presets list exactly the keys an override replaces
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::preset(kind);
            let keys: Vec<&str> = c.tolerances.keys().map(String::as_str).collect();
            assert_eq!(keys, kind.tolerance_keys(), "{kind}");
        }
    }

    #[test]
    fn model_file_is_resolved_next_to_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let model = ModelConfig::two_particle(2.0, 0.75);
        std::fs::write(
            dir.path().join("model.toml"),
            model.to_toml_string().unwrap(),
        )
        .unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "experiment = \"gamma-decay\"\nmodel_file = \"model.toml\"\n",
        )
        .unwrap();
        let c = ExperimentConfig::from_path(&path).unwrap();
        assert_eq!(c.model_config(|| unreachable!()).unwrap(), model);
    }
}
