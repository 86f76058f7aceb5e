use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use tomostat::estimators::CascadedSetup;
use tomostat::phasespace::GaussianState;
use tomostat::simulate::{ExperimentConfig, Scheme};
use tomostat::Complex64;

use crate::exit::CliError;

/// Printed by `--help`; keep in sync with the structs below.
pub const CONFIG_HELP: &str = "\
CONFIG FILE (TOML; every key optional, unknown keys are rejected):

  [state]             single-mode Gaussian input, vacuum variance 1
  vx = 0.5            x-quadrature variance
  vp = 2.0            p-quadrature variance
  cxp = 0.0           x-p covariance; vx*vp - cxp^2 must be >= 1
  mean_re = 0.0       coherent amplitude, real part
  mean_im = 0.0       coherent amplitude, imaginary part

  [filter]
  width = 1.8         nonclassicality filter width w

  [grid]              displacement grid for `compare`
  start = -3.0
  stop = 3.0
  step = 0.05
  axis = \"real\"       \"real\" or \"imag\": which part of alpha varies
  offset = 0.0        fixed value of the other part

  [experiment]
  n = 100000          number of measurements N (>= 1)
  seed = 1            RNG seed
  eta = 1.0           detection efficiency in (0, 1]
  n_max = 20          photon-number cutoff of the unbalanced scheme
  n_qm = 60           photon-number cutoff of the quantum-mechanical reference
  alpha_re = 0.6      operator displacement used by `estimate` and `theory`
  alpha_im = 0.0
  scheme = \"balanced\" \"balanced\" or \"cascaded\" (beamsplitter displacement)
  transmissivity = 0.9  beamsplitter transmissivity t of the cascaded scheme

Command-line flags override file values.";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub vx: f64,
    pub vp: f64,
    pub cxp: f64,
    pub mean_re: f64,
    pub mean_im: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        Self { vx: 0.5, vp: 2.0, cxp: 0.0, mean_re: 0.0, mean_im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSection {
    pub width: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        Self { width: 1.8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Real,
    Imag,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub axis: Axis,
    pub offset: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { start: -3.0, stop: 3.0, step: 0.05, axis: Axis::Real, offset: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Balanced,
    Cascaded,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub n: usize,
    pub seed: u64,
    pub eta: f64,
    pub n_max: usize,
    pub n_qm: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub scheme: SchemeName,
    pub transmissivity: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            n: 100_000,
            seed: 1,
            eta: 1.0,
            n_max: 20,
            n_qm: 60,
            alpha_re: 0.6,
            alpha_im: 0.0,
            scheme: SchemeName::Balanced,
            transmissivity: 0.9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub state: StateSection,
    pub filter: FilterSection,
    pub grid: GridSection,
    pub experiment: ExperimentSection,
}

/// Flags shared by every command; each one overrides the file value.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file (see the CONFIG FILE section of --help)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, global = true)]
    pub width: Option<f64>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// File (if any) plus flag overrides, validated.
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        let e = &mut cfg.experiment;
        if let Some(v) = flags.n {
            e.n = v;
        }
        if let Some(v) = flags.seed {
            e.seed = v;
        }
        if let Some(v) = flags.eta {
            e.eta = v;
        }
        if let Some(v) = flags.alpha_re {
            e.alpha_re = v;
        }
        if let Some(v) = flags.alpha_im {
            e.alpha_im = v;
        }
        if let Some(v) = flags.n_max {
            e.n_max = v;
        }
        if let Some(v) = flags.width {
            cfg.filter.width = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: String| Err(CliError::Config(format!("{key}: {why}")));
        let e = &self.experiment;
        if e.n == 0 {
            return bad("experiment.n", "must be at least 1".into());
        }
        if !(e.eta > 0.0 && e.eta <= 1.0) {
            return bad("experiment.eta", format!("{} outside (0, 1]", e.eta));
        }
        if e.n_qm < e.n_max {
            return bad("experiment.n_qm", format!("{} is below n_max = {}", e.n_qm, e.n_max));
        }
        if !(e.transmissivity > 0.0 && e.transmissivity <= 1.0) {
            return bad("experiment.transmissivity", format!("{} outside (0, 1]", e.transmissivity));
        }
        if !(e.alpha_re.is_finite() && e.alpha_im.is_finite()) {
            return bad("experiment.alpha_re", "displacement must be finite".into());
        }
        if !(self.filter.width.is_finite() && self.filter.width > 0.0) {
            return bad("filter.width", format!("{} is not positive", self.filter.width));
        }
        let g = &self.grid;
        if !(g.step.is_finite() && g.step > 0.0) {
            return bad("grid.step", format!("{} is not positive", g.step));
        }
        if !(g.start.is_finite() && g.stop.is_finite() && g.start <= g.stop) {
            return bad("grid.start", format!("start {} must not exceed stop {}", g.start, g.stop));
        }
        if let Err(err) = self.state() {
            return bad("state", err.to_string());
        }
        Ok(())
    }

    pub fn state(&self) -> tomostat::Result<GaussianState> {
        let s = &self.state;
        GaussianState::new(Complex64::new(s.mean_re, s.mean_im), s.vx, s.vp, s.cxp)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.experiment.alpha_re, self.experiment.alpha_im)
    }

    /// Grid points in order; the stop value is included when it lies on the grid.
    pub fn grid_points(&self) -> Vec<Complex64> {
        let g = &self.grid;
        let count = ((g.stop - g.start) / g.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let v = g.start + k as f64 * g.step;
                match g.axis {
                    Axis::Real => Complex64::new(v, g.offset),
                    Axis::Imag => Complex64::new(g.offset, v),
                }
            })
            .collect()
    }

    /// The measurement estimating the operator displaced by `alpha`.
    pub fn setup(&self) -> CascadedSetup {
        let e = &self.experiment;
        let base = match e.scheme {
            SchemeName::Balanced => CascadedSetup::method_one(self.alpha()),
            SchemeName::Cascaded => CascadedSetup::method_two(e.transmissivity, self.alpha()),
        };
        base.with_efficiency(e.eta)
    }

    pub fn experiment(&self) -> tomostat::Result<ExperimentConfig> {
        let setup = self.setup();
        let scheme = match self.experiment.scheme {
            SchemeName::Balanced => Scheme::Balanced,
            SchemeName::Cascaded => Scheme::Cascaded { t: setup.t, alpha: setup.alpha },
        };
        Ok(ExperimentConfig {
            state: self.state()?,
            n: self.experiment.n,
            seed: self.experiment.seed,
            eta: self.experiment.eta,
            scheme,
        })
    }
}
