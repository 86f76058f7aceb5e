//! Synthetic measurement data: phase-uniform balanced-homodyne quadrature
//! samples and photon-number distributions of displaced Gaussian states.
//!
//! Random stream contract (stable across releases): sample `j` of a run
//! with seed `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to stream `j`.
//! From that stream it draws three uniforms `u₀, u₁, u₂ ∈ [0,1)` (53-bit,
//! `(next_u64 >> 11) · 2⁻⁵³`): `φ = π u₀` and, by Box–Muller,
//! `z = √(−2 ln(1 − u₁)) cos(2π u₂)`, `x = ⟨x_φ⟩ + √V(φ) z`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::adaptive_gk15;
use crate::observables::laguerre_projection;
use crate::phasespace::{CharFn, ComplexAmplitude, GaussianState};

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw by the cosine branch of Box–Muller.
pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// The generator for record `j` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    rng
}

/// `p(x; φ)`: normal density with mean `⟨x_φ⟩` and variance `V(φ)`.
pub fn quadrature_pdf(state: &GaussianState, x: f64, phi: f64) -> f64 {
    let v = state.quadrature_variance(phi);
    let d = x - state.quadrature_mean(phi);
    (-d * d / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

/// `(1/π) ∫₀^π p(x; φ) dφ`.
pub fn phase_diffused_pdf(state: &GaussianState, x: f64) -> f64 {
    let out = adaptive_gk15(|phi| quadrature_pdf(state, x, phi), 0.0, PI, 1e-15, 1e-12, 200);
    out.value / PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Balanced,
    Unbalanced,
    /// State mixed with a coherent field on a beamsplitter of transmissivity
    /// `t` before balanced detection.
    Cascaded { t: f64, alpha: ComplexAmplitude },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub state: GaussianState,
    pub n: usize,
    pub seed: u64,
    /// Detection efficiency, applied as loss before sampling.
    pub eta: f64,
    pub scheme: Scheme,
}

impl ExperimentConfig {
    pub fn balanced(state: GaussianState, n: usize, seed: u64) -> Self {
        Self { state, n, seed, eta: 1.0, scheme: Scheme::Balanced }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidEfficiency(self.eta));
        }
        if let Scheme::Cascaded { t, .. } = self.scheme {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidTransmissivity(t));
            }
        }
        Ok(())
    }

    /// The Gaussian state reaching the detector.
    pub fn detected_state(&self) -> Result<GaussianState> {
        self.validate()?;
        let s = match self.scheme {
            Scheme::Cascaded { t, alpha } => self.state.after_beamsplitter(t, alpha)?,
            _ => self.state,
        };
        s.after_loss(self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSample {
    pub x: f64,
    /// Local-oscillator phase in `[0, π)`.
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSampleSet {
    pub seed: u64,
    pub samples: Vec<QuadratureSample>,
}

impl QuadratureSampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// v1 format: header `# tomostat-quadratures v1 seed=<u64> N=<n>`, then
    /// one `x<TAB>phi` record per line in shortest round-trip decimal form.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# tomostat-quadratures v1 seed={} N={}", self.seed, self.samples.len())?;
        for s in &self.samples {
            writeln!(out, "{}\t{}", s.x, s.phi)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })??;
        let rest = header
            .strip_prefix("# tomostat-quadratures v1 ")
            .ok_or(Error::Parse { line: 1, msg: "missing v1 quadrature header".into() })?;
        let mut seed = None;
        let mut n = None;
        for kv in rest.split_whitespace() {
            if let Some(v) = kv.strip_prefix("seed=") {
                seed = v.parse::<u64>().ok();
            } else if let Some(v) = kv.strip_prefix("N=") {
                n = v.parse::<usize>().ok();
            }
        }
        let (seed, n) = match (seed, n) {
            (Some(s), Some(n)) => (s, n),
            _ => return Err(Error::Parse { line: 1, msg: "header needs seed=<u64> and N=<n>".into() }),
        };
        let mut samples = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            let bad = || Error::Parse { line: lineno, msg: format!("expected x<TAB>phi, got {line:?}") };
            let (x, phi) = line.split_once('\t').ok_or_else(bad)?;
            let x: f64 = x.parse().map_err(|_| bad())?;
            let phi: f64 = phi.parse().map_err(|_| bad())?;
            if !(0.0..PI).contains(&phi) || !x.is_finite() {
                return Err(Error::Parse { line: lineno, msg: format!("phase {phi} outside [0, π) or bad x") });
            }
            samples.push(QuadratureSample { x, phi });
        }
        if samples.len() != n {
            return Err(Error::Parse { line: n + 1, msg: format!("header promises {n} records, found {}", samples.len()) });
        }
        Ok(Self { seed, samples })
    }
}

/// Draws `N` phase-uniform quadrature records of the detected state.
pub fn sample_quadratures(cfg: &ExperimentConfig) -> Result<QuadratureSampleSet> {
    if cfg.scheme == Scheme::Unbalanced {
        return Err(Error::InvalidConfig("the unbalanced scheme records photon counts, not quadratures".into()));
    }
    let state = cfg.detected_state()?;
    let samples = crate::par::map_indexed(cfg.n, |j| {
        let mut rng = stream_rng(cfg.seed, j as u64);
        let phi = PI * uniform(&mut rng);
        let z = standard_normal(&mut rng);
        QuadratureSample { x: state.quadrature_mean(phi) + state.quadrature_variance(phi).sqrt() * z, phi }
    });
    Ok(QuadratureSampleSet { seed: cfg.seed, samples })
}

/// Photon-number probabilities `p_0..p_{n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub p: Vec<f64>,
    pub n_max: usize,
    /// `1 − Σ p_n`.
    pub truncation_mass: f64,
    /// `(n, raw value)` for every slightly negative quadrature result that was clamped to 0.
    pub clamped: Vec<(usize, f64)>,
}

impl PhotonDistribution {
    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// CSV with header `n,p_n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,p_n")?;
        for (n, p) in self.p.iter().enumerate() {
            writeln!(out, "{n},{p}")?;
        }
        Ok(())
    }
}

/// Smallest `r` with `e^{−r²/2} r^{2 n_max} < 1e-16` past the peak.
fn fock_radius(n_max: usize) -> f64 {
    let log_tail = |r: f64| -r * r / 2.0 + 2.0 * n_max as f64 * r.ln();
    let mut r = (2.0 * n_max as f64).sqrt().max(1.0);
    while log_tail(r) > (1e-16f64).ln() {
        r += 0.05;
    }
    r
}

/// Photon statistics of any state characteristic function:
/// `p_n = (1/π) ∫ Φ(β) e^{−|β|²/2} L_n(|β|²) d²β`.
pub fn photon_number_distribution_cf(cf: &dyn CharFn, n_max: usize) -> Result<PhotonDistribution> {
    let radius = match cf.decay_radius() {
        Some(r) => r.min(fock_radius(n_max)),
        None => fock_radius(n_max),
    };
    let raw = laguerre_projection(|b| cf.eval(b), radius, n_max)?;
    let mut clamped = Vec::new();
    let mut p = Vec::with_capacity(raw.len());
    for (n, v) in raw.into_iter().enumerate() {
        if v < -1e-10 {
            return Err(Error::QuadratureNonConvergence { what: "photon-number probability", estimate: v, error: v.abs() });
        }
        if v < 0.0 {
            log::warn!("p_{n} = {v:e} from quadrature clamped to 0");
            clamped.push((n, v));
            p.push(0.0);
        } else {
            p.push(v);
        }
    }
    let truncation_mass = 1.0 - p.iter().sum::<f64>();
    Ok(PhotonDistribution { p, n_max, truncation_mass, clamped })
}

/// Photon statistics of `D(α) ρ D(α)†`.
pub fn photon_number_distribution(state: &GaussianState, alpha: ComplexAmplitude, n_max: usize) -> Result<PhotonDistribution> {
    photon_number_distribution_cf(&state.displaced(alpha), n_max)
}

/// Multinomial photon counts drawn from `dist` (an extension: the unbalanced
/// scheme is otherwise propagated analytically). Record `j` uses stream `j`
/// of `seed` and inverts the cumulative distribution; draws landing in the
/// truncated mass are reported as `n_max + 1`.
pub fn sample_photon_counts(dist: &PhotonDistribution, n: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(dist.p.len());
    let mut acc = 0.0;
    for p in &dist.p {
        acc += p;
        cdf.push(acc);
    }
    crate::par::map_indexed(n, |j| {
        let u = uniform(&mut stream_rng(seed, j as u64));
        cdf.partition_point(|&c| c <= u)
    })
}

/// `Σ n² p_n − (Σ n p_n)²`.
pub fn photon_number_variance(dist: &PhotonDistribution) -> f64 {
    let m = dist.mean();
    dist.p.iter().enumerate().map(|(n, p)| (n as f64).powi(2) * p).sum::<f64>() - m * m
}
