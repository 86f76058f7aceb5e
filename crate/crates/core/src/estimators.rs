//! Empirical estimators and the theoretical variances of the three schemes:
//! the quantum-mechanical reference, balanced homodyne sampling with pattern
//! functions (including cascaded displacement) and unbalanced detection.
//!
//! Theory routes return [`Moments`] so that disagreements between routes can
//! be localized to the first or second moment.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{composite_nodes, GaussLegendre};
use crate::observables::{fock_coefficients, operator_cf, FilterSpec, RadialKernel, ScaledKernel};
use crate::par::map_indexed;
use crate::pattern::PatternEval;
use crate::phasespace::{apply_loss_cf, beamsplitter_mix_cf, CharFn, ComplexAmplitude, GaussianState};
use crate::simulate::{photon_number_distribution, PhotonDistribution, QuadratureSampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    EmpiricalBhd,
    EmpiricalSingle,
    TheoryQm,
    TheoryBhd,
    TheoryUnbalanced,
}

/// A mean with its per-sample variance and the standard error for `n` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub per_sample_variance: f64,
    pub std_error: f64,
    pub n: usize,
    pub method: Method,
}

impl Estimate {
    pub fn new(mean: f64, per_sample_variance: f64, n: usize, method: Method) -> Self {
        let std_error = (per_sample_variance.max(0.0) / n as f64).sqrt();
        Self { mean, per_sample_variance, std_error, n, method }
    }

    /// `|mean| / std_error`.
    pub fn significance(&self) -> f64 {
        self.mean.abs() / self.std_error
    }
}

/// First and second moment of an observable and the resulting variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl Moments {
    pub fn new(mean: f64, second_moment: f64) -> Self {
        Self { mean, second_moment, variance: second_moment - mean * mean }
    }

    pub fn estimate(&self, n: usize, method: Method) -> Estimate {
        Estimate::new(self.mean, self.variance, n, method)
    }

    /// Standard error for `n` samples.
    pub fn std_error(&self, n: usize) -> f64 {
        (self.variance.max(0.0) / n as f64).sqrt()
    }
}

/// Sample mean and unbiased sample variance (`1/(N−1)`).
pub fn empirical_estimate_single(values: &[f64]) -> Result<Estimate> {
    empirical(values, Method::EmpiricalSingle)
}

fn empirical(values: &[f64], method: Method) -> Result<Estimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Estimate::new(mean, var, n, method))
}

/// Mean and variance of pattern-function values over quadrature records.
pub fn empirical_estimate_bhd(samples: &QuadratureSampleSet, pattern: &dyn PatternEval) -> Result<Estimate> {
    let values = map_indexed(samples.len(), |j| {
        let s = samples.samples[j];
        pattern.pattern(s.x, s.phi)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    empirical(&values, Method::EmpiricalBhd)
}

fn integration_radius(state: &dyn CharFn, op: &dyn CharFn) -> Result<f64> {
    if !op.eval(Complex64::new(0.0, 0.0)).is_finite() {
        return Err(Error::NonIntegrableOperator("operator characteristic function is singular at the origin".into()));
    }
    match (state.decay_radius(), op.decay_radius()) {
        (Some(a), Some(b)) => Ok(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::NonIntegrableOperator("neither function decays".into())),
    }
}

fn operator_radius(op: &dyn CharFn) -> Result<f64> {
    if !op.eval(Complex64::new(0.0, 0.0)).is_finite() {
        return Err(Error::NonIntegrableOperator("operator characteristic function is singular at the origin".into()));
    }
    op.decay_radius()
        .ok_or_else(|| Error::NonIntegrableOperator("operator characteristic function does not decay".into()))
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `Tr{ρF} = (1/π) ∫ Φ(β) Φ_F*(β) d²β` in polar coordinates, refined until
/// two successive levels agree to 1e-11.
pub fn expectation_via_cf(state: &dyn CharFn, op: &dyn CharFn) -> Result<f64> {
    let radius = integration_radius(state, op)?;
    let rule = GaussLegendre::new(16);
    let level = |width: f64, angles: usize| -> Complex64 {
        let panels = ((radius / width).ceil() as usize).max(1);
        let (rs, ws) = composite_nodes(0.0, radius, panels, &rule);
        let rows = map_indexed(rs.len(), |i| {
            let r = rs[i];
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..angles {
                let beta = Complex64::from_polar(r, 2.0 * PI * k as f64 / angles as f64);
                s += state.eval(beta) * op.eval(beta).conj();
            }
            s * (ws[i] * r)
        });
        rows.into_iter().sum::<Complex64>() * (2.0 / angles as f64)
    };
    let (mut width, mut angles) = (0.5, 64);
    let mut prev = level(width, angles);
    for _ in 0..5 {
        width /= 2.0;
        angles *= 2;
        let next = level(width, angles);
        if (next - prev).norm() < 1e-11 * next.norm().max(1.0) {
            if next.im.abs() > 1e-9 * next.norm().max(1.0) {
                return Err(Error::QuadratureNonConvergence {
                    what: "expectation value (imaginary residue)",
                    estimate: next.re,
                    error: next.im,
                });
            }
            return Ok(next.re);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence { what: "expectation value", estimate: prev.re, error: f64::NAN })
}

/// Resolution schedule of the nested quantum-mechanical integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmOptions {
    /// Initial number of phases on `[0, π)` for each of the two phase integrals.
    pub phases: usize,
    /// Width of the Gauss–Legendre panels in `b′` and `b″`.
    pub panel_width: f64,
    /// Initial Gauss–Legendre order per panel.
    pub order: usize,
    pub rel_tol: f64,
    pub max_phases: usize,
    pub max_order: usize,
}

impl Default for QmOptions {
    fn default() -> Self {
        Self { phases: 24, panel_width: 0.5, order: 6, rel_tol: 1e-5, max_phases: 384, max_order: 24 }
    }
}

/// `Tr{ρF²}` as the fourfold integral
/// `π⁻² ∫dφ ∫dφ′ ∫db′ ∫db″ |b′||b″| Φ(ib′e^{iφ} + ib″e^{iφ′}) Φ_F*(ib′e^{iφ}) Φ_F*(ib″e^{iφ′}) e^{ib′b″ sin(φ−φ′)}`,
/// with `φ, φ′ ∈ [0, π)` and `b′, b″ ∈ ℝ`. The mean comes from [`expectation_via_cf`].
pub fn qm_variance(state: &dyn CharFn, op: &dyn CharFn) -> Result<Moments> {
    qm_variance_with(state, op, &QmOptions::default())
}

pub fn qm_variance_with(state: &dyn CharFn, op: &dyn CharFn, opts: &QmOptions) -> Result<Moments> {
    let radius = operator_radius(op)?;
    let mean = expectation_via_cf(state, op)?;
    let fail = |v: f64| Error::QuadratureNonConvergence { what: "quantum second moment", estimate: v, error: f64::NAN };

    // refine the phase grids first; `prev` ends one level below the converged grid
    let mut phases = opts.phases;
    let mut prev = qm_second_moment_at(state, op, radius, phases, opts.panel_width, opts.order);
    loop {
        if phases * 2 > opts.max_phases {
            return Err(fail(prev));
        }
        let next = qm_second_moment_at(state, op, radius, phases * 2, opts.panel_width, opts.order);
        if relative_change(prev, next) < opts.rel_tol {
            break;
        }
        phases *= 2;
        prev = next;
    }
    // then the radial rule, on the coarser of the two agreeing phase grids
    let mut order = opts.order;
    let mut cur = prev;
    loop {
        if order * 2 > opts.max_order {
            return Err(fail(cur));
        }
        order *= 2;
        let next = qm_second_moment_at(state, op, radius, phases, opts.panel_width, order);
        let done = relative_change(cur, next) < opts.rel_tol;
        cur = next;
        if done {
            break;
        }
    }
    Ok(Moments::new(mean, cur))
}

/// Radial nodes `b ∈ [−R, R]` with weights `|b| w`.
fn signed_nodes(radius: f64, width: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(order);
    let panels = ((radius / width).ceil() as usize).max(1);
    let (bs, ws) = composite_nodes(0.0, radius, panels, &rule);
    let mut nodes = Vec::with_capacity(2 * bs.len());
    let mut weights = Vec::with_capacity(2 * bs.len());
    for (&b, &w) in bs.iter().zip(&ws) {
        nodes.push(b);
        weights.push(b * w);
        nodes.push(-b);
        weights.push(b * w);
    }
    (nodes, weights)
}

// Terms (φ,φ′,b′,b″) and (φ′,φ,b″,b′) share the state factor and carry
// conjugate phases, so only φ ≤ φ′ is summed, with weight 2cos.
fn qm_second_moment_at(state: &dyn CharFn, op: &dyn CharFn, radius: f64, phases: usize, width: f64, order: usize) -> f64 {
    let (bs, ws) = signed_nodes(radius, width, order);
    let dirs: Vec<Complex64> = (0..phases).map(|k| Complex64::i() * Complex64::cis(PI * k as f64 / phases as f64)).collect();
    let gaussian = state.as_gaussian();
    // weighted operator values per phase and node, times Φ(β) on the Gaussian path
    let opv: Vec<Vec<Complex64>> = dirs
        .iter()
        .map(|&d| {
            bs.iter()
                .zip(&ws)
                .map(|(&b, &w)| {
                    let v = op.eval(d * b).conj() * w;
                    if gaussian.is_some() { v * state.eval(d * b) } else { v }
                })
                .collect()
        })
        .collect();
    let rows = map_indexed(phases, |k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in k..phases {
            let s = (PI * (k as f64 - l as f64) / phases as f64).sin();
            let pair = if l == k { 1.0 } else { 2.0 };
            let g = gaussian.map(|st| st.cf_cross_term(dirs[k], dirs[l]));
            for (j, &bj) in bs.iter().enumerate() {
                let a = opv[k][j];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut inner = Complex64::new(0.0, 0.0);
                match g {
                    Some(g) => {
                        for (m, &bm) in bs.iter().enumerate() {
                            let p = bj * bm;
                            inner += opv[l][m] * ((-p * g).exp() * (p * s).cos());
                        }
                    }
                    None => {
                        let bj_dir = dirs[k] * bj;
                        for (m, &bm) in bs.iter().enumerate() {
                            inner += state.eval(bj_dir + dirs[l] * bm) * opv[l][m] * (bj * bm * s).cos();
                        }
                    }
                }
                acc += a * inner * pair;
            }
        }
        acc
    });
    // (1/π²)(π/M)² per phase pair
    (rows.into_iter().sum::<Complex64>() / (phases * phases) as f64).re
}

/// Per-sample second moment of the pattern-function estimator,
/// `(1/π) ∫₀^π dφ ∫db′ ∫db″ |b′||b″| Φ(i(b′+b″)e^{iφ}) Φ_F*(ib′e^{iφ}) Φ_F*(ib″e^{iφ})`,
/// evaluated directly from the characteristic functions.
pub fn bhd_variance(state: &dyn CharFn, op: &dyn CharFn) -> Result<Moments> {
    let radius = operator_radius(op)?;
    let (bs, ws) = signed_nodes(radius, 0.5, 12);
    let level = |phases: usize| -> (f64, f64) {
        let rows = map_indexed(phases, |k| {
            let dir = Complex64::i() * Complex64::cis(PI * k as f64 / phases as f64);
            let opv: Vec<Complex64> = bs.iter().zip(&ws).map(|(&b, &w)| op.eval(dir * b).conj() * w).collect();
            let mut m1 = Complex64::new(0.0, 0.0);
            let mut m2 = Complex64::new(0.0, 0.0);
            for j in 0..bs.len() {
                m1 += state.eval(dir * bs[j]) * opv[j];
                m2 += state.eval(dir * (2.0 * bs[j])) * opv[j] * opv[j];
                let mut off = Complex64::new(0.0, 0.0);
                for m in 0..j {
                    off += state.eval(dir * (bs[j] + bs[m])) * opv[m];
                }
                m2 += 2.0 * off * opv[j];
            }
            (m1, m2)
        });
        let (s1, s2) = rows
            .into_iter()
            .fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(a, b), (x, y)| (a + x, b + y));
        ((s1 / phases as f64).re, (s2 / phases as f64).re)
    };
    converge_phases(level, 16, 1024, 1e-9, "balanced second moment")
}

fn converge_phases<F: Fn(usize) -> (f64, f64)>(level: F, start: usize, max: usize, tol: f64, what: &'static str) -> Result<Moments> {
    let mut phases = start;
    let mut prev = level(phases);
    while phases < max {
        phases *= 2;
        let next = level(phases);
        let scale = next.1.abs().max(next.0 * next.0);
        if (next.0 - prev.0).abs() < tol * scale.sqrt().max(1e-300) && (next.1 - prev.1).abs() < tol * scale {
            return Ok(Moments::new(next.0, next.1));
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence { what, estimate: prev.1, error: f64::NAN })
}

/// Balanced-homodyne moments for displaced radial operators.
///
/// Writing `u = b′ + b″`, the operator factors of the second moment depend on
/// the displacement and phase only through `u`, leaving
/// `E f² = (2/π) ∫₀^∞ du H(u) Re ∫₀^π dφ Φ(iue^{iφ}) e^{−iu c(φ)}` with
/// `c(φ) = 2 Re(α e^{−iφ})` and the operator-only weight
/// `H(u) = π⁻² ∫₀ dv |b′||b″| W(|b′|) W(|b″|)`, `b′,b″ = (u ± v)/2`,
/// `W(b) = Ω(b) e^{b²/2}`. `H` is tabulated once per kernel.
#[derive(Debug, Clone)]
pub struct RadialBhd {
    kernel: Arc<dyn RadialKernel>,
    us: Vec<f64>,
    ws: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl RadialBhd {
    pub fn new(kernel: Arc<dyn RadialKernel>) -> Result<Self> {
        let radius = kernel.observable_radius().ok_or_else(|| {
            Error::NonIntegrableOperator(format!("{} does not decay", kernel.describe()))
        })?;
        let rule = GaussLegendre::new(16);
        let span = 2.0 * radius;
        let (us, ws) = composite_nodes(0.0, span, ((span / 0.25).ceil() as usize).max(1), &rule);
        let first = us.iter().map(|&u| u * kernel.weighted(u) / PI).collect();
        let k = kernel.as_ref();
        let second = map_indexed(us.len(), |i| {
            let u = us[i];
            let top = span - u;
            let integrand = |v: f64| {
                let (b1, b2) = ((u + v) / 2.0, (u - v) / 2.0);
                (b1 * b2).abs() * k.weighted(b1.abs()) * k.weighted(b2.abs())
            };
            let mut h = 0.0;
            for (lo, hi) in [(0.0, u.min(top)), (u, top)] {
                if hi > lo {
                    let panels = (((hi - lo) / 0.25).ceil() as usize).max(1);
                    let (vs, vw) = composite_nodes(lo, hi, panels, &rule);
                    h += vs.iter().zip(&vw).map(|(&v, &w)| w * integrand(v)).sum::<f64>();
                }
            }
            h / (PI * PI)
        });
        Ok(Self { kernel, us, ws, first, second })
    }

    pub fn kernel(&self) -> &Arc<dyn RadialKernel> {
        &self.kernel
    }

    /// Mean and second moment of the pattern estimator for the operator
    /// displaced by `alpha` on the given state.
    pub fn moments(&self, state: &dyn CharFn, alpha: ComplexAmplitude) -> Result<Moments> {
        let limit = state.decay_radius().unwrap_or(f64::INFINITY);
        let count = self.us.partition_point(|&u| u <= limit);
        let level = |phases: usize| -> (f64, f64) {
            let rows = map_indexed(count, |i| {
                let u = self.us[i];
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..phases {
                    let phi = PI * k as f64 / phases as f64;
                    let c = 2.0 * (alpha * Complex64::cis(-phi)).re;
                    s += state.eval(Complex64::i() * Complex64::cis(phi) * u) * Complex64::cis(-u * c);
                }
                let a = self.ws[i] * s.re / phases as f64;
                (a * self.first[i], a * self.second[i])
            });
            let (m1, m2) = rows.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
            (2.0 * m1, 2.0 * m2)
        };
        converge_phases(level, 32, 1 << 14, 1e-11, "balanced second moment")
    }
}

/// `(1/π) ∫₀^π dφ ∫ dx p(x;φ) f(x,φ)^k` for `k = 1, 2` by Gauss–Legendre in `x`
/// over `±9` standard deviations and the trapezoidal rule in `φ`.
pub fn bhd_moments_via_pattern(state: &GaussianState, pattern: &dyn PatternEval) -> Result<Moments> {
    let rule = GaussLegendre::new(12);
    let level = |phases: usize| -> Result<(f64, f64)> {
        let rows = map_indexed(phases, |k| -> Result<(f64, f64)> {
            let phi = PI * k as f64 / phases as f64;
            let mu = state.quadrature_mean(phi);
            let sd = state.quadrature_variance(phi).sqrt();
            let (lo, hi) = (mu - 9.0 * sd, mu + 9.0 * sd);
            let (xs, ws) = composite_nodes(lo, hi, ((hi - lo) / 0.2).ceil() as usize, &rule);
            let (mut m1, mut m2) = (0.0, 0.0);
            for (&x, &w) in xs.iter().zip(&ws) {
                let d = (x - mu) / sd;
                let p = (-0.5 * d * d).exp() / (sd * (2.0 * PI).sqrt());
                let f = pattern.pattern(x, phi)?;
                m1 += w * p * f;
                m2 += w * p * f * f;
            }
            Ok((m1, m2))
        });
        let mut acc = (0.0, 0.0);
        for r in rows {
            let (a, b) = r?;
            acc.0 += a;
            acc.1 += b;
        }
        Ok((acc.0 / phases as f64, acc.1 / phases as f64))
    };
    let mut phases = 32;
    let mut prev = level(phases)?;
    while phases < 4096 {
        phases *= 2;
        let next = level(phases)?;
        if relative_change(prev.1, next.1) < 1e-10 && (prev.0 - next.0).abs() < 1e-10 * next.1.abs().sqrt() {
            return Ok(Moments::new(next.0, next.1));
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence { what: "pattern-route moments", estimate: prev.1, error: f64::NAN })
}

/// A cascaded balanced measurement: the input is mixed with a coherent field
/// on a beamsplitter of transmissivity `t` (displacement parameter `alpha`),
/// detected with efficiency `eta`, and the operator displaced by `gamma` is
/// estimated after undoing the attenuation (kernel `t_eff² Ω(t_eff b)` with
/// `t_eff = t√η`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadedSetup {
    pub t: f64,
    pub alpha: ComplexAmplitude,
    pub gamma: ComplexAmplitude,
    pub eta: f64,
}

impl CascadedSetup {
    /// Direct detection of the operator displaced by `γ`.
    pub fn method_one(gamma: ComplexAmplitude) -> Self {
        Self { t: 1.0, alpha: Complex64::new(0.0, 0.0), gamma, eta: 1.0 }
    }

    /// Displacement by `−γ` on the beamsplitter, undisplaced operator.
    pub fn method_two(t: f64, gamma: ComplexAmplitude) -> Self {
        Self { t, alpha: -gamma, gamma: Complex64::new(0.0, 0.0), eta: 1.0 }
    }

    pub fn with_efficiency(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn effective_transmissivity(&self) -> f64 {
        self.t * self.eta.sqrt()
    }

    /// Kernel actually estimated on the detected state.
    pub fn detected_kernel(&self, kernel: Arc<dyn RadialKernel>) -> Result<Arc<dyn RadialKernel>> {
        let te = self.effective_transmissivity();
        if te == 1.0 {
            Ok(kernel)
        } else {
            Ok(Arc::new(ScaledKernel::new(kernel, te)?))
        }
    }

    /// Operator displacement as seen on the detected state: attenuation
    /// shrinks phase space by `t_eff`, so `γ` becomes `t_eff γ`.
    pub fn detected_displacement(&self) -> ComplexAmplitude {
        self.gamma * self.effective_transmissivity()
    }

    /// Characteristic function of the detected state.
    pub fn detected_state<'a>(&self, input: &'a dyn CharFn) -> Result<impl CharFn + 'a> {
        let mixed = beamsplitter_mix_cf(input, self.t, self.alpha)?;
        apply_loss_cf(mixed, self.eta)
    }
}

/// Balanced-homodyne moments of a cascaded measurement of the radial
/// `kernel` on input state `phi0`.
pub fn bhd_variance_displaced(phi0: &dyn CharFn, setup: &CascadedSetup, kernel: Arc<dyn RadialKernel>) -> Result<Moments> {
    let detected = setup.detected_state(phi0)?;
    let k = setup.detected_kernel(kernel)?;
    RadialBhd::new(k)?.moments(&detected, setup.detected_displacement())
}

/// `Σ F_n p_n` and `Σ F_n² p_n`.
pub fn unbalanced_moments(coeffs: &[f64], dist: &PhotonDistribution) -> Result<Moments> {
    if coeffs.len() != dist.p.len() {
        return Err(Error::LengthMismatch { left: coeffs.len(), right: dist.p.len() });
    }
    let mean = coeffs.iter().zip(&dist.p).map(|(f, p)| f * p).sum();
    let second = coeffs.iter().zip(&dist.p).map(|(f, p)| f * f * p).sum();
    Ok(Moments::new(mean, second))
}

/// Linear error propagation for the unbalanced scheme with `n` detection events.
pub fn unbalanced_uncertainty(coeffs: &[f64], dist: &PhotonDistribution, n: usize) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::InsufficientSamples(0));
    }
    Ok(unbalanced_moments(coeffs, dist)?.estimate(n, Method::TheoryUnbalanced))
}

/// One point of a scheme comparison; sigmas are standard errors for `n` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    pub alpha: ComplexAmplitude,
    pub p: f64,
    pub sigma_qm: f64,
    pub sigma_bhd: f64,
    pub sigma_unbalanced: f64,
    pub n: usize,
}

pub const REPORT_HEADER: &str = "alpha_re,alpha_im,P,sigma_qm,sigma_bhd,sigma_unbalanced,N";

impl VarianceReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.alpha.re, self.alpha.im, self.p, self.sigma_qm, self.sigma_bhd, self.sigma_unbalanced, self.n
        )
    }
}

pub fn write_report_csv<W: Write>(rows: &[VarianceReport], mut out: W) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Precomputed pieces for comparing the schemes over many displacements.
///
/// With a detection efficiency `η < 1` both measured schemes see the lossy
/// state and estimate the compensated kernel `η Ω(√η b)`, so their means stay
/// unbiased; the quantum-mechanical reference is always lossless.
#[derive(Debug, Clone)]
pub struct Comparison {
    filter: Arc<FilterSpec>,
    eta: f64,
    bhd: RadialBhd,
    coeffs: Vec<f64>,
    coeffs_qm: Vec<f64>,
}

impl Comparison {
    /// `n_max` truncates the unbalanced scheme; `n_qm` (larger) is used for
    /// the quantum-mechanical reference.
    pub fn new(filter: Arc<FilterSpec>, n_max: usize, n_qm: usize) -> Result<Self> {
        Self::with_efficiency(filter, n_max, n_qm, 1.0)
    }

    pub fn with_efficiency(filter: Arc<FilterSpec>, n_max: usize, n_qm: usize, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let coeffs_qm = fock_coefficients(filter.as_ref(), n_qm.max(n_max))?;
        let (bhd, coeffs) = if eta == 1.0 {
            (RadialBhd::new(filter.clone())?, coeffs_qm[..=n_max].to_vec())
        } else {
            let detected = CascadedSetup::method_one(Complex64::new(0.0, 0.0)).with_efficiency(eta).detected_kernel(filter.clone())?;
            (RadialBhd::new(detected.clone())?, fock_coefficients(detected.as_ref(), n_max)?)
        };
        Ok(Self { filter, eta, bhd, coeffs, coeffs_qm })
    }

    pub fn filter(&self) -> &Arc<FilterSpec> {
        &self.filter
    }

    pub fn efficiency(&self) -> f64 {
        self.eta
    }

    /// Coefficients applied to the detected photon counts.
    pub fn fock_coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn balanced(&self, state: &dyn CharFn, alpha: ComplexAmplitude) -> Result<Moments> {
        if self.eta == 1.0 {
            self.bhd.moments(state, alpha)
        } else {
            self.bhd.moments(&apply_loss_cf(state, self.eta)?, alpha * self.eta.sqrt())
        }
    }

    /// Unbalanced moments from the photon statistics of `D(−α) ρ D(−α)†`
    /// seen through the detector.
    pub fn unbalanced(&self, state: &GaussianState, alpha: ComplexAmplitude) -> Result<Moments> {
        let detected = state.displaced(-alpha).after_loss(self.eta)?;
        let dist = photon_number_distribution(&detected, Complex64::new(0.0, 0.0), self.n_max())?;
        unbalanced_moments(&self.coeffs, &dist)
    }

    /// Quantum-mechanical moments through the Fock representation at `n_qm`.
    pub fn quantum(&self, state: &GaussianState, alpha: ComplexAmplitude) -> Result<Moments> {
        let n = self.coeffs_qm.len() - 1;
        unbalanced_moments(&self.coeffs_qm, &photon_number_distribution(state, -alpha, n)?)
    }

    pub fn report(&self, state: &GaussianState, alpha: ComplexAmplitude, n: usize) -> Result<VarianceReport> {
        let p = expectation_via_cf(state, &operator_cf(&self.filter, alpha))?;
        Ok(VarianceReport {
            alpha,
            p,
            sigma_qm: self.quantum(state, alpha)?.std_error(n),
            sigma_bhd: self.balanced(state, alpha)?.std_error(n),
            sigma_unbalanced: self.unbalanced(state, alpha)?.std_error(n),
            n,
        })
    }

    /// Reports in grid order.
    pub fn scan(&self, state: &GaussianState, alphas: &[ComplexAmplitude], n: usize) -> Result<Vec<VarianceReport>> {
        alphas.iter().map(|&a| self.report(state, a, n)).collect()
    }
}

/// `x` interval holding the quadrature distribution at every phase to
/// `sigmas` standard deviations.
pub fn sampling_range(state: &GaussianState, sigmas: f64) -> (f64, f64) {
    let reach = 2.0 * state.mean().norm() + sigmas * state.max_variance().sqrt();
    (-reach, reach)
}
