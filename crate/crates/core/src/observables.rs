//! Observables for quasiprobabilities: radial kernels (s-parameterized and the
//! nonclassicality filter), the displaced operator characteristic function and
//! its Fock-diagonal coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_gk15, composite_nodes, laguerre, laguerre_all, CubicSpline, GaussLegendre};
use crate::phasespace::{displacement_phase, CfKind, CharFn, ComplexAmplitude};

/// Grid spacing (in `b`) of the tabulated filter.
pub const FILTER_TABLE_STEP: f64 = 0.01;
/// Observable functions are cut where `|b Φ_F(b)|` falls below this fraction of its peak.
pub const OBSERVABLE_TAIL: f64 = 1e-14;

/// Window `ω(β) = (2/π)^{3/4} e^{−|β|⁴}`.
pub fn filter_window(beta: ComplexAmplitude) -> f64 {
    (2.0 / PI).powf(0.75) * (-beta.norm_sqr().powi(2)).exp()
}

/// `Ω(b; s) = e^{−(1−s) b²/2}`.
pub fn s_kernel(s: f64, b: f64) -> f64 {
    (-(1.0 - s) * b * b / 2.0).exp()
}

/// A radial function `Ω(b)` defining the Fock-diagonal operator with
/// characteristic function `π⁻¹ Ω(|β|) e^{|β|²/2}`.
pub trait RadialKernel: Send + Sync + fmt::Debug {
    fn value(&self, b: f64) -> f64;

    /// `Ω(b) e^{b²/2}`.
    fn weighted(&self, b: f64) -> f64 {
        self.value(b) * (b * b / 2.0).exp()
    }

    /// Radius beyond which `b·Ω(b)e^{b²/2}` is negligible; `None` if it never is.
    fn observable_radius(&self) -> Option<f64>;

    /// Canonical text used for cache keys.
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SKernel {
    pub s: f64,
}

impl SKernel {
    pub fn wigner() -> Self {
        Self { s: 0.0 }
    }
    pub fn husimi() -> Self {
        Self { s: -1.0 }
    }
}

impl RadialKernel for SKernel {
    fn value(&self, b: f64) -> f64 {
        s_kernel(self.s, b)
    }
    fn weighted(&self, b: f64) -> f64 {
        (self.s * b * b / 2.0).exp()
    }
    fn observable_radius(&self) -> Option<f64> {
        // e^{s b²/2} only decays for s < 0
        (self.s < 0.0).then(|| (2.0 * (1.0 / (OBSERVABLE_TAIL * 1e-2)).ln() / -self.s).sqrt())
    }
    fn describe(&self) -> String {
        format!("s-kernel(s={})", self.s)
    }
}

/// Nonclassicality filter `Ω_w(b) = ∫ ω(β′) ω(β′ + β/w) d²β′` with `|β| = b`,
/// tabulated once as `ln Ω_w` on a uniform grid and interpolated by a cubic spline.
///
/// The integral is over the dummy variable `β′`. Because `ω` is radial, the
/// angular part has a closed form:
/// `Ω_w = (2/π)^{3/2} π ∫₀^∞ exp(−2(s + d²/4)²) e^{−s d²} I₀(s d²) ds`, `d = b/w`.
pub struct FilterSpec {
    w: f64,
    log_table: CubicSpline,
    b_max: f64,
    radius: f64,
    peak: f64,
}

impl fmt::Debug for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterSpec")
            .field("w", &self.w)
            .field("b_max", &self.b_max)
            .field("radius", &self.radius)
            .finish()
    }
}

impl FilterSpec {
    /// Tabulates the filter of width `w` on `[0, 8w]`.
    pub fn new(w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidFilter(w));
        }
        let b_max = 8.0 * w;
        let count = (b_max / FILTER_TABLE_STEP).ceil() as usize + 1;
        let logs = (0..count)
            .map(|i| log_autocorrelation(i as f64 * FILTER_TABLE_STEP / w))
            .collect::<Result<Vec<_>>>()?;
        let log_table = CubicSpline::new(0.0, FILTER_TABLE_STEP, logs);
        let b_max = log_table.x_max();

        // scan for the cutoff of b·Ω_w(b)e^{b²/2}
        let weighted_log = |b: f64| log_table.eval(b) + b * b / 2.0 + b.max(1e-300).ln();
        let mut peak = f64::NEG_INFINITY;
        for i in 0..count {
            peak = peak.max(weighted_log(i as f64 * FILTER_TABLE_STEP));
        }
        let cut = peak + OBSERVABLE_TAIL.ln();
        let mut radius = b_max;
        for i in (1..count).rev() {
            let b = i as f64 * FILTER_TABLE_STEP;
            if weighted_log(b) > cut {
                radius = (b + FILTER_TABLE_STEP).min(b_max);
                break;
            }
        }
        Ok(Self { w, log_table, b_max, radius, peak: peak.exp() })
    }

    pub fn width(&self) -> f64 {
        self.w
    }

    /// End of the tabulated range; the filter is taken as zero beyond it.
    pub fn table_end(&self) -> f64 {
        self.b_max
    }

    /// Maximum of `b·Ω_w(b)e^{b²/2}` over the table.
    pub fn weighted_peak(&self) -> f64 {
        self.peak
    }

    /// Tabulated `Ω_w(b)`; even in `b`.
    pub fn autocorrelation(&self, b: f64) -> f64 {
        let b = b.abs();
        if b > self.b_max {
            0.0
        } else {
            self.log_table.eval(b).exp()
        }
    }

    /// `Ω_w(b)` by direct adaptive quadrature, bypassing the table.
    pub fn autocorrelation_direct(&self, b: f64) -> Result<f64> {
        Ok(log_autocorrelation(b.abs() / self.w)?.exp())
    }
}

/// `autocorr_filter`: the tabulated filter at radial distance `b`.
pub fn autocorr_filter(filter: &FilterSpec, b: f64) -> f64 {
    filter.autocorrelation(b)
}

impl RadialKernel for FilterSpec {
    fn value(&self, b: f64) -> f64 {
        self.autocorrelation(b)
    }
    fn weighted(&self, b: f64) -> f64 {
        let b = b.abs();
        if b > self.b_max {
            0.0
        } else {
            (self.log_table.eval(b) + b * b / 2.0).exp()
        }
    }
    fn observable_radius(&self) -> Option<f64> {
        Some(self.radius)
    }
    fn describe(&self) -> String {
        format!("filter(w={})", self.w)
    }
}

/// `ln Ω` at scaled offset `d = b/w`.
fn log_autocorrelation(d: f64) -> Result<f64> {
    let q = d * d / 4.0;
    let d2 = d * d;
    // exp(−2(s+q)²) = e^{−2q²} exp(−2s² − 4sq); cut where the latter is < e^{−42}
    let upper = (-4.0 * q + (16.0 * q * q + 8.0 * 42.0).sqrt()) / 4.0;
    let out = adaptive_gk15(
        |s| (-2.0 * s * s - 4.0 * s * q).exp() * bessel_i0e(s * d2),
        0.0,
        upper,
        0.0,
        1e-14,
        500,
    );
    if !out.converged {
        return Err(Error::QuadratureNonConvergence {
            what: "filter autocorrelation",
            estimate: out.value,
            error: out.error,
        });
    }
    let prefactor = (2.0 / PI).powf(1.5) * PI;
    Ok(prefactor.ln() - 2.0 * q * q + out.value.ln())
}

/// Exponentially scaled modified Bessel function `e^{−z} I₀(z)` for `z ≥ 0`.
pub(crate) fn bessel_i0e(z: f64) -> f64 {
    if z < 40.0 {
        // power series, all terms positive
        let y = z * z / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= y / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        // asymptotic series: Σ_k [(2k−1)!!]² / (k! (8z)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let kf = k as f64;
            term *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * z);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

/// `t² Ω(t b)`. Measured after a beamsplitter of transmissivity `t`, this
/// kernel has the same expectation value as `Ω` on the input state.
#[derive(Debug, Clone)]
pub struct ScaledKernel {
    inner: Arc<dyn RadialKernel>,
    t: f64,
    radius: Option<f64>,
}

impl ScaledKernel {
    pub fn new(inner: Arc<dyn RadialKernel>, t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidTransmissivity(t));
        }
        let mut k = Self { inner, t, radius: None };
        k.radius = k.inner.observable_radius().map(|r| k.scan_radius(r / t));
        Ok(k)
    }

    pub fn transmissivity(&self) -> f64 {
        self.t
    }

    // the extra e^{(1−t²)b²/2} growth pushes the cutoff outwards
    fn scan_radius(&self, start: f64) -> f64 {
        const STEP: f64 = 0.01;
        let steps = (3.0 * start / STEP) as usize;
        let vals: Vec<f64> = (1..=steps).map(|i| i as f64 * STEP).map(|b| b * self.weighted(b).abs()).collect();
        let peak = vals.iter().cloned().fold(0.0, f64::max);
        let last = vals.iter().rposition(|&v| v > OBSERVABLE_TAIL * peak).unwrap_or(0);
        (last + 2) as f64 * STEP
    }
}

impl RadialKernel for ScaledKernel {
    fn value(&self, b: f64) -> f64 {
        self.t * self.t * self.inner.value(self.t * b)
    }
    fn weighted(&self, b: f64) -> f64 {
        let t2 = self.t * self.t;
        t2 * self.inner.weighted(self.t * b) * ((1.0 - t2) * b * b / 2.0).exp()
    }
    fn observable_radius(&self) -> Option<f64> {
        self.radius
    }
    fn describe(&self) -> String {
        format!("scaled(t={},{})", self.t, self.inner.describe())
    }
}

/// A Fock-diagonal observable displaced by `α`: characteristic function
/// `π⁻¹ Ω(|β|) e^{|β|²/2} e^{α*β − αβ*}`, optionally with its Fock
/// coefficients attached.
#[derive(Clone)]
pub struct OperatorSpec {
    kernel: Arc<dyn RadialKernel>,
    displacement: Complex64,
    fock: Option<Arc<Vec<f64>>>,
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("kernel", &self.kernel.describe())
            .field("displacement", &self.displacement)
            .field("fock_len", &self.fock.as_ref().map(|v| v.len()))
            .finish()
    }
}

impl OperatorSpec {
    pub fn new(kernel: Arc<dyn RadialKernel>, displacement: ComplexAmplitude) -> Self {
        Self { kernel, displacement, fock: None }
    }

    /// Attaches `F_0..F_{n_max}` computed from the kernel.
    pub fn with_fock(mut self, n_max: usize) -> Result<Self> {
        self.fock = Some(Arc::new(fock_coefficients(self.kernel.as_ref(), n_max)?));
        Ok(self)
    }

    pub fn kernel(&self) -> &Arc<dyn RadialKernel> {
        &self.kernel
    }

    pub fn displacement(&self) -> Complex64 {
        self.displacement
    }

    pub fn fock_coefficients(&self) -> Option<&[f64]> {
        self.fock.as_deref().map(|v| v.as_slice())
    }

    /// Same operator displaced to `α` instead; Fock coefficients carry over.
    pub fn displaced_to(&self, alpha: ComplexAmplitude) -> Self {
        Self { displacement: alpha, ..self.clone() }
    }

    pub fn describe(&self) -> String {
        format!(
            "{};alpha=({},{})",
            self.kernel.describe(),
            self.displacement.re,
            self.displacement.im
        )
    }
}

impl CharFn for OperatorSpec {
    fn eval(&self, beta: Complex64) -> Complex64 {
        displacement_phase(beta, self.displacement) * (self.kernel.weighted(beta.norm()) / PI)
    }
    fn kind(&self) -> CfKind {
        CfKind::Observable
    }
    fn decay_radius(&self) -> Option<f64> {
        self.kernel.observable_radius()
    }
}

/// The filtered operator `F(α)` with `Φ_F(β) = π⁻¹ Ω_w(β) e^{|β|²/2} e^{α*β−αβ*}`.
pub fn operator_cf(filter: &Arc<FilterSpec>, alpha: ComplexAmplitude) -> OperatorSpec {
    OperatorSpec::new(filter.clone(), alpha)
}

/// `F_n = (2/π) ∫₀^∞ b Ω(b) L_n(b²) db` for `n = 0..=n_max`.
pub fn fock_coefficients(kernel: &dyn RadialKernel, n_max: usize) -> Result<Vec<f64>> {
    let radius = fock_tail_radius(kernel, n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let res = adaptive_gk15(
            |b| b * kernel.value(b) * laguerre(n, b * b),
            0.0,
            radius,
            1e-13,
            1e-13,
            4000,
        );
        if !res.converged {
            return Err(Error::QuadratureNonConvergence {
                what: "Fock coefficient",
                estimate: res.value,
                error: res.error,
            });
        }
        out.push(2.0 / PI * res.value);
    }
    Ok(out)
}

/// First radius past which `|b Ω(b) L_n(b²)| < 1e-17` holds for all `n ≤ n_max`
/// over several consecutive probe points.
fn fock_tail_radius(kernel: &dyn RadialKernel, n_max: usize) -> Result<f64> {
    const STEP: f64 = 0.5;
    const LIMIT: f64 = 80.0;
    let mut lag = vec![0.0; n_max + 1];
    let mut quiet = 0;
    let mut b = STEP;
    while b <= LIMIT {
        laguerre_all(b * b, &mut lag);
        let k = kernel.value(b);
        let big = lag.iter().map(|l| (b * k * l).abs()).fold(0.0, f64::max);
        if big.is_finite() && big < 1e-17 {
            quiet += 1;
            if quiet == 4 {
                return Ok(b);
            }
        } else {
            quiet = 0;
        }
        b += STEP;
    }
    Err(Error::DivergentKernel(kernel.describe()))
}

/// `(1/π) ∫ g(β) e^{−|β|²/2} L_n(|β|²) d²β` for all `n ≤ n_max`, where `g` is
/// a characteristic function (of a state, giving `p_n`) or the conjugate of an
/// operator's (giving `F_n`). Polar coordinates: Gauss–Legendre panels in the
/// radius, a trapezoidal rule in angle refined until stable.
pub(crate) fn laguerre_projection<G>(g: G, radius: f64, n_max: usize) -> Result<Vec<f64>>
where
    G: Fn(Complex64) -> Complex64 + Sync,
{
    let rule = GaussLegendre::new(16);
    let panels = ((radius / 0.25).ceil() as usize).max(4);
    let (rs, ws) = composite_nodes(0.0, radius, panels, &rule);

    let project = |angles: usize| -> Vec<f64> {
        let mut out = vec![0.0; n_max + 1];
        let mut lag = vec![0.0; n_max + 1];
        for (&r, &w) in rs.iter().zip(&ws) {
            let mut avg = 0.0;
            for k in 0..angles {
                let theta = 2.0 * PI * k as f64 / angles as f64;
                avg += g(Complex64::from_polar(r, theta)).re;
            }
            avg /= angles as f64;
            laguerre_all(r * r, &mut lag);
            let weight = 2.0 * w * r * avg * (-r * r / 2.0).exp();
            for (o, l) in out.iter_mut().zip(&lag) {
                *o += weight * l;
            }
        }
        out
    };

    let mut angles = 64;
    let mut prev = project(angles);
    loop {
        angles *= 2;
        let next = project(angles);
        let diff = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if diff < 1e-13 {
            return Ok(next);
        }
        if angles >= 8192 {
            return Err(Error::QuadratureNonConvergence {
                what: "angular Fock projection",
                estimate: next[0],
                error: diff,
            });
        }
        prev = next;
    }
}

/// `F_n` from the characteristic function: `(1/π)∫ Φ_F*(β) e^{−|β|²/2} L_n(|β|²) d²β`.
pub fn fock_projection(op: &dyn CharFn, n_max: usize) -> Result<Vec<f64>> {
    let radius = op
        .decay_radius()
        .ok_or_else(|| Error::NonIntegrableOperator("operator function does not decay".into()))?;
    laguerre_projection(|beta| op.eval(beta).conj(), radius, n_max)
}
