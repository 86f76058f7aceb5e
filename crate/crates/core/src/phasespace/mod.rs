//! Phase-space arithmetic on characteristic functions: Gaussian states,
//! displacements, beamsplitter mixing, detector loss and two-mode covariance
//! physicality.

mod covariance;
mod gaussian;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use covariance::{bipartite_covariance, physicality_check, Physicality, TwoModeCovariance, Witness};
pub use gaussian::{eval_gaussian_cf, GaussianState};

/// A point `β` of phase space.
pub type ComplexAmplitude = Complex64;

/// `|Φ|` below this is treated as zero when choosing integration radii.
pub const CF_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfKind {
    State,
    Observable,
}

/// A characteristic function `Φ(β) = Tr{F D(β)}` of a state or observable.
pub trait CharFn: Send + Sync {
    fn eval(&self, beta: Complex64) -> Complex64;

    fn kind(&self) -> CfKind;

    /// Radius beyond which the function is negligible for integration
    /// purposes. `None` means it does not decay (or is distributional).
    fn decay_radius(&self) -> Option<f64> {
        None
    }

    /// The Gaussian state this function belongs to, if known; lets integrators
    /// use `Φ(β′+β″) = Φ(β′) Φ(β″) e^{−B(β′,β″)}`.
    fn as_gaussian(&self) -> Option<GaussianState> {
        None
    }
}

impl<T: CharFn + ?Sized> CharFn for &T {
    fn eval(&self, beta: Complex64) -> Complex64 {
        (**self).eval(beta)
    }
    fn kind(&self) -> CfKind {
        (**self).kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        (**self).decay_radius()
    }
    fn as_gaussian(&self) -> Option<GaussianState> {
        (**self).as_gaussian()
    }
}

impl<T: CharFn + ?Sized> CharFn for Box<T> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        (**self).eval(beta)
    }
    fn kind(&self) -> CfKind {
        (**self).kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        (**self).decay_radius()
    }
    fn as_gaussian(&self) -> Option<GaussianState> {
        (**self).as_gaussian()
    }
}

impl<T: CharFn + ?Sized> CharFn for Arc<T> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        (**self).eval(beta)
    }
    fn kind(&self) -> CfKind {
        (**self).kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        (**self).decay_radius()
    }
    fn as_gaussian(&self) -> Option<GaussianState> {
        (**self).as_gaussian()
    }
}

/// Wraps a closure as a characteristic function.
pub struct FnCharFn<F> {
    f: F,
    kind: CfKind,
    radius: Option<f64>,
}

impl<F: Fn(Complex64) -> Complex64 + Send + Sync> FnCharFn<F> {
    pub fn new(kind: CfKind, radius: Option<f64>, f: F) -> Self {
        Self { f, kind, radius }
    }
}

impl<F: Fn(Complex64) -> Complex64 + Send + Sync> CharFn for FnCharFn<F> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        (self.f)(beta)
    }
    fn kind(&self) -> CfKind {
        self.kind
    }
    fn decay_radius(&self) -> Option<f64> {
        self.radius
    }
}

/// The identity operator. Its characteristic function is `π δ²(β)`, so it is
/// only usable as a rejection case for integral formulas.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityOperator;

impl CharFn for IdentityOperator {
    fn eval(&self, beta: Complex64) -> Complex64 {
        if beta == Complex64::new(0.0, 0.0) {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
    fn kind(&self) -> CfKind {
        CfKind::Observable
    }
}

/// `exp(β γ* − β* γ)`, the phase picked up under a displacement by `γ`.
pub fn displacement_phase(beta: Complex64, gamma: Complex64) -> Complex64 {
    // β γ* − β* γ = 2i Im(β γ*)
    Complex64::cis(2.0 * (beta * gamma.conj()).im)
}

/// `Φ(β) e^{βγ* − β*γ}`: the function of `D(γ) F D(−γ)`.
#[derive(Debug, Clone)]
pub struct Displaced<C> {
    inner: C,
    gamma: Complex64,
}

pub fn displace_cf<C: CharFn>(cf: C, gamma: ComplexAmplitude) -> Displaced<C> {
    Displaced { inner: cf, gamma }
}

impl<C: CharFn> CharFn for Displaced<C> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        self.inner.eval(beta) * displacement_phase(beta, self.gamma)
    }
    fn kind(&self) -> CfKind {
        self.inner.kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        self.inner.decay_radius()
    }
}

/// Output of a beamsplitter with transmissivity `t` whose second port carries
/// a coherent state of amplitude `tα/r`:
/// `Φ(β; α, t) = Φ₀(tβ) e^{tα*β − tαβ*} e^{−(1−t²)|β|²/2}`.
#[derive(Debug, Clone)]
pub struct BeamsplitterMix<C> {
    inner: C,
    t: f64,
    alpha: Complex64,
}

pub fn beamsplitter_mix_cf<C: CharFn>(cf: C, t: f64, alpha: ComplexAmplitude) -> Result<BeamsplitterMix<C>> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidTransmissivity(t));
    }
    Ok(BeamsplitterMix { inner: cf, t, alpha })
}

impl<C: CharFn> BeamsplitterMix<C> {
    pub fn transmissivity(&self) -> f64 {
        self.t
    }
}

impl<C: CharFn> CharFn for BeamsplitterMix<C> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        let t = self.t;
        self.inner.eval(beta * t)
            * displacement_phase(beta, self.alpha * t)
            * (-(1.0 - t * t) * beta.norm_sqr() / 2.0).exp()
    }
    fn kind(&self) -> CfKind {
        self.inner.kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        mixed_radius(self.inner.decay_radius(), self.t)
    }
}

fn mixed_radius(inner: Option<f64>, t: f64) -> Option<f64> {
    let from_inner = inner.map(|r| r / t);
    let from_vacuum = if t < 1.0 {
        Some((2.0 * (1.0 / CF_TAIL).ln() / (1.0 - t * t)).sqrt())
    } else {
        None
    };
    match (from_inner, from_vacuum) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Detector loss with efficiency `η`: `Φ(√η β) e^{−(1−η)|β|²/2}`.
#[derive(Debug, Clone)]
pub struct Lossy<C> {
    inner: C,
    eta: f64,
}

pub fn apply_loss_cf<C: CharFn>(cf: C, eta: f64) -> Result<Lossy<C>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEfficiency(eta));
    }
    Ok(Lossy { inner: cf, eta })
}

impl<C: CharFn> CharFn for Lossy<C> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        self.inner.eval(beta * self.eta.sqrt()) * (-(1.0 - self.eta) * beta.norm_sqr() / 2.0).exp()
    }
    fn kind(&self) -> CfKind {
        self.inner.kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        mixed_radius(self.inner.decay_radius(), self.eta.sqrt())
    }
}

/// Uniform average over phase rotations, `(1/2π)∫ Φ(β e^{iθ}) dθ`, by the
/// trapezoidal rule (spectrally accurate for periodic integrands).
#[derive(Debug, Clone)]
pub struct PhaseAveraged<C> {
    inner: C,
    points: usize,
}

pub fn phase_average_cf<C: CharFn>(cf: C, points: usize) -> PhaseAveraged<C> {
    PhaseAveraged { inner: cf, points: points.max(1) }
}

impl<C: CharFn> CharFn for PhaseAveraged<C> {
    fn eval(&self, beta: Complex64) -> Complex64 {
        let n = self.points;
        let sum: Complex64 = (0..n)
            .map(|k| self.inner.eval(beta * Complex64::cis(2.0 * PI * k as f64 / n as f64)))
            .sum();
        sum / n as f64
    }
    fn kind(&self) -> CfKind {
        self.inner.kind()
    }
    fn decay_radius(&self) -> Option<f64> {
        self.inner.decay_radius()
    }
}
