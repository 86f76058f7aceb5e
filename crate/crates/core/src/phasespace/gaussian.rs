use num_complex::Complex64;

use super::{displacement_phase, CfKind, CharFn, ComplexAmplitude, CF_TAIL};
use crate::error::{Error, Result};

/// Slack on the uncertainty bound `V_x V_p − C_xp² ≥ 1`.
const PHYSICALITY_SLACK: f64 = 1e-12;

/// Single-mode Gaussian state: coherent amplitude `⟨a⟩` plus the quadrature
/// covariance `[[V_x, C_xp], [C_xp, V_p]]` in units where the vacuum has
/// variance 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    mean: Complex64,
    vx: f64,
    vp: f64,
    cxp: f64,
}

impl GaussianState {
    pub fn new(mean: ComplexAmplitude, vx: f64, vp: f64, cxp: f64) -> Result<Self> {
        if !(mean.re.is_finite() && mean.im.is_finite() && vx.is_finite() && vp.is_finite() && cxp.is_finite()) {
            return Err(Error::InvalidState("non-finite parameter".into()));
        }
        if vx <= 0.0 || vp <= 0.0 {
            return Err(Error::InvalidState(format!("variances must be positive (V_x={vx}, V_p={vp})")));
        }
        let det = vx * vp - cxp * cxp;
        if det < 1.0 - PHYSICALITY_SLACK {
            return Err(Error::InvalidState(format!(
                "V_x V_p - C_xp^2 = {det} violates the uncertainty bound 1"
            )));
        }
        Ok(Self { mean, vx, vp, cxp })
    }

    pub fn vacuum() -> Self {
        Self { mean: Complex64::new(0.0, 0.0), vx: 1.0, vp: 1.0, cxp: 0.0 }
    }

    pub fn coherent(alpha: ComplexAmplitude) -> Self {
        Self { mean: alpha, ..Self::vacuum() }
    }

    /// Zero-mean squeezed state with principal variances along x and p.
    pub fn squeezed(vx: f64, vp: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), vx, vp, 0.0)
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }
    pub fn vx(&self) -> f64 {
        self.vx
    }
    pub fn vp(&self) -> f64 {
        self.vp
    }
    pub fn cxp(&self) -> f64 {
        self.cxp
    }

    /// `⟨x_φ⟩ = 2 Re(⟨a⟩ e^{−iφ})`.
    pub fn quadrature_mean(&self, phi: f64) -> f64 {
        2.0 * (self.mean * Complex64::cis(-phi)).re
    }

    /// `V(φ) = V_x cos²φ + V_p sin²φ + 2 C_xp sinφ cosφ`.
    pub fn quadrature_variance(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.vx * c * c + self.vp * s * s + 2.0 * self.cxp * s * c
    }

    /// Smallest eigenvalue of the quadrature covariance matrix.
    pub fn min_variance(&self) -> f64 {
        let tr = self.vx + self.vp;
        let disc = ((self.vx - self.vp).powi(2) + 4.0 * self.cxp * self.cxp).sqrt();
        0.5 * (tr - disc)
    }

    pub fn max_variance(&self) -> f64 {
        let tr = self.vx + self.vp;
        let disc = ((self.vx - self.vp).powi(2) + 4.0 * self.cxp * self.cxp).sqrt();
        0.5 * (tr + disc)
    }

    /// State after loss with efficiency `η`: `V → ηV + (1−η)`, `⟨a⟩ → √η⟨a⟩`.
    pub fn after_loss(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency(eta));
        }
        Ok(self.mixed(eta.sqrt(), Complex64::new(0.0, 0.0)))
    }

    /// Beamsplitter output for transmissivity `t` and coherent input `tα/r`.
    pub fn after_beamsplitter(&self, t: f64, alpha: ComplexAmplitude) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidTransmissivity(t));
        }
        Ok(self.mixed(t, alpha))
    }

    fn mixed(&self, t: f64, alpha: Complex64) -> Self {
        let t2 = t * t;
        Self {
            mean: (self.mean + alpha) * t,
            vx: t2 * self.vx + 1.0 - t2,
            vp: t2 * self.vp + 1.0 - t2,
            cxp: t2 * self.cxp,
        }
    }

    /// `D(γ) ρ D(−γ)`.
    pub fn displaced(&self, gamma: ComplexAmplitude) -> Self {
        Self { mean: self.mean + gamma, ..*self }
    }

    pub fn char_fn(&self, beta: Complex64) -> Complex64 {
        eval_gaussian_cf(self, beta)
    }
}

/// `Φ(β)` for a Gaussian state. Writing `β = i b e^{iφ}` this is
/// `exp(i b ⟨x_φ⟩ − b² V(φ)/2)`; in Cartesian form `b cosφ = Im β` and
/// `b sinφ = −Re β`.
pub fn eval_gaussian_cf(state: &GaussianState, beta: ComplexAmplitude) -> Complex64 {
    let u = beta.im;
    let v = -beta.re;
    let quad = state.vx * u * u + state.vp * v * v + 2.0 * state.cxp * u * v;
    displacement_phase(beta, state.mean) * (-0.5 * quad).exp()
}

impl CharFn for GaussianState {
    fn eval(&self, beta: Complex64) -> Complex64 {
        eval_gaussian_cf(self, beta)
    }
    fn kind(&self) -> CfKind {
        CfKind::State
    }
    fn decay_radius(&self) -> Option<f64> {
        Some((2.0 * (1.0 / CF_TAIL).ln() / self.min_variance()).sqrt())
    }
    fn as_gaussian(&self) -> Option<GaussianState> {
        Some(*self)
    }
}

impl GaussianState {
    /// Symmetric bilinear form with `Φ(β′+β″) = Φ(β′) Φ(β″) e^{−B(β′,β″)}`.
    pub fn cf_cross_term(&self, b1: Complex64, b2: Complex64) -> f64 {
        let (u1, v1) = (b1.im, -b1.re);
        let (u2, v2) = (b2.im, -b2.re);
        self.vx * u1 * u2 + self.vp * v1 * v2 + self.cxp * (u1 * v2 + v1 * u2)
    }
}
