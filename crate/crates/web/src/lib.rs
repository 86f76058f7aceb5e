//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! The `Explorer` holds the filter tables (building them takes a fraction of
//! a second) and answers the two theory queries through the radial balanced
//! route, whose mean is `P` itself and which is far cheaper than the generic
//! phase-space integral; `simulate_quadratures`
//! feeds the scatter plot. Each binding wraps a plain Rust function so the
//! logic is testable without a JavaScript host.

use std::sync::Arc;

use tomostat::estimators::Comparison;
use tomostat::observables::FilterSpec;
use tomostat::phasespace::GaussianState;
use tomostat::simulate::{sample_quadratures, ExperimentConfig};
use tomostat::Complex64;
use wasm_bindgen::prelude::*;

/// Largest sample the page may request; keeps the canvas responsive.
pub const MAX_SAMPLES: usize = 200_000;
const MAX_GRID: usize = 2_001;

fn state(vx: f64, vp: f64, cxp: f64) -> Result<GaussianState, String> {
    GaussianState::new(Complex64::new(0.0, 0.0), vx, vp, cxp).map_err(|e| e.to_string())
}

pub struct Core {
    cmp: Comparison,
}

impl Core {
    pub fn new(width: f64, n_max: usize) -> Result<Self, String> {
        let filter = Arc::new(FilterSpec::new(width).map_err(|e| e.to_string())?);
        let cmp = Comparison::new(filter, n_max, n_max.max(60)).map_err(|e| e.to_string())?;
        Ok(Self { cmp })
    }

    /// `P(α)` along the real axis from `start` to `stop`.
    pub fn curve(&self, vx: f64, vp: f64, cxp: f64, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
        if !(step > 0.0 && stop >= start) {
            return Err(format!("bad grid {start}..{stop} step {step}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > MAX_GRID {
            return Err(format!("grid of {count} points exceeds {MAX_GRID}"));
        }
        let st = state(vx, vp, cxp)?;
        (0..count)
            .map(|k| {
                let a = Complex64::new(start + k as f64 * step, 0.0);
                self.cmp.balanced(&st, a).map(|m| m.mean).map_err(|e| e.to_string())
            })
            .collect()
    }

    /// `[P, σ_qm, σ_bhd, σ_unbalanced]` at `α` for `n` measurements.
    pub fn uncertainty(&self, vx: f64, vp: f64, cxp: f64, re: f64, im: f64, n: usize) -> Result<Vec<f64>, String> {
        let st = state(vx, vp, cxp)?;
        let a = Complex64::new(re, im);
        let n = n.max(1);
        let bal = self.cmp.balanced(&st, a).map_err(|e| e.to_string())?;
        let unb = self.cmp.unbalanced(&st, a).map_err(|e| e.to_string())?;
        let qm = self.cmp.quantum(&st, a).map_err(|e| e.to_string())?;
        Ok(vec![bal.mean, qm.std_error(n), bal.std_error(n), unb.std_error(n)])
    }
}

/// Interleaved `x0, φ0, x1, φ1, …` of `n` simulated balanced-homodyne records.
pub fn simulate(vx: f64, vp: f64, cxp: f64, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    if n > MAX_SAMPLES {
        return Err(format!("at most {MAX_SAMPLES} samples"));
    }
    let set = sample_quadratures(&ExperimentConfig::balanced(state(vx, vp, cxp)?, n, seed)).map_err(|e| e.to_string())?;
    Ok(set.samples.iter().flat_map(|s| [s.x, s.phi]).collect())
}

#[wasm_bindgen]
pub struct Explorer {
    core: Core,
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(width: f64, n_max: usize) -> Result<Explorer, JsError> {
        Core::new(width, n_max).map(|core| Explorer { core }).map_err(|e| JsError::new(&e))
    }

    pub fn curve(&self, vx: f64, vp: f64, cxp: f64, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, JsError> {
        self.core.curve(vx, vp, cxp, start, stop, step).map_err(|e| JsError::new(&e))
    }

    pub fn uncertainty(&self, vx: f64, vp: f64, cxp: f64, re: f64, im: f64, n: usize) -> Result<Vec<f64>, JsError> {
        self.core.uncertainty(vx, vp, cxp, re, im, n).map_err(|e| JsError::new(&e))
    }
}

#[wasm_bindgen]
pub fn simulate_quadratures(vx: f64, vp: f64, cxp: f64, n: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    simulate(vx, vp, cxp, n, seed).map_err(|e| JsError::new(&e))
}
