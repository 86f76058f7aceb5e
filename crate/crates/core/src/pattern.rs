//! Balanced-homodyne pattern functions
//! `f(x, φ) = ∫ db |b| e^{ibx} Φ_F*(i b e^{iφ})` and lookup tables for them.
//!
//! For a displaced radial operator the integral reduces to
//! `f(x, φ) = g(x − 2 Re(α e^{−iφ}))` with
//! `g(y) = (2/π) ∫₀^B b Ω(b) e^{b²/2} cos(b y) db`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{GaussLegendre, QuinticHermite};
use crate::observables::{OperatorSpec, RadialKernel};
use crate::phasespace::CharFn;
use crate::simulate::uniform;

/// Gauss–Legendre order used on every oscillation panel.
pub const PANEL_ORDER: usize = 16;
/// Number of random probes checked against direct evaluation when building a table.
pub const TABLE_PROBES: usize = 1000;
/// Largest accepted table interpolation error.
pub const TABLE_TOLERANCE: f64 = 1e-6;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Panels of width at most `π / ((4 freq + 1) refine)` on `[0, radius]`.
fn panel_count(radius: f64, freq: f64, refine: usize) -> usize {
    let width = PI / (4.0 * freq.abs() + 1.0) / refine.max(1) as f64;
    ((radius / width).ceil() as usize).max(1)
}

fn operator_radius(op: &OperatorSpec) -> Result<f64> {
    op.decay_radius().ok_or_else(|| {
        Error::NonIntegrableOperator(format!("{} has no decaying characteristic function", op.describe()))
    })
}

/// Pattern function value by direct quadrature of the operator's
/// characteristic function.
pub fn pattern_value(op: &OperatorSpec, x: f64, phi: f64) -> Result<f64> {
    pattern_value_refined(op, x, phi, 1)
}

/// As [`pattern_value`] with each quadrature panel split into `refine` pieces.
pub fn pattern_value_refined(op: &OperatorSpec, x: f64, phi: f64, refine: usize) -> Result<f64> {
    Ok(pattern_moments(op, x, phi, refine)?[0])
}

/// `[f, ∂f/∂x, ∂²f/∂x²]` at `(x, φ)`.
pub fn pattern_derivatives(op: &OperatorSpec, x: f64, phi: f64) -> Result<[f64; 3]> {
    pattern_moments(op, x, phi, 1)
}

fn pattern_moments(op: &OperatorSpec, x: f64, phi: f64, refine: usize) -> Result<[f64; 3]> {
    let radius = operator_radius(op)?;
    let freq = x.abs() + 2.0 * op.displacement().norm();
    let panels = panel_count(radius, freq, refine);
    let width = radius / panels as f64;
    let dir = Complex64::i() * Complex64::cis(phi);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for p in 0..panels {
        let lo = p as f64 * width;
        for (b, w) in panel_rule().mapped(lo, lo + width) {
            // b and −b together
            for sb in [b, -b] {
                let term = Complex64::cis(sb * x) * op.eval(dir * sb).conj() * (w * b);
                acc[0] += term;
                acc[1] += term * Complex64::new(0.0, sb);
                acc[2] += term * (-sb * sb);
            }
        }
    }
    let out = [acc[0].re, acc[1].re, acc[2].re];
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::QuadratureNonConvergence { what: "pattern function", estimate: out[0], error: f64::NAN })
    }
}

/// `[g, g', g'']` of the undisplaced radial pattern at `y`.
pub fn radial_pattern(kernel: &dyn RadialKernel, radius: f64, y: f64) -> [f64; 3] {
    let panels = panel_count(radius, y, 1);
    let width = radius / panels as f64;
    let mut acc = [0.0; 3];
    for p in 0..panels {
        let lo = p as f64 * width;
        for (b, w) in panel_rule().mapped(lo, lo + width) {
            let weight = w * b * kernel.weighted(b);
            let (s, c) = (b * y).sin_cos();
            acc[0] += weight * c;
            acc[1] -= weight * b * s;
            acc[2] -= weight * b * b * c;
        }
    }
    acc.map(|v| v * 2.0 / PI)
}

/// Anything that evaluates a pattern function at a quadrature sample.
pub trait PatternEval: Sync {
    fn pattern(&self, x: f64, phi: f64) -> Result<f64>;
}

/// Pattern function of an operator, evaluated by direct quadrature.
#[derive(Debug, Clone)]
pub struct PatternFn {
    op: OperatorSpec,
}

impl PatternFn {
    pub fn new(op: OperatorSpec) -> Result<Self> {
        operator_radius(&op)?;
        Ok(Self { op })
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn eval(&self, x: f64, phi: f64) -> Result<f64> {
        pattern_value(&self.op, x, phi)
    }
}

impl PatternEval for PatternFn {
    fn pattern(&self, x: f64, phi: f64) -> Result<f64> {
        self.eval(x, phi)
    }
}

/// Tabulated pattern function of a displaced radial operator.
///
/// Stores `g(y)`, `g'(y)`, `g''(y)` on a uniform grid and interpolates with
/// quintic Hermite polynomials; the displacement enters only through the
/// shift `y = x − 2 Re(α e^{−iφ})`, so no phase grid is needed.
#[derive(Debug, Clone)]
pub struct PatternTable {
    operator_hash: u64,
    alpha: Complex64,
    x_min: f64,
    x_max: f64,
    table: QuinticHermite,
    probe_error: f64,
}

/// Builds a table covering `x ∈ [x_range.0, x_range.1]` at spacing `dx` and
/// checks it against [`pattern_value`] at [`TABLE_PROBES`] random points.
pub fn build_table(op: &OperatorSpec, x_range: (f64, f64), dx: f64) -> Result<PatternTable> {
    let (x_min, x_max) = x_range;
    if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
        return Err(Error::InvalidConfig(format!("empty pattern-table range [{x_min}, {x_max}]")));
    }
    if !(dx > 0.0 && dx <= x_max - x_min) {
        return Err(Error::InsufficientRange { value: dx, min: 0.0, max: x_max - x_min });
    }
    let radius = operator_radius(op)?;
    let shift = 2.0 * op.displacement().norm();
    let y_min = x_min - shift;
    let count = ((x_max + shift - y_min) / dx).ceil() as usize + 1;
    let kernel = op.kernel().clone();
    let samples = crate::par::map_indexed(count, |i| radial_pattern(kernel.as_ref(), radius, y_min + dx * i as f64));
    let mut table = PatternTable {
        operator_hash: operator_hash(op),
        alpha: op.displacement(),
        x_min,
        x_max,
        table: QuinticHermite::new(y_min, dx, samples),
        probe_error: f64::NAN,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5041_5454);
    let probes: Vec<(f64, f64)> = (0..TABLE_PROBES)
        .map(|_| (x_min + (x_max - x_min) * uniform(&mut rng), PI * uniform(&mut rng)))
        .collect();
    let errors = crate::par::map_indexed(probes.len(), |k| -> Result<f64> {
        let (x, phi) = probes[k];
        Ok((table.eval(x, phi)? - pattern_value(op, x, phi)?).abs())
    });
    let mut worst = 0.0f64;
    for e in errors {
        worst = worst.max(e?);
    }
    table.probe_error = worst;
    if worst > TABLE_TOLERANCE {
        return Err(Error::QuadratureNonConvergence { what: "pattern table probe", estimate: worst, error: worst });
    }
    Ok(table)
}

impl PatternTable {
    pub fn eval(&self, x: f64, phi: f64) -> Result<f64> {
        if !(self.x_min..=self.x_max).contains(&x) {
            return Err(Error::InsufficientRange { value: x, min: self.x_min, max: self.x_max });
        }
        let y = x - 2.0 * (self.alpha * Complex64::cis(-phi)).re;
        self.table.eval(y).ok_or(Error::InsufficientRange {
            value: y,
            min: self.table.x_min(),
            max: self.table.x_max(),
        })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn spacing(&self) -> f64 {
        self.table.spacing()
    }

    pub fn displacement(&self) -> Complex64 {
        self.alpha
    }

    /// Largest deviation from direct evaluation seen at the probe points.
    pub fn probe_error(&self) -> f64 {
        self.probe_error
    }

    pub fn matches(&self, op: &OperatorSpec) -> bool {
        self.operator_hash == operator_hash(op)
    }

    /// Writes the cache file: one header line, one column line, then `y,f,f1,f2` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# tomostat-pattern-table v1 y_min={} dx={} count={} x_min={} x_max={} alpha_re={} alpha_im={} operator={:016x} probe_error={}",
            self.table.x_min(),
            self.table.spacing(),
            self.table.samples().len(),
            self.x_min,
            self.x_max,
            self.alpha.re,
            self.alpha.im,
            self.operator_hash,
            self.probe_error
        )?;
        writeln!(out, "y,f,f1,f2")?;
        let y0 = self.table.x_min();
        for (i, [f, f1, f2]) in self.table.samples().iter().enumerate() {
            writeln!(out, "{},{},{},{}", y0 + self.table.spacing() * i as f64, f, f1, f2)?;
        }
        Ok(())
    }

    /// Reads a cache file written by [`PatternTable::write_csv`]; fails if it
    /// was built for a different operator.
    pub fn read_csv<R: BufRead>(input: R, op: &OperatorSpec) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
        let header = header?;
        let rest = header
            .strip_prefix("# tomostat-pattern-table v1 ")
            .ok_or(Error::Parse { line: 1, msg: "not a v1 pattern table".into() })?;
        let field = |key: &str| -> Result<&str> {
            rest.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .ok_or(Error::Parse { line: 1, msg: format!("missing {key}") })
        };
        let num = |key: &str| -> Result<f64> {
            field(key)?.parse().map_err(|_| Error::Parse { line: 1, msg: format!("bad {key}") })
        };
        let y_min = num("y_min")?;
        let dx = num("dx")?;
        let count = num("count")? as usize;
        let hash = u64::from_str_radix(field("operator")?, 16)
            .map_err(|_| Error::Parse { line: 1, msg: "bad operator hash".into() })?;
        if hash != operator_hash(op) {
            return Err(Error::InvalidConfig(format!(
                "pattern table was built for a different operator than {}",
                op.describe()
            )));
        }
        match lines.next() {
            Some((_, Ok(l))) if l == "y,f,f1,f2" => {}
            _ => return Err(Error::Parse { line: 2, msg: "expected column line y,f,f1,f2".into() }),
        }
        let mut samples = Vec::with_capacity(count);
        for (i, line) in lines {
            let line = line?;
            let cols: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad row {line:?}") })?;
            if cols.len() != 4 {
                return Err(Error::Parse { line: i + 1, msg: "expected 4 columns".into() });
            }
            samples.push([cols[1], cols[2], cols[3]]);
        }
        if samples.len() != count || count < 2 {
            return Err(Error::Parse { line: count + 2, msg: format!("expected {count} rows, found {}", samples.len()) });
        }
        Ok(Self {
            operator_hash: hash,
            alpha: Complex64::new(num("alpha_re")?, num("alpha_im")?),
            x_min: num("x_min")?,
            x_max: num("x_max")?,
            table: QuinticHermite::new(y_min, dx, samples),
            probe_error: num("probe_error")?,
        })
    }
}

impl PatternEval for PatternTable {
    fn pattern(&self, x: f64, phi: f64) -> Result<f64> {
        self.eval(x, phi)
    }
}

/// FNV-1a over the operator's canonical description.
fn operator_hash(op: &OperatorSpec) -> u64 {
    op.describe().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_gk15;
    use crate::observables::{operator_cf, FilterSpec, SKernel};
    use std::sync::Arc;

    fn filter() -> Arc<FilterSpec> {
        static F: OnceLock<Arc<FilterSpec>> = OnceLock::new();
        F.get_or_init(|| Arc::new(FilterSpec::new(1.8).unwrap())).clone()
    }

    fn op(re: f64, im: f64) -> OperatorSpec {
        operator_cf(&filter(), Complex64::new(re, im))
    }

    // 1D adaptive oracle of (2/π)∫ b Ω e^{b²/2} cos(b y) db
    fn oracle(y: f64) -> f64 {
        let f = filter();
        let out = adaptive_gk15(|b| b * f.weighted(b) * (b * y).cos(), 0.0, f.table_end(), 1e-13, 1e-13, 4000);
        assert!(out.converged);
        2.0 / PI * out.value
    }

    #[test]
    fn peak_value_matches_oracle() {
        let o = op(0.0, 0.0);
        let v = pattern_value(&o, 0.0, 0.3).unwrap();
        assert!(v > 0.0);
        assert!((v - oracle(0.0)).abs() < 1e-8, "{v} vs {}", oracle(0.0));
        for y in [0.4, 1.7, -3.2, 7.5] {
            assert!((pattern_value(&o, y, 1.0).unwrap() - oracle(y)).abs() < 1e-8, "y={y}");
        }
    }

    #[test]
    fn phase_independent_without_displacement() {
        let o = op(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for x in [-2.0, 0.0, 1.3] {
            let base = pattern_value(&o, x, 0.0).unwrap();
            for _ in 0..20 {
                let phi = PI * uniform(&mut rng);
                assert!((pattern_value(&o, x, phi).unwrap() - base).abs() < 1e-10 * (1.0 + base.abs()));
            }
        }
    }

    #[test]
    fn shift_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let o0 = op(0.0, 0.0);
        for _ in 0..20 {
            let a = Complex64::new(4.0 * uniform(&mut rng) - 2.0, 4.0 * uniform(&mut rng) - 2.0);
            let x = 10.0 * uniform(&mut rng) - 5.0;
            let phi = PI * uniform(&mut rng);
            let lhs = pattern_value(&op(a.re, a.im), x, phi).unwrap();
            let rhs = pattern_value(&o0, x - 2.0 * (a * Complex64::cis(-phi)).re, phi).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn parity_under_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = 3.0 * uniform(&mut rng) - 1.5;
            let x = 8.0 * uniform(&mut rng) - 4.0;
            let l = pattern_value(&op(a, 0.0), x, 0.0).unwrap();
            let r = pattern_value(&op(-a, 0.0), -x, 0.0).unwrap();
            assert!((l - r).abs() < 1e-10 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn step_halving_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let o = op(0.6, 0.0);
        for _ in 0..100 {
            let x = 16.0 * uniform(&mut rng) - 8.0;
            let phi = PI * uniform(&mut rng);
            let a = pattern_value_refined(&o, x, phi, 1).unwrap();
            let b = pattern_value_refined(&o, x, phi, 2).unwrap();
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let o = op(0.3, -0.2);
        let h = 1e-4;
        for x in [-1.0, 0.2, 2.5] {
            let [f, d1, d2] = pattern_derivatives(&o, x, 0.7).unwrap();
            let fp = pattern_value(&o, x + h, 0.7).unwrap();
            let fm = pattern_value(&o, x - h, 0.7).unwrap();
            assert!((d1 - (fp - fm) / (2.0 * h)).abs() < 1e-5 * (1.0 + d1.abs()));
            assert!((d2 - (fp - 2.0 * f + fm) / (h * h)).abs() < 1e-3 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn distributional_kernel_is_rejected() {
        let wig = OperatorSpec::new(Arc::new(SKernel::wigner()), Complex64::new(0.0, 0.0));
        assert!(matches!(pattern_value(&wig, 0.0, 0.0), Err(Error::NonIntegrableOperator(_))));
        assert!(PatternFn::new(wig).is_err());
    }

    #[test]
    fn table_passes_probe_test() {
        let o = op(0.6, 0.0);
        let t = build_table(&o, (-10.0, 10.0), 0.01).unwrap();
        assert!(t.probe_error() < TABLE_TOLERANCE, "{}", t.probe_error());
        assert!(matches!(t.eval(10.5, 0.0), Err(Error::InsufficientRange { .. })));
        let direct = pattern_value(&o, 1.234, 2.0).unwrap();
        assert!((t.eval(1.234, 2.0).unwrap() - direct).abs() < 1e-6);
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let e = build_table(&op(0.0, 0.0), (-1.0, 1.0), 3.0).unwrap_err();
        assert!(matches!(e, Error::InsufficientRange { .. }));
    }

    #[test]
    fn table_csv_round_trip() {
        let o = op(0.2, 0.1);
        let t = build_table(&o, (-3.0, 3.0), 0.02).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = PatternTable::read_csv(buf.as_slice(), &o).unwrap();
        for x in [-2.9, 0.0, 1.7] {
            assert_eq!(back.eval(x, 0.4).unwrap(), t.eval(x, 0.4).unwrap());
        }
        assert!(matches!(PatternTable::read_csv(buf.as_slice(), &op(0.0, 0.0)), Err(Error::InvalidConfig(_))));
        assert!(matches!(PatternTable::read_csv(&b"junk\n"[..], &o), Err(Error::Parse { line: 1, .. })));
    }
}
