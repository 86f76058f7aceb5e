use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigenvalues above `-EIGEN_TOL` count as nonnegative.
const EIGEN_TOL: f64 = 1e-10;

/// Symmetric 4×4 covariance of two modes, ordered `(x₁, p₁, x₂, p₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance(pub [[f64; 4]; 4]);

impl TwoModeCovariance {
    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.0[i][j] == self.0[j][i]))
    }

    /// Two independent modes.
    pub fn product(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][j];
                m[i + 2][j + 2] = b[i][j];
            }
        }
        Self(m)
    }

    /// Eigenvalues of the real symmetric matrix itself, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(4, 4, |i, j| self.0[i][j]);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenvalues of the Hermitian matrix `C + iΩ`, ascending.
    pub fn uncertainty_eigenvalues(&self) -> Vec<f64> {
        // H = A + iB with A = C, B = Ω; the real embedding [[A, −B], [B, A]]
        // carries every eigenvalue of H twice.
        let omega = symplectic_form();
        let big = DMatrix::from_fn(8, 8, |i, j| {
            let (bi, bj) = (i / 4, j / 4);
            let (r, c) = (i % 4, j % 4);
            match (bi, bj) {
                (0, 0) | (1, 1) => self.0[r][c],
                (0, 1) => -omega[r][c],
                _ => omega[r][c],
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(big).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }

    fn has_replicated_blocks(&self) -> bool {
        (0..2).all(|i| {
            (0..2).all(|j| {
                let v = self.0[i][j];
                self.0[i][j + 2] == v && self.0[i + 2][j] == v && self.0[i + 2][j + 2] == v
            })
        })
    }

    /// Determinant of the leading 3×3 block of `C + iΩ` (rows and columns
    /// `x₁, p₁, x₂`). For replicated blocks this is `−V_x`.
    pub fn leading_minor3(&self) -> f64 {
        let omega = symplectic_form();
        let m = |i: usize, j: usize| Complex64::new(self.0[i][j], omega[i][j]);
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        // Hermitian principal minors are real
        det.re
    }
}

/// `Ω = diag(J, J)` with `J = [[0, 1], [−1, 0]]`.
fn symplectic_form() -> [[f64; 4]; 4] {
    let mut o = [[0.0; 4]; 4];
    o[0][1] = 1.0;
    o[1][0] = -1.0;
    o[2][3] = 1.0;
    o[3][2] = -1.0;
    o
}

/// Covariance of the two-mode function `Φ(β′ + β″)`: the single-mode matrix
/// replicated into all four blocks.
pub fn bipartite_covariance(vx: f64, vp: f64, cxp: f64) -> TwoModeCovariance {
    let c1 = [[vx, cxp], [cxp, vp]];
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = c1[i % 2][j % 2];
        }
    }
    TwoModeCovariance(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// Most negative eigenvalue of `C + iΩ`.
    pub min_eigenvalue: f64,
    /// The explicit 3×3 principal minor, reported for replicated-block matrices.
    pub minor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physicality {
    Physical,
    Unphysical(Witness),
}

impl Physicality {
    pub fn is_physical(&self) -> bool {
        matches!(self, Physicality::Physical)
    }
}

/// Tests `C + iΩ ≥ 0`.
pub fn physicality_check(cov: &TwoModeCovariance) -> Physicality {
    let min = cov.uncertainty_eigenvalues()[0];
    if min >= -EIGEN_TOL {
        return Physicality::Physical;
    }
    let minor = cov.has_replicated_blocks().then(|| cov.leading_minor3());
    Physicality::Unphysical(Witness { min_eigenvalue: min, minor })
}
