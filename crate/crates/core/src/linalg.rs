//! Dense complex linear algebra for small (N ≤ 10) quantum systems:
//! Hermitian eigendecomposition with a fixed eigenvector phase convention,
//! unitary matrix exponentials, and defect norms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Dense complex matrix, the universal carrier for Hamiltonians, evolution
/// operators and density matrices.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector (flattened matrices for the integrators).
pub type CVector = DVector<Complex64>;

/// The imaginary unit as a `Complex64`.
pub const IM: Complex64 = Complex64 { re: 0.0, im: 1.0 };
/// Complex one.
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
/// Complex zero.
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative Hermiticity tolerance used by [`eig_hermitian`].
pub const HERMITICITY_RTOL: f64 = 1.0e-12;

/// Largest entry modulus, `max_ij |A_ij|`.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Hermiticity defect `max_ij |A_ij − conj(A_ji)|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Unitarity defect `max_ij |(A†A − I)_ij|`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.ncols();
    let mut g = a.adjoint() * a;
    for i in 0..n {
        g[(i, i)] -= ONE;
    }
    max_abs(&g)
}

/// Complex identity matrix of size `n`.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and a unitary
/// matrix whose columns are the eigenvectors.
///
/// Columns follow a fixed phase convention: each is scaled so that its
/// largest-modulus entry is real and positive. This removes the gauge
/// ambiguity of eigenvectors so that derived quantities with physical phase
/// content (such as the RWA couplings κ) are reproducible.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues, ascending unless the system was relabeled.
    pub values: DVector<f64>,
    /// Unitary matrix of eigenvector columns, `A = V diag(values) V†`.
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// Dimension of the decomposed matrix.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuild the decomposed matrix, `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(self.values[i], 0.0)
            } else {
                ZERO
            }
        });
        &self.vectors * d * self.vectors.adjoint()
    }

    /// Unitary propagator `exp(−i A t) = V diag(e^{−i λ t}) V†` of the
    /// decomposed Hermitian matrix `A`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let n = self.dim();
        // V · diag(phase) computed column-wise, then multiplied by V†.
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let phase = Complex64::from_polar(1.0, -self.values[j] * t);
            for i in 0..n {
                scaled[(i, j)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Same decomposition with states reordered by `perm`: new column `k`
    /// is old column `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<EigenSystem> {
        let n = self.dim();
        if perm.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(CoreError::InvalidArgument(format!(
                    "invalid permutation {perm:?}"
                )));
            }
            seen[p] = true;
        }
        let values = DVector::from_fn(n, |k, _| self.values[perm[k]]);
        let vectors = CMatrix::from_fn(n, n, |i, k| self.vectors[(i, perm[k])]);
        Ok(EigenSystem { values, vectors })
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues and the column
/// phase convention described on [`EigenSystem`].
///
/// The input is validated against [`HERMITICITY_RTOL`] (relative to the
/// largest entry) and symmetrized before decomposition so that floating
/// point asymmetry of numerically produced Hamiltonians cannot leak into
/// the eigenvectors.
pub fn eig_hermitian(a: &CMatrix) -> Result<EigenSystem> {
    if a.nrows() != a.ncols() {
        return Err(CoreError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Err(CoreError::InvalidArgument("empty matrix".into()));
    }
    let scale = max_abs(a);
    let tol = HERMITICITY_RTOL * scale.max(f64::MIN_POSITIVE);
    let defect = hermiticity_defect(a);
    if defect > tol {
        return Err(CoreError::NotHermitian { defect, tol });
    }

    // Symmetrize to remove rounding-level asymmetry.
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);

    // Sort ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues are finite")
    });
    let values = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
    let mut vectors = CMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);

    // Phase convention: largest-modulus entry of each column real positive.
    for j in 0..n {
        let mut best = 0usize;
        let mut best_norm = 0.0_f64;
        for i in 0..n {
            let nz = vectors[(i, j)].norm();
            if nz > best_norm {
                best_norm = nz;
                best = i;
            }
        }
        if best_norm > 0.0 {
            let phase = vectors[(best, j)].conj() / Complex64::from(best_norm);
            for i in 0..n {
                vectors[(i, j)] *= phase;
            }
        }
    }

    Ok(EigenSystem { values, vectors })
}

/// `exp(−i A t)` for Hermitian `A`, computed by eigendecomposition.
pub fn expm_hermitian_times(a: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(eig_hermitian(a)?.propagator(t))
}
