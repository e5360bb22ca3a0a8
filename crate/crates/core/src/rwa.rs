//! The rotating-wave-approximation engine.
//!
//! In the interaction picture, each Fourier mode contributes to the pair
//! `(i, j)` a Jacobi-Anger series with coefficients
//!
//! * `λ_{a,m;ij} = (−i)^m e^{ix} J_m(z) e^{imψ}` (diagonal dressing), and
//! * `κ_{a,m;ij} = (−i)^m e^{ix} [G*_{a;ji} J_{m+1}(z) e^{i(m+1)ψ}
//!    − G_{a;ij} J_{m−1}(z) e^{i(m−1)ψ}]` (transition coupling),
//!
//! where `x, z, ψ` are the pair-mixing parameters of the mode. Keeping a
//! single integer harmonic `n_{a;ij}` per mode (the RWA) collapses the
//! interaction-picture Hamiltonian to
//! `H^(B)_{ij}(t) = −i κ_ij e^{i(δk̆_ij + Σ_a n_{a;ij} q_a) t}` with
//! `κ_ij = Σ_a κ_{a,n_a;ij} Π_{b≠a} λ_{b,n_b;ij}`. That factorizes as
//! `H^(B)(t) = Υ(t) M Υ†(t)` with `Υ = e^{iΛt}`, so the evolution operator
//! is exactly `B(t) = e^{iΛt} exp(−i(M + Λ)t)` with `B(0) = I`.
//!
//! Selections whose detunings coincide (possible for commensurate mode
//! frequencies) contribute additively to κ; see
//! [`crate::selection::enumerate_degenerate`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bessel::bessel_j;
use crate::error::{CoreError, Result};
use crate::linalg::{CMatrix, EigenSystem, IM, ONE, ZERO};
use crate::perturbation::{mode_eigen_data, pair_mixing, FourierMode, ModeEigenData, PairMixing};
use crate::selection::IntegerSelection;

/// `(−i)^m` for any integer `m`.
fn pow_neg_i(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => ONE,
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Diagonal-dressing coefficient `λ_m = (−i)^m e^{ix} J_m(z) e^{imψ}`.
pub fn lambda_coeff(z: f64, psi: f64, x: f64, m: i32) -> Complex64 {
    pow_neg_i(m) * Complex64::from_polar(1.0, x + m as f64 * psi) * Complex64::from(bessel_j(m, z))
}

/// Transition coefficient
/// `κ_m = (−i)^m e^{ix} [G*_ji J_{m+1}(z) e^{i(m+1)ψ} − G_ij J_{m−1}(z) e^{i(m−1)ψ}]`.
pub fn kappa_coeff(
    g_ij: Complex64,
    g_ji: Complex64,
    z: f64,
    psi: f64,
    x: f64,
    m: i32,
) -> Complex64 {
    let t1 = g_ji.conj()
        * Complex64::from(bessel_j(m + 1, z))
        * Complex64::from_polar(1.0, (m + 1) as f64 * psi);
    let t2 = g_ij
        * Complex64::from(bessel_j(m - 1, z))
        * Complex64::from_polar(1.0, (m - 1) as f64 * psi);
    pow_neg_i(m) * Complex64::from_polar(1.0, x) * (t1 - t2)
}

/// An unperturbed system plus its Fourier perturbation, with all per-mode,
/// per-pair quantities precomputed: the starting point for RWA solutions.
#[derive(Debug, Clone)]
pub struct RwaSystem {
    basis: EigenSystem,
    modes: Vec<FourierMode>,
    data: Vec<ModeEigenData>,
    /// Flattened `[a][i*n + j]` pair mixing (diagonal slots are inert zeros).
    mix: Vec<Vec<PairMixing>>,
    fundamental: Option<f64>,
    multiples: Option<Vec<i64>>,
}

impl RwaSystem {
    /// Assemble from an eigenbasis (any state labeling) and modes.
    pub fn new(basis: EigenSystem, modes: Vec<FourierMode>) -> Result<Self> {
        let n = basis.dim();
        if n < 2 {
            return Err(CoreError::InvalidArgument(
                "need at least two levels".into(),
            ));
        }
        let mut data = Vec::with_capacity(modes.len());
        let mut mix = Vec::with_capacity(modes.len());
        for mode in &modes {
            let d = mode_eigen_data(mode, &basis)?;
            let mut rows = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        rows.push(PairMixing {
                            x: 0.0,
                            y: 0.0,
                            z: 0.0,
                            psi: 0.0,
                        });
                    } else {
                        rows.push(pair_mixing(&d, mode.q(), i, j)?);
                    }
                }
            }
            data.push(d);
            mix.push(rows);
        }
        Ok(RwaSystem {
            basis,
            modes,
            data,
            mix,
            fundamental: None,
            multiples: None,
        })
    }

    /// Declare that every mode frequency is an integer multiple of `q1`,
    /// enabling exact integer arithmetic in degeneracy decisions.
    pub fn with_fundamental(mut self, q1: f64) -> Result<Self> {
        if !(q1 > 0.0) {
            return Err(CoreError::InvalidArgument(
                "fundamental must be positive".into(),
            ));
        }
        let mut multiples = Vec::with_capacity(self.modes.len());
        for mode in &self.modes {
            let ratio = mode.q() / q1;
            let m = ratio.round();
            if m < 1.0 || (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
                return Err(CoreError::InvalidArgument(format!(
                    "mode frequency {:.6e} is not an integer multiple of {:.6e}",
                    mode.q(),
                    q1
                )));
            }
            multiples.push(m as i64);
        }
        self.fundamental = Some(q1);
        self.multiples = Some(multiples);
        Ok(self)
    }

    /// Number of levels.
    pub fn n_levels(&self) -> usize {
        self.basis.dim()
    }

    /// Number of Fourier modes.
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// The eigenbasis this system is expressed in.
    pub fn basis(&self) -> &EigenSystem {
        &self.basis
    }

    /// The perturbation modes.
    pub fn modes(&self) -> &[FourierMode] {
        &self.modes
    }

    /// Frequency of mode `a`.
    pub fn mode_q(&self, a: usize) -> f64 {
        self.modes[a].q()
    }

    /// Declared fundamental, if any.
    pub fn fundamental(&self) -> Option<f64> {
        self.fundamental
    }

    /// Integer multiples `q_a / q1` when a fundamental is declared.
    pub fn harmonic_multiples(&self) -> Option<&[i64]> {
        self.multiples.as_deref()
    }

    /// Pair-mixing parameters of mode `a` for pair `(i, j)`.
    pub fn mixing(&self, a: usize, i: usize, j: usize) -> &PairMixing {
        &self.mix[a][i * self.n_levels() + j]
    }

    /// Eigenvalue difference `δk̆_ij = k̆_i − k̆_j`.
    pub fn delta_k(&self, i: usize, j: usize) -> f64 {
        self.basis.values[i] - self.basis.values[j]
    }

    /// Off-diagonal coupling `G_{a;ij}`.
    pub fn g(&self, a: usize, i: usize, j: usize) -> Complex64 {
        self.data[a].g[(i, j)]
    }

    /// Single-mode coefficient `λ_{a,m;ij}`.
    pub fn lambda_single(&self, a: usize, m: i32, i: usize, j: usize) -> Complex64 {
        let mx = self.mixing(a, i, j);
        lambda_coeff(mx.z, mx.psi, mx.x, m)
    }

    /// Single-mode coefficient `κ_{a,m;ij}`.
    pub fn kappa_single(&self, a: usize, m: i32, i: usize, j: usize) -> Complex64 {
        let mx = self.mixing(a, i, j);
        kappa_coeff(self.g(a, i, j), self.g(a, j, i), mx.z, mx.psi, mx.x, m)
    }

    /// RWA coupling for one pair:
    /// `κ_ij = Σ_a κ_{a,n_a;ij} Π_{b≠a} λ_{b,n_b;ij}`.
    pub fn kappa_pair(&self, sel: &IntegerSelection, i: usize, j: usize) -> Complex64 {
        let k = self.n_modes();
        let mut total = ZERO;
        for a in 0..k {
            let mut term = self.kappa_single(a, sel.full(a, i, j), i, j);
            if term == ZERO {
                continue;
            }
            for b in 0..k {
                if b != a {
                    term *= self.lambda_single(b, sel.full(b, i, j), i, j);
                }
            }
            total += term;
        }
        total
    }

    /// Residual pair detuning `2p_ij = δk̆_ij + Σ_a n_{a;ij} q_a`.
    pub fn detuning(&self, sel: &IntegerSelection, i: usize, j: usize) -> f64 {
        let mut d = self.delta_k(i, j);
        for a in 0..self.n_modes() {
            d += sel.full(a, i, j) as f64 * self.mode_q(a);
        }
        d
    }

    /// Rotating-frame diagonal `Λ_ii = k̆_i + Σ_a n_{a;i} q_a` with the
    /// anchor `n_{a;N} = 0`, optionally shifted by a constant per-mode
    /// offset (which leaves all transition probabilities invariant).
    pub fn build_lambda(&self, sel: &IntegerSelection, anchor_offsets: Option<&[i32]>) -> DVector<f64> {
        let n = self.n_levels();
        let mut lambda = DVector::from_fn(n, |i, _| self.basis.values[i]);
        for a in 0..self.n_modes() {
            let per_state = sel.per_state(a);
            let shift = anchor_offsets.map_or(0, |o| o[a]);
            for i in 0..n {
                lambda[i] += (per_state[i] + shift) as f64 * self.mode_q(a);
            }
        }
        lambda
    }

    /// Two-level summary for a selection: `(κ, 2p, Q, |κ|²/Q²)`.
    ///
    /// `Q = √(p² + |κ|²)` is the Rabi wavenumber; the last entry is the
    /// transition-probability amplitude (0 when `Q = 0`, i.e. no coupling
    /// and no detuning).
    pub fn two_level_metrics(&self, sel: &IntegerSelection) -> (Complex64, f64, f64, f64) {
        debug_assert_eq!(self.n_levels(), 2);
        let kappa = self.kappa_pair(sel, 0, 1);
        let two_p = self.detuning(sel, 0, 1);
        let p = 0.5 * two_p;
        let q = p.hypot(kappa.norm());
        let amp = if q > 0.0 {
            (kappa.norm() / q).powi(2)
        } else {
            0.0
        };
        (kappa, two_p, q, amp)
    }

    /// Solve the RWA for one selection.
    pub fn solve(&self, sel: &IntegerSelection) -> Result<RwaSolution> {
        self.solve_sets(std::slice::from_ref(sel), None)
    }

    /// Solve the RWA for a family of degenerate selections whose κ
    /// contributions add; `family[0]` fixes Λ and the detunings. Optional
    /// per-mode anchor offsets shift Λ uniformly (for invariance checks).
    pub fn solve_sets(
        &self,
        family: &[IntegerSelection],
        anchor_offsets: Option<&[i32]>,
    ) -> Result<RwaSolution> {
        let n = self.n_levels();
        let k = self.n_modes();
        let base = family
            .first()
            .ok_or_else(|| CoreError::InvalidArgument("empty selection family".into()))?;
        if base.n_modes() != k {
            return Err(CoreError::DimensionMismatch {
                expected: k,
                got: base.n_modes(),
            });
        }
        if base.pair_count() != n - 1 {
            return Err(CoreError::DimensionMismatch {
                expected: n - 1,
                got: base.pair_count(),
            });
        }
        if let Some(offsets) = anchor_offsets {
            if offsets.len() != k {
                return Err(CoreError::DimensionMismatch {
                    expected: k,
                    got: offsets.len(),
                });
            }
        }
        // Degenerate members must share the base's detuning on every pair.
        let q_scale = (0..k).map(|a| self.mode_q(a)).fold(0.0_f64, f64::max);
        for sel in &family[1..] {
            if sel.n_modes() != k || sel.pair_count() != n - 1 {
                return Err(CoreError::InvalidArgument(
                    "family members have inconsistent shape".into(),
                ));
            }
            for p in 0..n - 1 {
                let d0 = self.detuning(base, p, p + 1);
                let d1 = self.detuning(sel, p, p + 1);
                if (d1 - d0).abs() > 1e-9 * q_scale.max(d0.abs()) {
                    return Err(CoreError::InvalidArgument(format!(
                        "family member detuning differs on pair ({p},{}): {d1:.6e} vs {d0:.6e}",
                        p + 1
                    )));
                }
            }
        }

        let mut kappa = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut sum = ZERO;
                for sel in family {
                    sum += self.kappa_pair(sel, i, j);
                }
                kappa[(i, j)] = sum;
            }
        }
        let lambda = self.build_lambda(base, anchor_offsets);
        let mut detunings = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    detunings[(i, j)] = self.detuning(base, i, j);
                }
            }
        }
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                m[(i, j)] = -IM * kappa[(i, j)];
                m[(j, i)] = IM * kappa[(i, j)].conj();
            }
        }
        let mut h_omega = m.clone();
        for i in 0..n {
            h_omega[(i, i)] += Complex64::from(lambda[i]);
        }
        let omega_eig = crate::linalg::eig_hermitian(&h_omega)?;
        Ok(RwaSolution {
            selection: base.clone(),
            family_size: family.len(),
            kappa,
            detunings,
            lambda,
            m,
            h_omega,
            omega_eig,
        })
    }
}

/// A solved RWA: couplings, rotating-frame matrices, and the `B(t)`
/// evaluator.
#[derive(Debug, Clone)]
pub struct RwaSolution {
    /// The (base) selection used.
    pub selection: IntegerSelection,
    /// Number of degenerate selections summed into κ (1 for a single set).
    pub family_size: usize,
    /// Strictly-upper-triangular couplings κ_ij (cm⁻¹).
    pub kappa: CMatrix,
    /// Pair detunings `2p_ij` (antisymmetric, cm⁻¹).
    pub detunings: DMatrix<f64>,
    /// Rotating-frame diagonal Λ (cm⁻¹).
    pub lambda: DVector<f64>,
    /// Coupling matrix M (Hermitian, zero diagonal).
    pub m: CMatrix,
    /// Constant rotating-frame Hamiltonian `H^(Ω) = M + Λ`.
    pub h_omega: CMatrix,
    omega_eig: EigenSystem,
}

impl RwaSolution {
    /// Evolution operator `B(t) = e^{iΛt} exp(−i H^(Ω) t)`, `B(0) = I`.
    pub fn b_at(&self, t: f64) -> CMatrix {
        let n = self.lambda.len();
        let mut b = self.omega_eig.propagator(t);
        for i in 0..n {
            let phase = Complex64::from_polar(1.0, self.lambda[i] * t);
            for j in 0..n {
                b[(i, j)] *= phase;
            }
        }
        b
    }

    /// The RWA-truncated interaction-picture Hamiltonian
    /// `H^(B)(t) = Υ(t) M Υ†(t)` at one instant.
    pub fn h_b_at(&self, t: f64) -> CMatrix {
        let n = self.lambda.len();
        CMatrix::from_fn(n, n, |i, j| {
            self.m[(i, j)] * Complex64::from_polar(1.0, (self.lambda[i] - self.lambda[j]) * t)
        })
    }

    /// Two-level summary `(κ, p, Q, amplitude)`.
    pub fn two_level_summary(&self) -> Option<(Complex64, f64, f64, f64)> {
        if self.lambda.len() != 2 {
            return None;
        }
        let kappa = self.kappa[(0, 1)];
        let p = 0.5 * self.detunings[(0, 1)];
        let q = p.hypot(kappa.norm());
        let amp = if q > 0.0 {
            (kappa.norm() / q).powi(2)
        } else {
            0.0
        };
        Some((kappa, p, q, amp))
    }
}

/// Closed-form two-level transition probability
/// `P12(t) = (|κ|²/Q²) sin²(Qt)` with `Q = √(p² + |κ|²)`, `p = detuning/2`.
/// Returns `(P12, Q)`.
pub fn two_level_closed_form(kappa: Complex64, detuning_2p: f64, t: f64) -> (f64, f64) {
    let p = 0.5 * detuning_2p;
    let k2 = kappa.norm_sqr();
    let q = p.hypot(kappa.norm());
    if q == 0.0 {
        return (0.0, 0.0);
    }
    ((k2 / (q * q)) * (q * t).sin().powi(2), q)
}

/// Closed-form three-level `B(r)` on exact double resonance (Λ uniform):
/// with `v = (κ13, κ23)ᵀ` and `Q² = |v|²`,
///
/// ```text
/// B = [ I + v v† (cos Qr − 1)/Q²   −v sin(Qr)/Q ]
///     [      v† sin(Qr)/Q            cos Qr     ]
/// ```
///
/// so `P13 = (1 − |κ23|²/Q²) sin²(Qr)`: the 1→3 transition is suppressed
/// by the 2↔3 coupling (induced transparency).
pub fn three_level_resonant_b(
    kappa13: Complex64,
    kappa23: Complex64,
    lambda: &DVector<f64>,
    r: f64,
) -> Result<CMatrix> {
    if lambda.len() != 3 {
        return Err(CoreError::DimensionMismatch {
            expected: 3,
            got: lambda.len(),
        });
    }
    let spread = lambda.max() - lambda.min();
    let scale = lambda.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if spread > 1e-6 * scale.max(f64::MIN_POSITIVE) {
        return Err(CoreError::InvalidArgument(format!(
            "closed form requires exact double resonance; Λ spread {spread:.3e} vs scale {scale:.3e}"
        )));
    }
    let q2 = kappa13.norm_sqr() + kappa23.norm_sqr();
    if q2 == 0.0 {
        return Err(CoreError::InvalidArgument(
            "three-level closed form undefined for zero couplings".into(),
        ));
    }
    let q = q2.sqrt();
    let c = (q * r).cos();
    let s_over_q = (q * r).sin() / q;
    let v = [kappa13, kappa23];
    let mut b = CMatrix::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { ONE } else { ZERO };
            b[(i, j)] = delta + v[i] * v[j].conj() * Complex64::from((c - 1.0) / q2);
        }
        b[(i, 2)] = -v[i] * Complex64::from(s_over_q);
        b[(2, i)] = v[i].conj() * Complex64::from(s_over_q);
    }
    b[(2, 2)] = Complex64::from(c);
    Ok(b)
}
