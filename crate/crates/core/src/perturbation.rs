//! Fourier-decomposed perturbations and their per-mode derived quantities.
//!
//! A perturbing Hamiltonian is represented as
//! `δH(t) = Σ_a (C_a e^{i q_a t} + C_a† e^{−i q_a t})` with `q_a > 0`.
//! Expressed in the eigenbasis `Ŭ` of the unperturbed Hamiltonian, each
//! mode splits into
//!
//! * a diagonal part `diag(Ŭ† C_a Ŭ) = (F_a / 2i) e^{i Φ_a}` with real
//!   amplitudes `f_{a;i} ≥ 0` and phases `φ_{a;i} ∈ (−π, π]`, which is
//!   removed exactly by the phase transformation `Ξ_a(t)`, and
//! * an off-diagonal coupling matrix `G_a = offdiag(Ŭ† C_a Ŭ)`.
//!
//! For every state pair `(i, j)` the accumulated phase difference
//! `δξ_ij(t) = Σ_a [x − z cos(q_a t + ψ)]` is characterized by the mixing
//! parameters `x`, `y`, `z = √(x²+y²)` and `ψ = atan2(y, x)`, which feed
//! the Jacobi-Anger expansion used by the RWA engine.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::linalg::{hermiticity_defect, CMatrix, EigenSystem, ZERO};

/// A single positive-frequency Fourier mode of the perturbation.
///
/// Negative frequencies are folded into the Hermitian-conjugate term, so
/// `q > 0` is an invariant; a constant offset belongs in the unperturbed
/// Hamiltonian, not here.
#[derive(Debug, Clone)]
pub struct FourierMode {
    q: f64,
    c: CMatrix,
}

impl FourierMode {
    /// Create a mode, validating `q > 0` and squareness of `C`.
    pub fn new(q: f64, c: CMatrix) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "mode frequency must be positive and finite, got {q}"
            )));
        }
        if c.nrows() != c.ncols() {
            return Err(CoreError::DimensionMismatch {
                expected: c.nrows(),
                got: c.ncols(),
            });
        }
        Ok(FourierMode { q, c })
    }

    /// Frequency/wavenumber `q` (cm⁻¹).
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Coefficient matrix `C` (cm⁻¹).
    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// System dimension.
    pub fn dim(&self) -> usize {
        self.c.nrows()
    }
}

/// Per-mode data in the unperturbed eigenbasis: diagonal amplitudes `F`,
/// diagonal phases `Φ`, and the off-diagonal coupling matrix `G`.
#[derive(Debug, Clone)]
pub struct ModeEigenData {
    /// Diagonal amplitudes `f_i ≥ 0` (cm⁻¹).
    pub f: Vec<f64>,
    /// Diagonal phases `φ_i ∈ (−π, π]`; 0 where `f_i = 0`.
    pub phi: Vec<f64>,
    /// Off-diagonal couplings; zero diagonal (cm⁻¹).
    pub g: CMatrix,
}

/// Mixing parameters of one mode for one ordered state pair `(i, j)`.
#[derive(Debug, Clone, Copy)]
pub struct PairMixing {
    /// `x = (f_i cos φ_i − f_j cos φ_j) / q` (dimensionless).
    pub x: f64,
    /// `y = (f_i sin φ_i − f_j sin φ_j) / q` (dimensionless).
    pub y: f64,
    /// `z = √(x² + y²)`, the Bessel argument.
    pub z: f64,
    /// `ψ = atan2(y, x)`; 0 when `x = y = 0` (then `z = 0` makes ψ inert).
    pub psi: f64,
}

/// Wrap a phase to the interval `(−π, π]`.
pub fn wrap_phase(p: f64) -> f64 {
    let mut w = p.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    // rem_euclid returns values in [0, 2π); map 0 ↔ −0 noise to exact +0.
    if w == -0.0 {
        w = 0.0;
    }
    w
}

/// Decompose `Ŭ† C Ŭ` into diagonal amplitude/phase data and off-diagonal
/// couplings.
///
/// The diagonal convention is `d_ii = (f_i / 2i) e^{i φ_i}` with `f_i ≥ 0`,
/// i.e. `f_i = 2|d_ii|` and `φ_i = arg(d_ii) + π/2`; entries with
/// `d_ii = 0` get `f_i = 0, φ_i = 0` (the phase is then inert because `f`
/// multiplies every use).
pub fn mode_eigen_data(mode: &FourierMode, basis: &EigenSystem) -> Result<ModeEigenData> {
    let n = basis.dim();
    if mode.dim() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: mode.dim(),
        });
    }
    let d = basis.vectors.adjoint() * mode.c() * &basis.vectors;
    let mut f = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for i in 0..n {
        let dii = d[(i, i)];
        let amp = dii.norm();
        if amp == 0.0 {
            f.push(0.0);
            phi.push(0.0);
        } else {
            f.push(2.0 * amp);
            phi.push(wrap_phase(dii.arg() + PI / 2.0));
        }
    }
    let mut g = d;
    for i in 0..n {
        g[(i, i)] = ZERO;
    }
    Ok(ModeEigenData { f, phi, g })
}

/// Mixing parameters for the ordered pair `(i, j)`, `i ≠ j`.
pub fn pair_mixing(data: &ModeEigenData, q: f64, i: usize, j: usize) -> Result<PairMixing> {
    if i == j {
        return Err(CoreError::InvalidArgument(
            "pair mixing requires two distinct states".into(),
        ));
    }
    let n = data.f.len();
    if i >= n || j >= n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: i.max(j) + 1,
        });
    }
    if !(q > 0.0) {
        return Err(CoreError::InvalidArgument(format!(
            "mode frequency must be positive, got {q}"
        )));
    }
    let x = (data.f[i] * data.phi[i].cos() - data.f[j] * data.phi[j].cos()) / q;
    let y = (data.f[i] * data.phi[i].sin() - data.f[j] * data.phi[j].sin()) / q;
    let z = x.hypot(y);
    let psi = if x == 0.0 && y == 0.0 {
        0.0
    } else {
        y.atan2(x)
    };
    Ok(PairMixing { x, y, z, psi })
}

/// Accumulated per-state phases `ξ_i(t) = (f_i/q)[cos φ_i − cos(φ_i + q t)]`
/// of one mode; `ξ(0) = 0`.
pub fn xi_at(data: &ModeEigenData, q: f64, t: f64) -> Vec<f64> {
    data.f
        .iter()
        .zip(&data.phi)
        .map(|(&f, &p)| f / q * (p.cos() - (p + q * t).cos()))
        .collect()
}

/// The full perturbation `δH(t) = Σ_a (C_a e^{i q_a t} + C_a† e^{−i q_a t})`
/// at one instant. An empty mode list yields the zero matrix of dimension
/// `dim`; the result is Hermitian by construction.
pub fn delta_h_at(modes: &[FourierMode], dim: usize, t: f64) -> Result<CMatrix> {
    let mut h = CMatrix::zeros(dim, dim);
    for mode in modes {
        if mode.dim() != dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim,
                got: mode.dim(),
            });
        }
        let phase = Complex64::from_polar(1.0, mode.q() * t);
        // C e^{iqt} + C† e^{−iqt}: accumulate entrywise.
        let n = dim;
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += mode.c()[(i, j)] * phase + mode.c()[(j, i)].conj() * phase.conj();
            }
        }
    }
    debug_assert!(hermiticity_defect(&h) <= 1e-12 * crate::linalg::max_abs(&h).max(1e-300));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, max_abs, IM, ONE};
    use std::f64::consts::FRAC_PI_2;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).max(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        (&raw + raw.adjoint()).scale(0.5)
    }

    #[test]
    fn mode_rejects_non_positive_frequency() {
        assert!(FourierMode::new(0.0, CMatrix::zeros(2, 2)).is_err());
        assert!(FourierMode::new(-1.0, CMatrix::zeros(2, 2)).is_err());
        assert!(FourierMode::new(1.0, CMatrix::zeros(2, 2)).is_ok());
    }

    #[test]
    fn wrap_phase_stays_in_half_open_interval() {
        for &p in &[0.0, PI, -PI, 3.0 * PI, -2.5 * PI, 10.0, -10.0, 1e-17] {
            let w = wrap_phase(p);
            assert!(w > -PI && w <= PI, "wrap({p}) = {w}");
            // Same angle modulo 2π.
            assert!(((w - p) / (2.0 * PI)).rem_euclid(1.0) < 1e-12 || ((w - p) / (2.0 * PI)).rem_euclid(1.0) > 1.0 - 1e-12);
        }
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn purely_offdiagonal_mode_has_zero_f() {
        // In the eigenbasis of a diagonal matrix, Ŭ = I, so C itself must
        // be split: zero diagonal ⇒ F = 0 and G = C.
        let hbreve = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                ZERO
            }
        });
        let basis = eig_hermitian(&hbreve).unwrap();
        let c = CMatrix::from_fn(3, 3, |i, j| {
            if i != j {
                Complex64::new(0.1 * (i + j) as f64, 0.2)
            } else {
                ZERO
            }
        });
        let mode = FourierMode::new(1.0, c.clone()).unwrap();
        let data = mode_eigen_data(&mode, &basis).unwrap();
        assert!(data.f.iter().all(|&f| f == 0.0));
        assert!(data.phi.iter().all(|&p| p == 0.0));
        assert!(max_abs(&(&data.g - &c)) < 1e-15);
    }

    #[test]
    fn diagonal_decomposition_reconstructs_input() {
        // (F/2i) e^{iΦ} + G must reproduce Ŭ†CŬ for random inputs.
        for seed in 1..=6u64 {
            let basis = eig_hermitian(&random_hermitian(3, seed)).unwrap();
            let c = CMatrix::from_fn(3, 3, |i, j| {
                Complex64::new(
                    ((seed as f64) * 0.37 + i as f64 - 0.5 * j as f64).sin(),
                    ((seed as f64) * 0.11 - 2.0 * i as f64 + j as f64).cos(),
                )
            });
            let mode = FourierMode::new(0.7, c.clone()).unwrap();
            let data = mode_eigen_data(&mode, &basis).unwrap();
            let d = basis.vectors.adjoint() * &c * &basis.vectors;
            let mut rebuilt = data.g.clone();
            for i in 0..3 {
                assert!(data.f[i] >= 0.0);
                assert!(data.phi[i] > -PI && data.phi[i] <= PI);
                rebuilt[(i, i)] = Complex64::from(data.f[i] / 2.0)
                    * Complex64::from_polar(1.0, data.phi[i])
                    / IM;
            }
            assert!(
                max_abs(&(&rebuilt - &d)) <= 1e-12 * max_abs(&d).max(1.0),
                "reconstruction failed for seed {seed}"
            );
        }
    }

    #[test]
    fn transparency_style_diagonal_mode_has_phases_pi_over_2() {
        // A real diagonal C in the basis of a real-orthogonal Ŭ gives real
        // positive diagonal d_ii = f/2i e^{iφ} ⇒ φ = π/2 for every state.
        let hbreve = random_hermitian(3, 9).map(|z| Complex64::new(z.re, 0.0));
        let basis = eig_hermitian(&hbreve).unwrap();
        let c = CMatrix::from_fn(3, 3, |i, j| {
            if i == 0 && j == 0 {
                Complex64::new(0.3, 0.0)
            } else {
                ZERO
            }
        });
        let mode = FourierMode::new(1.0, c).unwrap();
        let data = mode_eigen_data(&mode, &basis).unwrap();
        for i in 0..3 {
            // f_i = 2 |Ŭ_{0i}|² · 0.3 / 2 = |Ŭ_{0i}|² · 0.3 … in general
            // f_i = 2|d_ii| with d_ii = |Ŭ_{0i}|²·0.3 real ≥ 0.
            let expect = 2.0 * basis.vectors[(0, i)].norm_sqr() * 0.3;
            assert!((data.f[i] - expect).abs() < 1e-14);
            if data.f[i] > 0.0 {
                assert!((data.phi[i] - FRAC_PI_2).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn pair_mixing_hand_evaluated_case() {
        // f = (1, 2), φ = (0, π/2), q = 2 ⇒ x = 0.5, y = −1, z = √1.25.
        let data = ModeEigenData {
            f: vec![1.0, 2.0],
            phi: vec![0.0, FRAC_PI_2],
            g: CMatrix::zeros(2, 2),
        };
        let m = pair_mixing(&data, 2.0, 0, 1).unwrap();
        assert!((m.x - 0.5).abs() < 1e-15);
        assert!((m.y + 1.0).abs() < 1e-15);
        assert!((m.z - 1.25_f64.sqrt()).abs() < 1e-15);
        assert!((m.psi - (-1.0_f64).atan2(0.5)).abs() < 1e-15);
    }

    #[test]
    fn pair_mixing_degenerate_pair_is_zero() {
        let data = ModeEigenData {
            f: vec![1.3, 1.3],
            phi: vec![0.4, 0.4],
            g: CMatrix::zeros(2, 2),
        };
        let m = pair_mixing(&data, 1.0, 0, 1).unwrap();
        assert_eq!(m.x, 0.0);
        assert_eq!(m.y, 0.0);
        assert_eq!(m.z, 0.0);
        assert_eq!(m.psi, 0.0);
        assert!(pair_mixing(&data, 1.0, 1, 1).is_err());
    }

    #[test]
    fn pair_mixing_antisymmetry() {
        let data = ModeEigenData {
            f: vec![0.7, 1.9, 0.4],
            phi: vec![0.3, -2.0, 1.1],
            g: CMatrix::zeros(3, 3),
        };
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let a = pair_mixing(&data, 1.7, i, j).unwrap();
            let b = pair_mixing(&data, 1.7, j, i).unwrap();
            assert!((a.x + b.x).abs() < 1e-15);
            assert!((a.y + b.y).abs() < 1e-15);
            assert!((a.z - b.z).abs() < 1e-15);
        }
    }

    #[test]
    fn xi_vanishes_at_zero_and_matches_hand_value() {
        let data = ModeEigenData {
            f: vec![2.0, 0.5],
            phi: vec![0.0, FRAC_PI_2],
            g: CMatrix::zeros(2, 2),
        };
        let q = 2.0;
        assert!(xi_at(&data, q, 0.0).iter().all(|&x| x == 0.0));
        // f = q, φ = 0 at t = π/q: ξ = (f/q)(cos 0 − cos π) = 2.
        let xi = xi_at(&data, q, PI / q);
        assert!((xi[0] - 2.0).abs() < 1e-14);
        // φ = π/2 at t = 2π/q: periodic return to zero.
        let xi2 = xi_at(&data, q, 2.0 * PI / q);
        assert!(xi2[1].abs() < 1e-13);
    }

    #[test]
    fn delta_h_single_mode_at_zero_is_c_plus_cdagger() {
        let c = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 0.5));
        let mode = FourierMode::new(3.0, c.clone()).unwrap();
        let h = delta_h_at(&[mode], 2, 0.0).unwrap();
        let expect = &c + c.adjoint();
        assert!(max_abs(&(&h - &expect)) < 1e-15);
    }

    #[test]
    fn delta_h_two_modes_matches_direct_cosine_sum() {
        // Real diagonal coefficients: δH(t) = Σ 2 C_a cos(q_a t).
        let c1 = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                ONE
            } else {
                ZERO
            }
        });
        let c2 = c1.scale(0.35);
        let modes = vec![
            FourierMode::new(1.0, c1.clone()).unwrap(),
            FourierMode::new(2.0_f64.sqrt(), c2.clone()).unwrap(),
        ];
        for &t in &[0.0, 0.9, 4.4, 17.0] {
            let h = delta_h_at(&modes, 2, t).unwrap();
            let direct = c1.scale(2.0 * (1.0 * t).cos()) + c2.scale(2.0 * (2.0_f64.sqrt() * t).cos());
            assert!(max_abs(&(&h - &direct)) < 1e-14);
            assert!(hermiticity_defect(&h) < 1e-14);
        }
    }

    #[test]
    fn delta_h_empty_mode_list_is_zero() {
        let h = delta_h_at(&[], 3, 1.23).unwrap();
        assert_eq!(max_abs(&h), 0.0);
    }

    #[test]
    fn delta_xi_antisymmetry_and_mixing_identity() {
        // δξ_ij(t) = x − z cos(qt + ψ) exactly.
        let data = ModeEigenData {
            f: vec![0.9, 2.2],
            phi: vec![0.7, -1.9],
            g: CMatrix::zeros(2, 2),
        };
        let q = 1.3;
        let m = pair_mixing(&data, q, 0, 1).unwrap();
        for &t in &[0.0, 0.31, 2.7, 9.4] {
            let xi = xi_at(&data, q, t);
            let dxi = xi[0] - xi[1];
            let expect = m.x - m.z * (q * t + m.psi).cos();
            assert!((dxi - expect).abs() < 1e-13, "identity failed at t={t}");
            assert!(((xi[1] - xi[0]) + dxi).abs() < 1e-15);
        }
    }
}
