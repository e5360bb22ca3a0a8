//! Neutrino-oscillation model builders: mixing matrices, vacuum
//! Hamiltonians, an oscillating matter potential, and a collective
//! self-interaction setup — all expressed in the crate's internal units
//! (wavenumbers in cm⁻¹, distances in cm) with explicit converters from
//! laboratory units (eV, MeV, erg).

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::{eig_hermitian, CMatrix, EigenSystem};
use crate::perturbation::FourierMode;

/// Unit conversions. `ħc` ties energies to wavenumbers: a particle of
/// energy `E` carries wavenumber `E / ħc`.
pub mod units {
    /// `ħc` in eV·cm.
    pub const HBAR_C_EV_CM: f64 = 1.97327e-5;
    /// One electronvolt in erg.
    pub const ERG_PER_EV: f64 = 1.602177e-12;
    /// `ħc` in erg·cm.
    pub const HBAR_C_ERG_CM: f64 = HBAR_C_EV_CM * ERG_PER_EV;

    /// Energy in erg → wavenumber in cm⁻¹.
    pub fn erg_to_inv_cm(e_erg: f64) -> f64 {
        e_erg / HBAR_C_ERG_CM
    }

    /// Wavenumber in cm⁻¹ → energy in erg.
    pub fn inv_cm_to_erg(k: f64) -> f64 {
        k * HBAR_C_ERG_CM
    }

    /// Energy in eV → wavenumber in cm⁻¹.
    pub fn ev_to_inv_cm(e_ev: f64) -> f64 {
        e_ev / HBAR_C_EV_CM
    }

    /// Two-level oscillation wavenumber `Δm²/4E` in cm⁻¹, from a
    /// mass-squared splitting in eV² and an energy in MeV.
    pub fn osc_wavenumber(dm2_ev2: f64, e_mev: f64) -> f64 {
        ev_to_inv_cm(dm2_ev2 / (4.0 * e_mev * 1.0e6))
    }

    /// Degrees → radians.
    pub fn deg_to_rad(deg: f64) -> f64 {
        deg.to_radians()
    }
}

/// Real three-flavor mixing matrix `U = R23(θ23) R13(θ13) R12(θ12)`
/// (no CP phase); column `i` is mass state `i` in the flavor basis
/// (e, μ, τ).
pub fn build_mixing_matrix(theta12: f64, theta13: f64, theta23: f64) -> CMatrix {
    let (s12, c12) = theta12.sin_cos();
    let (s13, c13) = theta13.sin_cos();
    let (s23, c23) = theta23.sin_cos();
    let rows = [
        [c12 * c13, s12 * c13, s13],
        [
            -s12 * c23 - c12 * s23 * s13,
            c12 * c23 - s12 * s23 * s13,
            s23 * c13,
        ],
        [
            s12 * s23 - c12 * c23 * s13,
            -c12 * s23 - s12 * c23 * s13,
            c23 * c13,
        ],
    ];
    CMatrix::from_fn(3, 3, |i, j| Complex64::from(rows[i][j]))
}

/// Three-flavor vacuum Hamiltonian in the flavor basis (cm⁻¹):
/// `U · diag(m²_i / 2E) · U†` with the middle mass state's `m²` taken as
/// zero, so the two inputs are `m₁² − m₂²` and `m₃² − m₂²` (eV²).
pub fn vacuum_hamiltonian_3f(
    e_mev: f64,
    dm2_12_ev2: f64,
    dm2_32_ev2: f64,
    u: &CMatrix,
) -> CMatrix {
    let two_e_ev = 2.0 * e_mev * 1.0e6;
    let diag = [
        units::ev_to_inv_cm(dm2_12_ev2 / two_e_ev),
        0.0,
        units::ev_to_inv_cm(dm2_32_ev2 / two_e_ev),
    ];
    let mut h = CMatrix::zeros(3, 3);
    for (k, d) in diag.iter().enumerate() {
        let col = u.column(k);
        for i in 0..3 {
            for j in 0..3 {
                h[(i, j)] += col[i] * col[j].conj() * Complex64::from(*d);
            }
        }
    }
    h
}

/// Two-flavor vacuum Hamiltonian in the flavor basis (cm⁻¹) for a
/// splitting `Δm²` (eV²), energy `E` (MeV), and mixing angle `θ`:
/// `k₁·[[cos2θ, −sin2θ], [−sin2θ, −cos2θ]]` with `k₁ = Δm²/4E`, whose
/// eigenpairs are `(cosθ, −sinθ) ↔ +k₁` and `(sinθ, cosθ) ↔ −k₁`.
pub fn vacuum_hamiltonian_2f(e_mev: f64, dm2_ev2: f64, theta: f64) -> CMatrix {
    let k1 = units::osc_wavenumber(dm2_ev2, e_mev);
    let (s2, c2) = (2.0 * theta).sin_cos();
    CMatrix::from_fn(2, 2, |i, j| {
        Complex64::from(match (i, j) {
            (0, 0) => k1 * c2,
            (1, 1) => -k1 * c2,
            _ => -k1 * s2,
        })
    })
}

/// Reference eigenvectors of the two-flavor vacuum Hamiltonian: column 1
/// is the upper (+k₁) state, column 2 the lower one.
pub fn vacuum_basis_2f(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_fn(2, 2, |i, j| {
        Complex64::from(match (i, j) {
            (0, 0) => c,
            (1, 0) => -s,
            (0, 1) => s,
            _ => c,
        })
    })
}

/// An eigenbasis whose states have been matched to reference vectors.
#[derive(Debug, Clone)]
pub struct LabeledBasis {
    /// The relabeled eigensystem (state `i` best matches reference
    /// column `i`).
    pub basis: EigenSystem,
    /// `permutation[i]` is the original ascending-order index of the
    /// eigenvector now labeled `i`.
    pub permutation: Vec<usize>,
    /// Set when some assignment was decided by less than `10⁻⁶` of
    /// overlap — labels are then convention, not physics.
    pub ambiguous: bool,
}

/// Relabel eigenstates by greatest overlap with reference vectors,
/// assigning reference columns in order (greedy). Flags the result as
/// ambiguous when a choice was closer than `10⁻⁶` in overlap magnitude.
pub fn label_states(sys: &EigenSystem, reference: &CMatrix) -> Result<LabeledBasis> {
    let n = sys.dim();
    if reference.nrows() != n || reference.ncols() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: reference.nrows(),
        });
    }
    const AMBIGUITY: f64 = 1e-6;
    let mut taken = vec![false; n];
    let mut permutation = vec![0usize; n];
    let mut ambiguous = false;
    for j in 0..n {
        let r = reference.column(j);
        let mut best: Option<(f64, usize)> = None;
        let mut second = 0.0_f64;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let overlap = sys.vectors.column(i).dotc(&r).norm();
            match best {
                Some((b, _)) if overlap <= b => second = second.max(overlap),
                _ => {
                    if let Some((b, _)) = best {
                        second = second.max(b);
                    }
                    best = Some((overlap, i));
                }
            }
        }
        let (b, i) = best.expect("n ≥ 1 unused states remain");
        if b - second < AMBIGUITY {
            ambiguous = true;
        }
        taken[i] = true;
        permutation[j] = i;
    }
    Ok(LabeledBasis {
        basis: sys.permuted(&permutation)?,
        permutation,
        ambiguous,
    })
}

/// Inputs for the oscillating-matter-potential (induced transparency)
/// scenario. Angles in radians; the potential in erg.
#[derive(Debug, Clone)]
pub struct TransparencyParams {
    /// Neutrino energy (MeV).
    pub e_mev: f64,
    /// `m₁² − m₂²` (eV²).
    pub dm2_12_ev2: f64,
    /// `m₃² − m₂²` (eV²).
    pub dm2_32_ev2: f64,
    /// Mixing angles (radians).
    pub theta12: f64,
    /// Mixing angles (radians).
    pub theta13: f64,
    /// Mixing angles (radians).
    pub theta23: f64,
    /// Static matter potential `V*` (erg), acting on the electron flavor.
    pub v_star_erg: f64,
    /// Relative amplitude of the first oscillating potential component.
    pub a1: f64,
    /// Relative amplitude of the second oscillating potential component.
    pub a2: f64,
}

/// The assembled transparency scenario: a constant flavor Hamiltonian
/// with a labeled eigenbasis, plus two electron-flavor perturbation
/// modes whose frequencies sit exactly on the 1↔3 and 2↔3 eigen-gaps.
#[derive(Debug, Clone)]
pub struct TransparencySystem {
    /// Vacuum mixing matrix (flavor ← mass).
    pub u: CMatrix,
    /// Constant flavor-basis Hamiltonian `H_vac + V*·P_e` (cm⁻¹).
    pub h_constant: CMatrix,
    /// Its eigenbasis, labeled by dominant mass content.
    pub labeled: LabeledBasis,
    /// Mode frequencies `[q₁, q₂]` (cm⁻¹): the 1↔3 and 2↔3 gaps.
    pub q: [f64; 2],
    /// The oscillating potential components as perturbation modes.
    pub modes: Vec<FourierMode>,
    /// Potential strength `V*` (cm⁻¹).
    pub v_star: f64,
    /// Relative mode amplitudes `[A₁, A₂]`.
    pub amplitudes: [f64; 2],
}

impl TransparencySystem {
    /// Rebuild the mode list with the first mode's frequency replaced
    /// (for detuning scans); the second mode stays on resonance.
    pub fn modes_with_q1(&self, q1: f64) -> Result<Vec<FourierMode>> {
        Ok(vec![
            FourierMode::new(q1, self.modes[0].c().clone())?,
            self.modes[1].clone(),
        ])
    }

    /// Full flavor-basis Hamiltonian at distance `r` (cm⁻¹, cm).
    pub fn hamiltonian_at(&self, r: f64) -> CMatrix {
        let mut h = self.h_constant.clone();
        for mode in &self.modes {
            let phase = Complex64::from_polar(1.0, mode.q() * r);
            let c = mode.c();
            for i in 0..3 {
                for j in 0..3 {
                    h[(i, j)] += c[(i, j)] * phase + c[(j, i)].conj() * phase.conj();
                }
            }
        }
        h
    }
}

/// Assemble the transparency scenario: eigen-decompose the constant
/// Hamiltonian, label its states by mass content, and place the two
/// potential modes exactly on the 1↔3 and 2↔3 gaps.
pub fn build_transparency(p: &TransparencyParams) -> Result<TransparencySystem> {
    let u = build_mixing_matrix(p.theta12, p.theta13, p.theta23);
    let v_star = units::erg_to_inv_cm(p.v_star_erg);
    let mut h = vacuum_hamiltonian_3f(p.e_mev, p.dm2_12_ev2, p.dm2_32_ev2, &u);
    h[(0, 0)] += Complex64::from(v_star);
    let labeled = label_states(&eig_hermitian(&h)?, &u)?;
    let k = &labeled.basis.values;
    let q = [k[2] - k[0], k[2] - k[1]];
    if !(q[0] > 0.0) || !(q[1] > 0.0) {
        return Err(CoreError::Numerical(
            "labeled eigenvalues are not ordered; mode frequencies would be invalid".into(),
        ));
    }
    let mut modes = Vec::with_capacity(2);
    for (a, &qa) in [p.a1, p.a2].iter().zip(&q) {
        let mut c = CMatrix::zeros(3, 3);
        c[(0, 0)] = Complex64::from(0.5 * v_star * a);
        modes.push(FourierMode::new(qa, c)?);
    }
    Ok(TransparencySystem {
        u,
        h_constant: h,
        labeled,
        q,
        modes,
        v_star,
        amplitudes: [p.a1, p.a2],
    })
}

/// Inputs for the two-flavor collective self-interaction scenario.
#[derive(Debug, Clone)]
pub struct SelfIntParams {
    /// Neutrino energy (MeV).
    pub e_mev: f64,
    /// Mass-squared splitting (eV²).
    pub dm2_ev2: f64,
    /// Vacuum mixing angle (radians).
    pub theta: f64,
    /// Self-coupling strength `μ` (erg).
    pub mu_erg: f64,
    /// Antineutrino weight `α` in the coupling.
    pub alpha: f64,
}

/// Build the coupled two-species system: both species start as pure
/// electron flavor (`ρ₀ = ρ̄₀ = diag(1, 0)`) and share the two-flavor
/// vacuum Hamiltonian. Also returns the vacuum oscillation wavenumber
/// `k₁ = Δm²/4E` (cm⁻¹).
pub fn build_self_interaction(
    p: &SelfIntParams,
) -> (crate::evolution::SelfInteractionSystem, f64) {
    let h = vacuum_hamiltonian_2f(p.e_mev, p.dm2_ev2, p.theta);
    let k1 = units::osc_wavenumber(p.dm2_ev2, p.e_mev);
    let mut rho0 = CMatrix::zeros(2, 2);
    rho0[(0, 0)] = Complex64::from(1.0);
    (
        crate::evolution::SelfInteractionSystem {
            h,
            mu: units::erg_to_inv_cm(p.mu_erg),
            alpha: p.alpha,
            rho0: rho0.clone(),
            rho0_bar: rho0,
        },
        k1,
    )
}

/// Map first-species perturbation modes to the second species: the
/// species sees `−H_c*`, so a mode coefficient `C` becomes `−Cᵀ`
/// (the coefficient of `e^{+iqt}` in `−(C e^{iqt} + C† e^{−iqt})*`).
pub fn conjugate_species_modes(modes: &[FourierMode]) -> Result<Vec<FourierMode>> {
    modes
        .iter()
        .map(|m| FourierMode::new(m.q(), -m.c().transpose()))
        .collect()
}

/// Map the constant (non-oscillating) part of the first species'
/// coupling to the second species: `C₀ → −C₀*`.
pub fn conjugate_species_constant(c0: &CMatrix) -> CMatrix {
    -c0.conjugate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_defect};
    use approx::assert_relative_eq;

    const THETA12: f64 = 34.0 * std::f64::consts::PI / 180.0;
    const THETA13: f64 = 9.0 * std::f64::consts::PI / 180.0;
    const THETA23: f64 = 45.0 * std::f64::consts::PI / 180.0;

    fn standard_params() -> TransparencyParams {
        TransparencyParams {
            e_mev: 5.0,
            dm2_12_ev2: -7.5e-5,
            dm2_32_ev2: 2.32e-3,
            theta12: THETA12,
            theta13: THETA13,
            theta23: THETA23,
            v_star_erg: 6.0e-25,
            a1: 0.1,
            a2: 0.5,
        }
    }

    #[test]
    fn unit_conversions() {
        // 1 erg ↔ cm⁻¹ round trip and the documented magnitudes.
        assert_relative_eq!(
            units::erg_to_inv_cm(3.16152e-17),
            1.0,
            max_relative = 1e-5
        );
        assert_relative_eq!(
            units::inv_cm_to_erg(units::erg_to_inv_cm(1.0e-21)),
            1.0e-21,
            max_relative = 1e-14
        );
        // Benchmark oscillation wavenumber: Δm² = 2.43e-3 eV² at 20 MeV.
        assert_relative_eq!(
            units::osc_wavenumber(2.43e-3, 20.0),
            1.53932e-6,
            max_relative = 1e-5
        );
        assert_relative_eq!(units::deg_to_rad(180.0), std::f64::consts::PI);
    }

    #[test]
    fn mixing_matrix_is_orthogonal_with_standard_entries() {
        let u = build_mixing_matrix(THETA12, THETA13, THETA23);
        assert!(unitarity_defect(&u) < 1e-14);
        // Independently computed first row and (3,3) entry.
        assert_relative_eq!(
            u[(0, 0)].re,
            THETA12.cos() * THETA13.cos(),
            max_relative = 1e-14
        );
        assert_relative_eq!(u[(0, 2)].re, THETA13.sin(), max_relative = 1e-14);
        assert_relative_eq!(
            u[(2, 2)].re,
            THETA23.cos() * THETA13.cos(),
            max_relative = 1e-14
        );
        // Real matrix.
        assert!(u.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn vacuum_3f_has_prescribed_mass_spectrum() {
        let u = build_mixing_matrix(THETA12, THETA13, THETA23);
        let h = vacuum_hamiltonian_3f(5.0, -7.5e-5, 2.32e-3, &u);
        let eig = eig_hermitian(&h).unwrap();
        // Ascending eigenvalues are m²/2E for m² ∈ {−7.5e-5, 0, 2.32e-3}.
        let two_e = 2.0 * 5.0e6;
        let expect = [-7.5e-5 / two_e, 0.0, 2.32e-3 / two_e];
        for (got, want_ev) in eig.values.iter().zip(expect) {
            assert_relative_eife(*got, units::ev_to_inv_cm(want_ev));
        }
        // In the θ13, θ12 → 0 limit, flavor e is pure mass-1.
        let u0 = build_mixing_matrix(0.0, 0.0, THETA23);
        let h0 = vacuum_hamiltonian_3f(5.0, -7.5e-5, 2.32e-3, &u0);
        assert_relative_eq!(
            h0[(0, 0)].re,
            units::ev_to_inv_cm(-7.5e-5 / two_e),
            max_relative = 1e-12
        );
        assert!(h0[(0, 1)].norm() < 1e-20);
    }

    // Exact-or-relative comparison that tolerates the zero eigenvalue.
    fn assert_relative_eife(got: f64, want: f64) {
        if want == 0.0 {
            assert!(got.abs() < 1e-18, "expected ~0, got {got:.3e}");
        } else {
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn label_states_tracks_reference_order() {
        // A diagonal Hamiltonian with shuffled diagonal: labeling against
        // the identity must undo the eigenvalue sort.
        let h = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::from([0.5, -0.2, 0.1][i])
            } else {
                Complex64::from(0.0)
            }
        });
        let labeled = label_states(&eig_hermitian(&h).unwrap(), &crate::linalg::identity(3))
            .unwrap();
        assert!(!labeled.ambiguous);
        assert_relative_eq!(labeled.basis.values[0], 0.5);
        assert_relative_eq!(labeled.basis.values[1], -0.2);
        assert_relative_eq!(labeled.basis.values[2], 0.1);
        for j in 0..3 {
            assert!(labeled.basis.vectors[(j, j)].norm() > 0.999);
        }
    }

    #[test]
    fn label_states_flags_ambiguity() {
        // Reference at 45° between two eigenvectors: overlaps tie.
        let h = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::from(if i == 0 { 1.0 } else { -1.0 })
            } else {
                Complex64::from(0.0)
            }
        });
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let reference = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::from(match (i, j) {
                (0, 0) => s,
                (1, 0) => s,
                (0, 1) => s,
                _ => -s,
            })
        });
        let labeled = label_states(&eig_hermitian(&h).unwrap(), &reference).unwrap();
        assert!(labeled.ambiguous);
    }

    #[test]
    fn transparency_modes_sit_on_eigen_gaps() {
        let sys = build_transparency(&standard_params()).unwrap();
        let k = &sys.labeled.basis.values;
        assert_relative_eq!(sys.q[0], k[2] - k[0], max_relative = 1e-14);
        assert_relative_eq!(sys.q[1], k[2] - k[1], max_relative = 1e-14);
        assert!(sys.q[0] > sys.q[1]);
        // Mode coefficients: (V*·A/2) on the electron-flavor projector.
        for (mode, a) in sys.modes.iter().zip([0.1, 0.5]) {
            assert_relative_eq!(
                mode.c()[(0, 0)].re,
                0.5 * sys.v_star * a,
                max_relative = 1e-14
            );
            let mut rest = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    if (i, j) != (0, 0) {
                        rest += mode.c()[(i, j)].norm();
                    }
                }
            }
            assert_eq!(rest, 0.0);
        }
        // The labeled basis keeps mass-dominance: |⟨U_i|v_i⟩| largest.
        for i in 0..3 {
            let overlap = sys
                .labeled
                .basis
                .vectors
                .column(i)
                .dotc(&sys.u.column(i))
                .norm();
            assert!(overlap > 0.9, "state {i} overlap {overlap}");
        }
        assert!(!sys.labeled.ambiguous);
    }

    #[test]
    fn transparency_gap_magnitudes_in_lab_units() {
        // The two resonance gaps for the standard inputs, converted back
        // to erg; sanity anchors for downstream validation.
        let sys = build_transparency(&standard_params()).unwrap();
        assert_relative_eq!(
            units::inv_cm_to_erg(sys.q[0]),
            3.8334e-22,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            units::inv_cm_to_erg(sys.q[1]),
            3.71531e-22,
            max_relative = 1e-3
        );
    }

    #[test]
    fn transparency_hamiltonian_at_combines_modes() {
        let sys = build_transparency(&standard_params()).unwrap();
        let r = 5.0e8;
        let h = sys.hamiltonian_at(r);
        assert!(crate::linalg::hermiticity_defect(&h) < 1e-18);
        let expect = sys.h_constant[(0, 0)].re
            + sys.v_star * 0.1 * (sys.q[0] * r).cos()
            + sys.v_star * 0.5 * (sys.q[1] * r).cos();
        assert_relative_eq!(h[(0, 0)].re, expect, max_relative = 1e-12);
        assert_relative_eq!(
            h[(1, 2)].re,
            sys.h_constant[(1, 2)].re,
            max_relative = 1e-12
        );
        // Scan helper replaces only the first frequency.
        let shifted = sys.modes_with_q1(sys.q[0] * 1.01).unwrap();
        assert_relative_eq!(shifted[0].q(), sys.q[0] * 1.01);
        assert_relative_eq!(shifted[1].q(), sys.q[1]);
        assert!(max_abs(&(shifted[0].c() - sys.modes[0].c())) == 0.0);
    }

    #[test]
    fn two_flavor_vacuum_and_reference_basis() {
        let theta = 1.0_f64.to_radians();
        let h = vacuum_hamiltonian_2f(20.0, 2.43e-3, theta);
        let k1 = units::osc_wavenumber(2.43e-3, 20.0);
        let basis = vacuum_basis_2f(theta);
        assert!(unitarity_defect(&basis) < 1e-14);
        // Column 1 is the +k₁ eigenvector, column 2 the −k₁ one.
        let hv1 = &h * basis.column(0);
        let hv2 = &h * basis.column(1);
        for i in 0..2 {
            assert_relative_eq!(hv1[i].re, k1 * basis[(i, 0)].re, max_relative = 1e-10);
            assert_relative_eq!(hv2[i].re, -k1 * basis[(i, 1)].re, max_relative = 1e-10);
        }
        // Small angle: electron flavor is mostly the upper state.
        assert!(basis[(0, 0)].re > 0.999);
    }

    #[test]
    fn self_interaction_builder_values() {
        let (sys, k1) = build_self_interaction(&SelfIntParams {
            e_mev: 20.0,
            dm2_ev2: 2.43e-3,
            theta: 1.0_f64.to_radians(),
            mu_erg: 1.682e-21,
            alpha: 0.8,
        });
        assert_relative_eq!(k1, 1.53932e-6, max_relative = 1e-5);
        assert_relative_eq!(sys.mu, 5.3202e-5, max_relative = 1e-4);
        assert_eq!(sys.alpha, 0.8);
        assert_eq!(sys.rho0[(0, 0)], Complex64::from(1.0));
        assert_eq!(sys.rho0[(1, 1)], Complex64::from(0.0));
        assert_eq!(sys.rho0, sys.rho0_bar);
        assert!(crate::linalg::hermiticity_defect(&sys.h) < 1e-18);
    }

    #[test]
    fn species_conjugation_identities() {
        let c = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new((i + 2 * j) as f64 * 0.1, (i as f64) - 0.3 * j as f64)
        });
        let modes = vec![FourierMode::new(0.7, c.clone()).unwrap()];
        let conj = conjugate_species_modes(&modes).unwrap();
        assert_eq!(conj.len(), 1);
        assert_relative_eq!(conj[0].q(), 0.7);
        // −Cᵀ entrywise.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(conj[0].c()[(i, j)], -c[(j, i)]);
            }
        }
        // The full oscillating signal maps to −(signal)*: check at a
        // couple of phases.
        for &t in &[0.3, 1.9] {
            let phase = Complex64::from_polar(1.0, 0.7 * t);
            let orig = CMatrix::from_fn(2, 2, |i, j| {
                c[(i, j)] * phase + c[(j, i)].conj() * phase.conj()
            });
            let mapped = CMatrix::from_fn(2, 2, |i, j| {
                conj[0].c()[(i, j)] * phase + conj[0].c()[(j, i)].conj() * phase.conj()
            });
            assert!(max_abs(&(mapped + orig.conjugate())) < 1e-14);
        }
        let c0 = CMatrix::from_fn(2, 2, |i, j| Complex64::new(0.2 * i as f64, 0.1 * j as f64));
        let mapped0 = conjugate_species_constant(&c0);
        assert!(max_abs(&(&mapped0 + c0.conjugate())) == 0.0);
    }
}
