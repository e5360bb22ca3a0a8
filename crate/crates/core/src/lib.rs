//! Evolution of driven N-level quantum systems via a generalized rotating
//! wave approximation (RWA), validated against direct numerical integration
//! of the Schrödinger equation.
//!
//! The library is organized around one pipeline:
//!
//! 1. [`linalg`]: dense complex Hermitian eigendecomposition and unitary
//!    matrix exponentials for small matrices (N ≤ 10).
//! 2. [`perturbation`]: a perturbing Hamiltonian decomposed into Fourier
//!    modes `δH(t) = Σ_a (C_a e^{iq_a t} + C_a† e^{−iq_a t})`, and the
//!    per-mode quantities (diagonal amplitudes/phases, off-diagonal
//!    couplings, pair mixing parameters x/y/z/ψ) that drive the RWA.
//! 3. [`rwa`]: Bessel-series coefficients λ and κ, the rotating-frame
//!    constant Hamiltonian `H^(Ω) = M + Λ`, the resulting evolution operator
//!    `B(t)`, and two/three-level closed forms.
//! 4. [`selection`]: the integer tuples that pick which harmonic of each
//!    mode is kept by the RWA: manual choice, per-pair nearest-resonance
//!    search, exhaustive two-level amplitude scans, and enumeration of
//!    degenerate tuples sharing one detuning.
//! 5. [`evolution`]: ground-truth adaptive Runge-Kutta integration of
//!    `i dS/dt = H(t) S`, including the nonlinear two-species
//!    self-interaction system `H_SI = μ[ρ − α ρ̄*]`.
//! 6. [`spectral`]: fundamental-frequency detection and harmonic
//!    decomposition of recorded Hamiltonian trajectories, closing the loop
//!    from the nonlinear oracle back into the RWA engine.
//! 7. [`fit`]: least-squares `A·sin^(2k)(Q′r)` fits used to compare
//!    numerical transition probabilities against RWA predictions.
//! 8. [`neutrino`]: unit conversions and scenario builders for three-flavor
//!    oscillations in sinusoidally modulated matter and two-flavor
//!    collective self-interactions.
//!
//! All internal energies and wavenumbers are in cm⁻¹ (ħ = c = 1); physical
//! unit conversions live in [`neutrino`].

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values in
// argument validation; index-based loops mirror the matrix subscripts of
// the defining equations.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bessel;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod linalg;
pub mod neutrino;
pub mod perturbation;
pub mod rk;
pub mod rwa;
pub mod selection;
pub mod spectral;

pub use error::{CoreError, Result};
pub use evolution::{SelfInteractionSystem, Trajectory};
pub use linalg::{CMatrix, CVector, EigenSystem};
pub use perturbation::FourierMode;
pub use rk::AdaptiveOptions;
pub use rwa::{RwaSolution, RwaSystem};
pub use selection::{IntegerSelection, Strategy};
