//! Direct numerical evolution of the evolution operator `S(t)` — the
//! reference against which every rotating-wave result is validated.
//!
//! Two problems are solved here with the adaptive integrator from
//! [`crate::rk`]:
//!
//! * linear: `i S′ = H(t) S` for an arbitrary time-dependent Hermitian
//!   `H(t)`, and
//! * self-coupled: a pair `(S, S̄)` evolving jointly under a Hamiltonian
//!   that depends on the instantaneous states through the density matrices
//!   `ρ = S ρ₀ S†` and `ρ̄ = S̄ ρ̄₀ S̄†`:
//!
//!   ```text
//!   H_c(t) = μ [ S ρ₀ S† − α (S̄ ρ̄₀ S̄†)* ]
//!   i S′  = (H + H_c) S          i S̄′ = (H − H_c*) S̄
//!   ```
//!
//! The coupled pair is integrated as one state vector — no operator
//! splitting — so the nonlinearity is resolved to the same tolerance as
//! the linear part. Units follow the rest of the crate: `t` is a length
//! (cm) and Hamiltonians are wavenumbers (cm⁻¹).

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::{CMatrix, CVector, IM};
use crate::rk::{integrate_sampled, AdaptiveOptions, StepStats};

/// Evolution operators sampled along a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample positions (cm), ascending.
    pub times: Vec<f64>,
    /// `S(t)` at each sample.
    pub states: Vec<CMatrix>,
}

impl Trajectory {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when no samples were recorded.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Transition probability `|S_{to,from}(t)|²` at every sample.
    pub fn probability(&self, to: usize, from: usize) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s[(to, from)].norm_sqr())
            .collect()
    }

    /// Position and value of the largest sampled `|S_{to,from}|²`.
    pub fn max_probability(&self, to: usize, from: usize) -> (f64, f64) {
        let mut best = (self.times[0], 0.0);
        for (t, s) in self.times.iter().zip(&self.states) {
            let p = s[(to, from)].norm_sqr();
            if p > best.1 {
                best = (*t, p);
            }
        }
        best
    }

    /// The last recorded state.
    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectory is never empty")
    }
}

/// `count` evenly spaced samples covering `[t0, t_end]` inclusive.
pub fn uniform_grid(t0: f64, t_end: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "need at least both endpoints");
    let step = (t_end - t0) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|i| t0 + step * i as f64).collect();
    g[count - 1] = t_end;
    g
}

/// Probability matrix `P_ij = |S_ij|²`.
pub fn probabilities(s: &CMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| s[(i, j)].norm_sqr())
}

/// Largest deviation of any row or column sum of `P_ij = |S_ij|²` from 1;
/// zero exactly when the probability matrix is doubly stochastic.
pub fn doubly_stochastic_defect(s: &CMatrix) -> f64 {
    let p = probabilities(s);
    let mut worst = 0.0_f64;
    for i in 0..p.nrows() {
        worst = worst.max((p.row(i).sum() - 1.0).abs());
    }
    for j in 0..p.ncols() {
        worst = worst.max((p.column(j).sum() - 1.0).abs());
    }
    worst
}

fn unflatten(v: &CVector, n: usize) -> CMatrix {
    DMatrixView::from_slice(v.as_slice(), n, n).into_owned()
}

/// Evolve `i S′ = H(t) S` from `S(t0) = I`, sampling `S` at the given
/// ascending positions.
pub fn evolve_linear<H>(
    mut hamiltonian: H,
    dim: usize,
    t0: f64,
    t_end: f64,
    sample_times: &[f64],
    opts: &AdaptiveOptions,
) -> Result<(Trajectory, StepStats)>
where
    H: FnMut(f64) -> CMatrix,
{
    if dim == 0 {
        return Err(CoreError::InvalidArgument("empty system".into()));
    }
    let y0 = CVector::from_iterator(
        dim * dim,
        crate::linalg::identity(dim).iter().copied(),
    );
    let rhs = move |t: f64, y: &CVector, dy: &mut CVector| {
        let h = hamiltonian(t);
        let s = DMatrixView::from_slice(y.as_slice(), dim, dim);
        let mut out = DMatrixViewMut::from_slice(dy.as_mut_slice(), dim, dim);
        out.gemm(-IM, &h, &s, Complex64::from(0.0));
    };
    let (flat, stats) = integrate_sampled(rhs, t0, t_end, &y0, sample_times, opts)?;
    Ok((
        Trajectory {
            times: sample_times.to_vec(),
            states: flat.iter().map(|v| unflatten(v, dim)).collect(),
        },
        stats,
    ))
}

/// A self-coupled two-species problem: constant background Hamiltonian,
/// coupling strength `μ`, asymmetry weight `α`, and the initial density
/// matrices the coupling term is built from.
#[derive(Debug, Clone)]
pub struct SelfInteractionSystem {
    /// Background Hamiltonian `H` (cm⁻¹), shared by both species.
    pub h: CMatrix,
    /// Coupling strength `μ` (cm⁻¹).
    pub mu: f64,
    /// Weight `α` of the conjugate-species term in the coupling.
    pub alpha: f64,
    /// Initial density matrix `ρ₀` for the first species.
    pub rho0: CMatrix,
    /// Initial density matrix `ρ̄₀` for the second species.
    pub rho0_bar: CMatrix,
}

impl SelfInteractionSystem {
    /// Dimension of the single-species Hilbert space.
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for (name, m) in [("h", &self.h), ("rho0", &self.rho0), ("rho0_bar", &self.rho0_bar)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be {n}×{n}"
                )));
            }
        }
        if !self.mu.is_finite() || !self.alpha.is_finite() {
            return Err(CoreError::InvalidArgument(
                "coupling parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    /// The state-dependent coupling `H_c = μ [S ρ₀ S† − α (S̄ ρ̄₀ S̄†)*]`.
    pub fn coupling_at(&self, s: &CMatrix, s_bar: &CMatrix) -> CMatrix {
        let rho = s * &self.rho0 * s.adjoint();
        let rho_bar = s_bar * &self.rho0_bar * s_bar.adjoint();
        (rho - rho_bar.conjugate().scale(self.alpha)).scale(self.mu)
    }

    /// Instantaneous full Hamiltonians `(H + H_c, H − H_c*)`.
    pub fn hamiltonians_at(&self, s: &CMatrix, s_bar: &CMatrix) -> (CMatrix, CMatrix) {
        let hc = self.coupling_at(s, s_bar);
        (&self.h + &hc, &self.h - hc.conjugate())
    }
}

/// Joint trajectory of the coupled pair, with the coupling term sampled
/// along the way.
#[derive(Debug, Clone)]
pub struct CoupledTrajectory {
    /// Sample positions (cm), ascending.
    pub times: Vec<f64>,
    /// First-species evolution operators `S(t)`.
    pub states: Vec<CMatrix>,
    /// Second-species evolution operators `S̄(t)`.
    pub states_bar: Vec<CMatrix>,
    /// Coupling `H_c(t)` rebuilt at each sample (cm⁻¹).
    pub coupling: Vec<CMatrix>,
}

impl CoupledTrajectory {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when no samples were recorded.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|S_{to,from}|²` per sample for the chosen species
    /// (`bar = false` → first species).
    pub fn probability(&self, to: usize, from: usize, bar: bool) -> Vec<f64> {
        let src = if bar { &self.states_bar } else { &self.states };
        src.iter().map(|s| s[(to, from)].norm_sqr()).collect()
    }
}

/// Scratch-buffer right-hand side for the coupled problem; the state
/// vector is `[vec(S); vec(S̄)]` of length `2n²`.
struct CoupledRhs {
    sys: SelfInteractionSystem,
    tmp: CMatrix,
    rho: CMatrix,
    rho_bar: CMatrix,
    h_nu: CMatrix,
    h_nubar: CMatrix,
}

impl CoupledRhs {
    fn new(sys: SelfInteractionSystem) -> Self {
        let n = sys.dim();
        CoupledRhs {
            sys,
            tmp: CMatrix::zeros(n, n),
            rho: CMatrix::zeros(n, n),
            rho_bar: CMatrix::zeros(n, n),
            h_nu: CMatrix::zeros(n, n),
            h_nubar: CMatrix::zeros(n, n),
        }
    }

    /// `dst = a · rho0 · a†` without allocating.
    fn sandwich(tmp: &mut CMatrix, dst: &mut CMatrix, a: DMatrixView<Complex64>, rho0: &CMatrix) {
        tmp.gemm(Complex64::from(1.0), &a, rho0, Complex64::from(0.0));
        let n = dst.nrows();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::from(0.0);
                for k in 0..n {
                    acc += tmp[(i, k)] * a[(j, k)].conj();
                }
                dst[(i, j)] = acc;
            }
        }
    }

    fn eval(&mut self, y: &CVector, dy: &mut CVector) {
        let n = self.sys.dim();
        let nn = n * n;
        let (s_slice, sb_slice) = y.as_slice().split_at(nn);
        let s = DMatrixView::from_slice(s_slice, n, n);
        let sb = DMatrixView::from_slice(sb_slice, n, n);

        Self::sandwich(&mut self.tmp, &mut self.rho, s, &self.sys.rho0);
        Self::sandwich(&mut self.tmp, &mut self.rho_bar, sb, &self.sys.rho0_bar);

        let (mu, alpha) = (self.sys.mu, self.sys.alpha);
        for i in 0..n {
            for j in 0..n {
                let hc = (self.rho[(i, j)] - self.rho_bar[(i, j)].conj().scale(alpha)).scale(mu);
                self.h_nu[(i, j)] = self.sys.h[(i, j)] + hc;
                self.h_nubar[(i, j)] = self.sys.h[(i, j)] - hc.conj();
            }
        }

        let (ds_slice, dsb_slice) = dy.as_mut_slice().split_at_mut(nn);
        let mut ds = DMatrixViewMut::from_slice(ds_slice, n, n);
        ds.gemm(-IM, &self.h_nu, &s, Complex64::from(0.0));
        let mut dsb = DMatrixViewMut::from_slice(dsb_slice, n, n);
        dsb.gemm(-IM, &self.h_nubar, &sb, Complex64::from(0.0));
    }
}

/// Evolve the coupled pair from `S(t0) = S̄(t0) = I`, sampling both
/// operators and the coupling at the given ascending positions.
pub fn evolve_self_interaction(
    sys: &SelfInteractionSystem,
    t0: f64,
    t_end: f64,
    sample_times: &[f64],
    opts: &AdaptiveOptions,
) -> Result<(CoupledTrajectory, StepStats)> {
    sys.validate()?;
    let n = sys.dim();
    let nn = n * n;
    let eye = crate::linalg::identity(n);
    let mut y0 = CVector::zeros(2 * nn);
    for (k, v) in eye.iter().enumerate() {
        y0[k] = *v;
        y0[nn + k] = *v;
    }
    let mut rhs = CoupledRhs::new(sys.clone());
    let f = move |_t: f64, y: &CVector, dy: &mut CVector| rhs.eval(y, dy);
    let (flat, stats) = integrate_sampled(f, t0, t_end, &y0, sample_times, opts)?;

    let mut states = Vec::with_capacity(flat.len());
    let mut states_bar = Vec::with_capacity(flat.len());
    let mut coupling = Vec::with_capacity(flat.len());
    for v in &flat {
        let (s_slice, sb_slice) = v.as_slice().split_at(nn);
        let s = DMatrixView::from_slice(s_slice, n, n).into_owned();
        let sb = DMatrixView::from_slice(sb_slice, n, n).into_owned();
        coupling.push(sys.coupling_at(&s, &sb));
        states.push(s);
        states_bar.push(sb);
    }
    Ok((
        CoupledTrajectory {
            times: sample_times.to_vec(),
            states,
            states_bar,
            coupling,
        },
        stats,
    ))
}
