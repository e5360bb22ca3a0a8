//! Generic rotating-wave runner: the user supplies a constant Hermitian
//! matrix and a list of Fourier modes in any consistent units; the run
//! reports per-pair couplings and samples `B(t)`, optionally next to a
//! direct-integration oracle.

use std::path::Path;

use serde::Serialize;
use stimrwa_core::evolution::{evolve_linear, uniform_grid};
use stimrwa_core::linalg::{eig_hermitian, hermiticity_defect, CMatrix};
use stimrwa_core::perturbation::delta_h_at;
use stimrwa_core::rk::AdaptiveOptions;
use stimrwa_core::selection::{enumerate_degenerate, select_integers, Selected};
use stimrwa_core::{FourierMode, IntegerSelection, RwaSolution, RwaSystem, Strategy};

use crate::config::{parse_matrix, RwaGenericConfig, StrategyKind};
use crate::error::CliError;
use crate::report::{complex_pair, ensure_dir, write_csv, write_json};

/// Degeneracy tolerance relative to the largest mode frequency.
const DEGENERACY_RTOL: f64 = 1e-9;

/// One level pair's rotating-wave characterization.
#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    /// 1-based level indices `(i, j)`, `i < j`.
    pub pair: [usize; 2],
    pub kappa: [f64; 2],
    pub abs_kappa: f64,
    pub detuning_2p: f64,
    /// `Q = √(p² + |κ|²)`.
    pub rabi_q: f64,
}

/// Everything produced by a generic run.
#[derive(Debug, Clone)]
pub struct GenericOutcome {
    pub eigenvalues: Vec<f64>,
    pub selection: IntegerSelection,
    pub grid_points: usize,
    /// Scan amplitude (two-level exhaustive scans only).
    pub scan_amplitude: Option<f64>,
    /// Size of the degenerate family when enumeration was requested.
    pub family_size: Option<usize>,
    pub pairs: Vec<PairSummary>,
    pub times: Vec<f64>,
    /// `|B_ij(t)|²` per sample, row-major.
    pub probabilities: Vec<Vec<f64>>,
    /// Oracle probabilities in the eigenbasis, when requested.
    pub oracle: Option<Vec<Vec<f64>>>,
    pub dim: usize,
    solution: RwaSolution,
}

impl GenericOutcome {
    /// The underlying solution (for tests and further analysis).
    pub fn solution(&self) -> &RwaSolution {
        &self.solution
    }
}

/// Run the generic scenario. `degenerate` sums the κ contributions of
/// the whole degenerate family (two-level systems); `compare_oracle`
/// adds a direct integration in the eigenbasis; `radius` overrides the
/// configured grid radius.
pub fn run_generic(
    cfg: &RwaGenericConfig,
    degenerate: bool,
    compare_oracle: bool,
    radius_override: Option<u32>,
) -> Result<GenericOutcome, CliError> {
    cfg.validate()?;
    let h = parse_matrix(&cfg.hamiltonian, "hamiltonian")?;
    let n = h.nrows();
    if hermiticity_defect(&h) > 1e-10 * h.iter().map(|z| z.norm()).fold(1.0, f64::max) {
        return Err(CliError::Config(
            "hamiltonian must be Hermitian (entries must mirror under conjugate transpose)"
                .into(),
        ));
    }
    let mut modes = Vec::with_capacity(cfg.modes.len());
    for (a, m) in cfg.modes.iter().enumerate() {
        let c = parse_matrix(&m.c, &format!("modes[{a}].c"))?;
        if c.nrows() != n {
            return Err(CliError::Config(format!(
                "modes[{a}].c is {}×{} but the Hamiltonian is {n}×{n}",
                c.nrows(),
                c.ncols()
            )));
        }
        modes.push(FourierMode::new(m.q, c).map_err(|e| CliError::Config(e.to_string()))?);
    }

    let basis = eig_hermitian(&h).map_err(|e| CliError::Config(e.to_string()))?;
    let eigenvalues = basis.values.iter().copied().collect();
    let rwa = RwaSystem::new(basis, modes)?;

    let radius = radius_override
        .or(cfg.selection.radius)
        .unwrap_or(2);
    let strategy = match cfg.selection.strategy {
        StrategyKind::Manual => {
            let rows = cfg
                .selection
                .integers
                .clone()
                .expect("validated: manual strategy carries integers");
            Strategy::Manual(
                IntegerSelection::new(rows).map_err(|e| CliError::Config(e.to_string()))?,
            )
        }
        StrategyKind::NearestResonance => Strategy::NearestResonance,
        StrategyKind::ExhaustiveScan => Strategy::ExhaustiveScan,
    };
    let Selected {
        selection,
        grid_points,
        amplitude,
    } = select_integers(&rwa, strategy, radius).map_err(|e| CliError::Config(e.to_string()))?;

    let (solution, family_size) = if degenerate {
        let family = enumerate_degenerate(&rwa, &selection, radius, DEGENERACY_RTOL)?;
        (rwa.solve_sets(&family, None)?, Some(family.len()))
    } else {
        (rwa.solve(&selection)?, None)
    };

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let kappa = solution.kappa[(i, j)];
            let two_p = solution.detunings[(i, j)];
            let p = 0.5 * two_p;
            pairs.push(PairSummary {
                pair: [i + 1, j + 1],
                kappa: complex_pair(kappa),
                abs_kappa: kappa.norm(),
                detuning_2p: two_p,
                rabi_q: p.hypot(kappa.norm()),
            });
        }
    }

    let times = uniform_grid(0.0, cfg.numerics.t_end, cfg.numerics.samples);
    let probabilities: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| {
            let b = solution.b_at(t);
            flatten_probabilities(&b)
        })
        .collect();

    let oracle = if compare_oracle {
        let vectors = rwa.basis().vectors.clone();
        let opts = AdaptiveOptions::with_tol(cfg.numerics.rtol);
        let modes = rwa.modes().to_vec();
        let (traj, _) = evolve_linear(
            |t| &h + delta_h_at(&modes, n, t).expect("modes validated at construction"),
            n,
            0.0,
            cfg.numerics.t_end,
            &times,
            &opts,
        )?;
        Some(
            traj.states
                .iter()
                .map(|s| {
                    let in_basis = vectors.adjoint() * s * &vectors;
                    flatten_probabilities(&in_basis)
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(GenericOutcome {
        eigenvalues,
        selection,
        grid_points,
        scan_amplitude: amplitude,
        family_size,
        pairs,
        times,
        probabilities,
        oracle,
        dim: n,
        solution,
    })
}

fn flatten_probabilities(b: &CMatrix) -> Vec<f64> {
    let n = b.nrows();
    let mut row = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            row.push(b[(i, j)].norm_sqr());
        }
    }
    row
}

#[derive(Serialize)]
struct GenericReport {
    scenario: &'static str,
    dim: usize,
    eigenvalues: Vec<f64>,
    selection: Vec<Vec<i32>>,
    grid_points: usize,
    scan_amplitude: Option<f64>,
    family_size: Option<usize>,
    pairs: Vec<PairSummary>,
}

/// Write `bt.csv` and `report.json` into `dir`.
pub fn write_generic(out: &GenericOutcome, dir: &Path) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let n = out.dim;
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("P_{i}_{j}"));
        }
    }
    if out.oracle.is_some() {
        for i in 1..=n {
            for j in 1..=n {
                header.push(format!("P_{i}_{j}_oracle"));
            }
        }
    }
    let rows = out.times.iter().enumerate().map(|(idx, &t)| {
        let mut row = Vec::with_capacity(header.len());
        row.push(t);
        row.extend_from_slice(&out.probabilities[idx]);
        if let Some(oracle) = &out.oracle {
            row.extend_from_slice(&oracle[idx]);
        }
        row
    });
    write_csv(&dir.join("bt.csv"), &header, rows)?;

    let selection_rows = (0..out.selection.n_modes())
        .map(|a| out.selection.superdiagonal(a).to_vec())
        .collect();
    let report = GenericReport {
        scenario: "rwa-generic",
        dim: n,
        eigenvalues: out.eigenvalues.clone(),
        selection: selection_rows,
        grid_points: out.grid_points,
        scan_amplitude: out.scan_amplitude,
        family_size: out.family_size,
        pairs: out.pairs.clone(),
    };
    write_json(&dir.join("report.json"), &report)
}
