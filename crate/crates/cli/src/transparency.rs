//! Induced-transparency scenario: a three-level system driven by two
//! potential modes sitting on the 1↔3 and 2↔3 eigen-gaps.
//!
//! The direct integration, the rotating-wave solution, and the
//! double-resonance closed form are evaluated on a common grid so their
//! transition probabilities can be compared point by point, either for a
//! single run or swept over the first mode's frequency.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use stimrwa_core::evolution::{evolve_linear, uniform_grid};
use stimrwa_core::linalg::CMatrix;
use stimrwa_core::neutrino::{build_transparency, units, TransparencySystem};
use stimrwa_core::perturbation::delta_h_at;
use stimrwa_core::rk::{AdaptiveOptions, StepStats};
use stimrwa_core::rwa::three_level_resonant_b;
use stimrwa_core::{FourierMode, IntegerSelection, RwaSolution, RwaSystem};

use crate::config::{TransparencyConfig, TransparencyScanConfig};
use crate::error::CliError;
use crate::report::{complex_pair, ensure_dir, write_csv, write_json};

/// The integer selection that puts every pair of this scenario on
/// resonance: mode 1 bridges 1↔2 (+1) and mode 2 undoes it (−1) while
/// bridging 2↔3 (+1), so 1↔3 is carried by mode 1 alone.
pub fn resonant_selection() -> IntegerSelection {
    IntegerSelection::new(vec![vec![1, 0], vec![-1, 1]])
        .expect("static selection shape is valid")
}

/// Transition probability from labeled state `from` to labeled state
/// `to`, for a flavor-basis evolution operator.
fn labeled_probability(s: &CMatrix, vectors: &CMatrix, to: usize, from: usize) -> f64 {
    let sv = s * vectors.column(from);
    vectors.column(to).dotc(&sv).norm_sqr()
}

/// Everything produced by one transparency run.
#[derive(Debug, Clone)]
pub struct TransparencyOutcome {
    /// The assembled scenario (constant Hamiltonian, labeled basis, modes).
    pub system: TransparencySystem,
    /// 1↔3 and 2↔3 eigen-gaps (erg).
    pub gaps_erg: [f64; 2],
    /// Couplings `[κ12, κ13, κ23]` (cm⁻¹).
    pub kappa_cm_inv: [Complex64; 3],
    /// The same couplings in erg.
    pub kappa_erg: [Complex64; 3],
    /// Resonant Rabi wavenumber `Q = √(|κ13|² + |κ23|²)` (cm⁻¹).
    pub rabi_q_cm_inv: f64,
    /// Closed-form amplitude `1 − |κ23|²/Q²` (0 when both couplings
    /// vanish).
    pub closed_form_amplitude: f64,
    /// Sample positions (cm).
    pub times_cm: Vec<f64>,
    /// Direct-integration transition probability 1→3.
    pub p13_numeric: Vec<f64>,
    /// Rotating-wave `|B₃₁|²`.
    pub p13_rwa: Vec<f64>,
    /// Double-resonance closed form.
    pub p13_closed: Vec<f64>,
    pub max_p13_numeric: f64,
    pub argmax_r_cm: f64,
    pub max_p13_rwa: f64,
    pub max_p13_closed: f64,
    /// Direct-integration step statistics.
    pub stats: StepStats,
}

/// Build the scenario, solve the rotating-wave system on the resonant
/// selection, and integrate the exact dynamics.
pub fn run_transparency(cfg: &TransparencyConfig) -> Result<TransparencyOutcome, CliError> {
    cfg.validate()?;
    let sys = build_transparency(&cfg.params())?;
    let gaps_erg = [units::inv_cm_to_erg(sys.q[0]), units::inv_cm_to_erg(sys.q[1])];

    let sel = resonant_selection();
    let rwa = RwaSystem::new(sys.labeled.basis.clone(), sys.modes.clone())?;
    let sol = rwa.solve(&sel)?;
    let kappa_cm_inv = [sol.kappa[(0, 1)], sol.kappa[(0, 2)], sol.kappa[(1, 2)]];
    let kappa_erg = kappa_cm_inv.map(|k| k * Complex64::from(units::HBAR_C_ERG_CM));
    let q2 = kappa_cm_inv[1].norm_sqr() + kappa_cm_inv[2].norm_sqr();
    let rabi_q_cm_inv = q2.sqrt();
    let closed_form_amplitude = if q2 > 0.0 {
        1.0 - kappa_cm_inv[2].norm_sqr() / q2
    } else {
        0.0
    };

    let times_cm = uniform_grid(0.0, cfg.numerics.r_end_cm, cfg.numerics.samples);
    let opts = AdaptiveOptions::with_tol(cfg.numerics.rtol);
    let (traj, stats) = evolve_linear(
        |r| sys.hamiltonian_at(r),
        3,
        0.0,
        cfg.numerics.r_end_cm,
        &times_cm,
        &opts,
    )?;

    let vectors = &sys.labeled.basis.vectors;
    let p13_numeric: Vec<f64> = traj
        .states
        .iter()
        .map(|s| labeled_probability(s, vectors, 2, 0))
        .collect();
    let p13_rwa: Vec<f64> = times_cm
        .iter()
        .map(|&r| sol.b_at(r)[(2, 0)].norm_sqr())
        .collect();
    let p13_closed: Vec<f64> = if q2 > 0.0 {
        times_cm
            .iter()
            .map(|&r| {
                three_level_resonant_b(kappa_cm_inv[1], kappa_cm_inv[2], &sol.lambda, r)
                    .map(|b| b[(2, 0)].norm_sqr())
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![0.0; times_cm.len()]
    };

    let (argmax_r_cm, max_p13_numeric) = peak(&times_cm, &p13_numeric);
    let (_, max_p13_rwa) = peak(&times_cm, &p13_rwa);
    let (_, max_p13_closed) = peak(&times_cm, &p13_closed);

    Ok(TransparencyOutcome {
        system: sys,
        gaps_erg,
        kappa_cm_inv,
        kappa_erg,
        rabi_q_cm_inv,
        closed_form_amplitude,
        times_cm,
        p13_numeric,
        p13_rwa,
        p13_closed,
        max_p13_numeric,
        argmax_r_cm,
        max_p13_rwa,
        max_p13_closed,
        stats,
    })
}

fn peak(times: &[f64], values: &[f64]) -> (f64, f64) {
    let mut best = (0.0, f64::NEG_INFINITY);
    for (&t, &v) in times.iter().zip(values) {
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

#[derive(Serialize)]
struct GapReport {
    cm_inv: f64,
    erg: f64,
}

#[derive(Serialize)]
struct KappaReport {
    k12: [f64; 2],
    k13: [f64; 2],
    k23: [f64; 2],
}

#[derive(Serialize)]
struct MaxReport {
    numeric: f64,
    rwa: f64,
    closed_form: f64,
}

#[derive(Serialize)]
struct StatsReport {
    accepted: usize,
    rejected: usize,
    rhs_evals: usize,
}

impl From<&StepStats> for StatsReport {
    fn from(s: &StepStats) -> Self {
        StatsReport {
            accepted: s.accepted,
            rejected: s.rejected,
            rhs_evals: s.rhs_evals,
        }
    }
}

#[derive(Serialize)]
struct TransparencyReport {
    scenario: &'static str,
    labels_ambiguous: bool,
    gap_13: GapReport,
    gap_23: GapReport,
    kappa_cm_inv: KappaReport,
    kappa_erg: KappaReport,
    rabi_wavenumber_cm_inv: f64,
    closed_form_amplitude: f64,
    max_p13: MaxReport,
    argmax_r_cm: f64,
    integration: StatsReport,
}

/// Write `probabilities.csv` and `report.json` into `dir`.
pub fn write_transparency(out: &TransparencyOutcome, dir: &Path) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let header: Vec<String> = ["r_cm", "P13_numeric", "P13_rwa", "P13_closed_form"]
        .map(String::from)
        .to_vec();
    let rows = out.times_cm.iter().enumerate().map(|(i, &r)| {
        [r, out.p13_numeric[i], out.p13_rwa[i], out.p13_closed[i]]
    });
    write_csv(&dir.join("probabilities.csv"), &header, rows)?;

    let kap = |ks: &[Complex64; 3]| KappaReport {
        k12: complex_pair(ks[0]),
        k13: complex_pair(ks[1]),
        k23: complex_pair(ks[2]),
    };
    let report = TransparencyReport {
        scenario: "transparency",
        labels_ambiguous: out.system.labeled.ambiguous,
        gap_13: GapReport {
            cm_inv: out.system.q[0],
            erg: out.gaps_erg[0],
        },
        gap_23: GapReport {
            cm_inv: out.system.q[1],
            erg: out.gaps_erg[1],
        },
        kappa_cm_inv: kap(&out.kappa_cm_inv),
        kappa_erg: kap(&out.kappa_erg),
        rabi_wavenumber_cm_inv: out.rabi_q_cm_inv,
        closed_form_amplitude: out.closed_form_amplitude,
        max_p13: MaxReport {
            numeric: out.max_p13_numeric,
            rwa: out.max_p13_rwa,
            closed_form: out.max_p13_closed,
        },
        argmax_r_cm: out.argmax_r_cm,
        integration: (&out.stats).into(),
    };
    write_json(&dir.join("report.json"), &report)
}

/// One scan point: the first mode's frequency and the oscillation
/// amplitudes reached within the scanned span.
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub q1_cm_inv: f64,
    pub amp_numeric: f64,
    pub amp_rwa: f64,
}

/// Result of sweeping the first mode's frequency through the 1↔3
/// resonance.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// The resonant frequency at the center of the window (cm⁻¹).
    pub resonance_q1_cm_inv: f64,
    /// Index of the grid point closest to resonance.
    pub center: usize,
    pub points: Vec<ScanPoint>,
}

/// Sweep `q₁` across a window centered on the 1↔3 gap, recording for
/// each point the maximum 1→3 probability of the direct integration and
/// of the rotating-wave solution.
pub fn run_transparency_scan(cfg: &TransparencyScanConfig) -> Result<ScanOutcome, CliError> {
    cfg.validate()?;
    let sys = build_transparency(&cfg.params())?;
    let q1_res = sys.q[0];
    let half = cfg.scan.window_half_width_cm_inv;
    if q1_res - half <= 0.0 {
        return Err(CliError::Config(format!(
            "scan window half-width {half:.3e} cm⁻¹ reaches below zero frequency (resonance at {q1_res:.3e})"
        )));
    }
    let steps = cfg.scan.steps;
    let q1_grid: Vec<f64> = (0..steps)
        .map(|i| q1_res - half + 2.0 * half * i as f64 / (steps - 1) as f64)
        .collect();
    let center = (0..steps)
        .min_by(|&a, &b| {
            (q1_grid[a] - q1_res)
                .abs()
                .partial_cmp(&(q1_grid[b] - q1_res).abs())
                .unwrap()
        })
        .unwrap();

    let times = uniform_grid(0.0, cfg.scan.r_end_cm, cfg.scan.samples);
    let opts = AdaptiveOptions::with_tol(cfg.scan.rtol);
    let sel = resonant_selection();
    let vectors = sys.labeled.basis.vectors.clone();

    let points: Vec<ScanPoint> = q1_grid
        .par_iter()
        .map(|&q1| -> Result<ScanPoint, CliError> {
            let modes = sys.modes_with_q1(q1)?;
            let amp_numeric = scan_direct_amplitude(&sys, &modes, &vectors, &times, &opts)?;
            let amp_rwa = scan_rwa_amplitude(&sys, modes, &sel, &times)?;
            Ok(ScanPoint {
                q1_cm_inv: q1,
                amp_numeric,
                amp_rwa,
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(ScanOutcome {
        resonance_q1_cm_inv: q1_res,
        center,
        points,
    })
}

fn scan_direct_amplitude(
    sys: &TransparencySystem,
    modes: &[FourierMode],
    vectors: &CMatrix,
    times: &[f64],
    opts: &AdaptiveOptions,
) -> Result<f64, CliError> {
    let (traj, _) = evolve_linear(
        |r| {
            &sys.h_constant
                + delta_h_at(modes, 3, r).expect("modes validated at construction")
        },
        3,
        0.0,
        *times.last().unwrap(),
        times,
        opts,
    )?;
    Ok(traj
        .states
        .iter()
        .map(|s| labeled_probability(s, vectors, 2, 0))
        .fold(0.0, f64::max))
}

fn scan_rwa_amplitude(
    sys: &TransparencySystem,
    modes: Vec<FourierMode>,
    sel: &IntegerSelection,
    times: &[f64],
) -> Result<f64, CliError> {
    let rwa = RwaSystem::new(sys.labeled.basis.clone(), modes)?;
    let sol = rwa.solve(sel)?;
    Ok(times
        .iter()
        .map(|&r| sol.b_at(r)[(2, 0)].norm_sqr())
        .fold(0.0, f64::max))
}

/// Closed-form `B(r)` on exact double resonance, re-exported with the
/// scenario's coupling layout for tests.
pub fn closed_form_b(sol: &RwaSolution, r: f64) -> stimrwa_core::Result<CMatrix> {
    three_level_resonant_b(sol.kappa[(0, 2)], sol.kappa[(1, 2)], &sol.lambda, r)
}

/// Resonant-selection detunings as a vector, for diagnostics: all three
/// pair detunings should vanish on resonance.
pub fn resonant_detunings(sol: &RwaSolution) -> DVector<f64> {
    DVector::from_vec(vec![
        sol.detunings[(0, 1)],
        sol.detunings[(0, 2)],
        sol.detunings[(1, 2)],
    ])
}

#[derive(Serialize)]
struct ScanReport {
    scenario: &'static str,
    resonance_q1_cm_inv: f64,
    window_half_width_cm_inv: f64,
    steps: usize,
    center_index: usize,
    center_amp_numeric: f64,
    min_amp_numeric: f64,
    max_amp_numeric: f64,
}

/// Write `scan.csv` and `report.json` into `dir`.
pub fn write_scan(
    out: &ScanOutcome,
    cfg: &TransparencyScanConfig,
    dir: &Path,
) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let header: Vec<String> = ["q1_cm_inv", "amp_numeric", "amp_rwa"]
        .map(String::from)
        .to_vec();
    let rows = out
        .points
        .iter()
        .map(|p| [p.q1_cm_inv, p.amp_numeric, p.amp_rwa]);
    write_csv(&dir.join("scan.csv"), &header, rows)?;

    let amps: Vec<f64> = out.points.iter().map(|p| p.amp_numeric).collect();
    let report = ScanReport {
        scenario: "transparency-scan",
        resonance_q1_cm_inv: out.resonance_q1_cm_inv,
        window_half_width_cm_inv: cfg.scan.window_half_width_cm_inv,
        steps: cfg.scan.steps,
        center_index: out.center,
        center_amp_numeric: amps[out.center],
        min_amp_numeric: amps.iter().copied().fold(f64::INFINITY, f64::min),
        max_amp_numeric: amps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    write_json(&dir.join("report.json"), &report)
}
