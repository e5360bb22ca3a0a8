//! Collective self-interaction scenario.
//!
//! Pipeline: integrate the coupled two-species system once over an
//! exploratory span to detect the fundamental period of its coupling
//! term, re-integrate over a whole number of periods, decompose the
//! recorded coupling into harmonics, promote the strongest lines to
//! perturbation modes, and solve the rotating-wave system per species —
//! including an exhaustive integer-set scan, degenerate-set enumeration,
//! and a `sin`-power fit of the numeric transition probability.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use stimrwa_core::evolution::{evolve_linear, evolve_self_interaction, uniform_grid, CoupledTrajectory};
use stimrwa_core::fit::{fit_sin_power, SinPowerFit};
use stimrwa_core::linalg::{eig_hermitian, max_abs, CMatrix};
use stimrwa_core::neutrino::{
    build_self_interaction, conjugate_species_constant, conjugate_species_modes, label_states,
    units, vacuum_basis_2f,
};
use stimrwa_core::perturbation::delta_h_at;
use stimrwa_core::rk::{AdaptiveOptions, StepStats};
use stimrwa_core::rwa::two_level_closed_form;
use stimrwa_core::selection::{enumerate_degenerate, select_integers, Selected};
use stimrwa_core::spectral::{decompose, detect_fundamental, FundamentalDetection, ModeSpectrum};
use stimrwa_core::{FourierMode, RwaSystem, Strategy};

use crate::config::SelfIntConfig;
use crate::error::CliError;
use crate::report::{
    complex_pair, ensure_dir, matrix_columns, matrix_pairs, matrix_row, write_csv, write_json,
};

/// Tolerance for degenerate-set enumeration without a declared
/// fundamental (relative to the largest mode frequency).
const DEGENERACY_RTOL: f64 = 1e-9;

/// The recorded coupled evolution: exploratory detection plus the
/// production run over a whole number of fundamental periods.
#[derive(Debug, Clone)]
pub struct RecordedRun {
    /// Production sample positions (cm).
    pub times: Vec<f64>,
    /// Production trajectory of both species and the coupling.
    pub trajectory: CoupledTrajectory,
    /// Detection on the exploratory run.
    pub pilot: FundamentalDetection,
    /// Re-detection on the production run (used downstream).
    pub detection: FundamentalDetection,
    pub pilot_stats: StepStats,
    pub stats: StepStats,
}

/// Integrate, detect the fundamental, and re-integrate over
/// `periods` whole periods.
pub fn record(cfg: &SelfIntConfig) -> Result<RecordedRun, CliError> {
    let (sys, _) = build_self_interaction(&cfg.params());
    let opts = AdaptiveOptions::with_tol(cfg.numerics.rtol);

    let pilot_grid = uniform_grid(0.0, cfg.numerics.pilot_span_cm, cfg.numerics.pilot_samples);
    let (pilot_traj, pilot_stats) =
        evolve_self_interaction(&sys, 0.0, cfg.numerics.pilot_span_cm, &pilot_grid, &opts)?;
    let pilot = detect_fundamental(&pilot_grid, &pilot_traj.coupling, cfg.numerics.max_harmonic)?;

    let span = cfg.numerics.periods as f64 * pilot.period;
    let count = cfg.numerics.periods * cfg.numerics.samples_per_period;
    let times = uniform_grid(0.0, span, count);
    let (trajectory, stats) = evolve_self_interaction(&sys, 0.0, span, &times, &opts)?;
    let detection = detect_fundamental(&times, &trajectory.coupling, cfg.numerics.max_harmonic)?;

    Ok(RecordedRun {
        times,
        trajectory,
        pilot,
        detection,
        pilot_stats,
        stats,
    })
}

/// The harmonic content of the recorded coupling.
#[derive(Debug, Clone)]
pub struct HarmonicModel {
    pub spectrum: ModeSpectrum,
    /// Retained spectral lines, strongest first.
    pub top_ks: Vec<usize>,
    /// The same lines sorted ascending.
    pub multiples_sorted: Vec<usize>,
    /// Constant part of the coupling (window mean, cm⁻¹).
    pub c0: CMatrix,
    /// Relative reconstruction residual using the strongest
    /// `1..=mode_count` lines.
    pub residual_by_count: Vec<f64>,
    /// Largest even-harmonic amplitude relative to its adjacent odd
    /// harmonics; `None` when the retained lines are not all odd.
    pub even_odd_ratio: Option<f64>,
    /// Off-diagonal pair amplitude `|C_k[1,2]| + |C_k[2,1]|` per retained
    /// line (cm⁻¹), strongest first.
    pub pair_amplitudes_cm_inv: Vec<(usize, f64)>,
}

/// Decompose the recorded coupling and pick the strongest lines.
pub fn analyze(run: &RecordedRun, cfg: &SelfIntConfig) -> Result<HarmonicModel, CliError> {
    let spectrum = decompose(
        &run.times,
        &run.trajectory.coupling,
        run.detection.period,
        run.detection.n_periods,
        cfg.numerics.max_harmonic,
    )?;
    let top_ks = spectrum.top_modes(cfg.numerics.mode_count);
    if top_ks.len() < cfg.numerics.mode_count {
        return Err(CliError::Numerical(format!(
            "only {} spectral lines found, {} requested",
            top_ks.len(),
            cfg.numerics.mode_count
        )));
    }
    let mut multiples_sorted = top_ks.clone();
    multiples_sorted.sort_unstable();

    let residual_by_count = (1..=top_ks.len())
        .map(|m| spectrum.reconstruction_error(&run.times, &run.trajectory.coupling, &top_ks[..m]))
        .collect();

    let pair_amplitudes_cm_inv = top_ks
        .iter()
        .map(|&k| (k, spectrum.element_pair_amplitude(k, 0, 1)))
        .collect();

    let even_odd_ratio = even_odd_amplitude_ratio(&spectrum, &multiples_sorted);

    Ok(HarmonicModel {
        c0: spectrum.h_bar.clone(),
        spectrum,
        top_ks,
        multiples_sorted,
        residual_by_count,
        even_odd_ratio,
        pair_amplitudes_cm_inv,
    })
}

/// Largest ratio `amp(even k) / min(amp(k−1), amp(k+1))` over even
/// harmonics below the highest retained line. Only defined when every
/// retained line is odd (the quantity diagnoses an odd-only spectrum).
fn even_odd_amplitude_ratio(spectrum: &ModeSpectrum, multiples: &[usize]) -> Option<f64> {
    if multiples.iter().any(|k| k % 2 == 0) {
        return None;
    }
    let top = *multiples.last()?;
    let mut worst: f64 = 0.0;
    for k in (2..top).step_by(2) {
        let floor = spectrum.amplitude(k - 1).min(spectrum.amplitude(k + 1));
        if floor > 0.0 {
            worst = worst.max(spectrum.amplitude(k) / floor);
        }
    }
    Some(worst)
}

/// The rotating-wave analysis of one species.
#[derive(Debug, Clone)]
pub struct SpeciesAnalysis {
    /// Second species (the one seeing `−H_c*`)?
    pub bar: bool,
    /// Constant Hamiltonian: vacuum plus this species' constant coupling
    /// (cm⁻¹).
    pub h_constant: CMatrix,
    /// This species' perturbation modes (cm⁻¹).
    pub modes: Vec<FourierMode>,
    /// Labeled splitting `k̆₁ − k̆₂` (cm⁻¹).
    pub delta_k_cm_inv: f64,
    pub labels_ambiguous: bool,
    /// Exhaustive-scan result.
    pub grid_points: usize,
    pub best_set: Vec<i32>,
    pub best_amplitude: f64,
    /// Dominant-set solution summary.
    pub kappa_cm_inv: Complex64,
    pub detuning_2p_cm_inv: f64,
    pub rabi_q_cm_inv: f64,
    pub amplitude: f64,
    /// Degenerate-family solution summary (κ summed over the family).
    pub family_size: usize,
    pub family_kappa_cm_inv: Complex64,
    pub family_rabi_q_cm_inv: f64,
    pub family_amplitude: f64,
    /// Largest `|κ|` of any single companion set, relative to the
    /// dominant set's `|κ|`.
    pub max_companion_kappa_rel: f64,
    /// Fit of the numeric transition probability to `A sin^{2k}(Q r)`.
    pub fit: SinPowerFit,
    pub p12_numeric: Vec<f64>,
    /// Dominant-set closed-form transition probability on the same grid.
    pub p12_rwa: Vec<f64>,
    pub max_p12_numeric: f64,
}

/// Analyze one species: label its constant Hamiltonian against the
/// vacuum basis, build the rotating-wave system on the given fundamental,
/// scan integer sets, enumerate the degenerate family, and fit the
/// numeric probability.
#[allow(clippy::too_many_arguments)]
fn solve_species(
    bar: bool,
    h_constant: CMatrix,
    modes: Vec<FourierMode>,
    theta: f64,
    q1: f64,
    radius: u32,
    times: &[f64],
    p12_numeric: Vec<f64>,
) -> Result<SpeciesAnalysis, CliError> {
    let labeled = label_states(&eig_hermitian(&h_constant)?, &vacuum_basis_2f(theta))?;
    let delta_k_cm_inv = labeled.basis.values[0] - labeled.basis.values[1];
    let rwa = RwaSystem::new(labeled.basis.clone(), modes.clone())?.with_fundamental(q1)?;

    let Selected {
        selection: best,
        grid_points,
        amplitude,
    } = select_integers(&rwa, Strategy::ExhaustiveScan, radius)?;
    let best_set = best
        .two_level_values()
        .expect("two-level system has per-mode values");
    let best_amplitude = amplitude.expect("exhaustive scan reports its winning amplitude");

    let family = enumerate_degenerate(&rwa, &best, radius, DEGENERACY_RTOL)?;
    let dominant = rwa.solve(&best)?;
    let (kappa, _p, rabi_q, amp) = dominant
        .two_level_summary()
        .expect("two-level solution has a summary");
    let family_sol = rwa.solve_sets(&family, None)?;
    let (family_kappa, _, family_q, family_amp) = family_sol
        .two_level_summary()
        .expect("two-level solution has a summary");

    let mut max_companion_kappa_rel: f64 = 0.0;
    if kappa.norm() > 0.0 {
        for member in &family {
            if member == &best {
                continue;
            }
            let (k_member, _, _, _) = rwa.two_level_metrics(member);
            max_companion_kappa_rel =
                max_companion_kappa_rel.max(k_member.norm() / kappa.norm());
        }
    }

    let detuning_2p = dominant.detunings[(0, 1)];
    let p12_rwa: Vec<f64> = times
        .iter()
        .map(|&r| two_level_closed_form(kappa, detuning_2p, r).0)
        .collect();
    let max_p12_numeric = p12_numeric.iter().copied().fold(0.0, f64::max);
    let fit = fit_sin_power(times, &p12_numeric)?;

    Ok(SpeciesAnalysis {
        bar,
        h_constant,
        modes,
        delta_k_cm_inv,
        labels_ambiguous: labeled.ambiguous,
        grid_points,
        best_set,
        best_amplitude,
        kappa_cm_inv: kappa,
        detuning_2p_cm_inv: detuning_2p,
        rabi_q_cm_inv: rabi_q,
        amplitude: amp,
        family_size: family.len(),
        family_kappa_cm_inv: family_kappa,
        family_rabi_q_cm_inv: family_q,
        family_amplitude: family_amp,
        max_companion_kappa_rel,
        fit,
        p12_numeric,
        p12_rwa,
        max_p12_numeric,
    })
}

/// Everything produced by one self-interaction run.
#[derive(Debug, Clone)]
pub struct SelfIntOutcome {
    pub alpha: f64,
    /// Vacuum oscillation wavenumber `Δm²/4E` (cm⁻¹).
    pub k1_cm_inv: f64,
    /// Coupling strength (cm⁻¹).
    pub mu_cm_inv: f64,
    pub run: RecordedRun,
    pub model: HarmonicModel,
    pub nu: SpeciesAnalysis,
    pub nubar: SpeciesAnalysis,
}

/// Run the full pipeline for both species.
pub fn run_selfint(cfg: &SelfIntConfig) -> Result<SelfIntOutcome, CliError> {
    cfg.validate()?;
    let params = cfg.params();
    let (sys, k1) = build_self_interaction(&params);

    let run = record(cfg)?;
    let model = analyze(&run, cfg)?;

    let q1 = model.spectrum.q1;
    let modes_nu = model.spectrum.to_fourier_modes(&model.top_ks)?;
    let modes_nubar = conjugate_species_modes(&modes_nu)?;
    let h_nu = &sys.h + &model.c0;
    let h_nubar = &sys.h + conjugate_species_constant(&model.c0);

    let nu = solve_species(
        false,
        h_nu,
        modes_nu,
        params.theta,
        q1,
        cfg.numerics.radius,
        &run.times,
        run.trajectory.probability(1, 0, false),
    )?;
    let nubar = solve_species(
        true,
        h_nubar,
        modes_nubar,
        params.theta,
        q1,
        cfg.numerics.radius,
        &run.times,
        run.trajectory.probability(1, 0, true),
    )?;

    Ok(SelfIntOutcome {
        alpha: params.alpha,
        k1_cm_inv: k1,
        mu_cm_inv: sys.mu,
        run,
        model,
        nu,
        nubar,
    })
}

#[derive(Serialize)]
struct DetectionReport {
    period_cm: f64,
    q1_cm_inv: f64,
    n_periods: usize,
    capture: f64,
}

impl From<&FundamentalDetection> for DetectionReport {
    fn from(d: &FundamentalDetection) -> Self {
        DetectionReport {
            period_cm: d.period,
            q1_cm_inv: d.wavenumber,
            n_periods: d.n_periods,
            capture: d.capture,
        }
    }
}

#[derive(Serialize)]
struct FitReport {
    amplitude: f64,
    wavenumber_cm_inv: f64,
    exponent: u32,
    sse: f64,
    max_observed: f64,
}

#[derive(Serialize)]
struct SpeciesReport {
    delta_k_cm_inv: f64,
    labels_ambiguous: bool,
    scan_grid_points: usize,
    best_set: Vec<i32>,
    best_amplitude: f64,
    kappa_cm_inv: [f64; 2],
    abs_kappa_cm_inv: f64,
    detuning_2p_cm_inv: f64,
    rabi_q_cm_inv: f64,
    amplitude: f64,
    family_size: usize,
    family_abs_kappa_cm_inv: f64,
    family_rabi_q_cm_inv: f64,
    family_amplitude: f64,
    max_companion_kappa_rel: f64,
    fit: FitReport,
    max_p12_numeric: f64,
}

impl From<&SpeciesAnalysis> for SpeciesReport {
    fn from(s: &SpeciesAnalysis) -> Self {
        SpeciesReport {
            delta_k_cm_inv: s.delta_k_cm_inv,
            labels_ambiguous: s.labels_ambiguous,
            scan_grid_points: s.grid_points,
            best_set: s.best_set.clone(),
            best_amplitude: s.best_amplitude,
            kappa_cm_inv: complex_pair(s.kappa_cm_inv),
            abs_kappa_cm_inv: s.kappa_cm_inv.norm(),
            detuning_2p_cm_inv: s.detuning_2p_cm_inv,
            rabi_q_cm_inv: s.rabi_q_cm_inv,
            amplitude: s.amplitude,
            family_size: s.family_size,
            family_abs_kappa_cm_inv: s.family_kappa_cm_inv.norm(),
            family_rabi_q_cm_inv: s.family_rabi_q_cm_inv,
            family_amplitude: s.family_amplitude,
            max_companion_kappa_rel: s.max_companion_kappa_rel,
            fit: FitReport {
                amplitude: s.fit.amplitude,
                wavenumber_cm_inv: s.fit.wavenumber,
                exponent: s.fit.exponent,
                sse: s.fit.sse,
                max_observed: s.fit.max_observed,
            },
            max_p12_numeric: s.max_p12_numeric,
        }
    }
}

#[derive(Serialize)]
struct StatsPair {
    pilot: [usize; 3],
    production: [usize; 3],
}

#[derive(Serialize)]
struct SelfIntReport {
    scenario: &'static str,
    alpha: f64,
    k1_cm_inv: f64,
    mu_cm_inv: f64,
    mu_erg: f64,
    pilot_detection: DetectionReport,
    production_detection: DetectionReport,
    fundamental_cm_inv: f64,
    multiples_ranked: Vec<usize>,
    multiples: Vec<usize>,
    pair_amplitudes_erg: Vec<(usize, f64)>,
    even_odd_amplitude_ratio: Option<f64>,
    reconstruction_residual_by_count: Vec<f64>,
    spectral_capture: f64,
    c0_cm_inv: Vec<Vec<[f64; 2]>>,
    nu: SpeciesReport,
    nubar: SpeciesReport,
    integration: StatsPair,
}

/// Write `hsi.csv`, `spectrum.csv`, `residual.csv`, `p12.csv`, and
/// `report.json` into `dir`.
pub fn write_selfint(out: &SelfIntOutcome, dir: &Path) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let n = out.model.c0.nrows();

    let mut header = vec!["r_cm".to_string()];
    header.extend(matrix_columns("Hc", n));
    let rows = out
        .run
        .times
        .iter()
        .zip(&out.run.trajectory.coupling)
        .map(|(&r, hc)| {
            let mut row = Vec::with_capacity(1 + 2 * n * n);
            row.push(r);
            matrix_row(hc, &mut row);
            row
        });
    write_csv(&dir.join("hsi.csv"), &header, rows)?;

    let mut header = vec!["k".to_string(), "q_cm_inv".to_string()];
    header.extend(matrix_columns("C", n));
    let rows = out.model.spectrum.coeffs.iter().enumerate().map(|(idx, c)| {
        let k = idx + 1;
        let mut row = Vec::with_capacity(2 + 2 * n * n);
        row.push(k as f64);
        row.push(k as f64 * out.model.spectrum.q1);
        matrix_row(c, &mut row);
        row
    });
    write_csv(&dir.join("spectrum.csv"), &header, rows)?;

    let header: Vec<String> = ["mode_count", "residual_rel"].map(String::from).to_vec();
    let rows = out
        .model
        .residual_by_count
        .iter()
        .enumerate()
        .map(|(i, &res)| [(i + 1) as f64, res]);
    write_csv(&dir.join("residual.csv"), &header, rows)?;

    let header: Vec<String> = [
        "r_cm",
        "P12_nu_numeric",
        "P12_nu_rwa",
        "P12_nubar_numeric",
        "P12_nubar_rwa",
    ]
    .map(String::from)
    .to_vec();
    let rows = out.run.times.iter().enumerate().map(|(i, &r)| {
        [
            r,
            out.nu.p12_numeric[i],
            out.nu.p12_rwa[i],
            out.nubar.p12_numeric[i],
            out.nubar.p12_rwa[i],
        ]
    });
    write_csv(&dir.join("p12.csv"), &header, rows)?;

    let stats = |s: &StepStats| [s.accepted, s.rejected, s.rhs_evals];
    let report = SelfIntReport {
        scenario: "selfint",
        alpha: out.alpha,
        k1_cm_inv: out.k1_cm_inv,
        mu_cm_inv: out.mu_cm_inv,
        mu_erg: units::inv_cm_to_erg(out.mu_cm_inv),
        pilot_detection: (&out.run.pilot).into(),
        production_detection: (&out.run.detection).into(),
        fundamental_cm_inv: out.model.spectrum.q1,
        multiples_ranked: out.model.top_ks.clone(),
        multiples: out.model.multiples_sorted.clone(),
        pair_amplitudes_erg: out
            .model
            .pair_amplitudes_cm_inv
            .iter()
            .map(|&(k, a)| (k, units::inv_cm_to_erg(a)))
            .collect(),
        even_odd_amplitude_ratio: out.model.even_odd_ratio,
        reconstruction_residual_by_count: out.model.residual_by_count.clone(),
        spectral_capture: out.model.spectrum.captured_fraction,
        c0_cm_inv: matrix_pairs(&out.model.c0),
        nu: (&out.nu).into(),
        nubar: (&out.nubar).into(),
        integration: StatsPair {
            pilot: stats(&out.run.pilot_stats),
            production: stats(&out.run.stats),
        },
    };
    write_json(&dir.join("report.json"), &report)
}

/// Replay of the production run under the reconstructed (truncated
/// harmonic) Hamiltonian, with the rigorous deviation bound
/// `‖S_direct(r) − S_model(r)‖ ≤ ∫₀ʳ ‖ΔH‖₂`.
#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub times: Vec<f64>,
    /// `max|S − S_model|` per sample, first species.
    pub deviation_nu: Vec<f64>,
    /// Same for the second species.
    pub deviation_nubar: Vec<f64>,
    /// Cumulative `∫‖ΔH‖₂` (trapezoid over the recorded samples); the
    /// species share it because their coupling errors are conjugate.
    pub bound: Vec<f64>,
    pub max_deviation_nu: f64,
    pub max_deviation_nubar: f64,
    pub final_bound: f64,
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
fn hermitian_norm(m: &CMatrix) -> stimrwa_core::Result<f64> {
    let eig = eig_hermitian(m)?;
    Ok(eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// Evolve both species under the truncated harmonic model and compare
/// against the recorded direct evolution.
pub fn run_replay(out: &SelfIntOutcome, rtol: f64) -> Result<ReplayOutcome, CliError> {
    let times = &out.run.times;
    let t_end = *times.last().unwrap();
    let opts = AdaptiveOptions::with_tol(rtol);
    let n = out.model.c0.nrows();

    let mut deviations = Vec::with_capacity(2);
    for species in [&out.nu, &out.nubar] {
        let (traj, _) = evolve_linear(
            |r| {
                &species.h_constant
                    + delta_h_at(&species.modes, n, r).expect("modes validated at construction")
            },
            n,
            0.0,
            t_end,
            times,
            &opts,
        )?;
        let recorded = if species.bar {
            &out.run.trajectory.states_bar
        } else {
            &out.run.trajectory.states
        };
        let dev: Vec<f64> = recorded
            .iter()
            .zip(&traj.states)
            .map(|(a, b)| max_abs(&(a - b)))
            .collect();
        deviations.push(dev);
    }
    let deviation_nubar = deviations.pop().unwrap();
    let deviation_nu = deviations.pop().unwrap();

    // ΔH for the first species; the second species' error is −ΔH*, with
    // the same spectral norm.
    let mut bound = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (&r, hc) in times.iter().zip(&out.run.trajectory.coupling) {
        let model = &out.model.c0
            + delta_h_at(&out.nu.modes, n, r).expect("modes validated at construction");
        let norm = hermitian_norm(&(hc - model))?;
        if let Some((r0, n0)) = prev {
            acc += 0.5 * (n0 + norm) * (r - r0);
        }
        prev = Some((r, norm));
        bound.push(acc);
    }

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(ReplayOutcome {
        times: times.clone(),
        max_deviation_nu: max(&deviation_nu),
        max_deviation_nubar: max(&deviation_nubar),
        final_bound: acc,
        deviation_nu,
        deviation_nubar,
        bound,
    })
}

#[derive(Serialize)]
struct ReplayReport {
    scenario: &'static str,
    max_deviation_nu: f64,
    max_deviation_nubar: f64,
    final_bound: f64,
    /// Worst observed deviation over the running bound (≤ 1 when the
    /// bound holds with integration error below it).
    bound_usage: f64,
    model_lines: Vec<usize>,
    model_residual_rel: f64,
}

/// Write `replay.csv` and `replay.json` into `dir`.
pub fn write_replay(
    replay: &ReplayOutcome,
    out: &SelfIntOutcome,
    dir: &Path,
) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let header: Vec<String> = ["r_cm", "deviation_nu", "deviation_nubar", "bound"]
        .map(String::from)
        .to_vec();
    let rows = replay.times.iter().enumerate().map(|(i, &r)| {
        [
            r,
            replay.deviation_nu[i],
            replay.deviation_nubar[i],
            replay.bound[i],
        ]
    });
    write_csv(&dir.join("replay.csv"), &header, rows)?;

    let mut usage: f64 = 0.0;
    for i in 0..replay.times.len() {
        if replay.bound[i] > 0.0 {
            usage = usage
                .max(replay.deviation_nu[i] / replay.bound[i])
                .max(replay.deviation_nubar[i] / replay.bound[i]);
        }
    }
    let report = ReplayReport {
        scenario: "selfint-rwa",
        max_deviation_nu: replay.max_deviation_nu,
        max_deviation_nubar: replay.max_deviation_nubar,
        final_bound: replay.final_bound,
        bound_usage: usage,
        model_lines: out.model.top_ks.clone(),
        model_residual_rel: *out.model.residual_by_count.last().unwrap(),
    };
    write_json(&dir.join("replay.json"), &report)
}
