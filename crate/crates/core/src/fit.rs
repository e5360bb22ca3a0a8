//! Least-squares fit of an oscillating probability signal to the model
//! `p(t) = A sin^{2k}(Q (t − t₀))` with an integer exponent.
//!
//! Transition probabilities built from products of many near-resonant
//! factors oscillate as even powers of a sine. The power `2k` sharpens
//! the arches as it grows, so it is identifiable from the arch shape;
//! the wavenumber `Q` comes from the arch spacing (coarse) and a
//! two-stage grid refinement (fine); the amplitude `A` is closed-form for fixed
//! `(k, Q)` since the model is linear in it.

use crate::error::{CoreError, Result};

/// Largest `k` tried in the model `A sin^{2k}(Q t)`.
const K_MAX: u32 = 12;
/// Grid points per refinement stage.
const GRID_POINTS: usize = 601;
/// Half-width of the first-stage wavenumber grid, relative to the
/// arch-spacing estimate.
const STAGE1_SPAN: f64 = 0.03;
/// Cap on the number of samples entering each SSE evaluation; longer
/// signals are strided down to this budget.
const SSE_SAMPLE_CAP: usize = 8192;

/// Result of [`fit_sin_power`].
#[derive(Debug, Clone)]
pub struct SinPowerFit {
    /// Fitted amplitude `A` (the model's peak value).
    pub amplitude: f64,
    /// Fitted wavenumber `Q` (cm⁻¹): arches repeat every `π/Q`.
    pub wavenumber: f64,
    /// Fitted even exponent `2k`.
    pub exponent: u32,
    /// Sum of squared residuals at the optimum (over the strided samples).
    pub sse: f64,
    /// Largest raw sample value, for comparison against `amplitude`.
    pub max_observed: f64,
}

/// Fit `p(t) ≈ A sin^{2k}(Q (t − t₀))` to a sampled signal, scanning
/// `k = 1..=12` and refining `Q` on two successive grids around an
/// arch-spacing estimate. `times` must be ascending and start where the
/// signal vanishes (its zeros anchor the model's phase).
pub fn fit_sin_power(times: &[f64], values: &[f64]) -> Result<SinPowerFit> {
    if times.len() != values.len() {
        return Err(CoreError::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 16 {
        return Err(CoreError::InvalidArgument(format!(
            "need at least 16 samples, got {}",
            times.len()
        )));
    }
    let max_observed = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_observed = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = max_observed - min_observed;
    if !(range > 0.0) || !(max_observed > 0.0) {
        return Err(CoreError::NonOscillatory { range });
    }

    // Arch positions: contiguous runs above half maximum, located at the
    // run's largest sample.
    let half = 0.5 * max_observed;
    let mut arch_times: Vec<f64> = Vec::new();
    let mut run_best: Option<(f64, f64)> = None; // (value, time)
    for (&t, &v) in times.iter().zip(values) {
        if v >= half {
            match run_best {
                Some((bv, _)) if bv >= v => {}
                _ => run_best = Some((v, t)),
            }
        } else if let Some((_, bt)) = run_best.take() {
            arch_times.push(bt);
        }
    }
    if let Some((_, bt)) = run_best {
        arch_times.push(bt);
    }
    if arch_times.len() < 2 {
        return Err(CoreError::NonOscillatory { range });
    }
    let mut spacings: Vec<f64> = arch_times.windows(2).map(|w| w[1] - w[0]).collect();
    spacings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_spacing = spacings[spacings.len() / 2];
    let q0 = std::f64::consts::PI / median_spacing;

    // Stride the samples down to the evaluation budget.
    let stride = times.len().div_ceil(SSE_SAMPLE_CAP);
    let t0 = times[0];
    let ts: Vec<f64> = times.iter().step_by(stride).map(|t| t - t0).collect();
    let ps: Vec<f64> = values.iter().step_by(stride).cloned().collect();

    // For one trial wavenumber, the best (k, A, SSE) over all exponents.
    // With Σp² fixed, SSE = Σp² − (Σps)²/Σs², so only the projection and
    // the model norm are accumulated per k.
    let sum_pp: f64 = ps.iter().map(|p| p * p).sum();
    let eval = |q: f64| -> (f64, u32, f64) {
        let mut sum_ps = [0.0f64; K_MAX as usize];
        let mut sum_ss = [0.0f64; K_MAX as usize];
        for (&t, &p) in ts.iter().zip(&ps) {
            let s2 = (q * t).sin().powi(2);
            let mut sk = 1.0;
            for k in 0..K_MAX as usize {
                sk *= s2; // sin^{2(k+1)}
                sum_ps[k] += p * sk;
                sum_ss[k] += sk * sk;
            }
        }
        let mut best = (f64::INFINITY, 1u32, 0.0f64);
        for k in 0..K_MAX as usize {
            if sum_ss[k] <= 0.0 {
                continue;
            }
            let a = sum_ps[k] / sum_ss[k];
            let sse = sum_pp - a * sum_ps[k];
            if sse < best.0 {
                best = (sse, (k + 1) as u32, a);
            }
        }
        best
    };

    let mut best_q = q0;
    let mut best = (f64::INFINITY, 1u32, 0.0f64);
    let mut lo = q0 * (1.0 - STAGE1_SPAN);
    let mut hi = q0 * (1.0 + STAGE1_SPAN);
    for _stage in 0..2 {
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        for g in 0..GRID_POINTS {
            let q = lo + step * g as f64;
            let cand = eval(q);
            if cand.0 < best.0 {
                best = cand;
                best_q = q;
            }
        }
        lo = best_q - 2.0 * step;
        hi = best_q + 2.0 * step;
    }

    let (sse, k, amplitude) = best;
    if !(amplitude > 0.0) {
        return Err(CoreError::Numerical(
            "sine-power fit collapsed to zero amplitude".into(),
        ));
    }
    Ok(SinPowerFit {
        amplitude,
        wavenumber: best_q,
        exponent: 2 * k,
        sse,
        max_observed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(a: f64, q: f64, k: u32, t_end: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let values = times
            .iter()
            .map(|&t| a * (q * t).sin().powi(2 * k as i32))
            .collect();
        (times, values)
    }

    #[test]
    fn recovers_clean_parameters() {
        for &(a, q, k) in &[(0.82, 2.7, 9u32), (0.95, 1.0, 1), (0.4, 0.33, 12)] {
            let arches = 6.0;
            let (times, values) = sample(a, q, k, arches * std::f64::consts::PI / q, 4000);
            let fit = fit_sin_power(&times, &values).unwrap();
            assert_eq!(fit.exponent, 2 * k, "exponent for (a={a}, q={q}, k={k})");
            assert!(
                (fit.wavenumber - q).abs() < 1e-5 * q,
                "wavenumber {} vs {q}",
                fit.wavenumber
            );
            assert!((fit.amplitude - a).abs() < 1e-4 * a);
            // Residual limited by the finite wavenumber grid resolution.
            assert!(fit.sse < 1e-5, "sse {:.3e}", fit.sse);
            assert!((fit.max_observed - a).abs() < 1e-3 * a);
        }
    }

    #[test]
    fn tolerates_small_noise() {
        let (times, mut values) = sample(0.7, 1.9, 7, 6.0 * std::f64::consts::PI / 1.9, 3000);
        let mut state = 0xdead_beef_u64;
        for v in values.iter_mut() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let noise = ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 2e-3;
            *v = (*v + noise).max(0.0);
        }
        let fit = fit_sin_power(&times, &values).unwrap();
        assert_eq!(fit.exponent, 14);
        assert!((fit.wavenumber - 1.9).abs() < 1e-3 * 1.9);
        assert!((fit.amplitude - 0.7).abs() < 1e-2);
    }

    #[test]
    fn plain_sine_squared_is_exponent_two() {
        let (times, values) = sample(1.0, 0.5, 1, 5.5 * std::f64::consts::PI / 0.5, 2000);
        let fit = fit_sin_power(&times, &values).unwrap();
        assert_eq!(fit.exponent, 2);
    }

    #[test]
    fn rejects_non_oscillatory_signals() {
        let times: Vec<f64> = (0..100).map(|i| i as f64).collect();
        // Constant zero.
        let zeros = vec![0.0; 100];
        assert!(matches!(
            fit_sin_power(&times, &zeros),
            Err(CoreError::NonOscillatory { .. })
        ));
        // Monotonic ramp: a single "arch" at the end, no spacing estimate.
        let ramp: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        assert!(matches!(
            fit_sin_power(&times, &ramp),
            Err(CoreError::NonOscillatory { .. })
        ));
        // Less than one full arch of a wide sine.
        let half: Vec<f64> = times
            .iter()
            .map(|&t| (0.005 * t).sin().powi(2))
            .collect();
        assert!(matches!(
            fit_sin_power(&times, &half),
            Err(CoreError::NonOscillatory { .. })
        ));
    }

    #[test]
    fn long_signals_are_strided() {
        // 50k samples exceed the SSE budget; the fit must still succeed
        // and stay accurate.
        let (times, values) = sample(0.6, 3.1, 5, 8.0 * std::f64::consts::PI / 3.1, 50_000);
        let fit = fit_sin_power(&times, &values).unwrap();
        assert_eq!(fit.exponent, 10);
        assert!((fit.wavenumber - 3.1).abs() < 1e-4 * 3.1);
        assert!((fit.amplitude - 0.6).abs() < 1e-3);
    }

    #[test]
    fn input_validation() {
        assert!(fit_sin_power(&[0.0, 1.0], &[0.0]).is_err());
        let times: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let vals = vec![0.1; 10];
        assert!(fit_sin_power(&times, &vals).is_err());
    }
}
