//! Adaptive Dormand–Prince 5(4) integration for complex state vectors,
//! with fourth-order dense output so trajectories can be sampled on any
//! grid without constraining the step sequence.
//!
//! This is the classic embedded pair: six stages advance a fifth-order
//! solution, the first-same-as-last (FSAL) stage doubles as the next
//! step's first stage, and the embedded fourth-order solution provides
//! the local error estimate used for step control.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::CVector;

// Butcher tableau (Dormand & Prince 1980).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights: fifth-order minus embedded fourth-order solution.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Initial step; `None` selects one automatically.
    pub h_init: Option<f64>,
    /// Maximum number of steps (accepted plus rejected).
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            max_steps: 50_000_000,
        }
    }
}

impl AdaptiveOptions {
    /// Same options with a different relative tolerance (absolute follows).
    pub fn with_tol(tol: f64) -> Self {
        AdaptiveOptions {
            rtol: tol,
            atol: tol,
            ..Default::default()
        }
    }
}

/// Integration effort counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Accepted steps.
    pub accepted: usize,
    /// Rejected (repeated) steps.
    pub rejected: usize,
    /// Right-hand-side evaluations.
    pub rhs_evals: usize,
}

/// Scaled RMS norm of the error estimate:
/// `sqrt(mean((|e_i| / (atol + rtol·max(|y0_i|, |y1_i|)))²))`.
fn error_norm(err: &CVector, y0: &CVector, y1: &CVector, atol: f64, rtol: f64) -> f64 {
    let n = err.len();
    let mut acc = 0.0;
    for i in 0..n {
        let sc = atol + rtol * y0[i].norm().max(y1[i].norm());
        let q = err[i].norm() / sc;
        acc += q * q;
    }
    (acc / n as f64).sqrt()
}

/// Automatic initial step (Hairer, Nørsett & Wanner II.4): balance the
/// sizes of the state, the derivative, and an Euler-probe second
/// derivative against the tolerances.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &CVector,
    f0: &CVector,
    h_max: f64,
    atol: f64,
    rtol: f64,
    stats: &mut StepStats,
) -> f64
where
    F: FnMut(f64, &CVector, &mut CVector),
{
    let n = y0.len();
    let mut dny = 0.0;
    let mut dnf = 0.0;
    for i in 0..n {
        let sc = atol + rtol * y0[i].norm();
        dny += (y0[i].norm() / sc).powi(2);
        dnf += (f0[i].norm() / sc).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf).sqrt()
    };
    h = h.min(h_max);

    let y1 = CVector::from_fn(n, |i, _| y0[i] + f0[i] * Complex64::from(h));
    let mut f1 = CVector::zeros(n);
    f(t0 + h, &y1, &mut f1);
    stats.rhs_evals += 1;
    let mut der2 = 0.0;
    for i in 0..n {
        let sc = atol + rtol * y0[i].norm();
        der2 += ((f1[i] - f0[i]).norm() / sc).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (1e-6_f64).max(h.abs() * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(h_max)
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end > t0` and return the state
/// at each requested sample time (ascending, inside `[t0, t_end]`) via
/// dense output, plus effort counters.
pub fn integrate_sampled<F>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: &CVector,
    sample_times: &[f64],
    opts: &AdaptiveOptions,
) -> Result<(Vec<CVector>, StepStats)>
where
    F: FnMut(f64, &CVector, &mut CVector),
{
    let span = t_end - t0;
    if !(span > 0.0) || !span.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "integration span must be positive and finite, got [{t0}, {t_end}]"
        )));
    }
    if !(opts.rtol > 0.0) || !(opts.atol > 0.0) {
        return Err(CoreError::InvalidArgument(
            "tolerances must be positive".into(),
        ));
    }
    for w in sample_times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(CoreError::InvalidArgument(
                "sample times must be strictly increasing".into(),
            ));
        }
    }
    if let (Some(&first), Some(&last)) = (sample_times.first(), sample_times.last()) {
        if first < t0 || last > t_end {
            return Err(CoreError::InvalidArgument(format!(
                "sample times [{first}, {last}] outside span [{t0}, {t_end}]"
            )));
        }
    }

    let n = y0.len();
    let mut stats = StepStats::default();
    let mut out: Vec<CVector> = Vec::with_capacity(sample_times.len());
    let mut si = 0;
    // Samples at exactly t0 need no integration.
    while si < sample_times.len() && sample_times[si] <= t0 {
        out.push(y0.clone());
        si += 1;
    }

    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = CVector::zeros(n);
    f(t, &y, &mut k1);
    stats.rhs_evals += 1;

    let h_min = 1e-12 * span;
    let mut h = match opts.h_init {
        Some(h0) if h0 > 0.0 => h0.min(span),
        Some(_) => {
            return Err(CoreError::InvalidArgument(
                "initial step must be positive".into(),
            ))
        }
        None => initial_step(&mut f, t0, &y, &k1, span, opts.atol, opts.rtol, &mut stats),
    };

    let mut k2 = CVector::zeros(n);
    let mut k3 = CVector::zeros(n);
    let mut k4 = CVector::zeros(n);
    let mut k5 = CVector::zeros(n);
    let mut k6 = CVector::zeros(n);
    let mut k7 = CVector::zeros(n);
    let mut y_stage = CVector::zeros(n);
    let mut y_new = CVector::zeros(n);
    let mut err = CVector::zeros(n);

    let mut facmax = 10.0;
    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(CoreError::Numerical(format!(
                "step budget {} exhausted at t = {t:.6e}",
                opts.max_steps
            )));
        }
        if h < h_min {
            return Err(CoreError::StepUnderflow { r: t, h });
        }
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }
        let hc = Complex64::from(h);

        for i in 0..n {
            y_stage[i] = y[i] + hc * k1[i] * Complex64::from(A21);
        }
        f(t + C2 * h, &y_stage, &mut k2);
        for i in 0..n {
            y_stage[i] = y[i] + hc * (k1[i] * Complex64::from(A31) + k2[i] * Complex64::from(A32));
        }
        f(t + C3 * h, &y_stage, &mut k3);
        for i in 0..n {
            y_stage[i] = y[i]
                + hc * (k1[i] * Complex64::from(A41)
                    + k2[i] * Complex64::from(A42)
                    + k3[i] * Complex64::from(A43));
        }
        f(t + C4 * h, &y_stage, &mut k4);
        for i in 0..n {
            y_stage[i] = y[i]
                + hc * (k1[i] * Complex64::from(A51)
                    + k2[i] * Complex64::from(A52)
                    + k3[i] * Complex64::from(A53)
                    + k4[i] * Complex64::from(A54));
        }
        f(t + C5 * h, &y_stage, &mut k5);
        for i in 0..n {
            y_stage[i] = y[i]
                + hc * (k1[i] * Complex64::from(A61)
                    + k2[i] * Complex64::from(A62)
                    + k3[i] * Complex64::from(A63)
                    + k4[i] * Complex64::from(A64)
                    + k5[i] * Complex64::from(A65));
        }
        f(t + h, &y_stage, &mut k6);
        for i in 0..n {
            y_new[i] = y[i]
                + hc * (k1[i] * Complex64::from(B1)
                    + k3[i] * Complex64::from(B3)
                    + k4[i] * Complex64::from(B4)
                    + k5[i] * Complex64::from(B5)
                    + k6[i] * Complex64::from(B6));
        }
        f(t + h, &y_new, &mut k7);
        stats.rhs_evals += 6;

        for i in 0..n {
            err[i] = hc
                * (k1[i] * Complex64::from(E1)
                    + k3[i] * Complex64::from(E3)
                    + k4[i] * Complex64::from(E4)
                    + k5[i] * Complex64::from(E5)
                    + k6[i] * Complex64::from(E6)
                    + k7[i] * Complex64::from(E7));
        }
        let err_norm = error_norm(&err, &y, &y_new, opts.atol, opts.rtol);

        if err_norm <= 1.0 {
            let t_new = if last { t_end } else { t + h };
            // Dense output for samples inside (t, t_new].
            if si < sample_times.len() && sample_times[si] <= t_new {
                // Quartic interpolant in θ = (s − t)/h.
                let mut rcont = vec![CVector::zeros(n); 5];
                for i in 0..n {
                    let delta = y_new[i] - y[i];
                    rcont[0][i] = y[i];
                    rcont[1][i] = delta;
                    rcont[2][i] = hc * k1[i] - delta;
                    rcont[3][i] = delta - hc * k7[i] - rcont[2][i];
                    rcont[4][i] = hc
                        * (k1[i] * Complex64::from(D1)
                            + k3[i] * Complex64::from(D3)
                            + k4[i] * Complex64::from(D4)
                            + k5[i] * Complex64::from(D5)
                            + k6[i] * Complex64::from(D6)
                            + k7[i] * Complex64::from(D7));
                }
                while si < sample_times.len() && sample_times[si] <= t_new {
                    let theta = ((sample_times[si] - t) / h).clamp(0.0, 1.0);
                    let th = Complex64::from(theta);
                    let th1 = Complex64::from(1.0 - theta);
                    let dense = CVector::from_fn(n, |i, _| {
                        rcont[0][i]
                            + th * (rcont[1][i]
                                + th1 * (rcont[2][i]
                                    + th * (rcont[3][i] + th1 * rcont[4][i])))
                    });
                    out.push(dense);
                    si += 1;
                }
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, facmax);
            h = (h * fac).min(span);
            facmax = 10.0;
        } else {
            stats.rejected += 1;
            let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            facmax = 1.0;
        }
    }
    debug_assert_eq!(si, sample_times.len(), "all samples must be emitted");
    Ok((out, stats))
}

/// Integrate to a single endpoint and return the final state.
pub fn integrate_to<F>(
    f: F,
    t0: f64,
    t_end: f64,
    y0: &CVector,
    opts: &AdaptiveOptions,
) -> Result<(CVector, StepStats)>
where
    F: FnMut(f64, &CVector, &mut CVector),
{
    let (mut states, stats) = integrate_sampled(f, t0, t_end, y0, &[t_end], opts)?;
    Ok((states.pop().expect("endpoint sample"), stats))
}
