//! RWA integer selections: which harmonic `n_{a;ij}` of each mode `a` is
//! kept for each state pair `(i, j)`, plus the strategies that choose them
//! and the enumeration of degenerate selections sharing one detuning.
//!
//! Only the `N−1` superdiagonal entries `n_{a;(i,i+1)}` are independent;
//! the full table follows from the chain rule
//! `n_{a;ij} = n_{a;iℓ} + n_{a;ℓj}`, which holds by construction here.

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::rwa::RwaSystem;

/// Integer harmonic selection: `n[a][p]` is the integer for mode `a` on
/// superdiagonal pair `(p, p+1)` (zero-based states).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegerSelection {
    n: Vec<Vec<i32>>,
}

impl IntegerSelection {
    /// Build from per-mode superdiagonal integers; every inner vector must
    /// have the same nonzero length `N−1`.
    pub fn new(n: Vec<Vec<i32>>) -> Result<Self> {
        if n.is_empty() {
            return Err(CoreError::InvalidArgument(
                "selection needs at least one mode".into(),
            ));
        }
        let pairs = n[0].len();
        if pairs == 0 {
            return Err(CoreError::InvalidArgument(
                "selection needs at least one state pair".into(),
            ));
        }
        if n.iter().any(|row| row.len() != pairs) {
            return Err(CoreError::InvalidArgument(
                "all modes must select integers for the same pairs".into(),
            ));
        }
        Ok(IntegerSelection { n })
    }

    /// Two-level convenience: one integer per mode.
    pub fn two_level(per_mode: Vec<i32>) -> Self {
        IntegerSelection {
            n: per_mode.into_iter().map(|v| vec![v]).collect(),
        }
    }

    /// Number of modes covered.
    pub fn n_modes(&self) -> usize {
        self.n.len()
    }

    /// Number of independent (superdiagonal) pairs, `N−1`.
    pub fn pair_count(&self) -> usize {
        self.n[0].len()
    }

    /// Superdiagonal integers of mode `a`.
    pub fn superdiagonal(&self, a: usize) -> &[i32] {
        &self.n[a]
    }

    /// Full-table entry `n_{a;ij}` via the chain rule; antisymmetric in
    /// `(i, j)` and zero on the diagonal.
    pub fn full(&self, a: usize, i: usize, j: usize) -> i32 {
        if i == j {
            return 0;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let sum: i32 = (lo..hi).map(|p| self.n[a][p]).sum();
        sign * sum
    }

    /// Per-state integers `n_{a;i}` with the anchor `n_{a;N} = 0`, i.e.
    /// `n_{a;i} = n_{a;iN}`; these satisfy `n_{a;i} − n_{a;j} = n_{a;ij}`.
    pub fn per_state(&self, a: usize) -> Vec<i32> {
        let pairs = self.pair_count();
        let mut out = vec![0i32; pairs + 1];
        for i in (0..pairs).rev() {
            out[i] = out[i + 1] + self.n[a][i];
        }
        out
    }

    /// For two-level selections, the flat per-mode integer vector.
    pub fn two_level_values(&self) -> Option<Vec<i32>> {
        if self.pair_count() == 1 {
            Some(self.n.iter().map(|row| row[0]).collect())
        } else {
            None
        }
    }
}

/// How integers are chosen by [`select_integers`].
#[derive(Debug, Clone)]
pub enum Strategy {
    /// Use the given selection unchanged (validated for shape).
    Manual(IntegerSelection),
    /// Per independent pair, minimize the detuning magnitude
    /// `|δk̆ + Σ_a n_a q_a|` over the integer grid.
    NearestResonance,
    /// Maximize the transition amplitude `|κ|²/Q²` over the full grid;
    /// two-level systems only (the amplitude metric is not defined for
    /// larger systems).
    ExhaustiveScan,
}

/// Result of an integer-selection strategy.
#[derive(Debug, Clone)]
pub struct Selected {
    /// The chosen selection.
    pub selection: IntegerSelection,
    /// Number of grid points examined (1 for manual).
    pub grid_points: usize,
    /// The winning amplitude `|κ|²/Q²` for exhaustive scans.
    pub amplitude: Option<f64>,
}

/// Iterate the integer grid `[−radius, radius]^K` by linear index.
fn grid_point(index: usize, k: usize, radius: i32) -> Vec<i32> {
    let side = (2 * radius + 1) as usize;
    let mut rem = index;
    let mut out = vec![0i32; k];
    for slot in out.iter_mut() {
        *slot = (rem % side) as i32 - radius;
        rem /= side;
    }
    out
}

fn grid_size(k: usize, radius: i32) -> usize {
    let side = (2 * radius + 1) as usize;
    side.pow(k as u32)
}

/// Deterministic preference order: larger amplitude first, then smaller
/// `Σ|n|`, then lexicographically smaller integers.
fn better(a: &(f64, i32, Vec<i32>), b: &(f64, i32, Vec<i32>)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    if a.1 != b.1 {
        return a.1 < b.1;
    }
    a.2 < b.2
}

/// Choose a selection per `strategy` over the grid `[−radius, radius]` for
/// every mode.
pub fn select_integers(sys: &RwaSystem, strategy: Strategy, radius: u32) -> Result<Selected> {
    let k = sys.n_modes();
    let n = sys.n_levels();
    if k == 0 {
        return Err(CoreError::InvalidArgument("no modes to select for".into()));
    }
    let radius = radius as i32;
    match strategy {
        Strategy::Manual(sel) => {
            if sel.n_modes() != k {
                return Err(CoreError::DimensionMismatch {
                    expected: k,
                    got: sel.n_modes(),
                });
            }
            if sel.pair_count() != n - 1 {
                return Err(CoreError::DimensionMismatch {
                    expected: n - 1,
                    got: sel.pair_count(),
                });
            }
            Ok(Selected {
                selection: sel,
                grid_points: 1,
                amplitude: None,
            })
        }
        Strategy::NearestResonance => {
            let size = grid_size(k, radius);
            let mut columns: Vec<Vec<i32>> = Vec::with_capacity(n - 1);
            for p in 0..n - 1 {
                let dk = sys.delta_k(p, p + 1);
                // Minimize |δk̆ + Σ n q|; ties prefer smaller Σ|n|, then lex.
                let best = (0..size)
                    .map(|idx| {
                        let ns = grid_point(idx, k, radius);
                        let det: f64 = dk
                            + ns.iter()
                                .enumerate()
                                .map(|(a, &na)| na as f64 * sys.mode_q(a))
                                .sum::<f64>();
                        let l1: i32 = ns.iter().map(|v| v.abs()).sum();
                        (-det.abs(), l1, ns)
                    })
                    .fold(None::<(f64, i32, Vec<i32>)>, |acc, cand| match acc {
                        None => Some(cand),
                        Some(cur) => {
                            if better(&cand, &cur) {
                                Some(cand)
                            } else {
                                Some(cur)
                            }
                        }
                    })
                    .expect("grid is never empty");
                columns.push(best.2);
            }
            // columns[p][a] → selection rows n[a][p].
            let rows: Vec<Vec<i32>> = (0..k)
                .map(|a| (0..n - 1).map(|p| columns[p][a]).collect())
                .collect();
            Ok(Selected {
                selection: IntegerSelection::new(rows)?,
                grid_points: size * (n - 1),
                amplitude: None,
            })
        }
        Strategy::ExhaustiveScan => {
            if n != 2 {
                return Err(CoreError::InvalidArgument(
                    "exhaustive amplitude scan is defined for two-level systems only".into(),
                ));
            }
            let size = grid_size(k, radius);
            let best = (0..size)
                .into_par_iter()
                .map(|idx| {
                    let ns = grid_point(idx, k, radius);
                    let sel = IntegerSelection::two_level(ns.clone());
                    let (_, _, _, amp) = sys.two_level_metrics(&sel);
                    let l1: i32 = ns.iter().map(|v| v.abs()).sum();
                    (amp, l1, ns)
                })
                .reduce_with(|a, b| if better(&a, &b) { a } else { b })
                .expect("grid is never empty");
            Ok(Selected {
                selection: IntegerSelection::two_level(best.2),
                grid_points: size,
                amplitude: Some(best.0),
            })
        }
    }
}

/// All selections on the grid `[−radius, radius]^K` whose detuning matches
/// that of `base` (two-level systems; the base is included, sorted
/// lexicographically).
///
/// When the system declares a fundamental wavenumber, every mode frequency
/// is an exact integer multiple of it and degeneracy `Σ n_a m_a = target`
/// is decided in integer arithmetic. Otherwise a floating comparison with
/// relative tolerance `tol` (scaled by the largest mode frequency) is used.
pub fn enumerate_degenerate(
    sys: &RwaSystem,
    base: &IntegerSelection,
    radius: u32,
    tol: f64,
) -> Result<Vec<IntegerSelection>> {
    if sys.n_levels() != 2 {
        return Err(CoreError::InvalidArgument(
            "degenerate enumeration is defined for two-level systems only".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(CoreError::InvalidArgument(
            "degeneracy tolerance must be positive".into(),
        ));
    }
    let k = sys.n_modes();
    if base.n_modes() != k || base.pair_count() != 1 {
        return Err(CoreError::DimensionMismatch {
            expected: k,
            got: base.n_modes(),
        });
    }
    let radius = radius as i32;
    let size = grid_size(k, radius);

    let matches: Vec<Vec<i32>> = if let Some(multiples) = sys.harmonic_multiples() {
        let target: i64 = (0..k)
            .map(|a| base.full(a, 0, 1) as i64 * multiples[a])
            .sum();
        (0..size)
            .into_par_iter()
            .filter_map(|idx| {
                let ns = grid_point(idx, k, radius);
                let s: i64 = ns
                    .iter()
                    .enumerate()
                    .map(|(a, &na)| na as i64 * multiples[a])
                    .sum();
                (s == target).then_some(ns)
            })
            .collect()
    } else {
        let q_max = (0..k).map(|a| sys.mode_q(a)).fold(0.0_f64, f64::max);
        let target = sys.detuning(base, 0, 1);
        let abs_tol = tol * q_max;
        (0..size)
            .into_par_iter()
            .filter_map(|idx| {
                let ns = grid_point(idx, k, radius);
                let sel = IntegerSelection::two_level(ns.clone());
                let det = sys.detuning(&sel, 0, 1);
                ((det - target).abs() <= abs_tol).then_some(ns)
            })
            .collect()
    };

    let mut out: Vec<IntegerSelection> = matches
        .into_iter()
        .map(IntegerSelection::two_level)
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_consistency() {
        let sel = IntegerSelection::new(vec![vec![1, -2, 3], vec![0, 4, -1]]).unwrap();
        for a in 0..2 {
            let per_state = sel.per_state(a);
            assert_eq!(*per_state.last().unwrap(), 0, "anchor must be zero");
            for i in 0..4 {
                for l in 0..4 {
                    for j in 0..4 {
                        assert_eq!(
                            sel.full(a, i, j),
                            sel.full(a, i, l) + sel.full(a, l, j),
                            "chain rule failed a={a} i={i} l={l} j={j}"
                        );
                    }
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(sel.full(a, i, j), per_state[i] - per_state[j]);
                }
            }
        }
    }

    #[test]
    fn superdiagonal_recovers_inputs() {
        let sel = IntegerSelection::new(vec![vec![2, -1]]).unwrap();
        assert_eq!(sel.full(0, 0, 1), 2);
        assert_eq!(sel.full(0, 1, 2), -1);
        assert_eq!(sel.full(0, 0, 2), 1);
        assert_eq!(sel.full(0, 2, 0), -1);
        assert_eq!(sel.full(0, 1, 1), 0);
    }

    #[test]
    fn malformed_selections_rejected() {
        assert!(IntegerSelection::new(vec![]).is_err());
        assert!(IntegerSelection::new(vec![vec![]]).is_err());
        assert!(IntegerSelection::new(vec![vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn grid_enumeration_covers_hypercube() {
        let mut seen = std::collections::HashSet::new();
        for idx in 0..grid_size(3, 1) {
            let p = grid_point(idx, 3, 1);
            assert!(p.iter().all(|&v| (-1..=1).contains(&v)));
            seen.insert(p);
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn preference_order_is_total_and_deterministic() {
        let a = (1.0, 2, vec![1, 1]);
        let b = (1.0, 1, vec![0, 2]);
        let c = (1.0, 1, vec![1, -1]);
        assert!(better(&b, &a));
        assert!(better(&b, &c));
        assert!(!better(&c, &b));
        assert!(better(&(2.0, 9, vec![2, 2]), &b));
    }

    use crate::linalg::{CMatrix, eig_hermitian};
    use crate::perturbation::FourierMode;
    use num_complex::Complex64;

    fn toy_system(level_gaps: &[f64], qs: &[f64], seed: u64) -> RwaSystem {
        let n = level_gaps.len() + 1;
        let mut levels = vec![0.0];
        for &g in level_gaps {
            levels.push(levels.last().unwrap() + g);
        }
        let h = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from(levels[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let basis = eig_hermitian(&h).unwrap();
        let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).max(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let modes = qs
            .iter()
            .map(|&q| {
                let c = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
                FourierMode::new(q, c).unwrap()
            })
            .collect();
        RwaSystem::new(basis, modes).unwrap()
    }

    #[test]
    fn manual_strategy_validates_shape() {
        let sys = toy_system(&[1.0, 2.0], &[0.9], 3);
        let good = IntegerSelection::new(vec![vec![1, -2]]).unwrap();
        let picked = select_integers(&sys, Strategy::Manual(good.clone()), 0).unwrap();
        assert_eq!(picked.selection, good);
        assert_eq!(picked.grid_points, 1);
        let wrong_modes = IntegerSelection::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(select_integers(&sys, Strategy::Manual(wrong_modes), 0).is_err());
        let wrong_pairs = IntegerSelection::new(vec![vec![1]]).unwrap();
        assert!(select_integers(&sys, Strategy::Manual(wrong_pairs), 0).is_err());
    }

    #[test]
    fn nearest_resonance_minimizes_each_pair_detuning() {
        let sys = toy_system(&[3.7, 1.3], &[1.0, 0.45], 7);
        let radius = 5u32;
        let picked = select_integers(&sys, Strategy::NearestResonance, radius).unwrap();
        // Brute-force oracle per pair.
        for p in 0..2 {
            let got = sys.detuning(&picked.selection, p, p + 1).abs();
            let mut best = f64::INFINITY;
            for n1 in -5i32..=5 {
                for n2 in -5i32..=5 {
                    let det = sys.delta_k(p, p + 1)
                        + n1 as f64 * sys.mode_q(0)
                        + n2 as f64 * sys.mode_q(1);
                    best = best.min(det.abs());
                }
            }
            assert!(
                (got - best).abs() <= 1e-12 * best.max(1.0),
                "pair {p}: got |detuning| {got}, oracle {best}"
            );
        }
    }

    #[test]
    fn exhaustive_scan_maximizes_amplitude() {
        let sys = toy_system(&[2.05], &[1.0, 0.7], 11);
        let radius = 3u32;
        let picked = select_integers(&sys, Strategy::ExhaustiveScan, radius).unwrap();
        let amp = picked.amplitude.expect("scan reports amplitude");
        // Brute-force oracle over the same grid.
        let mut best = f64::NEG_INFINITY;
        for n1 in -3i32..=3 {
            for n2 in -3i32..=3 {
                let sel = IntegerSelection::two_level(vec![n1, n2]);
                let (_, _, _, a) = sys.two_level_metrics(&sel);
                best = best.max(a);
            }
        }
        assert!((amp - best).abs() <= 1e-12 * best.max(f64::MIN_POSITIVE));
        let (_, _, _, achieved) = sys.two_level_metrics(&picked.selection);
        assert_eq!(achieved, amp);
        assert_eq!(picked.grid_points, 49);
        // Not defined for three levels.
        let sys3 = toy_system(&[1.0, 1.0], &[0.9], 13);
        assert!(select_integers(&sys3, Strategy::ExhaustiveScan, 1).is_err());
    }

    #[test]
    fn degenerate_enumeration_integer_path() {
        // Modes at q1, 2q1, 3q1: Σ n_a m_a must reproduce the base target.
        let q1 = 0.621;
        let sys = toy_system(&[1.9], &[q1, 2.0 * q1, 3.0 * q1], 17)
            .with_fundamental(q1)
            .unwrap();
        let base = IntegerSelection::two_level(vec![1, 1, -1]);
        let family = enumerate_degenerate(&sys, &base, 2, 1e-9).unwrap();
        // Oracle: all grid points with n1 + 2 n2 + 3 n3 == 0.
        let mut count = 0;
        for n1 in -2i64..=2 {
            for n2 in -2i64..=2 {
                for n3 in -2i64..=2 {
                    if n1 + 2 * n2 + 3 * n3 == 0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(family.len(), count);
        assert!(family.contains(&base));
        // Sorted and unique.
        for w in family.windows(2) {
            assert!(w[0] < w[1]);
        }
        // Every member shares the base detuning exactly.
        let target = sys.detuning(&base, 0, 1);
        for sel in &family {
            assert!((sys.detuning(sel, 0, 1) - target).abs() <= 1e-12 * target.abs().max(1.0));
        }
    }

    #[test]
    fn degenerate_enumeration_incommensurate_is_singleton() {
        // q2/q1 irrational: no other grid point can share the detuning.
        let sys = toy_system(&[1.9], &[1.0, std::f64::consts::SQRT_2], 19);
        let base = IntegerSelection::two_level(vec![2, -1]);
        let family = enumerate_degenerate(&sys, &base, 6, 1e-9).unwrap();
        assert_eq!(family, vec![base]);
    }
}
