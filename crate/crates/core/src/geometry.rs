//! Descent-cone geometry: subdifferential models, Gaussian-interval
//! expectations, and Monte-Carlo width estimation.
//!
//! For each regularizer `f` the subdifferential at the target `x⋆` decomposes
//! per component into an interval `[c_i − r_i, c_i + r_i]`. The cone it
//! generates, `cone ∂f(x⋆) = {d : d_i ∈ [t(c_i − r_i), t(c_i + r_i)], t ≥ 0}`,
//! is the polar of the descent cone of `f` at `x⋆` (when `0 ∉ ∂f(x⋆)`), so
//!
//! ```text
//!   w(T_f(x⋆))² ≤ E_g ‖g − Π_{cone ∂f(x⋆)}(g)‖²
//!               = E_g  min_{t ≥ 0}  Σ_i dist(g_i, [t(c_i − r_i), t(c_i + r_i)])²
//! ```
//!
//! by Jensen's inequality. Everything here estimates or evaluates the right
//! hand side: [`dist_to_cone_sq`] solves the inner minimization over `t`,
//! [`mc_width_sq`] averages it over Gaussian draws, and
//! [`expected_interval_dist_sq_exact`] / [`expected_interval_dist_sq_bound`]
//! give the per-component expectations (exact, and the closed-form upper
//! bounds used by the measurement bounds) for a *fixed* interval.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{SignalPair, SupportProfile};

const SQRT_2PI: f64 = 2.5066282746310002; // √(2π)

/// Standard normal density φ.
fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Gaussian upper-tail probability Q(x) = P(g > x), computed through `erfc`
/// for accuracy in the far tail (never as `1 − CDF`).
fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Sign with `sgn(0) = 0` (unlike `f64::signum`).
pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Which regularizer's subdifferential a [`ConeModel`] represents.
///
/// * `L1` — ‖x‖₁ (no prior; the β → 0 limit)
/// * `F1` — ‖x‖₁ + β‖x − w‖₁
/// * `F2` — ‖x‖₁ + (β/2)‖x − w‖₂²
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    L1,
    F1,
    F2,
}

/// Per-component interval representation `[c_i − r_i, c_i + r_i]` of
/// `∂f(x⋆)`; the represented cone is the set of `d` with
/// `d_i ∈ [t(c_i − r_i), t(c_i + r_i)]` for some common `t ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeModel {
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    pub label: ConeKind,
}

/// Builds the subdifferential interval model of the chosen regularizer at
/// `x⋆`. With `d_i = x⋆_i − w_i`, the components are:
///
/// ```text
///   f1:  i ∈ IJ   → (sgn x⋆_i + β·sgn d_i, 0)      f2:  i ∈ I  → (sgn x⋆_i + β·d_i, 0)
///        i ∈ IJc  → (sgn x⋆_i, β)                       i ∈ Ic → (−β·w_i, 1)
///        i ∈ IcJ  → (β·sgn d_i, 1)
///        i ∈ IcJc → (0, β + 1)                     l1:  i ∈ I  → (sgn x⋆_i, 0)
///                                                       i ∈ Ic → (0, 1)
/// ```
///
/// Panics if `beta <= 0` for the prior-aware kinds.
pub fn cone_model(pair: &SignalPair, profile: &SupportProfile, beta: f64, which: ConeKind) -> ConeModel {
    if matches!(which, ConeKind::F1 | ConeKind::F2) {
        assert!(beta > 0.0, "beta must be positive for prior-aware regularizers");
    }
    let mut centers = Vec::with_capacity(pair.n);
    let mut radii = Vec::with_capacity(pair.n);
    for idx in 0..pair.n {
        let x = pair.x_star[idx];
        let d = x - pair.w[idx];
        let in_i = profile.contains_i(idx);
        let in_j = profile.contains_j(idx);
        let (c, r) = match which {
            ConeKind::L1 => {
                if in_i {
                    (sgn(x), 0.0)
                } else {
                    (0.0, 1.0)
                }
            }
            ConeKind::F1 => match (in_i, in_j) {
                (true, true) => (sgn(x) + beta * sgn(d), 0.0),
                (true, false) => (sgn(x), beta),
                (false, true) => (beta * sgn(d), 1.0),
                (false, false) => (0.0, beta + 1.0),
            },
            ConeKind::F2 => {
                if in_i {
                    (sgn(x) + beta * d, 0.0)
                } else {
                    (-beta * pair.w[idx], 1.0)
                }
            }
        };
        centers.push(c);
        radii.push(r);
    }
    ConeModel { centers, radii, label: which }
}

/// Whether `0 ∈ ∂f(x⋆)` (a *degenerate* model: the descent cone is the whole
/// space and no finite width bound exists). Requires nonempty `I` and `J`.
///
/// * `f1` is degenerate exactly when `h̄ = 0` and `β = 1`;
/// * `f2` is degenerate unless some `i ∈ IJ` has
///   `β ≠ sgn(x⋆_i)/(w_i − x⋆_i)` or some `i ∈ Ic` has `β·|w_i| > 1`;
/// * `l1` is never degenerate here (`I ≠ ∅` means `x⋆ ≠ 0`).
pub fn zero_in_subdiff(pair: &SignalPair, profile: &SupportProfile, beta: f64, which: ConeKind) -> Result<bool> {
    if profile.i.is_empty() || profile.j.is_empty() {
        return Err(Error::InvalidInput(
            "degeneracy test requires x_star != 0 and w != x_star (nonempty I and J)".into(),
        ));
    }
    match which {
        ConeKind::L1 => Ok(false),
        ConeKind::F1 => Ok(profile.bad_set.is_empty() && beta == 1.0),
        ConeKind::F2 => {
            let exists_ij = profile.ij().iter().any(|&i| {
                let x = pair.x_star[i];
                beta != sgn(x) / (pair.w[i] - x)
            });
            let exists_ic = profile.ic.iter().any(|&i| beta * pair.w[i].abs() > 1.0);
            Ok(!(exists_ij || exists_ic))
        }
    }
}

fn dist_sq_at(g: &[f64], cone: &ConeModel, t: f64) -> f64 {
    let mut acc = 0.0;
    for ((&gk, &c), &r) in g.iter().zip(&cone.centers).zip(&cone.radii) {
        let lo = t * (c - r);
        let hi = t * (c + r);
        let d = if gk < lo {
            lo - gk
        } else if gk > hi {
            gk - hi
        } else {
            0.0
        };
        acc += d * d;
    }
    acc
}

/// Squared Euclidean distance from `g` to the cone represented by `cone`:
/// `min_{t ≥ 0} D(t)` with `D(t) = Σ_i dist(g_i, [t(c_i−r_i), t(c_i+r_i)])²`.
///
/// `D` is convex in `t` (each set `{(t, x) : x ∈ t·[c−r, c+r], t ≥ 0}` is a
/// convex cone), so a bracketed golden-section search suffices: the bracket
/// `[0, hi]` doubles `hi` until `D` stops decreasing, then the section search
/// runs to relative accuracy `1e-10` in `t`.
pub fn dist_to_cone_sq(g: &[f64], cone: &ConeModel) -> f64 {
    assert_eq!(g.len(), cone.centers.len(), "dimension mismatch");
    let d = |t: f64| dist_sq_at(g, cone, t);

    let mut hi = 1.0;
    let mut f_hi = d(hi);
    for _ in 0..200 {
        let f_next = d(2.0 * hi);
        if f_next >= f_hi {
            break;
        }
        hi *= 2.0;
        f_hi = f_next;
    }
    hi *= 2.0;

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut lo = 0.0f64;
    let mut a = hi - INV_PHI * hi;
    let mut b = INV_PHI * hi;
    let mut fa = d(a);
    let mut fb = d(b);
    while hi - lo > 1e-10 * hi.max(1.0) {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = lo + (1.0 - INV_PHI) * (hi - lo);
            fa = d(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = d(b);
        }
    }
    d(0.5 * (lo + hi)).min(d(0.0)).min(fa).min(fb)
}

/// Monte-Carlo estimate of `E_g[dist(g, cone)²]` over standard Gaussian
/// vectors, returning `(mean, standard_error)`.
///
/// Deterministic for a given `(seed, trials)` regardless of thread count:
/// trials are grouped in batches of 256, batch `b` draws from ChaCha12 stream
/// `b` of the given seed, and partial sums are reduced in batch order.
pub fn mc_width_sq(cone: &ConeModel, trials: usize, seed: u64) -> (f64, f64) {
    assert!(trials >= 1, "need at least one trial");
    const BATCH: usize = 256;
    let n = cone.centers.len();
    let n_batches = trials.div_ceil(BATCH);
    let partials: Vec<(f64, f64)> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(bi as u64);
            let count = BATCH.min(trials - bi * BATCH);
            let mut g = vec![0.0f64; n];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                for gi in g.iter_mut() {
                    *gi = StandardNormal.sample(&mut rng);
                }
                let v = dist_to_cone_sq(&g, cone);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let t = trials as f64;
    let mean = sum / t;
    let se = if trials > 1 {
        (((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0) / t).sqrt()
    } else {
        0.0
    };
    (mean, se)
}

/// `E[(g − u)²; g > u] = (1 + u²)Q(u) − u·φ(u)`.
fn upper_tail_sq(u: f64) -> f64 {
    (1.0 + u * u) * q_func(u) - u * phi(u)
}

/// `E[(l − g)²; g < l] = l·φ(l) + (1 + l²)Q(−l)`.
fn lower_tail_sq(l: f64) -> f64 {
    l * phi(l) + (1.0 + l * l) * q_func(-l)
}

/// Exact `E_g[dist(g, [a − b, a + b])²]` for `g ~ N(0,1)`.
///
/// For `b = 0` the value is `a² + 1`, returned directly to avoid cancellation
/// between the two tail terms.
pub fn expected_interval_dist_sq_exact(a: f64, b: f64) -> f64 {
    assert!(b >= 0.0, "interval radius must be nonnegative");
    if b == 0.0 {
        return a * a + 1.0;
    }
    upper_tail_sq(a + b) + lower_tail_sq(a - b)
}

/// Closed-form upper bound on `E_g[dist(g, [a − b, a + b])²]` for `b > 0`,
/// by position of the interval relative to 0:
///
/// ```text
///   a + b = 0 (interval ends at 0):  φ(b−a)/(b−a) + 1/2
///   a − b = 0 (interval starts at 0): φ(a+b)/(a+b) + 1/2
///   |a| < b   (0 interior):           φ(b−a)/(b−a) + φ(a+b)/(a+b)
///   a + b < 0 (interval left of 0):   1 + (a+b)² + φ(b−a)/(b−a)
///   a − b > 0 (interval right of 0):  1 + (a−b)² + φ(a+b)/(a+b)
/// ```
///
/// These always dominate [`expected_interval_dist_sq_exact`]; the interior
/// case is what makes width bounds scale with a logarithm instead of a count.
pub fn expected_interval_dist_sq_bound(a: f64, b: f64) -> f64 {
    assert!(b > 0.0, "bound needs a nondegenerate interval");
    let u = a + b;
    let l = a - b;
    if u == 0.0 {
        phi(l) / (-l) + 0.5
    } else if l == 0.0 {
        phi(u) / u + 0.5
    } else if a.abs() < b {
        phi(l) / (-l) + phi(u) / u
    } else if u < 0.0 {
        1.0 + u * u + phi(l) / (-l)
    } else {
        1.0 + l * l + phi(u) / u
    }
}

/// The sandwich `x/(1+x²)·φ(x) ≤ Q(x) ≤ φ(x)/x` for `x > 0`, returned as
/// `(lower, Q(x), upper)`; both ends become sharp as `x → ∞`.
pub fn q_function_bounds_check(x: f64) -> (f64, f64, f64) {
    assert!(x > 0.0, "tail bounds need x > 0");
    (x / (1.0 + x * x) * phi(x), q_func(x), phi(x) / x)
}

/// Maximum of `(1 − 1/x)/√(π·ln x)` over a grid in `(1, ∞)`, returned as
/// `(max, argmax)`.
///
/// This ratio is what lets the width bounds replace `1/√(2π)` factors by the
/// round constant `2/5`: its supremum over all `x > 1` is `1/√(2π)` ≈ 0.3989,
/// attained where `2·ln x = x − 1` (between 2 and 11).
pub fn log_gap_ratio_max(grid: &[f64]) -> (f64, f64) {
    assert!(!grid.is_empty(), "empty grid");
    let mut best = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for &x in grid {
        assert!(x > 1.0, "grid must lie strictly right of 1");
        let v = (1.0 - 1.0 / x) / (std::f64::consts::PI * x.ln()).sqrt();
        if v > best {
            best = v;
            at = x;
        }
    }
    (best, at)
}

/// Expected Euclidean norm `λ_m = E‖g‖₂` of an `m`-dimensional standard
/// Gaussian vector, via the exact gamma ratio `√2·Γ((m+1)/2)/Γ(m/2)`
/// evaluated in log space. Satisfies `m/√(m+1) ≤ λ_m ≤ √m`.
pub fn expected_gaussian_norm(m: usize) -> f64 {
    assert!(m >= 1, "dimension must be positive");
    let m = m as f64;
    (0.5 * std::f64::consts::LN_2 + ln_gamma((m + 1.0) / 2.0) - ln_gamma(m / 2.0)).exp()
}
