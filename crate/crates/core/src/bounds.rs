//! Closed-form upper bounds on squared Gaussian widths of descent cones,
//! their applicability conditions, and the measurement counts they imply.
//!
//! Three regularizer families are covered, all for recovery of `x⋆` from
//! Gaussian measurements `y = Ax⋆`:
//!
//! * plain ℓ1 ([`cs_width_bound`]): `2s·ln(n/s) + (7/5)s`;
//! * ℓ1 + β·ℓ1-prior ([`l1l1_width_bound`], [`l1l1_simplified_bound`]):
//!   five cases split by `β = 1`, `β < 1`, `β > 1`, with bounds driven by the
//!   cardinalities in [`CardinalityProfile`] only;
//! * ℓ1 + (β/2)·ℓ2²-prior ([`l1l2_width_bound`]): two cases whose bounds
//!   depend on the actual magnitudes of `x⋆ − w` through `v_β`.
//!
//! Each evaluated case yields a [`BoundResult`]: the squared-width bound, a
//! [`CaseLabel`], whether the case's applicability inequality holds, and the
//! implied number of measurements. Natural logarithms throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ConeKind};
use crate::model::{CardinalityProfile, SignalPair, SupportProfile};

/// Relative tolerance for `|w_i| = 1/β` membership tests (exact equality is
/// measure-zero for random data, but constructed inputs do hit it).
const K_EQ_REL_TOL: f64 = 1e-12;

/// Identifies which bound formula produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "CS")]
    Cs,
    #[serde(rename = "L1L1_beta1")]
    L1L1Beta1,
    #[serde(rename = "L1L1_2a")]
    L1L1Case2a,
    #[serde(rename = "L1L1_2b")]
    L1L1Case2b,
    #[serde(rename = "L1L1_3a")]
    L1L1Case3a,
    #[serde(rename = "L1L1_3b")]
    L1L1Case3b,
    #[serde(rename = "L1L2_1")]
    L1L2Case1,
    #[serde(rename = "L1L2_2")]
    L1L2Case2,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Cs => "CS",
            CaseLabel::L1L1Beta1 => "L1L1_beta1",
            CaseLabel::L1L1Case2a => "L1L1_2a",
            CaseLabel::L1L1Case2b => "L1L1_2b",
            CaseLabel::L1L1Case3a => "L1L1_3a",
            CaseLabel::L1L1Case3b => "L1L1_3b",
            CaseLabel::L1L2Case1 => "L1L2_1",
            CaseLabel::L1L2Case2 => "L1L2_2",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated width bound and the measurement counts it implies.
///
/// `m_noiseless = ceil(width_sq_bound + 1)` suffices for exact recovery with
/// high probability; with noise level bounded by `σ` and accuracy parameter
/// `ε ∈ (0,1)`, `m_noisy = ceil((width_sq_bound + 3/2)/(1−ε)²)` yields error
/// `‖x̂ − x⋆‖ ≤ 2σ/ε` (see [`with_epsilon`](Self::with_epsilon)).
///
/// `beta` is the prior weight the bound was evaluated at; the plain-ℓ1 bound
/// carries `beta = 0` (its no-prior limit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub width_sq_bound: f64,
    pub case_label: CaseLabel,
    pub condition_holds: bool,
    pub beta: f64,
    pub m_noiseless: u64,
    pub m_noisy: Option<u64>,
}

impl BoundResult {
    pub fn new(width_sq_bound: f64, case_label: CaseLabel, condition_holds: bool, beta: f64) -> Self {
        BoundResult {
            width_sq_bound,
            case_label,
            condition_holds,
            beta,
            m_noiseless: (width_sq_bound + 1.0).ceil() as u64,
            m_noisy: None,
        }
    }

    /// Fills in `m_noisy` for the given accuracy parameter `ε ∈ (0,1)`.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        let denom = (1.0 - epsilon) * (1.0 - epsilon);
        self.m_noisy = Some(((self.width_sq_bound + 1.5) / denom).ceil() as u64);
        Ok(self)
    }

    /// Ceiling of the squared-width bound itself (without the recovery `+1`).
    pub fn rounded_width(&self) -> u64 {
        self.width_sq_bound.ceil() as u64
    }
}

/// Squared-width bound `2s·ln(n/s) + (7/5)s` for plain ℓ1 recovery of an
/// `s`-sparse vector in dimension `n`.
pub fn cs_width_bound(n: usize, s: usize) -> Result<f64> {
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 0 < s <= n, got s={s}, n={n}")));
    }
    let (nf, sf) = (n as f64, s as f64);
    Ok(2.0 * sf * (nf / sf).ln() + 1.4 * sf)
}

/// [`cs_width_bound`] packaged as a [`BoundResult`] (unconditional).
pub fn cs_bound_result(n: usize, s: usize) -> Result<BoundResult> {
    Ok(BoundResult::new(cs_width_bound(n, s)?, CaseLabel::Cs, true, 0.0))
}

/// Checks that a [`CardinalityProfile`] is internally consistent and
/// compatible with dimension `n`. `min_l` is 1 for the ℓ1-ℓ1 bounds (which
/// assume `w ≠ x⋆`) and 0 for ℓ1-ℓ2 (which tolerates `w = x⋆`).
fn validate_card(card: &CardinalityProfile, n: usize, min_l: usize) -> Result<()> {
    if card.s == 0 {
        return Err(Error::InvalidInput("s = 0: x_star must be nonzero".into()));
    }
    if card.l < min_l {
        return Err(Error::InvalidInput("l = 0: prior must differ from x_star somewhere".into()));
    }
    let hh = card.h + card.h_bar;
    if hh > card.s || hh > card.l {
        return Err(Error::InvalidInput(format!(
            "h + h_bar = {hh} exceeds min(s, l) = {}",
            card.s.min(card.l)
        )));
    }
    if card.q + hh != card.s + card.l {
        return Err(Error::InvalidInput(format!(
            "inconsistent cardinalities: q + h + h_bar = {} but s + l = {}",
            card.q + hh,
            card.s + card.l
        )));
    }
    if card.xi != (card.q + hh) as i64 - 2 * card.s as i64 {
        return Err(Error::InvalidInput(format!(
            "xi = {} does not match q + h + h_bar - 2s = {}",
            card.xi,
            (card.q + hh) as i64 - 2 * card.s as i64
        )));
    }
    if card.q >= n {
        return Err(Error::InvalidInput(format!("need q < n, got q={}, n={n}", card.q)));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("beta must be positive and finite, got {beta}")));
    }
    Ok(())
}

/// Simplified `β = 1` bound for the ℓ1-ℓ1 regularizer. With
/// `s_eff = s + ξ/2 = (q + h + h̄)/2`, a number of measurements
///
/// ```text
///   m ≥ 2h̄·ln(n/s_eff) + (7/5)·s_eff + 1
/// ```
///
/// suffices; the returned `width_sq_bound` is that right-hand side minus 1,
/// so `m_noiseless` reproduces the full expression's ceiling. Only the count
/// of bad components `h̄` multiplies the log — not the sparsity `s` as in
/// [`cs_width_bound`].
pub fn l1l1_simplified_bound(card: &CardinalityProfile, n: usize) -> Result<BoundResult> {
    validate_card(card, n, 1)?;
    if card.h_bar == 0 {
        return Err(Error::Degenerate(
            "h_bar = 0: at beta = 1 the subdifferential contains 0 and no finite bound exists".into(),
        ));
    }
    let s_eff = card.s as f64 + card.xi as f64 / 2.0;
    if s_eff <= 0.0 {
        return Err(Error::InvalidInput("s + xi/2 must be positive".into()));
    }
    let width_sq = 2.0 * card.h_bar as f64 * (n as f64 / s_eff).ln() + 1.4 * s_eff;
    Ok(BoundResult::new(width_sq, CaseLabel::L1L1Beta1, true, 1.0))
}

fn p_sum(card: &CardinalityProfile) -> f64 {
    (card.q + card.h + card.h_bar) as f64
}

fn case1_width(card: &CardinalityProfile, n: usize) -> f64 {
    let p = p_sum(card);
    2.0 * card.h_bar as f64 * (2.0 * n as f64 / p).ln() + 0.7 * p
}

fn case2a_width(card: &CardinalityProfile, n: usize, beta: f64) -> f64 {
    let p = p_sum(card);
    let r = ((1.0 - beta) / (1.0 + beta)).powi(2);
    2.0 * (card.h_bar as f64 + (card.s - card.h_bar) as f64 * r) * (2.0 * n as f64 / p).ln()
        + card.s as f64
        + 0.4 * p
}

fn case2b_width(card: &CardinalityProfile, beta: f64) -> f64 {
    let r = ((1.0 + beta) / (1.0 - beta)).powi(2);
    2.0 * (card.h_bar as f64 * r + (card.s - card.h_bar) as f64) * (card.q as f64 / card.s as f64).ln()
        + 1.4 * card.s as f64
}

fn case3a_width(card: &CardinalityProfile, n: usize, beta: f64) -> f64 {
    let p = p_sum(card);
    let r = ((beta - 1.0) / (beta + 1.0)).powi(2);
    2.0 * (card.h_bar as f64 + (card.q + card.h - card.s) as f64 * r) * (2.0 * n as f64 / p).ln()
        + card.l as f64
        + 0.4 * p
}

fn case3b_width(card: &CardinalityProfile, beta: f64) -> f64 {
    let hh = (card.h + card.h_bar) as f64;
    let r = ((beta + 1.0) / (beta - 1.0)).powi(2);
    2.0 * (card.h_bar as f64 * r + (card.q + card.h - card.s) as f64) * (card.s as f64 / hh).ln()
        + card.l as f64
        + 0.4 * hh
}

/// Left side shared by the two `β < 1` conditions: `(q − s)/(2n − (q+h+h̄))`.
fn cond2_lhs(card: &CardinalityProfile, n: usize) -> f64 {
    (card.q - card.s) as f64 / (2.0 * n as f64 - p_sum(card))
}

/// Left side shared by the two `β > 1` conditions: `(s − (h+h̄))/(2n − (q+h+h̄))`.
fn cond3_lhs(card: &CardinalityProfile, n: usize) -> f64 {
    (card.s - (card.h + card.h_bar)) as f64 / (2.0 * n as f64 - p_sum(card))
}

fn cond2a_rhs(card: &CardinalityProfile, n: usize, beta: f64) -> f64 {
    let p = p_sum(card);
    (1.0 - beta) / (1.0 + beta) * (p / (2.0 * n as f64)).powf(4.0 * beta / (beta + 1.0).powi(2))
}

fn cond2b_rhs(card: &CardinalityProfile, beta: f64) -> f64 {
    (1.0 - beta) / (1.0 + beta)
        * (card.s as f64 / card.q as f64).powf(4.0 * beta / (1.0 - beta).powi(2))
}

fn cond3a_rhs(card: &CardinalityProfile, n: usize, beta: f64) -> f64 {
    let p = p_sum(card);
    (beta - 1.0) / (beta + 1.0) * (p / (2.0 * n as f64)).powf(4.0 * beta / (beta + 1.0).powi(2))
}

fn cond3b_rhs(card: &CardinalityProfile, beta: f64) -> f64 {
    (beta - 1.0) / (beta + 1.0)
        * ((card.h + card.h_bar) as f64 / card.s as f64).powf(4.0 * beta / (beta - 1.0).powi(2))
}

/// Evaluates every structurally valid ℓ1-ℓ1 case at this `β`, reporting each
/// case's width bound together with whether its applicability inequality
/// holds (`condition_holds`); the `β = 1` case is unconditional.
///
/// Structural gating: `β = 1` → the bad-component case only (error if
/// `h̄ = 0`, which is degenerate); `β < 1` → cases labeled `L1L1_2a` and,
/// when `q > s`, `L1L1_2b`; `β > 1` → `L1L1_3a` and, when `s > h + h̄ > 0`,
/// `L1L1_3b`.
pub fn l1l1_width_bound_all(card: &CardinalityProfile, n: usize, beta: f64) -> Result<Vec<BoundResult>> {
    check_beta(beta)?;
    validate_card(card, n, 1)?;
    let mut out = Vec::new();
    if beta == 1.0 {
        if card.h_bar == 0 {
            return Err(Error::Degenerate(
                "h_bar = 0: at beta = 1 the subdifferential contains 0 and no finite bound exists".into(),
            ));
        }
        out.push(BoundResult::new(case1_width(card, n), CaseLabel::L1L1Beta1, true, beta));
    } else if beta < 1.0 {
        let holds = cond2_lhs(card, n) <= cond2a_rhs(card, n, beta);
        out.push(BoundResult::new(case2a_width(card, n, beta), CaseLabel::L1L1Case2a, holds, beta));
        if card.q > card.s {
            let holds = cond2_lhs(card, n) >= cond2b_rhs(card, beta);
            out.push(BoundResult::new(case2b_width(card, beta), CaseLabel::L1L1Case2b, holds, beta));
        }
    } else {
        let holds = cond3_lhs(card, n) <= cond3a_rhs(card, n, beta);
        out.push(BoundResult::new(case3a_width(card, n, beta), CaseLabel::L1L1Case3a, holds, beta));
        let hh = card.h + card.h_bar;
        if card.s > hh && hh > 0 {
            let holds = cond3_lhs(card, n) >= cond3b_rhs(card, beta);
            out.push(BoundResult::new(case3b_width(card, beta), CaseLabel::L1L1Case3b, holds, beta));
        }
    }
    Ok(out)
}

/// The applicable subset of [`l1l1_width_bound_all`]: every case whose
/// condition holds at this `β`. May be empty (the case conditions are not
/// guaranteed to cover every `β`); consumers typically take the minimum
/// `width_sq_bound` over the returned cases.
pub fn l1l1_width_bound(card: &CardinalityProfile, n: usize, beta: f64) -> Result<Vec<BoundResult>> {
    Ok(l1l1_width_bound_all(card, n, beta)?
        .into_iter()
        .filter(|b| b.condition_holds)
        .collect())
}

/// One row of [`l1l1_condition_scan`]: both sides of all four conditional
/// ℓ1-ℓ1 inequalities, evaluated verbatim at one `β`.
///
/// `lhs` is the left side for the family `β` belongs to (`β ≤ 1` → the
/// `(q−s)/(2n−(q+h+h̄))` form shared by `2a`/`2b`; `β > 1` → the
/// `(s−(h+h̄))/(2n−(q+h+h̄))` form shared by `3a`/`3b`); the `holds_*` flags
/// always compare each right side against its own family's left side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub beta: f64,
    pub lhs: f64,
    pub rhs_2a: f64,
    pub rhs_2b: f64,
    pub rhs_3a: f64,
    pub rhs_3b: f64,
    pub holds_2a: bool,
    pub holds_2b: bool,
    pub holds_3a: bool,
    pub holds_3b: bool,
}

/// Evaluates both sides of every conditional ℓ1-ℓ1 inequality over a β grid.
/// All four right sides are computed at every β (the raw formulas, with IEEE
/// limits at `β = 1`), so crossover points can be read off directly.
pub fn l1l1_condition_scan(
    card: &CardinalityProfile,
    n: usize,
    beta_grid: &[f64],
) -> Result<Vec<ConditionRow>> {
    validate_card(card, n, 1)?;
    let lhs2 = cond2_lhs(card, n);
    let lhs3 = cond3_lhs(card, n);
    beta_grid
        .iter()
        .map(|&beta| {
            check_beta(beta)?;
            let rhs_2a = cond2a_rhs(card, n, beta);
            let rhs_2b = cond2b_rhs(card, beta);
            let rhs_3a = cond3a_rhs(card, n, beta);
            let rhs_3b = cond3b_rhs(card, beta);
            Ok(ConditionRow {
                beta,
                lhs: if beta > 1.0 { lhs3 } else { lhs2 },
                rhs_2a,
                rhs_2b,
                rhs_3a,
                rhs_3b,
                holds_2a: lhs2 <= rhs_2a,
                holds_2b: lhs2 >= rhs_2b,
                holds_3a: lhs3 <= rhs_3a,
                holds_3b: lhs3 >= rhs_3b,
            })
        })
        .collect()
}

/// Magnitude-dependent quantities entering the ℓ1-ℓ2 bounds, for a given
/// prior weight `β`. The indices in `Ic∩J` are partitioned by how `|w_i|`
/// compares to `1/β` (relative tolerance 1e-12 for equality):
///
/// * `k_plus` / `k_minus`: `w_i > 1/β` / `w_i < −1/β`;
/// * `k_plus_eq` / `k_minus_eq`: `w_i = 1/β` / `w_i = −1/β`;
/// * `k_neq = k_plus ∪ k_minus`, `k_eq = k_plus_eq ∪ k_minus_eq`,
///   `k = k_neq ∪ k_eq` (all with `|w_i| ≥ 1/β`);
/// * `l`: the remainder, `|w_i| < 1/β`.
///
/// `v_beta` sums `(1 + β(x⋆_i − w_i))²` over `I₊`, `(1 − β(x⋆_i − w_i))²`
/// over `I₋`, and `(β|w_i| − 1)²` over `k_neq`; `w_bar = |w_k|` for the
/// `k ∈ Ic∩J` whose `|w_k|` is closest to `1/β` (ties: smallest index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1L2Profile {
    #[serde(rename = "K_eq")]
    pub k_eq: Vec<usize>,
    #[serde(rename = "K_neq")]
    pub k_neq: Vec<usize>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "K_plus")]
    pub k_plus: Vec<usize>,
    #[serde(rename = "K_minus")]
    pub k_minus: Vec<usize>,
    #[serde(rename = "K_plus_eq")]
    pub k_plus_eq: Vec<usize>,
    #[serde(rename = "K_minus_eq")]
    pub k_minus_eq: Vec<usize>,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub v_beta: f64,
    pub w_bar: f64,
    pub beta: f64,
}

fn close_to_threshold(wi_abs: f64, thr: f64) -> bool {
    (wi_abs - thr).abs() <= K_EQ_REL_TOL * thr.max(wi_abs)
}

fn v_beta_value(pair: &SignalPair, profile: &SupportProfile, k_neq: &[usize], beta: f64) -> f64 {
    let mut v = 0.0;
    for &i in &profile.i_plus {
        let t = 1.0 + beta * (pair.x_star[i] - pair.w[i]);
        v += t * t;
    }
    for &i in &profile.i_minus {
        let t = 1.0 - beta * (pair.x_star[i] - pair.w[i]);
        v += t * t;
    }
    for &i in k_neq {
        let t = beta * pair.w[i].abs() - 1.0;
        v += t * t;
    }
    v
}

fn build_l1l2_profile(
    pair: &SignalPair,
    profile: &SupportProfile,
    beta: f64,
    icj: &[usize],
) -> L1L2Profile {
    let thr = 1.0 / beta;
    let mut k_plus = Vec::new();
    let mut k_minus = Vec::new();
    let mut k_plus_eq = Vec::new();
    let mut k_minus_eq = Vec::new();
    let mut l = Vec::new();
    let mut best_gap = f64::INFINITY;
    let mut w_bar = 0.0;
    for &i in icj {
        let wi = pair.w[i];
        let wi_abs = wi.abs();
        if close_to_threshold(wi_abs, thr) {
            if wi > 0.0 {
                k_plus_eq.push(i);
            } else {
                k_minus_eq.push(i);
            }
        } else if wi_abs > thr {
            if wi > 0.0 {
                k_plus.push(i);
            } else {
                k_minus.push(i);
            }
        } else {
            l.push(i);
        }
        let gap = (wi_abs - thr).abs();
        if gap < best_gap {
            best_gap = gap;
            w_bar = wi_abs;
        }
    }
    let mut k_neq: Vec<usize> = k_minus.iter().chain(&k_plus).copied().collect();
    k_neq.sort_unstable();
    let mut k_eq: Vec<usize> = k_minus_eq.iter().chain(&k_plus_eq).copied().collect();
    k_eq.sort_unstable();
    let mut k: Vec<usize> = k_neq.iter().chain(&k_eq).copied().collect();
    k.sort_unstable();
    let v_beta = v_beta_value(pair, profile, &k_neq, beta);
    L1L2Profile {
        k_eq,
        k_neq,
        k,
        k_plus,
        k_minus,
        k_plus_eq,
        k_minus_eq,
        l,
        v_beta,
        w_bar,
        beta,
    }
}

/// Builds the [`L1L2Profile`] at weight `β`. Requires `Ic∩J ≠ ∅`
/// (equivalently `q > s`), otherwise `w_bar` is undefined.
pub fn l1l2_profile(pair: &SignalPair, profile: &SupportProfile, beta: f64) -> Result<L1L2Profile> {
    check_beta(beta)?;
    if profile.n() != pair.n {
        return Err(Error::InvalidInput("support profile does not match signal dimension".into()));
    }
    let icj = profile.ic_j();
    if icj.is_empty() {
        return Err(Error::InvalidInput(
            "Ic∩J is empty (q = s): w_bar is undefined; the width bound handles this case internally".into(),
        ));
    }
    Ok(build_l1l2_profile(pair, profile, beta, &icj))
}

/// Evaluates both ℓ1-ℓ2 cases at this `β`, reporting width bounds and
/// condition flags. With `bw = β·w̄` and lhs `(q−s)/(n−q)`:
///
/// * case `L1L2_1`: holds when `lhs ≤ |1−bw|·exp((bw² − 2bw)·ln(n/q))`;
///   width `2v_β·ln(n/q) + s + |K≠| + ½|K⁼| + (4/5)q`.
/// * case `L1L2_2` (needs `q > s` and `bw ≠ 1`): holds when
///   `lhs ≥ |1−bw|·exp(4(bw−2)bw/(1−bw)²·ln(q/s))`;
///   width `2v_β/(1−bw)²·ln(q/s) + |K≠| + ½|K⁼| + (9/5)s`.
///
/// When `q = s` the set `Ic∩J` is empty: `w̄` is then irrelevant, the first
/// case's condition holds trivially (its left side is 0) and the second case
/// does not arise. Errors if `0 ∈ ∂f(x⋆)` (degenerate prior weight).
pub fn l1l2_width_bound_all(
    pair: &SignalPair,
    profile: &SupportProfile,
    card: &CardinalityProfile,
    n: usize,
    beta: f64,
) -> Result<Vec<BoundResult>> {
    check_beta(beta)?;
    if pair.n != n || profile.n() != n {
        return Err(Error::InvalidInput("pair/profile dimension does not match n".into()));
    }
    validate_card(card, n, 0)?;
    if !profile.j.is_empty() && geometry::zero_in_subdiff(pair, profile, beta, ConeKind::F2)? {
        return Err(Error::Degenerate(
            "0 lies in the subdifferential at x_star for this beta; no finite width bound exists".into(),
        ));
    }
    let icj = profile.ic_j();
    let (v_beta, n_k_neq, n_k_eq, w_bar) = if icj.is_empty() {
        (v_beta_value(pair, profile, &[], beta), 0usize, 0usize, None)
    } else {
        let p = build_l1l2_profile(pair, profile, beta, &icj);
        (p.v_beta, p.k_neq.len(), p.k_eq.len(), Some(p.w_bar))
    };
    let (nf, qf, sf) = (n as f64, card.q as f64, card.s as f64);
    let lhs = (card.q - card.s) as f64 / (n - card.q) as f64;
    let k_terms = n_k_neq as f64 + 0.5 * n_k_eq as f64;

    let mut out = Vec::new();
    let cond1 = match w_bar {
        None => true,
        Some(wb) => {
            let bw = beta * wb;
            lhs <= (1.0 - bw).abs() * ((bw * bw - 2.0 * bw) * (nf / qf).ln()).exp()
        }
    };
    let width1 = 2.0 * v_beta * (nf / qf).ln() + sf + k_terms + 0.8 * qf;
    out.push(BoundResult::new(width1, CaseLabel::L1L2Case1, cond1, beta));

    if card.q > card.s {
        let wb = w_bar.expect("q > s implies Ic∩J nonempty");
        let bw = beta * wb;
        let one_minus = 1.0 - bw;
        if one_minus.abs() > K_EQ_REL_TOL * bw.abs().max(1.0) {
            let expo = 4.0 * (bw - 2.0) * bw / (one_minus * one_minus);
            let rhs = one_minus.abs() * (expo * (qf / sf).ln()).exp();
            let width2 = 2.0 * v_beta / (one_minus * one_minus) * (qf / sf).ln() + k_terms + 1.8 * sf;
            out.push(BoundResult::new(width2, CaseLabel::L1L2Case2, lhs >= rhs, beta));
        }
    }
    Ok(out)
}

/// The applicable subset of [`l1l2_width_bound_all`]; may be empty.
pub fn l1l2_width_bound(
    pair: &SignalPair,
    profile: &SupportProfile,
    card: &CardinalityProfile,
    n: usize,
    beta: f64,
) -> Result<Vec<BoundResult>> {
    Ok(l1l2_width_bound_all(pair, profile, card, n, beta)?
        .into_iter()
        .filter(|b| b.condition_holds)
        .collect())
}

/// One row of [`l1l2_condition_scan`]: both sides of the two ℓ1-ℓ2
/// applicability inequalities at one `β` (the profile, and hence `w̄` and the
/// K-sets, is rebuilt per β).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1L2ConditionRow {
    pub beta: f64,
    pub lhs: f64,
    pub rhs_1: f64,
    pub rhs_2: f64,
    pub holds_1: bool,
    pub holds_2: bool,
}

/// Scans the two ℓ1-ℓ2 conditions over a β grid. Requires `q > s` so that
/// `w̄` exists at every β (with `q = s` the first condition is trivially true
/// and there is nothing to scan).
pub fn l1l2_condition_scan(
    pair: &SignalPair,
    profile: &SupportProfile,
    card: &CardinalityProfile,
    n: usize,
    beta_grid: &[f64],
) -> Result<Vec<L1L2ConditionRow>> {
    if pair.n != n || profile.n() != n {
        return Err(Error::InvalidInput("pair/profile dimension does not match n".into()));
    }
    validate_card(card, n, 0)?;
    if card.q <= card.s {
        return Err(Error::InvalidInput("condition scan needs q > s (nonempty Ic∩J)".into()));
    }
    let icj = profile.ic_j();
    let (nf, qf, sf) = (n as f64, card.q as f64, card.s as f64);
    let lhs = (card.q - card.s) as f64 / (n - card.q) as f64;
    beta_grid
        .iter()
        .map(|&beta| {
            check_beta(beta)?;
            let prof = build_l1l2_profile(pair, profile, beta, &icj);
            let bw = beta * prof.w_bar;
            let rhs_1 = (1.0 - bw).abs() * ((bw * bw - 2.0 * bw) * (nf / qf).ln()).exp();
            let one_minus = 1.0 - bw;
            let rhs_2 = one_minus.abs()
                * ((4.0 * (bw - 2.0) * bw / (one_minus * one_minus)) * (qf / sf).ln()).exp();
            Ok(L1L2ConditionRow {
                beta,
                lhs,
                rhs_1,
                rhs_2,
                holds_1: lhs <= rhs_1,
                holds_2: lhs >= rhs_2,
            })
        })
        .collect()
}

/// The prior weight minimizing `v_β` when the K-sets are held fixed:
///
/// ```text
///   β⋆ = (1ᵀw_{K≠} + 1ᵀ(x⋆_{I₋} − w_{I₋}) − 1ᵀ(x⋆_{I₊} − w_{I₊}))
///        / (‖x⋆_I − w_I‖² + ‖w_{K≠}‖²)
/// ```
///
/// `K≠` itself depends on β, so the closed form is really a fixed-point
/// condition; here `K≠` is frozen at `reference_beta`. The numerator uses the
/// signed entries `w_{K≠}` as written, so the result can be nonpositive —
/// callers should treat such values as "no useful prior weight". Errors if
/// the denominator is zero (`x⋆ = w` on `I` and `K≠` empty: `v_β` constant).
pub fn beta_star(pair: &SignalPair, profile: &SupportProfile, reference_beta: f64) -> Result<f64> {
    check_beta(reference_beta)?;
    if profile.n() != pair.n {
        return Err(Error::InvalidInput("support profile does not match signal dimension".into()));
    }
    let thr = 1.0 / reference_beta;
    let mut num = 0.0;
    let mut den = 0.0;
    for &i in &profile.ic_j() {
        let wi = pair.w[i];
        let wi_abs = wi.abs();
        if wi_abs > thr && !close_to_threshold(wi_abs, thr) {
            num += wi;
            den += wi * wi;
        }
    }
    for &i in &profile.i {
        let d = pair.x_star[i] - pair.w[i];
        den += d * d;
    }
    for &i in &profile.i_minus {
        num += pair.x_star[i] - pair.w[i];
    }
    for &i in &profile.i_plus {
        num -= pair.x_star[i] - pair.w[i];
    }
    if den == 0.0 {
        return Err(Error::InvalidInput(
            "denominator is zero (x_star = w on its support and K_neq empty): v_beta does not depend on beta"
                .into(),
        ));
    }
    Ok(num / den)
}

/// Measurement count and success-probability lower bound for a cone of
/// squared width `width_sq` observed through `m` Gaussian measurements.
///
/// `m_required` is `ceil(width_sq + 1)` in the noiseless case, or
/// `ceil((width_sq + 3/2)/(1−ε)²)` when `epsilon` is supplied. The success
/// probability of recovery at `m` measurements is at least
/// `1 − exp(−½(λ_m − √width_sq − [ε√m])²)` whenever the squared argument is
/// nonnegative (otherwise 0 is returned), with `λ_m` the expected norm of an
/// `m`-dimensional Gaussian vector.
pub fn measurements_and_probability(
    width_sq: f64,
    m: usize,
    epsilon: Option<f64>,
) -> Result<(u64, f64)> {
    if width_sq < 0.0 || width_sq.is_nan() {
        return Err(Error::InvalidInput(format!("width_sq must be nonnegative, got {width_sq}")));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let m_required = match epsilon {
        None => (width_sq + 1.0).ceil() as u64,
        Some(e) => {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidInput(format!("epsilon must lie in (0,1), got {e}")));
            }
            ((width_sq + 1.5) / ((1.0 - e) * (1.0 - e))).ceil() as u64
        }
    };
    let mut arg = geometry::expected_gaussian_norm(m) - width_sq.sqrt();
    if let Some(e) = epsilon {
        arg -= e * (m as f64).sqrt();
    }
    let prob = if arg >= 0.0 { 1.0 - (-0.5 * arg * arg).exp() } else { 0.0 };
    Ok((m_required, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cone_model, mc_width_sq};
    use crate::model::{compute_cardinalities, compute_support_profile};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// The running example used throughout: n=1000, s=70, h=11, h̄=11, q=76.
    fn reference_card() -> CardinalityProfile {
        CardinalityProfile { s: 70, l: 28, q: 76, h: 11, h_bar: 11, xi: -42 }
    }

    fn pair(x: &[f64], w: &[f64]) -> SignalPair {
        SignalPair::new(x.to_vec(), w.to_vec()).unwrap()
    }

    #[test]
    fn cs_anchor_values() {
        let w = cs_width_bound(1000, 70).unwrap();
        assert_relative_eq!(w, 470.29640517058895, max_relative = 1e-10);
        assert_eq!(cs_bound_result(1000, 70).unwrap().m_noiseless, 472);

        let w = cs_width_bound(500, 50).unwrap();
        assert_relative_eq!(w, 300.258_509_299_404_6, max_relative = 1e-10);
        assert_eq!(cs_bound_result(500, 50).unwrap().m_noiseless, 302);

        assert_relative_eq!(cs_width_bound(64, 64).unwrap(), 1.4 * 64.0, max_relative = 1e-15);
        assert!(cs_width_bound(10, 0).is_err());
        assert!(cs_width_bound(10, 11).is_err());
    }

    #[test]
    fn simplified_bound_anchor() {
        let b = l1l1_simplified_bound(&reference_card(), 1000).unwrap();
        assert_relative_eq!(b.width_sq_bound, 134.95056957917325, max_relative = 1e-10);
        assert_eq!(b.m_noiseless, 136);
        assert_eq!(b.rounded_width(), 135);
    }

    #[test]
    fn simplified_bound_rejections() {
        let mut card = reference_card();
        card.h_bar = 0;
        card.h = 22; // keep identities intact
        assert!(matches!(l1l1_simplified_bound(&card, 1000), Err(Error::Degenerate(_))));
        assert!(l1l1_simplified_bound(&reference_card(), 76).is_err());
    }

    #[test]
    fn simplified_bound_reduces_to_cs_when_all_bad() {
        // h̄ = s and ξ = 0 collapse the expression onto the plain-ℓ1 bound.
        let card = CardinalityProfile { s: 70, l: 70, q: 70, h: 0, h_bar: 70, xi: 0 };
        let b = l1l1_simplified_bound(&card, 1000).unwrap();
        assert_relative_eq!(b.width_sq_bound, cs_width_bound(1000, 70).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn beta1_case_matches_simplified_form() {
        let card = reference_card();
        let all = l1l1_width_bound_all(&card, 1000, 1.0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].case_label, CaseLabel::L1L1Beta1);
        assert!(all[0].condition_holds);
        let simplified = l1l1_simplified_bound(&card, 1000).unwrap();
        assert_relative_eq!(all[0].width_sq_bound, simplified.width_sq_bound, max_relative = 1e-12);
        assert_eq!(all[0].rounded_width(), 135);
    }

    #[test]
    fn beta08_case_anchors() {
        let card = reference_card();
        let all = l1l1_width_bound_all(&card, 1000, 0.8).unwrap();
        assert_eq!(all.len(), 2);
        let b2a = all.iter().find(|b| b.case_label == CaseLabel::L1L1Case2a).unwrap();
        let b2b = all.iter().find(|b| b.case_label == CaseLabel::L1L1Case2b).unwrap();
        assert!(b2a.condition_holds && b2b.condition_holds);
        assert_relative_eq!(b2a.width_sq_bound, 179.944154, max_relative = 1e-6);
        assert_relative_eq!(b2b.width_sq_bound, 254.252387, max_relative = 1e-6);
        assert_eq!(b2a.rounded_width(), 180);
        assert_eq!(b2b.rounded_width(), 255);
        // both bounds exceed the β=1 value
        assert!(b2a.width_sq_bound > 134.95 && b2b.width_sq_bound > 134.95);
    }

    #[test]
    fn condition_left_side_anchor() {
        let rows = l1l1_condition_scan(&reference_card(), 1000, &[0.8]).unwrap();
        assert_relative_eq!(rows[0].lhs, 0.0031545741324921135, max_relative = 1e-14);
        assert!(rows[0].holds_2a && rows[0].holds_2b);
    }

    #[test]
    fn condition_crossovers_near_088_and_075() {
        let card = reference_card();
        let grid: Vec<f64> = (1..200).map(|k| k as f64 * 0.005).collect();
        let rows = l1l1_condition_scan(&card, 1000, &grid).unwrap();
        let last_2a = rows
            .iter()
            .filter(|r| r.beta < 1.0 && r.holds_2a)
            .map(|r| r.beta)
            .fold(f64::NEG_INFINITY, f64::max);
        let first_2b = rows
            .iter()
            .filter(|r| r.beta < 1.0 && r.holds_2b)
            .map(|r| r.beta)
            .fold(f64::INFINITY, f64::min);
        assert!((last_2a - 0.88).abs() <= 0.03, "2a crossover at {last_2a}");
        assert!((first_2b - 0.75).abs() <= 0.03, "2b crossover at {first_2b}");
        // small β: 2a's right side approaches 1, so the condition holds
        assert!(rows[0].holds_2a);
    }

    #[test]
    fn condition_2a_fails_at_beta_one_when_supports_differ() {
        let rows = l1l1_condition_scan(&reference_card(), 1000, &[1.0]).unwrap();
        assert!(!rows[0].holds_2a);
        assert_eq!(rows[0].rhs_2a, 0.0);
    }

    #[test]
    fn dense_signal_example_gains_2a_with_dimension() {
        // s=15 of n=20 is not sparse: the β<1 log-form condition fails, but
        // doubling n to 40 (same supports) makes it hold.
        let card = CardinalityProfile { s: 15, l: 16, q: 16, h: 10, h_bar: 5, xi: 1 };
        let small = l1l1_width_bound_all(&card, 20, 0.9).unwrap();
        let b2a = small.iter().find(|b| b.case_label == CaseLabel::L1L1Case2a).unwrap();
        assert!(!b2a.condition_holds);
        let large = l1l1_width_bound_all(&card, 40, 0.9).unwrap();
        let b2a = large.iter().find(|b| b.case_label == CaseLabel::L1L1Case2a).unwrap();
        assert!(b2a.condition_holds);
    }

    #[test]
    fn filtered_view_keeps_only_applicable_cases() {
        // at β=0.93 on the reference card, the 2a condition fails but 2b holds
        let kept = l1l1_width_bound(&reference_card(), 1000, 0.93).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].case_label, CaseLabel::L1L1Case2b);
    }

    #[test]
    fn beta_above_one_emits_case3_family() {
        let card = reference_card(); // s=70 > h+h̄=22 > 0
        let all = l1l1_width_bound_all(&card, 1000, 2.5).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].case_label, CaseLabel::L1L1Case3a);
        assert_eq!(all[1].case_label, CaseLabel::L1L1Case3b);
        for b in &all {
            assert!(b.width_sq_bound.is_finite() && b.width_sq_bound > 0.0);
        }
    }

    #[test]
    fn inconsistent_cardinalities_are_rejected() {
        let mut card = reference_card();
        card.h_bar += 1;
        assert!(l1l1_width_bound_all(&card, 1000, 0.5).is_err());
        let mut card = reference_card();
        card.xi = 0;
        assert!(l1l1_width_bound_all(&card, 1000, 0.5).is_err());
    }

    fn random_pair(rng: &mut ChaCha12Rng, n: usize) -> SignalPair {
        let x: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.35) { rng.gen_range(-3.0..3.0) } else { 0.0 })
            .collect();
        let w: Vec<f64> = x
            .iter()
            .map(|&xi| {
                if rng.gen_bool(0.4) {
                    xi // exact agreement
                } else if rng.gen_bool(0.5) {
                    rng.gen_range(-3.0..3.0)
                } else {
                    0.0
                }
            })
            .collect();
        pair(&x, &w)
    }

    #[test]
    fn beta1_below_2a_when_xi_is_small() {
        // whenever ξ < (2/5)(q+h+h̄), the β=1 bound is below the β<1 log-form
        // bound (and the log coefficients always favor β=1).
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 200 {
            let p = random_pair(&mut rng, 30);
            let sp = compute_support_profile(&p, 0.0);
            let card = compute_cardinalities(&sp, 30);
            if card.h_bar == 0 || card.l == 0 || card.q >= 30 {
                continue;
            }
            let beta = rng.gen_range(0.05..0.95);
            if (card.xi as f64) < 0.4 * (card.q + card.h + card.h_bar) as f64 {
                let c1 = l1l1_width_bound_all(&card, 30, 1.0).unwrap()[0].width_sq_bound;
                let all = l1l1_width_bound_all(&card, 30, beta).unwrap();
                let c2a = all
                    .iter()
                    .find(|b| b.case_label == CaseLabel::L1L1Case2a)
                    .unwrap()
                    .width_sq_bound;
                assert!(c1 <= c2a + 1e-9, "beta1={c1} vs 2a={c2a} at beta={beta}: {card:?}");
                checked += 1;
            }
        }
    }

    #[test]
    fn l1l1_bound_dominates_monte_carlo_width() {
        let mut x = vec![0.0; 20];
        let mut w = vec![0.0; 20];
        x[0] = 1.5;
        x[1] = -2.0;
        x[2] = 3.0;
        x[3] = -1.0;
        w[0] = 1.5;
        w[1] = -1.0;
        w[2] = 2.0;
        w[3] = 1.0;
        w[4] = 0.5;
        w[5] = -0.3;
        let p = pair(&x, &w);
        let sp = compute_support_profile(&p, 0.0);
        let card = compute_cardinalities(&sp, 20);
        assert_eq!((card.s, card.l, card.q, card.h, card.h_bar), (4, 5, 6, 0, 3));

        for beta in [0.7, 1.0] {
            let applicable = l1l1_width_bound(&card, 20, beta).unwrap();
            assert!(!applicable.is_empty());
            let best = applicable.iter().map(|b| b.width_sq_bound).fold(f64::INFINITY, f64::min);
            let cone = cone_model(&p, &sp, beta, ConeKind::F1);
            let (est, se) = mc_width_sq(&cone, 20_000, 55);
            assert!(est <= best + 3.0 * se, "beta={beta}: mc {est} vs bound {best}");
        }
    }

    /// Fixed ℓ1-ℓ2 example used across several tests:
    /// x⋆ = (2,−1,0,0,0,0), w = (2.5,−0.2,1.5,3,0.1,0), β = 1/2.
    /// Then I={0,1}, Ic∩J={2,3,4}, 1/β=2, K≠={3}, L={2,4}, w̄=1.5,
    /// v_β = 0.75² + 1.4² + 0.5² = 2.7725.
    fn l1l2_example() -> (SignalPair, SupportProfile, CardinalityProfile) {
        let p = pair(&[2.0, -1.0, 0.0, 0.0, 0.0, 0.0], &[2.5, -0.2, 1.5, 3.0, 0.1, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        let card = compute_cardinalities(&sp, 6);
        (p, sp, card)
    }

    #[test]
    fn l1l2_profile_partition_and_values() {
        let (p, sp, card) = l1l2_example();
        assert_eq!((card.s, card.q), (2, 5));
        let prof = l1l2_profile(&p, &sp, 0.5).unwrap();
        assert_eq!(prof.k_neq, vec![3]);
        assert_eq!(prof.k_plus, vec![3]);
        assert!(prof.k_minus.is_empty() && prof.k_eq.is_empty());
        assert_eq!(prof.k, vec![3]);
        assert_eq!(prof.l, vec![2, 4]);
        assert_relative_eq!(prof.w_bar, 1.5, max_relative = 1e-15);
        assert_relative_eq!(prof.v_beta, 2.7725, max_relative = 1e-12);
    }

    #[test]
    fn l1l2_profile_large_beta_sweeps_nonzeros_into_k_neq() {
        let (p, sp, _) = l1l2_example();
        let prof = l1l2_profile(&p, &sp, 100.0).unwrap();
        assert_eq!(prof.k_neq, vec![2, 3, 4]);
        assert!(prof.l.is_empty());
    }

    #[test]
    fn l1l2_profile_exact_threshold_goes_to_k_eq() {
        // w has a component exactly at 1/β and one exactly at −1/β
        let p = pair(&[1.0, 0.0, 0.0, 0.0], &[1.0, 2.0, -2.0, 0.4]);
        let sp = compute_support_profile(&p, 0.0);
        let prof = l1l2_profile(&p, &sp, 0.5).unwrap();
        assert_eq!(prof.k_plus_eq, vec![1]);
        assert_eq!(prof.k_minus_eq, vec![2]);
        assert_eq!(prof.k_eq, vec![1, 2]);
        assert!(prof.k_neq.is_empty());
        assert_eq!(prof.l, vec![3]);
        assert_relative_eq!(prof.w_bar, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn l1l2_profile_requires_prior_activity_off_support() {
        let p = pair(&[1.0, 2.0], &[1.0, 1.0]); // J ⊆ I, so Ic∩J = ∅
        let sp = compute_support_profile(&p, 0.0);
        assert!(l1l2_profile(&p, &sp, 1.0).is_err());
    }

    #[test]
    fn v_beta_equals_s_for_perfect_on_support_prior() {
        let p = pair(&[1.0, -2.0, 0.0, 0.0, 0.0], &[1.0, -2.0, 0.3, 0.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        let prof = l1l2_profile(&p, &sp, 1.0).unwrap();
        assert!(prof.k_neq.is_empty());
        assert_relative_eq!(prof.v_beta, 2.0, max_relative = 1e-15);
        assert_relative_eq!(prof.w_bar, 0.3, max_relative = 1e-15);
    }

    #[test]
    fn l1l2_case2_anchor() {
        let (p, sp, card) = l1l2_example();
        let all = l1l2_width_bound_all(&p, &sp, &card, 6, 0.5).unwrap();
        assert_eq!(all.len(), 2);
        let c1 = &all[0];
        let c2 = &all[1];
        assert_eq!(c1.case_label, CaseLabel::L1L2Case1);
        assert!(!c1.condition_holds); // lhs = 3 exceeds the case-1 right side
        assert_eq!(c2.case_label, CaseLabel::L1L2Case2);
        assert!(c2.condition_holds);
        assert_relative_eq!(c2.width_sq_bound, 85.893314, max_relative = 1e-6);

        let kept = l1l2_width_bound(&p, &sp, &card, 6, 0.5).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].case_label, CaseLabel::L1L2Case2);
    }

    #[test]
    fn l1l2_case1_applies_when_supports_coincide() {
        // q = s with J nonempty: condition 1 is trivially satisfied
        let p = pair(&[2.0, -1.0, 0.0], &[1.0, -1.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        let card = compute_cardinalities(&sp, 3);
        assert_eq!((card.q, card.s), (2, 2));
        let all = l1l2_width_bound_all(&p, &sp, &card, 3, 1.0).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].condition_holds);
        // v_β = (1+1)² + (1−0)² = 5; width = 10·ln(3/2) + 2 + 1.6
        assert_relative_eq!(all[0].width_sq_bound, 7.654651081081644, max_relative = 1e-12);
    }

    #[test]
    fn l1l2_accepts_exact_prior() {
        // w = x⋆: J empty, still nondegenerate (x⋆ ≠ 0); q = s
        let p = pair(&[2.0, -1.0, 0.0, 0.0], &[2.0, -1.0, 0.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        let card = compute_cardinalities(&sp, 4);
        let all = l1l2_width_bound_all(&p, &sp, &card, 4, 1.0).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].condition_holds);
        // v_β = s = 2; width = 4·ln2 + 2 + 1.6
        assert_relative_eq!(all[0].width_sq_bound, 6.372588722239781, max_relative = 1e-12);
    }

    #[test]
    fn l1l2_rejects_degenerate_weight() {
        let p = pair(&[1.0, 0.0], &[2.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        let card = compute_cardinalities(&sp, 2);
        assert!(matches!(
            l1l2_width_bound_all(&p, &sp, &card, 2, 1.0),
            Err(Error::Degenerate(_))
        ));
        // a different β restores nondegeneracy
        assert!(l1l2_width_bound_all(&p, &sp, &card, 2, 0.5).is_ok());
    }

    #[test]
    fn l1l2_bound_dominates_monte_carlo_width() {
        let (p, sp, card) = l1l2_example();
        let kept = l1l2_width_bound(&p, &sp, &card, 6, 0.5).unwrap();
        let best = kept.iter().map(|b| b.width_sq_bound).fold(f64::INFINITY, f64::min);
        let cone = cone_model(&p, &sp, 0.5, ConeKind::F2);
        let (est, se) = mc_width_sq(&cone, 20_000, 91);
        assert!(est <= best + 3.0 * se, "mc {est} vs bound {best}");
    }

    #[test]
    fn l1l2_condition_scan_tracks_profile_changes() {
        let (p, sp, card) = l1l2_example();
        let rows = l1l2_condition_scan(&p, &sp, &card, 6, &[0.1, 0.5, 2.0]).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_relative_eq!(r.lhs, 3.0, max_relative = 1e-15);
            assert!(r.rhs_1 >= 0.0 && r.rhs_2 >= 0.0);
        }
        assert!(rows[1].holds_2);
    }

    #[test]
    fn beta_star_single_component() {
        let p = pair(&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        assert_relative_eq!(beta_star(&p, &sp, 1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn beta_star_rejects_constant_v() {
        let p = pair(&[1.0, -2.0, 0.0], &[1.0, -2.0, 0.0]);
        let sp = compute_support_profile(&p, 0.0);
        assert!(beta_star(&p, &sp, 1.0).is_err());
    }

    #[test]
    fn beta_star_minimizes_v_with_frozen_sets() {
        let (p, sp, _) = l1l2_example();
        let bs = beta_star(&p, &sp, 0.5).unwrap();
        assert_relative_eq!(bs, 2.7 / 9.89, max_relative = 1e-12);
        // v_β with K≠ frozen at {3}: (1−0.5b)² + (1+0.8b)² + (3b−1)²
        let v = |b: f64| {
            (1.0 - 0.5 * b).powi(2) + (1.0 + 0.8 * b).powi(2) + (3.0 * b - 1.0).powi(2)
        };
        for db in [-0.2, -0.1, -0.02, 0.02, 0.1, 0.2] {
            assert!(v(bs) <= v(bs + db) + 1e-12, "v not minimal against offset {db}");
        }
    }

    #[test]
    fn measurement_counts_and_probabilities() {
        let (m_req, prob) = measurements_and_probability(0.0, 100, None).unwrap();
        assert_eq!(m_req, 1);
        assert!(prob > 0.999999);

        // ε = 1/2 on the reference simplified bound
        let b = l1l1_simplified_bound(&reference_card(), 1000).unwrap().with_epsilon(0.5).unwrap();
        assert_eq!(b.m_noisy, Some(546));
        let (m_req, _) = measurements_and_probability(b.width_sq_bound, 600, Some(0.5)).unwrap();
        assert_eq!(m_req, 546);

        // too few measurements for a wide cone: probability floor at 0
        let (_, prob) = measurements_and_probability(100.0, 2, None).unwrap();
        assert_eq!(prob, 0.0);

        assert!(measurements_and_probability(-1.0, 5, None).is_err());
        assert!(measurements_and_probability(1.0, 0, None).is_err());
        assert!(measurements_and_probability(1.0, 5, Some(1.0)).is_err());
    }

    #[test]
    fn more_measurements_raise_the_probability_floor() {
        let width_sq = 30.0;
        let mut last = -1.0;
        for m in [40, 60, 100, 200, 400] {
            let (_, prob) = measurements_and_probability(width_sq, m, None).unwrap();
            assert!(prob >= last);
            last = prob;
        }
        assert!(last > 0.999);
    }

    #[test]
    fn bound_result_json_shape_is_stable() {
        let b = BoundResult::new(134.95, CaseLabel::L1L1Beta1, true, 1.0).with_epsilon(0.5).unwrap();
        let v = serde_json::to_value(&b).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            vec!["beta", "case_label", "condition_holds", "m_noiseless", "m_noisy", "width_sq_bound"]
        );
        assert_eq!(obj["case_label"], serde_json::json!("L1L1_beta1"));
    }

    #[test]
    fn case_labels_serialize_to_stable_strings() {
        let expect = [
            (CaseLabel::Cs, "CS"),
            (CaseLabel::L1L1Beta1, "L1L1_beta1"),
            (CaseLabel::L1L1Case2a, "L1L1_2a"),
            (CaseLabel::L1L1Case2b, "L1L1_2b"),
            (CaseLabel::L1L1Case3a, "L1L1_3a"),
            (CaseLabel::L1L1Case3b, "L1L1_3b"),
            (CaseLabel::L1L2Case1, "L1L2_1"),
            (CaseLabel::L1L2Case2, "L1L2_2"),
        ];
        for (label, s) in expect {
            assert_eq!(label.to_string(), s);
            assert_eq!(serde_json::to_value(label).unwrap(), serde_json::json!(s));
            let back: CaseLabel = serde_json::from_value(serde_json::json!(s)).unwrap();
            assert_eq!(back, label);
        }
    }

    #[test]
    fn l1l2_profile_json_uses_set_names() {
        let (p, sp, _) = l1l2_example();
        let prof = l1l2_profile(&p, &sp, 0.5).unwrap();
        let v = serde_json::to_value(&prof).unwrap();
        let obj = v.as_object().unwrap();
        for key in ["K_eq", "K_neq", "K", "K_plus", "K_minus", "K_plus_eq", "K_minus_eq", "L", "v_beta", "w_bar", "beta"] {
            assert!(obj.contains_key(key), "missing key {key}");
        }
    }
}
