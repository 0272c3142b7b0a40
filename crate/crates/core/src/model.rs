//! Signals, prior information, and support-set bookkeeping.
//!
//! Everything downstream (width bounds, cone models) is driven by how the
//! prior `w` relates to the unknown `x⋆` componentwise. This module computes
//! that structure:
//!
//! ```text
//!   I  = {i : x⋆_i ≠ 0}        J  = {i : x⋆_i ≠ w_i}
//!   I₊ = {i : x⋆_i > 0}        J₊ = {i : x⋆_i > w_i}
//!   I₋ = {i : x⋆_i < 0}        J₋ = {i : x⋆_i < w_i}
//! ```
//!
//! A prior component `w_i` with `i ∈ supp(x⋆)` is *good* when it overshoots
//! `x⋆_i` away from zero (`i ∈ I₊J₋ ∪ I₋J₊`) and *bad* when it undershoots
//! (`i ∈ I₊J₊ ∪ I₋J₋`). The derived counts
//!
//! ```text
//!   s = |I|,  l = |J|,  q = |I ∪ J|,  h = |good|,  h̄ = |bad|,
//!   ξ = |IᶜJ| − |IJᶜ| = q + h + h̄ − 2s
//! ```
//!
//! are the only quantities the ℓ1-ℓ1 width bounds depend on. Index sets are
//! stored 0-based and sorted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An unknown signal `x_star` and a prior guess `w`, both of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalPairRaw")]
pub struct SignalPair {
    pub x_star: Vec<f64>,
    pub w: Vec<f64>,
    pub n: usize,
}

#[derive(Deserialize)]
struct SignalPairRaw {
    x_star: Vec<f64>,
    w: Vec<f64>,
    n: usize,
}

impl TryFrom<SignalPairRaw> for SignalPair {
    type Error = Error;

    fn try_from(raw: SignalPairRaw) -> Result<Self> {
        if raw.n == 0 || raw.x_star.len() != raw.n || raw.w.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "signal pair needs two vectors of identical length n >= 1, got n={}, |x_star|={}, |w|={}",
                raw.n,
                raw.x_star.len(),
                raw.w.len()
            )));
        }
        Ok(SignalPair { x_star: raw.x_star, w: raw.w, n: raw.n })
    }
}

impl SignalPair {
    pub fn new(x_star: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let n = x_star.len();
        SignalPair::try_from(SignalPairRaw { x_star, w, n })
    }
}

/// The supports of `x⋆` and `x⋆ − w`, their signed refinements, and the
/// good/bad classification of prior components. All sets are sorted, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportProfile {
    pub i: Vec<usize>,
    pub ic: Vec<usize>,
    pub i_plus: Vec<usize>,
    pub i_minus: Vec<usize>,
    pub j: Vec<usize>,
    pub jc: Vec<usize>,
    pub j_plus: Vec<usize>,
    pub j_minus: Vec<usize>,
    /// `I₊J₋ ∪ I₋J₊` — prior overshoots the signal away from zero.
    pub good_set: Vec<usize>,
    /// `I₊J₊ ∪ I₋J₋` — prior undershoots the signal toward (or past) zero.
    pub bad_set: Vec<usize>,
}

impl SupportProfile {
    pub fn n(&self) -> usize {
        self.i.len() + self.ic.len()
    }

    pub fn contains_i(&self, idx: usize) -> bool {
        self.i.binary_search(&idx).is_ok()
    }

    pub fn contains_j(&self, idx: usize) -> bool {
        self.j.binary_search(&idx).is_ok()
    }

    pub fn ij(&self) -> Vec<usize> {
        intersect(&self.i, &self.j)
    }

    pub fn i_jc(&self) -> Vec<usize> {
        intersect(&self.i, &self.jc)
    }

    pub fn ic_j(&self) -> Vec<usize> {
        intersect(&self.ic, &self.j)
    }

    pub fn ic_jc(&self) -> Vec<usize> {
        intersect(&self.ic, &self.jc)
    }
}

/// The counts the width bounds consume. `xi` may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityProfile {
    pub s: usize,
    pub l: usize,
    pub q: usize,
    pub h: usize,
    pub h_bar: usize,
    pub xi: i64,
}

impl CardinalityProfile {
    /// `|IJ| = h + h̄`
    pub fn ij_count(&self) -> usize {
        self.h + self.h_bar
    }

    /// `|IJᶜ| = s − (h + h̄)`
    pub fn i_jc_count(&self) -> i64 {
        self.s as i64 - self.ij_count() as i64
    }

    /// `|IᶜJ| = q − s`
    pub fn ic_j_count(&self) -> i64 {
        self.q as i64 - self.s as i64
    }

    /// `|IᶜJᶜ| = n − q`
    pub fn ic_jc_count(&self, n: usize) -> i64 {
        n as i64 - self.q as i64
    }
}

/// Classifies every index of the pair against `zero_tol`: `i ∈ I` iff
/// `|x⋆_i| > zero_tol`, `i ∈ J` iff `|x⋆_i − w_i| > zero_tol`, signed sets by
/// strict comparison against `±zero_tol`. A tolerance of 0 is the exact
/// definition; solver output should be classified with a small positive
/// tolerance (e.g. `1e-8 · ‖x̂‖∞`) to ignore numerical dust.
pub fn compute_support_profile(pair: &SignalPair, zero_tol: f64) -> SupportProfile {
    assert!(zero_tol >= 0.0, "zero_tol must be nonnegative");
    let mut p = SupportProfile::default();
    for idx in 0..pair.n {
        let x = pair.x_star[idx];
        let d = x - pair.w[idx];

        let in_i = x.abs() > zero_tol;
        if in_i {
            p.i.push(idx);
            if x > zero_tol {
                p.i_plus.push(idx);
            } else {
                p.i_minus.push(idx);
            }
        } else {
            p.ic.push(idx);
        }

        let in_j = d.abs() > zero_tol;
        if in_j {
            p.j.push(idx);
            if d > zero_tol {
                p.j_plus.push(idx);
            } else {
                p.j_minus.push(idx);
            }
        } else {
            p.jc.push(idx);
        }

        if in_i && in_j {
            let pos = x > zero_tol;
            let above = d > zero_tol; // x⋆ > w
            if pos == above {
                p.bad_set.push(idx);
            } else {
                p.good_set.push(idx);
            }
        }
    }
    p
}

/// Derives `(s, l, q, h, h̄, ξ)` from a support profile. `n` is taken for
/// validation; profiles produced by [`compute_support_profile`] always match.
pub fn compute_cardinalities(profile: &SupportProfile, n: usize) -> CardinalityProfile {
    assert_eq!(profile.n(), n, "profile inconsistent with n");
    let s = profile.i.len();
    let l = profile.j.len();
    let q = s + profile.ic_j().len(); // |I ∪ J| = |I| + |IᶜJ|
    let h = profile.good_set.len();
    let h_bar = profile.bad_set.len();
    let xi = profile.ic_j().len() as i64 - profile.i_jc().len() as i64;
    CardinalityProfile { s, l, q, h, h_bar, xi }
}

/// One set identity: `lhs` counted by direct enumeration, `rhs` from the
/// cardinality profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: i64,
    pub rhs: i64,
}

impl IdentityCheck {
    pub fn passes(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passes)
    }
}

/// Checks the seven counting identities tying the pairwise intersections of
/// `I`/`J` to `(s, l, q, h, h̄, ξ)`; all must hold for any profile/cardinality
/// pair produced by this module.
pub fn verify_set_identities(card: &CardinalityProfile, profile: &SupportProfile) -> IdentityReport {
    let n = profile.n() as i64;
    let ij = profile.ij().len() as i64;
    let i_jc = profile.i_jc().len() as i64;
    let ic_j = profile.ic_j().len() as i64;
    let ic_jc = profile.ic_jc().len() as i64;
    let (s, q) = (card.s as i64, card.q as i64);
    let hh = card.h as i64 + card.h_bar as i64;

    let checks = vec![
        IdentityCheck { name: "|IJ| = h + h_bar", lhs: ij, rhs: hh },
        IdentityCheck { name: "|IJc| = s - (h + h_bar)", lhs: i_jc, rhs: s - hh },
        IdentityCheck { name: "|IcJ| = q - s", lhs: ic_j, rhs: q - s },
        IdentityCheck { name: "|IcJc| = n - q", lhs: ic_jc, rhs: n - q },
        IdentityCheck { name: "|IcJ| + |IJc| = q - (h + h_bar)", lhs: ic_j + i_jc, rhs: q - hh },
        IdentityCheck {
            name: "|IcJ| + |IJc| + 2|IcJc| = 2n - (q + h + h_bar)",
            lhs: ic_j + i_jc + 2 * ic_jc,
            rhs: 2 * n - (q + hh),
        },
        IdentityCheck {
            name: "|IcJ| - |IJc| = q + h + h_bar - 2s",
            lhs: ic_j - i_jc,
            rhs: q + hh - 2 * s,
        },
    ];
    IdentityReport { checks }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}
