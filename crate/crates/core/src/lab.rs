//! Experiment harness: seeded instance/matrix generation, phase-transition
//! sweeps, minimum-measurement searches over β, and condition-region scans,
//! all emitting deterministic CSV.
//!
//! Every random draw goes through a counter-seeded ChaCha12 generator (the
//! algorithm identifier is recorded in CSV headers), and parallel sections
//! collect keyed results and sort before aggregation, so output is
//! bit-identical regardless of thread count.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::model::{
    compute_cardinalities, compute_support_profile, CardinalityProfile, SignalPair, SupportProfile,
};
use crate::solver::{self, Constraint, RecoveryProblem, Regularizer, SolverConfig};

/// Recipe for a synthetic `(x⋆, w)` pair: `x⋆` is `s`-sparse with Gaussian
/// nonzeros, and `w = x⋆ + z` where `z` is `z_sparsity`-sparse with
/// `support_overlap` of its nonzeros placed inside `supp(x⋆)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub s: usize,
    pub z_sparsity: usize,
    pub support_overlap: usize,
    pub z_std: f64,
    pub nonzero_std: f64,
    pub seed: u64,
}

impl InstanceSpec {
    /// Small instance sized so that sweeps finish in minutes.
    pub fn desk_scale(seed: u64) -> Self {
        InstanceSpec {
            n: 200,
            s: 20,
            z_sparsity: 8,
            support_overlap: 6,
            z_std: 0.8,
            nonzero_std: 1.0,
            seed,
        }
    }

    /// The large reference configuration (n=1000, s=70, 28-sparse prior
    /// error with 22 overlapping positions).
    pub fn full_scale(seed: u64) -> Self {
        InstanceSpec {
            n: 1000,
            s: 70,
            z_sparsity: 28,
            support_overlap: 22,
            z_std: 0.8,
            nonzero_std: 1.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.s == 0 || self.s > self.n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= s <= n, got s={} n={}",
                self.s, self.n
            )));
        }
        if self.support_overlap > self.s.min(self.z_sparsity) {
            return Err(Error::InvalidInput(format!(
                "support_overlap {} exceeds min(s, z_sparsity) = {}",
                self.support_overlap,
                self.s.min(self.z_sparsity)
            )));
        }
        if self.z_sparsity - self.support_overlap > self.n - self.s {
            return Err(Error::InvalidInput(format!(
                "{} off-support prior-error positions do not fit outside a support of {} in dimension {}",
                self.z_sparsity - self.support_overlap,
                self.s,
                self.n
            )));
        }
        // `v > 0.0` is false for NaN, so this also rejects NaN inputs
        let positive = |v: f64| v > 0.0;
        if !positive(self.z_std) || !positive(self.nonzero_std) {
            return Err(Error::InvalidInput("z_std and nonzero_std must be positive".into()));
        }
        Ok(())
    }
}

/// Draws the pair described by `spec`, deterministically in `spec.seed`.
///
/// Draw order (fixed for reproducibility): support of `x⋆`, its nonzero
/// values in ascending index order, the overlap positions, the off-support
/// positions, then the prior-error values (overlap first, ascending).
pub fn gen_instance(spec: &InstanceSpec) -> Result<SignalPair> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let n = spec.n;

    let mut supp_x = index::sample(&mut rng, n, spec.s).into_vec();
    supp_x.sort_unstable();
    let mut x = vec![0.0f64; n];
    for &i in &supp_x {
        let g: f64 = StandardNormal.sample(&mut rng);
        x[i] = spec.nonzero_std * g;
    }

    let mut on_positions = index::sample(&mut rng, spec.s, spec.support_overlap).into_vec();
    on_positions.sort_unstable();
    let mut on_support = vec![false; n];
    for &i in &supp_x {
        on_support[i] = true;
    }
    let off_pool: Vec<usize> = (0..n).filter(|&i| !on_support[i]).collect();
    let mut off_positions =
        index::sample(&mut rng, off_pool.len(), spec.z_sparsity - spec.support_overlap).into_vec();
    off_positions.sort_unstable();

    let mut w = x.clone();
    for &p in &on_positions {
        let g: f64 = StandardNormal.sample(&mut rng);
        w[supp_x[p]] += spec.z_std * g;
    }
    for &p in &off_positions {
        let g: f64 = StandardNormal.sample(&mut rng);
        w[off_pool[p]] += spec.z_std * g;
    }
    SignalPair::new(x, w)
}

/// An `m × n` matrix with i.i.d. `N(0, 1/m)` entries, deterministic in
/// `seed` (column-major draw order).
pub fn gen_gaussian_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    assert!(m >= 1 && n >= 1, "matrix dimensions must be positive");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, n, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        scale * g
    })
}

/// An `n × n` matrix with i.i.d. standard-normal entries, used for the
/// incremental-row sweep: taking the first `m` rows gives each measurement
/// operator, and uniform row scaling never changes the feasible set, so the
/// `1/√m` normalization is irrelevant here.
fn square_gaussian(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng))
}

/// splitmix64: derives independent stream seeds from a base seed and
/// counters without allocating generator state per work item.
fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x9e3779b97f4a7c15u64;
    for &p in parts {
        let mut z = h ^ p.wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        h = z ^ (z >> 31);
    }
    h
}

/// Which decoder an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    L1,
    L1L1 { beta: f64 },
    L1L2 { beta: f64 },
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::L1 => "l1",
            SolverKind::L1L1 { .. } => "l1l1",
            SolverKind::L1L2 { .. } => "l1l2",
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            SolverKind::L1 => 0.0,
            SolverKind::L1L1 { beta } | SolverKind::L1L2 { beta } => *beta,
        }
    }

    fn regularizer(&self, w: &[f64]) -> Regularizer {
        match self {
            SolverKind::L1 => Regularizer::L1,
            SolverKind::L1L1 { beta } => Regularizer::L1L1 { beta: *beta, w: w.to_vec() },
            SolverKind::L1L2 { beta } => Regularizer::L1L2 { beta: *beta, w: w.to_vec() },
        }
    }
}

/// Solver settings for sweep workloads: tolerance 10⁻⁶ (matching the 10⁻²
/// success criterion with margin), iteration cap 4000, penalty balancing on.
pub fn experiment_config() -> SolverConfig {
    SolverConfig {
        tol_primal: 1e-6,
        tol_dual: 1e-6,
        max_iter: 4000,
        residual_balancing: true,
        ..SolverConfig::default()
    }
}

/// The measurement count a solver's width bound predicts for this instance:
/// the smallest `m_noiseless` among applicable cases, or 0 when no case
/// applies.
pub fn bound_measurements(
    kind: &SolverKind,
    pair: &SignalPair,
    profile: &SupportProfile,
    card: &CardinalityProfile,
    n: usize,
) -> u64 {
    let results = match kind {
        SolverKind::L1 => bounds::cs_bound_result(n, card.s).map(|r| vec![r]),
        SolverKind::L1L1 { beta } => bounds::l1l1_width_bound(card, n, *beta),
        SolverKind::L1L2 { beta } => bounds::l1l2_width_bound(pair, profile, card, n, *beta),
    };
    results
        .ok()
        .and_then(|rs| rs.iter().map(|r| r.m_noiseless).min())
        .unwrap_or(0)
}

/// A table of experiment output: `# key=value` metadata lines, a header
/// row, and pre-formatted cells (floats printed shortest-round-trip, so CSV
/// round-trips are lossless).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SweepResult {
    pub fn new(meta: Vec<(String, String)>, columns: Vec<String>) -> Self {
        SweepResult { meta, columns, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut columns = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidInput(format!("bad metadata line: {line}")))?;
                meta.push((k.to_string(), v.to_string()));
            } else if columns.is_none() {
                columns = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
            } else {
                let cells: Vec<String> = line.split(',').map(str::to_string).collect();
                let ncols = columns.as_ref().map_or(0, Vec::len);
                if cells.len() != ncols {
                    return Err(Error::InvalidInput(format!(
                        "row has {} cells, expected {ncols}: {line}",
                        cells.len()
                    )));
                }
                rows.push(cells);
            }
        }
        let columns = columns.ok_or_else(|| Error::InvalidInput("missing header row".into()))?;
        Ok(SweepResult { meta, columns, rows })
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn common_meta(spec: &InstanceSpec) -> Vec<(String, String)> {
    vec![
        ("rng".into(), "chacha12".into()),
        ("n".into(), spec.n.to_string()),
        ("s".into(), spec.s.to_string()),
        ("z_sparsity".into(), spec.z_sparsity.to_string()),
        ("support_overlap".into(), spec.support_overlap.to_string()),
        ("instance_seed".into(), spec.seed.to_string()),
    ]
}

/// Relative-error success test used everywhere: `‖x̂ − x⋆‖₂ < 10⁻²·‖x⋆‖₂`.
pub fn recovery_success(x_hat: &[f64], x_star: &[f64]) -> bool {
    let err: f64 =
        x_hat.iter().zip(x_star).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let scale: f64 = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
    err < 1e-2 * scale
}

fn solve_trial(
    a: DMatrix<f64>,
    pair: &SignalPair,
    kind: &SolverKind,
    warm: Option<Vec<f64>>,
) -> (bool, Option<Vec<f64>>) {
    let y = &a * DVector::from_vec(pair.x_star.clone());
    let problem = match RecoveryProblem::new(a, y, kind.regularizer(&pair.w), Constraint::Exact) {
        Ok(p) => p,
        Err(_) => return (false, None),
    };
    let config = SolverConfig { warm_start: warm, ..experiment_config() };
    match solver::solve(&problem, &config) {
        Ok(sol) => (recovery_success(&sol.x_hat, &pair.x_star), Some(sol.x_hat)),
        Err(_) => (false, None),
    }
}

/// Success rate per `(solver, m)` over `trials` fresh measurement matrices
/// of a single generated instance. Columns:
/// `solver,beta,m,success_rate,trials,bound_m,seed`; each solver's
/// predicted measurement count rides along in `bound_m`.
pub fn phase_transition(
    spec: &InstanceSpec,
    m_grid: &[usize],
    trials: usize,
    solvers: &[SolverKind],
    seed: u64,
) -> Result<SweepResult> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if m_grid.iter().any(|&m| m == 0 || m > spec.n) {
        return Err(Error::InvalidInput("m_grid entries must lie in 1..=n".into()));
    }
    let pair = gen_instance(spec)?;
    let profile = compute_support_profile(&pair, 0.0);
    let card = compute_cardinalities(&profile, spec.n);

    let mut work = Vec::new();
    for (si, kind) in solvers.iter().enumerate() {
        for &m in m_grid {
            for t in 0..trials {
                work.push((si, m, t, *kind));
            }
        }
    }
    let mut outcomes: Vec<((usize, usize), bool)> = work
        .into_par_iter()
        .map(|(si, m, t, kind)| {
            let a_seed = mix_seed(&[seed, si as u64, m as u64, t as u64]);
            let a = gen_gaussian_matrix(m, spec.n, a_seed);
            let (ok, _) = solve_trial(a, &pair, &kind, None);
            ((si, m), ok)
        })
        .collect();
    outcomes.sort_by_key(|(k, _)| *k);

    let mut meta = common_meta(spec);
    meta.push(("trials".into(), trials.to_string()));
    meta.push(("matrix_seed".into(), seed.to_string()));
    let columns =
        ["solver", "beta", "m", "success_rate", "trials", "bound_m", "seed"]
            .map(String::from)
            .to_vec();
    let mut result = SweepResult::new(meta, columns);
    for (si, kind) in solvers.iter().enumerate() {
        let bound_m = bound_measurements(kind, &pair, &profile, &card, spec.n);
        for &m in m_grid {
            let successes = outcomes
                .iter()
                .filter(|((a, b), _)| *a == si && *b == m)
                .filter(|(_, ok)| *ok)
                .count();
            result.rows.push(vec![
                kind.name().to_string(),
                fmt_f64(kind.beta()),
                m.to_string(),
                fmt_f64(successes as f64 / trials as f64),
                trials.to_string(),
                bound_m.to_string(),
                seed.to_string(),
            ]);
        }
    }
    Ok(result)
}

/// Smallest row-prefix of one fixed square matrix that recovers the
/// instance, per `(seed, beta)`.
///
/// Rows are added one at a time (`y` is the matching prefix of the full
/// product) with the previous solution as warm start; the search reports
/// `n+1` when even the full square system fails. Columns:
/// `solver,beta,seed,min_m,bound_m`.
pub fn min_measurements_sweep(
    spec: &InstanceSpec,
    beta_list: &[f64],
    matrix_seeds: &[u64],
    family: &str,
) -> Result<SweepResult> {
    if !matches!(family, "l1" | "l1l1" | "l1l2") {
        return Err(Error::InvalidInput(format!("unknown solver family: {family}")));
    }
    if beta_list.is_empty() || matrix_seeds.is_empty() {
        return Err(Error::InvalidInput("beta_list and matrix_seeds must be nonempty".into()));
    }
    let pair = gen_instance(spec)?;
    let profile = compute_support_profile(&pair, 0.0);
    let card = compute_cardinalities(&profile, spec.n);

    let kinds: Vec<SolverKind> = beta_list
        .iter()
        .map(|&beta| match family {
            "l1" => SolverKind::L1,
            "l1l1" => SolverKind::L1L1 { beta },
            _ => SolverKind::L1L2 { beta },
        })
        .collect();

    let mut work = Vec::new();
    for (bi, kind) in kinds.iter().enumerate() {
        for (gi, &gseed) in matrix_seeds.iter().enumerate() {
            work.push((bi, gi, gseed, *kind));
        }
    }
    let mut found: Vec<((usize, usize), usize)> = work
        .into_par_iter()
        .map(|(bi, gi, gseed, kind)| {
            let g = square_gaussian(spec.n, gseed);
            let full_y = &g * DVector::from_vec(pair.x_star.clone());
            let mut warm: Option<Vec<f64>> = None;
            let mut min_m = spec.n + 1;
            for m in 1..=spec.n {
                let a = g.rows(0, m).into_owned();
                let y = full_y.rows(0, m).into_owned();
                let problem = match RecoveryProblem::new(
                    a,
                    y,
                    kind.regularizer(&pair.w),
                    Constraint::Exact,
                ) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let config = SolverConfig { warm_start: warm.take(), ..experiment_config() };
                if let Ok(sol) = solver::solve(&problem, &config) {
                    let ok = recovery_success(&sol.x_hat, &pair.x_star);
                    warm = Some(sol.x_hat);
                    if ok {
                        min_m = m;
                        break;
                    }
                }
            }
            ((bi, gi), min_m)
        })
        .collect();
    found.sort_by_key(|(k, _)| *k);

    let meta = common_meta(spec);
    let columns = ["solver", "beta", "seed", "min_m", "bound_m"].map(String::from).to_vec();
    let mut result = SweepResult::new(meta, columns);
    for ((bi, gi), min_m) in found {
        let kind = kinds[bi];
        let bound_m = bound_measurements(&kind, &pair, &profile, &card, spec.n);
        result.rows.push(vec![
            kind.name().to_string(),
            fmt_f64(kind.beta()),
            matrix_seeds[gi].to_string(),
            min_m.to_string(),
            bound_m.to_string(),
        ]);
    }
    Ok(result)
}

/// ℓ1-ℓ1 applicability-condition scan as CSV. Columns:
/// `beta,lhs,rhs_2a,rhs_2b,rhs_3a,rhs_3b,holds_2a,holds_2b,holds_3a,holds_3b`
/// (flags as 0/1); the left side never depends on β.
pub fn condition_scan_l1l1(
    card: &CardinalityProfile,
    n: usize,
    beta_grid: &[f64],
) -> Result<SweepResult> {
    let rows = bounds::l1l1_condition_scan(card, n, beta_grid)?;
    let meta = vec![
        ("family".into(), "l1l1".into()),
        ("n".into(), n.to_string()),
        ("s".into(), card.s.to_string()),
        ("q".into(), card.q.to_string()),
        ("h".into(), card.h.to_string()),
        ("h_bar".into(), card.h_bar.to_string()),
    ];
    let columns = [
        "beta", "lhs", "rhs_2a", "rhs_2b", "rhs_3a", "rhs_3b", "holds_2a", "holds_2b",
        "holds_3a", "holds_3b",
    ]
    .map(String::from)
    .to_vec();
    let mut result = SweepResult::new(meta, columns);
    for r in rows {
        result.rows.push(vec![
            fmt_f64(r.beta),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs_2a),
            fmt_f64(r.rhs_2b),
            fmt_f64(r.rhs_3a),
            fmt_f64(r.rhs_3b),
            (r.holds_2a as u8).to_string(),
            (r.holds_2b as u8).to_string(),
            (r.holds_3a as u8).to_string(),
            (r.holds_3b as u8).to_string(),
        ]);
    }
    Ok(result)
}

/// ℓ1-ℓ2 applicability-condition scan as CSV. Columns:
/// `beta,lhs,rhs_1,rhs_2,holds_1,holds_2`.
pub fn condition_scan_l1l2(pair: &SignalPair, n: usize, beta_grid: &[f64]) -> Result<SweepResult> {
    let profile = compute_support_profile(pair, 0.0);
    let card = compute_cardinalities(&profile, n);
    let rows = bounds::l1l2_condition_scan(pair, &profile, &card, n, beta_grid)?;
    let meta = vec![
        ("family".into(), "l1l2".into()),
        ("n".into(), n.to_string()),
        ("s".into(), card.s.to_string()),
        ("q".into(), card.q.to_string()),
    ];
    let columns =
        ["beta", "lhs", "rhs_1", "rhs_2", "holds_1", "holds_2"].map(String::from).to_vec();
    let mut result = SweepResult::new(meta, columns);
    for r in rows {
        result.rows.push(vec![
            fmt_f64(r.beta),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs_1),
            fmt_f64(r.rhs_2),
            (r.holds_1 as u8).to_string(),
            (r.holds_2 as u8).to_string(),
        ]);
    }
    Ok(result)
}
