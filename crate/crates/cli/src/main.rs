//! `priorcs` — sparse recovery with prior information from the command line.
//!
//! Subcommands generate reproducible synthetic instances, solve recovery
//! problems, evaluate measurement bounds and their applicability conditions,
//! estimate Gaussian widths, and run the sweep experiments. All output is
//! CSV or JSON on stdout unless `--out FILE` redirects it; every random
//! draw is seeded, so identical invocations produce identical bytes.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use priorcs::bounds::{self, BoundResult};
use priorcs::geometry::{self, cone_model, ConeKind};
use priorcs::lab::{self, InstanceSpec, SolverKind};
use priorcs::model::{
    compute_cardinalities, compute_support_profile, verify_set_identities, SignalPair,
};
use priorcs::solver::{self, Constraint, RecoveryProblem, Regularizer, SolverConfig};

#[derive(Parser)]
#[command(
    name = "priorcs",
    version,
    about = "Sparse recovery with prior information: solvers, bounds, width tools, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance (x*, w) and write it as JSON
    Gen(GenArgs),
    /// Solve a recovery problem and print the solution as JSON
    Solve(SolveArgs),
    /// Evaluate measurement bounds for an instance as CSV
    Bounds(BoundsArgs),
    /// Monte-Carlo estimate of a descent-cone squared width
    Width(WidthArgs),
    /// Phase-transition sweep: success rate per (solver, m)
    Phase(PhaseArgs),
    /// Minimum-measurement search over a β grid (incremental rows)
    Betasweep(BetasweepArgs),
    /// Applicability-condition scan over a β grid
    Conditions(ConditionsArgs),
    /// Run the built-in identity and property suites
    Verify(VerifyArgs),
}

/// Flags that assemble an [`InstanceSpec`]; unset fields fall back to the
/// desk-scale preset (or the full-scale preset under `--paper-scale`).
#[derive(Args, Clone)]
struct SpecArgs {
    /// Ambient dimension
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity of x*
    #[arg(long)]
    s: Option<usize>,
    /// Nonzeros of the prior error z = w - x*
    #[arg(long)]
    z_sparsity: Option<usize>,
    /// How many prior-error positions fall inside supp(x*)
    #[arg(long)]
    overlap: Option<usize>,
    /// Standard deviation of prior-error values
    #[arg(long)]
    z_std: Option<f64>,
    /// Standard deviation of x* nonzeros
    #[arg(long)]
    nonzero_std: Option<f64>,
    /// Instance seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Use the large reference configuration (n=1000, s=70) as the base
    #[arg(long)]
    paper_scale: bool,
}

impl SpecArgs {
    fn build(&self) -> InstanceSpec {
        let mut spec = if self.paper_scale {
            InstanceSpec::full_scale(self.seed)
        } else {
            InstanceSpec::desk_scale(self.seed)
        };
        if let Some(n) = self.n {
            spec.n = n;
        }
        if let Some(s) = self.s {
            spec.s = s;
        }
        if let Some(z) = self.z_sparsity {
            spec.z_sparsity = z;
        }
        if let Some(o) = self.overlap {
            spec.support_overlap = o;
        }
        if let Some(v) = self.z_std {
            spec.z_std = v;
        }
        if let Some(v) = self.nonzero_std {
            spec.nonzero_std = v;
        }
        spec
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegChoice {
    L1,
    L1l1,
    L1l2,
}

#[derive(Args)]
struct SolveArgs {
    /// Recovery-problem JSON (matrix, y, regularizer, constraint)
    #[arg(long, conflicts_with = "instance")]
    problem: Option<PathBuf>,
    /// Instance JSON produced by `gen`; combined with --m and --matrix-seed
    #[arg(long, required_unless_present = "problem")]
    instance: Option<PathBuf>,
    /// Number of measurement rows (instance mode)
    #[arg(long)]
    m: Option<usize>,
    /// Seed for the Gaussian measurement matrix (instance mode)
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
    /// Regularizer (instance mode)
    #[arg(long, value_enum, default_value_t = RegChoice::L1l1)]
    reg: RegChoice,
    /// Prior weight β (instance mode, prior regularizers)
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Noise ball radius; omits to require Ax = y exactly
    #[arg(long)]
    sigma: Option<f64>,
    /// Iteration cap
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Relative primal/dual tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Instance JSON produced by `gen`
    #[arg(long)]
    instance: PathBuf,
    /// β grid: comma list or start:stop:step
    #[arg(long, default_value = "1")]
    betas: String,
    /// Failure budget for the noisy-mode measurement count
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichCone {
    L1,
    F1,
    F2,
}

#[derive(Args)]
struct WidthArgs {
    /// Instance JSON produced by `gen`
    #[arg(long)]
    instance: PathBuf,
    /// Which regularizer's descent cone to measure
    #[arg(long, value_enum, default_value_t = WhichCone::F1)]
    which: WhichCone,
    /// Prior weight β (f1/f2 cones)
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Monte-Carlo seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Trials per (solver, m); defaults to 20, or 50 under --paper-scale
    #[arg(long)]
    trials: Option<usize>,
    /// Measurement grid: comma list or start:stop:step; default brackets the bounds
    #[arg(long)]
    m_grid: Option<String>,
    /// Comma subset of l1,l1l1,l1l2
    #[arg(long, default_value = "l1,l1l1,l1l2")]
    solvers: String,
    /// Prior weight β for the prior-aware solvers
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Base seed for the per-trial measurement matrices
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BetasweepArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Solver family to sweep
    #[arg(long, default_value = "l1l1")]
    family: String,
    /// β grid: comma list or start:stop:step
    #[arg(long)]
    betas: Option<String>,
    /// Comma list of square-matrix seeds
    #[arg(long, default_value = "1")]
    matrix_seeds: String,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionsArgs {
    /// Instance JSON produced by `gen`
    #[arg(long)]
    instance: PathBuf,
    /// Which family's conditions to scan
    #[arg(long, default_value = "l1l1")]
    family: String,
    /// β grid: comma list or start:stop:step
    #[arg(long)]
    betas: Option<String>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random cases per fuzz suite
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Fuzz seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// On-disk instance: the generating recipe plus the realized vectors.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    spec: InstanceSpec,
    x_star: Vec<f64>,
    w: Vec<f64>,
}

fn load_instance(path: &PathBuf) -> Result<(InstanceSpec, SignalPair), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let pair = SignalPair::new(file.x_star, file.w).map_err(|e| e.to_string())?;
    Ok((file.spec, pair))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
fn parse_f64_grid(text: &str) -> Result<Vec<f64>, String> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:step, got `{text}`"));
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("{e}: `{}`", parts[0]))?;
        let stop: f64 = parts[1].parse().map_err(|e| format!("{e}: `{}`", parts[1]))?;
        let step: f64 = parts[2].parse().map_err(|e| format!("{e}: `{}`", parts[2]))?;
        // `step > 0.0` is false for NaN, so NaN steps are rejected too
        let step_ok = step > 0.0;
        if !step_ok || stop < start || stop.is_nan() {
            return Err(format!("need step > 0 and stop >= start in `{text}`"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| start + k as f64 * step).collect())
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{e}: `{t}`")))
            .collect()
    }
}

fn parse_usize_grid(text: &str) -> Result<Vec<usize>, String> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:step, got `{text}`"));
        }
        let start: usize = parts[0].parse().map_err(|e| format!("{e}: `{}`", parts[0]))?;
        let stop: usize = parts[1].parse().map_err(|e| format!("{e}: `{}`", parts[1]))?;
        let step: usize = parts[2].parse().map_err(|e| format!("{e}: `{}`", parts[2]))?;
        if step == 0 || stop < start {
            return Err(format!("need step > 0 and stop >= start in `{text}`"));
        }
        Ok((start..=stop).step_by(step).collect())
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{e}: `{t}`")))
            .collect()
    }
}

fn parse_solvers(text: &str, beta: f64) -> Result<Vec<SolverKind>, String> {
    text.split(',')
        .map(|t| match t.trim() {
            "l1" => Ok(SolverKind::L1),
            "l1l1" => Ok(SolverKind::L1L1 { beta }),
            "l1l2" => Ok(SolverKind::L1L2 { beta }),
            other => Err(format!("unknown solver `{other}` (expected l1, l1l1, l1l2)")),
        })
        .collect()
}

fn cmd_gen(args: &GenArgs) -> Result<(), String> {
    let spec = args.spec.build();
    let pair = lab::gen_instance(&spec).map_err(|e| e.to_string())?;
    let file = InstanceFile { spec, x_star: pair.x_star, w: pair.w };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
    text.push('\n');
    write_output(&args.out, &text)
}

fn cmd_solve(args: &SolveArgs) -> Result<(), String> {
    let problem = if let Some(path) = &args.problem {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str::<RecoveryProblem>(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        let path = args.instance.as_ref().expect("clap enforces instance or problem");
        let (_, pair) = load_instance(path)?;
        let m = args.m.ok_or("--m is required when solving from an instance")?;
        let a = lab::gen_gaussian_matrix(m, pair.n, args.matrix_seed);
        let y = &a * DVector::from_vec(pair.x_star.clone());
        let regularizer = match args.reg {
            RegChoice::L1 => Regularizer::L1,
            RegChoice::L1l1 => Regularizer::L1L1 { beta: args.beta, w: pair.w.clone() },
            RegChoice::L1l2 => Regularizer::L1L2 { beta: args.beta, w: pair.w.clone() },
        };
        let constraint = match args.sigma {
            Some(sigma) => Constraint::Noisy { sigma },
            None => Constraint::Exact,
        };
        RecoveryProblem::new(a, y, regularizer, constraint).map_err(|e| e.to_string())?
    };
    let config = SolverConfig {
        max_iter: args.max_iter,
        tol_primal: args.tol,
        tol_dual: args.tol,
        ..SolverConfig::default()
    };
    let solution = solver::solve(&problem, &config).map_err(|e| e.to_string())?;
    let mut text = serde_json::to_string_pretty(&solution).map_err(|e| e.to_string())?;
    text.push('\n');
    write_output(&args.out, &text)
}

fn bound_csv_rows(rows: &[BoundResult], out: &mut String) {
    for r in rows {
        let m_noisy = r.m_noisy.map_or_else(String::new, |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.beta,
            r.case_label,
            r.condition_holds as u8,
            r.width_sq_bound,
            r.m_noiseless,
            m_noisy
        ));
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), String> {
    let (spec, pair) = load_instance(&args.instance)?;
    let n = spec.n;
    let profile = compute_support_profile(&pair, 0.0);
    let card = compute_cardinalities(&profile, n);
    let betas = parse_f64_grid(&args.betas)?;

    let eps = |r: BoundResult| r.with_epsilon(args.epsilon).map_err(|e| e.to_string());
    let mut rows = vec![eps(bounds::cs_bound_result(n, card.s).map_err(|e| e.to_string())?)?];
    for &beta in &betas {
        match bounds::l1l1_width_bound_all(&card, n, beta) {
            Ok(list) => {
                for r in list {
                    rows.push(eps(r)?);
                }
            }
            Err(e) => eprintln!("l1l1 bounds unavailable at beta={beta}: {e}"),
        }
        match bounds::l1l2_width_bound_all(&pair, &profile, &card, n, beta) {
            Ok(list) => {
                for r in list {
                    rows.push(eps(r)?);
                }
            }
            Err(e) => eprintln!("l1l2 bounds unavailable at beta={beta}: {e}"),
        }
    }

    let mut text = String::from("beta,case,condition_holds,width_sq,m_noiseless,m_noisy\n");
    bound_csv_rows(&rows, &mut text);
    write_output(&args.out, &text)
}

fn cmd_width(args: &WidthArgs) -> Result<(), String> {
    let (_, pair) = load_instance(&args.instance)?;
    let profile = compute_support_profile(&pair, 0.0);
    let kind = match args.which {
        WhichCone::L1 => ConeKind::L1,
        WhichCone::F1 => ConeKind::F1,
        WhichCone::F2 => ConeKind::F2,
    };
    let cone = cone_model(&pair, &profile, args.beta, kind);
    let (estimate, std_error) = geometry::mc_width_sq(&cone, args.trials, args.seed);
    write_output(&args.out, &format!("estimate,std_error\n{estimate},{std_error}\n"))
}

fn cmd_phase(args: &PhaseArgs) -> Result<(), String> {
    let spec = args.spec.build();
    let trials = args.trials.unwrap_or(if args.spec.paper_scale { 50 } else { 20 });
    let solvers = parse_solvers(&args.solvers, args.beta)?;

    let m_grid = match &args.m_grid {
        Some(text) => parse_usize_grid(text)?,
        None => {
            // bracket the predicted measurement counts of the chosen solvers
            let pair = lab::gen_instance(&spec).map_err(|e| e.to_string())?;
            let profile = compute_support_profile(&pair, 0.0);
            let card = compute_cardinalities(&profile, spec.n);
            let ms: Vec<u64> = solvers
                .iter()
                .map(|k| lab::bound_measurements(k, &pair, &profile, &card, spec.n))
                .filter(|&m| m > 0)
                .collect();
            let lo = ms.iter().min().map_or(1, |&m| (m as usize / 2).max(1));
            let hi = ms.iter().max().map_or(spec.n, |&m| (m as usize * 5 / 4).min(spec.n));
            let points = 8usize;
            (0..points)
                .map(|k| lo + k * (hi - lo).max(1) / (points - 1))
                .map(|m| m.min(spec.n))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect()
        }
    };
    let result = lab::phase_transition(&spec, &m_grid, trials, &solvers, args.matrix_seed)
        .map_err(|e| e.to_string())?;
    write_output(&args.out, &result.to_csv())
}

fn cmd_betasweep(args: &BetasweepArgs) -> Result<(), String> {
    let spec = args.spec.build();
    let default_betas = match args.family.as_str() {
        "l1l2" => "0.5,1,2.5,10",
        _ => "0.01,0.05,0.1,0.5,0.75,0.9,1,2.5,5,10,50,100",
    };
    let betas = parse_f64_grid(args.betas.as_deref().unwrap_or(default_betas))?;
    let seeds = args
        .matrix_seeds
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("{e}: `{t}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let result = lab::min_measurements_sweep(&spec, &betas, &seeds, &args.family)
        .map_err(|e| e.to_string())?;
    write_output(&args.out, &result.to_csv())
}

fn cmd_conditions(args: &ConditionsArgs) -> Result<(), String> {
    let (spec, pair) = load_instance(&args.instance)?;
    let result = match args.family.as_str() {
        "l1l1" => {
            let betas = parse_f64_grid(args.betas.as_deref().unwrap_or("0.05:1.5:0.005"))?;
            let profile = compute_support_profile(&pair, 0.0);
            let card = compute_cardinalities(&profile, spec.n);
            lab::condition_scan_l1l1(&card, spec.n, &betas).map_err(|e| e.to_string())?
        }
        "l1l2" => {
            let betas = parse_f64_grid(args.betas.as_deref().unwrap_or("0.1:3:0.05"))?;
            lab::condition_scan_l1l2(&pair, spec.n, &betas).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown family `{other}` (expected l1l1 or l1l2)")),
    };
    write_output(&args.out, &result.to_csv())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), String> {
    use rand::{Rng, SeedableRng};
    let mut ok = true;
    let mut suite = |name: &str, pass: bool| {
        println!("{name}: {}", if pass { "ok" } else { "FAILED" });
        ok &= pass;
    };

    // counting identities on random sparse pairs with engineered coincidences
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(args.seed);
    let mut identities = true;
    for _ in 0..args.trials {
        let n = rng.gen_range(1..=60);
        let mut x = vec![0.0f64; n];
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            if rng.gen_bool(0.6) {
                x[i] = rng.gen_range(-2.0..2.0);
            }
            let r: f64 = rng.gen();
            w[i] = if r < 0.3 {
                x[i]
            } else if r < 0.55 {
                0.0
            } else {
                x[i] + rng.gen_range(-2.0..2.0)
            };
        }
        let pair = SignalPair::new(x, w).map_err(|e| e.to_string())?;
        let profile = compute_support_profile(&pair, 0.0);
        let card = compute_cardinalities(&profile, n);
        identities &= verify_set_identities(&card, &profile).all_pass();
    }
    suite("set-identities", identities);

    // expected Gaussian norm sandwich
    let mut sandwich = true;
    for m in 1..=10_000usize {
        let lam = geometry::expected_gaussian_norm(m);
        sandwich &= lam >= m as f64 / ((m + 1) as f64).sqrt() - 1e-9;
        sandwich &= lam <= (m as f64).sqrt() + 1e-9;
    }
    suite("gaussian-norm-sandwich", sandwich);

    // Gaussian tail sandwich on a grid
    let mut tails = true;
    for k in 1..=160 {
        let x = k as f64 * 0.05;
        let (lo, q, hi) = geometry::q_function_bounds_check(x);
        tails &= lo <= q + 1e-15 && q <= hi + 1e-15;
    }
    suite("gaussian-tail-sandwich", tails);

    // interval-distance bound dominates the exact expectation
    let mut dominates = true;
    for ia in -20..=20 {
        for ib in 1..=20 {
            let (a, b) = (ia as f64 * 0.25, ib as f64 * 0.25);
            dominates &= geometry::expected_interval_dist_sq_bound(a, b)
                >= geometry::expected_interval_dist_sq_exact(a, b) - 1e-12;
        }
    }
    suite("interval-bound-domination", dominates);

    // frozen measurement-count anchors
    let card =
        priorcs::model::CardinalityProfile { s: 70, l: 28, q: 76, h: 11, h_bar: 11, xi: -42 };
    let mut anchors = bounds::cs_bound_result(1000, 70).is_ok_and(|r| r.m_noiseless == 472);
    anchors &= bounds::l1l1_simplified_bound(&card, 1000).is_ok_and(|r| r.m_noiseless == 136);
    anchors &= bounds::l1l1_width_bound(&card, 1000, 1.0)
        .is_ok_and(|v| v.first().is_some_and(|r| r.rounded_width() == 135));
    anchors &= bounds::cs_bound_result(500, 50).is_ok_and(|r| r.m_noiseless == 302);
    anchors &= bounds::l1l1_width_bound_all(&card, 1000, 0.8).is_ok_and(|v| {
        let w: Vec<u64> = v.iter().map(|r| r.rounded_width()).collect();
        w.contains(&180) && w.contains(&255)
    });
    suite("bound-anchors", anchors);

    // proximal-map spot checks
    let mut prox = solver::prox_l1(&[3.0, -0.5], 1.0) == vec![2.0, 0.0];
    prox &= solver::prox_l1l1(&[2.0], 0.5, 10.0, &[2.0]) == vec![2.0];
    let reduced = solver::prox_l1l1(&[2.5], 0.4, 1.5, &[0.0])[0];
    prox &= (reduced - solver::prox_l1(&[2.5], 1.0)[0]).abs() < 1e-12;
    suite("prox-spot-checks", prox);

    // affine projection example
    let a = nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let y = DVector::from_vec(vec![2.0]);
    let projection = solver::AffineProjector::new(&a, &y)
        .map(|p| p.project(&DVector::from_vec(vec![0.0, 5.0])))
        .is_ok_and(|out| (out[0] - 2.0).abs() < 1e-12 && (out[1] - 5.0).abs() < 1e-12);
    suite("affine-projection", projection);

    if ok {
        Ok(())
    } else {
        Err("one or more verify suites failed".into())
    }
}

fn configure_threads() {
    if let Ok(value) = std::env::var("PRIORCS_THREADS") {
        match value.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => eprintln!("ignoring PRIORCS_THREADS={value} (need a positive integer)"),
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Width(args) => cmd_width(args),
        Command::Phase(args) => cmd_phase(args),
        Command::Betasweep(args) => cmd_betasweep(args),
        Command::Conditions(args) => cmd_conditions(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
