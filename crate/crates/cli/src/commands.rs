//! One handler per subcommand. Every handler is a pure function of its
//! parameter struct plus (workers, format), returning the rendered payload —
//! the same path serves both a fresh invocation and a manifest replay.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use unidioph_core::dirichlet::{
    delta_jk, delta_jkl, delta_powers, delta_set, verify_set_bound, verify_word_bound,
};
use unidioph_core::displacement::{phi_empirical, phi_unitary};
use unidioph_core::finite::{catalog_action, sweep_separation, MetricKind};
use unidioph_core::haar::{
    phi_lower_bound, sample_phi_values, weyl_phi_quadrature, wilson_interval,
    DistributionEstimate,
};
use unidioph_core::linalg::{check_unitary, unitarity_tol, UnitaryMatrix};
use unidioph_core::rng::{seeded_rng, split_quotas};
use unidioph_core::search::SearchResult;
use unidioph_core::torus::{phi_torus, torus_delta, torus_phi_cdf, TorusPoint};
use unidioph_core::Error as CoreError;

/// Failures split by exit code: usage problems (2) versus numerical failures
/// carrying the originating module error (3).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotUnitary { .. }
            | CoreError::EigensolverFailure(_)
            | CoreError::ConvergenceFailure(_) => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CmdResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Quadrature,
}

pub struct CommandOutput {
    pub payload: String,
    /// True when a bound violation (or replay mismatch) should gate CI.
    pub violation: bool,
}

fn json_payload<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output serializes")
}

fn read_unitary(path: &Path, flag: &str) -> CmdResult<UnitaryMatrix> {
    let m = unidioph_core::io::read_matrix(path)
        .map_err(|e| CliError::Usage(format!("{flag} {}: {e}", path.display())))?;
    check_unitary(&m, unitarity_tol(m.dim())).map_err(CliError::from)
}

// ---------------------------------------------------------------------------
// phi

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhiArgs {
    /// Matrix JSON file {"n": N, "re": [[...]], "im": [[...]]}
    #[arg(long)]
    pub matrix: PathBuf,
    /// Estimate the sup by sphere sampling instead of the spectral formula
    #[arg(long, default_value_t = false)]
    pub empirical: bool,
    /// Sample count for --empirical
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct PhiOutput {
    phi: f64,
    method: &'static str,
    /// Unit vector attaining the sup, as [re, im] pairs; null for --empirical.
    witness: Option<Vec<[f64; 2]>>,
    unitarity_residual: f64,
}

pub fn run_phi(args: &PhiArgs) -> CmdResult<CommandOutput> {
    let a = read_unitary(&args.matrix, "--matrix")?;
    let out = if args.empirical {
        if args.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        PhiOutput {
            phi: phi_empirical(&a, args.samples, args.seed),
            method: "empirical",
            witness: None,
            unitarity_residual: a.residual(),
        }
    } else {
        let d = phi_unitary(&a).map_err(CliError::from)?;
        PhiOutput {
            phi: d.value,
            method: "spectral",
            witness: d
                .witness
                .map(|w| w.iter().map(|z| [z.re, z.im]).collect()),
            unitarity_residual: a.residual(),
        }
    };
    Ok(CommandOutput {
        payload: json_payload(&out),
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// phi-dist

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhiDistArgs {
    /// Matrix dimension N
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub n: u32,
    /// Threshold t
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Mc)]
    pub method: Method,
    /// Gauss-Legendre points per axis for --method quadrature
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
}

#[derive(Serialize)]
struct PhiDistOutput {
    method: &'static str,
    t: f64,
    n: u32,
    estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
}

pub fn run_phi_dist(args: &PhiDistArgs, workers: u32) -> CmdResult<CommandOutput> {
    let out = match args.method {
        Method::Mc => {
            let est = unidioph_core::haar::phi_distribution_mc_workers(
                args.n as usize,
                args.t,
                args.samples,
                args.seed,
                workers,
            )?;
            PhiDistOutput {
                method: "mc",
                t: est.t,
                n: args.n,
                estimate: est.estimate,
                ci_low: Some(est.ci_low),
                ci_high: Some(est.ci_high),
                hits: Some(est.hits),
                n_samples: Some(est.n_samples),
                grid: None,
            }
        }
        Method::Quadrature => {
            let estimate = weyl_phi_quadrature(args.n as usize, args.t, args.grid)?;
            PhiDistOutput {
                method: "quadrature",
                t: args.t,
                n: args.n,
                estimate,
                ci_low: None,
                ci_high: None,
                hits: None,
                n_samples: None,
                grid: Some(args.grid),
            }
        }
    };
    Ok(CommandOutput {
        payload: json_payload(&out),
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// phi-curve

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhiCurveArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub n: u32,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Number of rows (inclusive endpoints)
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 21)]
    pub steps: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Mc)]
    pub method: Method,
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    estimate: f64,
    ci_low: f64,
    ci_high: f64,
    lower_bound: f64,
}

fn render_rows(rows: &[CurveRow], format: Format) -> String {
    match format {
        Format::Json => json_payload(&rows),
        Format::Csv => {
            let mut out = String::from("t,estimate,ci_low,ci_high,lower_bound\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.t, r.estimate, r.ci_low, r.ci_high, r.lower_bound
                );
            }
            out
        }
    }
}

fn curve_grid(t_min: f64, t_max: f64, steps: u32) -> CmdResult<Vec<f64>> {
    if !(0.0..=2.0).contains(&t_min) || !(0.0..=2.0).contains(&t_max) || t_min >= t_max {
        return Err(CliError::Usage(format!(
            "need 0 <= t-min < t-max <= 2, got [{t_min}, {t_max}]"
        )));
    }
    Ok((0..steps)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64)
        .collect())
}

pub fn run_phi_curve(args: &PhiCurveArgs, workers: u32, format: Format) -> CmdResult<CommandOutput> {
    let ts = curve_grid(args.t_min, args.t_max, args.steps)?;
    let n = args.n as usize;
    let lower = |t: f64| {
        if t > 0.0 {
            phi_lower_bound(n, t).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let rows: Vec<CurveRow> = match args.method {
        Method::Mc => {
            if args.samples < 100 {
                return Err(CliError::Usage("--samples must be at least 100".into()));
            }
            // One shared sample set: hit counts are then exactly monotone in t.
            let mut phis = sample_phi_values(n, args.samples, args.seed, workers)?;
            phis.sort_by(f64::total_cmp);
            ts.iter()
                .map(|&t| {
                    let hits = phis.partition_point(|&p| p < t) as u64;
                    let est = DistributionEstimate::from_hits(t, hits, args.samples);
                    CurveRow {
                        t,
                        estimate: est.estimate,
                        ci_low: est.ci_low,
                        ci_high: est.ci_high,
                        lower_bound: lower(t),
                    }
                })
                .collect()
        }
        Method::Quadrature => ts
            .iter()
            .map(|&t| {
                let estimate = if t > 0.0 {
                    weyl_phi_quadrature(n, t, args.grid)?
                } else {
                    0.0
                };
                Ok(CurveRow {
                    t,
                    estimate,
                    ci_low: estimate,
                    ci_high: estimate,
                    lower_bound: lower(t),
                })
            })
            .collect::<CmdResult<_>>()?,
    };
    Ok(CommandOutput {
        payload: render_rows(&rows, format),
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// delta searches

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltaSetArgs {
    /// Directory of matrix .json files, or one file holding a JSON array
    #[arg(long)]
    pub matrices: PathBuf,
}

#[derive(Serialize)]
struct DeltaSetOutput {
    cardinality: usize,
    dim: usize,
    #[serde(flatten)]
    result: SearchResult,
}

pub fn run_delta_set(args: &DeltaSetArgs) -> CmdResult<CommandOutput> {
    let raw = unidioph_core::io::read_matrix_list(&args.matrices)
        .map_err(|e| CliError::Usage(format!("--matrices {}: {e}", args.matrices.display())))?;
    let unitaries: Vec<UnitaryMatrix> = raw
        .iter()
        .map(|m| check_unitary(m, unitarity_tol(m.dim())))
        .collect::<Result<_, _>>()
        .map_err(CliError::from)?;
    let dim = unitaries.first().map_or(0, |u| u.dim());
    let result = delta_set(&unitaries)?;
    let out = DeltaSetOutput {
        cardinality: unitaries.len(),
        dim,
        result,
    };
    Ok(CommandOutput {
        payload: json_payload(&out),
        violation: false,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltaPowersArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
}

pub fn run_delta_powers(args: &DeltaPowersArgs) -> CmdResult<CommandOutput> {
    let a = read_unitary(&args.a, "--a")?;
    let result = delta_powers(&a, args.n_max)?;
    Ok(CommandOutput {
        payload: json_payload(&result),
        violation: false,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltaJkArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long = "J", value_parser = clap::value_parser!(u64).range(1..))]
    pub j: u64,
    #[arg(long = "K", value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
}

pub fn run_delta_jk(args: &DeltaJkArgs) -> CmdResult<CommandOutput> {
    let a = read_unitary(&args.a, "--a")?;
    let b = read_unitary(&args.b, "--b")?;
    let result = delta_jk(&a, &b, args.j, args.k)?;
    Ok(CommandOutput {
        payload: json_payload(&result),
        violation: false,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltaJklArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub c: PathBuf,
    #[arg(long = "J", value_parser = clap::value_parser!(u64).range(1..))]
    pub j: u64,
    #[arg(long = "K", value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long = "L", value_parser = clap::value_parser!(u64).range(1..))]
    pub l: u64,
}

pub fn run_delta_jkl(args: &DeltaJklArgs) -> CmdResult<CommandOutput> {
    let a = read_unitary(&args.a, "--a")?;
    let b = read_unitary(&args.b, "--b")?;
    let c = read_unitary(&args.c, "--c")?;
    let result = delta_jkl(&a, &b, &c, args.j, args.k, args.l)?;
    Ok(CommandOutput {
        payload: json_payload(&result),
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// 1 = finite-set bound, 2 = two-letter-word bound
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub n: u32,
    /// Set size for --theorem 1
    #[arg(long)]
    pub cardinality: Option<usize>,
    /// Box side J for --theorem 2
    #[arg(long = "J")]
    pub j: Option<u64>,
    /// Box side K for --theorem 2
    #[arg(long = "K")]
    pub k: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run_verify(args: &VerifyArgs) -> CmdResult<CommandOutput> {
    let report = match args.theorem {
        1 => {
            let cardinality = args.cardinality.ok_or_else(|| {
                CliError::Usage("--theorem 1 requires --cardinality".into())
            })?;
            verify_set_bound(args.n as usize, cardinality, args.trials, args.seed)?
        }
        2 => {
            let j = args
                .j
                .ok_or_else(|| CliError::Usage("--theorem 2 requires --J".into()))?;
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("--theorem 2 requires --K".into()))?;
            if j == 0 || k == 0 {
                return Err(CliError::Usage("--J and --K must be at least 1".into()));
            }
            verify_word_bound(args.n as usize, j, k, args.trials, args.seed)?
        }
        _ => unreachable!("clap range"),
    };
    let violation = !report.passed();
    Ok(CommandOutput {
        payload: json_payload(&report),
        violation,
    })
}

// ---------------------------------------------------------------------------
// torus

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TorusDeltaArgs {
    /// JSON file: array of coordinate arrays, one generator per entry
    #[arg(long)]
    pub alphas: PathBuf,
    /// Comma-separated box sizes, one per generator, e.g. 10,10
    #[arg(long)]
    pub ks: String,
}

#[derive(Serialize)]
struct TorusDeltaOutput {
    dim: usize,
    generators: usize,
    #[serde(flatten)]
    result: SearchResult,
}

pub fn run_torus_delta(args: &TorusDeltaArgs) -> CmdResult<CommandOutput> {
    let alphas = unidioph_core::io::read_torus_points(&args.alphas)
        .map_err(|e| CliError::Usage(format!("--alphas {}: {e}", args.alphas.display())))?;
    let ks: Vec<u32> = args
        .ks
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("--ks: {s:?} is not a positive integer")))
        })
        .collect::<CmdResult<_>>()?;
    if ks.iter().any(|&k| k == 0) {
        return Err(CliError::Usage("--ks entries must be at least 1".into()));
    }
    let result = torus_delta(&alphas, &ks)?;
    let out = TorusDeltaOutput {
        dim: alphas[0].dim(),
        generators: alphas.len(),
        result,
    };
    Ok(CommandOutput {
        payload: json_payload(&out),
        violation: false,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TorusPhiCurveArgs {
    /// Torus dimension L
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub l: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 21)]
    pub steps: u32,
    /// When set, estimate Φ empirically from this many uniform samples;
    /// the closed form (2t)^L fills the lower_bound column either way
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub t_max: f64,
}

pub fn run_torus_phi_curve(
    args: &TorusPhiCurveArgs,
    workers: u32,
    format: Format,
) -> CmdResult<CommandOutput> {
    if !(args.t_max > 0.0 && args.t_max <= 0.5) {
        return Err(CliError::Usage(format!(
            "--t-max must lie in (0, 1/2], got {}",
            args.t_max
        )));
    }
    let dim = args.l as usize;
    let ts: Vec<f64> = (0..args.steps)
        .map(|i| args.t_max * i as f64 / (args.steps - 1) as f64)
        .collect();
    let rows: Vec<CurveRow> = match args.samples {
        None => ts
            .iter()
            .map(|&t| {
                let v = torus_phi_cdf(t, dim);
                CurveRow {
                    t,
                    estimate: v,
                    ci_low: v,
                    ci_high: v,
                    lower_bound: v,
                }
            })
            .collect(),
        Some(samples) => {
            if samples < 100 {
                return Err(CliError::Usage("--samples must be at least 100".into()));
            }
            let mut phis: Vec<f64> = Vec::with_capacity(samples as usize);
            for (w, quota) in split_quotas(samples, workers).into_iter().enumerate() {
                let mut rng = seeded_rng(args.seed, w as u64);
                for _ in 0..quota {
                    phis.push(phi_torus(&TorusPoint::uniform_with_rng(dim, &mut rng)));
                }
            }
            phis.sort_by(f64::total_cmp);
            ts.iter()
                .map(|&t| {
                    let hits = phis.partition_point(|&p| p < t) as u64;
                    let (ci_low, ci_high) = wilson_interval(hits, samples);
                    CurveRow {
                        t,
                        estimate: hits as f64 / samples as f64,
                        ci_low,
                        ci_high,
                        lower_bound: torus_phi_cdf(t, dim),
                    }
                })
                .collect()
        }
    };
    Ok(CommandOutput {
        payload: render_rows(&rows, format),
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// finite

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FiniteVerifyArgs {
    /// Built-in action: zN (cyclic), sN (symmetric), dN (dihedral)
    #[arg(long, conflicts_with = "tables")]
    pub group: Option<String>,
    /// JSON file with {"mul": [[...]], "act": [[...]], "dist": [[...]]}
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Metric override for built-in groups: circular or discrete
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 3)]
    pub subset_size: u32,
    /// Subsets to sample when exhaustive enumeration exceeds 10^5
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct FiniteVerifyOutput {
    source: String,
    order: usize,
    space_size: usize,
    nonarchimedean: bool,
    isometric: bool,
    subset_size: usize,
    subsets_checked: u64,
    sampled: bool,
    violations: u64,
    arch_equalities: u64,
    nonarch_equalities: u64,
    passed: bool,
}

pub fn run_finite_verify(args: &FiniteVerifyArgs) -> CmdResult<CommandOutput> {
    let metric = match args.metric.as_deref() {
        None => None,
        Some("circular") => Some(MetricKind::Circular),
        Some("discrete") => Some(MetricKind::Discrete),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--metric must be circular or discrete, got {other:?}"
            )))
        }
    };
    let (source, action) = match (&args.group, &args.tables) {
        (Some(name), None) => (name.clone(), catalog_action(name, metric)?),
        (None, Some(path)) => {
            if metric.is_some() {
                return Err(CliError::Usage(
                    "--metric only applies to built-in groups; table files carry their own metric"
                        .into(),
                ));
            }
            let action = unidioph_core::io::read_finite_action(path)
                .map_err(|e| CliError::Usage(format!("--tables {}: {e}", path.display())))?;
            (path.display().to_string(), action)
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --group or --tables is required".into(),
            ))
        }
    };
    let report = sweep_separation(
        &action,
        args.subset_size as usize,
        100_000,
        args.samples,
        args.seed,
    )?;
    let out = FiniteVerifyOutput {
        source,
        order: action.group().order(),
        space_size: action.space().size(),
        nonarchimedean: action.space().nonarchimedean(),
        isometric: action.isometric(),
        subset_size: report.subset_size,
        subsets_checked: report.subsets_checked,
        sampled: report.sampled,
        violations: report.violations,
        arch_equalities: report.arch_equalities,
        nonarch_equalities: report.nonarch_equalities,
        passed: report.violations == 0,
    };
    Ok(CommandOutput {
        violation: report.violations > 0,
        payload: json_payload(&out),
    })
}
