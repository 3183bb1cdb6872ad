use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use prbox::localpart::{
    grid, lower_bound_isotropic, pairing_lower_bound, snk, snk_expansion_check, sweep, upper_bound_isotropic, Family,
    Mode, SolveOptions, SweepOptions, SweepResult, MAX_SNK_N,
};
use prbox::lp::Certificate;
use prbox::strategies::{DEFAULT_BUDGET, DEPOL_DEFINITION};
use prbox::{local_part, Rational, Scalar, Var};
use serde_json::json;

use crate::box_cmd::{load, range_error, ParamArgs};
use crate::output::{approx, write_file, Outcome};

#[derive(Subcommand)]
pub enum LocalpartCmd {
    /// Solve the local part of one box and write its certificate.
    Solve(SolveArgs),
    /// Closed-form lower, pairing and upper envelopes for isotropic boxes.
    Bounds {
        #[arg(long)]
        n: u32,
        /// Evaluate at this ε (symbolic if omitted).
        #[arg(long)]
        eps: Option<Rational>,
    },
    /// Solve on a grid, fit polynomial pieces and check the envelopes.
    Sweep(SweepArgs),
}

#[derive(Args, Clone, Debug)]
pub struct SolverArgs {
    #[arg(long, default_value_t = Mode::ColGen)]
    mode: Mode,
    /// Strategy-count limit for full enumeration.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Disable symmetry reduction in column generation.
    #[arg(long)]
    no_symmetry: bool,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        let mut o = SolveOptions::with_mode(self.mode);
        o.budget = self.budget;
        o.colgen.symmetry = !self.no_symmetry;
        o
    }
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, required_unless_present = "box_file")]
    family: Option<Family>,
    #[arg(long, required_unless_present = "box_file")]
    n: Option<u32>,
    #[command(flatten)]
    param: ParamArgs,
    /// Solve a box JSON file instead of a named family.
    #[arg(long = "box", conflicts_with_all = ["family", "n"])]
    box_file: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Certificate output path.
    #[arg(long, default_value = "certificate.json")]
    cert: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: u32,
    /// Grid step.
    #[arg(long, default_value = "1/64")]
    grid: Rational,
    /// First grid point (default 0).
    #[arg(long)]
    from: Option<Rational>,
    /// Last grid point (default: end of the admissible range).
    #[arg(long)]
    to: Option<Rational>,
    /// Skip the extra points inside gaps between pieces.
    #[arg(long)]
    no_refine: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory for the CSV files, piece report and certificates.
    #[arg(long, default_value = "sweep")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct SnkArgs {
    #[arg(long)]
    n: u32,
    /// A single k (all 0..=n if omitted).
    #[arg(long)]
    k: Option<u32>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory for the certificates.
    #[arg(long, default_value = ".")]
    cert_dir: PathBuf,
}

pub fn run(cmd: LocalpartCmd) -> Result<Outcome> {
    match cmd {
        LocalpartCmd::Solve(args) => solve(args),
        LocalpartCmd::Bounds { n, eps } => bounds(n, eps),
        LocalpartCmd::Sweep(args) => run_sweep(args),
    }
}

fn write_certificate(path: &Path, cert: &Certificate) -> Result<()> {
    write_file(path, &cert.to_json_string())?;
    log::info!("certificate written to {}", path.display());
    Ok(())
}

/// Solver flag plus independent re-verification.
fn audited(cert: &Certificate) -> bool {
    match cert.verify() {
        Ok(_) => cert.certified,
        Err(e) => {
            log::warn!("certificate does not verify: {e}");
            false
        }
    }
}

fn solve(args: SolveArgs) -> Result<Outcome> {
    let b = match (&args.box_file, args.family, args.n) {
        (Some(path), _, _) => load(path)?,
        (None, Some(family), Some(n)) => {
            let Some(p) = args.param.value(family.var())? else {
                bail!("--{} is required for the {family} family", if family == Family::Isotropic { "eps" } else { "delta" });
            };
            family.make(n, &Scalar::from(p), args.param.check()).map_err(range_error)?
        }
        _ => bail!("give --family and --n, or --box"),
    };
    log::info!("{DEPOL_DEFINITION}");
    let lp = local_part(&b, &args.solver.options())?;
    write_certificate(&args.cert, &lp.certificate)?;
    println!("local_part = {}", lp.value);
    println!("mass = {}", lp.mass);
    println!("fraction = {}", lp.fraction);
    let ok = audited(&lp.certificate);
    println!("certified = {ok}");
    println!("certificate = {}", args.cert.display());
    if ok {
        Ok(Outcome::Success)
    } else {
        println!("bounds = [{}, {}]", lp.certificate.objective, lp.certificate.upper_bound);
        Ok(Outcome::NotCertified)
    }
}

fn bounds(n: u32, eps: Option<Rational>) -> Result<Outcome> {
    let e = eps.clone().map(Scalar::from).unwrap_or_else(|| Scalar::var(Var::Eps));
    if let Some(x) = &eps {
        let (lo, hi) = Var::Eps.admissible();
        if x < &lo || x > &hi {
            log::warn!("ε = {x} lies outside [{lo}, {hi}]");
        }
    }
    println!("lower (half the rounds) = {}", lower_bound_isotropic(n, &e));
    println!("pairing = {}", pairing_lower_bound(n, &e));
    println!("upper = {}", upper_bound_isotropic(n, &e));
    Ok(Outcome::Success)
}

fn run_sweep(args: SweepArgs) -> Result<Outcome> {
    let var = args.family.var();
    let (lo, hi) = var.admissible();
    let from = args.from.unwrap_or(lo);
    let to = args.to.unwrap_or(hi);
    if !args.grid.is_positive() {
        bail!("--grid must be positive");
    }
    let points = grid(&args.grid, &from, &to);
    if points.is_empty() {
        bail!("empty grid");
    }
    log::info!("{DEPOL_DEFINITION}");
    let opts = SweepOptions {
        family: args.family,
        solve: args.solver.options(),
        refine: !args.no_refine,
        max_degree: None,
    };
    let r = sweep(args.n, &points, &opts)?;
    write_sweep(&args.out_dir, &r)?;
    print_summary(&r);
    let excluded = r.excluded();
    if !excluded.is_empty() {
        return Ok(Outcome::NotCertified);
    }
    Ok(if r.envelope_violations.is_empty() { Outcome::Success } else { Outcome::ClaimFailure })
}

fn write_sweep(dir: &Path, r: &SweepResult) -> Result<()> {
    let name = r.family.var().symbol();
    let col = if r.family == Family::Isotropic { "eps" } else { "delta" };
    let ids = r.piece_ids();
    let mut csv = format!("{col},local_part,piece_id,certificate_file,certified,refined\n");
    let mut plot = format!("{col},local_part,lower,pairing,upper,local_part_approx\n");
    for (i, p) in r.points.iter().enumerate() {
        let file = format!("certificates/point_{i:03}.json");
        write_file(&dir.join(&file), &p.certificate.to_json_string())?;
        let id = ids[i].map(|k| k.to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{id},{file},{},{}", p.param, p.value, p.certified, p.refined)?;
        if r.family == Family::Isotropic {
            let env = prbox::localpart::Envelope::at(r.n, &p.param);
            writeln!(plot, "{},{},{},{},{},{}", p.param, p.value, env.lower, env.pairing, env.upper, approx(&p.value))?;
        } else {
            writeln!(plot, "{},{},,,,{}", p.param, p.value, approx(&p.value))?;
        }
    }
    write_file(&dir.join("sweep.csv"), &csv)?;
    write_file(&dir.join("plot.csv"), &plot)?;
    let pieces: Vec<_> = r
        .pieces
        .iter()
        .enumerate()
        .map(|(k, p)| {
            json!({
                "id": k,
                "lo": p.lo,
                "hi": p.hi,
                "coefficients": p.poly.coeffs(),
                "polynomial": p.poly.to_string(),
                "points": p.points.iter().map(|&i| &r.points[i].param).collect::<Vec<_>>(),
                "determined": p.determined,
            })
        })
        .collect();
    let report = json!({
        "schema": "prbox/sweep/v1",
        "family": r.family.to_string(),
        "variable": name,
        "n": r.n,
        "pieces": pieces,
        "breakpoints": r.breakpoints(),
        "leading_term": r.leading_term().map(|(k, c)| json!({"power": k, "coefficient": c})),
        "lower_envelope_first_failure": r.lower_envelope_first_failure,
        "envelope_violations": r.envelope_violations,
        "monotone": r.monotone,
        "continuity_failures": r.continuity_failures,
        "excluded": r.excluded(),
        "approximate_columns": ["local_part_approx"],
    });
    write_file(&dir.join("pieces.json"), &serde_json::to_string_pretty(&report)?)?;
    log::info!("sweep written to {}", dir.display());
    Ok(())
}

fn print_summary(r: &SweepResult) {
    let sym = r.family.var().symbol();
    println!("points = {} ({} certified)", r.points.len(), r.certified().count());
    for (k, p) in r.pieces.iter().enumerate() {
        let tag = if p.determined { "" } else { " (underdetermined)" };
        println!("piece {k}: [{}, {}] {}{tag}", p.lo, p.hi, p.poly);
    }
    if let Some((k, c)) = r.leading_term() {
        println!("leading term = {c}·{sym}^{k}");
    }
    match &r.lower_envelope_first_failure {
        Some(x) if r.family == Family::Isotropic => println!("lower envelope first fails at {sym} = {x}"),
        None if r.family == Family::Isotropic => println!("lower envelope holds on the whole grid"),
        _ => {}
    }
    if r.family == Family::Isotropic {
        let v = &r.envelope_violations;
        println!("pairing/upper envelope violations = {}", v.len());
    }
    println!("monotone = {}", r.monotone);
    println!("continuity failures = {}", r.continuity_failures.len());
    for x in r.excluded() {
        println!("excluded (not certified): {sym} = {x}");
    }
}

pub fn run_snk(args: SnkArgs) -> Result<Outcome> {
    if args.n > MAX_SNK_N {
        bail!("--n must be at most {MAX_SNK_N}");
    }
    if args.k.is_some_and(|k| k > args.n) {
        bail!("--k must not exceed --n");
    }
    log::info!("{DEPOL_DEFINITION}");
    let ks: Vec<u32> = args.k.map(|k| vec![k]).unwrap_or_else(|| (0..=args.n).collect());
    let opts = args.solver.options();
    let mut outcome = Outcome::Success;
    for k in ks {
        let rep = snk(args.n, k, &opts)?;
        let path = args.cert_dir.join(format!("snk_n{}_k{}.json", args.n, k));
        write_certificate(&path, &rep.certificate)?;
        let ok = audited(&rep.certificate);
        println!(
            "S_{{{},{}}}: mass = {}, local_part = {}, fraction = {}, certified = {ok}",
            args.n,
            k,
            rep.snk.mass(),
            rep.local_mass,
            rep.fraction
        );
        if !ok {
            outcome = outcome.max(Outcome::NotCertified);
        }
    }
    let (at, label) = if args.n <= 2 {
        (Scalar::var(Var::Eps), "symbolic ε".to_string())
    } else {
        (Scalar::frac(1, 10), "ε = 1/10".to_string())
    };
    match snk_expansion_check(args.n, &at) {
        Ok(()) => println!("PASS expansion: Σ_k (4ε)^k (1−4ε)^(n−k) S_{{n,k}} equals the isotropic box ({label})"),
        Err(cell) => {
            println!("FAIL expansion: first differing cell {cell} ({label})");
            outcome = outcome.max(Outcome::ClaimFailure);
        }
    }
    Ok(outcome)
}
