use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use prbox::boxes::{BoxError, RangeCheck};
use prbox::{BoxTable, Rational, Scalar, Var};

use crate::output::{emit, read_file, Outcome};

#[derive(Subcommand)]
pub enum BoxCmd {
    /// Build a box and write it as JSON.
    Make(MakeArgs),
    /// Check normalization and non-signalling of a box file.
    Check { file: PathBuf },
    /// Tensor product of two box files.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write the cells of a box file as CSV.
    Export {
        file: PathBuf,
        /// Evaluate a symbolic box at this parameter first.
        #[arg(long)]
        at: Option<Rational>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MakeFamily {
    Isotropic,
    Biased,
    Pr,
    Uniform,
}

/// A parametrized box family on the command line.
#[derive(Args, Clone, Debug)]
pub struct ParamArgs {
    /// Isotropic noise ε (exact rational, e.g. 1/8).
    #[arg(long, conflicts_with = "delta")]
    pub eps: Option<Rational>,
    /// Biased noise δ (exact rational).
    #[arg(long)]
    pub delta: Option<Rational>,
    /// Accept parameters outside the default range (with a warning).
    #[arg(long)]
    pub force: bool,
}

impl ParamArgs {
    pub fn check(&self) -> RangeCheck {
        if self.force {
            RangeCheck::Warn
        } else {
            RangeCheck::Enforce
        }
    }

    /// The parameter for `var`, or `None` if not given.
    pub fn value(&self, var: Var) -> Result<Option<Rational>> {
        match (var, &self.eps, &self.delta) {
            (Var::Eps, _, Some(_)) => bail!("--delta belongs to the biased family; use --eps"),
            (Var::Delta, Some(_), _) => bail!("--eps belongs to the isotropic family; use --delta"),
            (Var::Eps, e, None) => Ok(e.clone()),
            (Var::Delta, None, d) => Ok(d.clone()),
        }
    }
}

#[derive(Args)]
pub struct MakeArgs {
    #[arg(long, value_enum)]
    family: MakeFamily,
    #[arg(long)]
    n: u32,
    #[command(flatten)]
    param: ParamArgs,
    /// Output path (stdout if omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

pub fn run(cmd: BoxCmd) -> Result<Outcome> {
    match cmd {
        BoxCmd::Make(args) => make(args),
        BoxCmd::Check { file } => check(&file),
        BoxCmd::Tensor { left, right, out } => {
            let b = load(&left)?.tensor(&load(&right)?);
            emit(out.as_deref(), &b.to_json_string())?;
            Ok(Outcome::Success)
        }
        BoxCmd::Export { file, at, out } => {
            let mut b = load(&file)?;
            if let Some(x) = at {
                b = b.evaluate(&x);
            }
            emit(out.as_deref(), &to_csv(&b))?;
            Ok(Outcome::Success)
        }
    }
}

/// Rejects out-of-range parameters with a usage error unless `--force`.
pub fn range_error(e: BoxError) -> anyhow::Error {
    match e {
        BoxError::ParamOutOfRange { .. } => anyhow::anyhow!("{e}; pass --force to build it anyway"),
        e => e.into(),
    }
}

fn make(args: MakeArgs) -> Result<Outcome> {
    const MAX_MAKE_N: u32 = 6;
    if args.n > MAX_MAKE_N {
        bail!("--n {} is too large for a dense table (at most {MAX_MAKE_N})", args.n);
    }
    let check = args.param.check();
    let param = |var: Var| -> Result<Scalar> {
        Ok(args.param.value(var)?.map(Scalar::from).unwrap_or_else(|| Scalar::var(var)))
    };
    let b = match args.family {
        MakeFamily::Isotropic => BoxTable::isotropic_with(args.n, &param(Var::Eps)?, check).map_err(range_error)?,
        MakeFamily::Biased => BoxTable::biased_with(args.n, &param(Var::Delta)?, check).map_err(range_error)?,
        MakeFamily::Pr => BoxTable::pr(args.n),
        MakeFamily::Uniform => BoxTable::uniform(args.n),
    };
    let ok = b.check_normalization().is_ok() && b.is_nonsignalling();
    log::info!("self-check: {}", if ok { "normalized and non-signalling" } else { "FAILED" });
    emit(args.out.as_deref(), &b.to_json_string())?;
    Ok(if ok { Outcome::Success } else { Outcome::ClaimFailure })
}

pub fn load(path: &Path) -> Result<BoxTable> {
    let text = read_file(path)?;
    BoxTable::from_json_str(&text).with_context(|| format!("loading {}", path.display()))
}

fn check(path: &Path) -> Result<Outcome> {
    let text = read_file(path)?;
    let b = match BoxTable::from_json_str(&text) {
        Ok(b) => b,
        Err(BoxError::Json(msg)) => bail!("{}: {msg}", path.display()),
        Err(e) => {
            println!("FAIL normalization: {e}");
            return Ok(Outcome::ClaimFailure);
        }
    };
    println!("PASS normalization: every input pair has mass {}", b.mass());
    match b.signalling_violation() {
        None => {
            println!("PASS non-signalling");
            Ok(Outcome::Success)
        }
        Some(v) => {
            println!("FAIL non-signalling: {v}");
            Ok(Outcome::ClaimFailure)
        }
    }
}

fn to_csv(b: &BoxTable) -> String {
    let d = b.dims();
    let mut out = String::from("x,y,u,v,p\n");
    for (idx, value) in b.table().iter().enumerate() {
        let (x, y, u, v) = d.cell_coords(idx);
        out.push_str(&format!("{x},{y},{u},{v},{value}\n"));
    }
    out.pop();
    out
}
