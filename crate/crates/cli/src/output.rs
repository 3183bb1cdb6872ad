use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_traits::ToPrimitive;
use prbox::Rational;

/// Exit status contract: 0 success, 1 claim failure, 2 usage (any `Err`),
/// 3 non-certified result. Variants are ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Success,
    ClaimFailure,
    NotCertified,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ClaimFailure => 1,
            Outcome::NotCertified => 3,
        }
    }
}

/// Collects PASS/FAIL lines for a verification run.
#[derive(Default)]
pub struct Claims {
    failed: usize,
}

impl Claims {
    pub fn check(&mut self, ok: bool, claim: impl AsRef<str>, detail: impl AsRef<str>) {
        let detail = detail.as_ref();
        let sep = if detail.is_empty() { "" } else { ": " };
        if ok {
            println!("PASS {}{sep}{detail}", claim.as_ref());
        } else {
            self.failed += 1;
            println!("FAIL {}{sep}{detail}", claim.as_ref());
        }
    }

    pub fn info(&self, line: impl AsRef<str>) {
        println!("INFO {}", line.as_ref());
    }

    pub fn outcome(&self) -> Outcome {
        if self.failed == 0 {
            Outcome::Success
        } else {
            Outcome::ClaimFailure
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => {
            write_file(p, contents)?;
            log::info!("wrote {}", p.display());
            Ok(())
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Decimal approximation for plot files only.
pub fn approx(r: &Rational) -> String {
    match r.inner().to_f64() {
        Some(x) => format!("{x:.12}"),
        None => "nan".to_string(),
    }
}
