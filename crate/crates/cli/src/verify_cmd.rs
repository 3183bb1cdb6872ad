use anyhow::{bail, Result};
use clap::Subcommand;
use prbox::localpart::{known_decomposition, snk, verify_decomposition, KnownDecomposition, SolveOptions};
use prbox::strategies::games::{
    biased_all_lost_check, min_worst_loss, sample_worst_loss, worst_loss_census, MAX_MASK_ROUNDS,
};
use prbox::strategies::{depol_images, orbit, DEPOL_DEFINITION};
use prbox::{LocalDetStrategy, Rational, Scalar, Var};

use crate::output::{Claims, Outcome};

#[derive(Subcommand)]
pub enum VerifyCmd {
    /// Single isotropic box: eight strategies at ε/2 plus (1−4ε)·PR.
    Eq3,
    /// Single biased box: three strategies at δ plus (1−3δ)·PR.
    Eq5,
    /// Two isotropic boxes: two depolarization orbits with local weight 4ε.
    Lemma3,
    /// S_{2,1} = P_L + P_NL with P_L a 64-image orbit mixture.
    Appendix {
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Round-loss properties of local strategies.
    Lemmas {
        #[arg(long)]
        n: u32,
        /// Random strategy pairs drawn for n ≥ 3.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

pub fn run(cmd: VerifyCmd, seed: u64) -> Result<Outcome> {
    log::info!("{DEPOL_DEFINITION}");
    let mut c = Claims::default();
    match cmd {
        VerifyCmd::Eq3 => decomposition(&mut c, KnownDecomposition::Eq3),
        VerifyCmd::Eq5 => decomposition(&mut c, KnownDecomposition::Eq5),
        VerifyCmd::Lemma3 => {
            decomposition(&mut c, KnownDecomposition::Lemma3);
            orbit_sizes(&mut c);
        }
        VerifyCmd::Appendix { n } => {
            if n != 2 {
                bail!("the P_L construction is defined for --n 2 only");
            }
            appendix(&mut c)?;
        }
        VerifyCmd::Lemmas { n, samples } => lemmas(&mut c, n, samples, seed)?,
    }
    Ok(c.outcome())
}

fn decomposition(c: &mut Claims, name: KnownDecomposition) {
    let d = known_decomposition(name);
    let target = name.target();
    let var = target.variable().unwrap_or(Var::Eps);
    let res = verify_decomposition(&d, &target);
    let detail = match &res {
        Ok(()) => format!(
            "{} strategies with local weight {} plus ({})·(non-local part) reproduce the target (symbolic in {})",
            d.terms.len(),
            d.local_weight(),
            d.remainder_weight,
            var.symbol()
        ),
        Err(e) => e.to_string(),
    };
    c.check(res.is_ok(), format!("{name} decomposition"), detail);
}

fn base(s: &str) -> LocalDetStrategy {
    LocalDetStrategy::parse_binary(s).expect("strategy literal")
}

fn orbit_sizes(c: &mut Claims) {
    for s in ["[0 0 0 1; 0 0 2 0]", "[0 0 0 1; 0 0 0 2]"] {
        let b = base(s);
        let images = depol_images(&b).len();
        let distinct = orbit(&b).len();
        c.check(images == 64, format!("orbit of {s}"), format!("{images} images, {distinct} distinct points"));
    }
}

fn appendix(c: &mut Claims) -> Result<()> {
    decomposition(c, KnownDecomposition::AppendixPl);
    let d = known_decomposition(KnownDecomposition::AppendixPl);
    c.check(
        d.local_weight() == Scalar::one(),
        "P_L has mass 1",
        format!("{} images at weight {}", d.terms.len(), d.terms.first().map(|t| t.0.to_string()).unwrap_or_default()),
    );
    let b = base("[0 0 0 1; 0 0 2 0]");
    let distinct = orbit(&b);
    c.check(
        depol_images(&b).len() == 64,
        "P_L orbit size",
        format!("64 images, {} distinct points", distinct.len()),
    );
    let products = distinct.iter().filter(|s| s.is_product(1)).count();
    c.check(products == 0, "no P_L point is a product of single-box strategies", format!("{products} product points"));
    let rep = snk(2, 1, &SolveOptions::default())?;
    let verified = rep.certificate.verify().is_ok() && rep.certificate.certified;
    c.check(
        verified && rep.fraction == Rational::frac(1, 2),
        "certified local fraction of S_{2,1}",
        format!("{} of mass {} (fraction {})", rep.local_mass, rep.snk.mass(), rep.fraction),
    );
    Ok(())
}

fn lemmas(c: &mut Claims, n: u32, samples: u64, seed: u64) -> Result<()> {
    if n == 0 || n > MAX_MASK_ROUNDS.min(5) {
        bail!("--n must be between 1 and 5");
    }
    let half = n.div_ceil(2);
    if n <= 2 {
        let census = worst_loss_census(n)?;
        let below = census.histogram[..half as usize].iter().sum::<u64>();
        c.check(
            below == 0,
            format!("every strategy loses at least {half} round(s) at some input"),
            format!("exhaustive over {} strategies, worst-loss histogram {:?}", census.strategies, census.histogram),
        );
        c.check(
            census.min_worst() == half,
            format!("a strategy losing at most {half} round(s) at every input exists"),
            format!("witness {}", census.witness),
        );
    } else if n <= 4 {
        let m = min_worst_loss(n, true);
        c.check(
            m.min_worst >= half,
            format!("every strategy loses at least {half} rounds at some input"),
            format!("exhaustive over strategies with g(0) = 0 (output-flip quotient), {} search nodes", m.nodes),
        );
        c.info(format!("least worst-case loss {} attained by {}", m.min_worst, m.witness));
    }
    if n >= 3 {
        let r = sample_worst_loss(n, samples, seed);
        c.check(
            r.violations == 0,
            format!("sampled strategies lose at least {half} rounds at some input"),
            format!("{} samples with seed {:#x}, {} violations, least worst loss {}", r.samples, r.seed, r.violations, r.min_worst),
        );
    }
    if n <= 3 {
        let b = biased_all_lost_check(n);
        c.check(
            b.feasible_never_all_lost == 0,
            format!("every strategy compatible with the biased box loses all {n} rounds at some input"),
            format!("{} compatible strategies, {} exceptions", b.feasible, b.feasible_never_all_lost),
        );
    }
    Ok(())
}
