use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use prbox::lp::Certificate;
use prbox::{BoxTable, Rational};

fn prbox(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prbox"))
        .args(args)
        .arg("-q")
        .current_dir(dir)
        .env_remove("PRBOX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn make_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(dir.path(), &["box", "make", "--family", "isotropic", "--n", "2", "--eps", "1/8", "-o", "b.json"]);
    assert_eq!(code(&o), 0);
    let b = BoxTable::from_json_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(b.dims().rounds(), Some(2));
    let o = prbox(dir.path(), &["box", "check", "b.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("PASS non-signalling"));
}

#[test]
fn signalling_box_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    prbox(dir.path(), &["box", "make", "--family", "isotropic", "--n", "1", "--eps", "1/8", "-o", "b.json"]);
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    // Swap P(0,0|0,0) with P(0,1|0,0): normalization survives, Bob's marginal at u=0 changes.
    let t = &mut json["table"];
    let a = t[0][0][0][0].clone();
    t[0][0][0][0] = t[0][1][0][0].clone();
    t[0][1][0][0] = a;
    fs::write(dir.path().join("bad.json"), json.to_string()).unwrap();
    let o = prbox(dir.path(), &["box", "check", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL non-signalling: Bob's marginal"));
}

#[test]
fn range_policy() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["box", "make", "--family", "biased", "--n", "1", "--delta", "1/2", "-o", "b.json"];
    assert_eq!(code(&prbox(dir.path(), &args)), 2);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&prbox(dir.path(), &forced)), 0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&prbox(dir.path(), &["box", "make", "--family", "isotropic", "--n", "1", "--eps", "x"])), 2);
    assert_eq!(code(&prbox(dir.path(), &["box", "check", "missing.json"])), 2);
    assert_eq!(code(&prbox(dir.path(), &["localpart", "solve", "--family", "isotropic", "--n", "1"])), 2);
    let o = prbox(
        dir.path(),
        &["localpart", "solve", "--family", "isotropic", "--n", "2", "--eps", "1/8", "--mode", "full", "--budget", "1000"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_writes_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(dir.path(), &["localpart", "solve", "--family", "isotropic", "--n", "2", "--eps", "1/8"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("local_part = 1/2\n"));
    let cert = Certificate::from_json_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert!(cert.verify().is_ok());
    assert_eq!(cert.objective, Rational::frac(1, 2));
}

#[test]
fn solve_biased_two_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(
        dir.path(),
        &["localpart", "solve", "--family", "biased", "--n", "2", "--delta", "1/10", "--cert", "c/b.json"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("local_part = 9/100\n"));
    assert!(dir.path().join("c/b.json").exists());
}

#[test]
fn solve_from_a_box_file() {
    let dir = tempfile::tempdir().unwrap();
    prbox(dir.path(), &["box", "make", "--family", "pr", "--n", "1", "-o", "pr.json"]);
    let o = prbox(dir.path(), &["localpart", "solve", "--box", "pr.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("local_part = 0\n"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["localpart", "solve", "--family", "biased", "--n", "2", "--delta", "1/5"];
    let mut one = base.to_vec();
    one.extend(["--threads", "1", "--cert", "one.json"]);
    let mut two = base.to_vec();
    two.extend(["--threads", "2", "--cert", "two.json"]);
    assert_eq!(code(&prbox(dir.path(), &one)), 0);
    assert_eq!(code(&prbox(dir.path(), &two)), 0);
    let read = |f: &str| fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("one.json"), read("two.json"));
}

#[test]
fn bounds_are_symbolic_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(dir.path(), &["localpart", "bounds", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("lower (half the rounds) = 24·ε^2 - 24·ε^3"));
    assert!(s.contains("pairing = 16·ε^2"));
    assert!(s.contains("upper = 192·ε^2 - 128·ε^3"));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "eq3"],
        vec!["verify", "eq5"],
        vec!["verify", "lemma3"],
        vec!["verify", "appendix", "--n", "2"],
        vec!["verify", "lemmas", "--n", "2"],
        vec!["verify", "lemmas", "--n", "3", "--samples", "1000"],
    ] {
        let o = prbox(dir.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
        let s = stdout(&o);
        assert!(s.lines().all(|l| l.starts_with("PASS") || l.starts_with("INFO")), "{s}");
    }
    assert_eq!(code(&prbox(dir.path(), &["verify", "appendix", "--n", "3"])), 2);
}

#[test]
fn lemmas_report_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout(&prbox(dir.path(), &["verify", "lemmas", "--n", "2"]));
    assert!(s.contains("exhaustive over 65536 strategies"));
    assert!(s.contains("PASS a strategy losing at most 1 round(s) at every input exists"));
}

#[test]
fn snk_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(dir.path(), &["snk", "--n", "2", "--cert-dir", "certs"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("S_{2,1}: mass = 2, local_part = 1, fraction = 1/2, certified = true"));
    assert!(s.contains("PASS expansion"));
    for k in 0..=2 {
        assert!(dir.path().join(format!("certs/snk_n2_k{k}.json")).exists());
    }
}

#[test]
fn sweep_writes_csv_and_pieces() {
    let dir = tempfile::tempdir().unwrap();
    let o = prbox(
        dir.path(),
        &["localpart", "sweep", "--family", "isotropic", "--n", "1", "--grid", "1/16", "--out-dir", "out"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("piece 0: [0, 1/4] 4·ε"));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,local_part,piece_id,certificate_file,certified,refined"));
    assert_eq!(lines.nth(1), Some("1/16,1/4,0,certificates/point_001.json,true,false"));
    assert_eq!(csv.lines().count(), 6);
    let plot = fs::read_to_string(dir.path().join("out/plot.csv")).unwrap();
    assert!(plot.starts_with("eps,local_part,lower,pairing,upper,local_part_approx\n"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/pieces.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "prbox/sweep/v1");
    assert_eq!(report["pieces"][0]["polynomial"], "4·ε");
    assert!(dir.path().join("out/certificates/point_004.json").exists());
}
