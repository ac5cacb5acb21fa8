use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_modgraph");

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("modgraph-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    p
}

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match cache {
        Some(c) => cmd.env("MODGRAPH_CACHE", c),
        None => cmd.env_remove("MODGRAPH_CACHE"),
    };
    cmd.output().unwrap()
}

fn read_dir(p: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = fs::read_dir(p)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read_to_string(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn homology_report_for_com_bar_genus_two() {
    let out = scratch("hom");
    let o = run(&["homology", "--family", "com-bar", "--twist", "0", "--genus", "2", "--cutoff", "4", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("homology.txt")).unwrap();
    assert!(text.contains("betti: "));
    assert!(text.contains("euler: "));
    assert!(text.contains("hat_betti: 1"));
    let c = modgraph::complexes::build_complex(&modgraph::complexes::ComplexSpec::comm(modgraph::graphs::CommFamily::Bar, 0, 2, 4)).unwrap();
    let r = modgraph::linalg::betti(&c.chain_data());
    assert!(text.contains(&format!("betti: {}\n", r.betti.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "))));
}

#[test]
fn amplitude_reports_the_two_witness() {
    let out = scratch("amp");
    let o = run(
        &["amplitude", "--family", "ass-underline", "--twist", "1", "--gamma", "2", "--nu", "1", "--algebra", &fixture("k1.alg"), "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("obstructions.txt")).unwrap();
    assert!(text.contains("cocycle: false"));
    let values: Vec<&str> = text.lines().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert!(!values.is_empty());
    assert!(values.iter().any(|v| *v == "2" || *v == "-2"));
    assert!(out.join("cochain.txt").exists());
}

#[test]
fn golden_surface_amplitude_on_stable_graphs_is_a_cocycle() {
    let out = scratch("amp-kass");
    let o = run(
        &["amplitude", "--family", "kass", "--twist", "1", "--gamma", "1", "--nu", "2", "--cutoff", "5", "--algebra", &fixture("k1.alg"), "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(out.join("obstructions.txt")).unwrap().contains("cocycle: true"));
}

#[test]
fn validate_k0_passes_everything() {
    let out = scratch("val");
    let o = run(&["validate-algebra", "--algebra", &fixture("k0.alg"), "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("validation.txt")).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("rel1\tpass") && text.contains("rel2\tpass"));
    let o = run(&["validate-algebra", "--algebra", &fixture("k1.alg"), "--out", out.to_str().unwrap()], None);
    let text = fs::read_to_string(out.join("validation.txt")).unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(text.contains("rel2\tFAIL\ta\t-2 0"));
}

#[test]
fn outputs_are_deterministic_and_cache_transparent() {
    let cache = scratch("cache");
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for o in [&a, &b] {
        let args = ["complex", "--family", "ass-bar", "--twist", "1", "--gamma", "1", "--nu", "2", "--cutoff", "4", "--out", o.to_str().unwrap()];
        assert_eq!(run(&args, None).status.code(), Some(0));
    }
    assert_eq!(read_dir(&a), read_dir(&b));

    let hom = |o: &Path, cache: Option<&Path>, extra: &[&str]| {
        let mut v = vec!["homology", "--family", "com-bar", "--genus", "3", "--out", o.to_str().unwrap()];
        v.extend_from_slice(extra);
        let r = run(&v, cache);
        assert_eq!(r.status.code(), Some(0));
        fs::read_to_string(o.join("homology.txt")).unwrap()
    };
    let cold = hom(&scratch("h1"), None, &["--no-cache"]);
    let first = hom(&scratch("h2"), Some(&cache), &[]);
    assert!(fs::read_dir(&cache).unwrap().count() > 0);
    let warm = hom(&scratch("h3"), Some(&cache), &[]);
    let threaded = hom(&scratch("h4"), None, &["--threads", "3", "--primes", "1000003,998244353"]);
    assert_eq!(cold, first);
    assert_eq!(cold, warm);
    assert_eq!(cold, threaded);
}

#[test]
fn invalid_input_exits_with_one_line() {
    for args in [
        vec!["homology", "--family", "nope", "--genus", "2"],
        vec!["homology", "--family", "com-bar", "--genus", "1"],
        vec!["homology", "--family", "com-bar"],
        vec!["homology", "--family", "com-bar", "--genus", "2", "--gamma", "1"],
        vec!["amplitude", "--family", "com-bar", "--genus", "2", "--algebra", "x.alg"],
        vec!["amplitude", "--family", "ass-bar", "--gamma", "1", "--nu", "1"],
        vec!["validate-algebra", "--algebra", "/nonexistent/file.alg"],
        vec!["homology", "--family", "com-bar", "--genus", "2", "--primes", "15"],
        vec!["homology", "--family", "com-bar", "--genus", "2", "--threads", "0"],
        vec!["bogus-command"],
    ] {
        let out = scratch("bad");
        let mut a = args.clone();
        let o_str = out.to_str().unwrap().to_string();
        a.extend(["--out", &o_str]);
        let o = run(&a, None);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error\tinvalid-input\t"), "{err}");
        assert!(!out.exists(), "artifacts left behind for {args:?}");
    }
}

#[test]
fn twist_mismatch_between_algebra_and_complex_is_invalid() {
    let out = scratch("mismatch");
    let o = run(
        &["amplitude", "--family", "ass-bar", "--twist", "0", "--gamma", "1", "--nu", "1", "--algebra", &fixture("k1.alg"), "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn enumerate_lists_graphs() {
    let out = scratch("enum");
    let o = run(&["enumerate", "--family", "dft", "--genus", "0", "--legs", "3", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("graphs.txt")).unwrap();
    assert!(text.starts_with("# dft"));
    assert!(text.lines().count() > 1);
}

#[test]
fn bv_check_and_selftest_pass() {
    let out = scratch("suite");
    let o = run(&["bv-check", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(!fs::read_to_string(out.join("bv_check.txt")).unwrap().contains("FAIL"));
    let o = run(&["selftest", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!fs::read_to_string(out.join("selftest.txt")).unwrap().contains("FAIL"));
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["--help"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("homology"));
}

#[test]
fn primality_check() {
    use modgraph::cli::is_prime;
    let brute = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    for n in 0..2000 {
        assert_eq!(is_prime(n), brute(n), "{n}");
    }
    for &p in &modgraph::linalg::DEFAULT_PRIMES {
        assert!(is_prime(p));
    }
    // Carmichael number and a strong pseudoprime to bases 2, 3, 5, 7
    assert!(!is_prime(561));
    assert!(!is_prime(3_215_031_751));
}

#[test]
fn internal_errors_map_to_exit_two() {
    use modgraph::cli::{error_line, exit_code, EXIT_INTERNAL};
    let e = modgraph::Error::Internal("d^2 != 0\nat degree 3".into());
    assert_eq!(exit_code(&e), EXIT_INTERNAL);
    assert_eq!(error_line(&e), "error\tinternal\td^2 != 0 at degree 3");
}

#[test]
fn artifacts_are_written_all_or_nothing() {
    let dir = scratch("atomic");
    let files = vec![("a.txt".to_string(), "one\n".to_string()), ("b.txt".to_string(), "two\n".to_string())];
    modgraph::cli::write_artifacts(&dir, &files).unwrap();
    assert_eq!(read_dir(&dir), files);
    // a name that cannot be created leaves the directory untouched
    let bad = vec![("c.txt".to_string(), "x".to_string()), ("missing/d.txt".to_string(), "y".to_string())];
    assert!(modgraph::cli::write_artifacts(&dir, &bad).is_err());
    assert_eq!(read_dir(&dir), files);
}
