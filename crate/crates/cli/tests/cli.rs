use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squaremodel")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

#[test]
fn sample_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sample", "--n", "4", "--d", "0.1", "--seed", "5", "--out", "p.pres"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("p.pres")).unwrap();
    assert!(text.starts_with("square-model v1\nmodel=positive n=4 d=0.1 seed=5\n"));

    let o = run(&["analyze", "--in", "p.pres"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for prefix in ["trivial: ", "free: ", "hypergraphs: ", "abelianization: "] {
        assert!(out.lines().any(|l| l.starts_with(prefix)), "{out}");
    }

    let o = run(&["analyze", "--in", "p.pres", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 4);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_known_presentation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("z4.pres"), "square-model v1\nmodel=positive n=2 d=0.5 seed=0\n1 1 1 1\n1 1 1 2\n1 2 2 1\n2 1 2 2\n")
        .unwrap();
    let out = stdout(&run(&["analyze", "--in", "z4.pres"], dir.path()));
    assert!(out.contains("trivial: certified"));
    assert!(out.contains("abelianization: Z/4"));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("grid.toml"), "model = \"positive\"\nn = [2]\nd = [0.9]\ntrials = 1\nseed = 1\n").unwrap();
    let o = run(&["sweep", "--config", "grid.toml", "--out", "out.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,d,model,trials,seed,num_relators,trivial_rate,free_rate,mean_certified_rank,embedded_tree_rate,leafless_rate,positive_fraction_rate"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..6], ["2", "0.9", "positive", "1", "1", "12"]);
    assert_eq!(row[11], "");

    let again = run(&["sweep", "--config", "grid.toml", "--out", "-"], dir.path());
    assert_eq!(stdout(&again), csv);
}

#[test]
fn graphsim_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["graphsim", "--mode", "connectivity", "--n", "50", "--delta", "0.9", "--trials", "10", "--seed", "3"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "50,0.9,10,1");
}

#[test]
fn diagram_commands() {
    let dir = tempfile::tempdir().unwrap();
    let c = format!("{FIXTURES}/c.diag");
    let out = stdout(&run(&["diagram", "--check", &c], dir.path()));
    assert!(out.contains("valid: yes"));
    assert!(out.contains("parity_defects: 2"));

    let a = format!("{FIXTURES}/a.diag");
    let out = stdout(&run(&["diagram", "--bound", &a, "--n", "4", "--d", "0.2"], dir.path()));
    let exponent: f64 = out.split_whitespace().next().unwrap().strip_prefix("exponent=").unwrap().parse().unwrap();
    assert!((exponent + 0.2).abs() < 1e-12, "{out}");
    assert!(out.contains("vacuous=false"));

    fs::write(dir.path().join("face.diag"), "l=4\nface 0 +1 +2 +3 +4\n").unwrap();
    fs::write(dir.path().join("r.pres"), "square-model v1\nmodel=square n=3 d=0.1 seed=0\n1 -2 3 2\n").unwrap();
    let out = stdout(&run(&["diagram", "--fulfill", "face.diag", "--presentation", "r.pres"], dir.path()));
    assert_eq!(out, "fulfillments: 1\n0=1 -2 3 2\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&[], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(run(&["analyze", "--in", "missing.pres"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["diagram", "--fulfill", "x.diag"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("bad.toml"), "model = \"positive\"\nn = [2]\nd = [0.9]\ntrials = 0\nseed = 1\n").unwrap();
    assert_eq!(run(&["sweep", "--config", "bad.toml", "--out", "o.csv"], dir.path()).status.code(), Some(1));
}
