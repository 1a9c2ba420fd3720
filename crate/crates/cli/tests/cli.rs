use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], record_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-sieve"))
        .arg("--record-dir")
        .arg(record_dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn r_formula_worked_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["r-formula", "--deg", "1", "--s", "1", "--dim", "3", "--tau", "0.5", "--omega", "4", "--T", "1", "--logM0", "1"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "r = 104");
    let rec: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("no-scenario.r-formula.json")).unwrap()).unwrap();
    assert_eq!(rec["command"], "r-formula");
    assert_eq!(rec["outputs"]["r"], 104);
    assert_eq!(rec["inputs"]["omega"], 4);
    assert!(rec["scenario"].is_null());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sl2 = scenario("sl2-free.toml");
    let sl2 = sl2.to_str().unwrap();
    assert_eq!(code(&run(&["ball", "--L", "2"], dir.path())), 2, "missing scenario");
    assert_eq!(code(&run(&["no-such-command"], dir.path())), 2);
    assert_eq!(code(&run(&["--scenario", sl2, "local-density", "--p", "4"], dir.path())), 2);
    assert_eq!(code(&run(&["--scenario", "/nonexistent.toml", "ball"], dir.path())), 2);
    let big = run(&["--scenario", sl2, "brun-bound", "--L", "3", "--z", "400", "--b", "9"], dir.path());
    assert_eq!(code(&big), 3, "{}", String::from_utf8_lossy(&big.stderr));
    assert!(String::from_utf8_lossy(&big.stderr).contains("budget"));
    // r = 1 - tau = 0 is rejected as invalid input.
    let bad = run(
        &["r-formula", "--deg", "1", "--s", "1", "--dim", "3", "--tau", "1", "--omega", "4", "--T", "1", "--logM0", "1"],
        dir.path(),
    );
    assert_eq!(code(&bad), 2);
}

#[test]
fn strict_schema() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(scenario("sl2-free.toml")).unwrap();

    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, base.replace("r_max = 8", "r_max = 8\nrmax = 9")).unwrap();
    let o = run(&["--scenario", unknown.to_str().unwrap(), "ball"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rmax"));

    let float = dir.path().join("float.toml");
    std::fs::write(&float, base.replace("[[1, 2], [0, 1]]", "[[1, 2.0], [0, 1]]")).unwrap();
    assert_eq!(code(&run(&["--scenario", float.to_str().unwrap(), "ball"], dir.path())), 2);

    let not_sl = dir.path().join("notsl.toml");
    std::fs::write(&not_sl, base.replace("[[1, 2], [0, 1]]", "[[2, 0], [0, 1]]")).unwrap();
    assert_eq!(code(&run(&["--scenario", not_sl.to_str().unwrap(), "ball"], dir.path())), 2);
}

#[test]
fn beta_table_matches_sl2_count() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("beta.tsv");
    let sc = scenario("sl2-free.toml");
    let o = run(
        &["--scenario", sc.to_str().unwrap(), "--tsv", tsv.to_str().unwrap(), "beta-table", "--pmax", "13"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&tsv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p\tn_f\torder\tbeta\tramified"));
    let mut seen = 0;
    for line in lines {
        let cols: Vec<&str> = line.split('\t').collect();
        let p: u64 = cols[0].parse().unwrap();
        if p == 2 {
            assert_eq!(cols[3], "0");
            assert_eq!(cols[4], "true");
            continue;
        }
        let den = p * p - 1;
        let g = gcd(p, den);
        let expected = format!("{}/{}", p / g, den / g);
        assert_eq!(cols[3], expected, "p = {p}");
        let order: u64 = cols[2].parse().unwrap();
        assert_eq!(order, p * (p * p - 1));
        seen += 1;
    }
    assert_eq!(seen, 5);
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn records_replay_byte_identical() {
    let cases: &[(&str, &[&str])] = &[
        ("sl2-free.toml", &["ball", "--L", "3"]),
        ("sl2-free.toml", &["orbit", "--L", "3"]),
        ("sl2-free.toml", &["local-density", "--p", "7"]),
        ("sl2-free.toml", &["beta-table", "--pmax", "11"]),
        ("sl2-free.toml", &["strong-approx", "--q", "15"]),
        ("sl2-free.toml", &["ramified"]),
        ("sl2-free.toml", &["variety-count", "--p", "11"]),
        ("sl2-quadratic.toml", &["splitting-census", "--pmax", "30"]),
        ("sl2-free.toml", &["sequence", "--L", "4"]),
        ("sl2-free.toml", &["decompose", "--L", "4", "--D", "15"]),
        ("sl2-free.toml", &["level-report", "--L", "4", "--D", "15"]),
        ("sl2-free.toml", &["sieve-dim", "--z", "100"]),
        ("sl2-free.toml", &["brun-bound", "--L", "4"]),
        ("sl2-free.toml", &["census", "--L", "4"]),
        ("sl2-free.toml", &["saturate", "--Lmax", "5"]),
        ("sl2-free.toml", &["value-bound", "--L", "4"]),
        ("heisenberg.toml", &["uni-sieve", "--points", "20"]),
        ("torus-diag.toml", &["torus-heuristic", "--M", "12"]),
    ];
    for (file, args) in cases {
        let sc = scenario(file);
        let mut payloads = Vec::new();
        for threads in ["1", "4"] {
            let dir = tempfile::tempdir().unwrap();
            let mut full = vec!["--scenario", sc.to_str().unwrap(), "--threads", threads];
            full.extend_from_slice(args);
            let o = run(&full, dir.path());
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            let name = file.trim_end_matches(".toml");
            let rec = std::fs::read(dir.path().join(format!("{name}.{}.json", args[0]))).unwrap();
            payloads.push(rec);
        }
        assert_eq!(payloads[0], payloads[1], "{args:?} differs between runs");
        let v: serde_json::Value = serde_json::from_slice(&payloads[0]).unwrap();
        assert_eq!(v["scenario"]["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn json_flag_prints_record() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("cyclic-unipotent.toml");
    let o = run(&["--scenario", sc.to_str().unwrap(), "--json", "--no-record", "sequence", "--L", "3"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "sequence");
    // u^k for |k| <= 3, and f = k + 3 vanishes once.
    assert_eq!(v["outputs"]["sequence"]["x"], 6);
    assert_eq!(v["outputs"]["sequence"]["skipped"], 1);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}
