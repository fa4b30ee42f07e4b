use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn fbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbh"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn data_rows(bytes: &[u8]) -> Vec<csv::StringRecord> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(bytes);
    reader.records().map(|r| r.unwrap()).collect()
}

#[test]
fn kernel_origin_value() {
    let out = fbh(&["kernel"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# fbh "));
    assert!(text.lines().any(|l| l == "# command: kernel"));
    let rows = data_rows(text.as_bytes());
    let value: f64 = rows[0][5].parse().unwrap();
    assert!((value - 1.0 / (PI * PI)).abs() < 1e-15);
    assert_eq!(&rows[0][9], "");
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let out_s = out.to_str().unwrap();
    for (i, text) in [
        "[kernel\nalpha = 0",
        "[kernel]\nalpha = -2.0\n",
        "[norms]\nunknown = 1\n",
    ]
    .into_iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), text);
        let r = fbh(&["kernel", "--config", &cfg, "--out", out_s]);
        assert_eq!(r.status.code(), Some(2), "{text}");
        assert!(!out.exists());
    }
    let r = fbh(&[
        "kernel",
        "--config",
        "/nonexistent/run.toml",
        "--out",
        out_s,
    ]);
    assert_eq!(r.status.code(), Some(2));
    let r = fbh(&["lp-sweep", "--seed", "3", "--out", out_s]);
    assert_eq!(r.status.code(), Some(2));
    let r = fbh(&["kernel", "--format", "xml", "--out", out_s]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn tolerance_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tight.toml",
        "[norms]\nmus = [1.0]\nalphas = [0.0]\nmax_degree = 1\nmax_abs_z = 1e-9\ntensor = false\n",
    );
    let r = fbh(&["norms", "--config", &cfg, "--samples", "5000"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!r.stdout.is_empty());
}

#[test]
fn nonconvergence_exits_3_and_names_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nc.toml",
        "[kernel]\nmax_terms = 3\npairs = [{ x = [[0.0, 0.0]], y = [[0.9, 0.0]], s = [[0.0, 0.0]], t = [[0.9, 0.0]] }]\n",
    );
    let r = fbh(&["kernel", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8(r.stderr).unwrap().contains("pair 0"));
}

#[test]
fn flags_override_config_and_header_records_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[norms]\nmus = [1.0]\nalphas = [0.0]\nmax_degree = 1\nseed = 5\nsamples = 1000\n",
    );
    let r = fbh(&[
        "norms",
        "--config",
        &cfg,
        "--seed",
        "9",
        "--samples",
        "4000",
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.lines().any(|l| l == "# seed: 9"));
    assert!(text.lines().any(|l| l == "# samples = 4000"));
    let rows = data_rows(text.as_bytes());
    assert_eq!(rows.len(), 4);
    let closed: f64 = rows[0][5].parse().unwrap();
    assert!((closed - PI * PI).abs() < 1e-13);
}

#[test]
fn lp_sweep_csv_parses_with_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        "[lp-sweep]\nps = [1.0, 2.0]\ncenters = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]\n\
         domain_quadrature_max_center = 0.0\nfock_quadrature_max_center = 2.0\n",
    );
    let r = fbh(&["lp-sweep", "--config", &cfg]);
    assert!(r.status.success());
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(&r.stdout[..]);
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "kind");
    assert_eq!(&headers[13], "verdict");
    let rows: Vec<csv::StringRecord> = reader.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 14);
    let verdicts: Vec<(&str, &str)> = rows
        .iter()
        .filter(|r| &r[0] == "summary")
        .map(|r| (&r[1], &r[13]))
        .collect();
    assert_eq!(
        verdicts,
        vec![("1.0", "BLOWUP"), ("2.0", "BOUNDED-CONTROL")]
    );
}

#[test]
fn jsonl_output() {
    let r = fbh(&["kernel", "--oracle", "--format", "jsonl"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["meta"]["command"], "kernel");
    assert_eq!(lines[0]["meta"]["config"]["oracle"], true);
    assert_eq!(lines.len(), 4);
    assert!(lines[1..]
        .iter()
        .all(|row| row["rel_diff"].as_f64().unwrap() < 1e-8));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.toml",
        "[norms]\nmus = [0.5]\nalphas = [2.5]\nmax_degree = 1\n",
    );
    let a = fbh(&[
        "norms",
        "--config",
        &cfg,
        "--samples",
        "10000",
        "--seed",
        "1",
    ]);
    let b = fbh(&[
        "norms",
        "--config",
        &cfg,
        "--samples",
        "10000",
        "--seed",
        "1",
    ]);
    let c = fbh(&[
        "norms",
        "--config",
        &cfg,
        "--samples",
        "10000",
        "--seed",
        "2",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
