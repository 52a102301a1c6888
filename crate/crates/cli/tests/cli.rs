use std::path::PathBuf;
use std::process::{Command, Output};

use bimodal_cli::{CompareJson, FitJson};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bimodal")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fit_is_byte_identical_without_meta() {
    let data = fixture("aarset.csv");
    let args = ["fit", "--model", "bun-sym", "--input", &data, "--seed", "7", "--no-meta"];
    let (a, b) = (bin(&args), bin(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let json: FitJson = serde_json::from_slice(&a.stdout).unwrap();
    assert!(json.meta.is_none());
    assert_eq!(json.n, 50);
    assert_eq!(json.seed, 7);
    assert_eq!(json.estimates.keys().collect::<Vec<_>>(), ["mu", "sigma", "k"]);
    // The summary table goes to stderr when the JSON owns stdout.
    assert!(String::from_utf8_lossy(&a.stderr).contains("bun-sym"));
}

#[test]
fn fit_json_round_trips_exactly() {
    let data = fixture("ais_lbm_female.csv");
    let o = bin(&["fit", "--model", "bul", "--input", &data]);
    assert!(o.status.success());
    let text = stdout(&o);
    let json: FitJson = serde_json::from_str(&text).unwrap();
    assert!(json.meta.is_some());
    assert_eq!(bimodal_cli::to_json(&json), text);
    let back: FitJson = serde_json::from_str(&bimodal_cli::to_json(&json)).unwrap();
    assert_eq!(back, json);
}

#[test]
fn output_file_and_table() {
    let dir = std::env::temp_dir().join(format!("bimodal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("cmp.json");
    let data = fixture("aarset.csv");
    let o = bin(&["compare", "--model", "bun-sym,bul-sym", "--input", &data, "--output", out.to_str().unwrap(), "--no-meta"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("model"));
    let c: CompareJson = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c.ranked.len(), 2);
    assert!(c.ranked[0].aic <= c.ranked[1].aic);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--model", "bun", "--params", "mu=0,sigma=1,k=2,a=0", "--n", "5", "--seed", "1"];
    let (a, b) = (bin(&args), bin(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<f64> = stdout(&a).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(lines.len(), 5);
    let other = bin(&["sample", "--model", "bun", "--params", "mu=0,sigma=1,k=2,a=0", "--n", "5", "--seed", "2"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn pdf_table_riemann_sum() {
    let o = bin(&["pdf", "--model", "bul", "--params", "mu=0,sigma=1,k=1,a=0", "--grid", "-6,6,101"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,pdf,cdf"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    let dx = 12.0 / 100.0;
    let riemann: f64 = rows.iter().map(|r| r[1]).sum::<f64>() * dx;
    let inside = rows[100][2] - rows[0][2];
    assert!((riemann - inside).abs() < 5e-3, "{riemann} vs {inside}");
}

#[test]
fn ks_and_construct() {
    let data = fixture("aarset.csv");
    let o = bin(&["ks", "--model", "bun-sym", "--params", "mu=42.68,sigma=12.7632,k=2.3325", "--input", &data]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("D,pvalue\n"));
    let o = bin(&["construct", "--family", "skew-bimodal-normal", "--params", "k=1.5,lambda=2", "--grid", "-5,5,11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn exit_codes() {
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(bin(&["fit", "--model", "nope", "--input", "x.csv"])), 2);
    assert_eq!(code(bin(&["pdf", "--model", "bun", "--params", "mu=0", "--grid", "0,1,3"])), 2);
    assert_eq!(code(bin(&["pdf", "--model", "bun", "--params", "mu=0,sigma=1,k=1,a=0", "--grid", "0,1,1"])), 2);
    assert_eq!(code(bin(&["fit", "--model", "bun", "--input", "/nonexistent/file.csv"])), 3);

    let dir = std::env::temp_dir().join(format!("bimodal-codes-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "x\n1\nabc\n").unwrap();
    let o = bin(&["fit", "--model", "bun", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[ingest]:") && err.contains("row 3"), "{err}");

    let tiny = dir.join("tiny.csv");
    std::fs::write(&tiny, "1.0\n2.0\n3.0\n").unwrap();
    let o = bin(&["fit", "--model", "bun", "--input", tiny.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[fit]:"));
    std::fs::remove_dir_all(&dir).unwrap();
}
