//! End-to-end tests of the `sslab` binary.

use sslab_cli::RunManifest;
use std::path::Path;
use std::process::{Command, Output};

fn sslab(cache: &Path, cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sslab"))
        .args(args)
        .env("SSLAB_CACHE_DIR", cache)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn manifest_of(out: &Output) -> RunManifest {
    RunManifest::from_json(&String::from_utf8_lossy(&out.stdout)).expect("stdout is a manifest")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn coeffs_miss_then_hit_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let cache = d.path().join("cache");
    let a = sslab(&cache, d.path(), &["coeffs", "--weight", "12", "--n", "2000", "--out", "a.csv"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(manifest_of(&a).parameters["cache weight12_N2000"], serde_json::json!("Miss"));
    let b = sslab(&cache, d.path(), &["coeffs", "--weight", "12", "--n", "2000", "--out", "b.csv"]);
    assert_eq!(code(&b), 0);
    let m = manifest_of(&b);
    assert_eq!(m.parameters["cache weight12_N2000"], serde_json::json!("Hit"));
    assert!(m.all_passed() && m.outputs == vec!["b.csv".to_string()]);
    let ba = std::fs::read(d.path().join("a.csv")).unwrap();
    assert_eq!(ba, std::fs::read(d.path().join("b.csv")).unwrap());
    assert_eq!(ba, std::fs::read(cache.join("coeffs/weight12_N2000.csv")).unwrap());
    assert!(String::from_utf8_lossy(&ba).starts_with("# weight=12 N=2000\nn,a_n\n1,1\n2,-24\n"));
}

#[test]
fn corrupt_cache_regenerates_with_warning() {
    let d = tempfile::tempdir().unwrap();
    let cache = d.path().join("cache");
    assert_eq!(code(&sslab(&cache, d.path(), &["coeffs", "--n", "500"])), 0);
    let p = cache.join("coeffs/weight12_N500.csv");
    let good = std::fs::read_to_string(&p).unwrap();
    for bad in [good[..good.len() / 3].to_string(), good.replace("\n2,-24\n", "\n2,-25\n")] {
        std::fs::write(&p, bad).unwrap();
        let out = sslab(&cache, d.path(), &["coeffs", "--n", "500"]);
        assert_eq!(code(&out), 0);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("corrupt") && stderr.contains("regenerating"), "{stderr}");
        let status = &manifest_of(&out).parameters["cache weight12_N500"];
        assert!(status.get("Regenerated").is_some(), "{status}");
        assert_eq!(std::fs::read_to_string(&p).unwrap(), good);
    }
}

#[test]
fn manifest_round_trips_losslessly() {
    let d = tempfile::tempdir().unwrap();
    let out = sslab(d.path(), d.path(), &["--manifest", "m.json", "--quiet", "specfun", "bridge"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(d.path().join("m.json")).unwrap();
    let m = RunManifest::from_json(&text).unwrap();
    assert_eq!(m.command, "specfun");
    assert!(m.wall_time > 0.0 && m.tolerance_results.len() == 1 && m.tolerance_results[0].passed);
    assert_eq!(m.to_json() + "\n", text);
    assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    // `--grid default` with an empty grid file named `default`
    std::fs::write(d.path().join("default"), "").unwrap();
    assert_eq!(code(&sslab(d.path(), d.path(), &["mfun", "cross-check", "--grid", "default"])), 2);
    std::fs::write(d.path().join("g.txt"), "# nothing\n").unwrap();
    assert_eq!(code(&sslab(d.path(), d.path(), &["mfun", "cross-check", "--grid", "g.txt"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["mfun", "cross-check", "--grid", "missing.txt"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["frobnicate"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["coeffs"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["mfun", "eval", "--k", "0", "--s", "2", "--z", "0.4i", "--delta", "1.5"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["triple", "fit", "--input", "nope.csv"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["coeffs", "--n", "10", "--weight", "14"])), 2);
    std::fs::write(d.path().join("bad.cfg"), "rel_tol = 1e-8\nbogus = 3\n").unwrap();
    assert_eq!(code(&sslab(d.path(), d.path(), &["--config", "bad.cfg", "specfun", "bridge"])), 2);
    assert_eq!(code(&sslab(d.path(), d.path(), &["--help"])), 0);
}

#[test]
fn tolerance_failure_exits_1() {
    let d = tempfile::tempdir().unwrap();
    let out = sslab(d.path(), d.path(), &["triple", "ladder", "--sign", "plus", "--ladder", "4,8,16,32", "--slope-max", "-5"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest_of(&out);
    assert!(!m.all_passed());
    assert!(m.tolerance_results.iter().any(|t| t.name.contains("slope_max") && !t.passed));
}

#[test]
fn config_file_then_flags() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("p.cfg"), "# precision\nrel_tol = 1e-8\ncontour_height = 55\nquad_points = 12\nseries_max_terms = 5000\n").unwrap();
    let out = sslab(d.path(), d.path(), &["--config", "p.cfg", "--rel-tol", "1e-10", "specfun", "gamma", "--z", "0.5"]);
    assert_eq!(code(&out), 0);
    let m = manifest_of(&out);
    let p = &m.parameters["precision"];
    assert_eq!(p["rel_tol"], serde_json::json!(1e-10));
    assert_eq!(p["contour_height"], serde_json::json!(55.0));
    assert_eq!(p["quad_points"], serde_json::json!(12));
    assert_eq!(p["series_max_terms"], serde_json::json!(5000));
    let v = &m.results["value"];
    assert!((v[0].as_f64().unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-14);
}

#[test]
fn triple_example_reports_slope() {
    let d = tempfile::tempdir().unwrap();
    let out = sslab(d.path(), d.path(), &["triple", "--sign", "plus", "--weight", "12", "--ladder", "16,32,64,128,256", "--out", "run.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("run.json")).unwrap()).unwrap();
    let slope = j["slope"].as_f64().unwrap();
    assert!((-0.8..=-0.3).contains(&slope), "{slope}");
    assert_eq!(j["fit"]["slope"].as_f64().unwrap(), slope);
    // fit from the CSV of the same ladder reproduces the slope
    let out = sslab(d.path(), d.path(), &["triple", "--ladder", "16,32,64,128,256", "--csv", "lad.csv"]);
    assert_eq!(code(&out), 0);
    let out = sslab(d.path(), d.path(), &["triple", "fit", "--input", "lad.csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(manifest_of(&out).results["slope"].as_f64().unwrap(), slope);
}

#[test]
fn ladder_bitwise_identical_across_thread_counts() {
    let d = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for t in ["1", "2", "3"] {
        let csv = format!("l{t}.csv");
        let json = format!("l{t}.json");
        let out = sslab(d.path(), d.path(), &["--threads", t, "triple", "ladder", "--sign", "minus", "--ladder", "4,8,16,32,64", "--csv", &csv, "--out", &json]);
        assert!(code(&out) <= 1, "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(manifest_of(&out).parameters["threads"], serde_json::json!(t.parse::<usize>().unwrap()));
        bytes.push((std::fs::read(d.path().join(&csv)).unwrap(), std::fs::read(d.path().join(&json)).unwrap()));
    }
    assert!(bytes.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn brute_force_and_maass_validate() {
    let d = tempfile::tempdir().unwrap();
    let out = sslab(d.path(), d.path(), &["triple", "brute", "--sign", "minus", "--x", "1,2,4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(manifest_of(&out).tolerance_results.len(), 3);
    let file = Path::new(sslab_core::modforms::maass::BUNDLED_DATASET_DIR).join("maass_odd_9.533695.txt");
    let out = sslab(d.path(), d.path(), &["maass", "validate", file.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(manifest_of(&out).results["parity"], serde_json::json!("odd"));
    std::fs::write(d.path().join("bad.txt"), "maass-sl2z v1\nt 9.5\nparity odd\ncoef 2 1.0\n").unwrap();
    assert_eq!(code(&sslab(d.path(), d.path(), &["maass", "validate", "bad.txt"])), 2);
}

#[test]
fn mfun_eval_decay_file() {
    let d = tempfile::tempdir().unwrap();
    let out = sslab(d.path(), d.path(), &["mfun", "eval", "--k", "0", "--s", "9", "--z", "0.3i", "--delta", "0.5", "--y", "40", "--decay", "5,10,20,40", "--out", "decay.dat"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.path().join("decay.dat")).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 2));
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}
