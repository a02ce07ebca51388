use std::process::{Command, Output};

use serde_json::Value;

fn phidiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phidiv")).args(args).env_remove("PHIDIV_CACHE_DIR").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn single_observation_quantile_is_closed_form() {
    for alpha in [0.01, 0.05, 0.2] {
        let a = alpha.to_string();
        let v = json(&phidiv(&["quantile", "-n", "1", "-s", "1", "-a", &a]));
        let q = v["result"]["q"].as_f64().unwrap();
        let expected = (2.0f64 / alpha).ln();
        assert!((q - expected).abs() <= 1e-9 * expected, "alpha {alpha}: {q} vs {expected}");
        assert_eq!(v["method"], "exact");
    }
}

#[test]
fn output_embeds_provenance() {
    let v = json(&phidiv(&["quantile", "-n", "30", "-s", "0.5", "--asymptotic"]));
    assert_eq!(v["tool"], "phidiv");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["subcommand"], "quantile");
    assert_eq!(v["config"]["method"], "asymptotic");
    assert_eq!(v["method"], "asymptotic");

    let out = phidiv(&["--csv", "stat", "--data", "0.2,0.4", "-s", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# phidiv "));
    assert!(lines[1].starts_with("# config {"));
    assert_eq!(lines[2], "# method none");
    assert_eq!(lines[3], "kind,s,n,statistic,scaled");
}

#[test]
fn plotting_positions_give_a_small_statistic() {
    let n = 400;
    let data: Vec<String> = (1..=n).map(|i| (i as f64 / (n + 1) as f64).to_string()).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.txt");
    std::fs::write(&path, format!("# plotting positions\n{}\n", data.join("\n"))).unwrap();
    let v = json(&phidiv(&["stat", path.to_str().unwrap(), "-s", "1"]));
    let stat = v["result"]["statistic"]["statistic"].as_f64().unwrap();
    assert!(stat < 0.02, "{stat}");
}

#[test]
fn pvalue_at_the_quantile_is_alpha() {
    // With one observation x ≤ 1/2, S_1(1) = −log x; x = α/2 puts it at q_1(1, α).
    let v = json(&phidiv(&["pvalue", "--data", "0.025", "-s", "1"]));
    let p = v["result"]["p_value"].as_f64().unwrap();
    assert!((p - 0.05).abs() < 1e-9, "{p}");

    let q = json(&phidiv(&["quantile", "-n", "20", "-s", "0.5", "-a", "0.1"]))["result"]["q"].as_f64().unwrap();
    assert!(q > 0.0);
}

#[test]
fn null_transform() {
    let direct = json(&phidiv(&["stat", "--data", "0.3,0.6,0.8", "-s", "0.5"]));
    // Exponential(1) quantiles of 0.3, 0.6, 0.8 map back to the same probabilities.
    let ys: Vec<String> = [0.3f64, 0.6, 0.8].iter().map(|p| (-(1.0 - p).ln()).to_string()).collect();
    let via = json(&phidiv(&["stat", "--data", &ys.join(","), "--null", "exponential:0,1", "-s", "0.5"]));
    let a = direct["result"]["statistic"]["statistic"].as_f64().unwrap();
    let b = via["result"]["statistic"]["statistic"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-12);
    assert_eq!(via["config"]["null"]["family"], "exponential");

    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    std::fs::write(&grid, "y,p\n0,0\n10,1\n").unwrap();
    let spec = format!("grid:{}", grid.display());
    let g = json(&phidiv(&["stat", "--data", "3,6,8", "--null", &spec, "-s", "0.5"]));
    let c = g["result"]["statistic"]["statistic"].as_f64().unwrap();
    assert!((a - c).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(phidiv(&["stat", "--bogus"]).status.code(), Some(1));
    assert_eq!(phidiv(&["quantile", "-n", "5000", "-s", "1"]).status.code(), Some(1));
    assert_eq!(phidiv(&["stat", "--data", "0.1,x", "-s", "1"]).status.code(), Some(2));
    assert_eq!(phidiv(&["stat", "--data", "0.1,1.5", "-s", "1"]).status.code(), Some(2));
    assert_eq!(phidiv(&["stat", "--data", "0.5", "-s", "1", "--null", "normal:0,-1"]).status.code(), Some(1));
    assert_eq!(phidiv(&["stat", "missing-file.txt", "-s", "1"]).status.code(), Some(2));
    assert_eq!(phidiv(&["pvalue", "--data", "0.5", "-s", "1", "--kind", "integral", "--method", "exact"]).status.code(), Some(1));
    assert_eq!(phidiv(&["--help"]).status.code(), Some(0));
    // Over the exact limit, the asymptotic method is accepted.
    assert_eq!(phidiv(&["quantile", "-n", "5000", "-s", "1", "--asymptotic"]).status.code(), Some(0));
}

#[test]
fn out_of_range_order_warns_but_computes() {
    let v = json(&phidiv(&["stat", "--data", "0.2,0.7", "-s", "3"]));
    assert!(v["result"]["statistic"]["statistic"].as_f64().unwrap().is_finite());
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn band_csv_and_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_phidiv"))
        .args(["--csv", "band", "--data", "0.12,0.31,0.33,0.58,0.71,0.93", "-s", "1", "-a", "0.1"])
        .env("PHIDIV_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "x_left,x_right,L,U");
    assert_eq!(rows.len(), 1 + 7);
    let cache = std::fs::read_to_string(dir.path().join("quantiles.csv")).unwrap();
    assert_eq!(cache.lines().filter(|l| !l.starts_with('n')).count(), 1);
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"kind":"detection","n":1000,"s_list":[0.5,1],"reps":8,"seed":3,"cells":[{"beta":0.5,"r":0.15}],"histogram_bins":5}"#,
    )
    .unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let v = json(&phidiv(&["simulate", plan.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]));
        assert_eq!(v["method"], "monte-carlo");
        let mut result: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap()).unwrap();
        result.as_object_mut().unwrap().remove("runtime_seconds");
        let hist = std::fs::read_to_string(out_dir.join("histogram_centered.csv")).unwrap();
        assert!(hist.starts_with("s,hypothesis,bin_left,bin_right,count\n"));
        assert!(out_dir.join("histogram_raw.csv").exists());
        (result, hist)
    };
    assert_eq!(run("a"), run("b"));

    std::fs::write(&plan, r#"{"kind":"detection","n":1000}"#).unwrap();
    assert_eq!(phidiv(&["simulate", plan.to_str().unwrap()]).status.code(), Some(2));
}
