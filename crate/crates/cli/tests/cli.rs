use std::path::Path;
use std::process::{Command, Output};

fn eos(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eos"));
    cmd.args(args).env_remove("EOS_SEED");
    if let Some(s) = seed_env {
        cmd.env("EOS_SEED", s);
    }
    cmd.output().expect("run eos")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_neuron_run_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = eos(&["single-neuron", "run", "--eta", "0.25", "--x0", "3", "--y0", "4", "--out", path_str(&out)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,x,y,s,r,d,rho,sharpness,phase\n"));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["regime"], "GradientFlow");
    assert_eq!(summary["outcome"], "Converged");
}

#[test]
fn passing_sweep_exits_zero_and_failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("gap.csv");
    let o = eos(
        &[
            "single-neuron",
            "sweep",
            "--kind",
            "gap",
            "--loss",
            "higher-order:3",
            "--eta-grid",
            "log:1e-3:0.13:12",
            "--out",
            path_str(&good),
            "--emit-plot-script",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("gap.csv.summary.json").exists());
    assert!(dir.path().join("gap.csv.plot.py").exists());

    // Too few grid points for a fit: the check fails without an error.
    let bad = dir.path().join("few.csv");
    let o = eos(
        &[
            "single-neuron",
            "sweep",
            "--kind",
            "bounce",
            "--loss",
            "higher-order:4",
            "--eta-grid",
            "log:1e-2:0.1:3",
            "--out",
            path_str(&bad),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL bounce-slope:higher-order:4"));
}

#[test]
fn errors_exit_one() {
    let o = eos(&["single-neuron", "run", "--eta", "0.1", "--x0", "2", "--y0", "2", "--out", "/dev/null"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invariant line"));
    let o = eos(&["single-neuron", "sweep", "--eta-grid", "log:1:0.1:3", "--out", "x.csv"], None);
    assert_eq!(o.status.code(), Some(1));
    let o = eos(&["experiment", "--config", "/nonexistent/config.json"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["relu", "train", "--d", "20", "--n", "30", "--eta", "1e-2", "--time-budget", "0.5"];
    let mut flag = common.to_vec();
    flag.extend(["--seed", "3", "--out", path_str(&a)]);
    let mut env = common.to_vec();
    env.extend(["--out", path_str(&b)]);
    assert!(eos(&flag, None).status.success());
    assert!(eos(&env, Some("3")).status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8_lossy(&ta).starts_with("t,a_minus,a_plus,A,b,loss,sharpness,test_acc\n"));
}

#[test]
fn experiment_config_is_reproducible_and_seed_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("mm.json");
    let out = dir.path().join("mm.csv");
    std::fs::write(
        &config,
        serde_json::json!({
            "experiment": "mean-model-phase",
            "grid": "list:0.9,1.3",
            "seed": 1,
            "out_path": out,
            "params": { "d": 60, "seeds": 2 }
        })
        .to_string(),
    )
    .unwrap();
    let first = eos(&["experiment", "--config", path_str(&config)], None);
    assert!(matches!(first.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&first.stderr));
    let csv1 = std::fs::read(&out).unwrap();
    eos(&["experiment", "--config", path_str(&config)], None);
    assert_eq!(csv1, std::fs::read(&out).unwrap());

    eos(&["experiment", "--config", path_str(&config)], Some("42"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mm.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 42);
    assert_ne!(csv1, std::fs::read(&out).unwrap());
}

#[test]
fn compare_and_mean_model_commands_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cmp = dir.path().join("cmp.csv");
    let o = eos(&["relu", "compare-mm", "--d", "30", "--n", "40", "--time-budget", "1", "--out", path_str(&cmp)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&cmp).unwrap().starts_with("t,b_network,b_mean_model,A_network,A_mean_model\n"));

    let mm = dir.path().join("mm.csv");
    let o =
        eos(&["mean-model", "run", "--d", "100", "--eta-ratio", "1.25", "--a0", "-2", "--out", path_str(&mm)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["b_inf"].as_f64().unwrap() < -0.05);
}
