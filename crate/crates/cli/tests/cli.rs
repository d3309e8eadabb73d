use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_forecastability"));
    c.env("RUST_LOG", "warn").env_remove("FORECASTABILITY_THREADS");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth_panel(dir: &Path) {
    let o = run(
        &[
            "synth", "--kind", "ar1", "--phi", "0.6", "--len", "80", "--count", "24", "--seed", "5", "--level", "40",
            "--out", "panel.csv",
        ],
        dir,
    );
    assert!(o.status.success(), "{}", stderr(&o));
}

const YEARLY: [&str; 6] = ["--format", "long", "--frequency", "yearly", "--input", "panel.csv"];

#[test]
fn synth_is_deterministic_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    synth_panel(dir.path());
    let first = fs::read(dir.path().join("panel.csv")).unwrap();
    synth_panel(dir.path());
    assert_eq!(first, fs::read(dir.path().join("panel.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("series_id,step,value\nS00,1,"));
    assert_eq!(text.lines().count(), 1 + 24 * 80);
    let manifest = fs::read_to_string(dir.path().join("panel.csv.manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"synth\""));
}

#[test]
fn stages_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    synth_panel(dir.path());
    for stage in ["gates", "ami", "evaluate", "validate", "triage", "report"] {
        let mut args = vec![stage];
        args.extend(YEARLY);
        args.extend(["--out", "res"]);
        let o = run(&args, dir.path());
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    let res = dir.path().join("res");
    let header = |name: &str| fs::read_to_string(res.join(name)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("ami_profiles.csv"), "series_id,frequency,h,n_eff,ami_nats");
    assert_eq!(header("smape.csv"), "series_id,frequency,model,h,origin,smape_pct");
    assert_eq!(header("smape_mean.csv"), "series_id,frequency,model,h,mean_smape_pct");
    assert_eq!(header("validation.csv"), "frequency,model,h,rho,n_series");
    assert_eq!(header("validation_summary.csv"), "frequency,model,mean_rho,median_rho,pooled_rho");
    assert_eq!(header("terciles.csv"), "frequency,model,tercile,median_smape_pct");
    assert_eq!(header("strata.csv"), "frequency,model,tercile_by_length,rho");
    assert_eq!(header("heatmap.csv"), "frequency,model,h,rho");
    assert_eq!(header("triage.csv"), "series_id,frequency,tercile,action");
    assert_eq!(header("rejects.csv"), "series_id,gate,reason");
    assert_eq!(header("survivors.csv"), "series_id,frequency,t_base,scale0");
    assert!(fs::read_to_string(res.join("report.md")).unwrap().starts_with("# Forecastability report: yearly"));

    // stage-by-stage output matches a single run-all
    let mut args = vec!["run-all"];
    args.extend(YEARLY);
    args.extend(["--out", "all"]);
    let o = run(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["ami_profiles.csv", "smape.csv", "validation.csv", "triage.csv", "report.md"] {
        assert_eq!(
            fs::read(res.join(name)).unwrap(),
            fs::read(dir.path().join("all").join(name)).unwrap(),
            "{name}"
        );
    }
    let manifest = fs::read_to_string(dir.path().join("all/run_manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"run-all\""));
    assert!(manifest.contains("\"panel.csv\""));
    assert!(manifest.contains("\"triage.csv\""));
}

#[test]
fn validate_without_evaluate_names_the_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--frequency", "monthly", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("smape_mean.csv"), "{}", stderr(&o));
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gates", "--frequency", "fortnightly", "--out", "r", "--input", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = run(&["gates", "--frequency", "yearly", "--out", "r", "--input", "missing.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["gates", "--frequency", "yearly", "--out", "r", "--rolls", "0", "--input", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = bin()
        .args(["gates", "--frequency", "yearly", "--out", "r", "--input", "x.csv"])
        .env("FORECASTABILITY_THREADS", "many")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    assert!(run(&["--help"], dir.path()).status.success());
}

#[test]
fn unknown_model_and_mismatched_config_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    synth_panel(dir.path());
    let mut gates = vec!["gates", "--threads", "1"];
    gates.extend(YEARLY);
    gates.extend(["--out", "res"]);
    assert!(run(&gates, dir.path()).status.success());

    let mut eval = vec!["evaluate", "--models", "nbeats"];
    eval.extend(YEARLY);
    eval.extend(["--out", "res"]);
    let o = run(&eval, dir.path());
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("nbeats"));

    let mut eval = vec!["evaluate", "--rolls", "5"];
    eval.extend(YEARLY);
    eval.extend(["--out", "res"]);
    assert_eq!(run(&eval, dir.path()).status.code(), Some(64));
}

#[test]
fn m4_train_and_test_splits_can_be_joined() {
    let dir = tempfile::tempdir().unwrap();
    let row = |id: &str, n: usize, off: f64| {
        let vals: Vec<String> = (0..n).map(|t| format!("{}", off + ((t * 7919) % 13) as f64)).collect();
        format!("\"{id}\",{},,\n", vals.join(","))
    };
    let mut train = String::from("\"V1\",\"V2\",\"V3\"\n");
    let mut test = train.clone();
    for i in 0..6 {
        train.push_str(&row(&format!("Y{i}"), 60, 100.0 + i as f64));
        test.push_str(&row(&format!("Y{i}"), 6, 100.0));
    }
    fs::write(dir.path().join("train.csv"), train).unwrap();
    fs::write(dir.path().join("test.csv"), test).unwrap();
    let base = ["gates", "--format", "m4", "--frequency", "yearly", "--input", "train.csv"];
    let mut with = base.to_vec();
    with.extend(["--with-test", "test.csv", "--out", "joined"]);
    let o = run(&with, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut without = base.to_vec();
    without.extend(["--out", "plain"]);
    assert!(run(&without, dir.path()).status.success());
    let t_bases = |d: &str| -> Vec<usize> {
        let text = fs::read_to_string(dir.path().join(d).join("survivors.csv")).unwrap();
        text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect()
    };
    assert!(!t_bases("plain").is_empty());
    assert!(t_bases("plain").iter().all(|&t| t == 45));
    assert!(t_bases("joined").iter().all(|&t| t == 51));
}
