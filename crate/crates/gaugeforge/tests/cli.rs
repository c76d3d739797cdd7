use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gaugeforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaugeforge"))
        .args(args)
        .env_remove("GAUGEFORGE_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_gauge_exit_codes() {
    let out = gaugeforge(&["check-gauge", "--gauge", "B_pol"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "Holds");
    assert_eq!(r["tool"], "gaugeforge");

    let out = gaugeforge(&["check-gauge", "--gauge", "B_const1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "Fails");

    let out = gaugeforge(&["check-gauge", "--gauge", "no-such-gauge"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "precison = 40\n");
    let out = gaugeforge(&["--config", &cfg, "check-gauge", "--gauge", "B_pol"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precison"));
}

#[test]
fn registered_gauge_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "precision = 30\n\n[schedule]\neps0 = \"1/10\"\nratio = \"1/10\"\ncount = 10\n\n[[gauge]]\nname = \"log\"\nprincipal = \"-log(eps)\"\n",
    );
    let out = gaugeforge(&["--config", &cfg, "check-gauge", "--gauge", "log"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    assert_eq!(r["config"]["precision"], "30");
    assert_eq!(r["config"]["schedule.count"], "10");
}

#[test]
fn inconclusive_exit_code() {
    // on the decade schedule x^4 drops below the noise floor after two points
    let out = gaugeforge(&["--schedule", "1/10,1/10,12", "embed", "--dist", "smooth(pow(x,4))"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "Inconclusive");
}

#[test]
fn squaring_is_an_index_morphism() {
    let out = gaugeforge(&["morphism", "--map", "pow(eps,2)"]);
    assert_eq!(out.status.code(), Some(0));
    let out = gaugeforge(&["morphism", "--map", "lambda", "--source-gauge", "B_exp", "--target-gauge", "B_pol"]);
    assert_eq!(out.status.code(), Some(0));
    let out = gaugeforge(&["morphism", "--map", "lambda", "--source-gauge", "B_pol", "--target-gauge", "B_pol"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn equivalence_of_pol_and_exp_fails() {
    let out = gaugeforge(&["equiv", "--b1", "B_pol", "--b2", "B_exp"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gaugeforge(&["equiv", "--b1", "B_pol", "--b2", "B_s"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn interleave_witness_table() {
    let out = gaugeforge(&["interleave", "--b1", "pow(eps,-1)", "--b2", "exp(1/eps)", "--depth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let rows = r["records"][0]["details"]["witnesses"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["n"], 2);
    assert_eq!(rows[0]["eps"], "1/10");
}

#[test]
fn ode_transform_emits_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write(dir.path(), "p.toml", "rhs = \"x/eps\"\nt0 = \"0\"\nx0 = \"1\"\ninterval = [\"-1\", \"2\"]\n");
    let emitted = dir.path().join("t.toml");
    let out = gaugeforge(&["ode", "transform", "--problem", &prob, "--morphism", "lambda", "--emit", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&emitted).unwrap();
    assert_eq!(text, "rhs = \"-log(eps) * x\"\nt0 = \"0\"\nx0 = \"1\"\ninterval = [\"-1\", \"2\"]\n");

    let out = gaugeforge(&["ode", "classify", "--problem", &prob, "--gauge", "B_pol"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gaugeforge(&["ode", "classify", "--problem", &prob, "--gauge", "B_exp"]);
    assert_eq!(out.status.code(), Some(0));
    let out = gaugeforge(&["ode", "transfer", "--problem", &prob, "--morphism", "lambda"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn text_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = gaugeforge(&["--format", "text", "--out", path.to_str().unwrap(), "check-gauge", "--gauge", "B_exp"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("gaugeforge "));
    assert!(text.trim_end().ends_with("verdict: Holds"));
}

#[test]
fn precision_falls_back_to_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gaugeforge"));
        c.args(["check-gauge", "--gauge", "B_pol"]).env_remove("GAUGEFORGE_PRECISION");
        if let Some(v) = env {
            c.env("GAUGEFORGE_PRECISION", v);
        }
        if let Some(v) = flag {
            c.args(["--precision", v]);
        }
        c.output().unwrap()
    };
    assert_eq!(json(&run(None, None))["config"]["precision"], "50");
    assert_eq!(json(&run(Some("30"), None))["config"]["precision"], "30");
    assert_eq!(json(&run(Some("30"), Some("40")))["config"]["precision"], "40");
    assert_eq!(run(Some("many"), None).status.code(), Some(2));
}
