//! The acceptance battery: one PASS/FAIL line per criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use gaugeforge::suite::CRITERIA;
use gaugeforge_core::netlang::SamplingSchedule;

/// Wall-clock bounds for criteria that carry one.
fn time_limit(n: usize) -> Option<Duration> {
    match n {
        1 => Some(Duration::from_secs(10)),
        4 => Some(Duration::from_secs(30)),
        _ => None,
    }
}

fn suite_bytes(dir: &std::path::Path, name: &str) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_gaugeforge"))
        .args(["suite", "--out"])
        .arg(&out)
        .env_remove("GAUGEFORGE_PRECISION")
        .status()
        .map_err(|e| e.to_string())?;
    if status.code() != Some(0) {
        return Err(format!("suite exited with {status}"));
    }
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn determinism() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("gaugeforge-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let runs = (suite_bytes(&dir, "a.json"), suite_bytes(&dir, "b.json"));
    let _ = std::fs::remove_dir_all(&dir);
    match runs {
        (Ok(a), Ok(b)) if a == b => (true, format!("{} identical bytes", a.len())),
        (Ok(a), Ok(b)) => (false, format!("outputs differ ({} vs {} bytes)", a.len(), b.len())),
        (Err(e), _) | (_, Err(e)) => (false, e),
    }
}

fn main() {
    let sched = SamplingSchedule::default();
    let mut failed = Vec::new();
    for (n, title, f) in CRITERIA {
        let start = Instant::now();
        let record = f(&sched);
        let took = start.elapsed();
        let in_time = time_limit(n).is_none_or(|t| took <= t);
        let pass = record.verdict.is_holds() && in_time;
        let limit = time_limit(n).map(|t| format!(" (limit {}s)", t.as_secs())).unwrap_or_default();
        println!(
            "criterion {n}: {} {title} [{}] {:.2}s{limit}",
            if pass { "PASS" } else { "FAIL" },
            record.verdict.tag.as_str(),
            took.as_secs_f64()
        );
        if !pass {
            failed.push(n);
        }
    }
    let (pass, note) = determinism();
    println!("criterion 8: {} determinism [{note}]", if pass { "PASS" } else { "FAIL" });
    if !pass {
        failed.push(8);
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
