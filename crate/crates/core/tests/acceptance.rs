//! Criteria 1–9, one PASS/FAIL line each on stderr.
//!
//! 1–8 are read from the JSON document of `volterra report`; 9 is that run's
//! wall time plus its failure count. The per-alpha runtime limit of 1 and the
//! total limit of 2 are timed separately against the library.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use volterra::acceptance::{criterion_2, ladder_check, ALPHAS};

fn line(id: u8, name: &str, passed: bool, note: &str) -> bool {
    // straight to the handle, so the harness does not capture it
    let _ = writeln!(std::io::stderr(), "{} criterion {id} ({name}): {note}", if passed { "PASS" } else { "FAIL" });
    passed
}

#[test]
fn acceptance_suite() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_volterra"))
        .args(["report", "--format", "json"])
        .output()
        .expect("report runs");
    let elapsed = start.elapsed();
    let doc: Value = serde_json::from_slice(&out.stdout).expect("report emits JSON");
    let criteria = doc["results"]["criteria"].as_array().expect("criteria list");
    assert_eq!(criteria.len(), 8);

    let mut all = true;

    // runtime parts of 1 and 2
    let ladder_times: Vec<Duration> = ALPHAS
        .iter()
        .map(|&a| {
            let t = Instant::now();
            let (ok, _) = ladder_check(a).expect("ladder check runs");
            assert!(ok, "ladder check failed at alpha = {a}");
            t.elapsed()
        })
        .collect();
    let t = Instant::now();
    let c2 = criterion_2();
    let residual_time = t.elapsed();

    for c in criteria {
        let id = c["id"].as_u64().unwrap() as u8;
        let name = c["name"].as_str().unwrap();
        let mut passed = c["passed"].as_bool().unwrap();
        let mut note: String;
        match id {
            1 => {
                let slow = ladder_times.iter().any(|d| *d >= Duration::from_secs(60));
                passed &= !slow;
                let worst_top = c["details"]["per_alpha"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|r| r["relative_errors"][0].as_f64().unwrap())
                    .fold(0.0, f64::max);
                note = format!(
                    "worst top error {worst_top:.2e}; per-alpha times {:?}",
                    ladder_times.iter().map(|d| format!("{:.1}s", d.as_secs_f64())).collect::<Vec<_>>()
                );
            }
            2 => {
                passed &= c2.passed && residual_time < Duration::from_secs(30);
                note = format!(
                    "max residual {:.2e}; {:.1}s",
                    c["details"]["max_residual"].as_f64().unwrap(),
                    residual_time.as_secs_f64()
                );
            }
            3 => note = format!("max residual {:.2e}", c["details"]["max_residual"].as_f64().unwrap()),
            4 => {
                note = format!(
                    "product/series {:.2e}, root check {:.2e}, S1 {:.2e}",
                    c["details"]["max_scaled_discrepancy"].as_f64().unwrap(),
                    c["details"]["max_root_check"].as_f64().unwrap(),
                    c["details"]["max_s1_deviation"].as_f64().unwrap()
                )
            }
            5 => {
                note = format!(
                    "second zero within {:.1e} of 1/e",
                    c["details"]["second_zero_max_deviation_from_e_inverse"].as_f64().unwrap()
                )
            }
            6 => {
                let worst = c["details"]["per_alpha"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .flat_map(|r| r["relative_differences"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()))
                    .fold(0.0, f64::max);
                note = format!("worst top-5 difference {worst:.2e}");
            }
            7 => {
                let last: Vec<f64> = c["details"]["per_map"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|r| r["radii"].as_array().unwrap().last().unwrap().as_f64().unwrap())
                    .collect();
                note = format!("radii at N=2048 {last:?}");
            }
            8 => {
                let profile = c["details"]["f_family_distance_profile"].as_array().unwrap();
                let d12 = profile.last().unwrap()[1].as_f64().unwrap();
                note = format!("dist(1, f_1..f_12) = {d12:.3e}; compressed radii {}", c["details"]["compressed_radii"]);
            }
            _ => unreachable!(),
        }
        if let Some(e) = c["details"].get("error") {
            note = format!("error: {e}");
        }
        all &= line(id, name, passed, &note);
    }

    let failures = doc["results"]["failures"].as_u64().unwrap();
    let nine = out.status.code() == Some(0) && failures == 0 && elapsed < Duration::from_secs(600);
    all &= line(
        9,
        "full report",
        nine,
        &format!("{:.1}s, {failures} contract failures, exit {:?}", elapsed.as_secs_f64(), out.status.code()),
    );
    assert!(all, "acceptance criteria failed");
}
