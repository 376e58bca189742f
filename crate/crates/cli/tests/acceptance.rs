//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ncad_core::suite;
use ncad_core::{CheckReport, Result};

const SEED: u64 = 20_240_601;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn golden(args: &[&str], expected: &str, code: i32) -> std::result::Result<(), String> {
    let dir = golden_dir();
    let out = Command::new(env!("CARGO_BIN_EXE_ncad"))
        .args(args)
        .current_dir(&dir)
        .output()
        .map_err(|e| e.to_string())?;
    let want = std::fs::read(dir.join(expected)).map_err(|e| format!("{expected}: {e}"))?;
    if out.status.code() != Some(code) {
        return Err(format!(
            "{args:?}: exit {:?}, expected {code}",
            out.status.code()
        ));
    }
    if out.stdout != want {
        return Err(format!("{args:?}: output differs from {expected}"));
    }
    Ok(())
}

fn cli_goldens() -> Result<CheckReport> {
    let cases: [(&[&str], &str, i32); 3] = [
        (
            &["delta", "--slot", "0", "--poly", "x2.json"],
            "delta_x2.out.json",
            0,
        ),
        (
            &["integrate-poly", "--poly", "xz.json", "--slot", "0"],
            "integrate_poly_xz.out.json",
            1,
        ),
        (
            &["eval", "--poly", "x2.json", "--points", "X.json"],
            "eval_x2_X.out.json",
            0,
        ),
    ];
    for (n, (args, expected, code)) in cases.iter().enumerate() {
        if let Err(w) = golden(args, expected, *code) {
            return Ok(CheckReport::fail("cli goldens", n + 1, w));
        }
    }
    Ok(CheckReport::pass("cli goldens", cases.len()))
}

fn main() {
    type Criterion = (&'static str, u64, Box<dyn Fn() -> Result<CheckReport>>);
    let criteria: Vec<Criterion> = vec![
        (
            "symbolic/numeric delta agreement, 200 polynomials",
            30,
            Box::new(|| suite::delta_agreement(SEED, 200)),
        ),
        (
            "delta commutation, 100 polynomials",
            30,
            Box::new(|| suite::delta_commutation(SEED + 1, 100)),
        ),
        (
            "order-0 round trip, 50 polynomials",
            60,
            Box::new(|| suite::order0_round_trip(SEED + 2, 50)),
        ),
        (
            "inner-derivation solver, 50 pairs and fixture",
            10,
            Box::new(|| suite::inner_solver(SEED + 3, 50)),
        ),
        (
            "higher-order round trip, 20 each for k = 1, 2",
            120,
            Box::new(|| {
                Ok(
                    suite::higher_round_trip(SEED + 4, 20, 1)?.and(suite::higher_round_trip(
                        SEED + 5,
                        20,
                        2,
                    )?),
                )
            }),
        ),
        (
            "negative detection, x z and 20 corruptions",
            10,
            Box::new(|| suite::negatives(SEED + 6, 20)),
        ),
        (
            "makingzero, 50 idempotents and 20 triples",
            10,
            Box::new(|| suite::makingzero(SEED + 7, 50, 20)),
        ),
        (
            "structure axioms, 50 polynomials and broken oracle",
            30,
            Box::new(|| suite::structure(SEED + 8, 50)),
        ),
        ("cli golden files", 5, Box::new(cli_goldens)),
    ];
    let mut failures = 0;
    for (n, (label, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(r) if r.passed && !over => (true, format!("{} cases", r.cases)),
            Ok(r) if r.passed => (
                false,
                format!("{} cases, over the {budget} s budget", r.cases),
            ),
            Ok(r) => (false, r.witness.unwrap_or_default()),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {}: {} {label} ({:.2} s) {detail}",
            n + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
