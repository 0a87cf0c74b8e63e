//! The acceptance criteria, one line each: `cargo test --test acceptance`.

use std::time::Instant;

use qlinear::experiment::verify::{self, SuiteReport};

const SEED: u64 = 0;

type Check<'a> = Box<dyn Fn() -> qlinear::Result<SuiteReport> + 'a>;

fn criteria(scratch: &std::path::Path) -> Vec<(&'static str, Check<'_>)> {
    vec![
        (
            "1 expected change: formula = brute force",
            Box::new(|| verify::delta_suite(SEED, 500)),
        ),
        (
            "2 alternating-sum identities",
            Box::new(verify::identities_suite),
        ),
        (
            "3 exact trajectory relations",
            Box::new(verify::lemma6_suite),
        ),
        (
            "4 asymptotic ratios decrease in n",
            Box::new(verify::asymptotics_suite),
        ),
        (
            "5 sampler uniformity",
            Box::new(|| verify::uniformity_suite(SEED, 100, 100_000)),
        ),
        (
            "6 large-q edge-count range",
            Box::new(|| verify::prop2_suite(SEED, 200)),
        ),
        (
            "7 Turan lower bound",
            Box::new(|| verify::prop1_suite(SEED, 50)),
        ),
        (
            "8 trajectory band at n = 500",
            Box::new(|| verify::band_suite(SEED, 20)),
        ),
        (
            "9 completeness trend",
            Box::new(|| verify::trend_suite(SEED, 20)),
        ),
        (
            "10 packing correspondence",
            Box::new(|| verify::packing_suite(SEED, 50)),
        ),
        (
            "11 byte-identical traces",
            Box::new(move || verify::determinism_suite(SEED, scratch)),
        ),
    ]
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut failed = Vec::new();
    for (name, check) in criteria(dir.path()) {
        let started = Instant::now();
        let (passed, summary) = match check() {
            Ok(r) => (r.passed, r.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "[{}] {name}: {summary} ({:.1}s)",
            if passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        if !passed {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
