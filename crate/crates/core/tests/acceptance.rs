//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit on
//! any failure. Built without the libtest harness so the lines always show.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gcm::measure;
use gcm::measure::{pair_measure, ssts_diff_sweep};
use gcm::verify::{
    example_state, markov_residual, suite_axioms, suite_closed_forms, suite_corollary3, suite_hierarchy,
    suite_monogamy, suite_monotonicity, VerificationOutcome,
};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn summarize(outcomes: &[&VerificationOutcome]) -> (bool, String) {
    let ok = outcomes.iter().all(|o| o.passed());
    let text = outcomes
        .iter()
        .map(|o| {
            format!(
                "{}: {} trials, {} failures, worst {:.3e}",
                o.suite_name, o.trials, o.failures, o.worst_violation
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    (ok, text)
}

fn worked_example() -> Verdict {
    let start = Instant::now();
    let s = example_state();
    let min_eig = s.is_physical().min_eigenvalue;
    let bc = pair_measure(&s, 1, 2).unwrap();
    let ac = pair_measure(&s, 0, 2).unwrap();
    let ab = pair_measure(&s, 0, 1).unwrap();
    let a_bc = measure(&s.merge_parties(&[vec![0], vec![1, 2]]).unwrap())
        .unwrap()
        .value;
    let residual = markov_residual(&s).unwrap();
    let elapsed = start.elapsed();
    let ok = min_eig >= -1e-10
        && (bc - 11.0 / 36.0).abs() <= 1e-12
        && (ac - 71.0 / 1296.0).abs() <= 1e-12
        && (ac - 0.0548).abs() <= 5e-4
        && (a_bc - ab).abs() <= 1e-12
        && residual <= 1e-12
        && within(elapsed, 1.0);
    verdict(
        ok,
        format!(
            "min eig {min_eig:.3e}, M(B|C) {bc:.15}, M(A|C) {ac:.15}, M(A|BC) - M(A|B) {:.1e}, residual {residual:.1e}, {elapsed:?}",
            a_bc - ab
        ),
    )
}

fn ssts_bound() -> Verdict {
    let start = Instant::now();
    let sweep = ssts_diff_sweep(50.0, 500, 500).unwrap();
    let elapsed = start.elapsed();
    let best = sweep.argmax_cell();
    verdict(
        (sweep.max_diff - 0.202677).abs() <= 1e-3 && within(elapsed, 10.0),
        format!(
            "max {:.9} at nbar {:.4}, mu {:.4}, {elapsed:?}",
            sweep.max_diff, best.nbar, best.mu
        ),
    )
}

fn closed_forms() -> Verdict {
    // each trial checks one standard-form state, one pure state and one channel
    let o = suite_closed_forms(1000, 3);
    let (ok, text) = summarize(&[&o]);
    verdict(ok, text)
}

fn monotonicity() -> Verdict {
    let start = Instant::now();
    let o = suite_monotonicity(1000, 4);
    let elapsed = start.elapsed();
    let (ok, text) = summarize(&[&o]);
    verdict(ok && within(elapsed, 60.0), format!("{text}, {elapsed:?}"))
}

fn hierarchy() -> Verdict {
    let h = suite_hierarchy(1000, 5);
    let c = suite_corollary3(1000, 5);
    let (ok, text) = summarize(&[&h, &c]);
    verdict(ok, text)
}

fn monogamy() -> Verdict {
    let o = suite_monogamy(500, 6);
    let (ok, text) = summarize(&[&o]);
    verdict(ok, text)
}

fn axioms() -> Verdict {
    let o = suite_axioms(1000, 7);
    let (ok, text) = summarize(&[&o]);
    verdict(ok, text)
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gcm"))
            .args(["verify", "all", "--trials", "200", "--seed", "1"])
            .output()
            .expect("gcm runs")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    verdict(
        ok,
        format!(
            "exit {:?}/{:?}, {} report bytes, identical: {}",
            a.status.code(),
            b.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked example reproduction", worked_example),
        ("squeezed thermal bound", ssts_bound),
        ("closed-form agreement", closed_forms),
        ("monotonicity under local channels", monotonicity),
        ("hierarchy and averaged subgroups", hierarchy),
        ("monogamy equivalences", monogamy),
        ("axioms", axioms),
        ("determinism of verify all", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {} {name}: {}", i + 1, v.detail);
        if !v.ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
