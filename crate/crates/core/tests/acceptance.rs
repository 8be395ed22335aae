//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Budget exhaustion counts as failure here.

use std::process::ExitCode;
use std::time::Instant;

use teamlogic::eval::EvalBudget;
use teamlogic::harness::corpus::{self, Group};
use teamlogic::harness::*;

fn clean(r: &Report) -> bool {
    r.passed() && r.exhausted == 0 && r.cases > 0
}

fn describe(r: &Report) -> String {
    let mut s = r.summary();
    if let Some(f) = r.failures.first() {
        s.push_str(&format!("\n    first failure: {}", serde_json::to_string(f).unwrap()));
    }
    s
}

fn criterion(n: usize, name: &str, f: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, detail) = f();
    println!(
        "{} criterion {n}: {name} [{:.1}s]\n    {}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        detail.replace('\n', "\n    ")
    );
    ok
}

fn single(r: Report) -> (bool, String) {
    (clean(&r), describe(&r))
}

fn main() -> ExitCode {
    let space = CaseSpace::default();
    let mut ok = true;

    ok &= criterion(1, "forward translation", || {
        let n = corpus::group(Group::Forward).count();
        let r = run_forward_suite(&space);
        (n >= 15 && clean(&r), format!("{n} formulas; {}", describe(&r)))
    });
    ok &= criterion(2, "backward translation", || {
        let n = corpus::group(Group::Backward).count();
        let r = run_backward_suite(&space);
        (n >= 10 && clean(&r), format!("{n} formulas; {}", describe(&r)))
    });
    ok &= criterion(3, "nonempty normal form", || single(run_normal_form_suite(&space.clone().with_max_universe(2))));
    ok &= criterion(4, "derived operators", || {
        let reports = run_operator_suite(&space);
        let all = reports.len() >= 9 && reports.iter().all(|(_, r)| clean(r));
        (all, reports.iter().map(|(name, r)| format!("{name}: {}", describe(r))).collect::<Vec<_>>().join("\n"))
    });
    ok &= criterion(5, "closure properties and counterexamples", || {
        let closures = run_closure_suite(&space);
        let observations = run_counterexample_suite();
        (
            clean(&closures) && clean(&observations) && observations.cases == 9,
            format!("{}\n{}", describe(&closures), describe(&observations)),
        )
    });
    ok &= criterion(6, "graph properties", || single(run_graph_suite(4, EvalBudget::default())));
    ok &= criterion(7, "infinity", || single(run_infinity_suite(&space)));
    ok &= criterion(8, "relativization", || single(run_relativization_suite(&space)));
    ok &= criterion(9, "mutation sensitivity", || {
        let results = run_mutation_suite(&space);
        let all = results.len() == 5 && results.iter().all(|r| r.detected);
        let lines = results
            .iter()
            .map(|r| {
                let witness = r.witness.as_ref().map(|f| f.formula.as_str()).unwrap_or("-");
                format!("{}: {} ({witness})", r.mutation.name(), if r.detected { "detected" } else { "missed" })
            })
            .collect::<Vec<_>>()
            .join("\n");
        (all, lines)
    });

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
