//! Exhaustive and sampled checking over small models and teams.
//!
//! Checks enumerate every model of a relational vocabulary up to a universe
//! bound together with every team up to a row bound. A check only looks at
//! the symbols its formulas mention, so models are enumerated over that
//! reduct and each result is weighted by the number of full models sharing
//! it.

mod checks;
pub mod corpus;
mod suites;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::eval::EvalBudget;
use crate::structures::{all_tuples, model_to_json, team_to_json, Model, Relation, Team};
use crate::syntax::Vocabulary;

pub use checks::{
    check_closure, check_equivalence_eso_inex, check_equivalence_inex_eso, check_nonempty_normal_form,
    check_operator, ClosureProperty,
};
pub use suites::{
    run_backward_suite, run_closure_suite, run_counterexample_suite, run_forward_suite, run_graph_suite,
    run_infinity_suite, run_mutation_suite, run_normal_form_suite, run_operator_suite, run_relativization_suite,
    MutationResult,
};

/// Bounds of an exhaustive check.
#[derive(Clone, Debug)]
pub struct CaseSpace {
    pub max_universe: usize,
    pub max_rows: usize,
    /// Team domain.
    pub domain: Vec<String>,
    /// Relational vocabulary of the models.
    pub vocab: Vocabulary,
    /// Seed for sampling when the space holds more than `cap` cases.
    pub seed: u64,
    pub cap: u64,
    pub nonempty_only: bool,
    pub budget: EvalBudget,
}

impl Default for CaseSpace {
    fn default() -> Self {
        CaseSpace {
            max_universe: 3,
            max_rows: 3,
            domain: vec!["x".into(), "y".into()],
            vocab: corpus::default_vocabulary(),
            seed: 0,
            cap: 5_000_000,
            nonempty_only: false,
            budget: EvalBudget::default(),
        }
    }
}

impl CaseSpace {
    pub fn new(max_universe: usize, max_rows: usize, domain: &[&str]) -> Self {
        CaseSpace {
            max_universe,
            max_rows,
            domain: domain.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn with_domain(mut self, domain: &[&str]) -> Self {
        self.domain = domain.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn nonempty(mut self) -> Self {
        self.nonempty_only = true;
        self
    }

    pub fn with_budget(mut self, budget: EvalBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_max_universe(mut self, n: usize) -> Self {
        self.max_universe = n;
        self
    }

    fn relations(&self) -> Vec<(String, usize)> {
        self.vocab.relations.iter().map(|(r, a)| (r.clone(), *a)).collect()
    }

    /// Number of models of size `n` over the relations in `symbols`.
    fn model_count(&self, n: usize, symbols: &[(String, usize)]) -> u64 {
        symbols.iter().map(|(_, a)| 1u64 << n.pow(*a as u32)).product()
    }

    fn teams(&self, n: usize) -> Vec<Team> {
        let rows: Vec<Vec<u8>> = all_tuples(n, self.domain.len()).collect();
        let low = if self.nonempty_only { 1 } else { 0 };
        (low..=self.max_rows.min(rows.len()))
            .flat_map(|size| rows.iter().cloned().combinations(size))
            .map(|rows| Team::from_rows(self.domain.clone(), rows).expect("rows over the domain"))
            .collect()
    }

    /// Total number of cases.
    pub fn size(&self) -> u64 {
        let rels = self.relations();
        (1..=self.max_universe).map(|n| self.model_count(n, &rels) * self.teams(n).len() as u64).sum()
    }
}

/// The `index`-th model of size `n` over `symbols`: bit `j` of the index
/// range of each relation, first relation lowest, sets its `j`-th tuple.
fn model_at(n: usize, symbols: &[(String, usize)], mut index: u64) -> Model {
    let mut m = Model::new(n).expect("nonempty universe");
    for (name, arity) in symbols {
        let slots = n.pow(*arity as u32);
        let bits = (0..slots).map(|j| index >> j & 1 == 1).collect();
        index >>= slots;
        m.set_relation(name, Relation::from_bits(n, *arity, bits)).expect("fresh symbol");
    }
    m
}

/// Every case of the space in enumeration order: universe size, then
/// model, then team. Spaces larger than `cap` are sampled with the seed.
pub fn enumerate_cases(space: &CaseSpace) -> Box<dyn Iterator<Item = (Model, Team)> + '_> {
    let rels = space.relations();
    if space.size() <= space.cap {
        return Box::new((1..=space.max_universe).flat_map(move |n| {
            let teams = space.teams(n);
            let rels = rels.clone();
            (0..space.model_count(n, &rels)).flat_map(move |i| {
                let m = model_at(n, &rels, i);
                teams.clone().into_iter().map(move |x| (m.clone(), x))
            })
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    let per_size: Vec<(u64, Vec<Team>)> = (1..=space.max_universe)
        .map(|n| {
            let teams = space.teams(n);
            (space.model_count(n, &rels) * teams.len() as u64, teams)
        })
        .collect();
    let total: u64 = per_size.iter().map(|(c, _)| c).sum();
    Box::new((0..space.cap).map(move |_| {
        let mut i = rng.gen_range(0..total);
        let mut n = 1;
        for (count, _) in &per_size {
            if i < *count {
                break;
            }
            i -= count;
            n += 1;
        }
        let teams = &per_size[n - 1].1;
        let t = (i % teams.len() as u64) as usize;
        (model_at(n, &rels, i / teams.len() as u64), teams[t].clone())
    }))
}

/// Models sharing a reduct, with the teams to check on them.
pub(crate) struct Batch {
    pub model: Model,
    pub weight: u64,
    pub teams: Arc<Vec<Team>>,
}

/// Batches covering the space for checks that only read `symbols`.
pub(crate) fn batches(space: &CaseSpace, symbols: &BTreeSet<String>) -> Vec<Batch> {
    let all = space.relations();
    let used: Vec<(String, usize)> = all.iter().filter(|(r, _)| symbols.contains(r)).cloned().collect();
    if space.size() > space.cap {
        let seen: Vec<String> = used.iter().map(|(r, _)| r.clone()).collect();
        return enumerate_cases(space)
            .map(|(m, x)| {
                let mut reduct = Model::new(m.size()).expect("nonempty universe");
                for r in &seen {
                    reduct.set_relation(r, m.relation(r).expect("declared").clone()).expect("fresh symbol");
                }
                Batch { model: reduct, weight: 1, teams: Arc::new(vec![x]) }
            })
            .collect();
    }
    let mut out = Vec::new();
    for n in 1..=space.max_universe {
        let teams = Arc::new(space.teams(n));
        let weight = space.model_count(n, &all) / space.model_count(n, &used);
        for i in 0..space.model_count(n, &used) {
            out.push(Batch { model: model_at(n, &used, i), weight, teams: teams.clone() });
        }
    }
    out
}

/// A failing case with everything needed to reproduce it.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Failure {
    pub formula: String,
    pub model: Value,
    pub team: Value,
    pub detail: String,
}

impl Failure {
    pub fn new(formula: impl Into<String>, m: &Model, team: Value, detail: impl Into<String>) -> Self {
        let model = serde_json::from_str(&model_to_json(m)).expect("model JSON");
        Failure { formula: formula.into(), model, team, detail: detail.into() }
    }
}

pub(crate) fn team_value(x: &Team) -> Value {
    serde_json::from_str(&team_to_json(x)).expect("team JSON")
}

/// Failures kept per report; the count in [`Report::failed`] is complete.
pub const MAX_RECORDED_FAILURES: usize = 100;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub suite: String,
    /// Cases checked, counting every full model of a shared reduct.
    pub cases: u64,
    pub failures: Vec<Failure>,
    /// Cases without a verdict because an evaluator ran out of budget.
    pub exhausted: u64,
    #[serde(skip)]
    pub failed: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), cases: 0, failures: Vec::new(), exhausted: 0, failed: 0 }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn record(&mut self, outcome: Outcome, weight: u64) {
        self.cases += weight;
        match outcome {
            Outcome::Pass => {}
            Outcome::Exhausted => self.exhausted += weight,
            Outcome::Fail(f) => {
                self.failed += 1;
                if self.failures.len() < MAX_RECORDED_FAILURES {
                    self.failures.push(*f);
                }
            }
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.cases += other.cases;
        self.exhausted += other.exhausted;
        self.failed += other.failed;
        let room = MAX_RECORDED_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report JSON")
    }

    /// One line: suite name, verdict and counts.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} cases, {} failures, {} exhausted)",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" },
            self.cases,
            self.failed,
            self.exhausted
        )
    }
}

pub enum Outcome {
    Pass,
    Fail(Box<Failure>),
    Exhausted,
}

/// Runs `check` on every batch in parallel and merges the outcomes in
/// enumeration order. With `stop_early`, batches not yet started are
/// skipped once a failure is seen.
pub(crate) fn run<F>(suite: &str, batches: &[Batch], stop_early: bool, check: F) -> Report
where
    F: Fn(&Batch) -> Vec<Outcome> + Sync,
{
    let stop = AtomicBool::new(false);
    let results: Vec<(u64, Vec<Outcome>)> = batches
        .par_iter()
        .map(|b| {
            if stop.load(Ordering::Relaxed) {
                return (b.weight, Vec::new());
            }
            let outcomes = check(b);
            if stop_early && outcomes.iter().any(|o| matches!(o, Outcome::Fail(_))) {
                stop.store(true, Ordering::Relaxed);
            }
            (b.weight, outcomes)
        })
        .collect();
    let mut report = Report::new(suite);
    for (weight, outcomes) in results {
        for o in outcomes {
            report.record(o, weight);
        }
    }
    report
}
