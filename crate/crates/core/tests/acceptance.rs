//! End-to-end acceptance run. Prints one line per criterion and exits non-zero
//! if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use advbayes::certify::{dual_value, duality_gap, AtomList};
use advbayes::conditions::{solve_first_order, EndpointKind, SecondOrder};
use advbayes::risk::{adversarial_risk, bayes_classifier, risk_gap_bound};
use advbayes::solver::{are_equivalent, solve, sweep, sweep_grid, SolveOptions, SolveReport};
use advbayes::{examples, Class, DistributionPair, Error, Exec, Interval, IntervalSet};
use common::{interval_set, pair, radius};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, detail: String::new() }
    }

    fn require(&mut self, ok: bool, what: impl AsRef<str>) {
        if !ok {
            self.pass = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what.as_ref());
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
    }
}

fn opts() -> SolveOptions {
    SolveOptions::default()
}

fn ray(lo: f64) -> IntervalSet {
    IntervalSet::from_interval(Interval::open(lo, f64::INFINITY))
}

fn is_ray_from(s: &IntervalSet, lo: f64, tol: f64) -> bool {
    s.components() == 1 && s.intervals()[0].hi == f64::INFINITY && (s.intervals()[0].lo - lo).abs() <= tol
}

fn is_symmetric(s: &IntervalSet, b: f64, tol: f64) -> bool {
    s.components() == 1 && (s.intervals()[0].lo + b).abs() <= tol && (s.intervals()[0].hi - b).abs() <= tol
}

fn positive_b_root(pair: &DistributionPair, eps: f64) -> f64 {
    let sols = solve_first_order(pair, eps, opts().grid_n, Exec::default()).expect("first-order scan");
    sols.b
        .iter()
        .filter(|c| c.kind == EndpointKind::B && c.second_order == SecondOrder::Pass && c.location > 0.0)
        .map(|c| c.location)
        .next()
        .unwrap_or(f64::NAN)
}

fn c1_equal_variances() -> Outcome {
    let mut o = Outcome::new();
    let p = examples::gaussians_equal_variances();
    for eps in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let r = solve(&p, eps, &opts()).unwrap();
        let ok = r.classes.len() == 1 && is_ray_from(&r.classes[0].representative, 1.0, 1e-8);
        o.require(
            ok,
            format!("eps={eps}: classes {:?}", r.representatives().iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        );
    }
    for eps in [1.1, 1.5] {
        let r = solve(&p, eps, &opts()).unwrap();
        let shapes = r.classes.len() == 2
            && r.classes.iter().any(|c| c.representative.is_real_line())
            && r.classes.iter().any(|c| c.representative.is_empty());
        o.require(shapes, format!("eps={eps}: expected classes {{R}} and {{empty}}"));
        for c in &r.classes {
            o.require((c.risk - 0.5).abs() <= 1e-9, format!("eps={eps}: class risk {}", c.risk));
        }
    }
    let risks = [ray(1.0), IntervalSet::real_line(), IntervalSet::empty()].map(|s| adversarial_risk(&p, &s, 1.0).total);
    let spread = risks.iter().cloned().fold(f64::MIN, f64::max) - risks.iter().cloned().fold(f64::MAX, f64::min);
    o.require(spread <= 1e-9, format!("eps=1: risk spread {spread:e}"));
    o
}

fn c2_equal_means() -> Outcome {
    let mut o = Outcome::new();
    let p = examples::gaussians_equal_means();
    for eps in [0.0, 0.5, 1.0] {
        let b = examples::equal_means_b(eps, 0.5, 2.0, 1.0);
        let root = positive_b_root(&p, eps);
        o.require((root - b).abs() <= 1e-8, format!("eps={eps}: root {root} vs closed form {b}"));
        let r = solve(&p, eps, &opts()).unwrap();
        let ok = r.classes.len() == 1 && is_symmetric(&r.classes[0].representative, b, 1e-8);
        o.require(ok, format!("eps={eps}: expected single class (-{b}, {b})"));
    }
    o
}

fn c3_non_uniqueness_all() -> Outcome {
    let mut o = Outcome::new();
    let p = examples::non_uniqueness_all();
    for eps in [0.1, 0.2, 0.3] {
        for y in [-eps, 0.0, eps] {
            let risk = adversarial_risk(&p, &ray(y), eps).total;
            let want = eps + 0.25 * (1.0 - eps);
            o.require((risk - want).abs() <= 1e-12, format!("eps={eps}, y={y}: {risk} vs {want}"));
        }
        let r = solve(&p, eps, &opts()).unwrap();
        o.require(!r.unique_up_to_degeneracy, format!("eps={eps}: reported unique"));
    }
    for eps in [0.35, 0.4] {
        let r = solve(&p, eps, &opts()).unwrap();
        let reps = r.representatives();
        let ok = reps.iter().any(|s| s.is_real_line()) && reps.iter().any(|s| s.is_empty());
        o.require(ok, format!("eps={eps}: R and empty set not both among the classes"));
    }
    o
}

fn random_union(rng: &mut StdRng, lo: f64, hi: f64) -> IntervalSet {
    let n = rng.random_range(1..=4);
    let mut cuts: Vec<f64> = (0..2 * n).map(|_| rng.random_range(lo..=hi)).collect();
    cuts.sort_by(f64::total_cmp);
    let ivs = cuts
        .chunks_exact(2)
        .map(|c| Interval::new(c[0], c[1], rng.random_bool(0.5), rng.random_bool(0.5)))
        .filter(|iv| !iv.is_empty())
        .collect();
    IntervalSet::from_intervals(ivs)
}

fn c4_degenerate() -> Outcome {
    let mut o = Outcome::new();
    let p = examples::degenerate();
    for eps in [0.05, 0.1] {
        let a1 = IntervalSet::open_union(&[(f64::NEG_INFINITY, -0.25 + eps), (0.25 - eps, f64::INFINITY)]);
        let risk = adversarial_risk(&p, &a1, eps).total;
        o.require((risk - 0.8 * eps).abs() <= 1e-12, format!("eps={eps}: risk {risk}"));
    }
    let grid = sweep_grid(0.05, 0.2, 13);
    let s = sweep(&p, &grid, &opts()).unwrap();
    let single: Vec<(f64, &IntervalSet)> =
        s.reports.iter().filter(|r| r.classes.len() == 1).map(|r| (r.epsilon, &r.classes[0].representative)).collect();
    let last_two = single.iter().filter(|(_, a)| a.components() == 2).map(|(e, _)| *e).fold(f64::NAN, f64::max);
    let first_r = single.iter().filter(|(_, a)| a.is_real_line()).map(|(e, _)| *e).fold(f64::NAN, f64::min);
    let switch_ok = last_two < 0.125 + 1e-9 && first_r > 0.125 - 1e-9 && first_r - last_two <= 2.0 * 0.0125 + 1e-9;
    o.require(switch_ok, format!("representative switch between {last_two} and {first_r}"));
    let rr = adversarial_risk(&p, &IntervalSet::real_line(), 0.125).total;
    let a1 = IntervalSet::open_union(&[(f64::NEG_INFINITY, -0.125), (0.125, f64::INFINITY)]);
    let ra = adversarial_risk(&p, &a1, 0.125).total;
    o.require((rr - 0.1).abs() <= 1e-12 && (ra - 0.1).abs() <= 1e-12, format!("eps=1/8: R gives {rr}, A1 gives {ra}"));
    o.note(format!("switch between eps={last_two} and eps={first_r}"));

    let eps = 0.2;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let r = IntervalSet::real_line();
    for i in 0..3 {
        let sub = random_union(&mut rng, -0.25 + eps, 0.25 - eps);
        let ok = are_equivalent(&p, eps, &r, &r.difference(&sub));
        o.require(ok, format!("subset {i} ({sub}) breaks equivalence"));
    }
    o
}

fn c5_strong_duality() -> Outcome {
    let mut o = Outcome::new();
    let cases = [
        ("gaussians_equal_variances", 0.5),
        ("gaussians_equal_means", 0.5),
        ("non_uniqueness_all", 0.2),
        ("degenerate", 0.05),
    ];
    for (name, eps) in cases {
        let p = examples::by_name(name).unwrap();
        let g = duality_gap(&p, eps, 1e-3, 2, Exec::default()).unwrap();
        let r = solve(&p, eps, &opts()).unwrap();
        let solver_gap = r.min_risk - g.dual;
        o.require(g.gap.abs() <= 5e-3, format!("{name}: primal - dual = {:e}", g.gap));
        o.require(solver_gap.abs() <= 5e-3, format!("{name}: solver - dual = {solver_gap:e}"));
        o.note(format!("{name}@{eps}: primal-dual {:.1e}, solver-dual {:.1e}", g.gap, solver_gap));
    }
    o
}

fn c6_atomic_dual() -> Outcome {
    let mut o = Outcome::new();
    for eps in [0.0, 0.1, 0.25, 0.5, 1.0, 3.0] {
        let c0 = AtomList::new(Class::Zero, vec![-eps], vec![0.5]).unwrap();
        let c1 = AtomList::new(Class::One, vec![eps], vec![0.5]).unwrap();
        let d = dual_value(&c0, &c1, eps, 0.0).unwrap().dual_value;
        o.require(d == 0.5, format!("eps={eps}: dual {d}"));
    }
    o
}

fn run_suite<S, F>(name: &str, strategy: S, test: F, o: &mut Outcome)
where
    S: proptest::strategy::Strategy,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    if let Err(e) = runner.run(&strategy, test) {
        o.require(false, format!("{name}: {e}"));
    }
}

fn c7_properties() -> Outcome {
    let mut o = Outcome::new();
    run_suite(
        "interval algebra",
        (interval_set(), interval_set(), radius(), radius()),
        |(a, b, e1, e2)| {
            let open = a.contract(e1).expand(e1);
            let close = a.expand(e1).contract(e1);
            proptest::prop_assert!(open.is_subset(&a) && a.is_subset(&close));
            proptest::prop_assert_eq!(open.contract(e1).expand(e1), open.clone());
            proptest::prop_assert_eq!(close.expand(e1).contract(e1), close);
            proptest::prop_assert_eq!(a.expand(e1 + e2), a.expand(e1).expand(e2));
            proptest::prop_assert_eq!(a.contract(e1 + e2), a.contract(e1).contract(e2));
            proptest::prop_assert_eq!(a.contract(e1), a.complement().expand(e1).complement());
            proptest::prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            proptest::prop_assert_eq!(a.union(&b).expand(e1), a.expand(e1).union(&b.expand(e1)));
            proptest::prop_assert!(a.intersect(&b).expand(e1).is_subset(&a.expand(e1).intersect(&b.expand(e1))));
            for iv in open.intervals() {
                proptest::prop_assert!(iv.length() >= 2.0 * e1);
            }
            Ok(())
        },
        &mut o,
    );
    run_suite(
        "risk monotone in eps",
        (pair(), interval_set(), radius(), radius()),
        |(p, a, e1, e2)| {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            proptest::prop_assert!(adversarial_risk(&p, &a, hi).total >= adversarial_risk(&p, &a, lo).total - 1e-12);
            Ok(())
        },
        &mut o,
    );
    run_suite(
        "regularization",
        (pair(), interval_set(), radius()),
        |(p, a, e)| {
            let r = adversarial_risk(&p, &a, e).total;
            proptest::prop_assert!(adversarial_risk(&p, &a.contract(e).expand(e), e).total <= r + 1e-12);
            proptest::prop_assert!(adversarial_risk(&p, &a.expand(e).contract(e), e).total <= r + 1e-12);
            Ok(())
        },
        &mut o,
    );
    run_suite(
        "subadditivity",
        (pair(), interval_set(), interval_set(), radius()),
        |(p, a, b, e)| {
            let lhs = adversarial_risk(&p, &a.union(&b), e).total + adversarial_risk(&p, &a.intersect(&b), e).total;
            let rhs = adversarial_risk(&p, &a, e).total + adversarial_risk(&p, &b, e).total;
            proptest::prop_assert!(lhs <= rhs + 1e-12, "{} > {}", lhs, rhs);
            Ok(())
        },
        &mut o,
    );
    o
}

fn c8_monotonicity() -> Outcome {
    let mut o = Outcome::new();
    let sweeps = [
        ("gaussians_equal_variances", sweep_grid(0.1, 1.5, 15)),
        ("gaussians_equal_means", sweep_grid(0.0, 1.0, 11)),
        ("non_uniqueness_all", sweep_grid(0.05, 0.45, 9)),
        ("degenerate", sweep_grid(0.05, 0.2, 13)),
    ];
    for (name, grid) in sweeps {
        let p = examples::by_name(name).unwrap();
        let s = sweep(&p, &grid, &opts()).unwrap();
        let (mut checked, mut skipped) = (0, 0);
        for step in &s.steps {
            match &step.check {
                Some(c) => {
                    checked += 1;
                    o.require(c.holds, format!("{name} {}->{}: {}", c.eps1, c.eps2, c.violations.join(", ")));
                }
                None => skipped += 1,
            }
        }
        o.note(format!("{name}: {checked} checked, {skipped} skipped"));
    }
    o
}

fn c9_disputed_values() -> Outcome {
    let mut o = Outcome::new();
    for (name, eps) in
        [("non_uniqueness_single", vec![0.1, 0.2]), ("deg_eta_0_1_counterexample", vec![examples::DEG_ETA_SCALE])]
    {
        let p = examples::by_name(name).unwrap();
        for e in eps {
            let r = solve(&p, e, &opts()).unwrap();
            let b = advbayes::certify::primal_bruteforce(&p, e, 1e-3, 2, Exec::default()).unwrap();
            let d = (r.min_risk - b.min_risk).abs();
            o.require(d <= 2e-3, format!("{name}@{e}: solver {} vs brute force {}", r.min_risk, b.min_risk));
        }
        let report = examples::run_example(name, Exec::default()).unwrap();
        let stated: Vec<_> = report.checks.iter().filter(|c| c.stated.is_some()).collect();
        o.require(!stated.is_empty(), format!("{name}: no stated values recorded"));
        for c in &stated {
            o.require(
                c.computed.is_finite() && c.expected.is_finite(),
                format!("{name}: {} lacks a computed value", c.name),
            );
        }
        let json = advbayes::report::to_canonical_json(&report).unwrap();
        o.require(
            json.contains("\"stated\":\"") && json.contains("\"computed\":"),
            format!("{name}: JSON lacks values"),
        );
        o.note(format!("{name}: {} stated values echoed", stated.len()));
    }
    o
}

fn gap_case(p: &DistributionPair, r: &SolveReport, o: &mut Outcome, label: &str) -> bool {
    let bayes = bayes_classifier(p).unwrap();
    let k = p.sup_bound(Class::Zero).max(p.sup_bound(Class::One));
    let a = &r.classes[0].representative;
    match risk_gap_bound(p, a, &bayes, r.epsilon, k, bayes.components()) {
        Ok(g) => {
            o.require(g.holds, format!("{label}: gap {} > bound {}", g.gap, g.bound));
            true
        }
        Err(Error::EndpointMismatch(_)) => false,
        Err(e) => {
            o.require(false, format!("{label}: {e}"));
            false
        }
    }
}

fn c10_risk_gap() -> Outcome {
    let mut o = Outcome::new();
    let mut matched = 0;
    let mut unmatched = Vec::new();
    let p = examples::gaussians_equal_variances();
    for eps in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let r = solve(&p, eps, &opts()).unwrap();
        let ok = gap_case(&p, &r, &mut o, &format!("equal variances eps={eps}"));
        o.require(ok, format!("equal variances eps={eps}: components not matched"));
        matched += ok as usize;
    }
    let p = examples::gaussians_equal_means();
    for eps in [0.0, 0.5, 1.0] {
        let r = solve(&p, eps, &opts()).unwrap();
        if gap_case(&p, &r, &mut o, &format!("equal means eps={eps}")) {
            matched += 1;
        } else {
            unmatched.push(eps);
        }
    }
    o.require(matched >= 6, format!("only {matched} matched cases"));
    o.note(format!("{matched} matched cases; equal means endpoints move more than eps at {unmatched:?}"));
    o
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("gaussian equal variances", c1_equal_variances, Some(Duration::from_secs(5))),
        ("gaussian equal means", c2_equal_means, Some(Duration::from_secs(5))),
        ("non-uniqueness for every radius", c3_non_uniqueness_all, Some(Duration::from_secs(5))),
        ("degenerate sets", c4_degenerate, Some(Duration::from_secs(10))),
        ("strong duality", c5_strong_duality, Some(Duration::from_secs(120))),
        ("atomic dual", c6_atomic_dual, None),
        ("property suites", c7_properties, Some(Duration::from_secs(60))),
        ("structural monotonicity", c8_monotonicity, None),
        ("disputed values", c9_disputed_values, None),
        ("risk gap bound", c10_risk_gap, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if let Some(limit) = limit {
            o.require(took <= *limit, format!("took {took:.2?}, limit {limit:?}"));
        }
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {verdict} {name} ({took:.2?}) {}", i + 1, o.detail);
        failed += !o.pass as usize;
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
