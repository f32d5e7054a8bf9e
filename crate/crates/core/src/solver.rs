//! Enumerates regular candidate classifiers built from first-order solutions,
//! keeps the risk minimizers, and groups them into equivalence classes.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::conditions::{
    bayes_boundary_proximity, solve_first_order, CandidatePoint, EndpointKind, Proximity, ScanWindow, SecondOrder,
};
use crate::density::{Class, DistributionPair};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::par::Exec;
use crate::risk::{adversarial_risk, RiskBreakdown, TAU_RISK};

pub const MAX_CLASSIFIERS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub grid_n: usize,
    /// Keep endpoints that fail the second-order test.
    pub keep_all: bool,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { grid_n: 2048, keep_all: false, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateClassifier {
    pub set: IntervalSet,
    pub risk: RiskBreakdown,
    pub regular: bool,
    /// No endpoint failed the second-order test.
    pub second_order_clean: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateReport {
    /// Components of `A` and `Aᶜ` of length at most `2ε`.
    pub small_components: IntervalSet,
    /// `closure((supp ℙ^ε)ᶜ) ∪ ∂A`.
    pub maximal_degenerate: IntervalSet,
    /// The support is an interval and `ℙ(η ∈ {0, 1}) = 0`.
    pub assumptions_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub representative: IntervalSet,
    pub members: Vec<CandidateClassifier>,
    pub degenerate_core: IntervalSet,
    /// Intervals between consecutive candidate points whose toggling keeps the
    /// representative optimal and equivalent.
    pub degenerate_intervals: Vec<Interval>,
    pub degenerate: DegenerateReport,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauCheck {
    pub kind: EndpointKind,
    pub plateau: Interval,
    pub minimizer: IntervalSet,
    pub interior_points: Vec<f64>,
    pub risks: Vec<f64>,
    pub all_minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub epsilon: f64,
    pub window: Option<ScanWindow>,
    pub a_points: Vec<CandidatePoint>,
    pub b_points: Vec<CandidatePoint>,
    pub candidates: Vec<CandidateClassifier>,
    pub minimizers: Vec<CandidateClassifier>,
    pub classes: Vec<EquivalenceClass>,
    pub unique_up_to_degeneracy: bool,
    pub min_risk: f64,
    pub plateau_checks: Vec<PlateauCheck>,
    pub proximity: Vec<Proximity>,
    pub truncated: bool,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn has_minimizer(&self, set: &IntervalSet) -> bool {
        self.minimizers.iter().any(|m| &m.set == set)
    }

    pub fn representatives(&self) -> Vec<&IntervalSet> {
        self.classes.iter().map(|c| &c.representative).collect()
    }
}

/// Endpoint list with infinities, used for deterministic ordering.
fn endpoint_key(s: &IntervalSet) -> Vec<f64> {
    s.intervals().iter().flat_map(|iv| [iv.lo, iv.hi]).collect()
}

fn cmp_sets(a: &IntervalSet, b: &IntervalSet) -> Ordering {
    let (ka, kb) = (endpoint_key(a), endpoint_key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    ka.len().cmp(&kb.len())
}

#[derive(Debug, Clone, Copy)]
struct Endpoint {
    x: f64,
    kind: EndpointKind,
    verdict: SecondOrder,
}

fn build_set(seq: &[Endpoint]) -> IntervalSet {
    let mut ivs = Vec::new();
    let mut i = 0;
    if let Some(first) = seq.first() {
        if first.kind == EndpointKind::B {
            ivs.push(Interval::open(f64::NEG_INFINITY, first.x));
            i = 1;
        }
    }
    while i < seq.len() {
        let a = seq[i].x;
        let b = seq.get(i + 1).map_or(f64::INFINITY, |e| e.x);
        ivs.push(Interval::open(a, b));
        i += 2;
    }
    IntervalSet::from_intervals(ivs)
}

/// All open regular sets `⋃(aᵢ, bᵢ)` whose finite endpoints alternate between
/// the given left and right endpoint candidates with every gap longer than
/// `2ε`, plus `∅` and `ℝ`. Returns the sets and whether the cap was hit.
pub fn enumerate_candidates(a_points: &[f64], b_points: &[f64], eps: f64, cap: usize) -> (Vec<IntervalSet>, bool) {
    let pts: Vec<Endpoint> = a_points
        .iter()
        .map(|&x| Endpoint { x, kind: EndpointKind::A, verdict: SecondOrder::Pass })
        .chain(b_points.iter().map(|&x| Endpoint { x, kind: EndpointKind::B, verdict: SecondOrder::Pass }))
        .collect();
    let (sets, truncated) = enumerate_sequences(&pts, eps, cap);
    (sets.into_iter().map(|(s, _)| s).collect(), truncated)
}

fn enumerate_sequences(points: &[Endpoint], eps: f64, cap: usize) -> (Vec<(IntervalSet, bool)>, bool) {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.kind.cmp(&q.kind)));
    pts.dedup_by(|p, q| p.x == q.x && p.kind == q.kind);

    let mut out: Vec<(IntervalSet, bool)> = vec![(IntervalSet::empty(), true), (IntervalSet::real_line(), true)];
    let mut truncated = false;
    let mut stack: Vec<Endpoint> = Vec::new();

    fn dfs(
        pts: &[Endpoint],
        from: usize,
        eps: f64,
        cap: usize,
        stack: &mut Vec<Endpoint>,
        out: &mut Vec<(IntervalSet, bool)>,
        truncated: &mut bool,
    ) {
        for j in from..pts.len() {
            if *truncated {
                return;
            }
            let p = pts[j];
            if let Some(last) = stack.last() {
                if p.kind == last.kind || !(p.x - last.x > 2.0 * eps) {
                    continue;
                }
            }
            stack.push(p);
            if out.len() >= cap {
                *truncated = true;
                stack.pop();
                return;
            }
            let clean = stack.iter().all(|e| e.verdict != SecondOrder::Fail);
            out.push((build_set(stack), clean));
            dfs(pts, j + 1, eps, cap, stack, out, truncated);
            stack.pop();
        }
    }
    dfs(&pts, 0, eps, cap, &mut stack, &mut out, &mut truncated);

    out.sort_by(|a, b| cmp_sets(&a.0, &b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    (out, truncated)
}

/// Equality of `S_ε`-images: the `ℙ₀` mass of `A₁^ε △ A₂^ε` or the `ℙ₁` mass of
/// `(A₁ᶜ)^ε △ (A₂ᶜ)^ε` is negligible.
pub fn are_equivalent(pair: &DistributionPair, eps: f64, a1: &IntervalSet, a2: &IntervalSet) -> bool {
    let d0 = a1.expand(eps).sym_diff(&a2.expand(eps));
    if pair.mass_set(Class::Zero, &d0) <= TAU_RISK {
        return true;
    }
    let d1 = a1.complement().expand(eps).sym_diff(&a2.complement().expand(eps));
    pair.mass_set(Class::One, &d1) <= TAU_RISK
}

pub fn degenerate_report(pair: &DistributionPair, eps: f64, a: &IntervalSet) -> DegenerateReport {
    let small = |s: &IntervalSet| -> Vec<Interval> {
        s.intervals().iter().filter(|iv| iv.is_bounded() && iv.length() <= 2.0 * eps).copied().collect()
    };
    let mut comps = small(a);
    comps.extend(small(&a.complement()));
    let support = pair.support();
    let maximal = support.expand(eps).complement().closure().union(&a.boundary());
    DegenerateReport {
        small_components: IntervalSet::from_intervals(comps),
        maximal_degenerate: maximal,
        assumptions_met: support.components() == 1 && !pair.eta_01_positive_mass(),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Replaces endpoint `x` of the given kind in `set` by `y`.
fn move_endpoint(set: &IntervalSet, x: f64, kind: EndpointKind, y: f64) -> Option<IntervalSet> {
    let mut ivs = set.intervals().to_vec();
    let mut hit = false;
    for iv in ivs.iter_mut() {
        match kind {
            EndpointKind::A if iv.lo == x => {
                iv.lo = y;
                hit = true;
            }
            EndpointKind::B if iv.hi == x => {
                iv.hi = y;
                hit = true;
            }
            _ => {}
        }
    }
    let moved = IntervalSet::from_intervals(ivs);
    (hit && moved.components() == set.components()).then_some(moved)
}

/// Runs the full pipeline at one radius.
pub fn solve(pair: &DistributionPair, eps: f64, opts: &SolveOptions) -> Result<SolveReport> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and non-negative, got {eps}")));
    }
    let mut warnings = Vec::new();
    let mut truncated = false;
    let (a_points, b_points, window) = match solve_first_order(pair, eps, opts.grid_n, opts.exec) {
        Ok(s) => {
            if !s.window.support_is_interval {
                warnings.push("support is not an interval; scanning the expanded support instead".to_string());
            }
            if s.truncated {
                truncated = true;
                warnings.push(format!(
                    "more than {} first-order solutions of one kind; list truncated",
                    crate::conditions::MAX_CANDIDATES_PER_KIND
                ));
            }
            (s.a, s.b, Some(s.window))
        }
        Err(Error::WindowEmpty) => {
            warnings.push("scan window is empty; only the empty set and the real line are candidates".to_string());
            (Vec::new(), Vec::new(), None)
        }
        Err(e) => return Err(e),
    };

    let endpoints: Vec<Endpoint> = a_points
        .iter()
        .chain(&b_points)
        .filter(|c| opts.keep_all || c.second_order != SecondOrder::Fail)
        .map(|c| Endpoint { x: c.location, kind: c.kind, verdict: c.second_order })
        .collect();
    let (sets, hit_cap) = enumerate_sequences(&endpoints, eps, MAX_CLASSIFIERS);
    if hit_cap {
        truncated = true;
        warnings.push(format!("candidate classifiers capped at {MAX_CLASSIFIERS}"));
    }

    let candidates: Vec<CandidateClassifier> = opts.exec.map(&sets, |(set, clean)| CandidateClassifier {
        set: set.clone(),
        risk: adversarial_risk(pair, set, eps),
        regular: set.is_regular(eps),
        second_order_clean: *clean,
    });
    let min_risk = candidates.iter().map(|c| c.risk.total).fold(f64::INFINITY, f64::min);
    let minimizers: Vec<CandidateClassifier> =
        candidates.iter().filter(|c| c.risk.total <= min_risk + TAU_RISK).cloned().collect();

    let m = minimizers.len();
    let mut uf = UnionFind::new(m);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let eq = opts.exec.map(&pairs, |&(i, j)| are_equivalent(pair, eps, &minimizers[i].set, &minimizers[j].set));
    for (&(i, j), same) in pairs.iter().zip(eq) {
        if same {
            uf.union(i, j);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; m];
    for i in 0..m {
        let r = uf.find(i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let mut grid: Vec<f64> = a_points.iter().chain(&b_points).map(|c| c.location).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let classes: Vec<EquivalenceClass> = groups
        .into_iter()
        .map(|g| {
            let members: Vec<CandidateClassifier> = g.iter().map(|&i| minimizers[i].clone()).collect();
            let rep = members
                .iter()
                .min_by(|a, b| a.set.components().cmp(&b.set.components()).then_with(|| cmp_sets(&a.set, &b.set)))
                .map(|c| c.set.clone())
                .unwrap_or_default();
            let degenerate = degenerate_report(pair, eps, &rep);
            let degenerate_intervals: Vec<Interval> = grid
                .windows(2)
                .map(|w| Interval::closed(w[0], w[1]))
                .filter(|j| {
                    let toggled = rep.sym_diff(&IntervalSet::from_interval(*j));
                    adversarial_risk(pair, &toggled, eps).total <= min_risk + TAU_RISK
                        && are_equivalent(pair, eps, &rep, &toggled)
                })
                .collect();
            let degenerate_core =
                degenerate.maximal_degenerate.union(&IntervalSet::from_intervals(degenerate_intervals.clone()));
            EquivalenceClass {
                risk: members.iter().map(|c| c.risk.total).fold(f64::INFINITY, f64::min),
                representative: rep,
                members,
                degenerate_core,
                degenerate_intervals,
                degenerate,
            }
        })
        .collect();

    let mut plateau_checks = Vec::new();
    for c in a_points.iter().chain(&b_points) {
        let Some(plateau) = c.plateau else { continue };
        if !(plateau.length() > 0.0) {
            continue;
        }
        for mz in &minimizers {
            let Some(_) = move_endpoint(&mz.set, c.location, c.kind, c.location) else { continue };
            let pts: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|t| plateau.lo + t * plateau.length()).collect();
            let risks: Vec<f64> = pts
                .iter()
                .filter_map(|&y| move_endpoint(&mz.set, c.location, c.kind, y))
                .map(|s| adversarial_risk(pair, &s, eps).total)
                .collect();
            if risks.len() != pts.len() {
                continue;
            }
            let all_minimal = risks.iter().all(|r| *r <= min_risk + TAU_RISK);
            plateau_checks.push(PlateauCheck {
                kind: c.kind,
                plateau,
                minimizer: mz.set.clone(),
                interior_points: pts,
                risks,
                all_minimal,
            });
        }
    }
    plateau_checks.dedup_by(|a, b| a.kind == b.kind && a.plateau == b.plateau && a.minimizer == b.minimizer);

    let all_points: Vec<CandidatePoint> = a_points.iter().chain(&b_points).cloned().collect();
    let proximity = match bayes_boundary_proximity(pair, eps, &all_points) {
        Ok(p) => p,
        Err(e) => {
            warnings.push(format!("Bayes boundary unavailable: {e}"));
            Vec::new()
        }
    };

    Ok(SolveReport {
        epsilon: eps,
        window,
        a_points,
        b_points,
        unique_up_to_degeneracy: classes.len() == 1,
        min_risk,
        candidates,
        minimizers,
        classes,
        plateau_checks,
        proximity,
        truncated,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub eps1: f64,
    pub eps2: f64,
    pub holds: bool,
    pub violations: Vec<String>,
}

/// Checks that component counts inside the expanded support do not grow from
/// `report1` to `report2` and that no component of one representative swallows
/// a component of the other's complement. When both `ℝ` and `∅` minimize at
/// the smaller radius, only their persistence is checked.
pub fn check_monotonicity(
    pair: &DistributionPair,
    report1: &SolveReport,
    report2: &SolveReport,
) -> Result<MonotonicityCheck> {
    let (e1, e2) = (report1.epsilon, report2.epsilon);
    if !(e2 > e1) {
        return Err(Error::InvalidArgument(format!("need eps2 > eps1, got {e1} and {e2}")));
    }
    let support = pair.support();
    if support.components() != 1 {
        return Err(Error::AssumptionUnmet("support is not an interval".into()));
    }
    if pair.eta_01_positive_mass() {
        return Err(Error::AssumptionUnmet("eta takes the values 0 or 1 on a set of positive mass".into()));
    }
    let mut violations = Vec::new();
    let (r, e) = (IntervalSet::real_line(), IntervalSet::empty());
    if report1.has_minimizer(&r) && report1.has_minimizer(&e) {
        for (name, s) in [("R", &r), ("empty set", &e)] {
            if !report2.has_minimizer(s) {
                violations.push(format!("{name} minimizes at eps={e1} but not at eps={e2}"));
            }
        }
        return Ok(MonotonicityCheck { eps1: e1, eps2: e2, holds: violations.is_empty(), violations });
    }

    let i1 = support.expand(e1);
    let i2 = support.expand(e2);
    let contains = |outer: &Interval, inner: &Interval| outer.lo <= inner.lo && inner.hi <= outer.hi;
    for a1 in report1.representatives() {
        for a2 in report2.representatives() {
            let c1 = a1.intersect(&i1).components();
            let c2 = a2.intersect(&i2).components();
            let k1 = a1.complement().intersect(&i1).components();
            let k2 = a2.complement().intersect(&i2).components();
            if c1 < c2 {
                violations.push(format!("comp(A1 ∩ I) = {c1} < {c2} = comp(A2 ∩ I) for A1 = {a1}, A2 = {a2}"));
            }
            if k1 < k2 {
                violations.push(format!("comp(A1ᶜ ∩ I) = {k1} < {k2} = comp(A2ᶜ ∩ I) for A1 = {a1}, A2 = {a2}"));
            }
            let a1_in = a1.intersect(&i1);
            let a1_out = a1.complement().intersect(&i1);
            let a2_in = a2.intersect(&i1);
            let a2_out = a2.complement().intersect(&i1);
            for (outer, inner, what) in [(&a1_in, &a2_out, "A1"), (&a1_out, &a2_in, "A1ᶜ")] {
                for o in outer.intervals() {
                    for i in inner.intervals() {
                        if contains(o, i) {
                            violations.push(format!("component {o} of {what} ∩ I contains {i} (A1 = {a1}, A2 = {a2})"));
                        }
                    }
                }
            }
        }
    }
    Ok(MonotonicityCheck { eps1: e1, eps2: e2, holds: violations.is_empty(), violations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub eps1: f64,
    pub eps2: f64,
    pub check: Option<MonotonicityCheck>,
    /// Why the check was not run.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub reports: Vec<SolveReport>,
    pub steps: Vec<SweepStep>,
}

/// `steps` radii evenly spaced over `[lo, hi]`.
pub fn sweep_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Solves at every radius (in parallel) and checks monotonicity between
/// consecutive radii. Output is ordered as `eps`.
pub fn sweep(pair: &DistributionPair, eps: &[f64], opts: &SolveOptions) -> Result<SweepResult> {
    let reports = opts.exec.map(eps, |&e| solve(pair, e, opts)).into_iter().collect::<Result<Vec<_>>>()?;
    let steps = reports
        .windows(2)
        .map(|w| {
            let (eps1, eps2) = (w[0].epsilon, w[1].epsilon);
            match check_monotonicity(pair, &w[0], &w[1]) {
                Ok(c) => SweepStep { eps1, eps2, check: Some(c), skipped: None },
                Err(e) => SweepStep { eps1, eps2, check: None, skipped: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(SweepResult { reports, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityComponent;

    fn gauss_var() -> DistributionPair {
        DistributionPair::new(
            vec![DensityComponent::gaussian(0.5, 0.0, 1.0)],
            vec![DensityComponent::gaussian(0.5, 2.0, 1.0)],
        )
        .unwrap()
    }

    fn halves() -> DistributionPair {
        DistributionPair::new(
            vec![DensityComponent::step(vec![-1.0, 0.0, 1.0], &[0.375, 0.125])],
            vec![DensityComponent::step(vec![-1.0, 0.0, 1.0], &[0.125, 0.375])],
        )
        .unwrap()
    }

    fn degenerate() -> DistributionPair {
        DistributionPair::new(
            vec![DensityComponent::step(vec![-1.0, -0.25, 0.25, 1.0], &[0.0, 0.2, 0.0])],
            vec![DensityComponent::step(vec![-1.0, -0.25, 0.25, 1.0], &[0.6, 0.0, 0.6])],
        )
        .unwrap()
    }

    #[test]
    fn enumeration_basics() {
        let (s, t) = enumerate_candidates(&[], &[], 0.1, MAX_CLASSIFIERS);
        assert!(!t);
        assert_eq!(s.len(), 2);
        let (s, _) = enumerate_candidates(&[1.0], &[1.0], 0.5, MAX_CLASSIFIERS);
        assert_eq!(s.len(), 4);
        assert!(s.contains(&IntervalSet::from_interval(Interval::open(1.0, f64::INFINITY))));
        assert!(s.contains(&IntervalSet::from_interval(Interval::open(f64::NEG_INFINITY, 1.0))));
        // gap of exactly 2ε is rejected
        let (s, _) = enumerate_candidates(&[0.0], &[1.0], 0.5, MAX_CLASSIFIERS);
        assert!(!s.contains(&IntervalSet::open_union(&[(0.0, 1.0)])));
        let (s, _) = enumerate_candidates(&[0.0], &[1.0], 0.49, MAX_CLASSIFIERS);
        assert!(s.contains(&IntervalSet::open_union(&[(0.0, 1.0)])));
        for set in &s {
            assert!(set.is_regular(0.49));
        }
    }

    #[test]
    fn enumeration_cap() {
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| i as f64 + 0.5).collect();
        let (s, t) = enumerate_candidates(&a, &b, 0.01, 100);
        assert!(t);
        assert!(s.len() <= 100);
    }

    #[test]
    fn gaussian_unique_then_split() {
        let p = gauss_var();
        let r = solve(&p, 0.5, &SolveOptions::default()).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert!(r.unique_up_to_degeneracy);
        let rep = &r.classes[0].representative;
        assert_eq!(rep.components(), 1);
        assert!((rep.intervals()[0].lo - 1.0).abs() < 1e-10);
        let r = solve(&p, 1.5, &SolveOptions::default()).unwrap();
        assert_eq!(r.classes.len(), 2);
        assert!(r.has_minimizer(&IntervalSet::real_line()) && r.has_minimizer(&IntervalSet::empty()));
        assert!((r.min_risk - 0.5).abs() < 1e-9);
    }

    #[test]
    fn halves_family() {
        let p = halves();
        let r = solve(&p, 0.2, &SolveOptions::default()).unwrap();
        assert!((r.min_risk - 0.4).abs() < 1e-12);
        assert!(!r.unique_up_to_degeneracy);
        assert!(r.plateau_checks.iter().any(|c| c.all_minimal));
        let lo = IntervalSet::from_interval(Interval::open(-0.2, f64::INFINITY));
        let hi = IntervalSet::from_interval(Interval::open(0.2, f64::INFINITY));
        assert!(!are_equivalent(&p, 0.2, &lo, &hi));
        // closure under union and intersection
        for a in &r.minimizers {
            for b in &r.minimizers {
                assert!(adversarial_risk(&p, &a.set.union(&b.set), 0.2).total <= r.min_risk + TAU_RISK);
                assert!(adversarial_risk(&p, &a.set.intersect(&b.set), 0.2).total <= r.min_risk + TAU_RISK);
            }
        }
    }

    #[test]
    fn degenerate_interval_found() {
        let p = degenerate();
        let r = solve(&p, 0.2, &SolveOptions::default()).unwrap();
        assert!((r.min_risk - 0.1).abs() < 1e-12);
        assert_eq!(r.classes.len(), 1);
        let c = &r.classes[0];
        assert!(c.representative.is_real_line());
        assert!(!c.degenerate.assumptions_met);
        assert!(c.degenerate_intervals.iter().any(|j| (j.lo + 0.05).abs() < 1e-12 && (j.hi - 0.05).abs() < 1e-12));
        let s = IntervalSet::from_interval(Interval::closed(-0.05, 0.05)).complement();
        assert!(are_equivalent(&p, 0.2, &IntervalSet::real_line(), &s));
    }

    #[test]
    fn degenerate_report_small_components() {
        let p = gauss_var();
        let a = IntervalSet::open_union(&[(0.0, 1.0), (3.0, f64::INFINITY)]);
        let d = degenerate_report(&p, 0.5, &a);
        assert_eq!(d.small_components.components(), 1);
        assert!(d.assumptions_met);
        assert_eq!(d.maximal_degenerate.components(), 3);
    }

    #[test]
    fn monotone_gaussians() {
        let p = gauss_var();
        let opts = SolveOptions::default();
        let r1 = solve(&p, 0.3, &opts).unwrap();
        let r2 = solve(&p, 0.6, &opts).unwrap();
        assert!(check_monotonicity(&p, &r1, &r2).unwrap().holds);
        let d = degenerate();
        let q1 = solve(&d, 0.05, &opts).unwrap();
        let q2 = solve(&d, 0.1, &opts).unwrap();
        assert!(matches!(check_monotonicity(&d, &q1, &q2), Err(Error::AssumptionUnmet(_))));
    }
}
