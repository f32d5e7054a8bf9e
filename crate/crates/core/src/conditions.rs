//! Solutions of the first-order endpoint conditions
//!
//! ```text
//! g_a(x) = p₁(x+ε) − p₀(x−ε) = 0      (left endpoints)
//! g_b(x) = p₀(x+ε) − p₁(x−ε) = 0      (right endpoints)
//! ```
//!
//! and their second-order filters `p₁'(x+ε) − p₀'(x−ε) ≥ 0`,
//! `p₀'(x+ε) − p₁'(x−ε) ≥ 0`.
//!
//! The scan combines a uniform grid with every breakpoint shifted by `±ε`.
//! Isolated roots are bracketed and bisected, runs of grid zeros become
//! plateaus, and each density discontinuity contributes a candidate at its
//! `±ε` shift because the conditions cannot be differentiated there.

use serde::{Deserialize, Serialize};

use crate::density::{Class, DistributionPair};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::par::Exec;
use crate::poly::bisect_sign;
use crate::risk::bayes_classifier;

pub const TAU_ROOT: f64 = 1e-10;
pub const TAU_PLATEAU: f64 = 1e-11;
pub const TAU_DERIV: f64 = 1e-10;
pub const MAX_CANDIDATES_PER_KIND: usize = 64;
pub const MIN_GRID_N: usize = 64;
/// Distance below which a point counts as sitting on a (shifted) breakpoint.
pub const BREAKPOINT_TOL: f64 = 1e-9;
const ROOT_XTOL: f64 = 1e-12;
/// Gaussian components are scanned out to this many standard deviations.
const HULL_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EndpointKind {
    #[serde(rename = "A_ENDPOINT")]
    A,
    #[serde(rename = "B_ENDPOINT")]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SecondOrder {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePoint {
    pub kind: EndpointKind,
    pub location: f64,
    /// Set when the point is an end of a continuum of solutions.
    pub plateau: Option<Interval>,
    pub second_order: SecondOrder,
    pub residual: f64,
    /// The point is a density discontinuity shifted by `±ε`; its residual
    /// measures a jump rather than a root.
    pub at_breakpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub window: IntervalSet,
    pub support_is_interval: bool,
}

/// Where finite endpoints of a regular minimizer can lie: the interior of the
/// `ε`-contracted support when the support is an interval, otherwise the
/// interior of the expanded support.
pub fn scan_window(pair: &DistributionPair, eps: f64) -> ScanWindow {
    let support = pair.support();
    let support_is_interval = support.components() == 1;
    let window = if support_is_interval { support.contract(eps).interior() } else { support.expand(eps).interior() };
    ScanWindow { window, support_is_interval }
}

/// The two terms of `g` for the given kind.
fn terms(pair: &DistributionPair, eps: f64, kind: EndpointKind, x: f64) -> (f64, f64) {
    match kind {
        EndpointKind::A => (pair.p1(x + eps), pair.p0(x - eps)),
        EndpointKind::B => (pair.p0(x + eps), pair.p1(x - eps)),
    }
}

pub fn first_order_defect(pair: &DistributionPair, eps: f64, kind: EndpointKind, x: f64) -> f64 {
    let (t1, t2) = terms(pair, eps, kind, x);
    t1 - t2
}

fn is_plateau_point(t1: f64, t2: f64) -> bool {
    (t1 == 0.0 && t2 == 0.0) || (t1 - t2).abs() <= TAU_PLATEAU * (t1.abs() + t2.abs())
}

fn near_any(x: f64, pts: &[f64]) -> bool {
    pts.iter().any(|b| (x - b).abs() <= BREAKPOINT_TOL * (1.0 + b.abs()))
}

pub fn check_second_order(pair: &DistributionPair, eps: f64, x: f64, kind: EndpointKind) -> SecondOrder {
    let (plus, minus) = match kind {
        EndpointKind::A => (Class::One, Class::Zero),
        EndpointKind::B => (Class::Zero, Class::One),
    };
    if near_any(x + eps, &pair.class_breakpoints(plus)) || near_any(x - eps, &pair.class_breakpoints(minus)) {
        return SecondOrder::Inconclusive;
    }
    let (d1, d2) = match (pair.derivative(plus, x + eps), pair.derivative(minus, x - eps)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return SecondOrder::Inconclusive,
    };
    if d1 - d2 >= -TAU_DERIV {
        SecondOrder::Pass
    } else {
        SecondOrder::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderSolutions {
    pub a: Vec<CandidatePoint>,
    pub b: Vec<CandidatePoint>,
    pub window: ScanWindow,
    pub truncated: bool,
}

/// Points `x` where `x ± ε` hits a density discontinuity that matters for the
/// given kind.
fn breakpoint_shifts(pair: &DistributionPair, eps: f64, kind: EndpointKind) -> Vec<f64> {
    let d0 = pair.discontinuities(Class::Zero);
    let d1 = pair.discontinuities(Class::One);
    let mut v: Vec<f64> = match kind {
        EndpointKind::A => d0.iter().map(|d| d + eps).chain(d1.iter().map(|d| d - eps)).collect(),
        EndpointKind::B => d0.iter().map(|d| d - eps).chain(d1.iter().map(|d| d + eps)).collect(),
    };
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// All breakpoints shifted by `±ε`, including continuous kinks.
fn all_shifts(pair: &DistributionPair, eps: f64) -> Vec<f64> {
    let mut v: Vec<f64> = pair.breakpoints().iter().flat_map(|b| [b - eps, b + eps]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn snap_to(x: f64, pts: &[f64]) -> f64 {
    pts.iter()
        .copied()
        .filter(|b| (x - b).abs() <= BREAKPOINT_TOL * (1.0 + b.abs()))
        .min_by(|a, b| (x - a).abs().total_cmp(&(x - b).abs()))
        .unwrap_or(x)
}

/// Finite scan range for one window component.
fn clip_range(pair: &DistributionPair, eps: f64, iv: &Interval) -> Option<(f64, f64)> {
    let (hl, hh) = pair.hull(HULL_SIGMAS);
    let lo = iv.lo.max(hl - eps);
    let hi = iv.hi.min(hh + eps);
    (lo < hi).then_some((lo, hi))
}

fn scan_kind(
    pair: &DistributionPair,
    eps: f64,
    kind: EndpointKind,
    window: &IntervalSet,
    grid_n: usize,
    exec: Exec,
) -> Vec<CandidatePoint> {
    let shifts = all_shifts(pair, eps);
    let jumps = breakpoint_shifts(pair, eps, kind);
    let g = |x: f64| first_order_defect(pair, eps, kind, x);
    let plateau_at = |x: f64| {
        let (t1, t2) = terms(pair, eps, kind, x);
        is_plateau_point(t1, t2)
    };
    let mut found: Vec<CandidatePoint> = Vec::new();
    let mk = |x: f64, plateau: Option<Interval>| {
        let at_breakpoint = near_any(x, &jumps);
        CandidatePoint {
            kind,
            location: x,
            plateau,
            second_order: check_second_order(pair, eps, x, kind),
            residual: g(x),
            at_breakpoint,
        }
    };

    for iv in window.intervals() {
        let Some((lo, hi)) = clip_range(pair, eps, iv) else { continue };
        let mut xs: Vec<f64> = (0..grid_n).map(|i| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64).collect();
        xs.extend(shifts.iter().copied().filter(|s| *s > lo && *s < hi));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let vals: Vec<(f64, f64)> = exec.map(&xs, |&x| terms(pair, eps, kind, x));
        let flat: Vec<bool> = vals.iter().map(|&(a, b)| is_plateau_point(a, b)).collect();
        let gv: Vec<f64> = vals.iter().map(|&(a, b)| a - b).collect();
        let inside = |x: f64| iv.contains(x);

        let n = xs.len();
        let mut i = 0;
        while i < n {
            if flat[i] {
                let s = i;
                while i + 1 < n && flat[i + 1] {
                    i += 1;
                }
                let e = i;
                if e > s {
                    let left = if s == 0 { xs[0] } else { refine_edge(&plateau_at, xs[s - 1], xs[s], true) };
                    let right = if e + 1 == n { xs[n - 1] } else { refine_edge(&plateau_at, xs[e], xs[e + 1], false) };
                    let left = snap_to(left, &shifts);
                    let right = snap_to(right, &shifts);
                    let plateau = Interval::closed(left, right);
                    for x in [left, right] {
                        if inside(x) {
                            found.push(mk(x, Some(plateau)));
                        }
                    }
                } else if inside(xs[s]) {
                    found.push(mk(xs[s], None));
                }
                i += 1;
                continue;
            }
            if i + 1 < n && !flat[i + 1] && gv[i] * gv[i + 1] < 0.0 {
                let r = bisect_sign(g, xs[i], xs[i + 1], gv[i], ROOT_XTOL);
                let r = snap_to(r, &shifts);
                if inside(r) && g(r).abs() <= TAU_ROOT {
                    found.push(mk(r, None));
                }
            }
            i += 1;
        }
        for &x in &jumps {
            if inside(x) && x >= lo && x <= hi {
                found.push(mk(x, None));
            }
        }
    }
    merge_candidates(found)
}

/// Bisects the boundary of the plateau predicate between a non-plateau point
/// and a plateau point.
fn refine_edge(flat: &dyn Fn(f64) -> bool, a: f64, b: f64, plateau_on_right: bool) -> f64 {
    let (mut outside, mut inside) = if plateau_on_right { (a, b) } else { (b, a) };
    for _ in 0..200 {
        let m = 0.5 * (outside + inside);
        if m == outside || m == inside || (outside - inside).abs() <= ROOT_XTOL * 1e-2 {
            break;
        }
        if flat(m) {
            inside = m;
        } else {
            outside = m;
        }
    }
    inside
}

/// Sorts and merges candidates that coincide within the breakpoint tolerance.
fn merge_candidates(mut v: Vec<CandidatePoint>) -> Vec<CandidatePoint> {
    v.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut out: Vec<CandidatePoint> = Vec::with_capacity(v.len());
    for c in v {
        match out.last_mut() {
            Some(prev) if (c.location - prev.location).abs() <= BREAKPOINT_TOL * (1.0 + prev.location.abs()) => {
                if prev.plateau.is_none() {
                    prev.plateau = c.plateau;
                }
                if c.at_breakpoint && !prev.at_breakpoint {
                    prev.at_breakpoint = true;
                    prev.location = c.location;
                    prev.residual = c.residual;
                    prev.second_order = c.second_order;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Scans both endpoint conditions over the scan window.
pub fn solve_first_order(pair: &DistributionPair, eps: f64, grid_n: usize, exec: Exec) -> Result<FirstOrderSolutions> {
    if grid_n < MIN_GRID_N {
        return Err(Error::InvalidArgument(format!("grid_n must be at least 64, got {grid_n}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and non-negative, got {eps}")));
    }
    let window = scan_window(pair, eps);
    if window.window.is_empty() {
        return Err(Error::WindowEmpty);
    }
    let mut a = scan_kind(pair, eps, EndpointKind::A, &window.window, grid_n, exec);
    let mut b = scan_kind(pair, eps, EndpointKind::B, &window.window, grid_n, exec);
    let truncated = a.len() > MAX_CANDIDATES_PER_KIND || b.len() > MAX_CANDIDATES_PER_KIND;
    a.truncate(MAX_CANDIDATES_PER_KIND);
    b.truncate(MAX_CANDIDATES_PER_KIND);
    Ok(FirstOrderSolutions { a, b, window, truncated })
}

/// Sign changes of `g` on a grid `factor` times finer than `grid_n` that are
/// not within two coarse grid steps of a reported candidate or plateau. Brackets
/// straddling a shifted breakpoint are jumps, not roots, and are skipped.
pub fn unexplained_sign_changes(
    pair: &DistributionPair,
    eps: f64,
    kind: EndpointKind,
    sols: &FirstOrderSolutions,
    grid_n: usize,
    factor: usize,
) -> Vec<f64> {
    let cands = match kind {
        EndpointKind::A => &sols.a,
        EndpointKind::B => &sols.b,
    };
    let shifts = all_shifts(pair, eps);
    let mut out = Vec::new();
    for iv in sols.window.window.intervals() {
        let Some((lo, hi)) = clip_range(pair, eps, iv) else { continue };
        let coarse = (hi - lo) / (grid_n - 1) as f64;
        let m = grid_n * factor;
        let xs: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
        let gv: Vec<f64> = xs.iter().map(|&x| first_order_defect(pair, eps, kind, x)).collect();
        for i in 0..m - 1 {
            if gv[i] * gv[i + 1] < 0.0 {
                let (x0, x1) = (xs[i], xs[i + 1]);
                let jump = shifts.iter().any(|&b| b >= x0 && b <= x1);
                let explained = jump
                    || cands.iter().any(|c| {
                        let near = |x: f64| x >= x0 - 2.0 * coarse && x <= x1 + 2.0 * coarse;
                        near(c.location) || c.plateau.is_some_and(|p| p.lo <= x1 && p.hi >= x0)
                    });
                if !explained {
                    out.push(0.5 * (x0 + x1));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proximity {
    pub kind: EndpointKind,
    pub location: f64,
    pub nearest_bayes_boundary: Option<f64>,
    pub distance: f64,
    pub within_eps: bool,
}

/// Distance from each candidate to the boundary of the Bayes classifier.
pub fn bayes_boundary_proximity(
    pair: &DistributionPair,
    eps: f64,
    candidates: &[CandidatePoint],
) -> Result<Vec<Proximity>> {
    let boundary = bayes_classifier(pair)?.finite_endpoints();
    Ok(candidates
        .iter()
        .map(|c| {
            let nearest =
                boundary.iter().copied().min_by(|a, b| (c.location - a).abs().total_cmp(&(c.location - b).abs()));
            let distance = nearest.map_or(f64::INFINITY, |z| (c.location - z).abs());
            Proximity {
                kind: c.kind,
                location: c.location,
                nearest_bayes_boundary: nearest,
                distance,
                within_eps: distance <= eps + BREAKPOINT_TOL,
            }
        })
        .collect())
}
