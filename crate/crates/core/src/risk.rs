//! Standard and adversarial risks of interval classifiers, and the Bayes
//! classifier `{p₁ > p₀}`.

use serde::{Deserialize, Serialize};

use crate::density::{Class, DistributionPair, GaussianTerm};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::poly::bisect_sign;

/// Absolute tolerance for deciding that two risks tie.
pub const TAU_RISK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBreakdown {
    pub total: f64,
    /// `ℙ₁((Aᶜ)^ε)`
    #[serde(rename = "fn_mass")]
    pub false_negative_mass: f64,
    /// `ℙ₀(A^ε)`
    #[serde(rename = "fp_mass")]
    pub false_positive_mass: f64,
    pub epsilon: f64,
}

/// `R(A) = ℙ₁(Aᶜ) + ℙ₀(A)`.
pub fn standard_risk(pair: &DistributionPair, a: &IntervalSet) -> RiskBreakdown {
    adversarial_risk(pair, a, 0.0)
}

/// `R^ε(A) = ℙ₁((Aᶜ)^ε) + ℙ₀(A^ε)`.
pub fn adversarial_risk(pair: &DistributionPair, a: &IntervalSet, eps: f64) -> RiskBreakdown {
    let fn_mass = pair.mass_set(Class::One, &a.complement().expand(eps));
    let fp_mass = pair.mass_set(Class::Zero, &a.expand(eps));
    RiskBreakdown { total: fn_mass + fp_mass, false_negative_mass: fn_mass, false_positive_mass: fp_mass, epsilon: eps }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    In,
    Out,
    Null,
}

/// The open set `{p₁ > p₀}`.
///
/// Cells where both densities vanish take the status of their left neighbour
/// (the right one for the leftmost cell), and joints between two positive
/// pieces are included, so the result is open and has as few components as
/// the data allow.
pub fn bayes_classifier(pair: &DistributionPair) -> Result<IntervalSet> {
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(pair.breakpoints());
    edges.push(f64::INFINITY);
    let (hull_lo, hull_hi) = pair.hull(12.0);

    let mut pieces: Vec<(f64, f64, Piece)> = Vec::new();
    for w in edges.windows(2) {
        let (l, r) = (w[0], w[1]);
        let mid = Interval::open(l, r).midpoint();
        let g0 = pair.gaussians(Class::Zero);
        let g1 = pair.gaussians(Class::One);
        let q0 = pair.poly_on_cell(Class::Zero, mid);
        let q1 = pair.poly_on_cell(Class::One, mid);
        let diff = |x: f64| pair.p1(x) - pair.p0(x);

        let roots: Vec<f64>;
        let sign: Box<dyn Fn(f64) -> f64>;
        if g0.is_empty() && g1.is_empty() {
            let d = q1.sub(&q0);
            if d.is_zero() {
                if q1.is_zero() {
                    pieces.push((l, r, Piece::Null));
                    continue;
                }
                return Err(Error::DegenerateTie { lo: l, hi: r });
            }
            roots = d.roots_in(l, r, 1e-13);
            sign = Box::new(move |x| d.eval(x));
        } else if g0.len() == 1 && g1.len() == 1 && q0.is_zero() && q1.is_zero() {
            let f = LogRatio::new(g0[0], g1[0]);
            if f.identically_zero() {
                return Err(Error::DegenerateTie { lo: l, hi: r });
            }
            roots = f.roots().into_iter().filter(|x| *x > l && *x < r).collect();
            sign = Box::new(move |x| f.eval(x));
        } else {
            let lo = l.max(hull_lo);
            let hi = r.min(hull_hi);
            roots = grid_roots(&diff, lo, hi, 4096);
            sign = Box::new(diff);
        }

        let mut cuts = vec![l];
        cuts.extend(roots.iter().copied().filter(|x| *x > l && *x < r));
        cuts.push(r);
        for c in cuts.windows(2) {
            if c[0] >= c[1] {
                continue;
            }
            let m = Interval::open(c[0], c[1]).midpoint();
            let s = sign(m);
            let status = if s > 0.0 {
                Piece::In
            } else if s < 0.0 {
                Piece::Out
            } else if pair.p0(m) == 0.0 && pair.p1(m) == 0.0 {
                Piece::Null
            } else {
                return Err(Error::DegenerateTie { lo: c[0], hi: c[1] });
            };
            pieces.push((c[0], c[1], status));
        }
    }

    // Resolve null pieces from their neighbours.
    let first_real = pieces.iter().find(|p| p.2 != Piece::Null).map(|p| p.2).unwrap_or(Piece::Out);
    let mut prev = first_real;
    for p in pieces.iter_mut() {
        if p.2 == Piece::Null {
            p.2 = prev;
        }
        prev = p.2;
    }

    let mut out: Vec<Interval> = Vec::new();
    for (lo, hi, status) in pieces {
        if status != Piece::In {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.hi == lo => last.hi = hi,
            _ => out.push(Interval::open(lo, hi)),
        }
    }
    Ok(IntervalSet::from_intervals(out))
}

/// `ln(p₁/p₀)` for a single Gaussian per class, a quadratic in `x`.
#[derive(Debug, Clone, Copy)]
struct LogRatio {
    a: f64,
    b: f64,
    c: f64,
}

impl LogRatio {
    fn new(g0: GaussianTerm, g1: GaussianTerm) -> Self {
        let (v0, v1) = (g0.sigma * g0.sigma, g1.sigma * g1.sigma);
        LogRatio {
            a: 0.5 / v0 - 0.5 / v1,
            b: g1.mu / v1 - g0.mu / v0,
            c: (g1.weight * g0.sigma / (g0.weight * g1.sigma)).ln() - 0.5 * g1.mu * g1.mu / v1
                + 0.5 * g0.mu * g0.mu / v0,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    fn identically_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c.abs() < 1e-15
    }

    fn roots(&self) -> Vec<f64> {
        quadratic_roots(self.a, self.b, self.c)
    }
}

/// Real roots of `a x² + b x + c`, sorted, using the cancellation-free form.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
    let mut r = vec![q / a, c / q];
    r.sort_by(f64::total_cmp);
    r
}

/// Sign changes of `f` on `n` uniform cells of `[lo, hi]`, bisected.
fn grid_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if !(lo < hi) {
        return out;
    }
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0 * f1 < 0.0 {
            out.push(bisect_sign(f, x0, x1, f0, 1e-13));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskGap {
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `R(A) - R(B)` with `2εMK` for classifiers whose `M` components
/// have endpoints pairwise within `ε`.
pub fn risk_gap_bound(
    pair: &DistributionPair,
    a: &IntervalSet,
    b: &IntervalSet,
    eps: f64,
    k: f64,
    m: usize,
) -> Result<RiskGap> {
    if a.components() != m || b.components() != m {
        return Err(Error::EndpointMismatch(format!(
            "expected {m} components, found {} and {}",
            a.components(),
            b.components()
        )));
    }
    let close = |x: f64, y: f64| {
        if x.is_finite() && y.is_finite() {
            (x - y).abs() <= eps + 1e-12
        } else {
            x == y
        }
    };
    for (i, (p, q)) in a.intervals().iter().zip(b.intervals()).enumerate() {
        if !close(p.lo, q.lo) || !close(p.hi, q.hi) {
            return Err(Error::EndpointMismatch(format!("component {i}: {p} vs {q} differ by more than {eps}")));
        }
    }
    let gap = standard_risk(pair, a).total - standard_risk(pair, b).total;
    let bound = 2.0 * eps * m as f64 * k;
    Ok(RiskGap { gap, bound, holds: gap <= bound + 1e-12 })
}
