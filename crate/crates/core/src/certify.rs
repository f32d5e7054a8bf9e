//! Independent checks on the solver: a grid brute force over regular
//! classifiers and a discretized transport dual.
//!
//! The dual pairs class-0 and class-1 atoms lying within `2ε + h` of each other
//! and maximizes the matched mass. On the line the compatibility structure is
//! an interval graph with monotone endpoints, so a single left-to-right greedy
//! sweep is optimal. [`max_flow_value`] solves the same problem as a flow and is
//! used to cross-check the sweep on small instances.

use serde::{Deserialize, Serialize};

use crate::density::{Class, DistributionPair};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::par::Exec;
use crate::risk::adversarial_risk;

pub const DEFAULT_GRID_H: f64 = 1e-3;
pub const DEFAULT_MAX_K: usize = 2;
pub const MAX_K_LIMIT: usize = 3;
pub const STATE_BUDGET: u64 = 100_000_000;
/// Hull width in standard deviations used for Gaussian components.
const HULL_SIGMAS: f64 = 8.0;
const COVERAGE: f64 = 1.0 - 1e-6;
const RADIUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomList {
    pub positions: Vec<f64>,
    pub masses: Vec<f64>,
    pub class: Class,
}

impl AtomList {
    pub fn new(class: Class, positions: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if positions.len() != masses.len() {
            return Err(Error::InvalidArgument(format!("{} positions but {} masses", positions.len(), masses.len())));
        }
        if positions.iter().any(|x| !x.is_finite()) || positions.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("atom positions must be finite and strictly increasing".into()));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidArgument("atom masses must be finite and nonnegative".into()));
        }
        Ok(AtomList { positions, masses, class })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub dual_value: f64,
    pub matching: Vec<(usize, usize, f64)>,
    pub grid_h: f64,
    pub epsilon: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingSummary {
    pub pairs: usize,
    pub matched_mass: f64,
    pub max_distance: f64,
}

impl DualCertificate {
    pub fn summary(&self, class0: &AtomList, class1: &AtomList) -> MatchingSummary {
        MatchingSummary {
            pairs: self.matching.len(),
            matched_mass: self.matching.iter().map(|m| m.2).sum(),
            max_distance: self
                .matching
                .iter()
                .map(|&(i, j, _)| (class0.positions[i] - class1.positions[j]).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Cell masses on an `h`-grid aligned to multiples of `h`, with an atom at each
/// cell midpoint. Mass outside the window is folded into the end atoms, and the
/// window is widened until it holds `1 − 1e−6` of each class. Zero-mass atoms
/// are dropped.
pub fn discretize(pair: &DistributionPair, grid_h: f64, window: Interval) -> Result<(AtomList, AtomList)> {
    if !(grid_h > 0.0 && grid_h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid_h must be positive, got {grid_h}")));
    }
    if !(window.lo.is_finite() && window.hi.is_finite() && window.lo < window.hi) {
        return Err(Error::InvalidArgument(format!("window must be a bounded interval, got {window}")));
    }
    let (mut lo, mut hi) = (window.lo, window.hi);
    let covered = |lo: f64, hi: f64| {
        [Class::Zero, Class::One].iter().all(|&c| pair.mass_between(c, lo, hi) >= COVERAGE * pair.class_mass(c))
    };
    for _ in 0..64 {
        if covered(lo, hi) {
            break;
        }
        let w = hi - lo;
        lo -= w;
        hi += w;
    }
    let i0 = (lo / grid_h).floor() as i64;
    let i1 = (hi / grid_h).ceil() as i64;
    let edges: Vec<f64> = (i0..=i1).map(|i| i as f64 * grid_h).collect();
    let build = |class: Class| -> AtomList {
        let cdf: Vec<f64> = edges.iter().map(|&x| pair.cdf(class, x)).collect();
        let total = pair.class_mass(class);
        let n = edges.len() - 1;
        let mut masses: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        masses[0] += cdf[0];
        masses[n - 1] += (total - cdf[n]).max(0.0);
        let (positions, masses): (Vec<f64>, Vec<f64>) =
            edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).zip(masses).filter(|&(_, m)| m > 0.0).unzip();
        AtomList { positions, masses, class }
    };
    Ok((build(Class::Zero), build(Class::One)))
}

fn radius(eps: f64, grid_h: f64) -> f64 {
    let r = 2.0 * eps + grid_h;
    r + RADIUS_SLACK * (1.0 + r)
}

/// Maximum mass matchable between atoms at distance at most `2ε + grid_h`.
pub fn dual_value(class0: &AtomList, class1: &AtomList, eps: f64, grid_h: f64) -> Result<DualCertificate> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and non-negative, got {eps}")));
    }
    let r = radius(eps, grid_h);
    let mut left1 = class1.masses.clone();
    let mut matching = Vec::new();
    let mut start = 0;
    for (i, (&x, &m)) in class0.positions.iter().zip(&class0.masses).enumerate() {
        while start < class1.len() && (class1.positions[start] < x - r || left1[start] <= 0.0) {
            start += 1;
        }
        let mut need = m;
        let mut j = start;
        while need > 0.0 && j < class1.len() && class1.positions[j] <= x + r {
            let take = need.min(left1[j]);
            if take > 0.0 {
                left1[j] -= take;
                need -= take;
                matching.push((i, j, take));
            }
            j += 1;
        }
    }
    Ok(DualCertificate { dual_value: matching.iter().map(|m| m.2).sum(), matching, grid_h, epsilon: eps, radius: r })
}

/// The dual as a max-flow on the bipartite compatibility graph (Dinic).
/// Quadratic in the atom count; intended for small cross-check instances.
pub fn max_flow_value(class0: &AtomList, class1: &AtomList, eps: f64, grid_h: f64) -> f64 {
    let r = radius(eps, grid_h);
    let (n0, n1) = (class0.len(), class1.len());
    let (s, t) = (n0 + n1, n0 + n1 + 1);
    let mut g = FlowGraph::new(n0 + n1 + 2);
    for i in 0..n0 {
        g.add_edge(s, i, class0.masses[i]);
        for j in 0..n1 {
            if (class0.positions[i] - class1.positions[j]).abs() <= r {
                g.add_edge(i, n0 + j, f64::INFINITY);
            }
        }
    }
    for j in 0..n1 {
        g.add_edge(n0 + j, t, class1.masses[j]);
    }
    g.max_flow(s, t)
}

struct FlowGraph {
    to: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    const TINY: f64 = 1e-15;

    fn new(n: usize) -> Self {
        FlowGraph { to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: f64) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0.0);
    }

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > Self::TINY && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, f: f64, level: &[i64], it: &mut [usize]) -> f64 {
        if u == t {
            return f;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > Self::TINY && level[v] == level[u] + 1 {
                let d = self.push(v, t, f.min(self.cap[e]), level, it);
                if d > 0.0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return flow;
            }
            let mut it = vec![0; self.adj.len()];
            loop {
                let f = self.push(s, t, f64::INFINITY, &level, &mut it);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalResult {
    pub min_risk: f64,
    pub argmin: IntervalSet,
    pub grid_points: usize,
}

#[derive(Clone, Copy)]
struct Node {
    value: f64,
    prev: usize,
}

/// Exhaustive minimum over regular classifiers with at most `max_k`
/// components whose finite endpoints lie on the `h`-grid, plus `∅` and `ℝ`.
///
/// For a regular set the risk splits into a sum of per-endpoint terms, so the
/// search is a shortest-path over boundary sequences with gaps `> 2ε`.
pub fn primal_bruteforce(
    pair: &DistributionPair,
    eps: f64,
    grid_h: f64,
    max_k: usize,
    exec: Exec,
) -> Result<PrimalResult> {
    if max_k == 0 || max_k > MAX_K_LIMIT {
        return Err(Error::Validation(format!("maxK must be in 1..={MAX_K_LIMIT}, got {max_k}")));
    }
    if !(grid_h > 0.0 && grid_h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid_h must be positive, got {grid_h}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and non-negative, got {eps}")));
    }
    let (lo, hi) = pair.hull(HULL_SIGMAS);
    let (lo, hi) = (lo - eps, hi + eps);
    let i0 = (lo / grid_h).ceil() as i64;
    let i1 = (hi / grid_h).floor() as i64;
    let n = (i1 - i0 + 1).max(0) as usize;
    let max_len = 2 * max_k;
    let states = (n as u64).saturating_mul(max_len as u64 + 1).saturating_mul(2);
    if states > STATE_BUDGET {
        return Err(Error::BudgetExceeded { count: states, limit: STATE_BUDGET });
    }
    let xs: Vec<f64> = (i0..=i1).map(|i| i as f64 * grid_h).collect();
    let (p0, p1) = (pair.class_mass(Class::Zero), pair.class_mass(Class::One));
    // cost of a left endpoint a and a right endpoint b
    let weights = exec.map(&xs, |&x| {
        let wa = pair.cdf(Class::One, x + eps) - pair.cdf(Class::Zero, x - eps);
        let wb = pair.cdf(Class::Zero, x + eps) - pair.cdf(Class::One, x - eps);
        (wa, wb)
    });

    let mut best = (p0.min(p1), if p0 <= p1 { IntervalSet::real_line() } else { IntervalSet::empty() });
    // first boundary is an a (leading gap) or a b (leading component)
    for leading_b in [false, true] {
        let mut layers: Vec<Vec<Node>> = Vec::new();
        for step in 0..max_len {
            let is_b = (step % 2 == 1) != leading_b;
            let comps = if leading_b { 1 + step.div_ceil(2) } else { step / 2 + 1 };
            if comps > max_k {
                break;
            }
            let w = |i: usize| if is_b { weights[i].1 } else { weights[i].0 };
            let layer: Vec<Node> = if step == 0 {
                (0..n).map(|i| Node { value: w(i), prev: usize::MAX }).collect()
            } else {
                let prev = &layers[step - 1];
                let mut out = Vec::with_capacity(n);
                let (mut j, mut arg) = (0usize, usize::MAX);
                let mut run = f64::INFINITY;
                for i in 0..n {
                    while j < i && xs[i] - xs[j] > 2.0 * eps {
                        if prev[j].value < run {
                            run = prev[j].value;
                            arg = j;
                        }
                        j += 1;
                    }
                    out.push(Node { value: run + w(i), prev: arg });
                }
                out
            };
            let tail = if is_b { p1 } else { p0 };
            if let Some((i, node)) = layer
                .iter()
                .enumerate()
                .filter(|(_, nd)| nd.value.is_finite())
                .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            {
                if node.value + tail < best.0 {
                    let mut seq = vec![i];
                    let mut cur = node.prev;
                    for s in (0..step).rev() {
                        seq.push(cur);
                        cur = layers[s][cur].prev;
                    }
                    seq.reverse();
                    best = (node.value + tail, sequence_set(&xs, &seq, leading_b));
                }
            }
            layers.push(layer);
        }
    }
    let min_risk = adversarial_risk(pair, &best.1, eps).total;
    Ok(PrimalResult { min_risk, argmin: best.1, grid_points: n })
}

fn sequence_set(xs: &[f64], seq: &[usize], leading_b: bool) -> IntervalSet {
    let mut bounds: Vec<f64> = Vec::with_capacity(seq.len() + 2);
    if leading_b {
        bounds.push(f64::NEG_INFINITY);
    }
    bounds.extend(seq.iter().map(|&i| xs[i]));
    if bounds.len() % 2 == 1 {
        bounds.push(f64::INFINITY);
    }
    let pieces: Vec<(f64, f64)> = bounds.chunks(2).map(|c| (c[0], c[1])).collect();
    IntervalSet::open_union(&pieces)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityGap {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub argmin: IntervalSet,
    pub certificate: DualCertificate,
    pub summary: MatchingSummary,
    pub atoms0: usize,
    pub atoms1: usize,
}

pub fn duality_gap(pair: &DistributionPair, eps: f64, grid_h: f64, max_k: usize, exec: Exec) -> Result<DualityGap> {
    let primal = primal_bruteforce(pair, eps, grid_h, max_k, exec)?;
    let (lo, hi) = pair.hull(HULL_SIGMAS);
    let (c0, c1) = discretize(pair, grid_h, Interval::closed(lo, hi))?;
    let certificate = dual_value(&c0, &c1, eps, grid_h)?;
    Ok(DualityGap {
        summary: certificate.summary(&c0, &c1),
        primal: primal.min_risk,
        dual: certificate.dual_value,
        gap: primal.min_risk - certificate.dual_value,
        argmin: primal.argmin,
        certificate,
        atoms0: c0.len(),
        atoms1: c1.len(),
    })
}
