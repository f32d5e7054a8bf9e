//! Class-conditional densities `p₀`, `p₁` built from weighted Gaussians and
//! piecewise polynomials, with exact evaluation, derivatives and masses.
//!
//! A piecewise-polynomial component with breakpoints `x₀ < … < x_k` uses row
//! `j` on `[x_j, x_{j+1})`, the last row also at `x_k`, and is zero outside
//! `[x₀, x_k]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalSet};
use crate::normal;
use crate::poly::Polynomial;

pub const MAX_DEGREE: usize = 5;
const MASS_TOL: f64 = 1e-9;
const POSITIVITY_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Zero,
    One,
}

impl Class {
    pub fn other(self) -> Class {
        match self {
            Class::Zero => Class::One,
            Class::One => Class::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Class::Zero => 0,
            Class::One => 1,
        }
    }
}

impl Serialize for Class {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index() as u8)
    }
}

impl<'de> Deserialize<'de> for Class {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Class::Zero),
            1 => Ok(Class::One),
            k => Err(serde::de::Error::custom(format!("class must be 0 or 1, got {k}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DensityComponent {
    Gaussian { weight: f64, mu: f64, sigma: f64 },
    PiecewisePoly { breakpoints: Vec<f64>, coeffs: Vec<Polynomial> },
}

impl DensityComponent {
    pub fn gaussian(weight: f64, mu: f64, sigma: f64) -> Self {
        DensityComponent::Gaussian { weight, mu, sigma }
    }

    /// Piecewise polynomial from breakpoints and low-to-high coefficient rows.
    pub fn piecewise(breakpoints: Vec<f64>, rows: Vec<Vec<f64>>) -> Self {
        DensityComponent::PiecewisePoly { breakpoints, coeffs: rows.into_iter().map(Polynomial::new).collect() }
    }

    /// Piecewise constant density with the given cell heights.
    pub fn step(breakpoints: Vec<f64>, heights: &[f64]) -> Self {
        Self::piecewise(breakpoints, heights.iter().map(|&h| vec![h]).collect())
    }

    fn validate(&self) -> Result<()> {
        match self {
            DensityComponent::Gaussian { weight, mu, sigma } => {
                if !(weight.is_finite() && *weight > 0.0 && *weight <= 1.0) {
                    return Err(Error::Validation(format!("gaussian weight {weight} outside (0, 1]")));
                }
                if !mu.is_finite() {
                    return Err(Error::Validation(format!("gaussian mean {mu} is not finite")));
                }
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::Validation(format!("gaussian sigma {sigma} must be positive")));
                }
            }
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                if breakpoints.len() < 2 {
                    return Err(Error::Validation("piecewise_poly needs at least two breakpoints".into()));
                }
                if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Validation("breakpoints must be finite and strictly increasing".into()));
                }
                if coeffs.len() != breakpoints.len() - 1 {
                    return Err(Error::Validation(format!(
                        "expected {} coefficient rows, found {}",
                        breakpoints.len() - 1,
                        coeffs.len()
                    )));
                }
                for (j, p) in coeffs.iter().enumerate() {
                    if p.coeffs().iter().any(|c| !c.is_finite()) {
                        return Err(Error::Validation(format!("cell {j}: non-finite coefficient")));
                    }
                    if p.degree() > MAX_DEGREE {
                        return Err(Error::Validation(format!("cell {j}: degree {} exceeds {MAX_DEGREE}", p.degree())));
                    }
                    let (lo, hi) = (breakpoints[j], breakpoints[j + 1]);
                    let min = poly_min_on(p, lo, hi);
                    let scale = p.coeffs().iter().fold(1.0_f64, |m, c| m.max(c.abs()));
                    if min < -1e-12 * scale {
                        return Err(Error::Validation(format!(
                            "cell {j} on [{lo}, {hi}]: density takes negative value {min}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn cell_index(breakpoints: &[f64], x: f64) -> Option<usize> {
        let k = breakpoints.len();
        let idx = breakpoints.partition_point(|b| *b <= x);
        if idx == 0 {
            None
        } else if idx == k {
            (x == breakpoints[k - 1]).then_some(k - 2)
        } else {
            Some(idx - 1)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DensityComponent::Gaussian { weight, mu, sigma } => weight * normal::pdf((x - mu) / sigma) / sigma,
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                Self::cell_index(breakpoints, x).map_or(0.0, |j| coeffs[j].eval(x))
            }
        }
    }

    /// Derivative, or `None` when `x` sits on a breakpoint.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            DensityComponent::Gaussian { mu, sigma, .. } => Some(-(x - mu) / (sigma * sigma) * self.eval(x)),
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                if breakpoints.iter().any(|b| on_breakpoint(x, *b)) {
                    return None;
                }
                Some(Self::cell_index(breakpoints, x).map_or(0.0, |j| coeffs[j].derivative().eval(x)))
            }
        }
    }

    /// `∫_lo^hi` of the component, for `lo <= hi`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if !(lo < hi) {
            return 0.0;
        }
        match self {
            DensityComponent::Gaussian { weight, mu, sigma } => {
                weight * normal::interval_prob((lo - mu) / sigma, (hi - mu) / sigma)
            }
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                let mut total = 0.0;
                for (j, p) in coeffs.iter().enumerate() {
                    let a = lo.max(breakpoints[j]);
                    let b = hi.min(breakpoints[j + 1]);
                    if a < b {
                        let anti = p.antiderivative();
                        total += anti.eval(b) - anti.eval(a);
                    }
                }
                total
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Upper bound on the component's values.
    pub fn peak(&self) -> f64 {
        match self {
            DensityComponent::Gaussian { weight, sigma, .. } => weight * normal::pdf(0.0) / sigma,
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    -poly_min_on(
                        &Polynomial::new(p.coeffs().iter().map(|c| -c).collect()),
                        breakpoints[j],
                        breakpoints[j + 1],
                    )
                })
                .fold(0.0, f64::max),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        match self {
            DensityComponent::Gaussian { .. } => &[],
            DensityComponent::PiecewisePoly { breakpoints, .. } => breakpoints,
        }
    }

    /// Polynomial piece active on the open cell containing `mid`.
    fn poly_at(&self, mid: f64) -> Option<&Polynomial> {
        match self {
            DensityComponent::Gaussian { .. } => None,
            DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                let k = breakpoints.len();
                if mid <= breakpoints[0] || mid >= breakpoints[k - 1] {
                    return None;
                }
                Self::cell_index(breakpoints, mid).map(|j| &coeffs[j])
            }
        }
    }
}

pub(crate) fn on_breakpoint(x: f64, b: f64) -> bool {
    (x - b).abs() <= 1e-12 * (1.0 + b.abs())
}

/// Minimum of `p` over `[lo, hi]` from samples, endpoints and critical points.
fn poly_min_on(p: &Polynomial, lo: f64, hi: f64) -> f64 {
    let mut min = p.eval(lo).min(p.eval(hi));
    for i in 1..POSITIVITY_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / POSITIVITY_SAMPLES as f64;
        min = min.min(p.eval(x));
    }
    let dp = p.derivative();
    if dp.degree() >= 1 {
        for r in dp.roots_in(lo, hi, 1e-13) {
            min = min.min(p.eval(r));
        }
    }
    min
}

/// Gaussian summand `w · g_{μ,σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub weight: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// A validated pair of class-conditional densities with total mass one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct DistributionPair {
    class0: Vec<DensityComponent>,
    class1: Vec<DensityComponent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    #[serde(default)]
    class0: Vec<DensityComponent>,
    #[serde(default)]
    class1: Vec<DensityComponent>,
}

impl TryFrom<RawPair> for DistributionPair {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        DistributionPair::new(raw.class0, raw.class1)
    }
}

impl From<DistributionPair> for RawPair {
    fn from(p: DistributionPair) -> Self {
        RawPair { class0: p.class0, class1: p.class1 }
    }
}

impl DistributionPair {
    pub fn new(class0: Vec<DensityComponent>, class1: Vec<DensityComponent>) -> Result<Self> {
        let normalize = |v: Vec<DensityComponent>| -> Vec<DensityComponent> {
            v.into_iter()
                .map(|c| match c {
                    DensityComponent::PiecewisePoly { breakpoints, coeffs } => DensityComponent::PiecewisePoly {
                        breakpoints,
                        coeffs: coeffs.into_iter().map(|p| Polynomial::new(p.0)).collect(),
                    },
                    g => g,
                })
                .collect()
        };
        let pair = DistributionPair { class0: normalize(class0), class1: normalize(class1) };
        for c in pair.class0.iter().chain(&pair.class1) {
            c.validate()?;
        }
        let total = pair.class_mass(Class::Zero) + pair.class_mass(Class::One);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("total mass {total} differs from 1")));
        }
        Ok(pair)
    }

    pub fn components(&self, which: Class) -> &[DensityComponent] {
        match which {
            Class::Zero => &self.class0,
            Class::One => &self.class1,
        }
    }

    pub fn eval(&self, which: Class, x: f64) -> f64 {
        self.components(which).iter().map(|c| c.eval(x)).sum()
    }

    pub fn p0(&self, x: f64) -> f64 {
        self.eval(Class::Zero, x)
    }

    pub fn p1(&self, x: f64) -> f64 {
        self.eval(Class::One, x)
    }

    pub fn derivative(&self, which: Class, x: f64) -> Result<f64> {
        self.components(which).iter().map(|c| c.derivative(x).ok_or(Error::BreakpointDerivative { x })).sum()
    }

    /// Mass of `(lo, hi)`; endpoint inclusion is irrelevant.
    pub fn mass_between(&self, which: Class, lo: f64, hi: f64) -> f64 {
        self.components(which).iter().map(|c| c.mass(lo, hi)).sum()
    }

    pub fn mass(&self, which: Class, iv: &Interval) -> f64 {
        self.mass_between(which, iv.lo, iv.hi)
    }

    pub fn mass_set(&self, which: Class, set: &IntervalSet) -> f64 {
        set.intervals().iter().map(|iv| self.mass(which, iv)).sum()
    }

    pub fn class_mass(&self, which: Class) -> f64 {
        self.mass_between(which, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn cdf(&self, which: Class, x: f64) -> f64 {
        self.mass_between(which, f64::NEG_INFINITY, x)
    }

    /// `η(x) = p₁(x) / (p₀(x) + p₁(x))`.
    pub fn eta(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.p0(x), self.p1(x));
        if a + b <= 0.0 {
            return Err(Error::OutsideSupport { x });
        }
        Ok(b / (a + b))
    }

    pub fn has_gaussian(&self) -> bool {
        self.class0.iter().chain(&self.class1).any(|c| matches!(c, DensityComponent::Gaussian { .. }))
    }

    pub fn gaussians(&self, which: Class) -> Vec<GaussianTerm> {
        self.components(which)
            .iter()
            .filter_map(|c| match c {
                DensityComponent::Gaussian { weight, mu, sigma } => {
                    Some(GaussianTerm { weight: *weight, mu: *mu, sigma: *sigma })
                }
                _ => None,
            })
            .collect()
    }

    /// Sorted distinct breakpoints of every piecewise component of one class.
    pub fn class_breakpoints(&self, which: Class) -> Vec<f64> {
        let mut v: Vec<f64> = self.components(which).iter().flat_map(|c| c.breakpoints().to_vec()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Sorted distinct breakpoints across both classes; these delimit the
    /// analytic cells.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = self.class_breakpoints(Class::Zero);
        v.extend(self.class_breakpoints(Class::One));
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Right limit minus left limit of the class density at `x`.
    pub fn jump(&self, which: Class, x: f64) -> f64 {
        let right = self
            .components(which)
            .iter()
            .map(|c| match c {
                DensityComponent::Gaussian { .. } => 0.0,
                DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                    let k = breakpoints.len();
                    if x < breakpoints[0] || x >= breakpoints[k - 1] {
                        0.0
                    } else {
                        DensityComponent::cell_index(breakpoints, x).map_or(0.0, |j| coeffs[j].eval(x))
                    }
                }
            })
            .sum::<f64>();
        let left = self
            .components(which)
            .iter()
            .map(|c| match c {
                DensityComponent::Gaussian { .. } => 0.0,
                DensityComponent::PiecewisePoly { breakpoints, coeffs } => {
                    let k = breakpoints.len();
                    if x <= breakpoints[0] || x > breakpoints[k - 1] {
                        0.0
                    } else {
                        let j = breakpoints.partition_point(|b| *b < x) - 1;
                        coeffs[j].eval(x)
                    }
                }
            })
            .sum::<f64>();
        right - left
    }

    /// Points where the class density is discontinuous.
    pub fn discontinuities(&self, which: Class) -> Vec<f64> {
        self.class_breakpoints(which).into_iter().filter(|&b| self.jump(which, b).abs() > 1e-12).collect()
    }

    /// Sum of the polynomial pieces of one class on the open cell containing `mid`.
    pub fn poly_on_cell(&self, which: Class, mid: f64) -> Polynomial {
        self.components(which).iter().filter_map(|c| c.poly_at(mid)).fold(Polynomial::zero(), |acc, p| acc.add(p))
    }

    /// Upper bound on the class density.
    pub fn sup_bound(&self, which: Class) -> f64 {
        self.components(which).iter().map(DensityComponent::peak).sum()
    }

    /// `closure{p₀ + p₁ > 0}`.
    pub fn support(&self) -> IntervalSet {
        if self.has_gaussian() {
            return IntervalSet::real_line();
        }
        let bps = self.breakpoints();
        let cells = bps
            .windows(2)
            .filter(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                !self.poly_on_cell(Class::Zero, mid).is_zero() || !self.poly_on_cell(Class::One, mid).is_zero()
            })
            .map(|w| Interval::closed(w[0], w[1]))
            .collect();
        IntervalSet::from_intervals(cells)
    }

    /// True when one class density vanishes identically on a positive-length
    /// cell where the other does not, i.e. `ℙ(η ∈ {0, 1}) > 0`.
    pub fn eta_01_positive_mass(&self) -> bool {
        let g0 = !self.gaussians(Class::Zero).is_empty();
        let g1 = !self.gaussians(Class::One).is_empty();
        if g0 && g1 {
            return false;
        }
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(self.breakpoints());
        edges.push(f64::INFINITY);
        edges.windows(2).any(|w| {
            let mid = Interval::open(w[0], w[1]).midpoint();
            let zero0 = !g0 && self.poly_on_cell(Class::Zero, mid).is_zero();
            let zero1 = !g1 && self.poly_on_cell(Class::One, mid).is_zero();
            zero0 != zero1
        })
    }

    /// Bounded interval holding every piecewise piece and every Gaussian out to
    /// `k` standard deviations.
    pub fn hull(&self, k: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in self.class0.iter().chain(&self.class1) {
            match c {
                DensityComponent::Gaussian { mu, sigma, .. } => {
                    lo = lo.min(mu - k * sigma);
                    hi = hi.max(mu + k * sigma);
                }
                DensityComponent::PiecewisePoly { breakpoints, .. } => {
                    lo = lo.min(breakpoints[0]);
                    hi = hi.max(breakpoints[breakpoints.len() - 1]);
                }
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> DistributionPair {
        DistributionPair::new(
            vec![DensityComponent::piecewise(vec![-1.0, 1.0], vec![vec![1.0 / 6.0, 1.0 / 6.0]])],
            vec![DensityComponent::piecewise(vec![-1.0, 1.0], vec![vec![1.0 / 3.0, -1.0 / 3.0]])],
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

    #[test]
    fn gaussian_peak_and_slope() {
        let g = DensityComponent::gaussian(0.5, 0.0, 1.0);
        assert!((g.eval(0.0) - 0.5 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let g1 = DensityComponent::gaussian(1.0, 0.0, 1.0);
        assert!((g1.derivative(1.0).unwrap() + 0.241_970_724_519_143_37).abs() < 1e-15);
        assert!((g.total_mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn piecewise_eval_derivative_mass() {
        let p = single();
        assert!((p.p0(0.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((p.derivative(Class::Zero, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(p.p0(1.5), 0.0);
        assert_eq!(p.p1(-1.0001), 0.0);
        assert!(matches!(p.derivative(Class::One, 1.0), Err(Error::BreakpointDerivative { .. })));
        let h = halves();
        assert_eq!(h.derivative(Class::One, 0.5).unwrap(), 0.0);
        assert!((h.mass_between(Class::One, f64::NEG_INFINITY, 0.0) - 0.125).abs() < 1e-15);
        assert!((h.eta(0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(h.eta(2.0), Err(Error::OutsideSupport { .. })));
    }

    #[test]
    fn support_and_discontinuities() {
        let h = halves();
        assert_eq!(h.support().intervals(), &[Interval::closed(-1.0, 1.0)]);
        assert_eq!(h.discontinuities(Class::Zero), vec![-1.0, 0.0, 1.0]);
        assert!((h.jump(Class::One, 0.0) - 0.25).abs() < 1e-15);
        let s = single();
        // p₀ vanishes at -1 from the right, so only the jump at 1 remains
        assert_eq!(s.discontinuities(Class::Zero), vec![1.0]);
        assert_eq!(s.discontinuities(Class::One), vec![-1.0]);
        assert!(!h.eta_01_positive_mass());
        let g = DistributionPair::new(
            vec![DensityComponent::gaussian(0.5, 0.0, 1.0)],
            vec![DensityComponent::gaussian(0.5, 2.0, 1.0)],
        )
        .unwrap();
        assert!(g.support().is_real_line());
        assert!(!g.eta_01_positive_mass());
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let bad_sigma = DistributionPair::new(
            vec![DensityComponent::gaussian(0.5, 0.0, 0.0)],
            vec![DensityComponent::gaussian(0.5, 0.0, 1.0)],
        );
        assert!(matches!(bad_sigma, Err(Error::Validation(_))));
        let bad_mass = DistributionPair::new(
            vec![DensityComponent::gaussian(0.5, 0.0, 1.0)],
            vec![DensityComponent::gaussian(0.6, 0.0, 1.0)],
        );
        assert!(matches!(bad_mass, Err(Error::Validation(_))));
        // dips below zero inside the cell: 4(x-0.5)^2 - 0.01 on [0,1]
        let neg = DistributionPair::new(
            vec![DensityComponent::piecewise(vec![0.0, 1.0], vec![vec![0.99, -4.0, 4.0]])],
            vec![],
        );
        assert!(matches!(neg, Err(Error::Validation(_))));
        let deg6 = DistributionPair::new(
            vec![DensityComponent::piecewise(vec![0.0, 1.0], vec![vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 7.0]])],
            vec![],
        );
        assert!(matches!(deg6, Err(Error::Validation(m)) if m.contains("degree")));
    }

    #[test]
    fn serde_schema() {
        let txt = r#"{"class0":[{"type":"gaussian","weight":0.5,"mu":0.0,"sigma":1.0}],
                      "class1":[{"type":"piecewise_poly","breakpoints":[-1.0,1.0],"coeffs":[[0.25]]}]}"#;
        let p: DistributionPair = serde_json::from_str(txt).unwrap();
        assert!((p.p1(0.3) - 0.25).abs() < 1e-15);
        let back: DistributionPair = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"class0":[{"type":"gaussian","weight":0.5,"mu":0.0,"sigma":-1.0}],"class1":[]}"#;
        assert!(serde_json::from_str::<DistributionPair>(bad).is_err());
    }

    #[test]
    fn sup_bound_dominates() {
        let s = single();
        assert!((s.sup_bound(Class::Zero) - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.sup_bound(Class::One) - 2.0 / 3.0).abs() < 1e-12);
    }
}
