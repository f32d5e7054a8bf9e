//! Dense real polynomials with exact antiderivatives and Sturm-sequence root
//! isolation.

use serde::{Deserialize, Serialize};

/// Coefficients in increasing degree: `c[0] + c[1] x + c[2] x^2 + ...`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial(coeffs);
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    fn trim(&mut self) {
        while matches!(self.0.last(), Some(c) if *c == 0.0) {
            self.0.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0.0)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend(self.0.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.0.len().max(other.0.len());
        Polynomial::new(
            (0..n).map(|k| self.0.get(k).copied().unwrap_or(0.0) - other.0.get(k).copied().unwrap_or(0.0)).collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.0.len().max(other.0.len());
        Polynomial::new(
            (0..n).map(|k| self.0.get(k).copied().unwrap_or(0.0) + other.0.get(k).copied().unwrap_or(0.0)).collect(),
        )
    }

    fn scale(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Remainder of polynomial division `self mod d`, dropping leading terms
    /// that cancel to within `rel_tol` of the dividend's scale.
    fn rem(&self, d: &Polynomial, rel_tol: f64) -> Polynomial {
        let mut r = self.0.clone();
        let dd = d.0.len();
        let lead = *d.0.last().expect("division by zero polynomial");
        let scale = self.scale().max(d.scale());
        while r.len() >= dd {
            let q = r[r.len() - 1] / lead;
            let shift = r.len() - dd;
            for (k, dc) in d.0.iter().enumerate() {
                r[shift + k] -= q * dc;
            }
            r.pop();
            while matches!(r.last(), Some(c) if c.abs() <= rel_tol * scale) {
                r.pop();
            }
        }
        Polynomial::new(r)
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<Polynomial> {
        let mut seq = vec![self.clone()];
        if self.degree() == 0 {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let prev = &seq[n - 2];
            let cur = &seq[n - 1];
            if cur.degree() == 0 || cur.is_zero() {
                break;
            }
            let r = prev.rem(cur, 1e-12);
            if r.is_zero() {
                break;
            }
            seq.push(Polynomial::new(r.0.iter().map(|c| -c).collect()));
        }
        seq
    }

    fn sign_changes(seq: &[Polynomial], x: f64) -> usize {
        let mut changes = 0;
        let mut last = 0.0_f64;
        for p in seq {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
        changes
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: f64, b: f64) -> usize {
        if self.is_zero() || self.degree() == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        Self::sign_changes(&seq, a).saturating_sub(Self::sign_changes(&seq, b))
    }

    /// Distinct real roots in `[a, b]`, each located to within `tol`.
    pub fn roots_in(&self, a: f64, b: f64, tol: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.is_zero() || self.degree() == 0 || a > b {
            return out;
        }
        let seq = self.sturm_sequence();
        if self.eval(a) == 0.0 {
            out.push(a);
        }
        self.isolate(&seq, a, b, tol, &mut out, 0);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= tol);
        out
    }

    fn isolate(&self, seq: &[Polynomial], a: f64, b: f64, tol: f64, out: &mut Vec<f64>, depth: u32) {
        let n = Self::sign_changes(seq, a).saturating_sub(Self::sign_changes(seq, b));
        if n == 0 {
            return;
        }
        if b - a <= tol || depth > 200 {
            out.push(0.5 * (a + b));
            return;
        }
        if n == 1 {
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fb == 0.0 {
                out.push(b);
                return;
            }
            if fa * fb < 0.0 {
                out.push(bisect_sign(|x| self.eval(x), a, b, fa, tol));
                return;
            }
        }
        let m = 0.5 * (a + b);
        self.isolate(seq, a, m, tol, out, depth + 1);
        self.isolate(seq, m, b, tol, out, depth + 1);
    }
}

/// Bisection on a sign change of `f` over `[a, b]`, with `fa = f(a)`.
pub(crate) fn bisect_sign<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_calculus() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Polynomial::new(vec![-2.0, 6.0]));
        let big_p = p.antiderivative();
        assert!((big_p.eval(1.0) - big_p.eval(0.0) - (1.0 - 1.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        // (x-1)(x-2)(x+3)
        let p = Polynomial::new(vec![6.0, -7.0, 0.0, 1.0]);
        assert_eq!(p.count_roots(-10.0, 10.0), 3);
        assert_eq!(p.count_roots(0.0, 1.5), 1);
        let r = p.roots_in(-10.0, 10.0, 1e-13);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn double_root_is_found() {
        // (x-0.5)^2
        let p = Polynomial::new(vec![0.25, -1.0, 1.0]);
        let r = p.roots_in(-1.0, 1.0, 1e-13);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn linear_root() {
        let p = Polynomial::new(vec![1.0 / 6.0, 1.0 / 6.0]).sub(&Polynomial::new(vec![1.0 / 3.0, -1.0 / 3.0]));
        let r = p.roots_in(-1.0, 1.0, 1e-14);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0 / 3.0).abs() < 1e-13);
    }
}
