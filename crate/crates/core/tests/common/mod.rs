//! Generators shared by the property and acceptance suites. Endpoints and radii
//! are multiples of 1/64 so that set-algebra identities hold exactly in
//! floating point.
#![allow(dead_code)]

use advbayes::{examples, DensityComponent, DistributionPair, Interval, IntervalSet};
use proptest::prelude::*;

pub const DENOM: f64 = 64.0;

pub fn dyadic(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..=hi).prop_map(|k| k as f64 / DENOM)
}

/// Radii in `{1/64, …, 1}`.
pub fn radius() -> impl Strategy<Value = f64> {
    dyadic(1, 64)
}

/// Finite unions of up to four intervals with random flags, optional
/// unbounded ends and optional isolated points, inside `[-4, 4]`.
pub fn interval_set() -> impl Strategy<Value = IntervalSet> {
    (
        prop::collection::btree_set(-256i32..=256, 0..9),
        prop::collection::vec(any::<bool>(), 10),
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec(-256i32..=256, 0..2),
    )
        .prop_map(|(pts, flags, lead, trail, singles)| {
            let mut xs: Vec<f64> = pts.into_iter().map(|k| k as f64 / DENOM).collect();
            if lead {
                xs.insert(0, f64::NEG_INFINITY);
            }
            if trail && xs.len() % 2 == 1 {
                xs.push(f64::INFINITY);
            }
            let mut ivs: Vec<Interval> = xs
                .chunks_exact(2)
                .enumerate()
                .map(|(i, c)| Interval::new(c[0], c[1], flags[2 * i % 10], flags[(2 * i + 1) % 10]))
                .collect();
            ivs.extend(singles.into_iter().map(|k| Interval::point(k as f64 / DENOM)));
            IntervalSet::from_intervals(ivs)
        })
}

/// Two-class step densities on a dyadic grid, normalized to total mass one.
pub fn step_pair() -> impl Strategy<Value = DistributionPair> {
    (prop::collection::btree_set(-128i32..=128, 2..6), prop::collection::vec((0u8..8, 0u8..8), 5)).prop_map(
        |(bps, hs)| {
            let bps: Vec<f64> = bps.into_iter().map(|k| k as f64 / DENOM).collect();
            let cells = bps.len() - 1;
            let mut h0: Vec<f64> = hs[..cells].iter().map(|h| h.0 as f64).collect();
            let mut h1: Vec<f64> = hs[..cells].iter().map(|h| h.1 as f64).collect();
            let mut total: f64 =
                bps.windows(2).zip(h0.iter().zip(&h1)).map(|(w, (a, b))| (w[1] - w[0]) * (a + b)).sum();
            if total == 0.0 {
                h0.iter_mut().for_each(|h| *h = 1.0);
                h1.iter_mut().for_each(|h| *h = 1.0);
                total = 2.0 * (bps[cells] - bps[0]);
            }
            h0.iter_mut().chain(h1.iter_mut()).for_each(|h| *h /= total);
            DistributionPair::new(
                vec![DensityComponent::step(bps.clone(), &h0)],
                vec![DensityComponent::step(bps, &h1)],
            )
            .expect("normalized step pair")
        },
    )
}

pub fn built_in() -> impl Strategy<Value = DistributionPair> {
    (0usize..examples::NAMES.len()).prop_map(|i| examples::by_name(examples::NAMES[i]).unwrap())
}

pub fn pair() -> impl Strategy<Value = DistributionPair> {
    prop_oneof![built_in(), step_pair()]
}

/// Opens every non-degenerate component; isolated points are kept.
pub fn with_open_flags(s: &IntervalSet) -> IntervalSet {
    IntervalSet::from_intervals(
        s.intervals().iter().map(|iv| if iv.is_point() { *iv } else { Interval::open(iv.lo, iv.hi) }).collect(),
    )
}
