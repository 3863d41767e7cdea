#![allow(dead_code)]

use std::collections::BTreeMap;

use motzkin_core::model::path_weight;
use motzkin_core::rational::int;
use motzkin_core::{BoundaryMeasure, MotzkinPath, WeightConfig, Q};
use num_traits::Zero;

pub fn fin(w: &[i64]) -> BoundaryMeasure {
    BoundaryMeasure::FiniteSupport(w.iter().map(|&x| int(x)).collect())
}

/// Every Motzkin height sequence of `length` steps from `start`.
pub fn paths_from(start: usize, length: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![start]];
    for _ in 0..length {
        let mut next = Vec::with_capacity(out.len() * 3);
        for h in out {
            let n = *h.last().unwrap();
            for m in [n.checked_sub(1), Some(n), Some(n + 1)].into_iter().flatten() {
                let mut g = h.clone();
                g.push(m);
                next.push(g);
            }
        }
        out = next;
    }
    out
}

/// Unnormalized weights `α_{γ_0} w(γ) β_{γ_L}` of all paths with positive weight; `alpha` finite.
pub fn enumerate(weights: &WeightConfig, alpha: &BoundaryMeasure, beta: &BoundaryMeasure, length: usize) -> BTreeMap<Vec<usize>, Q> {
    let top = alpha.max_support().expect("finite alpha");
    let mut out = BTreeMap::new();
    for m in 0..=top {
        for h in paths_from(m, length) {
            let end = *h.last().unwrap();
            let path = MotzkinPath::new(h.clone()).unwrap();
            let w = alpha.weight(m) * path_weight(&path, weights) * beta.weight(end);
            if !w.is_zero() {
                out.insert(h, w);
            }
        }
    }
    out
}

/// Normalized law of a statistic of the path.
pub fn law_of<F>(paths: &BTreeMap<Vec<usize>, Q>, f: F) -> BTreeMap<Vec<i64>, Q>
where
    F: Fn(&[usize]) -> Vec<i64>,
{
    let total: Q = paths.values().sum();
    let mut out: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
    for (h, w) in paths {
        *out.entry(f(h)).or_insert_with(Q::zero) += w / &total;
    }
    out
}
