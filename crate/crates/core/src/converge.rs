//! Total-variation ladders comparing exact finite-`L` laws with the limit chains.
//!
//! The limit theorems carry no rates, so a ladder reports exact distances along
//! increasing `L` and verdicts on their ordering; absolute values are pinned by
//! golden files in the test suite.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dist::DistTable;
use crate::engine::ExactModel;
use crate::error::{Error, Result};
use crate::limit_chains::{chain_fdd_law, initial_law, xi_product, InitialLawSpec, KernelSpec};
use crate::model::{default_tail_epsilon, BoundaryMeasure, ModelSpec};
use crate::rational::{int, to_f64, to_pq, Q};
use crate::registry::{Named, Registry};

/// `½ Σ |p - q|` over the union of supports, exact.
pub fn tv_distance(p: &DistTable, q: &DistTable) -> Q {
    let mut diff: BTreeMap<&Vec<i64>, Q> = BTreeMap::new();
    for (s, x) in p.iter() {
        *diff.entry(s).or_insert_with(Q::zero) += x;
    }
    for (s, x) in q.iter() {
        *diff.entry(s).or_insert_with(Q::zero) -= x;
    }
    diff.values().map(|d| d.abs()).sum::<Q>() / int(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub length: usize,
    /// Exact values in column order.
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub ladder: &'static str,
    pub params: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<LadderRow>,
    pub verdicts: BTreeMap<String, bool>,
}

impl LadderReport {
    pub fn column(&self, name: &str) -> Option<Vec<&Q>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r.values[i]).collect())
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts.get(name).copied()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("L".into(), json!(r.length));
                for (c, v) in self.columns.iter().zip(&r.values) {
                    obj.insert((*c).into(), json!({ "exact": to_pq(v), "float": to_f64(v) }));
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "ladder": self.ladder,
            "params": self.params,
            "columns": self.columns,
            "rows": rows,
            "verdicts": self.verdicts,
        })
    }

    /// Exact values only, the form pinned by golden files.
    pub fn golden_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("L".into(), json!(r.length));
                for (c, v) in self.columns.iter().zip(&r.values) {
                    obj.insert((*c).into(), json!(to_pq(v)));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "ladder": self.ladder, "params": self.params, "rows": rows })
    }

    /// `L` then one float column per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.length.to_string());
            for v in &r.values {
                out.push_str(&format!(",{:e}", to_f64(v)));
            }
            out.push('\n');
        }
        out
    }
}

/// Inputs shared by all ladders; each ladder reads what it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderParams {
    pub sigma: Q,
    pub alpha: BoundaryMeasure,
    pub beta: Option<BoundaryMeasure>,
    pub rho1: Option<Q>,
    pub k: usize,
    pub lengths: Vec<usize>,
    /// Threshold `C` of the tightness probe `Pr(γ_L <= C)`.
    pub tightness_level: usize,
    pub tail_epsilon: Q,
}

impl LadderParams {
    pub fn new(sigma: Q, alpha: BoundaryMeasure, k: usize, lengths: Vec<usize>) -> Self {
        Self {
            sigma,
            alpha,
            beta: None,
            rho1: None,
            k,
            lengths,
            tightness_level: 10,
            tail_epsilon: default_tail_epsilon(),
        }
    }

    pub fn with_beta(mut self, beta: BoundaryMeasure) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_rho1(mut self, rho1: Q) -> Self {
        self.rho1 = Some(rho1);
        self
    }

    fn check_lengths(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::InvalidArgument("empty ladder".into()));
        }
        if self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "ladder lengths must be strictly increasing, got {:?}",
                self.lengths
            )));
        }
        if self.lengths[0] < self.k.max(1) {
            return Err(Error::InvalidArgument(format!(
                "every length must be >= max(K, 1) = {}",
                self.k.max(1)
            )));
        }
        Ok(())
    }
}

pub trait Ladder: Named + Send + Sync {
    fn run(&self, params: &LadderParams) -> Result<LadderReport>;
}

/// The built-in ladders.
pub fn ladders() -> Registry<dyn Ladder> {
    let mut r: Registry<dyn Ladder> = Registry::new("ladder");
    r.register(Box::new(FiniteMomentLadder))
        .register(Box::new(GeometricRightLadder))
        .register(Box::new(ZeroLevelLadder));
    r
}

fn strictly_decreasing(v: &[&Q]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn build_rows<F>(lengths: &[usize], row: F) -> Result<Vec<LadderRow>>
where
    F: Fn(usize) -> Result<Vec<Q>> + Sync,
{
    lengths
        .par_iter()
        .map(|&l| Ok(LadderRow { length: l, values: row(l)? }))
        .collect()
}

fn finish(ladder: &'static str, params: Value, columns: Vec<&'static str>, rows: Vec<LadderRow>, monotone: &[&str]) -> LadderReport {
    let mut report = LadderReport {
        ladder,
        params,
        columns,
        rows,
        verdicts: BTreeMap::new(),
    };
    for name in monotone {
        let ok = report.column(name).is_some_and(|c| strictly_decreasing(&c));
        report.verdicts.insert(format!("{name}_decreasing"), ok);
    }
    report
}

/// Truncated limit initial law with a certified tail.
fn limit_initial(spec: &InitialLawSpec, eps: &Q) -> Result<DistTable> {
    spec.validate()?;
    initial_law(spec, spec.certified_cap(eps))
}

struct FiniteMomentLadder;

impl Named for FiniteMomentLadder {
    fn name(&self) -> &'static str {
        "theorem1"
    }
    fn summary(&self) -> &'static str {
        "both ends against P(σ) chains from size-biased laws, plus the end-point independence gap"
    }
}

/// Exact laws against the P(σ) limits from both ends, and the end-point independence gap.
pub fn theorem1_ladder(params: &LadderParams) -> Result<LadderReport> {
    params.check_lengths()?;
    let beta = params
        .beta
        .clone()
        .ok_or_else(|| Error::InvalidArgument("theorem1 ladder needs a beta measure".into()))?;
    let sigma = &params.sigma;
    let eps = &params.tail_epsilon;
    let kernel = KernelSpec::p(sigma.clone())?;
    let left_init = limit_initial(&InitialLawSpec::SizeBiased(params.alpha.clone()), eps)?;
    let right_init = limit_initial(&InitialLawSpec::SizeBiased(beta.clone()), eps)?;
    let left_limit = chain_fdd_law(&kernel, &left_init, params.k)?;
    let right_limit = chain_fdd_law(&kernel, &right_init, params.k)?;
    let ends_limit = left_init.product(&right_init);
    let limit_tail = ends_limit.tail_mass().clone();

    let rows = build_rows(&params.lengths, |l| {
        let spec = ModelSpec::constant(sigma.clone(), params.alpha.clone(), beta.clone(), l)?
            .with_tail_epsilon(eps.clone())?;
        let model = ExactModel::new(spec)?;
        let left = model.left_fdd_law(params.k)?;
        let right = model.right_fdd_law(params.k, false)?;
        let ends = model.endpoint_law()?;
        Ok(vec![
            tv_distance(&left, &left_limit),
            tv_distance(&right, &right_limit),
            tv_distance(&ends, &ends_limit),
            model.tail_mass() + &limit_tail,
        ])
    })?;
    let p = json!({
        "sigma": to_pq(sigma), "alpha": params.alpha.to_string(), "beta": beta.to_string(), "K": params.k,
    });
    let mut report = finish(
        "theorem1",
        p,
        vec!["tv_left", "tv_right", "independence_gap", "tail_bound"],
        rows,
        &["tv_left", "tv_right", "independence_gap"],
    );
    report.verdicts.insert("within_hypotheses".into(), sigma.is_positive());
    Ok(report)
}

impl Ladder for FiniteMomentLadder {
    fn run(&self, params: &LadderParams) -> Result<LadderReport> {
        theorem1_ladder(params)
    }
}

struct GeometricRightLadder;

impl Named for GeometricRightLadder {
    fn name(&self) -> &'static str {
        "theorem2"
    }
    fn summary(&self) -> &'static str {
        "geometric right boundary ρ1 >= 1: Q(ρ1, σ) chain on the left, i.i.d. ξ increments on the right, escape of γ_L"
    }
}

/// Converts anchored cumulative values `(y_1, …, y_K)` (with `y_0 = 0`) to consecutive steps.
fn steps_from_cumulative(s: &[i64]) -> Vec<i64> {
    let mut prev = 0;
    s.iter()
        .map(|&y| {
            let d = y - prev;
            prev = y;
            d
        })
        .collect()
}

/// Exact laws against the Q(ρ1, σ) chain and the ξ product law, with the tightness probe.
pub fn theorem2_ladder(params: &LadderParams) -> Result<LadderReport> {
    params.check_lengths()?;
    let rho1 = match (&params.rho1, &params.beta) {
        (Some(r), _) => r.clone(),
        (None, Some(BoundaryMeasure::Geometric(r))) => r.clone(),
        _ => return Err(Error::InvalidArgument("theorem2 ladder needs rho1".into())),
    };
    if rho1 < Q::one() {
        return Err(Error::Hypothesis(format!("theorem2 ladder needs rho1 >= 1, got {rho1}")));
    }
    let sigma = &params.sigma;
    let eps = &params.tail_epsilon;
    let beta = BoundaryMeasure::geometric(rho1.clone())?;
    let kernel = KernelSpec::q(rho1.clone(), sigma.clone())?;
    let init = limit_initial(&InitialLawSpec::QDeformed(params.alpha.clone(), rho1.clone()), eps)?;
    let left_limit = chain_fdd_law(&kernel, &init, params.k)?;
    let xi_limit = xi_product(&rho1, sigma, params.k)?;
    let level = params.tightness_level as i64;

    let rows = build_rows(&params.lengths, |l| {
        let spec = ModelSpec::constant(sigma.clone(), params.alpha.clone(), beta.clone(), l)?
            .with_tail_epsilon(eps.clone())?;
        let model = ExactModel::new(spec)?;
        let left = model.left_fdd_law(params.k)?;
        let steps = model.right_fdd_law(params.k, true)?.map(steps_from_cumulative);
        let end = model.right_fdd_law(0, false)?;
        let low: Q = end.iter().filter(|(s, _)| s[0] <= level).map(|(_, p)| p).sum();
        Ok(vec![
            tv_distance(&left, &left_limit),
            tv_distance(&steps, &xi_limit),
            low,
            model.tail_mass() + init.tail_mass(),
        ])
    })?;
    let p = json!({
        "sigma": to_pq(sigma), "alpha": params.alpha.to_string(), "rho1": to_pq(&rho1),
        "K": params.k, "tightness_level": params.tightness_level,
    });
    let mut report = finish(
        "theorem2",
        p,
        vec!["tv_left", "tv_right", "tightness", "tail_bound"],
        rows,
        &["tv_left", "tv_right", "tightness"],
    );
    report.verdicts.insert("within_hypotheses".into(), sigma.is_positive());
    Ok(report)
}

impl Ladder for GeometricRightLadder {
    fn run(&self, params: &LadderParams) -> Result<LadderReport> {
        theorem2_ladder(params)
    }
}

struct ZeroLevelLadder;

impl Named for ZeroLevelLadder {
    fn name(&self) -> &'static str {
        "zero-sigma"
    }
    fn summary(&self) -> &'static str {
        "σ = 0, boundary support {0, 1}: Pr(γ_L = 1) against 4α1β1/(α0β0 + 4α1β1)"
    }
}

/// The limit `4 α_1 β_1 / (α_0 β_0 + 4 α_1 β_1)` of `Pr(γ_{2N} = 1)` when `σ = 0`.
pub fn zero_level_limit(alpha: &BoundaryMeasure, beta: &BoundaryMeasure) -> Result<Q> {
    let two_point = |m: &BoundaryMeasure| match m.max_support() {
        Some(top) if top <= 1 => Ok((m.weight(0), m.weight(1))),
        _ => Err(Error::InvalidArgument("boundary measures must be supported on {0, 1}".into())),
    };
    let (a0, a1) = two_point(alpha)?;
    let (b0, b1) = two_point(beta)?;
    let num = int(4) * a1 * b1;
    let den = a0 * b0 + &num;
    if den.is_zero() {
        return Err(Error::ZeroMass("limit weights vanish".into()));
    }
    Ok(num / den)
}

impl Ladder for ZeroLevelLadder {
    fn run(&self, params: &LadderParams) -> Result<LadderReport> {
        params.check_lengths()?;
        let beta = params
            .beta
            .clone()
            .ok_or_else(|| Error::InvalidArgument("zero-sigma ladder needs a beta measure".into()))?;
        if !params.sigma.is_zero() {
            return Err(Error::InvalidArgument("zero-sigma ladder is defined for sigma = 0".into()));
        }
        if params.lengths.iter().any(|l| l % 2 == 1) {
            return Err(Error::InvalidArgument("zero-sigma ladder needs even lengths".into()));
        }
        let limit = zero_level_limit(&params.alpha, &beta)?;
        let rows = build_rows(&params.lengths, |l| {
            let spec = ModelSpec::constant(Q::zero(), params.alpha.clone(), beta.clone(), l)?;
            let end = ExactModel::new(spec)?.right_fdd_law(0, false)?;
            let p = end.prob(&[1]);
            let gap = (&p - &limit).abs();
            Ok(vec![p, gap])
        })?;
        let p = json!({
            "sigma": "0/1", "alpha": params.alpha.to_string(), "beta": beta.to_string(), "limit": to_pq(&limit),
        });
        Ok(finish("zero-sigma", p, vec!["prob_end_one", "gap_to_limit"], rows, &["gap_to_limit"]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn fin(w: &[i64]) -> BoundaryMeasure {
        BoundaryMeasure::FiniteSupport(w.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn tv_basics() {
        let a = DistTable::point(vec![0]);
        let b = DistTable::from_weights([(vec![0], int(1)), (vec![1], int(1))]).unwrap();
        assert_eq!(tv_distance(&a, &a), int(0));
        assert_eq!(tv_distance(&a, &DistTable::point(vec![1])), int(1));
        assert_eq!(tv_distance(&a, &b), frac(1, 2));
    }

    #[test]
    fn degenerate_left_boundary() {
        let params = LadderParams::new(int(1), fin(&[1]), 0, vec![1, 2, 5]).with_beta(fin(&[1, 1]));
        let r = theorem1_ladder(&params).unwrap();
        for v in r.column("tv_left").unwrap() {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn zero_level_catalan_ratio() {
        let params = LadderParams::new(int(0), fin(&[1, 1]), 0, vec![2, 4]).with_beta(fin(&[1, 1]));
        let r = ladders().get("zero-sigma").unwrap().run(&params).unwrap();
        // C_2 / (C_1 + C_2) = 2/3, C_3 / (C_2 + C_3) = 5/7.
        let p = r.column("prob_end_one").unwrap();
        assert_eq!((p[0].clone(), p[1].clone()), (frac(2, 3), frac(5, 7)));
        assert_eq!(r.verdict("gap_to_limit_decreasing"), Some(true));
    }

    #[test]
    fn steps_from_anchor() {
        assert_eq!(steps_from_cumulative(&[-1, -1, 0]), vec![-1, 0, 1]);
    }

    #[test]
    fn bad_ladders() {
        let p = LadderParams::new(int(1), fin(&[1]), 1, vec![4, 4]).with_beta(fin(&[1]));
        assert!(theorem1_ladder(&p).is_err());
        let p = LadderParams::new(int(1), fin(&[1]), 1, vec![4, 8]);
        assert!(theorem1_ladder(&p).is_err());
        let p = LadderParams::new(int(1), fin(&[1]), 1, vec![4, 8]).with_rho1(frac(1, 2));
        assert!(theorem2_ladder(&p).is_err());
    }

    #[test]
    fn report_formats() {
        let params = LadderParams::new(int(1), fin(&[1, 1]), 1, vec![2, 4]).with_beta(fin(&[1, 1]));
        let r = theorem1_ladder(&params).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("L,tv_left,tv_right,independence_gap,tail_bound\n2,"));
        assert_eq!(csv.lines().count(), 3);
        let j = r.to_json();
        assert_eq!(j["rows"][1]["L"], json!(4));
        assert!(j["rows"][0]["tv_left"]["exact"].as_str().unwrap().contains('/'));
    }
}
