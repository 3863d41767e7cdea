//! Exact transfer-matrix computations for the law `Pr_L` of a weighted Motzkin path.
//!
//! Every quantity here is an exact rational. Geometric left boundary measures
//! are the only source of truncation: starting altitudes above a level `M` are
//! dropped, the dropped probability is computed exactly from the free-path
//! closed form, and every law is reported conditionally on `γ_0 <= M` with
//! that probability attached as `tail_mass`.

mod table;

pub use table::{apply_weights, free_weight, TransferMatrix, WeightTable};

use num_traits::{One, Zero};

use crate::dist::DistTable;
use crate::error::{Error, Result};
use crate::model::{BoundaryMeasure, ModelSpec, WeightConfig};
use crate::rational::{pow, Q};

/// A model spec together with its backward sums and normalization.
#[derive(Debug, Clone)]
pub struct ExactModel {
    spec: ModelSpec,
    max_start: usize,
    bound: usize,
    /// `backward[j][n] = Σ_{n'} W^(j)_{n,n'} β_{n'}`, exact whenever `n + j <= bound`.
    backward: Vec<Vec<Q>>,
    normalization: Q,
    kept: Q,
    tail_mass: Q,
}

impl ExactModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let length = spec.length();
        let weights = spec.weights().clone();

        let geometric_tail = geometric_alpha_tail(&spec, &Q::one(), &Q::one());
        let max_start = match spec.alpha().max_support() {
            Some(m) => m,
            None => {
                // Smallest M >= L-1 with r^(M+1-L) <= eps; since the normalization is at least
                // the closed-form mass above L, this certifies a relative tail <= eps.
                let r = ratio_product(&spec);
                let mut j = 0usize;
                let mut rj = Q::one();
                while &rj > spec.tail_epsilon() {
                    rj *= &r;
                    j += 1;
                }
                length - 1 + j
            }
        };
        let bound = max_start + length;

        let mut backward = Vec::with_capacity(length + 1);
        backward.push((0..=bound).map(|n| spec.beta().weight(n)).collect::<Vec<_>>());
        for _ in 0..length {
            let next = apply_weights(&weights, backward.last().expect("non-empty"), bound);
            backward.push(next);
        }

        let start_mass = |m: usize| spec.alpha().weight(m) * &backward[length][m];
        let kept: Q = (0..=max_start).map(start_mass).sum();
        let normalization = match &geometric_tail {
            None => kept.clone(),
            Some(tail_from_l) => (0..length).map(start_mass).sum::<Q>() + tail_from_l,
        };
        if normalization.is_zero() {
            return Err(Error::ZeroMass(format!(
                "normalization constant vanishes for L = {length}"
            )));
        }
        let tail_mass = (&normalization - &kept) / &normalization;

        if geometric_tail.is_some() {
            // The dropped mass must match the closed-form tail beyond M.
            let r = ratio_product(&spec);
            let phi = free_sum(length, spec.weights().sigma().expect("constant"), spec.beta().ratio().expect("geom"));
            let expected = pow(&r, max_start + 1) * phi / (Q::one() - &r);
            if expected != &normalization - &kept {
                return Err(Error::Consistency("geometric tail mismatch".into()));
            }
        }

        Ok(Self {
            spec,
            max_start,
            bound,
            backward,
            normalization,
            kept,
            tail_mass,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn length(&self) -> usize {
        self.spec.length()
    }

    /// Largest starting altitude retained (the support bound or the truncation level).
    pub fn max_start(&self) -> usize {
        self.max_start
    }

    /// Height bound `H = M + L` of every table used; lossless for retained starts.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn normalization(&self) -> &Q {
        &self.normalization
    }

    /// Exact `Pr(γ_0 > M)`; zero for finitely supported `alpha`.
    pub fn tail_mass(&self) -> &Q {
        &self.tail_mass
    }

    /// Total weight `Σ_{m <= M} α_m S_L(m)` of the retained starts.
    pub fn kept_mass(&self) -> &Q {
        &self.kept
    }

    /// `S_j(n) = Σ_{n'} W^(j)_{n,n'} β_{n'}`.
    pub fn backward_sum(&self, j: usize, n: usize) -> Q {
        self.backward
            .get(j)
            .and_then(|row| row.get(n))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn weights(&self) -> &WeightConfig {
        self.spec.weights()
    }

    /// `F_k(n) = Σ_{m <= M} α_m W^(k)_{m,n}` for `k = 0..=L`.
    pub fn forward_sums(&self) -> Vec<Vec<Q>> {
        let mut out = Vec::with_capacity(self.length() + 1);
        out.push(
            (0..=self.bound)
                .map(|n| {
                    if n <= self.max_start {
                        self.spec.alpha().weight(n)
                    } else {
                        Q::zero()
                    }
                })
                .collect::<Vec<_>>(),
        );
        for _ in 0..self.length() {
            let prev = out.last().expect("non-empty");
            out.push(apply_transposed(self.weights(), prev, self.bound));
        }
        out
    }

    /// Joint law of `(γ_0, …, γ_K)`.
    pub fn left_fdd_law(&self, k: usize) -> Result<DistTable> {
        self.check_k(k)?;
        let weights = self.weights();
        let rest = &self.backward[self.length() - k];
        let mut atoms = Vec::new();
        for m0 in 0..=self.max_start {
            let a = self.spec.alpha().weight(m0);
            if a.is_zero() {
                continue;
            }
            let mut prefix = vec![m0 as i64];
            extend_paths(weights, &mut prefix, a, k, &mut |path, w| {
                let last = *path.last().expect("non-empty") as usize;
                atoms.push((path.to_vec(), w * &rest[last]));
            });
        }
        Ok(DistTable::from_weights(atoms)?.with_tail_mass(self.tail_mass.clone()))
    }

    /// Joint law read from the right end.
    ///
    /// Unanchored: `(γ_L, γ_{L-1}, …, γ_{L-K})`. Anchored: `(γ_{L-1} - γ_L, …, γ_{L-K} - γ_L)`.
    pub fn right_fdd_law(&self, k: usize, anchored: bool) -> Result<DistTable> {
        self.check_k(k)?;
        let weights = self.weights();
        let forward = self.forward_sums();
        let head = &forward[self.length() - k];
        let mut atoms = Vec::new();
        for end in 0..=self.bound {
            let b = self.spec.beta().weight(end);
            if b.is_zero() {
                continue;
            }
            let mut suffix = vec![end as i64];
            extend_paths_backward(weights, self.bound, &mut suffix, b, k, &mut |rev, w| {
                let first = *rev.last().expect("non-empty") as usize;
                atoms.push((rev.to_vec(), w * &head[first]));
            });
        }
        let table = DistTable::from_weights(atoms)?.with_tail_mass(self.tail_mass.clone());
        if anchored {
            Ok(table.map(|s| s[1..].iter().map(|x| x - s[0]).collect()))
        } else {
            Ok(table)
        }
    }

    /// Joint law of the end-points `(γ_0, γ_L)`.
    pub fn endpoint_law(&self) -> Result<DistTable> {
        let length = self.length();
        let weights = self.weights();
        let mut atoms = Vec::new();
        for m0 in 0..=self.max_start {
            let a = self.spec.alpha().weight(m0);
            if a.is_zero() {
                continue;
            }
            // Far from the floor the constant-case weights are free walks.
            let row: Vec<(usize, Q)> = if let (Some(sigma), true) = (weights.sigma(), m0 >= length) {
                (m0 - length..=m0 + length)
                    .map(|n| (n, free_weight(length, n as i64 - m0 as i64, sigma)))
                    .collect()
            } else {
                let mut v = vec![Q::zero(); self.bound + 1];
                v[m0] = Q::one();
                for _ in 0..length {
                    v = apply_transposed(weights, &v, self.bound);
                }
                v.into_iter().enumerate().collect()
            };
            for (n, w) in row {
                let b = self.spec.beta().weight(n);
                if !b.is_zero() && !w.is_zero() {
                    atoms.push((vec![m0 as i64, n as i64], &a * w * b));
                }
            }
        }
        Ok(DistTable::from_weights(atoms)?.with_tail_mass(self.tail_mass.clone()))
    }

    /// Joint law of `(γ_{i_1}, …, γ_{i_k})` for strictly increasing coordinates `<= L`.
    pub fn coordinate_law(&self, coords: &[usize]) -> Result<DistTable> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("no coordinates given".into()));
        }
        if coords.windows(2).any(|w| w[0] >= w[1]) || *coords.last().expect("non-empty") > self.length() {
            return Err(Error::InvalidArgument(format!(
                "coordinates must be strictly increasing and <= L = {}, got {coords:?}",
                self.length()
            )));
        }
        let forward = self.forward_sums();
        let first = &forward[coords[0]];
        let last_rest = &self.backward[self.length() - coords[coords.len() - 1]];
        let gaps = coords
            .windows(2)
            .map(|w| WeightTable::build(self.weights(), w[1] - w[0], self.bound))
            .collect::<Result<Vec<_>>>()?;

        let mut atoms = Vec::new();
        let mut stack: Vec<(Vec<i64>, Q)> = (0..=self.bound)
            .filter(|&x| !first[x].is_zero())
            .map(|x| (vec![x as i64], first[x].clone()))
            .collect();
        while let Some((tuple, w)) = stack.pop() {
            let cur = *tuple.last().expect("non-empty") as usize;
            if tuple.len() == coords.len() {
                atoms.push((tuple, w * &last_rest[cur]));
                continue;
            }
            let gap = &gaps[tuple.len() - 1];
            for y in 0..=self.bound {
                let t = gap.entry(cur, y);
                if !t.is_zero() {
                    let mut next = tuple.clone();
                    next.push(y as i64);
                    stack.push((next, &w * t));
                }
            }
        }
        Ok(DistTable::from_weights(atoms)?.with_tail_mass(self.tail_mass.clone()))
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.length() {
            return Err(Error::InvalidArgument(format!(
                "K = {k} exceeds the path length L = {}",
                self.length()
            )));
        }
        Ok(())
    }
}

/// `v M` (row vector times the weight operator): `(vM)_n = v_{n-1} a_{n-1} + v_n b_n + v_{n+1} c_{n+1}`.
fn apply_transposed(weights: &WeightConfig, v: &[Q], bound: usize) -> Vec<Q> {
    (0..=bound)
        .map(|n| {
            let mut acc = weights.level(n) * &v[n];
            if n >= 1 {
                acc += weights.up(n - 1) * &v[n - 1];
            }
            if n < bound {
                acc += weights.down(n + 1) * &v[n + 1];
            }
            acc
        })
        .collect()
}

fn extend_paths(
    weights: &WeightConfig,
    path: &mut Vec<i64>,
    weight: Q,
    steps: usize,
    emit: &mut dyn FnMut(&[i64], Q),
) {
    if steps == 0 {
        emit(path, weight);
        return;
    }
    let cur = *path.last().expect("non-empty") as usize;
    for next in [cur.wrapping_sub(1), cur, cur + 1] {
        if next == usize::MAX {
            continue;
        }
        let w = weights.step(cur, next);
        if w.is_zero() {
            continue;
        }
        path.push(next as i64);
        extend_paths(weights, path, &weight * w, steps - 1, emit);
        path.pop();
    }
}

/// Like [`extend_paths`] but walking leftwards: each new entry is the altitude one step earlier.
/// Extends below heights `<= bound`; higher ones are unreachable from retained starts.
fn extend_paths_backward(
    weights: &WeightConfig,
    bound: usize,
    rev: &mut Vec<i64>,
    weight: Q,
    steps: usize,
    emit: &mut dyn FnMut(&[i64], Q),
) {
    if steps == 0 {
        emit(rev, weight);
        return;
    }
    let cur = *rev.last().expect("non-empty") as usize;
    for prev in [cur.wrapping_sub(1), cur, cur + 1] {
        if prev == usize::MAX || prev > bound {
            continue;
        }
        let w = weights.step(prev, cur);
        if w.is_zero() {
            continue;
        }
        rev.push(prev as i64);
        extend_paths_backward(weights, bound, rev, &weight * w, steps - 1, emit);
        rev.pop();
    }
}

fn ratio_product(spec: &ModelSpec) -> Q {
    match (spec.alpha(), spec.beta()) {
        (BoundaryMeasure::Geometric(r0), BoundaryMeasure::Geometric(r1)) => r0 * r1,
        _ => Q::zero(),
    }
}

/// `Σ_k T_L(k) x^k`.
fn free_sum(length: usize, sigma: &Q, x: &Q) -> Q {
    let l = length as i64;
    (-l..=l)
        .map(|k| {
            let xk = if k >= 0 { pow(x, k as usize) } else { pow(&x.recip(), (-k) as usize) };
            free_weight(length, k, sigma) * xk
        })
        .sum()
}

/// Closed-form `Σ_{m >= L} (ρ0 z0)^m Σ_n W^(L)_{m,n} (ρ1 z1)^n` for geometric `alpha`; `None` otherwise.
fn geometric_alpha_tail(spec: &ModelSpec, z0: &Q, z1: &Q) -> Option<Q> {
    let (BoundaryMeasure::Geometric(r0), BoundaryMeasure::Geometric(r1)) = (spec.alpha(), spec.beta()) else {
        return None;
    };
    let sigma = spec.weights().sigma()?;
    let x1 = r1 * z1;
    let r = r0 * z0 * &x1;
    Some(pow(&r, spec.length()) / (Q::one() - &r) * free_sum(spec.length(), sigma, &x1))
}

/// `𝔠_{α,β,L} = Σ_{m,n} α_m W^(L)_{m,n} β_n`, exact (closed-form tail for geometric `alpha`).
pub fn normalization_constant(spec: &ModelSpec) -> Result<Q> {
    Ok(ExactModel::new(spec.clone())?.normalization)
}

pub fn left_fdd_law(spec: &ModelSpec, k: usize) -> Result<DistTable> {
    ExactModel::new(spec.clone())?.left_fdd_law(k)
}

pub fn right_fdd_law(spec: &ModelSpec, k: usize, anchored: bool) -> Result<DistTable> {
    ExactModel::new(spec.clone())?.right_fdd_law(k, anchored)
}

pub fn weight_table(weights: &WeightConfig, length: usize, bound: usize) -> Result<WeightTable> {
    WeightTable::build(weights, length, bound)
}

/// Both evaluations of the end-point generating function.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointPgf {
    /// `Σ α_m z0^m W_{m,n} β_n z1^n / 𝔠` from the weight table.
    pub direct: Q,
    /// `V_α(z0)^T M^L W_β(z1) / 𝔠` by repeated tridiagonal products.
    pub matrix: Q,
}

/// `E[z0^{γ_0} z1^{γ_L}]` for `z0, z1 ∈ (0, 1]`, computed two ways; they must agree exactly.
pub fn endpoint_pgf(spec: &ModelSpec, z0: &Q, z1: &Q) -> Result<Q> {
    let both = endpoint_pgf_both(spec, z0, z1)?;
    if both.direct != both.matrix {
        return Err(Error::Consistency(format!(
            "pgf routes disagree: direct {} vs matrix {}",
            both.direct, both.matrix
        )));
    }
    Ok(both.direct)
}

pub fn endpoint_pgf_both(spec: &ModelSpec, z0: &Q, z1: &Q) -> Result<EndpointPgf> {
    for (name, z) in [("z0", z0), ("z1", z1)] {
        if z <= &Q::zero() || z > &Q::one() {
            return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1], got {z}")));
        }
    }
    let length = spec.length();
    let weights = spec.weights();
    let finite_top = spec.alpha().max_support().unwrap_or(length - 1);
    let bound = finite_top + length;

    let v: Vec<Q> = (0..=finite_top).map(|m| spec.alpha().weight(m) * pow(z0, m)).collect();
    let w_vec = |z: &Q| -> Vec<Q> { (0..=bound).map(|n| spec.beta().weight(n) * pow(z, n)).collect() };

    let table = WeightTable::build(weights, length, bound)?;
    let direct_sum = |z0: &Q, z1: &Q| -> Q {
        let w = w_vec(z1);
        let mut acc = Q::zero();
        for m in 0..=finite_top {
            let vm = spec.alpha().weight(m) * pow(z0, m);
            if vm.is_zero() {
                continue;
            }
            let row: Q = (0..=bound).map(|n| table.entry(m, n) * &w[n]).sum();
            acc += vm * row;
        }
        acc + geometric_alpha_tail(spec, z0, z1).unwrap_or_else(Q::zero)
    };

    let matrix_sum = |z1: &Q, v: &[Q]| -> Q {
        let mut w = w_vec(z1);
        match weights.sigma() {
            Some(sigma) => {
                let m1 = TransferMatrix::new(Q::one(), sigma.clone(), bound).expect("t = 1");
                for _ in 0..length {
                    w = m1.apply(&w);
                }
            }
            None => {
                for _ in 0..length {
                    w = apply_weights(weights, &w, bound);
                }
            }
        }
        v.iter().zip(&w).map(|(a, b)| a * b).sum()
    };

    let one = Q::one();
    let norm_direct = direct_sum(&one, &one);
    if norm_direct.is_zero() {
        return Err(Error::ZeroMass("normalization constant vanishes".into()));
    }
    let v_one: Vec<Q> = (0..=finite_top).map(|m| spec.alpha().weight(m)).collect();
    let tail = |z0: &Q, z1: &Q| geometric_alpha_tail(spec, z0, z1).unwrap_or_else(Q::zero);
    let norm_matrix = matrix_sum(&one, &v_one) + tail(&one, &one);

    Ok(EndpointPgf {
        direct: direct_sum(z0, z1) / norm_direct,
        matrix: (matrix_sum(z1, &v) + tail(z0, z1)) / norm_matrix,
    })
}

/// Right-hand side of the transfer-matrix identity for the mixed generating function
/// `E[z0^{γ_0} ∏ t_j^{γ_j-γ_{j-1}} ∏ s_j^{γ_{L-j}-γ_{L+1-j}} z1^{γ_L}]`:
/// `V_α(z0)^T M_{t_1}⋯M_{t_K} M_1^{L-2K} M_{1/s_K}⋯M_{1/s_1} W_β(z1) / 𝔠`.
///
/// Constant weights and finitely supported boundary measures only; needs `2K <= L`.
pub fn mixed_pgf_transfer(spec: &ModelSpec, z0: &Q, ts: &[Q], ss: &[Q], z1: &Q) -> Result<Q> {
    let sigma = spec
        .weights()
        .sigma()
        .ok_or_else(|| Error::InvalidArgument("transfer identity needs constant weights".into()))?;
    let (Some(ma), Some(mb)) = (spec.alpha().max_support(), spec.beta().max_support()) else {
        return Err(Error::InvalidArgument("transfer identity needs finite boundary measures".into()));
    };
    let k = ts.len();
    if ss.len() != k || 2 * k > spec.length() {
        return Err(Error::InvalidArgument("need |t| = |s| = K with 2K <= L".into()));
    }
    let bound = ma.max(mb) + spec.length();
    let mut w: Vec<Q> = (0..=bound).map(|n| spec.beta().weight(n) * pow(z1, n)).collect();
    for s in ss {
        w = TransferMatrix::new(s.recip(), sigma.clone(), bound)?.apply(&w);
    }
    let m1 = TransferMatrix::new(Q::one(), sigma.clone(), bound)?;
    for _ in 0..spec.length() - 2 * k {
        w = m1.apply(&w);
    }
    for t in ts.iter().rev() {
        w = TransferMatrix::new(t.clone(), sigma.clone(), bound)?.apply(&w);
    }
    let numerator: Q = (0..=ma).map(|m| spec.alpha().weight(m) * pow(z0, m) * &w[m]).sum();
    Ok(numerator / normalization_constant(spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn fin(w: &[i64]) -> BoundaryMeasure {
        BoundaryMeasure::FiniteSupport(w.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn point_boundaries_give_return_weight() {
        let spec = ModelSpec::constant(frac(1, 2), fin(&[1]), fin(&[1]), 4).unwrap();
        let w = WeightConfig::constant(frac(1, 2)).unwrap();
        let t = WeightTable::build(&w, 4, 6).unwrap();
        assert_eq!(normalization_constant(&spec).unwrap(), t.get(0, 0));
    }

    #[test]
    fn four_single_steps() {
        let spec = ModelSpec::constant(int(1), fin(&[1, 1]), fin(&[1, 1]), 1).unwrap();
        assert_eq!(normalization_constant(&spec).unwrap(), int(4));
    }

    #[test]
    fn first_altitude_law() {
        let spec = ModelSpec::constant(int(1), fin(&[1, 1]), fin(&[1]), 2).unwrap();
        let law = left_fdd_law(&spec, 0).unwrap();
        assert_eq!(law.prob(&[0]), frac(1, 2));
        assert_eq!(law.prob(&[1]), frac(1, 2));
    }

    #[test]
    fn anchored_increment_two_paths() {
        let spec = ModelSpec::constant(int(1), fin(&[1]), fin(&[1]), 2).unwrap();
        let law = right_fdd_law(&spec, 1, true).unwrap();
        assert_eq!(law.prob(&[0]), frac(1, 2));
        assert_eq!(law.prob(&[1]), frac(1, 2));
        assert_eq!(law.len(), 2);
    }

    #[test]
    fn marginal_consistency() {
        let spec = ModelSpec::constant(frac(1, 2), fin(&[1, 2, 1]), fin(&[3, 1]), 7).unwrap();
        let model = ExactModel::new(spec).unwrap();
        for k in 1..=4 {
            let hi = model.left_fdd_law(k).unwrap();
            let lo = model.left_fdd_law(k - 1).unwrap();
            assert_eq!(hi.marginal(&(0..k).collect::<Vec<_>>()), lo);
            let rhi = model.right_fdd_law(k, false).unwrap();
            let rlo = model.right_fdd_law(k - 1, false).unwrap();
            assert_eq!(rhi.marginal(&(0..k).collect::<Vec<_>>()), rlo);
        }
    }

    #[test]
    fn coordinate_law_agrees_with_fdd() {
        let spec = ModelSpec::constant(int(1), fin(&[1, 1]), fin(&[1, 0, 2]), 6).unwrap();
        let model = ExactModel::new(spec).unwrap();
        assert_eq!(model.coordinate_law(&[0, 1, 2]).unwrap(), model.left_fdd_law(2).unwrap());
        assert_eq!(model.coordinate_law(&[0, 6]).unwrap(), model.endpoint_law().unwrap());
        let right = model.right_fdd_law(1, false).unwrap().map(|s| vec![s[1], s[0]]);
        assert_eq!(model.coordinate_law(&[5, 6]).unwrap(), right);
        assert!(model.coordinate_law(&[2, 1]).is_err());
        assert!(model.coordinate_law(&[7]).is_err());
    }

    #[test]
    fn k_beyond_length_rejected() {
        let spec = ModelSpec::constant(int(1), fin(&[1]), fin(&[1]), 2).unwrap();
        assert!(left_fdd_law(&spec, 3).is_err());
        assert!(right_fdd_law(&spec, 3, true).is_err());
    }

    #[test]
    fn zero_mass_rejected() {
        // sigma = 0 with point masses at 0 and odd length admits no path.
        let spec = ModelSpec::constant(int(0), fin(&[1]), fin(&[1]), 3).unwrap();
        assert!(matches!(normalization_constant(&spec), Err(Error::ZeroMass(_))));
    }

    #[test]
    fn pgf_total_mass_and_routes() {
        let spec = ModelSpec::constant(frac(1, 2), fin(&[1, 2]), fin(&[1, 1, 1]), 5).unwrap();
        assert_eq!(endpoint_pgf(&spec, &int(1), &int(1)).unwrap(), int(1));
        let both = endpoint_pgf_both(&spec, &frac(1, 3), &frac(3, 4)).unwrap();
        assert_eq!(both.direct, both.matrix);
        let spec = ModelSpec::constant(int(1), fin(&[1]), fin(&[1]), 4).unwrap();
        assert_eq!(endpoint_pgf(&spec, &frac(1, 5), &frac(2, 7)).unwrap(), int(1));
        assert!(endpoint_pgf(&spec, &int(0), &int(1)).is_err());
    }

    #[test]
    fn pgf_with_general_weights() {
        let w = WeightConfig::general(
            vec![int(1), frac(1, 2)],
            vec![int(2), int(1)],
            vec![int(1), int(3)],
        )
        .unwrap();
        let spec = ModelSpec::new(w, fin(&[1, 1]), BoundaryMeasure::Geometric(frac(2, 1)), 4).unwrap();
        let both = endpoint_pgf_both(&spec, &frac(1, 2), &frac(1, 3)).unwrap();
        assert_eq!(both.direct, both.matrix);
    }

    #[test]
    fn geometric_alpha_tail_is_exact() {
        let g = |p, q| BoundaryMeasure::Geometric(frac(p, q));
        let spec = ModelSpec::constant(int(1), g(1, 2), g(1, 1), 2).unwrap();
        let model = ExactModel::new(spec.clone()).unwrap();
        // Naive summation over m <= 200; the remainder is below 2^-190.
        let w = WeightConfig::constant(int(1)).unwrap();
        let table = WeightTable::build(&w, 2, 205).unwrap();
        let naive: Q = (0..=200usize)
            .map(|m| pow(&frac(1, 2), m) * (0..=203usize).map(|n| table.get(m, n)).sum::<Q>())
            .sum();
        let diff = model.normalization() - &naive;
        assert!(diff > Q::zero());
        assert!(diff < pow(&frac(1, 2), 190));
        assert!(model.tail_mass() < spec.tail_epsilon());
        assert!(model.tail_mass() > &Q::zero());
    }

    #[test]
    fn geometric_pgf_routes_agree() {
        let g = |p, q| BoundaryMeasure::Geometric(frac(p, q));
        let spec = ModelSpec::constant(int(1), g(1, 3), g(2, 1), 3).unwrap();
        let both = endpoint_pgf_both(&spec, &frac(1, 2), &frac(1, 4)).unwrap();
        assert_eq!(both.direct, both.matrix);
        assert_eq!(endpoint_pgf(&spec, &int(1), &int(1)).unwrap(), int(1));
    }

    #[test]
    fn right_law_with_geometric_end_matches_coordinates() {
        let spec = ModelSpec::constant(int(1), fin(&[1]), BoundaryMeasure::Geometric(int(2)), 6).unwrap();
        let model = ExactModel::new(spec).unwrap();
        let right = model.right_fdd_law(2, false).unwrap();
        let coords = model.coordinate_law(&[4, 5, 6]).unwrap();
        assert_eq!(right, coords.map(|s| vec![s[2], s[1], s[0]]));
    }
}
