//! Exact sampling of paths from `Pr_L` by backward filtering, forward sampling.
//!
//! `R_k(n)` is the total weight of completions from altitude `n` at time `k`:
//! `R_L = β` and `R_k(n) = a_n R_{k+1}(n+1) + b_n R_{k+1}(n) + c_n R_{k+1}(n-1)`.
//! A path starts at `m` with probability `∝ α_m R_0(m)` and moves `n -> n'`
//! with probability `w(n -> n') R_{k+1}(n') / R_k(n)`.

use num_traits::Zero;
use rand_core::RngCore;
use rayon::prelude::*;

use crate::dist::DistTable;
use crate::draw::{stream_rng, Cdf};
use crate::engine::ExactModel;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, MotzkinPath};
use crate::rational::Q;

/// Precomputed conditional CDFs for every reachable `(k, n)`.
#[derive(Debug, Clone)]
pub struct BackwardTable {
    model: ExactModel,
    start: Cdf,
    /// `steps[k][n]`: law of `γ_{k+1} - γ_k + 1` (0 down, 1 stay, 2 up) given `γ_k = n`, for `n <= M + k`.
    steps: Vec<Vec<Option<Cdf>>>,
}

pub fn build_backward_table(spec: &ModelSpec) -> Result<BackwardTable> {
    let model = ExactModel::new(spec.clone())?;
    let length = model.length();
    let m = model.max_start();
    let starts: Vec<Q> = (0..=m)
        .map(|i| spec.alpha().weight(i) * model.backward_sum(length, i))
        .collect();
    let start = Cdf::from_weights(&starts)?;

    let weights = spec.weights();
    let steps = (0..length)
        .map(|k| {
            let rest = length - k - 1;
            (0..=m + k)
                .map(|n| {
                    let cand = |to: Option<usize>| match to {
                        Some(to) => weights.step(n, to) * model.backward_sum(rest, to),
                        None => Q::zero(),
                    };
                    let w = [cand(n.checked_sub(1)), cand(Some(n)), cand(Some(n + 1))];
                    Cdf::from_weights(&w).ok()
                })
                .collect()
        })
        .collect();
    Ok(BackwardTable { model, start, steps })
}

impl BackwardTable {
    pub fn length(&self) -> usize {
        self.model.length()
    }

    /// `H`; every stored `R_k(n)` with `n <= H - (L - k)` is exact.
    pub fn bound(&self) -> usize {
        self.model.bound()
    }

    /// `R_k(n)`.
    pub fn remaining(&self, k: usize, n: usize) -> Q {
        self.model.backward_sum(self.length() - k, n)
    }

    pub fn model(&self) -> &ExactModel {
        &self.model
    }

    /// Exact `Pr(γ_0 > M)` excluded from the start draw.
    pub fn tail_mass(&self) -> &Q {
        self.model.tail_mass()
    }

    /// Conditional step law `(down, stay, up)` at `γ_k = n`, `None` where `R_k(n) = 0`.
    pub fn step_probs(&self, k: usize, n: usize) -> Option<[Q; 3]> {
        let cdf = self.steps.get(k)?.get(n)?.as_ref()?;
        Some([cdf.prob(0), cdf.prob(1), cdf.prob(2)])
    }

    /// Probability the sampler assigns to `path` (product of its conditional draws).
    pub fn path_probability(&self, path: &MotzkinPath) -> Q {
        let h = path.heights();
        if h.len() != self.length() + 1 || h[0] >= self.start.outcomes() {
            return Q::zero();
        }
        let mut p = self.start.prob(h[0]);
        for k in 0..self.length() {
            let Some(Some(cdf)) = self.steps[k].get(h[k]) else {
                return Q::zero();
            };
            p *= cdf.prob(h[k + 1] + 1 - h[k]);
        }
        p
    }

    fn draw<R: RngCore>(&self, rng: &mut R) -> MotzkinPath {
        let mut heights = Vec::with_capacity(self.length() + 1);
        let mut n = self.start.sample(rng);
        heights.push(n);
        for row in &self.steps {
            let cdf = row[n].as_ref().expect("reachable rows have positive mass");
            n = n + cdf.sample(rng) - 1;
            heights.push(n);
        }
        MotzkinPath::new(heights).expect("sampled steps are unit moves above zero")
    }
}

/// One path drawn from stream 0 of `seed`; pure in `(table, seed)`.
pub fn sample_path(table: &BackwardTable, seed: u64) -> MotzkinPath {
    table.draw(&mut stream_rng(seed, 0))
}

/// `count` paths, path `i` drawn from stream `i` of `seed`; identical for any thread count.
pub fn sample_paths(table: &BackwardTable, seed: u64, count: usize) -> Vec<MotzkinPath> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| table.draw(&mut stream_rng(seed, i)))
        .collect()
}

/// Empirical law of the selected coordinates; atoms are `count / N`.
pub fn empirical_fdd(paths: &[MotzkinPath], coords: &[usize]) -> Result<DistTable> {
    let first = paths
        .first()
        .ok_or_else(|| Error::InvalidArgument("no paths to tabulate".into()))?;
    let len = first.heights().len();
    if paths.iter().any(|p| p.heights().len() != len) {
        return Err(Error::InvalidArgument("paths have different lengths".into()));
    }
    if let Some(bad) = coords.iter().find(|&&c| c >= len) {
        return Err(Error::InvalidArgument(format!("coordinate {bad} exceeds L = {}", len - 1)));
    }
    DistTable::from_weights(paths.iter().map(|p| {
        let h = p.heights();
        (coords.iter().map(|&c| h[c] as i64).collect(), Q::from_integer(1.into()))
    }))
}

/// Newline-delimited comma-separated heights.
pub fn paths_to_text(paths: &[MotzkinPath]) -> String {
    let mut out = String::new();
    for p in paths {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

const MAGIC: &[u8; 4] = b"MZPC";

/// Little-endian columnar dump: `MZPC`, `u32` version 1, `u32` L, `u64` count, then
/// `u32` heights column by column (all `γ_0`, then all `γ_1`, …).
pub fn paths_to_binary(paths: &[MotzkinPath]) -> Vec<u8> {
    let length = paths.first().map_or(0, |p| p.len());
    let mut out = Vec::with_capacity(20 + 4 * paths.len() * (length + 1));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&1u32.to_le_bytes());
    out.extend_from_slice(&(length as u32).to_le_bytes());
    out.extend_from_slice(&(paths.len() as u64).to_le_bytes());
    for k in 0..=length {
        for p in paths {
            out.extend_from_slice(&(p.heights()[k] as u32).to_le_bytes());
        }
    }
    out
}

pub fn paths_from_binary(bytes: &[u8]) -> Result<Vec<MotzkinPath>> {
    let bad = |msg: &str| Error::Parse {
        what: "binary path dump",
        input: msg.to_string(),
    };
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(bad("missing header"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    if u32_at(4) != 1 {
        return Err(bad("unsupported version"));
    }
    let length = u32_at(8) as usize;
    let count = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    if bytes.len() != 20 + 4 * count * (length + 1) {
        return Err(bad("size does not match header"));
    }
    (0..count)
        .map(|i| {
            let heights = (0..=length)
                .map(|k| u32_at(20 + 4 * (k * count + i)) as usize)
                .collect();
            MotzkinPath::new(heights)
        })
        .collect()
}
