//! Exact discrete draws from rational probabilities.
//!
//! A uniform `U` in `[0, 1)` is read lazily as a binary expansion: 64 bits up
//! front, then 32 more whenever the current dyadic interval still straddles a
//! CDF boundary. The outcome is the unique `i` with `c_{i-1} <= U < c_i`, so
//! each index is drawn with exactly its rational probability.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::rational::{scaled_floor_2_64, Q};

/// The generator behind every random draw: ChaCha20 keyed by `seed`, with
/// `stream` selecting one of 2^64 non-overlapping streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A CDF boundary `c` in `[0, 1]` with its cached `floor(c 2^64)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    value: Q,
    floor: u128,
    exact: bool,
}

impl Boundary {
    pub fn new(value: Q) -> Self {
        let (floor, exact) = scaled_floor_2_64(&value);
        Self { value, floor, exact }
    }

    pub fn value(&self) -> &Q {
        &self.value
    }
}

/// Cumulative distribution over outcomes `0..n`, stored as its `n - 1` interior boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    bounds: Vec<Boundary>,
}

impl Cdf {
    /// From non-negative weights with a positive total.
    pub fn from_weights(weights: &[Q]) -> Result<Self> {
        let total: Q = weights.iter().sum();
        if weights.iter().any(|w| w < &Q::zero()) || total <= Q::zero() {
            return Err(Error::InvalidArgument("draw weights must be >= 0 with positive total".into()));
        }
        let mut acc = Q::zero();
        let mut bounds = Vec::with_capacity(weights.len().saturating_sub(1));
        for w in &weights[..weights.len() - 1] {
            acc += w;
            bounds.push(Boundary::new(&acc / &total));
        }
        Ok(Self { bounds })
    }

    pub fn outcomes(&self) -> usize {
        self.bounds.len() + 1
    }

    /// Probability of outcome `i`.
    pub fn prob(&self, i: usize) -> Q {
        let hi = self.bounds.get(i).map_or_else(Q::one, |b| b.value.clone());
        let lo = if i == 0 { Q::zero() } else { self.bounds[i - 1].value.clone() };
        hi - lo
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> usize {
        let mut u = LazyUniform::new(rng);
        let (mut lo, mut hi) = (0usize, self.bounds.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if u.below(&self.bounds[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}

/// Draws `i` with probability `weights[i] / Σ weights`.
pub fn draw_index<R: RngCore>(weights: &[Q], rng: &mut R) -> Result<usize> {
    Ok(Cdf::from_weights(weights)?.sample(rng))
}

struct LazyUniform<'a, R> {
    rng: &'a mut R,
    head: u64,
    /// All drawn bits as an integer, once refinement has started.
    long: Option<(BigInt, usize)>,
}

impl<'a, R: RngCore> LazyUniform<'a, R> {
    fn new(rng: &'a mut R) -> Self {
        let head = rng.next_u64();
        Self { rng, head, long: None }
    }

    /// Decides `U < c`.
    fn below(&mut self, c: &Boundary) -> bool {
        let n = self.head as u128;
        if n < c.floor {
            return true;
        }
        if n > c.floor || c.exact {
            return false;
        }
        let (mut bits, mut width) = self
            .long
            .take()
            .unwrap_or_else(|| (BigInt::from(self.head), 64));
        let numer = c.value.numer();
        let denom = c.value.denom();
        let answer = loop {
            let target = numer << width;
            if (&bits + 1u32) * denom <= target {
                break true;
            }
            if &bits * denom >= target {
                break false;
            }
            bits = (bits << 32usize) + BigInt::from(self.rng.next_u32());
            width += 32;
        };
        self.long = Some((bits, width));
        answer
    }
}
