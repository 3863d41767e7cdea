//! Exact finite probability tables over integer tuples.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{to_f64, to_pq, Q};

/// A finite law on integer tuples with exact rational atoms summing to one.
///
/// Laws derived from infinite-support boundary measures are stored as the
/// conditional law on a truncation event; `tail_mass` records the exact
/// probability of the complement under the untruncated law, which is also the
/// total-variation distance between the two.
#[derive(Debug, Clone, PartialEq)]
pub struct DistTable {
    atoms: BTreeMap<Vec<i64>, Q>,
    tail_mass: Q,
}

impl DistTable {
    /// Normalizes non-negative weights; zero-weight atoms are dropped, equal supports merged.
    pub fn from_weights<I>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Q)>,
    {
        let mut atoms: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (support, w) in weights {
            if w.is_negative() {
                return Err(Error::InvalidArgument(format!("negative weight {w} at {support:?}")));
            }
            if w.is_zero() {
                continue;
            }
            *atoms.entry(support).or_insert_with(Q::zero) += w;
        }
        let total: Q = atoms.values().sum();
        if total.is_zero() {
            return Err(Error::ZeroMass("distribution has no positive weight".into()));
        }
        if !total.is_one() {
            for p in atoms.values_mut() {
                *p /= &total;
            }
        }
        Ok(Self {
            atoms,
            tail_mass: Q::zero(),
        })
    }

    pub fn point(support: Vec<i64>) -> Self {
        Self {
            atoms: BTreeMap::from([(support, Q::one())]),
            tail_mass: Q::zero(),
        }
    }

    pub fn with_tail_mass(mut self, tail: Q) -> Self {
        self.tail_mass = tail;
        self
    }

    pub fn tail_mass(&self) -> &Q {
        &self.tail_mass
    }

    pub fn prob(&self, support: &[i64]) -> Q {
        self.atoms.get(support).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Q)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> Q {
        self.atoms.values().sum()
    }

    /// Tuple length of the support (all atoms share it).
    pub fn arity(&self) -> usize {
        self.atoms.keys().next().map_or(0, Vec::len)
    }

    /// Image law under `f`, merging atoms that map to the same tuple.
    pub fn map<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[i64]) -> Vec<i64>,
    {
        let mut atoms: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (s, p) in &self.atoms {
            *atoms.entry(f(s)).or_insert_with(Q::zero) += p;
        }
        Self {
            atoms,
            tail_mass: self.tail_mass.clone(),
        }
    }

    /// Marginal on the listed coordinates, in the listed order.
    pub fn marginal(&self, coords: &[usize]) -> Self {
        self.map(|s| coords.iter().map(|&i| s[i]).collect())
    }

    /// Law of the concatenated tuple under independence.
    pub fn product(&self, other: &DistTable) -> Self {
        let mut atoms = BTreeMap::new();
        for (a, p) in &self.atoms {
            for (b, q) in &other.atoms {
                let mut s = a.clone();
                s.extend_from_slice(b);
                atoms.insert(s, p * q);
            }
        }
        let keep = (Q::one() - &self.tail_mass) * (Q::one() - &other.tail_mass);
        Self {
            atoms,
            tail_mass: Q::one() - keep,
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.atoms
                .iter()
                .map(|(s, p)| json!({ "support": s, "prob": to_pq(p), "prob_float": to_f64(p) }))
                .collect(),
        )
    }
}
