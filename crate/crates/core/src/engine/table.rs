use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::WeightConfig;
use crate::rational::{pow, to_pq, Q};

/// Path-weight sums `W^(L)_{m,n}` over paths of length `L` that stay at or below `H`.
///
/// Built by the first-step recursion
/// `W^(L+1)_{m,n} = a_m W^(L)_{m+1,n} + b_m W^(L)_{m,n} + c_m W^(L)_{m-1,n}`,
/// at cost `O(H^2 L)` rational operations. An entry is the unrestricted sum
/// whenever `H >= max(m, n) + L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    length: usize,
    bound: usize,
    entries: Vec<Q>,
}

impl WeightTable {
    pub fn build(weights: &WeightConfig, length: usize, bound: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidArgument("weight table needs length >= 1".into()));
        }
        if bound < length {
            return Err(Error::InvalidArgument(format!(
                "height bound {bound} is below the length {length}; truncation would corrupt entries"
            )));
        }
        let side = bound + 1;
        let mut cur = vec![Q::zero(); side * side];
        for m in 0..side {
            cur[m * side + m] = weights.level(m).clone();
            if m + 1 < side {
                cur[m * side + m + 1] = weights.up(m).clone();
            }
            if m >= 1 {
                cur[m * side + m - 1] = weights.down(m).clone();
            }
        }
        for _ in 1..length {
            let prev = &cur;
            let next: Vec<Q> = (0..side)
                .into_par_iter()
                .flat_map_iter(|m| {
                    (0..side).map(move |n| {
                        let mut acc = weights.level(m) * &prev[m * side + n];
                        if m + 1 < side {
                            acc += weights.up(m) * &prev[(m + 1) * side + n];
                        }
                        if m >= 1 {
                            acc += weights.down(m) * &prev[(m - 1) * side + n];
                        }
                        acc
                    })
                })
                .collect();
            cur = next;
        }
        Ok(Self {
            length,
            bound,
            entries: cur,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Entry `(m, n)`; zero outside the table.
    pub fn get(&self, m: usize, n: usize) -> Q {
        if m > self.bound || n > self.bound {
            return Q::zero();
        }
        self.entries[m * (self.bound + 1) + n].clone()
    }

    pub fn entry(&self, m: usize, n: usize) -> &Q {
        &self.entries[m * (self.bound + 1) + n]
    }

    /// CSV with header `m,n,value` and exact `p/q` values, rows in `(m, n)` order.
    pub fn to_csv(&self) -> String {
        let side = self.bound + 1;
        let mut out = String::from("m,n,value\n");
        for m in 0..side {
            for n in 0..side {
                out.push_str(&format!("{m},{n},{}\n", to_pq(&self.entries[m * side + n])));
            }
        }
        out
    }
}

/// Total weight `T_L(k)` of unconstrained trinomial paths of length `L` with displacement `k`,
/// with unit up/down weights and level weight `sigma`. Equals `W^(L)_{m,m+k}` for `m >= L`.
pub fn free_weight(length: usize, k: i64, sigma: &Q) -> Q {
    let l = length as i64;
    if k.abs() > l {
        return Q::zero();
    }
    let fact = factorials(length);
    let mut total = Q::zero();
    let mut down = 0i64.max(-k);
    loop {
        let up = down + k;
        let level = l - up - down;
        if level < 0 {
            break;
        }
        let multinomial = &fact[length] / (&fact[up as usize] * &fact[down as usize] * &fact[level as usize]);
        total += Q::from_integer(multinomial) * pow(sigma, level as usize);
        down += 1;
    }
    total
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigInt::one());
    for i in 1..=n {
        let next = &f[i - 1] * BigInt::from(i);
        f.push(next);
    }
    f
}

/// The tridiagonal operator with rows `(1/t at n-1, sigma at n, t at n+1)`, truncated at `bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    t: Q,
    sigma: Q,
    bound: usize,
}

impl TransferMatrix {
    pub fn new(t: Q, sigma: Q, bound: usize) -> Result<Self> {
        if t <= Q::zero() {
            return Err(Error::InvalidArgument(format!("transfer parameter must be > 0, got {t}")));
        }
        Ok(Self { t, sigma, bound })
    }

    pub fn entry(&self, row: usize, col: usize) -> Q {
        if row > self.bound || col > self.bound {
            Q::zero()
        } else if col + 1 == row {
            self.t.recip()
        } else if col == row {
            self.sigma.clone()
        } else if col == row + 1 {
            self.t.clone()
        } else {
            Q::zero()
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            t: self.t.recip(),
            sigma: self.sigma.clone(),
            bound: self.bound,
        }
    }

    /// Matrix-vector product `M v`; `v` is read as zero beyond its length.
    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        let inv = self.t.recip();
        (0..=self.bound)
            .map(|n| {
                let mut acc = &self.sigma * at(v, n);
                if n >= 1 {
                    acc += &inv * at(v, n - 1);
                }
                if n < self.bound {
                    acc += &self.t * at(v, n + 1);
                }
                acc
            })
            .collect()
    }
}

/// `M v` for the general weight operator with rows `(c_m at m-1, b_m at m, a_m at m+1)`.
pub fn apply_weights(weights: &WeightConfig, v: &[Q], bound: usize) -> Vec<Q> {
    (0..=bound)
        .map(|m| {
            let mut acc = weights.level(m) * at(v, m);
            if m >= 1 {
                acc += weights.down(m) * at(v, m - 1);
            }
            if m < bound {
                acc += weights.up(m) * at(v, m + 1);
            }
            acc
        })
        .collect()
}

fn at(v: &[Q], i: usize) -> Q {
    v.get(i).cloned().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn length_one_entries() {
        let w = WeightConfig::general(
            vec![int(2), int(3)],
            vec![int(5), int(7)],
            vec![int(11), int(13)],
        )
        .unwrap();
        let t = WeightTable::build(&w, 1, 4).unwrap();
        for m in 0..=4usize {
            for n in 0..=4usize {
                let expected = if n == m + 1 {
                    w.up(m).clone()
                } else if n == m {
                    w.level(m).clone()
                } else if n + 1 == m {
                    w.down(m).clone()
                } else {
                    Q::zero()
                };
                assert_eq!(t.get(m, n), expected, "({m},{n})");
            }
        }
    }

    #[test]
    fn motzkin_numbers_at_sigma_one() {
        let w = WeightConfig::constant(int(1)).unwrap();
        let expected = [1, 2, 4, 9, 21];
        for (l, e) in (1..=5).zip(expected) {
            assert_eq!(WeightTable::build(&w, l, l + 2).unwrap().get(0, 0), int(e));
        }
    }

    #[test]
    fn two_step_return() {
        let sigma = frac(2, 3);
        let w = WeightConfig::constant(sigma.clone()).unwrap();
        let t = WeightTable::build(&w, 2, 3).unwrap();
        assert_eq!(t.get(0, 0), &sigma * &sigma + int(1));
    }

    #[test]
    fn bound_below_length_rejected() {
        let w = WeightConfig::constant(int(1)).unwrap();
        assert!(WeightTable::build(&w, 5, 4).is_err());
    }

    #[test]
    fn free_weight_small() {
        let s = frac(3, 2);
        assert_eq!(free_weight(1, 1, &s), int(1));
        assert_eq!(free_weight(1, 0, &s), s.clone());
        assert_eq!(free_weight(1, -1, &s), int(1));
        assert_eq!(free_weight(2, 0, &s), &s * &s + int(2));
        assert_eq!(free_weight(3, 4, &s), Q::zero());
    }

    #[test]
    fn free_weight_matches_table_away_from_floor() {
        for sigma in [frac(1, 2), int(1), int(2)] {
            let w = WeightConfig::constant(sigma.clone()).unwrap();
            for l in 1..=6usize {
                let table = WeightTable::build(&w, l, 3 * l).unwrap();
                for k in -(l as i64)..=(l as i64) {
                    let n = (l as i64 + k) as usize;
                    assert_eq!(free_weight(l, k, &sigma), table.get(l, n), "L={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn transfer_transpose() {
        let m = TransferMatrix::new(frac(2, 5), int(1), 6).unwrap();
        let inv = TransferMatrix::new(frac(5, 2), int(1), 6).unwrap();
        for r in 0..=6 {
            for c in 0..=6 {
                assert_eq!(inv.entry(r, c), m.entry(c, r));
            }
        }
        assert_eq!(m.transpose(), inv);
    }

    #[test]
    fn csv_header() {
        let w = WeightConfig::constant(int(1)).unwrap();
        let csv = WeightTable::build(&w, 1, 1).unwrap().to_csv();
        assert_eq!(csv, "m,n,value\n0,0,1/1\n0,1,1/1\n1,0,1/1\n1,1,1/1\n");
    }
}
