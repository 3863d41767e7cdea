use num_traits::Zero;

use crate::model::BoundaryMeasure;
use crate::rational::to_f64;

/// Monic Chebyshev polynomial of the second kind on `[-2, 2]`:
/// `u_{-1} = 0`, `u_0 = 1`, `x u_n = u_{n+1} + u_{n-1}`.
pub fn cheb_u(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `u_0(x), …, u_n(x)`.
pub fn cheb_u_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for _ in 0..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `u_n(z + 1/z) = (z^{n+1} - z^{-(n+1)}) / (z - 1/z)`, and `n + 1` at `z = 1`.
pub fn cheb_u_closed(n: usize, z: f64) -> f64 {
    if z == 1.0 {
        return (n + 1) as f64;
    }
    let e = (n + 1) as i32;
    (z.powi(e) - z.powi(-e)) / (z - 1.0 / z)
}

/// Partial sum `Σ_{n <= terms} ρ^n u_n(x)`; tends to `1 / (1 - ρx + ρ²)` for `|ρ| < 1`, `|x| <= 2`.
pub fn chebyshev_series(rho: f64, x: f64, terms: usize) -> f64 {
    let mut acc = Neumaier::default();
    let mut power = 1.0;
    for u in cheb_u_all(terms, x) {
        acc.add(power * u);
        power *= rho;
    }
    acc.total()
}

/// Boundary generating function `Σ_n w_n z^n u_n(x)`: exact sum for finite support,
/// closed form `1 / (1 - rzx + (rz)²)` for geometric `w_n = r^n` (needs `|rz| < 1`, `|x| <= 2`).
pub fn boundary_series(measure: &BoundaryMeasure, z: f64, x: f64) -> f64 {
    match measure {
        BoundaryMeasure::FiniteSupport(w) => {
            let us = cheb_u_all(w.len().saturating_sub(1), x);
            let mut acc = Neumaier::default();
            let mut power = 1.0;
            for (wn, u) in w.iter().zip(us) {
                if !wn.is_zero() {
                    acc.add(to_f64(wn) * power * u);
                }
                power *= z;
            }
            acc.total()
        }
        BoundaryMeasure::Geometric(r) => {
            let rz = to_f64(r) * z;
            1.0 / (1.0 - rz * x + rz * rz)
        }
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(cheb_u(0, 17.3), 1.0);
        for n in 0..20 {
            assert_eq!(cheb_u(n, 2.0), (n + 1) as f64);
        }
        assert!((cheb_u(2, 2.5) - 5.25).abs() < 1e-15);
        assert!((cheb_u_closed(2, 2.0) - 5.25).abs() < 1e-15);
    }

    #[test]
    fn recursion_matches_closed_form() {
        for &z in &[1.0, 1.3, 2.0, 3.5, -1.7] {
            let x: f64 = z + 1.0 / z;
            for n in 0..25 {
                let a = cheb_u(n, x);
                let b = cheb_u_closed(n, z);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "n={n} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bounded_on_interval() {
        for i in 0..=400 {
            let x = -2.0 + i as f64 / 100.0;
            for n in 0..30 {
                assert!(cheb_u(n, x).abs() <= (n + 1) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn geometric_boundary_series() {
        let m = BoundaryMeasure::Geometric(crate::rational::frac(1, 2));
        let x = 0.7;
        let direct = chebyshev_series(0.5 * 0.8, x, 200);
        assert!((boundary_series(&m, 0.8, x) - direct).abs() < 1e-14);
    }
}
