use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::chebyshev::Neumaier;

/// Gauss rule for `(1/2π) ∫_{-2}^{2} f(x) √(4 - x²) dx`, exact for polynomials of degree `<= 2N - 1`.
///
/// Nodes `x_k = 2 cos(kπ/(N+1))`, weights `2 sin²(kπ/(N+1)) / (N+1)`, `k = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussU {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussU {
    pub fn new(n: usize) -> Self {
        let h = PI / (n + 1) as f64;
        let (nodes, weights) = (1..=n)
            .map(|k| {
                let t = k as f64 * h;
                (2.0 * t.cos(), 2.0 * t.sin().powi(2) / (n + 1) as f64)
            })
            .unzip();
        Self { nodes, weights }
    }

    /// Smallest rule exact for the given polynomial degree.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect::<Neumaier>()
            .total()
    }

    /// `Σ w_k |f(x_k)|`, the scale against which rounding in [`GaussU::integrate`] is judged.
    pub fn integrate_abs<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate(|x| f(x).abs())
    }
}

/// Trapezoid rule in `θ ∈ [0, π]` with node doubling until two successive values agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRule {
    pub initial_intervals: usize,
    pub min_intervals: usize,
    pub max_intervals: usize,
    /// Acceptance: `|T_2N - T_N| <= rel_tol · T_2N[|f|]`.
    pub rel_tol: f64,
}

impl Default for ThetaRule {
    fn default() -> Self {
        Self {
            initial_intervals: 16,
            min_intervals: 64,
            max_intervals: 1 << 20,
            rel_tol: 1e-13,
        }
    }
}

/// A converged quadrature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: f64,
    pub abs_value: f64,
    pub intervals: usize,
    pub last_change: f64,
}

const CHUNK: usize = 2048;

impl ThetaRule {
    /// `∫_0^π g(θ) dθ` for a smooth `g` whose even periodic extension is smooth.
    pub fn integrate<G>(&self, g: G) -> Result<ThetaValue>
    where
        G: Fn(f64) -> f64 + Sync,
    {
        let mut n = self.initial_intervals.max(2);
        let h0 = PI / n as f64;
        // Interior and end-point sums of g and |g|.
        let ends = 0.5 * (g(0.0) + g(PI));
        let ends_abs = 0.5 * (g(0.0).abs() + g(PI).abs());
        let (mut inner, mut inner_abs) = node_sums(&g, (1..n).map(|k| k as f64 * h0).collect());
        let mut prev = h0 * (ends + inner);
        loop {
            let h = PI / (2 * n) as f64;
            let fresh: Vec<f64> = (0..n).map(|k| (2 * k + 1) as f64 * h).collect();
            let (s, sa) = node_sums(&g, fresh);
            inner += s;
            inner_abs += sa;
            n *= 2;
            let value = h * (ends + inner);
            let abs_value = h * (ends_abs + inner_abs);
            let change = (value - prev).abs();
            if n >= self.min_intervals && change <= self.rel_tol * abs_value.max(f64::MIN_POSITIVE) {
                return Ok(ThetaValue {
                    value,
                    abs_value,
                    intervals: n,
                    last_change: change,
                });
            }
            if n >= self.max_intervals {
                return Err(Error::Quadrature {
                    nodes: n + 1,
                    last_change: change,
                });
            }
            prev = value;
        }
    }
}

/// Sums of `g` and `|g|` over `thetas`, chunked so the result does not depend on the thread count.
fn node_sums<G: Fn(f64) -> f64 + Sync>(g: &G, thetas: Vec<f64>) -> (f64, f64) {
    let partial: Vec<(f64, f64)> = thetas
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s = Neumaier::default();
            let mut a = Neumaier::default();
            for &t in chunk {
                let v = g(t);
                s.add(v);
                a.add(v.abs());
            }
            (s.total(), a.total())
        })
        .collect();
    let mut s = Neumaier::default();
    let mut a = Neumaier::default();
    for (x, y) in partial {
        s.add(x);
        a.add(y);
    }
    (s.total(), a.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_mass_and_mean() {
        let g = GaussU::new(5);
        assert!((g.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!(g.integrate(|x| x).abs() < 1e-15);
        assert!((g.integrate(|x| x * x) - 1.0).abs() < 1e-14);
        assert!((g.integrate(|x| x.powi(4)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn theta_rule_smooth() {
        let v = ThetaRule::default().integrate(|t| t.cos().powi(2)).unwrap();
        assert!((v.value - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn theta_rule_reports_failure() {
        let rule = ThetaRule {
            max_intervals: 64,
            ..ThetaRule::default()
        };
        // A kink at π/3 breaks spectral convergence.
        let err = rule.integrate(|t| (t - PI / 3.0).abs().sqrt()).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
