use std::f64::consts::PI;

use num_traits::Zero;

use crate::engine::TransferMatrix;
use crate::error::{Error, Result};
use crate::rational::{pow, Q};

use super::chebyshev::cheb_u;
use super::quadrature::{GaussU, ThetaRule, ThetaValue};

/// `μ_ρ(dx) = √(4 - x²) / (2π (1 - xρ + ρ²)) dx on [-2, 2]` plus mass `(1 - 1/ρ²)_+` at `ρ + 1/ρ`.
///
/// `ρ = 0` is the semicircle law; `ρ = 1` has density `√((2+x)/(2-x)) / 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedMeasure {
    rho: f64,
}

impl MixedMeasure {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() || rho < 0.0 || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("measure parameter must be finite and >= 0, got {rho}")));
        }
        Ok(Self { rho })
    }

    pub fn semicircle() -> Self {
        Self { rho: 0.0 }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `(location, mass)` of the atom, present exactly when `ρ > 1`.
    pub fn atom(&self) -> Option<(f64, f64)> {
        (self.rho > 1.0).then(|| (self.rho + 1.0 / self.rho, 1.0 - 1.0 / (self.rho * self.rho)))
    }

    /// Right end of the support: `max(2, ρ + 1/ρ)`.
    pub fn top(&self) -> f64 {
        self.atom().map_or(2.0, |(loc, _)| loc)
    }

    /// Density of the continuous part at `x ∈ (-2, 2)`.
    pub fn density(&self, x: f64) -> f64 {
        if x.abs() >= 2.0 {
            return 0.0;
        }
        let r = self.rho;
        if r == 1.0 {
            return ((2.0 + x) / (2.0 - x)).sqrt() / (2.0 * PI);
        }
        (4.0 - x * x).sqrt() / (2.0 * PI * (1.0 - x * r + r * r))
    }

    /// The continuous part after `x = 2cos θ`: `μ(dx) = w(θ) dθ` with
    /// `w(θ) = 16 s² c² / (2π ((1 - ρ)² + 4ρ s²))`, `s = sin(θ/2)`, `c = cos(θ/2)`.
    pub fn theta_weight(&self, theta: f64) -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        let r = self.rho;
        let g = if r == 1.0 {
            4.0 * c * c
        } else {
            16.0 * s * s * c * c / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s)
        };
        g / (2.0 * PI)
    }

    /// `∫ f dμ_cont` by the θ rule.
    pub fn integrate_continuous<F>(&self, f: F, rule: &ThetaRule) -> Result<ThetaValue>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        rule.integrate(|t| f(2.0 * t.cos()) * self.theta_weight(t))
    }
}

/// `∫ F(x) (x + σ)^L μ_ρ(dx)`, split into the θ-rule continuous part and the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub total: f64,
    pub continuous: f64,
    pub atom: f64,
    pub intervals: usize,
}

pub fn mu_moment<F>(f: F, measure: &MixedMeasure, sigma: f64, length: usize, rule: &ThetaRule) -> Result<MomentValue>
where
    F: Fn(f64) -> f64 + Sync,
{
    mu_moment_scaled(f, measure, sigma, length, 1.0, rule)
}

/// As [`mu_moment`] with `(x + σ)^L` replaced by `((x + σ)/scale)^L`, to keep large `L` finite.
pub fn mu_moment_scaled<F>(
    f: F,
    measure: &MixedMeasure,
    sigma: f64,
    length: usize,
    scale: f64,
    rule: &ThetaRule,
) -> Result<MomentValue>
where
    F: Fn(f64) -> f64 + Sync,
{
    let l = length as i32;
    let cont = measure.integrate_continuous(|x| f(x) * ((x + sigma) / scale).powi(l), rule)?;
    let atom = measure
        .atom()
        .map_or(0.0, |(loc, mass)| mass * f(loc) * ((loc + sigma) / scale).powi(l));
    Ok(MomentValue {
        total: cont.value + atom,
        continuous: cont.value,
        atom,
        intervals: cont.intervals,
    })
}

/// `(1/2π) ∫ u_m(x) u_n(x) (x + σ)^L √(4 - x²) dx` by the Gauss rule exact for the degree `m + n + L`.
pub fn viennot_integral(m: usize, n: usize, length: usize, sigma: f64) -> f64 {
    viennot_with_scale(m, n, length, sigma).0
}

/// The integral together with `(m+1)(n+1)(2+|σ|)^L`, a bound on the integrand over `[-2, 2]`
/// and hence the scale of its rounding error.
pub fn viennot_with_scale(m: usize, n: usize, length: usize, sigma: f64) -> (f64, f64) {
    let rule = GaussU::for_degree(m + n + length);
    let f = |x: f64| cheb_u(m, x) * cheb_u(n, x) * (x + sigma).powi(length as i32);
    let bound = ((m + 1) * (n + 1)) as f64 * (2.0 + sigma.abs()).powi(length as i32);
    (rule.integrate(f), bound)
}

/// `h_m(ρ) = Σ_n ρ^n W^(L)_{m,n}`, exact (the `m`-th entry of `M_1^L (1, ρ, ρ², …)`).
pub fn h_m_dp(m: usize, rho: &Q, length: usize, sigma: &Q) -> Result<Q> {
    let bound = m + length;
    let mut v: Vec<Q> = (0..=bound).map(|n| pow(rho, n)).collect();
    let op = TransferMatrix::new(Q::from_integer(1.into()), sigma.clone(), bound)?;
    for _ in 0..length {
        v = op.apply(&v);
    }
    Ok(v.get(m).cloned().unwrap_or_else(Q::zero))
}

/// One row of a ratio ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub length: usize,
    /// `∫ F (x+σ)^L dμ / ∫ (x+σ)^L dμ`; `NaN` when the denominator is not positive.
    pub ratio: f64,
    pub denominator_positive: bool,
}

/// Ratios `∫ F (x+σ)^L dμ / ∫ (x+σ)^L dμ` along `lengths`; both integrals are scaled by `(R + σ)^L`.
pub fn ratio_probe<F>(f: F, measure: &MixedMeasure, sigma: f64, lengths: &[usize], rule: &ThetaRule) -> Result<Vec<RatioRow>>
where
    F: Fn(f64) -> f64 + Sync,
{
    let scale = measure.top() + sigma;
    lengths
        .iter()
        .map(|&l| {
            let num = mu_moment_scaled(&f, measure, sigma, l, scale, rule)?.total;
            let den = mu_moment_scaled(|_| 1.0, measure, sigma, l, scale, rule)?.total;
            let ok = den > 0.0;
            Ok(RatioRow {
                length: l,
                ratio: if ok { num / den } else { f64::NAN },
                denominator_positive: ok,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn atoms() {
        assert_eq!(MixedMeasure::new(2.0).unwrap().atom(), Some((2.5, 0.75)));
        assert_eq!(MixedMeasure::new(1.0).unwrap().atom(), None);
        assert_eq!(MixedMeasure::new(0.5).unwrap().atom(), None);
        assert!(MixedMeasure::new(-1.0).is_err());
        assert!(MixedMeasure::new(f64::NAN).is_err());
    }

    #[test]
    fn theta_weight_matches_density() {
        for &r in &[0.0, 0.5, 1.0, 2.0] {
            let m = MixedMeasure::new(r).unwrap();
            for &t in &[0.3, 1.0, 2.0, 2.9] {
                let x: f64 = 2.0 * f64::cos(t);
                let jac = 2.0 * f64::sin(t);
                let a = m.density(x) * jac;
                let b = m.theta_weight(t);
                assert!((a - b).abs() < 1e-12 * b.abs().max(1.0), "rho={r} t={t}");
            }
        }
    }

    #[test]
    fn masses() {
        let rule = ThetaRule::default();
        for &r in &[0.5, 1.0, 2.0] {
            let m = MixedMeasure::new(r).unwrap();
            let v = mu_moment(|_| 1.0, &m, 1.0, 0, &rule).unwrap();
            assert!((v.total - 1.0).abs() < 1e-12, "rho={r}");
        }
        let v = mu_moment(|_| 1.0, &MixedMeasure::new(2.0).unwrap(), 1.0, 0, &rule).unwrap();
        assert!((v.continuous - 0.25).abs() < 1e-12);
        assert!((v.atom - 0.75).abs() < 1e-15);
    }

    #[test]
    fn first_moment_is_rho() {
        let rule = ThetaRule::default();
        for &r in &[0.5, 1.0, 2.0] {
            let v = mu_moment(|x| x, &MixedMeasure::new(r).unwrap(), 0.0, 0, &rule).unwrap();
            assert!((v.total - r).abs() < 1e-12, "rho={r}: {}", v.total);
        }
    }

    #[test]
    fn viennot_small() {
        assert!((viennot_integral(0, 0, 1, 0.7) - 0.7).abs() < 1e-15);
        assert!((viennot_integral(0, 0, 2, 0.7) - (0.49 + 1.0)).abs() < 1e-14);
        assert!((viennot_integral(0, 1, 1, 0.7) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn h_m_small() {
        let r = frac(2, 3);
        let s = frac(1, 2);
        assert_eq!(h_m_dp(0, &r, 1, &s).unwrap(), &s + &r);
        assert_eq!(h_m_dp(1, &r, 1, &s).unwrap(), int(1) + &s * &r + &r * &r);
        assert_eq!(h_m_dp(2, &int(0), 3, &s).unwrap(), {
            let w = crate::model::WeightConfig::constant(s.clone()).unwrap();
            crate::engine::WeightTable::build(&w, 3, 6).unwrap().get(2, 0)
        });
    }

    #[test]
    fn constant_ratio() {
        let rows = ratio_probe(|_| 3.5, &MixedMeasure::new(2.0).unwrap(), 1.0, &[1, 4, 64], &ThetaRule::default()).unwrap();
        for r in rows {
            assert!((r.ratio - 3.5).abs() < 1e-12);
        }
    }
}
