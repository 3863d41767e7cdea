use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::engine::WeightTable;
use crate::error::Result;
use crate::model::WeightConfig;
use crate::rational::{frac, int, to_f64, to_pq, Q};
use crate::registry::{Named, Registry};

use super::chebyshev::{cheb_u, chebyshev_series};
use super::measure::{h_m_dp, mu_moment, ratio_probe, viennot_with_scale, MixedMeasure};
use super::quadrature::{GaussU, ThetaRule};

/// One numerical comparison `lhs ≈ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertCheck {
    pub check: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CertCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.pass,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub certificate: &'static str,
    pub checks: Vec<CertCheck>,
}

impl CertReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Largest residual relative to its tolerance.
    pub fn worst_ratio(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| if c.tol > 0.0 { c.residual / c.tol } else { c.residual })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "certificate": self.certificate,
            "pass": self.pass(),
            "checks_run": self.checks.len(),
            "failures": self.failures().count(),
            "worst_residual_over_tol": self.worst_ratio(),
            "checks": self.checks.iter().map(CertCheck::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Overrides for certificate grids; unset fields take each certificate's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertConfig {
    pub sigmas: Option<Vec<Q>>,
    pub rhos: Option<Vec<Q>>,
    pub max_index: Option<usize>,
    pub max_length: Option<usize>,
    pub lengths: Option<Vec<usize>>,
    pub tol: Option<f64>,
}

pub trait Certificate: Named + Send + Sync {
    fn run(&self, config: &CertConfig) -> Result<CertReport>;
}

/// The built-in certificates.
pub fn certificates() -> Registry<dyn Certificate> {
    let mut r: Registry<dyn Certificate> = Registry::new("certificate");
    r.register(Box::new(ViennotCertificate))
        .register(Box::new(MixedMeasureCertificate))
        .register(Box::new(MassCertificate))
        .register(Box::new(RatioCertificate))
        .register(Box::new(GaussExactness))
        .register(Box::new(SeriesIdentity));
    r
}

fn relative_check(check: &str, params: Value, lhs: f64, rhs: f64, tol: f64) -> CertCheck {
    let residual = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    CertCheck {
        check: check.to_string(),
        params,
        lhs,
        rhs,
        residual,
        tol,
        pass: residual <= tol,
    }
}

/// Quadrature of the Chebyshev integral against the exact `W^(L)_{m,n}`.
///
/// Nonzero exact values are compared relatively; an exact zero passes when the
/// quadrature value is within `tol` of the integrand's sup-norm bound.
pub fn viennot_check(m: usize, n: usize, length: usize, sigma: &Q, exact: &Q, tol: f64) -> CertCheck {
    let s = to_f64(sigma);
    let (quad, scale) = viennot_with_scale(m, n, length, s);
    let params = json!({ "m": m, "n": n, "L": length, "sigma": to_pq(sigma), "exact": to_pq(exact) });
    if exact.is_zero() {
        let residual = quad.abs() / scale.max(f64::MIN_POSITIVE);
        return CertCheck {
            check: "viennot".into(),
            params,
            lhs: quad,
            rhs: 0.0,
            residual,
            tol,
            pass: residual <= tol,
        };
    }
    relative_check("viennot", params, quad, to_f64(exact), tol)
}

/// `h_m(ρ)` from the exact weights against `∫ u_m(x)(x+σ)^L μ_ρ(dx)`.
pub fn mixed_moment_check(m: usize, rho: &Q, length: usize, sigma: &Q, tol: f64) -> Result<CertCheck> {
    let exact = h_m_dp(m, rho, length, sigma)?;
    let measure = MixedMeasure::new(to_f64(rho))?;
    let value = mu_moment(|x| cheb_u(m, x), &measure, to_f64(sigma), length, &ThetaRule::default())?;
    let params = json!({
        "m": m, "rho": to_pq(rho), "L": length, "sigma": to_pq(sigma),
        "exact": to_pq(&exact),
        "continuous_part": value.continuous,
        "atom_part": value.atom,
        "atom_present": measure.atom().is_some(),
        "intervals": value.intervals,
    });
    Ok(relative_check("mixed-moment", params, value.total, to_f64(&exact), tol))
}

fn q_list(v: &[(i64, i64)]) -> Vec<Q> {
    v.iter().map(|&(p, q)| frac(p, q)).collect()
}

struct ViennotCertificate;

impl Named for ViennotCertificate {
    fn name(&self) -> &'static str {
        "viennot"
    }
    fn summary(&self) -> &'static str {
        "Gauss quadrature of u_m u_n (x+σ)^L against exact path-weight sums"
    }
}

impl Certificate for ViennotCertificate {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let sigmas = c.sigmas.clone().unwrap_or_else(|| q_list(&[(1, 2), (1, 1), (2, 1)]));
        let top = c.max_index.unwrap_or(6);
        let max_l = c.max_length.unwrap_or(12);
        let tol = c.tol.unwrap_or(1e-10);
        let mut checks = Vec::new();
        for sigma in &sigmas {
            let w = WeightConfig::constant(sigma.clone())?;
            for l in 1..=max_l {
                let table = WeightTable::build(&w, l, top + l)?;
                for m in 0..=top {
                    for n in 0..=top {
                        checks.push(viennot_check(m, n, l, sigma, table.entry(m, n), tol));
                    }
                }
            }
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

struct MixedMeasureCertificate;

impl Named for MixedMeasureCertificate {
    fn name(&self) -> &'static str {
        "mixed-moment"
    }
    fn summary(&self) -> &'static str {
        "M_1^L (1, ρ, ρ², …) entries against ∫ (x+σ)^L u_m dμ_ρ, atom present exactly for ρ > 1"
    }
}

impl Certificate for MixedMeasureCertificate {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let sigmas = c.sigmas.clone().unwrap_or_else(|| q_list(&[(1, 2), (1, 1)]));
        let rhos = c.rhos.clone().unwrap_or_else(|| q_list(&[(1, 2), (1, 1), (2, 1), (3, 1)]));
        let top = c.max_index.unwrap_or(5);
        let max_l = c.max_length.unwrap_or(30);
        let tol = c.tol.unwrap_or(1e-8);
        let mut checks = Vec::new();
        for rho in &rhos {
            let measure = MixedMeasure::new(to_f64(rho))?;
            let expected = if rho > &Q::one() { Q::one() - (rho * rho).recip() } else { Q::zero() };
            let mass = measure.atom().map_or(0.0, |(_, w)| w);
            let present_ok = measure.atom().is_some() == (rho > &Q::one());
            let residual = (mass - to_f64(&expected)).abs();
            checks.push(CertCheck {
                check: "atom".into(),
                params: json!({ "rho": to_pq(rho), "expected_mass": to_pq(&expected), "present": measure.atom().is_some() }),
                lhs: mass,
                rhs: to_f64(&expected),
                residual,
                tol: 1e-15,
                pass: present_ok && residual <= 1e-15,
            });
            for sigma in &sigmas {
                for l in 1..=max_l {
                    for m in 0..=top {
                        checks.push(mixed_moment_check(m, rho, l, sigma, tol)?);
                    }
                }
            }
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

struct MassCertificate;

impl Named for MassCertificate {
    fn name(&self) -> &'static str {
        "mu-mass"
    }
    fn summary(&self) -> &'static str {
        "total mass of μ_ρ equals 1"
    }
}

impl Certificate for MassCertificate {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let rhos = c
            .rhos
            .clone()
            .unwrap_or_else(|| q_list(&[(1, 10), (1, 2), (9, 10), (1, 1), (11, 10), (2, 1), (3, 1)]));
        let tol = c.tol.unwrap_or(1e-10);
        let mut checks = Vec::new();
        for rho in &rhos {
            let v = mu_moment(|_| 1.0, &MixedMeasure::new(to_f64(rho))?, 0.0, 0, &ThetaRule::default())?;
            let params = json!({ "rho": to_pq(rho), "continuous_part": v.continuous, "atom_part": v.atom });
            let residual = (v.total - 1.0).abs();
            checks.push(CertCheck {
                check: "mu-mass".into(),
                params,
                lhs: v.total,
                rhs: 1.0,
                residual,
                tol,
                pass: residual <= tol,
            });
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

struct RatioCertificate;

impl Named for RatioCertificate {
    fn name(&self) -> &'static str {
        "ratio-probe"
    }
    fn summary(&self) -> &'static str {
        "∫F(x+σ)^L dμ / ∫(x+σ)^L dμ approaches F at the top of the support"
    }
}

/// The distance `|ratio - target|` must strictly decrease along the ladder.
fn monotone_check(name: &str, params: Value, rows: &[(usize, f64)], target: f64) -> CertCheck {
    let gaps: Vec<f64> = rows.iter().map(|&(_, r)| (r - target).abs()).collect();
    let pass = gaps.iter().all(|g| g.is_finite()) && gaps.windows(2).all(|w| w[1] < w[0]);
    let mut params = params;
    params["ladder"] = json!(rows.iter().map(|&(l, r)| json!({ "L": l, "ratio": r })).collect::<Vec<_>>());
    CertCheck {
        check: name.to_string(),
        params,
        lhs: rows.last().map_or(f64::NAN, |r| r.1),
        rhs: target,
        residual: *gaps.last().unwrap_or(&f64::NAN),
        tol: *gaps.first().unwrap_or(&f64::NAN),
        pass,
    }
}

impl Certificate for RatioCertificate {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let sigmas = c.sigmas.clone().unwrap_or_else(|| vec![int(1)]);
        let rhos = c.rhos.clone().unwrap_or_else(|| q_list(&[(0, 1), (1, 2), (1, 1), (2, 1)]));
        let lengths = c.lengths.clone().unwrap_or_else(|| (1..=9).map(|k| 1usize << k).collect());
        let rule = ThetaRule::default();
        let mut checks = Vec::new();
        for sigma in &sigmas {
            let s = to_f64(sigma);
            for rho in &rhos {
                let measure = MixedMeasure::new(to_f64(rho))?;
                let r = measure.top();
                let rows: Vec<(usize, f64)> = ratio_probe(|x| r - x, &measure, s, &lengths, &rule)?
                    .iter()
                    .map(|row| (row.length, row.ratio))
                    .collect();
                let params = json!({ "F": "R - x", "rho": to_pq(rho), "sigma": to_pq(sigma), "R": r });
                checks.push(monotone_check("ratio-top", params, &rows, 0.0));

                let rf = to_f64(rho);
                if rf > 1.0 {
                    // F(x) = 1 - ρx + ρ² vanishes at ρ + 1/ρ.
                    let f = |x: f64| 1.0 - rf * x + rf * rf;
                    let rows: Vec<(usize, f64)> = ratio_probe(f, &measure, s, &lengths, &rule)?
                        .iter()
                        .map(|row| (row.length, row.ratio))
                        .collect();
                    let params = json!({ "F": "1 - rho x + rho^2", "rho": to_pq(rho), "sigma": to_pq(sigma) });
                    checks.push(monotone_check("ratio-nontight", params, &rows, 0.0));
                }
            }
            let semicircle = MixedMeasure::semicircle();
            let rows: Vec<(usize, f64)> = ratio_probe(|x| x, &semicircle, s, &lengths, &rule)?
                .iter()
                .map(|row| (row.length, row.ratio))
                .collect();
            let params = json!({ "F": "u_1(x) = x", "rho": "0/1", "sigma": to_pq(sigma) });
            checks.push(monotone_check("ratio-u1", params, &rows, 2.0));
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

/// `C_0, …, C_k` by the convolution recurrence.
pub fn catalan_numbers(k: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for n in 0..k {
        let next: BigInt = (0..=n).map(|i| &c[i] * &c[n - i]).sum();
        c.push(next);
    }
    c
}

struct GaussExactness;

impl Named for GaussExactness {
    fn name(&self) -> &'static str {
        "gauss-exactness"
    }
    fn summary(&self) -> &'static str {
        "N-node Gauss rule reproduces semicircle moments up to degree 2N - 1"
    }
}

impl Certificate for GaussExactness {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let max_nodes = c.max_index.unwrap_or(16);
        let tol = c.tol.unwrap_or(1e-12);
        let catalan = catalan_numbers(max_nodes);
        let mut checks = Vec::new();
        for nodes in 1..=max_nodes {
            let rule = GaussU::new(nodes);
            for k in 0..2 * nodes {
                let quad = rule.integrate(|x| x.powi(k as i32));
                let params = json!({ "nodes": nodes, "k": k });
                if k % 2 == 1 {
                    // Odd moments vanish; judge rounding against sup |x|^k = 2^k.
                    let residual = quad.abs() / 2f64.powi(k as i32);
                    checks.push(CertCheck {
                        check: "gauss-moment".into(),
                        params,
                        lhs: quad,
                        rhs: 0.0,
                        residual,
                        tol,
                        pass: residual <= tol,
                    });
                } else {
                    let exact = to_f64(&Q::from_integer(catalan[k / 2].clone()));
                    checks.push(relative_check("gauss-moment", params, quad, exact, tol));
                }
            }
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

struct SeriesIdentity;

impl Named for SeriesIdentity {
    fn name(&self) -> &'static str {
        "series-identity"
    }
    fn summary(&self) -> &'static str {
        "Σ ρ^n u_n(x) converges to 1/(1 - ρx + ρ²) within 2ρ^N (N+1)/(1-ρ)²"
    }
}

impl Certificate for SeriesIdentity {
    fn run(&self, c: &CertConfig) -> Result<CertReport> {
        let rhos = c.rhos.clone().unwrap_or_else(|| q_list(&[(3, 10), (7, 10), (19, 20)]));
        let mut checks = Vec::new();
        for rho in &rhos {
            let r = to_f64(rho);
            let mut terms = 16usize;
            while terms <= 1024 {
                // Σ_{n>N} (n+1) ρ^n <= 2 ρ^N (N+1) / (1-ρ)², plus rounding headroom.
                let bound = 2.0 * r.powi(terms as i32) * (terms + 1) as f64 / ((1.0 - r) * (1.0 - r));
                let mut worst = 0.0f64;
                let mut worst_x = 0.0;
                for i in 0..=40 {
                    let x = -2.0 + 0.1 * i as f64;
                    let closed = 1.0 / (1.0 - r * x + r * r);
                    let err = (chebyshev_series(r, x, terms) - closed).abs();
                    let ratio = err / (bound + 1e-13 * closed);
                    if ratio > worst {
                        worst = ratio;
                        worst_x = x;
                    }
                }
                checks.push(CertCheck {
                    check: "series-identity".into(),
                    params: json!({ "rho": to_pq(rho), "N": terms, "worst_x": worst_x, "tail_bound": bound }),
                    lhs: worst,
                    rhs: 0.0,
                    residual: worst,
                    tol: 1.0,
                    pass: worst <= 1.0,
                });
                terms *= 2;
            }
        }
        Ok(CertReport { certificate: self.name(), checks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_small() {
        let c: Vec<i64> = catalan_numbers(6).iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn spot_checks() {
        assert!(mixed_moment_check(0, &frac(1, 2), 3, &int(1), 1e-8).unwrap().pass);
        let c = mixed_moment_check(0, &int(2), 3, &int(1), 1e-8).unwrap();
        assert!(c.pass);
        assert!((c.params["atom_part"].as_f64().unwrap() - 0.75 * 3.5f64.powi(3)).abs() < 1e-9);
        assert!(mixed_moment_check(2, &int(1), 10, &frac(1, 2), 1e-8).unwrap().pass);
    }

    #[test]
    fn registry_contents() {
        let r = certificates();
        assert_eq!(
            r.names(),
            vec!["gauss-exactness", "mixed-moment", "mu-mass", "ratio-probe", "series-identity", "viennot"]
        );
        assert!(r.get("nope").is_err());
    }

    #[test]
    fn small_viennot_grid_passes() {
        let cfg = CertConfig {
            max_index: Some(3),
            max_length: Some(5),
            ..CertConfig::default()
        };
        let report = certificates().get("viennot").unwrap().run(&cfg).unwrap();
        assert!(report.pass(), "{:?}", report.failures().next());
        assert_eq!(report.checks.len(), 3 * 5 * 16);
    }
}
