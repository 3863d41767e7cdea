//! The limit boundary processes: kernels `P(σ)` and `Q(ρ, σ)`, their initial
//! laws, the increment law `ξ`, exact finite-dimensional laws and simulation.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::dist::DistTable;
use crate::draw::{stream_rng, Cdf};
use crate::error::{Error, Result};
use crate::model::BoundaryMeasure;
use crate::rational::{int, pow, Q};

/// `[n]_{q} = 1 + q + … + q^n`.
pub fn q_integer(n: usize, q: &Q) -> Q {
    let mut acc = Q::zero();
    let mut term = Q::one();
    for _ in 0..=n {
        acc += &term;
        term *= q;
    }
    acc
}

/// `u_n(ρ + 1/ρ) = (ρ^{n+1} - ρ^{-(n+1)}) / (ρ - 1/ρ) = ρ^{-n} [n]_{ρ²}`, equal to `n + 1` at `ρ = 1`.
pub fn u_at_rho(n: usize, rho: &Q) -> Q {
    q_integer(n, &(rho * rho)) / pow(rho, n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Limit chain under finite first moments.
    P { sigma: Q },
    /// Limit chain with right geometric ratio `rho`; `Q(1, σ) = P(σ)`.
    Q { rho: Q, sigma: Q },
}

impl KernelSpec {
    pub fn p(sigma: Q) -> Result<Self> {
        if sigma.is_negative() {
            return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(KernelSpec::P { sigma })
    }

    pub fn q(rho: Q, sigma: Q) -> Result<Self> {
        if !rho.is_positive() {
            return Err(Error::InvalidArgument(format!("rho must be > 0, got {rho}")));
        }
        if sigma.is_negative() {
            return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(KernelSpec::Q { rho, sigma })
    }

    pub fn sigma(&self) -> &Q {
        match self {
            KernelSpec::P { sigma } | KernelSpec::Q { sigma, .. } => sigma,
        }
    }

    /// Transition row out of `n`.
    pub fn row(&self, n: usize) -> KernelRow {
        match self {
            KernelSpec::P { sigma } => {
                let d = int(2) + sigma;
                let n1 = int(n as i64 + 1);
                KernelRow {
                    up: int(n as i64 + 2) / (&d * &n1),
                    stay: sigma / &d,
                    down: int(n as i64) / (&d * &n1),
                }
            }
            KernelSpec::Q { rho, sigma } => {
                let r2 = rho * rho;
                let d = &r2 + Q::one() + rho * sigma;
                let br = |k: usize| q_integer(k, &r2);
                let bn = br(n);
                KernelRow {
                    up: br(n + 1) / (&bn * &d),
                    stay: rho * sigma / &d,
                    down: if n == 0 {
                        Q::zero()
                    } else {
                        &r2 * br(n - 1) / (&bn * &d)
                    },
                }
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::P { sigma } => write!(f, "P(sigma={sigma})"),
            KernelSpec::Q { rho, sigma } => write!(f, "Q(rho={rho}, sigma={sigma})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub up: Q,
    pub stay: Q,
    pub down: Q,
}

impl KernelRow {
    pub fn total(&self) -> Q {
        &self.up + &self.stay + &self.down
    }

    /// Probability of moving by `delta ∈ {-1, 0, 1}`.
    pub fn prob(&self, delta: i64) -> Q {
        match delta {
            1 => self.up.clone(),
            0 => self.stay.clone(),
            -1 => self.down.clone(),
            _ => Q::zero(),
        }
    }
}

/// `kernel_row` as a free function.
pub fn kernel_row(kernel: &KernelSpec, n: usize) -> KernelRow {
    kernel.row(n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialLawSpec {
    /// `Pr(n) ∝ (n + 1) w_n`.
    SizeBiased(BoundaryMeasure),
    /// `Pr(n) ∝ w_n u_n(ρ1 + 1/ρ1)`, `ρ1 >= 1`.
    QDeformed(BoundaryMeasure, Q),
    /// `G_{ρ0 ρ̂} + G'_{ρ0/ρ̂}` for independent geometrics with `Pr(G_p = n) = (1 - p) p^n`.
    TwoGeometrics { rho0: Q, rho_hat: Q },
}

impl InitialLawSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialLawSpec::SizeBiased(m) => {
                m.validate()?;
                if let Some(r) = m.ratio() {
                    if r >= &Q::one() {
                        return Err(Error::Hypothesis(format!(
                            "size-biased law needs a summable first moment; geometric ratio {r} >= 1"
                        )));
                    }
                }
                Ok(())
            }
            InitialLawSpec::QDeformed(m, rho1) => {
                m.validate()?;
                if rho1 < &Q::one() {
                    return Err(Error::Hypothesis(format!("q-deformed law needs rho1 >= 1, got {rho1}")));
                }
                if let Some(r) = m.ratio() {
                    if r * rho1 >= Q::one() {
                        return Err(Error::Hypothesis(format!(
                            "q-deformed law needs ratio * rho1 < 1, got {}",
                            r * rho1
                        )));
                    }
                }
                Ok(())
            }
            InitialLawSpec::TwoGeometrics { rho0, rho_hat } => {
                if !rho0.is_positive() || !rho_hat.is_positive() {
                    return Err(Error::InvalidArgument("geometric parameters must be > 0".into()));
                }
                if rho0 * rho_hat >= Q::one() || rho0 / rho_hat >= Q::one() {
                    return Err(Error::Hypothesis(format!(
                        "two-geometric law needs rho0*rho_hat < 1 and rho0/rho_hat < 1, got {} and {}",
                        rho0 * rho_hat,
                        rho0 / rho_hat
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact probability of `n`.
    pub fn prob(&self, n: usize) -> Q {
        match self {
            InitialLawSpec::SizeBiased(m) => int(n as i64 + 1) * m.weight(n) / size_biased_total(m),
            InitialLawSpec::QDeformed(m, rho1) => m.weight(n) * u_at_rho(n, rho1) / q_deformed_total(m, rho1),
            InitialLawSpec::TwoGeometrics { rho0, rho_hat } => {
                let a = rho0 * rho_hat;
                let b = rho0 / rho_hat;
                let conv: Q = (0..=n).map(|j| pow(&a, j) * pow(&b, n - j)).sum();
                (Q::one() - &a) * (Q::one() - &b) * conv
            }
        }
    }

    /// Largest support point for finite laws.
    fn finite_top(&self) -> Option<usize> {
        match self {
            InitialLawSpec::SizeBiased(m) | InitialLawSpec::QDeformed(m, _) => m.max_support(),
            InitialLawSpec::TwoGeometrics { .. } => None,
        }
    }

    /// Exact `Pr(X > cap)`.
    pub fn tail_beyond(&self, cap: usize) -> Q {
        if let Some(top) = self.finite_top() {
            if cap >= top {
                return Q::zero();
            }
        }
        match self {
            InitialLawSpec::SizeBiased(BoundaryMeasure::Geometric(r)) => {
                let m = cap + 1;
                pow(r, m) * (int(m as i64 + 1) - int(m as i64) * r)
            }
            _ => Q::one() - (0..=cap).map(|n| self.prob(n)).sum::<Q>(),
        }
    }

    /// Smallest cap whose exact tail is at most `eps`.
    pub fn certified_cap(&self, eps: &Q) -> usize {
        if let Some(top) = self.finite_top() {
            return top;
        }
        let mut cap = 0usize;
        let mut partial = Q::zero();
        loop {
            partial += self.prob(cap);
            let tail = match self {
                InitialLawSpec::SizeBiased(_) => self.tail_beyond(cap),
                _ => Q::one() - &partial,
            };
            if &tail <= eps {
                return cap;
            }
            cap += 1;
        }
    }
}

fn size_biased_total(m: &BoundaryMeasure) -> Q {
    match m {
        BoundaryMeasure::FiniteSupport(w) => w.iter().enumerate().map(|(n, x)| int(n as i64 + 1) * x).sum(),
        BoundaryMeasure::Geometric(r) => {
            let one_minus = Q::one() - r;
            Q::one() / (&one_minus * &one_minus)
        }
    }
}

fn q_deformed_total(m: &BoundaryMeasure, rho1: &Q) -> Q {
    match m {
        BoundaryMeasure::FiniteSupport(w) => w.iter().enumerate().map(|(n, x)| x * u_at_rho(n, rho1)).sum(),
        BoundaryMeasure::Geometric(r) => Q::one() / ((Q::one() - r * rho1) * (Q::one() - r / rho1)),
    }
}

/// Law on `{0, …, support_cap}` (conditional on that event), with the exact excluded mass as `tail_mass`.
pub fn initial_law(spec: &InitialLawSpec, support_cap: usize) -> Result<DistTable> {
    spec.validate()?;
    let atoms = (0..=support_cap).map(|n| (vec![n as i64], spec.prob(n)));
    Ok(DistTable::from_weights(atoms)?.with_tail_mass(spec.tail_beyond(support_cap)))
}

/// Exact joint law of `(Z_0, …, Z_K)` for the chain started from `init`.
pub fn chain_fdd_law(kernel: &KernelSpec, init: &DistTable, k: usize) -> Result<DistTable> {
    let mut atoms: Vec<(Vec<i64>, Q)> = init.iter().map(|(s, p)| (s.clone(), p.clone())).collect();
    for _ in 0..k {
        let mut next = Vec::with_capacity(atoms.len() * 3);
        for (s, p) in atoms {
            let n = *s.last().expect("non-empty") as usize;
            let row = kernel.row(n);
            for delta in [-1i64, 0, 1] {
                let q = row.prob(delta);
                if q.is_zero() {
                    continue;
                }
                let mut t = s.clone();
                t.push(n as i64 + delta);
                next.push((t, &p * q));
            }
        }
        atoms = next;
    }
    Ok(DistTable::from_weights(atoms)?.with_tail_mass(init.tail_mass().clone()))
}

/// One trajectory `(Z_0, …, Z_steps)` from stream 0 of `seed`. Infinite initial laws are
/// drawn from their truncation at the certified cap for `eps`.
pub fn simulate_chain(kernel: &KernelSpec, init: &InitialLawSpec, steps: usize, seed: u64, eps: &Q) -> Result<Vec<usize>> {
    Ok(ChainSimulator::new(kernel, init, eps)?.run(steps, seed, 0))
}

/// Precomputed start CDF and kernel rows for repeated simulation.
#[derive(Debug, Clone)]
pub struct ChainSimulator {
    kernel: KernelSpec,
    start: Cdf,
    rows: Vec<Cdf>,
}

impl ChainSimulator {
    pub fn new(kernel: &KernelSpec, init: &InitialLawSpec, eps: &Q) -> Result<Self> {
        init.validate()?;
        let cap = init.certified_cap(eps);
        let weights: Vec<Q> = (0..=cap).map(|n| init.prob(n)).collect();
        Ok(Self {
            kernel: kernel.clone(),
            start: Cdf::from_weights(&weights)?,
            rows: Vec::new(),
        })
    }

    fn row_cdf(kernel: &KernelSpec, n: usize) -> Cdf {
        let r = kernel.row(n);
        Cdf::from_weights(&[r.down, r.stay, r.up]).expect("kernel rows are stochastic")
    }

    /// Trajectory from stream `stream` of `seed`.
    pub fn run(&self, steps: usize, seed: u64, stream: u64) -> Vec<usize> {
        let mut rng = stream_rng(seed, stream);
        let mut z = self.start.sample(&mut rng);
        let mut out = Vec::with_capacity(steps + 1);
        out.push(z);
        for _ in 0..steps {
            let owned;
            let cdf = match self.rows.get(z) {
                Some(c) => c,
                None => {
                    owned = Self::row_cdf(&self.kernel, z);
                    &owned
                }
            };
            z = z + cdf.sample(&mut rng) - 1;
            out.push(z);
        }
        out
    }

    /// Caches rows `0..=max_height` so later runs avoid recomputing them.
    pub fn with_rows(mut self, max_height: usize) -> Self {
        self.rows = (0..=max_height).map(|n| Self::row_cdf(&self.kernel, n)).collect();
        self
    }

    /// `count` trajectories, trajectory `i` from stream `i`.
    pub fn run_many(&self, steps: usize, seed: u64, count: usize) -> Vec<Vec<usize>> {
        (0..count as u64).into_par_iter().map(|i| self.run(steps, seed, i)).collect()
    }
}

/// Law of `ξ` on `{-1, 0, 1}`: `(ρ1, σ, 1/ρ1) / (ρ1 + 1/ρ1 + σ)` for down, stay, up.
pub fn xi_pmf(rho1: &Q, sigma: &Q) -> Result<DistTable> {
    if rho1 < &Q::one() {
        return Err(Error::Hypothesis(format!("xi law needs rho1 >= 1, got {rho1}")));
    }
    if sigma.is_negative() {
        return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {sigma}")));
    }
    DistTable::from_weights([
        (vec![-1], rho1.clone()),
        (vec![0], sigma.clone()),
        (vec![1], rho1.recip()),
    ])
}

/// Law of `(ξ_1, …, ξ_K)`, i.i.d.
pub fn xi_product(rho1: &Q, sigma: &Q, k: usize) -> Result<DistTable> {
    let one = xi_pmf(rho1, sigma)?;
    let mut out = DistTable::point(Vec::new());
    for _ in 0..k {
        out = out.product(&one);
    }
    Ok(out)
}
