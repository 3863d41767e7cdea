//! Domain types: edge weights, Motzkin paths, boundary measures and model specs.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{frac, parse_rational, pow, Q};

/// Altitude-dependent edge weights `(a_n, b_n, c_n)` for up, level and down steps.
///
/// The weight of a step is read at the altitude of its left end. `c_0` is
/// stored but never read. General sequences are extended beyond their stored
/// length by repeating the last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Constant { sigma: Q, one: Q },
    General { up: Vec<Q>, level: Vec<Q>, down: Vec<Q> },
}

impl WeightConfig {
    /// The constant case `(1, sigma, 1)`. `sigma = 0` is allowed (Dyck-type paths).
    pub fn constant(sigma: Q) -> Result<Self> {
        if sigma.is_negative() {
            return Err(Error::InvalidWeights(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(Self {
            repr: Repr::Constant { sigma, one: Q::one() },
        })
    }

    pub fn general(up: Vec<Q>, level: Vec<Q>, down: Vec<Q>) -> Result<Self> {
        for (name, seq) in [("up", &up), ("level", &level), ("down", &down)] {
            if seq.is_empty() {
                return Err(Error::InvalidWeights(format!("{name} sequence is empty")));
            }
            if let Some(bad) = seq.iter().find(|w| !w.is_positive()) {
                return Err(Error::InvalidWeights(format!(
                    "{name} weights must be strictly positive, got {bad}"
                )));
            }
        }
        Ok(Self {
            repr: Repr::General { up, level, down },
        })
    }

    pub fn sigma(&self) -> Option<&Q> {
        match &self.repr {
            Repr::Constant { sigma, .. } => Some(sigma),
            Repr::General { .. } => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.sigma().is_some()
    }

    pub fn up(&self, n: usize) -> &Q {
        match &self.repr {
            Repr::Constant { one, .. } => one,
            Repr::General { up, .. } => extended(up, n),
        }
    }

    pub fn level(&self, n: usize) -> &Q {
        match &self.repr {
            Repr::Constant { sigma, .. } => sigma,
            Repr::General { level, .. } => extended(level, n),
        }
    }

    pub fn down(&self, n: usize) -> &Q {
        match &self.repr {
            Repr::Constant { one, .. } => one,
            Repr::General { down, .. } => extended(down, n),
        }
    }

    /// Weight of the single step `from -> to`; zero when the step is not a Motzkin step.
    pub fn step(&self, from: usize, to: usize) -> Q {
        if to == from + 1 {
            self.up(from).clone()
        } else if to == from {
            self.level(from).clone()
        } else if to + 1 == from {
            self.down(from).clone()
        } else {
            Q::zero()
        }
    }

    /// Same weights with `c_0` replaced; the result is indistinguishable for every path.
    pub fn with_c0(&self, c0: Q) -> Result<Self> {
        match &self.repr {
            Repr::Constant { sigma, .. } => {
                Self::general(vec![Q::one()], vec![sigma.clone()], vec![c0, Q::one()])
            }
            Repr::General { up, level, down } => {
                let mut down = down.clone();
                if down.len() == 1 {
                    down.push(down[0].clone());
                }
                down[0] = c0;
                Self::general(up.clone(), level.clone(), down)
            }
        }
    }
}

fn extended(seq: &[Q], n: usize) -> &Q {
    seq.get(n).unwrap_or_else(|| seq.last().expect("validated non-empty"))
}

/// A Motzkin path `(γ_0, …, γ_L)` with `L >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotzkinPath {
    heights: Vec<usize>,
}

impl MotzkinPath {
    pub fn new(heights: Vec<usize>) -> Result<Self> {
        if heights.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "a path needs length >= 1 (at least two heights), got {} heights",
                heights.len()
            )));
        }
        if let Some(k) = heights.windows(2).position(|w| w[0].abs_diff(w[1]) > 1) {
            return Err(Error::InvalidPath(format!(
                "jump larger than 1 between positions {k} and {}",
                k + 1
            )));
        }
        Ok(Self { heights })
    }

    /// Validates signed heights, rejecting negative entries.
    pub fn from_signed(heights: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(heights.len());
        for (k, &h) in heights.iter().enumerate() {
            if h < 0 {
                return Err(Error::InvalidPath(format!("negative height {h} at position {k}")));
            }
            out.push(h as usize);
        }
        Self::new(out)
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> usize {
        self.heights[0]
    }

    pub fn end(&self) -> usize {
        self.heights[self.heights.len() - 1]
    }

    pub fn horizontal_steps(&self) -> usize {
        self.heights.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Concatenation at a common height; `None` when the end of `self` differs from the start of `other`.
    pub fn concat(&self, other: &MotzkinPath) -> Option<MotzkinPath> {
        if self.end() != other.start() {
            return None;
        }
        let mut heights = self.heights.clone();
        heights.extend_from_slice(&other.heights[1..]);
        Some(MotzkinPath { heights })
    }
}

impl fmt::Display for MotzkinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.heights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for MotzkinPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let heights = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse {
                what: "path",
                input: s.to_string(),
            })?;
        Self::from_signed(&heights)
    }
}

/// Edge weight `∏ a^{ε+} b^{ε0} c^{ε-}` of a path.
pub fn path_weight(path: &MotzkinPath, weights: &WeightConfig) -> Q {
    path.heights
        .windows(2)
        .fold(Q::one(), |acc, w| acc * weights.step(w[0], w[1]))
}

/// The two views of a path read from its right end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reversal {
    /// `(γ_L, γ_{L-1}, …, γ_0)`.
    pub heights: MotzkinPath,
    /// `γ_{L-k} - γ_L` for `k = 0..=L`; the first entry is always 0.
    pub increments: Vec<i64>,
}

pub fn reverse_path(path: &MotzkinPath) -> Reversal {
    let mut heights = path.heights.clone();
    heights.reverse();
    let anchor = path.end() as i64;
    let increments = heights.iter().map(|&h| h as i64 - anchor).collect();
    Reversal {
        heights: MotzkinPath { heights },
        increments,
    }
}

/// A non-negative weight sequence on the altitudes `0, 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMeasure {
    /// Weights `w_0, …, w_k`, zero beyond.
    FiniteSupport(Vec<Q>),
    /// Weights `ρ^n`.
    Geometric(Q),
}

impl BoundaryMeasure {
    pub fn finite(weights: Vec<Q>) -> Result<Self> {
        let m = BoundaryMeasure::FiniteSupport(weights);
        m.validate()?;
        Ok(m)
    }

    pub fn point(at: usize) -> Self {
        let mut w = vec![Q::zero(); at + 1];
        w[at] = Q::one();
        BoundaryMeasure::FiniteSupport(w)
    }

    pub fn geometric(ratio: Q) -> Result<Self> {
        let m = BoundaryMeasure::Geometric(ratio);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryMeasure::FiniteSupport(w) => {
                if w.iter().any(|x| x.is_negative()) {
                    return Err(Error::InvalidMeasure("negative weight".into()));
                }
                if w.iter().all(|x| x.is_zero()) {
                    return Err(Error::InvalidMeasure("all weights are zero".into()));
                }
                Ok(())
            }
            BoundaryMeasure::Geometric(r) => {
                if !r.is_positive() {
                    return Err(Error::InvalidMeasure(format!("geometric ratio must be > 0, got {r}")));
                }
                Ok(())
            }
        }
    }

    pub fn weight(&self, n: usize) -> Q {
        match self {
            BoundaryMeasure::FiniteSupport(w) => w.get(n).cloned().unwrap_or_else(Q::zero),
            BoundaryMeasure::Geometric(r) => pow(r, n),
        }
    }

    /// Largest altitude carrying positive weight, `None` for infinite support.
    pub fn max_support(&self) -> Option<usize> {
        match self {
            BoundaryMeasure::FiniteSupport(w) => w.iter().rposition(|x| !x.is_zero()),
            BoundaryMeasure::Geometric(_) => None,
        }
    }

    pub fn ratio(&self) -> Option<&Q> {
        match self {
            BoundaryMeasure::Geometric(r) => Some(r),
            BoundaryMeasure::FiniteSupport(_) => None,
        }
    }
}

impl fmt::Display for BoundaryMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMeasure::FiniteSupport(w) => {
                f.write_str("finite:")?;
                for (i, x) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            BoundaryMeasure::Geometric(r) => write!(f, "geom:{r}"),
        }
    }
}

impl FromStr for BoundaryMeasure {
    type Err = Error;

    /// `finite:1,1`, `finite:0,0,1/2` or `geom:0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "boundary measure",
            input: s.to_string(),
        };
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "finite" => {
                let w = rest
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                BoundaryMeasure::finite(w)
            }
            "geom" | "geometric" => BoundaryMeasure::geometric(parse_rational(rest)?),
            _ => Err(bad()),
        }
    }
}

/// Default certified tail budget for truncated infinite boundary measures.
pub fn default_tail_epsilon() -> Q {
    frac(1, 1) / crate::rational::pow(&frac(10, 1), 30)
}

/// A full model: edge weights, two boundary measures and the length `L`.
///
/// Admissible combinations (anything else is rejected):
/// 1. both measures finitely supported;
/// 2. finitely supported `alpha`, geometric `beta` with any ratio;
/// 3. geometric `alpha` (ratio `ρ0 < 1`) and geometric `beta` (ratio `ρ1`) with
///    `ρ0 ρ1 < 1`, constant weights only.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    weights: WeightConfig,
    alpha: BoundaryMeasure,
    beta: BoundaryMeasure,
    length: usize,
    tail_epsilon: Q,
}

impl ModelSpec {
    pub fn new(
        weights: WeightConfig,
        alpha: BoundaryMeasure,
        beta: BoundaryMeasure,
        length: usize,
    ) -> Result<Self> {
        if length == 0 {
            return Err(Error::Inadmissible("length must be >= 1".into()));
        }
        alpha.validate()?;
        beta.validate()?;
        match (&alpha, &beta) {
            (BoundaryMeasure::FiniteSupport(_), _) => {}
            (BoundaryMeasure::Geometric(r0), BoundaryMeasure::Geometric(r1)) => {
                if r0 >= &Q::one() {
                    return Err(Error::Inadmissible(format!(
                        "geometric alpha needs ratio < 1, got {r0}"
                    )));
                }
                if r0 * r1 >= Q::one() {
                    return Err(Error::Inadmissible(format!(
                        "geometric boundaries need rho0*rho1 < 1, got {}",
                        r0 * r1
                    )));
                }
                if !weights.is_constant() {
                    return Err(Error::Inadmissible(
                        "geometric alpha requires constant-case weights".into(),
                    ));
                }
            }
            (BoundaryMeasure::Geometric(_), BoundaryMeasure::FiniteSupport(_)) => {
                return Err(Error::Inadmissible(
                    "geometric alpha is only admitted together with geometric beta".into(),
                ));
            }
        }
        Ok(Self {
            weights,
            alpha,
            beta,
            length,
            tail_epsilon: default_tail_epsilon(),
        })
    }

    /// Constant-case shorthand.
    pub fn constant(sigma: Q, alpha: BoundaryMeasure, beta: BoundaryMeasure, length: usize) -> Result<Self> {
        Self::new(WeightConfig::constant(sigma)?, alpha, beta, length)
    }

    pub fn with_tail_epsilon(mut self, eps: Q) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("tail epsilon must be > 0".into()));
        }
        self.tail_epsilon = eps;
        Ok(self)
    }

    pub fn with_length(&self, length: usize) -> Result<Self> {
        Self::new(self.weights.clone(), self.alpha.clone(), self.beta.clone(), length)?
            .with_tail_epsilon(self.tail_epsilon.clone())
    }

    pub fn weights(&self) -> &WeightConfig {
        &self.weights
    }

    pub fn alpha(&self) -> &BoundaryMeasure {
        &self.alpha
    }

    pub fn beta(&self) -> &BoundaryMeasure {
        &self.beta
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn tail_epsilon(&self) -> &Q {
        &self.tail_epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ten_step_path() -> MotzkinPath {
        "2,1,1,0,1,1,2,1,0,1".parse().unwrap()
    }

    /// Distinct primes stand in for the symbolic weights so the product is unambiguous.
    fn generic_weights() -> WeightConfig {
        WeightConfig::general(
            vec![int(2), int(3), int(5)],
            vec![int(7), int(11), int(13)],
            vec![int(17), int(19), int(23)],
        )
        .unwrap()
    }

    #[test]
    fn ten_step_weight_product() {
        // a0^2 a1 b1^2 c1^2 c2^2
        let expected = int(2 * 2 * 3 * 11 * 11 * 19 * 19 * 23 * 23);
        assert_eq!(path_weight(&ten_step_path(), &generic_weights()), expected);
    }

    #[test]
    fn ten_step_weight_constant_case() {
        let sigma = frac(3, 7);
        let w = WeightConfig::constant(sigma.clone()).unwrap();
        assert_eq!(path_weight(&ten_step_path(), &w), &sigma * &sigma);
    }

    #[test]
    fn single_up_step() {
        let p: MotzkinPath = "0,1".parse().unwrap();
        assert_eq!(path_weight(&p, &generic_weights()), int(2));
        assert_eq!(path_weight(&p, &WeightConfig::constant(int(5)).unwrap()), int(1));
    }

    #[test]
    fn reversal_examples() {
        let r = reverse_path(&ten_step_path());
        assert_eq!(r.heights.heights(), &[1, 0, 1, 2, 1, 1, 0, 1, 1, 2]);
        assert_eq!(r.increments, vec![0, -1, 0, 1, 0, 0, -1, 0, 0, 1]);

        let flat: MotzkinPath = "0,0,0".parse().unwrap();
        let r = reverse_path(&flat);
        assert_eq!(r.heights, flat);
        assert_eq!(r.increments, vec![0, 0, 0]);
    }

    #[test]
    fn invalid_paths_rejected() {
        assert!(MotzkinPath::from_signed(&[0, -1]).is_err());
        assert!(MotzkinPath::new(vec![0, 2]).is_err());
        assert!(MotzkinPath::new(vec![3]).is_err());
        assert!("1,x".parse::<MotzkinPath>().is_err());
    }

    #[test]
    fn c0_is_never_read() {
        let w = generic_weights();
        let w2 = w.with_c0(int(1000)).unwrap();
        for s in ["0,0,1,0,0", "1,0,1,2,1,0", "2,1,1,0,1,1,2,1,0,1"] {
            let p: MotzkinPath = s.parse().unwrap();
            assert_eq!(path_weight(&p, &w), path_weight(&p, &w2));
        }
    }

    #[test]
    fn measure_parsing() {
        let m: BoundaryMeasure = "finite:1,1".parse().unwrap();
        assert_eq!(m, BoundaryMeasure::FiniteSupport(vec![int(1), int(1)]));
        let g: BoundaryMeasure = "geom:0.5".parse().unwrap();
        assert_eq!(g, BoundaryMeasure::Geometric(frac(1, 2)));
        assert_eq!(g.to_string().parse::<BoundaryMeasure>().unwrap(), g);
        assert!("finite:0,0".parse::<BoundaryMeasure>().is_err());
        assert!("geom:0".parse::<BoundaryMeasure>().is_err());
        assert!("poisson:1".parse::<BoundaryMeasure>().is_err());
    }

    #[test]
    fn admissibility() {
        let s = int(1);
        let fin = BoundaryMeasure::point(0);
        let g = |p, q| BoundaryMeasure::Geometric(frac(p, q));
        assert!(ModelSpec::constant(s.clone(), fin.clone(), fin.clone(), 3).is_ok());
        assert!(ModelSpec::constant(s.clone(), fin.clone(), g(5, 1), 3).is_ok());
        assert!(ModelSpec::constant(s.clone(), g(1, 2), g(3, 2), 3).is_ok());
        assert!(ModelSpec::constant(s.clone(), g(1, 2), g(2, 1), 3).is_err());
        assert!(ModelSpec::constant(s.clone(), g(1, 1), g(1, 2), 3).is_err());
        assert!(ModelSpec::constant(s.clone(), g(1, 2), fin.clone(), 3).is_err());
        assert!(ModelSpec::constant(s, fin.clone(), fin, 0).is_err());
    }
}
