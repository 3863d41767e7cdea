mod common;

use common::{enumerate, law_of};
use motzkin_core::converge::tv_distance;
use motzkin_core::engine::{weight_table, ExactModel};
use motzkin_core::limit_chains::{InitialLawSpec, KernelSpec};
use motzkin_core::rational::{frac, int};
use motzkin_core::sampler::{build_backward_table, sample_paths};
use motzkin_core::{BoundaryMeasure, DistTable, ModelSpec, MotzkinPath, WeightConfig, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational(max: i64) -> impl Strategy<Value = Q> {
    (0..=max, 1..=max).prop_map(|(p, q)| frac(p, q))
}

fn positive(max: i64) -> impl Strategy<Value = Q> {
    (1..=max, 1..=max).prop_map(|(p, q)| frac(p, q))
}

fn table() -> impl Strategy<Value = DistTable> {
    prop::collection::vec((0i64..4, 0i64..3, 1i64..6), 1..6).prop_map(|atoms| {
        DistTable::from_weights(atoms.into_iter().map(|(a, b, w)| (vec![a, b], int(w)))).unwrap()
    })
}

fn finite_measure() -> impl Strategy<Value = BoundaryMeasure> {
    prop::collection::vec(0i64..4, 1..4)
        .prop_filter("some positive weight", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| BoundaryMeasure::FiniteSupport(w.into_iter().map(int).collect()))
}

/// `u_n(x)` by the three-term recursion.
fn cheb(n: usize, x: &Q) -> Q {
    let (mut a, mut b) = (Q::zero(), Q::one());
    for _ in 0..n {
        let c = x * &b - &a;
        a = b;
        b = c;
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tv_is_a_metric(p in table(), q in table(), r in table()) {
        let pq = tv_distance(&p, &q);
        prop_assert_eq!(&pq, &tv_distance(&q, &p));
        prop_assert!(pq >= Q::zero() && pq <= Q::one());
        prop_assert!(tv_distance(&p, &r) <= &pq + tv_distance(&q, &r));
        prop_assert_eq!(pq.is_zero(), p == q);
    }

    #[test]
    fn kernel_rows_are_stochastic(rho in positive(6), sigma in rational(6), n in 0usize..60) {
        let q = KernelSpec::q(rho, sigma.clone()).unwrap();
        prop_assert_eq!(q.row(n).total(), Q::one());
        let p = KernelSpec::p(sigma.clone()).unwrap();
        prop_assert_eq!(p.row(n).total(), Q::one());
        prop_assert_eq!(p.row(n), KernelSpec::q(Q::one(), sigma).unwrap().row(n));
    }

    #[test]
    fn q_kernel_is_a_doob_transform(rho in positive(5), sigma in rational(5), n in 0usize..30) {
        let x = &rho + rho.recip();
        let scale = &x + &sigma;
        let row = KernelSpec::q(rho, sigma.clone()).unwrap().row(n);
        let h = |m: usize| cheb(m, &x);
        prop_assert_eq!(&scale * &row.up, h(n + 1) / h(n));
        prop_assert_eq!(&scale * &row.stay, sigma);
        let down = if n == 0 { Q::zero() } else { h(n - 1) / h(n) };
        prop_assert_eq!(&scale * &row.down, down);
    }

    #[test]
    fn q_deformed_geometric_is_two_geometric_convolution(p0 in 1i64..6, q0 in 2i64..12, p1 in 1i64..6, q1 in 1i64..4) {
        let rho0 = frac(p0, q0);
        let rho_hat = frac(p1, q1) + Q::one();
        prop_assume!(&rho0 * &rho_hat < Q::one());
        let q_law = InitialLawSpec::QDeformed(BoundaryMeasure::Geometric(rho0.clone()), rho_hat.clone());
        let conv = InitialLawSpec::TwoGeometrics { rho0, rho_hat };
        for n in 0..60 {
            prop_assert_eq!(q_law.prob(n), conv.prob(n), "atom {}", n);
        }
    }

    #[test]
    fn sampler_probabilities_are_exact(alpha in finite_measure(), beta in finite_measure(), sigma in rational(3), length in 1usize..=4) {
        let weights = WeightConfig::constant(sigma.clone()).unwrap();
        let brute = enumerate(&weights, &alpha, &beta, length);
        prop_assume!(!brute.is_empty());
        let spec = ModelSpec::new(weights, alpha, beta, length).unwrap();
        let table = build_backward_table(&spec).unwrap();
        let law = law_of(&brute, |h| h.iter().map(|&x| x as i64).collect());
        for (h, p) in &law {
            prop_assert_eq!(&table.path_probability(&MotzkinPath::from_signed(h).unwrap()), p);
        }
        for path in sample_paths(&table, 7, 32) {
            let key: Vec<i64> = path.heights().iter().map(|&x| x as i64).collect();
            prop_assert!(law.contains_key(&key));
        }
    }

    #[test]
    fn transfer_identity_matches_enumeration(
        up in prop::collection::vec(positive(4), 1..4),
        level in prop::collection::vec(rational(4).prop_map(|x| x + frac(1, 5)), 1..4),
        down in prop::collection::vec(positive(4), 1..4),
        length in 1usize..=6,
        m in 0usize..3,
    ) {
        let weights = WeightConfig::general(up, level, down).unwrap();
        let t = weight_table(&weights, length, m + length).unwrap();
        let mut alpha = vec![Q::zero(); m + 1];
        alpha[m] = Q::one();
        let alpha = BoundaryMeasure::FiniteSupport(alpha);
        let brute = enumerate(&weights, &alpha, &BoundaryMeasure::Geometric(Q::one()), length);
        for n in 0..=m + length {
            let s: Q = brute.iter().filter(|(h, _)| h[length] == n).map(|(_, w)| w).sum();
            prop_assert_eq!(t.get(m, n), s);
        }
        let spec = ModelSpec::new(weights, alpha, BoundaryMeasure::Geometric(Q::one()), length).unwrap();
        let model = ExactModel::new(spec).unwrap();
        let total: Q = brute.values().sum();
        prop_assert_eq!(model.normalization(), &total);
    }
}
