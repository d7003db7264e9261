mod common;

use mvop::cli_reports::{BackendKind, Check, RunConfig};
use mvop::darboux::{ladder, LadderKind};
use mvop::diff_operators::{bispectral_eigenvalues, MatrixDiffOperator};
use mvop::irreducibility::order_zero_symmetries;
use mvop::mvop::{continuant, tridiagonal_from_rhos, MVOPSequence};
use mvop::scalar::rat;
use mvop::scalar_families::{exact_coefficients, gauss_rule, monic_from_recurrence, ScalarWeightSpec as S};
use mvop::weight::WeightSpec;
use mvop::{Mat, MatrixPolynomial, Poly};
use num_rational::BigRational;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

type Q = BigRational;

fn small_rat() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| rat(p, q))
}

fn rat_mp(n: usize, max_deg: usize) -> impl Strategy<Value = MatrixPolynomial<Q>> {
    (0..=max_deg)
        .prop_flat_map(move |d| proptest::collection::vec(proptest::collection::vec(small_rat(), n * n), d + 1))
        .prop_map(move |cs| {
            let coeffs = cs.into_iter().map(|v| Mat::from_fn(n, |i, j| v[i * n + j].clone())).collect();
            MatrixPolynomial::from_coeffs(coeffs).unwrap()
        })
}

fn float_mp(n: usize, max_deg: usize) -> impl Strategy<Value = MatrixPolynomial<f64>> {
    (0..=max_deg)
        .prop_flat_map(move |d| proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, n * n), d + 1))
        .prop_map(move |cs| {
            let coeffs = cs.into_iter().map(|v| Mat::from_fn(n, |i, j| v[i * n + j])).collect();
            MatrixPolynomial::from_coeffs(coeffs).unwrap()
        })
}

fn rat_op(n: usize) -> impl Strategy<Value = MatrixDiffOperator<Q>> {
    proptest::collection::vec(rat_mp(n, 2), 1..=3).prop_map(|c| MatrixDiffOperator::new(c).unwrap())
}

/// Classical scalar weights with exactly representable parameters.
fn scalar_weight() -> impl Strategy<Value = S> {
    prop_oneof![
        (-4i32..=4).prop_map(|b| S::hermite(b as f64 / 4.0)),
        (-3i32..=12).prop_map(|a| S::laguerre(a as f64 / 4.0)),
        ((-3i32..=8), (-3i32..=8)).prop_map(|(a, b)| S::jacobi(a as f64 / 4.0, b as f64 / 4.0)),
    ]
}

fn nonzero_a() -> impl Strategy<Value = f64> {
    prop_oneof![0.25f64..3.0, -3.0f64..-0.25]
}

fn weight_spec(max_n: usize) -> impl Strategy<Value = WeightSpec> {
    (2..=max_n).prop_flat_map(|n| {
        (proptest::collection::vec(nonzero_a(), n - 1), proptest::collection::vec(scalar_weight(), n))
            .prop_map(|(a, w)| WeightSpec::new(a, w).unwrap())
    })
}

fn binom(k: u64, j: u64) -> f64 {
    (ln_gamma(k as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((k - j) as f64 + 1.0)).exp().round()
}

/// `int x^k w` from closed forms, with the sum of the absolute terms.
fn moment(w: &S, k: u64) -> (f64, f64) {
    match w.family {
        mvop::scalar_families::ScalarFamily::Hermite { b } => {
            // x = y + b, int y^j e^{-y^2} = Gamma((j+1)/2) for even j
            let terms: Vec<f64> = (0..=k)
                .filter(|j| j % 2 == 0)
                .map(|j| binom(k, j) * b.powi((k - j) as i32) * ln_gamma((j as f64 + 1.0) / 2.0).exp() * (b * b).exp())
                .collect();
            (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
        }
        mvop::scalar_families::ScalarFamily::Laguerre { alpha } => {
            let m = ln_gamma(alpha + k as f64 + 1.0).exp();
            (m, m)
        }
        mvop::scalar_families::ScalarFamily::Jacobi { alpha, beta } => {
            // x = 2t - 1
            let beta_fn = |p: f64, q: f64| (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp();
            let terms: Vec<f64> = (0..=k)
                .map(|j| {
                    let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binom(k, j) * 2f64.powi(j as i32) * beta_fn(beta + j as f64 + 1.0, alpha + 1.0)
                })
                .map(|t| t * 2f64.powf(alpha + beta + 1.0))
                .collect();
            (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
        }
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms_exact(p in rat_mp(2, 3), q in rat_mp(2, 3), r in rat_mp(2, 3)) {
        let pq_r = p.mul(&q).unwrap().mul(&r).unwrap();
        let p_qr = p.mul(&q.mul(&r).unwrap()).unwrap();
        prop_assert_eq!(pq_r, p_qr);
        let left = p.mul(&q.add(&r).unwrap()).unwrap();
        let right = p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn evaluation_is_multiplicative(p in float_mp(3, 4), q in float_mp(3, 4), x in -2.0f64..2.0) {
        let lhs = p.mul(&q).unwrap().evaluate(&x);
        let rhs = &p.evaluate(&x) * &q.evaluate(&x);
        let scale = p.max_coeff_norm() * q.max_coeff_norm() * 2f64.powi(8) * 9.0 + 1.0;
        prop_assert!((&lhs - &rhs).max_norm() <= 1e-11 * scale);
    }

    #[test]
    fn leibniz(p in rat_mp(2, 4), q in rat_mp(2, 4)) {
        let lhs = p.mul(&q).unwrap().derivative(1);
        let rhs = p.derivative(1).mul(&q).unwrap().add(&p.mul(&q.derivative(1)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_law(p in rat_mp(2, 8), d1 in rat_op(2), d2 in rat_op(2)) {
        let lhs = d1.compose(&d2).unwrap().apply(&p).unwrap();
        let rhs = d2.apply(&d1.apply(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_consistent(spec in weight_spec(3), q in rat_mp(3, 5)) {
        prop_assume!(spec.size == 3);
        let d = bispectral_eigenvalues(&spec).map(|l| l.diagonal_operator::<Q>());
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        let conj = d.conjugate_by_t(&spec).unwrap();
        let (t, t_inv) = spec.t_pair::<Q>();
        let via = d.apply(&q.mul(&t).unwrap()).unwrap().mul(&t_inv).unwrap();
        prop_assert_eq!(conj.apply(&q).unwrap(), via);
    }

    #[test]
    fn eigenvalue_commutation(spec in weight_spec(4)) {
        let lambda = bispectral_eigenvalues(&spec);
        prop_assume!(lambda.is_ok());
        let lambda = lambda.unwrap();
        let seq = MVOPSequence::<f64>::new(&spec, 16).unwrap();
        let a = spec.nilpotent::<f64>();
        for n in 0..=15i64 {
            let (l0, l1) = (lambda.at::<f64>(n), lambda.at::<f64>(n + 1));
            prop_assert_eq!(&a * &l1, &l0 * &a);
            if n >= 1 {
                let r = seq.ratio_matrix(n as usize).unwrap();
                let lm = lambda.at::<f64>(n - 1);
                let diff = &(&r * &lm) - &(&l0 * &r);
                prop_assert!(diff.max_norm() <= 1e-13 * r.max_norm() * l0.max_norm().max(1.0));
            }
        }
    }

    #[test]
    fn quadrature_exactness(w in scalar_weight(), m in 1usize..=12, seed in proptest::collection::vec(-1.0f64..1.0, 24)) {
        let deg = 2 * m - 1;
        let coeffs = &seed[..=deg];
        let (x, wt) = gauss_rule(&w, m).unwrap();
        let quad: f64 = x.iter().zip(&wt).map(|(x, w)| w * coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)).sum();
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * moment(&w, k as u64).0).sum();
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * moment(&w, k as u64).1).sum();
        prop_assert!((quad - exact).abs() <= 1e-10 * scale, "{quad} vs {exact}");
    }

    #[test]
    fn ladders_shift_exactly(num in -3i64..=12, kind in prop_oneof![
        Just(LadderKind::AlphaUp), Just(LadderKind::AlphaDown), Just(LadderKind::NUp),
        Just(LadderKind::NDown), Just(LadderKind::Eigen)]) {
        let alpha = num as f64 / 4.0;
        let (dn, da) = kind.delta();
        prop_assume!(alpha + da as f64 > -1.0);
        let op = ladder::<Q>(kind, alpha).unwrap();
        let monic = |a: f64, n: usize| {
            let (b, c) = exact_coefficients(&S::laguerre(a), n.max(1)).unwrap();
            monic_from_recurrence(&b, &c, n)
        };
        for n in 0..=8usize {
            let p = MatrixPolynomial::diagonal(&[monic(alpha, n)]);
            let lhs = op.operator.apply(&p).unwrap().entry_poly(0, 0);
            let target = n as i64 + dn;
            let rhs = if target < 0 { Poly::zero() } else { monic(alpha + da as f64, target as usize).scale(&op.factor(n as i64)) };
            prop_assert_eq!(lhs, rhs, "n = {}", n);
        }
    }

    #[test]
    fn continuant_matches_determinant(rho in proptest::collection::vec(1e-3f64..=10.0, 1..=7)) {
        let brute = tridiagonal_from_rhos(&rho).determinant();
        let cont = continuant(&rho);
        prop_assert!(cont >= 1.0);
        prop_assert!((brute - cont).abs() <= 1e-10 * cont);
    }

    #[test]
    fn nilpotent_squares_to_zero(spec in weight_spec(8)) {
        let a = spec.nilpotent::<f64>();
        prop_assert!((&a * &a).is_zero());
    }

    #[test]
    fn weight_is_psd(spec in weight_spec(4), u in 0.02f64..0.98) {
        let x = -1.0 + 2.0 * u;
        let w = spec.eval(x).unwrap();
        prop_assert!((&w - &w.transpose()).max_norm() <= 1e-15 * w.max_norm());
        let dm = nalgebra::DMatrix::from_fn(w.size(), w.size(), |i, j| w[(i, j)]);
        let min = dm.symmetric_eigenvalues().min();
        let trace: f64 = (0..w.size()).map(|i| w[(i, i)]).sum();
        prop_assert!(min >= -1e-12 * trace);
    }

    #[test]
    fn sesquilinear(spec in weight_spec(3), p in float_mp(3, 3), q in float_mp(3, 3), r in float_mp(3, 3), s in -2.0f64..2.0) {
        prop_assume!(spec.size == 3);
        let seq = MVOPSequence::<f64>::new(&spec, 4).unwrap();
        let lhs = seq.inner(&p.scale(&s).add(&r).unwrap(), &q).unwrap();
        let rhs = &seq.inner(&p, &q).unwrap().scale(&s) + &seq.inner(&r, &q).unwrap();
        let scale = seq.inner(&p, &q).unwrap().max_norm() * s.abs() + seq.inner(&r, &q).unwrap().max_norm() + 1e-300;
        prop_assert!((&lhs - &rhs).max_norm() <= 1e-11 * scale.max(lhs.max_norm()));
    }

    #[test]
    fn orthogonality_random_specs(spec in weight_spec(3)) {
        let seq = MVOPSequence::<f64>::new(&spec, 10).unwrap();
        let r = seq.verify_orthogonality(10, 1e-9).unwrap();
        prop_assert!(r.pass, "{:?}", r.worst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identity_always_a_symmetry(spec in weight_spec(3)) {
        let n = spec.size;
        let sp = order_zero_symmetries(&spec, 2 * n * n + 10).unwrap();
        prop_assert!(sp.dimension >= 1);
    }

    #[test]
    fn config_round_trip(spec in weight_spec(4), n_max in 0usize..=12, tol in 1e-14f64..1e-3,
                         exact in any::<bool>(), mask in 0u8..=255) {
        let checks: Vec<Check> = Check::ALL.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| *c).collect();
        let mut cfg = RunConfig::new(&spec, checks);
        cfg.n_max = n_max;
        cfg.tol = tol;
        cfg.backend = if exact { BackendKind::Exact } else { BackendKind::Float };
        let back: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn exact_eigenvalue_commutation() {
    let spec = WeightSpec::new(vec![1.0, 2.0, 0.5], (0..4).map(|k| S::laguerre(0.5 + k as f64)).collect()).unwrap();
    let lambda = bispectral_eigenvalues(&spec).unwrap();
    let seq = MVOPSequence::<Q>::new(&spec, 12).unwrap();
    let a = spec.nilpotent::<Q>();
    for n in 1..=12i64 {
        let r = seq.ratio_matrix(n as usize).unwrap();
        let l0 = lambda.at::<Q>(n);
        assert_eq!(&a * &lambda.at::<Q>(n + 1), &l0 * &a);
        assert_eq!(&r * &lambda.at::<Q>(n - 1), &l0 * &r);
    }
}
