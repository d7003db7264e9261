//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::time::Instant;

use common::*;
use mvop::darboux::{builtin_n5_laguerre, darboux_eigenvalue, hermite_a_factorization, ladder, LadderKind};
use mvop::diff_operators::{build_bispectral_operator, eigen_residual, eigencheck, MatrixDiffOperator};
use mvop::irreducibility::{order_zero_symmetries, try_reduce_2x2, try_reduce_3x3_w1w3};
use mvop::mvop::{continuant, tridiagonal_from_rhos, MVOPSequence};
use mvop::scalar::rat;
use mvop::scalar_families::{exact_coefficients, gauss_rule, monic_from_recurrence, ScalarWeightSpec as S};
use mvop::weight::WeightSpec;
use mvop::{Mat, MatrixPolynomial, Poly};
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Q = BigRational;
type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (_, spec) in named_specs() {
        let seq = MVOPSequence::<f64>::new(&spec, 15).unwrap();
        worst = worst.max(seq.verify_orthogonality(15, 1e-9).unwrap().worst_scaled());
    }
    let secs = start.elapsed().as_secs_f64();
    (worst < 1e-9 && secs < 30.0, format!("worst scaled off-diagonal Gram {worst:.2e} over 5 specs, n,m <= 15, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, spec) in named_specs() {
        let seq = MVOPSequence::<f64>::new(&spec, 15).unwrap();
        worst = worst.max(seq.norm_residuals(15).unwrap().into_iter().fold(0.0, f64::max));
    }
    (worst < 1e-9, format!("worst relative norm error {worst:.2e}, n <= 15"))
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = 2 + trial % 7;
        let rho: Vec<f64> = (0..n - 1).map(|_| 10.0 * (1.0 - rng.gen::<f64>())).collect();
        let c = continuant(&rho);
        worst = worst.max((tridiagonal_from_rhos(&rho).determinant() - c).abs() / c);
    }
    let one = vec![rat(1, 1), rat(1, 1)];
    let exact3 = continuant(&one) == rat(3, 1) && tridiagonal_from_rhos(&one).determinant() == rat(3, 1);
    // the same agreement inside real sequences
    let mut seq_worst: f64 = 0.0;
    for (_, spec) in named_specs() {
        let seq = MVOPSequence::<f64>::new(&spec, 15).unwrap();
        for n in 0..=15 {
            let d = seq.leading_coeff_det(n).unwrap();
            seq_worst = seq_worst.max((d.det_continuant - d.det_direct).abs() / d.det_continuant.abs());
        }
    }
    (
        worst < 1e-10 && exact3 && seq_worst < 1e-10,
        format!("200 random trials N=2..8: {worst:.2e}; N=3 rho=(1,1) gives 3 exactly: {exact3}; in sequences: {seq_worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut shapes = true;
    let expected: Vec<Box<dyn Fn(f64) -> Vec<f64>>> = vec![
        Box::new(|n| vec![-n, -n + 1.0]),
        Box::new(|n| vec![-2.0 * n - 2.0, -2.0 * n]),
        Box::new(|n| vec![-n * (n + 4.0), -(n - 1.0) * (n + 3.0)]),
        Box::new(|n| vec![-2.0 * n - 2.0, -2.0 * n]),
    ];
    for (k, (_, spec)) in named_specs().into_iter().enumerate() {
        let (d, lambda) = build_bispectral_operator::<f64>(&spec).unwrap();
        let seq = MVOPSequence::<f64>::new(&spec, 15).unwrap();
        let r = eigencheck(&seq, &d, &lambda, 15, 1e-9).unwrap();
        worst = worst.max(r.worst);
        if let Some(f) = expected.get(k) {
            for n in 0..=15 {
                shapes &= lambda.at::<f64>(n) == Mat::diag(f(n as f64));
            }
        }
    }
    // the Darboux pair of the five-slot chain
    let five = builtin_n5_laguerre::<f64>(0.5, [1.0; 4]).unwrap();
    let seq = MVOPSequence::<f64>::new(&five.spec, 15).unwrap();
    for n in 0..=15 {
        let q = seq.build_q(n).unwrap();
        worst = worst.max(eigen_residual(&q, &five.d_swapped, &darboux_eigenvalue(&seq, n).unwrap()).unwrap());
    }
    (worst < 1e-9 && shapes, format!("worst eigen residual {worst:.2e}, n <= 15; eigenvalue displays match: {shapes}"))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, spec, want) in recurrence_cases() {
        let seq = MVOPSequence::<f64>::new(&spec, 12).unwrap();
        for n in 1..=8 {
            worst = worst.max(recurrence_error(&seq, n, &want(n as f64)));
        }
    }
    // the displays as printed differ exactly in the corrected entries
    let seq = MVOPSequence::<f64>::new(&gegenbauer(0.5, 1.0), 4).unwrap();
    let t = seq.three_term_coefficients(1).unwrap();
    let printed_off = (t.c[(0, 0)] - 0.1625).abs() > 1e-3 && (t.b[(0, 1)] + 0.0125).abs() > 1e-3;
    (
        worst < 1e-8 && printed_off,
        format!(
            "worst entrywise relative error {worst:.2e}, n = 1..8, 4 families; corrected entries: \
             Hermite C(1,1) halved, Gegenbauer B(1,2) and C(1,1), Hermite-Laguerre C(1,1)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let five = builtin_n5_laguerre::<f64>(0.5, [1.0; 4]).unwrap();
    let seq = MVOPSequence::<f64>::new(&five.spec, 10).unwrap();
    let mut n5: f64 = 0.0;
    for n in 0..=10 {
        let lhs = five.d1_tilde.apply(&seq.build_p(n).unwrap()).unwrap();
        let rhs = seq.build_qt(n).unwrap();
        n5 = n5.max(lhs.distance(&rhs) / rhs.max_coeff_norm());
    }
    let mut exact = true;
    for a in [vec![1.0], vec![2.0, -0.5, 1.0]] {
        let spec = WeightSpec::new(a.clone(), vec![S::hermite(0.0); a.len() + 1]).unwrap();
        let f = hermite_a_factorization::<Q>(&spec).unwrap();
        exact &= f.d1.compose(&f.d2).unwrap() == f.d && f.d2.compose(&f.d1).unwrap() == f.d_swapped;
        let seq = MVOPSequence::<Q>::new(&spec, 10).unwrap();
        for n in 0..=10 {
            exact &= f.d1.apply(&seq.build_p(n).unwrap()).unwrap() == *seq.build_q(n).unwrap();
        }
    }
    (
        n5 < 1e-10 && exact,
        format!("N=5 P_n D1~ = Q_n T, n <= 10: {n5:.2e}; Hermite factorizations and h_n D1 = Q_n (n <= 10) exact: {exact}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (a, al, be) = (1.5, 0.5, -0.25);
    let jac = WeightSpec::new(vec![a], vec![S::jacobi(al + 1.0, be + 1.0).scaled(a * a), S::jacobi(al, be)]).unwrap();
    let jr = try_reduce_2x2(&jac).unwrap();
    let jac_ok = jr.as_ref().is_some_and(|r| {
        (r.b + 1.0).abs() < 1e-10 && (r.c - 1.0).abs() < 1e-10 && r.off_diagonal < 1e-10 && r.diagonal_error < 1e-10
    });
    let dims: Vec<usize> = [
        WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)]).unwrap(),
        WeightSpec::new(vec![1.0], vec![S::laguerre(0.5), S::laguerre(1.0)]).unwrap(),
    ]
    .iter()
    .map(|s| order_zero_symmetries(s, 40).unwrap().dimension)
    .collect();
    let three = WeightSpec::new(vec![3.0, 4.0], vec![S::hermite(0.0), S::hermite(0.5), S::hermite(0.0)]).unwrap();
    let r3 = try_reduce_3x3_w1w3(&three).unwrap();
    let three_ok = r3.residual < 1e-10 && (r3.prefactor - 25.0 / 16.0).abs() < 1e-15;
    let t10 = Instant::now();
    let chain = WeightSpec::new(vec![1.0; 9], (0..10).map(|k| S::laguerre(0.5 + k as f64)).collect()).unwrap();
    let d10 = order_zero_symmetries(&chain, 250).unwrap().dimension;
    let s10 = t10.elapsed().as_secs_f64();
    let pass = jac_ok && dims == [1, 1] && three_ok && d10 == 1 && s10 < 60.0;
    (
        pass,
        format!(
            "Jacobi example reduces (b=-1, c=1, diagonal to 1e-10): {jac_ok}; Hermite b!=c and Laguerre(a),(a+1/2) \
             dimensions {dims:?}; 3x3 w1=w3: {three_ok}; 10x10 chain dimension {d10} in {s10:.2} s ({:.2} s total)",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn random_mp(rng: &mut StdRng, n: usize, deg: usize) -> MatrixPolynomial<Q> {
    let coeffs = (0..=deg).map(|_| Mat::from_fn(n, |_, _| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)))).collect();
    MatrixPolynomial::from_coeffs(coeffs).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut ring = true;
    for _ in 0..30 {
        let (p, q, r) = (random_mp(&mut rng, 2, 3), random_mp(&mut rng, 2, 3), random_mp(&mut rng, 2, 3));
        ring &= p.mul(&q).unwrap().mul(&r).unwrap() == p.mul(&q.mul(&r).unwrap()).unwrap();
        ring &= p.mul(&q.add(&r).unwrap()).unwrap() == p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap();
        ring &= p.mul(&q).unwrap().derivative(1)
            == p.derivative(1).mul(&q).unwrap().add(&p.mul(&q.derivative(1)).unwrap()).unwrap();
        let d1 = MatrixDiffOperator::new(vec![random_mp(&mut rng, 2, 2), random_mp(&mut rng, 2, 2)]).unwrap();
        let d2 = MatrixDiffOperator::new(vec![random_mp(&mut rng, 2, 1), random_mp(&mut rng, 2, 2), random_mp(&mut rng, 2, 2)])
            .unwrap();
        let p8 = random_mp(&mut rng, 2, 8);
        ring &= d1.compose(&d2).unwrap().apply(&p8).unwrap() == d2.apply(&d1.apply(&p8).unwrap()).unwrap();
    }
    // Gauss rules integrate x^k exactly up to k = 2m - 1; compared with normalized mass 1
    let mut quad: f64 = 0.0;
    for w in [S::hermite(0.5), S::laguerre(1.5), S::jacobi(0.5, -0.25)] {
        for m in [3usize, 8, 15] {
            let (x, wt) = gauss_rule(&w, m).unwrap();
            let seq = mvop::scalar_families::MonicScalarSequence::new(&w, m).unwrap();
            // p_j p_k integrates to delta_jk ||p_k||^2
            for j in 0..m {
                for k in 0..m {
                    let v: f64 = x.iter().zip(&wt).map(|(x, w)| w * seq.eval(j, *x).unwrap() * seq.eval(k, *x).unwrap()).sum();
                    let want = if j == k { seq.squared_norm_log(k).unwrap().exp() } else { 0.0 };
                    let scale = (seq.squared_norm_log(j).unwrap() + seq.squared_norm_log(k).unwrap()).exp().sqrt();
                    quad = quad.max((v - want).abs() / scale);
                }
            }
        }
    }
    let mut ladders = true;
    for alpha in [0.0, 0.5, 1.25, 3.0] {
        for kind in [LadderKind::AlphaUp, LadderKind::AlphaDown, LadderKind::NUp, LadderKind::NDown, LadderKind::Eigen] {
            let (dn, da) = kind.delta();
            if alpha + (da as f64) <= -1.0 {
                continue;
            }
            let op = ladder::<Q>(kind, alpha).unwrap();
            let monic = |a: f64, n: usize| {
                let (b, c) = exact_coefficients(&S::laguerre(a), n.max(1)).unwrap();
                monic_from_recurrence(&b, &c, n)
            };
            for n in 0..=8usize {
                let lhs = op.operator.apply(&MatrixPolynomial::diagonal(&[monic(alpha, n)])).unwrap().entry_poly(0, 0);
                let t = n as i64 + dn;
                let rhs = if t < 0 { Poly::zero() } else { monic(alpha + da as f64, t as usize).scale(&op.factor(n as i64)) };
                ladders &= lhs == rhs;
            }
        }
    }
    let mut commute = true;
    for (_, spec) in named_specs() {
        let lambda = mvop::diff_operators::bispectral_eigenvalues(&spec).unwrap();
        let a = spec.nilpotent::<f64>();
        for n in 0..=15i64 {
            commute &= &a * &lambda.at::<f64>(n + 1) == &lambda.at::<f64>(n) * &a;
        }
    }
    let exact_chain = WeightSpec::new(vec![1.0, 2.0, 0.5], (0..4).map(|k| S::laguerre(0.5 + k as f64)).collect()).unwrap();
    let lambda = mvop::diff_operators::bispectral_eigenvalues(&exact_chain).unwrap();
    let seq = MVOPSequence::<Q>::new(&exact_chain, 12).unwrap();
    for n in 1..=12i64 {
        let r = seq.ratio_matrix(n as usize).unwrap();
        commute &= &r * &lambda.at::<Q>(n - 1) == &lambda.at::<Q>(n) * &r;
    }
    (
        ring && quad < 1e-10 && ladders && commute,
        format!(
            "ring/Leibniz/composition exact: {ring}; Gauss orthogonality worst {quad:.2e}; ladders exact n <= 8: {ladders}; \
             eigenvalue commutation: {commute}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("orthogonality", criterion_1),
        ("norm identity", criterion_2),
        ("leading determinant", criterion_3),
        ("bispectrality", criterion_4),
        ("three-term closed forms", criterion_5),
        ("Darboux identities", criterion_6),
        ("irreducibility", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = f();
        failed += usize::from(!pass);
        println!("criterion {} {:<24} {}  {detail}", k + 1, name, if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
