#![allow(dead_code)]

use mvop::darboux::builtin_n5_laguerre;
use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use statrs::function::gamma::ln_gamma;

pub fn laguerre() -> WeightSpec {
    WeightSpec::new(vec![2.0], vec![S::laguerre(0.0), S::laguerre(0.5)]).unwrap()
}

pub fn hermite() -> WeightSpec {
    WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)]).unwrap()
}

pub fn gegenbauer(r: f64, a: f64) -> WeightSpec {
    WeightSpec::new(vec![a], vec![S::jacobi(r + 1.0, r + 1.0), S::jacobi(r, r)]).unwrap()
}

pub fn hermite_laguerre() -> WeightSpec {
    WeightSpec::new(vec![1.0], vec![S::hermite(0.0), S::laguerre(0.5)]).unwrap()
}

pub fn chain5() -> WeightSpec {
    builtin_n5_laguerre::<f64>(0.5, [1.0; 4]).unwrap().spec
}

pub fn named_specs() -> Vec<(&'static str, WeightSpec)> {
    vec![
        ("laguerre", laguerre()),
        ("hermite", hermite()),
        ("gegenbauer", gegenbauer(0.5, 1.0)),
        ("hermite-laguerre", hermite_laguerre()),
        ("laguerre-chain-5", chain5()),
    ]
}

/// `[A, B, C]`, each as `[(1,1), (1,2), (2,1), (2,2)]`.
pub type Recurrence = [[f64; 4]; 3];

/// Laguerre pair `(alpha, beta)` with parameter `a`.
pub fn laguerre_recurrence(al: f64, be: f64, a: f64, n: f64) -> Recurrence {
    let g = (ln_gamma(n + be + 1.0) - ln_gamma(n + al)).exp();
    let d1 = g * (n + be + 1.0) * a * a * (n + 1.0) + al + n;
    let d2 = g * a * a * n + 1.0;
    let k = 1.0 + be + n * (be - al + 2.0);
    [
        [1.0, a * (n + al) * (be - al + 2.0) / d1, 0.0, (a * a * g * (n + al) * n + al + n) / d1],
        [
            (g * a * a * (n + 1.0) * (2.0 * n + be + 3.0) * (n + be + 1.0) + (2.0 * n + al + 1.0) * (n + al)) / d1,
            a * k / d2,
            g * a * k / d1,
            (g * a * a * n * (2.0 * n + al - 1.0) + be + 2.0 * n + 1.0) / d2,
        ],
        [n * (g * a * a * (n + 1.0) * (n + be + 1.0) + al + n) / d2, 0.0, g * a * n * (be - al + 2.0) / d2, n * (n + be)],
    ]
}

/// Hermite pair `(b, c)`; `C(1,1)` carries the factor 1/2, `B(1,2)` uses
/// `e^{c^2-b^2}`, and `A(1,2)`, `B(1,1)` hold for any `c`.
pub fn hermite_recurrence(b: f64, c: f64, a: f64, n: f64) -> Recurrence {
    let e = (c * c - b * b).exp();
    let d1 = e * a * a * (n + 1.0) + 2.0;
    let d2 = e * a * a * n + 2.0;
    [
        [1.0, -2.0 * a * (b - c) / d1, 0.0, d2 / d1],
        [c + 2.0 * (b - c) / d1, a / d2, e * a / d1, (e * a * a * n * b + 2.0 * c) / d2],
        [n * d1 / (2.0 * d2), 0.0, a * e * n * (c - b) / d2, n / 2.0],
    ]
}

/// Gegenbauer pair `(r+1, r)`, with corrected `B(1,2)` and `C(1,1)`.
pub fn gegenbauer_recurrence(r: f64, a: f64, n: f64) -> Recurrence {
    let a2 = a * a;
    let q = n * a2 + n + 2.0 * r + 1.0;
    let s = (2.0 * n + 2.0 * r + 3.0) * (2.0 * n + 2.0 * r + 1.0);
    [
        [1.0, 0.0, 0.0, (n + 2.0 * r + 2.0) * q / ((n + 2.0 * r + 1.0) * (n * a2 + a2 + n + 2.0 * r + 2.0))],
        [
            0.0,
            a * (2.0 * r + 1.0) * (n + 2.0 * r + 1.0) / (s * q),
            (2.0 * r + 1.0) * a / ((n + 2.0 * r + 1.0) * (n * a2 + a2 + n + 2.0 * r + 2.0)),
            0.0,
        ],
        [
            n * (n + 2.0 * r + 1.0) * (n + 2.0 * r + 2.0 + a2 * (n + 1.0)) / (s * q),
            0.0,
            0.0,
            (n + 2.0 * r) * n / ((2.0 * n + 2.0 * r + 1.0) * (2.0 * n + 2.0 * r - 1.0)),
        ],
    ]
}

pub fn m_n(al: f64, n: f64) -> f64 {
    n / std::f64::consts::PI.sqrt() * 2f64.powf(n - 1.0) * ln_gamma(n + al + 1.0).exp()
}

/// Hermite(0) with Laguerre(alpha), corrected `C(1,1)`.
pub fn hermite_laguerre_recurrence(al: f64, a: f64, n: f64) -> Recurrence {
    let m = m_n(al, n);
    let d1 = 2.0 * m * a * a * (n + 1.0) * (al + n + 1.0) + n;
    let d2 = m * a * a + 1.0;
    let k = 2.0 * al * n + 2.0 * n * n + 2.0 * al + 3.0 * n + 2.0;
    [
        [1.0, a * n * (2.0 * n + 3.0 + al) / d1, 0.0, n * d2 / d1],
        [2.0 * m * a * a * (n + 1.0) * (2.0 * n + 3.0 + al) * (al + n + 1.0) / d1, k * a / (2.0 * d2), k * m * a / d1, (2.0 * n + al + 1.0) / d2],
        [(2.0 * m * a * a * (n + 1.0) * (al + n + 1.0) + n) / (2.0 * m * a * a + 2.0), 0.0, m * a * (2.0 * n + al + 1.0) / d2, al * n + n * n],
    ]
}

/// Worst relative entry error of the computed `A_n, B_n, C_n` against `want`.
pub fn recurrence_error(seq: &mvop::MVOPSequence<f64>, n: usize, want: &Recurrence) -> f64 {
    let t = seq.three_term_coefficients(n).unwrap();
    let mut worst: f64 = 0.0;
    for (k, m) in [&t.a, &t.b, &t.c].into_iter().enumerate() {
        // entries that vanish are compared against the matrix scale
        let floor = 1e-4 * m.max_norm();
        for (e, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let (got, w) = (m[(i, j)], want[k][e]);
            worst = worst.max((got - w).abs() / w.abs().max(floor).max(f64::MIN_POSITIVE));
        }
    }
    worst
}

pub fn recurrence_cases() -> Vec<(&'static str, WeightSpec, Box<dyn Fn(f64) -> Recurrence>)> {
    vec![
        ("laguerre", laguerre(), Box::new(|n| laguerre_recurrence(0.0, 0.5, 2.0, n))),
        ("hermite", hermite(), Box::new(|n| hermite_recurrence(1.0, 0.0, 1.0, n))),
        ("gegenbauer", gegenbauer(0.5, 1.0), Box::new(|n| gegenbauer_recurrence(0.5, 1.0, n))),
        ("hermite-laguerre", hermite_laguerre(), Box::new(|n| hermite_laguerre_recurrence(0.5, 1.0, n))),
    ]
}
