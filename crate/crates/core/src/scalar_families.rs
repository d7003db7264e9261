//! Scalar weights and their monic orthogonal sequences.
//!
//! Classical families (shifted Hermite, Laguerre, Jacobi) use closed-form
//! recurrence coefficients. A weight given only by raw moments goes through
//! the Chebyshev algorithm with a running error estimate, which refuses to
//! continue once the estimate says no correct digits are left.
//!
//! Squared norms are kept as logarithms so ratios of large norms never
//! overflow. The exact bank additionally expresses every norm as a rational
//! multiple of the zeroth moment of the first weight, which is possible when
//! the weights are commensurable (integer parameter gaps).

use std::f64::consts::PI;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Largest `|log|` of a norm quotient before it is refused.
pub const LOG_RATIO_CAP: f64 = 600.0;
/// Degree cap for weights given by raw moments.
pub const CUSTOM_N_MAX: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ScalarFamily {
    /// `e^{-x^2 + 2bx}` on the real line.
    Hermite { b: f64 },
    /// `e^{-x} x^alpha` on `(0, inf)`.
    Laguerre { alpha: f64 },
    /// `(1-x)^alpha (1+x)^beta` on `(-1, 1)`.
    Jacobi { alpha: f64, beta: f64 },
    /// Raw moments `mu_0, mu_1, ...`; `null` support ends are infinite.
    Custom { moments: Vec<f64>, support: [Option<f64>; 2] },
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarWeightSpec {
    #[serde(flatten)]
    pub family: ScalarFamily,
    /// Positive constant multiplying the weight.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

impl ScalarWeightSpec {
    pub fn hermite(b: f64) -> Self {
        ScalarWeightSpec { family: ScalarFamily::Hermite { b }, scale: 1.0 }
    }

    pub fn laguerre(alpha: f64) -> Self {
        ScalarWeightSpec { family: ScalarFamily::Laguerre { alpha }, scale: 1.0 }
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Self {
        ScalarWeightSpec { family: ScalarFamily::Jacobi { alpha, beta }, scale: 1.0 }
    }

    pub fn custom(moments: Vec<f64>, support: (f64, f64)) -> Self {
        let end = |v: f64| v.is_finite().then_some(v);
        ScalarWeightSpec {
            family: ScalarFamily::Custom { moments, support: [end(support.0), end(support.1)] },
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidParam(format!("weight scale {} must be positive", self.scale)));
        }
        match &self.family {
            ScalarFamily::Hermite { b } if !b.is_finite() => {
                Err(Error::InvalidParam("hermite shift must be finite".into()))
            }
            ScalarFamily::Laguerre { alpha } if !(*alpha > -1.0 && alpha.is_finite()) => {
                Err(Error::InvalidParam(format!("laguerre alpha = {alpha} must exceed -1")))
            }
            ScalarFamily::Jacobi { alpha, beta }
                if !(*alpha > -1.0 && *beta > -1.0 && alpha.is_finite() && beta.is_finite()) =>
            {
                Err(Error::InvalidParam(format!("jacobi ({alpha}, {beta}) must both exceed -1")))
            }
            ScalarFamily::Custom { moments, support } => {
                let (lo, hi) = (support[0].unwrap_or(f64::NEG_INFINITY), support[1].unwrap_or(f64::INFINITY));
                if !(lo < hi) {
                    return Err(Error::InvalidParam("custom support must be a nonempty interval".into()));
                }
                if moments.is_empty() || !(moments[0] > 0.0) {
                    return Err(Error::InvalidParam("custom moments need mu_0 > 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_classical(&self) -> bool {
        !matches!(self.family, ScalarFamily::Custom { .. })
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            ScalarFamily::Hermite { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ScalarFamily::Laguerre { .. } => (0.0, f64::INFINITY),
            ScalarFamily::Jacobi { .. } => (-1.0, 1.0),
            ScalarFamily::Custom { support, .. } => {
                (support[0].unwrap_or(f64::NEG_INFINITY), support[1].unwrap_or(f64::INFINITY))
            }
        }
    }

    /// Pointwise value; zero outside the open support.
    ///
    /// Weights given by moments have no pointwise form and return `None`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return self.is_classical().then_some(0.0);
        }
        let v = match &self.family {
            ScalarFamily::Hermite { b } => (-x * x + 2.0 * b * x).exp(),
            ScalarFamily::Laguerre { alpha } => (-x).exp() * x.powf(*alpha),
            ScalarFamily::Jacobi { alpha, beta } => (1.0 - x).powf(*alpha) * (1.0 + x).powf(*beta),
            ScalarFamily::Custom { .. } => return None,
        };
        Some(self.scale * v)
    }

    /// `log mu_0`, the log of the total mass.
    pub fn log_mass(&self) -> f64 {
        let base = match &self.family {
            ScalarFamily::Hermite { b } => 0.5 * PI.ln() + b * b,
            ScalarFamily::Laguerre { alpha } => ln_gamma(alpha + 1.0),
            ScalarFamily::Jacobi { alpha, beta } => {
                (alpha + beta + 1.0) * 2f64.ln() + ln_beta(alpha + 1.0, beta + 1.0)
            }
            ScalarFamily::Custom { moments, .. } => moments[0].ln(),
        };
        base + self.scale.ln()
    }

    /// The classical second-order operator, or `Unsupported` for moment weights.
    pub fn classical_operator(&self) -> Result<ClassicalOperator> {
        let kind = match &self.family {
            ScalarFamily::Hermite { b } => OperatorKind::Hermite { b: *b },
            ScalarFamily::Laguerre { alpha } => OperatorKind::Laguerre { alpha: *alpha },
            ScalarFamily::Jacobi { alpha, beta } => OperatorKind::Jacobi { alpha: *alpha, beta: *beta },
            ScalarFamily::Custom { .. } => {
                return Err(Error::Unsupported("no differential operator for a moment-defined weight".into()))
            }
        };
        Ok(ClassicalOperator { kind })
    }
}

/// Recurrence `p_{n+1} = (x - b_n) p_n - c_n p_{n-1}` with squared norms.
#[derive(Clone, Debug)]
pub struct MonicScalarSequence {
    spec: ScalarWeightSpec,
    b: Vec<f64>,
    /// `c[0]` is unused and stored as zero so `c[n]` reads naturally.
    c: Vec<f64>,
    log_norms: Vec<f64>,
}

impl MonicScalarSequence {
    pub fn new(spec: &ScalarWeightSpec, n_max: usize) -> Result<Self> {
        spec.validate()?;
        let (b, c) = match &spec.family {
            ScalarFamily::Custom { moments, .. } => chebyshev_algorithm(moments, n_max)?,
            _ => classical_coefficients(spec, n_max),
        };
        let mut log_norms = Vec::with_capacity(n_max + 1);
        log_norms.push(spec.log_mass());
        for k in 1..=n_max {
            log_norms.push(log_norms[k - 1] + c[k].ln());
        }
        Ok(MonicScalarSequence { spec: spec.clone(), b, c, log_norms })
    }

    pub fn spec(&self) -> &ScalarWeightSpec {
        &self.spec
    }

    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn b_coeffs(&self) -> &[f64] {
        &self.b
    }

    /// `c_1, ..., c_{n_max}`.
    pub fn c_coeffs(&self) -> &[f64] {
        &self.c[1..]
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::OutOfRange { index: n, max: self.n_max() });
        }
        Ok(())
    }

    pub fn monic_polynomial(&self, n: usize) -> Result<Poly<f64>> {
        self.check(n)?;
        Ok(monic_from_recurrence(&self.b, &self.c, n))
    }

    pub fn squared_norm_log(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.log_norms[n])
    }

    /// `p_n(x)` by running the recurrence, which is far better conditioned
    /// than Horner on monomial coefficients.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n)?;
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n {
            let next = (x - self.b[k]) * cur - self.c[k] * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}

/// Monic polynomials from recurrence coefficients in any field.
pub fn monic_from_recurrence<T: Scalar>(b: &[T], c: &[T], n: usize) -> Poly<T> {
    let mut prev = Poly::zero();
    let mut cur = Poly::constant(T::one());
    for k in 0..n {
        let next = cur.shift().sub(&cur.scale(&b[k])).sub(&prev.scale(&c[k]));
        prev = cur;
        cur = next;
    }
    cur
}

fn classical_coefficients(spec: &ScalarWeightSpec, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let b = (0..=n_max).map(|n| classical_b(&spec.family, n)).collect();
    let c = std::iter::once(0.0)
        .chain((1..=n_max).map(|n| classical_c(&spec.family, n)))
        .collect();
    (b, c)
}

fn classical_b(family: &ScalarFamily, n: usize) -> f64 {
    let n = n as f64;
    match *family {
        ScalarFamily::Hermite { b } => b,
        ScalarFamily::Laguerre { alpha } => 2.0 * n + alpha + 1.0,
        ScalarFamily::Jacobi { alpha, beta } => {
            let s = 2.0 * n + alpha + beta;
            if n == 0.0 {
                (beta - alpha) / (alpha + beta + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            }
        }
        ScalarFamily::Custom { .. } => unreachable!("moment weights use the Chebyshev algorithm"),
    }
}

fn classical_c(family: &ScalarFamily, n: usize) -> f64 {
    let n = n as f64;
    match *family {
        ScalarFamily::Hermite { .. } => n / 2.0,
        ScalarFamily::Laguerre { alpha } => n * (n + alpha),
        ScalarFamily::Jacobi { alpha, beta } => {
            let s = 2.0 * n + alpha + beta;
            if n == 1.0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + alpha + beta).powi(2) * (3.0 + alpha + beta))
            } else {
                4.0 * n * (n + alpha) * (n + beta) * (n + alpha + beta) / (s * s * (s + 1.0) * (s - 1.0))
            }
        }
        ScalarFamily::Custom { .. } => unreachable!("moment weights use the Chebyshev algorithm"),
    }
}

/// Chebyshev algorithm on raw moments `mu_0 .. mu_{2 n_max + 1}`.
///
/// Before running, the Hankel matrix `[mu_{i+j}]` of order `n_max + 1` is
/// equilibrated and its condition number taken as the number of digits
/// the recursion will lose; at 15.5 or more nothing trustworthy is left.
pub fn chebyshev_algorithm(moments: &[f64], n_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_max > CUSTOM_N_MAX {
        return Err(Error::DegreeCap(format!(
            "moment-defined weights are capped at degree {CUSTOM_N_MAX}, asked for {n_max}"
        )));
    }
    let n = n_max + 1;
    if moments.len() < 2 * n {
        return Err(Error::InvalidParam(format!(
            "degree {n_max} needs {} moments, got {}",
            2 * n,
            moments.len()
        )));
    }
    let lost = hankel_lost_digits(&moments[..2 * n - 1]);
    if !(lost < 15.5) {
        return Err(Error::IllConditioned(format!(
            "moment map to degree {n_max} loses {lost:.1} digits"
        )));
    }
    let width = 2 * n;
    let mut sig_prev = vec![0.0; width];
    let mut sig: Vec<f64> = moments[..width].to_vec();
    let mut b = vec![moments[1] / moments[0]];
    let mut c = vec![0.0];
    for k in 1..n {
        let (bk, ck) = (b[k - 1], if k == 1 { 0.0 } else { c[k - 1] });
        let mut next = vec![0.0; width];
        for l in k..(2 * n - k) {
            next[l] = sig[l + 1] - bk * sig[l] - ck * sig_prev[l];
        }
        if !(next[k] > 0.0) {
            return Err(Error::IllConditioned(format!(
                "moment sequence is not positive definite at degree {k}"
            )));
        }
        b.push(next[k + 1] / next[k] - sig[k] / sig[k - 1]);
        c.push(next[k] / sig[k - 1]);
        sig_prev = std::mem::replace(&mut sig, next);
    }
    Ok((b, c))
}

/// `log10` of the condition number of the equilibrated Hankel matrix built
/// from `mu_0 .. mu_{2m}`; infinite when it is not positive definite.
fn hankel_lost_digits(moments: &[f64]) -> f64 {
    let m = moments.len() / 2 + 1;
    let diag: Vec<f64> = (0..m).map(|i| moments[2 * i]).collect();
    if diag.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return f64::INFINITY;
    }
    let h = nalgebra::DMatrix::from_fn(m, m, |i, j| moments[i + j] / (diag[i] * diag[j]).sqrt());
    let eig = nalgebra::SymmetricEigen::new(h).eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > 0.0) {
        return f64::INFINITY;
    }
    (hi / lo).log10()
}

/// Gauss rule with `m` nodes: Golub-Welsch for the nodes, then a Newton
/// polish on `p_m` and Christoffel weights `1 / sum_k p_k(x)^2 / h_k`.
pub fn gauss_rule(spec: &ScalarWeightSpec, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidParam("a Gauss rule needs at least one node".into()));
    }
    let seq = MonicScalarSequence::new(spec, m)?;
    Ok(gauss_rule_from(&seq, m))
}

pub(crate) fn gauss_rule_from(seq: &MonicScalarSequence, m: usize) -> (Vec<f64>, Vec<f64>) {
    let jac = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            seq.b[i]
        } else if i + 1 == j || j + 1 == i {
            seq.c[i.max(j)].sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = nalgebra::SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let (lo, hi) = seq.spec.support();
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = value_and_derivative(seq, m, *x);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            let cand = *x - step;
            if !(cand > lo && cand < hi) || !cand.is_finite() {
                break;
            }
            *x = cand;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
    }
    let log_mass = seq.spec.log_mass();
    let weights = nodes.iter().map(|&x| (log_mass - log_christoffel_sum(seq, m, x)).exp()).collect();
    (nodes, weights)
}

/// `(p_m(x), p_m'(x))` up to a common positive factor.
fn value_and_derivative(seq: &MonicScalarSequence, m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    for k in 0..m {
        let p2 = (x - seq.b[k]) * p1 - seq.c[k] * p0;
        let d2 = p1 + (x - seq.b[k]) * d1 - seq.c[k] * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let big = p1.abs().max(d1.abs());
        if big > 1e150 {
            p0 /= big;
            p1 /= big;
            d0 /= big;
            d1 /= big;
        }
    }
    (p1, d1)
}

/// `log sum_{k<m} p_k(x)^2 / (h_k / h_0)` via the orthonormal recurrence,
/// rescaled as it goes so large nodes of unbounded weights stay finite.
fn log_christoffel_sum(seq: &MonicScalarSequence, m: usize, x: f64) -> f64 {
    let (mut q0, mut q1) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut log_scale = 0.0;
    for k in 1..m {
        let q2 = ((x - seq.b[k - 1]) * q1 - seq.c[k - 1].sqrt() * q0) / seq.c[k].sqrt();
        q0 = q1;
        q1 = q2;
        sum += q1 * q1;
        if sum > 1e200 {
            let s = sum.sqrt();
            q0 /= s;
            q1 /= s;
            sum = 1.0;
            log_scale += s.ln() * 2.0;
        }
    }
    sum.ln() + log_scale
}

/// Family tag for the classical operator and its eigenvalue closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    Hermite { b: f64 },
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

/// `F_2 d^2 + F_1 d` acting on the right, with `p_n . delta = Lambda_n p_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalOperator {
    pub kind: OperatorKind,
}

impl ClassicalOperator {
    /// `[F_0, F_1, F_2]`.
    pub fn coefficients<T: Scalar>(&self) -> [Poly<T>; 3] {
        let f = T::from_f64;
        let (f2, f1) = match self.kind {
            OperatorKind::Hermite { b } => (
                Poly::constant(T::one()),
                Poly::new(vec![f(2.0 * b), f(-2.0)]),
            ),
            OperatorKind::Laguerre { alpha } => (
                Poly::x(),
                Poly::new(vec![f(alpha) + T::one(), f(-1.0)]),
            ),
            OperatorKind::Jacobi { alpha, beta } => (
                Poly::new(vec![T::one(), T::zero(), f(-1.0)]),
                Poly::new(vec![f(beta) - f(alpha), -(f(alpha) + f(beta) + f(2.0))]),
            ),
        };
        [Poly::zero(), f1, f2]
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.eigenvalue_in::<f64>(n as i64)
    }

    /// `Lambda_n` in any field; negative `n` is allowed for shift bookkeeping.
    pub fn eigenvalue_in<T: Scalar>(&self, n: i64) -> T {
        let nn = T::from_i64(n);
        match self.kind {
            OperatorKind::Hermite { .. } => T::from_i64(-2 * n),
            OperatorKind::Laguerre { .. } => -nn,
            OperatorKind::Jacobi { alpha, beta } => {
                -(nn.clone() * (nn + T::one() + T::from_f64(alpha) + T::from_f64(beta)))
            }
        }
    }

    /// `p . delta`.
    pub fn apply<T: Scalar>(&self, p: &Poly<T>) -> Poly<T> {
        let [_, f1, f2] = self.coefficients::<T>();
        p.derivative().derivative().mul(&f2).add(&p.derivative().mul(&f1))
    }
}

/// Exact recurrence coefficients of a classical family with parameters
/// taken as the exact rationals their binary64 values denote.
pub fn exact_coefficients(spec: &ScalarWeightSpec, n_max: usize) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    spec.validate()?;
    let q = BigRational::from_f64;
    let int = |n: usize| BigRational::from_i64(n as i64);
    let mut b = Vec::with_capacity(n_max + 1);
    let mut c = vec![<BigRational as Scalar>::zero()];
    for n in 0..=n_max {
        let nn = int(n);
        let (bn, cn) = match spec.family {
            ScalarFamily::Hermite { b } => (q(b), nn.clone() / int(2)),
            ScalarFamily::Laguerre { alpha } => {
                let a = q(alpha);
                (int(2) * nn.clone() + a.clone() + int(1), nn.clone() * (nn.clone() + a))
            }
            ScalarFamily::Jacobi { alpha, beta } => {
                let (a, bb) = (q(alpha), q(beta));
                let s = int(2) * nn.clone() + a.clone() + bb.clone();
                let bn = if n == 0 {
                    (bb.clone() - a.clone()) / (a.clone() + bb.clone() + int(2))
                } else {
                    (bb.clone() * bb.clone() - a.clone() * a.clone()) / (s.clone() * (s.clone() + int(2)))
                };
                let cn = if n == 0 {
                    <BigRational as Scalar>::zero()
                } else if n == 1 {
                    int(4) * (int(1) + a.clone()) * (int(1) + bb.clone())
                        / ((int(2) + a.clone() + bb.clone()) * (int(2) + a.clone() + bb.clone())
                            * (int(3) + a.clone() + bb.clone()))
                } else {
                    int(4) * nn.clone() * (nn.clone() + a.clone()) * (nn.clone() + bb.clone())
                        * (nn.clone() + a + bb)
                        / (s.clone() * s.clone() * (s.clone() + int(1)) * (s - int(1)))
                };
                (bn, cn)
            }
            ScalarFamily::Custom { .. } => {
                return Err(Error::Unsupported("the exact backend covers classical families only".into()))
            }
        };
        b.push(bn);
        if n >= 1 {
            c.push(cn);
        }
    }
    Ok((b, c))
}

/// `Gamma(x + k) / Gamma(x)` for an integer `k` of either sign.
fn gamma_shift(x: &BigRational, k: i64) -> BigRational {
    let mut r = <BigRational as Scalar>::one();
    if k >= 0 {
        for i in 0..k {
            r = r * (x.clone() + BigRational::from_i64(i));
        }
    } else {
        for i in 1..=(-k) {
            r = r / (x.clone() - BigRational::from_i64(i));
        }
    }
    r
}

fn integer_gap(a: f64, b: f64) -> Option<i64> {
    let d = a - b;
    (d.fract() == 0.0 && d.abs() < 1e6).then_some(d as i64)
}

/// `mu_0(spec) / mu_0(reference)` as an exact rational, when it is one.
pub fn exact_mass_ratio(spec: &ScalarWeightSpec, reference: &ScalarWeightSpec) -> Result<BigRational> {
    let q = BigRational::from_f64;
    let scale = q(spec.scale) / q(reference.scale);
    let unsupported = || {
        Error::Unsupported(format!(
            "total masses of {:?} and {:?} differ by an irrational factor",
            spec.family, reference.family
        ))
    };
    let ratio = match (&spec.family, &reference.family) {
        (ScalarFamily::Hermite { b }, ScalarFamily::Hermite { b: r }) => {
            if b * b != r * r {
                return Err(unsupported());
            }
            <BigRational as Scalar>::one()
        }
        (ScalarFamily::Laguerre { alpha }, ScalarFamily::Laguerre { alpha: r }) => {
            let k = integer_gap(*alpha, *r).ok_or_else(unsupported)?;
            gamma_shift(&(q(*r) + <BigRational as Scalar>::one()), k)
        }
        (ScalarFamily::Jacobi { alpha, beta }, ScalarFamily::Jacobi { alpha: ra, beta: rb }) => {
            let ka = integer_gap(*alpha, *ra).ok_or_else(unsupported)?;
            let kb = integer_gap(*beta, *rb).ok_or_else(unsupported)?;
            // 2^{a+b+1} Gamma(a+1) Gamma(b+1) / Gamma(a+b+2)
            let two = BigRational::from_i64(2);
            let pow = if ka + kb >= 0 {
                (0..ka + kb).fold(<BigRational as Scalar>::one(), |acc, _| acc * two.clone())
            } else {
                (0..-(ka + kb)).fold(<BigRational as Scalar>::one(), |acc, _| acc / two.clone())
            };
            pow * gamma_shift(&(q(*ra) + <BigRational as Scalar>::one()), ka)
                * gamma_shift(&(q(*rb) + <BigRational as Scalar>::one()), kb)
                / gamma_shift(&(q(*ra) + q(*rb) + BigRational::from_i64(2)), ka + kb)
        }
        _ => return Err(unsupported()),
    };
    Ok(ratio * scale)
}

/// Recurrence data for the `N` scalar weights of a matrix weight, in one
/// coefficient field.
///
/// The float bank keeps absolute norms as logs and exponentiates only what
/// is asked for. The exact bank stores rationals in units of the total mass
/// of the first weight; [`ScalarBank::log_unit`] recovers absolute values.
#[derive(Clone, Debug)]
pub struct ScalarBank<T> {
    specs: Vec<ScalarWeightSpec>,
    b: Vec<Vec<T>>,
    c: Vec<Vec<T>>,
    log_norms: Vec<Vec<f64>>,
    exact_norms: Option<Vec<Vec<T>>>,
    log_unit: f64,
    n_max: usize,
}

impl ScalarBank<f64> {
    pub fn float(specs: &[ScalarWeightSpec], n_max: usize) -> Result<Self> {
        let seqs: Vec<MonicScalarSequence> =
            specs.iter().map(|s| MonicScalarSequence::new(s, n_max)).collect::<Result<_>>()?;
        Ok(ScalarBank {
            specs: specs.to_vec(),
            b: seqs.iter().map(|s| s.b.clone()).collect(),
            c: seqs.iter().map(|s| s.c.clone()).collect(),
            log_norms: seqs.iter().map(|s| s.log_norms.clone()).collect(),
            exact_norms: None,
            log_unit: 0.0,
            n_max,
        })
    }
}

impl ScalarBank<BigRational> {
    pub fn exact(specs: &[ScalarWeightSpec], n_max: usize) -> Result<Self> {
        let mut b = Vec::new();
        let mut c = Vec::new();
        let mut norms = Vec::new();
        let mut log_norms = Vec::new();
        for spec in specs {
            let (bi, ci) = exact_coefficients(spec, n_max)?;
            let mut hi = vec![exact_mass_ratio(spec, &specs[0])?];
            for k in 1..=n_max {
                hi.push(hi[k - 1].clone() * ci[k].clone());
            }
            log_norms.push(hi.iter().map(|h| h.re().ln() + specs[0].log_mass()).collect());
            b.push(bi);
            c.push(ci);
            norms.push(hi);
        }
        let log_unit = specs[0].log_mass();
        Ok(ScalarBank { specs: specs.to_vec(), b, c, log_norms, exact_norms: Some(norms), log_unit, n_max })
    }
}

impl<T: Scalar> ScalarBank<T> {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn specs(&self) -> &[ScalarWeightSpec] {
        &self.specs
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::OutOfRange { index: n, max: self.n_max });
        }
        Ok(())
    }

    pub fn monic(&self, i: usize, n: usize) -> Result<Poly<T>> {
        self.check(n)?;
        Ok(monic_from_recurrence(&self.b[i], &self.c[i], n))
    }

    pub fn recurrence(&self, i: usize) -> (&[T], &[T]) {
        (&self.b[i], &self.c[i])
    }

    /// Log of the unit norms are measured in: zero for the float bank,
    /// `log mu_0(w_1)` for the exact bank.
    pub fn log_unit(&self) -> f64 {
        self.log_unit
    }

    /// Absolute `log ||p_n^{w_i}||^2`.
    pub fn log_norm(&self, i: usize, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.log_norms[i][n])
    }

    /// `||p_n^{w_i}||^2` in the bank's unit.
    pub fn norm(&self, i: usize, n: usize) -> Result<T> {
        self.check(n)?;
        if let Some(ex) = &self.exact_norms {
            return Ok(ex[i][n].clone());
        }
        let l = self.log_norms[i][n] - self.log_unit;
        if l.abs() > LOG_RATIO_CAP {
            return Err(Error::DegreeCap(format!("norm of degree {n} in slot {i} is out of range")));
        }
        Ok(T::from_f64(l.exp()))
    }

    /// `||p_n^{w_i}||^2 / ||p_m^{w_j}||^2`.
    pub fn norm_ratio(&self, i: usize, n: usize, j: usize, m: usize) -> Result<T> {
        self.check(n.max(m))?;
        if let Some(ex) = &self.exact_norms {
            return Ok(ex[i][n].clone() / ex[j][m].clone());
        }
        let l = self.log_norms[i][n] - self.log_norms[j][m];
        if l.abs() > LOG_RATIO_CAP {
            return Err(Error::DegreeCap(format!(
                "norm quotient at degrees ({n}, {m}) exceeds e^{LOG_RATIO_CAP}"
            )));
        }
        Ok(T::from_f64(l.exp()))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn laguerre_zero_coefficients() {
        let s = MonicScalarSequence::new(&ScalarWeightSpec::laguerre(0.0), 2).unwrap();
        assert_eq!(s.b_coeffs(), &[1.0, 3.0, 5.0]);
        assert_eq!(s.c_coeffs(), &[1.0, 4.0]);
        assert_eq!(s.monic_polynomial(2).unwrap().coeffs(), &[2.0, -4.0, 1.0]);
        assert!(close(s.squared_norm_log(2).unwrap(), 4f64.ln(), 1e-14));
    }

    #[test]
    fn hermite_and_jacobi_coefficients() {
        let h = MonicScalarSequence::new(&ScalarWeightSpec::hermite(0.0), 2).unwrap();
        assert_eq!(h.b_coeffs(), &[0.0, 0.0, 0.0]);
        assert_eq!(h.c_coeffs(), &[0.5, 1.0]);
        assert_eq!(h.monic_polynomial(2).unwrap().coeffs(), &[-0.5, 0.0, 1.0]);
        assert!(close(h.squared_norm_log(0).unwrap(), PI.sqrt().ln(), 1e-14));
        let j = MonicScalarSequence::new(&ScalarWeightSpec::jacobi(0.0, 0.0), 1).unwrap();
        assert_eq!(j.b_coeffs(), &[0.0, 0.0]);
        assert!(close(j.c_coeffs()[0], 1.0 / 3.0, 1e-15));
        assert!(close(j.squared_norm_log(0).unwrap(), 2f64.ln(), 1e-14));
    }

    #[test]
    fn monic_degree_zero_and_out_of_range() {
        let s = MonicScalarSequence::new(&ScalarWeightSpec::jacobi(0.5, -0.5), 3).unwrap();
        assert_eq!(s.monic_polynomial(0).unwrap().coeffs(), &[1.0]);
        assert!(matches!(s.monic_polynomial(4), Err(Error::OutOfRange { index: 4, max: 3 })));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            MonicScalarSequence::new(&ScalarWeightSpec::laguerre(-1.0), 2),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            MonicScalarSequence::new(&ScalarWeightSpec::jacobi(0.0, -1.5), 2),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn small_gauss_rules() {
        let (x, w) = gauss_rule(&ScalarWeightSpec::hermite(0.0), 1).unwrap();
        assert!(x[0].abs() < 1e-15 && close(w[0], PI.sqrt(), 1e-14));
        let (x, w) = gauss_rule(&ScalarWeightSpec::laguerre(0.0), 1).unwrap();
        assert!(close(x[0], 1.0, 1e-15) && close(w[0], 1.0, 1e-14));
        let (x, w) = gauss_rule(&ScalarWeightSpec::jacobi(0.0, 0.0), 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!(close(x[0], -r, 1e-15) && close(x[1], r, 1e-15));
        assert!(close(w[0], 1.0, 1e-14) && close(w[1], 1.0, 1e-14));
    }

    #[test]
    fn operator_examples() {
        let h = ScalarWeightSpec::hermite(0.0).classical_operator().unwrap();
        let p = Poly::new(vec![-0.5, 0.0, 1.0]);
        assert_eq!(h.apply(&p).coeffs(), &[2.0, 0.0, -4.0]);
        assert_eq!(h.eigenvalue(2), -4.0);
        let j = ScalarWeightSpec::jacobi(0.0, 0.0).classical_operator().unwrap();
        assert_eq!(j.apply(&Poly::<f64>::x()).coeffs(), &[0.0, -2.0]);
        let l = ScalarWeightSpec::laguerre(0.3).classical_operator().unwrap();
        assert!(l.apply(&Poly::<f64>::constant(1.0)).is_zero());
        assert!(ScalarWeightSpec::custom(vec![1.0, 0.0], (-1.0, 1.0)).classical_operator().is_err());
    }

    #[test]
    fn chebyshev_reproduces_laguerre() {
        let moments: Vec<f64> = (0..12).map(|k| (1..=k).map(f64::from).product()).collect();
        let spec = ScalarWeightSpec::custom(moments, (0.0, f64::INFINITY));
        let s = MonicScalarSequence::new(&spec, 5).unwrap();
        for n in 0..=5 {
            assert!(close(s.b_coeffs()[n], 2.0 * n as f64 + 1.0, 1e-9));
        }
        for (k, c) in s.c_coeffs().iter().enumerate() {
            let n = (k + 1) as f64;
            assert!(close(*c, n * n, 1e-9));
        }
    }

    #[test]
    fn chebyshev_guards() {
        let spec = ScalarWeightSpec::custom(vec![1.0; 4], (0.0, 1.0));
        assert!(matches!(MonicScalarSequence::new(&spec, 5), Err(Error::InvalidParam(_))));
        let spec = ScalarWeightSpec::custom(vec![1.0; 60], (0.0, 1.0));
        assert!(matches!(MonicScalarSequence::new(&spec, 21), Err(Error::DegreeCap(_))));
        // a point mass: every moment is one, the Hankel matrices are singular
        assert!(matches!(MonicScalarSequence::new(&spec, 3), Err(Error::IllConditioned(_))));
        // Laguerre moments to degree 20 are hopeless in binary64
        let moments: Vec<f64> = (0..42).map(|k| (1..=k).map(f64::from).product()).collect();
        let spec = ScalarWeightSpec::custom(moments, (0.0, f64::INFINITY));
        assert!(matches!(MonicScalarSequence::new(&spec, 20), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn exact_mass_ratios() {
        let l = |a| ScalarWeightSpec::laguerre(a);
        assert_eq!(exact_mass_ratio(&l(2.5), &l(0.5)).unwrap(), rat(15, 4));
        assert_eq!(exact_mass_ratio(&l(0.5), &l(2.5)).unwrap(), rat(4, 15));
        assert!(exact_mass_ratio(&l(0.5), &l(0.0)).is_err());
        // 2^{a+b+1} B(a+1, b+1): (1,1) gives 4/3, (0,0) gives 2
        let j = ScalarWeightSpec::jacobi;
        assert_eq!(exact_mass_ratio(&j(1.0, 1.0), &j(0.0, 0.0)).unwrap(), rat(2, 3));
        assert_eq!(exact_mass_ratio(&ScalarWeightSpec::hermite(1.0), &ScalarWeightSpec::hermite(-1.0)).unwrap(), rat(1, 1));
        assert!(exact_mass_ratio(&ScalarWeightSpec::hermite(1.0), &ScalarWeightSpec::hermite(0.0)).is_err());
        assert!(exact_mass_ratio(&ScalarWeightSpec::hermite(0.0), &l(0.0)).is_err());
    }

    #[test]
    fn exact_bank_matches_float_bank() {
        let specs = [ScalarWeightSpec::jacobi(1.5, 0.5), ScalarWeightSpec::jacobi(0.5, -0.5)];
        let ex = ScalarBank::exact(&specs, 6).unwrap();
        let fl = ScalarBank::float(&specs, 6).unwrap();
        for i in 0..2 {
            for n in 0..=6 {
                let a = ex.norm(i, n).unwrap().re() * ex.log_unit().exp();
                let b = fl.norm(i, n).unwrap();
                assert!(close(a, b, 1e-13), "slot {i} degree {n}: {a} vs {b}");
                let pe = ex.monic(i, n).unwrap();
                let pf = fl.monic(i, n).unwrap();
                for k in 0..=n {
                    assert!((pe.coeff(k).re() - pf.coeff(k)).abs() <= 1e-13 * pf.max_coeff().max(1.0));
                }
            }
        }
    }
}
