//! Laguerre ladders, shift synthesis and Darboux checks.
//!
//! A Darboux transformation here is an operator `D_1` with
//! `P_n . D_1 = A_n Q_n` for constant, eventually nonsingular `A_n`, where
//! `P_n` is orthogonal for a diagonal weight and `Q_n` for `W`.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::diff_operators::MatrixDiffOperator;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::matrix_poly::MatrixPolynomial;
use crate::mvop::{Backend, MVOPSequence};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::scalar_families::{exact_coefficients, monic_from_recurrence, ScalarFamily, ScalarWeightSpec};
use crate::weight::WeightSpec;

/// Largest `|k| + |m|` accepted by [`synthesize_shift`].
pub const SHIFT_CAP: i64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderKind {
    AlphaUp,
    AlphaDown,
    NUp,
    NDown,
    Eigen,
}

impl LadderKind {
    /// `(dn, dalpha)`.
    pub fn delta(self) -> (i64, i64) {
        match self {
            LadderKind::AlphaUp => (0, 1),
            LadderKind::AlphaDown => (0, -1),
            LadderKind::NUp => (1, 0),
            LadderKind::NDown => (-1, 1),
            LadderKind::Eigen => (0, 0),
        }
    }

    /// The factor as a polynomial in `n`.
    pub fn factor_poly<T: Scalar>(self, alpha: f64) -> Poly<T> {
        match self {
            LadderKind::AlphaUp | LadderKind::NUp => Poly::constant(T::one()),
            LadderKind::AlphaDown => Poly::new(vec![T::from_f64(alpha), T::one()]),
            LadderKind::NDown => Poly::x(),
            LadderKind::Eigen => Poly::new(vec![T::zero(), -T::one()]),
        }
    }
}

/// A scalar operator with `l_n^(alpha) . op = factor(n) l_{n+dn}^(alpha+dalpha)`
/// on monic Laguerre polynomials.
#[derive(Clone, Debug)]
pub struct LadderOperator<T> {
    pub kind: LadderKind,
    pub alpha: f64,
    pub operator: MatrixDiffOperator<T>,
}

impl<T: Scalar> LadderOperator<T> {
    pub fn factor(&self, n: i64) -> T {
        self.kind.factor_poly::<T>(self.alpha).eval(&T::from_i64(n))
    }

    pub fn delta(&self) -> (i64, i64) {
        self.kind.delta()
    }
}

fn scalar_op<T: Scalar>(coeffs: Vec<Poly<T>>) -> MatrixDiffOperator<T> {
    MatrixDiffOperator::new(coeffs.iter().map(|p| MatrixPolynomial::diagonal(std::slice::from_ref(p))).collect())
        .expect("size 1")
}

/// Normal forms, right action:
/// alpha up `p - p'`, alpha down `d x + alpha`, n up
/// `d^2 x + d(alpha + 1 - 2x) + (x - alpha - 1)`, n down `d`, eigen `delta_alpha`.
fn ladder_coeffs<T: Scalar>(kind: LadderKind, alpha: f64) -> Vec<Poly<T>> {
    let a = T::from_f64(alpha);
    let one = T::one();
    match kind {
        LadderKind::AlphaUp => vec![Poly::constant(one.clone()), Poly::constant(-one)],
        LadderKind::AlphaDown => vec![Poly::constant(a), Poly::x()],
        LadderKind::NUp => vec![
            Poly::new(vec![-(a.clone() + one.clone()), one.clone()]),
            Poly::new(vec![a + one, T::from_i64(-2)]),
            Poly::x(),
        ],
        LadderKind::NDown => vec![Poly::zero(), Poly::constant(one)],
        LadderKind::Eigen => vec![Poly::zero(), Poly::new(vec![a + one, T::from_i64(-1)]), Poly::x()],
    }
}

fn laguerre_monic_exact(alpha: f64, n: usize) -> Result<Poly<BigRational>> {
    let (b, c) = exact_coefficients(&ScalarWeightSpec::laguerre(alpha), n.max(1))?;
    Ok(monic_from_recurrence(&b, &c, n))
}

/// Largest `n` checked when a ladder is built.
pub const LADDER_CHECK_N: usize = 8;

/// Checks `l_n^(alpha) . op = factor(n) l_{n+dn}^(alpha+dalpha)` exactly for
/// `n <= n_max`, returning the first failing degree.
fn check_shift(
    op: &MatrixDiffOperator<BigRational>,
    alpha: f64,
    factor: &Poly<BigRational>,
    (dn, da): (i64, i64),
    n_max: usize,
) -> Result<Option<usize>> {
    for n in 0..=n_max {
        let p = MatrixPolynomial::diagonal(&[laguerre_monic_exact(alpha, n)?]);
        let lhs = op.apply(&p)?.entry_poly(0, 0);
        let target = n as i64 + dn;
        let f = factor.eval(&BigRational::from_i64(n as i64));
        let rhs = if target < 0 {
            Poly::zero()
        } else {
            laguerre_monic_exact(alpha + da as f64, target as usize)?.scale(&f)
        };
        if lhs != rhs {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// A calibrated Laguerre ladder, checked exactly for `n <= 8`.
pub fn ladder<T: Scalar>(kind: LadderKind, alpha: f64) -> Result<LadderOperator<T>> {
    let target = alpha + kind.delta().1 as f64;
    if !(alpha > -1.0) || !(target > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("{kind:?} needs alpha and alpha + dalpha above -1, got alpha = {alpha}")));
    }
    let exact = scalar_op(ladder_coeffs::<BigRational>(kind, alpha));
    if let Some(n) = check_shift(&exact, alpha, &kind.factor_poly(alpha), kind.delta(), LADDER_CHECK_N)? {
        return Err(Error::InvalidParam(format!("{kind:?} ladder fails its shift identity at n = {n}")));
    }
    Ok(LadderOperator { kind, alpha, operator: scalar_op(ladder_coeffs(kind, alpha)) })
}

/// Result of [`synthesize_shift`]: `l_n^(alpha) . tau = q(n) r1(n)/r2(n) l_{n+m}^(alpha+k)`.
#[derive(Clone, Debug)]
pub struct ShiftOperator<T> {
    pub alpha: f64,
    pub k: i64,
    pub m: i64,
    pub steps: Vec<LadderKind>,
    pub tau: MatrixDiffOperator<T>,
    /// `r2 * q~`, with `q~` the product of the ladder factors.
    pub q: Poly<T>,
    /// `r1 * q~ = q r1 / r2`, the full multiplier of `l_{n+m}^(alpha+k)`.
    pub total_factor: Poly<T>,
}

/// `p(-delta_alpha)` as a composed operator.
fn poly_of_minus_delta<T: Scalar>(p: &Poly<T>, alpha: f64) -> MatrixDiffOperator<T> {
    let minus_delta = scalar_op(ladder_coeffs::<T>(LadderKind::Eigen, alpha)).scale(&-T::one());
    let mut power = MatrixDiffOperator::identity(1);
    let mut out = MatrixDiffOperator::zero(1);
    for c in p.coeffs() {
        out = out.add(&power.scale(c)).expect("size 1");
        power = power.compose(&minus_delta).expect("size 1");
    }
    out
}

/// Composes ladders into an `(m, k)` shift: first `n` down steps, then
/// `alpha` up steps, `n` up steps, and finally `alpha` down steps, so the
/// parameter never dips below `min(alpha, alpha + k)`.
pub fn synthesize_shift<T: Scalar>(alpha: f64, k: i64, m: i64, r1: &Poly<T>, r2: &Poly<T>) -> Result<ShiftOperator<T>> {
    if k.abs() + m.abs() > SHIFT_CAP {
        return Err(Error::CapExceeded(format!("|k| + |m| = {} exceeds {SHIFT_CAP}", k.abs() + m.abs())));
    }
    if !(alpha > -1.0) || !(alpha + k as f64 > -1.0) {
        return Err(Error::InvalidParam(format!("alpha = {alpha} and alpha + k = {} must exceed -1", alpha + k as f64)));
    }
    if r2.is_zero() {
        return Err(Error::InvalidParam("r2 must be nonzero".into()));
    }
    let downs = (-m).max(0);
    let rest = k - downs;
    let mut steps = vec![LadderKind::NDown; downs as usize];
    steps.extend(std::iter::repeat_n(LadderKind::AlphaUp, rest.max(0) as usize));
    steps.extend(std::iter::repeat_n(LadderKind::NUp, m.max(0) as usize));
    steps.extend(std::iter::repeat_n(LadderKind::AlphaDown, (-rest).max(0) as usize));

    let mut tau = MatrixDiffOperator::identity(1);
    let mut q_tilde = Poly::constant(T::one());
    let (mut dn, mut a) = (0i64, alpha);
    for &step in &steps {
        let l = ladder::<T>(step, a)?;
        tau = tau.compose(&l.operator)?;
        // factor at the current degree n + dn, as a polynomial in n
        let shifted = compose_shift(&step.factor_poly::<T>(a), dn);
        q_tilde = q_tilde.mul(&shifted);
        let (sn, sa) = step.delta();
        dn += sn;
        a += sa as f64;
    }
    let tau = poly_of_minus_delta(r1, alpha).compose(&tau)?;
    Ok(ShiftOperator {
        alpha,
        k,
        m,
        steps,
        tau,
        q: r2.mul(&q_tilde),
        total_factor: r1.mul(&q_tilde),
    })
}

/// `p(n + s)`.
fn compose_shift<T: Scalar>(p: &Poly<T>, s: i64) -> Poly<T> {
    let lin = Poly::new(vec![T::from_i64(s), T::one()]);
    let mut out = Poly::zero();
    for c in p.coeffs().iter().rev() {
        out = out.mul(&lin).add(&Poly::constant(c.clone()));
    }
    out
}

impl ShiftOperator<BigRational> {
    /// First `n <= n_max` where the shift identity fails, checked exactly.
    pub fn first_failure(&self, n_max: usize) -> Result<Option<usize>> {
        check_shift(&self.tau, self.alpha, &self.total_factor, (self.m, self.k), n_max)
    }
}

/// The N=5 Laguerre example: weights `(alpha, alpha, alpha+1, alpha+1, alpha+2)`.
#[derive(Clone, Debug)]
pub struct LaguerreFive<T> {
    pub spec: WeightSpec,
    /// `P_n . D~_1 = Q_n T`.
    pub d1_tilde: MatrixDiffOperator<T>,
    /// `D_1 = D~_1 T^{-1}`, so `P_n . D_1 = Q_n`.
    pub d1: MatrixDiffOperator<T>,
    /// `D_2 = T (2I - D~_1)`.
    pub d2: MatrixDiffOperator<T>,
    /// `D_1 o D_2`, in the algebra of the diagonal weight.
    pub d: MatrixDiffOperator<T>,
    /// `D_2 o D_1`, in the algebra of `W`.
    pub d_swapped: MatrixDiffOperator<T>,
}

fn matrix_op<T: Scalar>(size: usize, entries: &[(usize, usize, Vec<Poly<T>>)]) -> MatrixDiffOperator<T> {
    let order = entries.iter().map(|e| e.2.len()).max().unwrap_or(1);
    let coeffs = (0..order)
        .map(|j| {
            let mut f = MatrixPolynomial::zero(size);
            for (r, c, ps) in entries {
                if let Some(p) = ps.get(j) {
                    f = f.add(&MatrixPolynomial::entry(size, *r, *c, p)).expect("same size");
                }
            }
            f
        })
        .collect();
    MatrixDiffOperator::new(coeffs).expect("same size")
}

pub fn builtin_n5_laguerre<T: Scalar>(alpha: f64, a: [f64; 4]) -> Result<LaguerreFive<T>> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParam(format!("alpha must exceed -1, got {alpha}")));
    }
    let weights = [0.0, 0.0, 1.0, 1.0, 2.0].iter().map(|s| ScalarWeightSpec::laguerre(alpha + s)).collect();
    let spec = WeightSpec::new(a.to_vec(), weights)?;
    let f = T::from_f64;
    let one = Poly::constant(T::one());
    let c = |v: f64| Poly::constant(f(v));
    // a (d^2 x + d(beta + 1 - 2x) + (x - beta - 1))
    let n_up = |s: f64, beta: f64| {
        vec![
            Poly::new(vec![f(-s * (beta + 1.0)), f(s)]),
            Poly::new(vec![f(s * (beta + 1.0)), f(-2.0 * s)]),
            Poly::new(vec![T::zero(), f(s)]),
        ]
    };
    // -a (d^2 x + d(beta + 1))
    let lower = |s: f64, beta: f64| vec![Poly::zero(), c(-s * (beta + 1.0)), Poly::new(vec![T::zero(), f(-s)])];
    // -a (d x - (x - beta - 1))
    let raise = |s: f64, beta: f64| vec![Poly::new(vec![f(-s * (beta + 1.0)), f(s)]), Poly::new(vec![T::zero(), f(-s)])];
    let [a1, a2, a3, a4] = a;
    let entries = vec![
        (0, 0, vec![one.clone()]),
        (0, 1, n_up(a1, alpha)),
        (1, 0, lower(a1, alpha)),
        (1, 1, vec![one.clone()]),
        (1, 2, vec![Poly::zero(), c(-a2)]),
        (2, 1, raise(a2, alpha)),
        (2, 2, vec![one.clone()]),
        (2, 3, n_up(a3, alpha + 1.0)),
        (3, 2, lower(a3, alpha + 1.0)),
        (3, 3, vec![one.clone()]),
        (3, 4, vec![Poly::zero(), c(-a4)]),
        (4, 3, raise(a4, alpha + 1.0)),
        (4, 4, vec![one]),
    ];
    let d1_tilde = matrix_op(5, &entries);
    let (t, t_inv) = spec.t_pair::<T>();
    let (t, t_inv) = (MatrixDiffOperator::multiplication(t), MatrixDiffOperator::multiplication(t_inv));
    let d1 = d1_tilde.compose(&t_inv)?;
    let two_minus = MatrixDiffOperator::identity(5).scale(&T::from_i64(2)).sub(&d1_tilde)?;
    let d2 = t.compose(&two_minus)?;
    let d = d1.compose(&d2)?;
    let d_swapped = d2.compose(&d1)?;
    Ok(LaguerreFive { spec, d1_tilde, d1, d2, d, d_swapped })
}

/// `I + A R_{n+1} + R_n A`: the constant with `P_n . (D_1 o D_2) = Lambda_n P_n`
/// and `Q_n . (D_2 o D_1) = Lambda_n Q_n` when `D_2 = T (2I - D~_1)`.
pub fn darboux_eigenvalue<T: Backend>(seq: &MVOPSequence<T>, n: usize) -> Result<Mat<T>> {
    let a = seq.nilpotent();
    let id = Mat::identity(seq.size());
    let up = &(a * &seq.ratio_matrix(n + 1)?) + &(&seq.ratio_matrix(n)? * a);
    Ok(&id + &up)
}

/// Operators around `W = T e^{-x^2} I T*` with every scalar `Hermite(0)`.
#[derive(Clone, Debug)]
pub struct HermiteFactorization<T> {
    /// `d^2 (-S/4) + d (x S/2) + A A*/2 + I`, `S = A A* + A* A`.
    pub d: MatrixDiffOperator<T>,
    /// `d (A* A x/2 - (A + A*)/2) + I`.
    pub d1: MatrixDiffOperator<T>,
    /// `d (A A* x/2 + (A + A*)/2) + A A*/2 + I`.
    pub d2: MatrixDiffOperator<T>,
    /// `d^2 (-S/4) + d (S x/2 - A A* A/2) + A A*/2 + I`.
    pub d_swapped: MatrixDiffOperator<T>,
}

pub fn hermite_a_factorization<T: Scalar>(spec: &WeightSpec) -> Result<HermiteFactorization<T>> {
    spec.validate()?;
    let all_h0 = spec
        .weights
        .iter()
        .all(|w| matches!(w.family, ScalarFamily::Hermite { b } if b == 0.0) && w.scale == 1.0);
    if !all_h0 {
        return Err(Error::Unsupported("the factorization needs every scalar weight to be Hermite(0)".into()));
    }
    let n = spec.size;
    let a = spec.nilpotent::<T>();
    let ast = a.adjoint();
    let aa = &a * &ast;
    let sa = &ast * &a;
    let s = &aa + &sa;
    let half = T::from_i64(1) / T::from_i64(2);
    let quarter = half.clone() * half.clone();
    let sym = (&a + &ast).scale(&half);
    let id = Mat::identity(n);
    let lin = |x1: Mat<T>, x0: Mat<T>| MatrixPolynomial::from_coeffs(vec![x0, x1]).expect("same size");
    let cst = MatrixPolynomial::constant;
    let zero = Mat::zeros(n);
    let base = &aa.scale(&half) + &id;
    let d = MatrixDiffOperator::new(vec![cst(base.clone()), lin(s.scale(&half), zero.clone()), cst(s.scale(&-quarter.clone()))])?;
    let d1 = MatrixDiffOperator::new(vec![cst(id.clone()), lin(sa.scale(&half), -&sym)])?;
    let d2 = MatrixDiffOperator::new(vec![cst(base.clone()), lin(aa.scale(&half), sym)])?;
    let aaa = &aa * &a;
    let d_swapped = MatrixDiffOperator::new(vec![
        cst(base),
        lin(s.scale(&half), aaa.scale(&-half)),
        cst(s.scale(&-quarter)),
    ])?;
    Ok(HermiteFactorization { d, d1, d2, d_swapped })
}

#[derive(Clone, Debug, Serialize)]
pub struct DarbouxEntry {
    pub n: usize,
    pub residual: f64,
    pub det: f64,
    pub singular: bool,
    /// `A_n` as nested rows.
    pub a_n: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct DarbouxReport {
    pub n_max: usize,
    pub tol: f64,
    pub worst: f64,
    pub worst_n: usize,
    pub entries: Vec<DarbouxEntry>,
    /// Degrees with singular `A_n`.
    pub singular: Vec<usize>,
    pub pass: bool,
}

/// Solves `P_n . D_1 = A_n Q_n` from the leading coefficients and checks
/// the full identity for `n <= n_max`.
///
/// Singular `A_n` are tolerated only in the lower half of the range, as the
/// finitely many exceptions allowed for a transformation.
pub fn darboux_verify<T, P, Q>(p: P, d1: &MatrixDiffOperator<T>, q: Q, n_max: usize, tol: f64) -> Result<DarbouxReport>
where
    T: Scalar,
    P: Fn(usize) -> Result<MatrixPolynomial<T>> + Sync,
    Q: Fn(usize) -> Result<MatrixPolynomial<T>> + Sync,
{
    let entries: Vec<DarbouxEntry> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let lhs = d1.apply(&p(n)?)?;
            let qn = q(n)?;
            let k_inv = qn.leading().inverse().ok_or(Error::SingularLeading(n))?;
            let a_n = &lhs.coeff(qn.degree()) * &k_inv;
            let rhs = qn.left_mul(&a_n);
            let scale = lhs.max_coeff_norm().max(rhs.max_coeff_norm());
            let residual = if lhs.degree() > qn.degree() && scale == 0.0 {
                f64::INFINITY
            } else if scale == 0.0 {
                0.0
            } else {
                lhs.distance(&rhs) / scale
            };
            let det = a_n.determinant();
            let size = a_n.size() as i32;
            let singular = if T::EXACT {
                det.is_zero()
            } else {
                det.magnitude() <= 1e-12 * a_n.max_norm().max(1e-300).powi(size)
            };
            Ok(DarbouxEntry { n, residual, det: det.re(), singular, a_n: a_n.to_json() })
        })
        .collect::<Result<_>>()?;
    let (worst_n, worst) =
        entries.iter().fold((0, 0.0), |acc, e| if e.residual > acc.1 { (e.n, e.residual) } else { acc });
    let singular: Vec<usize> = entries.iter().filter(|e| e.singular).map(|e| e.n).collect();
    let pass = worst <= tol && singular.iter().all(|&n| 2 * n < n_max);
    Ok(DarbouxReport { n_max, tol, worst, worst_n, entries, singular, pass })
}

/// [`darboux_verify`] with `P_n`, `Q_n` taken from one sequence.
pub fn darboux_verify_seq<T: Backend>(
    seq: &MVOPSequence<T>,
    d1: &MatrixDiffOperator<T>,
    n_max: usize,
    tol: f64,
) -> Result<DarbouxReport> {
    darboux_verify(|n| seq.build_p(n), d1, |n| Ok((*seq.build_q(n)?).clone()), n_max, tol)
}
