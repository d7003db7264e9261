//! The orthogonal sequence `Q_n` of a weight `T diag(w_i) T*`.
//!
//! With `P_n = diag(p_n^{w_i})` and `R_n = ||P_n||^2 A* ||P_{n-1}||^{-2}`,
//!
//! ```text
//! Q_n T = P_n + A P_{n+1} - R_n P_{n-1},      Q_n = (Q_n T)(I - A x),
//! ```
//!
//! with `R_0 = 0`. The five-term expanded form is kept as
//! [`MVOPSequence::build_q_expanded`] and checked against this one.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::matrix_poly::MatrixPolynomial;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::scalar_families::ScalarBank;
use crate::weight::{ExactInnerProduct, InnerProductEngine, Integrator, WeightSpec};

/// Degree cap of the exact backend.
pub const EXACT_N_MAX: usize = 12;

/// A coefficient field with a matching scalar bank and inner product.
pub trait Backend: Scalar {
    const NAME: &'static str;
    /// Gram matrices come from values of `Q_n T` at Gauss nodes, computed
    /// through the scalar recurrences, instead of from monomial coefficients.
    const STABLE_VALUES: bool;
    /// Scalar sequences for degrees `0..=n_max`.
    fn bank(spec: &WeightSpec, n_max: usize) -> Result<ScalarBank<Self>>;
    /// An inner product able to handle `<x Q_n, Q_m>` for `n, m <= n_max`.
    fn integrator(spec: &WeightSpec, n_max: usize) -> Result<Box<dyn Integrator<Self>>>;
}

impl Backend for f64 {
    const NAME: &'static str = "float";
    const STABLE_VALUES: bool = true;

    fn bank(spec: &WeightSpec, n_max: usize) -> Result<ScalarBank<f64>> {
        ScalarBank::float(&spec.weights, n_max)
    }

    fn integrator(spec: &WeightSpec, _n_max: usize) -> Result<Box<dyn Integrator<f64>>> {
        Ok(Box::new(InnerProductEngine::new(spec)?))
    }
}

impl Backend for BigRational {
    const NAME: &'static str = "exact";
    const STABLE_VALUES: bool = false;

    fn bank(spec: &WeightSpec, n_max: usize) -> Result<ScalarBank<BigRational>> {
        if n_max > EXACT_N_MAX + 1 {
            return Err(Error::DegreeCap(format!(
                "the exact backend stops at degree {EXACT_N_MAX}, asked for {}",
                n_max - 1
            )));
        }
        ScalarBank::exact(&spec.weights, n_max)
    }

    fn integrator(spec: &WeightSpec, n_max: usize) -> Result<Box<dyn Integrator<BigRational>>> {
        Ok(Box::new(ExactInnerProduct::new(spec, 2 * n_max + 6)?))
    }
}

/// `Q_n`, `P_n`, norms and leading coefficients for one weight.
///
/// Norms and Gram matrices are in the bank's unit: absolute for `f64`,
/// multiples of `mu_0(w_1)` for rationals.
pub struct MVOPSequence<T: Backend> {
    spec: WeightSpec,
    bank: ScalarBank<T>,
    integrator: Box<dyn Integrator<T>>,
    a: Mat<T>,
    t: MatrixPolynomial<T>,
    t_inv: MatrixPolynomial<T>,
    n_max: usize,
    cache: RwLock<HashMap<usize, Arc<MatrixPolynomial<T>>>>,
    tables: OnceLock<Vec<SlotTable>>,
}

/// Gauss rule of one scalar weight with `p_0 .. p_{n_max+1}` at its nodes.
struct SlotTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl<T: Backend> MVOPSequence<T> {
    /// Supports `Q_0 .. Q_{n_max}`.
    pub fn new(spec: &WeightSpec, n_max: usize) -> Result<Self> {
        spec.validate()?;
        let bank = T::bank(spec, n_max + 1)?;
        let integrator = T::integrator(spec, n_max)?;
        let (t, t_inv) = spec.t_pair::<T>();
        Ok(MVOPSequence {
            spec: spec.clone(),
            bank,
            integrator,
            a: spec.nilpotent(),
            t,
            t_inv,
            n_max,
            cache: RwLock::new(HashMap::new()),
            tables: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.spec.size
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn bank(&self) -> &ScalarBank<T> {
        &self.bank
    }

    pub fn nilpotent(&self) -> &Mat<T> {
        &self.a
    }

    pub fn t(&self) -> &MatrixPolynomial<T> {
        &self.t
    }

    pub fn t_inv(&self) -> &MatrixPolynomial<T> {
        &self.t_inv
    }

    pub fn inner(&self, p: &MatrixPolynomial<T>, q: &MatrixPolynomial<T>) -> Result<Mat<T>> {
        self.integrator.inner(p, q)
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::OutOfRange { index: n, max: self.n_max });
        }
        Ok(())
    }

    /// `diag(p_n^{w_1}, ..., p_n^{w_N})`, allowed up to `n_max + 1`.
    pub fn build_p(&self, n: usize) -> Result<MatrixPolynomial<T>> {
        let entries: Vec<Poly<T>> = (0..self.size()).map(|i| self.bank.monic(i, n)).collect::<Result<_>>()?;
        Ok(MatrixPolynomial::diagonal(&entries))
    }

    /// `||P_n||^2`.
    pub fn norm_p(&self, n: usize) -> Result<Mat<T>> {
        Ok(Mat::diag((0..self.size()).map(|i| self.bank.norm(i, n)).collect::<Result<_>>()?))
    }

    /// `R_n = ||P_n||^2 A* ||P_{n-1}||^{-2}`, zero at `n = 0`.
    pub fn ratio_matrix(&self, n: usize) -> Result<Mat<T>> {
        let size = self.size();
        let mut r = Mat::zeros(size);
        if n == 0 {
            return Ok(r);
        }
        for k in 1..size {
            let (row, col) = WeightSpec::slot(k);
            // A* has the conjugate of A[row, col] at (col, row)
            let v = self.a[(row, col)].conj() * self.bank.norm_ratio(col, n, row, n - 1)?;
            r[(col, row)] = v;
        }
        Ok(r)
    }

    /// `Q_n T = P_n + A P_{n+1} - R_n P_{n-1}`.
    pub fn build_qt(&self, n: usize) -> Result<MatrixPolynomial<T>> {
        self.check(n)?;
        let mut qt = self.build_p(n)?.add(&self.build_p(n + 1)?.left_mul(&self.a))?;
        if n > 0 {
            qt = qt.sub(&self.build_p(n - 1)?.left_mul(&self.ratio_matrix(n)?))?;
        }
        Ok(qt)
    }

    /// `Q_n`, cached.
    pub fn build_q(&self, n: usize) -> Result<Arc<MatrixPolynomial<T>>> {
        if let Some(q) = self.cache.read().unwrap().get(&n) {
            return Ok(q.clone());
        }
        let q = self.build_qt(n)?.mul(&self.t_inv)?;
        if q.degree() != n || q.leading().determinant().is_zero() {
            return Err(Error::SingularLeading(n));
        }
        let q = Arc::new(q);
        self.cache.write().unwrap().entry(n).or_insert_with(|| q.clone());
        Ok(q)
    }

    /// The expanded five-term form
    /// `P_n + A P_{n+1} - R_n P_{n-1} - P_n A x + R_n P_{n-1} A x`.
    pub fn build_q_expanded(&self, n: usize) -> Result<MatrixPolynomial<T>> {
        self.check(n)?;
        let ax = MatrixPolynomial::monomial(self.a.clone(), 1);
        let p = self.build_p(n)?;
        let mut q = p.add(&self.build_p(n + 1)?.left_mul(&self.a))?.sub(&p.mul(&ax)?)?;
        if n > 0 {
            let rp = self.build_p(n - 1)?.left_mul(&self.ratio_matrix(n)?);
            q = q.sub(&rp)?.add(&rp.mul(&ax)?)?;
        }
        Ok(q)
    }

    /// `K_n`, the leading coefficient of `Q_n`.
    pub fn leading_coeff(&self, n: usize) -> Result<Mat<T>> {
        Ok(self.build_q(n)?.leading().clone())
    }

    /// `rho_i = a_i^2 ||p_n^{w_{2 ceil(i/2)}}||^2 / ||p_{n-1}^{w_{2 floor(i/2) + 1}}||^2`
    /// for `i = 1..N-1`, all zero at `n = 0`.
    pub fn rhos(&self, n: usize) -> Result<Vec<T>> {
        (1..self.size())
            .map(|i| {
                if n == 0 {
                    return Ok(T::zero());
                }
                let a = T::from_f64(self.spec.a[i - 1]);
                let even = 2 * i.div_ceil(2) - 1;
                let odd = 2 * (i / 2);
                Ok(a.clone() * a * self.bank.norm_ratio(even, n, odd, n - 1)?)
            })
            .collect()
    }

    /// `I + ||P_n||^2 A* - ||P_{n-1}||^{-2} A`, whose determinant equals `det K_n`.
    pub fn tridiagonal_form(&self, n: usize) -> Result<Mat<T>> {
        let size = self.size();
        let mut m: Mat<T> = Mat::identity(size);
        for k in 1..size {
            let (row, col) = WeightSpec::slot(k);
            let a = self.a[(row, col)].clone();
            m[(col, row)] = m[(col, row)].clone() + self.bank.norm(col, n)? * a.conj();
            if n > 0 {
                m[(row, col)] = m[(row, col)].clone() - a / self.bank.norm(row, n - 1)?;
            }
        }
        Ok(m)
    }

    pub fn leading_coeff_det(&self, n: usize) -> Result<LeadingDet<T>> {
        let k = self.leading_coeff(n)?;
        let det_continuant = continuant(&self.rhos(n)?);
        let det_direct = self.tridiagonal_form(n)?.determinant();
        let det_k = k.determinant();
        Ok(LeadingDet { k, det_continuant, det_direct, det_k })
    }

    /// `||Q_n||^2 = ||P_n||^2 + A ||P_{n+1}||^2 A* + R_n A ||P_n||^2`.
    pub fn squared_norm_q(&self, n: usize) -> Result<Mat<T>> {
        self.check(n)?;
        let pn = self.norm_p(n)?;
        let pn1 = self.norm_p(n + 1)?;
        let middle = &(&self.a * &pn1) * &self.a.adjoint();
        let last = &(&self.ratio_matrix(n)? * &self.a) * &pn;
        Ok(&(&pn + &middle) + &last)
    }

    /// `<Q_n, Q_m>`.
    pub fn gram(&self, n: usize, m: usize) -> Result<Mat<T>> {
        self.gram_with(n, m, false)
    }

    /// `<x Q_n, Q_m>`.
    pub fn gram_x(&self, n: usize, m: usize) -> Result<Mat<T>> {
        self.gram_with(n, m, true)
    }

    /// `<Q_n, Q_m>` straight from the monomial coefficients of `Q_n`.
    pub fn gram_monomial(&self, n: usize, m: usize) -> Result<Mat<T>> {
        self.inner(&*self.build_q(n)?, &*self.build_q(m)?)
    }

    fn gram_with(&self, n: usize, m: usize, shift: bool) -> Result<Mat<T>> {
        self.check(n.max(m))?;
        if !T::STABLE_VALUES {
            let q = self.build_q(n)?;
            let p = if shift { q.shift() } else { (*q).clone() };
            return self.inner(&p, &*self.build_q(m)?);
        }
        let tables = self.tables()?;
        let (cn, cm) = (self.qt_columns(n)?, self.qt_columns(m)?);
        let size = self.size();
        let mut out = Mat::<f64>::zeros(size);
        let mut u = vec![0.0; size];
        let mut v = vec![0.0; size];
        for (slot, tab) in tables.iter().enumerate() {
            for (k, (x, w)) in tab.nodes.iter().zip(&tab.weights).enumerate() {
                u.iter_mut().for_each(|e| *e = 0.0);
                v.iter_mut().for_each(|e| *e = 0.0);
                for &(row, deg, c) in &cn[slot] {
                    u[row] += c * tab.values[deg][k];
                }
                for &(row, deg, c) in &cm[slot] {
                    v[row] += c * tab.values[deg][k];
                }
                let w = if shift { w * x } else { *w };
                for r in 0..size {
                    for s in 0..size {
                        out[(r, s)] += w * u[r] * v[s];
                    }
                }
            }
        }
        Ok(out.map(|e| T::from_f64(*e)))
    }

    /// Column `i` of `Q_n T` as `(row, degree, coefficient)` terms in `p^{w_i}`.
    fn qt_columns(&self, n: usize) -> Result<Vec<Vec<(usize, usize, f64)>>> {
        let r = self.ratio_matrix(n)?;
        let size = self.size();
        Ok((0..size)
            .map(|i| {
                let mut terms = vec![(i, n, 1.0)];
                for row in 0..size {
                    let a = self.a[(row, i)].re();
                    if a != 0.0 {
                        terms.push((row, n + 1, a));
                    }
                    let c = r[(row, i)].re();
                    if n > 0 && c != 0.0 {
                        terms.push((row, n - 1, -c));
                    }
                }
                terms
            })
            .collect())
    }

    fn tables(&self) -> Result<&Vec<SlotTable>> {
        if let Some(t) = self.tables.get() {
            return Ok(t);
        }
        let engine = InnerProductEngine::new(&self.spec)?;
        let m = self.n_max + 3;
        let tables = (0..self.size())
            .map(|slot| {
                let rule = engine.rule(slot, m)?;
                let bank = ScalarBank::<f64>::float(std::slice::from_ref(&self.spec.weights[slot]), self.n_max + 1)?;
                let (b, c) = bank.recurrence(0);
                let mut values = vec![vec![1.0; m]];
                let mut prev = vec![0.0; m];
                for d in 0..=self.n_max {
                    let cur = &values[d];
                    let next: Vec<f64> = (0..m).map(|k| (rule.0[k] - b[d]) * cur[k] - c[d] * prev[k]).collect();
                    prev = cur.clone();
                    values.push(next);
                }
                Ok(SlotTable { nodes: rule.0.clone(), weights: rule.1.clone(), values })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.tables.get_or_init(|| tables))
    }

    /// Every pair `n != m <= n_max`, scaled by `sqrt(|G_nn| |G_mm|)`.
    pub fn verify_orthogonality(&self, n_max: usize, tol: f64) -> Result<OrthogonalityReport> {
        self.check(n_max)?;
        let diag: Vec<f64> =
            (0..=n_max).into_par_iter().map(|n| Ok(self.gram(n, n)?.frobenius())).collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..=n_max).flat_map(|n| (n + 1..=n_max).map(move |m| (n, m))).collect();
        let pairs: Vec<PairResidual> = pairs
            .into_par_iter()
            .map(|(n, m)| {
                let g = self.gram(n, m)?.frobenius();
                let scaled = g / (diag[n] * diag[m]).sqrt();
                Ok(PairResidual { n, m, scaled, pass: scaled <= tol })
            })
            .collect::<Result<_>>()?;
        let worst = pairs.iter().cloned().max_by(|a, b| a.scaled.total_cmp(&b.scaled));
        let pass = pairs.iter().all(|p| p.pass);
        Ok(OrthogonalityReport { n_max, tol, worst, pairs, pass })
    }

    /// Relative Frobenius distance between the closed-form `||Q_n||^2` and
    /// the Gram matrix from quadrature, per `n`.
    pub fn norm_residuals(&self, n_max: usize) -> Result<Vec<f64>> {
        self.check(n_max)?;
        (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let closed = self.squared_norm_q(n)?;
                let quad = self.gram(n, n)?;
                Ok((&closed - &quad).frobenius() / closed.frobenius())
            })
            .collect()
    }

    /// `A_n, B_n, C_n` by projection:
    /// `<x Q_n, Q_k> ||Q_k||^{-2}` for `k = n+1, n, n-1`.
    pub fn three_term_coefficients(&self, n: usize) -> Result<ThreeTerm<T>> {
        if n + 1 > self.n_max {
            return Err(Error::OutOfRange { index: n + 1, max: self.n_max });
        }
        let coef = |k: usize| -> Result<Mat<T>> {
            let g = self.gram_x(n, k)?;
            let inv = self.squared_norm_q(k)?.inverse().ok_or(Error::SingularLeading(k))?;
            Ok(&g * &inv)
        };
        let a = coef(n + 1)?;
        let b = coef(n)?;
        let c = if n == 0 { Mat::zeros(self.size()) } else { coef(n - 1)? };
        self.finish_three_term(n, a, b, c)
    }

    /// The same coefficients by matching leading coefficients:
    /// `A_n = K_n K_{n+1}^{-1}`, then peel off degrees `n` and `n-1`.
    pub fn three_term_by_elimination(&self, n: usize) -> Result<ThreeTerm<T>> {
        if n + 1 > self.n_max {
            return Err(Error::OutOfRange { index: n + 1, max: self.n_max });
        }
        let xq = self.build_q(n)?.shift();
        let inv = |k: usize| -> Result<Mat<T>> {
            self.leading_coeff(k)?.inverse().ok_or(Error::SingularLeading(k))
        };
        let a = &self.leading_coeff(n)? * &inv(n + 1)?;
        let r1 = xq.sub(&self.build_q(n + 1)?.left_mul(&a))?;
        let b = &r1.coeff(n) * &inv(n)?;
        let c = if n == 0 {
            Mat::zeros(self.size())
        } else {
            let r2 = r1.sub(&self.build_q(n)?.left_mul(&b))?;
            &r2.coeff(n - 1) * &inv(n - 1)?
        };
        self.finish_three_term(n, a, b, c)
    }

    fn finish_three_term(&self, n: usize, a: Mat<T>, b: Mat<T>, c: Mat<T>) -> Result<ThreeTerm<T>> {
        let xq = self.build_q(n)?.shift();
        let mut rhs = self.build_q(n + 1)?.left_mul(&a).add(&self.build_q(n)?.left_mul(&b))?;
        if n > 0 {
            rhs = rhs.add(&self.build_q(n - 1)?.left_mul(&c))?;
        }
        let residual = xq.distance(&rhs) / xq.max_coeff_norm();
        Ok(ThreeTerm { n, a, b, c, residual })
    }
}

/// `D_N` for `D_k = D_{k-1} + rho_{k-1} D_{k-2}`, `D_0 = D_1 = 1`; the
/// determinant of a unit-diagonal tridiagonal matrix whose off-diagonal
/// products are `-rho_i`.
pub fn continuant<T: Scalar>(rho: &[T]) -> T {
    let (mut prev, mut cur) = (T::one(), T::one());
    for r in rho {
        let next = cur.clone() + r.clone() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Unit-diagonal tridiagonal matrix with superdiagonal `1` and subdiagonal
/// `-rho_i`.
pub fn tridiagonal_from_rhos<T: Scalar>(rho: &[T]) -> Mat<T> {
    let n = rho.len() + 1;
    let mut m = Mat::identity(n);
    for (i, r) in rho.iter().enumerate() {
        m[(i, i + 1)] = T::one();
        m[(i + 1, i)] = -r.clone();
    }
    m
}

#[derive(Clone, Debug)]
pub struct LeadingDet<T> {
    pub k: Mat<T>,
    pub det_continuant: T,
    /// Determinant of `I + ||P_n||^2 A* - ||P_{n-1}||^{-2} A` by elimination.
    pub det_direct: T,
    /// Determinant of `K_n` itself.
    pub det_k: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResidual {
    pub n: usize,
    pub m: usize,
    pub scaled: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub n_max: usize,
    pub tol: f64,
    pub worst: Option<PairResidual>,
    pub pairs: Vec<PairResidual>,
    pub pass: bool,
}

impl OrthogonalityReport {
    pub fn worst_scaled(&self) -> f64 {
        self.worst.as_ref().map_or(0.0, |w| w.scaled)
    }
}

#[derive(Clone, Debug)]
pub struct ThreeTerm<T> {
    pub n: usize,
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub c: Mat<T>,
    /// Largest coefficient of `x Q_n - A Q_{n+1} - B Q_n - C Q_{n-1}`
    /// relative to the largest coefficient of `x Q_n`.
    pub residual: f64,
}
