//! The matrix weight `W = T diag(w_1, ..., w_N) T*` and its inner product.
//!
//! `A` has `a_{2j-1}` at `(2j-1, 2j)` and `a_{2j}` at `(2j+1, 2j)` (1-based),
//! so every product of two matrices with this pattern vanishes and
//! `T = I + A x` is inverted by `I - A x`.
//!
//! Inner products never form `W(x)`. Column `i` of `P T` only ever meets the
//! scalar weight `w_i`, so each entry is a polynomial integrated against one
//! classical weight on its own support, which Gauss rules do exactly.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::matrix_poly::MatrixPolynomial;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::scalar_families::{
    exact_coefficients, exact_mass_ratio, gauss_rule_from, MonicScalarSequence, ScalarWeightSpec,
};

/// Most Gauss nodes a single inner product may ask for.
pub const MAX_NODES: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub size: usize,
    pub a: Vec<f64>,
    pub weights: Vec<ScalarWeightSpec>,
}

impl WeightSpec {
    pub fn new(a: Vec<f64>, weights: Vec<ScalarWeightSpec>) -> Result<Self> {
        let spec = WeightSpec { size: weights.len(), a, weights };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidParam(format!("size must be at least 2, got {}", self.size)));
        }
        if self.weights.len() != self.size {
            return Err(Error::InvalidParam(format!(
                "size {} but {} scalar weights",
                self.size,
                self.weights.len()
            )));
        }
        if self.a.len() != self.size - 1 {
            return Err(Error::InvalidParam(format!(
                "size {} needs {} off-diagonal parameters, got {}",
                self.size,
                self.size - 1,
                self.a.len()
            )));
        }
        if let Some(k) = self.a.iter().position(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParam(format!("a_{} = {} must be finite and nonzero", k + 1, self.a[k])));
        }
        self.weights.iter().try_for_each(ScalarWeightSpec::validate)
    }

    pub fn all_classical(&self) -> bool {
        self.weights.iter().all(ScalarWeightSpec::is_classical)
    }

    /// Row and column of `a_k` (`k` counted from 1) in 0-based indices.
    pub fn slot(k: usize) -> (usize, usize) {
        if k % 2 == 1 {
            (k - 1, k)
        } else {
            (k, k - 1)
        }
    }

    pub fn nilpotent<T: Scalar>(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.size);
        for (k, a) in self.a.iter().enumerate() {
            m[Self::slot(k + 1)] = T::from_f64(*a);
        }
        m
    }

    /// `(T, T^{-1}) = (I + A x, I - A x)`.
    pub fn t_pair<T: Scalar>(&self) -> (MatrixPolynomial<T>, MatrixPolynomial<T>) {
        let a = self.nilpotent::<T>();
        let id = Mat::identity(self.size);
        let t = MatrixPolynomial::from_coeffs(vec![id.clone(), a.clone()]).expect("same size");
        let t_inv = MatrixPolynomial::from_coeffs(vec![id, -&a]).expect("same size");
        (t, t_inv)
    }

    /// `W(x)`; each scalar weight vanishes off its own support.
    pub fn eval(&self, x: f64) -> Result<Mat<f64>> {
        let diag: Vec<f64> = self
            .weights
            .iter()
            .map(|w| w.eval(x).ok_or_else(|| Error::Unsupported("moment-defined weights have no pointwise value".into())))
            .collect::<Result<_>>()?;
        let t = self.t_pair::<f64>().0.evaluate(&x);
        Ok(&(&t * &Mat::diag(diag)) * &t.transpose())
    }
}

/// Matrix inner product `<P, Q> = int P W Q*`.
pub trait Integrator<T>: Send + Sync {
    fn inner(&self, p: &MatrixPolynomial<T>, q: &MatrixPolynomial<T>) -> Result<Mat<T>>;
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Floating inner products through per-weight Gauss rules.
///
/// Rules are cached by `(slot, node count)` behind a lock, so concurrent
/// callers share them; building a rule is deterministic.
pub struct InnerProductEngine {
    spec: WeightSpec,
    rules: RwLock<HashMap<(usize, usize), Rule>>,
}

impl InnerProductEngine {
    pub fn new(spec: &WeightSpec) -> Result<Self> {
        spec.validate()?;
        Ok(InnerProductEngine { spec: spec.clone(), rules: RwLock::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn rule(&self, slot: usize, m: usize) -> Result<Rule> {
        if let Some(r) = self.rules.read().unwrap().get(&(slot, m)) {
            return Ok(r.clone());
        }
        let seq = MonicScalarSequence::new(&self.spec.weights[slot], m)?;
        let rule = Arc::new(gauss_rule_from(&seq, m));
        self.rules.write().unwrap().entry((slot, m)).or_insert_with(|| rule.clone());
        Ok(rule)
    }

    /// Node count that integrates `deg_total` exactly, with one spare node.
    pub fn nodes_for(deg_total: usize) -> Result<usize> {
        let m = deg_total.div_ceil(2) + 1;
        if m > MAX_NODES {
            return Err(Error::DegreeCap(format!("integrand degree {deg_total} needs {m} nodes")));
        }
        Ok(m)
    }
}

impl Integrator<f64> for InnerProductEngine {
    fn inner(&self, p: &MatrixPolynomial<f64>, q: &MatrixPolynomial<f64>) -> Result<Mat<f64>> {
        let n = self.spec.size;
        if p.size() != n || q.size() != n {
            return Err(Error::SizeMismatch { left: n, right: if p.size() != n { p.size() } else { q.size() } });
        }
        let t = self.spec.t_pair::<f64>().0;
        let pt = p.mul(&t)?;
        let qt = q.mul(&t)?;
        let m = Self::nodes_for(pt.degree() + qt.degree())?;
        let mut out = Mat::zeros(n);
        for slot in 0..n {
            let rule = self.rule(slot, m)?;
            for (x, w) in rule.0.iter().zip(&rule.1) {
                let pc = pt.evaluate_column(x, slot);
                let qc = qt.evaluate_column(x, slot);
                for r in 0..n {
                    let pw = pc[r] * w;
                    for s in 0..n {
                        out[(r, s)] += pw * qc[s];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Exact inner products in units of `mu_0(w_1)` through rational moments.
pub struct ExactInnerProduct {
    spec: WeightSpec,
    /// `moments[i][k] = int x^k w_i / mu_0(w_1)`.
    moments: Vec<Vec<BigRational>>,
}

impl ExactInnerProduct {
    /// Moments are prepared up to `max_degree` of the product `P T (Q T)*`.
    pub fn new(spec: &WeightSpec, max_degree: usize) -> Result<Self> {
        spec.validate()?;
        let moments = spec
            .weights
            .iter()
            .map(|w| {
                let unit = exact_mass_ratio(w, &spec.weights[0])?;
                let (b, c) = exact_coefficients(w, max_degree)?;
                Ok(normalized_moments(&b, &c, max_degree).into_iter().map(|m| m * unit.clone()).collect())
            })
            .collect::<Result<_>>()?;
        Ok(ExactInnerProduct { spec: spec.clone(), moments })
    }

    /// `int f g w_i` for scalar polynomials.
    pub fn integrate(&self, slot: usize, f: &Poly<BigRational>) -> Result<BigRational> {
        let mom = &self.moments[slot];
        if f.degree() >= mom.len() {
            return Err(Error::DegreeCap(format!(
                "exact moments prepared to degree {}, integrand has degree {}",
                mom.len() - 1,
                f.degree()
            )));
        }
        Ok(f.coeffs().iter().zip(mom).fold(<BigRational as Scalar>::zero(), |acc, (a, m)| acc + a.clone() * m.clone()))
    }
}

/// `int x^k w / mu_0(w)` for `k <= d` from the recurrence: expand `x^k` in
/// the monic basis and keep the `p_0` coefficient.
pub fn normalized_moments<T: Scalar>(b: &[T], c: &[T], d: usize) -> Vec<T> {
    let mut coeffs = vec![T::one()];
    let mut out = vec![T::one()];
    for _ in 0..d {
        let mut next = vec![T::zero(); coeffs.len() + 1];
        for (j, v) in coeffs.iter().enumerate() {
            next[j + 1] = next[j + 1].clone() + v.clone();
            next[j] = next[j].clone() + v.clone() * b[j].clone();
            if j > 0 {
                next[j - 1] = next[j - 1].clone() + v.clone() * c[j].clone();
            }
        }
        coeffs = next;
        out.push(coeffs[0].clone());
    }
    out
}

impl Integrator<BigRational> for ExactInnerProduct {
    fn inner(&self, p: &MatrixPolynomial<BigRational>, q: &MatrixPolynomial<BigRational>) -> Result<Mat<BigRational>> {
        let n = self.spec.size;
        if p.size() != n || q.size() != n {
            return Err(Error::SizeMismatch { left: n, right: if p.size() != n { p.size() } else { q.size() } });
        }
        let t = self.spec.t_pair::<BigRational>().0;
        let pt = p.mul(&t)?;
        let qt = q.mul(&t)?;
        let mut out: Mat<BigRational> = Mat::zeros(n);
        for slot in 0..n {
            let pcol: Vec<_> = (0..n).map(|r| pt.entry_poly(r, slot)).collect();
            let qcol: Vec<_> = (0..n).map(|s| qt.entry_poly(s, slot)).collect();
            for r in 0..n {
                for s in 0..n {
                    let v = self.integrate(slot, &pcol[r].mul(&qcol[s]))?;
                    out[(r, s)] = out[(r, s)].clone() + v;
                }
            }
        }
        Ok(out)
    }
}
