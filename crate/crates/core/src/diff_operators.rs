//! Matrix differential operators acting on the right,
//! `P . D = sum_j d^j(P) F_j(x)`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::matrix_poly::MatrixPolynomial;
use crate::mvop::{Backend, MVOPSequence};
use crate::scalar::Scalar;
use crate::scalar_families::{OperatorKind, ScalarFamily};
use crate::weight::WeightSpec;

/// `sum_{j <= m} d^j F_j`; trailing zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDiffOperator<T> {
    size: usize,
    coeffs: Vec<MatrixPolynomial<T>>,
}

impl<T: Scalar> MatrixDiffOperator<T> {
    /// From `F_0, F_1, ...`.
    pub fn new(coeffs: Vec<MatrixPolynomial<T>>) -> Result<Self> {
        let size = coeffs.first().map(|f| f.size()).ok_or_else(|| Error::InvalidParam("operator needs F_0".into()))?;
        if let Some(f) = coeffs.iter().find(|f| f.size() != size) {
            return Err(Error::SizeMismatch { left: size, right: f.size() });
        }
        Ok(MatrixDiffOperator { size, coeffs }.normalized())
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|f| f.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn zero(size: usize) -> Self {
        MatrixDiffOperator { size, coeffs: vec![MatrixPolynomial::zero(size)] }
    }

    pub fn identity(size: usize) -> Self {
        Self::multiplication(MatrixPolynomial::identity(size))
    }

    /// The order-zero operator `P -> P F`.
    pub fn multiplication(f: MatrixPolynomial<T>) -> Self {
        MatrixDiffOperator { size: f.size(), coeffs: vec![f] }
    }

    /// `d^k I`.
    pub fn derivative(size: usize, k: usize) -> Self {
        let mut coeffs = vec![MatrixPolynomial::zero(size); k + 1];
        coeffs[k] = MatrixPolynomial::identity(size);
        MatrixDiffOperator { size, coeffs }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[MatrixPolynomial<T>] {
        &self.coeffs
    }

    /// `F_j`, zero past the order.
    pub fn coeff(&self, j: usize) -> MatrixPolynomial<T> {
        self.coeffs.get(j).cloned().unwrap_or_else(|| MatrixPolynomial::zero(self.size))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|f| f.is_zero())
    }

    /// `P . D`.
    pub fn apply(&self, p: &MatrixPolynomial<T>) -> Result<MatrixPolynomial<T>> {
        if p.size() != self.size {
            return Err(Error::SizeMismatch { left: p.size(), right: self.size });
        }
        let mut out = MatrixPolynomial::zero(self.size);
        for (j, f) in self.coeffs.iter().enumerate() {
            out = out.add(&p.derivative(j).mul(f)?)?;
        }
        Ok(out)
    }

    /// `self o other`, defined by `P . (D1 o D2) = (P . D1) . D2`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.size != self.size {
            return Err(Error::SizeMismatch { left: self.size, right: other.size });
        }
        // d^j (P^(i) F_i) G_j = sum_k C(j,k) P^(i+k) F_i^(j-k) G_j
        let mut coeffs = vec![MatrixPolynomial::zero(self.size); self.order() + other.order() + 1];
        for (i, f) in self.coeffs.iter().enumerate() {
            for (j, g) in other.coeffs.iter().enumerate() {
                let mut binom = 1i64;
                for k in 0..=j {
                    let term = f.derivative(j - k).mul(g)?.scale(&T::from_i64(binom));
                    coeffs[i + k] = coeffs[i + k].add(&term)?;
                    binom = binom * (j - k) as i64 / (k + 1) as i64;
                }
            }
        }
        Ok(MatrixDiffOperator { size: self.size, coeffs }.normalized())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    fn zip(
        &self,
        other: &Self,
        op: impl Fn(&MatrixPolynomial<T>, &MatrixPolynomial<T>) -> Result<MatrixPolynomial<T>>,
    ) -> Result<Self> {
        if other.size != self.size {
            return Err(Error::SizeMismatch { left: self.size, right: other.size });
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|j| op(&self.coeff(j), &other.coeff(j))).collect::<Result<_>>()?;
        Ok(MatrixDiffOperator { size: self.size, coeffs }.normalized())
    }

    pub fn scale(&self, s: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|f| f.scale(s)).collect();
        MatrixDiffOperator { size: self.size, coeffs }.normalized()
    }

    /// `D + s I`.
    pub fn shifted(&self, s: &T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add(&MatrixPolynomial::constant(Mat::identity(self.size).scale(s))).expect("same size");
        out.normalized()
    }

    /// Largest coefficient max-norm of `self - other` over all `F_j`.
    pub fn distance(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).map(|j| self.coeff(j).distance(&other.coeff(j))).fold(0.0, f64::max)
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|f| f.max_coeff_norm()).fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MatrixDiffOperator<U> {
        MatrixDiffOperator { size: self.size, coeffs: self.coeffs.iter().map(|c| c.map(&f)).collect() }.normalized()
    }

    /// `T o D o T^{-1}` for the spec's `T = I + A x`.
    ///
    /// `A^2 = 0` keeps every coefficient polynomial; the result is checked by
    /// conjugating back.
    pub fn conjugate_by_t(&self, spec: &WeightSpec) -> Result<Self> {
        if spec.size != self.size {
            return Err(Error::SizeMismatch { left: self.size, right: spec.size });
        }
        let (t, t_inv) = spec.t_pair::<T>();
        let (t, t_inv) = (Self::multiplication(t), Self::multiplication(t_inv));
        let out = t.compose(self)?.compose(&t_inv)?;
        let back = t_inv.compose(&out)?.compose(&t)?;
        let err = back.distance(self) / self.max_coeff_norm().max(1.0);
        if err > 1e-11 {
            return Err(Error::NonPolynomialResult(err));
        }
        Ok(out)
    }

    /// `{"order": m, "size": N, "coeffs": [F_0, ..., F_m]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "size": self.size,
            "coeffs": self.coeffs.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let coeffs: Option<Vec<MatrixPolynomial<T>>> =
            v.get("coeffs")?.as_array()?.iter().map(MatrixPolynomial::from_json).collect();
        let d = Self::new(coeffs?).ok()?;
        (v.get("order")?.as_u64()? as usize == d.order()).then_some(d)
    }
}

/// Eigenvalue of `scale * delta + shift` on one diagonal slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotEigen {
    #[serde(skip)]
    pub kind: OperatorKind,
    pub scale: f64,
    pub shift: f64,
}

impl SlotEigen {
    pub fn at<T: Scalar>(&self, n: i64) -> T {
        let op = crate::scalar_families::ClassicalOperator { kind: self.kind };
        T::from_f64(self.scale) * op.eigenvalue_in::<T>(n) + T::from_f64(self.shift)
    }

    /// `[c_0, c_1, c_2]` of the eigenvalue as a polynomial in `n`.
    pub fn quadratic(&self) -> [f64; 3] {
        let base = match self.kind {
            OperatorKind::Hermite { .. } => [0.0, -2.0, 0.0],
            OperatorKind::Laguerre { .. } => [0.0, -1.0, 0.0],
            OperatorKind::Jacobi { alpha, beta } => [0.0, -(alpha + beta + 1.0), -1.0],
        };
        [self.scale * base[0] + self.shift, self.scale * base[1], self.scale * base[2]]
    }

    /// The scalar operator `scale * delta + shift`.
    pub fn operator<T: Scalar>(&self) -> [crate::poly::Poly<T>; 3] {
        let op = crate::scalar_families::ClassicalOperator { kind: self.kind };
        let [_, f1, f2] = op.coefficients::<T>();
        let s = T::from_f64(self.scale);
        [crate::poly::Poly::constant(T::from_f64(self.shift)), f1.scale(&s), f2.scale(&s)]
    }
}

/// `n -> diag(Lambda_n(delta_1), ..., Lambda_n(delta_N))` in closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueMap {
    pub slots: Vec<SlotEigen>,
}

impl EigenvalueMap {
    pub fn at<T: Scalar>(&self, n: i64) -> Mat<T> {
        Mat::diag(self.slots.iter().map(|s| s.at(n)).collect())
    }

    pub fn size(&self) -> usize {
        self.slots.len()
    }

    /// `diag(scale_i * delta_i + shift_i)`.
    pub fn diagonal_operator<T: Scalar>(&self) -> MatrixDiffOperator<T> {
        let size = self.size();
        let ops: Vec<_> = self.slots.iter().map(|s| s.operator::<T>()).collect();
        let coeffs = (0..3)
            .map(|j| MatrixPolynomial::diagonal(&ops.iter().map(|o| o[j].clone()).collect::<Vec<_>>()))
            .collect();
        MatrixDiffOperator::new(coeffs).unwrap_or_else(|_| MatrixDiffOperator::zero(size))
    }
}

/// The slot operators and shifts for a spec whose scalars are all of one
/// classical family, or the 2x2 Hermite-Laguerre pair.
///
/// Laguerre shifts even slots by `+1`; Jacobi shifts even slots by
/// `alpha_1 + beta_1`; a Hermite first slot is shifted by `-2` on odd slots,
/// and a Laguerre second slot next to it is doubled.
pub fn bispectral_eigenvalues(spec: &WeightSpec) -> Result<EigenvalueMap> {
    spec.validate()?;
    let kinds: Vec<OperatorKind> = spec
        .weights
        .iter()
        .map(|w| match w.family {
            ScalarFamily::Hermite { b } => Ok(OperatorKind::Hermite { b }),
            ScalarFamily::Laguerre { alpha } => Ok(OperatorKind::Laguerre { alpha }),
            ScalarFamily::Jacobi { alpha, beta } => Ok(OperatorKind::Jacobi { alpha, beta }),
            ScalarFamily::Custom { .. } => Err(Error::Unsupported("no differential operator for moment-defined weights".into())),
        })
        .collect::<Result<_>>()?;
    let same = |k: &OperatorKind| std::mem::discriminant(k) == std::mem::discriminant(&kinds[0]);
    let mixed_hl = spec.size == 2
        && matches!(kinds[0], OperatorKind::Hermite { .. })
        && matches!(kinds[1], OperatorKind::Laguerre { .. });
    if !kinds.iter().all(same) && !mixed_hl {
        return Err(Error::Unsupported("mixed families are only supported as the 2x2 Hermite-Laguerre pair".into()));
    }
    if let OperatorKind::Jacobi { alpha, beta } = kinds[0] {
        let s1 = alpha + beta;
        for (j, k) in kinds.iter().enumerate().skip(1) {
            if let OperatorKind::Jacobi { alpha, beta } = *k {
                let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let lhs = alpha + beta + 1.0 + sign;
                if (lhs - s1).abs() > 1e-12 {
                    return Err(Error::ConditionFailed {
                        slot: j + 1,
                        detail: format!("alpha_j + beta_j + 1 + (-1)^j = {lhs}, expected alpha_1 + beta_1 = {s1}"),
                    });
                }
            }
        }
    }
    let mut slots: Vec<SlotEigen> = kinds
        .iter()
        .map(|&kind| {
            let scale = if mixed_hl && matches!(kind, OperatorKind::Laguerre { .. }) { 2.0 } else { 1.0 };
            SlotEigen { kind, scale, shift: 0.0 }
        })
        .collect();
    // walk the chain: slot(k) pairs an odd slot at degree n with an even slot at n + 1
    let base = if matches!(kinds[0], OperatorKind::Hermite { .. }) { -2.0 } else { 0.0 };
    slots[0].shift = base;
    for k in 1..spec.size {
        let (odd, even) = if k % 2 == 1 { (k - 1, k) } else { (k, k - 1) };
        let known = if k % 2 == 1 { odd } else { even };
        let gap = chain_gap(&slots[odd], &slots[even]);
        if k % 2 == 1 {
            slots[even].shift = slots[known].shift + gap;
        } else {
            slots[odd].shift = slots[known].shift - gap;
        }
    }
    for k in 1..spec.size {
        let (odd, even) = if k % 2 == 1 { (k - 1, k) } else { (k, k - 1) };
        let lhs = slots[odd].quadratic();
        let rhs = shifted_quadratic(slots[even].quadratic());
        let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if err > 1e-12 {
            return Err(Error::ConditionFailed {
                slot: k,
                detail: format!("Lambda_n(slot {}) != Lambda_(n+1)(slot {}) (off by {err:e})", odd + 1, even + 1),
            });
        }
    }
    Ok(EigenvalueMap { slots })
}

/// `q(n + 1)` for `q(n) = c_0 + c_1 n + c_2 n^2`.
fn shifted_quadratic(q: [f64; 3]) -> [f64; 3] {
    [q[0] + q[1] + q[2], q[1] + 2.0 * q[2], q[2]]
}

/// Constant to add to the even slot so its eigenvalue at `n + 1` meets the
/// odd slot's at `n`, using only the unshifted parts.
fn chain_gap(odd: &SlotEigen, even: &SlotEigen) -> f64 {
    let lhs = SlotEigen { shift: 0.0, ..*odd }.quadratic();
    let rhs = shifted_quadratic(SlotEigen { shift: 0.0, ..*even }.quadratic());
    lhs[0] - rhs[0]
}

/// `(D, Lambda)` with `D = T diag(delta_i + shift_i) T^{-1}`.
pub fn build_bispectral_operator<T: Scalar>(spec: &WeightSpec) -> Result<(MatrixDiffOperator<T>, EigenvalueMap)> {
    let lambda = bispectral_eigenvalues(spec)?;
    let d = lambda.diagonal_operator::<T>().conjugate_by_t(spec)?;
    Ok((d, lambda))
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenReport {
    pub n_max: usize,
    pub tol: f64,
    pub residuals: Vec<f64>,
    pub worst_n: usize,
    pub worst: f64,
    pub pass: bool,
}

/// Scaled residual of `Q_n . D - Lambda_n Q_n`, coefficientwise, relative
/// to the larger of the two sides.
pub fn eigen_residual<T: Scalar>(q: &MatrixPolynomial<T>, d: &MatrixDiffOperator<T>, lambda: &Mat<T>) -> Result<f64> {
    let lhs = d.apply(q)?;
    let rhs = q.left_mul(lambda);
    let scale = lhs.max_coeff_norm().max(rhs.max_coeff_norm()).max(q.max_coeff_norm());
    Ok(if scale == 0.0 { 0.0 } else { lhs.distance(&rhs) / scale })
}

pub fn eigencheck<T: Backend>(
    seq: &MVOPSequence<T>,
    d: &MatrixDiffOperator<T>,
    lambda: &EigenvalueMap,
    n_max: usize,
    tol: f64,
) -> Result<EigenReport> {
    use rayon::prelude::*;
    let residuals: Vec<f64> = (0..=n_max)
        .into_par_iter()
        .map(|n| eigen_residual(&*seq.build_q(n)?, d, &lambda.at(n as i64)))
        .collect::<Result<_>>()?;
    let (worst_n, worst) = residuals.iter().cloned().enumerate().fold((0, 0.0), |acc, (n, r)| if r > acc.1 { (n, r) } else { acc });
    Ok(EigenReport { n_max, tol, residuals, worst_n, worst, pass: worst <= tol })
}
