//! Polynomials whose coefficients are square matrices.
//!
//! Multiplication is the noncommutative Cauchy product, so left and right
//! factors keep their order. Trailing coefficients that are exactly zero are
//! stripped after every operation; [`MatrixPolynomial::trimmed`] applies a
//! relative threshold for floating results when the caller knows cancellation
//! is expected.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::poly::Poly;
use crate::scalar::{csv_complex, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial<T> {
    size: usize,
    coeffs: Vec<Mat<T>>,
}

impl<T: Scalar> MatrixPolynomial<T> {
    pub fn zero(size: usize) -> Self {
        MatrixPolynomial { size, coeffs: vec![Mat::zeros(size)] }
    }

    pub fn identity(size: usize) -> Self {
        Self::constant(Mat::identity(size))
    }

    pub fn constant(m: Mat<T>) -> Self {
        MatrixPolynomial { size: m.size(), coeffs: vec![m] }.normalized()
    }

    /// `m * x^power`
    pub fn monomial(m: Mat<T>, power: usize) -> Self {
        let size = m.size();
        let mut coeffs = vec![Mat::zeros(size); power];
        coeffs.push(m);
        MatrixPolynomial { size, coeffs }.normalized()
    }

    pub fn from_coeffs(coeffs: Vec<Mat<T>>) -> Result<Self> {
        let size = coeffs
            .first()
            .map(Mat::size)
            .ok_or_else(|| Error::InvalidParam("empty coefficient list".into()))?;
        if let Some(bad) = coeffs.iter().find(|c| c.size() != size) {
            return Err(Error::SizeMismatch { left: size, right: bad.size() });
        }
        Ok(MatrixPolynomial { size, coeffs }.normalized())
    }

    /// `diag(p_1, ..., p_N)`
    pub fn diagonal(entries: &[Poly<T>]) -> Self {
        let size = entries.len();
        let degree = entries.iter().map(Poly::degree).max().unwrap_or(0);
        let coeffs = (0..=degree)
            .map(|k| Mat::diag(entries.iter().map(|p| p.coeff(k)).collect()))
            .collect();
        MatrixPolynomial { size, coeffs }.normalized()
    }

    /// Places a scalar polynomial at one entry of an otherwise zero matrix.
    pub fn entry(size: usize, i: usize, j: usize, p: &Poly<T>) -> Self {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| {
                let mut m = Mat::zeros(size);
                m[(i, j)] = c.clone();
                m
            })
            .collect();
        MatrixPolynomial { size, coeffs }.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Mat::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    /// Drops trailing coefficients whose max-norm is below `rel` times the
    /// largest coefficient norm. Exact polynomials are returned unchanged.
    pub fn trimmed(mut self, rel: f64) -> Self {
        if T::EXACT {
            return self;
        }
        let cutoff = rel * self.max_coeff_norm();
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().max_norm() <= cutoff {
            self.coeffs.pop();
        }
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat<T>] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Mat<T> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.size))
    }

    pub fn leading(&self) -> &Mat<T> {
        self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Mat::max_norm).fold(0.0, f64::max)
    }

    pub fn entry_poly(&self, i: usize, j: usize) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| c[(i, j)].clone()).collect())
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch { left: self.size, right: other.size });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Ok(MatrixPolynomial { size: self.size, coeffs }.normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) - &other.coeff(k)).collect();
        Ok(MatrixPolynomial { size: self.size, coeffs }.normalized())
    }

    pub fn neg(&self) -> Self {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut coeffs = vec![Mat::zeros(self.size); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(MatrixPolynomial { size: self.size, coeffs }.normalized())
    }

    /// `M * P(x)`
    pub fn left_mul(&self, m: &Mat<T>) -> Self {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(|c| m * c).collect() }
            .normalized()
    }

    /// `P(x) * M`
    pub fn right_mul(&self, m: &Mat<T>) -> Self {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(|c| c * m).collect() }
            .normalized()
    }

    pub fn scale(&self, s: &T) -> Self {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
            .normalized()
    }

    /// `P(x) * x`
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Mat::zeros(self.size));
        coeffs.extend(self.coeffs.iter().cloned());
        MatrixPolynomial { size: self.size, coeffs }
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: &T) -> Mat<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Mat::zeros(self.size), |acc, c| &acc.scale(x) + c)
    }

    /// Column `j` of `P(x)`, evaluated without forming the other columns.
    pub fn evaluate_column(&self, x: &T, j: usize) -> Vec<T> {
        (0..self.size)
            .map(|i| {
                self.coeffs
                    .iter()
                    .rev()
                    .fold(T::zero(), |acc, c| acc * x.clone() + c[(i, j)].clone())
            })
            .collect()
    }

    /// `k`-th derivative.
    pub fn derivative(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if k > self.degree() {
            return Self::zero(self.size);
        }
        let coeffs = (k..self.coeffs.len())
            .map(|p| {
                let falling: i64 = (0..k).map(|i| (p - i) as i64).product();
                self.coeffs[p].scale(&T::from_i64(falling))
            })
            .collect();
        MatrixPolynomial { size: self.size, coeffs }.normalized()
    }

    pub fn adjoint(&self) -> Self {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(Mat::adjoint).collect() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MatrixPolynomial<U> {
        MatrixPolynomial { size: self.size, coeffs: self.coeffs.iter().map(|c| c.map(&f)).collect() }
            .normalized()
    }

    /// Largest coefficient max-norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).map(|k| (&self.coeff(k) - &other.coeff(k)).max_norm()).fold(0.0, f64::max)
    }

    /// One row per power, entries in column-major order, each as `re+imi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.coeffs {
            let row: Vec<String> = (0..self.size)
                .flat_map(|j| (0..self.size).map(move |i| (i, j)))
                .map(|(i, j)| csv_complex(&c[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "size": self.size,
            "coeffs": self.coeffs.iter().map(Mat::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let coeffs: Option<Vec<Mat<T>>> =
            v.get("coeffs")?.as_array()?.iter().map(Mat::from_json).collect();
        let p = Self::from_coeffs(coeffs?).ok()?;
        (v.get("size")?.as_u64()? as usize == p.size).then_some(p)
    }
}
