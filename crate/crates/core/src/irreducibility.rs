//! Order-zero symmetries `F W(x) = W(x) F*` and explicit reductions.
//!
//! A non-scalar solution `F` is what a reduction of `W` to smaller blocks
//! needs. Only this order-zero test is made; a dimension of one is reported
//! as "no order-zero reduction detected", not as a proof of irreducibility.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use statrs::distribution::{ContinuousCDF, Gamma, Normal};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar_families::{ScalarFamily, ScalarWeightSpec};
use crate::weight::WeightSpec;

/// Relative singular value below which a direction counts as null.
pub const NULL_TOL: f64 = 1e-10;
/// Tolerance for basis elements at fresh points.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Probability mass left outside the sampling window of an unbounded support.
const TAIL_MASS: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySpace {
    #[serde(serialize_with = "ser_basis")]
    pub basis: Vec<Mat<Complex64>>,
    pub dimension: usize,
    pub sample_points: Vec<f64>,
    /// Worst relative residual of a basis element at the fresh points.
    pub validation_residual: f64,
    pub validated: bool,
    pub verdict: String,
}

fn ser_basis<S: serde::Serializer>(basis: &[Mat<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Value> = basis.iter().map(Mat::to_json).collect();
    v.serialize(s)
}

/// Sampling window `(lo, hi)` inside the common support, cut where every
/// weight has at most `1e-12` of its mass beyond.
pub fn sample_window(spec: &WeightSpec) -> Result<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut cut_lo = f64::INFINITY;
    let mut cut_hi = f64::NEG_INFINITY;
    for w in &spec.weights {
        let (a, b) = w.support();
        lo = lo.max(a);
        hi = hi.min(b);
        let (ql, qh) = mass_window(w)?;
        cut_lo = cut_lo.min(ql);
        cut_hi = cut_hi.max(qh);
    }
    if !(lo < hi) {
        return Err(Error::InvalidParam("the scalar weights have no common support".into()));
    }
    Ok((lo.max(cut_lo), hi.min(cut_hi)))
}

fn bad<E: std::fmt::Display>(e: E) -> Error {
    Error::InvalidParam(e.to_string())
}

fn mass_window(w: &ScalarWeightSpec) -> Result<(f64, f64)> {
    Ok(match &w.family {
        ScalarFamily::Hermite { b } => {
            let d = Normal::new(*b, std::f64::consts::FRAC_1_SQRT_2).map_err(bad)?;
            (d.inverse_cdf(TAIL_MASS / 2.0), d.inverse_cdf(1.0 - TAIL_MASS / 2.0))
        }
        ScalarFamily::Laguerre { alpha } => {
            let d = Gamma::new(alpha + 1.0, 1.0).map_err(bad)?;
            (0.0, d.inverse_cdf(1.0 - TAIL_MASS))
        }
        ScalarFamily::Jacobi { .. } => (-1.0, 1.0),
        ScalarFamily::Custom { .. } => {
            return Err(Error::Unsupported("moment-defined weights have no pointwise values".into()))
        }
    })
}

/// `n` points in the open window: Chebyshev nodes when the support is
/// bounded, a tanh-stretched uniform grid otherwise. `offset` in `(0, 1)`
/// moves the grid, giving fresh points for validation.
pub fn sample_points(spec: &WeightSpec, n: usize, offset: f64) -> Result<Vec<f64>> {
    let (lo, hi) = sample_window(spec)?;
    let bounded = spec.weights.iter().all(|w| {
        let (a, b) = w.support();
        a.is_finite() && b.is_finite()
    });
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    Ok((0..n)
        .map(|k| {
            let t = (k as f64 + offset) / n as f64;
            if bounded {
                mid - half * (std::f64::consts::PI * t).cos()
            } else {
                let u = 2.0 * t - 1.0;
                mid + half * (2.0 * u).tanh() / 2f64.tanh()
            }
        })
        .collect())
}

/// Null space of the real system for `X` (`sign = -1`: `X W - W X^T = 0`,
/// rows `i < j`) or `Y` (`sign = 1`: `Y W + W Y^T = 0`, rows `i <= j`).
fn null_space(ws: &[Mat<f64>], sign: f64) -> Vec<Mat<f64>> {
    let n = ws[0].size();
    let nn = n * n;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for w in ws {
        for i in 0..n {
            let start = if sign < 0.0 { i + 1 } else { i };
            for j in start..n {
                let mut row = vec![0.0; nn];
                for k in 0..n {
                    row[i * n + k] += w[(k, j)];
                    row[j * n + k] += sign * w[(i, k)];
                }
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|v| *v /= norm);
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return (0..nn).map(|k| Mat::from_fn(n, |r, c| if r * n + c == k { 1.0 } else { 0.0 })).collect();
    }
    let a = DMatrix::from_fn(rows.len(), nn, |r, c| rows[r][c]);
    let r = a.qr().r();
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut null: Vec<Mat<f64>> = Vec::new();
    // R may have fewer rows than unknowns; missing directions are null
    let rank_rows = v_t.nrows();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= NULL_TOL * smax {
            null.push(Mat::from_fn(n, |r, c| v_t[(k, r * n + c)]));
        }
    }
    if rank_rows < nn {
        let full = DMatrix::from_fn(nn, nn, |r, c| if r < rank_rows { v_t[(r, c)] } else if r == c { 1.0 } else { 0.0 });
        let q = full.transpose().qr().q();
        for k in rank_rows..nn {
            null.push(Mat::from_fn(n, |r, c| q[(r * n + c, k)]));
        }
    }
    null
}

fn symmetry_residual(f: &Mat<Complex64>, w: &Mat<f64>) -> f64 {
    let wc = w.map(|v| Complex64::new(*v, 0.0));
    let lhs = f * &wc;
    let rhs = &wc * &f.adjoint();
    (&lhs - &rhs).frobenius() / (f.frobenius() * w.frobenius()).max(f64::MIN_POSITIVE)
}

/// Basis of `{F : F W(x) = W(x) F*}` from `n_points` samples, validated at
/// twice as many fresh points.
pub fn order_zero_symmetries(spec: &WeightSpec, n_points: usize) -> Result<SymmetrySpace> {
    spec.validate()?;
    let n = spec.size;
    if n_points < 2 * n * n + 2 {
        return Err(Error::InvalidParam(format!("need at least {} sample points, got {n_points}", 2 * n * n + 2)));
    }
    let points = sample_points(spec, n_points, 0.5)?;
    let ws: Vec<Mat<f64>> = points.iter().map(|&x| spec.eval(x)).collect::<Result<_>>()?;
    let mut basis: Vec<Mat<Complex64>> =
        null_space(&ws, -1.0).into_iter().map(|x| x.map(|v| Complex64::new(*v, 0.0))).collect();
    basis.extend(null_space(&ws, 1.0).into_iter().map(|y| y.map(|v| Complex64::new(0.0, *v))));
    let fresh = sample_points(spec, 2 * n_points, 0.25)?;
    let mut worst: f64 = 0.0;
    for &x in &fresh {
        let w = spec.eval(x)?;
        for f in &basis {
            worst = worst.max(symmetry_residual(f, &w));
        }
    }
    let dimension = basis.len();
    let verdict = match dimension {
        0 => "no solution found; the identity should always solve the system".to_string(),
        1 => "only scalar order-zero symmetries: no order-zero reduction detected".to_string(),
        d => format!("{d}-dimensional order-zero symmetry space: W reduces"),
    };
    Ok(SymmetrySpace {
        basis,
        dimension,
        sample_points: points,
        validation_residual: worst,
        validated: worst <= VALIDATION_TOL,
        verdict,
    })
}

/// Whether `w_i / w_j` is a rational function, when that can be decided
/// from the family parameters; `None` for moment-defined weights.
pub fn ratio_is_rational(wi: &ScalarWeightSpec, wj: &ScalarWeightSpec) -> Option<bool> {
    let int = |v: f64| (v - v.round()).abs() < 1e-12;
    Some(match (&wi.family, &wj.family) {
        (ScalarFamily::Hermite { b: x }, ScalarFamily::Hermite { b: y }) => x == y,
        (ScalarFamily::Laguerre { alpha: x }, ScalarFamily::Laguerre { alpha: y }) => int(x - y),
        (ScalarFamily::Jacobi { alpha: a1, beta: b1 }, ScalarFamily::Jacobi { alpha: a2, beta: b2 }) => {
            int(a1 - a2) && int(b1 - b2)
        }
        (ScalarFamily::Custom { .. }, _) | (_, ScalarFamily::Custom { .. }) => return None,
        _ => false,
    })
}

/// True when every pair of distinct scalar weights has a non-rational
/// ratio, a sufficient condition for irreducibility.
pub fn all_ratios_irrational(spec: &WeightSpec) -> Option<bool> {
    let w = &spec.weights;
    let mut all = true;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            all &= !ratio_is_rational(&w[i], &w[j])?;
        }
    }
    Some(all)
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction2x2 {
    pub b: f64,
    pub c: f64,
    #[serde(serialize_with = "ser_mat")]
    pub m: Mat<f64>,
    pub diagonal: String,
    /// Largest `|(M W M*)_{12}| / |M W M*|` over the check points.
    pub off_diagonal: f64,
    /// Largest relative error of the diagonal against its closed form.
    pub diagonal_error: f64,
}

fn ser_mat<S: serde::Serializer>(m: &Mat<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_json().serialize(s)
}

/// Least squares polynomial of degree `deg` through `(x, y)`.
fn fit(xs: &[f64], ys: &[f64], deg: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(xs.len(), deg + 1, |r, c| xs[r].powi(c as i32));
    let y = nalgebra::DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&y, 1e-14).expect("both factors computed");
    sol.iter().cloned().collect()
}

fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// Looks for `w_1 = -a^2 w_2 (x - b)(x - c)` with the support inside
/// `[b, c]`, and returns the diagonalizing `M` when found.
pub fn try_reduce_2x2(spec: &WeightSpec) -> Result<Option<Reduction2x2>> {
    spec.validate()?;
    if spec.size != 2 {
        return Err(Error::SizeMismatch { left: 2, right: spec.size });
    }
    if !spec.all_classical() {
        return Err(Error::Unsupported("the ratio test needs pointwise scalar weights".into()));
    }
    let (w1, w2) = (&spec.weights[0], &spec.weights[1]);
    if w1.support() != w2.support() {
        return Ok(None);
    }
    let a = spec.a[0];
    let ratio = |x: f64| w1.eval(x).unwrap_or(0.0) / w2.eval(x).unwrap_or(1.0);
    let fit_pts = sample_points(spec, 5, 0.5)?;
    let check_pts = sample_points(spec, 20, 0.3)?;
    let coeffs = fit(&fit_pts, &fit_pts.iter().map(|&x| ratio(x)).collect::<Vec<_>>(), 2);
    let fits = check_pts.iter().all(|&x| {
        let r = ratio(x);
        (eval_poly(&coeffs, x) - r).abs() <= 1e-10 * r.abs().max(f64::MIN_POSITIVE)
    });
    let lead = -coeffs[2];
    if !fits || (lead - a * a).abs() > 1e-10 * a * a {
        return Ok(None);
    }
    // (x - b)(x - c) = x^2 + (k1/k2) x + k0/k2
    let (p, q) = (coeffs[1] / coeffs[2], coeffs[0] / coeffs[2]);
    let disc = p * p / 4.0 - q;
    if disc <= 0.0 {
        return Ok(None);
    }
    let (b, c) = (-p / 2.0 - disc.sqrt(), -p / 2.0 + disc.sqrt());
    let (lo, hi) = w1.support();
    if lo < b - 1e-12 || hi > c + 1e-12 {
        return Ok(None);
    }
    let m = Mat::from_rows(vec![vec![1.0 / (a * (b - c)), -b / (b - c)], vec![1.0, -a * c]]);
    let (mut off, mut diag_err) = (0.0f64, 0.0f64);
    for &x in &check_pts {
        let w = spec.eval(x)?;
        let d = &(&m * &w) * &m.transpose();
        let w2x = w2.eval(x).unwrap_or(0.0);
        let want = [w2x * (x - b) / (c - b), a * a * w2x * (c - x) * (c - b)];
        off = off.max(d[(0, 1)].abs().max(d[(1, 0)].abs()) / d.max_norm());
        for (k, v) in want.iter().enumerate() {
            diag_err = diag_err.max((d[(k, k)] - v).abs() / v.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(Some(Reduction2x2 {
        b,
        c,
        m,
        diagonal: format!(
            "diag(w2(x) (x {} {:.6}) / {:.6}, {:.6} w2(x) ({:.6} - x))",
            if b < 0.0 { '+' } else { '-' },
            b.abs(),
            c - b,
            a * a * (c - b),
            c
        ),
        off_diagonal: off,
        diagonal_error: diag_err,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction3x3 {
    #[serde(serialize_with = "ser_mat")]
    pub m: Mat<f64>,
    pub prefactor: f64,
    pub blocks: String,
    /// Largest relative deviation of `M W M*` from the block form.
    pub residual: f64,
}

/// `M W M* = diag(((a1^2 + a2^2)/a2^2) w_1, W_2)` when `w_1 = w_3`, where
/// `W_2 = [[w_2, a2 x w_2], [a2 x w_2, a2^2 x^2 w_2 + a2^2/(a1^2 + a2^2) w_1]]`.
pub fn try_reduce_3x3_w1w3(spec: &WeightSpec) -> Result<Reduction3x3> {
    spec.validate()?;
    if spec.size != 3 {
        return Err(Error::SizeMismatch { left: 3, right: spec.size });
    }
    if spec.weights[0] != spec.weights[2] {
        return Err(Error::Unsupported("the reduction needs w_1 = w_3".into()));
    }
    let (a1, a2) = (spec.a[0], spec.a[1]);
    let s = a1 * a1 + a2 * a2;
    let m = Mat::from_rows(vec![
        vec![1.0, 0.0, -a1 / a2],
        vec![0.0, 1.0, 0.0],
        vec![a1 * a2 / s, 0.0, a2 * a2 / s],
    ]);
    let prefactor = s / (a2 * a2);
    let mut residual = 0.0f64;
    if spec.all_classical() {
        for x in sample_points(spec, 20, 0.5)? {
            let w = spec.eval(x)?;
            let d = &(&m * &w) * &m.transpose();
            let w1 = spec.weights[0].eval(x).unwrap_or(0.0);
            let w2 = spec.weights[1].eval(x).unwrap_or(0.0);
            let want = Mat::from_rows(vec![
                vec![prefactor * w1, 0.0, 0.0],
                vec![0.0, w2, a2 * x * w2],
                vec![0.0, a2 * x * w2, a2 * a2 * x * x * w2 + a2 * a2 / s * w1],
            ]);
            residual = residual.max((&d - &want).max_norm() / want.max_norm());
        }
    }
    Ok(Reduction3x3 {
        m,
        prefactor,
        blocks: format!(
            "{prefactor} w1(x) (+) [[w2, {a2} x w2], [{a2} x w2, {} x^2 w2 + {} w1]]",
            a2 * a2,
            a2 * a2 / s
        ),
        residual,
    })
}
