//! Real eigenpairs of small dense matrices.
//!
//! Up to 3x3 the eigenvalues come from the characteristic polynomial in
//! closed form (polished by Newton steps); larger matrices go through a real
//! Schur decomposition. Eigenvectors are null vectors of `A - lambda I`
//! taken from an SVD.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

/// Relative residual every reported pair satisfies:
/// `|A v - lambda v|_inf <= RESIDUAL_BOUND * |A|_inf`.
pub const RESIDUAL_BOUND: f64 = 1e-9;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("eigenvector for lambda = {value} has residual {residual:e} above bound")]
    Residual { value: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit l1 norm; the last non-negligible component is positive.
    pub vector: DVector<f64>,
}

impl EigenPair {
    pub fn residual(&self, a: &DMatrix<f64>) -> f64 {
        (a * &self.vector - &self.vector * self.value).amax()
    }
}

/// Real eigenpairs sorted by descending modulus, plus complex eigenvalues
/// (both members of each conjugate pair).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub real: Vec<EigenPair>,
    pub complex: Vec<Complex<f64>>,
}

impl Spectrum {
    /// Moduli of every eigenvalue, real ones first in `real` order.
    pub fn moduli(&self) -> Vec<f64> {
        self.real
            .iter()
            .map(|p| p.value.abs())
            .chain(self.complex.iter().map(|z| z.norm()))
            .collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.moduli().into_iter().fold(0.0, f64::max)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.real.iter().map(|p| p.value).collect()
    }
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn real_eigenpairs(a: &DMatrix<f64>) -> Result<Spectrum, EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare(a.nrows(), a.ncols()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Spectrum {
            real: Vec::new(),
            complex: Vec::new(),
        });
    }
    let scale = inf_norm(a).max(f64::MIN_POSITIVE);
    let (mut reals, complex) = eigenvalues(a)?;
    reals.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));

    // Cluster numerically repeated eigenvalues.
    let cluster_tol = 1e-7 * scale.max(1.0);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in reals {
        match clusters.last_mut() {
            Some((c, m)) if (*c - v).abs() <= cluster_tol => {
                *c = (*c * *m as f64 + v) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }

    let bound = RESIDUAL_BOUND * scale;
    let mut real = Vec::new();
    for (value, mult) in clusters {
        for vector in null_vectors(a, value, mult, scale) {
            let pair = EigenPair {
                value,
                vector: normalize(vector),
            };
            let residual = pair.residual(a);
            if residual > bound {
                return Err(EigenError::Residual { value, residual });
            }
            real.push(pair);
        }
    }
    real.sort_by(|p, q| {
        q.value
            .abs()
            .partial_cmp(&p.value.abs())
            .unwrap_or(Ordering::Equal)
            .then(q.value.partial_cmp(&p.value).unwrap_or(Ordering::Equal))
    });
    Ok(Spectrum { real, complex })
}

/// Scales to unit l1 norm with the last non-negligible component positive.
fn normalize(v: DVector<f64>) -> DVector<f64> {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    let mut v = v / l1;
    let amax = v.amax();
    let last = v.iter().rev().find(|x| x.abs() > 1e-12 * amax).copied();
    if last.is_some_and(|x| x < 0.0) {
        v.neg_mut();
    }
    v
}

/// Up to `mult` orthonormal vectors spanning (approximately) the kernel of
/// `A - value I`; always at least one.
fn null_vectors(a: &DMatrix<f64>, value: f64, mult: usize, scale: f64) -> Vec<DVector<f64>> {
    let n = a.nrows();
    let shifted = a - DMatrix::identity(n, n) * value;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap_or(Ordering::Equal)
    });
    let kernel_tol = 1e-8 * scale.max(1.0);
    order
        .iter()
        .enumerate()
        .take_while(|(k, &i)| *k == 0 || (*k < mult && svd.singular_values[i] <= kernel_tol))
        .map(|(_, &i)| v_t.row(i).transpose())
        .collect()
}

/// Real and complex eigenvalues.
fn eigenvalues(a: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<Complex<f64>>), EigenError> {
    match a.nrows() {
        1 => Ok((vec![a[(0, 0)]], Vec::new())),
        2 => {
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            Ok(quadratic_roots(-tr, det))
        }
        3 => Ok(cubic_eigenvalues(a)),
        _ => schur_eigenvalues(a),
    }
}

/// Roots of `x^2 + b x + c`.
fn quadratic_roots(b: f64, c: f64) -> (Vec<f64>, Vec<Complex<f64>>) {
    let disc = b * b - 4.0 * c;
    let tol = 1e-14 * (b * b).max(c.abs()).max(1.0);
    if disc >= -tol {
        let s = disc.max(0.0).sqrt();
        // Avoid cancellation: q = -(b + sign(b) s) / 2, roots q and c / q.
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            return (vec![0.0, 0.0], Vec::new());
        }
        let (r1, r2) = (q, c / q);
        (vec![r1, r2], Vec::new())
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        (Vec::new(), vec![Complex::new(re, im), Complex::new(re, -im)])
    }
}

fn cubic_eigenvalues(a: &DMatrix<f64>) -> (Vec<f64>, Vec<Complex<f64>>) {
    let tr = a.trace();
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
        + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let det = a.determinant();
    // lambda^3 + c2 lambda^2 + c1 lambda + c0
    let (c2, c1, c0) = (-tr, minors, -det);
    let poly = |x: f64| ((x + c2) * x + c1) * x + c0;
    let dpoly = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    let polish = |mut x: f64| {
        for _ in 0..8 {
            let d = dpoly(x);
            if d == 0.0 {
                break;
            }
            let step = poly(x) / d;
            let next = x - step;
            if poly(next).abs() >= poly(x).abs() {
                break;
            }
            x = next;
        }
        x
    };

    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    let scale = (c2.abs().max(c1.abs().sqrt()).max(c0.abs().cbrt())).max(1.0);
    if disc > 1e-12 * scale.powi(6) && p < 0.0 {
        // Three distinct real roots.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let roots = (0..3)
            .map(|k| polish(m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift))
            .collect();
        return (roots, Vec::new());
    }
    // One real root by Cardano; deflate for the rest.
    let half_q = q / 2.0;
    let inner = (half_q * half_q + p * p * p / 27.0).max(0.0).sqrt();
    let t = (-half_q + inner).cbrt() + (-half_q - inner).cbrt();
    let r = polish(t - shift);
    let b = c2 + r;
    let c = c1 + r * b;
    let (mut reals, complex) = quadratic_roots(b, c);
    reals.iter_mut().for_each(|x| *x = polish(*x));
    reals.push(r);
    (reals, complex)
}

fn schur_eigenvalues(a: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<Complex<f64>>), EigenError> {
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(EigenError::NoConvergence)?;
    let scale = inf_norm(a).max(1.0);
    let mut reals = Vec::new();
    let mut complex = Vec::new();
    for z in schur.complex_eigenvalues().iter() {
        if z.im.abs() <= 1e-12 * scale {
            reals.push(z.re);
        } else {
            complex.push(*z);
        }
    }
    Ok((reals, complex))
}
