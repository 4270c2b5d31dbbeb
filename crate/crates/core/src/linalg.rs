//! Thin wrappers over faer for the dense kernels used across the crate.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the dense cap {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenpair {index} has backward error {residual:e}")]
    Residual { index: usize, residual: f64 },
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn check_square(a: &Mat<C64>) -> Result<(), LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    let finite = (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].is_finite()));
    if !finite {
        return Err(LinalgError::NonFinite);
    }
    Ok(())
}

/// Real part if every entry is real.
fn as_real(a: &Mat<C64>) -> Option<Mat<f64>> {
    let real = (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].im == 0.0));
    real.then(|| Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re))
}

pub fn eigenvalues(a: &Mat<C64>) -> Result<Vec<C64>, LinalgError> {
    check_square(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let out = match as_real(a) {
        Some(r) => r.eigenvalues(),
        None => a.eigenvalues(),
    };
    out.map_err(|_| LinalgError::NoConvergence)
}

/// Eigenvalues and right eigenvectors (columns, unit norm).
///
/// The real solver can return inaccurate vectors for repeated complex
/// pairs, so real input whose backward error is too large is redone with
/// the complex solver.
pub fn eigen(a: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>), LinalgError> {
    check_square(a)?;
    if a.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    if let Some(r) = as_real(a) {
        let evd = r.eigen().map_err(|_| LinalgError::NoConvergence)?;
        let out = normalized_pairs(evd.S().column_vector().iter().copied(), evd.U().to_owned());
        if max_backward_error(a, &out.0, &out.1) <= EIGEN_BACKWARD_TOL {
            return Ok(out);
        }
    }
    let evd = a.eigen().map_err(|_| LinalgError::NoConvergence)?;
    Ok(normalized_pairs(evd.S().column_vector().iter().copied(), evd.U().to_owned()))
}

const EIGEN_BACKWARD_TOL: f64 = 1e-12;

fn normalized_pairs(values: impl Iterator<Item = C64>, mut vectors: Mat<C64>) -> (Vec<C64>, Mat<C64>) {
    let n = vectors.nrows();
    for j in 0..vectors.ncols() {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
    (values.collect(), vectors)
}

/// Largest `‖A v − λ v‖` over unit eigenvectors, relative to `‖A‖_F`.
pub fn max_backward_error(a: &Mat<C64>, values: &[C64], vectors: &Mat<C64>) -> f64 {
    let av = a * vectors;
    let mut worst = 0.0f64;
    for (k, &lambda) in values.iter().enumerate() {
        let r = (0..a.nrows()).map(|i| (av[(i, k)] - lambda * vectors[(i, k)]).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(r);
    }
    worst / frobenius(a).max(f64::MIN_POSITIVE)
}

pub fn eigenvalues_real(a: &Mat<f64>) -> Result<Vec<C64>, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues().map_err(|_| LinalgError::NoConvergence)
}

/// 2-norm condition number.
pub fn condition_number(a: &Mat<C64>) -> f64 {
    match a.singular_values() {
        Ok(s) if !s.is_empty() => {
            let min = *s.last().unwrap();
            if min == 0.0 {
                f64::INFINITY
            } else {
                s[0] / min
            }
        }
        _ => f64::INFINITY,
    }
}

pub fn frobenius(a: &Mat<C64>) -> f64 {
    a.norm_l2()
}

pub fn norm_1(a: &Mat<C64>) -> f64 {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Solves `a x = b` by partial-pivot LU.
pub fn solve(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a.partial_piv_lu().solve(b)
}

pub fn inverse(a: &Mat<C64>) -> Mat<C64> {
    a.partial_piv_lu().inverse()
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    let norm = norm_1(a);
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let scaled = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    // ‖A/2^s‖ ≤ 1/4, so 18 terms reach roundoff
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=18 {
        term = &term * &scaled;
        let inv = 1.0 / k as f64;
        term.as_mut().col_iter_mut().for_each(|col| col.iter_mut().for_each(|x| *x *= inv));
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Multiset distance: largest distance from an element of `a` to its partner
/// under greedy nearest matching in `b`. `INFINITY` on length mismatch.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].re.total_cmp(&a[j].re).then(a[i].im.total_cmp(&a[j].im)));
    let mut worst = 0.0f64;
    for i in order {
        let (best, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, z)| (k, (a[i] - z).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("lengths match");
        used[best] = true;
        worst = worst.max(d);
    }
    worst
}
