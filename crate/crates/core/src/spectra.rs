//! Spectral statistics of non-Hermitian generators and a pseudo-Hermitian
//! random-matrix ensemble.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, c, LinalgError, C64};

pub const DEFAULT_EIG_CAP: usize = 16384;
/// Relative backward error allowed for returned eigenpairs.
pub const BACKWARD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{subset} subset has {got} eigenvalues, need at least {need}")]
    TooFew { subset: &'static str, got: usize, need: usize },
    #[error("spectrum has no nonreal eigenvalues")]
    AllReal,
    #[error("spectrum contains non-finite values")]
    NonFinite,
    #[error("ensemble size must be a power of two ≥ 2, got {0}")]
    BadSize(usize),
    #[error("chi must be finite and nonnegative")]
    BadChi,
}

#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    eigenvalues: Vec<C64>,
    eigenvectors: Option<Mat<C64>>,
    source: String,
}

impl ComplexSpectrum {
    pub fn new(eigenvalues: Vec<C64>, source: impl Into<String>) -> Result<Self, SpectraError> {
        if eigenvalues.iter().any(|z| !z.is_finite()) {
            return Err(SpectraError::NonFinite);
        }
        Ok(ComplexSpectrum { eigenvalues, eigenvectors: None, source: source.into() })
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&Mat<C64>> {
        self.eigenvectors.as_ref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest modulus.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `1e−10 · max|λ|`.
    pub fn default_real_tol(&self) -> f64 {
        1e-10 * self.scale()
    }

    /// Hausdorff distance between the spectrum and its complex conjugate.
    pub fn conjugation_defect(&self) -> f64 {
        let ev = &self.eigenvalues;
        ev.iter()
            .map(|z| ev.iter().map(|w| (z.conj() - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

/// Full eigendecomposition with the default dimension cap.
pub fn eigendecompose(matrix: &Mat<C64>, with_vectors: bool) -> Result<ComplexSpectrum, SpectraError> {
    eigendecompose_with_cap(matrix, with_vectors, DEFAULT_EIG_CAP)
}

pub fn eigendecompose_with_cap(matrix: &Mat<C64>, with_vectors: bool, cap: usize) -> Result<ComplexSpectrum, SpectraError> {
    linalg::check_square(matrix)?;
    let n = matrix.nrows();
    if n > cap {
        return Err(LinalgError::TooLarge { dim: n, max: cap }.into());
    }
    if !with_vectors {
        return ComplexSpectrum::new(linalg::eigenvalues(matrix)?, "dense");
    }
    let (values, vectors) = linalg::eigen(matrix)?;
    let norm = linalg::frobenius(matrix).max(f64::MIN_POSITIVE);
    let av = matrix * &vectors;
    for (k, &lambda) in values.iter().enumerate() {
        let residual = (0..n).map(|i| (av[(i, k)] - lambda * vectors[(i, k)]).norm_sqr()).sum::<f64>().sqrt() / norm;
        if !(residual < BACKWARD_TOL) {
            return Err(LinalgError::Residual { index: k, residual }.into());
        }
    }
    let mut spec = ComplexSpectrum::new(values, "dense")?;
    spec.eigenvectors = Some(vectors);
    Ok(spec)
}

pub fn is_real(z: C64, real_tol: f64) -> bool {
    z.im.abs() < real_tol
}

/// Fraction of eigenvalues with `|Im λ| < real_tol`.
pub fn real_fraction(spec: &ComplexSpectrum, real_tol: f64) -> f64 {
    if spec.is_empty() {
        return 0.0;
    }
    spec.eigenvalues.iter().filter(|z| is_real(**z, real_tol)).count() as f64 / spec.len() as f64
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// `sqrt(1 − (b/a)²)` from the spreads of the nonreal eigenvalues, with
/// `a` the larger standard deviation.
pub fn eccentricity(spec: &ComplexSpectrum, real_tol: f64) -> Result<f64, SpectraError> {
    let nonreal: Vec<C64> = spec.eigenvalues.iter().copied().filter(|z| !is_real(*z, real_tol)).collect();
    if nonreal.is_empty() {
        return Err(SpectraError::AllReal);
    }
    if nonreal.len() < 2 {
        return Err(SpectraError::TooFew { subset: "nonreal", got: nonreal.len(), need: 2 });
    }
    let (_, sr) = mean_std(nonreal.iter().map(|z| z.re));
    let (_, si) = mean_std(nonreal.iter().map(|z| z.im));
    let (a, b) = (sr.max(si), sr.min(si));
    Ok((1.0 - (b / a).powi(2)).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioOptions {
    /// Defaults to [`ComplexSpectrum::default_real_tol`].
    pub real_tol: Option<f64>,
    /// Fraction of each subset kept by the central ellipse; `1.0` disables it.
    pub keep_fraction: f64,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions { real_tol: None, keep_fraction: 1.0 / 3.0 }
    }
}

/// Ellipse used to select the middle of one subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseFilter {
    pub subset: &'static str,
    pub center_re: f64,
    pub center_im: f64,
    /// Semi-axes along the real and imaginary directions.
    pub semi_re: f64,
    pub semi_im: f64,
    pub kept: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumStats {
    pub f_r: f64,
    /// `None` when every eigenvalue is real.
    pub eccentricity: Option<f64>,
    /// Ratios of nonreal eigenvalues, half-planes pooled.
    pub complex_ratios: Vec<C64>,
    /// Signed ratios on the real line, in `[−1, 1]`.
    pub real_ratios: Vec<f64>,
    pub filters: Vec<EllipseFilter>,
}

/// Indices of the central `keep` fraction, by distance normalized to the
/// per-axis standard deviations. Growing an ellipse with fixed aspect until
/// it holds the target count selects exactly these points.
fn central_subset(points: &[C64], keep: f64, subset: &'static str) -> (Vec<usize>, EllipseFilter) {
    let n = points.len();
    let (cr, sr) = mean_std(points.iter().map(|z| z.re));
    let (ci, si) = mean_std(points.iter().map(|z| z.im));
    let (sr, si) = (sr.max(f64::MIN_POSITIVE), si.max(f64::MIN_POSITIVE));
    let radius = |z: &C64| {
        let dr = (z.re - cr) / sr;
        let di = if si > f64::MIN_POSITIVE { (z.im - ci) / si } else { 0.0 };
        (dr * dr + di * di).sqrt()
    };
    let target = ((keep * n as f64).ceil() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radius(&points[a]).total_cmp(&radius(&points[b])).then(a.cmp(&b)));
    order.truncate(target);
    let scale = order.last().map(|&i| radius(&points[i])).unwrap_or(0.0);
    order.sort_unstable();
    let filter = EllipseFilter {
        subset,
        center_re: cr,
        center_im: ci,
        semi_re: scale * sr,
        semi_im: if si > f64::MIN_POSITIVE { scale * si } else { 0.0 },
        kept: order.len(),
        total: n,
    };
    (order, filter)
}

/// Nearest and next-nearest neighbours of `points[i]` within `points`.
fn two_nearest(points: &[C64], i: usize) -> (usize, usize) {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = (usize::MAX, f64::INFINITY);
    for (j, p) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = (p - points[i]).norm();
        if d < best.1 {
            second = best;
            best = (j, d);
        } else if d < second.1 {
            second = (j, d);
        }
    }
    (best.0, second.0)
}

fn ratio_at(points: &[C64], i: usize) -> C64 {
    let (nn, nnn) = two_nearest(points, i);
    let den = points[nnn] - points[i];
    if den.norm() == 0.0 {
        // NNN coincides, so NN does too; treat the degenerate ratio as 1
        return c(1.0, 0.0);
    }
    (points[nn] - points[i]) / den
}

fn subset_ratios(points: &[C64], keep: f64, subset: &'static str) -> Option<(Vec<C64>, EllipseFilter)> {
    if points.len() < 3 {
        return None;
    }
    let (idx, filter) = central_subset(points, keep, subset);
    Some((idx.iter().map(|&i| ratio_at(points, i)).collect(), filter))
}

/// Spacing-ratio statistics. Real and nonreal eigenvalues are treated
/// separately, and each half-plane of the nonreal part on its own.
/// Subsets with fewer than three members are skipped.
pub fn spacing_ratios(spec: &ComplexSpectrum, opts: RatioOptions) -> Result<SpectrumStats, SpectraError> {
    let tol = opts.real_tol.unwrap_or_else(|| spec.default_real_tol());
    let ev = spec.eigenvalues();
    let real: Vec<C64> = ev.iter().filter(|z| is_real(**z, tol)).map(|z| c(z.re, 0.0)).collect();
    let upper: Vec<C64> = ev.iter().copied().filter(|z| !is_real(*z, tol) && z.im > 0.0).collect();
    let lower: Vec<C64> = ev.iter().copied().filter(|z| !is_real(*z, tol) && z.im < 0.0).collect();

    let mut filters = Vec::new();
    let mut complex_ratios = Vec::new();
    for (pts, name) in [(&upper, "upper"), (&lower, "lower")] {
        if let Some((r, f)) = subset_ratios(pts, opts.keep_fraction, name) {
            complex_ratios.extend(r);
            filters.push(f);
        }
    }
    let mut real_ratios = Vec::new();
    if let Some((r, f)) = subset_ratios(&real, opts.keep_fraction, "real") {
        real_ratios.extend(r.into_iter().map(|z| z.re));
        filters.push(f);
    }
    if filters.is_empty() {
        let got = real.len().max(upper.len()).max(lower.len());
        return Err(SpectraError::TooFew { subset: "every", got, need: 3 });
    }
    Ok(SpectrumStats {
        f_r: real_fraction(spec, tol),
        eccentricity: eccentricity(spec, tol).ok(),
        complex_ratios,
        real_ratios,
        filters,
    })
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, std_err: f64::NAN, count: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        MeanEstimate { mean, std_err: (var / n as f64).sqrt(), count: n }
    }

    /// Significance of `self.mean − other.mean` in combined standard errors.
    pub fn excess_over(&self, other: &MeanEstimate) -> f64 {
        (self.mean - other.mean) / self.std_err.hypot(other.std_err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonGeometry {
    /// Independent points on a segment.
    Line,
    /// Independent points in a square.
    Plane,
}

/// Mean `|z|` for `n` independent uniform points per sample, run through
/// the same central filter as [`spacing_ratios`].
pub fn poisson_baseline(geometry: PoissonGeometry, n: usize, samples: usize, seed: u64, keep_fraction: f64) -> MeanEstimate {
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
            let pts: Vec<C64> = (0..n)
                .map(|_| match geometry {
                    PoissonGeometry::Line => c(rng.random::<f64>(), 0.0),
                    PoissonGeometry::Plane => c(rng.random::<f64>(), rng.random::<f64>()),
                })
                .collect();
            subset_ratios(&pts, keep_fraction, "poisson")
                .map(|(r, _)| r.into_iter().map(|z| z.norm()).collect::<Vec<_>>())
                .unwrap_or_default()
        })
        .collect();
    MeanEstimate::from_values(&values)
}

/// Spin-parity signature `(−1)^{popcount(i)}`.
pub fn parity_signature(n: usize) -> Vec<i8> {
    (0..n).map(|i| if i.count_ones() % 2 == 0 { 1 } else { -1 }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmtSample {
    pub n: usize,
    pub chi: f64,
    pub seed: u64,
    /// Row-major dense matrix.
    pub matrix: Vec<f64>,
}

impl RmtSample {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    pub fn to_mat(&self) -> Mat<C64> {
        Mat::from_fn(self.n, self.n, |i, j| c(self.get(i, j), 0.0))
    }

    /// Exact check of `ηAη = Aᵀ`.
    pub fn is_pseudo_hermitian(&self) -> bool {
        let eta = parity_signature(self.n);
        (0..self.n).all(|i| (0..self.n).all(|j| (eta[i] * eta[j]) as f64 * self.get(i, j) == self.get(j, i)))
    }

    pub fn spectrum(&self) -> Result<ComplexSpectrum, SpectraError> {
        let m = Mat::from_fn(self.n, self.n, |i, j| self.get(i, j));
        ComplexSpectrum::new(linalg::eigenvalues_real(&m)?, format!("rmt n={} chi={} seed={}", self.n, self.chi, self.seed))
    }
}

/// `A = χ(PHP + QHQ) + (PHQ − QHP)` with `H = (X + Xᵀ)/2`, `X` standard
/// normal drawn row by row from ChaCha8 seeded with `seed`, and `P`, `Q`
/// the even and odd spin-parity projectors.
pub fn rmt_sample(n: usize, chi: f64, seed: u64) -> Result<RmtSample, SpectraError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(SpectraError::BadSize(n));
    }
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(SpectraError::BadChi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    let eta = parity_signature(n);
    let mut matrix = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let h = 0.5 * (x[i * n + j] + x[j * n + i]);
            matrix[i * n + j] = match (eta[i], eta[j]) {
                (a, b) if a == b => chi * h,
                (1, _) => h,
                _ => -h,
            };
        }
    }
    Ok(RmtSample { n, chi, seed, matrix })
}

/// Samples with seeds `base_seed + index`.
pub fn rmt_samples(n: usize, chi: f64, base_seed: u64, count: usize) -> Result<Vec<RmtSample>, SpectraError> {
    (0..count).into_par_iter().map(|s| rmt_sample(n, chi, base_seed.wrapping_add(s as u64))).collect()
}
