//! Exact solution of the open Ising chain with an imaginary transverse field.
//!
//! The chain has `n_sites = M + 1` spins, Ising coupling `J`, bulk field
//! `iκ` on sites `2..=M` and optional edge fields (`ζ_L`, `ζ_R`). Quadratic
//! modes come from `C = (A+B)(A−B)`; with `μ = −iκ` its eigenvalues are
//! `λ = J² + μ² − 2μJ cos k` for momenta `k` fixed by a Chebyshev secular
//! equation.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, c, LinalgError, C64};
use crate::pauli::DENSE_MAX_QUBITS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TfimError {
    #[error("invalid chain: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("root finder left residual {residual:e} at mode {index}")]
    NoConvergence { index: usize, residual: f64 },
    #[error("operation not defined for this choice of edge fields")]
    WrongEdgeCase,
    #[error("momentum {0} is not a root of the secular equation")]
    NotARoot(C64),
    #[error("exceptional point: ε_k vanishes")]
    ExceptionalPoint,
}

/// Ising chain parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimSpec {
    pub n_sites: usize,
    pub j: f64,
    pub kappa: f64,
    pub zeta_left: bool,
    pub zeta_right: bool,
    /// Eigenvalue of `∏σᶻ` selecting the physical sector.
    pub sector: i8,
}

impl TfimSpec {
    pub fn new(n_sites: usize, j: f64, kappa: f64, zeta_left: bool, zeta_right: bool) -> Self {
        TfimSpec { n_sites, j, kappa, zeta_left, zeta_right, sector: 1 }
    }

    /// `J = cos(θπ/2)`, `κ = sin(θπ/2)`.
    pub fn from_theta(n_sites: usize, theta: f64, zeta_left: bool, zeta_right: bool) -> Self {
        let (kappa, j) = (theta * PI / 2.0).sin_cos();
        Self::new(n_sites, j, kappa, zeta_left, zeta_right)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        TfimSpec { sector: self.sector, ..Self::from_theta(self.n_sites, theta, self.zeta_left, self.zeta_right) }
    }

    pub fn validate(&self) -> Result<(), TfimError> {
        if self.n_sites < 2 {
            return Err(TfimError::InvalidSpec("need at least two sites"));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(TfimError::InvalidSpec("J must be positive"));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(TfimError::InvalidSpec("kappa must be positive"));
        }
        if self.sector != 1 && self.sector != -1 {
            return Err(TfimError::InvalidSpec("sector must be ±1"));
        }
        Ok(())
    }

    /// Active sites of the underlying fragment, `M = n_sites − 1`.
    pub fn chain_m(&self) -> usize {
        self.n_sites - 1
    }

    pub fn mu(&self) -> C64 {
        c(0.0, -self.kappa)
    }

    fn zetas(&self) -> (f64, f64) {
        (self.zeta_left as u8 as f64, self.zeta_right as u8 as f64)
    }

    /// Constant separating the fragment generator from `−2i·H`.
    pub fn constant_offset(&self) -> C64 {
        let (zl, zr) = self.zetas();
        c(-2.0 * self.kappa * (self.chain_m() as f64 - 1.0 + zl + zr), 0.0)
    }

    fn diagonal(&self) -> Vec<C64> {
        let (zl, zr) = self.zetas();
        let n = self.n_sites;
        (0..n)
            .map(|i| {
                let z = if i == 0 { zl } else if i == n - 1 { zr } else { 1.0 };
                self.mu() * z
            })
            .collect()
    }

    /// `A` of the quadratic form (symmetric).
    pub fn matrix_a(&self) -> Mat<C64> {
        let d = self.diagonal();
        Mat::from_fn(self.n_sites, self.n_sites, |i, j| {
            if i == j {
                d[i]
            } else if i.abs_diff(j) == 1 {
                c(self.j / 2.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// `B` of the quadratic form (antisymmetric).
    pub fn matrix_b(&self) -> Mat<C64> {
        Mat::from_fn(self.n_sites, self.n_sites, |i, j| {
            if j == i + 1 {
                c(self.j / 2.0, 0.0)
            } else if i == j + 1 {
                c(-self.j / 2.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// `C = (A+B)(A−B)`, tridiagonal.
    pub fn matrix_c(&self) -> Mat<C64> {
        let (zl, zr) = self.zetas();
        let n = self.n_sites;
        let (j, mu) = (self.j, self.mu());
        Mat::from_fn(n, n, |r, s| {
            if r == s {
                if r == 0 {
                    j * j + mu * mu * zl * zl
                } else if r == n - 1 {
                    mu * mu * zr * zr
                } else {
                    j * j + mu * mu
                }
            } else if r.abs_diff(s) == 1 {
                let z = if r.max(s) == n - 1 { zr } else { 1.0 };
                mu * j * z
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// `C' = (A−B)(A+B)`.
    pub fn matrix_c_prime(&self) -> Mat<C64> {
        let a = self.matrix_a();
        let b = self.matrix_b();
        let minus = &a - &b;
        let plus = &a + &b;
        &minus * &plus
    }

    /// Many-body spin Hamiltonian
    /// `J Σ σˣσˣ + iκ Σ_{bulk} σᶻ + iκ(ζ_L σᶻ_1 + ζ_R σᶻ_{M+1})`, site 1 most
    /// significant, bit 0 = spin up.
    pub fn hamiltonian_dense(&self) -> Result<Mat<C64>, TfimError> {
        let n = self.n_sites;
        if n > DENSE_MAX_QUBITS {
            return Err(LinalgError::TooLarge { dim: 1 << n, max: 1 << DENSE_MAX_QUBITS }.into());
        }
        let dim = 1usize << n;
        let bitmask = |site: usize| 1usize << (n - 1 - site);
        let fields: Vec<f64> = self.diagonal().iter().map(|d| -d.im).collect();
        let mut h = Mat::<C64>::zeros(dim, dim);
        for col in 0..dim {
            let mut diag = c(0.0, 0.0);
            for (s, &f) in fields.iter().enumerate() {
                let z = if col & bitmask(s) == 0 { 1.0 } else { -1.0 };
                diag += c(0.0, f * z);
            }
            h[(col, col)] += diag;
            for s in 0..n - 1 {
                let row = col ^ bitmask(s) ^ bitmask(s + 1);
                h[(row, col)] += c(self.j, 0.0);
            }
        }
        Ok(h)
    }

    /// Basis indices of the physical parity sector.
    pub fn sector_basis(&self) -> Vec<usize> {
        let want = if self.sector == 1 { 0 } else { 1 };
        (0..1usize << self.n_sites).filter(|i| i.count_ones() % 2 == want).collect()
    }

    pub fn sector_hamiltonian(&self) -> Result<Mat<C64>, TfimError> {
        let h = self.hamiltonian_dense()?;
        let idx = self.sector_basis();
        Ok(Mat::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]))
    }

    pub fn sector_eigenvalues(&self) -> Result<Vec<C64>, TfimError> {
        Ok(linalg::eigenvalues(&self.sector_hamiltonian()?)?)
    }
}

/// Quasiparticle energy of the periodic chain, principal square root.
pub fn pbc_dispersion(k: C64, j: f64, kappa: f64) -> C64 {
    let z = j * k.cos() + c(0.0, kappa);
    let y = j * k.sin();
    (z * z + y * y).sqrt()
}

/// Bogoliubov coefficients `(u_k, v_k)` with `u² − v² = 1`.
pub fn bogoliubov(k: C64, j: f64, kappa: f64) -> Result<(C64, C64), TfimError> {
    let eps = pbc_dispersion(k, j, kappa);
    if eps.norm_sqr() < 1e-12 * (j * j + kappa * kappa) {
        return Err(TfimError::ExceptionalPoint);
    }
    let z = j * k.cos() + c(0.0, kappa);
    let y = -j * k.sin();
    let i = c(0.0, 1.0);
    // pick the better-conditioned of the two equivalent closed forms
    if (eps + z).norm() >= (eps - z).norm() {
        let norm = (2.0 * eps * (eps + z)).sqrt();
        Ok(((eps + z) / norm, i * y / norm))
    } else {
        let norm = (-2.0 * eps * (eps - z)).sqrt();
        Ok((-i * y / norm, (eps - z) / norm))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Root of the case's Chebyshev secular polynomial (or `απ/(M+1)`).
    Regular,
    /// The `λ = 0` solution present with zero or one edge field.
    TrivialZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Complex momentum with `Re k ∈ [0, π]`.
    pub momentum: C64,
    /// Principal square root of `energy_sq`.
    pub energy: C64,
    /// `λ`, an eigenvalue of `C`.
    pub energy_sq: C64,
    pub kind: ModeKind,
    /// Normalized residual of the secular equation.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    /// Finite-size root, written as the representative of `±k + 2πm`
    /// closest to `limit`.
    pub momentum: C64,
    /// `−π/2 − i log(κ/J)`.
    pub limit: C64,
    pub energy: C64,
    /// Index into [`TfimSolution::modes`].
    pub mode: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfimSolution {
    pub spec: TfimSpec,
    pub modes: Vec<Mode>,
    pub zero_mode: Option<ZeroMode>,
}

impl TfimSolution {
    pub fn momenta(&self) -> Vec<C64> {
        self.modes.iter().map(|m| m.momentum).collect()
    }

    pub fn energies(&self) -> Vec<C64> {
        self.modes.iter().map(|m| m.energy).collect()
    }

    pub fn energies_sq(&self) -> Vec<C64> {
        self.modes.iter().map(|m| m.energy_sq).collect()
    }

    pub fn has_zero_mode(&self) -> bool {
        self.zero_mode.is_some()
    }

    pub fn max_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.residual).fold(0.0, f64::max)
    }
}

/// `U_0(x)..=U_n(x)`.
fn chebyshev_u(x: C64, n: usize) -> Vec<C64> {
    let mut u = Vec::with_capacity(n + 1);
    u.push(c(1.0, 0.0));
    if n >= 1 {
        u.push(2.0 * x);
    }
    for j in 2..=n {
        let next = 2.0 * x * u[j - 1] - u[j - 2];
        u.push(next);
    }
    u
}

/// Value, derivative and normalized residual of `Σ c_j U_j(x)`.
fn eval_u_series(coeffs: &[C64], x: C64) -> (C64, C64, f64) {
    let n = coeffs.len() - 1;
    let u = chebyshev_u(x, n);
    let mut du = vec![c(0.0, 0.0); n + 1];
    if n >= 1 {
        du[1] = c(2.0, 0.0);
    }
    for j in 2..=n {
        du[j] = 2.0 * u[j - 1] + 2.0 * x * du[j - 1] - du[j - 2];
    }
    let p: C64 = coeffs.iter().zip(&u).map(|(a, b)| a * b).sum();
    let dp: C64 = coeffs.iter().zip(&du).map(|(a, b)| a * b).sum();
    let umax = u.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let scale = coeffs.iter().map(|a| a.norm()).sum::<f64>() * umax;
    (p, dp, if scale > 0.0 { p.norm() / scale } else { p.norm() })
}

/// Roots of `Σ c_j U_j(x)` from the eigenvalues of the colleague matrix,
/// each polished by Newton steps.
fn u_series_roots(coeffs: &[C64]) -> Result<Vec<(C64, f64)>, TfimError> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut t = Mat::<C64>::zeros(n, n);
    for r in 0..n {
        if r > 0 {
            t[(r, r - 1)] = c(0.5, 0.0);
        }
        if r + 1 < n {
            t[(r, r + 1)] = c(0.5, 0.0);
        }
    }
    for (jdx, cj) in coeffs[..n].iter().enumerate() {
        t[(n - 1, jdx)] -= cj / (2.0 * lead);
    }
    let guesses = linalg::eigenvalues(&t)?;
    Ok(guesses
        .into_iter()
        .map(|x0| {
            let mut x = x0;
            let (_, _, mut best) = eval_u_series(coeffs, x);
            for _ in 0..8 {
                let (p, dp, _) = eval_u_series(coeffs, x);
                if dp.norm() == 0.0 {
                    break;
                }
                let cand = x - p / dp;
                let (_, _, res) = eval_u_series(coeffs, cand);
                if !(res < best) {
                    break;
                }
                x = cand;
                best = res;
            }
            (x, best)
        })
        .collect())
}

/// `k` with `cos k = x`, principal branch `Re k ∈ [0, π]`.
fn momentum_of(x: C64) -> C64 {
    x.acos()
}

impl TfimSpec {
    /// `λ = (J − μq)(J − μ/q)` with `q = e^{ik}`, refined against the
    /// secular fixed point when one factor is small.
    fn refined_energy_sq(&self, k: C64, both_fields: bool) -> C64 {
        let (j, mu) = (self.j, self.mu());
        let i = c(0.0, 1.0);
        let mut q = (i * k).exp();
        if q.norm() < 1.0 {
            q = 1.0 / q;
        }
        let m = self.chain_m() as i32;
        if both_fields {
            // t = 1 − (μ/J) q = q^{−2M−2} (1 − μ/(Jq))
            let t0 = 1.0 - mu / j * q;
            if t0.norm() < 1e-3 {
                for _ in 0..50 {
                    let t = q.powi(-2 * m - 2) * (1.0 - mu / (j * q));
                    let next = j / mu * (1.0 - t);
                    let done = (next - q).norm() <= 1e-16 * q.norm();
                    q = next;
                    if done {
                        break;
                    }
                }
                let t = q.powi(-2 * m - 2) * (1.0 - mu / (j * q));
                return j * t * (j - mu / q);
            }
        } else {
            // t' = 1 − μ/(Jq) = q^{−2M−1} (q^{−1} − μ/J)
            let t0 = 1.0 - mu / (j * q);
            if t0.norm() < 1e-3 {
                for _ in 0..50 {
                    let t = q.powi(-2 * m - 1) * (1.0 / q - mu / j);
                    let next = mu / (j * (1.0 - t));
                    let done = (next - q).norm() <= 1e-16 * q.norm();
                    q = next;
                    if done {
                        break;
                    }
                }
                let t = q.powi(-2 * m - 1) * (1.0 / q - mu / j);
                return (j - mu * q) * j * t;
            }
        }
        (j - mu * q) * (j - mu / q)
    }

    fn plain_energy_sq(&self, k: C64) -> C64 {
        let (j, mu) = (self.j, self.mu());
        j * j + mu * mu - 2.0 * mu * j * k.cos()
    }

    fn trivial_mode(&self) -> Mode {
        let (j, mu) = (self.j, self.mu());
        let x = (j * j + mu * mu) / (2.0 * mu * j);
        Mode {
            momentum: momentum_of(x),
            energy: c(0.0, 0.0),
            energy_sq: c(0.0, 0.0),
            kind: ModeKind::TrivialZero,
            residual: 0.0,
        }
    }
}

fn regular_mode(momentum: C64, energy_sq: C64, residual: f64) -> Mode {
    Mode { momentum, energy: energy_sq.sqrt(), energy_sq, kind: ModeKind::Regular, residual }
}

/// All `M + 1` quasiparticle modes of the open chain.
pub fn obc_spectrum(spec: &TfimSpec) -> Result<TfimSolution, TfimError> {
    spec.validate()?;
    let m = spec.chain_m();
    let ratio = spec.mu() / spec.j;
    let mut modes = match (spec.zeta_left, spec.zeta_right) {
        (true, false) | (false, true) => {
            let mut out: Vec<Mode> = (1..=m)
                .map(|a| {
                    let k = c(a as f64 * PI / (m + 1) as f64, 0.0);
                    let (_, _, res) = eval_u_series(&u_basis(m, &[(m, c(1.0, 0.0))]), k.cos());
                    regular_mode(k, spec.plain_energy_sq(k), res)
                })
                .collect();
            out.push(spec.trivial_mode());
            out
        }
        (true, true) => {
            // (μ/J) U_{M+1} − U_M
            let coeffs = u_basis(m + 1, &[(m + 1, ratio), (m, c(-1.0, 0.0))]);
            let mut out = Vec::with_capacity(m + 1);
            for (x, res) in u_series_roots(&coeffs)? {
                let k = momentum_of(x);
                out.push(regular_mode(k, spec.refined_energy_sq(k, true), res));
            }
            out
        }
        (false, false) => {
            // U_M − (μ/J) U_{M−1}
            let coeffs = u_basis(m, &[(m, c(1.0, 0.0)), (m - 1, -ratio)]);
            let mut out = Vec::with_capacity(m + 1);
            for (x, res) in u_series_roots(&coeffs)? {
                let k = momentum_of(x);
                out.push(regular_mode(k, spec.refined_energy_sq(k, false), res));
            }
            out.push(spec.trivial_mode());
            out
        }
    };
    if let Some((index, mode)) = modes.iter().enumerate().find(|(_, md)| !(md.residual < 1e-9)) {
        return Err(TfimError::NoConvergence { index, residual: mode.residual });
    }
    modes.sort_by(|a, b| {
        (a.kind == ModeKind::TrivialZero)
            .cmp(&(b.kind == ModeKind::TrivialZero))
            .then(a.momentum.re.total_cmp(&b.momentum.re))
            .then(a.momentum.im.total_cmp(&b.momentum.im))
    });
    let zero_mode = if spec.zeta_left && spec.zeta_right { locate_zero_mode(spec, &modes) } else { None };
    Ok(TfimSolution { spec: *spec, modes, zero_mode })
}

fn u_basis(degree: usize, entries: &[(usize, C64)]) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); degree + 1];
    entries.iter().for_each(|&(i, x)| v[i] += x);
    v
}

/// Representative of `{±k + 2πm}` nearest to `target`.
fn nearest_equivalent(k: C64, target: C64) -> C64 {
    let mut best = k;
    for s in [1.0, -1.0] {
        for m in -2..=2 {
            let cand = s * k + c(2.0 * PI * m as f64, 0.0);
            if (cand - target).norm() < (best - target).norm() {
                best = cand;
            }
        }
    }
    best
}

/// `−π/2 − i log(κ/J)`; `None` unless `κ < J`.
pub fn zero_mode_limit(j: f64, kappa: f64) -> Option<C64> {
    (kappa < j).then(|| c(-PI / 2.0, -(kappa / j).ln()))
}

fn locate_zero_mode(spec: &TfimSpec, modes: &[Mode]) -> Option<ZeroMode> {
    let limit = zero_mode_limit(spec.j, spec.kappa)?;
    modes
        .iter()
        .enumerate()
        .map(|(i, md)| (i, nearest_equivalent(md.momentum, limit)))
        .min_by(|a, b| (a.1 - limit).norm().total_cmp(&(b.1 - limit).norm()))
        .map(|(i, k)| ZeroMode { momentum: k, limit, energy: modes[i].energy, mode: i })
}

/// Zero mode of the chain with both edge fields; `None` when `κ ≥ J`.
pub fn zero_mode(spec: &TfimSpec) -> Result<Option<ZeroMode>, TfimError> {
    if !(spec.zeta_left && spec.zeta_right) {
        return Err(TfimError::WrongEdgeCase);
    }
    Ok(obc_spectrum(spec)?.zero_mode)
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Relative residual `‖Mv − λv‖ / (‖M‖‖v‖)`.
fn eigen_residual(m: &Mat<C64>, v: &[C64], lambda: C64) -> f64 {
    let n = v.len();
    let mut worst = 0.0f64;
    for r in 0..n {
        let mv: C64 = (0..n).map(|s| m[(r, s)] * v[s]).sum();
        worst = worst.max((mv - lambda * v[r]).norm());
    }
    worst / linalg::frobenius(m).max(f64::MIN_POSITIVE)
}

/// Real-space mode shapes of one momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeShapes {
    /// Eigenvector of `C`, unit norm.
    pub psi: Vec<C64>,
    /// Eigenvector of `C'`; needs the right edge field.
    pub phi: Option<Vec<C64>>,
}

/// Mode shapes for a chain with a left edge field.
pub fn eigenvector(spec: &TfimSpec, k: C64) -> Result<ModeShapes, TfimError> {
    spec.validate()?;
    if !spec.zeta_left {
        return Err(TfimError::WrongEdgeCase);
    }
    let n = spec.n_sites;
    let m2 = (spec.chain_m() + 2) as f64;
    let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    let lambda = spec.plain_energy_sq(k);
    let psi = normalized((1..=n).map(|j| sign(j) * (k * j as f64).sin()).collect());
    if !(eigen_residual(&spec.matrix_c(), &psi, lambda) < 1e-8) {
        return Err(TfimError::NotARoot(k));
    }
    let phi = if spec.zeta_right {
        let v = normalized((1..=n).map(|j| sign(j) * (k * (j as f64 - m2)).sin()).collect());
        if !(eigen_residual(&spec.matrix_c_prime(), &v, lambda) < 1e-8) {
            return Err(TfimError::NotARoot(k));
        }
        Some(v)
    } else {
        None
    };
    Ok(ModeShapes { psi, phi })
}

/// Default thresholds for [`exceptional_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpOptions {
    /// Coalescence gap relative to `J² + κ²`.
    pub gap_tol: f64,
    /// Minimum eigenvector condition number at the EP.
    pub cond_min: f64,
}

impl Default for EpOptions {
    fn default() -> Self {
        EpOptions { gap_tol: 1e-6, cond_min: 1e6 }
    }
}

fn closest_pair(values: &[C64]) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::INFINITY);
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            let d = (values[a] - values[b]).norm();
            if d < best.2 {
                best = (a, b, d);
            }
        }
    }
    best
}

fn pair_discriminant(spec: &TfimSpec, theta: f64) -> Result<(C64, f64), TfimError> {
    let s = spec.with_theta(theta);
    let ev = linalg::eigenvalues(&s.matrix_c())?;
    let (a, b, gap) = closest_pair(&ev);
    let d = ev[a] - ev[b];
    Ok((d * d, gap))
}

/// θ values in `(0, 1)` where two eigenvalues of `C` coalesce with
/// defective eigenvectors, with `J = cos(θπ/2)` and `κ = sin(θπ/2)`.
pub fn exceptional_points(spec: &TfimSpec, grid: &[f64], opts: EpOptions) -> Result<Vec<f64>, TfimError> {
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|&t| pair_discriminant(spec, t).map(|(_, g)| g))
        .collect::<Result<_, _>>()?;
    let mut found = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if !(gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1]) {
            continue;
        }
        // complex secant on the squared splitting, keeping θ real
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let (mut t0, mut t1) = (grid[i], grid[i] + 0.25 * (grid[i + 1] - grid[i]));
        let (mut d0, _) = pair_discriminant(spec, t0)?;
        let (mut d1, mut g1) = pair_discriminant(spec, t1)?;
        for _ in 0..60 {
            let denom = d1 - d0;
            if denom.norm() == 0.0 {
                break;
            }
            let step = d1 * (t1 - t0) / denom;
            let t2 = (t1 - step.re).clamp(lo, hi);
            if (t2 - t1).abs() < 1e-15 {
                break;
            }
            (t0, d0) = (t1, d1);
            t1 = t2;
            (d1, g1) = pair_discriminant(spec, t1)?;
        }
        let s = spec.with_theta(t1);
        let scale = s.j * s.j + s.kappa * s.kappa;
        if g1 >= opts.gap_tol * scale {
            continue;
        }
        let (_, vecs) = linalg::eigen(&s.matrix_c())?;
        if linalg::condition_number(&vecs) > opts.cond_min {
            found.push(t1);
        }
    }
    Ok(found)
}

/// Evenly spaced θ grid on the open interval `(0, 1)`.
pub fn theta_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (1..n).map(|i| i as f64 * step).collect()
}
