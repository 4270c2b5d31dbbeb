//! Loschmidt echoes of operators evolving under effective generators.

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::effective::{EffectiveError, EffectiveGenerator};
use crate::fragments::Fragment;
use crate::linalg::{self, c, LinalgError, C64};
use crate::model::TildeModel;
use crate::pauli::{Pauli, PauliError, PauliString};
use crate::tfim::{TfimError, TfimSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Tfim(#[from] TfimError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("state has length {got}, generator dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("time grid must start at 0 and increase strictly")]
    BadGrid,
    #[error("propagation produced non-finite values at t = {0}")]
    NonFinite(f64),
    #[error("state is zero")]
    ZeroState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Oscillatory,
    Overdamped,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    Eigen,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoOptions {
    /// Leading fraction of the grid ignored by the regime classifier.
    pub transient_fraction: f64,
    /// Minimum swing of `|Ẽ|`, relative to its maximum, counted as a turn.
    pub prominence: f64,
    /// Eigenvector condition number above which exponentials are used.
    pub cond_max: f64,
}

impl Default for EchoOptions {
    fn default() -> Self {
        EchoOptions { transient_fraction: 0.1, prominence: 1e-3, cond_max: 1e8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoSeries {
    pub times: Vec<f64>,
    /// `Ẽ(t) = ⟨O(0)|O(t)⟩ / ‖O(t)‖`.
    pub values: Vec<C64>,
    /// `‖O(t)‖` of the unnormalized evolution.
    pub norms: Vec<f64>,
    pub regime: Regime,
    /// Turning points of `|Ẽ|` after the transient.
    pub extrema: usize,
    pub method: Propagation,
}

impl EchoSeries {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// `steps` equally spaced points on `[0, t_max]`.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![0.0];
    }
    (0..steps).map(|i| t_max * i as f64 / (steps - 1) as f64).collect()
}

/// 400 points over `[0, 20/J]`.
pub fn default_grid(j: f64) -> Vec<f64> {
    time_grid(20.0 / j, 400)
}

/// Basis vector with every pseudospin up.
pub fn all_up_state(n_sites: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); 1usize << n_sites];
    v[0] = c(1.0, 0.0);
    v
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn overlap(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn mat_vec(m: &Mat<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Counts reversals of `signal` larger than `threshold`.
pub fn count_turning_points(signal: &[f64], threshold: f64) -> usize {
    let Some(&first) = signal.first() else { return 0 };
    let (mut lo, mut hi) = (first, first);
    let mut dir = 0i8;
    let mut ext = first;
    let mut count = 0;
    for &x in &signal[1..] {
        match dir {
            0 => {
                lo = lo.min(x);
                hi = hi.max(x);
                if x > lo + threshold {
                    dir = 1;
                    ext = x;
                } else if x < hi - threshold {
                    dir = -1;
                    ext = x;
                }
            }
            1 => {
                if x > ext {
                    ext = x;
                } else if x < ext - threshold {
                    count += 1;
                    dir = -1;
                    ext = x;
                }
            }
            _ => {
                if x < ext {
                    ext = x;
                } else if x > ext + threshold {
                    count += 1;
                    dir = 1;
                    ext = x;
                }
            }
        }
    }
    count
}

/// Regime from the turning points of `|Ẽ|` after the transient window.
pub fn classify(magnitudes: &[f64], opts: &EchoOptions) -> (Regime, usize) {
    let skip = (opts.transient_fraction * magnitudes.len() as f64).floor() as usize;
    let window = &magnitudes[skip.min(magnitudes.len())..];
    let peak = window.iter().copied().fold(0.0, f64::max);
    let turns = count_turning_points(window, opts.prominence * peak);
    let regime = match turns {
        0 => Regime::Overdamped,
        1 => Regime::Undetermined,
        _ => Regime::Oscillatory,
    };
    (regime, turns)
}

fn check_grid(times: &[f64]) -> Result<(), DynamicsError> {
    let ok = times.first() == Some(&0.0) && times.windows(2).all(|w| w[1] > w[0]) && times.iter().all(|t| t.is_finite());
    ok.then_some(()).ok_or(DynamicsError::BadGrid)
}

/// Evolves `initial` under `d/dt |O⟩ = G|O⟩` and records the echo.
pub fn evolve_echo(generator: &Mat<C64>, initial: &[C64], times: &[f64], opts: &EchoOptions) -> Result<EchoSeries, DynamicsError> {
    linalg::check_square(generator)?;
    let n = generator.nrows();
    if initial.len() != n {
        return Err(DynamicsError::DimensionMismatch { expected: n, got: initial.len() });
    }
    let n0 = norm(initial);
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(DynamicsError::NotNormalized(n0));
    }
    check_grid(times)?;

    let (values, vectors) = linalg::eigen(generator)?;
    let (echo, norms, method) = if linalg::condition_number(&vectors) <= opts.cond_max {
        let (e, nr) = eigen_propagate(&values, &vectors, initial, times)?;
        (e, nr, Propagation::Eigen)
    } else {
        let (e, nr) = step_propagate(generator, initial, times)?;
        (e, nr, Propagation::Exponential)
    };
    let mags: Vec<f64> = echo.iter().map(|v| v.norm()).collect();
    let (regime, extrema) = classify(&mags, opts);
    Ok(EchoSeries { times: times.to_vec(), values: echo, norms, regime, extrema, method })
}

fn eigen_propagate(
    values: &[C64],
    vectors: &Mat<C64>,
    initial: &[C64],
    times: &[f64],
) -> Result<(Vec<C64>, Vec<f64>), DynamicsError> {
    let n = values.len();
    let rhs = Mat::from_fn(n, 1, |i, _| initial[i]);
    let coeffs = linalg::solve(vectors, &rhs);
    // shifting by the slowest decay keeps every factor bounded
    let shift = values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let mut echo = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let weights: Vec<C64> = (0..n).map(|k| coeffs[(k, 0)] * ((values[k] - shift) * t).exp()).collect();
        let state = mat_vec(vectors, &weights);
        let nrm = norm(&state);
        if !nrm.is_finite() {
            return Err(DynamicsError::NonFinite(t));
        }
        if nrm == 0.0 {
            return Err(DynamicsError::ZeroState);
        }
        echo.push(overlap(initial, &state) / nrm);
        norms.push(nrm * (shift * t).exp());
    }
    Ok((echo, norms))
}

fn step_propagate(generator: &Mat<C64>, initial: &[C64], times: &[f64]) -> Result<(Vec<C64>, Vec<f64>), DynamicsError> {
    let n = generator.nrows();
    let mut state = initial.to_vec();
    let mut log_norm = 0.0;
    let mut echo = vec![c(1.0, 0.0)];
    let mut norms = vec![1.0];
    let mut cached: Option<(f64, Mat<C64>)> = None;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-12 * dt);
        if !reuse {
            let scaled = Mat::from_fn(n, n, |i, j| generator[(i, j)] * dt);
            cached = Some((dt, linalg::expm(&scaled)));
        }
        let prop = &cached.as_ref().expect("filled above").1;
        state = mat_vec(prop, &state);
        let nrm = norm(&state);
        if !nrm.is_finite() {
            return Err(DynamicsError::NonFinite(w[1]));
        }
        if nrm == 0.0 {
            return Err(DynamicsError::ZeroState);
        }
        state.iter_mut().for_each(|x| *x /= nrm);
        log_norm += nrm.ln();
        echo.push(overlap(initial, &state));
        norms.push(log_norm.exp());
    }
    Ok((echo, norms))
}

pub fn evolve_effective(
    generator: &EffectiveGenerator,
    initial: &[C64],
    times: &[f64],
    opts: &EchoOptions,
) -> Result<EchoSeries, DynamicsError> {
    evolve_echo(generator.matrix()?, initial, times, opts)
}

/// Echo of the all-up state under `G = −iH` in the even parity sector.
pub fn evolve_tfim(spec: &TfimSpec, times: &[f64], opts: &EchoOptions) -> Result<EchoSeries, DynamicsError> {
    spec.validate()?;
    let even = TfimSpec { sector: 1, ..*spec };
    let h = even.sector_hamiltonian()?;
    let g = Mat::from_fn(h.nrows(), h.ncols(), |i, j| c(0.0, -1.0) * h[(i, j)]);
    let mut initial = vec![c(0.0, 0.0); h.nrows()];
    // index 0 of the even sector is the all-up configuration
    initial[0] = c(1.0, 0.0);
    evolve_echo(&g, &initial, times, opts)
}

/// One component of an operator written out in both bases.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorComponent {
    pub amplitude: C64,
    pub tilde: PauliString,
    pub physical: PauliString,
}

/// Operators represented by a pseudospin state over the given active sites
/// of a labeled fragment, or over the members of an explicit one.
fn components(
    model: &TildeModel,
    fragment: &Fragment,
    sites: &[usize],
    state: &[C64],
) -> Result<Vec<OperatorComponent>, DynamicsError> {
    let expected = match fragment.explicit_members() {
        Some(m) => m.len(),
        None => 1usize << sites.len(),
    };
    if state.len() != expected {
        return Err(DynamicsError::DimensionMismatch { expected, got: state.len() });
    }
    let base = fragment.representative();
    let k = sites.len();
    let out = state
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != c(0.0, 0.0))
        .map(|(idx, &amplitude)| {
            let tilde = if fragment.is_explicit() {
                fragment.basis_string(idx)
            } else {
                let mut letters: Vec<Pauli> = base.letters().collect();
                for (pos, &s) in sites.iter().enumerate() {
                    letters[s] = if (idx >> (k - 1 - pos)) & 1 == 1 { Pauli::Y } else { Pauli::X };
                }
                PauliString::from_paulis(&letters)
            };
            let physical = model.to_physical(&tilde)?;
            Ok(OperatorComponent { amplitude, tilde, physical })
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    if out.is_empty() {
        return Err(DynamicsError::ZeroState);
    }
    Ok(out)
}

/// The operator a fragment state stands for.
pub fn operator_correspondence(
    model: &TildeModel,
    fragment: &Fragment,
    state: &[C64],
) -> Result<Vec<OperatorComponent>, DynamicsError> {
    components(model, fragment, fragment.active_sites(), state)
}

/// Like [`operator_correspondence`] for a subsystem generator; inactive
/// pseudospins keep the fragment representative's letters.
pub fn generator_operator(
    model: &TildeModel,
    generator: &EffectiveGenerator,
    state: &[C64],
) -> Result<Vec<OperatorComponent>, DynamicsError> {
    components(model, generator.fragment(), generator.pseudospin_sites(), state)
}
