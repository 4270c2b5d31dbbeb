//! C interface to `lindfrag`.
//!
//! Every entry point returns an [`LfStatus`]. On failure the thread-local
//! message from [`lf_last_error_message`] describes what went wrong. Models
//! are opaque handles released with [`lf_model_free`]. Array outputs take a
//! caller-owned buffer plus its length and report the number of entries
//! needed through `out_len`, so a first call with `len = 0` can size the
//! buffer.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lindfrag::fragments::{count_by_size, FragmentError};
use lindfrag::linalg::C64;
use lindfrag::spectra::{rmt_sample, SpectraError};
use lindfrag::tfim::{obc_spectrum, TfimError, TfimSpec};
use lindfrag::{LindbladModel, ModelError, TildeModel};

/// Result of every `lf_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for LfComplex {
    fn from(z: C64) -> Self {
        LfComplex { re: z.re, im: z.im }
    }
}

/// A validated model together with its stabilizer-basis form.
pub struct LfModel {
    tilde: TildeModel,
}

struct Failure {
    status: LfStatus,
    message: String,
}

impl Failure {
    fn new(status: LfStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::Invalid(_) => LfStatus::Validation,
            _ => LfStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<FragmentError> for Failure {
    fn from(e: FragmentError) -> Self {
        let status = match e {
            FragmentError::ClosureTooLarge { .. } => LfStatus::Numerical,
            _ => LfStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<TfimError> for Failure {
    fn from(e: TfimError) -> Self {
        let status = match e {
            TfimError::InvalidSpec(_) | TfimError::WrongEdgeCase => LfStatus::InvalidArgument,
            _ => LfStatus::Numerical,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        let status = match e {
            SpectraError::BadSize(_) | SpectraError::BadChi => LfStatus::InvalidArgument,
            _ => LfStatus::Numerical,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LfStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(LfStatus::Panic, format!("panic: {message}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error("");
            LfStatus::Ok
        }
        Err(f) => {
            set_last_error(&f.message);
            f.status
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(LfStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(LfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies `values` into `out` when it fits; always reports the needed length.
unsafe fn write_slice<T: Copy>(values: &[T], out: *mut T, len: usize, out_len: *mut usize) -> Result<(), Failure> {
    non_null(out_len, "out_len")?;
    *out_len = values.len();
    if len < values.len() {
        return Err(Failure::new(
            LfStatus::BufferTooSmall,
            format!("buffer holds {len} entries, {} needed", values.len()),
        ));
    }
    non_null(out, "output buffer")?;
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn finish_model(model: LindbladModel, out: *mut *mut LfModel) -> Result<(), Failure> {
    let tilde = model.to_tilde()?;
    unsafe { *out = Box::into_raw(Box::new(LfModel { tilde })) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Failure message of the most recent call on this thread, empty if it
/// succeeded. The pointer stays valid until the next `lf_*` call on the thread.
#[no_mangle]
pub extern "C" fn lf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a named builtin model (`cluster_y` or `cluster_ziz`) on `n` qubits.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_model_builtin(
    name: *const c_char,
    n: usize,
    j: f64,
    kappa: f64,
    out: *mut *mut LfModel,
) -> LfStatus {
    guard(|| {
        non_null(out, "out")?;
        let kind = read_str(name, "name")?.parse()?;
        finish_model(lindfrag::model::builtin(kind, n, j, kappa)?, out)
    })
}

/// Parses a model from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_model_from_json(json: *const c_char, out: *mut *mut LfModel) -> LfStatus {
    guard(|| {
        non_null(out, "out")?;
        finish_model(LindbladModel::from_json(read_str(json, "json")?)?, out)
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from `lf_model_builtin` or `lf_model_from_json` and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lf_model_free(model: *mut LfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_model_n_qubits(model: *const LfModel, out: *mut usize) -> LfStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        *out = (*model).tilde.n_qubits();
        Ok(())
    })
}

/// Number of fragments with `k` active sites, written to `counts[k]` for
/// `k = 0..=n_qubits`.
///
/// # Safety
/// `model` must be a live handle, `counts` must hold `len` entries and
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_fragment_histogram(
    model: *const LfModel,
    counts: *mut u64,
    len: usize,
    out_len: *mut usize,
) -> LfStatus {
    guard(|| {
        non_null(model, "model")?;
        let tilde = &(*model).tilde;
        let mut hist = vec![0u64; tilde.n_qubits() + 1];
        for (k, v) in count_by_size(tilde)? {
            hist[k] = u64::try_from(v)
                .map_err(|_| Failure::new(LfStatus::Numerical, "fragment count exceeds 64 bits"))?;
        }
        write_slice(&hist, counts, len, out_len)
    })
}

/// Total number of fragments.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_fragment_count(model: *const LfModel, out: *mut u64) -> LfStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let total: u128 = count_by_size(&(*model).tilde)?.values().sum();
        *out = u64::try_from(total).map_err(|_| Failure::new(LfStatus::Numerical, "fragment count exceeds 64 bits"))?;
        Ok(())
    })
}

/// Exact open-chain modes of the non-Hermitian Ising chain with `n_sites`
/// sites. Writes one momentum and one energy per mode.
///
/// # Safety
/// `momenta` and `energies` must each hold `len` entries and `out_len` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_tfim_modes(
    n_sites: usize,
    j: f64,
    kappa: f64,
    edge_left: bool,
    edge_right: bool,
    momenta: *mut LfComplex,
    energies: *mut LfComplex,
    len: usize,
    out_len: *mut usize,
) -> LfStatus {
    guard(|| {
        let sol = obc_spectrum(&TfimSpec::new(n_sites, j, kappa, edge_left, edge_right))?;
        let ks: Vec<LfComplex> = sol.modes.iter().map(|m| m.momentum.into()).collect();
        let es: Vec<LfComplex> = sol.modes.iter().map(|m| m.energy.into()).collect();
        write_slice(&ks, momenta, len, out_len)?;
        write_slice(&es, energies, len, out_len)
    })
}

/// Eigenvalues of one pseudo-Hermitian random matrix of size `n`.
///
/// # Safety
/// `eigenvalues` must hold `len` entries and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_rmt_eigenvalues(
    n: usize,
    chi: f64,
    seed: u64,
    eigenvalues: *mut LfComplex,
    len: usize,
    out_len: *mut usize,
) -> LfStatus {
    guard(|| {
        let spectrum = rmt_sample(n, chi, seed)?.spectrum()?;
        let values: Vec<LfComplex> = spectrum.eigenvalues().iter().map(|&z| z.into()).collect();
        write_slice(&values, eigenvalues, len, out_len)
    })
}
