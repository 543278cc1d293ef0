//! C ABI over `tmhcrf`.
//!
//! Every fallible call returns a [`TmhStatus`]. On failure the message is
//! available from [`tmh_last_error`] on the same thread. Models are opaque
//! [`TmhModel`] handles released with [`tmh_model_free`]; strings returned
//! by the library are released with [`tmh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tmhcrf::chain::viterbi;
use tmhcrf::model_io::{load_model, model_from_str, model_to_string, save_model};
use tmhcrf::seq::{labels_to_string, parse_dataset};
use tmhcrf::train::Problem;
use tmhcrf::{CrfModel, Error, ErrorClass, ExperimentConfig, ParseMode, ProteinRecord};

/// Opaque trained model.
pub struct TmhModel {
    inner: CrfModel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmhStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Bad configuration or arguments.
    Usage = 3,
    /// Bad input data or model file.
    Data = 4,
    /// Numerical failure during training or inference.
    Numerical = 5,
    /// Internal panic; the library state is unchanged.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Fail {
    Null(&'static str),
    Utf8(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TmhStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmhStatus::Ok,
        Ok(Err(Fail::Null(arg))) => {
            set_error(format!("argument `{arg}` is null"));
            TmhStatus::NullArgument
        }
        Ok(Err(Fail::Utf8(arg))) => {
            set_error(format!("argument `{arg}` is not valid UTF-8"));
            TmhStatus::InvalidUtf8
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            match e.class() {
                ErrorClass::Usage => TmhStatus::Usage,
                ErrorClass::Data => TmhStatus::Data,
                ErrorClass::Numerical => TmhStatus::Numerical,
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            TmhStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8(name))
}

fn out_ptr<T>(p: *mut T, name: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::Null(name))
    } else {
        Ok(())
    }
}

fn model_ref<'a>(m: *const TmhModel) -> Result<&'a CrfModel, Fail> {
    // SAFETY: caller passes a handle from this library or null
    unsafe { m.as_ref() }.map(|m| &m.inner).ok_or(Fail::Null("model"))
}

fn boxed(m: CrfModel) -> *mut TmhModel {
    Box::into_raw(Box::new(TmhModel { inner: m }))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Trains a model on a labelled dataset.
///
/// `config` uses the experiment configuration format and may be null for
/// the defaults. On success `*out` receives a new handle.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_train(
    dataset: *const c_char,
    config: *const c_char,
    out: *mut *mut TmhModel,
) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let data = parse_dataset(text(dataset, "dataset")?, ParseMode::Strict)?;
        let cfg = if config.is_null() {
            ExperimentConfig::default()
        } else {
            ExperimentConfig::parse(text(config, "config")?)?
        };
        let topo = cfg.resolve_topology()?;
        let data = data.exclude_prefixes(&cfg.exclude_prefixes);
        let (model, _) = Problem::new(&data, &cfg.features, &topo)?.optimize(&cfg.train)?;
        *out = boxed(model);
        Ok(())
    })
}

/// # Safety
/// `path` is null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_load(path: *const c_char, out: *mut *mut TmhModel) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = boxed(load_model(Path::new(text(path, "path")?))?);
        Ok(())
    })
}

/// Parses a model from its text form.
///
/// # Safety
/// `model_text` is null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_from_string(model_text: *const c_char, out: *mut *mut TmhModel) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = boxed(model_from_str(text(model_text, "model_text")?)?);
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle or null; `path` is null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_save(model: *const TmhModel, path: *const c_char) -> TmhStatus {
    guard(|| {
        let m = model_ref(model)?;
        save_model(m, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// Text form of a model; free with [`tmh_string_free`].
///
/// # Safety
/// `model` is a live handle or null; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_to_string(model: *const TmhModel, out: *mut *mut c_char) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = owned_string(model_to_string(model_ref(model)?));
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle or null; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_num_features(model: *const TmhModel, out: *mut usize) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = model_ref(model)?.num_features();
        Ok(())
    })
}

/// Labels one sequence; `*out` receives a `0`/`1` string of the same length,
/// to be freed with [`tmh_string_free`].
///
/// # Safety
/// `model` is a live handle or null; `sequence` is null or NUL-terminated;
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tmh_predict(
    model: *const TmhModel,
    sequence: *const c_char,
    out: *mut *mut c_char,
) -> TmhStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let m = model_ref(model)?;
        let record = ProteinRecord::from_strings("query", text(sequence, "sequence")?, None)?;
        *out = owned_string(labels_to_string(&viterbi(&record, m)?.labels));
        Ok(())
    })
}

/// # Safety
/// `model` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmh_model_free(model: *mut TmhModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tmh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
