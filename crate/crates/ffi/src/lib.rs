//! C ABI for the classifier library.
//!
//! Every entry point is callable from plain C: models travel as opaque
//! handles, failures come back as an [`MckStatus`] code with a
//! per-thread message behind [`mck_last_error`], and panics are caught
//! at the boundary instead of unwinding into the caller.
//!
//! Handles returned through `out` parameters own their model and must
//! be released with [`mck_model_free`]. A function that fails leaves
//! its `out` parameter untouched.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ndarray::Array2;

use mckelm::dataset::{load_auto, Dataset};
use mckelm::kernels::KernelParams;
use mckelm::mckelm::VoteMode;
use mckelm::model::{train_model_file, ClassifierChoice, ModelFile, TrainRecipe};
use mckelm::Error;

/// Opaque handle to a trained model bundle.
pub struct MckModel {
    inner: ModelFile,
}

/// Result of every fallible call. Anything other than `Ok` leaves a
/// message readable through [`mck_last_error`] on the calling thread.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MckStatus {
    /// The call succeeded.
    Ok = 0,
    /// An argument failed validation: bad shape, range, code, or file
    /// content.
    Invalid = 1,
    /// The underlying file operation failed.
    Io = 2,
    /// A numerical routine could not complete (e.g. an indefinite
    /// system).
    Numerical = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A string argument was not valid UTF-8.
    BadUtf8 = 5,
    /// An internal panic was caught at the boundary; the handle state
    /// is unchanged but the operation did not happen.
    Panic = 6,
}

/// Training request passed to [`mck_train`]. Obtain a filled-in value
/// from [`mck_train_options_default`] and override what you need.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MckTrainOptions {
    /// Classifier to fit: 0 multicolumn kernel machine, 1 single
    /// kernel machine, 2 random-feature machine, 3 reduced kernel
    /// machine, 4 nearest neighbour, 5 Gaussian naive Bayes.
    pub classifier: u32,
    /// Kernel for the kernel-based classifiers: 0 Gaussian RBF,
    /// 1 chi-square.
    pub kernel: u32,
    /// Kernel scale: gamma for RBF, sigma for chi-square.
    pub kernel_scale: f64,
    /// Ridge regularization weight; must be positive.
    pub regularization: f64,
    /// Partition depth for the multicolumn machine: 2^eta subsets.
    pub eta: u32,
    /// Training rows consulted when routing a query to columns.
    pub route_k: u64,
    /// Hidden nodes for the random-feature machine; 0 scales the
    /// count with the training rows.
    pub hidden: u64,
    /// Neighbours for the nearest-neighbour classifier.
    pub knn_k: u64,
    /// Seed for the randomized trainers.
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: MckStatus, msg: impl Into<String>) -> MckStatus {
    // Interior NULs cannot survive the trip through a C string.
    let msg = msg.into().replace('\0', " ");
    let msg = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    status
}

fn fail_with(e: &Error) -> MckStatus {
    let status = match e {
        Error::Io { .. } => MckStatus::Io,
        Error::Numerical { .. } => MckStatus::Numerical,
        _ => MckStatus::Invalid,
    };
    fail(status, e.to_string())
}

/// Run `body` with panics converted into [`MckStatus::Panic`].
fn guarded(body: impl FnOnce() -> MckStatus) -> MckStatus {
    catch_unwind(AssertUnwindSafe(body))
        .unwrap_or_else(|_| fail(MckStatus::Panic, "internal panic caught at the C boundary"))
}

/// Decode a C path argument. `what` names the argument in messages.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn path_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a Path, MckStatus> {
    if ptr.is_null() {
        return Err(fail(MckStatus::NullPointer, format!("{what} is null")));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(fail(MckStatus::BadUtf8, format!("{what} is not valid UTF-8"))),
    }
}

fn take_u64(v: u64, what: &str) -> Result<usize, MckStatus> {
    usize::try_from(v)
        .map_err(|_| fail(MckStatus::Invalid, format!("{what} {v} exceeds the address space")))
}

fn recipe_from(options: &MckTrainOptions) -> Result<TrainRecipe, MckStatus> {
    let classifier = match options.classifier {
        0 => ClassifierChoice::Mckelm,
        1 => ClassifierChoice::Kelm,
        2 => ClassifierChoice::Elm,
        3 => ClassifierChoice::Rkelm,
        4 => ClassifierChoice::Knn,
        5 => ClassifierChoice::Gnb,
        other => {
            return Err(fail(MckStatus::Invalid, format!("unknown classifier code {other}")))
        }
    };
    let kernel = match options.kernel {
        0 => KernelParams::rbf(options.kernel_scale),
        1 => KernelParams::chi_square(options.kernel_scale),
        other => return Err(fail(MckStatus::Invalid, format!("unknown kernel code {other}"))),
    }
    .map_err(|e| fail_with(&e))?;
    let hidden = match take_u64(options.hidden, "hidden")? {
        0 => None,
        n => Some(n),
    };
    Ok(TrainRecipe {
        classifier,
        kernel,
        regularization: options.regularization,
        eta: options.eta,
        route_k: take_u64(options.route_k, "route_k")?,
        hidden,
        knn_k: take_u64(options.knn_k, "knn_k")?,
        seed: options.seed,
        selection: None,
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on the calling thread, or an
/// empty string when nothing failed yet. The pointer stays valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mck_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The defaults every training run starts from: the multicolumn
/// machine at depth 3 with a unit-scale RBF kernel.
#[no_mangle]
pub extern "C" fn mck_train_options_default() -> MckTrainOptions {
    MckTrainOptions {
        classifier: 0,
        kernel: 0,
        kernel_scale: 1.0,
        regularization: 1.0,
        eta: 3,
        route_k: 3,
        hidden: 0,
        knn_k: 1,
        seed: 0,
    }
}

/// Train a classifier on a labelled dataset file (`.csv` or the binary
/// dataset format, decided by content) and hand back an owned model.
///
/// `csv_has_header` is consulted only for CSV input. On success
/// `*out_model` receives the handle.
///
/// # Safety
/// `train_path` must be null or NUL-terminated; `options` and
/// `out_model` must be null or valid for reads/writes respectively.
#[no_mangle]
pub unsafe extern "C" fn mck_train(
    train_path: *const c_char,
    csv_has_header: bool,
    options: *const MckTrainOptions,
    out_model: *mut *mut MckModel,
) -> MckStatus {
    guarded(|| {
        let path = match path_arg(train_path, "train_path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if options.is_null() {
            return fail(MckStatus::NullPointer, "options is null");
        }
        if out_model.is_null() {
            return fail(MckStatus::NullPointer, "out_model is null");
        }
        let recipe = match recipe_from(&*options) {
            Ok(r) => r,
            Err(s) => return s,
        };
        let (raw, labels) = match load_auto(path, csv_has_header) {
            Ok(v) => v,
            Err(e) => return fail_with(&e),
        };
        match train_model_file(&recipe, &raw, labels) {
            Ok((model, _seconds)) => {
                *out_model = Box::into_raw(Box::new(MckModel { inner: model }));
                MckStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Load a model file. On success `*out_model` receives the handle.
///
/// # Safety
/// `path` must be null or NUL-terminated; `out_model` must be null or
/// valid for a write.
#[no_mangle]
pub unsafe extern "C" fn mck_model_load(
    path: *const c_char,
    out_model: *mut *mut MckModel,
) -> MckStatus {
    guarded(|| {
        let path = match path_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out_model.is_null() {
            return fail(MckStatus::NullPointer, "out_model is null");
        }
        match ModelFile::load(path) {
            Ok(model) => {
                *out_model = Box::into_raw(Box::new(MckModel { inner: model }));
                MckStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Write the model to a file, atomically replacing any existing one.
///
/// # Safety
/// `model` must be null or a live handle from this library; `path`
/// must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mck_model_save(model: *const MckModel, path: *const c_char) -> MckStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else {
            return fail(MckStatus::NullPointer, "model is null");
        };
        let path = match path_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match model.inner.save(path) {
            Ok(()) => MckStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Release a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mck_model_free(model: *mut MckModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Width of the feature rows the model accepts (before any stored
/// feature selection is applied). Returns 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mck_model_feature_count(model: *const MckModel) -> u64 {
    model.as_ref().map_or(0, |m| m.inner.input_dim() as u64)
}

/// Number of classes the model distinguishes. Returns 0 for a null
/// handle.
///
/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mck_model_class_count(model: *const MckModel) -> u64 {
    model.as_ref().map_or(0, |m| m.inner.labels.class_count() as u64)
}

/// Static name of the classifier kind inside the handle ("mckelm",
/// "kelm", "elm", "rkelm", "knn", or "gnb"). Returns an empty string
/// for a null handle.
///
/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mck_model_kind(model: *const MckModel) -> *const c_char {
    let Some(model) = model.as_ref() else {
        return c"".as_ptr();
    };
    match model.inner.classifier.kind_name() {
        "mckelm" => c"mckelm".as_ptr(),
        "kelm" => c"kelm".as_ptr(),
        "elm" => c"elm".as_ptr(),
        "rkelm" => c"rkelm".as_ptr(),
        "knn" => c"knn".as_ptr(),
        _ => c"gnb".as_ptr(),
    }
}

/// Classify `rows` feature rows stored row-major in `features`
/// (`rows * columns` doubles; `columns` must match
/// [`mck_model_feature_count`]). Writes one label per row into
/// `out_labels`, in the label values of the original training file.
///
/// Feature values are held at single precision internally, matching
/// the on-disk dataset formats. With `score_average` false the
/// multicolumn machine combines its columns by majority vote;
/// with true it averages their raw scores. Other classifiers ignore
/// the flag.
///
/// # Safety
/// `model` must be null or a live handle; `features` must be null or
/// `rows * columns` readable doubles; `out_labels` must be null or
/// `rows` writable 64-bit integers.
#[no_mangle]
pub unsafe extern "C" fn mck_predict(
    model: *const MckModel,
    features: *const f64,
    rows: u64,
    columns: u64,
    score_average: bool,
    out_labels: *mut i64,
) -> MckStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else {
            return fail(MckStatus::NullPointer, "model is null");
        };
        if features.is_null() {
            return fail(MckStatus::NullPointer, "features is null");
        }
        if out_labels.is_null() {
            return fail(MckStatus::NullPointer, "out_labels is null");
        }
        let rows = match take_u64(rows, "rows") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let columns = match take_u64(columns, "columns") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if rows == 0 {
            return fail(MckStatus::Invalid, "rows must be at least 1");
        }
        let expected = model.inner.input_dim();
        if columns != expected {
            return fail(
                MckStatus::Invalid,
                format!("model expects {expected} columns, got {columns}"),
            );
        }
        let Some(total) = rows.checked_mul(columns) else {
            return fail(MckStatus::Invalid, "rows * columns overflows");
        };
        let values = std::slice::from_raw_parts(features, total);
        let matrix =
            Array2::from_shape_fn((rows, columns), |(i, j)| values[i * columns + j] as f32);
        let queries = match Dataset::new(matrix, vec![0; rows], 1) {
            Ok(d) => d,
            Err(e) => return fail_with(&e),
        };
        let mode = if score_average { VoteMode::ScoreAverage } else { VoteMode::Majority };
        match model.inner.predict(&queries, mode) {
            Ok(prediction) => {
                let out = std::slice::from_raw_parts_mut(out_labels, rows);
                out.copy_from_slice(&prediction.labels);
                MckStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}
