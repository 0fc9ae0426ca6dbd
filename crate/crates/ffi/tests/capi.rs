//! The C surface exercised the way a C caller would use it, plus
//! parity checks against the underlying library.

use std::ffi::{CStr, CString};
use std::ptr;

use mckelm::dataset::{gen_synthetic, save_csv, SyntheticShape};
use mckelm::mckelm::VoteMode;
use mckelm::model::{train_model_file, ClassifierChoice, TrainRecipe};

use mckelm_ffi::{
    mck_last_error, mck_model_class_count, mck_model_feature_count, mck_model_free,
    mck_model_kind, mck_model_load, mck_model_save, mck_predict, mck_train,
    mck_train_options_default, mck_version, MckModel, MckStatus,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(mck_last_error()) }.to_string_lossy().into_owned()
}

fn c_path(path: &std::path::Path) -> CString {
    CString::new(path.to_str().unwrap()).unwrap()
}

/// A labelled CSV plus the same rows as a row-major f64 buffer.
fn sample_csv(dir: &std::path::Path) -> (std::path::PathBuf, Vec<f64>, usize, usize) {
    let data = gen_synthetic(160, 3, 2, 11, SyntheticShape::Blobs).unwrap();
    let path = dir.join("train.csv");
    save_csv(&path, &data, &mckelm::dataset::LabelMap::identity(2)).unwrap();
    let f = data.features_f64();
    let flat: Vec<f64> = f.iter().copied().collect();
    (path, flat, data.n(), data.feature_count())
}

#[test]
fn train_predict_save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, flat, rows, columns) = sample_csv(dir.path());

    let mut options = mck_train_options_default();
    options.eta = 2;
    let mut handle: *mut MckModel = ptr::null_mut();
    let status = unsafe { mck_train(c_path(&csv).as_ptr(), false, &options, &mut handle) };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    unsafe {
        assert_eq!(mck_model_feature_count(handle), columns as u64);
        assert_eq!(mck_model_class_count(handle), 2);
        let kind = CStr::from_ptr(mck_model_kind(handle)).to_str().unwrap();
        assert_eq!(kind, "mckelm");
    }

    let mut got = vec![0i64; rows];
    let status = unsafe {
        mck_predict(handle, flat.as_ptr(), rows as u64, columns as u64, false, got.as_mut_ptr())
    };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());

    // The same training run through the library must agree label for
    // label.
    let (raw, labels) = mckelm::dataset::load_auto(&csv, false).unwrap();
    let mut recipe = TrainRecipe::new(ClassifierChoice::Mckelm);
    recipe.eta = 2;
    let (reference, _) = train_model_file(&recipe, &raw, labels).unwrap();
    let expected = reference.predict(&raw, VoteMode::Majority).unwrap().labels;
    assert_eq!(got, expected);

    // Save through the ABI, reload, and check nothing drifted.
    let saved = dir.path().join("model.mckm");
    let status = unsafe { mck_model_save(handle, c_path(&saved).as_ptr()) };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());

    let mut reloaded: *mut MckModel = ptr::null_mut();
    let status = unsafe { mck_model_load(c_path(&saved).as_ptr(), &mut reloaded) };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());

    let mut again = vec![0i64; rows];
    let status = unsafe {
        mck_predict(reloaded, flat.as_ptr(), rows as u64, columns as u64, true, again.as_mut_ptr())
    };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());
    // Score averaging and majority voting agree on these easy blobs.
    assert_eq!(again, got);

    unsafe {
        mck_model_free(handle);
        mck_model_free(reloaded);
    }
}

#[test]
fn every_classifier_code_trains() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, flat, rows, columns) = sample_csv(dir.path());
    for code in 0..6u32 {
        let mut options = mck_train_options_default();
        options.classifier = code;
        options.eta = 1;
        let mut handle: *mut MckModel = ptr::null_mut();
        let status = unsafe { mck_train(c_path(&csv).as_ptr(), false, &options, &mut handle) };
        assert_eq!(status, MckStatus::Ok, "classifier {code}: {}", last_error());
        let mut out = vec![0i64; rows];
        let status = unsafe {
            mck_predict(handle, flat.as_ptr(), rows as u64, columns as u64, false, out.as_mut_ptr())
        };
        assert_eq!(status, MckStatus::Ok, "classifier {code}: {}", last_error());
        assert!(out.iter().all(|&l| l == 0 || l == 1), "classifier {code}");
        unsafe { mck_model_free(handle) };
    }
}

#[test]
fn null_arguments_are_reported_not_dereferenced() {
    let mut handle: *mut MckModel = ptr::null_mut();
    let options = mck_train_options_default();

    let status = unsafe { mck_train(ptr::null(), false, &options, &mut handle) };
    assert_eq!(status, MckStatus::NullPointer);
    assert!(last_error().contains("null"), "{}", last_error());

    let status =
        unsafe { mck_train(c"x.csv".as_ptr(), false, ptr::null(), &mut handle) };
    assert_eq!(status, MckStatus::NullPointer);

    let status = unsafe { mck_model_load(c"x.mckm".as_ptr(), ptr::null_mut()) };
    assert_eq!(status, MckStatus::NullPointer);

    let status = unsafe { mck_model_save(ptr::null(), c"x.mckm".as_ptr()) };
    assert_eq!(status, MckStatus::NullPointer);

    let status =
        unsafe { mck_predict(ptr::null(), ptr::null(), 1, 1, false, ptr::null_mut()) };
    assert_eq!(status, MckStatus::NullPointer);

    unsafe {
        assert_eq!(mck_model_feature_count(ptr::null()), 0);
        assert_eq!(mck_model_class_count(ptr::null()), 0);
        let kind = CStr::from_ptr(mck_model_kind(ptr::null())).to_str().unwrap();
        assert_eq!(kind, "");
        // Freeing null must be a no-op, like free(3).
        mck_model_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_path_is_rejected() {
    let bogus = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut handle: *mut MckModel = ptr::null_mut();
    let status = unsafe { mck_model_load(bogus.as_ptr(), &mut handle) };
    assert_eq!(status, MckStatus::BadUtf8);
    assert!(last_error().contains("UTF-8"), "{}", last_error());
}

#[test]
fn missing_file_maps_to_io_status() {
    let mut handle: *mut MckModel = ptr::null_mut();
    let status =
        unsafe { mck_model_load(c"/nonexistent/never/model.mckm".as_ptr(), &mut handle) };
    assert_eq!(status, MckStatus::Io);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn unknown_codes_are_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _, _, _) = sample_csv(dir.path());
    let mut handle: *mut MckModel = ptr::null_mut();

    let mut options = mck_train_options_default();
    options.classifier = 9;
    let status = unsafe { mck_train(c_path(&csv).as_ptr(), false, &options, &mut handle) };
    assert_eq!(status, MckStatus::Invalid);
    assert!(last_error().contains("classifier code 9"), "{}", last_error());

    let mut options = mck_train_options_default();
    options.kernel = 7;
    let status = unsafe { mck_train(c_path(&csv).as_ptr(), false, &options, &mut handle) };
    assert_eq!(status, MckStatus::Invalid);
    assert!(last_error().contains("kernel code 7"), "{}", last_error());
    assert!(handle.is_null());
}

#[test]
fn wrong_query_width_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _, _, columns) = sample_csv(dir.path());
    let mut options = mck_train_options_default();
    options.eta = 1;
    let mut handle: *mut MckModel = ptr::null_mut();
    let status = unsafe { mck_train(c_path(&csv).as_ptr(), false, &options, &mut handle) };
    assert_eq!(status, MckStatus::Ok, "{}", last_error());

    let wide = vec![0.5f64; columns + 1];
    let mut out = vec![0i64; 1];
    let status = unsafe {
        mck_predict(handle, wide.as_ptr(), 1, (columns + 1) as u64, false, out.as_mut_ptr())
    };
    assert_eq!(status, MckStatus::Invalid);
    assert!(last_error().contains("columns"), "{}", last_error());

    let status = unsafe { mck_predict(handle, wide.as_ptr(), 0, columns as u64, false, out.as_mut_ptr()) };
    assert_eq!(status, MckStatus::Invalid);

    unsafe { mck_model_free(handle) };
}

#[test]
fn error_messages_are_per_thread() {
    let mut handle: *mut MckModel = ptr::null_mut();
    let status =
        unsafe { mck_model_load(c"/nonexistent/never/model.mckm".as_ptr(), &mut handle) };
    assert_eq!(status, MckStatus::Io);
    assert!(!last_error().is_empty());

    // A fresh thread has its own, still-empty message slot.
    std::thread::spawn(|| assert_eq!(last_error(), "")).join().unwrap();
}

#[test]
fn version_and_header_are_published() {
    let version = unsafe { CStr::from_ptr(mck_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));

    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mckelm.h");
    let text = std::fs::read_to_string(header).unwrap();
    for needle in ["MckStatus", "MckTrainOptions", "mck_train", "mck_predict", "mck_model_free"] {
        assert!(text.contains(needle), "header is missing {needle}");
    }
}
