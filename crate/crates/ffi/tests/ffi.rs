use std::ffi::{CStr, CString};
use std::ptr;

use tmhcrf_ffi::*;

const TOY: &str = ">r1\nCAAF\n0111\n>r2\nCDED\n1000\n>r3\nDFAE\n0110\n";
const TOY_CONFIG: &str = "preset = exp1\ngroup.start_end_edge = off\nproperty.Hydrophobic = ACF\nproperty.Polar = CDE\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = tmh_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn train_toy() -> *mut TmhModel {
    let (d, cfg) = (c(TOY), c(TOY_CONFIG));
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tmh_train(d.as_ptr(), cfg.as_ptr(), &mut m) }, TmhStatus::Ok);
    assert!(!m.is_null());
    m
}

fn predict(m: *const TmhModel, seq: &str) -> Result<String, TmhStatus> {
    let s = c(seq);
    let mut out = ptr::null_mut();
    match unsafe { tmh_predict(m, s.as_ptr(), &mut out) } {
        TmhStatus::Ok => {
            let labels = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
            unsafe { tmh_string_free(out) };
            Ok(labels)
        }
        e => Err(e),
    }
}

#[test]
fn train_predict_free() {
    let m = train_toy();
    let mut k = 0usize;
    assert_eq!(unsafe { tmh_model_num_features(m, &mut k) }, TmhStatus::Ok);
    assert_eq!(k, 10);
    assert_eq!(predict(m, "EAFD").unwrap(), "0110");
    assert!(tmh_last_error().is_null());
    unsafe { tmh_model_free(m) };
}

#[test]
fn save_load_and_text_round_trip() {
    let m = train_toy();
    let dir = tempfile::tempdir().unwrap();
    let path = c(dir.path().join("m.txt").to_str().unwrap());
    assert_eq!(unsafe { tmh_model_save(m, path.as_ptr()) }, TmhStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { tmh_model_load(path.as_ptr(), &mut loaded) }, TmhStatus::Ok);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { tmh_model_to_string(loaded, &mut text) }, TmhStatus::Ok);
    let mut parsed = ptr::null_mut();
    assert_eq!(unsafe { tmh_model_from_string(text, &mut parsed) }, TmhStatus::Ok);
    let on_disk = std::fs::read_to_string(dir.path().join("m.txt")).unwrap();
    assert_eq!(unsafe { CStr::from_ptr(text) }.to_str().unwrap(), on_disk);

    for h in [m, loaded, parsed] {
        assert_eq!(predict(h, "EAFD").unwrap(), "0110");
    }
    unsafe {
        tmh_string_free(text);
        tmh_model_free(m);
        tmh_model_free(loaded);
        tmh_model_free(parsed);
    }
}

#[test]
fn error_codes() {
    let mut m = ptr::null_mut();
    let d = c(TOY);
    assert_eq!(unsafe { tmh_train(ptr::null(), ptr::null(), &mut m) }, TmhStatus::NullArgument);
    assert!(last_error().contains("dataset"));
    assert_eq!(unsafe { tmh_train(d.as_ptr(), ptr::null(), ptr::null_mut()) }, TmhStatus::NullArgument);

    let bad = c("group.nope = on\n");
    assert_eq!(unsafe { tmh_train(d.as_ptr(), bad.as_ptr(), &mut m) }, TmhStatus::Usage);
    assert!(last_error().contains("nope"));

    let junk = c(">a\nAC\n0\n");
    assert_eq!(unsafe { tmh_train(junk.as_ptr(), ptr::null(), &mut m) }, TmhStatus::Data);

    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { tmh_train(invalid.as_ptr().cast(), ptr::null(), &mut m) },
        TmhStatus::InvalidUtf8
    );

    let missing = c("/nonexistent/model.txt");
    assert_eq!(unsafe { tmh_model_load(missing.as_ptr(), &mut m) }, TmhStatus::Data);
    assert!(last_error().contains("/nonexistent/model.txt"));

    let model = train_toy();
    assert_eq!(predict(model, "EAZ?"), Err(TmhStatus::Data));
    assert_eq!(predict(ptr::null(), "EAFD"), Err(TmhStatus::NullArgument));
    unsafe {
        tmh_model_free(model);
        tmh_model_free(ptr::null_mut());
        tmh_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tmhcrf.h")).unwrap();
    for name in [
        "typedef struct TmhModel TmhModel;",
        "TMH_STATUS_OK = 0",
        "tmh_train(",
        "tmh_model_load(",
        "tmh_model_from_string(",
        "tmh_model_save(",
        "tmh_model_to_string(",
        "tmh_model_num_features(",
        "tmh_predict(",
        "tmh_model_free(",
        "tmh_string_free(",
        "tmh_last_error(",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_example_compiles_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libtmhcrf_ffi.a");
    let root = env!("CARGO_MANIFEST_DIR");
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("predict");
    let status = std::process::Command::new("cc")
        .args(["-I", &format!("{root}/include"), &format!("{root}/examples/predict.c")])
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status();
    match status {
        Ok(s) if s.success() => {}
        _ if !lib.exists() => return eprintln!("skipped: {} not built", lib.display()),
        Err(e) => return eprintln!("skipped: no C compiler ({e})"),
        Ok(s) => panic!("cc failed: {s}"),
    }
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "10 0110\n");
}
