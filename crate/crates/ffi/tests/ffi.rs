use std::ffi::{CStr, CString};
use std::ptr;

use symflat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(symflat_last_error()) }.to_string_lossy().into_owned()
}

fn preset(name: &str, resolution: usize) -> *mut SymflatInstance {
    let name = CString::new(name).unwrap();
    let mut inst = ptr::null_mut();
    let status = unsafe { symflat_instance_from_preset(name.as_ptr(), resolution, &mut inst) };
    assert_eq!(status, SymflatStatus::Ok, "{}", last_error());
    assert!(!inst.is_null());
    inst
}

#[test]
fn evaluates_the_t4_example() {
    let inst = preset("t4_yang_mills_example", 16);
    let (mut dim, mut points) = (0, 0);
    unsafe {
        assert_eq!(symflat_instance_shape(inst, &mut dim, &mut points), SymflatStatus::Ok);
        assert_eq!((dim, points), (4, 16usize.pow(4)));
        let mut ym = SymflatFunctionalValue::default();
        assert_eq!(symflat_eval(inst, SymflatFunctional::Ym, 1e-6, &mut ym), SymflatStatus::Ok);
        assert!(ym.critical);
        assert_eq!(ym.residual_count, 1);
        let mut phi = SymflatFunctionalValue::default();
        assert_eq!(symflat_eval(inst, SymflatFunctional::Phi, 1e-6, &mut phi), SymflatStatus::Ok);
        assert!(!phi.critical);
        assert_eq!(phi.residual_count, 2);
        assert!((phi.value - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-9);
        let mut parts = [0.0; 4];
        assert_eq!(symflat_pythagoras(inst, parts.as_mut_ptr()), SymflatStatus::Ok);
        assert!(parts[3] < 1e-12);
        symflat_instance_free(inst);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let mut inst = ptr::null_mut();
    let bad = CString::new("no_such_preset").unwrap();
    let status = unsafe { symflat_instance_from_preset(bad.as_ptr(), 0, &mut inst) };
    assert_eq!(status, SymflatStatus::InvalidArgument);
    assert!(inst.is_null());
    assert!(last_error().contains("no_such_preset"));

    let status = unsafe { symflat_instance_from_preset(ptr::null(), 0, &mut inst) };
    assert_eq!(status, SymflatStatus::NullPointer);

    let bpst = preset("bpst", 0);
    let mut v = SymflatFunctionalValue::default();
    let status = unsafe { symflat_eval(bpst, SymflatFunctional::Pym, 1e-6, &mut v) };
    assert_eq!(status, SymflatStatus::DomainError);
    unsafe { symflat_instance_free(bpst) };

    let mut ok = SymflatFunctionalValue::default();
    let flat = preset("flat_wilson(0.1,0.2,0.3,0.4)", 8);
    unsafe {
        assert_eq!(symflat_eval(flat, SymflatFunctional::Ym, 1e-6, &mut ok), SymflatStatus::Ok);
        symflat_instance_free(flat);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn scene_json_is_validated() {
    let good = CString::new(r#"{"preset": "constant_flux(0.25)", "resolution": 8}"#).unwrap();
    let bad = CString::new(r#"{"preset": "constant_flux(0.25)", "extra": 1}"#).unwrap();
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(symflat_instance_from_scene(good.as_ptr(), &mut inst), SymflatStatus::Ok);
        let mut cone = SymflatFunctionalValue::default();
        assert_eq!(symflat_eval(inst, SymflatFunctional::Cone, 1e-8, &mut cone), SymflatStatus::Ok);
        assert!(cone.critical && cone.value.abs() < 1e-20);
        symflat_instance_free(inst);
        let mut other = ptr::null_mut();
        assert_eq!(symflat_instance_from_scene(bad.as_ptr(), &mut other), SymflatStatus::InvalidArgument);
    }
}

#[test]
fn flow_trace_round_trip() {
    let inst = preset("t4_yang_mills_example", 8);
    let mut trace = ptr::null_mut();
    unsafe {
        let status = symflat_flow(inst, SymflatFunctional::Pym, 20, 0.0, 1e-8, &mut trace);
        assert_eq!(status, SymflatStatus::Ok, "{}", last_error());
        let (mut records, mut steps, mut converged) = (0, 0, true);
        assert_eq!(symflat_trace_summary(trace, &mut records, &mut steps, &mut converged), SymflatStatus::Ok);
        assert_eq!((records, steps, converged), (21, 20, false));
        let mut first = SymflatFlowRecord::default();
        let mut last = SymflatFlowRecord::default();
        assert_eq!(symflat_trace_record(trace, 0, &mut first), SymflatStatus::Ok);
        assert_eq!(symflat_trace_record(trace, records - 1, &mut last), SymflatStatus::Ok);
        assert!(last.value_pym < first.value_pym);
        assert_eq!(symflat_trace_record(trace, records, &mut last), SymflatStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let c_path = CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(symflat_trace_write_csv(trace, c_path.as_ptr()), SymflatStatus::Ok);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("time,value_ym,value_pym,value_phi,residual\n"));
        assert_eq!(text.lines().count(), 22);
        symflat_trace_free(trace);
        symflat_instance_free(inst);
    }
}

#[test]
fn classification_reports() {
    let (one, half) = (CString::new("1").unwrap(), CString::new("1/2").unwrap());
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(symflat_classify(one.as_ptr(), half.as_ptr(), &mut report), SymflatStatus::Ok);
        let mut case = SymflatCase::FlatOnly;
        assert_eq!(symflat_report_case(report, &mut case), SymflatStatus::Ok);
        assert_eq!(case, SymflatCase::S1Extension);
        let (mut json, mut c0) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(symflat_report_json(report, &mut json, &mut c0), SymflatStatus::Ok);
        assert_eq!(CStr::from_ptr(c0).to_str().unwrap(), "1/2");
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["c0"], "1/2");
        symflat_string_free(json);
        symflat_string_free(c0);
        symflat_report_free(report);

        let mut irr = ptr::null_mut();
        assert_eq!(symflat_classify(one.as_ptr(), ptr::null(), &mut irr), SymflatStatus::Ok);
        assert_eq!(symflat_report_case(irr, &mut case), SymflatStatus::Ok);
        assert_eq!(case, SymflatCase::FlatOnly);
        let (mut json, mut c0) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(symflat_report_json(irr, &mut json, &mut c0), SymflatStatus::Ok);
        assert!(c0.is_null());
        symflat_string_free(json);
        symflat_report_free(irr);

        let zero = CString::new("0").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(symflat_classify(zero.as_ptr(), one.as_ptr(), &mut none), SymflatStatus::InvalidArgument);
        assert!(none.is_null());
    }
}

#[test]
fn verify_suite_through_the_abi() {
    let suite = CString::new("classify").unwrap();
    let mut pass = 0;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(symflat_verify(suite.as_ptr(), 0, &mut pass, &mut json), SymflatStatus::Ok);
        assert_eq!(pass, 1);
        let rows: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 6);
        symflat_string_free(json);
        let bogus = CString::new("bogus").unwrap();
        assert_eq!(symflat_verify(bogus.as_ptr(), 0, &mut pass, ptr::null_mut()), SymflatStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/symflat.h");
    for name in [
        "symflat_instance_from_preset",
        "symflat_eval",
        "symflat_flow",
        "symflat_classify",
        "symflat_verify",
        "symflat_last_error",
        "typedef struct SymflatInstance SymflatInstance",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}
