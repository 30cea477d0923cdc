//! C ABI for `symflat`.
//!
//! Objects cross the boundary as opaque handles created by `symflat_*_new`
//! style constructors and released with the matching `*_free`. Every fallible
//! call returns a [`SymflatStatus`]; on failure the message is available from
//! [`symflat_last_error`] on the same thread. Strings returned by the library
//! are owned by the caller and released with [`symflat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symflat::classification::{self, Case, Coefficient, U1T4Report};
use symflat::error::Error;
use symflat::flows::{self, FlowConfig, FlowTrace};
use symflat::form::DifferentialForm;
use symflat::functionals::{self, FunctionalKind};
use symflat::presets::{Instance, Preset};
use symflat::scene::Scene;
use symflat::verify::{self, Suite, VerifyOptions};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymflatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Degree, algebra or domain mismatch, or an operation unsupported on the domain.
    DomainError = 3,
    /// Non-convergence, non-finite values or step-size underflow.
    NumericalError = 4,
    InvariantViolation = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymflatFunctional {
    Ym = 0,
    Pym = 1,
    Phi = 2,
    Cone = 3,
}

impl From<SymflatFunctional> for FunctionalKind {
    fn from(k: SymflatFunctional) -> Self {
        match k {
            SymflatFunctional::Ym => FunctionalKind::Ym,
            SymflatFunctional::Pym => FunctionalKind::Pym,
            SymflatFunctional::Phi => FunctionalKind::Phi,
            SymflatFunctional::Cone => FunctionalKind::Cone,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymflatCase {
    RExtension = 0,
    S1Extension = 1,
    FlatOnly = 2,
}

/// Value of a functional and the sup norms of its Euler-Lagrange residuals.
/// `residual_count` is 1 or 2; unused entries are 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SymflatFunctionalValue {
    pub value: f64,
    pub residuals: [f64; 2],
    pub residual_count: u32,
    pub critical: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SymflatFlowRecord {
    pub step: u64,
    pub time: f64,
    pub value_ym: f64,
    pub value_pym: f64,
    pub value_phi: f64,
    pub value: f64,
    pub residual: f64,
}

/// A preset or scene instance: connection, metric and cone field.
pub struct SymflatInstance {
    scene: Scene,
    inst: Instance,
}

pub struct SymflatTrace(FlowTrace);

pub struct SymflatReport(U1T4Report);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> SymflatStatus {
    match e {
        Error::DegreeOverflow { .. }
        | Error::DegreeMismatch { .. }
        | Error::UnsupportedDegree { .. }
        | Error::DomainMismatch
        | Error::AlgebraMismatch(_)
        | Error::RequiresTorus { .. }
        | Error::MissingAnalyticDerivative
        | Error::DimensionTooSmall { .. }
        | Error::AbelianOnly(_) => SymflatStatus::DomainError,
        Error::StepUnderflow { .. } | Error::NotFinite(_) | Error::NoConvergence { .. } => {
            SymflatStatus::NumericalError
        }
        Error::Invariant(_) => SymflatStatus::InvariantViolation,
        _ => SymflatStatus::InvalidArgument,
    }
}

struct Fail(SymflatStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SymflatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SymflatStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SymflatStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SymflatStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SymflatStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn symflat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn symflat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn symflat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn new_instance(scene: Scene, out_ptr: *mut *mut SymflatInstance) -> Result<(), Fail> {
    let slot = unsafe { out(out_ptr, "out")? };
    let inst = scene.instance()?;
    *slot = Box::into_raw(Box::new(SymflatInstance { scene, inst }));
    Ok(())
}

/// Build a preset such as `"constant_flux(0.5)"`. `resolution` 0 keeps the default.
///
/// # Safety
/// `preset` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symflat_instance_from_preset(
    preset: *const c_char,
    resolution: usize,
    out: *mut *mut SymflatInstance,
) -> SymflatStatus {
    guard(|| {
        let preset: Preset = str_arg(preset, "preset")?.parse()?;
        let mut scene = Scene::from_preset(preset);
        if resolution > 0 {
            scene.resolution = Some(resolution);
        }
        new_instance(scene, out)
    })
}

/// Build an instance from the text of a JSON scene.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symflat_instance_from_scene(
    json: *const c_char,
    out: *mut *mut SymflatInstance,
) -> SymflatStatus {
    guard(|| new_instance(Scene::from_json(str_arg(json, "json")?)?, out))
}

/// # Safety
/// `inst` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn symflat_instance_free(inst: *mut SymflatInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Dimension and number of samples of the instance's domain.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_instance_shape(
    inst: *const SymflatInstance,
    dim: *mut usize,
    points: *mut usize,
) -> SymflatStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        *out(dim, "dim")? = inst.inst.domain().dim();
        *out(points, "points")? = inst.inst.domain().num_points();
        Ok(())
    })
}

fn cone_field(inst: &SymflatInstance, kind: FunctionalKind) -> Result<Option<DifferentialForm>, Fail> {
    Ok(match kind {
        FunctionalKind::Cone => Some(inst.scene.b_field(&inst.inst)?),
        _ => None,
    })
}

/// Evaluate a functional; the cone functional uses the scene's `B`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_eval(
    inst: *const SymflatInstance,
    kind: SymflatFunctional,
    tolerance: f64,
    result: *mut SymflatFunctionalValue,
) -> SymflatStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let slot = out(result, "result")?;
        let kind = FunctionalKind::from(kind);
        let b = cone_field(inst, kind)?;
        let v = functionals::evaluate(kind, &inst.inst.connection, b.as_ref(), &inst.inst.metric, tolerance)?;
        let mut residuals = [0.0; 2];
        for (slot, r) in residuals.iter_mut().zip(&v.residual_norms) {
            *slot = *r;
        }
        *slot = SymflatFunctionalValue {
            value: v.value,
            residuals,
            residual_count: v.residual_norms.len() as u32,
            critical: v.critical,
        };
        Ok(())
    })
}

/// `‖F‖², ‖F_p‖², ‖Φω‖²` and the relative defect of their sum, written to `out[0..4]`.
///
/// # Safety
/// `values` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn symflat_pythagoras(inst: *const SymflatInstance, values: *mut f64) -> SymflatStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let (a, b, c, d) = functionals::pythagoras(&inst.inst.connection, &inst.inst.metric)?;
        std::slice::from_raw_parts_mut(values, 4).copy_from_slice(&[a, b, c, d]);
        Ok(())
    })
}

/// Run a gradient flow. `step <= 0` picks the default step.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_flow(
    inst: *const SymflatInstance,
    kind: SymflatFunctional,
    max_steps: usize,
    step: f64,
    tolerance: f64,
    trace: *mut *mut SymflatTrace,
) -> SymflatStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let slot = out(trace, "trace")?;
        let kind = FunctionalKind::from(kind);
        let b = cone_field(inst, kind)?;
        let cfg = FlowConfig {
            kind,
            step: (step > 0.0).then_some(step),
            max_steps,
            tolerance,
            ..Default::default()
        };
        let (_, t) = flows::flow_run(&inst.inst.connection, b.as_ref(), &cfg, &inst.inst.metric)?;
        *slot = Box::into_raw(Box::new(SymflatTrace(t)));
        Ok(())
    })
}

/// Number of records, accepted steps and whether the flow reached its tolerance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_trace_summary(
    trace: *const SymflatTrace,
    records: *mut usize,
    steps: *mut usize,
    converged: *mut bool,
) -> SymflatStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.0;
        *out(records, "records")? = t.records.len();
        *out(steps, "steps")? = t.steps;
        *out(converged, "converged")? = t.converged;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_trace_record(
    trace: *const SymflatTrace,
    index: usize,
    record: *mut SymflatFlowRecord,
) -> SymflatStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.0;
        let slot = out(record, "record")?;
        let r = t.records.get(index).ok_or_else(|| {
            Fail(
                SymflatStatus::InvalidArgument,
                format!("record {index} out of range ({} records)", t.records.len()),
            )
        })?;
        *slot = SymflatFlowRecord {
            step: r.step as u64,
            time: r.time,
            value_ym: r.value_ym,
            value_pym: r.value_pym,
            value_phi: r.value_phi,
            value: r.value,
            residual: r.residual,
        };
        Ok(())
    })
}

/// Write the trace as CSV with header `time,value_ym,value_pym,value_phi,residual`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_trace_write_csv(trace: *const SymflatTrace, path: *const c_char) -> SymflatStatus {
    guard(|| {
        let t = &deref(trace, "trace")?.0;
        let path = str_arg(path, "path")?;
        let file = File::create(path).map_err(|e| Fail(SymflatStatus::Io, format!("{path}: {e}")))?;
        t.write_csv(BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `trace` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn symflat_trace_free(trace: *mut SymflatTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Classify `U(1)` bundles over T⁴ for `ζ = c₁dx¹² + c₂dx³⁴`. The coefficients
/// are rationals such as `"3/4"`; a null `c2` declares `c₁/c₂` irrational.
///
/// # Safety
/// `c1` must be a NUL-terminated string, `c2` one or null; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symflat_classify(
    c1: *const c_char,
    c2: *const c_char,
    report: *mut *mut SymflatReport,
) -> SymflatStatus {
    guard(|| {
        let slot = out(report, "report")?;
        let c1 = Coefficient::Rational(classification::parse_rational(str_arg(c1, "c1")?)?);
        let c2 = if c2.is_null() {
            Coefficient::IrrationalRatio
        } else {
            Coefficient::Rational(classification::parse_rational(str_arg(c2, "c2")?)?)
        };
        let r = classification::classify_u1_t4(&c1, &c2)?;
        *slot = Box::into_raw(Box::new(SymflatReport(r)));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn symflat_report_case(report: *const SymflatReport, case: *mut SymflatCase) -> SymflatStatus {
    guard(|| {
        let r = &deref(report, "report")?.0;
        *out(case, "case")? = match r.verdict.case {
            Case::RExtension => SymflatCase::RExtension,
            Case::S1Extension { .. } => SymflatCase::S1Extension,
            Case::FlatOnly => SymflatCase::FlatOnly,
        };
        Ok(())
    })
}

/// The report as JSON; `*c0` receives the exact rational `c₀` or null.
/// Both strings are released with [`symflat_string_free`].
///
/// # Safety
/// Pointers must be valid; `c0` may be null.
#[no_mangle]
pub unsafe extern "C" fn symflat_report_json(
    report: *const SymflatReport,
    json: *mut *mut c_char,
    c0: *mut *mut c_char,
) -> SymflatStatus {
    guard(|| {
        let r = &deref(report, "report")?.0;
        let slot = out(json, "json")?;
        let text = serde_json::to_string(r).map_err(|e| Fail(SymflatStatus::InvalidArgument, e.to_string()))?;
        if let Some(c0) = c0.as_mut() {
            *c0 = r.c0.as_ref().map_or(ptr::null_mut(), |c| owned_string(c.to_string()));
        }
        *slot = owned_string(text);
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn symflat_report_free(report: *mut SymflatReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Run a verification suite (`"all"`, `"t4"`, `"bpst"`, `"cone"`, `"classify"`,
/// `"cs"`). `*all_pass` is 1 when every check passes; `*json` receives the rows.
///
/// # Safety
/// Pointers must be valid; `json` may be null.
#[no_mangle]
pub unsafe extern "C" fn symflat_verify(
    suite: *const c_char,
    resolution: usize,
    all_pass: *mut c_int,
    json: *mut *mut c_char,
) -> SymflatStatus {
    guard(|| {
        let suite: Suite = str_arg(suite, "suite")?.parse()?;
        let flag = out(all_pass, "all_pass")?;
        let mut opts = VerifyOptions::default();
        if resolution > 0 {
            opts.resolution = resolution;
        }
        let checks = verify::run_suite(suite, &opts)?;
        *flag = checks.iter().all(|c| c.pass) as c_int;
        if let Some(slot) = json.as_mut() {
            let text =
                serde_json::to_string(&checks).map_err(|e| Fail(SymflatStatus::InvalidArgument, e.to_string()))?;
            *slot = owned_string(text);
        }
        Ok(())
    })
}
