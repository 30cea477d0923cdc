//! Gradient flows of the functionals, and the linear solves built on the
//! same operators: the primitive Yang-Mills correction `A′ = A + ξ` and the
//! least-squares search for a cone field `B`.
//!
//! Flows descend the half-gradient, `∂A/∂t = −r(A)`, so the primitive
//! Yang-Mills flow is `∂A/∂t = −d_A*F_p`.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use serde::Serialize;

use crate::algebra::Algebra;
use crate::domain::TorusDomain;
use crate::error::{Error, Result};
use crate::form::DifferentialForm;
use crate::functionals::{self, FunctionalKind};
use crate::gauge::Connection;
use crate::metric::Metric;
use crate::symplectic;

/// RK4 stability limit on the negative real axis, with a margin.
const RK4_REAL_STABILITY: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowConfig {
    pub kind: FunctionalKind,
    /// Initial step; `None` picks [`default_step`].
    pub step: Option<f64>,
    pub max_steps: usize,
    /// Stop once every residual sup norm is at most this.
    pub tolerance: f64,
    /// Record every `stride` accepted steps (the final state is always recorded).
    pub stride: usize,
    pub max_halvings: usize,
    /// Seed for the stability estimate.
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            kind: FunctionalKind::Pym,
            step: None,
            max_steps: 500,
            tolerance: 1e-8,
            stride: 1,
            max_halvings: 30,
            seed: 1,
        }
    }
}

impl FlowConfig {
    fn validate(&self) -> Result<()> {
        if let Some(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!("flow step must be positive, got {h}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("flow tolerance must be positive".into()));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("trace stride must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub connection: Connection,
    pub b: Option<DifferentialForm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRecord {
    pub step: usize,
    pub time: f64,
    pub value_ym: f64,
    pub value_pym: f64,
    pub value_phi: f64,
    /// Value of the functional being flowed.
    pub value: f64,
    /// Largest residual sup norm.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTrace {
    pub kind: FunctionalKind,
    pub records: Vec<FlowRecord>,
    pub steps: usize,
    pub halvings: usize,
    pub final_step: f64,
    pub converged: bool,
}

pub const CSV_HEADER: [&str; 5] = ["time", "value_ym", "value_pym", "value_phi", "residual"];

impl FlowTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidParameter(format!("writing trace: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.time.to_string(),
                r.value_ym.to_string(),
                r.value_pym.to_string(),
                r.value_phi.to_string(),
                r.residual.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidParameter(format!("writing trace: {e}")))
    }

    /// Largest increase of the flowed functional between consecutive records.
    pub fn max_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].value - w[0].value)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn record(kind: FunctionalKind, state: &FlowState, g: &Metric, step: usize, time: f64) -> Result<FlowRecord> {
    let a = &state.connection;
    let (ym, pym, phi, _) = functionals::pythagoras(a, g)?;
    let residual = functionals::el_residual(kind, a, state.b.as_ref(), g)?
        .iter()
        .map(DifferentialForm::max_abs)
        .fold(0.0, f64::max);
    let value = match kind {
        FunctionalKind::Ym => ym,
        FunctionalKind::Pym => pym,
        FunctionalKind::Phi => phi,
        FunctionalKind::Cone => functionals::value(kind, a, state.b.as_ref(), g)?,
    };
    Ok(FlowRecord {
        step,
        time,
        value_ym: ym,
        value_pym: pym,
        value_phi: phi,
        value,
        residual,
    })
}

/// `−r(state)`, the flow velocity.
fn velocity(kind: FunctionalKind, state: &FlowState, g: &Metric) -> Result<(DifferentialForm, Option<DifferentialForm>)> {
    let grad = functionals::gradient(kind, &state.connection, state.b.as_ref(), g)?;
    Ok((grad.a.scale(-1.0), grad.b.map(|b| b.scale(-1.0))))
}

fn advance(state: &FlowState, h: f64, v: &(DifferentialForm, Option<DifferentialForm>)) -> Result<FlowState> {
    Ok(FlowState {
        connection: state.connection.shifted(&v.0.scale(h))?,
        b: match (&state.b, &v.1) {
            (Some(b), Some(vb)) => Some(b.axpy(h, vb)?),
            (b, _) => b.clone(),
        },
    })
}

fn combine(
    parts: [&(DifferentialForm, Option<DifferentialForm>); 4],
) -> Result<(DifferentialForm, Option<DifferentialForm>)> {
    let weights = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
    let mut a = parts[0].0.scale(weights[0]);
    for (p, w) in parts.iter().zip(weights).skip(1) {
        a = a.axpy(w, &p.0)?;
    }
    let b = match &parts[0].1 {
        Some(b0) => {
            let mut b = b0.scale(weights[0]);
            for (p, w) in parts.iter().zip(weights).skip(1) {
                b = b.axpy(w, p.1.as_ref().expect("B velocity"))?;
            }
            Some(b)
        }
        None => None,
    };
    Ok((a, b))
}

fn rk4_step(kind: FunctionalKind, state: &FlowState, h: f64, g: &Metric) -> Result<FlowState> {
    let k1 = velocity(kind, state, g)?;
    let k2 = velocity(kind, &advance(state, 0.5 * h, &k1)?, g)?;
    let k3 = velocity(kind, &advance(state, 0.5 * h, &k2)?, g)?;
    let k4 = velocity(kind, &advance(state, h, &k3)?, g)?;
    advance(state, h, &combine([&k1, &k2, &k3, &k4])?)
}

fn state_is_finite(s: &FlowState) -> bool {
    s.connection.potential().is_finite() && s.b.as_ref().map_or(true, DifferentialForm::is_finite)
}

/// Largest eigenvalue of the linearised flow operator, by power iteration on
/// difference quotients of the gradient.
pub fn estimate_stiffness(kind: FunctionalKind, state: &FlowState, g: &Metric, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = state.connection.potential();
    let mut va = a0.with_vec(&(0..a0.to_vec().len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
    let mut vb = state
        .b
        .as_ref()
        .map(|b| b.with_vec(&(0..b.to_vec().len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()));
    let base = velocity(kind, state, g)?;
    let size = |a: &DifferentialForm, b: &Option<DifferentialForm>| {
        a.max_abs().max(b.as_ref().map_or(0.0, DifferentialForm::max_abs))
    };
    let eps = 1e-6 * (1.0 + size(a0, &state.b));
    let mut lambda = 0.0;
    for _ in 0..25 {
        let s = size(&va, &vb);
        if s == 0.0 {
            return Ok(0.0);
        }
        va = va.scale(1.0 / s);
        vb = vb.map(|b| b.scale(1.0 / s));
        let probe = advance(state, eps, &(va.clone(), vb.clone()))?;
        let moved = velocity(kind, &probe, g)?;
        va = moved.0.sub(&base.0)?.scale(1.0 / eps);
        vb = match (moved.1, &base.1) {
            (Some(m), Some(b0)) => Some(m.sub(b0)?.scale(1.0 / eps)),
            _ => None,
        };
        lambda = size(&va, &vb);
    }
    Ok(lambda)
}

/// `min(0.1 h², 2.5/λ)` for grid spacing `h` and estimated stiffness `λ`.
pub fn default_step(kind: FunctionalKind, state: &FlowState, g: &Metric, seed: u64) -> Result<f64> {
    let torus = state.connection.domain().torus("flow")?;
    let h = (0..torus.dim()).map(|i| torus.spacing(i)).fold(f64::INFINITY, f64::min);
    let lambda = 1.1 * estimate_stiffness(kind, state, g, seed)?;
    let cfl = 0.1 * h * h;
    Ok(if lambda > 0.0 { cfl.min(RK4_REAL_STABILITY / lambda) } else { cfl })
}

/// Run a gradient flow with classical RK4, halving the step whenever the
/// flowed functional would increase.
pub fn flow_run(
    a0: &Connection,
    b0: Option<&DifferentialForm>,
    cfg: &FlowConfig,
    g: &Metric,
) -> Result<(FlowState, FlowTrace)> {
    cfg.validate()?;
    let kind = cfg.kind;
    a0.domain().torus("flow_run")?;
    if a0.domain().dim() < 4 {
        return Err(Error::DimensionTooSmall {
            op: "flow_run",
            dim: a0.domain().dim(),
        });
    }
    if kind == FunctionalKind::Cone && b0.is_none() {
        return Err(Error::InvalidParameter("the cone flow needs an initial B".into()));
    }
    let mut state = FlowState {
        connection: a0.clone(),
        b: if kind == FunctionalKind::Cone { b0.cloned() } else { None },
    };
    let mut current = record(kind, &state, g, 0, 0.0)?;
    let mut trace = FlowTrace {
        kind,
        records: vec![current],
        steps: 0,
        halvings: 0,
        final_step: 0.0,
        converged: current.residual <= cfg.tolerance,
    };
    if trace.converged {
        return Ok((state, trace));
    }
    let mut h = match cfg.step {
        Some(h) => h,
        None => default_step(kind, &state, g, cfg.seed)?,
    };
    let mut time = 0.0;
    for step in 1..=cfg.max_steps {
        let (next, rec) = loop {
            let candidate = rk4_step(kind, &state, h, g)?;
            if state_is_finite(&candidate) {
                let rec = record(kind, &candidate, g, step, time + h)?;
                let slack = 1e-12 * current.value.abs().max(1.0);
                if rec.value.is_finite() && rec.value - current.value <= slack {
                    break (candidate, rec);
                }
            }
            trace.halvings += 1;
            if trace.halvings > cfg.max_halvings {
                if !state_is_finite(&candidate) {
                    return Err(Error::NotFinite("flow state"));
                }
                return Err(Error::StepUnderflow {
                    halvings: trace.halvings,
                    time,
                });
            }
            log::debug!("flow step {step}: halving step to {}", h / 2.0);
            h /= 2.0;
        };
        state = next;
        time += h;
        current = rec;
        trace.steps = step;
        trace.converged = rec.residual <= cfg.tolerance;
        if step % cfg.stride == 0 || trace.converged || step == cfg.max_steps {
            trace.records.push(rec);
        }
        if trace.converged {
            break;
        }
    }
    trace.final_step = h;
    Ok((state, trace))
}

/// Result of a preconditioned conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for a symmetric positive semidefinite
/// system `A x = b`, stopping when `done(r)` holds for the residual `b − Ax`.
pub fn pcg(
    apply: impl Fn(&[f64]) -> Result<Vec<f64>>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Vec<f64>,
    done: impl Fn(&[f64]) -> bool,
    max_iter: usize,
) -> Result<CgOutcome> {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let mut x = x0;
    let ax = apply(&x)?;
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if done(&r) {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            converged: true,
        });
    }
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = apply(&p)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                converged: done(&r),
            });
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if done(&r) {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                converged: true,
            });
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok(CgOutcome {
        solution: x,
        iterations: max_iter,
        converged: false,
    })
}

/// Apply a Fourier multiplier to each point-block of a coefficient vector.
fn blockwise_multiplier(torus: &TorusDomain, v: &[f64], mult: impl Fn(&[f64]) -> f64 + Sync + Copy) -> Vec<f64> {
    v.chunks(torus.num_points())
        .flat_map(|c| torus.apply_multiplier(c, mult))
        .collect()
}

fn abelian_torus4<'a>(a: &'a Connection, op: &'static str) -> Result<&'a TorusDomain> {
    if a.algebra() != Algebra::Abelian {
        return Err(Error::AbelianOnly(op));
    }
    let torus = a.domain().torus(op)?;
    if torus.dim() != 4 {
        return Err(Error::InvalidParameter(format!("{op} needs a 4-torus")));
    }
    Ok(torus)
}

/// The primitive Yang-Mills correction of an abelian connection.
#[derive(Debug, Clone)]
pub struct PymConstruction {
    pub connection: Connection,
    pub xi: DifferentialForm,
    pub iterations: usize,
    /// `‖d*F′_p‖∞`.
    pub pym_residual: f64,
    /// `‖d*F′‖∞`.
    pub ym_residual: f64,
}

/// Find `ξ` with `∂₊*(F_p + ∂₊ξ) = 0` and return `A′ = A + ξ`, a primitive
/// Yang-Mills connection with `‖d*F′_p‖∞ ≤ tolerance`.
pub fn make_pym_from_ym(a: &Connection, g: &Metric, tolerance: f64) -> Result<PymConstruction> {
    let torus = abelian_torus4(a, "make_pym_from_ym")?;
    let f_p = symplectic::lefschetz_decompose_2form(&a.curvature()?)?.primitive;
    let input_pym = g.codifferential(&f_p)?.max_abs();
    let input_ym = g.codifferential(&a.curvature()?)?.max_abs();
    let template = DifferentialForm::zeros(a.domain(), Algebra::Abelian, 1)?;
    let weights = g.quadrature_weights(&template)?;
    let op = |xi: &DifferentialForm| -> Result<DifferentialForm> {
        g.codifferential(&symplectic::primitive_project(&xi.exterior_derivative()?)?)
    };
    let apply = |v: &[f64]| -> Result<Vec<f64>> {
        let out = op(&template.with_vec(v))?.to_vec();
        Ok(out.iter().zip(&weights).map(|(o, w)| o * w).collect())
    };
    let precond = |r: &[f64]| {
        blockwise_multiplier(torus, r, |k| {
            let k2: f64 = k.iter().map(|x| x * x).sum();
            if k2 == 0.0 { 1.0 } else { 1.0 / k2 }
        })
    };
    let rhs: Vec<f64> = g
        .codifferential(&f_p)?
        .scale(-1.0)
        .to_vec()
        .iter()
        .zip(&weights)
        .map(|(b, w)| b * w)
        .collect();
    let target = 0.05 * tolerance;
    let done = |r: &[f64]| r.iter().zip(&weights).all(|(r, w)| (r / w).abs() <= target);
    let mut x = vec![0.0; rhs.len()];
    let mut iterations = 0;
    let cap = 4000;
    let mut pym_residual = input_pym;
    for _restart in 0..8 {
        let out = pcg(apply, precond, &rhs, x, done, cap - iterations)?;
        x = out.solution;
        iterations += out.iterations;
        let xi = template.with_vec(&x);
        let f_new = symplectic::lefschetz_decompose_2form(&a.shifted(&xi)?.curvature()?)?.primitive;
        pym_residual = g.codifferential(&f_new)?.max_abs();
        if pym_residual <= tolerance || iterations >= cap {
            break;
        }
    }
    if pym_residual > tolerance {
        return Err(Error::NoConvergence {
            iterations,
            residual: pym_residual,
        });
    }
    let xi = template.with_vec(&x);
    let connection = a.shifted(&xi)?;
    let ym_residual = g.codifferential(&connection.curvature()?)?.max_abs();
    if input_ym <= tolerance && input_pym > tolerance && ym_residual <= 10.0 * tolerance {
        return Err(Error::Invariant(format!(
            "the primitive correction of a non-primitive Yang-Mills connection is Yang-Mills (‖d*F′‖ = {ym_residual:e})"
        )));
    }
    Ok(PymConstruction {
        connection,
        xi,
        iterations,
        pym_residual,
        ym_residual,
    })
}

/// Outcome of the least-squares search for a cone field `B` of an abelian connection.
#[derive(Debug, Clone, Serialize)]
pub struct ConeBSearch {
    pub starts: usize,
    /// Smallest `max(‖r₁‖∞, ‖r₂‖∞)` reached.
    pub floor: f64,
    pub tolerance: f64,
    /// Number of starts converging to a `B` with both residuals within tolerance.
    pub hits: usize,
    /// Number of pairwise distinct such `B` (sup distance above `1e-6`).
    pub distinct: usize,
    #[serde(skip)]
    pub best: Option<DifferentialForm>,
}

/// Minimise `‖d*(F + ωB)‖² + ‖ΛF + nB + d*dB‖²` over `B` from `starts`
/// random initial fields, by conjugate gradients on the normal equations.
pub fn cone_b_search(a: &Connection, g: &Metric, starts: usize, seed: u64, tolerance: f64) -> Result<ConeBSearch> {
    let torus = abelian_torus4(a, "cone_b_search")?;
    let n = symplectic::half_dim(a.domain())? as f64;
    let omega = symplectic::omega(a.domain())?;
    let f = a.curvature()?;
    let lf = symplectic::dual_lefschetz(&f)?;
    let df = g.codifferential(&f)?;
    let template = DifferentialForm::zeros(a.domain(), Algebra::Abelian, 0)?;
    let weights = g.quadrature_weights(&template)?;
    // T B = (d*(ωB), nB + d*dB)
    let t = |b: &DifferentialForm| -> Result<(DifferentialForm, DifferentialForm)> {
        let first = g.codifferential(&omega.wedge(b, crate::form::Pairing::Plain)?)?;
        let second = b.scale(n).add(&g.codifferential(&b.exterior_derivative()?)?)?;
        Ok((first, second))
    };
    let t_adj = |u: &DifferentialForm, v: &DifferentialForm| -> Result<DifferentialForm> {
        let first = DifferentialForm::scalar(a.domain(), g.pointwise_inner(&omega, &u.exterior_derivative()?)?)?;
        first
            .axpy(n, v)?
            .add(&g.codifferential(&v.exterior_derivative()?)?)
    };
    let apply = |v: &[f64]| -> Result<Vec<f64>> {
        let (u, w) = t(&template.with_vec(v))?;
        let out = t_adj(&u, &w)?.to_vec();
        Ok(out.iter().zip(&weights).map(|(o, w)| o * w).collect())
    };
    let precond = |r: &[f64]| {
        blockwise_multiplier(torus, r, |k| {
            let k2: f64 = k.iter().map(|x| x * x).sum();
            1.0 / (k2 + (n + k2) * (n + k2))
        })
    };
    let rhs: Vec<f64> = t_adj(&df, &lf)?
        .scale(-1.0)
        .to_vec()
        .iter()
        .zip(&weights)
        .map(|(b, w)| b * w)
        .collect();
    let residuals = |b: &DifferentialForm| -> Result<f64> {
        let (u, w) = t(b)?;
        Ok(u.add(&df)?.max_abs().max(w.add(&lf)?.max_abs()))
    };
    let scale = rhs.iter().zip(&weights).map(|(r, w)| (r / w).abs()).fold(0.0, f64::max);
    let target = 1e-10 * scale.max(1.0);
    let done = |r: &[f64]| r.iter().zip(&weights).all(|(r, w)| (r / w).abs() <= target);
    let mut floor = f64::INFINITY;
    let mut best: Option<DifferentialForm> = None;
    let mut hits: Vec<DifferentialForm> = Vec::new();
    for s in 0..starts {
        let b0 = crate::presets::random_zero_form(a.domain(), Algebra::Abelian, seed.wrapping_add(s as u64), 2.0)?;
        let out = pcg(apply, precond, &rhs, b0.to_vec(), done, 2000)?;
        log::info!("cone search start {s}: {} iterations, converged {}", out.iterations, out.converged);
        let b = template.with_vec(&out.solution);
        let res = residuals(&b)?;
        if res < floor {
            floor = res;
            best = Some(b.clone());
        }
        if res <= tolerance {
            hits.push(b);
        }
    }
    let mut distinct: Vec<&DifferentialForm> = Vec::new();
    for b in &hits {
        if distinct.iter().all(|d| d.sub(b).map_or(true, |x| x.max_abs() > 1e-6)) {
            distinct.push(b);
        }
    }
    Ok(ConeBSearch {
        starts,
        floor,
        tolerance,
        hits: hits.len(),
        distinct: distinct.len(),
        best,
    })
}
