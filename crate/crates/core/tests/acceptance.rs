//! Acceptance harness: runs every criterion and prints one PASS/FAIL line each.
//! Oracles are closed forms, literal values and brute-force enumerations
//! computed here, not by the library.

mod common;

use std::error::Error as StdError;
use std::f64::consts::{PI, TAU};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use symflat::algebra::Algebra;
use symflat::classification::{self, Case, Coefficient};
use symflat::cone::ConeOperator;
use symflat::domain::{Domain, PointCloudDomain};
use symflat::flows::{self, FlowConfig};
use symflat::form::DifferentialForm;
use symflat::functionals::{self, FunctionalKind};
use symflat::gauge::Connection;
use symflat::metric::Metric;
use symflat::presets::{self, Instance};
use symflat::symplectic;

type R<T> = Result<T, Box<dyn StdError>>;
type Criterion = (&'static str, fn() -> R<Verdict>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> R<Verdict> {
    Ok(Verdict { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// 1. T⁴ example

fn t4_f12(x2: f64, x3: f64) -> f64 {
    -(2.0 * x2).cos() * x3.sin() / TAU
}

fn t4_f13(x2: f64, x3: f64) -> f64 {
    (1.0 - 0.5 * (2.0 * x2).sin() * x3.cos()) / TAU
}

fn golden() -> R<serde_json::Value> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/t4_golden.json"))?;
    Ok(serde_json::from_str(&text)?)
}

fn t4_example() -> R<Verdict> {
    let inst = presets::t4_yang_mills_example(32)?;
    let (a, g, dom) = (&inst.connection, &inst.metric, inst.domain());
    let f = a.curvature()?;
    let oracle = DifferentialForm::from_fn(dom, Algebra::Abelian, 2, |x, out| {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = t4_f12(x[1], x[2]);
        out[1] = t4_f13(x[1], x[2]);
    })?;
    let f_err = f.sub(&oracle)?.max_abs();
    let ym = g.codifferential(&f)?.max_abs();
    let phi = symplectic::lefschetz_decompose_2form(&f)?.phi;
    let phi_oracle = DifferentialForm::from_fn(dom, Algebra::Abelian, 0, |x, out| {
        out[0] = -(2.0 * x[1]).cos() * x[2].sin() / (4.0 * PI)
    })?;
    let phi_err = phi.sub(&phi_oracle)?.max_abs();
    let dphi = phi.exterior_derivative()?.max_abs();

    let gold = golden()?;
    let b = phi.scale(-1.0);
    let mut worst = 0.0f64;
    for kind in FunctionalKind::ALL {
        let v = functionals::value(kind, a, Some(&b), g)?;
        let expect = gold[kind.name()].as_f64().ok_or("golden value missing")?;
        worst = worst.max(rel(v, expect));
    }
    verdict(
        f_err <= 1e-10 && ym <= 1e-6 && phi_err <= 1e-10 && dphi >= 0.01 && worst <= 1e-6,
        format!(
            "|F - closed form| = {f_err:.1e}, |d*F| = {ym:.1e}, |Phi - closed form| = {phi_err:.1e}, \
             |dPhi| = {dphi:.3}, golden rel. err {worst:.1e}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Primitive Yang-Mills correction

fn t4_correction() -> R<Verdict> {
    let inst = presets::t4_yang_mills_example(16)?;
    let g = &inst.metric;
    let out = flows::make_pym_from_ym(&inst.connection, g, 1e-6)?;
    let f = out.connection.curvature()?;
    let pym = g.codifferential(&symplectic::primitive_project(&f)?)?.max_abs();
    let ym = g.codifferential(&f)?.max_abs();
    let shift = out
        .connection
        .potential()
        .sub(inst.connection.potential())?
        .sub(&out.xi)?
        .max_abs();
    verdict(
        pym <= 1e-6 && ym >= 1e-3 && shift <= 1e-14,
        format!("|d*F'_p| = {pym:.2e}, |d*F'| = {ym:.3}, A' = A + xi ({} CG iterations)", out.iterations),
    )
}

// ---------------------------------------------------------------------------
// 3. BPST instanton

fn bpst_profile(x: &[f64]) -> (f64, f64) {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 / ((1.0 + r2) * (1.0 + r2)), 1.0 + r2)
}

fn bpst() -> R<Verdict> {
    let dom: Arc<Domain> = Arc::new(PointCloudDomain::random(1000, 2.0, 7)?.into());
    let inst = presets::bpst(&dom)?;
    let a = &inst.connection;
    let n = dom.num_points();

    // the analytic derivative table against central differences of the potential
    let h = 1e-5;
    let da = a.potential().exterior_derivative()?;
    let mut table_err = 0.0f64;
    for p in 0..n {
        let x = dom.coords(p);
        let mut partial = [[[0.0; 3]; 4]; 4]; // [mu][nu][a] = ∂_mu A_nu^a
        for mu in 0..4 {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[mu] += h;
            xm[mu] -= h;
            let (mut ap, mut am) = ([0.0; 12], [0.0; 12]);
            presets::bpst_potential(&xp, &mut ap);
            presets::bpst_potential(&xm, &mut am);
            for nu in 0..4 {
                for c in 0..3 {
                    partial[mu][nu][c] = (ap[nu * 3 + c] - am[nu * 3 + c]) / (2.0 * h);
                }
            }
        }
        let mut comp = 0;
        for mu in 0..4 {
            for nu in mu + 1..4 {
                for c in 0..3 {
                    let fd = partial[mu][nu][c] - partial[nu][mu][c];
                    table_err = table_err.max((fd - da.field(comp, c)[p]).abs());
                }
                comp += 1;
            }
        }
    }

    // F = 4/(|x|²+1)² [−T₁(dx¹⁴+dx²³) + T₂(dx¹³−dx²⁴) − T₃(dx¹²+dx³⁴)]
    let oracle = DifferentialForm::from_fn(&dom, Algebra::Su2, 2, |x, out| {
        let (s, _) = bpst_profile(x);
        out.iter_mut().for_each(|v| *v = 0.0);
        out[2] = -s; // 12
        out[3 + 1] = s; // 13
        out[2 * 3] = -s; // 14
        out[3 * 3] = -s; // 23
        out[4 * 3 + 1] = -s; // 24
        out[5 * 3 + 2] = -s; // 34
    })?;
    let f = a.curvature()?;
    let f_err = f.sub(&oracle)?.max_abs();
    let self_dual = f.sub(&inst.metric.hodge_star(&f)?)?.max_abs();
    let phi = symplectic::lefschetz_decompose_2form(&f)?.phi;
    let phi_oracle = DifferentialForm::from_fn(&dom, Algebra::Su2, 0, |x, out| {
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = -bpst_profile(x).0;
    })?;
    let phi_err = phi.sub(&phi_oracle)?.max_abs();

    // T₃ part of d_AΦ is dΦ, since no [T_a, T₃] has a T₃ component
    let dphi = a.covariant_d(&presets::bpst_phi_form(&dom)?)?;
    let mut t3_err = 0.0f64;
    let mut nonzero = 0;
    for p in 0..n {
        let x = dom.coords(p);
        let (_, den) = bpst_profile(&x);
        let mut norm = 0.0;
        for mu in 0..4 {
            let v = dphi.field(mu, 2)[p];
            t3_err = t3_err.max((v - 16.0 * x[mu] / den.powi(3)).abs());
            norm += v * v;
        }
        if norm > 0.0 {
            nonzero += 1;
        }
    }
    let frac = nonzero as f64 / n as f64;
    verdict(
        table_err <= 1e-8 && f_err <= 1e-12 && self_dual <= 1e-12 && phi_err <= 1e-12 && t3_err <= 1e-12 && frac >= 0.99,
        format!(
            "dA table vs differences {table_err:.1e}, |F - closed form| = {f_err:.1e}, |F - *F| = {self_dual:.1e}, \
             |Phi - closed form| = {phi_err:.1e}, T3(d_A Phi) nonzero at {:.1}% of {n} samples",
            100.0 * frac
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. Pythagoras

fn su2_flat_constant(dom: &Arc<Domain>, c: &[f64]) -> R<Connection> {
    let a = DifferentialForm::from_fn(dom, Algebra::Su2, 1, |_, out| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (mu, v) in c.iter().enumerate() {
            out[mu * 3 + 2] = *v;
        }
    })?;
    Ok(Connection::new(a)?)
}

fn torus_presets() -> R<Vec<(String, Instance)>> {
    let t4 = presets::torus(4, 8)?;
    Ok(vec![
        ("t4_yang_mills_example".into(), presets::t4_yang_mills_example(16)?),
        ("constant_flux(0.3)".into(), presets::constant_flux(&t4, 0.3)?),
        ("flat_wilson".into(), presets::flat_wilson(&t4, &[0.1, -0.2, 0.3, 0.05])?),
        ("random_su2".into(), presets::random_connection(&t4, Algebra::Su2, 3, 0.8)?),
        ("random_abelian".into(), presets::random_connection(&t4, Algebra::Abelian, 4, 0.5)?),
    ])
}

fn pythagoras() -> R<Verdict> {
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for (name, inst) in torus_presets()? {
        let g = &inst.metric;
        let f = inst.connection.curvature()?;
        let d = symplectic::lefschetz_decompose_2form(&f)?;
        let total = g.norm_sq(&f)?;
        let parts = g.norm_sq(&d.primitive)? + g.norm_sq(&symplectic::lefschetz_l(&d.phi)?)?;
        let err = if total == 0.0 { parts } else { rel(total, parts) };
        worst = worst.max(err);
        names.push(name);
    }
    let cloud: Arc<Domain> = Arc::new(PointCloudDomain::random(1000, 2.0, 7)?.into());
    let b = presets::bpst(&cloud)?;
    let bpst = functionals::pythagoras_pointwise(&b.connection, &b.metric)?;
    names.push("bpst (pointwise)".into());
    verdict(
        worst <= 1e-8 && bpst <= 1e-8,
        format!("max rel. defect {:.1e} over {}", worst.max(bpst), names.join(", ")),
    )
}

// ---------------------------------------------------------------------------
// 5. Gradients and Hessians

fn gradient_consistency() -> R<Verdict> {
    let dom = presets::torus(4, 8)?;
    let g = Metric::flat(&dom);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (alg, seed) in [(Algebra::Su2, 11u64), (Algebra::Abelian, 12)] {
        let a = presets::random_connection(&dom, alg, seed, 0.9)?.connection;
        let b = presets::random_zero_form(&dom, alg, seed + 100, 0.6)?;
        for kind in FunctionalKind::ALL {
            let grad = functionals::gradient(kind, &a, Some(&b), &g)?;
            for dir in 0..20u64 {
                let eta = presets::random_one_form(&dom, alg, 1000 + 2 * dir, 1.0)?;
                let db = presets::random_zero_form(&dom, alg, 1001 + 2 * dir, 1.0)?;
                let t = 1e-4;
                let e = |s: f64| -> R<f64> {
                    Ok(functionals::value(kind, &a.shifted(&eta.scale(s))?, Some(&b.axpy(s, &db)?), &g)?)
                };
                let fd = (e(t)? - e(-t)?) / (2.0 * t);
                let mut an = 2.0 * g.inner_product(&grad.a, &eta)?;
                let mut scale = g.norm_sq(&grad.a)?.sqrt() * g.norm_sq(&eta)?.sqrt();
                if let Some(gb) = &grad.b {
                    an += 2.0 * g.inner_product(gb, &db)?;
                    scale += g.norm_sq(gb)?.sqrt() * g.norm_sq(&db)?.sqrt();
                }
                worst = worst.max((an - fd).abs() / scale.max(fd.abs()).max(1e-300));
                count += 1;
            }
        }
    }

    // Hessian quadratic forms at critical points
    let t4 = presets::t4_yang_mills_example(16)?;
    let flux = presets::constant_flux(&dom, 0.4)?;
    let wilson = presets::flat_wilson(&dom, &[0.3, -0.1, 0.2, 0.5])?;
    let su2_flat = su2_flat_constant(&dom, &[0.3, -0.1, 0.2, 0.5])?;
    let flat_g = Metric::flat(&dom);
    let cases: Vec<(&str, &Connection, &Metric, Vec<FunctionalKind>)> = vec![
        ("t4", &t4.connection, &t4.metric, vec![FunctionalKind::Ym]),
        ("constant_flux", &flux.connection, &flat_g, vec![FunctionalKind::Ym, FunctionalKind::Pym, FunctionalKind::Phi]),
        ("flat_wilson", &wilson.connection, &flat_g, vec![FunctionalKind::Ym, FunctionalKind::Pym, FunctionalKind::Phi]),
        ("su2 flat", &su2_flat, &flat_g, vec![FunctionalKind::Ym, FunctionalKind::Pym, FunctionalKind::Phi]),
    ];
    let mut hess = 0.0f64;
    let mut sym = 0.0f64;
    for (_, a, g, kinds) in cases {
        let dom = a.domain();
        for kind in kinds {
            for dir in 0..3u64 {
                let eta = presets::random_one_form(dom, a.algebra(), 500 + dir, 1.0)?;
                let zeta = presets::random_one_form(dom, a.algebra(), 600 + dir, 1.0)?;
                let l_eta = functionals::hessian_apply(kind, a, &eta, g)?;
                let l_zeta = functionals::hessian_apply(kind, a, &zeta, g)?;
                let q = 2.0 * g.inner_product(&l_eta, &eta)?;
                let t = 1e-3;
                let e = |s: f64| -> R<f64> { Ok(functionals::value(kind, &a.shifted(&eta.scale(s))?, None, g)?) };
                let fd = (e(t)? + e(-t)? - 2.0 * e(0.0)?) / (t * t);
                hess = hess.max((q - fd).abs() / q.abs().max(fd.abs()).max(1e-12));
                let (x, y) = (g.inner_product(&l_eta, &zeta)?, g.inner_product(&eta, &l_zeta)?);
                sym = sym.max((x - y).abs() / x.abs().max(y.abs()).max(1e-12));
            }
        }
    }
    verdict(
        worst <= 1e-5 && hess <= 1e-4 && sym <= 1e-10,
        format!(
            "{count} directional derivatives, max rel. error {worst:.1e}; Hessian vs second difference {hess:.1e}, \
             asymmetry {sym:.1e}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Cone equivalence

fn cone_equivalence() -> R<Verdict> {
    let dom = presets::torus(4, 8)?;
    let konst = |c: f64| DifferentialForm::constant(&dom, 0, &[c]);
    let bump = presets::random_zero_form(&dom, Algebra::Abelian, 4, 1e-3)?;
    let flux = presets::constant_flux(&dom, 0.3)?.connection;
    let wilson = presets::flat_wilson(&dom, &[0.1, -0.2, 0.3, 0.05])?.connection;
    let random = presets::random_connection(&dom, Algebra::Abelian, 3, 0.4)?.connection;
    let t4 = presets::t4_yang_mills_example(8)?.connection;
    let t4_phi = symplectic::lefschetz_decompose_2form(&t4.curvature()?)?.phi;
    let su2_flat = su2_flat_constant(&dom, &[0.2, 0.1, -0.3, 0.4])?;
    let su2_zero = DifferentialForm::zeros(&dom, Algebra::Su2, 0)?;
    let su2_b = presets::random_zero_form(&dom, Algebra::Su2, 8, 0.2)?;
    let su2_random = presets::random_connection(&dom, Algebra::Su2, 9, 0.5)?.connection;
    let cases: Vec<(&str, Connection, DifferentialForm, bool)> = vec![
        ("constant_flux, B = -c", flux.clone(), konst(-0.3)?, true),
        ("constant_flux, B = -c + bump", flux.clone(), konst(-0.3)?.add(&bump)?, false),
        ("constant_flux, B = -2c/3", flux, konst(-0.2)?, false),
        ("flat_wilson, B = 0", wilson.clone(), konst(0.0)?, true),
        ("flat_wilson, B = bump", wilson, bump.clone(), false),
        ("random_abelian, B = 0", random.clone(), konst(0.0)?, false),
        ("random_abelian, B = bump", random, bump, false),
        ("t4, B = -Phi", t4, t4_phi.scale(-1.0), false),
        ("su2 flat, B = 0", su2_flat.clone(), su2_zero.clone(), true),
        ("su2 flat, B random", su2_flat, su2_b, false),
        ("random_su2, B = 0", su2_random, su2_zero, false),
    ];
    let mut bad = Vec::new();
    for (name, a, b, expect) in &cases {
        let op = ConeOperator::symplectic(a.clone(), b.clone())?;
        let cone_flat = op.curvature()?.max_abs() <= 1e-10;
        let report = a.check_symplectically_flat(&b.scale(-1.0), 1e-10)?;
        if cone_flat != report.flat || cone_flat != *expect {
            bad.push(*name);
        }
    }
    let mut additivity = Ok(());
    for seed in 0..4 {
        additivity = additivity.and(common::cone_additivity(seed));
    }
    verdict(
        bad.is_empty() && additivity.is_ok(),
        format!(
            "{} cases agree{}; slot additivity {}",
            cases.len() - bad.len(),
            if bad.is_empty() { String::new() } else { format!(", disagree: {}", bad.join("; ")) },
            match additivity {
                Ok(()) => "exact".into(),
                Err(e) => e,
            }
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. Cone critical points

fn cone_critical() -> R<Verdict> {
    let t4 = presets::t4_yang_mills_example(8)?;
    let search = flows::cone_b_search(&t4.connection, &t4.metric, 64, 11, 1e-8)?;
    let dom = presets::torus(4, 8)?;
    let mut distinct = Vec::new();
    for inst in [
        presets::constant_flux(&dom, 0.3)?,
        presets::flat_wilson(&dom, &[0.1, -0.2, 0.3, 0.05])?,
        presets::random_connection(&dom, Algebra::Abelian, 5, 0.5)?,
    ] {
        let s = flows::cone_b_search(&inst.connection, &inst.metric, 16, 21, 1e-8)?;
        distinct.push(s.distinct);
    }
    verdict(
        search.floor >= 1e-3 && search.hits == 0 && distinct.iter().all(|&d| d <= 1),
        format!(
            "T4 example: residual floor {:.3e} over {} starts, {} hits; distinct critical B per preset {:?}",
            search.floor, search.starts, search.hits, distinct
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Flows

/// One RK4 step of `a' = −M a` applied to `v`.
fn rk4_symbol(k: [f64; 4], v: Vector4<f64>, h: f64) -> Vector4<f64> {
    let kv = Vector4::from(k);
    let w = Vector4::new(-k[1], k[0], -k[3], k[2]);
    let m = Matrix4::identity() * kv.norm_squared() - kv * kv.transpose() - w * w.transpose() * 0.5;
    let z = m * -h;
    let z2 = z * z;
    let p = Matrix4::identity() + z + z2 * 0.5 + z2 * z / 6.0 + z2 * z2 / 24.0;
    p * v
}

fn flows_criterion() -> R<Verdict> {
    let dom = presets::torus(4, 8)?;
    let g = Metric::flat(&dom);
    let a0 = Connection::new(presets::random_one_form(&dom, Algebra::Su2, 17, 1e-4)?)?;
    let cfg = FlowConfig {
        kind: FunctionalKind::Pym,
        max_steps: 500,
        tolerance: 1e-8,
        ..Default::default()
    };
    let (state, trace) = flows::flow_run(&a0, None, &cfg, &g)?;
    let post = functionals::el_residual(FunctionalKind::Pym, &state.connection, None, &g)?[0].max_abs();
    let increase = trace.max_increase();

    let t4 = presets::t4_yang_mills_example(16)?;
    let speed = t4
        .metric
        .codifferential(&symplectic::primitive_project(&t4.connection.curvature()?)?)?
        .max_abs();
    let (_, t4_trace) = flows::flow_run(
        &t4.connection,
        None,
        &FlowConfig {
            max_steps: 1,
            ..cfg.clone()
        },
        &t4.metric,
    )?;
    let recorded_speed = t4_trace.records[0].residual;

    // one step on a single Fourier mode against the RK4 amplification matrix
    let k = [1.0, 2.0, 0.0, -1.0];
    let v = Vector4::new(0.3, -0.2, 0.5, 0.1);
    let h = 0.05;
    let mode = |x: &[f64]| (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3] * x[3]).cos();
    let start = DifferentialForm::from_fn(&dom, Algebra::Abelian, 1, |x, out| {
        for mu in 0..4 {
            out[mu] = v[mu] * mode(x);
        }
    })?;
    let (one, _) = flows::flow_run(
        &Connection::new(start)?,
        None,
        &FlowConfig {
            step: Some(h),
            max_steps: 1,
            tolerance: 1e-300,
            ..cfg
        },
        &g,
    )?;
    let expect_v = rk4_symbol(k, v, h);
    let expect = DifferentialForm::from_fn(&dom, Algebra::Abelian, 1, |x, out| {
        for mu in 0..4 {
            out[mu] = expect_v[mu] * mode(x);
        }
    })?;
    let rk4_err = one.connection.potential().sub(&expect)?.max_abs();

    verdict(
        trace.converged
            && trace.steps <= 500
            && post <= 1e-8
            && increase <= 1e-10
            && speed > 1e-3
            && rel(speed, recorded_speed) <= 1e-12
            && rk4_err <= 1e-12,
        format!(
            "flat + 1e-4: residual {post:.1e} after {} steps, max increase {increase:.1e}; \
             T4 initial speed {speed:.3}; single-mode RK4 step error {rk4_err:.1e}",
            trace.steps
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Chern-Simons

fn chern_simons() -> R<Verdict> {
    let t2 = presets::torus(2, 16)?;
    let t4 = presets::torus(4, 8)?;
    let mut ident = 0.0f64;
    for c in [0.7, -1.3, 0.0] {
        let b2 = DifferentialForm::constant(&t2, 0, &[-c])?;
        let p2 = functionals::chern_simons_p2(&presets::constant_flux(&t2, c)?.connection, &b2)?;
        // (1/8π²) ∫ c² ω over (2π)²
        ident = ident.max((p2.value.re - c * c / 2.0).abs()).max(p2.value.im.abs());
        let b4 = DifferentialForm::constant(&t4, 0, &[-c])?;
        let p4 = functionals::chern_simons_p4(&presets::constant_flux(&t4, c)?.connection, &b4)?;
        // (i/48) ∫ c³ ω² with ω² = 2 vol over (2π)⁴
        let expect = c.powi(3) * 2.0 * TAU.powi(4) / 48.0;
        ident = ident.max((p4.value.im - expect).abs()).max(p4.value.re.abs());
    }
    let wilson = presets::flat_wilson(&t2, &[0.4, -0.7])?.connection;
    let p2w = functionals::chern_simons_p2(&wilson, &DifferentialForm::constant(&t2, 0, &[0.0])?)?;
    ident = ident.max(p2w.value.norm());

    let sup = |a: &Connection, b: &DifferentialForm| -> R<f64> {
        let grad = functionals::p2_gradient(a, b)?;
        Ok(grad.a.max_abs().max(grad.b.as_ref().map_or(0.0, DifferentialForm::max_abs)))
    };
    let flux = presets::constant_flux(&t2, 0.7)?.connection;
    let su2_flat = su2_flat_constant(&t2, &[0.3, -0.5])?;
    let su2_zero = DifferentialForm::zeros(&t2, Algebra::Su2, 0)?;
    let bump = DifferentialForm::from_fn(&t2, Algebra::Abelian, 0, |x, out| out[0] = 0.3 * x[0].sin())?;
    let flat_pairs = [
        sup(&flux, &DifferentialForm::constant(&t2, 0, &[-0.7])?)?,
        sup(&wilson, &DifferentialForm::constant(&t2, 0, &[0.0])?)?,
        sup(&su2_flat, &su2_zero)?,
    ];
    let perturbed = [
        sup(&flux, &DifferentialForm::constant(&t2, 0, &[-0.7])?.add(&bump)?)?,
        sup(&wilson, &DifferentialForm::constant(&t2, 0, &[0.2])?)?,
        sup(&su2_flat.shifted(&presets::random_one_form(&t2, Algebra::Su2, 3, 0.3)?)?, &su2_zero)?,
    ];
    let flat_max = flat_pairs.iter().cloned().fold(0.0, f64::max);
    let pert_min = perturbed.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut exact = 0.0f64;
    for seed in 0..3u64 {
        for alg in [Algebra::Su2, Algebra::Abelian] {
            let a2 = Connection::new(presets::random_one_form(&t2, alg, seed, 0.8)?)?;
            let b2 = presets::random_zero_form(&t2, alg, seed + 50, 0.8)?;
            let a4 = Connection::new(presets::random_one_form(&t4, alg, seed, 0.8)?)?;
            let b4 = presets::random_zero_form(&t4, alg, seed + 50, 0.8)?;
            exact = exact
                .max(functionals::chern_simons_p2(&a2, &b2)?.exact_term.abs())
                .max(functionals::chern_simons_p4(&a4, &b4)?.exact_term.abs());
        }
    }
    verdict(
        ident <= 1e-6 && flat_max <= 1e-7 && pert_min >= 1e-3 && exact <= 1e-8,
        format!(
            "identities {ident:.1e}; first variation {flat_max:.1e} at flat pairs, >= {pert_min:.2e} perturbed; \
             exact terms {exact:.1e}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. Classification

fn classification_criterion() -> R<Verdict> {
    let q = common::ratio;
    let half = classification::classify_u1_t4(&Coefficient::Rational(q(1, 1)), &Coefficient::Rational(q(1, 2)))?;
    let brute = common::brute_force_c0(&q(1, 1), &q(1, 2));
    let half_ok = half.c0 == Some(q(1, 2)) && half.c0 == brute;

    let irr = classification::classify_u1_t4(&Coefficient::Rational(q(1, 1)), &Coefficient::IrrationalRatio)?;
    let irr_ok = irr.verdict.case == Case::FlatOnly && irr.c0.is_none() && irr.euler_class == "0";

    let mut failures = Vec::new();
    let mut count = 0;
    for p1 in [1i64, 2, 3, 5, 7] {
        for q1 in [1i64, 2, 3, 4, 6] {
            for p2 in [-5i64, -2, 1, 3, 4] {
                for q2 in [1i64, 2, 5, 6, 9] {
                    count += 1;
                    if let Err(e) = common::classification_exact(q(p1, q1), q(p2, q2)) {
                        failures.push(e);
                    }
                }
            }
        }
    }
    if let Err(e) = common::classification_scaling(q(3, 4), q(5, 6), q(7, 3)) {
        failures.push(e);
    }
    let zero_rejected = classification::classify_u1_t4(&Coefficient::Rational(q(0, 1)), &Coefficient::Rational(q(1, 1))).is_err();
    verdict(
        half_ok && irr_ok && failures.is_empty() && zero_rejected,
        format!(
            "(1, 1/2) -> c0 = {}; irrational -> {}, Euler class {}; {count} pairs match enumeration{}",
            half.c0.map_or("none".into(), |c| c.to_string()),
            irr.verdict.case,
            irr.euler_class,
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(" | ")) }
        ),
    )
}

// ---------------------------------------------------------------------------
// 11. Calculus substrate

fn run_property<S: Strategy>(cases: u32, strategy: S, f: impl Fn(S::Value) -> common::Check) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |v| f(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

fn calculus() -> R<Verdict> {
    let seed = 0u64..1 << 48;
    let mut results: Vec<(&str, Result<(), String>)> = Vec::new();
    for (dim, k) in [(2, 0), (4, 0), (4, 1), (4, 2)] {
        results.push(("d∘d", run_property(200, seed.clone(), |s| common::d_squared(dim, k, s))));
    }
    results.push((
        "adjointness",
        run_property(64, (0usize..4, seed.clone(), any::<bool>()), |(k, s, c)| common::adjointness(4, k, s, c)),
    ));
    results.push((
        "star involution",
        run_property(64, (0usize..=4, seed.clone(), any::<bool>()), |(k, s, c)| common::star_involution(4, k, s, c)),
    ));
    results.push((
        "graded commutativity",
        run_property(64, (0usize..=2, 0usize..=2, seed.clone()), |(k, l, s)| common::graded_commutativity(4, k, l, s)),
    ));
    results.push((
        "[Λ,L] = n-k",
        run_property(64, (0usize..=2, seed.clone()), |(k, s)| common::lefschetz_commutator(k, s)),
    ));
    results.push(("idempotence", run_property(32, seed.clone(), common::decomposition_idempotent)));
    results.push(("metric-free Λ", run_property(32, seed, common::lambda_metric_free)));
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    verdict(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} property suites pass", results.len())
        } else {
            failed.join(" | ")
        },
    )
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("T4 example reproduction", t4_example),
        ("primitive Yang-Mills correction A'", t4_correction),
        ("BPST reproduction", bpst),
        ("Pythagoras on every preset", pythagoras),
        ("gradient and Hessian consistency", gradient_consistency),
        ("cone flatness equivalence", cone_equivalence),
        ("cone critical points", cone_critical),
        ("flows", flows_criterion),
        ("Chern-Simons identities", chern_simons),
        ("classification", classification_criterion),
        ("calculus substrate", calculus),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f));
        let (pass, detail) = match outcome {
            Ok(Ok(v)) => (v.pass, v.detail),
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(p) => (
                false,
                format!(
                    "panic: {}",
                    p.downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default()
                ),
            ),
        };
        all &= pass;
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
