//! Yang-Mills type functionals, their Euler-Lagrange residuals, gradients and
//! Hessians, and the Chern-Simons type functionals `P₂`, `P₄`.
//!
//! Residuals are half-gradients: along a direction `η`,
//! `d/dt E(A + tη)|₀ = 2⟨r, η⟩`. For every functional here the second
//! variation along a straight line is `½ E″ = ⟨L η, η⟩` with
//!
//! ```text
//! L_ym η = d_A* d_A η          + *[*F ∧ η]
//! L_p  η = d_A* Π d_A η        + *[*F_p ∧ η]
//! L_Φ  η = d_A* (ω∧Λd_A η / n) + *[*(Φω) ∧ η]
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::form::{DifferentialForm, Pairing};
use crate::gauge::Connection;
use crate::metric::Metric;
use crate::symplectic::{self, lefschetz_decompose_2form};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    /// `‖F‖²`
    Ym,
    /// `‖F_p‖²`
    Pym,
    /// `‖Φω‖²`
    Phi,
    /// `‖F + ωB‖² + ‖d_AB‖²`
    Cone,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 4] = [
        FunctionalKind::Ym,
        FunctionalKind::Pym,
        FunctionalKind::Phi,
        FunctionalKind::Cone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionalKind::Ym => "ym",
            FunctionalKind::Pym => "pym",
            FunctionalKind::Phi => "phi",
            FunctionalKind::Cone => "cone",
        }
    }

    /// Names of the Euler-Lagrange residuals, in the order returned by [`el_residual`].
    pub fn residual_names(self) -> &'static [&'static str] {
        match self {
            FunctionalKind::Ym => &["d_A*F"],
            FunctionalKind::Pym => &["d_A*F_p"],
            FunctionalKind::Phi => &["d_A*(Phi w)", "d_A Phi"],
            FunctionalKind::Cone => &["d_A*(F+wB) - [d_AB,B]", "Lambda F + nB + d_A*d_AB"],
        }
    }
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ym" => Ok(FunctionalKind::Ym),
            "pym" => Ok(FunctionalKind::Pym),
            "phi" => Ok(FunctionalKind::Phi),
            "cone" => Ok(FunctionalKind::Cone),
            _ => Err(Error::InvalidParameter(format!("unknown functional kind {s:?}"))),
        }
    }
}

/// A functional value with the sup norms of its Euler-Lagrange residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub kind: FunctionalKind,
    pub value: f64,
    pub residual_norms: Vec<f64>,
    pub tolerance: f64,
    pub passes: Vec<bool>,
    /// All residuals within tolerance.
    pub critical: bool,
}

/// Half-gradient with respect to `A` and, for the cone functional, `B`.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub a: DifferentialForm,
    pub b: Option<DifferentialForm>,
}

fn need_b(kind: FunctionalKind, b: Option<&DifferentialForm>) -> Result<&DifferentialForm> {
    b.ok_or_else(|| Error::InvalidParameter(format!("the {kind} functional needs B")))
}

fn check_pym_dim(a: &Connection) -> Result<()> {
    if a.domain().dim() < 4 {
        return Err(Error::DimensionTooSmall {
            op: "primitive Yang-Mills functional",
            dim: a.domain().dim(),
        });
    }
    Ok(())
}

/// `Φω` with `Φ = ΛF/n`.
pub fn phi_omega(f: &DifferentialForm) -> Result<DifferentialForm> {
    let d = lefschetz_decompose_2form(f)?;
    f.sub(&d.primitive)
}

/// `F + ωB`.
fn cone_first_slot(f: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm> {
    f.add(&b.wedge(&symplectic::omega(f.domain())?, Pairing::Plain)?)
}

/// The quantity whose squared norm is the functional (first slot for the cone).
fn integrand(kind: FunctionalKind, a: &Connection, b: Option<&DifferentialForm>) -> Result<DifferentialForm> {
    let f = a.curvature()?;
    match kind {
        FunctionalKind::Ym => Ok(f),
        FunctionalKind::Pym => {
            check_pym_dim(a)?;
            Ok(lefschetz_decompose_2form(&f)?.primitive)
        }
        FunctionalKind::Phi => phi_omega(&f),
        FunctionalKind::Cone => cone_first_slot(&f, need_b(kind, b)?),
    }
}

pub fn value(kind: FunctionalKind, a: &Connection, b: Option<&DifferentialForm>, g: &Metric) -> Result<f64> {
    let first = g.norm_sq(&integrand(kind, a, b)?)?;
    if kind == FunctionalKind::Cone {
        let dab = a.covariant_d(need_b(kind, b)?)?;
        return Ok(first + g.norm_sq(&dab)?);
    }
    Ok(first)
}

/// Half-gradient of the functional.
pub fn gradient(kind: FunctionalKind, a: &Connection, b: Option<&DifferentialForm>, g: &Metric) -> Result<Gradient> {
    let x = integrand(kind, a, b)?;
    let mut ga = a.covariant_codifferential(&x, g)?;
    let mut gb = None;
    if kind == FunctionalKind::Cone {
        let b = need_b(kind, b)?;
        let dab = a.covariant_d(b)?;
        // + [B, d_AB] = − [d_AB, B]
        ga = ga.add(&b.wedge(&dab, Pairing::Bracket)?)?;
        let n = symplectic::half_dim(a.domain())? as f64;
        let f = a.curvature()?;
        let lf = symplectic::dual_lefschetz(&f)?;
        gb = Some(
            lf.axpy(n, b)?
                .add(&a.covariant_codifferential(&dab, g)?)?,
        );
    }
    Ok(Gradient { a: ga, b: gb })
}

/// Euler-Lagrange residuals: `[d_A*F]`, `[d_A*F_p]`, `[d_A*(Φω), d_AΦ]`, or the cone pair.
pub fn el_residual(
    kind: FunctionalKind,
    a: &Connection,
    b: Option<&DifferentialForm>,
    g: &Metric,
) -> Result<Vec<DifferentialForm>> {
    let grad = gradient(kind, a, b, g)?;
    Ok(match kind {
        FunctionalKind::Phi => {
            let f = a.curvature()?;
            let phi = lefschetz_decompose_2form(&f)?.phi;
            vec![grad.a, a.covariant_d(&phi)?]
        }
        FunctionalKind::Cone => vec![grad.a, grad.b.expect("cone gradient has a B part")],
        _ => vec![grad.a],
    })
}

/// Evaluate a functional and its residual norms.
pub fn evaluate(
    kind: FunctionalKind,
    a: &Connection,
    b: Option<&DifferentialForm>,
    g: &Metric,
    tolerance: f64,
) -> Result<FunctionalValue> {
    let v = value(kind, a, b, g)?;
    let residual_norms: Vec<f64> = el_residual(kind, a, b, g)?
        .iter()
        .map(DifferentialForm::max_abs)
        .collect();
    let passes: Vec<bool> = residual_norms.iter().map(|r| *r <= tolerance).collect();
    Ok(FunctionalValue {
        kind,
        value: v,
        critical: passes.iter().all(|&p| p),
        residual_norms,
        tolerance,
        passes,
    })
}

pub fn eval_ym(a: &Connection, g: &Metric, tolerance: f64) -> Result<FunctionalValue> {
    evaluate(FunctionalKind::Ym, a, None, g, tolerance)
}

pub fn eval_pym(a: &Connection, g: &Metric, tolerance: f64) -> Result<FunctionalValue> {
    evaluate(FunctionalKind::Pym, a, None, g, tolerance)
}

pub fn eval_phi_omega(a: &Connection, g: &Metric, tolerance: f64) -> Result<FunctionalValue> {
    evaluate(FunctionalKind::Phi, a, None, g, tolerance)
}

pub fn eval_cone_ym(a: &Connection, b: &DifferentialForm, g: &Metric, tolerance: f64) -> Result<FunctionalValue> {
    evaluate(FunctionalKind::Cone, a, Some(b), g, tolerance)
}

/// `(‖F‖², ‖F_p‖², ‖Φω‖², relative defect of ‖F‖² = ‖F_p‖² + ‖Φω‖²)`.
pub fn pythagoras(a: &Connection, g: &Metric) -> Result<(f64, f64, f64, f64)> {
    let f = a.curvature()?;
    let d = lefschetz_decompose_2form(&f)?;
    let ym = g.norm_sq(&f)?;
    let pym = g.norm_sq(&d.primitive)?;
    let phi = g.norm_sq(&f.sub(&d.primitive)?)?;
    let defect = (ym - pym - phi).abs() / ym.abs().max(f64::MIN_POSITIVE);
    Ok((ym, pym, phi, if ym == 0.0 { (pym + phi).abs() } else { defect }))
}

/// Largest pointwise defect of `|F|² = |F_p|² + |Φω|²` relative to `max |F|²`; works on point clouds.
pub fn pythagoras_pointwise(a: &Connection, g: &Metric) -> Result<f64> {
    let f = a.curvature()?;
    let d = lefschetz_decompose_2form(&f)?;
    let along = f.sub(&d.primitive)?;
    let total = g.pointwise_inner(&f, &f)?;
    let prim = g.pointwise_inner(&d.primitive, &d.primitive)?;
    let phi = g.pointwise_inner(&along, &along)?;
    let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok(total
        .iter()
        .zip(prim.iter().zip(&phi))
        .map(|(t, (p, q))| (t - p - q).abs() / scale)
        .fold(0.0, f64::max))
}

/// Relative defect of `⟨η, d_A*F_p⟩ = ⟨∂₊ᴬη, F_p⟩` for a 1-form `η`.
pub fn pym_orthogonality_defect(a: &Connection, eta: &DifferentialForm, g: &Metric) -> Result<f64> {
    let f_p = lefschetz_decompose_2form(&a.curvature()?)?.primitive;
    let lhs = g.inner_product(eta, &a.covariant_codifferential(&f_p, g)?)?;
    let rhs = g.inner_product(&symplectic::twisted_d_plus(eta, a)?, &f_p)?;
    Ok((lhs - rhs).abs() / (1e-300 + lhs.abs().max(rhs.abs())))
}

/// `*[*X ∧ η]` for a 2-form `X` and 1-form `η`.
fn bracket_term(x: &DifferentialForm, eta: &DifferentialForm, g: &Metric) -> Result<DifferentialForm> {
    let sx = g.hodge_star(x)?;
    g.hodge_star(&sx.wedge(eta, Pairing::Bracket)?)
}

/// Jacobi-type operator `L η` whose quadratic form is half the second variation.
pub fn hessian_apply(
    kind: FunctionalKind,
    a: &Connection,
    eta: &DifferentialForm,
    g: &Metric,
) -> Result<DifferentialForm> {
    if eta.degree() != 1 {
        return Err(Error::DegreeMismatch {
            op: "hessian_apply",
            expected: 1,
            got: eta.degree(),
        });
    }
    let f = a.curvature()?;
    let dae = a.covariant_d(eta)?;
    let (principal, x) = match kind {
        FunctionalKind::Ym => (dae, f),
        FunctionalKind::Pym => {
            check_pym_dim(a)?;
            (
                symplectic::primitive_project(&dae)?,
                lefschetz_decompose_2form(&f)?.primitive,
            )
        }
        FunctionalKind::Phi => (phi_omega(&dae)?, phi_omega(&f)?),
        FunctionalKind::Cone => {
            return Err(Error::InvalidParameter(
                "no Hessian operator is defined for the cone functional".into(),
            ))
        }
    };
    let critical = evaluate(kind, a, None, g, 1e-6).map(|v| v.critical).unwrap_or(false);
    if !critical {
        log::warn!("Hessian of the {kind} functional evaluated away from a critical point");
    }
    let mut out = a.covariant_codifferential(&principal, g)?;
    if a.algebra() == Algebra::Su2 {
        out = out.add(&bracket_term(&x, eta, g)?)?;
    }
    Ok(out)
}

/// `‖F‖², ‖F_⊥‖², ‖Φζ‖²` and, given `B`, `‖F + ζB‖² + ‖d_AB‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValues {
    pub total: f64,
    pub perpendicular: f64,
    pub along: f64,
    pub cone: Option<f64>,
}

pub fn eval_zeta_functionals(
    a: &Connection,
    zeta: &DifferentialForm,
    b: Option<&DifferentialForm>,
    g: &Metric,
) -> Result<ZetaValues> {
    let f = a.curvature()?;
    let (perp, phi) = symplectic::zeta_decompose(&f, zeta, g)?;
    let along = phi.wedge(zeta, Pairing::Plain)?;
    let cone = match b {
        Some(b) => {
            let first = f.add(&b.wedge(zeta, Pairing::Plain)?)?;
            Some(g.norm_sq(&first)? + g.norm_sq(&a.covariant_d(b)?)?)
        }
        None => None,
    };
    Ok(ZetaValues {
        total: g.norm_sq(&f)?,
        perpendicular: g.norm_sq(&perp)?,
        along: g.norm_sq(&along)?,
        cone,
    })
}

/// A Chern-Simons type value with the integral of its exact term, which should vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernSimons {
    pub value: Complex64,
    pub exact_term: f64,
}

fn product(x: &DifferentialForm, y: &DifferentialForm) -> Result<DifferentialForm> {
    x.wedge(y, Pairing::MatrixProduct)
}

fn integrate_trace(x: &DifferentialForm) -> Result<f64> {
    Ok(x.trace().integrate_top()?[0])
}

fn check_cs(a: &Connection, b: &DifferentialForm, dim: usize, op: &'static str) -> Result<()> {
    a.domain().torus(op)?;
    if a.domain().dim() != dim {
        return Err(Error::InvalidParameter(format!("{op} needs a {dim}-dimensional torus")));
    }
    if b.degree() != 0 || b.algebra() != a.algebra() || !b.same_domain(a.potential()) {
        return Err(Error::InvalidParameter(format!(
            "{op}: B must be a 0-form in the connection's algebra"
        )));
    }
    Ok(())
}

/// `P₂(A,B) = −1/(8π²) ∫ tr[ωB² + 2BF − d(AB)]` on a 2-torus.
pub fn chern_simons_p2(a: &Connection, b: &DifferentialForm) -> Result<ChernSimons> {
    check_cs(a, b, 2, "chern_simons_p2")?;
    let omega = symplectic::omega(a.domain())?;
    let f = a.curvature()?;
    let bb = product(b, b)?;
    let main = product(&omega, &bb)?.add(&product(b, &f)?.scale(2.0))?;
    let exact = product(a.potential(), b)?.trace().exterior_derivative()?;
    let exact_term = exact.integrate_top()?[0];
    let value = -(integrate_trace(&main)? - exact_term) / (8.0 * PI * PI);
    Ok(ChernSimons {
        value: Complex64::new(value, 0.0),
        exact_term,
    })
}

/// `P₄(A,B) = −i/48 ∫ tr[3BF² + 3ωB²F + ω²B³ − d(B dA A + ωBAB + 3/2 BA³ − BA dA)]`.
pub fn chern_simons_p4(a: &Connection, b: &DifferentialForm) -> Result<ChernSimons> {
    check_cs(a, b, 4, "chern_simons_p4")?;
    let omega = symplectic::omega(a.domain())?;
    let f = a.curvature()?;
    let pot = a.potential();
    let da = pot.exterior_derivative()?;
    let bb = product(b, b)?;
    let bbb = product(&bb, b)?;
    let w2 = product(&omega, &omega)?;
    let main = product(&product(b, &f)?, &f)?
        .scale(3.0)
        .add(&product(&product(&omega, &bb)?, &f)?.scale(3.0))?
        .add(&product(&w2, &bbb)?)?;
    let ba = product(b, pot)?;
    let inner = product(&product(b, &da)?, pot)?
        .add(&product(&product(&omega, &ba)?, b)?)?
        .add(&product(&product(&ba, pot)?, pot)?.scale(1.5))?
        .sub(&product(&ba, &da)?)?;
    let exact_term = inner.trace().exterior_derivative()?.integrate_top()?[0];
    let real = integrate_trace(&main)? - exact_term;
    Ok(ChernSimons {
        value: Complex64::new(0.0, -real / 48.0),
        exact_term,
    })
}

/// `∫ tr Φ^{n+1} ωⁿ`.
pub fn cs_integral(phi: &DifferentialForm) -> Result<f64> {
    if phi.degree() != 0 {
        return Err(Error::DegreeMismatch {
            op: "cs_integral",
            expected: 0,
            got: phi.degree(),
        });
    }
    let n = symplectic::half_dim(phi.domain())?;
    let omega = symplectic::omega(phi.domain())?;
    let mut power = phi.clone();
    for _ in 0..n {
        power = product(&power, phi)?;
    }
    let mut wn = omega.clone();
    for _ in 1..n {
        wn = product(&wn, &omega)?;
    }
    integrate_trace(&product(&power, &wn)?)
}

/// L² gradient of `P₂` in flat coordinates: `dP₂ = ∫ G_a·δa + G_B·δB dx`.
///
/// `dP₂ = −1/(4π²) ∫ tr[δB (F + ωB)] + 1/(4π²) ∫ tr[d_AB ∧ δa]`.
pub fn p2_gradient(a: &Connection, b: &DifferentialForm) -> Result<Gradient> {
    check_cs(a, b, 2, "p2_gradient")?;
    let kappa = a.algebra().trace_form_factor();
    let g = Metric::flat(a.domain());
    let f = a.curvature()?;
    let first = cone_first_slot(&f, b)?;
    let gb = g.hodge_star(&first)?.scale(-kappa / (4.0 * PI * PI));
    let ga = g
        .hodge_star(&a.covariant_d(b)?)?
        .scale(kappa / (4.0 * PI * PI));
    Ok(Gradient { a: ga, b: Some(gb) })
}

/// Directional derivative of `P₂` along `(δa, δB)`.
pub fn p2_first_variation(
    a: &Connection,
    b: &DifferentialForm,
    delta_a: &DifferentialForm,
    delta_b: &DifferentialForm,
) -> Result<f64> {
    let grad = p2_gradient(a, b)?;
    let g = Metric::flat(a.domain());
    Ok(g.inner_product(&grad.a, delta_a)? + g.inner_product(grad.b.as_ref().expect("B part"), delta_b)?)
}
