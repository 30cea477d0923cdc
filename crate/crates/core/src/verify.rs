//! Verification suites reproducing the worked examples: the T⁴ Yang-Mills
//! connection that is not primitive, the BPST instanton, the cone
//! propositions, the `U(1)` classification and the Chern-Simons identities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::Algebra;
use crate::classification::{self, Case, Coefficient};
use crate::cone::{self, ConeForm, ConeOperator};
use crate::domain::{Domain, PointCloudDomain};
use crate::error::{Error, Result};
use crate::flows;
use crate::form::DifferentialForm;
use crate::functionals;
use crate::gauge::{Connection, Rectangle};
use crate::metric::Metric;
use crate::presets;
use crate::symplectic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    T4,
    Bpst,
    Cone,
    Classify,
    Cs,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["all", "t4", "bpst", "cone", "classify", "cs"];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "t4" => Suite::T4,
            "bpst" => Suite::Bpst,
            "cone" => Suite::Cone,
            "classify" => Suite::Classify,
            "cs" => Suite::Cs,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        })
    }
}

/// One row of a verification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The statement being checked.
    pub claim: String,
    pub value: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, claim: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            claim: claim.into(),
            value,
            comparison: Comparison::AtMost,
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: &str, claim: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            claim: claim.into(),
            value,
            comparison: Comparison::AtLeast,
            tolerance,
            pass: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Grid resolution of the T⁴ example.
    pub resolution: usize,
    /// Resolution for the elliptic solve and the cone searches.
    pub solve_resolution: usize,
    pub cone_starts: usize,
    pub bpst_points: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            resolution: 32,
            solve_resolution: 16,
            cone_starts: 10,
            bpst_points: 1000,
            seed: 7,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::T4, Suite::Bpst, Suite::Cone, Suite::Classify, Suite::Cs] {
                all.extend(run_suite(s, opts)?);
            }
            all
        }
        Suite::T4 => t4_suite(opts)?,
        Suite::Bpst => bpst_suite(opts)?,
        Suite::Cone => cone_suite(opts)?,
        Suite::Classify => classify_suite()?,
        Suite::Cs => cs_suite()?,
    })
}

/// Render checks as an aligned text table.
pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
    let claim_width = checks.iter().map(|c| c.claim.chars().count()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:<width$}  {:<claim_width$}  {:>12}  {:>12}  result\n",
        "check", "claim", "value", "tolerance"
    );
    for c in checks {
        let pad = claim_width - c.claim.chars().count();
        out.push_str(&format!(
            "{:<width$}  {}{}  {:>12.4e}  {} {:>9.2e}  {}\n",
            c.name,
            c.claim,
            " ".repeat(pad),
            c.value,
            c.comparison,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

fn t4_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let inst = presets::t4_yang_mills_example(opts.resolution)?;
    let g = &inst.metric;
    let a = &inst.connection;
    let f = a.curvature()?;
    let ym = g.codifferential(&f)?.max_abs();
    let phi = symplectic::lefschetz_decompose_2form(&f)?.phi;
    let expected = DifferentialForm::from_fn(inst.domain(), Algebra::Abelian, 0, |x, out| {
        out[0] = presets::t4_example_phi(x)
    })?;
    let phi_err = phi.sub(&expected)?.max_abs();
    let dphi = phi.exterior_derivative()?.max_abs();
    let (_, _, _, pyth) = functionals::pythagoras(a, g)?;
    let coarse = presets::t4_yang_mills_example(opts.solve_resolution)?;
    let corrected = flows::make_pym_from_ym(&coarse.connection, &coarse.metric, 1e-6)?;
    Ok(vec![
        Check::at_most("t4.ym_residual", "F is d-harmonic, so A is Yang-Mills", ym, 1e-6),
        Check::at_most("t4.phi_closed_form", "Phi = -(1/4pi) cos 2x2 sin x3", phi_err, 1e-10),
        Check::at_least("t4.dphi", "Phi is not closed, so A is not primitive Yang-Mills", dphi, 0.01),
        Check::at_most("t4.pythagoras", "|F|^2 = |F_p|^2 + |Phi w|^2", pyth, 1e-8),
        Check::at_most(
            "t4.corrected_pym",
            "F_p + d+xi is d+*-closed",
            corrected.pym_residual,
            1e-6,
        ),
        Check::at_least("t4.corrected_not_ym", "A' is not Yang-Mills", corrected.ym_residual, 1e-3),
    ])
}

fn bpst_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let cloud = PointCloudDomain::random(opts.bpst_points, 2.0, opts.seed)?;
    let dom: Arc<Domain> = Arc::new(cloud.into());
    let inst = presets::bpst(&dom)?;
    let a = &inst.connection;
    let f = a.curvature()?;
    let closed = DifferentialForm::from_fn(&dom, Algebra::Su2, 2, presets::bpst_curvature)?;
    let curvature_err = f.sub(&closed)?.max_abs();
    let star = inst.metric.hodge_star(&f)?;
    let self_dual = f.sub(&star)?.max_abs();
    let phi = symplectic::lefschetz_decompose_2form(&f)?.phi;
    let phi_expected = presets::bpst_phi_form(&dom)?;
    let phi_err = phi.sub(&phi_expected)?.max_abs();
    let dphi = a.covariant_d(&phi_expected)?;
    let n = dom.num_points();
    let nonzero = (0..n)
        .filter(|&p| (0..4).any(|mu| dphi.field(mu, 2)[p] != 0.0))
        .count();
    let pyth = functionals::pythagoras_pointwise(a, &inst.metric)?;
    Ok(vec![
        Check::at_most("bpst.curvature", "F = 4/(|x|^2+1)^2 (...) in closed form", curvature_err, 1e-12),
        Check::at_most("bpst.self_dual", "F is self-dual", self_dual, 1e-12),
        Check::at_most("bpst.phi", "Phi = -4/(|x|^2+1)^2 T3", phi_err, 1e-12),
        Check::at_least(
            "bpst.dphi_t3",
            "d_A Phi has a non-trivial T3-component",
            nonzero as f64 / n as f64,
            0.99,
        ),
        Check::at_most("bpst.pythagoras", "|F|^2 = |F_p|^2 + |Phi w|^2 pointwise", pyth, 1e-8),
    ])
}

fn cone_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let dom = presets::torus(4, 8)?;
    let g = Metric::flat(&dom);
    let a = Connection::new(presets::random_one_form(&dom, Algebra::Su2, opts.seed, 0.8)?)?;
    let b = presets::random_zero_form(&dom, Algebra::Su2, opts.seed + 1, 0.8)?;
    let op = ConeOperator::symplectic(a, b)?;
    let xi = presets::random_form(&dom, Algebra::Su2, 1, opts.seed + 2, 1.0)?;
    let eta = presets::random_form(&dom, Algebra::Su2, 0, opts.seed + 3, 1.0)?;
    let c = ConeForm::pair(xi, eta)?;
    let square = op.apply(&op.apply(&c)?)?.sub(&op.curvature_action(&c)?)?.max_abs();

    let ft = op.curvature()?;
    let total = cone::cone_inner_product(&ft, &ft, &g)?;
    let omega_b = symplectic::lefschetz_l(&op.b)?;
    let two = g.norm_sq(&op.connection.curvature()?.add(&omega_b)?)?;
    let one = g.norm_sq(&op.connection.covariant_d(&op.b)?)?;
    let additivity = (total - two - one).abs() / total.max(f64::MIN_POSITIVE);

    let mut mismatches = 0usize;
    for (inst, b) in cone_equivalence_cases(&dom)? {
        let op = ConeOperator::symplectic(inst.connection.clone(), b.clone())?;
        let cone_flat = op.curvature()?.max_abs() <= 1e-10;
        let report = inst.connection.check_symplectically_flat(&b.scale(-1.0), 1e-10)?;
        if cone_flat != report.flat {
            mismatches += 1;
        }
    }

    let t4 = presets::t4_yang_mills_example(8)?;
    let search = flows::cone_b_search(&t4.connection, &t4.metric, opts.cone_starts, opts.seed, 1e-8)?;
    let mut distinct = 0usize;
    let dom_s = presets::torus(4, 8)?;
    for inst in [
        presets::constant_flux(&dom_s, 0.3)?,
        presets::build(
            &presets::Preset::RandomAbelian {
                seed: opts.seed,
                amplitude: 0.5,
            },
            presets::Sampling {
                resolution: 8,
                ..Default::default()
            },
        )?,
    ] {
        let s = flows::cone_b_search(&inst.connection, &inst.metric, opts.cone_starts, opts.seed, 1e-8)?;
        distinct = distinct.max(s.distinct);
    }
    Ok(vec![
        Check::at_most("cone.square", "D_C^2 = [F~, .]", square, 1e-8),
        Check::at_most("cone.additivity", "|F~|_C^2 = |F + wB|^2 + |d_A B|^2", additivity, 1e-12),
        Check::at_most(
            "cone.flat_equivalence",
            "cone-flat iff symplectically flat with Phi = -B",
            mismatches as f64,
            0.0,
        ),
        Check::at_least(
            "cone.no_b_for_t4",
            "no B makes a non-primitive Yang-Mills connection cone-critical",
            search.floor,
            1e-3,
        ),
        Check::at_most("cone.unique_b", "at most one B is cone-critical", distinct as f64, 1.0),
    ])
}

/// `(instance, B)` pairs on both sides of the cone-flatness equivalence.
pub fn cone_equivalence_cases(dom: &Arc<Domain>) -> Result<Vec<(presets::Instance, DifferentialForm)>> {
    let flux = presets::constant_flux(dom, 0.3)?;
    let wilson = presets::flat_wilson(dom, &[0.1, -0.2, 0.3, 0.05])?;
    let random = presets::random_connection(dom, Algebra::Abelian, 3, 0.4)?;
    let bump = presets::random_zero_form(dom, Algebra::Abelian, 4, 0.1)?;
    let const_b = |c: f64| DifferentialForm::constant(dom, 0, &[c]);
    Ok(vec![
        (flux.clone(), const_b(-0.3)?),
        (flux.clone(), const_b(-0.2)?),
        (flux, const_b(-0.3)?.add(&bump)?),
        (wilson.clone(), const_b(0.0)?),
        (wilson, bump.clone()),
        (random.clone(), const_b(0.0)?),
        (random, bump),
    ])
}

/// Smallest positive element of `ℤc₁ + ℤc₂`, by scanning `p·a mod |b|` over
/// one period, where `c₁ = a/d`, `c₂ = b/d`.
pub fn brute_force_minimum(c1: &BigRational, c2: &BigRational) -> Option<BigRational> {
    use num_traits::{Signed, ToPrimitive};
    let d = c1.denom() * c2.denom();
    let scale = BigRational::from_integer(d.clone());
    let a = (c1 * &scale).to_integer().to_i128()?;
    let b = (c2 * &scale).to_integer().abs().to_i128()?;
    if a == 0 || b == 0 {
        return None;
    }
    let best = (0..b).map(|p| (p * a).rem_euclid(b)).filter(|&r| r > 0).min().unwrap_or(b);
    Some(BigRational::new(best.into(), d))
}

fn classify_suite() -> Result<Vec<Check>> {
    let q = classification::parse_rational;
    let exact = |a: &str, b: &str| -> Result<f64> {
        let (a, b) = (q(a)?, q(b)?);
        let report = classification::classify_u1_t4(&Coefficient::Rational(a.clone()), &Coefficient::Rational(b.clone()))?;
        let oracle = brute_force_minimum(&a, &b);
        Ok(if report.c0.is_some() && report.c0 == oracle { 0.0 } else { 1.0 })
    };
    let irr = classification::classify_u1_t4(&Coefficient::Rational(q("1")?), &Coefficient::IrrationalRatio)?;
    let irr_ok = irr.verdict.case == Case::FlatOnly && irr.euler_class == "0";
    let t4 = classification::case_of(&classification::PeriodGroupSpec::new(Vec::new()))?;

    let dom = presets::torus(4, 16)?;
    let c = 0.375;
    let flux = presets::constant_flux(&dom, c)?;
    let rect = Rectangle {
        axes: (0, 1),
        corner: vec![0.4, 0.7, 1.1, 2.0],
        extents: [1.3, 0.9],
    };
    let phase = flux.connection.loop_phase(&rect)?;
    let holonomy_err = (phase - c * 1.3 * 0.9).abs();
    Ok(vec![
        Check::at_most("classify.c0_1_half", "c0 = 1/2 for (1, 1/2), exact", exact("1", "1/2")?, 0.0),
        Check::at_most("classify.c0_2_3", "c0 = 1 for (2, 3), exact", exact("2", "3")?, 0.0),
        Check::at_most("classify.c0_mixed", "c0 = 1/12 for (3/4, 5/6), exact", exact("3/4", "5/6")?, 0.0),
        Check::at_most(
            "classify.irrational",
            "the only possible c is 0: every zeta-flat connection is flat",
            if irr_ok { 0.0 } else { 1.0 },
            0.0,
        ),
        Check::at_most(
            "classify.t4_extension",
            "pi_2(T4) = 0, so Gamma is an R-extension",
            if t4.case == Case::RExtension { 0.0 } else { 1.0 },
            0.0,
        ),
        Check::at_most(
            "classify.holonomy",
            "contractible loop holonomy is exp(i c area)",
            holonomy_err,
            1e-10,
        ),
    ])
}

fn cs_suite() -> Result<Vec<Check>> {
    let t2 = presets::torus(2, 16)?;
    let c = 0.7;
    let flux2 = presets::constant_flux(&t2, c)?;
    let b2 = DifferentialForm::constant(&t2, 0, &[-c])?;
    let phi2 = DifferentialForm::constant(&t2, 0, &[c])?;
    let p2 = functionals::chern_simons_p2(&flux2.connection, &b2)?;
    let p2_expected = functionals::cs_integral(&phi2)? / (8.0 * PI * PI);
    let p2_err = (p2.value.re - p2_expected).abs();

    let t4 = presets::torus(4, 8)?;
    let flux4 = presets::constant_flux(&t4, c)?;
    let b4 = DifferentialForm::constant(&t4, 0, &[-c])?;
    let phi4 = DifferentialForm::constant(&t4, 0, &[c])?;
    let p4 = functionals::chern_simons_p4(&flux4.connection, &b4)?;
    let p4_expected = functionals::cs_integral(&phi4)? / 48.0;
    let p4_err = (p4.value.im - p4_expected).abs().max(p4.value.re.abs());

    let grad_norm = |a: &Connection, b: &DifferentialForm| -> Result<f64> {
        let grad = functionals::p2_gradient(a, b)?;
        Ok(grad.a.max_abs().max(grad.b.as_ref().map_or(0.0, DifferentialForm::max_abs)))
    };
    let wilson = presets::flat_wilson(&t2, &[0.2, -0.1])?;
    let zero = DifferentialForm::zeros(&t2, Algebra::Abelian, 0)?;
    let flat_grad = grad_norm(&wilson.connection, &zero)?.max(grad_norm(&flux2.connection, &b2)?);
    let bump = DifferentialForm::from_fn(&t2, Algebra::Abelian, 0, |x, out| out[0] = 0.3 * x[0].sin())?;
    let perturbed = grad_norm(&flux2.connection, &b2.add(&bump)?)?;

    let a_su2 = Connection::new(presets::random_one_form(&t2, Algebra::Su2, 3, 0.7)?)?;
    let b_su2 = presets::random_zero_form(&t2, Algebra::Su2, 4, 0.6)?;
    let a4 = Connection::new(presets::random_one_form(&t4, Algebra::Su2, 5, 0.5)?)?;
    let b4r = presets::random_zero_form(&t4, Algebra::Su2, 6, 0.5)?;
    let exact = functionals::chern_simons_p2(&a_su2, &b_su2)?
        .exact_term
        .abs()
        .max(functionals::chern_simons_p4(&a4, &b4r)?.exact_term.abs());
    Ok(vec![
        Check::at_most("cs.p2_identity", "P2(A,-Phi) = (1/8pi^2) int tr Phi^2 w", p2_err, 1e-6),
        Check::at_most("cs.p4_identity", "P4(A,-Phi) = (i/48) int tr Phi^3 w^2", p4_err, 1e-6),
        Check::at_most(
            "cs.p2_critical_flat",
            "symplectically flat pairs are critical for P2",
            flat_grad,
            1e-7,
        ),
        Check::at_least("cs.p2_perturbed", "perturbed pairs are not critical for P2", perturbed, 1e-3),
        Check::at_most("cs.exact_terms", "exact terms integrate to zero", exact, 1e-8),
    ])
}
