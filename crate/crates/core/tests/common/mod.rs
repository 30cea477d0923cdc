//! Property checks shared by the proptest suite and the acceptance harness.
//! Each returns `Err(message)` on violation.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use symflat::algebra::Algebra;
use symflat::classification::{self, Coefficient};
use symflat::cone::{self, ConeForm, ConeOperator};
use symflat::domain::Domain;
use symflat::form::{DifferentialForm, Pairing};
use symflat::functionals::{self, FunctionalKind};
use symflat::gauge::{Connection, GaugeTransform, Rectangle};
use symflat::metric::Metric;
use symflat::presets;
use symflat::symplectic;

pub type Check = Result<(), String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

pub fn torus(dim: usize) -> Arc<Domain> {
    presets::torus(dim, 8).unwrap()
}

pub fn metric(dom: &Arc<Domain>, curved: bool) -> Metric {
    if curved && dom.dim() == 4 {
        Metric::t4_example(dom).unwrap()
    } else {
        Metric::flat(dom)
    }
}

fn form(dom: &Arc<Domain>, alg: Algebra, k: usize, seed: u64) -> DifferentialForm {
    presets::random_form(dom, alg, k, seed, 1.0).unwrap()
}

pub fn d_squared(dim: usize, k: usize, seed: u64) -> Check {
    let dom = torus(dim);
    let eta = form(&dom, Algebra::Su2, k, seed);
    let dd = e(e(eta.exterior_derivative())?.exterior_derivative())?;
    let g = Metric::flat(&dom);
    let (n_dd, n_eta) = (e(g.norm_sq(&dd))?.sqrt(), e(g.norm_sq(&eta))?.sqrt());
    ensure(n_dd <= 1e-10 * n_eta, || format!("|ddη| = {n_dd:e}, |η| = {n_eta:e}"))
}

pub fn adjointness(dim: usize, k: usize, seed: u64, curved: bool) -> Check {
    let dom = torus(dim);
    let g = metric(&dom, curved);
    let alpha = form(&dom, Algebra::Abelian, k, seed);
    let beta = form(&dom, Algebra::Abelian, k + 1, seed ^ 0x5bd1);
    let lhs = e(g.inner_product(&e(alpha.exterior_derivative())?, &beta))?;
    let rhs = e(g.inner_product(&alpha, &e(g.codifferential(&beta))?))?;
    let scale = e(g.norm_sq(&alpha))?.sqrt() * e(g.norm_sq(&beta))?.sqrt();
    ensure((lhs - rhs).abs() <= 1e-8 * scale, || format!("<dα,β> = {lhs}, <α,d*β> = {rhs}"))
}

pub fn star_involution(dim: usize, k: usize, seed: u64, curved: bool) -> Check {
    let dom = torus(dim);
    let g = metric(&dom, curved);
    let eta = form(&dom, Algebra::Su2, k, seed);
    let ss = e(g.hodge_star(&e(g.hodge_star(&eta))?))?;
    let sign = if (k * (dim - k)) % 2 == 0 { 1.0 } else { -1.0 };
    let err = e(ss.sub(&eta.scale(sign)))?.max_abs();
    ensure(err <= 1e-13 * eta.max_abs().max(1.0), || format!("|**η ∓ η| = {err:e}"))
}

pub fn graded_commutativity(dim: usize, k: usize, l: usize, seed: u64) -> Check {
    let dom = torus(dim);
    let alpha = form(&dom, Algebra::Abelian, k, seed);
    let beta = form(&dom, Algebra::Abelian, l, seed + 1);
    let ab = e(alpha.wedge(&beta, Pairing::Plain))?;
    let ba = e(beta.wedge(&alpha, Pairing::Plain))?;
    let sign = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
    let err = e(ab.sub(&ba.scale(sign)))?.max_abs();
    ensure(err <= 1e-15 * (1.0 + ab.max_abs()), || format!("|α∧β ∓ β∧α| = {err:e}"))
}

/// `[Λ, L] = (n − k)` on primitive `k`-forms in dimension 4.
pub fn lefschetz_commutator(k: usize, seed: u64) -> Check {
    let dom = torus(4);
    let eta = e(symplectic::primitive_project(&form(&dom, Algebra::Su2, k, seed)))?;
    let mut lhs = e(symplectic::dual_lefschetz(&e(symplectic::lefschetz_l(&eta))?))?;
    if k >= 2 {
        lhs = e(lhs.sub(&e(symplectic::lefschetz_l(&e(symplectic::dual_lefschetz(&eta))?))?))?;
    }
    let err = e(lhs.sub(&eta.scale(2.0 - k as f64)))?.max_abs();
    ensure(err <= 1e-10, || format!("|[Λ,L]η − (n−k)η| = {err:e}"))
}

/// Decomposing a primitive part again gives `Φ = 0`, and `Λ(∂₊η) = 0`.
pub fn decomposition_idempotent(seed: u64) -> Check {
    let dom = torus(4);
    let eta = form(&dom, Algebra::Su2, 2, seed);
    let p = e(symplectic::lefschetz_decompose_2form(&eta))?.primitive;
    let again = e(symplectic::lefschetz_decompose_2form(&p))?;
    let phi = again.phi.max_abs();
    let drift = e(again.primitive.sub(&p))?.max_abs();
    ensure(phi <= 1e-14 && drift <= 1e-14, || format!("Φ(η_p) = {phi:e}, drift {drift:e}"))?;
    let one = form(&dom, Algebra::Su2, 1, seed + 9);
    let lam = e(symplectic::dual_lefschetz(&e(symplectic::d_plus(&one))?))?.max_abs();
    ensure(lam <= 1e-10, || format!("|Λ∂₊η| = {lam:e}"))
}

/// `⟨Lα, β⟩_g = ⟨α, Λβ⟩_g` under the flat and the curved example metric: Λ never reads `g`.
pub fn lambda_metric_free(seed: u64) -> Check {
    let dom = torus(4);
    let alpha = form(&dom, Algebra::Abelian, 1, seed);
    let beta = form(&dom, Algebra::Abelian, 3, seed + 3);
    let l_alpha = e(symplectic::lefschetz_l(&alpha))?;
    let lam_beta = e(symplectic::dual_lefschetz(&beta))?;
    for curved in [false, true] {
        let g = metric(&dom, curved);
        let lhs = e(g.inner_product(&l_alpha, &beta))?;
        let rhs = e(g.inner_product(&alpha, &lam_beta))?;
        ensure((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), || {
            format!("<Lα,β> = {lhs}, <α,Λβ> = {rhs} (curved: {curved})")
        })?;
    }
    Ok(())
}

pub fn cone_additivity(seed: u64) -> Check {
    let dom = torus(4);
    let g = Metric::flat(&dom);
    let a = e(Connection::new(presets::random_one_form(&dom, Algebra::Su2, seed, 0.8).unwrap()))?;
    let b = presets::random_zero_form(&dom, Algebra::Su2, seed + 1, 0.8).unwrap();
    let f = e(a.curvature())?;
    let two = e(g.norm_sq(&e(f.add(&e(symplectic::lefschetz_l(&b))?))?))?;
    let one = e(g.norm_sq(&e(a.covariant_d(&b))?))?;
    let op = e(ConeOperator::symplectic(a, b))?;
    let ft = e(op.curvature())?;
    let total = e(cone::cone_inner_product(&ft, &ft, &g))?;
    ensure((total - two - one).abs() <= 1e-12 * total, || {
        format!("|F~|² = {total}, slots {two} + {one}")
    })
}

pub fn cone_square(seed: u64) -> Check {
    let dom = torus(4);
    let a = e(Connection::new(presets::random_one_form(&dom, Algebra::Su2, seed, 0.8).unwrap()))?;
    let b = presets::random_zero_form(&dom, Algebra::Su2, seed + 1, 0.8).unwrap();
    let op = e(ConeOperator::symplectic(a, b))?;
    let c = e(ConeForm::plain(form(&dom, Algebra::Su2, 0, seed + 2)))?;
    let err = e(e(op.apply(&e(op.apply(&c))?))?.sub(&e(op.curvature_action(&c))?))?.max_abs();
    ensure(err <= 1e-8, || format!("|D_C²c − [F~,c]| = {err:e}"))
}

/// Functional values are unchanged by a gauge transformation.
pub fn gauge_invariance(seed: u64, su2: bool) -> Check {
    let dom = torus(4);
    let g = Metric::flat(&dom);
    let (a, gauge) = if su2 {
        let a = e(Connection::new(presets::random_one_form(&dom, Algebra::Su2, seed, 0.6).unwrap()))?;
        let chi = presets::random_zero_form(&dom, Algebra::Su2, seed + 1, 0.05).unwrap();
        (a, e(GaugeTransform::su2_exp(&chi))?)
    } else {
        let a = presets::random_connection(&dom, Algebra::Abelian, seed, 0.6).unwrap().connection;
        let lambda = presets::random_zero_form(&dom, Algebra::Abelian, seed + 1, 2.0).unwrap();
        (a, GaugeTransform::Abelian(lambda))
    };
    let b = presets::random_zero_form(&dom, a.algebra(), seed + 2, 0.5).unwrap();
    let ga = e(a.gauge_apply(&gauge))?;
    let gb = e(gauge.conjugate(&b))?;
    for kind in FunctionalKind::ALL {
        let v0 = e(functionals::value(kind, &a, Some(&b), &g))?;
        let v1 = e(functionals::value(kind, &ga, Some(&gb), &g))?;
        ensure((v0 - v1).abs() <= 1e-7 * v0.abs().max(1.0), || {
            format!("{kind}: {v0} before, {v1} after the gauge transformation")
        })?;
    }
    Ok(())
}

/// Smallest positive element of `ℤc₁ + ℤc₂`, by exhaustive search.
///
/// Over a common denominator `d`, `c₁ = a/d` and `c₂ = b/d`. Every positive
/// element up to `|b|/d` is `(p·a mod |b|)/d` for some `0 ≤ p < |b|`.
pub fn brute_force_c0(c1: &BigRational, c2: &BigRational) -> Option<BigRational> {
    use num_traits::{Signed, ToPrimitive};
    let d = c1.denom() * c2.denom();
    let a = (c1 * BigRational::from_integer(d.clone())).to_integer().to_i128()?;
    let b = (c2 * BigRational::from_integer(d.clone())).to_integer().abs().to_i128()?;
    if a == 0 || b == 0 {
        return None;
    }
    let best = (0..b).map(|p| (p * a).rem_euclid(b)).filter(|&r| r > 0).min().unwrap_or(b);
    Some(BigRational::new(best.into(), d))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// The reported `c₀` equals the enumerated minimum.
pub fn classification_exact(c1: BigRational, c2: BigRational) -> Check {
    let report = e(classification::classify_u1_t4(
        &Coefficient::Rational(c1.clone()),
        &Coefficient::Rational(c2.clone()),
    ))?;
    let oracle = brute_force_c0(&c1, &c2);
    ensure(report.c0 == oracle, || format!("({c1}, {c2}): c0 {:?}, enumeration {oracle:?}", report.c0))
}

/// `classify(kc₁, kc₂)` has `c₀` scaled by `k`.
pub fn classification_scaling(c1: BigRational, c2: BigRational, k: BigRational) -> Check {
    let c0 = |a: &BigRational, b: &BigRational| {
        e(classification::classify_u1_t4(&Coefficient::Rational(a.clone()), &Coefficient::Rational(b.clone())))
            .map(|r| r.c0)
    };
    let base = c0(&c1, &c2)?.ok_or("no c0")?;
    let scaled = c0(&(&c1 * &k), &(&c2 * &k))?.ok_or("no c0")?;
    ensure(scaled == &base * &k, || format!("c0 {base} scaled by {k} gave {scaled}"))
}

/// Contractible loops of `constant_flux(c)` have holonomy `exp(i c·area)`.
pub fn holonomy_consistency(c_num: i64, c_den: i64, corner: [f64; 4], extents: [f64; 2]) -> Check {
    let dom = presets::torus(4, 8).unwrap();
    let c = c_num as f64 / c_den as f64;
    let inst = e(presets::constant_flux(&dom, c))?;
    let rect = Rectangle {
        axes: (0, 1),
        corner: corner.to_vec(),
        extents,
    };
    let hol = e(inst.connection.loop_holonomy(&rect))?;
    let expect = num_complex::Complex64::from_polar(1.0, c * extents[0] * extents[1]);
    ensure((hol - expect).norm() <= 1e-10, || format!("holonomy {hol}, expected {expect}"))
}
