//! The Darboux form `ω = Σ dx_{2i−1}∧dx_{2i}`, the Lefschetz operators `L`, `Λ`,
//! primitive projections and the splitting `d = ∂₊ + ω∧∂₋`.
//!
//! `Λ` is the double contraction with the inverse bivector, so it never reads a
//! metric: `(Λη)_J = Σ_i η(e_{2i−1}, e_{2i}, e_J)`. It is adjoint to `L` for every
//! compatible metric.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::Algebra;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::form::{index_sets, wedge_sign, DifferentialForm, Pairing};
use crate::gauge::Connection;
use crate::metric::Metric;

/// Relative tolerance on `‖Λη‖∞` below which `η` counts as primitive.
pub const PRIMITIVE_TOLERANCE: f64 = 1e-8;

fn check_even(domain: &Domain) -> Result<usize> {
    let dim = domain.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::InvalidDomain(format!(
            "symplectic structure needs an even dimension, got {dim}"
        )));
    }
    Ok(dim / 2)
}

/// Half the dimension.
pub fn half_dim(domain: &Domain) -> Result<usize> {
    check_even(domain)
}

/// The Darboux form on `domain`, with a vanishing analytic derivative attached.
pub fn omega(domain: &Arc<Domain>) -> Result<DifferentialForm> {
    let n = check_even(domain)?;
    let dim = 2 * n;
    let masks = index_sets(dim, 2);
    let coeffs: Vec<f64> = masks
        .iter()
        .map(|&m| {
            if (0..n).any(|i| m == 0b11 << (2 * i)) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let w = DifferentialForm::constant(domain, 2, &coeffs)?;
    if dim > 2 {
        let dw = DifferentialForm::zeros(domain, Algebra::Abelian, 3)?;
        w.with_analytic_derivative(dw)
    } else {
        Ok(w)
    }
}

/// `L η = ω∧η`.
pub fn lefschetz_l(eta: &DifferentialForm) -> Result<DifferentialForm> {
    omega(eta.domain())?.wedge(eta, Pairing::Plain)
}

/// `Λη`, contraction with the inverse bivector.
pub fn dual_lefschetz(eta: &DifferentialForm) -> Result<DifferentialForm> {
    let n = check_even(eta.domain())?;
    let k = eta.degree();
    if k < 2 {
        return Err(Error::UnsupportedDegree {
            op: "dual_lefschetz",
            degree: k,
            dim: eta.dim(),
        });
    }
    let dim = eta.dim();
    let w = eta.algebra().dim();
    let in_masks = eta.masks();
    let out_masks = index_sets(dim, k - 2);
    let npts = eta.num_points();
    let fields: Vec<Vec<f64>> = out_masks
        .par_iter()
        .flat_map_iter(|&j| {
            let terms: Vec<(usize, f64)> = (0..n)
                .filter_map(|i| {
                    let pair = 0b11u8 << (2 * i);
                    let sign = wedge_sign(pair, j)?;
                    let c = in_masks.iter().position(|&m| m == pair | j)?;
                    Some((c, sign))
                })
                .collect();
            (0..w)
                .map(|a| {
                    let mut out = vec![0.0; npts];
                    for &(c, sign) in &terms {
                        for (o, v) in out.iter_mut().zip(eta.field(c, a)) {
                            *o += sign * v;
                        }
                    }
                    out
                })
                .collect::<Vec<_>>()
        })
        .collect();
    DifferentialForm::from_fields(eta.domain(), eta.algebra(), k - 2, fields)
}

/// `η = η_p + Φω` for a 2-form.
#[derive(Debug, Clone)]
pub struct LefschetzDecomposition {
    pub primitive: DifferentialForm,
    pub phi: DifferentialForm,
    /// Set in dimension 2, where every 2-form is a multiple of `ω` and the
    /// primitive part is forced to vanish.
    pub degenerate: bool,
}

/// Split a 2-form as `η_p + Φω` with `Φ = Λη/n` and `Λη_p = 0`.
pub fn lefschetz_decompose_2form(eta: &DifferentialForm) -> Result<LefschetzDecomposition> {
    if eta.degree() != 2 {
        return Err(Error::DegreeMismatch {
            op: "lefschetz_decompose_2form",
            expected: 2,
            got: eta.degree(),
        });
    }
    let n = check_even(eta.domain())?;
    let phi = dual_lefschetz(eta)?.scale(1.0 / n as f64);
    let degenerate = n == 1;
    if degenerate {
        log::warn!("Lefschetz decomposition in dimension 2: primitive part is identically zero");
    }
    let mut primitive = eta.clone();
    let w = eta.algebra().dim();
    let dim = eta.dim();
    for i in 0..n {
        let c = crate::form::index_position(dim, 0b11u8 << (2 * i));
        for a in 0..w {
            let field = primitive.field_mut(c, a);
            for (v, p) in field.iter_mut().zip(phi.field(0, a)) {
                *v -= p;
            }
        }
    }
    Ok(LefschetzDecomposition {
        primitive,
        phi,
        degenerate,
    })
}

/// Projection onto primitive forms for the degrees used here.
///
/// Degrees 0 and 1 are always primitive. On 2-forms `Πη = η − (Λη/n)ω`; on
/// 3-forms in dimension 4 `Πη = η − ω∧Λη`, which vanishes identically since
/// there are no primitive 3-forms on a 4-manifold.
pub fn primitive_project(eta: &DifferentialForm) -> Result<DifferentialForm> {
    let n = check_even(eta.domain())?;
    match (eta.degree(), n) {
        (0 | 1, _) => Ok(eta.clone()),
        (2, _) => Ok(lefschetz_decompose_2form(eta)?.primitive),
        (3, 2) => eta.sub(&lefschetz_l(&dual_lefschetz(eta)?)?),
        (4, 2) => DifferentialForm::zeros(eta.domain(), eta.algebra(), 4),
        (k, _) => Err(Error::UnsupportedDegree {
            op: "primitive_project",
            degree: k,
            dim: eta.dim(),
        }),
    }
}

/// Largest `|Λη|` relative to `1 + |η|`; zero for degrees below 2.
pub fn primitivity_defect(eta: &DifferentialForm) -> Result<f64> {
    if eta.degree() < 2 {
        return Ok(0.0);
    }
    Ok(dual_lefschetz(eta)?.max_abs() / (1.0 + eta.max_abs()))
}

/// `(∂₊η, ∂₋η)`; `minus` is `None` for 0-forms.
#[derive(Debug, Clone)]
pub struct SplitDerivative {
    pub plus: DifferentialForm,
    pub minus: Option<DifferentialForm>,
}

/// Split a given derivative `dη` of a primitive form into `∂₊η + ω∧∂₋η`.
fn split_from(eta: &DifferentialForm, d_eta: DifferentialForm, op: &'static str) -> Result<SplitDerivative> {
    let n = check_even(eta.domain())?;
    let k = eta.degree();
    if k > 2 || k > n {
        return Err(Error::UnsupportedDegree {
            op,
            degree: k,
            dim: eta.dim(),
        });
    }
    let defect = primitivity_defect(eta)?;
    if defect > PRIMITIVE_TOLERANCE {
        return Err(Error::NonPrimitive { op, defect });
    }
    if k == 0 {
        return Ok(SplitDerivative {
            plus: d_eta,
            minus: None,
        });
    }
    // ∂₋η has degree k − 1 and ΛL acts on it as n − k + 1.
    let scale = 1.0 / (n - k + 1) as f64;
    let minus = dual_lefschetz(&d_eta)?.scale(scale);
    let plus = d_eta.sub(&lefschetz_l(&minus)?)?;
    Ok(SplitDerivative {
        plus,
        minus: Some(minus),
    })
}

/// `d = ∂₊ + ω∧∂₋` on a primitive form of degree ≤ 2.
pub fn d_split(eta: &DifferentialForm) -> Result<SplitDerivative> {
    split_from(eta, eta.exterior_derivative()?, "d_split")
}

pub fn d_plus(eta: &DifferentialForm) -> Result<DifferentialForm> {
    Ok(d_split(eta)?.plus)
}

pub fn d_minus(eta: &DifferentialForm) -> Result<Option<DifferentialForm>> {
    Ok(d_split(eta)?.minus)
}

/// `d_A = ∂₊ᴬ + ω∧∂₋ᴬ` on a primitive form of degree ≤ 2.
pub fn twisted_d_split(eta: &DifferentialForm, a: &Connection) -> Result<SplitDerivative> {
    split_from(eta, a.covariant_d(eta)?, "twisted_d_split")
}

pub fn twisted_d_plus(eta: &DifferentialForm, a: &Connection) -> Result<DifferentialForm> {
    Ok(twisted_d_split(eta, a)?.plus)
}

pub fn twisted_d_minus(eta: &DifferentialForm, a: &Connection) -> Result<Option<DifferentialForm>> {
    Ok(twisted_d_split(eta, a)?.minus)
}

/// A 2-form certified closed to a stated tolerance.
#[derive(Debug, Clone)]
pub struct ClosedTwoForm {
    form: DifferentialForm,
    closedness: f64,
}

impl ClosedTwoForm {
    pub fn new(form: DifferentialForm, tolerance: f64) -> Result<Self> {
        if form.degree() != 2 || form.algebra() != Algebra::Abelian {
            return Err(Error::InvalidParameter("ζ must be a real 2-form".into()));
        }
        let closedness = if form.dim() > 2 {
            form.exterior_derivative()?.max_abs()
        } else {
            0.0
        };
        if closedness > tolerance {
            return Err(Error::InvalidParameter(format!(
                "ζ is not closed: |dζ| = {closedness:e}"
            )));
        }
        Ok(Self { form, closedness })
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    /// `‖dζ‖∞` measured at construction.
    pub fn closedness(&self) -> f64 {
        self.closedness
    }

    /// Pointwise norm `|ζ|_g(x)`.
    pub fn pointwise_norm(&self, g: &Metric) -> Result<Vec<f64>> {
        Ok(g.pointwise_inner(&self.form, &self.form)?
            .into_iter()
            .map(f64::sqrt)
            .collect())
    }
}

/// `F = F_⊥ + Φζ` with `Φ = ⟨F, ζ⟩_g / |ζ|²_g` pointwise.
pub fn zeta_decompose(
    f: &DifferentialForm,
    zeta: &DifferentialForm,
    g: &Metric,
) -> Result<(DifferentialForm, DifferentialForm)> {
    if f.degree() != 2 || zeta.degree() != 2 {
        return Err(Error::DegreeMismatch {
            op: "zeta_decompose",
            expected: 2,
            got: if f.degree() != 2 { f.degree() } else { zeta.degree() },
        });
    }
    if zeta.algebra() != Algebra::Abelian {
        return Err(Error::AlgebraMismatch("ζ must be real-valued".into()));
    }
    if !f.same_domain(zeta) {
        return Err(Error::DomainMismatch);
    }
    let norm_sq = g.pointwise_inner(zeta, zeta)?;
    let scale = norm_sq.iter().cloned().fold(0.0, f64::max);
    if let Some(point) = norm_sq
        .iter()
        .position(|&v| !(v > 1e-24 * scale.max(1.0)))
    {
        return Err(Error::DegenerateZeta { point });
    }
    let w = f.algebra().dim();
    let mut fields = Vec::with_capacity(w);
    for a in 0..w {
        let fa = DifferentialForm::from_fields(
            f.domain(),
            Algebra::Abelian,
            2,
            (0..f.num_components()).map(|c| f.field(c, a).to_vec()).collect(),
        )?;
        let num = g.pointwise_inner(&fa, zeta)?;
        fields.push(num.iter().zip(&norm_sq).map(|(x, y)| x / y).collect());
    }
    let phi = DifferentialForm::from_fields(f.domain(), f.algebra(), 0, fields)?;
    let perp = f.sub(&phi.wedge(zeta, Pairing::Plain)?)?;
    Ok((perp, phi))
}
