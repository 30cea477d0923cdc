//! The mapping cone `Ω*(M, ad P)[θ]` with `θ² = 0`, `|θ| = 1`, `dθ = σ`.
//!
//! A cone form of total degree `K` is `ξ + θη` with `|ξ| = K`, `|η| = K − 1`.
//! The cone operator acts in the adjoint representation:
//!
//! ```text
//! D_C(ξ + θη) = d_Aξ + σ∧η + θ([B, ξ] − d_Aη)
//! ```
//!
//! With these signs `D_C²(ξ + θη) = [F̃, ξ + θη]` for `F̃ = (F + σB) − θ d_AB`,
//! in every degree.

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::form::{DifferentialForm, Pairing};
use crate::gauge::Connection;
use crate::metric::Metric;
use crate::symplectic::{self, ClosedTwoForm};

/// `ξ + θη`. Slots outside `0..=dim` are absent and read as zero.
#[derive(Debug, Clone)]
pub struct ConeForm {
    domain: Arc<Domain>,
    algebra: Algebra,
    degree: usize,
    xi: Option<DifferentialForm>,
    eta: Option<DifferentialForm>,
}

impl ConeForm {
    /// Build from slots. `xi` must have degree `degree` and `eta` degree `degree − 1`.
    pub fn new(
        domain: &Arc<Domain>,
        algebra: Algebra,
        degree: usize,
        xi: Option<DifferentialForm>,
        eta: Option<DifferentialForm>,
    ) -> Result<Self> {
        let dim = domain.dim();
        if degree > dim + 1 {
            return Err(Error::DegreeOverflow {
                op: "cone form",
                degree,
                dim,
            });
        }
        for (slot, want) in [(&xi, Some(degree)), (&eta, degree.checked_sub(1))] {
            if let Some(f) = slot {
                if Some(f.degree()) != want {
                    return Err(Error::DegreeMismatch {
                        op: "cone form",
                        expected: want.unwrap_or(0),
                        got: f.degree(),
                    });
                }
                if f.algebra() != algebra {
                    return Err(Error::AlgebraMismatch("cone slots must share an algebra".into()));
                }
                if !(Arc::ptr_eq(f.domain(), domain) || **f.domain() == **domain) {
                    return Err(Error::DomainMismatch);
                }
            }
        }
        Ok(Self {
            domain: Arc::clone(domain),
            algebra,
            degree,
            xi,
            eta,
        })
    }

    /// `ξ + θη` from two present slots.
    pub fn pair(xi: DifferentialForm, eta: DifferentialForm) -> Result<Self> {
        let domain = Arc::clone(xi.domain());
        Self::new(&domain, xi.algebra(), xi.degree(), Some(xi), Some(eta))
    }

    /// `ξ + θ·0`.
    pub fn plain(xi: DifferentialForm) -> Result<Self> {
        let domain = Arc::clone(xi.domain());
        Self::new(&domain, xi.algebra(), xi.degree(), Some(xi), None)
    }

    /// `0 + θη`.
    pub fn theta(eta: DifferentialForm) -> Result<Self> {
        let domain = Arc::clone(eta.domain());
        Self::new(&domain, eta.algebra(), eta.degree() + 1, None, Some(eta))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn xi(&self) -> Option<&DifferentialForm> {
        self.xi.as_ref()
    }

    pub fn eta(&self) -> Option<&DifferentialForm> {
        self.eta.as_ref()
    }

    /// Largest absolute sample of each slot.
    pub fn slot_max_abs(&self) -> (f64, f64) {
        (
            self.xi.as_ref().map_or(0.0, DifferentialForm::max_abs),
            self.eta.as_ref().map_or(0.0, DifferentialForm::max_abs),
        )
    }

    pub fn max_abs(&self) -> f64 {
        let (a, b) = self.slot_max_abs();
        a.max(b)
    }

    pub fn sub(&self, other: &ConeForm) -> Result<ConeForm> {
        let op = |a: &Option<DifferentialForm>, b: &Option<DifferentialForm>| -> Result<Option<DifferentialForm>> {
            Ok(match (a, b) {
                (Some(x), Some(y)) => Some(x.sub(y)?),
                (Some(x), None) => Some(x.clone()),
                (None, Some(y)) => Some(y.scale(-1.0)),
                (None, None) => None,
            })
        };
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                op: "cone difference",
                expected: self.degree,
                got: other.degree,
            });
        }
        ConeForm::new(
            &self.domain,
            self.algebra,
            self.degree,
            op(&self.xi, &other.xi)?,
            op(&self.eta, &other.eta)?,
        )
    }

    /// Coefficient of `θ` in `self ∧ other`: `(−1)^{|ξ₁|} ξ₁∧η₂ + η₁∧ξ₂`.
    pub fn wedge_theta_coefficient(&self, other: &ConeForm, pairing: Pairing) -> Result<Option<DifferentialForm>> {
        let sign = if self.degree % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc: Option<DifferentialForm> = None;
        let mut push = |f: DifferentialForm| -> Result<()> {
            acc = Some(match acc.take() {
                Some(a) => a.add(&f)?,
                None => f,
            });
            Ok(())
        };
        if let (Some(x1), Some(e2)) = (&self.xi, &other.eta) {
            push(x1.wedge(e2, pairing)?.scale(sign))?;
        }
        if let (Some(e1), Some(x2)) = (&self.eta, &other.xi) {
            push(e1.wedge(x2, pairing)?)?;
        }
        Ok(acc)
    }
}

/// `D_C = d_A + θB` with `dθ = σ`.
#[derive(Debug, Clone)]
pub struct ConeOperator {
    pub connection: Connection,
    pub b: DifferentialForm,
    pub sigma: DifferentialForm,
}

impl ConeOperator {
    /// Cone operator with `σ = ω`.
    pub fn symplectic(connection: Connection, b: DifferentialForm) -> Result<Self> {
        let sigma = symplectic::omega(connection.domain())?;
        Self::with_sigma(connection, b, sigma)
    }

    pub fn with_sigma(connection: Connection, b: DifferentialForm, sigma: DifferentialForm) -> Result<Self> {
        if b.degree() != 0 || b.algebra() != connection.algebra() {
            return Err(Error::InvalidParameter(
                "B must be a 0-form in the connection's algebra".into(),
            ));
        }
        if !b.same_domain(connection.potential()) || !sigma.same_domain(&b) {
            return Err(Error::DomainMismatch);
        }
        if sigma.dim() > 2 && sigma.domain().as_torus().is_some() {
            ClosedTwoForm::new(sigma.clone(), 1e-8)?;
        } else if sigma.degree() != 2 || sigma.algebra() != Algebra::Abelian {
            return Err(Error::InvalidParameter("σ must be a real 2-form".into()));
        }
        Ok(Self {
            connection,
            b,
            sigma,
        })
    }

    /// `D_C(ξ + θη) = d_Aξ + σ∧η + θ([B, ξ] − d_Aη)`.
    pub fn apply(&self, c: &ConeForm) -> Result<ConeForm> {
        if c.algebra != self.connection.algebra() {
            return Err(Error::AlgebraMismatch("cone form and operator differ in algebra".into()));
        }
        let dim = c.domain.dim();
        let k = c.degree;
        let mut xi_out: Option<DifferentialForm> = None;
        if k < dim {
            let mut acc = DifferentialForm::zeros(&c.domain, c.algebra, k + 1)?;
            if let Some(xi) = &c.xi {
                acc = acc.add(&self.connection.covariant_d(xi)?)?;
            }
            if let Some(eta) = &c.eta {
                acc = acc.add(&self.sigma.wedge(eta, Pairing::Plain)?)?;
            }
            xi_out = Some(acc);
        }
        let mut eta_out = DifferentialForm::zeros(&c.domain, c.algebra, k)?;
        if let Some(xi) = &c.xi {
            eta_out = eta_out.add(&self.b.wedge(xi, Pairing::Bracket)?)?;
        }
        if let Some(eta) = &c.eta {
            if eta.degree() < dim {
                eta_out = eta_out.sub(&self.connection.covariant_d(eta)?)?;
            }
        }
        ConeForm::new(&c.domain, c.algebra, k + 1, xi_out, Some(eta_out))
    }

    /// `F̃ = (F + σB) − θ d_AB`.
    pub fn curvature(&self) -> Result<ConeForm> {
        let f = self.connection.curvature()?;
        let first = f.add(&self.b.wedge(&self.sigma, Pairing::Plain)?)?;
        let second = self.connection.covariant_d(&self.b)?.scale(-1.0);
        ConeForm::pair(first, second)
    }

    /// `[F̃, c]`, the action of the cone curvature on a cone form.
    pub fn curvature_action(&self, c: &ConeForm) -> Result<ConeForm> {
        let ft = self.curvature()?;
        let f = ft.xi.as_ref().expect("curvature has a 2-form slot");
        let minus_dab = ft.eta.as_ref().expect("curvature has a 1-form slot");
        let dim = c.domain.dim();
        let k = c.degree;
        let xi_out = match &c.xi {
            Some(xi) if k + 2 <= dim => Some(f.wedge(xi, Pairing::Bracket)?),
            _ if k + 2 <= dim => Some(DifferentialForm::zeros(&c.domain, c.algebra, k + 2)?),
            _ => None,
        };
        let mut eta_out = DifferentialForm::zeros(&c.domain, c.algebra, k + 1)?;
        if let Some(eta) = &c.eta {
            eta_out = eta_out.add(&f.wedge(eta, Pairing::Bracket)?)?;
        }
        if let Some(xi) = &c.xi {
            eta_out = eta_out.add(&minus_dab.wedge(xi, Pairing::Bracket)?)?;
        }
        ConeForm::new(&c.domain, c.algebra, k + 2, xi_out, Some(eta_out))
    }
}

/// `*_C(ξ + θη) = *η + (−1)^{|ξ|} θ *ξ`.
pub fn cone_star(c: &ConeForm, g: &Metric) -> Result<ConeForm> {
    let dim = c.domain.dim();
    if dim % 2 != 0 {
        return Err(Error::InvalidDomain("cone star needs an even dimension".into()));
    }
    let k = c.degree;
    let out_degree = dim + 1 - k;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let xi = match &c.eta {
        Some(eta) => Some(g.hodge_star(eta)?),
        None if out_degree <= dim => Some(DifferentialForm::zeros(&c.domain, c.algebra, out_degree)?),
        None => None,
    };
    let eta = match &c.xi {
        Some(xi) => Some(g.hodge_star(xi)?.scale(sign)),
        None if out_degree >= 1 => Some(DifferentialForm::zeros(&c.domain, c.algebra, out_degree - 1)?),
        None => None,
    };
    ConeForm::new(&c.domain, c.algebra, out_degree, xi, eta)
}

/// `⟨ξ₁ + θη₁, ξ₂ + θη₂⟩_C = ⟨ξ₁, ξ₂⟩ + ⟨η₁, η₂⟩`.
pub fn cone_inner_product(c1: &ConeForm, c2: &ConeForm, g: &Metric) -> Result<f64> {
    if c1.degree != c2.degree {
        return Err(Error::DegreeMismatch {
            op: "cone_inner_product",
            expected: c1.degree,
            got: c2.degree,
        });
    }
    let mut total = 0.0;
    if let (Some(a), Some(b)) = (&c1.xi, &c2.xi) {
        total += g.inner_product(a, b)?;
    }
    if let (Some(a), Some(b)) = (&c1.eta, &c2.eta) {
        total += g.inner_product(a, b)?;
    }
    Ok(total)
}

/// Slot norms `(‖F + σB‖², ‖d_AB‖²)` of the cone curvature.
pub fn cone_curvature_norms(op: &ConeOperator, g: &Metric) -> Result<(f64, f64)> {
    let ft = op.curvature()?;
    let a = g.norm_sq(ft.xi().expect("2-form slot"))?;
    let b = g.norm_sq(ft.eta().expect("1-form slot"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TorusDomain;
    use crate::presets;

    fn t4(n: usize) -> Arc<Domain> {
        Arc::new(TorusDomain::cubic(4, n).unwrap().into())
    }

    #[test]
    fn d_of_theta_is_sigma() {
        let dom = t4(8);
        let a = Connection::trivial(&dom, Algebra::Abelian).unwrap();
        let b = DifferentialForm::zeros(&dom, Algebra::Abelian, 0).unwrap();
        let op = ConeOperator::symplectic(a, b).unwrap();
        let one = DifferentialForm::constant(&dom, 0, &[1.0]).unwrap();
        let c = ConeForm::theta(one.clone()).unwrap();
        let dc = op.apply(&c).unwrap();
        let omega = symplectic::omega(&dom).unwrap();
        assert!(dc.xi().unwrap().sub(&omega).unwrap().max_abs() < 1e-15);
        assert_eq!(dc.eta().unwrap().max_abs(), 0.0);
        let d1 = op.apply(&ConeForm::plain(one).unwrap()).unwrap();
        assert_eq!(d1.max_abs(), 0.0);
    }

    #[test]
    fn square_is_curvature_action_for_su2() {
        let dom = t4(8);
        let a = Connection::new(presets::random_one_form(&dom, Algebra::Su2, 5, 0.8).unwrap()).unwrap();
        let b = presets::random_zero_form(&dom, Algebra::Su2, 6, 0.8).unwrap();
        let op = ConeOperator::symplectic(a, b).unwrap();
        for (xi_deg, seed) in [(0usize, 1u64), (1, 2), (2, 3)] {
            let xi = presets::random_form(&dom, Algebra::Su2, xi_deg, seed, 1.0).unwrap();
            let c = if xi_deg == 0 {
                ConeForm::plain(xi).unwrap()
            } else {
                let eta = presets::random_form(&dom, Algebra::Su2, xi_deg - 1, seed + 10, 1.0).unwrap();
                ConeForm::pair(xi, eta).unwrap()
            };
            let lhs = op.apply(&op.apply(&c).unwrap()).unwrap();
            let rhs = op.curvature_action(&c).unwrap();
            let err = lhs.sub(&rhs).unwrap().max_abs();
            assert!(err < 1e-8, "degree {xi_deg}: {err:e}");
        }
    }

    #[test]
    fn star_of_one_and_theta() {
        let dom = t4(8);
        let g = Metric::flat(&dom);
        let one = DifferentialForm::constant(&dom, 0, &[1.0]).unwrap();
        let s = cone_star(&ConeForm::plain(one.clone()).unwrap(), &g).unwrap();
        assert_eq!(s.degree(), 5);
        assert!(s.xi().is_none());
        assert!(s.eta().unwrap().fields()[0].iter().all(|&v| v == 1.0));
        let t = cone_star(&ConeForm::theta(one).unwrap(), &g).unwrap();
        assert_eq!(t.degree(), 4);
        assert!(t.xi().unwrap().fields()[0].iter().all(|&v| v == 1.0));
        assert_eq!(t.eta().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn constant_flux_cone_curvature_vanishes() {
        let dom = t4(8);
        let inst = presets::constant_flux(&dom, 0.7).unwrap();
        let b = DifferentialForm::constant(&dom, 0, &[-0.7]).unwrap();
        let op = ConeOperator::symplectic(inst.connection, b).unwrap();
        assert!(op.curvature().unwrap().max_abs() < 1e-15);
    }
}
