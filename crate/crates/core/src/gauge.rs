//! Connections, curvature, covariant calculus and gauge transformations.
//!
//! An su(2) connection is a global 1-form `a` on a trivial bundle. An abelian
//! connection may additionally carry a closed background flux `β`, standing in
//! for a nontrivial line or circle bundle: its curvature is `β + da`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{self, Algebra};
use crate::domain::{Domain, TorusDomain};
use crate::error::{Error, Result};
use crate::form::{index_position, DifferentialForm, Pairing};
use crate::metric::Metric;
use crate::symplectic;

/// Default closedness tolerance for background fluxes.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Connection {
    potential: DifferentialForm,
    flux: Option<DifferentialForm>,
}

impl Connection {
    pub fn new(potential: DifferentialForm) -> Result<Self> {
        if potential.degree() != 1 {
            return Err(Error::InvalidConnection(format!(
                "connection potential must be a 1-form, got degree {}",
                potential.degree()
            )));
        }
        if potential.algebra() == Algebra::Quaternion {
            return Err(Error::InvalidConnection(
                "structure algebra must be abelian or su2".into(),
            ));
        }
        if !potential.is_finite() {
            return Err(Error::NotFinite("connection potential"));
        }
        Ok(Self {
            potential,
            flux: None,
        })
    }

    pub fn trivial(domain: &Arc<Domain>, algebra: Algebra) -> Result<Self> {
        Self::new(DifferentialForm::zeros(domain, algebra, 1)?)
    }

    /// Attach a closed background flux (abelian only).
    pub fn with_flux(mut self, beta: DifferentialForm) -> Result<Self> {
        if self.algebra() != Algebra::Abelian || beta.algebra() != Algebra::Abelian {
            return Err(Error::InvalidConnection(
                "background flux is only available for abelian connections".into(),
            ));
        }
        if beta.degree() != 2 || !beta.same_domain(&self.potential) {
            return Err(Error::InvalidConnection(
                "background flux must be a 2-form on the connection's domain".into(),
            ));
        }
        if beta.degree() < beta.dim() {
            if let Ok(db) = beta.exterior_derivative() {
                let defect = db.max_abs();
                if defect > CLOSEDNESS_TOLERANCE * (1.0 + beta.max_abs()) {
                    return Err(Error::InvalidConnection(format!(
                        "background flux is not closed (|dβ| = {defect:e})"
                    )));
                }
            }
        }
        self.flux = Some(beta);
        Ok(self)
    }

    pub fn algebra(&self) -> Algebra {
        self.potential.algebra()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.potential.domain()
    }

    pub fn potential(&self) -> &DifferentialForm {
        &self.potential
    }

    pub fn flux(&self) -> Option<&DifferentialForm> {
        self.flux.as_ref()
    }

    /// `A + ξ` with the same background flux.
    pub fn shifted(&self, xi: &DifferentialForm) -> Result<Self> {
        Ok(Self {
            potential: self.potential.add(xi)?,
            flux: self.flux.clone(),
        })
    }

    /// `F = β + da` (abelian) or `F = da + ½[a∧a]` (su2).
    pub fn curvature(&self) -> Result<DifferentialForm> {
        let da = self.potential.exterior_derivative()?;
        match self.algebra() {
            Algebra::Su2 => {
                let aa = self.potential.wedge(&self.potential, Pairing::Bracket)?;
                da.axpy(0.5, &aa)
            }
            _ => match &self.flux {
                Some(beta) => da.add(beta),
                None => Ok(da),
            },
        }
    }

    fn check_form(&self, eta: &DifferentialForm) -> Result<()> {
        if !eta.same_domain(&self.potential) {
            return Err(Error::DomainMismatch);
        }
        if eta.algebra() != self.algebra() {
            return Err(Error::AlgebraMismatch(format!(
                "{} form with {} connection",
                eta.algebra().name(),
                self.algebra().name()
            )));
        }
        Ok(())
    }

    /// `d_A η = dη + [a∧η]`.
    pub fn covariant_d(&self, eta: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_form(eta)?;
        let d = eta.exterior_derivative()?;
        match self.algebra() {
            Algebra::Su2 => d.add(&self.potential.wedge(eta, Pairing::Bracket)?),
            _ => Ok(d),
        }
    }

    /// `d_A* η = −*d_A*η`.
    pub fn covariant_codifferential(
        &self,
        eta: &DifferentialForm,
        g: &Metric,
    ) -> Result<DifferentialForm> {
        self.check_form(eta)?;
        if eta.degree() == 0 {
            return Err(Error::UnsupportedDegree {
                op: "covariant_codifferential",
                degree: 0,
                dim: eta.dim(),
            });
        }
        let s = g.hodge_star(eta)?;
        Ok(g.hodge_star(&self.covariant_d(&s)?)?.scale(-1.0))
    }

    /// Apply a gauge transformation.
    pub fn gauge_apply(&self, gauge: &GaugeTransform) -> Result<Self> {
        match (gauge, self.algebra()) {
            (GaugeTransform::Abelian(lambda), Algebra::Abelian) => {
                if lambda.degree() != 0 || lambda.algebra() != Algebra::Abelian {
                    return Err(Error::InvalidParameter(
                        "abelian gauge parameter must be a real 0-form".into(),
                    ));
                }
                self.shifted(&lambda.exterior_derivative()?)
            }
            (GaugeTransform::Su2(g), Algebra::Su2) => {
                let torus = self.domain().torus("gauge_apply")?;
                if g.len() != self.potential.num_points() {
                    return Err(Error::InvalidParameter(
                        "gauge field length differs from the number of samples".into(),
                    ));
                }
                let dg: Vec<[Vec<f64>; 4]> = (0..torus.dim())
                    .into_par_iter()
                    .map(|axis| {
                        std::array::from_fn(|c| {
                            let comp: Vec<f64> = g.iter().map(|q| q[c]).collect();
                            torus.derivative(&comp, axis)
                        })
                    })
                    .collect();
                let mut out = DifferentialForm::zeros(self.domain(), Algebra::Su2, 1)?;
                for (mu, dg_mu) in dg.iter().enumerate() {
                    let mut fields: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; g.len()]);
                    for (p, gp) in g.iter().enumerate() {
                        let a = self.potential.value(mu, p);
                        let conj = algebra::quat_mul(
                            algebra::quat_mul(*gp, [0.0, a[0], a[1], a[2]]),
                            algebra::quat_conj(*gp),
                        );
                        let dgp = [dg_mu[0][p], dg_mu[1][p], dg_mu[2][p], dg_mu[3][p]];
                        let mc = algebra::quat_mul(dgp, algebra::quat_conj(*gp));
                        for c in 0..3 {
                            fields[c][p] = conj[c + 1] - mc[c + 1];
                        }
                    }
                    for (c, f) in fields.into_iter().enumerate() {
                        *out.field_mut(mu, c) = f;
                    }
                }
                Connection::new(out)
            }
            _ => Err(Error::AlgebraMismatch(
                "gauge transformation does not match the connection's algebra".into(),
            )),
        }
    }

    /// Residuals of `F = Φω`, `d_AΦ = 0`.
    pub fn check_symplectically_flat(
        &self,
        phi: &DifferentialForm,
        tolerance: f64,
    ) -> Result<FlatnessReport> {
        let omega = symplectic::omega(self.domain())?;
        self.check_zeta_flat(phi, &omega, tolerance)
    }

    /// Residuals of `F = Φζ`, `d_AΦ = 0`.
    pub fn check_zeta_flat(
        &self,
        phi: &DifferentialForm,
        zeta: &DifferentialForm,
        tolerance: f64,
    ) -> Result<FlatnessReport> {
        if phi.degree() != 0 {
            return Err(Error::DegreeMismatch {
                op: "flatness check",
                expected: 0,
                got: phi.degree(),
            });
        }
        self.check_form(phi)?;
        let f = self.curvature()?;
        let curvature_residual = f.sub(&phi.wedge(zeta, Pairing::Plain)?)?.max_abs();
        let derivative_residual = self.covariant_d(phi)?.max_abs();
        Ok(FlatnessReport::new(
            curvature_residual,
            derivative_residual,
            tolerance,
        ))
    }

    /// Holonomy `exp(i∮a + i∫β)` around an axis-aligned rectangle (abelian only).
    ///
    /// Both integrals are evaluated exactly on the trigonometric interpolants of
    /// the sampled fields.
    pub fn loop_holonomy(&self, rect: &Rectangle) -> Result<Complex64> {
        Ok(Complex64::from_polar(1.0, self.loop_phase(rect)?))
    }

    /// The real phase `∮a + ∫β` of [`Connection::loop_holonomy`].
    pub fn loop_phase(&self, rect: &Rectangle) -> Result<f64> {
        if self.algebra() != Algebra::Abelian {
            return Err(Error::AbelianOnly("loop_holonomy"));
        }
        let torus = self.domain().torus("loop_holonomy")?;
        rect.validate(torus)?;
        let (i, j) = rect.axes;
        let [x0, y0] = [rect.corner[i], rect.corner[j]];
        let [lx, ly] = rect.extents;
        let a_i = slice_spectrum(torus, self.potential.field(i, 0), rect);
        let a_j = slice_spectrum(torus, self.potential.field(j, 0), rect);
        let (ni, nj) = (torus.resolution()[i], torus.resolution()[j]);
        let mut line = Complex64::new(0.0, 0.0);
        for mi in 0..ni {
            let ki = spectral_k(torus, i, mi);
            for mj in 0..nj {
                let kj = spectral_k(torus, j, mj);
                let ci = a_i[mi * nj + mj];
                let cj = a_j[mi * nj + mj];
                // bottom edge minus top edge, then right edge minus left edge
                line += ci * interval(ki, x0, lx) * (phase(kj * y0) - phase(kj * (y0 + ly)));
                line += cj * interval(kj, y0, ly) * (phase(ki * (x0 + lx)) - phase(ki * x0));
            }
        }
        let mut total = line.re;
        if let Some(beta) = &self.flux {
            let mask = (1u8 << i) | (1u8 << j);
            let b = slice_spectrum(torus, beta.field(index_position(torus.dim(), mask), 0), rect);
            let mut flux = Complex64::new(0.0, 0.0);
            for mi in 0..ni {
                let ki = spectral_k(torus, i, mi);
                for mj in 0..nj {
                    let kj = spectral_k(torus, j, mj);
                    flux += b[mi * nj + mj] * interval(ki, x0, lx) * interval(kj, y0, ly);
                }
            }
            total += flux.re;
        }
        Ok(total)
    }
}

#[inline]
fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `∫_{x0}^{x0+l} e^{ikx} dx`.
#[inline]
fn interval(k: f64, x0: f64, l: f64) -> Complex64 {
    if k == 0.0 {
        Complex64::new(l, 0.0)
    } else {
        (phase(k * (x0 + l)) - phase(k * x0)) / Complex64::new(0.0, k)
    }
}

/// Wavenumber used for exact interpolant integrals; the Nyquist bin is dropped.
fn spectral_k(torus: &TorusDomain, axis: usize, m: usize) -> f64 {
    torus.wavenumber(axis, m)
}

/// 2D spectrum of a field restricted to the plane of `rect` through its corner.
fn slice_spectrum(torus: &TorusDomain, u: &[f64], rect: &Rectangle) -> Vec<Complex64> {
    let spec = torus.spectrum(u);
    let (i, j) = rect.axes;
    let nj = torus.resolution()[j];
    let mut out = vec![Complex64::new(0.0, 0.0); torus.resolution()[i] * nj];
    for (p, c) in spec.iter().enumerate() {
        let idx = torus.multi_index(p);
        if idx
            .iter()
            .enumerate()
            .any(|(axis, &m)| torus.resolution()[axis] == 2 * m)
        {
            continue;
        }
        let mut w = *c;
        for (axis, &m) in idx.iter().enumerate() {
            if axis != i && axis != j {
                w *= phase(torus.wavenumber(axis, m) * rect.corner[axis]);
            }
        }
        out[idx[i] * nj + idx[j]] += w;
    }
    out
}

/// An axis-aligned rectangle `corner + [0, extents.0]·e_i + [0, extents.1]·e_j`,
/// traversed counterclockwise in the `(x_i, x_j)` plane with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle {
    pub axes: (usize, usize),
    pub corner: Vec<f64>,
    pub extents: [f64; 2],
}

impl Rectangle {
    fn validate(&self, torus: &TorusDomain) -> Result<()> {
        let (i, j) = self.axes;
        let dim = torus.dim();
        if i >= j || j >= dim || self.corner.len() != dim {
            return Err(Error::InvalidParameter(
                "rectangle needs axes i < j < dim and a full corner point".into(),
            ));
        }
        let periods = torus.periods();
        if self.extents[0] < 0.0
            || self.extents[1] < 0.0
            || self.extents[0] > periods[i]
            || self.extents[1] > periods[j]
        {
            return Err(Error::InvalidParameter(
                "rectangle must lie within one periodic cell".into(),
            ));
        }
        Ok(())
    }
}

/// A gauge transformation: a real function `λ` (abelian, `a ↦ a + dλ`) or SU(2)
/// samples `g` as unit quaternions (`a ↦ gag⁻¹ − (dg)g⁻¹`).
#[derive(Debug, Clone)]
pub enum GaugeTransform {
    Abelian(DifferentialForm),
    Su2(Vec<[f64; 4]>),
}

impl GaugeTransform {
    /// Largest deviation of an SU(2) field from unit norm above which it is rejected.
    pub const UNITARITY_TOLERANCE: f64 = 1e-10;

    pub fn su2(samples: Vec<[f64; 4]>) -> Result<Self> {
        for (point, q) in samples.iter().enumerate() {
            let defect = algebra::quat_unit_defect(*q);
            if !(defect <= Self::UNITARITY_TOLERANCE) {
                return Err(Error::NonUnitaryGauge { point, defect });
            }
        }
        Ok(GaugeTransform::Su2(samples))
    }

    /// `g = exp(χ)` for an su(2)-valued 0-form `χ`.
    pub fn su2_exp(chi: &DifferentialForm) -> Result<Self> {
        if chi.algebra() != Algebra::Su2 || chi.degree() != 0 {
            return Err(Error::InvalidParameter(
                "exponent must be an su2-valued 0-form".into(),
            ));
        }
        let samples = (0..chi.num_points())
            .map(|p| algebra::su2_exp([chi.field(0, 0)[p], chi.field(0, 1)[p], chi.field(0, 2)[p]]))
            .collect();
        Self::su2(samples)
    }

    /// `gηg⁻¹` for an algebra-valued form (abelian forms are unchanged).
    pub fn conjugate(&self, eta: &DifferentialForm) -> Result<DifferentialForm> {
        match self {
            GaugeTransform::Abelian(_) => Ok(eta.clone()),
            GaugeTransform::Su2(g) => {
                if eta.algebra() != Algebra::Su2 {
                    return Err(Error::AlgebraMismatch("conjugation needs an su2 form".into()));
                }
                let mut out = eta.clone();
                for c in 0..eta.num_components() {
                    let mut fields: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; g.len()]);
                    for (p, gp) in g.iter().enumerate() {
                        let x = eta.value(c, p);
                        let q = algebra::quat_mul(
                            algebra::quat_mul(*gp, [0.0, x[0], x[1], x[2]]),
                            algebra::quat_conj(*gp),
                        );
                        for a in 0..3 {
                            fields[a][p] = q[a + 1];
                        }
                    }
                    for (a, f) in fields.into_iter().enumerate() {
                        *out.field_mut(c, a) = f;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Residual norms of a (ζ-)flatness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatnessReport {
    /// `‖F − Φζ‖∞`
    pub curvature_residual: f64,
    /// `‖d_AΦ‖∞`
    pub derivative_residual: f64,
    pub tolerance: f64,
    pub curvature_ok: bool,
    pub derivative_ok: bool,
    pub flat: bool,
}

impl FlatnessReport {
    pub fn new(curvature_residual: f64, derivative_residual: f64, tolerance: f64) -> Self {
        let curvature_ok = curvature_residual <= tolerance;
        let derivative_ok = derivative_residual <= tolerance;
        Self {
            curvature_residual,
            derivative_residual,
            tolerance,
            curvature_ok,
            derivative_ok,
            flat: curvature_ok && derivative_ok,
        }
    }
}
