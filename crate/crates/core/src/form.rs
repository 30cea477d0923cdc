//! Algebra-valued differential forms sampled on a [`Domain`].
//!
//! A k-form on a d-dimensional domain stores one scalar field per pair
//! (increasing multi-index `I`, algebra coefficient `a`). Multi-indices are kept
//! as bitmasks and enumerated in lexicographic order of their index tuples, so
//! on T⁴ the 2-form components are ordered `12, 13, 14, 23, 24, 34`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{self, Algebra};
use crate::domain::Domain;
use crate::error::{Error, Result};

/// Increasing index sets of size `k` in `0..dim`, as bitmasks in lexicographic order.
pub fn index_sets(dim: usize, k: usize) -> Vec<u8> {
    fn rec(start: usize, dim: usize, k: usize, mask: u8, out: &mut Vec<u8>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..dim {
            rec(i + 1, dim, k - 1, mask | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= dim {
        rec(0, dim, k, 0, &mut out);
    }
    out
}

/// Position of `mask` in [`index_sets`]`(dim, popcount(mask))`.
pub fn index_position(dim: usize, mask: u8) -> usize {
    index_sets(dim, mask.count_ones() as usize)
        .iter()
        .position(|&m| m == mask)
        .expect("mask within dimension")
}

/// Indices contained in `mask`, increasing.
pub fn mask_indices(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `dx_I ∧ dx_J = ± dx_{I∪J}`, or `None` if the sets overlap.
pub fn wedge_sign(i_mask: u8, j_mask: u8) -> Option<f64> {
    if i_mask & j_mask != 0 {
        return None;
    }
    let mut inversions = 0;
    for i in mask_indices(i_mask) {
        for j in mask_indices(j_mask) {
            if i > j {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// How the coefficient values of two forms combine under [`DifferentialForm::wedge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Scalar multiplication: at least one side abelian.
    Plain,
    /// Lie bracket `[X, Y]`.
    Bracket,
    /// Matrix product `XY`; su(2) × su(2) lands in [`Algebra::Quaternion`].
    MatrixProduct,
    /// Algebra inner product `⟨X, Y⟩`, giving a real form.
    Inner,
}

#[derive(Debug, Clone)]
pub struct DifferentialForm {
    domain: Arc<Domain>,
    algebra: Algebra,
    degree: usize,
    /// `data[c * algebra.dim() + a]` is the field of component `c`, coefficient `a`.
    data: Vec<Vec<f64>>,
    /// Closed-form exterior derivative, used on point clouds.
    analytic_d: Option<Arc<DifferentialForm>>,
}

impl DifferentialForm {
    pub fn zeros(domain: &Arc<Domain>, algebra: Algebra, degree: usize) -> Result<Self> {
        let dim = domain.dim();
        if degree > dim {
            return Err(Error::DegreeOverflow {
                op: "zeros",
                degree,
                dim,
            });
        }
        let n = domain.num_points();
        let fields = binomial(dim, degree) * algebra.dim();
        Ok(Self {
            domain: Arc::clone(domain),
            algebra,
            degree,
            data: vec![vec![0.0; n]; fields],
            analytic_d: None,
        })
    }

    /// Build from raw fields, `fields[c * algebra.dim() + a]`.
    pub fn from_fields(
        domain: &Arc<Domain>,
        algebra: Algebra,
        degree: usize,
        fields: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = domain.dim();
        if degree > dim {
            return Err(Error::DegreeOverflow {
                op: "from_fields",
                degree,
                dim,
            });
        }
        let expected = binomial(dim, degree) * algebra.dim();
        if fields.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "expected {expected} component fields, got {}",
                fields.len()
            )));
        }
        let n = domain.num_points();
        if fields.iter().any(|f| f.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "component fields must have {n} samples"
            )));
        }
        Ok(Self {
            domain: Arc::clone(domain),
            algebra,
            degree,
            data: fields,
            analytic_d: None,
        })
    }

    /// Evaluate a form pointwise: `f(coords, out)` fills `out[c * alg_dim + a]`.
    pub fn from_fn<F>(domain: &Arc<Domain>, algebra: Algebra, degree: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let mut form = Self::zeros(domain, algebra, degree)?;
        let width = form.data.len();
        let n = domain.num_points();
        let values: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut out = vec![0.0; width];
                f(&domain.coords(p), &mut out);
                out
            })
            .collect();
        for (p, v) in values.into_iter().enumerate() {
            for (field, x) in form.data.iter_mut().zip(v) {
                field[p] = x;
            }
        }
        Ok(form)
    }

    /// Real 0-form from samples.
    pub fn scalar(domain: &Arc<Domain>, values: Vec<f64>) -> Result<Self> {
        Self::from_fields(domain, Algebra::Abelian, 0, vec![values])
    }

    /// Constant-coefficient real form `Σ coeff_I dx_I`, components in lexicographic order.
    pub fn constant(domain: &Arc<Domain>, degree: usize, coeffs: &[f64]) -> Result<Self> {
        let mut form = Self::zeros(domain, Algebra::Abelian, degree)?;
        if coeffs.len() != form.num_components() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients",
                form.num_components()
            )));
        }
        for (field, &c) in form.data.iter_mut().zip(coeffs) {
            field.iter_mut().for_each(|x| *x = c);
        }
        Ok(form)
    }

    pub fn with_analytic_derivative(mut self, d: DifferentialForm) -> Result<Self> {
        if d.degree != self.degree + 1 || d.algebra != self.algebra || !self.same_domain(&d) {
            return Err(Error::InvalidParameter(
                "analytic derivative must be a degree+1 form on the same domain and algebra".into(),
            ));
        }
        self.analytic_d = Some(Arc::new(d));
        Ok(self)
    }

    pub fn analytic_derivative(&self) -> Option<&DifferentialForm> {
        self.analytic_d.as_deref()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn num_points(&self) -> usize {
        self.domain.num_points()
    }

    pub fn num_components(&self) -> usize {
        binomial(self.dim(), self.degree)
    }

    pub fn masks(&self) -> Vec<u8> {
        index_sets(self.dim(), self.degree)
    }

    pub fn fields(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn field(&self, component: usize, coeff: usize) -> &[f64] {
        &self.data[component * self.algebra.dim() + coeff]
    }

    pub fn field_mut(&mut self, component: usize, coeff: usize) -> &mut Vec<f64> {
        self.analytic_d = None;
        let w = self.algebra.dim();
        &mut self.data[component * w + coeff]
    }

    /// Field of the component `dx_{i1} ∧ ... ` given by zero-based indices.
    pub fn field_by_indices(&self, indices: &[usize], coeff: usize) -> &[f64] {
        let mask = indices.iter().fold(0u8, |m, &i| m | (1 << i));
        self.field(index_position(self.dim(), mask), coeff)
    }

    /// Coefficient vector (length `algebra.dim()`) of component `c` at point `p`.
    pub fn value(&self, component: usize, p: usize) -> Vec<f64> {
        let w = self.algebra.dim();
        (0..w).map(|a| self.data[component * w + a][p]).collect()
    }

    pub fn same_domain(&self, other: &DifferentialForm) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain
    }

    fn check_compatible(&self, other: &DifferentialForm) -> Result<()> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(format!(
                "{} vs {}",
                self.algebra.name(),
                other.algebra.name()
            )));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                op: "linear combination",
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &DifferentialForm) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self
            .data
            .par_iter()
            .zip(&other.data)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a + s * b).collect())
            .collect();
        let analytic_d = match (&self.analytic_d, &other.analytic_d) {
            (Some(a), Some(b)) => Some(Arc::new(a.axpy(s, b)?)),
            _ => None,
        };
        Ok(Self {
            domain: Arc::clone(&self.domain),
            algebra: self.algebra,
            degree: self.degree,
            data,
            analytic_d,
        })
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            domain: Arc::clone(&self.domain),
            algebra: self.algebra,
            degree: self.degree,
            data: self
                .data
                .par_iter()
                .map(|f| f.iter().map(|x| s * x).collect())
                .collect(),
            analytic_d: self.analytic_d.as_ref().map(|d| Arc::new(d.scale(s))),
        }
    }

    /// Multiply every coefficient by a real field sampled on the same domain.
    pub fn mul_field(&self, weight: &[f64]) -> Self {
        Self {
            domain: Arc::clone(&self.domain),
            algebra: self.algebra,
            degree: self.degree,
            data: self
                .data
                .par_iter()
                .map(|f| f.iter().zip(weight).map(|(x, w)| x * w).collect())
                .collect(),
            analytic_d: None,
        }
    }

    /// Apply a closure to every sample of every field.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self {
            domain: Arc::clone(&self.domain),
            algebra: self.algebra,
            degree: self.degree,
            data: self
                .data
                .par_iter()
                .map(|x| x.iter().map(|&v| f(v)).collect())
                .collect(),
            analytic_d: None,
        }
    }

    /// Largest absolute sample over all components.
    pub fn max_abs(&self) -> f64 {
        self.data
            .par_iter()
            .map(|f| f.iter().fold(0.0f64, |m, x| m.max(x.abs())))
            .reduce(|| 0.0, f64::max)
    }

    /// Largest pointwise Euclidean norm of the full coefficient vector.
    pub fn max_pointwise_norm(&self) -> f64 {
        (0..self.num_points())
            .into_par_iter()
            .map(|p| self.data.iter().map(|f| f[p] * f[p]).sum::<f64>().sqrt())
            .reduce(|| 0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.par_iter().all(|f| f.iter().all(|x| x.is_finite()))
    }

    /// Flat coefficient vector (component-major), used by the linear solvers.
    pub fn to_vec(&self) -> Vec<f64> {
        self.data.concat()
    }

    /// Same shape as `self`, filled from a flat coefficient vector.
    pub fn with_vec(&self, flat: &[f64]) -> Self {
        let n = self.num_points();
        Self {
            domain: Arc::clone(&self.domain),
            algebra: self.algebra,
            degree: self.degree,
            data: flat.chunks(n).map(<[f64]>::to_vec).collect(),
            analytic_d: None,
        }
    }

    /// Reinterpret the coefficients in another algebra (su2 ↪ quaternion, abelian ↪ quaternion).
    pub fn lift_to(&self, target: Algebra) -> Result<Self> {
        if target == self.algebra {
            return Ok(self.clone());
        }
        let n = self.num_points();
        let w = self.algebra.dim();
        let mut out = Self::zeros(&self.domain, target, self.degree)?;
        let tw = target.dim();
        let offset = match (self.algebra, target) {
            (Algebra::Su2, Algebra::Quaternion) => 1,
            (Algebra::Abelian, Algebra::Quaternion) => 0,
            _ => {
                return Err(Error::AlgebraMismatch(format!(
                    "cannot lift {} into {}",
                    self.algebra.name(),
                    target.name()
                )))
            }
        };
        for c in 0..self.num_components() {
            for a in 0..w {
                out.data[c * tw + a + offset] = self.data[c * w + a].clone();
            }
        }
        debug_assert_eq!(out.data[0].len(), n);
        Ok(out)
    }

    /// The su(2) part of a quaternion-valued form (drops the identity part).
    pub fn su2_part(&self) -> Result<Self> {
        if self.algebra != Algebra::Quaternion {
            return Err(Error::AlgebraMismatch("su2_part needs a quaternion form".into()));
        }
        let mut out = Self::zeros(&self.domain, Algebra::Su2, self.degree)?;
        for c in 0..self.num_components() {
            for a in 0..3 {
                out.data[c * 3 + a] = self.data[c * 4 + a + 1].clone();
            }
        }
        Ok(out)
    }

    /// Pointwise trace, giving a real form (`tr` on the abelian algebra is the identity).
    pub fn trace(&self) -> Self {
        let w = self.algebra.dim();
        let data = (0..self.num_components())
            .map(|c| match self.algebra {
                Algebra::Abelian => self.data[c].clone(),
                Algebra::Su2 => vec![0.0; self.num_points()],
                Algebra::Quaternion => self.data[c * w].iter().map(|x| 2.0 * x).collect(),
            })
            .collect();
        Self {
            domain: Arc::clone(&self.domain),
            algebra: Algebra::Abelian,
            degree: self.degree,
            data,
            analytic_d: None,
        }
    }

    /// Exterior derivative. Tori use Fourier collocation per axis; point clouds
    /// return the attached closed-form derivative.
    pub fn exterior_derivative(&self) -> Result<Self> {
        let dim = self.dim();
        if self.degree >= dim {
            return Err(Error::DegreeOverflow {
                op: "exterior_derivative",
                degree: self.degree + 1,
                dim,
            });
        }
        let torus = match &*self.domain {
            Domain::Torus(t) => t,
            Domain::PointCloud(_) => {
                return self
                    .analytic_d
                    .as_deref()
                    .cloned()
                    .ok_or(Error::MissingAnalyticDerivative)
            }
        };
        let w = self.algebra.dim();
        let in_masks = self.masks();
        let out_masks = index_sets(dim, self.degree + 1);
        let mut jobs = Vec::new();
        for (ci, &mask) in in_masks.iter().enumerate() {
            for axis in 0..dim {
                if mask & (1 << axis) != 0 {
                    continue;
                }
                // dx_axis ∧ dx_I
                let sign = wedge_sign(1 << axis, mask).expect("disjoint");
                let target = out_masks
                    .iter()
                    .position(|&m| m == mask | (1 << axis))
                    .expect("target mask");
                for a in 0..w {
                    jobs.push((ci * w + a, axis, target * w + a, sign));
                }
            }
        }
        let derivs: Vec<(usize, f64, Vec<f64>)> = jobs
            .par_iter()
            .map(|&(src, axis, dst, sign)| (dst, sign, torus.derivative(&self.data[src], axis)))
            .collect();
        let mut out = Self::zeros(&self.domain, self.algebra, self.degree + 1)?;
        for (dst, sign, d) in derivs {
            out.data[dst]
                .iter_mut()
                .zip(&d)
                .for_each(|(o, v)| *o += sign * v);
        }
        Ok(out)
    }

    /// `self ∧ other` with the given coefficient pairing.
    pub fn wedge(&self, other: &DifferentialForm, pairing: Pairing) -> Result<Self> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        let dim = self.dim();
        let degree = self.degree + other.degree;
        if degree > dim {
            return Err(Error::DegreeOverflow {
                op: "wedge",
                degree,
                dim,
            });
        }
        let (la, ra) = (self.algebra, other.algebra);
        let mismatch = || {
            Error::AlgebraMismatch(format!(
                "{:?} pairing of {} with {}",
                pairing,
                la.name(),
                ra.name()
            ))
        };
        let out_alg = match pairing {
            Pairing::Plain => {
                if la == Algebra::Abelian {
                    ra
                } else if ra == Algebra::Abelian {
                    la
                } else {
                    return Err(mismatch());
                }
            }
            Pairing::Bracket => la.bracket(ra).ok_or_else(mismatch)?,
            Pairing::MatrixProduct => la.product(ra).ok_or_else(mismatch)?,
            Pairing::Inner => {
                if la != ra {
                    return Err(mismatch());
                }
                Algebra::Abelian
            }
        };
        let (lw, rw, ow) = (la.dim(), ra.dim(), out_alg.dim());
        let combine = move |x: &[f64], y: &[f64], out: &mut [f64], s: f64| match pairing {
            Pairing::Plain => {
                if lw == 1 {
                    for (o, v) in out.iter_mut().zip(y) {
                        *o += s * x[0] * v;
                    }
                } else {
                    for (o, v) in out.iter_mut().zip(x) {
                        *o += s * v * y[0];
                    }
                }
            }
            Pairing::Bracket => {
                if ow == 3 {
                    let c = algebra::cross(x, y);
                    for (o, v) in out.iter_mut().zip(c) {
                        *o += s * v;
                    }
                }
            }
            Pairing::MatrixProduct => {
                if lw == 1 || rw == 1 {
                    let (scalar, vec) = if lw == 1 { (x[0], y) } else { (y[0], x) };
                    for (o, v) in out.iter_mut().zip(vec) {
                        *o += s * scalar * v;
                    }
                } else {
                    let q = algebra::quat_mul(
                        algebra::to_quaternion(la, x),
                        algebra::to_quaternion(ra, y),
                    );
                    for (o, v) in out.iter_mut().zip(q) {
                        *o += s * v;
                    }
                }
            }
            Pairing::Inner => out[0] += s * algebra::dot(x, y),
        };

        let out_masks = index_sets(dim, degree);
        let mut terms: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); out_masks.len()];
        for (ci, &im) in self.masks().iter().enumerate() {
            for (cj, &jm) in other.masks().iter().enumerate() {
                if let Some(sign) = wedge_sign(im, jm) {
                    let k = out_masks.iter().position(|&m| m == im | jm).expect("mask");
                    terms[k].push((ci, cj, sign));
                }
            }
        }
        let n = self.num_points();
        let scalar_side = match pairing {
            Pairing::Plain | Pairing::MatrixProduct if lw == 1 => Some(true),
            Pairing::Plain | Pairing::MatrixProduct if rw == 1 => Some(false),
            _ => None,
        };
        if let Some(left_scalar) = scalar_side {
            let data: Vec<Vec<f64>> = terms
                .par_iter()
                .flat_map_iter(|list| {
                    (0..ow).map(move |c| {
                        let mut out = vec![0.0; n];
                        for &(ci, cj, sign) in list {
                            let (x, y) = if left_scalar {
                                (&self.data[ci], &other.data[cj * rw + c])
                            } else {
                                (&self.data[ci * lw + c], &other.data[cj])
                            };
                            for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
                                *o += sign * a * b;
                            }
                        }
                        out
                    })
                })
                .collect();
            return Ok(Self {
                domain: Arc::clone(&self.domain),
                algebra: out_alg,
                degree,
                data,
                analytic_d: None,
            });
        }
        let per_component: Vec<Vec<Vec<f64>>> = terms
            .par_iter()
            .map(|list| {
                let mut fields = vec![vec![0.0; n]; ow];
                let mut x = vec![0.0; lw];
                let mut y = vec![0.0; rw];
                let mut o = vec![0.0; ow];
                for p in 0..n {
                    o.iter_mut().for_each(|v| *v = 0.0);
                    for &(ci, cj, sign) in list {
                        for a in 0..lw {
                            x[a] = self.data[ci * lw + a][p];
                        }
                        for b in 0..rw {
                            y[b] = other.data[cj * rw + b][p];
                        }
                        combine(&x, &y, &mut o, sign);
                    }
                    for c in 0..ow {
                        fields[c][p] = o[c];
                    }
                }
                fields
            })
            .collect();
        Ok(Self {
            domain: Arc::clone(&self.domain),
            algebra: out_alg,
            degree,
            data: per_component.into_iter().flatten().collect(),
            analytic_d: None,
        })
    }

    /// `∫_M` of a top-degree form on a torus, one value per algebra coefficient.
    pub fn integrate_top(&self) -> Result<Vec<f64>> {
        let torus = self.domain.torus("integrate_top")?;
        if self.degree != self.dim() {
            return Err(Error::DegreeMismatch {
                op: "integrate_top",
                expected: self.dim(),
                got: self.degree,
            });
        }
        Ok(self.data.iter().map(|f| torus.integrate(f)).collect())
    }
}
