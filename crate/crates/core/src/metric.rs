//! Diagonal Riemannian metrics, the Hodge star and the L² pairing of forms.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::form::{index_sets, wedge_sign, DifferentialForm};

#[derive(Debug, Clone, PartialEq)]
enum Coefficient {
    Constant(f64),
    Field(Vec<f64>),
}

impl Coefficient {
    #[inline]
    fn at(&self, p: usize) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f[p],
        }
    }
}

/// Sampled `√det g · ∏_{i∈I} g^{ii}` for one component mask.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant(f64),
    Field(Arc<Vec<f64>>),
}

impl Weight {
    #[inline]
    pub fn at(&self, p: usize) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Field(f) => f[p],
        }
    }
}

/// A diagonal metric `Σ g_i(x) dx_i²`.
#[derive(Debug, Clone)]
pub struct Metric {
    domain: Arc<Domain>,
    diag: Vec<Coefficient>,
    weights: Arc<Vec<OnceLock<Weight>>>,
}

impl PartialEq for Metric {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.diag == other.diag
    }
}

fn empty_cache(dim: usize) -> Arc<Vec<OnceLock<Weight>>> {
    Arc::new((0..1usize << dim).map(|_| OnceLock::new()).collect())
}

/// The conformal factor `f` of the T⁴ example metric `dx₁² + dx₂² + dx₃²/f + f dx₄²`.
pub fn t4_example_factor(x2: f64, x3: f64) -> f64 {
    let s = (2.0 * x2).sin() * x3.cos();
    (3.0 + 2.0 * s) / (1.0 - 0.5 * s)
}

impl Metric {
    pub fn flat(domain: &Arc<Domain>) -> Self {
        Self {
            domain: Arc::clone(domain),
            diag: vec![Coefficient::Constant(1.0); domain.dim()],
            weights: empty_cache(domain.dim()),
        }
    }

    /// Metric with sampled diagonal coefficients, one field per axis.
    pub fn diagonal(domain: &Arc<Domain>, fields: Vec<Vec<f64>>) -> Result<Self> {
        if fields.len() != domain.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} diagonal fields, got {}",
                domain.dim(),
                fields.len()
            )));
        }
        for (axis, f) in fields.iter().enumerate() {
            if f.len() != domain.num_points() {
                return Err(Error::InvalidParameter(
                    "metric field length differs from the number of samples".into(),
                ));
            }
            if let Some((point, &value)) = f
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::NonPositiveMetric { axis, point, value });
            }
        }
        Ok(Self {
            domain: Arc::clone(domain),
            diag: fields.into_iter().map(Coefficient::Field).collect(),
            weights: empty_cache(domain.dim()),
        })
    }

    /// `dx₁² + dx₂² + dx₃²/f + f dx₄²` with `f = (3 + 2 sin2x₂ cos x₃)/(1 − ½ sin2x₂ cos x₃)`.
    pub fn t4_example(domain: &Arc<Domain>) -> Result<Self> {
        if domain.dim() != 4 {
            return Err(Error::InvalidParameter(
                "the T4 example metric needs a 4-dimensional domain".into(),
            ));
        }
        let n = domain.num_points();
        let f: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|p| {
                let x = domain.coords(p);
                t4_example_factor(x[1], x[2])
            })
            .collect();
        let inv: Vec<f64> = f.iter().map(|v| 1.0 / v).collect();
        Self::diagonal(domain, vec![vec![1.0; n], vec![1.0; n], inv, f])
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn is_flat(&self) -> bool {
        self.diag.iter().all(|c| *c == Coefficient::Constant(1.0))
    }

    /// `g_ii` at sample `p`.
    #[inline]
    pub fn g(&self, axis: usize, p: usize) -> f64 {
        self.diag[axis].at(p)
    }

    #[inline]
    pub fn sqrt_det(&self, p: usize) -> f64 {
        (0..self.diag.len())
            .map(|i| self.g(i, p))
            .product::<f64>()
            .sqrt()
    }

    /// `√det g · ∏_{i∈I} g^{ii}`, the weight of `|dx_I|²` in the volume integral.
    #[inline]
    pub fn component_weight(&self, mask: u8, p: usize) -> f64 {
        let mut w = self.sqrt_det(p);
        for i in 0..self.diag.len() {
            if mask & (1 << i) != 0 {
                w /= self.g(i, p);
            }
        }
        w
    }

    /// [`Metric::component_weight`] at every sample, computed once per mask.
    pub fn weight(&self, mask: u8) -> Weight {
        self.weights[mask as usize]
            .get_or_init(|| {
                if self.diag.iter().all(|c| matches!(c, Coefficient::Constant(_))) {
                    return Weight::Constant(self.component_weight(mask, 0));
                }
                let n = self.domain.num_points();
                Weight::Field(Arc::new(
                    (0..n)
                        .into_par_iter()
                        .map(|p| self.component_weight(mask, p))
                        .collect(),
                ))
            })
            .clone()
    }

    /// Largest `|g_{2i−1} g_{2i} − 1|`: zero iff the metric is compatible with the
    /// Darboux form under the standard complex structure.
    pub fn compatibility_defect(&self) -> f64 {
        let n = self.domain.num_points();
        (0..n)
            .into_par_iter()
            .map(|p| {
                (0..self.diag.len() / 2)
                    .map(|i| (self.g(2 * i, p) * self.g(2 * i + 1, p) - 1.0).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    fn check(&self, eta: &DifferentialForm) -> Result<()> {
        if Arc::ptr_eq(&self.domain, eta.domain()) || *self.domain == **eta.domain() {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// Hodge star, applied pointwise.
    pub fn hodge_star(&self, eta: &DifferentialForm) -> Result<DifferentialForm> {
        self.check(eta)?;
        let dim = eta.dim();
        let k = eta.degree();
        let w = eta.algebra().dim();
        let full: u8 = ((1u16 << dim) - 1) as u8;
        let out_masks = index_sets(dim, dim - k);
        let n = eta.num_points();
        let mut fields = vec![Vec::new(); out_masks.len() * w];
        let jobs: Vec<(usize, usize, Vec<f64>)> = eta
            .masks()
            .par_iter()
            .enumerate()
            .flat_map_iter(|(c, &mask)| {
                let comp = full & !mask;
                let sign = wedge_sign(mask, comp).expect("complement is disjoint");
                let target = out_masks.iter().position(|&m| m == comp).expect("mask");
                let cw = self.weight(mask);
                let weight: Vec<f64> = (0..n).map(|p| sign * cw.at(p)).collect();
                (0..w)
                    .map(|a| {
                        let src = eta.field(c, a);
                        let v = src.iter().zip(&weight).map(|(x, s)| x * s).collect();
                        (target, a, v)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        for (target, a, v) in jobs {
            fields[target * w + a] = v;
        }
        DifferentialForm::from_fields(eta.domain(), eta.algebra(), dim - k, fields)
    }

    /// Pointwise `⟨α, β⟩_g(x)` without the volume density.
    pub fn pointwise_inner(
        &self,
        alpha: &DifferentialForm,
        beta: &DifferentialForm,
    ) -> Result<Vec<f64>> {
        self.check(alpha)?;
        Self::check_pair(alpha, beta)?;
        let w = alpha.algebra().dim();
        let n = alpha.num_points();
        let sd = self.weight(0);
        let mut out = vec![0.0; n];
        for (c, m) in alpha.masks().into_iter().enumerate() {
            let cw = self.weight(m);
            for a in 0..w {
                let (x, y) = (alpha.field(c, a), beta.field(c, a));
                for p in 0..n {
                    out[p] += cw.at(p) / sd.at(p) * x[p] * y[p];
                }
            }
        }
        Ok(out)
    }

    fn check_pair(alpha: &DifferentialForm, beta: &DifferentialForm) -> Result<()> {
        if !alpha.same_domain(beta) {
            return Err(Error::DomainMismatch);
        }
        if alpha.degree() != beta.degree() {
            return Err(Error::DegreeMismatch {
                op: "inner_product",
                expected: alpha.degree(),
                got: beta.degree(),
            });
        }
        if alpha.algebra() != beta.algebra() {
            return Err(Error::AlgebraMismatch(format!(
                "{} vs {}",
                alpha.algebra().name(),
                beta.algebra().name()
            )));
        }
        Ok(())
    }

    /// `⟨α, β⟩ = ∫ ⟨α, β⟩_g √det g dx` by grid quadrature.
    pub fn inner_product(&self, alpha: &DifferentialForm, beta: &DifferentialForm) -> Result<f64> {
        self.check(alpha)?;
        Self::check_pair(alpha, beta)?;
        let torus = self.domain.torus("inner_product")?;
        let w = alpha.algebra().dim();
        let n = alpha.num_points();
        let masks = alpha.masks();
        let total: f64 = masks
            .par_iter()
            .enumerate()
            .map(|(c, &m)| {
                let cw = self.weight(m);
                (0..w)
                    .map(|a| {
                        let (x, y) = (alpha.field(c, a), beta.field(c, a));
                        (0..n).map(|p| cw.at(p) * x[p] * y[p]).sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .sum();
        Ok(total * torus.cell_volume())
    }

    /// Quadrature weights matching [`DifferentialForm::to_vec`], so that
    /// `⟨α, β⟩ = Σ w·α·β` over the flat coefficient vectors.
    pub fn quadrature_weights(&self, eta: &DifferentialForm) -> Result<Vec<f64>> {
        self.check(eta)?;
        let vol = self.domain.torus("quadrature_weights")?.cell_volume();
        let n = eta.num_points();
        let mut out = Vec::with_capacity(n * eta.num_components() * eta.algebra().dim());
        for m in eta.masks() {
            let cw = self.weight(m);
            let w: Vec<f64> = (0..n).map(|p| cw.at(p) * vol).collect();
            for _ in 0..eta.algebra().dim() {
                out.extend_from_slice(&w);
            }
        }
        Ok(out)
    }

    pub fn norm_sq(&self, eta: &DifferentialForm) -> Result<f64> {
        self.inner_product(eta, eta)
    }

    /// `d* = −*d*` (even dimensions).
    pub fn codifferential(&self, eta: &DifferentialForm) -> Result<DifferentialForm> {
        if eta.degree() == 0 {
            return Err(Error::UnsupportedDegree {
                op: "codifferential",
                degree: 0,
                dim: eta.dim(),
            });
        }
        let s = self.hodge_star(eta)?;
        let ds = s.exterior_derivative()?;
        Ok(self.hodge_star(&ds)?.scale(-1.0))
    }
}
