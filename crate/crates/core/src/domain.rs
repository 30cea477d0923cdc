//! Base manifolds: flat periodic grids and point clouds in ℝ⁴.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

type Plan = Arc<dyn Fft<f64>>;

/// A flat torus `∏ ℝ/L_i ℤ` sampled on a uniform grid.
///
/// Points are stored in row-major order, the last axis varying fastest.
#[derive(Clone)]
pub struct TorusDomain {
    resolution: Vec<usize>,
    periods: Vec<f64>,
    plans: Vec<(Plan, Plan)>,
}

impl fmt::Debug for TorusDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusDomain")
            .field("resolution", &self.resolution)
            .field("periods", &self.periods)
            .finish()
    }
}

impl PartialEq for TorusDomain {
    fn eq(&self, other: &Self) -> bool {
        self.resolution == other.resolution && self.periods == other.periods
    }
}

impl TorusDomain {
    pub const MIN_RESOLUTION: usize = 8;

    pub fn new(resolution: Vec<usize>, periods: Vec<f64>) -> Result<Self> {
        let dim = resolution.len();
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidDomain(format!(
                "torus dimension must be 2 or 4, got {dim}"
            )));
        }
        if periods.len() != dim {
            return Err(Error::InvalidDomain(format!(
                "{} periods given for a {dim}-torus",
                periods.len()
            )));
        }
        for &n in &resolution {
            if n < Self::MIN_RESOLUTION || !n.is_power_of_two() {
                return Err(Error::InvalidDomain(format!(
                    "resolution {n} must be a power of two and at least {}",
                    Self::MIN_RESOLUTION
                )));
            }
        }
        for &l in &periods {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidDomain(format!("period {l} must be positive")));
            }
        }
        let mut planner = FftPlanner::new();
        let plans = resolution
            .iter()
            .map(|&n| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .collect();
        Ok(Self {
            resolution,
            periods,
            plans,
        })
    }

    /// `dim`-torus with `n` samples per axis and period 2π.
    pub fn cubic(dim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; dim], vec![std::f64::consts::TAU; dim])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn num_points(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.resolution[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.spacing(i)).product()
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Distance between consecutive samples along `axis` in the flat index.
    pub fn stride(&self, axis: usize) -> usize {
        self.resolution[axis + 1..].iter().product()
    }

    /// Grid multi-index of a flat point index.
    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = p % self.resolution[axis];
            p /= self.resolution[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.resolution)
            .fold(0, |acc, (&i, &n)| acc * n + (i % n))
    }

    /// Coordinates of a flat point index.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        self.multi_index(p)
            .iter()
            .enumerate()
            .map(|(axis, &i)| i as f64 * self.spacing(axis))
            .collect()
    }

    /// Sample a scalar function at every grid point.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        (0..self.num_points())
            .into_par_iter()
            .map(|p| f(&self.coords(p)))
            .collect()
    }

    /// Angular wavenumber of FFT bin `m` along `axis`; the Nyquist bin maps to zero
    /// so the derivative matrix stays real and skew-symmetric.
    pub fn wavenumber(&self, axis: usize, m: usize) -> f64 {
        let n = self.resolution[axis];
        let scale = std::f64::consts::TAU / self.periods[axis];
        let signed = if m < n / 2 {
            m as f64
        } else if m == n / 2 {
            0.0
        } else {
            m as f64 - n as f64
        };
        signed * scale
    }

    /// Wavenumber including the Nyquist bin (as `-n/2`), used by spectral filters.
    pub fn wavenumber_full(&self, axis: usize, m: usize) -> f64 {
        let n = self.resolution[axis];
        let scale = std::f64::consts::TAU / self.periods[axis];
        let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        signed * scale
    }

    /// Apply a per-mode multiplier along one axis: `out = F⁻¹[mult(k) F[u]]`.
    fn apply_axis_multiplier<M>(&self, u: &[f64], axis: usize, mult: M) -> Vec<f64>
    where
        M: Fn(usize) -> Complex64 + Sync,
    {
        let n = self.resolution[axis];
        let inner = self.stride(axis);
        let block = n * inner;
        let (fwd, inv) = &self.plans[axis];
        let norm = 1.0 / n as f64;
        let factors: Vec<Complex64> = (0..n).map(|m| mult(m) * norm).collect();
        let mut out = vec![0.0; u.len()];

        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        // Each block holds `inner` interleaved lines; gather them line-major so a
        // single batched transform covers the whole block.
        out.par_chunks_mut(block)
            .zip(u.par_chunks(block))
            .for_each_init(
                || {
                    (
                        vec![Complex64::new(0.0, 0.0); block],
                        vec![Complex64::new(0.0, 0.0); scratch_len],
                    )
                },
                |(buf, scratch), (dst, src)| {
                    for j in 0..inner {
                        for m in 0..n {
                            buf[j * n + m] = Complex64::new(src[j + m * inner], 0.0);
                        }
                    }
                    fwd.process_with_scratch(buf, scratch);
                    for line in buf.chunks_mut(n) {
                        for (b, f) in line.iter_mut().zip(&factors) {
                            *b *= f;
                        }
                    }
                    inv.process_with_scratch(buf, scratch);
                    for j in 0..inner {
                        for m in 0..n {
                            dst[j + m * inner] = buf[j * n + m].re;
                        }
                    }
                },
            );
        out
    }

    /// Spectral (Fourier collocation) partial derivative along `axis`.
    pub fn derivative(&self, u: &[f64], axis: usize) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.num_points());
        self.apply_axis_multiplier(u, axis, |m| Complex64::new(0.0, self.wavenumber(axis, m)))
    }

    /// Fourier-space multiplier applied over all axes jointly: `F⁻¹[mult(k) F[u]]`.
    pub fn apply_multiplier<M>(&self, u: &[f64], mult: M) -> Vec<f64>
    where
        M: Fn(&[f64]) -> f64 + Sync,
    {
        let dim = self.dim();
        let n_total = self.num_points();
        let (fwd_plans, inv_plans): (Vec<_>, Vec<_>) = self.plans.iter().cloned().unzip();
        let mut data: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for axis in 0..dim {
            self.transform_axis_complex(&mut data, axis, &fwd_plans[axis]);
        }
        data.par_iter_mut().enumerate().for_each(|(p, z)| {
            let idx = self.multi_index(p);
            let k: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(axis, &m)| self.wavenumber_full(axis, m))
                .collect();
            *z *= mult(&k) / n_total as f64;
        });
        for axis in 0..dim {
            self.transform_axis_complex(&mut data, axis, &inv_plans[axis]);
        }
        data.into_iter().map(|z| z.re).collect()
    }

    /// Fourier coefficients `c_m` with `u(x) = Σ_m c_m exp(i k_m·x)`, row-major in the
    /// mode multi-index; wavenumbers follow [`TorusDomain::wavenumber_full`].
    pub fn spectrum(&self, u: &[f64]) -> Vec<Complex64> {
        let n_total = self.num_points() as f64;
        let mut data: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x / n_total, 0.0)).collect();
        for axis in 0..self.dim() {
            let plan = Arc::clone(&self.plans[axis].0);
            self.transform_axis_complex(&mut data, axis, &plan);
        }
        data
    }

    fn transform_axis_complex(&self, data: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let n = self.resolution[axis];
        let inner = self.stride(axis);
        let block = n * inner;
        let scratch_len = plan.get_inplace_scratch_len();
        data.par_chunks_mut(block).for_each_init(
            || {
                (
                    vec![Complex64::new(0.0, 0.0); n],
                    vec![Complex64::new(0.0, 0.0); scratch_len],
                )
            },
            |(buf, scratch), chunk| {
                for j in 0..inner {
                    for m in 0..n {
                        buf[m] = chunk[j + m * inner];
                    }
                    plan.process_with_scratch(buf, scratch);
                    for m in 0..n {
                        chunk[j + m * inner] = buf[m];
                    }
                }
            },
        );
    }

    /// Grid quadrature `Σ u · cell volume` (spectrally accurate for periodic data).
    pub fn integrate(&self, u: &[f64]) -> f64 {
        u.par_iter().sum::<f64>() * self.cell_volume()
    }
}

/// A finite set of points in ℝ⁴ on which fields are evaluated in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudDomain {
    points: Vec<[f64; 4]>,
}

impl PointCloudDomain {
    pub fn new(points: Vec<[f64; 4]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDomain("point cloud is empty".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDomain("point cloud has repeated points".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDomain("point cloud has non-finite coordinates".into()));
        }
        Ok(Self { points })
    }

    /// `count` points drawn uniformly from the cube `[-radius, radius]⁴`.
    pub fn random(count: usize, radius: f64, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-radius..radius)))
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }
}

/// The base manifold a form is sampled on.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Torus(TorusDomain),
    PointCloud(PointCloudDomain),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Torus(t) => t.dim(),
            Domain::PointCloud(_) => 4,
        }
    }

    pub fn num_points(&self) -> usize {
        match self {
            Domain::Torus(t) => t.num_points(),
            Domain::PointCloud(c) => c.num_points(),
        }
    }

    pub fn as_torus(&self) -> Option<&TorusDomain> {
        match self {
            Domain::Torus(t) => Some(t),
            Domain::PointCloud(_) => None,
        }
    }

    pub fn torus(&self, op: &'static str) -> Result<&TorusDomain> {
        self.as_torus().ok_or(Error::RequiresTorus { op })
    }

    /// Coordinates of sample `p`.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        match self {
            Domain::Torus(t) => t.coords(p),
            Domain::PointCloud(c) => c.points()[p].to_vec(),
        }
    }
}

impl From<TorusDomain> for Domain {
    fn from(t: TorusDomain) -> Self {
        Domain::Torus(t)
    }
}

impl From<PointCloudDomain> for Domain {
    fn from(c: PointCloudDomain) -> Self {
        Domain::PointCloud(c)
    }
}
