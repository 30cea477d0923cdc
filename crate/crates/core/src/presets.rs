//! Named connections used throughout the tests, the verification suites and the CLI.
//!
//! | name | algebra | base |
//! |------|---------|------|
//! | `t4_yang_mills_example` | abelian | T⁴, example metric |
//! | `bpst` | su2 | point cloud in ℝ⁴ |
//! | `flat_wilson(c1,..,cd)` | abelian | torus |
//! | `constant_flux(c)` | abelian | torus |
//! | `random_su2(seed, amplitude)` | su2 | torus |
//! | `random_abelian(seed, amplitude)` | abelian | torus |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::domain::{Domain, PointCloudDomain, TorusDomain};
use crate::error::{Error, Result};
use crate::form::DifferentialForm;
use crate::gauge::Connection;
use crate::metric::Metric;
use crate::symplectic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Preset {
    T4YangMillsExample,
    Bpst,
    FlatWilson(Vec<f64>),
    ConstantFlux(f64),
    RandomSu2 { seed: u64, amplitude: f64 },
    RandomAbelian { seed: u64, amplitude: f64 },
}

impl Preset {
    pub const NAMES: [&'static str; 6] = [
        "t4_yang_mills_example",
        "bpst",
        "flat_wilson",
        "constant_flux",
        "random_su2",
        "random_abelian",
    ];

    pub fn algebra(&self) -> Algebra {
        match self {
            Preset::Bpst | Preset::RandomSu2 { .. } => Algebra::Su2,
            _ => Algebra::Abelian,
        }
    }

    pub fn is_point_cloud(&self) -> bool {
        matches!(self, Preset::Bpst)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::T4YangMillsExample => write!(f, "t4_yang_mills_example"),
            Preset::Bpst => write!(f, "bpst"),
            Preset::FlatWilson(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "flat_wilson({})", parts.join(","))
            }
            Preset::ConstantFlux(c) => write!(f, "constant_flux({c})"),
            Preset::RandomSu2 { seed, amplitude } => write!(f, "random_su2({seed},{amplitude})"),
            Preset::RandomAbelian { seed, amplitude } => {
                write!(f, "random_abelian({seed},{amplitude})")
            }
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Parse `name` or `name(arg, ...)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s
                    .rfind(')')
                    .filter(|&c| c == s.len() - 1 && c > open)
                    .ok_or_else(|| Error::UnknownPreset(s.to_string()))?;
                let inner = &s[open + 1..close];
                let args: Vec<&str> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(str::trim).collect()
                };
                (s[..open].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let num = |a: &str| -> Result<f64> {
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("bad preset argument {a:?}")))
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "preset {name} takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        let seeded = || -> Result<(u64, f64)> {
            arity(2)?;
            let seed = args[0]
                .parse::<u64>()
                .map_err(|_| Error::InvalidParameter(format!("bad seed {:?}", args[0])))?;
            Ok((seed, num(args[1])?))
        };
        match name {
            "t4_yang_mills_example" => arity(0).map(|_| Preset::T4YangMillsExample),
            "bpst" => arity(0).map(|_| Preset::Bpst),
            "flat_wilson" => {
                if args.len() != 2 && args.len() != 4 {
                    return Err(Error::InvalidParameter(
                        "flat_wilson takes 2 or 4 arguments".into(),
                    ));
                }
                Ok(Preset::FlatWilson(
                    args.iter().map(|a| num(a)).collect::<Result<_>>()?,
                ))
            }
            "constant_flux" => {
                arity(1)?;
                Ok(Preset::ConstantFlux(num(args[0])?))
            }
            "random_su2" => seeded().map(|(seed, amplitude)| Preset::RandomSu2 { seed, amplitude }),
            "random_abelian" => {
                seeded().map(|(seed, amplitude)| Preset::RandomAbelian { seed, amplitude })
            }
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl TryFrom<String> for Preset {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Preset> for String {
    fn from(p: Preset) -> String {
        p.to_string()
    }
}

/// A built preset: connection, metric and, when known in closed form, the
/// expected Higgs field `Φ = ΛF/n`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub preset: Preset,
    pub connection: Connection,
    pub metric: Metric,
    /// `Φ` for symplectically flat presets; `None` otherwise.
    pub flat_phi: Option<DifferentialForm>,
}

impl Instance {
    pub fn domain(&self) -> &Arc<Domain> {
        self.connection.domain()
    }
}

/// Sampling parameters for presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub dim: usize,
    pub resolution: usize,
    /// Number of sample points for point-cloud presets.
    pub points: usize,
    /// Seed for point-cloud sampling.
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            dim: 4,
            resolution: 16,
            points: 1000,
            seed: 7,
        }
    }
}

pub fn build(preset: &Preset, sampling: Sampling) -> Result<Instance> {
    match preset {
        Preset::T4YangMillsExample => t4_yang_mills_example(sampling.resolution),
        Preset::Bpst => {
            let cloud = PointCloudDomain::random(sampling.points, 2.0, sampling.seed)?;
            bpst(&Arc::new(cloud.into()))
        }
        Preset::FlatWilson(c) => {
            let dom = torus(c.len(), sampling.resolution)?;
            flat_wilson(&dom, c)
        }
        Preset::ConstantFlux(c) => constant_flux(&torus(sampling.dim, sampling.resolution)?, *c),
        Preset::RandomSu2 { seed, amplitude } => {
            let dom = torus(sampling.dim, sampling.resolution)?;
            random_connection(&dom, Algebra::Su2, *seed, *amplitude)
        }
        Preset::RandomAbelian { seed, amplitude } => {
            let dom = torus(sampling.dim, sampling.resolution)?;
            random_connection(&dom, Algebra::Abelian, *seed, *amplitude)
        }
    }
}

pub fn torus(dim: usize, resolution: usize) -> Result<Arc<Domain>> {
    Ok(Arc::new(TorusDomain::cubic(dim, resolution)?.into()))
}

/// Abelian Yang-Mills connection on T⁴ that is not primitive Yang-Mills.
///
/// The circle bundle is represented by the constant flux `β = (1/2π) dx₁∧dx₃`
/// and the global part is `a = (1/4π) sin2x₂ sin x₃ dx₁`, so that
/// `F = −(1/2π)cos2x₂ sin x₃ dx₁dx₂ + (1/2π)(1 − ½ sin2x₂ cos x₃) dx₁dx₃`.
pub fn t4_yang_mills_example(resolution: usize) -> Result<Instance> {
    let dom = torus(4, resolution)?;
    let a = DifferentialForm::from_fn(&dom, Algebra::Abelian, 1, |x, out| {
        out[0] = (2.0 * x[1]).sin() * x[2].sin() / (4.0 * PI);
    })?;
    let beta = DifferentialForm::constant(&dom, 2, &[0.0, 1.0 / (2.0 * PI), 0.0, 0.0, 0.0, 0.0])?;
    Ok(Instance {
        preset: Preset::T4YangMillsExample,
        connection: Connection::new(a)?.with_flux(beta)?,
        metric: Metric::t4_example(&dom)?,
        flat_phi: None,
    })
}

/// The curvature of [`t4_yang_mills_example`] in closed form.
pub fn t4_example_curvature(domain: &Arc<Domain>) -> Result<DifferentialForm> {
    DifferentialForm::from_fn(domain, Algebra::Abelian, 2, |x, out| {
        let s = (2.0 * x[1]).sin() * x[2].cos();
        out[0] = -(2.0 * x[1]).cos() * x[2].sin() / (2.0 * PI);
        out[1] = (1.0 - 0.5 * s) / (2.0 * PI);
    })
}

/// `Φ = −(1/4π) cos2x₂ sin x₃`.
pub fn t4_example_phi(x: &[f64]) -> f64 {
    -(2.0 * x[1]).cos() * x[2].sin() / (4.0 * PI)
}

/// Constant abelian connection `Σ c_i dx_i`: flat, with Wilson lines `exp(2πi c_i)`.
pub fn flat_wilson(domain: &Arc<Domain>, c: &[f64]) -> Result<Instance> {
    if c.len() != domain.dim() {
        return Err(Error::InvalidParameter(format!(
            "flat_wilson needs {} coefficients",
            domain.dim()
        )));
    }
    let a = DifferentialForm::constant(domain, 1, c)?;
    Ok(Instance {
        preset: Preset::FlatWilson(c.to_vec()),
        connection: Connection::new(a)?,
        metric: Metric::flat(domain),
        flat_phi: Some(DifferentialForm::zeros(domain, Algebra::Abelian, 0)?),
    })
}

/// Abelian connection with `a = 0` and background flux `β = cω`, so `F = cω`.
pub fn constant_flux(domain: &Arc<Domain>, c: f64) -> Result<Instance> {
    let beta = symplectic::omega(domain)?.scale(c);
    let beta = DifferentialForm::from_fields(domain, Algebra::Abelian, 2, beta.fields().to_vec())?;
    Ok(Instance {
        preset: Preset::ConstantFlux(c),
        connection: Connection::trivial(domain, Algebra::Abelian)?.with_flux(beta)?,
        metric: Metric::flat(domain),
        flat_phi: Some(DifferentialForm::constant(domain, 0, &[c])?),
    })
}

/// A random band-limited 1-form: every coefficient is a combination of
/// `cos(k·x)`, `sin(k·x)` over `k ∈ {−1,0,1}^d` with uniform random weights,
/// scaled so the weights sum in magnitude to at most `amplitude`.
pub fn random_one_form(
    domain: &Arc<Domain>,
    algebra: Algebra,
    seed: u64,
    amplitude: f64,
) -> Result<DifferentialForm> {
    random_form(domain, algebra, 1, seed, amplitude)
}

/// As [`random_one_form`], for any degree.
pub fn random_form(
    domain: &Arc<Domain>,
    algebra: Algebra,
    degree: usize,
    seed: u64,
    amplitude: f64,
) -> Result<DifferentialForm> {
    let dim = domain.dim();
    let modes: Vec<Vec<f64>> = (0..3usize.pow(dim as u32))
        .map(|mut m| {
            (0..dim)
                .map(|_| {
                    let k = (m % 3) as f64 - 1.0;
                    m /= 3;
                    k
                })
                .collect()
        })
        .collect();
    let width = crate::form::binomial(dim, degree) * algebra.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = amplitude / (2.0 * modes.len() as f64);
    let weights: Vec<Vec<(f64, f64)>> = (0..width)
        .map(|_| {
            modes
                .iter()
                .map(|_| (norm * rng.gen_range(-1.0..1.0), norm * rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    DifferentialForm::from_fn(domain, algebra, degree, |x, out| {
        let trig: Vec<(f64, f64)> = modes
            .iter()
            .map(|k| {
                let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
                (phase.cos(), phase.sin())
            })
            .collect();
        for (o, w) in out.iter_mut().zip(&weights) {
            *o = trig
                .iter()
                .zip(w)
                .map(|((cos, sin), (c, s))| c * cos + s * sin)
                .sum();
        }
    })
}

/// A random band-limited 0-form, as [`random_form`].
pub fn random_zero_form(
    domain: &Arc<Domain>,
    algebra: Algebra,
    seed: u64,
    amplitude: f64,
) -> Result<DifferentialForm> {
    random_form(domain, algebra, 0, seed, amplitude)
}

/// Preset instance holding a [`random_one_form`] potential and the flat metric.
pub fn random_connection(
    domain: &Arc<Domain>,
    algebra: Algebra,
    seed: u64,
    amplitude: f64,
) -> Result<Instance> {
    let preset = match algebra {
        Algebra::Su2 => Preset::RandomSu2 { seed, amplitude },
        _ => Preset::RandomAbelian { seed, amplitude },
    };
    Ok(Instance {
        preset,
        connection: Connection::new(random_one_form(domain, algebra, seed, amplitude)?)?,
        metric: Metric::flat(domain),
        flat_phi: None,
    })
}

/// 't Hooft symbol `η^a_{μν}` (zero-based indices), self-dual in `(μ, ν)`.
pub fn thooft_eta(a: usize, mu: usize, nu: usize) -> f64 {
    let eps = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    match (mu, nu) {
        (3, 3) => 0.0,
        (m, 3) => {
            if m == a {
                1.0
            } else {
                0.0
            }
        }
        (3, n) => {
            if n == a {
                -1.0
            } else {
                0.0
            }
        }
        (m, n) => eps(a, m, n),
    }
}

/// BPST potential `A_μ = 2 η^a_{μν} x^ν / (|x|² + 1) T_a`.
pub fn bpst_potential(x: &[f64], out: &mut [f64]) {
    let den = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    for mu in 0..4 {
        for a in 0..3 {
            out[mu * 3 + a] = (0..4)
                .map(|nu| 2.0 * thooft_eta(a, mu, nu) * x[nu])
                .sum::<f64>()
                / den;
        }
    }
}

/// `dA` of [`bpst_potential`], components `μ < ν` in lexicographic order.
pub fn bpst_potential_derivative(x: &[f64], out: &mut [f64]) {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let den = 1.0 + r2;
    // ∂_μ A_ν^a = 2η^a_{νμ}/den − 4 η^a_{νλ} x^λ x_μ / den²
    let partial = |mu: usize, nu: usize, a: usize| -> f64 {
        let lin: f64 = (0..4).map(|l| thooft_eta(a, nu, l) * x[l]).sum();
        2.0 * thooft_eta(a, nu, mu) / den - 4.0 * lin * x[mu] / (den * den)
    };
    let mut c = 0;
    for mu in 0..4 {
        for nu in mu + 1..4 {
            for a in 0..3 {
                out[c * 3 + a] = partial(mu, nu, a) - partial(nu, mu, a);
            }
            c += 1;
        }
    }
}

/// Closed-form BPST curvature
/// `4/(|x|²+1)² [−T₁(dx¹⁴+dx²³) + T₂(dx¹³−dx²⁴) − T₃(dx¹²+dx³⁴)]`.
pub fn bpst_curvature(x: &[f64], out: &mut [f64]) {
    let den = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    let s = 4.0 / (den * den);
    out.iter_mut().for_each(|v| *v = 0.0);
    // components: 12, 13, 14, 23, 24, 34
    out[2] = -s; // 12, T3
    out[3 + 1] = s; // 13, T2
    out[2 * 3] = -s; // 14, T1
    out[3 * 3] = -s; // 23, T1
    out[4 * 3 + 1] = -s; // 24, T2
    out[5 * 3 + 2] = -s; // 34, T3
}

/// `Φ = −4/(|x|²+1)² T₃`.
pub fn bpst_phi(x: &[f64], out: &mut [f64]) {
    let den = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = -4.0 / (den * den);
}

/// `dΦ = 16 x_μ/(|x|²+1)³ T₃ dx^μ`.
pub fn bpst_phi_derivative(x: &[f64], out: &mut [f64]) {
    let den = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    for mu in 0..4 {
        out[mu * 3] = 0.0;
        out[mu * 3 + 1] = 0.0;
        out[mu * 3 + 2] = 16.0 * x[mu] / den.powi(3);
    }
}

/// The BPST instanton sampled on a point cloud, with closed-form derivative tables.
pub fn bpst(domain: &Arc<Domain>) -> Result<Instance> {
    if !matches!(**domain, Domain::PointCloud(_)) {
        return Err(Error::InvalidDomain("the bpst preset lives on a point cloud".into()));
    }
    let da = DifferentialForm::from_fn(domain, Algebra::Su2, 2, bpst_potential_derivative)?;
    let a = DifferentialForm::from_fn(domain, Algebra::Su2, 1, bpst_potential)?
        .with_analytic_derivative(da)?;
    Ok(Instance {
        preset: Preset::Bpst,
        connection: Connection::new(a)?,
        metric: Metric::flat(domain),
        flat_phi: None,
    })
}

/// BPST `Φ` on the preset's point cloud, carrying its closed-form derivative.
pub fn bpst_phi_form(domain: &Arc<Domain>) -> Result<DifferentialForm> {
    let dphi = DifferentialForm::from_fn(domain, Algebra::Su2, 1, bpst_phi_derivative)?;
    DifferentialForm::from_fn(domain, Algebra::Su2, 0, bpst_phi)?.with_analytic_derivative(dphi)
}
