//! Exact classification data for ζ-flat bundles: the period group `H`, its
//! three cases, and the `U(1)` morphism families over `T⁴` for
//! `ζ = c₁dx₁∧dx₂ + c₂dx₃∧dx₄`.
//!
//! Irrationality is declared by the caller through tags; it is never decided
//! from floating-point values.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A generator of the period group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Period {
    Rational(BigRational),
    /// A period declared incommensurable with every other generator.
    Irrational { label: String, witness: String },
}

impl Period {
    fn is_zero(&self) -> bool {
        matches!(self, Period::Rational(r) if r.is_zero())
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Rational(r) => write!(f, "{r}"),
            Period::Irrational { label, .. } => f.write_str(label),
        }
    }
}

/// Generators of `H = {∫_D ζ}` and whether `H⁺` is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodGroupSpec {
    pub generators: Vec<Period>,
    pub h_plus_nonempty: bool,
}

impl PeriodGroupSpec {
    /// Spec with the `H⁺` flag derived from the generators.
    pub fn new(generators: Vec<Period>) -> Self {
        let h_plus_nonempty = generators.iter().any(|g| !g.is_zero());
        Self {
            generators,
            h_plus_nonempty,
        }
    }
}

/// Minimal positive element of `H`, exact or symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodValue {
    Rational(BigRational),
    Symbolic(String),
}

impl fmt::Display for PeriodValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodValue::Rational(r) => write!(f, "{r}"),
            PeriodValue::Symbolic(s) => write!(f, "|{s}|"),
        }
    }
}

impl Serialize for PeriodValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Case {
    /// `H = 0`: `Γ` is an `ℝ`-extension of `π₁(M)`.
    RExtension,
    /// `H = c₀ℤ`: `Γ` is an `S¹`-extension.
    S1Extension { c0: PeriodValue },
    /// `H⁺` has no minimum: every ζ-flat connection is flat.
    FlatOnly,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::RExtension => f.write_str("R-extension"),
            Case::S1Extension { c0 } => write!(f, "S1-extension (c0 = {c0})"),
            Case::FlatOnly => f.write_str("flat-only"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseVerdict {
    #[serde(flatten)]
    pub case: Case,
    pub note: String,
}

/// Positive rational gcd: the generator of `ℤa + ℤb` for nonzero rationals.
fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    let (a, b) = (a.abs(), b.abs());
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    BigRational::new(num, a.denom() * b.denom())
}

/// Which of the three cases the period group falls into.
pub fn case_of(spec: &PeriodGroupSpec) -> Result<CaseVerdict> {
    let nonzero: Vec<&Period> = spec.generators.iter().filter(|g| !g.is_zero()).collect();
    if spec.h_plus_nonempty != !nonzero.is_empty() {
        return Err(Error::InvalidParameter(if nonzero.is_empty() {
            "H⁺ declared nonempty but no nonzero generators supplied".into()
        } else {
            "H⁺ declared empty but a nonzero generator was supplied".into()
        }));
    }
    if nonzero.is_empty() {
        return Ok(CaseVerdict {
            case: Case::RExtension,
            note: "H = 0, so the extension group is an R-extension of the fundamental group".into(),
        });
    }
    let irrational: Vec<&Period> = nonzero
        .iter()
        .copied()
        .filter(|g| matches!(g, Period::Irrational { .. }))
        .collect();
    if let Some(Period::Irrational { label, witness }) = irrational.first() {
        if nonzero.len() == 1 {
            return Ok(CaseVerdict {
                case: Case::S1Extension {
                    c0: PeriodValue::Symbolic(label.clone()),
                },
                note: format!("H is generated by the single period {label}"),
            });
        }
        return Ok(CaseVerdict {
            case: Case::FlatOnly,
            note: format!(
                "{label} is incommensurable with the other periods ({witness}); H is dense and H⁺ has no minimum"
            ),
        });
    }
    let c0 = nonzero
        .iter()
        .map(|g| match g {
            Period::Rational(r) => r.abs(),
            Period::Irrational { .. } => unreachable!("handled above"),
        })
        .reduce(|a, b| rational_gcd(&a, &b))
        .expect("nonempty");
    Ok(CaseVerdict {
        note: format!("all periods are rational; H = {c0}·Z"),
        case: Case::S1Extension {
            c0: PeriodValue::Rational(c0),
        },
    })
}

/// `c₀ = min (ℤc₁ + ℤc₂)⁺ = gcd(a₁d₂, a₂d₁)/(d₁d₂)` for `cᵢ = aᵢ/dᵢ > 0`.
pub fn minimal_positive_combination(c1: &BigRational, c2: &BigRational) -> Result<BigRational> {
    if !c1.is_positive() || !c2.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "minimal_positive_combination needs positive inputs, got {c1} and {c2}"
        )));
    }
    Ok(rational_gcd(c1, c2))
}

/// Parse an exact rational: `p`, `p/q` or a finite decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not an exact rational: {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int = if int.is_empty() || int == "-" || int == "+" { "0" } else { int };
        let whole = BigInt::from_str(int).map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let part = BigInt::from_str(frac).map_err(|_| bad())?;
        let signed = if negative { -part } else { part };
        return Ok(BigRational::new(whole * &scale + signed, scale));
    }
    let r = BigRational::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

/// A coefficient of `ζ = c₁dx₁∧dx₂ + c₂dx₃∧dx₄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Rational(BigRational),
    /// Declared to have an irrational ratio to the other coefficient.
    IrrationalRatio,
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(r) => write!(f, "{r}"),
            Coefficient::IrrationalRatio => f.write_str("irrational-ratio"),
        }
    }
}

/// `|a_j⁻¹a_i⁻¹a_ja_i|` for the generators `a_i` of `π₁(T⁴)` lifted to `Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

fn serialize_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

/// Morphisms `ρ: Γ → S¹` for `U(1)` bundles over `T⁴`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct U1T4Report {
    pub c1: String,
    pub c2: String,
    /// Shape of `Γ` itself; `π₂(T⁴) = 0` makes it an `ℝ`-extension.
    pub extension: Case,
    /// Case of the subgroup `ℤc₁ + ℤc₂` on which `ρ` must be trivial.
    pub verdict: CaseVerdict,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub c0: Option<BigRational>,
    pub family: String,
    pub euler_class: String,
    /// The free values `ρ(a_1), …, ρ(a_4) ∈ S¹`.
    pub wilson_parameters: usize,
    pub relations: Vec<Relation>,
}

impl U1T4Report {
    /// `ρ(b) = exp(2πi n|b|/c₀)` on a contractible loop class `b`; `1` in the flat-only case.
    pub fn rho(&self, n: i64, b: &BigRational) -> Complex64 {
        match &self.c0 {
            Some(c0) => {
                let ratio = BigRational::from_integer(n.into()) * b.abs() / c0;
                let frac = (&ratio - ratio.floor()).to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(1.0, std::f64::consts::TAU * frac)
            }
            None => Complex64::new(1.0, 0.0),
        }
    }
}

impl fmt::Display for U1T4Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "zeta = {} dx1^dx2 + {} dx3^dx4", self.c1, self.c2)?;
        writeln!(f, "extension:   {}", self.extension)?;
        writeln!(f, "case:        {}", self.verdict.case)?;
        writeln!(f, "note:        {}", self.verdict.note)?;
        match &self.c0 {
            Some(c0) => writeln!(f, "c0:          {c0}")?,
            None => writeln!(f, "c0:          none")?,
        }
        writeln!(f, "family:      {}", self.family)?;
        writeln!(f, "euler class: {}", self.euler_class)?;
        writeln!(f, "wilson:      {} free parameters rho(a_i) in S1", self.wilson_parameters)?;
        for r in &self.relations {
            writeln!(f, "|a{j}^-1 a{i}^-1 a{j} a{i}| = {v}", i = r.i, j = r.j, v = r.value)?;
        }
        Ok(())
    }
}

fn relations(c1: &Coefficient, c2: &Coefficient) -> Vec<Relation> {
    let mut out = Vec::new();
    for i in 1..=4 {
        for j in i + 1..=4 {
            let value = match (i, j) {
                (1, 2) => c1.to_string(),
                (3, 4) => c2.to_string(),
                _ => "0".into(),
            };
            out.push(Relation { i, j, value });
        }
    }
    out
}

/// Classify `ζ`-flat `U(1)` bundles over `T⁴`.
pub fn classify_u1_t4(c1: &Coefficient, c2: &Coefficient) -> Result<U1T4Report> {
    let check = |c: &Coefficient, name: &str| -> Result<()> {
        match c {
            Coefficient::Rational(r) if r.is_zero() => {
                Err(Error::InvalidParameter(format!("{name} must be nonzero")))
            }
            _ => Ok(()),
        }
    };
    check(c1, "c1")?;
    check(c2, "c2")?;
    let period = |c: &Coefficient| match c {
        Coefficient::Rational(r) => Period::Rational(r.clone()),
        Coefficient::IrrationalRatio => Period::Irrational {
            label: "c2".into(),
            witness: "c1/c2 declared irrational".into(),
        },
    };
    let (c0, verdict) = match (c1, c2) {
        (Coefficient::Rational(a), Coefficient::Rational(b)) => {
            let c0 = minimal_positive_combination(&a.abs(), &b.abs())?;
            (Some(c0), case_of(&PeriodGroupSpec::new(vec![period(c1), period(c2)]))?)
        }
        (Coefficient::IrrationalRatio, Coefficient::IrrationalRatio) => {
            return Err(Error::InvalidParameter(
                "at most one coefficient may carry the irrational-ratio tag".into(),
            ))
        }
        (Coefficient::IrrationalRatio, other) => (
            None,
            case_of(&PeriodGroupSpec::new(vec![period(other), period(c1)]))?,
        ),
        (other, Coefficient::IrrationalRatio) => (
            None,
            case_of(&PeriodGroupSpec::new(vec![period(other), period(c2)]))?,
        ),
    };
    let (family, euler_class) = match &c0 {
        Some(c0) if *c0 == BigRational::from_integer(1.into()) => (
            "rho(b) = exp(2 pi i n |b|), n in Z".to_string(),
            "n zeta, n in Z".to_string(),
        ),
        Some(c0) => (
            format!("rho(b) = exp(2 pi i n |b| / ({c0})), n in Z"),
            format!("(n/({c0})) zeta, n in Z"),
        ),
        None => ("rho(b) = 1".to_string(), "0".to_string()),
    };
    Ok(U1T4Report {
        c1: c1.to_string(),
        c2: c2.to_string(),
        extension: case_of(&PeriodGroupSpec::new(Vec::new()))?.case,
        verdict,
        c0,
        family,
        euler_class,
        wilson_parameters: 4,
        relations: relations(c1, c2),
    })
}
