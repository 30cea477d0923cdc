//! Coefficient algebras carried by differential forms.
//!
//! Three kinds are supported:
//!
//! * [`Algebra::Abelian`]: real numbers, the Lie algebra of a circle or line
//!   bundle. The bracket vanishes and the trace is the identity.
//! * [`Algebra::Su2`]: coefficients `x^a` in the basis `T_a = σ_a/(2i)`,
//!   `[T_a, T_b] = ε^{abc} T_c`, with inner product `⟨X,Y⟩ = -2 tr(XY)` so the
//!   basis is orthonormal.
//! * [`Algebra::Quaternion`]: the real span of `1, T_1, T_2, T_3`. It is closed
//!   under matrix multiplication (`T_a T_b = ½ ε^{abc} T_c - ¼ δ_ab`) and is the
//!   target of matrix-product wedges of su(2)-valued forms. SU(2) group elements
//!   are the unit elements `s + x^a T_a` with `s² + |x|²/4 = 1`.
//!
//! Coefficient layouts are `[x]`, `[x1, x2, x3]` and `[s, x1, x2, x3]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algebra {
    Abelian,
    Su2,
    Quaternion,
}

impl Algebra {
    /// Number of real coefficients per value.
    pub const fn dim(self) -> usize {
        match self {
            Algebra::Abelian => 1,
            Algebra::Su2 => 3,
            Algebra::Quaternion => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algebra::Abelian => "abelian",
            Algebra::Su2 => "su2",
            Algebra::Quaternion => "quaternion",
        }
    }

    /// Algebra of `x * y` under the matrix product, if defined.
    pub fn product(self, other: Algebra) -> Option<Algebra> {
        use Algebra::*;
        match (self, other) {
            (Abelian, x) | (x, Abelian) => Some(x),
            (Su2, Su2) | (Su2, Quaternion) | (Quaternion, Su2) | (Quaternion, Quaternion) => {
                Some(Quaternion)
            }
        }
    }

    /// Algebra of `[x, y]`, if defined.
    pub fn bracket(self, other: Algebra) -> Option<Algebra> {
        match (self, other) {
            (Algebra::Abelian, Algebra::Abelian) => Some(Algebra::Abelian),
            (Algebra::Su2, Algebra::Su2) => Some(Algebra::Su2),
            _ => None,
        }
    }

    /// Coefficient of the trace `tr(XY) = κ X·Y` on Lie-algebra values.
    pub fn trace_form_factor(self) -> f64 {
        match self {
            Algebra::Abelian => 1.0,
            Algebra::Su2 => -0.5,
            Algebra::Quaternion => f64::NAN,
        }
    }
}

/// Lift a value into the quaternion layout.
#[inline]
pub fn to_quaternion(alg: Algebra, x: &[f64]) -> [f64; 4] {
    match alg {
        Algebra::Abelian => [x[0], 0.0, 0.0, 0.0],
        Algebra::Su2 => [0.0, x[0], x[1], x[2]],
        Algebra::Quaternion => [x[0], x[1], x[2], x[3]],
    }
}

/// `(s1 + x)(s2 + y)` in the `1, T_a` basis.
#[inline]
pub fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [s1, x1, x2, x3] = a;
    let [s2, y1, y2, y3] = b;
    let dot = x1 * y1 + x2 * y2 + x3 * y3;
    [
        s1 * s2 - 0.25 * dot,
        s1 * y1 + s2 * x1 + 0.5 * (x2 * y3 - x3 * y2),
        s1 * y2 + s2 * x2 + 0.5 * (x3 * y1 - x1 * y3),
        s1 * y3 + s2 * x3 + 0.5 * (x1 * y2 - x2 * y1),
    ]
}

#[inline]
pub fn quat_conj(a: [f64; 4]) -> [f64; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

/// Deviation of `s + x^a T_a` from the unit sphere `s² + |x|²/4 = 1`.
#[inline]
pub fn quat_unit_defect(a: [f64; 4]) -> f64 {
    (a[0] * a[0] + 0.25 * (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]) - 1.0).abs()
}

/// `exp(x^a T_a)` as a unit quaternion.
pub fn su2_exp(x: [f64; 3]) -> [f64; 4] {
    let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let half = 0.5 * norm;
    // sin(half)/half -> 1 as norm -> 0
    let sinc = if half < 1e-8 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    [half.cos(), sinc * x[0], sinc * x[1], sinc * x[2]]
}

/// Accumulate `scale * x·y` (algebra inner product, orthonormal basis).
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `[x, y]` for su(2) coefficient triples.
#[inline]
pub fn cross(x: &[f64], y: &[f64]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

/// The 2x2 complex matrix of `T_a = σ_a / (2i)`, `a` zero-based.
pub fn su2_generator(a: usize) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let half = 0.5;
    match a {
        // σ1/(2i) = -i/2 σ1
        0 => [
            [z, Complex64::new(0.0, -half)],
            [Complex64::new(0.0, -half), z],
        ],
        // σ2/(2i) = -i/2 [[0,-i],[i,0]] = [[0,-1/2],[1/2,0]]
        1 => [
            [z, Complex64::new(-half, 0.0)],
            [Complex64::new(half, 0.0), z],
        ],
        // σ3/(2i) = diag(-i/2, i/2)
        2 => [
            [Complex64::new(0.0, -half), z],
            [z, Complex64::new(0.0, half)],
        ],
        _ => panic!("su(2) generator index {a} out of range"),
    }
}

/// Matrix of `s + x^a T_a`.
pub fn quaternion_matrix(q: [f64; 4]) -> [[Complex64; 2]; 2] {
    let mut m = [
        [Complex64::new(q[0], 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(q[0], 0.0)],
    ];
    for a in 0..3 {
        let t = su2_generator(a);
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += t[i][j] * q[a + 1];
            }
        }
    }
    m
}

/// Trace of a value, with `tr` on the abelian algebra taken as the identity.
#[inline]
pub fn trace(alg: Algebra, x: &[f64]) -> f64 {
    match alg {
        Algebra::Abelian => x[0],
        Algebra::Su2 => 0.0,
        Algebra::Quaternion => 2.0 * x[0],
    }
}
