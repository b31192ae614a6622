//! Closed-form 2×2 linear algebra.
//!
//! Everything here works on explicit entries: max norms, adjugate inverse,
//! discriminant-based eigenvalue classification, the Putzer closed form of
//! `e^{tA}` in each eigenvalue case, and the spectral projections of a matrix
//! with distinct real eigenvalues. [`expm_series_oracle`] is an independent
//! scaling-and-squaring Taylor exponential kept for cross-checking.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{HusError, Result};

/// Default relative tolerance for eigenvalue classification and zero tests.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative determinant threshold below which [`inverse2`] reports `Singular`.
pub const SINGULAR_TOL: f64 = 1e-14;

/// A column vector in ℝ².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec2 {
    pub v1: f64,
    pub v2: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { v1: 0.0, v2: 0.0 };

    pub const fn new(v1: f64, v2: f64) -> Self {
        Vec2 { v1, v2 }
    }

    pub fn inf_norm(self) -> f64 {
        vec_inf_norm(self)
    }

    pub fn is_finite(self) -> bool {
        self.v1.is_finite() && self.v2.is_finite()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.v1 * other.v1 + self.v2 * other.v2
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.v1 + rhs.v1, self.v2 + rhs.v2)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.v1 += rhs.v1;
        self.v2 += rhs.v2;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.v1 - rhs.v1, self.v2 - rhs.v2)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.v1, -self.v2)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self * rhs.v1, self * rhs.v2)
    }
}

/// A real 2×2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn try_from_row_major(entries: [f64; 4]) -> Result<Self> {
        let m = Mat2::new(entries[0], entries[1], entries[2], entries[3]);
        if m.is_finite() {
            Ok(m)
        } else {
            Err(HusError::NonFinite("matrix entries"))
        }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Mat2::new(d1, 0.0, 0.0, d2)
    }

    pub fn row_major(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn is_finite(&self) -> bool {
        self.row_major().iter().all(|x| x.is_finite())
    }

    pub fn inf_norm(&self) -> f64 {
        mat_inf_norm(self)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.row_major().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn col1(&self) -> Vec2 {
        Vec2::new(self.a11, self.a21)
    }

    pub fn col2(&self) -> Vec2 {
        Vec2::new(self.a12, self.a22)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + r.a11,
            self.a12 + r.a12,
            self.a21 + r.a21,
            self.a22 + r.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - r.a11,
            self.a12 - r.a12,
            self.a21 - r.a21,
            self.a22 - r.a22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        -1.0 * self
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * r.a11 + self.a12 * r.a21,
            self.a11 * r.a12 + self.a12 * r.a22,
            self.a21 * r.a11 + self.a22 * r.a21,
            self.a21 * r.a12 + self.a22 * r.a22,
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.v1 + self.a12 * v.v2,
            self.a21 * v.v1 + self.a22 * v.v2,
        )
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        Mat2::new(self * m.a11, self * m.a12, self * m.a21, self * m.a22)
    }
}

/// `‖v‖∞ = max(|v1|, |v2|)`.
pub fn vec_inf_norm(v: Vec2) -> f64 {
    v.v1.abs().max(v.v2.abs())
}

/// Induced max norm: the largest absolute row sum.
pub fn mat_inf_norm(m: &Mat2) -> f64 {
    (m.a11.abs() + m.a12.abs()).max(m.a21.abs() + m.a22.abs())
}

/// Adjugate inverse. Fails when `|det| <= SINGULAR_TOL * max(‖M‖∞², tiny)`.
pub fn inverse2(m: &Mat2) -> Result<Mat2> {
    let det = m.det();
    let scale = mat_inf_norm(m).powi(2).max(f64::MIN_POSITIVE);
    if det == 0.0 || !det.is_finite() || det.abs() <= SINGULAR_TOL * scale {
        return Err(HusError::Singular { det });
    }
    Ok((1.0 / det) * Mat2::new(m.a22, -m.a12, -m.a21, m.a11))
}

/// Eigenvalue structure of a real 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum EigenClass {
    /// Two real eigenvalues, `lambda1 > lambda2`.
    RealDistinct { lambda1: f64, lambda2: f64 },
    /// One real eigenvalue of multiplicity two; `eta = lambda - a11`.
    RealRepeated { lambda: f64, eta: f64 },
    /// Conjugate pair `alpha ± i beta`, `beta > 0`.
    ComplexPair { alpha: f64, beta: f64 },
}

impl EigenClass {
    /// Real parts of both eigenvalues (larger first for real spectra).
    pub fn real_parts(&self) -> [f64; 2] {
        match *self {
            EigenClass::RealDistinct { lambda1, lambda2 } => [lambda1, lambda2],
            EigenClass::RealRepeated { lambda, .. } => [lambda, lambda],
            EigenClass::ComplexPair { alpha, .. } => [alpha, alpha],
        }
    }

    /// `max |Re λ|`, the exponential growth rate of `e^{tA}` in either time direction.
    pub fn spectral_abscissa(&self) -> f64 {
        let [r1, r2] = self.real_parts();
        r1.abs().max(r2.abs())
    }

    pub fn tag(&self) -> &'static str {
        match self {
            EigenClass::RealDistinct { .. } => "real_distinct",
            EigenClass::RealRepeated { .. } => "real_repeated",
            EigenClass::ComplexPair { .. } => "complex_pair",
        }
    }
}

/// Absolute width of the discriminant band treated as a repeated eigenvalue.
pub fn discriminant_band(m: &Mat2, tol: f64) -> f64 {
    let tr = m.trace();
    tol * 1f64.max(tr * tr).max(m.det().abs())
}

/// Classifies the spectrum from the discriminant `D = tr² − 4 det`.
///
/// `|D| <= τ` with `τ = tol·max(1, tr², |det|)` is reported as a repeated
/// eigenvalue, whose parameters are recomputed from the entries.
pub fn classify(m: &Mat2, tol: f64) -> EigenClass {
    let tr = m.trace();
    let det = m.det();
    // (a - d)^2 + 4bc is the same discriminant without the tr^2 - 4det cancellation.
    let half_gap = 0.5 * (m.a11 - m.a22);
    let disc = 4.0 * (half_gap * half_gap + m.a12 * m.a21);
    let band = discriminant_band(m, tol);
    if disc > band {
        let root = disc.sqrt();
        // Larger-magnitude root first, then Vieta for the other one.
        let (lambda1, lambda2) = if tr >= 0.0 {
            let l1 = 0.5 * (tr + root);
            (
                l1,
                if l1 != 0.0 {
                    det / l1
                } else {
                    0.5 * (tr - root)
                },
            )
        } else {
            let l2 = 0.5 * (tr - root);
            (
                if l2 != 0.0 {
                    det / l2
                } else {
                    0.5 * (tr + root)
                },
                l2,
            )
        };
        EigenClass::RealDistinct { lambda1, lambda2 }
    } else if disc >= -band {
        EigenClass::RealRepeated {
            lambda: 0.5 * tr,
            eta: 0.5 * (m.a22 - m.a11),
        }
    } else {
        EigenClass::ComplexPair {
            alpha: 0.5 * tr,
            beta: 0.5 * (-disc).sqrt(),
        }
    }
}

/// `e^{tA}` in closed form, classifying with [`DEFAULT_TOL`].
pub fn expm_closed(m: &Mat2, t: f64) -> Mat2 {
    expm_with_class(m, &classify(m, DEFAULT_TOL), t)
}

/// `e^{tA}` from a precomputed classification.
pub fn expm_with_class(m: &Mat2, ec: &EigenClass, t: f64) -> Mat2 {
    if t == 0.0 {
        return Mat2::IDENTITY;
    }
    let (a, b, c) = (m.a11, m.a12, m.a21);
    match *ec {
        EigenClass::RealDistinct { lambda1, lambda2 } => {
            let gap = lambda1 - lambda2;
            let e1 = (lambda1 * t).exp();
            let e2 = (lambda2 * t).exp();
            // (e1 - e2) / gap, without cancellation when the gap is small.
            let dd = if (gap * t).abs() < 1.0 {
                e2 * (gap * t).exp_m1() / gap
            } else {
                (e1 - e2) / gap
            };
            Mat2::new(
                e2 + (a - lambda2) * dd,
                b * dd,
                c * dd,
                e2 + (lambda1 - a) * dd,
            )
        }
        EigenClass::RealRepeated { lambda, eta } => {
            let g = (lambda * t).exp();
            g * Mat2::new(1.0 - eta * t, b * t, c * t, 1.0 + eta * t)
        }
        EigenClass::ComplexPair { alpha, beta } => {
            let g = (alpha * t).exp();
            let (s, co) = (beta * t).sin_cos();
            let sb = s / beta;
            g * Mat2::new(co + (a - alpha) * sb, b * sb, c * sb, co + (alpha - a) * sb)
        }
    }
}

/// Taylor-series exponential with scaling and squaring.
///
/// The argument `tM` is halved until its max norm is at most 1/2, the series is
/// summed until a term drops below 1e-16 in max norm, and the result squared back.
pub fn expm_series_oracle(m: &Mat2, t: f64) -> Mat2 {
    let x = t * *m;
    let norm = mat_inf_norm(&x);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let y = scale * x;
    let mut sum = Mat2::IDENTITY;
    let mut term = Mat2::IDENTITY;
    for k in 1..200 {
        term = (1.0 / k as f64) * (term * y);
        sum = sum + term;
        if mat_inf_norm(&term) < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Idempotent pair with `e^{tA} = e^{λ1 t} first + e^{λ2 t} second`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionPair {
    pub first: Mat2,
    pub second: Mat2,
}

/// `A1 = (A − λ2 I)/(λ1 − λ2)`, `A2 = (λ1 I − A)/(λ1 − λ2)`.
pub fn spectral_projections(m: &Mat2, ec: &EigenClass) -> Result<ProjectionPair> {
    let EigenClass::RealDistinct { lambda1, lambda2 } = *ec else {
        return Err(HusError::DegenerateClass);
    };
    let gap = lambda1 - lambda2;
    let first = (1.0 / gap) * Mat2::new(m.a11 - lambda2, m.a12, m.a21, m.a22 - lambda2);
    let second = (1.0 / gap) * Mat2::new(lambda1 - m.a11, -m.a12, -m.a21, lambda1 - m.a22);
    Ok(ProjectionPair { first, second })
}

/// `(e^x − 1)/x`, continuous at 0.
pub(crate) fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 + x * (0.5 + x / 6.0)
    } else {
        x.exp_m1() / x
    }
}

/// Derivative of [`exprel`]: `(x e^x − e^x + 1)/x²`.
fn exprel_prime(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // sum_k (k+1) x^k / (k+2)!
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 2.0;
        for k in 0..12 {
            sum += (k as f64 + 1.0) * pow / fact;
            pow *= x;
            fact *= k as f64 + 3.0;
        }
        sum
    } else {
        (x * x.exp() - x.exp_m1()) / (x * x)
    }
}

fn exprel_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + z * (0.5 + z / 6.0)
    } else {
        let (s, c) = z.im.sin_cos();
        let half = (0.5 * z.im).sin();
        let expm1 = Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s);
        expm1 / z
    }
}

/// `∫₀ᵗ e^{sA} ds`, i.e. `t·φ₁(tA)` with `φ₁(z) = (e^z − 1)/z`.
///
/// Evaluated through the eigenvalue decomposition, so it stays accurate for
/// singular and near-singular `A` where `A⁻¹(e^{tA} − I)` breaks down.
pub fn integrated_expm(m: &Mat2, ec: &EigenClass, t: f64) -> Mat2 {
    match *ec {
        EigenClass::RealDistinct { lambda1, lambda2 } => {
            let p = spectral_projections(m, ec).expect("distinct class");
            (t * exprel(lambda1 * t)) * p.first + (t * exprel(lambda2 * t)) * p.second
        }
        EigenClass::RealRepeated { lambda, .. } => {
            let f = t * exprel(lambda * t);
            let df = t * t * exprel_prime(lambda * t);
            f * Mat2::IDENTITY + df * (*m - lambda * Mat2::IDENTITY)
        }
        EigenClass::ComplexPair { alpha, beta } => {
            let f = t * exprel_complex(Complex64::new(alpha * t, beta * t));
            f.re * Mat2::IDENTITY + (f.im / beta) * (*m - alpha * Mat2::IDENTITY)
        }
    }
}
