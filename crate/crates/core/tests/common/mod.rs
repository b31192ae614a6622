//! Sampling helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use hus_core::linalg::{expm_series_oracle, Mat2};
use num_complex::Complex64;
use rand::Rng;

pub fn m(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
    Mat2::new(a, b, c, d)
}

/// `S D S⁻¹` for `S = [[1, p], [q, 1]]`.
pub fn conjugate(d: Mat2, p: f64, q: f64) -> Mat2 {
    let s = m(1.0, p, q, 1.0);
    let det = 1.0 - p * q;
    let s_inv = (1.0 / det) * m(1.0, -p, -q, 1.0);
    s * d * s_inv
}

pub fn with_distinct(l1: f64, l2: f64, p: f64, q: f64) -> Mat2 {
    conjugate(Mat2::diag(l1, l2), p, q)
}

pub fn with_complex(alpha: f64, beta: f64, p: f64, q: f64) -> Mat2 {
    conjugate(m(alpha, beta, -beta, alpha), p, q)
}

/// Repeated eigenvalue `λ` with `η = λ − a` and off-diagonal `b`.
pub fn with_repeated(lambda: f64, eta: f64, b: f64) -> Mat2 {
    m(lambda - eta, b, -eta * eta / b, lambda + eta)
}

/// Eigenvalues from the quadratic formula in complex arithmetic.
pub fn eigenvalues(a: &Mat2) -> [Complex64; 2] {
    let tr = a.trace();
    let det = a.det();
    let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    [(tr + disc) / 2.0, (tr - disc) / 2.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StableClass {
    PositiveDistinct,
    NegativeDistinct,
    Saddle,
    Repeated,
    Complex,
}

pub const STABLE_CLASSES: [StableClass; 5] = [
    StableClass::PositiveDistinct,
    StableClass::NegativeDistinct,
    StableClass::Saddle,
    StableClass::Repeated,
    StableClass::Complex,
];

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// A stable matrix with `|Re λ| ∈ [0.3, 2]`, eigenvalue gaps of at least 0.3
/// and a well-conditioned eigenbasis. A fifth of the real distinct samples
/// are upper triangular, which puts `a` on an eigenvalue.
pub fn sample_stable<R: Rng>(rng: &mut R, class: StableClass) -> Mat2 {
    let p = rng.gen_range(-0.7..0.7);
    let q = rng.gen_range(-0.7..0.7);
    let pair = |rng: &mut R, sign1: f64, sign2: f64| loop {
        let l1 = sign1 * rng.gen_range(0.3..2.0);
        let l2 = sign2 * rng.gen_range(0.3..2.0);
        if (l1 - l2).abs() >= 0.3 {
            return (l1, l2);
        }
    };
    let distinct = |rng: &mut R, l1: f64, l2: f64| {
        if rng.gen_bool(0.2) {
            m(l1, signed(rng, 0.3, 2.0), 0.0, l2)
        } else {
            with_distinct(l1, l2, p, q)
        }
    };
    match class {
        StableClass::PositiveDistinct => {
            let (l1, l2) = pair(rng, 1.0, 1.0);
            distinct(rng, l1, l2)
        }
        StableClass::NegativeDistinct => {
            let (l1, l2) = pair(rng, -1.0, -1.0);
            distinct(rng, l1, l2)
        }
        StableClass::Saddle => {
            let (l1, l2) = pair(rng, 1.0, -1.0);
            distinct(rng, l1, l2)
        }
        StableClass::Repeated => {
            let lambda = signed(rng, 0.3, 2.0);
            let b = signed(rng, 0.3, 2.0);
            if rng.gen_bool(0.2) {
                m(lambda, b, 0.0, lambda)
            } else {
                with_repeated(lambda, rng.gen_range(-2.0..2.0), b)
            }
        }
        StableClass::Complex => {
            let alpha = signed(rng, 0.3, 2.0);
            let beta = rng.gen_range(0.3..2.0);
            with_complex(alpha, beta, p, q)
        }
    }
}

/// Unstable matrices with exactly representable structure: a zero eigenvalue
/// (integer rank-one matrix) or a purely imaginary pair (integer, trace 0).
pub fn sample_zero_eigenvalue<R: Rng>(rng: &mut R) -> Mat2 {
    loop {
        let (u1, u2, v1, v2): (i32, i32, i32, i32) = (
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
        );
        let a = m(
            (u1 * v1) as f64,
            (u1 * v2) as f64,
            (u2 * v1) as f64,
            (u2 * v2) as f64,
        );
        if a.trace() != 0.0 {
            return a;
        }
    }
}

pub fn sample_imaginary<R: Rng>(rng: &mut R) -> Mat2 {
    loop {
        let a: i32 = rng.gen_range(-4..=4);
        let b: i32 = rng.gen_range(-5..=5);
        let c: i32 = rng.gen_range(-5..=5);
        if a * a + b * c < 0 {
            return m(a as f64, b as f64, c as f64, -a as f64);
        }
    }
}

/// `max_i ∫ Σ_j |G_ij(τ)| dτ` for the Green's function of `x' = Ax + q`
/// with `A` having all real parts of one sign: the smallest constant valid
/// for every bounded forcing. Exponentials come from the series oracle and
/// the integral from composite Simpson on `[0, L]`.
pub fn minimal_constant_same_sign(a: &Mat2, rho_min: f64) -> f64 {
    let tr = a.trace();
    // Integrate e^{sB} for the decaying generator B = ±A.
    let b = if tr > 0.0 { -1.0 * *a } else { *a };
    let horizon = 40.0 / rho_min;
    let n = 40_000usize;
    let h = horizon / n as f64;
    let step = expm_series_oracle(&b, h);
    let mut e = Mat2::IDENTITY;
    let mut acc = [0.0f64; 2];
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc[0] += w * (e.a11.abs() + e.a12.abs());
        acc[1] += w * (e.a21.abs() + e.a22.abs());
        e = step * e;
    }
    (h / 3.0) * acc[0].max(acc[1])
}

/// Same quantity for a saddle, where `G(τ) = e^{λ2 τ}A2` for `τ > 0` and
/// `−e^{λ1 τ}A1` for `τ < 0` integrate exactly.
pub fn minimal_constant_saddle(a: &Mat2) -> f64 {
    let [z1, z2] = eigenvalues(a);
    let (l1, l2) = (z1.re.max(z2.re), z1.re.min(z2.re));
    let a1 = (1.0 / (l1 - l2)) * (*a - l2 * Mat2::IDENTITY);
    let a2 = Mat2::IDENTITY - a1;
    let row = |p: &Mat2, i: usize| {
        if i == 0 {
            p.a11.abs() + p.a12.abs()
        } else {
            p.a21.abs() + p.a22.abs()
        }
    };
    (0..2)
        .map(|i| row(&a1, i) / l1 + row(&a2, i) / l2.abs())
        .fold(0.0, f64::max)
}

pub fn minimal_constant(a: &Mat2) -> f64 {
    let [z1, z2] = eigenvalues(a);
    if z1.re * z2.re < 0.0 {
        minimal_constant_saddle(a)
    } else {
        minimal_constant_same_sign(a, z1.re.abs().min(z2.re.abs()))
    }
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}
