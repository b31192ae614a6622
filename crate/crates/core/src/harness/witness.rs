//! Closed-form witnesses: the trajectory whose best tracking distance is
//! exactly `ε‖A⁻¹e‖∞`, and ε-approximate solutions that no exact solution
//! can follow when a real part vanishes.

use crate::error::{HusError, Result};
use crate::linalg::{classify, expm_with_class, inverse2, EigenClass, Mat2, Vec2};
use crate::stability::{is_hus_stable, zero_band};

use super::symmetric_grid;

/// Tolerance on `‖φ' − Aφ‖∞ = ε`, relative to `max(1, ε)`.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-10;

/// Intervals used by [`InstabilityWitness::growth`] on `[−T, T]`.
pub const GROWTH_SAMPLES: usize = 4000;

/// `φ(t) = ε(e^{tA} − I)A⁻¹e` tracked by `x(t) = ε e^{tA}A⁻¹e`.
#[derive(Debug, Clone)]
pub struct LowerBoundWitness {
    m: Mat2,
    ec: EigenClass,
    pub e: Vec2,
    pub epsilon: f64,
    /// `A⁻¹e`.
    pub w: Vec2,
    /// `ε‖A⁻¹e‖∞`, the constant value of `‖φ(t) − x(t)‖∞`.
    pub deviation_constant: f64,
}

pub fn lower_bound_witness(m: &Mat2, e: Vec2, epsilon: f64, tol: f64) -> Result<LowerBoundWitness> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(HusError::InvalidArgument("epsilon must be positive".into()));
    }
    if !e.is_finite() || (e.inf_norm() - 1.0).abs() > 1e-12 {
        return Err(HusError::InvalidArgument(
            "e must have unit max-norm".into(),
        ));
    }
    let ec = classify(m, tol);
    if !is_hus_stable(m, &ec, tol).stable {
        return Err(HusError::NotStable);
    }
    let w = inverse2(m)? * e;
    Ok(LowerBoundWitness {
        m: *m,
        ec,
        e,
        epsilon,
        w,
        deviation_constant: epsilon * w.inf_norm(),
    })
}

impl LowerBoundWitness {
    pub fn phi(&self, t: f64) -> Vec2 {
        self.epsilon * (expm_with_class(&self.m, &self.ec, t) * self.w - self.w)
    }

    pub fn x(&self, t: f64) -> Vec2 {
        self.epsilon * (expm_with_class(&self.m, &self.ec, t) * self.w)
    }

    /// `φ(t) − x(t)` from the two evaluated trajectories.
    pub fn deviation(&self, t: f64) -> Vec2 {
        self.phi(t) - self.x(t)
    }

    /// `φ'(t) − Aφ(t)` with `φ'(t) = ε e^{tA} e`.
    pub fn residual(&self, t: f64) -> Vec2 {
        let dphi = self.epsilon * (expm_with_class(&self.m, &self.ec, t) * self.e);
        dphi - self.m * self.phi(t)
    }
}

/// Which unstable configuration the witness is built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstabilityKind {
    /// One zero eigenvalue and `λ = a + d ≠ 0`: `φ = (εt/m) e^{tA} v` with
    /// `v` spanning the kernel. `exact` records that `det A` is exactly zero,
    /// in which case `e^{tA}v = v`.
    Kernel { v: Vec2, exact: bool },
    /// Both eigenvalues zero (`a² + bc = 0`, `d = −a`).
    Nilpotent { branch: NilpotentBranch },
    /// Purely imaginary pair: `φ = (εt/m) e^{tA} (1, 0)`.
    ImaginaryPair { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilpotentBranch {
    /// `b ≠ −a` or `c ≠ a`: `φ = (εt/2)((a+b)t + 2, (c−a)t + 2)`.
    General,
    /// `b = −a` and `c = a`: `φ = εt(at + 1, at − 1)`.
    Balanced,
}

#[derive(Debug, Clone)]
pub struct InstabilityWitness {
    m: Mat2,
    ec: EigenClass,
    pub epsilon: f64,
    pub kind: InstabilityKind,
    /// Normalizer `m` making `sup ‖φ' − Aφ‖∞ = ε`.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualCheck {
    pub grid_max: f64,
    pub grid_min: f64,
    /// Supremum of `‖φ' − Aφ‖∞` over all `t`.
    pub sup: f64,
    /// Whether the residual norm is constant in `t` for this witness.
    pub pointwise: bool,
    pub ok: bool,
}

pub fn instability_witness(
    m: &Mat2,
    ec: &EigenClass,
    epsilon: f64,
    tol: f64,
) -> Result<InstabilityWitness> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(HusError::InvalidArgument("epsilon must be positive".into()));
    }
    if is_hus_stable(m, ec, tol).stable {
        return Err(HusError::IsStable);
    }
    let band = zero_band(m, tol);
    let (a, b, c) = (m.a11, m.a12, m.a21);
    let (kind, scale) = match *ec {
        EigenClass::ComplexPair { beta, .. } => {
            let scale = ((a * a + beta * beta).sqrt() / beta).max(c.abs() / beta);
            (InstabilityKind::ImaginaryPair { beta }, scale)
        }
        EigenClass::RealDistinct { lambda1, lambda2 }
            if lambda1.abs() > band || lambda2.abs() > band =>
        {
            let lambda = m.trace();
            let v = if a == 0.0 && b == 0.0 {
                Vec2::new(1.0, -c / lambda)
            } else if a != 0.0 {
                Vec2::new(-b / a, 1.0)
            } else {
                // a = 0, b ≠ 0 forces c = 0 when det A = 0.
                Vec2::new(1.0, 0.0)
            };
            let exact = m.det() == 0.0;
            (InstabilityKind::Kernel { v, exact }, v.inf_norm())
        }
        _ => {
            let branch = if b != -a || c != a {
                NilpotentBranch::General
            } else {
                NilpotentBranch::Balanced
            };
            (InstabilityKind::Nilpotent { branch }, 1.0)
        }
    };
    Ok(InstabilityWitness {
        m: *m,
        ec: *ec,
        epsilon,
        kind,
        scale,
    })
}

impl InstabilityWitness {
    /// `e^{tA}u`, using `e^{tA}v = v` for an exact kernel vector.
    fn flow(&self, t: f64, u: Vec2) -> Vec2 {
        match self.kind {
            InstabilityKind::Kernel { exact: true, .. } => u,
            _ => expm_with_class(&self.m, &self.ec, t) * u,
        }
    }

    fn seed(&self) -> Vec2 {
        match self.kind {
            InstabilityKind::Kernel { v, .. } => v,
            _ => Vec2::new(1.0, 0.0),
        }
    }

    pub fn phi(&self, t: f64) -> Vec2 {
        let eps = self.epsilon;
        match self.kind {
            InstabilityKind::Nilpotent { branch } => nilpotent_phi(&self.m, branch, eps, t).0,
            _ => (eps * t / self.scale) * self.flow(t, self.seed()),
        }
    }

    /// `φ'(t) − Aφ(t)` from the analytic derivative.
    pub fn residual(&self, t: f64) -> Vec2 {
        match self.kind {
            InstabilityKind::Nilpotent { branch } => {
                let (phi, dphi) = nilpotent_phi(&self.m, branch, self.epsilon, t);
                dphi - self.m * phi
            }
            // d/dt (t e^{tA}u) = e^{tA}u + tA e^{tA}u, the second term cancels Aφ.
            _ => (self.epsilon / self.scale) * self.flow(t, self.seed()),
        }
    }

    /// Confirms `‖φ' − Aφ‖∞ = ε` on `grid`; for an imaginary pair the norm
    /// oscillates and only its supremum equals `ε`.
    pub fn residual_check(&self, grid: &[f64]) -> ResidualCheck {
        let (grid_max, grid_min) = grid
            .iter()
            .map(|&t| self.residual(t).inf_norm())
            .fold((0.0f64, f64::INFINITY), |(hi, lo), r| {
                (hi.max(r), lo.min(r))
            });
        let tol = WITNESS_RESIDUAL_TOL * self.epsilon.max(1.0);
        let eps = self.epsilon;
        match self.kind {
            InstabilityKind::ImaginaryPair { beta } => {
                // With zero real part each residual component is A cos βt + B sin βt;
                // read A, B off t = 0 and a quarter period.
                let r0 = self.residual(0.0);
                let r1 = self.residual(std::f64::consts::FRAC_PI_2 / beta);
                let sup = r0.v1.hypot(r1.v1).max(r0.v2.hypot(r1.v2));
                ResidualCheck {
                    grid_max,
                    grid_min,
                    sup,
                    pointwise: false,
                    ok: (sup - eps).abs() <= tol && grid_max <= eps + tol,
                }
            }
            _ => ResidualCheck {
                grid_max,
                grid_min,
                sup: grid_max,
                pointwise: true,
                ok: (grid_max - eps).abs() <= tol && (grid_min - eps).abs() <= tol,
            },
        }
    }

    /// `g(T)`: the best of three candidate exact solutions `e^{tA}x₀`
    /// (`x₀ = 0`, `x₀ = φ(0)`, least-squares fit) measured by
    /// `max_{|t|≤T} ‖φ(t) − e^{tA}x₀‖∞`.
    pub fn growth(&self, horizon: f64) -> Result<f64> {
        let grid = symmetric_grid(horizon, horizon / (GROWTH_SAMPLES / 2) as f64)?;
        let samples: Vec<(Mat2, Vec2)> = grid
            .iter()
            .map(|&t| (expm_with_class(&self.m, &self.ec, t), self.phi(t)))
            .collect();

        let mut candidates = vec![Vec2::ZERO, self.phi(0.0)];
        if let Some(x0) = least_squares_start(&samples) {
            candidates.push(x0);
        }
        let worst = |x0: Vec2| {
            samples
                .iter()
                .map(|(e, phi)| (*phi - *e * x0).inf_norm())
                .fold(0.0, f64::max)
        };
        Ok(candidates
            .into_iter()
            .map(worst)
            .fold(f64::INFINITY, f64::min))
    }
}

/// Returns `(φ(t), φ'(t))` for the nilpotent witness.
fn nilpotent_phi(m: &Mat2, branch: NilpotentBranch, eps: f64, t: f64) -> (Vec2, Vec2) {
    let (a, b, c) = (m.a11, m.a12, m.a21);
    match branch {
        NilpotentBranch::General => {
            let phi = (0.5 * eps * t) * Vec2::new((a + b) * t + 2.0, (c - a) * t + 2.0);
            let dphi = eps * Vec2::new((a + b) * t + 1.0, (c - a) * t + 1.0);
            (phi, dphi)
        }
        NilpotentBranch::Balanced => {
            let phi = (eps * t) * Vec2::new(a * t + 1.0, a * t - 1.0);
            let dphi = eps * Vec2::new(2.0 * a * t + 1.0, 2.0 * a * t - 1.0);
            (phi, dphi)
        }
    }
}

/// Minimizes `Σ w_t² ‖φ(t) − E_t x₀‖₂²` with `w_t = 1/max(1, ‖E_t‖∞)`, so that
/// exponentially large samples do not swamp the normal equations.
fn least_squares_start(samples: &[(Mat2, Vec2)]) -> Option<Vec2> {
    let mut gram = Mat2::ZERO;
    let mut rhs = Vec2::ZERO;
    for (e, phi) in samples {
        let w = 1.0 / e.inf_norm().max(1.0);
        let ew = w * *e;
        let ewt = ew.transpose();
        gram = gram + ewt * ew;
        rhs += ewt * (w * *phi);
    }
    let x0 = inverse2(&gram).ok()? * rhs;
    x0.is_finite().then_some(x0)
}
