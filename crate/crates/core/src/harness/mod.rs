//! Perturbed trajectories with closed-form forcing, the tracking solutions
//! built from improper integrals, and sup-norm certification against `Kε`.

use rayon::prelude::*;

use crate::error::{HusError, Result};
use crate::linalg::{
    classify, expm_with_class, integrated_expm, inverse2, mat_inf_norm, spectral_projections,
    EigenClass, Mat2, Vec2,
};
use crate::stability::{is_hus_stable, StabilityReport};

mod witness;

pub use witness::{
    instability_witness, lower_bound_witness, InstabilityKind, InstabilityWitness,
    LowerBoundWitness, NilpotentBranch, ResidualCheck,
};

/// Largest `|Re λ|·|t|` at which trajectories are evaluated.
pub const GROWTH_LIMIT: f64 = 50.0;

/// Step of the five-point difference stencil used for residual checks.
pub const FD_STEP: f64 = 1e-3;

/// Largest grid the harness will allocate.
pub const MAX_GRID_POINTS: usize = 20_000_000;

const UNIT_TOL: f64 = 1e-12;

const MAX_CACHED_NODES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `q(t) = ε e`.
    ConstantDir { e: Vec2 },
    /// `q(t) = ε sin(ωt) dir`.
    Sinusoid { omega: f64, dir: Vec2 },
    /// `q(t) = ε σ(t) dir` with `σ = ±1` flipping at every multiple of `period`.
    SignSwitch { period: f64, dir: Vec2 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub family: Family,
}

impl PerturbationSpec {
    pub fn constant(epsilon: f64, e: Vec2) -> Self {
        PerturbationSpec {
            epsilon,
            family: Family::ConstantDir { e },
        }
    }

    pub fn sinusoid(epsilon: f64, omega: f64, dir: Vec2) -> Self {
        PerturbationSpec {
            epsilon,
            family: Family::Sinusoid { omega, dir },
        }
    }

    pub fn sign_switch(epsilon: f64, period: f64, dir: Vec2) -> Self {
        PerturbationSpec {
            epsilon,
            family: Family::SignSwitch { period, dir },
        }
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::ConstantDir { .. } => "constant",
            Family::Sinusoid { .. } => "sinusoid",
            Family::SignSwitch { .. } => "sign-switch",
        }
    }

    pub fn direction(&self) -> Vec2 {
        match self.family {
            Family::ConstantDir { e } => e,
            Family::Sinusoid { dir, .. } | Family::SignSwitch { dir, .. } => dir,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HusError::InvalidPerturbation(msg.to_string()));
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad("epsilon must be positive and finite");
        }
        let d = self.direction();
        if !d.is_finite() || (d.inf_norm() - 1.0).abs() > UNIT_TOL {
            return bad("direction must have unit max-norm");
        }
        match self.family {
            Family::Sinusoid { omega, .. } if !omega.is_finite() => bad("omega must be finite"),
            Family::SignSwitch { period, .. } if !(period.is_finite() && period > 0.0) => {
                bad("period must be positive and finite")
            }
            _ => Ok(()),
        }
    }

    /// The forcing term `q(t)`.
    pub fn q(&self, t: f64) -> Vec2 {
        let scale = match self.family {
            Family::ConstantDir { .. } => 1.0,
            Family::Sinusoid { omega, .. } => (omega * t).sin(),
            Family::SignSwitch { period, .. } => sign_at(t, period),
        };
        (self.epsilon * scale) * self.direction()
    }

    fn switch_period(&self) -> Option<f64> {
        match self.family {
            Family::SignSwitch { period, .. } => Some(period),
            _ => None,
        }
    }
}

/// `σ(t) = (−1)^⌊t/P⌋`.
pub fn sign_at(t: f64, period: f64) -> f64 {
    parity_sign((t / period).floor())
}

fn parity_sign(k: f64) -> f64 {
    if k.rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Uniform grid on `[−horizon, horizon]` whose spacing is at most `step`.
pub fn symmetric_grid(horizon: f64, step: f64) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(HusError::InvalidArgument("horizon must be positive".into()));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(HusError::InvalidArgument("step must be positive".into()));
    }
    let half = (horizon / step).ceil();
    if 2.0 * half + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(HusError::InvalidArgument(format!(
            "grid would exceed {MAX_GRID_POINTS} points"
        )));
    }
    let half = half as i64;
    let h = horizon / half as f64;
    Ok((-half..=half).map(|i| i as f64 * h).collect())
}

fn check_growth(rho: f64, t: f64) -> Result<()> {
    let growth = rho * t.abs();
    if growth > GROWTH_LIMIT * (1.0 + 1e-12) {
        return Err(HusError::HorizonTooLarge {
            growth,
            limit: GROWTH_LIMIT,
        });
    }
    Ok(())
}

fn five_point_derivative(f: impl Fn(f64) -> Vec2, t: f64, h: f64) -> Vec2 {
    let d = (-1.0) * f(t + 2.0 * h) + 8.0 * f(t + h) + (-8.0) * f(t - h) + f(t - 2.0 * h);
    (1.0 / (12.0 * h)) * d
}

fn near_switch(t: f64, period: f64, radius: f64) -> bool {
    let r = t.rem_euclid(period);
    r < radius || period - r < radius
}

#[derive(Debug, Clone)]
enum Forcing {
    Zero,
    Constant,
    /// `w = ε (A² + ω² I)⁻¹ dir`.
    Sinusoid {
        omega: f64,
        w: Vec2,
    },
    /// One full period: `φ((k+1)P) = E φ(kP) + s_k jump`. `ahead[k]` and
    /// `behind[k]` cache `φ(kP)` and `φ(−kP)`.
    SignSwitch {
        period: f64,
        forward: Mat2,
        backward: Mat2,
        jump: Vec2,
        ahead: Vec<Vec2>,
        behind: Vec<Vec2>,
    },
}

/// The solution of `φ' = Aφ + q`, `φ(0) = φ₀`, written through the
/// variation-of-constants integral evaluated in closed form.
#[derive(Debug, Clone)]
pub struct PerturbedTrajectory {
    m: Mat2,
    ec: EigenClass,
    spec: PerturbationSpec,
    phi0: Vec2,
    rho: f64,
    forcing: Forcing,
}

impl PerturbedTrajectory {
    pub fn new(m: &Mat2, spec: &PerturbationSpec, phi0: Vec2, tol: f64) -> Result<Self> {
        spec.validate()?;
        if !m.is_finite() || !phi0.is_finite() {
            return Err(HusError::NonFinite("trajectory input"));
        }
        let ec = classify(m, tol);
        let d = spec.direction();
        let eps = spec.epsilon;
        let forcing = match spec.family {
            Family::ConstantDir { .. } => Forcing::Constant,
            Family::Sinusoid { omega: 0.0, .. } => Forcing::Zero,
            Family::Sinusoid { omega, .. } => {
                let s = inverse2(&(*m * *m + (omega * omega) * Mat2::IDENTITY))
                    .map_err(|_| HusError::Resonant { omega })?;
                Forcing::Sinusoid {
                    omega,
                    w: eps * (s * d),
                }
            }
            Family::SignSwitch { period, .. } => {
                let rho = ec.spectral_abscissa();
                check_growth(rho, period)?;
                let forward = expm_with_class(m, &ec, period);
                let backward = expm_with_class(m, &ec, -period);
                let jump = eps * (integrated_expm(m, &ec, period) * d);
                let count = if rho > 0.0 {
                    ((GROWTH_LIMIT / (rho * period)).ceil() as usize).min(MAX_CACHED_NODES)
                } else {
                    0
                };
                let mut ahead = vec![phi0];
                let mut behind = vec![phi0];
                for j in 0..count {
                    let s = parity_sign(j as f64);
                    ahead.push(forward * ahead[j] + s * jump);
                    let s = parity_sign(-(j as f64) - 1.0);
                    behind.push(backward * (behind[j] - s * jump));
                }
                Forcing::SignSwitch {
                    period,
                    forward,
                    backward,
                    jump,
                    ahead,
                    behind,
                }
            }
        };
        Ok(PerturbedTrajectory {
            m: *m,
            ec,
            spec: *spec,
            phi0,
            rho: ec.spectral_abscissa(),
            forcing,
        })
    }

    pub fn eigen(&self) -> EigenClass {
        self.ec
    }

    pub fn spec(&self) -> &PerturbationSpec {
        &self.spec
    }

    pub fn phi(&self, t: f64) -> Result<Vec2> {
        check_growth(self.rho, t)?;
        Ok(self.phi_unchecked(t))
    }

    fn phi_unchecked(&self, t: f64) -> Vec2 {
        let d = self.spec.direction();
        let eps = self.spec.epsilon;
        let expm = |s: f64| expm_with_class(&self.m, &self.ec, s);
        match &self.forcing {
            Forcing::Zero => expm(t) * self.phi0,
            Forcing::Constant => {
                expm(t) * self.phi0 + eps * (integrated_expm(&self.m, &self.ec, t) * d)
            }
            &Forcing::Sinusoid { omega, w } => {
                // p(s) = −(sin(ωs) A + ω cos(ωs) I) w solves p' = Ap + q.
                let (sn, cs) = (omega * t).sin_cos();
                let p_t = -(sn * (self.m * w) + (omega * cs) * w);
                let p_0 = -(omega * w);
                expm(t) * (self.phi0 - p_0) + p_t
            }
            &Forcing::SignSwitch {
                period,
                forward,
                backward,
                jump,
                ref ahead,
                ref behind,
            } => {
                let k = (t / period).floor();
                let node = if k >= 0.0 {
                    let start = (k as usize).min(ahead.len() - 1);
                    let mut node = ahead[start];
                    for j in start as i64..k as i64 {
                        node = forward * node + parity_sign(j as f64) * jump;
                    }
                    node
                } else {
                    let start = ((-k) as usize).min(behind.len() - 1);
                    let mut node = behind[start];
                    for j in (k as i64..-(start as i64)).rev() {
                        node = backward * (node - parity_sign(j as f64) * jump);
                    }
                    node
                };
                let tau = t - k * period;
                expm(tau) * node
                    + (parity_sign(k) * eps) * (integrated_expm(&self.m, &self.ec, tau) * d)
            }
        }
    }

    /// `‖φ'(t) − Aφ(t) − q(t)‖∞ / max(1, ‖φ(t)‖∞, ‖Aφ(t)‖∞)` with `φ'` from a
    /// five-point stencil; `None` next to a sign switch, where `φ'` jumps.
    pub fn relative_residual(&self, t: f64) -> Option<f64> {
        let h = FD_STEP;
        if let Some(period) = self.spec.switch_period() {
            if near_switch(t, period, 2.5 * h) {
                return None;
            }
        }
        let phi = self.phi_unchecked(t);
        let a_phi = self.m * phi;
        let dphi = five_point_derivative(|s| self.phi_unchecked(s), t, h);
        let r = dphi - a_phi - self.spec.q(t);
        Some(r.inf_norm() / 1f64.max(phi.inf_norm()).max(a_phi.inf_norm()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiRecord {
    pub times: Vec<f64>,
    pub phi: Vec<Vec2>,
    /// Largest relative residual over the grid (see
    /// [`PerturbedTrajectory::relative_residual`]).
    pub residual_max: f64,
}

pub fn perturbed_trajectory(
    m: &Mat2,
    spec: &PerturbationSpec,
    phi0: Vec2,
    grid: &[f64],
    tol: f64,
) -> Result<PhiRecord> {
    let traj = PerturbedTrajectory::new(m, spec, phi0, tol)?;
    let phi = grid
        .iter()
        .map(|&t| traj.phi(t))
        .collect::<Result<Vec<_>>>()?;
    let residual_max = grid
        .iter()
        .filter_map(|&t| traj.relative_residual(t))
        .fold(0.0, f64::max);
    Ok(PhiRecord {
        times: grid.to_vec(),
        phi,
        residual_max,
    })
}

#[derive(Debug, Clone, Copy)]
enum ResponseKind {
    /// `p = −u`, `u = ε A⁻¹ d`.
    Constant {
        u: Vec2,
    },
    Sinusoid {
        omega: f64,
        w: Vec2,
    },
    /// `p(t) = s_k (e^{(τ−P/2)A} sech(PA/2) − I) u` on the k-th piece.
    SignSwitch {
        period: f64,
        sech: Mat2,
        u: Vec2,
    },
}

/// The unique bounded solution `p` of `p' = Ap + q` for a stable `A`.
///
/// Every solution is `e^{tA}c + p(t)`, so `φ − x = p` for the tracking
/// solution `x`; this is the deviation the certification measures.
#[derive(Debug, Clone)]
pub struct BoundedResponse {
    m: Mat2,
    ec: EigenClass,
    kind: ResponseKind,
}

impl BoundedResponse {
    pub fn new(m: &Mat2, spec: &PerturbationSpec, tol: f64) -> Result<Self> {
        spec.validate()?;
        let ec = classify(m, tol);
        if !is_hus_stable(m, &ec, tol).stable {
            return Err(HusError::NotStable);
        }
        let d = spec.direction();
        let eps = spec.epsilon;
        let kind = match spec.family {
            Family::ConstantDir { .. } => ResponseKind::Constant {
                u: eps * (inverse2(m)? * d),
            },
            Family::Sinusoid { omega, .. } => {
                let s = inverse2(&(*m * *m + (omega * omega) * Mat2::IDENTITY))
                    .map_err(|_| HusError::Resonant { omega })?;
                ResponseKind::Sinusoid {
                    omega,
                    w: eps * (s * d),
                }
            }
            Family::SignSwitch { period, .. } => {
                check_growth(ec.spectral_abscissa(), 0.5 * period)?;
                let half = 0.5 * period;
                let cosh2 = expm_with_class(m, &ec, half) + expm_with_class(m, &ec, -half);
                ResponseKind::SignSwitch {
                    period,
                    sech: 2.0 * inverse2(&cosh2)?,
                    u: eps * (inverse2(m)? * d),
                }
            }
        };
        Ok(BoundedResponse { m: *m, ec, kind })
    }

    pub fn at(&self, t: f64) -> Vec2 {
        match self.kind {
            ResponseKind::Constant { u } => -u,
            ResponseKind::Sinusoid { omega, w } => {
                let (sn, cs) = (omega * t).sin_cos();
                -(sn * (self.m * w) + (omega * cs) * w)
            }
            ResponseKind::SignSwitch { period, sech, u } => {
                let k = (t / period).floor();
                let offset = t - k * period - 0.5 * period;
                let shaped = expm_with_class(&self.m, &self.ec, offset) * (sech * u);
                parity_sign(k) * (shaped - u)
            }
        }
    }
}

/// Which improper integral defines the tracking solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Spectrum in the right half-plane: `x₀ = φ₀ + ∫₀^∞ e^{−sA} q(s) ds`.
    Forward,
    /// Spectrum in the left half-plane: `x₀ = φ₀ − ∫_{−∞}^0 e^{−sA} q(s) ds`.
    Backward,
    /// Saddle: forward integral on the unstable projection, backward on the
    /// stable one.
    Split,
}

#[derive(Debug, Clone)]
pub struct TrackingSolution {
    pub x0: Vec2,
    pub construction: Construction,
    m: Mat2,
    ec: EigenClass,
    /// Saddle components `(A1 x1, A2 x2)` with their eigenvalues.
    split: Option<(f64, Vec2, f64, Vec2)>,
}

impl TrackingSolution {
    pub fn x(&self, t: f64) -> Vec2 {
        match self.split {
            Some((l1, y1, l2, y2)) => (l1 * t).exp() * y1 + (l2 * t).exp() * y2,
            None => expm_with_class(&self.m, &self.ec, t) * self.x0,
        }
    }
}

/// `∫₀^∞ e^{−sA} q̂(s) ds` for the unit-amplitude forcing shape `q̂`, where
/// the spectrum of `A` lies in the right half-plane.
fn forward_transform(m: &Mat2, ec: &EigenClass, family: &Family) -> Result<Mat2> {
    match *family {
        Family::ConstantDir { .. } => inverse2(m),
        Family::Sinusoid { omega, .. } => {
            let s = inverse2(&(*m * *m + (omega * omega) * Mat2::IDENTITY))
                .map_err(|_| HusError::Resonant { omega })?;
            Ok(omega * s)
        }
        Family::SignSwitch { period, .. } => {
            // Sum over periods: Σ (−1)^k F^k · A⁻¹(I − F), F = e^{−PA}.
            let f = expm_with_class(m, ec, -period);
            Ok(inverse2(&(Mat2::IDENTITY + f))? * inverse2(m)? * (Mat2::IDENTITY - f))
        }
    }
}

/// `∫_{−∞}^0 e^{−sA} q̂(s) ds` for a spectrum in the left half-plane.
fn backward_transform(m: &Mat2, ec: &EigenClass, family: &Family) -> Result<Mat2> {
    match *family {
        Family::ConstantDir { .. } => Ok(-inverse2(m)?),
        Family::Sinusoid { omega, .. } => {
            let s = inverse2(&(*m * *m + (omega * omega) * Mat2::IDENTITY))
                .map_err(|_| HusError::Resonant { omega })?;
            Ok(-omega * s)
        }
        Family::SignSwitch { period, .. } => {
            // σ(−u) = −σ(u) off the switch points; E = e^{PA} decays.
            let e = expm_with_class(m, ec, period);
            Ok(-(inverse2(&(Mat2::IDENTITY + e))? * inverse2(m)? * (e - Mat2::IDENTITY)))
        }
    }
}

/// Scalar versions of the two transforms for a single eigenvalue `λ`.
fn forward_scalar(lambda: f64, family: &Family) -> f64 {
    match *family {
        Family::ConstantDir { .. } => 1.0 / lambda,
        Family::Sinusoid { omega, .. } => omega / (lambda * lambda + omega * omega),
        Family::SignSwitch { period, .. } => {
            let f = (-period * lambda).exp();
            (1.0 - f) / ((1.0 + f) * lambda)
        }
    }
}

fn backward_scalar(lambda: f64, family: &Family) -> f64 {
    match *family {
        Family::ConstantDir { .. } => -1.0 / lambda,
        Family::Sinusoid { omega, .. } => -omega / (lambda * lambda + omega * omega),
        Family::SignSwitch { period, .. } => {
            let e = (period * lambda).exp();
            -(e - 1.0) / ((1.0 + e) * lambda)
        }
    }
}

/// The exact solution that stays within `Kε` of the perturbed trajectory.
pub fn tracking_solution(
    m: &Mat2,
    spec: &PerturbationSpec,
    phi0: Vec2,
    tol: f64,
) -> Result<TrackingSolution> {
    spec.validate()?;
    let ec = classify(m, tol);
    if !is_hus_stable(m, &ec, tol).stable {
        return Err(HusError::NotStable);
    }
    let eq = spec.epsilon * spec.direction();
    let [r1, r2] = ec.real_parts();
    if r1 > 0.0 && r2 > 0.0 {
        let x0 = phi0 + forward_transform(m, &ec, &spec.family)? * eq;
        return Ok(TrackingSolution {
            x0,
            construction: Construction::Forward,
            m: *m,
            ec,
            split: None,
        });
    }
    if r1 < 0.0 && r2 < 0.0 {
        let x0 = phi0 - backward_transform(m, &ec, &spec.family)? * eq;
        return Ok(TrackingSolution {
            x0,
            construction: Construction::Backward,
            m: *m,
            ec,
            split: None,
        });
    }
    let EigenClass::RealDistinct { lambda1, lambda2 } = ec else {
        unreachable!("mixed real-part signs imply distinct real eigenvalues");
    };
    let proj = spectral_projections(m, &ec)?;
    let x1 = phi0 + forward_scalar(lambda1, &spec.family) * eq;
    let x2 = phi0 - backward_scalar(lambda2, &spec.family) * eq;
    let y1 = proj.first * x1;
    let y2 = proj.second * x2;
    Ok(TrackingSolution {
        x0: y1 + y2,
        construction: Construction::Split,
        m: *m,
        ec,
        split: Some((lambda1, y1, lambda2, y2)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub phi: Vec<Vec2>,
    pub x: Vec<Vec2>,
    /// `‖φ(t) − x(t)‖∞`, evaluated through the bounded response.
    pub deviation: Vec<f64>,
    pub sup_deviation: f64,
    pub residual_max: f64,
    /// Largest `‖(φ − x) − p‖∞ / (ε max(1, ‖e^{tA}‖∞) max(1, ‖φ₀‖∞/ε))`:
    /// agreement between the direct difference and the closed form.
    pub consistency: f64,
}

/// Perturbed trajectory together with its tracking solution on `grid`.
///
/// `φ − x` is reported from the bounded response `p`: both `φ` and `x` grow
/// like `e^{|Re λ| |t|}`, so their raw difference loses all digits far from
/// `t = 0`, while `p` is the same function without the cancellation. The
/// raw difference is kept as the `consistency` cross-check.
pub fn tracked_trajectory(
    m: &Mat2,
    spec: &PerturbationSpec,
    phi0: Vec2,
    grid: &[f64],
    tol: f64,
) -> Result<TrajectoryRecord> {
    let traj = PerturbedTrajectory::new(m, spec, phi0, tol)?;
    let track = tracking_solution(m, spec, phi0, tol)?;
    let response = BoundedResponse::new(m, spec, tol)?;
    let ec = traj.eigen();
    let scale = spec.epsilon * 1f64.max(phi0.inf_norm() / spec.epsilon);

    let n = grid.len();
    let mut rec = TrajectoryRecord {
        times: grid.to_vec(),
        phi: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        deviation: Vec::with_capacity(n),
        sup_deviation: 0.0,
        residual_max: 0.0,
        consistency: 0.0,
    };
    for &t in grid {
        let phi = traj.phi(t)?;
        let x = track.x(t);
        let p = response.at(t);
        let growth = 1f64.max(mat_inf_norm(&expm_with_class(m, &ec, t)));
        let dev = p.inf_norm();
        rec.consistency = rec
            .consistency
            .max(((phi - x) - p).inf_norm() / (scale * growth));
        rec.sup_deviation = rec.sup_deviation.max(dev);
        if let Some(r) = traj.relative_residual(t) {
            rec.residual_max = rec.residual_max.max(r);
        }
        rec.phi.push(phi);
        rec.x.push(x);
        rec.deviation.push(dev);
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationRun {
    pub spec: PerturbationSpec,
    pub sup_deviation: f64,
    /// `sup_deviation / ε`.
    pub ratio: f64,
    pub argmax: f64,
    /// `‖A‖∞ · sup · step + ε · step`, the allowance for excursions between
    /// grid points.
    pub slack: f64,
    pub threshold: f64,
    pub pass: bool,
    pub consistency: f64,
    pub residual_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationSummary {
    pub runs: Vec<CertificationRun>,
    /// Horizon actually used after the growth clamp.
    pub horizon: f64,
    pub step: f64,
    pub all_pass: bool,
}

impl CertificationSummary {
    pub fn max_ratio(&self) -> f64 {
        self.runs.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// Relative slack on `Kε` in the pass test.
pub const CERT_REL_TOL: f64 = 1e-8;
/// Absolute slack on `Kε` in the pass test.
pub const CERT_ABS_TOL: f64 = 1e-12;

/// Checks `sup_t ‖φ(t) − x(t)‖∞ ≤ Kε` for every spec on a symmetric grid.
///
/// The horizon is clamped to `GROWTH_LIMIT / max|Re λ|`. Specs run in
/// parallel; the trajectory starts from `φ(0) = 0`, which does not affect the
/// deviation.
pub fn certify(
    m: &Mat2,
    specs: &[PerturbationSpec],
    report: &StabilityReport,
    horizon: f64,
    step: f64,
    tol: f64,
) -> Result<CertificationSummary> {
    let k = match (report.stable, report.k_reported) {
        (true, Some(k)) => k,
        _ => return Err(HusError::NotStable),
    };
    let rho = report.eigen.spectral_abscissa();
    let horizon = if rho > 0.0 {
        horizon.min(GROWTH_LIMIT / rho)
    } else {
        horizon
    };
    let grid = symmetric_grid(horizon, step)?;
    let norm_a = mat_inf_norm(m);

    let runs = specs
        .par_iter()
        .map(|spec| certify_one(m, spec, k, norm_a, &grid, step, tol))
        .collect::<Result<Vec<_>>>()?;
    let all_pass = runs.iter().all(|r| r.pass);
    Ok(CertificationSummary {
        runs,
        horizon,
        step,
        all_pass,
    })
}

fn certify_one(
    m: &Mat2,
    spec: &PerturbationSpec,
    k: f64,
    norm_a: f64,
    grid: &[f64],
    step: f64,
    tol: f64,
) -> Result<CertificationRun> {
    let rec = tracked_trajectory(m, spec, Vec2::ZERO, grid, tol)?;
    let response = BoundedResponse::new(m, spec, tol)?;
    let (imax, mut sup) =
        rec.deviation
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, d)| {
                if d > best.1 {
                    (i, d)
                } else {
                    best
                }
            });
    let mut argmax = grid[imax];
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    for t in [argmax - 0.5 * step, argmax + 0.5 * step] {
        if t >= lo && t <= hi {
            let d = response.at(t).inf_norm();
            if d > sup {
                sup = d;
                argmax = t;
            }
        }
    }
    let eps = spec.epsilon;
    let slack = norm_a * sup * step + eps * step;
    let threshold = k * eps * (1.0 + CERT_REL_TOL) + CERT_ABS_TOL + slack;
    Ok(CertificationRun {
        spec: *spec,
        sup_deviation: sup,
        ratio: sup / eps,
        argmax,
        slack,
        threshold,
        pass: sup <= threshold,
        consistency: rec.consistency,
        residual_max: rec.residual_max,
    })
}

/// The three families along one direction, with the given sinusoid
/// frequency and switch period.
pub fn standard_specs(epsilon: f64, dir: Vec2, omega: f64, period: f64) -> Vec<PerturbationSpec> {
    vec![
        PerturbationSpec::constant(epsilon, dir),
        PerturbationSpec::sinusoid(epsilon, omega, dir),
        PerturbationSpec::sign_switch(epsilon, period, dir),
    ]
}
