//! `x'' − (λ1 + λ2)x' + λ1λ2 x = 0` reduced to a 2×2 system, with the
//! closed-form constants of the reduced systems checked against the general
//! stability analysis.

use serde::Serialize;

use crate::error::{HusError, Result};
use crate::harness::{standard_specs, PerturbationSpec};
use crate::linalg::{Mat2, Vec2};
use crate::stability::{analyze, CaseLabel, StabilityReport};

/// Agreement required between a reduced-system formula and the general
/// candidate it specializes.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Roots {
    Real {
        lambda1: f64,
        lambda2: f64,
    },
    /// `α ± iβ` with `β > 0`.
    Complex {
        alpha: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Substitution {
    /// `u = x'`: `A = [[0, 1], [−λ1λ2, λ1 + λ2]]`.
    #[default]
    Direct,
    /// `u = x' − λ1 x`: `A = [[λ1, 1], [0, λ2]]`. Root order matters.
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderProblem {
    pub roots: Roots,
    pub substitution: Substitution,
}

impl SecondOrderProblem {
    pub fn validate(&self) -> Result<()> {
        match (self.roots, self.substitution) {
            (Roots::Complex { .. }, Substitution::Triangular) => {
                Err(HusError::IncompatibleSubstitution)
            }
            (Roots::Complex { alpha, beta }, _) if !(alpha.is_finite() && beta.is_finite()) => {
                Err(HusError::NonFinite("roots"))
            }
            (Roots::Complex { beta, .. }, _) if beta <= 0.0 => {
                Err(HusError::InvalidArgument("beta must be positive".into()))
            }
            (Roots::Real { lambda1, lambda2 }, _)
                if !(lambda1.is_finite() && lambda2.is_finite()) =>
            {
                Err(HusError::NonFinite("roots"))
            }
            _ => Ok(()),
        }
    }
}

pub fn companion(problem: &SecondOrderProblem) -> Result<Mat2> {
    problem.validate()?;
    Ok(match (problem.roots, problem.substitution) {
        (Roots::Real { lambda1, lambda2 }, Substitution::Direct) => {
            Mat2::new(0.0, 1.0, -lambda1 * lambda2, lambda1 + lambda2)
        }
        (Roots::Complex { alpha, beta }, Substitution::Direct) => {
            Mat2::new(0.0, 1.0, -(alpha * alpha + beta * beta), 2.0 * alpha)
        }
        (Roots::Real { lambda1, lambda2 }, Substitution::Triangular) => {
            Mat2::new(lambda1, 1.0, 0.0, lambda2)
        }
        (Roots::Complex { .. }, Substitution::Triangular) => unreachable!("rejected by validate"),
    })
}

/// Root pattern for which a reduced-system closed form exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedFormula {
    DirectComplex,
    DirectRepeatedPositive,
    DirectSaddle,
    DirectDistinctPositive,
    TriangularRepeatedPositive,
    TriangularSameSign,
    TriangularSaddle,
}

impl ReducedFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReducedFormula::DirectComplex => "direct_complex",
            ReducedFormula::DirectRepeatedPositive => "direct_repeated_positive",
            ReducedFormula::DirectSaddle => "direct_saddle",
            ReducedFormula::DirectDistinctPositive => "direct_distinct_positive",
            ReducedFormula::TriangularRepeatedPositive => "triangular_repeated_positive",
            ReducedFormula::TriangularSameSign => "triangular_same_sign",
            ReducedFormula::TriangularSaddle => "triangular_saddle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub formula: ReducedFormula,
    pub compared_with: CaseLabel,
    pub formula_value: f64,
    pub general_value: f64,
    pub abs_diff: f64,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.abs_diff < CROSS_CHECK_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderReport {
    pub problem: SecondOrderProblem,
    pub matrix: Mat2,
    pub report: StabilityReport,
    /// `None` when the root pattern has no reduced closed form or the
    /// equation is not stable.
    pub cross_check: Option<CrossCheck>,
}

/// Positive root of `λ² + (2/e − 2)λ − 1 = 0`, where the two branches of the
/// repeated-root constant meet.
pub fn repeated_root_threshold() -> f64 {
    let e = std::f64::consts::E;
    let f = |l: f64| l * l + (2.0 / e - 2.0) * l - 1.0;
    let (mut lo, mut hi) = (1.0, 3.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let closed = repeated_root_threshold_closed_form();
    assert!(
        (root - closed).abs() < 1e-12,
        "bisection {root} vs {closed}"
    );
    root
}

/// `(e − 1)/e + √(1 − 2e + 2e²)/e`.
pub fn repeated_root_threshold_closed_form() -> f64 {
    let e = std::f64::consts::E;
    (e - 1.0) / e + (1.0 - 2.0 * e + 2.0 * e * e).sqrt() / e
}

/// Piecewise constant for `x'' − 2λx' + λ²x = 0`, `λ > 0`, direct substitution.
pub fn direct_repeated_constant(lambda: f64) -> f64 {
    let e = std::f64::consts::E;
    if lambda < repeated_root_threshold_closed_form() {
        (2.0 * lambda + 1.0) / (lambda * lambda)
    } else {
        (lambda + 2.0 / e) / lambda
    }
}

fn reduced_formula(problem: &SecondOrderProblem) -> Option<(ReducedFormula, CaseLabel, f64)> {
    match (problem.roots, problem.substitution) {
        (Roots::Complex { alpha, beta }, Substitution::Direct) if alpha != 0.0 => {
            let r2 = alpha * alpha + beta * beta;
            let k =
                (beta * beta + (alpha.abs() + r2.max(1.0)).powi(2)).sqrt() / (alpha.abs() * beta);
            Some((ReducedFormula::DirectComplex, CaseLabel::Complex, k))
        }
        (Roots::Real { lambda1, lambda2 }, Substitution::Direct) => {
            let (l1, l2) = (lambda1.max(lambda2), lambda1.min(lambda2));
            if l1 == l2 && l1 > 0.0 {
                Some((
                    ReducedFormula::DirectRepeatedPositive,
                    CaseLabel::RepeatedPositive,
                    direct_repeated_constant(l1),
                ))
            } else if l1 > 0.0 && l2 < 0.0 {
                let (a1, a2) = (l1.abs(), l2.abs());
                let k = (a2 * (a2 + 1.0) * a1.max(1.0) + a1 * (a1 + 1.0) * a2.max(1.0))
                    / (a1 * a2 * (l1 - l2));
                Some((ReducedFormula::DirectSaddle, CaseLabel::Projection, k))
            } else if l1 > l2 && l2 > 0.0 {
                let p = l1 * l2;
                let k =
                    ((l1 + l2 + 1.0) / p).max((p + 2.0 * l2 * (l1 / l2).powf(-l2 / (l1 - l2))) / p);
                Some((
                    ReducedFormula::DirectDistinctPositive,
                    CaseLabel::SameSignBelow,
                    k,
                ))
            } else {
                None
            }
        }
        (
            Roots::Real {
                lambda1: l1,
                lambda2: l2,
            },
            Substitution::Triangular,
        ) => {
            if l1 == l2 && l1 > 0.0 {
                Some((
                    ReducedFormula::TriangularRepeatedPositive,
                    CaseLabel::RepeatedPositive,
                    (1.0 + l1) / (l1 * l1),
                ))
            } else if (l1 > l2 && l2 > 0.0) || (0.0 > l1 && l1 > l2) {
                // ‖A⁻¹‖∞ for A⁻¹ = [[1/λ1, −1/(λ1λ2)], [0, 1/λ2]].
                let k = ((l2.abs() + 1.0) / (l1 * l2).abs()).max(1.0 / l2.abs());
                Some((
                    ReducedFormula::TriangularSameSign,
                    CaseLabel::SameSignAtUpper,
                    k,
                ))
            } else if l1 > 0.0 && 0.0 > l2 {
                let gap = l1 - l2;
                let k =
                    (l2.abs() * (gap + 1.0) + l1.abs() * gap.max(1.0)) / ((l1 * l2).abs() * gap);
                Some((ReducedFormula::TriangularSaddle, CaseLabel::Projection, k))
            } else {
                None
            }
        }
        _ => None,
    }
}

pub fn second_order_report(problem: &SecondOrderProblem, tol: f64) -> Result<SecondOrderReport> {
    let matrix = companion(problem)?;
    let report = analyze(&matrix, tol)?;
    let cross_check = if report.stable {
        reduced_formula(problem).and_then(|(formula, label, formula_value)| {
            let general_value = report.candidate(label)?;
            Some(CrossCheck {
                formula,
                compared_with: label,
                formula_value,
                general_value,
                abs_diff: (formula_value - general_value).abs(),
            })
        })
    } else {
        None
    };
    Ok(SecondOrderReport {
        problem: *problem,
        matrix,
        report,
        cross_check,
    })
}

/// Perturbations of the scalar equation, `q(t) → (0, q(t))` in the reduced
/// system.
pub fn scalar_specs(epsilon: f64, omega: f64, period: f64) -> Vec<PerturbationSpec> {
    standard_specs(epsilon, Vec2::new(0.0, 1.0), omega, period)
}
