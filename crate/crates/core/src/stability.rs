//! Stability verdict, Hyers-Ulam constants and the `‖A⁻¹‖∞` lower bound.
//!
//! `x' = Ax` is Hyers-Ulam stable exactly when no eigenvalue of `A` has zero
//! real part. For stable systems every applicable closed-form constant is
//! collected as a [`KCandidate`]; the reported constant is their minimum.

use serde::Serialize;

use crate::error::{HusError, Result};
use crate::linalg::{classify, inverse2, mat_inf_norm, EigenClass, Mat2, Vec2};

/// Absolute slack used when comparing a constant against the lower bound.
pub const BOUND_MATCH_TOL: f64 = 1e-9;

/// Which closed-form constant produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Real same-sign spectrum with `λ1 > a > λ2`.
    SameSignBetween,
    /// Real same-sign spectrum with `λ1 > λ2 > a`.
    SameSignBelow,
    /// Real same-sign spectrum with `a > λ1 > λ2`.
    SameSignAbove,
    /// Real same-sign spectrum with `a = λ1` (so `bc = 0`).
    SameSignAtUpper,
    /// Real same-sign spectrum with `a = λ2` (so `bc = 0`).
    SameSignAtLower,
    RepeatedPositive,
    RepeatedNegative,
    /// Spectral-projection constant for distinct nonzero real eigenvalues.
    Projection,
    /// Complex pair with nonzero real part.
    Complex,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::SameSignBetween => "same_sign_between",
            CaseLabel::SameSignBelow => "same_sign_below",
            CaseLabel::SameSignAbove => "same_sign_above",
            CaseLabel::SameSignAtUpper => "same_sign_at_upper",
            CaseLabel::SameSignAtLower => "same_sign_at_lower",
            CaseLabel::RepeatedPositive => "repeated_positive",
            CaseLabel::RepeatedNegative => "repeated_negative",
            CaseLabel::Projection => "projection",
            CaseLabel::Complex => "complex",
        }
    }

    /// All labels, in a fixed order (used by the C ABI for integer codes).
    pub const ALL: [CaseLabel; 9] = [
        CaseLabel::SameSignBetween,
        CaseLabel::SameSignBelow,
        CaseLabel::SameSignAbove,
        CaseLabel::SameSignAtUpper,
        CaseLabel::SameSignAtLower,
        CaseLabel::RepeatedPositive,
        CaseLabel::RepeatedNegative,
        CaseLabel::Projection,
        CaseLabel::Complex,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KCandidate {
    pub label: CaseLabel,
    pub value: f64,
}

/// Why the reported constant is known to be minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BestRule {
    /// Distinct same-sign eigenvalues with `λ1 ≥ a ≥ λ2`.
    DistinctSameSignABetween,
    /// Repeated nonzero eigenvalue with `λ = a`.
    RepeatedLambdaEqA,
    /// Outside both rules, but the reported constant equals `‖A⁻¹‖∞`, which
    /// no valid constant can undercut.
    BoundsMeet,
}

impl BestRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            BestRule::DistinctSameSignABetween => "distinct_same_sign_a_between",
            BestRule::RepeatedLambdaEqA => "repeated_lambda_eq_a",
            BestRule::BoundsMeet => "bounds_meet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub stable: bool,
    /// Some real part sits inside the zero band.
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub matrix: Mat2,
    pub eigen: EigenClass,
    pub stable: bool,
    pub marginal: bool,
    pub candidates: Vec<KCandidate>,
    pub k_reported: Option<f64>,
    pub lower_bound: Option<f64>,
    pub best_attained: bool,
    pub best_rule: Option<BestRule>,
}

impl StabilityReport {
    pub fn candidate(&self, label: CaseLabel) -> Option<f64> {
        self.candidates
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.value)
    }
}

/// Half-width of the band around zero inside which a real part counts as zero.
pub fn zero_band(m: &Mat2, tol: f64) -> f64 {
    tol * 1f64.max(mat_inf_norm(m))
}

fn equality_band(m: &Mat2, tol: f64) -> f64 {
    tol * 1f64.max(mat_inf_norm(m))
}

pub fn is_hus_stable(m: &Mat2, ec: &EigenClass, tol: f64) -> Verdict {
    let band = zero_band(m, tol);
    let marginal = ec.real_parts().iter().any(|r| r.abs() <= band);
    Verdict {
        stable: !marginal,
        marginal,
    }
}

/// Constant for real nonzero eigenvalues of one sign (distinct or repeated).
///
/// The branch is selected by where `a = a11` sits relative to the spectrum;
/// the boundary branches all reduce to `‖A⁻¹‖∞`.
pub fn k_same_sign(m: &Mat2, ec: &EigenClass, tol: f64) -> Result<KCandidate> {
    let (a, b, c) = (m.a11, m.a12.abs(), m.a21.abs());
    let near = equality_band(m, tol);
    match *ec {
        EigenClass::RealDistinct {
            lambda1: l1,
            lambda2: l2,
        } => {
            let p = l1 * l2;
            if p <= 0.0 {
                return Err(HusError::CaseMismatch(
                    "same-sign constant needs eigenvalues of one sign",
                ));
            }
            let gap = l1 - l2;
            let inv_norm = || inverse2(m).map(|inv| mat_inf_norm(&inv));
            let (label, value) = if (a - l1).abs() <= near {
                (CaseLabel::SameSignAtUpper, inv_norm()?)
            } else if (a - l2).abs() <= near {
                (CaseLabel::SameSignAtLower, inv_norm()?)
            } else if a < l1 && a > l2 {
                (CaseLabel::SameSignBetween, inv_norm()?)
            } else if l2 > 0.0 {
                if a < l2 {
                    let pw = ((l1 - a) / (l2 - a)).powf(-l2 / gap);
                    let r1 = (l1 + l2 + b - a) / p;
                    let r2 = (a + c + 2.0 * (l2 - a) * pw) / p;
                    (CaseLabel::SameSignBelow, r1.max(r2))
                } else {
                    let pw = ((a - l2) / (a - l1)).powf(-l2 / gap);
                    let r1 = (l1 + l2 + b - a + 2.0 * (a - l1) * pw) / p;
                    let r2 = (a + c) / p;
                    (CaseLabel::SameSignAbove, r1.max(r2))
                }
            } else if a < l2 {
                let pw = ((l1 - a) / (l2 - a)).powf(l2 / gap);
                let r1 = (l1.abs() + l2.abs() + a + b + 2.0 * (l1 - a) * pw) / p;
                let r2 = (a.abs() + c) / p;
                (CaseLabel::SameSignBelow, r1.max(r2))
            } else {
                let pw = ((a - l1) / (a - l2)).powf(-l2 / gap);
                let r1 = (l1.abs() + l2.abs() + a + b) / p;
                let r2 = (-a + c + 2.0 * (a - l2) * pw) / p;
                (CaseLabel::SameSignAbove, r1.max(r2))
            };
            Ok(KCandidate { label, value })
        }
        EigenClass::RealRepeated { lambda, eta } => {
            if lambda.abs() <= zero_band(m, tol) {
                return Err(HusError::CaseMismatch(
                    "repeated eigenvalue must be nonzero",
                ));
            }
            let label = if lambda > 0.0 {
                CaseLabel::RepeatedPositive
            } else {
                CaseLabel::RepeatedNegative
            };
            let l = lambda.abs();
            let sq = lambda * lambda;
            let e = eta.abs();
            // Every off-boundary branch carries the same decaying factor e^{-|λ|/|η|}.
            let value = if e <= near {
                mat_inf_norm(&inverse2(m)?)
            } else {
                let tail = e * (-1.0 + 2.0 * (-l / e).exp());
                let (first, second) = match (lambda > 0.0, eta > 0.0) {
                    (true, true) => (l + e + b, l + c + tail),
                    (true, false) => (l + e + c, l + b + tail),
                    (false, true) => (l + e + c, l + b + tail),
                    (false, false) => (l + e + b, l + c + tail),
                };
                first.max(second) / sq
            };
            Ok(KCandidate { label, value })
        }
        EigenClass::ComplexPair { .. } => Err(HusError::CaseMismatch(
            "same-sign constant needs real eigenvalues",
        )),
    }
}

/// Projection-based constant, valid for any distinct nonzero real pair
/// (including opposite signs).
pub fn k_projection(m: &Mat2, ec: &EigenClass) -> Result<KCandidate> {
    let EigenClass::RealDistinct {
        lambda1: l1,
        lambda2: l2,
    } = *ec
    else {
        return Err(HusError::CaseMismatch(
            "projection constant needs distinct real eigenvalues",
        ));
    };
    if l1 == 0.0 || l2 == 0.0 {
        return Err(HusError::CaseMismatch(
            "projection constant needs nonzero eigenvalues",
        ));
    }
    let (a, b, c) = (m.a11, m.a12.abs(), m.a21.abs());
    let row1 = ((a - l2).abs() + b).max(c + (l1 - a).abs());
    let row2 = ((l1 - a).abs() + b).max(c + (a - l2).abs());
    let value = (l2.abs() * row1 + l1.abs() * row2) / ((l1 * l2).abs() * (l1 - l2));
    Ok(KCandidate {
        label: CaseLabel::Projection,
        value,
    })
}

pub fn k_complex(m: &Mat2, ec: &EigenClass, tol: f64) -> Result<KCandidate> {
    let EigenClass::ComplexPair { alpha, beta } = *ec else {
        return Err(HusError::CaseMismatch(
            "complex constant needs a complex pair",
        ));
    };
    if alpha.abs() <= zero_band(m, tol) {
        return Err(HusError::CaseMismatch("real part of the pair is zero"));
    }
    let shear = (m.a11 - alpha).abs() + m.a12.abs().max(m.a21.abs());
    let value = (beta * beta + shear * shear).sqrt() / (alpha.abs() * beta);
    Ok(KCandidate {
        label: CaseLabel::Complex,
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `‖A⁻¹‖∞`.
    pub bound: f64,
    /// Sign vector `e` with `‖A⁻¹e‖∞ = ‖A⁻¹‖∞`.
    pub maximizer: Vec2,
}

pub fn lower_bound(m: &Mat2) -> Result<LowerBound> {
    let inv = inverse2(m)?;
    let r1 = inv.a11.abs() + inv.a12.abs();
    let r2 = inv.a21.abs() + inv.a22.abs();
    let sgn = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
    let (bound, maximizer) = if r1 >= r2 {
        (r1, Vec2::new(sgn(inv.a11), sgn(inv.a12)))
    } else {
        (r2, Vec2::new(sgn(inv.a21), sgn(inv.a22)))
    };
    Ok(LowerBound { bound, maximizer })
}

/// Decides whether `‖A⁻¹‖∞` is known to be the minimal constant.
///
/// `k_reported` enables the [`BestRule::BoundsMeet`] fallback; pass `None` to
/// test only the two structural rules.
pub fn best_constant_check(
    m: &Mat2,
    ec: &EigenClass,
    k_reported: Option<f64>,
    tol: f64,
) -> Option<BestRule> {
    let near = equality_band(m, tol);
    let zero = zero_band(m, tol);
    let a = m.a11;
    let structural = match *ec {
        EigenClass::RealDistinct { lambda1, lambda2 } => (lambda1.abs() > zero
            && lambda2.abs() > zero
            && lambda1 * lambda2 > 0.0
            && a <= lambda1 + near
            && a >= lambda2 - near)
            .then_some(BestRule::DistinctSameSignABetween),
        EigenClass::RealRepeated { lambda, eta } => {
            (lambda.abs() > zero && eta.abs() <= near).then_some(BestRule::RepeatedLambdaEqA)
        }
        EigenClass::ComplexPair { .. } => None,
    };
    structural.or_else(|| {
        let k = k_reported?;
        let lb = lower_bound(m).ok()?.bound;
        ((k - lb).abs() <= BOUND_MATCH_TOL * lb.max(1.0)).then_some(BestRule::BoundsMeet)
    })
}

/// Full analysis: classification, verdict, candidates, lower bound, best flag.
pub fn analyze(m: &Mat2, tol: f64) -> Result<StabilityReport> {
    if !m.is_finite() {
        return Err(HusError::NonFinite("matrix entries"));
    }
    let eigen = classify(m, tol);
    let verdict = is_hus_stable(m, &eigen, tol);
    let mut report = StabilityReport {
        matrix: *m,
        eigen,
        stable: verdict.stable,
        marginal: verdict.marginal,
        candidates: Vec::new(),
        k_reported: None,
        lower_bound: None,
        best_attained: false,
        best_rule: None,
    };
    if !verdict.stable {
        return Ok(report);
    }

    let mut candidates = Vec::with_capacity(2);
    match eigen {
        EigenClass::RealDistinct { lambda1, lambda2 } => {
            if lambda1 * lambda2 > 0.0 {
                candidates.push(k_same_sign(m, &eigen, tol)?);
            }
            candidates.push(k_projection(m, &eigen)?);
        }
        EigenClass::RealRepeated { .. } => candidates.push(k_same_sign(m, &eigen, tol)?),
        EigenClass::ComplexPair { .. } => candidates.push(k_complex(m, &eigen, tol)?),
    }
    let k = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    let bound = lower_bound(m)?;
    let rule = best_constant_check(m, &eigen, Some(k), tol);

    report.candidates = candidates;
    report.k_reported = Some(k);
    report.lower_bound = Some(bound.bound);
    report.best_attained = rule.is_some();
    report.best_rule = rule;
    Ok(report)
}
