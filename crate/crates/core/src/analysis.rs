//! Violation amount, range, factor and white-noise tolerances.
//!
//! Every noisy value is affine in the noise fraction `p`, so the tolerances
//! are solved in closed form.
//!
//! Two tolerance readings exist for an equality pair `(E, E_c)`:
//!
//! * pinned: the local value of `E` stays at its noiseless benchmark
//!   `1 - |E_c|` while noise degrades the quantum value of `E`;
//! * strict: the violation ends once the noisy `E_c` is no longer negative.
//!
//! Both are computed and reported; neither is treated as the definitive one.

use serde::{Deserialize, Serialize};

use crate::bell::{local_bounds, verify_complement, BellExpression, LocalBounds};
use crate::error::{domain, Result};
use crate::formats::FORMAT_VERSION;
use crate::quantum::{mix, quantum_value, white_noise_value, QuantumSettings};

/// Reference values quoted from the literature, reported but never recomputed.
pub mod reference {
    /// Best `<33|33>` violation with a maximally entangled state.
    pub const MAX_ENTANGLED_33_VIOLATION: f64 = 0.87293;
    /// Matching white-noise tolerance.
    pub const MAX_ENTANGLED_33_TOLERANCE: f64 = 0.30385;
    /// Best `<55|55>` violation with a maximally entangled state.
    pub const MAX_ENTANGLED_55_VIOLATION: f64 = 0.91054;
    /// Matching white-noise tolerance.
    pub const MAX_ENTANGLED_55_TOLERANCE: f64 = 0.31284;
}

/// How the range of violation is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationMode {
    /// Width of the local interval, `upper - lower`.
    Inequality,
    /// The exact local value `1 - |E_c|` fixed by the complement.
    Equality,
}

/// Signed distance of `value` outside `bounds`; positive means a violation.
pub fn inequality_margin(value: f64, bounds: LocalBounds) -> f64 {
    (value - bounds.upper).max(bounds.lower - value)
}

/// `max(0, q - upper, lower - q)`.
pub fn violation_amount(expr: &BellExpression, s: &QuantumSettings) -> Result<f64> {
    let q = quantum_value(expr, s)?;
    Ok(inequality_margin(q, local_bounds(expr)).max(0.0))
}

fn require_pair(e: &BellExpression, ec: &BellExpression) -> Result<()> {
    if !verify_complement(e, ec)? {
        return Err(domain("expressions are not complements of each other"));
    }
    Ok(())
}

/// Local value of `E` forced by the complement: `1 - |E_c|`.
pub fn equality_benchmark(complement_value: f64) -> f64 {
    1.0 - complement_value.abs()
}

/// `|E - (1 - |E_c|)|` for a complementary pair.
pub fn equality_violation_amount(
    e: &BellExpression,
    ec: &BellExpression,
    s: &QuantumSettings,
) -> Result<f64> {
    require_pair(e, ec)?;
    let qe = quantum_value(e, s)?;
    let qc = quantum_value(ec, s)?;
    Ok((qe - equality_benchmark(qc)).abs())
}

/// Range of violation `R`.
pub fn violation_range(
    expr: &BellExpression,
    mode: ViolationMode,
    complement: Option<&BellExpression>,
    settings: Option<&QuantumSettings>,
) -> Result<f64> {
    match mode {
        ViolationMode::Inequality => Ok(local_bounds(expr).range()),
        ViolationMode::Equality => {
            let ec = complement.ok_or_else(|| domain("equality range needs the complement"))?;
            let s = settings.ok_or_else(|| domain("equality range needs quantum settings"))?;
            require_pair(expr, ec)?;
            Ok(equality_benchmark(quantum_value(ec, s)?))
        }
    }
}

/// `eta = (delta + R) / R`.
pub fn violation_factor(delta: f64, range: f64) -> Result<f64> {
    if range.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(domain(format!(
            "range of violation must be positive, got {range}"
        )));
    }
    Ok((delta + range) / range)
}

/// `p` solving `p * white + (1 - p) * quantum = target`, with `1` when the
/// line does not reach the target inside `[0, 1]`.
pub(crate) fn affine_crossing(quantum: f64, white: f64, target: f64) -> Result<f64> {
    let denom = quantum - white;
    if denom.abs() <= f64::EPSILON * quantum.abs().max(1.0) {
        return Err(domain(
            "white-noise value equals the quantum value; noise never moves it",
        ));
    }
    let p = (quantum - target) / denom;
    Ok(if (0.0..=1.0).contains(&p) { p } else { 1.0 })
}

/// Bound violated by `value`, if any.
pub fn violated_bound(value: f64, bounds: LocalBounds) -> Option<f64> {
    if value > bounds.upper {
        Some(bounds.upper)
    } else if value < bounds.lower {
        Some(bounds.lower)
    } else {
        None
    }
}

/// Noise fraction at which an inequality violation disappears.
pub fn inequality_tolerance(expr: &BellExpression, s: &QuantumSettings) -> Result<f64> {
    let q = quantum_value(expr, s)?;
    let bound = violated_bound(q, local_bounds(expr))
        .ok_or_else(|| domain(format!("quantum value {q} violates no local bound")))?;
    affine_crossing(q, white_noise_value(expr, s.dimension()), bound)
}

fn negative_complement(ec: &BellExpression, s: &QuantumSettings) -> Result<f64> {
    let qc = quantum_value(ec, s)?;
    if qc >= 0.0 {
        return Err(domain(format!(
            "complement value {qc} is not negative; the equality is not violated"
        )));
    }
    Ok(qc)
}

/// Noise fraction at which the noisy `E` falls to the noiseless benchmark
/// `1 - |E_c|`.
pub fn equality_tolerance_pinned(
    e: &BellExpression,
    ec: &BellExpression,
    s: &QuantumSettings,
) -> Result<f64> {
    require_pair(e, ec)?;
    let qc = negative_complement(ec, s)?;
    let qe = quantum_value(e, s)?;
    affine_crossing(
        qe,
        white_noise_value(e, s.dimension()),
        equality_benchmark(qc),
    )
}

/// Noise fraction at which the noisy complement reaches zero.
pub fn equality_tolerance_strict(ec: &BellExpression, s: &QuantumSettings) -> Result<f64> {
    let qc = quantum_value(ec, s)?;
    if qc > 0.0 {
        return Err(domain(format!(
            "complement value {qc} is positive; nothing to tolerate"
        )));
    }
    if qc == 0.0 {
        return Ok(0.0);
    }
    let white = white_noise_value(ec, s.dimension());
    if white <= 0.0 {
        return Ok(1.0);
    }
    affine_crossing(qc, white, 0.0)
}

/// Noisy value from a precomputed quantum value.
pub fn noisy_from(quantum: f64, expr: &BellExpression, dimension: usize, p: f64) -> f64 {
    mix(quantum, white_noise_value(expr, dimension), p)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub inequality: Option<f64>,
    pub equality_pinned: Option<f64>,
    pub equality_strict: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementSummary {
    pub name: Option<String>,
    pub quantum_value: f64,
}

/// Derived metrics for one expression at one point in settings space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: String,
    pub expression: Option<String>,
    pub mode: ViolationMode,
    pub quantum_value: f64,
    pub bounds: LocalBounds,
    /// The local value that is exceeded: a bound for inequalities, the
    /// complement-fixed value for equalities.
    pub violated_bound: Option<f64>,
    pub violation_amount: f64,
    pub violation_range: f64,
    pub violation_factor: f64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<ComplementSummary>,
}

/// Report for an expression treated as an inequality.
pub fn analyze_inequality(expr: &BellExpression, s: &QuantumSettings) -> Result<AnalysisReport> {
    let q = quantum_value(expr, s)?;
    let bounds = local_bounds(expr);
    let delta = inequality_margin(q, bounds).max(0.0);
    let range = bounds.range();
    let violated = violated_bound(q, bounds);
    Ok(AnalysisReport {
        format_version: FORMAT_VERSION.into(),
        expression: expr.name().map(str::to_owned),
        mode: ViolationMode::Inequality,
        quantum_value: q,
        bounds,
        violated_bound: violated,
        violation_amount: delta,
        violation_range: range,
        violation_factor: if range > 0.0 {
            violation_factor(delta, range)?
        } else {
            1.0
        },
        tolerances: Tolerances {
            inequality: violated
                .map(|_| inequality_tolerance(expr, s))
                .transpose()?,
            ..Tolerances::default()
        },
        complement: None,
    })
}

/// Report for a complementary pair treated as an equality.
pub fn analyze_equality(
    e: &BellExpression,
    ec: &BellExpression,
    s: &QuantumSettings,
) -> Result<AnalysisReport> {
    require_pair(e, ec)?;
    let qe = quantum_value(e, s)?;
    let qc = quantum_value(ec, s)?;
    let benchmark = equality_benchmark(qc);
    let delta = (qe - benchmark).abs();
    let violated = qc < 0.0;
    Ok(AnalysisReport {
        format_version: FORMAT_VERSION.into(),
        expression: e.name().map(str::to_owned),
        mode: ViolationMode::Equality,
        quantum_value: qe,
        bounds: local_bounds(e),
        violated_bound: violated.then_some(benchmark),
        violation_amount: delta,
        violation_range: benchmark,
        violation_factor: violation_factor(delta, benchmark)?,
        tolerances: Tolerances {
            inequality: None,
            equality_pinned: violated
                .then(|| equality_tolerance_pinned(e, ec, s))
                .transpose()?,
            equality_strict: violated
                .then(|| equality_tolerance_strict(ec, s))
                .transpose()?,
        },
        complement: Some(ComplementSummary {
            name: ec.name().map(str::to_owned),
            quantum_value: qc,
        }),
    })
}
