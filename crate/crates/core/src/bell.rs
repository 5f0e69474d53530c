//! Bell expressions as linear forms over joint probabilities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, index, Error, Result};
use crate::scenario::{
    enumerate_strategies, strategy_to_p, DeterministicStrategy, GammaIndex, GammaTensor, PVector,
    Party, Scenario, TermIndex, SETTING_PAIRS,
};

/// Absolute tolerance for comparing coefficients and bounds.
pub const COEFF_TOL: f64 = 1e-12;

/// A real linear combination of joint probabilities `P_ab^{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellExpression {
    scenario: Scenario,
    terms: BTreeMap<TermIndex, f64>,
    name: Option<String>,
}

impl BellExpression {
    /// Builds an expression from `(index, coefficient)` pairs.
    ///
    /// Zero coefficients are dropped; repeated indices are rejected.
    pub fn new(
        scenario: Scenario,
        terms: impl IntoIterator<Item = (TermIndex, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (t, c) in terms {
            scenario.check_term(t)?;
            if !c.is_finite() {
                return Err(domain(format!("coefficient of {t} is not finite")));
            }
            if map.insert(t, c).is_some() {
                return Err(Error::Format(format!("duplicate term {t}")));
            }
        }
        map.retain(|_, c| *c != 0.0);
        Ok(BellExpression {
            scenario,
            terms: map,
            name: None,
        })
    }

    pub fn zero(scenario: Scenario) -> Self {
        BellExpression {
            scenario,
            terms: BTreeMap::new(),
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermIndex, f64)> + '_ {
        self.terms.iter().map(|(&t, &c)| (t, c))
    }

    pub fn coefficient(&self, t: TermIndex) -> f64 {
        self.terms.get(&t).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value of the expression on a joint-probability vector.
    pub fn evaluate(&self, p: &PVector) -> Result<f64> {
        if p.scenario() != self.scenario {
            return Err(domain(format!(
                "expression lives in {} but probabilities in {}",
                self.scenario,
                p.scenario()
            )));
        }
        Ok(self.terms().map(|(t, c)| c * p.get(t)).sum())
    }

    /// Value on a deterministic strategy: the sum of coefficients it selects.
    pub fn evaluate_strategy(&self, s: &DeterministicStrategy) -> f64 {
        SETTING_PAIRS
            .iter()
            .map(|&(a, b)| self.coefficient(TermIndex::new(a, b, s.alice(a), s.bob(b))))
            .sum()
    }
}

/// Net coefficient `mu - nu` of every gamma once the expression is rewritten
/// over double joint probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaCoefficients(GammaTensor);

impl GammaCoefficients {
    pub fn scenario(&self) -> Scenario {
        self.0.scenario()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn get(&self, g: GammaIndex) -> f64 {
        self.0.get(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GammaIndex, f64)> + '_ {
        self.0.iter()
    }

    pub fn tensor(&self) -> &GammaTensor {
        &self.0
    }

    /// Pairing with a gamma tensor: the expression's value under that model.
    pub fn pair(&self, gamma: &GammaTensor) -> Result<f64> {
        if gamma.scenario() != self.scenario() {
            return Err(domain(
                "gamma tensor and coefficients use different scenarios",
            ));
        }
        Ok(self
            .values()
            .iter()
            .zip(gamma.values())
            .map(|(c, g)| c * g)
            .sum())
    }

    /// Entries that are not zero within [`COEFF_TOL`].
    pub fn nonzero(&self) -> impl Iterator<Item = (GammaIndex, f64)> + '_ {
        self.iter().filter(|&(_, c)| c.abs() > COEFF_TOL)
    }
}

/// Extremes of an expression over every local hidden-variable model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBounds {
    pub lower: f64,
    pub upper: f64,
}

impl LocalBounds {
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn approx_eq(&self, other: &LocalBounds, tol: f64) -> bool {
        (self.lower - other.lower).abs() <= tol && (self.upper - other.upper).abs() <= tol
    }
}

/// Pulls the expression back through the marginal map onto the gamma tensor.
///
/// Each gamma `(i1, i2, j1, j2)` collects the coefficients of the four joint
/// probabilities it contributes to, one per setting pair.
pub fn gamma_coefficients(expr: &BellExpression) -> GammaCoefficients {
    let s = expr.scenario;
    let values = s
        .gamma_indices()
        .map(|g| expr.evaluate_strategy(&DeterministicStrategy::from_gamma_index(g)))
        .collect();
    GammaCoefficients(GammaTensor::from_values(s, values).expect("sized from scenario"))
}

/// Local bounds as the extreme entries of the full gamma-coefficient tensor,
/// implicit zeros included.
pub fn local_bounds(expr: &BellExpression) -> LocalBounds {
    let coeffs = gamma_coefficients(expr);
    let (lower, upper) = coeffs
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        });
    LocalBounds { lower, upper }
}

/// Local bounds by scanning the joint-probability vector of every
/// deterministic strategy.
pub fn local_bounds_enumerated(expr: &BellExpression) -> LocalBounds {
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for s in enumerate_strategies(expr.scenario) {
        let p = strategy_to_p(s, expr.scenario).expect("enumerated strategies are valid");
        let v = expr.evaluate(&p).expect("same scenario");
        lower = lower.min(v);
        upper = upper.max(v);
    }
    LocalBounds { lower, upper }
}

/// True when the local bounds are exactly `(0, 1)`.
pub fn is_formal(expr: &BellExpression) -> bool {
    let b = local_bounds(expr);
    b.approx_eq(
        &LocalBounds {
            lower: 0.0,
            upper: 1.0,
        },
        COEFF_TOL,
    )
}

fn is_binary(c: f64) -> bool {
    c.abs() <= COEFF_TOL || (c - 1.0).abs() <= COEFF_TOL
}

/// Gamma coefficients of the complement, `1 - coefficients(expr)`.
///
/// Only defined when every gamma coefficient is 0 or 1. That covers all formal
/// expressions of this kind plus the two constant ones (all zeros, all ones).
pub fn complement_gamma(expr: &BellExpression) -> Result<GammaCoefficients> {
    let coeffs = gamma_coefficients(expr);
    if !coeffs.values().iter().all(|&c| is_binary(c)) {
        return Err(domain("complement needs gamma coefficients in {0, 1}"));
    }
    let values = coeffs.values().iter().map(|c| 1.0 - c).collect();
    Ok(GammaCoefficients(
        GammaTensor::from_values(expr.scenario, values).expect("same size"),
    ))
}

/// True when the two expressions' gamma coefficients add up to the all-ones tensor.
pub fn verify_complement(e1: &BellExpression, e2: &BellExpression) -> Result<bool> {
    if e1.scenario != e2.scenario {
        return Err(domain(format!(
            "cannot pair expressions over {} and {}",
            e1.scenario, e2.scenario
        )));
    }
    let c1 = gamma_coefficients(e1);
    let c2 = gamma_coefficients(e2);
    Ok(c1
        .values()
        .iter()
        .zip(c2.values())
        .all(|(x, y)| (x + y - 1.0).abs() <= COEFF_TOL))
}

/// Splits one outcome of a measurement into two.
///
/// The refined scenario has one extra outcome on `(party, setting)`. The new
/// outcome takes the last index and every term on `outcome` is copied onto it
/// with the same coefficient, so each refined gamma inherits its parent's
/// coefficient.
pub fn split_outcome(
    expr: &BellExpression,
    party: Party,
    setting: usize,
    outcome: usize,
) -> Result<BellExpression> {
    if !(1..=2).contains(&setting) {
        return Err(index(format!("setting must be 1 or 2, got {setting}")));
    }
    let count = expr.scenario.outcomes(party, setting);
    if outcome >= count {
        return Err(index(format!(
            "outcome {outcome} does not exist for {party:?} setting {setting} ({count} outcomes)"
        )));
    }
    let scenario = expr.scenario.with_extra_outcome(party, setting);
    let mut terms = expr.terms.clone();
    for (t, c) in expr.terms() {
        let copy = match party {
            Party::Alice if t.a == setting && t.i == outcome => TermIndex { i: count, ..t },
            Party::Bob if t.b == setting && t.j == outcome => TermIndex { j: count, ..t },
            _ => continue,
        };
        terms.insert(copy, c);
    }
    Ok(BellExpression {
        scenario,
        terms,
        name: expr.name.clone(),
    })
}

/// Sum of all coefficients; the expression's value on uniformly random outcomes
/// times the number of outcome pairs per block.
pub fn lambda_sum(expr: &BellExpression) -> f64 {
    expr.terms.values().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn t(a: usize, b: usize, i: usize, j: usize) -> TermIndex {
        TermIndex::new(a, b, i, j)
    }

    #[test]
    fn construction_rejects_bad_terms() {
        let s = Scenario::uniform(2).unwrap();
        assert!(matches!(
            BellExpression::new(s, [(t(1, 1, 2, 0), 1.0)]),
            Err(Error::Index(_))
        ));
        assert!(BellExpression::new(s, [(t(1, 1, 0, 0), 1.0), (t(1, 1, 0, 0), 2.0)]).is_err());
        let e = BellExpression::new(s, [(t(1, 1, 0, 0), 0.0), (t(2, 2, 1, 1), 1.0)]).unwrap();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn zero_expression_bounds() {
        let z = BellExpression::zero(Scenario::uniform(3).unwrap());
        let b = local_bounds(&z);
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert_eq!(local_bounds_enumerated(&z), b);
    }

    #[test]
    fn lambda_sums() {
        assert_eq!(lambda_sum(&fixtures::inequality_i()), -18.0);
        assert_eq!(lambda_sum(&fixtures::equality_e()), 5.0);
        assert_eq!(lambda_sum(&fixtures::equality_e_complement()), 4.0);
    }

    #[test]
    fn formality() {
        assert!(is_formal(&fixtures::equality_e()));
        assert!(is_formal(&fixtures::equality_e_complement()));
        assert!(!is_formal(&fixtures::inequality_i()));
    }

    #[test]
    fn complement_round_trip() {
        let e = fixtures::equality_e();
        let ec = fixtures::equality_e_complement();
        assert_eq!(complement_gamma(&e).unwrap(), gamma_coefficients(&ec));
        assert_eq!(complement_gamma(&ec).unwrap(), gamma_coefficients(&e));
        assert!(verify_complement(&e, &ec).unwrap());
        assert!(!verify_complement(&e, &e).unwrap());
        assert!(!verify_complement(&fixtures::inequality_i(), &ec).unwrap());
    }

    #[test]
    fn complement_of_all_ones_is_zero() {
        // The four P11 entries sum to one on every model.
        let s = Scenario::uniform(3).unwrap();
        let ones = BellExpression::new(
            s,
            (0..3).flat_map(|i| (0..3).map(move |j| (t(1, 1, i, j), 1.0))),
        )
        .unwrap();
        assert!(gamma_coefficients(&ones).values().iter().all(|&c| c == 1.0));
        let c = complement_gamma(&ones).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn complement_rejects_non_binary() {
        assert!(matches!(
            complement_gamma(&fixtures::inequality_i()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn verify_complement_rejects_mixed_scenarios() {
        let a = BellExpression::zero(Scenario::uniform(2).unwrap());
        let b = BellExpression::zero(Scenario::uniform(3).unwrap());
        assert!(verify_complement(&a, &b).is_err());
    }

    #[test]
    fn split_without_affected_terms_keeps_terms() {
        let s = Scenario::uniform(2).unwrap();
        let e = BellExpression::new(s, [(t(1, 1, 0, 0), 1.0), (t(2, 2, 1, 0), -1.0)]).unwrap();
        let split = split_outcome(&e, Party::Alice, 1, 1).unwrap();
        assert_eq!(split.scenario().counts(), [3, 2, 2, 2]);
        assert_eq!(
            split.terms().collect::<Vec<_>>(),
            e.terms().collect::<Vec<_>>()
        );
    }

    #[test]
    fn split_duplicates_terms_on_the_split_outcome() {
        let s = Scenario::uniform(2).unwrap();
        let e = BellExpression::new(s, [(t(1, 2, 0, 1), 2.0), (t(2, 1, 0, 1), -1.0)]).unwrap();
        let split = split_outcome(&e, Party::Bob, 1, 1).unwrap();
        assert_eq!(split.scenario().counts(), [2, 2, 3, 2]);
        assert_eq!(split.coefficient(t(2, 1, 0, 1)), -1.0);
        assert_eq!(split.coefficient(t(2, 1, 0, 2)), -1.0);
        assert_eq!(split.coefficient(t(1, 2, 0, 1)), 2.0);
        assert_eq!(split.len(), 3);
    }

    #[test]
    fn split_rejects_bad_outcome() {
        let e = BellExpression::zero(Scenario::uniform(2).unwrap());
        assert!(matches!(
            split_outcome(&e, Party::Alice, 1, 2),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            split_outcome(&e, Party::Bob, 3, 0),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn evaluate_checks_scenario() {
        let e = fixtures::inequality_i();
        let p = strategy_to_p(
            DeterministicStrategy::new(0, 0, 0, 0),
            Scenario::uniform(2).unwrap(),
        )
        .unwrap();
        assert!(e.evaluate(&p).is_err());
    }
}
