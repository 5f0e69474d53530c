//! Measurement scenarios with two settings per party.
//!
//! A scenario `<l1 l2 | r1 r2>` fixes how many outcomes each of Alice's
//! settings (`a = 1, 2`) and Bob's settings (`b = 1, 2`) can produce. Two
//! index spaces hang off it:
//!
//! * joint probabilities `P_ab^{ij}`, stored as a [`PVector`] in `(a, b, i, j)`
//!   order with `a` most significant;
//! * double joint probabilities `gamma_{i1 i2 j1 j2}`, stored densely as a
//!   [`GammaTensor`] in lexicographic `(i1, i2, j1, j2)` order.
//!
//! A local hidden-variable model is a distribution over the gamma index space,
//! and its joint probabilities are the two-index marginals computed by
//! [`gamma_to_p`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{index, Error, Result};

/// Tolerance used when checking that a vector is a probability distribution.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// Outcome counts for the four measurements of a two-setting bipartite experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    alice: [usize; 2],
    bob: [usize; 2],
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    alice: [usize; 2],
    bob: [usize; 2],
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.alice[0], r.alice[1], r.bob[0], r.bob[1])
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr {
            alice: s.alice,
            bob: s.bob,
        }
    }
}

/// One of the two parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Scenario {
    pub fn new(l1: usize, l2: usize, r1: usize, r2: usize) -> Result<Self> {
        if [l1, l2, r1, r2].iter().any(|&n| n < 2) {
            return Err(Error::Domain(format!(
                "every measurement needs at least two outcomes, got <{l1}{l2}|{r1}{r2}>"
            )));
        }
        Ok(Scenario {
            alice: [l1, l2],
            bob: [r1, r2],
        })
    }

    /// The scenario where every measurement has `d` outcomes.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(d, d, d, d)
    }

    /// Outcome count of Alice's setting `a` (1-based).
    pub fn alice_outcomes(&self, a: usize) -> usize {
        self.alice[a - 1]
    }

    /// Outcome count of Bob's setting `b` (1-based).
    pub fn bob_outcomes(&self, b: usize) -> usize {
        self.bob[b - 1]
    }

    pub fn outcomes(&self, party: Party, setting: usize) -> usize {
        match party {
            Party::Alice => self.alice_outcomes(setting),
            Party::Bob => self.bob_outcomes(setting),
        }
    }

    pub fn counts(&self) -> [usize; 4] {
        [self.alice[0], self.alice[1], self.bob[0], self.bob[1]]
    }

    /// The common outcome count if all four measurements agree.
    pub fn uniform_dimension(&self) -> Option<usize> {
        let d = self.alice[0];
        self.counts().iter().all(|&n| n == d).then_some(d)
    }

    /// Number of joint probabilities `P_ab^{ij}`.
    pub fn p_dimension(&self) -> usize {
        let [l1, l2, r1, r2] = self.counts();
        l1 * r1 + l1 * r2 + l2 * r1 + l2 * r2
    }

    /// Number of double joint probabilities `gamma_{i1 i2 j1 j2}`.
    pub fn gamma_dimension(&self) -> usize {
        self.counts().iter().product()
    }

    /// Returns a copy with one more outcome on the given measurement.
    pub fn with_extra_outcome(&self, party: Party, setting: usize) -> Self {
        let mut out = *self;
        match party {
            Party::Alice => out.alice[setting - 1] += 1,
            Party::Bob => out.bob[setting - 1] += 1,
        }
        out
    }

    fn block_offset(&self, a: usize, b: usize) -> usize {
        let mut offset = 0;
        for (aa, bb) in SETTING_PAIRS {
            if (aa, bb) == (a, b) {
                return offset;
            }
            offset += self.alice_outcomes(aa) * self.bob_outcomes(bb);
        }
        unreachable!("setting pair ({a},{b}) is not in 1..=2 x 1..=2")
    }

    /// Position of a joint-probability term in the canonical layout.
    pub fn p_offset(&self, t: TermIndex) -> usize {
        self.block_offset(t.a, t.b) + t.i * self.bob_outcomes(t.b) + t.j
    }

    /// Checks that a term index is valid for this scenario.
    pub fn check_term(&self, t: TermIndex) -> Result<()> {
        if !(1..=2).contains(&t.a) || !(1..=2).contains(&t.b) {
            return Err(index(format!("settings must be 1 or 2, got {t}")));
        }
        if t.i >= self.alice_outcomes(t.a) || t.j >= self.bob_outcomes(t.b) {
            return Err(index(format!("{t} is outside {self}")));
        }
        Ok(())
    }

    /// All joint-probability indices in canonical `(a, b, i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = TermIndex> + '_ {
        SETTING_PAIRS.into_iter().flat_map(move |(a, b)| {
            let r = self.bob_outcomes(b);
            (0..self.alice_outcomes(a))
                .flat_map(move |i| (0..r).map(move |j| TermIndex { a, b, i, j }))
        })
    }

    /// Position of a gamma index in the dense lexicographic layout.
    pub fn gamma_offset(&self, g: GammaIndex) -> usize {
        let [_, l2, r1, r2] = self.counts();
        ((g[0] * l2 + g[1]) * r1 + g[2]) * r2 + g[3]
    }

    pub fn gamma_index_at(&self, mut offset: usize) -> GammaIndex {
        let [_, l2, r1, r2] = self.counts();
        let j2 = offset % r2;
        offset /= r2;
        let j1 = offset % r1;
        offset /= r1;
        let i2 = offset % l2;
        [offset / l2, i2, j1, j2]
    }

    /// All gamma indices in lexicographic `(i1, i2, j1, j2)` order.
    pub fn gamma_indices(&self) -> impl Iterator<Item = GammaIndex> + '_ {
        (0..self.gamma_dimension()).map(|k| self.gamma_index_at(k))
    }

    fn check_gamma(&self, g: GammaIndex) -> Result<()> {
        if g.iter().zip(self.counts()).any(|(&x, n)| x >= n) {
            return Err(index(format!("gamma index {g:?} is outside {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [l1, l2, r1, r2] = self.counts();
        write!(f, "<{l1},{l2}|{r1},{r2}>")
    }
}

/// The four `(a, b)` setting pairs in canonical order.
pub const SETTING_PAIRS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// Index of a joint probability `P_ab^{ij}`: settings `a`, `b` are 1-based,
/// outcomes `i`, `j` are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermIndex {
    pub a: usize,
    pub b: usize,
    pub i: usize,
    pub j: usize,
}

impl TermIndex {
    pub const fn new(a: usize, b: usize, i: usize, j: usize) -> Self {
        TermIndex { a, b, i, j }
    }

    /// Whether the deterministic strategy `s` produces this joint outcome.
    pub fn selected_by(&self, s: &DeterministicStrategy) -> bool {
        s.alice(self.a) == self.i && s.bob(self.b) == self.j
    }
}

impl fmt::Display for TermIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}{}^{}{}", self.a, self.b, self.i, self.j)
    }
}

/// Index `(i1, i2, j1, j2)` of a double joint probability.
pub type GammaIndex = [usize; 4];

/// A tensor over the gamma index space.
///
/// Used both as a probability distribution and, via [`GammaTensor::from_values`],
/// as an unconstrained real tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTensor {
    scenario: Scenario,
    values: Vec<f64>,
}

impl GammaTensor {
    pub fn zeros(scenario: Scenario) -> Self {
        GammaTensor {
            scenario,
            values: vec![0.0; scenario.gamma_dimension()],
        }
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let n = scenario.gamma_dimension();
        GammaTensor {
            scenario,
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Wraps raw values without any sign or normalization check.
    pub fn from_values(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        if values.len() != scenario.gamma_dimension() {
            return Err(Error::Domain(format!(
                "{} needs {} gamma values, got {}",
                scenario,
                scenario.gamma_dimension(),
                values.len()
            )));
        }
        Ok(GammaTensor { scenario, values })
    }

    /// Wraps raw values, requiring a nonnegative normalized distribution.
    pub fn distribution(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        let g = Self::from_values(scenario, values)?;
        if !g.is_distribution() {
            return Err(Error::Domain(
                "gamma values must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(g)
    }

    pub fn is_distribution(&self) -> bool {
        let sum: f64 = self.values.iter().sum();
        self.values.iter().all(|&v| v >= 0.0) && (sum - 1.0).abs() <= DISTRIBUTION_TOL
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, g: GammaIndex) -> f64 {
        self.values[self.scenario.gamma_offset(g)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (GammaIndex, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.scenario.gamma_index_at(k), v))
    }
}

/// Joint probabilities `P_ab^{ij}` in canonical `(a, b, i, j)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct PVector {
    scenario: Scenario,
    values: Vec<f64>,
}

impl PVector {
    pub fn from_values(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        if values.len() != scenario.p_dimension() {
            return Err(Error::Domain(format!(
                "{} needs {} joint probabilities, got {}",
                scenario,
                scenario.p_dimension(),
                values.len()
            )));
        }
        Ok(PVector { scenario, values })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, t: TermIndex) -> f64 {
        self.values[self.scenario.p_offset(t)]
    }

    /// The `(a, b)` block, row-major in `(i, j)`.
    pub fn block(&self, a: usize, b: usize) -> &[f64] {
        let start = self.scenario.block_offset(a, b);
        let len = self.scenario.alice_outcomes(a) * self.scenario.bob_outcomes(b);
        &self.values[start..start + len]
    }

    /// Largest deviation of a block sum from one.
    pub fn normalization_error(&self) -> f64 {
        SETTING_PAIRS
            .iter()
            .map(|&(a, b)| (self.block(a, b).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest difference between a party's marginal under the two settings
    /// of the other party.
    pub fn signaling_error(&self) -> f64 {
        let s = self.scenario;
        let mut worst = 0.0_f64;
        for a in 1..=2 {
            for i in 0..s.alice_outcomes(a) {
                let m = |b: usize| {
                    (0..s.bob_outcomes(b))
                        .map(|j| self.get(TermIndex { a, b, i, j }))
                        .sum::<f64>()
                };
                worst = worst.max((m(1) - m(2)).abs());
            }
        }
        for b in 1..=2 {
            for j in 0..s.bob_outcomes(b) {
                let m = |a: usize| {
                    (0..s.alice_outcomes(a))
                        .map(|i| self.get(TermIndex { a, b, i, j }))
                        .sum::<f64>()
                };
                worst = worst.max((m(1) - m(2)).abs());
            }
        }
        worst
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermIndex, f64)> + '_ {
        self.scenario.terms().zip(self.values.iter().copied())
    }
}

/// One fixed outcome per measurement: an extreme point of the local model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl DeterministicStrategy {
    pub const fn new(i1: usize, i2: usize, j1: usize, j2: usize) -> Self {
        DeterministicStrategy { i1, i2, j1, j2 }
    }

    pub fn alice(&self, a: usize) -> usize {
        if a == 1 {
            self.i1
        } else {
            self.i2
        }
    }

    pub fn bob(&self, b: usize) -> usize {
        if b == 1 {
            self.j1
        } else {
            self.j2
        }
    }

    pub fn gamma_index(&self) -> GammaIndex {
        [self.i1, self.i2, self.j1, self.j2]
    }

    pub fn from_gamma_index(g: GammaIndex) -> Self {
        DeterministicStrategy::new(g[0], g[1], g[2], g[3])
    }
}

/// All deterministic strategies in lexicographic `(i1, i2, j1, j2)` order.
pub fn enumerate_strategies(scenario: Scenario) -> Vec<DeterministicStrategy> {
    scenario
        .gamma_indices()
        .map(DeterministicStrategy::from_gamma_index)
        .collect()
}

/// Point-mass distribution concentrated on the strategy's outcome quadruple.
pub fn strategy_to_gamma(s: DeterministicStrategy, scenario: Scenario) -> Result<GammaTensor> {
    let g = s.gamma_index();
    scenario.check_gamma(g)?;
    let mut out = GammaTensor::zeros(scenario);
    out.values[scenario.gamma_offset(g)] = 1.0;
    Ok(out)
}

/// Joint probabilities as marginals of a gamma tensor: `P_ab^{ij}` sums gamma
/// over the outcomes of the two settings not being measured.
pub fn gamma_to_p(gamma: &GammaTensor) -> PVector {
    let s = gamma.scenario;
    let mut values = vec![0.0; s.p_dimension()];
    for (g, w) in gamma.iter() {
        if w == 0.0 {
            continue;
        }
        let strategy = DeterministicStrategy::from_gamma_index(g);
        for (a, b) in SETTING_PAIRS {
            let t = TermIndex::new(a, b, strategy.alice(a), strategy.bob(b));
            values[s.p_offset(t)] += w;
        }
    }
    PVector {
        scenario: s,
        values,
    }
}

/// 0/1 joint-probability vector of a deterministic strategy.
pub fn strategy_to_p(s: DeterministicStrategy, scenario: Scenario) -> Result<PVector> {
    scenario.check_gamma(s.gamma_index())?;
    let mut values = vec![0.0; scenario.p_dimension()];
    for (a, b) in SETTING_PAIRS {
        values[scenario.p_offset(TermIndex::new(a, b, s.alice(a), s.bob(b)))] = 1.0;
    }
    Ok(PVector { scenario, values })
}

/// The gamma indices whose sum makes up `P_ab^{ij}`, in lexicographic order.
pub fn gamma_support(scenario: Scenario, t: TermIndex) -> Result<Vec<GammaIndex>> {
    scenario.check_term(t)?;
    Ok(scenario
        .gamma_indices()
        .filter(|&g| t.selected_by(&DeterministicStrategy::from_gamma_index(g)))
        .collect())
}

/// Every joint probability written out as a sum of gamma indices.
pub fn expansion_table(scenario: Scenario) -> Vec<(TermIndex, Vec<GammaIndex>)> {
    scenario
        .terms()
        .map(|t| {
            (
                t,
                gamma_support(scenario, t).expect("canonical terms are valid"),
            )
        })
        .collect()
}

/// Renders a gamma index the way it is usually written, e.g. `γ2102`.
pub fn gamma_label(g: GammaIndex) -> String {
    format!("γ{}{}{}{}", g[0], g[1], g[2], g[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3333() -> Scenario {
        Scenario::uniform(3).unwrap()
    }

    #[test]
    fn rejects_single_outcome_measurements() {
        assert!(Scenario::new(1, 2, 2, 2).is_err());
        assert!(Scenario::new(2, 2, 2, 0).is_err());
    }

    #[test]
    fn dimensions() {
        let s = Scenario::new(2, 3, 2, 3).unwrap();
        assert_eq!(s.p_dimension(), 4 + 6 + 6 + 9);
        assert_eq!(s.gamma_dimension(), 36);
        assert_eq!(s3333().p_dimension(), 36);
        assert_eq!(s3333().gamma_dimension(), 81);
    }

    #[test]
    fn strategy_counts() {
        assert_eq!(
            enumerate_strategies(Scenario::uniform(2).unwrap()).len(),
            16
        );
        assert_eq!(enumerate_strategies(s3333()).len(), 81);
        assert_eq!(
            enumerate_strategies(Scenario::new(2, 2, 3, 3).unwrap()).len(),
            36
        );
    }

    #[test]
    fn strategies_are_lexicographic_and_distinct() {
        let all = enumerate_strategies(s3333());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], DeterministicStrategy::new(0, 0, 0, 0));
        assert_eq!(all[80], DeterministicStrategy::new(2, 2, 2, 2));
    }

    #[test]
    fn point_masses() {
        let s = s3333();
        for (st, sc) in [
            (DeterministicStrategy::new(0, 0, 0, 0), s),
            (DeterministicStrategy::new(2, 1, 0, 2), s),
            (
                DeterministicStrategy::new(1, 1, 1, 1),
                Scenario::uniform(2).unwrap(),
            ),
        ] {
            let g = strategy_to_gamma(st, sc).unwrap();
            assert!(g.is_distribution());
            for (idx, v) in g.iter() {
                let expect = if idx == st.gamma_index() { 1.0 } else { 0.0 };
                assert_eq!(v, expect);
            }
        }
    }

    #[test]
    fn out_of_range_strategy_is_an_index_error() {
        let err = strategy_to_gamma(
            DeterministicStrategy::new(0, 2, 0, 0),
            Scenario::uniform(2).unwrap(),
        );
        assert!(matches!(err, Err(Error::Index(_))));
        assert!(matches!(
            strategy_to_p(DeterministicStrategy::new(3, 0, 0, 0), s3333()),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn point_mass_marginals() {
        let p = gamma_to_p(
            &strategy_to_gamma(DeterministicStrategy::new(0, 0, 0, 0), s3333()).unwrap(),
        );
        for (t, v) in p.iter() {
            let expect = if t.i == 0 && t.j == 0 { 1.0 } else { 0.0 };
            assert_eq!(v, expect, "{t}");
        }
    }

    #[test]
    fn uniform_marginals() {
        let p = gamma_to_p(&GammaTensor::uniform(s3333()));
        for v in p.values() {
            assert!((v - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn strategy_read_off() {
        let p = strategy_to_p(DeterministicStrategy::new(1, 0, 2, 1), s3333()).unwrap();
        let ones: Vec<TermIndex> = p
            .iter()
            .filter(|&(_, v)| v == 1.0)
            .map(|(t, _)| t)
            .collect();
        assert_eq!(
            ones,
            vec![
                TermIndex::new(1, 1, 1, 2),
                TermIndex::new(1, 2, 1, 1),
                TermIndex::new(2, 1, 0, 2),
                TermIndex::new(2, 2, 0, 1),
            ]
        );
        assert!(p.normalization_error() == 0.0);
    }

    #[test]
    fn canonical_layout_is_a_major() {
        let s = Scenario::new(2, 3, 2, 3).unwrap();
        let offsets: Vec<usize> = s.terms().map(|t| s.p_offset(t)).collect();
        assert_eq!(offsets, (0..s.p_dimension()).collect::<Vec<_>>());
        assert_eq!(s.p_offset(TermIndex::new(1, 2, 0, 0)), 4);
        assert_eq!(s.p_offset(TermIndex::new(2, 1, 0, 0)), 10);
    }

    #[test]
    fn gamma_offsets_round_trip() {
        let s = Scenario::new(3, 2, 2, 3).unwrap();
        for k in 0..s.gamma_dimension() {
            assert_eq!(s.gamma_offset(s.gamma_index_at(k)), k);
        }
    }

    #[test]
    fn term_validation() {
        let s = s3333();
        assert!(s.check_term(TermIndex::new(0, 1, 0, 0)).is_err());
        assert!(s.check_term(TermIndex::new(1, 3, 0, 0)).is_err());
        assert!(s.check_term(TermIndex::new(1, 1, 3, 0)).is_err());
        assert!(s.check_term(TermIndex::new(2, 2, 2, 2)).is_ok());
    }

    #[test]
    fn scenario_serde_validates() {
        let s: Scenario = serde_json::from_str(r#"{"alice":[3,2],"bob":[2,2]}"#).unwrap();
        assert_eq!(s.counts(), [3, 2, 2, 2]);
        assert!(serde_json::from_str::<Scenario>(r#"{"alice":[1,2],"bob":[2,2]}"#).is_err());
    }
}
