//! Counting independent joint probabilities.
//!
//! Two closed-form counts are in circulation for the number of independent
//! `P`'s in a two-setting scenario, and they differ by one. This module
//! evaluates both and measures the actual dimension numerically, once from
//! the deterministic strategies (affine hull of the local polytope) and once
//! from the normalization and no-signaling constraints.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{enumerate_strategies, strategy_to_p, Scenario, TermIndex, SETTING_PAIRS};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Largest strategy set [`affine_dimension`] will build.
pub const MAX_STRATEGIES: usize = 10_000;

/// Three-way comparison of independent-probability counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub scenario: Scenario,
    /// `(l1 + l2)(r1 + r2) - (l1 + l2 + r1 + r2 - 1)`.
    pub formula_count: usize,
    /// `(sum_a (l_a - 1))(sum_b (r_b - 1)) + sum_a (l_a - 1) + sum_b (r_b - 1)`.
    pub literature_count: usize,
    pub numeric_affine_dimension: usize,
    pub constraint_rank: usize,
    pub p_dimension: usize,
}

impl DimensionReport {
    pub fn compute(scenario: Scenario) -> Result<Self> {
        Ok(DimensionReport {
            scenario,
            formula_count: independent_count_formula(scenario),
            literature_count: independent_count_literature(scenario),
            numeric_affine_dimension: affine_dimension(scenario)?,
            constraint_rank: constraint_rank(scenario),
            p_dimension: scenario.p_dimension(),
        })
    }

    /// Which closed form the numeric dimension agrees with.
    pub fn verdict(&self) -> &'static str {
        let d = self.numeric_affine_dimension;
        match (d == self.formula_count, d == self.literature_count) {
            (true, _) => "numeric dimension agrees with (l1+l2)(r1+r2) - (l1+l2+r1+r2-1)",
            (_, true) => "numeric dimension agrees with the Collins-Gisin count",
            _ => "numeric dimension agrees with neither closed form",
        }
    }
}

/// `(l1 + l2)(r1 + r2) - (l1 + l2 + r1 + r2 - 1)`.
pub fn independent_count_formula(scenario: Scenario) -> usize {
    let [l1, l2, r1, r2] = scenario.counts();
    (l1 + l2) * (r1 + r2) - (l1 + l2 + r1 + r2 - 1)
}

/// The Collins-Gisin count `m_A m_B + m_A + m_B` with `m_A = sum_a (l_a - 1)`
/// and `m_B = sum_b (r_b - 1)`.
pub fn independent_count_literature(scenario: Scenario) -> usize {
    let [l1, l2, r1, r2] = scenario.counts();
    let ma = (l1 - 1) + (l2 - 1);
    let mb = (r1 - 1) + (r2 - 1);
    ma * mb + ma + mb
}

/// Numeric rank with a cutoff relative to the largest singular value.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

/// Dimension of the affine hull of the deterministic strategies' P-vectors.
pub fn affine_dimension(scenario: Scenario) -> Result<usize> {
    let n = scenario.gamma_dimension();
    if n > MAX_STRATEGIES {
        return Err(Error::Resource(format!(
            "{scenario} has {n} strategies, more than the {MAX_STRATEGIES} supported"
        )));
    }
    let vectors: Vec<Vec<f64>> = enumerate_strategies(scenario)
        .into_iter()
        .map(|s| strategy_to_p(s, scenario).map(|p| p.values().to_vec()))
        .collect::<Result<_>>()?;
    let dim = scenario.p_dimension();
    let base = &vectors[0];
    let m = DMatrix::from_fn(n - 1, dim, |r, c| vectors[r + 1][c] - base[c]);
    Ok(numeric_rank(&m))
}

/// Coefficient matrix of the normalization and no-signaling equations.
///
/// Rows: one per `(a, b)` block summing it to one, then one per
/// `(party, setting, outcome)` equating that outcome's marginal under the
/// other party's two settings.
pub fn constraint_matrix(scenario: Scenario) -> DMatrix<f64> {
    let dim = scenario.p_dimension();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (a, b) in SETTING_PAIRS {
        let mut row = vec![0.0; dim];
        for i in 0..scenario.alice_outcomes(a) {
            for j in 0..scenario.bob_outcomes(b) {
                row[scenario.p_offset(TermIndex::new(a, b, i, j))] = 1.0;
            }
        }
        rows.push(row);
    }
    for a in 1..=2 {
        for i in 0..scenario.alice_outcomes(a) {
            let mut row = vec![0.0; dim];
            for (b, sign) in [(1, 1.0), (2, -1.0)] {
                for j in 0..scenario.bob_outcomes(b) {
                    row[scenario.p_offset(TermIndex::new(a, b, i, j))] = sign;
                }
            }
            rows.push(row);
        }
    }
    for b in 1..=2 {
        for j in 0..scenario.bob_outcomes(b) {
            let mut row = vec![0.0; dim];
            for (a, sign) in [(1, 1.0), (2, -1.0)] {
                for i in 0..scenario.alice_outcomes(a) {
                    row[scenario.p_offset(TermIndex::new(a, b, i, j))] = sign;
                }
            }
            rows.push(row);
        }
    }
    DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c])
}

/// Rank of [`constraint_matrix`].
pub fn constraint_rank(scenario: Scenario) -> usize {
    numeric_rank(&constraint_matrix(scenario))
}
