//! Quantum joint probabilities for phase-shifted discrete Fourier measurements.
//!
//! The shared state is `sum_jk C_jk |j>|k>`. Alice applies the phase
//! `exp(2 pi i j alpha_a / D)` followed by a DFT, Bob the phase
//! `exp(2 pi i k beta_b / D)` followed by an inverse DFT, and both measure in
//! the computational basis:
//!
//! ```text
//! P_ab^{mn} = |sum_jk C_jk exp(2 pi i/D [(alpha_a + m) j + (beta_b - n) k])|^2 / D^2
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bell::{lambda_sum, BellExpression};
use crate::error::{domain, index, Result};
use crate::scenario::{PVector, Scenario, SETTING_PAIRS};

/// Tolerance on the state normalization.
pub const NORM_TOL: f64 = 1e-10;

/// State coefficients and per-setting phases of the measurement family.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSettings {
    dimension: usize,
    /// Row-major `C_jk`, `j` indexing Alice.
    coefficients: Vec<Complex64>,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl QuantumSettings {
    /// Builds settings from a `D x D` coefficient matrix given as rows.
    pub fn new(
        dimension: usize,
        rows: Vec<Vec<Complex64>>,
        alpha: [f64; 2],
        beta: [f64; 2],
    ) -> Result<Self> {
        if dimension < 2 {
            return Err(domain(format!(
                "dimension must be at least 2, got {dimension}"
            )));
        }
        if rows.len() != dimension || rows.iter().any(|r| r.len() != dimension) {
            return Err(domain(format!(
                "coefficient matrix must be {dimension}x{dimension}"
            )));
        }
        Self::from_flat(dimension, rows.into_iter().flatten().collect(), alpha, beta)
    }

    /// Builds settings from row-major coefficients.
    pub fn from_flat(
        dimension: usize,
        coefficients: Vec<Complex64>,
        alpha: [f64; 2],
        beta: [f64; 2],
    ) -> Result<Self> {
        if dimension < 2 || coefficients.len() != dimension * dimension {
            return Err(domain(format!(
                "need {} coefficients for dimension {dimension}, got {}",
                dimension * dimension,
                coefficients.len()
            )));
        }
        if coefficients
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
            || alpha.iter().chain(&beta).any(|x| !x.is_finite())
        {
            return Err(domain("settings contain non-finite numbers"));
        }
        Ok(QuantumSettings {
            dimension,
            coefficients,
            alpha,
            beta,
        })
    }

    /// `sum_j |j>|j> / sqrt(D)` with the given phases.
    pub fn maximally_entangled(dimension: usize, alpha: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        let amp = Complex64::new(1.0 / (dimension as f64).sqrt(), 0.0);
        let mut c = vec![Complex64::new(0.0, 0.0); dimension * dimension];
        for j in 0..dimension {
            c[j * dimension + j] = amp;
        }
        Self::from_flat(dimension, c, alpha, beta)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coefficient(&self, j: usize, k: usize) -> Complex64 {
        self.coefficients[j * self.dimension + k]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient matrix as rows.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.coefficients
            .chunks(self.dimension)
            .map(<[Complex64]>::to_vec)
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(Complex64::norm_sqr).sum()
    }

    /// Returns a copy with the state rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(domain("cannot normalize the zero state"));
        }
        let mut out = self.clone();
        out.coefficients.iter_mut().for_each(|c| *c /= n);
        Ok(out)
    }

    /// The scenario whose four measurements have `D` outcomes.
    pub fn scenario(&self) -> Scenario {
        Scenario::uniform(self.dimension).expect("dimension is at least 2")
    }

    fn require_normalized(&self) -> Result<()> {
        if !validate_settings(self) {
            return Err(domain(format!(
                "state is not normalized: sum |C|^2 = {}",
                self.norm_sqr()
            )));
        }
        Ok(())
    }
}

/// Fraction of white noise mixed into the measured state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!(
                "noise fraction must lie in [0, 1], got {p}"
            )));
        }
        Ok(NoiseModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// True when `sum |C_jk|^2 = 1` within [`NORM_TOL`].
pub fn validate_settings(s: &QuantumSettings) -> bool {
    (s.norm_sqr() - 1.0).abs() <= NORM_TOL
}

fn phase(x: f64, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x / d as f64)
}

fn check_setting(x: usize, what: &str) -> Result<usize> {
    if (1..=2).contains(&x) {
        Ok(x - 1)
    } else {
        Err(index(format!("{what} setting must be 1 or 2, got {x}")))
    }
}

/// Amplitude grid for one setting pair, row-major in `(m, n)`.
fn block_probabilities(s: &QuantumSettings, alpha: f64, beta: f64) -> Vec<f64> {
    let d = s.dimension;
    let norm = 1.0 / (d * d) as f64;
    // bob[n][k] = exp(2 pi i (beta - n) k / D), alice[m][j] likewise with +m.
    let bob: Vec<Vec<Complex64>> = (0..d)
        .map(|n| {
            (0..d)
                .map(|k| phase((beta - n as f64) * k as f64, d))
                .collect()
        })
        .collect();
    let alice: Vec<Vec<Complex64>> = (0..d)
        .map(|m| {
            (0..d)
                .map(|j| phase((alpha + m as f64) * j as f64, d))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(d * d);
    for a_row in &alice {
        for b_row in &bob {
            let mut amp = Complex64::new(0.0, 0.0);
            for (j, &aj) in a_row.iter().enumerate() {
                let row = &s.coefficients[j * d..(j + 1) * d];
                let inner: Complex64 = row.iter().zip(b_row).map(|(c, bk)| c * bk).sum();
                amp += aj * inner;
            }
            out.push(amp.norm_sqr() * norm);
        }
    }
    out
}

/// A single joint probability `P_ab^{mn}`.
pub fn joint_probability(
    s: &QuantumSettings,
    a: usize,
    b: usize,
    m: usize,
    n: usize,
) -> Result<f64> {
    let ai = check_setting(a, "Alice")?;
    let bi = check_setting(b, "Bob")?;
    s.require_normalized()?;
    let d = s.dimension;
    if m >= d || n >= d {
        return Err(index(format!(
            "outcomes ({m}, {n}) out of range for dimension {d}"
        )));
    }
    let (alpha, beta) = (s.alpha[ai], s.beta[bi]);
    let mut amp = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            let x = (alpha + m as f64) * j as f64 + (beta - n as f64) * k as f64;
            amp += s.coefficient(j, k) * phase(x, d);
        }
    }
    Ok(amp.norm_sqr() / (d * d) as f64)
}

/// All `4 D^2` joint probabilities in canonical order.
pub fn probability_table(s: &QuantumSettings) -> Result<PVector> {
    s.require_normalized()?;
    let mut values = Vec::with_capacity(4 * s.dimension * s.dimension);
    for (a, b) in SETTING_PAIRS {
        values.extend(block_probabilities(s, s.alpha[a - 1], s.beta[b - 1]));
    }
    PVector::from_values(s.scenario(), values)
}

/// Table for a scenario that must match the settings' dimension on every measurement.
pub fn probability_table_for(s: &QuantumSettings, scenario: Scenario) -> Result<PVector> {
    check_dimension(scenario, s)?;
    probability_table(s)
}

fn check_dimension(scenario: Scenario, s: &QuantumSettings) -> Result<()> {
    match scenario.uniform_dimension() {
        Some(d) if d == s.dimension => Ok(()),
        _ => Err(domain(format!(
            "expression scenario {scenario} does not match state dimension {}",
            s.dimension
        ))),
    }
}

/// Value of the expression on the quantum table.
pub fn quantum_value(expr: &BellExpression, s: &QuantumSettings) -> Result<f64> {
    check_dimension(expr.scenario(), s)?;
    expr.evaluate(&probability_table(s)?)
}

/// Value of the expression on white-noise outcomes, where every joint outcome
/// has probability `1/D^2`.
pub fn white_noise_value(expr: &BellExpression, dimension: usize) -> f64 {
    lambda_sum(expr) / (dimension * dimension) as f64
}

/// Value under the Werner mixture `p * white + (1 - p) * state`.
pub fn noisy_value(expr: &BellExpression, s: &QuantumSettings, noise: NoiseModel) -> Result<f64> {
    let q = quantum_value(expr, s)?;
    Ok(mix(q, white_noise_value(expr, s.dimension), noise.p))
}

pub(crate) fn mix(quantum: f64, white: f64, p: f64) -> f64 {
    if p == 0.0 {
        quantum
    } else {
        p * white + (1.0 - p) * quantum
    }
}
