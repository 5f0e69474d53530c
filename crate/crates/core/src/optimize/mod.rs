//! Derivative-free search over quantum settings.
//!
//! The free parameters are packed into one real vector: the state as `2 D^2`
//! reals (real and imaginary parts, row-major), then `alpha`, then `beta`.
//! The state block is rescaled to unit norm after every simplex move and the
//! phases are wrapped into `[0, D)` when decoded.
//!
//! Points that do not violate get a signed surrogate score (how far they are
//! from violating) so the search has something to climb; the reported
//! objective is clamped to zero there.

mod simplex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    affine_crossing, equality_benchmark, equality_tolerance_pinned, equality_violation_amount,
    inequality_margin, inequality_tolerance, violation_amount,
};
use crate::bell::{local_bounds, verify_complement, BellExpression, LocalBounds};
use crate::error::{domain, Result};
use crate::quantum::{
    probability_table, quantum_value, validate_settings, white_noise_value, QuantumSettings,
};

use simplex::{minimize, SimplexOptions};

/// What the search maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Violation amount: of the local bounds, or of the equality when a
    /// complement is supplied.
    Violation,
    /// White-noise tolerance: inequality tolerance, or the pinned equality
    /// tolerance when a complement is supplied.
    Tolerance,
    /// Raw quantum value of the expression.
    QuantumValue,
}

/// Which parameter groups the search may move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParameters {
    pub state: bool,
    pub alpha: bool,
    pub beta: bool,
}

impl FreeParameters {
    pub const ALL: FreeParameters = FreeParameters {
        state: true,
        alpha: true,
        beta: true,
    };
    pub const PHASES: FreeParameters = FreeParameters {
        state: false,
        alpha: true,
        beta: true,
    };

    pub fn any(&self) -> bool {
        self.state || self.alpha || self.beta
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationConfig {
    pub objective: Objective,
    pub free: FreeParameters,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    /// Stop once the simplex spread in objective falls below this.
    pub tolerance: f64,
    /// Supplies the parameter groups that are not free. Defaults to the
    /// maximally entangled state with zero phases.
    pub base: Option<QuantumSettings>,
    pub record_trace: bool,
    /// Run restarts on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            objective: Objective::Violation,
            free: FreeParameters::ALL,
            restarts: 20,
            max_iterations: 4000,
            seed: 1,
            tolerance: 1e-10,
            base: None,
            record_trace: false,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub best_settings: QuantumSettings,
    pub best_objective: f64,
    /// Whether the best point violates at all; `false` means the objective is
    /// unavailable and `best_objective` is zero.
    pub violated: bool,
    pub iterations_used: usize,
    pub restart_index: usize,
    /// `(iteration, best objective so far)` at each improvement.
    pub trace: Option<Vec<(usize, f64)>>,
}

/// Scores settings for one expression and objective.
struct Scorer<'a> {
    expr: &'a BellExpression,
    complement: Option<&'a BellExpression>,
    objective: Objective,
    bounds: LocalBounds,
    white: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Score {
    /// Reported objective.
    objective: f64,
    /// Continuous score driving the search; equals `objective` when violated.
    surrogate: f64,
    violated: bool,
}

impl<'a> Scorer<'a> {
    fn new(
        expr: &'a BellExpression,
        complement: Option<&'a BellExpression>,
        objective: Objective,
        dimension: usize,
    ) -> Result<Self> {
        if let Some(ec) = complement {
            if !verify_complement(expr, ec)? {
                return Err(domain("complement does not pair with the expression"));
            }
        }
        Ok(Scorer {
            expr,
            complement,
            objective,
            bounds: local_bounds(expr),
            white: white_noise_value(expr, dimension),
        })
    }

    fn score(&self, s: &QuantumSettings) -> Score {
        let table = match probability_table(s) {
            Ok(t) => t,
            Err(_) => {
                return Score {
                    objective: 0.0,
                    surrogate: f64::NEG_INFINITY,
                    violated: false,
                }
            }
        };
        let q = self
            .expr
            .evaluate(&table)
            .expect("dimension checked up front");
        match self.complement {
            None => {
                let margin = inequality_margin(q, self.bounds);
                let violated = margin > 0.0;
                match self.objective {
                    Objective::QuantumValue => Score {
                        objective: q,
                        surrogate: q,
                        violated,
                    },
                    Objective::Violation => Score {
                        objective: margin.max(0.0),
                        surrogate: margin,
                        violated,
                    },
                    Objective::Tolerance => {
                        let bound = if q > self.bounds.upper {
                            self.bounds.upper
                        } else {
                            self.bounds.lower
                        };
                        match violated
                            .then(|| affine_crossing(q, self.white, bound).ok())
                            .flatten()
                        {
                            Some(p) => Score {
                                objective: p,
                                surrogate: p,
                                violated,
                            },
                            None => Score {
                                objective: 0.0,
                                surrogate: margin.min(0.0),
                                violated: false,
                            },
                        }
                    }
                }
            }
            Some(ec) => {
                let qc = ec.evaluate(&table).expect("same scenario");
                let violated = qc < 0.0;
                let benchmark = equality_benchmark(qc);
                match self.objective {
                    Objective::QuantumValue => Score {
                        objective: q,
                        surrogate: q,
                        violated,
                    },
                    Objective::Violation => {
                        let delta = if violated { (q - benchmark).abs() } else { 0.0 };
                        Score {
                            objective: delta,
                            surrogate: if violated { delta } else { -qc },
                            violated,
                        }
                    }
                    Objective::Tolerance => {
                        match violated
                            .then(|| affine_crossing(q, self.white, benchmark).ok())
                            .flatten()
                        {
                            Some(p) => Score {
                                objective: p,
                                surrogate: p,
                                violated,
                            },
                            None => Score {
                                objective: 0.0,
                                surrogate: -qc.abs(),
                                violated: false,
                            },
                        }
                    }
                }
            }
        }
    }
}

/// Recomputes an objective through the public analysis functions.
pub fn evaluate_objective(
    expr: &BellExpression,
    complement: Option<&BellExpression>,
    objective: Objective,
    s: &QuantumSettings,
) -> Result<f64> {
    Ok(match (objective, complement) {
        (Objective::QuantumValue, _) => quantum_value(expr, s)?,
        (Objective::Violation, None) => violation_amount(expr, s)?,
        (Objective::Violation, Some(ec)) => {
            if quantum_value(ec, s)? < 0.0 {
                equality_violation_amount(expr, ec, s)?
            } else {
                0.0
            }
        }
        (Objective::Tolerance, None) => inequality_tolerance(expr, s).unwrap_or(0.0),
        (Objective::Tolerance, Some(ec)) => equality_tolerance_pinned(expr, ec, s).unwrap_or(0.0),
    })
}

/// Maps the packed real vector to and from settings.
struct Layout {
    dimension: usize,
    free: FreeParameters,
    base: QuantumSettings,
}

impl Layout {
    fn state_len(&self) -> usize {
        if self.free.state {
            2 * self.dimension * self.dimension
        } else {
            0
        }
    }

    fn len(&self) -> usize {
        self.state_len() + 2 * (self.free.alpha as usize + self.free.beta as usize)
    }

    fn encode(&self, s: &QuantumSettings) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len());
        if self.free.state {
            for c in s.coefficients() {
                x.push(c.re);
                x.push(c.im);
            }
        }
        if self.free.alpha {
            x.extend(s.alpha);
        }
        if self.free.beta {
            x.extend(s.beta);
        }
        x
    }

    fn decode(&self, x: &[f64]) -> QuantumSettings {
        let d = self.dimension as f64;
        let mut out = self.base.clone();
        let mut rest = x;
        if self.free.state {
            let (state, tail) = rest.split_at(self.state_len());
            let coeffs = state
                .chunks(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            out = QuantumSettings::from_flat(self.dimension, coeffs, out.alpha, out.beta)
                .expect("layout has the right length");
            rest = tail;
        }
        if self.free.alpha {
            out.alpha = [rest[0].rem_euclid(d), rest[1].rem_euclid(d)];
            rest = &rest[2..];
        }
        if self.free.beta {
            out.beta = [rest[0].rem_euclid(d), rest[1].rem_euclid(d)];
        }
        out
    }

    fn project(&self, x: &mut [f64]) {
        let state = &mut x[..self.state_len()];
        let norm = state.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            state.iter_mut().for_each(|v| *v /= norm);
        }
    }

    fn steps(&self) -> Vec<f64> {
        let mut steps = vec![0.1; self.state_len()];
        steps.resize(self.len(), 0.25);
        steps
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.dimension as f64;
        let mut x = Vec::with_capacity(self.len());
        for _ in 0..self.state_len() {
            x.push(rng.sample::<f64, _>(StandardNormal));
        }
        for _ in self.state_len()..self.len() {
            x.push(rng.random_range(0.0..d));
        }
        self.project(&mut x);
        x
    }
}

struct Best {
    settings: QuantumSettings,
    score: Score,
    trace: Option<Vec<(usize, f64)>>,
}

fn local_search(
    scorer: &Scorer<'_>,
    layout: &Layout,
    start: Start<'_>,
    config: &OptimizationConfig,
) -> (Best, usize) {
    let (x0, start_settings) = match start {
        Start::Vector(x) => {
            let s = layout.decode(&x);
            (x, s)
        }
        Start::Settings(s) => (layout.encode(s), s.clone()),
    };
    let first = scorer.score(&start_settings);
    let mut best = Best {
        settings: start_settings,
        score: first,
        trace: config.record_trace.then(|| vec![(0, first.objective)]),
    };
    let mut evaluations = 0usize;
    let opts = SimplexOptions {
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
        steps: layout.steps(),
    };
    let outcome = minimize(
        |x| {
            evaluations += 1;
            let s = layout.decode(x);
            let score = scorer.score(&s);
            if score.surrogate > best.score.surrogate {
                if let Some(t) = best.trace.as_mut() {
                    t.push((evaluations, score.objective));
                }
                best.settings = s;
                best.score = score;
            }
            -score.surrogate
        },
        |x| layout.project(x),
        &x0,
        &opts,
    );
    (best, outcome.iterations)
}

enum Start<'a> {
    Vector(Vec<f64>),
    Settings(&'a QuantumSettings),
}

fn prepare<'a>(
    expr: &'a BellExpression,
    complement: Option<&'a BellExpression>,
    config: &OptimizationConfig,
    base: QuantumSettings,
) -> Result<(Scorer<'a>, Layout)> {
    if !config.free.any() {
        return Err(domain("at least one parameter group must be free"));
    }
    let d = base.dimension();
    if expr.scenario().uniform_dimension() != Some(d) {
        return Err(domain(format!(
            "expression scenario {} is not <{d}{d}|{d}{d}>",
            expr.scenario()
        )));
    }
    if !validate_settings(&base) {
        return Err(domain("base settings are not normalized"));
    }
    let scorer = Scorer::new(expr, complement, config.objective, d)?;
    Ok((
        scorer,
        Layout {
            dimension: d,
            free: config.free,
            base,
        },
    ))
}

fn finish(best: Best, iterations: usize, restart_index: usize) -> OptimizationResult {
    OptimizationResult {
        best_settings: best.settings,
        best_objective: if best.score.violated || best.score.objective != 0.0 {
            best.score.objective
        } else {
            0.0
        },
        violated: best.score.violated,
        iterations_used: iterations,
        restart_index,
        trace: best.trace,
    }
}

/// Best result over `config.restarts` seeded local searches.
///
/// Restart `k` draws its starting point from a generator seeded with
/// `seed ^ k`. Ties go to the lower restart index.
pub fn maximize(
    expr: &BellExpression,
    complement: Option<&BellExpression>,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    if config.restarts == 0 {
        return Err(domain("restarts must be positive"));
    }
    let d = expr
        .scenario()
        .uniform_dimension()
        .ok_or_else(|| domain("quantum search needs equal outcome counts on every measurement"))?;
    let base = match &config.base {
        Some(b) => b.clone(),
        None => QuantumSettings::maximally_entangled(d, [0.0; 2], [0.0; 2])?,
    };
    let (scorer, layout) = prepare(expr, complement, config, base)?;
    let run = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ k as u64);
        let x0 = layout.random_start(&mut rng);
        let (best, iters) = local_search(&scorer, &layout, Start::Vector(x0), config);
        (k, best, iters)
    };
    let runs: Vec<(usize, Best, usize)> = if config.parallel {
        (0..config.restarts).into_par_iter().map(run).collect()
    } else {
        (0..config.restarts).map(run).collect()
    };
    let (k, best, iters) = runs
        .into_iter()
        .reduce(|acc, cand| {
            let key = |b: &Best| (b.score.objective, b.score.surrogate);
            if key(&cand.1) > key(&acc.1) {
                cand
            } else {
                acc
            }
        })
        .expect("at least one restart");
    Ok(finish(best, iters, k))
}

/// One local search started at `start`; never returns a worse objective.
pub fn refine(
    expr: &BellExpression,
    complement: Option<&BellExpression>,
    start: &QuantumSettings,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    if !validate_settings(start) {
        return Err(domain("start settings are not normalized"));
    }
    let base = config.base.clone().unwrap_or_else(|| start.clone());
    let (scorer, layout) = prepare(expr, complement, config, base)?;
    // Groups that are not free come from the start point itself.
    let layout = Layout {
        base: start.clone(),
        ..layout
    };
    let (best, iters) = local_search(&scorer, &layout, Start::Settings(start), config);
    Ok(finish(best, iters, 0))
}
