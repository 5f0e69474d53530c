//! Reproduction suite over the bundled fixtures.

use bellkit_core::analysis::{
    equality_tolerance_pinned, equality_tolerance_strict, equality_violation_amount,
    inequality_tolerance, violation_factor, violation_range,
};
use bellkit_core::bell::{gamma_coefficients, local_bounds, local_bounds_enumerated};
use bellkit_core::fixtures::FixtureSet;
use bellkit_core::formats::FORMAT_VERSION;
use bellkit_core::optimize::maximize;
use bellkit_core::polytope::DimensionReport;
use bellkit_core::quantum::{noisy_value, quantum_value};
use bellkit_core::{
    FreeParameters, NoiseModel, OptimizationConfig, Result, Scenario, ViolationMode,
};
use serde::{Deserialize, Serialize};

/// Seed used by the optimizer checks.
pub const VERIFY_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Integer(i64),
    Real(f64),
}

impl Value {
    fn as_f64(self) -> f64 {
        match self {
            Value::Integer(n) => n as f64,
            Value::Real(x) => x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed - expected| <= tolerance`.
    Within,
    /// `computed >= expected - tolerance`.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub computed: Value,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Informational checks do not count towards the overall verdict.
    pub informational: bool,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format_version: String,
    pub version: String,
    pub timestamp: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn scored(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.informational)
    }

    pub fn informational(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.informational)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(
        &mut self,
        name: &str,
        expected: Value,
        computed: Value,
        tolerance: f64,
        comparison: Comparison,
        provenance: &str,
    ) -> &mut Check {
        let (e, c) = (expected.as_f64(), computed.as_f64());
        let pass = match comparison {
            Comparison::Within => (c - e).abs() <= tolerance,
            Comparison::AtLeast => c >= e - tolerance,
        };
        self.checks.push(Check {
            name: name.into(),
            expected,
            computed,
            tolerance,
            comparison,
            pass,
            informational: false,
            provenance: provenance.into(),
            note: None,
        });
        self.checks.last_mut().expect("just pushed")
    }

    fn real(
        &mut self,
        name: &str,
        expected: f64,
        computed: f64,
        tolerance: f64,
        provenance: &str,
    ) -> &mut Check {
        self.push(
            name,
            Value::Real(expected),
            Value::Real(computed),
            tolerance,
            Comparison::Within,
            provenance,
        )
    }

    fn int(
        &mut self,
        name: &str,
        expected: usize,
        computed: usize,
        provenance: &str,
    ) -> &mut Check {
        self.push(
            name,
            Value::Integer(expected as i64),
            Value::Integer(computed as i64),
            0.0,
            Comparison::Within,
            provenance,
        )
    }

    fn at_least(
        &mut self,
        name: &str,
        expected: f64,
        computed: f64,
        provenance: &str,
    ) -> &mut Check {
        self.push(
            name,
            Value::Real(expected),
            Value::Real(computed),
            0.0,
            Comparison::AtLeast,
            provenance,
        )
    }
}

const PUBLISHED: &str = "published value";
const DERIVED: &str = "derived independently";
const IDENTITY: &str = "exact identity";

/// Runs every check against `fx`.
pub fn run(fx: &FixtureSet) -> Result<VerificationReport> {
    let (i, e, ec) = (&fx.inequality_i, &fx.equality_e, &fx.equality_e_complement);
    let (si, se) = (&fx.settings_inequality, &fx.settings_equality);
    let mut suite = Suite { checks: Vec::new() };

    let bi = local_bounds(i);
    let bie = local_bounds_enumerated(i);
    suite.real("I lower bound", -6.0, bi.lower, 1e-12, PUBLISHED);
    suite.real("I upper bound", 0.0, bi.upper, 1e-12, PUBLISHED);
    suite.real(
        "I lower bound by enumeration",
        -6.0,
        bie.lower,
        1e-12,
        PUBLISHED,
    );
    let be = local_bounds(e);
    let bec = local_bounds(ec);
    suite.real("E lower bound", 0.0, be.lower, 1e-12, PUBLISHED);
    suite.real("E upper bound", 1.0, be.upper, 1e-12, PUBLISHED);
    suite.real("E_c lower bound", 0.0, bec.lower, 1e-12, PUBLISHED);
    suite.real("E_c upper bound", 1.0, bec.upper, 1e-12, PUBLISHED);

    let (ge, gec) = (gamma_coefficients(e), gamma_coefficients(ec));
    let farthest = ge
        .values()
        .iter()
        .zip(gec.values())
        .map(|(x, y)| x + y)
        .max_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
        .unwrap_or(f64::NAN);
    suite
        .real("complement identity", 1.0, farthest, 1e-12, IDENTITY)
        .note = Some("gamma coefficients of E plus E_c, entry farthest from 1".into());
    let ones = |v: &[f64]| v.iter().filter(|&&c| c == 1.0).count();
    suite.int("E unit gamma entries", 45, ones(ge.values()), PUBLISHED);
    suite.int("E_c unit gamma entries", 36, ones(gec.values()), PUBLISHED);

    let qi = quantum_value(i, si)?;
    suite.real("I quantum value", 0.91485, qi, 1e-4, PUBLISHED);
    suite.real(
        "I tolerance",
        0.31386,
        inequality_tolerance(i, si)?,
        1e-4,
        PUBLISHED,
    );
    let qe = quantum_value(e, se)?;
    let qc = quantum_value(ec, se)?;
    suite.real("E quantum value", 1.14895, qe, 1e-4, PUBLISHED);
    suite.real("E_c quantum value", -0.14895, qc, 1e-4, PUBLISHED);
    suite.real("E + E_c quantum value", 1.0, qe + qc, 1e-12, IDENTITY);

    let pinned = equality_tolerance_pinned(e, ec, se)?;
    suite.real("E pinned tolerance", 0.50203, pinned, 1e-4, PUBLISHED);
    let noisy = noisy_value(ec, se, NoiseModel::new(pinned)?)?;
    suite.real(
        "noisy E_c at pinned tolerance",
        0.14895,
        noisy,
        1e-4,
        PUBLISHED,
    );

    let delta = equality_violation_amount(e, ec, se)?;
    let range = violation_range(e, ViolationMode::Equality, Some(ec), Some(se))?;
    suite.real("E violation amount", 0.29790, delta, 1e-4, PUBLISHED);
    suite.real("E violation range", 0.85105, range, 1e-4, PUBLISHED);
    suite.real(
        "E violation factor",
        1.35004,
        violation_factor(delta, range)?,
        1e-4,
        PUBLISHED,
    );
    let ri = violation_range(i, ViolationMode::Inequality, None, None)?;
    suite.real(
        "I violation factor",
        1.152475,
        violation_factor(qi, ri)?,
        1e-5,
        PUBLISHED,
    );
    suite.real(
        "maximally entangled violation factor",
        1.14549,
        violation_factor(0.87293, 6.0)?,
        1e-5,
        PUBLISHED,
    );

    let r2233 = DimensionReport::compute(Scenario::new(2, 2, 3, 3)?)?;
    let r3333 = DimensionReport::compute(Scenario::uniform(3)?)?;
    let r2222 = DimensionReport::compute(Scenario::uniform(2)?)?;
    suite.int(
        "closed-form count <22|33>",
        15,
        r2233.formula_count,
        PUBLISHED,
    );
    suite.int(
        "closed-form count <33|33>",
        25,
        r3333.formula_count,
        PUBLISHED,
    );
    suite.int(
        "affine dimension <22|22>",
        8,
        r2222.numeric_affine_dimension,
        DERIVED,
    );

    let free = maximize(
        i,
        None,
        &OptimizationConfig {
            restarts: 20,
            seed: VERIFY_SEED,
            ..Default::default()
        },
    )?;
    suite.at_least(
        "optimized I violation",
        0.9148,
        free.best_objective,
        PUBLISHED,
    );
    let pinned_state = maximize(
        i,
        None,
        &OptimizationConfig {
            free: FreeParameters::PHASES,
            restarts: 20,
            seed: VERIFY_SEED,
            ..Default::default()
        },
    )?;
    suite.at_least(
        "optimized I violation, maximally entangled",
        0.872,
        pinned_state.best_objective,
        PUBLISHED,
    );

    for r in [&r3333, &r2233] {
        let c = suite.int(
            &format!(
                "numeric affine dimension {} against closed form",
                r.scenario
            ),
            r.formula_count,
            r.numeric_affine_dimension,
            PUBLISHED,
        );
        c.informational = true;
        c.note = Some(format!(
            "literature count {}; {}",
            r.literature_count,
            r.verdict()
        ));
    }
    let strict = equality_tolerance_strict(ec, se)?;
    let c = suite.real("E_c strict tolerance", 0.25102, strict, 1e-4, DERIVED);
    c.informational = true;
    c.note = Some(format!(
        "strict reading: the violation ends once the noisy E_c reaches 0; \
         the pinned reading keeps the local value of E at 1 - |E_c| and gives {pinned}"
    ));

    let pass = suite
        .checks
        .iter()
        .filter(|c| !c.informational)
        .all(|c| c.pass);
    Ok(VerificationReport {
        format_version: FORMAT_VERSION.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        pass,
        checks: suite.checks,
    })
}
