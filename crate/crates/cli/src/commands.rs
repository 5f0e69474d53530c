//! Subcommand implementations. Each writes its human-readable output to `out`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bellkit_core::analysis::{
    equality_tolerance_pinned, equality_tolerance_strict, inequality_tolerance,
};
use bellkit_core::bell::{gamma_coefficients, local_bounds, verify_complement};
use bellkit_core::fixtures::FixtureSet;
use bellkit_core::formats::{read, read_expression, read_settings, to_document, SettingsDoc};
use bellkit_core::optimize::{maximize, refine};
use bellkit_core::polytope::DimensionReport;
use bellkit_core::quantum::{noisy_value, quantum_value};
use bellkit_core::scenario::gamma_label;
use bellkit_core::{BellExpression, NoiseModel, QuantumSettings, Scenario};

use crate::config::{OptimizationReport, OptimizerConfigDoc};
use crate::error::{CliError, CliResult};
use crate::output::number;
use crate::verify::{self, Comparison, Value};

fn emit(out: &mut dyn Write, line: impl AsRef<str>) -> CliResult<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| CliError::Internal(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_expression(path: &Path) -> CliResult<BellExpression> {
    read_expression(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_settings(path: &Path) -> CliResult<(QuantumSettings, Option<NoiseModel>)> {
    read_settings(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_dimension(expr: &BellExpression, s: &QuantumSettings) -> CliResult<()> {
    if expr.scenario() != s.scenario() {
        return Err(CliError::Input(format!(
            "expression scenario {} does not match settings of dimension {}",
            expr.scenario(),
            s.dimension()
        )));
    }
    Ok(())
}

pub fn bounds(expression: &Path, gamma: bool, full: bool, out: &mut dyn Write) -> CliResult<()> {
    let expr = load_expression(expression)?;
    let b = local_bounds(&expr);
    emit(out, format!("lower {}", number(b.lower, full)))?;
    emit(out, format!("upper {}", number(b.upper, full)))?;
    if gamma {
        for (g, c) in gamma_coefficients(&expr).iter() {
            emit(out, format!("{} {}", gamma_label(g), number(c, full)))?;
        }
    }
    Ok(())
}

pub fn eval(
    expression: &Path,
    settings: &Path,
    noise: Option<f64>,
    full: bool,
    out: &mut dyn Write,
) -> CliResult<()> {
    let expr = load_expression(expression)?;
    let (s, file_noise) = load_settings(settings)?;
    check_dimension(&expr, &s)?;
    let noise = noise.map(NoiseModel::new).transpose()?.or(file_noise);
    emit(
        out,
        format!("quantum_value {}", number(quantum_value(&expr, &s)?, full)),
    )?;
    if let Some(n) = noise {
        emit(
            out,
            format!("noisy_value {}", number(noisy_value(&expr, &s, n)?, full)),
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToleranceMode {
    Inequality,
    EqualityPinned,
    EqualityStrict,
}

pub fn tolerance(
    expression: &Path,
    settings: &Path,
    mode: ToleranceMode,
    complement: Option<&Path>,
    full: bool,
    out: &mut dyn Write,
) -> CliResult<()> {
    let expr = load_expression(expression)?;
    let (s, _) = load_settings(settings)?;
    check_dimension(&expr, &s)?;
    let complement = complement.map(load_expression).transpose()?;
    if let Some(ec) = &complement {
        if mode == ToleranceMode::Inequality {
            return Err(CliError::Input(
                "--complement does not apply to inequality mode".into(),
            ));
        }
        if !verify_complement(&expr, ec)? {
            return Err(CliError::Input(
                "the two expressions are not complements".into(),
            ));
        }
    }
    let p = match mode {
        ToleranceMode::Inequality => {
            let q = quantum_value(&expr, &s)?;
            let b = local_bounds(&expr);
            if q <= b.upper && q >= b.lower {
                return Err(CliError::NoViolation(format!(
                    "quantum value {} lies inside [{}, {}]",
                    number(q, full),
                    number(b.lower, full),
                    number(b.upper, full)
                )));
            }
            inequality_tolerance(&expr, &s)?
        }
        ToleranceMode::EqualityPinned => {
            let ec = complement
                .as_ref()
                .ok_or_else(|| CliError::Input("equality-pinned mode needs --complement".into()))?;
            require_negative(ec, &s, full)?;
            equality_tolerance_pinned(&expr, ec, &s)?
        }
        ToleranceMode::EqualityStrict => {
            // With a pair, the complement carries the sign; alone, the file is E_c.
            let ec = complement.as_ref().unwrap_or(&expr);
            require_negative(ec, &s, full)?;
            equality_tolerance_strict(ec, &s)?
        }
    };
    emit(out, format!("tolerance {}", number(p, full)))
}

fn require_negative(ec: &BellExpression, s: &QuantumSettings, full: bool) -> CliResult<()> {
    let qc = quantum_value(ec, s)?;
    if qc >= 0.0 {
        return Err(CliError::NoViolation(format!(
            "complement value {} is not negative",
            number(qc, full)
        )));
    }
    Ok(())
}

pub fn parse_scenario(spec: &str) -> CliResult<Scenario> {
    let counts: Vec<usize> = spec
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("cannot parse scenario {spec:?}: {e}")))?;
    let [l1, l2, r1, r2] = counts[..] else {
        return Err(CliError::Input(format!(
            "scenario {spec:?} must have four comma-separated counts"
        )));
    };
    Ok(Scenario::new(l1, l2, r1, r2)?)
}

pub fn rank(spec: &str, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let r = DimensionReport::compute(parse_scenario(spec)?)?;
    emit(out, format!("scenario {}", r.scenario))?;
    emit(out, format!("closed_form_count {}", r.formula_count))?;
    emit(out, format!("literature_count {}", r.literature_count))?;
    emit(
        out,
        format!("numeric_affine_dimension {}", r.numeric_affine_dimension),
    )?;
    emit(out, format!("constraint_rank {}", r.constraint_rank))?;
    emit(out, format!("p_dimension {}", r.p_dimension))?;
    emit(out, format!("verdict {}", r.verdict()))?;
    if let Some(path) = output {
        write_file(path, &to_document(&r)?)?;
    }
    Ok(())
}

pub struct OptimizeArgs<'a> {
    pub expression: &'a Path,
    pub config: &'a Path,
    pub complement: Option<&'a Path>,
    pub start: Option<&'a Path>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub parallel: bool,
    /// Best settings are written here.
    pub output: PathBuf,
    /// Full result document, if wanted.
    pub report: Option<&'a Path>,
    pub full: bool,
}

pub fn optimize(args: OptimizeArgs<'_>, out: &mut dyn Write) -> CliResult<()> {
    let expr = load_expression(args.expression)?;
    let complement = args.complement.map(load_expression).transpose()?;
    let doc: OptimizerConfigDoc = read(args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut config = doc.to_config()?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(restarts) = args.restarts {
        if restarts == 0 {
            return Err(CliError::Input("--restarts must be positive".into()));
        }
        config.restarts = restarts;
    }
    config.parallel = args.parallel;
    let result = match args.start {
        Some(path) => {
            let (start, _) = load_settings(path)?;
            check_dimension(&expr, &start)?;
            refine(&expr, complement.as_ref(), &start, &config)?
        }
        None => maximize(&expr, complement.as_ref(), &config)?,
    };
    let report = OptimizationReport::new(expr.name().map(str::to_owned), &config, &result);
    write_file(
        &args.output,
        &to_document(&SettingsDoc::from_settings(&result.best_settings, None))?,
    )?;
    if let Some(path) = args.report {
        write_file(path, &to_document(&report)?)?;
    }
    emit(
        out,
        format!(
            "best_objective {}",
            number(result.best_objective, args.full)
        ),
    )?;
    emit(out, format!("violated {}", result.violated))?;
    emit(out, format!("restart_index {}", result.restart_index))?;
    emit(out, format!("iterations_used {}", result.iterations_used))?;
    emit(out, format!("settings_written {}", args.output.display()))?;
    if !result.violated {
        return Err(CliError::NoViolation(
            "no restart reached a violating point".into(),
        ));
    }
    Ok(())
}

fn show(v: Value, full: bool) -> String {
    match v {
        Value::Integer(n) => n.to_string(),
        Value::Real(x) => number(x, full),
    }
}

/// Runs the reproduction suite; returns whether every scored check passed.
pub fn verify(
    fixtures: Option<&Path>,
    output: &Path,
    full: bool,
    out: &mut dyn Write,
) -> CliResult<bool> {
    let set = match fixtures {
        Some(dir) => FixtureSet::load_dir(dir)
            .map_err(|e| CliError::Input(format!("fixtures in {}: {e}", dir.display())))?,
        None => FixtureSet::bundled(),
    };
    let report = verify::run(&set)?;
    for c in &report.checks {
        let tag = match (c.informational, c.pass) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        let op = match c.comparison {
            Comparison::Within if c.tolerance == 0.0 => {
                format!("expected {} exactly", show(c.expected, full))
            }
            Comparison::Within => {
                format!("expected {} +- {:e}", show(c.expected, full), c.tolerance)
            }
            Comparison::AtLeast => format!("expected at least {}", show(c.expected, full)),
        };
        emit(
            out,
            format!(
                "[{tag}] {}: computed {}, {op} ({})",
                c.name,
                show(c.computed, full),
                c.provenance
            ),
        )?;
        if let Some(note) = &c.note {
            emit(out, format!("       {note}"))?;
        }
    }
    let scored = report.scored().count();
    let passed = report.scored().filter(|c| c.pass).count();
    emit(
        out,
        format!(
            "{passed}/{scored} checks passed; report written to {}",
            output.display()
        ),
    )?;
    write_file(output, &to_document(&report)?)?;
    Ok(report.pass)
}
