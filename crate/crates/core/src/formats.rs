//! Versioned JSON documents for expressions and quantum settings.
//!
//! Every document carries `"format_version": "1"`. Setting indices `a`, `b`
//! are 1-based and outcome indices `i`, `j` are 0-based.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bell::BellExpression;
use crate::error::{Error, Result};
use crate::quantum::{NoiseModel, QuantumSettings};
use crate::scenario::{Scenario, TermIndex};

pub const FORMAT_VERSION: &str = "1";

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format_version {v:?}, expected {FORMAT_VERSION:?}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub a: usize,
    pub b: usize,
    pub i: usize,
    pub j: usize,
    pub c: f64,
}

/// On-disk form of a [`BellExpression`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionDoc {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub scenario: Scenario,
    pub terms: Vec<TermDoc>,
}

impl ExpressionDoc {
    pub fn from_expression(expr: &BellExpression) -> Self {
        ExpressionDoc {
            format_version: FORMAT_VERSION.into(),
            name: expr.name().map(str::to_owned),
            description: None,
            scenario: expr.scenario(),
            terms: expr
                .terms()
                .map(|(t, c)| TermDoc {
                    a: t.a,
                    b: t.b,
                    i: t.i,
                    j: t.j,
                    c,
                })
                .collect(),
        }
    }

    pub fn to_expression(&self) -> Result<BellExpression> {
        check_version(&self.format_version)?;
        let expr = BellExpression::new(
            self.scenario,
            self.terms
                .iter()
                .map(|t| (TermIndex::new(t.a, t.b, t.i, t.j), t.c)),
        )?;
        Ok(match &self.name {
            Some(n) => expr.with_name(n.clone()),
            None => expr,
        })
    }
}

/// On-disk form of [`QuantumSettings`], with an optional noise fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsDoc {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dimension: usize,
    /// `D x D` matrix of `[re, im]` pairs.
    #[serde(rename = "C")]
    pub c: Vec<Vec<[f64; 2]>>,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_p: Option<f64>,
}

impl SettingsDoc {
    pub fn from_settings(s: &QuantumSettings, noise: Option<NoiseModel>) -> Self {
        SettingsDoc {
            format_version: FORMAT_VERSION.into(),
            name: None,
            description: None,
            dimension: s.dimension(),
            c: s.rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            alpha: s.alpha,
            beta: s.beta,
            noise_p: noise.map(|n| n.p()),
        }
    }

    pub fn to_settings(&self) -> Result<QuantumSettings> {
        check_version(&self.format_version)?;
        let rows = self
            .c
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        QuantumSettings::new(self.dimension, rows, self.alpha, self.beta)
    }

    pub fn noise(&self) -> Result<Option<NoiseModel>> {
        self.noise_p.map(NoiseModel::new).transpose()
    }
}

/// Parses a JSON document from a string.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// Reads and parses a JSON document.
pub fn read<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path.as_ref())?;
    parse(&text)
}

/// Pretty JSON with a trailing newline.
pub fn to_document<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_expression(text: &str) -> Result<BellExpression> {
    parse::<ExpressionDoc>(text)?.to_expression()
}

pub fn read_expression(path: impl AsRef<Path>) -> Result<BellExpression> {
    read::<ExpressionDoc>(path)?.to_expression()
}

pub fn parse_settings(text: &str) -> Result<(QuantumSettings, Option<NoiseModel>)> {
    let doc: SettingsDoc = parse(text)?;
    Ok((doc.to_settings()?, doc.noise()?))
}

pub fn read_settings(path: impl AsRef<Path>) -> Result<(QuantumSettings, Option<NoiseModel>)> {
    let doc: SettingsDoc = read(path)?;
    Ok((doc.to_settings()?, doc.noise()?))
}
