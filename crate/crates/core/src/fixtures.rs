//! Bundled reference expressions and settings.
//!
//! The JSON sources live in `crates/core/fixtures/` and are compiled into the
//! library, so they are available regardless of the working directory.

use std::path::Path;

use crate::bell::BellExpression;
use crate::error::Result;
use crate::formats::{parse_expression, parse_settings, read_expression, read_settings};
use crate::quantum::QuantumSettings;

pub const INEQUALITY_I_FILE: &str = "inequality_i.json";
pub const EQUALITY_E_FILE: &str = "equality_e.json";
pub const EQUALITY_E_COMPLEMENT_FILE: &str = "equality_e_complement.json";
pub const SETTINGS_INEQUALITY_FILE: &str = "settings_inequality.json";
pub const SETTINGS_EQUALITY_FILE: &str = "settings_equality.json";

const INEQUALITY_I: &str = include_str!("../fixtures/inequality_i.json");
const EQUALITY_E: &str = include_str!("../fixtures/equality_e.json");
const EQUALITY_E_COMPLEMENT: &str = include_str!("../fixtures/equality_e_complement.json");
const SETTINGS_INEQUALITY: &str = include_str!("../fixtures/settings_inequality.json");
const SETTINGS_EQUALITY: &str = include_str!("../fixtures/settings_equality.json");

/// The 24-term `<33|33>` inequality with local bounds `-6 <= I <= 0`.
pub fn inequality_i() -> BellExpression {
    parse_expression(INEQUALITY_I).expect("bundled fixture parses")
}

/// The seven-term formal expression `E`.
pub fn equality_e() -> BellExpression {
    parse_expression(EQUALITY_E).expect("bundled fixture parses")
}

/// The six-term complement `E_c` of [`equality_e`].
pub fn equality_e_complement() -> BellExpression {
    parse_expression(EQUALITY_E_COMPLEMENT).expect("bundled fixture parses")
}

/// Non-maximally entangled diagonal state used with [`inequality_i`].
pub fn settings_inequality() -> QuantumSettings {
    parse_settings(SETTINGS_INEQUALITY)
        .expect("bundled fixture parses")
        .0
}

/// Lower-triangular state used with the `E` / `E_c` pair.
pub fn settings_equality() -> QuantumSettings {
    parse_settings(SETTINGS_EQUALITY)
        .expect("bundled fixture parses")
        .0
}

/// The full fixture set.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    pub inequality_i: BellExpression,
    pub equality_e: BellExpression,
    pub equality_e_complement: BellExpression,
    pub settings_inequality: QuantumSettings,
    pub settings_equality: QuantumSettings,
}

impl FixtureSet {
    pub fn bundled() -> Self {
        FixtureSet {
            inequality_i: inequality_i(),
            equality_e: equality_e(),
            equality_e_complement: equality_e_complement(),
            settings_inequality: settings_inequality(),
            settings_equality: settings_equality(),
        }
    }

    /// Loads the five fixture files from a directory.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        Ok(FixtureSet {
            inequality_i: read_expression(dir.join(INEQUALITY_I_FILE))?,
            equality_e: read_expression(dir.join(EQUALITY_E_FILE))?,
            equality_e_complement: read_expression(dir.join(EQUALITY_E_COMPLEMENT_FILE))?,
            settings_inequality: read_settings(dir.join(SETTINGS_INEQUALITY_FILE))?.0,
            settings_equality: read_settings(dir.join(SETTINGS_EQUALITY_FILE))?.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn term_counts() {
        assert_eq!(inequality_i().len(), 24);
        assert_eq!(equality_e().len(), 7);
        assert_eq!(equality_e_complement().len(), 6);
    }

    #[test]
    fn settings_match_closed_forms() {
        let r = |x: f64| Complex64::new(x.sqrt() / 60.0, 0.0);
        let im = |x: f64| Complex64::new(0.0, x.sqrt() / 60.0);
        let z = Complex64::new(0.0, 0.0);
        let expect = [
            [r(1302.0), z, z],
            [im(60.0), r(834.0), z],
            [im(60.0), im(132.0), r(1212.0)],
        ];
        let s = settings_equality();
        for (j, row) in expect.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                assert!(close(s.coefficient(j, k), c), "C[{j}][{k}]");
            }
        }
        assert_eq!((s.alpha, s.beta), ([0.07, 0.62], [0.16, -0.3]));

        let s = settings_inequality();
        let diag = [38.0_f64, 24.0, 38.0];
        for (j, d) in diag.iter().enumerate() {
            for k in 0..3 {
                let c = if j == k {
                    Complex64::new(d.sqrt() / 10.0, 0.0)
                } else {
                    z
                };
                assert!(close(s.coefficient(j, k), c));
            }
        }
        assert_eq!((s.alpha, s.beta), ([0.0, 0.5], [0.25, -0.25]));
    }

    #[test]
    fn directory_loading_matches_bundled() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let loaded = FixtureSet::load_dir(dir).unwrap();
        let bundled = FixtureSet::bundled();
        assert_eq!(loaded.inequality_i, bundled.inequality_i);
        assert_eq!(loaded.settings_equality, bundled.settings_equality);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        assert!(matches!(
            FixtureSet::load_dir("/nonexistent/bellkit"),
            Err(crate::Error::Io(_))
        ));
    }
}
