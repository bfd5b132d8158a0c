//! JSON model files.
//!
//! A model is either a bare constraint object or
//! `{"constraint": {...}, "tolerances": {...}}`. Unknown fields are rejected
//! and every schema error carries its line and column.

use std::fs;
use std::path::Path;

use qproj::constraint::{mixed_constraint, quartic_constraint_with_coupling, SnapPolicy, MIN_QUARTIC_DIM};
use qproj::operator::Term;
use qproj::{build_operator, BasisSpec, GridSpec, OperatorExpr, OperatorMatrix, Polynomial, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn default_quartic_dim() -> usize {
    128
}

fn default_coupling() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    pub q_min: f64,
    pub q_max: f64,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawConstraint {
    Quartic {
        #[serde(default = "default_quartic_dim")]
        dim: usize,
        #[serde(default)]
        snap_level: Option<usize>,
        #[serde(default)]
        c: Option<f64>,
        #[serde(default = "default_coupling")]
        coupling: f64,
    },
    Mixed {
        grid: GridInput,
    },
    Polynomial {
        dim: usize,
        terms: Vec<Term>,
    },
    Diagonal {
        values: Vec<f64>,
    },
}

/// A validated constraint description.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "RawConstraint")]
pub enum ConstraintSpec {
    /// `P^2 + Q^2 + g Q^4 - c` on `dim` Fock levels.
    Quartic { dim: usize, coupling: f64, policy: SnapPolicy },
    /// `p^2 + V(q)` on a Dirichlet grid.
    Mixed { grid: GridSpec },
    /// Arbitrary `P, Q` polynomial on `dim` Fock levels.
    Polynomial { dim: usize, polynomial: Polynomial },
    /// Diagonal operator with the given spectrum.
    Diagonal { values: Vec<f64> },
}

impl TryFrom<RawConstraint> for ConstraintSpec {
    type Error = String;

    fn try_from(raw: RawConstraint) -> Result<Self, String> {
        match raw {
            RawConstraint::Quartic { dim, snap_level, c, coupling } => {
                if dim < MIN_QUARTIC_DIM {
                    return Err(format!("quartic dim must be at least {MIN_QUARTIC_DIM}, got {dim}"));
                }
                if !(coupling >= 0.0 && coupling.is_finite()) {
                    return Err(format!("coupling must be finite and non-negative, got {coupling}"));
                }
                let policy = match (snap_level, c) {
                    (Some(_), Some(_)) => return Err("give either snap_level or c, not both".into()),
                    (None, Some(c)) => SnapPolicy::ExplicitC(c),
                    (Some(k), None) => SnapPolicy::SnapToLevel(k),
                    (None, None) => SnapPolicy::default(),
                };
                if let SnapPolicy::SnapToLevel(k) = policy {
                    if k >= dim {
                        return Err(format!("snap_level {k} outside the {dim}-level spectrum"));
                    }
                }
                Ok(ConstraintSpec::Quartic { dim, coupling, policy })
            }
            RawConstraint::Mixed { grid } => {
                let spec = match (grid.points, grid.spacing) {
                    (Some(n), None) => GridSpec::new(grid.q_min, grid.q_max, n),
                    (None, Some(h)) => GridSpec::with_spacing(grid.q_min, grid.q_max, h),
                    _ => return Err("grid needs exactly one of points or spacing".into()),
                };
                Ok(ConstraintSpec::Mixed { grid: spec.map_err(|e| e.to_string())? })
            }
            RawConstraint::Polynomial { dim, terms } => {
                if dim < 2 {
                    return Err(format!("polynomial dim must be at least 2, got {dim}"));
                }
                if let Some(t) = terms.iter().find(|t| !t.coeff.is_finite() || t.word.chars().any(|c| c != 'P' && c != 'Q')) {
                    return Err(format!("term {t:?} needs a finite coeff and a word over P and Q"));
                }
                Ok(ConstraintSpec::Polynomial { dim, polynomial: Polynomial { terms } })
            }
            RawConstraint::Diagonal { values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return Err("diagonal values must be a non-empty list of finite numbers".into());
                }
                Ok(ConstraintSpec::Diagonal { values })
            }
        }
    }
}

/// Optional numerical overrides.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute `eps_zero`; defaults to `1e-8 ||Phi||`.
    #[serde(default)]
    pub zero_tolerance: Option<f64>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub constraint: ConstraintSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A constraint operator built from a model.
#[derive(Debug, Clone)]
pub struct BuiltConstraint {
    pub operator: OperatorMatrix,
    /// Constant subtracted from the quartic Hamiltonian.
    pub c: Option<f64>,
}

impl Model {
    pub fn from_json(path: &Path, text: &str) -> CliResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::schema(path, text, &e))?;
        let wrapped = value.as_object().is_some_and(|o| o.contains_key("constraint"));
        let model = if wrapped {
            serde_json::from_str::<Model>(text)
        } else {
            serde_json::from_str::<ConstraintSpec>(text).map(|constraint| Model { constraint, tolerances: Tolerances::default() })
        };
        let model = model.map_err(|e| CliError::schema(path, text, &e))?;
        if let Some(eps) = model.tolerances.zero_tolerance {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(CliError::Input(format!("zero_tolerance must be positive, got {eps}")));
            }
        }
        model.tolerances.quadrature.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(path, &text)
    }

    pub fn build(&self) -> CliResult<BuiltConstraint> {
        Ok(match &self.constraint {
            ConstraintSpec::Quartic { dim, coupling, policy } => {
                let q = quartic_constraint_with_coupling(*dim, *coupling, *policy)?;
                BuiltConstraint { operator: q.operator, c: Some(q.c) }
            }
            ConstraintSpec::Mixed { grid } => BuiltConstraint { operator: mixed_constraint(grid)?, c: None },
            ConstraintSpec::Polynomial { dim, polynomial } => {
                let op = build_operator(&OperatorExpr::Polynomial(polynomial.clone()), &BasisSpec::fock(*dim)?)?;
                BuiltConstraint { operator: op, c: None }
            }
            ConstraintSpec::Diagonal { values } => {
                BuiltConstraint { operator: OperatorMatrix::from_diagonal(values), c: None }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<Model> {
        Model::from_json(Path::new("model.json"), text)
    }

    #[test]
    fn bare_and_wrapped_forms() {
        let bare = parse(r#"{"kind": "quartic", "dim": 64}"#).unwrap();
        let wrapped = parse(r#"{"constraint": {"kind": "quartic", "dim": 64}, "tolerances": {}}"#).unwrap();
        assert_eq!(bare, wrapped);
        assert_eq!(
            bare.constraint,
            ConstraintSpec::Quartic { dim: 64, coupling: 1.0, policy: SnapPolicy::SnapToLevel(0) }
        );
    }

    #[test]
    fn unknown_field_is_line_anchored() {
        let err = parse("{\n  \"kind\": \"quartic\",\n  \"dimension\": 64\n}").unwrap_err();
        match err {
            CliError::Schema { line, column, ref message, .. } => {
                assert_eq!((line, column), (3, 3));
                assert!(message.contains("dimension"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse("{\"kind\": \"quartic\",").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn nested_errors_are_anchored() {
        let text = "{\"constraint\": {\n  \"kind\": \"mixed\",\n  \"grid\": {\"q_min\": -1, \"q_max\": 1, \"step\": 0.1}\n}}";
        match parse(text).unwrap_err() {
            CliError::Schema { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse("{\n\"kind\": \"quartic\", \"c\": 1, \"snap_level\": 2}").unwrap_err() {
            CliError::Schema { line, column, .. } => assert_eq!((line, column), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_are_schema_errors() {
        for text in [
            r#"{"kind": "quartic", "c": 1.0, "snap_level": 0}"#,
            r#"{"kind": "quartic", "dim": 8}"#,
            r#"{"kind": "mixed", "grid": {"q_min": -1, "q_max": 1}}"#,
            r#"{"kind": "polynomial", "dim": 8, "terms": [{"coeff": 1, "word": "PX"}]}"#,
            r#"{"kind": "diagonal", "values": []}"#,
            r#"{"kind": "cubic"}"#,
        ] {
            assert_eq!(parse(text).unwrap_err().exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn mixed_grid_by_spacing() {
        let m = parse(r#"{"kind": "mixed", "grid": {"q_min": -10, "q_max": 10, "spacing": 0.5}}"#).unwrap();
        let op = m.build().unwrap().operator;
        assert_eq!(op.dim(), 39);
    }

    #[test]
    fn polynomial_model_builds_oscillator() {
        let m = parse(r#"{"kind": "polynomial", "dim": 16, "terms": [{"coeff": 1, "word": "PP"}, {"coeff": 1, "word": "QQ"}, {"coeff": -1, "word": ""}]}"#)
            .unwrap();
        let op = m.build().unwrap().operator;
        assert!((op.entry(0, 0).re).abs() < 1e-12);
        assert!((op.entry(3, 3).re - 6.0).abs() < 1e-12);
    }
}
