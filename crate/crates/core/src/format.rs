//! JSON text format for generic SWCSP files.
//!
//! ```json
//! {
//!   "variables":   [{"name": "v1", "domain": ["a", "b"]}],
//!   "unary_costs": [{"var": "v1", "costs": {"a": 1.0}, "default": 0.0}],
//!   "constraints": [{"scope": ["v1", "v2"], "allowed": [["a", "a"]]}]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ProblemError;
use crate::problem::{Assignment, Constraint, Domain, Swcsp, UnaryCost, Value, VariableSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<VariableEntry>,
    #[serde(default)]
    pub unary_costs: Vec<CostEntry>,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEntry {
    pub var: String,
    pub costs: BTreeMap<String, f64>,
    #[serde(default)]
    pub default: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub scope: Vec<String>,
    pub allowed: Vec<Vec<String>>,
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<Swcsp, ProblemError> {
        let index: BTreeMap<&str, usize> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ProblemError::UnknownVariable(name.to_string()))
        };

        let mut soft = Vec::new();
        for entry in &self.unary_costs {
            let var = lookup(&entry.var)?;
            let domain = &self.variables[var].domain;
            let mut table = BTreeMap::new();
            for (value, &cost) in &entry.costs {
                if !domain.contains(value) {
                    return Err(ProblemError::ValueNotInDomain {
                        var: entry.var.clone(),
                        value: value.clone(),
                    });
                }
                table.insert(Value::from(value.as_str()), cost);
            }
            soft.push((var, UnaryCost::new(table, entry.default)?));
        }

        let mut constraints = Vec::new();
        for entry in &self.constraints {
            let scope = entry.scope.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
            let allowed: BTreeSet<Vec<Value>> = entry
                .allowed
                .iter()
                .map(|t| t.iter().map(|x| Value::from(x.as_str())).collect())
                .collect();
            constraints.push(Constraint::Table { scope, allowed });
        }

        let variables = self
            .variables
            .into_iter()
            .map(|v| VariableSpec {
                name: v.name,
                domain: Domain::Explicit(v.domain.into_iter().map(Value::from).collect()),
            })
            .collect();
        Swcsp::new(variables, constraints, soft)
    }

    /// Serialize a problem with explicit domains and table constraints.
    pub fn from_problem(problem: &Swcsp) -> Result<Self, ProblemError> {
        let name = |v: usize| problem.variables()[v].name.clone();
        let mut variables = Vec::new();
        let mut unary_costs = Vec::new();
        for var in problem.variables() {
            let Domain::Explicit(values) = problem.domain(var.id) else {
                return Err(ProblemError::Unsupported(format!(
                    "`{}` has an implicit string domain",
                    var.name
                )));
            };
            variables.push(VariableEntry {
                name: var.name.clone(),
                domain: values.iter().map(|x| x.to_string()).collect(),
            });
            if let Some(cost) = problem.soft(var.id) {
                unary_costs.push(CostEntry {
                    var: var.name.clone(),
                    costs: cost.table.iter().map(|(k, c)| (k.to_string(), *c)).collect(),
                    default: cost.default,
                });
            }
        }
        let mut constraints = Vec::new();
        for c in problem.constraints() {
            let Constraint::Table { scope, allowed } = c else {
                return Err(ProblemError::Unsupported(
                    "only table constraints can be written as JSON".into(),
                ));
            };
            constraints.push(ConstraintEntry {
                scope: scope.iter().map(|&v| name(v)).collect(),
                allowed: allowed
                    .iter()
                    .map(|t| t.iter().map(|x| x.to_string()).collect())
                    .collect(),
            });
        }
        Ok(ProblemFile {
            variables,
            unary_costs,
            constraints,
        })
    }
}

pub fn parse_problem(text: &str) -> Result<Swcsp, ProblemError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Format(e.to_string()))?;
    file.into_problem()
}

pub fn render_problem(problem: &Swcsp) -> Result<String, ProblemError> {
    let file = ProblemFile::from_problem(problem)?;
    serde_json::to_string_pretty(&file).map_err(|e| ProblemError::Format(e.to_string()))
}

/// Bindings keyed by variable name.
pub fn assignment_by_name(problem: &Swcsp, s: &Assignment) -> BTreeMap<String, String> {
    s.iter()
        .map(|(v, x)| (problem.variables()[v].name.clone(), x.to_string()))
        .collect()
}

pub fn assignment_from_names(problem: &Swcsp, bindings: &BTreeMap<String, String>) -> Result<Assignment, ProblemError> {
    let mut out = Assignment::empty();
    for (name, value) in bindings {
        let v = problem
            .variable_by_name(name)
            .ok_or_else(|| ProblemError::UnknownVariable(name.clone()))?;
        out.bind(v, Value::from(value.as_str()));
    }
    problem.validate_assignment(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: &str = r#"{
        "variables": [{"name": "v1", "domain": ["a", "b"]}, {"name": "v2", "domain": ["a", "b"]}],
        "unary_costs": [
            {"var": "v1", "costs": {"a": 1, "b": 0}, "default": 0},
            {"var": "v2", "costs": {"a": 0, "b": 3}, "default": 0}
        ],
        "constraints": [{"scope": ["v1", "v2"], "allowed": [["a", "a"], ["b", "b"]]}]
    }"#;

    #[test]
    fn parses_t1() {
        assert_eq!(parse_problem(T1).unwrap(), crate::instances::t1());
    }

    #[test]
    fn round_trips() {
        let p = crate::instances::europe();
        assert_eq!(parse_problem(&render_problem(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"variables": [], "extra": 1}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::Format(_))));
        let text = r#"{"variables": [{"name": "x", "domain": ["a"], "color": "red"}]}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::Format(_))));
    }

    #[test]
    fn rejects_negative_costs() {
        let text = r#"{"variables": [{"name": "x", "domain": ["a"]}],
            "unary_costs": [{"var": "x", "costs": {"a": -2}, "default": 0}]}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::BadCost(_))));
        let text = r#"{"variables": [{"name": "x", "domain": ["a"]}],
            "unary_costs": [{"var": "x", "costs": {}, "default": -1}]}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::BadCost(_))));
    }

    #[test]
    fn rejects_bad_references() {
        let text = r#"{"variables": [{"name": "x", "domain": ["a"]}],
            "constraints": [{"scope": ["x", "y"], "allowed": []}]}"#;
        assert_eq!(parse_problem(text), Err(ProblemError::UnknownVariable("y".into())));
        let text = r#"{"variables": [{"name": "x", "domain": ["a"]}],
            "constraints": [{"scope": ["x"], "allowed": [["b"]]}]}"#;
        assert!(matches!(
            parse_problem(text),
            Err(ProblemError::ValueNotInDomain { .. })
        ));
    }
}
