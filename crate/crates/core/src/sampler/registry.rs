//! The identity registry: a versioned JSON document naming, for every
//! identity, its witness family, the matrix sizes it holds for, and the
//! checks to evaluate.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::expr::{parse_expr, Expr};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Integer entries uniform in `[-10, 10]`.
    Generic,
    /// Calogero-Moser quadruples.
    Cm,
    /// Commuting pairs, rotating through the three constructions.
    Commuting,
    /// `rank([X,Y] + I) = 2`.
    Rank2,
    /// `rank([X,Y] + I) = 3`.
    Rank3,
}

/// Inclusive range of matrix sizes, written `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRange(pub usize, pub usize);

impl NRange {
    pub fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.0..=self.1
    }
}

/// `lhs == rhs`, both in the expression language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check(pub String, pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMove {
    Theta,
    PhiQuad,
    PsiQuad,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdentityKind {
    /// Every check must hold exactly on every witness.
    Expr { checks: Vec<Check> },
    /// Tuple-level and matrix-level actions of a random move must agree.
    Action { action: ActionMove },
    /// The realized tuple, `(v, w)` and `r1..r5` carry the weights of
    /// `(X, Y) -> (alpha X, Y)`.
    Scaling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub id: String,
    pub family: Family,
    pub n: NRange,
    pub description: String,
    #[serde(flatten)]
    pub kind: IdentityKind,
}

impl IdentityEntry {
    /// Parsed `(lhs, rhs)` pairs; empty for non-expression kinds.
    pub fn parsed_checks(&self) -> Result<Vec<(Expr, Expr)>> {
        match &self.kind {
            IdentityKind::Expr { checks } => checks
                .iter()
                .map(|Check(l, r)| Ok((parse_expr(l)?, parse_expr(r)?)))
                .collect(),
            _ => Ok(Vec::new()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    pub identities: Vec<IdentityEntry>,
}

impl Registry {
    /// Parses and validates a registry document: unique ids, sane size
    /// ranges, parseable checks.
    pub fn from_json(text: &str) -> Result<Self> {
        let reg: Registry = serde_json::from_str(text)?;
        let mut seen = BTreeSet::new();
        for e in &reg.identities {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate id {:?}", e.id)));
            }
            if e.n.0 < 1 || e.n.0 > e.n.1 {
                return Err(Error::Manifest(format!(
                    "{}: bad size range {:?}",
                    e.id, e.n
                )));
            }
            if matches!(e.kind, IdentityKind::Expr { ref checks } if checks.is_empty()) {
                return Err(Error::Manifest(format!("{}: no checks", e.id)));
            }
            if !matches!(e.kind, IdentityKind::Expr { .. }) && e.n != NRange(3, 3) {
                return Err(Error::Manifest(format!(
                    "{}: tuple-level entries need n = [3, 3]",
                    e.id
                )));
            }
            e.parsed_checks()?;
        }
        Ok(reg)
    }

    pub fn get(&self, id: &str) -> Result<&IdentityEntry> {
        self.identities
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.identities.iter().map(|e| e.id.as_str()).collect()
    }
}

pub const REGISTRY_JSON: &str = include_str!("../../data/identities.json");

/// The shipped registry.
pub fn default_registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::from_json(REGISTRY_JSON).expect("shipped identity registry is valid")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_registry_loads() {
        let reg = default_registry();
        assert!(reg.version >= 1);
        for id in ["eq2.2", "eq2.6", "eq2.7", "rel.equiv"] {
            reg.get(id).unwrap();
        }
        assert!(matches!(reg.get("nope"), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn validation_rejects_bad_documents() {
        let dup = r#"{"version":1,"identities":[
            {"id":"a","family":"generic","n":[3,3],"description":"","kind":"expr","checks":[["1","1"]]},
            {"id":"a","family":"generic","n":[3,3],"description":"","kind":"expr","checks":[["1","1"]]}]}"#;
        assert!(matches!(Registry::from_json(dup), Err(Error::Manifest(_))));
        let bad_expr = r#"{"version":1,"identities":[
            {"id":"a","family":"cm","n":[2,3],"description":"","kind":"expr","checks":[["tr(","1"]]}]}"#;
        assert!(matches!(
            Registry::from_json(bad_expr),
            Err(Error::Expression { .. })
        ));
        let bad_range = r#"{"version":1,"identities":[
            {"id":"a","family":"cm","n":[4,3],"description":"","kind":"expr","checks":[["1","1"]]}]}"#;
        assert!(Registry::from_json(bad_range).is_err());
    }
}
