//! Bulk exact verification of registered identities.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

use super::expr::{Env, Value};
use super::registry::{
    default_registry, ActionMove, Family, IdentityEntry, IdentityKind, Registry,
};
use super::{
    commuting_pair, generic_pair, random_cm_point, random_nonzero_rational, random_rational,
    rank_k_pair, trial_rng, CommutingFamily,
};
use crate::cremona::{action_levels, Move};
use crate::error::Result;
use crate::exec::Execution;
use crate::invariants::traceless_pair;
use crate::json::{encode_matrix, encode_pair, encode_reduced, Pair};
use crate::relations::check_scaling;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub family: Family,
    /// Total trials over every matrix size in the entry's range.
    pub trials: usize,
    pub failures: usize,
    /// The first failing trial in `(n, trial)` order.
    pub first_failure: Option<Json>,
    pub elapsed_ms: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// FNV-1a, so that each identity draws its own witnesses under one seed.
fn id_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Witness of the given family. Commuting witnesses rotate through the
/// three constructions by trial index.
pub(crate) fn witness(
    family: Family,
    n: usize,
    trial: usize,
    rng: &mut impl Rng,
) -> Result<Pair<Rational>> {
    Ok(match family {
        Family::Generic => {
            let (x, y) = generic_pair(n, rng);
            Pair::new(x, y)
        }
        Family::Cm => random_cm_point(n, rng).pair(),
        Family::Commuting => {
            let (x, y) = commuting_pair(CommutingFamily::ALL[trial % 3], rng);
            Pair::new(x, y)
        }
        Family::Rank2 | Family::Rank3 => {
            let k = if family == Family::Rank2 { 2 } else { 3 };
            let (x, y) = rank_k_pair(k, rng)?;
            Pair::new(x, y)
        }
    })
}

fn encode_value(v: &Value<Rational>) -> Json {
    match v {
        Value::Scalar(s) => s.encode(),
        Value::Matrix(m) => encode_matrix(m),
    }
}

/// Random `SL2` matrix with small rational entries.
pub(crate) fn random_sl2(rng: &mut impl Rng) -> [[Rational; 2]; 2] {
    let s = random_rational(rng);
    let t = random_rational(rng);
    let d = random_nonzero_rational(rng);
    // [[d, 0], [0, 1/d]] [[1, s], [0, 1]] [[1, 0], [t, 1]]
    let one = Rational::from_i64(1);
    let m01 = s.clone();
    let m00 = &one + &s * &t;
    [[&d * &m00, &d * &m01], [&t / &d, &one / &d]]
}

pub(crate) fn random_move(kind: ActionMove, rng: &mut impl Rng) -> Move<Rational> {
    match kind {
        ActionMove::Theta => Move::theta(random_sl2(rng)).expect("product of unimodular factors"),
        ActionMove::PhiQuad => Move::phi_quad(random_nonzero_rational(rng)),
        ActionMove::PsiQuad => Move::psi_quad(random_nonzero_rational(rng)),
    }
}

/// One trial; `None` on success, the witness on failure.
fn run_trial(
    entry: &IdentityEntry,
    checks: &[(super::Expr, super::Expr)],
    seed: u64,
    n: usize,
    trial: usize,
) -> Option<Json> {
    let mut rng = trial_rng(seed, trial as u64, n);
    let base = json!({"n": n, "trial": trial});
    let fail = |extra: Json| {
        let mut out = base.clone();
        if let (Some(o), Json::Object(e)) = (out.as_object_mut(), extra) {
            o.extend(e);
        }
        Some(out)
    };
    let pair = match witness(entry.family, n, trial, &mut rng) {
        Ok(p) => p,
        Err(e) => return fail(json!({"error": e.to_string()})),
    };
    match &entry.kind {
        IdentityKind::Expr { checks: raw } => {
            let env = match Env::new(
                pair.x.clone(),
                pair.y.clone(),
                pair.c.clone(),
                pair.r.clone(),
            ) {
                Ok(env) => env,
                Err(e) => {
                    return fail(json!({"witness": encode_pair(&pair), "error": e.to_string()}))
                }
            };
            for (k, (lhs, rhs)) in checks.iter().enumerate() {
                let l = env.eval(lhs, &raw[k].0);
                let r = env.eval(rhs, &raw[k].1);
                match (l, r) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Ok(l), Ok(r)) => {
                        return fail(json!({
                            "witness": encode_pair(&pair),
                            "check": [raw[k].0, raw[k].1],
                            "lhs": encode_value(&l),
                            "rhs": encode_value(&r),
                        }))
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        return fail(
                            json!({"witness": encode_pair(&pair), "check": [raw[k].0, raw[k].1], "error": e.to_string()}),
                        )
                    }
                }
            }
            None
        }
        IdentityKind::Action { action } => {
            let mv = random_move(*action, &mut rng);
            let outcome =
                traceless_pair(&pair.x, &pair.y).and_then(|(a, b)| action_levels(&mv, &a, &b));
            match outcome {
                Ok((tl, ml)) if tl == ml => None,
                Ok((tl, ml)) => fail(json!({
                    "witness": encode_pair(&pair),
                    "move": mv.to_json(),
                    "tuple_level": encode_reduced(&tl),
                    "matrix_level": encode_reduced(&ml),
                })),
                Err(e) => fail(
                    json!({"witness": encode_pair(&pair), "move": mv.to_json(), "error": e.to_string()}),
                ),
            }
        }
        IdentityKind::Scaling => {
            let alpha = random_nonzero_rational(&mut rng);
            match check_scaling(&pair.x, &pair.y, &alpha) {
                Ok(true) => None,
                Ok(false) => fail(json!({"witness": encode_pair(&pair), "alpha": alpha.encode()})),
                Err(e) => fail(json!({"witness": encode_pair(&pair), "error": e.to_string()})),
            }
        }
    }
}

fn run_entry(
    entry: &IdentityEntry,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<IdentityReport> {
    let start = Instant::now();
    let checks = entry.parsed_checks()?;
    let seed = seed ^ id_hash(&entry.id);
    let sizes: Vec<usize> = entry.n.sizes().collect();
    let total = sizes.len() * trials;
    let outcomes = exec.map(total, |k| {
        run_trial(entry, &checks, seed, sizes[k / trials], k % trials)
    });
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    Ok(IdentityReport {
        id: entry.id.clone(),
        family: entry.family,
        trials: total,
        failures,
        first_failure: outcomes.into_iter().flatten().next(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs `trials` exact trials per matrix size for each id of the shipped
/// registry. Reports come back sorted by id.
pub fn run_identity_suite(ids: &[String], trials: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    run_identity_suite_with(default_registry(), ids, trials, seed, Execution::default())
}

pub fn run_identity_suite_with(
    registry: &Registry,
    ids: &[String],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<IdentityReport>> {
    let mut entries = ids
        .iter()
        .map(|id| registry.get(id))
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    entries.dedup_by(|a, b| a.id == b.id);
    entries
        .into_iter()
        .map(|e| run_entry(e, trials, seed, exec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pinned_examples_pass() {
        let reports = run_identity_suite(&ids(&["eq2.2", "eq2.6", "eq2.7"]), 20, 1).unwrap();
        for r in &reports {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn unknown_id_is_an_error() {
        assert!(matches!(
            run_identity_suite(&ids(&["eq9.9"]), 1, 0),
            Err(Error::UnknownIdentity(_))
        ));
    }

    #[test]
    fn deterministic_across_strategies() {
        let reg = default_registry();
        let strip = |mut v: Vec<IdentityReport>| {
            v.iter_mut().for_each(|r| r.elapsed_ms = 0.0);
            v
        };
        let i = ids(&["eq2.4", "act.theta.cm"]);
        let a = strip(run_identity_suite_with(reg, &i, 5, 3, Execution::Sequential).unwrap());
        let b = strip(run_identity_suite_with(reg, &i, 5, 3, Execution::Parallel).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn failures_carry_witness() {
        let doc = r#"{"version":1,"identities":[
            {"id":"wrong","family":"generic","n":[2,3],"description":"","kind":"expr","checks":[["tr(A)","1"]]}]}"#;
        let reg = Registry::from_json(doc).unwrap();
        let r = &run_identity_suite_with(&reg, &ids(&["wrong"]), 3, 0, Execution::Sequential)
            .unwrap()[0];
        assert_eq!((r.trials, r.failures), (6, 6));
        let w = r.first_failure.as_ref().unwrap();
        assert_eq!(w["n"], 2);
        assert_eq!(w["lhs"], "0");
    }
}
