use std::collections::BTreeSet;

use cm3::sampler::{default_registry, run_identity_suite_with, Family, IdentityKind};
use cm3::Execution;

#[test]
fn every_registered_identity_passes() {
    let reg = default_registry();
    let ids: Vec<String> = reg.ids().iter().map(|s| s.to_string()).collect();
    let reports = run_identity_suite_with(reg, &ids, 8, 2024, Execution::Parallel).unwrap();
    assert_eq!(reports.len(), ids.len());
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

/// Ids listed in the docs manifest, one per table row starting with "| `id`".
fn manifest_ids() -> BTreeSet<String> {
    let text = include_str!("../../../docs/identities.md");
    text.lines()
        .filter_map(|l| l.strip_prefix("| `"))
        .filter_map(|l| l.split('`').next())
        .map(str::to_string)
        .collect()
}

#[test]
fn registry_matches_manifest() {
    let reg: BTreeSet<String> = default_registry()
        .ids()
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(reg, manifest_ids());
}

#[test]
fn each_witness_family_is_exercised() {
    let reg = default_registry();
    for fam in [
        Family::Generic,
        Family::Cm,
        Family::Commuting,
        Family::Rank2,
        Family::Rank3,
    ] {
        assert!(reg.identities.iter().any(|e| e.family == fam), "{fam:?}");
    }
    let actions = reg
        .identities
        .iter()
        .filter(|e| matches!(e.kind, IdentityKind::Action { .. }))
        .count();
    assert_eq!(actions, 9);
}
