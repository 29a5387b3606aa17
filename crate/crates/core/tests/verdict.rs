mod common;

use std::collections::BTreeSet;

use common::catalog;
use splitcartan::catalog::{build_catalog, CatalogOptions};
use splitcartan::verdict::{
    analyze_prime, automorphism_verdict, cited, run_report, PremiseSource, CITED_CONSTANTS,
};
use splitcartan::{AutGroup, Status, VerdictOptions};

fn with_catalogs(primes: &[u64]) -> VerdictOptions {
    let mut opts = VerdictOptions::default();
    for &p in primes {
        opts.catalogs.insert(p, catalog(p).clone());
    }
    opts
}

#[test]
fn small_prime_verdicts() {
    let opts = with_catalogs(&[11, 13, 17, 19, 23]);
    for (p, group) in [
        (11, AutGroup::KleinFour),
        (13, AutGroup::Trivial),
        (17, AutGroup::Trivial),
        (19, AutGroup::Trivial),
        (23, AutGroup::Trivial),
    ] {
        let v = automorphism_verdict(p, &opts).unwrap();
        assert_eq!(v.aut_group, Some(group), "p = {p}");
        assert_eq!(v.status, Status::Verified, "p = {p}: {:?}", v.notes);
        for x in &v.premises {
            assert!(x.passed, "p = {p}: {}", x.claim);
            if x.source == PremiseSource::Cited {
                assert!(cited(&x.reference).is_some());
            }
        }
    }
}

#[test]
fn computed_premises_link_to_certificates() {
    let a = analyze_prime(23, &with_catalogs(&[23])).unwrap();
    let refs: BTreeSet<&str> = a
        .verdict
        .premises
        .iter()
        .filter(|x| x.source == PremiseSource::Computed)
        .map(|x| x.reference.as_str())
        .collect();
    assert_eq!(refs, BTreeSet::from(["catalog", "genus", "odd_order", "parity"]));
    assert!(a.parity.as_ref().unwrap().ruled_out);
    assert!(a.odd_order.as_ref().unwrap().excluded);

    let a = analyze_prime(11, &with_catalogs(&[11])).unwrap();
    assert!(a.p11.as_ref().unwrap().verified);
}

#[test]
fn large_primes_use_only_the_genus_bound() {
    for (p, g) in [(37, 45), (41, 57), (43, 63)] {
        let v = automorphism_verdict(p, &VerdictOptions::default()).unwrap();
        assert_eq!(v.aut_group, Some(AutGroup::Trivial));
        assert_eq!(v.status, Status::Verified);
        assert_eq!(v.premises[0].claim, format!("g+ = {g} > 30"));
        assert_eq!(
            v.cited_keys(),
            vec!["k_gonality_at_most_6", "gonality_genus_bound", "at_most_12_fixed_points"]
        );
    }
}

#[test]
fn reduced_ranges_give_partial() {
    let mut opts = VerdictOptions { n_max: Some(50), ..Default::default() };
    opts.catalogs.insert(17, catalog(17).clone());
    let v = automorphism_verdict(17, &opts).unwrap();
    assert_eq!(v.status, Status::Partial);
    assert_eq!(v.aut_group, Some(AutGroup::Trivial));

    let short = build_catalog(13, &CatalogOptions { ell_max: Some(11), qexp_precision: Some(12) }).unwrap();
    let mut opts = VerdictOptions { ell_max: Some(11), precision: Some(12), ..Default::default() };
    opts.catalogs.insert(13, short);
    let v = automorphism_verdict(13, &opts).unwrap();
    assert_ne!(v.status, Status::Verified);
}

#[test]
fn failed_premises_block_verification() {
    // too short a parity range: the sum no longer exceeds the allowed count
    let mut opts = VerdictOptions { n_max: Some(3), ..Default::default() };
    opts.catalogs.insert(23, catalog(23).clone());
    let v = automorphism_verdict(23, &opts).unwrap();
    assert_eq!(v.status, Status::Failed);
    assert_eq!(v.aut_group, None);
}

#[test]
fn report_is_deterministic_and_counts_premises() {
    let opts = with_catalogs(&[11, 13]);
    let a = run_report(&[13, 11, 37], &opts).unwrap();
    let b = run_report(&[11, 13, 37], &opts).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.t_values.get(&13), Some(&3));
    let total: usize = a.analyses.iter().map(|x| x.verdict.premises.len()).sum();
    assert_eq!(a.premise_counts.computed + a.premise_counts.cited, total);
    for c in &a.cited_constants {
        assert!(CITED_CONSTANTS.contains(c));
    }
    assert!(a.to_text().contains("klein_four"));
}
