mod common;

use common::catalog;
use splitcartan::catalog::{
    build_catalog, class_number, cm_dimension, compute_s_and_t, import_catalog, save_catalog, splitting_field,
    CacheStatus, Provenance, SplittingField, TwistTable,
};
use splitcartan::curve::{genus_table, involution_ruled_out, weil_polynomial};
use splitcartan::hyper::{hyperelliptic_screen, verify_p11};
use splitcartan::{CatalogCache, CatalogOptions};

#[test]
fn plus_part_has_dimension_g_plus() {
    for p in [11, 13, 17, 19, 23] {
        let cat = catalog(p);
        assert_eq!(cat.plus_dimension() as u64, genus_table(p).unwrap().g_plus, "p = {p}");
        assert!(!cat.is_provisional());
        cat.validate().unwrap();
    }
}

#[test]
fn level_121_orbits() {
    // four rational orbits at 121, one of them with w = +1
    let cat = catalog(11);
    assert_eq!(cat.at_level(121).count(), 4);
    assert_eq!(cat.at_level(121).filter(|o| o.epsilon == 1).count(), 1);
    assert_eq!(cat.at_level(11).count(), 1);
}

#[test]
fn twist_table_is_an_involution() {
    for p in [11, 13, 17, 19, 23] {
        let cat = catalog(p);
        let table = TwistTable::build(cat).unwrap();
        for e in &table.entries {
            let back = table.image(&e.target).unwrap();
            assert_eq!(back.target, e.source);
            let src = cat.orbit(&e.source).unwrap();
            let dst = cat.orbit(&e.target).unwrap();
            assert_eq!(src.dimension, dst.dimension);
        }
        // orbits mapped to themselves are exactly those with CM or an inner twist
        for o in &cat.orbits {
            let fixed = table.image(&o.id).unwrap().is_self;
            assert_eq!(fixed, o.cm || o.inner_twist, "p = {p}, {}", o.id);
        }
        // newforms fixed by the twist itself are the CM ones: one orbit iff p = 3 mod 4
        let cm = cat.orbits.iter().filter(|o| o.cm).count();
        assert_eq!(cm == 1, p % 4 == 3, "p = {p}");
        assert!(cm <= 1);
    }
}

#[test]
fn cm_orbit_dimension_is_the_class_number() {
    for p in [11u64, 19, 23] {
        let cat = catalog(p);
        let dim: usize = cat.orbits.iter().filter(|o| o.cm).map(|o| o.dimension).sum();
        assert_eq!(dim as u64, cm_dimension(p).unwrap(), "p = {p}");
        assert_eq!(dim as u64, class_number(-(p as i64)), "p = {p}");
    }
}

#[test]
fn s_sets_and_t() {
    for (p, t) in [(17, 5), (19, 5), (23, 7)] {
        let cat = catalog(p);
        let table = TwistTable::build(cat).unwrap();
        assert_eq!(compute_s_and_t(cat, &table).unwrap().1, t, "p = {p}");
    }
}

#[test]
fn splitting_fields() {
    let expect = [
        (11, SplittingField::HilbertClassField),
        (13, SplittingField::Rationals),
        (19, SplittingField::HilbertClassField),
        (23, SplittingField::QuadraticField),
    ];
    for (p, f) in expect {
        let cat = catalog(p);
        assert_eq!(splitting_field(cat, &TwistTable::build(cat).unwrap()).unwrap(), f, "p = {p}");
    }
}

#[test]
fn no_plus_orbit_of_169_has_cm_or_inner_twist() {
    let cat = catalog(13);
    assert!(cat.plus_orbits().all(|o| !o.cm && !o.inner_twist));
    // the minus-part orbit 169.b does have one
    assert!(cat.orbits.iter().any(|o| o.inner_twist && o.epsilon == -1));
}

#[test]
fn cache_round_trip_reproduces_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CatalogCache::new(dir.path());
    cache.store(catalog(17)).unwrap();
    let (back, status) = cache.get_or_build(17, &CatalogOptions::default()).unwrap();
    assert_eq!(status, CacheStatus::Hit);
    assert_eq!(&back, catalog(17));
    assert_eq!(involution_ruled_out(&back, None).unwrap(), involution_ruled_out(catalog(17), None).unwrap());
    assert_eq!(hyperelliptic_screen(&back, None).unwrap(), hyperelliptic_screen(catalog(17), None).unwrap());
}

#[test]
fn unreadable_cache_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CatalogCache::new(dir.path());
    let path = cache.path(11);
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, "{ not json").unwrap();
    let opts = CatalogOptions { ell_max: Some(40), qexp_precision: Some(30) };
    let (cat, status) = cache.get_or_build(11, &opts).unwrap();
    assert!(matches!(status, CacheStatus::Rebuilt { .. }));
    assert_eq!(cat.ell_max, 40);
    let (_, again) = cache.get_or_build(11, &opts).unwrap();
    assert_eq!(again, CacheStatus::Hit);
}

#[test]
fn imported_catalog_gives_identical_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("external-121.json");
    save_catalog(catalog(11), &path).unwrap();
    let imported = import_catalog(&path).unwrap();
    assert!(matches!(imported.provenance, Provenance::Imported { .. }));
    assert_eq!(imported.orbits, catalog(11).orbits);
    assert_eq!(verify_p11(&imported).unwrap(), verify_p11(catalog(11)).unwrap());
    assert_eq!(weil_polynomial(&imported, 2, 8).unwrap(), weil_polynomial(catalog(11), 2, 8).unwrap());
}

#[test]
fn malformed_import_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"schema_version": 1, "p": 11}"#).unwrap();
    assert!(matches!(import_catalog(&path), Err(splitcartan::Error::Schema(_))));
}

#[test]
fn short_ranges_are_provisional() {
    let cat = build_catalog(13, &CatalogOptions { ell_max: Some(11), qexp_precision: Some(12) }).unwrap();
    assert!(cat.is_provisional());
    assert_eq!(cat.plus_dimension(), 3);
}
