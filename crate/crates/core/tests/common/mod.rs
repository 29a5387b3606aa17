#![allow(dead_code)]

use std::sync::OnceLock;

use splitcartan::catalog::build_catalog;
use splitcartan::{Catalog, CatalogOptions};

pub const PRIMES: [u64; 7] = [11, 13, 17, 19, 23, 29, 31];

/// Default-range catalog for `p`, built once per test binary.
pub fn catalog(p: u64) -> &'static Catalog {
    static CATS: [OnceLock<Catalog>; 7] = [const { OnceLock::new() }; 7];
    let i = PRIMES.iter().position(|&q| q == p).expect("catalog prime");
    CATS[i].get_or_init(|| build_catalog(p, &CatalogOptions::default()).unwrap())
}
