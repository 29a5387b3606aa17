use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

use splitcartan::arith::{divisors, moebius};
use splitcartan::catalog::{build_catalog, catalog_from_json, catalog_to_json, CatalogOptions};
use splitcartan::curve::{exact_degree_counts, union_counts, union_increment, weil_polynomial, SignRule, WeilData};
use splitcartan::exact::{rat_frac, IntPoly, QSeries, RationalMatrix};
use splitcartan::hyper::echelonize;
use splitcartan::{Catalog, Error};

fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((-20i64..=20, 1i64..=6), n * n)))
        .prop_map(|(n, e)| RationalMatrix::new(n, n, e.iter().map(|&(a, b)| rat_frac(a, b)).collect()).unwrap())
}

/// Products of `x^2 - a x + l` with `|a| <= 2 sqrt(l)` whose counts stay
/// nonnegative.
fn weil_data() -> impl Strategy<Value = WeilData> {
    (prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), 1u32..=2)
        .prop_flat_map(|(l, s)| {
            let bound = (2.0 * (l as f64).sqrt()).floor() as i64;
            (Just(l), Just(s), prop::collection::vec(-bound..=bound, 0..=3))
        })
        .prop_filter_map("negative point counts", |(l, s, traces)| {
            let w = traces
                .iter()
                .fold(IntPoly::one(), |acc, &a| acc.mul(&IntPoly::from_i64(&[l as i64, -a, 1])));
            WeilData::from_polynomial(0, l, s, w, 16 * s as usize).ok()
        })
}

fn catalog_11() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| build_catalog(11, &CatalogOptions { ell_max: Some(60), qexp_precision: Some(40) }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_hamilton(m in small_matrix()) {
        let f = m.charpoly().unwrap();
        prop_assert!(f.is_monic());
        prop_assert_eq!(f.degree(), m.rows() as isize);
        prop_assert!(m.eval_poly(&f).unwrap().is_zero());
    }

    #[test]
    fn lifted_polynomials_satisfy_functional_equation(w in weil_data()) {
        prop_assert!(w.satisfies_functional_equation());
        prop_assert_eq!(w.genus(), w.weil_poly.degree() as usize / 2);
    }

    #[test]
    fn exact_degree_counts_are_orbit_unions(w in weil_data()) {
        let n = 16usize;
        match exact_degree_counts(&w, n) {
            Ok(a) => {
                for m in 1..=n {
                    // independent recomputation from the raw counts
                    let mut want = BigInt::zero();
                    for d in divisors(m as u64) {
                        want += BigInt::from(moebius(m as u64 / d).unwrap()) * w.count(w.s as usize * d as usize).unwrap();
                    }
                    prop_assert_eq!(&a[m - 1], &want);
                    prop_assert!(a[m - 1].is_multiple_of(&BigInt::from(m)));
                }
            }
            // only nonnegativity may fail for polynomials that come from no curve
            Err(Error::CorruptWeilData(msg)) => prop_assert!(msg.contains("negative"), "{}", msg),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn moebius_and_inclusion_exclusion_agree(w in weil_data()) {
        let n = 15usize;
        let r = match union_counts(&w, n) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(union_increment(&w, 1, SignRule::Alternating).unwrap(), r[0].clone());
        for m in 2..=n {
            prop_assert_eq!(union_increment(&w, m, SignRule::Alternating).unwrap(), &r[m - 1] - &r[m - 2]);
        }
    }

    #[test]
    fn echelon_form_is_idempotent_and_order_free(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 12), 1..=4),
        seed in any::<u64>(),
    ) {
        let series: Vec<QSeries> = rows.iter().map(|r| QSeries::from_i64(1, r)).collect();
        let (basis, pivots) = match echelonize(&series) {
            Ok(x) => x,
            Err(_) => return Ok(()),
        };
        let (again, pivots2) = echelonize(&basis).unwrap();
        prop_assert_eq!(&again, &basis);
        prop_assert_eq!(&pivots2, &pivots);
        let mut shuffled = series.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed % k as u64) as usize);
        if seed & 1 == 1 {
            shuffled.reverse();
        }
        let (b3, p3) = echelonize(&shuffled).unwrap();
        prop_assert_eq!(b3, basis);
        prop_assert_eq!(p3, pivots);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cache_documents_round_trip(l in 12u64..=60, prec in 20u64..=40) {
        let cat = catalog_11().truncated(l, prec);
        let back = catalog_from_json(&catalog_to_json(&cat)).unwrap();
        prop_assert_eq!(&back, &cat);
        let n = 4;
        let ell = *back.comparison_primes().iter().find(|&&q| q <= l).unwrap_or(&2);
        prop_assert_eq!(weil_polynomial(&back, ell, n).unwrap(), weil_polynomial(&cat, ell, n).unwrap());
    }
}
