use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use splitcartan::curve::genus_x0;
use splitcartan::exact::{IntPoly, RatPoly, RationalMatrix};
use splitcartan::modsym::{
    cusp_count, eigen_decompose, DecomposeOptions, HeckeOperators, ModularSymbolSpace, Sign,
};

fn dense(ops: &HeckeOperators, n: u64) -> RationalMatrix {
    ops.hecke(n).to_dense()
}

#[test]
fn cuspidal_dimension_is_twice_genus() {
    for n in (1..=80).chain([121, 169, 289]) {
        let s = ModularSymbolSpace::build(n, Sign::Zero).unwrap();
        assert_eq!(s.cuspidal().dim() as u64, 2 * genus_x0(n), "N = {n}");
        assert_eq!(s.dimension() as u64, 2 * genus_x0(n) + cusp_count(n) - 1, "N = {n}");
    }
}

#[test]
fn plus_quotient_halves_cuspidal_dimension() {
    for n in [11u64, 37, 63, 121, 169, 289, 361] {
        let s = ModularSymbolSpace::build(n, Sign::Plus).unwrap();
        assert_eq!(s.cuspidal().dim() as u64, genus_x0(n), "N = {n}");
    }
}

#[test]
fn new_subspace_dimensions() {
    let s = ModularSymbolSpace::build(121, Sign::Zero).unwrap();
    assert_eq!(s.cuspidal().dim(), 12);
    assert_eq!(s.new_subspace().unwrap().dim(), 8);
    let s = ModularSymbolSpace::build(11, Sign::Zero).unwrap();
    assert_eq!(s.new_subspace().unwrap(), *s.cuspidal());
    for (n, m) in [(289u64, 17u64), (361, 19), (121, 11)] {
        let s = ModularSymbolSpace::build(n, Sign::Zero).unwrap();
        let new = s.new_subspace().unwrap().dim() as u64;
        assert_eq!(new + 2 * 2 * genus_x0(m), 2 * genus_x0(n), "N = {n}");
        assert_eq!(new / 2 + 2 * genus_x0(m), genus_x0(n), "N = {n}");
    }
}

#[test]
fn hecke_operators_commute_and_fricke_is_involution() {
    for n in [121u64, 169] {
        let s = Arc::new(ModularSymbolSpace::build(n, Sign::Plus).unwrap());
        let ops = HeckeOperators::new(s.clone());
        let (t2, t3, t5) = (dense(&ops, 2), dense(&ops, 3), dense(&ops, 5));
        assert_eq!(t2.mul(&t3).unwrap(), t3.mul(&t2).unwrap());
        assert_eq!(t2.mul(&t5).unwrap(), t5.mul(&t2).unwrap());
        let w = ops.fricke().to_dense();
        assert_eq!(w.mul(&w).unwrap(), RationalMatrix::identity(s.dimension()));
        let new = s.new_subspace().unwrap();
        let wn = new.restrict(&ops.fricke(), true).unwrap();
        let t2n = new.restrict(&ops.hecke(2), true).unwrap();
        assert_eq!(wn.mul(&t2n).unwrap(), t2n.mul(&wn).unwrap());
    }
}

#[test]
fn eisenstein_eigenvalue_at_prime_level() {
    // on the full space T_l has eigenvalue 1 + l on the boundary part
    let s = Arc::new(ModularSymbolSpace::build(37, Sign::Zero).unwrap());
    let ops = HeckeOperators::new(s.clone());
    let cp = dense(&ops, 2).charpoly().unwrap();
    assert!(cp.eval(&BigRational::from_integer(3.into())).is_zero());
}

#[test]
fn level_eleven_fricke_sign() {
    let s = Arc::new(ModularSymbolSpace::build(11, Sign::Plus).unwrap());
    let ops = HeckeOperators::new(s.clone());
    let w = s.cuspidal().restrict(&ops.fricke(), true).unwrap();
    assert_eq!(w, RationalMatrix::identity(1).scale(&-BigRational::one()));
}

#[test]
fn level_121_plus_part_is_the_cm_form() {
    let s = Arc::new(ModularSymbolSpace::build(121, Sign::Plus).unwrap());
    let ops = HeckeOperators::new(s.clone());
    let new = s.new_subspace().unwrap();
    let pieces = eigen_decompose(&ops, &new, &DecomposeOptions::default()).unwrap();
    assert_eq!(pieces.len(), 4);
    let mut plus = Vec::new();
    for p in &pieces {
        let w = p.subspace.restrict(&ops.fricke(), true).unwrap();
        if w == RationalMatrix::identity(p.subspace.dim()) {
            plus.push(p);
        }
    }
    assert_eq!(plus.len(), 1);
    let t2 = plus[0].subspace.restrict(&ops.hecke(2), true).unwrap();
    assert_eq!(t2.charpoly().unwrap(), RatPoly::from_i64(&[0, 1]));
    assert_eq!(plus[0].charpoly.degree(), 1);
    let _ = IntPoly::one();
}
