use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::catalog::{residue_degree, Catalog};
use crate::error::{Error, Result};
use crate::exact::IntPoly;

/// Frobenius data of the reduction of `X0+(p^2)` at `l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeilData {
    pub p: u64,
    pub ell: u64,
    /// Residue degree of `l` in `K`.
    pub s: u32,
    /// `prod (x^2 - a_l(f) x + l)` over all conjugates of all plus orbits.
    pub weil_poly: IntPoly,
    /// `counts[n - 1] = N_l(n)`.
    #[serde(serialize_with = "crate::exact::decimal::bigints")]
    pub counts: Vec<BigInt>,
}

impl WeilData {
    /// Counts from an arbitrary Weil polynomial; `p` is informational.
    pub fn from_polynomial(p: u64, ell: u64, s: u32, weil_poly: IntPoly, n_max: usize) -> Result<Self> {
        let counts = point_counts(&weil_poly, ell, n_max)?;
        Ok(Self { p, ell, s, weil_poly, counts })
    }

    pub fn genus(&self) -> usize {
        self.weil_poly.degree().max(0) as usize / 2
    }

    /// `N_l(n)`.
    pub fn count(&self, n: usize) -> Result<&BigInt> {
        if n == 0 || n > self.counts.len() {
            return Err(Error::InsufficientPrecision { requested: n as i64, available: self.counts.len() as i64 });
        }
        Ok(&self.counts[n - 1])
    }

    /// `x^{2g} W(l/x) = l^g W(x)`.
    pub fn satisfies_functional_equation(&self) -> bool {
        let d = self.weil_poly.degree();
        if d < 0 || d % 2 != 0 {
            return false;
        }
        let d = d as usize;
        let g = d / 2;
        let l = BigInt::from(self.ell);
        (0..=d).all(|k| {
            // coefficient of x^k on the left is c_{d-k} l^{d-k}
            let lhs = self.weil_poly.coeff(d - k) * Pow::pow(&l, (d - k) as u32);
            let rhs = self.weil_poly.coeff(k) * Pow::pow(&l, g as u32);
            lhs == rhs
        })
    }
}

/// `N(n) = 1 + l^n - s_n`, with `s_n` the power sums of the roots.
pub fn point_counts(weil_poly: &IntPoly, ell: u64, n_max: usize) -> Result<Vec<BigInt>> {
    let s = weil_poly.power_sums(n_max)?;
    let l = BigInt::from(ell);
    let mut lp = BigInt::one();
    let mut out = Vec::with_capacity(n_max);
    for sn in s {
        lp *= &l;
        let n = BigInt::one() + &lp - sn;
        if n < BigInt::zero() {
            return Err(Error::CorruptWeilData(format!("negative point count {n}")));
        }
        out.push(n);
    }
    Ok(out)
}

/// Weil polynomial at `l` from the catalog's charpolys of `T_l` on the plus
/// orbits, with point counts up to `N_l(n_max)`.
pub fn weil_polynomial(catalog: &Catalog, ell: u64, n_max: usize) -> Result<WeilData> {
    if ell == catalog.p {
        return Err(Error::InvalidArgument(format!("l = {ell} is the level prime")));
    }
    let mut w = IntPoly::one();
    for o in catalog.plus_orbits() {
        w = w.mul(&o.charpoly(ell)?.weil_lift(ell));
    }
    let s = residue_degree_at(catalog.p, ell)?;
    WeilData::from_polynomial(catalog.p, ell, s, w, n_max)
}

/// Residue degree of `l` in `Q(sqrt(p*))`.
pub fn residue_degree_at(p: u64, ell: u64) -> Result<u32> {
    if ell == 2 {
        return residue_degree(p);
    }
    if ell == p {
        return Err(Error::InvalidArgument(format!("{ell} ramifies in Q(sqrt(p*))")));
    }
    Ok(if crate::arith::legendre(crate::arith::p_star(p), ell) == 1 { 1 } else { 2 })
}
