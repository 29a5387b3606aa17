//! Genus formulas, Weil polynomials from Hecke data, Eichler–Shimura point
//! counts and the parity obstruction to involutions.

pub mod genus;
pub mod parity;
pub mod weil;

pub use crate::catalog::residue_degree;
pub use genus::{genus_bound_excludes, genus_table, genus_x0, GenusData};
pub use parity::{
    exact_degree_counts, exclude_odd_order, max_fixed_points, parity_certificate, standard_range, union_counts,
    union_increment, OddOrderBound, ParityCertificate, SignRule,
};
pub use weil::{point_counts, residue_degree_at, weil_polynomial, WeilData};

use crate::catalog::Catalog;
use crate::error::{Error, Result};

/// Parity certificate at `l = 2` over the standard range for `p` (or `n_max`
/// when given).
pub fn involution_ruled_out(catalog: &Catalog, n_max: Option<usize>) -> Result<ParityCertificate> {
    let p = catalog.p;
    let n = match n_max.or_else(|| standard_range(p)) {
        Some(n) => n,
        None => return Err(Error::InvalidArgument(format!("no standard parity range for p = {p}; pass n_max"))),
    };
    let g = genus_table(p)?;
    let s = residue_degree(p)? as usize;
    let weil = weil_polynomial(catalog, 2, s * (n + 1))?;
    parity_certificate(&weil, g.g_plus, n)
}
