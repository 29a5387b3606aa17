//! Newform orbit catalogs at levels `p` and `p^2`: Atkin–Lehner signs,
//! Hecke characteristic polynomials, CM and inner-twist flags, the twist
//! table, the set `S` with its invariant `t`, and the splitting field.

pub mod character;
pub mod schema;
pub mod twist;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{primes_up_to, sturm_bound_p2};
use crate::curve::genus_table;
use crate::error::{Error, Result};
use crate::exact::{IntPoly, RationalMatrix, Subspace};
use crate::modsym::{eigen_decompose, DecomposeOptions, HeckeOperators, ModularSymbolSpace, Sign};

pub use character::{class_number, cm_dimension, residue_degree, QuadraticCharacter};
pub use schema::{
    catalog_from_json, catalog_to_json, import_catalog, load_catalog, save_catalog, CacheStatus, CatalogCache, SCHEMA_VERSION,
};
pub use twist::{
    compute_s_and_t, detect_cm, detect_inner_twist, splitting_field, twist_image, SplittingField, TwistEntry,
    TwistTable,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Imported { source: String },
}

/// Rational basis of the q-expansions of an orbit: `series[j][n]` is the
/// coefficient of `q^n`, for `n < precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpBasis {
    pub precision: u64,
    pub series: Vec<Vec<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformOrbit {
    pub id: String,
    pub level: u64,
    pub dimension: usize,
    /// Eigenvalue of the Fricke involution of the orbit's own level.
    pub epsilon: i32,
    /// Characteristic polynomial of `T_l` on the orbit, for primes `l != p`.
    pub charpolys: BTreeMap<u64, IntPoly>,
    pub cm: bool,
    pub inner_twist: bool,
    pub qexp: Option<QExpBasis>,
}

impl NewformOrbit {
    pub fn charpoly(&self, l: u64) -> Result<&IntPoly> {
        self.charpolys
            .get(&l)
            .ok_or_else(|| Error::MissingData(format!("orbit {} has no charpoly at l = {l}", self.id)))
    }

    /// Member of `New+_{p^2} ∪ New_p`.
    pub fn in_plus_part(&self, p: u64) -> bool {
        self.level == p || self.epsilon == 1
    }

    fn sort_key(&self) -> (u64, i32, usize, Vec<IntPoly>) {
        let fp = self.charpolys.range(..=50).map(|(_, f)| f.clone()).collect();
        (self.level, -self.epsilon, self.dimension, fp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub p: u64,
    /// Charpolys are present for every prime `l <= ell_max`, `l != p`.
    pub ell_max: u64,
    pub provenance: Provenance,
    pub orbits: Vec<NewformOrbit>,
}

impl Catalog {
    pub fn orbit(&self, id: &str) -> Option<&NewformOrbit> {
        self.orbits.iter().find(|o| o.id == id)
    }

    pub fn at_level(&self, level: u64) -> impl Iterator<Item = &NewformOrbit> {
        self.orbits.iter().filter(move |o| o.level == level)
    }

    /// Orbits in `New+_{p^2} ∪ New_p`.
    pub fn plus_orbits(&self) -> impl Iterator<Item = &NewformOrbit> {
        let p = self.p;
        self.orbits.iter().filter(move |o| o.in_plus_part(p))
    }

    pub fn plus_dimension(&self) -> usize {
        self.plus_orbits().map(|o| o.dimension).sum()
    }

    /// Primes used for eigenvalue-system comparisons.
    pub fn comparison_primes(&self) -> Vec<u64> {
        let bound = self.ell_max.min(sturm_bound_p2(self.p));
        primes_up_to(bound).into_iter().filter(|&l| l != self.p).collect()
    }

    /// Decisions made with fewer coefficients than the Sturm bound.
    pub fn is_provisional(&self) -> bool {
        self.ell_max < sturm_bound_p2(self.p)
    }

    pub fn character(&self) -> QuadraticCharacter {
        QuadraticCharacter::new(self.p).expect("catalog prime")
    }

    /// Recomputes the CM and inner-twist flags from the stored charpolys.
    pub fn recompute_flags(&mut self) -> Result<()> {
        let chi = self.character();
        let bound = self.ell_max.min(sturm_bound_p2(self.p));
        let p = self.p;
        for o in &mut self.orbits {
            o.cm = twist::cm_with_bound(o, p, bound)?;
            o.inner_twist = !o.cm && twist::inner_twist_with_bound(o, &chi, p, bound)?;
        }
        Ok(())
    }

    /// Structural checks and flag recomputation for loaded or imported data.
    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        let needed: Vec<u64> = primes_up_to(self.ell_max).into_iter().filter(|&l| l != p).collect();
        for o in &self.orbits {
            if o.level != p && o.level != p * p {
                return Err(Error::Schema(format!("orbit {} has level {} outside {{p, p^2}}", o.id, o.level)));
            }
            if o.epsilon != 1 && o.epsilon != -1 {
                return Err(Error::Schema(format!("orbit {} has epsilon {}", o.id, o.epsilon)));
            }
            for l in &needed {
                let f = o.charpoly(*l).map_err(|e| Error::Schema(e.to_string()))?;
                if f.degree() != o.dimension as isize || !f.is_monic() {
                    return Err(Error::Schema(format!(
                        "orbit {}: charpoly at l = {l} is not monic of degree {}",
                        o.id, o.dimension
                    )));
                }
            }
            if let Some(q) = &o.qexp {
                if q.series.len() != o.dimension || q.series.iter().any(|s| s.len() as u64 != q.precision) {
                    return Err(Error::Schema(format!("orbit {}: q-expansion basis has the wrong shape", o.id)));
                }
            }
        }
        let mut fresh = self.clone();
        fresh.recompute_flags()?;
        for (a, b) in self.orbits.iter().zip(&fresh.orbits) {
            if a.cm != b.cm || a.inner_twist != b.inner_twist {
                return Err(Error::Schema(format!(
                    "orbit {}: stored flags (cm {}, inner twist {}) disagree with recomputation (cm {}, inner twist {})",
                    a.id, a.cm, a.inner_twist, b.cm, b.inner_twist
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct CatalogOptions {
    /// Largest prime `l` with stored charpolys; default `max(100, Sturm)`,
    /// raised to cover the q-expansion precision.
    pub ell_max: Option<u64>,
    /// Precision of stored q-expansions; see [`default_qexp_precision`].
    pub qexp_precision: Option<u64>,
}

pub fn default_ell_max(p: u64) -> u64 {
    let prec = default_qexp_precision(p).unwrap_or(0);
    100.max(sturm_bound_p2(p)).max(prec.saturating_sub(1))
}

/// Enough coefficients for the basis shape test; in genus 2 also enough to
/// certify the hyperelliptic equation.
pub fn default_qexp_precision(p: u64) -> Result<u64> {
    let g = genus_table(p)?.g_plus;
    let mut prec = sturm_bound_p2(p).max(4 * g + 8) + 1;
    if g == 2 {
        prec = prec.max(crate::hyper::model_certification_bound(p, g) + 3);
    }
    Ok(prec)
}

fn label(level: u64, k: usize) -> String {
    let mut s = String::new();
    let mut k = k + 1;
    while k > 0 {
        k -= 1;
        s.insert(0, (b'a' + (k % 26) as u8) as char);
        k /= 26;
    }
    format!("{level}.{s}")
}

struct RawOrbit {
    level: u64,
    epsilon: i32,
    ops: Arc<HeckeOperators>,
    subspace: Subspace,
}

fn raw_orbits(level: u64, ell_max: u64) -> Result<(Arc<HeckeOperators>, Vec<RawOrbit>)> {
    let space = Arc::new(ModularSymbolSpace::build(level, Sign::Plus)?);
    let ops = Arc::new(HeckeOperators::new(space.clone()));
    let new = space.new_subspace()?;
    let w = new.restrict(&ops.fricke(), true)?;
    let d = new.dim();
    let mut out = Vec::new();
    let opts = DecomposeOptions { max_prime: ell_max, ..Default::default() };
    for eps in [1i32, -1] {
        let shifted = w.add_scalar(&BigRational::from_integer((-eps).into()))?;
        let part = new.sub_from_coordinates(&shifted.left_kernel())?;
        for piece in eigen_decompose(&ops, &part, &opts)? {
            let wp = piece.subspace.restrict(&ops.fricke(), true)?;
            let expect = RationalMatrix::identity(piece.subspace.dim()).scale(&BigRational::from_integer(eps.into()));
            if wp != expect {
                return Err(Error::Verification(format!("level {level}: Fricke involution is not scalar on a piece")));
            }
            out.push(RawOrbit { level, epsilon: eps, ops: ops.clone(), subspace: piece.subspace });
        }
    }
    let total: usize = out.iter().map(|o| o.subspace.dim()).sum();
    if total != d {
        return Err(Error::Verification(format!("level {level}: orbit dimensions sum to {total}, new space has {d}")));
    }
    Ok((ops, out))
}

/// Matrices `A_n` of `T_n` on an orbit for `1 <= n < prec`, from the prime
/// matrices by multiplicativity and the prime-power recurrence.
fn hecke_tower(prime_mats: &BTreeMap<u64, RationalMatrix>, d: usize, prec: u64, p: u64, a_p: &BigRational) -> Result<Vec<RationalMatrix>> {
    let mut a: Vec<RationalMatrix> = vec![RationalMatrix::zeros(d, d); prec as usize];
    if prec > 1 {
        a[1] = RationalMatrix::identity(d);
    }
    for n in 2..prec {
        let (l, e) = crate::arith::factorize(n)[0];
        let lk = l.pow(e);
        let m = n / lk;
        let pp = if l == p {
            let mut c = BigRational::one();
            for _ in 0..e {
                c *= a_p;
            }
            RationalMatrix::identity(d).scale(&c)
        } else {
            let al = prime_mats
                .get(&l)
                .ok_or_else(|| Error::MissingData(format!("T_{l} needed for q-expansion to precision {prec}")))?;
            if e == 1 {
                al.clone()
            } else {
                let prev = &a[(lk / l) as usize];
                let prev2 = &a[(lk / l / l) as usize];
                al.mul(prev)?.sub(&prev2.scale(&BigRational::from_integer(l.into())))?
            }
        };
        a[n as usize] = if m == 1 { pp } else { pp.mul(&a[m as usize])? };
    }
    Ok(a)
}

pub fn build_catalog(p: u64, opts: &CatalogOptions) -> Result<Catalog> {
    let g = genus_table(p)?;
    let ell_max = opts.ell_max.unwrap_or_else(|| default_ell_max(p));
    let prec = opts.qexp_precision.unwrap_or(default_qexp_precision(p)?).min(ell_max + 1);
    let (lo, hi) = rayon::join(|| raw_orbits(p, ell_max), || raw_orbits(p * p, ell_max));
    let (ops_p, mut raw) = lo?;
    let (ops_p2, raw_p2) = hi?;
    raw.extend(raw_p2);

    let primes: Vec<u64> = primes_up_to(ell_max).into_iter().filter(|&l| l != p).collect();
    for ops in [&ops_p, &ops_p2] {
        primes.par_iter().for_each(|&l| {
            ops.hecke(l);
        });
    }

    let mut orbits: Vec<NewformOrbit> = raw
        .par_iter()
        .map(|r| -> Result<NewformOrbit> {
            let d = r.subspace.dim();
            let mats: Vec<(u64, RationalMatrix)> = primes
                .par_iter()
                .map(|&l| Ok((l, r.subspace.restrict(&r.ops.hecke(l), false)?)))
                .collect::<Result<_>>()?;
            let mut charpolys = BTreeMap::new();
            for (l, m) in &mats {
                let f = m
                    .charpoly()?
                    .to_int()
                    .ok_or_else(|| Error::Verification(format!("non-integral charpoly of T_{l} at level {}", r.level)))?;
                charpolys.insert(*l, f);
            }
            let plus = r.level == p || r.epsilon == 1;
            let qexp = if plus {
                let a_p = if r.level == p {
                    BigRational::from_integer((-r.epsilon).into())
                } else {
                    BigRational::zero()
                };
                let prime_mats: BTreeMap<u64, RationalMatrix> = mats.into_iter().filter(|(l, _)| *l < prec).collect();
                let tower = hecke_tower(&prime_mats, d, prec, p, &a_p)?;
                let series = (0..d)
                    .map(|j| tower.iter().map(|a| a.get(0, j).clone()).collect())
                    .collect();
                Some(QExpBasis { precision: prec, series })
            } else {
                None
            };
            Ok(NewformOrbit {
                id: String::new(),
                level: r.level,
                dimension: d,
                epsilon: r.epsilon,
                charpolys,
                cm: false,
                inner_twist: false,
                qexp,
            })
        })
        .collect::<Result<_>>()?;

    orbits.sort_by_key(|o| o.sort_key());
    let mut counters: BTreeMap<u64, usize> = BTreeMap::new();
    for o in &mut orbits {
        let k = counters.entry(o.level).or_insert(0);
        o.id = label(o.level, *k);
        *k += 1;
    }
    let mut cat = Catalog { p, ell_max, provenance: Provenance::Computed, orbits };
    cat.recompute_flags()?;
    if cat.plus_dimension() as u64 != g.g_plus {
        return Err(Error::Verification(format!(
            "p = {p}: New+ and New_p dimensions sum to {}, genus formula gives {}",
            cat.plus_dimension(),
            g.g_plus
        )));
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(label(121, 0), "121.a");
        assert_eq!(label(121, 25), "121.z");
        assert_eq!(label(121, 26), "121.aa");
    }
}
