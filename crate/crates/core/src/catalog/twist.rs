//! Quadratic twists by the character of conductor `p`, CM and inner-twist
//! detection, the set `S`, and the splitting field of `J0+(p^2)`.

use serde::Serialize;

use super::{Catalog, NewformOrbit, QuadraticCharacter};
use crate::arith::{primes_up_to, sturm_bound_p2};
use crate::error::{Error, Result};
use crate::exact::IntPoly;

fn x_pow(d: usize) -> IntPoly {
    let mut c = vec![0i64; d + 1];
    c[d] = 1;
    IntPoly::from_i64(&c)
}

fn primes_to(bound: u64, p: u64) -> Vec<u64> {
    primes_up_to(bound).into_iter().filter(|&l| l != p).collect()
}

fn check_range(orbit: &NewformOrbit, p: u64, need: u64) -> Result<()> {
    let have = orbit.charpolys.keys().next_back().copied().unwrap_or(0);
    if primes_to(need, p).iter().any(|l| !orbit.charpolys.contains_key(l)) {
        return Err(Error::InsufficientRange { have, need });
    }
    Ok(())
}

pub(crate) fn cm_with_bound(orbit: &NewformOrbit, p: u64, bound: u64) -> Result<bool> {
    if orbit.level != p * p || p % 4 != 3 {
        return Ok(false);
    }
    let chi = QuadraticCharacter::new(p)?;
    let xd = x_pow(orbit.dimension);
    for l in primes_to(bound, p) {
        if chi.value(l as i64) == -1 && orbit.charpoly(l)? != &xd {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn inner_twist_with_bound(orbit: &NewformOrbit, chi: &QuadraticCharacter, p: u64, bound: u64) -> Result<bool> {
    for l in primes_to(bound, p) {
        let f = orbit.charpoly(l)?;
        if f.sign_twist(chi.value(l as i64)) != *f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// CM by `Q(sqrt(-p))`: `a_l = 0` for every `l` up to the Sturm bound of
/// level `p^2` with `chi(l) = -1`. Refuses when the Hecke data is shorter.
pub fn detect_cm(orbit: &NewformOrbit, p: u64) -> Result<bool> {
    let bound = sturm_bound_p2(p);
    check_range(orbit, p, bound)?;
    cm_with_bound(orbit, p, bound)
}

/// Inner twist by `chi`: every charpoly up to the Sturm bound equals its own
/// twist, so `f ⊗ chi` is Galois conjugate to `f`. Not defined for CM orbits.
pub fn detect_inner_twist(orbit: &NewformOrbit, chi: &QuadraticCharacter) -> Result<bool> {
    let p = chi.conductor();
    let bound = sturm_bound_p2(p);
    check_range(orbit, p, bound)?;
    if cm_with_bound(orbit, p, bound)? {
        return Err(Error::InvalidArgument(format!("orbit {} has CM; its self-twist is not an inner twist", orbit.id)));
    }
    inner_twist_with_bound(orbit, chi, p, bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistEntry {
    pub source: String,
    pub target: String,
    pub target_level: u64,
    pub target_epsilon: i32,
    pub is_self: bool,
}

/// The orbit of `f ⊗ chi`: the unique orbit whose charpolys equal the
/// twisted charpolys of `f` at every comparison prime.
pub fn twist_image(orbit: &NewformOrbit, chi: &QuadraticCharacter, catalog: &Catalog) -> Result<TwistEntry> {
    let primes = catalog.comparison_primes();
    let twisted: Vec<IntPoly> = primes
        .iter()
        .map(|&l| Ok(orbit.charpoly(l)?.sign_twist(chi.value(l as i64))))
        .collect::<Result<_>>()?;
    let mut matches = Vec::new();
    for g in &catalog.orbits {
        let mut ok = g.dimension == orbit.dimension;
        for (l, f) in primes.iter().zip(&twisted) {
            if !ok {
                break;
            }
            ok = g.charpoly(*l)? == f;
        }
        if ok {
            matches.push(g);
        }
    }
    match matches.as_slice() {
        [g] => Ok(TwistEntry {
            source: orbit.id.clone(),
            target: g.id.clone(),
            target_level: g.level,
            target_epsilon: g.epsilon,
            is_self: g.id == orbit.id,
        }),
        [] => Err(Error::TwistMatch(format!(
            "no orbit matches the twist of {} at primes up to {}",
            orbit.id,
            primes.last().copied().unwrap_or(0)
        ))),
        many => Err(Error::TwistMatch(format!(
            "{} orbits match the twist of {} at primes up to {}; extend the range",
            many.len(),
            orbit.id,
            primes.last().copied().unwrap_or(0)
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistTable {
    pub entries: Vec<TwistEntry>,
}

impl TwistTable {
    pub fn build(catalog: &Catalog) -> Result<Self> {
        let chi = catalog.character();
        let entries = catalog.orbits.iter().map(|o| twist_image(o, &chi, catalog)).collect::<Result<Vec<_>>>()?;
        let table = Self { entries };
        table.check_involution()?;
        Ok(table)
    }

    pub fn image(&self, id: &str) -> Option<&TwistEntry> {
        self.entries.iter().find(|e| e.source == id)
    }

    pub fn fixed_orbits(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| e.is_self).map(|e| e.source.as_str()).collect()
    }

    fn check_involution(&self) -> Result<()> {
        for e in &self.entries {
            let back = self
                .image(&e.target)
                .ok_or_else(|| Error::TwistMatch(format!("twist target {} missing from table", e.target)))?;
            if back.target != e.source {
                return Err(Error::TwistMatch(format!(
                    "twisting {} twice gives {}, not the source",
                    e.source, back.target
                )));
            }
        }
        Ok(())
    }
}

/// The set `S` of orbits in `New+_{p^2} ∪ New_p` without CM whose twist is
/// outside `New+_{p^2} ∪ New_p`, plus the CM orbit when `p ≡ 3 mod 8`;
/// `t` is the sum of their dimensions.
pub fn compute_s_and_t(catalog: &Catalog, table: &TwistTable) -> Result<(Vec<String>, usize)> {
    let p = catalog.p;
    let mut s = Vec::new();
    let mut t = 0;
    for o in catalog.plus_orbits() {
        let member = if o.cm {
            p % 8 == 3
        } else {
            let img = table
                .image(&o.id)
                .ok_or_else(|| Error::TwistMatch(format!("orbit {} missing from twist table", o.id)))?;
            !(img.target_level == p || img.target_epsilon == 1)
        };
        if member {
            s.push(o.id.clone());
            t += o.dimension;
        }
    }
    Ok((s, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingField {
    Rationals,
    QuadraticField,
    HilbertClassField,
}

impl SplittingField {
    pub fn describe(&self, p: u64) -> String {
        let k = format!("Q(sqrt({}))", crate::arith::p_star(p));
        match self {
            Self::Rationals => "Q".to_string(),
            Self::QuadraticField => k,
            Self::HilbertClassField => format!("Hilbert class field of {k}"),
        }
    }
}

/// Field of definition of all endomorphisms of `J0+(p^2)`.
pub fn splitting_field(catalog: &Catalog, table: &TwistTable) -> Result<SplittingField> {
    let p = catalog.p;
    if p % 8 == 3 {
        return Ok(SplittingField::HilbertClassField);
    }
    for o in catalog.plus_orbits() {
        let img = table
            .image(&o.id)
            .ok_or_else(|| Error::TwistMatch(format!("orbit {} missing from twist table", o.id)))?;
        if img.target_level == p || img.target_epsilon == 1 {
            return Ok(SplittingField::QuadraticField);
        }
    }
    Ok(SplittingField::Rationals)
}
