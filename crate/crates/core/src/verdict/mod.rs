//! Per-prime case analysis of `Aut(X0+(p^2))`: every premise is either a
//! computed certificate or an entry of the cited-constant registry.

pub mod report;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{is_prime, sturm_bound_p2};
use crate::catalog::{
    build_catalog, compute_s_and_t, default_ell_max, default_qexp_precision, splitting_field, Catalog, CatalogCache,
    CatalogOptions, CacheStatus, SplittingField, TwistTable,
};
use crate::curve::{
    exclude_odd_order, genus_bound_excludes, genus_table, involution_ruled_out, standard_range, weil_polynomial,
    GenusData, OddOrderBound, ParityCertificate,
};
use crate::error::{Error, Result};
use crate::hyper::{hyperelliptic_screen, verify_p11, BasisShape, ModelOutcome, P11Certificate, PlusSpaceBasis};

pub use report::{analysis_text, run_report, verdict_text, Report};

/// Statements used by the case analysis that are not recomputed here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CitedConstant {
    pub key: &'static str,
    pub statement: &'static str,
}

pub const CITED_CONSTANTS: &[CitedConstant] = &[
    CitedConstant {
        key: "automorphisms_defined_over_k",
        statement: "Every automorphism of X0+(p^2) is defined over K = Q(sqrt(p*)).",
    },
    CitedConstant {
        key: "infinity_only_cusp_over_k",
        statement: "The cusp infinity is the only cusp of X0+(p^2) defined over K, so a nontrivial automorphism defined over K that sends infinity to a cusp fixes it and is defined over Q.",
    },
    CitedConstant {
        key: "k_gonality_at_most_6",
        statement: "If X0+(p^2) has a nontrivial automorphism, its K-gonality is at most 6.",
    },
    CitedConstant {
        key: "at_most_12_fixed_points",
        statement: "A nontrivial automorphism of X0+(p^2) has at most 12 fixed points.",
    },
    CitedConstant {
        key: "gonality_genus_bound",
        statement: "A curve with good reduction at 2 satisfies g < #X(F_4) + 1 under the gonality bound above, giving g+ <= 30; a hyperelliptic X0+(p^2) has g+ <= 10.",
    },
    CitedConstant {
        key: "hyperelliptic_basis_shape",
        statement: "If X0+(p^2) is hyperelliptic, the w = +1 cusp forms have a rational basis with pivot valuations 1..g or 1,3,..,2g-1, and x = f_g/f_{g-1}, y = (q dx/dq)/f_{g-1} satisfy y^2 = P(x) with P squarefree of degree 2g+1 or 2g+2.",
    },
    CitedConstant {
        key: "aut_121_in_endomorphism_units",
        statement: "Aut(X0+(121)) is a finite subgroup of End(E1) x End(E2) = Z[(1+sqrt(-11))/2] x Z, hence of order at most 4.",
    },
    CitedConstant {
        key: "totally_real_endomorphisms_13",
        statement: "End(J0+(169)) tensor Q is a totally real field, so it contains only the roots of unity +-1, and a nonhyperelliptic X0+(169) has trivial automorphism group.",
    },
    CitedConstant {
        key: "odd_order_quotient_genus",
        statement: "An automorphism of odd order m has quotient genus g_u >= t and m <= (g+ - 1)/(g_u - 1) by Riemann-Hurwitz.",
    },
    CitedConstant {
        key: "parity_changes_bound_fixed_points",
        statement: "An involution with 2r fixed points, reduced at a prime of K above l, allows at most 2r parity changes in R_l(n), or 2r - 1 when N_l(s) is odd.",
    },
];

pub fn cited(key: &str) -> Option<&'static CitedConstant> {
    CITED_CONSTANTS.iter().find(|c| c.key == key)
}

/// Primes handled by explicit computation.
pub const COMPUTED_PRIMES: [u64; 7] = [11, 13, 17, 19, 23, 29, 31];

/// Default sample of primes above 31 for the genus-bound branch.
pub const DEFAULT_LARGE_SAMPLE: [u64; 3] = [37, 41, 43];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AutGroup {
    Trivial,
    KleinFour,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Verified,
    Partial,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiseSource {
    Computed,
    Cited,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Premise {
    pub claim: String,
    pub source: PremiseSource,
    /// Certificate field of the prime analysis, or the cited-constant key.
    pub reference: String,
    pub passed: bool,
}

impl Premise {
    fn computed(claim: impl Into<String>, reference: &str, passed: bool) -> Self {
        Self { claim: claim.into(), source: PremiseSource::Computed, reference: reference.into(), passed }
    }

    fn cited(key: &'static str) -> Self {
        let c = cited(key).expect("registered cited constant");
        Self { claim: c.statement.into(), source: PremiseSource::Cited, reference: key.into(), passed: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub p: u64,
    pub genus: GenusData,
    pub aut_group: Option<AutGroup>,
    pub premises: Vec<Premise>,
    pub status: Status,
    /// Why the status is not VERIFIED.
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn cited_keys(&self) -> Vec<&str> {
        self.premises.iter().filter(|p| p.source == PremiseSource::Cited).map(|p| p.reference.as_str()).collect()
    }
}

/// Where catalogs come from.
#[derive(Clone, Debug, Default)]
pub struct VerdictOptions {
    pub cache: Option<CatalogCache>,
    /// Catalogs supplied by the caller (preloaded or imported), used
    /// instead of the cache or a fresh build.
    pub catalogs: BTreeMap<u64, Catalog>,
    pub ell_max: Option<u64>,
    pub precision: Option<u64>,
    pub n_max: Option<usize>,
}

impl VerdictOptions {
    fn catalog_options(&self) -> CatalogOptions {
        CatalogOptions { ell_max: self.ell_max, qexp_precision: self.precision }
    }

    /// Catalog for `p`, plus the cache status when a cache is configured.
    pub fn catalog(&self, p: u64) -> Result<(Catalog, Option<CacheStatus>)> {
        if let Some(c) = self.catalogs.get(&p) {
            return Ok((c.clone(), None));
        }
        match &self.cache {
            Some(cache) => {
                let (c, s) = cache.get_or_build(p, &self.catalog_options())?;
                Ok((c, Some(s)))
            }
            None => Ok((build_catalog(p, &self.catalog_options())?, None)),
        }
    }

    /// Overrides below the defaults make the run exploratory.
    pub fn reduced(&self, p: u64) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(l) = self.ell_max {
            if l < default_ell_max(p) {
                out.push(format!("l_max {l} is below the default {}", default_ell_max(p)));
            }
        }
        if let (Some(pr), Ok(d)) = (self.precision, default_qexp_precision(p)) {
            if pr < d {
                out.push(format!("precision {pr} is below the default {d}"));
            }
        }
        if let (Some(n), Some(d)) = (self.n_max, standard_range(p)) {
            if n != d {
                out.push(format!("parity range n <= {n} differs from the standard n <= {d}"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub id: String,
    pub level: u64,
    pub dimension: usize,
    pub epsilon: i32,
    pub plus: bool,
    pub cm: bool,
    pub inner_twist: bool,
    pub t2_charpoly: String,
    pub twist: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogSummary {
    pub ell_max: u64,
    pub provenance: String,
    pub provisional: bool,
    pub plus_dimension: usize,
    pub orbits: Vec<OrbitSummary>,
}

/// All certificates computed for one prime, with its verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeAnalysis {
    pub p: u64,
    pub genus: GenusData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_set: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting_field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_order: Option<OddOrderBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<PlusSpaceBasis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperelliptic: Option<ModelOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p11: Option<P11Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus_bound: Option<GenusBound>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusBound {
    pub g_plus: u64,
    pub bound: u64,
    pub excluded: bool,
}

pub fn catalog_summary(cat: &Catalog, table: &TwistTable) -> CatalogSummary {
    CatalogSummary {
        ell_max: cat.ell_max,
        provenance: match &cat.provenance {
            crate::catalog::Provenance::Computed => "computed".into(),
            crate::catalog::Provenance::Imported { source } => format!("imported from {source}"),
        },
        provisional: cat.is_provisional(),
        plus_dimension: cat.plus_dimension(),
        orbits: cat
            .orbits
            .iter()
            .map(|o| OrbitSummary {
                id: o.id.clone(),
                level: o.level,
                dimension: o.dimension,
                epsilon: o.epsilon,
                plus: o.in_plus_part(cat.p),
                cm: o.cm,
                inner_twist: o.inner_twist,
                t2_charpoly: o.charpoly(2).map(|f| f.to_string()).unwrap_or_default(),
                twist: table.image(&o.id).map(|e| e.target.clone()).unwrap_or_default(),
            })
            .collect(),
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 11 {
        return Err(Error::InvalidArgument(format!("p = {p}: X0+(p^2) has genus 0 below 11")));
    }
    Ok(())
}

fn finish(p: u64, genus: GenusData, aut: AutGroup, premises: Vec<Premise>, mut notes: Vec<String>) -> Verdict {
    let failed = premises.iter().any(|x| !x.passed);
    let status = if failed {
        notes.push("a computed premise failed".into());
        Status::Failed
    } else if !notes.is_empty() {
        Status::Partial
    } else {
        Status::Verified
    };
    Verdict { p, genus, aut_group: if failed { None } else { Some(aut) }, premises, status, notes }
}

fn failed_verdict(p: u64, genus: GenusData, err: &Error) -> Verdict {
    Verdict {
        p,
        genus,
        aut_group: None,
        premises: Vec::new(),
        status: Status::Failed,
        notes: vec![format!("computation failed: {err}")],
    }
}

fn empty_analysis(p: u64, genus: GenusData, verdict: Verdict) -> PrimeAnalysis {
    PrimeAnalysis {
        p,
        genus,
        catalog: None,
        s_set: None,
        t: None,
        splitting_field: None,
        odd_order: None,
        n2: None,
        parity: None,
        basis: None,
        hyperelliptic: None,
        p11: None,
        genus_bound: None,
        verdict,
    }
}

/// Full analysis of one prime. Errors only for invalid `p`; failed
/// computations yield a FAILED verdict.
pub fn analyze_prime(p: u64, opts: &VerdictOptions) -> Result<PrimeAnalysis> {
    check_prime(p)?;
    let genus = genus_table(p)?;
    if p > 31 {
        let (excluded, g) = genus_bound_excludes(p)?;
        let premises = vec![
            Premise::computed(format!("g+ = {g} > 30"), "genus_bound", excluded),
            Premise::cited("k_gonality_at_most_6"),
            Premise::cited("gonality_genus_bound"),
            Premise::cited("at_most_12_fixed_points"),
        ];
        let v = finish(p, genus, AutGroup::Trivial, premises, Vec::new());
        let mut a = empty_analysis(p, genus, v);
        a.genus_bound = Some(GenusBound { g_plus: g, bound: 30, excluded });
        return Ok(a);
    }
    match analyze_small(p, genus, opts) {
        Ok(a) => Ok(a),
        Err(e) => Ok(empty_analysis(p, genus, failed_verdict(p, genus, &e))),
    }
}

fn analyze_small(p: u64, genus: GenusData, opts: &VerdictOptions) -> Result<PrimeAnalysis> {
    let (cat, _) = opts.catalog(p)?;
    let mut notes = opts.reduced(p);
    if cat.is_provisional() {
        notes.push(format!("catalog l_max {} is below the Sturm bound {}", cat.ell_max, sturm_bound_p2(p)));
    }
    let table = TwistTable::build(&cat)?;
    let (s_set, t) = compute_s_and_t(&cat, &table)?;
    let field = splitting_field(&cat, &table)?;
    let mut a = empty_analysis(p, genus, failed_verdict(p, genus, &Error::Verification("incomplete".into())));
    a.catalog = Some(catalog_summary(&cat, &table));
    a.s_set = Some(s_set);
    a.t = Some(t as u64);
    a.splitting_field = Some(field.describe(p));
    a.odd_order = exclude_odd_order(t as u64, genus.g_plus).ok();
    let plus_dim_ok = cat.plus_dimension() as u64 == genus.g_plus;
    let mut premises = vec![Premise::computed(
        format!("orbit dimensions over New+_(p^2) and New_p sum to g+ = {}", genus.g_plus),
        "catalog",
        plus_dim_ok,
    )];

    let aut = match p {
        11 => {
            let cert = verify_p11(&cat)?;
            premises.push(Premise::computed(
                format!("X0+(121): {}", cert.model.equation),
                "p11.model",
                cert.model.certified,
            ));
            premises.push(Premise::computed(
                "the maps (x,y) -> (+-x,+-y) preserve the equation, giving (Z/2Z)^2 inside Aut",
                "p11.maps",
                cert.maps.iter().all(|m| m.preserves_equation),
            ));
            premises.push(Premise::computed(
                format!("infinity = ({}, {}) is fixed by no nontrivial sign map", cert.infinity.0, cert.infinity.1),
                "p11.infinity",
                cert.no_nontrivial_map_fixes_infinity,
            ));
            premises.push(Premise::cited("aut_121_in_endomorphism_units"));
            let (basis, _) = hyperelliptic_screen(&cat, None)?;
            a.basis = Some(basis);
            a.p11 = Some(cert);
            AutGroup::KleinFour
        }
        13 => {
            let (basis, outcome) = hyperelliptic_screen(&cat, None)?;
            let refused = matches!(outcome, ModelOutcome::Refused(_));
            premises.push(Premise::computed(
                format!("no hyperelliptic model: pivots {:?}, shape {:?}, fit refused", basis.pivots, basis.shape),
                "hyperelliptic",
                refused,
            ));
            premises.push(Premise::cited("hyperelliptic_basis_shape"));
            let plus_flags_clear = cat.plus_orbits().all(|o| !o.cm && !o.inner_twist);
            premises.push(Premise::computed(
                "no orbit in New+_169 or New_13 has CM or an inner twist",
                "catalog",
                plus_flags_clear,
            ));
            premises.push(Premise::computed(
                format!("splitting field of J0+(169) is {}", field.describe(p)),
                "splitting_field",
                field == SplittingField::Rationals,
            ));
            premises.push(Premise::cited("totally_real_endomorphisms_13"));
            a.basis = Some(basis);
            a.hyperelliptic = Some(outcome);
            AutGroup::Trivial
        }
        _ => {
            if p <= 19 {
                let (basis, outcome) = hyperelliptic_screen(&cat, None)?;
                premises.push(Premise::computed(
                    format!("basis pivots {:?} have shape {:?}: not hyperelliptic", basis.pivots, basis.shape),
                    "hyperelliptic",
                    basis.shape == BasisShape::Other && matches!(outcome, ModelOutcome::Refused(_)),
                ));
                premises.push(Premise::cited("hyperelliptic_basis_shape"));
                a.basis = Some(basis);
                a.hyperelliptic = Some(outcome);
            } else {
                premises.push(Premise::computed(
                    format!("g+ = {} > 10: not hyperelliptic", genus.g_plus),
                    "genus",
                    genus.g_plus > 10,
                ));
                premises.push(Premise::cited("gonality_genus_bound"));
            }
            let odd = exclude_odd_order(t as u64, genus.g_plus);
            let (claim, ok) = match &odd {
                Ok(b) => (format!("t = {t}: (g+ - 1)/(t - 1) = {} < 3, no automorphism of odd order", b.bound), b.excluded),
                Err(e) => (format!("odd-order bound unavailable: {e}"), false),
            };
            premises.push(Premise::computed(claim, "odd_order", ok));
            premises.push(Premise::cited("odd_order_quotient_genus"));
            premises.push(Premise::cited("automorphisms_defined_over_k"));
            premises.push(Premise::cited("infinity_only_cusp_over_k"));
            premises.push(Premise::cited("at_most_12_fixed_points"));
            let cert = involution_ruled_out(&cat, opts.n_max)?;
            premises.push(Premise::computed(
                format!(
                    "sum of P_2(n) for n <= {} is {} > {} allowed: no involution",
                    cert.n_max, cert.sum_p, cert.allowed_max
                ),
                "parity",
                cert.ruled_out,
            ));
            premises.push(Premise::cited("parity_changes_bound_fixed_points"));
            let w = weil_polynomial(&cat, 2, 2)?;
            a.n2 = Some(w.counts.iter().map(|c| c.to_string()).collect());
            a.parity = Some(cert);
            AutGroup::Trivial
        }
    };
    a.verdict = finish(p, genus, aut, premises, std::mem::take(&mut notes));
    Ok(a)
}

/// The verdict alone.
pub fn automorphism_verdict(p: u64, opts: &VerdictOptions) -> Result<Verdict> {
    Ok(analyze_prime(p, opts)?.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_keys_are_unique() {
        let mut keys: Vec<_> = CITED_CONSTANTS.iter().map(|c| c.key).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), CITED_CONSTANTS.len());
    }

    #[test]
    fn large_primes_use_the_genus_bound() {
        let v = automorphism_verdict(37, &VerdictOptions::default()).unwrap();
        assert_eq!(v.aut_group, Some(AutGroup::Trivial));
        assert_eq!(v.status, Status::Verified);
        assert!(v.premises[0].claim.contains("45"));
        assert!(v.cited_keys().contains(&"k_gonality_at_most_6"));
    }

    #[test]
    fn invalid_primes_are_rejected() {
        assert!(analyze_prime(4, &VerdictOptions::default()).is_err());
        assert!(analyze_prime(7, &VerdictOptions::default()).is_err());
    }
}
