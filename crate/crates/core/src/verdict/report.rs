use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{analyze_prime, AutGroup, CitedConstant, Verdict, PremiseSource, PrimeAnalysis, Status, VerdictOptions, CITED_CONSTANTS};
use crate::catalog::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::hyper::ModelOutcome;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PremiseCounts {
    pub computed: usize,
    pub cited: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub primes: Vec<u64>,
    /// `p -> t` for every prime with a catalog.
    pub t_values: BTreeMap<u64, u64>,
    pub premise_counts: PremiseCounts,
    /// Registry entries referenced by at least one verdict.
    pub cited_constants: Vec<CitedConstant>,
    pub analyses: Vec<PrimeAnalysis>,
}

/// Analyzes the primes concurrently and assembles them in increasing order.
pub fn run_report(primes: &[u64], opts: &VerdictOptions) -> Result<Report> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let mut analyses = primes.par_iter().map(|&p| analyze_prime(p, opts)).collect::<Result<Vec<_>>>()?;
    analyses.sort_by_key(|a| a.p);

    let t_values = analyses.iter().filter_map(|a| a.t.map(|t| (a.p, t))).collect();
    let premises = analyses.iter().flat_map(|a| a.verdict.premises.iter());
    let (mut computed, mut cited) = (0, 0);
    let mut used = std::collections::BTreeSet::new();
    for x in premises {
        match x.source {
            PremiseSource::Computed => computed += 1,
            PremiseSource::Cited => {
                cited += 1;
                used.insert(x.reference.clone());
            }
        }
    }
    let cited_constants = CITED_CONSTANTS.iter().filter(|c| used.contains(c.key)).copied().collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        primes,
        t_values,
        premise_counts: PremiseCounts { computed, cited },
        cited_constants,
        analyses,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Worst status over all verdicts; an empty report is VERIFIED.
    pub fn status(&self) -> Status {
        self.analyses.iter().map(|a| a.verdict.status).max().unwrap_or(Status::Verified)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.analyses.is_empty() {
            s.push_str("no primes requested\n");
            return s;
        }
        s.push_str("genus\n");
        s.push_str("      p    g+    g0\n");
        for a in &self.analyses {
            let _ = writeln!(s, "  {:5} {:5} {:5}", a.p, a.genus.g_plus, a.genus.g_zero);
        }
        if !self.t_values.is_empty() {
            s.push_str("\nt\n");
            for (p, t) in &self.t_values {
                let _ = writeln!(s, "  p = {p:3}: t = {t}");
            }
        }
        for a in &self.analyses {
            s.push('\n');
            s.push_str(&analysis_text(a));
        }
        let _ = writeln!(
            s,
            "\npremises: {} computed, {} cited",
            self.premise_counts.computed, self.premise_counts.cited
        );
        for c in &self.cited_constants {
            let _ = writeln!(s, "  [{}] {}", c.key, c.statement);
        }
        s
    }
}

/// Human-readable summary of one prime.
pub fn analysis_text(a: &PrimeAnalysis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p = {} (g+ = {}, g0 = {})", a.p, a.genus.g_plus, a.genus.g_zero);
    if let Some(c) = &a.catalog {
        let _ = writeln!(
            s,
            "  catalog: l_max {}, {}{}, plus dimension {}",
            c.ell_max,
            c.provenance,
            if c.provisional { ", provisional" } else { "" },
            c.plus_dimension
        );
        for o in &c.orbits {
            let mut flags = Vec::new();
            if o.cm {
                flags.push("cm");
            }
            if o.inner_twist {
                flags.push("inner twist");
            }
            if o.plus {
                flags.push("plus");
            }
            let _ = writeln!(
                s,
                "    {:8} dim {:2} eps {:+} twist {:8} [{}]",
                o.id,
                o.dimension,
                o.epsilon,
                o.twist,
                flags.join(", ")
            );
        }
    }
    if let (Some(set), Some(t)) = (&a.s_set, a.t) {
        let _ = writeln!(s, "  S = {{{}}}, t = {t}", set.join(", "));
    }
    if let Some(f) = &a.splitting_field {
        let _ = writeln!(s, "  splitting field: {f}");
    }
    if let Some(b) = &a.odd_order {
        let _ = writeln!(s, "  (g+ - 1)/(t - 1) = {}, odd orders excluded: {}", b.bound, b.excluded);
    }
    if let Some(n2) = &a.n2 {
        let _ = writeln!(s, "  N_2(1), N_2(2) = {}", n2.join(", "));
    }
    if let Some(c) = &a.parity {
        let _ = writeln!(
            s,
            "  parity: s = {}, n <= {}, sum P = {}, allowed {}, ruled out: {}",
            c.s, c.n_max, c.sum_p, c.allowed_max, c.ruled_out
        );
    }
    if let Some(b) = &a.basis {
        let _ = writeln!(s, "  basis pivots {:?}: {:?}", b.pivots, b.shape);
    }
    match &a.hyperelliptic {
        Some(ModelOutcome::Model(m)) => {
            let _ = writeln!(s, "  model: {}", m.equation);
        }
        Some(ModelOutcome::Refused(r)) => {
            let _ = writeln!(s, "  model refused: {}", r.reason);
        }
        None => {}
    }
    if let Some(c) = &a.p11 {
        let _ = writeln!(s, "  model: {}", c.model.equation);
        let _ = writeln!(s, "    x = {}", c.model.x.truncate(6));
        let _ = writeln!(s, "    y = {}", c.model.y.truncate(6));
    }
    s.push_str(&verdict_text(&a.verdict));
    s
}

/// The verdict with its premise ledger.
pub fn verdict_text(v: &Verdict) -> String {
    let mut s = String::new();
    let group = match v.aut_group {
        Some(AutGroup::Trivial) => "trivial",
        Some(AutGroup::KleinFour) => "klein_four",
        None => "undetermined",
    };
    let status = match v.status {
        Status::Verified => "VERIFIED",
        Status::Partial => "PARTIAL",
        Status::Failed => "FAILED",
    };
    let _ = writeln!(s, "  verdict for p = {}: {group} ({status})", v.p);
    for x in &v.premises {
        let tag = match x.source {
            PremiseSource::Computed => if x.passed { "ok" } else { "FAIL" },
            PremiseSource::Cited => "cited",
        };
        let _ = writeln!(s, "    [{tag}] {} ({})", x.claim, x.reference);
    }
    for n in &v.notes {
        let _ = writeln!(s, "    note: {n}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let r = run_report(&[], &VerdictOptions::default()).unwrap();
        assert!(r.analyses.is_empty());
        assert_eq!(r.status(), Status::Verified);
        assert_eq!(r.premise_counts.computed + r.premise_counts.cited, 0);
    }

    #[test]
    fn large_prime_report_is_deterministic() {
        let a = run_report(&[43, 37, 41], &VerdictOptions::default()).unwrap();
        let b = run_report(&[37, 41, 43], &VerdictOptions::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.primes, vec![37, 41, 43]);
        assert!(a.to_text().contains("g+"));
    }
}
