use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use splitcartan::arith::is_prime;
use splitcartan::catalog::{
    compute_s_and_t, import_catalog, save_catalog, splitting_field, CacheStatus, TwistTable,
};
use splitcartan::curve::{genus_bound_excludes, genus_table, involution_ruled_out, weil_polynomial};
use splitcartan::hyper::{hyperelliptic_screen, verify_p11, ModelOutcome};
use splitcartan::verdict::{
    analyze_prime, catalog_summary, run_report, verdict_text, COMPUTED_PRIMES, DEFAULT_LARGE_SAMPLE,
};
use splitcartan::{Catalog, CatalogCache, Status, VerdictOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Exact verification of the automorphism groups of X0+(p^2).
#[derive(Parser, Debug)]
#[command(name = "splitcartan", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Catalog cache directory.
    #[arg(long, env = "SPLITCARTAN_CACHE", global = true)]
    cache: Option<PathBuf>,
    /// Newform catalog file to use instead of computing one.
    #[arg(long, global = true)]
    import: Option<PathBuf>,
    /// Largest prime l with Hecke data.
    #[arg(long, global = true)]
    lmax: Option<u64>,
    /// q-expansion precision.
    #[arg(long, global = true)]
    precision: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus of X0+(p^2) and X0(p).
    Genus {
        #[arg(short, value_parser = parse_level_prime)]
        p: u64,
    },
    /// Newform orbit catalog with twists, S, t and splitting field.
    Catalog {
        #[arg(short, value_parser = parse_level_prime)]
        p: u64,
        /// Write the catalog document here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Eichler-Shimura point counts N_l(1..=nmax).
    Pointcount {
        #[arg(short, value_parser = parse_level_prime)]
        p: u64,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        #[arg(long, default_value_t = 2)]
        ell: u64,
    },
    /// Parity certificate ruling out involutions.
    Parity {
        #[arg(short, value_parser = parse_level_prime)]
        p: u64,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Hyperelliptic screen; the full certificate for p = 11.
    Hyper {
        #[arg(short, value_parser = parse_level_prime)]
        p: u64,
    },
    /// Automorphism group verdict.
    Verdict {
        #[arg(short, value_parser = parse_level_prime, required_unless_present = "all", conflicts_with = "all")]
        p: Option<u64>,
        /// The computed primes up to 31 plus the sample above 31.
        #[arg(long)]
        all: bool,
        #[arg(long, value_delimiter = ',', value_parser = parse_level_prime, default_values_t = DEFAULT_LARGE_SAMPLE)]
        sample: Vec<u64>,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Full report over a list of primes.
    Report {
        /// Comma-separated; may be empty.
        #[arg(long, value_parser = parse_prime_list)]
        primes: PrimeList,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        nmax: Option<usize>,
    },
}

#[derive(Clone, Debug)]
struct PrimeList(Vec<u64>);

fn parse_level_prime(s: &str) -> std::result::Result<u64, String> {
    let p: u64 = s.trim().parse().map_err(|e| format!("{s:?} is not a positive integer: {e}"))?;
    if !is_prime(p) {
        return Err(format!("{p} is not a prime"));
    }
    if p < 11 {
        return Err(format!("X0+({p}^2) has genus 0; p must be at least 11"));
    }
    Ok(p)
}

fn parse_prime_list(s: &str) -> std::result::Result<PrimeList, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_level_prime).collect::<Result<_, _>>().map(PrimeList)
}

struct Ctx {
    format: Format,
    opts: VerdictOptions,
    imported: Option<u64>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let mut opts = VerdictOptions {
            cache: cli.cache.as_ref().map(CatalogCache::new),
            ell_max: cli.lmax,
            precision: cli.precision,
            ..Default::default()
        };
        let mut imported = None;
        if let Some(path) = &cli.import {
            let cat = import_catalog(path).with_context(|| format!("rejecting import file {}", path.display()))?;
            cat.validate().with_context(|| format!("rejecting import file {}", path.display()))?;
            imported = Some(cat.p);
            opts.catalogs.insert(cat.p, cat);
        }
        Ok(Self { format: cli.format, opts, imported })
    }

    /// Catalog for a single-prime command; an import must match `p`.
    fn single_catalog(&self, p: u64) -> Result<Catalog> {
        match self.imported {
            Some(q) if q != p => bail!("the imported catalog is for p = {q}, not {p}"),
            _ => self.catalog(p),
        }
    }

    fn catalog(&self, p: u64) -> Result<Catalog> {
        let (cat, status) = self.opts.catalog(p)?;
        if let Some(CacheStatus::Rebuilt { reason }) = status {
            eprintln!("warning: cached catalog for p = {p} was unusable ({reason}); rebuilt");
        }
        Ok(cat)
    }

    /// Loads the catalogs needed by the verdicts up front, in parallel.
    fn preload(&mut self, primes: &[u64]) -> Result<()> {
        let need: Vec<u64> =
            primes.iter().copied().filter(|p| *p <= 31 && !self.opts.catalogs.contains_key(p)).collect();
        let loaded = need.par_iter().map(|&p| self.catalog(p).map(|c| (p, c))).collect::<Result<Vec<_>>>()?;
        self.opts.catalogs.extend(loaded);
        Ok(())
    }

    fn emit(&self, value: serde_json::Value, text: impl FnOnce() -> String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
            Format::Text => print!("{}", text()),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut ctx = Ctx::new(&cli)?;
    match cli.command {
        Command::Genus { p } => {
            let g = genus_table(p)?;
            let (excluded, _) = genus_bound_excludes(p)?;
            ctx.emit(json!({ "p": p, "g_plus": g.g_plus, "g_zero": g.g_zero, "exceeds_30": excluded }), || {
                format!("p = {p}: g+ = {}, g0 = {}\n", g.g_plus, g.g_zero)
            });
        }
        Command::Catalog { p, save } => {
            let cat = ctx.single_catalog(p)?;
            if let Some(path) = &save {
                save_catalog(&cat, path)?;
            }
            let table = TwistTable::build(&cat)?;
            let (s_set, t) = compute_s_and_t(&cat, &table)?;
            let field = splitting_field(&cat, &table)?;
            let summary = catalog_summary(&cat, &table);
            let value = json!({
                "p": p,
                "catalog": summary,
                "twist_table": table,
                "s": s_set,
                "t": t,
                "splitting_field": field.describe(p),
            });
            ctx.emit(value, || {
                let mut s = format!(
                    "p = {p}: l_max {}, {}{}, plus dimension {}\n",
                    summary.ell_max,
                    summary.provenance,
                    if summary.provisional { ", provisional" } else { "" },
                    summary.plus_dimension
                );
                for o in &summary.orbits {
                    s += &format!(
                        "  {:8} dim {:2} eps {:+} cm {:5} inner twist {:5} twist {:8} T_2 {}\n",
                        o.id, o.dimension, o.epsilon, o.cm, o.inner_twist, o.twist, o.t2_charpoly
                    );
                }
                s += &format!("S = {{{}}}, t = {t}\nsplitting field: {}\n", s_set.join(", "), field.describe(p));
                s
            });
        }
        Command::Pointcount { p, nmax, ell } => {
            if !is_prime(ell) {
                bail!("l = {ell} is not a prime");
            }
            let cat = ctx.single_catalog(p)?;
            let w = weil_polynomial(&cat, ell, nmax)?;
            let fe = w.satisfies_functional_equation();
            let mut value = serde_json::to_value(&w)?;
            value["functional_equation"] = json!(fe);
            ctx.emit(value, || {
                let mut s = format!("p = {p}, l = {ell}, s = {}\nWeil polynomial: {}\n", w.s, w.weil_poly);
                for (i, n) in w.counts.iter().enumerate() {
                    s += &format!("N_{ell}({}) = {n}\n", i + 1);
                }
                s += &format!("functional equation: {fe}\n");
                s
            });
        }
        Command::Parity { p, nmax } => {
            let cat = ctx.single_catalog(p)?;
            let cert = involution_ruled_out(&cat, nmax)?;
            ctx.emit(serde_json::to_value(&cert)?, || {
                let bits: String = cert.parity.iter().map(|b| char::from(b'0' + b)).collect();
                format!(
                    "p = {p}, l = {}, s = {}, n <= {}\nP = {bits}\nsum P = {}, allowed {} (cap {}, N(s) odd: {})\nruled out: {}\n",
                    cert.ell, cert.s, cert.n_max, cert.sum_p, cert.allowed_max, cert.fixed_point_cap, cert.n_s_odd,
                    cert.ruled_out
                )
            });
        }
        Command::Hyper { p } => {
            let cat = ctx.single_catalog(p)?;
            let (basis, outcome) = hyperelliptic_screen(&cat, ctx.opts.precision)?;
            let cert = if p == 11 { Some(verify_p11(&cat)?) } else { None };
            let value = json!({ "p": p, "pivots": basis.pivots, "shape": basis.shape, "result": outcome, "p11": cert });
            ctx.emit(value, || {
                let mut s = format!("p = {p}: basis pivots {:?}, shape {:?}\n", basis.pivots, basis.shape);
                match &outcome {
                    ModelOutcome::Model(m) => {
                        s += &format!(
                            "{}\n  x = {}\n  y = {}\n  verified to q^{} (certification bound {}), certified: {}\n",
                            m.equation,
                            m.x.truncate(6),
                            m.y.truncate(6),
                            m.verified_precision,
                            m.certification_bound,
                            m.certified
                        );
                    }
                    ModelOutcome::Refused(r) => s += &format!("refused: {}\n", r.reason),
                }
                if let Some(c) = &cert {
                    s += &format!(
                        "model in the basis f1 = 121.a, h = f2 - 11 f2(q^11):\n{}\n  x = {}\n  y = {}\n",
                        c.model.equation,
                        c.model.x.truncate(6),
                        c.model.y.truncate(6)
                    );
                    s += &format!("infinity = ({}, {})\n", c.infinity.0, c.infinity.1);
                    for m in &c.maps {
                        s += &format!(
                            "  {}: preserves equation {}, fixes infinity {}\n",
                            m.name, m.preserves_equation, m.fixes_infinity
                        );
                    }
                    s += &format!("verified: {}\n", c.verified);
                }
                s
            });
        }
        Command::Verdict { p, all, sample, nmax } => {
            ctx.opts.n_max = nmax;
            let primes: Vec<u64> = if all {
                COMPUTED_PRIMES.iter().copied().chain(sample.iter().copied().filter(|&q| q > 31)).collect()
            } else {
                vec![p.expect("clap requires -p without --all")]
            };
            ctx.preload(&primes)?;
            let mut analyses = primes.par_iter().map(|&q| analyze_prime(q, &ctx.opts)).collect::<Result<Vec<_>, _>>()?;
            analyses.sort_by_key(|a| a.p);
            let verdicts: Vec<_> = analyses.iter().map(|a| &a.verdict).collect();
            let value = if all { serde_json::to_value(&verdicts)? } else { serde_json::to_value(verdicts[0])? };
            ctx.emit(value, || verdicts.iter().map(|v| verdict_text(v)).collect());
            if verdicts.iter().any(|v| v.status == Status::Failed) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report { primes, output, nmax } => {
            ctx.opts.n_max = nmax;
            ctx.preload(&primes.0)?;
            let report = run_report(&primes.0, &ctx.opts)?;
            let body = match ctx.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            match &output {
                Some(path) => {
                    std::fs::write(path, &body).with_context(|| format!("writing report to {}", path.display()))?;
                    for a in &report.analyses {
                        eprint!("{}", verdict_text(&a.verdict));
                    }
                }
                None => print!("{body}"),
            }
            if report.status() == Status::Failed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
