//! JSON persistence for catalogs: the on-disk cache and the import path.
//!
//! Integers and rationals are decimal strings; there are no floats. The
//! document carries `schema_version` and a required `provenance` record.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{build_catalog, default_ell_max, default_qexp_precision, Catalog, CatalogOptions, NewformOrbit, Provenance, QExpBasis};
use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::exact::IntPoly;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProvenanceDoc {
    Computed,
    Imported { source: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QExpDoc {
    precision: u64,
    series: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitDoc {
    id: String,
    level: u64,
    dimension: usize,
    epsilon: i32,
    cm: bool,
    inner_twist: bool,
    charpolys: BTreeMap<u64, IntPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qexp: Option<QExpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    schema_version: u32,
    p: u64,
    ell_max: u64,
    provenance: ProvenanceDoc,
    orbits: Vec<OrbitDoc>,
}

fn to_doc(cat: &Catalog) -> CatalogDoc {
    CatalogDoc {
        schema_version: SCHEMA_VERSION,
        p: cat.p,
        ell_max: cat.ell_max,
        provenance: match &cat.provenance {
            Provenance::Computed => ProvenanceDoc::Computed,
            Provenance::Imported { source } => ProvenanceDoc::Imported { source: source.clone() },
        },
        orbits: cat
            .orbits
            .iter()
            .map(|o| OrbitDoc {
                id: o.id.clone(),
                level: o.level,
                dimension: o.dimension,
                epsilon: o.epsilon,
                cm: o.cm,
                inner_twist: o.inner_twist,
                charpolys: o.charpolys.clone(),
                qexp: o.qexp.as_ref().map(|q| QExpDoc {
                    precision: q.precision,
                    series: q.series.iter().map(|s| s.iter().map(|c| c.to_string()).collect()).collect(),
                }),
            })
            .collect(),
    }
}

fn from_doc(doc: CatalogDoc) -> Result<Catalog> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let orbits = doc
        .orbits
        .into_iter()
        .map(|o| {
            let qexp = match o.qexp {
                None => None,
                Some(q) => {
                    let series = q
                        .series
                        .iter()
                        .map(|s| {
                            s.iter()
                                .map(|c| {
                                    BigRational::from_str(c)
                                        .map_err(|_| Error::Schema(format!("orbit {}: bad rational {c:?}", o.id)))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(QExpBasis { precision: q.precision, series })
                }
            };
            Ok(NewformOrbit {
                id: o.id,
                level: o.level,
                dimension: o.dimension,
                epsilon: o.epsilon,
                charpolys: o.charpolys,
                cm: o.cm,
                inner_twist: o.inner_twist,
                qexp,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cat = Catalog {
        p: doc.p,
        ell_max: doc.ell_max,
        provenance: match doc.provenance {
            ProvenanceDoc::Computed => Provenance::Computed,
            ProvenanceDoc::Imported { source } => Provenance::Imported { source },
        },
        orbits,
    };
    cat.validate()?;
    Ok(cat)
}

pub fn catalog_to_json(cat: &Catalog) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(cat)).expect("catalog serializes");
    s.push('\n');
    s
}

pub fn catalog_from_json(text: &str) -> Result<Catalog> {
    let doc: CatalogDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    from_doc(doc)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Writes atomically: a temporary file in the same directory, then rename.
pub fn save_catalog(cat: &Catalog, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
    fs::write(&tmp, catalog_to_json(cat)).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    catalog_from_json(&text)
}

/// Reads externally supplied newform data. The result is always marked
/// imported; a document claiming to be computed is relabeled with its path.
pub fn import_catalog(path: &Path) -> Result<Catalog> {
    let mut cat = load_catalog(path)?;
    if cat.provenance == Provenance::Computed {
        cat.provenance = Provenance::Imported { source: path.display().to_string() };
    }
    Ok(cat)
}

impl Catalog {
    /// Restricts the stored data to primes `l <= ell_max` and q-expansions
    /// to `precision`.
    pub fn truncated(&self, ell_max: u64, precision: u64) -> Catalog {
        let mut c = self.clone();
        c.ell_max = ell_max.min(self.ell_max);
        for o in &mut c.orbits {
            o.charpolys.retain(|l, _| *l <= ell_max);
            if let Some(q) = &mut o.qexp {
                if q.precision > precision {
                    q.precision = precision;
                    for s in &mut q.series {
                        s.truncate(precision as usize);
                    }
                }
            }
        }
        c
    }

    fn qexp_precision(&self) -> Option<u64> {
        self.plus_orbits().map(|o| o.qexp.as_ref().map(|q| q.precision)).min().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// The cached file was unusable and has been rebuilt.
    Rebuilt { reason: String },
}

/// Versioned catalog cache: `<root>/v<schema>/catalog-p<p>.json`.
#[derive(Clone, Debug)]
pub struct CatalogCache {
    root: PathBuf,
}

impl CatalogCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn path(&self, p: u64) -> PathBuf {
        self.root.join(format!("v{SCHEMA_VERSION}")).join(format!("catalog-p{p}.json"))
    }

    pub fn store(&self, cat: &Catalog) -> Result<()> {
        save_catalog(cat, &self.path(cat.p))
    }

    /// Returns the cached catalog when it covers the requested range,
    /// building (and caching) it otherwise.
    pub fn get_or_build(&self, p: u64, opts: &CatalogOptions) -> Result<(Catalog, CacheStatus)> {
        let ell_max = opts.ell_max.unwrap_or_else(|| default_ell_max(p));
        let prec = opts.qexp_precision.unwrap_or(default_qexp_precision(p)?).min(ell_max + 1);
        let path = self.path(p);
        let mut status = CacheStatus::Built;
        if path.exists() {
            match load_catalog(&path) {
                Ok(cat) if cat.p == p && cat.ell_max >= ell_max && cat.qexp_precision().unwrap_or(0) >= prec => {
                    let have: Vec<u64> = primes_up_to(ell_max).into_iter().filter(|&l| l != p).collect();
                    if cat.orbits.iter().all(|o| have.iter().all(|l| o.charpolys.contains_key(l))) {
                        return Ok((cat.truncated(ell_max, prec), CacheStatus::Hit));
                    }
                    status = CacheStatus::Rebuilt { reason: "cached catalog is missing charpolys".into() };
                }
                Ok(_) => {
                    status = CacheStatus::Rebuilt { reason: "cached catalog covers a smaller range".into() };
                }
                Err(e) => {
                    status = CacheStatus::Rebuilt { reason: e.to_string() };
                }
            }
        }
        let cat = build_catalog(p, &CatalogOptions { ell_max: Some(ell_max), qexp_precision: Some(prec) })?;
        self.store(&cat)?;
        Ok((cat, status))
    }
}
