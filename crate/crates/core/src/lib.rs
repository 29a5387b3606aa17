//! Exact verification engine for the automorphism groups of the split Cartan
//! modular curves `X_split(p) ≅ X0+(p^2)`.
//!
//! The crate recomputes every quantitative input of the case analysis from
//! first principles: modular symbols and Hecke operators at levels `p` and
//! `p^2`, the newform orbit catalog with Atkin–Lehner signs, twists and CM,
//! Eichler–Shimura point counts with the parity obstruction to involutions,
//! and the hyperelliptic model of `X0+(121)`.

pub mod arith;
pub mod error;
pub mod exact;
pub mod hyper;
pub mod catalog;
pub mod curve;
pub mod modsym;
pub mod verdict;

pub use error::{Error, Result};
pub use catalog::{Catalog, CatalogCache, CatalogOptions};
pub use curve::GenusData;
pub use verdict::{AutGroup, Report, Status, Verdict, VerdictOptions};
