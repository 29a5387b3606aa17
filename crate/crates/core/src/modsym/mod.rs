//! Weight-2 modular symbols for `Gamma0(N)`: the space, its cuspidal and new
//! subspaces, Hecke and Atkin–Lehner operators, and the splitting of a
//! Hecke-stable subspace into rationally irreducible pieces.

pub mod decompose;
pub mod p1;
pub mod space;

pub use decompose::{eigen_decompose, DecomposeOptions, HeckePiece};
pub use p1::{psl2_index, ManinSymbol, P1List};
pub use space::{
    cusp_count, cusps_equivalent, heilbronn_matrices, Cusp, HeckeOperators, ModularSymbolSpace, Sign, DEFAULT_LEVEL_CAP,
};
