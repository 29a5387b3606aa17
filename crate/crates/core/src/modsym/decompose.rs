//! Splitting a Hecke-stable subspace into pieces on which the Hecke algebra
//! acts irreducibly over the rationals.

use num_rational::BigRational;

use super::space::HeckeOperators;
use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::exact::{factor_over_rationals, IntPoly, RationalMatrix, Subspace};

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Largest prime `l` whose `T_l` may be used.
    pub max_prime: u64,
    /// Largest `k` tried in combinations `T_l1 + k T_l2`.
    pub max_multiplier: i64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { max_prime: 100, max_multiplier: 3 }
    }
}

/// One rationally irreducible Hecke piece.
#[derive(Clone, Debug)]
pub struct HeckePiece {
    pub subspace: Subspace,
    /// The operator whose characteristic polynomial is irreducible here,
    /// as `(l1, k, l2)` meaning `T_l1 + k T_l2` (`k = 0` for a single `T_l1`).
    pub separating: (u64, i64, u64),
    pub charpoly: IntPoly,
}

enum Split {
    Irreducible(IntPoly),
    Pieces(Vec<Subspace>),
    Unresolved,
}

fn split_by(sub: &Subspace, a: &RationalMatrix) -> Result<Split> {
    let f = a.charpoly()?;
    let factors = factor_over_rationals(&f)?;
    if factors.len() == 1 {
        let (g, m) = &factors[0];
        return Ok(if *m == 1 { Split::Irreducible(g.clone()) } else { Split::Unresolved });
    }
    let mut pieces = Vec::with_capacity(factors.len());
    for (g, m) in &factors {
        let expected = g.degree() as usize * m;
        let ga = a.eval_poly(&g.to_rat())?;
        let mut ker = ga.left_kernel();
        if ker.rows() != expected {
            ker = a.eval_poly(&g.to_rat().pow(*m))?.left_kernel();
        }
        if ker.rows() != expected {
            return Err(Error::Verification(format!(
                "generalized eigenspace of dimension {} where {} was expected",
                ker.rows(),
                expected
            )));
        }
        pieces.push(sub.sub_from_coordinates(&ker)?);
    }
    Ok(Split::Pieces(pieces))
}

/// Decomposes `sub` (stable under every `T_l`, `l` coprime to the level)
/// into rationally irreducible Hecke pieces, sorted by dimension and then
/// by their separating characteristic polynomial.
pub fn eigen_decompose(ops: &HeckeOperators, sub: &Subspace, opts: &DecomposeOptions) -> Result<Vec<HeckePiece>> {
    let level = ops.space().level();
    let primes: Vec<u64> = primes_up_to(opts.max_prime).into_iter().filter(|l| level % l != 0).collect();
    let mut queue = vec![sub.clone()];
    let mut out = Vec::new();
    'outer: while let Some(v) = queue.pop() {
        if v.dim() == 0 {
            continue;
        }
        let mut restricted: Vec<RationalMatrix> = Vec::new();
        for (i, &l) in primes.iter().enumerate() {
            let a = v.restrict(&ops.hecke(l), false)?;
            restricted.push(a.clone());
            match split_by(&v, &a)? {
                Split::Irreducible(g) => {
                    out.push(HeckePiece { subspace: v, separating: (l, 0, 0), charpoly: g });
                    continue 'outer;
                }
                Split::Pieces(ps) => {
                    queue.extend(ps);
                    continue 'outer;
                }
                Split::Unresolved => {}
            }
            for j in 0..i {
                for k in 1..=opts.max_multiplier {
                    let comb = restricted[j].add(&a.scale(&BigRational::from_integer(k.into())))?;
                    match split_by(&v, &comb)? {
                        Split::Irreducible(g) => {
                            out.push(HeckePiece { subspace: v, separating: (primes[j], k, l), charpoly: g });
                            continue 'outer;
                        }
                        Split::Pieces(ps) => {
                            queue.extend(ps);
                            continue 'outer;
                        }
                        Split::Unresolved => {}
                    }
                }
            }
        }
        return Err(Error::SeparationFailure { dim: v.dim(), bound: opts.max_prime });
    }
    out.sort_by(|a, b| {
        (a.subspace.dim(), &a.charpoly, a.subspace.basis().entries()).cmp(&(b.subspace.dim(), &b.charpoly, b.subspace.basis().entries()))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::modsym::{ModularSymbolSpace, Sign};

    #[test]
    fn level_eleven_is_one_piece() {
        let s = Arc::new(ModularSymbolSpace::build(11, Sign::Plus).unwrap());
        let ops = HeckeOperators::new(s.clone());
        let pieces = eigen_decompose(&ops, s.cuspidal(), &DecomposeOptions::default()).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].charpoly, IntPoly::from_i64(&[2, 1]));
    }

    #[test]
    fn level_twenty_three() {
        // genus 2, one orbit with Hecke field Q(sqrt 5)
        let s = Arc::new(ModularSymbolSpace::build(23, Sign::Plus).unwrap());
        let ops = HeckeOperators::new(s.clone());
        let pieces = eigen_decompose(&ops, s.cuspidal(), &DecomposeOptions::default()).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].charpoly, IntPoly::from_i64(&[-1, 1, 1]));
    }
}
