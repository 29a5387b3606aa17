//! The projective line over `Z/NZ`, with an `O(1)` lookup table from
//! arbitrary pairs to canonical representatives.

use crate::arith::gcd;

/// A Manin symbol `(c : d)`, stored by its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ManinSymbol {
    pub c: u64,
    pub d: u64,
}

/// Element list of `P^1(Z/NZ)`. Two pairs are identified when they differ
/// by a unit of `Z/NZ`; the canonical representative of a class is its
/// lexicographically smallest member.
#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    symbols: Vec<ManinSymbol>,
    lookup: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let units: Vec<u64> = (1..=n).filter(|&u| gcd(u as i64, n as i64) == 1).map(|u| u % n).collect();
        let nn = n as usize;
        let mut lookup = vec![NONE; nn * nn];
        let mut symbols = Vec::new();
        for c in 0..n {
            for d in 0..n {
                let idx = (c as usize) * nn + d as usize;
                if lookup[idx] != NONE || gcd(gcd(c as i64, d as i64), n as i64) != 1 {
                    continue;
                }
                let k = symbols.len() as u32;
                symbols.push(ManinSymbol { c, d });
                for &u in &units {
                    let (uc, ud) = ((u * c) % n, (u * d) % n);
                    lookup[(uc as usize) * nn + ud as usize] = k;
                }
            }
        }
        Self { n, symbols, lookup }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> ManinSymbol {
        self.symbols[i]
    }

    pub fn symbols(&self) -> &[ManinSymbol] {
        &self.symbols
    }

    /// Index of the class of `(c : d)`, or `None` if `gcd(c, d, N) > 1`.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let (c, d) = (c.rem_euclid(n) as usize, d.rem_euclid(n) as usize);
        let k = self.lookup[c * self.n as usize + d];
        (k != NONE).then_some(k as usize)
    }
}

/// Index of `Gamma0(N)` in `SL2(Z)`: `N * prod_{q | N} (1 + 1/q)`.
pub fn psl2_index(n: u64) -> u64 {
    let mut r = n;
    for (q, _) in crate::arith::factorize(n) {
        r = r / q * (q + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_is_index() {
        for n in 1..=60u64 {
            assert_eq!(P1List::new(n).len() as u64, psl2_index(n), "N = {n}");
        }
        assert_eq!(P1List::new(121).len(), 132);
    }

    #[test]
    fn lookup_is_unit_invariant() {
        let p1 = P1List::new(45);
        for (i, s) in p1.symbols().iter().enumerate() {
            for u in [2i64, 7, 11, 44] {
                assert_eq!(p1.index(u * s.c as i64, u * s.d as i64), Some(i));
            }
        }
        assert_eq!(p1.index(3, 6), None);
    }
}
