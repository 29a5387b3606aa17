use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, p_star};
use crate::error::{Error, Result};

/// The quadratic Dirichlet character of conductor `p`, `n -> (n | p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCharacter {
    p: u64,
}

impl QuadraticCharacter {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn conductor(&self) -> u64 {
        self.p
    }

    pub fn value(&self, n: i64) -> i32 {
        legendre(n, self.p)
    }

    /// `p*`: the attached field is `K = Q(sqrt(p*))`.
    pub fn field_generator(&self) -> i64 {
        p_star(self.p)
    }

    pub fn is_odd(&self) -> bool {
        self.value(-1) == -1
    }
}

/// Residue degree `s` of 2 in `K = Q(sqrt(p*))`: 1 if 2 splits, 2 if inert.
pub fn residue_degree(p: u64) -> Result<u32> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("residue degree needs an odd prime, got {p}")));
    }
    Ok(if p_star(p).rem_euclid(8) == 1 { 1 } else { 2 })
}

/// Number of reduced binary quadratic forms `(a, b, c)` of discriminant `d < 0`.
pub fn class_number(d: i64) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1);
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (a == c) {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    h
}

/// Dimension of the CM factor for `p ≡ 3 mod 4`, from the count `V` of
/// quadratic residues in `[1, (p-1)/2]`: `(2V - (p-1)/2) / (2 - (-p | 2))`.
/// The divisor is 3 for `p ≡ 3 mod 8` and 1 for `p ≡ 7 mod 8`.
pub fn cm_dimension(p: u64) -> Result<u64> {
    if !is_prime(p) || p % 4 != 3 {
        return Err(Error::InvalidArgument(format!("CM dimension needs a prime p ≡ 3 mod 4, got {p}")));
    }
    let half = (p - 1) / 2;
    let v = (1..=half).filter(|&a| legendre(a as i64, p) == 1).count() as i64;
    let num = 2 * v - half as i64;
    let den = if p % 8 == 3 { 3 } else { 1 };
    if p == 3 {
        return Ok(1);
    }
    debug_assert!(num > 0 && num % den == 0);
    Ok((num / den) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        for (d, h) in [(-3, 1), (-4, 1), (-11, 1), (-19, 1), (-23, 3), (-31, 3), (-47, 5), (-71, 7), (-20, 2), (-163, 1)] {
            assert_eq!(class_number(d), h, "d = {d}");
        }
    }

    #[test]
    fn cm_dimension_matches_class_number() {
        for p in [7u64, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83] {
            let g = cm_dimension(p).unwrap();
            assert_eq!(g, class_number(-(p as i64)), "p = {p}");
            assert!(6 * g < p, "p = {p}");
        }
        assert!(cm_dimension(13).is_err());
    }

    #[test]
    fn residue_degrees() {
        assert_eq!(residue_degree(31).unwrap(), 1);
        assert_eq!(residue_degree(29).unwrap(), 2);
        assert_eq!(residue_degree(23).unwrap(), 1);
        assert_eq!(residue_degree(17).unwrap(), 1);
        assert_eq!(residue_degree(19).unwrap(), 2);
        assert_eq!(residue_degree(11).unwrap(), 2);
    }

    #[test]
    fn character_values() {
        let chi = QuadraticCharacter::new(11).unwrap();
        assert_eq!(chi.value(2), -1);
        assert_eq!(chi.value(3), 1);
        assert_eq!(chi.value(22), 0);
        assert!(chi.is_odd());
        assert_eq!(chi.field_generator(), -11);
        for a in 1..30 {
            for b in 1..30 {
                assert_eq!(chi.value(a * b), chi.value(a) * chi.value(b));
            }
        }
    }
}
