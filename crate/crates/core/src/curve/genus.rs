use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, legendre};
use crate::error::{Error, Result};
use crate::modsym::{cusp_count, psl2_index};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusData {
    pub p: u64,
    /// Genus of `X0+(p^2)`.
    pub g_plus: u64,
    /// Genus of `X0(p)`.
    pub g_zero: u64,
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 11 {
        return Err(Error::InvalidArgument(format!("p = {p}: the genus of X0+(p^2) is zero below 11")));
    }
    Ok(())
}

/// Closed forms by the residue class of `p` modulo 12.
pub fn genus_table(p: u64) -> Result<GenusData> {
    check_prime(p)?;
    let (g_plus, g_zero) = match p % 12 {
        1 => ((p - 1) * (p - 7) / 24, (p - 13) / 12),
        5 => ((p - 3) * (p - 5) / 24, (p - 5) / 12),
        7 => ((p - 1) * (p - 7) / 24, (p - 7) / 12),
        11 => ((p - 3) * (p - 5) / 24, (p + 1) / 12),
        _ => unreachable!("primes above 3 are coprime to 12"),
    };
    Ok(GenusData { p, g_plus, g_zero })
}

/// Genus of `X0(N)` from the index, elliptic points and cusps.
pub fn genus_x0(n: u64) -> u64 {
    let fac = factorize(n);
    let mu = psl2_index(n) as i64;
    let nu2: i64 = if n % 4 == 0 {
        0
    } else {
        fac.iter().map(|&(q, _)| if q == 2 { 1 } else { 1 + legendre(-1, q) as i64 }).product()
    };
    let nu3: i64 = if n % 9 == 0 {
        0
    } else {
        fac.iter()
            .map(|&(q, _)| match q {
                2 => 0,
                3 => 1,
                _ => 1 + legendre(-3, q) as i64,
            })
            .product()
    };
    let c = cusp_count(n) as i64;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    debug_assert!(twelve_g % 12 == 0 && twelve_g >= 0);
    (twelve_g / 12) as u64
}

/// `g+ > 30` for `p > 31`: beyond the bound allowed by gonality at most 6.
pub fn genus_bound_excludes(p: u64) -> Result<(bool, u64)> {
    let g = genus_table(p)?;
    Ok((g.g_plus > 30, g.g_plus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x0_small_levels() {
        let known = [(1, 0), (11, 1), (23, 2), (37, 2), (121, 6), (169, 8), (289, 17), (27, 1), (36, 1), (64, 3)];
        for (n, g) in known {
            assert_eq!(genus_x0(n), g, "N = {n}");
        }
    }

    #[test]
    fn table_rows() {
        let rows = [(11, 2, 1), (13, 3, 0), (17, 7, 1), (19, 9, 1), (23, 15, 2), (29, 26, 2), (31, 30, 2)];
        for (p, gp, g0) in rows {
            assert_eq!(genus_table(p).unwrap(), GenusData { p, g_plus: gp, g_zero: g0 });
            assert_eq!(genus_x0(p), g0);
        }
        assert!(matches!(genus_table(4), Err(Error::NotPrime(4))));
        assert!(genus_table(7).is_err());
    }

    #[test]
    fn bound_branch() {
        assert_eq!(genus_bound_excludes(37).unwrap(), (true, 45));
        assert_eq!(genus_bound_excludes(41).unwrap(), (true, 57));
        assert_eq!(genus_bound_excludes(31).unwrap(), (false, 30));
    }
}
