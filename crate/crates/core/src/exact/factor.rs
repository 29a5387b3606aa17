//! Factorization of univariate polynomials over the rationals.
//!
//! Squarefree decomposition (Yun), factorization modulo a small prime
//! (Cantor–Zassenhaus), quadratic Hensel lifting of the modular factors and
//! Zassenhaus subset recombination with trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{self, PolyP};
use super::poly::{IntPoly, RatPoly};
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Number of candidate primes tried when choosing the modular image.
const PRIME_CANDIDATES: usize = 8;

/// Factors `f` into irreducible primitive integer polynomials with positive
/// leading coefficient, paired with multiplicities. The product equals `f` up
/// to a rational unit. Output is sorted by degree, then coefficients.
pub fn factor_over_rationals(f: &RatPoly) -> Result<Vec<(IntPoly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (g, mult) in squarefree_decomposition(f) {
        for h in factor_squarefree(&g.primitive_int()) {
            out.push((h, mult));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    Ok(out)
}

pub fn factor_int(f: &IntPoly) -> Result<Vec<(IntPoly, usize)>> {
    factor_over_rationals(&f.to_rat())
}

/// Yun's algorithm: `f = c * prod a_i^i` with the `a_i` squarefree and
/// pairwise coprime. Returns the nonconstant `a_i` (monic) with `i`.
pub fn squarefree_decomposition(f: &RatPoly) -> Vec<(RatPoly, usize)> {
    let mut out = Vec::new();
    if f.degree() <= 0 {
        return out;
    }
    let f = f.monic();
    let d = f.derivative();
    let mut c = f.gcd(&d);
    let mut w = f.divrem(&c).unwrap().0;
    let mut i = 1;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let z = w.divrem(&y).unwrap().0;
        if z.degree() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        c = c.divrem(&y).unwrap().0;
        w = y;
    }
    out
}

fn reduce_mod_p(f: &IntPoly, p: u64) -> PolyP {
    let pb = BigInt::from(p);
    modp::trim(
        f.coeffs()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

/// Factors a squarefree primitive integer polynomial.
fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.degree();
    if n <= 1 {
        return if n == 1 { vec![f.primitive_part()] } else { Vec::new() };
    }
    let lc = f.leading();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // Pick the prime with the fewest modular factors among a few candidates.
    let mut best: Option<(u64, Vec<PolyP>)> = None;
    let mut p = 2;
    let mut tried = 0;
    while tried < PRIME_CANDIDATES {
        p += 1;
        if !is_prime(p) || (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = reduce_mod_p(f, p);
        if modp::deg(&fp) != n || !modp::is_squarefree(&fp, p) {
            continue;
        }
        tried += 1;
        let facs = modp::factor_squarefree(&modp::monic(&fp, p), p, &mut rng);
        if facs.len() == 1 {
            return vec![f.primitive_part()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
    }
    let (p, modular) = best.expect("some prime is good for a squarefree polynomial");

    // Landau–Mignotte: coefficients of any factor are bounded by 2^n ||f||_2.
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = (norm2 << (n as usize)) * lc.abs() * 2;
    let pb = BigInt::from(p);
    let mut exp = 1u32;
    let mut modulus = pb.clone();
    while modulus <= bound {
        exp *= 2;
        modulus = num_traits::pow(pb.clone(), exp as usize);
    }
    let lifted = hensel_lift_all(f, &modular, p, exp);
    recombine(f, lifted, &modulus)
}

type ZPoly = Vec<BigInt>;

fn z_trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn z_mod(a: &ZPoly, m: &BigInt) -> ZPoly {
    z_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn z_add(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn z_sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn z_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

/// Division by a monic polynomial modulo `m`.
fn z_divrem_monic(a: &ZPoly, b: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let mut r = z_mod(a, m);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = (&r[k + j] - &c * bj).mod_floor(m);
            }
        }
        q[k] = c;
    }
    (z_trim(q), z_mod(&r, m))
}

fn lift_p(a: &PolyP) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m`
/// (with `h` monic) to the same identities modulo `m^2`.
fn hensel_step(f: &ZPoly, g: &ZPoly, h: &ZPoly, s: &ZPoly, t: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = z_mod(&z_sub(f, &z_mul(g, h)), &m2);
    let (q, r) = z_divrem_monic(&z_mul(s, &e), h, &m2);
    let g2 = z_mod(&z_add(&z_add(g, &z_mul(t, &e)), &z_mul(&q, g)), &m2);
    let h2 = z_mod(&z_add(h, &r), &m2);
    let b = z_mod(&z_sub(&z_add(&z_mul(s, &g2), &z_mul(t, &h2)), &vec![BigInt::one()]), &m2);
    let (c, d) = z_divrem_monic(&z_mul(s, &b), &h2, &m2);
    let s2 = z_mod(&z_sub(s, &d), &m2);
    let t2 = z_mod(&z_sub(&z_sub(t, &z_mul(t, &b)), &z_mul(&c, &g2)), &m2);
    (g2, h2, s2, t2)
}

/// Lifts the monic modular factors of `f` to monic factors modulo
/// `p^(exp)`, `exp` a power of two.
fn hensel_lift_all(f: &IntPoly, factors: &[PolyP], p: u64, exp: u32) -> Vec<ZPoly> {
    let pb = BigInt::from(p);
    let target = num_traits::pow(pb.clone(), exp as usize);
    let mut current: ZPoly = z_mod(&f.coeffs().to_vec(), &target);
    let lc = f.leading();
    let mut out = Vec::new();
    let mut rest_mod_p: PolyP = factors.iter().fold(vec![1u64], |acc, u| modp::mul(&acc, u, p));
    let lc_p = lc.mod_floor(&pb).to_u64().unwrap();
    for (i, u) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            // Remaining monic factor: current / lc modulo target.
            let lc_inv = lc.modinv(&target).expect("lc invertible modulo p^k");
            out.push(z_mod(&current.iter().map(|c| c * &lc_inv).collect(), &target));
            break;
        }
        rest_mod_p = modp::divrem(&rest_mod_p, u, p).0;
        // current = g * h with h = u (monic), g = lc * rest.
        let g0 = modp::scale(&rest_mod_p, lc_p, p);
        let (one, s, t) = modp::xgcd(&g0, u, p);
        debug_assert_eq!(one, vec![1]);
        let (mut g, mut h, mut s, mut t) = (lift_p(&g0), lift_p(u), lift_p(&s), lift_p(&t));
        let mut m = pb.clone();
        while m < target {
            let f_m2 = z_mod(&current, &(&m * &m));
            (g, h, s, t) = hensel_step(&f_m2, &g, &h, &s, &t, &m);
            m = &m * &m;
        }
        out.push(h);
        current = g;
    }
    out
}

fn symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half: BigInt = m >> 1;
    z_trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn recombine(f: &IntPoly, mut lifted: Vec<ZPoly>, modulus: &BigInt) -> Vec<IntPoly> {
    let mut found = Vec::new();
    let mut f = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let lc = f.leading();
        let mut hit: Option<(Vec<usize>, IntPoly)> = None;
        let mut subset: Vec<usize> = (0..size).collect();
        'search: loop {
            // Constant-term screen before forming the full product.
            let c0 = subset
                .iter()
                .fold(lc.clone(), |acc, &i| (acc * lifted[i].first().cloned().unwrap_or_default()).mod_floor(modulus));
            let c0s = symmetric(&vec![c0], modulus).first().cloned().unwrap_or_default();
            let f0 = f.coeff(0) * &lc;
            let passes = if c0s.is_zero() { f0.is_zero() } else { (&f0 % &c0s).is_zero() };
            if passes {
                let prod = subset
                    .iter()
                    .fold(vec![lc.clone()], |acc, &i| z_mod(&z_mul(&acc, &lifted[i]), modulus));
                let cand = IntPoly::new(symmetric(&prod, modulus)).primitive_part();
                if let Some(q) = f.div_exact(&cand) {
                    hit = Some((subset.clone(), cand));
                    f = q;
                    break 'search;
                }
            }
            if !next_subset(&mut subset, lifted.len()) {
                break;
            }
        }
        match hit {
            Some((sub, cand)) => {
                found.push(cand);
                for &i in sub.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if f.degree() > 0 {
        found.push(f.primitive_part());
    }
    found
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
