//! Arithmetic over prime fields `Z/pZ` with `p < 2^32`: matrices
//! (Hessenberg characteristic polynomial) and dense univariate polynomials
//! (used by the factorization routines).

use rand::Rng;

use crate::arith::{is_prime, mul_mod, pow_mod};

pub const CHARPOLY_PRIME_START: u64 = 1 << 31;

pub fn prev_prime(n: u64) -> u64 {
    let mut k = n - 1;
    while !is_prime(k) {
        k -= 1;
    }
    k
}

#[inline]
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Characteristic polynomial of an `n x n` matrix over `Z/pZ`, ascending
/// coefficients, monic of degree `n`.
pub fn charpoly_mod(entries: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut h: Vec<u64> = entries.iter().map(|x| x % p).collect();
    let at = |i: usize, j: usize| i * n + j;
    for m in 1..n.saturating_sub(1) {
        let Some(i0) = (m..n).find(|&i| h[at(i, m - 1)] != 0) else {
            continue;
        };
        if i0 != m {
            for j in 0..n {
                h.swap(at(i0, j), at(m, j));
            }
            for i in 0..n {
                h.swap(at(i, i0), at(i, m));
            }
        }
        let tinv = inv(h[at(m, m - 1)], p);
        for i in (m + 1)..n {
            let u = mul_mod(h[at(i, m - 1)], tinv, p);
            if u == 0 {
                continue;
            }
            for j in (m - 1)..n {
                let s = mul_mod(u, h[at(m, j)], p);
                h[at(i, j)] = (h[at(i, j)] + p - s) % p;
            }
            for r in 0..n {
                let s = mul_mod(u, h[at(r, i)], p);
                h[at(r, m)] = (h[at(r, m)] + s) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        // (x - h[m-1][m-1]) * p_{m-1}
        let prev = &polys[m - 1];
        let mut cur = vec![0u64; m + 1];
        let d = h[at(m - 1, m - 1)];
        for (k, &c) in prev.iter().enumerate() {
            cur[k + 1] = (cur[k + 1] + c) % p;
            cur[k] = (cur[k] + p - mul_mod(c, d, p)) % p;
        }
        let mut t = 1u64;
        for i in 1..m {
            t = mul_mod(t, h[at(m - i, m - i - 1)], p);
            let coef = mul_mod(t, h[at(m - i - 1, m - 1)], p);
            if coef == 0 {
                continue;
            }
            for (k, &c) in polys[m - i - 1].iter().enumerate() {
                cur[k] = (cur[k] + p - mul_mod(coef, c, p)) % p;
            }
        }
        polys.push(cur);
    }
    polys.pop().unwrap()
}

/// Dense polynomial over `Z/pZ`, ascending coefficients, no trailing zeros.
pub type PolyP = Vec<u64>;

pub fn trim(mut a: PolyP) -> PolyP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &PolyP) -> isize {
    a.len() as isize - 1
}

pub fn add(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub fn sub(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub fn mul(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

pub fn scale(a: &PolyP, c: u64, p: u64) -> PolyP {
    trim(a.iter().map(|&x| mul_mod(x, c, p)).collect())
}

pub fn monic(a: &PolyP, p: u64) -> PolyP {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv(l, p), p),
    }
}

pub fn divrem(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let linv = inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = mul_mod(r[k + db], linv, p);
        q[k] = c;
        if c == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mul_mod(c, bj, p)) % p;
        }
    }
    (trim(q), trim(r))
}

pub fn rem(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    divrem(a, b, p).1
}

pub fn gcd(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// Extended gcd: returns `(g, s, t)` with `s a + t b = g` monic.
pub fn xgcd(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP, PolyP) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let l = inv(*r0.last().unwrap(), p);
    (scale(&r0, l, p), scale(&s0, l, p), scale(&t0, l, p))
}

pub fn derivative(a: &PolyP, p: u64) -> PolyP {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
}

pub fn powmod(base: &PolyP, mut e: u128, m: &PolyP, p: u64) -> PolyP {
    let mut result = vec![1u64];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

pub fn is_squarefree(a: &PolyP, p: u64) -> bool {
    let d = derivative(a, p);
    if d.is_empty() {
        return deg(a) <= 0;
    }
    deg(&gcd(a, &d, p)) == 0
}

/// Factors a monic squarefree polynomial over `Z/pZ` (`p` odd) into monic
/// irreducibles, sorted by degree then coefficients.
pub fn factor_squarefree<R: Rng>(f: &PolyP, p: u64, rng: &mut R) -> Vec<PolyP> {
    let mut out = Vec::new();
    for (d, g) in distinct_degree(f, p) {
        equal_degree(&g, d, p, rng, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn distinct_degree(f: &PolyP, p: u64) -> Vec<(usize, PolyP)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut d = 0;
    while deg(&f) >= 2 * (d as isize + 1) {
        d += 1;
        h = powmod(&h, p as u128, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if deg(&g) > 0 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((d, g));
        }
    }
    if deg(&f) > 0 {
        out.push((deg(&f) as usize, monic(&f, p)));
    }
    out
}

fn equal_degree<R: Rng>(f: &PolyP, d: usize, p: u64, rng: &mut R, out: &mut Vec<PolyP>) {
    let n = deg(f) as usize;
    if n == d {
        out.push(monic(f, p));
        return;
    }
    let e = (num_traits::pow(p as u128, d) - 1) / 2;
    loop {
        let a: PolyP = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if deg(&a) < 1 {
            continue;
        }
        let b = sub(&powmod(&a, e, f, p), &vec![1u64], p);
        let g = gcd(f, &b, p);
        if deg(&g) > 0 && deg(&g) < n as isize {
            let h = divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&monic(&h, p), d, p, rng, out);
            return;
        }
    }
}
