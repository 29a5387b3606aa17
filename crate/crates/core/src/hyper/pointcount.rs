//! Brute-force point counts on hyperelliptic models: odd prime fields
//! directly, and `F_{2^n}` through a model with good reduction at 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::legendre;
use crate::error::{Error, Result};
use crate::exact::{IntPoly, RatPoly};

/// `#{(x, y)}` on the smooth projective model of `y^2 = P(x)` over `F_l`,
/// `l` odd and `P` squarefree mod `l` of even degree.
pub fn count_points_mod_ell(p_poly: &IntPoly, ell: u64) -> Result<u64> {
    if ell == 2 {
        return Err(Error::InvalidArgument("use the model at 2 for characteristic 2".into()));
    }
    let m = BigInt::from(ell);
    let red: Vec<i64> = p_poly.coeffs().iter().map(|c| c.mod_floor(&m).to_i64().unwrap()).collect();
    let deg = red.iter().rposition(|&c| c != 0).unwrap_or(0);
    if deg % 2 != 0 || deg + 1 != red.len() {
        return Err(Error::InvalidArgument(format!("P mod {ell} does not have the full even degree")));
    }
    let l = ell as i64;
    let mut n = 0u64;
    for x in 0..l {
        let v = red.iter().rev().fold(0i64, |acc, &c| (acc * x + c) % l);
        n += (1 + legendre(v, ell)) as u64;
    }
    n += (1 + legendre(red[deg], ell)) as u64;
    Ok(n)
}

/// The field `F_{2^n}`, elements as bit vectors modulo an irreducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2n {
    pub n: u32,
    pub modulus: u32,
}

fn gf2_poly_mod(mut a: u32, m: u32) -> u32 {
    let dm = 31 - m.leading_zeros();
    while a != 0 && 31 - a.leading_zeros() >= dm {
        a ^= m << (31 - a.leading_zeros() - dm);
    }
    a
}

impl Gf2n {
    /// The first irreducible polynomial of degree `n` in binary order.
    pub fn new(n: u32) -> Self {
        assert!((1..=16).contains(&n));
        let modulus = (1u32 << n..1u32 << (n + 1))
            .find(|&f| (2u32..1 << (n / 2 + 1)).all(|g| gf2_poly_mod(f, g) != 0))
            .expect("irreducible polynomials exist in every degree");
        Self { n, modulus }
    }

    pub fn order(&self) -> u32 {
        1 << self.n
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let mut r = 0u32;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.n & 1 == 1 {
                a ^= self.modulus;
            }
        }
        r
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0);
        self.pow(a, (self.order() - 2) as u64)
    }

    /// Absolute trace to `F_2`.
    pub fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut x = a;
        for _ in 0..self.n {
            t ^= x;
            x = self.mul(x, x);
        }
        debug_assert!(t <= 1);
        t
    }

    /// Evaluates a polynomial with coefficients in `F_2`.
    pub fn eval_f2(&self, coeffs: &[u8], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c as u32)
    }

    /// Size of the Frobenius orbit of `a`, the degree of its minimal
    /// polynomial over `F_2`.
    pub fn degree_of(&self, a: u32) -> u32 {
        let mut x = self.mul(a, a);
        let mut d = 1;
        while x != a {
            x = self.mul(x, x);
            d += 1;
        }
        d
    }
}

/// A model `Y^2 + h(X) Y = G(X)` over `Z_(2)` of `y^2 = P(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelAt2 {
    /// `x = a (X + 1)/(X - 1)`.
    pub a: i64,
    pub h: IntPoly,
    pub g: IntPoly,
}

/// Substitutes `x = a (X+1)/(X-1)` into a sextic `P`, divides
/// `(X-1)^6 P(x)` by the largest power of 16 dividing it (rescaling `y` by
/// powers of 4) to get `F`, and completes the
/// square against `h`: `F = h^2 + 4 G`. Fails if `F` is not congruent to
/// `h^2` modulo 4.
pub fn model_at_2(p_poly: &IntPoly, a: i64, h: &IntPoly) -> Result<ModelAt2> {
    if p_poly.degree() != 6 {
        return Err(Error::InvalidArgument("the model at 2 is implemented for sextics".into()));
    }
    let xp1 = RatPoly::from_i64(&[1, 1]);
    let xm1 = RatPoly::from_i64(&[-1, 1]);
    let mut f = RatPoly::zero();
    for k in 0..=6usize {
        let c = BigRational::from_integer(p_poly.coeff(k) * BigInt::from(a).pow(k as u32));
        f = f.add(&xp1.pow(k).mul(&xm1.pow(6 - k)).scale(&c));
    }
    let mut f = f.to_int().expect("integral substitution");
    let sixteen = BigInt::from(16);
    while f.coeffs().iter().all(|c| (c % &sixteen).is_zero()) && !f.is_zero() {
        f = IntPoly::new(f.coeffs().iter().map(|c| c / &sixteen).collect());
    }
    let diff = f.sub(&h.mul(h));
    let four = BigInt::from(4);
    if diff.coeffs().iter().any(|c| !(c % &four).is_zero()) {
        return Err(Error::Verification("F is not congruent to h^2 modulo 4".into()));
    }
    let g = IntPoly::new(diff.coeffs().iter().map(|c| c / &four).collect());
    Ok(ModelAt2 { a, h: h.clone(), g })
}

fn mod2(f: &IntPoly) -> Vec<u8> {
    f.coeffs().iter().map(|c| if c.is_odd() { 1 } else { 0 }).collect()
}

/// Points of `Y^2 + hY = G` over `F_{2^n}`, with `deg h = 3`, `deg G <= 6`.
/// Errors if a singular point is found.
pub fn count_points_model_at_2(model: &ModelAt2, n: u32) -> Result<u64> {
    let k = Gf2n::new(n);
    let h = mod2(&model.h);
    let g = mod2(&model.g);
    if h.len() != 4 || h[3] != 1 {
        return Err(Error::InvalidArgument("h must have odd degree-3 coefficient".into()));
    }
    let dh: Vec<u8> = (1..h.len()).map(|i| if i % 2 == 1 { h[i] } else { 0 }).collect();
    let dg: Vec<u8> = (1..g.len()).map(|i| if i % 2 == 1 { g[i] } else { 0 }).collect();
    let mut count = 0u64;
    for x in 0..k.order() {
        let hx = k.eval_f2(&h, x);
        let gx = k.eval_f2(&g, x);
        if hx == 0 {
            // unique square root y = gx^(2^(n-1))
            let y = k.pow(gx, 1u64 << (n - 1));
            let grad = k.mul(k.eval_f2(&dh, x), y) ^ k.eval_f2(&dg, x);
            if grad == 0 {
                return Err(Error::Verification(format!("singular point at X = {x} over F_2^{n}")));
            }
            count += 1;
        } else {
            let hi = k.inv(hx);
            let c = k.mul(gx, k.mul(hi, hi));
            if k.trace(c) == 0 {
                count += 2;
            }
        }
    }
    // at infinity: W^2 + W = G_6
    let g6 = g.get(6).copied().unwrap_or(0) as u32;
    if k.trace(g6) == 0 {
        count += 2;
    }
    Ok(count)
}

/// `#P^1(F_{2^m})` points of exact degree `m`, by enumeration.
pub fn projective_line_exact_degree(m: u32) -> u64 {
    let k = Gf2n::new(m);
    let affine = (0..k.order()).filter(|&a| k.degree_of(a) == m).count() as u64;
    affine + u64::from(m == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for n in 1..=6 {
            let k = Gf2n::new(n);
            for a in 1..k.order() {
                assert_eq!(k.mul(a, k.inv(a)), 1);
                assert_eq!(k.pow(a, (k.order() - 1) as u64), 1);
            }
            let ones = (0..k.order()).filter(|&a| k.trace(a) == 1).count();
            assert_eq!(ones as u32, k.order() / 2);
        }
    }

    #[test]
    fn exact_degrees_of_projective_line() {
        let want = [3, 2, 6, 12, 30, 54];
        for m in 1..=6u32 {
            assert_eq!(projective_line_exact_degree(m), want[m as usize - 1]);
        }
    }

    #[test]
    fn sextic_over_f3() {
        // y^2 = x^6 + 1: two points over x = 0, none over x = ±1, two at infinity
        let f = IntPoly::from_i64(&[1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(count_points_mod_ell(&f, 3).unwrap(), 4);
    }
}
