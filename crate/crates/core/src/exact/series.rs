use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Truncated Laurent series in `q` with exact rational coefficients.
///
/// Coefficients are stored densely from the valuation `val` up to the
/// absolute precision `prec` (exclusive): the series is
/// `sum_{val <= e < prec} c_e q^e + O(q^prec)`. The first stored
/// coefficient is nonzero unless the series is zero to its precision, in
/// which case `val == prec` and nothing is stored.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    val: i64,
    coeffs: Vec<BigRational>,
    prec: i64,
}

impl QSeries {
    /// Series with coefficients `coeffs[k]` at `q^(start + k)`, precision
    /// `start + coeffs.len()`.
    pub fn new(start: i64, coeffs: Vec<BigRational>) -> Self {
        let prec = start + coeffs.len() as i64;
        Self::with_prec(start, coeffs, prec)
    }

    pub fn with_prec(start: i64, mut coeffs: Vec<BigRational>, prec: i64) -> Self {
        coeffs.truncate((prec - start).max(0) as usize);
        while coeffs.len() < (prec - start).max(0) as usize {
            coeffs.push(BigRational::zero());
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Self { val: prec, coeffs: Vec::new(), prec },
            Some(k) => Self { val: start + k as i64, coeffs: coeffs.split_off(k), prec },
        }
    }

    pub fn from_i64(start: i64, coeffs: &[i64]) -> Self {
        Self::new(start, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// `O(q^prec)`.
    pub fn zero(prec: i64) -> Self {
        Self { val: prec, coeffs: Vec::new(), prec }
    }

    pub fn one(prec: i64) -> Self {
        Self::with_prec(0, vec![BigRational::one()], prec)
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Valuation, or `None` if the series is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^e`; `None` if `e` is at or beyond the precision.
    pub fn coeff(&self, e: i64) -> Option<BigRational> {
        if e >= self.prec {
            return None;
        }
        if e < self.val {
            return Some(BigRational::zero());
        }
        Some(self.coeffs[(e - self.val) as usize].clone())
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        Self::with_prec(self.val, self.coeffs.clone(), prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let start = self.val.min(o.val).min(prec);
        let coeffs = (start..prec)
            .map(|e| self.coeff(e).unwrap() + o.coeff(e).unwrap())
            .collect();
        Self::with_prec(start, coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        Self { val: self.val, coeffs: self.coeffs.iter().map(|c| -c).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        Self { val: self.val, coeffs: self.coeffs.iter().map(|x| x * c).collect(), prec: self.prec }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            let p = match (self.valuation(), o.valuation()) {
                (None, None) => self.prec + o.prec,
                (None, Some(v)) => self.prec + v,
                (Some(v), None) => v + o.prec,
                _ => unreachable!(),
            };
            return Self::zero(p);
        }
        let rel = (self.prec - self.val).min(o.prec - o.val) as usize;
        let mut out = vec![BigRational::zero(); rel];
        for (i, a) in self.coeffs.iter().enumerate().take(rel) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(rel - i) {
                out[i + j] += a * b;
            }
        }
        let v = self.val + o.val;
        Self::with_prec(v, out, v + rel as i64)
    }

    /// Multiplicative inverse; the series must be nonzero to its precision.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::SeriesDivisionByZero(self.prec));
        }
        let rel = (self.prec - self.val) as usize;
        let a0inv = self.coeffs[0].recip();
        let mut inv = vec![BigRational::zero(); rel];
        inv[0] = a0inv.clone();
        for n in 1..rel {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &inv[n - k];
                }
            }
            inv[n] = -acc * &a0inv;
        }
        let v = -self.val;
        Ok(Self::with_prec(v, inv, v + rel as i64))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// The operator `q d/dq`.
    pub fn derive(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * BigRational::from_integer((self.val + k as i64).into()))
            .collect();
        Self::with_prec(self.val, coeffs, self.prec)
    }

    /// `f(q^m)` for `m >= 1`.
    pub fn substitute_power(&self, m: i64) -> Self {
        assert!(m >= 1);
        if self.is_zero() {
            return Self::zero(self.prec * m);
        }
        let start = self.val * m;
        let prec = self.prec * m;
        let mut coeffs = vec![BigRational::zero(); (prec - start) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * m as usize] = c.clone();
        }
        Self::with_prec(start, coeffs, prec)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.prec.max(0) - self.val.min(0) * e as i64 + self.val.max(0) * e as i64);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficients from `start` (inclusive) up to the precision.
    pub fn coeffs_from(&self, start: i64) -> Vec<BigRational> {
        (start..self.prec).map(|e| self.coeff(e).unwrap()).collect()
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.val + k as i64;
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match e {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            if e == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        if out.is_empty() {
            write!(f, "O(q^{})", self.prec)
        } else {
            write!(f, "{out} + O(q^{})", self.prec)
        }
    }
}
