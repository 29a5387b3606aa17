use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modp;
use super::poly::RatPoly;
use crate::error::{Error, Result};

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        )
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension(format!("row of length {} (expected {cols})", row.len())));
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!("vector of length {} times {}x{}", v.len(), self.rows, self.cols)));
        }
        let mut out = vec![BigRational::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `self + c*I`.
    pub fn add_scalar(&self, c: &BigRational) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] += c;
        }
        Ok(m)
    }

    /// Evaluates a polynomial at this matrix by Horner's rule.
    pub fn eval_poly(&self, f: &RatPoly) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let coeffs = f.coeffs();
        if coeffs.is_empty() {
            return Ok(Self::zeros(n, n));
        }
        let mut acc = Self::identity(n).scale(coeffs.last().unwrap());
        for c in coeffs.iter().rev().skip(1) {
            acc = acc.mul(self)?.add_scalar(c)?;
        }
        Ok(acc)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.data[i * cols + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = self.data[r * cols + c].recip();
            for j in c..cols {
                let v = &self.data[r * cols + j] * &inv;
                self.data[r * cols + j] = v;
            }
            let pivot_row: Vec<(usize, BigRational)> = (c..cols)
                .filter(|&j| !self.data[r * cols + j].is_zero())
                .map(|j| (j, self.data[r * cols + j].clone()))
                .collect();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c].clone();
                if f.is_zero() {
                    continue;
                }
                for (j, v) in &pivot_row {
                    let d = &f * v;
                    self.data[i * cols + j] -= d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows) of `{v : self * v = 0}`.
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, BigRational::one());
            for (i, &pc) in pivots.iter().enumerate() {
                let v = r.get(i, f);
                if !v.is_zero() {
                    out.set(k, pc, -v.clone());
                }
            }
        }
        out
    }

    /// Basis (as rows) of `{v : v * self = 0}`.
    pub fn left_kernel(&self) -> Self {
        self.transpose().kernel()
    }

    /// Removes zero rows after row reduction.
    pub fn row_space(&self) -> Self {
        let (r, pivots) = self.rref();
        let k = pivots.len();
        Self {
            rows: k,
            cols: self.cols,
            data: r.data[..k * self.cols].to_vec(),
        }
    }

    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("column mismatch in stack".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Monic characteristic polynomial `det(xI - self)`.
    ///
    /// Denominators are cleared first; the integer characteristic polynomial
    /// is then computed modulo word-size primes (Hessenberg reduction) and
    /// reconstructed by Chinese remaindering once the modulus exceeds twice
    /// the coefficient bound `(1 + max row sum)^n`.
    pub fn charpoly(&self) -> Result<RatPoly> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(RatPoly::one());
        }
        let d = self.denominator_lcm();
        let ints: Vec<BigInt> = self
            .data
            .iter()
            .map(|x| (x * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        let row_sum = (0..n)
            .map(|i| ints[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default();
        let bound = num_traits::pow(row_sum + BigInt::one(), n) * 2u32;

        let mut modulus = BigInt::one();
        let mut residues: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        let mut prime = modp::CHARPOLY_PRIME_START;
        while modulus <= bound {
            prime = modp::prev_prime(prime);
            let p = prime;
            let pb = BigInt::from(p);
            let local: Vec<u64> = ints
                .iter()
                .map(|x| x.mod_floor(&pb).to_u64().expect("reduced residue"))
                .collect();
            let cp = modp::charpoly_mod(&local, n, p);
            // Incremental CRT: x = r (mod M), x = c (mod p).
            let m_inv = BigInt::from(modp::inv((&modulus % &pb).to_u64().unwrap(), p));
            for (r, &c) in residues.iter_mut().zip(cp.iter()) {
                let diff = (BigInt::from(c) - (&*r % &pb)).mod_floor(&pb);
                let t = (diff * &m_inv).mod_floor(&pb);
                *r += &modulus * t;
            }
            modulus *= pb;
        }
        let half = &modulus >> 1;
        let mut coeffs = Vec::with_capacity(n + 1);
        for (k, r) in residues.into_iter().enumerate() {
            let v = if r > half { r - &modulus } else { r };
            // Coefficient of x^k in det(xI - A) equals c_k(dA) / d^(n-k).
            let scale = num_traits::pow(d.clone(), n - k);
            coeffs.push(BigRational::new(v, scale));
        }
        Ok(RatPoly::new(coeffs))
    }
}

/// Sparse matrix in row-major form, used for operators on large ambient
/// spaces acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<Vec<(usize, BigRational)>>,
}

impl SparseMatrix {
    pub fn new(cols: usize, rows: Vec<Vec<(usize, BigRational)>>) -> Self {
        Self { cols, rows }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, BigRational)] {
        &self.rows[i]
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in &self.rows[i] {
                out[*j] += a * b;
            }
        }
        out
    }

    pub fn to_dense(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                m.set(i, *j, v.clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = vec![BigRational::zero(); other.cols];
                for (k, a) in row {
                    for (j, b) in &other.rows[*k] {
                        acc[*j] += a * b;
                    }
                }
                dense_to_sparse(&acc)
            })
            .collect();
        SparseMatrix { cols: other.cols, rows }
    }
}

pub fn dense_to_sparse(v: &[BigRational]) -> Vec<(usize, BigRational)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (j, x.clone()))
        .collect()
}

/// A subspace of `Q^n` stored by a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: RationalMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_rows(m: &RationalMatrix) -> Self {
        let (r, pivots) = m.rref();
        let k = pivots.len();
        let basis = RationalMatrix {
            rows: k,
            cols: m.cols,
            data: r.data[..k * m.cols].to_vec(),
        };
        Self { basis, pivots }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: RationalMatrix::identity(n), pivots: (0..n).collect() }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in
    /// the subspace.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let coords: Vec<BigRational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = self.combine(&coords);
        (back.as_slice() == v).then_some(coords)
    }

    /// Coordinates read off at the pivots, without the membership check.
    pub fn coordinates_unchecked(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// `sum coords[i] * basis[i]`.
    pub fn combine(&self, coords: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.basis.cols];
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(i)) {
                if !b.is_zero() {
                    *o += c * b;
                }
            }
        }
        out
    }

    /// Subspace spanned by `coords * basis` for each row of `coords`
    /// (rows expressed in this subspace's coordinates).
    pub fn sub_from_coordinates(&self, coords: &RationalMatrix) -> Result<Self> {
        Ok(Self::from_rows(&coords.mul(&self.basis)?))
    }

    /// Matrix of the operator `v -> v*op` restricted to this subspace, in
    /// echelon coordinates. With `check`, verifies the subspace is stable.
    pub fn restrict(&self, op: &SparseMatrix, check: bool) -> Result<RationalMatrix> {
        let d = self.dim();
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let w = op.vec_mul(self.basis.row(i));
            let c = if check {
                self.coordinates(&w)
                    .ok_or_else(|| Error::Verification("subspace is not stable under operator".into()))?
            } else {
                self.coordinates_unchecked(&w)
            };
            rows.push(c);
        }
        RationalMatrix::from_rows(rows, d)
    }

    pub fn restrict_dense(&self, op: &RationalMatrix, check: bool) -> Result<RationalMatrix> {
        let d = self.dim();
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let w = op.vec_mul(self.basis.row(i))?;
            let c = if check {
                self.coordinates(&w)
                    .ok_or_else(|| Error::Verification("subspace is not stable under operator".into()))?
            } else {
                self.coordinates_unchecked(&w)
            };
            rows.push(c);
        }
        RationalMatrix::from_rows(rows, d)
    }

    pub fn intersect_kernel(&self, map: &RationalMatrix) -> Result<Self> {
        // vectors c with (c*basis)*map = 0
        let image = self.basis.mul(map)?;
        let k = image.left_kernel();
        self.sub_from_coordinates(&k)
    }
}
