//! Weight-2 modular symbols for `Gamma0(N)` in the Manin-symbol
//! presentation.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::p1::{ManinSymbol, P1List};
use crate::arith::{factorize, gcd, inv_mod, xgcd};
use crate::error::{Error, Result};
use crate::exact::{RationalMatrix, SparseMatrix, Subspace};

/// Largest level built unless the caller raises the cap.
pub const DEFAULT_LEVEL_CAP: u64 = 2048;

/// Which quotient of the symbol space to work in. `Plus` is the quotient by
/// `(1 - *)` for the star involution `{a, b} -> {-a, -b}`; it halves the
/// cuspidal dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Zero,
    Plus,
}

/// A cusp `num/den` in lowest terms with `den >= 0`; infinity is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub num: i64,
    pub den: i64,
}

impl Cusp {
    pub fn new(num: i64, den: i64) -> Self {
        if den == 0 {
            return Self::INFINITY;
        }
        let g = gcd(num, den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Self { num: n, den: d }
    }

    pub const INFINITY: Cusp = Cusp { num: 1, den: 0 };

    fn neg(self) -> Self {
        if self.den == 0 {
            self
        } else {
            Self { num: -self.num, den: self.den }
        }
    }
}

/// `Gamma0(N)`-equivalence of cusps.
pub fn cusps_equivalent(a: Cusp, b: Cusp, n: u64) -> bool {
    let n = n as i64;
    let (g1, g2) = (gcd(a.den, n), gcd(b.den, n));
    if g1 != g2 {
        return false;
    }
    let s = |c: Cusp| -> i64 {
        match c.den {
            0 => 1,
            1 => 0,
            q => inv_mod(c.num, q).expect("cusp in lowest terms"),
        }
    };
    let m = gcd(((a.den as i128 * b.den as i128) % n as i128) as i64, n) as i128;
    if m == 1 {
        return true;
    }
    let lhs = (s(a) as i128 * b.den as i128).rem_euclid(m);
    let rhs = (s(b) as i128 * a.den as i128).rem_euclid(m);
    lhs == rhs
}

/// Number of cusps of `X0(N)`: `sum_{d | N} phi(gcd(d, N/d))`.
pub fn cusp_count(n: u64) -> u64 {
    crate::arith::divisors(n)
        .into_iter()
        .map(|d| crate::arith::euler_phi(crate::arith::gcd(d as i64, (n / d) as i64) as u64))
        .sum()
}

/// Common denominator and sparse integer rows.
type IntCoords = (i64, Vec<Vec<(usize, i64)>>);

fn integer_coordinates(coords: &[Vec<(usize, BigRational)>]) -> Option<IntCoords> {
    let mut den = BigInt::one();
    for row in coords {
        for (_, v) in row {
            den = den.lcm(v.denom());
        }
    }
    let den_i = den.to_i64()?;
    let mut out = Vec::with_capacity(coords.len());
    for row in coords {
        let mut r = Vec::with_capacity(row.len());
        for (j, v) in row {
            let num = (v * BigRational::from_integer(den.clone())).to_integer().to_i64()?;
            if num.unsigned_abs() > 1 << 40 {
                return None;
            }
            r.push((*j, num));
        }
        out.push(r);
    }
    Some((den_i, out))
}

/// Lift `(c : d)` to a matrix `[[a, b], [c, d]]` of `SL2(Z)`.
fn lift_to_sl2(c: u64, d: u64, n: u64) -> (i64, i64, i64, i64) {
    let n = n as i64;
    let c = if c == 0 { n } else { c as i64 };
    let mut d = d as i64;
    while gcd(c, d) != 1 {
        d += n;
    }
    // a*d - b*c = 1
    let (_, s, t) = xgcd(d, c);
    (s, -t, c, d)
}

/// Convergents of `num/den` (`den > 0`), including `p_{-2}/q_{-2} = 0/1`
/// and `p_{-1}/q_{-1} = 1/0`.
fn convergents(num: i64, den: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0i64, 1i64), (1, 0)];
    let (mut a, mut b) = (num, den);
    while b != 0 {
        let q = a.div_euclid(b);
        let r = a.rem_euclid(b);
        let k = out.len();
        let (p1, q1) = out[k - 1];
        let (p2, q2) = out[k - 2];
        out.push((q * p1 + p2, q * q1 + q2));
        a = b;
        b = r;
    }
    out
}

#[derive(Clone, Debug)]
pub struct ModularSymbolSpace {
    level: u64,
    sign: Sign,
    p1: Arc<P1List>,
    coords: Vec<Vec<(usize, BigRational)>>,
    /// `coords` scaled by the common denominator `denom`, when the
    /// numerators fit in machine integers.
    int_coords: Option<IntCoords>,
    generators: Vec<usize>,
    cusps: Vec<Cusp>,
    boundary: RationalMatrix,
    cuspidal: Subspace,
}

struct SignedUnionFind {
    parent: Vec<usize>,
    sign: Vec<i8>,
    zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), sign: vec![1; n], zero: vec![false; n] }
    }

    fn find(&mut self, i: usize) -> (usize, i8) {
        let p = self.parent[i];
        if p == i {
            return (i, 1);
        }
        let (r, s) = self.find(p);
        self.parent[i] = r;
        self.sign[i] *= s;
        (r, self.sign[i])
    }

    /// Imposes `x_i = sigma * x_j`.
    fn union(&mut self, i: usize, j: usize, sigma: i8) {
        let (ri, si) = self.find(i);
        let (rj, sj) = self.find(j);
        let s = si * sigma * sj;
        if ri == rj {
            if s != 1 {
                self.zero[ri] = true;
            }
            return;
        }
        self.parent[ri] = rj;
        self.sign[ri] = s;
        let z = self.zero[ri];
        self.zero[rj] |= z;
    }
}

type SparseRow = BTreeMap<usize, BigRational>;

/// Solves sparse linear relations; returns the free columns and, for every
/// eliminated column, its expression in the free ones.
fn eliminate(ncols: usize, relations: Vec<SparseRow>) -> (Vec<usize>, HashMap<usize, SparseRow>) {
    let mut order: Vec<usize> = Vec::new();
    let mut exprs: HashMap<usize, SparseRow> = HashMap::new();
    for mut row in relations {
        while let Some(&c) = row.keys().find(|c| exprs.contains_key(c)) {
            let coef = row.remove(&c).unwrap();
            for (j, v) in &exprs[&c] {
                let e = row.entry(*j).or_insert_with(BigRational::zero);
                *e += &coef * v;
                if e.is_zero() {
                    row.remove(j);
                }
            }
        }
        let Some((&c, _)) = row.iter().next_back() else {
            continue;
        };
        let lead = row.remove(&c).unwrap();
        let expr: SparseRow = row.into_iter().map(|(j, v)| (j, -v / &lead)).collect();
        exprs.insert(c, expr);
        order.push(c);
    }
    for &c in order.iter().rev() {
        let expr = exprs.remove(&c).unwrap();
        let mut full = SparseRow::new();
        for (j, v) in expr {
            match exprs.get(&j) {
                Some(sub) => {
                    for (k, w) in sub {
                        let e = full.entry(*k).or_insert_with(BigRational::zero);
                        *e += &v * w;
                    }
                }
                None => {
                    let e = full.entry(j).or_insert_with(BigRational::zero);
                    *e += v;
                }
            }
        }
        full.retain(|_, v| !v.is_zero());
        exprs.insert(c, full);
    }
    let free = (0..ncols).filter(|c| !exprs.contains_key(c)).collect();
    (free, exprs)
}

impl ModularSymbolSpace {
    pub fn build(level: u64, sign: Sign) -> Result<Self> {
        Self::build_with_cap(level, sign, DEFAULT_LEVEL_CAP)
    }

    pub fn build_with_cap(level: u64, sign: Sign, cap: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::NonPositive);
        }
        if level > cap {
            return Err(Error::LevelTooLarge { level, cap });
        }
        let p1 = Arc::new(P1List::new(level));
        let n = p1.len();
        let idx = |c: i64, d: i64| p1.index(c, d).expect("unit-preserving map on P^1");

        let mut uf = SignedUnionFind::new(n);
        for i in 0..n {
            let ManinSymbol { c, d } = p1.symbol(i);
            let (c, d) = (c as i64, d as i64);
            uf.union(i, idx(d, -c), -1);
            if sign == Sign::Plus {
                uf.union(i, idx(-c, d), 1);
            }
        }

        let mut seen = vec![false; n];
        let mut relations = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let ManinSymbol { c, d } = p1.symbol(i);
            let (c, d) = (c as i64, d as i64);
            let orbit = [i, idx(d, -c - d), idx(-c - d, c)];
            let mut row = SparseRow::new();
            for &k in &orbit {
                seen[k] = true;
                let (r, s) = uf.find(k);
                if uf.zero[r] {
                    continue;
                }
                let e = row.entry(r).or_insert_with(BigRational::zero);
                *e += BigRational::from_integer(s.into());
            }
            row.retain(|_, v| !v.is_zero());
            if !row.is_empty() {
                relations.push(row);
            }
        }

        let roots: Vec<usize> = (0..n).filter(|&i| uf.find(i).0 == i && !uf.zero[i]).collect();
        let (free_cols, exprs) = eliminate(n, relations);
        let generators: Vec<usize> = free_cols.into_iter().filter(|c| roots.binary_search(c).is_ok()).collect();
        let gen_index: HashMap<usize, usize> = generators.iter().enumerate().map(|(k, &g)| (g, k)).collect();

        let mut coords = Vec::with_capacity(n);
        for i in 0..n {
            let (r, s) = uf.find(i);
            let s = BigRational::from_integer(s.into());
            let v: Vec<(usize, BigRational)> = if uf.zero[r] {
                Vec::new()
            } else if let Some(&g) = gen_index.get(&r) {
                vec![(g, s)]
            } else {
                let mut v: Vec<(usize, BigRational)> =
                    exprs[&r].iter().map(|(j, c)| (gen_index[j], c * &s)).collect();
                v.sort_by_key(|(j, _)| *j);
                v
            };
            coords.push(v);
        }

        let mut space = Self {
            level,
            sign,
            p1,
            int_coords: integer_coordinates(&coords),
            coords,
            generators,
            cusps: Vec::new(),
            boundary: RationalMatrix::zeros(0, 0),
            cuspidal: Subspace::full(0),
        };
        space.compute_boundary();
        Ok(space)
    }

    fn cusp_class(&mut self, x: Cusp) -> usize {
        for (k, &c) in self.cusps.iter().enumerate() {
            if cusps_equivalent(x, c, self.level)
                || (self.sign == Sign::Plus && cusps_equivalent(x.neg(), c, self.level))
            {
                return k;
            }
        }
        self.cusps.push(x);
        self.cusps.len() - 1
    }

    fn compute_boundary(&mut self) {
        let mut entries: Vec<(usize, usize, i64)> = Vec::new();
        for (g, &i) in self.generators.clone().iter().enumerate() {
            let ManinSymbol { c, d } = self.p1.symbol(i);
            let (a, b, c, d) = lift_to_sl2(c, d, self.level);
            let k1 = self.cusp_class(Cusp::new(a, c));
            let k0 = self.cusp_class(Cusp::new(b, d));
            entries.push((g, k1, 1));
            entries.push((g, k0, -1));
        }
        let mut m = RationalMatrix::zeros(self.generators.len(), self.cusps.len());
        for (g, k, s) in entries {
            let v = m.get(g, k) + BigRational::from_integer(s.into());
            m.set(g, k, v);
        }
        self.cuspidal = Subspace::from_rows(&m.left_kernel());
        self.boundary = m;
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    /// Manin symbols forming the quotient basis.
    pub fn generators(&self) -> Vec<ManinSymbol> {
        self.generators.iter().map(|&i| self.p1.symbol(i)).collect()
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    /// Boundary map, one row per basis symbol and one column per cusp class.
    pub fn boundary_matrix(&self) -> &RationalMatrix {
        &self.boundary
    }

    pub fn cuspidal(&self) -> &Subspace {
        &self.cuspidal
    }

    fn add_manin(&self, acc: &mut [BigRational], c: i64, d: i64, scale: i64) {
        if let Some(k) = self.p1.index(c, d) {
            let s = BigRational::from_integer(scale.into());
            for (j, v) in &self.coords[k] {
                acc[*j] += v * &s;
            }
        }
    }

    /// Coordinates of the Manin symbol `(c : d)`.
    pub fn manin_vector(&self, c: i64, d: i64) -> Vec<BigRational> {
        let mut acc = vec![BigRational::zero(); self.dimension()];
        self.add_manin(&mut acc, c, d, 1);
        acc
    }

    /// Accumulates `scale * {0, x}` via the continued fraction of `x`.
    fn add_zero_to(&self, acc: &mut [BigRational], x: Cusp, scale: i64) {
        if x.den == 0 {
            self.add_manin(acc, 0, 1, scale);
            return;
        }
        let conv = convergents(x.num, x.den);
        // conv[k] is (p_{k-2}, q_{k-2})
        for k in 1..conv.len() {
            let j = k as i64 - 2;
            let sgn = if (j - 1).rem_euclid(2) == 0 { 1 } else { -1 };
            self.add_manin(acc, sgn * conv[k].1, conv[k - 1].1, scale);
        }
    }

    /// Coordinates of the modular symbol `{alpha, beta}`.
    pub fn modular_symbol(&self, alpha: Cusp, beta: Cusp) -> Vec<BigRational> {
        let mut acc = vec![BigRational::zero(); self.dimension()];
        self.add_zero_to(&mut acc, beta, 1);
        self.add_zero_to(&mut acc, alpha, -1);
        acc
    }

    fn generator_endpoints(&self, g: usize) -> (Cusp, Cusp) {
        let ManinSymbol { c, d } = self.p1.symbol(self.generators[g]);
        let (a, b, c, d) = lift_to_sl2(c, d, self.level);
        (Cusp::new(b, d), Cusp::new(a, c))
    }

    /// Hecke operator `T_n` on the whole space (row-vector convention), via
    /// the Heilbronn matrices of determinant `n`.
    pub fn hecke_matrix(&self, n: u64) -> SparseMatrix {
        let heil = heilbronn_matrices(n);
        let dim = self.dimension();
        let rows = (0..dim)
            .map(|g| {
                let ManinSymbol { c, d } = self.p1.symbol(self.generators[g]);
                let (c, d) = (c as i64, d as i64);
                let mut counts: HashMap<usize, i64> = HashMap::new();
                for &[a, b, cc, dd] in &heil {
                    if let Some(k) = self.p1.index(c * a + d * cc, c * b + d * dd) {
                        *counts.entry(k).or_insert(0) += 1;
                    }
                }
                if let Some((den, ic)) = &self.int_coords {
                    let mut acc = vec![0i128; dim];
                    for (k, m) in counts {
                        for (j, v) in &ic[k] {
                            acc[*j] += (*v as i128) * (m as i128);
                        }
                    }
                    let den = BigInt::from(*den);
                    return acc
                        .into_iter()
                        .enumerate()
                        .filter(|(_, v)| *v != 0)
                        .map(|(j, v)| (j, BigRational::new(BigInt::from(v), den.clone())))
                        .collect();
                }
                let mut acc = vec![BigRational::zero(); dim];
                for (k, m) in counts {
                    let m = BigRational::from_integer(m.into());
                    for (j, v) in &self.coords[k] {
                        acc[*j] += v * &m;
                    }
                }
                crate::exact::matrix::dense_to_sparse(&acc)
            })
            .collect();
        SparseMatrix::new(dim, rows)
    }

    /// `T_n` restricted to an invariant subspace, in its echelon coordinates.
    pub fn hecke_on(&self, sub: &Subspace, n: u64) -> Result<RationalMatrix> {
        sub.restrict(&self.hecke_matrix(n), true)
    }

    /// The Fricke involution `{a, b} -> {-1/(N a), -1/(N b)}`.
    pub fn atkin_lehner_matrix(&self) -> SparseMatrix {
        let n = self.level as i64;
        let w = |x: Cusp| -> Cusp {
            if x.den == 0 {
                Cusp::new(0, 1)
            } else if x.num == 0 {
                Cusp::INFINITY
            } else {
                Cusp::new(-x.den, n * x.num)
            }
        };
        let rows = (0..self.dimension())
            .map(|g| {
                let (alpha, beta) = self.generator_endpoints(g);
                crate::exact::matrix::dense_to_sparse(&self.modular_symbol(w(alpha), w(beta)))
            })
            .collect();
        SparseMatrix::new(self.dimension(), rows)
    }

    /// Degeneracy map to a space of level `M | N` induced by `z -> t z`.
    pub fn degeneracy_matrix(&self, target: &ModularSymbolSpace, t: u64) -> Result<RationalMatrix> {
        let m = target.level;
        if self.level % m != 0 || (self.level / m) % t != 0 || target.sign != self.sign {
            return Err(Error::InvalidArgument(format!(
                "no degeneracy map from level {} to level {} with t = {}",
                self.level, m, t
            )));
        }
        let t = t as i64;
        let scale = |x: Cusp| if x.den == 0 { x } else { Cusp::new(t * x.num, x.den) };
        let rows = (0..self.dimension())
            .map(|g| {
                let (alpha, beta) = self.generator_endpoints(g);
                target.modular_symbol(scale(alpha), scale(beta))
            })
            .collect();
        RationalMatrix::from_rows(rows, target.dimension())
    }

    /// Cuspidal new subspace: the common kernel of the degeneracy maps
    /// `t = 1` and `t = q` to level `N/q` for each prime `q | N`.
    pub fn new_subspace(&self) -> Result<Subspace> {
        let mut new = self.cuspidal.clone();
        for (q, _) in factorize(self.level) {
            let lower = ModularSymbolSpace::build_with_cap(self.level / q, self.sign, self.level)?;
            if lower.dimension() == 0 {
                continue;
            }
            let b1 = self.degeneracy_matrix(&lower, 1)?;
            let bq = self.degeneracy_matrix(&lower, q)?;
            let both = b1.transpose().stack(&bq.transpose())?.transpose();
            new = new.intersect_kernel(&both)?;
        }
        Ok(new)
    }
}

/// Lazily computed Hecke operators on a frozen space, shareable across
/// threads.
#[derive(Debug)]
pub struct HeckeOperators {
    space: Arc<ModularSymbolSpace>,
    ops: Mutex<BTreeMap<u64, Arc<SparseMatrix>>>,
    fricke: OnceLock<Arc<SparseMatrix>>,
}

impl HeckeOperators {
    pub fn new(space: Arc<ModularSymbolSpace>) -> Self {
        Self { space, ops: Mutex::new(BTreeMap::new()), fricke: OnceLock::new() }
    }

    pub fn space(&self) -> &ModularSymbolSpace {
        &self.space
    }

    pub fn hecke(&self, n: u64) -> Arc<SparseMatrix> {
        if let Some(m) = self.ops.lock().unwrap().get(&n) {
            return m.clone();
        }
        let m = Arc::new(self.space.hecke_matrix(n));
        self.ops.lock().unwrap().entry(n).or_insert(m).clone()
    }

    pub fn fricke(&self) -> Arc<SparseMatrix> {
        self.fricke.get_or_init(|| Arc::new(self.space.atkin_lehner_matrix())).clone()
    }
}

/// Heilbronn matrices `[[a, b], [c, d]]` with `ad - bc = n`, `a > b >= 0`,
/// `d > c >= 0`.
pub fn heilbronn_matrices(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=n {
            let bc = a * d - n;
            if bc < 0 {
                continue;
            }
            if bc == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
                continue;
            }
            for b in 1..a {
                if bc % b == 0 {
                    let c = bc / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}
