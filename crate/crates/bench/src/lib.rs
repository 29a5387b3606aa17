//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitcartan::exact::{rat_frac, IntPoly, QSeries, RationalMatrix};

/// Dense `n x n` matrix with small rational entries, reproducible from `seed`.
pub fn random_matrix(n: usize, seed: u64) -> RationalMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = (0..n * n).map(|_| rat_frac(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
    RationalMatrix::new(n, n, e).expect("square")
}

/// `prod (x - k)` for `k = 1..=n`, times an irreducible quartic.
pub fn split_product(n: i64) -> IntPoly {
    (1..=n).fold(IntPoly::from_i64(&[3, 0, 1, 0, 1]), |acc, k| acc.mul(&IntPoly::from_i64(&[-k, 1])))
}

/// `1 + q + ... + q^(prec-1)` with coefficients `1..=prec`.
pub fn ramp_series(prec: i64) -> QSeries {
    QSeries::from_i64(0, &(1..=prec).collect::<Vec<_>>())
}
