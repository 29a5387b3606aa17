//! Rational q-expansion bases of the `w = +1` cusp forms at level `p^2`,
//! the valuation shape at the cusp infinity, hyperelliptic models
//! `y^2 = P(x)`, and the certificate for `p = 11`.

pub mod pointcount;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::sturm_bound_p2;
use crate::catalog::{Catalog, NewformOrbit};
use crate::curve::genus_table;
use crate::error::{Error, Result};
use crate::exact::{rat, IntPoly, QSeries, RatPoly, RationalMatrix};

pub use pointcount::{count_points_mod_ell, count_points_model_at_2, model_at_2, Gf2n, ModelAt2};

/// The stored rational q-expansions of an orbit, truncated to `precision`.
pub fn orbit_qexpansion(orbit: &NewformOrbit, precision: u64) -> Result<Vec<QSeries>> {
    let q = orbit
        .qexp
        .as_ref()
        .ok_or_else(|| Error::MissingData(format!("orbit {} has no stored q-expansion", orbit.id)))?;
    if precision > q.precision {
        return Err(Error::InsufficientPrecision { requested: precision as i64, available: q.precision as i64 });
    }
    Ok(q.series.iter().map(|s| QSeries::new(0, s[..precision as usize].to_vec())).collect())
}

/// `f(q) + p ε(f) f(q^p)` for each series of a level-`p` orbit: the part of
/// the old space where `w_{p^2}` acts as `+1`.
pub fn oldform_lift(orbit: &NewformOrbit, p: u64, precision: u64) -> Result<Vec<QSeries>> {
    if orbit.level != p {
        return Err(Error::InvalidArgument(format!("orbit {} is not at level {p}", orbit.id)));
    }
    let c = rat(p as i64 * orbit.epsilon as i64);
    Ok(orbit_qexpansion(orbit, precision)?
        .iter()
        .map(|f| {
            let lifted = f.substitute_power(p as i64).truncate(precision as i64);
            f.add(&lifted.scale(&c))
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BasisShape {
    /// Pivots `1, 2, ..., g`: infinity is not a Weierstrass point.
    NonWeierstrass,
    /// Pivots `1, 3, ..., 2g - 1`: the gap sequence of a hyperelliptic
    /// Weierstrass point.
    WeierstrassHyp,
    Other,
}

pub fn classify_shape(pivots: &[i64]) -> BasisShape {
    let g = pivots.len() as i64;
    if pivots.iter().copied().eq(1..=g) {
        BasisShape::NonWeierstrass
    } else if pivots.iter().copied().eq((1..=g).map(|i| 2 * i - 1)) {
        BasisShape::WeierstrassHyp
    } else {
        BasisShape::Other
    }
}

/// Reduced echelon form by valuation: leading coefficient 1 at each pivot
/// and zeros at the other pivots. Errors if the series are dependent to the
/// common precision.
pub fn echelonize(series: &[QSeries]) -> Result<(Vec<QSeries>, Vec<i64>)> {
    if series.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let prec = series.iter().map(|s| s.precision()).min().unwrap();
    let start = series.iter().filter_map(|s| s.valuation()).min().unwrap_or(prec).min(prec);
    let width = (prec - start).max(0) as usize;
    let rows: Vec<Vec<BigRational>> = series.iter().map(|s| s.truncate(prec).coeffs_from(start)).collect();
    let m = RationalMatrix::from_rows(rows, width)?;
    let (r, pivots) = m.rref();
    if pivots.len() < series.len() {
        return Err(Error::InsufficientPrecision { requested: prec + 1, available: prec });
    }
    let basis = (0..pivots.len()).map(|i| QSeries::new(start, r.row(i).to_vec())).collect();
    Ok((basis, pivots.iter().map(|&c| start + c as i64).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlusSpaceBasis {
    pub p: u64,
    pub precision: u64,
    #[serde(serialize_with = "serialize_series")]
    pub basis: Vec<QSeries>,
    pub pivots: Vec<i64>,
    pub shape: BasisShape,
}

fn serialize_series<S: serde::Serializer>(v: &[QSeries], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|f| f.truncate(f.valuation().unwrap_or(0) + 8).to_string()))
}

/// Minimum precision for echelonizing and fitting a model.
pub fn minimum_basis_precision(g_plus: u64) -> u64 {
    2 * (2 * g_plus + 2) + 4
}

/// Weight-2 forms on `Γ0(p^2)` with `w = +1`: the newforms of level `p^2`
/// with `ε = +1` and the `+1` lifts of the level-`p` newforms, echelonized.
pub fn plus_space_basis(catalog: &Catalog, precision: Option<u64>) -> Result<PlusSpaceBasis> {
    let p = catalog.p;
    let g = genus_table(p)?.g_plus;
    let available = catalog
        .plus_orbits()
        .map(|o| o.qexp.as_ref().map(|q| q.precision).unwrap_or(0))
        .min()
        .unwrap_or(0);
    let precision = precision.unwrap_or(available);
    let need = minimum_basis_precision(g);
    if precision < need {
        return Err(Error::InsufficientPrecision { requested: need as i64, available: precision as i64 });
    }
    let mut series = Vec::new();
    for o in catalog.plus_orbits() {
        if o.level == p {
            series.extend(oldform_lift(o, p, precision)?);
        } else {
            series.extend(orbit_qexpansion(o, precision)?);
        }
    }
    if series.len() as u64 != g {
        return Err(Error::Verification(format!("{} series for a space of dimension g+ = {g}", series.len())));
    }
    let (basis, pivots) = echelonize(&series)?;
    let shape = classify_shape(&pivots);
    Ok(PlusSpaceBasis { p, precision, basis, pivots, shape })
}

/// Number of coefficients that certify `y^2 = P(x)`: after clearing
/// denominators by `f^{2g+2}` the identity is between cusp forms of weight
/// `4g + 4` on `Γ0(p^2)`.
pub fn model_certification_bound(p: u64, g_plus: u64) -> u64 {
    ((4 * g_plus + 4) * p * (p + 1)).div_ceil(12)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperellipticModel {
    pub p: u64,
    /// `P`, ascending coefficients as decimal rationals.
    #[serde(serialize_with = "serialize_ratpoly")]
    pub poly: RatPoly,
    pub equation: String,
    #[serde(serialize_with = "serialize_one")]
    pub x: QSeries,
    #[serde(serialize_with = "serialize_one")]
    pub y: QSeries,
    /// `y = y_scale * (q dx/dq) / f`.
    #[serde(serialize_with = "serialize_rat")]
    pub y_scale: BigRational,
    /// `y^2 - P(x)` vanishes below this exponent.
    pub verified_precision: i64,
    pub sturm_bound: u64,
    pub certification_bound: u64,
    pub certified: bool,
}

/// Leading terms only; the full series is reproducible from the catalog.
fn serialize_one<S: serde::Serializer>(v: &QSeries, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.truncate(8).to_string())
}

fn serialize_rat<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_ratpoly<S: serde::Serializer>(v: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.coeffs().iter().map(|c| c.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefusalCertificate {
    pub p: u64,
    pub pivots: Vec<i64>,
    pub shape: BasisShape,
    pub reason: String,
    /// For an inconsistent fit: the first exponent where no `P` matches.
    pub residual_valuation: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ModelOutcome {
    Model(HyperellipticModel),
    Refused(RefusalCertificate),
}

/// Result of fitting `y^2 = sum c_k x^k` with `k <= degree`.
enum Fit {
    Solved(RatPoly),
    Inconsistent(i64),
    Underdetermined,
}

fn fit_polynomial(x: &QSeries, y: &QSeries, degree: usize) -> Result<Fit> {
    let prec = x.precision().min(y.precision());
    let lo = x.valuation().unwrap_or(0).min(0) * degree as i64;
    let lo = lo.min(2 * y.valuation().unwrap_or(0).min(0));
    let y2 = y.mul(y);
    let mut powers = Vec::with_capacity(degree + 1);
    let mut acc = QSeries::one(prec);
    for _ in 0..=degree {
        powers.push(acc.clone());
        acc = acc.mul(x);
    }
    let hi = powers.iter().map(|s| s.precision()).chain([y2.precision()]).min().unwrap();
    let rows = (hi - lo).max(0) as usize;
    let mut a = RationalMatrix::zeros(rows, degree + 2);
    for (r, e) in (lo..hi).enumerate() {
        for (k, pw) in powers.iter().enumerate() {
            a.set(r, k, pw.coeff(e).unwrap());
        }
        a.set(r, degree + 1, y2.coeff(e).unwrap());
    }
    let consistent = |n: usize| -> bool {
        let sub = RationalMatrix::from_rows(a.row_vectors()[..n].to_vec(), degree + 2).unwrap();
        let (_, piv) = sub.rref();
        !piv.contains(&(degree + 1))
    };
    if !consistent(rows) {
        // smallest prefix that is already inconsistent
        let (mut good, mut bad) = (0usize, rows);
        while bad - good > 1 {
            let mid = (good + bad) / 2;
            if consistent(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return Ok(Fit::Inconsistent(lo + bad as i64 - 1));
    }
    let (r, piv) = a.rref();
    if piv.len() < degree + 1 {
        return Ok(Fit::Underdetermined);
    }
    let mut c = vec![BigRational::zero(); degree + 1];
    for (i, &col) in piv.iter().enumerate() {
        c[col] = r.get(i, degree + 1).clone();
    }
    Ok(Fit::Solved(RatPoly::new(c)))
}

fn eval_series(f: &RatPoly, x: &QSeries) -> QSeries {
    let mut acc = QSeries::zero(x.precision().max(0) + 64);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(x).add(&QSeries::one(x.precision()).scale(c));
    }
    acc
}

fn is_squarefree(f: &RatPoly) -> bool {
    f.gcd(&f.derivative()).degree() == 0
}

/// Fits and verifies `y^2 = P(x)` for given `x`, `y` series.
pub fn model_from_functions(p: u64, g_plus: u64, x: QSeries, y: QSeries, y_scale: BigRational) -> Result<ModelOutcome> {
    let degree = (2 * g_plus + 2) as usize;
    let refusal = |reason: String, residual| {
        ModelOutcome::Refused(RefusalCertificate { p, pivots: Vec::new(), shape: BasisShape::Other, reason, residual_valuation: residual })
    };
    let poly = match fit_polynomial(&x, &y, degree)? {
        Fit::Solved(f) => f,
        Fit::Inconsistent(v) => return Ok(refusal(format!("no P of degree <= {degree} fits y^2 = P(x)"), Some(v))),
        Fit::Underdetermined => {
            return Err(Error::InsufficientPrecision { requested: x.precision() + degree as i64, available: x.precision() })
        }
    };
    let residual = y.mul(&y).sub(&eval_series(&poly, &x));
    if !residual.is_zero() {
        return Ok(refusal("fitted P leaves a nonzero residual".into(), residual.valuation()));
    }
    let d = poly.degree();
    if d != degree as isize && d != degree as isize - 1 {
        return Ok(refusal(format!("fitted P has degree {d}, expected {} or {degree}", degree - 1), None));
    }
    if !is_squarefree(&poly) {
        return Ok(refusal("fitted P is not squarefree".into(), None));
    }
    let verified = residual.precision();
    let cert_bound = model_certification_bound(p, g_plus);
    Ok(ModelOutcome::Model(HyperellipticModel {
        p,
        equation: format!("y^2 = {}", poly_text(&poly)),
        poly,
        x,
        y,
        y_scale,
        verified_precision: verified,
        sturm_bound: sturm_bound_p2(p),
        certification_bound: cert_bound,
        certified: verified >= cert_bound as i64,
    }))
}

/// Canonical text of a rational polynomial in `x`, highest degree first.
pub fn poly_text(f: &RatPoly) -> String {
    match f.to_int() {
        Some(i) => i.to_string_var("x"),
        None => {
            let terms: Vec<String> = f
                .coeffs()
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| match k {
                    0 => format!("({c})"),
                    1 => format!("({c})*x"),
                    _ => format!("({c})*x^{k}"),
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        }
    }
}

/// `x = f_g / f_{g-1}` and `y = (q dx/dq) / f_{g-1}` on the echelon basis.
pub fn hyperelliptic_model(basis: &PlusSpaceBasis) -> Result<ModelOutcome> {
    if basis.shape == BasisShape::Other {
        return Err(Error::InvalidArgument(format!(
            "p = {}: pivots {:?} admit no hyperelliptic model",
            basis.p, basis.pivots
        )));
    }
    let g = basis.basis.len();
    if g < 2 {
        return Err(Error::InvalidArgument("genus below 2".into()));
    }
    let (fa, fb) = (&basis.basis[g - 2], &basis.basis[g - 1]);
    let x = fb.div(fa)?;
    let y = x.derive().div(fa)?;
    let out = model_from_functions(basis.p, g as u64, x, y, BigRational::one())?;
    Ok(match out {
        ModelOutcome::Refused(mut r) => {
            r.pivots = basis.pivots.clone();
            r.shape = basis.shape;
            ModelOutcome::Refused(r)
        }
        m => m,
    })
}

/// Hyperelliptic screen: a refusal for shape `Other`, a model attempt
/// otherwise.
pub fn hyperelliptic_screen(catalog: &Catalog, precision: Option<u64>) -> Result<(PlusSpaceBasis, ModelOutcome)> {
    let basis = plus_space_basis(catalog, precision)?;
    if basis.shape == BasisShape::Other {
        let r = RefusalCertificate {
            p: basis.p,
            pivots: basis.pivots.clone(),
            shape: basis.shape,
            reason: "pivot valuations match neither 1..g nor 1,3,..,2g-1, so no basis of the required shape exists"
                .into(),
            residual_valuation: None,
        };
        return Ok((basis, ModelOutcome::Refused(r)));
    }
    let m = hyperelliptic_model(&basis)?;
    Ok((basis, m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignMap {
    pub name: String,
    pub x_sign: i32,
    pub y_sign: i32,
    pub preserves_equation: bool,
    pub fixes_infinity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct P11Certificate {
    pub model: HyperellipticModel,
    /// `f1` (the CM newform) and `h = f2 - 11 f2(q^11)` lie in the
    /// echelonized plus space.
    pub basis_contains_f1_and_h: bool,
    pub echelon_shape: BasisShape,
    /// `(x, y)` at the cusp infinity.
    pub infinity: (String, String),
    pub maps: Vec<SignMap>,
    pub no_nontrivial_map_fixes_infinity: bool,
    pub verified: bool,
}

fn in_span(basis: &[QSeries], f: &QSeries) -> bool {
    let mut all = basis.to_vec();
    all.push(f.clone());
    echelonize(&all).is_err()
}

/// Equation, sign automorphisms and the position of infinity for `p = 11`,
/// from the basis `f1`, `h` with `x = h/f1`, `y = -2 (q dx/dq)/f1`.
pub fn verify_p11(catalog: &Catalog) -> Result<P11Certificate> {
    if catalog.p != 11 {
        return Err(Error::InvalidArgument(format!("catalog is for p = {}, not 11", catalog.p)));
    }
    let basis = plus_space_basis(catalog, None)?;
    let prec = basis.precision;
    let f1 = catalog
        .at_level(121)
        .find(|o| o.epsilon == 1)
        .ok_or_else(|| Error::Verification("no level-121 orbit with w = +1".into()))?;
    let f2 = catalog
        .at_level(11)
        .next()
        .ok_or_else(|| Error::Verification("no level-11 orbit".into()))?;
    if f1.dimension != 1 || f2.dimension != 1 {
        return Err(Error::Verification("p = 11 orbits are not rational".into()));
    }
    let f1s = orbit_qexpansion(f1, prec)?.remove(0);
    let f1s = f1s.scale(&f1s.leading_coeff().unwrap().recip());
    let f2s = orbit_qexpansion(f2, prec)?.remove(0);
    let f2s = f2s.scale(&f2s.leading_coeff().unwrap().recip());
    let h = f2s.add(&f2s.substitute_power(11).truncate(prec as i64).scale(&rat(11 * f2.epsilon as i64)));
    let contains = in_span(&basis.basis, &f1s) && in_span(&basis.basis, &h);

    let x = h.div(&f1s)?;
    let scale = rat(-2);
    let y = x.derive().div(&f1s)?.scale(&scale);
    let model = match model_from_functions(11, 2, x, y, scale)? {
        ModelOutcome::Model(m) => m,
        ModelOutcome::Refused(r) => return Err(Error::Verification(format!("p = 11 model refused: {}", r.reason))),
    };
    let x0 = model.x.coeff(0).unwrap();
    let y0 = model.y.coeff(0).unwrap();
    let even = (0..=model.poly.degree().max(0) as usize).all(|k| k % 2 == 0 || model.poly.coeff(k).is_zero());
    let mut maps = Vec::new();
    for (name, sx, sy) in [("(x,y) -> (-x,y)", -1, 1), ("(x,y) -> (x,-y)", 1, -1), ("(x,y) -> (-x,-y)", -1, -1)] {
        let fixes = (sx == 1 || x0.is_zero()) && (sy == 1 || y0.is_zero());
        maps.push(SignMap {
            name: name.into(),
            x_sign: sx,
            y_sign: sy,
            preserves_equation: sx == 1 || even,
            fixes_infinity: fixes,
        });
    }
    let none_fix = maps.iter().all(|m| !m.fixes_infinity);
    let verified = contains && model.certified && maps.iter().all(|m| m.preserves_equation) && none_fix;
    Ok(P11Certificate {
        infinity: (x0.to_string(), y0.to_string()),
        model,
        basis_contains_f1_and_h: contains,
        echelon_shape: basis.shape,
        maps,
        no_nontrivial_map_fixes_infinity: none_fix,
        verified,
    })
}

/// `P` as an integer polynomial when it has integral coefficients.
pub fn integral_model(m: &HyperellipticModel) -> Option<IntPoly> {
    m.poly.to_int()
}
