//! Empirical radius of convergence in `u` from the `a[k, 0]` coefficients,
//! and the analytic bounds it is compared with.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closed_forms::Family;
use crate::error::{Error, Result};
use crate::scalar::CScalar;

/// Fewest nonzero coefficients (beyond the constant) an estimate accepts.
pub const MIN_TAIL_TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ratio,
    Root,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(Method::Ratio),
            "root" => Ok(Method::Root),
            other => Err(Error::InvalidInput(format!("unknown method {other:?}"))),
        }
    }
}

/// A radius that may be infinite. Serialized as a number or `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(r) => Some(r),
            Bound::Unbounded => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(r) => s.serialize_f64(*r),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(Bound::Finite(r)),
            Raw::Text(t) if t == "unbounded" => Ok(Bound::Unbounded),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad bound {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub empirical: f64,
    pub theoretical: Bound,
    /// `empirical / theoretical - 1`; absent when the bound is unbounded.
    pub relative_gap: Option<f64>,
    pub method: Method,
    pub terms_used: usize,
}

impl RadiusEstimate {
    pub fn new(empirical: f64, theoretical: Bound, method: Method, terms_used: usize) -> Self {
        RadiusEstimate {
            empirical,
            theoretical,
            relative_gap: theoretical.finite().map(|t| empirical / t - 1.0),
            method,
            terms_used,
        }
    }
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 60;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

/// `ln |c|`, computed without leaving exact arithmetic for big rationals so
/// deep tails neither overflow nor underflow. `-inf` for zero.
pub fn ln_abs(c: &CScalar) -> f64 {
    match c.as_exact() {
        Some(v) => {
            let norm2 = &v.re * &v.re + &v.im * &v.im;
            if norm2.is_zero() {
                f64::NEG_INFINITY
            } else {
                0.5 * ln_rational(&norm2)
            }
        }
        None => c.to_complex64().norm().ln(),
    }
}

/// Least-squares intercept and slopes for `y ~ x0 + x1 * g1(k) + ...`.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut m = vec![vec![0.0; p + 1]; p];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                m[i][j] += row[i] * row[j];
            }
            m[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty");
        m.swap(col, piv);
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    (0..p).map(|i| m[i][p] / m[i][i]).collect()
}

/// `(k, ln |a_k|)` for the nonzero coefficients with `k >= 1`.
fn log_terms(coeffs: &[CScalar]) -> Vec<(usize, f64)> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| (k, ln_abs(c)))
        .filter(|(_, l)| l.is_finite())
        .collect()
}

fn last_quartile<T: Copy>(v: &[T]) -> &[T] {
    let start = v.len() - (v.len() / 4).max(4).min(v.len());
    &v[start..]
}

/// Radius of convergence of `sum a_k u^k`.
///
/// `Ratio` fits the successive ratios `|a_(k+1) / a_k|` of the last quartile
/// against `1/k` and takes the intercept as the limit; `Root` fits
/// `ln |a_k| / k` against `ln k / k` and `1/k`, which removes the power-law
/// prefactor. Requires [`MIN_TAIL_TERMS`] nonzero coefficients after the
/// constant.
pub fn estimate_radius_u(coeffs: &[CScalar], method: Method) -> Result<f64> {
    let terms = log_terms(coeffs);
    if terms.len() < MIN_TAIL_TERMS {
        return Err(Error::InsufficientTerms {
            needed: MIN_TAIL_TERMS,
            found: terms.len(),
        });
    }
    let limit = match method {
        Method::Ratio => {
            let ratios: Vec<(f64, f64)> = terms
                .windows(2)
                .map(|w| {
                    let (k0, l0) = w[0];
                    let (k1, l1) = w[1];
                    (k0 as f64, ((l1 - l0) / (k1 - k0) as f64).exp())
                })
                .collect();
            let tail = last_quartile(&ratios);
            let rows: Vec<Vec<f64>> = tail.iter().map(|&(k, _)| vec![1.0, 1.0 / k]).collect();
            let y: Vec<f64> = tail.iter().map(|&(_, r)| r).collect();
            least_squares(&rows, &y)[0]
        }
        Method::Root => {
            let tail = last_quartile(&terms);
            let rows: Vec<Vec<f64>> = tail
                .iter()
                .map(|&(k, _)| {
                    let k = k as f64;
                    vec![1.0, k.ln() / k, 1.0 / k]
                })
                .collect();
            let y: Vec<f64> = tail.iter().map(|&(k, l)| l / k as f64).collect();
            least_squares(&rows, &y)[0].exp()
        }
    };
    if !(limit.is_finite() && limit > 0.0) {
        return Err(Error::InvalidInput(format!("tail limit estimate {limit} is not positive")));
    }
    Ok(1.0 / limit)
}

/// `|a_k|^(1/k)` over the last quartile of indices `1..len`, zeros included.
/// A sequence tending to zero signals an infinite radius.
pub fn root_tail(coeffs: &[CScalar]) -> Vec<(usize, f64)> {
    let idx: Vec<usize> = (1..coeffs.len()).collect();
    if idx.is_empty() {
        return Vec::new();
    }
    last_quartile(&idx)
        .iter()
        .map(|&k| (k, (ln_abs(&coeffs[k]) / k as f64).exp()))
        .collect()
}

/// Partial-sum tail size `max |a_k u^k|` over the last quartile; grows when
/// `u` lies outside the disc of convergence.
pub fn tail_magnitude(coeffs: &[CScalar], u: f64) -> f64 {
    let idx: Vec<usize> = (1..coeffs.len()).collect();
    last_quartile(&idx)
        .iter()
        .map(|&k| (ln_abs(&coeffs[k]) + k as f64 * u.abs().ln()).exp())
        .fold(0.0, f64::max)
}

/// Analytic radius in `u` at height `z`:
///
/// * `q0`: `|1 + cz|^2 / (6 |c|^2)`;
/// * `q1`: `|1 + cz|^2 / (2 |c|^2)`, where the closed form's square root
///   branches;
/// * two-parameter: `1 / (2 mu^2)`, `mu = max(|alpha|, |beta|)`, unbounded
///   for `alpha = beta`;
/// * Hopf: unbounded (polynomial);
/// * product: `1 / (2 |c|^2)`.
pub fn theoretical_bound(family: &Family, z: Complex64) -> Result<Bound> {
    let one_param = |c: &CScalar, k: f64| -> Result<Bound> {
        let c = c.to_complex64();
        if c.norm() == 0.0 {
            return Err(Error::DegenerateData("c must be nonzero".into()));
        }
        Ok(Bound::Finite((1.0 + c * z).norm_sqr() / (k * c.norm_sqr())))
    };
    match family {
        Family::Q0 { c } => one_param(c, 6.0),
        Family::Q1 { c } => one_param(c, 2.0),
        Family::TwoParam { alpha, beta } => {
            if alpha == beta {
                return Ok(Bound::Unbounded);
            }
            let mu = alpha.abs().max(beta.abs());
            Ok(Bound::Finite(1.0 / (2.0 * mu * mu)))
        }
        Family::Hopf => Ok(Bound::Unbounded),
        Family::Product { c, .. } => {
            let c = c.to_complex64();
            if c.norm() == 0.0 {
                return Ok(Bound::Unbounded);
            }
            Ok(Bound::Finite(1.0 / (2.0 * c.norm_sqr())))
        }
    }
}

/// Row `a[k, 0]`, `k = 0..=order`, of a solved series.
pub fn u_coefficients(psi: &crate::series::BiSeries) -> Vec<CScalar> {
    (0..=psi.trunc()).map(|k| psi.get(k, 0)).collect()
}

/// Solves the family to `order` and estimates its radius at `z = 0`.
pub fn family_radius(family: &Family, order: usize, method: Method, mode: crate::scalar::Mode) -> Result<RadiusEstimate> {
    let bd = family.boundary_data(mode, order + 1)?;
    let psi = crate::solver::solve(&bd, order)?;
    let coeffs = u_coefficients(&psi);
    let theoretical = theoretical_bound(family, Complex64::new(0.0, 0.0))?;
    let empirical = estimate_radius_u(&coeffs, method)?;
    let used = log_terms(&coeffs).len();
    Ok(RadiusEstimate::new(empirical, theoretical, method, used))
}

/// Coefficients `r^-k`, `k < len`, of a geometric series with radius `r`.
pub fn geometric(radius: &BigRational, len: usize) -> Vec<CScalar> {
    let inv = BigRational::one() / radius;
    let mut acc = BigRational::one();
    (0..len)
        .map(|_| {
            let c = CScalar::from_rational(&acc, crate::scalar::Mode::Exact);
            acc = &acc * &inv;
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::f_q0;
    use crate::combin::{int, ratio};
    use crate::scalar::Mode;

    fn q0_c1(n: usize) -> Vec<CScalar> {
        (0..=n)
            .map(|k| {
                if k == 0 {
                    CScalar::one(Mode::Exact)
                } else {
                    CScalar::from_rational(&-f_q0(k), Mode::Exact)
                }
            })
            .collect()
    }

    #[test]
    fn geometric_series_radius_one() {
        let g = geometric(&int(1), 40);
        for m in [Method::Ratio, Method::Root] {
            assert!((estimate_radius_u(&g, m).unwrap() - 1.0).abs() < 1e-9);
        }
        let g = geometric(&ratio(1, 3), 40);
        assert!((estimate_radius_u(&g, Method::Ratio).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn q0_radius_is_a_sixth() {
        let c = q0_c1(60);
        for m in [Method::Ratio, Method::Root] {
            let r = estimate_radius_u(&c, m).unwrap();
            assert!((r * 6.0 - 1.0).abs() < 0.05, "{m:?}: {r}");
        }
    }

    #[test]
    fn insufficient_terms() {
        let c = q0_c1(5);
        assert_eq!(
            estimate_radius_u(&c, Method::Ratio),
            Err(Error::InsufficientTerms { needed: 8, found: 5 })
        );
    }

    #[test]
    fn ln_abs_handles_huge_rationals() {
        let big = BigRational::new(BigInt::from(3).pow(2000), BigInt::from(7));
        let c = CScalar::from_rational(&big, Mode::Exact);
        let expect = 2000.0 * 3f64.ln() - 7f64.ln();
        assert!((ln_abs(&c) - expect).abs() < 1e-9);
        assert_eq!(ln_abs(&CScalar::zero(Mode::Exact)), f64::NEG_INFINITY);
    }

    #[test]
    fn bounds() {
        let one = CScalar::one(Mode::Exact);
        let q0 = Family::Q0 { c: one.clone() };
        assert_eq!(theoretical_bound(&q0, Complex64::new(0.0, 0.0)).unwrap(), Bound::Finite(1.0 / 6.0));
        let b = theoretical_bound(&q0, Complex64::new(0.0, 1.0)).unwrap().finite().unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
        let eq = Family::TwoParam {
            alpha: one.clone(),
            beta: one.clone(),
        };
        assert_eq!(theoretical_bound(&eq, Complex64::new(0.0, 0.0)).unwrap(), Bound::Unbounded);
        let tp = Family::TwoParam {
            alpha: one.clone(),
            beta: CScalar::from_rational(&ratio(1, 2), Mode::Exact),
        };
        assert_eq!(theoretical_bound(&tp, Complex64::new(0.0, 0.0)).unwrap(), Bound::Finite(0.5));
    }

    #[test]
    fn bound_serialization() {
        assert_eq!(serde_json::to_string(&Bound::Unbounded).unwrap(), "\"unbounded\"");
        assert_eq!(serde_json::to_string(&Bound::Finite(0.5)).unwrap(), "0.5");
        let b: Bound = serde_json::from_str("\"unbounded\"").unwrap();
        assert_eq!(b, Bound::Unbounded);
        let e = RadiusEstimate::new(0.2, Bound::Unbounded, Method::Root, 10);
        assert_eq!(e.relative_gap, None);
    }

    #[test]
    fn tails_inside_and_outside() {
        let c = q0_c1(60);
        let bound = 1.0 / 6.0;
        let inside = tail_magnitude(&c, 0.9 * bound);
        let outside = tail_magnitude(&c, 1.5 * bound);
        assert!(inside < 1e-2, "{inside}");
        assert!(outside > 1e5, "{outside}");
    }
}
