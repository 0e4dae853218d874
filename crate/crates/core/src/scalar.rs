//! Complex scalars in one of two modes: exact Gaussian rationals or
//! double-precision floats.
//!
//! The mode of a value never changes implicitly. Binary operations between
//! an exact and a floating value are rejected: the `try_*` methods return
//! [`Error::ModeMismatch`], and the operator impls panic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex number with rational parts.
pub type GaussianRational = Complex<BigRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CScalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl CScalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => CScalar::Exact(GaussianRational::zero()),
            Mode::Float => CScalar::Float(Complex64::zero()),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Self::from_int(1, mode)
    }

    /// The imaginary unit.
    pub fn i(mode: Mode) -> Self {
        match mode {
            Mode::Exact => CScalar::Exact(Complex::new(BigRational::zero(), BigRational::one())),
            Mode::Float => CScalar::Float(Complex64::i()),
        }
    }

    pub fn from_int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => CScalar::Exact(Complex::new(
                BigRational::from_integer(BigInt::from(n)),
                BigRational::zero(),
            )),
            Mode::Float => CScalar::Float(Complex64::new(n as f64, 0.0)),
        }
    }

    pub fn from_bigint(n: &BigInt, mode: Mode) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()), mode)
    }

    /// Real rational embedded in the requested mode. Float mode rounds once.
    pub fn from_rational(r: &BigRational, mode: Mode) -> Self {
        match mode {
            Mode::Exact => CScalar::Exact(Complex::new(r.clone(), BigRational::zero())),
            Mode::Float => CScalar::Float(Complex64::new(rational_to_f64(r), 0.0)),
        }
    }

    /// Exact value `(re_num/re_den) + (im_num/im_den) i`.
    pub fn exact(re: BigRational, im: BigRational) -> Self {
        CScalar::Exact(Complex::new(re, im))
    }

    /// Exact value from small integer fractions, `re = a/b`, `im = c/d`.
    pub fn gaussian(a: i64, b: i64, c: i64, d: i64) -> Self {
        CScalar::Exact(Complex::new(
            BigRational::new(a.into(), b.into()),
            BigRational::new(c.into(), d.into()),
        ))
    }

    pub fn float(re: f64, im: f64) -> Self {
        CScalar::Float(Complex64::new(re, im))
    }

    pub fn mode(&self) -> Mode {
        match self {
            CScalar::Exact(_) => Mode::Exact,
            CScalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CScalar::Exact(v) => v.is_zero(),
            CScalar::Float(v) => v.re == 0.0 && v.im == 0.0,
        }
    }

    /// Floating value; exact values are rounded.
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            CScalar::Exact(v) => Complex64::new(rational_to_f64(&v.re), rational_to_f64(&v.im)),
            CScalar::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&GaussianRational> {
        match self {
            CScalar::Exact(v) => Some(v),
            CScalar::Float(_) => None,
        }
    }

    /// Explicit conversion into `mode`. Exact to float rounds; float to
    /// exact is refused because it would invent precision.
    pub fn to_mode(&self, mode: Mode) -> Result<Self> {
        match (self, mode) {
            (CScalar::Exact(_), Mode::Exact) | (CScalar::Float(_), Mode::Float) => Ok(self.clone()),
            (CScalar::Exact(_), Mode::Float) => Ok(CScalar::Float(self.to_complex64())),
            (CScalar::Float(_), Mode::Exact) => Err(Error::ModeMismatch {
                left: Mode::Float,
                right: Mode::Exact,
            }),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex64().norm()
    }

    pub fn conj(&self) -> Self {
        match self {
            CScalar::Exact(v) => CScalar::Exact(v.conj()),
            CScalar::Float(v) => CScalar::Float(v.conj()),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        match self {
            CScalar::Exact(v) => {
                let n = BigRational::from_integer(BigInt::from(n));
                CScalar::Exact(Complex::new(&v.re * &n, &v.im * &n))
            }
            CScalar::Float(v) => CScalar::Float(v * n as f64),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        match self {
            CScalar::Exact(v) => CScalar::Exact(Complex::new(&v.re * r, &v.im * r)),
            CScalar::Float(v) => CScalar::Float(v * rational_to_f64(r)),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CScalar::one(self.mode());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                left: self.mode(),
                right: other.mode(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / other)
    }

    /// Component strings: `"p/q"` in exact mode, 17 significant digits in
    /// float mode.
    pub fn to_strings(&self) -> (String, String) {
        match self {
            CScalar::Exact(v) => (format_rational(&v.re), format_rational(&v.im)),
            CScalar::Float(v) => (format_float(v.re), format_float(v.im)),
        }
    }

    /// Parses a `(re, im)` string pair. With `mode = None` the mode is
    /// inferred: exact when both parts are integers or `p/q` fractions,
    /// float as soon as either part is written as a decimal. Requesting
    /// exact mode for decimal input is an error.
    pub fn parse_pair(re: &str, im: &str, mode: Option<Mode>) -> Result<Self> {
        let inferred = if looks_float(re) || looks_float(im) {
            Mode::Float
        } else {
            Mode::Exact
        };
        match mode.unwrap_or(inferred) {
            Mode::Exact => {
                if inferred == Mode::Float {
                    return Err(Error::ModeMismatch {
                        left: Mode::Float,
                        right: Mode::Exact,
                    });
                }
                Ok(CScalar::Exact(Complex::new(parse_rational(re)?, parse_rational(im)?)))
            }
            Mode::Float => Ok(CScalar::Float(Complex64::new(
                parse_float_or_rational(re)?,
                parse_float_or_rational(im)?,
            ))),
        }
    }
}

/// One component of a scalar as it appears in JSON input: either a string
/// (`"p/q"`, `"3"`, `"0.25"`) or a bare JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Number(serde_json::Number),
}

impl ScalarText {
    pub fn as_string(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Number(n) => n.to_string(),
        }
    }
}

/// `[re, im]` pair as written in boundary-data and family files.
pub type ScalarPair = (ScalarText, ScalarText);

pub fn parse_scalar_pair(pair: &ScalarPair, mode: Option<Mode>) -> Result<CScalar> {
    CScalar::parse_pair(&pair.0.as_string(), &pair.1.as_string(), mode)
}

/// Exact unless some component is written as a decimal.
pub fn infer_mode<'a>(pairs: impl IntoIterator<Item = &'a ScalarPair>) -> Mode {
    let any_float = pairs
        .into_iter()
        .any(|(re, im)| looks_float(&re.as_string()) || looks_float(&im.as_string()));
    if any_float {
        Mode::Float
    } else {
        Mode::Exact
    }
}

pub fn scalar_pair(c: &CScalar) -> ScalarPair {
    let (re, im) = c.to_strings();
    (ScalarText::Text(re), ScalarText::Text(im))
}

fn looks_float(s: &str) -> bool {
    let t = s.trim().to_ascii_lowercase();
    t.contains('.') || t.contains('e') || t.contains("inf") || t.contains("nan")
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let err = || Error::Parse(format!("invalid rational `{s}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| err())?)),
    }
}

fn parse_float_or_rational(s: &str) -> Result<f64> {
    if looks_float(s) {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("invalid decimal `{s}`")))
    } else {
        Ok(rational_to_f64(&parse_rational(s)?))
    }
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Correctly scaled conversion that survives numerators and denominators
/// far beyond the f64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64 - 60;
    let scaled = if shift >= 0 {
        r / BigRational::from_integer(BigInt::one() << shift as u64)
    } else {
        r * BigRational::from_integer(BigInt::one() << (-shift) as u64)
    };
    let q = scaled.numer().to_f64().unwrap_or(0.0) / scaled.denom().to_f64().unwrap_or(1.0);
    let shift = shift.clamp(-4000, 4000) as i32;
    q * 2f64.powi(shift / 2) * 2f64.powi(shift - shift / 2)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&CScalar> for &CScalar {
            type Output = CScalar;

            fn $method(self, rhs: &CScalar) -> CScalar {
                match (self, rhs) {
                    (CScalar::Exact(a), CScalar::Exact(b)) => CScalar::Exact(a $op b),
                    (CScalar::Float(a), CScalar::Float(b)) => CScalar::Float(a $op b),
                    (a, b) => panic!(
                        "mixed-mode arithmetic between {} and {}",
                        a.mode(),
                        b.mode()
                    ),
                }
            }
        }

        impl $tr<CScalar> for CScalar {
            type Output = CScalar;

            fn $method(self, rhs: CScalar) -> CScalar {
                &self $op &rhs
            }
        }

        impl $tr<&CScalar> for CScalar {
            type Output = CScalar;

            fn $method(self, rhs: &CScalar) -> CScalar {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &CScalar {
    type Output = CScalar;

    fn neg(self) -> CScalar {
        match self {
            CScalar::Exact(v) => CScalar::Exact(-v.clone()),
            CScalar::Float(v) => CScalar::Float(-v),
        }
    }
}

impl Neg for CScalar {
    type Output = CScalar;

    fn neg(self) -> CScalar {
        -&self
    }
}

impl fmt::Display for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CScalar::Exact(v) => write!(f, "{} + {}i", v.re, v.im),
            CScalar::Float(v) => write!(f, "{} + {}i", v.re, v.im),
        }
    }
}
