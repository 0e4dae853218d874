//! Bivariate power series in `(u, z)` truncated by total degree.
//!
//! A [`BiSeries`] keeps the coefficients `a[k, l]` of `u^k z^l` for
//! `k + l <= trunc`. Storage is sparse; an absent index is a zero
//! coefficient. Every coefficient shares the series' [`Mode`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::combin::factorial;
use crate::error::{Error, Result};
use crate::scalar::{CScalar, Mode};

/// Differentiation variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    trunc: usize,
    mode: Mode,
    coeffs: BTreeMap<(usize, usize), CScalar>,
}

impl BiSeries {
    pub fn zero(trunc: usize, mode: Mode) -> Self {
        BiSeries {
            trunc,
            mode,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: CScalar, trunc: usize) -> Self {
        let mut s = BiSeries::zero(trunc, c.mode());
        s.insert(0, 0, c);
        s
    }

    /// Builds a series from `(k, l, a[k, l])` triples. Terms beyond the
    /// truncation are dropped; repeated indices accumulate.
    pub fn from_terms(
        trunc: usize,
        mode: Mode,
        terms: impl IntoIterator<Item = (usize, usize, CScalar)>,
    ) -> Result<Self> {
        let mut s = BiSeries::zero(trunc, mode);
        for (k, l, c) in terms {
            if c.mode() != mode {
                return Err(Error::ModeMismatch {
                    left: mode,
                    right: c.mode(),
                });
            }
            if k + l > trunc {
                continue;
            }
            let sum = &s.get(k, l) + &c;
            s.insert(k, l, sum);
        }
        Ok(s)
    }

    /// The monomial `u^k z^l` (with coefficient one).
    pub fn monomial(k: usize, l: usize, trunc: usize, mode: Mode) -> Self {
        let mut s = BiSeries::zero(trunc, mode);
        if k + l <= trunc {
            s.insert(k, l, CScalar::one(mode));
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Coefficient `a[k, l]`; zero outside the stored support.
    pub fn get(&self, k: usize, l: usize) -> CScalar {
        self.coeffs
            .get(&(k, l))
            .cloned()
            .unwrap_or_else(|| CScalar::zero(self.mode))
    }

    /// Derivative value at the origin, `k! l! a[k, l]`.
    pub fn derivative_at_origin(&self, k: usize, l: usize) -> CScalar {
        let scale: BigInt = factorial(k) * factorial(l);
        &self.get(k, l) * &CScalar::from_bigint(&scale, self.mode)
    }

    /// Nonzero coefficients in `(k, l)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &CScalar)> {
        self.coeffs.iter().map(|(&(k, l), c)| (k, l, c))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|&(k, l)| k + l).max()
    }

    fn insert(&mut self, k: usize, l: usize, c: CScalar) {
        debug_assert!(k + l <= self.trunc);
        if c.is_zero() {
            self.coeffs.remove(&(k, l));
        } else {
            self.coeffs.insert((k, l), c);
        }
    }

    fn check(&self, other: &BiSeries) -> Result<()> {
        if self.mode == other.mode {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                left: self.mode,
                right: other.mode,
            })
        }
    }

    pub fn truncate(&self, trunc: usize) -> BiSeries {
        let trunc = trunc.min(self.trunc);
        BiSeries {
            trunc,
            mode: self.mode,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(k, l), _)| k + l <= trunc)
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (k, l, c) in other.iter() {
            if k + l <= trunc {
                let sum = &out.get(k, l) + c;
                out.insert(k, l, sum);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> BiSeries {
        BiSeries {
            trunc: self.trunc,
            mode: self.mode,
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &BiSeries) -> Result<BiSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &CScalar) -> Result<BiSeries> {
        if s.mode() != self.mode {
            return Err(Error::ModeMismatch {
                left: self.mode,
                right: s.mode(),
            });
        }
        let mut out = BiSeries::zero(self.trunc, self.mode);
        for (k, l, c) in self.iter() {
            out.insert(k, l, c * s);
        }
        Ok(out)
    }

    /// Bivariate Cauchy product, truncated to the smaller truncation.
    pub fn mul(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut acc: BTreeMap<(usize, usize), CScalar> = BTreeMap::new();
        for (i, j, a) in self.iter() {
            if i + j > trunc {
                continue;
            }
            for (p, q, b) in other.iter() {
                let (k, l) = (i + p, j + q);
                if k + l > trunc {
                    continue;
                }
                let term = a * b;
                acc.entry((k, l))
                    .and_modify(|e| *e = &*e + &term)
                    .or_insert(term);
            }
        }
        let mut out = BiSeries::zero(trunc, self.mode);
        for ((k, l), c) in acc {
            out.insert(k, l, c);
        }
        Ok(out)
    }

    /// Formal partial derivative; the truncation drops by one.
    pub fn diff(&self, var: Var) -> BiSeries {
        let trunc = self.trunc.saturating_sub(1);
        let mut out = BiSeries::zero(trunc, self.mode);
        for (k, l, c) in self.iter() {
            match var {
                Var::U if k > 0 && k + l - 1 <= trunc => {
                    out.insert(k - 1, l, c.scale_int(k as i64));
                }
                Var::Z if l > 0 && k + l - 1 <= trunc => {
                    out.insert(k, l - 1, c.scale_int(l as i64));
                }
                _ => {}
            }
        }
        out
    }

    /// Multiplies by `u`; the valid truncation grows by one.
    pub fn shift_u(&self) -> BiSeries {
        BiSeries {
            trunc: self.trunc + 1,
            mode: self.mode,
            coeffs: self.coeffs.iter().map(|(&(k, l), c)| ((k + 1, l), c.clone())).collect(),
        }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, u: &CScalar, z: &CScalar) -> Result<CScalar> {
        for v in [u, z] {
            if v.mode() != self.mode {
                return Err(Error::ModeMismatch {
                    left: self.mode,
                    right: v.mode(),
                });
            }
        }
        let zero = CScalar::zero(self.mode);
        let mut acc = zero.clone();
        for k in (0..=self.trunc).rev() {
            let mut row = zero.clone();
            for l in (0..=self.trunc - k).rev() {
                row = &(&row * z) + &self.get(k, l);
            }
            acc = &(&acc * u) + &row;
        }
        Ok(acc)
    }

    /// Copy with every coefficient rounded to float mode.
    pub fn to_float(&self) -> BiSeries {
        BiSeries {
            trunc: self.trunc,
            mode: Mode::Float,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&i, c)| (i, CScalar::Float(c.to_complex64())))
                .collect(),
        }
    }

    pub fn to_json(&self) -> SeriesFile {
        SeriesFile {
            trunc: self.trunc,
            mode: self.mode,
            coeffs: self
                .iter()
                .map(|(k, l, c)| {
                    let (re, im) = c.to_strings();
                    (k, l, re, im)
                })
                .collect(),
        }
    }

    pub fn from_json(file: &SeriesFile) -> Result<BiSeries> {
        let mut s = BiSeries::zero(file.trunc, file.mode);
        for (k, l, re, im) in &file.coeffs {
            if k + l > file.trunc {
                return Err(Error::InvalidInput(format!(
                    "coefficient ({k}, {l}) exceeds truncation {}",
                    file.trunc
                )));
            }
            let c = CScalar::parse_pair(re, im, Some(file.mode))?;
            s.insert(*k, *l, c);
        }
        Ok(s)
    }
}

/// On-disk coefficient table:
/// `{"trunc": N, "mode": "exact"|"float", "coeffs": [[k, l, re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub trunc: usize,
    pub mode: Mode,
    pub coeffs: Vec<(usize, usize, String, String)>,
}
