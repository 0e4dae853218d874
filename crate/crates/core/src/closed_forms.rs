//! Explicit solution families: exact coefficient formulas and closed-form
//! evaluators. These serve as oracles for the generic solver.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, factorial, int, pow2, ratio, sign};
use crate::error::{Error, Result};
use crate::scalar::{infer_mode, parse_scalar_pair, CScalar, Mode, ScalarPair};
use crate::series::BiSeries;
use crate::solver::{BoundaryData, Exponent, Point3};

/// `f(k)` of the `q = 0` family, `3^(k-1) (2k-2)! / (2^(k-1) (k+1)! (k-1)!)`,
/// with `f(0) = -1`.
pub fn f_q0(k: usize) -> BigRational {
    if k == 0 {
        return -BigRational::one();
    }
    let num = BigInt::from(3).pow(k as u32 - 1) * factorial(2 * k - 2);
    let den = (BigInt::one() << (k - 1)) * factorial(k + 1) * factorial(k - 1);
    BigRational::new(num, den)
}

/// `f(k)` of the `q = 1` family, `(-1)^k (2k-2)! / (2^k k! (k-1)!)`, with
/// `f(0) = -1`.
pub fn f_q1(k: usize) -> BigRational {
    if k == 0 {
        return -BigRational::one();
    }
    let den = (BigInt::one() << k) * factorial(k) * factorial(k - 1);
    sign(k as i64) * BigRational::new(factorial(2 * k - 2), den)
}

fn one_param_coeff(c: &CScalar, k: usize, l: usize, f: BigRational) -> CScalar {
    let mode = c.mode();
    if k == 0 {
        return match l {
            0 => CScalar::one(mode),
            1 => c.clone(),
            _ => CScalar::zero(mode),
        };
    }
    let r = sign(l as i64 + 1) * int(binomial(l + 2 * k - 2, l)) * f;
    c.pow((l + 2 * k) as u32).scale_rational(&r)
}

/// `a[k, l]` of the `q = 0` solution with data `(1, c, 0, 0, ...)`.
pub fn coeff_q0(c: &CScalar, k: usize, l: usize) -> CScalar {
    one_param_coeff(c, k, l, if k == 0 { BigRational::zero() } else { f_q0(k) })
}

/// `a[k, l]` of the `q = 1` solution with data `(1, c, 0, 0, ...)`.
pub fn coeff_q1(c: &CScalar, k: usize, l: usize) -> CScalar {
    one_param_coeff(c, k, l, if k == 0 { BigRational::zero() } else { f_q1(k) })
}

/// Single-variable coefficients `(2k-2)! / ((k+1)! (k-1)!)` of the `q = 0`
/// solution resummed in `t = 3 c^2 u / (2 (1 + cz)^2)`.
fn q0_t_coefficient(k: usize) -> f64 {
    let r = BigRational::new(factorial(2 * k - 2), factorial(k + 1) * factorial(k - 1));
    crate::scalar::rational_to_f64(&r)
}

/// Below this ratio `|6 c^2 u| / |1 + cz|^2` the `q = 0` closed form is
/// replaced by its series to avoid the removable `0/0` at `u = 0`.
pub const Q0_SERIES_SWITCH: f64 = 1e-6;

/// Closed form of the `q = 0` solution,
/// `2/3 A - (A^2 - 6c^2 u)^(3/2) / (27 c^2 u) + A^3 / (27 c^2 u)`,
/// `A = 1 + cz`, principal branch. Agrees with the series where
/// `Re A > 0`.
///
/// With `R = A^2 - 6c^2 u`, `A^3 - R sqrt(R) = 6c^2 u (A^2 + A sqrt(R) + R) / (A + sqrt(R))`,
/// so the difference of the last two terms is evaluated without the
/// cancellation the printed form suffers near `u = 0`.
pub fn closed_q0(c: Complex64, u: Complex64, z: Complex64) -> Complex64 {
    let a = 1.0 + c * z;
    if (6.0 * c * c * u).norm() < Q0_SERIES_SWITCH * a.norm_sqr() {
        q0_near_axis(c, u, z)
    } else {
        q0_closed(c, u, z)
    }
}

fn q0_near_axis(c: Complex64, u: Complex64, z: Complex64) -> Complex64 {
    let a = 1.0 + c * z;
    let t = 1.5 * c * c * u / (a * a);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tk = Complex64::new(1.0, 0.0);
    for k in 1..=8 {
        tk *= t;
        sum += q0_t_coefficient(k) * tk;
    }
    a - 2.0 / 3.0 * a * sum
}

fn q0_closed(c: Complex64, u: Complex64, z: Complex64) -> Complex64 {
    let a = 1.0 + c * z;
    let radicand = a * a - 6.0 * c * c * u;
    let root = radicand.sqrt();
    2.0 / 3.0 * a + 2.0 / 9.0 * (a * a + a * root + radicand) / (a + root)
}

/// As [`closed_q0`], refusing inputs whose radicand crosses the branch cut
/// along the straight path from `u = 0`.
pub fn closed_q0_checked(c: Complex64, u: Complex64, z: Complex64) -> Result<Complex64> {
    let a = 1.0 + c * z;
    let start = a * a;
    check_path(start, start - 6.0 * c * c * u)?;
    Ok(closed_q0(c, u, z))
}

/// Closed form `1 + cz + sqrt(2 c^2 u + (1 + cz)^2)` of the `q = 1`
/// solution. This is twice the series with data `(1, c, 0, ...)`.
pub fn closed_q1(c: Complex64, u: Complex64, z: Complex64) -> Complex64 {
    let a = 1.0 + c * z;
    a + (2.0 * c * c * u + a * a).sqrt()
}

pub fn closed_q1_checked(c: Complex64, u: Complex64, z: Complex64) -> Result<Complex64> {
    let a = 1.0 + c * z;
    let start = a * a;
    check_path(start, start + 2.0 * c * c * u)?;
    Ok(closed_q1(c, u, z))
}

/// Errors if the segment `start -> end` meets the closed negative real axis.
fn check_path(start: Complex64, end: Complex64) -> Result<()> {
    let cut = |p: Complex64| Err(Error::BranchCut { re: p.re, im: p.im });
    let d = end - start;
    if d.im == 0.0 {
        if start.im == 0.0 && start.re.min(end.re) <= 0.0 {
            return cut(if start.re <= 0.0 { start } else { end });
        }
        return Ok(());
    }
    let s = -start.im / d.im;
    if (0.0..=1.0).contains(&s) {
        let p = start + s * d;
        if p.re <= 0.0 {
            return cut(p);
        }
    }
    Ok(())
}

/// Product-form solution `b e^(cz) e^(r) / (1 + r)`, `r = sqrt(1 - 2 c^2 u)`.
pub fn product_form_psi(b: Complex64, c: Complex64, u: Complex64, z: Complex64) -> Result<Complex64> {
    let radicand = 1.0 - 2.0 * c * c * u;
    if radicand.im == 0.0 && radicand.re < 0.0 {
        return Err(Error::BranchCut {
            re: radicand.re,
            im: radicand.im,
        });
    }
    let r = radicand.sqrt();
    Ok(b * (c * z).exp() * r.exp() / (1.0 + r))
}

/// The Hopf polynomial `1 - 2u - z^2 - 2iz`.
pub fn hopf_psi(u: &CScalar, z: &CScalar) -> Result<CScalar> {
    let mode = u.mode();
    let two = CScalar::from_int(2, mode);
    let two_i = CScalar::i(mode).scale_int(2);
    let zz = z.try_mul(z)?;
    let v = CScalar::one(mode) - &two * u - zz - two_i.try_mul(z)?;
    Ok(v)
}

pub fn hopf_series(trunc: usize, mode: Mode) -> BiSeries {
    BiSeries::from_terms(
        trunc,
        mode,
        [
            (0, 0, CScalar::one(mode)),
            (0, 1, CScalar::i(mode).scale_int(-2)),
            (0, 2, CScalar::from_int(-1, mode)),
            (1, 0, CScalar::from_int(-2, mode)),
        ],
    )
    .expect("uniform mode")
}

/// `psi[1, l] = (-1)^l / 2 * l! (a - b)(a^(l+1) - b^(l+1))`, `l >= 1`.
pub fn psi_1l(alpha: &CScalar, beta: &CScalar, l: usize) -> CScalar {
    let r = sign(l as i64) * ratio(factorial(l), 2);
    let diff = alpha - beta;
    (&diff * &(alpha.pow(l as u32 + 1) - beta.pow(l as u32 + 1))).scale_rational(&r)
}

/// `psi[2, l]` for `l >= 0`: `(-1)^(l+1)/2 * l! (a - b) B` with the bracket
/// `B = (l+1)(l+2)/2 (a^(l+3) - b^(l+3)) + sum_{r=0}^{l+1} (l+1-2r) a^(l+2-r) b^(r+1)`.
pub fn psi_2l(alpha: &CScalar, beta: &CScalar, l: usize) -> CScalar {
    let end = ratio((l + 1) * (l + 2), 2);
    let mut bracket = (alpha.pow(l as u32 + 3) - beta.pow(l as u32 + 3)).scale_rational(&end);
    for r in 0..=l + 1 {
        let w = l as i64 + 1 - 2 * r as i64;
        let term = &alpha.pow((l + 2 - r) as u32) * &beta.pow(r as u32 + 1);
        bracket = bracket + term.scale_int(w);
    }
    let pre = sign(l as i64 + 1) * ratio(factorial(l), 2);
    (&(alpha - beta) * &bracket).scale_rational(&pre)
}

/// Coefficients `b_j` of `Q_k = sum_{j=1}^{k-1} b_j a^(2k-2j-2) b^(2j-2)`,
/// `k >= 2`, in order `j = 1..k-1`.
pub fn q_poly_coefficients(k: usize) -> Vec<BigRational> {
    assert!(k >= 2, "Q_k is defined for k >= 2");
    let pre = BigRational::new(factorial(k - 2), BigInt::one() << (k - 2));
    (1..k)
        .map(|j| {
            let num = factorial(2 * j - 1) * factorial(2 * k - 2 * j - 1);
            let fj = factorial(j - 1);
            let fk = factorial(k - j - 1);
            &pre * BigRational::new(num, &fj * &fj * &fk * &fk)
        })
        .collect()
}

pub fn q_poly(alpha: &CScalar, beta: &CScalar, k: usize) -> CScalar {
    let mut acc = CScalar::zero(alpha.mode());
    for (idx, b) in q_poly_coefficients(k).iter().enumerate() {
        let j = idx + 1;
        let term = &alpha.pow((2 * k - 2 * j - 2) as u32) * &beta.pow((2 * j - 2) as u32);
        acc = acc + term.scale_rational(b);
    }
    acc
}

/// `a[k, 0]` of the two-parameter family.
pub fn a_k0(alpha: &CScalar, beta: &CScalar, k: usize) -> CScalar {
    let mode = alpha.mode();
    match k {
        0 => CScalar::one(mode),
        1 => (alpha + beta).pow(2).scale_rational(&ratio(1, 2)),
        _ => {
            let pre = sign(k as i64 + 1) / int(factorial(k) * 2);
            let s = &(alpha - beta).pow(2) * &(alpha + beta).pow(2);
            (&s * &q_poly(alpha, beta, k)).scale_rational(&pre)
        }
    }
}

/// `phi = (a^2 (x^2 + y^2) + (1 + a z)^2) / (x - iy)` of the equal-parameter
/// family.
pub fn equal_param_phi(alpha: Complex64, p: &Point3) -> Result<Complex64> {
    if p.on_axis() {
        return Err(Error::OnAxis { x: p.x, y: p.y, z: p.z });
    }
    let r2 = p.x * p.x + p.y * p.y;
    let w = 1.0 + alpha * p.z;
    Ok((alpha * alpha * r2 + w * w) / Complex64::new(p.x, -p.y))
}

/// One-parameter family: data `(1, c, 0, 0, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParamFamily {
    pub q: Exponent,
    pub c: CScalar,
}

impl OneParamFamily {
    pub fn new(q: Exponent, c: CScalar) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DegenerateData("c = 0".into()));
        }
        Ok(OneParamFamily { q, c })
    }

    pub fn boundary_data(&self) -> BoundaryData {
        BoundaryData::new(self.q, vec![CScalar::one(self.c.mode()), self.c.clone()]).expect("c != 0")
    }

    pub fn coeff(&self, k: usize, l: usize) -> CScalar {
        match self.q {
            Exponent::Q0 => coeff_q0(&self.c, k, l),
            Exponent::Q1 => coeff_q1(&self.c, k, l),
        }
    }

    pub fn series(&self, trunc: usize) -> BiSeries {
        let terms = (0..=trunc).flat_map(|k| (0..=trunc - k).map(move |l| (k, l)));
        BiSeries::from_terms(trunc, self.c.mode(), terms.map(|(k, l)| (k, l, self.coeff(k, l))))
            .expect("uniform mode")
    }
}

/// Two-parameter family of `q = 1` solutions: data `(1, a + b, 2ab, 0, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParamFamily {
    pub alpha: CScalar,
    pub beta: CScalar,
}

impl TwoParamFamily {
    pub fn new(alpha: CScalar, beta: CScalar) -> Result<Self> {
        let s = alpha.try_add(&beta)?;
        if s.is_zero() {
            return Err(Error::DegenerateData("alpha + beta = 0".into()));
        }
        Ok(TwoParamFamily { alpha, beta })
    }

    pub fn c1(&self) -> CScalar {
        &self.alpha + &self.beta
    }

    pub fn c2(&self) -> CScalar {
        (&self.alpha * &self.beta).scale_int(2)
    }

    pub fn boundary_data(&self) -> BoundaryData {
        let mode = self.alpha.mode();
        BoundaryData::new(Exponent::Q1, vec![CScalar::one(mode), self.c1(), self.c2()]).expect("alpha + beta != 0")
    }

    pub fn is_equal_param(&self) -> bool {
        self.alpha == self.beta
    }
}

/// Named solution family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Q0 { c: CScalar },
    Q1 { c: CScalar },
    TwoParam { alpha: CScalar, beta: CScalar },
    Hopf,
    Product { b: CScalar, c: CScalar },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Q0 { .. } => "q0",
            Family::Q1 { .. } => "q1",
            Family::TwoParam { .. } => "two_param",
            Family::Hopf => "hopf",
            Family::Product { .. } => "product",
        }
    }

    pub fn exponent(&self) -> Exponent {
        match self {
            Family::Q0 { .. } | Family::Product { .. } => Exponent::Q0,
            _ => Exponent::Q1,
        }
    }

    /// Boundary data in `mode`. The product family has infinitely many
    /// nonzero entries `b e c^l / 2`; `len` of them are produced, in float
    /// mode only.
    pub fn boundary_data(&self, mode: Mode, len: usize) -> Result<BoundaryData> {
        match self {
            Family::Q0 { c } => OneParamFamily::new(Exponent::Q0, c.to_mode(mode)?).map(|f| f.boundary_data()),
            Family::Q1 { c } => OneParamFamily::new(Exponent::Q1, c.to_mode(mode)?).map(|f| f.boundary_data()),
            Family::TwoParam { alpha, beta } => {
                TwoParamFamily::new(alpha.to_mode(mode)?, beta.to_mode(mode)?).map(|f| f.boundary_data())
            }
            Family::Hopf => BoundaryData::new(
                Exponent::Q1,
                vec![CScalar::one(mode), CScalar::i(mode).scale_int(-2), CScalar::from_int(-2, mode)],
            ),
            Family::Product { b, c } => {
                if mode == Mode::Exact {
                    return Err(Error::ModeMismatch {
                        left: Mode::Exact,
                        right: Mode::Float,
                    });
                }
                let b = b.to_complex64();
                let c = c.to_complex64();
                let base = b * std::f64::consts::E / 2.0;
                let data = (0..len.max(2))
                    .map(|l| CScalar::Float(base * c.powu(l as u32)))
                    .collect();
                BoundaryData::new(Exponent::Q0, data)
            }
        }
    }

    /// Closed-form `psi` normalized like the series (`psi(0,0)` equal to the
    /// first boundary datum). `None` for the two-parameter family with
    /// `alpha != beta`.
    pub fn closed_psi(&self, u: f64, z: f64) -> Option<Result<Complex64>> {
        let (uc, zc) = (Complex64::new(u, 0.0), Complex64::new(z, 0.0));
        match self {
            Family::Q0 { c } => Some(Ok(closed_q0(c.to_complex64(), uc, zc))),
            Family::Q1 { c } => Some(Ok(closed_q1(c.to_complex64(), uc, zc) / 2.0)),
            Family::TwoParam { alpha, beta } if alpha == beta => {
                let a = alpha.to_complex64();
                let w = 1.0 + a * z;
                Some(Ok(w * w + 2.0 * a * a * u))
            }
            Family::TwoParam { .. } => None,
            Family::Hopf => Some(Ok(Complex64::new(1.0 - 2.0 * u - z * z, -2.0 * z))),
            Family::Product { b, c } => Some(product_form_psi(b.to_complex64(), c.to_complex64(), uc, zc)),
        }
    }

    pub fn from_file(file: &FamilyFile) -> Result<Family> {
        let pairs: Vec<&ScalarPair> = [&file.c, &file.alpha, &file.beta, &file.b]
            .into_iter()
            .flatten()
            .collect();
        let mode = infer_mode(pairs);
        let get = |p: &Option<ScalarPair>, name: &str| -> Result<CScalar> {
            let p = p
                .as_ref()
                .ok_or_else(|| Error::InvalidInput(format!("family `{}` needs `{name}`", file.family)))?;
            parse_scalar_pair(p, Some(mode))
        };
        match file.family.as_str() {
            "q0" => Ok(Family::Q0 { c: get(&file.c, "c")? }),
            "q1" => Ok(Family::Q1 { c: get(&file.c, "c")? }),
            "two_param" => Ok(Family::TwoParam {
                alpha: get(&file.alpha, "alpha")?,
                beta: get(&file.beta, "beta")?,
            }),
            "hopf" => Ok(Family::Hopf),
            "product" => Ok(Family::Product {
                b: get(&file.b, "b")?,
                c: get(&file.c, "c")?,
            }),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// `{"family": "q0"|"q1"|"two_param"|"hopf"|"product", "c": [re, im], ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ScalarPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ScalarPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ScalarPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ScalarPair>,
}

/// `2^(k-3) k!`, the claimed coefficient sum of `Q_k`.
pub fn q_poly_coefficient_sum_claim(k: usize) -> BigRational {
    pow2(k as i64 - 3) * int(factorial(k))
}
