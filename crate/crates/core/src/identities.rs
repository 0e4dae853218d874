//! Exact verification of the coefficient identities behind the explicit
//! families. Each check evaluates both sides by brute-force summation over
//! big rationals and reports the first index where they differ.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::closed_forms::{f_q0, f_q1, q_poly_coefficient_sum_claim, q_poly_coefficients};
use crate::combin::{binomial, central_binomial, factorial, int, pow2, ratio};
use crate::error::{Error, Result};
use crate::scalar::{CScalar, Mode};
use crate::series::BiSeries;
use crate::solver::Exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub range: String,
    pub status: Status,
    pub first_failure: Option<Failure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None => write!(f, "{} [{}]: pass", self.name, self.range),
            Some(fail) => write!(
                f,
                "{} [{}]: FAIL at {:?}: lhs = {}, rhs = {}",
                self.name, self.range, fail.index, fail.lhs, fail.rhs
            ),
        }
    }
}

/// Accumulates comparisons and keeps the first mismatch. With `fault` set the
/// first left-hand side is shifted by one, which lets callers exercise the
/// failure path.
struct Checker {
    name: String,
    range: String,
    fault: bool,
    failure: Option<Failure>,
}

impl Checker {
    fn new(name: impl Into<String>, range: impl Into<String>, fault: bool) -> Self {
        Checker {
            name: name.into(),
            range: range.into(),
            fault,
            failure: None,
        }
    }

    fn compare(&mut self, index: Vec<usize>, lhs: CScalar, rhs: CScalar) {
        if self.failure.is_some() {
            return;
        }
        let lhs = if std::mem::take(&mut self.fault) {
            &lhs + &CScalar::one(lhs.mode())
        } else {
            lhs
        };
        if lhs != rhs {
            self.failure = Some(Failure {
                index,
                lhs: show(&lhs),
                rhs: show(&rhs),
            });
        }
    }

    fn compare_q(&mut self, index: Vec<usize>, lhs: BigRational, rhs: BigRational) {
        self.compare(
            index,
            CScalar::from_rational(&lhs, Mode::Exact),
            CScalar::from_rational(&rhs, Mode::Exact),
        );
    }

    fn finish(self) -> IdentityReport {
        IdentityReport {
            name: self.name,
            range: self.range,
            status: if self.failure.is_some() { Status::Fail } else { Status::Pass },
            first_failure: self.failure,
        }
    }
}

fn show(c: &CScalar) -> String {
    let (re, im) = c.to_strings();
    if im == "0/1" {
        re
    } else {
        format!("{re} + {im}i")
    }
}

fn require_exact(s: &BiSeries) -> Result<()> {
    if s.mode() != Mode::Exact {
        return Err(Error::ModeMismatch {
            left: Mode::Exact,
            right: s.mode(),
        });
    }
    Ok(())
}

fn bin(n: usize, k: usize) -> CScalar {
    CScalar::from_bigint(&binomial(n, k), Mode::Exact)
}

/// Left side of the derivative identity at `(k, l)` in terms of the origin
/// derivatives `psi[k, l]`. Zero for every admissible `(k, l)` exactly when
/// `psi` solves the equation for `q`.
pub fn derivative_identity_value(psi: &BiSeries, q: Exponent, k: usize, l: usize) -> Result<CScalar> {
    require_exact(psi)?;
    let d = |i: usize, j: usize| psi.derivative_at_origin(i, j);
    let s = q.sign();
    let mut acc = CScalar::zero(Mode::Exact);
    for j in 0..=l {
        for i in 0..=k {
            let w = k as i64 - i as i64 + s;
            if w == 0 {
                continue;
            }
            let term = &(&bin(l, j) * &bin(k, i)) * &(&d(k - i, l - j) * &d(i + 1, j));
            acc = &acc + &term.scale_int(w);
        }
    }
    if k >= 1 {
        for j in 0..=l {
            for i in 0..k {
                let term = &(&bin(l, j) * &bin(k - 1, i)) * &(&d(k - i - 1, l - j + 1) * &d(i + 1, j + 1));
                acc = &acc + &term;
            }
        }
    }
    Ok(acc)
}

/// The derivative identity for `1 <= k <= kmax`, `0 <= l <= lmax`, restricted
/// to `k + l + 1 <= trunc` so that every derivative involved is known.
pub fn check_derivative_identity(psi: &BiSeries, q: Exponent, kmax: usize, lmax: usize) -> Result<IdentityReport> {
    derivative_identity_with(psi, q, kmax, lmax, false)
}

fn derivative_identity_with(psi: &BiSeries, q: Exponent, kmax: usize, lmax: usize, fault: bool) -> Result<IdentityReport> {
    require_exact(psi)?;
    let mut ch = Checker::new(
        format!("derivative_identity_q{}", q.q()),
        format!("1<=k<={kmax}, 0<=l<={lmax}, k+l<trunc={}", psi.trunc()),
        fault,
    );
    let zero = CScalar::zero(Mode::Exact);
    for k in 1..=kmax {
        for l in 0..=lmax {
            if k + l + 1 > psi.trunc() {
                continue;
            }
            ch.compare(vec![k, l], derivative_identity_value(psi, q, k, l)?, zero.clone());
        }
    }
    Ok(ch.finish())
}

/// Derivative of a product at the origin: series product versus the
/// double-binomial sum.
pub fn check_leibniz(k: usize, l: usize, f: &BiSeries, g: &BiSeries) -> Result<IdentityReport> {
    leibniz_with(&[(k, l)], f, g, format!("k={k}, l={l}"), false)
}

/// [`check_leibniz`] over every `(k, l)` with `k + l <= min(trunc)`.
pub fn check_leibniz_all(f: &BiSeries, g: &BiSeries) -> Result<IdentityReport> {
    let n = f.trunc().min(g.trunc());
    let idx: Vec<_> = (0..=n).flat_map(|k| (0..=n - k).map(move |l| (k, l))).collect();
    leibniz_with(&idx, f, g, format!("k+l<={n}"), false)
}

fn leibniz_with(
    idx: &[(usize, usize)],
    f: &BiSeries,
    g: &BiSeries,
    range: String,
    fault: bool,
) -> Result<IdentityReport> {
    require_exact(f)?;
    require_exact(g)?;
    let fg = f.mul(g)?;
    let mut ch = Checker::new("leibniz", range, fault);
    for &(k, l) in idx {
        if k + l > fg.trunc() {
            return Err(Error::InvalidInput(format!(
                "derivative order {} exceeds truncation {}",
                k + l,
                fg.trunc()
            )));
        }
        let mut rhs = CScalar::zero(Mode::Exact);
        for i in 0..=k {
            for j in 0..=l {
                let t = &f.derivative_at_origin(k - i, l - j) * &g.derivative_at_origin(i, j);
                rhs = &rhs + &(&(&bin(k, i) * &bin(l, j)) * &t);
            }
        }
        ch.compare(vec![k, l], fg.derivative_at_origin(k, l), rhs);
    }
    Ok(ch.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rec {
    /// `q = 0` recurrence, satisfied by [`f_q0`].
    Q0,
    /// `q = 1` recurrence, satisfied by [`f_q1`].
    Q1,
}

/// Right side of the `f` recurrence at `k` for an arbitrary sequence.
pub fn rec_rhs(which: Rec, f: &[BigRational], k: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for m in 0..=k {
        let first = match which {
            Rec::Q0 => int((m as i64 + 2) * (k - m) as i64),
            Rec::Q1 => int((m * (k - m)) as i64),
        };
        let second = ratio((2 * m as i64 - 1) * (2 * (k - m) as i64 - 1), 2);
        acc += first * &f[m + 1] * &f[k - m] + second * &f[m] * &f[k - m];
    }
    match which {
        Rec::Q0 => acc,
        Rec::Q1 => -acc,
    }
}

/// `(k+1) f(k+1)` against the recurrence right side for `1 <= k <= kmax`.
pub fn check_rec(which: Rec, kmax: usize) -> IdentityReport {
    rec_with(which, kmax, false)
}

fn rec_with(which: Rec, kmax: usize, fault: bool) -> IdentityReport {
    let (name, f): (_, fn(usize) -> BigRational) = match which {
        Rec::Q0 => ("f_q0_recurrence", f_q0),
        Rec::Q1 => ("f_q1_recurrence", f_q1),
    };
    let seq: Vec<BigRational> = (0..=kmax + 1).map(f).collect();
    let mut ch = Checker::new(name, format!("1<=k<={kmax}"), fault);
    for k in 1..=kmax {
        let lhs = int(k as i64 + 1) * &seq[k + 1];
        ch.compare_q(vec![k], lhs, rec_rhs(which, &seq, k));
    }
    ch.finish()
}

/// The reduced `q = 0` recurrence for `2 <= k <= kmax`.
pub fn check_reduced_rec(kmax: usize) -> IdentityReport {
    reduced_rec_with(kmax, false)
}

fn reduced_rec_with(kmax: usize, fault: bool) -> IdentityReport {
    let f: Vec<BigRational> = (0..=kmax + 1).map(f_q0).collect();
    let mut ch = Checker::new("f_q0_reduced_recurrence", format!("2<=k<={kmax}"), fault);
    for k in 2..=kmax {
        let lhs = int(k as i64 + 1) * &f[k + 1] - int(3 * k as i64 - 1) * &f[k];
        let mut rhs = BigRational::zero();
        for m in 1..k {
            rhs += int((m as i64 + 2) * (8 * (k - m) as i64 - 1)) * &f[m + 1] * &f[k - m];
        }
        ch.compare_q(vec![k], lhs, rhs * ratio(1, 6));
    }
    ch.finish()
}

/// The ratio characterization `f(k+1) = 3(2k-1) f(k) / (k+2)`, `f(1) = 1/2`.
pub fn check_f_q0_ratio(kmax: usize) -> IdentityReport {
    let mut ch = Checker::new("f_q0_ratio", format!("1<=k<={kmax}"), false);
    ch.compare_q(vec![1], f_q0(1), ratio(1, 2));
    for k in 1..=kmax {
        let rhs = f_q0(k) * ratio(3 * (2 * k as i64 - 1), k as i64 + 2);
        ch.compare_q(vec![k + 1], f_q0(k + 1), rhs);
    }
    ch.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbConvolution {
    Two,
    Three,
}

fn cb(n: usize) -> BigRational {
    BigRational::from_integer(central_binomial(n))
}

/// Brute-force left side of the convolution identity at `k`.
pub fn cb_convolution_lhs(which: CbConvolution, k: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for m in 1..k {
        let num = cb(m) * cb(k - m - 1);
        let den = match which {
            CbConvolution::Two => (m + 1) * (k - m + 1),
            CbConvolution::Three => (m + 1) * (k - m) * (k - m + 1),
        };
        acc += num / int(den as i64);
    }
    acc
}

/// Closed right side of the convolution identity at `k`.
pub fn cb_convolution_rhs(which: CbConvolution, k: usize) -> BigRational {
    let k_ = k as i64;
    match which {
        CbConvolution::Two => {
            ratio(1, 12 * (k_ + 2)) * cb(k + 1) + ratio(1, 2 * (k_ + 2)) * cb(k) - ratio(1, k_ + 1) * cb(k - 1)
        }
        CbConvolution::Three => {
            let a = ratio(-(k_ - 1), (k_ + 2) * (2 * k_ + 1)) * cb(k + 1);
            let b = ratio(6 * (k_ - 1), (k_ + 1) * (2 * k_ - 1)) * cb(k);
            (a + b) * ratio(1, 6)
        }
    }
}

pub fn check_cb_convolution(which: CbConvolution, kmax: usize) -> IdentityReport {
    cb_convolution_with(which, kmax, false)
}

fn cb_convolution_with(which: CbConvolution, kmax: usize, fault: bool) -> IdentityReport {
    let name = match which {
        CbConvolution::Two => "cb_convolution_2",
        CbConvolution::Three => "cb_convolution_3",
    };
    let mut ch = Checker::new(name, format!("2<=k<={kmax}"), fault);
    for k in 2..=kmax {
        ch.compare_q(vec![k], cb_convolution_lhs(which, k), cb_convolution_rhs(which, k));
    }
    ch.finish()
}

/// `S_k = sum_{j=1}^{k-1} (2j-1)!(2k-2j-1)! / ((j-1)!^2 (k-j-1)!^2)` by
/// direct summation.
pub fn s_k(k: usize) -> BigInt {
    (1..k)
        .map(|j| {
            let fj = factorial(j - 1);
            let fk = factorial(k - j - 1);
            factorial(2 * j - 1) * factorial(2 * k - 2 * j - 1) / (&fj * &fj * &fk * &fk)
        })
        .sum()
}

/// `S_k = 2^(2k-5) k (k-1)` for `2 <= k <= kmax`.
pub fn check_s_k(kmax: usize) -> IdentityReport {
    s_k_with(kmax, false)
}

fn s_k_with(kmax: usize, fault: bool) -> IdentityReport {
    let mut ch = Checker::new("s_k", format!("2<=k<={kmax}"), fault);
    for k in 2..=kmax {
        let claim = pow2(2 * k as i64 - 5) * int((k * (k - 1)) as i64);
        ch.compare_q(vec![k], BigRational::from_integer(s_k(k)), claim);
    }
    ch.finish()
}

/// Coefficient sum of `Q_k` against `2^(k-3) k!` for `2 <= k <= kmax`.
pub fn check_q_sum(kmax: usize) -> IdentityReport {
    q_sum_with(kmax, false)
}

fn q_sum_with(kmax: usize, fault: bool) -> IdentityReport {
    let mut ch = Checker::new("q_coefficient_sum", format!("2<=k<={kmax}"), fault);
    for k in 2..=kmax {
        let sum: BigRational = q_poly_coefficients(k).into_iter().sum();
        ch.compare_q(vec![k], sum, q_poly_coefficient_sum_claim(k));
    }
    ch.finish()
}

/// Coefficient of `t^n` in `(1 - t)^(-r)`: `r (r+1) ... (r+n-1) / n!`.
pub fn newton_coeff(r: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..n {
        acc *= r + int(i as i64);
    }
    acc / BigRational::from_integer(factorial(n))
}

/// Coefficients `0..=n` of `(1 - t)^(-r)` for integer `r >= 0` by repeated
/// convolution with the geometric series.
fn geometric_power(r: usize, n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n + 1];
    c[0] = BigInt::one();
    for _ in 0..r {
        // multiplying by 1/(1-t) is a running sum
        for i in 1..=n {
            let prev = c[i - 1].clone();
            c[i] += prev;
        }
    }
    c
}

/// Newton's binomial coefficients against independent expansions:
/// integer powers by convolution (including the `C(l+2k-2, 2k-2)` resummation
/// and the `(1-4t)^(-3)` coefficient `2^(2m-1)(m+2)(m+1)`), and the
/// half-integer case against central binomials whose self-convolution is
/// `4^k`.
pub fn check_newton(nmax: usize) -> IdentityReport {
    newton_with(nmax, false)
}

fn newton_with(nmax: usize, fault: bool) -> IdentityReport {
    let mut ch = Checker::new("newton", format!("0<=n<={nmax}"), fault);
    for r in 0..=6usize {
        let conv = geometric_power(r, nmax);
        for (n, c) in conv.iter().enumerate() {
            ch.compare_q(vec![r, n], newton_coeff(&int(r as i64), n), BigRational::from_integer(c.clone()));
        }
    }
    for k in 1..=6usize {
        for l in 0..=nmax {
            let lhs = newton_coeff(&int(2 * k as i64 - 1), l);
            ch.compare_q(vec![k, l], lhs, BigRational::from_integer(binomial(l + 2 * k - 2, 2 * k - 2)));
        }
    }
    for m in 1..=nmax {
        let lhs = newton_coeff(&int(3), m) * pow2(2 * m as i64);
        ch.compare_q(vec![m], lhs, pow2(2 * m as i64 - 1) * int(((m + 2) * (m + 1)) as i64));
    }
    for k in 0..=nmax {
        let conv: BigInt = (0..=k).map(|i| central_binomial(i) * central_binomial(k - i)).sum();
        ch.compare_q(vec![k], BigRational::from_integer(conv), pow2(2 * k as i64));
        let lhs = newton_coeff(&ratio(1, 2), k) * pow2(2 * k as i64);
        ch.compare_q(vec![k], lhs, cb(k));
    }
    ch.finish()
}

/// Ranges for [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub kmax_rec: usize,
    pub kmax_conv: usize,
    pub kmax_s: usize,
    pub kmax_q: usize,
    pub nmax_newton: usize,
    pub order_derivative: usize,
    /// Test hook: name of a check whose first comparison is perturbed.
    pub inject_fault: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            kmax_rec: 30,
            kmax_conv: 40,
            kmax_s: 50,
            kmax_q: 20,
            nmax_newton: 20,
            order_derivative: 10,
            inject_fault: None,
        }
    }
}

impl SuiteConfig {
    /// Every range set to `kmax`, except the derivative identity order.
    pub fn uniform(kmax: usize) -> Self {
        SuiteConfig {
            kmax_rec: kmax,
            kmax_conv: kmax,
            kmax_s: kmax,
            kmax_q: kmax,
            nmax_newton: kmax,
            ..SuiteConfig::default()
        }
    }
}

/// Names accepted by [`SuiteConfig::inject_fault`].
pub const CHECK_NAMES: &[&str] = &[
    "f_q0_recurrence",
    "f_q1_recurrence",
    "f_q0_reduced_recurrence",
    "cb_convolution_2",
    "cb_convolution_3",
    "s_k",
    "q_coefficient_sum",
    "newton",
    "leibniz",
    "derivative_identity_q0",
    "derivative_identity_q1",
];

/// Runs every identity. The derivative identity is applied to the solved
/// one-parameter series (`c = 1`) and the Hopf series in both equations.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>> {
    if let Some(name) = &cfg.inject_fault {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::InvalidInput(format!("unknown check {name:?}")));
        }
    }
    let fault = |n: &str| cfg.inject_fault.as_deref() == Some(n);
    let mut out = vec![
        rec_with(Rec::Q0, cfg.kmax_rec, fault("f_q0_recurrence")),
        rec_with(Rec::Q1, cfg.kmax_rec, fault("f_q1_recurrence")),
        reduced_rec_with(cfg.kmax_rec, fault("f_q0_reduced_recurrence")),
        cb_convolution_with(CbConvolution::Two, cfg.kmax_conv, fault("cb_convolution_2")),
        cb_convolution_with(CbConvolution::Three, cfg.kmax_conv, fault("cb_convolution_3")),
        s_k_with(cfg.kmax_s, fault("s_k")),
        q_sum_with(cfg.kmax_q, fault("q_coefficient_sum")),
        newton_with(cfg.nmax_newton, fault("newton")),
    ];

    let poly = |terms: &[(usize, usize, i64)]| {
        BiSeries::from_terms(
            4,
            Mode::Exact,
            terms.iter().map(|&(k, l, c)| (k, l, CScalar::from_int(c, Mode::Exact))),
        )
    };
    let f = poly(&[(0, 0, 2), (1, 0, -1), (0, 1, 3), (2, 1, 5), (1, 3, -2), (0, 4, 1)])?;
    let g = poly(&[(0, 0, 1), (1, 1, 4), (3, 0, -3), (0, 2, 7), (2, 2, 1)])?;
    out.push(leibniz_with(
        &(0..=4).flat_map(|k| (0..=4 - k).map(move |l| (k, l))).collect::<Vec<_>>(),
        &f,
        &g,
        "k+l<=4".into(),
        fault("leibniz"),
    )?);

    let n = cfg.order_derivative;
    for q in [Exponent::Q0, Exponent::Q1] {
        let one = CScalar::one(Mode::Exact);
        let bd = crate::solver::BoundaryData::new(q, vec![one.clone(), one])?;
        let psi = crate::solver::solve(&bd, n)?;
        let name = format!("derivative_identity_q{}", q.q());
        let mut report = derivative_identity_with(&psi, q, n, n, fault(&name))?;
        if report.passed() && q == Exponent::Q1 {
            report = derivative_identity_with(&crate::closed_forms::hopf_series(n, Mode::Exact), q, n, n, false)?;
            report.name = name;
        }
        out.push(report);
    }
    Ok(out)
}
