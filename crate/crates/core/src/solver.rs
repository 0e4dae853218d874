//! Order-by-order construction of `psi` from its Taylor data on `u = 0`,
//! and evaluation of the resulting map
//! `phi(x, y, z) = (x + iy) u^(-q) psi(u, z)`.
//!
//! `psi` must satisfy
//!
//! ```text
//!     s psi psi_u + u psi_u^2 + 1/2 psi_z^2 = 0,   s = +1 (q = 0), -1 (q = 1).
//! ```
//!
//! The coefficient of `u^k z^l` in the left side contains exactly two
//! coefficients of total degree `k + l + 1`:
//! `s (k+1) a[0,0] a[k+1,l] + (l+1) a[0,1] a[k,l+1]`. Sweeping `k = 0..=n`
//! inside each order `n` therefore determines every `a[k+1, n-k]` from
//! `a[0, n+1]` (the data) and coefficients already known.

use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{infer_mode, parse_scalar_pair, scalar_pair, CScalar, Mode, ScalarPair};
use crate::series::{BiSeries, Var};

/// The exponent `q` of the ansatz; only `q = 0` and `q = 1` admit
/// solutions with `psi(0, 0) != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Q0,
    Q1,
}

impl Exponent {
    pub fn from_q(q: u64) -> Result<Self> {
        match q {
            0 => Ok(Exponent::Q0),
            1 => Ok(Exponent::Q1),
            other => Err(Error::InvalidInput(format!("q must be 0 or 1, got {other}"))),
        }
    }

    pub fn q(self) -> u64 {
        match self {
            Exponent::Q0 => 0,
            Exponent::Q1 => 1,
        }
    }

    /// Sign in front of `psi psi_u` in the governing equation.
    pub fn sign(self) -> i64 {
        match self {
            Exponent::Q0 => 1,
            Exponent::Q1 => -1,
        }
    }
}

/// Taylor data `psi[0, l] = d^l psi / dz^l (0, 0)`. Entries past the end of
/// the supplied sequence are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    q: Exponent,
    data: Vec<CScalar>,
}

impl BoundaryData {
    pub fn new(q: Exponent, data: Vec<CScalar>) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::DegenerateData(
                "need at least psi[0,0] and psi[0,1]".into(),
            ));
        }
        let mode = data[0].mode();
        if let Some(bad) = data.iter().find(|c| c.mode() != mode) {
            return Err(Error::ModeMismatch {
                left: mode,
                right: bad.mode(),
            });
        }
        if data[0].is_zero() {
            return Err(Error::DegenerateData("psi[0,0] = 0".into()));
        }
        if data[1].is_zero() {
            return Err(Error::DegenerateData("psi[0,1] = 0".into()));
        }
        Ok(BoundaryData { q, data })
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn mode(&self) -> Mode {
        self.data[0].mode()
    }

    pub fn data(&self) -> &[CScalar] {
        &self.data
    }

    /// `psi[0, l]`, zero beyond the supplied data.
    pub fn value(&self, l: usize) -> CScalar {
        self.data
            .get(l)
            .cloned()
            .unwrap_or_else(|| CScalar::zero(self.mode()))
    }

    pub fn scaled(&self, lambda: &CScalar) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|c| c.try_mul(lambda))
            .collect::<Result<Vec<_>>>()?;
        BoundaryData::new(self.q, data)
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|c| c.to_mode(mode))
            .collect::<Result<Vec<_>>>()?;
        BoundaryData::new(self.q, data)
    }

    pub fn to_file(&self, order: usize) -> BoundaryFile {
        BoundaryFile {
            q: self.q.q(),
            order,
            data: self.data.iter().map(scalar_pair).collect(),
        }
    }
}

/// `{"q": 0, "order": N, "data": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFile {
    pub q: u64,
    pub order: usize,
    pub data: Vec<ScalarPair>,
}

impl BoundaryFile {
    /// Parses the data; `mode` forces an encoding, otherwise the file is
    /// exact unless some entry is written as a decimal.
    pub fn boundary_data(&self, mode: Option<Mode>) -> Result<BoundaryData> {
        let q = Exponent::from_q(self.q)?;
        let mode = Some(mode.unwrap_or_else(|| infer_mode(&self.data)));
        let data = self
            .data
            .iter()
            .map(|p| parse_scalar_pair(p, mode))
            .collect::<Result<Vec<_>>>()?;
        BoundaryData::new(q, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Float-mode pivots smaller than this in magnitude abort the solve.
    pub pivot_threshold: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pivot_threshold: 1e-300,
        }
    }
}

/// Solves for every `a[k, l]` with `k + l <= order`.
pub fn solve(bd: &BoundaryData, order: usize) -> Result<BiSeries> {
    solve_with(bd, order, &SolveOptions::default())
}

pub fn solve_with(bd: &BoundaryData, order: usize, opts: &SolveOptions) -> Result<BiSeries> {
    let mode = bd.mode();
    let zero = CScalar::zero(mode);
    let sign = bd.q().sign();

    // dense triangle a[k][l], k + l <= order
    let mut a: Vec<Vec<CScalar>> = (0..=order).map(|k| vec![zero.clone(); order - k + 1]).collect();
    let mut fact = CScalar::one(mode);
    for (l, slot) in a[0].iter_mut().enumerate() {
        if l > 0 {
            fact = fact.scale_int(l as i64);
        }
        *slot = &bd.value(l) / &fact;
    }

    let a00 = a[0][0].clone();
    for n in 0..order {
        for k in 0..=n {
            let l = n - k;
            let pivot = a00.scale_int(sign * (k as i64 + 1));
            if mode == Mode::Float && pivot.abs() < opts.pivot_threshold {
                return Err(Error::PivotVanished {
                    k: k + 1,
                    l,
                    magnitude: pivot.abs(),
                    threshold: opts.pivot_threshold,
                });
            }
            // a[k+1][l] is still zero here, so this is everything else
            let rest = residual_coefficient(&a, sign, k, l, &zero);
            a[k + 1][l] = -(&rest / &pivot);
        }
    }

    let terms = a
        .into_iter()
        .enumerate()
        .flat_map(|(k, row)| row.into_iter().enumerate().map(move |(l, c)| (k, l, c)));
    BiSeries::from_terms(order, mode, terms)
}

/// Coefficient of `u^k z^l` in `s psi psi_u + u psi_u^2 + 1/2 psi_z^2` from
/// a dense coefficient triangle.
fn residual_coefficient(a: &[Vec<CScalar>], sign: i64, k: usize, l: usize, zero: &CScalar) -> CScalar {
    let get = |i: usize, j: usize| -> Option<&CScalar> {
        a.get(i).and_then(|row| row.get(j)).filter(|c| !c.is_zero())
    };

    // psi psi_u: sum a[k-i][l-j] (i+1) a[i+1][j]
    let mut psi_psi_u = zero.clone();
    for i in 0..=k {
        for j in 0..=l {
            if let (Some(x), Some(y)) = (get(k - i, l - j), get(i + 1, j)) {
                psi_psi_u = &psi_psi_u + &(x * y).scale_int(i as i64 + 1);
            }
        }
    }

    // u psi_u^2: coefficient (k-1, l) of psi_u^2
    let mut u_psi_u_sq = zero.clone();
    if k >= 1 {
        let kk = k - 1;
        for i in 0..=kk {
            for j in 0..=l {
                if let (Some(x), Some(y)) = (get(i + 1, j), get(kk - i + 1, l - j)) {
                    u_psi_u_sq = &u_psi_u_sq + &(x * y).scale_int((i as i64 + 1) * ((kk - i) as i64 + 1));
                }
            }
        }
    }

    // psi_z^2 (halved below)
    let mut psi_z_sq = zero.clone();
    for i in 0..=k {
        for j in 0..=l {
            if let (Some(x), Some(y)) = (get(i, j + 1), get(k - i, l - j + 1)) {
                psi_z_sq = &psi_z_sq + &(x * y).scale_int((j as i64 + 1) * ((l - j) as i64 + 1));
            }
        }
    }

    let two = CScalar::from_int(2, zero.mode());
    &(&psi_psi_u.scale_int(sign) + &u_psi_u_sq) + &(&psi_z_sq / &two)
}

/// `s psi psi_u + u psi_u^2 + 1/2 psi_z^2`, valid to total degree
/// `trunc - 1`.
pub fn residual(psi: &BiSeries, q: Exponent) -> Result<BiSeries> {
    if psi.trunc() < 2 {
        return Err(Error::InvalidInput("residual needs trunc >= 2".into()));
    }
    let mode = psi.mode();
    let psi_u = psi.diff(Var::U);
    let psi_z = psi.diff(Var::Z);
    let first = psi.mul(&psi_u)?.scale(&CScalar::from_int(q.sign(), mode))?;
    let second = psi_u.mul(&psi_u)?.shift_u();
    let half = CScalar::one(mode) / CScalar::from_int(2, mode);
    let third = psi_z.mul(&psi_z)?.scale(&half)?;
    Ok(first.add(&second)?.add(&third)?.truncate(psi.trunc() - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    /// `u = (x^2 + y^2) / 2`.
    pub fn u(&self) -> f64 {
        0.5 * (self.x * self.x + self.y * self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn on_axis(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn sub(&self, o: &Point3) -> [f64; 3] {
        [self.x - o.x, self.y - o.y, self.z - o.z]
    }

    pub fn dist(&self, o: &Point3) -> f64 {
        let d = self.sub(o);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// Reads a CSV point grid with header `x,y,z`.
pub fn read_points_csv(reader: impl Read) -> Result<Vec<Point3>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if headers != ["x", "y", "z"] {
        return Err(Error::Parse(format!("expected header x,y,z, found {}", headers.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize::<Point3>() {
        let p = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite point {p:?}")));
        }
        out.push(p);
    }
    Ok(out)
}

/// Box in `(u, z)` inside which the truncated series is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub u_max: f64,
    pub z_max: f64,
}

impl Region {
    pub fn contains(&self, u: f64, z: f64) -> bool {
        u <= self.u_max && z.abs() <= self.z_max
    }
}

/// Result of the semi-conformality check at one point.
///
/// `analytic` is `|phi_x^2 + phi_y^2 + phi_z^2|` from series derivatives;
/// `gap` and `gap_half_step` are the distances between that complex value
/// and its central-difference estimates at steps `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiConformality {
    pub analytic: f64,
    pub finite_difference: f64,
    pub gap: f64,
    pub gap_half_step: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
struct FloatDerivatives {
    psi: BiSeries,
    psi_u: BiSeries,
    psi_z: BiSeries,
    psi_uu: BiSeries,
    psi_zz: BiSeries,
}

/// The map `phi = (x + iy) u^(-q) psi(u, z)`.
#[derive(Debug, Clone)]
pub struct AnsatzMap {
    q: Exponent,
    psi: BiSeries,
    float: FloatDerivatives,
    region: Option<Region>,
    fd_step: f64,
}

impl AnsatzMap {
    pub fn new(q: Exponent, psi: BiSeries) -> Self {
        let f = psi.to_float();
        let psi_u = f.diff(Var::U);
        let psi_z = f.diff(Var::Z);
        let float = FloatDerivatives {
            psi_uu: psi_u.diff(Var::U),
            psi_zz: psi_z.diff(Var::Z),
            psi: f,
            psi_u,
            psi_z,
        };
        AnsatzMap {
            q,
            psi,
            float,
            region: None,
            fd_step: 1e-5,
        }
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn psi(&self) -> &BiSeries {
        &self.psi
    }

    fn check_point(&self, p: &Point3, need_region: bool) -> Result<()> {
        if self.q == Exponent::Q1 && p.on_axis() {
            return Err(Error::OnAxis { x: p.x, y: p.y, z: p.z });
        }
        if need_region {
            if let Some(r) = &self.region {
                if !r.contains(p.u(), p.z) {
                    return Err(Error::OutOfDomain { u: p.u(), z: p.z });
                }
            }
        }
        Ok(())
    }

    fn eval_series(s: &BiSeries, u: f64, z: f64) -> Complex64 {
        s.eval(&CScalar::float(u, 0.0), &CScalar::float(z, 0.0))
            .expect("float series evaluated at float point")
            .to_complex64()
    }

    fn phi_unchecked(&self, p: &Point3) -> Complex64 {
        let u = p.u();
        let w = Complex64::new(p.x, p.y);
        let psi = Self::eval_series(&self.float.psi, u, p.z);
        match self.q {
            Exponent::Q0 => w * psi,
            Exponent::Q1 => w * psi / u,
        }
    }

    pub fn eval_phi(&self, p: &Point3) -> Result<Complex64> {
        self.check_point(p, false)?;
        Ok(self.phi_unchecked(p))
    }

    /// `phi_x^2 + phi_y^2 + phi_z^2` from series derivatives:
    /// `2 (x+iy)^2 u^(-2q) {(1-2q) psi psi_u + u psi_u^2 + 1/2 psi_z^2}`.
    pub fn gradient_square(&self, p: &Point3) -> Result<Complex64> {
        self.check_point(p, true)?;
        let (u, z) = (p.u(), p.z);
        let psi = Self::eval_series(&self.float.psi, u, z);
        let psi_u = Self::eval_series(&self.float.psi_u, u, z);
        let psi_z = Self::eval_series(&self.float.psi_z, u, z);
        let w = Complex64::new(p.x, p.y);
        let s = (1.0 - 2.0 * self.q.q() as f64) * psi * psi_u + u * psi_u * psi_u + 0.5 * psi_z * psi_z;
        let scale = match self.q {
            Exponent::Q0 => 1.0,
            Exponent::Q1 => 1.0 / (u * u),
        };
        Ok(2.0 * w * w * scale * s)
    }

    fn gradient_square_fd(&self, p: &Point3, h: f64) -> Complex64 {
        let d = |dx: f64, dy: f64, dz: f64| {
            let plus = self.phi_unchecked(&Point3::new(p.x + dx, p.y + dy, p.z + dz));
            let minus = self.phi_unchecked(&Point3::new(p.x - dx, p.y - dy, p.z - dz));
            (plus - minus) / (2.0 * h)
        };
        let (px, py, pz) = (d(h, 0.0, 0.0), d(0.0, h, 0.0), d(0.0, 0.0, h));
        px * px + py * py + pz * pz
    }

    pub fn semiconformality_residual(&self, p: &Point3) -> Result<SemiConformality> {
        let analytic = self.gradient_square(p)?;
        let h = self.fd_step;
        let fd = self.gradient_square_fd(p, h);
        let fd_half = self.gradient_square_fd(p, h / 2.0);
        Ok(SemiConformality {
            analytic: analytic.norm(),
            finite_difference: fd.norm(),
            gap: (analytic - fd).norm(),
            gap_half_step: (analytic - fd_half).norm(),
            step: h,
        })
    }

    /// `|q(q-1) psi - 2(q-1) u psi_u + u^2 psi_uu + 1/2 u psi_zz|`; zero
    /// exactly when `phi` is harmonic.
    pub fn harmonicity_residual(&self, p: &Point3) -> Result<f64> {
        self.check_point(p, true)?;
        let (u, z) = (p.u(), p.z);
        let q = self.q.q() as f64;
        let psi = Self::eval_series(&self.float.psi, u, z);
        let psi_u = Self::eval_series(&self.float.psi_u, u, z);
        let psi_uu = Self::eval_series(&self.float.psi_uu, u, z);
        let psi_zz = Self::eval_series(&self.float.psi_zz, u, z);
        let v = q * (q - 1.0) * psi - 2.0 * (q - 1.0) * u * psi_u + u * u * psi_uu + 0.5 * u * psi_zz;
        Ok(v.norm())
    }
}

/// Governing-equation residual `s psi psi_u + u psi_u^2 + 1/2 psi_z^2` of an
/// arbitrary function of `(u, z)`, with derivatives by central differences
/// of step `h`.
pub fn pde_residual_fd(f: impl Fn(f64, f64) -> Complex64, q: Exponent, u: f64, z: f64, h: f64) -> Complex64 {
    let psi = f(u, z);
    let psi_u = (f(u + h, z) - f(u - h, z)) / (2.0 * h);
    let psi_z = (f(u, z + h) - f(u, z - h)) / (2.0 * h);
    q.sign() as f64 * psi * psi_u + u * psi_u * psi_u + 0.5 * psi_z * psi_z
}

/// Harmonicity criterion of an arbitrary `psi`, second derivatives by
/// central differences.
pub fn harmonicity_fd(f: impl Fn(f64, f64) -> Complex64, q: Exponent, u: f64, z: f64, h: f64) -> Complex64 {
    let qf = q.q() as f64;
    let psi = f(u, z);
    let psi_u = (f(u + h, z) - f(u - h, z)) / (2.0 * h);
    let psi_uu = (f(u + h, z) - 2.0 * psi + f(u - h, z)) / (h * h);
    let psi_zz = (f(u, z + h) - 2.0 * psi + f(u, z - h)) / (h * h);
    qf * (qf - 1.0) * psi - 2.0 * (qf - 1.0) * u * psi_u + u * u * psi_uu + 0.5 * u * psi_zz
}
