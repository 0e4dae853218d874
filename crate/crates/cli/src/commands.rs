use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use semiconf::closed_forms::{Family, FamilyFile};
use semiconf::convergence::family_radius;
use semiconf::geometry::{self, FibreCircle};
use semiconf::identities::{run_suite, SuiteConfig};
use semiconf::scalar::format_float;
use semiconf::solver::{self, read_points_csv, BoundaryFile};
use semiconf::{AnsatzMap, BiSeries, CScalar, Error, Exponent, Mode, Point3, SeriesFile};

use crate::fail::{Code, Fail};
use crate::output::{emit, emit_json, write_atomic};
use crate::{CompareArgs, EvalArgs, FamilyArgs, FibresArgs, IdentitiesArgs, RadiusArgs, SolveArgs, VerifyArgs};

type Outcome = Result<ExitCode, Fail>;

/// Output of `solve`: the coefficient table with its exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub q: u64,
    #[serde(flatten)]
    pub series: SeriesFile,
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn read_grid(path: &Path) -> Result<Vec<Point3>, Fail> {
    let pts = read_points_csv(read(path)?.as_bytes())?;
    if pts.is_empty() {
        return Err(Fail::input(format!("{}: grid has no points", path.display())));
    }
    Ok(pts)
}

fn read_map(path: &Path) -> Result<(AnsatzMap, CoefficientFile), Fail> {
    let file: CoefficientFile = read_json(path)?;
    let q = Exponent::from_q(file.q)?;
    let psi = BiSeries::from_json(&file.series)?;
    Ok((AnsatzMap::new(q, psi), file))
}

fn parse_scalar(text: &str, name: &str) -> Result<CScalar, Fail> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Fail::input(format!("--{name} expects re,im, got `{text}`")))?;
    Ok(CScalar::parse_pair(re, im, None)?)
}

fn family(args: &FamilyArgs) -> Result<Family, Fail> {
    if let Some(path) = &args.input {
        let file: FamilyFile = read_json(path)?;
        return Ok(Family::from_file(&file)?);
    }
    let name = args
        .family
        .as_deref()
        .ok_or_else(|| Fail::input("give --input or --family"))?;
    let get = |v: &Option<String>, flag: &str| -> Result<CScalar, Fail> {
        let text = v
            .as_deref()
            .ok_or_else(|| Fail::input(format!("family `{name}` needs --{flag}")))?;
        parse_scalar(text, flag)
    };
    Ok(match name {
        "q0" => Family::Q0 { c: get(&args.c, "c")? },
        "q1" => Family::Q1 { c: get(&args.c, "c")? },
        "two_param" => Family::TwoParam {
            alpha: get(&args.alpha, "alpha")?,
            beta: get(&args.beta, "beta")?,
        },
        "hopf" => Family::Hopf,
        "product" => Family::Product {
            b: get(&args.b, "b")?,
            c: get(&args.c, "c")?,
        },
        other => return Err(Error::UnknownFamily(other.to_string()).into()),
    })
}

/// One row per `k`: `*` for a nonzero `a[k, l]`, `.` otherwise.
pub fn triangle_summary(psi: &BiSeries) -> String {
    let n = psi.trunc();
    let width = n.to_string().len();
    let mut out = String::new();
    for k in 0..=n {
        let row: String = (0..=n - k)
            .map(|l| if psi.get(k, l).is_zero() { '.' } else { '*' })
            .collect();
        let _ = writeln!(out, "{k:>width$} {row}");
    }
    out
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let file: BoundaryFile = read_json(&a.input)?;
    let order = a.order.unwrap_or(file.order);
    if order < 2 {
        return Err(Fail::input(format!("order must be at least 2, got {order}")));
    }
    let bd = file.boundary_data(a.mode)?;
    let psi = solver::solve(&bd, order)?;
    let out = CoefficientFile {
        q: bd.q().q(),
        series: psi.to_json(),
    };
    emit_json(Some(&a.out), &out)?;
    println!(
        "q = {}, order = {order}, mode = {}, nonzero = {}",
        out.q,
        psi.mode(),
        psi.nnz()
    );
    print!("{}", triangle_summary(&psi));
    Ok(ExitCode::SUCCESS)
}

pub fn eval(a: &EvalArgs) -> Outcome {
    let (map, _) = read_map(&a.input)?;
    let pts = read_grid(&a.grid)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["x", "y", "z", "re", "im"]).map_err(Fail::input)?;
    for p in &pts {
        let v = map.eval_phi(p)?;
        wtr.write_record([p.x, p.y, p.z, v.re, v.im].map(format_float))
            .map_err(Fail::input)?;
    }
    let bytes = wtr.into_inner().map_err(Fail::input)?;
    emit(a.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct PointResidual {
    x: f64,
    y: f64,
    z: f64,
    semiconformality: f64,
    fd_gap: f64,
    harmonicity: f64,
}

#[derive(Debug, Serialize)]
struct Stats {
    max: f64,
    mean: f64,
}

impl Stats {
    fn of(values: impl Iterator<Item = f64>) -> Stats {
        let (mut max, mut sum, mut n) = (0.0f64, 0.0, 0usize);
        for v in values {
            max = max.max(v);
            sum += v;
            n += 1;
        }
        Stats {
            max,
            mean: if n == 0 { 0.0 } else { sum / n as f64 },
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    q: u64,
    order: usize,
    mode: Mode,
    /// Re-serializing the parsed table reproduces the file's coefficients.
    coefficients_roundtrip: bool,
    points: Vec<PointResidual>,
    semiconformality: Stats,
    fd_gap: Stats,
    harmonicity: Stats,
    tol: f64,
    within_tol: bool,
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let (map, file) = read_map(&a.input)?;
    let map = map.with_fd_step(a.fd_step);
    let pts = read_grid(&a.grid)?;
    let mut rows = Vec::with_capacity(pts.len());
    for p in &pts {
        let sc = map.semiconformality_residual(p)?;
        rows.push(PointResidual {
            x: p.x,
            y: p.y,
            z: p.z,
            semiconformality: sc.analytic,
            fd_gap: sc.gap,
            harmonicity: map.harmonicity_residual(p)?,
        });
    }
    let semiconformality = Stats::of(rows.iter().map(|r| r.semiconformality));
    let report = VerifyReport {
        q: file.q,
        order: file.series.trunc,
        mode: file.series.mode,
        coefficients_roundtrip: map.psi().to_json() == file.series,
        fd_gap: Stats::of(rows.iter().map(|r| r.fd_gap)),
        harmonicity: Stats::of(rows.iter().map(|r| r.harmonicity)),
        within_tol: semiconformality.max <= a.tol,
        semiconformality,
        tol: a.tol,
        points: rows,
    };
    emit_json(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct RadiusReport {
    family: &'static str,
    order: usize,
    mode: Mode,
    #[serde(flatten)]
    estimate: semiconf::convergence::RadiusEstimate,
}

pub fn radius(a: &RadiusArgs) -> Outcome {
    let fam = family(&a.family)?;
    let estimate = family_radius(&fam, a.order, a.method, a.mode)?;
    let report = RadiusReport {
        family: fam.name(),
        order: a.order,
        mode: a.mode,
        estimate,
    };
    emit_json(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn identities(a: &IdentitiesArgs) -> Outcome {
    let mut cfg = a.kmax.map_or_else(SuiteConfig::default, SuiteConfig::uniform);
    cfg.inject_fault = a.inject_fault.clone();
    let reports = run_suite(&cfg)?;
    if a.out.is_some() {
        for r in &reports {
            println!("{r}");
        }
    }
    emit_json(a.out.as_deref(), &reports)?;
    if reports.iter().all(|r| r.passed()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(Code::IdentityFailure.into())
    }
}

#[derive(Debug, Serialize)]
struct FibreHeader {
    #[serde(flatten)]
    circle: FibreCircle,
    samples: usize,
    quadric_residual: f64,
    /// Spread of phi over the samples; absent when a sample lies on the
    /// z-axis, where phi is singular.
    phi_spread: Option<f64>,
}

pub fn fibres(a: &FibresArgs) -> Outcome {
    let alpha = parse_scalar(&a.alpha, "alpha")?.to_complex64();
    let eta = parse_scalar(&a.eta, "eta")?.to_complex64();
    let fc = geometry::fibre_circle(alpha, eta)?;
    let samples = geometry::sample_circle_with_angles(&fc, a.samples)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["x", "y", "z", "theta"]).map_err(Fail::input)?;
    for (p, theta) in &samples {
        wtr.write_record([p.x, p.y, p.z, *theta].map(format_float))
            .map_err(Fail::input)?;
    }
    write_atomic(&a.out, &wtr.into_inner().map_err(Fail::input)?)?;
    let points: Vec<Point3> = samples.iter().map(|(p, _)| *p).collect();
    let phi_spread = match geometry::verify_fibre(alpha, &fc, a.samples) {
        Ok(s) => Some(s),
        Err(Error::OnAxis { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let header = FibreHeader {
        quadric_residual: geometry::quadric_residual(&fc, &points),
        circle: fc,
        samples: a.samples,
        phi_spread,
    };
    emit_json(a.header.as_deref(), &header)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct CompareReport {
    family: &'static str,
    order: usize,
    mode: Mode,
    points: usize,
    max_gap: f64,
    mean_gap: f64,
    /// `(u, z)` of the largest gap.
    worst: [f64; 2],
}

fn box_grid(umax: f64, zmax: f64, steps: usize) -> Result<Vec<(f64, f64)>, Fail> {
    if steps < 2 {
        return Err(Fail::input("--steps must be at least 2"));
    }
    let at = |m: f64, i: usize| -m + 2.0 * m * i as f64 / (steps - 1) as f64;
    Ok((0..steps)
        .flat_map(|i| (0..steps).map(move |j| (at(umax, i), at(zmax, j))))
        .collect())
}

pub fn compare(a: &CompareArgs) -> Outcome {
    let fam = family(&a.family)?;
    let uz = match &a.grid {
        Some(path) => read_grid(path)?.iter().map(|p| (p.u(), p.z)).collect(),
        None => box_grid(a.umax, a.zmax, a.steps)?,
    };
    let bd = fam.boundary_data(a.mode, a.order + 1)?;
    let psi = solver::solve(&bd, a.order)?.to_float();
    let mut gaps = Vec::with_capacity(uz.len());
    for &(u, z) in &uz {
        let closed = fam
            .closed_psi(u, z)
            .ok_or_else(|| Fail::domain(format!("family `{}` has no closed form for these parameters", fam.name())))??;
        let series = psi
            .eval(&CScalar::float(u, 0.0), &CScalar::float(z, 0.0))?
            .to_complex64();
        gaps.push((closed - series).norm());
    }
    let (worst, max_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    let report = CompareReport {
        family: fam.name(),
        order: a.order,
        mode: a.mode,
        points: uz.len(),
        max_gap,
        mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
        worst: [uz[worst].0, uz[worst].1],
    };
    emit_json(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}
