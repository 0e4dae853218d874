//! Fibres of the equal-parameter family.
//!
//! The level set `phi = 2 eta` is the real locus of
//! `alpha^2 (x^2 + y^2 + z^2) + 2 alpha z - 2 eta (x - iy) + 1 = 0`, which
//! with `xi = (-eta, i eta, alpha) / alpha^2` reads `(p + xi).(p + xi) = 0`:
//! a circle centred at `-Re xi` in the plane normal to `Im xi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_forms::equal_param_phi;
use crate::error::{Error, Result};
use crate::scalar::CScalar;
use crate::solver::Point3;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn point(v: V3) -> Point3 {
    Point3::new(v[0], v[1], v[2])
}

/// `xi = (-eta, i eta, alpha) / alpha^2`.
pub fn xi(alpha: Complex64, eta: Complex64) -> [Complex64; 3] {
    let a2 = alpha * alpha;
    [-eta / a2, Complex64::i() * eta / a2, alpha / a2]
}

/// Left side of the fibre equation at a real point.
pub fn fibre_equation(alpha: Complex64, eta: Complex64, p: &Point3) -> Complex64 {
    let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    alpha * alpha * r2 + 2.0 * alpha * p.z - 2.0 * eta * Complex64::new(p.x, -p.y) + 1.0
}

/// The fibre equation in exact (or float) scalar arithmetic at a point with
/// scalar coordinates.
pub fn fibre_equation_scalar(alpha: &CScalar, eta: &CScalar, p: &[CScalar; 3]) -> Result<CScalar> {
    let mode = alpha.mode();
    let [x, y, z] = p;
    let r2 = &(&(x * x) + &(y * y)) + &(z * z);
    let w = x - &(&CScalar::i(mode) * y);
    let lhs = &(&(&(alpha * alpha) * &r2) + &(alpha * z).scale_int(2)) - &(eta * &w).scale_int(2);
    lhs.try_add(&CScalar::one(mode))
}

/// `(0, 0, -1/alpha)`, on every fibre when `alpha` is real.
pub fn bouquet_point(alpha: f64) -> Result<Point3> {
    if alpha == 0.0 {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    Ok(Point3::new(0.0, 0.0, -1.0 / alpha))
}

/// Exact bouquet point for a real exact `alpha`.
pub fn bouquet_point_scalar(alpha: &CScalar) -> Result<[CScalar; 3]> {
    let mode = alpha.mode();
    let zero = CScalar::zero(mode);
    let z = CScalar::one(mode).try_div(alpha)?;
    Ok([zero.clone(), zero, -z])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreCircle {
    pub center: V3,
    pub normal: V3,
    pub radius: f64,
    /// `[re, im]`.
    pub alpha: [f64; 2],
    pub eta: [f64; 2],
}

impl FibreCircle {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha[0], self.alpha[1])
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.eta[0], self.eta[1])
    }

    /// An orthonormal pair spanning the circle's plane.
    pub fn basis(&self) -> (V3, V3) {
        let e1 = orthogonal_unit(self.normal);
        (e1, cross(self.normal, e1))
    }

    /// Euclidean distance from `p` to the circle.
    pub fn distance(&self, p: &Point3) -> f64 {
        let d = p.sub(&point(self.center));
        let h = dot(d, self.normal);
        let radial = norm(add(d, scale(self.normal, -h)));
        (h * h + (radial - self.radius).powi(2)).sqrt()
    }
}

fn orthogonal_unit(n: V3) -> V3 {
    // cross with the axis least aligned with n
    let axis = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() <= n[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e = cross(n, axis);
    scale(e, 1.0 / norm(e))
}

/// Relative size below which `Im xi` counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Constructs the fibre `phi = 2 eta`. Centre and plane come from `xi`; the
/// radius is the distance to a point found by damped Newton iteration on
/// the real and imaginary parts of the fibre equation inside that plane.
pub fn fibre_circle(alpha: Complex64, eta: Complex64) -> Result<FibreCircle> {
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    let x = xi(alpha, eta);
    let re = [x[0].re, x[1].re, x[2].re];
    let im = [x[0].im, x[1].im, x[2].im];
    let scale_xi = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if norm(im) <= DEGENERATE_TOL * scale_xi.max(1.0) {
        return Err(Error::Degenerate);
    }
    let center = scale(re, -1.0);
    let normal = scale(im, 1.0 / norm(im));
    let e1 = orthogonal_unit(normal);

    let plane_point = |s: f64, t: f64| point(add(center, add(scale(e1, s), scale(normal, t))));
    let residual = |s: f64, t: f64| fibre_equation(alpha, eta, &plane_point(s, t));
    let gradient = |p: &Point3| -> [Complex64; 3] {
        let a2 = alpha * alpha;
        [
            2.0 * a2 * p.x - 2.0 * eta,
            2.0 * a2 * p.y + 2.0 * Complex64::i() * eta,
            2.0 * a2 * p.z + 2.0 * alpha,
        ]
    };

    let s0 = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for start in [s0, -s0, 2.0 * s0, 0.5 * s0] {
        let (mut s, mut t) = (start, 0.0);
        let mut f = residual(s, t);
        for _ in 0..200 {
            if f.norm() < 1e-15 * (1.0 + alpha.norm_sqr() * s0 * s0) {
                break;
            }
            let g = gradient(&plane_point(s, t));
            let ds = g[0] * e1[0] + g[1] * e1[1] + g[2] * e1[2];
            let dt = g[0] * normal[0] + g[1] * normal[1] + g[2] * normal[2];
            // real 2x2 system [ds dt] [delta_s delta_t]^T = -f
            let det = ds.re * dt.im - dt.re * ds.im;
            if det.abs() < 1e-300 {
                break;
            }
            let step_s = (-f.re * dt.im + dt.re * f.im) / det;
            let step_t = (-ds.re * f.im + ds.im * f.re) / det;
            let mut lambda = 1.0;
            loop {
                let (ns, nt) = (s + lambda * step_s, t + lambda * step_t);
                let nf = residual(ns, nt);
                if nf.norm() < f.norm() || lambda < 1e-6 {
                    s = ns;
                    t = nt;
                    f = nf;
                    break;
                }
                lambda *= 0.5;
            }
        }
        let p = plane_point(s, t);
        let r = p.dist(&point(center));
        if f.norm() < 1e-10 && r > 0.0 && r.is_finite() {
            return Ok(FibreCircle {
                center,
                normal,
                radius: r,
                alpha: [alpha.re, alpha.im],
                eta: [eta.re, eta.im],
            });
        }
    }
    Err(Error::NoRealPoint)
}

/// `n` equally spaced points `center + radius (cos th e1 + sin th e2)`.
pub fn sample_circle(fc: &FibreCircle, n: usize) -> Result<Vec<Point3>> {
    Ok(sample_circle_with_angles(fc, n)?.into_iter().map(|(p, _)| p).collect())
}

/// As [`sample_circle`], paired with the angle of each sample.
pub fn sample_circle_with_angles(fc: &FibreCircle, n: usize) -> Result<Vec<(Point3, f64)>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 samples, got {n}")));
    }
    let (e1, e2) = fc.basis();
    Ok((0..n)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / n as f64;
            let d = add(scale(e1, th.cos()), scale(e2, th.sin()));
            (point(add(fc.center, scale(d, fc.radius))), th)
        })
        .collect())
}

/// Distance from the z-axis below which `phi` is treated as undefined.
pub const AXIS_TOL: f64 = 1e-9;

/// Largest deviation of `phi` from its value at the first sample. Points
/// within [`AXIS_TOL`] of the axis are rejected: `phi` has a pole there.
pub fn phi_spread(alpha: Complex64, points: &[Point3]) -> Result<f64> {
    let Some(first) = points.first() else {
        return Ok(0.0);
    };
    if let Some(p) = points.iter().find(|p| p.x.hypot(p.y) < AXIS_TOL) {
        return Err(Error::OnAxis { x: p.x, y: p.y, z: p.z });
    }
    let phi0 = equal_param_phi(alpha, first)?;
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max((equal_param_phi(alpha, p)? - phi0).norm());
    }
    Ok(worst)
}

/// `max |phi(p) - phi(p0)|` over `n` samples of the circle.
pub fn verify_fibre(alpha: Complex64, fc: &FibreCircle, n: usize) -> Result<f64> {
    phi_spread(alpha, &sample_circle(fc, n)?)
}

/// Largest `|fibre equation|` over the given points.
pub fn quadric_residual(fc: &FibreCircle, points: &[Point3]) -> f64 {
    points
        .iter()
        .map(|p| fibre_equation(fc.alpha(), fc.eta(), p).norm())
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Point3], b: &[Point3]) -> f64 {
    let directed = |from: &[Point3], to: &[Point3]| {
        from.iter()
            .map(|p| to.iter().map(|q| p.dist(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::ratio;
    use crate::scalar::Mode;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hopf_fibre_through_origin_level() {
        let fc = fibre_circle(c(0.0, -1.0), c(0.0, 0.0)).unwrap();
        assert!(norm(fc.center) < 1e-12);
        assert!((fc.normal[2].abs() - 1.0).abs() < 1e-12);
        assert!((fc.radius - 1.0).abs() < 1e-12);
        let pts = sample_circle(&fc, 64).unwrap();
        assert!(quadric_residual(&fc, &pts) < 1e-12);
        assert!(verify_fibre(c(0.0, -1.0), &fc, 64).unwrap() < 1e-12);
    }

    #[test]
    fn radius_matches_imaginary_part_of_xi() {
        for (a, e) in [(c(0.3, -1.1), c(0.5, 0.2)), (c(-1.5, 0.4), c(-0.7, 1.3)), (c(2.0, 0.0), c(0.3, 1.0))] {
            let fc = fibre_circle(a, e).unwrap();
            let x = xi(a, e);
            let im = norm([x[0].im, x[1].im, x[2].im]);
            assert!((fc.radius - im).abs() < 1e-9 * im.max(1.0), "{} vs {}", fc.radius, im);
            assert!((norm(fc.normal) - 1.0).abs() < 1e-12);
            let pts = sample_circle(&fc, 64).unwrap();
            assert!(quadric_residual(&fc, &pts) < 1e-9);
            let spread = verify_fibre(a, &fc, 63).unwrap();
            assert!(spread < 1e-8, "{spread}");
            let phi = equal_param_phi(a, &pts[0]).unwrap();
            assert!((phi - 2.0 * e).norm() < 1e-9);
        }
    }

    #[test]
    fn sample_on_axis_is_rejected() {
        // real alpha: every fibre meets the axis, here at theta = pi/2
        let a = c(2.0, 0.0);
        let fc = fibre_circle(a, c(0.0, 1.0)).unwrap();
        assert!(matches!(verify_fibre(a, &fc, 64), Err(Error::OnAxis { .. })));
        assert!(verify_fibre(a, &fc, 63).unwrap() < 1e-8);
    }

    #[test]
    fn degenerate_when_xi_is_real() {
        assert_eq!(fibre_circle(c(1.0, 0.0), c(0.0, 0.0)), Err(Error::Degenerate));
    }

    #[test]
    fn samples_lie_on_circle() {
        let fc = fibre_circle(c(0.0, -1.0), c(0.0, 0.0)).unwrap();
        let pts = sample_circle(&fc, 4).unwrap();
        for p in &pts {
            assert!((p.dist(&point(fc.center)) - 1.0).abs() < 1e-12);
            assert!(dot(p.sub(&point(fc.center)), fc.normal).abs() < 1e-12);
            assert!(fc.distance(p) < 1e-12);
        }
        assert!(sample_circle(&fc, 2).is_err());
    }

    #[test]
    fn perturbed_sample_is_detected() {
        let a = c(0.3, -1.1);
        let fc = fibre_circle(a, c(0.5, 0.2)).unwrap();
        let mut pts = sample_circle(&fc, 64).unwrap();
        pts[7].x += 1e-3;
        assert!(phi_spread(a, &pts).unwrap() > 1e-6);
    }

    #[test]
    fn bouquet_exact() {
        let alpha = CScalar::from_rational(&ratio(3, 7), Mode::Exact);
        let p = bouquet_point_scalar(&alpha).unwrap();
        for (a, b) in [(1, 2), (-5, 3), (0, 0), (7, -11)] {
            let eta = CScalar::gaussian(a, 3, b, 5);
            assert!(fibre_equation_scalar(&alpha, &eta, &p).unwrap().is_zero());
        }
        let q = bouquet_point(0.5).unwrap();
        assert_eq!(q, Point3::new(0.0, 0.0, -2.0));
        assert!(fibre_equation(c(0.5, 0.0), c(1.0, 2.0), &q).norm() < 1e-15);
    }

    #[test]
    fn real_alpha_circles_pass_through_bouquet() {
        let a = c(0.8, 0.0);
        let b = bouquet_point(0.8).unwrap();
        for e in [c(0.0, 1.0), c(1.0, 1.0), c(-2.0, 0.5)] {
            let fc = fibre_circle(a, e).unwrap();
            assert!(fc.distance(&b) < 1e-9);
        }
    }

    #[test]
    fn deformation_to_hopf() {
        let eta = c(0.4, -0.3);
        let hopf = sample_circle(&fibre_circle(c(0.0, -1.0), eta).unwrap(), 256).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.2, 0.05, 0.01] {
            let fc = fibre_circle(c(t, -1.0 - t), eta).unwrap();
            let d = hausdorff(&sample_circle(&fc, 256).unwrap(), &hopf);
            assert!(d < last);
            last = d;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn hausdorff_basics() {
        let a = [Point3::new(0.0, 0.0, 0.0)];
        let b = [Point3::new(3.0, 4.0, 0.0), Point3::new(0.0, 0.0, 0.0)];
        assert_eq!(hausdorff(&a, &b), 5.0);
        assert_eq!(hausdorff(&b, &b), 0.0);
    }
}
