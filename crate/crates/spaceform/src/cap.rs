//! Umbilical chart surfaces, cap domains, and their corner geometry.
//!
//! In every conformal chart the totally umbilical hypersurfaces are Euclidean
//! spheres and planes, and conformality makes contact angles equal to the flat
//! angles between the chart surfaces. A [`CapConfig`] describes a domain
//! Omega bounded by a piece of a support surface (carrying the Robin data)
//! and a spherical cap; the module computes the corner sphere, the outward
//! frames of Eq-style corner decompositions, and quadrature samples for the
//! boundary pieces.

use crate::error::{Error, Result};
use crate::geometry::Model;
use crate::scalar::{dot, norm, Real};

/// Sphere or plane in chart coordinates with a signed side convention:
/// `residual` is negative on the side that contains Omega (or B^int).
#[derive(Debug, Clone)]
pub enum ChartSurface<R> {
    Sphere {
        center: Vec<R>,
        radius: R,
        /// true if Omega lies inside the sphere.
        omega_inside: bool,
    },
    /// {coeffs . x = rhs} with Omega on the side coeffs . x > rhs.
    Plane { coeffs: Vec<R>, rhs: R },
}

impl<R: Real> ChartSurface<R> {
    pub fn dim(&self) -> usize {
        match self {
            ChartSurface::Sphere { center, .. } => center.len(),
            ChartSurface::Plane { coeffs, .. } => coeffs.len(),
        }
    }

    /// Signed surface equation, negative on the Omega side, polynomial in the
    /// chart coordinates.
    pub fn residual(&self, x: &[R]) -> R {
        match self {
            ChartSurface::Sphere {
                center,
                radius,
                omega_inside,
            } => {
                let d: R = x
                    .iter()
                    .zip(center)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                let r = d - *radius * *radius;
                if *omega_inside {
                    r
                } else {
                    -r
                }
            }
            ChartSurface::Plane { coeffs, rhs } => *rhs - dot(coeffs, x),
        }
    }

    /// Flat unit normal pointing away from Omega (toward positive residual).
    pub fn flat_normal_out(&self, x: &[R]) -> Vec<R> {
        match self {
            ChartSurface::Sphere {
                center,
                omega_inside,
                ..
            } => {
                let mut v: Vec<R> = x.iter().zip(center).map(|(&a, &b)| a - b).collect();
                let n = norm(&v);
                let s = if *omega_inside { n.recip() } else { -n.recip() };
                for c in &mut v {
                    *c = *c * s;
                }
                v
            }
            ChartSurface::Plane { coeffs, .. } => {
                let n = norm(coeffs);
                coeffs.iter().map(|&c| -c / n).collect()
            }
        }
    }

    /// Chart components of the metric-unit normal pointing away from Omega.
    pub fn unit_normal(&self, model: &Model, x: &[R]) -> Vec<R> {
        let w = model.conformal_factor(x);
        self.flat_normal_out(x)
            .into_iter()
            .map(|c| c / w)
            .collect()
    }

    /// Principal curvature of the surface with respect to the outward unit
    /// normal in the chart metric: (kappa_flat + d_m ln w) / w.
    pub fn umbilic_kappa(&self, model: &Model, x: &[R]) -> R {
        let m = self.flat_normal_out(x);
        let kappa_flat = match self {
            ChartSurface::Sphere {
                radius,
                omega_inside,
                ..
            } => {
                if *omega_inside {
                    radius.recip()
                } else {
                    -radius.recip()
                }
            }
            ChartSurface::Plane { .. } => R::zero(),
        };
        let dlnw = model.dlnw(x);
        (kappa_flat + dot(&m, &dlnw)) / model.conformal_factor(x)
    }

    /// Mean curvature (trace convention) for the umbilic surface: n * kappa.
    pub fn mean_curvature(&self, model: &Model, x: &[R]) -> R {
        self.umbilic_kappa(model, x) * R::of_usize(model.dim - 1)
    }
}

/// Domain Omega = {support residual < 0} intersect {cap residual < 0}.
#[derive(Debug, Clone)]
pub struct CapConfig {
    pub model: Model,
    pub support: ChartSurface<f64>,
    pub cap: ChartSurface<f64>,
}

/// One boundary piece as a parameter domain for quadrature.
#[derive(Debug, Clone)]
pub enum CapPatch {
    /// {center + radius * u : angle(u, axis) <= acos(cos_theta_max)}.
    SphereCap {
        center: Vec<f64>,
        radius: f64,
        axis: Vec<f64>,
        cos_theta_max: f64,
    },
    /// Flat disk (ambient 3) or chord segment (ambient 2) inside a plane.
    Disk {
        center: Vec<f64>,
        radius: f64,
        normal: Vec<f64>,
    },
}

/// Corner sphere and split of the boundary into the Sigma and T patches.
#[derive(Debug, Clone)]
pub struct CapGeometry {
    pub sigma: CapPatch,
    pub t: CapPatch,
    /// Center of the corner sphere Gamma (chord-plane circle).
    pub corner_center: Vec<f64>,
    pub corner_radius: f64,
    /// Unit normal of the chord plane.
    pub corner_axis: Vec<f64>,
}

impl CapConfig {
    pub fn dim(&self) -> usize {
        self.model.dim
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.model.contains(x) && self.support.residual(x) < 0.0 && self.cap.residual(x) < 0.0
    }

    /// Resolves the corner sphere and boundary patches; errors if the cap
    /// does not intersect the support surface transversally.
    pub fn geometry(&self) -> Result<CapGeometry> {
        let (cc, cr, cap_inside) = match &self.cap {
            ChartSurface::Sphere {
                center,
                radius,
                omega_inside,
            } => (center.clone(), *radius, *omega_inside),
            ChartSurface::Plane { .. } => {
                return Err(Error::Config("cap surface must be a chart sphere".into()))
            }
        };
        match &self.support {
            ChartSurface::Sphere {
                center: oc,
                radius: r1,
                omega_inside,
            } => {
                if !omega_inside {
                    return Err(Error::Config(
                        "support sphere must enclose its interior region".into(),
                    ));
                }
                let mut u: Vec<f64> = cc.iter().zip(oc).map(|(a, b)| a - b).collect();
                let dist = norm(&u);
                if dist < 1e-12 {
                    return Err(Error::Config("cap concentric with support sphere".into()));
                }
                for c in &mut u {
                    *c /= dist;
                }
                if (r1 - cr).abs() >= dist || dist >= r1 + cr {
                    return Err(Error::Config(format!(
                        "cap does not intersect support surface \
                         (centers {dist:.4} apart, radii {r1:.4} and {cr:.4})"
                    )));
                }
                let a1 = (dist * dist + r1 * r1 - cr * cr) / (2.0 * dist);
                let a2 = dist - a1;
                let corner_radius = (r1 * r1 - a1 * a1).sqrt();
                let corner_center: Vec<f64> =
                    oc.iter().zip(&u).map(|(o, ui)| o + a1 * ui).collect();
                let t = if cap_inside {
                    CapPatch::SphereCap {
                        center: oc.clone(),
                        radius: *r1,
                        axis: u.clone(),
                        cos_theta_max: a1 / r1,
                    }
                } else {
                    CapPatch::SphereCap {
                        center: oc.clone(),
                        radius: *r1,
                        axis: u.iter().map(|c| -c).collect(),
                        cos_theta_max: -a1 / r1,
                    }
                };
                let sigma = CapPatch::SphereCap {
                    center: cc,
                    radius: cr,
                    axis: u.iter().map(|c| -c).collect(),
                    cos_theta_max: a2 / cr,
                };
                Ok(CapGeometry {
                    sigma,
                    t,
                    corner_center,
                    corner_radius,
                    corner_axis: u,
                })
            }
            ChartSurface::Plane { coeffs, rhs } => {
                if !cap_inside {
                    return Err(Error::Config(
                        "outside-cap domains are only supported over sphere supports".into(),
                    ));
                }
                let an = norm(coeffs);
                let n_hat: Vec<f64> = coeffs.iter().map(|c| c / an).collect();
                let hgt = (dot(coeffs, &cc) - rhs) / an;
                if hgt.abs() >= cr {
                    return Err(Error::Config(
                        "cap sphere does not reach the support plane".into(),
                    ));
                }
                let corner_radius = (cr * cr - hgt * hgt).sqrt();
                let corner_center: Vec<f64> =
                    cc.iter().zip(&n_hat).map(|(c, n)| c - hgt * n).collect();
                let t = CapPatch::Disk {
                    center: corner_center.clone(),
                    radius: corner_radius,
                    normal: n_hat.clone(),
                };
                let sigma = CapPatch::SphereCap {
                    center: cc,
                    radius: cr,
                    axis: n_hat.clone(),
                    cos_theta_max: -hgt / cr,
                };
                Ok(CapGeometry {
                    sigma,
                    t,
                    corner_center,
                    corner_radius,
                    corner_axis: n_hat,
                })
            }
        }
    }
}

/// Outward frames at a corner point: all vectors are flat unit vectors, and
/// flat inner products between them equal the metric inner products of the
/// corresponding unit fields.
#[derive(Debug, Clone)]
pub struct CornerFrame {
    pub point: Vec<f64>,
    /// Support outward normal direction (N bar).
    pub n_support: Vec<f64>,
    /// Outward conormal of Gamma inside the support (nu bar).
    pub nu_bar: Vec<f64>,
    /// Outward conormal of Gamma inside Sigma (mu).
    pub mu: Vec<f64>,
    /// Sigma outward normal direction (nu).
    pub nu_sigma: Vec<f64>,
    /// Flat quadrature weight on Gamma (counting measure in ambient 2).
    pub weight: f64,
}

fn rot90(v: &[f64]) -> Vec<f64> {
    vec![-v[1], v[0]]
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    for c in &mut v {
        *c /= n;
    }
    v
}

/// Two orthonormal vectors completing `axis` (ambient 3).
fn complement3(axis: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pick = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
        vec![1.0, 0.0, 0.0]
    } else if axis[1].abs() <= axis[2].abs() {
        vec![0.0, 1.0, 0.0]
    } else {
        vec![0.0, 0.0, 1.0]
    };
    let e1 = normalize(cross3(axis, &pick));
    let e2 = cross3(axis, &e1);
    (e1, e2)
}

fn orient(mut v: Vec<f64>, toward: &[f64]) -> Vec<f64> {
    if dot(&v, toward) < 0.0 {
        for c in &mut v {
            *c = -*c;
        }
    }
    v
}

fn frame_at(config: &CapConfig, p: Vec<f64>, t_gamma: Option<&[f64]>, weight: f64) -> CornerFrame {
    let m_s = config.support.flat_normal_out(&p);
    let m_sigma = config.cap.flat_normal_out(&p);
    let (nu_bar, mu) = match t_gamma {
        None => {
            let nu_bar = orient(rot90(&m_s), &m_sigma);
            let mu = orient(rot90(&m_sigma), &m_s);
            (nu_bar, mu)
        }
        Some(tg) => {
            let nu_bar = orient(normalize(cross3(&m_s, tg)), &m_sigma);
            let mu = orient(normalize(cross3(&m_sigma, tg)), &m_s);
            (nu_bar, mu)
        }
    };
    CornerFrame {
        point: p,
        n_support: m_s,
        nu_bar,
        mu,
        nu_sigma: m_sigma,
        weight,
    }
}

/// Corner frames with flat Gamma quadrature weights: the two endpoints in
/// ambient 2, a uniform ring rule in ambient 3.
pub fn corner_frames(config: &CapConfig, geom: &CapGeometry, count: usize) -> Vec<CornerFrame> {
    let d = config.dim();
    if d == 2 {
        let v = rot90(&geom.corner_axis);
        [-1.0f64, 1.0]
            .iter()
            .map(|s| {
                let p: Vec<f64> = geom
                    .corner_center
                    .iter()
                    .zip(&v)
                    .map(|(c, vi)| c + s * geom.corner_radius * vi)
                    .collect();
                frame_at(config, p, None, 1.0)
            })
            .collect()
    } else {
        let (e1, e2) = complement3(&geom.corner_axis);
        let rho = geom.corner_radius;
        let dw = 2.0 * std::f64::consts::PI * rho / count as f64;
        (0..count)
            .map(|k| {
                let psi = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                let (c, s) = (psi.cos(), psi.sin());
                let p: Vec<f64> = geom
                    .corner_center
                    .iter()
                    .enumerate()
                    .map(|(i, cc)| cc + rho * (c * e1[i] + s * e2[i]))
                    .collect();
                let tangent: Vec<f64> = (0..3).map(|i| -s * e1[i] + c * e2[i]).collect();
                frame_at(config, p, Some(&tangent), dw)
            })
            .collect()
    }
}

/// Contact angle via the corner frame decomposition
/// theta = atan2(g(mu, N), g(mu, nu_bar)), per corner sample.
pub fn contact_angles(config: &CapConfig, count: usize) -> Result<Vec<f64>> {
    let geom = config.geometry()?;
    Ok(corner_frames(config, &geom, count)
        .iter()
        .map(|f| dot(&f.mu, &f.n_support).atan2(dot(&f.mu, &f.nu_bar)))
        .collect())
}

/// Mean and spread of the contact angle along Gamma.
pub fn contact_angle_stats(config: &CapConfig, count: usize) -> Result<(f64, f64)> {
    let angles = contact_angles(config, count)?;
    let mean = angles.iter().sum::<f64>() / angles.len() as f64;
    let var = angles.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / angles.len() as f64;
    Ok((mean, var.sqrt()))
}

/// Parametric boundary curve in ambient dimension 2, t in [0, 1].
#[derive(Debug, Clone)]
pub enum Curve2 {
    Arc {
        center: [f64; 2],
        radius: f64,
        phi0: f64,
        phi1: f64,
    },
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        /// Flat unit normal pointing away from Omega.
        normal_out: [f64; 2],
    },
    /// Arc with an even radial bulge rho(1 + eps(1 - xi^2)), xi = 2t - 1;
    /// endpoints and the corner sphere stay fixed, umbilicity breaks.
    BulgedArc {
        center: [f64; 2],
        radius: f64,
        phi0: f64,
        phi1: f64,
        eps: f64,
    },
}

/// Pointwise curve data for line quadrature: position, flat speed, outward
/// flat unit normal, and flat curvature with respect to that normal.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub point: Vec<f64>,
    pub speed: f64,
    pub normal_out: Vec<f64>,
    pub kappa_flat: f64,
}

impl Curve2 {
    pub fn point(&self, t: f64) -> Vec<f64> {
        match self {
            Curve2::Arc {
                center,
                radius,
                phi0,
                phi1,
            } => {
                let phi = phi0 + (phi1 - phi0) * t;
                vec![center[0] + radius * phi.cos(), center[1] + radius * phi.sin()]
            }
            Curve2::Segment { a, b, .. } => {
                vec![a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
            }
            Curve2::BulgedArc {
                center,
                radius,
                phi0,
                phi1,
                eps,
            } => {
                let phi = phi0 + (phi1 - phi0) * t;
                let xi = 2.0 * t - 1.0;
                let r = radius * (1.0 + eps * (1.0 - xi * xi));
                vec![center[0] + r * phi.cos(), center[1] + r * phi.sin()]
            }
        }
    }

    /// Derivative of `point` with respect to t.
    pub fn velocity(&self, t: f64) -> Vec<f64> {
        match self {
            Curve2::Arc {
                radius,
                phi0,
                phi1,
                ..
            } => {
                let dphi = phi1 - phi0;
                let phi = phi0 + dphi * t;
                vec![-radius * phi.sin() * dphi, radius * phi.cos() * dphi]
            }
            Curve2::Segment { a, b, .. } => vec![b[0] - a[0], b[1] - a[1]],
            Curve2::BulgedArc {
                center: _,
                radius,
                phi0,
                phi1,
                eps,
            } => {
                let dphi = phi1 - phi0;
                let phi = phi0 + dphi * t;
                let xi = 2.0 * t - 1.0;
                let r = radius * (1.0 + eps * (1.0 - xi * xi));
                let drdt = -4.0 * radius * eps * xi;
                vec![
                    drdt * phi.cos() - r * phi.sin() * dphi,
                    drdt * phi.sin() + r * phi.cos() * dphi,
                ]
            }
        }
    }

    /// Curve data at parameter t. Arcs and bulged arcs assume Omega lies on
    /// the center side, so the outward normal points away from the center.
    pub fn eval(&self, t: f64) -> CurvePoint {
        match self {
            Curve2::Arc {
                center,
                radius,
                phi0,
                phi1,
            } => {
                let phi = phi0 + (phi1 - phi0) * t;
                let (c, s) = (phi.cos(), phi.sin());
                CurvePoint {
                    point: vec![center[0] + radius * c, center[1] + radius * s],
                    speed: radius * (phi1 - phi0).abs(),
                    normal_out: vec![c, s],
                    kappa_flat: radius.recip(),
                }
            }
            Curve2::Segment { a, b, normal_out } => {
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                CurvePoint {
                    point: self.point(t),
                    speed: len,
                    normal_out: normal_out.to_vec(),
                    kappa_flat: 0.0,
                }
            }
            Curve2::BulgedArc {
                center,
                radius,
                phi0,
                phi1,
                eps,
            } => {
                let dphi = phi1 - phi0;
                let phi = phi0 + dphi * t;
                let xi = 2.0 * t - 1.0;
                let r = radius * (1.0 + eps * (1.0 - xi * xi));
                // polar derivatives with respect to phi
                let dxi = 2.0 / dphi;
                let rp = -2.0 * radius * eps * xi * dxi;
                let rpp = -2.0 * radius * eps * dxi * dxi;
                let (c, s) = (phi.cos(), phi.sin());
                let e_r = [c, s];
                let e_phi = [-s, c];
                let sp = (r * r + rp * rp).sqrt();
                let normal_out = vec![
                    (r * e_r[0] - rp * e_phi[0]) / sp,
                    (r * e_r[1] - rp * e_phi[1]) / sp,
                ];
                CurvePoint {
                    point: vec![center[0] + r * c, center[1] + r * s],
                    speed: sp * dphi.abs(),
                    normal_out,
                    kappa_flat: (r * r + 2.0 * rp * rp - r * rpp) / sp.powi(3),
                }
            }
        }
    }
}

/// Converts a boundary patch of an ambient-2 configuration into a parametric
/// curve running from one corner to the other through the patch pole.
pub fn patch_curve2(patch: &CapPatch) -> Curve2 {
    match patch {
        CapPatch::SphereCap {
            center,
            radius,
            axis,
            cos_theta_max,
        } => {
            let beta = axis[1].atan2(axis[0]);
            let theta = cos_theta_max.clamp(-1.0, 1.0).acos();
            Curve2::Arc {
                center: [center[0], center[1]],
                radius: *radius,
                phi0: beta - theta,
                phi1: beta + theta,
            }
        }
        CapPatch::Disk {
            center,
            radius,
            normal,
        } => {
            let v = rot90(normal);
            Curve2::Segment {
                a: [center[0] - radius * v[0], center[1] - radius * v[1]],
                b: [center[0] + radius * v[0], center[1] + radius * v[1]],
                normal_out: [normal[0], normal[1]],
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens_config(b: f64) -> CapConfig {
        CapConfig {
            model: Model::ball(2),
            support: ChartSurface::Sphere {
                center: vec![0.0, -b],
                radius: 1.0 - b,
                omega_inside: true,
            },
            cap: ChartSurface::Sphere {
                center: vec![0.0, 0.5],
                radius: 0.5,
                omega_inside: true,
            },
        }
    }

    #[test]
    fn lens_corner_sphere() {
        let geom = lens_config(1.0 / 3.0).geometry().unwrap();
        assert!((geom.corner_center[1] - 0.2).abs() < 1e-14);
        assert!((geom.corner_radius - 0.4).abs() < 1e-14);
    }

    #[test]
    fn lens_contact_angle_matches_closed_form() {
        for &b in &[0.1, 1.0 / 3.0, 0.45] {
            let (mean, sd) = contact_angle_stats(&lens_config(b), 2).unwrap();
            let expected = (-(1.0 - 3.0 * b) / (1.0 - b)).acos();
            assert!(
                (mean - expected).abs() < 1e-12,
                "b = {b}: {mean} vs {expected}"
            );
            assert!(sd < 1e-12);
        }
    }

    #[test]
    fn sphere_normal_and_curvature() {
        let m = Model::ball(2);
        let surf: ChartSurface<f64> = ChartSurface::Sphere {
            center: vec![0.0, 0.5],
            radius: 0.5,
            omega_inside: true,
        };
        // Horosphere through the origin: unit curvature for the outward normal.
        let k = surf.umbilic_kappa(&m, &[0.0, 0.0]);
        assert!((k - 1.0).abs() < 1e-14);
        let n = surf.unit_normal(&m, &[0.0, 0.0]);
        // metric-unit: w = 2 at the origin, flat normal (0, -1)
        assert!((n[0]).abs() < 1e-15 && (n[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonintersecting_cap_rejected() {
        let config = CapConfig {
            model: Model::ball(2),
            support: ChartSurface::Sphere {
                center: vec![0.0, 0.0],
                radius: 0.5,
                omega_inside: true,
            },
            cap: ChartSurface::Sphere {
                center: vec![0.0, 0.0],
                radius: 0.2,
                omega_inside: true,
            },
        };
        assert!(config.geometry().is_err());
    }

    #[test]
    fn curve_endpoints_hit_corners() {
        let config = lens_config(0.1);
        let geom = config.geometry().unwrap();
        let sigma = patch_curve2(&geom.sigma);
        let frames = corner_frames(&config, &geom, 2);
        let p0 = sigma.point(0.0);
        let p1 = sigma.point(1.0);
        let near = |p: &[f64], f: &CornerFrame| {
            ((p[0] - f.point[0]).powi(2) + (p[1] - f.point[1]).powi(2)).sqrt() < 1e-12
        };
        assert!(frames.iter().any(|f| near(&p0, f)));
        assert!(frames.iter().any(|f| near(&p1, f)));
    }

    #[test]
    fn bulged_arc_keeps_endpoints() {
        let base = Curve2::Arc {
            center: [0.0, 0.5],
            radius: 0.5,
            phi0: -1.2,
            phi1: 0.4,
        };
        let bulged = Curve2::BulgedArc {
            center: [0.0, 0.5],
            radius: 0.5,
            phi0: -1.2,
            phi1: 0.4,
            eps: 0.1,
        };
        for t in [0.0, 1.0] {
            let a = base.point(t);
            let b = bulged.point(t);
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
        // curvature of the unperturbed arc is 1/rho everywhere
        let cp = base.eval(0.3);
        assert!((cp.kappa_flat - 2.0).abs() < 1e-14);
    }
}
