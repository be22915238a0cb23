//! Deterministic quadrature over cap domains and their boundary pieces.
//!
//! Everything is flat-measure: callers fold in the conformal volume or area
//! weight (w^d for volumes, w^(d-1) for hypersurfaces, w^(d-2) for corner
//! spheres). Refinement is a single `level`: each curve direction uses 2^level
//! panels of 3-point Gauss-Legendre, azimuthal directions use 4 * 2^level
//! uniform points, so levels nest predictably for convergence studies.

use crate::cap::{CapConfig, CapPatch, Curve2, CurvePoint};
use crate::error::{Error, Result};
use crate::scalar::{dot, norm};

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on the Legendre
/// recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        let mut done = false;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if done {
                break;
            }
            // one polish step after reaching the floor
            done = dx.abs() < 1e-14;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const GL3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
const GL3_WEIGHTS: [f64; 3] = [
    0.5555555555555556,
    0.8888888888888888,
    0.5555555555555556,
];

/// Composite 3-point Gauss rule on [a, b] with 2^level panels.
pub fn composite_rule(a: f64, b: f64, level: u32) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = (GL3_NODES.to_vec(), GL3_WEIGHTS.to_vec());
    let panels = 1usize << level;
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(3 * panels);
    let mut weights = Vec::with_capacity(3 * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(lo + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

// 3-point right Radau rule on [-1, 1]: the mirror of the classical left
// rule, nodes -(1 + sqrt 6)/5, (sqrt 6 - 1)/5, 1, exact through degree 4.
const RADAU3_NODES: [f64; 3] = [-0.6898979485566356, 0.2898979485566356, 1.0];
const RADAU3_WEIGHTS: [f64; 3] = [
    0.7528061254009344,
    1.0249716523768433,
    0.2222222222222222,
];

/// Composite 3-point right-Radau rule on [a, b] with 2^level panels. Unlike
/// the Gauss rule this one is not symmetric under reflection, so integrands
/// that are odd about the midpoint pick up a genuine O(h^5) error instead of
/// cancelling exactly; convergence studies on symmetric data need that. The
/// endpoint b itself is a node.
pub fn composite_radau(a: f64, b: f64, level: u32) -> (Vec<f64>, Vec<f64>) {
    let panels = 1usize << level;
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(3 * panels);
    let mut weights = Vec::with_capacity(3 * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in RADAU3_NODES.iter().zip(&RADAU3_WEIGHTS) {
            nodes.push(lo + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

fn azimuth_count(level: u32) -> usize {
    4 << level
}

pub(crate) fn rot90(v: &[f64]) -> Vec<f64> {
    vec![-v[1], v[0]]
}

/// Two orthonormal vectors completing a unit axis in ambient 3.
pub(crate) fn complement3(axis: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pick = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
        [1.0, 0.0, 0.0]
    } else if axis[1].abs() <= axis[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let c = [
        axis[1] * pick[2] - axis[2] * pick[1],
        axis[2] * pick[0] - axis[0] * pick[2],
        axis[0] * pick[1] - axis[1] * pick[0],
    ];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let e1 = vec![c[0] / n, c[1] / n, c[2] / n];
    let e2 = vec![
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    (e1, e2)
}

/// One quadrature node on a boundary patch: chart point and flat weight.
#[derive(Debug, Clone)]
pub struct PatchSample {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Flat-measure quadrature samples over a boundary patch.
pub fn patch_samples(patch: &CapPatch, level: u32) -> Vec<PatchSample> {
    match patch {
        CapPatch::SphereCap {
            center,
            radius,
            axis,
            cos_theta_max,
        } => {
            let theta_max = cos_theta_max.clamp(-1.0, 1.0).acos();
            let rho = *radius;
            if center.len() == 2 {
                let e1 = rot90(axis);
                let (tn, tw) = composite_rule(-theta_max, theta_max, level);
                tn.iter()
                    .zip(&tw)
                    .map(|(&t, &w)| PatchSample {
                        point: vec![
                            center[0] + rho * (t.cos() * axis[0] + t.sin() * e1[0]),
                            center[1] + rho * (t.cos() * axis[1] + t.sin() * e1[1]),
                        ],
                        weight: rho * w,
                    })
                    .collect()
            } else {
                let (e1, e2) = complement3(axis);
                let (tn, tw) = composite_rule(0.0, theta_max, level);
                let m = azimuth_count(level);
                let dpsi = 2.0 * std::f64::consts::PI / m as f64;
                let mut out = Vec::with_capacity(tn.len() * m);
                for (&t, &w) in tn.iter().zip(&tw) {
                    let (st, ct) = t.sin_cos();
                    for k in 0..m {
                        let psi = dpsi * k as f64;
                        let (sp, cp) = psi.sin_cos();
                        let point = (0..3)
                            .map(|i| {
                                center[i] + rho * (ct * axis[i] + st * (cp * e1[i] + sp * e2[i]))
                            })
                            .collect();
                        out.push(PatchSample {
                            point,
                            weight: rho * rho * st * w * dpsi,
                        });
                    }
                }
                out
            }
        }
        CapPatch::Disk {
            center,
            radius,
            normal,
        } => {
            if center.len() == 2 {
                let e1 = rot90(normal);
                let (tn, tw) = composite_rule(-radius, *radius, level);
                tn.iter()
                    .zip(&tw)
                    .map(|(&t, &w)| PatchSample {
                        point: vec![center[0] + t * e1[0], center[1] + t * e1[1]],
                        weight: w,
                    })
                    .collect()
            } else {
                let (e1, e2) = complement3(normal);
                let (rn, rw) = composite_rule(0.0, *radius, level);
                let m = azimuth_count(level);
                let dpsi = 2.0 * std::f64::consts::PI / m as f64;
                let mut out = Vec::with_capacity(rn.len() * m);
                for (&r, &w) in rn.iter().zip(&rw) {
                    for k in 0..m {
                        let psi = dpsi * k as f64;
                        let (sp, cp) = psi.sin_cos();
                        let point = (0..3)
                            .map(|i| center[i] + r * (cp * e1[i] + sp * e2[i]))
                            .collect();
                        out.push(PatchSample {
                            point,
                            weight: r * w * dpsi,
                        });
                    }
                }
                out
            }
        }
    }
}

/// One quadrature node on a parametric curve, with the flat line weight
/// already including the speed.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub data: CurvePoint,
    pub weight: f64,
}

/// Flat-measure quadrature along a `Curve2`.
pub fn curve_samples(curve: &Curve2, level: u32) -> Vec<CurveSample> {
    let (tn, tw) = composite_rule(0.0, 1.0, level);
    curve_samples_at(curve, &tn, &tw)
}

/// Same, but with the right-Radau panels; used where a reflection-symmetric
/// rule would hide the quadrature error of odd integrands.
pub fn curve_samples_radau(curve: &Curve2, level: u32) -> Vec<CurveSample> {
    let (tn, tw) = composite_radau(0.0, 1.0, level);
    curve_samples_at(curve, &tn, &tw)
}

fn curve_samples_at(curve: &Curve2, tn: &[f64], tw: &[f64]) -> Vec<CurveSample> {
    tn.iter()
        .zip(tw)
        .map(|(&t, &w)| {
            let data = curve.eval(t);
            let weight = w * data.speed;
            CurveSample { data, weight }
        })
        .collect()
}

/// Spherical segment {x in ball(center, radius) : <x - center, axis> > a}.
/// a may be negative (major segment) or zero (half ball).
#[derive(Debug, Clone)]
pub struct Segment {
    pub center: Vec<f64>,
    pub radius: f64,
    pub axis: Vec<f64>,
    pub a: f64,
}

/// Integrates f over the segment with the flat volume element.
///
/// Minor segments (a >= 0) split exactly into the circular sector minus the
/// cone over the chord, both with smooth polar parameterizations; major
/// segments (a < 0) go through the full ball minus the opposite minor
/// segment.
pub fn integrate_segment(seg: &Segment, level: u32, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    if seg.a < 0.0 {
        let opposite = Segment {
            center: seg.center.clone(),
            radius: seg.radius,
            axis: seg.axis.iter().map(|c| -c).collect(),
            a: -seg.a,
        };
        return integrate_ball(&seg.center, seg.radius, level, f)
            - integrate_segment(&opposite, level, f);
    }
    let theta_max = (seg.a / seg.radius).clamp(-1.0, 1.0).acos();
    integrate_sector(seg, theta_max, level, f) - integrate_cone(seg, theta_max, level, f)
}

/// Sector {r <= rho, angle(x - c, axis) <= theta_max} with the flat element.
fn integrate_sector(
    seg: &Segment,
    theta_max: f64,
    level: u32,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> f64 {
    let rho = seg.radius;
    let (rn, rw) = composite_rule(0.0, rho, level);
    if seg.center.len() == 2 {
        let e1 = rot90(&seg.axis);
        let (tn, tw) = composite_rule(-theta_max, theta_max, level);
        let mut total = 0.0;
        for (&t, &wt) in tn.iter().zip(&tw) {
            let (st, ct) = t.sin_cos();
            for (&r, &wr) in rn.iter().zip(&rw) {
                let p = [
                    seg.center[0] + r * (ct * seg.axis[0] + st * e1[0]),
                    seg.center[1] + r * (ct * seg.axis[1] + st * e1[1]),
                ];
                total += wt * wr * r * f(&p);
            }
        }
        total
    } else {
        let (e1, e2) = complement3(&seg.axis);
        let (tn, tw) = composite_rule(0.0, theta_max, level);
        let m = azimuth_count(level);
        let dpsi = 2.0 * std::f64::consts::PI / m as f64;
        let mut total = 0.0;
        for (&t, &wt) in tn.iter().zip(&tw) {
            let (st, ct) = t.sin_cos();
            for (&r, &wr) in rn.iter().zip(&rw) {
                for k in 0..m {
                    let psi = dpsi * k as f64;
                    let (sp, cp) = psi.sin_cos();
                    let p: Vec<f64> = (0..3)
                        .map(|i| {
                            seg.center[i]
                                + r * (ct * seg.axis[i] + st * (cp * e1[i] + sp * e2[i]))
                        })
                        .collect();
                    total += wt * wr * dpsi * r * r * st * f(&p);
                }
            }
        }
        total
    }
}

/// Cone from the center to the chord disk: axial slices z in [0, a] with
/// cross-section radius z tan(theta_max).
fn integrate_cone(
    seg: &Segment,
    theta_max: f64,
    level: u32,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> f64 {
    if seg.a <= 0.0 {
        return 0.0;
    }
    let tan_t = theta_max.tan();
    let (zn, zw) = composite_rule(0.0, seg.a, level);
    if seg.center.len() == 2 {
        let e1 = rot90(&seg.axis);
        let mut total = 0.0;
        for (&z, &wz) in zn.iter().zip(&zw) {
            let half = z * tan_t;
            let (yn, yw) = composite_rule(-half, half, level);
            for (&y, &wy) in yn.iter().zip(&yw) {
                let p = [
                    seg.center[0] + z * seg.axis[0] + y * e1[0],
                    seg.center[1] + z * seg.axis[1] + y * e1[1],
                ];
                total += wz * wy * f(&p);
            }
        }
        total
    } else {
        let (e1, e2) = complement3(&seg.axis);
        let m = azimuth_count(level);
        let dpsi = 2.0 * std::f64::consts::PI / m as f64;
        let mut total = 0.0;
        for (&z, &wz) in zn.iter().zip(&zw) {
            let rad = z * tan_t;
            let (rn, rw) = composite_rule(0.0, rad, level);
            for (&r, &wr) in rn.iter().zip(&rw) {
                for k in 0..m {
                    let psi = dpsi * k as f64;
                    let (sp, cp) = psi.sin_cos();
                    let p: Vec<f64> = (0..3)
                        .map(|i| seg.center[i] + z * seg.axis[i] + r * (cp * e1[i] + sp * e2[i]))
                        .collect();
                    total += wz * wr * dpsi * r * f(&p);
                }
            }
        }
        total
    }
}

/// Integrates f over a full ball with the flat volume element.
pub fn integrate_ball(center: &[f64], radius: f64, level: u32, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    if center.len() == 2 {
        let (rn, rw) = composite_rule(0.0, radius, level);
        let m = azimuth_count(level + 1);
        let dpsi = 2.0 * std::f64::consts::PI / m as f64;
        let mut total = 0.0;
        for (&r, &wr) in rn.iter().zip(&rw) {
            for k in 0..m {
                let psi = dpsi * k as f64;
                let p = [center[0] + r * psi.cos(), center[1] + r * psi.sin()];
                total += wr * dpsi * r * f(&p);
            }
        }
        total
    } else {
        let (tn, tw) = composite_rule(0.0, std::f64::consts::PI, level);
        let (rn, rw) = composite_rule(0.0, radius, level);
        let m = azimuth_count(level);
        let dpsi = 2.0 * std::f64::consts::PI / m as f64;
        let mut total = 0.0;
        for (&t, &wt) in tn.iter().zip(&tw) {
            let (st, ct) = t.sin_cos();
            for (&r, &wr) in rn.iter().zip(&rw) {
                for k in 0..m {
                    let psi = dpsi * k as f64;
                    let (sp, cp) = psi.sin_cos();
                    let p = [
                        center[0] + r * st * cp,
                        center[1] + r * st * sp,
                        center[2] + r * ct,
                    ];
                    total += wt * wr * dpsi * r * r * st * f(&p);
                }
            }
        }
        total
    }
}

/// Splits a cap domain into spherical segments sharing the chord plane.
pub fn omega_segments(config: &CapConfig) -> Result<Vec<Segment>> {
    let geom = config.geometry()?;
    match (&config.support, &config.cap) {
        (
            crate::cap::ChartSurface::Sphere {
                center: oc,
                radius: r1,
                ..
            },
            crate::cap::ChartSurface::Sphere {
                center: cc,
                radius: r2,
                omega_inside,
            },
        ) => {
            if !omega_inside {
                return Err(Error::Config(
                    "volume quadrature needs Omega inside the cap sphere".into(),
                ));
            }
            let u = geom.corner_axis.clone();
            let dist = norm(&cc.iter().zip(oc).map(|(a, b)| a - b).collect::<Vec<_>>());
            let a1 = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
            let a2 = dist - a1;
            Ok(vec![
                Segment {
                    center: oc.clone(),
                    radius: *r1,
                    axis: u.clone(),
                    a: a1,
                },
                Segment {
                    center: cc.clone(),
                    radius: *r2,
                    axis: u.iter().map(|c| -c).collect(),
                    a: a2,
                },
            ])
        }
        (
            crate::cap::ChartSurface::Plane { coeffs, rhs },
            crate::cap::ChartSurface::Sphere {
                center: cc,
                radius: r2,
                omega_inside,
            },
        ) => {
            if !omega_inside {
                return Err(Error::Config(
                    "volume quadrature needs Omega inside the cap sphere".into(),
                ));
            }
            let an = norm(coeffs);
            let n_hat: Vec<f64> = coeffs.iter().map(|c| c / an).collect();
            let hgt = (dot(coeffs, cc) - rhs) / an;
            Ok(vec![Segment {
                center: cc.clone(),
                radius: *r2,
                axis: n_hat,
                a: -hgt,
            }])
        }
        _ => Err(Error::Config("unsupported cap configuration".into())),
    }
}

/// Integrates f over Omega with the flat volume element.
pub fn integrate_omega(
    config: &CapConfig,
    level: u32,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> Result<f64> {
    let segs = omega_segments(config)?;
    Ok(segs
        .iter()
        .map(|s| integrate_segment(s, level, f))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::ChartSurface;
    use crate::geometry::Model;

    #[test]
    fn gauss_nodes_match_known_values() {
        let (x, w) = gauss_legendre(3);
        assert!((x[0] + 0.6f64.sqrt()).abs() < 1e-14);
        assert!(x[1].abs() < 1e-14);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-14);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-14);
        let (_, w5) = gauss_legendre(5);
        assert!((w5.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_integrates_polynomials_exactly() {
        // 3-point Gauss is exact through degree 5
        let (n, w) = composite_rule(0.0, 2.0, 1);
        let int: f64 = n.iter().zip(&w).map(|(&x, &wt)| wt * x.powi(5)).sum();
        assert!((int - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn radau_rule_is_exact_to_degree_four_and_asymmetric() {
        for k in 0..=4u32 {
            let (n, w) = composite_radau(-1.0, 1.0, 0);
            let int: f64 = n.iter().zip(&w).map(|(&x, &wt)| wt * x.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((int - exact).abs() < 1e-14, "degree {k}: {int} vs {exact}");
        }
        // degree 5 is inexact, and the error of an odd integrand does not
        // cancel, unlike Gauss panels
        let odd = |x: f64| (3.0 * x).sin();
        let mut errs = Vec::new();
        for level in 0..4 {
            let (n, w) = composite_radau(-1.0, 1.0, level);
            let int: f64 = n.iter().zip(&w).map(|(&x, &wt)| wt * odd(x)).sum();
            errs.push(int.abs());
        }
        assert!(errs[0] > 1e-6);
        for pair in errs.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        let (n, _) = composite_radau(0.0, 1.0, 2);
        assert!((n.last().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ball_volume_2d_and_3d() {
        let v2 = integrate_ball(&[0.3, -0.1], 0.7, 3, &mut |_| 1.0);
        assert!((v2 - std::f64::consts::PI * 0.49).abs() < 1e-10);
        let v3 = integrate_ball(&[0.0, 0.2, 0.1], 0.5, 3, &mut |_| 1.0);
        assert!((v3 - 4.0 / 3.0 * std::f64::consts::PI * 0.125).abs() < 1e-8);
    }

    #[test]
    fn segment_area_matches_closed_form() {
        // circular segment: area = rho^2 (theta - sin theta cos theta), a = rho cos theta
        let rho = 0.8f64;
        let a = 0.3f64;
        let theta = (a / rho).acos();
        let exact = rho * rho * theta - a * (rho * rho - a * a).sqrt();
        let seg = Segment {
            center: vec![0.1, 0.2],
            radius: rho,
            axis: vec![0.6, 0.8],
            a,
        };
        let got = integrate_segment(&seg, 4, &mut |_| 1.0);
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
    }

    #[test]
    fn major_segment_complements_minor() {
        let rho = 0.8;
        let area = std::f64::consts::PI * rho * rho;
        let minor = Segment {
            center: vec![0.0, 0.0],
            radius: rho,
            axis: vec![0.0, 1.0],
            a: 0.3,
        };
        let major = Segment {
            center: vec![0.0, 0.0],
            radius: rho,
            axis: vec![0.0, -1.0],
            a: -0.3,
        };
        let m1 = integrate_segment(&minor, 4, &mut |_| 1.0);
        let m2 = integrate_segment(&major, 4, &mut |_| 1.0);
        assert!((m1 + m2 - area).abs() < 1e-9);
    }

    #[test]
    fn spherical_segment_3d_volume() {
        // cap of height h: V = pi h^2 (3 rho - h) / 3
        let rho = 0.6;
        let a = 0.2;
        let h = rho - a;
        let exact = std::f64::consts::PI * h * h * (3.0 * rho - h) / 3.0;
        let seg = Segment {
            center: vec![0.0, 0.1, -0.2],
            radius: rho,
            axis: vec![0.0, 0.6, 0.8],
            a,
        };
        let got = integrate_segment(&seg, 3, &mut |_| 1.0);
        assert!((got - exact).abs() < 1e-7, "{got} vs {exact}");
    }

    #[test]
    fn lens_area_from_two_segments() {
        // b = 1/3 lens: sum of two circular segments across the chord at
        // height 1/5, corner half-width 2/5.
        let config = CapConfig {
            model: Model::ball(2),
            support: ChartSurface::Sphere {
                center: vec![0.0, -1.0 / 3.0],
                radius: 2.0 / 3.0,
                omega_inside: true,
            },
            cap: ChartSurface::Sphere {
                center: vec![0.0, 0.5],
                radius: 0.5,
                omega_inside: true,
            },
        };
        let segment_area = |rho: f64, a: f64| rho * rho * (a / rho).acos() - a * (rho * rho - a * a).sqrt();
        let exact = segment_area(2.0 / 3.0, 8.0 / 15.0) + segment_area(0.5, 0.3);
        let got = integrate_omega(&config, 4, &mut |_| 1.0).unwrap();
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
    }

    #[test]
    fn patch_area_sums() {
        // 2d: arc length of a cap with cos theta = 0.5 on radius 0.4
        let patch = CapPatch::SphereCap {
            center: vec![0.0, 0.0],
            radius: 0.4,
            axis: vec![0.0, 1.0],
            cos_theta_max: 0.5,
        };
        let total: f64 = patch_samples(&patch, 3).iter().map(|s| s.weight).sum();
        let expect = 2.0 * 0.4 * (0.5f64).acos();
        assert!((total - expect).abs() < 1e-12);
        // 3d: spherical cap area 2 pi rho^2 (1 - cos theta)
        let patch3 = CapPatch::SphereCap {
            center: vec![0.0, 0.0, 0.0],
            radius: 0.4,
            axis: vec![0.0, 0.0, 1.0],
            cos_theta_max: 0.5,
        };
        let total3: f64 = patch_samples(&patch3, 3).iter().map(|s| s.weight).sum();
        let expect3 = 2.0 * std::f64::consts::PI * 0.16 * 0.5;
        assert!((total3 - expect3).abs() < 1e-9);
    }

    #[test]
    fn curve_length_matches_arc() {
        let curve = Curve2::Arc {
            center: [0.2, 0.1],
            radius: 0.5,
            phi0: -0.4,
            phi1: 1.1,
        };
        let len: f64 = curve_samples(&curve, 2).iter().map(|s| s.weight).sum();
        assert!((len - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lens_check_a2_negative_for_thin_lens() {
        // b = 0.1: the cap-side piece is a major segment; the decomposition
        // must still recover the lens area.
        let config = CapConfig {
            model: Model::ball(2),
            support: ChartSurface::Sphere {
                center: vec![0.0, -0.1],
                radius: 0.9,
                omega_inside: true,
            },
            cap: ChartSurface::Sphere {
                center: vec![0.0, 0.5],
                radius: 0.5,
                omega_inside: true,
            },
        };
        let segs = omega_segments(&config).unwrap();
        assert!(segs[1].a < 0.0);
        let segment_area = |rho: f64, a: f64| rho * rho * (a / rho).acos() - a * (rho * rho - a * a).sqrt();
        // a1 = 0.92 / 1.2, a2 = -1/6: cap side is a major segment
        let exact = segment_area(0.9, 0.92 / 1.2)
            + (std::f64::consts::PI * 0.25 - segment_area(0.5, 1.0 / 6.0));
        let got = integrate_omega(&config, 4, &mut |_| 1.0).unwrap();
        assert!((got - exact).abs() < 1e-9, "{got} vs {exact}");
    }
}
