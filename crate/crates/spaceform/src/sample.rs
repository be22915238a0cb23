//! Seeded deterministic point samplers for the verification suites.
//!
//! Everything routes through one ChaCha8 stream per call site so that a run
//! is reproducible from a single u64 seed, and sampling regions keep a chart
//! margin so absolute residual tolerances are meaningful under the conformal
//! weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cap::{ChartSurface, Curve2, CurvePoint};
use crate::error::{Error, Result};
use crate::fields::{in_sampling_region, UmbilicalCase};
use crate::geometry::{Chart, Model};

/// Default chart margin for ball-like charts: samples keep |x| <= 1 - margin.
pub const BALL_MARGIN: f64 = 0.1;
/// Default lower bound on the height coordinate in the half-space chart.
pub const HALFSPACE_MARGIN: f64 = 0.15;
/// Upper bound of the half-space sampling box.
const HALFSPACE_TOP: f64 = 4.0;
const ATTEMPT_FACTOR: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn margin_for(model: &Model) -> f64 {
    match model.chart {
        Chart::UpperHalfSpace => HALFSPACE_MARGIN,
        _ => BALL_MARGIN,
    }
}

/// Standard normal via Box-Muller; two uniforms per value keeps the stream
/// layout independent of how many values a caller draws.
fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = r.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn unit_direction(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(r)).collect();
        let n = crate::scalar::norm(&v);
        if n > 1e-6 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn draw_box(r: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| r.gen_range(a..b))
        .collect()
}

fn sampling_box(model: &Model) -> (Vec<f64>, Vec<f64>) {
    let d = model.dim;
    match model.chart {
        Chart::UpperHalfSpace => {
            let mut lo = vec![-2.0; d];
            let mut hi = vec![2.0; d];
            lo[d - 1] = HALFSPACE_MARGIN;
            hi[d - 1] = HALFSPACE_TOP;
            (lo, hi)
        }
        _ => {
            let r = 1.0 - BALL_MARGIN;
            (vec![-r; d], vec![r; d])
        }
    }
}

/// Rejection-samples `count` interior points of B^int within the sampling
/// margins of the case's chart.
pub fn case_interior(case: &UmbilicalCase<f64>, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut r = rng(seed);
    let (lo, hi) = sampling_box(&case.model);
    let margin = margin_for(&case.model);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * ATTEMPT_FACTOR {
        let p = draw_box(&mut r, &lo, &hi);
        if in_sampling_region(case, &p, margin) {
            out.push(p);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::Numerical(format!(
        "interior sampler exhausted attempts for case {:?}",
        case.id
    )))
}

/// Samples chart points within the model's sampling region, with no other
/// constraint (used for globally valid identities such as the resolvent).
pub fn model_interior(model: &Model, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let (lo, hi) = sampling_box(model);
    let ok = |p: &[f64]| match model.chart {
        Chart::UpperHalfSpace => true,
        _ => crate::scalar::norm_sq(p) < (1.0 - BALL_MARGIN) * (1.0 - BALL_MARGIN),
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = draw_box(&mut r, &lo, &hi);
        if ok(&p) {
            out.push(p);
        }
    }
    out
}

/// Samples points on a chart surface, rejecting those outside the model's
/// sampling region.
pub fn surface_points(
    model: &Model,
    surface: &ChartSurface<f64>,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut r = rng(seed);
    let d = model.dim;
    let margin = margin_for(model);
    let in_region = |p: &[f64]| match model.chart {
        Chart::UpperHalfSpace => {
            p[d - 1] > margin && p[d - 1] < HALFSPACE_TOP && p[..d - 1].iter().all(|c| c.abs() < 2.0)
        }
        _ => crate::scalar::norm_sq(p) < (1.0 - margin) * (1.0 - margin),
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * ATTEMPT_FACTOR {
        let p = match surface {
            ChartSurface::Sphere { center, radius, .. } => {
                let dir = unit_direction(&mut r, d);
                center
                    .iter()
                    .zip(&dir)
                    .map(|(c, u)| c + radius * u)
                    .collect::<Vec<f64>>()
            }
            ChartSurface::Plane { coeffs, rhs } => {
                // overwrite the largest-coefficient coordinate to land on the plane
                let (imax, amax) = coeffs
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .map(|(i, a)| (i, *a))
                    .unwrap();
                let mut p = match model.chart {
                    Chart::UpperHalfSpace => {
                        let mut q = vec![0.0; d];
                        for (i, c) in q.iter_mut().enumerate() {
                            *c = if i == d - 1 {
                                r.gen_range(margin..HALFSPACE_TOP)
                            } else {
                                r.gen_range(-1.5..1.5)
                            };
                        }
                        q
                    }
                    _ => (0..d).map(|_| r.gen_range(-0.9..0.9)).collect(),
                };
                let partial: f64 = coeffs
                    .iter()
                    .zip(&p)
                    .enumerate()
                    .filter(|(i, _)| *i != imax)
                    .map(|(_, (c, x))| c * x)
                    .sum();
                p[imax] = (rhs - partial) / amax;
                p
            }
        };
        if in_region(&p) {
            out.push(p);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::Numerical(
        "surface sampler exhausted attempts".into(),
    ))
}

/// Surface samples for a case's support surface.
pub fn case_surface(case: &UmbilicalCase<f64>, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    surface_points(&case.model, &case.support_surface(), count, seed)
}

/// Uniform-in-parameter samples along a boundary curve.
pub fn curve_points(curve: &Curve2, count: usize, seed: u64) -> Vec<CurvePoint> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| curve.eval(r.gen_range(0.0..1.0)))
        .collect()
}

/// Rejection samples inside a cap configuration (used for the lens PDE
/// residual checks).
pub fn config_interior(
    config: &crate::cap::CapConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut r = rng(seed);
    let (lo, hi) = sampling_box(&config.model);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * ATTEMPT_FACTOR {
        let p = draw_box(&mut r, &lo, &hi);
        if config.contains(&p) {
            out.push(p);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::Numerical(
        "cap interior sampler exhausted attempts".into(),
    ))
}
