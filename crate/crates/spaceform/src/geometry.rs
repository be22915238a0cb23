//! Conformal charts of the simply connected space forms of curvature +-1.
//!
//! All three charts are conformally flat, with metric w(x)^2 * delta:
//! the Poincare ball and upper half-space for curvature -1, and the
//! stereographic chart for curvature +1. The stereographic chart covers the
//! sphere minus the projection pole; distances there are computed through the
//! clamped arccosine of the two-point cosine formula, so no antipodal
//! wraparound branch is needed.

use crate::error::{Error, Result};
use crate::scalar::{dot, norm_sq, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    PoincareBall,
    UpperHalfSpace,
    Stereographic,
}

/// A space form M^{n+1}(K) presented in one conformal chart.
///
/// `dim` is the ambient dimension n+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Model {
    pub chart: Chart,
    pub dim: usize,
    k: i8,
}

impl Model {
    pub fn new(k: i8, chart: Chart, dim: usize) -> Result<Self> {
        let expected = match chart {
            Chart::PoincareBall | Chart::UpperHalfSpace => -1,
            Chart::Stereographic => 1,
        };
        if k != expected {
            return Err(Error::Config(format!(
                "chart {chart:?} carries curvature {expected}, got {k}"
            )));
        }
        if dim < 2 {
            return Err(Error::Config(format!("ambient dimension {dim} < 2")));
        }
        Ok(Model { chart, dim, k })
    }

    pub fn ball(dim: usize) -> Self {
        Self::new(-1, Chart::PoincareBall, dim).unwrap()
    }

    pub fn half_space(dim: usize) -> Self {
        Self::new(-1, Chart::UpperHalfSpace, dim).unwrap()
    }

    pub fn stereographic(dim: usize) -> Self {
        Self::new(1, Chart::Stereographic, dim).unwrap()
    }

    /// Sectional curvature K as a scalar.
    pub fn k<R: Real>(&self) -> R {
        R::of(self.k as f64)
    }

    pub fn k_sign(&self) -> i8 {
        self.k
    }

    pub fn contains<R: Real>(&self, x: &[R]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match self.chart {
            Chart::PoincareBall => norm_sq(x) < R::one(),
            Chart::UpperHalfSpace => x[self.dim - 1] > R::zero(),
            Chart::Stereographic => x.iter().all(|c| c.is_finite()),
        }
    }

    pub fn check_point<R: Real>(&self, x: &[R]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point {:?} not in chart {:?} (dim {})",
                x.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
                self.chart,
                self.dim
            )))
        }
    }

    /// Conformal factor w with metric w^2 * delta.
    pub fn conformal_factor<R: Real>(&self, x: &[R]) -> R {
        match self.chart {
            Chart::PoincareBall => R::two() / (R::one() - norm_sq(x)),
            Chart::UpperHalfSpace => x[self.dim - 1].recip(),
            Chart::Stereographic => R::two() / (R::one() + norm_sq(x)),
        }
    }

    /// Flat gradient of ln w, the only chart data covariant operators need.
    pub fn dlnw<R: Real>(&self, x: &[R]) -> Vec<R> {
        match self.chart {
            Chart::PoincareBall => {
                let c = R::two() / (R::one() - norm_sq(x));
                x.iter().map(|&xi| c * xi).collect()
            }
            Chart::UpperHalfSpace => {
                let mut g = vec![R::zero(); self.dim];
                g[self.dim - 1] = -x[self.dim - 1].recip();
                g
            }
            Chart::Stereographic => {
                let c = -R::two() / (R::one() + norm_sq(x));
                x.iter().map(|&xi| c * xi).collect()
            }
        }
    }

    /// psi_dot of the geodesic distance from `base` to `x`: cosh d for K = -1,
    /// cos d for K = +1. Closed form, rational in the chart coordinates.
    pub fn cosh_or_cos_distance_from<R: Real>(&self, base: &[R], x: &[R]) -> Result<R> {
        self.check_point(base)?;
        self.check_point(x)?;
        let one = R::one();
        Ok(match self.chart {
            Chart::PoincareBall => {
                let diff: R = base.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum();
                one + R::two() * diff / ((one - norm_sq(base)) * (one - norm_sq(x)))
            }
            Chart::UpperHalfSpace => {
                let diff: R = base.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum();
                one + diff / (R::two() * base[self.dim - 1] * x[self.dim - 1])
            }
            Chart::Stereographic => {
                let sb = norm_sq(base);
                let sx = norm_sq(x);
                (R::of(4.0) * dot(base, x) + (one - sb) * (one - sx))
                    / ((one + sb) * (one + sx))
            }
        })
    }

    /// Metric pairing of flat vectors at x: w(x)^2 <v, u>.
    pub fn metric_inner<R: Real>(&self, x: &[R], v: &[R], u: &[R]) -> Result<R> {
        self.check_point(x)?;
        let w = self.conformal_factor(x);
        Ok(w * w * crate::scalar::dot(v, u))
    }

    /// Geodesic distance between two chart points.
    pub fn geodesic_distance<R: Real>(&self, x: &[R], y: &[R]) -> Result<R> {
        let c = self.cosh_or_cos_distance_from(x, y)?;
        Ok(match self.chart {
            Chart::PoincareBall | Chart::UpperHalfSpace => c.max(R::one()).acosh(),
            Chart::Stereographic => c.min(R::one()).max(-R::one()).acos(),
        })
    }
}

/// Maps the upper half-space chart onto the Poincare ball chart by the
/// standard sphere-inversion composed with a plane reflection. Hyperbolic
/// isometry; sends (0,...,0,1) to the origin and the equidistant planes
/// {x_1 tan a + x_{n+1} = 1} onto chart spheres of center
/// (tan(a)/2, 0, ..., 0, 1/2) and radius sec(a)/2.
pub fn halfspace_to_ball<R: Real>(x: &[R]) -> Result<Vec<R>> {
    let d = x.len();
    if x[d - 1] <= R::zero() {
        return Err(Error::Domain("half-space point has x_d <= 0".into()));
    }
    let horiz: R = x[..d - 1].iter().map(|&c| c * c).sum();
    let denom = horiz + (x[d - 1] + R::one()) * (x[d - 1] + R::one());
    let mut out: Vec<R> = x[..d - 1].iter().map(|&c| R::two() * c / denom).collect();
    out.push((norm_sq(x) - R::one()) / denom);
    Ok(out)
}

/// Warped-product profile psi with psi(0) = 0, psi_dot(0) = 1:
/// sinh for K = -1, sin for K = +1.
#[derive(Debug, Clone, Copy)]
pub struct WarpedProfile {
    k: i8,
}

impl WarpedProfile {
    pub fn new(k: i8) -> Result<Self> {
        if k == 1 || k == -1 {
            Ok(WarpedProfile { k })
        } else {
            Err(Error::Config(format!("curvature must be +-1, got {k}")))
        }
    }

    pub fn psi<R: Real>(&self, r: R) -> R {
        if self.k < 0 {
            r.sinh()
        } else {
            r.sin()
        }
    }

    pub fn psi_dot<R: Real>(&self, r: R) -> R {
        if self.k < 0 {
            r.cosh()
        } else {
            r.cos()
        }
    }

    pub fn psi_ddot<R: Real>(&self, r: R) -> R {
        -R::of(self.k as f64) * self.psi(r)
    }

    pub fn psi_dddot<R: Real>(&self, r: R) -> R {
        -R::of(self.k as f64) * self.psi_dot(r)
    }
}

/// Euclidean distance helper used by chart-surface code.
pub fn dist<R: Real>(a: &[R], b: &[R]) -> R {
    let d: R = a.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum();
    d.sqrt()
}

pub use crate::scalar::{dot as flat_dot, norm as flat_norm, norm_sq as flat_norm_sq};
