//! The four umbilical support cases and their closed-form field triples
//! (X, V, Y): a conformal vector field X with 1/2 L_X g = V g, its potential
//! V solving Hess V = -K V g, and a Killing field Y with g(N, Y) = V / M on
//! the support surface, where M is the case's Minkowski constant.
//!
//! All formulas are chart-polynomial or rational and evaluated through
//! second-order jets, so covariant derivatives up to the Hessian come out of
//! one evaluation.

use std::sync::Arc;

use crate::cap::ChartSurface;
use crate::error::{Error, Result};
use crate::geometry::Model;
use crate::jet::{Jet2, VecJet};
use crate::scalar::{dot, norm_sq, Real};

type JetFn<R> = Arc<dyn Fn(&[R]) -> Jet2<R> + Send + Sync>;
type VecJetFn<R> = Arc<dyn Fn(&[R]) -> VecJet<R> + Send + Sync>;

/// Scalar field on a chart, evaluated as a second-order jet. May carry a
/// closed-form companion for |grad f|^2 in the chart metric, which avoids
/// third-order differentiation when a Laplacian of that quantity is needed.
pub struct ScalarField<R> {
    model: Model,
    f: JetFn<R>,
    grad_norm_sq: Option<Arc<ScalarField<R>>>,
}

impl<R> Clone for ScalarField<R> {
    fn clone(&self) -> Self {
        ScalarField {
            model: self.model,
            f: Arc::clone(&self.f),
            grad_norm_sq: self.grad_norm_sq.clone(),
        }
    }
}

impl<R: Real> ScalarField<R> {
    pub fn from_fn(model: Model, f: impl Fn(&[R]) -> Jet2<R> + Send + Sync + 'static) -> Self {
        ScalarField {
            model,
            f: Arc::new(f),
            grad_norm_sq: None,
        }
    }

    pub fn with_grad_norm_sq(mut self, g: ScalarField<R>) -> Self {
        self.grad_norm_sq = Some(Arc::new(g));
        self
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn grad_norm_sq(&self) -> Option<&ScalarField<R>> {
        self.grad_norm_sq.as_deref()
    }

    /// Value, gradient, and Hessian at x (flat partials; covariant operators
    /// live in `ops`).
    pub fn eval(&self, x: &[R]) -> Result<Jet2<R>> {
        self.model.check_point(x)?;
        Ok((self.f)(x))
    }

    pub fn value(&self, x: &[R]) -> Result<R> {
        Ok(self.eval(x)?.v)
    }
}

/// Vector field on a chart: components and first partials.
pub struct VectorField<R> {
    model: Model,
    z: VecJetFn<R>,
}

impl<R> Clone for VectorField<R> {
    fn clone(&self) -> Self {
        VectorField {
            model: self.model,
            z: Arc::clone(&self.z),
        }
    }
}

impl<R: Real> VectorField<R> {
    pub fn from_fn(model: Model, z: impl Fn(&[R]) -> VecJet<R> + Send + Sync + 'static) -> Self {
        VectorField {
            model,
            z: Arc::new(z),
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn eval(&self, x: &[R]) -> Result<VecJet<R>> {
        self.model.check_point(x)?;
        Ok((self.z)(x))
    }
}

/// |x|^2 as a jet.
pub(crate) fn jet_norm_sq<R: Real>(x: &[R]) -> Jet2<R> {
    Jet2::norm_sq(&Jet2::coords(x))
}

/// Poincare ball static potential (1 + |x|^2) / (1 - |x|^2).
pub(crate) fn jet_ball_time<R: Real>(x: &[R]) -> Jet2<R> {
    let s = jet_norm_sq(x);
    let one = R::one();
    &s.add_scalar(one) / &(-&s).add_scalar(one)
}

/// Poincare ball static potential 2 x_i / (1 - |x|^2).
pub(crate) fn jet_ball_axis<R: Real>(x: &[R], i: usize) -> Jet2<R> {
    let s = jet_norm_sq(x);
    let xi = Jet2::var(x, i);
    &xi.scale(R::two()) / &(-&s).add_scalar(R::one())
}

/// Stereographic static potential (1 - |x|^2) / (1 + |x|^2).
pub(crate) fn jet_stereo_time<R: Real>(x: &[R]) -> Jet2<R> {
    let s = jet_norm_sq(x);
    let one = R::one();
    &(-&s).add_scalar(one) / &s.add_scalar(one)
}

/// Stereographic potential 2 x_i / (1 + |x|^2).
pub(crate) fn jet_stereo_axis<R: Real>(x: &[R], i: usize) -> Jet2<R> {
    let s = jet_norm_sq(x);
    let xi = Jet2::var(x, i);
    &xi.scale(R::two()) / &s.add_scalar(R::one())
}

/// Half-space static potential 1 / x_d.
pub(crate) fn jet_halfspace_time<R: Real>(x: &[R]) -> Jet2<R> {
    Jet2::var(x, x.len() - 1).recip()
}

/// The four umbilical support surfaces admitting the closed-form solution of
/// the overdetermined system, by ambient space form and surface type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// Geodesic sphere of radius R in hyperbolic space (ball chart).
    GeodesicSphereH,
    /// Equidistant hypersurface at inclination alpha (half-space chart).
    EquidistantH,
    /// Totally geodesic hyperplane in hyperbolic space (ball chart).
    GeodesicPlaneH,
    /// Geodesic sphere of radius R <= pi/2 in the round sphere
    /// (stereographic chart).
    GeodesicSphereS,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::GeodesicSphereH,
        CaseId::EquidistantH,
        CaseId::GeodesicPlaneH,
        CaseId::GeodesicSphereS,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CaseId::GeodesicSphereH => "geodesic-sphere-h",
            CaseId::EquidistantH => "equidistant-h",
            CaseId::GeodesicPlaneH => "geodesic-plane-h",
            CaseId::GeodesicSphereS => "geodesic-sphere-s",
        }
    }

    pub fn parse(s: &str) -> Result<CaseId> {
        match s {
            "geodesic-sphere-h" | "1" => Ok(CaseId::GeodesicSphereH),
            "equidistant-h" | "2" => Ok(CaseId::EquidistantH),
            "geodesic-plane-h" | "3" => Ok(CaseId::GeodesicPlaneH),
            "geodesic-sphere-s" | "4" => Ok(CaseId::GeodesicSphereS),
            other => Err(Error::Config(format!(
                "unknown case {other:?}; expected geodesic-sphere-h, equidistant-h, \
                 geodesic-plane-h, geodesic-sphere-s, or 1-4"
            ))),
        }
    }
}

/// A fully resolved umbilical support case: chart model, geometric parameter,
/// curvature kappa of the support surface, Minkowski constant M, and the
/// chart-space radius of the support sphere where applicable.
#[derive(Debug, Clone)]
pub struct UmbilicalCase<R> {
    pub id: CaseId,
    pub model: Model,
    /// Intrinsic parameter: radius R for the sphere cases, inclination alpha
    /// for the equidistant case, unused (zero) for the geodesic plane.
    pub param: R,
    /// Principal curvature of the support surface.
    pub kappa: R,
    /// Minkowski constant M with g(N, Y) = V / M on the support surface.
    pub minkowski: R,
    /// Euclidean radius of the support sphere in the chart, if the support
    /// is a sphere.
    pub chart_radius: Option<R>,
    /// Whether B^int must stay inside a half-ball (axis coordinate positive)
    /// for the sphere-over-sphere configurations to make sense.
    pub half_ball: bool,
}

/// Builds the case data, validating the parameter range.
pub fn make_case<R: Real>(id: CaseId, param: R, dim: usize) -> Result<UmbilicalCase<R>> {
    let pf = param.to_f64().unwrap_or(f64::NAN);
    if !pf.is_finite() {
        return Err(Error::Config(format!("case parameter must be finite, got {pf}")));
    }
    match id {
        CaseId::GeodesicSphereH => {
            if pf <= 0.0 {
                return Err(Error::Config(format!(
                    "geodesic-sphere-h needs radius R > 0, got {pf}"
                )));
            }
            Ok(UmbilicalCase {
                id,
                model: Model::ball(dim),
                param,
                kappa: param.cosh() / param.sinh(),
                minkowski: param.sinh(),
                chart_radius: Some((param * R::half()).tanh()),
                half_ball: true,
            })
        }
        CaseId::EquidistantH => {
            if !(0.0..std::f64::consts::FRAC_PI_2).contains(&pf) {
                return Err(Error::Config(format!(
                    "equidistant-h needs inclination alpha in [0, pi/2), got {pf}"
                )));
            }
            Ok(UmbilicalCase {
                id,
                model: Model::half_space(dim),
                param,
                kappa: param.cos(),
                minkowski: -param.cos().recip(),
                chart_radius: None,
                half_ball: false,
            })
        }
        CaseId::GeodesicPlaneH => Ok(UmbilicalCase {
            id,
            model: Model::ball(dim),
            param: R::zero(),
            kappa: R::zero(),
            minkowski: -R::one(),
            chart_radius: None,
            half_ball: false,
        }),
        CaseId::GeodesicSphereS => {
            if pf <= 0.0 || pf > std::f64::consts::FRAC_PI_2 {
                return Err(Error::Config(format!(
                    "geodesic-sphere-s needs radius R in (0, pi/2], got {pf}"
                )));
            }
            Ok(UmbilicalCase {
                id,
                model: Model::stereographic(dim),
                param,
                kappa: param.cos() / param.sin(),
                minkowski: param.sin(),
                chart_radius: Some((param * R::half()).tan()),
                half_ball: true,
            })
        }
    }
}

impl<R: Real> UmbilicalCase<R> {
    pub fn dim(&self) -> usize {
        self.model.dim
    }

    /// The support surface as a chart sphere or plane with B^int on the
    /// negative-residual side.
    pub fn support_surface(&self) -> ChartSurface<R> {
        let d = self.dim();
        match self.id {
            CaseId::GeodesicSphereH | CaseId::GeodesicSphereS => ChartSurface::Sphere {
                center: vec![R::zero(); d],
                radius: self.chart_radius.unwrap(),
                omega_inside: true,
            },
            CaseId::EquidistantH => {
                let mut coeffs = vec![R::zero(); d];
                coeffs[0] = self.param.tan();
                coeffs[d - 1] = R::one();
                ChartSurface::Plane {
                    coeffs,
                    rhs: R::one(),
                }
            }
            CaseId::GeodesicPlaneH => {
                let mut coeffs = vec![R::zero(); d];
                coeffs[d - 1] = R::one();
                ChartSurface::Plane {
                    coeffs,
                    rhs: R::zero(),
                }
            }
        }
    }

    /// Signed surface equation, negative inside B^int, polynomial with O(1)
    /// coefficients in chart coordinates.
    pub fn surface_residual(&self, x: &[R]) -> R {
        self.support_surface().residual(x)
    }

    /// True if x lies in the open region B^int (chart domain included).
    pub fn in_interior(&self, x: &[R]) -> bool {
        self.model.contains(x) && self.surface_residual(x) < R::zero()
    }

    /// Chart components of the metric-unit normal to the support surface
    /// pointing away from B^int; errors unless x is on the surface.
    pub fn unit_normal(&self, x: &[R]) -> Result<Vec<R>> {
        self.model.check_point(x)?;
        let res = self.surface_residual(x);
        let tol = R::of(1e-10).max(R::epsilon() * R::of(100.0));
        if res.abs() > tol {
            return Err(Error::Precondition(format!(
                "point is not on the support surface (residual {:e})",
                res.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(self.support_surface().unit_normal(&self.model, x))
    }

    /// The conformal field X of the case triple.
    pub fn x_field(&self) -> VectorField<R> {
        let id = self.id;
        let rr = self.chart_radius.unwrap_or(R::zero());
        VectorField::from_fn(self.model, move |x: &[R]| {
            VecJet::from_components(&case_x_jets(id, rr, x))
        })
    }

    /// The potential V with Hess V = -K V g and 1/2 L_X g = V g.
    pub fn v_field(&self) -> ScalarField<R> {
        let id = self.id;
        ScalarField::from_fn(self.model, move |x: &[R]| case_v_jet(id, x))
    }

    /// The Killing field Y with g(N, Y) = V / M on the support surface.
    pub fn y_field(&self) -> VectorField<R> {
        let id = self.id;
        VectorField::from_fn(self.model, move |x: &[R]| {
            VecJet::from_components(&case_y_jets(id, x))
        })
    }

    /// Evaluates the whole triple at one point.
    pub fn eval_xvy(&self, x: &[R]) -> Result<(VecJet<R>, Jet2<R>, VecJet<R>)> {
        self.model.check_point(x)?;
        let rr = self.chart_radius.unwrap_or(R::zero());
        Ok((
            VecJet::from_components(&case_x_jets(self.id, rr, x)),
            case_v_jet(self.id, x),
            VecJet::from_components(&case_y_jets(self.id, x)),
        ))
    }

    /// g(N, Y) and V / M at a surface point; the two agree on the support
    /// surface.
    pub fn normal_potential_ratio(&self, x: &[R]) -> Result<(R, R)> {
        let n = self.unit_normal(x)?;
        let y = self.y_field().eval(x)?;
        let w = self.model.conformal_factor(x);
        let g_ny = w * w * dot(&n, &y.comp);
        let v = self.v_field().value(x)?;
        Ok((g_ny, v / self.minkowski))
    }
}

/// Components of X for each case as jets.
fn case_x_jets<R: Real>(id: CaseId, rr: R, x: &[R]) -> Vec<Jet2<R>> {
    let d = x.len();
    let xd = Jet2::var(x, d - 1);
    match id {
        CaseId::GeodesicSphereH | CaseId::GeodesicSphereS => {
            let s = jet_norm_sq(x);
            let sign = if id == CaseId::GeodesicSphereH {
                -R::one()
            } else {
                R::one()
            };
            // 2 / (1 -+ Rr^2) * [x_d x - (|x|^2 + Rr^2)/2 E_d]
            let c = R::two() / (R::one() + sign * rr * rr);
            let half_term = s.add_scalar(rr * rr).scale(R::half());
            (0..d)
                .map(|i| {
                    let xi = Jet2::var(x, i);
                    let mut out = &xd * &xi;
                    if i == d - 1 {
                        out = &out - &half_term;
                    }
                    out.scale(c)
                })
                .collect()
        }
        CaseId::EquidistantH => (0..d)
            .map(|i| {
                let xi = Jet2::var(x, i);
                if i == d - 1 {
                    xi.add_scalar(-R::one())
                } else {
                    xi
                }
            })
            .collect(),
        CaseId::GeodesicPlaneH => Jet2::coords(x),
    }
}

/// V for each case as a jet.
fn case_v_jet<R: Real>(id: CaseId, x: &[R]) -> Jet2<R> {
    let d = x.len();
    match id {
        CaseId::GeodesicSphereH => jet_ball_axis(x, d - 1),
        CaseId::EquidistantH => jet_halfspace_time(x),
        CaseId::GeodesicPlaneH => jet_ball_time(x),
        CaseId::GeodesicSphereS => jet_stereo_axis(x, d - 1),
    }
}

/// Components of Y for each case as jets.
fn case_y_jets<R: Real>(id: CaseId, x: &[R]) -> Vec<Jet2<R>> {
    let d = x.len();
    let xd = Jet2::var(x, d - 1);
    match id {
        CaseId::GeodesicSphereH | CaseId::GeodesicPlaneH => {
            // (1 + |x|^2)/2 E_d - x_d x
            let s = jet_norm_sq(x);
            let head = s.add_scalar(R::one()).scale(R::half());
            (0..d)
                .map(|i| {
                    let xi = Jet2::var(x, i);
                    let mut out = -&(&xd * &xi);
                    if i == d - 1 {
                        out = &out + &head;
                    }
                    out
                })
                .collect()
        }
        CaseId::EquidistantH => Jet2::coords(x),
        CaseId::GeodesicSphereS => {
            // (1 - |x|^2)/2 E_d + x_d x
            let s = jet_norm_sq(x);
            let head = (-&s).add_scalar(R::one()).scale(R::half());
            (0..d)
                .map(|i| {
                    let xi = Jet2::var(x, i);
                    let mut out = &xd * &xi;
                    if i == d - 1 {
                        out = &out + &head;
                    }
                    out
                })
                .collect()
        }
    }
}

/// Membership check used by samplers: inside B^int, with an extra chart
/// margin so absolute tolerances survive the conformal weight.
pub fn in_sampling_region<R: Real>(case: &UmbilicalCase<R>, x: &[R], margin: R) -> bool {
    if !case.in_interior(x) {
        return false;
    }
    match case.model.chart {
        crate::geometry::Chart::PoincareBall | crate::geometry::Chart::Stereographic => {
            norm_sq(x) < (R::one() - margin) * (R::one() - margin)
        }
        crate::geometry::Chart::UpperHalfSpace => x[x.len() - 1] > margin,
    }
}
