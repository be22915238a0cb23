//! Auxiliary resolvent functions: for each umbilical case and Robin constant
//! c-tilde, the function phi with
//!
//! ```text
//! Hess phi = (1/(n+1) - K phi) g      in the space form,
//! d_N phi  = kappa phi + c-tilde      on the support surface.
//! ```
//!
//! phi is an affine shift of a static potential, so one scalar coefficient
//! c0 absorbs the Robin data. Cases 1 and 3 use the ball chart directly; the
//! equidistant case is carried to the ball chart, where its surface is the
//! chart sphere through the origin with center (tan a / 2, 0, .., 0, 1/2);
//! the spherical case stays in the stereographic chart.
//!
//! Each phi ships with a closed-form companion for |grad phi|^2 derived from
//! the first integral |grad U|^2 + K U^2 = const of the static potential,
//! which keeps later Laplacians of P-type expressions at second order.

use crate::cap::ChartSurface;
use crate::error::{Error, Result};
use crate::fields::{jet_ball_time, jet_stereo_time, CaseId, ScalarField, UmbilicalCase};
use crate::geometry::Model;
use crate::jet::Jet2;
use crate::ops;
use crate::scalar::Real;

/// Resolved auxiliary function for one case and Robin constant.
#[derive(Debug, Clone)]
pub struct AuxFunction<R> {
    pub case_id: CaseId,
    /// Chart where phi lives (ball for the hyperbolic cases, stereographic
    /// for the spherical one).
    pub model: Model,
    /// Surface carrying the Robin condition, in `model`'s chart.
    pub surface: ChartSurface<R>,
    /// Robin slope (the support curvature kappa).
    pub kappa: R,
    pub c_tilde: R,
    /// Solved coefficient: potential multiplier for cases 1, 2, 4; axis
    /// offset of the base point for case 3.
    pub c0: R,
}

impl<R: Real> AuxFunction<R> {
    /// Solves for c0 from the case data and the Robin constant.
    pub fn new(case: &UmbilicalCase<R>, c_tilde: R) -> Result<Self> {
        let d = case.dim();
        let np1 = R::of_usize(d);
        let (model, surface, c0) = match case.id {
            CaseId::GeodesicSphereH => {
                let c0 = (case.kappa / np1 - c_tilde) * case.param.sinh();
                (case.model, case.support_surface(), c0)
            }
            CaseId::EquidistantH => {
                let alpha = case.param;
                let model = Model::ball(d);
                let mut center = vec![R::zero(); d];
                center[0] = alpha.tan() * R::half();
                center[d - 1] = R::half();
                let surface = ChartSurface::Sphere {
                    center,
                    radius: R::half() / alpha.cos(),
                    omega_inside: true,
                };
                let c0 = np1.recip() - c_tilde / alpha.cos();
                (model, surface, c0)
            }
            CaseId::GeodesicPlaneH => {
                let c0 = c_tilde / (R::one() + (R::one() + c_tilde * c_tilde).sqrt());
                (case.model, case.support_surface(), c0)
            }
            CaseId::GeodesicSphereS => {
                let c0 = -(c_tilde + case.kappa / np1) * case.param.sin();
                (case.model, case.support_surface(), c0)
            }
        };
        if !c0.to_f64().map(f64::is_finite).unwrap_or(false) {
            return Err(Error::Numerical(format!(
                "auxiliary coefficient is not finite for {:?}",
                case.id
            )));
        }
        Ok(AuxFunction {
            case_id: case.id,
            model,
            surface,
            kappa: case.kappa,
            c_tilde,
            c0,
        })
    }

    pub fn dim(&self) -> usize {
        self.model.dim
    }

    fn shift(&self) -> R {
        let np1 = R::of_usize(self.dim());
        self.model.k::<R>() / np1
    }

    /// phi as a jet at x.
    pub fn phi_jet(&self, x: &[R]) -> Jet2<R> {
        let c0 = self.c0;
        match self.case_id {
            CaseId::GeodesicSphereH | CaseId::EquidistantH => {
                jet_ball_time(x).scale(c0).add_scalar(self.shift())
            }
            CaseId::GeodesicPlaneH => shifted_cosh_jet(x, c0).add_scalar(self.shift()),
            CaseId::GeodesicSphereS => jet_stereo_time(x).scale(c0).add_scalar(self.shift()),
        }
    }

    /// |grad phi|^2 as a jet at x, from the static-potential first integral.
    pub fn grad_norm_sq_jet(&self, x: &[R]) -> Jet2<R> {
        let c0 = self.c0;
        let one = R::one();
        match self.case_id {
            CaseId::GeodesicSphereH | CaseId::EquidistantH => {
                jet_ball_time(x).sq().add_scalar(-one).scale(c0 * c0)
            }
            CaseId::GeodesicPlaneH => shifted_cosh_jet(x, c0).sq().add_scalar(-one),
            CaseId::GeodesicSphereS => {
                (-&jet_stereo_time(x).sq()).add_scalar(one).scale(c0 * c0)
            }
        }
    }

    /// phi as a scalar field with its |grad phi|^2 companion attached.
    pub fn phi_field(&self) -> ScalarField<R> {
        let this = self.clone();
        let companion = self.clone();
        ScalarField::from_fn(self.model, move |x: &[R]| this.phi_jet(x)).with_grad_norm_sq(
            ScalarField::from_fn(self.model, move |x: &[R]| companion.grad_norm_sq_jet(x)),
        )
    }

    /// Max-entry residual of Hess phi - (1/(n+1) - K phi) g at x.
    pub fn resolvent_residual(&self, x: &[R]) -> Result<R> {
        self.model.check_point(x)?;
        let phi = self.phi_jet(x);
        let np1 = R::of_usize(self.dim());
        let target = np1.recip() - self.model.k::<R>() * phi.v;
        let h = ops::cov_hessian(&self.model, x, &phi);
        Ok(ops::deviation_from_metric_multiple(
            &self.model,
            x,
            &h,
            target,
        ))
    }

    /// Residual of the Robin condition d_N phi - kappa phi - c_tilde at a
    /// surface point.
    pub fn robin_residual(&self, x: &[R]) -> Result<R> {
        self.model.check_point(x)?;
        let res = self.surface.residual(x);
        let tol = R::of(1e-10).max(R::epsilon() * R::of(100.0));
        if res.abs() > tol {
            return Err(Error::Precondition(format!(
                "point is not on the Robin surface (residual {:e})",
                res.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let n = self.surface.unit_normal(&self.model, x);
        let phi = self.phi_jet(x);
        let dn = ops::directional_derivative(&phi, &n);
        Ok(dn - self.kappa * phi.v - self.c_tilde)
    }

    /// Deviation of the |grad phi|^2 companion from the metric gradient norm
    /// computed out of the phi jet itself.
    pub fn companion_residual(&self, x: &[R]) -> Result<R> {
        self.model.check_point(x)?;
        let phi = self.phi_jet(x);
        let direct = ops::grad_norm_sq(&self.model, x, &phi);
        Ok((self.grad_norm_sq_jet(x).v - direct).abs())
    }
}

/// cosh of the distance to the axis point (0, .., 0, c0) in the ball chart:
/// [(1 + c0^2)(1 + |x|^2) - 4 c0 x_d] / [(1 - |x|^2)(1 - c0^2)].
fn shifted_cosh_jet<R: Real>(x: &[R], c0: R) -> Jet2<R> {
    let d = x.len();
    let one = R::one();
    let s = crate::fields::jet_norm_sq(x);
    let xd = Jet2::var(x, d - 1);
    let num = &s.add_scalar(one).scale(one + c0 * c0) - &xd.scale(R::of(4.0) * c0);
    let den = (-&s).add_scalar(one).scale(one - c0 * c0);
    &num / &den
}
