//! Exact mixed Dirichlet-Robin solution on a horospherical lens in the
//! hyperbolic plane, used as ground truth for solver and identity tests.
//!
//! In the ball chart (dimension 2), the lens Omega(b) for b in (0, 1/2) is
//! bounded by two horocycles:
//!
//! * L1 = {|x|^2 = x_2}, carrying the Dirichlet piece Sigma,
//! * L2 = {|x'|^2 + (x_2 + b)^2 = (1 - b)^2}, carrying the Robin piece T
//!   with slope kappa = 1 and constant c-tilde = (1 - 3b) / (2 (1 - b)).
//!
//! The function u = (|x|^2 - x_2) / (1 - |x|^2) solves
//! Delta u - 2 u = 1 with u = 0 on L1 and the Robin condition on L2, is
//! nonpositive on the lens, and satisfies |grad u|^2 = (u + 1/2)^2, so the
//! Dirichlet piece carries the exact overdetermined data |grad u| = 1/2.
//!
//! The auxiliary function phi = (1 + |x|^2) / (1 - |x|^2) - 1/2 satisfies
//! the same Robin data for every b. An optional odd static component
//! gamma * 2 x_1 / (1 - |x|^2) can be mixed in without changing the Robin
//! constant (its adapted constant on L2 vanishes by reflection symmetry);
//! with gamma = 0 the difference u - phi is exactly -V/2 for the adapted
//! potential V below and several surface integrands vanish pointwise, so
//! convergence studies use gamma != 0.

use crate::aux::AuxFunction;
use crate::cap::{CapConfig, ChartSurface};
use crate::error::{Error, Result};
use crate::fields::{jet_ball_axis, jet_ball_time, jet_norm_sq, CaseId, ScalarField};
use crate::geometry::Model;
use crate::jet::Jet2;

/// Lens parameter bundle; all fields are exact expressions in b.
#[derive(Debug, Clone, Copy)]
pub struct HoroLens {
    pub b: f64,
    /// Coefficient of the odd static component in phi.
    pub gamma: f64,
}

impl HoroLens {
    pub fn new(b: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&b) || b == 0.0 {
            return Err(Error::Config(format!(
                "lens parameter must satisfy 0 < b < 1/2, got {b}"
            )));
        }
        Ok(HoroLens { b, gamma: 0.0 })
    }

    pub fn with_gamma(b: f64, gamma: f64) -> Result<Self> {
        Ok(HoroLens {
            gamma,
            ..Self::new(b)?
        })
    }

    pub fn model(&self) -> Model {
        Model::ball(2)
    }

    /// Robin slope on T (both boundary circles are horocycles).
    pub fn kappa(&self) -> f64 {
        1.0
    }

    /// Minkowski constant of the horocycle support.
    pub fn minkowski(&self) -> f64 {
        -1.0
    }

    pub fn c_tilde(&self) -> f64 {
        (1.0 - 3.0 * self.b) / (2.0 * (1.0 - self.b))
    }

    /// Flat cosine of the contact angle at the corners.
    pub fn cos_contact_angle(&self) -> f64 {
        -(1.0 - 3.0 * self.b) / (1.0 - self.b)
    }

    /// Chart height of the corner points; their first coordinates are
    /// +-sqrt(1/4 - (height - 1/2)^2).
    pub fn corner_height(&self) -> f64 {
        (1.0 - 2.0 * self.b) / (1.0 + 2.0 * self.b)
    }

    /// Omega as a cap configuration: support L2 (Robin), cap L1 (Dirichlet).
    pub fn cap_config(&self) -> CapConfig {
        CapConfig {
            model: self.model(),
            support: ChartSurface::Sphere {
                center: vec![0.0, -self.b],
                radius: 1.0 - self.b,
                omega_inside: true,
            },
            cap: ChartSurface::Sphere {
                center: vec![0.0, 0.5],
                radius: 0.5,
                omega_inside: true,
            },
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.cap_config().contains(x)
    }

    /// The gamma = 0 auxiliary function packaged with the support data. The
    /// horocycle support is the limiting member of the ball-time potential
    /// family, so the aux evaluator applies with unit coefficient.
    pub fn aux_function(&self) -> AuxFunction<f64> {
        AuxFunction {
            case_id: CaseId::EquidistantH,
            model: self.model(),
            surface: ChartSurface::Sphere {
                center: vec![0.0, -self.b],
                radius: 1.0 - self.b,
                omega_inside: true,
            },
            kappa: self.kappa(),
            c_tilde: self.c_tilde(),
            c0: 1.0,
        }
    }

    /// The exact solution u = (|x|^2 - x_2) / (1 - |x|^2) with its
    /// |grad u|^2 = (u + 1/2)^2 companion.
    pub fn u_field(&self) -> ScalarField<f64> {
        let model = self.model();
        ScalarField::from_fn(model, u_jet)
            .with_grad_norm_sq(ScalarField::from_fn(model, |x: &[f64]| {
                u_jet(x).add_scalar(0.5).sq()
            }))
    }

    /// Adapted static potential V = (1 + |x|^2 + 2 x_2) / (1 - |x|^2) with
    /// homogeneous Robin data on L2 and |grad V|^2 = V^2.
    pub fn v_field(&self) -> ScalarField<f64> {
        self.v_field_with(0.0)
    }

    /// Adapted potential skewed by the odd one, V + skew 2 x_1/(1 - |x|^2).
    /// Both summands satisfy d_N V = V on L2, so any skew is admissible; a
    /// nonzero skew makes Wronskian-type integrands on the symmetric lens
    /// pointwise nonzero, which convergence studies need. The companion is
    /// |grad V|^2 = V^2 + skew^2.
    pub fn v_field_with(&self, skew: f64) -> ScalarField<f64> {
        let model = self.model();
        ScalarField::from_fn(model, move |x: &[f64]| v_jet_skew(x, skew))
            .with_grad_norm_sq(ScalarField::from_fn(model, move |x: &[f64]| {
                v_jet_skew(x, skew).sq().add_scalar(skew * skew)
            }))
    }

    /// Auxiliary phi = (1 + |x|^2)/(1 - |x|^2) - 1/2 + gamma 2 x_1/(1 - |x|^2)
    /// with |grad phi|^2 = (phi + 1/2)^2 + gamma^2 - 1.
    pub fn phi_field(&self) -> ScalarField<f64> {
        let model = self.model();
        let gamma = self.gamma;
        ScalarField::from_fn(model, move |x: &[f64]| phi_jet(x, gamma)).with_grad_norm_sq(
            ScalarField::from_fn(model, move |x: &[f64]| {
                // static part S = phi + 1/2 satisfies |grad S|^2 - S^2 = gamma^2 - 1
                phi_jet(x, gamma)
                    .add_scalar(0.5)
                    .sq()
                    .add_scalar(gamma * gamma - 1.0)
            }),
        )
    }

    /// u - phi as one field; for gamma = 0 this is exactly -V/2.
    pub fn u_minus_phi_field(&self) -> ScalarField<f64> {
        let model = self.model();
        let gamma = self.gamma;
        ScalarField::from_fn(model, move |x: &[f64]| &u_jet(x) - &phi_jet(x, gamma))
    }

    /// Valid phi for the sign-flipped Robin constant -c-tilde, the negative
    /// control for the wronskian cancellation: the T-boundary terms of the
    /// identity no longer vanish against it.
    pub fn phi_field_flipped(&self) -> ScalarField<f64> {
        let model = self.model();
        let gamma = self.gamma;
        let lam = self.c_tilde() * (1.0 - self.b) / self.b;
        ScalarField::from_fn(model, move |x: &[f64]| {
            // phi + lam (V3 - W), and V3 - W = 2u + 1
            &phi_jet(x, gamma) + &u_jet(x).scale(2.0).add_scalar(1.0).scale(lam)
        })
    }

    /// u plus eps times the quadrupole eigenmode (x_1^2 - x_2^2)/(1 - |x|^2):
    /// still solves the volume equation, but its Hessian is no longer a
    /// multiple of the metric, so the P-function Laplacian is nonzero. Used
    /// to cross-check the closed-form and Bochner routes.
    pub fn perturbed_u_field(&self, eps: f64) -> ScalarField<f64> {
        let model = self.model();
        ScalarField::from_fn(model, move |x: &[f64]| {
            &u_jet(x) + &quadrupole_jet(x).scale(eps)
        })
        .with_grad_norm_sq(ScalarField::from_fn(model, move |x: &[f64]| {
            let base = u_jet(x).add_scalar(0.5).sq();
            let cross = quadrupole_cross_jet(x).scale(eps);
            let own = quadrupole_grad_sq_jet(x).scale(eps * eps);
            &(&base + &cross) + &own
        }))
    }
}

fn u_jet(x: &[f64]) -> Jet2<f64> {
    let s = jet_norm_sq(x);
    let x2 = Jet2::var(x, 1);
    &(&s - &x2) / &(-&s).add_scalar(1.0)
}

fn v_jet(x: &[f64]) -> Jet2<f64> {
    &jet_ball_time(x) + &jet_ball_axis(x, 1)
}

fn v_jet_skew(x: &[f64], skew: f64) -> Jet2<f64> {
    if skew == 0.0 {
        v_jet(x)
    } else {
        &v_jet(x) + &jet_ball_axis(x, 0).scale(skew)
    }
}

fn phi_jet(x: &[f64], gamma: f64) -> Jet2<f64> {
    let base = jet_ball_time(x).add_scalar(-0.5);
    if gamma == 0.0 {
        base
    } else {
        &base + &jet_ball_axis(x, 0).scale(gamma)
    }
}

/// G = (x_1^2 - x_2^2)(|x|^2 - 3)/(1 - |x|^2), an eigenmode with Lap G = 2 G.
fn quadrupole_jet(x: &[f64]) -> Jet2<f64> {
    let x1 = Jet2::var(x, 0);
    let x2 = Jet2::var(x, 1);
    let q = &x1.sq() - &x2.sq();
    let s = jet_norm_sq(x);
    &(&q * &s.add_scalar(-3.0)) / &(-&s).add_scalar(1.0)
}

/// 2 <grad u, grad G> = <grad V3, grad G> - <grad W, grad G> in closed form:
/// [-2q (s^2 - 2s + 3) + x_2 (2q (s^2 - 3s + 4) + (s - 3)(1 - s)^2)] / (1 - s)^2.
fn quadrupole_cross_jet(x: &[f64]) -> Jet2<f64> {
    let x1 = Jet2::var(x, 0);
    let x2 = Jet2::var(x, 1);
    let q = &x1.sq() - &x2.sq();
    let s = jet_norm_sq(x);
    let one_minus_s = (-&s).add_scalar(1.0);
    let s2 = s.sq();
    let t1 = (&q * &(&s2 - &s.scale(2.0)).add_scalar(3.0)).scale(-2.0);
    let t2 = (&q * &(&s2 - &s.scale(3.0)).add_scalar(4.0)).scale(2.0);
    let t3 = &s.add_scalar(-3.0) * &one_minus_s.sq();
    let num = &t1 + &(&x2 * &(&t2 + &t3));
    &num / &one_minus_s.sq()
}

/// |grad G|^2 = [x_1^2 ((s-3)(1-s) - 2q)^2 + x_2^2 ((s-3)(1-s) + 2q)^2] / (1 - s)^2.
fn quadrupole_grad_sq_jet(x: &[f64]) -> Jet2<f64> {
    let x1 = Jet2::var(x, 0);
    let x2 = Jet2::var(x, 1);
    let q = &x1.sq() - &x2.sq();
    let s = jet_norm_sq(x);
    let one_minus_s = (-&s).add_scalar(1.0);
    let core = &s.add_scalar(-3.0) * &one_minus_s;
    let a = &core - &q.scale(2.0);
    let b = &core + &q.scale(2.0);
    let num = &(&x1.sq() * &a.sq()) + &(&x2.sq() * &b.sq());
    &num / &one_minus_s.sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops;

    fn interior_points(lens: &HoroLens) -> Vec<[f64; 2]> {
        let mut pts = vec![];
        for &p in &[
            [0.0, 0.2],
            [0.1, 0.3],
            [-0.15, 0.25],
            [0.2, 0.35],
            [-0.05, 0.15],
        ] {
            if lens.contains(&p) {
                pts.push(p);
            }
        }
        assert!(pts.len() >= 3, "test points fell outside the lens");
        pts
    }

    #[test]
    fn u_solves_pde_and_companion() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let u = lens.u_field();
        let m = lens.model();
        for p in interior_points(&lens) {
            let jet = u.eval(&p).unwrap();
            let lap = ops::laplace_beltrami(&m, &p, &jet);
            assert!((lap - 2.0 * jet.v - 1.0).abs() < 1e-13, "pde at {p:?}");
            let g = ops::grad_norm_sq(&m, &p, &jet);
            let companion = u.grad_norm_sq().unwrap().value(&p).unwrap();
            assert!((g - companion).abs() < 1e-13);
            assert!(jet.v <= 0.0);
        }
    }

    #[test]
    fn dirichlet_and_gradient_on_sigma() {
        let lens = HoroLens::new(0.1).unwrap();
        let u = lens.u_field();
        // points of L1: |x|^2 = x_2, x = (t cos, 1/2 + t sin) form
        for &phi in &[-1.2f64, -0.4, 0.3, 1.0] {
            let p = [0.5 * phi.cos(), 0.5 + 0.5 * phi.sin()];
            let jet = u.eval(&p).unwrap();
            assert!(jet.v.abs() < 1e-14);
            let g = ops::grad_norm_sq(&lens.model(), &p, &jet);
            assert!((g - 0.25).abs() < 1e-13, "overdetermined data at {p:?}");
        }
    }

    #[test]
    fn robin_data_on_t_for_u_phi_and_v() {
        for &b in &[0.1, 1.0 / 3.0, 0.45] {
            for &gamma in &[0.0, 0.75] {
                let lens = HoroLens::with_gamma(b, gamma).unwrap();
                let config = lens.cap_config();
                let ct = lens.c_tilde();
                // T points: x = center + r(sin t, cos t) near the top
                for &t in &[-0.3f64, 0.0, 0.25] {
                    let p = [
                        (1.0 - b) * t.sin(),
                        -b + (1.0 - b) * t.cos(),
                    ];
                    let n = config.support.unit_normal(&lens.model(), &p);
                    let uj = lens.u_field().eval(&p).unwrap();
                    let du = ops::directional_derivative(&uj, &n);
                    assert!((du - uj.v - ct).abs() < 1e-13, "u robin b={b}");
                    let pj = lens.phi_field().eval(&p).unwrap();
                    let dp = ops::directional_derivative(&pj, &n);
                    assert!(
                        (dp - pj.v - ct).abs() < 1e-13,
                        "phi robin b={b} gamma={gamma}"
                    );
                    let vj = lens.v_field().eval(&p).unwrap();
                    let dv = ops::directional_derivative(&vj, &n);
                    assert!((dv - vj.v).abs() < 1e-13, "v adapted b={b}");
                    let vs = lens.v_field_with(0.4).eval(&p).unwrap();
                    let dvs = ops::directional_derivative(&vs, &n);
                    assert!((dvs - vs.v).abs() < 1e-13, "skewed v adapted b={b}");
                }
            }
        }
    }

    #[test]
    fn skewed_v_companion_matches_gradient() {
        let lens = HoroLens::new(0.2).unwrap();
        let v = lens.v_field_with(0.35);
        let m = lens.model();
        for p in interior_points(&lens) {
            let jet = v.eval(&p).unwrap();
            let g = ops::grad_norm_sq(&m, &p, &jet);
            let companion = v.grad_norm_sq().unwrap().value(&p).unwrap();
            assert!((g - companion).abs() < 1e-12, "companion at {p:?}");
        }
    }

    #[test]
    fn frozen_point_values() {
        // b = 1/3 oracle at (0, 1/3): V = 2, dV/dN = 2, phi' = 3/4.
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let p = [0.0, 1.0 / 3.0];
        let v = lens.v_field().eval(&p).unwrap();
        assert!((v.v - 2.0).abs() < 1e-14);
        let n = lens
            .cap_config()
            .support
            .unit_normal(&lens.model(), &p);
        assert!((ops::directional_derivative(&v, &n) - 2.0).abs() < 1e-14);
        let phi = lens.phi_field().eval(&p).unwrap();
        let dphi = ops::directional_derivative(&phi, &n);
        assert!((dphi - 0.75).abs() < 1e-14);
        // u at (0, 1/3) is -1/4 with |grad u|^2 = 1/16
        let u = lens.u_field().eval(&p).unwrap();
        assert!((u.v + 0.25).abs() < 1e-15);
        let g = ops::grad_norm_sq(&lens.model(), &p, &u);
        assert!((g - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn u_minus_phi_proportional_to_v_when_symmetric() {
        let lens = HoroLens::new(0.2).unwrap();
        for p in interior_points(&lens) {
            let q = lens.u_minus_phi_field().eval(&p).unwrap();
            let v = lens.v_field().eval(&p).unwrap();
            assert!((q.v + 0.5 * v.v).abs() < 1e-13);
        }
    }

    #[test]
    fn p_function_is_constant_eighth() {
        let lens = HoroLens::new(0.3).unwrap();
        for p in interior_points(&lens) {
            let u = lens.u_field().eval(&p).unwrap();
            let g = lens.u_field().grad_norm_sq().unwrap().value(&p).unwrap();
            let pf = 0.5 * g - 0.5 * u.v - 0.5 * u.v * u.v;
            assert!((pf - 0.125).abs() < 1e-13);
        }
    }

    #[test]
    fn resolvent_for_phi_any_gamma() {
        let lens = HoroLens::with_gamma(0.25, 1.3).unwrap();
        let m = lens.model();
        for p in interior_points(&lens) {
            let phi = lens.phi_field().eval(&p).unwrap();
            let h = ops::cov_hessian(&m, &p, &phi);
            let target = 0.5 + phi.v;
            let dev = ops::deviation_from_metric_multiple(&m, &p, &h, target);
            assert!(dev < 1e-12);
            let comp = lens.phi_field().grad_norm_sq().unwrap().value(&p).unwrap();
            let direct = ops::grad_norm_sq(&m, &p, &phi);
            assert!((comp - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn perturbed_solution_keeps_pde_and_companion() {
        let lens = HoroLens::new(0.2).unwrap();
        let f = lens.perturbed_u_field(0.3);
        let m = lens.model();
        for p in interior_points(&lens) {
            let jet = f.eval(&p).unwrap();
            let lap = ops::laplace_beltrami(&m, &p, &jet);
            assert!((lap - 2.0 * jet.v - 1.0).abs() < 1e-12, "pde at {p:?}");
            let comp = f.grad_norm_sq().unwrap().value(&p).unwrap();
            let direct = ops::grad_norm_sq(&m, &p, &jet);
            assert!((comp - direct).abs() < 1e-12, "companion at {p:?}");
        }
    }

    #[test]
    fn flipped_phi_solves_resolvent_with_negated_robin() {
        let lens = HoroLens::new(0.1).unwrap();
        let m = lens.model();
        let config = lens.cap_config();
        let phi = lens.phi_field_flipped();
        let p = [0.1, 0.25];
        let jet = phi.eval(&p).unwrap();
        let h = ops::cov_hessian(&m, &p, &jet);
        assert!(ops::deviation_from_metric_multiple(&m, &p, &h, 0.5 + jet.v) < 1e-12);
        let t = [0.0, 0.8];
        assert!(config.support.residual(&t).abs() < 1e-14);
        let n = config.support.unit_normal(&m, &t);
        let tj = phi.eval(&t).unwrap();
        let d = ops::directional_derivative(&tj, &n);
        assert!((d - tj.v + lens.c_tilde()).abs() < 1e-12);
    }

    #[test]
    fn bad_parameter_rejected() {
        assert!(HoroLens::new(0.0).is_err());
        assert!(HoroLens::new(0.5).is_err());
        assert!(HoroLens::new(-0.1).is_err());
    }
}
