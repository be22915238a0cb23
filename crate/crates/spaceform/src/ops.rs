//! Covariant differential operators on conformally flat charts.
//!
//! With g = w^2 delta the Christoffel symbols are
//! Gamma^k_ij = delta_ik L_j + delta_jk L_i - delta_ij L_k, L = d(ln w),
//! so every operator here reduces to flat partials from a jet plus rank-one
//! corrections in L. Vector components are chart components (upper indices);
//! Hessians and Lie derivatives are returned with lower indices.

use crate::fields::ScalarField;
use crate::geometry::Model;
use crate::jet::{Jet2, VecJet};
use crate::scalar::{dot, Real};

/// Metric inner product of two chart vectors (upper components): w^2 <a, b>.
pub fn metric_dot<R: Real>(model: &Model, x: &[R], a: &[R], b: &[R]) -> R {
    let w = model.conformal_factor(x);
    w * w * dot(a, b)
}

/// Gradient with upper indices: (grad f)^i = w^-2 d_i f.
pub fn cov_gradient<R: Real>(model: &Model, x: &[R], f: &Jet2<R>) -> Vec<R> {
    let w = model.conformal_factor(x);
    let iw2 = (w * w).recip();
    f.g.iter().map(|&gi| gi * iw2).collect()
}

/// |grad f|^2 in the metric: w^-2 |df|^2.
pub fn grad_norm_sq<R: Real>(model: &Model, x: &[R], f: &Jet2<R>) -> R {
    let w = model.conformal_factor(x);
    dot(&f.g, &f.g) / (w * w)
}

/// Covariant Hessian with lower indices, row-major d x d:
/// (Hess f)_ij = d_i d_j f - L_j d_i f - L_i d_j f + delta_ij <L, df>.
pub fn cov_hessian<R: Real>(model: &Model, x: &[R], f: &Jet2<R>) -> Vec<R> {
    let d = f.dim();
    let l = model.dlnw(x);
    let ldf = dot(&l, &f.g);
    let mut h = vec![R::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut v = f.hess(i, j) - l[j] * f.g[i] - l[i] * f.g[j];
            if i == j {
                v = v + ldf;
            }
            h[i * d + j] = v;
        }
    }
    h
}

/// Laplace-Beltrami: w^-2 (Delta_flat f + (d - 2) <L, df>).
pub fn laplace_beltrami<R: Real>(model: &Model, x: &[R], f: &Jet2<R>) -> R {
    let d = f.dim();
    let w = model.conformal_factor(x);
    let l = model.dlnw(x);
    let mut tr = R::zero();
    for i in 0..d {
        tr = tr + f.hess(i, i);
    }
    (tr + R::of_usize(d - 2) * dot(&l, &f.g)) / (w * w)
}

/// Hessian applied to two chart vectors with upper indices:
/// Hess f (a, b) = sum_ij (Hess f)_ij a^i b^j.
pub fn hessian_bilinear<R: Real>(model: &Model, x: &[R], f: &Jet2<R>, a: &[R], b: &[R]) -> R {
    let d = f.dim();
    let h = cov_hessian(model, x, f);
    let mut out = R::zero();
    for i in 0..d {
        for j in 0..d {
            out = out + h[i * d + j] * a[i] * b[j];
        }
    }
    out
}

/// Derivative of f along a chart vector (upper components): df(a).
pub fn directional_derivative<R: Real>(f: &Jet2<R>, a: &[R]) -> R {
    dot(&f.g, a)
}

/// Covariant Jacobian (nabla_j Z)^i, row-major [i * d + j]:
/// d_j Z^i + delta_ij <L, Z> + L_j Z^i - L_i Z^j.
pub fn cov_jacobian<R: Real>(model: &Model, x: &[R], z: &VecJet<R>) -> Vec<R> {
    let d = z.dim();
    let l = model.dlnw(x);
    let lz = dot(&l, &z.comp);
    let mut out = vec![R::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut v = z.jac(i, j) + l[j] * z.comp[i] - l[i] * z.comp[j];
            if i == j {
                v = v + lz;
            }
            out[i * d + j] = v;
        }
    }
    out
}

/// Deformation tensor with lower indices, row-major:
/// (1/2 L_Z g)_ij = (w^2 / 2) [(nabla_i Z)^j + (nabla_j Z)^i].
pub fn half_lie_metric<R: Real>(model: &Model, x: &[R], z: &VecJet<R>) -> Vec<R> {
    let d = z.dim();
    let w = model.conformal_factor(x);
    let jac = cov_jacobian(model, x, z);
    let c = w * w * R::half();
    let mut out = vec![R::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = c * (jac[j * d + i] + jac[i * d + j]);
        }
    }
    out
}

/// Metric divergence: div Z = div_flat Z + d <L, Z>.
pub fn cov_divergence<R: Real>(model: &Model, x: &[R], z: &VecJet<R>) -> R {
    let d = z.dim();
    let l = model.dlnw(x);
    let mut tr = R::zero();
    for i in 0..d {
        tr = tr + z.jac(i, i);
    }
    tr + R::of_usize(d) * dot(&l, &z.comp)
}

/// Squared metric norm of a lower-index symmetric 2-tensor: w^-4 sum T_ij^2.
pub fn tensor_norm_sq_lower<R: Real>(model: &Model, x: &[R], t: &[R]) -> R {
    let w = model.conformal_factor(x);
    let iw4 = (w * w * w * w).recip();
    dot(t, t) * iw4
}

/// Max deviation of a lower-index tensor from c * g = c w^2 delta.
pub fn deviation_from_metric_multiple<R: Real>(model: &Model, x: &[R], t: &[R], c: R) -> R {
    let d = (t.len() as f64).sqrt() as usize;
    let w = model.conformal_factor(x);
    let target = c * w * w;
    let mut worst = R::zero();
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { target } else { R::zero() };
            worst = worst.max((t[i * d + j] - want).abs());
        }
    }
    worst
}

/// Finite-difference residuals of a field's jet output.
#[derive(Debug, Clone, Copy)]
pub struct FdReport {
    pub max_grad_dev: f64,
    pub max_hess_dev: f64,
}

/// Centered-difference crosscheck of gradient and Hessian entries against
/// the jet, step h; the point must keep a 2h margin inside the chart.
pub fn fd_crosscheck(field: &ScalarField<f64>, x: &[f64], h: f64) -> crate::Result<FdReport> {
    let d = x.len();
    let jet = field.eval(x)?;
    let value = |p: &[f64]| field.eval(p).map(|j| j.v);
    let mut shifted = x.to_vec();
    let mut max_grad_dev: f64 = 0.0;
    let mut max_hess_dev: f64 = 0.0;
    for i in 0..d {
        shifted.copy_from_slice(x);
        shifted[i] = x[i] + h;
        let fp = value(&shifted)?;
        shifted[i] = x[i] - h;
        let fm = value(&shifted)?;
        max_grad_dev = max_grad_dev.max(((fp - fm) / (2.0 * h) - jet.g[i]).abs());
        max_hess_dev =
            max_hess_dev.max(((fp - 2.0 * jet.v + fm) / (h * h) - jet.hess(i, i)).abs());
        for j in 0..i {
            let mut eval_at = |si: f64, sj: f64| {
                shifted.copy_from_slice(x);
                shifted[i] = x[i] + si * h;
                shifted[j] = x[j] + sj * h;
                value(&shifted)
            };
            let fpp = eval_at(1.0, 1.0)?;
            let fpm = eval_at(1.0, -1.0)?;
            let fmp = eval_at(-1.0, 1.0)?;
            let fmm = eval_at(-1.0, -1.0)?;
            let fd = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            max_hess_dev = max_hess_dev.max((fd - jet.hess(i, j)).abs());
        }
    }
    Ok(FdReport {
        max_grad_dev,
        max_hess_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{jet_ball_time, make_case, CaseId};

    #[test]
    fn geodesic_plane_triple_identities_pointwise() {
        let c = make_case::<f64>(CaseId::GeodesicPlaneH, 0.0, 3).unwrap();
        let x = [0.31, -0.12, 0.44];
        let (xx, v, yy) = c.eval_xvy(&x).unwrap();
        let m = &c.model;

        // 1/2 L_X g = V g
        let t = half_lie_metric(m, &x, &xx);
        assert!(deviation_from_metric_multiple(m, &x, &t, v.v) < 1e-13);
        // div X = (n + 1) V
        assert!((cov_divergence(m, &x, &xx) - 3.0 * v.v).abs() < 1e-13);
        // L_Y g = 0 and div Y = 0
        let ty = half_lie_metric(m, &x, &yy);
        assert!(deviation_from_metric_multiple(m, &x, &ty, 0.0) < 1e-13);
        assert!(cov_divergence(m, &x, &yy).abs() < 1e-13);
        // Hess V = -K V g = V g (K = -1)
        let h = cov_hessian(m, &x, &v);
        assert!(deviation_from_metric_multiple(m, &x, &h, v.v) < 1e-12);
        // Delta V = (n + 1) V for K = -1
        assert!((laplace_beltrami(m, &x, &v) - 3.0 * v.v).abs() < 1e-12);
    }

    #[test]
    fn sphere_case_potential_hessian() {
        let c = make_case::<f64>(CaseId::GeodesicSphereS, 1.0, 3).unwrap();
        let x = [0.21, 0.05, 0.33];
        let (_, v, _) = c.eval_xvy(&x).unwrap();
        // Hess V = -V g for K = +1
        let h = cov_hessian(&c.model, &x, &v);
        assert!(deviation_from_metric_multiple(&c.model, &x, &h, -v.v) < 1e-12);
    }

    #[test]
    fn fd_crosscheck_matches_jet() {
        let m = Model::ball(2);
        let f = ScalarField::from_fn(m, |p: &[f64]| jet_ball_time(p));
        let r = fd_crosscheck(&f, &[0.24, -0.37], 1e-4).unwrap();
        assert!(r.max_grad_dev < 5e-7, "grad dev {}", r.max_grad_dev);
        assert!(r.max_hess_dev < 1e-4, "hess dev {}", r.max_hess_dev);
    }

    #[test]
    fn surface_normal_relations() {
        // g(X, N) = 0 and dV(N) = kappa V on the support surface.
        for (id, p) in [
            (CaseId::GeodesicSphereH, 0.9),
            (CaseId::EquidistantH, 0.4),
            (CaseId::GeodesicPlaneH, 0.0),
            (CaseId::GeodesicSphereS, 1.2),
        ] {
            let c = make_case::<f64>(id, p, 3).unwrap();
            let x = match id {
                CaseId::GeodesicSphereH | CaseId::GeodesicSphereS => {
                    let rr = c.chart_radius.unwrap();
                    vec![rr * 0.48, -rr * 0.36, rr * 0.8]
                }
                CaseId::EquidistantH => vec![0.25, -0.1, 1.0 - 0.25 * (0.4f64).tan()],
                CaseId::GeodesicPlaneH => vec![-0.22, 0.37, 0.0],
            };
            let n = c.unit_normal(&x).unwrap();
            let (xx, v, _) = c.eval_xvy(&x).unwrap();
            let gxn = metric_dot(&c.model, &x, &xx.comp, &n);
            assert!(gxn.abs() < 1e-13, "{id:?}: g(X, N) = {gxn}");
            let dvn = directional_derivative(&v, &n);
            assert!(
                (dvn - c.kappa * v.v).abs() < 1e-12,
                "{id:?}: dV(N) = {dvn} vs kappa V = {}",
                c.kappa * v.v
            );
        }
    }
}
