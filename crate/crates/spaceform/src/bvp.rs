//! P1 Ritz-Galerkin discretization of the mixed Dirichlet-Robin problem.
//!
//! The weak form on the Sigma-zero trial space is
//! A[u,v] = int ghat(grad u, grad v) dvol - (n+1)K int uv dvol
//!          - kappa int_T uv dA,
//! b[v] = -int v dvol + c_tilde int_T v dA,
//! with dvol = w^2 dx and dA = w ds in ambient dimension 2; the stiffness
//! term carries no conformal weight there. Conformal weights are sampled at
//! quadrature points: edge-midpoint (degree 2) rules on triangles, 2-point
//! Gauss on boundary facets. The solver is Jacobi-preconditioned conjugate
//! gradients; a non-positive curvature direction is surfaced as the named
//! coercivity error with the estimated first Dirichlet-Neumann eigenvalue.

use crate::error::{Error, Result};
use crate::mesh::{FacetTag, Mesh};

/// Compressed sparse rows, built once from summed triplets.
struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Csr {
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (r, dr) in d.iter_mut().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    *dr = self.vals[k];
                }
            }
        }
        d
    }
}

fn dot_v(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Element data: area and the constant flat gradients of the three
/// barycentric basis functions.
fn tri_grads(p: [&[f64; 2]; 3]) -> (f64, [[f64; 2]; 3]) {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
        - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    let g = [
        [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
        [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
        [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
    ];
    (0.5 * det, g)
}

/// Vertex-indexed matrix blocks and load vectors of the weak form, before
/// Dirichlet elimination: pure stiffness, dvol-weighted mass, T-facet Robin
/// mass, and the dvol / T-facet loads.
struct Blocks {
    stiff: Vec<(usize, usize, f64)>,
    mass: Vec<(usize, usize, f64)>,
    robin: Vec<(usize, usize, f64)>,
    load_vol: Vec<f64>,
    load_t: Vec<f64>,
}

const MID_LAMBDA: [[f64; 3]; 3] = [
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
];

fn collect_blocks(mesh: &Mesh) -> Blocks {
    let nv = mesh.vertices.len();
    let mut b = Blocks {
        stiff: Vec::new(),
        mass: Vec::new(),
        robin: Vec::new(),
        load_vol: vec![0.0; nv],
        load_t: vec![0.0; nv],
    };
    for s in &mesh.simplices {
        let p = [
            &mesh.vertices[s[0]],
            &mesh.vertices[s[1]],
            &mesh.vertices[s[2]],
        ];
        let (area, g) = tri_grads(p);
        for i in 0..3 {
            for j in 0..3 {
                b.stiff.push((
                    s[i],
                    s[j],
                    area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]),
                ));
            }
        }
        for lam in MID_LAMBDA {
            let q = [
                lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
                lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
            ];
            let w: f64 = mesh.model.conformal_factor(&q[..]);
            let dv = w * w * area / 3.0;
            for i in 0..3 {
                b.load_vol[s[i]] += dv * lam[i];
                for j in 0..3 {
                    b.mass.push((s[i], s[j], dv * lam[i] * lam[j]));
                }
            }
        }
    }
    let xi = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    for f in &mesh.boundary_facets {
        if f.tag != FacetTag::T {
            continue;
        }
        let a = &mesh.vertices[f.verts[0]];
        let c = &mesh.vertices[f.verts[1]];
        let len = ((c[0] - a[0]).powi(2) + (c[1] - a[1]).powi(2)).sqrt();
        for t in xi {
            let q = [a[0] + (c[0] - a[0]) * t, a[1] + (c[1] - a[1]) * t];
            let w: f64 = mesh.model.conformal_factor(&q[..]);
            let da = w * len / 2.0;
            let lam = [1.0 - t, t];
            for i in 0..2 {
                b.load_t[f.verts[i]] += da * lam[i];
                for j in 0..2 {
                    b.robin.push((f.verts[i], f.verts[j], da * lam[i] * lam[j]));
                }
            }
        }
    }
    b
}

fn restrict(
    trip: &[(usize, usize, f64)],
    free: &[Option<usize>],
    n_free: usize,
) -> Csr {
    let reduced: Vec<(usize, usize, f64)> = trip
        .iter()
        .filter_map(|&(r, c, v)| match (free[r], free[c]) {
            (Some(fr), Some(fc)) => Some((fr, fc, v)),
            _ => None,
        })
        .collect();
    Csr::from_triplets(n_free, reduced)
}

fn free_numbering(mesh: &Mesh) -> Result<(Vec<Option<usize>>, Vec<usize>)> {
    let dirichlet = mesh.sigma_vertices();
    if !dirichlet.iter().any(|&d| d) {
        return Err(Error::Config(
            "mesh has no Sigma facets; problem not coercive as posed".into(),
        ));
    }
    let mut free = vec![None; mesh.vertices.len()];
    let mut vertex_of_free = Vec::new();
    for (v, &d) in dirichlet.iter().enumerate() {
        if !d {
            free[v] = Some(vertex_of_free.len());
            vertex_of_free.push(v);
        }
    }
    Ok((free, vertex_of_free))
}

/// Assembled linear system on the Sigma-zero space.
pub struct System<'a> {
    pub mesh: &'a Mesh,
    pub c_tilde: f64,
    vertex_of_free: Vec<usize>,
    matrix: Csr,
    rhs: Vec<f64>,
}

/// Discrete solution with Dirichlet values identically zero on Sigma.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub mesh: Mesh,
    pub nodal_values: Vec<f64>,
    pub c_tilde: f64,
    pub cg_iterations: usize,
}

/// Assembles the weak form; the Robin coefficient kappa and curvature K come
/// from the mesh.
pub fn assemble(mesh: &Mesh, c_tilde: f64) -> Result<System<'_>> {
    let (free_of_vertex, vertex_of_free) = free_numbering(mesh)?;
    let n_free = vertex_of_free.len();
    let b = collect_blocks(mesh);
    let dfac = mesh.model.dim as f64 * mesh.model.k::<f64>();
    let mut trip = b.stiff.clone();
    trip.extend(b.mass.iter().map(|&(r, c, v)| (r, c, -dfac * v)));
    trip.extend(b.robin.iter().map(|&(r, c, v)| (r, c, -mesh.kappa * v)));
    let matrix = restrict(&trip, &free_of_vertex, n_free);
    let rhs: Vec<f64> = vertex_of_free
        .iter()
        .map(|&v| -b.load_vol[v] + c_tilde * b.load_t[v])
        .collect();
    Ok(System {
        mesh,
        c_tilde,
        vertex_of_free,
        matrix,
        rhs,
    })
}

enum CgOutcome {
    Converged(Vec<f64>, usize),
    Indefinite,
    Stalled,
}

fn pcg(a: &Csr, b: &[f64], rel_tol: f64, max_iter: usize) -> CgOutcome {
    let n = a.n;
    let diag = a.diag();
    if diag.iter().any(|&d| d <= 0.0) {
        return CgOutcome::Indefinite;
    }
    let norm_b = dot_v(b, b).sqrt();
    if norm_b == 0.0 {
        return CgOutcome::Converged(vec![0.0; n], 0);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot_v(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot_v(&p, &ap);
        if pap <= 0.0 {
            return CgOutcome::Indefinite;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot_v(&r, &r).sqrt() <= rel_tol * norm_b {
            return CgOutcome::Converged(x, it);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot_v(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome::Stalled
}

/// Conjugate-gradient solve to relative residual 1e-10. A breakdown is
/// reported as the coercivity error carrying the estimated lambda_1 and the
/// bound (n+1)K it fails to clear.
pub fn solve(system: &System<'_>) -> Result<BvpSolution> {
    let n = system.vertex_of_free.len();
    match pcg(&system.matrix, &system.rhs, 1e-10, 40 * n + 200) {
        CgOutcome::Converged(x, cg_iterations) => {
            let mut nodal_values = vec![0.0; system.mesh.vertices.len()];
            for (f, &v) in system.vertex_of_free.iter().enumerate() {
                nodal_values[v] = x[f];
            }
            Ok(BvpSolution {
                mesh: system.mesh.clone(),
                nodal_values,
                c_tilde: system.c_tilde,
                cg_iterations,
            })
        }
        CgOutcome::Indefinite => {
            let lambda1 = estimate_lambda1(system.mesh)?;
            Err(Error::Coercivity {
                lambda1,
                bound: system.mesh.model.dim as f64 * system.mesh.model.k::<f64>(),
            })
        }
        CgOutcome::Stalled => Err(Error::Numerical(
            "conjugate gradients failed to reach relative residual 1e-10".into(),
        )),
    }
}

/// Max residual of the discrete equations over the free basis functions.
pub fn galerkin_residual(system: &System<'_>, solution: &BvpSolution) -> f64 {
    let x: Vec<f64> = system
        .vertex_of_free
        .iter()
        .map(|&v| solution.nodal_values[v])
        .collect();
    let mut ax = vec![0.0; x.len()];
    system.matrix.matvec(&x, &mut ax);
    ax.iter()
        .zip(&system.rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// First Dirichlet-Neumann eigenvalue of (stiffness, mass) on the
/// Sigma-zero space by inverse power iteration; over-approximates
/// lambda_1(Omega) since the discretization is conforming.
pub fn estimate_lambda1(mesh: &Mesh) -> Result<f64> {
    let (free, vertex_of_free) = free_numbering(mesh)?;
    let n = vertex_of_free.len();
    let b = collect_blocks(mesh);
    let stiff = restrict(&b.stiff, &free, n);
    let mass = restrict(&b.mass, &free, n);
    let mut x = vec![1.0; n];
    let mut mx = vec![0.0; n];
    let mut lambda_prev = f64::INFINITY;
    for _ in 0..10_000 {
        mass.matvec(&x, &mut mx);
        let xmx = dot_v(&x, &mx);
        let scale = xmx.sqrt();
        for i in 0..n {
            x[i] /= scale;
            mx[i] /= scale;
        }
        let y = match pcg(&stiff, &mx, 1e-12, 40 * n + 200) {
            CgOutcome::Converged(y, _) => y,
            _ => {
                return Err(Error::Numerical(
                    "stiffness solve failed inside eigenvalue iteration".into(),
                ))
            }
        };
        mass.matvec(&y, &mut mx);
        let ymy = dot_v(&y, &mx);
        let mut sy = vec![0.0; n];
        stiff.matvec(&y, &mut sy);
        let lambda = dot_v(&y, &sy) / ymy;
        x = y;
        if (lambda - lambda_prev).abs() <= 1e-10 * lambda.abs().max(1.0) {
            return Ok(lambda);
        }
        lambda_prev = lambda;
    }
    Err(Error::Numerical(
        "inverse power iteration did not converge in 10^4 steps".into(),
    ))
}

/// L2(Omega, dvol) distance between the P1 solution and a reference
/// function, by the edge-midpoint rule per element.
pub fn l2_error<F>(solution: &BvpSolution, mut reference: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mesh = &solution.mesh;
    let mut acc = 0.0;
    for s in &mesh.simplices {
        let p = [
            &mesh.vertices[s[0]],
            &mesh.vertices[s[1]],
            &mesh.vertices[s[2]],
        ];
        let (area, _) = tri_grads(p);
        for lam in MID_LAMBDA {
            let q = [
                lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
                lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
            ];
            let uh = lam[0] * solution.nodal_values[s[0]]
                + lam[1] * solution.nodal_values[s[1]]
                + lam[2] * solution.nodal_values[s[2]];
            let w: f64 = mesh.model.conformal_factor(&q[..]);
            let diff = uh - reference(&q)?;
            acc += diff * diff * w * w * area / 3.0;
        }
    }
    Ok(acc.sqrt())
}

/// Area-weighted average of adjacent element gradients at each vertex: the
/// recovered (flat) gradient field used for flux extraction on Sigma.
pub fn nodal_gradients(mesh: &Mesh, nodal: &[f64]) -> Vec<[f64; 2]> {
    let nv = mesh.vertices.len();
    let mut grad = vec![[0.0; 2]; nv];
    let mut weight = vec![0.0; nv];
    for s in &mesh.simplices {
        let p = [
            &mesh.vertices[s[0]],
            &mesh.vertices[s[1]],
            &mesh.vertices[s[2]],
        ];
        let (area, g) = tri_grads(p);
        let gu = [
            nodal[s[0]] * g[0][0] + nodal[s[1]] * g[1][0] + nodal[s[2]] * g[2][0],
            nodal[s[0]] * g[0][1] + nodal[s[1]] * g[1][1] + nodal[s[2]] * g[2][1],
        ];
        for &v in s {
            grad[v][0] += area * gu[0];
            grad[v][1] += area * gu[1];
            weight[v] += area;
        }
    }
    for v in 0..nv {
        if weight[v] > 0.0 {
            grad[v][0] /= weight[v];
            grad[v][1] /= weight[v];
        }
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_case, CaseId};
    use crate::horolens::HoroLens;
    use crate::mesh::{generate_cap_domain, lens_mesh};
    use crate::cap::ChartSurface;
    use crate::quad::integrate_omega;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stiffness_annihilates_constants_and_mass_matches_volume() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let config = lens.cap_config();
        let coarse = lens_mesh(&lens, 2).unwrap();
        let fine = lens_mesh(&lens, 3).unwrap();
        let mut exact = integrate_omega(&config, 6, &mut |x| {
            let w: f64 = coarse.model.conformal_factor(x);
            w * w
        })
        .unwrap();
        let total = |mesh: &Mesh| {
            let b = collect_blocks(mesh);
            let ones = vec![1.0; mesh.vertices.len()];
            let stiff = Csr::from_triplets(mesh.vertices.len(), b.stiff.clone());
            let mut sx = vec![0.0; mesh.vertices.len()];
            stiff.matvec(&ones, &mut sx);
            let ker: f64 = sx.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(ker < 1e-12, "stiffness does not kill constants: {ker}");
            b.mass.iter().map(|&(_, _, v)| v).sum::<f64>()
        };
        exact = exact.abs();
        let err_coarse = (total(&coarse) - exact).abs();
        let err_fine = (total(&fine) - exact).abs();
        assert!(err_coarse < 5e-3, "coarse volume error {err_coarse}");
        assert!(
            err_fine < err_coarse / 3.0,
            "volume defect should shrink ~4x: {err_coarse} -> {err_fine}"
        );
    }

    #[test]
    fn hyperbolic_system_is_positive_definite() {
        let lens = HoroLens::new(0.25).unwrap();
        let mesh = lens_mesh(&lens, 2).unwrap();
        let sys = assemble(&mesh, lens.c_tilde()).unwrap();
        let n = sys.vertex_of_free.len();
        let mut rng = ChaCha8Rng::seed_from_u64(710);
        let mut ax = vec![0.0; n];
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            sys.matrix.matvec(&x, &mut ax);
            assert!(dot_v(&x, &ax) > 0.0);
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let mesh = lens_mesh(&lens, 1).unwrap();
        let (free, vof) = free_numbering(&mesh).unwrap();
        let b = collect_blocks(&mesh);
        let mut trip = b.stiff.clone();
        trip.extend(b.mass.iter().map(|&(r, c, v)| (r, c, 2.0 * v)));
        let a = restrict(&trip, &free, vof.len());
        match pcg(&a, &vec![0.0; vof.len()], 1e-10, 100) {
            CgOutcome::Converged(x, it) => {
                assert_eq!(it, 0);
                assert!(x.iter().all(|&v| v == 0.0));
            }
            _ => panic!("trivial system must converge"),
        }
    }

    #[test]
    fn lens_solve_converges_with_order_and_sign() {
        for b in [1.0 / 3.0, 0.45] {
            let lens = HoroLens::new(b).unwrap();
            let u = lens.u_field();
            let mut errors = Vec::new();
            for r in 1..=4 {
                let mesh = lens_mesh(&lens, r).unwrap();
                let sys = assemble(&mesh, lens.c_tilde()).unwrap();
                let sol = solve(&sys).unwrap();
                assert!(
                    galerkin_residual(&sys, &sol) < 1e-10,
                    "galerkin residual at r={r}"
                );
                let interior: Vec<bool> = {
                    let mut on_boundary = vec![false; mesh.vertices.len()];
                    for f in &mesh.boundary_facets {
                        for &v in &f.verts {
                            on_boundary[v] = true;
                        }
                    }
                    on_boundary.iter().map(|&x| !x).collect()
                };
                for (v, &val) in sol.nodal_values.iter().enumerate() {
                    assert!(val <= 1e-10, "b={b}: node {v} positive: {val}");
                    if interior[v] {
                        assert!(val < 0.0, "b={b}: interior node {v} not negative");
                    }
                }
                errors.push(l2_error(&sol, |x| u.value(x)).unwrap());
            }
            for pair in errors.windows(2) {
                let ratio = pair[0] / pair[1];
                assert!(ratio >= 1.5, "b={b}: error ratio {ratio}, errors {errors:?}");
                assert!(
                    ratio.log2() >= 1.2,
                    "b={b}: empirical order {}, errors {errors:?}",
                    ratio.log2()
                );
            }
        }
    }

    #[test]
    fn interpolated_exact_solution_recovers_flux_constant() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let mesh = lens_mesh(&lens, 4).unwrap();
        let u = lens.u_field();
        let nodal: Vec<f64> = mesh
            .vertices
            .iter()
            .map(|p| u.value(&p[..]).unwrap())
            .collect();
        let grads = nodal_gradients(&mesh, &nodal);
        let config = lens.cap_config();
        let mut fluxes = Vec::new();
        for f in &mesh.boundary_facets {
            if f.tag != FacetTag::Sigma {
                continue;
            }
            let a = mesh.vertices[f.verts[0]];
            let b = mesh.vertices[f.verts[1]];
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let nu = config.cap.flat_normal_out(&mid[..]);
            let g = [
                (grads[f.verts[0]][0] + grads[f.verts[1]][0]) / 2.0,
                (grads[f.verts[0]][1] + grads[f.verts[1]][1]) / 2.0,
            ];
            let w: f64 = mesh.model.conformal_factor(&mid[..]);
            fluxes.push((g[0] * nu[0] + g[1] * nu[1]) / w);
        }
        let mean = fluxes.iter().sum::<f64>() / fluxes.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean flux {mean}");
    }

    #[test]
    fn lambda1_bounds_and_monotone_refinement() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let mut prev = f64::INFINITY;
        for r in 1..=3 {
            let mesh = lens_mesh(&lens, r).unwrap();
            let lam = estimate_lambda1(&mesh).unwrap();
            assert!(lam > 0.0);
            assert!(lam <= prev + 1e-8, "lambda grew under refinement");
            prev = lam;
        }
        let case = make_case(CaseId::GeodesicSphereS, std::f64::consts::FRAC_PI_3, 2).unwrap();
        let cap = ChartSurface::Sphere {
            center: vec![0.0, 0.35],
            radius: 0.3,
            omega_inside: true,
        };
        let mesh = generate_cap_domain(&case, cap, 2).unwrap();
        let lam = estimate_lambda1(&mesh).unwrap();
        assert!(lam > 2.0, "small spherical cap lambda_1 = {lam}");
    }

    #[test]
    fn oversized_spherical_domain_raises_coercivity() {
        let case = make_case(CaseId::GeodesicSphereS, std::f64::consts::FRAC_PI_2, 2).unwrap();
        let cap = ChartSurface::Sphere {
            center: vec![0.0, 2.0],
            radius: 2.2,
            omega_inside: true,
        };
        let mesh = generate_cap_domain(&case, cap, 2).unwrap();
        let sys = assemble(&mesh, 0.0).unwrap();
        match solve(&sys) {
            Err(Error::Coercivity { lambda1, bound }) => {
                assert_eq!(bound, 2.0);
                assert!(lambda1 < bound, "lambda1 {lambda1} vs bound {bound}");
            }
            other => panic!("expected coercivity failure, got {other:?}"),
        }
    }
}
