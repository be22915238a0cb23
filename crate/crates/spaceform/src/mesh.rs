//! Simplicial meshing of cap domains in ambient dimension 2.
//!
//! A cap domain is bounded by two circular/straight boundary pieces meeting
//! at two corners, so it admits a transfinite parameterization: both pieces
//! are traced from corner to corner and blended linearly across the
//! thickness. Boundary vertices land exactly on the chart surfaces; the two
//! corner columns collapse to single vertices. All acceptance domains are
//! intersections of convex chart regions, for which the blend provably stays
//! inside; other orientations are rejected by the containment check.

use crate::cap::{patch_curve2, CapConfig, ChartSurface, Curve2};
use crate::error::{Error, Result};
use crate::fields::UmbilicalCase;
use crate::geometry::Model;
use crate::horolens::HoroLens;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetTag {
    Sigma,
    T,
}

/// One straight boundary edge with its Dirichlet/Robin tag.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFacet {
    pub verts: [usize; 2],
    pub tag: FacetTag,
}

/// Node spacing along the corner-to-corner direction.
#[derive(Debug, Clone, Copy)]
pub enum Grading {
    Uniform,
    /// Symmetric geometric spacing refined toward both corner columns.
    TowardCorners(f64),
}

/// Conforming triangle mesh of a cap domain, with the chart model and the
/// support surface's principal curvature (the Robin coefficient) attached.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub model: Model,
    pub kappa: f64,
    pub vertices: Vec<[f64; 2]>,
    pub simplices: Vec<[usize; 3]>,
    pub boundary_facets: Vec<BoundaryFacet>,
    pub corner_vertices: Vec<usize>,
}

fn signed_area(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn t_grid(nt: usize, grading: Grading) -> Vec<f64> {
    match grading {
        Grading::Uniform => (0..=nt).map(|j| j as f64 / nt as f64).collect(),
        Grading::TowardCorners(ratio) => {
            let m = nt / 2;
            let raw: Vec<f64> = (0..m).map(|k| ratio.powi((m - 1 - k) as i32)).collect();
            let total: f64 = raw.iter().sum();
            let mut t = Vec::with_capacity(nt + 1);
            t.push(0.0);
            let mut acc = 0.0;
            for r in &raw {
                acc += 0.5 * r / total;
                t.push(acc);
            }
            for k in (0..m).rev() {
                let prev = t[k];
                t.push(1.0 - prev);
            }
            let last = t.len() - 1;
            t[last] = 1.0;
            t
        }
    }
}

/// Meshes the domain of an explicit cap configuration. `kappa` is the
/// principal curvature of the support surface (the Robin coefficient of the
/// boundary value problem). Resolution r gives a (2*2^r) x (8*2^r) grid.
pub fn mesh_config(
    config: &CapConfig,
    kappa: f64,
    resolution: u32,
    grading: Grading,
) -> Result<Mesh> {
    if config.model.dim != 2 {
        return Err(Error::Config(
            "meshing is implemented for ambient dimension 2 only".into(),
        ));
    }
    if resolution > 7 {
        return Err(Error::Config(format!(
            "mesh resolution {resolution} too large (max 7)"
        )));
    }
    let geom = config.geometry()?;
    let sigma = patch_curve2(&geom.sigma);
    let t_curve = patch_curve2(&geom.t);
    let mesh = mesh_between(config, &t_curve, &sigma, kappa, resolution, grading)?;

    // Snapped boundary vertices must sit on their exact surfaces, and the
    // blended interior must stay inside Omega; a violation means the domain
    // orientation is outside what the transfinite template supports.
    for f in &mesh.boundary_facets {
        let surface = match f.tag {
            FacetTag::Sigma => &config.cap,
            FacetTag::T => &config.support,
        };
        for &v in &f.verts {
            if mesh.corner_vertices.contains(&v) {
                continue;
            }
            let r = surface.residual(&mesh.vertices[v]).abs();
            if r > 1e-9 {
                return Err(Error::Config(format!(
                    "boundary vertex {v} off its surface by residual {r:.2e}"
                )));
            }
        }
    }
    for (v, p) in mesh.vertices.iter().enumerate() {
        let interior = !mesh
            .boundary_facets
            .iter()
            .any(|f| f.verts.contains(&v));
        if interior && (config.support.residual(p) > -1e-14 || config.cap.residual(p) > -1e-14) {
            return Err(Error::Config(format!(
                "interior vertex {v} escapes the domain; cap orientation not meshable"
            )));
        }
    }
    Ok(mesh)
}

/// Core transfinite generator between an explicit T curve and Sigma curve.
/// Exposed so negative controls can swap in a non-umbilical Sigma arc.
pub fn mesh_between(
    config: &CapConfig,
    t_curve: &Curve2,
    sigma: &Curve2,
    kappa: f64,
    resolution: u32,
    grading: Grading,
) -> Result<Mesh> {
    let ns = 2usize << resolution;
    let nt = 8usize << resolution;
    let ts = t_grid(nt, grading);

    // Match traversal directions: both curves must run corner A -> corner B.
    let s0 = sigma.point(0.0);
    let t0 = t_curve.point(0.0);
    let t1 = t_curve.point(1.0);
    let d0 = (s0[0] - t0[0]).powi(2) + (s0[1] - t0[1]).powi(2);
    let d1 = (s0[0] - t1[0]).powi(2) + (s0[1] - t1[1]).powi(2);
    let flip = d0 > d1;
    let tpar = |t: f64| if flip { 1.0 - t } else { t };
    if d0.min(d1) > 1e-18 {
        return Err(Error::Config(
            "boundary curves do not share corner points".into(),
        ));
    }

    let mut vertices: Vec<[f64; 2]> = Vec::with_capacity((nt - 1) * (ns + 1) + 2);
    let corner_a = sigma.point(0.0);
    let corner_b = sigma.point(1.0);
    vertices.push([corner_a[0], corner_a[1]]);
    vertices.push([corner_b[0], corner_b[1]]);
    // Vertex layout: 0, 1 are the corners; column j in 1..nt stores ns+1
    // vertices from the T side (i = 0) to the Sigma side (i = ns).
    let idx = |i: usize, j: usize| 2 + (j - 1) * (ns + 1) + i;
    for &tj in ts.iter().take(nt).skip(1) {
        let p_t = t_curve.point(tpar(tj));
        let p_s = sigma.point(tj);
        for i in 0..=ns {
            let s = i as f64 / ns as f64;
            vertices.push([
                (1.0 - s) * p_t[0] + s * p_s[0],
                (1.0 - s) * p_t[1] + s * p_s[1],
            ]);
        }
    }

    let mut simplices = Vec::new();
    let mut push = |a: usize, b: usize, c: usize| {
        if signed_area(&vertices[a], &vertices[b], &vertices[c]) > 0.0 {
            simplices.push([a, b, c]);
        } else {
            simplices.push([a, c, b]);
        }
    };
    for i in 0..ns {
        push(0, idx(i, 1), idx(i + 1, 1));
        push(1, idx(i, nt - 1), idx(i + 1, nt - 1));
    }
    for j in 1..nt - 1 {
        for i in 0..ns {
            push(idx(i, j), idx(i, j + 1), idx(i + 1, j + 1));
            push(idx(i, j), idx(i + 1, j + 1), idx(i + 1, j));
        }
    }

    let mut boundary_facets = Vec::with_capacity(2 * nt);
    let mut chain = |row: usize, tag: FacetTag| {
        let mut prev = 0usize;
        for j in 1..nt {
            boundary_facets.push(BoundaryFacet {
                verts: [prev, idx(row, j)],
                tag,
            });
            prev = idx(row, j);
        }
        boundary_facets.push(BoundaryFacet {
            verts: [prev, 1],
            tag,
        });
    };
    chain(0, FacetTag::T);
    chain(ns, FacetTag::Sigma);

    let mesh = Mesh {
        model: config.model,
        kappa,
        vertices,
        simplices,
        boundary_facets,
        corner_vertices: vec![0, 1],
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Meshes the domain between an umbilical support surface and a chart cap.
pub fn generate_cap_domain(
    case: &UmbilicalCase<f64>,
    cap: ChartSurface<f64>,
    resolution: u32,
) -> Result<Mesh> {
    let config = CapConfig {
        model: case.model,
        support: case.support_surface(),
        cap,
    };
    mesh_config(&config, case.kappa, resolution, Grading::Uniform)
}

/// Meshes the lens between the two horospheres of the exact solution.
pub fn lens_mesh(lens: &HoroLens, resolution: u32) -> Result<Mesh> {
    mesh_config(&lens.cap_config(), lens.kappa(), resolution, Grading::Uniform)
}

/// Lens mesh with the Dirichlet arc replaced by a radially bulged arc
/// through the same corners: the non-umbilical negative control domain.
pub fn lens_mesh_bulged(lens: &HoroLens, resolution: u32, eps: f64) -> Result<Mesh> {
    let config = lens.cap_config();
    let geom = config.geometry()?;
    let sigma = match patch_curve2(&geom.sigma) {
        Curve2::Arc {
            center,
            radius,
            phi0,
            phi1,
        } => Curve2::BulgedArc {
            center,
            radius,
            phi0,
            phi1,
            eps,
        },
        _ => unreachable!("lens Sigma is an arc"),
    };
    let t_curve = patch_curve2(&geom.t);
    mesh_between(&config, &t_curve, &sigma, lens.kappa(), resolution, Grading::Uniform)
}

impl Mesh {
    /// Checks the structural invariants: vertices inside the chart, positive
    /// nondegenerate simplices, boundary facets that are edges of exactly one
    /// simplex, and corner vertices = those shared by both boundary tags.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (i, p) in self.vertices.iter().enumerate() {
            if !self.model.contains(&p[..]) {
                return Err(Error::Config(format!(
                    "vertex {i} at {p:?} outside the chart domain"
                )));
            }
        }
        for (k, s) in self.simplices.iter().enumerate() {
            if s.iter().any(|&v| v >= nv) {
                return Err(Error::Config(format!("simplex {k} has a bad index")));
            }
            let area = signed_area(
                &self.vertices[s[0]],
                &self.vertices[s[1]],
                &self.vertices[s[2]],
            );
            if area <= 1e-14 {
                return Err(Error::Config(format!(
                    "simplex {k} degenerate or misoriented (area {area:.2e})"
                )));
            }
        }
        let mut edge_use: Vec<((usize, usize), u32)> = Vec::with_capacity(3 * self.simplices.len());
        for s in &self.simplices {
            for e in [(s[0], s[1]), (s[1], s[2]), (s[2], s[0])] {
                edge_use.push(((e.0.min(e.1), e.0.max(e.1)), 1));
            }
        }
        edge_use.sort_unstable_by_key(|(e, _)| *e);
        let mut counts: Vec<((usize, usize), u32)> = Vec::new();
        for (e, _) in edge_use {
            match counts.last_mut() {
                Some((last, c)) if *last == e => *c += 1,
                _ => counts.push((e, 1)),
            }
        }
        for f in &self.boundary_facets {
            if f.verts.iter().any(|&v| v >= nv) {
                return Err(Error::Config("boundary facet has a bad index".into()));
            }
            let key = (f.verts[0].min(f.verts[1]), f.verts[0].max(f.verts[1]));
            match counts.binary_search_by_key(&key, |(e, _)| *e) {
                Ok(pos) if counts[pos].1 == 1 => {}
                Ok(_) => {
                    return Err(Error::Config(format!(
                        "boundary facet {key:?} is an interior edge"
                    )))
                }
                Err(_) => {
                    return Err(Error::Config(format!(
                        "boundary facet {key:?} is not a simplex edge"
                    )))
                }
            }
        }
        let boundary_edges = counts.iter().filter(|(_, c)| *c == 1).count();
        if boundary_edges != self.boundary_facets.len() {
            return Err(Error::Config(format!(
                "{} boundary edges but {} tagged facets",
                boundary_edges,
                self.boundary_facets.len()
            )));
        }
        let mut on_sigma = vec![false; nv];
        let mut on_t = vec![false; nv];
        for f in &self.boundary_facets {
            let row = match f.tag {
                FacetTag::Sigma => &mut on_sigma,
                FacetTag::T => &mut on_t,
            };
            for &v in &f.verts {
                row[v] = true;
            }
        }
        let shared: Vec<usize> = (0..nv).filter(|&v| on_sigma[v] && on_t[v]).collect();
        let mut declared = self.corner_vertices.clone();
        declared.sort_unstable();
        if shared != declared {
            return Err(Error::Config(format!(
                "corner set {declared:?} does not match shared boundary vertices {shared:?}"
            )));
        }
        Ok(())
    }

    /// True for vertices lying on a Sigma facet (the Dirichlet set).
    pub fn sigma_vertices(&self) -> Vec<bool> {
        let mut out = vec![false; self.vertices.len()];
        for f in &self.boundary_facets {
            if f.tag == FacetTag::Sigma {
                out[f.verts[0]] = true;
                out[f.verts[1]] = true;
            }
        }
        out
    }

    /// Serializes to the line-oriented exchange format:
    /// `dim nv ns nbf`, vertex lines, simplex lines, facet lines with S/T.
    pub fn write_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "2 {} {} {}",
            self.vertices.len(),
            self.simplices.len(),
            self.boundary_facets.len()
        )
        .unwrap();
        for p in &self.vertices {
            writeln!(out, "{} {}", p[0], p[1]).unwrap();
        }
        for s in &self.simplices {
            writeln!(out, "{} {} {}", s[0], s[1], s[2]).unwrap();
        }
        for f in &self.boundary_facets {
            let tag = match f.tag {
                FacetTag::Sigma => "S",
                FacetTag::T => "T",
            };
            writeln!(out, "{} {} {}", f.verts[0], f.verts[1], tag).unwrap();
        }
        out
    }

    /// Parses the exchange format back into a mesh over the given model.
    /// Corner vertices are recomputed from the facet tags.
    pub fn read_text(model: Model, kappa: f64, text: &str) -> Result<Mesh> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MeshFormat("empty mesh file".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::MeshFormat(format!("bad header token {tok:?}")))
            })
            .collect::<Result<_>>()?;
        let [dim, nv, ns, nbf] = head[..] else {
            return Err(Error::MeshFormat(format!(
                "header needs 4 fields, got {header:?}"
            )));
        };
        if dim != 2 {
            return Err(Error::MeshFormat(format!("unsupported dimension {dim}")));
        }
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated vertex block".into()))?;
            let mut it = line.split_whitespace().map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::MeshFormat(format!("bad coordinate {tok:?}")))
            });
            let x = it.next().transpose()?;
            let y = it.next().transpose()?;
            match (x, y, it.next()) {
                (Some(x), Some(y), None) => vertices.push([x, y]),
                _ => return Err(Error::MeshFormat(format!("bad vertex line {line:?}"))),
            }
        }
        let index = |tok: &str| -> Result<usize> {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::MeshFormat(format!("bad index {tok:?}")))?;
            if v >= nv {
                return Err(Error::MeshFormat(format!("index {v} out of range")));
            }
            Ok(v)
        };
        let mut simplices = Vec::with_capacity(ns);
        for _ in 0..ns {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated simplex block".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c] = toks[..] else {
                return Err(Error::MeshFormat(format!("bad simplex line {line:?}")));
            };
            simplices.push([index(a)?, index(b)?, index(c)?]);
        }
        let mut boundary_facets = Vec::with_capacity(nbf);
        for _ in 0..nbf {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated facet block".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [a, b, tag] = toks[..] else {
                return Err(Error::MeshFormat(format!("bad facet line {line:?}")));
            };
            let tag = match tag {
                "S" => FacetTag::Sigma,
                "T" => FacetTag::T,
                other => {
                    return Err(Error::MeshFormat(format!("unknown facet tag {other:?}")))
                }
            };
            boundary_facets.push(BoundaryFacet {
                verts: [index(a)?, index(b)?],
                tag,
            });
        }
        if lines.next().is_some() {
            return Err(Error::MeshFormat("trailing data after facet block".into()));
        }
        let mut mesh = Mesh {
            model,
            kappa,
            vertices,
            simplices,
            boundary_facets,
            corner_vertices: Vec::new(),
        };
        let mut on_sigma = vec![false; nv];
        let mut on_t = vec![false; nv];
        for f in &mesh.boundary_facets {
            let row = match f.tag {
                FacetTag::Sigma => &mut on_sigma,
                FacetTag::T => &mut on_t,
            };
            for &v in &f.verts {
                row[v] = true;
            }
        }
        mesh.corner_vertices = (0..nv).filter(|&v| on_sigma[v] && on_t[v]).collect();
        mesh.validate()?;
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_case, CaseId};

    fn test_cap(id: CaseId) -> ChartSurface<f64> {
        let (center, radius) = match id {
            CaseId::GeodesicSphereH => (vec![0.0, 0.5], 0.35),
            CaseId::EquidistantH => (vec![0.2, 1.3464], 0.55),
            CaseId::GeodesicPlaneH => (vec![0.0, 0.25], 0.45),
            CaseId::GeodesicSphereS => (vec![0.0, 0.35], 0.3),
        };
        ChartSurface::Sphere {
            center,
            radius,
            omega_inside: true,
        }
    }

    fn test_case(id: CaseId) -> UmbilicalCase<f64> {
        let param = match id {
            CaseId::GeodesicSphereH => 3.0f64.ln(),
            CaseId::EquidistantH => std::f64::consts::FRAC_PI_6,
            CaseId::GeodesicPlaneH => 0.0,
            CaseId::GeodesicSphereS => std::f64::consts::FRAC_PI_3,
        };
        make_case(id, param, 2).unwrap()
    }

    #[test]
    fn lens_mesh_lands_on_exact_surfaces() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let mesh = lens_mesh(&lens, 2).unwrap();
        mesh.validate().unwrap();
        let config = lens.cap_config();
        for f in &mesh.boundary_facets {
            let surf = match f.tag {
                FacetTag::Sigma => &config.cap,
                FacetTag::T => &config.support,
            };
            for &v in &f.verts {
                if mesh.corner_vertices.contains(&v) {
                    continue;
                }
                assert!(surf.residual(&mesh.vertices[v]).abs() < 1e-12);
            }
        }
        assert_eq!(mesh.corner_vertices.len(), 2);
        for &c in &mesh.corner_vertices {
            let p = mesh.vertices[c];
            assert!((p[0].abs() - 0.4).abs() < 1e-12, "corner {p:?}");
            assert!((p[1] - 0.2).abs() < 1e-12, "corner {p:?}");
        }
    }

    #[test]
    fn refinement_at_least_quadruples_simplices() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let coarse = lens_mesh(&lens, 1).unwrap();
        let fine = lens_mesh(&lens, 2).unwrap();
        assert!(fine.simplices.len() >= 4 * coarse.simplices.len());
        assert!(fine.vertices.len() >= 7 * coarse.vertices.len() / 2);
    }

    #[test]
    fn all_cases_mesh_and_validate() {
        for id in CaseId::ALL {
            let mesh = generate_cap_domain(&test_case(id), test_cap(id), 2).unwrap();
            mesh.validate().unwrap();
            assert_eq!(mesh.corner_vertices.len(), 2, "{id:?}");
            let sigma = mesh.sigma_vertices();
            assert!(sigma.iter().filter(|&&b| b).count() > 4, "{id:?}");
        }
    }

    #[test]
    fn nonintersecting_cap_is_a_config_error() {
        let case = test_case(CaseId::GeodesicSphereH);
        let far = ChartSurface::Sphere {
            center: vec![0.0, 0.9],
            radius: 0.05,
            omega_inside: true,
        };
        assert!(matches!(
            generate_cap_domain(&case, far, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn graded_mesh_validates_and_refines_corners() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let config = lens.cap_config();
        let graded = mesh_config(&config, 1.0, 2, Grading::TowardCorners(0.7)).unwrap();
        graded.validate().unwrap();
        let uniform = lens_mesh(&lens, 2).unwrap();
        assert_eq!(graded.vertices.len(), uniform.vertices.len());
        // The first T facet touches the corner; grading must shorten it.
        let edge_len = |m: &Mesh, f: &BoundaryFacet| {
            let a = m.vertices[f.verts[0]];
            let b = m.vertices[f.verts[1]];
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        assert!(edge_len(&graded, &graded.boundary_facets[0]) < edge_len(&uniform, &uniform.boundary_facets[0]));
    }

    #[test]
    fn text_round_trip_is_identical() {
        let lens = HoroLens::new(0.25).unwrap();
        let mesh = lens_mesh(&lens, 1).unwrap();
        let text = mesh.write_text();
        let back = Mesh::read_text(mesh.model, mesh.kappa, &text).unwrap();
        assert_eq!(back.write_text(), text);
        assert_eq!(back.corner_vertices, mesh.corner_vertices);
        assert!(matches!(
            Mesh::read_text(mesh.model, mesh.kappa, "2 1 1\n"),
            Err(Error::MeshFormat(_))
        ));
        let truncated = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            Mesh::read_text(mesh.model, mesh.kappa, &truncated),
            Err(Error::MeshFormat(_))
        ));
    }

    #[test]
    fn bulged_lens_meshes_with_off_circle_sigma() {
        let lens = HoroLens::new(1.0 / 3.0).unwrap();
        let mesh = lens_mesh_bulged(&lens, 2, 0.08).unwrap();
        mesh.validate().unwrap();
        let config = lens.cap_config();
        let mut max_sigma_resid = 0.0f64;
        for f in &mesh.boundary_facets {
            if f.tag == FacetTag::Sigma {
                for &v in &f.verts {
                    max_sigma_resid =
                        max_sigma_resid.max(config.cap.residual(&mesh.vertices[v]).abs());
                }
            }
        }
        assert!(max_sigma_resid > 1e-3, "sigma should leave the cap circle");
    }
}
