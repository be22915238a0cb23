//! Command-line driver for the verification suites, the lens example, the
//! finite element solver, and the weighted integral identity.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
//! configuration error, 3 numerical failure (including loss of coercivity).
//! All randomness flows from the --seed flag, so a fixed invocation writes
//! byte-identical reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spaceform::aux::AuxFunction;
use spaceform::bvp;
use spaceform::cap::ChartSurface;
use spaceform::error::{Error, Result};
use spaceform::fields::{make_case, CaseId, UmbilicalCase};
use spaceform::horolens::HoroLens;
use spaceform::mesh::{generate_cap_domain, lens_mesh, Mesh};
use spaceform::report::{csv, identity_records, CheckRecord, Report};
use spaceform::sample;
use spaceform::verify::{self, rigidity_check};

const FIELD_TOL: f64 = 1e-8;
const AUX_TOL: f64 = 1e-9;
const AUX_P_TOL: f64 = 1e-8;
const SAMPLES: usize = 1000;

#[derive(Parser)]
#[command(
    name = "spaceform",
    version,
    about = "Verification and solver driver for umbilical boundary problems on space forms"
)]
struct Cli {
    /// key = value configuration file with one [section] per subcommand;
    /// command-line flags override file entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise residual sweep of the conformal field triples.
    VerifyFields(VerifyFieldsArgs),
    /// Residual sweep of the auxiliary functions over a c-tilde grid.
    VerifyAuxfn(VerifyAuxfnArgs),
    /// Closed-form lens example: residuals and the contact angle law.
    RunExample(RunExampleArgs),
    /// Mesh, solve, and rigidity-check a domain across resolutions.
    Solve(SolveArgs),
    /// Weighted integral identity over an a-grid and quadrature levels.
    CheckIdentity(CheckIdentityArgs),
    /// Summarize a previously written JSON-lines report.
    Report(ReportArgs),
}

#[derive(Args)]
struct VerifyFieldsArgs {
    /// Case name (geodesic-sphere-h, equidistant-h, geodesic-plane-h,
    /// geodesic-sphere-s, or 1-4); all four when omitted.
    #[arg(long)]
    case: Option<String>,
    /// Geodesic radius for the sphere cases.
    #[arg(long = "R", allow_hyphen_values = true)]
    radius: Option<f64>,
    /// Tilt parameter for the equidistant case.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Ambient dimension n+1.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON-lines report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyAuxfnArgs {
    #[arg(long)]
    case: Option<String>,
    #[arg(long = "R", allow_hyphen_values = true)]
    radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Comma-separated c-tilde grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ctilde: Option<Vec<f64>>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunExampleArgs {
    /// Lens parameter in (0, 1/2).
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Lens parameter; selects the closed-form lens domain.
    #[arg(long)]
    b: Option<f64>,
    /// Umbilical case domain instead of the lens.
    #[arg(long)]
    case: Option<String>,
    #[arg(long = "R", allow_hyphen_values = true)]
    radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Robin constant of the data; the lens default is its exact value.
    #[arg(long, allow_hyphen_values = true)]
    ctilde: Option<f64>,
    /// Cap sphere as center-x,center-y,radius.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    cap: Option<Vec<f64>>,
    /// Number of refinement levels (resolutions 1..=levels).
    #[arg(long)]
    levels: Option<u32>,
    /// Output directory for mesh, solution, and convergence artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckIdentityArgs {
    #[arg(long)]
    b: Option<f64>,
    /// Quadrature levels 1..=levels for the identity sweep.
    #[arg(long)]
    levels: Option<u32>,
    /// Quadrature level for the standalone Wronskian flux.
    #[arg(long)]
    quad: Option<u32>,
    /// Comma-separated grid of the free constant a.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a_grid: Option<Vec<f64>>,
    /// Pair u against the sign-flipped comparison function (negative
    /// control; the Wronskian flux must stay visibly nonzero).
    #[arg(long)]
    flipped: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON-lines report file to summarize.
    file: PathBuf,
}

/// Parsed key = value file: section -> key -> value. Keys before the first
/// [section] land in the empty section and apply to every command.
struct Cfg {
    map: BTreeMap<String, BTreeMap<String, String>>,
    section: String,
}

impl Cfg {
    fn empty() -> Cfg {
        Cfg {
            map: BTreeMap::new(),
            section: String::new(),
        }
    }

    fn load(path: &Path, section: &str) -> Result<Cfg> {
        let text = fs::read_to_string(path)?;
        let mut map: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "config line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ))
            })?;
            map.entry(current.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Cfg {
            map,
            section: section.to_string(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map
            .get(&self.section)
            .and_then(|s| s.get(key))
            .or_else(|| self.map.get("").and_then(|s| s.get(key)))
            .map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("config key {key}: cannot parse {v:?}"))
            }),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let items = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            Error::Config(format!("config key {key}: cannot parse {s:?}"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(Some(items))
            }
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }
}

fn case_param(id: CaseId, radius: Option<f64>, alpha: Option<f64>) -> f64 {
    match id {
        CaseId::GeodesicSphereH => radius.unwrap_or(3f64.ln()),
        CaseId::EquidistantH => alpha.unwrap_or(std::f64::consts::FRAC_PI_6),
        CaseId::GeodesicPlaneH => 0.0,
        CaseId::GeodesicSphereS => radius.unwrap_or(std::f64::consts::FRAC_PI_3),
    }
}

fn default_cap(id: CaseId) -> ChartSurface<f64> {
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

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.render();
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    let failed = report.failures().count();
    println!(
        "{} checks, {} failed{}",
        report.records.len(),
        failed,
        out.map(|p| format!(", report at {}", p.display()))
            .unwrap_or_default()
    );
    for f in report.failures() {
        println!("FAIL {} ({}) residual {:e} tolerance {:e}", f.name, f.inputs, f.residual, f.tolerance);
    }
    Ok(())
}

fn selected_cases(case: Option<&str>) -> Result<Vec<CaseId>> {
    match case {
        Some(s) => Ok(vec![CaseId::parse(s)?]),
        None => Ok(CaseId::ALL.to_vec()),
    }
}

fn cmd_verify_fields(a: VerifyFieldsArgs, cfg: &Cfg) -> Result<bool> {
    let dim = a.dim.or(cfg.parse("dim")?).unwrap_or(2);
    let seed = a.seed.or(cfg.parse("seed")?).unwrap_or(7);
    let tol = a.tolerance.or(cfg.parse("tolerance")?).unwrap_or(FIELD_TOL);
    let radius = a.radius.or(cfg.parse("R")?);
    let alpha = a.alpha.or(cfg.parse("alpha")?);
    let case = a.case.or_else(|| cfg.raw("case").map(String::from));
    let out = a.out.or_else(|| cfg.path("out"));

    let mut report = Report::new();
    for id in selected_cases(case.as_deref())? {
        let param = case_param(id, radius, alpha);
        let case = make_case(id, param, dim)?;
        let interior = sample::case_interior(&case, SAMPLES, seed)?;
        let surface = sample::case_surface(&case, SAMPLES, seed ^ 0x5eed)?;
        let res = verify::check_fields(&case, &interior, &surface)?;
        let inputs = format!("case={} param={param} dim={dim} seed={seed}", id.label());
        for (name, value) in [
            ("conformal", res.conformal),
            ("killing", res.killing),
            ("div_x", res.div_x),
            ("div_y", res.div_y),
            ("hess_v", res.hess_v),
            ("robin_v", res.robin_v),
            ("x_tangent", res.x_tangent),
            ("y_normal", res.y_normal),
        ] {
            report.push(CheckRecord::new(
                format!("fields.{}.{name}", id.label()),
                inputs.clone(),
                value,
                0.0,
                value,
                tol,
            ));
        }
    }
    emit(&report, out.as_deref())?;
    Ok(report.all_pass())
}

fn cmd_verify_auxfn(a: VerifyAuxfnArgs, cfg: &Cfg) -> Result<bool> {
    let dim = a.dim.or(cfg.parse("dim")?).unwrap_or(2);
    let seed = a.seed.or(cfg.parse("seed")?).unwrap_or(7);
    let tol = a.tolerance.or(cfg.parse("tolerance")?).unwrap_or(AUX_TOL);
    let radius = a.radius.or(cfg.parse("R")?);
    let alpha = a.alpha.or(cfg.parse("alpha")?);
    let case = a.case.or_else(|| cfg.raw("case").map(String::from));
    let out = a.out.or_else(|| cfg.path("out"));
    let grid = a
        .ctilde
        .or(cfg.list("ctilde")?)
        .unwrap_or_else(|| vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    if grid.is_empty() {
        return Err(Error::Config("empty c-tilde grid".into()));
    }

    let mut report = Report::new();
    for id in selected_cases(case.as_deref())? {
        let case = make_case(id, case_param(id, radius, alpha), dim)?;
        for &c_tilde in &grid {
            let aux = AuxFunction::new(&case, c_tilde)?;
            let interior = sample::model_interior(&aux.model, SAMPLES, seed);
            let surface = sample::surface_points(&aux.model, &aux.surface, SAMPLES, seed ^ 0x5eed)?;
            let res = verify::check_aux(&aux, &interior, &surface)?;
            let inputs = format!(
                "case={} c_tilde={c_tilde} c0={:.6} dim={dim} seed={seed}",
                id.label(),
                aux.c0
            );
            for (name, value, t) in [
                ("resolvent", res.resolvent, tol),
                ("robin", res.robin, tol),
                ("companion", res.companion, tol),
                ("p_laplacian", res.p_lap, AUX_P_TOL.max(tol)),
            ] {
                report.push(CheckRecord::new(
                    format!("aux.{}.{name}", id.label()),
                    inputs.clone(),
                    value,
                    0.0,
                    value,
                    t,
                ));
            }
        }
    }
    emit(&report, out.as_deref())?;
    Ok(report.all_pass())
}

fn cmd_run_example(a: RunExampleArgs, cfg: &Cfg) -> Result<bool> {
    let b = a.b.or(cfg.parse("b")?).unwrap_or(1.0 / 3.0);
    let seed = a.seed.or(cfg.parse("seed")?).unwrap_or(7);
    let out = a.out.or_else(|| cfg.path("out"));

    let lens = HoroLens::new(b)?;
    let checks = verify::check_lens(&lens, SAMPLES, seed)?;
    let inputs = format!(
        "b={b} c_tilde={} cos_theta={} seed={seed}",
        lens.c_tilde(),
        lens.cos_contact_angle()
    );
    let mut report = Report::new();
    for (name, value, tol) in [
        ("pde", checks.pde, 1e-10),
        ("dirichlet", checks.dirichlet, 1e-12),
        ("neumann", checks.neumann, 1e-10),
        ("robin", checks.robin, 1e-10),
        ("angle", checks.angle, 1e-8),
        ("boundary_hessian", checks.boundary_hessian, 1e-8),
    ] {
        report.push(CheckRecord::new(
            format!("lens.{name}"),
            inputs.clone(),
            value,
            0.0,
            value,
            tol,
        ));
    }
    emit(&report, out.as_deref())?;
    Ok(report.all_pass())
}

struct SolveDomain {
    label: String,
    lens: Option<HoroLens>,
    case: Option<UmbilicalCase<f64>>,
    cap: Option<ChartSurface<f64>>,
}

impl SolveDomain {
    fn mesh(&self, resolution: u32) -> Result<Mesh> {
        match (&self.lens, &self.case) {
            (Some(lens), _) => lens_mesh(lens, resolution),
            (None, Some(case)) => {
                generate_cap_domain(case, self.cap.clone().expect("cap set"), resolution)
            }
            _ => unreachable!(),
        }
    }
}

fn max_edge(mesh: &Mesh) -> f64 {
    let mut h = 0.0f64;
    for s in &mesh.simplices {
        for e in 0..3 {
            let a = mesh.vertices[s[e]];
            let b = mesh.vertices[s[(e + 1) % 3]];
            h = h.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
        }
    }
    h
}

fn cmd_solve(a: SolveArgs, cfg: &Cfg) -> Result<bool> {
    let levels = a.levels.or(cfg.parse("levels")?).unwrap_or(4);
    if levels == 0 {
        return Err(Error::Config("solve needs at least one level".into()));
    }
    let out = a
        .out
        .or_else(|| cfg.path("out"))
        .ok_or_else(|| Error::Config("solve requires --out for its artifacts".into()))?;
    fs::create_dir_all(&out)?;
    let case_name = a.case.or_else(|| cfg.raw("case").map(String::from));
    let radius = a.radius.or(cfg.parse("R")?);
    let alpha = a.alpha.or(cfg.parse("alpha")?);
    let ctilde = a.ctilde.or(cfg.parse("ctilde")?);

    let domain = match case_name {
        Some(name) => {
            let id = CaseId::parse(&name)?;
            let case = make_case(id, case_param(id, radius, alpha), 2)?;
            let cap = match a.cap.or(cfg.list("cap")?) {
                None => default_cap(id),
                Some(c) if c.len() == 3 => ChartSurface::Sphere {
                    center: vec![c[0], c[1]],
                    radius: c[2],
                    omega_inside: true,
                },
                Some(c) => {
                    return Err(Error::Config(format!(
                        "--cap wants center-x,center-y,radius, got {} values",
                        c.len()
                    )))
                }
            };
            SolveDomain {
                label: id.label().to_string(),
                lens: None,
                case: Some(case),
                cap: Some(cap),
            }
        }
        None => {
            let b = a.b.or(cfg.parse("b")?).unwrap_or(1.0 / 3.0);
            SolveDomain {
                label: format!("lens-b-{b}"),
                lens: Some(HoroLens::new(b)?),
                case: None,
                cap: None,
            }
        }
    };

    let c_tilde = match (&domain.lens, ctilde) {
        (_, Some(c)) => c,
        (Some(lens), None) => lens.c_tilde(),
        (None, None) => 0.0,
    };
    let oracle = domain
        .lens
        .filter(|l| (l.c_tilde() - c_tilde).abs() < 1e-12)
        .map(|l| l.u_field());

    let mut report = Report::new();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut finest = None;
    for r in 1..=levels {
        let mesh = domain.mesh(r)?;
        let system = bvp::assemble(&mesh, c_tilde)?;
        let solution = bvp::solve(&system)?;
        let galerkin = bvp::galerkin_residual(&system, &solution);
        report.push(CheckRecord::new(
            format!("solve.{}.galerkin", domain.label),
            format!("level={r} c_tilde={c_tilde}"),
            galerkin,
            0.0,
            galerkin,
            1e-10,
        ));
        let l2 = match &oracle {
            Some(u) => {
                let e = bvp::l2_error(&solution, |x| u.value(x))?;
                errors.push(e);
                e
            }
            None => f64::NAN,
        };
        let rigidity = rigidity_for(&domain, &solution)?;
        let (c_mean, c_stddev, angle) = match &rigidity {
            Some(rep) => (rep.c_mean, rep.c_stddev, rep.measured_angle),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        rows.push(vec![r as f64, max_edge(&mesh), l2, c_mean, c_stddev, angle]);
        finest = Some((mesh, solution, rigidity));
    }

    for pair in errors.windows(2) {
        report.push(CheckRecord::new(
            format!("solve.{}.l2_decreasing", domain.label),
            format!("from={} to={}", pair[0], pair[1]),
            pair[1],
            pair[0],
            if pair[1] < pair[0] { 0.0 } else { pair[1] - pair[0] },
            0.0,
        ));
    }

    let (mesh, solution, rigidity) = finest.expect("at least one level");
    if let Some(rep) = &rigidity {
        report.push(CheckRecord::new(
            format!("solve.{}.rigidity", domain.label),
            format!(
                "c_mean={} c_stddev={} curvature={} predicted_angle={} measured_angle={} min_u={} status={:?}",
                rep.c_mean,
                rep.c_stddev,
                rep.inferred_principal_curvature,
                rep.predicted_angle,
                rep.measured_angle,
                rep.min_u,
                rep.status()
            ),
            rep.c_stddev,
            0.0,
            rep.c_stddev / rep.c_mean.abs().max(f64::MIN_POSITIVE),
            verify::RIGIDITY_SPREAD,
        ));
    }
    if mesh.model.k_sign() > 0 {
        let lambda1 = bvp::estimate_lambda1(&mesh)?;
        let bound = mesh.model.dim as f64;
        report.push(CheckRecord::new(
            format!("solve.{}.lambda1", domain.label),
            format!("level={levels} bound={bound}"),
            lambda1,
            bound,
            if lambda1 > bound { 0.0 } else { bound - lambda1 },
            0.0,
        ));
    }

    fs::write(out.join("mesh.txt"), mesh.write_text())?;
    let solution_rows: Vec<Vec<f64>> = mesh
        .vertices
        .iter()
        .zip(&solution.nodal_values)
        .map(|(p, &u)| vec![p[0], p[1], u])
        .collect();
    fs::write(out.join("solution.csv"), csv(&["x", "y", "u"], &solution_rows))?;
    fs::write(
        out.join("convergence.csv"),
        csv(
            &["level", "h", "l2_error", "c_mean", "c_stddev", "angle"],
            &rows,
        ),
    )?;
    emit(&report, Some(&out.join("checks.jsonl")))?;
    Ok(report.all_pass())
}

fn rigidity_for(
    domain: &SolveDomain,
    solution: &bvp::BvpSolution,
) -> Result<Option<verify::RigidityReport>> {
    let aux = match (&domain.lens, &domain.case) {
        (Some(lens), _) => {
            if (lens.c_tilde() - solution.c_tilde).abs() > 1e-12 {
                return Ok(None);
            }
            lens.aux_function()
        }
        (None, Some(case)) => {
            let aux = AuxFunction::new(case, solution.c_tilde)?;
            if aux.model != solution.mesh.model {
                return Ok(None);
            }
            aux
        }
        _ => unreachable!(),
    };
    rigidity_check(solution, &aux).map(Some)
}

fn cmd_check_identity(a: CheckIdentityArgs, cfg: &Cfg) -> Result<bool> {
    let b = a.b.or(cfg.parse("b")?).unwrap_or(1.0 / 3.0);
    let max_level = a.levels.or(cfg.parse("levels")?).unwrap_or(4);
    let wronskian_level = a.quad.or(cfg.parse("quad")?).unwrap_or(7);
    let flipped = a.flipped || cfg.parse("flipped")?.unwrap_or(false);
    let out = a.out.or_else(|| cfg.path("out"));
    let grid = a
        .a_grid
        .or(cfg.list("a_grid")?)
        .unwrap_or_else(|| vec![-1.0, 0.0, 0.25, 5.0]);
    if grid.is_empty() {
        return Err(Error::Config("empty a grid".into()));
    }

    let lens = HoroLens::new(b)?;
    let levels: Vec<u32> = (1..=max_level.max(1)).collect();
    let v = lens.v_field_with(verify::IDENTITY_SKEW);
    let phi = if flipped {
        lens.phi_field_flipped()
    } else {
        lens.phi_field()
    };

    let mut report = Report::new();
    for &a_const in &grid {
        let id_report =
            verify::check_identity_with(&lens, &v, &phi, a_const, &levels, verify::IDENTITY_SKEW)?;
        for record in identity_records(&id_report) {
            println!(
                "{}",
                serde_json::to_string(&record).expect("identity record serializes")
            );
        }
        let inputs = format!("b={b} a={a_const} flipped={flipped}");
        let worst_lhs = id_report
            .levels
            .iter()
            .map(|l| l.lhs.abs())
            .fold(0.0, f64::max);
        report.push(CheckRecord::new(
            "identity.volume_side",
            inputs.clone(),
            worst_lhs,
            0.0,
            worst_lhs,
            1e-10,
        ));
        for pair in id_report.levels.windows(2) {
            let (prev, next) = (pair[0].rhs.abs(), pair[1].rhs.abs());
            report.push(CheckRecord::new(
                "identity.rhs_decreasing",
                format!("{inputs} level={}", pair[1].level),
                next,
                prev,
                if next <= prev.max(1e-12) { 0.0 } else { next - prev },
                0.0,
            ));
        }
        let last = id_report.levels.last().expect("nonempty levels");
        report.push(CheckRecord::new(
            "identity.boundary_side",
            format!("{inputs} level={}", last.level),
            last.rhs,
            0.0,
            last.rhs,
            1e-6,
        ));
    }
    let wronskian = verify::sigma_wronskian(&lens, &v, &phi, wronskian_level)?;
    report.push(CheckRecord::new(
        "identity.sigma_wronskian",
        format!("b={b} flipped={flipped} level={wronskian_level}"),
        wronskian,
        0.0,
        wronskian,
        1e-8,
    ));
    emit(&report, out.as_deref())?;
    Ok(report.all_pass())
}

fn cmd_report(a: ReportArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.file)?;
    let report = Report::parse(&text)?;
    let failed = report.failures().count();
    println!(
        "{}: {} checks, {} failed",
        a.file.display(),
        report.records.len(),
        failed
    );
    for f in report.failures() {
        println!("FAIL {} ({}) residual {:e} tolerance {:e}", f.name, f.inputs, f.residual, f.tolerance);
    }
    Ok(report.all_pass())
}

fn section_of(command: &Command) -> &'static str {
    match command {
        Command::VerifyFields(_) => "verify-fields",
        Command::VerifyAuxfn(_) => "verify-auxfn",
        Command::RunExample(_) => "run-example",
        Command::Solve(_) => "solve",
        Command::CheckIdentity(_) => "check-identity",
        Command::Report(_) => "report",
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) | Error::Coercivity { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Cfg::load(path, section_of(&cli.command)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Cfg::empty(),
    };
    let outcome = match cli.command {
        Command::VerifyFields(a) => cmd_verify_fields(a, &cfg),
        Command::VerifyAuxfn(a) => cmd_verify_auxfn(a, &cfg),
        Command::RunExample(a) => cmd_run_example(a, &cfg),
        Command::Solve(a) => cmd_solve(a, &cfg),
        Command::CheckIdentity(a) => cmd_check_identity(a, &cfg),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
