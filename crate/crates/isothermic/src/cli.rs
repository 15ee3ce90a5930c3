//! Command-line driver: `isothermic <command> [flags]`.
//!
//! Commands: `surface`, `omega-check`, `calapso`, `darboux`, `monodromy`, `limits`,
//! `pushforward`, `zero-smoke`. Exit code 0 on success, 2 on invalid input or a failed
//! validation, 3 on numeric non-convergence, 1 on I/O errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connection::{monodromy, primitive, IntegrationOptions, PathSpec, PolarPoint, Scaled};
use crate::error::{Error, Result};
use crate::io::{export_csv, export_json, export_obj, Mesh, ModelConfig, Table};
use crate::minkowski::{adjoint, euclidean_lift, pdist, LightVec, LorentzMap};
use crate::polecore::Schedule;
use crate::surface::{self, closedness_residual, factorization_check, FactorizationReport, OmegaField, QuadDiff, SurfaceModel};
use crate::transforms::first_order::fo_monodromy_structure;
use crate::transforms::pushforward::{pushforward_check, TransformKind};
use crate::transforms::second_order::{limit_sphere, so_gauge, so_monodromy_structure, GaugedTransport};
use crate::transforms::zero_case::zero_case_smoke;
use crate::transforms::{calapso, darboux, limit_study, ConvergenceReport, DirectTransport, GridSpec, Transport};

/// Increment below which a radial sequence counts as converged in limit reports.
pub const LIMIT_TOL: f64 = 1e-6;
/// Largest closedness residual accepted by `omega-check`.
pub const CLOSEDNESS_TOL: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(name = "isothermic", about = "Darboux and Calapso transforms of meromorphically isothermic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the base surface on the grid.
    Surface(Common),
    /// Check that Q polarizes the surface: factorization of the Hopf differential and dΩ = 0.
    OmegaCheck(Common),
    /// Calapso transform on the grid with a radial limit report.
    Calapso(Common),
    /// Darboux transform on the grid with a radial limit report.
    Darboux(Common),
    /// Monodromy of λΩ around the puncture and its structure at the pole.
    Monodromy(Common),
    /// Convergence tables of Calapso and Darboux transforms along the radius through the base point.
    Limits(Common),
    /// Whether the transform descends to the j-fold cover.
    Pushforward(Pushforward),
    /// Transforms at a zero of Q: continuity through the zero and decay of the Darboux differential.
    ZeroSmoke(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model preset, JSON file or inline JSON descriptor.
    #[arg(long, default_value = "revolution-sech")]
    model: String,
    #[arg(long, default_value_t = 0.375, allow_negative_numbers = true)]
    lambda: f64,
    /// Base point r,phi on the cover.
    #[arg(long, default_value = "0.5,0.3")]
    base: String,
    /// Grid nr,nphi,phimax.
    #[arg(long, default_value = "12,16,6.283185307179586")]
    grid: String,
    /// Number of radial halvings in limit computations.
    #[arg(long, default_value_t = 24)]
    schedule: usize,
    /// Minimum integration steps per segment.
    #[arg(long, default_value_t = 4)]
    steps: usize,
    /// Relative integration tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Smallest grid radius.
    #[arg(long, default_value_t = 0.05)]
    rmin: f64,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial point of Darboux transforms: `random`, `w+`, `w-` or x,y,z in R^n.
    #[arg(long, default_value = "random")]
    init: String,
}

#[derive(Args, Debug, Clone)]
struct Pushforward {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "darboux")]
    kind: Kind,
    /// Order of the cover.
    #[arg(long, default_value_t = 1)]
    j: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Calapso,
    Darboux,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) | Error::Validation(_) => 2,
        Error::NonConvergence(_) => 3,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

/// Parses arguments, runs the command and returns the exit code. Errors go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = std::env::var("MPL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0);
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Invalid(format!("MPL_THREADS: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("isothermic: {e}");
            exit_code(&e)
        }
    }
}

/// Validated inputs shared by all commands.
struct Setup {
    cfg: ModelConfig,
    model: Arc<dyn SurfaceModel>,
    q: QuadDiff,
    lambda: f64,
    base: PolarPoint,
    grid: GridSpec,
    sched: Schedule,
    opts: IntegrationOptions,
    seed: u64,
    init_spec: String,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| Error::Invalid(format!("--{what}: {e}")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("--{what}: expected {n} finite comma-separated numbers")));
    }
    Ok(v)
}

impl Setup {
    fn new(c: &Common) -> Result<Self> {
        let cfg = ModelConfig::resolve(&c.model)?;
        let model = cfg.build()?;
        let q = cfg.quad_diff();
        if !(c.tol > 0.0) {
            return Err(Error::Invalid("--tol must be positive".into()));
        }
        if !(c.rmin > 0.0 && c.rmin < cfg.r0) {
            return Err(Error::Invalid("--rmin must lie in (0, r0)".into()));
        }
        let b = parse_list(&c.base, 2, "base")?;
        let base = PolarPoint::new(b[0], b[1]);
        if !(base.r > 0.0 && base.r < cfg.r0) {
            return Err(Error::Invalid("--base: radius must lie in (0, r0)".into()));
        }
        let g = parse_list(&c.grid, 3, "grid")?;
        if g[0] < 0.0 || g[1] < 0.0 || g[0].fract() != 0.0 || g[1].fract() != 0.0 {
            return Err(Error::Invalid("--grid: sizes must be non-negative integers".into()));
        }
        let (nr, nphi) = (g[0] as usize, g[1] as usize);
        let grid = if nr == 0 || nphi == 0 {
            GridSpec { radii: vec![], angles: vec![] }
        } else {
            GridSpec::log_polar(c.rmin, 0.9 * cfg.r0, nr, nphi, g[2])?
        };
        if c.schedule < 4 {
            return Err(Error::Invalid("--schedule must be at least 4".into()));
        }
        let opts = IntegrationOptions { min_steps: c.steps.max(1), ..IntegrationOptions::default() }.with_tol(c.tol);
        Ok(Setup {
            cfg,
            model,
            q,
            lambda: c.lambda,
            base,
            grid,
            sched: Schedule { k_max: c.schedule, tol: c.tol.max(1e-12) },
            opts,
            seed: c.seed,
            init_spec: c.init.clone(),
            out: c.out.clone(),
            format: c.format,
        })
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(Error::Invalid(format!("--format {f:?} is not available for this command")));
        }
        Ok(f)
    }

    /// Transport through the analytic second-order gauge when available, else direct.
    fn transport(&self) -> Result<Box<dyn Transport>> {
        if self.q.pole_order() == 2 && self.model.profile().is_some() {
            if let Ok(data) = so_gauge(self.model.clone(), &self.q) {
                return Ok(Box::new(GaugedTransport::new(data, self.lambda)));
            }
        }
        Ok(Box::new(DirectTransport::new(self.model.clone(), self.q.clone(), self.lambda)))
    }

    fn second_order_sphere(&self) -> Option<crate::transforms::second_order::SphereDescriptor> {
        let data = so_gauge(self.model.clone(), &self.q).ok()?;
        if 1.0 - 2.0 * data.lambda_eff(self.lambda) >= 0.0 {
            return None;
        }
        limit_sphere(&data, self.lambda, self.base, &self.sched, &self.opts, 2).ok()
    }

    fn init(&self) -> Result<LightVec> {
        let n = self.model.space().n;
        match self.init_spec.as_str() {
            "random" => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let x: Vec<f64> = (0..n).map(|i| if i < 3 { rng.gen_range(-1.5..1.5) } else { 0.0 }).collect();
                Ok(euclidean_lift(&x))
            }
            "w+" | "w-" => {
                let sph = self.second_order_sphere().ok_or_else(|| Error::Invalid("--init w±: needs a second-order pole of a revolution model with 1 − 2λ < 0".into()))?;
                Ok(if self.init_spec == "w+" { sph.w_plus } else { sph.w_minus })
            }
            s => {
                let mut x = parse_list(s, s.split(',').count(), "init")?;
                if x.len() > n {
                    return Err(Error::Invalid(format!("--init: at most {n} coordinates")));
                }
                x.resize(n, 0.0);
                Ok(euclidean_lift(&x))
            }
        }
    }

    fn envelope<'a, T: Serialize>(&'a self, command: &'a str, report: T) -> Envelope<'a, T> {
        Envelope { command, seed: self.seed, model: &self.cfg, lambda: self.lambda, base: self.base, tol: self.opts.tol, report }
    }

    fn sink(&self, path: Option<&Path>) -> Result<Box<dyn Write>> {
        Ok(match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(std::io::stdout())),
        })
    }

    /// Writes the primary output; with OBJ output the JSON report goes next to the mesh (or to
    /// standard error when the mesh goes to standard output).
    fn emit<T: Serialize>(&self, command: &str, format: Format, mesh: Option<&Mesh>, table: Option<&Table>, report: T) -> Result<()> {
        let env = self.envelope(command, report);
        match format {
            Format::Obj => {
                let mut w = self.sink(self.out.as_deref())?;
                export_obj(mesh.expect("mesh output"), &mut w)?;
                w.flush()?;
                match &self.out {
                    Some(p) => {
                        let mut rw = self.sink(Some(&p.with_extension("json")))?;
                        export_json(&env, &mut rw)?;
                        rw.flush()?;
                    }
                    None => export_json(&env, std::io::stderr())?,
                }
            }
            Format::Csv => {
                let mut w = self.sink(self.out.as_deref())?;
                export_csv(table.expect("table output"), &mut w)?;
                w.flush()?;
            }
            Format::Json => {
                let mut w = self.sink(self.out.as_deref())?;
                export_json(&env, &mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    command: &'a str,
    seed: u64,
    model: &'a ModelConfig,
    lambda: f64,
    base: PolarPoint,
    tol: f64,
    report: T,
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Surface(c) => cmd_surface(&Setup::new(c)?),
        Command::OmegaCheck(c) => cmd_omega_check(&Setup::new(c)?),
        Command::Calapso(c) => cmd_calapso(&Setup::new(c)?),
        Command::Darboux(c) => cmd_darboux(&Setup::new(c)?),
        Command::Monodromy(c) => cmd_monodromy(&Setup::new(c)?),
        Command::Limits(c) => cmd_limits(&Setup::new(c)?),
        Command::Pushforward(p) => cmd_pushforward(&Setup::new(&p.common)?, p.kind, p.j),
        Command::ZeroSmoke(c) => cmd_zero_smoke(&Setup::new(c)?),
    }
}

fn point_table(points: &[(PolarPoint, LightVec)]) -> Result<Table> {
    let mut t = Table::new(&["r", "phi", "x", "y", "z"]);
    for (at, y) in points {
        let x = crate::minkowski::affine_point(y)?;
        t.push(vec![at.r, at.phi, x[0], x[1], x[2]])?;
    }
    Ok(t)
}

fn grid_mesh(grid: &GridSpec, points: &[LightVec]) -> Result<Mesh> {
    if grid.is_empty() {
        Ok(Mesh::empty())
    } else {
        Mesh::from_points(grid, points)
    }
}

#[derive(Serialize)]
struct SurfaceReport {
    grid: GridSpec,
    vertices: usize,
}

fn cmd_surface(s: &Setup) -> Result<()> {
    let f = s.format(Format::Obj, &[Format::Obj, Format::Csv, Format::Json])?;
    let pts = s.grid.points();
    let lifts = pts.iter().map(|&p| Ok(surface::jet_log(s.model.as_ref(), p)?.f)).collect::<Result<Vec<_>>>()?;
    let mesh = grid_mesh(&s.grid, &lifts)?;
    let table = point_table(&pts.iter().copied().zip(lifts.iter().cloned()).collect::<Vec<_>>())?;
    let n = mesh.vertices.len();
    let report = SurfaceReport { grid: s.grid.clone(), vertices: n };
    if f == Format::Json {
        #[derive(Serialize)]
        struct Full<'a> {
            grid: &'a GridSpec,
            vertices: &'a [[f64; 3]],
        }
        return s.emit("surface", f, None, None, Full { grid: &s.grid, vertices: &mesh.vertices });
    }
    s.emit("surface", f, Some(&mesh), Some(&table), report)
}

#[derive(Serialize)]
struct OmegaReport {
    factorization: FactorizationReport,
    /// (r, φ, |dΩ|) at the sample points.
    closedness: Vec<(f64, f64, f64)>,
    max_closedness: f64,
    closedness_tol: f64,
    holomorphy_residual: f64,
    passed: bool,
}

fn cmd_omega_check(s: &Setup) -> Result<()> {
    let f = s.format(Format::Json, &[Format::Json])?;
    let r0 = s.cfg.r0;
    let samples: Vec<PolarPoint> = [0.3, 0.5, 0.7].iter().flat_map(|&r| [0.0, 0.7, 2.0, 4.0].map(|a| PolarPoint::new(r * r0, a))).collect();
    let factorization = factorization_check(s.model.as_ref(), &s.q, &samples)?;
    let h = 1e-3 * r0;
    let closedness = samples.iter().map(|p| Ok((p.r, p.phi, closedness_residual(s.model.clone(), &s.q, *p, h)?))).collect::<Result<Vec<_>>>()?;
    let max_closedness = closedness.iter().map(|c| c.2).fold(0.0, f64::max);
    let holomorphy_residual = s.q.cr_residual(r0);
    let passed = factorization.isothermic && max_closedness <= CLOSEDNESS_TOL;
    let report = OmegaReport { factorization, closedness, max_closedness, closedness_tol: CLOSEDNESS_TOL, holomorphy_residual, passed };
    s.emit("omega-check", f, None, None, report)?;
    if passed {
        Ok(())
    } else {
        Err(Error::Validation(format!("Q does not polarize the surface: closedness residual {max_closedness:.3e}")))
    }
}

/// Radial transforms from the base point with error estimates.
struct Radial {
    radii: Vec<f64>,
    calapso: Vec<LightVec>,
    darboux: Vec<LightVec>,
    error: Vec<f64>,
}

fn radial(s: &Setup, t: &dyn Transport, init: &LightVec) -> Result<Radial> {
    let p = s.base;
    let u = adjoint(&t.frame(p)?) * init;
    let mut g = LorentzMap::identity(t.dim(), t.dim());
    let mut prev = p;
    let mut err = 0.0;
    let mut out = Radial { radii: vec![], calapso: vec![], darboux: vec![], error: vec![] };
    for r in s.sched.radii(p.r) {
        let q = p.at_radius(r);
        let step = primitive(t.reduced(), &PathSpec::segment(prev, q)?, &s.opts)?;
        g = &g * &step.value;
        err = f64::max(err, step.error_estimate);
        out.radii.push(r);
        out.calapso.push(t.calapso_point(p, q, &g)?);
        out.darboux.push(t.darboux_point(q, &g, &u)?);
        out.error.push(err);
        prev = q;
    }
    Ok(out)
}

#[derive(Serialize)]
struct TransformReport {
    kind: &'static str,
    grid: GridSpec,
    #[serde(with = "crate::serial::repr")]
    init: Option<LightVec>,
    admissibility_margin: Option<f64>,
    limit: ConvergenceReport,
    /// proj_dist of the limit estimate to ⟨f(s)⟩.
    distance_to_f_s: Option<f64>,
    max_error_estimate: f64,
}

fn sphere_basis(s: &Setup) -> Option<nalgebra::DMatrix<f64>> {
    s.second_order_sphere().map(|d| d.subspace)
}

fn f_at_s(s: &Setup, r: f64) -> Result<LightVec> {
    Ok(surface::jet_log(s.model.as_ref(), s.base.at_radius(r))?.f)
}

fn cmd_calapso(s: &Setup) -> Result<()> {
    let f = s.format(Format::Obj, &[Format::Obj, Format::Csv, Format::Json])?;
    let t = s.transport()?;
    let res = if s.grid.is_empty() { None } else { Some(calapso(t.as_ref(), s.base, &s.grid, &s.opts)?) };
    let points: Vec<LightVec> = res.iter().flat_map(|r| r.samples.iter().map(|x| x.point.clone())).collect();
    let probe = euclidean_lift(&vec![0.0; s.model.space().n]);
    let rad = radial(s, t.as_ref(), &probe)?;
    let limit = limit_study(&rad.radii, &rad.calapso, sphere_basis(s).as_ref(), LIMIT_TOL)?;
    let mesh = grid_mesh(&s.grid, &points)?;
    let table = point_table(&s.grid.points().into_iter().zip(points.iter().cloned()).collect::<Vec<_>>())?;
    let report = TransformReport {
        kind: "calapso",
        grid: s.grid.clone(),
        init: None,
        admissibility_margin: None,
        max_error_estimate: rad.error.last().copied().unwrap_or(0.0),
        distance_to_f_s: None,
        limit,
    };
    s.emit("calapso", f, Some(&mesh), Some(&table), report)
}

fn cmd_darboux(s: &Setup) -> Result<()> {
    let f = s.format(Format::Obj, &[Format::Obj, Format::Csv, Format::Json])?;
    if s.lambda == 0.0 {
        return Err(Error::Invalid("darboux: λ must be nonzero".into()));
    }
    let t = s.transport()?;
    let init = s.init()?;
    let res = if s.grid.is_empty() { None } else { Some(darboux(t.as_ref(), s.base, &init, &s.grid, &s.opts)?) };
    let points: Vec<LightVec> = res.iter().flat_map(|r| r.samples.iter().map(|x| x.point.clone())).collect();
    let rad = radial(s, t.as_ref(), &init)?;
    let limit = limit_study(&rad.radii, &rad.darboux, sphere_basis(s).as_ref(), LIMIT_TOL)?;
    let fs = f_at_s(s, *rad.radii.last().expect("schedule is nonempty"))?;
    let distance_to_f_s = limit.limit.as_ref().map(|l| pdist(l, &fs));
    let mesh = grid_mesh(&s.grid, &points)?;
    let table = point_table(&s.grid.points().into_iter().zip(points.iter().cloned()).collect::<Vec<_>>())?;
    let report = TransformReport {
        kind: "darboux",
        grid: s.grid.clone(),
        init: Some(init),
        admissibility_margin: res.as_ref().map(|r| r.admissibility_margin),
        max_error_estimate: rad.error.last().copied().unwrap_or(0.0),
        distance_to_f_s,
        limit,
    };
    s.emit("darboux", f, Some(&mesh), Some(&table), report)
}

#[derive(Serialize)]
struct LoopReport {
    #[serde(with = "crate::serial::repr")]
    monodromy: LorentzMap,
    monodromy_error: f64,
    /// ‖𝓜 − id‖.
    defect: f64,
}

fn cmd_monodromy(s: &Setup) -> Result<()> {
    let f = s.format(Format::Json, &[Format::Json])?;
    match s.q.pole_order() {
        2 => {
            let data = so_gauge(s.model.clone(), &s.q)?;
            s.emit("monodromy", f, None, None, so_monodromy_structure(&data, s.lambda, s.base, &s.sched, &s.opts)?)
        }
        1 => s.emit("monodromy", f, None, None, fo_monodromy_structure(s.model.clone(), &s.q, s.lambda, s.base, &s.sched, &s.opts)?),
        _ => {
            let form = Scaled::new(s.lambda, Arc::new(OmegaField::new(s.model.clone(), s.q.clone())));
            let m = monodromy(&form, s.base, &s.opts)?;
            let dim = m.value.nrows();
            let defect = (&m.value - LorentzMap::identity(dim, dim)).norm();
            s.emit("monodromy", f, None, None, LoopReport { monodromy: m.value, monodromy_error: m.error_estimate, defect })
        }
    }
}

#[derive(Serialize)]
struct LimitsReport {
    table: Table,
    calapso: ConvergenceReport,
    darboux: ConvergenceReport,
    #[serde(with = "crate::serial::repr")]
    init: LightVec,
}

fn cmd_limits(s: &Setup) -> Result<()> {
    let f = s.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let t = s.transport()?;
    let init = s.init()?;
    let rad = radial(s, t.as_ref(), &init)?;
    let sphere = sphere_basis(s);
    let cal = limit_study(&rad.radii, &rad.calapso, sphere.as_ref(), LIMIT_TOL)?;
    let dar = limit_study(&rad.radii, &rad.darboux, sphere.as_ref(), LIMIT_TOL)?;
    let fs = f_at_s(s, *rad.radii.last().expect("schedule is nonempty"))?;
    let mut table = Table::new(&["radius", "calapso_increment", "darboux_increment", "darboux_distance_to_f_s", "error_estimate"]);
    for k in 0..rad.radii.len() {
        let inc = |v: &[f64]| if k == 0 { f64::NAN } else { v[k - 1] };
        table.push(vec![rad.radii[k], inc(&cal.increments), inc(&dar.increments), pdist(&rad.darboux[k], &fs), rad.error[k]])?;
    }
    let report = LimitsReport { table: table.clone(), calapso: cal, darboux: dar, init };
    s.emit("limits", f, None, Some(&table), report)
}

fn cmd_pushforward(s: &Setup, kind: Kind, j: usize) -> Result<()> {
    let f = s.format(Format::Json, &[Format::Json])?;
    if j == 0 {
        return Err(Error::Invalid("--j must be positive".into()));
    }
    let t = DirectTransport::new(s.model.clone(), s.q.clone(), s.lambda);
    let mono = monodromy(t.reduced(), s.base, &s.opts)?.value;
    let kind = match kind {
        Kind::Calapso => TransformKind::Calapso,
        Kind::Darboux => TransformKind::Darboux { init: s.init()? },
    };
    let samples = [s.base.at_radius(0.7 * s.base.r).turned(0.5), s.base.at_radius((1.4 * s.base.r).min(0.95 * s.cfg.r0)).turned(-1.3)];
    let v = pushforward_check(&t, &mono, s.base, &kind, j, &samples, &s.opts)?;
    s.emit("pushforward", f, None, None, v)
}

fn cmd_zero_smoke(s: &Setup) -> Result<()> {
    let f = s.format(Format::Json, &[Format::Json])?;
    let init = s.init()?;
    let z = s.base.z();
    let rep = zero_case_smoke(s.model.clone(), &s.q, s.lambda, (z.re, z.im), &init, &s.opts)?;
    s.emit("zero-smoke", f, None, None, rep)
}
