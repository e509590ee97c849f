//! Command line definitions and handlers.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use helfrich_core::delaunay::{profile_from_flux, revolve_profile, UPath, DEFAULT_PROFILE_SAMPLES};
use helfrich_core::elastica::CurveParams;
use helfrich_core::energy::{lower_bound, EnergyParams, Topology};
use helfrich_core::flow::{
    initial_annulus, initial_disc, run_flow_with, stability_bound, verify_equilibrium, FlowConfig, FlowStatus,
    StepMode,
};
use helfrich_core::geometry::curvature_field;
use helfrich_core::mesh::TriMesh;

use crate::error::{CliError, Result, StageExt};
use crate::experiments::{self, c0_from_convention, SweepConfig};
use crate::formats::{
    load_closed_curve, load_obj, save_curve_csv, save_json, save_obj, save_polyline_obj, save_profile_csv,
    save_trace_csv, save_vertex_csv,
};
use crate::reports::{energy_json, BoundJson};

/// Overrides the output directory of every command.
pub const OUT_DIR_ENV: &str = "HELFRICH_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "helfrich", version, about = "Equilibria of the Euler-Helfrich energy with elastic boundary")]
pub struct Cli {
    /// JSON object of flag values, keyed by long flag name. Its entries
    /// replace the same flags given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a closed critical curve winding as a (q,p) torus knot.
    FindCurve(FindCurveArgs),
    /// Sample and revolve a Delaunay profile.
    GenDelaunay(GenDelaunayArgs),
    /// The four critical nodoidal domains with their energies.
    Domains(DomainsArgs),
    /// Energy terms and residuals of an OBJ mesh.
    Energy(EnergyCmdArgs),
    /// Lower bound of the energy over discs or annuli, or a sweep of cells.
    Bounds(BoundsArgs),
    /// Mean curvature flow with fixed boundary.
    Flow(FlowArgs),
    /// Second variation along the deformed nodoidal family.
    Instability(InstabilityArgs),
    /// Rerun a figure or table pipeline and compare against its expected values.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Spontaneous curvature as used here: the sphere of radius 1/c0 has H + c0 = 0.
    Native,
    /// The usual membrane convention, minus twice the value used here.
    Common,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Convention of --c0.
    #[arg(long, value_enum, default_value_t = Convention::Native)]
    pub c0_convention: Convention,
}

impl EnergyArgs {
    pub fn params(&self) -> Result<EnergyParams> {
        let convention = match self.c0_convention {
            Convention::Native => "native",
            Convention::Common => "common",
        };
        let c0 = c0_from_convention(self.c0, convention)?;
        Ok(EnergyParams::new(self.a, c0, self.b, self.alpha, self.beta)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory; the HELFRICH_OUT_DIR environment variable takes precedence.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl OutArgs {
    pub fn dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.out.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FindCurveArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Turns about the axis.
    #[arg(long)]
    pub p: u32,
    /// Periods of the curvature.
    #[arg(long)]
    pub q: u32,
    /// Samples per curvature period.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Also write the curve as a polyline OBJ.
    #[arg(long)]
    pub obj: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenDelaunayArgs {
    /// Mean curvature H.
    #[arg(long, allow_hyphen_values = true)]
    pub h: f64,
    /// Flux parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub flux: f64,
    /// Start of the Gauss map angle path.
    #[arg(long, allow_hyphen_values = true, default_value_t = -std::f64::consts::FRAC_PI_2)]
    pub psi_start: f64,
    /// End of the Gauss map angle path.
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub psi_end: f64,
    #[arg(long, default_value_t = DEFAULT_PROFILE_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 128)]
    pub n_theta: usize,
    /// File name stem of the outputs.
    #[arg(long, default_value = "delaunay")]
    pub name: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DomainsArgs {
    #[command(flatten)]
    pub energy: EnergyArgs,
    /// Profile steps and angular steps of each mesh.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Also write per-vertex curvature CSVs.
    #[arg(long)]
    pub vertex_csv: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyCmdArgs {
    /// Mesh to evaluate.
    #[arg(long)]
    pub mesh: PathBuf,
    #[command(flatten)]
    pub energy: EnergyArgs,
    /// Write `vertex_index,H,K_defect` here.
    #[arg(long)]
    pub vertex_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    Disc,
    Annulus,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Disc => Topology::Disc,
            TopologyArg::Annulus => Topology::Annulus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value_t = TopologyArg::Annulus)]
    pub topology: TopologyArg,
    #[command(flatten)]
    pub energy: EnergyArgs,
    /// Evaluate the energy of the witness surface or sequence.
    #[arg(long)]
    pub witness: bool,
    /// Sweep config (JSON grids); replaces the single cell.
    #[arg(long, value_name = "FILE")]
    pub sweep: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Explicit,
    SemiImplicit,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    /// Boundary curve CSV; one gives a disc, two an annulus.
    #[arg(long, num_args = 1)]
    pub curve: Vec<PathBuf>,
    /// Seed mesh instead of boundary curves.
    #[arg(long, conflicts_with = "curve")]
    pub mesh: Option<PathBuf>,
    /// Rings of the seed built from curves.
    #[arg(long, default_value_t = 16)]
    pub rings: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::SemiImplicit)]
    pub mode: ModeArg,
    /// Time step; defaults to 0.05, or half the stability bound in explicit mode.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 3000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Target mean curvature, at most zero.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub target_h: f64,
    /// Remesh every this many steps; 0 disables.
    #[arg(long, default_value_t = 0)]
    pub remesh_interval: usize,
    /// No remeshing from this iteration on.
    #[arg(long)]
    pub remesh_until: Option<usize>,
    /// Save an OBJ every this many steps; 0 disables.
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
    /// Parameters for the final energy and residual report.
    #[command(flatten)]
    pub energy: EnergyArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InstabilityArgs {
    #[command(flatten)]
    pub energy: EnergyArgs,
    /// Step of the closed-form second difference.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    /// Step of the mesh second difference, in units of the critical radius.
    #[arg(long, default_value_t = 0.05)]
    pub mesh_step: f64,
    /// Mesh resolution; 0 skips the mesh estimate.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(experiments::REPRODUCIBLE))]
    pub id: String,
    /// Extra OBJ meshes to evaluate (fig4).
    #[arg(long = "import")]
    pub imports: Vec<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Replaces flags in `args` by the entries of the JSON object at the path
/// given with `--spec`. Booleans toggle switches, arrays repeat the flag.
pub fn merge_spec(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut spec = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--spec") => spec = Some(PathBuf::from(it.next().ok_or_else(|| CliError::Usage("--spec needs a file".into()))?)),
            Some(s) if s.starts_with("--spec=") => spec = Some(PathBuf::from(&s[7..])),
            _ => rest.push(a),
        }
    }
    let Some(path) = spec else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::format(&path, e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(CliError::format(&path, "spec must be a JSON object"));
    };
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let takes_value = !value.is_boolean();
        // drop the flag wherever it already appears
        let mut kept = Vec::with_capacity(rest.len());
        let mut it = rest.into_iter();
        while let Some(a) = it.next() {
            match a.to_str() {
                Some(s) if s == flag => {
                    if takes_value {
                        it.next();
                    }
                }
                Some(s) if s.starts_with(&format!("{flag}=")) => {}
                _ => kept.push(a),
            }
        }
        rest = kept;
        let scalar = |v: &Value| -> Result<String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(CliError::format(&path, format!("{key}: expected a string or number"))),
            }
        };
        match &value {
            Value::Bool(true) => rest.push(flag.into()),
            Value::Bool(false) => {}
            Value::Array(items) => {
                for v in items {
                    rest.push(format!("{flag}={}", scalar(v)?).into());
                }
            }
            v => rest.push(format!("{flag}={}", scalar(v)?).into()),
        }
    }
    Ok(rest)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Check(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// Runs a parsed command. Numerical misses come back as [`CliError::Check`].
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::FindCurve(a) => find_curve(&a),
        Command::GenDelaunay(a) => gen_delaunay(&a),
        Command::Domains(a) => domains(&a),
        Command::Energy(a) => energy(&a),
        Command::Bounds(a) => bounds(&a),
        Command::Flow(a) => flow(&a),
        Command::Instability(a) => instability(&a),
        Command::Reproduce(a) => reproduce(&a),
    }
}

fn find_curve(a: &FindCurveArgs) -> Result<()> {
    let params = CurveParams::new(a.mu, a.lambda)?;
    if a.q <= 2 * a.p {
        eprintln!(
            "warning: q = {} <= 2p = {}; closed curves are expected only for q > 2p, searching anyway",
            a.q,
            2 * a.p
        );
    }
    let c = experiments::closed_curve(&params, a.q, a.p, a.samples)?;
    let dir = a.out.dir();
    let stem = format!("curve_q{}_p{}", a.q, a.p);
    let mut files = vec![dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json"))];
    save_curve_csv(&c.curve, &files[0])?;
    save_json(&c.report, &files[1])?;
    if a.obj {
        files.push(dir.join(format!("{stem}.obj")));
        save_polyline_obj(&c.curve, &files[2])?;
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn gen_delaunay(a: &GenDelaunayArgs) -> Result<()> {
    let profile = profile_from_flux(a.h, a.flux, UPath::new(a.psi_start, a.psi_end), a.samples)?;
    let mesh = revolve_profile(&profile, a.n_theta)?;
    let dir = a.out.dir();
    let csv = dir.join(format!("{}_profile.csv", a.name));
    let obj = dir.join(format!("{}.obj", a.name));
    save_profile_csv(&profile, &csv)?;
    save_obj(&mesh, &obj)?;
    print_json(&json!({
        "H": profile.h,
        "flux": profile.flux,
        "kind": format!("{:?}", profile.kind),
        "samples": profile.samples.len(),
        "flux_residual": profile.flux_residual(),
        "files": [csv.display().to_string(), obj.display().to_string()],
    }))
}

fn domains(a: &DomainsArgs) -> Result<()> {
    let params = a.energy.params()?;
    let dir = a.out.dir();
    let n = a.resolution;
    let mut reports = Vec::new();
    for label in helfrich_core::delaunay::DomainLabel::ALL {
        let name = label.name();
        let d = helfrich_core::delaunay::domain(&params, label, n + 1).stage(name)?;
        let mesh = d.mesh(n, n).stage(name)?;
        let report = experiments::domain_report(&d, &mesh, &params).stage(name)?;
        save_obj(&mesh, &dir.join(format!("{name}.obj")))?;
        save_profile_csv(&d.profile, &dir.join(format!("{name}_profile.csv")))?;
        save_json(&report, &dir.join(format!("{name}.json")))?;
        if a.vertex_csv {
            save_vertex_csv(&curvature_field(&mesh)?, &dir.join(format!("{name}_vertices.csv")))?;
        }
        reports.push(report);
    }
    print_json(&reports)
}

fn energy(a: &EnergyCmdArgs) -> Result<()> {
    let params = a.energy.params()?;
    let mesh = load_obj(&a.mesh)?;
    let report = energy_json(&mesh, &params)?;
    if let Some(path) = &a.vertex_csv {
        save_vertex_csv(&curvature_field(&mesh)?, path)?;
    }
    print_json(&report)
}

#[derive(Serialize)]
struct BoundsOutput {
    bound: Option<f64>,
    case: &'static str,
    attained: &'static str,
    witness: Option<&'static str>,
    topology: &'static str,
    e_underline: f64,
    bounded_below: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_energy: Option<experiments::WitnessEval>,
}

fn bounds(a: &BoundsArgs) -> Result<()> {
    if let Some(path) = &a.sweep {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: SweepConfig = serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))?;
        cfg.witness |= a.witness;
        let rows = experiments::sweep(&cfg)?;
        print_json(&rows)?;
        let failed = rows.iter().filter(|r| r.witness.as_ref().is_some_and(|w| !w.pass)).count();
        if failed > 0 {
            return Err(CliError::Check(format!("{failed} witnesses missed their bound")));
        }
        return Ok(());
    }
    let params = a.energy.params()?;
    let class = lower_bound(&params, a.topology.into())?;
    let b = BoundJson::from(&class);
    let w = if a.witness { experiments::evaluate_witness(&params, &class)? } else { None };
    let pass = w.as_ref().map_or(true, |w| w.pass);
    print_json(&BoundsOutput {
        bound: b.bound,
        case: b.case,
        attained: b.attained,
        witness: b.witness,
        topology: b.topology,
        e_underline: b.e_underline,
        bounded_below: b.bounded_below,
        witness_energy: w,
    })?;
    if !pass {
        return Err(CliError::Check("witness energy misses the bound".into()));
    }
    Ok(())
}

fn seed_mesh(a: &FlowArgs) -> Result<TriMesh> {
    if let Some(path) = &a.mesh {
        return load_obj(path);
    }
    let curves = a.curve.iter().map(|p| load_closed_curve(p)).collect::<Result<Vec<_>>>()?;
    match curves.as_slice() {
        [c] => Ok(initial_disc(c, a.rings)?),
        [c, d] => Ok(initial_annulus(c, d, a.rings)?),
        _ => Err(CliError::Usage("flow needs --mesh, or one or two --curve files".into())),
    }
}

fn flow(a: &FlowArgs) -> Result<()> {
    let params = a.energy.params()?;
    let seed = seed_mesh(a).stage("seed")?;
    let mode = match a.mode {
        ModeArg::Explicit => StepMode::Explicit,
        ModeArg::SemiImplicit => StepMode::SemiImplicit,
    };
    let dt = a.dt.unwrap_or(match mode {
        StepMode::Explicit => 0.5 * stability_bound(&seed),
        StepMode::SemiImplicit => 0.05,
    });
    let mut cfg = FlowConfig::new(dt, a.iters, a.tol);
    cfg.step_mode = mode;
    cfg.target_h = a.target_h;
    cfg.remesh_interval = a.remesh_interval;
    if let Some(u) = a.remesh_until {
        cfg.remesh_until = u;
    }
    let dir = a.out.dir();
    let snapshots = dir.join("snapshots");
    let mut snapshot_error = None;
    let out = run_flow_with(&seed, &cfg, |it, mesh| {
        if a.snapshot_every > 0 && (it + 1) % a.snapshot_every == 0 && snapshot_error.is_none() {
            if let Err(e) = save_obj(mesh, &snapshots.join(format!("step_{:06}.obj", it + 1))) {
                snapshot_error = Some(e);
            }
        }
    })
    .stage("flow")?;
    if let Some(e) = snapshot_error {
        return Err(e);
    }
    save_obj(&seed, &dir.join("seed.obj"))?;
    save_obj(&out.mesh, &dir.join("final.obj"))?;
    save_trace_csv(&out.trace, &dir.join("trace.csv"))?;
    let status = match out.status {
        FlowStatus::Converged => "converged".to_string(),
        FlowStatus::MaxIterations => "max_iterations".to_string(),
        FlowStatus::Diverged { iteration } => format!("diverged at {iteration}"),
    };
    let energy = energy_json(&out.mesh, &params).ok();
    let eq = verify_equilibrium(&out.mesh, &params).ok();
    let report = json!({
        "status": status,
        "iterations": out.trace.steps.len(),
        "dt": dt,
        "final_max_h": out.trace.steps.last().map(|s| s.max_h_deviation),
        "energy": energy,
        "equilibrium": eq.map(|r| json!({"el1": r.el1, "el2": r.boundary.r2, "el3": r.boundary.r3, "el4": r.boundary.r4})),
    });
    save_json(&report, &dir.join("flow.json"))?;
    print_json(&report)?;
    match out.status {
        FlowStatus::Converged => Ok(()),
        FlowStatus::Diverged { iteration } => Err(helfrich_core::Error::Diverged(iteration).into()),
        FlowStatus::MaxIterations => Err(CliError::Check(format!("flow did not reach tolerance {:e} in {} steps", a.tol, a.iters))),
    }
}

fn instability(a: &InstabilityArgs) -> Result<()> {
    let params = a.energy.params()?;
    let r0 = params.critical_radius()?;
    let mut ok = true;
    let report = if a.resolution > 0 {
        let d = experiments::discrete_instability(&params, a.step, a.mesh_step * r0, a.resolution)?;
        ok &= d.analytic_error() < 1e-4 && d.mesh_error() < 2e-2;
        json!({
            "analytic": d.analytic,
            "finite_difference": d.finite_difference,
            "relative_error": d.analytic_error(),
            "mesh": {
                "step": d.step,
                "resolution": d.mesh_resolution,
                "energies": d.mesh_energies,
                "finite_difference": d.mesh_finite_difference,
                "relative_error": d.mesh_error(),
            },
        })
    } else {
        let est = helfrich_core::delaunay::instability_second_derivative(&params, a.step)?;
        let err = (est.finite_difference - est.analytic).abs() / est.analytic.abs();
        ok &= err < 1e-4;
        json!({"analytic": est.analytic, "finite_difference": est.finite_difference, "relative_error": err})
    };
    print_json(&report)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Check("second difference misses the closed form".into()))
    }
}

fn reproduce(a: &ReproduceArgs) -> Result<()> {
    let dir = a.out.dir();
    let summary = experiments::reproduce(&a.id, &dir, &a.imports).stage(&a.id)?;
    println!("{}", Path::new(&dir).join(&a.id).join("summary.json").display());
    for c in summary.failures() {
        eprintln!(
            "FAIL {}: computed {:e}, expected {:?}, tolerance {:?}",
            c.name, c.computed, c.expected, c.tolerance
        );
    }
    if summary.pass {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} checks failed in {}", summary.failures().count(), a.id)))
    }
}
