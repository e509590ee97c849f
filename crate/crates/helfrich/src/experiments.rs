//! Scripted pipelines: closed curves, critical domains, bound witnesses,
//! parameter sweeps and figure or table reproduction.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use helfrich_core::curve::SampledCurve;
use helfrich_core::delaunay::{self, analytic_energy, sigma_epsilon, DomainLabel, NodoidDomain};
use helfrich_core::elastica::{
    closure_defects, curvature_profile, el_residual_curve, find_closed_curve, reconstruct_curve, CurvatureProfile,
    CurveParams, FirstIntegrals, SearchBox,
};
use helfrich_core::energy::{
    el_boundary_residuals, evaluate_energy, lower_bound, Attainment, BoundClassification, EnergyParams, Topology,
};
use helfrich_core::flow::{initial_annulus, initial_disc, run_flow, verify_equilibrium, FlowConfig, FlowStatus, StepMode};
use helfrich_core::geometry::{gauss_bonnet_residual, integrate_surface, vertex_mean_curvature};
use helfrich_core::mesh::TriMesh;
use helfrich_core::numeric::bisect;
use helfrich_core::{meshgen, Vec3};

use crate::error::{CliError, Result, StageExt};
use crate::formats::{save_curve_csv, save_json, save_obj, save_profile_csv, save_trace_csv};
use crate::reports::{energy_json, BoundJson, Check, CurveReport, Defects, DomainReport, ParamsJson, Summary};

pub const REPRODUCIBLE: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "table"];

/// Radii of the sequences approaching an infimum.
pub const SEQUENCE_RADII: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

pub struct ClosedCurve {
    pub integrals: FirstIntegrals,
    pub profile: CurvatureProfile,
    pub curve: SampledCurve,
    pub report: CurveReport,
}

/// Searches the default box and reconstructs `q` periods with
/// `samples_per_period` samples each.
pub fn closed_curve(params: &CurveParams, q: u32, p: u32, samples_per_period: usize) -> Result<ClosedCurve> {
    let integrals = find_closed_curve(params, q, p, &SearchBox::default_for(params))?;
    let profile = curvature_profile(params, &integrals, samples_per_period)?;
    let curve = reconstruct_curve(&profile, q as usize)?;
    if !curve.closed {
        return Err(CliError::Check(format!(
            "reconstructed curve misses closure by {:e} (length {})",
            curve.endpoint_gap(),
            curve.length()
        )));
    }
    let defects = closure_defects(&profile);
    let report = CurveReport {
        mu: params.mu,
        lambda: params.lambda,
        p,
        q,
        d: integrals.d,
        e: integrals.e,
        period: profile.period,
        length: curve.length(),
        defects: Defects { dz: defects.delta_z, dtheta: defects.delta_theta },
        residual: el_residual_curve(&curve, params),
    };
    Ok(ClosedCurve { integrals, profile, curve, report })
}

pub fn domain_report(domain: &NodoidDomain, mesh: &TriMesh, params: &EnergyParams) -> Result<DomainReport> {
    Ok(DomainReport {
        label: domain.label.name().to_string(),
        h: domain.profile.h,
        flux: domain.profile.flux,
        boundary_radius: domain.boundary_radii().0,
        total_curvature_analytic: domain.total_curvature(),
        total_curvature_discrete: integrate_surface(mesh, params.c0)?.total_k,
        energy_analytic: analytic_energy(domain, params),
        energy_discrete: evaluate_energy(mesh, params)?.total,
    })
}

fn max_free_h(mesh: &TriMesh) -> Result<f64> {
    let h = vertex_mean_curvature(mesh)?;
    Ok((0..h.len()).filter(|&i| !mesh.fixed_mask[i]).map(|i| h[i].abs()).fold(0.0, f64::max))
}

fn boundary_of(mesh: &TriMesh) -> Vec<Vec<Vec3>> {
    (0..mesh.boundary_loops.len()).map(|l| mesh.loop_points(l)).collect()
}

fn semi_implicit(dt: f64, iters: usize, tol: f64, remesh_until: usize) -> FlowConfig {
    let mut c = FlowConfig::new(dt, iters, tol);
    c.step_mode = StepMode::SemiImplicit;
    c.remesh_interval = 1;
    c.remesh_until = remesh_until;
    c
}

fn flow_config_json(c: &FlowConfig) -> serde_json::Value {
    json!({
        "dt": c.time_step,
        "max_iters": c.max_iters,
        "tolerance": c.h_tolerance,
        "mode": format!("{:?}", c.step_mode),
        "remesh_interval": c.remesh_interval,
        "remesh_until": c.remesh_until,
    })
}

/// Flows `seed` to a minimal surface, saving mesh and trace under `stem`, and
/// records the convergence and equilibrium checks.
fn minimal_surface_leg(
    summary: &mut Summary,
    out: &Path,
    stem: &str,
    seed: &TriMesh,
    cfg: &FlowConfig,
    params: &EnergyParams,
) -> Result<TriMesh> {
    let before = boundary_of(seed);
    let flowed = run_flow(seed, cfg).stage(&format!("{stem} flow"))?;
    let mesh = flowed.mesh;
    let obj = out.join(format!("{stem}.obj"));
    save_obj(&mesh, &obj)?;
    let trace = out.join(format!("{stem}_trace.csv"));
    save_trace_csv(&flowed.trace, &trace)?;
    summary.artifacts.extend([obj, trace].iter().map(|p| p.display().to_string()));
    summary.push(Check::holds(format!("{stem} converged"), flowed.status == FlowStatus::Converged));
    summary.push(Check::holds(format!("{stem} boundary fixed"), boundary_of(&mesh) == before));
    summary.push(Check::reported(format!("{stem} iterations"), flowed.trace.steps.len() as f64));
    summary.push(Check::below(format!("{stem} max |H|"), max_free_h(&mesh)?, 1e-2));
    let eq = verify_equilibrium(&mesh, params).stage(&format!("{stem} residuals"))?;
    summary.push(Check::below(format!("{stem} el1"), eq.el1, 1e-2));
    summary.push(Check::below(format!("{stem} el2"), eq.boundary.r2, 1e-2));
    summary.push(Check::below(format!("{stem} el3"), eq.boundary.r3, 1e-2));
    summary.push(Check::below(format!("{stem} el4"), eq.boundary.r4, 1e-2));
    summary.push(Check::reported(format!("{stem} energy"), evaluate_energy(&mesh, params)?.total));
    Ok(mesh)
}

fn unit_params(a: f64, c0: f64, b: f64) -> EnergyParams {
    EnergyParams { a, c0, b, alpha: 1.0, beta: 1.0 }
}

/// Minimal discs over `G(q,1)` for `q = 3, 4, 5` at `α = β = 1`.
pub fn fig1(out: &Path) -> Result<Summary> {
    let curve_params = CurveParams::new(0.0, 1.0)?;
    let params = unit_params(1.0, 0.0, 0.0);
    let (samples, rings) = (64, 24);
    let cfg = semi_implicit(0.1, 3000, 1e-9, 300);
    let mut summary = Summary::new(
        "fig1",
        json!({
            "curves": {"mu": 0.0, "lambda": 1.0, "q": [3, 4, 5], "p": 1, "samples_per_period": samples},
            "seed": {"kind": "cone", "rings": rings},
            "flow": flow_config_json(&cfg),
            "params": ParamsJson::from(&params),
        }),
    );
    for q in [3u32, 4, 5] {
        let c = closed_curve(&curve_params, q, 1, samples).stage(&format!("G({q},1) search"))?;
        let csv = out.join(format!("curve_q{q}_p1.csv"));
        save_curve_csv(&c.curve, &csv)?;
        summary.artifacts.push(csv.display().to_string());
        summary.push(Check::below(format!("G({q},1) closure gap"), c.curve.endpoint_gap() / c.curve.length(), 1e-5));
        let seed = initial_disc(&c.curve, rings).stage(&format!("G({q},1) seed"))?;
        minimal_surface_leg(&mut summary, out, &format!("disc_q{q}"), &seed, &cfg, &params)?;
    }
    Ok(summary)
}

/// Minimal annuli between `G(q,p)` and its translate along the axis.
pub fn fig2(out: &Path) -> Result<Summary> {
    let curve_params = CurveParams::new(0.0, 1.0)?;
    let params = unit_params(1.0, 0.0, 0.0);
    let (samples, rings, half_gap) = (64, 12, 0.3);
    let knots = [(3u32, 1u32), (5, 1), (5, 2)];
    let cfg = semi_implicit(0.05, 4000, 1e-9, 300);
    let mut summary = Summary::new(
        "fig2",
        json!({
            "curves": {"mu": 0.0, "lambda": 1.0, "knots": knots, "samples_per_period": samples},
            "translate": [0.0, 0.0, 2.0 * half_gap],
            "seed": {"kind": "ruled", "rings": rings},
            "flow": flow_config_json(&cfg),
            "params": ParamsJson::from(&params),
        }),
    );
    let axes = [Vec3::X, Vec3::Y, Vec3::Z];
    for (q, p) in knots {
        let c = closed_curve(&curve_params, q, p, samples).stage(&format!("G({q},{p}) search"))?;
        let lower = c.curve.transformed(axes, 1.0, Vec3::new(0.0, 0.0, -half_gap));
        let upper = c.curve.transformed(axes, 1.0, Vec3::new(0.0, 0.0, half_gap));
        let seed = initial_annulus(&lower, &upper, rings).stage(&format!("G({q},{p}) seed"))?;
        minimal_surface_leg(&mut summary, out, &format!("annulus_q{q}_p{p}"), &seed, &cfg, &params)?;
    }
    Ok(summary)
}

/// Total curvature each critical domain should carry; `None` is only
/// reported.
pub fn expected_total_curvature(label: DomainLabel) -> Option<f64> {
    match label {
        DomainLabel::N1 | DomainLabel::N4 => Some(-4.0 * PI),
        DomainLabel::N2 => Some(4.0 * PI),
        DomainLabel::N3 => None,
    }
}

/// The four critical nodoidal domains for `a = c₀ = b = α = β = 1`.
pub fn fig3(out: &Path) -> Result<Summary> {
    let params = unit_params(1.0, 1.0, 1.0);
    let n = 512;
    let mut summary = Summary::new(
        "fig3",
        json!({"params": ParamsJson::from(&params), "mesh": {"profile": n, "theta": n}}),
    );
    let r0 = params.critical_radius()?;
    for label in DomainLabel::ALL {
        let name = label.name();
        let d = delaunay::domain(&params, label, n + 1).stage(&format!("{name} profile"))?;
        let mesh = d.mesh(n, n).stage(&format!("{name} mesh"))?;
        let (ra, rb) = d.boundary_radii();
        summary.push(Check::absolute(format!("{name} boundary radius start"), r0, ra, 1e-10));
        summary.push(Check::absolute(format!("{name} boundary radius end"), r0, rb, 1e-10));
        let report = domain_report(&d, &mesh, &params).stage(&format!("{name} energy"))?;
        match expected_total_curvature(label) {
            Some(k) => {
                summary.push(Check::absolute(format!("{name} total curvature"), k, report.total_curvature_analytic, 1e-9));
                summary.push(Check::absolute(
                    format!("{name} discrete total curvature"),
                    k,
                    report.total_curvature_discrete,
                    1e-3 * 4.0 * PI,
                ));
            }
            None => {
                summary.push(Check::reported(format!("{name} total curvature"), report.total_curvature_analytic));
                summary.push(Check::absolute(
                    format!("{name} discrete total curvature"),
                    report.total_curvature_analytic,
                    report.total_curvature_discrete,
                    1e-3 * 4.0 * PI,
                ));
            }
        }
        summary.push(Check::relative(format!("{name} energy"), report.energy_analytic, report.energy_discrete, 1e-2));
        summary.push(Check::below(format!("{name} Gauss-Bonnet"), gauss_bonnet_residual(&mesh), 1e-9));
        let obj = out.join(format!("{name}.obj"));
        let csv = out.join(format!("{name}_profile.csv"));
        let js = out.join(format!("{name}.json"));
        save_obj(&mesh, &obj)?;
        save_profile_csv(&d.profile, &csv)?;
        save_json(&report, &js)?;
        summary.artifacts.extend([obj, csv, js].iter().map(|p| p.display().to_string()));
    }
    Ok(summary)
}

/// Parameter `T` of the stable catenoid `r = c cosh(z/c)` through the circles
/// of radius `r` at `z = ±h`, with `c = r / cosh T` and `T = h/c`.
pub fn stable_catenoid_parameter(half_gap: f64, radius: f64) -> Option<f64> {
    let g = half_gap / radius;
    // T/cosh T rises on [0, T*] with T* tanh T* = 1
    let t_star = bisect(|t| t * t.tanh() - 1.0, 0.5, 2.0, 1e-15)?;
    bisect(|t| t / t.cosh() - g, 0.0, t_star, 1e-15)
}

/// Catenoid between the critical circles, built in closed form and by the
/// flow, plus any imported meshes.
pub fn fig4(out: &Path, imports: &[PathBuf]) -> Result<Summary> {
    let params = unit_params(1.0, 0.0, 0.0);
    let r0 = params.critical_radius()?;
    let half_gap = 0.5 * r0;
    let (n_theta, n_t) = (128, 64);
    let cfg = {
        let mut c = semi_implicit(0.05, 3000, 1e-8, 200);
        c.remesh_interval = 1;
        c
    };
    let mut summary = Summary::new(
        "fig4",
        json!({
            "params": ParamsJson::from(&params),
            "circles": {"radius": r0, "z": [-half_gap, half_gap]},
            "slice": {"n_theta": n_theta, "n_t": n_t},
            "flow": flow_config_json(&cfg),
            "imports": imports.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }),
    );
    let t = stable_catenoid_parameter(half_gap, r0)
        .ok_or_else(|| CliError::Check("no catenoid spans the circles".into()))
        .stage("catenoid parameter")?;
    let waist = r0 / t.cosh();
    summary.push(Check::reported("catenoid waist", waist));
    let slice = meshgen::catenoid_slice(t, r0, n_theta, n_t).stage("catenoid slice")?;
    let e = evaluate_energy(&slice, &params).stage("catenoid energy")?.total;
    let s = (params.alpha * params.beta).sqrt();
    summary.push(Check::relative("catenoid energy", 8.0 * PI * s, e, 1e-2));
    let r = el_boundary_residuals(&slice, &params).stage("catenoid residuals")?;
    summary.push(Check::below("catenoid el2", r.r2, 1e-2));
    summary.push(Check::below("catenoid el3", r.r3, 1e-2));
    summary.push(Check::below("catenoid el4", r.r4, 1e-2));
    let obj = out.join("catenoid.obj");
    save_obj(&slice, &obj)?;
    summary.artifacts.push(obj.display().to_string());

    let c = SampledCurve::circle(r0, 96);
    let axes = [Vec3::X, Vec3::Y, Vec3::Z];
    let seed = initial_annulus(
        &c.transformed(axes, 1.0, Vec3::new(0.0, 0.0, -half_gap)),
        &c.transformed(axes, 1.0, Vec3::new(0.0, 0.0, half_gap)),
        16,
    )
    .stage("catenoid seed")?;
    let flowed = minimal_surface_leg(&mut summary, out, "catenoid_flowed", &seed, &cfg, &params)?;
    let flowed_waist = flowed
        .vertices
        .iter()
        .filter(|v| v.z.abs() < 0.02 * r0)
        .map(|v| v.x.hypot(v.y))
        .fold(f64::INFINITY, f64::min);
    summary.push(Check::absolute("catenoid_flowed waist", waist, flowed_waist, 1e-2 * r0));

    for (i, path) in imports.iter().enumerate() {
        let stage = format!("import {}", path.display());
        let mesh = crate::formats::load_obj(path).stage(&stage)?;
        let report = energy_json(&mesh, &params).stage(&stage)?;
        summary.push(Check::reported(format!("import {i} energy"), report.total));
        for (name, v) in [("el2", report.residuals.el2), ("el3", report.residuals.el3), ("el4", report.residuals.el4)] {
            summary.push(Check::reported(format!("import {i} {name}"), v.unwrap_or(f64::NAN)));
        }
        let js = out.join(format!("import_{i}.json"));
        save_json(&report, &js)?;
        summary.artifacts.push(js.display().to_string());
    }
    Ok(summary)
}

/// How a witness realizes a bound.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessEval {
    pub name: String,
    pub attained: &'static str,
    /// One energy per witness surface, or per sequence member in
    /// [`SEQUENCE_RADII`] order.
    pub energies: Vec<f64>,
    pub bound: f64,
    /// Largest `|E - bound|` for minima, last member minus bound for
    /// sequences.
    pub gap: f64,
    pub monotone: Option<bool>,
    pub pass: bool,
}

/// Meshes realizing a bound, or the members of a sequence approaching it.
/// `None` when the classification names no witness.
pub fn witness_meshes(params: &EnergyParams, class: &BoundClassification) -> Result<Option<Vec<TriMesh>>> {
    let Some(name) = class.witness else { return Ok(None) };
    let r0 = params.critical_radius()?;
    let nodoid = |label: DomainLabel, n: usize| -> Result<TriMesh> { Ok(delaunay::domain(params, label, n + 1)?.mesh(n, n)?) };
    let seq = |f: &dyn Fn(f64) -> helfrich_core::Result<TriMesh>| -> Result<Vec<TriMesh>> {
        SEQUENCE_RADII.iter().map(|&r| f(r).map_err(CliError::from)).collect()
    };
    let meshes = match name {
        "N1 and N4" => vec![nodoid(DomainLabel::N1, 256)?, nodoid(DomainLabel::N4, 512)?],
        "N2" => vec![nodoid(DomainLabel::N2, 256)?],
        "multiple solutions" if params.c0 > 0.0 => vec![nodoid(DomainLabel::N2, 256)?],
        "multiple solutions" => vec![meshgen::catenoid_slice(0.5, r0, 128, 64)?],
        "spherical annulus" => vec![meshgen::sphere_zone(2.0 * r0, PI / 6.0, 5.0 * PI / 6.0, 96)?],
        "planar disc" => vec![meshgen::flat_disc(r0, 128, 16)?],
        "spherical cap" if params.c0 > 0.0 => {
            let radius = 1.0 / params.c0;
            vec![meshgen::sphere_zone(radius, 0.0, (r0 / radius).min(1.0).asin(), 96)?]
        }
        "spherical cap" => vec![meshgen::sphere_zone(2.0 * r0, 0.0, PI / 6.0, 96)?],
        "limit of catenoid domains" => seq(&|r| meshgen::catenoid_slice(r, r0, 128, (64.0 * r) as usize))?,
        "limit of spherical annuli" => {
            seq(&|r| meshgen::sphere_zone(r * r0, (1.0 / r).asin(), PI - (1.0 / r).asin(), 128))?
        }
        "limit of planar annuli" => seq(&|r| meshgen::planar_annulus(r0 * (1.0 - 1.0 / r), r0 * (1.0 + 1.0 / r), 256, 16))?,
        "limit of spherical caps" => seq(&|r| meshgen::sphere_zone(r * r0, (1.0 / r).asin(), PI, 128))?,
        other => return Err(CliError::Usage(format!("no witness construction for {other:?}"))),
    };
    Ok(Some(meshes))
}

/// Energies of the witnesses against the bound. Minima must match within 1%,
/// sequences must decrease and end within 2% of the infimum; both scaled by
/// `max(1, |bound|)`.
pub fn evaluate_witness(params: &EnergyParams, class: &BoundClassification) -> Result<Option<WitnessEval>> {
    let (Some(bound), Some(name)) = (class.bound, class.witness) else { return Ok(None) };
    let Some(meshes) = witness_meshes(params, class)? else { return Ok(None) };
    let energies = meshes.iter().map(|m| Ok(evaluate_energy(m, params)?.total)).collect::<Result<Vec<f64>>>()?;
    let scale = bound.abs().max(1.0);
    let sound = energies.iter().all(|&e| e >= bound - 1e-2);
    let (gap, monotone, pass) = if class.attained == Attainment::InfimumOnly {
        let gap = energies[energies.len() - 1] - bound;
        let mono = energies.windows(2).all(|w| w[1] < w[0]);
        (gap, Some(mono), mono && sound && gap <= 2e-2 * scale)
    } else {
        let gap = energies.iter().map(|e| (e - bound).abs()).fold(0.0, f64::max);
        (gap, None, gap <= 1e-2 * scale)
    };
    Ok(Some(WitnessEval { name: name.to_string(), attained: class.attained.label(), energies, bound, gap, monotone, pass }))
}

/// One row of the infima table.
pub struct TableRow {
    pub case: &'static str,
    pub c0: f64,
    pub b: f64,
    pub expected: f64,
}

/// The eight annulus cells at `α = β = a = 1`. Rows (vi) and (viii) need
/// `a + b < 0` and `0 < a + b < a`, so they use `b = -1.5` and `b = -0.5`.
pub fn table_rows() -> Vec<TableRow> {
    let a = 1.0;
    let row = |case, c0, b: f64, expected| TableRow { case, c0, b, expected };
    vec![
        row("(i)", 1.0, 1.0, 4.0 * PI * (2.0 - 1.0)),
        row("(ii)", 1.0, 0.0, 8.0 * PI),
        row("(iii)", 1.0, -1.0, 4.0 * PI * (2.0 - 1.0)),
        row("(iv)", 0.0, 1.0, 4.0 * PI * (2.0 - 1.0)),
        row("(v)", 0.0, 0.0, 8.0 * PI),
        row("(vi)", 0.0, -1.5, 4.0 * PI * (2.0 + (a - 1.5))),
        row("(vii)", 0.0, -1.0, 8.0 * PI),
        row("(viii)", 0.0, -0.5, 8.0 * PI),
    ]
}

pub fn table(out: &Path) -> Result<Summary> {
    let rows = table_rows();
    let mut summary = Summary::new(
        "table",
        json!({
            "alpha": 1.0, "beta": 1.0, "a": 1.0,
            "rows": rows.iter().map(|r| json!({"case": r.case, "c0": r.c0, "b": r.b, "expected": r.expected})).collect::<Vec<_>>(),
            "sequence_radii": SEQUENCE_RADII,
        }),
    );
    let mut records = Vec::new();
    for row in &rows {
        let stage = format!("row {}", row.case);
        let params = unit_params(1.0, row.c0, row.b);
        let class = lower_bound(&params, Topology::Annulus).stage(&stage)?;
        summary.push(Check::holds(format!("{} case label", row.case), class.case_label == row.case));
        summary.push(Check::relative(format!("{} bound", row.case), row.expected, class.bound.unwrap_or(f64::NAN), 1e-12));
        let w = evaluate_witness(&params, &class)
            .stage(&stage)?
            .ok_or_else(|| CliError::Check(format!("row {} has no witness", row.case)))
            .stage(&stage)?;
        let last = *w.energies.last().unwrap_or(&f64::NAN);
        if let Some(mono) = w.monotone {
            summary.push(Check::holds(format!("{} monotone approach", row.case), mono));
            summary.push(Check::holds(
                format!("{} sequence above bound", row.case),
                w.energies.iter().all(|&e| e >= row.expected - 1e-2),
            ));
            summary.push(Check::relative(format!("{} {} at R=16", row.case, w.name), row.expected, last, 1e-2));
        } else {
            for (i, &e) in w.energies.iter().enumerate() {
                let label = if w.energies.len() > 1 { ["N1", "N4"][i.min(1)].to_string() } else { w.name.clone() };
                summary.push(Check::relative(format!("{} {}", row.case, label), row.expected, e, 1e-2));
            }
        }
        records.push(json!({
            "case": row.case,
            "params": ParamsJson::from(&params),
            "classification": BoundJson::from(&class),
            "witness": w,
        }));
    }
    let js = out.join("table.json");
    save_json(&records, &js)?;
    summary.artifacts.push(js.display().to_string());
    Ok(summary)
}

/// Runs a reproduction recipe, writing its artifacts and `summary.json`
/// under `out/<id>`.
pub fn reproduce(id: &str, out: &Path, imports: &[PathBuf]) -> Result<Summary> {
    let dir = out.join(id);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let summary = match id {
        "fig1" => fig1(&dir)?,
        "fig2" => fig2(&dir)?,
        "fig3" => fig3(&dir)?,
        "fig4" => fig4(&dir, imports)?,
        "table" => table(&dir)?,
        other => {
            return Err(CliError::Usage(format!("unknown reproduction {other:?}; expected one of {}", REPRODUCIBLE.join(", "))))
        }
    };
    save_json(&summary, &dir.join("summary.json"))?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteInstability {
    pub analytic: f64,
    /// Second difference of the closed-form energies.
    pub finite_difference: f64,
    pub step: f64,
    /// Discrete energies of `Σ_ε` at `ε = 0, h, 2h`.
    pub mesh_energies: [f64; 3],
    pub mesh_finite_difference: f64,
    pub mesh_resolution: usize,
}

impl DiscreteInstability {
    pub fn analytic_error(&self) -> f64 {
        (self.finite_difference - self.analytic).abs() / self.analytic.abs()
    }

    pub fn mesh_error(&self) -> f64 {
        (self.mesh_finite_difference - self.analytic).abs() / self.analytic.abs()
    }
}

/// Second variation of the energy along `Σ_ε` at the critical domain, from
/// closed-form energies with step `h_analytic` and from `n × n` meshes with
/// step `h_mesh`.
pub fn discrete_instability(params: &EnergyParams, h_analytic: f64, h_mesh: f64, n: usize) -> Result<DiscreteInstability> {
    let est = delaunay::instability_second_derivative(params, h_analytic)?;
    let energy = |eps: f64| -> Result<f64> {
        let mesh = sigma_epsilon(params, eps)?.mesh(n, n)?;
        Ok(evaluate_energy(&mesh, params)?.total)
    };
    let e = [energy(0.0)?, energy(h_mesh)?, energy(2.0 * h_mesh)?];
    Ok(DiscreteInstability {
        analytic: est.analytic,
        finite_difference: est.finite_difference,
        step: h_mesh,
        mesh_energies: e,
        mesh_finite_difference: (e[2] - 2.0 * e[1] + e[0]) / (h_mesh * h_mesh),
        mesh_resolution: n,
    })
}

/// Grids for a bounds sweep. Missing grids default to a single value.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "one")]
    pub a: Vec<f64>,
    #[serde(default = "zero")]
    pub c0: Vec<f64>,
    #[serde(default = "zero")]
    pub b: Vec<f64>,
    #[serde(default = "one")]
    pub alpha: Vec<f64>,
    #[serde(default = "one")]
    pub beta: Vec<f64>,
    #[serde(default = "both")]
    pub topology: Vec<String>,
    /// Evaluate the named witness of every bounded cell.
    #[serde(default)]
    pub witness: bool,
    /// `native` (default) or `common`, the convention of the `c0` grid.
    #[serde(default)]
    pub c0_convention: Option<String>,
}

fn one() -> Vec<f64> {
    vec![1.0]
}

fn zero() -> Vec<f64> {
    vec![0.0]
}

fn both() -> Vec<String> {
    vec!["disc".into(), "annulus".into()]
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub params: ParamsJson,
    pub topology: String,
    pub classification: Option<BoundJson>,
    pub error: Option<String>,
    pub witness: Option<WitnessEval>,
}

pub fn parse_topology(name: &str) -> Result<Topology> {
    match name {
        "disc" => Ok(Topology::Disc),
        "annulus" => Ok(Topology::Annulus),
        other => Err(CliError::Usage(format!("unknown topology {other:?}; expected disc or annulus"))),
    }
}

/// Converts `c₀` to the convention used internally.
pub fn c0_from_convention(c0: f64, convention: &str) -> Result<f64> {
    match convention {
        "native" => Ok(c0),
        // the common spontaneous curvature is minus twice ours
        "common" => Ok(-0.5 * c0),
        other => Err(CliError::Usage(format!("unknown c0 convention {other:?}; expected native or common"))),
    }
}

/// Classifies every cell of the grid. Cells that fail validation are kept
/// with their error; witness failures abort the sweep.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let convention = config.c0_convention.as_deref().unwrap_or("native");
    let topologies = config.topology.iter().map(|t| parse_topology(t)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &a in &config.a {
        for &c0 in &config.c0 {
            let c0 = c0_from_convention(c0, convention)?;
            for &b in &config.b {
                for &alpha in &config.alpha {
                    for &beta in &config.beta {
                        for &t in &topologies {
                            rows.push(sweep_cell([a, c0, b, alpha, beta], t, config.witness)?);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn sweep_cell([a, c0, b, alpha, beta]: [f64; 5], t: Topology, witness: bool) -> Result<SweepRow> {
    let raw = ParamsJson { a, c0, b, alpha, beta };
    let failed = |e: helfrich_core::Error| SweepRow {
        params: raw,
        topology: t.name().into(),
        classification: None,
        error: Some(e.to_string()),
        witness: None,
    };
    let params = match EnergyParams::new(a, c0, b, alpha, beta) {
        Ok(p) => p,
        Err(e) => return Ok(failed(e)),
    };
    let class = match lower_bound(&params, t) {
        Ok(c) => c,
        Err(e) => return Ok(failed(e)),
    };
    let w = if witness { evaluate_witness(&params, &class).stage(&format!("witness for {raw:?} {}", t.name()))? } else { None };
    Ok(SweepRow {
        params: raw,
        topology: t.name().into(),
        classification: Some(BoundJson::from(&class)),
        error: None,
        witness: w,
    })
}

/// Meshes with boundary used to exercise the estimators and the bounds.
pub fn mesh_suite() -> Result<Vec<(String, TriMesh)>> {
    let crit = unit_params(1.0, 1.0, 1.0);
    let mut out = vec![
        ("flat disc".to_string(), meshgen::flat_disc(1.0, 64, 12)?),
        ("flat disc r2".into(), meshgen::flat_disc(2.0, 64, 12)?),
        ("hemisphere".into(), meshgen::hemisphere(1.0, 48)?),
        ("spherical cap".into(), meshgen::sphere_zone(2.0, 0.0, PI / 6.0, 48)?),
        ("sphere minus cap".into(), meshgen::sphere_zone(2.0, PI / 6.0, PI, 96)?),
        ("spherical annulus".into(), meshgen::sphere_zone(2.0, PI / 6.0, 5.0 * PI / 6.0, 96)?),
        ("catenoid".into(), meshgen::catenoid_slice(0.5, 1.0, 128, 64)?),
        ("long catenoid".into(), meshgen::catenoid_slice(2.0, 1.0, 128, 128)?),
        ("cylinder".into(), meshgen::cylinder(1.0, 2.0, 64, 32)?),
        ("planar annulus".into(), meshgen::planar_annulus(0.5, 1.5, 64, 16)?),
        ("icosphere minus face".into(), meshgen::icosphere_minus_face(1.0, 3)?),
    ];
    for label in DomainLabel::ALL {
        out.push((label.name().into(), delaunay::domain(&crit, label, 129)?.mesh(128, 128)?));
    }
    out.push(("sigma 0.25".into(), sigma_epsilon(&crit, 0.25)?.mesh(128, 128)?));
    Ok(out)
}
