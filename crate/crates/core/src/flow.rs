//! Fixed boundary mean curvature flow.
//!
//! Free vertices move along the vertex normal with speed `H - H₀`. The
//! tangential part of the cotangent Laplacian is dropped: on coarse seeds it
//! slides vertices into degenerate triangles while still lowering the area.
//! Mesh quality is instead kept by optional tangential smoothing, so a
//! converged state satisfies `H = H₀` and, with smoothing on, sits at the
//! smoothing fixed point. Neither condition depends on the step size.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::SampledCurve;
use crate::energy::{el_residuals_with, evaluate_energy, ElResiduals, EnergyParams};
use crate::error::{Error, Result};
use crate::geometry::{cotan_terms, curvature_field, CotanTerms};
use crate::mesh::TriMesh;
use crate::meshgen::{cone_disc, ruled_annulus};
use crate::vec3::Vec3;

/// Steps of monotone displacement growth taken as divergence.
pub const DIVERGENCE_WINDOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    #[default]
    Explicit,
    /// Linearly implicit in the cotangent Laplacian, solved by conjugate
    /// gradients. Stable for any step.
    SemiImplicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub time_step: f64,
    pub max_iters: usize,
    /// Stop once `max |H - H₀|` over free vertices falls below this.
    pub h_tolerance: f64,
    pub target_h: f64,
    /// Delaunay edge flips and tangential smoothing every this many steps;
    /// 0 turns both off.
    pub remesh_interval: usize,
    /// No remeshing from this iteration on, so the flow can settle on a fixed
    /// connectivity.
    pub remesh_until: usize,
    pub step_mode: StepMode,
    /// Energy logged every `energy_interval` steps when set.
    pub energy: Option<EnergyParams>,
    pub energy_interval: usize,
}

impl FlowConfig {
    pub fn new(time_step: f64, max_iters: usize, h_tolerance: f64) -> Self {
        FlowConfig {
            time_step,
            max_iters,
            h_tolerance,
            target_h: 0.0,
            remesh_interval: 0,
            remesh_until: usize::MAX,
            step_mode: StepMode::Explicit,
            energy: None,
            energy_interval: 0,
        }
    }

    /// Explicit config at half the step bound for `mesh`. Steps right at
    /// the bound can let a high-frequency mode grow on graded meshes.
    pub fn explicit_for(mesh: &TriMesh, max_iters: usize, h_tolerance: f64) -> Self {
        FlowConfig::new(0.5 * stability_bound(mesh), max_iters, h_tolerance)
    }

    fn check(&self, mesh: &TriMesh) -> Result<()> {
        if !(self.time_step > 0.0) || !self.time_step.is_finite() {
            return Err(Error::params("time step must be positive"));
        }
        if !(self.target_h <= 0.0) {
            return Err(Error::params("target mean curvature must be <= 0"));
        }
        if !(self.h_tolerance >= 0.0) {
            return Err(Error::params("tolerance must be nonnegative"));
        }
        if self.step_mode == StepMode::Explicit {
            let bound = stability_bound(mesh);
            if self.time_step > bound {
                return Err(Error::UnstableStep { dt: self.time_step, bound });
            }
        }
        Ok(())
    }
}

/// Largest explicit step, `0.4·(min edge)²`.
pub fn stability_bound(mesh: &TriMesh) -> f64 {
    let h = mesh.min_edge_length();
    0.4 * h * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStep {
    pub iteration: usize,
    /// Largest `|H - H₀|` over free vertices before the step.
    pub max_h_deviation: f64,
    pub max_displacement: f64,
    pub area: f64,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowTrace {
    pub steps: Vec<FlowStep>,
}

impl FlowTrace {
    /// Whether the area never grows past relative round-off after the first
    /// `skip` fraction of steps.
    pub fn area_non_increasing_after(&self, skip: f64) -> bool {
        let start = (skip * self.steps.len() as f64).ceil() as usize;
        self.steps[start.min(self.steps.len())..]
            .windows(2)
            .all(|w| w[1].area <= w[0].area * (1.0 + 1e-12))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    Converged,
    MaxIterations,
    /// Non-finite positions or displacement growth over
    /// [`DIVERGENCE_WINDOW`] consecutive steps. The mesh is the last state
    /// reached.
    Diverged { iteration: usize },
}

#[derive(Debug, Clone)]
pub struct FlowOutput {
    pub mesh: TriMesh,
    pub trace: FlowTrace,
    pub status: FlowStatus,
}

impl FlowOutput {
    /// The output, or [`Error::Diverged`] if the flow blew up.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            FlowStatus::Diverged { iteration } => Err(Error::Diverged(iteration)),
            _ => Ok(self),
        }
    }
}

/// Disc coned from the curve samples to their centroid.
///
/// Self-intersecting or strongly non-star-shaped curves give folded seeds;
/// this is not detected.
pub fn initial_disc(curve: &SampledCurve, rings: usize) -> Result<TriMesh> {
    if !curve.closed {
        return Err(Error::OpenCurve);
    }
    cone_disc(&curve.points[..curve.distinct_len()], curve.centroid(), rings)
}

/// Ruled annulus between index-aligned samples. Intersecting curves are not
/// detected.
pub fn initial_annulus(a: &SampledCurve, b: &SampledCurve, rings: usize) -> Result<TriMesh> {
    if !a.closed || !b.closed {
        return Err(Error::OpenCurve);
    }
    ruled_annulus(&a.points[..a.distinct_len()], &b.points[..b.distinct_len()], rings)
}

struct Velocity {
    v: Vec<Vec3>,
    max_h_dev: f64,
}

fn velocity(mesh: &TriMesh, terms: &CotanTerms, target: f64) -> Result<Velocity> {
    let mut out = Velocity { v: vec![Vec3::ZERO; mesh.vertices.len()], max_h_dev: 0.0 };
    for i in 0..mesh.vertices.len() {
        if mesh.fixed_mask[i] || terms.normal_sum[i] == Vec3::ZERO {
            continue;
        }
        if !(terms.area[i] > 0.0) {
            return Err(Error::ZeroAreaStar(i));
        }
        let nu = terms.normal_sum[i].normalized();
        let dev = 0.25 * terms.lap[i].dot(nu) / terms.area[i] - target;
        out.max_h_dev = out.max_h_dev.max(dev.abs());
        out.v[i] = nu * dev;
    }
    Ok(out)
}

/// Connectivity and quality pass used between flow steps: drops interior
/// valence-three vertices, applies Delaunay flips, then smooths tangentially.
pub fn remesh(mesh: &mut TriMesh) {
    mesh.remove_valence_three();
    mesh.delaunay_flips(4);
    let terms = cotan_terms(mesh);
    smooth_tangentially(mesh, &terms);
}

/// Moves free vertices toward the area-weighted centroid of their faces,
/// within the tangent plane.
fn smooth_tangentially(mesh: &mut TriMesh, terms: &CotanTerms) {
    let nv = mesh.vertices.len();
    let mut acc = vec![Vec3::ZERO; nv];
    let mut weight = vec![0.0; nv];
    for (f, t) in mesh.faces.iter().enumerate() {
        let a = mesh.face_area(f);
        let c = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
        for &v in t {
            acc[v] += c * a;
            weight[v] += a;
        }
    }
    for i in 0..nv {
        if mesh.fixed_mask[i] || !(weight[i] > 0.0) {
            continue;
        }
        let nu = terms.normal_sum[i].normalized();
        let d = acc[i] / weight[i] - mesh.vertices[i];
        mesh.vertices[i] += d - nu * d.dot(nu);
    }
}

/// Symmetric sparse matrix on the free vertices.
struct System {
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl System {
    /// Merges duplicate entries of unsorted rows.
    fn new(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, a) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += a,
                    _ => merged.push((c, a)),
                }
            }
            *row = merged;
        }
        let diag = rows.iter().enumerate().map(|(k, r)| r.iter().find(|e| e.0 == k).map_or(1.0, |e| e.1)).collect();
        System { rows, diag }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            y[r] = row.iter().map(|&(c, a)| a * x[c]).sum();
        }
    }

    /// Jacobi preconditioned conjugate gradients from the initial guess in `x`.
    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        let mut ax = vec![0.0; n];
        self.apply(x, &mut ax);
        let mut r: Vec<f64> = (0..n).map(|i| b[i] - ax[i]).collect();
        let mut z: Vec<f64> = (0..n).map(|i| r[i] / self.diag[i]).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let mut ap = vec![0.0; n];
        for _ in 0..4 * n.max(50) {
            if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-13 * scale {
                break;
            }
            self.apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap == 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                z[i] = r[i] / self.diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

/// One linearly implicit step for the normal displacement `s ν`:
/// `A s - dt/4 Σ w (ν_i·ν_j s_j - s_i) = dt (¼ lap·ν - H₀ A)`, i.e. the
/// speed uses the mean curvature after the step. Fixed vertices have `s = 0`.
fn implicit_step(mesh: &mut TriMesh, terms: &CotanTerms, dt: f64, target: f64) {
    let nv = mesh.vertices.len();
    let mut index = vec![usize::MAX; nv];
    let mut free = Vec::new();
    for i in 0..nv {
        if !mesh.fixed_mask[i] && terms.area[i] > 0.0 && terms.normal_sum[i] != Vec3::ZERO {
            index[i] = free.len();
            free.push(i);
        }
    }
    let n = free.len();
    let normals: Vec<Vec3> = (0..nv).map(|i| terms.normal_sum[i].normalized()).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rhs = vec![0.0; n];
    for (k, &i) in free.iter().enumerate() {
        rows[k].push((k, terms.area[i]));
        rhs[k] = dt * (0.25 * terms.lap[i].dot(normals[i]) - target * terms.area[i]);
    }
    let h = 0.25 * dt;
    for &(j, l, w) in &terms.edges {
        for (a, b) in [(j, l), (l, j)] {
            let ka = index[a];
            if ka == usize::MAX {
                continue;
            }
            rows[ka].push((ka, h * w));
            if index[b] != usize::MAX {
                rows[ka].push((index[b], -h * w * normals[a].dot(normals[b])));
            }
        }
    }
    let system = System::new(rows);
    let mut x = vec![0.0; n];
    system.solve(&rhs, &mut x);
    for (k, &i) in free.iter().enumerate() {
        mesh.vertices[i] += normals[i] * x[k];
    }
}

pub fn run_flow(mesh: &TriMesh, config: &FlowConfig) -> Result<FlowOutput> {
    run_flow_with(mesh, config, |_, _| {})
}

/// [`run_flow`] calling `observe(iteration, mesh)` after every completed step,
/// remeshing included.
pub fn run_flow_with<F: FnMut(usize, &TriMesh)>(mesh: &TriMesh, config: &FlowConfig, mut observe: F) -> Result<FlowOutput> {
    config.check(mesh)?;
    let mut mesh = mesh.clone();
    let mut trace = FlowTrace::default();
    let mut growth = 0usize;
    let mut last_disp = f64::INFINITY;
    for it in 0..config.max_iters {
        let terms = cotan_terms(&mesh);
        let vel = velocity(&mesh, &terms, config.target_h)?;
        let energy = match config.energy {
            Some(p) if config.energy_interval > 0 && it % config.energy_interval == 0 => {
                evaluate_energy(&mesh, &p).ok().map(|r| r.total)
            }
            _ => None,
        };
        let mut step = FlowStep {
            iteration: it,
            max_h_deviation: vel.max_h_dev,
            max_displacement: 0.0,
            area: mesh.area(),
            energy,
        };
        if !vel.max_h_dev.is_finite() {
            trace.steps.push(step);
            return Ok(FlowOutput { mesh, trace, status: FlowStatus::Diverged { iteration: it } });
        }
        if vel.max_h_dev <= config.h_tolerance {
            trace.steps.push(step);
            return Ok(FlowOutput { mesh, trace, status: FlowStatus::Converged });
        }
        let before = mesh.vertices.clone();
        match config.step_mode {
            StepMode::Explicit => {
                for (x, v) in mesh.vertices.iter_mut().zip(&vel.v) {
                    *x += *v * config.time_step;
                }
            }
            StepMode::SemiImplicit => implicit_step(&mut mesh, &terms, config.time_step, config.target_h),
        }
        let disp = mesh.vertices.iter().zip(&before).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        step.max_displacement = disp;
        trace.steps.push(step);
        if !disp.is_finite() || mesh.vertices.iter().any(|v| !v.is_finite()) {
            mesh.vertices = before;
            return Ok(FlowOutput { mesh, trace, status: FlowStatus::Diverged { iteration: it } });
        }
        growth = if disp > last_disp { growth + 1 } else { 0 };
        last_disp = disp;
        if growth >= DIVERGENCE_WINDOW {
            return Ok(FlowOutput { mesh, trace, status: FlowStatus::Diverged { iteration: it } });
        }
        if config.remesh_interval > 0 && it < config.remesh_until && (it + 1) % config.remesh_interval == 0 {
            remesh(&mut mesh);
        }
        observe(it, &mesh);
    }
    Ok(FlowOutput { mesh, trace, status: FlowStatus::MaxIterations })
}

/// Interior and boundary Euler–Lagrange residuals of a flowed surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    /// `ΔH + 2(H+c₀)(H(H-c₀) - K)` over vertices at least two rings from
    /// the boundary, normalized like the boundary residuals.
    pub el1: f64,
    pub boundary: ElResiduals,
}

impl EquilibriumReport {
    pub fn max(&self) -> f64 {
        self.el1.max(self.boundary.r2).max(self.boundary.r3).max(self.boundary.r4)
    }
}

pub fn verify_equilibrium(mesh: &TriMesh, params: &EnergyParams) -> Result<EquilibriumReport> {
    let field = curvature_field(mesh)?;
    let boundary = el_residuals_with(mesh, &field, params)?;
    let terms = cotan_terms(mesh);
    let nv = mesh.vertices.len();

    // graph distance from the boundary, capped at 2
    let nbrs = mesh.vertex_neighbors();
    let mut depth: Vec<u8> = field.on_boundary.iter().map(|&b| if b { 0 } else { 2 }).collect();
    for i in 0..nv {
        if field.on_boundary[i] {
            for &j in &nbrs[i] {
                depth[j] = depth[j].min(1);
            }
        }
    }
    let mut lap_h = vec![0.0; nv];
    for &(j, l, w) in &terms.edges {
        let d = field.mean[l] - field.mean[j];
        lap_h[j] += w * d;
        lap_h[l] -= w * d;
    }
    let longest = (0..mesh.boundary_loops.len())
        .map(|l| {
            let p = mesh.loop_points(l);
            (0..p.len()).map(|i| (p[(i + 1) % p.len()] - p[i]).norm()).sum::<f64>()
        })
        .fold(0.0, f64::max);
    let k_ref = if longest > 0.0 { 2.0 * PI / longest } else { 1.0 / mesh.bounding_box_diagonal() };
    let c0 = params.c0;
    let (mut worst, mut scale) = (0.0f64, k_ref * k_ref * k_ref);
    for i in 0..nv {
        if depth[i] < 2 || !(terms.area[i] > 0.0) {
            continue;
        }
        let h = field.mean[i];
        let k = field.defects[i] / terms.area[i];
        let terms_i = [0.5 * lap_h[i] / terms.area[i], 2.0 * (h + c0) * h * (h - c0), -2.0 * (h + c0) * k];
        worst = worst.max(terms_i.iter().sum::<f64>().abs());
        scale = terms_i.iter().fold(scale, |m, t| m.max(t.abs()));
    }
    Ok(EquilibriumReport { el1: worst / scale, boundary })
}
