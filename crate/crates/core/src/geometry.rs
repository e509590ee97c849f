//! Discrete curvature estimators on triangle meshes.
//!
//! Mean curvature is `H = ½ ΔX·ν` with the cotangent Laplacian and mixed
//! vertex areas, so the unit sphere with outward normal has `H = -1`.
//! Gaussian curvature is the angle defect. On the boundary the defect
//! `π - Σθ` is the turning angle, and `κ_g` carries the opposite sign so
//! that `∫K = ∮κ_g + 2πχ` holds exactly and a flat disc has `κ_g = -1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::{frenet_from_derivatives, SampledCurve};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::numeric::{least_squares, periodic_derivative};
use crate::vec3::Vec3;

/// Per-vertex curvature data.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    /// Mean curvature. Boundary values are extrapolated from the interior.
    pub mean: Vec<f64>,
    /// Unit surface normal. Boundary normals come from a quadratic fit.
    pub normals: Vec<Vec3>,
    pub mixed_area: Vec<f64>,
    /// `2π - Σθ` inside, `π - Σθ` on the boundary.
    pub defects: Vec<f64>,
    /// Gaussian curvature density: defect over area inside, extrapolated from
    /// the interior on the boundary.
    pub gauss: Vec<f64>,
    /// Derivative of `H` along the outward conormal; zero off the boundary.
    pub dn_mean: Vec<f64>,
    pub on_boundary: Vec<bool>,
}

fn angle(u: Vec3, v: Vec3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

/// Orthonormal pair spanning the plane orthogonal to `n`.
fn tangent_basis(n: Vec3) -> (Vec3, Vec3) {
    let seed = if n.x.abs() < 0.6 { Vec3::X } else { Vec3::Y };
    let e1 = (seed - n * seed.dot(n)).normalized();
    (e1, n.cross(e1))
}

/// Vertices within `depth` edges of `v`, excluding `v`.
fn rings(nbrs: &[Vec<usize>], v: usize, depth: usize) -> Vec<usize> {
    let mut out: Vec<usize> = vec![v];
    let mut frontier = vec![v];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in &nbrs[u] {
                if !out.contains(&w) {
                    out.push(w);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    out.remove(0);
    out
}

/// Turning direction of each boundary vertex from its loop neighbours.
fn loop_tangents(mesh: &TriMesh) -> Vec<Option<Vec3>> {
    let mut t = vec![None; mesh.vertices.len()];
    for lp in &mesh.boundary_loops {
        let n = lp.len();
        for i in 0..n {
            let d = mesh.vertices[lp[(i + 1) % n]] - mesh.vertices[lp[(i + n - 1) % n]];
            t[lp[i]] = Some(d.normalized());
        }
    }
    t
}

/// Cotangent weights, mixed areas and face sums at every vertex.
pub(crate) struct CotanTerms {
    /// `(j, l, cot θ)` for the edge `j-l` opposite each face angle.
    pub edges: Vec<(usize, usize, f64)>,
    /// `Σ_j (cot α + cot β)(x_j - x_i)`, so that `Hν = ¼ lap / area`.
    pub lap: Vec<Vec3>,
    pub area: Vec<f64>,
    /// Sum of the doubled face area vectors.
    pub normal_sum: Vec<Vec3>,
    pub angle_sum: Vec<f64>,
}

pub(crate) fn cotan_terms(mesh: &TriMesh) -> CotanTerms {
    let nv = mesh.vertices.len();
    let x = &mesh.vertices;
    let mut t = CotanTerms {
        edges: Vec::with_capacity(3 * mesh.faces.len()),
        lap: vec![Vec3::ZERO; nv],
        area: vec![0.0; nv],
        normal_sum: vec![Vec3::ZERO; nv],
        angle_sum: vec![0.0; nv],
    };
    for (f, tri) in mesh.faces.iter().enumerate() {
        let cross = mesh.face_cross(f);
        let a = 0.5 * cross.norm();
        let mut theta = [0.0; 3];
        for k in 0..3 {
            let (i, j, l) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            theta[k] = angle(x[j] - x[i], x[l] - x[i]);
            t.angle_sum[i] += theta[k];
            t.normal_sum[i] += cross;
        }
        let obtuse = theta.iter().position(|&t| t > PI / 2.0);
        for k in 0..3 {
            let (i, j, l) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            // edge j-l is opposite vertex i
            let cot = 1.0 / theta[k].tan();
            t.edges.push((j, l, cot));
            t.lap[j] += (x[l] - x[j]) * cot;
            t.lap[l] += (x[j] - x[l]) * cot;
            t.area[i] += match obtuse {
                None => {
                    let cot_j = 1.0 / theta[(k + 1) % 3].tan();
                    let cot_l = 1.0 / theta[(k + 2) % 3].tan();
                    ((x[j] - x[i]).norm_squared() * cot_l + (x[l] - x[i]).norm_squared() * cot_j) / 8.0
                }
                Some(o) if o == k => a / 2.0,
                Some(_) => a / 4.0,
            };
        }
    }
    t
}

pub fn curvature_field(mesh: &TriMesh) -> Result<CurvatureField> {
    let nv = mesh.vertices.len();
    let x = &mesh.vertices;
    let CotanTerms { lap, area, normal_sum, angle_sum, .. } = cotan_terms(mesh);
    let on_boundary = mesh.boundary_mask();
    let mut used = vec![false; nv];
    for t in &mesh.faces {
        for &v in t {
            used[v] = true;
        }
    }
    let mut mean = vec![0.0; nv];
    let mut normals = vec![Vec3::ZERO; nv];
    let mut defects = vec![0.0; nv];
    let mut gauss = vec![0.0; nv];
    for v in 0..nv {
        if !used[v] {
            continue;
        }
        if !(area[v] > 0.0) {
            return Err(Error::ZeroAreaStar(v));
        }
        normals[v] = normal_sum[v].normalized();
        if on_boundary[v] {
            defects[v] = PI - angle_sum[v];
        } else {
            defects[v] = 2.0 * PI - angle_sum[v];
            gauss[v] = defects[v] / area[v];
            mean[v] = 0.25 * lap[v].dot(normals[v]) / area[v];
        }
    }

    let nbrs = mesh.vertex_neighbors();
    let tangents = loop_tangents(mesh);
    let mut dn_mean = vec![0.0; nv];
    for v in 0..nv {
        let Some(t) = tangents[v] else { continue };
        let near = rings(&nbrs, v, 2);
        normals[v] = fitted_normal(x, v, &near, normals[v], t);
        let nu = normals[v];
        let n = t.cross(nu);
        let inner: Vec<usize> = near.iter().copied().filter(|&w| !on_boundary[w]).collect();
        let rows: Vec<[f64; 3]> = inner
            .iter()
            .map(|&w| {
                let d = x[w] - x[v];
                [1.0, d.dot(t), d.dot(n)]
            })
            .collect();
        let vals: Vec<f64> = inner.iter().map(|&w| mean[w]).collect();
        let ks: Vec<f64> = inner.iter().map(|&w| gauss[w]).collect();
        match (least_squares(&rows, &vals), least_squares(&rows, &ks)) {
            (Some(c), Some(k)) => {
                mean[v] = c[0];
                dn_mean[v] = c[2];
                gauss[v] = k[0];
            }
            _ if !vals.is_empty() => {
                mean[v] = vals.iter().sum::<f64>() / vals.len() as f64;
                gauss[v] = ks.iter().sum::<f64>() / ks.len() as f64;
            }
            _ => {}
        }
    }
    Ok(CurvatureField { mean, normals, mixed_area: area, defects, gauss, dn_mean, on_boundary })
}

/// Normal from a least-squares height function `z = ax + by + cx² + dxy + ey²`
/// over nearby vertices, made orthogonal to the boundary tangent `t`.
fn fitted_normal(x: &[Vec3], v: usize, near: &[usize], guess: Vec3, t: Vec3) -> Vec3 {
    let (e1, e2) = tangent_basis(guess);
    let mut rows = Vec::with_capacity(near.len());
    let mut rhs = Vec::with_capacity(near.len());
    for &w in near {
        let d = x[w] - x[v];
        let (a, b) = (d.dot(e1), d.dot(e2));
        rows.push([a, b, a * a, a * b, b * b]);
        rhs.push(d.dot(guess));
    }
    let nu = match least_squares(&rows, &rhs) {
        Some(c) => (guess - e1 * c[0] - e2 * c[1]).normalized(),
        None => guess,
    };
    (nu - t * nu.dot(t)).normalized()
}

/// Mean curvature at every vertex. Boundary values are extrapolated from the
/// two interior rings next to the boundary.
pub fn vertex_mean_curvature(mesh: &TriMesh) -> Result<Vec<f64>> {
    Ok(curvature_field(mesh)?.mean)
}

/// Integrated Gaussian curvature: the angle defect `2π - Σθ` at interior
/// vertices and the turning angle `π - Σθ` at boundary vertices.
pub fn vertex_gaussian_curvature(mesh: &TriMesh) -> Vec<f64> {
    let mut sum = vec![0.0; mesh.vertices.len()];
    let mut used = vec![false; mesh.vertices.len()];
    for tri in &mesh.faces {
        for k in 0..3 {
            let (i, j, l) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let x = &mesh.vertices;
            sum[i] += angle(x[j] - x[i], x[l] - x[i]);
            used[i] = true;
        }
    }
    let boundary = mesh.boundary_mask();
    (0..sum.len())
        .map(|v| match (used[v], boundary[v]) {
            (false, _) => 0.0,
            (true, true) => PI - sum[v],
            (true, false) => 2.0 * PI - sum[v],
        })
        .collect()
}

/// Darboux data at one boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxSample {
    pub vertex: usize,
    pub position: Vec3,
    /// Arclength per unit sample index.
    pub ds: f64,
    pub t: Vec3,
    /// Frenet normal and binormal.
    pub normal: Vec3,
    pub binormal: Vec3,
    /// Outward conormal `T×ν`.
    pub n: Vec3,
    /// Surface normal.
    pub nu: Vec3,
    pub kappa: f64,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau: f64,
    pub tau_g: f64,
    /// Contact angle between the Frenet normal and `ν`.
    pub theta: f64,
    pub kappa_prime: f64,
    pub kappa_second: f64,
    pub tau_prime: f64,
    pub tau_g_prime: f64,
    /// Mean curvature, its conormal derivative and the Gaussian curvature
    /// `κ_n(2H - κ_n) - τ_g²` at the boundary.
    pub mean: f64,
    pub dn_mean: f64,
    pub gauss: f64,
}

/// Darboux frames along one boundary loop.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub samples: Vec<DarbouxSample>,
}

impl BoundaryFrame {
    pub fn length(&self) -> f64 {
        self.samples.iter().map(|s| s.ds).sum()
    }

    /// `∮ f ds` for a per-sample integrand.
    pub fn integrate<F: Fn(&DarbouxSample) -> f64>(&self, f: F) -> f64 {
        self.samples.iter().map(|s| f(s) * s.ds).sum()
    }

    pub fn total_squared_curvature(&self) -> f64 {
        self.integrate(|s| s.kappa * s.kappa)
    }
}

fn wrap(a: f64) -> f64 {
    a - 2.0 * PI * (a / (2.0 * PI)).round()
}

/// Fourth-order periodic central difference in the sample index; `angular`
/// wraps differences into `(-π, π]`.
fn index_derivative(v: &[f64], angular: bool) -> Vec<f64> {
    let n = v.len();
    let diff = |i: usize, k: isize| {
        let j = (i as isize + k).rem_euclid(n as isize) as usize;
        let d = v[j] - v[i];
        if angular {
            wrap(d)
        } else {
            d
        }
    };
    (0..n).map(|i| (8.0 * (diff(i, 1) - diff(i, -1)) - (diff(i, 2) - diff(i, -2))) / 12.0).collect()
}

pub fn boundary_darboux(mesh: &TriMesh, loop_index: usize) -> Result<BoundaryFrame> {
    let field = curvature_field(mesh)?;
    boundary_darboux_with(mesh, &field, loop_index)
}

/// As [`boundary_darboux`], reusing a computed curvature field.
pub fn boundary_darboux_with(mesh: &TriMesh, field: &CurvatureField, loop_index: usize) -> Result<BoundaryFrame> {
    let lp = mesh
        .boundary_loops
        .get(loop_index)
        .ok_or_else(|| Error::params("boundary loop index out of range"))?;
    let n = lp.len();
    if n < 8 {
        return Err(Error::TooCoarseLoop(n));
    }
    let pts = mesh.loop_points(loop_index);
    let coord = |k: usize| -> Vec<f64> { pts.iter().map(|p| p[k]).collect() };
    let mut jet = [[Vec::new(), Vec::new(), Vec::new()], [Vec::new(), Vec::new(), Vec::new()], [
        Vec::new(),
        Vec::new(),
        Vec::new(),
    ]];
    for k in 0..3 {
        let c = coord(k);
        for o in 0..3 {
            jet[o][k] = periodic_derivative(&c, o as u32 + 1);
        }
    }
    let at = |o: usize, i: usize| Vec3::new(jet[o][0][i], jet[o][1][i], jet[o][2][i]);
    let mut samples = Vec::with_capacity(n);
    let mut prev = None;
    for i in 0..n {
        let (d1, d2, d3) = (at(0, i), at(1, i), at(2, i));
        let (t, nn, b, kappa, tau) = frenet_from_derivatives(d1, d2, d3, prev);
        prev = Some(nn);
        let v = lp[i];
        let nu = (field.normals[v] - t * field.normals[v].dot(t)).normalized();
        let conormal = t.cross(nu);
        let curvature = nn * kappa;
        let kappa_g = curvature.dot(conormal);
        let kappa_n = curvature.dot(nu);
        samples.push(DarbouxSample {
            vertex: v,
            position: pts[i],
            ds: d1.norm(),
            t,
            normal: nn,
            binormal: b,
            n: conormal,
            nu,
            kappa,
            kappa_g,
            kappa_n,
            tau,
            tau_g: 0.0,
            theta: kappa_g.atan2(kappa_n),
            kappa_prime: 0.0,
            kappa_second: 0.0,
            tau_prime: 0.0,
            tau_g_prime: 0.0,
            mean: field.mean[v],
            dn_mean: field.dn_mean[v],
            gauss: 0.0,
        });
    }
    let ds: Vec<f64> = samples.iter().map(|s| s.ds).collect();
    let per_s = |d: Vec<f64>| -> Vec<f64> { d.iter().zip(&ds).map(|(a, b)| a / b).collect() };
    let kappa: Vec<f64> = samples.iter().map(|s| s.kappa).collect();
    let tau: Vec<f64> = samples.iter().map(|s| s.tau).collect();
    let theta: Vec<f64> = samples.iter().map(|s| s.theta).collect();
    let kp = per_s(periodic_derivative(&kappa, 1));
    let kpp = per_s(periodic_derivative(&kp, 1));
    let tp = per_s(periodic_derivative(&tau, 1));
    let thp = per_s(index_derivative(&theta, true));
    let tau_g: Vec<f64> = thp.iter().zip(&tau).map(|(a, b)| a - b).collect();
    let tgp = per_s(index_derivative(&tau_g, false));
    for (i, s) in samples.iter_mut().enumerate() {
        s.kappa_prime = kp[i];
        s.kappa_second = kpp[i];
        s.tau_prime = tp[i];
        s.tau_g = tau_g[i];
        s.tau_g_prime = tgp[i];
        s.gauss = s.kappa_n * (2.0 * s.mean - s.kappa_n) - s.tau_g * s.tau_g;
    }
    Ok(BoundaryFrame { samples })
}

/// Surface integrals entering the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceIntegrals {
    pub area: f64,
    /// `∫(H+c₀)²`
    pub total_h_plus_c0_sq: f64,
    /// `∫K`: the interior angle defects plus the cells of the boundary
    /// vertices at the extrapolated density. The defects alone miss that
    /// strip, an error of first order wherever `K ≠ 0` on the boundary.
    pub total_k: f64,
    /// `∫(H+c₀)`
    pub total_h_offset: f64,
}

pub fn integrate_surface(mesh: &TriMesh, c0: f64) -> Result<SurfaceIntegrals> {
    let field = curvature_field(mesh)?;
    Ok(integrate_field(&field, c0))
}

pub fn integrate_field(field: &CurvatureField, c0: f64) -> SurfaceIntegrals {
    let mut out = SurfaceIntegrals { area: 0.0, total_h_plus_c0_sq: 0.0, total_k: 0.0, total_h_offset: 0.0 };
    for v in 0..field.mean.len() {
        let a = field.mixed_area[v];
        let h = field.mean[v] + c0;
        out.area += a;
        out.total_h_plus_c0_sq += a * h * h;
        out.total_h_offset += a * h;
        out.total_k += if field.on_boundary[v] { field.gauss[v] * a } else { field.defects[v] };
    }
    out
}

/// `|∫K - ∮κ_g - 2πχ|` with angle defects and boundary turning angles.
pub fn gauss_bonnet_residual(mesh: &TriMesh) -> f64 {
    let defects = vertex_gaussian_curvature(mesh);
    let boundary = mesh.boundary_mask();
    let (mut total_k, mut total_kg) = (0.0, 0.0);
    for (v, d) in defects.iter().enumerate() {
        if boundary[v] {
            total_kg -= d;
        } else {
            total_k += d;
        }
    }
    (total_k - total_kg - 2.0 * PI * mesh.euler_characteristic() as f64).abs()
}

/// Both sides of `4π²/L ≤ ∮κ² ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn wirtinger_check(curve: &SampledCurve) -> Result<Wirtinger> {
    if !curve.closed {
        return Err(Error::OpenCurve);
    }
    let n = curve.distinct_len();
    let rhs = curve.kappa[..n].iter().map(|k| k * k).sum::<f64>() * curve.arclength_step;
    Ok(Wirtinger { lhs: 4.0 * PI * PI / curve.length(), rhs })
}
