mod common;

use std::f64::consts::PI;

use helfrich_core::curve::SampledCurve;
use helfrich_core::elastica::*;
use helfrich_core::energy::{evaluate_energy, lower_bound, EnergyParams, Topology};
use helfrich_core::flow::*;
use helfrich_core::geometry::vertex_mean_curvature;
use helfrich_core::mesh::TriMesh;
use helfrich_core::Vec3;

use common::unit_params;

fn max_free_h(m: &TriMesh) -> f64 {
    let h = vertex_mean_curvature(m).unwrap();
    (0..h.len()).filter(|&i| !m.fixed_mask[i]).map(|i| h[i].abs()).fold(0.0, f64::max)
}

fn boundary_of(m: &TriMesh) -> Vec<Vec<Vec3>> {
    (0..m.boundary_loops.len()).map(|l| m.loop_points(l)).collect()
}

/// Disc over a circle of radius `r` with the interior lifted into a dome.
fn bumped_disc(r: f64, height: f64) -> TriMesh {
    let mut m = initial_disc(&SampledCurve::circle(r, 64), 10).unwrap();
    for (i, v) in m.vertices.iter_mut().enumerate() {
        if !m.fixed_mask[i] {
            v.z = height * (1.0 - (v.x * v.x + v.y * v.y) / (r * r));
        }
    }
    m
}

fn semi_implicit(dt: f64, iters: usize, tol: f64) -> FlowConfig {
    let mut c = FlowConfig::new(dt, iters, tol);
    c.step_mode = StepMode::SemiImplicit;
    c
}

fn coaxial_circles(r: f64, half_gap: f64, n: usize) -> TriMesh {
    let c = SampledCurve::circle(r, n);
    let axes = [Vec3::X, Vec3::Y, Vec3::Z];
    let lower = c.transformed(axes, 1.0, Vec3::new(0.0, 0.0, -half_gap));
    let upper = c.transformed(axes, 1.0, Vec3::new(0.0, 0.0, half_gap));
    initial_annulus(&lower, &upper, 16).unwrap()
}

#[test]
fn seed_over_the_unit_circle() {
    let m = initial_disc(&SampledCurve::circle(1.0, 128), 8).unwrap();
    assert_eq!(m.euler_characteristic(), 1);
    let p = m.loop_points(0);
    let len: f64 = (0..p.len()).map(|i| (p[(i + 1) % p.len()] - p[i]).norm()).sum();
    assert!((len - 2.0 * PI).abs() < 1e-3);
    let boundary = m.boundary_mask();
    assert_eq!(m.fixed_mask, boundary);
}

#[test]
fn flat_disc_witness() {
    let p = unit_params(1.0, 0.0, 0.0);
    let m = bumped_disc(1.0, 0.4);
    let before = boundary_of(&m);
    let out = run_flow(&m, &FlowConfig::explicit_for(&m, 50_000, 1e-6)).unwrap();
    assert_eq!(out.status, FlowStatus::Converged);
    assert_eq!(boundary_of(&out.mesh), before);
    assert!(max_free_h(&out.mesh) < 1e-3);
    let e = evaluate_energy(&out.mesh, &p).unwrap().total;
    assert!((e - 4.0 * PI).abs() < 1e-2 * 4.0 * PI, "{e}");
    assert!(out.trace.area_non_increasing_after(0.05));
    assert!(verify_equilibrium(&out.mesh, &p).unwrap().max() < 1e-3);
}

/// Discs over the critical circle for the cells whose minimiser is the
/// planar disc.
#[test]
fn flowed_disc_attains_the_disc_bound() {
    for b in [0.5, -0.5] {
        let p = EnergyParams::new(1.0, 0.0, b, 1.0, 4.0).unwrap();
        let bound = lower_bound(&p, Topology::Disc).unwrap().bound.unwrap();
        let m = bumped_disc(p.critical_radius().unwrap(), 0.2);
        let out = run_flow(&m, &semi_implicit(0.01, 5000, 1e-8)).unwrap();
        assert_eq!(out.status, FlowStatus::Converged);
        let e = evaluate_energy(&out.mesh, &p).unwrap().total;
        assert!((e - bound).abs() < 1e-2 * bound, "b {b}: {e} vs {bound}");
    }
}

#[test]
fn catenoid_between_critical_circles() {
    let p = unit_params(1.0, 0.0, 0.0);
    let m = coaxial_circles(1.0, 0.5, 96);
    let before = boundary_of(&m);
    let mut cfg = semi_implicit(0.05, 3000, 1e-8);
    cfg.remesh_interval = 1;
    cfg.remesh_until = 200;
    let out = run_flow(&m, &cfg).unwrap();
    assert_eq!(out.status, FlowStatus::Converged);
    assert_eq!(boundary_of(&out.mesh), before);
    let e = evaluate_energy(&out.mesh, &p).unwrap().total;
    assert!((e - 8.0 * PI).abs() < 1e-2 * 8.0 * PI, "{e}");
    // waist of the stable catenoid through the two circles: c cosh(0.5/c) = 1
    let waist = out.mesh.vertices.iter().filter(|v| v.z.abs() < 0.02).map(|v| v.x.hypot(v.y)).fold(f64::INFINITY, f64::min);
    assert!((waist - 0.8483).abs() < 1e-2, "{waist}");
    let r = verify_equilibrium(&out.mesh, &p).unwrap();
    assert!(r.max() < 1e-2, "{r:?}");
}

#[test]
fn area_decreases_without_remeshing() {
    let out = run_flow(&coaxial_circles(1.0, 0.5, 64), &semi_implicit(0.05, 400, 1e-9)).unwrap();
    assert!(out.trace.steps.len() > 20);
    assert!(out.trace.area_non_increasing_after(0.05));
    let bumped = bumped_disc(1.0, 0.5);
    let out = run_flow(&bumped, &FlowConfig::explicit_for(&bumped, 2000, 1e-9)).unwrap();
    assert!(out.trace.area_non_increasing_after(0.05));
}

/// The flow moves vertices along normals only, so the tangential placement
/// of the limit keeps an O(dt) memory of the path.
#[test]
fn halving_the_step_keeps_the_limit() {
    let m = coaxial_circles(1.0, 0.5, 64);
    let coarse = run_flow(&m, &semi_implicit(0.01, 20_000, 1e-10)).unwrap();
    let fine = run_flow(&m, &semi_implicit(0.005, 40_000, 1e-10)).unwrap();
    assert_eq!(coarse.status, FlowStatus::Converged);
    assert_eq!(fine.status, FlowStatus::Converged);
    let diag = m.bounding_box_diagonal();
    let dev = coarse.mesh.vertices.iter().zip(&fine.mesh.vertices).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
    assert!(dev < 1e-4 * diag, "{dev}");
}

#[test]
fn divergence_and_validation() {
    let m = bumped_disc(1.0, 0.3);
    let mut cfg = FlowConfig::explicit_for(&m, 10, 1e-9);
    cfg.target_h = 0.5;
    assert!(run_flow(&m, &cfg).is_err());
    let cfg = FlowConfig::new(2.0 * stability_bound(&m), 10, 1e-9);
    assert!(run_flow(&m, &cfg).is_err());
}

/// Minimal discs over the closed elastic curves `G(q,1)` at the critical
/// scale `α = β = 1`.
#[test]
fn minimal_discs_over_elastic_curves() {
    let params = CurveParams::new(0.0, 1.0).unwrap();
    let p = unit_params(1.0, 0.0, 0.0);
    for q in [3u32, 4, 5] {
        let fi = find_closed_curve(&params, q, 1, &SearchBox::default_for(&params)).unwrap();
        let curve = reconstruct_curve(&curvature_profile(&params, &fi, 64).unwrap(), q as usize).unwrap();
        let m = initial_disc(&curve, 24).unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        let before = boundary_of(&m);
        let mut cfg = semi_implicit(0.1, 3000, 1e-9);
        cfg.remesh_interval = 1;
        cfg.remesh_until = 300;
        let out = run_flow(&m, &cfg).unwrap();
        assert_eq!(out.status, FlowStatus::Converged, "q {q}");
        assert_eq!(boundary_of(&out.mesh), before);
        assert!(max_free_h(&out.mesh) < 1e-2);
        let r = verify_equilibrium(&out.mesh, &p).unwrap();
        assert!(r.boundary.r2 < 1e-2 && r.boundary.r3 < 1e-2 && r.boundary.r4 < 1e-2, "q {q}: {r:?}");
        assert!(r.el1 < 1e-2, "q {q}: {r:?}");
    }
}
