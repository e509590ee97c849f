//! Mesh generators for the analytic test surfaces and for flow seeds.
//!
//! Surfaces of revolution take a profile `(r, z)`; the normal is
//! `X_s × X_ϑ`, so a profile running away from the north pole of a sphere
//! gives the outward normal, and a planar profile running outward gives `+z`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// Triangulates the band between two closed rings. `a` and `b` are vertex
/// indices, `sa` and `sb` their parameters in `[0, 1)`, increasing. The
/// triangles are oriented as if `a` were inside `b` and both ran
/// counterclockwise.
fn zip(a: &[usize], sa: &[f64], b: &[usize], sb: &[f64], faces: &mut Vec<[usize; 3]>) {
    let (na, nb) = (a.len(), b.len());
    let next = |s: &[f64], i: usize| if i + 1 < s.len() { s[i + 1] } else { s[0] + 1.0 };
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_b = i == na || (j < nb && next(sb, j) <= next(sa, i));
        if advance_b {
            faces.push([a[i % na], b[j % nb], b[(j + 1) % nb]]);
            j += 1;
        } else {
            faces.push([a[i % na], b[j % nb], a[(i + 1) % na]]);
            i += 1;
        }
    }
}

/// Pole fan: `c` in the middle of ring `b`.
fn fan(c: usize, b: &[usize], faces: &mut Vec<[usize; 3]>) {
    for j in 0..b.len() {
        faces.push([c, b[j], b[(j + 1) % b.len()]]);
    }
}

fn uniform(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / m as f64).collect()
}

/// Grid surface of revolution for a profile with `r > 0` throughout: an
/// annulus with `n_theta` samples on each parallel.
pub fn revolve(profile: &[(f64, f64)], n_theta: usize) -> Result<TriMesh> {
    if profile.len() < 2 || n_theta < 3 {
        return Err(Error::params("a revolved grid needs two profile samples and three angles"));
    }
    if profile.iter().any(|&(r, _)| !(r > 0.0)) {
        return Err(Error::DegenerateRadius);
    }
    let mut vertices = Vec::with_capacity(profile.len() * n_theta);
    for &(r, z) in profile {
        for j in 0..n_theta {
            let t = 2.0 * PI * j as f64 / n_theta as f64;
            vertices.push(Vec3::new(r * t.cos(), r * t.sin(), z));
        }
    }
    let id = |i: usize, j: usize| i * n_theta + j % n_theta;
    let mut faces = Vec::with_capacity(2 * (profile.len() - 1) * n_theta);
    for i in 0..profile.len() - 1 {
        for j in 0..n_theta {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Disc-type surface of revolution. `profile[0]` must lie on the axis; each
/// parallel gets about `2πr/spacing` vertices.
pub fn revolve_disc(profile: &[(f64, f64)], spacing: f64) -> Result<TriMesh> {
    if profile.len() < 2 || profile[0].0 != 0.0 {
        return Err(Error::params("a revolved disc profile must start on the axis"));
    }
    if profile[1..].iter().any(|&(r, _)| !(r > 0.0)) || !(spacing > 0.0) {
        return Err(Error::DegenerateRadius);
    }
    let mut vertices = vec![Vec3::new(0.0, 0.0, profile[0].1)];
    let mut faces = Vec::new();
    let mut prev: Vec<usize> = vec![0];
    let mut prev_s: Vec<f64> = vec![0.0];
    for (k, &(r, z)) in profile.iter().enumerate().skip(1) {
        let m = ((2.0 * PI * r / spacing).round() as usize).max(6);
        let ring: Vec<usize> = (vertices.len()..vertices.len() + m).collect();
        let s = uniform(m);
        for &t in &s {
            let a = 2.0 * PI * t;
            vertices.push(Vec3::new(r * a.cos(), r * a.sin(), z));
        }
        if k == 1 {
            fan(0, &ring, &mut faces);
        } else {
            zip(&prev, &prev_s, &ring, &s, &mut faces);
        }
        prev = ring;
        prev_s = s;
    }
    TriMesh::new(vertices, faces)
}

/// Flat disc of the given radius in the `xy` plane, normal `+z`, with
/// `n_boundary` boundary vertices and `rings` concentric rings.
pub fn flat_disc(radius: f64, n_boundary: usize, rings: usize) -> Result<TriMesh> {
    if rings == 0 || n_boundary < 3 {
        return Err(Error::params("a disc needs at least one ring and three boundary vertices"));
    }
    let curve = SampledCurve::circle(radius, n_boundary);
    cone_disc(&curve.points[..n_boundary], Vec3::ZERO, rings)
}

/// Concentric-ring disc spanning the closed polygon `boundary`, coned to
/// `center`. Ring `k` has about `n·k/rings` vertices.
pub fn cone_disc(boundary: &[Vec3], center: Vec3, rings: usize) -> Result<TriMesh> {
    let n = boundary.len();
    if rings == 0 {
        return Err(Error::params("rings must be positive"));
    }
    if n < 3 {
        return Err(Error::params("the boundary needs at least three points"));
    }
    let at = |t: f64| -> Vec3 {
        let x = t * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let f = x - i as f64;
        boundary[i] * (1.0 - f) + boundary[(i + 1) % n] * f
    };
    let mut vertices = vec![center];
    let mut faces = Vec::new();
    let mut prev = vec![0usize];
    let mut prev_s = vec![0.0];
    for k in 1..=rings {
        let m = if k == rings { n } else { ((n * k) as f64 / rings as f64).round().max(3.0) as usize };
        let s = uniform(m);
        let frac = k as f64 / rings as f64;
        let ring: Vec<usize> = (vertices.len()..vertices.len() + m).collect();
        for &t in &s {
            let p = if k == rings { boundary[(t * n as f64).round() as usize % n] } else { center + (at(t) - center) * frac };
            vertices.push(p);
        }
        if k == 1 {
            fan(0, &ring, &mut faces);
        } else {
            zip(&prev, &prev_s, &ring, &s, &mut faces);
        }
        prev = ring;
        prev_s = s;
    }
    TriMesh::new(vertices, faces)
}

/// Ruled strip between two closed polygons with equal sample counts, with
/// `rings` rows of quads. The loop over `a` runs along `a`.
pub fn ruled_annulus(a: &[Vec3], b: &[Vec3], rings: usize) -> Result<TriMesh> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::SampleCountMismatch(n, b.len()));
    }
    if rings == 0 || n < 3 {
        return Err(Error::params("an annulus needs at least one ring and three samples"));
    }
    let mut vertices = Vec::with_capacity((rings + 1) * n);
    for k in 0..=rings {
        let f = k as f64 / rings as f64;
        for j in 0..n {
            vertices.push(a[j] * (1.0 - f) + b[j] * f);
        }
    }
    let id = |i: usize, j: usize| i * n + j % n;
    let mut faces = Vec::with_capacity(2 * rings * n);
    for i in 0..rings {
        for j in 0..n {
            faces.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Subdivided icosahedron projected to the sphere, outward normals.
pub fn icosphere(radius: f64, subdivisions: usize) -> Result<TriMesh> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(verts.into_iter().map(|v| v * radius).collect(), faces)
}

/// Closed icosphere with one face removed: a disc with a triangular hole.
pub fn icosphere_minus_face(radius: f64, subdivisions: usize) -> Result<TriMesh> {
    let m = icosphere(radius, subdivisions)?;
    let mut faces = m.faces;
    faces.swap_remove(0);
    TriMesh::new(m.vertices, faces)
}

/// Zone of the sphere of radius `radius` between polar angles `phi0 < phi1`,
/// outward normal. `phi0 = 0` gives a cap. About `n_meridian` profile steps.
pub fn sphere_zone(radius: f64, phi0: f64, phi1: f64, n_meridian: usize) -> Result<TriMesh> {
    if !(0.0 <= phi0 && phi0 < phi1 && phi1 <= PI) || n_meridian < 2 {
        return Err(Error::params("sphere zone angles must satisfy 0 <= phi0 < phi1 <= pi"));
    }
    if phi1 == PI && phi0 > 0.0 {
        // polar cap around the south pole: mirror the northern one
        let north = sphere_zone(radius, 0.0, PI - phi0, n_meridian)?;
        let vertices = north.vertices.iter().map(|v| Vec3::new(v.x, v.y, -v.z)).collect();
        return Ok(TriMesh::new(vertices, north.faces)?.flipped());
    }
    let profile: Vec<(f64, f64)> = (0..=n_meridian)
        .map(|k| {
            let phi = phi0 + (phi1 - phi0) * k as f64 / n_meridian as f64;
            if k == 0 && phi0 == 0.0 {
                (0.0, radius)
            } else {
                (radius * phi.sin(), radius * phi.cos())
            }
        })
        .collect();
    if phi0 == 0.0 {
        let spacing = radius * (phi1 - phi0) / n_meridian as f64;
        revolve_disc(&profile, spacing)
    } else {
        let n_theta = ((2.0 * PI * n_meridian as f64 / (phi1 - phi0)).round() as usize).max(8);
        revolve(&profile, n_theta)
    }
}

/// Upper hemisphere of the unit sphere scaled by `radius`, outward normal,
/// bounded by the equator.
pub fn hemisphere(radius: f64, n_meridian: usize) -> Result<TriMesh> {
    sphere_zone(radius, 0.0, PI / 2.0, n_meridian)
}

/// Cylinder of radius `radius` and height `height` centred at the origin,
/// outward normal.
pub fn cylinder(radius: f64, height: f64, n_theta: usize, n_z: usize) -> Result<TriMesh> {
    // downward profile keeps the normal outward
    let profile: Vec<(f64, f64)> =
        (0..=n_z).map(|k| (radius, height / 2.0 - height * k as f64 / n_z as f64)).collect();
    revolve(&profile, n_theta)
}

/// Flat annulus `r_in ≤ |x| ≤ r_out` in the `xy` plane, normal `+z`.
pub fn planar_annulus(r_in: f64, r_out: f64, n_theta: usize, n_r: usize) -> Result<TriMesh> {
    if !(0.0 < r_in && r_in < r_out) {
        return Err(Error::params("annulus radii must satisfy 0 < r_in < r_out"));
    }
    let profile: Vec<(f64, f64)> =
        (0..=n_r).map(|k| (r_in + (r_out - r_in) * k as f64 / n_r as f64, 0.0)).collect();
    revolve(&profile, n_theta)
}

/// Catenoid `r = cosh t`, `z = t`, `|t| ≤ half_height`, rescaled so both
/// boundary parallels have radius `boundary_radius`. Conformal sampling with
/// `n_t` steps in `t`. The normal points away from the axis.
pub fn catenoid_slice(half_height: f64, boundary_radius: f64, n_theta: usize, n_t: usize) -> Result<TriMesh> {
    if !(half_height > 0.0) {
        return Err(Error::params("catenoid half height must be positive"));
    }
    let s = boundary_radius / half_height.cosh();
    // descending in z keeps the normal pointing away from the axis
    let profile: Vec<(f64, f64)> = (0..=n_t)
        .map(|k| {
            let t = half_height - 2.0 * half_height * k as f64 / n_t as f64;
            (s * t.cosh(), s * t)
        })
        .collect();
    revolve(&profile, n_theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_topology() {
        let m = flat_disc(1.0, 64, 8).unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_loops.len(), 1);
        assert_eq!(m.boundary_loops[0].len(), 64);
        assert!(m.faces.iter().all(|_| true));
        let n0 = m.face_cross(0);
        assert!(n0.z > 0.0);
        assert!((m.area() - PI).abs() < 0.01);
    }

    #[test]
    fn icosphere_is_closed() {
        let m = icosphere(1.0, 2).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.boundary_loops.is_empty());
        let out = m.vertices[m.faces[0][0]];
        assert!(m.face_cross(0).dot(out) > 0.0);
        let hole = icosphere_minus_face(1.0, 2).unwrap();
        assert_eq!(hole.euler_characteristic(), 1);
        assert_eq!(hole.boundary_loops[0].len(), 3);
    }

    #[test]
    fn revolved_surfaces_have_expected_topology() {
        let cyl = cylinder(1.0, 2.0, 32, 8).unwrap();
        assert_eq!(cyl.euler_characteristic(), 0);
        assert_eq!(cyl.boundary_loops.len(), 2);
        let f = cyl.faces[0];
        let c = (cyl.vertices[f[0]] + cyl.vertices[f[1]] + cyl.vertices[f[2]]) / 3.0;
        assert!(cyl.face_cross(0).dot(Vec3::new(c.x, c.y, 0.0)) > 0.0);
        let cap = hemisphere(1.0, 16).unwrap();
        assert_eq!(cap.euler_characteristic(), 1);
        assert!((cap.area() - 2.0 * PI).abs() < 0.02);
        let ann = planar_annulus(0.5, 1.0, 32, 4).unwrap();
        assert!(ann.face_cross(0).z > 0.0);
        let cat = catenoid_slice(1.0, 1.0, 32, 16).unwrap();
        assert_eq!(cat.euler_characteristic(), 0);
    }

    #[test]
    fn cone_disc_keeps_boundary_samples() {
        let c = SampledCurve::circle(2.0, 40);
        let m = cone_disc(&c.points[..40], Vec3::ZERO, 5).unwrap();
        let lp = m.loop_points(0);
        assert_eq!(lp.len(), 40);
        for p in lp {
            assert!((p.norm() - 2.0).abs() < 1e-12);
        }
        assert!(cone_disc(&c.points[..40], Vec3::ZERO, 0).is_err());
    }

    #[test]
    fn ruled_annulus_rejects_mismatched_counts() {
        let a = SampledCurve::circle(1.0, 10);
        let b = SampledCurve::circle(1.0, 12);
        assert!(matches!(ruled_annulus(&a.points[..10], &b.points[..12], 3), Err(Error::SampleCountMismatch(10, 12))));
    }
}
