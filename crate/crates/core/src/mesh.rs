//! Oriented triangle meshes with boundary loops.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Consistently oriented triangle mesh.
///
/// Boundary loops follow the direction in which their edges are traversed by
/// the incident faces. With `ν` the face orientation normal and `T` the loop
/// tangent, `T×ν` then points out of the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub boundary_loops: Vec<Vec<usize>>,
    /// Vertices the flow may not move. Defaults to the boundary.
    pub fixed_mask: Vec<bool>,
}

impl TriMesh {
    /// Validates the connectivity and extracts the boundary loops.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mut mesh = TriMesh { vertices, faces, boundary_loops: Vec::new(), fixed_mask: Vec::new() };
        mesh.boundary_loops = mesh.extract_loops()?;
        mesh.check_faces()?;
        mesh.fixed_mask = mesh.boundary_mask();
        Ok(mesh)
    }

    /// Re-runs every structural check on the current data.
    pub fn validate(&self) -> Result<()> {
        if self.fixed_mask.len() != self.vertices.len() {
            return Err(Error::InvalidMesh(format!(
                "fixed mask has {} entries for {} vertices",
                self.fixed_mask.len(),
                self.vertices.len()
            )));
        }
        let loops = self.extract_loops()?;
        if loops.len() != self.boundary_loops.len() {
            return Err(Error::InvalidMesh("stored boundary loops are stale".into()));
        }
        self.check_faces()
    }

    fn check_faces(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(Error::InvalidMesh("no faces".into()));
        }
        let areas: Vec<f64> = (0..self.faces.len()).map(|f| self.face_area(f)).collect();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        for (f, a) in areas.iter().enumerate() {
            if !(*a > 1e-14 * mean) {
                return Err(Error::InvalidMesh(format!("face {f} is degenerate")));
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex".into()));
        }
        Ok(())
    }

    /// Sorted undirected edges with the faces using them, checking manifoldness
    /// and orientation on the way.
    fn edge_table(&self) -> Result<Vec<(usize, usize, usize, bool)>> {
        let nv = self.vertices.len();
        let mut half = Vec::with_capacity(3 * self.faces.len());
        for (f, tri) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a >= nv || b >= nv {
                    return Err(Error::InvalidMesh(format!("face {f} indexes past the vertex array")));
                }
                if a == b || tri[(k + 2) % 3] == a {
                    return Err(Error::InvalidMesh(format!("face {f} repeats a vertex")));
                }
                half.push((a.min(b), a.max(b), f, a < b));
            }
        }
        half.sort_unstable();
        let mut i = 0;
        while i < half.len() {
            let mut j = i + 1;
            while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
                j += 1;
            }
            match j - i {
                1 => {}
                2 if half[i].3 != half[i + 1].3 => {}
                2 => {
                    return Err(Error::InvalidMesh(format!(
                        "faces {} and {} disagree in orientation",
                        half[i].2,
                        half[i + 1].2
                    )))
                }
                _ => return Err(Error::InvalidMesh(format!("edge {}-{} has {} faces", half[i].0, half[i].1, j - i))),
            }
            i = j;
        }
        Ok(half)
    }

    fn extract_loops(&self) -> Result<Vec<Vec<usize>>> {
        let half = self.edge_table()?;
        let nv = self.vertices.len();
        let mut next = vec![usize::MAX; nv];
        let mut count = 0;
        let mut i = 0;
        while i < half.len() {
            let paired = i + 1 < half.len() && half[i + 1].0 == half[i].0 && half[i + 1].1 == half[i].1;
            if paired {
                i += 2;
                continue;
            }
            let (lo, hi, _, forward) = half[i];
            let (a, b) = if forward { (lo, hi) } else { (hi, lo) };
            if next[a] != usize::MAX {
                return Err(Error::InvalidMesh(format!("vertex {a} is pinched between boundary loops")));
            }
            next[a] = b;
            count += 1;
            i += 1;
        }
        let mut seen = vec![false; nv];
        let mut loops = Vec::new();
        for start in 0..nv {
            if next[start] == usize::MAX || seen[start] {
                continue;
            }
            let mut lp = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                lp.push(v);
                v = next[v];
                if v == usize::MAX {
                    return Err(Error::InvalidMesh("open boundary chain".into()));
                }
            }
            if v != start {
                return Err(Error::InvalidMesh("boundary chain does not close".into()));
            }
            loops.push(lp);
        }
        debug_assert_eq!(loops.iter().map(Vec::len).sum::<usize>(), count);
        Ok(loops)
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for lp in &self.boundary_loops {
            for &v in lp {
                mask[v] = true;
            }
        }
        mask
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// `V - E + F`, counting only vertices used by some face.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for t in &self.faces {
            for &v in t {
                used[v] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Twice the area vector of face `f`.
    pub fn face_cross(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(pc - pa)
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Faces incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (f, t) in self.faces.iter().enumerate() {
            for &v in t {
                out[v].push(f);
            }
        }
        out
    }

    /// Sorted neighbour lists.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for t in &self.faces {
            for k in 0..3 {
                out[t[k]].push(t[(k + 1) % 3]);
                out[t[k]].push(t[(k + 2) % 3]);
            }
        }
        for n in &mut out {
            n.sort_unstable();
            n.dedup();
        }
        out
    }

    pub fn min_edge_length(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for v in &self.vertices {
            lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (hi - lo).norm()
    }

    /// Copy scaled by `sigma` about the origin.
    pub fn scaled(&self, sigma: f64) -> Self {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = *v * sigma;
        }
        m
    }

    /// Copy with every face reversed, which flips the normal and the loops.
    pub fn flipped(&self) -> Self {
        let mut m = self.clone();
        for t in &mut m.faces {
            t.swap(1, 2);
        }
        for lp in &mut m.boundary_loops {
            lp.reverse();
        }
        m
    }

    /// Flips interior edges whose opposite angles sum past `π`, skipping
    /// flips that would fold the surface or duplicate an edge. Returns the
    /// number of flips. Boundary loops and positions are unchanged.
    pub fn delaunay_flips(&mut self, max_passes: usize) -> usize {
        let x = &self.vertices;
        let angle_at = |k: usize, i: usize, j: usize| {
            let (u, v) = (x[i] - x[k], x[j] - x[k]);
            u.cross(v).norm().atan2(u.dot(v))
        };
        let mut total = 0;
        for _ in 0..max_passes {
            let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for (f, t) in self.faces.iter().enumerate() {
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    edges.entry((a.min(b), a.max(b))).or_default().push(f);
                }
            }
            let mut valence = vec![0usize; x.len()];
            for &(a, b) in edges.keys() {
                valence[a] += 1;
                valence[b] += 1;
            }
            let mut live: BTreeSet<(usize, usize)> = edges.keys().copied().collect();
            let mut touched = vec![false; self.faces.len()];
            let mut flips = 0;
            let keys: Vec<(usize, usize)> = edges.keys().copied().collect();
            for (a, b) in keys {
                let fs = &edges[&(a, b)];
                if fs.len() != 2 || touched[fs[0]] || touched[fs[1]] {
                    continue;
                }
                let (f1, f2) = (fs[0], fs[1]);
                // orient so that f1 runs i -> j
                let t1 = self.faces[f1];
                let r = (0..3).find(|&r| {
                    let (p, q) = (t1[r], t1[(r + 1) % 3]);
                    (p, q) == (a, b) || (p, q) == (b, a)
                });
                let Some(r) = r else { continue };
                let (i, j, k) = (t1[r], t1[(r + 1) % 3], t1[(r + 2) % 3]);
                let t2 = self.faces[f2];
                let Some(l) = t2.iter().copied().find(|&v| v != i && v != j) else { continue };
                if k == l || live.contains(&(k.min(l), k.max(l))) || valence[i] < 5 || valence[j] < 5 {
                    continue;
                }
                if angle_at(k, i, j) + angle_at(l, i, j) <= PI + 1e-9 {
                    continue;
                }
                let old = (x[j] - x[i]).cross(x[k] - x[i]) + (x[i] - x[j]).cross(x[l] - x[j]);
                let n1 = (x[i] - x[k]).cross(x[l] - x[k]);
                let n2 = (x[j] - x[l]).cross(x[k] - x[l]);
                if n1.dot(n2) <= 0.0 || n1.dot(old) <= 0.0 || n2.dot(old) <= 0.0 {
                    continue;
                }
                self.faces[f1] = [k, i, l];
                self.faces[f2] = [l, j, k];
                touched[f1] = true;
                touched[f2] = true;
                live.remove(&(a, b));
                live.insert((k.min(l), k.max(l)));
                valence[i] -= 1;
                valence[j] -= 1;
                valence[k] += 1;
                valence[l] += 1;
                flips += 1;
            }
            total += flips;
            if flips == 0 {
                break;
            }
        }
        total
    }

    /// Deletes free interior vertices of valence three, replacing their fan
    /// with a single triangle. Returns the number of removed vertices.
    pub fn remove_valence_three(&mut self) -> usize {
        let vf = self.vertex_faces();
        let boundary = self.boundary_mask();
        let mut dead_vertex = vec![false; self.vertices.len()];
        let mut dead_face = vec![false; self.faces.len()];
        let mut added = Vec::new();
        for v in 0..self.vertices.len() {
            if boundary[v] || self.fixed_mask[v] || vf[v].len() != 3 || vf[v].iter().any(|&f| dead_face[f]) {
                continue;
            }
            // ring successor map a -> b from faces [v, a, b]
            let mut next = [(0usize, 0usize); 3];
            for (slot, &f) in vf[v].iter().enumerate() {
                let t = self.faces[f];
                let r = (0..3).find(|&r| t[r] == v).unwrap_or(0);
                next[slot] = (t[(r + 1) % 3], t[(r + 2) % 3]);
            }
            let (a, b) = next[0];
            let Some(&(_, c)) = next.iter().find(|e| e.0 == b) else { continue };
            if !next.iter().any(|e| *e == (c, a)) || dead_vertex[a] || dead_vertex[b] || dead_vertex[c] {
                continue;
            }
            dead_vertex[v] = true;
            for &f in &vf[v] {
                dead_face[f] = true;
            }
            added.push([a, b, c]);
        }
        let removed = dead_vertex.iter().filter(|&&d| d).count();
        if removed == 0 {
            return 0;
        }
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::with_capacity(self.vertices.len() - removed);
        let mut fixed = Vec::with_capacity(vertices.capacity());
        for (i, &x) in self.vertices.iter().enumerate() {
            if !dead_vertex[i] {
                map[i] = vertices.len();
                vertices.push(x);
                fixed.push(self.fixed_mask[i]);
            }
        }
        let faces = self
            .faces
            .iter()
            .enumerate()
            .filter(|(f, _)| !dead_face[*f])
            .map(|(_, t)| *t)
            .chain(added)
            .map(|t| [map[t[0]], map[t[1]], map[t[2]]])
            .collect();
        for lp in &mut self.boundary_loops {
            for v in lp.iter_mut() {
                *v = map[*v];
            }
        }
        self.vertices = vertices;
        self.faces = faces;
        self.fixed_mask = fixed;
        removed
    }

    /// Positions of the vertices of one boundary loop.
    pub fn loop_points(&self, l: usize) -> Vec<Vec3> {
        self.boundary_loops[l].iter().map(|&v| self.vertices[v]).collect()
    }
}
