#![allow(dead_code)]

use std::f64::consts::PI;

use helfrich_core::curve::{Jet, SampledCurve};
use helfrich_core::delaunay::{self, DomainLabel};
use helfrich_core::energy::EnergyParams;
use helfrich_core::mesh::TriMesh;
use helfrich_core::meshgen;
use helfrich_core::Vec3;

pub fn unit_params(a: f64, c0: f64, b: f64) -> EnergyParams {
    EnergyParams::new(a, c0, b, 1.0, 1.0).unwrap()
}

/// Meshes with boundary used across the suites.
pub fn suite() -> Vec<(&'static str, TriMesh)> {
    let crit = unit_params(1.0, 1.0, 1.0);
    let mut out = vec![
        ("flat disc", meshgen::flat_disc(1.0, 64, 12).unwrap()),
        ("flat disc r2", meshgen::flat_disc(2.0, 64, 12).unwrap()),
        ("hemisphere", meshgen::hemisphere(1.0, 48).unwrap()),
        ("spherical cap", meshgen::sphere_zone(2.0, 0.0, PI / 6.0, 48).unwrap()),
        ("sphere minus cap", meshgen::sphere_zone(2.0, PI / 6.0, PI, 96).unwrap()),
        ("spherical annulus", meshgen::sphere_zone(2.0, PI / 6.0, 5.0 * PI / 6.0, 96).unwrap()),
        ("catenoid", meshgen::catenoid_slice(0.5, 1.0, 128, 64).unwrap()),
        ("long catenoid", meshgen::catenoid_slice(2.0, 1.0, 128, 128).unwrap()),
        ("cylinder", meshgen::cylinder(1.0, 2.0, 64, 32).unwrap()),
        ("planar annulus", meshgen::planar_annulus(0.5, 1.5, 64, 16).unwrap()),
    ];
    for label in DomainLabel::ALL {
        let d = delaunay::domain(&crit, label, 129).unwrap();
        out.push((label.name(), d.mesh(128, 128).unwrap()));
    }
    out.push(("sigma", delaunay::sigma_epsilon(&crit, 0.25).unwrap().mesh(128, 128).unwrap()));
    out
}

/// Closed trigonometric curve `Σ_k (a_k cos kt + b_k sin kt)` per coordinate,
/// on top of an ellipse so that it stays regular for small coefficients.
#[derive(Debug, Clone)]
pub struct Fourier {
    pub axes: (f64, f64),
    /// `(k, a, b)` with `a, b` vectors.
    pub modes: Vec<(u32, Vec3, Vec3)>,
}

impl Fourier {
    pub fn jet(&self, t: f64) -> Jet {
        let (s, c) = t.sin_cos();
        let (ax, ay) = self.axes;
        let mut j = [
            Vec3::new(ax * c, ay * s, 0.0),
            Vec3::new(-ax * s, ay * c, 0.0),
            Vec3::new(-ax * c, -ay * s, 0.0),
            Vec3::new(ax * s, -ay * c, 0.0),
        ];
        for &(k, a, b) in &self.modes {
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            j[0] += a * c + b * s;
            j[1] += (b * c - a * s) * kf;
            j[2] += (a * c + b * s) * (-kf * kf);
            j[3] += (a * s - b * c) * (kf * kf * kf);
        }
        j
    }

    pub fn sample(&self, n: usize) -> SampledCurve {
        let f = self.clone();
        SampledCurve::from_parametric(move |t| f.jet(t), 2.0 * PI, n).unwrap()
    }
}

pub mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn vec3(scale: f64) -> impl Strategy<Value = Vec3> {
        (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    /// Closed curves whose perturbation is small against the ellipse, so they
    /// stay regular.
    pub fn fourier() -> impl Strategy<Value = Fourier> {
        (0.7..1.5f64, 0.7..1.5f64, prop::collection::vec((2u32..5, vec3(0.03), vec3(0.03)), 0..2))
            .prop_map(|(ax, ay, modes)| Fourier { axes: (ax, ay), modes })
    }
}
