//! Delaunay surfaces of revolution and the critical nodoidal domains.
//!
//! A surface `X(u,ϑ) = (r(u)e^{iϑ}, z(u))` with Gauss map `ν = (ue^{iϑ}, w)`
//! has constant mean curvature `H` when `ur + Hr² = ϖ` and `dz = r_u dw`.
//! Profiles are parametrized by the angle `ψ` with `u = cos ψ`, `w = sin ψ`,
//! so a path through the poles of the Gauss sphere needs no branch switching.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::meshgen::revolve;
use crate::numeric::finite_difference;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Plane,
    Catenoid,
    Sphere,
    Cylinder,
    Unduloid,
    Nodoid,
}

/// Type of the Delaunay surface with mean curvature `h ≤ 0` and flux `ϖ`.
/// `u_constant` separates the cylinder from the sphere (at `ϖ = 0`) and from
/// the unduloids (at `1 + 4ϖH = 0`).
pub fn classify(h: f64, flux: f64, u_constant: bool) -> Result<SurfaceKind> {
    if !h.is_finite() || !flux.is_finite() || h > 0.0 {
        return Err(Error::params("mean curvature must be finite and non positive"));
    }
    if h == 0.0 {
        return Ok(if flux == 0.0 { SurfaceKind::Plane } else { SurfaceKind::Catenoid });
    }
    if flux < 0.0 {
        return Ok(SurfaceKind::Nodoid);
    }
    if flux == 0.0 {
        return Ok(if u_constant { SurfaceKind::Cylinder } else { SurfaceKind::Sphere });
    }
    let disc = 1.0 + 4.0 * flux * h;
    if disc < 0.0 {
        return Err(Error::params("no Delaunay surface with 1 + 4ϖH < 0"));
    }
    Ok(if disc == 0.0 && u_constant { SurfaceKind::Cylinder } else { SurfaceKind::Unduloid })
}

/// Root of `Hr² + ur - ϖ = 0`. With `c₀ = -H`, `Plus` is
/// `r = (u + √(u² - 4c₀ϖ))/(2c₀)`, the root nodoids use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

pub fn radius_from_u(u: f64, h: f64, flux: f64, branch: Branch) -> Result<f64> {
    let r = if h == 0.0 {
        if u == 0.0 {
            return Err(Error::NonpositiveRadius(f64::INFINITY));
        }
        flux / u
    } else {
        let disc = u * u + 4.0 * h * flux;
        if disc < 0.0 {
            return Err(Error::NegativeDiscriminant);
        }
        let s = match branch {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        };
        (u + s * disc.sqrt()) / (-2.0 * h)
    };
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius(r));
    }
    Ok(r)
}

/// `dr/du` from implicit differentiation of `ur + Hr² = ϖ`.
fn r_u(u: f64, r: f64, h: f64) -> f64 {
    -r / (2.0 * h * r + u)
}

/// Monotone piece of a Gauss-map path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct USegment {
    pub u_from: f64,
    pub u_to: f64,
    /// Sign of `w` inside the segment.
    pub w_sign: i8,
}

/// Path `ψ ↦ (cos ψ, sin ψ)` through the `(u, w)` circle on one root branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPath {
    pub psi_start: f64,
    pub psi_end: f64,
    pub branch: Branch,
}

impl UPath {
    pub fn new(psi_start: f64, psi_end: f64) -> Self {
        UPath { psi_start, psi_end, branch: Branch::Plus }
    }

    /// The path split where `w` changes sign, i.e. where `u = ±1`.
    pub fn segments(&self) -> Vec<USegment> {
        let (a, b) = (self.psi_start.min(self.psi_end), self.psi_start.max(self.psi_end));
        let mut cuts = Vec::new();
        cuts.push(a);
        let mut k = (a / PI).floor() + 1.0;
        while k * PI < b {
            cuts.push(k * PI);
            k += 1.0;
        }
        cuts.push(b);
        if self.psi_end < self.psi_start {
            cuts.reverse();
        }
        cuts.windows(2)
            .map(|c| {
                let mid = 0.5 * (c[0] + c[1]);
                USegment { u_from: c[0].cos(), u_to: c[1].cos(), w_sign: if mid.sin() >= 0.0 { 1 } else { -1 } }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub psi: f64,
    pub u: f64,
    pub r: f64,
    pub z: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayProfile {
    pub h: f64,
    pub flux: f64,
    pub kind: SurfaceKind,
    pub path: UPath,
    pub samples: Vec<ProfileSample>,
}

impl DelaunayProfile {
    /// Largest `|ur + Hr² - ϖ|` over the samples.
    pub fn flux_residual(&self) -> f64 {
        self.samples.iter().map(|s| (s.u * s.r + self.h * s.r * s.r - self.flux).abs()).fold(0.0, f64::max)
    }
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Samples the profile uniformly in `ψ`, starting at height zero.
pub fn profile_from_flux(h: f64, flux: f64, path: UPath, n_samples: usize) -> Result<DelaunayProfile> {
    if n_samples < 2 {
        return Err(Error::params("a profile needs at least two samples"));
    }
    let kind = classify(h, flux, false)?;
    let radius = |psi: f64| radius_from_u(psi.cos(), h, flux, path.branch);
    // dz/dψ = r_u dw/dψ
    let dz = |psi: f64| -> Result<f64> {
        let u = psi.cos();
        Ok(r_u(u, radius(psi)?, h) * psi.cos())
    };
    let step = (path.psi_end - path.psi_start) / (n_samples - 1) as f64;
    let mut samples = Vec::with_capacity(n_samples);
    let mut z = 0.0;
    for i in 0..n_samples {
        let psi = path.psi_start + step * i as f64;
        if i > 0 {
            let mid = psi - 0.5 * step;
            let mut acc = 0.0;
            for (x, wt) in GAUSS5 {
                acc += wt * dz(mid + 0.5 * step * x)?;
            }
            z += 0.5 * step * acc;
        }
        samples.push(ProfileSample { psi, u: psi.cos(), r: radius(psi)?, z, w: psi.sin() });
    }
    Ok(DelaunayProfile { h, flux, kind, path, samples })
}

fn check_critical(params: &EnergyParams) -> Result<()> {
    if !(params.c0 > 0.0) || !(params.alpha > 0.0) || !(params.beta > 0.0) {
        return Err(Error::params("the critical nodoid needs c0 > 0, alpha > 0 and beta > 0"));
    }
    Ok(())
}

/// Flux `ϖ = -c₀α/β` of the nodoid whose `u = 0` parallels have radius
/// `√(α/β)`.
pub fn critical_flux(params: &EnergyParams) -> Result<f64> {
    check_critical(params)?;
    Ok(-params.c0 * params.alpha / params.beta)
}

pub const DEFAULT_PROFILE_SAMPLES: usize = 513;

/// One full period of the critical nodoid, from the bottom `u = 0` parallel
/// around the outer and the inner arc.
pub fn critical_nodoid(params: &EnergyParams) -> Result<DelaunayProfile> {
    if params.b == 0.0 {
        return Err(Error::params("b = 0 makes every Delaunay annulus critical"));
    }
    let flux = critical_flux(params)?;
    profile_from_flux(-params.c0, flux, UPath::new(-PI / 2.0, 3.0 * PI / 2.0), DEFAULT_PROFILE_SAMPLES)
}

/// The four critical domains. `N2` is the convex outer arc, `N1` the inner
/// arc, `N3` an outer arc followed by an inner one and `N4` the inner, outer,
/// inner run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainLabel {
    N1,
    N2,
    N3,
    N4,
}

impl DomainLabel {
    pub const ALL: [DomainLabel; 4] = [DomainLabel::N1, DomainLabel::N2, DomainLabel::N3, DomainLabel::N4];

    pub fn path(self) -> UPath {
        match self {
            DomainLabel::N1 => UPath::new(PI / 2.0, 3.0 * PI / 2.0),
            DomainLabel::N2 => UPath::new(-PI / 2.0, PI / 2.0),
            DomainLabel::N3 => UPath::new(-PI / 2.0, 3.0 * PI / 2.0),
            DomainLabel::N4 => UPath::new(PI / 2.0, 7.0 * PI / 2.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainLabel::N1 => "N1",
            DomainLabel::N2 => "N2",
            DomainLabel::N3 => "N3",
            DomainLabel::N4 => "N4",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodoidDomain {
    pub profile: DelaunayProfile,
    pub label: DomainLabel,
    /// Flux offset of the deformed family; zero for the critical domains.
    pub epsilon: f64,
}

impl NodoidDomain {
    pub fn boundary_radii(&self) -> (f64, f64) {
        let s = &self.profile.samples;
        (s[0].r, s[s.len() - 1].r)
    }

    /// `∫K = 2π(w_end - w_start)`, the signed area of the spherical image.
    pub fn total_curvature(&self) -> f64 {
        let s = &self.profile.samples;
        2.0 * PI * (s[s.len() - 1].w - s[0].w)
    }

    /// Revolved mesh with `n_profile` steps along the profile, oriented by the
    /// Gauss map.
    pub fn mesh(&self, n_profile: usize, n_theta: usize) -> Result<TriMesh> {
        let p = &self.profile;
        let fine = profile_from_flux(p.h, p.flux, p.path, n_profile + 1)?;
        revolve_profile(&fine, n_theta)
    }
}

/// Surface of revolution through the profile samples, with its orientation
/// matched to the Gauss map.
pub fn revolve_profile(profile: &DelaunayProfile, n_theta: usize) -> Result<TriMesh> {
    let rz: Vec<(f64, f64)> = profile.samples.iter().map(|s| (s.r, s.z)).collect();
    let mesh = revolve(&rz, n_theta)?;
    // faces 0 and 1 sit between the first two samples at ϑ ≈ 0
    let s = &profile.samples;
    let (u, w) = (0.5 * (s[0].u + s[1].u), 0.5 * (s[0].w + s[1].w));
    if mesh.face_cross(0).dot(Vec3::new(u, 0.0, w)) < 0.0 {
        Ok(mesh.flipped())
    } else {
        Ok(mesh)
    }
}

pub fn domain(params: &EnergyParams, label: DomainLabel, n_samples: usize) -> Result<NodoidDomain> {
    let flux = critical_flux(params)?;
    let profile = profile_from_flux(-params.c0, flux, label.path(), n_samples)?;
    Ok(NodoidDomain { profile, label, epsilon: 0.0 })
}

pub fn enumerate_domains(params: &EnergyParams) -> Result<Vec<NodoidDomain>> {
    DomainLabel::ALL.iter().map(|&l| domain(params, l, DEFAULT_PROFILE_SAMPLES)).collect()
}

/// Convex annulus with flux `ϖ₀ + ε` bounded by the parallels of radius
/// `r₀ = √(α/β)`, where `u = ε/r₀`.
pub fn sigma_epsilon(params: &EnergyParams, epsilon: f64) -> Result<NodoidDomain> {
    let flux0 = critical_flux(params)?;
    let r0 = params.critical_radius()?;
    // past 2c₀r₀² the parallel of radius r₀ leaves the plus branch
    let limit = r0.min(2.0 * params.c0 * r0 * r0);
    if !(0.0..limit).contains(&epsilon) {
        return Err(Error::params("epsilon must lie in [0, min(r0, 2 c0 r0^2))"));
    }
    let u_star = epsilon / r0;
    let psi = u_star.acos();
    let profile = profile_from_flux(-params.c0, flux0 + epsilon, UPath::new(-psi, psi), DEFAULT_PROFILE_SAMPLES)?;
    Ok(NodoidDomain { profile, label: DomainLabel::N2, epsilon })
}

/// Energy of a domain on a Delaunay surface with `H = -c₀` bounded by two
/// circles of radius `√(α/β)`: `b∫K + 8π√(αβ)`.
pub fn analytic_energy(domain: &NodoidDomain, params: &EnergyParams) -> f64 {
    params.b * domain.total_curvature() + 8.0 * PI * (params.alpha * params.beta).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityEstimate {
    /// `-4πb/r₀²`
    pub analytic: f64,
    /// `(E(2h) - 2E(h) + E(0))/h²` from the closed-form energies.
    pub finite_difference: f64,
    pub step: f64,
}

/// Second derivative of `ε ↦ E[Σ_ε]` at `ε = 0`, in closed form and by
/// differencing [`analytic_energy`] with step `h`. `E` is even in `ε`, so
/// the one-sided difference is second order.
pub fn instability_second_derivative(params: &EnergyParams, h: f64) -> Result<InstabilityEstimate> {
    let r0 = params.critical_radius()?;
    let e = |eps: f64| -> Result<f64> { Ok(analytic_energy(&sigma_epsilon(params, eps)?, params)) };
    let fd = (e(2.0 * h)? - 2.0 * e(h)? + e(0.0)?) / (h * h);
    Ok(InstabilityEstimate { analytic: -4.0 * PI * params.b / (r0 * r0), finite_difference: fd, step: h })
}

/// Largest deviation between the Gauss map `(ue^{iϑ}, w)` and the normal
/// recomputed from the vertices of a mesh built by [`revolve_profile`], using
/// fourth-order differences along meridians and parallels.
pub fn gauss_map_deviation(mesh: &TriMesh, profile: &DelaunayProfile, n_theta: usize) -> f64 {
    let np = profile.samples.len();
    if mesh.vertices.len() != np * n_theta {
        return f64::NAN;
    }
    let flipped = mesh.faces[0][1] != n_theta;
    let mut worst = 0.0f64;
    for j in 0..n_theta {
        let merid: Vec<Vec3> = (0..np).map(|i| mesh.vertices[i * n_theta + j]).collect();
        let d_psi: Vec<Vec3> = {
            let c = |k: usize| finite_difference(&merid.iter().map(|p| p[k]).collect::<Vec<_>>(), 1.0, false);
            let (x, y, z) = (c(0), c(1), c(2));
            (0..np).map(|i| Vec3::new(x[i], y[i], z[i])).collect()
        };
        for (i, s) in profile.samples.iter().enumerate() {
            let at = |k: isize| mesh.vertices[i * n_theta + (j as isize + k).rem_euclid(n_theta as isize) as usize];
            let d_theta = ((at(1) - at(-1)) * 8.0 - (at(2) - at(-2))) / 12.0;
            let mut nu = d_psi[i].cross(d_theta).normalized();
            if flipped {
                nu = -nu;
            }
            let t = 2.0 * PI * j as f64 / n_theta as f64;
            let exact = Vec3::new(s.u * t.cos(), s.u * t.sin(), s.w);
            worst = worst.max((nu - exact).norm());
        }
    }
    worst
}
