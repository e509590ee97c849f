//! The Euler–Helfrich energy `∫(a(H+c₀)² + bK) + ∮(ακ² + β)`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{boundary_darboux_with, curvature_field, integrate_field, CurvatureField, SurfaceIntegrals};
use crate::mesh::TriMesh;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Moduli of the energy. `c0` uses the convention in which the unit sphere
/// with outward normal has `H = -1`, so a sphere of radius `1/c0` has
/// `H + c0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    pub a: f64,
    pub c0: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl EnergyParams {
    pub fn new(a: f64, c0: f64, b: f64, alpha: f64, beta: f64) -> Result<Self> {
        if ![a, c0, b, alpha, beta].iter().all(|v| v.is_finite()) {
            return Err(Error::params("energy moduli must be finite"));
        }
        if !(a > 0.0) || !(alpha > 0.0) {
            return Err(Error::params("a and alpha must be positive"));
        }
        Ok(EnergyParams { a, c0, b, alpha, beta })
    }

    /// `E̲ = 2√(αβ) - |b|`; requires `β > 0`.
    pub fn e_underline(&self) -> f64 {
        2.0 * (self.alpha * self.beta).sqrt() - self.b.abs()
    }

    /// Radius `√(α/β)` of the critical boundary circle.
    pub fn critical_radius(&self) -> Result<f64> {
        if !(self.beta > 0.0) {
            return Err(Error::params("beta must be positive for a critical circle"));
        }
        Ok((self.alpha / self.beta).sqrt())
    }
}

/// Surface topologies with known bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Disc,
    Annulus,
}

impl Topology {
    /// Disc or annulus from the Euler characteristic and the loop count.
    pub fn of(mesh: &TriMesh) -> Option<Topology> {
        match (mesh.euler_characteristic(), mesh.boundary_loops.len()) {
            (1, 1) => Some(Topology::Disc),
            (0, 2) => Some(Topology::Annulus),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Disc => "disc",
            Topology::Annulus => "annulus",
        }
    }
}

/// Whether and how a bound is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attainment {
    Minimum,
    /// Approached by a sequence, never reached.
    InfimumOnly,
    Unbounded,
    /// `E_D` bounds the energy but no constant mean curvature disc is
    /// critical, so it cannot be attained.
    NoCmcCriticalDisc,
    /// A valid lower bound whose sharpness is not settled.
    LowerBoundOnly,
}

impl Attainment {
    pub fn label(self) -> &'static str {
        match self {
            Attainment::Minimum => "Minimum",
            Attainment::InfimumOnly => "InfimumOnly",
            Attainment::Unbounded => "Unbounded",
            Attainment::NoCmcCriticalDisc => "no CMC critical disc exists",
            Attainment::LowerBoundOnly => "LowerBoundOnly",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundClassification {
    pub topology: Topology,
    pub e_underline: f64,
    pub bound: Option<f64>,
    pub bounded_below: bool,
    pub case_label: &'static str,
    pub attained: Attainment,
    /// Surface or sequence realizing the bound.
    pub witness: Option<&'static str>,
}

fn classified(
    topology: Topology,
    e_underline: f64,
    bound: f64,
    case_label: &'static str,
    attained: Attainment,
    witness: Option<&'static str>,
) -> BoundClassification {
    BoundClassification { topology, e_underline, bound: Some(bound), bounded_below: true, case_label, attained, witness }
}

fn unbounded(topology: Topology, e_underline: f64, case_label: &'static str) -> BoundClassification {
    BoundClassification {
        topology,
        e_underline,
        bound: None,
        bounded_below: false,
        case_label,
        attained: Attainment::Unbounded,
        witness: None,
    }
}

/// Infimum or lower bound of the energy over discs or annuli.
pub fn lower_bound(params: &EnergyParams, topology: Topology) -> Result<BoundClassification> {
    let EnergyParams { a, c0, b, alpha, beta } = *params;
    if c0 < 0.0 {
        return Err(Error::OutOfScope("c0 < 0 is outside the classified range".to_string()));
    }
    if !(beta > 0.0) {
        return Err(Error::OutOfScope("beta <= 0 is outside the classified range".to_string()));
    }
    let e = params.e_underline();
    let s = (alpha * beta).sqrt();
    use Attainment::*;
    let t = topology;
    Ok(match topology {
        Topology::Annulus if c0 > 0.0 => {
            if b == 0.0 {
                classified(t, e, 8.0 * PI * s, "(ii)", Minimum, Some("multiple solutions"))
            } else if e < 0.0 {
                unbounded(t, e, "lemma (ii)")
            } else if b > 0.0 {
                classified(t, e, 4.0 * PI * (2.0 * s - b), "(i)", Minimum, Some("N1 and N4"))
            } else {
                classified(t, e, 4.0 * PI * (2.0 * s + b), "(iii)", Minimum, Some("N2"))
            }
        }
        Topology::Annulus => {
            if b > 0.0 {
                if e >= 0.0 {
                    classified(t, e, 4.0 * PI * (2.0 * s - b), "(iv)", InfimumOnly, Some("limit of catenoid domains"))
                } else {
                    unbounded(t, e, "lemma (iv)")
                }
            } else if b == 0.0 {
                classified(t, e, 8.0 * PI * s, "(v)", Minimum, Some("multiple solutions"))
            } else if a + b > 0.0 {
                classified(t, e, 8.0 * PI * s, "(viii)", InfimumOnly, Some("limit of planar annuli"))
            } else if a + b == 0.0 {
                classified(t, e, 8.0 * PI * s, "(vii)", Minimum, Some("spherical annulus"))
            } else if e >= -a {
                classified(t, e, 4.0 * PI * (2.0 * s + a + b), "(vi)", InfimumOnly, Some("limit of spherical annuli"))
            } else {
                unbounded(t, e, "lemma (iii)")
            }
        }
        Topology::Disc if c0 > 0.0 => {
            if e < 0.0 {
                unbounded(t, e, "lemma (ii)")
            } else if b == 0.0 {
                if c0 * c0 <= beta / alpha {
                    classified(t, e, 4.0 * PI * s, "E_D, b = 0", Minimum, Some("spherical cap"))
                } else {
                    classified(t, e, 4.0 * PI * s, "E_D, b = 0, no cap", LowerBoundOnly, None)
                }
            } else {
                classified(t, e, 2.0 * PI * (e + b), "E_D", NoCmcCriticalDisc, None)
            }
        }
        Topology::Disc => {
            if b > 0.0 {
                if e >= 0.0 {
                    classified(t, e, 4.0 * PI * s, "disc (iii)", Minimum, Some("planar disc"))
                } else {
                    unbounded(t, e, "lemma (iv)")
                }
            } else if a + b > 0.0 {
                classified(t, e, 4.0 * PI * s, "disc (iv)", Minimum, Some("planar disc"))
            } else if a + b == 0.0 {
                classified(t, e, 4.0 * PI * s, "disc (ii)", Minimum, Some("spherical cap"))
            } else if e >= -a {
                classified(t, e, 2.0 * PI * (2.0 * s + 2.0 * (a + b)), "disc (i)", InfimumOnly, Some("limit of spherical caps"))
            } else {
                unbounded(t, e, "lemma (iii)")
            }
        }
    })
}

/// Energy of one boundary loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopEnergy {
    pub length: f64,
    /// `α∮κ²`
    pub bending: f64,
    /// `βL`
    pub length_term: f64,
    pub total_geodesic_curvature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `a∫(H+c₀)²`
    pub helfrich_term: f64,
    /// `b∫K`
    pub gauss_term: f64,
    pub boundary_bending: f64,
    pub boundary_length_term: f64,
    pub total: f64,
    pub loops: Vec<LoopEnergy>,
    pub integrals: SurfaceIntegrals,
    /// `total - bound` when the topology has a finite bound.
    pub bound_gap: Option<f64>,
}

pub fn evaluate_energy(mesh: &TriMesh, params: &EnergyParams) -> Result<EnergyReport> {
    let field = curvature_field(mesh)?;
    evaluate_with(mesh, &field, params)
}

/// As [`evaluate_energy`], reusing a computed curvature field.
pub fn evaluate_with(mesh: &TriMesh, field: &CurvatureField, params: &EnergyParams) -> Result<EnergyReport> {
    let integrals = integrate_field(field, params.c0);
    let mut loops = Vec::with_capacity(mesh.boundary_loops.len());
    for l in 0..mesh.boundary_loops.len() {
        let frame = boundary_darboux_with(mesh, field, l)?;
        let length = frame.length();
        loops.push(LoopEnergy {
            length,
            bending: params.alpha * frame.total_squared_curvature(),
            length_term: params.beta * length,
            total_geodesic_curvature: frame.integrate(|s| s.kappa_g),
        });
    }
    let helfrich_term = params.a * integrals.total_h_plus_c0_sq;
    let gauss_term = params.b * integrals.total_k;
    let boundary_bending: f64 = loops.iter().map(|l| l.bending).sum();
    let boundary_length_term: f64 = loops.iter().map(|l| l.length_term).sum();
    let total = helfrich_term + gauss_term + boundary_bending + boundary_length_term;
    let bound_gap = Topology::of(mesh)
        .and_then(|t| lower_bound(params, t).ok())
        .and_then(|c| c.bound)
        .map(|b| total - b);
    Ok(EnergyReport {
        helfrich_term,
        gauss_term,
        boundary_bending,
        boundary_length_term,
        total,
        loops,
        integrals,
        bound_gap,
    })
}

/// Relative defect of `2ac₀∫(H+c₀) + βL = α∮κ²`, which holds on every
/// critical surface.
pub fn rescaling_identity_residual(mesh: &TriMesh, params: &EnergyParams) -> Result<f64> {
    let field = curvature_field(mesh)?;
    rescaling_residual_with(mesh, &field, params)
}

pub fn rescaling_residual_with(mesh: &TriMesh, field: &CurvatureField, params: &EnergyParams) -> Result<f64> {
    let integrals = integrate_field(field, params.c0);
    let (mut length, mut bending) = (0.0, 0.0);
    for l in 0..mesh.boundary_loops.len() {
        let frame = boundary_darboux_with(mesh, field, l)?;
        length += frame.length();
        bending += frame.total_squared_curvature();
    }
    let lhs = 2.0 * params.a * params.c0 * integrals.total_h_offset + params.beta * length;
    let rhs = params.alpha * bending;
    Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + f64::MIN_POSITIVE))
}

/// Normalized boundary Euler–Lagrange residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElResiduals {
    /// `a(H+c₀) + bκ_n`
    pub r2: f64,
    /// `J'·ν - a∂_nH + bτ_g'`
    pub r3: f64,
    /// `J'·n + a(H+c₀)² + bK`
    pub r4: f64,
}

/// Each residual is the largest sum over the samples divided by the largest
/// magnitude of its terms, floored by the scale a circle of the loop's length
/// would produce.
pub fn el_boundary_residuals(mesh: &TriMesh, params: &EnergyParams) -> Result<ElResiduals> {
    let field = curvature_field(mesh)?;
    el_residuals_with(mesh, &field, params)
}

pub fn el_residuals_with(mesh: &TriMesh, field: &CurvatureField, params: &EnergyParams) -> Result<ElResiduals> {
    let EnergyParams { a, c0, b, alpha, beta } = *params;
    let mut out = ElResiduals { r2: 0.0, r3: 0.0, r4: 0.0 };
    for l in 0..mesh.boundary_loops.len() {
        let frame = boundary_darboux_with(mesh, field, l)?;
        let k_ref = 2.0 * PI / frame.length();
        let floor2 = a * k_ref;
        let floor34 = (alpha * k_ref * k_ref + beta.abs()) * k_ref;
        let (mut s2, mut s3, mut s4) = (0.0f64, 0.0f64, 0.0f64);
        let (mut m2, mut m3, mut m4) = (floor2, floor34, floor34);
        for s in &frame.samples {
            // J' = A N + B_c B in the Frenet frame
            let big_a = 2.0 * alpha * s.kappa_second + (alpha * s.kappa * s.kappa - beta - 2.0 * alpha * s.tau * s.tau) * s.kappa;
            let big_b = 2.0 * alpha * (2.0 * s.kappa_prime * s.tau + s.kappa * s.tau_prime);
            let dj = s.normal * big_a + s.binormal * big_b;
            let h = s.mean + c0;
            let t2 = [a * h, b * s.kappa_n];
            let t3 = [dj.dot(s.nu), -a * s.dn_mean, b * s.tau_g_prime];
            let t4 = [dj.dot(s.n), a * h * h, b * s.gauss];
            s2 = s2.max(t2.iter().sum::<f64>().abs());
            s3 = s3.max(t3.iter().sum::<f64>().abs());
            s4 = s4.max(t4.iter().sum::<f64>().abs());
            m2 = t2.iter().fold(m2, |m, v| m.max(v.abs()));
            m3 = t3.iter().fold(m3, |m, v| m.max(v.abs()));
            m4 = t4.iter().fold(m4, |m, v| m.max(v.abs()));
        }
        out.r2 = out.r2.max(s2 / m2);
        out.r3 = out.r3.max(s3 / m3);
        out.r4 = out.r4.max(s4 / m4);
    }
    Ok(out)
}

/// Energy with `a = -b` and `c₀ = 0`, where the surface term is
/// `a∫(H² - K)`.
pub fn willmore_case_check(mesh: &TriMesh, params: &EnergyParams) -> Result<EnergyReport> {
    if params.c0 != 0.0 || params.a != -params.b {
        return Err(Error::ParameterMismatch("the Willmore case needs a = -b and c0 = 0".to_string()));
    }
    evaluate_energy(mesh, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;

    fn p(a: f64, c0: f64, b: f64) -> EnergyParams {
        EnergyParams::new(a, c0, b, 1.0, 1.0).unwrap()
    }

    #[test]
    fn annulus_with_positive_spontaneous_curvature() {
        let c = lower_bound(&p(1.0, 1.0, 1.0), Topology::Annulus).unwrap();
        assert_eq!(c.case_label, "(i)");
        assert_eq!(c.attained, Attainment::Minimum);
        assert!((c.bound.unwrap() - 4.0 * PI).abs() < 1e-12);
        let c = lower_bound(&p(1.0, 1.0, 3.0), Topology::Annulus).unwrap();
        assert!(!c.bounded_below);
        assert_eq!(c.attained, Attainment::Unbounded);
    }

    #[test]
    fn disc_without_spontaneous_curvature() {
        let c = lower_bound(&p(1.0, 0.0, -2.0), Topology::Disc).unwrap();
        assert_eq!(c.attained, Attainment::InfimumOnly);
        assert!(c.bound.unwrap().abs() < 1e-12);
        let c = lower_bound(&p(1.0, 0.0, 2.5), Topology::Disc).unwrap();
        assert_eq!(c.attained, Attainment::Unbounded);
    }

    #[test]
    fn disc_with_gaussian_modulus_has_no_critical_cmc_disc() {
        let c = lower_bound(&p(1.0, 1.0, 0.5), Topology::Disc).unwrap();
        assert_eq!(c.attained, Attainment::NoCmcCriticalDisc);
        assert!((c.bound.unwrap() - 2.0 * PI * 2.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_scope_parameters() {
        assert!(matches!(lower_bound(&p(1.0, -1.0, 0.0), Topology::Disc), Err(Error::OutOfScope(_))));
        let q = EnergyParams::new(1.0, 0.0, 0.0, 1.0, -1.0).unwrap();
        assert!(matches!(lower_bound(&q, Topology::Annulus), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn flat_unit_disc_energy() {
        let m = meshgen::flat_disc(1.0, 96, 12).unwrap();
        let r = evaluate_energy(&m, &p(1.0, 0.0, 1.0)).unwrap();
        assert!((r.total - 4.0 * PI).abs() < 1e-6, "{}", r.total);
        assert!(r.helfrich_term.abs() < 1e-12);
    }

    #[test]
    fn rescaling_residual_of_off_critical_disc() {
        let m = meshgen::flat_disc(2.0, 96, 12).unwrap();
        let r = rescaling_identity_residual(&m, &p(1.0, 0.0, 0.0)).unwrap();
        assert!((r - 0.6).abs() < 1e-6, "{r}");
    }

    #[test]
    fn willmore_case_needs_matching_moduli() {
        let m = meshgen::flat_disc(1.0, 32, 4).unwrap();
        assert!(matches!(willmore_case_check(&m, &p(1.0, 0.0, 0.0)), Err(Error::ParameterMismatch(_))));
        assert!(willmore_case_check(&m, &p(1.0, 0.0, -1.0)).is_ok());
    }
}
