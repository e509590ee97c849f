//! JSON reports and reproduction summaries.

use serde::Serialize;
use sha2::{Digest, Sha256};

use helfrich_core::energy::{
    el_boundary_residuals, evaluate_energy, lower_bound, rescaling_identity_residual, BoundClassification,
    EnergyParams, Topology,
};
use helfrich_core::geometry::gauss_bonnet_residual;
use helfrich_core::mesh::TriMesh;

use crate::error::Result;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamsJson {
    pub a: f64,
    pub c0: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl From<&EnergyParams> for ParamsJson {
    fn from(p: &EnergyParams) -> Self {
        ParamsJson { a: p.a, c0: p.c0, b: p.b, alpha: p.alpha, beta: p.beta }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Defects {
    pub dz: f64,
    pub dtheta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub mu: f64,
    pub lambda: f64,
    pub p: u32,
    pub q: u32,
    pub d: f64,
    pub e: f64,
    pub period: f64,
    pub length: f64,
    pub defects: Defects,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainReport {
    pub label: String,
    #[serde(rename = "H")]
    pub h: f64,
    pub flux: f64,
    pub boundary_radius: f64,
    pub total_curvature_analytic: f64,
    pub total_curvature_discrete: f64,
    pub energy_analytic: f64,
    pub energy_discrete: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundJson {
    pub topology: &'static str,
    pub e_underline: f64,
    pub bound: Option<f64>,
    pub bounded_below: bool,
    pub case: &'static str,
    pub attained: &'static str,
    pub witness: Option<&'static str>,
}

impl From<&BoundClassification> for BoundJson {
    fn from(c: &BoundClassification) -> Self {
        BoundJson {
            topology: c.topology.name(),
            e_underline: c.e_underline,
            bound: c.bound,
            bounded_below: c.bounded_below,
            case: c.case_label,
            attained: c.attained.label(),
            witness: c.witness,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Terms {
    pub helfrich: f64,
    pub gauss: f64,
    pub boundary_bending: f64,
    pub boundary_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRef {
    pub value: Option<f64>,
    pub case: &'static str,
    pub attained: &'static str,
}

/// Boundary residuals are absent when the loops are too coarse for the
/// Darboux frame.
#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub el2: Option<f64>,
    pub el3: Option<f64>,
    pub el4: Option<f64>,
    pub rescaling: Option<f64>,
    pub gauss_bonnet: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyJson {
    pub params: ParamsJson,
    pub terms: Terms,
    pub total: f64,
    pub bound: Option<BoundRef>,
    pub residuals: Residuals,
}

pub fn energy_json(mesh: &TriMesh, params: &EnergyParams) -> Result<EnergyJson> {
    let r = evaluate_energy(mesh, params)?;
    let bound = Topology::of(mesh).and_then(|t| lower_bound(params, t).ok()).map(|c| BoundRef {
        value: c.bound,
        case: c.case_label,
        attained: c.attained.label(),
    });
    let el = el_boundary_residuals(mesh, params).ok();
    Ok(EnergyJson {
        params: params.into(),
        terms: Terms {
            helfrich: r.helfrich_term,
            gauss: r.gauss_term,
            boundary_bending: r.boundary_bending,
            boundary_length: r.boundary_length_term,
        },
        total: r.total,
        bound,
        residuals: Residuals {
            el2: el.map(|e| e.r2),
            el3: el.map(|e| e.r3),
            el4: el.map(|e| e.r4),
            rescaling: rescaling_identity_residual(mesh, params).ok(),
            gauss_bonnet: gauss_bonnet_residual(mesh),
        },
    })
}

/// How a check compares `computed` against `expected` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed - expected| <= tolerance·|expected|`
    Relative,
    /// `|computed - expected| <= tolerance`
    Absolute,
    /// `computed < tolerance`; `expected` is the ideal value 0.
    Below,
    /// `computed > tolerance`
    Above,
    /// Recorded without a verdict.
    Reported,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Option<f64>,
    pub computed: f64,
    pub tolerance: Option<f64>,
    pub comparison: Comparison,
    pub pass: Option<bool>,
}

impl Check {
    pub fn relative(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        let pass = (computed - expected).abs() <= tolerance * expected.abs();
        Check::new(name, Some(expected), computed, Some(tolerance), Comparison::Relative, Some(pass))
    }

    pub fn absolute(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        let pass = (computed - expected).abs() <= tolerance;
        Check::new(name, Some(expected), computed, Some(tolerance), Comparison::Absolute, Some(pass))
    }

    pub fn below(name: impl Into<String>, computed: f64, limit: f64) -> Self {
        Check::new(name, Some(0.0), computed, Some(limit), Comparison::Below, Some(computed < limit))
    }

    pub fn above(name: impl Into<String>, computed: f64, limit: f64) -> Self {
        Check::new(name, None, computed, Some(limit), Comparison::Above, Some(computed > limit))
    }

    /// A yes/no condition, recorded as 1 or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check::new(name, Some(1.0), v, Some(0.0), Comparison::Absolute, Some(ok))
    }

    pub fn reported(name: impl Into<String>, computed: f64) -> Self {
        Check::new(name, None, computed, None, Comparison::Reported, None)
    }

    fn new(
        name: impl Into<String>,
        expected: Option<f64>,
        computed: f64,
        tolerance: Option<f64>,
        comparison: Comparison,
        pass: Option<bool>,
    ) -> Self {
        // NaN never passes
        let pass = pass.map(|p| p && !computed.is_nan());
        Check { name: name.into(), expected, computed, tolerance, comparison, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub id: String,
    pub tool: &'static str,
    pub version: &'static str,
    /// SHA-256 of the canonical JSON of `recipe`.
    pub spec_hash: String,
    pub recipe: serde_json::Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl Summary {
    pub fn new(id: &str, recipe: serde_json::Value) -> Self {
        Summary {
            id: id.to_string(),
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec_hash: spec_hash(&recipe),
            recipe,
            checks: Vec::new(),
            artifacts: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        if check.pass == Some(false) {
            self.pass = false;
        }
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.pass == Some(false))
    }
}

/// Hex SHA-256 of the JSON text of `value`. Object keys serialize sorted, so
/// equal specs hash equally.
pub fn spec_hash(value: &serde_json::Value) -> String {
    let text = serde_json::to_string(value).expect("JSON values serialize");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
