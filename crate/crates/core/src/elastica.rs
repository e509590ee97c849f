//! Critical curves of `F[C] = ∫((κ+μ)² + λ) ds`, the bending energy of a rod
//! that is circular at rest.
//!
//! Away from circles the curvature oscillates between two roots of the radicand
//! `Q(κ) = d - (κ² - c)² - e²/(4(κ+μ)²)`, `c = λ + μ²`, where `d` and `e` are
//! first integrals. The torsion is `τ = e/(4(κ+μ)²)` and the curve lies on a
//! torus of revolution about the `z` axis.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::curve::SampledCurve;
use crate::numeric::{bisect, finite_difference, gcd, EvenSeries, Poly};
use crate::{Error, Result, Vec3};

/// Default samples per period of a curvature profile.
pub const DEFAULT_SAMPLES: usize = 2048;

const ROOT_GRID: usize = 10_000;
const MIN_NODES: usize = 512;
const MAX_NODES: usize = 16_384;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub mu: f64,
    pub lambda: f64,
}

/// Which contact angle `θ = ±π/2` the boundary makes with the surface; fixes
/// the sign in `μ = ±b/(2α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactSign {
    Plus,
    Minus,
}

impl CurveParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && lambda.is_finite()) {
            return Err(Error::params("mu and lambda must be finite"));
        }
        if lambda + mu * mu <= 0.0 {
            return Err(Error::params("lambda + mu^2 must be positive"));
        }
        Ok(CurveParams { mu, lambda })
    }

    /// Curve parameters of a boundary component with contact angle `±π/2`:
    /// `μ = ±b/(2α)` and `λ = β/α - μ²`.
    pub fn from_energy(alpha: f64, b: f64, beta: f64, sign: ContactSign) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::params("alpha must be positive"));
        }
        let s = match sign {
            ContactSign::Plus => 1.0,
            ContactSign::Minus => -1.0,
        };
        let mu = s * b / (2.0 * alpha);
        CurveParams::new(mu, beta / alpha - mu * mu)
    }

    /// `c = λ + μ²`, the squared curvature of the critical circle.
    pub fn c(&self) -> f64 {
        self.lambda + self.mu * self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals {
    pub d: f64,
    pub e: f64,
}

impl FirstIntegrals {
    pub fn new(d: f64, e: f64) -> Result<Self> {
        if !(d >= 0.0) || !e.is_finite() || !d.is_finite() {
            return Err(Error::params("d must be finite and nonnegative, e finite"));
        }
        if d == 0.0 && e != 0.0 {
            return Err(Error::params("d = 0 forces e = 0"));
        }
        Ok(FirstIntegrals { d, e })
    }
}

/// `Q(κ)`, equal to `4κ'²` along a critical curve.
pub fn radicand(kappa: f64, params: &CurveParams, integrals: &FirstIntegrals) -> Result<f64> {
    let k = kappa + params.mu;
    if k == 0.0 && integrals.e != 0.0 {
        return Err(Error::SingularTorsion);
    }
    let a = kappa * kappa - params.c();
    let tail = if integrals.e == 0.0 { 0.0 } else { integrals.e * integrals.e / (4.0 * k * k) };
    Ok(integrals.d - a * a - tail)
}

/// `τ = e / (4(κ+μ)²)`.
pub fn torsion_from_curvature(kappa: f64, params: &CurveParams, integrals: &FirstIntegrals) -> Result<f64> {
    if integrals.e == 0.0 {
        return Ok(0.0);
    }
    let k = kappa + params.mu;
    if k == 0.0 {
        return Err(Error::SingularTorsion);
    }
    Ok(integrals.e / (4.0 * k * k))
}

/// Constant curvature and radius of the critical circle, `κ² = λ + μ²`.
pub fn circle_solution(params: &CurveParams) -> (f64, f64) {
    let k = params.c().sqrt();
    (k, 1.0 / k)
}

/// One period of the curvature quadrature.
///
/// With `κ(φ) = κ_max - Δ sin²φ` the arclength element becomes `ds = 4 dφ/√G`
/// where `G = Q/((κ-κ_min)(κ_max-κ))` is smooth and positive, so the integrals
/// over `φ ∈ [0, π]` are periodic and the trapezoid rule converges spectrally.
#[derive(Debug, Clone)]
struct Quadrature {
    mu: f64,
    kappa_min: f64,
    kappa_max: f64,
    /// `-4(κ+μ)² G(κ)` as a polynomial in `κ`.
    deflated: Poly,
    /// Integrands of `s`, `z` and `ϑ` against `dφ` at `φ_j = jπ/M`.
    nodes: [Vec<f64>; 3],
    period: f64,
    delta_z: f64,
    delta_theta: f64,
}

impl Quadrature {
    fn kappa(&self, phi: f64) -> f64 {
        let s = phi.sin();
        self.kappa_max - (self.kappa_max - self.kappa_min) * s * s
    }

    fn g(&self, kappa: f64) -> f64 {
        let k = kappa + self.mu;
        -self.deflated.eval(kappa) / (4.0 * k * k)
    }

    /// `dκ/ds` at angle `φ`.
    fn kappa_prime(&self, phi: f64) -> f64 {
        let delta = self.kappa_max - self.kappa_min;
        -delta * (2.0 * phi).sin() * self.g(self.kappa(phi)).max(0.0).sqrt() / 4.0
    }
}

/// Cosine series of the quadrature integrands, for evaluation between nodes.
#[derive(Debug, Clone)]
struct Series {
    s: EvenSeries,
    z: EvenSeries,
    theta: EvenSeries,
}

impl Series {
    fn new(q: &Quadrature) -> Self {
        Series {
            s: EvenSeries::from_samples(&q.nodes[0]),
            z: EvenSeries::from_samples(&q.nodes[1]),
            theta: EvenSeries::from_samples(&q.nodes[2]),
        }
    }

    /// Angle `φ` reached at arclength `s ∈ [0, ϱ]`.
    fn phi_of_s(&self, q: &Quadrature, s: f64) -> f64 {
        let mut phi = PI * s / q.period;
        for _ in 0..50 {
            let ds = 4.0 / q.g(q.kappa(phi)).sqrt();
            let step = (self.s.integral(phi) - s) / ds;
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        phi
    }
}

fn radicand_poly(params: &CurveParams, integrals: &FirstIntegrals) -> Poly {
    // P(κ) = 4(κ+μ)²(d - (κ²-c)²) - e² = 4(κ+μ)² Q(κ)
    let mu = params.mu;
    let c = params.c();
    let a = Poly(alloc::vec![mu * mu, 2.0 * mu, 1.0]);
    let b = Poly(alloc::vec![-c, 0.0, 1.0]);
    let inner = Poly(alloc::vec![integrals.d]).add(&b.mul(&b).scale(-1.0));
    a.mul(&inner).scale(4.0).add(&Poly(alloc::vec![-integrals.e * integrals.e]))
}

fn polish_root(p: &Poly, mut x: f64) -> f64 {
    let dp = Poly(p.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect());
    for _ in 0..3 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let step = p.eval(x) / d;
        if !step.is_finite() || step.abs() > 1e-8 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
    }
    x
}

fn bracket_roots(params: &CurveParams, integrals: &FirstIntegrals) -> Result<(f64, f64)> {
    let c = params.c();
    let scale = c.abs().sqrt().max(integrals.d.sqrt().sqrt()).max(1e-300);
    let lo = (-params.mu).max(0.0) + 1e-9 * scale;
    let hi = (c.max(0.0) + integrals.d.sqrt()).sqrt() * 1.01 + 1e-9 * scale;
    if !(hi > lo) {
        return Err(Error::NoOscillation);
    }
    let q = |k: f64| radicand(k, params, integrals).unwrap_or(f64::NEG_INFINITY);
    let step = (hi - lo) / ROOT_GRID as f64;
    let first = q(lo);
    if first > 0.0 {
        return Err(Error::NoOscillation);
    }
    let mut prev = (lo, first);
    let mut lower: Option<(f64, f64)> = None;
    for i in 1..=ROOT_GRID {
        let k = lo + step * i as f64;
        let v = q(k);
        match lower {
            None if prev.1 <= 0.0 && v > 0.0 => lower = Some((prev.0, k)),
            Some(br) if prev.1 > 0.0 && v <= 0.0 => {
                let tol = 1e-12 * scale;
                let kmin = bisect(q, br.0, br.1, tol).ok_or(Error::NoOscillation)?;
                let kmax = bisect(q, prev.0, k, tol).ok_or(Error::NoOscillation)?;
                return Ok((kmin, kmax));
            }
            _ => {}
        }
        prev = (k, v);
    }
    Err(Error::NoOscillation)
}

fn quadrature(params: &CurveParams, integrals: &FirstIntegrals) -> Result<Quadrature> {
    if !(integrals.d > 0.0) {
        return Err(Error::NoOscillation);
    }
    let (kmin0, kmax0) = bracket_roots(params, integrals)?;
    let p = radicand_poly(params, integrals);
    let (kappa_min, kappa_max) = (polish_root(&p, kmin0), polish_root(&p, kmax0));
    let mu = params.mu;
    if integrals.e != 0.0 && (kappa_min + mu) * (kappa_max + mu) <= 0.0 {
        return Err(Error::SingularProfile);
    }
    let (p1, _) = p.deflate(kappa_min);
    let (deflated, _) = p1.deflate(kappa_max);
    let mut q = Quadrature {
        mu,
        kappa_min,
        kappa_max,
        deflated,
        nodes: Default::default(),
        period: 0.0,
        delta_z: 0.0,
        delta_theta: 0.0,
    };
    let gmid = q.g(0.5 * (kappa_min + kappa_max)).abs();
    if !(q.g(kappa_min) > 1e-12 * gmid) || !(q.g(kappa_max) > 1e-12 * gmid) {
        // a double root: the curvature is constant, use the circle branch
        return Err(Error::NoOscillation);
    }
    for k in [kappa_min, kappa_max] {
        if !(4.0 * integrals.d * (k + mu).powi(2) - integrals.e * integrals.e > 0.0) {
            return Err(Error::DegenerateRadius);
        }
    }
    let c = params.c();
    let (d, e) = (integrals.d, integrals.e);
    let sd = d.sqrt();
    let mut m = MIN_NODES;
    loop {
        let mut nodes: [Vec<f64>; 3] = [Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m)];
        for j in 0..m {
            let phi = PI * j as f64 / m as f64;
            let k = q.kappa(phi);
            let g = q.g(k);
            if !(g > 0.0) {
                return Err(Error::NoOscillation);
            }
            let w = 4.0 / g.sqrt();
            let a = k * k - c;
            let denom = 4.0 * d * (k + mu).powi(2) - e * e;
            if !(denom > 0.0) {
                return Err(Error::DegenerateRadius);
            }
            nodes[0].push(w);
            nodes[1].push(a / sd * w);
            nodes[2].push(-e * sd * a / denom * w);
        }
        // periodic trapezoid rule at M and M/2 nodes
        let mean = |v: &Vec<f64>, stride: usize| v.iter().step_by(stride).sum::<f64>() * stride as f64 / m as f64;
        let full = [mean(&nodes[0], 1), mean(&nodes[1], 1), mean(&nodes[2], 1)];
        let half = [mean(&nodes[0], 2), mean(&nodes[1], 2), mean(&nodes[2], 2)];
        let zscale = nodes[1].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tscale = nodes[2].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let converged = (full[0] - half[0]).abs() <= 1e-14 * full[0]
            && (full[1] - half[1]).abs() <= 1e-14 * zscale
            && (full[2] - half[2]).abs() <= 1e-14 * tscale;
        q.nodes = nodes;
        q.period = PI * full[0];
        q.delta_z = PI * full[1];
        q.delta_theta = PI * full[2];
        if converged || m >= MAX_NODES {
            break;
        }
        m *= 2;
    }
    Ok(q)
}

/// One period of the oscillating curvature of a critical curve, sampled
/// uniformly in arclength starting at the maximum.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    pub params: CurveParams,
    pub integrals: FirstIntegrals,
    /// `(s, κ(s))` at `s = jϱ/n`, `j = 0..n`.
    pub kappa_samples: Vec<(f64, f64)>,
    /// `dκ/ds` at the same samples.
    pub kappa_prime: Vec<f64>,
    pub period: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    phis: Vec<f64>,
    quad: Quadrature,
    series: Series,
}

impl CurvatureProfile {
    /// Curvature at arbitrary arclength (periodic extension).
    pub fn kappa_at(&self, s: f64) -> f64 {
        let r = s - (s / self.period).floor() * self.period;
        self.quad.kappa(self.series.phi_of_s(&self.quad, r))
    }

    /// `dκ/ds` at arbitrary arclength.
    pub fn kappa_prime_at(&self, s: f64) -> f64 {
        let r = s - (s / self.period).floor() * self.period;
        self.quad.kappa_prime(self.series.phi_of_s(&self.quad, r))
    }

    pub fn n_samples(&self) -> usize {
        self.kappa_samples.len()
    }
}

/// Solves for one period of `κ(s)` from `2κ' = ±√Q`.
pub fn curvature_profile(params: &CurveParams, integrals: &FirstIntegrals, n_samples: usize) -> Result<CurvatureProfile> {
    if n_samples < 4 {
        return Err(Error::params("need at least 4 samples per period"));
    }
    let quad = quadrature(params, integrals)?;
    let series = Series::new(&quad);
    let mut kappa_samples = Vec::with_capacity(n_samples);
    let mut kappa_prime = Vec::with_capacity(n_samples);
    let mut phis = Vec::with_capacity(n_samples);
    for j in 0..n_samples {
        let s = quad.period * j as f64 / n_samples as f64;
        let phi = if j == 0 { 0.0 } else { series.phi_of_s(&quad, s) };
        phis.push(phi);
        kappa_samples.push((s, quad.kappa(phi)));
        kappa_prime.push(quad.kappa_prime(phi));
    }
    Ok(CurvatureProfile {
        params: *params,
        integrals: *integrals,
        kappa_samples,
        kappa_prime,
        period: quad.period,
        kappa_min: quad.kappa_min,
        kappa_max: quad.kappa_max,
        phis,
        quad,
        series,
    })
}

/// Height gained and rotation about the axis over one period.
///
/// `delta_z` is the geometric height offset `∫(κ²-c) ds / √d`; it vanishes
/// exactly when the unscaled integral does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureDefects {
    pub delta_z: f64,
    pub delta_theta: f64,
}

pub fn closure_defects(profile: &CurvatureProfile) -> ClosureDefects {
    defects_of(&profile.quad)
}

fn defects_of(q: &Quadrature) -> ClosureDefects {
    ClosureDefects { delta_z: q.delta_z, delta_theta: q.delta_theta }
}

/// Defects and period for `(d, e)` without sampling the profile.
pub fn defects_at(params: &CurveParams, integrals: &FirstIntegrals) -> Result<(ClosureDefects, f64)> {
    let q = quadrature(params, integrals)?;
    Ok((defects_of(&q), q.period))
}

/// Rectangle of first integrals scanned by [`find_closed_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub d: (f64, f64),
    pub e: (f64, f64),
    pub d_steps: usize,
    pub e_steps: usize,
}

impl SearchBox {
    /// Box scaled by the critical curvature `√c`: `d ∈ (10⁻⁴c², 4c²)`,
    /// `e ∈ (10⁻⁴c^{3/2}, 2c^{3/2})`.
    pub fn default_for(params: &CurveParams) -> Self {
        let c = params.c();
        SearchBox {
            d: (1e-4 * c * c, 4.0 * c * c),
            e: (1e-4 * c.powf(1.5), 2.0 * c.powf(1.5)),
            d_steps: 160,
            e_steps: 80,
        }
    }
}

#[derive(Clone, Copy)]
enum Axis {
    E,
    D,
}

struct Shooter<'a> {
    params: &'a CurveParams,
    target: f64,
}

impl Shooter<'_> {
    fn eval(&self, d: f64, e: f64) -> Option<(f64, f64, f64)> {
        let fi = FirstIntegrals { d, e };
        let (def, period) = defects_at(self.params, &fi).ok()?;
        Some((def.delta_z, def.delta_theta, period))
    }

    fn point(axis: Axis, x: f64, y: f64) -> (f64, f64) {
        match axis {
            Axis::E => (y, x),
            Axis::D => (x, y),
        }
    }

    /// Roots of `Δz = 0` along the secondary coordinate at fixed primary `x`,
    /// in increasing order of the secondary coordinate.
    fn secondary_roots(&self, axis: Axis, x: f64, range: (f64, f64), steps: usize) -> Vec<f64> {
        let dz = |y: f64| {
            let (d, e) = Self::point(axis, x, y);
            self.eval(d, e).map(|v| v.0).unwrap_or(f64::NAN)
        };
        let mut roots = Vec::new();
        let h = (range.1 - range.0) / steps as f64;
        let mut prev = (range.0, dz(range.0));
        for i in 1..=steps {
            let y = range.0 + h * i as f64;
            let v = dz(y);
            if prev.1.is_finite() && v.is_finite() && prev.1.signum() != v.signum() {
                if let Some(r) = bisect(dz, prev.0, y, 1e-15 * y.abs().max(1e-300)) {
                    roots.push(r);
                }
            }
            prev = (y, v);
        }
        roots
    }

    fn rotation(&self, axis: Axis, x: f64, y: f64) -> f64 {
        let (d, e) = Self::point(axis, x, y);
        self.eval(d, e).map(|v| v.1).unwrap_or(f64::NAN)
    }

    /// Scans the primary coordinate, follows each branch of `Δz = 0` by its
    /// index and bisects where `Δϑ` crosses the target.
    fn shoot(&self, axis: Axis, bx: &SearchBox, seen: &mut (f64, f64)) -> Option<(f64, f64)> {
        let (prim, sec, ps, ss) = match axis {
            Axis::E => (bx.e, bx.d, bx.e_steps, bx.d_steps),
            Axis::D => (bx.d, bx.e, bx.d_steps, bx.e_steps),
        };
        let mut rows: Vec<(f64, Vec<(f64, f64)>)> = Vec::with_capacity(ps + 1);
        for i in 0..=ps {
            let x = prim.0 + (prim.1 - prim.0) * i as f64 / ps as f64;
            let branch: Vec<(f64, f64)> = self
                .secondary_roots(axis, x, sec, ss)
                .into_iter()
                .map(|y| (y, self.rotation(axis, x, y)))
                .filter(|v| v.1.is_finite())
                .collect();
            for &(_, r) in &branch {
                seen.0 = seen.0.min(r);
                seen.1 = seen.1.max(r);
            }
            rows.push((x, branch));
        }
        let step = (sec.1 - sec.0) / ss as f64;
        for w in rows.windows(2) {
            let ((x0, b0), (x1, b1)) = (&w[0], &w[1]);
            if b0.len() != b1.len() {
                continue;
            }
            for (r0, r1) in b0.iter().zip(b1.iter()) {
                let (f0, f1) = (r0.1 - self.target, r1.1 - self.target);
                if f0.signum() == f1.signum() {
                    continue;
                }
                // follow branch k inside a window around the interpolated root
                let follow = |x: f64| -> Option<f64> {
                    let t = (x - x0) / (x1 - x0);
                    let guess = r0.0 + t * (r1.0 - r0.0);
                    let lo = (guess - 2.0 * step).max(sec.0);
                    let hi = (guess + 2.0 * step).min(sec.1);
                    let roots = self.secondary_roots(axis, x, (lo, hi), 16);
                    roots.into_iter().min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
                };
                let g = |x: f64| follow(x).map(|y| self.rotation(axis, x, y) - self.target).unwrap_or(f64::NAN);
                if let Some(x) = bisect(g, *x0, *x1, 1e-15 * x1.abs()) {
                    if let Some(y) = follow(x) {
                        return Some(Self::point(axis, x, y));
                    }
                }
            }
        }
        None
    }

    /// Newton iterations on both closure conditions to remove residual error.
    fn polish(&self, mut d: f64, mut e: f64) -> (f64, f64) {
        for _ in 0..8 {
            let Some((z, t, _)) = self.eval(d, e) else { break };
            let f = (z, t - self.target);
            if f.0.abs() < 1e-14 && f.1.abs() < 1e-14 {
                break;
            }
            let (hd, he) = (1e-7 * d, 1e-7 * e.abs().max(1e-8));
            let (Some(a), Some(b)) = (self.eval(d + hd, e), self.eval(d, e + he)) else { break };
            let j = [[(a.0 - z) / hd, (b.0 - z) / he], [(a.1 - t) / hd, (b.1 - t) / he]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dd = (f.0 * j[1][1] - f.1 * j[0][1]) / det;
            let de = (j[0][0] * f.1 - j[1][0] * f.0) / det;
            let (nd, ne) = (d - dd, e - de);
            match self.eval(nd, ne) {
                Some((z2, t2, _)) if z2.abs() + (t2 - self.target).abs() < f.0.abs() + f.1.abs() => {
                    d = nd;
                    e = ne;
                }
                _ => break,
            }
        }
        (d, e)
    }
}

/// Shoots for first integrals whose curve closes as a `(q, p)` torus knot,
/// i.e. `Δz = 0` and `Δϑ = 2πp/q`.
///
/// The primary scan runs over a grid in `e`, solving `Δz = 0` for `d` on each
/// line. Near the fold of the `Δz = 0` locus in `e` the branches can miss the
/// target, in which case the roles of `d` and `e` are swapped.
pub fn find_closed_curve(params: &CurveParams, q: u32, p: u32, search: &SearchBox) -> Result<FirstIntegrals> {
    if p == 0 || q == 0 {
        return Err(Error::params("p and q must be positive"));
    }
    let g = gcd(p, q);
    if g != 1 {
        return Err(Error::NotCoprime { p, q, gcd: g });
    }
    if !(search.d.0 > 0.0 && search.d.1 > search.d.0 && search.e.1 > search.e.0) || search.d_steps < 2 || search.e_steps < 2 {
        return Err(Error::params("search box needs 0 < d_lo < d_hi, e_lo < e_hi and at least 2 steps"));
    }
    let target = 2.0 * PI * p as f64 / q as f64;
    let shooter = Shooter { params, target };
    let mut seen = (f64::INFINITY, f64::NEG_INFINITY);
    let found = shooter
        .shoot(Axis::E, search, &mut seen)
        .or_else(|| shooter.shoot(Axis::D, search, &mut seen));
    let Some((d, e)) = found else {
        return Err(Error::NotFound { target, min: seen.0, max: seen.1 });
    };
    let (d, e) = shooter.polish(d, e);
    FirstIntegrals::new(d, e)
}

/// Reconstructs the curve in cylindrical coordinates about the `z` axis,
/// sampled uniformly in arclength over `periods` periods.
///
/// `r² = (4d(κ+μ)² - e²)/d²`, `ϑ' = -e√d(κ² - c)/(4d(κ+μ)² - e²)` and
/// `z' = -(κ² - c)/√d`. The height runs against `J̄`, which is what makes the
/// Frenet torsion of the result `+e/(4(κ+μ)²)` in a right-handed frame, so
/// the height gained per period is `-delta_z`.
pub fn reconstruct_curve(profile: &CurvatureProfile, periods: usize) -> Result<SampledCurve> {
    let periods = periods.max(1);
    let q = &profile.quad;
    let (d, e) = (profile.integrals.d, profile.integrals.e);
    let (mu, c) = (profile.params.mu, profile.params.c());
    let sd = d.sqrt();
    let n = profile.n_samples();
    let defects = defects_of(q);
    let h = profile.period / n as f64;
    let mut curve = SampledCurve {
        points: Vec::with_capacity(periods * n + 1),
        tangents: Vec::new(),
        normals: Vec::new(),
        binormals: Vec::new(),
        kappa: Vec::new(),
        tau: Vec::new(),
        arclength_step: h,
        closed: false,
    };
    for j in 0..=periods * n {
        let (k_period, i) = (j / n, j % n);
        let phi = profile.phis[i];
        let kappa = profile.kappa_samples[i].1;
        let kp = profile.kappa_prime[i];
        let km = kappa + mu;
        let denom = 4.0 * d * km * km - e * e;
        if !(denom > 0.0) {
            return Err(Error::DegenerateRadius);
        }
        let r = denom.sqrt() / d;
        let z = -(k_period as f64 * defects.delta_z + profile.series.z.integral(phi));
        let th = k_period as f64 * defects.delta_theta + profile.series.theta.integral(phi);
        let (st, ct) = th.sin_cos();
        let er = Vec3::new(ct, st, 0.0);
        let et = Vec3::new(-st, ct, 0.0);
        let a = kappa * kappa - c;
        let dr = 4.0 * km * kp / (d * r);
        let rdth = -e * sd * a / (d * d * r);
        let dz = -a / sd;
        let t = (er * dr + et * rdth + Vec3::Z * dz).normalized();
        let b = ((et * (sd * r) - Vec3::Z * (e / sd)) / (2.0 * km)).normalized();
        let nn = b.cross(t);
        curve.push(er * r + Vec3::Z * z, t, nn, b, kappa, e / (4.0 * km * km));
    }
    let gap = curve.endpoint_gap();
    curve.closed = gap < 1e-5 * curve.length();
    Ok(curve)
}

/// Curve samples spanning the critical circle, for the `d = 0` branch.
pub fn circle_curve(params: &CurveParams, n: usize) -> SampledCurve {
    SampledCurve::circle(circle_solution(params).1, n)
}

/// Normalized derivative of `J̄ = (κ²-c)T + 2κ'N + 2τ(κ+μ)B` along the samples:
/// `max‖J̄'‖ / (max‖J̄‖ + |λ|)`.
pub fn el_residual_curve(curve: &SampledCurve, params: &CurveParams) -> f64 {
    let n = curve.distinct_len();
    if n < 5 {
        return f64::NAN;
    }
    let h = curve.arclength_step;
    let c = params.c();
    let periodic = curve.closed;
    let kappa = &curve.kappa[..n];
    let kp = finite_difference(kappa, h, periodic);
    let jbar: Vec<Vec3> = (0..n)
        .map(|i| {
            curve.tangents[i] * (kappa[i] * kappa[i] - c)
                + curve.normals[i] * (2.0 * kp[i])
                + curve.binormals[i] * (2.0 * curve.tau[i] * (kappa[i] + params.mu))
        })
        .collect();
    let comp = |k: usize| -> Vec<f64> { finite_difference(&jbar.iter().map(|v| v[k]).collect::<Vec<_>>(), h, periodic) };
    let (dx, dy, dz) = (comp(0), comp(1), comp(2));
    let max_dj = (0..n).map(|i| Vec3::new(dx[i], dy[i], dz[i]).norm()).fold(0.0, f64::max);
    let max_j = jbar.iter().map(|v| v.norm()).fold(0.0, f64::max);
    max_dj / (max_j + params.lambda.abs())
}

/// Lower bound `⌈(p-1)(q-1)/2⌉` on the genus of a surface spanning the
/// `(q, p)` torus knot.
pub fn genus_bound(q: u32, p: u32) -> Result<u32> {
    if p == 0 || q == 0 {
        return Err(Error::params("p and q must be positive"));
    }
    let g = gcd(p, q);
    if g != 1 {
        return Err(Error::NotCoprime { p, q, gcd: g });
    }
    Ok(((p - 1) * (q - 1)).div_ceil(2))
}
