//! Arclength-sampled space curves with Frenet data.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::{finite_difference, periodic_derivative};
use crate::{Error, Result, Vec3};

/// Space curve sampled uniformly in arclength.
///
/// Closed curves repeat their first sample at the end, so `points.len()` is one
/// more than the number of distinct samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub binormals: Vec<Vec3>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub arclength_step: f64,
    pub closed: bool,
}

/// Position and its first three derivatives at one parameter value.
pub type Jet = [Vec3; 4];

impl SampledCurve {
    /// Planar circle in the `xy` plane, counterclockwise, `n` distinct samples.
    pub fn circle(radius: f64, n: usize) -> Self {
        let n = n.max(3);
        let h = 2.0 * PI * radius / n as f64;
        let mut c = SampledCurve::with_capacity(n + 1, h, true);
        for j in 0..=n {
            let t = 2.0 * PI * (j % n) as f64 / n as f64;
            let (s, co) = t.sin_cos();
            c.push(
                Vec3::new(radius * co, radius * s, 0.0),
                Vec3::new(-s, co, 0.0),
                Vec3::new(-co, -s, 0.0),
                Vec3::Z,
                1.0 / radius,
                0.0,
            );
        }
        c
    }

    /// Resamples a closed parametric curve uniformly in arclength.
    ///
    /// `jet(t)` returns the position and its first three derivatives; the curve
    /// must be regular and `period`-periodic in `t`.
    pub fn from_parametric<F: Fn(f64) -> Jet>(jet: F, period: f64, n: usize) -> Result<Self> {
        if n < 3 || !(period > 0.0) {
            return Err(Error::params("need at least 3 samples and a positive period"));
        }
        let speed = |t: f64| jet(t)[1].norm();
        // Gauss-Legendre on a fine table gives s(t) to near machine precision.
        let k = 16 * n;
        let dt = period / k as f64;
        let gl = |a: f64, b: f64| {
            let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
            let x = (3.0f64 / 5.0).sqrt();
            r * (5.0 * speed(m - r * x) + 8.0 * speed(m) + 5.0 * speed(m + r * x)) / 9.0
        };
        let mut table = Vec::with_capacity(k + 1);
        table.push(0.0);
        for i in 0..k {
            let a = i as f64 * dt;
            let prev = table[i];
            table.push(prev + gl(a, a + 0.5 * dt) + gl(a + 0.5 * dt, a + dt));
        }
        let length = table[k];
        let s_of = |t: f64| {
            let i = ((t / dt).floor() as isize).clamp(0, k as isize - 1) as usize;
            let a = i as f64 * dt;
            table[i] + gl(a, t)
        };
        let h = length / n as f64;
        let mut c = SampledCurve::with_capacity(n + 1, h, true);
        let mut t = 0.0;
        for j in 0..=n {
            let target = j as f64 * h;
            if j == n {
                t = period;
            } else {
                for _ in 0..30 {
                    let step = (s_of(t) - target) / speed(t);
                    t -= step;
                    if step.abs() < 1e-15 * period {
                        break;
                    }
                }
            }
            let [p, d1, d2, d3] = jet(if j == n { 0.0 } else { t });
            let (tt, nn, bb, kap, tor) = frenet_from_derivatives(d1, d2, d3, c.normals.last().copied());
            c.push(p, tt, nn, bb, kap, tor);
        }
        Ok(c)
    }

    /// Builds Frenet data from positions assumed uniformly spaced in arclength.
    ///
    /// Closed curves are differentiated spectrally, open ones by fourth order
    /// finite differences. A repeated endpoint on closed input is tolerated.
    pub fn from_points(points: &[Vec3], closed: bool) -> Result<Self> {
        let mut pts: Vec<Vec3> = points.to_vec();
        if closed && pts.len() > 1 {
            let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.norm())).max(1.0);
            if (pts[0] - pts[pts.len() - 1]).norm() < 1e-9 * scale {
                pts.pop();
            }
        }
        let n = pts.len();
        if n < 5 {
            return Err(Error::params("a sampled curve needs at least 5 points"));
        }
        let coord = |k: usize| -> Vec<f64> { pts.iter().map(|p| p[k]).collect() };
        let deriv = |v: &[f64], order: u32| -> Vec<f64> {
            if closed {
                periodic_derivative(v, order)
            } else {
                let mut d = v.to_vec();
                for _ in 0..order {
                    d = finite_difference(&d, 1.0, false);
                }
                d
            }
        };
        let mut jets: [[Vec<f64>; 3]; 3] = Default::default();
        for k in 0..3 {
            let c = coord(k);
            for o in 0..3 {
                jets[o][k] = deriv(&c, o as u32 + 1);
            }
        }
        let vec_at = |o: usize, i: usize| Vec3::new(jets[o][0][i], jets[o][1][i], jets[o][2][i]);
        let length: f64 = if closed {
            (0..n).map(|i| vec_at(0, i).norm()).sum()
        } else {
            pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
        };
        let segments = if closed { n } else { n - 1 };
        let h = length / segments as f64;
        let mut c = SampledCurve::with_capacity(n + 1, h, closed);
        for (i, &p) in pts.iter().enumerate() {
            let (t, nn, b, k, tau) =
                frenet_from_derivatives(vec_at(0, i), vec_at(1, i), vec_at(2, i), c.normals.last().copied());
            c.push(p, t, nn, b, k, tau);
        }
        if closed {
            c.push(pts[0], c.tangents[0], c.normals[0], c.binormals[0], c.kappa[0], c.tau[0]);
        }
        Ok(c)
    }

    fn with_capacity(n: usize, h: f64, closed: bool) -> Self {
        SampledCurve {
            points: Vec::with_capacity(n),
            tangents: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            binormals: Vec::with_capacity(n),
            kappa: Vec::with_capacity(n),
            tau: Vec::with_capacity(n),
            arclength_step: h,
            closed,
        }
    }

    pub(crate) fn push(&mut self, p: Vec3, t: Vec3, n: Vec3, b: Vec3, kappa: f64, tau: f64) {
        self.points.push(p);
        self.tangents.push(t);
        self.normals.push(n);
        self.binormals.push(b);
        self.kappa.push(kappa);
        self.tau.push(tau);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of samples without the repeated endpoint of a closed curve.
    pub fn distinct_len(&self) -> usize {
        if self.closed {
            self.points.len().saturating_sub(1)
        } else {
            self.points.len()
        }
    }

    pub fn length(&self) -> f64 {
        self.arclength_step * (self.points.len().saturating_sub(1)) as f64
    }

    pub fn endpoint_gap(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (*a - *b).norm(),
            _ => 0.0,
        }
    }

    pub fn centroid(&self) -> Vec3 {
        let n = self.distinct_len().max(1);
        self.points[..n].iter().fold(Vec3::ZERO, |a, &p| a + p) / n as f64
    }

    /// Every `every`-th sample, with the Frenet data recomputed. On closed
    /// curves `every` must divide the number of distinct samples so that the
    /// spacing stays uniform across the seam.
    pub fn subsampled(&self, every: usize) -> Result<Self> {
        if every == 0 {
            return Err(Error::params("subsampling step must be positive"));
        }
        if self.closed && self.distinct_len() % every != 0 {
            return Err(Error::params("subsampling step must divide the sample count of a closed curve"));
        }
        let pts: Vec<Vec3> = self.points[..self.distinct_len()].iter().step_by(every).copied().collect();
        SampledCurve::from_points(&pts, self.closed)
    }

    /// Applies `x -> s R x + t` with `R` given by its rows.
    pub fn transformed(&self, rows: [Vec3; 3], scale: f64, shift: Vec3) -> Self {
        let rot = |v: Vec3| Vec3::new(rows[0].dot(v), rows[1].dot(v), rows[2].dot(v));
        SampledCurve {
            points: self.points.iter().map(|&p| rot(p) * scale + shift).collect(),
            tangents: self.tangents.iter().map(|&v| rot(v)).collect(),
            normals: self.normals.iter().map(|&v| rot(v)).collect(),
            binormals: self.binormals.iter().map(|&v| rot(v)).collect(),
            kappa: self.kappa.iter().map(|k| k / scale).collect(),
            tau: self.tau.iter().map(|t| t / scale).collect(),
            arclength_step: self.arclength_step * scale,
            closed: self.closed,
        }
    }
}

/// Frenet frame, curvature and torsion from derivatives in any regular
/// parametrization. When the curvature vanishes the previous normal is reused.
pub(crate) fn frenet_from_derivatives(
    d1: Vec3,
    d2: Vec3,
    d3: Vec3,
    prev_normal: Option<Vec3>,
) -> (Vec3, Vec3, Vec3, f64, f64) {
    let speed = d1.norm();
    let t = d1 / speed;
    let b = d1.cross(d2);
    let bn = b.norm();
    let kappa = bn / (speed * speed * speed);
    if bn > 1e-12 * speed * speed * speed {
        let bb = b / bn;
        let tau = b.dot(d3) / (bn * bn);
        (t, bb.cross(t), bb, kappa, tau)
    } else {
        let guess = prev_normal.unwrap_or_else(|| {
            if t.x.abs() < 0.9 {
                Vec3::X
            } else {
                Vec3::Y
            }
        });
        let nn = (guess - t * guess.dot(t)).normalized();
        (t, nn, t.cross(nn), kappa, 0.0)
    }
}
