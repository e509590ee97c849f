//! Small numerical kernels: bisection, polynomials, trigonometric series and
//! spectral differentiation of periodic samples.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
/// Returns `None` without a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut out = vec![0.0; n];
        for (i, c) in out.iter_mut().enumerate() {
            *c = self.0.get(i).copied().unwrap_or(0.0) + o.0.get(i).copied().unwrap_or(0.0);
        }
        Poly(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// Synthetic division by `(x - r)`; returns quotient and remainder.
    pub fn deflate(&self, r: f64) -> (Poly, f64) {
        let n = self.0.len();
        if n < 2 {
            return (Poly(vec![0.0]), self.0.first().copied().unwrap_or(0.0));
        }
        let mut q = vec![0.0; n - 1];
        let mut carry = self.0[n - 1];
        for i in (0..n - 1).rev() {
            q[i] = carry;
            carry = self.0[i] + carry * r;
        }
        (Poly(q), carry)
    }
}

/// Cosine series `f(φ) = a₀ + Σ a_k cos(2kφ)` of an even, π-periodic function
/// built from its values at `φ_j = jπ/M`.
#[derive(Debug, Clone)]
pub struct EvenSeries {
    coeffs: Vec<f64>,
}

impl EvenSeries {
    pub fn from_samples(values: &[f64]) -> Self {
        let m = values.len();
        let kmax = m / 2;
        let table: Vec<f64> = (0..m).map(|i| (2.0 * PI * i as f64 / m as f64).cos()).collect();
        let mut coeffs = vec![0.0; kmax + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                acc += v * table[(k * j) % m];
            }
            let w = if k == 0 || (m % 2 == 0 && k == kmax) { 1.0 } else { 2.0 };
            *c = w * acc / m as f64;
        }
        EvenSeries { coeffs }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (2.0 * k as f64 * phi).cos())
            .sum()
    }

    /// `∫₀^φ f`.
    pub fn integral(&self, phi: f64) -> f64 {
        let mut acc = self.coeffs[0] * phi;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let kk = 2.0 * k as f64;
            acc += c * (kk * phi).sin() / kk;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Magnitude of the highest retained coefficient, a resolution indicator.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..].iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
}

fn dft(data: &mut [C64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    if n.is_power_of_two() {
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let ang = sign * 2.0 * PI / len as f64;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let a = ang * k as f64;
                    let w = C64 { re: a.cos(), im: a.sin() };
                    let u = data[start + k];
                    let v = data[start + k + len / 2].mul(w);
                    data[start + k] = u.add(v);
                    data[start + k + len / 2] = u.sub(v);
                }
            }
            len <<= 1;
        }
    } else {
        let twiddle: Vec<C64> = (0..n)
            .map(|k| {
                let a = sign * 2.0 * PI * k as f64 / n as f64;
                C64 { re: a.cos(), im: a.sin() }
            })
            .collect();
        let src = data.to_vec();
        for (k, out) in data.iter_mut().enumerate() {
            let mut acc = C64::default();
            for (j, x) in src.iter().enumerate() {
                acc = acc.add(x.mul(twiddle[(k * j) % n]));
            }
            *out = acc;
        }
    }
}

/// Derivative of order `order` of periodic samples with respect to the sample
/// index (period `n`), computed by trigonometric interpolation.
pub fn periodic_derivative(values: &[f64], order: u32) -> Vec<f64> {
    let n = values.len();
    if n == 0 || order == 0 {
        return values.to_vec();
    }
    let mut buf: Vec<C64> = values.iter().map(|&re| C64 { re, im: 0.0 }).collect();
    dft(&mut buf, false);
    for (k, c) in buf.iter_mut().enumerate() {
        let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        if n % 2 == 0 && k == n / 2 && order % 2 == 1 {
            *c = C64::default();
            continue;
        }
        let w = 2.0 * PI * m / n as f64;
        // (i w)^order
        let mag = w.powi(order as i32);
        let f = match order % 4 {
            0 => C64 { re: mag, im: 0.0 },
            1 => C64 { re: 0.0, im: mag },
            2 => C64 { re: -mag, im: 0.0 },
            _ => C64 { re: 0.0, im: -mag },
        };
        *c = c.mul(f);
    }
    dft(&mut buf, true);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Fourth-order finite difference derivative of uniformly spaced samples.
/// Periodic samples wrap; open samples use one-sided stencils at the ends.
pub fn finite_difference(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            if b > a {
                *o = (values[b] - values[a]) / ((b - a) as f64 * h);
            }
        }
        return out;
    }
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let dot = |c: &[f64; 5], f: &dyn Fn(usize) -> f64| (0..5).map(|k| c[k] * f(k)).sum::<f64>();
    for (i, o) in out.iter_mut().enumerate() {
        let at = |k: isize| values[(i as isize + k).rem_euclid(n as isize) as usize];
        *o = if periodic || (i >= 2 && i + 2 < n) {
            (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)
        } else if i < 2 {
            let c = if i == 0 { &EDGE0 } else { &EDGE1 };
            dot(c, &|k| values[k]) / (12.0 * h)
        } else {
            let c = if i == n - 1 { &EDGE0 } else { &EDGE1 };
            -dot(c, &|k| values[n - 1 - k]) / (12.0 * h)
        };
    }
    out
}

/// Classic fourth-order Runge-Kutta step for `y' = f(t, y)` on fixed-size state.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |a: &[f64; N], s: f64, b: &[f64; N]| -> [f64; N] {
        let mut o = *a;
        for i in 0..N {
            o[i] += s * b[i];
        }
        o
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Least-squares solution of `A x ≈ b` for a tall `rows × N` system through
/// the normal equations. `None` when they are singular.
pub fn least_squares<const N: usize>(rows: &[[f64; N]], rhs: &[f64]) -> Option<[f64; N]> {
    let mut m = [[0.0; N]; N];
    let mut v = [0.0; N];
    for (r, &y) in rows.iter().zip(rhs) {
        for i in 0..N {
            v[i] += r[i] * y;
            for j in 0..N {
                m[i][j] += r[i] * r[j];
            }
        }
    }
    solve_dense(m, v)
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense<const N: usize>(mut m: [[f64; N]; N], mut v: [f64; N]) -> Option<[f64; N]> {
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if !(scale > 0.0) {
        return None;
    }
    for c in 0..N {
        let p = (c..N).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if !(m[p][c].abs() > 1e-13 * scale) {
            return None;
        }
        m.swap(c, p);
        v.swap(c, p);
        for r in c + 1..N {
            let f = m[r][c] / m[c][c];
            for k in c..N {
                m[r][k] -= f * m[c][k];
            }
            v[r] -= f * v[c];
        }
    }
    let mut x = [0.0; N];
    for c in (0..N).rev() {
        let mut acc = v[c];
        for k in c + 1..N {
            acc -= m[c][k] * x[k];
        }
        x[c] = acc / m[c][c];
    }
    Some(x)
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_a_plane() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 2.0)];
        let rows: Vec<[f64; 3]> = pts.iter().map(|&(x, y)| [1.0, x, y]).collect();
        let rhs: Vec<f64> = pts.iter().map(|&(x, y)| 2.0 - x + 3.0 * y).collect();
        let c = least_squares(&rows, &rhs).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] + 1.0).abs() < 1e-12 && (c[2] - 3.0).abs() < 1e-12);
        assert!(least_squares(&[[1.0, 1.0], [2.0, 2.0]], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn deflation_is_exact_for_known_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = Poly(vec![6.0, -7.0, 0.0, 1.0]);
        let (q, r) = p.deflate(2.0);
        assert!(r.abs() < 1e-14);
        // q = (x-1)(x+3) = x^2 + 2x - 3
        assert_eq!(q, Poly(vec![-3.0, 2.0, 1.0]));
    }

    #[test]
    fn spectral_derivative_of_sine() {
        for n in [64usize, 90] {
            let v: Vec<f64> = (0..n).map(|j| (3.0f64 * 2.0 * PI * j as f64 / n as f64).sin()).collect();
            let d = periodic_derivative(&v, 1);
            let d2 = periodic_derivative(&v, 2);
            for j in 0..n {
                let t = 2.0 * PI * j as f64 / n as f64;
                let w = 3.0 * 2.0 * PI / n as f64;
                assert!((d[j] - w * (3.0 * t).cos()).abs() < 1e-12);
                assert!((d2[j] + w * w * (3.0 * t).sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn even_series_integrates_cos_squared() {
        let m = 32;
        let v: Vec<f64> = (0..m).map(|j| (j as f64 * PI / m as f64).cos().powi(2)).collect();
        let s = EvenSeries::from_samples(&v);
        assert!((s.mean() - 0.5).abs() < 1e-15);
        let phi: f64 = 0.3;
        let exact = phi / 2.0 + (2.0 * phi).sin() / 4.0;
        assert!((s.integral(phi) - exact).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_is_fourth_order() {
        let h = 0.01;
        let v: Vec<f64> = (0..50).map(|i| (i as f64 * h).exp()).collect();
        let d = finite_difference(&v, h, false);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).exp()).abs() < 1e-8, "{i}: {di}");
        }
    }

    #[test]
    fn rk4_integrates_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut y = [1.0];
        for i in 0..100 {
            y = rk4_step(&f, i as f64 * 0.01, &y, 0.01);
        }
        assert!((y[0] - 1f64.exp()).abs() < 1e-9);
    }
}
