//! Special functions and kinematic helpers shared by all modules:
//! Legendre and Gegenbauer polynomials by recurrence, Gauss-Legendre
//! rules, panel and adaptive quadrature, the relativistic energy and
//! rapidity maps, and a couple of probability functions.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

/// Slack allowed outside closed domains before a hard error. Unit-vector
/// dot products and momentum-shell products drift by a few ulps.
pub const DOMAIN_SLACK: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Momentum space
// ---------------------------------------------------------------------------

/// A point of momentum space R^3 (units of the mass).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Momentum3 {
    pub const ZERO: Momentum3 = Momentum3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Momentum3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Momentum3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Momentum3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Momentum3::new(s * self.x, s * self.y, s * self.z)
    }
}

impl core::ops::Add for Momentum3 {
    type Output = Momentum3;
    fn add(self, rhs: Momentum3) -> Momentum3 {
        Momentum3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl core::ops::Sub for Momentum3 {
    type Output = Momentum3;
    fn sub(self, rhs: Momentum3) -> Momentum3 {
        Momentum3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl core::ops::Neg for Momentum3 {
    type Output = Momentum3;
    fn neg(self) -> Momentum3 {
        self.scale(-1.0)
    }
}

/// The on-shell energy map eps(p) = sqrt(m^2 + |p|^2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energy {
    mass: f64,
}

impl Energy {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain("mass must be positive and finite"));
        }
        Ok(Energy { mass })
    }

    /// Unit mass, the default normalization everywhere.
    pub const UNIT: Energy = Energy { mass: 1.0 };

    pub fn mass(self) -> f64 {
        self.mass
    }

    pub fn of(self, p: Momentum3) -> f64 {
        (self.mass * self.mass + p.norm_sq()).sqrt()
    }

    pub fn of_radius(self, rho: f64) -> f64 {
        (self.mass * self.mass + rho * rho).sqrt()
    }

    /// Minkowski product of the on-shell four-vectors of `k` and `p`:
    /// eps(k) eps(p) - k.p, always >= m^2. For aligned momenta the naive
    /// difference cancels catastrophically at large radii, so the product
    /// is rearranged through |k x p|^2 when k.p > 0.
    pub fn minkowski(self, k: Momentum3, p: Momentum3) -> f64 {
        let m2 = self.mass * self.mass;
        let dot = k.dot(p);
        if dot <= 0.0 {
            return self.of(k) * self.of(p) - dot;
        }
        let cross = Momentum3::new(
            k.y * p.z - k.z * p.y,
            k.z * p.x - k.x * p.z,
            k.x * p.y - k.y * p.x,
        );
        (m2 * m2 + m2 * (k.norm_sq() + p.norm_sq()) + cross.norm_sq())
            / (self.of(k) * self.of(p) + dot)
    }
}

/// Hyperbolic angle kappa >= 0 with t = cosh(kappa).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rapidity(f64);

impl Rapidity {
    /// kappa = ln(t + sqrt(t^2 - 1)) for t >= 1; values within
    /// [`DOMAIN_SLACK`] below 1 are clamped.
    pub fn from_t(t: f64) -> Result<Self> {
        if t < 1.0 - DOMAIN_SLACK {
            return Err(Error::Domain("rapidity needs t >= 1"));
        }
        Ok(Rapidity(acosh_clamped(t)))
    }

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa < 0.0 {
            return Err(Error::Domain("rapidity must be nonnegative"));
        }
        Ok(Rapidity(kappa))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn t(self) -> f64 {
        self.0.cosh()
    }
}

/// ln(t + sqrt(t^2 - 1)) with t clamped to [1, inf); uses `ln_1p` on
/// t - 1 to keep accuracy near the threshold.
pub fn acosh_clamped(t: f64) -> f64 {
    let u = (t - 1.0).max(0.0);
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

/// Rapidity of an on-shell momentum of radius rho at unit mass:
/// asinh(rho) = ln(eps(rho) + rho).
pub fn rapidity_of_momentum(rho: f64) -> f64 {
    rho.asinh()
}

// ---------------------------------------------------------------------------
// Orthogonal polynomials
// ---------------------------------------------------------------------------

fn clamp_unit(x: f64) -> Result<f64> {
    if x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain("polynomial argument must lie in [-1, 1]"));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Legendre polynomial P_j(x) by the three-term recurrence.
pub fn legendre_p(j: usize, x: f64) -> Result<f64> {
    let x = clamp_unit(x)?;
    let mut prev = 1.0;
    if j == 0 {
        return Ok(prev);
    }
    let mut cur = x;
    for n in 1..j {
        let n_f = n as f64;
        let next = ((2.0 * n_f + 1.0) * x * cur - n_f * prev) / (n_f + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// All of P_0(x)..P_jmax(x) in one sweep.
pub fn legendre_seq(j_max: usize, x: f64) -> Result<Vec<f64>> {
    let x = clamp_unit(x)?;
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(1.0);
    if j_max == 0 {
        return Ok(out);
    }
    out.push(x);
    for n in 1..j_max {
        let n_f = n as f64;
        let next = ((2.0 * n_f + 1.0) * x * out[n] - n_f * out[n - 1]) / (n_f + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Gegenbauer polynomial C_n^r(x); C_j^{1/2} = P_j.
pub fn gegenbauer_c(n: usize, r: f64, x: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("Gegenbauer order r must be positive"));
    }
    let x = clamp_unit(x)?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * r * x;
    for m in 2..=n {
        let m_f = m as f64;
        let next = (2.0 * x * (m_f + r - 1.0) * cur - (m_f + 2.0 * r - 2.0) * prev) / m_f;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials of
/// degree <= 2 * order - 1. Nodes by Newton iteration on the recurrence.
pub fn gauss_legendre_nodes(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let n_f = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess, then Newton.
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n_f + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..120 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = d;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let k_f = k as f64;
        let p2 = ((2.0 * k_f + 1.0) * x * p1 - k_f * p0) / (k_f + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable Gauss-Legendre rule.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre_nodes(order);
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Split [a, b] into equal panels and apply the rule on each.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            let lo = a + i as f64 * h;
            acc += self.integrate(lo, lo + h, &mut f);
        }
        acc
    }
}

/// Adaptive bisection quadrature with an absolute tolerance. Returns the
/// value and an error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> (f64, f64) {
    let coarse = GaussLegendre::new(10);
    let fine = GaussLegendre::new(20);
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        coarse: &GaussLegendre,
        fine: &GaussLegendre,
        depth: usize,
    ) -> (f64, f64) {
        let rough = coarse.integrate(a, b, f);
        let better = fine.integrate(a, b, f);
        let err = (better - rough).abs();
        if err <= tol || depth >= 28 {
            return (better, err);
        }
        let mid = 0.5 * (a + b);
        let (l, el) = recurse(f, a, mid, 0.5 * tol, coarse, fine, depth + 1);
        let (r, er) = recurse(f, mid, b, 0.5 * tol, coarse, fine, depth + 1);
        (l + r, el + er)
    }
    recurse(f, a, b, abs_tol, &coarse, &fine, 0)
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// sinh(x)/x with the removable singularity filled in.
pub fn sinch(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// Error function (from libm; the standard library has none).
pub fn erf(x: f64) -> f64 {
    crate::fp::erf(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    crate::fp::erfc(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * crate::fp::erfc(-x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile. Acklam's rational approximation polished by
/// two Halley steps against the erfc-based CDF; good to ~1e-14 inside
/// (1e-300, 1 - 1e-16).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must be in (0, 1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * (2.0 * core::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_orders() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_p(1, -0.7).unwrap(), -0.7);
        assert!((legendre_p(2, 0.5).unwrap() - (-0.125)).abs() < 1e-15);
    }

    #[test]
    fn legendre_rejects_out_of_range() {
        assert!(legendre_p(3, 1.0 + 1e-10).is_err());
        // Drift within the slack is clamped, not rejected.
        assert!(legendre_p(3, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn legendre_bounded_on_interval() {
        for j in 0..40 {
            for i in 0..=50 {
                let x = -1.0 + i as f64 / 25.0;
                assert!(legendre_p(j, x).unwrap().abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn gegenbauer_small_orders() {
        assert_eq!(gegenbauer_c(0, 1.5, 0.2).unwrap(), 1.0);
        assert!((gegenbauer_c(1, 1.5, 0.2).unwrap() - 0.6).abs() < 1e-15);
        assert!(gegenbauer_c(2, 0.0, 0.2).is_err());
        assert!(gegenbauer_c(2, -1.0, 0.2).is_err());
    }

    #[test]
    fn gegenbauer_half_is_legendre() {
        for x in [-0.95, -0.3, 0.0, 0.5, 0.9] {
            for n in [0usize, 1, 2, 4, 7, 11] {
                let c = gegenbauer_c(n, 0.5, x).unwrap();
                let p = legendre_p(n, x).unwrap();
                assert!((c - p).abs() < 1e-12, "n={n} x={x}: {c} vs {p}");
            }
        }
    }

    #[test]
    fn gauss_legendre_two_point_rule() {
        let (n, w) = gauss_legendre_nodes(2);
        assert!((n[0] + 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((n[1] - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let rule = GaussLegendre::new(3);
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(4));
        assert!((v - 0.4).abs() < 1e-14);
        // Degree 2n-1 exactness: order 6 integrates x^11 exactly.
        let rule = GaussLegendre::new(6);
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(11));
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn legendre_orthogonality_under_quadrature() {
        let rule = GaussLegendre::new(16);
        for i in 0..=12usize {
            for j in 0..=12usize {
                let v = rule.integrate(-1.0, 1.0, |x| {
                    legendre_p(i, x).unwrap() * legendre_p(j, x).unwrap() * (j as f64 + 0.5)
                });
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12, "i={i} j={j}: {v}");
            }
        }
    }

    #[test]
    fn legendre_pair_orthogonal_octave_rule() {
        let rule = GaussLegendre::new(8);
        let v = rule.integrate(-1.0, 1.0, |x| {
            legendre_p(3, x).unwrap() * legendre_p(5, x).unwrap()
        });
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn gegenbauer_generating_identity() {
        // (1 - 2hx + h^2)^{-r} = sum_n C_n^r(x) h^n
        for r in [0.5, 1.0, 1.5] {
            for h in [0.1, 0.3, 0.5] {
                for i in 0..=8 {
                    let x = -1.0 + i as f64 / 4.0;
                    let direct = (1.0 - 2.0 * h * x + h * h).powf(-r);
                    let mut sum = 0.0;
                    for n in 0..=60 {
                        sum += gegenbauer_c(n, r, x).unwrap() * h.powi(n as i32);
                    }
                    assert!((direct - sum).abs() < 1e-10, "r={r} h={h} x={x}");
                }
            }
        }
    }

    #[test]
    fn rapidity_round_trip() {
        let mut t = 1.0;
        while t <= 1e6 {
            let k = Rapidity::from_t(t).unwrap();
            let back = k.t();
            assert!(
                (back - t).abs() <= 1e-12 * t.max(1.0),
                "t={t} back={back}"
            );
            t *= 1.7;
        }
        assert_eq!(Rapidity::from_t(1.0).unwrap().value(), 0.0);
        assert!(Rapidity::from_t(0.5).is_err());
    }

    #[test]
    fn energy_basics() {
        let e = Energy::new(1.0).unwrap();
        assert_eq!(e.of(Momentum3::ZERO), 1.0);
        assert!(e.of(Momentum3::new(0.3, -0.2, 0.9)) >= 1.0);
        // Rotation invariance in p: same radius, same energy.
        let a = e.of(Momentum3::new(3.0, 0.0, 0.0));
        let b = e.of(Momentum3::new(0.0, 0.0, 3.0));
        assert_eq!(a, b);
        assert!(Energy::new(0.0).is_err());
        assert!(Energy::new(-2.0).is_err());
    }

    #[test]
    fn adaptive_quadrature_hits_tolerance() {
        let (v, err) = integrate_adaptive(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-11, "{v} err={err}");
    }

    #[test]
    fn normal_quantile_round_trip() {
        for p in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let x = normal_quantile(p);
            assert!((normal_cdf(x) - p).abs() < 1e-13 * p.max(1e-3), "p={p}");
        }
    }

    #[test]
    fn sinc_and_sinch_limits() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinch(0.0), 1.0);
        assert!((sinc(1e-5) - (1e-5_f64).sin() / 1e-5).abs() < 1e-15);
        assert!((sinch(2.0) - 2.0_f64.sinh() / 2.0).abs() < 1e-15);
    }
}
