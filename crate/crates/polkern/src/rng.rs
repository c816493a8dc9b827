//! Deterministic sampling helpers on top of a seeded ChaCha stream.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::specfun::Momentum3;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

pub(crate) struct Rng(ChaCha12Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha12Rng::seed_from_u64(seed))
    }

    /// Derive an independent stream for a labelled subtask.
    pub fn derive(seed: u64, label: u64) -> Self {
        Rng::new(seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    pub fn unit_vector(&mut self) -> Momentum3 {
        let z = self.range(-1.0, 1.0);
        let phi = self.range(0.0, 2.0 * core::f64::consts::PI);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Momentum3::new(r * phi.cos(), r * phi.sin(), z)
    }

    pub fn in_box(&mut self, half_width: f64) -> Momentum3 {
        Momentum3::new(
            self.range(-half_width, half_width),
            self.range(-half_width, half_width),
            self.range(-half_width, half_width),
        )
    }

    pub fn in_ball(&mut self, radius: f64) -> Momentum3 {
        loop {
            let p = self.in_box(1.0);
            let n = p.norm_sq();
            if n <= 1.0 && n > 1e-12 {
                return p.scale(radius);
            }
        }
    }

    /// Uniform rotation from a uniform quaternion on S^3.
    pub fn rotation(&mut self) -> Rot3 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let u3 = self.uniform();
        let two_pi = 2.0 * core::f64::consts::PI;
        let a = (1.0 - u1).sqrt();
        let b = u1.sqrt();
        let q = [
            a * (two_pi * u2).sin(),
            a * (two_pi * u2).cos(),
            b * (two_pi * u3).sin(),
            b * (two_pi * u3).cos(),
        ];
        Rot3::from_quaternion(q)
    }
}

/// A proper rotation of R^3.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rot3(pub [[f64; 3]; 3]);

impl Rot3 {
    fn from_quaternion(q: [f64; 4]) -> Self {
        let (x, y, z, w) = (q[0], q[1], q[2], q[3]);
        Rot3([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - z * w),
                2.0 * (x * z + y * w),
            ],
            [
                2.0 * (x * y + z * w),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - x * w),
            ],
            [
                2.0 * (x * z - y * w),
                2.0 * (y * z + x * w),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }

    pub fn apply(&self, p: Momentum3) -> Momentum3 {
        let m = &self.0;
        Momentum3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }
}

/// Restricted Lorentz boost along a unit axis with rapidity chi, acting on
/// on-shell momenta of the given mass: the spatial part of Lambda p.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Boost {
    pub axis: Momentum3,
    pub chi: f64,
    pub mass: f64,
}

impl Boost {
    pub fn apply(&self, p: Momentum3) -> Momentum3 {
        let eps = (self.mass * self.mass + p.norm_sq()).sqrt();
        let along = p.dot(self.axis);
        let gain = (self.chi.cosh() - 1.0) * along + self.chi.sinh() * eps;
        p + self.axis.scale(gain)
    }

    /// Time component of the boosted four-vector.
    pub fn apply_energy(&self, p: Momentum3) -> f64 {
        let eps = (self.mass * self.mass + p.norm_sq()).sqrt();
        eps * self.chi.cosh() + p.dot(self.axis) * self.chi.sinh()
    }
}
