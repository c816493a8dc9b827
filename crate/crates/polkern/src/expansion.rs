//! Legendre coefficient kernels of a rotation-invariant kernel:
//! k_j(sigma, rho) = int_{-1}^{1} k(sigma, rho, x) (j + 1/2) P_j(x) dx,
//! with reconstruction, diagonal tail bounds, and an adaptive truncation
//! order. K and its coefficient sequence determine each other uniquely.

use alloc::string::String;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::kernels::Kernel;
use crate::rng::Rng;
use crate::specfun::{legendre_seq, GaussLegendre};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

/// Hard ceiling for the adaptive truncation order.
pub const J_CAP: usize = 128;

/// Diagonal tail target for the adaptive order.
pub const TAIL_TARGET: f64 = 1e-6;

/// Evaluator for the coefficient kernels of one source kernel up to a
/// fixed order. Extraction is pure quadrature; nothing is tabulated.
#[derive(Clone)]
pub struct LegendreCoefficients {
    kernel: Kernel,
    j_max: usize,
    rule: GaussLegendre,
    source: String,
}

/// Extract coefficients up to `j_max` with a Gauss-Legendre rule of the
/// given order (defaults to 2 j_max + 16, and is never taken below
/// 2 j_max). Fails if a spot check finds the kernel not rotation
/// invariant.
pub fn extract_coefficients(
    kernel: &Kernel,
    j_max: usize,
    quad_order: Option<usize>,
) -> Result<LegendreCoefficients> {
    let residual = rotation_invariance_residual(kernel);
    if residual > 1e-8 {
        return Err(Error::NonRotationInvariant { residual });
    }
    let order = quad_order.unwrap_or(2 * j_max + 16).max(2 * j_max).max(8);
    Ok(LegendreCoefficients {
        kernel: kernel.clone(),
        j_max,
        rule: GaussLegendre::new(order),
        source: kernel.label().to_string(),
    })
}

/// Increase the order until the diagonal tail bound drops below
/// [`TAIL_TARGET`] at every probe radius, capped at [`J_CAP`].
pub fn extract_adaptive(kernel: &Kernel, probe_radii: &[f64]) -> Result<LegendreCoefficients> {
    let mut j = 8;
    loop {
        let coeffs = extract_coefficients(kernel, j, None)?;
        let worst = probe_radii
            .iter()
            .map(|&rho| coeffs.tail_bound(rho))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < TAIL_TARGET || j >= J_CAP {
            return Ok(coeffs);
        }
        j = (2 * j).min(J_CAP);
    }
}

fn rotation_invariance_residual(kernel: &Kernel) -> f64 {
    let mut rng = Rng::new(0x5EED_0001);
    let mut worst = 0.0_f64;
    for _ in 0..12 {
        let rot = rng.rotation();
        let a = rng.in_ball(6.0);
        let b = rng.in_ball(6.0);
        if let (Ok(v), Ok(w)) = (
            kernel.try_eval(a, b),
            kernel.try_eval(rot.apply(a), rot.apply(b)),
        ) {
            worst = worst.max((v - w).abs());
        }
    }
    worst
}

impl LegendreCoefficients {
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn quad_order(&self) -> usize {
        self.rule.order()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// All coefficients k_0 .. k_{j_max} at one radial pair, sharing a
    /// single quadrature pass.
    pub fn coeffs_at(&self, sigma: f64, rho: f64) -> Vec<f64> {
        let mut acc = alloc::vec![0.0; self.j_max + 1];
        for (&x, &w) in self.rule.nodes().iter().zip(self.rule.weights()) {
            let v = self
                .kernel
                .zonal(sigma, rho, x)
                .expect("zonal evaluation failed");
            let ps = legendre_seq(self.j_max, x).expect("node within [-1, 1]");
            for (j, p) in ps.iter().enumerate() {
                acc[j] += w * v * p * (j as f64 + 0.5);
            }
        }
        acc
    }

    pub fn coeff(&self, j: usize, sigma: f64, rho: f64) -> f64 {
        assert!(j <= self.j_max, "coefficient order exceeds extraction order");
        self.coeffs_at(sigma, rho)[j]
    }

    /// Partial sum sum_{j <= J} k_j(sigma, rho) P_j(x).
    pub fn reconstruct(&self, sigma: f64, rho: f64, x: f64) -> Result<f64> {
        let ps = legendre_seq(self.j_max, x)?;
        let ks = self.coeffs_at(sigma, rho);
        Ok(ks.iter().zip(&ps).map(|(k, p)| k * p).sum())
    }

    /// Diagonal normalization deficit 1 - sum_{j <= J} k_j(rho, rho).
    /// Nonnegative up to quadrature error for normalized kernels.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        1.0 - self.coeffs_at(rho, rho).iter().sum::<f64>()
    }
}
