//! The necessary condition NC with its equality cases, pointwise
//! maximality of the critical causal kernel, and the conserved /
//! timelike-definite current criteria that certify causal time evolution.

use alloc::vec::Vec;

use crate::kernels::{kernel_power, CurrentKernel, Kernel, RadialProfile};
use crate::rng::Rng;
use crate::specfun::{integrate_adaptive, rapidity_of_momentum, Energy, Momentum3};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

/// Which side of the inequality carries the energy prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NcMode {
    /// Tests the profile kernel alone; no prefactor on the left side.
    ProfileOnly,
    /// Tests the full causal kernel; left side carries (1+eps)^2/(4 eps).
    WithPrefactor,
}

/// Per-radius evaluation of the necessary condition
/// LS <= RS = (1 / (2 rho^2)) int_1^{1 + 2 rho^2} g(t) dt.
#[derive(Clone, Debug)]
pub struct NcReport {
    pub mode: NcMode,
    pub rho: Vec<f64>,
    pub ls: Vec<f64>,
    pub rs: Vec<f64>,
    /// rs - ls; negative means the condition is violated at that radius.
    pub margin: Vec<f64>,
    pub worst_margin: f64,
}

/// RS of NC by adaptive quadrature after the substitution t = cosh(u),
/// which removes the square-root derivative blowup at the lower endpoint.
pub fn nc_right_side(profile: &RadialProfile, rho: f64) -> f64 {
    let upper = 2.0 * rapidity_of_momentum(rho);
    let f = |u: f64| profile.eval_normalized(u.cosh()) * u.sinh();
    let (integral, _) = integrate_adaptive(&f, 0.0, upper, 1e-12);
    integral / (2.0 * rho * rho)
}

/// Evaluate NC on a radius grid. The profile must use the unit mass
/// normalization.
pub fn nc_check(profile: &RadialProfile, mode: NcMode, rho_grid: &[f64]) -> Result<NcReport> {
    if (profile.mass() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(
            "the NC machinery is normalized to unit mass",
        ));
    }
    if rho_grid.is_empty() {
        return Err(Error::Precondition("need at least one radius"));
    }
    let energy = Energy::UNIT;
    let mut ls = Vec::with_capacity(rho_grid.len());
    let mut rs = Vec::with_capacity(rho_grid.len());
    let mut margin = Vec::with_capacity(rho_grid.len());
    let mut worst = f64::INFINITY;
    for &rho in rho_grid {
        if !(rho > 0.0) {
            return Err(Error::Domain("NC radii must be positive"));
        }
        let eps = energy.of_radius(rho);
        let g_at = profile.eval_normalized(eps);
        let left = match mode {
            NcMode::ProfileOnly => g_at * g_at,
            NcMode::WithPrefactor => (1.0 + eps) * (1.0 + eps) / (4.0 * eps) * g_at * g_at,
        };
        let right = nc_right_side(profile, rho);
        let m = right - left;
        worst = worst.min(m);
        ls.push(left);
        rs.push(right);
        margin.push(m);
    }
    Ok(NcReport {
        mode,
        rho: rho_grid.to_vec(),
        ls,
        rs,
        margin,
        worst_margin: worst,
    })
}

/// Log-spaced radii on [lo, hi], the standard NC grid.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Closed-form check of the RS for the irreducible profiles:
/// RS = (sin(lambda l) / (lambda rho))^2 for the principal series and
/// (sinh(lambda l) / (lambda rho))^2 for the supplementary one, with
/// l(rho) = ln(eps(rho) + rho). LS with prefactor outgrows RS like rho/4.
#[derive(Clone, Debug)]
pub struct IrreducibleNcReport {
    pub rho: Vec<f64>,
    pub rs_quadrature: Vec<f64>,
    pub rs_closed: Vec<f64>,
    pub prefactor_ratio: Vec<f64>,
    pub max_closed_form_deviation: f64,
}

pub fn nc_irreducible_identity(
    kind: crate::kernels::IrreducibleKind,
    lambda: f64,
    rho_grid: &[f64],
) -> Result<IrreducibleNcReport> {
    let profile = crate::kernels::profile_irreducible(kind, lambda)?;
    let energy = Energy::UNIT;
    let mut rs_quadrature = Vec::new();
    let mut rs_closed = Vec::new();
    let mut prefactor_ratio = Vec::new();
    let mut worst = 0.0_f64;
    for &rho in rho_grid {
        let l = rapidity_of_momentum(rho);
        let closed = match kind {
            crate::kernels::IrreducibleKind::Principal => {
                let s = crate::specfun::sinc(lambda * l) * l / rho;
                s * s
            }
            crate::kernels::IrreducibleKind::Supplementary => {
                let s = crate::specfun::sinch(lambda * l) * l / rho;
                s * s
            }
        };
        let quad = nc_right_side(&profile, rho);
        worst = worst.max((quad - closed).abs());
        let eps = energy.of_radius(rho);
        prefactor_ratio.push((1.0 + eps) * (1.0 + eps) / (4.0 * eps));
        rs_quadrature.push(quad);
        rs_closed.push(closed);
    }
    Ok(IrreducibleNcReport {
        rho: rho_grid.to_vec(),
        rs_quadrature,
        rs_closed,
        prefactor_ratio,
        max_closed_form_deviation: worst,
    })
}

// ---------------------------------------------------------------------------
// Maximality
// ---------------------------------------------------------------------------

/// How a maximality run samples momentum pairs: a uniform box plus
/// log-radial shells reaching far out, where the asymptotics live.
#[derive(Clone, Copy, Debug)]
pub struct MaximalitySampling {
    pub n_box: usize,
    pub n_log_radial: usize,
    pub box_half_width: f64,
    pub max_radius: f64,
    pub seed: u64,
}

impl Default for MaximalitySampling {
    fn default() -> Self {
        MaximalitySampling {
            n_box: 50_000,
            n_log_radial: 50_000,
            box_half_width: 20.0,
            max_radius: 1e3,
            seed: 0x4D41_5853,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MaximalityReport {
    pub pairs_checked: usize,
    /// min over pairs of K_max(k, p) - |K(k, p)|.
    pub worst_slack: f64,
    /// Pairs where |K| exceeded K_max beyond 1e-12.
    pub bound_failures: usize,
    /// Pairs with k != p where the strict inequality failed (only counted
    /// in strict mode).
    pub strict_failures: usize,
}

/// Check |K(k, p)| <= K_max(k, p) + 1e-12 over sampled pairs, where
/// K_max is the critical causal kernel of the same mass; with `strict`,
/// also demand strict inequality off the diagonal.
pub fn maximality_check(
    kernel: &Kernel,
    sampling: &MaximalitySampling,
    strict: bool,
) -> Result<MaximalityReport> {
    let bound = kernel_power(1.5)?;
    let mut rng = Rng::derive(sampling.seed, 0x4D41);
    let mut worst = f64::INFINITY;
    let mut bound_failures = 0usize;
    let mut strict_failures = 0usize;
    let total = sampling.n_box + sampling.n_log_radial;
    for i in 0..total {
        let (k, p) = if i < sampling.n_box {
            (
                rng.in_box(sampling.box_half_width),
                rng.in_box(sampling.box_half_width),
            )
        } else {
            let r1 = 0.05 * (sampling.max_radius / 0.05).powf(rng.uniform());
            let r2 = 0.05 * (sampling.max_radius / 0.05).powf(rng.uniform());
            (rng.unit_vector().scale(r1), rng.unit_vector().scale(r2))
        };
        let v = kernel.try_eval(k, p)?;
        let cap = bound.try_eval(k, p)?;
        let slack = cap - v.abs();
        worst = worst.min(slack);
        if slack < -1e-12 {
            bound_failures += 1;
        }
        if strict && slack <= 0.0 && (k - p).norm_sq() > 0.0 {
            strict_failures += 1;
        }
    }
    Ok(MaximalityReport {
        pairs_checked: total,
        worst_slack: worst,
        bound_failures,
        strict_failures,
    })
}

// ---------------------------------------------------------------------------
// Currents
// ---------------------------------------------------------------------------

/// Max over sampled pairs of the conservation residual
/// |(eps(k) - eps(p)) K(k, p) - sum_i (k_i - p_i) j_i(k, p)|.
pub fn conserved_check(kernel: &Kernel, n_pairs: usize, seed: u64) -> Result<f64> {
    let current = kernel.current().ok_or(Error::MissingCurrent)?;
    Ok(conservation_residual(kernel, current, n_pairs, seed))
}

/// Same residual for an explicitly supplied current (lets a test pair the
/// wrong current with a kernel and watch it fail).
pub fn conservation_residual(
    kernel: &Kernel,
    current: &CurrentKernel,
    n_pairs: usize,
    seed: u64,
) -> f64 {
    let energy = kernel.energy();
    let mut rng = Rng::derive(seed, 0xC025);
    let mut worst = 0.0_f64;
    for _ in 0..n_pairs {
        let k = rng.in_box(8.0);
        let p = rng.in_box(8.0);
        let j = current.eval(k, p);
        let lhs = (energy.of(k) - energy.of(p)) * kernel.eval(k, p);
        let rhs = (k.x - p.x) * j[0] + (k.y - p.y) * j[1] + (k.z - p.z) * j[2];
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Worst margin of the timelike-definiteness inequality
/// (sum cc K)^2 - sum_i (sum cc j_i)^2 over seeded random points and
/// random real and complex coefficient vectors.
pub fn timelike_definite_check(kernel: &Kernel, n: usize, seeds: &[u64]) -> Result<f64> {
    let current = kernel.current().ok_or(Error::MissingCurrent)?;
    if seeds.is_empty() {
        return Err(Error::Precondition("need at least one seed"));
    }
    let mut worst = f64::INFINITY;
    for &seed in seeds {
        let mut rng = Rng::derive(seed, 0x71D3);
        let points: Vec<Momentum3> = (0..n).map(|_| rng.in_ball(8.0)).collect();
        // Quadratic forms of a real symmetric kernel with complex
        // coefficients split into the two real parts, so one complex
        // draw covers both.
        let re: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let im: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();

        let form = |f: &dyn Fn(Momentum3, Momentum3) -> f64| -> f64 {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let cc = re[a] * re[b] + im[a] * im[b];
                    acc += cc * f(points[a], points[b]);
                }
            }
            acc
        };
        let t_form = form(&|k, p| kernel.eval(k, p));
        let mut j_sq = 0.0;
        for i in 0..3 {
            let ji = form(&|k, p| current.component(i, k, p));
            j_sq += ji * ji;
        }
        worst = worst.min(t_form * t_form - j_sq);
    }
    Ok(worst)
}

/// The conserved covariant four-current of a causal profile on the shell:
/// v(k, p) = g(kp) (k + p) / 2 as a four-vector (time component first).
pub fn shell_current(profile: &RadialProfile, k: Momentum3, p: Momentum3) -> Result<[f64; 4]> {
    let energy = Energy::new(profile.mass())?;
    let g = profile.eval(energy.minkowski(k, p));
    let sum = k + p;
    Ok([
        0.5 * g * (energy.of(k) + energy.of(p)),
        0.5 * g * sum.x,
        0.5 * g * sum.y,
        0.5 * g * sum.z,
    ])
}

/// Build the momentum-normalized current components j_i = v_i /
/// sqrt(eps(k) eps(p)) of a causal profile. The time component
/// v_0 / sqrt(eps eps) reproduces the causal kernel itself.
pub fn covariant_current_decompose(profile: RadialProfile) -> CurrentKernel {
    CurrentKernel::Covariant { profile }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{
        kernel_causal, kernel_nwl, kernel_product, kernel_profile, kernel_terno_moretti,
        IrreducibleKind,
    };
    use crate::rng::Boost;
    use alloc::vec::Vec;

    #[test]
    fn nc_equality_for_half_power_profile() {
        let g = RadialProfile::power(0.5).unwrap();
        let grid = log_grid(0.05, 50.0, 50);
        let report = nc_check(&g, NcMode::ProfileOnly, &grid).unwrap();
        for (i, m) in report.margin.iter().enumerate() {
            assert!(m.abs() <= 1e-10, "rho = {}: margin {m}", report.rho[i]);
        }
        // Spot value at rho = 1: both sides 2 / (1 + sqrt(2)).
        let r1 = nc_check(&g, NcMode::ProfileOnly, &[1.0]).unwrap();
        let expect = 2.0 / (1.0 + 2.0_f64.sqrt());
        assert!((r1.ls[0] - expect).abs() < 1e-12);
        assert!((r1.rs[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn nc_equality_for_critical_power_with_prefactor() {
        let g = RadialProfile::power(1.5).unwrap();
        let grid = log_grid(0.05, 50.0, 50);
        let report = nc_check(&g, NcMode::WithPrefactor, &grid).unwrap();
        for (i, m) in report.margin.iter().enumerate() {
            assert!(m.abs() <= 1e-10, "rho = {}: margin {m}", report.rho[i]);
        }
    }

    #[test]
    fn nc_violations_for_subcritical_powers() {
        for r in [0.25, 0.4] {
            let g = RadialProfile::power(r).unwrap();
            let report = nc_check(&g, NcMode::ProfileOnly, &log_grid(0.05, 50.0, 50)).unwrap();
            assert!(
                report.worst_margin < -1e-6,
                "r = {r}: {}",
                report.worst_margin
            );
        }
        for r in [0.75, 1.0, 1.25] {
            let g = RadialProfile::power(r).unwrap();
            let report = nc_check(&g, NcMode::WithPrefactor, &log_grid(0.05, 50.0, 50)).unwrap();
            assert!(
                report.worst_margin < -1e-6,
                "r = {r}: {}",
                report.worst_margin
            );
        }
        // The supercritical power passes with positive margin.
        let g = RadialProfile::power(2.0).unwrap();
        let report = nc_check(&g, NcMode::WithPrefactor, &log_grid(0.05, 50.0, 50)).unwrap();
        assert!(report.worst_margin > 0.0);
    }

    #[test]
    fn nc_rejects_non_unit_mass() {
        let g = RadialProfile::power(1.5).unwrap().with_mass(2.0).unwrap();
        assert!(nc_check(&g, NcMode::ProfileOnly, &[1.0]).is_err());
    }

    #[test]
    fn irreducible_identity_closed_forms() {
        let grid = log_grid(0.1, 20.0, 20);
        let report = nc_irreducible_identity(IrreducibleKind::Principal, 0.7, &grid).unwrap();
        assert!(report.max_closed_form_deviation < 1e-10);
        let report = nc_irreducible_identity(IrreducibleKind::Supplementary, 0.4, &grid).unwrap();
        assert!(report.max_closed_form_deviation < 1e-10);

        // Limiting case lambda = 0 at rho = 1: (l(1)/1)^2 = ln(1+sqrt 2)^2.
        let report = nc_irreducible_identity(IrreducibleKind::Principal, 0.0, &[1.0]).unwrap();
        let expect = (1.0_f64 + 2.0_f64.sqrt()).ln().powi(2);
        assert!((report.rs_closed[0] - expect).abs() < 1e-14);
        assert!((report.rs_quadrature[0] - expect).abs() < 1e-10);

        // Supplementary lambda = 1 at rho = 2: sinh(l) = rho, so RS = 1.
        let report = nc_irreducible_identity(IrreducibleKind::Supplementary, 1.0, &[2.0]).unwrap();
        assert!((report.rs_closed[0] - 1.0).abs() < 1e-13);

        // The prefactor mismatch grows like rho / 4.
        let report =
            nc_irreducible_identity(IrreducibleKind::Principal, 0.5, &[50.0, 100.0]).unwrap();
        assert!((report.prefactor_ratio[1] / report.prefactor_ratio[0] - 2.0).abs() < 0.05);
        assert!((report.prefactor_ratio[1] / (100.0 / 4.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn maximality_of_critical_power() {
        let sampling = MaximalitySampling {
            n_box: 2_000,
            n_log_radial: 2_000,
            ..Default::default()
        };
        // Against itself: equality, slack 0 within rounding.
        let k32 = kernel_power(1.5).unwrap();
        let report = maximality_check(&k32, &sampling, false).unwrap();
        assert_eq!(report.bound_failures, 0);
        assert!(report.worst_slack.abs() < 1e-12);

        for r in [2.0, 3.0] {
            let k = kernel_power(r).unwrap();
            let report = maximality_check(&k, &sampling, true).unwrap();
            assert_eq!(report.bound_failures, 0, "r = {r}");
            assert_eq!(report.strict_failures, 0, "r = {r}");
            assert!(report.worst_slack > 0.0, "r = {r}");
        }
    }

    #[test]
    fn maximality_of_products() {
        let sampling = MaximalitySampling {
            n_box: 1_000,
            n_log_radial: 1_000,
            ..Default::default()
        };
        let k32 = kernel_power(1.5).unwrap();
        for lambda in [0.0, 0.5] {
            let noise = kernel_profile(RadialProfile::supplementary(lambda).unwrap()).unwrap();
            let prod = kernel_product(&k32, &noise);
            let report = maximality_check(&prod, &sampling, true).unwrap();
            assert_eq!(report.bound_failures, 0);
            assert_eq!(report.strict_failures, 0);
        }
    }

    #[test]
    fn conserved_currents_have_tiny_residuals() {
        let tm = kernel_terno_moretti(1.0).unwrap();
        assert!(conserved_check(&tm, 1000, 7).unwrap() <= 1e-12);
        let k32 = kernel_power(1.5).unwrap();
        assert!(conserved_check(&k32, 1000, 7).unwrap() <= 1e-12);
    }

    #[test]
    fn nwl_with_zero_current_fails_conservation() {
        let nwl = kernel_nwl();
        assert!(matches!(
            conserved_check(&nwl, 10, 1),
            Err(Error::MissingCurrent)
        ));
        let residual = conservation_residual(&nwl, &CurrentKernel::Zero, 100, 3);
        assert!(
            residual > 0.1,
            "the constant kernel is not conserved: {residual}"
        );
    }

    #[test]
    fn timelike_definiteness_of_causal_kernels() {
        let tm = kernel_terno_moretti(1.0).unwrap();
        let seeds: Vec<u64> = (0..50).collect();
        assert!(timelike_definite_check(&tm, 5, &seeds).unwrap() >= -1e-10);
        let k32 = kernel_power(1.5).unwrap();
        assert!(timelike_definite_check(&k32, 5, &seeds).unwrap() >= -1e-10);
    }

    #[test]
    fn single_point_current_is_subnormalized() {
        // n = 1, c = 1: K(p,p)^2 >= sum_i j_i(p,p)^2, i.e. |j(p,p)| <= 1.
        let mut rng = Rng::new(5);
        for kernel in [kernel_terno_moretti(1.0).unwrap(), kernel_power(1.5).unwrap()] {
            let current = kernel.current().unwrap();
            for _ in 0..50 {
                let p = rng.in_ball(10.0);
                let j = current.eval(p, p);
                let norm_sq = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];
                let t = kernel.eval(p, p);
                assert!(norm_sq <= t * t + 1e-13);
                for c in j {
                    assert!(c.abs() <= 3.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn shell_current_reproduces_kernel_and_is_conserved() {
        let profile = RadialProfile::power(1.5).unwrap();
        let kernel = kernel_causal(profile.clone()).unwrap();
        let energy = Energy::UNIT;
        let mut rng = Rng::new(13);
        for _ in 0..100 {
            let k = rng.in_box(7.0);
            let p = rng.in_box(7.0);
            let v = shell_current(&profile, k, p).unwrap();
            let normalized = v[0] / (energy.of(k) * energy.of(p)).sqrt();
            assert!((normalized - kernel.eval(k, p)).abs() <= 1e-13);
            // (k - p) . v with on-shell four-vectors vanishes by the
            // mass-shell identity.
            let dk = energy.of(k) - energy.of(p);
            let residual =
                dk * v[0] - (k.x - p.x) * v[1] - (k.y - p.y) * v[2] - (k.z - p.z) * v[3];
            assert!(residual.abs() < 1e-12);
        }
        // At k = p the current is g(m^2) p = p, so j(p,p) = p / eps(p).
        let p = Momentum3::new(0.2, -0.7, 1.1);
        let v = shell_current(&profile, p, p).unwrap();
        assert!((v[1] - p.x).abs() < 1e-14);
        assert!((v[2] - p.y).abs() < 1e-14);
        assert!((v[3] - p.z).abs() < 1e-14);
        let current = covariant_current_decompose(profile);
        let j = current.eval(p, p);
        let eps = energy.of(p);
        assert!((j[0] - p.x / eps).abs() < 1e-14);
    }

    #[test]
    fn shell_current_is_lorentz_covariant() {
        let profile = RadialProfile::power(1.5).unwrap();
        let mut rng = Rng::new(21);
        for _ in 0..50 {
            let boost = Boost {
                axis: rng.unit_vector(),
                chi: rng.range(-1.5, 1.5),
                mass: 1.0,
            };
            let k = rng.in_box(5.0);
            let p = rng.in_box(5.0);
            let v = shell_current(&profile, k, p).unwrap();
            let w = shell_current(&profile, boost.apply(k), boost.apply(p)).unwrap();
            // Boost v as a four-vector and compare.
            let ch = boost.chi.cosh();
            let sh = boost.chi.sinh();
            let spatial = Momentum3::new(v[1], v[2], v[3]);
            let along = spatial.dot(boost.axis);
            let v0 = v[0] * ch + along * sh;
            let vs = spatial + boost.axis.scale((ch - 1.0) * along + sh * v[0]);
            assert!((v0 - w[0]).abs() < 1e-9);
            assert!((vs.x - w[1]).abs() < 1e-9);
            assert!((vs.y - w[2]).abs() < 1e-9);
            assert!((vs.z - w[3]).abs() < 1e-9);
        }
    }

    #[test]
    fn nc_margin_nonnegative_for_pd_families() {
        // Profiles whose kernels pass the Gram suites satisfy NC.
        let grid = log_grid(0.05, 50.0, 25);
        for r in [1.5, 2.0, 3.0] {
            let g = RadialProfile::power(r).unwrap();
            let report = nc_check(&g, NcMode::WithPrefactor, &grid).unwrap();
            assert!(report.worst_margin >= -1e-8, "K_{r}");
        }
        for r in [0.5, 1.0] {
            let g = RadialProfile::power(r).unwrap();
            let report = nc_check(&g, NcMode::ProfileOnly, &grid).unwrap();
            assert!(report.worst_margin >= -1e-8, "profile {r}");
        }
    }
}
