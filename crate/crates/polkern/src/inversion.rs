//! Principal-series inversion: from a profile g with |g(t)| <= kappa /
//! sinh(kappa) to its weight function
//! w(lambda) = (1/pi) int psi(x) e^{-i lambda x} dx,
//! psi(x) = d/dx (sinh(x) g(cosh x)), and back by
//! g(t) = int_0^inf sin(lambda kappa) / (lambda sinh kappa) w(lambda) dlambda.

use alloc::string::String;
use alloc::vec::Vec;

use crate::kernels::RadialProfile;
use crate::pd::{gram_test_scalar, GramReport};
use crate::specfun::{acosh_clamped, sinc, sinch, GaussLegendre};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

/// psi(x) = d/dx (sinh x g(cosh x)): analytic when the profile exposes a
/// derivative, otherwise Richardson-extrapolated central differences with
/// step 1e-5. Even in x with psi(0) = 1.
#[derive(Clone)]
pub struct Psi {
    profile: RadialProfile,
    analytic: bool,
}

/// Membership test for the principal-series class: |g(t)| must stay
/// within kappa / sinh(kappa); supplementary content breaks the bound at
/// large t.
fn check_principal_bound(profile: &RadialProfile) -> Result<()> {
    let mut t = 1.0;
    while t <= 1e6 {
        let kappa = acosh_clamped(t);
        let cap = 1.0 / sinch(kappa);
        if profile.eval_normalized(t).abs() > cap + 1e-9 {
            return Err(Error::Precondition(
                "profile exceeds the principal-series bound (supplementary content)",
            ));
        }
        t = (t * 1.23).max(t + 1e-3);
    }
    Ok(())
}

/// Build psi for a profile in the principal-series class.
pub fn psi_of(profile: &RadialProfile) -> Result<Psi> {
    check_principal_bound(profile)?;
    let analytic = profile.derivative_normalized(1.5).is_some();
    Ok(Psi {
        profile: profile.clone(),
        analytic,
    })
}

impl Psi {
    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if self.analytic {
            let u = x.cosh();
            let g = self.profile.eval_normalized(u);
            let dg = self
                .profile
                .derivative_normalized(u)
                .expect("analytic flag checked at construction");
            let sh = x.sinh();
            u * g + sh * sh * dg
        } else {
            let f = |y: f64| y.sinh() * self.profile.eval_normalized(y.cosh());
            let h = 1e-5;
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
            (4.0 * d2 - d1) / 3.0
        }
    }
}

/// Tabulated weight function on a uniform lambda grid from 0.
#[derive(Clone, Debug)]
pub struct WeightFunction {
    pub lambda_max: f64,
    pub values: Vec<f64>,
    /// Simpson mass of the tabulated density; 1 within 1e-6 on success.
    pub normalization: f64,
    /// Largest imaginary residue of the transform, reported for the
    /// evenness invariant.
    pub im_max: f64,
    pub source: String,
}

impl WeightFunction {
    pub fn lambda_grid(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n)
            .map(|i| self.lambda_max * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn eval_grid_index(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// Composite Simpson on a uniform grid; a 3/8 block absorbs an odd
/// interval count.
fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    if n == 2 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let intervals = n - 1;
    let (simpson_end, mut acc) = if intervals % 2 == 0 {
        (n - 1, 0.0)
    } else {
        // Last three intervals by Simpson 3/8.
        let m = n - 4;
        let tail = 3.0 * h / 8.0
            * (values[m] + 3.0 * values[m + 1] + 3.0 * values[m + 2] + values[m + 3]);
        (m, tail)
    };
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    acc
}

#[derive(Clone, Copy, Debug)]
pub struct InvertOptions {
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// Initial truncation of the x integral; grown adaptively until
    /// |psi| decays below 1e-10, within `x_cut_max`.
    pub x_cut: f64,
    pub x_cut_max: f64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            lambda_max: 12.0,
            n_lambda: 4096,
            x_cut: 40.0,
            x_cut_max: 320.0,
        }
    }
}

/// Recover the weight function of a principal-series profile. Fails when
/// psi does not decay (atoms in the mixing measure, e.g. an irreducible
/// profile) or when the recovered density is materially negative.
pub fn invert(profile: &RadialProfile, opts: &InvertOptions) -> Result<WeightFunction> {
    let psi = psi_of(profile)?;
    let mut x_cut = opts.x_cut;
    loop {
        let tail = psi.eval(x_cut).abs();
        if tail < 1e-10 {
            break;
        }
        x_cut *= 2.0;
        if x_cut > opts.x_cut_max {
            return Err(Error::TruncationFailure {
                at: x_cut / 2.0,
                value: tail,
            });
        }
    }

    // Fixed oscillation-aware panels shared by every lambda: width 1/2
    // gives about 12 points per period at the largest default lambda.
    let rule = GaussLegendre::new(12);
    let panels = (2.0 * x_cut).ceil() as usize;
    let mut nodes = Vec::with_capacity(panels * rule.order());
    let mut weights = Vec::with_capacity(panels * rule.order());
    let h = x_cut / panels as f64;
    for p in 0..panels {
        let lo = p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    let psi_vals: Vec<f64> = nodes.iter().map(|&x| psi.eval(x)).collect();

    let n = opts.n_lambda.max(2);
    let mut values = Vec::with_capacity(n);
    let mut im_max = 0.0_f64;
    for i in 0..n {
        let lambda = opts.lambda_max * i as f64 / (n - 1) as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for ((&x, &w), &p) in nodes.iter().zip(&weights).zip(&psi_vals) {
            let (s, c) = (lambda * x).sin_cos();
            // Both half-axes: psi is even, the sine parts cancel.
            re += w * p * (c + c);
            im += w * p * (s - s);
        }
        let v = re / core::f64::consts::PI;
        im_max = im_max.max((im / core::f64::consts::PI).abs());
        if v < -1e-8 {
            return Err(Error::NegativeWeight { lambda, value: v });
        }
        values.push(v);
    }

    let h_lambda = opts.lambda_max / (n - 1) as f64;
    let normalization = simpson_uniform(&values, h_lambda);
    if (normalization - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(
            "recovered weight function does not integrate to one",
        ));
    }
    Ok(WeightFunction {
        lambda_max: opts.lambda_max,
        values,
        normalization,
        im_max,
        source: profile.label(),
    })
}

/// Forward map: g(t) on a grid from a tabulated weight function, by
/// Simpson quadrature over the lambda grid.
pub fn forward(w: &WeightFunction, t_grid: &[f64]) -> Vec<f64> {
    let n = w.values.len();
    let h = w.lambda_max / (n - 1) as f64;
    t_grid
        .iter()
        .map(|&t| {
            let kappa = acosh_clamped(t);
            let sinch_k = sinch(kappa);
            let integrand: Vec<f64> = (0..n)
                .map(|i| {
                    let lambda = h * i as f64;
                    w.values[i] * sinc(lambda * kappa)
                })
                .collect();
            simpson_uniform(&integrand, h) / sinch_k
        })
        .collect()
}

/// Gram test of the stationary kernel (x, y) -> psi(x - y) on sampled
/// reals; PD on the sample is the empirical direction of the
/// principal-series membership.
pub fn psi_positive_type_check(
    profile: &RadialProfile,
    x_points: &[f64],
    tol: f64,
) -> Result<GramReport> {
    let psi = psi_of(profile)?;
    gram_test_scalar(|x, y| psi.eval(x - y), x_points, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pd::Verdict;
    use alloc::vec;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn psi_closed_form_for_power_one() {
        let g = RadialProfile::power(1.0).unwrap();
        let psi = psi_of(&g).unwrap();
        assert!(psi.is_analytic());
        assert!((psi.eval(0.0) - 1.0).abs() < 1e-12);
        for x in [0.3_f64, 1.0, 2.5, 7.0] {
            let expect = 2.0 / (1.0 + x.cosh());
            assert!((psi.eval(x) - expect).abs() < 1e-12, "x={x}");
            assert_eq!(psi.eval(-x), psi.eval(x));
        }
    }

    #[test]
    fn psi_closed_form_for_critical_power() {
        let g = RadialProfile::power(1.5).unwrap();
        let psi = psi_of(&g).unwrap();
        for x in [0.0_f64, 0.5, 2.0, 4.0] {
            let c = (0.5 * x).cosh();
            let expect = (2.0 - c * c) / (c * c * c);
            assert!((psi.eval(x) - expect).abs() < 1e-12, "x={x}");
        }
        // psi dips negative even though the profile is positive.
        assert!(psi.eval(2.0) < 0.0);
    }

    #[test]
    fn supplementary_profiles_are_rejected() {
        let g = RadialProfile::supplementary(0.5).unwrap();
        assert!(matches!(psi_of(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn finite_difference_path_matches_analytic() {
        // Wrap the power profile as a custom callback to force the FD
        // path, then compare against the analytic evaluation.
        let exact = RadialProfile::power(1.0).unwrap();
        let fd = RadialProfile::custom(|u| 2.0 / (1.0 + u), "wrapped").unwrap();
        let psi_fd = psi_of(&fd).unwrap();
        assert!(!psi_fd.is_analytic());
        let psi_exact = psi_of(&exact).unwrap();
        for x in [0.1, 1.0, 3.0, 10.0] {
            assert!(
                (psi_fd.eval(x) - psi_exact.eval(x)).abs() < 1e-10,
                "x = {x}"
            );
        }
    }

    #[test]
    fn weight_functions_match_closed_forms() {
        let opts = InvertOptions::default();
        let cases: [(f64, fn(f64) -> f64); 3] = [
            (1.0, |l| 4.0 * l / (core::f64::consts::PI * l).sinh()),
            (2.0, |l| {
                8.0 * l * l * l / (core::f64::consts::PI * l).sinh()
            }),
            (1.5, |l| {
                8.0 * l * l / (core::f64::consts::PI * l).cosh()
            }),
        ];
        for (r, closed) in cases {
            let g = RadialProfile::power(r).unwrap();
            let w = invert(&g, &opts).unwrap();
            let lambdas = w.lambda_grid();
            for (i, &l) in lambdas.iter().enumerate() {
                if !(0.1..=5.0).contains(&l) {
                    continue;
                }
                let expect = closed(l);
                assert!(
                    (w.values[i] - expect).abs() <= 1e-6 * expect.abs().max(1e-12),
                    "r={r} lambda={l}: {} vs {expect}",
                    w.values[i]
                );
            }
            assert!((w.normalization - 1.0).abs() < 1e-6, "r={r}");
            assert!(w.im_max <= 1e-9);
        }
        // Spot value w(1) for the first case, at the nearest grid node.
        let g = RadialProfile::power(1.0).unwrap();
        let w = invert(&g, &opts).unwrap();
        let lambdas = w.lambda_grid();
        let i = lambdas
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap()
            })
            .unwrap()
            .0;
        let expect = 4.0 * lambdas[i] / (core::f64::consts::PI * lambdas[i]).sinh();
        assert!((w.values[i] - expect).abs() < 1e-6);
        assert!((4.0 / core::f64::consts::PI.sinh() - 0.34636).abs() < 1e-5);
    }

    #[test]
    fn atoms_are_detected_and_rejected() {
        // kappa / sinh kappa has its whole mass at lambda = 0; psi = 1.
        let g = RadialProfile::principal(0.0).unwrap();
        assert!(matches!(
            invert(&g, &InvertOptions::default()),
            Err(Error::TruncationFailure { .. })
        ));
        // A pure oscillation (principal atom at lambda = 3) likewise.
        let g3 = RadialProfile::principal(3.0).unwrap();
        assert!(matches!(
            invert(&g3, &InvertOptions::default()),
            Err(Error::TruncationFailure { .. })
        ));
    }

    #[test]
    fn forward_reproduces_profiles() {
        let opts = InvertOptions::default();
        for r in [1.0, 1.5, 2.0] {
            let g = RadialProfile::power(r).unwrap();
            let w = invert(&g, &opts).unwrap();
            let ts: Vec<f64> = grid(1.0, 100.0, 60);
            let vals = forward(&w, &ts);
            for (t, v) in ts.iter().zip(&vals) {
                let expect = g.eval(*t);
                assert!(
                    (v - expect).abs() <= 1e-5 * expect.abs().max(1e-9),
                    "r={r} t={t}: {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn forward_of_point_mass_is_the_zero_profile() {
        // A point mass at lambda = 0, scaled so the endpoint Simpson
        // weight h/3 gives it unit mass; sinc(0) = 1 at every kappa, so
        // the forward map returns kappa / sinh(kappa) exactly.
        let n = 4096;
        let lambda_max = 12.0;
        let h = lambda_max / (n - 1) as f64;
        let mut values = vec![0.0; n];
        values[0] = 3.0 / h;
        let w = WeightFunction {
            lambda_max,
            values,
            normalization: 1.0,
            im_max: 0.0,
            source: "atom".into(),
        };
        let g0 = RadialProfile::principal(0.0).unwrap();
        let ts = [1.0, 2.0, 5.0, 20.0];
        let vals = forward(&w, &ts);
        for (t, v) in ts.iter().zip(&vals) {
            let expect = g0.eval(*t);
            assert!((v - expect).abs() < 1e-12, "t={t}: {v} vs {expect}");
        }
    }

    #[test]
    fn sine_integral_mixture_round_trip() {
        // The flat density on [0, 1].
        let n = 4096;
        let lambda_max = 12.0;
        let h = lambda_max / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let l = h * i as f64;
                if l <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let w = WeightFunction {
            lambda_max,
            values,
            normalization: 1.0,
            im_max: 0.0,
            source: "flat".into(),
        };
        // g(t) = Si(kappa) / sinh(kappa); integrate sinc to get Si.
        let si = |kappa: f64| {
            let rule = GaussLegendre::new(24);
            rule.integrate_panels(0.0, kappa, 1 + kappa as usize, sinc)
        };
        let ts = [1.0, 1.8, 4.0, 30.0];
        let vals = forward(&w, &ts);
        for (t, v) in ts.iter().zip(&vals) {
            let kappa = acosh_clamped(*t);
            let expect = if kappa == 0.0 {
                1.0
            } else {
                si(kappa) / kappa.sinh() * kappa / kappa
            };
            assert!(
                (v - expect).abs() < 2e-3 * expect.abs().max(1e-6),
                "t={t}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn positive_type_check_of_recoverable_profiles() {
        let xs: Vec<f64> = grid(-6.0, 6.0, 25);
        for r in [1.0, 1.5] {
            let g = RadialProfile::power(r).unwrap();
            let report = psi_positive_type_check(&g, &xs, 1e-10).unwrap();
            assert_eq!(report.verdict, Verdict::PdOnSample, "r = {r}");
        }
        // Supplementary content never reaches the Gram stage.
        let g = RadialProfile::supplementary(0.5).unwrap();
        assert!(psi_positive_type_check(&g, &xs, 1e-10).is_err());
    }

    #[test]
    fn simpson_handles_even_and_odd_interval_counts() {
        for n in [5usize, 6, 4096, 4097] {
            let h = 1.0 / (n - 1) as f64;
            let vals: Vec<f64> = (0..n).map(|i| (h * i as f64).powi(3)).collect();
            let got = simpson_uniform(&vals, h);
            assert!((got - 0.25).abs() < 1e-9, "n={n}: {got}");
        }
    }
}
