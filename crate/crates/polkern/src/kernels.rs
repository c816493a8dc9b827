//! Every kernel family as an evaluable, immutable object: the constant
//! Newton-Wigner kernel, the two finite kernels with causal time
//! evolution, the causal family (energy prefactor times a normalized
//! radial profile of the Minkowski product), Lorentz-invariant profile
//! kernels and their principal/supplementary mixtures, kernels rebuilt
//! from Legendre coefficient data, and pointwise products and shell
//! normalizations of all of these.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::specfun::{self, Energy, Momentum3};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

pub const DEFAULT_MASS: f64 = 1.0;

/// (eps(k) + eps(p)) / (2 sqrt(eps(k) eps(p))), the energy prefactor of
/// the causal family. Always >= 1.
pub fn energy_prefactor(energy: Energy, k: Momentum3, p: Momentum3) -> f64 {
    let ek = energy.of(k);
    let ep = energy.of(p);
    (ek + ep) / (2.0 * (ek * ep).sqrt())
}

// ---------------------------------------------------------------------------
// Radial profiles
// ---------------------------------------------------------------------------

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum ProfileKind {
    /// g_r(t) = (2 m^2)^r (m^2 + t)^{-r}
    Power { r: f64 },
    /// sin(lambda kappa) / (lambda sinh kappa), kappa = acosh(t / m^2)
    Principal { lambda: f64 },
    /// sinh(lambda kappa) / (lambda sinh kappa)
    Supplementary { lambda: f64 },
    Mixture(MixtureSpec),
    /// exp(-kappa^2 / (2 sigma^2))
    Gaussian { sigma: f64 },
    Product(Arc<RadialProfile>, Arc<RadialProfile>),
    Custom { eval: ProfileFn, label: String },
}

/// The scalar function g on [m^2, inf) with g(m^2) = 1 defining a
/// covariant kernel.
#[derive(Clone)]
pub struct RadialProfile {
    kind: ProfileKind,
    mass: f64,
}

/// Which irreducible series a profile belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrreducibleKind {
    Principal,
    Supplementary,
}

impl RadialProfile {
    fn from_kind(kind: ProfileKind) -> Self {
        RadialProfile { kind, mass: DEFAULT_MASS }
    }

    /// g_r; positive definite profile kernel exactly for r >= 1/2 and
    /// causal kernel exactly for r >= 3/2.
    pub fn power(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain("power profile needs r > 0"));
        }
        Ok(Self::from_kind(ProfileKind::Power { r }))
    }

    pub fn principal(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain("principal series needs lambda >= 0"));
        }
        Ok(Self::from_kind(ProfileKind::Principal { lambda }))
    }

    pub fn supplementary(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain("supplementary series needs lambda in [0, 1]"));
        }
        Ok(Self::from_kind(ProfileKind::Supplementary { lambda }))
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain("gaussian profile needs sigma > 0"));
        }
        Ok(Self::from_kind(ProfileKind::Gaussian { sigma }))
    }

    pub fn mixture(spec: MixtureSpec) -> Self {
        Self::from_kind(ProfileKind::Mixture(spec))
    }

    /// Pointwise product; normalization is preserved.
    pub fn product(a: RadialProfile, b: RadialProfile) -> Self {
        let mass = a.mass;
        RadialProfile {
            kind: ProfileKind::Product(Arc::new(a), Arc::new(b)),
            mass,
        }
    }

    /// A profile supplied as an evaluation callback in the normalized
    /// variable u = t / m^2; must satisfy g(1) = 1.
    pub fn custom(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Result<Self> {
        let eval: ProfileFn = Arc::new(eval);
        if (eval(1.0) - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition("custom profile must satisfy g(1) = 1"));
        }
        Ok(Self::from_kind(ProfileKind::Custom { eval, label: label.into() }))
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain("mass must be positive"));
        }
        self.mass = mass;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Evaluate g at t >= m^2 (values within rounding slack below m^2 are
    /// clamped to the threshold).
    pub fn eval(&self, t: f64) -> f64 {
        let u = (t / (self.mass * self.mass)).max(1.0);
        self.eval_normalized(u)
    }

    /// Evaluate in the normalized variable u = t / m^2 >= 1.
    pub fn eval_normalized(&self, u: f64) -> f64 {
        let u = u.max(1.0);
        match &self.kind {
            ProfileKind::Power { r } => (2.0 / (1.0 + u)).powf(*r),
            ProfileKind::Principal { lambda } => {
                let kappa = specfun::acosh_clamped(u);
                specfun::sinc(*lambda * kappa) / specfun::sinch(kappa)
            }
            ProfileKind::Supplementary { lambda } => {
                let kappa = specfun::acosh_clamped(u);
                specfun::sinch(*lambda * kappa) / specfun::sinch(kappa)
            }
            ProfileKind::Gaussian { sigma } => {
                let kappa = specfun::acosh_clamped(u);
                (-kappa * kappa / (2.0 * sigma * sigma)).exp()
            }
            ProfileKind::Mixture(spec) => spec.eval_normalized(u),
            ProfileKind::Product(a, b) => a.eval_normalized(u) * b.eval_normalized(u),
            ProfileKind::Custom { eval, .. } => eval(u),
        }
    }

    /// Analytic derivative dg/du in the normalized variable, where the
    /// family exposes one.
    pub fn derivative_normalized(&self, u: f64) -> Option<f64> {
        match &self.kind {
            ProfileKind::Power { r } => {
                Some(-r * 2.0_f64.powf(*r) * (1.0 + u).powf(-r - 1.0))
            }
            ProfileKind::Product(a, b) => {
                let da = a.derivative_normalized(u)?;
                let db = b.derivative_normalized(u)?;
                Some(da * b.eval_normalized(u) + a.eval_normalized(u) * db)
            }
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            ProfileKind::Power { r } => format!("power_r{{{r}}}"),
            ProfileKind::Principal { lambda } => format!("principal{{{lambda}}}"),
            ProfileKind::Supplementary { lambda } => format!("supplementary{{{lambda}}}"),
            ProfileKind::Gaussian { sigma } => format!("gaussian{{{sigma}}}"),
            ProfileKind::Mixture(_) => "mixture{spec}".to_owned(),
            ProfileKind::Product(a, b) => format!("product({},{})", a.label(), b.label()),
            ProfileKind::Custom { label, .. } => format!("custom({label})"),
        }
    }

    /// True when the profile is a pure principal-series object whose
    /// mixing measure has a density (no atoms), which is what the
    /// inversion formula recovers.
    pub fn is_power_family(&self) -> bool {
        matches!(&self.kind, ProfileKind::Power { .. })
    }
}

/// Construct an irreducible profile of either series.
pub fn profile_irreducible(kind: IrreducibleKind, lambda: f64) -> Result<RadialProfile> {
    match kind {
        IrreducibleKind::Principal => RadialProfile::principal(lambda),
        IrreducibleKind::Supplementary => RadialProfile::supplementary(lambda),
    }
}

/// Construct the mixture profile of (GLIPDK-type) principal and
/// supplementary parts.
pub fn profile_mixture(spec: MixtureSpec) -> RadialProfile {
    RadialProfile::mixture(spec)
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

/// Principal-series density tabulated on a uniform lambda grid starting
/// at zero.
#[derive(Clone, Debug)]
pub struct DensityGrid {
    pub lambda_max: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// Tabulate a density callback on a uniform grid.
    pub fn tabulate(w: impl Fn(f64) -> f64, lambda_max: f64, points: usize) -> Self {
        let n = points.max(2);
        let values = (0..n)
            .map(|i| w(lambda_max * i as f64 / (n - 1) as f64))
            .collect();
        DensityGrid { lambda_max, values }
    }

    fn step(&self) -> f64 {
        self.lambda_max / (self.values.len() - 1) as f64
    }

    /// Trapezoid mass of the tabulated density.
    fn total(&self) -> f64 {
        let h = self.step();
        let n = self.values.len();
        let mut acc = 0.5 * (self.values[0] + self.values[n - 1]);
        for v in &self.values[1..n - 1] {
            acc += v;
        }
        acc * h
    }

    /// Trapezoid integral of w(lambda) sinc(lambda kappa).
    fn sinc_integral(&self, kappa: f64) -> f64 {
        let h = self.step();
        let n = self.values.len();
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let lambda = h * i as f64;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * v * specfun::sinc(lambda * kappa);
        }
        acc * h
    }
}

/// A finite mixing measure: principal atoms (lambda >= 0), an optional
/// principal density, and supplementary atoms (lambda in (0, 1]). The
/// total weight must be 1; for specs with a density the grid mass is
/// validated to 1e-6 and the residual renormalized away so that
/// g(m^2) = 1 holds exactly.
#[derive(Clone)]
pub struct MixtureSpec {
    principal_atoms: Vec<(f64, f64)>,
    supplementary_atoms: Vec<(f64, f64)>,
    density: Option<DensityGrid>,
    scale: f64,
}

impl MixtureSpec {
    pub fn new(
        principal_atoms: Vec<(f64, f64)>,
        supplementary_atoms: Vec<(f64, f64)>,
        density: Option<DensityGrid>,
    ) -> Result<Self> {
        for &(l, w) in &principal_atoms {
            if !(l >= 0.0) || !(w > 0.0) {
                return Err(Error::Domain("principal atoms need lambda >= 0, weight > 0"));
            }
        }
        for &(l, w) in &supplementary_atoms {
            if !(l > 0.0 && l <= 1.0) || !(w > 0.0) {
                return Err(Error::Domain(
                    "supplementary atoms need lambda in (0, 1], weight > 0",
                ));
            }
        }
        let atom_total: f64 = principal_atoms
            .iter()
            .chain(&supplementary_atoms)
            .map(|&(_, w)| w)
            .sum();
        let density_total = density.as_ref().map(DensityGrid::total).unwrap_or(0.0);
        if density_total < 0.0 {
            return Err(Error::Domain("density must be nonnegative"));
        }
        let total = atom_total + density_total;
        let tol = if density.is_some() { 1e-6 } else { 1e-12 };
        if (total - 1.0).abs() > tol {
            return Err(Error::WeightSum { total });
        }
        Ok(MixtureSpec {
            principal_atoms,
            supplementary_atoms,
            density,
            scale: 1.0 / total,
        })
    }

    pub fn principal_atoms(&self) -> &[(f64, f64)] {
        &self.principal_atoms
    }

    pub fn supplementary_atoms(&self) -> &[(f64, f64)] {
        &self.supplementary_atoms
    }

    pub fn density(&self) -> Option<&DensityGrid> {
        self.density.as_ref()
    }

    fn eval_normalized(&self, u: f64) -> f64 {
        let kappa = specfun::acosh_clamped(u);
        let sinch_k = specfun::sinch(kappa);
        let mut acc = 0.0;
        for &(l, w) in &self.principal_atoms {
            acc += w * specfun::sinc(l * kappa);
        }
        for &(l, w) in &self.supplementary_atoms {
            acc += w * specfun::sinch(l * kappa);
        }
        if let Some(d) = &self.density {
            acc += d.sinc_integral(kappa);
        }
        self.scale * acc / sinch_k
    }
}

// ---------------------------------------------------------------------------
// Currents
// ---------------------------------------------------------------------------

/// Three Hermitian companion kernels certifying conservation and
/// timelike definiteness.
#[derive(Clone)]
pub enum CurrentKernel {
    /// j(k, p) = (eps(p) k + eps(k) p) / (2 eps(k) eps(p))
    TernoMoretti { energy: Energy },
    /// j(k, p) = g(kp) (k + p) / (2 sqrt(eps(k) eps(p))), the spatial part
    /// of the covariant four-current divided by the shell factor.
    Covariant { profile: RadialProfile },
    Zero,
}

impl CurrentKernel {
    pub fn eval(&self, k: Momentum3, p: Momentum3) -> [f64; 3] {
        match self {
            CurrentKernel::TernoMoretti { energy } => {
                let ek = energy.of(k);
                let ep = energy.of(p);
                let v = k.scale(ep) + p.scale(ek);
                [
                    v.x / (2.0 * ek * ep),
                    v.y / (2.0 * ek * ep),
                    v.z / (2.0 * ek * ep),
                ]
            }
            CurrentKernel::Covariant { profile } => {
                let energy = Energy::new(profile.mass()).expect("profile mass validated");
                let ek = energy.of(k);
                let ep = energy.of(p);
                let g = profile.eval(energy.minkowski(k, p));
                let denom = 2.0 * (ek * ep).sqrt();
                let v = k + p;
                [g * v.x / denom, g * v.y / denom, g * v.z / denom]
            }
            CurrentKernel::Zero => [0.0; 3],
        }
    }

    pub fn component(&self, i: usize, k: Momentum3, p: Momentum3) -> f64 {
        self.eval(k, p)[i]
    }
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

/// Declared symmetry class of a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryClass {
    RotationInvariant,
    LorentzInvariantProfile,
    EnergyPrefactorProfile,
    FiniteSum,
    OneDimensional,
}

type CoeffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type KernelFn = Arc<dyn Fn(Momentum3, Momentum3) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Form {
    Nwl,
    TernoMoretti,
    TraceCt,
    /// Energy prefactor times g of the Minkowski product.
    Causal(RadialProfile),
    /// g of the Minkowski product alone (a Lorentz-invariant kernel).
    Profile(RadialProfile),
    FromCoefficients { coeffs: Arc<[CoeffFn]> },
    Product(Arc<Kernel>, Arc<Kernel>),
    Shell(Arc<Kernel>),
    Custom(KernelFn),
}

/// An evaluable Hermitian two-point function on momentum space. All
/// built-ins are real-valued, rotation invariant and normalized on the
/// diagonal; immutable and cheap to clone.
#[derive(Clone)]
pub struct Kernel {
    form: Form,
    class: SymmetryClass,
    energy: Energy,
    profile: Option<RadialProfile>,
    current: Option<CurrentKernel>,
    label: String,
}

impl Kernel {
    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn mass(&self) -> f64 {
        self.energy.mass()
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        self.profile.as_ref()
    }

    pub fn current(&self) -> Option<&CurrentKernel> {
        self.current.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Replace the attached current.
    pub fn with_current(mut self, current: CurrentKernel) -> Self {
        self.current = Some(current);
        self
    }

    /// True for families normalized to K(p, p) = 1.
    pub fn is_normalized(&self) -> bool {
        !matches!(self.form, Form::Shell(_))
    }

    pub fn eval(&self, k: Momentum3, p: Momentum3) -> f64 {
        self.try_eval(k, p).expect("kernel evaluation failed")
    }

    pub fn try_eval(&self, k: Momentum3, p: Momentum3) -> Result<f64> {
        match &self.form {
            Form::Nwl => Ok(1.0),
            Form::TernoMoretti => {
                let m = self.energy.mass();
                let ek = self.energy.of(k);
                let ep = self.energy.of(p);
                Ok(0.5 * (1.0 + (m * m + k.dot(p)) / (ek * ep)))
            }
            Form::TraceCt => {
                let m = self.energy.mass();
                let ek = self.energy.of(k);
                let ep = self.energy.of(p);
                let nk = m + ek;
                let np = m + ep;
                Ok(0.5 * (nk * np + k.dot(p)) / (ek * nk * ep * np).sqrt())
            }
            Form::Causal(g) => {
                let pre = energy_prefactor(self.energy, k, p);
                Ok(pre * g.eval(self.energy.minkowski(k, p)))
            }
            Form::Profile(g) => Ok(g.eval(self.energy.minkowski(k, p))),
            Form::FromCoefficients { coeffs } => {
                let sk = k.norm();
                let sp = p.norm();
                if sk == 0.0 || sp == 0.0 {
                    return Err(Error::Domain(
                        "coefficient kernels are defined on momentum space minus the origin",
                    ));
                }
                let x = (k.dot(p) / (sk * sp)).clamp(-1.0, 1.0);
                let ps = specfun::legendre_seq(coeffs.len() - 1, x)?;
                let mut acc = 0.0;
                for (j, c) in coeffs.iter().enumerate() {
                    acc += c(sk, sp) * ps[j];
                }
                Ok(acc)
            }
            Form::Product(a, b) => Ok(a.try_eval(k, p)? * b.try_eval(k, p)?),
            Form::Shell(inner) => {
                let ek = inner.energy.of(k);
                let ep = inner.energy.of(p);
                Ok((ek * ep).sqrt() * inner.try_eval(k, p)?)
            }
            Form::Custom(f) => Ok(f(k, p)),
        }
    }

    /// The zonal section k(sigma, rho, x) = K(sigma e3, rho (0, sqrt(1 - x^2), x)).
    pub fn zonal(&self, sigma: f64, rho: f64, x: f64) -> Result<f64> {
        if x.abs() > 1.0 + specfun::DOMAIN_SLACK {
            return Err(Error::Domain("zonal angle must lie in [-1, 1]"));
        }
        let x = x.clamp(-1.0, 1.0);
        let k = Momentum3::new(0.0, 0.0, sigma);
        let p = Momentum3::new(0.0, rho * (1.0 - x * x).max(0.0).sqrt(), rho * x);
        self.try_eval(k, p)
    }
}

/// The Newton-Wigner kernel, constant 1.
pub fn kernel_nwl() -> Kernel {
    Kernel {
        form: Form::Nwl,
        class: SymmetryClass::FiniteSum,
        energy: Energy::UNIT,
        profile: None,
        current: None,
        label: "nwl".to_owned(),
    }
}

/// The finite kernel (1 + (m^2 + k.p)/(eps(k) eps(p)))/2 with its
/// conserved timelike-definite current attached.
pub fn kernel_terno_moretti(mass: f64) -> Result<Kernel> {
    let energy = Energy::new(mass)?;
    Ok(Kernel {
        form: Form::TernoMoretti,
        class: SymmetryClass::FiniteSum,
        energy,
        profile: None,
        current: Some(CurrentKernel::TernoMoretti { energy }),
        label: "terno_moretti".to_owned(),
    })
}

/// The finite kernel of the trace of a projection-valued localization
/// with causal time evolution.
pub fn kernel_tct(mass: f64) -> Result<Kernel> {
    let energy = Energy::new(mass)?;
    Ok(Kernel {
        form: Form::TraceCt,
        class: SymmetryClass::FiniteSum,
        energy,
        profile: None,
        current: None,
        label: "tct".to_owned(),
    })
}

/// A causal-family kernel: energy prefactor times g of the Minkowski
/// product, with the covariant current attached.
pub fn kernel_causal(profile: RadialProfile) -> Result<Kernel> {
    let energy = Energy::new(profile.mass())?;
    let label = format!("causal[{}]", profile.label());
    Ok(Kernel {
        form: Form::Causal(profile.clone()),
        class: SymmetryClass::EnergyPrefactorProfile,
        energy,
        profile: Some(profile.clone()),
        current: Some(CurrentKernel::Covariant { profile }),
        label,
    })
}

/// The Lorentz-invariant kernel g(eps(k) eps(p) - k.p) without the
/// energy prefactor.
pub fn kernel_profile(profile: RadialProfile) -> Result<Kernel> {
    let energy = Energy::new(profile.mass())?;
    let label = format!("profile[{}]", profile.label());
    Ok(Kernel {
        form: Form::Profile(profile.clone()),
        class: SymmetryClass::LorentzInvariantProfile,
        energy,
        profile: Some(profile),
        current: None,
        label,
    })
}

/// Rebuild a rotation-invariant kernel from radial coefficient kernels:
/// K(k, p) = sum_j k_j(|k|, |p|) P_j(cos angle). The partial diagonal
/// sums must stay within 1e-9 above 1 on a radial test grid.
pub fn kernel_from_coefficients(coeffs: Vec<CoeffFn>, mass: f64) -> Result<Kernel> {
    if coeffs.is_empty() {
        return Err(Error::Precondition("need at least one coefficient kernel"));
    }
    let energy = Energy::new(mass)?;
    for rho in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let total: f64 = coeffs.iter().map(|c| c(rho, rho)).sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::NormalizationExcess { excess: total - 1.0 });
        }
    }
    Ok(Kernel {
        form: Form::FromCoefficients { coeffs: coeffs.into() },
        class: SymmetryClass::RotationInvariant,
        energy,
        profile: None,
        current: None,
        label: "from_coefficients".to_owned(),
    })
}

/// Shell normalization: pointwise multiplication by sqrt(eps(k) eps(p)).
pub fn kernel_to_shell(kernel: &Kernel) -> Kernel {
    let energy = kernel.energy;
    let label = format!("shell[{}]", kernel.label);
    Kernel {
        form: Form::Shell(Arc::new(kernel.clone())),
        class: SymmetryClass::RotationInvariant,
        energy,
        profile: kernel.profile.clone(),
        current: None,
        label,
    }
}

/// Pointwise product of two kernels on a common domain. Diagonal
/// normalization is preserved. If both factors carry a profile the
/// product profile is attached so causal machinery keeps working.
pub fn kernel_product(a: &Kernel, b: &Kernel) -> Kernel {
    let profile = match (&a.profile, &b.profile) {
        (Some(pa), Some(pb)) => Some(RadialProfile::product(pa.clone(), pb.clone())),
        _ => None,
    };
    let class = if a.class == SymmetryClass::EnergyPrefactorProfile
        || b.class == SymmetryClass::EnergyPrefactorProfile
    {
        SymmetryClass::EnergyPrefactorProfile
    } else {
        SymmetryClass::RotationInvariant
    };
    let current = match (&profile, class) {
        (Some(p), SymmetryClass::EnergyPrefactorProfile) => {
            Some(CurrentKernel::Covariant { profile: p.clone() })
        }
        _ => None,
    };
    let label = format!("product({},{})", a.label, b.label);
    Kernel {
        form: Form::Product(Arc::new(a.clone()), Arc::new(b.clone())),
        class,
        energy: a.energy,
        profile,
        current,
        label,
    }
}

/// A kernel from a raw evaluation callback (assumed Hermitian).
pub fn kernel_custom(
    f: impl Fn(Momentum3, Momentum3) -> f64 + Send + Sync + 'static,
    mass: f64,
    label: impl Into<String>,
) -> Result<Kernel> {
    Ok(Kernel {
        form: Form::Custom(Arc::new(f)),
        class: SymmetryClass::RotationInvariant,
        energy: Energy::new(mass)?,
        profile: None,
        current: None,
        label: label.into(),
    })
}

/// Shorthand for the causal kernel K_r.
pub fn kernel_power(r: f64) -> Result<Kernel> {
    kernel_causal(RadialProfile::power(r)?)
}
