//! Physical parameters and every derived scalar rate.
//!
//! All rates are stored in units of the cavity dissipation rate γ (γ = 1
//! internally); SI inputs are converted once at the boundary.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::golden_min;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8; // m/s
pub const HBAR: f64 = 1.054_571_817e-34; // J s
pub const BOLTZMANN: f64 = 1.380_649e-23; // J/K

/// A complex rate in units of γ; finite in both parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRate {
    pub re: f64,
    pub im: f64,
}

impl ComplexRate {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn as_c64(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<C64> for ComplexRate {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// How scatterer-induced loss enters the coherent detuning.
///
/// `Kappa`: Δ = Δ₀ + ε₁ + ε₂ keeps the scatterer imaginary parts, so the
/// total effective decay seen by the amplitudes is κ = γ + 2γ′.
/// `GammaOnly`: Δ = Δ₀ + Re(ε₁ + ε₂); only the bare cavity loss γ enters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossModel {
    #[default]
    Kappa,
    GammaOnly,
}

/// Effective κ used in the closed-form two-photon-suppression conditions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveKappa {
    /// γ + γ′ — the value that reproduces the reference angles.
    #[default]
    GammaPlusGammaPrime,
    /// γ + 2γ′ — the symbol-table definition of the total decay rate.
    GammaPlus2GammaPrime,
    GammaOnly,
}

/// All physical inputs, dimensionless in units of γ.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub eps1: ComplexRate,
    pub eps2: ComplexRate,
    pub sigma: u32,
    /// Relative angular position of the two scatterers, radians in [0, 2π).
    pub beta: f64,
    /// Single-photon Kerr shift χ/γ.
    pub chi: f64,
    /// Bare-cavity-to-laser detuning Δ₀/γ.
    pub delta0: f64,
    /// Drive amplitude ξ/γ.
    pub xi: f64,
    /// Fixed to 1 (unit of rate).
    #[serde(default = "one")]
    pub gamma: f64,
    /// Mean thermal photon number of the environment.
    #[serde(default)]
    pub nth: f64,
    #[serde(default)]
    pub loss_model: LossModel,
}

fn one() -> f64 {
    1.0
}

impl Default for SystemParams {
    /// The microtoroid working point used throughout: ε₁/γ = 1.5−0.1i,
    /// ε₂/γ = 1.485−0.14i, σ = 1, strong Kerr (n₂ = 3×10⁻¹⁴ m²/W), weak
    /// resonant drive.
    fn default() -> Self {
        let chi = kerr_coefficient(1550e-9, 3e-14, 1.4, 150e-18, 5e9).expect("valid defaults");
        Self {
            eps1: ComplexRate::new(1.5, -0.1),
            eps2: ComplexRate::new(1.485, -0.14),
            sigma: 1,
            beta: 0.5 * PI,
            chi,
            delta0: -2.985,
            xi: 0.25,
            gamma: 1.0,
            nth: 0.0,
            loss_model: LossModel::Kappa,
        }
    }
}

impl SystemParams {
    /// Validate invariants and normalize β into [0, 2π).
    pub fn validated(mut self) -> Result<Self> {
        if !(self.eps1.is_finite() && self.eps2.is_finite()) {
            return Err(Error::InvalidParameter("eps1/eps2 must be finite".into()));
        }
        if self.gamma != 1.0 {
            return Err(Error::InvalidParameter("gamma must be 1 (unit of rate)".into()));
        }
        if self.sigma < 1 {
            return Err(Error::InvalidParameter("sigma must be >= 1".into()));
        }
        if !(self.xi >= 0.0 && self.chi >= 0.0 && self.nth >= 0.0) {
            return Err(Error::InvalidParameter("xi, chi, nth must be >= 0".into()));
        }
        if !(self.beta.is_finite() && self.delta0.is_finite()) {
            return Err(Error::InvalidParameter("beta and delta0 must be finite".into()));
        }
        self.beta = self.beta.rem_euclid(2.0 * PI);
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta.rem_euclid(2.0 * PI);
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    /// Δ₀ such that the drive sits at the dressed resonance, Re(Δ) = 0.
    pub fn resonant_delta0(&self) -> f64 {
        -(self.eps1.re + self.eps2.re)
    }

    pub fn derived(&self) -> DerivedRates {
        let e1 = self.eps1.as_c64();
        let e2 = self.eps2.as_c64();
        let (j12, j21) = coupling_rates(e1, e2, self.sigma, self.beta);
        let delta = match self.loss_model {
            LossModel::Kappa => C64::new(self.delta0, 0.0) + e1 + e2,
            LossModel::GammaOnly => C64::new(self.delta0 + e1.re + e2.re, 0.0),
        };
        let gamma_prime = -(e1.im + e2.im);
        let kappa = self.gamma + 2.0 * gamma_prime;
        let delta1 = 2.0 * delta - C64::new(0.0, self.gamma);
        DerivedRates {
            j12: j12.into(),
            j21: j21.into(),
            delta: delta.into(),
            gamma_prime,
            kappa,
            delta1: delta1.into(),
            delta2: (delta1 + 2.0 * self.chi).into(),
            delta3: (delta1 + 4.0 * self.chi).into(),
            delta4: (3.0 * (delta1 + 4.0 * self.chi) - 8.0 * self.chi).into(),
        }
    }

    /// Effective κ value per convention.
    pub fn effective_kappa(&self, which: EffectiveKappa) -> f64 {
        let gp = -(self.eps1.im + self.eps2.im);
        match which {
            EffectiveKappa::GammaPlusGammaPrime => self.gamma + gp,
            EffectiveKappa::GammaPlus2GammaPrime => self.gamma + 2.0 * gp,
            EffectiveKappa::GammaOnly => self.gamma,
        }
    }
}

/// Every scalar derived from a `SystemParams`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DerivedRates {
    pub j12: ComplexRate,
    pub j21: ComplexRate,
    /// Δ = Δ₀ + ε₁ + ε₂ (imaginary part dropped under `GammaOnly`).
    pub delta: ComplexRate,
    /// γ′ = −Im(ε₁ + ε₂).
    pub gamma_prime: f64,
    /// κ = γ + 2γ′.
    pub kappa: f64,
    /// Δ₁ = 2Δ − iγ.
    pub delta1: ComplexRate,
    /// Δ₂ = Δ₁ + 2χ.
    pub delta2: ComplexRate,
    /// Δ₃ = Δ₁ + 4χ.
    pub delta3: ComplexRate,
    /// Δ₄ = 3Δ₃ − 8χ.
    pub delta4: ComplexRate,
}

/// Scatterer-induced coupling rates J₁₂ = ε₁ + ε₂ e^{+i2σβ} (CCW→CW, on
/// â₁†â₂) and J₂₁ = ε₁ + ε₂ e^{−i2σβ} (CW→CCW, on â₂†â₁).
pub fn coupling_rates(eps1: C64, eps2: C64, sigma: u32, beta: f64) -> (C64, C64) {
    let phase = C64::new(0.0, 2.0 * sigma as f64 * beta).exp();
    (eps1 + eps2 * phase, eps1 + eps2 * phase.conj())
}

/// χ/γ from SI inputs: χ = ħω²cn₂/(n₀²V_eff), γ = ω/Q, ω = 2πc/λ.
pub fn kerr_coefficient(lambda: f64, n2: f64, n0: f64, veff: f64, q: f64) -> Result<f64> {
    if !(lambda > 0.0 && n2 > 0.0 && n0 > 0.0 && veff > 0.0 && q > 0.0) {
        return Err(Error::InvalidParameter(
            "kerr_coefficient requires positive lambda, n2, n0, veff, q".into(),
        ));
    }
    let omega = 2.0 * PI * SPEED_OF_LIGHT / lambda;
    let chi = HBAR * omega * omega * SPEED_OF_LIGHT * n2 / (n0 * n0 * veff);
    let gamma = omega / q;
    Ok(chi / gamma)
}

/// Which coupling rate the phase condition drives to (near) zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VanishingCoupling {
    J12,
    J21,
}

/// One critical angle: the closed-form phase-condition angle, the nearby
/// numerically refined minimizer of the flagged |J|, and the residual |J|
/// there (zero only when |ε₁| = |ε₂|).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpAngle {
    pub beta_formula: f64,
    pub beta_refined: f64,
    pub vanishing: VanishingCoupling,
    pub min_abs_j: f64,
}

/// All critical angles β = zπ/(2σ) ∓ [arg ε₁ − arg ε₂]/(2σ) (z odd) in
/// [0, 2π); the minus branch zeroes the phase of J₂₁, the plus branch J₁₂.
pub fn ep_angles(eps1: C64, eps2: C64, sigma: u32) -> Result<Vec<EpAngle>> {
    if eps1.norm() == 0.0 || eps2.norm() == 0.0 {
        return Err(Error::InvalidParameter("ep_angles requires nonzero eps1, eps2".into()));
    }
    let s = sigma as f64;
    let argdiff = eps1.arg() - eps2.arg();
    let mut out = Vec::new();
    let two_pi = 2.0 * PI;
    let mut z = -(4 * sigma as i64 + 5);
    if z % 2 == 0 {
        z += 1;
    }
    while (z as f64) * PI / (2.0 * s) < two_pi + PI {
        for (sign, vanishing) in [(-1.0, VanishingCoupling::J21), (1.0, VanishingCoupling::J12)] {
            let beta = (z as f64) * PI / (2.0 * s) + sign * argdiff / (2.0 * s);
            if (0.0..two_pi).contains(&beta) {
                let flagged = |b: f64| {
                    let (j12, j21) = coupling_rates(eps1, eps2, sigma, b);
                    match vanishing {
                        VanishingCoupling::J12 => j12.norm(),
                        VanishingCoupling::J21 => j21.norm(),
                    }
                };
                let window = 0.05 * PI / s;
                let (beta_refined, min_abs_j) =
                    golden_min(flagged, beta - window, beta + window, 1e-13);
                out.push(EpAngle {
                    beta_formula: beta,
                    beta_refined,
                    vanishing,
                    min_abs_j,
                });
            }
        }
        z += 2;
    }
    out.sort_by(|a, b| a.beta_formula.partial_cmp(&b.beta_formula).unwrap());
    out.dedup_by(|a, b| {
        (a.beta_formula - b.beta_formula).abs() < 1e-12 && a.vanishing == b.vanishing
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NthConvention {
    #[default]
    BoseEinstein,
    PaperLiteral,
}

/// Mean thermal photon number at temperature `t_kelvin` for light of
/// wavelength `lambda`; `BoseEinstein` uses [e^{ħω/kT} − 1]⁻¹ and
/// `PaperLiteral` the bare exponential [e^{ħω/kT}]⁻¹.
pub fn nth_from_temperature(t_kelvin: f64, lambda: f64, convention: NthConvention) -> Result<f64> {
    if t_kelvin <= 0.0 {
        return Err(Error::InvalidParameter("temperature must be > 0".into()));
    }
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter("wavelength must be > 0".into()));
    }
    let omega = 2.0 * PI * SPEED_OF_LIGHT / lambda;
    let x = HBAR * omega / (BOLTZMANN * t_kelvin);
    Ok(match convention {
        NthConvention::BoseEinstein => 1.0 / (x.exp() - 1.0),
        NthConvention::PaperLiteral => (-x).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn eps_pair() -> (C64, C64) {
        (c(1.5, -0.1), c(1.485, -0.14))
    }

    #[test]
    fn coupling_at_zero_angle_is_sum() {
        let (e1, e2) = eps_pair();
        let (j12, j21) = coupling_rates(e1, e2, 1, 0.0);
        assert!((j12 - (e1 + e2)).norm() < 1e-15);
        assert!((j21 - (e1 + e2)).norm() < 1e-15);
    }

    #[test]
    fn coupling_at_half_pi_is_difference() {
        let (e1, e2) = eps_pair();
        let (j12, j21) = coupling_rates(e1, e2, 1, PI / 2.0);
        assert!((j12 - c(0.015, 0.04)).norm() < 1e-12);
        assert!((j21 - c(0.015, 0.04)).norm() < 1e-12);
    }

    #[test]
    fn coupling_near_critical_angle_is_small() {
        // at the phase-condition angle the CW-EP coupling J21 nearly vanishes
        let (e1, e2) = eps_pair();
        let (j12, j21) = coupling_rates(e1, e2, 1, 0.496 * PI);
        assert!(j21.norm() < 0.05, "|J21| = {}", j21.norm());
        assert!(j21.norm() < j12.norm());
    }

    #[test]
    fn coupling_conjugate_symmetry() {
        let (e1, e2) = eps_pair();
        for k in 0..17 {
            let beta = 2.0 * PI * k as f64 / 17.0;
            let (j12a, j21a) = coupling_rates(e1, e2, 1, beta);
            let (j12b, j21b) = coupling_rates(e1, e2, 1, 2.0 * PI - beta);
            assert!((j12a - j21b).norm() < 1e-12);
            assert!((j21a - j12b).norm() < 1e-12);
        }
    }

    #[test]
    fn coupling_product_is_pi_over_sigma_periodic() {
        let (e1, e2) = eps_pair();
        for sigma in [1u32, 2, 3] {
            for k in 0..7 {
                let beta = 2.0 * PI * k as f64 / 7.0;
                let (j12a, j21a) = coupling_rates(e1, e2, sigma, beta);
                let (j12b, j21b) = coupling_rates(e1, e2, sigma, beta + PI / sigma as f64);
                assert!((j12a * j21a - j12b * j21b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kerr_coefficient_matches_reference_points() {
        let chi = kerr_coefficient(1550e-9, 1e-15, 1.4, 150e-18, 5e9).unwrap();
        assert!((chi - 0.65).abs() < 0.01, "chi/gamma = {chi}");
        let chi3 = kerr_coefficient(1550e-9, 3e-15, 1.4, 150e-18, 5e9).unwrap();
        assert!((chi3 - 3.0 * chi).abs() < 1e-12);
        let strong = kerr_coefficient(1550e-9, 3e-14, 1.4, 150e-18, 5e9).unwrap();
        assert!((strong - 19.6).abs() < 0.1, "strong chi/gamma = {strong}");
    }

    #[test]
    fn kerr_coefficient_homogeneity() {
        let base = kerr_coefficient(1550e-9, 1e-15, 1.4, 150e-18, 5e9).unwrap();
        let n2x = kerr_coefficient(1550e-9, 2.5e-15, 1.4, 150e-18, 5e9).unwrap();
        assert!((n2x / base - 2.5).abs() < 1e-12);
        let vx = kerr_coefficient(1550e-9, 1e-15, 1.4, 300e-18, 5e9).unwrap();
        assert!((vx / base - 0.5).abs() < 1e-12);
        assert!(kerr_coefficient(-1.0, 1e-15, 1.4, 150e-18, 5e9).is_err());
    }

    #[test]
    fn ep_angles_reference_values() {
        let (e1, e2) = eps_pair();
        let angles = ep_angles(e1, e2, 1).unwrap();
        let cw: Vec<f64> = angles
            .iter()
            .filter(|a| a.vanishing == VanishingCoupling::J21)
            .map(|a| a.beta_formula / PI)
            .collect();
        assert_eq!(cw.len(), 2);
        assert!((cw[0] - 0.496).abs() < 5e-4, "beta_EP = {}pi", cw[0]);
        assert!((cw[1] - 1.496).abs() < 5e-4, "beta_EP = {}pi", cw[1]);
        // refined minimizer sits close to the formula angle with a small residual
        for a in &angles {
            assert!((a.beta_refined - a.beta_formula).abs() < 0.01 * PI);
            assert!(a.min_abs_j < 0.012);
        }
    }

    #[test]
    fn ep_angles_equal_real_scatterers() {
        let angles = ep_angles(c(1.0, 0.0), c(1.0, 0.0), 1).unwrap();
        let mut betas: Vec<f64> = angles.iter().map(|a| a.beta_formula / PI).collect();
        betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        betas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(betas.len(), 2);
        assert!((betas[0] - 0.5).abs() < 1e-12 && (betas[1] - 1.5).abs() < 1e-12);
        // exact zero of the flagged coupling when |eps1| = |eps2|
        for a in &angles {
            assert!(a.min_abs_j < 1e-12);
        }
        let angles2 = ep_angles(c(1.0, 0.0), c(1.0, 0.0), 2).unwrap();
        let mut betas2: Vec<f64> = angles2.iter().map(|a| a.beta_formula / PI).collect();
        betas2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        betas2.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(betas2, vec![0.25, 0.75, 1.25, 1.75]);
    }

    #[test]
    fn nth_temperature_reference_points() {
        let lit = nth_from_temperature(9000.0, 1550e-9, NthConvention::PaperLiteral).unwrap();
        assert!((lit - 0.36).abs() < 0.01, "literal nth = {lit}");
        let be = nth_from_temperature(9000.0, 1550e-9, NthConvention::BoseEinstein).unwrap();
        assert!((be - 0.56).abs() < 0.01, "BE nth = {be}");
        // both vanish at low temperature and increase monotonically
        for conv in [NthConvention::BoseEinstein, NthConvention::PaperLiteral] {
            let lo = nth_from_temperature(1.0, 1550e-9, conv).unwrap();
            assert!(lo < 1e-300);
            let mut prev = 0.0;
            for t in [100.0, 1000.0, 5000.0, 20000.0] {
                let n = nth_from_temperature(t, 1550e-9, conv).unwrap();
                assert!(n > prev);
                prev = n;
            }
        }
        assert!(nth_from_temperature(-3.0, 1550e-9, NthConvention::BoseEinstein).is_err());
    }

    #[test]
    fn derived_rates_identities() {
        let p = SystemParams::default().with_beta(0.37 * PI).validated().unwrap();
        let d = p.derived();
        let e2 = p.eps2.as_c64();
        let phase = C64::new(0.0, 2.0 * p.sigma as f64 * p.beta).exp();
        let lhs = d.j12.as_c64() - d.j21.as_c64();
        let rhs = e2 * (phase - phase.conj());
        assert!((lhs - rhs).norm() < 1e-14);
        assert!((d.delta2.as_c64() - d.delta1.as_c64() - 2.0 * p.chi).norm() < 1e-14);
        assert!((d.delta3.as_c64() - d.delta1.as_c64() - 4.0 * p.chi).norm() < 1e-14);
        assert!((d.delta4.as_c64() - (3.0 * d.delta3.as_c64() - 8.0 * p.chi)).norm() < 1e-14);
        assert!((d.kappa - 1.48).abs() < 1e-12);
        assert!((d.gamma_prime - 0.24).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let mut p = SystemParams::default();
        p.xi = -1.0;
        assert!(p.validated().is_err());
        let mut p = SystemParams::default();
        p.sigma = 0;
        assert!(p.validated().is_err());
        let p = SystemParams::default().with_beta(-0.5);
        let v = p.validated().unwrap();
        assert!((0.0..2.0 * PI).contains(&v.beta));
    }
}
