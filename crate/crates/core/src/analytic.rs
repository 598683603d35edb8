//! Closed-form weak-drive steady state through three excitations:
//! amplitudes, probabilities, excitation spectra, correlation functions,
//! two-photon-suppression angles, transition elements, and the photon
//! statistics regime classifier.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::params::{EffectiveKappa, SystemParams};

/// State order shared with `FockBasis::build(TotalExcitation(3))`.
pub const STATES: [(u32, u32); 10] =
    [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (0, 3), (1, 2), (2, 1), (3, 0)];

fn state_idx(m: u32, n: u32) -> usize {
    STATES.iter().position(|&s| s == (m, n)).expect("state within N<=3")
}

/// Scalar inputs the closed forms depend on. Built from a `SystemParams`
/// (Δ₁ = 2Δ − iγ with Δ per the loss model) or with an explicit effective
/// linewidth for the two-photon-suppression analysis.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeInputs {
    pub delta1: C64,
    pub j12: C64,
    pub j21: C64,
    pub chi: f64,
    pub xi: f64,
}

impl AmplitudeInputs {
    pub fn from_params(p: &SystemParams) -> Self {
        let d = p.derived();
        Self {
            delta1: d.delta1.as_c64(),
            j12: d.j12.as_c64(),
            j21: d.j21.as_c64(),
            chi: p.chi,
            xi: p.xi,
        }
    }

    /// Inputs with Δ₁ = 2 Re(Δ) − iκ_eff at angle `beta`.
    pub fn with_effective_kappa(
        p: &SystemParams,
        beta: f64,
        re_delta: f64,
        kappa: EffectiveKappa,
    ) -> Self {
        let (j12, j21) =
            crate::params::coupling_rates(p.eps1.as_c64(), p.eps2.as_c64(), p.sigma, beta);
        Self {
            delta1: C64::new(2.0 * re_delta, -p.effective_kappa(kappa)),
            j12,
            j21,
            chi: p.chi,
            xi: p.xi,
        }
    }
}

/// A denominator that came within `1e-9` of zero (reported, still evaluated).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoleProximity {
    pub denominator: &'static str,
    pub magnitude: f64,
}

/// Steady-state amplitudes C_mn for all m+n ≤ 3 (C₀₀ = 1) plus the
/// auxiliary scalars they are built from.
#[derive(Clone, Debug)]
pub struct AmplitudeSet {
    c: [C64; 10],
    pub eta1: C64,
    pub eta2: C64,
    pub eta3: C64,
    pub mu: C64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub pole_warnings: Vec<PoleProximity>,
}

impl AmplitudeSet {
    pub fn amplitude(&self, m: u32, n: u32) -> C64 {
        self.c[state_idx(m, n)]
    }

    pub fn amplitudes(&self) -> &[C64; 10] {
        &self.c
    }
}

/// Closed-form steady amplitudes for a parameter set.
pub fn steady_amplitudes(params: &SystemParams) -> AmplitudeSet {
    amplitudes_from(&AmplitudeInputs::from_params(params))
}

/// Closed-form steady amplitudes from explicit scalar inputs.
pub fn amplitudes_from(inp: &AmplitudeInputs) -> AmplitudeSet {
    let AmplitudeInputs { delta1: d1, j12, j21, chi, xi } = *inp;
    let d2 = d1 + 2.0 * chi;
    let d3 = d1 + 4.0 * chi;
    let d4 = 3.0 * d3 - 8.0 * chi;
    let jj = j12 * j21;
    let eta1 = 4.0 * jj - d1 * d1;
    let eta2 = 4.0 * jj - d1 * d2;
    let eta3 = 4.0 * jj - d3 * d4;
    let mu = 16.0 * jj * d3 * d3 - eta3 * eta3;
    let gamma1 = d1 * d1 * eta3 + chi * (4.0 * jj * eta3 + mu) / d2
        - d3 * (d1 + d2) * (4.0 * jj * d3 - d2 * eta3) / d2;
    let gamma2 =
        d3 * eta3 + 2.0 * d3 * d4 * (4.0 * chi + d4) - d3 * (8.0 * jj * d1 + d1 * eta3) / d2;

    let mut pole_warnings = Vec::new();
    for (name, den) in
        [("eta1", eta1), ("eta2", eta2), ("eta3", eta3), ("mu", mu), ("delta2", d2), ("delta3", d3)]
    {
        if den.norm() < 1e-9 {
            pole_warnings.push(PoleProximity { denominator: name, magnitude: den.norm() });
        }
    }

    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let mut c = [C64::new(0.0, 0.0); 10];
    c[state_idx(0, 0)] = C64::new(1.0, 0.0);
    c[state_idx(1, 0)] = 2.0 * xi * d1 / eta1;
    c[state_idx(0, 1)] = -4.0 * xi * j21 / eta1;
    c[state_idx(2, 0)] = 2.0 * s2 * xi * xi * (d1 * d1 + 4.0 * jj * chi / d2) / (eta1 * eta2);
    c[state_idx(1, 1)] = -4.0 * j21 * xi * xi * (d1 + d2) / (eta1 * eta2);
    c[state_idx(0, 2)] = 4.0 * s2 * j21 * j21 * xi * xi * (d1 / d2 + 1.0) / (eta1 * eta2);
    c[state_idx(3, 0)] = -4.0 * s6 * xi.powi(3) * (4.0 * jj * gamma1 + mu * d1 * d1)
        / (3.0 * mu * eta1 * eta2 * d3);
    c[state_idx(2, 1)] =
        8.0 * s2 * j21 * xi.powi(3) * (gamma1 - chi * mu / d2) / (mu * eta1 * eta2);
    c[state_idx(1, 2)] = 8.0 * s2 * j21 * j21 * xi.powi(3) * gamma2 / (mu * eta1 * eta2);
    c[state_idx(0, 3)] = -2.0 * j21 / (s3 * d3) * c[state_idx(1, 2)];

    AmplitudeSet { c, eta1, eta2, eta3, mu, gamma1, gamma2, pole_warnings }
}

/// Independent route to the same amplitudes: assemble the ten steady-state
/// equations of motion as a linear system and solve it by dense LU.
pub fn solve_steady_linear_system(inp: &AmplitudeInputs) -> Result<[C64; 10]> {
    let AmplitudeInputs { delta1: d1, j12, j21, chi, xi } = *inp;
    let d2 = d1 + 2.0 * chi;
    let d3 = d1 + 4.0 * chi;
    let d4 = 3.0 * d3 - 8.0 * chi;
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let ix = state_idx;
    let mut a = CMat::zeros(10, 10);
    let mut b = vec![C64::new(0.0, 0.0); 10];
    a[(0, ix(0, 0))] = C64::new(1.0, 0.0);
    b[0] = C64::new(1.0, 0.0);
    let rows: [(usize, Vec<(usize, C64)>); 9] = [
        (1, vec![(ix(1, 0), d1), (ix(0, 1), 2.0 * j12), (ix(0, 0), C64::from(2.0 * xi))]),
        (2, vec![(ix(0, 1), d1), (ix(1, 0), 2.0 * j21)]),
        (3, vec![(ix(2, 0), d2), (ix(1, 1), s2 * j12), (ix(1, 0), C64::from(s2 * xi))]),
        (
            4,
            vec![
                (ix(1, 1), d1),
                (ix(2, 0), s2 * j21),
                (ix(0, 2), s2 * j12),
                (ix(0, 1), C64::from(xi)),
            ],
        ),
        (5, vec![(ix(0, 2), d2), (ix(1, 1), s2 * j21)]),
        (
            6,
            vec![
                (ix(3, 0), 3.0 * d3),
                (ix(2, 1), 2.0 * s3 * j12),
                (ix(2, 0), C64::from(2.0 * s3 * xi)),
            ],
        ),
        (
            7,
            vec![
                (ix(2, 1), d4),
                (ix(3, 0), 2.0 * s3 * j21),
                (ix(1, 2), 4.0 * j12),
                (ix(1, 1), C64::from(2.0 * s2 * xi)),
            ],
        ),
        (
            8,
            vec![
                (ix(1, 2), d4),
                (ix(2, 1), 4.0 * j21),
                (ix(0, 3), 2.0 * s3 * j12),
                (ix(0, 2), C64::from(2.0 * xi)),
            ],
        ),
        (9, vec![(ix(0, 3), 3.0 * d3), (ix(1, 2), 2.0 * s3 * j21)]),
    ];
    for (r, terms) in rows {
        for (col, coef) in terms {
            a[(r, col)] = coef;
        }
    }
    let x = linalg::lu_solve(&a, &b)?;
    let mut out = [C64::new(0.0, 0.0); 10];
    out.copy_from_slice(&x);
    Ok(out)
}

/// Normalized occupation probabilities over the ten N ≤ 3 states.
#[derive(Clone, Debug)]
pub struct ProbabilitySet {
    p: [f64; 10],
    /// M = Σ |C_mn|².
    pub normalization: f64,
}

impl ProbabilitySet {
    pub fn probability(&self, m: u32, n: u32) -> f64 {
        self.p[state_idx(m, n)]
    }

    pub fn values(&self) -> &[f64; 10] {
        &self.p
    }

    /// Marginal CW photon distribution P(m) = Σ_n P_mn, m = 0..3.
    pub fn cw_marginal(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, &(m, _)) in STATES.iter().enumerate() {
            out[m as usize] += self.p[i];
        }
        out
    }
}

pub fn probabilities(amps: &AmplitudeSet) -> ProbabilitySet {
    let normalization: f64 = amps.c.iter().map(|z| z.norm_sqr()).sum();
    let mut p = [0.0; 10];
    for (o, z) in p.iter_mut().zip(&amps.c) {
        *o = z.norm_sqr() / normalization;
    }
    ProbabilitySet { p, normalization }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationVariant {
    /// All N ≤ 3 probabilities, Σ m(m−1)… moment sums.
    FullThreePhoton,
    /// Leading weak-drive ratios 2P₂₀/P₁₀², 6P₃₀/P₁₀³, …
    Approximate,
}

/// Equal-time correlation functions of both modes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorrelationSet {
    pub g2_11: f64,
    pub g2_22: f64,
    pub g2_12: f64,
    pub g3_11: f64,
    pub g3_22: f64,
    pub variant: CorrelationVariant,
}

impl CorrelationSet {
    /// True when a vanishing mean photon number forced an infinity.
    pub fn flagged(&self) -> bool {
        ![self.g2_11, self.g2_22, self.g2_12, self.g3_11, self.g3_22]
            .iter()
            .all(|v| v.is_finite())
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

pub fn correlations(probs: &ProbabilitySet, variant: CorrelationVariant) -> CorrelationSet {
    let p = |m: u32, n: u32| probs.probability(m, n);
    match variant {
        CorrelationVariant::FullThreePhoton => {
            let w11 = p(1, 0) + p(1, 1) + p(1, 2) + 2.0 * (p(2, 0) + p(2, 1)) + 3.0 * p(3, 0);
            let w22 = p(0, 1) + p(1, 1) + p(2, 1) + 2.0 * (p(0, 2) + p(1, 2)) + 3.0 * p(0, 3);
            CorrelationSet {
                g2_11: ratio(2.0 * (p(2, 0) + p(2, 1)) + 6.0 * p(3, 0), w11 * w11),
                g2_22: ratio(2.0 * (p(0, 2) + p(1, 2)) + 6.0 * p(0, 3), w22 * w22),
                g2_12: ratio(p(1, 1) + 2.0 * p(2, 1) + 2.0 * p(1, 2), w11 * w22),
                g3_11: ratio(6.0 * p(3, 0), w11.powi(3)),
                g3_22: ratio(6.0 * p(0, 3), w22.powi(3)),
                variant,
            }
        }
        CorrelationVariant::Approximate => CorrelationSet {
            g2_11: ratio(2.0 * p(2, 0), p(1, 0).powi(2)),
            g2_22: ratio(2.0 * p(0, 2), p(0, 1).powi(2)),
            g2_12: ratio(p(1, 1), p(1, 0) * p(0, 1)),
            g3_11: ratio(6.0 * p(3, 0), p(1, 0).powi(3)),
            g3_22: ratio(6.0 * p(0, 3), p(0, 1).powi(3)),
            variant,
        },
    }
}

/// Leading-order g²₁₁(0) = 2P₂₀/P₁₀² evaluated as moduli of the complex
/// amplitude ratio (never by squaring complex scalars).
pub fn g2_closed_form(params: &SystemParams) -> f64 {
    let amps = steady_amplitudes(params);
    let c20 = amps.amplitude(2, 0);
    let c10 = amps.amplitude(1, 0);
    2.0 * c20.norm_sqr() / c10.norm_sqr().powi(2)
}

/// One row of an excitation spectrum sweep.
pub type SpectrumRow = (f64, f64);

/// S_jj(Δ₀) = Σ m P_mn / n₀ with n₀ = ξ²/κ².
pub fn excitation_spectrum(
    params: &SystemParams,
    delta0_grid: &[f64],
    mode: crate::hilbert::Mode,
) -> Vec<SpectrumRow> {
    let kappa = params.derived().kappa;
    let n0 = (params.xi / kappa).powi(2);
    delta0_grid
        .iter()
        .map(|&d0| {
            let p = probabilities(&steady_amplitudes(&params.with_delta0(d0)));
            let s: f64 = STATES
                .iter()
                .zip(p.values())
                .map(|(&(m, n), &pv)| {
                    let occ = match mode {
                        crate::hilbert::Mode::Cw => m,
                        crate::hilbert::Mode::Ccw => n,
                    };
                    occ as f64 * pv
                })
                .sum();
            (d0, s / n0)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpbMode {
    /// Closed-form angles at exact resonance Re(Δ) = 0.
    ResonantClosedForm,
    /// Companion-matrix roots of the real cubic in Re(Δ), paired with the
    /// matching angles; these are true zeros of C₂₀.
    GeneralCubic,
}

/// One two-photon-suppression operating point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UpbSolution {
    pub beta: f64,
    /// Re(Δ) from the cubic; `None` in resonant mode (Re(Δ) = 0 assumed).
    pub re_delta: Option<f64>,
}

/// Angles (and detunings) where destructive interference empties the
/// two-photon state, C₂₀ → 0.
pub fn upb_angles(
    params: &SystemParams,
    mode: UpbMode,
    kappa: EffectiveKappa,
) -> Result<Vec<UpbSolution>> {
    let e1 = params.eps1.as_c64();
    let e2 = params.eps2.as_c64();
    let kap = params.effective_kappa(kappa);
    let chi = params.chi;
    let sigma = params.sigma as f64;
    let two_pi = 2.0 * PI;
    let mut out = Vec::new();
    match mode {
        UpbMode::ResonantClosedForm => {
            let num = e1.im * e1.im + e2.im * e2.im - e1.re * e1.re - e2.re * e2.re
                + 0.5 * kap * kap;
            let den = 2.0 * (e1.re * e2.re - e1.im * e2.im);
            if den == 0.0 {
                return Err(Error::InvalidParameter("degenerate scatterers: D2 = 0".into()));
            }
            let arg = num / den;
            if arg.abs() > 1.0 {
                return Ok(out); // no solution
            }
            let theta = arg.acos();
            let mut p = 0i64;
            while (p as f64) * PI / sigma < two_pi + PI {
                for s in [1.0, -1.0] {
                    let beta = (p as f64) * PI / sigma + s * theta / (2.0 * sigma);
                    if (0.0..two_pi).contains(&beta) {
                        out.push(UpbSolution { beta, re_delta: None });
                    }
                }
                p += 1;
            }
        }
        UpbMode::GeneralCubic => {
            let d1 = e1.re * e1.re - e1.im * e1.im + e2.re * e2.re - e2.im * e2.im;
            let d2c = 2.0 * (e1.re * e2.re - e1.im * e2.im);
            let d3c = 2.0 * (e1.re * e1.im + e2.re * e2.im);
            let d4c = 2.0 * (e1.re * e2.im + e1.im * e2.re);
            if d4c == 0.0 || chi == 0.0 {
                return Err(Error::InvalidParameter(
                    "general cubic needs D4 != 0 and chi > 0".into(),
                ));
            }
            // x³ + c2 x² + c1 x + c0 = 0 for x = Re(Δ)
            let c2 = chi + 1.5 * kap * d2c / d4c;
            let c1 = -0.75 * kap * kap + chi * kap * d2c / d4c;
            let c0 = 0.5 * chi * (d1 - d2c * d3c / d4c) - kap.powi(3) * d2c / (8.0 * d4c)
                - 0.25 * chi * kap * kap;
            let mut comp = CMat::zeros(3, 3);
            comp[(0, 2)] = C64::new(-c0, 0.0);
            comp[(1, 2)] = C64::new(-c1, 0.0);
            comp[(2, 2)] = C64::new(-c2, 0.0);
            comp[(1, 0)] = C64::new(1.0, 0.0);
            comp[(2, 1)] = C64::new(1.0, 0.0);
            let roots = linalg::eigen(&comp)?.values;
            let scale = 1.0 + c0.abs().max(c1.abs()).max(c2.abs());
            for r in roots {
                if r.im.abs() > 1e-8 * scale {
                    continue;
                }
                let x = r.re;
                let cos2b = (3.0 * kap * x * x + 2.0 * chi * kap * x - chi * d3c
                    - 0.25 * kap.powi(3))
                    / (chi * d4c);
                if cos2b.abs() > 1.0 {
                    continue;
                }
                let theta = cos2b.acos();
                let mut p = 0i64;
                while (p as f64) * PI / sigma < two_pi + PI {
                    for s in [1.0, -1.0] {
                        let beta = ((2.0 * p as f64) * PI + s * theta) / (2.0 * sigma);
                        if (0.0..two_pi).contains(&beta) {
                            out.push(UpbSolution { beta, re_delta: Some(x) });
                        }
                    }
                    p += 1;
                }
            }
        }
    }
    out.sort_by(|a, b| a.beta.partial_cmp(&b.beta).unwrap());
    out.dedup_by(|a, b| (a.beta - b.beta).abs() < 1e-12);
    Ok(out)
}

/// Angles pπ/σ in [0, 2π) where single-photon interference maximizes
/// photon-induced tunneling.
pub fn pit_angles(sigma: u32) -> Vec<f64> {
    let s = sigma as f64;
    (0..2 * sigma).map(|p| p as f64 * PI / s).collect()
}

/// Squared drive matrix elements between the one- and two-excitation
/// eigenstates: u^s from ψ₁⁻, w^s from ψ₁⁺.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransitionElements {
    pub u0: f64,
    pub up: f64,
    pub um: f64,
    pub w0: f64,
    pub wp: f64,
    pub wm: f64,
}

pub fn transition_elements(params: &SystemParams) -> TransitionElements {
    let d = params.derived();
    let j12 = d.j12.as_c64();
    let j21 = d.j21.as_c64();
    let xi = params.xi;
    let n1 = 1.0 / (j21.norm() + j12.norm()).sqrt();
    // ψ₁^± = (±√J₂₁, √J₁₂)·N₁ over (|0,1⟩, |1,0⟩)
    let one = |sign: f64| (sign * j21.sqrt() * n1, j12.sqrt() * n1);
    let dp = -params.chi + (C64::from(params.chi * params.chi) + 4.0 * j12 * j21).sqrt();
    let dm = -params.chi - (C64::from(params.chi * params.chi) + 4.0 * j12 * j21).sqrt();
    // ψ₂^s = (√2 J₂₁, δ₂^s, √2 J₁₂)·N₂ over (|0,2⟩, |1,1⟩, |2,0⟩)
    let two = |d2s: C64| {
        let n2 = 1.0
            / (2.0 * j21.norm_sqr() + d2s.norm_sqr() + 2.0 * j12.norm_sqr()).sqrt();
        (2f64.sqrt() * j21 * n2, d2s * n2, 2f64.sqrt() * j12 * n2)
    };
    let element = |sign: f64, d2s: C64| {
        let (c01, c10) = one(sign);
        let (_c02, c11, c20) = two(d2s);
        xi * xi * (c01 * c11.conj() + 2f64.sqrt() * c10 * c20.conj()).norm_sqr()
    };
    TransitionElements {
        u0: element(-1.0, C64::new(0.0, 0.0)),
        up: element(-1.0, dp),
        um: element(-1.0, dm),
        w0: element(1.0, C64::new(0.0, 0.0)),
        wp: element(1.0, dp),
        wm: element(1.0, dm),
    }
}

/// Deviation R(m) = [P_m − 𝒫_m]/𝒫_m of a photon-number marginal from the
/// Poisson distribution with the same mean. `None` marks entries where
/// 𝒫_m underflows.
pub fn relative_distribution(marginal: &[f64]) -> Result<Vec<Option<f64>>> {
    let mean: f64 = marginal.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    if mean <= 0.0 {
        return Err(Error::InvalidParameter(
            "relative_distribution needs a positive mean photon number".into(),
        ));
    }
    let mut out = Vec::with_capacity(marginal.len());
    let mut log_fact = 0.0;
    for (m, &p) in marginal.iter().enumerate() {
        if m > 0 {
            log_fact += (m as f64).ln();
        }
        let log_poisson = m as f64 * mean.ln() - mean - log_fact;
        if log_poisson < -690.0 {
            out.push(None);
        } else {
            let poisson = log_poisson.exp();
            out.push(Some((p - poisson) / poisson));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OnePb,
    TwoPb,
    Pit,
    None,
}

/// Classification with the inequality evidence it was based on.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegimeLabel {
    pub label: Regime,
    /// Set when a OnePb point coincides with an interference
    /// (two-photon-suppression) angle.
    pub interference: bool,
    pub g2: f64,
    pub g3: f64,
    pub local_min: bool,
    pub local_max: bool,
}

/// Tolerance used by the UPB annotation on β agreement.
pub const UPB_ANNOTATION_TOL: f64 = 0.02 * PI;
const EXTREMUM_REL_TOL: f64 = 1e-6;

/// Apply the regime criteria in the order 2PB → 1PB → PIT.
///
/// `stencil` holds g² on a local grid around the classified point (center
/// value included, ≥ 3 points). `distance_to_upb` is the |β − β_UPB| of the
/// nearest suppression angle, when known.
pub fn classify_regime(
    g2: f64,
    g3: f64,
    stencil: &[f64],
    distance_to_upb: Option<f64>,
) -> Result<RegimeLabel> {
    if stencil.len() < 3 {
        return Err(Error::InvalidParameter("classifier stencil needs >= 3 points".into()));
    }
    let mid = stencil.len() / 2;
    let left = stencil[..mid].iter().copied().fold(f64::INFINITY, f64::min);
    let right = stencil[mid + 1..].iter().copied().fold(f64::INFINITY, f64::min);
    let center = stencil[mid];
    let local_min = center * (1.0 + EXTREMUM_REL_TOL) < left && center * (1.0 + EXTREMUM_REL_TOL) < right;
    let left_max = stencil[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let right_max = stencil[mid + 1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let local_max = center > left_max * (1.0 + EXTREMUM_REL_TOL)
        && center > right_max * (1.0 + EXTREMUM_REL_TOL);
    let label = if g2 > 1.0 && g3 < 1.0 {
        Regime::TwoPb
    } else if g2 < 1.0 && local_min {
        Regime::OnePb
    } else if g2 > 1.0 && g3 > 1.0 && local_max {
        Regime::Pit
    } else {
        Regime::None
    };
    let interference = label == Regime::OnePb
        && distance_to_upb.map(|d| d.abs() < UPB_ANNOTATION_TOL).unwrap_or(false);
    Ok(RegimeLabel { label, interference, g2, g3, local_min, local_max })
}
