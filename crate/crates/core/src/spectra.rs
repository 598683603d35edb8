//! Eigensystems of the non-Hermitian Hamiltonian (closed form and numeric),
//! critical-angle scans, the derived jump operator √(−2iĤ₋), and the full
//! Liouvillian superoperator with its own degeneracy scan.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    build_hamiltonian, mode_operator, FockBasis, HamiltonianVariant, Mode, OperatorMatrix, OpKind,
    Truncation,
};
use crate::linalg::{self, CMat};
use crate::params::SystemParams;
use crate::util::golden_min;

/// Eigenpairs over one excitation subspace (or a full matrix).
#[derive(Clone, Debug)]
pub struct SubspaceEigensystem {
    /// `Some(n)` for the closed-form N-excitation block, `None` for a full
    /// numeric decomposition.
    pub n_excitations: Option<u32>,
    pub eigenvalues: Vec<C64>,
    /// Unit-norm coefficient vectors over the subspace basis, one per value.
    pub eigenvectors: Vec<Vec<C64>>,
    pub normalized: bool,
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v {
            *z /= n;
        }
    }
}

/// Analytic eigensystem of the isolated Hamiltonian in the 0-, 1- or
/// 2-excitation subspace (basis ordered by m ascending, as in `FockBasis`).
///
/// N = 1: E = ω ± δ₁, δ₁ = √(J₁₂J₂₁), vectors ∝ (±√J₂₁, √J₁₂).
/// N = 2: E = 2ω + 2χ + δ₂^s with δ₂^± = −χ ± √(χ² + 4J₁₂J₂₁), δ₂⁰ = 0,
/// vectors ∝ (√2 J₂₁, δ₂^s, √2 J₁₂); returned in order [+, 0, −].
pub fn closed_form_eigensystem(params: &SystemParams, n: u32) -> Result<SubspaceEigensystem> {
    if n > 2 {
        return Err(Error::InvalidParameter(
            "closed forms cover n <= 2; use numeric_eigensystem".into(),
        ));
    }
    let d = params.derived();
    let j12 = d.j12.as_c64();
    let j21 = d.j21.as_c64();
    let omega = params.eps1.as_c64() + params.eps2.as_c64();
    let (eigenvalues, mut eigenvectors) = match n {
        0 => (vec![C64::new(0.0, 0.0)], vec![vec![C64::new(1.0, 0.0)]]),
        1 => {
            let delta1 = (j12 * j21).sqrt();
            (
                vec![omega + delta1, omega - delta1],
                vec![vec![j21.sqrt(), j12.sqrt()], vec![-j21.sqrt(), j12.sqrt()]],
            )
        }
        _ => {
            let chi = params.chi;
            let root = (C64::from(chi * chi) + 4.0 * j12 * j21).sqrt();
            let deltas = [-chi + root, C64::new(0.0, 0.0), -chi - root];
            let base = 2.0 * omega + 2.0 * chi;
            let s2 = 2f64.sqrt();
            (
                deltas.iter().map(|&d2| base + d2).collect(),
                deltas.iter().map(|&d2| vec![s2 * j21, d2, s2 * j12]).collect(),
            )
        }
    };
    for v in &mut eigenvectors {
        normalize(v);
    }
    Ok(SubspaceEigensystem { n_excitations: Some(n), eigenvalues, eigenvectors, normalized: true })
}

/// Numeric eigensystem of an arbitrary operator matrix (Hessenberg + shifted
/// QR, Schur-vector back substitution).
pub fn numeric_eigensystem(matrix: &OperatorMatrix) -> Result<SubspaceEigensystem> {
    eigensystem_of(matrix.mat())
}

/// Same, for a bare matrix.
pub fn eigensystem_of(m: &CMat) -> Result<SubspaceEigensystem> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension("eigensystem needs a nonempty square matrix".into()));
    }
    let eig = linalg::eigen(m)?;
    let n = m.rows();
    let eigenvectors = (0..n)
        .map(|j| (0..n).map(|i| eig.vectors[(i, j)]).collect())
        .collect();
    Ok(SubspaceEigensystem {
        n_excitations: None,
        eigenvalues: eig.values,
        eigenvectors,
        normalized: true,
    })
}

/// Extract the N-excitation diagonal block of an operator built on a
/// total-excitation basis.
pub fn subspace_block(op: &OperatorMatrix, n: u32) -> Result<CMat> {
    let basis = op.basis();
    let idx: Vec<usize> = basis
        .states()
        .iter()
        .enumerate()
        .filter(|(_, &(m, nn))| m + nn == n)
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() {
        return Err(Error::Dimension(format!("basis holds no N = {n} states")));
    }
    Ok(CMat::from_fn(idx.len(), idx.len(), |i, j| op.mat()[(idx[i], idx[j])]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpKind {
    Hamiltonian,
    Liouvillian,
}

/// A candidate degeneracy: refined local gap minimum with the eigenvector
/// coalescence measure at that point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpReport {
    pub beta: f64,
    pub gap_abs: f64,
    /// |⟨ψ_a|ψ_b⟩| of the normalized tracked pair.
    pub overlap: f64,
    pub kind: EpKind,
    /// Excitation subspace for Hamiltonian scans; `None` for full spectra.
    pub subspace: Option<u32>,
    pub is_ep: bool,
}

/// One grid point of a scan curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpCurvePoint {
    pub beta: f64,
    pub gap: ComplexPair,
    pub overlap: f64,
    pub is_ep: bool,
}

/// Serializable complex value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexPair {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug)]
pub struct EpScan {
    pub curve: Vec<EpCurvePoint>,
    pub reports: Vec<EpReport>,
}

#[derive(Clone, Copy, Debug)]
pub struct EpScanConfig {
    pub gap_tol: f64,
    pub overlap_tol: f64,
    /// Refinement tolerance on β.
    pub tol_beta: f64,
}

impl Default for EpScanConfig {
    fn default() -> Self {
        Self { gap_tol: 1e-2, overlap_tol: 1e-2, tol_beta: 1e-4 * PI }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidParameter("scan grid needs at least 3 points".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("scan grid must be strictly increasing".into()));
    }
    Ok(())
}

fn pair_overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

/// Gap and coalescence measure of the tracked Hamiltonian pair at one angle:
/// N = 1 uses (E₁⁺, E₁⁻); N = 2 uses (E₂⁺, E₂⁰).
fn hamiltonian_pair(params: &SystemParams, beta: f64, subspace: u32) -> Result<(C64, f64)> {
    let p = params.with_beta(beta.rem_euclid(2.0 * PI));
    let eig = closed_form_eigensystem(&p, subspace)?;
    let (a, b) = match subspace {
        1 => (0usize, 1usize),
        2 => (0usize, 1usize),
        _ => return Err(Error::InvalidParameter("scan subspace must be 1 or 2".into())),
    };
    let gap = eig.eigenvalues[a] - eig.eigenvalues[b];
    let overlap = pair_overlap(&eig.eigenvectors[a], &eig.eigenvectors[b]);
    Ok((gap, overlap))
}

fn minima_reports(
    grid: &[f64],
    gaps: &[f64],
    mut gap_at: impl FnMut(f64) -> Result<f64>,
    mut pair_at: impl FnMut(f64) -> Result<(C64, f64)>,
    kind: EpKind,
    subspace: Option<u32>,
    config: &EpScanConfig,
) -> Result<Vec<EpReport>> {
    let mut reports = Vec::new();
    for i in 1..grid.len() - 1 {
        if gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1] {
            let mut err = None;
            let (beta, _) = golden_min(
                |b| match gap_at(b) {
                    Ok(g) => g,
                    Err(e) => {
                        err = Some(e);
                        f64::INFINITY
                    }
                },
                grid[i - 1],
                grid[i + 1],
                config.tol_beta,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let (gap, overlap) = pair_at(beta)?;
            let gap_abs = gap.norm();
            reports.push(EpReport {
                beta,
                gap_abs,
                overlap,
                kind,
                subspace,
                is_ep: gap_abs < config.gap_tol && overlap > 1.0 - config.overlap_tol,
            });
        }
    }
    Ok(reports)
}

/// Scan the closed-form Hamiltonian gap over a β grid, refine every local
/// minimum, and flag coalescences.
pub fn hamiltonian_ep_scan(
    params: &SystemParams,
    beta_grid: &[f64],
    subspace: u32,
    config: &EpScanConfig,
) -> Result<EpScan> {
    check_grid(beta_grid)?;
    let mut curve = Vec::with_capacity(beta_grid.len());
    let mut gaps = Vec::with_capacity(beta_grid.len());
    for &beta in beta_grid {
        let (gap, overlap) = hamiltonian_pair(params, beta, subspace)?;
        gaps.push(gap.norm());
        curve.push(EpCurvePoint {
            beta,
            gap: gap.into(),
            overlap,
            is_ep: gap.norm() < config.gap_tol && overlap > 1.0 - config.overlap_tol,
        });
    }
    let reports = minima_reports(
        beta_grid,
        &gaps,
        |b| hamiltonian_pair(params, b, subspace).map(|(g, _)| g.norm()),
        |b| hamiltonian_pair(params, b, subspace),
        EpKind::Hamiltonian,
        Some(subspace),
        config,
    )?;
    Ok(EpScan { curve, reports })
}

/// Jump operator Γ̂ = √(−2iĤ₋) for an anti-Hermitian Ĥ₋.
///
/// −2iĤ₋ is Hermitian; its unitary eigendecomposition M = U D U† gives
/// Γ = U √D U† with the principal branch per eigenvalue (negative entries
/// map to +i√|·|).
pub fn gamma_jump_operator(antihermitian_part: &OperatorMatrix) -> Result<OperatorMatrix> {
    let a = antihermitian_part.mat();
    let scale = a.max_abs().max(1.0);
    let defect = a.add(&a.adjoint()).max_abs();
    if defect > 1e-12 * scale {
        return Err(Error::HermitianityViolation(defect));
    }
    let m = a.scale(C64::new(0.0, -2.0));
    let (w, u) = linalg::eigen_hermitian(&m)?;
    let n = m.rows();
    let mut sq = CMat::zeros(n, n);
    for (i, &lambda) in w.iter().enumerate() {
        sq[(i, i)] = if lambda >= 0.0 {
            C64::new(lambda.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-lambda).sqrt())
        };
    }
    let gamma = u.mul(&sq).mul(&u.adjoint());
    OperatorMatrix::new(antihermitian_part.basis().clone(), gamma)
}

/// Dense d²×d² Liouvillian in the column-stacking convention,
/// A ρ B ↦ (Bᵀ ⊗ A)·vec(ρ).
#[derive(Clone, Debug)]
pub struct LiouvillianMatrix {
    basis: Arc<FockBasis>,
    mat: CMat,
}

/// Vectorization convention tag for dumps and cross-checks.
pub const VECTORIZATION: &str = "column-stacking";

impl LiouvillianMatrix {
    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.mat.rows()
    }

    /// Hilbert-space dimension d (matrix is d²×d²).
    pub fn hilbert_dim(&self) -> usize {
        self.basis.dim()
    }
}

fn dissipator_into(l: &mut CMat, a: &CMat) {
    let d = a.rows();
    let id = CMat::identity(d);
    let ada = a.adjoint().mul(a);
    let one = C64::new(1.0, 0.0);
    let half = C64::new(-0.5, 0.0);
    // A ρ A† -> (conj(A) ⊗ A)
    let jump = a.conj().kron(a);
    CMat::mul_acc(&jump, &CMat::identity(d * d), one, l);
    // -(1/2){A†A, ρ} -> -(I ⊗ A†A + (A†A)ᵀ ⊗ I)/2
    let lhs = id.kron(&ada).add(&ada.transpose().kron(&id)).scale(half);
    *l = l.add(&lhs);
}

/// Build the full Liouvillian Lρ = −i[Ĥ₊, ρ] + Σⱼ D(ρ, √γ âⱼ) + D(ρ, Γ̂).
///
/// Without drive, Ĥ± partition the isolated Hamiltonian (the degeneracy
/// analysis); with drive, the rotating-frame driven Hamiltonian.
pub fn liouvillian_matrix(
    params: &SystemParams,
    basis: &Arc<FockBasis>,
    include_drive: bool,
) -> Result<LiouvillianMatrix> {
    let d = basis.dim();
    if d * d > crate::hilbert::DEFAULT_DIMENSION_CAP {
        return Err(Error::DimensionCap(d * d, crate::hilbert::DEFAULT_DIMENSION_CAP));
    }
    let variant =
        if include_drive { HamiltonianVariant::RotatingDriven } else { HamiltonianVariant::Isolated };
    let h = build_hamiltonian(params, basis, variant)?;
    let (hplus, hminus) = h.hermitian_split();
    let gamma_op = gamma_jump_operator(&hminus)?;
    let id = CMat::identity(d);
    let hp = hplus.mat();
    let mut l = id
        .kron(hp)
        .scale(C64::new(0.0, -1.0))
        .add(&hp.transpose().kron(&id).scale(C64::new(0.0, 1.0)));
    let sqrt_gamma = params.gamma.sqrt();
    let a1 = mode_operator(basis, Mode::Cw, OpKind::Annihilate).mat().scale(sqrt_gamma.into());
    let a2 = mode_operator(basis, Mode::Ccw, OpKind::Annihilate).mat().scale(sqrt_gamma.into());
    dissipator_into(&mut l, &a1);
    dissipator_into(&mut l, &a2);
    dissipator_into(&mut l, gamma_op.mat());
    Ok(LiouvillianMatrix { basis: basis.clone(), mat: l })
}

/// How the tracked Liouvillian eigenvalue pair is designated at the first
/// grid point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackedPair {
    /// The two eigenmatrices living in the |1-excitation⟩⟨vacuum| coherence
    /// sector (the slowest pair whose gap mirrors the Hamiltonian splitting).
    #[default]
    CoherenceSector,
    /// The two nonzero eigenvalues of smallest |Re λ|.
    SmallestReal,
}

#[derive(Clone, Copy, Debug)]
pub struct LiouvillianScanConfig {
    pub truncation: Truncation,
    pub tracked_pair: TrackedPair,
    pub ep: EpScanConfig,
    /// Second-nearest/nearest distance ratio below which tracking is
    /// declared ambiguous.
    pub ambiguity_ratio: f64,
}

impl Default for LiouvillianScanConfig {
    fn default() -> Self {
        Self {
            truncation: Truncation::TotalExcitation(2),
            tracked_pair: TrackedPair::CoherenceSector,
            ep: EpScanConfig::default(),
            ambiguity_ratio: 0.5,
        }
    }
}

struct LiouvillianEigs {
    values: Vec<C64>,
    /// Normalized vectorized eigenmatrices (columns of the eigenbasis).
    vectors: Vec<Vec<C64>>,
}

fn liouvillian_eigs(params: &SystemParams, basis: &Arc<FockBasis>) -> Result<LiouvillianEigs> {
    let l = liouvillian_matrix(params, basis, false)?;
    let eig = linalg::eigen(l.mat())?;
    let n = l.dimension();
    let vectors = (0..n)
        .map(|j| (0..n).map(|i| eig.vectors[(i, j)]).collect::<Vec<C64>>())
        .collect();
    Ok(LiouvillianEigs { values: eig.values, vectors })
}

/// Frobenius weight of a vectorized eigenmatrix inside the
/// (N_row = 1, N_col = 0) coherence sector.
fn coherence_sector_weight(basis: &FockBasis, vec_rho: &[C64]) -> f64 {
    let d = basis.dim();
    let mut inside = 0.0;
    let mut total = 0.0;
    for col in 0..d {
        let (mc, nc) = basis.states()[col];
        for row in 0..d {
            let (mr, nr) = basis.states()[row];
            let w = vec_rho[col * d + row].norm_sqr();
            total += w;
            if mr + nr == 1 && mc + nc == 0 {
                inside += w;
            }
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

fn select_pair(
    basis: &FockBasis,
    eigs: &LiouvillianEigs,
    rule: TrackedPair,
) -> Result<(usize, usize)> {
    match rule {
        TrackedPair::CoherenceSector => {
            let hits: Vec<usize> = (0..eigs.values.len())
                .filter(|&i| coherence_sector_weight(basis, &eigs.vectors[i]) > 0.99)
                .collect();
            if hits.len() != 2 {
                return Err(Error::NonConvergence {
                    what: "coherence-sector pair selection".into(),
                    detail: format!("found {} sector eigenmatrices, expected 2", hits.len()),
                });
            }
            Ok((hits[0], hits[1]))
        }
        TrackedPair::SmallestReal => {
            let scale = eigs.values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
            let mut idx: Vec<usize> = (0..eigs.values.len())
                .filter(|&i| eigs.values[i].norm() > 1e-9 * scale)
                .collect();
            idx.sort_by(|&a, &b| {
                eigs.values[a].re.abs().partial_cmp(&eigs.values[b].re.abs()).unwrap()
            });
            if idx.len() < 2 {
                return Err(Error::NonConvergence {
                    what: "smallest-Re pair selection".into(),
                    detail: "fewer than two nonzero eigenvalues".into(),
                });
            }
            Ok((idx[0], idx[1]))
        }
    }
}

/// Nearest-neighbor continuation of a tracked pair into a fresh spectrum.
fn match_pair(
    prev: (C64, C64),
    values: &[C64],
    beta: f64,
    ambiguity_ratio: f64,
) -> Result<(usize, usize)> {
    let nearest = |target: C64, exclude: Option<usize>| -> (usize, f64, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = f64::INFINITY;
        for (i, &v) in values.iter().enumerate() {
            if Some(i) == exclude {
                continue;
            }
            let dist = (v - target).norm();
            if dist < best.1 {
                second = best.1;
                best = (i, dist);
            } else if dist < second {
                second = dist;
            }
        }
        (best.0, best.1, second)
    };
    let (ia, da, _) = nearest(prev.0, None);
    let (ib, db, _) = nearest(prev.1, Some(ia));
    // ambiguity: a third eigenvalue nearly as close as the chosen match
    for (target, chosen, dist, other) in [(prev.0, ia, da, ib), (prev.1, ib, db, ia)] {
        let mut third = f64::INFINITY;
        for (i, &v) in values.iter().enumerate() {
            if i == chosen || i == other {
                continue;
            }
            third = third.min((v - target).norm());
        }
        if third.is_finite() && dist > ambiguity_ratio * third {
            return Err(Error::TrackingLost { beta, ratio: dist / third });
        }
    }
    Ok((ia, ib))
}

/// Scan the tracked Liouvillian eigenvalue pair over β (driveless analysis;
/// the drive never enters).
pub fn liouvillian_ep_scan(
    params: &SystemParams,
    beta_grid: &[f64],
    config: &LiouvillianScanConfig,
) -> Result<EpScan> {
    check_grid(beta_grid)?;
    let basis = FockBasis::build(config.truncation)?;
    let mut curve = Vec::with_capacity(beta_grid.len());
    let mut gaps = Vec::with_capacity(beta_grid.len());
    let mut tracked: Option<(C64, C64)> = None;
    for &beta in beta_grid {
        let p = params.with_beta(beta.rem_euclid(2.0 * PI));
        let eigs = liouvillian_eigs(&p, &basis)?;
        let (ia, ib) = match tracked {
            None => select_pair(&basis, &eigs, config.tracked_pair)?,
            Some(prev) => match_pair(prev, &eigs.values, beta, config.ambiguity_ratio)?,
        };
        let (va, vb) = (eigs.values[ia], eigs.values[ib]);
        tracked = Some((va, vb));
        let gap = va - vb;
        let overlap = pair_overlap(&eigs.vectors[ia], &eigs.vectors[ib]);
        gaps.push(gap.norm());
        curve.push(EpCurvePoint {
            beta,
            gap: gap.into(),
            overlap,
            is_ep: gap.norm() < config.ep.gap_tol && overlap > 1.0 - config.ep.overlap_tol,
        });
    }
    // refine local minima, re-tracking from the nearest coarse point
    let pair_at = |b: f64, reference: (C64, C64)| -> Result<(C64, f64)> {
        let p = params.with_beta(b.rem_euclid(2.0 * PI));
        let eigs = liouvillian_eigs(&p, &basis)?;
        let (ia, ib) = match_pair(reference, &eigs.values, b, config.ambiguity_ratio)?;
        let gap = eigs.values[ia] - eigs.values[ib];
        Ok((gap, pair_overlap(&eigs.vectors[ia], &eigs.vectors[ib])))
    };
    let mut reports = Vec::new();
    for i in 1..beta_grid.len() - 1 {
        if gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1] {
            let reference = (
                C64::new(curve[i].gap.re, curve[i].gap.im), // placeholder, replaced below
                C64::new(0.0, 0.0),
            );
            let _ = reference;
            // reference pair from the coarse grid point i
            let pref = params.with_beta(beta_grid[i].rem_euclid(2.0 * PI));
            let eigs = liouvillian_eigs(&pref, &basis)?;
            let (ia, ib) = select_pair(&basis, &eigs, config.tracked_pair)?;
            let refpair = (eigs.values[ia], eigs.values[ib]);
            let mut err = None;
            let (beta, _) = golden_min(
                |b| match pair_at(b, refpair) {
                    Ok((g, _)) => g.norm(),
                    Err(e) => {
                        err = Some(e);
                        f64::INFINITY
                    }
                },
                beta_grid[i - 1],
                beta_grid[i + 1],
                config.ep.tol_beta,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let (gap, overlap) = pair_at(beta, refpair)?;
            let gap_abs = gap.norm();
            reports.push(EpReport {
                beta,
                gap_abs,
                overlap,
                kind: EpKind::Liouvillian,
                subspace: None,
                is_ep: gap_abs < config.ep.gap_tol && overlap > 1.0 - config.ep.overlap_tol,
            });
        }
    }
    Ok(EpScan { curve, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ComplexRate;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_by_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn closed_form_symmetric_coupling() {
        let mut p = SystemParams::default().with_beta(0.0);
        p.eps1 = ComplexRate::new(0.8, 0.0);
        p.eps2 = ComplexRate::new(0.7, 0.0);
        let eig = closed_form_eigensystem(&p, 1).unwrap();
        let omega = c(1.5, 0.0);
        let j = c(1.5, 0.0); // J12 = J21 = eps1 + eps2 at beta = 0
        assert!((eig.eigenvalues[0] - (omega + j)).norm() < 1e-12);
        assert!((eig.eigenvalues[1] - (omega - j)).norm() < 1e-12);
        for (k, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let v = &eig.eigenvectors[k];
            let want = 1.0 / 2f64.sqrt();
            assert!((v[0].norm() - want).abs() < 1e-12);
            assert!((v[1].norm() - want).abs() < 1e-12);
            let ratio = v[0] / v[1];
            assert!((ratio - sign).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_two_photon_coalescence_at_zero_product() {
        let mut p = SystemParams::default().with_beta(PI / 2.0);
        p.eps1 = ComplexRate::new(1.0, -0.05);
        p.eps2 = ComplexRate::new(1.0, -0.05);
        // J12 J21 = 0 at beta = pi/2 for identical scatterers
        let eig = closed_form_eigensystem(&p, 2).unwrap();
        assert!((eig.eigenvalues[0] - eig.eigenvalues[1]).norm() < 1e-12);
    }

    #[test]
    fn closed_form_small_splitting_near_critical_angle() {
        let p = SystemParams::default().with_beta(0.496 * PI);
        let eig = closed_form_eigensystem(&p, 1).unwrap();
        let delta1 = (eig.eigenvalues[0] - eig.eigenvalues[1]) / 2.0;
        assert!(delta1.norm() < 0.05, "|delta1| = {}", delta1.norm());
        assert!(closed_form_eigensystem(&p, 3).is_err());
    }

    #[test]
    fn numeric_matches_closed_form_blocks() {
        let p = SystemParams::default().with_beta(0.37 * PI);
        let basis = FockBasis::build(Truncation::TotalExcitation(2)).unwrap();
        let h = build_hamiltonian(&p, &basis, HamiltonianVariant::Isolated).unwrap();
        for n in [1u32, 2] {
            let block = subspace_block(&h, n).unwrap();
            let num = eigensystem_of(&block).unwrap();
            let closed = closed_form_eigensystem(&p, n).unwrap();
            let a = sorted_by_re(num.eigenvalues.clone());
            let b = sorted_by_re(closed.eigenvalues.clone());
            let scale = block.max_abs();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-9 * scale, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn numeric_eigensystem_residuals() {
        let p = SystemParams::default().with_beta(0.77 * PI);
        let basis = FockBasis::build(Truncation::TotalExcitation(3)).unwrap();
        let h = build_hamiltonian(&p, &basis, HamiltonianVariant::Effective).unwrap();
        let eig = numeric_eigensystem(&h).unwrap();
        let scale = h.mat().max_abs();
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let hv = h.mat().matvec(v);
            let res: f64 = hv
                .iter()
                .zip(v)
                .map(|(x, y)| (x - lambda * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9 * scale);
        }
    }

    #[test]
    fn hamiltonian_scan_flags_critical_angles() {
        let p = SystemParams::default();
        let grid = crate::util::linspace(0.0, 2.0 * PI * 199.0 / 200.0, 200);
        let scan = hamiltonian_ep_scan(&p, &grid, 2, &EpScanConfig::default()).unwrap();
        let flagged: Vec<f64> =
            scan.reports.iter().filter(|r| r.is_ep).map(|r| r.beta / PI).collect();
        assert!(
            flagged.iter().any(|b| (b - 0.496).abs() < 0.002),
            "flagged minima: {flagged:?}"
        );
        assert!(flagged.iter().any(|b| (b - 1.496).abs() < 0.002));
        for r in scan.reports.iter().filter(|r| r.is_ep) {
            assert!(r.overlap > 0.99);
        }
    }

    #[test]
    fn hamiltonian_scan_single_scatterer_finds_nothing() {
        let mut p = SystemParams::default();
        p.eps2 = ComplexRate::new(0.0, 0.0);
        let grid = crate::util::linspace(0.0, 2.0 * PI, 100);
        let scan = hamiltonian_ep_scan(&p, &grid, 1, &EpScanConfig::default()).unwrap();
        assert!(scan.reports.iter().all(|r| !r.is_ep));
        // gap constant = 2|eps1|
        let want = 2.0 * p.eps1.as_c64().norm();
        for pt in &scan.curve {
            let g = c(pt.gap.re, pt.gap.im).norm();
            assert!((g - want).abs() < 1e-9);
        }
    }

    #[test]
    fn n1_scan_near_critical_angle_is_not_a_strict_ep() {
        // with |eps1| != |eps2| the N = 1 pair never coalesces: small gap
        // minimum but eigenvector overlap well below 1
        let p = SystemParams::default();
        let grid = crate::util::linspace(0.4 * PI, 0.6 * PI, 81);
        let scan = hamiltonian_ep_scan(&p, &grid, 1, &EpScanConfig::default()).unwrap();
        assert!(!scan.reports.is_empty());
        for r in &scan.reports {
            assert!((r.beta / PI - 0.496).abs() < 0.01 || (r.beta / PI - 0.504).abs() < 0.01);
            assert!(r.gap_abs > 0.05 && r.gap_abs < 0.08);
            assert!(r.overlap < 0.8);
            assert!(!r.is_ep);
        }
    }

    #[test]
    fn gamma_operator_diagonal_case() {
        // H- = -i gamma' n yields Gamma = i sqrt(2 gamma') sqrt(n)
        let basis = FockBasis::build(Truncation::PerMode(3, 0)).unwrap();
        let n1 = mode_operator(&basis, Mode::Cw, OpKind::Number);
        let gp = 0.24;
        let hminus = n1.scale(c(0.0, -gp));
        let gamma = gamma_jump_operator(&hminus).unwrap();
        for (j, &(m, _)) in basis.states().iter().enumerate() {
            let want = c(0.0, (2.0 * gp * m as f64).sqrt());
            assert!((gamma.mat()[(j, j)] - want).norm() < 1e-10);
        }
        // Gamma Gamma reproduces -2i H-
        let m = hminus.mat().scale(c(0.0, -2.0));
        let gg = gamma.mat().mul(gamma.mat());
        assert!(gg.sub(&m).max_abs() < 1e-9);
    }

    #[test]
    fn gamma_operator_full_antihermitian_part() {
        let p = SystemParams::default().with_beta(0.3 * PI);
        let basis = FockBasis::build(Truncation::TotalExcitation(2)).unwrap();
        let h = build_hamiltonian(&p, &basis, HamiltonianVariant::Isolated).unwrap();
        let (_, hminus) = h.hermitian_split();
        let gamma = gamma_jump_operator(&hminus).unwrap();
        let m = hminus.mat().scale(c(0.0, -2.0));
        assert!(gamma.mat().mul(gamma.mat()).sub(&m).max_abs() < 1e-9);
        // Gamma† Gamma is Hermitian PSD
        let gtg = gamma.mat().adjoint().mul(gamma.mat());
        assert!(gtg.hermiticity_defect() < 1e-10);
        let (w, _) = linalg::eigen_hermitian(&gtg).unwrap();
        assert!(w.iter().all(|&x| x > -1e-10));
        // zero input maps to zero
        let zero = OperatorMatrix::zeros(basis.clone());
        assert!(gamma_jump_operator(&zero).unwrap().mat().max_abs() == 0.0);
        // reject a non-anti-Hermitian input
        assert!(gamma_jump_operator(&h).is_err());
    }

    #[test]
    fn liouvillian_trivial_and_damped_mode() {
        let mut p = SystemParams::default();
        p.eps1 = ComplexRate::new(0.0, 0.0);
        p.eps2 = ComplexRate::new(0.0, 0.0);
        p.chi = 0.0;
        let b1 = FockBasis::build(Truncation::TotalExcitation(0)).unwrap();
        let l1 = liouvillian_matrix(&p, &b1, false).unwrap();
        assert_eq!(l1.dimension(), 1);
        assert!(l1.mat().max_abs() == 0.0);
        // single damped mode with a real frequency offset
        let mut p2 = p;
        p2.eps1 = ComplexRate::new(0.35, 0.0);
        let b = FockBasis::build(Truncation::PerMode(1, 0)).unwrap();
        let l = liouvillian_matrix(&p2, &b, false).unwrap();
        let eig = linalg::eigen(l.mat()).unwrap();
        let vals = sorted_by_re(eig.values);
        let want = [c(-1.0, 0.0), c(-0.5, -0.35), c(-0.5, 0.35), c(0.0, 0.0)];
        for (got, want) in vals.iter().zip(want) {
            assert!((got - want).norm() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn liouvillian_annihilates_trace_and_stays_left_stable() {
        let p = SystemParams::default().with_beta(0.42 * PI);
        let basis = FockBasis::build(Truncation::TotalExcitation(2)).unwrap();
        for drive in [false, true] {
            let l = liouvillian_matrix(&p, &basis, drive).unwrap();
            let d = basis.dim();
            // vec(I)† L = 0 row: trace preservation including the Γ dissipator
            let mut worst = 0.0f64;
            for col in 0..d * d {
                let mut s = c(0.0, 0.0);
                for k in 0..d {
                    s += l.mat()[(k * d + k, col)];
                }
                worst = worst.max(s.norm());
            }
            assert!(worst < 1e-9 * l.mat().max_abs(), "trace row {worst}");
        }
        // driveless spectrum lies in the closed left half-plane
        let l = liouvillian_matrix(&p, &basis, false).unwrap();
        let eig = linalg::eigen(l.mat()).unwrap();
        let max_re = eig.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-8, "max Re = {max_re}");
    }

    #[test]
    fn liouvillian_sector_gap_matches_hamiltonian_splitting() {
        let p = SystemParams::default();
        let basis = FockBasis::build(Truncation::TotalExcitation(2)).unwrap();
        for beta in [0.25 * PI, 0.4958 * PI, 0.7 * PI] {
            let pb = p.with_beta(beta);
            let eigs = liouvillian_eigs(&pb, &basis).unwrap();
            let (ia, ib) = select_pair(&basis, &eigs, TrackedPair::CoherenceSector).unwrap();
            let gap = (eigs.values[ia] - eigs.values[ib]).norm();
            let h = closed_form_eigensystem(&pb, 1).unwrap();
            let want = (h.eigenvalues[0] - h.eigenvalues[1]).norm();
            assert!((gap - want).abs() < 1e-8, "beta={beta}: {gap} vs {want}");
        }
    }

    #[test]
    fn liouvillian_scan_matches_hamiltonian_positions_and_ignores_drive() {
        let p = SystemParams::default();
        let grid = crate::util::linspace(0.40 * PI, 0.60 * PI, 41);
        let cfg = LiouvillianScanConfig::default();
        let lscan = liouvillian_ep_scan(&p, &grid, &cfg).unwrap();
        let hscan = hamiltonian_ep_scan(&p, &grid, 1, &EpScanConfig::default()).unwrap();
        assert!(!lscan.reports.is_empty() && !hscan.reports.is_empty());
        for (l, h) in lscan.reports.iter().zip(&hscan.reports) {
            assert!((l.beta - h.beta).abs() < 0.01 * PI, "{} vs {}", l.beta, h.beta);
        }
        // drive amplitude never enters the driveless analysis
        let mut p2 = p;
        p2.xi = 0.0;
        let lscan2 = liouvillian_ep_scan(&p2, &grid, &cfg).unwrap();
        for (a, b) in lscan.curve.iter().zip(&lscan2.curve) {
            assert!((a.gap.re - b.gap.re).abs() < 1e-12);
            assert!((a.gap.im - b.gap.im).abs() < 1e-12);
        }
    }

    #[test]
    fn liouvillian_scan_single_scatterer_finds_no_coalescence() {
        let mut p = SystemParams::default();
        p.eps2 = ComplexRate::new(0.0, 0.0);
        let grid = crate::util::linspace(0.3 * PI, 0.7 * PI, 21);
        let scan = liouvillian_ep_scan(&p, &grid, &LiouvillianScanConfig::default()).unwrap();
        assert!(scan.reports.iter().all(|r| !r.is_ep));
    }
}
