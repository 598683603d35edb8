//! Two-mode Fock bases and operator matrices: ladder operators, the coupled
//! Hamiltonian in its variants, and the drive term.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::params::{LossModel, SystemParams};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Keep |m,n⟩ with m+n ≤ N_max; dimension (N+1)(N+2)/2.
    TotalExcitation(u32),
    /// Keep m ≤ n1_max, n ≤ n2_max; dimension (n1+1)(n2+1).
    PerMode(u32, u32),
}

/// Ordered two-mode Fock basis; states sorted by total excitation N = m+n,
/// then m ascending.
#[derive(Clone, Debug)]
pub struct FockBasis {
    truncation: Truncation,
    states: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.truncation == other.truncation
    }
}

impl FockBasis {
    pub fn build(truncation: Truncation) -> Result<Arc<Self>> {
        Self::build_capped(truncation, DEFAULT_DIMENSION_CAP)
    }

    pub fn build_capped(truncation: Truncation, cap: usize) -> Result<Arc<Self>> {
        let mut states: Vec<(u32, u32)> = match truncation {
            Truncation::TotalExcitation(nmax) => (0..=nmax)
                .flat_map(|n_tot| (0..=n_tot).map(move |m| (m, n_tot - m)))
                .collect(),
            Truncation::PerMode(n1, n2) => {
                let mut v: Vec<(u32, u32)> =
                    (0..=n1).flat_map(|m| (0..=n2).map(move |n| (m, n))).collect();
                v.sort_by_key(|&(m, n)| (m + n, m));
                v
            }
        };
        states.shrink_to_fit();
        if states.len() > cap {
            return Err(Error::DimensionCap(states.len(), cap));
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Arc::new(Self { truncation, states, index }))
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    pub fn index_of(&self, m: u32, n: u32) -> Option<usize> {
        self.index.get(&(m, n)).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Cw,
    Ccw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Annihilate,
    Create,
    Number,
}

/// Which Hamiltonian to assemble. Hermitian/anti-Hermitian parts refer to
/// the rotating driven Hamiltonian (use [`OperatorMatrix::hermitian_split`]
/// to partition any other variant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianVariant {
    /// Undriven lab-frame Hamiltonian in the frame rotating at ω₀, so the
    /// mode frequency is ω = ε₁ + ε₂.
    Isolated,
    /// Frame rotating at the drive: Δ(n̂₁+n̂₂) + hopping + Kerr + drive.
    RotatingDriven,
    /// RotatingDriven − iγ/2 (n̂₁+n̂₂).
    Effective,
    HermitianPart,
    AntihermitianPart,
}

/// Dense complex matrix tied to the basis it was built on.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    basis: Arc<FockBasis>,
    mat: CMat,
}

impl OperatorMatrix {
    pub fn new(basis: Arc<FockBasis>, mat: CMat) -> Result<Self> {
        if mat.rows() != basis.dim() || mat.cols() != basis.dim() {
            return Err(Error::Dimension(format!(
                "matrix {}x{} does not match basis dimension {}",
                mat.rows(),
                mat.cols(),
                basis.dim()
            )));
        }
        Ok(Self { basis, mat })
    }

    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        Self { basis, mat: CMat::zeros(d, d) }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn mat_mut(&mut self) -> &mut CMat {
        &mut self.mat
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        self.basis.as_ref() == other.basis.as_ref()
    }

    pub fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.same_basis(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self { basis: self.basis.clone(), mat: self.mat.mul(&other.mat) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self { basis: self.basis.clone(), mat: self.mat.add(&other.mat) })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis.clone(), mat: self.mat.scale(s) }
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis.clone(), mat: self.mat.adjoint() }
    }

    /// (A + A†)/2 and (A − A†)/2 on the same basis.
    pub fn hermitian_split(&self) -> (Self, Self) {
        let (h, a) = self.mat.hermitian_split();
        (
            Self { basis: self.basis.clone(), mat: h },
            Self { basis: self.basis.clone(), mat: a },
        )
    }

    pub fn element(&self, bra: (u32, u32), ket: (u32, u32)) -> Option<C64> {
        let i = self.basis.index_of(bra.0, bra.1)?;
        let j = self.basis.index_of(ket.0, ket.1)?;
        Some(self.mat[(i, j)])
    }
}

/// Ladder / number operator for one mode; transitions leaving the truncated
/// basis are dropped.
pub fn mode_operator(basis: &Arc<FockBasis>, mode: Mode, kind: OpKind) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(basis.clone());
    for (j, &(m, n)) in basis.states().iter().enumerate() {
        let (pop, other) = match mode {
            Mode::Cw => (m, n),
            Mode::Ccw => (n, m),
        };
        let target = |p: u32| -> Option<usize> {
            match mode {
                Mode::Cw => basis.index_of(p, other),
                Mode::Ccw => basis.index_of(other, p),
            }
        };
        match kind {
            OpKind::Number => {
                op.mat_mut()[(j, j)] = C64::new(pop as f64, 0.0);
            }
            OpKind::Annihilate => {
                if pop > 0 {
                    if let Some(i) = target(pop - 1) {
                        op.mat_mut()[(i, j)] = C64::new((pop as f64).sqrt(), 0.0);
                    }
                }
            }
            OpKind::Create => {
                if let Some(i) = target(pop + 1) {
                    op.mat_mut()[(i, j)] = C64::new((pop as f64 + 1.0).sqrt(), 0.0);
                }
            }
        }
    }
    op
}

/// Drive term ξ(â₁† + â₁); couples |m,n⟩ ↔ |m+1,n⟩ only.
pub fn drive_operator(basis: &Arc<FockBasis>, xi: f64) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(basis.clone());
    for (j, &(m, n)) in basis.states().iter().enumerate() {
        if let Some(i) = basis.index_of(m + 1, n) {
            let v = C64::new(xi * (m as f64 + 1.0).sqrt(), 0.0);
            op.mat_mut()[(i, j)] = v;
            op.mat_mut()[(j, i)] = v;
        }
    }
    op
}

/// Assemble the requested Hamiltonian variant on `basis`.
pub fn build_hamiltonian(
    params: &SystemParams,
    basis: &Arc<FockBasis>,
    variant: HamiltonianVariant,
) -> Result<OperatorMatrix> {
    let p = (*params).validated()?;
    match variant {
        HamiltonianVariant::HermitianPart => {
            let h = build_hamiltonian(&p, basis, HamiltonianVariant::RotatingDriven)?;
            Ok(h.hermitian_split().0)
        }
        HamiltonianVariant::AntihermitianPart => {
            let h = build_hamiltonian(&p, basis, HamiltonianVariant::RotatingDriven)?;
            Ok(h.hermitian_split().1)
        }
        _ => {
            let d = p.derived();
            let e1 = p.eps1.as_c64();
            let e2 = p.eps2.as_c64();
            let (onsite, xi) = match variant {
                HamiltonianVariant::Isolated => (e1 + e2, 0.0),
                HamiltonianVariant::RotatingDriven => (d.delta.as_c64(), p.xi),
                HamiltonianVariant::Effective => {
                    (d.delta.as_c64() - C64::new(0.0, 0.5 * p.gamma), p.xi)
                }
                _ => unreachable!(),
            };
            let j12 = d.j12.as_c64();
            let j21 = d.j21.as_c64();
            let mut op = OperatorMatrix::zeros(basis.clone());
            for (j, &(m, n)) in basis.states().iter().enumerate() {
                let (mf, nf) = (m as f64, n as f64);
                op.mat_mut()[(j, j)] =
                    onsite * (mf + nf) + p.chi * (mf * (mf - 1.0) + nf * (nf - 1.0));
                // J12 a1† a2 : (m,n) -> (m+1, n-1)
                if n > 0 {
                    if let Some(i) = basis.index_of(m + 1, n - 1) {
                        op.mat_mut()[(i, j)] = j12 * ((mf + 1.0) * nf).sqrt();
                    }
                }
                // J21 a2† a1 : (m,n) -> (m-1, n+1)
                if m > 0 {
                    if let Some(i) = basis.index_of(m - 1, n + 1) {
                        op.mat_mut()[(i, j)] = j21 * (mf * (nf + 1.0)).sqrt();
                    }
                }
                if xi > 0.0 {
                    if let Some(i) = basis.index_of(m + 1, n) {
                        op.mat_mut()[(i, j)] += xi * (mf + 1.0).sqrt();
                    }
                    if m > 0 {
                        if let Some(i) = basis.index_of(m - 1, n) {
                            op.mat_mut()[(i, j)] += xi * mf.sqrt();
                        }
                    }
                }
            }
            Ok(op)
        }
    }
}
