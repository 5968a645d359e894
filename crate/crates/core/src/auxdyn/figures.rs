use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::factorization::build_factors;
use crate::linalg::{CVec, Mat};
use crate::lindblad::{assemble_generator, spectral_gap, spectral_gap_with, GapOptions, KossakowskiSpec};
use crate::spectral::gibbs::gibbs_state;
use crate::spectral::hamiltonian::SpectralHamiltonian;
use crate::spectral::pauli::{Pauli, PauliString};

use super::evolve::{evolve, EvolveOptions, Trajectory};
use super::generator::{build_aux, pair_labels, AuxGenerator, Dressing};

/// `X_j, Y_j, Z_j` on every site.
pub fn xyz_couplings(n: usize) -> Vec<(String, Mat)> {
    (0..n)
        .flat_map(|s| Pauli::NONTRIVIAL.into_iter().map(move |p| PauliString::single(n, s, p)))
        .map(|p| (p.label(), p.matrix()))
        .collect()
}

/// Auxiliary generator for `spec` at its own `β`.
pub fn aux_for(spec: &KossakowskiSpec, h: &SpectralHamiltonian, dressing: &Dressing) -> Result<AuxGenerator> {
    let g = gibbs_state(h, spec.beta())?;
    let pairs = build_factors(spec, &g)?;
    build_aux(&pairs, &pair_labels(spec, &pairs), &g, dressing)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub beta: f64,
    pub gap_dll: f64,
    pub gap_aux_undressed: f64,
    pub gap_aux_dressed: f64,
}

impl GapRow {
    pub fn dressed_ratio(&self) -> f64 {
        self.gap_aux_dressed / self.gap_dll
    }
}

/// Gaps of the sampler and of both auxiliary generators per `β`.
pub fn gap_comparison<F>(h: &SpectralHamiltonian, builder: F, betas: &[f64]) -> Result<Vec<GapRow>>
where
    F: Fn(f64) -> Result<KossakowskiSpec> + Sync,
{
    betas
        .par_iter()
        .map(|&beta| {
            let spec = builder(beta)?;
            let gap_dll = spectral_gap(&assemble_generator(&spec)?)?;
            let aux_gap = |dressing: Dressing| -> Result<f64> {
                let s = aux_for(&spec, h, &dressing)?.superoperator()?;
                spectral_gap_with(&s, GapOptions::default())
            };
            Ok(GapRow { beta, gap_dll, gap_aux_undressed: aux_gap(Dressing::None)?, gap_aux_dressed: aux_gap(Dressing::PauliCycle)? })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `|0…0⟩` on both registers.
    Zero,
    /// `(1/√d) Σ_i |i⟩|i⟩`.
    MaximallyEntangled,
    /// `I / d²`.
    MaximallyMixed,
}

impl InitialState {
    pub fn density(self, d: usize) -> Mat {
        let dim = d * d;
        match self {
            InitialState::Zero => {
                let mut m = Mat::zeros(dim, dim);
                m[(0, 0)] = crate::linalg::c(1.0);
                m
            }
            InitialState::MaximallyEntangled => {
                let v: CVec = crate::linalg::vec(&crate::linalg::identity(d)) / crate::linalg::c((d as f64).sqrt());
                &v * v.adjoint()
            }
            InitialState::MaximallyMixed => crate::linalg::identity(dim) * crate::linalg::c(1.0 / dim as f64),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Run {
    pub beta: f64,
    pub trajectory: Trajectory,
}

/// Overlap trajectories of the dressed auxiliary dynamics for each `β`.
pub fn fig2<F>(h: &SpectralHamiltonian, builder: F, betas: &[f64], times: &[f64], start: InitialState, opts: EvolveOptions) -> Result<Vec<Fig2Run>>
where
    F: Fn(f64) -> Result<KossakowskiSpec> + Sync,
{
    let rho0 = start.density(h.dim());
    betas
        .par_iter()
        .map(|&beta| {
            let gen = aux_for(&builder(beta)?, h, &Dressing::PauliCycle)?;
            Ok(Fig2Run { beta, trajectory: evolve(&gen, &rho0, times, opts)? })
        })
        .collect()
}
