use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::FactorPair;
use crate::linalg::{c, identity, op_norm, CVec, Mat};
use crate::quadrature::QuadratureGrid;
use crate::spectral::hamiltonian::SpectralHamiltonian;

use super::circuit::Registers;

/// Tolerance for unitarity of every oracle and for the extracted blocks.
pub const ORACLE_TOL: f64 = 1e-10;

/// `[[X, √(I-XX†)], [√(I-X†X), -X†]]` for square `X` with `‖X‖ ≤ 1`.
pub fn dilate(x: &Mat) -> Result<Mat> {
    let norm = op_norm(x);
    if norm > 1.0 + 1e-12 {
        return Err(Error::Normalization { norm, budget: 1.0 });
    }
    let m = x.nrows();
    // both roots from one SVD so that the off-diagonal blocks cancel exactly
    let svd = x.clone().svd(true, true);
    let (w, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let s = Mat::from_diagonal(&svd.singular_values.map(|s| c((1.0 - s.min(1.0).powi(2)).sqrt())));
    let xd = x.adjoint();
    let mut u = Mat::zeros(2 * m, 2 * m);
    u.view_mut((0, 0), (m, m)).copy_from(x);
    u.view_mut((0, m), (m, m)).copy_from(&(&w * &s * w.adjoint()));
    u.view_mut((m, 0), (m, m)).copy_from(&(v_t.adjoint() * &s * &v_t));
    u.view_mut((m, m), (m, m)).copy_from(&(-xd));
    Ok(u)
}

/// Real unit vector `g` completed to an orthogonal matrix with first column
/// `g` (Householder reflection of `e_0`).
pub fn prep_unitary(g: &[f64]) -> Mat {
    let n = g.len();
    let mut u = CVec::from_fn(n, |i, _| c(-g[i]));
    u[0] += c(1.0);
    let un = u.norm();
    if un < 1e-14 {
        return identity(n);
    }
    let u = u / c(un);
    identity(n) - &u * u.adjoint() * c(2.0)
}

pub fn unitarity_residual(u: &Mat) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Dense oracles with `J` and `N` padded to powers of two.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSet {
    pub registers: Registers,
    pub j: usize,
    pub n_points: usize,
    pub j_pad: usize,
    pub n_pad: usize,
    /// `C = Σ_k g_k`.
    pub mass: f64,
    /// Common factor rescaling; both families are divided by it.
    pub scale: f64,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub u_bsharp: Mat,
    #[serde(skip)]
    pub u_bflat_t: Mat,
    #[serde(skip)]
    pub u_sel: Mat,
    #[serde(skip)]
    pub u_sel_t: Mat,
    #[serde(skip)]
    pub u_prep: Mat,
}

impl OracleSet {
    /// `2√(J C)·scale`.
    pub fn alpha(&self) -> f64 {
        2.0 * (self.j_pad as f64 * self.mass).sqrt() * self.scale
    }

    /// `(⟨0^p| ⊗ I) U (|0^p⟩ ⊗ I)` restricted to the `|0^r⟩` input column block.
    pub fn channel_block(u: &Mat, j_pad: usize, d: usize) -> Mat {
        u.view((0, 0), (j_pad * d, d)).into_owned()
    }
}

fn next_pow2(x: usize) -> usize {
    x.max(1).next_power_of_two()
}

fn channel_encoding(mats: &[Mat], j_pad: usize, scale: f64) -> Result<Mat> {
    let d = mats[0].nrows();
    let mut x = Mat::zeros(j_pad * d, j_pad * d);
    let w = 1.0 / ((j_pad as f64).sqrt() * scale);
    for (j, m) in mats.iter().enumerate() {
        x.view_mut((j * d, 0), (d, d)).copy_from(&(m * c(w)));
    }
    dilate(&x)
}

fn stack_norm(mats: &[Mat]) -> f64 {
    let d = mats[0].nrows();
    let mut s = Mat::zeros(mats.len() * d, d);
    for (j, m) in mats.iter().enumerate() {
        s.view_mut((j * d, 0), (d, d)).copy_from(m);
    }
    op_norm(&s)
}

fn block_diag(blocks: &[Mat]) -> Mat {
    let d = blocks[0].nrows();
    let mut out = Mat::zeros(blocks.len() * d, blocks.len() * d);
    for (k, b) in blocks.iter().enumerate() {
        out.view_mut((k * d, k * d), (d, d)).copy_from(b);
    }
    out
}

/// Oracles for `pairs` on `grid`. The channel encodings need
/// `‖Σ_j |j⟩⟨0| ⊗ B_j‖ ≤ √J`; otherwise a normalization error is returned
/// unless `rescale` is set, in which case both families are divided by the
/// smallest common factor that restores the budget.
pub fn build_oracles(pairs: &[FactorPair], h: &SpectralHamiltonian, grid: &QuadratureGrid, rescale: bool) -> Result<OracleSet> {
    if pairs.is_empty() {
        return Err(Error::DegenerateInput("no factor pairs".into()));
    }
    let d = h.dim();
    if pairs[0].sharp().nrows() != d {
        return Err(Error::DimensionMismatch { expected: d.to_string(), got: pairs[0].sharp().nrows().to_string() });
    }
    let nodes = grid.nodes();
    let (j, n_points) = (pairs.len(), nodes.len());
    let (j_pad, n_pad) = (next_pow2(j), next_pow2(n_points));
    let registers = Registers { p: 1, r: j_pad.trailing_zeros() as usize, q: n_pad.trailing_zeros() as usize, n: h.n() };

    let sharp: Vec<Mat> = pairs.iter().map(|p| p.sharp().clone()).collect();
    let flat_t: Vec<Mat> = pairs.iter().map(|p| p.flat().transpose()).collect();
    let budget = (j_pad as f64).sqrt();
    let worst = stack_norm(&sharp).max(stack_norm(&flat_t));
    let scale = if worst <= budget * (1.0 + 1e-12) {
        1.0
    } else if rescale {
        worst / budget
    } else {
        return Err(Error::Normalization { norm: worst, budget });
    };

    let u_bsharp = channel_encoding(&sharp, j_pad, scale)?;
    let u_bflat_t = channel_encoding(&flat_t, j_pad, scale)?;

    let mut times: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let mut weights: Vec<f64> = nodes.iter().map(|n| n.1.max(0.0)).collect();
    times.resize(n_pad, 0.0);
    weights.resize(n_pad, 0.0);
    let props: Vec<Mat> = times.iter().map(|&t| h.propagator(t)).collect();
    let u_sel = block_diag(&props);
    let u_sel_t = block_diag(&props.iter().map(|p| p.transpose()).collect::<Vec<_>>());

    let mass: f64 = weights.iter().sum();
    if mass <= 0.0 {
        return Err(Error::DegenerateInput("quadrature weights sum to zero".into()));
    }
    let amps: Vec<f64> = weights.iter().map(|w| (w / mass).sqrt()).collect();
    let u_prep = prep_unitary(&amps);

    let set = OracleSet { registers, j, n_points, j_pad, n_pad, mass, scale, times, weights, u_bsharp, u_bflat_t, u_sel, u_sel_t, u_prep };
    for (name, u) in [("U_Bsharp", &set.u_bsharp), ("U_BflatT", &set.u_bflat_t), ("U_sel", &set.u_sel), ("U_selT", &set.u_sel_t), ("U_prep", &set.u_prep)] {
        let residual = unitarity_residual(u);
        if residual > ORACLE_TOL {
            return Err(Error::Assembly { block: name.into(), residual });
        }
    }
    Ok(set)
}
