use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::FactorPair;
use crate::linalg::{c, eigvalsh, hermitize, CVec, Mat};
use crate::lindblad::{assemble_generator, parent_hamiltonian, KossakowskiSpec, Superoperator};
use crate::spectral::gibbs::GibbsState;
use crate::spectral::hamiltonian::SpectralHamiltonian;

use super::grid::{select_grid, QuadratureGrid};

/// Cap on the number of complex entries in the stacked matrix.
pub const MAX_STACKED_ENTRIES: usize = 1 << 27;

/// `𝔹` with blocks `√(h g(t_k)) 𝓑̂_{j,t_k}`, `j` outer and `k` inner.
#[derive(Debug, Clone)]
pub struct RectFactor {
    grid: QuadratureGrid,
    index: Vec<(usize, usize)>,
    stacked: Mat,
    singular_values: Vec<f64>,
    right_vectors: Mat,
}

impl RectFactor {
    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `(j, k)` of each row block.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.index
    }

    pub fn block_count(&self) -> usize {
        self.index.len()
    }

    pub fn stacked(&self) -> &Mat {
        &self.stacked
    }

    pub fn cols(&self) -> usize {
        self.stacked.ncols()
    }

    /// Descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Right singular vector for `singular_values()[i]`.
    pub fn right_vector(&self, i: usize) -> CVec {
        self.right_vectors.column(i).into_owned()
    }

    pub fn smallest_right_vector(&self) -> CVec {
        self.right_vector(self.singular_values.len() - 1)
    }

    /// `𝔹^†𝔹`.
    pub fn gram(&self) -> Mat {
        hermitize(&(self.stacked.adjoint() * &self.stacked))
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.stacked * v
    }
}

pub fn assemble_b(pairs: &[FactorPair], grid: &QuadratureGrid) -> Result<RectFactor> {
    let first = pairs.first().ok_or_else(|| Error::DegenerateInput("no factor pairs".into()))?;
    let dd = first.sharp().nrows().pow(2);
    let nodes = grid.nodes();
    let rows = pairs.len() * nodes.len() * dd;
    if rows.saturating_mul(dd) > MAX_STACKED_ENTRIES {
        return Err(Error::Capacity { what: format!("stacked operator with {rows}x{dd} entries"), limit: MAX_STACKED_ENTRIES.to_string() });
    }
    let index: Vec<(usize, usize)> = (0..pairs.len()).flat_map(|j| (0..nodes.len()).map(move |k| (j, k))).collect();
    let blocks: Vec<Mat> = index
        .par_iter()
        .map(|&(j, k)| {
            let (t, w) = nodes[k];
            pairs[j].first_order(t).matrix * c(w.max(0.0).sqrt())
        })
        .collect();
    let mut stacked = Mat::zeros(rows, dd);
    for (b, m) in blocks.iter().enumerate() {
        stacked.view_mut((b * dd, 0), (dd, dd)).copy_from(m);
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Construction("SVD did not return right vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let right_vectors = Mat::from_fn(dd, order.len(), |r, col| v_t[(order[col], r)].conj());
    Ok(RectFactor { grid: grid.clone(), index, stacked, singular_values, right_vectors })
}

/// `‖Ĥ - 𝔹^†𝔹‖` (operator norm).
pub fn measure_error(b: &RectFactor, hhat: &Superoperator) -> Result<f64> {
    if hhat.matrix().nrows() != b.cols() {
        return Err(Error::DimensionMismatch { expected: b.cols().to_string(), got: hhat.matrix().nrows().to_string() });
    }
    let diff = hermitize(&(hhat.matrix() - b.gram()));
    Ok(eigvalsh(&diff).iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorScanRow {
    pub eps_requested: f64,
    pub t_max: f64,
    pub n: usize,
    pub h: f64,
    pub mass: f64,
    pub error_measured: f64,
}

impl ErrorScanRow {
    pub fn passes(&self) -> bool {
        self.error_measured <= self.eps_requested
    }
}

/// Grid from `select_grid` for each `ε` and the measured `‖Ĥ - 𝔹^†𝔹‖`.
pub fn error_scaling_scan(spec: &KossakowskiSpec, h: &SpectralHamiltonian, g: &GibbsState, eps_list: &[f64]) -> Result<Vec<ErrorScanRow>> {
    let pairs = crate::factorization::build_factors(spec, g)?;
    let hhat = parent_hamiltonian(&assemble_generator(spec)?, g)?;
    eps_list
        .iter()
        .map(|&eps| {
            let grid = select_grid(spec.beta(), h.norm(), pairs.len(), eps)?;
            let b = assemble_b(&pairs, &grid)?;
            Ok(ErrorScanRow {
                eps_requested: eps,
                t_max: grid.t_max,
                n: grid.n,
                h: grid.h,
                mass: grid.mass(),
                error_measured: measure_error(&b, &hhat)?,
            })
        })
        .collect()
}
