//! States on the doubled space `C^d ⊗ C^d`, indexed so that `|X>>` is the
//! column-major vectorization of a `d x d` matrix. The first (most
//! significant) factor carries the column index of `X`, the second the row
//! index; left multiplication `A X` is `I ⊗ A`.

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_residual, kron, identity, vec, CVec, Mat, C64};
use crate::spectral::gibbs::GibbsState;

#[derive(Debug, Clone)]
pub enum DoubledState {
    Pure(CVec),
    Mixed(Mat),
}

impl DoubledState {
    /// Normalized pure state; fails on a zero vector or a non-square length.
    pub fn pure(v: CVec) -> Result<Self> {
        check_square_len(v.len())?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateInput("zero state vector".into()));
        }
        Ok(DoubledState::Pure(v / c(norm)))
    }

    /// Density matrix; checked Hermitian, unit trace and PSD to `1e-10`.
    pub fn mixed(rho: Mat) -> Result<Self> {
        check_square_len(rho.nrows())?;
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch { expected: "square".into(), got: format!("{}x{}", rho.nrows(), rho.ncols()) });
        }
        if hermiticity_residual(&rho) > 1e-10 {
            return Err(Error::Domain("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("density matrix trace {tr}")));
        }
        let min = crate::linalg::eigvalsh(&rho)[0];
        if min < -1e-10 {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(DoubledState::Mixed(rho))
    }

    /// `|0...0>` on the doubled space of a `d`-dimensional system.
    pub fn basis_zero(d: usize) -> Self {
        let mut v = CVec::zeros(d * d);
        v[0] = c(1.0);
        DoubledState::Pure(v)
    }

    /// `(1/√d) Σ_i |i>|i>`, the purification of `I/d`.
    pub fn maximally_entangled(d: usize) -> Self {
        DoubledState::Pure(vec(&identity(d)) / c((d as f64).sqrt()))
    }

    /// Dimension `d^2` of the doubled space.
    pub fn dim(&self) -> usize {
        match self {
            DoubledState::Pure(v) => v.len(),
            DoubledState::Mixed(m) => m.nrows(),
        }
    }

    /// Single-copy dimension `d`.
    pub fn system_dim(&self) -> usize {
        (self.dim() as f64).sqrt().round() as usize
    }

    pub fn density(&self) -> Mat {
        match self {
            DoubledState::Pure(v) => v * v.adjoint(),
            DoubledState::Mixed(m) => m.clone(),
        }
    }

    /// `<ψ|ρ|ψ>` against a pure reference.
    pub fn overlap_with(&self, psi: &CVec) -> f64 {
        match self {
            DoubledState::Pure(v) => psi.dotc(v).norm_sqr(),
            DoubledState::Mixed(m) => (psi.adjoint() * m * psi)[(0, 0)].re,
        }
    }

    /// Reduced state on the factor that `I ⊗ O` acts on (the row index of the
    /// vectorized matrix).
    pub fn reduced_row(&self) -> Mat {
        partial_trace_first(&self.density(), self.system_dim())
    }
}

fn check_square_len(n: usize) -> Result<()> {
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: "d^2 for some d".into(), got: n.to_string() });
    }
    Ok(())
}

/// `|σ^{1/2}>> = Σ_j √σ_j |ψ_j>|ψ_j>` (with the conjugate on the first factor
/// implied by the vectorization).
pub fn purified_gibbs(g: &GibbsState) -> DoubledState {
    let v = vec(g.sqrt_sigma());
    let n = v.norm();
    DoubledState::Pure(v / c(n))
}

pub fn purified_vector(g: &GibbsState) -> CVec {
    match purified_gibbs(g) {
        DoubledState::Pure(v) => v,
        DoubledState::Mixed(_) => unreachable!(),
    }
}

/// `⟨state| I ⊗ O |state⟩`, which equals `Tr(σ O)` on `|σ^{1/2}>>`.
pub fn estimate_observable(state: &DoubledState, o: &Mat) -> Result<f64> {
    let d = state.system_dim();
    if o.nrows() != d || o.ncols() != d {
        return Err(Error::DimensionMismatch { expected: format!("{d}x{d}"), got: format!("{}x{}", o.nrows(), o.ncols()) });
    }
    let scale = crate::linalg::op_norm(o).max(1.0);
    if hermiticity_residual(o) > 1e-12 * scale {
        return Err(Error::Domain("observable is not Hermitian".into()));
    }
    let value = match state {
        DoubledState::Pure(v) => {
            let x = crate::linalg::unvec(v, d);
            crate::linalg::hs_inner(&x, &(o * &x))
        }
        DoubledState::Mixed(m) => (m * kron(&identity(d), o)).trace(),
    };
    Ok(value.re)
}

/// Trace out the first (most significant) factor of a `d^2 x d^2` matrix.
pub fn partial_trace_first(rho: &Mat, d: usize) -> Mat {
    Mat::from_fn(d, d, |i, k| (0..d).map(|j| rho[(j * d + i, j * d + k)]).sum::<C64>())
}

/// Trace out the second (least significant) factor of a `d^2 x d^2` matrix.
pub fn partial_trace_second(rho: &Mat, d: usize) -> Mat {
    Mat::from_fn(d, d, |j, l| (0..d).map(|i| rho[(j * d + i, l * d + i)]).sum::<C64>())
}
