use crate::error::{Error, Result};
use crate::linalg::{c, eigh, from_eigen, hermiticity_residual, op_norm, Mat, C64};
use crate::spectral::pauli::{pauli_sum, Pauli, PauliString};

/// Dense storage cap on the qubit count unless a caller raises it.
pub const DEFAULT_MAX_QUBITS: usize = 6;

/// One eigenspace of `H` after merging numerically degenerate eigenvalues.
#[derive(Debug, Clone)]
pub struct Level {
    pub energy: f64,
    pub projector: Mat,
    /// Columns of the eigenvector matrix spanning this level.
    pub indices: Vec<usize>,
}

/// Hermitian matrix on `n` qubits with its validated eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralHamiltonian {
    n: usize,
    matrix: Mat,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat,
    levels: Vec<Level>,
    norm: f64,
}

impl SpectralHamiltonian {
    pub fn new(n: usize, matrix: Mat) -> Result<Self> {
        Self::with_cap(n, matrix, DEFAULT_MAX_QUBITS)
    }

    pub fn with_cap(n: usize, matrix: Mat, max_qubits: usize) -> Result<Self> {
        if n > max_qubits {
            return Err(Error::Capacity { what: format!("{n} qubits"), limit: format!("{max_qubits} qubits") });
        }
        let d = 1usize << n;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                got: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let scale = op_norm(&matrix).max(1.0);
        let herm = hermiticity_residual(&matrix);
        if herm > 1e-12 * scale {
            return Err(Error::Domain(format!("matrix is not Hermitian (residual {herm:.3e})")));
        }
        let (eigenvalues, eigenvectors) = eigh(&matrix);
        let norm = eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let merge_tol = (1e-9 * norm).max(1e-12);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in 0..eigenvalues.len() {
            match groups.last_mut() {
                Some(g) if eigenvalues[k] - eigenvalues[*g.last().unwrap()] <= merge_tol => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        let levels = groups
            .into_iter()
            .map(|indices| {
                let energy = indices.iter().map(|&k| eigenvalues[k]).sum::<f64>() / indices.len() as f64;
                let mut projector = Mat::zeros(d, d);
                for &k in &indices {
                    let v = eigenvectors.column(k);
                    projector += v * v.adjoint();
                }
                Level { energy, projector, indices }
            })
            .collect::<Vec<_>>();
        let h = Self { n, matrix, eigenvalues, eigenvectors, levels, norm };
        let resid = h.reconstruction_residual();
        if resid > 1e-12 * scale * d as f64 {
            return Err(Error::Accuracy { what: "eigendecomposition reconstruction".into(), residual: resid });
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat {
        &self.eigenvectors
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `‖H‖`, the largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `‖H - Σ λ_j P_j‖`.
    pub fn reconstruction_residual(&self) -> f64 {
        let rebuilt = self
            .levels
            .iter()
            .fold(Mat::zeros(self.dim(), self.dim()), |acc, l| acc + &l.projector * c(l.energy));
        op_norm(&(&self.matrix - rebuilt))
    }

    /// `e^{iHt}`.
    pub fn propagator(&self, t: f64) -> Mat {
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&e| C64::from_polar(1.0, e * t)).collect();
        from_eigen(&phases, &self.eigenvectors)
    }

    /// Heisenberg picture `e^{iHt} B e^{-iHt}`, by phase multiplication in the
    /// eigenbasis.
    pub fn heisenberg(&self, b: &Mat, t: f64) -> Mat {
        let v = &self.eigenvectors;
        let mut tilde = v.adjoint() * b * v;
        for a in 0..tilde.nrows() {
            for bb in 0..tilde.ncols() {
                tilde[(a, bb)] *= C64::from_polar(1.0, (self.eigenvalues[a] - self.eigenvalues[bb]) * t);
            }
        }
        v * tilde * v.adjoint()
    }
}

/// Transverse-field Ising chain with open boundaries,
/// `H = -J Σ Z_i Z_{i+1} - h Σ X_i`.
pub fn build_tfim(n: usize, coupling: f64, field: f64) -> Result<SpectralHamiltonian> {
    build_tfim_capped(n, coupling, field, DEFAULT_MAX_QUBITS)
}

pub fn build_tfim_capped(n: usize, coupling: f64, field: f64, max_qubits: usize) -> Result<SpectralHamiltonian> {
    if n == 0 {
        return Err(Error::Domain("TFIM needs at least one site".into()));
    }
    if n > max_qubits {
        return Err(Error::Capacity { what: format!("{n} qubits"), limit: format!("{max_qubits} qubits") });
    }
    let mut terms = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut letters = vec![Pauli::I; n];
        letters[i] = Pauli::Z;
        letters[i + 1] = Pauli::Z;
        terms.push((-coupling, PauliString::new(letters)));
    }
    for i in 0..n {
        terms.push((-field, PauliString::single(n, i, Pauli::X)));
    }
    SpectralHamiltonian::with_cap(n, pauli_sum(n, &terms), max_qubits)
}

/// Hamiltonian given as a weighted Pauli sum.
pub fn from_pauli_terms(n: usize, terms: &[(f64, PauliString)]) -> Result<SpectralHamiltonian> {
    SpectralHamiltonian::new(n, pauli_sum(n, terms))
}
