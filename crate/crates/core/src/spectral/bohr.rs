use crate::error::{Error, Result};
use crate::linalg::{frobenius, Mat, C64};
use crate::spectral::hamiltonian::SpectralHamiltonian;

/// `A = Σ_ν A_ν` with `A_ν = Σ_{λ_i - λ_j = ν} P_i A P_j`.
#[derive(Debug, Clone)]
pub struct BohrDecomposition {
    operator: Mat,
    frequencies: Vec<f64>,
    components: Vec<Mat>,
    tol: f64,
}

/// Default merge tolerance, `1e-9 ‖H‖` with a floor for `H = 0`.
pub fn default_tolerance(h: &SpectralHamiltonian) -> f64 {
    (1e-9 * h.norm()).max(1e-12)
}

pub fn bohr_decompose(h: &SpectralHamiltonian, a: &Mat) -> Result<BohrDecomposition> {
    bohr_decompose_with(h, a, default_tolerance(h))
}

pub fn bohr_decompose_with(h: &SpectralHamiltonian, a: &Mat, tol: f64) -> Result<BohrDecomposition> {
    if a.nrows() != h.dim() || a.ncols() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", h.dim()),
            got: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if tol < 0.0 {
        return Err(Error::Domain(format!("negative merge tolerance {tol}")));
    }
    let a_norm = frobenius(a);
    if a_norm == 0.0 {
        return Err(Error::DegenerateInput("coupling operator is zero".into()));
    }
    let levels = h.levels();
    let mut raw: Vec<(f64, Mat)> = Vec::with_capacity(levels.len() * levels.len());
    for li in levels {
        let left = &li.projector * a;
        for lj in levels {
            raw.push((li.energy - lj.energy, &left * &lj.projector));
        }
    }
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut frequencies = Vec::new();
    let mut components = Vec::new();
    let mut k = 0;
    while k < raw.len() {
        let start = k;
        let mut sum = raw[k].1.clone();
        k += 1;
        while k < raw.len() && raw[k].0 - raw[k - 1].0 <= tol {
            sum += &raw[k].1;
            k += 1;
        }
        let nu = raw[start..k].iter().map(|r| r.0).sum::<f64>() / (k - start) as f64;
        if frobenius(&sum) > 1e-12 * a_norm {
            frequencies.push(nu);
            components.push(sum);
        }
    }
    Ok(BohrDecomposition { operator: a.clone(), frequencies, components, tol })
}

impl BohrDecomposition {
    pub fn operator(&self) -> &Mat {
        &self.operator
    }

    /// Distinct frequencies in ascending order.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn components(&self) -> &[Mat] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Mat)> {
        self.frequencies.iter().copied().zip(self.components.iter())
    }

    pub fn index_of(&self, nu: f64) -> Option<usize> {
        let slack = self.tol.max(1e-12) * 4.0;
        self.frequencies.iter().position(|&f| (f - nu).abs() <= slack)
    }

    pub fn component(&self, nu: f64) -> Option<&Mat> {
        self.index_of(nu).map(|k| &self.components[k])
    }

    /// `‖Σ_ν A_ν - A‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self.components.iter().fold(Mat::zeros(self.operator.nrows(), self.operator.ncols()), |acc, m| acc + m);
        frobenius(&(sum - &self.operator))
    }

    /// Largest `‖A_{-ν} - A_ν^†‖_F`; missing partners count with their full norm.
    pub fn conjugation_residual(&self) -> f64 {
        self.iter()
            .map(|(nu, m)| match self.component(-nu) {
                Some(partner) => frobenius(&(partner - m.adjoint())),
                None => frobenius(m),
            })
            .fold(0.0, f64::max)
    }

    /// `Σ_ν c_ν e^{iνt} A_ν` for arbitrary weights.
    pub fn weighted(&self, weight: impl Fn(f64) -> C64, t: f64) -> Mat {
        let d = self.operator.nrows();
        self.iter()
            .fold(Mat::zeros(d, d), |acc, (nu, m)| acc + m * (weight(nu) * C64::from_polar(1.0, nu * t)))
    }

    /// `e^{iHt} A e^{-iHt}` through the Bohr components.
    pub fn heisenberg(&self, t: f64) -> Mat {
        self.weighted(|_| C64::new(1.0, 0.0), t)
    }
}
