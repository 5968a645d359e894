use crate::error::{Error, Result};
use crate::linalg::{c, from_eigen, hs_inner, Mat, C64};
use crate::spectral::hamiltonian::SpectralHamiltonian;

/// `σ = e^{-βH}/Z` with its fractional powers, all formed in the eigenbasis
/// of `H`.
#[derive(Debug, Clone)]
pub struct GibbsState {
    beta: f64,
    populations: Vec<f64>,
    eigenvectors: Mat,
    sigma: Mat,
    sqrt_sigma: Mat,
    quarter_sigma: Mat,
    inv_quarter_sigma: Mat,
    log_z: f64,
}

pub fn gibbs_state(h: &SpectralHamiltonian, beta: f64) -> Result<GibbsState> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("inverse temperature must be finite and non-negative, got {beta}")));
    }
    let energies = h.eigenvalues();
    let e0 = energies[0];
    // shift by the ground energy so large beta does not overflow
    let boltz: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z_shifted: f64 = boltz.iter().sum();
    let log_z = z_shifted.ln() - beta * e0;
    let populations: Vec<f64> = boltz.iter().map(|w| w / z_shifted).collect();
    let v = h.eigenvectors().clone();
    let power = |p: f64| -> Mat {
        let w: Vec<C64> = populations.iter().map(|&x| c(x.powf(p))).collect();
        from_eigen(&w, &v)
    };
    Ok(GibbsState {
        beta,
        sigma: power(1.0),
        sqrt_sigma: power(0.5),
        quarter_sigma: power(0.25),
        inv_quarter_sigma: power(-0.25),
        populations,
        eigenvectors: v,
        log_z,
    })
}

impl GibbsState {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }

    pub fn sqrt_sigma(&self) -> &Mat {
        &self.sqrt_sigma
    }

    pub fn quarter_sigma(&self) -> &Mat {
        &self.quarter_sigma
    }

    pub fn inv_quarter_sigma(&self) -> &Mat {
        &self.inv_quarter_sigma
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// Eigenvalues of `σ` in the order of the Hamiltonian's ascending spectrum.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn eigenvectors(&self) -> &Mat {
        &self.eigenvectors
    }

    /// `σ^p` for any real `p`. Populations underflowing to zero make negative
    /// powers infinite; callers at extreme `β` should stay with the cached ones.
    pub fn power(&self, p: f64) -> Mat {
        let w: Vec<C64> = self.populations.iter().map(|&x| c(x.powf(p))).collect();
        from_eigen(&w, &self.eigenvectors)
    }

    /// `Tr(σ O)`.
    pub fn expectation(&self, o: &Mat) -> C64 {
        (&self.sigma * o).trace()
    }

    /// `⟨X, Y⟩_σ = Tr(X^† σ^{1/2} Y σ^{1/2})`.
    pub fn kms_inner(&self, x: &Mat, y: &Mat) -> Result<C64> {
        self.inner_s(x, y, 0.5)
    }

    /// `⟨X, Y⟩_{σ,s} = Tr(X^† σ^{1-s} Y σ^s)`.
    pub fn inner_s(&self, x: &Mat, y: &Mat, s: f64) -> Result<C64> {
        let d = self.dim();
        for m in [x, y] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d}"),
                    got: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        let (left, right) = if s == 0.5 {
            (self.sqrt_sigma.clone(), self.sqrt_sigma.clone())
        } else {
            (self.power(1.0 - s), self.power(s))
        };
        Ok(hs_inner(x, &(left * y * right)))
    }
}
