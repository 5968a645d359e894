use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, op_norm, Mat, C64};
use crate::lindblad::KossakowskiSpec;
use crate::spectral::bohr::BohrDecomposition;
use crate::spectral::gibbs::GibbsState;

/// First-order factor pair for one column `j` of `Q`:
/// `B = Σ_ν Q_{νj} e^{βν/4} A_ν`, `B♯ = σ^{1/4} B σ^{-1/4} = Σ_ν Q_{νj} A_ν`,
/// `B♭ = σ^{-1/4} B σ^{1/4} = Σ_ν Q_{νj} e^{βν/2} A_ν`.
#[derive(Debug, Clone)]
pub struct FactorPair {
    pub j: usize,
    pub channel: usize,
    pub column: usize,
    bohr: Arc<BohrDecomposition>,
    beta: f64,
    coeffs: Vec<C64>,
    b: Mat,
    sharp: Mat,
    flat: Mat,
}

impl FactorPair {
    /// Pair built from explicit Bohr coefficients `Q_{νj}`.
    pub fn from_coefficients(j: usize, bohr: Arc<BohrDecomposition>, coeffs: Vec<C64>, beta: f64) -> Result<Self> {
        if coeffs.len() != bohr.len() {
            return Err(Error::DimensionMismatch { expected: bohr.len().to_string(), got: coeffs.len().to_string() });
        }
        let mut pair = Self { j, channel: 0, column: 0, bohr, beta, coeffs, b: Mat::zeros(0, 0), sharp: Mat::zeros(0, 0), flat: Mat::zeros(0, 0) };
        pair.b = pair.weighted(0.25, 0.0);
        pair.sharp = pair.weighted(0.0, 0.0);
        pair.flat = pair.weighted(0.5, 0.0);
        Ok(pair)
    }

    /// `Σ_ν Q_{νj} e^{sβν} e^{iνt} A_ν`.
    fn weighted(&self, s: f64, t: f64) -> Mat {
        let d = self.bohr.operator().nrows();
        self.bohr
            .iter()
            .zip(&self.coeffs)
            .fold(Mat::zeros(d, d), |acc, ((nu, a), q)| acc + a * (*q * (s * self.beta * nu).exp() * C64::from_polar(1.0, nu * t)))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn bohr(&self) -> &BohrDecomposition {
        &self.bohr
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn sharp(&self) -> &Mat {
        &self.sharp
    }

    pub fn flat(&self) -> &Mat {
        &self.flat
    }

    /// `B_{j,t} = e^{iHt} B e^{-iHt}`.
    pub fn b_at(&self, t: f64) -> Mat {
        self.weighted(0.25, t)
    }

    /// `(B♯_{j,t}, B♭_{j,t})`.
    pub fn at(&self, t: f64) -> (Mat, Mat) {
        (self.weighted(0.0, t), self.weighted(0.5, t))
    }

    /// `(‖B♯‖, ‖B♭‖)`.
    pub fn norm_bounds(&self) -> (f64, f64) {
        (op_norm(&self.sharp), op_norm(&self.flat))
    }

    /// `𝓑̂_{j,t} = I ⊗ B♯_{j,t} - (B♭_{j,t})^T ⊗ I`.
    pub fn first_order(&self, t: f64) -> FirstOrderOp {
        let (s, f) = self.at(t);
        FirstOrderOp { j: self.j, t, matrix: doubled(&s, &f) }
    }

    /// `‖B♯σ^{1/2} - σ^{1/2}B♭‖`, relative to `max(‖B♯‖, ‖B♭‖, 1)`.
    pub fn compatibility_residual(&self, g: &GibbsState) -> f64 {
        let r = &self.sharp * g.sqrt_sigma() - g.sqrt_sigma() * &self.flat;
        let (a, b) = self.norm_bounds();
        op_norm(&r) / a.max(b).max(1.0)
    }
}

/// `I ⊗ S - F^T ⊗ I`, the vectorization of `X ↦ S X - X F`.
pub fn doubled(sharp: &Mat, flat: &Mat) -> Mat {
    let id = identity(sharp.nrows());
    kron(&id, sharp) - kron(&flat.transpose(), &id)
}

#[derive(Debug, Clone)]
pub struct FirstOrderOp {
    pub j: usize,
    pub t: f64,
    pub matrix: Mat,
}

/// One factor pair per column of each channel's `Q`, numbered consecutively.
pub fn build_factors(spec: &KossakowskiSpec, g: &GibbsState) -> Result<Vec<FactorPair>> {
    if (g.beta() - spec.beta()).abs() > 1e-12 * spec.beta().max(1.0) || g.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("Gibbs state at beta={} on dim {}", spec.beta(), spec.dim()),
            got: format!("beta={} on dim {}", g.beta(), g.dim()),
        });
    }
    let mut out = Vec::new();
    for (ci, ch) in spec.channels().iter().enumerate() {
        if ch.q.ncols() == 0 {
            return Err(Error::FactorizationUnavailable(ci));
        }
        let bohr = Arc::new(ch.bohr.clone());
        for col in 0..ch.q.ncols() {
            let coeffs: Vec<C64> = (0..ch.q.nrows()).map(|a| ch.q[(a, col)]).collect();
            let mut pair = FactorPair::from_coefficients(out.len(), bohr.clone(), coeffs, spec.beta())?;
            pair.channel = ci;
            pair.column = col;
            let res = pair.compatibility_residual(g);
            if res > 1e-10 {
                return Err(Error::Accuracy { what: format!("B♯σ^(1/2) = σ^(1/2)B♭ for factor {}", pair.j), residual: res });
            }
            out.push(pair);
        }
    }
    Ok(out)
}

/// Davies weights `γ⁺(ν) = min(1, e^{-βν/2})` and `γ⁻(ν) = min(e^{βν/2}, 1)`.
pub fn davies_weights(nu: f64, beta: f64) -> (f64, f64) {
    ((-beta * nu / 2.0).exp().min(1.0), (beta * nu / 2.0).exp().min(1.0))
}

/// Largest `‖𝓑̂_{j,t} |σ^{1/2}⟩⟩‖` over the given times.
pub fn frustration_residual(pairs: &[FactorPair], g: &GibbsState, times: &[f64]) -> f64 {
    let v = crate::linalg::vec(g.sqrt_sigma());
    let mut worst = 0.0f64;
    for p in pairs {
        for &t in times {
            worst = worst.max((p.first_order(t).matrix * &v).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::lindblad::{make_ckg, make_davies, make_dll, CkgParams, Weighting};
    use crate::spectral::gibbs::gibbs_state;
    use crate::spectral::hamiltonian::{build_tfim, SpectralHamiltonian};
    use crate::spectral::pauli::{Pauli, PauliString};
    use rand::{Rng, SeedableRng};

    fn h_z() -> SpectralHamiltonian {
        SpectralHamiltonian::new(1, Pauli::Z.matrix()).unwrap()
    }

    fn x() -> Vec<(String, Mat)> {
        vec![("X1".into(), Pauli::X.matrix())]
    }

    fn tfim_couplings() -> Vec<(String, Mat)> {
        ["X1", "Z1", "X2", "Z2"].iter().map(|s| (s.to_string(), PauliString::parse(s, 2).unwrap().matrix())).collect()
    }

    #[test]
    fn dll_sharp_is_the_jump_operator() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let beta = 1.4;
        let q = Weighting::gaussian();
        let spec = make_dll(&h, &tfim_couplings(), beta, q.clone()).unwrap();
        let g = gibbs_state(&h, beta).unwrap();
        let pairs = build_factors(&spec, &g).unwrap();
        assert_eq!(pairs.len(), 4);
        for p in &pairs {
            let l = p.bohr().weighted(|nu| q.eval(nu, beta) * (-beta * nu / 4.0).exp(), 0.0);
            assert!((p.sharp() - l).norm() < 1e-12);
        }
    }

    #[test]
    fn infinite_temperature_sharp_equals_flat() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let g = gibbs_state(&h, 0.0).unwrap();
        for spec in [make_davies(&h, &tfim_couplings(), 0.0).unwrap(), make_dll(&h, &tfim_couplings(), 0.0, Weighting::Unit).unwrap()] {
            for p in build_factors(&spec, &g).unwrap() {
                assert!((p.sharp() - p.flat()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn davies_closed_forms() {
        let beta = 1.2;
        let spec = make_davies(&h_z(), &x(), beta).unwrap();
        let g = gibbs_state(&h_z(), beta).unwrap();
        let pairs = build_factors(&spec, &g).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            let col = p.column;
            let nu = p.bohr().frequencies()[col];
            let a_nu = &p.bohr().components()[col];
            let (gp, gm) = davies_weights(nu, beta);
            assert!((p.sharp() - a_nu * c(gp)).norm() < 1e-14);
            assert!((p.flat() - a_nu * c(gm)).norm() < 1e-14);
        }
        for nu in [0.0, 0.5, 2.0, 3.7] {
            let (gp, gm) = davies_weights(nu, beta);
            let gamma = crate::lindblad::davies_rate(nu, beta);
            assert!((gp * gp - gamma).abs() < 1e-15);
            assert!((gm * gm - gamma * (beta * nu).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_by_quarter_powers() {
        let h = build_tfim(2, 1.0, 0.3).unwrap();
        let beta = 0.9;
        let spec = make_dll(&h, &tfim_couplings(), beta, Weighting::figure()).unwrap();
        let g = gibbs_state(&h, beta).unwrap();
        for p in build_factors(&spec, &g).unwrap() {
            let sharp = g.quarter_sigma() * p.b() * g.inv_quarter_sigma();
            let flat = g.inv_quarter_sigma() * p.b() * g.quarter_sigma();
            assert!((sharp - p.sharp()).norm() < 1e-10);
            assert!((flat - p.flat()).norm() < 1e-10);
        }
    }

    #[test]
    fn ckg_filtered_operators_are_bounded() {
        let beta = 1.0;
        let params = CkgParams::for_beta(beta);
        let spec = make_ckg(&h_z(), &x(), beta, params.clone()).unwrap();
        let g = gibbs_state(&h_z(), beta).unwrap();
        let pairs = build_factors(&spec, &g).unwrap();
        assert_eq!(pairs.len(), 41);
        let bound = (std::f64::consts::PI / 2.0).powf(0.25);
        for ((omega, w), p) in params.grid().into_iter().zip(&pairs) {
            // strip the quadrature weight to recover B♯_ω = Σ β_ν^ω A_ν
            let scale = (w * params.gamma(omega)).sqrt();
            let b_omega = p.sharp() / c(scale);
            assert!(op_norm(&b_omega) <= bound);
        }
    }

    #[test]
    fn frustration_freeness_at_random_times() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let times: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
        for beta in [0.3, 1.0, 4.0] {
            let g = gibbs_state(&h, beta).unwrap();
            let specs = [
                make_davies(&h, &tfim_couplings(), beta).unwrap(),
                make_dll(&h, &tfim_couplings(), beta, Weighting::gaussian()).unwrap(),
                make_ckg(&h, &tfim_couplings()[..1], beta, CkgParams::for_beta(beta)).unwrap(),
            ];
            for spec in &specs {
                let pairs = build_factors(spec, &g).unwrap();
                assert!(frustration_residual(&pairs, &g, &times) < 1e-10);
            }
        }
    }

    #[test]
    fn time_evolved_factor_matches_heisenberg_picture() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let spec = make_dll(&h, &tfim_couplings(), 1.0, Weighting::gaussian()).unwrap();
        let g = gibbs_state(&h, 1.0).unwrap();
        let p = &build_factors(&spec, &g).unwrap()[0];
        let (s, f) = p.at(0.83);
        assert!((s - h.heisenberg(p.sharp(), 0.83)).norm() < 1e-10);
        assert!((f - h.heisenberg(p.flat(), 0.83)).norm() < 1e-10);
    }
}
