use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hermiticity_residual, hermitize, random_hermitian, Mat, C64};
use crate::lindblad::{assemble_generator, parent_hamiltonian, spectral_gap, KossakowskiSpec, SuperKind, Superoperator};
use crate::quadrature::grid::{cosh_kernel, select_grid, QuadratureGrid};
use crate::spectral::gibbs::{gibbs_state, GibbsState};
use crate::spectral::hamiltonian::SpectralHamiltonian;

use super::factors::{build_factors, FactorPair};

/// Weight `w(t)` in `∫ w(t) Σ_j 𝓑̂_{j,t}^† 𝓑̂_{j,t} dt`.
#[derive(Debug, Clone)]
pub enum WeightKernel {
    /// `g(t) = 1/(β cosh(2πt/β))`; reduces to `½δ₀` at `β = 0`.
    Cosh { beta: f64 },
    /// `½δ₀`.
    Delta,
    /// Explicit `(t, weight)` nodes.
    Table(Vec<(f64, f64)>),
}

impl WeightKernel {
    /// Quadrature nodes; the grid is used only by the cosh kernel.
    pub fn nodes(&self, grid: &QuadratureGrid) -> Vec<(f64, f64)> {
        match self {
            WeightKernel::Cosh { beta } if *beta == 0.0 => vec![(0.0, 0.5)],
            WeightKernel::Cosh { .. } => grid.nodes(),
            WeightKernel::Delta => vec![(0.0, 0.5)],
            WeightKernel::Table(t) => t.clone(),
        }
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        match self {
            WeightKernel::Cosh { beta } if *beta > 0.0 => Some(cosh_kernel(t, *beta)),
            _ => None,
        }
    }

    pub fn mass(&self, grid: &QuadratureGrid) -> f64 {
        self.nodes(grid).iter().map(|n| n.1).sum()
    }
}

/// Grid used by the sum-of-squares checks: Lemma B.1 parameters at `tol`.
pub fn default_grid(beta: f64, h: &SpectralHamiltonian, tol: f64) -> Result<QuadratureGrid> {
    select_grid(beta, h.norm(), 1, tol)
}

/// `𝓔(X, Y) = -⟨X, ℒ^†(Y)⟩_σ`.
pub fn dirichlet_form(l: &Superoperator, x: &Mat, y: &Mat, g: &GibbsState) -> Result<C64> {
    if l.kind() != SuperKind::Generator {
        return Err(Error::Domain("Dirichlet form needs a generator".into()));
    }
    let ly = l.adjoint().apply(y);
    Ok(-g.kms_inner(x, &ly)?)
}

/// Bohr-resolved closed form
/// `Σ α_{νν'} e^{β(ν+ν')/4} / (2cosh(β(ν-ν')/4)) ⟨[A_{ν'},X],[A_ν,Y]⟩_σ`.
pub fn dirichlet_bohr(spec: &KossakowskiSpec, x: &Mat, y: &Mat, g: &GibbsState) -> Result<C64> {
    let beta = spec.beta();
    let mut total = c(0.0);
    for ch in spec.channels() {
        let freqs = ch.bohr.frequencies();
        let comps = ch.bohr.components();
        let cx: Vec<Mat> = comps.iter().map(|a| commutator(a, x)).collect();
        let cy: Vec<Mat> = comps.iter().map(|a| commutator(a, y)).collect();
        for (a, &nu) in freqs.iter().enumerate() {
            for (b, &nu_p) in freqs.iter().enumerate() {
                let alpha = ch.c[(a, b)];
                if alpha == c(0.0) {
                    continue;
                }
                let w = (beta * (nu + nu_p) / 4.0).exp() / (2.0 * (beta * (nu - nu_p) / 4.0).cosh());
                total += alpha * w * g.kms_inner(&cx[b], &cy[a])?;
            }
        }
    }
    Ok(total)
}

/// `Σ_k w_k Σ_j ⟨[B_{j,t_k}, X], [B_{j,t_k}, Y]⟩_σ`.
pub fn dirichlet_sos(pairs: &[FactorPair], nodes: &[(f64, f64)], x: &Mat, y: &Mat, g: &GibbsState) -> Result<C64> {
    let mut total = c(0.0);
    for &(t, w) in nodes {
        for p in pairs {
            let b = p.b_at(t);
            total += g.kms_inner(&commutator(&b, x), &commutator(&b, y))? * w;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct SosReport {
    pub samples: usize,
    pub grid_points: usize,
    pub max_residual: f64,
    pub max_oracle_residual: f64,
    pub max_value: f64,
}

/// Compare `𝓔` from the generator with the time-domain sum of squares and
/// with the Bohr-resolved closed form on random Hermitian pairs.
pub fn verify_sos_dirichlet(spec: &KossakowskiSpec, g: &GibbsState, samples: usize, grid: &QuadratureGrid, seed: u64) -> Result<SosReport> {
    let l = assemble_generator(spec)?;
    let pairs = build_factors(spec, g)?;
    let kernel = WeightKernel::Cosh { beta: spec.beta() };
    let nodes = kernel.nodes(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim();
    let mut report = SosReport { samples, grid_points: nodes.len(), max_residual: 0.0, max_oracle_residual: 0.0, max_value: 0.0 };
    for _ in 0..samples {
        let x = random_hermitian(d, &mut rng);
        let y = random_hermitian(d, &mut rng);
        let e = dirichlet_form(&l, &x, &y, g)?;
        let sos = dirichlet_sos(&pairs, &nodes, &x, &y, g)?;
        let bohr = dirichlet_bohr(spec, &x, &y, g)?;
        report.max_residual = report.max_residual.max((e - sos).norm());
        report.max_oracle_residual = report.max_oracle_residual.max((e - bohr).norm());
        report.max_value = report.max_value.max(e.norm());
    }
    Ok(report)
}

/// `Σ_k w_k Σ_j 𝓑̂_{j,t_k}^† 𝓑̂_{j,t_k}`; the delta kernel gives
/// `H₀ = ½ Σ_j 𝓑̂_j^† 𝓑̂_j`.
pub fn parent_from_factors(pairs: &[FactorPair], kernel: &WeightKernel, grid: &QuadratureGrid) -> Result<Superoperator> {
    let first = pairs.first().ok_or_else(|| Error::DegenerateInput("no factor pairs".into()))?;
    let d = first.sharp().nrows();
    let nodes = kernel.nodes(grid);
    let terms: Vec<Mat> = nodes
        .par_iter()
        .map(|&(t, w)| {
            let mut acc = Mat::zeros(d * d, d * d);
            for p in pairs {
                let b = p.first_order(t).matrix;
                acc += b.adjoint() * &b * c(w);
            }
            acc
        })
        .collect();
    let h = terms.into_iter().fold(Mat::zeros(d * d, d * d), |acc, m| acc + m);
    debug_assert!(hermiticity_residual(&h) <= 1e-10 * h.norm().max(1.0));
    Superoperator::new(hermitize(&h), SuperKind::ParentHamiltonian)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRatioRow {
    pub beta: f64,
    pub gap_h0: f64,
    pub gap_parent: f64,
    pub ratio: f64,
}

/// 60 log-spaced points in `[0.05, 10]`.
pub fn default_betas() -> Vec<f64> {
    log_space(0.05, 10.0, 60)
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// `gap(H₀) / gap(Ĥ)` for each `β`, with `Ĥ` from the generator and `H₀`
/// from the delta kernel.
pub fn gap_ratio_scan<F>(h: &SpectralHamiltonian, builder: F, betas: &[f64]) -> Result<Vec<GapRatioRow>>
where
    F: Fn(f64) -> Result<KossakowskiSpec> + Sync,
{
    betas
        .par_iter()
        .map(|&beta| {
            let spec = builder(beta)?;
            let g = gibbs_state(h, beta)?;
            let l = assemble_generator(&spec)?;
            let parent = parent_hamiltonian(&l, &g)?;
            let pairs = build_factors(&spec, &g)?;
            let h0 = parent_from_factors(&pairs, &WeightKernel::Delta, &QuadratureGrid::delta(beta))?;
            let gap_parent = spectral_gap(&parent)?;
            let gap_h0 = spectral_gap(&h0)?;
            let ratio = if gap_parent > 0.0 { gap_h0 / gap_parent } else { f64::NAN };
            Ok(GapRatioRow { beta, gap_h0, gap_parent, ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, op_norm, sandwich, unvec, vec};
    use crate::lindblad::{make_davies, make_dll, Weighting};
    use crate::spectral::hamiltonian::build_tfim;
    use crate::spectral::pauli::{Pauli, PauliString};

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
    fn dirichlet_identity_and_positivity() {
        let spec = make_davies(&h_z(), &x(), 1.0).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let g = gibbs_state(&h_z(), 1.0).unwrap();
        assert!(dirichlet_form(&l, &identity(2), &identity(2), &g).unwrap().norm() < 1e-14);
        let xm = Pauli::X.matrix();
        assert!(dirichlet_form(&l, &xm, &xm, &g).unwrap().re >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = random_hermitian(2, &mut rng);
            assert!(dirichlet_form(&l, &a, &a, &g).unwrap().re >= -1e-10);
        }
    }

    #[test]
    fn sos_davies_one_qubit() {
        let beta = 1.0;
        let spec = make_davies(&h_z(), &x(), beta).unwrap();
        let g = gibbs_state(&h_z(), beta).unwrap();
        let grid = default_grid(beta, &h_z(), 1e-9).unwrap();
        let r = verify_sos_dirichlet(&spec, &g, 20, &grid, 1).unwrap();
        assert!(r.max_residual <= 1e-6, "{r:?}");
        assert!(r.max_oracle_residual <= 1e-8, "{r:?}");
    }

    #[test]
    fn sos_dll_tfim() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let beta = 1.0;
        let spec = make_dll(&h, &tfim_couplings(), beta, Weighting::gaussian()).unwrap();
        let g = gibbs_state(&h, beta).unwrap();
        let grid = default_grid(beta, &h, 1e-9).unwrap();
        let r = verify_sos_dirichlet(&spec, &g, 10, &grid, 2).unwrap();
        assert!(r.max_residual <= 1e-6, "{r:?}");
        assert!(r.max_oracle_residual <= 1e-8, "{r:?}");
    }

    #[test]
    fn parent_routes_agree() {
        let beta = 1.0;
        let spec = make_davies(&h_z(), &x(), beta).unwrap();
        let g = gibbs_state(&h_z(), beta).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let direct = parent_hamiltonian(&l, &g).unwrap();
        let pairs = build_factors(&spec, &g).unwrap();
        let grid = default_grid(beta, &h_z(), 1e-9).unwrap();
        let sos = parent_from_factors(&pairs, &WeightKernel::Cosh { beta }, &grid).unwrap();
        assert!(op_norm(&(direct.matrix() - sos.matrix())) <= 1e-6);
    }

    #[test]
    fn dirichlet_equals_conjugated_parent() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let beta = 1.3;
        let spec = make_dll(&h, &tfim_couplings(), beta, Weighting::gaussian()).unwrap();
        let g = gibbs_state(&h, beta).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let hp = parent_hamiltonian(&l, &g).unwrap();
        let gamma_half = sandwich(g.quarter_sigma(), g.quarter_sigma());
        let m = &gamma_half * hp.matrix() * &gamma_half;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            let lhs = dirichlet_form(&l, &a, &b, &g).unwrap();
            let rhs = crate::linalg::hs_inner(&a, &unvec(&(&m * vec(&b)), 4));
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn delta_kernel_annihilates_purification() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let spec = make_dll(&h, &tfim_couplings(), 0.0, Weighting::Unit).unwrap();
        let g = gibbs_state(&h, 0.0).unwrap();
        let pairs = build_factors(&spec, &g).unwrap();
        let h0 = parent_from_factors(&pairs, &WeightKernel::Delta, &QuadratureGrid::delta(0.0)).unwrap();
        assert!((h0.matrix() * vec(g.sqrt_sigma())).norm() < 1e-12);
        assert!(crate::linalg::eigvalsh(h0.matrix())[0] >= -1e-9);
        // at β = 0 both kernels coincide
        let cosh = parent_from_factors(&pairs, &WeightKernel::Cosh { beta: 0.0 }, &QuadratureGrid::delta(0.0)).unwrap();
        assert!((cosh.matrix() - h0.matrix()).norm() < 1e-14);
    }

    #[test]
    fn gap_ratio_approaches_one_at_high_temperature() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let rows = gap_ratio_scan(&h, |b| make_dll(&h, &tfim_couplings(), b, Weighting::gaussian()), &[0.01, 0.05]).unwrap();
        for r in rows {
            assert!((r.ratio - 1.0).abs() < 0.02, "{r:?}");
        }
    }

    #[test]
    fn log_spacing() {
        let b = default_betas();
        assert_eq!(b.len(), 60);
        assert!((b[0] - 0.05).abs() < 1e-15 && (b[59] - 10.0).abs() < 1e-12);
    }
}
