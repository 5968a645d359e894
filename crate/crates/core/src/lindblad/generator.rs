use crate::error::{Error, Result};
use crate::linalg::{c, eigvals, eigvalsh, frobenius, hermiticity_residual, hermitize, identity, kron, sandwich, Mat, C64};
use crate::spectral::gibbs::GibbsState;

use super::spec::{Family, KossakowskiSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperKind {
    Generator,
    Adjoint,
    ParentHamiltonian,
    Custom,
}

/// A linear map on `d x d` matrices acting on column-major vectorizations.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: Mat,
    kind: SuperKind,
    system_dim: usize,
    db_tolerance: f64,
}

pub const DB_TOL: f64 = 1e-8;
pub const CKG_DB_TOL: f64 = 1e-6;

impl Superoperator {
    pub fn new(matrix: Mat, kind: SuperKind) -> Result<Self> {
        let n = matrix.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: "d^2 x d^2".into(), got: format!("{}x{}", n, matrix.ncols()) });
        }
        Ok(Self { matrix, kind, system_dim: d, db_tolerance: DB_TOL })
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn kind(&self) -> SuperKind {
        self.kind
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn db_tolerance(&self) -> f64 {
        self.db_tolerance
    }

    pub fn with_db_tolerance(mut self, tol: f64) -> Self {
        self.db_tolerance = tol;
        self
    }

    /// Hilbert–Schmidt adjoint.
    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            SuperKind::Generator => SuperKind::Adjoint,
            SuperKind::Adjoint => SuperKind::Generator,
            k => k,
        };
        Self { matrix: self.matrix.adjoint(), kind, system_dim: self.system_dim, db_tolerance: self.db_tolerance }
    }

    /// Apply to a `d x d` matrix.
    pub fn apply(&self, x: &Mat) -> Mat {
        let v = &self.matrix * crate::linalg::vec(x);
        crate::linalg::unvec(&v, self.system_dim)
    }

    /// `|⟨⟨I| S|` as a Frobenius norm; zero for trace-preserving generators.
    pub fn trace_residual(&self) -> f64 {
        let i = crate::linalg::vec(&identity(self.system_dim));
        (i.adjoint() * &self.matrix).norm()
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        match self.kind {
            SuperKind::ParentHamiltonian => Ok(eigvalsh(&self.matrix).into_iter().map(c).collect()),
            _ => eigvals(&self.matrix),
        }
    }
}

/// `(1/2i) Σ_{ν,ν'} tanh(β(ν'-ν)/4) α_{νν'} A_{ν'}^† A_ν`, summed over couplings.
pub fn coherent_term(spec: &KossakowskiSpec) -> Result<Mat> {
    let d = spec.dim();
    let beta = spec.beta();
    let mut g = Mat::zeros(d, d);
    for ch in spec.channels() {
        let freqs = ch.bohr.frequencies();
        let comps = ch.bohr.components();
        for (a, &nu) in freqs.iter().enumerate() {
            for (b, &nu_p) in freqs.iter().enumerate() {
                let w = (beta * (nu_p - nu) / 4.0).tanh();
                if w == 0.0 || ch.c[(a, b)] == c(0.0) {
                    continue;
                }
                g += comps[b].adjoint() * &comps[a] * (ch.c[(a, b)] * w);
            }
        }
    }
    let g = g * C64::new(0.0, -0.5);
    let scale = frobenius(&g).max(1.0);
    let res = hermiticity_residual(&g);
    if res > 1e-10 * scale {
        return Err(Error::Accuracy { what: "coherent term Hermiticity".into(), residual: res });
    }
    Ok(hermitize(&g))
}

/// Vectorized `Σ_k (F_k · F_k^† - ½{F_k^†F_k, ·})` for explicit jump operators.
pub fn jump_superoperator(jumps: &[Mat]) -> Mat {
    let d = jumps[0].nrows();
    let id = identity(d);
    let mut k = Mat::zeros(d, d);
    let mut out = Mat::zeros(d * d, d * d);
    for f in jumps {
        out += kron(&f.conjugate(), f);
        k += f.adjoint() * f;
    }
    out - (kron(&id, &k) + kron(&k.transpose(), &id)) * c(0.5)
}

/// `ℒ = -i[G, ·] + Σ α_{νν'} (A_ν · A_{ν'}^† - ½{A_{ν'}^†A_ν, ·})`, vectorized.
pub fn assemble_generator(spec: &KossakowskiSpec) -> Result<Superoperator> {
    let d = spec.dim();
    let id = identity(d);
    let g = coherent_term(spec)?;
    let mut k = Mat::zeros(d, d);
    let mut out = Mat::zeros(d * d, d * d);
    for ch in spec.channels() {
        let comps = ch.bohr.components();
        for (b, a_p) in comps.iter().enumerate() {
            let mut inner = Mat::zeros(d, d);
            for (a, a_nu) in comps.iter().enumerate() {
                let alpha = ch.c[(a, b)];
                if alpha != c(0.0) {
                    inner += a_nu * alpha;
                }
            }
            out += kron(&a_p.conjugate(), &inner);
            k += a_p.adjoint() * &inner;
        }
    }
    out -= (kron(&id, &k) + kron(&k.transpose(), &id)) * c(0.5);
    out -= (kron(&id, &g) - kron(&g.transpose(), &id)) * C64::new(0.0, 1.0);
    let tol = if matches!(spec.family(), Family::Ckg(_)) { CKG_DB_TOL } else { DB_TOL };
    Ok(Superoperator::new(out, SuperKind::Generator)?.with_db_tolerance(tol))
}

/// `‖Γ_σ ℒ^† - ℒ Γ_σ‖_F / ‖ℒ‖_F` with `Γ_σ(X) = σ^{1/2} X σ^{1/2}`.
pub fn detailed_balance_residual(l: &Superoperator, g: &GibbsState) -> f64 {
    let gamma = sandwich(g.sqrt_sigma(), g.sqrt_sigma());
    let lhs = &gamma * l.matrix().adjoint();
    let rhs = l.matrix() * &gamma;
    frobenius(&(lhs - rhs)) / frobenius(l.matrix()).max(f64::MIN_POSITIVE)
}

/// `Ĥ = -σ^{-1/4} ℒ(σ^{1/4} · σ^{1/4}) σ^{-1/4}`, checked for detailed balance
/// first and Hermitized afterwards.
pub fn parent_hamiltonian(l: &Superoperator, g: &GibbsState) -> Result<Superoperator> {
    if l.kind() != SuperKind::Generator {
        return Err(Error::Domain("parent Hamiltonian needs a generator".into()));
    }
    if g.dim() != l.system_dim() {
        return Err(Error::DimensionMismatch { expected: format!("{}", l.system_dim()), got: format!("{}", g.dim()) });
    }
    let res = detailed_balance_residual(l, g);
    if res > l.db_tolerance() {
        return Err(Error::DetailedBalance { residual: res, tolerance: l.db_tolerance() });
    }
    let w = sandwich(g.quarter_sigma(), g.quarter_sigma());
    let w_inv = sandwich(g.inv_quarter_sigma(), g.inv_quarter_sigma());
    let h = -(w_inv * l.matrix() * w);
    let scale = frobenius(&h).max(1.0);
    let herm = hermiticity_residual(&h);
    if herm > 1e-6 * scale {
        return Err(Error::DetailedBalance { residual: herm / scale, tolerance: 1e-6 });
    }
    Ok(Superoperator::new(hermitize(&h), SuperKind::ParentHamiltonian)?.with_db_tolerance(l.db_tolerance()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapRule {
    /// Remove the single eigenvalue closest to zero (the stationary state)
    /// and take the slowest remaining mode; additional kernel vectors give a
    /// zero gap.
    Stationary,
    /// Ignore every eigenvalue within the zero tolerance.
    Nonzero,
}

#[derive(Debug, Clone, Copy)]
pub struct GapOptions {
    /// Relative to `‖S‖_F`.
    pub zero_tol: f64,
    pub rule: GapRule,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self { zero_tol: 1e-9, rule: GapRule::Stationary }
    }
}

pub fn spectral_gap(s: &Superoperator) -> Result<f64> {
    spectral_gap_with(s, GapOptions::default())
}

/// Gap of a generator (`-max Re λ`) or of a parent Hamiltonian (smallest
/// nonzero eigenvalue), using the same convention for both.
pub fn spectral_gap_with(s: &Superoperator, opts: GapOptions) -> Result<f64> {
    let mut vals = s.eigenvalues()?;
    if s.kind() == SuperKind::ParentHamiltonian {
        vals.iter_mut().for_each(|z| *z = -*z);
    }
    Ok(gap_of(&vals, opts.zero_tol * frobenius(s.matrix()), opts.rule))
}

/// Gap of a generator spectrum.
pub fn gap_of(vals: &[C64], tol: f64, rule: GapRule) -> f64 {
    let mut rest: Vec<C64> = vals.to_vec();
    match rule {
        GapRule::Stationary => {
            if let Some(k) = (0..rest.len()).min_by(|&a, &b| rest[a].norm().total_cmp(&rest[b].norm())) {
                rest.remove(k);
            }
        }
        GapRule::Nonzero => rest.retain(|z| z.norm() > tol),
    }
    let top = rest.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return 0.0;
    }
    let gap = -top;
    if gap.abs() <= tol {
        0.0
    } else {
        gap.max(0.0)
    }
}

/// Number of eigenvalues within `tol_rel · ‖S‖_F` of zero.
pub fn kernel_dimension(s: &Superoperator, tol_rel: f64) -> Result<usize> {
    let tol = tol_rel * frobenius(s.matrix());
    Ok(s.eigenvalues()?.iter().filter(|z| z.norm() <= tol).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_hermitian, random_state, vec};
    use crate::lindblad::spec::{make_ckg, make_davies, make_dll, CkgParams, Weighting};
    use crate::spectral::gibbs::gibbs_state;
    use crate::spectral::hamiltonian::{build_tfim, SpectralHamiltonian};
    use crate::spectral::pauli::{Pauli, PauliString};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h_z() -> SpectralHamiltonian {
        SpectralHamiltonian::new(1, Pauli::Z.matrix()).unwrap()
    }

    fn x() -> Vec<(String, Mat)> {
        vec![("X1".into(), Pauli::X.matrix())]
    }

    fn tfim_couplings(labels: &[&str]) -> Vec<(String, Mat)> {
        labels.iter().map(|s| (s.to_string(), PauliString::parse(s, 2).unwrap().matrix())).collect()
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        let mut r: Vec<f64> = v.drain(..).map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn davies_on_z_is_stationary_with_real_spectrum() {
        let h = h_z();
        let spec = make_davies(&h, &x(), 1.0).unwrap();
        assert!(coherent_term(&spec).unwrap().norm() == 0.0);
        let l = assemble_generator(&spec).unwrap();
        let g = gibbs_state(&h, 1.0).unwrap();
        assert!(l.apply(g.sigma()).norm() < 1e-12);
        assert!(l.trace_residual() < 1e-12);
        for z in l.eigenvalues().unwrap() {
            assert!(z.im.abs() < 1e-10 && z.re < 1e-10);
        }
        let hp = parent_hamiltonian(&l, &g).unwrap();
        let a = sorted_re(hp.eigenvalues().unwrap());
        let b = sorted_re(l.eigenvalues().unwrap().into_iter().map(|z| -z).collect());
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn davies_single_qubit_rates() {
        // populations relax at rate γ(2)+γ(-2), coherences at half that
        let beta = 1.0;
        let spec = make_davies(&h_z(), &x(), beta).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let total = 1.0 + (-2.0f64).exp();
        let ev = sorted_re(l.eigenvalues().unwrap());
        let expect = [-total, -total / 2.0, -total / 2.0, 0.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn infinite_temperature_dll_fixes_maximally_mixed_state() {
        let h = h_z();
        let spec = make_dll(&h, &x(), 0.0, Weighting::Unit).unwrap();
        let l = assemble_generator(&spec).unwrap();
        assert!(l.apply(&(identity(2) * c(0.5))).norm() < 1e-14);
        let g = gibbs_state(&h, 0.0).unwrap();
        let hp = parent_hamiltonian(&l, &g).unwrap();
        assert!((hp.matrix() + l.matrix()).norm() < 1e-12);
    }

    #[test]
    fn one_qubit_dll_coherent_term_pinned() {
        // H=Z, A=X: ν = ±2, v = q(ν)e^{-βν/4}; direct summation of the two
        // off-diagonal Bohr pairs
        let beta = 1.0;
        let spec = make_dll(&h_z(), &x(), beta, Weighting::gaussian()).unwrap();
        let g = coherent_term(&spec).unwrap();
        let q = (-4.0f64 / 32.0).exp();
        let v = [q * 0.5f64.exp(), q * (-0.5f64).exp()];
        let lower = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let (a_m, a_p) = (lower.adjoint(), lower);
        // (ν,ν') = (-2, 2): tanh(β), term A_2^† A_{-2}; (2,-2): tanh(-β), term A_{-2}^† A_2
        let oracle = (a_p.adjoint() * &a_m * c(v[0] * v[1] * beta.tanh()) + a_m.adjoint() * &a_p * c(-v[0] * v[1] * beta.tanh()))
            * C64::new(0.0, -0.5);
        assert!((&g - &oracle).norm() < 1e-14);
        // A_2^† A_{-2} = (σ^+)^2 = 0, so G vanishes for a single qubit
        assert!(g.norm() < 1e-14);
    }

    #[test]
    fn tfim_dll_detailed_balance_and_parent() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let cs = tfim_couplings(&["X1", "Z1", "X2", "Z2"]);
        for (beta, q) in [(1.0, Weighting::gaussian()), (3.0, Weighting::figure()), (0.4, Weighting::Unit)] {
            let spec = make_dll(&h, &cs, beta, q).unwrap();
            let gt = coherent_term(&spec).unwrap();
            assert!(hermiticity_residual(&gt) <= 1e-10);
            assert!(gt.norm() > 1e-6, "coherent term should not vanish");
            let l = assemble_generator(&spec).unwrap();
            let g = gibbs_state(&h, beta).unwrap();
            assert!(l.trace_residual() < 1e-10);
            assert!(l.apply(g.sigma()).norm() < 1e-9);
            assert!(detailed_balance_residual(&l, &g) < 1e-10);
            let hp = parent_hamiltonian(&l, &g).unwrap();
            assert!((hp.matrix() * vec(g.sqrt_sigma())).norm() < 1e-9);
            let eh = sorted_re(hp.eigenvalues().unwrap());
            assert!(eh[0] > -1e-9);
            assert!(eh[1] > 1e-6, "ergodic: simple kernel");
            let el = sorted_re(l.eigenvalues().unwrap().into_iter().map(|z| -z).collect());
            for (a, b) in eh.iter().zip(&el) {
                assert!((a - b).abs() < 1e-8, "{a} {b}");
            }
        }
    }

    #[test]
    fn kms_self_adjointness_on_random_pairs() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let spec = make_dll(&h, &tfim_couplings(&["X1", "Z2"]), 1.5, Weighting::gaussian()).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let adj = l.adjoint();
        let g = gibbs_state(&h, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let scale = frobenius(l.matrix());
        for _ in 0..20 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            let lhs = g.kms_inner(&a, &adj.apply(&b)).unwrap();
            let rhs = g.kms_inner(&adj.apply(&a), &b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-8 * scale);
        }
        // trace preservation on random states
        for _ in 0..10 {
            let psi = random_state(4, &mut rng);
            let rho = &psi * psi.adjoint();
            assert!(l.apply(&rho).trace().norm() < 1e-10);
        }
    }

    #[test]
    fn printed_coherent_sign_breaks_detailed_balance() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let spec = make_dll(&h, &tfim_couplings(&["X1", "Z1", "X2", "Z2"]), 2.0, Weighting::gaussian()).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let gt = coherent_term(&spec).unwrap();
        let id = identity(4);
        // -i[G,·] → +i[G,·] twice over flips the sign of the coherent part
        let flipped = l.matrix() + (kron(&id, &gt) - kron(&gt.transpose(), &id)) * C64::new(0.0, 2.0);
        let flipped = Superoperator::new(flipped, SuperKind::Generator).unwrap();
        let g = gibbs_state(&h, 2.0).unwrap();
        assert!(detailed_balance_residual(&flipped, &g) > 1e-3);
        assert!(matches!(parent_hamiltonian(&flipped, &g), Err(Error::DetailedBalance { .. })));
    }

    #[test]
    fn ckg_generator_is_approximately_balanced() {
        let h = h_z();
        let spec = make_ckg(&h, &x(), 1.0, CkgParams::for_beta(1.0)).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let g = gibbs_state(&h, 1.0).unwrap();
        assert!(detailed_balance_residual(&l, &g) <= CKG_DB_TOL);
        assert!(parent_hamiltonian(&l, &g).is_ok());
    }

    #[test]
    fn gap_conventions() {
        let vals = [c(0.0), c(-1e-14), c(-0.5), C64::new(-0.7, 0.3)];
        assert_eq!(gap_of(&vals, 1e-9, GapRule::Stationary), 0.0);
        assert!((gap_of(&vals, 1e-9, GapRule::Nonzero) - 0.5).abs() < 1e-15);
        let ergodic = [c(1e-13), c(-0.25), c(-3.0)];
        assert!((gap_of(&ergodic, 1e-9, GapRule::Stationary) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tfim_dll_gap_at_beta_two_pinned() {
        let h = build_tfim(2, 1.0, 0.1).unwrap();
        let spec = make_dll(&h, &tfim_couplings(&["X1", "Z1", "X2", "Z2"]), 2.0, Weighting::gaussian()).unwrap();
        let l = assemble_generator(&spec).unwrap();
        let g = gibbs_state(&h, 2.0).unwrap();
        let hp = parent_hamiltonian(&l, &g).unwrap();
        let gap_l = spectral_gap(&l).unwrap();
        let gap_h = spectral_gap(&hp).unwrap();
        assert!((gap_l - gap_h).abs() < 1e-8);
        assert!((gap_h - 0.124_631_495_9).abs() < 1e-8, "{gap_h}");
        assert_eq!(kernel_dimension(&hp, 1e-9).unwrap(), 1);
    }
}
