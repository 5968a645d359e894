use crate::error::{Error, Result};
use crate::factorization::{doubled, FactorPair};
use crate::linalg::{c, embed, identity, kron, Mat};
use crate::lindblad::{jump_superoperator, KossakowskiSpec, SuperKind, Superoperator};
use crate::spectral::doubled::purified_vector;
use crate::spectral::gibbs::GibbsState;
use crate::spectral::pauli::{Pauli, PauliString};
use crate::linalg::CVec;

/// Annihilation tolerance for every jump on `|σ^{1/2}⟩⟩`.
pub const ANNIHILATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum Dressing {
    None,
    /// `X_j → I⊗Z_j`, `Y_j → I⊗X_j`, `Z_j → I⊗Y_j`, keyed by the coupling label.
    PauliCycle,
    /// One unitary on the doubled space per jump.
    Explicit(Vec<Mat>),
}

/// `Σ_j F_j · F_j^† - ½{F_j^†F_j, ·}` on the doubled space, with
/// `F_j = 𝒰_j (I ⊗ B♯_j - (B♭_j)ᵀ ⊗ I)`.
#[derive(Debug, Clone)]
pub struct AuxGenerator {
    pub jumps: Vec<Mat>,
    pub labels: Vec<String>,
    pub dressed: bool,
    system_dim: usize,
    target: CVec,
    kdiss: Mat,
}

/// Dressing unitary `I ⊗ σ_site^{cycle(p)}` on the doubled space of `n` qubits.
pub fn cycle_unitary(p: Pauli, site: usize, n: usize) -> Result<Mat> {
    let q = match p {
        Pauli::X => Pauli::Z,
        Pauli::Y => Pauli::X,
        Pauli::Z => Pauli::Y,
        Pauli::I => return Err(Error::Domain("identity coupling has no dressing".into())),
    };
    Ok(kron(&identity(1 << n), &embed(&q.matrix(), &[site], n)))
}

fn single_site(label: &str, n: usize) -> Result<(Pauli, usize)> {
    let s = PauliString::parse(label, n)?;
    let support = s.support();
    if support.len() != 1 {
        return Err(Error::Domain(format!("dressing needs a single-site Pauli coupling, got {label}")));
    }
    Ok((s.letters()[support[0]], support[0]))
}

impl AuxGenerator {
    pub fn new(jumps: Vec<Mat>, labels: Vec<String>, dressed: bool, target: CVec) -> Result<Self> {
        let dim = jumps.first().ok_or_else(|| Error::DegenerateInput("no jumps".into()))?.nrows();
        let d = (dim as f64).sqrt().round() as usize;
        if d * d != dim || target.len() != dim {
            return Err(Error::DimensionMismatch { expected: format!("{dim}"), got: format!("{}", target.len()) });
        }
        for (f, l) in jumps.iter().zip(&labels) {
            let r = (f * &target).norm();
            if r > ANNIHILATION_TOL {
                return Err(Error::Construction(format!("jump {l} does not annihilate the purified Gibbs state (residual {r:.3e})")));
            }
        }
        let kdiss = jumps.iter().fold(Mat::zeros(dim, dim), |acc, f| acc + f.adjoint() * f);
        Ok(Self { jumps, labels, dressed, system_dim: d, target, kdiss })
    }

    /// Dimension `d` of one register.
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// Dimension `d²` of the doubled space.
    pub fn dim(&self) -> usize {
        self.system_dim * self.system_dim
    }

    /// `|σ^{1/2}⟩⟩`, normalized.
    pub fn target(&self) -> &CVec {
        &self.target
    }

    pub fn target_projector(&self) -> Mat {
        &self.target * self.target.adjoint()
    }

    /// `ℒ(ρ)` for a density matrix on the doubled space.
    pub fn apply(&self, rho: &Mat) -> Mat {
        let mut out = (&self.kdiss * rho + rho * &self.kdiss) * c(-0.5);
        for f in &self.jumps {
            out += f * rho * f.adjoint();
        }
        out
    }

    /// `ℒ^†(O)`.
    pub fn apply_adjoint(&self, o: &Mat) -> Mat {
        let mut out = (&self.kdiss * o + o * &self.kdiss) * c(-0.5);
        for f in &self.jumps {
            out += f.adjoint() * o * f;
        }
        out
    }

    /// The `d⁴ x d⁴` vectorized generator.
    pub fn superoperator(&self) -> Result<Superoperator> {
        Superoperator::new(jump_superoperator(&self.jumps), SuperKind::Generator)
    }
}

/// Auxiliary generator from `t = 0` factors. `labels[j]` names the coupling
/// of pair `j` and is needed only for the Pauli-cycle dressing.
pub fn build_aux(pairs: &[FactorPair], labels: &[String], g: &GibbsState, dressing: &Dressing) -> Result<AuxGenerator> {
    let d = g.dim();
    let n = d.trailing_zeros() as usize;
    let mut jumps: Vec<Mat> = pairs.iter().map(|p| doubled(p.sharp(), p.flat())).collect();
    let dressed = !matches!(dressing, Dressing::None);
    match dressing {
        Dressing::None => {}
        Dressing::PauliCycle => {
            if 1 << n != d {
                return Err(Error::Domain("Pauli dressing needs a qubit system".into()));
            }
            for (f, l) in jumps.iter_mut().zip(labels) {
                let (p, site) = single_site(l, n)?;
                *f = cycle_unitary(p, site, n)? * &*f;
            }
        }
        Dressing::Explicit(us) => {
            if us.len() != jumps.len() {
                return Err(Error::DimensionMismatch { expected: jumps.len().to_string(), got: us.len().to_string() });
            }
            for (f, u) in jumps.iter_mut().zip(us) {
                *f = u * &*f;
            }
        }
    }
    AuxGenerator::new(jumps, labels.to_vec(), dressed, purified_vector(g))
}

/// Coupling label for each factor pair of `spec`.
pub fn pair_labels(spec: &KossakowskiSpec, pairs: &[FactorPair]) -> Vec<String> {
    pairs.iter().map(|p| spec.channels()[p.channel].label.clone()).collect()
}

/// The `β = 0` generator with jumps `I⊗σ_j^α - (σ_j^α)ᵀ⊗I` for every site and
/// `α ∈ {x, y, z}` (`q ≡ 1`), optionally Pauli-cycle dressed.
pub fn pauli_aux(n: usize, dressed: bool) -> Result<AuxGenerator> {
    let d = 1usize << n;
    let mut jumps = Vec::new();
    let mut labels = Vec::new();
    for site in 0..n {
        for p in Pauli::NONTRIVIAL {
            let s = embed(&p.matrix(), &[site], n);
            let mut f = kron(&identity(d), &s) - kron(&s.transpose(), &identity(d));
            if dressed {
                f = cycle_unitary(p, site, n)? * f;
            }
            jumps.push(f);
            labels.push(PauliString::single(n, site, p).label());
        }
    }
    let target = crate::linalg::vec(&identity(d)) / c((d as f64).sqrt());
    AuxGenerator::new(jumps, labels, dressed, target)
}
