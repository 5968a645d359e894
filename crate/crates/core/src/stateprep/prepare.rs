use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{build_factors, FactorPair};
use crate::linalg::{c, vec, CVec};
use crate::lindblad::{assemble_generator, parent_hamiltonian, spectral_gap, KossakowskiSpec, Superoperator};
use crate::quadrature::{assemble_b, measure_error, select_grid, QuadratureGrid, RectFactor};
use crate::spectral::doubled::DoubledState;
use crate::spectral::gibbs::GibbsState;
use crate::spectral::hamiltonian::SpectralHamiltonian;

use super::filter::{design_filter, EvenFilter};

/// Largest polynomial degree (in `x`) the designer will try.
pub const MAX_DEGREE_X: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMethod {
    ExactProjector,
    Polynomial,
}

/// Singular-value filter with pass band `[0, lo]` and stop band `[hi, α]`.
#[derive(Debug, Clone, Serialize)]
pub struct FilterSpec {
    pub method: FilterMethod,
    pub lo: f64,
    pub hi: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub eps: f64,
    #[serde(skip)]
    pub polynomial: Option<EvenFilter>,
}

impl FilterSpec {
    /// Bands from the measured quadrature error `ε` (kernel band `√ε`) and the
    /// gap `Δ` (edge `√(Δ/2)`); the threshold sits at their midpoint.
    pub fn design(method: FilterMethod, eps_quad: f64, delta: f64, alpha: f64, eps: f64) -> Result<Self> {
        let lo = eps_quad.max(0.0).sqrt();
        let hi = (delta / 2.0).sqrt();
        if !(lo < hi) || !(alpha >= hi) {
            return Err(Error::Domain(format!(
                "filter bands need sqrt(eps) < sqrt(delta/2) <= alpha, got {lo:.3e}, {hi:.3e}, {alpha:.3e}"
            )));
        }
        let polynomial = match method {
            FilterMethod::ExactProjector => None,
            FilterMethod::Polynomial => Some(design_filter(lo / alpha, hi / alpha, eps, MAX_DEGREE_X)?),
        };
        Ok(Self { method, lo, hi, threshold: 0.5 * (lo + hi), alpha, eps, polynomial })
    }

    /// Fixed-degree polynomial variant, for degree ladders.
    pub fn with_degree(&self, degree_x: usize) -> Result<Self> {
        let profile = super::filter::StepProfile::for_bands(self.lo / self.alpha, self.hi / self.alpha, self.eps / 4.0)?;
        Ok(Self { method: FilterMethod::Polynomial, polynomial: Some(EvenFilter::chebyshev(profile, degree_x)), ..self.clone() })
    }

    /// Degree in the singular value; zero for the exact projector.
    pub fn degree(&self) -> usize {
        self.polynomial.as_ref().map_or(0, EvenFilter::degree)
    }
}

/// Oracle counts for one run of the filter.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QueryLedger {
    pub u_bsharp: usize,
    pub u_bflat_t: usize,
    pub u_sel: usize,
    pub u_sel_t: usize,
    pub u_prep: usize,
    pub block_encoding_calls: usize,
    pub warm_start_copies: f64,
    pub max_evolution_time: f64,
}

impl QueryLedger {
    /// Each call to `U_𝔹` (or its inverse) uses one `U_B♯`, one `U_{(B♭)ᵀ}`,
    /// two `U_sel`, two `U_selᵀ` and one `U_prep`.
    pub fn for_calls(calls: usize, overlap_sq: f64, t_max: f64) -> Self {
        Self {
            u_bsharp: calls,
            u_bflat_t: calls,
            u_sel: 2 * calls,
            u_sel_t: 2 * calls,
            u_prep: calls,
            block_encoding_calls: calls,
            warm_start_copies: 1.0 / overlap_sq,
            max_evolution_time: t_max,
        }
    }

    pub fn total_queries(&self) -> usize {
        self.u_bsharp + self.u_bflat_t + self.u_sel + self.u_sel_t + self.u_prep
    }
}

/// Subnormalization `2√(JC)·b` of the composite block encoding, with
/// `b = max(1, max_j ‖B♯_j‖, ‖B♭_j‖)` the common factor scale.
pub fn subnormalization(pairs: &[FactorPair], grid: &QuadratureGrid) -> f64 {
    let b = factor_scale(pairs);
    2.0 * (pairs.len() as f64 * grid.mass()).sqrt() * b
}

pub fn factor_scale(pairs: &[FactorPair]) -> f64 {
    pairs.iter().map(|p| {
        let (s, f) = p.norm_bounds();
        s.max(f)
    }).fold(1.0, f64::max)
}

fn pure_vector(state: &DoubledState) -> Result<&CVec> {
    match state {
        DoubledState::Pure(v) => Ok(v),
        DoubledState::Mixed(_) => Err(Error::Domain("filtering needs a pure warm start".into())),
    }
}

pub fn filter_prepare(b: &RectFactor, warm: &DoubledState, filter: &FilterSpec) -> Result<(DoubledState, QueryLedger)> {
    let v = pure_vector(warm)?;
    if v.len() != b.cols() {
        return Err(Error::DimensionMismatch { expected: b.cols().to_string(), got: v.len().to_string() });
    }
    let psi_g = b.smallest_right_vector();
    let overlap_sq = psi_g.dotc(v).norm_sqr();
    if overlap_sq < 1e-12 {
        return Err(Error::ColdStart { overlap: overlap_sq });
    }
    let (out, ledger) = match filter.method {
        FilterMethod::ExactProjector => {
            let mut acc = CVec::zeros(v.len());
            for (i, &s) in b.singular_values().iter().enumerate() {
                if s <= filter.threshold {
                    let r = b.right_vector(i);
                    acc += &r * r.dotc(v);
                }
            }
            (acc, QueryLedger::for_calls(0, overlap_sq, b.grid().t_max))
        }
        FilterMethod::Polynomial => {
            let poly = filter.polynomial.as_ref().ok_or_else(|| Error::Construction("polynomial filter missing".into()))?;
            let out = poly.apply(&b.gram(), filter.alpha, v);
            (out, QueryLedger::for_calls(poly.degree(), overlap_sq, b.grid().t_max))
        }
    };
    let norm = out.norm();
    if norm < 1e-14 {
        return Err(Error::ColdStart { overlap: norm * norm });
    }
    Ok((DoubledState::Pure(out / c(norm)), ledger))
}

/// `|⟨⟨σ^{1/2}|ψ⟩|²`.
pub fn fidelity(state: &DoubledState, g: &GibbsState) -> f64 {
    let target = vec(g.sqrt_sigma());
    state.overlap_with(&(target.clone() / c(target.norm())))
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub eps: f64,
    pub delta: f64,
    pub infidelity: f64,
    pub bound: f64,
    pub passes: bool,
}

/// `1 - |⟨⟨σ^{1/2}|ψ_g⟩|² ≤ (2ε/Δ)²` with `ε` measured and `Δ = gap(Ĥ)`.
pub fn fidelity_bound_check(b: &RectFactor, hhat: &Superoperator, g: &GibbsState) -> Result<FidelityReport> {
    let eps = measure_error(b, hhat)?;
    let delta = spectral_gap(hhat)?;
    if eps > delta / 2.0 {
        return Err(Error::Domain(format!("quadrature error {eps:.3e} exceeds half the gap {delta:.3e}")));
    }
    let infidelity = 1.0 - fidelity(&DoubledState::Pure(b.smallest_right_vector()), g);
    let bound = (2.0 * eps / delta).powi(2);
    Ok(FidelityReport { eps, delta, infidelity, bound, passes: infidelity <= bound + 1e-14 })
}

/// Everything needed to filter at one `(spec, β)`.
#[derive(Debug, Clone)]
pub struct Preparation {
    pub pairs: Vec<FactorPair>,
    pub hhat: Superoperator,
    pub b: RectFactor,
    pub delta: f64,
    pub eps_quad: f64,
    pub alpha: f64,
}

/// Factors, parent Hamiltonian and `𝔹` on the Lemma B.1 grid for
/// `η = eps·Δ/2`; `scale` fixes the factor normalization in `α`.
pub fn prepare_operator(spec: &KossakowskiSpec, h: &SpectralHamiltonian, g: &GibbsState, eps: f64, scale: Option<f64>) -> Result<Preparation> {
    let pairs = build_factors(spec, g)?;
    let hhat = parent_hamiltonian(&assemble_generator(spec)?, g)?;
    let delta = spectral_gap(&hhat)?;
    if delta <= 0.0 {
        return Err(Error::DegenerateInput("parent Hamiltonian has no gap".into()));
    }
    let grid = select_grid(spec.beta(), h.norm(), pairs.len(), (eps * delta / 2.0).min(0.5))?;
    let b = assemble_b(&pairs, &grid)?;
    let eps_quad = measure_error(&b, &hhat)?;
    let unit = scale.unwrap_or_else(|| factor_scale(&pairs));
    let alpha = 2.0 * (pairs.len() as f64 * grid.mass()).sqrt() * unit;
    Ok(Preparation { pairs, hhat, b, delta, eps_quad, alpha })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub parameter: f64,
    pub delta: f64,
    pub j: usize,
    pub eps: f64,
    pub alpha: f64,
    pub degree: usize,
    pub queries: usize,
    pub warm_start_copies: f64,
    pub max_evolution_time: f64,
    pub fidelity: f64,
}

/// Filter degree needed for residual `eps` on each `(parameter, spec, G)`
/// case, from the maximally entangled warm start. All cases share the largest
/// subnormalization so that degrees are comparable.
pub fn degree_sweep(cases: &[(f64, KossakowskiSpec, GibbsState)], h: &SpectralHamiltonian, eps: f64) -> Result<Vec<ScalingRow>> {
    let preps = cases.iter().map(|(_, spec, g)| prepare_operator(spec, h, g, eps, None)).collect::<Result<Vec<_>>>()?;
    let alpha = preps.iter().map(|p| p.alpha).fold(0.0, f64::max);
    cases
        .iter()
        .zip(&preps)
        .map(|((param, _, g), prep)| {
            let warm = DoubledState::maximally_entangled(g.dim());
            let filter = FilterSpec::design(FilterMethod::Polynomial, prep.eps_quad, prep.delta, alpha, eps)?;
            let (out, ledger) = filter_prepare(&prep.b, &warm, &filter)?;
            Ok(ScalingRow {
                parameter: *param,
                delta: prep.delta,
                j: prep.pairs.len(),
                eps,
                alpha,
                degree: filter.degree(),
                queries: ledger.total_queries(),
                warm_start_copies: ledger.warm_start_copies,
                max_evolution_time: ledger.max_evolution_time,
                fidelity: fidelity(&out, g),
            })
        })
        .collect()
}

/// Δ-sweep through β.
pub fn beta_sweep<F>(h: &SpectralHamiltonian, builder: F, betas: &[f64], eps: f64) -> Result<Vec<ScalingRow>>
where
    F: Fn(f64) -> Result<KossakowskiSpec>,
{
    let cases = betas
        .iter()
        .map(|&b| Ok((b, builder(b)?, crate::spectral::gibbs::gibbs_state(h, b)?)))
        .collect::<Result<Vec<_>>>()?;
    degree_sweep(&cases, h, eps)
}

/// Δ-sweep at fixed β by scaling every channel by `s` (so `Δ ∝ s²`); `split`
/// replaces each channel by that many copies of weight `1/√split`.
pub fn scaling_study(
    spec: &KossakowskiSpec,
    h: &SpectralHamiltonian,
    g: &GibbsState,
    scales: &[f64],
    eps: f64,
    split: usize,
) -> Result<Vec<ScalingRow>> {
    let base = spec.split(split.max(1));
    let cases: Vec<_> = scales.iter().map(|&s| (s, base.scaled(s), g.clone())).collect();
    degree_sweep(&cases, h, eps)
}
