use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, hermiticity_residual, op_norm, Mat, C64};
use crate::spectral::bohr::{bohr_decompose, BohrDecomposition};
use crate::spectral::hamiltonian::SpectralHamiltonian;

/// DLL weighting function `q(ν; β)`.
#[derive(Clone)]
pub enum Weighting {
    /// `q ≡ 1`.
    Unit,
    /// `q(ν) = exp(-(βν)² / scale)`; the default uses `scale = 32`.
    Gaussian { scale: f64 },
    /// `q(ν) = exp(-sqrt(offset + (βν)²) / width)`.
    SoftMetropolis { offset: f64, width: f64 },
    Custom(Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>),
}

impl Weighting {
    pub fn gaussian() -> Self {
        Weighting::Gaussian { scale: 32.0 }
    }

    /// The soft-Metropolis parameters used for the figure reproductions.
    pub fn figure() -> Self {
        Weighting::SoftMetropolis { offset: 2.0, width: 1.5 }
    }

    pub fn eval(&self, nu: f64, beta: f64) -> C64 {
        match self {
            Weighting::Unit => c(1.0),
            Weighting::Gaussian { scale } => c((-(beta * nu).powi(2) / scale).exp()),
            Weighting::SoftMetropolis { offset, width } => c((-(offset + (beta * nu).powi(2)).sqrt() / width).exp()),
            Weighting::Custom(f) => f(nu, beta),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Weighting::Unit => "unit".into(),
            Weighting::Gaussian { scale } => format!("gaussian(scale={scale})"),
            Weighting::SoftMetropolis { offset, width } => format!("soft-metropolis(offset={offset},width={width})"),
            Weighting::Custom(_) => "custom".into(),
        }
    }
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting::gaussian()
    }
}

impl fmt::Debug for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// CKG parameters and the trapezoid grid over `ω`.
#[derive(Debug, Clone)]
pub struct CkgParams {
    pub sigma_e: f64,
    pub sigma_gamma: f64,
    pub omega_gamma: f64,
    pub points: usize,
    /// Half-width of the grid in units of `σ_γ`.
    pub span: f64,
}

impl CkgParams {
    /// `σ_E = σ_γ = ω_γ = 1/β`, 41 points over `±6σ_γ` around `-ω_γ`.
    pub fn for_beta(beta: f64) -> Self {
        Self { sigma_e: 1.0 / beta, sigma_gamma: 1.0 / beta, omega_gamma: 1.0 / beta, points: 41, span: 6.0 }
    }

    /// `γ(ω) = exp(-(ω + ω_γ)² / 2σ_γ²)`.
    pub fn gamma(&self, omega: f64) -> f64 {
        (-(omega + self.omega_gamma).powi(2) / (2.0 * self.sigma_gamma.powi(2))).exp()
    }

    /// `β_ν^ω = (2σ_E√(2π))^{-1/2} exp(-(ω-ν)² / 4σ_E²)`.
    pub fn filter(&self, nu: f64, omega: f64) -> f64 {
        (2.0 * self.sigma_e * (2.0 * std::f64::consts::PI).sqrt()).powf(-0.5) * (-(omega - nu).powi(2) / (4.0 * self.sigma_e.powi(2))).exp()
    }

    /// Grid nodes and trapezoid weights.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let lo = -self.omega_gamma - self.span * self.sigma_gamma;
        let hi = -self.omega_gamma + self.span * self.sigma_gamma;
        if self.points < 2 {
            return vec![(-self.omega_gamma, hi - lo)];
        }
        let step = (hi - lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let w = if k == 0 || k + 1 == self.points { 0.5 * step } else { step };
                (lo + k as f64 * step, w)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    Davies,
    Dll(Weighting),
    Ckg(CkgParams),
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Davies => "davies",
            Family::Dll(_) => "dll",
            Family::Ckg(_) => "ckg",
            Family::Custom => "custom",
        }
    }
}

/// One coupling operator with its Kossakowski block `C = QQ^†` indexed by the
/// coupling's Bohr frequencies.
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: String,
    pub bohr: BohrDecomposition,
    pub c: Mat,
    pub q: Mat,
}

impl Channel {
    pub fn rank(&self) -> usize {
        self.q.ncols()
    }
}

/// Kossakowski data for all couplings, validated on construction.
#[derive(Debug, Clone)]
pub struct KossakowskiSpec {
    beta: f64,
    family: Family,
    channels: Vec<Channel>,
}

/// Tolerance on the scaled KMS residual for families that satisfy it exactly.
pub const KMS_TOL: f64 = 1e-9;
/// Tolerance for the `ω`-quadrature of CKG.
pub const CKG_KMS_TOL: f64 = 1e-6;

impl KossakowskiSpec {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Total number of first-order factors `J`.
    pub fn rank(&self) -> usize {
        self.channels.iter().map(Channel::rank).sum()
    }

    pub fn dim(&self) -> usize {
        self.channels[0].bohr.operator().nrows()
    }

    /// Largest scaled KMS residual over all couplings together with the
    /// offending pair. With `α̃_{νν'} = α_{νν'} e^{β(ν+ν')/4}` the condition
    /// reads `α̃_{-ν',-ν} = α̃_{νν'}`; residuals are relative to `max |α̃|`.
    pub fn kms_residual(&self) -> (f64, f64, f64) {
        let mut worst = (0.0, 0.0, 0.0);
        for ch in &self.channels {
            let r = kms_residual(&ch.bohr, &ch.c, self.beta);
            if r.0 > worst.0 {
                worst = r;
            }
        }
        worst
    }

    /// All rates scaled by `s²` (`Q` by `s`).
    pub fn scaled(&self, s: f64) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|ch| Channel { c: &ch.c * c(s * s), q: &ch.q * c(s), ..ch.clone() })
            .collect();
        Self { channels, ..self.clone() }
    }

    /// Each channel replaced by `k` copies with `Q/√k`; the generator is
    /// unchanged while `J` grows by `k`.
    pub fn split(&self, k: usize) -> Self {
        let w = 1.0 / (k.max(1) as f64).sqrt();
        let channels = self
            .channels
            .iter()
            .flat_map(|ch| {
                (0..k.max(1)).map(move |i| Channel {
                    label: format!("{}#{i}", ch.label),
                    c: &ch.c * c(w * w),
                    q: &ch.q * c(w),
                    bohr: ch.bohr.clone(),
                })
            })
            .collect();
        Self { channels, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::DegenerateInput("no coupling operators".into()));
        }
        for ch in &self.channels {
            let scale = op_norm(&ch.c).max(f64::MIN_POSITIVE);
            if hermiticity_residual(&ch.c) > 1e-10 * scale {
                return Err(Error::Domain(format!("Kossakowski block of {} is not Hermitian", ch.label)));
            }
            let min = eigh(&ch.c).0[0];
            if min < -1e-10 * scale {
                return Err(Error::NotPositive { min_eigenvalue: min });
            }
            let fact = op_norm(&(&ch.c - &ch.q * ch.q.adjoint()));
            if fact > 1e-10 * scale {
                return Err(Error::Accuracy { what: format!("C = QQ^† for {}", ch.label), residual: fact });
            }
        }
        let (res, nu, nu_p) = self.kms_residual();
        let tol = if matches!(self.family, Family::Ckg(_)) { CKG_KMS_TOL } else { KMS_TOL };
        if res > tol {
            if matches!(self.family, Family::Ckg(_)) {
                return Err(Error::Quadrature { residual: res, tolerance: tol });
            }
            return Err(Error::KmsSymmetry { nu, nu_prime: nu_p, residual: res });
        }
        Ok(())
    }
}

fn kms_residual(bohr: &BohrDecomposition, c_mat: &Mat, beta: f64) -> (f64, f64, f64) {
    let freqs = bohr.frequencies();
    let scaled = |a: usize, b: usize| c_mat[(a, b)] * (beta * (freqs[a] + freqs[b]) / 4.0).exp();
    let mut scale = 0.0f64;
    for a in 0..freqs.len() {
        for b in 0..freqs.len() {
            scale = scale.max(scaled(a, b).norm());
        }
    }
    if scale == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let mut worst = (0.0, 0.0, 0.0);
    for a in 0..freqs.len() {
        for b in 0..freqs.len() {
            let lhs = match (bohr.index_of(-freqs[b]), bohr.index_of(-freqs[a])) {
                (Some(mb), Some(ma)) => scaled(mb, ma),
                _ => c(0.0),
            };
            let r = (lhs - scaled(a, b)).norm() / scale;
            if r > worst.0 {
                worst = (r, freqs[a], freqs[b]);
            }
        }
    }
    worst
}

fn decompose_all(h: &SpectralHamiltonian, couplings: &[(String, Mat)]) -> Result<Vec<(String, BohrDecomposition)>> {
    if couplings.is_empty() {
        return Err(Error::DegenerateInput("no coupling operators".into()));
    }
    couplings.iter().map(|(l, a)| Ok((l.clone(), bohr_decompose(h, a)?))).collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("inverse temperature must be finite and non-negative, got {beta}")));
    }
    Ok(())
}

/// Davies rate `γ(ν) = min(1, e^{-βν})`.
pub fn davies_rate(nu: f64, beta: f64) -> f64 {
    (-beta * nu).exp().min(1.0)
}

/// Davies sampler: diagonal `C` with `α_{νν} = γ(ν)` and `Q = diag(√γ)`.
pub fn make_davies(h: &SpectralHamiltonian, couplings: &[(String, Mat)], beta: f64) -> Result<KossakowskiSpec> {
    check_beta(beta)?;
    let channels = decompose_all(h, couplings)?
        .into_iter()
        .map(|(label, bohr)| {
            let m = bohr.len();
            let c_mat = Mat::from_fn(m, m, |a, b| if a == b { c(davies_rate(bohr.frequencies()[a], beta)) } else { c(0.0) });
            let q = Mat::from_fn(m, m, |a, b| if a == b { c(davies_rate(bohr.frequencies()[a], beta).sqrt()) } else { c(0.0) });
            Channel { label, bohr, c: c_mat, q }
        })
        .collect();
    let spec = KossakowskiSpec { beta, family: Family::Davies, channels };
    spec.validate()?;
    Ok(spec)
}

/// DLL sampler: rank-one `C = vv^†` per coupling with `v_ν = q(ν) e^{-βν/4}`.
pub fn make_dll(h: &SpectralHamiltonian, couplings: &[(String, Mat)], beta: f64, q: Weighting) -> Result<KossakowskiSpec> {
    check_beta(beta)?;
    let mut channels = Vec::new();
    for (label, bohr) in decompose_all(h, couplings)? {
        for &nu in bohr.frequencies() {
            if bohr.index_of(-nu).is_none() {
                continue;
            }
            let diff = (q.eval(-nu, beta) - q.eval(nu, beta).conj()).norm();
            if diff > 1e-12 * q.eval(nu, beta).norm().max(1.0) {
                return Err(Error::WeightSymmetry { nu, residual: diff });
            }
        }
        let v = Mat::from_fn(bohr.len(), 1, |a, _| {
            let nu = bohr.frequencies()[a];
            q.eval(nu, beta) * (-beta * nu / 4.0).exp()
        });
        let c_mat = &v * v.adjoint();
        channels.push(Channel { label, bohr, c: c_mat, q: v });
    }
    let spec = KossakowskiSpec { beta, family: Family::Dll(q), channels };
    spec.validate()?;
    Ok(spec)
}

/// CKG sampler with `α_{νν'} ≈ Σ_k w_k γ(ω_k) β_ν^{ω_k} β_{ν'}^{ω_k}`; one
/// channel column per grid point.
pub fn make_ckg(h: &SpectralHamiltonian, couplings: &[(String, Mat)], beta: f64, params: CkgParams) -> Result<KossakowskiSpec> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("CKG needs beta > 0, got {beta}")));
    }
    let grid = params.grid();
    let channels = decompose_all(h, couplings)?
        .into_iter()
        .map(|(label, bohr)| {
            let q = Mat::from_fn(bohr.len(), grid.len(), |a, k| {
                let (omega, w) = grid[k];
                c((w * params.gamma(omega)).sqrt() * params.filter(bohr.frequencies()[a], omega))
            });
            Channel { label, c: &q * q.adjoint(), q, bohr }
        })
        .collect();
    let spec = KossakowskiSpec { beta, family: Family::Ckg(params), channels };
    spec.validate()?;
    Ok(spec)
}

/// Caller-supplied Kossakowski blocks, one per coupling, each indexed by that
/// coupling's Bohr frequencies in ascending order. `Q` comes from a clipped
/// eigendecomposition.
pub fn make_custom(h: &SpectralHamiltonian, couplings: &[(String, Mat)], blocks: &[Mat], beta: f64) -> Result<KossakowskiSpec> {
    check_beta(beta)?;
    let decomposed = decompose_all(h, couplings)?;
    if blocks.len() != decomposed.len() {
        return Err(Error::DimensionMismatch { expected: format!("{} blocks", decomposed.len()), got: blocks.len().to_string() });
    }
    let mut channels = Vec::new();
    for ((label, bohr), block) in decomposed.into_iter().zip(blocks) {
        if block.nrows() != bohr.len() || block.ncols() != bohr.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} for {label}", bohr.len()),
                got: format!("{}x{}", block.nrows(), block.ncols()),
            });
        }
        let q = factor_psd(block)?;
        channels.push(Channel { label, bohr, c: block.clone(), q });
    }
    let spec = KossakowskiSpec { beta, family: Family::Custom, channels };
    spec.validate()?;
    Ok(spec)
}

/// `Q` with `C = QQ^†` from the eigendecomposition of `C`: eigenvalues above
/// `-1e-12 ‖C‖` are clipped to zero and columns below `1e-10 ‖C‖` dropped.
pub fn factor_psd(c_mat: &Mat) -> Result<Mat> {
    let (vals, vecs) = eigh(c_mat);
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::DegenerateInput("Kossakowski block is zero".into()));
    }
    if vals[0] < -1e-10 * scale {
        return Err(Error::NotPositive { min_eigenvalue: vals[0] });
    }
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-10 * scale).collect();
    Ok(Mat::from_fn(c_mat.nrows(), keep.len(), |i, j| vecs[(i, keep[j])] * vals[keep[j]].max(0.0).sqrt()))
}
