use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::auxdyn::InitialState;
use crate::error::{Error, Result};
use crate::factorization::log_space;
use crate::linalg::Mat;
use crate::lindblad::{make_ckg, make_davies, make_dll, CkgParams, KossakowskiSpec, Weighting};
use crate::spectral::hamiltonian::{build_tfim_capped, SpectralHamiltonian, DEFAULT_MAX_QUBITS};
use crate::spectral::pauli::{pauli_sum, Pauli, PauliString};

use super::experiments::EXPERIMENTS;

/// Config file contents as written; every section and key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: String,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub hamiltonian: RawHamiltonian,
    #[serde(default)]
    pub sampler: RawSampler,
    #[serde(default)]
    pub quadrature: RawQuadrature,
    #[serde(default)]
    pub filter: RawFilter,
    #[serde(default)]
    pub aux: RawAux,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHamiltonian {
    pub model: Option<Model>,
    pub n: Option<usize>,
    pub coupling: Option<f64>,
    pub field: Option<f64>,
    pub max_qubits: Option<usize>,
}

/// `betas` is either a list or `{ lo, hi, count }` (log-spaced).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    List(Vec<f64>),
    Range { lo: f64, hi: f64, count: usize },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSampler {
    pub family: Option<FamilyName>,
    pub couplings: Option<Vec<String>>,
    pub weighting: Option<WeightingName>,
    pub beta: Option<f64>,
    pub betas: Option<BetaSpec>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuadrature {
    pub eps: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub points: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFilter {
    pub eps: Option<f64>,
    pub split: Option<usize>,
    pub scales: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAux {
    pub dressing: Option<bool>,
    pub times: Option<Vec<f64>>,
    pub rho0: Option<InitialStateName>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `-J Σ Z_i Z_{i+1} - h Σ X_i`, open chain.
    Tfim,
    /// `Σ Z_i`.
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Davies,
    Dll,
    Ckg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingName {
    Unit,
    Gaussian,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialStateName {
    Zero,
    MaximallyEntangled,
    MaximallyMixed,
}

impl From<InitialStateName> for InitialState {
    fn from(s: InitialStateName) -> Self {
        match s {
            InitialStateName::Zero => InitialState::Zero,
            InitialStateName::MaximallyEntangled => InitialState::MaximallyEntangled,
            InitialStateName::MaximallyMixed => InitialState::MaximallyMixed,
        }
    }
}

/// Config with every default filled in; this is what the manifest echoes.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub output: PathBuf,
    pub hamiltonian: HamiltonianSection,
    pub sampler: SamplerSection,
    pub quadrature: QuadratureSection,
    pub filter: FilterSection,
    pub aux: AuxSection,
}

#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianSection {
    pub model: Model,
    pub n: usize,
    pub coupling: f64,
    pub field: f64,
    pub max_qubits: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplerSection {
    pub family: FamilyName,
    pub couplings: Vec<String>,
    pub weighting: WeightingName,
    pub betas: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureSection {
    pub eps: Vec<f64>,
    pub t_max: f64,
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterSection {
    pub eps: f64,
    pub split: usize,
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuxSection {
    pub dressing: bool,
    pub times: Vec<f64>,
    pub rho0: InitialStateName,
    pub rtol: f64,
    pub atol: f64,
}

/// Config failure with a 1-based source position when one is known.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, column)
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError { message: message.into(), line: None, column: None }
}

pub fn parse_config(text: &str) -> std::result::Result<RawConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = position(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        ConfigError { message: e.message().trim().to_string(), line, column }
    })
}

fn positive(name: &str, v: f64) -> std::result::Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RawConfig {
    /// Fill defaults and validate values. The experiment name is checked by
    /// the caller so that an unknown name gets its own error.
    pub fn resolve(self) -> std::result::Result<ExperimentConfig, ConfigError> {
        let h = &self.hamiltonian;
        let model = h.model.unwrap_or(Model::Tfim);
        let hamiltonian = HamiltonianSection {
            model,
            n: h.n.unwrap_or(if model == Model::Z { 1 } else { 2 }),
            coupling: h.coupling.unwrap_or(1.0),
            field: h.field.unwrap_or(if model == Model::Z { 1.0 } else { 0.1 }),
            max_qubits: h.max_qubits.unwrap_or(DEFAULT_MAX_QUBITS),
        };
        if hamiltonian.n == 0 {
            return Err(invalid("hamiltonian.n must be at least 1"));
        }
        let s = &self.sampler;
        if s.beta.is_some() && s.betas.is_some() {
            return Err(invalid("give either sampler.beta or sampler.betas, not both"));
        }
        let betas = match (&s.beta, &s.betas) {
            (Some(b), _) => vec![*b],
            (_, Some(BetaSpec::List(v))) => v.clone(),
            (_, Some(BetaSpec::Range { lo, hi, count })) => {
                if *count == 0 || !(*lo > 0.0 && hi >= lo) {
                    return Err(invalid("sampler.betas range needs 0 < lo <= hi and count >= 1"));
                }
                log_space(*lo, *hi, *count)
            }
            (None, None) => vec![0.5, 1.0, 2.0],
        };
        if betas.is_empty() || betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(invalid("sampler betas must be a non-empty list of finite non-negative values"));
        }
        let sampler = SamplerSection {
            family: s.family.unwrap_or(FamilyName::Dll),
            couplings: s.couplings.clone().unwrap_or_else(|| vec!["X".into(), "Z".into()]),
            weighting: s.weighting.unwrap_or(WeightingName::Gaussian),
            betas,
            samples: s.samples.unwrap_or(20),
        };
        if sampler.couplings.is_empty() {
            return Err(invalid("sampler.couplings must not be empty"));
        }
        let q = &self.quadrature;
        let quadrature = QuadratureSection {
            eps: q.eps.clone().unwrap_or_else(|| vec![0.3, 0.1, 0.03, 0.01]),
            t_max: positive("quadrature.t_max", q.t_max.unwrap_or(1.0))?,
            points: q.points.clone().unwrap_or_else(|| vec![2, 4]),
        };
        if quadrature.eps.is_empty() || quadrature.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(invalid("quadrature.eps values must lie in (0, 1)"));
        }
        if quadrature.points.contains(&0) {
            return Err(invalid("quadrature.points must be positive"));
        }
        let f = &self.filter;
        let filter = FilterSection {
            eps: positive("filter.eps", f.eps.unwrap_or(1e-6))?,
            split: f.split.unwrap_or(1).max(1),
            scales: f.scales.clone().unwrap_or_default(),
        };
        for &sc in &filter.scales {
            positive("filter.scales", sc)?;
        }
        let a = &self.aux;
        let aux = AuxSection {
            dressing: a.dressing.unwrap_or(true),
            times: a.times.clone().unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0]),
            rho0: a.rho0.unwrap_or(InitialStateName::Zero),
            rtol: positive("aux.rtol", a.rtol.unwrap_or(1e-8))?,
            atol: positive("aux.atol", a.atol.unwrap_or(1e-10))?,
        };
        if aux.times.iter().any(|t| !t.is_finite() || *t < 0.0) || aux.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("aux.times must be finite, non-negative and ascending"));
        }
        let output = self.output.clone().unwrap_or_else(|| PathBuf::from("out").join(&self.experiment));
        Ok(ExperimentConfig { experiment: self.experiment, seed: self.seed.unwrap_or(0), output, hamiltonian, sampler, quadrature, filter, aux })
    }
}

impl ExperimentConfig {
    pub fn is_registered(&self) -> bool {
        EXPERIMENTS.iter().any(|(name, _)| *name == self.experiment)
    }

    pub fn build_hamiltonian(&self) -> Result<SpectralHamiltonian> {
        let h = &self.hamiltonian;
        match h.model {
            Model::Tfim => build_tfim_capped(h.n, h.coupling, h.field, h.max_qubits),
            Model::Z => {
                let terms: Vec<(f64, PauliString)> = (0..h.n).map(|i| (h.field, PauliString::single(h.n, i, Pauli::Z))).collect();
                SpectralHamiltonian::with_cap(h.n, pauli_sum(h.n, &terms), h.max_qubits)
            }
        }
    }

    /// Coupling operators; a bare letter such as `X` expands to every site.
    pub fn couplings(&self) -> Result<Vec<(String, Mat)>> {
        let n = self.hamiltonian.n;
        let mut out = Vec::new();
        for label in &self.sampler.couplings {
            let bare = match label.as_str() {
                "X" => Some(Pauli::X),
                "Y" => Some(Pauli::Y),
                "Z" => Some(Pauli::Z),
                _ => None,
            };
            match bare {
                Some(p) => out.extend((0..n).map(|s| PauliString::single(n, s, p))),
                None => out.push(PauliString::parse(label, n)?),
            }
        }
        let mut sorted: Vec<(String, Mat)> = Vec::with_capacity(out.len());
        for p in out {
            let label = p.label();
            if sorted.iter().any(|(l, _)| *l == label) {
                return Err(Error::Domain(format!("coupling {label} listed twice")));
            }
            sorted.push((label, p.matrix()));
        }
        Ok(sorted)
    }

    pub fn weighting(&self) -> Weighting {
        match self.sampler.weighting {
            WeightingName::Unit => Weighting::Unit,
            WeightingName::Gaussian => Weighting::gaussian(),
            WeightingName::Figure => Weighting::figure(),
        }
    }

    pub fn build_spec(&self, h: &SpectralHamiltonian, couplings: &[(String, Mat)], beta: f64) -> Result<KossakowskiSpec> {
        match self.sampler.family {
            FamilyName::Davies => make_davies(h, couplings, beta),
            FamilyName::Dll => make_dll(h, couplings, beta, self.weighting()),
            FamilyName::Ckg => make_ckg(h, couplings, beta, CkgParams::for_beta(beta)),
        }
    }
}
