use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eig, hs_inner, kron, vec, Mat, C64};
use crate::spectral::doubled::partial_trace_second;
use crate::spectral::pauli::{Pauli, PauliString};

use super::evolve::{propagate, EvolveOptions};
use super::generator::AuxGenerator;

/// `|P⟩⟩⟨⟨P| / 2ⁿ`, a pure Bell state on the doubled space.
pub fn bell_projector(p: &PauliString) -> Mat {
    let v = vec(&p.matrix());
    &v * v.adjoint() * c(1.0 / (1usize << p.n()) as f64)
}

/// All Pauli strings on `n` sites with support exactly `support` (0-based).
pub fn strings_with_support(n: usize, support: &[usize]) -> Vec<PauliString> {
    let mut out = vec![PauliString::identity(n)];
    for &site in support {
        out = out
            .into_iter()
            .flat_map(|s| {
                Pauli::NONTRIVIAL.into_iter().map(move |p| {
                    let mut letters = s.letters().to_vec();
                    letters[site] = p;
                    PauliString::new(letters)
                })
            })
            .collect();
    }
    out
}

pub fn all_strings(n: usize) -> Vec<PauliString> {
    (0..1usize << n)
        .flat_map(|mask| strings_with_support(n, &(0..n).filter(|s| mask >> s & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

/// Matrix of `ℒ` on span of the Bell projectors of `basis`
/// (column `Q` holds the coordinates of `ℒ(ρ_Q)`) and the worst residual
/// outside the span.
pub fn restriction(gen: &AuxGenerator, basis: &[PauliString]) -> (Mat, f64) {
    let projs: Vec<Mat> = basis.iter().map(bell_projector).collect();
    let m = projs.len();
    let mut r = Mat::zeros(m, m);
    let mut leak = 0.0f64;
    for (q, pq) in projs.iter().enumerate() {
        let img = gen.apply(pq);
        let mut rest = img.clone();
        for (p, pp) in projs.iter().enumerate() {
            let coef = hs_inner(pp, &img);
            r[(p, q)] = coef;
            rest -= pp * coef;
        }
        leak = leak.max(rest.norm());
    }
    (r, leak)
}

/// Rate matrix of the label chain on one occupied site: every label jumps to
/// each of the other two at rate 4.
pub fn label_chain() -> Mat {
    Mat::from_fn(3, 3, |i, j| c(if i == j { -8.0 } else { 4.0 }))
}

/// Kronecker sum `Σ_k I ⊗ … ⊗ K ⊗ … ⊗ I` of `m` copies.
pub fn kronecker_sum(k: &Mat, m: usize) -> Mat {
    let d = k.nrows();
    let total = d.pow(m as u32);
    let mut out = Mat::zeros(total, total);
    for pos in 0..m {
        let left = Mat::identity(d.pow(pos as u32), d.pow(pos as u32));
        let right = Mat::identity(d.pow((m - 1 - pos) as u32), d.pow((m - 1 - pos) as u32));
        out += kron(&kron(&left, k), &right);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub support: Vec<usize>,
    pub dimension: usize,
    pub eigenvalues: Vec<(f64, f64)>,
    pub gap: f64,
    pub stationary_residual: f64,
    pub invariance_residual: f64,
    pub chain_residual: f64,
}

/// Sector `S_T` of the undressed `β = 0` generator: stationary mixture
/// `ω_T`, sector spectrum and comparison with the label chain.
pub fn bell_sector_analysis(gen: &AuxGenerator, support: &[usize]) -> Result<(Mat, SectorReport)> {
    let n = gen.system_dim().trailing_zeros() as usize;
    if support.iter().any(|&s| s >= n) {
        return Err(Error::Domain(format!("support {support:?} outside 0..{n}")));
    }
    let basis = strings_with_support(n, support);
    let (r, leak) = restriction(gen, &basis);
    let omega = basis.iter().map(bell_projector).fold(Mat::zeros(gen.dim(), gen.dim()), |a, p| a + p) * c(1.0 / basis.len() as f64);
    let chain = kronecker_sum(&label_chain(), support.len());
    let chain_residual = (&r - &chain).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut vals = eig(&r)?.0;
    sort_spectrum(&mut vals);
    let gap = -vals.iter().skip(1).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let report = SectorReport {
        support: support.to_vec(),
        dimension: basis.len(),
        eigenvalues: vals.iter().map(|z| (z.re, z.im)).collect(),
        gap: if gap.is_finite() { gap } else { 0.0 },
        stationary_residual: gen.apply(&omega).norm(),
        invariance_residual: leak,
        chain_residual,
    };
    Ok((omega, report))
}

/// Descending real part, then ascending imaginary part.
pub fn sort_spectrum(vals: &mut [C64]) {
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

/// One-site matrix on `(d_X, d_Y, d_Z)`, `d_P = ρ_P - ρ_I`; row `P` holds the
/// coordinates of `ℒ(d_P)`.
pub fn one_site_matrix(gen: &AuxGenerator) -> Result<Mat> {
    if gen.system_dim() != 2 {
        return Err(Error::Domain("one-site matrix needs a single qubit".into()));
    }
    let rho = |p: Pauli| bell_projector(&PauliString::new(vec![p]));
    let labels = Pauli::NONTRIVIAL;
    let mut m = Mat::zeros(3, 3);
    for (i, &p) in labels.iter().enumerate() {
        let img = gen.apply(&(rho(p) - rho(Pauli::I)));
        for (j, &q) in labels.iter().enumerate() {
            m[(i, j)] = hs_inner(&rho(q), &img);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct BellSpectrum {
    pub n: usize,
    pub computed: Vec<(f64, f64)>,
    pub predicted: Vec<(f64, f64)>,
    pub max_deviation: f64,
    pub gap: f64,
    pub kernel_dimension: usize,
    pub invariance_residual: f64,
}

/// Spectrum of the dressed `β = 0` generator on the full Bell sector against
/// the set of sums of one-site values `{0, -4, -10 ± 2√3 i}`.
pub fn dressed_bell_spectrum(n: usize) -> Result<BellSpectrum> {
    let gen = super::generator::pauli_aux(n, true)?;
    let (r, leak) = restriction(&gen, &all_strings(n));
    let mut computed = eig(&r)?.0;
    sort_spectrum(&mut computed);
    let root = 2.0 * 3f64.sqrt();
    let single = [C64::new(0.0, 0.0), C64::new(-4.0, 0.0), C64::new(-10.0, root), C64::new(-10.0, -root)];
    let mut predicted = vec![C64::new(0.0, 0.0)];
    for _ in 0..n {
        predicted = predicted.iter().flat_map(|a| single.iter().map(move |b| a + b)).collect();
    }
    sort_spectrum(&mut predicted);
    let max_deviation = match_spectra(&computed, &predicted);
    let tol = 1e-8;
    let kernel_dimension = computed.iter().filter(|z| z.norm() < tol).count();
    let gap = -computed.iter().filter(|z| z.norm() >= tol).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let pairs = |v: &[C64]| v.iter().map(|z| (z.re, z.im)).collect();
    Ok(BellSpectrum { n, computed: pairs(&computed), predicted: pairs(&predicted), max_deviation, gap, kernel_dimension, invariance_residual: leak })
}

/// Largest distance under a greedy nearest matching of two multisets.
pub fn match_spectra(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}

/// `Tr_2 ρ(t)` for the undressed `β = 0` generator.
pub fn reduced_state_limit(gen: &AuxGenerator, rho0: &Mat, t: f64) -> Result<Mat> {
    let p = propagate(gen, rho0, &[t], EvolveOptions::default())?;
    Ok(partial_trace_second(&p.states[0], gen.system_dim()))
}

/// Fitted decay rate of `⟨P ⊗ I⟩` (first register) along `times`.
pub fn observable_decay_rate(gen: &AuxGenerator, p: &PauliString, rho0: &Mat, times: &[f64]) -> Result<f64> {
    let obs = kron(&p.matrix(), &Mat::identity(gen.system_dim(), gen.system_dim()));
    let prop = propagate(gen, rho0, times, EvolveOptions::default())?;
    let values: Vec<f64> = prop.states.iter().map(|s| (&obs * s).trace().re).collect();
    if values.iter().any(|v| v.abs() < 1e-300) {
        return Err(Error::DegenerateInput("observable expectation vanishes; choose another initial state".into()));
    }
    if values.windows(2).any(|w| w[0].signum() != w[1].signum()) {
        return Err(Error::Accuracy { what: "observable changes sign; not a pure decay".into(), residual: 0.0 });
    }
    let logs: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    Ok(-crate::linalg::linear_fit(times, &logs).0)
}
