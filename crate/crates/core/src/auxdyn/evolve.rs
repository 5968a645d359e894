use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, condition_number, eig, eigvalsh, hermitize, inverse, unvec, vec, Mat, C64};

use super::generator::AuxGenerator;

/// Largest vectorized generator size handled by eigendecomposition.
pub const EIGEN_MAX_DIM: usize = 1024;
/// Eigenvector condition number above which the eigen route is abandoned.
pub const MAX_CONDITION: f64 = 1e8;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Eigen,
    RungeKutta,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { method: Method::Auto, rtol: 1e-10, atol: 1e-12, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub times: Vec<f64>,
    pub states: Vec<Mat>,
    pub method: Method,
    pub steps: usize,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub positivity_flag: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub method: Method,
    pub steps: usize,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub positivity_flag: bool,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("times must be finite, non-negative and ascending".into()));
    }
    Ok(())
}

/// `ρ(t)` at each requested time.
pub fn propagate(gen: &AuxGenerator, rho0: &Mat, times: &[f64], opts: EvolveOptions) -> Result<Propagation> {
    check_times(times)?;
    if rho0.nrows() != gen.dim() || rho0.ncols() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: format!("{0}x{0}", gen.dim()), got: format!("{}x{}", rho0.nrows(), rho0.ncols()) });
    }
    let sdim = gen.dim() * gen.dim();
    let want_eigen = match opts.method {
        Method::Eigen => true,
        Method::RungeKutta => false,
        Method::Auto => sdim <= EIGEN_MAX_DIM,
    };
    let eigen = if want_eigen { eigen_route(gen, rho0, times)? } else { None };
    let (states, method, steps) = match eigen {
        Some(states) => (states, Method::Eigen, 0),
        None => {
            let (states, steps) = dormand_prince(gen, rho0, times, opts)?;
            (states, Method::RungeKutta, steps)
        }
    };
    let mut max_trace_drift = 0.0f64;
    let mut min_eigenvalue = f64::INFINITY;
    for s in &states {
        max_trace_drift = max_trace_drift.max((s.trace() - rho0.trace()).norm());
        min_eigenvalue = min_eigenvalue.min(eigvalsh(&hermitize(s))[0]);
    }
    Ok(Propagation {
        times: times.to_vec(),
        states,
        method,
        steps,
        max_trace_drift,
        min_eigenvalue,
        positivity_flag: min_eigenvalue < -POSITIVITY_TOL,
    })
}

/// `None` when the eigenvector matrix is too ill-conditioned.
fn eigen_route(gen: &AuxGenerator, rho0: &Mat, times: &[f64]) -> Result<Option<Vec<Mat>>> {
    let s = gen.superoperator()?;
    let (vals, vecs) = eig(s.matrix())?;
    if condition_number(&vecs) > MAX_CONDITION {
        return Ok(None);
    }
    let coeffs = inverse(&vecs)? * vec(rho0);
    let d = gen.dim();
    Ok(Some(
        times
            .iter()
            .map(|&t| {
                let scaled = coeffs.zip_map(&crate::linalg::CVec::from_vec(vals.clone()), |a, l| a * (l * t).exp());
                unvec(&(&vecs * scaled), d)
            })
            .collect(),
    ))
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dormand_prince(gen: &AuxGenerator, rho0: &Mat, times: &[f64], opts: EvolveOptions) -> Result<(Vec<Mat>, usize)> {
    let mut y = rho0.clone();
    let mut t = 0.0f64;
    let mut k1 = gen.apply(&y);
    let scale0 = gen.jumps.iter().map(|f| f.norm_squared()).sum::<f64>().max(1e-300);
    let mut h = (0.01 / scale0.sqrt()).min(0.1);
    let mut out = Vec::with_capacity(times.len());
    let mut steps = 0usize;
    for &target in times {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Accuracy { what: format!("integrator step budget exhausted at t = {t:.4}"), residual: h });
            }
            let step = h.min(target - t);
            let mut ks: Vec<Mat> = vec![k1.clone()];
            for row in A.iter().take(5) {
                let mut yi = y.clone();
                for (a, k) in row.iter().zip(&ks) {
                    if *a != 0.0 {
                        yi += k * c(step * a);
                    }
                }
                ks.push(gen.apply(&yi));
            }
            let mut y_new = y.clone();
            for (a, k) in A[5].iter().zip(&ks) {
                if *a != 0.0 {
                    y_new += k * c(step * a);
                }
            }
            let k7 = gen.apply(&y_new);
            ks.push(k7.clone());
            let mut err = Mat::zeros(y.nrows(), y.ncols());
            for (e, k) in E.iter().zip(&ks) {
                if *e != 0.0 {
                    err += k * c(step * e);
                }
            }
            let ymax = y.iter().chain(y_new.iter()).fold(0.0f64, |m, z: &C64| m.max(z.norm()));
            let tol = opts.atol + opts.rtol * ymax;
            let en = err.iter().fold(0.0f64, |m, z| m.max(z.norm())) / tol;
            steps += 1;
            if en <= 1.0 {
                t += step;
                y = y_new;
                k1 = k7;
                if step < h {
                    // clipped to hit an output time; keep the proposed step
                    continue;
                }
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
            if h < 1e-14 * target.max(1.0) {
                return Err(Error::Accuracy { what: format!("integrator step underflow at t = {t:.4}"), residual: en * tol });
            }
        }
        out.push(y.clone());
    }
    Ok((out, steps))
}

/// Overlap `Tr[ρ(t) |σ^{1/2}⟩⟩⟨⟨σ^{1/2}|]` at each time.
pub fn evolve(gen: &AuxGenerator, rho0: &Mat, times: &[f64], opts: EvolveOptions) -> Result<Trajectory> {
    let p = propagate(gen, rho0, times, opts)?;
    let psi = gen.target();
    let overlaps = p.states.iter().map(|s| (psi.adjoint() * s * psi)[(0, 0)].re).collect();
    Ok(Trajectory {
        times: p.times,
        overlaps,
        method: p.method,
        steps: p.steps,
        max_trace_drift: p.max_trace_drift,
        min_eigenvalue: p.min_eigenvalue,
        positivity_flag: p.positivity_flag,
    })
}
