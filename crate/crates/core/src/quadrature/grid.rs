use serde::Serialize;

use crate::error::{Error, Result};

/// `g(t) = 1 / (β cosh(2πt/β))`, with `∫ g = 1/2`.
pub fn cosh_kernel(t: f64, beta: f64) -> f64 {
    1.0 / (beta * (2.0 * std::f64::consts::PI * t / beta).cosh())
}

/// Left-closed uniform grid `t_k = -T + kh`, `k < N`, `h = 2T/N`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    pub beta: f64,
    pub t_max: f64,
    pub n: usize,
    pub h: f64,
}

impl QuadratureGrid {
    pub fn uniform(beta: f64, t_max: f64, n: usize) -> Result<Self> {
        if n == 0 || t_max < 0.0 || !t_max.is_finite() {
            return Err(Error::Domain(format!("invalid grid T={t_max}, N={n}")));
        }
        Ok(Self { beta, t_max, n, h: 2.0 * t_max / n as f64 })
    }

    /// Single node at `t = 0` carrying the full mass `1/2`; the `β → 0` limit
    /// of the cosh kernel and the delta weight `½δ₀`.
    pub fn delta(beta: f64) -> Self {
        Self { beta, t_max: 0.0, n: 1, h: 0.0 }
    }

    pub fn is_degenerate(&self) -> bool {
        self.t_max == 0.0
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| -self.t_max + k as f64 * self.h).collect()
    }

    /// `g(t_k) h`; the degenerate grid at `β = 0` carries weight `1/2`.
    pub fn weights(&self) -> Vec<f64> {
        if self.is_degenerate() {
            return vec![if self.beta == 0.0 { 0.5 } else { 0.0 }; self.n];
        }
        self.points().iter().map(|&t| cosh_kernel(t, self.beta) * self.h).collect()
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        self.points().into_iter().zip(self.weights()).collect()
    }

    pub fn mass(&self) -> f64 {
        self.weights().iter().sum()
    }
}

/// Lemma B.1 parameters: `T = (β/2π) log(32/(πε'))`,
/// `1/h = max(4 log(17/ε')/(πβ), 2π/β, 4‖H‖/π)`, `ε' = ε/J`, `N = ⌈2T/h⌉`.
pub fn select_grid(beta: f64, norm_h: f64, j: usize, eps: f64) -> Result<QuadratureGrid> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("quadrature precision must lie in (0, 1), got {eps}")));
    }
    if !(beta >= 0.0) || !beta.is_finite() || j == 0 {
        return Err(Error::Domain(format!("invalid beta {beta} or channel count {j}")));
    }
    if beta == 0.0 {
        return Ok(QuadratureGrid::delta(0.0));
    }
    let e = eps / j as f64;
    let pi = std::f64::consts::PI;
    let t_max = beta / (2.0 * pi) * (32.0 / (pi * e)).ln();
    let inv_h = (4.0 * (17.0 / e).ln() / (pi * beta)).max(2.0 * pi / beta).max(4.0 * norm_h / pi);
    let n = ((2.0 * t_max * inv_h).ceil() as usize).max(1);
    QuadratureGrid::uniform(beta, t_max, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_mass_is_one_half() {
        let g = select_grid(2.0, 1.0, 1, 1e-8).unwrap();
        assert!((g.mass() - 0.5).abs() < 1e-7);
        let fine = QuadratureGrid::uniform(1.0, 8.0, 4000).unwrap();
        assert!((fine.mass() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn pinned_parameters() {
        // β=1, ‖H‖=1, J=1, ε=0.5 by direct evaluation
        let g = select_grid(1.0, 1.0, 1, 0.5).unwrap();
        let pi = std::f64::consts::PI;
        let t = (64.0 / pi).ln() / (2.0 * pi);
        assert!((g.t_max - t).abs() < 1e-15);
        assert!((g.t_max - 0.479_717_380_620_001_7).abs() < 1e-12);
        // 1/h = max(4 ln 34 / π, 2π, 4/π) = 2π
        assert_eq!(g.n, (2.0 * t * 2.0 * pi).ceil() as usize);
        assert_eq!(g.n, 7);
        assert!(g.h <= (1.0 / (2.0 * pi)).min(pi / 4.0) + 1e-15);
    }

    #[test]
    fn halving_eps_adds_log_two() {
        let a = select_grid(1.7, 1.0, 1, 0.2).unwrap();
        let b = select_grid(1.7, 1.0, 1, 0.1).unwrap();
        assert!((b.t_max - a.t_max - 1.7 / (2.0 * std::f64::consts::PI) * 2f64.ln()).abs() < 1e-14);
        let c2 = select_grid(1.7, 1.0, 2, 0.2).unwrap();
        assert!((c2.t_max - b.t_max).abs() < 1e-14);
    }

    #[test]
    fn n_linear_in_norm() {
        let a = select_grid(1.0, 100.0, 1, 0.1).unwrap();
        let b = select_grid(1.0, 200.0, 1, 0.1).unwrap();
        let ratio = b.n as f64 / a.n as f64;
        assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(select_grid(1.0, 1.0, 1, 1.0).is_err());
        assert!(select_grid(1.0, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn left_closed_points() {
        let g = QuadratureGrid::uniform(1.0, 1.0, 4).unwrap();
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5]);
        assert_eq!(QuadratureGrid::delta(0.0).weights(), vec![0.5]);
    }
}
