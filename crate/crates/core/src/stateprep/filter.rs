//! Even polynomial filters on singular values, applied through `𝔹^†𝔹`.
//!
//! A filter of degree `2D` in the singular value `s` is a degree-`D`
//! Chebyshev series in `x = 2 s²/α² - 1`, since `T_{2m}(y) = T_m(2y² - 1)`.

use crate::error::{Error, Result};
use crate::linalg::{c, CVec, Mat};

/// Smoothed rectangle `½[erf(k(y + y_c)) - erf(k(y - y_c))]` on `y ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct StepProfile {
    pub center: f64,
    pub sharpness: f64,
}

impl StepProfile {
    pub fn eval(&self, y: f64) -> f64 {
        0.5 * (libm::erf(self.sharpness * (y + self.center)) - libm::erf(self.sharpness * (y - self.center)))
    }

    /// Center at the midpoint of `(lo, hi)` and sharpness such that the erf
    /// tails at the band edges stay below `tail`.
    pub fn for_bands(lo: f64, hi: f64, tail: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Domain(format!("filter bands must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})")));
        }
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        Ok(Self { center, sharpness: erfc_inv(tail) / half })
    }
}

/// `erfc^{-1}(p)` for `p ∈ (0, 1]` by bisection.
pub fn erfc_inv(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 30.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erfc(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Chebyshev series `Σ_m a_m T_m(x)` in `x = 2y² - 1`.
#[derive(Debug, Clone)]
pub struct EvenFilter {
    pub coeffs: Vec<f64>,
}

impl EvenFilter {
    /// Interpolant of `profile` with `degree` terms in `x` (degree `2·degree`
    /// in `y`).
    pub fn chebyshev(profile: StepProfile, degree: usize) -> Self {
        let m = 4 * degree + 64;
        let pi = std::f64::consts::PI;
        let samples: Vec<(f64, f64)> = (0..m)
            .map(|k| {
                let theta = pi * (k as f64 + 0.5) / m as f64;
                // y = cos(θ/2) covers [0, 1]; x = 2y² - 1 = cos θ
                (theta, profile.eval((theta / 2.0).cos()))
            })
            .collect();
        let coeffs = (0..=degree)
            .map(|j| {
                let s: f64 = samples.iter().map(|(th, f)| f * (j as f64 * th).cos()).sum();
                let a = 2.0 * s / m as f64;
                if j == 0 {
                    a / 2.0
                } else {
                    a
                }
            })
            .collect();
        Self { coeffs }
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree as a polynomial in the singular value.
    pub fn degree(&self) -> usize {
        2 * self.degree_x()
    }

    /// `p(y)` by Clenshaw in `x = 2y² - 1`.
    pub fn eval(&self, y: f64) -> f64 {
        let x = 2.0 * y * y - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs.iter().skip(1).rev() {
            let b0 = a + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// `p(𝔹/α) v` given `gram = 𝔹^†𝔹`, by Clenshaw on `2 gram/α² - I`.
    pub fn apply(&self, gram: &Mat, alpha: f64, v: &CVec) -> CVec {
        let a = |w: &CVec| -> CVec { gram * w * c(2.0 / (alpha * alpha)) - w };
        let mut b1 = CVec::zeros(v.len());
        let mut b2 = CVec::zeros(v.len());
        for &coef in self.coeffs.iter().skip(1).rev() {
            let b0 = v * c(coef) + a(&b1) * c(2.0) - &b2;
            b2 = b1;
            b1 = b0;
        }
        v * c(self.coeffs[0]) + a(&b1) - b2
    }

    /// `max |p(y) - 1|` on `[0, lo]` and `max |p(y)|` on `[hi, 1]`, sampled.
    pub fn band_residual(&self, lo: f64, hi: f64) -> f64 {
        let samples = 512;
        let pass = (0..=samples).map(|i| lo * i as f64 / samples as f64).map(|y| (self.eval(y) - 1.0).abs());
        let stop = (0..=samples).map(|i| hi + (1.0 - hi) * i as f64 / samples as f64).map(|y| self.eval(y).abs());
        pass.chain(stop).fold(0.0, f64::max)
    }
}

/// Smallest filter meeting `band_residual ≤ eps`, searching `degree_x` up to
/// `max_degree_x`.
pub fn design_filter(lo: f64, hi: f64, eps: f64, max_degree_x: usize) -> Result<EvenFilter> {
    let profile = StepProfile::for_bands(lo, hi, eps / 4.0)?;
    let ok = |d: usize| {
        let f = EvenFilter::chebyshev(profile, d);
        (f.band_residual(lo, hi) <= eps).then_some(f)
    };
    // doubling then bisection; the residual is monotone up to sampling noise
    let mut hi_d = 1;
    while ok(hi_d).is_none() {
        hi_d *= 2;
        if hi_d > max_degree_x {
            return Err(Error::Capacity { what: format!("filter degree for bands ({lo:.3e}, {hi:.3e}) at eps {eps:.1e}"), limit: max_degree_x.to_string() });
        }
    }
    let mut lo_d = hi_d / 2;
    while hi_d - lo_d > 1 {
        let mid = (lo_d + hi_d) / 2;
        if ok(mid).is_some() {
            hi_d = mid;
        } else {
            lo_d = mid;
        }
    }
    Ok(ok(hi_d).expect("checked above"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_inverse_round_trip() {
        for p in [1e-12, 1e-6, 0.01, 0.5, 0.9] {
            assert!((libm::erfc(erfc_inv(p)) - p).abs() <= 1e-12 * p.max(1e-3));
        }
    }

    #[test]
    fn profile_is_even_step() {
        let s = StepProfile::for_bands(0.1, 0.3, 1e-8).unwrap();
        assert!((s.eval(0.0) - 1.0).abs() < 1e-8);
        assert!((s.eval(0.1) - 1.0).abs() < 1e-8);
        assert!(s.eval(0.3).abs() < 1e-8);
        assert!((s.eval(-0.17) - s.eval(0.17)).abs() < 1e-15);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let f = EvenFilter { coeffs: vec![0.3, -0.2, 0.7, 0.1] };
        for y in [0.0, 0.2, 0.55, 1.0] {
            let x: f64 = 2.0 * y * y - 1.0;
            let t = [1.0, x, 2.0 * x * x - 1.0, 4.0 * x * x * x - 3.0 * x];
            let direct: f64 = f.coeffs.iter().zip(t).map(|(a, b)| a * b).sum();
            assert!((f.eval(y) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn matrix_application_matches_scalar() {
        let gram = Mat::from_diagonal(&CVec::from_vec(vec![c(0.0), c(0.09), c(0.49)]));
        let f = EvenFilter::chebyshev(StepProfile::for_bands(0.05, 0.25, 1e-6).unwrap(), 20);
        let v = CVec::from_vec(vec![c(1.0), c(1.0), c(1.0)]);
        let out = f.apply(&gram, 1.0, &v);
        for (i, s) in [0.0f64, 0.3, 0.7].iter().enumerate() {
            assert!((out[i].re - f.eval(*s)).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_scales_inversely_with_band_gap() {
        let a = design_filter(0.0, 0.2, 1e-6, 1 << 14).unwrap();
        let b = design_filter(0.0, 0.1, 1e-6, 1 << 14).unwrap();
        let ratio = b.degree() as f64 / a.degree() as f64;
        assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
        let tight = design_filter(0.0, 0.2, 1e-9, 1 << 14).unwrap();
        assert!(tight.degree() > a.degree());
    }
}
