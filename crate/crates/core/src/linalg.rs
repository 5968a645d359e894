//! Dense complex linear algebra helpers shared by every module.
//!
//! Vectorization is column-major throughout: a `d x d` matrix `X` maps to the
//! length `d^2` vector whose entry `j*d + i` is `X[(i, j)]`. Under this
//! convention `vec(A X B) = (B^T ⊗ A) vec(X)`, left multiplication acts on the
//! second tensor factor and right multiplication on the first.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Column-major vectorization `|X>>`.
pub fn vec(x: &Mat) -> CVec {
    CVec::from_column_slice(x.as_slice())
}

/// Inverse of [`vec`] for a square `d x d` matrix.
pub fn unvec(v: &CVec, d: usize) -> Mat {
    assert_eq!(v.len(), d * d, "unvec: length {} is not {}^2", v.len(), d);
    Mat::from_column_slice(d, d, v.as_slice())
}

/// Superoperator matrix of `X -> A X B`.
pub fn sandwich(a: &Mat, b: &Mat) -> Mat {
    kron(&b.transpose(), a)
}

/// Superoperator matrix of `X -> A X`.
pub fn left(a: &Mat) -> Mat {
    kron(&identity(a.nrows()), a)
}

/// Superoperator matrix of `X -> X B`.
pub fn right(b: &Mat) -> Mat {
    kron(&b.transpose(), &identity(b.nrows()))
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn trace(m: &Mat) -> C64 {
    m.trace()
}

/// Hilbert-Schmidt inner product `Tr(A^† B)`.
pub fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral (operator 2-) norm via a dense SVD.
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values_desc(m: &Mat) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn hermiticity_residual(m: &Mat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

pub fn hermitize(m: &Mat) -> Mat {
    (m + m.adjoint()) * c(0.5)
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending, eigenvectors
/// as matching columns.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = Mat::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn eigvalsh(m: &Mat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_fn(m: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (vals, vecs) = eigh(m);
    from_eigen(&vals.iter().map(|&x| c(f(x))).collect::<Vec<_>>(), &vecs)
}

/// `V diag(w) V^†`.
pub fn from_eigen(weights: &[C64], vecs: &Mat) -> Mat {
    let mut scaled = vecs.clone();
    for (k, w) in weights.iter().enumerate() {
        for z in scaled.column_mut(k).iter_mut() {
            *z *= *w;
        }
    }
    scaled * vecs.adjoint()
}

/// Complex Schur decomposition `A = Q T Q^†` with `T` upper triangular.
/// Structured inputs on which the shifted QR iteration stalls are retried
/// after a seeded random unitary similarity.
fn schur(m: &Mat) -> Result<(Mat, Mat)> {
    let dim = m.nrows();
    let attempt = |a: Mat| Schur::try_new(a, 1e-14, 200 * dim.max(10)).map(Schur::unpack);
    if let Some(qt) = attempt(m.clone()) {
        return Ok(qt);
    }
    for seed in 0..3u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5c4u64 + seed);
        let u = random_unitary(dim, &mut rng);
        if let Some((q, t)) = attempt(u.adjoint() * m * &u) {
            return Ok((u * q, t));
        }
    }
    Err(Error::Accuracy { what: "complex Schur decomposition did not converge".into(), residual: f64::NAN })
}

/// Eigenvalues of a general (non-Hermitian) complex matrix.
pub fn eigvals(m: &Mat) -> Result<Vec<C64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Eigenvalues and right eigenvectors (unit columns) of a general complex
/// matrix, by back-substitution on the Schur form.
pub fn eig(m: &Mat) -> Result<(Vec<C64>, Mat)> {
    let (q, t) = schur(m)?;
    let n = t.nrows();
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    let mut y = Mat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for l in (i + 1)..=k {
                acc += t[(i, l)] * y[(l, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < 1e-14 * scale {
                denom = C64::new(1e-14 * scale, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
    }
    let mut v = q * y;
    for k in 0..n {
        let nrm = v.column(k).norm();
        if nrm > 0.0 {
            let col = v.column(k) / c(nrm);
            v.set_column(k, &col);
        }
    }
    Ok(((0..n).map(|k| t[(k, k)]).collect(), v))
}

/// 2-norm condition number.
pub fn condition_number(m: &Mat) -> f64 {
    let s = singular_values_desc(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Inverse of a square complex matrix.
pub fn inverse(m: &Mat) -> Result<Mat> {
    m.clone().try_inverse().ok_or_else(|| Error::DegenerateInput("singular matrix".into()))
}

pub fn random_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    Mat::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    hermitize(&random_matrix(d, rng))
}

/// Haar-ish random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    let qr = random_matrix(d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for k in 0..d {
        let phase = r[(k, k)] / c(r[(k, k)].norm().max(f64::MIN_POSITIVE));
        let col = u.column(k) * phase;
        u.set_column(k, &col);
    }
    u
}

pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / c(n)
}

/// Embed an operator acting on the qubits `targets` (most significant first,
/// in the operator's own ordering) into a register of `total` qubits, where
/// qubit 0 is the most significant.
pub fn embed(op: &Mat, targets: &[usize], total: usize) -> Mat {
    let k = targets.len();
    assert_eq!(op.nrows(), 1 << k, "embed: operator size does not match target count");
    let dim = 1usize << total;
    let bit = |q: usize| total - 1 - q;
    let mut out = Mat::zeros(dim, dim);
    let target_mask: usize = targets.iter().map(|&q| 1usize << bit(q)).sum();
    for col in 0..dim {
        let rest = col & !target_mask;
        let mut sub_col = 0usize;
        for (pos, &q) in targets.iter().enumerate() {
            if col >> bit(q) & 1 == 1 {
                sub_col |= 1 << (k - 1 - pos);
            }
        }
        for sub_row in 0..(1usize << k) {
            let amp = op[(sub_row, sub_col)];
            if amp == ZERO {
                continue;
            }
            let mut row = rest;
            for (pos, &q) in targets.iter().enumerate() {
                if sub_row >> (k - 1 - pos) & 1 == 1 {
                    row |= 1 << bit(q);
                }
            }
            out[(row, col)] += amp;
        }
    }
    out
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn column_major_sandwich_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4] {
            for _ in 0..20 {
                let (a, x, b) = (random_matrix(d, &mut rng), random_matrix(d, &mut rng), random_matrix(d, &mut rng));
                let lhs = vec(&(&a * &x * &b));
                let rhs = sandwich(&a, &b) * vec(&x);
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn vec_inner_product_is_hilbert_schmidt() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let (x, y) = (random_matrix(4, &mut rng), random_matrix(4, &mut rng));
            let lhs = vec(&x).dotc(&vec(&y));
            let rhs = (x.adjoint() * &y).trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn vec_layout_matches_convention() {
        // X = |0><1| maps to |1>|0>, i.e. index 1*2 + 0.
        let mut x = Mat::zeros(2, 2);
        x[(0, 1)] = ONE;
        let v = vec(&x);
        assert_eq!(v[2], ONE);
        assert_eq!(unvec(&v, 2), x);
    }

    #[test]
    fn general_eigenvectors_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_matrix(6, &mut rng);
        let (vals, v) = eig(&m).unwrap();
        for (k, lambda) in vals.iter().enumerate() {
            let col = v.column(k).into_owned();
            assert!((&m * &col - col * *lambda).norm() < 1e-9);
        }
    }

    #[test]
    fn embed_orders_targets() {
        let x = Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let z = Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let xz = kron(&x, &z);
        assert_eq!(embed(&xz, &[0, 1], 2), xz);
        assert_eq!(embed(&xz, &[1, 0], 2), kron(&z, &x));
        assert_eq!(embed(&x, &[1], 3), kron(&kron(&identity(2), &x), &identity(2)));
    }
}
