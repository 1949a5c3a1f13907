//! Dense linear-algebra kernels shared by the similarity and weighting
//! code: SVD, singular values, effective rank, nuclear norm and small
//! regularized symmetric solves.
//!
//! Matrices here are tiny (checkpoint Gram matrices, K ≤ 8) or thin
//! (stacked feature maps, a few hundred rows by a few dozen columns), so
//! the decompositions are plain Jacobi iterations: a one-sided Jacobi SVD
//! when factors are needed, and a symmetric Jacobi eigensolve of the thin
//! Gram product when only singular values are needed.

use crate::scalar::{s, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumError {
    /// Non-finite entries, inconsistent dimensions or invalid tolerances.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(&'static str),
    /// The solve failed even after ridge escalation.
    #[error("gram matrix is numerically singular even after ridge escalation")]
    SingularGram,
}

/// Row-major dense matrix with all-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, NumError> {
        if rows == 0 || cols == 0 {
            return Err(NumError::InvalidMatrix("zero dimension"));
        }
        if data.len() != rows * cols {
            return Err(NumError::InvalidMatrix("data length != rows * cols"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NumError::InvalidMatrix("non-finite entry"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self, NumError> {
        if rows.is_empty() {
            return Err(NumError::InvalidMatrix("zero dimension"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NumError::InvalidMatrix("ragged rows"));
        }
        let data: Vec<S> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Operator infinity norm: max absolute row sum.
    pub fn infinity_norm(&self) -> S {
        let mut best = S::zero();
        for i in 0..self.rows {
            let mut sum = S::zero();
            for j in 0..self.cols {
                sum += self.at(i, j).abs();
            }
            best = best.max(sum);
        }
        best
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: S) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.at(i, j) - self.at(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Lossless-as-possible cast between scalar types.
    pub fn cast<T: Scalar>(&self) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| s::<T>(crate::scalar::to_f64(*v))).collect(),
        }
    }
}

/// Thin SVD `A = U Σ Vᵀ` with `Σ` sorted descending.
///
/// For an m×n input with m ≥ n: `u` is m×n, `sigma` has n entries and `vt`
/// is n×n. Columns of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd<S> {
    pub u: DenseMatrix<S>,
    pub sigma: Vec<S>,
    pub vt: DenseMatrix<S>,
}

const MAX_JACOBI_SWEEPS: usize = 64;

pub fn svd<S: Scalar>(m: &DenseMatrix<S>) -> Result<Svd<S>, NumError> {
    if m.rows() >= m.cols() {
        Ok(svd_tall(m))
    } else {
        // A = (Aᵀ)ᵀ = (U Σ Vᵀ)ᵀ: swap the factor roles.
        let t = svd_tall(&m.transpose());
        Ok(Svd { u: t.vt.transpose(), sigma: t.sigma, vt: t.u.transpose() })
    }
}

/// One-sided Jacobi SVD for m ≥ n: rotate column pairs until mutually
/// orthogonal, then read singular values off as column norms.
fn svd_tall<S: Scalar>(a: &DenseMatrix<S>) -> Svd<S> {
    let m = a.rows();
    let n = a.cols();
    // Column-major working copies: w = A·V accumulated in place.
    let mut w = vec![S::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            w[j * m + i] = a.at(i, j);
        }
    }
    let mut v = vec![S::zero(); n * n];
    for j in 0..n {
        v[j * n + j] = S::one();
    }

    let eps = S::epsilon();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = 0usize;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (S::zero(), S::zero(), S::zero());
                for i in 0..m {
                    let xp = w[p * m + i];
                    let xq = w[q * m + i];
                    alpha += xp * xp;
                    beta += xq * xq;
                    gamma += xp * xq;
                }
                if alpha == S::zero() || beta == S::zero() {
                    continue;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                let two = s::<S>(2.0);
                let zeta = (beta - alpha) / (two * gamma);
                let sign = if zeta >= S::zero() { S::one() } else { -S::one() };
                let t = sign / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let sn = c * t;
                for i in 0..m {
                    let xp = w[p * m + i];
                    let xq = w[q * m + i];
                    w[p * m + i] = c * xp - sn * xq;
                    w[q * m + i] = sn * xp + c * xq;
                }
                for i in 0..n {
                    let vp = v[p * n + i];
                    let vq = v[q * n + i];
                    v[p * n + i] = c * vp - sn * vq;
                    v[q * n + i] = sn * vp + c * vq;
                }
                rotated += 1;
            }
        }
        if rotated == 0 {
            break;
        }
    }

    let mut norms: Vec<S> = (0..n)
        .map(|j| {
            let mut sum = S::zero();
            for i in 0..m {
                sum += w[j * m + i] * w[j * m + i];
            }
            sum.sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vt = DenseMatrix::zeros(n, n);
    let mut sigma = vec![S::zero(); n];
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > S::zero() {
            for i in 0..m {
                u.set(i, k, w[j * m + i] / norms[j]);
            }
        }
        for i in 0..n {
            vt.set(k, i, v[j * n + i]);
        }
    }
    norms.clear();
    Svd { u, sigma, vt }
}

/// Singular values only, sorted descending.
///
/// Computed from a symmetric Jacobi eigensolve of the thin-side Gram
/// product, which is cheaper than the full SVD and accurate far beyond the
/// rank tolerances used in this crate.
pub fn singular_values<S: Scalar>(m: &DenseMatrix<S>) -> Vec<S> {
    let thin = m.rows().min(m.cols());
    let mut g = DenseMatrix::zeros(thin, thin);
    if m.rows() >= m.cols() {
        for i in 0..thin {
            for j in i..thin {
                let mut sum = S::zero();
                for r in 0..m.rows() {
                    sum += m.at(r, i) * m.at(r, j);
                }
                g.set(i, j, sum);
                g.set(j, i, sum);
            }
        }
    } else {
        for i in 0..thin {
            for j in i..thin {
                let mut sum = S::zero();
                for c in 0..m.cols() {
                    sum += m.at(i, c) * m.at(j, c);
                }
                g.set(i, j, sum);
                g.set(j, i, sum);
            }
        }
    }
    let mut eig = jacobi_eigenvalues(g);
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig.into_iter().map(|l| l.max(S::zero()).sqrt()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues<S: Scalar>(mut a: DenseMatrix<S>) -> Vec<S> {
    let n = a.rows();
    if n == 1 {
        return vec![a.at(0, 0)];
    }
    let mut scale = S::zero();
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(a.at(i, j).abs());
        }
    }
    if scale == S::zero() {
        return vec![S::zero(); n];
    }
    let stop = S::epsilon() * scale;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).abs());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                if apq.abs() <= stop * s::<S>(1e-3) {
                    continue;
                }
                let app = a.at(p, p);
                let aqq = a.at(q, q);
                let two = s::<S>(2.0);
                let tau = (aqq - app) / (two * apq);
                let sign = if tau >= S::zero() { S::one() } else { -S::one() };
                let t = sign / (tau.abs() + (S::one() + tau * tau).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let sn = t * c;
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, S::zero());
                a.set(q, p, S::zero());
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    let np = c * akp - sn * akq;
                    let nq = sn * akp + c * akq;
                    a.set(k, p, np);
                    a.set(p, k, np);
                    a.set(k, q, nq);
                    a.set(q, k, nq);
                }
            }
        }
    }
    (0..n).map(|i| a.at(i, i)).collect()
}

/// Number of singular values above `rel_tol` times the largest one.
/// The all-zeros matrix has rank 0.
pub fn effective_rank<S: Scalar>(m: &DenseMatrix<S>, rel_tol: S) -> Result<usize, NumError> {
    if rel_tol <= S::zero() || rel_tol >= S::one() {
        return Err(NumError::InvalidMatrix("rel_tol outside (0, 1)"));
    }
    let sigma = singular_values(m);
    let top = sigma[0];
    if top == S::zero() {
        return Ok(0);
    }
    let cut = rel_tol * top;
    Ok(sigma.iter().filter(|&&v| v > cut).count())
}

/// Sum of singular values.
pub fn nuclear_norm<S: Scalar>(m: &DenseMatrix<S>) -> S {
    singular_values(m).into_iter().fold(S::zero(), |a, b| a + b)
}

const COND_LIMIT: f64 = 1e10;
const RESIDUAL_FACTOR: f64 = 1e-8;
const RIDGE_DOUBLINGS: usize = 8;

/// Solve `(g + ridge·I) x = 1` for a symmetric `g`.
///
/// Starts at the given ridge; if the system is too ill-conditioned or the
/// refined residual exceeds `1e-8 · (1 + ‖g‖∞)`, retries with a ridge of
/// `1e-6 · trace(g)/K`, doubling up to 8 times before giving up.
pub fn regularized_solve_ones<S: Scalar>(g: &DenseMatrix<S>, ridge: S) -> Result<Vec<S>, NumError> {
    if g.rows() != g.cols() {
        return Err(NumError::InvalidMatrix("not square"));
    }
    if !g.is_symmetric(s::<S>(1e-9)) {
        return Err(NumError::InvalidMatrix("not symmetric"));
    }
    if ridge < S::zero() {
        return Err(NumError::InvalidMatrix("negative ridge"));
    }
    let k = g.rows();
    if let Some(x) = try_solve_ones(g, ridge) {
        return Ok(x);
    }
    let trace = (0..k).fold(S::zero(), |acc, i| acc + g.at(i, i));
    let mut r = if trace > S::zero() {
        s::<S>(1e-6) * trace / s::<S>(k as f64)
    } else {
        s::<S>(1e-6)
    };
    for _ in 0..RIDGE_DOUBLINGS {
        if let Some(x) = try_solve_ones(g, r) {
            return Ok(x);
        }
        r = r * s::<S>(2.0);
    }
    Err(NumError::SingularGram)
}

fn try_solve_ones<S: Scalar>(g: &DenseMatrix<S>, ridge: S) -> Option<Vec<S>> {
    let k = g.rows();
    let mut a = g.clone();
    for i in 0..k {
        a.set(i, i, a.at(i, i) + ridge);
    }
    let dec = svd(&a).ok()?;
    let smin = dec.sigma[k - 1];
    let smax = dec.sigma[0];
    if smin <= S::zero() || smax / smin > s::<S>(COND_LIMIT) {
        return None;
    }

    let apply_inverse = |b: &[S]| -> Vec<S> {
        let mut x = vec![S::zero(); k];
        for j in 0..k {
            let mut dot = S::zero();
            for i in 0..k {
                dot += dec.u.at(i, j) * b[i];
            }
            let coef = dot / dec.sigma[j];
            for i in 0..k {
                x[i] += coef * dec.vt.at(j, i);
            }
        }
        x
    };

    let ones = vec![S::one(); k];
    let mut x = apply_inverse(&ones);
    // Two rounds of iterative refinement tighten the residual.
    for _ in 0..2 {
        let mut resid = vec![S::zero(); k];
        for i in 0..k {
            let mut ax = S::zero();
            for j in 0..k {
                ax += a.at(i, j) * x[j];
            }
            resid[i] = S::one() - ax;
        }
        let dx = apply_inverse(&resid);
        for i in 0..k {
            x[i] += dx[i];
        }
    }

    let mut worst = S::zero();
    for i in 0..k {
        let mut ax = S::zero();
        for j in 0..k {
            ax += a.at(i, j) * x[j];
        }
        worst = worst.max((ax - S::one()).abs());
    }
    let bound = s::<S>(RESIDUAL_FACTOR) * (S::one() + g.infinity_norm());
    if worst <= bound && x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> DenseMatrix<f64> {
        DenseMatrix::new(rows, cols, v.to_vec()).unwrap()
    }

    fn reconstruct(svd: &Svd<f64>) -> DenseMatrix<f64> {
        let m = svd.u.rows();
        let n = svd.vt.cols();
        let k = svd.sigma.len();
        let mut out = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let mut sum = 0.0;
                for q in 0..k {
                    sum += svd.u.at(i, q) * svd.sigma[q] * svd.vt.at(q, j);
                }
                out.set(i, j, sum);
            }
        }
        out
    }

    #[test]
    fn svd_identity() {
        let sv = svd(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(sv.sigma, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn svd_diagonal() {
        let sv = svd(&mat(2, 2, &[3.0, 0.0, 0.0, 4.0])).unwrap();
        assert_eq!(sv.sigma, vec![4.0, 3.0]);
    }

    #[test]
    fn svd_rank_one_outer_product() {
        let u = [0.6, 0.8];
        let v = [0.8, 0.0, 0.6];
        let mut data = Vec::new();
        for &a in &u {
            for &b in &v {
                data.push(a * b);
            }
        }
        let sv = svd(&mat(2, 3, &data)).unwrap();
        assert!((sv.sigma[0] - 1.0).abs() < 1e-12);
        assert!(sv.sigma[1].abs() < 1e-12);
    }

    #[test]
    fn svd_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rows = rng.gen_range(1..=8);
            let cols = rng.gen_range(1..=8);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let m = mat(rows, cols, &data);
            let sv = svd(&m).unwrap();
            for w in sv.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
            let rec = reconstruct(&sv);
            let mut err: f64 = 0.0;
            for i in 0..rows {
                for j in 0..cols {
                    err = err.max((rec.at(i, j) - m.at(i, j)).abs());
                }
            }
            assert!(err <= 1e-8 * sv.sigma[0].max(1e-30), "err {err}");
        }
    }

    #[test]
    fn svd_rejects_non_finite() {
        assert_eq!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err(),
            NumError::InvalidMatrix("non-finite entry")
        );
    }

    #[test]
    fn rank_identity() {
        let m = DenseMatrix::<f64>::identity(3);
        assert_eq!(effective_rank(&m, 1e-3).unwrap(), 3);
    }

    #[test]
    fn rank_repeated_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r1: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rows = vec![r1.clone(), r2.clone(), r1.clone(), r2.clone(), r1, r2];
        let m = DenseMatrix::from_rows(&rows).unwrap();
        assert_eq!(effective_rank(&m, 1e-3).unwrap(), 2);
        assert_eq!(oracle::row_echelon_rank(&m, 1e-9 * m.max_abs()), 2);
    }

    #[test]
    fn rank_zero_matrix() {
        let m = DenseMatrix::<f64>::zeros(4, 4);
        assert_eq!(effective_rank(&m, 1e-3).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_bad_tolerance() {
        let m = DenseMatrix::<f64>::identity(2);
        assert!(effective_rank(&m, 0.0).is_err());
        assert!(effective_rank(&m, 1.0).is_err());
    }

    #[test]
    fn nuclear_norm_cases() {
        assert_eq!(nuclear_norm(&mat(2, 2, &[3.0, 0.0, 0.0, 4.0])), 7.0);
        assert_eq!(nuclear_norm(&DenseMatrix::<f64>::zeros(3, 2)), 0.0);
        assert_eq!(nuclear_norm(&DenseMatrix::<f64>::identity(5)), 5.0);
    }

    #[test]
    fn solve_two_by_two() {
        let g = mat(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let x = regularized_solve_ones(&g, 0.0).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_identity() {
        let x = regularized_solve_ones(&DenseMatrix::<f64>::identity(3), 0.0).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_all_ones_escalates() {
        let g = mat(3, 3, &[1.0; 9]);
        let x = regularized_solve_ones(&g, 0.0).unwrap();
        assert!(x.iter().all(|v| v.is_finite()));
        assert!((x[0] - x[1]).abs() < 1e-9);
        assert!((x[1] - x[2]).abs() < 1e-9);
    }

    #[test]
    fn solve_rejects_asymmetric() {
        let g = mat(2, 2, &[1.0, 0.3, 0.2, 1.0]);
        assert!(matches!(regularized_solve_ones(&g, 0.0), Err(NumError::InvalidMatrix(_))));
    }

    #[test]
    fn solve_rejects_negative_ridge() {
        let g = DenseMatrix::<f64>::identity(2);
        assert!(regularized_solve_ones(&g, -1.0).is_err());
    }

    #[test]
    fn solve_matches_oracle_on_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.gen_range(1..=6);
            let mut a = DenseMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    a.set(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let mut g = a.transpose().matmul(&a);
            for i in 0..k {
                g.set(i, i, g.at(i, i) + 1.0);
            }
            let x = regularized_solve_ones(&g, 0.0).unwrap();
            let want = oracle::solve_gauss(&g, &vec![1.0; k]).unwrap();
            for i in 0..k {
                assert!((x[i] - want[i]).abs() < 1e-8, "component {i}: {} vs {}", x[i], want[i]);
            }
        }
    }

    proptest! {
        #[test]
        fn rank_bounded_by_dims(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let m = DenseMatrix::new(rows, cols, data).unwrap();
            let r = effective_rank(&m, 1e-3).unwrap();
            prop_assert!(r <= rows.min(cols));
        }

        #[test]
        fn rank_of_vertical_self_stack_unchanged(rows in 1usize..5, cols in 1usize..5, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect();
            let mut stacked = base.clone();
            stacked.extend(base.iter().cloned());
            let a = DenseMatrix::from_rows(&base).unwrap();
            let b = DenseMatrix::from_rows(&stacked).unwrap();
            prop_assert_eq!(
                effective_rank(&a, 1e-3).unwrap(),
                effective_rank(&b, 1e-3).unwrap()
            );
        }

        #[test]
        fn nuclear_norm_permutation_invariant(n in 2usize..5, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let m = DenseMatrix::new(n, n, data).unwrap();
            // Reverse rows and columns: an orthogonal permutation on each side.
            let mut p = DenseMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    p.set(i, j, m.at(n - 1 - i, n - 1 - j));
                }
            }
            let a = nuclear_norm(&m);
            let b = nuclear_norm(&p);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }

        #[test]
        fn solve_permutation_equivariant(k in 2usize..6, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = DenseMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    a.set(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let mut g = a.transpose().matmul(&a);
            for i in 0..k {
                g.set(i, i, g.at(i, i) + 0.5);
            }
            // Rotate indices by one.
            let perm: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
            let mut gp = DenseMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    gp.set(perm[i], perm[j], g.at(i, j));
                }
            }
            let x = regularized_solve_ones(&g, 0.0).unwrap();
            let xp = regularized_solve_ones(&gp, 0.0).unwrap();
            for i in 0..k {
                prop_assert!((x[i] - xp[perm[i]]).abs() < 1e-7);
            }
        }

        #[test]
        fn solve_residual_bound_on_spd(k in 1usize..7, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = DenseMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    a.set(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let mut g = a.transpose().matmul(&a);
            for i in 0..k {
                g.set(i, i, g.at(i, i) + 1.0);
            }
            let x = regularized_solve_ones(&g, 0.0).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..k {
                let mut ax = 0.0;
                for j in 0..k {
                    ax += g.at(i, j) * x[j];
                }
                worst = worst.max((ax - 1.0).abs());
            }
            prop_assert!(worst <= 1e-8 * (1.0 + g.infinity_norm()));
        }
    }
}
