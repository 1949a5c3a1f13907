//! Feature-level similarity between two detector feature maps: one minus
//! the normalized effective rank of their stacked activation matrix,
//! floored at a small epsilon, plus a cosine-similarity ablation mode.

use crate::numkernel::{self, DenseMatrix};
use crate::scalar::{s, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatError {
    #[error("feature map shape mismatch: {0}x{1}x{2} vs {3}x{4}x{5}")]
    ShapeMismatch(usize, usize, usize, usize, usize, usize),
    #[error("invalid feature map: {0}")]
    InvalidFeatureMap(&'static str),
}

/// H×W×D activation tensor; flattening yields an (H·W)×D matrix whose rows
/// are the per-position feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap<S> {
    h: usize,
    w: usize,
    d: usize,
    data: Vec<S>,
}

impl<S: Scalar> FeatureMap<S> {
    pub fn new(h: usize, w: usize, d: usize, data: Vec<S>) -> Result<Self, FeatError> {
        if d == 0 || h == 0 || w == 0 {
            return Err(FeatError::InvalidFeatureMap("zero dimension"));
        }
        if data.len() != h * w * d {
            return Err(FeatError::InvalidFeatureMap("data length mismatch"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(FeatError::InvalidFeatureMap("non-finite entry"));
        }
        Ok(Self { h, w, d, data })
    }

    pub fn zeros(h: usize, w: usize, d: usize) -> Self {
        Self { h, w, d, data: vec![S::zero(); h * w * d] }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize, k: usize) -> S {
        self.data[(y * self.w + x) * self.d + k]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.h == other.h && self.w == other.w && self.d == other.d
    }

    pub fn cast<T: Scalar>(&self) -> FeatureMap<T> {
        FeatureMap {
            h: self.h,
            w: self.w,
            d: self.d,
            data: self.data.iter().map(|v| s::<T>(crate::scalar::to_f64(*v))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatMode {
    Rank,
    Cosine,
}

#[derive(Debug, Clone)]
pub struct FeatSimConfig<S> {
    pub mode: FeatMode,
    /// Floor for the similarity; keeps every Gram entry positive.
    pub eps: S,
    /// Relative singular-value cutoff for the effective rank.
    pub rank_rel_tol: S,
    /// Subtract the mean feature vector of the stacked matrix before the
    /// rank computation, removing a shared-bias rank-1 component.
    pub center: bool,
}

impl<S: Scalar> Default for FeatSimConfig<S> {
    fn default() -> Self {
        Self { mode: FeatMode::Rank, eps: s(0.01), rank_rel_tol: s(1e-3), center: true }
    }
}

fn lex_less_map<S: Scalar>(a: &FeatureMap<S>, b: &FeatureMap<S>) -> bool {
    for (x, y) in a.data.iter().zip(b.data.iter()) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

/// Similarity of two same-shape feature maps, in `[eps, 1]`.
///
/// Rank mode stacks the two flattened maps into a `2HW×D` matrix and
/// returns `max(1 − rank/D, eps)`; the floor is hit exactly when the stack
/// reaches full column rank. Cosine mode (ablation) averages the cosine of
/// corresponding position vectors, mapped into `[0, 1]`.
pub fn s_feat<S: Scalar>(
    za: &FeatureMap<S>,
    zb: &FeatureMap<S>,
    cfg: &FeatSimConfig<S>,
) -> Result<S, FeatError> {
    if !za.same_shape(zb) {
        return Err(FeatError::ShapeMismatch(za.h, za.w, za.d, zb.h, zb.w, zb.d));
    }
    // Canonical argument order makes the result bitwise symmetric.
    let (p, q) = if lex_less_map(za, zb) { (za, zb) } else { (zb, za) };
    match cfg.mode {
        FeatMode::Rank => {
            let m = stacked_matrix(p, q, cfg.center);
            let d = s::<S>(za.d as f64);
            let r = numkernel::effective_rank(&m, cfg.rank_rel_tol)
                .expect("stacked feature matrix is finite");
            let sim = S::one() - s::<S>(r as f64) / d;
            Ok(sim.max(cfg.eps))
        }
        FeatMode::Cosine => {
            let positions = p.h * p.w;
            let mut acc = S::zero();
            for pos in 0..positions {
                let (mut dot, mut na, mut nb) = (S::zero(), S::zero(), S::zero());
                for k in 0..p.d {
                    let x = p.data[pos * p.d + k];
                    let y = q.data[pos * p.d + k];
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                let cosv = if na == S::zero() && nb == S::zero() {
                    S::one()
                } else if na == S::zero() || nb == S::zero() {
                    S::zero()
                } else {
                    dot / (na.sqrt() * nb.sqrt())
                };
                acc += cosv;
            }
            let mean = acc / s::<S>(positions as f64);
            let sim = (S::one() + mean) * s::<S>(0.5);
            Ok(sim.max(cfg.eps))
        }
    }
}

/// Row-stack the two flattened maps, optionally subtracting the column
/// means of the stacked matrix.
fn stacked_matrix<S: Scalar>(za: &FeatureMap<S>, zb: &FeatureMap<S>, center: bool) -> DenseMatrix<S> {
    let rows = 2 * za.h * za.w;
    let d = za.d;
    let mut data = Vec::with_capacity(rows * d);
    data.extend_from_slice(&za.data);
    data.extend_from_slice(&zb.data);
    if center {
        let mut mean = vec![S::zero(); d];
        for r in 0..rows {
            for k in 0..d {
                mean[k] += data[r * d + k];
            }
        }
        let inv = S::one() / s::<S>(rows as f64);
        for m in mean.iter_mut() {
            *m *= inv;
        }
        for r in 0..rows {
            for k in 0..d {
                data[r * d + k] -= mean[k];
            }
        }
    }
    DenseMatrix::new(rows, d, data).expect("stacked matrix is well-formed")
}
