//! Oriented 3D box geometry and the output-level similarity between two
//! box prediction sets: pairwise costs, Hungarian bipartite matching and
//! the sigmoid-normalized inverse of the total matched cost.

use crate::numkernel::DenseMatrix;
use crate::scalar::{s, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxError {
    /// A non-pad box with a degenerate (non-positive) size or other
    /// invalid field.
    #[error("invalid box: {0}")]
    InvalidBox(&'static str),
    /// The assignment cost matrix is not square, finite and non-negative.
    #[error("invalid cost matrix: {0}")]
    InvalidCostMatrix(&'static str),
}

/// Oriented box: centre in meters, size (length, width, height), yaw in
/// (−π, π]. `class_id = None` marks the padding sentinel used internally
/// during set matching; user-facing boxes always carry a class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D<S> {
    pub center: [S; 3],
    pub size: [S; 3],
    pub yaw: S,
    pub class_id: Option<u32>,
    pub score: S,
}

impl<S: Scalar> Box3D<S> {
    pub fn new(center: [S; 3], size: [S; 3], yaw: S, class_id: u32, score: S) -> Result<Self, BoxError> {
        let b = Self { center, size, yaw: wrap_angle(yaw), class_id: Some(class_id), score };
        b.validate()?;
        Ok(b)
    }

    pub(crate) fn pad() -> Self {
        Self {
            center: [S::zero(); 3],
            size: [S::zero(); 3],
            yaw: S::zero(),
            class_id: None,
            score: S::zero(),
        }
    }

    pub fn is_pad(&self) -> bool {
        self.class_id.is_none()
    }

    pub fn validate(&self) -> Result<(), BoxError> {
        let finite = self.center.iter().chain(self.size.iter()).all(|v| v.is_finite())
            && self.yaw.is_finite()
            && self.score.is_finite();
        if !finite {
            return Err(BoxError::InvalidBox("non-finite field"));
        }
        if self.is_pad() {
            return Ok(());
        }
        if self.size.iter().any(|v| *v <= S::zero()) {
            return Err(BoxError::InvalidBox("non-positive size"));
        }
        if self.score < S::zero() || self.score > S::one() {
            return Err(BoxError::InvalidBox("score outside [0, 1]"));
        }
        Ok(())
    }

    pub fn volume(&self) -> S {
        self.size[0] * self.size[1] * self.size[2]
    }

    pub fn cast<T: Scalar>(&self) -> Box3D<T> {
        let c = |v: S| s::<T>(crate::scalar::to_f64(v));
        Box3D {
            center: [c(self.center[0]), c(self.center[1]), c(self.center[2])],
            size: [c(self.size[0]), c(self.size[1]), c(self.size[2])],
            yaw: c(self.yaw),
            class_id: self.class_id,
            score: c(self.score),
        }
    }
}

/// Ordered collection of non-pad boxes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoxSet<S> {
    boxes: Vec<Box3D<S>>,
}

impl<S: Scalar> BoxSet<S> {
    pub fn empty() -> Self {
        Self { boxes: Vec::new() }
    }

    pub fn new(boxes: Vec<Box3D<S>>) -> Result<Self, BoxError> {
        for b in &boxes {
            if b.is_pad() {
                return Err(BoxError::InvalidBox("pad box in user-facing set"));
            }
            b.validate()?;
        }
        Ok(Self { boxes })
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[Box3D<S>] {
        &self.boxes
    }

    pub fn iter(&self) -> impl Iterator<Item = &Box3D<S>> {
        self.boxes.iter()
    }

    /// Boxes of one class, preserving order.
    pub fn filter_class(&self, class_id: u32) -> BoxSet<S> {
        Self {
            boxes: self.boxes.iter().filter(|b| b.class_id == Some(class_id)).copied().collect(),
        }
    }

    /// Sorted list of class ids present.
    pub fn class_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.boxes.iter().filter_map(|b| b.class_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn cast<T: Scalar>(&self) -> BoxSet<T> {
        BoxSet { boxes: self.boxes.iter().map(|b| b.cast::<T>()).collect() }
    }
}

/// One-to-one matching over `{0..n}` with its total cost summed in row
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<S> {
    pub permutation: Vec<usize>,
    pub total_cost: S,
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle<S: Scalar>(a: S) -> S {
    let pi = s::<S>(std::f64::consts::PI);
    let two_pi = pi + pi;
    let mut x = a % two_pi;
    if x <= -pi {
        x += two_pi;
    } else if x > pi {
        x -= two_pi;
    }
    x
}

pub fn sigmoid<S: Scalar>(x: S) -> S {
    S::one() / (S::one() + (-x).exp())
}

fn lex_less_box<S: Scalar>(a: &Box3D<S>, b: &Box3D<S>) -> std::cmp::Ordering {
    let ka = [a.center[0], a.center[1], a.center[2], a.size[0], a.size[1], a.size[2], a.yaw, a.score];
    let kb = [b.center[0], b.center[1], b.center[2], b.size[0], b.size[1], b.size[2], b.yaw, b.score];
    for (x, y) in ka.iter().zip(kb.iter()) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.class_id.cmp(&b.class_id)
}

/// Intersection-over-union of two oriented boxes: clipped rotated BEV
/// rectangles times the vertical extent overlap. Arguments are ordered
/// canonically first so the result is bitwise symmetric.
pub fn box_iou<S: Scalar>(a: &Box3D<S>, b: &Box3D<S>) -> Result<S, BoxError> {
    for bx in [a, b] {
        if bx.is_pad() {
            return Err(BoxError::InvalidBox("pad box in iou"));
        }
        bx.validate()?;
    }
    let (p, q) = if lex_less_box(a, b) == std::cmp::Ordering::Greater { (b, a) } else { (a, b) };

    let inter_area = bev_intersection_area(p, q);
    let z_lo = (p.center[2] - p.size[2] * s::<S>(0.5)).max(q.center[2] - q.size[2] * s::<S>(0.5));
    let z_hi = (p.center[2] + p.size[2] * s::<S>(0.5)).min(q.center[2] + q.size[2] * s::<S>(0.5));
    let overlap_h = (z_hi - z_lo).max(S::zero());
    let inter = inter_area * overlap_h;
    let union = p.volume() + q.volume() - inter;
    if union <= S::zero() {
        return Ok(S::zero());
    }
    Ok((inter / union).clamp(S::zero(), S::one()))
}

fn bev_corners<S: Scalar>(b: &Box3D<S>) -> [[S; 2]; 4] {
    let c = b.yaw.cos();
    let sn = b.yaw.sin();
    let hl = b.size[0] * s::<S>(0.5);
    let hw = b.size[1] * s::<S>(0.5);
    let local = [[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]];
    let mut out = [[S::zero(); 2]; 4];
    for (k, [lx, ly]) in local.into_iter().enumerate() {
        out[k] = [b.center[0] + c * lx - sn * ly, b.center[1] + sn * lx + c * ly];
    }
    out
}

/// Area of the intersection of two rotated BEV rectangles by
/// Sutherland-Hodgman clipping followed by the shoelace formula.
fn bev_intersection_area<S: Scalar>(a: &Box3D<S>, b: &Box3D<S>) -> S {
    let clip_poly = bev_corners(b);
    let mut poly: Vec<[S; 2]> = bev_corners(a).to_vec();
    for e in 0..4 {
        if poly.is_empty() {
            return S::zero();
        }
        poly = clip_by_edge(&poly, clip_poly[e], clip_poly[(e + 1) % 4]);
    }
    polygon_area(&poly)
}

fn cross_side<S: Scalar>(a: [S; 2], b: [S; 2], p: [S; 2]) -> S {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

fn clip_by_edge<S: Scalar>(poly: &[[S; 2]], a: [S; 2], b: [S; 2]) -> Vec<[S; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let prev = poly[(i + n - 1) % n];
        let cur_in = cross_side(a, b, cur) >= S::zero();
        let prev_in = cross_side(a, b, prev) >= S::zero();
        if cur_in {
            if !prev_in {
                out.push(edge_intersection(prev, cur, a, b));
            }
            out.push(cur);
        } else if prev_in {
            out.push(edge_intersection(prev, cur, a, b));
        }
    }
    out
}

fn edge_intersection<S: Scalar>(p: [S; 2], q: [S; 2], a: [S; 2], b: [S; 2]) -> [S; 2] {
    let dp = cross_side(a, b, p);
    let dq = cross_side(a, b, q);
    let t = dp / (dp - dq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn polygon_area<S: Scalar>(poly: &[[S; 2]]) -> S {
    if poly.len() < 3 {
        return S::zero();
    }
    let mut acc = S::zero();
    for i in 0..poly.len() {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % poly.len()];
        acc += x0 * y1 - x1 * y0;
    }
    (acc * s::<S>(0.5)).abs()
}

/// Pairwise box cost: `(1 − IoU)` plus the L1 distances of centres, sizes
/// and the wrapped yaw difference. Zero exactly for identical boxes.
pub fn box_pair_cost<S: Scalar>(a: &Box3D<S>, b: &Box3D<S>) -> Result<S, BoxError> {
    let iou = box_iou(a, b)?;
    let mut l1 = S::zero();
    for k in 0..3 {
        l1 += (a.center[k] - b.center[k]).abs();
        l1 += (a.size[k] - b.size[k]).abs();
    }
    let yaw = wrap_angle(a.yaw - b.yaw).abs();
    Ok((S::one() - iou) + l1 + yaw)
}

/// Minimum-cost perfect matching on a square non-negative cost matrix
/// (Jonker-Volgenant style shortest augmenting paths, O(n³)). The reported
/// total is re-summed from the matrix in row order.
pub fn hungarian_match<S: Scalar>(cost: &DenseMatrix<S>) -> Result<Assignment<S>, BoxError> {
    let n = cost.rows();
    if cost.cols() != n {
        return Err(BoxError::InvalidCostMatrix("not square"));
    }
    if cost.data().iter().any(|v| !v.is_finite() || *v < S::zero()) {
        return Err(BoxError::InvalidCostMatrix("negative or non-finite entry"));
    }

    // 1-based with a virtual column 0; p[j] is the row assigned to column j.
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![S::infinity(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = S::infinity();
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    let total = (0..n).fold(S::zero(), |acc, i| acc + cost.at(i, row_to_col[i]));
    Ok(Assignment { permutation: row_to_col, total_cost: total })
}

fn lex_less_set<S: Scalar>(a: &BoxSet<S>, b: &BoxSet<S>) -> bool {
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Less => return true,
        std::cmp::Ordering::Greater => return false,
        std::cmp::Ordering::Equal => {}
    }
    for (x, y) in a.iter().zip(b.iter()) {
        match lex_less_box(x, y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

/// Box-set similarity in (0, 1].
///
/// The smaller set is padded with the sentinel to a common size, matched
/// costs involving a pad are zero and excluded from the total `T`, and the
/// result is `1` when `T = 0` and `sigmoid(1/T)` otherwise. With
/// `cost_mean` set, `T` is divided by the number of matched real pairs
/// first. If exactly one set is empty, each unmatched box contributes one
/// unit of cost: the result is `sigmoid(1/n)`.
pub fn s_box<S: Scalar>(a: &BoxSet<S>, b: &BoxSet<S>, cost_mean: bool) -> S {
    match (a.len(), b.len()) {
        (0, 0) => S::one(),
        (0, n) | (n, 0) => sigmoid(S::one() / s::<S>(n as f64)),
        _ => {
            let (p, q) = if lex_less_set(a, b) { (a, b) } else { (b, a) };
            let n = p.len().max(q.len());
            let mut cost = DenseMatrix::zeros(n, n);
            for i in 0..p.len() {
                for j in 0..q.len() {
                    let c = box_pair_cost(&p.boxes()[i], &q.boxes()[j])
                        .expect("user-facing sets contain valid boxes");
                    cost.set(i, j, c);
                }
            }
            let asg = hungarian_match(&cost).expect("constructed cost matrix is valid");
            let matched = (0..n)
                .filter(|&i| i < p.len() && asg.permutation[i] < q.len())
                .count();
            let total = asg.total_cost;
            if total == S::zero() {
                return S::one();
            }
            let t = if cost_mean { total / s::<S>(matched.max(1) as f64) } else { total };
            sigmoid(S::one() / t)
        }
    }
}

/// Greedy non-maximum suppression: boxes sorted by descending score, each
/// survivor suppresses later boxes overlapping it above `iou_thresh`.
pub fn nms<S: Scalar>(boxes: &[Box3D<S>], iou_thresh: S) -> Vec<Box3D<S>> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&i, &j| boxes[j].score.partial_cmp(&boxes[i].score).unwrap().then(i.cmp(&j)));
    let mut kept: Vec<Box3D<S>> = Vec::new();
    for &i in &order {
        let candidate = boxes[i];
        let suppressed = kept.iter().any(|k| {
            k.class_id == candidate.class_id
                && box_iou(k, &candidate).unwrap_or(S::zero()) > iou_thresh
        });
        if !suppressed {
            kept.push(candidate);
        }
    }
    kept
}
