//! Independent brute-force references used to cross-check the production
//! kernels. Everything here is deliberately written with different
//! algorithms than the implementations under test: Gaussian elimination
//! instead of SVD, permutation enumeration instead of the assignment
//! solver, grid sampling instead of polygon clipping, and a from-scratch
//! precision/recall sweep instead of the incremental AP accumulator.
//!
//! The `oracle` CLI subcommand runs the same checks outside the test
//! harness.

use crate::boxsim::Box3D;
use crate::numkernel::DenseMatrix;

/// Rank by Gaussian elimination with partial pivoting; a pivot counts when
/// its absolute value exceeds `tol`.
pub fn row_echelon_rank(m: &DenseMatrix<f64>, tol: f64) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<f64>> = (0..rows).map(|i| (0..cols).map(|j| m.at(i, j)).collect()).collect();
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        let mut pivot = row;
        for r in row..rows {
            if a[r][col].abs() > a[pivot][col].abs() {
                pivot = r;
            }
        }
        if row >= rows || a[pivot][col].abs() <= tol {
            continue;
        }
        a.swap(row, pivot);
        let p = a[row][col];
        for r in (row + 1)..rows {
            let f = a[r][col] / p;
            if f != 0.0 {
                for c in col..cols {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Dense solve by Gauss-Jordan elimination with partial pivoting.
pub fn solve_gauss(a: &DenseMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| a.at(i, j)).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let mut pivot = col;
        for r in col..n {
            if m[r][col].abs() > m[pivot][col].abs() {
                pivot = r;
            }
        }
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for c in col..=n {
            m[col][c] /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

/// Minimum-cost assignment by exhaustive permutation enumeration.
/// Only sensible for n ≤ 8. Total cost is summed in row order so it is
/// bitwise comparable with a solver that does the same.
pub fn brute_force_assignment(cost: &DenseMatrix<f64>) -> (Vec<usize>, f64) {
    let n = cost.rows();
    assert_eq!(cost.cols(), n);
    assert!(n <= 8, "brute force assignment limited to n <= 8");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best_perm = perm.clone();
    let mut best = row_order_total(cost, &perm);
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0usize;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let total = row_order_total(cost, &perm);
            if total < best {
                best = total;
                best_perm = perm.clone();
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (best_perm, best)
}

/// Sum of `cost[i][perm[i]]` accumulated in row order.
pub fn row_order_total(cost: &DenseMatrix<f64>, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| cost.at(i, j)).sum()
}

/// Interpolated average precision over `positions` evenly spaced recall
/// points, computed from scratch: sort by score, sweep every cut, then take
/// the running-maximum precision at each recall position.
pub fn reference_average_precision(
    detections: &[(f64, bool)],
    total_gt: usize,
    positions: usize,
) -> f64 {
    if total_gt == 0 {
        return 0.0;
    }
    let mut sorted: Vec<(f64, bool)> = detections.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut curve: Vec<(f64, f64)> = Vec::new(); // (recall, precision)
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &(_, is_tp) in &sorted {
        if is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        curve.push((tp as f64 / total_gt as f64, tp as f64 / (tp + fp) as f64));
    }
    let mut sum = 0.0;
    for k in 1..=positions {
        let r = k as f64 / positions as f64;
        let p = curve
            .iter()
            .filter(|(rec, _)| *rec >= r - 1e-12)
            .map(|(_, prec)| *prec)
            .fold(0.0f64, f64::max);
        sum += p;
    }
    sum / positions as f64
}

/// Bird's-eye-view IoU of two oriented boxes estimated by sampling a
/// uniform grid over their joint bounding rectangle.
pub fn grid_iou_bev(a: &Box3D<f64>, b: &Box3D<f64>, resolution: usize) -> f64 {
    let bound = |bx: &Box3D<f64>| {
        let r = 0.5 * (bx.size[0].hypot(bx.size[1]));
        (bx.center[0] - r, bx.center[0] + r, bx.center[1] - r, bx.center[1] + r)
    };
    let (ax0, ax1, ay0, ay1) = bound(a);
    let (bx0, bx1, by0, by1) = bound(b);
    let (x0, x1) = (ax0.min(bx0), ax1.max(bx1));
    let (y0, y1) = (ay0.min(by0), ay1.max(by1));
    let mut inter = 0usize;
    let mut union = 0usize;
    for iy in 0..resolution {
        let y = y0 + (iy as f64 + 0.5) / resolution as f64 * (y1 - y0);
        for ix in 0..resolution {
            let x = x0 + (ix as f64 + 0.5) / resolution as f64 * (x1 - x0);
            let in_a = point_in_bev(a, x, y);
            let in_b = point_in_bev(b, x, y);
            if in_a && in_b {
                inter += 1;
            }
            if in_a || in_b {
                union += 1;
            }
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn point_in_bev(b: &Box3D<f64>, x: f64, y: f64) -> bool {
    let dx = x - b.center[0];
    let dy = y - b.center[1];
    let c = b.yaw.cos();
    let s = b.yaw.sin();
    let lx = c * dx + s * dy;
    let ly = -s * dx + c * dy;
    lx.abs() <= 0.5 * b.size[0] && ly.abs() <= 0.5 * b.size[1]
}
