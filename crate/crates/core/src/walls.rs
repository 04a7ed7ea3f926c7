//! Hard walls (five well-spread, rising points) and soft walls (windows of
//! `ceil(sqrt(delta)) + 1` points spanning more than a quarter of that).
//! Indices are 0-based point indices.

use crate::coord::ceil_sqrt_ratio;
use crate::error::{Error, Result};
use crate::points::PointSet;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSet {
    /// Centre indices, including the first and last point as sentinels.
    pub hard: Vec<usize>,
    /// Soft separator indices per interval between consecutive hard walls.
    pub soft: Vec<Vec<usize>>,
}

/// Window `i..=i+4`: all four spacings exceed delta and the middle three
/// points rise strictly.
pub fn is_hard_wall(p: &PointSet, i: usize) -> Result<bool> {
    let n = p.len();
    if i + 4 >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let pts = p.points();
    let spread = (i..i + 4).all(|j| p.spacing(j) > p.delta());
    Ok(spread && pts[i + 1].y < pts[i + 2].y && pts[i + 2].y < pts[i + 3].y)
}

/// Checks the windows starting at multiples of five only.
pub fn find_hard_walls(p: &PointSet) -> Vec<usize> {
    let n = p.len();
    let mut hard = vec![0];
    for j in 0..n / 5 {
        if is_hard_wall(p, 5 * j).unwrap_or(false) {
            hard.push(5 * j + 2);
        }
    }
    if n > 1 {
        hard.push(n - 1);
    }
    hard.dedup();
    hard
}

/// `ceil(sqrt(delta))` for the strip of `p`.
pub fn soft_window(p: &PointSet) -> usize {
    ceil_sqrt_ratio(p.delta(), p.scale()).max(1) as usize
}

/// Window `i..=i+c`: `x_{i+c} - x_i > c/4`, compared as `4 * span > c * scale`.
pub fn is_soft_wall(p: &PointSet, i: usize) -> Result<bool> {
    let n = p.len();
    let c = soft_window(p);
    if i + c >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let span = p.points()[i + c].x - p.points()[i].x;
    Ok(4 * span as i128 > c as i128 * p.scale() as i128)
}

/// Candidates `j, j + c, j + 2c, ...` whose window ends by `j_end`. A
/// candidate whose first two points share an x has no separator and is
/// skipped.
pub fn find_soft_walls(p: &PointSet, j: usize, j_end: usize) -> Vec<usize> {
    let c = soft_window(p);
    let mut out = Vec::new();
    let mut r = j;
    while r + c <= j_end && r + c < p.len() {
        if p.spacing(r) > 0 && is_soft_wall(p, r).unwrap_or(false) {
            out.push(r);
        }
        r += c;
    }
    out
}

pub fn find_walls(p: &PointSet) -> WallSet {
    let hard = find_hard_walls(p);
    let soft = hard.windows(2).map(|w| find_soft_walls(p, w[0], w[1])).collect();
    WallSet { hard, soft }
}
