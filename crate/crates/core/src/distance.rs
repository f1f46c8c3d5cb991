//! Exact Euclidean distance transform.
//!
//! Separable two-pass method: a 1D nearest-background scan along every row,
//! followed by a lower-envelope (partial Voronoi) pass along every column.
//! Squared distances are kept in integer arithmetic, so the result is exact.

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, ScalarField};

/// Distance from every region voxel to the nearest background voxel,
/// measured center to center. Voxels off the grid count as background, so
/// every region voxel is at distance at least 1. Background voxels get 0.
pub fn euclidean_distance_map(mask: &BinaryMask) -> Result<ScalarField> {
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dims = mask.dims();
    let squared = squared_distances(mask);
    let data = squared.iter().map(|&d| (d as f64).sqrt()).collect();
    ScalarField::new(dims, data)
}

/// Squared distances (0 on background).
pub(crate) fn squared_distances(mask: &BinaryMask) -> Vec<i64> {
    let dims = mask.dims();
    let (w, h) = (dims.width(), dims.height());
    let inside = mask.data();

    // Row pass: horizontal distance to the nearest background voxel in the
    // same row, with virtual background at x = -1 and x = w.
    let mut row_dist = vec![0i64; w * h];
    for y in 0..h {
        let row = &inside[y * w..(y + 1) * w];
        let out = &mut row_dist[y * w..(y + 1) * w];
        let mut run = 0i64;
        for x in 0..w {
            run = if row[x] { run + 1 } else { 0 };
            out[x] = run;
        }
        let mut run = 0i64;
        for x in (0..w).rev() {
            run = if row[x] { run + 1 } else { 0 };
            out[x] = out[x].min(run);
        }
    }

    // Column pass. Sites are (row, horizontal distance); rows -1 and h are
    // fully background and contribute sites with zero offset.
    let mut out = vec![0i64; w * h];
    let mut stack: Vec<(i64, i64)> = Vec::with_capacity(h + 2);
    for x in 0..w {
        stack.clear();
        let sites = std::iter::once((-1i64, 0i64))
            .chain((0..h).map(|y| (y as i64, row_dist[y * w + x])))
            .chain(std::iter::once((h as i64, 0)));
        for site in sites {
            while stack.len() >= 2 && hidden(stack[stack.len() - 2], stack[stack.len() - 1], site) {
                stack.pop();
            }
            stack.push(site);
        }

        let mut k = 0;
        for y in 0..h {
            if !inside[y * w + x] {
                continue;
            }
            let yi = y as i64;
            let dist = |(sy, g): (i64, i64)| g * g + (yi - sy) * (yi - sy);
            while k + 1 < stack.len() && dist(stack[k]) > dist(stack[k + 1]) {
                k += 1;
            }
            out[y * w + x] = dist(stack[k]);
        }
    }
    out
}

/// Whether site `v` can be dropped from the envelope because `u` and `w`
/// together dominate it everywhere along the column.
fn hidden(u: (i64, i64), v: (i64, i64), w: (i64, i64)) -> bool {
    let a = v.0 - u.0;
    let b = w.0 - v.0;
    let c = a + b;
    c * v.1 * v.1 - b * u.1 * u.1 - a * w.1 * w.1 - a * b * c > 0
}
