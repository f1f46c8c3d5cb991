//! Fast marching solver for `|grad U| = V` on a masked grid, plus the
//! arrival-time helpers used to walk geodesics back to the source.
//!
//! `V` is the right-hand side of the eikonal equation: it is a cost per unit
//! length, so the front moves slowly where `V` is large.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{for_each_neighbor, BinaryMask, Connectivity, Coord, GridDims, ScalarField};

/// First-arrival times of a front started at `source`. Voxels outside the
/// solve domain hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalField {
    field: ScalarField,
    source: Coord,
}

impl ArrivalField {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn source(&self) -> Coord {
        self.source
    }

    pub fn dims(&self) -> GridDims {
        self.field.dims()
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.field.get(c)
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }
}

/// An ordered chain of 8-adjacent, pairwise distinct voxels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    coords: Vec<Coord>,
}

impl Path {
    /// Validates adjacency and simplicity.
    pub fn new(coords: Vec<Coord>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("path must not be empty".into()));
        }
        if let Some(w) = coords.windows(2).find(|w| !w[0].is_8_adjacent(&w[1])) {
            return Err(Error::InvalidParameter(format!(
                "path steps from ({}, {}) to non-adjacent ({}, {})",
                w[0].x, w[0].y, w[1].x, w[1].y
            )));
        }
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("path revisits a voxel".into()));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn first(&self) -> Coord {
        self.coords[0]
    }

    pub fn last(&self) -> Coord {
        self.coords[self.coords.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Trial {
    time: f64,
    index: usize,
}

impl Eq for Trial {}

impl Ord for Trial {
    // Reversed so that `BinaryHeap` pops the earliest time, then the
    // smallest row-major index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Trial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Upwind update: largest root of `(u-a)+^2 + (u-b)+^2 = v^2`, where `a`
/// and `b` are the smaller horizontal and vertical neighbor times.
pub fn upwind_update(a: f64, b: f64, v: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi - lo >= v {
        // Also covers hi == inf.
        lo + v
    } else {
        let diff = hi - lo;
        0.5 * (lo + hi + (2.0 * v * v - diff * diff).sqrt())
    }
}

/// Solves the discrete eikonal equation on the true voxels of `domain`,
/// starting from `source` with `U(source) = 0`.
///
/// Accepted voxels are final; neighbors are relaxed with [`upwind_update`]
/// using accepted values only.
pub fn fast_march(
    potential: &ScalarField,
    domain: &BinaryMask,
    source: Coord,
) -> Result<ArrivalField> {
    let dims = domain.dims();
    if potential.dims() != dims {
        return Err(Error::DimsMismatch);
    }
    dims.check(source)?;
    if !domain.get(source) {
        return Err(Error::SourceNotInDomain(source));
    }
    let inside = domain.data();
    let speed = potential.data();
    for (i, (&v, &d)) in speed.iter().zip(inside).enumerate() {
        if d && !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidPotential {
                coord: dims.coord(i),
                value: v,
            });
        }
    }

    let w = dims.width();
    let mut time = vec![f64::INFINITY; dims.len()];
    let mut accepted = vec![false; dims.len()];
    let mut heap = BinaryHeap::new();

    let start = dims.index(source);
    time[start] = 0.0;
    heap.push(Trial {
        time: 0.0,
        index: start,
    });

    while let Some(Trial { time: t, index }) = heap.pop() {
        if accepted[index] || t > time[index] {
            continue;
        }
        accepted[index] = true;

        for_each_neighbor(dims, index, Connectivity::Four, |n| {
            if accepted[n] || !inside[n] {
                return;
            }
            let known = |j: usize| if accepted[j] { time[j] } else { f64::INFINITY };
            let (x, y) = (n % w, n / w);
            let mut a = f64::INFINITY;
            if x > 0 {
                a = a.min(known(n - 1));
            }
            if x + 1 < w {
                a = a.min(known(n + 1));
            }
            let mut b = f64::INFINITY;
            if y > 0 {
                b = b.min(known(n - w));
            }
            if y + 1 < dims.height() {
                b = b.min(known(n + w));
            }
            let candidate = upwind_update(a, b, speed[n]);
            if candidate < time[n] {
                time[n] = candidate;
                heap.push(Trial {
                    time: candidate,
                    index: n,
                });
            }
        });
    }

    Ok(ArrivalField {
        field: ScalarField::new(dims, time)?,
        source,
    })
}

/// Location of the largest finite value; ties go to the smallest
/// row-major index.
pub fn argmax_field(field: &ScalarField) -> Result<Coord> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in field.data().iter().enumerate() {
        if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| field.dims().coord(i))
        .ok_or(Error::NoFiniteValue)
}

/// Discrete gradient descent on an arrival field: from `start`, repeatedly
/// step to the 8-neighbor with the smallest arrival time until a zero-time
/// voxel (the source) is reached. Ties go to the earlier neighbor in the
/// N, S, W, E, NW, NE, SW, SE order.
pub fn descend(arrival: &ArrivalField, start: Coord) -> Result<Path> {
    let dims = arrival.dims();
    dims.check(start)?;
    let time = arrival.field.data();
    let mut current = dims.index(start);
    if !time[current].is_finite() {
        return Err(Error::UnreachedStart(start));
    }
    let mut coords = vec![start];
    while time[current] > 0.0 {
        let mut next: Option<usize> = None;
        for_each_neighbor(dims, current, Connectivity::Eight, |n| {
            if time[n] < next.map_or(time[current], |m| time[m]) {
                next = Some(n);
            }
        });
        match next {
            Some(n) => {
                current = n;
                coords.push(dims.coord(n));
            }
            None => return Err(Error::StuckAtLocalMinimum(dims.coord(current))),
        }
    }
    // Strict decrease along the walk rules out repeats.
    Ok(Path { coords })
}
