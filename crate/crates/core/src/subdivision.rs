//! Shape-following subdivision of a region into `k` equal-area parts.
//!
//! `k - 1` anchors are spaced evenly along the centerline. At each anchor the
//! region is cut by a one-voxel-thick digital line perpendicular to the local
//! centerline direction; the part behind the cut (together with the cut
//! itself) becomes the next label. The raw labels are then balanced by
//! moving border voxels between neighboring regions, and the few voxels left
//! over by integer division are trimmed from the outer tip.

use std::collections::VecDeque;

use crate::centerline::{extract_centerline_with, Centerline, CenterlineConfig};
use crate::eikonal::{ArrivalField, Path};
use crate::error::{Error, Result};
use crate::grid::{
    connected_components, for_each_neighbor, is_4_connected, BinaryMask, Connectivity, Coord,
    GridDims, LabelMap,
};

/// A real 2-vector; used as the centerline direction at a cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector2 {
    pub dx: f64,
    pub dy: f64,
}

impl Vector2 {
    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn is_zero(&self) -> bool {
        self.dx == 0.0 && self.dy == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cut {
    /// Position of the anchor in the centerline.
    pub index: usize,
    pub anchor: Coord,
    pub normal: Vector2,
}

/// Cuts in centerline order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CutPlan {
    pub cuts: Vec<Cut>,
}

impl CutPlan {
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }
}

/// Centerline direction at interior path index `i`, from the two adjacent
/// path voxels: `(x[i+1] - x[i-1], y[i+1] - y[i-1])`.
pub fn normal_at(path: &Path, i: usize) -> Result<Vector2> {
    let coords = path.coords();
    if i == 0 || i + 1 >= coords.len() {
        return Err(Error::EndpointIndex {
            index: i,
            len: coords.len(),
        });
    }
    let (prev, next) = (coords[i - 1], coords[i + 1]);
    let n = Vector2::new(next.x as f64 - prev.x as f64, next.y as f64 - prev.y as f64);
    if n.is_zero() {
        return Err(Error::DegenerateTangent(i));
    }
    Ok(n)
}

/// Anchors at path indices `round(j (L-1) / k)` for `j = 1..k`.
pub fn sample_cut_points(path: &Path, k: usize) -> Result<CutPlan> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(CutPlan::default());
    }
    let len = path.len();
    if len < 2 * k + 1 {
        return Err(Error::KTooLarge { k, path_len: len });
    }
    let span = len - 1;
    let cuts = (1..k)
        .map(|j| {
            // Round half up in integer arithmetic.
            let index = (2 * j * span + k) / (2 * k);
            Ok(Cut {
                index,
                anchor: path.coords()[index],
                normal: normal_at(path, index)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CutPlan { cuts })
}

/// Region voxels on the digital line through `anchor` perpendicular to `n`,
/// `|n . (p - anchor)| <= max(|n.dx|, |n.dy|) / 2`, restricted to the part
/// 8-connected to `anchor`. Returned in row-major order.
pub fn cut_band(mask: &BinaryMask, anchor: Coord, n: Vector2) -> Result<Vec<Coord>> {
    let dims = mask.dims();
    dims.check(anchor)?;
    if !mask.get(anchor) {
        return Err(Error::InvalidParameter(format!(
            "anchor ({}, {}) is not inside the region",
            anchor.x, anchor.y
        )));
    }
    if n.is_zero() || !n.dx.is_finite() || !n.dy.is_finite() {
        return Err(Error::InvalidParameter(
            "cut normal must be non-zero".into(),
        ));
    }
    let mut band = band_indices(dims, mask.data(), dims.index(anchor), n);
    band.sort_unstable();
    Ok(band.into_iter().map(|i| dims.coord(i)).collect())
}

fn band_indices(dims: GridDims, region: &[bool], anchor: usize, n: Vector2) -> Vec<usize> {
    let half_width = n.dx.abs().max(n.dy.abs()) / 2.0;
    let a = dims.coord(anchor);
    let on_line = |i: usize| {
        let p = dims.coord(i);
        let rx = p.x as f64 - a.x as f64;
        let ry = p.y as f64 - a.y as f64;
        (n.dx * rx + n.dy * ry).abs() <= half_width
    };
    let mut seen = vec![false; dims.len()];
    let mut out = vec![anchor];
    seen[anchor] = true;
    let mut head = 0;
    while head < out.len() {
        let i = out[head];
        head += 1;
        for_each_neighbor(dims, i, Connectivity::Eight, |j| {
            if !seen[j] && region[j] && on_line(j) {
                seen[j] = true;
                out.push(j);
            }
        });
    }
    out
}

/// Marks every voxel reachable from `start` through 4-adjacent voxels for
/// which `member` holds.
fn flood(dims: GridDims, start: usize, member: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut reached = vec![false; dims.len()];
    let mut stack = vec![start];
    reached[start] = true;
    while let Some(i) = stack.pop() {
        for_each_neighbor(dims, i, Connectivity::Four, |j| {
            if !reached[j] && member(j) {
                reached[j] = true;
                stack.push(j);
            }
        });
    }
    reached
}

/// Attempts the cut at path position `pos`. On success returns the voxels
/// that receive the current label; they are the 4-connected piece behind
/// the cut, including the cut line.
fn try_cut(
    dims: GridDims,
    working: &[bool],
    path: &[usize],
    pos: usize,
    normal: Vector2,
) -> Option<Vec<bool>> {
    let anchor = path[pos];
    let end = path[path.len() - 1];
    if !working[anchor] {
        return None;
    }
    let band = band_indices(dims, working, anchor, normal);
    let mut in_band = vec![false; dims.len()];
    for &i in &band {
        in_band[i] = true;
    }
    let rest = |i: usize| working[i] && !in_band[i];
    if !rest(end) {
        return None;
    }
    let behind_seed = path[..pos].iter().copied().find(|&i| rest(i))?;

    let ahead = flood(dims, end, rest);
    if ahead[behind_seed] {
        return None;
    }
    // Everything not ahead of the cut goes behind, as long as it hangs
    // together with the seed; loose pieces stay with the ahead side.
    let behind = flood(dims, behind_seed, |i| working[i] && !ahead[i]);

    // Labels along the centerline must not interleave.
    let mut seen_remaining = false;
    for &i in path {
        if !working[i] {
            continue;
        }
        if behind[i] {
            if seen_remaining {
                return None;
            }
        } else {
            seen_remaining = true;
        }
    }
    Some(behind)
}

/// Labels the region by cutting it at each planned anchor in order.
///
/// Label `j` is the piece behind cut `j`; whatever remains after the last
/// cut gets label `plan.len() + 1`.
pub fn subdivide(mask: &BinaryMask, path: &Path, plan: &CutPlan) -> Result<LabelMap> {
    subdivide_with_cuts(mask, path, plan).map(|(labels, _)| labels)
}

/// Like [`subdivide`], also returning the cuts actually made. A cut that
/// does not separate the region is retried with its anchor shifted along the
/// centerline by +1, -1, +2, -2, ... up to `L / (4k)` positions.
pub fn subdivide_with_cuts(
    mask: &BinaryMask,
    path: &Path,
    plan: &CutPlan,
) -> Result<(LabelMap, CutPlan)> {
    let dims = mask.dims();
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let (_, components) = connected_components(mask, Connectivity::Four);
    if components != 1 {
        return Err(Error::NotConnected { components });
    }
    for c in path.coords() {
        if !mask.get(*c) {
            return Err(Error::InvalidParameter(format!(
                "centerline voxel ({}, {}) lies outside the region",
                c.x, c.y
            )));
        }
    }
    for cut in &plan.cuts {
        if path.coords().get(cut.index) != Some(&cut.anchor) {
            return Err(Error::InvalidParameter(format!(
                "cut anchor ({}, {}) is not centerline voxel {}",
                cut.anchor.x, cut.anchor.y, cut.index
            )));
        }
    }

    let k = plan.len() + 1;
    let path_idx: Vec<usize> = path.coords().iter().map(|&c| dims.index(c)).collect();
    let max_shift = path.len() / (4 * k);
    let mut working = mask.data().to_vec();
    let mut labels = LabelMap::zeros(dims);
    let mut made = Vec::with_capacity(plan.len());
    let mut last_pos = 0usize;

    for (j, planned) in plan.cuts.iter().enumerate() {
        let label = j as u32 + 1;
        let shifts = std::iter::once(0isize).chain((1..=max_shift as isize).flat_map(|s| [s, -s]));
        let mut done = None;
        for shift in shifts {
            let Some(pos) = planned.index.checked_add_signed(shift) else {
                continue;
            };
            if pos <= last_pos || pos + 1 >= path.len() {
                continue;
            }
            let Ok(normal) = normal_at(path, pos) else {
                continue;
            };
            if let Some(behind) = try_cut(dims, &working, &path_idx, pos, normal) {
                done = Some((pos, normal, behind));
                break;
            }
        }
        let (pos, normal, behind) = done.ok_or(Error::CutFailed { segment: j + 1 })?;
        let out = labels.data_mut();
        for (i, take) in behind.iter().enumerate() {
            if *take {
                out[i] = label;
                working[i] = false;
            }
        }
        made.push(Cut {
            index: pos,
            anchor: path.coords()[pos],
            normal,
        });
        last_pos = pos;
    }

    let out = labels.data_mut();
    for (i, &w) in working.iter().enumerate() {
        if w {
            out[i] = k as u32;
        }
    }
    Ok((labels, CutPlan { cuts: made }))
}

/// Ring around a voxel in cyclic order N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

struct Balancer<'a> {
    dims: GridDims,
    labels: Vec<u32>,
    areas: Vec<usize>,
    arrival: &'a [f64],
}

impl Balancer<'_> {
    fn label_at(&self, x: isize, y: isize) -> u32 {
        if x < 0 || y < 0 || x >= self.dims.width() as isize || y >= self.dims.height() as isize {
            0
        } else {
            self.labels[y as usize * self.dims.width() + x as usize]
        }
    }

    /// Whether voxel `i` can leave its region without splitting it.
    fn removable(&self, i: usize) -> bool {
        let label = self.labels[i];
        if self.areas[label as usize] <= 1 {
            return false;
        }
        let (x, y) = (
            (i % self.dims.width()) as isize,
            (i / self.dims.width()) as isize,
        );
        let inside: Vec<bool> = RING
            .iter()
            .map(|&(dx, dy)| self.label_at(x + dx, y + dy) == label)
            .collect();
        // Runs of consecutive ring members are 4-connected among themselves;
        // count the runs that touch an edge neighbor (even ring positions).
        let mut runs_with_edge = 0;
        let start = match (0..8).find(|&s| !inside[s]) {
            Some(s) => s,
            None => return true,
        };
        let mut in_run = false;
        let mut run_has_edge = false;
        for step in 1..=8 {
            let s = (start + step) % 8;
            if inside[s] {
                in_run = true;
                run_has_edge |= s % 2 == 0;
            } else if in_run {
                runs_with_edge += run_has_edge as usize;
                in_run = false;
                run_has_edge = false;
            }
        }
        match runs_with_edge {
            0 => false,
            1 => true,
            _ => {
                let labels = &self.labels;
                is_4_connected(self.dims, |j| j != i && labels[j] == label)
            }
        }
    }

    fn touches(&self, i: usize, label: u32) -> bool {
        let mut hit = false;
        for_each_neighbor(self.dims, i, Connectivity::Four, |j| {
            hit |= self.labels[j] == label
        });
        hit
    }

    fn neighbor_labels(&self, label: u32) -> Vec<u32> {
        let mut adjacent = vec![false; self.areas.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            if l == label {
                for_each_neighbor(self.dims, i, Connectivity::Four, |j| {
                    adjacent[self.labels[j] as usize] = true;
                });
            }
        }
        (1..self.areas.len() as u32)
            .filter(|&l| l != label && adjacent[l as usize])
            .collect()
    }

    fn moved(&mut self, i: usize, to: u32) {
        let from = self.labels[i];
        self.areas[from as usize] -= 1;
        self.areas[to as usize] += 1;
        self.labels[i] = to;
    }

    /// Number of the 8 surrounding voxels that carry `label`.
    fn surrounded_by(&self, i: usize, label: u32) -> usize {
        let mut n = 0;
        for_each_neighbor(self.dims, i, Connectivity::Eight, |j| {
            n += (self.labels[j] == label) as usize
        });
        n
    }

    /// Preferred voxel of `from` to hand over to `to`: the one most
    /// surrounded by `to`, then the largest arrival time, then the smallest
    /// row-major index.
    fn best_transfer(&self, from: u32, to: u32) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (i, &l) in self.labels.iter().enumerate() {
            if l != from || !self.touches(i, to) {
                continue;
            }
            let score = self.surrounded_by(i, to);
            if let Some((b, b_score)) = best {
                if (score, self.arrival[i].total_cmp(&self.arrival[b]))
                    <= (b_score, std::cmp::Ordering::Equal)
                {
                    continue;
                }
            }
            if self.removable(i) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Coarse pass: the largest region hands its whole border with its
    /// smaller neighbor to that neighbor. Stops once the largest region is
    /// one that was already chosen, is at its target, or cannot give its
    /// border away without making that pair more unequal.
    fn coarse(&mut self, k: usize, targets: &[usize]) {
        let mut chosen = vec![false; k + 1];
        for _ in 0..10 * k {
            let largest = (1..=k as u32)
                .max_by(|&a, &b| {
                    self.areas[a as usize]
                        .cmp(&self.areas[b as usize])
                        .then(b.cmp(&a))
                })
                .expect("k >= 1");
            if chosen[largest as usize] || self.areas[largest as usize] <= targets[largest as usize]
            {
                return;
            }
            chosen[largest as usize] = true;
            let Some(smaller) = self
                .neighbor_labels(largest)
                .into_iter()
                .min_by_key(|&l| (self.areas[l as usize], l))
            else {
                return;
            };
            let border: Vec<usize> = (0..self.labels.len())
                .filter(|&i| self.labels[i] == largest && self.touches(i, smaller))
                .collect();
            let snapshot = (self.labels.clone(), self.areas.clone());
            let gap = self.areas[largest as usize] - self.areas[smaller as usize];
            let mut moved = 0;
            for i in border {
                if self.removable(i) {
                    self.moved(i, smaller);
                    moved += 1;
                }
            }
            if moved == 0 || moved > gap {
                (self.labels, self.areas) = snapshot;
                return;
            }
        }
    }

    /// Fine pass: one voxel at a time, along the shortest chain of adjacent
    /// regions from a region over target to one under target.
    fn fine(&mut self, k: usize, targets: &[usize]) -> bool {
        let over = |b: &Self, l: u32| b.areas[l as usize] > targets[l as usize];
        let under = |b: &Self, l: u32| b.areas[l as usize] < targets[l as usize];
        for _ in 0..100 * k {
            let Some(donor) = (1..=k as u32).find(|&l| over(self, l)) else {
                return true;
            };
            let Some(chain) = self.chain_to_deficit(donor, k, &under) else {
                return false;
            };
            for pair in chain.windows(2) {
                match self.best_transfer(pair[0], pair[1]) {
                    Some(i) => self.moved(i, pair[1]),
                    None => break,
                }
            }
        }
        (1..=k as u32).all(|l| self.areas[l as usize] == targets[l as usize])
    }

    fn chain_to_deficit(
        &self,
        donor: u32,
        k: usize,
        under: &dyn Fn(&Self, u32) -> bool,
    ) -> Option<Vec<u32>> {
        let mut parent = vec![u32::MAX; k + 1];
        parent[donor as usize] = donor;
        let mut queue = VecDeque::from([donor]);
        while let Some(from) = queue.pop_front() {
            for to in self.neighbor_labels(from) {
                if parent[to as usize] != u32::MAX || self.best_transfer(from, to).is_none() {
                    continue;
                }
                parent[to as usize] = from;
                if under(self, to) {
                    let mut chain = vec![to];
                    let mut at = to;
                    while at != donor {
                        at = parent[at as usize];
                        chain.push(at);
                    }
                    chain.reverse();
                    return Some(chain);
                }
                queue.push_back(to);
            }
        }
        None
    }

    /// Relabels all regions by peeling them off one after another, starting
    /// at the highest arrival time. Each region grows by the latest-arriving
    /// voxel that touches it and leaves the unassigned rest connected.
    fn peel(&mut self, k: usize, targets: &[usize]) -> bool {
        let rest = k as u32 + 1;
        let total: usize = self.areas[1..].iter().sum();
        for l in self.labels.iter_mut().filter(|l| **l != 0) {
            *l = rest;
        }
        self.areas = vec![0; k + 2];
        self.areas[rest as usize] = total;
        for label in 1..k as u32 {
            for _ in 0..targets[label as usize] {
                let mut order: Vec<usize> = (0..self.labels.len())
                    .filter(|&i| {
                        self.labels[i] == rest
                            && (self.areas[label as usize] == 0 || self.touches(i, label))
                    })
                    .collect();
                order.sort_by(|&a, &b| self.arrival[b].total_cmp(&self.arrival[a]).then(a.cmp(&b)));
                let Some(i) = order.into_iter().find(|&i| self.removable(i)) else {
                    return false;
                };
                self.moved(i, label);
            }
        }
        for i in 0..self.labels.len() {
            if self.labels[i] == rest {
                self.moved(i, k as u32);
            }
        }
        self.areas.truncate(k + 1);
        self.areas[k] == targets[k]
    }

    /// Clears `count` voxels of `label`, highest arrival time first, never
    /// disconnecting the region.
    fn trim(&mut self, label: u32, count: usize) -> bool {
        for _ in 0..count {
            let mut order: Vec<usize> = (0..self.labels.len())
                .filter(|&i| self.labels[i] == label)
                .collect();
            order.sort_by(|&a, &b| self.arrival[b].total_cmp(&self.arrival[a]).then(a.cmp(&b)));
            let Some(i) = order.into_iter().find(|&i| self.removable(i)) else {
                return false;
            };
            self.moved(i, 0);
        }
        true
    }
}

fn check_labels(labels: &LabelMap, k: usize) -> Result<Vec<usize>> {
    if labels.max_label() as usize != k {
        return Err(Error::InvalidLabels(format!(
            "expected labels 1..={k}, found maximum {}",
            labels.max_label()
        )));
    }
    let areas = labels.areas();
    for (l, &area) in areas.iter().enumerate().skip(1) {
        if area == 0 {
            return Err(Error::InvalidLabels(format!("label {l} is empty")));
        }
        let data = labels.data();
        if !is_4_connected(labels.dims(), |i| data[i] == l as u32) {
            return Err(Error::InvalidLabels(format!(
                "label {l} is not 4-connected"
            )));
        }
    }
    Ok(areas)
}

/// Equalizes the areas of labels `1..=k`.
///
/// With `A` labeled voxels every label ends with exactly `A / k` voxels and
/// `A % k` voxels are set to 0. Voxels only move between 4-adjacent regions
/// and no region is ever disconnected. The leftover voxels are trimmed from
/// the region holding the largest arrival time, starting at the highest
/// arrival times. If the border exchange stalls, the regions are rebuilt by
/// peeling them off the labeled area in arrival order instead.
pub fn balance_areas(labels: &LabelMap, k: usize, arrival: &ArrivalField) -> Result<LabelMap> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if labels.dims() != arrival.dims() {
        return Err(Error::DimsMismatch);
    }
    check_labels(labels, k)?;
    let times = arrival.field().data();
    if let Some(i) = (0..times.len()).find(|&i| labels.data()[i] != 0 && !times[i].is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "arrival time undefined at labeled voxel ({}, {})",
            i % labels.dims().width(),
            i / labels.dims().width()
        )));
    }

    let mut b = Balancer {
        dims: labels.dims(),
        labels: labels.data().to_vec(),
        areas: labels.areas(),
        arrival: times,
    };
    let total: usize = b.areas[1..].iter().sum();
    let target = total / k;
    let extra = total % k;

    let mut tip = 0u32;
    let mut tip_time = f64::NEG_INFINITY;
    for (i, &l) in b.labels.iter().enumerate() {
        if l != 0 && times[i] > tip_time {
            tip = l;
            tip_time = times[i];
        }
    }
    let mut targets = vec![target; k + 1];
    targets[0] = 0;
    targets[tip as usize] += extra;

    let failed = |b: &Balancer| Error::BalanceFailed {
        areas: b.areas[1..].to_vec(),
        target,
    };

    b.coarse(k, &targets);
    if !b.fine(k, &targets) {
        let exchanged = (b.labels.clone(), b.areas.clone());
        b.labels = labels.data().to_vec();
        b.areas = labels.areas();
        if !b.peel(k, &targets) {
            (b.labels, b.areas) = exchanged;
            return Err(failed(&b));
        }
    }
    if !b.trim(tip, extra) {
        return Err(failed(&b));
    }
    let areas = b.areas[1..].to_vec();
    let out = LabelMap::new(labels.dims(), b.labels)?;
    let areas = check_labels(&out, k).map_err(|_| Error::BalanceFailed { areas, target })?;
    if areas[1..].iter().any(|&a| a != target) {
        return Err(Error::BalanceFailed {
            areas: areas[1..].to_vec(),
            target,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdivisionConfig {
    pub centerline: CenterlineConfig,
    /// Equalize region areas after cutting.
    pub balance: bool,
}

impl Default for SubdivisionConfig {
    fn default() -> Self {
        Self {
            centerline: CenterlineConfig::default(),
            balance: true,
        }
    }
}

/// Everything the pipeline produced.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub centerline: Centerline,
    /// The cuts actually made, after any anchor shifts.
    pub cuts: CutPlan,
    pub labels: LabelMap,
}

/// Centerline, cuts, labeling and balancing in one call.
pub fn subdivide_equal(mask: &BinaryMask, k: usize) -> Result<LabelMap> {
    run_pipeline(mask, k, &SubdivisionConfig::default()).map(|s| s.labels)
}

pub fn run_pipeline(
    mask: &BinaryMask,
    k: usize,
    config: &SubdivisionConfig,
) -> Result<Subdivision> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let centerline = extract_centerline_with(mask, &config.centerline)?;
    let plan = sample_cut_points(&centerline.path, k)?;
    let (raw, cuts) = subdivide_with_cuts(mask, &centerline.path, &plan)?;
    let labels = if config.balance {
        balance_areas(&raw, k, &centerline.second_wave)?
    } else {
        raw
    };
    Ok(Subdivision {
        centerline,
        cuts,
        labels,
    })
}
