//! Test-only generators and independent oracles.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sroi::{BinaryMask, Coord, GridDims, LabelMap, ScalarField};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn dims(w: usize, h: usize) -> GridDims {
    GridDims::new(w, h).unwrap()
}

pub fn rect(w: usize, h: usize) -> BinaryMask {
    BinaryMask::from_fn(dims(w, h), |_| true)
}

pub fn random_mask(rng: &mut StdRng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(dims(w, h), |_| rng.gen_bool(density))
}

pub struct Annulus {
    pub size: usize,
    pub center: f64,
    pub inner: f64,
    pub outer: f64,
    pub notch_degrees: f64,
}

impl Annulus {
    /// Ring of radii 16..=28 on a 128x128 grid with a 20 degree notch
    /// centered on the +x axis.
    pub fn standard() -> Self {
        Self {
            size: 128,
            center: 64.0,
            inner: 16.0,
            outer: 28.0,
            notch_degrees: 20.0,
        }
    }

    fn polar(&self, x: isize, y: isize) -> (f64, f64) {
        let dx = x as f64 - self.center;
        let dy = y as f64 - self.center;
        (dx.hypot(dy), dy.atan2(dx).to_degrees())
    }

    pub fn contains(&self, x: isize, y: isize) -> bool {
        let (r, angle) = self.polar(x, y);
        r >= self.inner && r <= self.outer && angle.abs() > self.notch_degrees / 2.0
    }

    pub fn in_cavity(&self, x: isize, y: isize) -> bool {
        self.polar(x, y).0 < self.inner
    }

    pub fn beyond_outer(&self, x: isize, y: isize) -> bool {
        self.polar(x, y).0 > self.outer
    }

    pub fn mask(&self) -> BinaryMask {
        BinaryMask::from_fn(dims(self.size, self.size), |c| {
            self.contains(c.x as isize, c.y as isize)
        })
    }

    /// Voxel count by direct enumeration of the defining inequalities.
    pub fn count(&self) -> usize {
        let n = self.size as isize;
        (0..n)
            .flat_map(|y| (0..n).map(move |x| (x, y)))
            .filter(|&(x, y)| self.contains(x, y))
            .count()
    }

    /// Angular sector index (0..sectors) of a voxel, measured from the
    /// notch.
    pub fn sector(&self, c: Coord, sectors: usize) -> usize {
        let (_, angle) = self.polar(c.x as isize, c.y as isize);
        let a = angle.rem_euclid(360.0);
        let span = 360.0 - self.notch_degrees;
        let from_notch = (a - self.notch_degrees / 2.0).clamp(0.0, span - 1e-9);
        (from_notch / span * sectors as f64) as usize
    }
}

/// Thresholded, box-smoothed uniform noise, reduced to its largest
/// 4-connected component. A two-voxel frame is kept empty so the region
/// never runs into the grid edge.
pub fn blob(rng: &mut StdRng, w: usize, h: usize) -> BinaryMask {
    let mut field: Vec<f64> = (0..w * h).map(|_| rng.gen::<f64>()).collect();
    for _ in 0..3 {
        let mut next = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (mut sum, mut n) = (0.0, 0.0);
                for yy in y.saturating_sub(3)..(y + 4).min(h) {
                    for xx in x.saturating_sub(3)..(x + 4).min(w) {
                        sum += field[yy * w + xx];
                        n += 1.0;
                    }
                }
                next[y * w + x] = sum / n;
            }
        }
        field = next;
    }
    let mut sorted = field.clone();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[sorted.len() / 2];
    let mask = BinaryMask::from_fn(dims(w, h), |c| {
        let framed = c.x >= 2 && c.y >= 2 && c.x + 2 < w && c.y + 2 < h;
        framed && field[c.y * w + c.x] > threshold
    });
    let (labels, count) = flood_components(&mask, false);
    let mut sizes = vec![0usize; count + 1];
    for &l in &labels {
        sizes[l] += 1;
    }
    let biggest = (1..=count)
        .max_by_key(|&l| (sizes[l], usize::MAX - l))
        .unwrap();
    BinaryMask::from_fn(dims(w, h), |c| labels[c.y * w + c.x] == biggest)
}

/// O(n^2) distance map: minimum over every background voxel, plus the
/// nearest voxel of the off-grid background ring.
pub fn brute_force_distance(mask: &BinaryMask) -> Vec<f64> {
    let d = mask.dims();
    let (w, h) = (d.width() as i64, d.height() as i64);
    let background: Vec<(i64, i64)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| !mask.data()[(y * w + x) as usize])
        .collect();
    (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            if !mask.data()[(y * w + x) as usize] {
                return 0.0;
            }
            let edge = (x + 1).min(y + 1).min(w - x).min(h - y);
            let best = background
                .iter()
                .map(|&(bx, by)| (bx - x).pow(2) + (by - y).pow(2))
                .fold(edge * edge, i64::min);
            (best as f64).sqrt()
        })
        .collect()
}

/// Breadth-first flood fill; seeds taken in row-major order.
pub fn flood_components(mask: &BinaryMask, eight: bool) -> (Vec<usize>, usize) {
    let d = mask.dims();
    let (w, h) = (d.width() as isize, d.height() as isize);
    let mut labels = vec![0usize; d.len()];
    let mut count = 0;
    let steps: &[(isize, isize)] = if eight {
        &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ]
    } else {
        &[(1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    for seed in 0..d.len() {
        if !mask.data()[seed] || labels[seed] != 0 {
            continue;
        }
        count += 1;
        labels[seed] = count;
        let mut queue = VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i as isize) % w, (i as isize) / w);
            for &(dx, dy) in steps {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if mask.data()[j] && labels[j] == 0 {
                    labels[j] = count;
                    queue.push_back(j);
                }
            }
        }
    }
    (labels, count)
}

/// Gauss-Seidel sweeping in the four diagonal orderings, iterated until a
/// full round leaves every value bit-identical. Each voxel is updated from
/// all of its in-domain 4-neighbors with the two-neighbor upwind quadratic.
pub fn sweeping_solution(potential: &ScalarField, domain: &BinaryMask, source: Coord) -> Vec<f64> {
    let d = domain.dims();
    let (w, h) = (d.width(), d.height());
    let inside = domain.data();
    let v = potential.data();
    let mut u = vec![f64::INFINITY; w * h];
    let src = source.y * w + source.x;
    u[src] = 0.0;
    let value = |u: &[f64], x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            return f64::INFINITY;
        }
        let j = y as usize * w + x as usize;
        if inside[j] {
            u[j]
        } else {
            f64::INFINITY
        }
    };
    let orders: [(bool, bool); 4] = [(false, false), (true, false), (false, true), (true, true)];
    for _round in 0..10_000 {
        let mut changed = false;
        for &(flip_x, flip_y) in &orders {
            for yy in 0..h {
                let y = if flip_y { h - 1 - yy } else { yy };
                for xx in 0..w {
                    let x = if flip_x { w - 1 - xx } else { xx };
                    let i = y * w + x;
                    if !inside[i] || i == src {
                        continue;
                    }
                    let (xi, yi) = (x as isize, y as isize);
                    let a = value(&u, xi - 1, yi).min(value(&u, xi + 1, yi));
                    let b = value(&u, xi, yi - 1).min(value(&u, xi, yi + 1));
                    let p = v[i];
                    let candidate = if a.is_infinite() && b.is_infinite() {
                        f64::INFINITY
                    } else if (a - b).abs() >= p {
                        a.min(b) + p
                    } else {
                        // (t - a)^2 + (t - b)^2 = p^2, larger root.
                        let s = a + b;
                        let disc = s * s - 2.0 * (a * a + b * b - p * p);
                        (s + disc.sqrt()) / 2.0
                    };
                    if candidate < u[i] {
                        u[i] = candidate;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return u;
        }
    }
    panic!("sweeping did not converge");
}

/// Per-label voxel counts by direct tally.
pub fn recount(labels: &LabelMap) -> Vec<usize> {
    let mut areas = vec![0usize; labels.max_label() as usize + 1];
    for &l in labels.data() {
        areas[l as usize] += 1;
    }
    areas
}

pub fn label_is_4_connected(labels: &LabelMap, label: u32) -> bool {
    let mask = labels.mask_of(label);
    let (_, count) = flood_components(&mask, false);
    count == 1
}

/// Checks the output of a full equal-area run against the input mask.
pub fn assert_valid_partition(mask: &BinaryMask, labels: &LabelMap, k: usize) {
    let total = mask.count();
    let areas = recount(labels);
    assert_eq!(areas.len(), k + 1, "labels must be 0..={k}");
    for (l, &area) in areas.iter().enumerate().skip(1) {
        assert_eq!(area, total / k, "label {l} area");
        assert!(
            label_is_4_connected(labels, l as u32),
            "label {l} not 4-connected"
        );
    }
    let mut trimmed = 0;
    for (i, (&inside, &l)) in mask.data().iter().zip(labels.data()).enumerate() {
        if !inside {
            assert_eq!(l, 0, "background voxel {i} labeled");
        } else if l == 0 {
            trimmed += 1;
        }
    }
    assert_eq!(trimmed, total % k, "trimmed voxel count");
}

/// Writes `mask` as a binary (P5) graymap with samples 0/255.
pub fn p5_bytes(mask: &BinaryMask) -> Vec<u8> {
    let d = mask.dims();
    let mut out = format!("P5\n{} {}\n255\n", d.width(), d.height()).into_bytes();
    out.extend(mask.data().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}
