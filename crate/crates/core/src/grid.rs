//! Grid primitives: dimensions, coordinates, per-voxel fields and
//! connectivity.
//!
//! All fields are stored row-major. Voxels outside the grid are treated as
//! background by every algorithm in the crate. Grid spacing is 1 in both axes.

use crate::error::{Error, Result};

/// Default upper bound on `width * height`.
pub const DEFAULT_MAX_VOXELS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    width: usize,
    height: usize,
}

impl GridDims {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::with_cap(width, height, DEFAULT_MAX_VOXELS)
    }

    pub fn with_cap(width: usize, height: usize, max_voxels: usize) -> Result<Self> {
        let invalid = |reason| Error::InvalidDims {
            width,
            height,
            reason,
        };
        if width == 0 || height == 0 {
            return Err(invalid("both dimensions must be positive"));
        }
        match width.checked_mul(height) {
            Some(n) if n <= max_voxels => Ok(Self { width, height }),
            _ => Err(invalid("voxel count exceeds the configured cap")),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn index(&self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        c.y * self.width + c.x
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index % self.width, index / self.width)
    }

    pub(crate) fn check(&self, c: Coord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                coord: c,
                width: self.width,
                height: self.height,
            })
        }
    }
}

/// A voxel location: `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn is_8_adjacent(&self, other: &Coord) -> bool {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx <= 1 && dy <= 1 && (dx, dy) != (0, 0)
    }
}

impl From<(usize, usize)> for Coord {
    fn from((x, y): (usize, usize)) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Edge-sharing neighbors only.
    #[default]
    Four,
    /// Edge- and corner-sharing neighbors.
    Eight,
}

/// Neighbor offsets in the fixed order N, S, W, E, NW, NE, SW, SE.
const OFFSETS: [(isize, isize); 8] = [
    (0, -1),
    (0, 1),
    (-1, 0),
    (1, 0),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
];

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &OFFSETS[..4],
            Connectivity::Eight => &OFFSETS[..],
        }
    }
}

/// In-bounds neighbors of `c`, in the order N, S, W, E (then NW, NE, SW, SE
/// for 8-connectivity).
pub fn neighbors(c: Coord, dims: GridDims, connectivity: Connectivity) -> Result<Vec<Coord>> {
    dims.check(c)?;
    let mut out = Vec::with_capacity(8);
    for_each_neighbor(dims, dims.index(c), connectivity, |n| {
        out.push(dims.coord(n))
    });
    Ok(out)
}

/// Calls `f` with the row-major index of every in-bounds neighbor of `index`,
/// in the same order as [`neighbors`].
#[inline]
pub(crate) fn for_each_neighbor(
    dims: GridDims,
    index: usize,
    connectivity: Connectivity,
    mut f: impl FnMut(usize),
) {
    let (w, h) = (dims.width as isize, dims.height as isize);
    let x = (index % dims.width) as isize;
    let y = (index / dims.width) as isize;
    for &(dx, dy) in connectivity.offsets() {
        let (nx, ny) = (x + dx, y + dy);
        if nx >= 0 && ny >= 0 && nx < w && ny < h {
            f((ny * w + nx) as usize);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    dims: GridDims,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(dims: GridDims, data: Vec<bool>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn empty(dims: GridDims) -> Self {
        Self {
            dims,
            data: vec![false; dims.len()],
        }
    }

    pub fn from_fn(dims: GridDims, mut f: impl FnMut(Coord) -> bool) -> Self {
        let data = (0..dims.len()).map(|i| f(dims.coord(i))).collect();
        Self { dims, data }
    }

    /// Parses rows of `#` (inside) and `.` (outside); handy in tests.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let dims = GridDims::new(width, height)?;
        let mut data = Vec::with_capacity(dims.len());
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::InvalidParameter("ragged ascii mask".into()));
            }
            data.extend(row.chars().map(|ch| ch == '#'));
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, c: Coord) -> bool {
        self.dims.contains(c) && self.data[self.dims.index(c)]
    }

    pub fn set(&mut self, c: Coord, value: bool) {
        let i = self.dims.index(c);
        self.data[i] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.dims.coord(i))
    }
}

/// Real-valued per-voxel field. `f64::INFINITY` marks unreached or
/// undefined voxels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dims: GridDims,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(dims: GridDims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: GridDims, value: f64) -> Self {
        Self {
            dims,
            data: vec![value; dims.len()],
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.data[self.dims.index(c)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Integer label per voxel; 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    dims: GridDims,
    data: Vec<u32>,
}

impl LabelMap {
    pub fn new(dims: GridDims, data: Vec<u32>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: GridDims) -> Self {
        Self {
            dims,
            data: vec![0; dims.len()],
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u32] {
        &mut self.data
    }

    pub fn get(&self, c: Coord) -> u32 {
        self.data[self.dims.index(c)]
    }

    pub fn max_label(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Voxel count per label; entry 0 counts background.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.max_label() as usize + 1];
        for &l in &self.data {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Mask of voxels carrying `label`.
    pub fn mask_of(&self, label: u32) -> BinaryMask {
        BinaryMask {
            dims: self.dims,
            data: self.data.iter().map(|&l| l == label).collect(),
        }
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller id as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labeling.
///
/// Components are numbered 1..=count in order of their first voxel in a
/// row-major scan; background voxels get 0.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> (LabelMap, usize) {
    let dims = mask.dims;
    let (w, h) = (dims.width, dims.height);
    let mut provisional = vec![u32::MAX; dims.len()];
    let mut sets = DisjointSet::new();

    // Already-visited neighbors in a row-major scan: W, NW, N, NE.
    let back: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(-1, 0), (0, -1)],
        Connectivity::Eight => &[(-1, 0), (-1, -1), (0, -1), (1, -1)],
    };

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.data[i] {
                continue;
            }
            let mut current = u32::MAX;
            for &(dx, dy) in back {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize {
                    continue;
                }
                let n = provisional[ny as usize * w + nx as usize];
                if n == u32::MAX {
                    continue;
                }
                if current == u32::MAX {
                    current = n;
                } else {
                    sets.union(current, n);
                }
            }
            if current == u32::MAX {
                current = sets.make();
            }
            provisional[i] = current;
        }
    }

    // Provisional ids are created in scan order and roots are the minimal id
    // of each set, so numbering roots on first encounter is row-major order.
    let mut final_id = vec![0u32; sets.parent.len()];
    let mut count = 0u32;
    let mut data = vec![0u32; dims.len()];
    for (i, &p) in provisional.iter().enumerate() {
        if p == u32::MAX {
            continue;
        }
        let root = sets.find(p) as usize;
        if final_id[root] == 0 {
            count += 1;
            final_id[root] = count;
        }
        data[i] = final_id[root];
    }
    (LabelMap { dims, data }, count as usize)
}

/// True when the voxels flagged by `member` form one non-empty 4-connected
/// set. `member` is indexed row-major over `dims`.
pub(crate) fn is_4_connected(dims: GridDims, member: impl Fn(usize) -> bool) -> bool {
    let Some(start) = (0..dims.len()).find(|&i| member(i)) else {
        return false;
    };
    let total = (0..dims.len()).filter(|&i| member(i)).count();
    flood_count(dims, start, &member) == total
}

/// Number of voxels reachable from `start` through 4-adjacent members.
pub(crate) fn flood_count(dims: GridDims, start: usize, member: impl Fn(usize) -> bool) -> usize {
    let mut seen = vec![false; dims.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut n = 0;
    while let Some(i) = stack.pop() {
        n += 1;
        for_each_neighbor(dims, i, Connectivity::Four, |j| {
            if !seen[j] && member(j) {
                seen[j] = true;
                stack.push(j);
            }
        });
    }
    n
}
