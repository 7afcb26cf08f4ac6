//! Axis-aligned cubical cell complexes on a cuboid of unit cells.
//!
//! Cells of dimension k are addressed by an integer base position and the set
//! of axes they span. Each axis may independently be periodic (wrapping) or
//! open. Boundary and coboundary follow the standard cubical rules.

use serde::{Deserialize, Serialize};

/// Axis indices used throughout: 0 = x, 1 = y, 2 = z.
pub const AXES: [usize; 3] = [0, 1, 2];

/// Identifier of a cell: base position plus the bitmask of spanned axes.
///
/// A vertex spans no axes, an edge spans one, a face two, a volume three.
/// Base positions are canonical: wrapped into range on periodic axes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CellId {
    /// Base (minimum-corner) lattice position.
    pub pos: [i32; 3],
    /// Bitmask of spanned axes (bit a set = cell extends from pos to pos+e_a).
    pub axes: u8,
}

impl CellId {
    pub fn new(pos: [i32; 3], axes: u8) -> Self {
        CellId { pos, axes }
    }

    pub fn vertex(pos: [i32; 3]) -> Self {
        CellId { pos, axes: 0 }
    }

    pub fn edge(pos: [i32; 3], axis: usize) -> Self {
        CellId { pos, axes: 1 << axis }
    }

    /// Face spanning the two axes other than `normal`.
    pub fn face(pos: [i32; 3], normal: usize) -> Self {
        CellId { pos, axes: 0b111 & !(1 << normal) }
    }

    pub fn volume(pos: [i32; 3]) -> Self {
        CellId { pos, axes: 0b111 }
    }

    pub fn dim(&self) -> usize {
        self.axes.count_ones() as usize
    }

    pub fn spans(&self, axis: usize) -> bool {
        self.axes & (1 << axis) != 0
    }

    /// For an edge, the axis it runs along.
    pub fn edge_axis(&self) -> usize {
        debug_assert_eq!(self.dim(), 1);
        self.axes.trailing_zeros() as usize
    }

    /// For a face, the axis it does not span.
    pub fn face_normal(&self) -> usize {
        debug_assert_eq!(self.dim(), 2);
        (!self.axes & 0b111).trailing_zeros() as usize
    }
}

/// A cuboid cubical complex with optional periodicity per axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubicalComplex {
    /// Number of unit cells along each axis.
    pub extents: [usize; 3],
    /// Whether each axis wraps around.
    pub periodic: [bool; 3],
}

impl CubicalComplex {
    pub fn new(extents: [usize; 3], periodic: [bool; 3]) -> Self {
        assert!(extents.iter().all(|&n| n >= 1), "extents must be positive");
        CubicalComplex { extents, periodic }
    }

    /// Wrap a position into canonical range on periodic axes. Open axes are
    /// left untouched (out-of-range positions denote cells outside the
    /// complex).
    pub fn canon(&self, mut pos: [i32; 3]) -> [i32; 3] {
        for a in AXES {
            if self.periodic[a] {
                let n = self.extents[a] as i32;
                pos[a] = pos[a].rem_euclid(n);
            }
        }
        pos
    }

    /// Number of valid base coordinates along `axis` for a cell that does
    /// (`spanning = true`) or does not span that axis.
    fn coord_count(&self, axis: usize, spanning: bool) -> usize {
        let n = self.extents[axis];
        if spanning || self.periodic[axis] {
            n
        } else {
            n + 1
        }
    }

    /// Whether a canonical cell id lies inside the complex.
    pub fn contains(&self, c: &CellId) -> bool {
        AXES.iter().all(|&a| {
            let lo = 0;
            let hi = self.coord_count(a, c.spans(a)) as i32;
            c.pos[a] >= lo && c.pos[a] < hi
        })
    }

    /// All cells of dimension `k`, in a fixed deterministic order.
    pub fn cells(&self, k: usize) -> Vec<CellId> {
        let mut out = Vec::new();
        for axes in 0u8..8 {
            if axes.count_ones() as usize != k {
                continue;
            }
            let counts: Vec<usize> = AXES
                .iter()
                .map(|&a| self.coord_count(a, axes & (1 << a) != 0))
                .collect();
            for x in 0..counts[0] {
                for y in 0..counts[1] {
                    for z in 0..counts[2] {
                        out.push(CellId::new([x as i32, y as i32, z as i32], axes));
                    }
                }
            }
        }
        out
    }

    /// Number of cells of dimension `k`.
    pub fn cell_count(&self, k: usize) -> usize {
        let mut total = 0usize;
        for axes in 0u8..8 {
            if axes.count_ones() as usize != k {
                continue;
            }
            total += AXES
                .iter()
                .map(|&a| self.coord_count(a, axes & (1 << a) != 0))
                .product::<usize>();
        }
        total
    }

    /// Boundary: the (k-1)-cells on the two sides of each spanned axis.
    /// All returned cells are inside the complex (boundaries of valid cells
    /// always are).
    pub fn boundary(&self, c: &CellId) -> Vec<CellId> {
        let mut out = Vec::new();
        for a in AXES {
            if !c.spans(a) {
                continue;
            }
            let axes = c.axes & !(1 << a);
            out.push(CellId::new(self.canon(c.pos), axes));
            let mut hi = c.pos;
            hi[a] += 1;
            out.push(CellId::new(self.canon(hi), axes));
        }
        out.sort();
        out.dedup(); // periodic extent 1 can identify the two sides
        out
    }

    /// Coboundary: the (k+1)-cells containing `c`, restricted to the complex.
    pub fn coboundary(&self, c: &CellId) -> Vec<CellId> {
        let mut out = Vec::new();
        for a in AXES {
            if c.spans(a) {
                continue;
            }
            let axes = c.axes | (1 << a);
            for delta in [0i32, -1] {
                let mut pos = c.pos;
                pos[a] += delta;
                let cand = CellId::new(self.canon(pos), axes);
                if self.contains(&cand) {
                    out.push(cand);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}
