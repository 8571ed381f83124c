//! Uniform bucket grid over `f64` shadows of point coordinates.
//!
//! The grid only prunes candidates; every distance that decides a result
//! is recomputed in the space's own scalar type.

use rustc_hash::FxHashMap;

pub(crate) type Key = [i64; 3];

const NIL: u32 = u32::MAX;

/// Cell heads: a flat array over the declared box when it is small
/// enough, a hash map otherwise.
enum Heads {
    Dense {
        origin: Key,
        size: [usize; 3],
        slots: Vec<u32>,
    },
    Sparse(FxHashMap<Key, u32>),
}

/// At most this many cells per item before the flat array gives way to a
/// hash map.
const DENSE_CELLS_PER_ITEM: usize = 4;

pub(crate) struct Grid {
    dim: usize,
    cell: f64,
    heads: Heads,
    next: Vec<u32>,
}

impl Grid {
    /// Grid for `items` points whose keys all lie in `[lo, hi]`.
    pub(crate) fn new(dim: usize, cell: f64, lo: Key, hi: Key, items: usize) -> Self {
        debug_assert!(cell > 0.0 && cell.is_finite());
        let mut size = [1usize; 3];
        let mut cells: Option<usize> = Some(1);
        for a in 0..dim {
            let span = hi[a]
                .checked_sub(lo[a])
                .and_then(|d| usize::try_from(d).ok());
            match span.and_then(|d| d.checked_add(1)) {
                Some(w) => {
                    size[a] = w;
                    cells = cells.and_then(|c| c.checked_mul(w));
                }
                None => cells = None,
            }
        }
        let heads = match cells {
            Some(c) if c <= DENSE_CELLS_PER_ITEM * items + 64 => Heads::Dense {
                origin: std::array::from_fn(|a| if a < dim { lo[a] } else { 0 }),
                size,
                slots: vec![NIL; c],
            },
            _ => {
                let mut map = FxHashMap::default();
                map.reserve(items);
                Heads::Sparse(map)
            }
        };
        Grid {
            dim,
            cell,
            heads,
            next: Vec::with_capacity(items),
        }
    }

    pub(crate) fn cell(&self) -> f64 {
        self.cell
    }

    pub(crate) fn key(&self, x: &[f64]) -> Key {
        let mut k = [0i64; 3];
        for (slot, v) in k.iter_mut().zip(x).take(self.dim) {
            *slot = (v / self.cell).floor() as i64;
        }
        k
    }

    fn dense_index(origin: &Key, size: &[usize; 3], key: &Key) -> Option<usize> {
        let mut idx = 0usize;
        for a in (0..3).rev() {
            let off = usize::try_from(key[a].checked_sub(origin[a])?).ok()?;
            if off >= size[a] {
                return None;
            }
            idx = idx * size[a] + off;
        }
        Some(idx)
    }

    fn head(&self, key: &Key) -> u32 {
        match &self.heads {
            Heads::Dense {
                origin,
                size,
                slots,
            } => Self::dense_index(origin, size, key).map_or(NIL, |i| slots[i]),
            Heads::Sparse(map) => map.get(key).copied().unwrap_or(NIL),
        }
    }

    fn head_mut(&mut self, key: Key) -> &mut u32 {
        match &mut self.heads {
            Heads::Dense {
                origin,
                size,
                slots,
            } => {
                let i = Self::dense_index(origin, size, &key).expect("key inside the declared box");
                &mut slots[i]
            }
            Heads::Sparse(map) => map.entry(key).or_insert(NIL),
        }
    }

    /// Inserts the next item into `key` unless `clash` holds for an item
    /// already there. Returns whether it was inserted.
    pub(crate) fn insert_unless(&mut self, key: Key, mut clash: impl FnMut(usize) -> bool) -> bool {
        let idx = self.next.len() as u32;
        let mut cur = self.head(&key);
        let first = cur;
        while cur != NIL {
            if clash(cur as usize) {
                return false;
            }
            cur = self.next[cur as usize];
        }
        *self.head_mut(key) = idx;
        self.next.push(first);
        true
    }

    pub(crate) fn for_each_in_cell(&self, key: &Key, mut f: impl FnMut(usize)) {
        let mut cur = self.head(key);
        while cur != NIL {
            f(cur as usize);
            cur = self.next[cur as usize];
        }
    }

    /// Calls `f` on the cell of `x` and on those neighbours whose faces lie
    /// within `reach` of `x`.
    pub(crate) fn for_each_cell_within(&self, x: &[f64], reach: f64, mut f: impl FnMut(&Key)) {
        let key = self.key(x);
        let mut span = [(0i64, 0i64); 3];
        for a in 0..self.dim {
            let offset = x[a] - key[a] as f64 * self.cell;
            span[a] = (
                if offset <= reach { -1 } else { 0 },
                if self.cell - offset <= reach { 1 } else { 0 },
            );
        }
        for dx in span[0].0..=span[0].1 {
            for dy in span[1].0..=span[1].1 {
                for dz in span[2].0..=span[2].1 {
                    f(&[
                        key[0].saturating_add(dx),
                        key[1].saturating_add(dy),
                        key[2].saturating_add(dz),
                    ]);
                }
            }
        }
    }
}

/// Static cell index over a fixed point set: the points of each cell are
/// stored contiguously, in input order.
pub(crate) struct CellIndex {
    dim: usize,
    cell: f64,
    cells: Cells,
    /// Input indices in cell order.
    order: Vec<u32>,
    lo: Key,
    hi: Key,
}

enum Cells {
    /// Prefix offsets into `order`, one past the last cell at the end.
    Dense {
        origin: Key,
        size: [usize; 3],
        start: Vec<u32>,
    },
    Sparse(FxHashMap<Key, (u32, u32)>),
}

impl CellIndex {
    /// Indexes `points` (coordinate shadows) in cells of side `cell`.
    pub(crate) fn build(dim: usize, cell: f64, points: &[[f64; 3]]) -> Self {
        let key = |x: &[f64; 3]| -> Key {
            let mut k = [0i64; 3];
            for a in 0..dim {
                k[a] = (x[a] / cell).floor() as i64;
            }
            k
        };
        let (mut lo, mut hi) = ([0i64; 3], [0i64; 3]);
        if let Some(first) = points.first() {
            (lo, hi) = (key(first), key(first));
        }
        for p in points {
            let k = key(p);
            for a in 0..dim {
                lo[a] = lo[a].min(k[a]);
                hi[a] = hi[a].max(k[a]);
            }
        }
        let shape = Grid::new(dim, cell, lo, hi, points.len());
        let (cells, order) = match shape.heads {
            Heads::Dense {
                origin,
                size,
                slots,
            } => {
                let slot_of = |p: &[f64; 3]| {
                    Grid::dense_index(&origin, &size, &key(p)).expect("key inside the box")
                };
                let mut start = vec![0u32; slots.len() + 1];
                for p in points {
                    start[slot_of(p) + 1] += 1;
                }
                for c in 0..slots.len() {
                    start[c + 1] += start[c];
                }
                let mut fill = start.clone();
                let mut order = vec![0u32; points.len()];
                for (i, p) in points.iter().enumerate() {
                    let c = slot_of(p);
                    order[fill[c] as usize] = i as u32;
                    fill[c] += 1;
                }
                (
                    Cells::Dense {
                        origin,
                        size,
                        start,
                    },
                    order,
                )
            }
            Heads::Sparse(_) => {
                let keys: Vec<Key> = points.iter().map(key).collect();
                let mut order: Vec<u32> = (0..keys.len() as u32).collect();
                order.sort_by_key(|&i| keys[i as usize]);
                let mut map = FxHashMap::default();
                let mut run = 0usize;
                while run < order.len() {
                    let k = keys[order[run] as usize];
                    let mut end = run;
                    while end < order.len() && keys[order[end] as usize] == k {
                        end += 1;
                    }
                    map.insert(k, (run as u32, end as u32));
                    run = end;
                }
                (Cells::Sparse(map), order)
            }
        };
        CellIndex {
            dim,
            cell,
            cells,
            order,
            lo,
            hi,
        }
    }

    pub(crate) fn cell(&self) -> f64 {
        self.cell
    }

    pub(crate) fn key(&self, x: &[f64]) -> Key {
        let mut k = [0i64; 3];
        for (slot, v) in k.iter_mut().zip(x).take(self.dim) {
            *slot = (v / self.cell).floor() as i64;
        }
        k
    }

    /// Input indices in cell order.
    pub(crate) fn order(&self) -> &[u32] {
        &self.order
    }

    /// Positions in [`CellIndex::order`] of the points in `key`.
    pub(crate) fn cell_range(&self, key: &Key) -> std::ops::Range<usize> {
        match &self.cells {
            Cells::Dense {
                origin,
                size,
                start,
            } => match Grid::dense_index(origin, size, key) {
                Some(c) => start[c] as usize..start[c + 1] as usize,
                None => 0..0,
            },
            Cells::Sparse(map) => map.get(key).map_or(0..0, |&(a, b)| a as usize..b as usize),
        }
    }

    /// Chebyshev ring distance from `key` to the occupied bounding box.
    pub(crate) fn ring_bounds(&self, key: &Key) -> (i64, i64) {
        let mut start = 0i64;
        let mut end = 0i64;
        for a in 0..self.dim {
            let below = self.lo[a].saturating_sub(key[a]).max(0);
            let above = key[a].saturating_sub(self.hi[a]).max(0);
            start = start.max(below.max(above));
            let far = (key[a].saturating_sub(self.lo[a]))
                .abs()
                .max(self.hi[a].saturating_sub(key[a]).abs());
            end = end.max(far);
        }
        (start, end)
    }

    /// Visits the cells at Chebyshev distance exactly `r` from `center`
    /// that fall inside the occupied bounding box. Returns the number of
    /// cells visited.
    pub(crate) fn for_each_ring_cell(
        &self,
        center: &Key,
        r: i64,
        mut f: impl FnMut(&Key),
    ) -> usize {
        let mut visited = 0usize;
        if r == 0 {
            f(center);
            return 1;
        }
        let clamp = |a: usize, lo: i64, hi: i64| -> Option<(i64, i64)> {
            let lo = lo.max(self.lo[a]);
            let hi = hi.min(self.hi[a]);
            (lo <= hi).then_some((lo, hi))
        };
        for fixed in 0..self.dim {
            for side in [-r, r] {
                let coord = center[fixed].saturating_add(side);
                if coord < self.lo[fixed] || coord > self.hi[fixed] {
                    continue;
                }
                let mut ranges = [(0i64, 0i64); 3];
                let mut empty = false;
                for a in 0..3 {
                    if a >= self.dim {
                        ranges[a] = (0, 0);
                    } else if a == fixed {
                        ranges[a] = (coord, coord);
                    } else {
                        // earlier axes exclude their own faces so corners are visited once
                        let inner = if a < fixed { r - 1 } else { r };
                        match clamp(
                            a,
                            center[a].saturating_sub(inner),
                            center[a].saturating_add(inner),
                        ) {
                            Some(rg) => ranges[a] = rg,
                            None => empty = true,
                        }
                    }
                }
                if empty {
                    continue;
                }
                for x in ranges[0].0..=ranges[0].1 {
                    for y in ranges[1].0..=ranges[1].1 {
                        for z in ranges[2].0..=ranges[2].1 {
                            visited += 1;
                            f(&[x, y, z]);
                        }
                    }
                }
            }
        }
        visited
    }
}
