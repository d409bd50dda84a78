//! Exact k-nearest-neighbour search under the torus metric.
//!
//! [`KnnIndex`] buckets points into a `c^d` cell grid and searches Chebyshev
//! shells of cells around the query's cell, in modular cell coordinates, so
//! wraparound needs no special casing. [`brute_force_knn`] is the reference
//! scan; both produce bit-identical output, with ties broken by smaller index.

use crate::error::{Error, Result};
use crate::geometry::{torus_distance_unchecked, SampleSet};
use std::cmp::Ordering;

/// One query result: the point index and its torus distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

impl Neighbor {
    #[inline]
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

// Slack on shell lower bounds to absorb rounding in cell assignment.
const BOUND_SLACK: f64 = 1e-12;

fn check_query(n: usize, dim: usize, q: &[f64], k: usize, exclude: Option<usize>) -> Result<()> {
    if q.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: q.len() });
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let available = match exclude {
        Some(i) if i < n => n - 1,
        _ => n,
    };
    if k > available {
        return Err(Error::InsufficientPoints { needed: k, available });
    }
    Ok(())
}

/// Reference k-NN by exhaustive scan with partial selection.
pub fn brute_force_knn(s: &SampleSet, q: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
    check_query(s.len(), s.dim(), q, k, exclude)?;
    let mut all: Vec<Neighbor> = s
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(index, p)| Neighbor { index, distance: torus_distance_unchecked(q, p) })
        .collect();
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, Neighbor::key_cmp);
        all.truncate(k);
    }
    all.sort_by(Neighbor::key_cmp);
    Ok(all)
}

/// Bounded, sorted candidate list of the best `k` neighbours seen so far.
#[derive(Debug, Default)]
struct Candidates {
    k: usize,
    items: Vec<Neighbor>,
}

impl Candidates {
    fn reset(&mut self, k: usize) {
        self.k = k;
        self.items.clear();
    }

    #[inline]
    fn offer(&mut self, nb: Neighbor) {
        if self.items.len() == self.k {
            let worst = self.items[self.k - 1];
            if nb.key_cmp(&worst) != Ordering::Less {
                return;
            }
            self.items.pop();
        }
        let pos = self
            .items
            .partition_point(|c| c.key_cmp(&nb) == Ordering::Less);
        self.items.insert(pos, nb);
    }

    fn kth_distance(&self) -> Option<f64> {
        (self.items.len() == self.k).then(|| self.items[self.k - 1].distance)
    }
}

/// Reusable per-thread buffers for repeated queries.
#[derive(Debug, Default)]
pub struct QueryScratch {
    candidates: Candidates,
    query_cell: Vec<usize>,
    offset: Vec<isize>,
}

/// Immutable cell-grid index over a [`SampleSet`].
#[derive(Debug, Clone)]
pub struct KnnIndex<'a> {
    points: &'a SampleSet,
    cells_per_axis: usize,
    // CSR buckets: points of cell c are order[cell_start[c]..cell_start[c + 1]]
    cell_start: Vec<usize>,
    order: Vec<usize>,
    // coordinates copied in bucket order for locality
    sorted_coords: Vec<f64>,
}

/// floor(n^(1/d)) computed exactly in integers.
fn integer_root(n: usize, d: usize) -> usize {
    let pow_le = |c: usize| -> bool {
        let mut acc: usize = 1;
        for _ in 0..d {
            match acc.checked_mul(c) {
                Some(v) if v <= n => acc = v,
                _ => return false,
            }
        }
        true
    };
    let mut c = (n as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
    while c > 1 && !pow_le(c) {
        c -= 1;
    }
    while c.checked_add(1).is_some_and(pow_le) {
        c += 1;
    }
    c
}

fn total_cells(c: usize, d: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..d {
        acc = acc.checked_mul(c)?;
    }
    Some(acc)
}

impl<'a> KnnIndex<'a> {
    /// Builds an index with `max(1, floor(n^(1/d)))` cells per axis.
    pub fn build(points: &'a SampleSet) -> Result<Self> {
        let c = integer_root(points.len(), points.dim()).max(1);
        Self::with_cells_per_axis(points, c)
    }

    /// Builds an index with an explicit grid resolution, reduced if needed so
    /// that the grid holds at most `8 n` cells.
    pub fn with_cells_per_axis(points: &'a SampleSet, cells_per_axis: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if cells_per_axis == 0 {
            return Err(Error::Domain("cells_per_axis must be at least 1".into()));
        }
        let n = points.len();
        let d = points.dim();
        let cap = n.saturating_mul(8);
        let mut c = cells_per_axis;
        while c > 1 && total_cells(c, d).map_or(true, |t| t > cap) {
            c -= 1;
        }
        let cells = total_cells(c, d).expect("c^d <= 8n fits in usize");

        let cell_of: Vec<usize> = points.iter().map(|p| cell_index(p, c)).collect();
        let mut cell_start = vec![0usize; cells + 1];
        for &cell in &cell_of {
            cell_start[cell + 1] += 1;
        }
        for i in 0..cells {
            cell_start[i + 1] += cell_start[i];
        }
        let mut fill = cell_start.clone();
        let mut order = vec![0usize; n];
        for (i, &cell) in cell_of.iter().enumerate() {
            order[fill[cell]] = i;
            fill[cell] += 1;
        }
        let mut sorted_coords = Vec::with_capacity(n * d);
        for &i in &order {
            sorted_coords.extend_from_slice(points.point(i));
        }
        Ok(Self { points, cells_per_axis: c, cell_start, order, sorted_coords })
    }

    pub fn points(&self) -> &'a SampleSet {
        self.points
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn num_cells(&self) -> usize {
        self.cell_start.len() - 1
    }

    /// Point indices stored in the bucket of `cell`, ascending.
    pub fn bucket(&self, cell: usize) -> &[usize] {
        &self.order[self.cell_start[cell]..self.cell_start[cell + 1]]
    }

    /// The flat cell index that contains `p`.
    pub fn cell_of(&self, p: &[f64]) -> usize {
        cell_index(p, self.cells_per_axis)
    }

    /// The `k` nearest indexed points to `q`, ascending by (distance, index).
    pub fn query(&self, q: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
        let mut scratch = QueryScratch::default();
        self.query_with(q, k, exclude, &mut scratch)?;
        Ok(scratch.candidates.items)
    }

    /// Distance to the `k`-th nearest neighbour, reusing `scratch`.
    pub fn kth_distance(&self, q: &[f64], k: usize, exclude: Option<usize>, scratch: &mut QueryScratch) -> Result<f64> {
        self.query_with(q, k, exclude, scratch)?;
        Ok(scratch.candidates.items[k - 1].distance)
    }

    fn query_with(&self, q: &[f64], k: usize, exclude: Option<usize>, scratch: &mut QueryScratch) -> Result<()> {
        let d = self.points.dim();
        check_query(self.points.len(), d, q, k, exclude)?;
        let c = self.cells_per_axis;
        let side = 1.0 / c as f64;

        scratch.candidates.reset(k);
        scratch.query_cell.clear();
        // smallest gap from q to either face of its own cell, over all axes
        let mut margin = f64::INFINITY;
        for &x in q {
            let cell = axis_cell(x, c);
            scratch.query_cell.push(cell);
            let lo = (x - cell as f64 * side).max(0.0);
            let hi = (side - lo).max(0.0);
            margin = margin.min(lo).min(hi);
        }

        // canonical offsets per axis: -below..=above, one per residue class
        let below = (c - 1) / 2;
        let above = c - 1 - below;
        let max_shell = above;

        for shell in 0..=max_shell {
            self.visit_shell(q, shell, below, above, exclude, scratch);
            if shell == max_shell {
                break;
            }
            if let Some(kth) = scratch.candidates.kth_distance() {
                // every point in shells > `shell` is at least this far away
                let bound = shell as f64 * side + margin - BOUND_SLACK;
                if kth < bound {
                    break;
                }
            }
        }
        Ok(())
    }

    fn visit_shell(
        &self,
        q: &[f64],
        shell: usize,
        below: usize,
        above: usize,
        exclude: Option<usize>,
        scratch: &mut QueryScratch,
    ) {
        let d = q.len();
        let c = self.cells_per_axis;
        let r = shell as isize;
        let lo = -(r.min(below as isize));
        let hi = r.min(above as isize);
        scratch.offset.clear();
        scratch.offset.resize(d, lo);
        loop {
            if scratch.offset.iter().any(|o| o.abs() == r) {
                let mut cell = 0usize;
                for j in (0..d).rev() {
                    let a = (scratch.query_cell[j] as isize + scratch.offset[j]).rem_euclid(c as isize) as usize;
                    cell = cell * c + a;
                }
                let start = self.cell_start[cell];
                let end = self.cell_start[cell + 1];
                for slot in start..end {
                    let index = self.order[slot];
                    if Some(index) == exclude {
                        continue;
                    }
                    let p = &self.sorted_coords[slot * d..(slot + 1) * d];
                    let distance = torus_distance_unchecked(q, p);
                    scratch.candidates.offer(Neighbor { index, distance });
                }
            }
            // odometer increment
            let mut j = 0;
            loop {
                if j == d {
                    return;
                }
                if scratch.offset[j] < hi {
                    scratch.offset[j] += 1;
                    break;
                }
                scratch.offset[j] = lo;
                j += 1;
            }
        }
    }
}

#[inline]
fn axis_cell(x: f64, c: usize) -> usize {
    ((x * c as f64) as usize).min(c - 1)
}

#[inline]
fn cell_index(p: &[f64], c: usize) -> usize {
    // axis 0 varies fastest
    p.iter().rev().fold(0usize, |acc, &x| acc * c + axis_cell(x, c))
}

/// Builds the default index over `s`.
pub fn build_index(s: &SampleSet) -> Result<KnnIndex<'_>> {
    KnnIndex::build(s)
}

/// Convenience wrapper over [`KnnIndex::query`].
pub fn knn_query(idx: &KnnIndex<'_>, q: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
    idx.query(q, k, exclude)
}
