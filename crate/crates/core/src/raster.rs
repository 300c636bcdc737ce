//! Raster grids over the plane: rasterisation of curves and islands, exact
//! Euclidean distance transform, flood fill and shortest-path routing.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::geometry::{AdmissibleSet, Island, Polyline};
use crate::{c64, C64};

/// Uniform grid of square cells; cell `(i, j)` has centre
/// `origin + (i + ½)h + i(j + ½)h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub origin: C64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Grid covering the box `[lo, hi]` plus `margin` on every side, with
    /// cell size `h`.
    pub fn covering(lo: C64, hi: C64, margin: f64, h: f64) -> Self {
        let origin = lo - c64(margin, margin);
        let nx = (((hi.re - lo.re) + 2.0 * margin) / h).ceil() as usize + 1;
        let ny = (((hi.im - lo.im) + 2.0 * margin) / h).ceil() as usize + 1;
        Self { origin, h, nx, ny }
    }

    /// Grid for `set` with `cells` cells across its larger extent.
    pub fn for_set(set: &AdmissibleSet, cells: usize, margin: f64) -> Self {
        let (lo, hi) = set.bounding_box();
        let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        Self::covering(lo, hi, margin, extent / cells as f64)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> C64 {
        self.origin + c64((i as f64 + 0.5) * self.h, (j as f64 + 0.5) * self.h)
    }

    pub fn center_of(&self, k: usize) -> C64 {
        let (i, j) = self.ij(k);
        self.center(i, j)
    }

    /// Cell containing `z`, if inside the grid.
    pub fn cell_of(&self, z: C64) -> Option<usize> {
        let x = ((z.re - self.origin.re) / self.h).floor();
        let y = ((z.im - self.origin.im) / self.h).floor();
        if x < 0.0 || y < 0.0 || x >= self.nx as f64 || y >= self.ny as f64 {
            None
        } else {
            Some(self.idx(x as usize, y as usize))
        }
    }

    pub fn on_border(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// 4-neighbours of cell `k`.
    pub fn neighbors4(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.ij(k);
        let (nx, ny) = (self.nx, self.ny);
        [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(move |(di, dj)| {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                (a >= 0 && b >= 0 && a < nx as i64 && b < ny as i64).then(|| b as usize * nx + a as usize)
            })
    }
}

/// Marks every cell touched by the polyline.
pub fn rasterize_polyline(grid: &Grid, poly: &Polyline, mask: &mut [bool]) {
    for (a, b) in poly.segments() {
        let steps = (((b - a).norm() / (0.25 * grid.h)).ceil() as usize).max(1);
        for k in 0..=steps {
            if let Some(c) = grid.cell_of(a + (b - a) * (k as f64 / steps as f64)) {
                mask[c] = true;
            }
        }
    }
}

/// Marks cells whose centre lies inside the island (scanline fill).
pub fn fill_island(grid: &Grid, island: &Island, mask: &mut [bool]) {
    let polys: Vec<&Polyline> = (0..island.n_boundaries()).map(|j| island.boundary_poly(j)).collect();
    fill_even_odd(grid, &polys, mask);
}

/// Scanline fill of the even–odd interior of a set of closed polylines.
pub fn fill_even_odd(grid: &Grid, polys: &[&Polyline], mask: &mut [bool]) {
    let mut xs = Vec::new();
    for j in 0..grid.ny {
        let y = grid.origin.im + (j as f64 + 0.5) * grid.h;
        xs.clear();
        for p in polys {
            for (a, b) in p.segments() {
                if (a.im > y) != (b.im > y) {
                    xs.push(a.re + (y - a.im) / (b.im - a.im) * (b.re - a.re));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let i0 = ((pair[0] - grid.origin.re) / grid.h - 0.5).ceil().max(0.0) as usize;
            let i1 = ((pair[1] - grid.origin.re) / grid.h - 0.5).floor();
            if i1 < 0.0 {
                continue;
            }
            let i1 = (i1 as usize).min(grid.nx - 1);
            for i in i0..=i1 {
                mask[grid.idx(i, j)] = true;
            }
        }
    }
}

/// Mask of `S` itself: filled islands plus rasterised boundaries and arcs.
pub fn set_mask(grid: &Grid, set: &AdmissibleSet) -> Vec<bool> {
    let mut mask = vec![false; grid.len()];
    for isl in &set.islands {
        fill_island(grid, isl, &mut mask);
    }
    for p in set.polylines() {
        rasterize_polyline(grid, p, &mut mask);
    }
    mask
}

/// Exact Euclidean distance (in world units) from every cell centre to the
/// nearest marked cell centre.
pub fn distance_transform(grid: &Grid, mask: &[bool]) -> Vec<f64> {
    const INF: f64 = 1e30;
    let (nx, ny) = (grid.nx, grid.ny);
    let mut d2 = vec![INF; grid.len()];
    for (k, &m) in mask.iter().enumerate() {
        if m {
            d2[k] = 0.0;
        }
    }
    let mut f = vec![0.0; nx.max(ny)];
    let mut out = vec![0.0; nx.max(ny)];
    for i in 0..nx {
        for j in 0..ny {
            f[j] = d2[grid.idx(i, j)];
        }
        edt_1d(&f[..ny], &mut out[..ny]);
        for j in 0..ny {
            d2[grid.idx(i, j)] = out[j];
        }
    }
    for j in 0..ny {
        f[..nx].copy_from_slice(&d2[j * nx..(j + 1) * nx]);
        edt_1d(&f[..nx], &mut out[..nx]);
        d2[j * nx..(j + 1) * nx].copy_from_slice(&out[..nx]);
    }
    d2.into_iter().map(|v| v.sqrt() * grid.h).collect()
}

/// Lower envelope of parabolas (Felzenszwalb–Huttenlocher).
fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *dq = diff * diff + f[p];
    }
}

/// 4-connected component labels of the `true` cells; unlabelled cells get
/// `u32::MAX`.
pub fn label_components(grid: &Grid, mask: &[bool]) -> (Vec<u32>, usize) {
    let mut labels = vec![u32::MAX; grid.len()];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !mask[start] || labels[start] != u32::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            for n in grid.neighbors4(k) {
                if mask[n] && labels[n] == u32::MAX {
                    labels[n] = count;
                    queue.push_back(n);
                }
            }
        }
        count += 1;
    }
    (labels, count as usize)
}

/// Flood fill over `mask` from `seeds`; returns reached flags.
pub fn flood_fill(grid: &Grid, mask: &[bool], seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for s in seeds {
        if mask[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(k) = queue.pop_front() {
        for n in grid.neighbors4(k) {
            if mask[n] && !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Bounded component of `ℂ \ S` found on the raster.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementComponent {
    /// Deepest cell centre of the component.
    pub anchor: C64,
    /// Distance from the anchor to `S`.
    pub inradius: f64,
    pub cells: usize,
}

/// Bounded connected components of the complement of `S`, each with a
/// deepest interior point. Grid resolution is `cells` across the set.
pub fn bounded_complement_components(set: &AdmissibleSet, cells: usize) -> Vec<ComplementComponent> {
    let (lo, hi) = set.bounding_box();
    let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
    let grid = Grid::covering(lo, hi, 0.05 * extent, extent / cells as f64);
    let s = set_mask(&grid, set);
    let free: Vec<bool> = s.iter().map(|m| !m).collect();
    let (labels, n) = label_components(&grid, &free);
    let mut touches = vec![false; n];
    for k in 0..grid.len() {
        if labels[k] != u32::MAX && grid.on_border(k) {
            touches[labels[k] as usize] = true;
        }
    }
    let dist = distance_transform(&grid, &s);
    let mut best: Vec<(f64, usize, usize)> = vec![(-1.0, 0, 0); n];
    for k in 0..grid.len() {
        let l = labels[k];
        if l == u32::MAX || touches[l as usize] {
            continue;
        }
        let b = &mut best[l as usize];
        b.2 += 1;
        if dist[k] > b.0 {
            b.0 = dist[k];
            b.1 = k;
        }
    }
    best.into_iter()
        .enumerate()
        .filter(|(l, b)| !touches[*l] && b.2 > 0)
        .map(|(_, (d, k, cells))| {
            // Refine the anchor depth with the exact polygon distance.
            let anchor = grid.center_of(k);
            let exact = set.distance(anchor);
            ComplementComponent {
                anchor,
                inradius: if exact.is_finite() { exact } else { d },
                cells,
            }
        })
        .collect()
}

/// Resolution used when measuring holes for the feature size.
pub const FEATURE_RASTER: usize = 400;

/// Smallest inradius over bounded complementary components, if any.
pub fn min_complement_inradius(set: &AdmissibleSet) -> Option<f64> {
    bounded_complement_components(set, FEATURE_RASTER)
        .into_iter()
        .map(|c| c.inradius)
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(grid: &Grid, passable: &[bool], s: usize, target: Option<usize>) -> (Vec<f64>, Vec<usize>) {
    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut prev = vec![usize::MAX; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapItem(0.0, s));
    let diag = std::f64::consts::SQRT_2;
    while let Some(HeapItem(d, k)) = heap.pop() {
        if Some(k) == target {
            break;
        }
        if d > dist[k] {
            continue;
        }
        let (i, j) = grid.ij(k);
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b < 0 || a >= grid.nx as i64 || b >= grid.ny as i64 {
                    continue;
                }
                let n = grid.idx(a as usize, b as usize);
                if !passable[n] {
                    continue;
                }
                if di != 0 && dj != 0 {
                    // No corner cutting between two blocked cells.
                    let c1 = grid.idx(a as usize, j);
                    let c2 = grid.idx(i, b as usize);
                    if !passable[c1] && !passable[c2] {
                        continue;
                    }
                }
                let w = if di != 0 && dj != 0 { diag } else { 1.0 };
                let nd = d + w;
                if nd < dist[n] {
                    dist[n] = nd;
                    prev[n] = k;
                    heap.push(HeapItem(nd, n));
                }
            }
        }
    }
    (dist, prev)
}

fn trace(grid: &Grid, prev: &[usize], s: usize, t: usize, from: C64, to: C64) -> Vec<C64> {
    let mut cells = vec![t];
    let mut k = t;
    while k != s {
        k = prev[k];
        cells.push(k);
    }
    cells.reverse();
    let mut pts: Vec<C64> = cells.iter().map(|&k| grid.center_of(k)).collect();
    pts[0] = from;
    let last = pts.len() - 1;
    pts[last] = to;
    if pts.len() == 1 {
        pts.push(to);
    }
    pts
}

/// 8-connected Dijkstra shortest path over passable cells. Returns the
/// sequence of cell centres from `from` to `to`, with the exact endpoints
/// substituted at both ends.
pub fn shortest_path(grid: &Grid, passable: &[bool], from: C64, to: C64) -> Option<Vec<C64>> {
    let s = grid.cell_of(from)?;
    let t = grid.cell_of(to)?;
    if !passable[s] || !passable[t] {
        return None;
    }
    let (dist, prev) = dijkstra(grid, passable, s, Some(t));
    if !dist[t].is_finite() {
        return None;
    }
    Some(trace(grid, &prev, s, t, from, to))
}

/// All shortest paths from one source.
#[derive(Debug, Clone)]
pub struct PathTree {
    pub grid: Grid,
    source: usize,
    from: C64,
    dist: Vec<f64>,
    prev: Vec<usize>,
}

impl PathTree {
    pub fn build(grid: Grid, passable: &[bool], from: C64) -> Option<Self> {
        let s = grid.cell_of(from)?;
        if !passable[s] {
            return None;
        }
        let (dist, prev) = dijkstra(&grid, passable, s, None);
        Some(Self {
            grid,
            source: s,
            from,
            dist,
            prev,
        })
    }

    /// Path of cell centres from the source to `to`, exact at both ends.
    pub fn path_to(&self, to: C64) -> Option<Vec<C64>> {
        let t = self.grid.cell_of(to)?;
        if !self.dist[t].is_finite() {
            return None;
        }
        Some(trace(&self.grid, &self.prev, self.source, t, self.from, to))
    }
}

/// Ramer–Douglas–Peucker simplification with tolerance `tol`.
pub fn simplify_path(points: &[C64], tol: f64) -> Vec<C64> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((a, b)) = stack.pop() {
        let mut far = (0.0, a);
        for k in (a + 1)..b {
            let d = crate::geometry::point_segment_distance(points[k], points[a], points[b]);
            if d > far.0 {
                far = (d, k);
            }
        }
        if far.0 > tol {
            keep[far.1] = true;
            stack.push((a, far.1));
            stack.push((far.1, b));
        }
    }
    points.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}
