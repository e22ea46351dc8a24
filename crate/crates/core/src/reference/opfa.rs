//! "Optimal" proximity-force estimate for facing gratings.
//!
//! Every vacuum point `r` between the bodies contributes
//! `-(pi^2/720) / l(r)^4`, where `l(r)` is the length of the shortest path
//! from one body to the other through `r`, i.e. the sum of the geodesic
//! distances from `r` to each body through vacuum. The geometry is
//! independent of `y`, so the integral reduces to the `(x, z)` cross-section
//! times `N_y`.
//!
//! Distances are first obtained by Dijkstra relaxation on the refined grid
//! (8-neighbour stencil), then replaced by the exact polygonal geodesic:
//! a shortest path through vacuum is straight except where it wraps around
//! a convex tooth corner, so the minimum over straight visible segments to
//! the surface and over visible corners (with exact corner distances from a
//! small visibility graph) is exact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{grating_tip_gap, GratingSpec};
use crate::lattice::{LatticeShape, X, Y};

use super::plates::CASIMIR_PLATE_CONSTANT;
use super::{AnalyticResult, Provenance};

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    x1: f64,
    z0: f64,
    z1: f64,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: (f64, f64),
    b: (f64, f64),
}

impl Segment {
    fn closest(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dz) = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len2 = dx * dx + dz * dz;
        if len2 == 0.0 {
            return self.a;
        }
        let t = (((p.0 - self.a.0) * dx + (p.1 - self.a.1) * dz) / len2).clamp(0.0, 1.0);
        (self.a.0 + t * dx, self.a.1 + t * dz)
    }
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Whether the open segment `p -> q` crosses the interior of `r`.
fn crosses(r: &Rect, p: (f64, f64), q: (f64, f64)) -> bool {
    const TOL: f64 = 1e-9;
    let (x0, x1, z0, z1) = (r.x0 + TOL, r.x1 - TOL, r.z0 + TOL, r.z1 - TOL);
    if x0 >= x1 || z0 >= z1 {
        return false;
    }
    let (dx, dz) = (q.0 - p.0, q.1 - p.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (pc, dc, lo, hi) in [(p.0, dx, x0, x1), (p.1, dz, z0, z1)] {
        if dc == 0.0 {
            if pc <= lo || pc >= hi {
                return false;
            }
        } else {
            let (mut a, mut b) = ((lo - pc) / dc, (hi - pc) / dc);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 >= t1 {
                return false;
            }
        }
    }
    true
}

/// The cross-section of one grating pair in physical units of `a`: the bottom
/// base plane at `z = 0`, the top base plane at `z = height`.
struct Scene2d {
    height: f64,
    teeth: Vec<Rect>,
    /// Body (0 bottom, 1 top) owning each tooth.
    owner: Vec<usize>,
    /// Surface segments of the bottom (0) and top (1) bodies.
    faces: [Vec<Segment>; 2],
    corners: Vec<(f64, f64)>,
}

impl Scene2d {
    fn new(bottom: &GratingSpec, top: &GratingSpec, nx: usize, alpha: f64, gap: i64) -> Self {
        let width = nx as f64;
        let hb = bottom.tooth_height as f64 * alpha;
        let ht = top.tooth_height as f64 * alpha;
        let height = hb + ht + gap as f64 * alpha;
        let mut teeth = Vec::new();
        let mut owner = Vec::new();
        let mut faces: [Vec<Segment>; 2] = [Vec::new(), Vec::new()];
        let mut corners = Vec::new();
        for (side, g) in [bottom, top].into_iter().enumerate() {
            let (base, tip) = if side == 0 { (0.0, hb) } else { (height, height - ht) };
            let starts: Vec<f64> = g.tooth_starts(nx).iter().map(|&s| s as f64).collect();
            let (l1, p) = (g.tooth_width as f64, g.period() as f64);
            for image in [-width, 0.0, width] {
                for &s in &starts {
                    let x0 = s + image;
                    let x1 = x0 + l1;
                    if g.tooth_height > 0 {
                        teeth.push(Rect {
                            x0,
                            x1,
                            z0: base.min(tip),
                            z1: base.max(tip),
                        });
                        owner.push(side);
                        corners.push((x0, tip));
                        corners.push((x1, tip));
                        faces[side].push(Segment { a: (x0, base), b: (x0, tip) });
                        faces[side].push(Segment { a: (x1, base), b: (x1, tip) });
                    }
                    faces[side].push(Segment { a: (x0, tip), b: (x1, tip) });
                    faces[side].push(Segment { a: (x1, base), b: (x0 + p, base) });
                }
            }
        }
        Self {
            height,
            teeth,
            owner,
            faces,
            corners,
        }
    }

    /// The body whose interior contains `p`, if any.
    fn body_at(&self, p: (f64, f64)) -> Option<usize> {
        if p.1 <= 0.0 {
            return Some(0);
        }
        if p.1 >= self.height {
            return Some(1);
        }
        self.teeth
            .iter()
            .position(|r| p.0 > r.x0 && p.0 < r.x1 && p.1 > r.z0 && p.1 < r.z1)
            .map(|i| self.owner[i])
    }

    fn visible(&self, p: (f64, f64), q: (f64, f64)) -> bool {
        !self.teeth.iter().any(|r| crosses(r, p, q))
    }

    /// Shortest straight visible segment from `p` to body `side`.
    fn direct(&self, p: (f64, f64), side: usize) -> f64 {
        let mut best = f64::INFINITY;
        for f in &self.faces[side] {
            let q = f.closest(p);
            let d = dist(p, q);
            if d < best && self.visible(p, q) {
                best = d;
            }
        }
        best
    }

    /// Exact geodesic distance of every corner to body `side`.
    fn corner_distances(&self, side: usize) -> Vec<f64> {
        let n = self.corners.len();
        let mut d: Vec<f64> = self.corners.iter().map(|&c| self.direct(c, side)).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.visible(self.corners[i], self.corners[j]) {
                    edges.push((i, j, dist(self.corners[i], self.corners[j])));
                }
            }
        }
        // Bellman-Ford; the graph is tiny.
        for _ in 0..n {
            let mut changed = false;
            for &(i, j, w) in &edges {
                if d[j] + w < d[i] {
                    d[i] = d[j] + w;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    fn exact(&self, p: (f64, f64), side: usize, corner_d: &[f64]) -> f64 {
        let mut best = self.direct(p, side);
        for (c, &dc) in self.corners.iter().zip(corner_d) {
            let total = dist(p, *c) + dc;
            if total < best && self.visible(p, *c) {
                best = total;
            }
        }
        best
    }
}

/// Refined `(x, z)` cross-section with geodesic distances to both bodies.
#[derive(Clone, Debug)]
pub struct GeodesicGrid {
    pub refinement: usize,
    pub nx: usize,
    pub nz: usize,
    /// Cell sizes in units of `a`.
    pub hx: f64,
    pub hz: f64,
    /// Row-major in z: index `j * nx + i`.
    pub vacuum: Vec<bool>,
    pub d_bottom: Vec<f64>,
    pub d_top: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct Node(f64, usize);
impl Eq for Node {}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(self.1.cmp(&other.1))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GeodesicGrid {
    pub fn build(
        bottom: &GratingSpec,
        top: &GratingSpec,
        shape: &LatticeShape,
        alpha: f64,
        refinement: usize,
    ) -> Result<Self> {
        if refinement < 1 {
            return Err(Error::Reference("refinement must be >= 1".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::Reference(format!("alpha must be positive, got {alpha}")));
        }
        bottom.validate(shape)?;
        top.validate(shape)?;
        let gap = grating_tip_gap(bottom, top, shape)?;
        if gap < 1 {
            return Err(Error::Reference(format!(
                "no vacuum path between the gratings: tip separation {gap}"
            )));
        }
        let scene = Scene2d::new(bottom, top, shape.extent(X), alpha, gap);
        let m = refinement;
        let nx = shape.extent(X) * m;
        let z_steps = bottom.tooth_height + top.tooth_height + gap as usize;
        let nz = z_steps * m;
        let (hx, hz) = (1.0 / m as f64, alpha / m as f64);
        let centre = |k: usize| (((k % nx) as f64 + 0.5) * hx, ((k / nx) as f64 + 0.5) * hz);
        let vacuum: Vec<bool> = (0..nx * nz).map(|k| scene.body_at(centre(k)).is_none()).collect();

        let mut out = [Vec::new(), Vec::new()];
        for side in 0..2 {
            let mut d = relax(&vacuum, nx, nz, hx, hz, |k| {
                // Seed cells next to the body with their distance to it.
                let (i, j) = (k % nx, k / nx);
                let z = centre(k).1;
                let mut seed = f64::INFINITY;
                if side == 0 && j == 0 {
                    seed = z;
                }
                if side == 1 && j == nz - 1 {
                    seed = scene.height - z;
                }
                let neighbours = [
                    (i as i64 - 1, j as i64, hx / 2.0),
                    (i as i64 + 1, j as i64, hx / 2.0),
                    (i as i64, j as i64 - 1, hz / 2.0),
                    (i as i64, j as i64 + 1, hz / 2.0),
                ];
                for (ni, nj, h) in neighbours {
                    if nj < 0 || nj >= nz as i64 {
                        continue;
                    }
                    let nk = nj as usize * nx + ni.rem_euclid(nx as i64) as usize;
                    if scene.body_at(centre(nk)) == Some(side) {
                        seed = seed.min(h);
                    }
                }
                seed
            });
            // Corner-exact correction.
            let corner_d = scene.corner_distances(side);
            for (k, dk) in d.iter_mut().enumerate() {
                if vacuum[k] {
                    *dk = dk.min(scene.exact(centre(k), side, &corner_d));
                }
            }
            out[side] = d;
        }
        let [d_bottom, d_top] = out;
        if vacuum.iter().zip(d_bottom.iter().zip(&d_top)).any(|(&v, (a, b))| v && !(a.is_finite() && b.is_finite())) {
            return Err(Error::Reference("vacuum cell unreachable from a body".into()));
        }
        Ok(Self {
            refinement,
            nx,
            nz,
            hx,
            hz,
            vacuum,
            d_bottom,
            d_top,
        })
    }

    /// Shortest body-to-body path length through the centre of cell `k`.
    pub fn path_length(&self, k: usize) -> f64 {
        self.d_bottom[k] + self.d_top[k]
    }

    /// `-(pi^2/720) sum_cells area / l^4`, per unit length in y.
    pub fn energy_per_length(&self) -> f64 {
        let area = self.hx * self.hz;
        -CASIMIR_PLATE_CONSTANT
            * (0..self.vacuum.len())
                .filter(|&k| self.vacuum[k])
                .map(|k| area / self.path_length(k).powi(4))
                .sum::<f64>()
    }
}

/// Multi-source Dijkstra on the 8-neighbour grid, periodic in x.
fn relax(vacuum: &[bool], nx: usize, nz: usize, hx: f64, hz: f64, seed: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; nx * nz];
    let mut heap = BinaryHeap::new();
    for k in 0..nx * nz {
        if vacuum[k] {
            let s = seed(k);
            if s.is_finite() {
                d[k] = s;
                heap.push(Node(s, k));
            }
        }
    }
    let diag = hx.hypot(hz);
    while let Some(Node(dk, k)) = heap.pop() {
        if dk > d[k] {
            continue;
        }
        let (i, j) = ((k % nx) as i64, (k / nx) as i64);
        for (di, dj, w) in [
            (1, 0, hx),
            (-1, 0, hx),
            (0, 1, hz),
            (0, -1, hz),
            (1, 1, diag),
            (1, -1, diag),
            (-1, 1, diag),
            (-1, -1, diag),
        ] {
            let nj = j + dj;
            if nj < 0 || nj >= nz as i64 {
                continue;
            }
            let nk = nj as usize * nx + (i + di).rem_euclid(nx as i64) as usize;
            // Diagonal steps may not cut a conductor corner.
            if di != 0 && dj != 0 {
                let side_a = j as usize * nx + (i + di).rem_euclid(nx as i64) as usize;
                let side_b = nj as usize * nx + i as usize;
                if !vacuum[side_a] || !vacuum[side_b] {
                    continue;
                }
            }
            if vacuum[nk] && dk + w < d[nk] {
                d[nk] = dk + w;
                heap.push(Node(dk + w, nk));
            }
        }
    }
    d
}

/// Optimal-PFA energy in `1/a` (negative: attractive), with the change from
/// half the refinement (or double, at `m = 1`) as convergence estimate.
pub fn opfa_gratings(
    bottom: &GratingSpec,
    top: &GratingSpec,
    shape: &LatticeShape,
    alpha: f64,
    refinement: usize,
) -> Result<AnalyticResult> {
    let ny = shape.extent(Y) as f64;
    let at = |m| GeodesicGrid::build(bottom, top, shape, alpha, m).map(|g| g.energy_per_length() * ny);
    let value = at(refinement)?;
    let other = if refinement >= 2 { at(refinement / 2)? } else { at(2)? };
    Ok(AnalyticResult {
        value,
        provenance: Provenance::Quadrature,
        refinement,
        convergence: (value - other).abs(),
    })
}
