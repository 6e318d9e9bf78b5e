//! Deterministic two-dimensional graph layouts.
//!
//! Initial placements are uniform points in the unit square drawn from a
//! ChaCha8 generator seeded with the caller's seed; forces are accumulated
//! single-threaded in node order, so a seed fixes the whole trajectory.
//! Final coordinates are normalized into the unit square with a uniform
//! scale, centered along the shorter side.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_SEED: u64 = 42;
/// Distance below which two nodes are treated as coincident.
pub const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutAlgorithm {
    FruchtermanReingold,
    KamadaKawai,
    Packed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Normalized positions, one per node.
    pub positions: Vec<[f64; 2]>,
    pub algorithm: LayoutAlgorithm,
    pub seed: u64,
    pub iterations: usize,
}

/// Positions before normalization, in the algorithm's own units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLayout {
    pub positions: Vec<[f64; 2]>,
    /// FR: ideal distance κ. KK: length of one graph-theoretic hop.
    pub scale: f64,
    pub iterations: usize,
    pub converged: bool,
    /// KK: total stress at the start and after each node move.
    pub stress_trace: Vec<f64>,
}

/// Scales positions uniformly into `[0,1]²`, centering the shorter side.
/// A single point (or all-coincident points) lands at `(0.5, 0.5)`.
pub fn normalize(positions: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if positions.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in positions {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let extent = [hi[0] - lo[0], hi[1] - lo[1]];
    let span = extent[0].max(extent[1]);
    if span <= 0.0 {
        return vec![[0.5, 0.5]; positions.len()];
    }
    let offset = [(1.0 - extent[0] / span) / 2.0, (1.0 - extent[1] / span) / 2.0];
    positions
        .iter()
        .map(|p| {
            let mut q = [0.0; 2];
            for d in 0..2 {
                q[d] = ((p[d] - lo[d]) / span + offset[d]).clamp(0.0, 1.0);
            }
            q
        })
        .collect()
}

fn random_placement(n: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Scale attraction along an edge by its weight.
    pub use_weights: bool,
}

impl Default for FrOptions {
    fn default() -> Self {
        FrOptions {
            iterations: 500,
            seed: DEFAULT_SEED,
            use_weights: false,
        }
    }
}

/// Fruchterman–Reingold simulation in a unit-area frame: repulsion κ²/d
/// between all pairs, attraction d²/κ along edges, displacement capped by a
/// temperature cooling linearly from 0.1·√area to zero.
pub fn fruchterman_reingold_raw(g: &Graph, opts: FrOptions) -> RawLayout {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pos = random_placement(n, &mut rng);
    let area = 1.0f64;
    let kappa = (area / n.max(1) as f64).sqrt();
    let t0 = 0.1 * area.sqrt();
    let max_weight = g.edges().iter().map(|e| e.weight.abs()).fold(0.0, f64::max);

    let mut disp = vec![[0.0f64; 2]; n];
    for it in 0..opts.iterations {
        let temperature = t0 * (1.0 - it as f64 / opts.iterations as f64);
        disp.iter_mut().for_each(|d| *d = [0.0; 2]);
        for v in 0..n {
            for u in v + 1..n {
                let (delta, dist) = separation(&pos[v], &pos[u], &mut rng);
                let f = kappa * kappa / dist;
                for d in 0..2 {
                    let push = delta[d] / dist * f;
                    disp[v][d] += push;
                    disp[u][d] -= push;
                }
            }
        }
        for e in g.edges() {
            let (delta, dist) = separation(&pos[e.source], &pos[e.target], &mut rng);
            let mut f = dist * dist / kappa;
            if opts.use_weights && max_weight > 0.0 {
                f *= e.weight.abs() / max_weight;
            }
            for d in 0..2 {
                let pull = delta[d] / dist * f;
                disp[e.source][d] -= pull;
                disp[e.target][d] += pull;
            }
        }
        for v in 0..n {
            let len = (disp[v][0] * disp[v][0] + disp[v][1] * disp[v][1]).sqrt();
            if len > 0.0 {
                let step = len.min(temperature);
                for d in 0..2 {
                    pos[v][d] += disp[v][d] / len * step;
                }
            }
        }
    }
    RawLayout {
        positions: pos,
        scale: kappa,
        iterations: opts.iterations,
        converged: true,
        stress_trace: Vec::new(),
    }
}

/// Vector from `b` to `a` and its length, jittered by a random unit vector
/// of length `MIN_DISTANCE` when the points coincide.
fn separation(a: &[f64; 2], b: &[f64; 2], rng: &mut ChaCha8Rng) -> ([f64; 2], f64) {
    let delta = [a[0] - b[0], a[1] - b[1]];
    let dist = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
    if dist >= MIN_DISTANCE {
        return (delta, dist);
    }
    let angle = rng.gen::<f64>() * std::f64::consts::TAU;
    ([angle.cos() * MIN_DISTANCE, angle.sin() * MIN_DISTANCE], MIN_DISTANCE)
}

pub fn fruchterman_reingold(g: &Graph, opts: FrOptions) -> Layout {
    let raw = fruchterman_reingold_raw(g, opts);
    Layout {
        positions: normalize(&raw.positions),
        algorithm: LayoutAlgorithm::FruchtermanReingold,
        seed: opts.seed,
        iterations: raw.iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KkOptions {
    /// Stop when the largest per-node gradient norm drops below this.
    pub tol: f64,
    /// Maximum number of node selections.
    pub max_iter: usize,
    pub seed: u64,
    /// Display length of one hop; `None` uses `1 / diameter`.
    pub edge_length: Option<f64>,
}

impl Default for KkOptions {
    fn default() -> Self {
        KkOptions {
            tol: 1e-6,
            max_iter: 1000,
            seed: DEFAULT_SEED,
            edge_length: None,
        }
    }
}

/// All-pairs hop distances; `None` if the graph is disconnected.
pub fn hop_distances(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let adj = g.adjacency();
    let n = g.node_count();
    let mut all = Vec::with_capacity(n);
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return None;
        }
        all.push(dist);
    }
    Some(all)
}

/// Stress `Σ_{a<b} (‖p_a − p_b‖ − L·d_ab)² / d_ab²`.
pub fn stress(positions: &[[f64; 2]], hops: &[Vec<usize>], edge_length: f64) -> f64 {
    let n = positions.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let d = hops[a][b] as f64;
            let gap = euclid(&positions[a], &positions[b]) - edge_length * d;
            s += gap * gap / (d * d);
        }
    }
    s
}

fn euclid(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

struct Stress<'a> {
    hops: &'a [Vec<usize>],
    length: f64,
}

impl Stress<'_> {
    /// Stress terms involving node `m` at position `p`.
    fn local(&self, pos: &[[f64; 2]], m: usize, p: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for (j, q) in pos.iter().enumerate() {
            if j != m {
                let d = self.hops[m][j] as f64;
                let gap = euclid(&p, q) - self.length * d;
                s += gap * gap / (d * d);
            }
        }
        s
    }

    /// Gradient and Hessian of the local stress with respect to `p`.
    fn derivatives(&self, pos: &[[f64; 2]], m: usize, p: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        for (j, q) in pos.iter().enumerate() {
            if j == m {
                continue;
            }
            let d = self.hops[m][j] as f64;
            let k = 2.0 / (d * d);
            let l = self.length * d;
            let dx = [p[0] - q[0], p[1] - q[1]];
            let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt().max(MIN_DISTANCE);
            let r3 = r * r * r;
            for a in 0..2 {
                g[a] += k * (dx[a] - l * dx[a] / r);
                for b in 0..2 {
                    let eye = if a == b { 1.0 } else { 0.0 };
                    h[a][b] += k * (eye - l * (eye * r * r - dx[a] * dx[b]) / r3);
                }
            }
        }
        (g, h)
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Kamada–Kawai on a connected graph: repeatedly pick the node with the
/// largest stress gradient and move it by damped Newton steps. Steps are
/// only accepted when they do not increase the stress.
pub fn kamada_kawai_raw(g: &Graph, opts: KkOptions) -> Result<RawLayout> {
    let n = g.node_count();
    if n == 0 {
        return Ok(RawLayout {
            positions: Vec::new(),
            scale: 1.0,
            iterations: 0,
            converged: true,
            stress_trace: Vec::new(),
        });
    }
    let hops = hop_distances(g).ok_or(Error::Disconnected)?;
    let diameter = hops.iter().flatten().copied().max().unwrap_or(0).max(1);
    let length = opts.edge_length.unwrap_or(1.0 / diameter as f64);
    let model = Stress { hops: &hops, length };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pos = random_placement(n, &mut rng);
    let mut stress_trace = vec![stress(&pos, &hops, length)];

    const INNER_STEPS: usize = 100;
    let mut iterations = 0;
    let mut converged = n == 1;
    while iterations < opts.max_iter && !converged {
        let grads: Vec<f64> = (0..n).map(|m| norm2(model.derivatives(&pos, m, pos[m]).0)).collect();
        let (m, worst) = grads
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        if worst < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut moved = false;
        for _ in 0..INNER_STEPS {
            let (grad, hess) = model.derivatives(&pos, m, pos[m]);
            if norm2(grad) < opts.tol {
                break;
            }
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
            let mut step = if det > 0.0 && hess[0][0] > 0.0 {
                [
                    -(hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det,
                    -(hess[0][0] * grad[1] - hess[1][0] * grad[0]) / det,
                ]
            } else {
                [-grad[0], -grad[1]]
            };
            if step[0] * grad[0] + step[1] * grad[1] >= 0.0 {
                step = [-grad[0], -grad[1]];
            }
            let before = model.local(&pos, m, pos[m]);
            let mut accepted = false;
            let mut alpha = 1.0;
            for _ in 0..40 {
                let trial = [pos[m][0] + alpha * step[0], pos[m][1] + alpha * step[1]];
                if model.local(&pos, m, trial) <= before {
                    pos[m] = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            moved = true;
        }
        if !moved {
            break;
        }
        stress_trace.push(stress(&pos, &hops, length));
    }
    Ok(RawLayout {
        positions: pos,
        scale: length,
        iterations,
        converged,
        stress_trace,
    })
}

pub fn kamada_kawai(g: &Graph, opts: KkOptions) -> Result<Layout> {
    let raw = kamada_kawai_raw(g, opts)?;
    Ok(Layout {
        positions: normalize(&raw.positions),
        algorithm: LayoutAlgorithm::KamadaKawai,
        seed: opts.seed,
        iterations: raw.iterations,
    })
}

/// Fraction of the largest box side left between packed boxes.
pub const GUTTER: f64 = 0.05;

/// Lays out each connected component with `layout_fn(component, seed +
/// index)`, packs components left to right by descending size (ties by
/// first node) with 5% gutters, puts isolated nodes in a trailing row
/// underneath, and renormalizes. A connected graph is laid out directly.
pub fn split_and_pack<F>(g: &Graph, seed: u64, layout_fn: F) -> Result<Layout>
where
    F: Fn(&Graph, u64) -> Result<Layout> + Sync,
{
    let components = g.connected_components();
    if components.len() <= 1 && g.node_count() > 1 {
        return layout_fn(g, seed);
    }
    let (mut groups, isolates): (Vec<Vec<usize>>, Vec<Vec<usize>>) =
        components.into_iter().partition(|c| c.len() > 1);
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let laid: Vec<Layout> = groups
        .par_iter()
        .enumerate()
        .map(|(i, members)| layout_fn(&g.induced(members), seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;

    let mut raw = vec![[0.0f64; 2]; g.node_count()];
    let side = |count: usize| (count as f64).sqrt();
    let largest = groups.first().map_or(1.0, |c| side(c.len()));
    let gutter = GUTTER * largest;
    let mut x = 0.0;
    let mut row_height: f64 = 0.0;
    for (members, layout) in groups.iter().zip(&laid) {
        let s = side(members.len());
        let (lo, hi) = bounds(&layout.positions);
        for (&node, p) in members.iter().zip(&layout.positions) {
            raw[node] = [x + (p[0] - lo[0]) * s, (p[1] - lo[1]) * s];
        }
        x += (hi[0] - lo[0]) * s + gutter;
        row_height = row_height.max((hi[1] - lo[1]) * s);
    }
    if !isolates.is_empty() {
        let y = if groups.is_empty() { 0.0 } else { row_height + gutter };
        let width = if groups.is_empty() { 0.0 } else { (x - gutter).max(0.0) };
        let count = isolates.len();
        for (i, c) in isolates.iter().enumerate() {
            let xi = if count == 1 || width == 0.0 {
                i as f64 * (1.0 + gutter)
            } else {
                width * i as f64 / (count - 1) as f64
            };
            raw[c[0]] = [xi, y];
        }
    }
    Ok(Layout {
        positions: normalize(&raw),
        algorithm: laid.first().map_or(LayoutAlgorithm::Packed, |l| l.algorithm),
        seed,
        iterations: laid.iter().map(|l| l.iterations).max().unwrap_or(0),
    })
}

fn bounds(positions: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in positions {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (lo, hi)
}
