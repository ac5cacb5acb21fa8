//! Prestable ribbon graphs.
//!
//! Every vertex carries a ghost surface: genus defect `gamma`, boundary
//! defect `beta` (free boundary circles) and a partition of its flags into
//! cyclically ordered blocks, one per remaining boundary circle. Plain ribbon
//! graphs are the case `gamma = beta = 0` with one block per vertex.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::canon;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexData {
    pub gamma: u32,
    pub beta: u32,
    /// Cyclic blocks, each rotated to start at its smallest flag, sorted.
    pub blocks: Vec<Vec<usize>>,
}

impl VertexData {
    pub fn new(gamma: u32, beta: u32, blocks: Vec<Vec<usize>>) -> Self {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|b| {
                let Some(i) = b.iter().enumerate().min_by_key(|(_, &f)| f).map(|(i, _)| i) else { return b };
                let mut r = b[i..].to_vec();
                r.extend_from_slice(&b[..i]);
                r
            })
            .collect();
        blocks.sort();
        VertexData { gamma, beta, blocks }
    }

    pub fn valence(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Genus of the graph obtained by closing the ghost surface into a
    /// stable-graph vertex: `2 gamma + beta + |blocks| - 1`.
    pub fn ghost_genus(&self) -> i64 {
        2 * self.gamma as i64 + self.beta as i64 + self.blocks.len() as i64 - 1
    }

    /// Euler characteristic of the ghost surface.
    pub fn euler(&self) -> i64 {
        2 - 2 * self.gamma as i64 - self.beta as i64 - self.blocks.len() as i64
    }

    pub fn is_stable(&self) -> bool {
        self.beta as usize + self.blocks.len() >= 1 && 2 * (self.ghost_genus() - 1) + self.valence() as i64 > 0
    }

    pub fn is_plain(&self) -> bool {
        self.gamma == 0 && self.beta == 0 && self.blocks.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrestableGraph {
    sigma: Vec<usize>,
    verts: Vec<VertexData>,
    vertex_of: Vec<usize>,
    next: Vec<usize>,
    block_min: Vec<usize>,
}

/// Associative families, by the vertex predicate they impose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssFamily {
    /// plain ribbon vertices only
    Under,
    /// no free boundaries
    K,
    /// no restriction
    Bar,
    /// no genus defect
    R,
    /// neither
    KR,
}

impl AssFamily {
    pub const ALL: [AssFamily; 5] = [AssFamily::Under, AssFamily::K, AssFamily::Bar, AssFamily::R, AssFamily::KR];

    pub fn admits(self, d: &VertexData) -> bool {
        match self {
            AssFamily::Under => d.is_plain(),
            AssFamily::K => d.beta == 0,
            AssFamily::Bar => true,
            AssFamily::R => d.gamma == 0,
            AssFamily::KR => d.gamma == 0 && d.beta == 0,
        }
    }

    pub fn admits_graph(self, g: &PrestableGraph) -> bool {
        g.verts.iter().all(|d| self.admits(d))
    }

    pub fn name(self) -> &'static str {
        match self {
            AssFamily::Under => "ass-underline",
            AssFamily::K => "kass",
            AssFamily::Bar => "ass-bar",
            AssFamily::R => "rass",
            AssFamily::KR => "krass",
        }
    }
}

/// Classification flags of a prestable graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_ribbon: bool,
    pub is_stable_ribbon: bool,
    pub is_prestable: bool,
    pub positive_genus_defect_free: bool,
}

impl PrestableGraph {
    /// Builds and validates a legless prestable graph. `sigma` must be a
    /// fixed-point-free involution; the blocks of all vertices must
    /// partition the flags.
    pub fn new(sigma: Vec<usize>, verts: Vec<VertexData>) -> Result<Self> {
        let n = sigma.len();
        for h in 0..n {
            if sigma[h] >= n || sigma[sigma[h]] != h || sigma[h] == h {
                return Err(Error::InvalidInput(format!("sigma is not a fixed-point-free involution at {h}")));
            }
        }
        if verts.is_empty() {
            return Err(Error::InvalidInput("the empty graph is not allowed".into()));
        }
        let mut seen = vec![false; n];
        for d in &verts {
            for b in &d.blocks {
                if b.is_empty() {
                    return Err(Error::InvalidInput("blocks must be non-empty".into()));
                }
                for &f in b {
                    if f >= n || seen[f] {
                        return Err(Error::InvalidInput(format!("flag {f} missing or repeated in blocks")));
                    }
                    seen[f] = true;
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("blocks do not cover every flag".into()));
        }
        let verts: Vec<VertexData> = verts.into_iter().map(|d| VertexData::new(d.gamma, d.beta, d.blocks)).collect();
        for (v, d) in verts.iter().enumerate() {
            if !d.is_stable() {
                return Err(Error::InvalidInput(format!("vertex {v} is unstable")));
            }
        }
        let g = Self::from_parts_unchecked(sigma, verts);
        if !g.is_connected() {
            return Err(Error::InvalidInput("graph is not connected".into()));
        }
        Ok(g)
    }

    pub(crate) fn from_parts_unchecked(sigma: Vec<usize>, verts: Vec<VertexData>) -> Self {
        let n = sigma.len();
        let verts: Vec<VertexData> = verts.into_iter().map(|d| VertexData::new(d.gamma, d.beta, d.blocks)).collect();
        let mut vertex_of = vec![0; n];
        let mut next = vec![0; n];
        let mut block_min = vec![0; n];
        for (v, d) in verts.iter().enumerate() {
            for b in &d.blocks {
                let m = *b.iter().min().expect("non-empty");
                for (i, &f) in b.iter().enumerate() {
                    vertex_of[f] = v;
                    next[f] = b[(i + 1) % b.len()];
                    block_min[f] = m;
                }
            }
        }
        PrestableGraph { sigma, verts, vertex_of, next, block_min }
    }

    /// Plain ribbon graph from a vertex rotation list (cyclic flag orders).
    pub fn plain(sigma: Vec<usize>, rotations: Vec<Vec<usize>>) -> Result<Self> {
        let verts = rotations.into_iter().map(|r| VertexData::new(0, 0, vec![r])).collect();
        Self::new(sigma, verts)
    }

    pub fn n_flags(&self) -> usize {
        self.sigma.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn n_edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn sigma_vec(&self) -> &[usize] {
        &self.sigma
    }

    pub fn next(&self, h: usize) -> usize {
        self.next[h]
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    pub fn vertex(&self, v: usize) -> &VertexData {
        &self.verts[v]
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.verts
    }

    /// Smallest flag of the block containing `h`.
    pub fn block_min(&self, h: usize) -> usize {
        self.block_min[h]
    }

    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        let mut f: Vec<usize> = self.verts[v].blocks.iter().flatten().copied().collect();
        f.sort_unstable();
        f
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n_flags()).filter(|&h| h < self.sigma[h]).map(|h| (h, self.sigma[h])).collect()
    }

    pub fn is_loop(&self, h: usize) -> bool {
        self.vertex_of[h] == self.vertex_of[self.sigma[h]]
    }

    /// The block containing `h`, starting at `h`.
    pub fn block_from(&self, h: usize) -> Vec<usize> {
        let mut out = vec![h];
        let mut x = self.next[h];
        while x != h {
            out.push(x);
            x = self.next[x];
        }
        out
    }

    fn is_connected(&self) -> bool {
        let nv = self.n_vertices();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for f in self.flags_at(v) {
                let w = self.vertex_of[self.sigma[f]];
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Euler characteristic of the thickened surface.
    pub fn euler(&self) -> i64 {
        self.verts.iter().map(VertexData::euler).sum::<i64>() - self.n_edges() as i64
    }

    /// Genus of the stable graph underlying `self`:
    /// `|E| - |V| + 1 + sum ghost_genus`.
    pub fn total_genus(&self) -> i64 {
        self.n_edges() as i64 - self.n_vertices() as i64 + 1 + self.verts.iter().map(VertexData::ghost_genus).sum::<i64>()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "flags {} vertices {} | edges", self.n_flags(), self.n_vertices());
        for (h, k) in self.edges() {
            let _ = write!(out, " {h}-{k}");
        }
        out.push_str(" | vertices");
        for d in &self.verts {
            let _ = write!(out, " (g{} b{}", d.gamma, d.beta);
            for b in &d.blocks {
                let fl: Vec<String> = b.iter().map(|f| f.to_string()).collect();
                let _ = write!(out, " [{}]", fl.join(","));
            }
            out.push(')');
        }
        out
    }
}

/// Face cycles of the thickened graph and the boundary count `nu`.
///
/// From `h` the walk goes to `sigma(h)` and then to the successor of
/// `sigma(h)` in its block.
pub fn boundary_cycles(g: &PrestableGraph) -> (Vec<Vec<usize>>, usize) {
    let n = g.n_flags();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = s;
        while !seen[h] {
            seen[h] = true;
            cyc.push(h);
            h = g.next(g.sigma(h));
        }
        cycles.push(cyc);
    }
    let nu = cycles.len() + g.verts.iter().map(|d| d.beta as usize).sum::<usize>();
    (cycles, nu)
}

pub fn boundary_count(g: &PrestableGraph) -> usize {
    boundary_cycles(g).1
}

/// Genus of the thickened surface, `(2 - chi - nu) / 2`.
pub fn prestable_genus(g: &PrestableGraph) -> Result<u32> {
    let nu = boundary_count(g) as i64;
    let twice = 2 - g.euler() - nu;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Internal(format!("genus parity failure for {}", g.to_text())));
    }
    Ok((twice / 2) as u32)
}

pub fn classify(g: &PrestableGraph) -> Classification {
    Classification {
        is_ribbon: g.verts.iter().all(VertexData::is_plain),
        is_stable_ribbon: g.verts.iter().all(|d| d.beta == 0),
        is_prestable: g.verts.iter().all(VertexData::is_stable),
        positive_genus_defect_free: g.verts.iter().all(|d| d.gamma == 0),
    }
}

/// How the boundary circles at the contracted edge were re-spliced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splice {
    /// Distinct vertices merged; the two blocks through the edge became one
    /// circle, a block (flag of the new graph) or a new free boundary.
    Merge { merged: Circle },
    /// A loop inside one block split it into two circles: the arc after the
    /// tail flag, then the arc after its partner.
    Split { first: Circle, second: Circle },
    /// A loop joining two blocks of one vertex fused them (genus defect +1).
    Fuse { merged: Circle },
}

/// A boundary circle in the contracted graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Circle {
    Block(usize),
    Free(u32),
}

/// Result of contracting one edge, with the bookkeeping needed for signs.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: PrestableGraph,
    pub flag_map: Vec<Option<usize>>,
    pub vertex_map: Vec<usize>,
    /// free boundary `k` of old vertex `v` becomes `free_map[v][k]` of the
    /// image vertex
    pub free_map: Vec<Vec<u32>>,
    pub tail: usize,
    pub splice: Splice,
}

/// Contracts the edge `(tail, sigma(tail))`; the tail fixes which arc comes
/// first on a split.
pub fn contract_ribbon_edge_detailed(g: &PrestableGraph, tail: usize) -> Result<Contraction> {
    if tail >= g.n_flags() {
        return Err(Error::InvalidInput(format!("flag {tail} is not part of an edge")));
    }
    let h = tail;
    let k = g.sigma[h];
    let u0 = g.vertex_of[h];
    let w0 = g.vertex_of[k];
    let (u, w) = (u0.min(w0), u0.max(w0));
    let nf = g.n_flags();
    let mut fmap = vec![None; nf];
    let mut next_label = 0;
    for f in 0..nf {
        if f != h && f != k {
            fmap[f] = Some(next_label);
            next_label += 1;
        }
    }
    let vmap: Vec<usize> = (0..g.n_vertices())
        .map(|v| {
            let v = if v == w { u } else { v };
            if u != w && v > w {
                v - 1
            } else {
                v
            }
        })
        .collect();
    let mut free_map: Vec<Vec<u32>> = g.verts.iter().map(|d| (0..d.beta).collect()).collect();
    let bh = g.block_from(h);
    let bk = g.block_from(k);
    let relabel = |s: &[usize]| -> Vec<usize> { s.iter().map(|&f| fmap[f].expect("kept")).collect() };
    let mut new_verts: Vec<VertexData> = Vec::new();
    let splice;
    let merged_vertex: VertexData;
    if u0 != w0 {
        let du = &g.verts[u0];
        let dw = &g.verts[w0];
        let mut m: Vec<usize> = bh[1..].to_vec();
        m.extend_from_slice(&bk[1..]);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for b in du.blocks.iter().chain(dw.blocks.iter()) {
            if !b.contains(&h) && !b.contains(&k) {
                blocks.push(relabel(b));
            }
        }
        // free boundaries of the lower-numbered vertex keep their indices
        let (first, second) = if u0 == u { (du, dw) } else { (dw, du) };
        let mut beta = first.beta + second.beta;
        free_map[w] = (0..g.verts[w].beta).map(|x| x + first.beta).collect();
        let merged = if m.is_empty() {
            beta += 1;
            Circle::Free(beta - 1)
        } else {
            let r = relabel(&m);
            let c = Circle::Block(r[0]);
            blocks.push(r);
            c
        };
        let chi = du.euler() + dw.euler() - 1;
        let gamma = euler_gamma(chi, beta, blocks.len())?;
        merged_vertex = VertexData::new(gamma, beta, blocks);
        splice = Splice::Merge { merged };
    } else {
        let d = &g.verts[u0];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut beta = d.beta;
        let chi = d.euler() - 1;
        if g.block_min[h] == g.block_min[k] {
            let pos = bh.iter().position(|&f| f == k).expect("same block");
            let x: Vec<usize> = bh[1..pos].to_vec();
            let y: Vec<usize> = bh[pos + 1..].to_vec();
            for b in &d.blocks {
                if !b.contains(&h) {
                    blocks.push(relabel(b));
                }
            }
            let mut circle = |arc: &[usize], blocks: &mut Vec<Vec<usize>>| {
                if arc.is_empty() {
                    beta += 1;
                    Circle::Free(beta - 1)
                } else {
                    let r = relabel(arc);
                    let c = Circle::Block(r[0]);
                    blocks.push(r);
                    c
                }
            };
            let first = circle(&x, &mut blocks);
            let second = circle(&y, &mut blocks);
            splice = Splice::Split { first, second };
        } else {
            let mut m: Vec<usize> = bh[1..].to_vec();
            m.extend_from_slice(&bk[1..]);
            for b in &d.blocks {
                if !b.contains(&h) && !b.contains(&k) {
                    blocks.push(relabel(b));
                }
            }
            let merged = if m.is_empty() {
                beta += 1;
                Circle::Free(beta - 1)
            } else {
                let r = relabel(&m);
                let c = Circle::Block(r[0]);
                blocks.push(r);
                c
            };
            splice = Splice::Fuse { merged };
        }
        let gamma = euler_gamma(chi, beta, blocks.len())?;
        merged_vertex = VertexData::new(gamma, beta, blocks);
    }
    for (v, d) in g.verts.iter().enumerate() {
        if v == u {
            new_verts.push(merged_vertex.clone());
        } else if v != w {
            new_verts.push(VertexData::new(d.gamma, d.beta, d.blocks.iter().map(|b| relabel(b)).collect()));
        }
    }
    let mut sigma = vec![0; next_label];
    for f in 0..nf {
        if let Some(nf2) = fmap[f] {
            sigma[nf2] = fmap[g.sigma[f]].expect("kept");
        }
    }
    let graph = PrestableGraph::from_parts_unchecked(sigma, new_verts);
    Ok(Contraction { graph, flag_map: fmap, vertex_map: vmap, free_map, tail, splice })
}

fn euler_gamma(chi: i64, beta: u32, blocks: usize) -> Result<u32> {
    let twice = 2 - chi - beta as i64 - blocks as i64;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Internal("Euler bookkeeping produced a non-integral genus defect".into()));
    }
    Ok((twice / 2) as u32)
}

pub fn contract_ribbon_edge(g: &PrestableGraph, h: usize) -> Result<PrestableGraph> {
    Ok(contract_ribbon_edge_detailed(g, h)?.graph)
}

// ---------------------------------------------------------------------------
// enumeration by expansion

/// A cyclic sequence cut into two arcs `(x, y)`, `x` starting at every
/// position and of every length.
fn arc_cuts(m: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let l = m.len();
    let mut out = Vec::new();
    if l == 0 {
        out.push((Vec::new(), Vec::new()));
        return out;
    }
    for r in 0..l {
        let rot: Vec<usize> = m[r..].iter().chain(m[..r].iter()).copied().collect();
        for p in 0..=l {
            out.push((rot[..p].to_vec(), rot[p..].to_vec()));
        }
    }
    out
}

fn rotations(m: &[usize]) -> Vec<Vec<usize>> {
    if m.is_empty() {
        return vec![Vec::new()];
    }
    (0..m.len()).map(|r| m[r..].iter().chain(m[..r].iter()).copied().collect()).collect()
}

/// Boundary circles of a vertex: blocks, and at most one representative
/// free boundary (free boundaries are interchangeable).
fn circles_of(d: &VertexData) -> Vec<Option<usize>> {
    let mut out: Vec<Option<usize>> = (0..d.blocks.len()).map(Some).collect();
    if d.beta > 0 {
        out.push(None);
    }
    out
}

fn push_graph(sigma: &[usize], verts: Vec<VertexData>, out: &mut Vec<PrestableGraph>) {
    if verts.iter().all(VertexData::is_stable) {
        out.push(PrestableGraph::from_parts_unchecked(sigma.to_vec(), verts));
    }
}

/// Every prestable graph that contracts onto `g` along one edge.
pub fn expansions(g: &PrestableGraph) -> Vec<PrestableGraph> {
    let mut out = Vec::new();
    let nf = g.n_flags();
    let (a, b) = (nf, nf + 1);
    let mut sigma = g.sigma.clone();
    sigma.push(b);
    sigma.push(a);
    for v in 0..g.n_vertices() {
        let d = &g.verts[v];
        let others: Vec<VertexData> = g.verts.clone();
        let circles = circles_of(d);
        // split v into v and a new vertex joined by the edge a-b
        for &mc in &circles {
            let (m, beta_left) = match mc {
                Some(i) => (d.blocks[i].clone(), d.beta),
                None => (Vec::new(), d.beta - 1),
            };
            let rest: Vec<usize> = (0..d.blocks.len()).filter(|&i| Some(i) != mc).collect();
            for (x, y) in arc_cuts(&m) {
                for mask in 0u64..(1u64 << rest.len()) {
                    for beta1 in 0..=beta_left {
                        for gamma1 in 0..=d.gamma {
                            let mut b1 = vec![{
                                let mut t = vec![a];
                                t.extend_from_slice(&x);
                                t
                            }];
                            let mut b2 = vec![{
                                let mut t = vec![b];
                                t.extend_from_slice(&y);
                                t
                            }];
                            for (j, &i) in rest.iter().enumerate() {
                                if mask >> j & 1 == 1 {
                                    b2.push(d.blocks[i].clone());
                                } else {
                                    b1.push(d.blocks[i].clone());
                                }
                            }
                            let v1 = VertexData::new(gamma1, beta1, std::mem::take(&mut b1));
                            let v2 = VertexData::new(d.gamma - gamma1, beta_left - beta1, std::mem::take(&mut b2));
                            let mut verts = others.clone();
                            verts[v] = v1;
                            verts.push(v2);
                            push_graph(&sigma, verts, &mut out);
                        }
                    }
                }
            }
        }
        // loop joining two circles into one block (inverse of a split)
        for (i, &c1) in circles.iter().enumerate() {
            for (j, &c2) in circles.iter().enumerate() {
                if i == j && c1.is_some() {
                    continue;
                }
                if c1.is_none() && c2.is_none() && d.beta < 2 {
                    continue;
                }
                let arc = |c: Option<usize>| c.map(|k| d.blocks[k].clone()).unwrap_or_default();
                let used_free = u32::from(c1.is_none()) + u32::from(c2.is_none());
                for x in rotations(&arc(c1)) {
                    for y in rotations(&arc(c2)) {
                        let mut blk = vec![a];
                        blk.extend_from_slice(&x);
                        blk.push(b);
                        blk.extend_from_slice(&y);
                        let mut blocks: Vec<Vec<usize>> = (0..d.blocks.len())
                            .filter(|&k| Some(k) != c1 && Some(k) != c2)
                            .map(|k| d.blocks[k].clone())
                            .collect();
                        blocks.push(blk);
                        let mut verts = others.clone();
                        verts[v] = VertexData::new(d.gamma, d.beta - used_free, blocks);
                        push_graph(&sigma, verts, &mut out);
                    }
                }
            }
        }
        // loop splitting a circle into two blocks (inverse of a fuse)
        if d.gamma >= 1 {
            for &mc in &circles {
                let (m, beta) = match mc {
                    Some(i) => (d.blocks[i].clone(), d.beta),
                    None => (Vec::new(), d.beta - 1),
                };
                for (x, y) in arc_cuts(&m) {
                    let mut blocks: Vec<Vec<usize>> =
                        (0..d.blocks.len()).filter(|&k| Some(k) != mc).map(|k| d.blocks[k].clone()).collect();
                    let mut b1 = vec![a];
                    b1.extend(x);
                    let mut b2 = vec![b];
                    b2.extend(y);
                    blocks.push(b1);
                    blocks.push(b2);
                    let mut verts = others.clone();
                    verts[v] = VertexData::new(d.gamma - 1, beta, blocks);
                    push_graph(&sigma, verts, &mut out);
                }
            }
        }
    }
    out
}

/// The single vertex with no flags, genus defect `gamma` and `nu` free
/// boundaries, when it is stable.
pub fn vacuum_vertex(gamma: u32, nu: u32) -> Option<PrestableGraph> {
    let d = VertexData::new(gamma, nu, Vec::new());
    d.is_stable().then(|| PrestableGraph::from_parts_unchecked(Vec::new(), vec![d]))
}

/// Canonical prestable graphs of genus `gamma` with `nu` boundaries, by
/// edge count up to `max_edges`, restricted to `family`.
pub fn enumerate_prestable_upto(gamma: u32, nu: u32, max_edges: usize, family: AssFamily) -> Vec<Vec<PrestableGraph>> {
    let mut levels: Vec<Vec<PrestableGraph>> = Vec::new();
    match vacuum_vertex(gamma, nu) {
        None => return vec![Vec::new(); max_edges + 1],
        Some(g0) => levels.push(vec![canon::ribbon_canonical(&g0).graph]),
    }
    for _ in 1..=max_edges {
        let prev = levels.last().expect("level");
        let mut seen = BTreeSet::new();
        for g in prev {
            for c in expansions(g) {
                seen.insert(canon::ribbon_canonical(&c).graph);
            }
        }
        levels.push(seen.into_iter().collect());
    }
    for lvl in levels.iter_mut() {
        lvl.retain(|g| family.admits_graph(g));
    }
    levels
}

pub fn enumerate_prestable(gamma: u32, nu: u32, edge_count: usize, family: AssFamily) -> Vec<PrestableGraph> {
    enumerate_prestable_upto(gamma, nu, edge_count, family).pop().unwrap_or_default()
}
