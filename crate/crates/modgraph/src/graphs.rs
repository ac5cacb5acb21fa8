//! Half-edge graphs and stable commutative graphs.
//!
//! A graph is a set of flags `0..n`, a map from flags to vertices and an
//! involution `sigma`. Two-cycles of `sigma` are edges, fixed points are legs.
//! Vertex genus labels stand in for dotted loops; no flags are spent on them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::canon;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdgeGraph {
    sigma: Vec<usize>,
    vertex_of: Vec<usize>,
    n_vertices: usize,
    legs: Vec<Option<u32>>,
}

impl HalfEdgeGraph {
    /// `legs[h]` must be `Some(label)` exactly when `sigma[h] == h`.
    pub fn new(sigma: Vec<usize>, vertex_of: Vec<usize>, n_vertices: usize, legs: Vec<Option<u32>>) -> Result<Self> {
        let n = sigma.len();
        if vertex_of.len() != n || legs.len() != n {
            return Err(Error::InvalidInput("flag arrays have different lengths".into()));
        }
        if n_vertices == 0 {
            return Err(Error::InvalidInput("the empty graph is not allowed".into()));
        }
        for h in 0..n {
            if sigma[h] >= n || sigma[sigma[h]] != h {
                return Err(Error::InvalidInput(format!("sigma is not an involution at flag {h}")));
            }
            if vertex_of[h] >= n_vertices {
                return Err(Error::InvalidInput(format!("flag {h} points to a missing vertex")));
            }
            if (sigma[h] == h) != legs[h].is_some() {
                return Err(Error::InvalidInput(format!("flag {h}: leg labels must sit exactly on fixed points")));
            }
        }
        let mut labels: Vec<u32> = legs.iter().flatten().copied().collect();
        labels.sort_unstable();
        for (i, l) in labels.iter().enumerate() {
            if *l as usize != i + 1 {
                return Err(Error::InvalidInput("leg labels must be a bijection onto 1..n".into()));
            }
        }
        let g = HalfEdgeGraph { sigma, vertex_of, n_vertices, legs };
        if !g.is_connected() {
            return Err(Error::InvalidInput("graph is not connected".into()));
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked(sigma: Vec<usize>, vertex_of: Vec<usize>, n_vertices: usize, legs: Vec<Option<u32>>) -> Self {
        HalfEdgeGraph { sigma, vertex_of, n_vertices, legs }
    }

    pub fn n_flags(&self) -> usize {
        self.sigma.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn sigma_vec(&self) -> &[usize] {
        &self.sigma
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    pub fn vertex_vec(&self) -> &[usize] {
        &self.vertex_of
    }

    pub fn leg_label(&self, h: usize) -> Option<u32> {
        self.legs[h]
    }

    pub fn leg_vec(&self) -> &[Option<u32>] {
        &self.legs
    }

    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.n_flags()).filter(|&h| self.vertex_of[h] == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertex_of.iter().filter(|&&w| w == v).count()
    }

    /// Edges as flag pairs `(h, sigma(h))` with `h < sigma(h)`, ordered by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n_flags()).filter(|&h| h < self.sigma[h]).map(|h| (h, self.sigma[h])).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Legs as `(label, flag)`, ordered by label.
    pub fn legs(&self) -> Vec<(u32, usize)> {
        let mut v: Vec<(u32, usize)> = (0..self.n_flags()).filter_map(|h| self.legs[h].map(|l| (l, h))).collect();
        v.sort_unstable();
        v
    }

    pub fn n_legs(&self) -> usize {
        self.legs.iter().filter(|l| l.is_some()).count()
    }

    pub fn is_edge(&self, h: usize, k: usize) -> bool {
        h < self.n_flags() && k < self.n_flags() && h != k && self.sigma[h] == k
    }

    pub fn is_loop(&self, h: usize) -> bool {
        self.sigma[h] != h && self.vertex_of[h] == self.vertex_of[self.sigma[h]]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for (h, k) in self.edges() {
            let a = find(&mut parent, self.vertex_of[h]);
            let b = find(&mut parent, self.vertex_of[k]);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Removes an edge and, for a non-loop, merges its endpoints into the
    /// lower-numbered vertex. Returns the new graph, the flag map and the
    /// vertex map (old index to new index).
    pub(crate) fn contract_raw(&self, h: usize) -> (HalfEdgeGraph, Vec<Option<usize>>, Vec<usize>) {
        let k = self.sigma[h];
        let u = self.vertex_of[h].min(self.vertex_of[k]);
        let w = self.vertex_of[h].max(self.vertex_of[k]);
        let mut fmap = vec![None; self.n_flags()];
        let mut next = 0;
        for f in 0..self.n_flags() {
            if f != h && f != k {
                fmap[f] = Some(next);
                next += 1;
            }
        }
        let vmap: Vec<usize> = (0..self.n_vertices)
            .map(|v| {
                let v = if v == w { u } else { v };
                if u != w && v > w {
                    v - 1
                } else {
                    v
                }
            })
            .collect();
        let mut sigma = vec![0; next];
        let mut vertex_of = vec![0; next];
        let mut legs = vec![None; next];
        for f in 0..self.n_flags() {
            if let Some(nf) = fmap[f] {
                sigma[nf] = fmap[self.sigma[f]].expect("partner survives");
                vertex_of[nf] = vmap[self.vertex_of[f]];
                legs[nf] = self.legs[f];
            }
        }
        let nv = if u == w { self.n_vertices } else { self.n_vertices - 1 };
        (HalfEdgeGraph { sigma, vertex_of, n_vertices: nv, legs }, fmap, vmap)
    }
}

/// Commutative graph with vertex genus labels. Used both for stable graphs
/// and for extended stable graphs (bivalent genus-0 vertices on legs).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommGraph {
    skel: HalfEdgeGraph,
    genus: Vec<u32>,
}

pub type StableCommGraph = CommGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommFamily {
    /// Loop contraction forbidden, every vertex of genus 0.
    Under,
    /// Loop contraction allowed.
    Bar,
}

impl CommFamily {
    pub fn name(self) -> &'static str {
        match self {
            CommFamily::Under => "com-underline",
            CommFamily::Bar => "com-bar",
        }
    }
}

pub fn vertex_is_stable(genus: u32, valence: usize) -> bool {
    2 * genus as i64 - 2 + valence as i64 > 0
}

impl CommGraph {
    /// Stable graph: `2(g(v)-1) + n(v) > 0` at every vertex.
    pub fn stable(skel: HalfEdgeGraph, genus: Vec<u32>) -> Result<Self> {
        let g = Self::raw(skel, genus)?;
        for v in 0..g.n_vertices() {
            if !vertex_is_stable(g.genus[v], g.skel.valence(v)) {
                return Err(Error::InvalidInput(format!("vertex {v} is unstable")));
            }
        }
        Ok(g)
    }

    /// Extended stable graph: bivalent genus-0 vertices are allowed when they
    /// carry a leg.
    pub fn extended(skel: HalfEdgeGraph, genus: Vec<u32>) -> Result<Self> {
        let g = Self::raw(skel, genus)?;
        for v in 0..g.n_vertices() {
            if !g.vertex_ok_extended(v) {
                return Err(Error::InvalidInput(format!("vertex {v} violates the extended stability rules")));
            }
        }
        Ok(g)
    }

    fn raw(skel: HalfEdgeGraph, genus: Vec<u32>) -> Result<Self> {
        if genus.len() != skel.n_vertices() {
            return Err(Error::InvalidInput("one genus label per vertex is required".into()));
        }
        Ok(CommGraph { skel, genus })
    }

    pub(crate) fn new_unchecked(skel: HalfEdgeGraph, genus: Vec<u32>) -> Self {
        CommGraph { skel, genus }
    }

    pub fn vertex_ok_extended(&self, v: usize) -> bool {
        let n = self.skel.valence(v);
        let g = self.genus[v];
        if vertex_is_stable(g, n) {
            return true;
        }
        n == 2 && g == 0 && self.skel.flags_at(v).iter().any(|&h| self.skel.leg_label(h).is_some())
    }

    pub fn is_stable(&self) -> bool {
        (0..self.n_vertices()).all(|v| vertex_is_stable(self.genus[v], self.skel.valence(v)))
    }

    pub fn skeleton(&self) -> &HalfEdgeGraph {
        &self.skel
    }

    pub fn genus_of(&self, v: usize) -> u32 {
        self.genus[v]
    }

    pub fn genus_vec(&self) -> &[u32] {
        &self.genus
    }

    pub fn n_vertices(&self) -> usize {
        self.skel.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.skel.n_edges()
    }

    pub fn n_legs(&self) -> usize {
        self.skel.n_legs()
    }

    /// Unstable vertices (bivalent genus 0).
    pub fn unstable_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| !vertex_is_stable(self.genus[v], self.skel.valence(v))).collect()
    }

    /// Canonical text record (see [`canon::comm_canonical`]).
    pub fn to_text(&self) -> String {
        comm_to_text(self, None)
    }
}

pub(crate) fn comm_to_text(g: &CommGraph, black: Option<&[bool]>) -> String {
    let s = &g.skel;
    let mut out = String::new();
    let _ = write!(out, "flags {} vertices {}", s.n_flags(), s.n_vertices());
    out.push_str(" | edges");
    for (h, k) in s.edges() {
        let _ = write!(out, " {h}-{k}");
        if let Some(b) = black {
            out.push(if b[h] { 'b' } else { 'w' });
        }
    }
    out.push_str(" | vertices");
    for v in 0..s.n_vertices() {
        let fl: Vec<String> = s.flags_at(v).iter().map(|f| f.to_string()).collect();
        let _ = write!(out, " [{}]", fl.join(","));
    }
    out.push_str(" | genus");
    for v in 0..s.n_vertices() {
        let _ = write!(out, " {}", g.genus[v]);
    }
    out.push_str(" | legs");
    for (l, h) in s.legs() {
        let _ = write!(out, " {l}:{h}");
    }
    out
}

/// `|E| - |V| + 1 + sum g(v)`.
pub fn total_genus(g: &CommGraph) -> u32 {
    let e = g.n_edges() as i64;
    let v = g.n_vertices() as i64;
    (e - v + 1 + g.genus.iter().map(|&x| x as i64).sum::<i64>()) as u32
}

/// Contracts the edge containing flag `h`, given as the pair `(h, k)`.
pub fn contract_edge(g: &CommGraph, h: usize, k: usize) -> Result<CommGraph> {
    Ok(contract_edge_mapped(g, h, k)?.0)
}

/// As [`contract_edge`], also returning the flag and vertex maps.
pub fn contract_edge_mapped(g: &CommGraph, h: usize, k: usize) -> Result<(CommGraph, Vec<Option<usize>>, Vec<usize>)> {
    if !g.skel.is_edge(h, k) {
        return Err(Error::InvalidInput(format!("flags {h},{k} do not form an edge")));
    }
    let is_loop = g.skel.is_loop(h);
    let (skel, fmap, vmap) = g.skel.contract_raw(h);
    let mut genus = vec![0u32; skel.n_vertices()];
    for v in 0..g.n_vertices() {
        genus[vmap[v]] += g.genus[v];
    }
    if is_loop {
        genus[vmap[g.skel.vertex_of(h)]] += 1;
    }
    Ok((CommGraph { skel, genus }, fmap, vmap))
}

fn compact_labels(labels: &mut [Option<u32>]) {
    let mut present: Vec<u32> = labels.iter().flatten().copied().collect();
    present.sort_unstable();
    for l in labels.iter_mut().flatten() {
        *l = present.binary_search(l).expect("label present") as u32 + 1;
    }
}

/// Grafts leg `leg_i` of `g` to leg `leg_j` of `h` and contracts the new edge.
///
/// Surviving legs of `g` come first, in their original order, then the legs
/// of `h` in their original order; labels are compacted to `1..n`.
pub fn glue_and_contract(g: &CommGraph, leg_i: u32, h: &CommGraph, leg_j: u32) -> Result<CommGraph> {
    let fi = find_leg(g, leg_i)?;
    let fj = find_leg(h, leg_j)?;
    let ng = g.skel.n_flags();
    let nv = g.n_vertices();
    let mut sigma: Vec<usize> = g.skel.sigma.clone();
    sigma.extend(h.skel.sigma.iter().map(|&x| x + ng));
    let mut vertex_of = g.skel.vertex_of.clone();
    vertex_of.extend(h.skel.vertex_of.iter().map(|&v| v + nv));
    let offset = g.n_legs() as u32;
    let mut legs = g.skel.legs.clone();
    legs.extend(h.skel.legs.iter().map(|l| l.map(|x| x + offset)));
    let a = fi;
    let b = fj + ng;
    sigma[a] = b;
    sigma[b] = a;
    legs[a] = None;
    legs[b] = None;
    compact_labels(&mut legs);
    let mut genus = g.genus.clone();
    genus.extend_from_slice(&h.genus);
    let joined = CommGraph { skel: HalfEdgeGraph::new_unchecked(sigma, vertex_of, nv + h.n_vertices(), legs), genus };
    let out = contract_edge(&joined, a.min(b), a.max(b))?;
    HalfEdgeGraph::new(out.skel.sigma.clone(), out.skel.vertex_of.clone(), out.skel.n_vertices, out.skel.legs.clone())?;
    Ok(out)
}

/// Joins two legs of the same graph into an edge and contracts it. Legs at
/// the same vertex raise its genus by one.
pub fn self_glue(g: &CommGraph, leg_i: u32, leg_j: u32) -> Result<CommGraph> {
    if leg_i == leg_j {
        return Err(Error::InvalidInput("self-gluing needs two distinct legs".into()));
    }
    let a = find_leg(g, leg_i)?;
    let b = find_leg(g, leg_j)?;
    let mut sigma = g.skel.sigma.clone();
    sigma[a] = b;
    sigma[b] = a;
    let mut legs = g.skel.legs.clone();
    legs[a] = None;
    legs[b] = None;
    compact_labels(&mut legs);
    let joined = CommGraph {
        skel: HalfEdgeGraph::new_unchecked(sigma, g.skel.vertex_of.clone(), g.n_vertices(), legs),
        genus: g.genus.clone(),
    };
    contract_edge(&joined, a.min(b), a.max(b))
}

fn find_leg(g: &CommGraph, label: u32) -> Result<usize> {
    (0..g.skel.n_flags())
        .find(|&h| g.skel.legs[h] == Some(label))
        .ok_or_else(|| Error::InvalidInput(format!("unknown leg label {label}")))
}

/// Single vertex of genus `g` with legs `1..=n`.
pub fn corolla(genus: u32, n: usize) -> CommGraph {
    let skel = HalfEdgeGraph::new_unchecked((0..n).collect(), vec![0; n], 1, (1..=n as u32).map(Some).collect());
    CommGraph { skel, genus: vec![genus] }
}

/// Builds a legless graph from an edge list on vertices `0..nv`.
pub fn from_edge_list(nv: usize, edges: &[(usize, usize)], genus: &[u32]) -> Result<CommGraph> {
    let mut sigma = Vec::new();
    let mut vertex_of = Vec::new();
    for &(u, v) in edges {
        let h = sigma.len();
        sigma.push(h + 1);
        sigma.push(h);
        vertex_of.push(u);
        vertex_of.push(v);
    }
    let n = sigma.len();
    let skel = HalfEdgeGraph::new(sigma, vertex_of, nv, vec![None; n])?;
    CommGraph::stable(skel, genus.to_vec())
}

/// All one-edge expansions of `g`: every graph that contracts back to `g`
/// along some edge. Unstable results are skipped.
pub(crate) fn expansions(g: &CommGraph) -> Vec<CommGraph> {
    let mut out = Vec::new();
    let nf = g.skel.n_flags();
    for v in 0..g.n_vertices() {
        let fl = g.skel.flags_at(v);
        let gv = g.genus[v];
        // loop expansion: a genus unit becomes a loop
        if gv >= 1 {
            let mut sigma = g.skel.sigma.clone();
            sigma.push(nf + 1);
            sigma.push(nf);
            let mut vertex_of = g.skel.vertex_of.clone();
            vertex_of.push(v);
            vertex_of.push(v);
            let mut legs = g.skel.legs.clone();
            legs.push(None);
            legs.push(None);
            let mut genus = g.genus.clone();
            genus[v] -= 1;
            let cand = CommGraph { skel: HalfEdgeGraph::new_unchecked(sigma, vertex_of, g.n_vertices(), legs), genus };
            if cand.is_stable() {
                out.push(cand);
            }
        }
        // vertex split: flags of v are distributed over v and a new vertex
        let m = fl.len();
        let new_v = g.n_vertices();
        for mask in 0u64..(1u64 << m) {
            for g1 in 0..=gv {
                let g2 = gv - g1;
                let n_new = mask.count_ones() as usize + 1;
                let n_old = m - mask.count_ones() as usize + 1;
                if !vertex_is_stable(g1, n_old) || !vertex_is_stable(g2, n_new) {
                    continue;
                }
                let mut sigma = g.skel.sigma.clone();
                sigma.push(nf + 1);
                sigma.push(nf);
                let mut vertex_of = g.skel.vertex_of.clone();
                for (i, &f) in fl.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        vertex_of[f] = new_v;
                    }
                }
                vertex_of.push(v);
                vertex_of.push(new_v);
                let mut legs = g.skel.legs.clone();
                legs.push(None);
                legs.push(None);
                let mut genus = g.genus.clone();
                genus[v] = g1;
                genus.push(g2);
                out.push(CommGraph {
                    skel: HalfEdgeGraph::new_unchecked(sigma, vertex_of, g.n_vertices() + 1, legs),
                    genus,
                });
            }
        }
    }
    out
}

/// Canonical stable graphs of genus `genus` with `legs` labelled legs, for
/// every edge count up to `max_edges`. Index `i` of the result holds the
/// graphs with `i` edges, in canonical-key order.
pub fn enumerate_stable_graphs_upto(genus: u32, legs: usize, max_edges: usize, family: CommFamily) -> Vec<Vec<CommGraph>> {
    let mut levels: Vec<Vec<CommGraph>> = Vec::new();
    if !vertex_is_stable(genus, legs) {
        return vec![Vec::new(); max_edges + 1];
    }
    levels.push(vec![canon::comm_canonical(&corolla(genus, legs), None).graph]);
    for _ in 1..=max_edges {
        let prev = levels.last().expect("level");
        let mut seen = BTreeSet::new();
        for g in prev {
            for c in expansions(g) {
                seen.insert(canon::comm_canonical(&c, None).graph);
            }
        }
        levels.push(seen.into_iter().collect());
    }
    if family == CommFamily::Under {
        for lvl in levels.iter_mut() {
            lvl.retain(|g| g.genus.iter().all(|&x| x == 0));
        }
    }
    levels
}

/// Canonical stable graphs with exactly `edge_count` edges.
pub fn enumerate_stable_graphs(genus: u32, legs: usize, edge_count: usize, family: CommFamily) -> Vec<CommGraph> {
    enumerate_stable_graphs_upto(genus, legs, edge_count, family).pop().unwrap_or_default()
}
