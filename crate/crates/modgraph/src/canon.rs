//! Canonical forms, automorphism groups and d-orientations.
//!
//! Commutative graphs (plain, two-coloured and legged) are canonised by
//! colour refinement with individualisation on vertices; prestable ribbon
//! graphs by rooted traversals of the ribbon structure. Both return the
//! relabelling that witnesses the isomorphism and the full automorphism group
//! of the canonical representative.
//!
//! An orientation is an ordered list of odd tokens plus, for `d = 1`, a
//! direction on every edge. The sign of a relabelling is the parity of the
//! induced token permutation times the number of reversed edges.

use std::collections::BTreeMap;
use std::collections::HashSet;

use crate::graphs::{CommGraph, HalfEdgeGraph};
use crate::perm::reorder_sign;
use crate::ribbon::{PrestableGraph, VertexData};

/// Odd token of an orientation. Flags name edges and blocks; any flag of the
/// object may be used, it is normalised before comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Vertex(usize),
    /// Free boundary `k` of a vertex.
    Free(usize, u32),
    /// Boundary component of the thickened surface through a flag.
    Face(usize),
    Edge(usize),
}

/// Orientation datum: token order plus the tail flag of each directed edge
/// (empty when directions are irrelevant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub tokens: Vec<Token>,
    pub tails: Vec<usize>,
}

/// Which orientation model a complex uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrientationKind {
    /// Ordering of the odd edges (all edges, or the black ones).
    OddEdges,
    /// Ordering of vertices plus edge directions.
    VertexDirections,
    /// Prestable d=1: ordered edges followed by the ordered boundary
    /// components of the thickened surface.
    EdgesFaces,
}

// ---------------------------------------------------------------------------
// commutative graphs

/// Result of canonising a commutative graph.
#[derive(Clone, Debug)]
pub struct CommCanon {
    pub graph: CommGraph,
    pub black: Option<Vec<bool>>,
    /// old flag -> canonical flag
    pub flag_map: Vec<usize>,
    /// old vertex -> canonical vertex
    pub vertex_map: Vec<usize>,
    /// automorphisms of the canonical graph as (flag map, vertex map)
    pub automorphisms: Vec<(Vec<usize>, Vec<usize>)>,
}

fn edge_color(black: Option<&[bool]>, h: usize) -> u32 {
    match black {
        Some(b) => u32::from(b[h]) + 1,
        None => 0,
    }
}

fn refine(g: &CommGraph, black: Option<&[bool]>, colors: &mut Vec<u32>) {
    let s = g.skeleton();
    let nv = g.n_vertices();
    loop {
        let mut sigs: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(nv);
        for v in 0..nv {
            let mut nb: Vec<(u32, u32)> = Vec::new();
            for h in s.flags_at(v) {
                let k = s.sigma(h);
                if k == h {
                    continue;
                }
                nb.push((colors[s.vertex_of(k)], edge_color(black, h)));
            }
            nb.sort_unstable();
            sigs.push((colors[v], nb));
        }
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let new: Vec<u32> = sigs.iter().map(|x| distinct.binary_search(x).expect("present") as u32).collect();
        let before = {
            let mut c = colors.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        *colors = new;
        if distinct.len() == before {
            return;
        }
    }
}

fn initial_colors(g: &CommGraph, black: Option<&[bool]>) -> Vec<u32> {
    let s = g.skeleton();
    let sigs: Vec<(u32, usize, Vec<u32>, Vec<u32>)> = (0..g.n_vertices())
        .map(|v| {
            let fl = s.flags_at(v);
            let mut legs: Vec<u32> = fl.iter().filter_map(|&h| s.leg_label(h)).collect();
            legs.sort_unstable();
            let mut loops: Vec<u32> =
                fl.iter().filter(|&&h| s.sigma(h) > h && s.vertex_of(s.sigma(h)) == v).map(|&h| edge_color(black, h)).collect();
            loops.sort_unstable();
            (g.genus_of(v), fl.len(), legs, loops)
        })
        .collect();
    let mut distinct = sigs.clone();
    distinct.sort();
    distinct.dedup();
    sigs.iter().map(|x| distinct.binary_search(x).expect("present") as u32).collect()
}

/// Canonical edge list for a vertex placement: `(lo, hi, colour, old flag at
/// lo, old flag at hi)` sorted; ties among parallel edges keep old order.
fn placed_edges(g: &CommGraph, black: Option<&[bool]>, pos: &[usize]) -> Vec<(usize, usize, u32, usize, usize)> {
    let s = g.skeleton();
    let mut out = Vec::new();
    for (h, k) in s.edges() {
        let (pu, pv) = (pos[s.vertex_of(h)], pos[s.vertex_of(k)]);
        let e = if pu <= pv { (pu, pv, edge_color(black, h), h, k) } else { (pv, pu, edge_color(black, h), k, h) };
        out.push(e);
    }
    out.sort_unstable();
    out
}

fn encoding(g: &CommGraph, black: Option<&[bool]>, pos: &[usize]) -> Vec<u32> {
    let s = g.skeleton();
    let nv = g.n_vertices();
    let mut inv = vec![0; nv];
    for v in 0..nv {
        inv[pos[v]] = v;
    }
    let mut enc = Vec::new();
    for &v in &inv {
        enc.push(g.genus_of(v));
        let mut legs: Vec<u32> = s.flags_at(v).iter().filter_map(|&h| s.leg_label(h)).collect();
        legs.sort_unstable();
        enc.push(legs.len() as u32);
        enc.extend(legs);
    }
    for (a, b, c, _, _) in placed_edges(g, black, pos) {
        enc.extend([a as u32, b as u32, c]);
    }
    enc
}

fn search_leaves(g: &CommGraph, black: Option<&[bool]>, colors: Vec<u32>, leaves: &mut Vec<Vec<usize>>) {
    let nv = colors.len();
    let mut count: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &colors {
        *count.entry(c).or_default() += 1;
    }
    let target = count.iter().find(|(_, &n)| n > 1).map(|(&c, _)| c);
    match target {
        None => leaves.push(colors.iter().map(|&c| c as usize).collect()),
        Some(tc) => {
            for v in 0..nv {
                if colors[v] != tc {
                    continue;
                }
                // split class tc: v gets 2*tc, the rest 2*tc+1, others doubled
                let mut c2: Vec<u32> = colors.iter().map(|&c| if c > tc { 2 * c + 1 } else { 2 * c }).collect();
                for w in 0..nv {
                    if colors[w] == tc && w != v {
                        c2[w] = 2 * tc + 1;
                    }
                }
                let mut d = c2.clone();
                d.sort_unstable();
                d.dedup();
                let mut c3: Vec<u32> = c2.iter().map(|x| d.binary_search(x).expect("present") as u32).collect();
                refine(g, black, &mut c3);
                search_leaves(g, black, c3, leaves);
            }
        }
    }
}

fn layout_from_positions(g: &CommGraph, black: Option<&[bool]>, pos: &[usize]) -> (CommGraph, Option<Vec<bool>>, Vec<usize>) {
    let s = g.skeleton();
    let edges = placed_edges(g, black, pos);
    let ne = edges.len();
    let nf = s.n_flags();
    let mut fmap = vec![usize::MAX; nf];
    for (i, &(_, _, _, a, b)) in edges.iter().enumerate() {
        fmap[a] = 2 * i;
        fmap[b] = 2 * i + 1;
    }
    for (j, (_, h)) in s.legs().into_iter().enumerate() {
        fmap[h] = 2 * ne + j;
    }
    let mut sigma = vec![0; nf];
    let mut vertex_of = vec![0; nf];
    let mut legs = vec![None; nf];
    let mut bl = vec![false; nf];
    for h in 0..nf {
        sigma[fmap[h]] = fmap[s.sigma(h)];
        vertex_of[fmap[h]] = pos[s.vertex_of(h)];
        legs[fmap[h]] = s.leg_label(h);
        if let Some(b) = black {
            bl[fmap[h]] = b[h];
        }
    }
    let mut genus = vec![0; g.n_vertices()];
    for v in 0..g.n_vertices() {
        genus[pos[v]] = g.genus_of(v);
    }
    let skel = HalfEdgeGraph::new_unchecked(sigma, vertex_of, g.n_vertices(), legs);
    (CommGraph::new_unchecked(skel, genus), black.map(|_| bl), fmap)
}

/// Canonical form of a commutative graph, optionally with a black/white
/// edge colouring given per flag.
pub fn comm_canonical(g: &CommGraph, black: Option<&[bool]>) -> CommCanon {
    let mut colors = initial_colors(g, black);
    refine(g, black, &mut colors);
    let mut leaves = Vec::new();
    search_leaves(g, black, colors, &mut leaves);
    let mut best: Option<Vec<u32>> = None;
    let mut best_leaves: Vec<Vec<usize>> = Vec::new();
    for pos in leaves {
        let enc = encoding(g, black, &pos);
        match &best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => best_leaves.push(pos),
            _ => {
                best = Some(enc);
                best_leaves = vec![pos];
            }
        }
    }
    let (graph, bl, fmap0) = layout_from_positions(g, black, &best_leaves[0]);
    let vmap0 = best_leaves[0].clone();
    let nf = fmap0.len();
    let mut inv_f = vec![0; nf];
    for h in 0..nf {
        inv_f[fmap0[h]] = h;
    }
    let mut inv_v = vec![0; vmap0.len()];
    for v in 0..vmap0.len() {
        inv_v[vmap0[v]] = v;
    }
    let mut automorphisms = Vec::new();
    let mut seen = HashSet::new();
    for pos in &best_leaves {
        let (_, _, fm) = layout_from_positions(g, black, pos);
        let af: Vec<usize> = (0..nf).map(|f| fm[inv_f[f]]).collect();
        let av: Vec<usize> = (0..vmap0.len()).map(|v| pos[inv_v[v]]).collect();
        if seen.insert(af.clone()) {
            automorphisms.push((af, av));
        }
    }
    CommCanon { graph, black: bl, flag_map: fmap0, vertex_map: vmap0, automorphisms }
}

/// Reference orientation of a commutative graph.
pub fn comm_reference(g: &CommGraph, black: Option<&[bool]>, kind: OrientationKind) -> Orientation {
    let s = g.skeleton();
    match kind {
        OrientationKind::OddEdges => Orientation {
            tokens: s.edges().into_iter().filter(|&(h, _)| black.is_none_or(|b| b[h])).map(|(h, _)| Token::Edge(h)).collect(),
            tails: Vec::new(),
        },
        OrientationKind::VertexDirections => Orientation {
            tokens: (0..g.n_vertices()).map(Token::Vertex).collect(),
            tails: s.edges().into_iter().map(|(h, _)| h).collect(),
        },
        OrientationKind::EdgesFaces => panic!("face orientations apply to prestable graphs only"),
    }
}

/// Sign relating orientation `o` of `src`, transported along the flag and
/// vertex maps, to the reference orientation of `dst`. `None` when the
/// transported tokens do not match (not an isomorphism).
pub fn comm_transport_sign(
    src: &HalfEdgeGraph,
    o: &Orientation,
    flag_map: &[usize],
    vertex_map: &[usize],
    dst: &CommGraph,
    dst_black: Option<&[bool]>,
    kind: OrientationKind,
) -> Option<i32> {
    let ds = dst.skeleton();
    let norm = |f: usize| f.min(ds.sigma(f));
    let mapped: Vec<Token> = o
        .tokens
        .iter()
        .map(|t| match *t {
            Token::Vertex(v) => Token::Vertex(vertex_map[v]),
            Token::Edge(f) => Token::Edge(norm(flag_map[f])),
            other => other,
        })
        .collect();
    let reference = comm_reference(dst, dst_black, kind);
    let mut sign = reorder_sign(&mapped, &reference.tokens)?;
    for &t in &o.tails {
        let _ = src;
        let m = flag_map[t];
        if m != norm(m) {
            sign = -sign;
        }
    }
    Some(sign)
}

/// Whether some automorphism reverses the orientation (the graph is then
/// zero in the complex).
pub fn comm_is_zero(c: &CommCanon, kind: OrientationKind) -> bool {
    let g = &c.graph;
    let s = g.skeleton();
    let black = c.black.as_deref();
    match kind {
        OrientationKind::OddEdges => {
            // swapping two parallel odd edges is odd
            let mut seen = HashSet::new();
            for (h, k) in s.edges() {
                if black.is_some_and(|b| !b[h]) {
                    continue;
                }
                let (a, b) = (s.vertex_of(h), s.vertex_of(k));
                if !seen.insert((a.min(b), a.max(b))) {
                    return true;
                }
            }
        }
        OrientationKind::VertexDirections => {
            // flipping a loop or a dotted loop is odd
            if s.edges().iter().any(|&(h, _)| s.is_loop(h)) || g.genus_vec().iter().any(|&x| x > 0) {
                return true;
            }
        }
        OrientationKind::EdgesFaces => unreachable!(),
    }
    let reference = comm_reference(g, black, kind);
    c.automorphisms
        .iter()
        .any(|(af, av)| comm_transport_sign(s, &reference, af, av, g, black, kind) == Some(-1))
}

/// Action of an automorphism (flag map, vertex map) of `g` on its reference
/// orientation.
pub fn comm_orientation_action(g: &CommGraph, black: Option<&[bool]>, aut: (&[usize], &[usize]), kind: OrientationKind) -> Option<i32> {
    let reference = comm_reference(g, black, kind);
    comm_transport_sign(g.skeleton(), &reference, aut.0, aut.1, g, black, kind)
}

// ---------------------------------------------------------------------------
// prestable ribbon graphs

/// Result of canonising a prestable graph.
#[derive(Clone, Debug)]
pub struct RibbonCanon {
    pub graph: PrestableGraph,
    pub flag_map: Vec<usize>,
    pub vertex_map: Vec<usize>,
    pub automorphisms: Vec<(Vec<usize>, Vec<usize>)>,
}

struct Traversal {
    flag_label: Vec<usize>,
    vertex_label: Vec<usize>,
    order: Vec<usize>,
    vorder: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl Traversal {
    fn new(nf: usize, nv: usize) -> Self {
        Traversal { flag_label: vec![UNSET; nf], vertex_label: vec![UNSET; nv], order: Vec::new(), vorder: Vec::new() }
    }

    fn label_block_from(&mut self, g: &PrestableGraph, f: usize) {
        let v = g.vertex_of(f);
        if self.vertex_label[v] == UNSET {
            self.vertex_label[v] = self.vorder.len();
            self.vorder.push(v);
        }
        let mut x = f;
        loop {
            self.flag_label[x] = self.order.len();
            self.order.push(x);
            x = g.next(x);
            if x == f {
                break;
            }
        }
    }

    /// Labels everything reachable through `sigma` and `next`.
    fn close(&mut self, g: &PrestableGraph, mut cursor: usize) -> usize {
        while cursor < self.order.len() {
            let f = self.order[cursor];
            let k = g.sigma(f);
            if self.flag_label[k] == UNSET {
                self.label_block_from(g, k);
            }
            cursor += 1;
        }
        cursor
    }
}

fn ribbon_leaves(g: &PrestableGraph, t: Traversal, cursor: usize, out: &mut Vec<Traversal>) {
    let mut t = t;
    let cursor = t.close(g, cursor);
    // first labelled vertex with an unlabelled block
    let pending = t.vorder.iter().copied().find(|&v| g.flags_at(v).iter().any(|&f| t.flag_label[f] == UNSET));
    match pending {
        None => out.push(t),
        Some(v) => {
            for f in g.flags_at(v) {
                if t.flag_label[f] != UNSET {
                    continue;
                }
                let mut t2 = Traversal {
                    flag_label: t.flag_label.clone(),
                    vertex_label: t.vertex_label.clone(),
                    order: t.order.clone(),
                    vorder: t.vorder.clone(),
                };
                t2.label_block_from(g, f);
                ribbon_leaves(g, t2, cursor, out);
            }
        }
    }
}

fn ribbon_encoding(g: &PrestableGraph, t: &Traversal) -> Vec<usize> {
    let mut enc = Vec::with_capacity(4 * t.order.len() + 2 * t.vorder.len() + 2);
    enc.push(t.vorder.len());
    for &v in &t.vorder {
        let d = g.vertex(v);
        enc.push(d.gamma as usize);
        enc.push(d.beta as usize);
    }
    for &f in &t.order {
        enc.push(t.flag_label[g.sigma(f)]);
        enc.push(t.flag_label[g.next(f)]);
        enc.push(t.vertex_label[g.vertex_of(f)]);
    }
    enc
}

fn ribbon_all_leaves(g: &PrestableGraph) -> Vec<Traversal> {
    let nf = g.n_flags();
    let nv = g.n_vertices();
    let mut out = Vec::new();
    if nf == 0 {
        let mut t = Traversal::new(0, nv);
        for v in 0..nv {
            t.vertex_label[v] = v;
            t.vorder.push(v);
        }
        out.push(t);
        return out;
    }
    for s in 0..nf {
        let mut t = Traversal::new(nf, nv);
        t.label_block_from(g, s);
        ribbon_leaves(g, t, 0, &mut out);
    }
    out
}

fn relabel_prestable(g: &PrestableGraph, t: &Traversal) -> PrestableGraph {
    let nf = g.n_flags();
    let mut sigma = vec![0; nf];
    for f in 0..nf {
        sigma[t.flag_label[f]] = t.flag_label[g.sigma(f)];
    }
    let mut verts = Vec::with_capacity(t.vorder.len());
    for &v in &t.vorder {
        let d = g.vertex(v);
        let blocks: Vec<Vec<usize>> = d.blocks.iter().map(|b| b.iter().map(|&f| t.flag_label[f]).collect()).collect();
        verts.push(VertexData::new(d.gamma, d.beta, blocks));
    }
    PrestableGraph::from_parts_unchecked(sigma, verts)
}

/// Canonical form of a prestable ribbon graph.
pub fn ribbon_canonical(g: &PrestableGraph) -> RibbonCanon {
    let leaves = ribbon_all_leaves(g);
    let mut best: Option<Vec<usize>> = None;
    let mut best_idx: Vec<usize> = Vec::new();
    for (i, t) in leaves.iter().enumerate() {
        let enc = ribbon_encoding(g, t);
        match &best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => best_idx.push(i),
            _ => {
                best = Some(enc);
                best_idx = vec![i];
            }
        }
    }
    let t0 = &leaves[best_idx[0]];
    let graph = relabel_prestable(g, t0);
    let nf = g.n_flags();
    let nv = g.n_vertices();
    let mut inv_f = vec![0; nf];
    for f in 0..nf {
        inv_f[t0.flag_label[f]] = f;
    }
    let mut automorphisms = Vec::new();
    let mut seen = HashSet::new();
    for &i in &best_idx {
        let t = &leaves[i];
        let af: Vec<usize> = (0..nf).map(|f| t.flag_label[inv_f[f]]).collect();
        let av: Vec<usize> = (0..nv).map(|v| t.vertex_label[t0.vorder[v]]).collect();
        if seen.insert((af.clone(), av.clone())) {
            automorphisms.push((af, av));
        }
    }
    RibbonCanon { graph, flag_map: t0.flag_label.clone(), vertex_map: t0.vertex_label.clone(), automorphisms }
}

/// Smallest flag of the boundary component through each flag.
pub fn face_min(g: &PrestableGraph) -> Vec<usize> {
    let (cycles, _) = crate::ribbon::boundary_cycles(g);
    let mut out = vec![0; g.n_flags()];
    for c in cycles {
        let m = *c.iter().min().expect("non-empty cycle");
        for f in c {
            out[f] = m;
        }
    }
    out
}

/// Reference orientation of a prestable graph.
pub fn ribbon_reference(g: &PrestableGraph, kind: OrientationKind) -> Orientation {
    let mut tokens: Vec<Token> = g.edges().into_iter().map(|(h, _)| Token::Edge(h)).collect();
    if kind != OrientationKind::OddEdges {
        let fm = face_min(g);
        let mut mins: Vec<usize> = fm.iter().enumerate().filter(|&(f, &m)| f == m).map(|(f, _)| f).collect();
        mins.sort_unstable();
        tokens.extend(mins.into_iter().map(Token::Face));
        for v in 0..g.n_vertices() {
            tokens.extend((0..g.vertex(v).beta).map(|k| Token::Free(v, k)));
        }
    }
    Orientation { tokens, tails: Vec::new() }
}

/// Transport of an orientation of `src` along flag/vertex maps into `dst`,
/// compared with the reference orientation of `dst`.
pub fn ribbon_transport_sign(
    src: &PrestableGraph,
    o: &Orientation,
    flag_map: &[usize],
    vertex_map: &[usize],
    dst: &PrestableGraph,
    kind: OrientationKind,
) -> Option<i32> {
    let _ = src;
    let fm = if kind == OrientationKind::OddEdges { Vec::new() } else { face_min(dst) };
    let mapped: Vec<Token> = o
        .tokens
        .iter()
        .map(|t| match *t {
            Token::Vertex(v) => Token::Vertex(vertex_map[v]),
            Token::Free(v, k) => Token::Free(vertex_map[v], k),
            Token::Face(f) => Token::Face(fm[flag_map[f]]),
            Token::Edge(f) => {
                let m = flag_map[f];
                Token::Edge(m.min(dst.sigma(m)))
            }
        })
        .collect();
    reorder_sign(&mapped, &ribbon_reference(dst, kind).tokens)
}

pub fn ribbon_orientation_action(g: &PrestableGraph, aut: (&[usize], &[usize]), kind: OrientationKind) -> Option<i32> {
    let reference = ribbon_reference(g, kind);
    ribbon_transport_sign(g, &reference, aut.0, aut.1, g, kind)
}

/// Zero-by-symmetry for prestable graphs. With ordered faces, two free
/// boundaries at one vertex can be swapped, which is odd.
pub fn ribbon_is_zero(c: &RibbonCanon, kind: OrientationKind) -> bool {
    let g = &c.graph;
    if kind != OrientationKind::OddEdges && (0..g.n_vertices()).any(|v| g.vertex(v).beta >= 2) {
        return true;
    }
    c.automorphisms.iter().any(|(af, av)| ribbon_orientation_action(g, (af, av), kind) == Some(-1))
}
