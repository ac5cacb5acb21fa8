#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashMap};

use modgraph::canon::{self, Orientation, OrientationKind, Token};
use modgraph::complexes::{self, BasisGraph, ComplexSpec};
use modgraph::graphs::{CommGraph, HalfEdgeGraph};
use modgraph::linalg::SparseIntMatrix;
use modgraph::perm::perm_sign;
use modgraph::ribbon::{PrestableGraph, VertexData};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

pub fn connected(sigma: &[usize], iota: &[usize]) -> bool {
    let mut seen = vec![false; sigma.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in [sigma[x], iota[x]] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&b| b)
}

/// Relabel by depth-first traversal from `root`; minimum over roots is a
/// complete invariant of connected pairs up to simultaneous conjugation.
pub fn ribbon_code(sigma: &[usize], iota: &[usize]) -> Vec<usize> {
    let n = sigma.len();
    let mut best: Option<Vec<usize>> = None;
    for root in 0..n {
        let mut label = vec![usize::MAX; n];
        let mut order = vec![root];
        label[root] = 0;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for y in [sigma[x], iota[x]] {
                if label[y] == usize::MAX {
                    label[y] = order.len();
                    order.push(y);
                }
            }
            i += 1;
        }
        let mut code = Vec::with_capacity(2 * n);
        for &x in &order {
            code.push(label[sigma[x]]);
            code.push(label[iota[x]]);
        }
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    }
    best.unwrap_or_default()
}

/// Classes of connected plain ribbon graphs with `e` edges and all vertices
/// of valence at least three, keyed by `(genus, boundary count)`.
pub fn ribbon_oracle(e: usize) -> HashMap<(u32, u32), usize> {
    let n = 2 * e;
    let iota: Vec<usize> = (0..n).map(|i| i ^ 1).collect();
    let mut classes: HashMap<(u32, u32), BTreeSet<Vec<usize>>> = HashMap::new();
    for sigma in perms(n) {
        let vs = cycles(&sigma);
        if vs.iter().any(|c| c.len() < 3) || !connected(&sigma, &iota) {
            continue;
        }
        let face: Vec<usize> = (0..n).map(|h| sigma[iota[h]]).collect();
        let f = cycles(&face).len() as i64;
        let chi = vs.len() as i64 - e as i64 + f;
        let genus = ((2 - chi) / 2) as u32;
        classes.entry((genus, f as u32)).or_default().insert(ribbon_code(&sigma, &iota));
    }
    classes.into_iter().map(|(k, v)| (k, v.len())).collect()
}

pub fn multigraphs(nv: usize, e: usize) -> Vec<Vec<Vec<usize>>> {
    let slots: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i..nv).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; slots.len()];
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, slots: &[(usize, usize)], nv: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if k == slots.len() {
            if left == 0 {
                let mut a = vec![vec![0; nv]; nv];
                for (s, &(i, j)) in slots.iter().enumerate() {
                    a[i][j] = cur[s];
                    a[j][i] = cur[s];
                }
                out.push(a);
            }
            return;
        }
        for c in 0..=left {
            cur[k] = c;
            rec(k + 1, left - c, cur, slots, nv, out);
        }
        cur[k] = 0;
    }
    rec(0, e, &mut cur, &slots, nv, &mut out);
    out
}

pub fn mg_connected(a: &[Vec<usize>]) -> bool {
    let n = a.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if a[x][y] > 0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&b| b)
}

pub fn genus_labels(nv: usize, total: u32) -> Vec<Vec<u32>> {
    if nv == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for g in 0..=total {
        for mut rest in genus_labels(nv - 1, total - g) {
            rest.insert(0, g);
            out.push(rest);
        }
    }
    out
}

pub fn comm_oracle(genus: u32, e: usize, only_genus_zero: bool) -> usize {
    let mut classes = BTreeSet::new();
    for nv in 1..=e + 1 {
        let loops = e as i64 - nv as i64 + 1;
        if loops < 0 || loops > genus as i64 {
            continue;
        }
        let vertex_genus = genus - loops as u32;
        let ps = perms(nv);
        for a in multigraphs(nv, e) {
            if !mg_connected(&a) {
                continue;
            }
            for gl in genus_labels(nv, vertex_genus) {
                if only_genus_zero && gl.iter().any(|&x| x > 0) {
                    continue;
                }
                let stable = (0..nv).all(|v| {
                    let val: usize = (0..nv).map(|w| a[v][w]).sum::<usize>() + a[v][v];
                    2 * gl[v] as i64 - 2 + val as i64 > 0
                });
                if !stable {
                    continue;
                }
                let code = ps
                    .iter()
                    .map(|p| {
                        let g: Vec<u32> = (0..nv).map(|i| gl[p[i]]).collect();
                        let m: Vec<usize> = (0..nv).flat_map(|i| (0..nv).map(move |j| (i, j))).map(|(i, j)| a[p[i]][p[j]]).collect();
                        (nv, g, m)
                    })
                    .min()
                    .expect("nonempty");
                classes.insert(code);
            }
        }
    }
    classes.len()
}

pub fn dense_rank(m: &SparseIntMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = m.to_dense().into_iter().map(|r| r.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for k in c..cols {
                    let sub = &f * &a[rank][k];
                    a[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    modgraph::perm::all_perms(n)
}

pub fn comm_brute_zero(g: &CommGraph, kind: OrientationKind) -> bool {
    let s = g.skeleton();
    let n = s.n_flags();
    if kind == OrientationKind::VertexDirections && g.genus_vec().iter().any(|&x| x > 0) {
        return true;
    }
    let edges = s.edges();
    for p in all_perms(n) {
        if (0..n).any(|h| p[s.sigma(h)] != s.sigma(p[h])) {
            continue;
        }
        let mut vmap = vec![usize::MAX; s.n_vertices()];
        let mut ok = true;
        for h in 0..n {
            let (a, b) = (s.vertex_of(h), s.vertex_of(p[h]));
            if vmap[a] == usize::MAX {
                vmap[a] = b;
            } else if vmap[a] != b {
                ok = false;
            }
        }
        if !ok || vmap.contains(&usize::MAX) || (0..vmap.len()).any(|v| g.genus_of(v) != g.genus_of(vmap[v])) {
            continue;
        }
        let epos = |h: usize| edges.iter().position(|&(a, b)| a == h || b == h).unwrap();
        let eperm: Vec<usize> = edges.iter().map(|&(h, _)| epos(p[h])).collect();
        let sign = match kind {
            OrientationKind::OddEdges => perm_sign(&eperm),
            _ => {
                let flips = edges.iter().filter(|&&(h, k)| p[h] > p[k]).count();
                perm_sign(&vmap) * if flips % 2 == 1 { -1 } else { 1 }
            }
        };
        if sign == -1 {
            return true;
        }
    }
    false
}

pub fn ribbon_brute_zero(g: &PrestableGraph, kind: OrientationKind) -> bool {
    let n = g.n_flags();
    let fm = canon::face_min(g);
    let faces: Vec<usize> = {
        let mut v: Vec<usize> = fm.clone();
        v.sort_unstable();
        v.dedup();
        v
    };
    let edges = g.edges();
    for p in all_perms(n) {
        if (0..n).any(|h| p[g.sigma(h)] != g.sigma(p[h]) || p[g.next(h)] != g.next(p[h])) {
            continue;
        }
        let epos = |h: usize| edges.iter().position(|&(a, b)| a == h || b == h).unwrap();
        let eperm: Vec<usize> = edges.iter().map(|&(h, _)| epos(p[h])).collect();
        let mut sign = perm_sign(&eperm);
        if kind == OrientationKind::EdgesFaces {
            let fperm: Vec<usize> = faces.iter().map(|&f| faces.iter().position(|&x| x == fm[p[f]]).unwrap()).collect();
            sign *= perm_sign(&fperm);
        }
        if sign == -1 {
            return true;
        }
    }
    false
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn relabel_comm(g: &CommGraph, p: &[usize], vp: &[usize]) -> CommGraph {
    let s = g.skeleton();
    let n = s.n_flags();
    let mut sigma = vec![0; n];
    let mut vertex_of = vec![0; n];
    let mut legs = vec![None; n];
    for h in 0..n {
        sigma[p[h]] = p[s.sigma(h)];
        vertex_of[p[h]] = vp[s.vertex_of(h)];
        legs[p[h]] = s.leg_label(h);
    }
    let mut genus = vec![0; s.n_vertices()];
    for v in 0..s.n_vertices() {
        genus[vp[v]] = g.genus_of(v);
    }
    CommGraph::stable(HalfEdgeGraph::new(sigma, vertex_of, s.n_vertices(), legs).unwrap(), genus).unwrap()
}

pub fn relabel_ribbon(g: &PrestableGraph, p: &[usize], vp: &[usize]) -> PrestableGraph {
    let n = g.n_flags();
    let mut sigma = vec![0; n];
    for h in 0..n {
        sigma[p[h]] = p[g.sigma(h)];
    }
    let mut verts = vec![VertexData::new(0, 0, Vec::new()); g.n_vertices()];
    for v in 0..g.n_vertices() {
        let d = g.vertex(v);
        verts[vp[v]] = VertexData::new(d.gamma, d.beta, d.blocks.iter().map(|b| b.iter().map(|&h| p[h]).collect()).collect());
    }
    PrestableGraph::new(sigma, verts).unwrap()
}

pub fn transport_tokens(o: &Orientation, p: &[usize], vp: &[usize]) -> Orientation {
    let tokens = o
        .tokens
        .iter()
        .map(|t| match *t {
            Token::Vertex(v) => Token::Vertex(vp[v]),
            Token::Free(v, k) => Token::Free(vp[v], k),
            Token::Face(f) => Token::Face(p[f]),
            Token::Edge(f) => Token::Edge(p[f]),
        })
        .collect();
    Orientation { tokens, tails: o.tails.iter().map(|&t| p[t]).collect() }
}

pub fn reversed(o: &Orientation, sigma: impl Fn(usize) -> usize, rng: &mut ChaCha8Rng) -> Orientation {
    let mut r = o.clone();
    if !r.tails.is_empty() && (r.tokens.len() < 2 || rng.gen_bool(0.5)) {
        let i = rng.gen_range(0..r.tails.len());
        r.tails[i] = sigma(r.tails[i]);
    } else {
        let i = rng.gen_range(0..r.tokens.len());
        let j = (i + rng.gen_range(1..r.tokens.len())) % r.tokens.len();
        r.tokens.swap(i, j);
    }
    r
}


/// Relabels `samples` random basis elements of the given complexes and checks
/// that the canonical transport sign is +1 and flips to -1 on reversal.
pub fn reversal_check(specs: &[ComplexSpec], samples: usize, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let pool: Vec<(ComplexSpec, BasisGraph)> = specs
        .iter()
        .flat_map(|spec| {
            let c = complexes::build_complex(spec).unwrap();
            c.bases
                .into_iter()
                .flatten()
                .filter(|b| match b {
                    BasisGraph::Comm { graph, .. } => graph.n_edges() >= 2,
                    BasisGraph::Ribbon(graph) => graph.n_edges() >= 2,
                })
                .map(move |b| (*spec, b))
        })
        .collect();
    for _ in 0..samples {
        let (spec, b) = &pool[rng.gen_range(0..pool.len())];
        let kind = spec.orientation_kind();
        let (same, rev) = match b {
            BasisGraph::Comm { graph, .. } => {
                let p = random_perm(rng, graph.skeleton().n_flags());
                let vp = random_perm(rng, graph.n_vertices());
                let h = relabel_comm(graph, &p, &vp);
                let o = transport_tokens(&canon::comm_reference(graph, None, kind), &p, &vp);
                let c = canon::comm_canonical(&h, None);
                if &c.graph != graph {
                    return Err(format!("{spec}: relabelled graph has a different canonical form"));
                }
                let r = reversed(&o, |f| h.skeleton().sigma(f), rng);
                (
                    canon::comm_transport_sign(h.skeleton(), &o, &c.flag_map, &c.vertex_map, &c.graph, None, kind),
                    canon::comm_transport_sign(h.skeleton(), &r, &c.flag_map, &c.vertex_map, &c.graph, None, kind),
                )
            }
            BasisGraph::Ribbon(graph) => {
                let p = random_perm(rng, graph.n_flags());
                let vp = random_perm(rng, graph.n_vertices());
                let h = relabel_ribbon(graph, &p, &vp);
                let o = transport_tokens(&canon::ribbon_reference(graph, kind), &p, &vp);
                let c = canon::ribbon_canonical(&h);
                if &c.graph != graph {
                    return Err(format!("{spec}: relabelled graph has a different canonical form"));
                }
                let r = reversed(&o, |f| h.sigma(f), rng);
                (
                    canon::ribbon_transport_sign(&h, &o, &c.flag_map, &c.vertex_map, &c.graph, kind),
                    canon::ribbon_transport_sign(&h, &r, &c.flag_map, &c.vertex_map, &c.graph, kind),
                )
            }
        };
        if same != Some(1) || rev != Some(-1) {
            return Err(format!("{spec}: signs {same:?} / {rev:?}"));
        }
    }
    Ok(samples)
}
