//! Feynman amplitudes of prestable ribbon graphs.
//!
//! Every decorated vertex is replaced by a one-vertex plain fragment whose
//! extra (ghost) loops carry the inverse form `C`; real edges carry the
//! propagator `P = (1 (x) s) C`. The resulting plain network is contracted
//! with the vertex tensors `<x_1 ... x_{n-1}, x_n>`.
//!
//! Koszul rule: the edge tensors are laid out as `tail, head` pairs in
//! tensor order (ghost edges first), permuted into the concatenated vertex
//! words with the usual sign, and then fed to the vertex tensors in vertex
//! order; vertex tensors have parity `d`.
//!
//! For `d = 1` the vertex order and edge directions of the network are
//! converted into the edge/face orientation of the complex through the
//! chain of natural isomorphisms `Det(E) (x) Det(H_1) = Det(V) (x) dirs`
//! and `Det(H_1(S)) = Det(faces)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::canon::{self, Orientation, OrientationKind, Token};
use crate::complexes::{BasisGraph, GradedComplex};
use crate::error::{Error, Result};
use crate::frobenius::{self, FrobeniusData, Mat, Q};
use crate::perm;
use crate::pool;
use crate::ribbon::{PrestableGraph, VertexData};

/// Plain ribbon network: cyclic words (with a fixed starting flag), the
/// edge involution and the edges in tensor order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub words: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    /// `(tail, head)` in tensor order
    pub edges: Vec<(usize, usize)>,
    pub ghost: Vec<bool>,
}

impl Net {
    fn n_flags(&self) -> usize {
        self.sigma.len()
    }

    fn vertex_of(&self) -> Vec<usize> {
        let mut v = vec![0; self.n_flags()];
        for (i, w) in self.words.iter().enumerate() {
            for &f in w {
                v[f] = i;
            }
        }
        v
    }

    fn next(&self) -> Vec<usize> {
        let mut nx = vec![0; self.n_flags()];
        for w in &self.words {
            for (i, &f) in w.iter().enumerate() {
                nx[f] = w[(i + 1) % w.len()];
            }
        }
        nx
    }

    /// Boundary cycles `h -> next(sigma(h))`.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let nx = self.next();
        let mut seen = vec![true; self.n_flags()];
        for &f in self.words.iter().flatten() {
            seen[f] = false;
        }
        let mut out = Vec::new();
        for s in 0..self.n_flags() {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                c.push(h);
                h = nx[self.sigma[h]];
            }
            out.push(c);
        }
        out
    }
}

/// How decorated vertices are written as plain fragments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentModel {
    /// first block, then `a B a'` per further block, `a b a' b'` per
    /// handle, `a a'` per free boundary
    Standard,
    /// handles first, blocks in reverse order, reversed free loops
    Alternate,
}

/// Plain expansion of a prestable graph.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub net: Net,
    /// number of real flags; real flags keep their labels
    pub real_flags: usize,
    /// per vertex, one ghost flag on each free boundary
    pub free_faces: Vec<Vec<usize>>,
}

fn fragment_word(vd: &VertexData, model: FragmentModel, fresh: &mut usize, ghosts: &mut Vec<(usize, usize)>) -> Result<Vec<usize>> {
    let mut new_edge = |ghosts: &mut Vec<(usize, usize)>| {
        let (a, b) = (*fresh, *fresh + 1);
        *fresh += 2;
        ghosts.push((a, b));
        (a, b)
    };
    let mut w: Vec<usize> = Vec::new();
    let handles = |w: &mut Vec<usize>, ghosts: &mut Vec<(usize, usize)>, new_edge: &mut dyn FnMut(&mut Vec<(usize, usize)>) -> (usize, usize)| {
        for _ in 0..vd.gamma {
            let (a, a2) = new_edge(ghosts);
            let (b, b2) = new_edge(ghosts);
            w.extend([a, b, a2, b2]);
        }
    };
    match model {
        FragmentModel::Standard => {
            let mut blocks = vd.blocks.iter();
            if let Some(b) = blocks.next() {
                w.extend(b);
            }
            for b in blocks {
                let (a, a2) = new_edge(ghosts);
                w.push(a);
                w.extend(b);
                w.push(a2);
            }
            handles(&mut w, ghosts, &mut new_edge);
            let free = if vd.blocks.is_empty() { vd.beta.saturating_sub(1) } else { vd.beta };
            for _ in 0..free {
                let (a, a2) = new_edge(ghosts);
                w.extend([a, a2]);
            }
        }
        FragmentModel::Alternate => {
            handles(&mut w, ghosts, &mut new_edge);
            let free = if vd.blocks.is_empty() { vd.beta.saturating_sub(1) } else { vd.beta };
            let mut front = Vec::new();
            for _ in 0..free {
                let (a, a2) = new_edge(ghosts);
                front.extend([a2, a]);
            }
            for (i, b) in vd.blocks.iter().rev().enumerate() {
                // a block cut open at its second flag
                let mut b = b.clone();
                if b.len() > 1 {
                    b.rotate_left(1);
                }
                if i == 0 {
                    w.extend(b);
                } else {
                    let (a, a2) = new_edge(ghosts);
                    w.push(a2);
                    w.extend(b);
                    w.push(a);
                }
            }
            front.extend(w);
            w = front;
        }
    }
    if w.is_empty() {
        return Err(Error::InvalidInput("vertex has an empty fragment".into()));
    }
    Ok(w)
}

/// Expands a prestable graph; real edges are listed in `edge_order` (by
/// smallest flag, tail = smallest flag) after all ghost edges.
pub fn expand(g: &PrestableGraph, model: FragmentModel, edge_order: &[usize]) -> Result<Expansion> {
    let nr = g.n_flags();
    let mut fresh = nr;
    let mut ghosts = Vec::new();
    let mut words = Vec::new();
    let mut first_ghost = Vec::new();
    for v in 0..g.n_vertices() {
        first_ghost.push(fresh);
        words.push(fragment_word(g.vertex(v), model, &mut fresh, &mut ghosts)?);
    }
    first_ghost.push(fresh);
    let mut sigma = vec![0; fresh];
    for h in 0..nr {
        sigma[h] = g.sigma(h);
    }
    let mut edges = Vec::new();
    let mut ghost = Vec::new();
    for &(a, b) in &ghosts {
        sigma[a] = b;
        sigma[b] = a;
        edges.push((a, b));
        ghost.push(true);
    }
    for &h in edge_order {
        edges.push((h, g.sigma(h)));
        ghost.push(false);
    }
    let net = Net { words, sigma, edges, ghost };
    // ghost-only faces are the free boundaries
    let mut free_faces = vec![Vec::new(); g.n_vertices()];
    for f in net.faces() {
        if f.iter().all(|&x| x >= nr) {
            let v = (0..g.n_vertices()).find(|&v| f[0] >= first_ghost[v] && f[0] < first_ghost[v + 1]).expect("ghost flag has a vertex");
            free_faces[v].push(*f.iter().min().expect("non-empty"));
        }
    }
    for v in 0..g.n_vertices() {
        free_faces[v].sort_unstable();
        if free_faces[v].len() != g.vertex(v).beta as usize {
            return Err(Error::Internal(format!("fragment of vertex {v} has the wrong number of free boundaries")));
        }
    }
    Ok(Expansion { net, real_flags: nr, free_faces })
}

// ---------------------------------------------------------------------------
// contraction

struct Evaluator<'a> {
    alg: &'a FrobeniusData,
    net: &'a Net,
    terms: Vec<Vec<(usize, usize, Q)>>,
    order: Vec<usize>,
    completes: Vec<Vec<usize>>,
    inversions: Vec<(usize, usize)>,
    assign: Vec<usize>,
    memo: HashMap<(usize, Vec<usize>), Q>,
    total: Q,
}

impl Evaluator<'_> {
    fn vertex_value(&mut self, v: usize) -> Q {
        let key: Vec<usize> = self.net.words[v].iter().map(|&f| self.assign[f]).collect();
        if let Some(x) = self.memo.get(&(v, key.clone())) {
            return x.clone();
        }
        let a = self.alg;
        let n = key.len();
        let mut prod = vec![Q::zero(); a.dim()];
        prod[key[0]] = Q::one();
        for &x in &key[1..n - 1] {
            let mut e = vec![Q::zero(); a.dim()];
            e[x] = Q::one();
            prod = a.mul_vec(&prod, &e);
        }
        let last = key[n - 1];
        let val = (0..a.dim()).filter(|&i| !prod[i].is_zero()).map(|i| &prod[i] * &a.form[i][last]).sum::<Q>();
        self.memo.insert((v, key), val.clone());
        val
    }

    fn run(&mut self, step: usize, coef: Q) {
        if step == self.order.len() {
            let odd = |f: usize| self.alg.parity[self.assign[f]] == 1;
            let flips = self.inversions.iter().filter(|&&(x, y)| odd(x) && odd(y)).count();
            if flips % 2 == 1 {
                self.total -= coef;
            } else {
                self.total += coef;
            }
            return;
        }
        let e = self.order[step];
        let (t, h) = self.net.edges[e];
        for k in 0..self.terms[e].len() {
            let (i, j, c) = self.terms[e][k].clone();
            self.assign[t] = i;
            self.assign[h] = j;
            let mut val = &coef * &c;
            for vi in 0..self.completes[step].len() {
                let v = self.completes[step][vi];
                let x = self.vertex_value(v);
                if x.is_zero() {
                    val = Q::zero();
                    break;
                }
                val *= x;
            }
            if !val.is_zero() {
                self.run(step + 1, val);
            }
        }
    }
}

/// Contracts a plain network. `c_terms` label ghost edges and `p_terms`
/// real ones.
pub fn contract_net(alg: &FrobeniusData, net: &Net, c_terms: &[(usize, usize, Q)], p_terms: &[(usize, usize, Q)]) -> Result<Q> {
    if net.words.iter().any(|w| w.len() < 2) {
        return Err(Error::InvalidInput("network vertex of valence below 2".into()));
    }
    let nf = net.n_flags();
    let vof = net.vertex_of();
    // enumeration order: edges grouped by the first vertex that sees them
    let mut order = Vec::new();
    let mut listed = vec![false; net.edges.len()];
    let mut edge_of = vec![0; nf];
    for (i, &(t, h)) in net.edges.iter().enumerate() {
        edge_of[t] = i;
        edge_of[h] = i;
    }
    for w in &net.words {
        for &f in w {
            if !listed[edge_of[f]] {
                listed[edge_of[f]] = true;
                order.push(edge_of[f]);
            }
        }
    }
    let step_of: Vec<usize> = {
        let mut s = vec![0; net.edges.len()];
        for (i, &e) in order.iter().enumerate() {
            s[e] = i;
        }
        s
    };
    let mut completes = vec![Vec::new(); order.len()];
    for (v, w) in net.words.iter().enumerate() {
        let last = w.iter().map(|&f| step_of[edge_of[f]]).max().expect("non-empty word");
        completes[last].push(v);
    }
    let mut pos_e = vec![0; nf];
    for (i, &(t, h)) in net.edges.iter().enumerate() {
        pos_e[t] = 2 * i;
        pos_e[h] = 2 * i + 1;
    }
    let mut pos_v = vec![0; nf];
    for (i, f) in net.words.iter().flatten().enumerate() {
        pos_v[*f] = i;
    }
    let mut inversions = Vec::new();
    for x in 0..nf {
        for y in 0..nf {
            if pos_e[x] < pos_e[y] && pos_v[x] > pos_v[y] {
                inversions.push((x, y));
            }
        }
    }
    let _ = vof;
    let terms = net.ghost.iter().map(|&g| if g { c_terms.to_vec() } else { p_terms.to_vec() }).collect();
    let mut ev = Evaluator {
        alg,
        net,
        terms,
        order,
        completes,
        inversions,
        assign: vec![0; nf],
        memo: HashMap::new(),
        total: Q::zero(),
    };
    ev.run(0, Q::one());
    let k = net.words.len();
    let mut total = ev.total;
    if alg.form_degree == 1 && (k * (k.saturating_sub(1)) / 2) % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// orientation conversion

fn det(m: &Mat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for j in c..n {
                let delta = &f * &a[c][j];
                a[r][j] -= delta;
            }
        }
    }
    d
}

fn pfaffian(m: &Mat) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    if n % 2 == 1 {
        return Q::zero();
    }
    let mut total = Q::zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&x| x != j).collect();
        let sub: Mat = keep.iter().map(|&r| keep.iter().map(|&c| m[r][c].clone()).collect()).collect();
        let term = &m[0][j] * pfaffian(&sub);
        if j % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn sign_of(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign relating the vertex-order/direction orientation of a network to
/// `(edges in tensor order) (x) (faces in the given order)`. Each face is
/// named by one of its flags.
pub fn psi_sign(net: &Net, faces: &[usize]) -> Result<i32> {
    psi_sign_rooted(net, faces, 0, false)
}

/// [`psi_sign`] with the spanning tree grown from `root0`, scanning words
/// backwards when `rev`; the result does not depend on either.
pub fn psi_sign_rooted(net: &Net, faces: &[usize], root0: usize, rev: bool) -> Result<i32> {
    let k = net.words.len();
    let m = net.edges.len();
    let vof = net.vertex_of();
    let mut edge_of = vec![0; net.n_flags()];
    for (i, &(t, h)) in net.edges.iter().enumerate() {
        edge_of[t] = i;
        edge_of[h] = i;
    }
    // spanning tree by search from vertex 0, following words
    let mut seen = vec![false; k];
    let mut tree = Vec::new();
    let mut parent_edge = vec![usize::MAX; k];
    let root = root0 % k;
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        let mut ws = net.words[v].clone();
        if rev { ws.reverse(); }
        for &f in &ws {
            let u = vof[net.sigma[f]];
            if !seen[u] {
                seen[u] = true;
                tree.push(edge_of[f]);
                parent_edge[u] = edge_of[f];
                stack.push(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidInput("network is disconnected".into()));
    }
    let in_tree: Vec<bool> = (0..m).map(|e| tree.contains(&e)).collect();
    let loops: Vec<usize> = (0..m).filter(|&e| !in_tree[e]).collect();
    let r = loops.len();
    // D1: (loops, tree) against tensor order
    let mut seq = loops.clone();
    seq.extend(&tree);
    let d1 = perm::perm_sign(&seq);
    // D0: (boundaries of tree edges, vertex 0) in vertex coordinates
    let mut m0: Mat = Vec::new();
    for &e in &tree {
        let (t, h) = net.edges[e];
        let mut row = vec![Q::zero(); k];
        row[vof[h]] += Q::one();
        row[vof[t]] -= Q::one();
        m0.push(row);
    }
    let mut row = vec![Q::zero(); k];
    row[0] = Q::one();
    m0.push(row);
    let d0 = sign_of(&det(&m0));
    // face cycles in loop coordinates
    let all_faces = net.faces();
    let face_of = |f: usize| all_faces.iter().position(|c| c.contains(&f));
    if faces.len() != all_faces.len() {
        return Err(Error::Internal(format!("{} faces named, network has {}", faces.len(), all_faces.len())));
    }
    let coords = |cyc: &[usize]| -> Vec<Q> {
        let mut v = vec![Q::zero(); r];
        for &h in cyc {
            let e = edge_of[h];
            if let Some(j) = loops.iter().position(|&l| l == e) {
                if net.edges[e].0 == h {
                    v[j] += Q::one();
                } else {
                    v[j] -= Q::one();
                }
            }
        }
        v
    };
    let mut rows: Mat = Vec::new();
    for &f in &faces[..faces.len().saturating_sub(1)] {
        let c = face_of(f).ok_or_else(|| Error::Internal("unknown face".into()))?;
        rows.push(coords(&all_faces[c]));
    }
    let nf = rows.len();
    for j in 0..r {
        let mut trial = rows.clone();
        let mut e = vec![Q::zero(); r];
        e[j] = Q::one();
        trial.push(e);
        if frobenius::rank(&trial) == trial.len() {
            rows = trial;
        }
    }
    if rows.len() != r {
        return Err(Error::Internal("face cycles do not span".into()));
    }
    let dm = sign_of(&det(&rows));
    // intersection form of the loops after contracting the tree
    let mut words = net.words.clone();
    let mut owner: Vec<usize> = (0..k).collect();
    let find = |owner: &Vec<usize>, mut v: usize| {
        while owner[v] != v {
            v = owner[v];
        }
        v
    };
    for &e in &tree {
        let (t, h) = net.edges[e];
        let (u, w) = (find(&owner, vof[t]), find(&owner, vof[h]));
        let wu = &words[u];
        let wt = wu.iter().position(|&x| x == t).expect("tail in word");
        let ww = &words[w];
        let wh = ww.iter().position(|&x| x == h).expect("head in word");
        let mut merged: Vec<usize> = wu[wt + 1..].iter().chain(&wu[..wt]).copied().collect();
        merged.extend(ww[wh + 1..].iter().chain(&ww[..wh]).copied());
        words[u] = merged;
        words[w].clear();
        owner[w] = u;
    }
    let root = find(&owner, root);
    let word = &words[root];
    let pos = |f: usize| word.iter().position(|&x| x == f).expect("flag in word");
    let mut omega = frobenius::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let (ti, hi) = net.edges[loops[i]];
            let (tj, hj) = net.edges[loops[j]];
            let n = word.len();
            let rel = |f: usize| (pos(f) + n - pos(ti)) % n;
            let (a, b, c) = (rel(hi), rel(tj), rel(hj));
            omega[i][j] = if b < a && c > a {
                Q::one()
            } else if c < a && b > a {
                -Q::one()
            } else {
                Q::zero()
            };
        }
    }
    let w = &rows[nf..];
    let ww: Mat = w
        .iter()
        .map(|x| {
            w.iter()
                .map(|y| {
                    let mut s = Q::zero();
                    for i in 0..r {
                        for j in 0..r {
                            if !x[i].is_zero() && !y[j].is_zero() {
                                s += &x[i] * &y[j] * &omega[i][j];
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let pf = sign_of(&pfaffian(&ww));
    if pf == 0 || dm == 0 || d0 == 0 {
        return Err(Error::Internal("degenerate orientation data".into()));
    }
    let ng = net.ghost.iter().filter(|x| **x).count();
    let kk = ng * (r + 1) + k * (k - 1) / 2 + r * (r + 1) / 2;
    let calib = if kk % 2 == 1 { -1 } else { 1 };
    Ok(d1 * d0 * dm * pf * calib)
}

// ---------------------------------------------------------------------------
// amplitudes

/// Orientation model used for a twist.
pub fn orientation_kind(d: u8) -> OrientationKind {
    if d == 1 {
        OrientationKind::EdgesFaces
    } else {
        OrientationKind::OddEdges
    }
}

/// Amplitude on an explicitly oriented graph.
pub fn amplitude_oriented(alg: &FrobeniusData, g: &PrestableGraph, o: &Orientation, model: FragmentModel) -> Result<Q> {
    let d = alg.form_degree;
    if alg.s.is_none() {
        return Err(Error::InvalidInput("algebra has no contracting homotopy".into()));
    }
    if d == 1 && (0..g.n_vertices()).any(|v| g.vertex(v).beta >= 2) {
        return Ok(Q::zero());
    }
    let edge_order: Vec<usize> = o
        .tokens
        .iter()
        .filter_map(|t| match *t {
            Token::Edge(h) => Some(h.min(g.sigma(h))),
            _ => None,
        })
        .collect();
    if edge_order.len() != g.n_edges() {
        return Err(Error::InvalidInput("orientation does not list every edge".into()));
    }
    let ex = expand(g, model, &edge_order)?;
    let c = frobenius::tensor_terms(&frobenius::inverse_form(alg)?);
    let p = frobenius::tensor_terms(&frobenius::propagator_tensor(alg)?);
    let z = contract_net(alg, &ex.net, &c, &p)?;
    if d == 0 || z.is_zero() {
        return Ok(z);
    }
    // faces in orientation order, named by flags of the network
    let gfaces = canon::face_min(g);
    let nfaces = ex.net.faces();
    let mut named = Vec::new();
    for t in &o.tokens {
        match *t {
            Token::Face(f) => {
                let m = gfaces[f];
                let c = nfaces.iter().find(|c| c.iter().any(|&x| x < ex.real_flags && gfaces[x] == m)).ok_or_else(|| Error::Internal("face lost in expansion".into()))?;
                named.push(c[0]);
            }
            Token::Free(v, k) => named.push(ex.free_faces[v][k as usize]),
            _ => {}
        }
    }
    // tokens are read as (edges) (faces): sign of that stable partition
    let mut faces_seen = 0usize;
    let mut crossings = 0usize;
    for t in &o.tokens {
        match t {
            Token::Edge(_) => crossings += faces_seen,
            _ => faces_seen += 1,
        }
    }
    let s = psi_sign(&ex.net, &named)? * if crossings % 2 == 1 { -1 } else { 1 };
    Ok(if s < 0 { -z } else { z })
}

/// Amplitude on the reference orientation of a graph.
pub fn amplitude(alg: &FrobeniusData, g: &PrestableGraph) -> Result<Q> {
    let o = canon::ribbon_reference(g, orientation_kind(alg.form_degree));
    amplitude_oriented(alg, g, &o, FragmentModel::Standard)
}

/// Value of the decorated vertex tensor on basis inputs listed in block
/// order (blocks as stored, each from its first flag).
pub fn vertex_tensor(alg: &FrobeniusData, vd: &VertexData, inputs: &[usize]) -> Result<Q> {
    let flags: Vec<usize> = vd.blocks.iter().flatten().copied().collect();
    if flags.len() != inputs.len() {
        return Err(Error::InvalidInput("wrong number of inputs".into()));
    }
    // relabel flags 0..n, then add one ghost edge per input pointing into a
    // unit-free external slot: evaluate directly with fixed assignments
    let n = flags.len();
    let relabel: HashMap<usize, usize> = flags.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let blocks: Vec<Vec<usize>> = vd.blocks.iter().map(|b| b.iter().map(|f| relabel[f]).collect()).collect();
    let vd2 = VertexData { gamma: vd.gamma, beta: vd.beta, blocks };
    let mut fresh = n;
    let mut ghosts = Vec::new();
    let word = fragment_word(&vd2, FragmentModel::Standard, &mut fresh, &mut ghosts)?;
    let c = frobenius::tensor_terms(&frobenius::inverse_form(alg)?);
    let mut total = Q::zero();
    let mut choice = vec![0usize; ghosts.len()];
    let mut assign = vec![0usize; fresh];
    assign[..n].copy_from_slice(inputs);
    // tensor layout: ghost pairs, then inputs in block order
    let mut layout: Vec<usize> = ghosts.iter().flat_map(|&(a, b)| [a, b]).collect();
    layout.extend(0..n);
    let pos_v: HashMap<usize, usize> = word.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    loop {
        if !c.is_empty() || ghosts.is_empty() {
            let mut coef = Q::one();
            for (gi, &(a, b)) in ghosts.iter().enumerate() {
                let (i, j, x) = &c[choice[gi]];
                assign[a] = *i;
                assign[b] = *j;
                coef *= x;
            }
            let key: Vec<usize> = word.iter().map(|&f| assign[f]).collect();
            let mut prod = vec![Q::zero(); alg.dim()];
            prod[key[0]] = Q::one();
            for &x in &key[1..key.len() - 1] {
                let mut e = vec![Q::zero(); alg.dim()];
                e[x] = Q::one();
                prod = alg.mul_vec(&prod, &e);
            }
            let last = key[key.len() - 1];
            let val: Q = (0..alg.dim()).map(|i| &prod[i] * &alg.form[i][last]).sum();
            let mut flips = 0;
            for x in 0..layout.len() {
                for y in x + 1..layout.len() {
                    let (fx, fy) = (layout[x], layout[y]);
                    if pos_v[&fx] > pos_v[&fy] && alg.parity[assign[fx]] == 1 && alg.parity[assign[fy]] == 1 {
                        flips += 1;
                    }
                }
            }
            let term = coef * val;
            if flips % 2 == 1 {
                total -= term;
            } else {
                total += term;
            }
        }
        // odometer over ghost choices
        let mut i = 0;
        loop {
            if i == ghosts.len() {
                return Ok(total);
            }
            choice[i] += 1;
            if choice[i] < c.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Amplitude values on the basis of each degree of a ribbon complex.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub values: Vec<Vec<Q>>,
}

impl Cochain {
    /// `(degree, index, canonical key, value)` lines for nonzero values.
    pub fn to_text(&self, c: &GradedComplex) -> String {
        let mut out = String::new();
        for (deg, vals) in self.values.iter().enumerate() {
            for (i, v) in vals.iter().enumerate() {
                if !v.is_zero() {
                    let _ = writeln!(out, "{deg}\t{i}\t{}\t{v}", c.bases[deg][i].to_text());
                }
            }
        }
        out
    }
}

fn check_compatible(alg: &FrobeniusData, c: &GradedComplex) -> Result<()> {
    if alg.form_degree != c.spec.twist_d {
        return Err(Error::InvalidInput(format!("algebra has form degree {}, complex has twist {}", alg.form_degree, c.spec.twist_d)));
    }
    if c.bases.iter().flatten().any(|b| b.as_ribbon().is_none()) {
        return Err(Error::InvalidInput("amplitudes are defined on ribbon complexes only".into()));
    }
    Ok(())
}

pub fn partition_cochain(alg: &FrobeniusData, c: &GradedComplex) -> Result<Cochain> {
    partition_cochain_par(alg, c, 1)
}

/// [`partition_cochain`] with `width` workers over basis graphs.
pub fn partition_cochain_par(alg: &FrobeniusData, c: &GradedComplex, width: usize) -> Result<Cochain> {
    check_compatible(alg, c)?;
    let mut values = Vec::new();
    for basis in &c.bases {
        values.push(pool::try_par_map(basis, width, |b| amplitude(alg, b.as_ribbon().expect("checked")))?);
    }
    Ok(Cochain { values })
}

/// A basis graph whose boundary has nonzero amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub degree: usize,
    pub index: usize,
    pub graph: String,
    pub value: Q,
}

/// Evaluates `Z(dG)` for every basis graph `G` above the lowest degree.
pub fn boundary_values(alg: &FrobeniusData, c: &GradedComplex) -> Result<Vec<Obstruction>> {
    boundary_values_of(&partition_cochain(alg, c)?, c)
}

/// Boundary values of an already computed cochain.
pub fn boundary_values_of(z: &Cochain, c: &GradedComplex) -> Result<Vec<Obstruction>> {
    let mut out = Vec::new();
    for deg in 1..c.bases.len() {
        let mut acc = vec![Q::zero(); c.bases[deg].len()];
        for &(row, col, v) in c.diffs[deg].entries() {
            acc[col] += &z.values[deg - 1][row] * frobenius::q(v);
        }
        for (i, v) in acc.into_iter().enumerate() {
            out.push(Obstruction { degree: deg, index: i, graph: c.bases[deg][i].to_text(), value: v });
        }
    }
    Ok(out)
}

/// Cocycle check; returns the obstructions (empty when it holds).
pub fn verify_cocycle(alg: &FrobeniusData, c: &GradedComplex) -> Result<(bool, Vec<Obstruction>)> {
    verify_cocycle_of(&partition_cochain(alg, c)?, c)
}

pub fn verify_cocycle_of(z: &Cochain, c: &GradedComplex) -> Result<(bool, Vec<Obstruction>)> {
    let obs: Vec<Obstruction> = boundary_values_of(z, c)?.into_iter().filter(|o| !o.value.is_zero()).collect();
    Ok((obs.is_empty(), obs))
}

/// Value of the amplitude on the boundary of a single graph in a complex.
pub fn boundary_amplitude(alg: &FrobeniusData, c: &GradedComplex, g: &PrestableGraph) -> Result<Q> {
    let key = BasisGraph::Ribbon(canon::ribbon_canonical(g).graph);
    let deg = g.n_edges();
    let idx = c.index_of(deg, &key).ok_or_else(|| Error::InvalidInput("graph is not a basis element of the complex".into()))?;
    let obs = boundary_values(alg, c)?;
    Ok(obs.into_iter().find(|o| o.degree == deg && o.index == idx).map(|o| o.value).unwrap_or_else(Q::zero))
}

/// The three-vertex graph with a double arc between `A` and `C`, edges
/// `AB`, `BC` and a loop at `B` interleaved with `AB`.
pub fn golden_graph() -> PrestableGraph {
    // flags: A: 0 top, 1 ab, 2 bottom; B: 3 ba, 4 l1, 5 bc, 6 l2; C: 7 top, 8 cb, 9 bottom
    let mut sigma = vec![0; 10];
    for (x, y) in [(0, 7), (1, 3), (2, 9), (4, 6), (5, 8)] {
        sigma[x] = y;
        sigma[y] = x;
    }
    let rot = vec![vec![2, 1, 0], vec![5, 4, 3, 6], vec![7, 8, 9]];
    PrestableGraph::plain(sigma, rot).expect("valid ribbon graph")
}

