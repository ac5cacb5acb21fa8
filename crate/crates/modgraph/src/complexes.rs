//! Graded graph complexes and their differentials.
//!
//! Degree `i` holds the nonzero canonical graphs with `i` (black) edges, each
//! with its reference orientation; `diffs[i]` maps degree `i` to `i - 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::canon::{self, Orientation, OrientationKind, Token};
use crate::error::{Error, Result};
use crate::graphs::{self, CommFamily, CommGraph, HalfEdgeGraph};
use crate::linalg::{ChainData, SparseIntMatrix};
use crate::perm::reorder_sign;
use crate::ribbon::{self, AssFamily, Circle, PrestableGraph, Splice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    ComUnder,
    ComBar,
    Ass(AssFamily),
    /// two-coloured commutative graphs, graded by black edges
    Bv,
    /// legged commutative graphs with dotted legs
    Dft,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::ComUnder => "com-underline",
            Family::ComBar => "com-bar",
            Family::Ass(a) => a.name(),
            Family::Bv => "bv",
            Family::Dft => "dft",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "com-underline" | "com" => Family::ComUnder,
            "com-bar" => Family::ComBar,
            "ass-underline" | "ass" => Family::Ass(AssFamily::Under),
            "kass" => Family::Ass(AssFamily::K),
            "ass-bar" => Family::Ass(AssFamily::Bar),
            "rass" => Family::Ass(AssFamily::R),
            "krass" => Family::Ass(AssFamily::KR),
            "bv" => Family::Bv,
            "dft" => Family::Dft,
            _ => return Err(Error::InvalidInput(format!("unknown family {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Params {
    Genus(u32),
    Surface { gamma: u32, nu: u32 },
    Legged { genus: u32, legs: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ComplexSpec {
    pub family: Family,
    pub twist_d: u8,
    pub params: Params,
    pub edge_cutoff: usize,
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={} ", self.family.name(), self.twist_d)?;
        match self.params {
            Params::Genus(g) => write!(f, "g={g}")?,
            Params::Surface { gamma, nu } => write!(f, "gamma={gamma} nu={nu}")?,
            Params::Legged { genus, legs } => write!(f, "g={genus} n={legs}")?,
        }
        write!(f, " cutoff={}", self.edge_cutoff)
    }
}

impl ComplexSpec {
    pub fn comm(family: CommFamily, twist_d: u8, genus: u32, edge_cutoff: usize) -> Self {
        let family = match family {
            CommFamily::Under => Family::ComUnder,
            CommFamily::Bar => Family::ComBar,
        };
        ComplexSpec { family, twist_d, params: Params::Genus(genus), edge_cutoff }
    }

    pub fn ass(family: AssFamily, twist_d: u8, gamma: u32, nu: u32, edge_cutoff: usize) -> Self {
        ComplexSpec { family: Family::Ass(family), twist_d, params: Params::Surface { gamma, nu }, edge_cutoff }
    }

    /// Largest edge count any graph of these parameters can have.
    pub fn max_edges(&self) -> usize {
        match (self.family, self.params) {
            (_, Params::Genus(g)) => (3 * g as usize).saturating_sub(3),
            (_, Params::Surface { gamma, nu }) => (6 * gamma as usize + 3 * nu as usize).saturating_sub(6),
            (Family::Dft, Params::Legged { genus, legs }) => (3 * genus as usize + legs).saturating_sub(3) + legs,
            (_, Params::Legged { genus, legs }) => (3 * genus as usize + legs).saturating_sub(3),
        }
    }

    pub fn orientation_kind(&self) -> OrientationKind {
        match (self.family, self.twist_d) {
            (_, 0) | (Family::Bv, _) | (Family::Dft, _) => OrientationKind::OddEdges,
            (Family::Ass(_), _) => OrientationKind::EdgesFaces,
            _ => OrientationKind::VertexDirections,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.twist_d > 1 {
            return Err(Error::InvalidInput(format!("twist d must be 0 or 1, got {}", self.twist_d)));
        }
        match (self.family, self.params) {
            (Family::ComUnder | Family::ComBar | Family::Bv, Params::Genus(g)) => {
                if g < 2 {
                    return Err(Error::InvalidInput(format!("legless commutative graphs need genus >= 2, got {g}")));
                }
            }
            (Family::Ass(_), Params::Surface { gamma, nu }) => {
                if nu == 0 || 2 * (gamma as i64 - 1) + nu as i64 <= 0 {
                    return Err(Error::InvalidInput(format!("surface ({gamma},{nu}) is not stable")));
                }
            }
            (Family::Dft, Params::Legged { genus, legs }) => {
                if legs == 0 || !graphs::vertex_is_stable(genus, legs) {
                    return Err(Error::InvalidInput(format!("({genus},{legs}) is not a stable legged type")));
                }
            }
            _ => return Err(Error::InvalidInput(format!("parameters do not fit family {}", self.family.name()))),
        }
        Ok(())
    }
}

/// Canonical basis graph with its reference orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisGraph {
    Comm { graph: CommGraph, black: Option<Vec<bool>> },
    Ribbon(PrestableGraph),
}

impl BasisGraph {
    pub fn to_text(&self) -> String {
        match self {
            BasisGraph::Comm { graph, black } => match black {
                Some(b) => graphs::comm_to_text(graph, Some(b)),
                None => graph.to_text(),
            },
            BasisGraph::Ribbon(g) => g.to_text(),
        }
    }

    pub fn as_ribbon(&self) -> Option<&PrestableGraph> {
        match self {
            BasisGraph::Ribbon(g) => Some(g),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub spec: ComplexSpec,
    pub bases: Vec<Vec<BasisGraph>>,
    pub diffs: Vec<SparseIntMatrix>,
    /// every degree up to the top of the window is exact, including the
    /// incoming differential of the top degree
    pub complete: bool,
}

impl GradedComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn chain_data(&self) -> ChainData {
        ChainData { dims: self.dims(), diffs: self.diffs.clone(), complete: self.complete }
    }

    pub fn index_of(&self, degree: usize, g: &BasisGraph) -> Option<usize> {
        self.bases.get(degree)?.iter().position(|b| b == g)
    }

    /// Basis listing, one canonical serialization per line.
    pub fn basis_text(&self, degree: usize) -> String {
        let mut out = String::new();
        for (i, b) in self.bases[degree].iter().enumerate() {
            out.push_str(&format!("{i}\t{}\n", b.to_text()));
        }
        out
    }
}

/// A single term `sign * target` of the differential of a basis graph.
#[derive(Clone, Debug)]
pub struct Term {
    pub target: BasisGraph,
    pub sign: i32,
}

// ---------------------------------------------------------------------------
// contraction signs

fn move_to_front(tokens: &[Token], front: &[Token]) -> Option<(i32, Vec<Token>)> {
    let mut reordered: Vec<Token> = front.to_vec();
    reordered.extend(tokens.iter().filter(|t| !front.contains(t)).copied());
    Some((reorder_sign(tokens, &reordered)?, reordered))
}

fn edge_pos(tokens: &[Token], f: usize) -> Option<usize> {
    tokens.iter().position(|t| *t == Token::Edge(f))
}

fn parity(i: usize) -> i32 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Contraction of a commutative graph along the edge with tail `h` (the
/// smaller flag), from its reference orientation. Returns the contracted
/// graph, its induced orientation and the sign of the reordering.
pub(crate) fn comm_contract_oriented(
    g: &CommGraph,
    black: Option<&[bool]>,
    h: usize,
    kind: OrientationKind,
) -> Result<(CommGraph, Option<Vec<bool>>, Orientation, i32)> {
    let s = g.skeleton();
    let k = s.sigma(h);
    let reference = canon::comm_reference(g, black, kind);
    let (gc, fmap, vmap) = graphs::contract_edge_mapped(g, h, k)?;
    let new_black = black.map(|b| {
        let mut nb = vec![false; gc.skeleton().n_flags()];
        for f in 0..b.len() {
            if let Some(x) = fmap[f] {
                nb[x] = b[f];
            }
        }
        nb
    });
    let map_tok = |t: &Token| match *t {
        Token::Vertex(v) => Token::Vertex(vmap[v]),
        Token::Edge(f) => Token::Edge(fmap[f].expect("edge kept")),
        other => other,
    };
    let tails: Vec<usize> = reference.tails.iter().filter(|&&t| t != h).map(|&t| fmap[t].expect("kept")).collect();
    let (sign, tokens) = match kind {
        OrientationKind::OddEdges => {
            let p = edge_pos(&reference.tokens, h).ok_or_else(|| Error::Internal("contracted edge is not odd".into()))?;
            let rest: Vec<Token> = reference.tokens.iter().filter(|t| **t != Token::Edge(h)).map(map_tok).collect();
            (parity(p), rest)
        }
        OrientationKind::VertexDirections => {
            let (u, w) = (s.vertex_of(h), s.vertex_of(k));
            if u == w {
                return Err(Error::Internal("loop contraction has no vertex-direction image".into()));
            }
            let (sign, reordered) = move_to_front(&reference.tokens, &[Token::Vertex(u), Token::Vertex(w)]).expect("tokens present");
            let mut out = vec![Token::Vertex(vmap[u])];
            out.extend(reordered[2..].iter().map(map_tok));
            (sign, out)
        }
        OrientationKind::EdgesFaces => return Err(Error::Internal("face orientation on a commutative graph".into())),
    };
    Ok((gc, new_black, Orientation { tokens, tails }, sign))
}

/// Contraction of a prestable graph along the edge through `h`, from its
/// reference orientation. Faces survive the contraction; a face made only of
/// the two contracted flags becomes a free boundary.
pub(crate) fn ribbon_contract_oriented(g: &PrestableGraph, h: usize, kind: OrientationKind) -> Result<(PrestableGraph, Orientation, i32)> {
    let reference = canon::ribbon_reference(g, kind);
    let c = ribbon::contract_ribbon_edge_detailed(g, h)?;
    let k = g.sigma(h);
    let p = edge_pos(&reference.tokens, h.min(k)).ok_or_else(|| Error::Internal("contracted edge missing".into()))?;
    let u1 = c.vertex_map[g.vertex_of(h)];
    let free = |x: Circle| match x {
        Circle::Free(i) => Some(Token::Free(u1, i)),
        Circle::Block(_) => None,
    };
    // faces consisting only of h and k, and the free boundary each becomes
    let (face_h, face_k) = match c.splice {
        Splice::Merge { merged } | Splice::Fuse { merged } => (free(merged), free(merged)),
        Splice::Split { first, second } => (free(second), free(first)),
    };
    let fmin = canon::face_min(g);
    let mut tokens = Vec::new();
    for t in &reference.tokens {
        let m = match *t {
            Token::Edge(f) if f == h.min(k) => continue,
            Token::Edge(f) => Token::Edge(c.flag_map[f].expect("kept")),
            Token::Face(f) => {
                let cyc: Vec<usize> = (0..g.n_flags()).filter(|&x| fmin[x] == f).collect();
                match cyc.iter().find_map(|&x| c.flag_map[x]) {
                    Some(x) => Token::Face(x),
                    None if cyc.contains(&h) => face_h.ok_or_else(|| Error::Internal("lost face".into()))?,
                    None => face_k.ok_or_else(|| Error::Internal("lost face".into()))?,
                }
            }
            Token::Free(v, i) => Token::Free(c.vertex_map[v], c.free_map[v][i as usize]),
            Token::Vertex(v) => Token::Vertex(c.vertex_map[v]),
        };
        tokens.push(m);
    }
    Ok((c.graph, Orientation { tokens, tails: Vec::new() }, parity(p)))
}

/// Canonical target and sign of an oriented commutative graph; `None` when
/// it vanishes by symmetry.
fn comm_resolve(g: &CommGraph, black: Option<&[bool]>, o: &Orientation, kind: OrientationKind) -> Result<Option<(BasisGraph, i32)>> {
    let c = canon::comm_canonical(g, black);
    if canon::comm_is_zero(&c, kind) {
        return Ok(None);
    }
    let s = canon::comm_transport_sign(g.skeleton(), o, &c.flag_map, &c.vertex_map, &c.graph, c.black.as_deref(), kind)
        .ok_or_else(|| Error::Internal("orientation transport failed".into()))?;
    Ok(Some((BasisGraph::Comm { graph: c.graph, black: c.black }, s)))
}

fn ribbon_resolve(g: &PrestableGraph, o: &Orientation, kind: OrientationKind) -> Result<Option<(BasisGraph, i32)>> {
    let c = canon::ribbon_canonical(g);
    if canon::ribbon_is_zero(&c, kind) {
        return Ok(None);
    }
    let s = canon::ribbon_transport_sign(g, o, &c.flag_map, &c.vertex_map, &c.graph, kind)
        .ok_or_else(|| Error::Internal("orientation transport failed".into()))?;
    Ok(Some((BasisGraph::Ribbon(c.graph), s)))
}

/// Terms of the differential of a basis graph, before family filtering of
/// the targets.
pub fn differential_terms(spec: &ComplexSpec, b: &BasisGraph) -> Result<Vec<Term>> {
    let kind = spec.orientation_kind();
    let mut out = Vec::new();
    match b {
        BasisGraph::Comm { graph, black } => {
            let s = graph.skeleton();
            for (h, _) in s.edges() {
                if black.as_ref().is_some_and(|bl| !bl[h]) {
                    continue;
                }
                if s.is_loop(h) && (spec.family == Family::ComUnder || kind == OrientationKind::VertexDirections) {
                    continue;
                }
                let (gc, nb, o, s1) = comm_contract_oriented(graph, black.as_deref(), h, kind)?;
                if let Some((target, s2)) = comm_resolve(&gc, nb.as_deref(), &o, kind)? {
                    out.push(Term { target, sign: s1 * s2 });
                }
                if spec.family == Family::Bv {
                    // recolour e white: same token removal as the contraction
                    let bl = black.as_ref().expect("coloured");
                    let reference = canon::comm_reference(graph, Some(bl), kind);
                    let p = edge_pos(&reference.tokens, h).expect("black edge");
                    let mut nb = bl.clone();
                    nb[h] = false;
                    nb[s.sigma(h)] = false;
                    let o = Orientation { tokens: reference.tokens.iter().filter(|t| **t != Token::Edge(h)).copied().collect(), tails: Vec::new() };
                    if let Some((target, s2)) = comm_resolve(graph, Some(&nb), &o, kind)? {
                        out.push(Term { target, sign: parity(p) * s2 });
                    }
                }
            }
        }
        BasisGraph::Ribbon(g) => {
            for (h, _) in g.edges() {
                let (gc, o, s1) = ribbon_contract_oriented(g, h, kind)?;
                if let Some((target, s2)) = ribbon_resolve(&gc, &o, kind)? {
                    out.push(Term { target, sign: s1 * s2 });
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// bases

fn comm_nonzero(g: &CommGraph, black: Option<&[bool]>, kind: OrientationKind) -> Option<BasisGraph> {
    let c = canon::comm_canonical(g, black);
    (!canon::comm_is_zero(&c, kind)).then_some(BasisGraph::Comm { graph: c.graph, black: c.black })
}

/// Basis graphs per degree for degrees `0..=top`.
fn build_bases(spec: &ComplexSpec, top: usize) -> Vec<Vec<BasisGraph>> {
    let kind = spec.orientation_kind();
    match (spec.family, spec.params) {
        (Family::ComUnder | Family::ComBar, Params::Genus(g)) => {
            let fam = if spec.family == Family::ComUnder { CommFamily::Under } else { CommFamily::Bar };
            graphs::enumerate_stable_graphs_upto(g, 0, top, fam)
                .into_iter()
                .map(|lvl| lvl.iter().filter_map(|x| comm_nonzero(x, None, kind)).collect())
                .collect()
        }
        (Family::Ass(fam), Params::Surface { gamma, nu }) => ribbon::enumerate_prestable_upto(gamma, nu, top, fam)
            .into_iter()
            .map(|lvl| {
                lvl.into_iter()
                    .filter(|x| !canon::ribbon_is_zero(&canon::ribbon_canonical(x), kind))
                    .map(BasisGraph::Ribbon)
                    .collect()
            })
            .collect(),
        (Family::Bv, Params::Genus(g)) => {
            let all: Vec<CommGraph> = graphs::enumerate_stable_graphs_upto(g, 0, spec.max_edges(), CommFamily::Bar).into_iter().flatten().collect();
            let mut levels: Vec<BTreeSet<BasisKey>> = vec![BTreeSet::new(); top + 1];
            for x in &all {
                let edges = x.skeleton().edges();
                for mask in 0u64..(1u64 << edges.len()) {
                    let nb = mask.count_ones() as usize;
                    if nb > top {
                        continue;
                    }
                    let mut black = vec![false; x.skeleton().n_flags()];
                    for (i, &(h, k)) in edges.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            black[h] = true;
                            black[k] = true;
                        }
                    }
                    if let Some(BasisGraph::Comm { graph, black }) = comm_nonzero(x, Some(&black), kind) {
                        levels[nb].insert(BasisKey(graph, black.expect("coloured")));
                    }
                }
            }
            levels
                .into_iter()
                .map(|l| l.into_iter().map(|BasisKey(graph, black)| BasisGraph::Comm { graph, black: Some(black) }).collect())
                .collect()
        }
        (Family::Dft, Params::Legged { genus, legs }) => {
            let all: Vec<CommGraph> =
                graphs::enumerate_stable_graphs_upto(genus, legs, (3 * genus as usize + legs).saturating_sub(3), CommFamily::Bar)
                    .into_iter()
                    .flatten()
                    .collect();
            let mut levels: Vec<BTreeSet<CommGraph>> = vec![BTreeSet::new(); top + 1];
            for x in &all {
                for mask in 0u64..(1u64 << legs) {
                    let dotted = add_dots(x, mask);
                    let e = dotted.n_edges();
                    if e > top {
                        continue;
                    }
                    if let Some(BasisGraph::Comm { graph, .. }) = comm_nonzero(&dotted, None, kind) {
                        levels[e].insert(graph);
                    }
                }
            }
            levels.into_iter().map(|l| l.into_iter().map(|graph| BasisGraph::Comm { graph, black: None }).collect()).collect()
        }
        _ => vec![Vec::new(); top + 1],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct BasisKey(CommGraph, Vec<bool>);

/// Puts a bivalent genus-0 vertex on every leg whose bit is set in `mask`
/// (bit `i` is leg `i + 1`).
pub fn add_dots(g: &CommGraph, mask: u64) -> CommGraph {
    let s = g.skeleton();
    let mut sigma = s.sigma_vec().to_vec();
    let mut vertex_of = s.vertex_vec().to_vec();
    let mut legs = s.leg_vec().to_vec();
    let mut genus = g.genus_vec().to_vec();
    for (label, f) in s.legs() {
        if mask >> (label - 1) & 1 == 0 {
            continue;
        }
        let v = genus.len();
        genus.push(0);
        let a = sigma.len();
        // f becomes an edge flag paired with a, the dot carries the leg on a+1
        sigma.push(f);
        sigma[f] = a;
        vertex_of.push(v);
        legs.push(None);
        legs[f] = None;
        sigma.push(a + 1);
        vertex_of.push(v);
        legs.push(Some(label));
    }
    let nv = genus.len();
    CommGraph::new_unchecked(HalfEdgeGraph::new_unchecked(sigma, vertex_of, nv, legs), genus)
}

/// Builds the complex of `spec`, exact in degrees `0..=edge_cutoff`.
pub fn build_complex(spec: &ComplexSpec) -> Result<GradedComplex> {
    spec.validate()?;
    let max = spec.max_edges();
    let top = spec.edge_cutoff.min(max);
    let bases = build_bases(spec, top);
    let mut index: Vec<HashMap<BasisGraph, usize>> = Vec::new();
    for lvl in &bases {
        index.push(lvl.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect());
    }
    let mut diffs = vec![SparseIntMatrix::zeros(0, bases[0].len())];
    for i in 1..bases.len() {
        let mut trip = Vec::new();
        for (col, b) in bases[i].iter().enumerate() {
            for t in differential_terms(spec, b)? {
                if let Some(&row) = index[i - 1].get(&t.target) {
                    trip.push((row, col, t.sign as i64));
                } else if target_admitted(spec, &t.target) {
                    return Err(Error::Internal(format!("differential target missing from basis: {}", t.target.to_text())));
                }
            }
        }
        diffs.push(SparseIntMatrix::from_triplets(bases[i - 1].len(), bases[i].len(), trip)?);
    }
    Ok(GradedComplex { spec: *spec, bases, diffs, complete: spec.edge_cutoff >= max })
}

fn target_admitted(spec: &ComplexSpec, t: &BasisGraph) -> bool {
    match (spec.family, t) {
        (Family::ComUnder, BasisGraph::Comm { graph, .. }) => graph.genus_vec().iter().all(|&x| x == 0),
        (Family::Ass(f), BasisGraph::Ribbon(g)) => f.admits_graph(g),
        _ => true,
    }
}

pub fn build_bv_complex(genus: u32, edge_cutoff: usize) -> Result<GradedComplex> {
    build_complex(&ComplexSpec { family: Family::Bv, twist_d: 0, params: Params::Genus(genus), edge_cutoff })
}

pub fn build_dft_comm_complex(genus: u32, legs: usize, edge_cutoff: usize) -> Result<GradedComplex> {
    build_complex(&ComplexSpec { family: Family::Dft, twist_d: 0, params: Params::Legged { genus, legs }, edge_cutoff })
}

/// Failure witness of `d^2 = 0`: degree and column of the source and the
/// nonzero composite column as `(row, value)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquaredWitness {
    pub degree: usize,
    pub column: usize,
    pub source: String,
    pub composite: Vec<(usize, i64)>,
}

pub fn check_d_squared(c: &GradedComplex) -> std::result::Result<(), DSquaredWitness> {
    check_d_squared_matrices(&c.diffs).map_err(|(degree, column, composite)| DSquaredWitness {
        degree,
        column,
        source: c.bases[degree][column].to_text(),
        composite,
    })
}

/// `diffs[i-1] * diffs[i] == 0` for all `i`; on failure the degree, column
/// and composite column.
pub fn check_d_squared_matrices(diffs: &[SparseIntMatrix]) -> std::result::Result<(), (usize, usize, Vec<(usize, i64)>)> {
    for i in 2..diffs.len() {
        let prod = diffs[i - 1].mul(&diffs[i]).expect("shapes agree");
        if let Some(&(_, col, _)) = prod.entries().first() {
            let composite = prod.entries().iter().filter(|e| e.1 == col).map(|&(r, _, v)| (r, v)).collect();
            return Err((i, col, composite));
        }
    }
    Ok(())
}

/// Coordinate-format export of every differential plus basis listings.
pub fn export_text(c: &GradedComplex) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..c.bases.len() {
        out.push((format!("basis_{i}.txt"), c.basis_text(i)));
        if i > 0 {
            out.push((format!("d_{i}.coo"), c.diffs[i].to_coo_text()));
        }
    }
    out
}
