//! Exact linear algebra over the rationals: sparse integer matrices, rank,
//! Betti numbers, Euler characteristics and the hat regrading.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse integer matrix in coordinate form. Entries are sorted by
/// `(row, col)`, never duplicated and never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, 1)).collect() }
    }

    /// Builds a matrix from triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidInput(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            let slot = acc.entry((r, c)).or_insert(0);
            *slot = slot
                .checked_add(v)
                .ok_or_else(|| Error::Internal("matrix entry overflow".into()))?;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
        Ok(SparseIntMatrix { rows, cols, entries })
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    entries.push((r, c, v));
                }
            }
        }
        SparseIntMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.entries.binary_search_by(|&(er, ec, _)| (er, ec).cmp(&(r, c))) {
            Ok(i) => self.entries[i].2,
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            out[r][c] = v;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable();
        SparseIntMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Product `self * other` with exact integer accumulation.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), i128> = BTreeMap::new();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                *acc.entry((r, c)).or_insert(0) += v as i128 * w as i128;
            }
        }
        let mut entries = Vec::new();
        for ((r, c), v) in acc {
            if v != 0 {
                let v = i64::try_from(v).map_err(|_| Error::Internal("product entry overflow".into()))?;
                entries.push((r, c, v));
            }
        }
        Ok(SparseIntMatrix { rows: self.rows, cols: other.cols, entries })
    }

    /// Permutes rows and columns: entry `(r, c)` moves to `(row_perm[r], col_perm[c])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseIntMatrix {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (row_perm[r], col_perm[c], v)).collect();
        entries.sort_unstable();
        SparseIntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Coordinate text format: header `rows cols nnz`, then `row col value` lines.
    pub fn to_coo_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols, self.entries.len());
        for &(r, c, v) in &self.entries {
            let _ = writeln!(s, "{r} {c} {v}");
        }
        s
    }

    pub fn from_coo_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty matrix file".into()))?;
        let h: Vec<usize> = parse_fields(header, 3)?;
        let (rows, cols, nnz) = (h[0], h[1], h[2]);
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::InvalidInput(format!("bad matrix line `{line}`")));
            }
            let r = f[0].parse().map_err(|_| Error::InvalidInput(format!("bad row in `{line}`")))?;
            let c = f[1].parse().map_err(|_| Error::InvalidInput(format!("bad column in `{line}`")))?;
            let v = f[2].parse().map_err(|_| Error::InvalidInput(format!("bad value in `{line}`")))?;
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(Error::InvalidInput(format!("header announces {nnz} entries, found {}", triplets.len())));
        }
        SparseIntMatrix::from_triplets(rows, cols, triplets)
    }
}

fn parse_fields(line: &str, n: usize) -> Result<Vec<usize>> {
    let v: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::InvalidInput(format!("expected {n} integers in `{line}`"))),
    }
}

/// Primes for the modular fast path.
pub const DEFAULT_PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 1_000_000_007];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Rank of `m` reduced modulo the prime `p`.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); m.rows];
    for &(r, c, v) in &m.entries {
        let x = (v as i128).rem_euclid(p as i128) as u64;
        if x != 0 {
            rows[r].insert(c, x);
        }
    }
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for mut row in rows {
        while let Some((&lead, &lv)) = row.iter().next() {
            match pivots.get(&lead) {
                Some(prow) => {
                    // prow is normalised to leading coefficient 1
                    for (&c, &pv) in prow {
                        let cur = row.get(&c).copied().unwrap_or(0);
                        let nv = (cur + p - mul_mod(lv, pv, p)) % p;
                        if nv == 0 {
                            row.remove(&c);
                        } else {
                            row.insert(c, nv);
                        }
                    }
                }
                None => {
                    let inv = pow_mod(lv, p - 2, p);
                    for v in row.values_mut() {
                        *v = mul_mod(*v, inv, p);
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Exact rank over the rationals.
///
/// Full rank modulo any prime certifies full rank over Q. Otherwise the
/// fraction-free elimination decides.
pub fn rank_exact(m: &SparseIntMatrix) -> usize {
    rank_exact_with_primes(m, &DEFAULT_PRIMES)
}

pub fn rank_exact_with_primes(m: &SparseIntMatrix, primes: &[u64]) -> usize {
    let full = m.rows.min(m.cols);
    if m.entries.is_empty() {
        return 0;
    }
    for &p in primes {
        if rank_mod_p(m, p) == full {
            return full;
        }
    }
    rank_fraction_free(m)
}

/// Integer-preserving row echelon elimination with content extraction.
/// Sparse rows are processed first.
pub fn rank_fraction_free(m: &SparseIntMatrix) -> usize {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.rows];
    for &(r, c, v) in &m.entries {
        rows[r].insert(c, BigInt::from(v));
    }
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for mut row in rows {
        while let Some((&lead, lv)) = row.iter().next() {
            let lv = lv.clone();
            match pivots.get(&lead) {
                Some(prow) => {
                    let pv = &prow[&lead];
                    let g = pv.gcd(&lv);
                    let a = pv / &g;
                    let b = &lv / &g;
                    let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (c, v) in &row {
                        next.insert(*c, v * &a);
                    }
                    for (c, v) in prow {
                        let e = next.entry(*c).or_insert_with(BigInt::zero);
                        *e -= v * &b;
                    }
                    next.retain(|_, v| !v.is_zero());
                    remove_content(&mut next);
                    row = next;
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn remove_content(row: &mut BTreeMap<usize, BigInt>) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.values_mut() {
        *v = &*v / &g;
    }
    if row.values().next().is_some_and(|v| v.is_negative()) {
        for v in row.values_mut() {
            *v = -&*v;
        }
    }
}

/// A chain complex given by its dimensions and differentials only.
///
/// `dims[i]` is the dimension in degree `i`; `diffs[i]` maps degree `i` to
/// degree `i - 1` (so `diffs[0]` is the zero map to nothing). `complete`
/// says whether every degree above the last one is known to vanish.
#[derive(Clone, Debug)]
pub struct ChainData {
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseIntMatrix>,
    pub complete: bool,
}

/// Homology report. In an incomplete window the top Betti number is only
/// bounded: `top_bounds = (lower, upper)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiReport {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub betti: Vec<usize>,
    pub complete: bool,
    pub top_bounds: Option<(usize, usize)>,
}

pub fn ranks(c: &ChainData) -> Vec<usize> {
    c.diffs.iter().map(rank_exact).collect()
}

/// Ranks of every differential using `primes` for the fast path and
/// `width` workers, one matrix per job.
pub fn ranks_par(c: &ChainData, primes: &[u64], width: usize) -> Vec<usize> {
    crate::pool::par_map(&c.diffs, width, |m| rank_exact_with_primes(m, primes))
}

pub fn betti(c: &ChainData) -> BettiReport {
    let ranks = ranks(c);
    betti_from_ranks(&c.dims, &ranks, c.complete)
}

pub fn betti_from_ranks(dims: &[usize], ranks: &[usize], complete: bool) -> BettiReport {
    let n = dims.len();
    let betti: Vec<usize> = (0..n)
        .map(|i| {
            let out = if i < ranks.len() { ranks[i] } else { 0 };
            let inc = if i + 1 < ranks.len() { ranks[i + 1] } else { 0 };
            dims[i].saturating_sub(out + inc)
        })
        .collect();
    let top_bounds = if complete || n == 0 {
        None
    } else {
        // the unknown incoming map can kill at most the cycles in the top degree
        Some((0, betti[n - 1]))
    };
    BettiReport { dims: dims.to_vec(), ranks: ranks.to_vec(), betti, complete, top_bounds }
}

/// Euler characteristic of the chain groups.
pub fn euler_characteristic(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// Euler characteristic of a Betti sequence.
pub fn euler_of_betti(betti: &[usize]) -> i64 {
    euler_characteristic(betti)
}

/// Hat regrading: `hat[0] = 1` and `hat[k] = h[k-1]` for `k > 0`, where `h`
/// is indexed by cohomological degree.
pub fn hat_betti(h: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(h.len() + 1);
    out.push(1);
    out.extend_from_slice(h);
    out
}

impl BettiReport {
    /// Line-keyed text record.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "dims: {}", join(&self.dims));
        let _ = writeln!(s, "ranks: {}", join(&self.ranks));
        let _ = writeln!(s, "betti: {}", join(&self.betti));
        let _ = writeln!(s, "euler: {}", euler_characteristic(&self.dims));
        let _ = writeln!(s, "complete: {}", self.complete);
        if let Some((lo, hi)) = self.top_bounds {
            let _ = writeln!(s, "top_bounds: {lo} {hi}");
        }
        s
    }
}
