//! Finite-dimensional Z/2-graded Frobenius algebras with a differential,
//! a contracting homotopy and an optional projector, over the rationals.
//!
//! Matrices act on column vectors: `d[i][j]` is the coefficient of `e_i`
//! in `d(e_j)`. Structure constants: `e_i e_j = sum_k mult[i][j][k] e_k`.
//! The inverse form is `C = sum c_ij e_i (x) e_j` normalised by
//! `sum_i (-1)^{d |b_i|} <x, a_i> b_i = x`, `d` the degree of the form.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type Mat = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn sgn(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusData {
    pub names: Vec<String>,
    pub parity: Vec<u8>,
    pub form_degree: u8,
    pub mult: Vec<Vec<Vec<Q>>>,
    pub form: Mat,
    pub d: Mat,
    pub s: Option<Mat>,
    pub t: Option<Mat>,
}

/// One identity of the validation report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = write!(out, "{}\t{}", c.name, if c.passed { "pass" } else { "FAIL" });
            if let Some(w) = &c.witness {
                let _ = write!(out, "\t{w}");
            }
            out.push('\n');
        }
        out
    }
}

/// Outcome of a relation check, with the offending input on failure.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationResult {
    pub holds: bool,
    /// `(input basis name, nonzero value as a vector)`
    pub witness: Option<(String, Vec<Q>)>,
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Q::zero(); c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = zeros(r, c);
    for i in 0..r {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

fn mat_vec(a: &Mat, v: &[Q]) -> Vec<Q> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    let n = m.len();
    let mut a: Mat = m.iter().zip(identity(n)).map(|(r, i)| r.iter().cloned().chain(i).collect()).collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the null space of `m` (as column vectors).
fn null_space(m: &Mat, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b`; `None` when inconsistent.
fn solve(m: &Mat, b: &[Q]) -> Option<Vec<Q>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Mat = m.iter().zip(b).map(|(r, x)| r.iter().cloned().chain(std::iter::once(x.clone())).collect()).collect();
    let piv = rref(&mut a);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &p) in piv.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}

fn fmt_vec(names: &[String], v: &[Q]) -> String {
    let terms: Vec<String> = v.iter().zip(names).filter(|(c, _)| !c.is_zero()).map(|(c, n)| format!("{c}*{n}")).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl FrobeniusData {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::InvalidInput(format!("unknown basis element {name:?}")))
    }

    /// Product of basis elements as a coefficient vector.
    pub fn product(&self, i: usize, j: usize) -> &[Q] {
        &self.mult[i][j]
    }

    /// Product of two vectors.
    pub fn mul_vec(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    if !self.mult[i][j][k].is_zero() {
                        *o += &c * &self.mult[i][j][k];
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        let mut s = Q::zero();
        for i in 0..self.dim() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim() {
                if !y[j].is_zero() && !self.form[i][j].is_zero() {
                    s += &x[i] * &y[j] * &self.form[i][j];
                }
            }
        }
        s
    }

    fn basis_vec(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    fn col(&self, m: &Mat, j: usize) -> Vec<Q> {
        (0..self.dim()).map(|i| m[i][j].clone()).collect()
    }

    fn odd(&self, i: usize) -> bool {
        self.parity[i] & 1 == 1
    }
}

/// Evaluates every defining identity exactly.
pub fn validate(a: &FrobeniusData) -> ValidationReport {
    let n = a.dim();
    let names = &a.names;
    let mut checks = Vec::new();
    let mut push = |name: &'static str, witness: Option<String>| checks.push(Check { name, passed: witness.is_none(), witness });

    let shape_ok = a.parity.len() == n
        && a.mult.len() == n
        && a.mult.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n))
        && [&a.form, &a.d].iter().all(|m| m.len() == n && m.iter().all(|r| r.len() == n))
        && a.s.iter().chain(a.t.iter()).all(|m| m.len() == n && m.iter().all(|r| r.len() == n));
    if !shape_ok {
        push("shape", Some("matrix dimensions disagree with the basis".into()));
        return ValidationReport { checks };
    }
    push("shape", None);

    let mut w = None;
    'grading: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !a.mult[i][j][k].is_zero() && !(a.parity[i] + a.parity[j] + a.parity[k]).is_multiple_of(2) {
                    w = Some(format!("{}*{} has a component on {}", names[i], names[j], names[k]));
                    break 'grading;
                }
            }
            if !a.form[i][j].is_zero() && !(a.parity[i] + a.parity[j] + a.form_degree).is_multiple_of(2) {
                w = Some(format!("<{},{}> violates the form degree", names[i], names[j]));
                break 'grading;
            }
        }
    }
    push("grading", w);

    let parity_of_map = |m: &Mat, odd: bool| -> Option<String> {
        for i in 0..n {
            for j in 0..n {
                if !m[i][j].is_zero() && ((a.parity[i] + a.parity[j]) % 2 == 1) != odd {
                    return Some(format!("{} -> {}", names[j], names[i]));
                }
            }
        }
        None
    };
    push("d_odd", parity_of_map(&a.d, true));

    let mut w = None;
    'assoc: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let l = a.mul_vec(&a.mul_vec(&a.basis_vec(i), &a.basis_vec(j)), &a.basis_vec(k));
                let r = a.mul_vec(&a.basis_vec(i), &a.mul_vec(&a.basis_vec(j), &a.basis_vec(k)));
                if l != r {
                    w = Some(format!("({},{},{})", names[i], names[j], names[k]));
                    break 'assoc;
                }
            }
        }
    }
    push("associativity", w);

    let mut w = None;
    'sym: for i in 0..n {
        for j in 0..n {
            if a.form[i][j] != sgn(a.odd(i) && a.odd(j)) * &a.form[j][i] {
                w = Some(format!("({},{})", names[i], names[j]));
                break 'sym;
            }
        }
    }
    push("form_symmetry", w);

    let mut w = None;
    'inv: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let l = a.pair(&a.mul_vec(&a.basis_vec(i), &a.basis_vec(j)), &a.basis_vec(k));
                let r = a.pair(&a.basis_vec(i), &a.mul_vec(&a.basis_vec(j), &a.basis_vec(k)));
                if l != r {
                    w = Some(format!("({},{},{})", names[i], names[j], names[k]));
                    break 'inv;
                }
            }
        }
    }
    push("form_invariance", w);
    push("form_nondegenerate", (rank(&a.form) < n).then(|| format!("rank {} < {n}", rank(&a.form))));

    let dd = mat_mul(&a.d, &a.d);
    push("d_squared", (dd != zeros(n, n)).then(|| "d^2 != 0".to_string()));

    let mut w = None;
    'der: for i in 0..n {
        for j in 0..n {
            let x = a.basis_vec(i);
            let y = a.basis_vec(j);
            let l = mat_vec(&a.d, &a.mul_vec(&x, &y));
            let r1 = a.mul_vec(&mat_vec(&a.d, &x), &y);
            let r2 = a.mul_vec(&x, &mat_vec(&a.d, &y));
            let s = sgn(a.odd(i));
            let r: Vec<Q> = r1.iter().zip(&r2).map(|(p, q2)| p + &s * q2).collect();
            if l != r {
                w = Some(format!("({},{})", names[i], names[j]));
                break 'der;
            }
        }
    }
    push("d_derivation", w);

    let mut w = None;
    'dc: for i in 0..n {
        for j in 0..n {
            let v = a.pair(&a.col(&a.d, i), &a.basis_vec(j)) + sgn(a.odd(i)) * a.pair(&a.basis_vec(i), &a.col(&a.d, j));
            if !v.is_zero() {
                w = Some(format!("({},{}) -> {v}", names[i], names[j]));
                break 'dc;
            }
        }
    }
    push("d_form_compatible", w);

    if let Some(s) = &a.s {
        push("s_odd", parity_of_map(s, true));
        push("s_squared", (mat_mul(s, s) != zeros(n, n)).then(|| "s^2 != 0".to_string()));
        let mut w = None;
        'sc: for i in 0..n {
            for j in 0..n {
                let l = a.pair(&a.col(s, i), &a.basis_vec(j));
                let r = sgn(a.odd(i)) * a.pair(&a.basis_vec(i), &a.col(s, j));
                if l != r {
                    w = Some(format!("({},{})", names[i], names[j]));
                    break 'sc;
                }
            }
        }
        push("s_form_compatible", w);
        let ds_sd: Mat = {
            let x = mat_mul(&a.d, s);
            let y = mat_mul(s, &a.d);
            x.iter().zip(&y).map(|(r1, r2)| r1.iter().zip(r2).map(|(p, q2)| p + q2).collect()).collect()
        };
        let mut target = identity(n);
        if let Some(t) = &a.t {
            for i in 0..n {
                for j in 0..n {
                    target[i][j] -= &t[i][j];
                }
            }
        }
        let w = (0..n).find(|&j| a.col(&ds_sd, j) != a.col(&target, j)).map(|j| {
            format!("(ds+sd)({}) = {}", names[j], fmt_vec(names, &a.col(&ds_sd, j)))
        });
        push("homotopy", w);
    }
    if let Some(t) = &a.t {
        push("t_even", parity_of_map(t, false));
        push("t_idempotent", (mat_mul(t, t) != *t).then(|| "t^2 != t".to_string()));
        push("t_commutes_d", (mat_mul(&a.d, t) != mat_mul(t, &a.d)).then(|| "dt != td".to_string()));
        let mut w = None;
        'tc: for i in 0..n {
            for j in 0..n {
                if a.pair(&a.col(t, i), &a.basis_vec(j)) != a.pair(&a.basis_vec(i), &a.col(t, j)) {
                    w = Some(format!("({},{})", names[i], names[j]));
                    break 'tc;
                }
            }
        }
        push("t_form_compatible", w);
        if let Some(s) = &a.s {
            let ok = mat_mul(s, t) == zeros(n, n) && mat_mul(t, s) == zeros(n, n);
            push("st_zero", (!ok).then(|| "st or ts nonzero".to_string()));
        }
    }
    ValidationReport { checks }
}

/// Inverse form as a coefficient matrix `c` with `C = sum c[i][j] e_i (x) e_j`.
pub fn inverse_form(a: &FrobeniusData) -> Result<Mat> {
    let inv = inverse(&a.form).ok_or_else(|| Error::InvalidInput("the inner product is degenerate".into()))?;
    let n = a.dim();
    let mut c = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            c[i][j] = sgn(a.form_degree == 1 && a.odd(j)) * &inv[i][j];
        }
    }
    Ok(c)
}

/// Terms `(i, j, c)` of a tensor in `V (x) V`.
pub fn tensor_terms(c: &Mat) -> Vec<(usize, usize, Q)> {
    let mut out = Vec::new();
    for (i, row) in c.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                out.push((i, j, x.clone()));
            }
        }
    }
    out
}

/// Propagator `(1 (x) s) C` as a coefficient matrix.
pub fn propagator_tensor(a: &FrobeniusData) -> Result<Mat> {
    let c = inverse_form(a)?;
    let n = a.dim();
    let mut p = zeros(n, n);
    let Some(s) = &a.s else { return Ok(p) };
    for i in 0..n {
        for j in 0..n {
            if c[i][j].is_zero() {
                continue;
            }
            let sign = sgn(a.odd(i));
            for k in 0..n {
                if !s[k][j].is_zero() {
                    p[i][k] += &sign * &c[i][j] * &s[k][j];
                }
            }
        }
    }
    Ok(p)
}

/// The propagator as a bilinear form `B(x, y) = <x, s(y)>`.
pub fn propagator_form(a: &FrobeniusData) -> Mat {
    let n = a.dim();
    let mut b = zeros(n, n);
    if let Some(s) = &a.s {
        for i in 0..n {
            for j in 0..n {
                b[i][j] = a.pair(&a.basis_vec(i), &a.col(s, j));
            }
        }
    }
    b
}

fn contract_sum(a: &FrobeniusData, f: impl Fn(usize, usize, &Q) -> Vec<Q>) -> Result<Vec<Q>> {
    let c = inverse_form(a)?;
    let mut out = vec![Q::zero(); a.dim()];
    for (i, j, x) in tensor_terms(&c) {
        for (o, v) in out.iter_mut().zip(f(i, j, &x)) {
            *o += v;
        }
    }
    Ok(out)
}

/// `sum_i a_i b_i = 0`.
pub fn check_rel1(a: &FrobeniusData) -> Result<RelationResult> {
    let v = contract_sum(a, |i, j, x| a.product(i, j).iter().map(|p| p * x).collect())?;
    let holds = v.iter().all(Zero::is_zero);
    Ok(RelationResult { holds, witness: (!holds).then(|| ("-".to_string(), v)) })
}

/// `sum_i (-1)^{|a_i||x|} a_i x b_i = 0` for every basis `x`.
pub fn check_rel2(a: &FrobeniusData) -> Result<RelationResult> {
    for xi in 0..a.dim() {
        let x = a.basis_vec(xi);
        let v = contract_sum(a, |i, j, c| {
            let axb = a.mul_vec(&a.mul_vec(&a.basis_vec(i), &x), &a.basis_vec(j));
            let s = sgn(a.odd(i) && a.odd(xi)) * c;
            axb.iter().map(|p| p * &s).collect()
        })?;
        if v.iter().any(|p| !p.is_zero()) {
            return Ok(RelationResult { holds: false, witness: Some((a.names[xi].clone(), v)) });
        }
    }
    Ok(RelationResult { holds: true, witness: None })
}

/// `sum_{i,j} (-1)^{|a_j||b_i|} a_i a_j b_i b_j = 0`.
pub fn check_rel3(a: &FrobeniusData) -> Result<RelationResult> {
    let c = inverse_form(a)?;
    let terms = tensor_terms(&c);
    let mut out = vec![Q::zero(); a.dim()];
    for (ai, bi, ci) in &terms {
        for (aj, bj, cj) in &terms {
            let p = a.mul_vec(&a.mul_vec(&a.mul_vec(&a.basis_vec(*ai), &a.basis_vec(*aj)), &a.basis_vec(*bi)), &a.basis_vec(*bj));
            let s = sgn(a.odd(*aj) && a.odd(*bi)) * ci * cj;
            for (o, v) in out.iter_mut().zip(p) {
                *o += &s * v;
            }
        }
    }
    let holds = out.iter().all(Zero::is_zero);
    Ok(RelationResult { holds, witness: (!holds).then(|| ("-".to_string(), out)) })
}

/// Homogeneous basis of the span of `vs` restricted to vectors of one
/// parity: returns echelon rows.
fn span_basis(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let mut m = vs.to_vec();
    let piv = rref(&mut m);
    m.truncate(piv.len());
    m
}

fn is_homogeneous(a: &FrobeniusData, v: &[Q], p: u8) -> bool {
    v.iter().enumerate().all(|(i, x)| x.is_zero() || a.parity[i] == p)
}

/// Extends `base` greedily by canonical basis vectors of parity `p` lying in
/// `within` (a spanning set) until the span of `within` is reached.
fn greedy_complement(a: &FrobeniusData, base: &[Vec<Q>], within: &[Vec<Q>], p: u8) -> Vec<Vec<Q>> {
    let target = rank(&within.to_vec());
    let mut cur: Vec<Vec<Q>> = base.to_vec();
    let mut out = Vec::new();
    for v in within {
        if !is_homogeneous(a, v, p) {
            continue;
        }
        if rank(&cur) >= target {
            break;
        }
        let mut trial = cur.clone();
        trial.push(v.clone());
        if rank(&trial) > rank(&cur) {
            cur = trial;
            out.push(v.clone());
        }
    }
    out
}

/// Hodge splitting `V = W + U + U'` with `U = im d`, `W` a complement of
/// `U` in `ker d` and `U'` isotropic; returns `(s, t)`.
pub fn hodge_split(a: &FrobeniusData) -> Result<(Mat, Mat)> {
    let n = a.dim();
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    let mut wbasis = Vec::new();
    for p in 0..2u8 {
        let idx: Vec<usize> = (0..n).filter(|&i| a.parity[i] == p).collect();
        // kernel of d on the parity-p part
        let sub: Mat = a.d.iter().map(|r| idx.iter().map(|&j| r[j].clone()).collect()).collect();
        for v in null_space(&sub, idx.len()) {
            let mut full = vec![Q::zero(); n];
            for (k, &j) in idx.iter().enumerate() {
                full[j] = v[k].clone();
            }
            kernel.push(full);
        }
        let imgs: Vec<Vec<Q>> = idx.iter().map(|&j| a.col(&a.d, j)).collect();
        image.extend(span_basis(&imgs));
    }
    for p in 0..2u8 {
        let kp: Vec<Vec<Q>> = kernel.iter().filter(|v| is_homogeneous(a, v, p)).cloned().collect();
        let ip: Vec<Vec<Q>> = image.iter().filter(|v| is_homogeneous(a, v, p)).cloned().collect();
        // candidates: canonical vectors reduced into the kernel are not
        // canonical in general, so draw from the kernel basis itself
        wbasis.extend(greedy_complement(a, &ip, &kp, p));
    }
    // W-perp: vectors orthogonal to W, again homogeneous
    let mut perp = Vec::new();
    for p in 0..2u8 {
        let idx: Vec<usize> = (0..n).filter(|&i| a.parity[i] == p).collect();
        let eqs: Mat = wbasis.iter().map(|w| idx.iter().map(|&j| a.pair(w, &a.basis_vec(j))).collect()).collect();
        let sols = if eqs.is_empty() {
            (0..idx.len())
                .map(|k| {
                    let mut v = vec![Q::zero(); idx.len()];
                    v[k] = Q::one();
                    v
                })
                .collect()
        } else {
            null_space(&eqs, idx.len())
        };
        for v in sols {
            let mut full = vec![Q::zero(); n];
            for (k, &j) in idx.iter().enumerate() {
                full[j] = v[k].clone();
            }
            perp.push(full);
        }
    }
    // X: complement of U in W-perp, then corrected to be isotropic
    let mut xs = Vec::new();
    for p in 0..2u8 {
        let ip: Vec<Vec<Q>> = image.iter().filter(|v| is_homogeneous(a, v, p)).cloned().collect();
        let pp: Vec<Vec<Q>> = perp.iter().filter(|v| is_homogeneous(a, v, p)).cloned().collect();
        xs.extend(greedy_complement(a, &ip, &pp, p));
    }
    let r = xs.len();
    if r != image.len() {
        return Err(Error::InvalidInput("the form is incompatible with the differential (U is not Lagrangian in W-perp)".into()));
    }
    // x_i' = x_i + sum_k m_ik u_k with u_k of the parity of x_i
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    for i in 0..r {
        for (k, u) in image.iter().enumerate() {
            let px = (0..n).find(|&c| !xs[i][c].is_zero()).map(|c| a.parity[c]).unwrap_or(0);
            if is_homogeneous(a, u, px) {
                unknowns.push((i, k));
            }
        }
    }
    let mut rows: Mat = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let mut row = vec![Q::zero(); unknowns.len()];
            for (col, &(ii, k)) in unknowns.iter().enumerate() {
                if ii == j {
                    row[col] += a.pair(&xs[i], &image[k]);
                }
                if ii == i {
                    row[col] += a.pair(&image[k], &xs[j]);
                }
            }
            rows.push(row);
            rhs.push(-a.pair(&xs[i], &xs[j]));
        }
    }
    let m = if unknowns.is_empty() { Vec::new() } else { solve(&rows, &rhs).ok_or_else(|| Error::Internal("no isotropic complement".into()))? };
    let mut uprime = xs.clone();
    for (col, &(i, k)) in unknowns.iter().enumerate() {
        for c in 0..n {
            let delta = &m[col] * &image[k][c];
            uprime[i][c] += delta;
        }
    }
    // coordinates in the basis W, U, U'
    let mut basis: Vec<Vec<Q>> = Vec::new();
    basis.extend(wbasis.iter().cloned());
    basis.extend(image.iter().cloned());
    basis.extend(uprime.iter().cloned());
    if basis.len() != n {
        return Err(Error::Internal(format!("splitting has {} vectors for dimension {n}", basis.len())));
    }
    let bmat: Mat = (0..n).map(|i| basis.iter().map(|v| v[i].clone()).collect()).collect();
    let binv = inverse(&bmat).ok_or_else(|| Error::Internal("splitting vectors are dependent".into()))?;
    let nw = wbasis.len();
    // t: keep W coordinates
    let mut tcoord = zeros(n, n);
    for i in 0..nw {
        tcoord[i][i] = Q::one();
    }
    // s: d maps U' onto U; s inverts it
    let dup: Vec<Vec<Q>> = uprime.iter().map(|v| mat_vec(&a.d, v)).collect();
    let dup_coords: Vec<Vec<Q>> = dup.iter().map(|v| mat_vec(&binv, v)).collect();
    // matrix of d: U' -> U in coordinates
    let dmat: Mat = (0..r).map(|k| (0..r).map(|i| dup_coords[i][nw + k].clone()).collect()).collect();
    let dinv = inverse(&dmat).ok_or_else(|| Error::Internal("d is not invertible from U' to U".into()))?;
    let mut scoord = zeros(n, n);
    for i in 0..r {
        for k in 0..r {
            scoord[nw + r + i][nw + k] = dinv[i][k].clone();
        }
    }
    let s = mat_mul(&mat_mul(&bmat, &scoord), &binv);
    let t = mat_mul(&mat_mul(&bmat, &tcoord), &binv);
    Ok((s, t))
}

// ---------------------------------------------------------------------------
// text format

fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::InvalidInput(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FrobeniusData {
    /// Parses the line-based algebra format:
    ///
    /// ```text
    /// form_degree 1
    /// basis 1:0 a:1
    /// unit 1
    /// mult a a 1 1      # a*a has coefficient 1 on 1
    /// form a 1 1
    /// d a 1 1           # d(a) has coefficient 1 on 1
    /// s 1 a 1
    /// t x y c
    /// ```
    pub fn from_text(text: &str) -> Result<Self> {
        let mut a = FrobeniusData {
            names: Vec::new(),
            parity: Vec::new(),
            form_degree: 0,
            mult: Vec::new(),
            form: Vec::new(),
            d: Vec::new(),
            s: None,
            t: None,
        };
        let mut have_basis = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |m: &str| Error::InvalidInput(format!("line {}: {m}", ln + 1));
            match toks[0] {
                "form_degree" => {
                    a.form_degree = match toks.get(1) {
                        Some(&"0") => 0,
                        Some(&"1") => 1,
                        _ => return Err(err("form_degree must be 0 or 1")),
                    }
                }
                "basis" => {
                    if have_basis {
                        return Err(err("basis declared twice"));
                    }
                    for t in &toks[1..] {
                        let (nm, p) = t.split_once(':').ok_or_else(|| err("basis entries are name:parity"))?;
                        let p: u8 = match p {
                            "0" => 0,
                            "1" => 1,
                            _ => return Err(err("parity must be 0 or 1")),
                        };
                        if a.names.iter().any(|x| x == nm) {
                            return Err(err("duplicate basis name"));
                        }
                        a.names.push(nm.to_string());
                        a.parity.push(p);
                    }
                    let n = a.names.len();
                    a.mult = vec![zeros(n, n); n];
                    a.form = zeros(n, n);
                    a.d = zeros(n, n);
                    have_basis = true;
                }
                _ if !have_basis => return Err(err("basis must come first")),
                "unit" => {
                    let u = a.index(toks.get(1).ok_or_else(|| err("unit needs a name"))?)?;
                    for i in 0..a.dim() {
                        a.mult[u][i][i] = Q::one();
                        a.mult[i][u][i] = Q::one();
                    }
                }
                "mult" => {
                    if toks.len() != 5 {
                        return Err(err("mult x y z coef"));
                    }
                    let (x, y, z) = (a.index(toks[1])?, a.index(toks[2])?, a.index(toks[3])?);
                    a.mult[x][y][z] = parse_q(toks[4])?;
                }
                "form" | "d" | "s" | "t" => {
                    if toks.len() != 4 {
                        return Err(err("expected: name x y coef"));
                    }
                    let (x, y, c) = (a.index(toks[1])?, a.index(toks[2])?, parse_q(toks[3])?);
                    let n = a.dim();
                    match toks[0] {
                        "form" => a.form[x][y] = c,
                        "d" => a.d[y][x] = c,
                        "s" => a.s.get_or_insert_with(|| zeros(n, n))[y][x] = c,
                        _ => a.t.get_or_insert_with(|| zeros(n, n))[y][x] = c,
                    }
                }
                other => return Err(err(&format!("unknown directive {other:?}"))),
            }
        }
        if !have_basis {
            return Err(Error::InvalidInput("missing basis line".into()));
        }
        Ok(a)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n = self.dim();
        let _ = writeln!(out, "form_degree {}", self.form_degree);
        let b: Vec<String> = self.names.iter().zip(&self.parity).map(|(x, p)| format!("{x}:{p}")).collect();
        let _ = writeln!(out, "basis {}", b.join(" "));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !self.mult[i][j][k].is_zero() {
                        let _ = writeln!(out, "mult {} {} {} {}", self.names[i], self.names[j], self.names[k], self.mult[i][j][k]);
                    }
                }
            }
        }
        let mut dump = |tag: &str, m: &Mat, transpose: bool| {
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = if transpose { (j, i) } else { (i, j) };
                    if !m[x][y].is_zero() {
                        let _ = writeln!(out, "{tag} {} {} {}", self.names[i], self.names[j], m[x][y]);
                    }
                }
            }
        };
        dump("form", &self.form, false);
        dump("d", &self.d, true);
        if let Some(s) = &self.s {
            dump("s", s, true);
        }
        if let Some(t) = &self.t {
            dump("t", t, true);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// constructions

/// `span{1, a}` with `a` odd, `a^2 = c`, `<a,1> = 1`, `d(a) = 1`, `s(1) = a`.
pub fn two_dim(c: i64) -> FrobeniusData {
    let text = format!("form_degree 1\nbasis 1:0 a:1\nunit 1\nmult a a 1 {c}\nform a 1 1\nform 1 a 1\nd a 1 1\ns 1 a 1\n");
    FrobeniusData::from_text(&text).expect("well-formed")
}

pub fn k1() -> FrobeniusData {
    two_dim(1)
}

pub fn k0() -> FrobeniusData {
    two_dim(0)
}

/// Graded tensor product. `d` and `s` act on the first factor only, so the
/// second factor must have zero differential.
pub fn tensor(a: &FrobeniusData, b: &FrobeniusData) -> FrobeniusData {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let idx = |i: usize, j: usize| i * nb + j;
    let mut names = Vec::with_capacity(n);
    let mut parity = Vec::with_capacity(n);
    for i in 0..na {
        for j in 0..nb {
            names.push(format!("{}.{}", a.names[i], b.names[j]));
            parity.push((a.parity[i] + b.parity[j]) % 2);
        }
    }
    let mut mult = vec![zeros(n, n); n];
    let mut form = zeros(n, n);
    for i in 0..na {
        for j in 0..nb {
            for k in 0..na {
                for l in 0..nb {
                    // (x (x) y)(z (x) w) = (-1)^{|y||z|} xz (x) yw
                    let s = sgn(b.odd(j) && a.odd(k));
                    for p in 0..na {
                        if a.mult[i][k][p].is_zero() {
                            continue;
                        }
                        for r in 0..nb {
                            if !b.mult[j][l][r].is_zero() {
                                mult[idx(i, j)][idx(k, l)][idx(p, r)] += &s * &a.mult[i][k][p] * &b.mult[j][l][r];
                            }
                        }
                    }
                    form[idx(i, j)][idx(k, l)] = &s * &a.form[i][k] * &b.form[j][l];
                }
            }
        }
    }
    let lift = |m: &Mat| -> Mat {
        let mut out = zeros(n, n);
        for i in 0..na {
            for k in 0..na {
                if m[i][k].is_zero() {
                    continue;
                }
                for j in 0..nb {
                    out[idx(i, j)][idx(k, j)] = m[i][k].clone();
                }
            }
        }
        out
    };
    FrobeniusData {
        names,
        parity,
        form_degree: (a.form_degree + b.form_degree) % 2,
        mult,
        form,
        d: lift(&a.d),
        s: a.s.as_ref().map(lift),
        t: None,
    }
}

/// Applies an invertible parity-preserving change of basis `p` (columns are
/// the new basis vectors in old coordinates).
pub fn change_basis(a: &FrobeniusData, p: &Mat) -> Result<FrobeniusData> {
    let n = a.dim();
    let pinv = inverse(p).ok_or_else(|| Error::InvalidInput("basis change is singular".into()))?;
    let cols: Vec<Vec<Q>> = (0..n).map(|j| (0..n).map(|i| p[i][j].clone()).collect()).collect();
    let mut mult = vec![zeros(n, n); n];
    let mut form = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let prod = mat_vec(&pinv, &a.mul_vec(&cols[i], &cols[j]));
            mult[i][j] = prod;
            form[i][j] = a.pair(&cols[i], &cols[j]);
        }
    }
    let conj = |m: &Mat| mat_mul(&mat_mul(&pinv, m), p);
    Ok(FrobeniusData {
        names: (0..n).map(|i| format!("f{i}")).collect(),
        parity: a.parity.clone(),
        form_degree: a.form_degree,
        mult,
        form,
        d: conj(&a.d),
        s: a.s.as_ref().map(conj),
        t: a.t.as_ref().map(conj),
    })
}

/// Two-dimensional even commutative Frobenius algebra `k[x]/(x^2 - px - q)`
/// with form `<u, v> = lambda(uv)`, `lambda(1) = l0`, `lambda(x) = l1`.
pub fn even_two_dim(p: i64, qq: i64, l0: i64, l1: i64) -> Result<FrobeniusData> {
    let text = format!(
        "form_degree 0\nbasis 1:0 x:0\nunit 1\nmult x x 1 {qq}\nmult x x x {p}\nform 1 1 {l0}\nform 1 x {l1}\nform x 1 {l1}\nform x x {}\n",
        qq * l0 + p * l1
    );
    let a = FrobeniusData::from_text(&text)?;
    if rank(&a.form) < 2 {
        return Err(Error::InvalidInput("degenerate form".into()));
    }
    Ok(a)
}

/// The matrix superalgebra `M(1|1)` with the supertrace form and
/// `d = [Q, -]` for `Q = alpha e12 + beta e21`; `s` comes from
/// [`hodge_split`]. Acyclic whenever `alpha != 0`.
pub fn super_matrix(alpha: i64, beta: i64) -> Result<FrobeniusData> {
    let text = "form_degree 0\nbasis e11:0 e22:0 e12:1 e21:1\n\
        mult e11 e11 e11 1\nmult e11 e12 e12 1\nmult e12 e21 e11 1\nmult e12 e22 e12 1\n\
        mult e21 e11 e21 1\nmult e21 e12 e22 1\nmult e22 e21 e21 1\nmult e22 e22 e22 1\n\
        form e11 e11 1\nform e22 e22 -1\nform e12 e21 1\nform e21 e12 -1\n";
    let mut a = FrobeniusData::from_text(text)?;
    let mut qv = vec![Q::zero(); 4];
    qv[2] = q(alpha);
    qv[3] = q(beta);
    for j in 0..4 {
        let x = a.basis_vec(j);
        let l = a.mul_vec(&qv, &x);
        let r = a.mul_vec(&x, &qv);
        let sign = sgn(a.odd(j));
        for i in 0..4 {
            a.d[i][j] = &l[i] - &sign * &r[i];
        }
    }
    let (s, t) = hodge_split(&a)?;
    if t != zeros(4, 4) {
        return Err(Error::InvalidInput("d is not acyclic".into()));
    }
    a.s = Some(s);
    Ok(a)
}

fn random_basis_change<R: Rng>(rng: &mut R, a: &FrobeniusData) -> Option<FrobeniusData> {
    let n = a.dim();
    let mut p = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if a.parity[i] == a.parity[j] {
                p[i][j] = q(rng.gen_range(-2..=2));
            }
        }
    }
    let b = change_basis(a, &p).ok()?;
    validate(&b).all_passed().then_some(b)
}

/// Random contractible algebra of dimension 4 with form degree `d`, up to
/// a random parity-preserving change of basis: `K_c (x) B` with `c != 0`
/// for `d = 1`, `M(1|1)` with a random odd `Q` for `d = 0`.
pub fn random_contractible<R: Rng>(rng: &mut R, form_degree: u8) -> FrobeniusData {
    loop {
        let base = if form_degree == 1 {
            let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
            match even_two_dim(rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2)) {
                Ok(b) => tensor(&two_dim(c), &b),
                Err(_) => continue,
            }
        } else {
            let alpha = [-2, -1, 1, 2][rng.gen_range(0..4)];
            match super_matrix(alpha, rng.gen_range(-2..=2)) {
                Ok(m) => m,
                Err(_) => continue,
            }
        };
        if let Some(a) = random_basis_change(rng, &base) {
            return a;
        }
    }
}

/// Numerator-free check that every entry is an integer; used by reports.
pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
