//! Permutation parity helpers shared by the sign machinery.

use std::collections::HashMap;
use std::hash::Hash;

/// Sign of a permutation given in one-line notation.
pub fn perm_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Sign of the permutation taking `from` to `to`, both lists of the same
/// distinct items. Returns `None` when they are not rearrangements.
pub fn reorder_sign<T: Eq + Hash + Clone>(from: &[T], to: &[T]) -> Option<i32> {
    if from.len() != to.len() {
        return None;
    }
    let pos: HashMap<&T, usize> = to.iter().enumerate().map(|(i, t)| (t, i)).collect();
    if pos.len() != to.len() {
        return None;
    }
    let mut p = Vec::with_capacity(from.len());
    for t in from {
        p.push(*pos.get(t)?);
    }
    let mut check = p.clone();
    check.sort_unstable();
    check.dedup();
    if check.len() != p.len() {
        return None;
    }
    Some(perm_sign(&p))
}

/// Koszul sign of sorting a sequence of parities by the given permutation:
/// item `i` moves to position `p[i]`; only odd items contribute.
pub fn koszul_sign(parities: &[u8], p: &[usize]) -> i32 {
    let mut inv = 0usize;
    for i in 0..p.len() {
        if parities[i] & 1 == 0 {
            continue;
        }
        for j in (i + 1)..p.len() {
            if parities[j] & 1 == 1 && p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        if !next_perm(&mut cur) {
            break;
        }
    }
    out
}

pub fn next_perm(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
