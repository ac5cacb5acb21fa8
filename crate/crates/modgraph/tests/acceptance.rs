//! Acceptance checks, one line per criterion. Exits nonzero on any failure.

mod common;

use std::time::Instant;

use common::*;
use modgraph::amplitude;
use modgraph::canon::{self, OrientationKind};
use modgraph::complexes::{self, BasisGraph, ComplexSpec, Family, GradedComplex, Params};
use modgraph::frobenius::{self, q, FrobeniusData, Q};
use modgraph::graphs::{self, CommFamily};
use modgraph::linalg;
use modgraph::ribbon::{self, AssFamily};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> FrobeniusData {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    FrobeniusData::from_text(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn build(spec: &ComplexSpec) -> Result<GradedComplex, String> {
    complexes::build_complex(spec).map_err(|e| format!("{spec}: {e}"))
}

fn surfaces() -> [(u32, u32); 7] {
    [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 1)]
}

fn sign_specs() -> Vec<ComplexSpec> {
    let mut v = Vec::new();
    for d in 0..2u8 {
        for fam in [CommFamily::Under, CommFamily::Bar] {
            for g in 2..=3 {
                v.push(ComplexSpec::comm(fam, d, g, 6));
            }
        }
        for af in AssFamily::ALL {
            for (gamma, nu) in surfaces() {
                v.push(ComplexSpec::ass(af, d, gamma, nu, 6));
            }
        }
    }
    v
}

fn criterion_1(k1: &FrobeniusData) -> Check {
    let g = amplitude::golden_graph();
    let under = build(&ComplexSpec::ass(AssFamily::Under, 1, 1, 2, 5))?;
    let kass_spec = ComplexSpec::ass(AssFamily::K, 1, 1, 2, 5);
    let kass = build(&kass_spec)?;
    let z = amplitude::boundary_amplitude(k1, &under, &g).map_err(|e| e.to_string())?;
    ensure(z.abs() == q(2), || format!("plain boundary {z}, expected +-2"))?;
    let zk = amplitude::boundary_amplitude(k1, &kass, &g).map_err(|e| e.to_string())?;
    ensure(zk.is_zero(), || format!("decorated boundary {zk}, expected 0"))?;

    let key = BasisGraph::Ribbon(canon::ribbon_canonical(&g).graph);
    let (mut plain, mut loops) = (Q::zero(), Q::zero());
    for t in complexes::differential_terms(&kass_spec, &key).map_err(|e| e.to_string())? {
        let target = t.target.as_ribbon().ok_or("non-ribbon term")?;
        let a = amplitude::amplitude(k1, target).map_err(|e| e.to_string())? * q(t.sign as i64);
        if AssFamily::Under.admits_graph(target) {
            plain += a;
        } else {
            loops += a;
        }
    }
    ensure(&plain + &loops == Q::zero() && !loops.is_zero(), || format!("plain {plain}, loop contraction {loops}"))?;
    Ok(format!("|Z(dG)| = {}, decorated 0, loop term {loops} cancels", z.abs()))
}

fn criterion_2(k1: &FrobeniusData, k0: &FrobeniusData) -> Check {
    let rel = |a: &FrobeniusData, i: u8| match i {
        1 => frobenius::check_rel1(a),
        2 => frobenius::check_rel2(a),
        _ => frobenius::check_rel3(a),
    };
    let r1 = rel(k1, 1).map_err(|e| e.to_string())?;
    ensure(r1.holds, || "k1 fails rel1".into())?;
    let r2 = rel(k1, 2).map_err(|e| e.to_string())?;
    ensure(!r2.holds, || "k1 passes rel2".into())?;
    let w = r2.witness.ok_or("k1 rel2 has no witness")?;
    ensure(w.0 == "a" && w.1 == vec![q(-2), q(0)], || format!("k1 rel2 witness {w:?}"))?;
    for i in 1..=3 {
        ensure(rel(k0, i).map_err(|e| e.to_string())?.holds, || format!("k0 fails rel{i}"))?;
    }

    let mut graphs = 0;
    for e in 1..=5 {
        for gamma in 0..=3u32 {
            for nu in 1..=8u32 {
                let euler = 2 * gamma as i64 - 2 + nu as i64;
                if euler <= 0 || euler > e as i64 - 1 {
                    continue;
                }
                for g in ribbon::enumerate_prestable(gamma, nu, e, AssFamily::Under) {
                    let z = amplitude::amplitude(k0, &g).map_err(|e| e.to_string())?;
                    ensure(z.is_zero(), || format!("k0 amplitude {z} on {}", g.to_text()))?;
                    graphs += 1;
                }
            }
        }
    }
    Ok(format!("k1 rel2 witness (a, [-2, 0]); k0 satisfies rel1-3; k0 vanishes on {graphs} plain graphs"))
}

/// Returns the number of nonzero amplitudes.
fn cocycle(alg: &FrobeniusData, spec: ComplexSpec) -> Result<usize, String> {
    let c = build(&spec)?;
    let z = amplitude::partition_cochain_par(alg, &c, modgraph::pool::default_width()).map_err(|e| e.to_string())?;
    let (ok, obs) = amplitude::verify_cocycle_of(&z, &c).map_err(|e| e.to_string())?;
    ensure(ok, || format!("{spec}: {} obstructions", obs.len()))?;
    Ok(z.values.iter().flatten().filter(|x| !x.is_zero()).count())
}

fn criterion_3(k1: &FrobeniusData, k0: &FrobeniusData) -> Check {
    let start = Instant::now();
    let (mut n, mut nonzero) = (0, 0);
    for (gamma, nu) in [(0, 3), (1, 1), (1, 2)] {
        nonzero += cocycle(k1, ComplexSpec::ass(AssFamily::K, 1, gamma, nu, 5))?;
        nonzero += cocycle(k0, ComplexSpec::ass(AssFamily::Under, 1, gamma, nu, 5))?;
        n += 2;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..5 {
        let a = frobenius::random_contractible(&mut rng, 1);
        ensure(a.dim() == 4, || format!("random algebra of dimension {}", a.dim()))?;
        for (gamma, nu) in [(0, 3), (1, 1), (1, 2)] {
            nonzero += cocycle(&a, ComplexSpec::ass(AssFamily::Bar, 1, gamma, nu, 5))?;
            n += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 600.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{n} cocycle checks, {nonzero} nonzero amplitudes, {secs:.1}s"))
}

fn criterion_4() -> Check {
    let mut n = 0;
    for spec in sign_specs() {
        let c = build(&spec)?;
        complexes::check_d_squared(&c).map_err(|w| format!("{spec}: d^2 != 0 at {w:?}"))?;
        n += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let pool = [
        ComplexSpec::comm(CommFamily::Under, 0, 3, 6),
        ComplexSpec::comm(CommFamily::Bar, 1, 3, 6),
        ComplexSpec::ass(AssFamily::Bar, 0, 1, 2, 5),
        ComplexSpec::ass(AssFamily::K, 1, 0, 4, 5),
        ComplexSpec::ass(AssFamily::KR, 1, 1, 2, 5),
        ComplexSpec::ass(AssFamily::Under, 1, 2, 1, 6),
    ];
    let samples = reversal_check(&pool, 100, &mut rng)?;

    let theta = graphs::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)], &[0, 0]).map_err(|e| e.to_string())?;
    let eight = graphs::from_edge_list(1, &[(0, 0), (0, 0)], &[0]).map_err(|e| e.to_string())?;
    let com0 = build(&ComplexSpec::comm(CommFamily::Under, 0, 2, 3))?;
    for (name, g) in [("theta", &theta), ("figure-eight", &eight)] {
        let fast = canon::comm_is_zero(&canon::comm_canonical(g, None), OrientationKind::OddEdges);
        let brute = comm_brute_zero(g, OrientationKind::OddEdges);
        ensure(fast && brute, || format!("{name}: rule {fast}, brute force {brute}"))?;
        let key = BasisGraph::Comm { graph: canon::comm_canonical(g, None).graph, black: None };
        ensure(com0.index_of(g.n_edges(), &key).is_none(), || format!("{name} present in the basis"))?;
    }
    Ok(format!("d^2 = 0 on {n} complexes; {samples} reversals antisymmetric; theta and figure-eight vanish"))
}

fn full(family: Family, params: Params) -> ComplexSpec {
    let mut s = ComplexSpec { family, twist_d: 0, params, edge_cutoff: 0 };
    s.edge_cutoff = s.max_edges();
    s
}

fn criterion_5() -> Check {
    let bv = build(&full(Family::Bv, Params::Genus(2)))?;
    let b = linalg::betti(&bv.chain_data()).betti;
    ensure(bv.complete && b == vec![1, 0, 0, 0], || format!("bv g=2 betti {b:?}"))?;
    for (g, n) in [(0, 3), (1, 1)] {
        let c = build(&full(Family::Dft, Params::Legged { genus: g, legs: n }))?;
        let b = linalg::betti(&c.chain_data()).betti;
        ensure(c.complete && b.iter().all(|&x| x == 0), || format!("dft g={g} n={n} betti {b:?}"))?;
    }
    Ok(format!("bv g=2 betti {b:?}; dft (0,3) and (1,1) acyclic"))
}

fn criterion_6() -> Check {
    for e in 1..=4 {
        let oracle = ribbon_oracle(e);
        let mut total = 0;
        for gamma in 0..=3u32 {
            for nu in 1..=8u32 {
                let euler = 2 * gamma as i64 - 2 + nu as i64;
                if euler <= 0 || euler > e as i64 - 1 {
                    continue;
                }
                let got = ribbon::enumerate_prestable(gamma, nu, e, AssFamily::Under).len();
                let want = oracle.get(&(gamma, nu)).copied().unwrap_or(0);
                ensure(got == want, || format!("ribbon e={e} ({gamma},{nu}): {got} vs {want}"))?;
                total += got;
            }
        }
        ensure(total == oracle.values().sum::<usize>(), || format!("ribbon e={e}: total {total}"))?;
    }
    for genus in 2..=3 {
        for e in 0..=4 {
            for (fam, under) in [(CommFamily::Bar, false), (CommFamily::Under, true)] {
                let got = graphs::enumerate_stable_graphs(genus, 0, e, fam).len();
                let want = comm_oracle(genus, e, under);
                ensure(got == want, || format!("comm g={genus} e={e} {fam:?}: {got} vs {want}"))?;
            }
        }
    }
    let mut specs = sign_specs();
    specs.push(full(Family::Bv, Params::Genus(2)));
    for (g, n) in [(0, 3), (1, 1)] {
        specs.push(full(Family::Dft, Params::Legged { genus: g, legs: n }));
    }
    let mut ranks = 0;
    for spec in specs {
        let c = build(&spec)?;
        for (deg, m) in c.diffs.iter().enumerate() {
            if m.rows() <= 200 && m.cols() <= 200 {
                let (fast, dense) = (linalg::rank_exact(m), dense_rank(m));
                ensure(fast == dense, || format!("{spec} degree {deg}: rank {fast} vs {dense}"))?;
                ranks += 1;
            }
        }
    }
    Ok(format!("ribbon and stable graph counts agree; {ranks} ranks agree with dense elimination"))
}

fn criterion_7() -> Check {
    let mut n = 0;
    for spec in sign_specs() {
        let c = build(&spec)?;
        if !c.complete {
            continue;
        }
        let r = linalg::betti(&c.chain_data());
        let alt: i64 = r.betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        let chi = linalg::euler_characteristic(&r.dims);
        ensure(chi == alt && chi == linalg::euler_of_betti(&r.betti), || format!("{spec}: chi {chi}, betti sum {alt}"))?;
        let hat = linalg::hat_betti(&r.betti);
        ensure(hat.first() == Some(&1), || format!("{spec}: hat betti {hat:?}"))?;
        n += 1;
    }
    ensure(n > 0, || "no complete complexes".into())?;
    Ok(format!("euler characteristic and hat H^0 = 1 on {n} complete complexes"))
}

fn main() {
    let k1 = fixture("k1.alg");
    let k0 = fixture("k0.alg");
    let checks: Vec<(u32, Box<dyn Fn() -> Check>)> = vec![
        (1, Box::new(|| criterion_1(&k1))),
        (2, Box::new(|| criterion_2(&k1, &k0))),
        (3, Box::new(|| criterion_3(&k1, &k0))),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
    ];
    let mut failed = 0;
    for (i, f) in checks {
        let start = Instant::now();
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {i}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i}: FAIL ({secs:.1}s) {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
