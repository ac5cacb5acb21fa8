#![allow(clippy::needless_range_loop)]

use modgraph::amplitude::{self, FragmentModel, Net};
use modgraph::canon::{self, Orientation};
use modgraph::complexes::{self, BasisGraph, ComplexSpec};
use modgraph::frobenius::{self, q, FrobeniusData, Q};
use modgraph::ribbon::{AssFamily, PrestableGraph};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ribbon_complex(f: AssFamily, d: u8, gamma: u32, nu: u32, cutoff: usize) -> complexes::GradedComplex {
    complexes::build_complex(&ComplexSpec::ass(f, d, gamma, nu, cutoff)).unwrap()
}

fn ribbon_graphs(c: &complexes::GradedComplex) -> Vec<PrestableGraph> {
    c.bases.iter().flatten().map(|b| b.as_ribbon().unwrap().clone()).collect()
}

#[test]
fn golden_boundary_values() {
    let k1 = frobenius::k1();
    let g = amplitude::golden_graph();
    assert_eq!(g.n_edges(), 5);
    let mut val: Vec<usize> = (0..3).map(|v| g.vertex(v).valence()).collect();
    val.sort();
    assert_eq!(val, vec![3, 3, 4]);
    let under = ribbon_complex(AssFamily::Under, 1, 1, 2, 5);
    let z = amplitude::boundary_amplitude(&k1, &under, &g).unwrap();
    assert_eq!(z.abs(), q(2));
    let kass = ribbon_complex(AssFamily::K, 1, 1, 2, 5);
    assert_eq!(amplitude::boundary_amplitude(&k1, &kass, &g).unwrap(), q(0));
}

#[test]
fn golden_cancellation_comes_from_the_loop_contraction() {
    let k1 = frobenius::k1();
    let g = amplitude::golden_graph();
    let key = BasisGraph::Ribbon(canon::ribbon_canonical(&g).graph);
    let spec = ComplexSpec::ass(AssFamily::K, 1, 1, 2, 5);
    let mut plain = Q::zero();
    let mut decorated = Q::zero();
    for t in complexes::differential_terms(&spec, &key).unwrap() {
        let target = t.target.as_ribbon().unwrap();
        let z = amplitude::amplitude(&k1, target).unwrap() * q(t.sign as i64);
        if AssFamily::Under.admits_graph(target) {
            plain += z;
        } else {
            decorated += z;
        }
    }
    assert_eq!(plain.abs(), q(2));
    assert_eq!(&plain + &decorated, Q::zero());
}

#[test]
fn k0_amplitudes_vanish_up_to_five_edges() {
    let k0 = frobenius::k0();
    for gamma in 0..=2u32 {
        for nu in 1..=6u32 {
            let euler = 2 * gamma as i64 - 2 + nu as i64;
            if euler <= 0 || euler > 4 {
                continue;
            }
            let c = ribbon_complex(AssFamily::Under, 1, gamma, nu, 5);
            let z = amplitude::partition_cochain(&k0, &c).unwrap();
            assert!(z.values.iter().flatten().all(Zero::is_zero), "gamma {gamma} nu {nu}");
        }
    }
}

#[test]
fn k1_has_nonzero_amplitudes() {
    let k1 = frobenius::k1();
    let c = ribbon_complex(AssFamily::Under, 1, 1, 2, 4);
    let z = amplitude::partition_cochain(&k1, &c).unwrap();
    assert!(z.values.iter().flatten().any(|x| !x.is_zero()));
}

fn algebras() -> Vec<FrobeniusData> {
    let mut v = vec![frobenius::k1(), frobenius::two_dim(3)];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2 {
        v.push(frobenius::random_contractible(&mut rng, 1));
    }
    v
}

#[test]
fn fragment_models_agree() {
    for alg in algebras() {
        for (gamma, nu) in [(0, 3), (1, 1), (1, 2)] {
            let c = ribbon_complex(AssFamily::Bar, 1, gamma, nu, 4);
            for g in ribbon_graphs(&c) {
                let o = canon::ribbon_reference(&g, amplitude::orientation_kind(1));
                let a = amplitude::amplitude_oriented(&alg, &g, &o, FragmentModel::Standard).unwrap();
                let b = amplitude::amplitude_oriented(&alg, &g, &o, FragmentModel::Alternate).unwrap();
                assert_eq!(a, b, "{}", g.to_text());
            }
        }
    }
}

#[test]
fn orientation_sign_does_not_depend_on_the_tree() {
    let c = ribbon_complex(AssFamily::Bar, 1, 1, 2, 5);
    for g in ribbon_graphs(&c) {
        if (0..g.n_vertices()).any(|v| g.vertex(v).beta >= 2) {
            continue;
        }
        let edge_order: Vec<usize> = g.edges().into_iter().map(|(h, _)| h).collect();
        let ex = amplitude::expand(&g, FragmentModel::Standard, &edge_order).unwrap();
        let faces: Vec<usize> = ex.net.faces().into_iter().map(|f| f[0]).collect();
        let base = amplitude::psi_sign(&ex.net, &faces).unwrap();
        for root in 0..ex.net.words.len() {
            for rev in [false, true] {
                assert_eq!(amplitude::psi_sign_rooted(&ex.net, &faces, root, rev).unwrap(), base);
            }
        }
        // swapping two faces flips the sign
        if faces.len() >= 2 {
            let mut f2 = faces.clone();
            f2.swap(0, 1);
            assert_eq!(amplitude::psi_sign(&ex.net, &f2).unwrap(), -base);
        }
    }
}

#[test]
fn reversed_orientation_negates_the_amplitude() {
    let k1 = frobenius::k1();
    let c = ribbon_complex(AssFamily::Bar, 1, 1, 2, 5);
    let mut nonzero = 0;
    for g in ribbon_graphs(&c) {
        let o = canon::ribbon_reference(&g, amplitude::orientation_kind(1));
        if o.tokens.len() < 2 {
            continue;
        }
        let z = amplitude::amplitude_oriented(&k1, &g, &o, FragmentModel::Standard).unwrap();
        for (i, j) in [(0, 1), (0, o.tokens.len() - 1)] {
            let mut t = o.tokens.clone();
            t.swap(i, j);
            let r = Orientation { tokens: t, tails: Vec::new() };
            assert_eq!(amplitude::amplitude_oriented(&k1, &g, &r, FragmentModel::Standard).unwrap(), -z.clone());
        }
        nonzero += usize::from(!z.is_zero());
    }
    assert!(nonzero > 0);
}

// ---------------------------------------------------------------------------
// state-sum oracle for the network contraction

fn vertex_value(alg: &FrobeniusData, xs: &[usize]) -> Q {
    let n = alg.dim();
    let mut prod: Vec<Q> = (0..n).map(|k| if k == xs[0] { Q::one() } else { Q::zero() }).collect();
    for &x in &xs[1..xs.len() - 1] {
        let mut next = vec![Q::zero(); n];
        for i in 0..n {
            if prod[i].is_zero() {
                continue;
            }
            for (k, c) in alg.mult[i][x].iter().enumerate() {
                next[k] += &prod[i] * c;
            }
        }
        prod = next;
    }
    (0..n).map(|i| &prod[i] * &alg.form[i][xs[xs.len() - 1]]).sum()
}

/// Sign of moving the odd entries of `from` into the order `to`.
fn koszul(from: &[usize], to: &[usize], odd: &[bool]) -> i32 {
    let mut seq: Vec<usize> = from.iter().filter(|&&f| odd[f]).map(|&f| to.iter().position(|&x| x == f).unwrap()).collect();
    let mut sign = 1;
    // bubble sort
    for i in 0..seq.len() {
        for j in 0..seq.len() - 1 - i {
            if seq[j] > seq[j + 1] {
                seq.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

fn state_sum(alg: &FrobeniusData, net: &Net, c: &[(usize, usize, Q)], p: &[(usize, usize, Q)]) -> Q {
    let nf = net.sigma.len();
    let dim = alg.dim();
    let e_order: Vec<usize> = net.edges.iter().flat_map(|&(t, h)| [t, h]).collect();
    let v_order: Vec<usize> = net.words.iter().flatten().copied().collect();
    let coef = |terms: &[(usize, usize, Q)], i: usize, j: usize| terms.iter().find(|t| t.0 == i && t.1 == j).map(|t| t.2.clone()).unwrap_or_else(Q::zero);
    let mut total = Q::zero();
    let mut assign = vec![0usize; nf];
    loop {
        let mut w = Q::one();
        for (k, &(t, h)) in net.edges.iter().enumerate() {
            w *= coef(if net.ghost[k] { c } else { p }, assign[t], assign[h]);
            if w.is_zero() {
                break;
            }
        }
        if !w.is_zero() {
            for word in &net.words {
                let xs: Vec<usize> = word.iter().map(|&f| assign[f]).collect();
                w *= vertex_value(alg, &xs);
            }
            let odd: Vec<bool> = (0..nf).map(|f| alg.parity[assign[f]] == 1).collect();
            if koszul(&e_order, &v_order, &odd) < 0 {
                w = -w;
            }
            total += w;
        }
        let mut i = 0;
        loop {
            if i == nf {
                let k = net.words.len();
                if alg.form_degree == 1 && (k * (k - 1) / 2) % 2 == 1 {
                    total = -total;
                }
                return total;
            }
            assign[i] += 1;
            if assign[i] < dim {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn contraction_matches_state_sum() {
    let mut checked = 0;
    for alg in algebras() {
        let c = frobenius::tensor_terms(&frobenius::inverse_form(&alg).unwrap());
        let p = frobenius::tensor_terms(&frobenius::propagator_tensor(&alg).unwrap());
        let budget = if alg.dim() == 2 { 12 } else { 8 };
        for (gamma, nu) in [(0, 3), (1, 1), (1, 2), (0, 4)] {
            let cx = ribbon_complex(AssFamily::Bar, 1, gamma, nu, 4);
            for g in ribbon_graphs(&cx) {
                let order: Vec<usize> = g.edges().into_iter().map(|(h, _)| h).collect();
                for model in [FragmentModel::Standard, FragmentModel::Alternate] {
                    let Ok(ex) = amplitude::expand(&g, model, &order) else { continue };
                    if ex.net.sigma.len() > budget || ex.net.words.iter().any(|w| w.len() < 2) {
                        continue;
                    }
                    let fast = amplitude::contract_net(&alg, &ex.net, &c, &p).unwrap();
                    assert_eq!(fast, state_sum(&alg, &ex.net, &c, &p), "{}", g.to_text());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 50, "{checked}");
}

// ---------------------------------------------------------------------------
// cocycles

#[test]
fn k1_is_a_cocycle_on_stable_ribbon_graphs() {
    let k1 = frobenius::k1();
    for (gamma, nu) in [(0, 3), (1, 1), (0, 4), (2, 1)] {
        let c = ribbon_complex(AssFamily::K, 1, gamma, nu, 5);
        let (ok, obs) = amplitude::verify_cocycle(&k1, &c).unwrap();
        assert!(ok, "({gamma},{nu}): {obs:?}");
    }
}

#[test]
fn k1_is_not_a_cocycle_on_plain_graphs() {
    let k1 = frobenius::k1();
    let c = ribbon_complex(AssFamily::Under, 1, 1, 2, 5);
    let (ok, obs) = amplitude::verify_cocycle(&k1, &c).unwrap();
    assert!(!ok);
    assert!(obs.iter().all(|o| o.value.abs() == q(2)));
}

#[test]
fn random_algebras_are_cocycles_on_all_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..2 {
        let alg = frobenius::random_contractible(&mut rng, 1);
        let c = ribbon_complex(AssFamily::Bar, 1, 1, 1, 4);
        assert!(amplitude::verify_cocycle(&alg, &c).unwrap().0);
    }
}

#[test]
fn parallel_cochain_matches_serial() {
    let k1 = frobenius::k1();
    let c = ribbon_complex(AssFamily::Bar, 1, 1, 2, 5);
    let a = amplitude::partition_cochain(&k1, &c).unwrap();
    let b = amplitude::partition_cochain_par(&k1, &c, 4).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.to_text(&c), b.to_text(&c));
}

#[test]
fn incompatible_inputs_are_rejected() {
    let k1 = frobenius::k1();
    let untwisted = ribbon_complex(AssFamily::Bar, 0, 1, 1, 3);
    assert!(amplitude::partition_cochain(&k1, &untwisted).is_err());
    let comm = complexes::build_complex(&ComplexSpec::comm(modgraph::graphs::CommFamily::Bar, 1, 2, 3)).unwrap();
    assert!(amplitude::partition_cochain(&k1, &comm).is_err());
    let mut no_s = frobenius::k1();
    no_s.s = None;
    assert!(amplitude::amplitude(&no_s, &amplitude::golden_graph()).is_err());
}
