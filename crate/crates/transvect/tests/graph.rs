mod common;

use common::rand_sl_tv;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transvect::geom::{unit_vec, vscale};
use transvect::graph::{af_coeffs_of, build_graph, d_s_of, d_u_of, label, p_u_of, parts, weight_of};
use transvect::trans::{tv_conj_right, tv_conjugate};
use transvect::{Error, Fe, Field, GroupSpec, Subfield, Transvection};

fn tv(f: &Field, u: &[Fe], phi: &[Fe]) -> Transvection {
    transvect::trans::tv_make(f, u, phi).unwrap()
}

/// Weight straight from the definition, without the graph.
fn weight_oracle(f: &Field, ts: &[Transvection]) -> Fe {
    let k = ts.len();
    (0..k).fold(Fe::ONE, |acc, i| f.mul(acc, transvect::geom::pair(f, &ts[(i + 1) % k].phi, &ts[i].u)))
}

#[test]
fn three_cycle_example() {
    let f = Field::new(3, 1).unwrap();
    let e = |i| unit_vec(3, i);
    // e1 -> e2 -> e3 -> e1, every label 1
    let ts = [tv(&f, &e(0), &e(2)), tv(&f, &e(1), &e(0)), tv(&f, &e(2), &e(1))];
    let g = build_graph(&f, &ts);
    assert_eq!(g.weight(&[0, 1, 2]), Fe::ONE);
    assert_eq!(g.weight(&[0, 2, 1]), Fe::ZERO);
    assert_eq!(g.d_s(&[0, 1, 2]), Fe::ONE);
    let m = g.metrics();
    assert!(m.strongly_connected);
    assert_eq!(m.diameter, Some(2));
    assert!(!m.twoway_connected);
    assert_eq!(g.p_u(&[0, 1, 2]), Err(Error::QNotSquare));
}

#[test]
fn two_cycle_over_gf9() {
    let f = Field::new(3, 2).unwrap();
    let delta = f.add(f.primitive_element(), Fe::ZERO);
    let e = |i| unit_vec(3, i);
    let s = tv(&f, &e(0), &e(1));
    let t = tv(&f, &vscale(&f, delta, &e(1)), &e(0));
    let refs = [&s, &t];
    let w = weight_of(&f, &refs);
    assert_eq!(w, delta);
    assert_eq!(d_s_of(&f, &refs), Fe::ZERO, "2-cycles are symplectic");
    assert_eq!(d_u_of(&f, &refs).unwrap(), f.sub(delta, f.pow(delta, 3)));
    assert_eq!(p_u_of(&f, &refs).unwrap(), f.powi(delta, -2).unwrap());
    let g = build_graph(&f, &[s.clone(), t.clone()]);
    assert_eq!(g.l_k(2).unwrap(), f.full_subfield());
    assert_eq!(g.metrics().twoway_diameter, Some(1));
}

#[test]
fn path_graph_is_not_strongly_connected() {
    let f = Field::new(5, 1).unwrap();
    let e = |i| unit_vec(3, i);
    let g = build_graph(&f, &[tv(&f, &e(0), &e(2)), tv(&f, &e(1), &e(0))]);
    assert!(!g.metrics().strongly_connected);
    assert_eq!(g.metrics().diameter, None);
}

#[test]
fn parts_spans() {
    let f = Field::new(3, 1).unwrap();
    let n = 4;
    let std: Vec<Transvection> = (0..n).map(|i| tv(&f, &unit_vec(n, i), &unit_vec(n, (i + 1) % n))).collect();
    let p = parts(&f, &std);
    assert_eq!((p.v_span_dim, p.vstar_span_dim), (n, n));
    let p1 = parts(&f, &std[..1]);
    assert_eq!((p1.v_span_dim, p1.vstar_span_dim), (1, 1));
}

#[test]
fn subfield_labels_keep_l_k_small() {
    let f = Field::new(3, 2).unwrap();
    let sub = Field::new(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // data over GF(3) embeds as the prime subfield
    let ts: Vec<Transvection> = (0..6).map(|_| rand_sl_tv(&sub, 3, &mut rng)).collect();
    let g = build_graph(&f, &ts);
    for k in 2..=4 {
        assert_eq!(g.l_k(k).unwrap(), Subfield { divisor: 1 });
    }
}

#[test]
fn full_group_cycle_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sp = GroupSpec::sp(3, 1, 4).unwrap();
    let su = GroupSpec::su(3, 2, 3).unwrap();
    for (spec, symplectic) in [(&sp, true), (&su, false)] {
        let all = spec.all_transvections();
        for _ in 0..20 {
            let sample: Vec<Transvection> = all.choose_multiple(&mut rng, 10).cloned().collect();
            let g = build_graph(&spec.field, &sample);
            let mut cycles = 0;
            g.for_each_cycle(5, u64::MAX, |c| {
                cycles += 1;
                if symplectic {
                    assert_eq!(g.d_s(c), Fe::ZERO);
                } else {
                    assert_eq!(g.d_u(c).unwrap(), Fe::ZERO);
                }
                // labels of form groups vanish symmetrically
                true
            })
            .unwrap();
            for s in 0..g.len() {
                for t in 0..g.len() {
                    assert_eq!(g.label(s, t).is_zero(), g.label(t, s).is_zero());
                }
            }
            assert!(cycles > 0);
        }
    }
}

#[test]
fn l_k_is_monotone_and_enumeration_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = Field::new(5, 2).unwrap();
    for _ in 0..10 {
        let ts: Vec<Transvection> = (0..5).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let g = build_graph(&f, &ts);
        let mut prev = Subfield { divisor: 1 };
        for k in 2..=5 {
            let l = g.l_k(k).unwrap();
            assert!(l.contains(prev));
            prev = l;
        }
        // brute force over injective tuples of length <= 3
        let mut weights = Vec::new();
        for a in 0..5 {
            for b in 0..5 {
                if b != a {
                    weights.push(weight_oracle(&f, &[ts[a].clone(), ts[b].clone()]));
                    for c in 0..5 {
                        if c != a && c != b {
                            weights.push(weight_oracle(&f, &[ts[a].clone(), ts[b].clone(), ts[c].clone()]));
                        }
                    }
                }
            }
        }
        assert_eq!(g.l_k(3).unwrap(), f.subfield_generated(&weights));
    }
}

#[test]
fn cycle_enumeration_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = Field::new(5, 1).unwrap();
    let ts: Vec<Transvection> = (0..30).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
    let g = build_graph(&f, &ts);
    assert!(matches!(g.for_each_cycle(5, 1000, |_| true), Err(Error::TooManyVertices(_))));
    // over the prime field the search stops at once
    assert_eq!(g.l_k_budget(5, 1000).unwrap(), f.full_subfield());
}

/// Random transvections defined over GF(q0), so every 2-cycle is unitary.
fn subfield_pool(p: u32, rng: &mut ChaCha8Rng) -> (Field, Vec<Transvection>) {
    let f = Field::new(p, 2).unwrap();
    let sub = Field::new(p, 1).unwrap();
    let ts = (0..12).map(|_| rand_sl_tv(&sub, 3, rng)).collect();
    (f, ts)
}

#[test]
fn gluing_multiplies_p_u() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in [3, 5] {
        let mut checked = 0;
        let mut nontrivial = 0;
        while checked < 100 {
            let (f, pool) = subfield_pool(p, &mut rng);
            // r_1..r_k glued from (r_1..r_i, q_1..q_l, r_j..r_k) and (r_i..r_j, q_l..q_1)
            let k = rng.gen_range(3..=5);
            let l = rng.gen_range(1..=2);
            let idx: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), k + l).into_vec();
            let r: Vec<&Transvection> = idx[..k].iter().map(|&i| &pool[i]).collect();
            let q: Vec<&Transvection> = idx[k..].iter().map(|&i| &pool[i]).collect();
            let i = rng.gen_range(0..k - 1);
            let j = rng.gen_range(i + 1..k);
            let mut c1: Vec<&Transvection> = r[..=i].to_vec();
            c1.extend(q.iter().copied());
            c1.extend(r[j..].iter().copied());
            let mut c2: Vec<&Transvection> = r[i..=j].to_vec();
            c2.extend(q.iter().rev().copied());
            let two_way = |c: &[&Transvection]| !weight_of(&f, c).is_zero() && !weight_of(&f, &c.iter().rev().copied().collect::<Vec<_>>()).is_zero();
            if !two_way(&r) || !two_way(&c1) || !two_way(&c2) {
                continue;
            }
            let glued = p_u_of(&f, &r).unwrap();
            assert_eq!(glued, f.mul(p_u_of(&f, &c1).unwrap(), p_u_of(&f, &c2).unwrap()));
            if !d_u_of(&f, &r).unwrap().is_zero() {
                nontrivial += 1;
            }
            checked += 1;
        }
        assert!(nontrivial > 10, "instances should include non-unitary cycles");
    }
}

#[test]
fn p_u_detects_unitary_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = Field::new(5, 2).unwrap();
    let mut seen = 0;
    while seen < 200 {
        let k = rng.gen_range(2..=5);
        let ts: Vec<Transvection> = (0..k).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let refs: Vec<&Transvection> = ts.iter().collect();
        let Ok(pu) = p_u_of(&f, &refs) else { continue };
        let sign = if k % 2 == 0 { Fe::ONE } else { f.neg(Fe::ONE) };
        assert_eq!(pu == sign, d_u_of(&f, &refs).unwrap().is_zero());
        seen += 1;
    }
}

#[test]
fn af_identities_over_gf25() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = Field::new(5, 2).unwrap();
    for _ in 0..100 {
        let s: Vec<Transvection> = (0..4).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let c = af_coeffs_of(&f, &s[0], &s[1], &s[2], &s[3]);
        for lam in f.elements() {
            let conj = if lam.is_zero() { s[2].clone() } else { tv_conj_right(&f, &s[2], &s[3].power(&f, lam).unwrap()) };
            let ts = [&s[0], &s[1], &conj];
            assert_eq!(weight_of(&f, &ts), c.eval_w(&f, lam));
            if f.frob_p(lam, 1) == lam {
                assert_eq!(d_u_of(&f, &ts).unwrap(), c.eval_du(&f, lam).unwrap());
            }
        }
    }
}

#[test]
fn af_vanishing_quadratic_term() {
    let f = Field::new(5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut n = 0;
    while n < 20 {
        let s: Vec<Transvection> = (0..4).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        if !weight_of(&f, &[&s[2], &s[3]]).is_zero() {
            continue;
        }
        let c = af_coeffs_of(&f, &s[0], &s[1], &s[2], &s[3]);
        assert_eq!(c.c, Fe::ZERO);
        assert_eq!(c.f, Some(Fe::ZERO));
        assert_eq!(c.a, weight_of(&f, &[&s[0], &s[1], &s[2]]));
        n += 1;
    }
}

proptest! {
    #[test]
    fn weights_are_conjugation_invariant(seed in any::<u64>(), k in 2usize..6) {
        let f = Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts: Vec<Transvection> = (0..k).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let g = rand_sl_tv(&f, 3, &mut rng);
        let conj: Vec<Transvection> = ts.iter().map(|t| tv_conjugate(&f, t, &g)).collect();
        let a: Vec<&Transvection> = ts.iter().collect();
        let b: Vec<&Transvection> = conj.iter().collect();
        prop_assert_eq!(weight_of(&f, &a), weight_of(&f, &b));
        prop_assert_eq!(d_s_of(&f, &a), d_s_of(&f, &b));
    }

    #[test]
    fn weights_ignore_representatives(seed in any::<u64>(), k in 2usize..6) {
        let f = Field::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts: Vec<Transvection> = (0..k).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let scaled: Vec<Transvection> = ts
            .iter()
            .map(|t| {
                let l = f.random_nonzero(&mut rng);
                Transvection { u: vscale(&f, l, &t.u), phi: vscale(&f, f.inv(l).unwrap(), &t.phi) }
            })
            .collect();
        prop_assert_eq!(weight_oracle(&f, &ts), weight_oracle(&f, &scaled));
        let a: Vec<&Transvection> = ts.iter().collect();
        prop_assert_eq!(weight_of(&f, &a), weight_oracle(&f, &scaled));
        prop_assert_eq!(label(&f, &ts[0], &ts[1]), transvect::geom::pair(&f, &ts[1].phi, &ts[0].u));
    }
}

#[test]
fn af_f_reduces_when_two_cycle_is_fixed() {
    let f = Field::new(5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut n = 0;
    while n < 30 {
        let s: Vec<Transvection> = (0..4).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let w34 = weight_of(&f, &[&s[2], &s[3]]);
        if w34.is_zero() || f.frob_p(w34, 1) != w34 {
            continue;
        }
        let c = af_coeffs_of(&f, &s[0], &s[1], &s[2], &s[3]);
        assert_eq!(c.f.unwrap(), f.neg(f.mul(w34, d_u_of(&f, &[&s[0], &s[1], &s[3]]).unwrap())));
        n += 1;
    }
}
