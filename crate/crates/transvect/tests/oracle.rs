mod common;

use common::rand_sl_tv;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transvect::classify::{elementary_pair, irreducible};
use transvect::oracle::{
    cayley_diameter, cayley_diameter_bidirectional, cayley_distance_bidirectional, closure_enumerate, closure_order, group_order,
    invariant_subspace_search, sl2_word_search, trace_witness, transvection_mats, word_search, word_search_pred,
};
use transvect::{Error, Fe, Field, GroupSpec, Mat, Transvection};

fn product(f: &Field, letters: &[Mat], word: &[usize], n: usize) -> Mat {
    word.iter().fold(Mat::identity(n), |acc, &i| acc.mul(f, &letters[i]))
}

#[test]
fn closure_matches_formula_orders() {
    let specs = [
        GroupSpec::sl(3, 1, 2).unwrap(),
        GroupSpec::sl(5, 1, 2).unwrap(),
        GroupSpec::sl(3, 1, 3).unwrap(),
        GroupSpec::sp(3, 1, 4).unwrap(),
        GroupSpec::su(3, 2, 3).unwrap(),
        GroupSpec::su(5, 2, 3).unwrap(),
    ];
    let want = [24u128, 120, 5616, 51840, 6048, 378000];
    for (spec, w) in specs.iter().zip(want) {
        assert_eq!(group_order(spec), Some(w));
        let gens = transvect::pipeline::random_generators(spec, spec.n, 1, 1_000_000);
        assert_eq!(closure_order(&spec.field, &gens, 1_000_000).unwrap() as u128, w);
    }
}

#[test]
fn closure_cap() {
    let spec = GroupSpec::sl(3, 1, 3).unwrap();
    let gens = transvection_mats(&spec.field, &spec.all_transvections());
    assert!(matches!(closure_order(&spec.field, &gens, 100), Err(Error::CapExceeded(100))));
    let part = closure_enumerate(&spec.field, &gens, 100, true).unwrap();
    assert!(part.truncated);
    assert!(part.elements.len() >= 100);
}

#[test]
fn diameters_agree() {
    for (p, k) in [(3, 1), (5, 1), (3, 2)] {
        let f = Field::new(p, k).unwrap();
        let (s, t) = elementary_pair(&f, 2, Fe::ONE);
        let gens = transvection_mats(&f, &[s, t]);
        let d = cayley_diameter(&f, &gens, 1_000_000).unwrap();
        assert_eq!(d, cayley_diameter_bidirectional(&f, &gens, 1_000_000).unwrap());
        assert_eq!(cayley_distance_bidirectional(&f, &gens, &Mat::identity(2), 1000), Some(0));
    }
    // SL(2,3) on E12(1), E21(1), frozen from the two searches above
    let f = Field::new(3, 1).unwrap();
    let (s, t) = elementary_pair(&f, 2, Fe::ONE);
    assert_eq!(cayley_diameter(&f, &transvection_mats(&f, &[s, t]), 100).unwrap(), SL23_DIAMETER);
}

const SL23_DIAMETER: usize = 4;

#[test]
fn word_searches_return_shortest_words() {
    let f = Field::new(5, 1).unwrap();
    let (s, t) = elementary_pair(&f, 2, Fe::ONE);
    let letters = transvection_mats(&f, &[s.clone(), t.clone()]);
    let all = closure_enumerate(&f, &letters, 1000, false).unwrap();
    let targets: Vec<Mat> = all.elements.iter().take(30).cloned().collect();
    let words = word_search(&f, &letters, &targets, 1_000_000).unwrap();
    for (w, g) in words.iter().zip(&targets) {
        assert_eq!(product(&f, &letters, w, 2), *g);
    }
    let (m, w) = word_search_pred(&f, &letters, 1_000_000, |m| m.trace(&f) == Fe::ZERO).unwrap();
    assert_eq!(m.trace(&f), Fe::ZERO);
    assert_eq!(product(&f, &letters, &w, 2), m);
    let signed = sl2_word_search(&f, &[s.clone(), t.clone()], &targets, 1_000_000).unwrap();
    let inv = [s.matrix(&f), s.inverse(&f).matrix(&f), t.matrix(&f), t.inverse(&f).matrix(&f)];
    for (w, g) in signed.iter().zip(&targets) {
        let p = w.iter().fold(Mat::identity(2), |acc, &(i, e)| acc.mul(&f, &inv[2 * i + usize::from(e < 0)]));
        assert_eq!(p, *g);
    }
}

#[test]
fn invariant_subspace_agrees_with_irreducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = Field::new(3, 1).unwrap();
    let mut both = [0; 2];
    for _ in 0..200 {
        let k = 1 + (both[0] + both[1]) % 3;
        let ys: Vec<Transvection> = (0..k).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let irr = invariant_subspace_search(&f, &transvection_mats(&f, &ys)).unwrap();
        assert_eq!(irr, irreducible(&f, &ys));
        both[usize::from(irr)] += 1;
    }
    assert!(both[0] > 0 && both[1] > 0);
    let big = Field::new(5, 3).unwrap();
    let ys: Vec<Transvection> = (0..3).map(|_| rand_sl_tv(&big, 3, &mut rng)).collect();
    assert!(matches!(invariant_subspace_search(&big, &transvection_mats(&big, &ys)), Err(Error::TooLarge)));
}

#[test]
fn trace_witnesses() {
    for spec in [GroupSpec::sl(5, 1, 3).unwrap(), GroupSpec::sp(3, 1, 4).unwrap(), GroupSpec::sp(5, 1, 2).unwrap()] {
        for l in spec.field.elements() {
            let g = trace_witness(&spec, l).unwrap();
            assert!(spec.contains(&g));
            assert_eq!(g.trace(&spec.field), l);
        }
    }
    for spec in [GroupSpec::su(3, 2, 3).unwrap(), GroupSpec::su(5, 2, 4).unwrap()] {
        let mut hit = Vec::new();
        for l in spec.field.elements() {
            if let Ok(g) = trace_witness(&spec, l) {
                assert!(spec.contains(&g));
                assert_eq!(g.trace(&spec.field), l);
                hit.push(l);
            }
        }
        // the reachable traces still generate the field
        assert_eq!(spec.field.subfield_generated(&hit), spec.field.full_subfield());
    }
}

proptest! {
    #[test]
    fn closure_is_closed(seed in any::<u64>()) {
        let f = Field::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<Transvection> = (0..2).map(|_| rand_sl_tv(&f, 3, &mut rng)).collect();
        let gens = transvection_mats(&f, &ys);
        let c = closure_enumerate(&f, &gens, 10_000, false).unwrap();
        prop_assert_eq!(5616 % c.order, 0);
        for x in c.elements.iter().take(50) {
            for g in &gens {
                prop_assert!(c.elements.contains(&x.mul(&f, g)));
            }
        }
    }
}
