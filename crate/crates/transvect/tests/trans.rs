mod common;

use common::{count_singular, rand_sl_tv, rand_vec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transvect::geom::{is_zero, vscale, Mat};
use transvect::oracle::group_order;
use transvect::trans::{tv_conj_right, tv_conjugate, tv_in_group, tv_k_closure, tv_make, tv_subgroup};
use transvect::{Error, Family, Fe, Field, GroupSpec, Subfield, Transvection};

#[test]
fn frozen_transvection_counts() {
    assert_eq!(GroupSpec::sp(3, 1, 4).unwrap().count_transvections(), 80);
    assert_eq!(GroupSpec::su(3, 2, 3).unwrap().count_transvections(), 56);
    assert_eq!(GroupSpec::sl(3, 1, 3).unwrap().count_transvections(), 104);
    assert_eq!(GroupSpec::sl(5, 1, 3).unwrap().count_transvections(), 744);
    assert_eq!(GroupSpec::sl(5, 2, 3).unwrap().count_transvections(), 406_224);
}

#[test]
fn counts_match_enumeration() {
    for spec in [
        GroupSpec::sl(3, 1, 3).unwrap(),
        GroupSpec::sl(5, 1, 2).unwrap(),
        GroupSpec::sp(3, 1, 4).unwrap(),
        GroupSpec::sp(5, 1, 4).unwrap(),
        GroupSpec::su(3, 2, 3).unwrap(),
        GroupSpec::su(3, 2, 4).unwrap(),
        GroupSpec::su(5, 2, 3).unwrap(),
    ] {
        let all = spec.all_transvections();
        assert_eq!(all.len() as u64, spec.count_transvections(), "{:?} n={}", spec.family, spec.n);
        let f = &spec.field;
        for t in &all {
            assert!(spec.contains(&t.matrix(f)));
            assert!(tv_in_group(t, &spec));
        }
        // brute force: every group transvection is 1 + u (x) phi with phi(u) = 0
        if spec.family != Family::SL {
            let per_line = spec.scalars().len();
            let lines = count_singular(&spec) / (f.q() as usize - 1);
            assert_eq!(all.len(), lines * per_line);
        }
    }
}

#[test]
fn make_validates() {
    let f = Field::new(3, 1).unwrap();
    let e = |i| transvect::geom::unit_vec(3, i);
    assert_eq!(tv_make(&f, &e(0), &e(0)), Err(Error::NotNilpotent));
    assert_eq!(tv_make(&f, &[Fe::ZERO; 3], &e(0)), Err(Error::ZeroData));
    let t = tv_make(&f, &vscale(&f, f.int(2), &e(0)), &e(1)).unwrap();
    assert_eq!(t.u, e(0), "canonical u has leading 1");
    assert_eq!(t.phi, vscale(&f, f.int(2), &e(1)));
}

#[test]
fn power_inverse_and_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = Field::new(5, 2).unwrap();
    for _ in 0..200 {
        let t = rand_sl_tv(&f, 3, &mut rng);
        let m = t.matrix(&f);
        assert!(m.mul(&f, &t.inverse(&f).matrix(&f)).is_identity());
        assert_eq!(m.det(&f), Fe::ONE);
        assert_eq!(Transvection::from_matrix(&f, &m), Some(t.clone()));
        let a = f.random(&mut rng);
        let b = f.random(&mut rng);
        if !a.is_zero() && !b.is_zero() && !f.add(a, b).is_zero() {
            let ta = t.power(&f, a).unwrap();
            let tb = t.power(&f, b).unwrap();
            assert_eq!(ta.matrix(&f).mul(&f, &tb.matrix(&f)), t.power(&f, f.add(a, b)).unwrap().matrix(&f));
            assert_eq!(t.scalar_to(&f, &ta), Some(a));
        }
        let x = rand_vec(&f, 3, &mut rng);
        assert_eq!(t.apply(&f, &x).unwrap(), m.apply(&f, &x));
    }
    assert_eq!(Transvection::from_matrix(&f, &Mat::identity(3)), None);
}

#[test]
fn subgroups_and_closure() {
    let spec = GroupSpec::su(3, 2, 3).unwrap();
    let f = &spec.field;
    let v = spec.all_transvections()[0].u.clone();
    let tv = tv_subgroup(&v, &spec).unwrap();
    assert_eq!(tv.elements(f).len() as u32, f.q0() - 1);
    let e0 = transvect::geom::unit_vec(3, 0);
    assert_eq!(tv_subgroup(&e0, &spec), Err(Error::NonSingularVector));
    let t = &tv.elements(f)[0];
    // SU lines only admit GF(q0)^x, so closing over GF(9) leaves the group
    assert_eq!(tv_k_closure(std::slice::from_ref(t), f.full_subfield(), &spec), Err(Error::ClosureLeavesGroup));
    assert_eq!(tv_k_closure(std::slice::from_ref(t), Subfield { divisor: 1 }, &spec).unwrap().len(), 2);
    let sl = GroupSpec::sl(3, 1, 3).unwrap();
    assert!(matches!(tv_subgroup(&e0, &sl), Err(Error::WrongFamily(_))));
}

#[test]
fn pipeline_exclusions() {
    assert_eq!(GroupSpec::sp(3, 2, 4).unwrap().pipeline_supported(), Err(Error::UnsupportedQ(9)));
    assert_eq!(GroupSpec::su(3, 4, 3).unwrap().pipeline_supported(), Err(Error::UnsupportedQ(81)));
    assert_eq!(GroupSpec::sl(3, 2, 3).unwrap().pipeline_supported(), Err(Error::UnsupportedQ(9)));
    assert_eq!(GroupSpec::sl(3, 4, 3).unwrap().pipeline_supported(), Err(Error::UnsupportedQ(81)));
    assert!(GroupSpec::sl(5, 2, 3).unwrap().pipeline_supported().is_ok());
    assert!(GroupSpec::su(3, 2, 3).unwrap().pipeline_supported().is_ok());
}

#[test]
fn random_transvections_lie_in_the_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in [GroupSpec::sp(3, 1, 4).unwrap(), GroupSpec::su(5, 2, 3).unwrap(), GroupSpec::sl(3, 2, 3).unwrap()] {
        for _ in 0..100 {
            let t = spec.random_transvection(&mut rng);
            assert!(spec.contains(&t.matrix(&spec.field)));
        }
    }
}

#[test]
fn frozen_group_orders() {
    assert_eq!(group_order(&GroupSpec::sp(3, 1, 4).unwrap()), Some(51_840));
    assert_eq!(group_order(&GroupSpec::su(3, 2, 3).unwrap()), Some(6_048));
    assert_eq!(group_order(&GroupSpec::sl(3, 1, 3).unwrap()), Some(5_616));
    assert_eq!(group_order(&GroupSpec::sl(5, 1, 2).unwrap()), Some(120));
}

fn field_strategy() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![Just((3, 1)), Just((5, 1)), Just((3, 2)), Just((5, 2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugation_formula_matches_matrices((p, k) in field_strategy(), n in 2usize..5, seed in any::<u64>()) {
        let f = Field::new(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = rand_sl_tv(&f, n, &mut rng);
        let t2 = rand_sl_tv(&f, n, &mut rng);
        let m2 = t2.matrix(&f);
        let want = m2.mul(&f, &t1.matrix(&f)).mul(&f, &m2.inverse(&f).unwrap());
        prop_assert_eq!(tv_conjugate(&f, &t1, &t2).matrix(&f), want.clone());
        let right = m2.inverse(&f).unwrap().mul(&f, &t1.matrix(&f)).mul(&f, &m2);
        prop_assert_eq!(tv_conj_right(&f, &t1, &t2).matrix(&f), right);
        prop_assert_eq!(t1.conj_by(&f, &m2, &m2.inverse(&f).unwrap()).matrix(&f), want);
    }

    #[test]
    fn rescaling_gives_the_same_transvection(seed in any::<u64>()) {
        let f = Field::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = rand_sl_tv(&f, 3, &mut rng);
        let l = f.random_nonzero(&mut rng);
        let s = tv_make(&f, &vscale(&f, l, &t.u), &vscale(&f, f.inv(l).unwrap(), &t.phi)).unwrap();
        prop_assert_eq!(s, t);
    }

    #[test]
    fn form_transvections_preserve_the_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in [GroupSpec::sp(5, 1, 4).unwrap(), GroupSpec::su(3, 2, 4).unwrap()] {
            let f = &spec.field;
            let v = loop {
                let v = rand_vec(f, spec.n, &mut rng);
                if !is_zero(&v) && spec.is_singular(&v) { break v; }
            };
            for l in spec.scalars() {
                prop_assert!(spec.contains(&spec.tv_of(&v, l).matrix(f)));
            }
        }
    }
}
