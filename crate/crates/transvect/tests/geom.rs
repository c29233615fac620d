mod common;

use common::rand_vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transvect::geom::{all_vectors, nullspace, projective_points, rank, solve_in_span, span_basis, vscale, Form, FormKind, Mat};
use transvect::{Fe, Field};

fn rand_mat(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_rows(&(0..n).map(|_| rand_vec(f, n, rng)).collect::<Vec<_>>()).unwrap()
}

/// Leibniz expansion.
fn det_oracle(f: &Field, m: &Mat) -> Fe {
    let n = m.rows;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Fe::ZERO;
    fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, out);
            if k % 2 == 0 {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    let mut perms = Vec::new();
    heap(n, &mut perm, &mut perms);
    for p in perms {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        let mut term = if inv % 2 == 0 { Fe::ONE } else { f.neg(Fe::ONE) };
        for (i, &j) in p.iter().enumerate() {
            term = f.mul(term, m.get(i, j));
        }
        total = f.add(total, term);
    }
    total
}

#[test]
fn determinant_matches_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, k) in [(3, 1), (5, 1), (3, 2), (5, 2)] {
        let f = Field::new(p, k).unwrap();
        for n in 1..=4 {
            for _ in 0..30 {
                let m = rand_mat(&f, n, &mut rng);
                assert_eq!(m.det(&f), det_oracle(&f, &m));
            }
        }
    }
}

#[test]
fn inverse_and_pow() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = Field::new(5, 2).unwrap();
    for _ in 0..50 {
        let m = rand_mat(&f, 3, &mut rng);
        match m.inverse(&f) {
            Some(mi) => {
                assert!(m.mul(&f, &mi).is_identity());
                assert!(mi.mul(&f, &m).is_identity());
            }
            None => assert!(m.det(&f).is_zero()),
        }
        assert_eq!(m.pow(&f, 3), m.mul(&f, &m).mul(&f, &m));
        assert!(m.pow(&f, 0).is_identity());
    }
}

#[test]
fn projective_point_counts() {
    for (p, k, n) in [(3, 1, 3), (5, 1, 2), (3, 2, 3)] {
        let f = Field::new(p, k).unwrap();
        let q = f.q() as usize;
        let pts = projective_points(&f, n);
        assert_eq!(pts.len(), (q.pow(n as u32) - 1) / (q - 1));
        assert_eq!(all_vectors(&f, n).count(), q.pow(n as u32));
    }
}

#[test]
fn rank_nullspace_and_span() {
    let f = Field::new(3, 1).unwrap();
    let v = |xs: &[u32]| xs.iter().map(|&x| Fe(x)).collect::<Vec<_>>();
    let rows = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 2])];
    assert_eq!(rank(&f, &rows), 2);
    let m = Mat::from_rows(&rows).unwrap();
    let ns = nullspace(&f, &m);
    assert_eq!(ns.len(), 1);
    assert!(m.apply(&f, &ns[0]).iter().all(|x| x.is_zero()));
    let basis = span_basis(&f, &rows);
    assert_eq!(basis.len(), 2);
    let c = solve_in_span(&f, &basis, &rows[2]).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(solve_in_span(&f, &basis, &v(&[1, 0, 0])), None);
}

#[test]
fn default_forms() {
    let f = Field::new(3, 1).unwrap();
    let sp = Form::symplectic_default(&f, 4).unwrap();
    assert!(Form::symplectic_default(&f, 3).is_err());
    for u in all_vectors(&f, 4) {
        assert!(sp.ev(&f, &u, &u).is_zero(), "alternating");
    }
    let fu = Field::new_unitary(3, 2).unwrap();
    let h = Form::hermitian_default(&fu, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = rand_vec(&fu, 3, &mut rng);
        let b = rand_vec(&fu, 3, &mut rng);
        let c = fu.random(&mut rng);
        assert_eq!(h.ev(&fu, &a, &b), fu.frob(h.ev(&fu, &b, &a)));
        assert_eq!(h.ev(&fu, &a, &vscale(&fu, c, &b)), fu.mul(c, h.ev(&fu, &a, &b)));
        assert_eq!(h.ev(&fu, &vscale(&fu, c, &a), &b), fu.mul(fu.frob(c), h.ev(&fu, &a, &b)));
    }
    // 28 singular points in PG(2,9) for the unitary form
    let sing = projective_points(&fu, 3).into_iter().filter(|v| h.is_singular(&fu, v)).count();
    assert_eq!(sing, 28);
}

#[test]
fn invalid_forms() {
    let f = Field::new(5, 1).unwrap();
    let g = Mat::identity(2);
    assert!(Form::new(&f, FormKind::Symplectic, g).is_err());
    assert!(Form::new(&f, FormKind::Hermitian, Mat::identity(2)).is_err());
    let fu = Field::new_unitary(5, 2).unwrap();
    assert!(Form::new(&fu, FormKind::Hermitian, Mat::zeros(2, 2)).is_err());
}

#[test]
fn radical_of_degenerate_span() {
    let f = Field::new(3, 1).unwrap();
    let sp = Form::symplectic_default(&f, 4).unwrap();
    let e = |i| transvect::geom::unit_vec(4, i);
    assert_eq!(sp.radical(&f, &[e(0), e(2)]).len(), 2);
    assert_eq!(sp.radical(&f, &[e(0), e(1)]).len(), 0);
    assert_eq!(sp.radical(&f, &[e(0), e(1), e(2)]).len(), 1);
}

proptest! {
    #[test]
    fn det_is_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Field::new(3, 2).unwrap();
        let a = rand_mat(&f, 3, &mut rng);
        let b = rand_mat(&f, 3, &mut rng);
        prop_assert_eq!(a.mul(&f, &b).det(&f), f.mul(a.det(&f), b.det(&f)));
        prop_assert_eq!(a.transpose().det(&f), a.det(&f));
    }

    #[test]
    fn pullback_is_adjoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Field::new(5, 1).unwrap();
        let m = rand_mat(&f, 4, &mut rng);
        let x = rand_vec(&f, 4, &mut rng);
        let phi = rand_vec(&f, 4, &mut rng);
        prop_assert_eq!(transvect::geom::pair(&f, &m.pullback(&f, &phi), &x), transvect::geom::pair(&f, &phi, &m.apply(&f, &x)));
    }
}
