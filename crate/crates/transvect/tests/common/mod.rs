#![allow(dead_code)]

use rand::Rng;
use transvect::geom::{all_vectors, is_zero, pair, Mat};
use transvect::{Fe, Field, GroupSpec, Transvection};

/// `a * b` by schoolbook multiplication and reduction, coefficients low to high.
pub fn poly_mulmod(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (i, &m) in modulus[..k].iter().enumerate() {
            let sub = c * m as u64 % p as u64;
            prod[d - k + i] = (prod[d - k + i] + p as u64 - sub) % p as u64;
        }
    }
    prod[..k].iter().map(|&x| x as u32).collect()
}

pub fn elem_from(f: &Field, coeffs: &[u32]) -> Fe {
    f.from_coeffs(coeffs).unwrap()
}

pub fn rand_vec<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Vec<Fe> {
    (0..n).map(|_| f.random(rng)).collect()
}

/// A uniformly random transvection of `SL(n, q)`.
pub fn rand_sl_tv<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Transvection {
    loop {
        let u = rand_vec(f, n, rng);
        let phi = rand_vec(f, n, rng);
        if !is_zero(&u) && !is_zero(&phi) && pair(f, &phi, &u).is_zero() {
            return Transvection::canonical(f, &u, &phi);
        }
    }
}

/// A random element of the group as a product of random transvections.
pub fn rand_element<R: Rng>(spec: &GroupSpec, len: usize, rng: &mut R) -> Mat {
    let f = &spec.field;
    (0..len).fold(Mat::identity(spec.n), |acc, _| acc.mul(f, &spec.random_transvection(rng).matrix(f)))
}

/// `|{v : v singular, v != 0}|` by enumeration.
pub fn count_singular(spec: &GroupSpec) -> usize {
    all_vectors(&spec.field, spec.n).filter(|v| !is_zero(v) && spec.is_singular(v)).count()
}
