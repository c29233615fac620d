//! Writing group elements as products of transvections.

use std::collections::{HashMap, VecDeque};

use super::{reduce, GenSet, Word};
use crate::error::{Error, Result};
use crate::geom::{all_vectors, is_zero, pair, span_basis, unit_vec, vscale, vsub, Mat, Vector};
use crate::gf::Fe;
use crate::trans::{Family, GroupSpec, Transvection};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// `g` is the product of these, left to right.
    pub factors: Vec<Transvection>,
    pub word: Word,
}

/// Basis used for column clearing. SL: standard basis. Sp: symplectic
/// pairs `e1, f1, e2, f2, ...`. SU: anisotropic `w_1, ..., w_{n-2}`, each
/// orthogonal to the previous ones, then a pair `e, f` with `e` singular and
/// `f(e,f) = 1`.
pub fn adapted_basis(spec: &GroupSpec) -> Vec<Vector> {
    let f = &spec.field;
    let n = spec.n;
    let mut w: Vec<Vector> = (0..n).map(|i| unit_vec(n, i)).collect();
    let mut out = Vec::with_capacity(n);
    match spec.family {
        Family::SL => return w,
        Family::Sp => {
            while !w.is_empty() {
                let e = w[0].clone();
                let x = w.iter().find(|x| !spec.f(&e, x).is_zero()).expect("nondegenerate").clone();
                let fv = vscale(f, f.inv(spec.f(&e, &x)).unwrap(), &x);
                let rest: Vec<Vector> = w
                    .iter()
                    .map(|x| {
                        let a = spec.f(&fv, x);
                        let b = f.neg(spec.f(&e, x));
                        let y = crate::geom::vaxpy(f, x, a, &e);
                        crate::geom::vaxpy(f, &y, b, &fv)
                    })
                    .collect();
                out.push(e);
                out.push(fv);
                w = span_basis(f, &rest);
            }
        }
        Family::SU => {
            while w.len() > 2 {
                let a = anisotropic(spec, &w);
                let naa = spec.f(&a, &a);
                let rest: Vec<Vector> = w.iter().map(|x| vsub(f, x, &vscale(f, f.div(spec.f(&a, x), naa).unwrap(), &a))).collect();
                out.push(a);
                w = span_basis(f, &rest);
            }
            let e = std::iter::once(w[0].clone())
                .chain(f.elements().map(|c| crate::geom::vaxpy(f, &w[1], c, &w[0])))
                .find(|v| spec.is_singular(v))
                .expect("isotropic plane");
            let x = w.iter().find(|x| !spec.f(&e, x).is_zero()).expect("nondegenerate").clone();
            let mut fv = vscale(f, f.inv(spec.f(&e, &x)).unwrap(), &x);
            let nf = spec.f(&fv, &fv);
            if let Some(c) = f.elements().find(|&c| f.add(nf, f.trace(c)).is_zero()) {
                fv = crate::geom::vaxpy(f, &fv, c, &e);
            }
            out.push(e);
            out.push(fv);
        }
    }
    out
}

fn anisotropic(spec: &GroupSpec, w: &[Vector]) -> Vector {
    let f = &spec.field;
    if let Some(v) = w.iter().find(|v| !spec.is_singular(v)) {
        return v.clone();
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            for c in f.nonzero() {
                let v = crate::geom::vaxpy(f, &w[i], c, &w[j]);
                if !spec.is_singular(&v) {
                    return v;
                }
            }
        }
    }
    unreachable!("nondegenerate space of dimension > 2 has anisotropic vectors")
}

/// Writes `g` as at most `4 n^2` transvections of the group, each replaced by
/// its member word. Needs every transvection in `gs`.
pub fn decompose_element(gs: &GenSet, g: &Mat) -> Result<Decomposition> {
    let spec = &gs.spec;
    let f = &spec.field;
    let n = spec.n;
    if !spec.contains(g) {
        return Err(Error::NotInGroup);
    }
    if let Some(t) = Transvection::from_matrix(f, g) {
        if let Some(w) = gs.word_of(&t) {
            return Ok(Decomposition { factors: vec![t], word: w.clone() });
        }
    }
    // applied[k] ... applied[0] g = 1
    let applied = if spec.family == Family::SL { eliminate(spec, g) } else { clear_basis(gs, g)? };
    let factors: Vec<Transvection> = applied.iter().map(|t| t.inverse(f)).collect();
    assert!(factors.len() <= 4 * n * n, "{} factors exceed 4n^2", factors.len());
    let mut word = Vec::new();
    for t in &factors {
        let w = gs.word_of(t).ok_or_else(|| Error::HypothesisUnmet("transvection without a word".into()))?;
        word.extend_from_slice(w);
    }
    let word = reduce(word);
    assert!(gs.eval(&word) == *g, "decomposition does not multiply back");
    Ok(Decomposition { factors, word })
}

/// `1 + c e_a (x) e_b`.
fn elementary(spec: &GroupSpec, a: usize, b: usize, c: Fe) -> Transvection {
    let n = spec.n;
    Transvection::canonical(&spec.field, &vscale(&spec.field, c, &unit_vec(n, a)), &unit_vec(n, b))
}

/// Row operations reducing `g` to the identity.
fn eliminate(spec: &GroupSpec, g: &Mat) -> Vec<Transvection> {
    let f = &spec.field;
    let n = spec.n;
    let mut m = g.clone();
    let mut ops = Vec::new();
    let apply = |m: &mut Mat, ops: &mut Vec<Transvection>, a: usize, b: usize, c: Fe| {
        let t = elementary(spec, a, b, c);
        *m = t.matrix(f).mul(f, m);
        ops.push(t);
    };
    for j in 0..n {
        if j + 1 < n && m.get(j, j) != Fe::ONE {
            if m.get(j + 1, j).is_zero() {
                let Some(i) = (j..n).find(|&i| i != j + 1 && !m.get(i, j).is_zero()) else { unreachable!("invertible") };
                apply(&mut m, &mut ops, j + 1, i, Fe::ONE);
            }
            let p = m.get(j, j);
            if p != Fe::ONE {
                let c = f.div(f.sub(Fe::ONE, p), m.get(j + 1, j)).unwrap();
                apply(&mut m, &mut ops, j, j + 1, c);
            }
        }
        debug_assert_eq!(m.get(j, j), Fe::ONE);
        for i in 0..n {
            let x = m.get(i, j);
            if i != j && !x.is_zero() {
                apply(&mut m, &mut ops, i, j, f.neg(x));
            }
        }
    }
    debug_assert!(m.is_identity());
    ops
}

/// Maps each adapted basis vector back into place with transvections fixing
/// the vectors already placed.
fn clear_basis(gs: &GenSet, g: &Mat) -> Result<Vec<Transvection>> {
    let spec = &gs.spec;
    let f = &spec.field;
    let basis = adapted_basis(spec);
    let mut cur = g.clone();
    let mut ops = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let x = cur.apply(f, b);
        if x == *b {
            continue;
        }
        let fixed = &basis[..i];
        let path = match spec.family {
            Family::Sp => sp_path(spec, fixed, &x, b),
            _ => None,
        };
        let path = match path {
            Some(p) => p,
            None => bfs_path(gs, fixed, &x, b)?,
        };
        for t in path {
            cur = t.matrix(f).mul(f, &cur);
            ops.push(t);
        }
    }
    if !cur.is_identity() {
        return Err(Error::HypothesisUnmet("clearing left a nontrivial element".into()));
    }
    Ok(ops)
}

/// One transvection `x -> y` when `f(y,x) != 0`, otherwise two through some
/// `z` with the same pairings against `fixed`.
fn sp_path(spec: &GroupSpec, fixed: &[Vector], x: &[Fe], y: &[Fe]) -> Option<Vec<Transvection>> {
    let f = &spec.field;
    let step = |x: &[Fe], y: &[Fe]| -> Option<Transvection> {
        let fyx = spec.f(y, x);
        let u = vsub(f, y, x);
        (!fyx.is_zero() && !is_zero(&u)).then(|| spec.tv_of(&u, f.inv(fyx).unwrap()))
    };
    if let Some(t) = step(x, y) {
        return Some(vec![t]);
    }
    let want: Vec<Fe> = fixed.iter().map(|b| spec.f(b, y)).collect();
    all_vectors(f, spec.n)
        .filter(|z| fixed.iter().zip(&want).all(|(b, &w)| spec.f(b, z) == w))
        .find_map(|z| Some(vec![step(x, &z)?, step(&z, y)?]))
}

fn bfs_path(gs: &GenSet, fixed: &[Vector], x: &[Fe], y: &[Fe]) -> Result<Vec<Transvection>> {
    let f = gs.field();
    let letters: Vec<&Transvection> = gs.members.iter().map(|m| &m.t).filter(|t| fixed.iter().all(|b| pair(f, &t.phi, b).is_zero())).collect();
    let mut prev: HashMap<Vector, (Vector, usize)> = HashMap::new();
    let mut queue = VecDeque::from([x.to_vec()]);
    prev.insert(x.to_vec(), (x.to_vec(), usize::MAX));
    while let Some(v) = queue.pop_front() {
        if v == y {
            let mut path = Vec::new();
            let mut c = v;
            while c != x {
                let (p, li) = prev[&c].clone();
                path.push(letters[li].clone());
                c = p;
            }
            path.reverse();
            return Ok(path);
        }
        if prev.len() > gs.budget {
            break;
        }
        for (li, t) in letters.iter().enumerate() {
            let w = t.matrix(f).apply(f, &v);
            if !prev.contains_key(&w) {
                prev.insert(w.clone(), (v.clone(), li));
                queue.push_back(w);
            }
        }
    }
    Err(Error::BudgetExceeded("vector search in decomposition".into()))
}
