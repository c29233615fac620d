//! Brute-force ground truth at desk scale.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom::{self, is_zero, nullspace, span_basis, vaxpy, vscale, Mat, Vector};
use crate::gf::{Fe, Field};
use crate::trans::{Family, GroupSpec, Transvection};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub elements: HashSet<Mat>,
    pub order: u64,
    pub truncated: bool,
}

/// BFS closure of `gens`. With `truncate`, hitting the cap returns a partial
/// result instead of [`Error::CapExceeded`].
pub fn closure_enumerate(f: &Field, gens: &[Mat], cap: usize, truncate: bool) -> Result<ClosureResult> {
    let n = gens.first().map_or(1, |g| g.rows);
    let id = Mat::identity(n);
    let mut elements = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(f, g);
            if !elements.contains(&y) {
                if elements.len() >= cap {
                    if truncate {
                        let order = elements.len() as u64;
                        return Ok(ClosureResult { elements, order, truncated: true });
                    }
                    return Err(Error::CapExceeded(cap));
                }
                elements.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let order = elements.len() as u64;
    Ok(ClosureResult { elements, order, truncated: false })
}

pub fn closure_order(f: &Field, gens: &[Mat], cap: usize) -> Result<u64> {
    closure_enumerate(f, gens, cap, false).map(|r| r.order)
}

fn with_inverses(f: &Field, gens: &[Mat]) -> Vec<Mat> {
    let mut all: Vec<Mat> = Vec::new();
    for g in gens {
        for h in [g.clone(), g.inverse(f).expect("invertible generator")] {
            if !all.contains(&h) {
                all.push(h);
            }
        }
    }
    all
}

/// Exact diameter of the undirected Cayley graph on `gens` and their inverses.
pub fn cayley_diameter(f: &Field, gens: &[Mat], cap: usize) -> Result<usize> {
    let letters = with_inverses(f, gens);
    let n = gens.first().map_or(1, |g| g.rows);
    let id = Mat::identity(n);
    let mut dist: HashMap<Mat, usize> = HashMap::from([(id.clone(), 0)]);
    let mut queue = VecDeque::from([id]);
    let mut diam = 0;
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        diam = diam.max(d);
        for g in &letters {
            let y = x.mul(f, g);
            if !dist.contains_key(&y) {
                if dist.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                dist.insert(y.clone(), d + 1);
                queue.push_back(y);
            }
        }
    }
    Ok(diam)
}

/// Word length of `target` by meeting-in-the-middle BFS; `None` if unreachable within `cap` states per side.
pub fn cayley_distance_bidirectional(f: &Field, gens: &[Mat], target: &Mat, cap: usize) -> Option<usize> {
    let letters = with_inverses(f, gens);
    let inv_letters: Vec<Mat> = letters.iter().map(|g| g.inverse(f).unwrap()).collect();
    let id = Mat::identity(target.rows);
    if *target == id {
        return Some(0);
    }
    let mut fwd: HashMap<Mat, usize> = HashMap::from([(id.clone(), 0)]);
    let mut bwd: HashMap<Mat, usize> = HashMap::from([(target.clone(), 0)]);
    let mut fwd_front = vec![id];
    let mut bwd_front = vec![target.clone()];
    let (mut df, mut db) = (0usize, 0usize);
    loop {
        if fwd_front.is_empty() || bwd_front.is_empty() || fwd.len() + bwd.len() > 2 * cap {
            return None;
        }
        let forward = fwd_front.len() <= bwd_front.len();
        let (front, seen, other, depth, step) = if forward {
            (&mut fwd_front, &mut fwd, &bwd, &mut df, &letters)
        } else {
            (&mut bwd_front, &mut bwd, &fwd, &mut db, &inv_letters)
        };
        *depth += 1;
        let mut next = Vec::new();
        let mut best: Option<usize> = None;
        for x in front.iter() {
            for g in step.iter() {
                let y = x.mul(f, g);
                if seen.contains_key(&y) {
                    continue;
                }
                if let Some(&d) = other.get(&y) {
                    let total = *depth + d;
                    best = Some(best.map_or(total, |b: usize| b.min(total)));
                }
                seen.insert(y.clone(), *depth);
                next.push(y);
            }
        }
        if let Some(b) = best {
            return Some(b);
        }
        *front = next;
    }
}

/// Diameter as the maximum bidirectional distance over the enumerated group.
pub fn cayley_diameter_bidirectional(f: &Field, gens: &[Mat], cap: usize) -> Result<usize> {
    let all = closure_enumerate(f, gens, cap, false)?;
    let mut diam = 0;
    for g in &all.elements {
        let d = cayley_distance_bidirectional(f, gens, g, cap).ok_or(Error::CapExceeded(cap))?;
        diam = diam.max(d);
    }
    Ok(diam)
}

/// Breadth-first search from the identity over products of `letters`
/// (applied on the right), returning a shortest word for each target.
pub fn word_search(f: &Field, letters: &[Mat], targets: &[Mat], budget: usize) -> Result<Vec<Vec<usize>>> {
    let n = letters.first().map(|m| m.rows).or(targets.first().map(|m| m.rows)).unwrap_or(1);
    let mut want: HashMap<Mat, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        want.entry(t.clone()).or_default().push(i);
    }
    let mut out: Vec<Option<Vec<usize>>> = vec![None; targets.len()];
    let mut remaining = targets.len();
    let mut parent: HashMap<Mat, (usize, usize)> = HashMap::new();
    let mut states: Vec<Mat> = vec![Mat::identity(n)];
    parent.insert(states[0].clone(), (usize::MAX, usize::MAX));
    let word_of = |parent: &HashMap<Mat, (usize, usize)>, states: &Vec<Mat>, mut i: usize| {
        let mut w = Vec::new();
        loop {
            let (p, l) = parent[&states[i]];
            if p == usize::MAX {
                break;
            }
            w.push(l);
            i = p;
        }
        w.reverse();
        w
    };
    let mut head = 0;
    let mut check = |i: usize, states: &Vec<Mat>, parent: &HashMap<Mat, (usize, usize)>, out: &mut Vec<Option<Vec<usize>>>| {
        if let Some(idx) = want.remove(&states[i]) {
            let w = word_of(parent, states, i);
            for j in idx {
                out[j] = Some(w.clone());
                remaining -= 1;
            }
        }
        remaining == 0
    };
    if check(0, &states, &parent, &mut out) {
        return Ok(out.into_iter().map(Option::unwrap).collect());
    }
    while head < states.len() {
        let x = states[head].clone();
        for (li, g) in letters.iter().enumerate() {
            let y = x.mul(f, g);
            if parent.contains_key(&y) {
                continue;
            }
            if states.len() >= budget {
                return Err(Error::BudgetExceeded(format!("word search exceeded {budget} states")));
            }
            parent.insert(y.clone(), (head, li));
            states.push(y);
            if check(states.len() - 1, &states, &parent, &mut out) {
                return Ok(out.into_iter().map(Option::unwrap).collect());
            }
        }
        head += 1;
    }
    Err(Error::BudgetExceeded("targets not in the generated group".into()))
}

/// Shortest word whose product satisfies `pred`, with the product.
pub fn word_search_pred<P: FnMut(&Mat) -> bool>(f: &Field, letters: &[Mat], budget: usize, mut pred: P) -> Result<(Mat, Vec<usize>)> {
    let n = letters.first().map_or(1, |m| m.rows);
    let mut parent: HashMap<Mat, (usize, usize)> = HashMap::new();
    let mut states = vec![Mat::identity(n)];
    parent.insert(states[0].clone(), (usize::MAX, usize::MAX));
    let word_of = |parent: &HashMap<Mat, (usize, usize)>, states: &Vec<Mat>, mut i: usize| {
        let mut w = Vec::new();
        loop {
            let (p, l) = parent[&states[i]];
            if p == usize::MAX {
                break;
            }
            w.push(l);
            i = p;
        }
        w.reverse();
        w
    };
    if pred(&states[0]) {
        return Ok((states[0].clone(), Vec::new()));
    }
    let mut head = 0;
    while head < states.len() {
        let x = states[head].clone();
        for (li, g) in letters.iter().enumerate() {
            let y = x.mul(f, g);
            if parent.contains_key(&y) {
                continue;
            }
            if states.len() >= budget {
                return Err(Error::BudgetExceeded(format!("word search exceeded {budget} states")));
            }
            parent.insert(y.clone(), (head, li));
            states.push(y);
            let last = states.len() - 1;
            if pred(&states[last]) {
                return Ok((states[last].clone(), word_of(&parent, &states, last)));
            }
        }
        head += 1;
    }
    Err(Error::BudgetExceeded("no element satisfies the predicate".into()))
}

/// Block word search over transvection letters and their inverses. Letter
/// `2i` is `block_gens[i]`, letter `2i+1` its inverse.
pub fn sl2_word_search(f: &Field, block_gens: &[Transvection], targets: &[Mat], budget: usize) -> Result<Vec<Vec<(usize, i8)>>> {
    let mut letters = Vec::new();
    for t in block_gens {
        letters.push(t.matrix(f));
        letters.push(t.inverse(f).matrix(f));
    }
    let words = word_search(f, &letters, targets, budget)?;
    Ok(words.into_iter().map(|w| w.into_iter().map(|l| (l / 2, if l % 2 == 0 { 1 } else { -1 })).collect()).collect())
}

/// True iff no proper nonzero subspace is invariant under every generator.
pub fn invariant_subspace_search(f: &Field, gens: &[Mat]) -> Result<bool> {
    let n = gens.first().map_or(0, |g| g.rows);
    if (f.q() as f64).powi(n as i32) > 1e6 {
        return Err(Error::TooLarge);
    }
    for v in geom::projective_points(f, n) {
        let mut basis = vec![v];
        loop {
            let mut rows = basis.clone();
            for b in &basis {
                for g in gens {
                    rows.push(g.apply(f, b));
                }
            }
            let nb = span_basis(f, &rows);
            if nb.len() == basis.len() {
                break;
            }
            basis = nb;
        }
        if basis.len() < n {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn transvection_mats(f: &Field, ys: &[Transvection]) -> Vec<Mat> {
    ys.iter().map(|t| t.matrix(f)).collect()
}

/// Order of the full group from the standard formulas.
pub fn group_order(spec: &GroupSpec) -> Option<u128> {
    let n = spec.n as u32;
    match spec.family {
        Family::SL => {
            let q = spec.q() as u128;
            let mut acc = q.checked_pow(n * (n - 1) / 2)?;
            for i in 2..=n {
                acc = acc.checked_mul(q.checked_pow(i)? - 1)?;
            }
            Some(acc)
        }
        Family::Sp => {
            let q = spec.q() as u128;
            let m = n / 2;
            let mut acc = q.checked_pow(m * m)?;
            for i in 1..=m {
                acc = acc.checked_mul(q.checked_pow(2 * i)? - 1)?;
            }
            Some(acc)
        }
        Family::SU => {
            let q0 = spec.q0() as i128;
            let mut acc: i128 = q0.checked_pow(n * (n - 1) / 2)?;
            for i in 2..=n {
                let term = q0.checked_pow(i)? - if i % 2 == 0 { 1 } else { -1 };
                acc = acc.checked_mul(term)?;
            }
            Some(acc as u128)
        }
    }
}

/// Completes `vs` (spanning a nondegenerate subspace) with a basis of its orthogonal complement.
fn with_complement(spec: &GroupSpec, vs: &[Vector]) -> Mat {
    let f = &spec.field;
    let n = spec.n;
    let comp = if spec.family == Family::SL {
        // any complement: standard vectors outside the span
        let mut basis = vs.to_vec();
        let mut extra = Vec::new();
        for i in 0..n {
            let e = geom::unit_vec(n, i);
            let mut trial = basis.clone();
            trial.push(e.clone());
            if geom::rank(f, &trial) > basis.len() {
                basis.push(e.clone());
                extra.push(e);
            }
        }
        extra
    } else {
        let rows: Vec<Vector> = vs.iter().map(|v| spec.phi_of(v)).collect();
        nullspace(f, &Mat::from_rows(&rows).unwrap())
    };
    let mut cols = vs.to_vec();
    cols.extend(comp);
    Mat::from_rows(&cols).unwrap().transpose()
}

fn norm_scale(spec: &GroupSpec, v: &[Fe]) -> Option<Vector> {
    let f = &spec.field;
    let c = spec.f(v, v);
    let mu = f.norm_preimage(f.inv(c)?)?;
    Some(vscale(f, mu, v))
}

/// Singular `x` and `y` with `f(x,y) = 1`, inside the span of `within`.
fn hyperbolic_pair(spec: &GroupSpec, within: &[Vector]) -> Option<(Vector, Vector)> {
    let f = &spec.field;
    let span = span_basis(f, within);
    let all: Vec<Vector> = combos(f, &span);
    let x = all.iter().find(|v| !is_zero(v) && spec.is_singular(v) && span.iter().any(|b| !spec.f(v, b).is_zero()))?.clone();
    let yp = all.iter().find(|v| !spec.f(&x, v).is_zero())?.clone();
    let alpha = f.inv(spec.f(&x, &yp))?;
    let y1 = vscale(f, alpha, &yp);
    let c = spec.f(&y1, &y1);
    let half = f.inv(f.int(2)).unwrap();
    let beta = f.neg(f.mul(c, half));
    let y = vaxpy(f, &y1, beta, &x);
    Some((x, y))
}

/// Every linear combination of `span` (small spaces only).
fn combos(f: &Field, span: &[Vector]) -> Vec<Vector> {
    let k = span.len();
    let n = span.first().map_or(0, |v| v.len());
    geom::all_vectors(f, k)
        .map(|c| {
            let mut v = geom::zero_vec(n);
            for (ci, b) in c.iter().zip(span) {
                v = vaxpy(f, &v, *ci, b);
            }
            v
        })
        .collect()
}

/// A group element with trace `lambda`.
pub fn trace_witness(spec: &GroupSpec, lambda: Fe) -> Result<Mat> {
    let f = &spec.field;
    let n = spec.n;
    match spec.family {
        Family::SL | Family::Sp => {
            let (x, y) = match spec.family {
                Family::SL => (geom::unit_vec(n, 0), geom::unit_vec(n, 1)),
                _ => {
                    let all: Vec<Vector> = (0..n).map(|i| geom::unit_vec(n, i)).collect();
                    hyperbolic_pair(spec, &all).ok_or(Error::InvalidForm("no hyperbolic pair".into()))?
                }
            };
            let b = with_complement(spec, &[x, y]);
            let mut d = Mat::identity(n);
            // g(x) = y + (lambda - (n-2)) x, g(y) = -x
            d.set(0, 0, f.sub(lambda, f.int(n as i64 - 2)));
            d.set(1, 0, Fe::ONE);
            d.set(0, 1, f.neg(Fe::ONE));
            d.set(1, 1, Fe::ZERO);
            let g = b.mul(f, &d).mul(f, &b.inverse(f).unwrap());
            debug_assert!(spec.contains(&g));
            Ok(g)
        }
        Family::SU => {
            if n < 3 {
                return Err(Error::UnreachableTrace);
            }
            let q0 = spec.q0() as u64;
            let target = f.sub(f.int(n as i64 - 3), lambda);
            let qm1 = f.q() as u64 - 1;
            let b = f
                .nonzero()
                .find(|&b| f.order(b) == qm1 && f.pow(b, q0 - 1) == target)
                .ok_or(Error::UnreachableTrace)?;
            let all: Vec<Vector> = (0..n).map(|i| geom::unit_vec(n, i)).collect();
            let z0 = all
                .iter()
                .cloned()
                .chain(combos(f, &all[..3]))
                .find(|v| !spec.f(v, v).is_zero())
                .ok_or(Error::InvalidForm("totally isotropic".into()))?;
            let z = norm_scale(spec, &z0).ok_or(Error::InvalidForm("norm".into()))?;
            let perp = nullspace(f, &Mat::from_rows(&[spec.phi_of(&z)]).unwrap());
            let (x, y) = hyperbolic_pair(spec, &perp).ok_or(Error::InvalidForm("no hyperbolic pair".into()))?;
            let basis = with_complement(spec, &[x, y, z]);
            let mut d = Mat::identity(n);
            let bq0 = f.pow(b, q0);
            d.set(0, 0, Fe::ZERO);
            d.set(1, 1, Fe::ZERO);
            d.set(1, 0, f.inv(bq0).unwrap());
            d.set(0, 1, b);
            d.set(2, 2, f.neg(f.pow(b, q0 - 1)));
            let g = basis.mul(f, &d).mul(f, &basis.inverse(f).unwrap());
            debug_assert!(spec.contains(&g));
            Ok(g)
        }
    }
}
