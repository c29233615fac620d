//! Transvection subgroups `T_v` for sums of singular vectors, and the sweep
//! that produces every transvection.

use std::collections::HashMap;

use super::{word_concat, word_inverse, GenSet, RelWord};
use crate::error::{Error, Result};
use crate::geom::{self, is_zero, normalize, solve_in_span, vadd, vscale, vsub, Mat, Vector};
use crate::gf::Fe;
use crate::oracle;
use crate::trans::{tv_conjugate, Family, GroupSpec, Transvection};

/// Words relative to the members present when the derivation starts.
pub struct Derivation<'a> {
    pub gs: &'a mut GenSet,
    base: usize,
    rel: HashMap<Transvection, RelWord>,
}

impl<'a> Derivation<'a> {
    pub fn new(gs: &'a mut GenSet) -> Derivation<'a> {
        let rel = gs.members.iter().enumerate().map(|(i, m)| (m.t.clone(), vec![(i, 1)])).collect();
        let base = gs.len();
        Derivation { gs, base, rel }
    }

    fn spec(&self) -> &GroupSpec {
        &self.gs.spec
    }

    /// Members at the start of the derivation.
    pub fn base_len(&self) -> usize {
        self.base
    }

    /// `T_v = { 1 + lambda v (x) phi_v }`.
    pub fn family(&self, v: &[Fe]) -> Vec<Transvection> {
        let spec = self.spec();
        spec.scalars().into_iter().map(|l| spec.tv_of(v, l)).collect()
    }

    pub fn has_family(&self, v: &[Fe]) -> bool {
        self.family(v).iter().all(|t| self.rel.contains_key(t))
    }

    /// Longest relative word in `T_v`, if every element has one.
    pub fn family_len(&self, v: &[Fe]) -> Option<usize> {
        self.family(v).iter().map(|t| self.rel.get(t).map(Vec::len)).collect::<Option<Vec<_>>>().map(|l| l.into_iter().max().unwrap_or(0))
    }

    pub fn rel_word(&self, t: &Transvection) -> Option<&RelWord> {
        self.rel.get(t)
    }

    fn record(&mut self, t: Transvection, rel: RelWord) {
        if self.rel.get(&t).is_some_and(|r| r.len() <= rel.len()) {
            return;
        }
        self.gs.add_rel(t.clone(), &rel);
        self.rel.insert(t, rel);
    }

    fn need(&self, v: &[Fe]) -> Result<usize> {
        self.family_len(v).ok_or_else(|| Error::HypothesisUnmet("transvection subgroup without words".into()))
    }

    /// Directions of the starting members, in member order.
    fn base_directions(&self) -> Vec<Vector> {
        let mut out: Vec<Vector> = Vec::new();
        for m in &self.gs.members[..self.base] {
            if !out.contains(&m.t.u) && self.has_family(&m.t.u) {
                out.push(m.t.u.clone());
            }
        }
        out
    }

    /// Block search in the group generated by `T_g` for `g` in `gens`,
    /// producing words for `T_target`.
    fn block(&mut self, gens: &[Vector], target: &[Fe]) -> Result<usize> {
        let f = self.spec().field.clone();
        let mut letters: Vec<Transvection> = Vec::new();
        for g in gens {
            for t in self.family(g) {
                if !letters.contains(&t) {
                    letters.push(t);
                }
            }
        }
        let mats: Vec<Mat> = letters.iter().map(|t| t.matrix(&f)).collect();
        let targets: Vec<Transvection> = self.family(target);
        let tm: Vec<Mat> = targets.iter().map(|t| t.matrix(&f)).collect();
        self.gs.report.block_searches += 1;
        let words = oracle::word_search(&f, &mats, &tm, self.gs.budget)?;
        for (t, w) in targets.into_iter().zip(words) {
            let parts: Vec<&[(usize, i8)]> = w.iter().map(|&li| self.rel[&letters[li]].as_slice()).collect();
            let rel = word_concat(&parts);
            self.record(t, rel);
        }
        self.need(target)
    }

    /// Finds `h`, a product of starting members, with `h src` parallel to
    /// `target` by a search over points, and sets `T_target = h T_src h^-1`.
    fn conj_search(&mut self, src: &[Fe], target: &[Fe]) -> Result<usize> {
        let f = self.spec().field.clone();
        let key = |v: &[Fe]| normalize(&f, v).expect("nonzero").0;
        let letters: Vec<(usize, i8)> = (0..self.base).flat_map(|i| [(i, 1i8), (i, -1)]).collect();
        let mats: Vec<Mat> = letters
            .iter()
            .map(|&(i, s)| {
                let t = &self.gs.members[i].t;
                if s > 0 { t.matrix(&f) } else { t.inverse(&f).matrix(&f) }
            })
            .collect();
        let start = key(src);
        let goal = key(target);
        let mut prev: HashMap<Vector, (Vector, usize)> = HashMap::from([(start.clone(), (start.clone(), usize::MAX))]);
        let mut queue = std::collections::VecDeque::from([start.clone()]);
        while let Some(v) = queue.pop_front() {
            if v == goal {
                break;
            }
            for (li, m) in mats.iter().enumerate() {
                let w = key(&m.apply(&f, &v));
                if !prev.contains_key(&w) {
                    prev.insert(w.clone(), (v.clone(), li));
                    queue.push_back(w);
                }
            }
        }
        if !prev.contains_key(&goal) {
            return Err(Error::HypothesisUnmet("target point outside the orbit".into()));
        }
        // h = m_k ... m_1 along the path
        let mut hw: RelWord = Vec::new();
        let mut c = goal;
        while c != start {
            let (p, li) = prev[&c].clone();
            hw.push(letters[li]);
            c = p;
        }
        let hw = super::reduce(hw);
        let h = hw.iter().fold(Mat::identity(self.spec().n), |acc, &(i, s)| {
            let t = &self.gs.members[i].t;
            acc.mul(&f, &if s > 0 { t.matrix(&f) } else { t.inverse(&f).matrix(&f) })
        });
        let hi = h.inverse(&f).expect("invertible");
        for t in self.family(target) {
            let s = t.conj_by(&f, &hi, &h);
            let Some(sw) = self.rel.get(&s) else {
                return Err(Error::HypothesisUnmet("transvection subgroup without words".into()));
            };
            let rel = word_concat(&[&hw, sw, &word_inverse(&hw)]);
            self.record(t, rel);
        }
        self.need(target)
    }

    /// `T_{x+y} = g T_x g^-1` with `g = 1 + f(y,x)^-1 y (x) phi_y` in `T_y`;
    /// needs `f(x,y) != 0`. The orientation with shorter words is used.
    fn conj_case(&mut self, x: &[Fe], y: &[Fe]) -> Result<usize> {
        let f = self.spec().field.clone();
        let lx = self.need(x)?;
        let ly = self.need(y)?;
        let (x, y) = if lx + 2 * ly <= ly + 2 * lx { (x.to_vec(), y.to_vec()) } else { (y.to_vec(), x.to_vec()) };
        let spec = self.spec().clone();
        let fyx = spec.f(&y, &x);
        let g = spec.tv_of(&y, f.inv(fyx).ok_or(Error::HypothesisUnmet("orthogonal summands".into()))?);
        let gw = self.rel[&g].clone();
        let sum = vadd(&f, &x, &y);
        for lam in spec.scalars() {
            let src = spec.tv_of(&x, lam);
            let t = spec.tv_of(&sum, lam);
            debug_assert_eq!(tv_conjugate(&f, &src, &g), t);
            let rel = word_concat(&[&gw, &self.rel[&src], &word_inverse(&gw)]);
            self.record(t, rel);
        }
        self.need(&sum)
    }
}

fn parallel(f: &crate::gf::Field, a: &[Fe], b: &[Fe]) -> bool {
    normalize(f, a).map(|x| x.0) == normalize(f, b).map(|x| x.0)
}

/// Words for `T_{a+b}` given `T_a` and `T_b`; returns the longest relative
/// word length in `T_{a+b}`.
pub fn add_two(d: &mut Derivation, a: &[Fe], b: &[Fe]) -> Result<usize> {
    let spec = d.spec().clone();
    let f = spec.field.clone();
    if spec.family == Family::SL {
        return Err(Error::WrongFamily("add_two needs a form".into()));
    }
    let sum = vadd(&f, a, b);
    if is_zero(&sum) {
        return Err(Error::ZeroData);
    }
    if !spec.is_singular(&sum) {
        return Err(Error::NotSingular);
    }
    if is_zero(a) {
        return d.need(b);
    }
    if is_zero(b) || parallel(&f, a, b) {
        return d.need(a);
    }
    d.need(a)?;
    d.need(b)?;
    if let Some(l) = d.family_len(&sum) {
        return Ok(l);
    }
    match spec.family {
        Family::Sp => sp_add_two(d, a, b),
        _ => su_add_two(d, a, b),
    }
}

fn sp_add_two(d: &mut Derivation, a: &[Fe], b: &[Fe]) -> Result<usize> {
    let spec = d.spec().clone();
    let f = spec.field.clone();
    let ff = |x: &[Fe], y: &[Fe]| spec.f(x, y);
    if !ff(a, b).is_zero() {
        return d.conj_case(a, b);
    }
    let dirs = d.base_directions();
    let sum = vadd(&f, a, b);
    let Some(c) = dirs.iter().find(|c| !ff(c, a).is_zero() && !ff(b, c).is_zero()).cloned() else {
        return Err(Error::HypothesisUnmet("no common neighbour of the summands".into()));
    };
    // a + b = (a + e) + (b - e) for a common neighbour e with f(e, a+b) != 0
    let via = |d: &mut Derivation, e: &[Fe]| -> Result<usize> {
        let ae = vadd(&f, a, e);
        let be = vsub(&f, b, e);
        d.conj_case(a, e)?;
        d.conj_case(b, &vscale(&f, f.neg(Fe::ONE), e))?;
        d.conj_case(&ae, &be)
    };
    if !ff(&c, &sum).is_zero() {
        return via(d, &c);
    }
    let Some(dd) = dirs.iter().find(|x| !ff(x, &sum).is_zero()).cloned() else {
        return Err(Error::HypothesisUnmet("directions do not span".into()));
    };
    if !ff(&dd, a).is_zero() && !ff(&dd, b).is_zero() {
        return via(d, &dd);
    }
    let (a, b) = if ff(&dd, a).is_zero() { (b.to_vec(), a.to_vec()) } else { (a.to_vec(), b.to_vec()) };
    let d1 = if !ff(&c, &dd).is_zero() {
        dd.clone()
    } else {
        let ad = vadd(&f, &a, &dd);
        d.conj_case(&a, &dd)?;
        ad
    };
    let Some(tau) = f.nonzero().find(|&tau| !ff(&vadd(&f, &vscale(&f, tau, &c), &d1), &a).is_zero()) else {
        return Err(Error::HypothesisUnmet("no admissible scalar".into()));
    };
    let tc = vscale(&f, tau, &c);
    let e = vadd(&f, &tc, &d1);
    d.conj_case(&tc, &d1)?;
    let ae = vadd(&f, &a, &e);
    let be = vsub(&f, &b, &e);
    d.conj_case(&a, &e)?;
    d.conj_case(&b, &vscale(&f, f.neg(Fe::ONE), &e))?;
    d.conj_case(&ae, &be)
}

fn su_add_two(d: &mut Derivation, a: &[Fe], b: &[Fe]) -> Result<usize> {
    let spec = d.spec().clone();
    let f = spec.field.clone();
    if !spec.f(a, b).is_zero() {
        return d.block(&[a.to_vec(), b.to_vec()], &vadd(&f, a, b));
    }
    let dirs = d.base_directions();
    let sum = vadd(&f, a, b);
    for c in dirs.iter().filter(|c| !spec.f(c, a).is_zero() && !spec.f(b, c).is_zero()) {
        for mu in f.nonzero() {
            let mc = vscale(&f, mu, c);
            let x = vadd(&f, a, &mc);
            let y = vsub(&f, b, &mc);
            if spec.is_singular(&x) && spec.is_singular(&y) && !spec.f(&x, &y).is_zero() {
                add_two(d, a, &mc)?;
                add_two(d, b, &vscale(&f, f.neg(Fe::ONE), &mc))?;
                return add_two(d, &x, &y);
            }
        }
    }
    d.conj_search(a, &sum)
}

/// Some `i` and `lambda` in `F_{q0}` with `v - lambda v_i` singular, where
/// `v` is the sum of `summands`. `lambda = 0` when `v` is singular.
pub fn split_singular(spec: &GroupSpec, summands: &[Vector]) -> Result<(usize, Fe)> {
    let f = &spec.field;
    let n = spec.n;
    let v = summands.iter().fold(geom::zero_vec(n), |acc, s| vadd(f, &acc, s));
    let fvv = spec.f(&v, &v);
    if fvv.is_zero() {
        return Ok((0, Fe::ZERO));
    }
    for (i, s) in summands.iter().enumerate() {
        let tr = f.trace(spec.f(&v, s));
        if let Some(lam) = f.div(fvv, tr) {
            debug_assert!(spec.is_singular(&vsub(f, &v, &vscale(f, lam, s))));
            return Ok((i, lam));
        }
    }
    Err(Error::NotSingular)
}

/// Words for `T_{v1+v2+v3}` (SU) from `T_{v1}`, `T_{v2}`, `T_{v3}`.
pub fn add_three(d: &mut Derivation, v1: &[Fe], v2: &[Fe], v3: &[Fe]) -> Result<usize> {
    let spec = d.spec().clone();
    let f = spec.field.clone();
    if spec.family != Family::SU {
        return Err(Error::WrongFamily("add_three is the unitary step".into()));
    }
    let vs: Vec<Vector> = [v1, v2, v3].iter().filter(|v| !is_zero(v)).map(|v| v.to_vec()).collect();
    let sum = vs.iter().fold(geom::zero_vec(spec.n), |acc, s| vadd(&f, &acc, s));
    if !spec.is_singular(&sum) {
        return Err(Error::NotSingular);
    }
    match vs.len() {
        0 => return Err(Error::ZeroData),
        1 => return d.need(&vs[0]),
        2 => return add_two(d, &vs[0], &vs[1]),
        _ => {}
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if parallel(&f, &vs[i], &vs[j]) {
            let k = 3 - i - j;
            let x = vadd(&f, &vs[i], &vs[j]);
            if is_zero(&x) {
                return d.need(&vs[k]);
            }
            return add_two(d, &x, &vs[k]);
        }
    }
    if let Some(l) = d.family_len(&sum) {
        return Ok(l);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if f.trace(spec.f(&vs[i], &vs[j])).is_zero() {
            let k = 3 - i - j;
            add_two(d, &vs[i], &vs[j])?;
            return add_two(d, &vadd(&f, &vs[i], &vs[j]), &vs[k]);
        }
    }
    // lambda v1 + v2 and (1 - lambda) v1 + v3 both singular
    for first in 0..3 {
        let (x1, x2, x3) = (&vs[first], &vs[(first + 1) % 3], &vs[(first + 2) % 3]);
        for lam in f.elements() {
            let p = vadd(&f, &vscale(&f, lam, x1), x2);
            let q = vadd(&f, &vscale(&f, f.sub(Fe::ONE, lam), x1), x3);
            if is_zero(&p) || is_zero(&q) || !spec.is_singular(&p) || !spec.is_singular(&q) {
                continue;
            }
            if !lam.is_zero() {
                add_two(d, &vscale(&f, lam, x1), x2)?;
            }
            if lam != Fe::ONE {
                add_two(d, &vscale(&f, f.sub(Fe::ONE, lam), x1), x3)?;
            }
            return add_two(d, &p, &q);
        }
    }
    d.block(&vs, &sum)
}

/// Words for every transvection of the group. Sp and SU combine basis
/// directions by recursive halving; SL conjugates by the original
/// generators until every transvection is reached.
pub fn generate_all_transvections(gs: &mut GenSet) -> Result<usize> {
    let start = gs.len();
    let spec = gs.spec.clone();
    let f = spec.field.clone();
    if spec.family == Family::SL {
        sl_sweep(gs)?;
    } else {
        let mut d = Derivation::new(gs);
        let dirs = d.base_directions();
        let basis = geom::span_basis(&f, &dirs);
        let basis: Vec<Vector> = {
            let mut chosen: Vec<Vector> = Vec::new();
            for v in &dirs {
                let mut trial = chosen.clone();
                trial.push(v.clone());
                if geom::rank(&f, &trial) == trial.len() {
                    chosen = trial;
                }
                if chosen.len() == basis.len() {
                    break;
                }
            }
            chosen
        };
        if basis.len() < spec.n {
            return Err(Error::HypothesisUnmet("directions do not span".into()));
        }
        let mut rel_max = 0;
        for v in geom::projective_points(&f, spec.n) {
            if !spec.is_singular(&v) {
                continue;
            }
            if d.family_len(&v).is_none() {
                let coeffs = solve_in_span(&f, &basis, &v).expect("basis spans");
                let summands: Vec<Vector> =
                    coeffs.iter().zip(&basis).filter(|(c, _)| !c.is_zero()).map(|(&c, b)| vscale(&f, c, b)).collect();
                ensure(&mut d, &summands)?;
            }
            rel_max = rel_max.max(d.family_len(&v).expect("derived"));
        }
        gs.report.relative_max_len = Some(rel_max);
    }
    if gs.len() as u64 != spec.count_transvections() {
        return Err(Error::HypothesisUnmet("sweep missed transvections".into()));
    }
    gs.end_stage("generate_all_transvections", start);
    Ok(gs.len() - start)
}

fn sum_of(d: &Derivation, s: &[Vector]) -> Vector {
    let f = &d.spec().field;
    s.iter().fold(geom::zero_vec(d.spec().n), |acc, x| vadd(f, &acc, x))
}

/// Words for `T_v`, `v` the sum of independent singular `summands`.
fn ensure(d: &mut Derivation, summands: &[Vector]) -> Result<usize> {
    let spec = d.spec().clone();
    let f = spec.field.clone();
    let v = sum_of(d, summands);
    if let Some(l) = d.family_len(&v) {
        return Ok(l);
    }
    let k = summands.len();
    match (spec.family, k) {
        (_, 0) => Err(Error::ZeroData),
        (_, 1) => d.need(&summands[0]),
        (_, 2) => add_two(d, &summands[0], &summands[1]),
        (Family::SU, 3) => add_three(d, &summands[0], &summands[1], &summands[2]),
        (Family::Sp, _) => {
            let h = k.div_ceil(2);
            let (u1, u2) = summands.split_at(h);
            ensure(d, u1)?;
            ensure(d, u2)?;
            add_two(d, &sum_of(d, u1), &sum_of(d, u2))
        }
        _ => {
            let h = k.div_ceil(2);
            let (u1, u2) = summands.split_at(h);
            let (i, lam) = split_singular(&spec, u1)?;
            let mut v1: Vec<Vector> = u1.to_vec();
            v1[i] = vscale(&f, f.sub(Fe::ONE, lam), &u1[i]);
            v1.retain(|x| !is_zero(x));
            let mut rest: Vec<Vector> = Vec::new();
            if !lam.is_zero() {
                rest.push(vscale(&f, lam, &u1[i]));
            }
            rest.extend_from_slice(u2);
            ensure(d, &v1)?;
            let rv = sum_of(d, &rest);
            if spec.is_singular(&rv) {
                ensure(d, &rest)?;
                return add_two(d, &sum_of(d, &v1), &rv);
            }
            let (j, mu) = split_singular(&spec, &rest)?;
            let v2 = vscale(&f, mu, &rest[j]);
            let mut v3 = rest.clone();
            v3[j] = vsub(&f, &rest[j], &v2);
            v3.retain(|x| !is_zero(x));
            ensure(d, &v3)?;
            add_three(d, &sum_of(d, &v1), &v2, &sum_of(d, &v3))
        }
    }
}

fn sl_sweep(gs: &mut GenSet) -> Result<()> {
    let f = gs.field().clone();
    let target = gs.spec.count_transvections() as usize;
    let mut frontier: Vec<usize> = (0..gs.len()).collect();
    while gs.len() < target {
        let start = gs.len();
        for &y in &frontier {
            for i in 0..gs.originals.len() {
                for s in [1i8, -1] {
                    let (g, gi) = if s > 0 { (&gs.originals[i], &gs.inverses[i]) } else { (&gs.inverses[i], &gs.originals[i]) };
                    let t = gs.members[y].t.conj_by(&f, g, gi);
                    if gs.index_of(&t).is_some() {
                        continue;
                    }
                    let l = [(i as u32, s)];
                    let w = word_concat(&[&l, &gs.members[y].word, &word_inverse(&l)]);
                    gs.add(t, w);
                }
            }
        }
        if gs.len() == start {
            return Err(Error::HypothesisUnmet("conjugation sweep stalled".into()));
        }
        frontier = (start..gs.len()).collect();
    }
    Ok(())
}
