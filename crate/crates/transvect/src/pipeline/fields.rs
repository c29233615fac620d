//! Growing the weight fields and closing members under scalar powers.

use std::collections::{HashMap, VecDeque};

use super::{word_concat, word_inverse, GenSet, RelWord};
use crate::error::{Error, Result};
use crate::geom::{normalize, Mat};
use crate::gf::{Fe, Subfield};
use crate::graph::{label, weight_of, TransvectionGraph};
use crate::oracle;
use crate::trans::{tv_conjugate, Family, GroupSpec, Transvection};

const MAX_ROUNDS: usize = 256;

/// The field `M` of the closure stage: `F_q` for Sp and non-square SL,
/// `F_{q0}` for SU and `F_{sqrt q}` for square SL.
pub fn closure_field(spec: &GroupSpec) -> Subfield {
    let f = &spec.field;
    match spec.family {
        Family::Sp => f.full_subfield(),
        Family::SU => f.q0_subfield(),
        Family::SL if f.is_square() => Subfield { divisor: f.k() / 2 },
        Family::SL => f.full_subfield(),
    }
}

fn index_of(full: Subfield, sub: Subfield) -> u32 {
    full.divisor / sub.divisor
}

/// First cycle of length exactly `k` whose weight lies outside `sub`.
fn cycles_outside(g: &TransvectionGraph, k: usize, sub: Subfield, limit: usize) -> Result<Vec<Vec<usize>>> {
    let f = &g.field;
    let mut found = Vec::new();
    g.for_each_cycle(k, crate::graph::CYCLE_BUDGET, |c| {
        if c.len() == k && !f.in_subfield(g.weight(c), sub) {
            found.push(c.to_vec());
        }
        found.len() < limit
    })?;
    Ok(found)
}

/// Extends the set until `L_3 = F_q` and `[F_q : L_2] <= 2`.
pub fn boost_l3(gs: &mut GenSet) -> Result<usize> {
    let start = gs.len();
    let f = gs.field().clone();
    let full = f.full_subfield();
    for _ in 0..MAX_ROUNDS {
        let g = gs.graph();
        let l3 = g.l_k(3)?;
        if l3 == full {
            break;
        }
        let l4 = g.l_k(4)?;
        let l5 = g.l_k(5)?;
        let (k, prev) = if l4 != l3 {
            (4, l3)
        } else if l5 != l4 {
            (5, l4)
        } else {
            return Err(Error::HypothesisUnmet("weights of cycles of length at most 5 generate a proper subfield".into()));
        };
        let mut done = false;
        'search: for c in cycles_outside(&g, k, prev, 64)? {
            for rot in 0..k {
                let r: Vec<usize> = (0..k).map(|i| c[(i + rot) % k]).collect();
                if g.has_edge(r[k - 3], r[k - 1]) {
                    continue;
                }
                let s = tv_conjugate(&f, &gs.members[r[k - 2]].t, &gs.members[r[k - 1]].t);
                let mut tuple: Vec<&Transvection> = r[..k - 2].iter().map(|&i| &gs.members[i].t).collect();
                tuple.push(&s);
                let w = weight_of(&f, &tuple);
                if !w.is_zero() && !f.in_subfield(w, prev) {
                    gs.conj(r[k - 1], r[k - 2]);
                    done = true;
                    break 'search;
                }
            }
        }
        if !done {
            return Err(Error::HypothesisUnmet("no shortening conjugate raises the weight field".into()));
        }
    }
    for _ in 0..MAX_ROUNDS {
        let g = gs.graph();
        let l2 = g.l_k(2)?;
        if index_of(full, l2) <= 2 {
            break;
        }
        let tri = cycles_outside(&g, 3, l2, MAX_ROUNDS)?;
        if tri.is_empty() {
            return Err(Error::HypothesisUnmet("L_3 is not the whole field".into()));
        }
        let before = gs.len();
        for c in tri {
            gs.conj(c[2], c[1]);
            if index_of(full, gs.graph().l_k(2)?) <= 2 {
                break;
            }
        }
        if gs.len() == before {
            return Err(Error::HypothesisUnmet("L_2 has index above 2".into()));
        }
    }
    let g = gs.graph();
    if g.l_k(3)? != full || index_of(full, g.l_k(2)?) > 2 {
        return Err(Error::HypothesisUnmet("weight field audit failed".into()));
    }
    gs.end_stage("boost_l3", start);
    Ok(gs.len() - start)
}

/// `L_2 = F_q` for Sp via `r_3 r_2 r_3^-1`; checks `L_2 = F_{q0}` for SU.
pub fn fix_l2_sympunit(gs: &mut GenSet) -> Result<usize> {
    let start = gs.len();
    let f = gs.field().clone();
    match gs.spec.family {
        Family::SL => return Err(Error::WrongFamily("fix_l2_sympunit needs Sp or SU".into())),
        Family::SU => {
            if gs.graph().l_k(2)? != f.q0_subfield() {
                return Err(Error::HypothesisUnmet("L_2 differs from F_q0".into()));
            }
        }
        Family::Sp => {
            let full = f.full_subfield();
            for _ in 0..MAX_ROUNDS {
                let g = gs.graph();
                let l2 = g.l_k(2)?;
                if l2 == full {
                    break;
                }
                let tri = cycles_outside(&g, 3, l2, MAX_ROUNDS)?;
                let pick = tri.into_iter().find(|c| {
                    let s = tv_conjugate(&f, &gs.members[c[1]].t, &gs.members[c[2]].t);
                    !f.in_subfield(weight_of(&f, &[&gs.members[c[0]].t, &s]), l2)
                });
                let Some(c) = pick else {
                    return Err(Error::HypothesisUnmet("no triangle raises L_2".into()));
                };
                gs.conj(c[2], c[1]);
            }
            if gs.graph().l_k(2)? != full {
                return Err(Error::HypothesisUnmet("L_2 audit failed".into()));
            }
        }
    }
    gs.end_stage("fix_l2_sympunit", start);
    Ok(gs.len() - start)
}

/// Every member power `t^lambda`, `lambda` in `L^x`, is a member.
pub fn audit_m_closed(gs: &GenSet, l: Subfield) -> bool {
    let f = gs.field();
    let ls: Vec<Fe> = f.subfield_elements(l).into_iter().filter(|x| !x.is_zero()).collect();
    gs.members.iter().all(|m| ls.iter().all(|&lam| gs.index_of(&m.t.power(f, lam).unwrap()).is_some()))
}

/// Closes the members under `M`-powers and records property (P8).
pub fn close_over_m(gs: &mut GenSet) -> Result<usize> {
    let start = gs.len();
    let m = closure_field(&gs.spec);
    close_over_field(gs, m)?;
    gs.set_flag(8);
    gs.end_stage("close_over_m", start);
    Ok(gs.len() - start)
}

/// Adds `t^lambda` for every member `t` and `lambda` in `L^x`.
///
/// Prime-field powers are words `w^j`. Larger fields are reached through a
/// chain `K < K' <= L`: a block search in `<a^K, b>` for a two-way edge
/// `(a,b)` yields `a^{K'}`, which is carried to every other member by
/// conjugators found in two-way edge blocks.
pub fn close_over_field(gs: &mut GenSet, l: Subfield) -> Result<()> {
    let f = gs.field().clone();
    let p = f.p() as u64;
    if l.order(f.p()) == 9 {
        return Err(Error::ExceptionalField(9));
    }
    let ps = gs.len();
    for i in 0..ps {
        for j in 2..p {
            let t = gs.members[i].t.power(&f, f.int(j as i64)).unwrap();
            let rel: RelWord = if j <= p - j { vec![(i, 1); j as usize] } else { vec![(i, -1); (p - j) as usize] };
            gs.add_rel(t, &rel);
        }
    }
    let mut k = f.prime_subfield();
    for d in 1..=l.divisor {
        let s = Subfield { divisor: d };
        if l.divisor % d == 0 && s.contains(k) && audit_m_closed(gs, s) {
            k = s;
        }
    }
    while k != l {
        let g = gs.graph();
        let mut best: Option<(usize, usize, Subfield)> = None;
        for a in 0..g.len() {
            for &b in g.twoway_neighbors(a) {
                let w = g.weight(&[a, b]);
                let k2 = f.join(k, f.subfield_generated(&[w]));
                if k2 == k || !l.contains(k2) || k2.order(f.p()) == 9 {
                    continue;
                }
                if best.is_none_or(|(_, _, c)| k2.divisor > c.divisor) {
                    best = Some((a, b, k2));
                }
            }
        }
        let Some((a, b, k2)) = best else {
            return Err(Error::HypothesisUnmet("no two-way edge extends the closure field".into()));
        };
        root_block(gs, a, b, k, k2)?;
        propagate(gs, a, k2)?;
        k = k2;
    }
    if !audit_m_closed(gs, l) {
        return Err(Error::HypothesisUnmet("closure audit failed".into()));
    }
    Ok(())
}

fn nonzero_elems(gs: &GenSet, s: Subfield) -> Vec<Fe> {
    gs.field().subfield_elements(s).into_iter().filter(|x| !x.is_zero()).collect()
}

/// `a^lambda` for `lambda` in `K'^x` from a search in `<a^K, b>`.
fn root_block(gs: &mut GenSet, a: usize, b: usize, k: Subfield, k2: Subfield) -> Result<()> {
    let f = gs.field().clone();
    let at = gs.members[a].t.clone();
    let mut letters: Vec<usize> = nonzero_elems(gs, k).iter().map(|&lam| gs.index_of(&at.power(&f, lam).unwrap()).unwrap()).collect();
    letters.push(b);
    let mut mats: Vec<Mat> = letters.iter().map(|&i| gs.members[i].t.matrix(&f)).collect();
    mats.push(gs.members[b].t.inverse(&f).matrix(&f));
    let mut signed: Vec<(usize, i8)> = letters.iter().map(|&i| (i, 1)).collect();
    signed.push((b, -1));
    let targets: Vec<Transvection> = nonzero_elems(gs, k2)
        .into_iter()
        .map(|lam| at.power(&f, lam).unwrap())
        .filter(|t| gs.index_of(t).is_none())
        .collect();
    let tm: Vec<Mat> = targets.iter().map(|t| t.matrix(&f)).collect();
    gs.report.block_searches += 1;
    let words = oracle::word_search(&f, &mats, &tm, gs.budget)?;
    for (t, w) in targets.into_iter().zip(words) {
        let rel: RelWord = w.into_iter().map(|li| signed[li]).collect();
        gs.add_rel(t, &rel);
    }
    Ok(())
}

fn parallel(f: &crate::gf::Field, x: &[Fe], y: &[Fe]) -> Option<Fe> {
    let (nx, cx) = normalize(f, x)?;
    let (ny, cy) = normalize(f, y)?;
    (nx == ny).then(|| f.div(cy, cx).unwrap())
}

/// Carries `a^{K'}` to every member along a two-way BFS tree.
fn propagate(gs: &mut GenSet, a: usize, k2: Subfield) -> Result<()> {
    let f = gs.field().clone();
    let base = gs.len();
    let g = gs.graph();
    let at = gs.members[a].t.clone();
    let lams = nonzero_elems(gs, k2);
    // conj[r] = (h, mu) with h a h^-1 = r^mu
    let mut conj: HashMap<usize, (RelWord, Fe)> = HashMap::new();
    conj.insert(a, (Vec::new(), Fe::ONE));
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &r in g.twoway_neighbors(x) {
            if conj.contains_key(&r) {
                continue;
            }
            let xt = gs.members[x].t.clone();
            let rt = gs.members[r].t.clone();
            let letters = [(x, 1i8), (x, -1), (r, 1), (r, -1)];
            let mats: Vec<Mat> = letters
                .iter()
                .map(|&(i, s)| if s > 0 { gs.members[i].t.matrix(&f) } else { gs.members[i].t.inverse(&f).matrix(&f) })
                .collect();
            let mut nu = Fe::ONE;
            gs.report.block_searches += 1;
            let (_, w) = oracle::word_search_pred(&f, &mats, gs.budget, |h| {
                let Some(alpha) = parallel(&f, &h.apply(&f, &xt.u), &rt.u) else {
                    return false;
                };
                let Some(beta) = parallel(&f, &h.pullback(&f, &rt.phi), &xt.phi) else {
                    return false;
                };
                let v = f.div(alpha, beta).unwrap();
                nu = v;
                f.in_subfield(v, k2)
            })?;
            let h: RelWord = w.into_iter().map(|li| letters[li]).collect();
            let (hx, mux) = conj[&x].clone();
            conj.insert(r, (word_concat(&[&h, &hx]), f.mul(nu, mux)));
            queue.push_back(r);
        }
    }
    for r in 0..base {
        let Some((h, mu)) = conj.get(&r) else {
            return Err(Error::HypothesisUnmet("two-way graph is disconnected".into()));
        };
        let rt = gs.members[r].t.clone();
        for &lam in &lams {
            let t = rt.power(&f, lam).unwrap();
            if gs.index_of(&t).is_some() {
                continue;
            }
            let src = at.power(&f, f.div(lam, *mu).unwrap()).unwrap();
            let si = gs.index_of(&src).expect("root closed over the field");
            let rel = word_concat(&[h, &[(si, 1)], &word_inverse(h)]);
            gs.add_rel(t, &rel);
        }
    }
    Ok(())
}

fn d_u_nonzero(gs: &GenSet, c: &[usize]) -> bool {
    let ts: Vec<&Transvection> = c.iter().map(|&i| &gs.members[i].t).collect();
    crate::graph::d_u_of(gs.field(), &ts).is_ok_and(|d| !d.is_zero())
}

/// A triangle of members with `d_u != 0` (SL over a square field).
pub fn find_nonunitary_triangle(gs: &mut GenSet) -> Result<[usize; 3]> {
    if gs.spec.family != Family::SL {
        return Err(Error::WrongFamily("non-unitary triangles are an SL stage".into()));
    }
    if !gs.field().is_square() {
        return Err(Error::QNotSquare);
    }
    let start = gs.len();
    for _ in 0..8 {
        let g = gs.graph();
        let mut tri = None;
        g.for_each_cycle(3, crate::graph::CYCLE_BUDGET, |c| {
            if c.len() == 3 && d_u_nonzero(gs, c) {
                tri = Some([c[0], c[1], c[2]]);
                return false;
            }
            true
        })?;
        if let Some(t) = tri {
            gs.set_flag(5);
            gs.end_stage("find_nonunitary_triangle", start);
            return Ok(t);
        }
        let mut cyc = None;
        for k in 4..=5 {
            g.for_each_cycle(k, crate::graph::CYCLE_BUDGET, |c| {
                if c.len() == k && d_u_nonzero(gs, c) {
                    cyc = Some(c.to_vec());
                    return false;
                }
                true
            })?;
            if cyc.is_some() {
                break;
            }
        }
        let Some(c) = cyc else {
            return Err(Error::HypothesisUnmet("no non-unitary cycle of length at most 5".into()));
        };
        let k = c.len();
        for rot in 0..k {
            let r: Vec<usize> = (0..k).map(|i| c[(i + rot) % k]).collect();
            gs.conj(r[k - 1], r[k - 2]);
        }
    }
    Err(Error::HypothesisUnmet("shortening did not reach a non-unitary triangle".into()))
}

/// One representative member per root (direction and hyperplane).
fn root_reps(gs: &GenSet) -> Vec<usize> {
    let f = gs.field();
    let mut seen = HashMap::new();
    for (i, m) in gs.members.iter().enumerate() {
        let key = (m.t.u.clone(), normalize(f, &m.t.phi).unwrap().0);
        seen.entry(key).or_insert(i);
    }
    let mut v: Vec<usize> = seen.into_values().collect();
    v.sort();
    v
}

fn two_cycle_outside(gs: &GenSet, a: &Transvection, b: &Transvection, m: Subfield) -> bool {
    let f = gs.field();
    let x = label(f, a, b);
    let y = label(f, b, a);
    !x.is_zero() && !y.is_zero() && !f.in_subfield(f.mul(x, y), m)
}

/// A two-way edge of members with weight outside `M = F_{sqrt q}` (SL over
/// a square field). Tries, in order: an existing edge, the abc-acb
/// conjugate, a search in the block of a good triangle, conjugates by
/// `M`-powers over 4-tuples, and single conjugates of members.
pub fn find_nonm_2cycle(gs: &mut GenSet) -> Result<(usize, usize)> {
    if gs.spec.family != Family::SL {
        return Err(Error::WrongFamily("non-M 2-cycles are an SL stage".into()));
    }
    let f = gs.field().clone();
    if !f.is_square() {
        return Err(Error::QNotSquare);
    }
    let m = closure_field(&gs.spec);
    if m.order(f.p()) < 5 {
        return Err(Error::ExceptionalField(f.q()));
    }
    let start = gs.len();
    let reps = root_reps(gs);
    let found = |gs: &mut GenSet, pair: (usize, usize)| -> Result<(usize, usize)> {
        gs.end_stage("find_nonm_2cycle", start);
        Ok(pair)
    };
    for &a in &reps {
        for &b in &reps {
            if a < b && two_cycle_outside(gs, &gs.members[a].t, &gs.members[b].t, m) {
                return found(gs, (a, b));
            }
        }
    }
    // triangles with weight outside M
    let g = gs.graph();
    let mut tris: Vec<[usize; 3]> = Vec::new();
    let rep_set: std::collections::HashSet<usize> = reps.iter().copied().collect();
    g.for_each_cycle(3, crate::graph::CYCLE_BUDGET, |c| {
        if c.len() == 3 && c.iter().all(|i| rep_set.contains(i)) && !f.in_subfield(g.weight(c), m) {
            tris.push([c[0], c[1], c[2]]);
        }
        tris.len() < 512
    })?;
    // abc-acb: the pair (s1^{s2}, s3)
    for t in &tris {
        for rot in 0..3 {
            let (s1, s2, s3) = (t[rot], t[(rot + 1) % 3], t[(rot + 2) % 3]);
            let c = tv_conjugate(&f, &gs.members[s1].t, &gs.members[s2].t.inverse(&f));
            if two_cycle_outside(gs, &c, &gs.members[s3].t, m) {
                let i = gs.add_rel(c, &[(s2, -1), (s1, 1), (s2, 1)]);
                return found(gs, (i, s3));
            }
        }
    }
    // good triangle: search <s1, s2, s3> for a conjugate of s1
    let good: Vec<_> = tris.iter().filter(|t| d_u_nonzero(gs, &t[..])).take(4).cloned().collect();
    for t in &good {
        let letters: Vec<(usize, i8)> = t.iter().flat_map(|&i| [(i, 1i8), (i, -1)]).collect();
        let mats: Vec<Mat> = letters
            .iter()
            .map(|&(i, s)| if s > 0 { gs.members[i].t.matrix(&f) } else { gs.members[i].t.inverse(&f).matrix(&f) })
            .collect();
        let s1 = gs.members[t[0]].t.clone();
        let others: Vec<Transvection> = t.iter().map(|&i| gs.members[i].t.clone()).collect();
        gs.report.block_searches += 1;
        let res = oracle::word_search_pred(&f, &mats, gs.budget.min(200_000), |h| {
            let Some(hi) = h.inverse(&f) else { return false };
            let r = s1.conj_by(&f, h, &hi);
            others.iter().any(|o| two_cycle_outside(gs, &r, o, m))
        });
        if let Ok((h, w)) = res {
            let hi = h.inverse(&f).unwrap();
            let r = s1.conj_by(&f, &h, &hi);
            let j = t.iter().copied().find(|&i| two_cycle_outside(gs, &r, &gs.members[i].t, m)).unwrap();
            let hw: RelWord = w.into_iter().map(|li| letters[li]).collect();
            let rel = word_concat(&[&hw, &[(t[0], 1)], &word_inverse(&hw)]);
            let i = gs.add_rel(r, &rel);
            return found(gs, (i, j));
        }
    }
    // conjugates s3^{s4^lambda} over 4-tuples from triangles
    let mpow: Vec<Fe> = nonzero_elems(gs, m);
    let pool: Vec<usize> = {
        let mut v: Vec<usize> = tris.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v.truncate(24);
        v
    };
    for &s3 in &pool {
        for &s4 in &pool {
            if s3 == s4 {
                continue;
            }
            for &lam in &mpow {
                let g4 = gs.members[s4].t.power(&f, lam).unwrap();
                let c = tv_conjugate(&f, &gs.members[s3].t, &g4.inverse(&f));
                if let Some(&o) = reps.iter().find(|&&o| two_cycle_outside(gs, &c, &gs.members[o].t, m)) {
                    let gi = gs.index_of(&g4).expect("M-closed");
                    let i = gs.add_rel(c, &[(gi, -1), (s3, 1), (gi, 1)]);
                    return found(gs, (i, o));
                }
            }
        }
    }
    // single conjugates of representatives
    for &x in &reps {
        for &y in &reps {
            if x == y {
                continue;
            }
            let c = tv_conjugate(&f, &gs.members[y].t, &gs.members[x].t);
            if let Some(&o) = reps.iter().find(|&&o| two_cycle_outside(gs, &c, &gs.members[o].t, m)) {
                let i = gs.conj(x, y);
                return found(gs, (i, o));
            }
        }
    }
    Err(Error::CaseAnalysisExhausted)
}
