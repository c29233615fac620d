//! Seeding and the graph-diameter stages.

use std::collections::HashSet;

use super::{generates_group, GenSet};
use crate::classify;
use crate::error::{Error, Result};
use crate::geom::{self, normalize, pair, Covector, Mat, Vector};
use crate::graph::label;
use crate::oracle;
use crate::trans::{tv_conjugate, tv_in_group, Family, GroupSpec, Transvection};

/// Transvections of `x` and their conjugates by `x`, level by level, until
/// they generate the group or the level cap `2 ceil(log2 |G|)` is reached.
pub fn seed_conjugate_class(spec: &GroupSpec, x: &[Mat], cap: usize, seed: u64) -> Result<GenSet> {
    let f = spec.field.clone();
    let mut gs = GenSet::new(spec, x)?;
    for (i, m) in x.iter().enumerate() {
        if let Some(t) = Transvection::from_matrix(&f, m) {
            if tv_in_group(&t, spec) {
                gs.add(t, vec![(i as u32, 1)]);
            }
        }
    }
    if gs.is_empty() {
        return Err(Error::NoTransvectionInX);
    }
    let levels = oracle::group_order(spec).map_or(64, |o| 2 * (o as f64).log2().ceil() as usize);
    let mut frontier: Vec<usize> = (0..gs.len()).collect();
    for _ in 0..levels {
        if generates_group(spec, &gs.transvections(), cap, seed) {
            break;
        }
        let start = gs.len();
        for &y in &frontier {
            for i in 0..x.len() {
                let t = gs.members[y].t.conj_by(&f, &gs.originals[i], &gs.inverses[i]);
                let mut w = vec![(i as u32, 1)];
                w.extend_from_slice(&gs.members[y].word);
                w.push((i as u32, -1));
                gs.add(t, super::reduce(w));
            }
        }
        if gs.len() == start {
            break;
        }
        frontier = (start..gs.len()).collect();
    }
    gs.set_flag(1);
    gs.end_stage("seed_conjugate_class", 0);
    Ok(gs)
}

fn check_p2(gs: &GenSet) -> Result<()> {
    if !classify::irreducible(gs.field(), &gs.transvections()) {
        return Err(Error::HypothesisUnmet("parts do not span or the graph is not strongly connected".into()));
    }
    Ok(())
}

/// Adds `r_k ... r_2 r_1 r_2^-1 ... r_k^-1` for the shortest path
/// `r_1, ..., r_k` between every ordered pair of members.
pub fn extend_diameter2(gs: &mut GenSet) -> Result<usize> {
    check_p2(gs)?;
    gs.set_flag(2);
    let start = gs.len();
    if !audit_diameter2(gs) {
        let g = gs.graph();
        let f = gs.field().clone();
        for a in 0..start {
            for b in 0..start {
                if a == b {
                    continue;
                }
                let path = g.shortest_path(a, b, false).expect("strongly connected");
                let mut t = gs.members[path[0]].t.clone();
                let mut rel = vec![(path[0], 1i8)];
                for &r in &path[1..] {
                    t = tv_conjugate(&f, &t, &gs.members[r].t);
                    rel.insert(0, (r, 1));
                    rel.push((r, -1));
                }
                gs.add_rel(t, &rel);
            }
        }
        if !audit_diameter2(gs) {
            return Err(Error::HypothesisUnmet("diameter audit failed after extension".into()));
        }
    }
    gs.set_flag(6);
    gs.end_stage("extend_diameter2", start);
    Ok(gs.len() - start)
}

/// Points, hyperplanes and transvection flags of the group.
#[derive(Clone, Debug)]
pub struct FlagSpace {
    pub points: Vec<Vector>,
    pub hyperplanes: Vec<Covector>,
    /// `incident[h]` lists the points on hyperplane `h`.
    pub incident: Vec<Vec<usize>>,
    /// `(point, hyperplane)` pairs carried by transvections.
    pub flags: Vec<(usize, usize)>,
}

impl FlagSpace {
    pub fn new(spec: &GroupSpec) -> FlagSpace {
        let f = &spec.field;
        let n = spec.n;
        let all = geom::projective_points(f, n);
        let (points, hyperplanes): (Vec<Vector>, Vec<Covector>) = match spec.family {
            Family::SL => (all.clone(), all),
            _ => {
                let pts: Vec<Vector> = all.into_iter().filter(|p| spec.is_singular(p)).collect();
                let hyps = pts.iter().map(|p| normalize(f, &spec.phi_of(p)).unwrap().0).collect();
                (pts, hyps)
            }
        };
        let incident: Vec<Vec<usize>> = hyperplanes
            .iter()
            .map(|h| (0..points.len()).filter(|&p| pair(f, h, &points[p]).is_zero()).collect())
            .collect();
        let flags = match spec.family {
            Family::SL => incident.iter().enumerate().flat_map(|(h, ps)| ps.iter().map(move |&p| (p, h))).collect(),
            _ => (0..points.len()).map(|i| (i, i)).collect(),
        };
        FlagSpace { points, hyperplanes, incident, flags }
    }
}

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64).max(1)]
}

fn bits_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bits_meet(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Members `r` with `phi_r(point) != 0`, per point.
fn out_bits(gs: &GenSet, fs: &FlagSpace) -> Vec<Bits> {
    let f = gs.field();
    fs.points
        .iter()
        .map(|p| {
            let mut b = bits_new(gs.len());
            for (i, m) in gs.members.iter().enumerate() {
                if !pair(f, &m.t.phi, p).is_zero() {
                    bits_set(&mut b, i);
                }
            }
            b
        })
        .collect()
}

/// Members `r` with `h(u_r) != 0`, per hyperplane.
fn in_bits(gs: &GenSet, fs: &FlagSpace) -> Vec<Bits> {
    let f = gs.field();
    fs.hyperplanes
        .iter()
        .map(|h| {
            let mut b = bits_new(gs.len());
            for (i, m) in gs.members.iter().enumerate() {
                if !pair(f, h, &m.t.u).is_zero() {
                    bits_set(&mut b, i);
                }
            }
            b
        })
        .collect()
}

/// For all `s, t` in the group with `[s,t]` not an edge, some member `r`
/// has `[s,r]` and `[r,t]` as edges. Exhaustive over point/hyperplane pairs.
pub fn audit_diameter2(gs: &GenSet) -> bool {
    let fs = FlagSpace::new(&gs.spec);
    let outs = out_bits(gs, &fs);
    let ins = in_bits(gs, &fs);
    fs.incident.iter().enumerate().all(|(h, ps)| ps.iter().all(|&p| bits_meet(&outs[p], &ins[h])))
}

fn twoway(gs: &GenSet, a: &Transvection, b: &Transvection) -> bool {
    let f = gs.field();
    !label(f, a, b).is_zero() && !label(f, b, a).is_zero()
}

/// Makes every two transvections of the group joined by a two-way path of
/// length at most 6 through members. Verification only for Sp and SU.
pub fn extend_twoway6(gs: &mut GenSet) -> Result<usize> {
    let start = gs.len();
    if gs.spec.family != Family::SL {
        if !gs.has_flag(6) {
            return Err(Error::HypothesisUnmet("diameter property missing".into()));
        }
        gs.set_flag(7);
        gs.end_stage("extend_twoway6", start);
        return Ok(0);
    }
    let f = gs.field().clone();
    let fs = FlagSpace::new(&gs.spec);
    let x_len = gs.len();
    // every flag gets a two-way neighbour
    for &(p, h) in &fs.flags {
        let u = &fs.points[p];
        let phi = &fs.hyperplanes[h];
        let has = gs.members.iter().any(|m| !pair(&f, &m.t.phi, u).is_zero() && !pair(&f, phi, &m.t.u).is_zero());
        if has {
            continue;
        }
        let r = (0..x_len).find(|&r| !pair(&f, &gs.members[r].t.phi, u).is_zero());
        let Some(r) = r else {
            return Err(Error::HypothesisUnmet("no edge into the generating set".into()));
        };
        let t = (0..x_len).find(|&t| {
            let tt = &gs.members[t].t;
            !label(&f, &gs.members[r].t, tt).is_zero() && !pair(&f, phi, &tt.u).is_zero()
        });
        let Some(t) = t else {
            return Err(Error::HypothesisUnmet("diameter property fails".into()));
        };
        gs.conj(t, r);
    }
    // one-way edges between members get a two-way 2-path
    let x1 = gs.len();
    for r1 in 0..x1 {
        for r2 in 0..x1 {
            let (a, b) = (gs.members[r1].t.clone(), gs.members[r2].t.clone());
            if r1 == r2 || label(&f, &a, &b).is_zero() || !label(&f, &b, &a).is_zero() {
                continue;
            }
            if gs.members.iter().any(|m| twoway(gs, &a, &m.t) && twoway(gs, &m.t, &b)) {
                continue;
            }
            let t = (0..x1).find(|&t| {
                let tt = &gs.members[t].t;
                !label(&f, &b, tt).is_zero() && !label(&f, tt, &a).is_zero()
            });
            let Some(t) = t else {
                return Err(Error::HypothesisUnmet("diameter property fails".into()));
            };
            let tt = gs.members[t].t.clone();
            let c1 = tv_conjugate(&f, &tt, &a);
            let c2 = tv_conjugate(&f, &tt, &b);
            let cands: Vec<(Transvection, Vec<(usize, i8)>)> = vec![
                (tt.clone(), vec![(t, 1)]),
                (c1.clone(), vec![(r1, 1), (t, 1), (r1, -1)]),
                (c2.clone(), vec![(r2, 1), (t, 1), (r2, -1)]),
                (tv_conjugate(&f, &c1, &b), vec![(r2, 1), (r1, 1), (t, 1), (r1, -1), (r2, -1)]),
                (tv_conjugate(&f, &c2, &a), vec![(r1, 1), (r2, 1), (t, 1), (r2, -1), (r1, -1)]),
            ];
            let Some((c, rel)) = cands.into_iter().find(|(c, _)| twoway(gs, &a, c) && twoway(gs, c, &b)) else {
                return Err(Error::HypothesisUnmet("no two-way detour for a one-way edge".into()));
            };
            gs.add_rel(c, &rel);
        }
    }
    if !audit_twoway6(gs) {
        return Err(Error::HypothesisUnmet("two-way diameter audit failed".into()));
    }
    gs.set_flag(7);
    gs.end_stage("extend_twoway6", start);
    Ok(gs.len() - start)
}

/// Sufficient condition for two-way diameter at most 6 in every superset:
/// for all flags `s, t` there are two-way neighbours `x` of `s` and `y` of
/// `t` among the members at two-way distance at most 4.
pub fn audit_twoway6(gs: &GenSet) -> bool {
    let f = gs.field();
    let m = gs.len();
    let g = gs.graph();
    let ball: Vec<Bits> = (0..m)
        .map(|x| {
            let mut b = bits_new(m);
            for (y, d) in g.distances(x, true).into_iter().enumerate() {
                if d.is_some_and(|d| d <= 4) {
                    bits_set(&mut b, y);
                }
            }
            b
        })
        .collect();
    let fs = FlagSpace::new(&gs.spec);
    let mut sets: HashSet<Bits> = HashSet::new();
    for &(p, h) in &fs.flags {
        let mut b = bits_new(m);
        for (i, mm) in gs.members.iter().enumerate() {
            if !pair(f, &mm.t.phi, &fs.points[p]).is_zero() && !pair(f, &fs.hyperplanes[h], &mm.t.u).is_zero() {
                bits_set(&mut b, i);
            }
        }
        if b.iter().all(|&w| w == 0) {
            return false;
        }
        sets.insert(b);
    }
    let sets: Vec<Bits> = sets.into_iter().collect();
    sets.iter().all(|a| {
        let mut reach = bits_new(m);
        for x in 0..m {
            if a[x / 64] >> (x % 64) & 1 == 1 {
                for (r, b) in reach.iter_mut().zip(&ball[x]) {
                    *r |= b;
                }
            }
        }
        sets.iter().all(|c| bits_meet(c, &reach))
    })
}
