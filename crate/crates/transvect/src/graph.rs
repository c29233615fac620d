//! Labelled transvection graphs and their cycle invariants.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom::{pair, rank, Covector, Vector};
use crate::gf::{Fe, Field, Subfield};
use crate::trans::Transvection;

pub const CYCLE_BUDGET: u64 = 10_000_000;

/// `l(s,t) = phi_t(u_s)`.
pub fn label(f: &Field, s: &Transvection, t: &Transvection) -> Fe {
    pair(f, &t.phi, &s.u)
}

/// Label product around a tuple of transvections.
pub fn weight_of(f: &Field, ts: &[&Transvection]) -> Fe {
    let k = ts.len();
    let mut acc = Fe::ONE;
    for i in 0..k {
        let l = label(f, ts[i], ts[(i + 1) % k]);
        if l.is_zero() {
            return Fe::ZERO;
        }
        acc = f.mul(acc, l);
    }
    acc
}

fn reversed<'a>(ts: &[&'a Transvection]) -> Vec<&'a Transvection> {
    ts.iter().rev().copied().collect()
}

fn sign_term(f: &Field, k: usize, x: Fe) -> Fe {
    // (-1)^{k+1} x
    if k % 2 == 1 {
        x
    } else {
        f.neg(x)
    }
}

pub fn d_s_of(f: &Field, ts: &[&Transvection]) -> Fe {
    let w = weight_of(f, ts);
    let r = weight_of(f, &reversed(ts));
    f.add(w, sign_term(f, ts.len(), r))
}

pub fn d_u_of(f: &Field, ts: &[&Transvection]) -> Result<Fe> {
    let w = weight_of(f, ts);
    let r = weight_of(f, &reversed(ts));
    let rs = f.sqrt_frob(r).ok_or(Error::QNotSquare)?;
    Ok(f.add(w, sign_term(f, ts.len(), rs)))
}

pub fn p_u_of(f: &Field, ts: &[&Transvection]) -> Result<Fe> {
    if !f.is_square() {
        return Err(Error::QNotSquare);
    }
    let w = weight_of(f, ts);
    let r = weight_of(f, &reversed(ts));
    if w.is_zero() || r.is_zero() {
        return Err(Error::NotTwoWayCycle);
    }
    let rs = f.sqrt_frob(r).unwrap();
    Ok(f.div(w, rs).unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleInvariants {
    pub w: Fe,
    pub d_s: Fe,
    pub d_u: Option<Fe>,
    pub p_u: Option<Fe>,
}

/// Coefficients of `w(s1,s2,s3^{s4^l}) = A + lB + l^2C` and `d_u(...) = D + lE + l^2F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadCoeffs {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Option<Fe>,
    pub e: Option<Fe>,
    pub f: Option<Fe>,
}

impl QuadCoeffs {
    pub fn eval_w(&self, f: &Field, l: Fe) -> Fe {
        f.add(self.a, f.mul(l, f.add(self.b, f.mul(l, self.c))))
    }

    pub fn eval_du(&self, f: &Field, l: Fe) -> Option<Fe> {
        Some(f.add(self.d?, f.mul(l, f.add(self.e?, f.mul(l, self.f?)))))
    }
}

pub fn af_coeffs_of(f: &Field, s1: &Transvection, s2: &Transvection, s3: &Transvection, s4: &Transvection) -> QuadCoeffs {
    let w = |ts: &[&Transvection]| weight_of(f, ts);
    let a = w(&[s1, s2, s3]);
    let b = f.sub(w(&[s1, s2, s4, s3]), w(&[s1, s2, s3, s4]));
    let w34 = w(&[s3, s4]);
    let c = f.neg(f.mul(w34, w(&[s1, s2, s4])));
    let (d, e, ff) = if f.is_square() {
        let sq = |x: Fe| f.sqrt_frob(x).unwrap();
        let d = d_u_of(f, &[s1, s2, s3]).unwrap();
        let e = f.add(b, f.sub(sq(w(&[s2, s1, s4, s3])), sq(w(&[s2, s1, s3, s4]))));
        // -w34 d_u(s1,s2,s4) when w34 lies in the fixed field
        let ff = f.neg(f.add(f.mul(w34, w(&[s1, s2, s4])), sq(f.mul(w34, w(&[s2, s1, s4])))));
        (Some(d), Some(e), Some(ff))
    } else {
        (None, None, None)
    };
    QuadCoeffs { a, b, c, d, e, f: ff }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMetrics {
    pub strongly_connected: bool,
    pub twoway_connected: bool,
    /// `None` when not strongly connected.
    pub diameter: Option<usize>,
    /// `None` when the two-way subgraph is disconnected.
    pub twoway_diameter: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct TransvectionGraph {
    pub field: Field,
    pub verts: Vec<Transvection>,
    labels: Vec<Fe>,
    out: Vec<Vec<usize>>,
    twoway: Vec<Vec<usize>>,
}

pub fn build_graph(f: &Field, ys: &[Transvection]) -> TransvectionGraph {
    let mut seen = HashSet::new();
    let verts: Vec<Transvection> = ys.iter().filter(|t| seen.insert((*t).clone())).cloned().collect();
    let n = verts.len();
    let mut labels = vec![Fe::ZERO; n * n];
    let mut out = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let l = label(f, &verts[i], &verts[j]);
                labels[i * n + j] = l;
                if !l.is_zero() {
                    out[i].push(j);
                }
            }
        }
    }
    let twoway = (0..n).map(|i| out[i].iter().copied().filter(|&j| !labels[j * n + i].is_zero()).collect()).collect();
    TransvectionGraph { field: f.clone(), verts, labels, out, twoway }
}

impl TransvectionGraph {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    #[inline]
    pub fn label(&self, s: usize, t: usize) -> Fe {
        self.labels[s * self.len() + t]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        !self.label(s, t).is_zero()
    }

    pub fn is_twoway(&self, s: usize, t: usize) -> bool {
        self.has_edge(s, t) && self.has_edge(t, s)
    }

    pub fn out_neighbors(&self, s: usize) -> &[usize] {
        &self.out[s]
    }

    pub fn twoway_neighbors(&self, s: usize) -> &[usize] {
        &self.twoway[s]
    }

    pub fn index_of(&self, t: &Transvection) -> Option<usize> {
        self.verts.iter().position(|v| v == t)
    }

    fn refs(&self, tuple: &[usize]) -> Vec<&Transvection> {
        tuple.iter().map(|&i| &self.verts[i]).collect()
    }

    pub fn weight(&self, tuple: &[usize]) -> Fe {
        let f = &self.field;
        let k = tuple.len();
        let mut acc = Fe::ONE;
        for i in 0..k {
            let l = self.label(tuple[i], tuple[(i + 1) % k]);
            if l.is_zero() {
                return Fe::ZERO;
            }
            acc = f.mul(acc, l);
        }
        acc
    }

    pub fn d_s(&self, tuple: &[usize]) -> Fe {
        d_s_of(&self.field, &self.refs(tuple))
    }

    pub fn d_u(&self, tuple: &[usize]) -> Result<Fe> {
        d_u_of(&self.field, &self.refs(tuple))
    }

    pub fn p_u(&self, tuple: &[usize]) -> Result<Fe> {
        p_u_of(&self.field, &self.refs(tuple))
    }

    pub fn invariants(&self, tuple: &[usize]) -> CycleInvariants {
        CycleInvariants {
            w: self.weight(tuple),
            d_s: self.d_s(tuple),
            d_u: self.d_u(tuple).ok(),
            p_u: self.p_u(tuple).ok(),
        }
    }

    pub fn af_coeffs(&self, s1: usize, s2: usize, s3: usize, s4: usize) -> QuadCoeffs {
        let v = &self.verts;
        af_coeffs_of(&self.field, &v[s1], &v[s2], &v[s3], &v[s4])
    }

    /// BFS distances from `s`; `twoway` restricts to two-way edges.
    pub fn distances(&self, s: usize, twoway: bool) -> Vec<Option<usize>> {
        let adj = if twoway { &self.twoway } else { &self.out };
        let mut dist = vec![None; self.len()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &y in &adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Shortest path from `a` to `b`, preferring smaller vertex indices.
    pub fn shortest_path(&self, a: usize, b: usize, twoway: bool) -> Option<Vec<usize>> {
        let adj = if twoway { &self.twoway } else { &self.out };
        let mut parent = vec![usize::MAX; self.len()];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[b] == usize::MAX {
            return None;
        }
        let mut path = vec![b];
        let mut x = b;
        while x != a {
            x = parent[x];
            path.push(x);
        }
        path.reverse();
        Some(path)
    }

    pub fn metrics(&self) -> GraphMetrics {
        let ecc = |twoway: bool| -> Option<usize> {
            let mut worst = 0;
            for s in 0..self.len() {
                for d in self.distances(s, twoway) {
                    worst = worst.max(d?);
                }
            }
            Some(worst)
        };
        let diameter = ecc(false);
        let twoway_diameter = ecc(true);
        GraphMetrics {
            strongly_connected: diameter.is_some(),
            twoway_connected: twoway_diameter.is_some(),
            diameter,
            twoway_diameter,
        }
    }

    /// Calls `visit` on every simple directed cycle of length `2..=max_len`,
    /// once per rotation class (the smallest index comes first). Stops early
    /// when `visit` returns `false`.
    pub fn for_each_cycle<F: FnMut(&[usize]) -> bool>(&self, max_len: usize, budget: u64, mut visit: F) -> Result<()> {
        let mut count = 0u64;
        let mut path = Vec::with_capacity(max_len);
        let mut on_path = vec![false; self.len()];
        for start in 0..self.len() {
            path.clear();
            path.push(start);
            on_path[start] = true;
            let cont = self.cycle_dfs(start, max_len, budget, &mut count, &mut path, &mut on_path, &mut visit)?;
            on_path[start] = false;
            if !cont {
                return Ok(());
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_dfs<F: FnMut(&[usize]) -> bool>(
        &self,
        start: usize,
        max_len: usize,
        budget: u64,
        count: &mut u64,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        visit: &mut F,
    ) -> Result<bool> {
        let last = *path.last().unwrap();
        for &y in &self.out[last] {
            if y == start && path.len() >= 2 {
                *count += 1;
                if *count > budget {
                    return Err(Error::TooManyVertices(budget));
                }
                if !visit(path) {
                    return Ok(false);
                }
                continue;
            }
            if y <= start || on_path[y] || path.len() == max_len {
                continue;
            }
            *count += 1;
            if *count > budget {
                return Err(Error::TooManyVertices(budget));
            }
            path.push(y);
            on_path[y] = true;
            let cont = self.cycle_dfs(start, max_len, budget, count, path, on_path, visit)?;
            path.pop();
            on_path[y] = false;
            if !cont {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Subfield generated by the weights of cycles of length at most `k`.
    pub fn l_k(&self, k: usize) -> Result<Subfield> {
        self.l_k_budget(k, CYCLE_BUDGET)
    }

    pub fn l_k_budget(&self, k: usize, budget: u64) -> Result<Subfield> {
        let f = &self.field;
        let full = f.full_subfield();
        let mut sub = f.prime_subfield();
        self.for_each_cycle(k.max(2), budget, |c| {
            let w = self.weight(c);
            if !f.in_subfield(w, sub) {
                sub = f.join(sub, f.subfield_generated(&[w]));
            }
            sub != full
        })?;
        Ok(sub)
    }
}

pub fn weight(g: &TransvectionGraph, tuple: &[usize]) -> Fe {
    g.weight(tuple)
}

pub fn graph_metrics(g: &TransvectionGraph) -> GraphMetrics {
    g.metrics()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parts {
    pub v_part: Vec<Vector>,
    pub vstar_part: Vec<Covector>,
    pub v_span_dim: usize,
    pub vstar_span_dim: usize,
}

pub fn parts(f: &Field, ys: &[Transvection]) -> Parts {
    let mut v_part: Vec<Vector> = Vec::new();
    let mut vstar_part: Vec<Covector> = Vec::new();
    for t in ys {
        if !v_part.contains(&t.u) {
            v_part.push(t.u.clone());
        }
        let phi = crate::geom::normalize(f, &t.phi).unwrap().0;
        if !vstar_part.contains(&phi) {
            vstar_part.push(phi);
        }
    }
    let v_span_dim = rank(f, &v_part);
    let vstar_span_dim = rank(f, &vstar_part);
    Parts { v_part, vstar_part, v_span_dim, vstar_span_dim }
}
