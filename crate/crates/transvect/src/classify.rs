//! Irreducibility, defining field and family of `<Y>` from cycle invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field, Subfield};
use crate::graph::{build_graph, label, parts, TransvectionGraph, CYCLE_BUDGET};
use crate::oracle;
use crate::trans::{Family, GroupSpec, Transvection};

pub const RANDOM_WALKS: usize = 100_000;

/// Parts span `V` and `V*`, and the graph is strongly connected.
pub fn irreducible(f: &Field, ys: &[Transvection]) -> bool {
    let Some(first) = ys.first() else {
        return false;
    };
    let n = first.n();
    let p = parts(f, ys);
    if p.v_span_dim < n || p.vstar_span_dim < n {
        return false;
    }
    build_graph(f, ys).metrics().strongly_connected
}

/// Field generated by the weights of all cycles. Exhaustive when the cycle
/// enumeration fits the budget, otherwise `L_k` is grown until it stabilizes
/// with `k >= 5`.
pub fn defining_field(f: &Field, ys: &[Transvection]) -> Subfield {
    let g = build_graph(f, ys);
    defining_field_of_graph(&g)
}

pub fn defining_field_of_graph(g: &TransvectionGraph) -> Subfield {
    if let Ok(s) = g.l_k_budget(g.len().max(2), CYCLE_BUDGET) {
        return s;
    }
    let mut prev = g.l_k_budget(2, CYCLE_BUDGET).unwrap_or(g.field.prime_subfield());
    let mut k = 3;
    loop {
        let cur = match g.l_k_budget(k, CYCLE_BUDGET) {
            Ok(s) => s,
            Err(_) => return prev,
        };
        if (cur == prev && k > 5) || cur == g.field.full_subfield() {
            return cur;
        }
        prev = cur;
        k += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub irreducible: bool,
    pub defining_subfield: Subfield,
    /// `None` when undetermined.
    pub family: Option<Family>,
    /// A non-symplectic cycle certifying SL.
    pub witness: Option<Vec<Transvection>>,
    /// A non-unitary cycle, when the field order is a square.
    pub witness_unitary: Option<Vec<Transvection>>,
    /// Closure order used to confirm the claim in strict mode.
    pub confirmed_order: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub walks: usize,
    pub budget: u64,
    /// Closure cap for oracle confirmation; `None` disables strict mode.
    pub strict_cap: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { seed: 0, walks: RANDOM_WALKS, budget: CYCLE_BUDGET, strict_cap: None }
    }
}

struct Scan {
    all_symplectic: bool,
    all_unitary: bool,
    non_symplectic: Option<Vec<usize>>,
    non_unitary: Option<Vec<usize>>,
}

fn scan_cycles(g: &TransvectionGraph, max_len: usize, opts: &ClassifyOptions) -> Scan {
    let f = &g.field;
    let square = f.is_square();
    let mut scan = Scan { all_symplectic: true, all_unitary: square, non_symplectic: None, non_unitary: None };
    let record = |c: &[usize], scan: &mut Scan| {
        if scan.non_symplectic.is_none() && !g.d_s(c).is_zero() {
            scan.all_symplectic = false;
            scan.non_symplectic = Some(c.to_vec());
        }
        if square && scan.non_unitary.is_none() && !g.d_u(c).unwrap().is_zero() {
            scan.all_unitary = false;
            scan.non_unitary = Some(c.to_vec());
        }
        scan.non_symplectic.is_none() || (square && scan.non_unitary.is_none())
    };
    let _ = g.for_each_cycle(max_len, opts.budget, |c| record(c, &mut scan));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = g.len();
    for _ in 0..opts.walks {
        if !(scan.non_symplectic.is_none() || (square && scan.non_unitary.is_none())) {
            break;
        }
        let len = rng.gen_range(max_len + 1..=2 * max_len + 2);
        let start = rng.gen_range(0..n);
        let mut walk = vec![start];
        let mut ok = true;
        while walk.len() < len {
            let nb = g.out_neighbors(*walk.last().unwrap());
            if nb.is_empty() {
                ok = false;
                break;
            }
            walk.push(nb[rng.gen_range(0..nb.len())]);
        }
        if ok && g.has_edge(*walk.last().unwrap(), start) {
            record(&walk, &mut scan);
        }
    }
    scan
}

/// Family of `<Z>` from cycle invariants; requires `n >= 3`, irreducibility
/// and weights generating the whole field.
pub fn classify_from_cycles(f: &Field, zs: &[Transvection], opts: &ClassifyOptions) -> Result<ClassificationResult> {
    let res = classify(f, zs, opts);
    let n = zs.first().map_or(0, |t| t.n());
    if n < 3 {
        return Err(Error::HypothesisUnmet("dimension below 3".into()));
    }
    if !res.irreducible {
        return Err(Error::HypothesisUnmet("not irreducible".into()));
    }
    if res.defining_subfield != f.full_subfield() {
        return Err(Error::HypothesisUnmet("cycle weights generate a proper subfield".into()));
    }
    Ok(res)
}

/// Like [`classify_from_cycles`] but reports an undetermined family instead of failing.
pub fn classify(f: &Field, zs: &[Transvection], opts: &ClassifyOptions) -> ClassificationResult {
    let irreducible = irreducible(f, zs);
    let g = build_graph(f, zs);
    let defining_subfield = defining_field_of_graph(&g);
    let n = zs.first().map_or(0, |t| t.n());
    let mut res = ClassificationResult {
        irreducible,
        defining_subfield,
        family: None,
        witness: None,
        witness_unitary: None,
        confirmed_order: None,
    };
    if n < 3 || !irreducible || defining_subfield != f.full_subfield() {
        return res;
    }
    let scan = scan_cycles(&g, 5.max(n + 1), opts);
    let to_t = |c: Vec<usize>| c.into_iter().map(|i| g.verts[i].clone()).collect::<Vec<_>>();
    res.witness = scan.non_symplectic.map(to_t);
    res.witness_unitary = scan.non_unitary.map(to_t);
    let family = if scan.all_symplectic && n % 2 == 0 {
        Some(Family::Sp)
    } else if scan.all_unitary {
        Some(Family::SU)
    } else if !scan.all_symplectic {
        Some(Family::SL)
    } else {
        None
    };
    res.family = family;
    if let (Some(cap), Some(fam)) = (opts.strict_cap, family) {
        res.family = confirm(f, zs, fam, n, cap).map(|o| {
            res.confirmed_order = Some(o);
            fam
        });
    }
    res
}

/// Closure order of `<zs>` if it equals the order of the claimed group.
fn confirm(f: &Field, zs: &[Transvection], fam: Family, n: usize, cap: usize) -> Option<u64> {
    let field = f.with_role(fam == Family::SU).ok()?;
    let spec = match fam {
        Family::SL => GroupSpec::new(fam, &field, crate::geom::Form::none(n)).ok()?,
        Family::Sp => GroupSpec::new(fam, &field, crate::geom::Form::symplectic_default(&field, n).ok()?).ok()?,
        Family::SU => GroupSpec::new(fam, &field, crate::geom::Form::hermitian_default(&field, n).ok()?).ok()?,
    };
    let want = oracle::group_order(&spec)?;
    if want > cap as u128 {
        return None;
    }
    let got = oracle::closure_order(f, &oracle::transvection_mats(f, zs), cap).ok()?;
    (got as u128 == want).then_some(got)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub field: Subfield,
    pub exceptional: bool,
    /// `|SL(2,M)|`, withheld in the exceptional case.
    pub predicted_order: Option<u64>,
}

/// Descriptor of `<s^K, t^Lambda>` for a two-way edge `(s,t)`.
pub fn dickson_pair(f: &Field, s: &Transvection, k: Subfield, t: &Transvection, lambdas: &[Fe]) -> Result<GroupDescriptor> {
    let a = label(f, s, t);
    let b = label(f, t, s);
    if a.is_zero() || b.is_zero() {
        return Err(Error::NotTwoWayEdge);
    }
    let delta = f.mul(a, b);
    let mut elems = lambdas.to_vec();
    elems.push(delta);
    let m = f.join(k, f.subfield_generated(&elems));
    let r = m.order(f.p());
    let exceptional = r == 9;
    let predicted_order = (!exceptional).then(|| r * (r * r - 1));
    Ok(GroupDescriptor { field: m, exceptional, predicted_order })
}

/// The pair `E_12(1)`, `E_21(delta)` in dimension `n`.
pub fn elementary_pair(f: &Field, n: usize, delta: Fe) -> (Transvection, Transvection) {
    let e = |i: usize| crate::geom::unit_vec(n, i);
    let s = Transvection::canonical(f, &e(0), &e(1));
    let t = Transvection::canonical(f, &e(1), &crate::geom::vscale(f, delta, &e(0)));
    (s, t)
}
