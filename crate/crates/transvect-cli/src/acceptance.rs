//! The acceptance criteria, one function each.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transvect::classify::{classify, classify_from_cycles, irreducible, ClassifyOptions};
use transvect::geom::{first_nonzero, pair, unit_vec};
use transvect::graph::{af_coeffs_of, build_graph, d_u_of, p_u_of, weight_of};
use transvect::io::{emit_instance, Generator, Instance, Options};
use transvect::oracle::{cayley_diameter, cayley_distance_bidirectional, closure_order, group_order, invariant_subspace_search, transvection_mats};
use transvect::pipeline::{
    audit_diameter2, audit_m_closed, audit_twoway6, boost_l3, close_over_m, closure_field, decompose_element, extend_diameter2, extend_twoway6,
    fix_l2_sympunit, random_generators, seed_conjugate_class, synthesize, Derivation, GenSet, SynthesisOptions,
};
use transvect::trans::{tv_conj_right, tv_conjugate, tv_make};
use transvect::{Family, Fe, Field, GroupSpec, Mat, Transvection};

pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub secs: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {} ({:.1}s): {}", self.id, self.name, self.secs, self.detail)
    }
}

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub const NAMES: [&str; 11] = [
    "dickson table",
    "classification vs oracle",
    "conjugation formula",
    "irreducibility",
    "cycle laws",
    "quadratic identities",
    "P_u gluing",
    "stage audits",
    "symplectic addition constants",
    "end to end",
    "exclusion handling",
];

/// Runs the criteria in `only` (all when empty), reporting each as it finishes.
pub fn run(only: &[usize], exe: Option<&Path>, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let mut out = Vec::new();
    for id in 1..=NAMES.len() {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(|| match id {
            1 => dickson_table(),
            2 => classification(),
            3 => conjugation(),
            4 => irreducibility(),
            5 => cycle_laws(),
            6 => quadratic_identities(),
            7 => gluing(),
            8 => stage_audits(),
            9 => addition_constants(),
            10 => end_to_end(),
            _ => exclusions(exe),
        }));
        let res = res.unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let (pass, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let o = Outcome { id, name: NAMES[id - 1], pass, detail, secs: start.elapsed().as_secs_f64() };
        report(&o);
        out.push(o);
    }
    out
}

/// `SU(3,3)` style name, with `q0` for the unitary family.
fn group_name(spec: &GroupSpec) -> String {
    let q = if spec.family == Family::SU { spec.q0() } else { spec.q() };
    format!("{}({},{q})", spec.family.name(), spec.n)
}

fn field(p: u32, k: u32) -> Field {
    Field::new(p, k).expect("valid field")
}

/// Uniform transvection of `SL(n, f)`.
fn random_tv(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Transvection {
    loop {
        let u: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
        let Some(i) = first_nonzero(&u) else { continue };
        let mut phi: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
        let c = f.div(pair(f, &phi, &u), u[i]).unwrap();
        phi[i] = f.sub(phi[i], c);
        if let Ok(t) = tv_make(f, &u, &phi) {
            return t;
        }
    }
}

fn random_element(spec: &GroupSpec, len: usize, rng: &mut ChaCha8Rng) -> Mat {
    let f = &spec.field;
    (0..len).fold(Mat::identity(spec.n), |acc, _| acc.mul(f, &spec.random_transvection(rng).matrix(f)))
}

/// Coefficients of the class of `x`.
fn unit_coeffs(k: u32) -> Vec<u32> {
    (0..k).map(|i| u32::from(i == 1)).collect()
}

fn dickson_table() -> Check {
    let mut rows = Vec::new();
    for (p, k) in [(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (5, 2), (3, 3), (3, 2)] {
        let f = field(p, k);
        let r = f.q() as u64;
        // a generator of GF(r) over GF(p)
        let delta = if k == 1 { f.primitive_element() } else { f.from_coeffs(&unit_coeffs(k)).unwrap() };
        let e = |i| unit_vec(2, i);
        let gens = [tv_make(&f, &e(0), &e(1)).unwrap(), tv_make(&f, &e(1), &[delta, Fe::ZERO]).unwrap()];
        let got = closure_order(&f, &transvection_mats(&f, &gens), 1_000_000).map_err(|e| e.to_string())?;
        let want = if r == 9 { 120 } else { r * (r * r - 1) };
        ensure!(got == want, "r = {r}: closure order {got}, expected {want}");
        rows.push(format!("{r}:{got}"));
    }
    Ok(rows.join(" "))
}

fn classification() -> Check {
    let cases = [
        (GroupSpec::sp(3, 1, 4).unwrap(), Family::Sp),
        (GroupSpec::su(3, 2, 3).unwrap(), Family::SU),
        (GroupSpec::sl(3, 1, 3).unwrap(), Family::SL),
    ];
    let mut rows = Vec::new();
    for (spec, fam) in cases {
        let x = random_generators(&spec, spec.n, 1, 1_000_000);
        let ys: Vec<Transvection> = x.iter().map(|m| Transvection::from_matrix(&spec.field, m).unwrap()).collect();
        let opts = ClassifyOptions { strict_cap: Some(1_000_000), ..ClassifyOptions::default() };
        let r = classify_from_cycles(&spec.field, &ys, &opts).map_err(|e| e.to_string())?;
        let order = closure_order(&spec.field, &x, 1_000_000).map_err(|e| e.to_string())?;
        let formula = group_order(&spec).unwrap();
        ensure!(r.family == Some(fam), "{}: classified as {:?}", group_name(&spec), r.family);
        ensure!(order as u128 == formula, "{}: closure {order} vs formula {formula}", group_name(&spec));
        ensure!(r.confirmed_order == Some(order), "{}: strict confirmation missing", group_name(&spec));
        rows.push(format!("{}={order}", group_name(&spec)));
    }
    Ok(rows.join(" "))
}

fn conjugation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, k) in [(3, 1), (5, 1), (3, 2), (5, 2)] {
        let f = field(p, k);
        for _ in 0..10_000 {
            let a = random_tv(&f, 3, &mut rng);
            let b = random_tv(&f, 3, &mut rng);
            let (ma, mb) = (a.matrix(&f), b.matrix(&f));
            let want = mb.mul(&f, &ma).mul(&f, &mb.inverse(&f).unwrap());
            ensure!(tv_conjugate(&f, &a, &b).matrix(&f) == want, "mismatch over GF({})", f.q());
        }
    }
    Ok("4 x 10000 pairs".into())
}

fn irreducibility() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut irr = 0;
    for i in 0..500 {
        let f = field([3, 5][i % 2], 1);
        let n = 2 + (i / 2) % 2;
        let k = rng.gen_range(1..=3);
        let ys: Vec<Transvection> = (0..k).map(|_| random_tv(&f, n, &mut rng)).collect();
        let a = irreducible(&f, &ys);
        let b = invariant_subspace_search(&f, &transvection_mats(&f, &ys)).map_err(|e| e.to_string())?;
        ensure!(a == b, "disagreement on {ys:?}");
        irr += usize::from(a);
    }
    Ok(format!("500 sets, {irr} irreducible"))
}

fn cycle_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cycles = [0u64; 2];
    for (slot, spec) in [GroupSpec::sp(3, 1, 4).unwrap(), GroupSpec::su(3, 2, 3).unwrap()].iter().enumerate() {
        let all = spec.all_transvections();
        for _ in 0..200 {
            let ys: Vec<Transvection> = all.choose_multiple(&mut rng, 8).cloned().collect();
            let g = build_graph(&spec.field, &ys);
            let mut bad = false;
            g.for_each_cycle(5, u64::MAX, |c| {
                cycles[slot] += 1;
                bad = if slot == 0 { !g.d_s(c).is_zero() } else { !g.d_u(c).unwrap().is_zero() };
                !bad
            })
            .map_err(|e| e.to_string())?;
            ensure!(!bad, "{}: cycle law violated", group_name(spec));
        }
    }
    let sl = GroupSpec::sl(3, 1, 3).unwrap();
    for seed in 0..20 {
        let ys: Vec<Transvection> =
            random_generators(&sl, 3, seed, 1_000_000).iter().map(|m| Transvection::from_matrix(&sl.field, m).unwrap()).collect();
        let r = classify(&sl.field, &ys, &ClassifyOptions { seed, ..ClassifyOptions::default() });
        ensure!(r.witness.is_some(), "SL(3,3) seed {seed}: no non-symplectic cycle");
    }
    Ok(format!("{} Sp cycles, {} SU cycles, 20 SL witnesses", cycles[0], cycles[1]))
}

fn quadratic_identities() -> Check {
    let f = field(5, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let prime: Vec<Fe> = f.elements().filter(|&x| f.frob_p(x, 1) == x).collect();
    for _ in 0..100 {
        let s: Vec<Transvection> = (0..4).map(|_| random_tv(&f, 3, &mut rng)).collect();
        let c = af_coeffs_of(&f, &s[0], &s[1], &s[2], &s[3]);
        for &lam in &prime {
            let s3 = if lam.is_zero() { s[2].clone() } else { tv_conj_right(&f, &s[2], &s[3].power(&f, lam).unwrap()) };
            let ts = [&s[0], &s[1], &s3];
            ensure!(weight_of(&f, &ts) == c.eval_w(&f, lam), "w identity fails at {lam:?}");
            ensure!(d_u_of(&f, &ts).map_err(|e| e.to_string())? == c.eval_du(&f, lam).unwrap(), "d_u identity fails at {lam:?}");
        }
    }
    Ok("100 tuples x 5 values".into())
}

fn gluing() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for p in [3, 5] {
        let f = field(p, 2);
        let sub = field(p, 1);
        let (mut done, mut nonunitary) = (0, 0);
        while done < 100 {
            // data over the fixed field makes every 2-cycle unitary
            let pool: Vec<Transvection> = (0..10).map(|_| random_tv(&sub, 3, &mut rng)).collect();
            let k = rng.gen_range(3..=5);
            let l = rng.gen_range(1..=2);
            let idx = index::sample(&mut rng, pool.len(), k + l).into_vec();
            let r: Vec<&Transvection> = idx[..k].iter().map(|&i| &pool[i]).collect();
            let q: Vec<&Transvection> = idx[k..].iter().map(|&i| &pool[i]).collect();
            let i = rng.gen_range(0..k - 1);
            let j = rng.gen_range(i + 1..k);
            let mut c1 = r[..=i].to_vec();
            c1.extend(q.iter().copied());
            c1.extend(r[j..].iter().copied());
            let mut c2 = r[i..=j].to_vec();
            c2.extend(q.iter().rev().copied());
            let (Ok(pr), Ok(p1), Ok(p2)) = (p_u_of(&f, &r), p_u_of(&f, &c1), p_u_of(&f, &c2)) else { continue };
            ensure!(pr == f.mul(p1, p2), "gluing fails over GF({})", f.q());
            nonunitary += usize::from(!d_u_of(&f, &r).unwrap().is_zero());
            done += 1;
        }
        ensure!(nonunitary > 0, "no non-unitary instance over GF({})", f.q());
        rows.push(format!("GF({}): 100 ({nonunitary} non-unitary)", f.q()));
    }
    Ok(rows.join(", "))
}

fn audit_run(spec: &GroupSpec, seed: u64) -> std::result::Result<(), String> {
    let e = |e: transvect::Error| format!("seed {seed}: {e}");
    let f = &spec.field;
    let full = f.full_subfield();
    let x = random_generators(spec, spec.n, seed, 1_000_000);
    let mut gs = seed_conjugate_class(spec, &x, 1_000_000, seed).map_err(e)?;
    extend_diameter2(&mut gs).map_err(e)?;
    ensure!(audit_diameter2(&gs), "seed {seed}: diameter audit");
    extend_twoway6(&mut gs).map_err(e)?;
    ensure!(audit_twoway6(&gs), "seed {seed}: two-way diameter audit");
    boost_l3(&mut gs).map_err(e)?;
    let g = gs.graph();
    let (l2, l3) = (g.l_k(2).map_err(e)?, g.l_k(3).map_err(e)?);
    ensure!(l3 == full && full.divisor / l2.divisor <= 2, "seed {seed}: L_3 audit");
    if spec.family != Family::SL {
        fix_l2_sympunit(&mut gs).map_err(e)?;
    }
    close_over_m(&mut gs).map_err(e)?;
    ensure!(audit_m_closed(&gs, closure_field(spec)), "seed {seed}: M-closedness audit");
    ensure!(gs.verify_all(), "seed {seed}: word verification");
    Ok(())
}

fn stage_audits() -> Check {
    let specs = [
        GroupSpec::sp(3, 1, 4).unwrap(),
        GroupSpec::su(3, 2, 3).unwrap(),
        GroupSpec::sl(3, 1, 3).unwrap(),
        GroupSpec::sl(5, 1, 3).unwrap(),
        GroupSpec::sl(5, 2, 3).unwrap(),
    ];
    for spec in &specs {
        for seed in 0..50 {
            audit_run(spec, seed).map_err(|m| format!("{} {m}", group_name(spec)))?;
        }
    }
    Ok("50 seeds each for Sp(4,3), SU(3,3), SL(3,3), SL(3,5), SL(3,25)".into())
}

fn addition_constants() -> Check {
    let mut rows = Vec::new();
    for (spec, pairs) in [(GroupSpec::sp(3, 1, 4).unwrap(), 200), (GroupSpec::sp(5, 1, 4).unwrap(), 100)] {
        let f = &spec.field;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = transvect::geom::projective_points(f, spec.n);
        let basis: Vec<Vec<Fe>> = (0..spec.n).map(|i| unit_vec(spec.n, i)).collect();
        let (mut edge_max, mut all_max, mut done) = (0, 0, 0);
        while done < pairs {
            let a = pts.choose(&mut rng).unwrap().clone();
            let b = transvect::geom::vscale(f, f.random_nonzero(&mut rng), pts.choose(&mut rng).unwrap());
            if transvect::geom::is_zero(&transvect::geom::vadd(f, &a, &b)) {
                continue;
            }
            // base directions: standard basis, random points with a common
            // neighbour of a and b among them, never the direction of a + b
            let sum = transvect::geom::normalize(f, &transvect::geom::vadd(f, &a, &b)).unwrap().0;
            let mut dirs: Vec<Vec<Fe>> = basis.iter().filter(|&v| *v != sum).cloned().collect();
            dirs.extend(pts.iter().filter(|&v| *v != sum).cloned().collect::<Vec<_>>().choose_multiple(&mut rng, spec.n).cloned());
            dirs.push(a.clone());
            dirs.push(b.clone());
            let common = |dirs: &[Vec<Fe>]| dirs.iter().any(|c| !spec.f(c, &a).is_zero() && !spec.f(c, &b).is_zero());
            while !common(&dirs) {
                let c = pts.choose(&mut rng).unwrap();
                if *c != sum {
                    dirs.push(c.clone());
                }
            }
            let mut gs = GenSet::from_families(&spec, &dirs).map_err(|e| e.to_string())?;
            let len = transvect::pipeline::add_two(&mut Derivation::new(&mut gs), &a, &b).map_err(|e| e.to_string())?;
            ensure!(gs.verify_all(), "unverified word");
            if !spec.f(&a, &b).is_zero() {
                edge_max = edge_max.max(len);
            }
            all_max = all_max.max(len);
            done += 1;
        }
        ensure!(edge_max <= 3, "Sp(4,{}): edge length {edge_max}", f.q());
        ensure!(all_max <= 21, "Sp(4,{}): length {all_max}", f.q());
        rows.push(format!("Sp(4,{}): edge <= {edge_max}, all <= {all_max}", f.q()));
    }
    Ok(rows.join(", "))
}

fn end_to_end() -> Check {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for spec in [GroupSpec::sp(3, 1, 4).unwrap(), GroupSpec::su(3, 2, 3).unwrap()] {
        let f = &spec.field;
        let n = spec.n;
        let name = group_name(&spec);
        let x = random_generators(&spec, n, 0, 1_000_000);
        let gs = synthesize(&spec, &x, &SynthesisOptions::default()).map_err(|e| e.to_string())?;
        ensure!(gs.len() as u64 == spec.count_transvections(), "{name}: {} of {} transvections", gs.len(), spec.count_transvections());
        ensure!(gs.verify_all(), "{name}: unverified word");
        let mut max_factors = 0;
        for _ in 0..100 {
            let g = random_element(&spec, 3 * n * n, &mut rng);
            let d = decompose_element(&gs, &g).map_err(|e| e.to_string())?;
            ensure!(gs.eval(&d.word) == g, "{name}: decomposition does not multiply back");
            let prod = d.factors.iter().fold(Mat::identity(n), |acc, t| acc.mul(f, &t.matrix(f)));
            ensure!(prod == g, "{name}: factors do not multiply back");
            max_factors = max_factors.max(d.factors.len());
        }
        ensure!(max_factors <= 4 * n * n, "{name}: {max_factors} factors");
        let diam = cayley_diameter(f, &x, 1_000_000).map_err(|e| e.to_string())?;
        // exact distance of a few transvections bounds their word lengths from below
        for m in gs.members.choose_multiple(&mut rng, 5) {
            let dist = cayley_distance_bidirectional(f, &x, &m.t.matrix(f), 1_000_000).unwrap();
            ensure!(m.word.len() >= dist, "{name}: word shorter than its distance");
        }
        rows.push(format!(
            "{name}: max word {} (relative {}), Cayley diameter {diam}, factors <= {max_factors}",
            gs.max_len(),
            gs.report.relative_max_len.unwrap_or(0)
        ));
    }
    Ok(rows.join("; "))
}

fn exclusions(exe: Option<&Path>) -> Check {
    let exe = exe.ok_or("binary not available")?;
    let dir = std::env::temp_dir().join(format!("transvect-exclusions-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let specs = [
        GroupSpec::sp(3, 2, 4).unwrap(),
        GroupSpec::su(3, 4, 3).unwrap(),
        GroupSpec::sl(3, 2, 3).unwrap(),
        GroupSpec::sl(3, 4, 3).unwrap(),
    ];
    let mut rows = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let gens = (0..3).map(|_| Generator::Transvection(spec.random_transvection(&mut rng))).collect();
        let path = dir.join(format!("inst{i}.json"));
        std::fs::write(&path, emit_instance(&Instance::new(spec.clone(), gens, Options::default()))).map_err(|e| e.to_string())?;
        let code = |args: &[&str]| {
            Command::new(exe).args(args).arg("--input").arg(&path).output().map(|o| o.status.code()).map_err(|e| e.to_string())
        };
        let name = group_name(spec);
        ensure!(code(&["synthesize"])? == Some(5), "{name}: synthesize did not exit with 5");
        for args in [&["classify"][..], &["graph", "--format", "csv"], &["oracle", "order"]] {
            ensure!(code(args)? == Some(0), "{name}: {} failed", args[0]);
        }
        rows.push(name);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("refused {}", rows.join(", ")))
}
