//! Word-tracked generating sets and the synthesis stages that grow them.
//!
//! Every member of a [`GenSet`] carries a [`Word`] over the original
//! generators. Stages compose words from member words, so lengths are always
//! exact letter counts of inlined words.

mod decompose;
mod fields;
mod forms;
mod stages;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use decompose::{adapted_basis, decompose_element, Decomposition};
pub use fields::{
    audit_m_closed, boost_l3, close_over_field, close_over_m, closure_field, find_nonm_2cycle, find_nonunitary_triangle, fix_l2_sympunit,
};
pub use forms::{add_three, add_two, generate_all_transvections, split_singular, Derivation};
pub use stages::{audit_diameter2, audit_twoway6, extend_diameter2, extend_twoway6, seed_conjugate_class, FlagSpace};

use crate::classify;
use crate::error::{Error, Result};
use crate::geom::Mat;
use crate::gf::Field;
use crate::graph::{build_graph, TransvectionGraph};
use crate::oracle;
use crate::trans::{tv_conjugate, Family, GroupSpec, Transvection};

/// Letters `(generator index, +-1)` over the original generators.
pub type Word = Vec<(u32, i8)>;
/// Letters over member indices of a [`GenSet`].
pub type RelWord = Vec<(usize, i8)>;

pub const BLOCK_BUDGET: usize = 1_000_000;
pub const DEFAULT_CAP: usize = 500_000;

/// Free reduction: cancels adjacent `x x^-1` pairs.
pub fn reduce<T: Copy + PartialEq>(w: Vec<(T, i8)>) -> Vec<(T, i8)> {
    let mut out: Vec<(T, i8)> = Vec::with_capacity(w.len());
    for l in w {
        if let Some(&last) = out.last() {
            if last.0 == l.0 && last.1 == -l.1 {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    out
}

pub fn word_inverse<T: Copy>(w: &[(T, i8)]) -> Vec<(T, i8)> {
    w.iter().rev().map(|&(g, s)| (g, -s)).collect()
}

pub fn word_concat<T: Copy + PartialEq>(parts: &[&[(T, i8)]]) -> Vec<(T, i8)> {
    reduce(parts.iter().flat_map(|p| p.iter().copied()).collect())
}

/// `w^e` for `e >= 0`.
pub fn word_pow<T: Copy + PartialEq>(w: &[(T, i8)], e: usize) -> Vec<(T, i8)> {
    let mut out = Vec::with_capacity(w.len() * e);
    for _ in 0..e {
        out.extend_from_slice(w);
    }
    reduce(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub t: Transvection,
    pub word: Word,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub added: usize,
    pub members: usize,
    /// Longest word among members added by the stage.
    pub max_len: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SynthesisReport {
    pub stages: Vec<StageReport>,
    /// Longest word over all members.
    pub max_len: usize,
    pub members: usize,
    pub block_searches: u64,
    pub words_verified: u64,
    /// Longest transvection word relative to the set before the final sweep.
    pub relative_max_len: Option<usize>,
}

/// Transvections with words over the original generators, plus the
/// properties established so far.
#[derive(Clone, Debug)]
pub struct GenSet {
    pub spec: GroupSpec,
    pub originals: Vec<Mat>,
    inverses: Vec<Mat>,
    pub members: Vec<Member>,
    index: HashMap<Transvection, usize>,
    /// `flags[i]` records property `P(i+1)`.
    pub flags: [bool; 8],
    pub budget: usize,
    pub report: SynthesisReport,
    verify_every: u64,
    adds: u64,
}

impl GenSet {
    pub fn new(spec: &GroupSpec, originals: &[Mat]) -> Result<GenSet> {
        let f = &spec.field;
        let mut inverses = Vec::with_capacity(originals.len());
        for g in originals {
            if !spec.contains(g) {
                return Err(Error::NotInGroup);
            }
            inverses.push(g.inverse(f).ok_or(Error::NotInGroup)?);
        }
        Ok(GenSet {
            spec: spec.clone(),
            originals: originals.to_vec(),
            inverses,
            members: Vec::new(),
            index: HashMap::new(),
            flags: [false; 8],
            budget: BLOCK_BUDGET,
            report: SynthesisReport::default(),
            verify_every: if cfg!(debug_assertions) { 1 } else { 8 },
            adds: 0,
        })
    }

    /// A set whose originals are the transvection subgroups `T_v` for the
    /// given singular directions, each member its own one-letter word.
    pub fn from_families(spec: &GroupSpec, dirs: &[crate::geom::Vector]) -> Result<GenSet> {
        let mut ts: Vec<Transvection> = Vec::new();
        for v in dirs {
            if !spec.is_singular(v) {
                return Err(Error::NotSingular);
            }
            for l in spec.scalars() {
                let t = spec.tv_of(v, l);
                if !ts.contains(&t) {
                    ts.push(t);
                }
            }
        }
        let mut gs = GenSet::new(spec, &oracle::transvection_mats(&spec.field, &ts))?;
        for (i, t) in ts.into_iter().enumerate() {
            gs.add(t, vec![(i as u32, 1)]);
        }
        Ok(gs)
    }

    pub fn field(&self) -> &Field {
        &self.spec.field
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn transvections(&self) -> Vec<Transvection> {
        self.members.iter().map(|m| m.t.clone()).collect()
    }

    pub fn index_of(&self, t: &Transvection) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn word_of(&self, t: &Transvection) -> Option<&Word> {
        self.index_of(t).map(|i| &self.members[i].word)
    }

    pub fn max_len(&self) -> usize {
        self.members.iter().map(|m| m.word.len()).max().unwrap_or(0)
    }

    pub fn graph(&self) -> TransvectionGraph {
        build_graph(self.field(), &self.transvections())
    }

    pub fn eval(&self, w: &Word) -> Mat {
        let f = self.field();
        let mut m = Mat::identity(self.spec.n);
        for &(g, s) in w {
            let x = if s > 0 { &self.originals[g as usize] } else { &self.inverses[g as usize] };
            m = m.mul(f, x);
        }
        m
    }

    pub fn verify(&self, t: &Transvection, w: &Word) -> bool {
        self.eval(w) == t.matrix(self.field())
    }

    /// Every member word evaluates to its transvection.
    pub fn verify_all(&self) -> bool {
        self.members.iter().all(|m| self.verify(&m.t, &m.word))
    }

    /// Adds `t` with `word`, keeping the shorter word for known members.
    pub fn add(&mut self, t: Transvection, word: Word) -> usize {
        self.adds += 1;
        if self.adds % self.verify_every == 0 {
            assert!(self.verify(&t, &word), "word does not evaluate to its transvection");
            self.report.words_verified += 1;
        }
        if let Some(&i) = self.index.get(&t) {
            if word.len() < self.members[i].word.len() {
                self.members[i].word = word;
            }
            return i;
        }
        let i = self.members.len();
        self.index.insert(t.clone(), i);
        self.members.push(Member { t, word });
        i
    }

    pub fn inline(&self, rel: &[(usize, i8)]) -> Word {
        let mut out = Vec::new();
        for &(i, s) in rel {
            let w = &self.members[i].word;
            if s > 0 {
                out.extend_from_slice(w);
            } else {
                out.extend(word_inverse(w));
            }
        }
        reduce(out)
    }

    pub fn add_rel(&mut self, t: Transvection, rel: &[(usize, i8)]) -> usize {
        let w = self.inline(rel);
        self.add(t, w)
    }

    /// Adds `m_i m_j m_i^{-1}`.
    pub fn conj(&mut self, i: usize, j: usize) -> usize {
        let t = tv_conjugate(self.field(), &self.members[j].t, &self.members[i].t);
        self.add_rel(t, &[(i, 1), (j, 1), (i, -1)])
    }

    pub fn set_flag(&mut self, p: usize) {
        self.flags[p - 1] = true;
    }

    pub fn has_flag(&self, p: usize) -> bool {
        self.flags[p - 1]
    }

    fn end_stage(&mut self, name: &str, start: usize) {
        let max_len = self.members[start..].iter().map(|m| m.word.len()).max().unwrap_or(0);
        self.report.stages.push(StageReport { stage: name.to_string(), added: self.len() - start, members: self.len(), max_len });
        self.report.max_len = self.max_len();
        self.report.members = self.len();
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    pub seed: u64,
    pub budget: usize,
    /// Closure cap for generation checks in the seeding stage.
    pub cap: usize,
    /// Run the final sweep producing every transvection.
    pub generate_all: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { seed: 0, budget: BLOCK_BUDGET, cap: DEFAULT_CAP, generate_all: true }
    }
}

/// Runs every stage in order on the generators `x`.
pub fn synthesize(spec: &GroupSpec, x: &[Mat], opts: &SynthesisOptions) -> Result<GenSet> {
    spec.pipeline_supported()?;
    let entries: Vec<_> = x.iter().flat_map(|m| m.to_rows().concat()).collect();
    if !x.is_empty() && spec.field.subfield_generated(&entries) != spec.field.full_subfield() {
        return Err(Error::HypothesisUnmet("generators are defined over a proper subfield".into()));
    }
    let mut gs = seed_conjugate_class(spec, x, opts.cap, opts.seed)?;
    gs.budget = opts.budget;
    extend_diameter2(&mut gs)?;
    let full = spec.field.full_subfield();
    if classify::defining_field_of_graph(&gs.graph()) != full {
        return Err(Error::HypothesisUnmet("cycle weights generate a proper subfield".into()));
    }
    gs.set_flag(3);
    extend_twoway6(&mut gs)?;
    boost_l3(&mut gs)?;
    if spec.family != Family::SL {
        fix_l2_sympunit(&mut gs)?;
    }
    close_over_m(&mut gs)?;
    if spec.family == Family::SL && closure_field(spec) != full {
        find_nonunitary_triangle(&mut gs)?;
        find_nonm_2cycle(&mut gs)?;
        let start = gs.len();
        close_over_field(&mut gs, full)?;
        gs.end_stage("close_over_field", start);
    }
    if opts.generate_all {
        generate_all_transvections(&mut gs)?;
    }
    Ok(gs)
}

/// At least `max(count, n)` random transvections that generate the group, as
/// matrices; fewer than `n` fix a common vector.
pub fn random_generators(spec: &GroupSpec, count: usize, seed: u64, cap: usize) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let ts: Vec<Transvection> = (0..count.max(spec.n)).map(|_| spec.random_transvection(&mut rng)).collect();
        if generates_group(spec, &ts, cap, seed) {
            return oracle::transvection_mats(&spec.field, &ts);
        }
    }
}

/// True when `<ts>` is the whole group: by closure when `|G| <= cap`,
/// otherwise by the cycle classification.
pub(crate) fn generates_group(spec: &GroupSpec, ts: &[Transvection], cap: usize, seed: u64) -> bool {
    let f = &spec.field;
    if let Some(order) = oracle::group_order(spec) {
        if order <= cap as u128 {
            let mut chosen: Vec<Mat> = Vec::new();
            let mut elems = std::collections::HashSet::from([Mat::identity(spec.n)]);
            for m in oracle::transvection_mats(f, ts) {
                if elems.contains(&m) {
                    continue;
                }
                chosen.push(m);
                match oracle::closure_enumerate(f, &chosen, cap, false) {
                    Ok(r) => elems = r.elements,
                    Err(_) => return false,
                }
                if elems.len() as u128 == order {
                    return true;
                }
            }
            return false;
        }
    }
    // entries in a proper subfield: quick negative
    let entries: Vec<_> = ts.iter().flat_map(|t| t.u.iter().chain(&t.phi).copied()).collect();
    if f.subfield_generated(&entries) != f.full_subfield() {
        return false;
    }
    let opts = classify::ClassifyOptions { seed, walks: 2_000, ..Default::default() };
    let res = classify::classify(f, ts, &opts);
    res.irreducible && res.defining_subfield == f.full_subfield() && res.family == Some(spec.family)
}
