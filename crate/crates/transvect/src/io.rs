//! JSON instance files, word records and graph export.
//!
//! A field element is written as its coefficient list `[c0, ..., c_{k-1}]`
//! over the modulus basis, low to high. Input also accepts the packed integer
//! `sum c_i p^i`. Matrices are lists of rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Form, FormKind, Mat, Vector};
use crate::gf::{Fe, Field};
use crate::graph::TransvectionGraph;
use crate::pipeline::GenSet;
use crate::trans::{tv_make, Family, GroupSpec, Transvection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRepr {
    Packed(u32),
    Coeffs(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub p: u32,
    pub k: u32,
    /// Low-to-high coefficients of the monic modulus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHeader {
    pub family: String,
    pub n: usize,
    pub field: FieldHeader,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<ElemRepr>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorRecord {
    Transvection { u: Vec<ElemRepr>, phi: Vec<ElemRepr> },
    Matrix { matrix: Vec<Vec<ElemRepr>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Options {
    pub seed: u64,
    pub budget: usize,
    pub cap: usize,
    pub strict: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, budget: crate::pipeline::BLOCK_BUDGET, cap: crate::pipeline::DEFAULT_CAP, strict: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub group: GroupHeader,
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Transvection(Transvection),
    Matrix(Mat),
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: GroupSpec,
    pub generators: Vec<Generator>,
    pub options: Options,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.spec.family == other.spec.family
            && self.spec.field == other.spec.field
            && self.spec.form == other.spec.form
            && self.generators == other.generators
            && self.options == other.options
    }
}

fn elem(f: &Field, x: &ElemRepr) -> Result<Fe> {
    match x {
        ElemRepr::Packed(x) if *x >= f.q() => Err(Error::Parse(format!("element {x} out of range for q = {}", f.q()))),
        ElemRepr::Packed(x) => Ok(Fe(*x)),
        ElemRepr::Coeffs(c) => f.from_coeffs(c),
    }
}

pub fn elem_repr(f: &Field, x: Fe) -> ElemRepr {
    ElemRepr::Coeffs(f.coeffs(x))
}

fn vector(f: &Field, n: usize, xs: &[ElemRepr]) -> Result<Vector> {
    if xs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xs.len() });
    }
    xs.iter().map(|x| elem(f, x)).collect()
}

fn matrix(f: &Field, n: usize, rows: &[Vec<ElemRepr>]) -> Result<Mat> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len() });
    }
    let rows: Vec<Vector> = rows.iter().map(|r| vector(f, n, r)).collect::<Result<_>>()?;
    Mat::from_rows(&rows)
}

fn raw(f: &Field, v: &[Fe]) -> Vec<ElemRepr> {
    v.iter().map(|&x| elem_repr(f, x)).collect()
}

fn raw_mat(f: &Field, m: &Mat) -> Vec<Vec<ElemRepr>> {
    m.to_rows().iter().map(|r| raw(f, r)).collect()
}

impl Instance {
    pub fn new(spec: GroupSpec, generators: Vec<Generator>, options: Options) -> Instance {
        Instance { spec, generators, options }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Instance> {
        let g = &file.group;
        let family = Family::parse(&g.family)?;
        let fh = &g.field;
        let base = match &fh.modulus {
            Some(m) => {
                if m.len() != fh.k as usize + 1 {
                    return Err(Error::Parse("modulus degree differs from k".into()));
                }
                Field::with_modulus(fh.p, m.clone(), (fh.p as u64).pow(fh.k) as u32)?
            }
            None => Field::new(fh.p, fh.k)?,
        };
        let field = base.with_role(family == Family::SU)?;
        if let Some(q0) = fh.q0 {
            if q0 != field.q0() {
                return Err(Error::Parse(format!("q0 = {q0} does not match the {} role", family.name())));
            }
        }
        let n = g.n;
        let form = match (family, &g.gram) {
            (Family::SL, None) => Form::none(n),
            (Family::SL, Some(_)) => return Err(Error::Parse("SL takes no Gram matrix".into())),
            (Family::Sp, None) => Form::symplectic_default(&field, n)?,
            (Family::SU, None) => Form::hermitian_default(&field, n)?,
            (fam, Some(rows)) => {
                let kind = if fam == Family::Sp { FormKind::Symplectic } else { FormKind::Hermitian };
                Form::new(&field, kind, matrix(&field, n, rows)?)?
            }
        };
        let spec = GroupSpec::new(family, &field, form)?;
        let mut generators = Vec::with_capacity(file.generators.len());
        for r in &file.generators {
            generators.push(match r {
                GeneratorRecord::Transvection { u, phi } => {
                    Generator::Transvection(tv_make(&field, &vector(&field, n, u)?, &vector(&field, n, phi)?)?)
                }
                GeneratorRecord::Matrix { matrix: rows } => Generator::Matrix(matrix(&field, n, rows)?),
            });
        }
        Ok(Instance { spec, generators, options: file.options.clone() })
    }

    pub fn to_file(&self) -> InstanceFile {
        let f = &self.spec.field;
        let gram = (self.spec.family != Family::SL).then(|| raw_mat(f, &self.spec.form.gram));
        InstanceFile {
            group: GroupHeader {
                family: self.spec.family.name().to_lowercase(),
                n: self.spec.n,
                field: FieldHeader { p: f.p(), k: f.k(), modulus: Some(f.modulus().to_vec()), q0: Some(f.q0()) },
                gram,
            },
            generators: self
                .generators
                .iter()
                .map(|g| match g {
                    Generator::Transvection(t) => GeneratorRecord::Transvection { u: raw(f, &t.u), phi: raw(f, &t.phi) },
                    Generator::Matrix(m) => GeneratorRecord::Matrix { matrix: raw_mat(f, m) },
                })
                .collect(),
            options: self.options.clone(),
        }
    }

    /// Generators as matrices.
    pub fn matrices(&self) -> Vec<Mat> {
        let f = &self.spec.field;
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Transvection(t) => t.matrix(f),
                Generator::Matrix(m) => m.clone(),
            })
            .collect()
    }

    /// Generators that are transvections, including matrices of that shape.
    pub fn transvections(&self) -> Vec<Transvection> {
        let f = &self.spec.field;
        self.generators
            .iter()
            .filter_map(|g| match g {
                Generator::Transvection(t) => Some(t.clone()),
                Generator::Matrix(m) => Transvection::from_matrix(f, m),
            })
            .collect()
    }
}

pub fn parse_instance(s: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    Instance::from_file(&file)
}

/// Pretty JSON with a trailing newline.
pub fn emit_instance(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&inst.to_file()).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransvectionRecord {
    pub u: Vec<ElemRepr>,
    pub phi: Vec<ElemRepr>,
}

impl TransvectionRecord {
    pub fn of(f: &Field, t: &Transvection) -> Self {
        TransvectionRecord { u: raw(f, &t.u), phi: raw(f, &t.phi) }
    }
}

/// One line of `words.jsonl`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRecord {
    pub target: TransvectionRecord,
    pub word: Vec<(u32, i8)>,
    pub length: usize,
}

pub fn word_records(gs: &GenSet) -> Vec<WordRecord> {
    gs.members
        .iter()
        .map(|m| WordRecord { target: TransvectionRecord::of(gs.field(), &m.t), word: m.word.clone(), length: m.word.len() })
        .collect()
}

pub fn emit_words(gs: &GenSet) -> String {
    let mut out = String::new();
    for r in word_records(gs) {
        out.push_str(&serde_json::to_string(&r).expect("serializable"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeRecord {
    pub from: usize,
    pub to: usize,
    pub label: ElemRepr,
    pub twoway: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphRecord {
    pub vertices: Vec<TransvectionRecord>,
    pub edges: Vec<EdgeRecord>,
}

pub fn graph_record(g: &TransvectionGraph) -> GraphRecord {
    let f = &g.field;
    let mut edges = Vec::new();
    for s in 0..g.len() {
        for &t in g.out_neighbors(s) {
            edges.push(EdgeRecord { from: s, to: t, label: elem_repr(f, g.label(s, t)), twoway: g.is_twoway(s, t) });
        }
    }
    GraphRecord { vertices: g.verts.iter().map(|t| TransvectionRecord::of(f, t)).collect(), edges }
}

pub fn graph_json(g: &TransvectionGraph) -> String {
    serde_json::to_string_pretty(&graph_record(g)).expect("serializable")
}

/// Coefficients separated by spaces.
fn label_text(f: &Field, x: Fe) -> String {
    f.coeffs(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// `from,to,label,twoway` rows with a header.
pub fn graph_csv(g: &TransvectionGraph) -> String {
    let mut out = String::from("from,to,label,twoway\n");
    for s in 0..g.len() {
        for &t in g.out_neighbors(s) {
            out.push_str(&format!("{},{},{},{}\n", s, t, label_text(&g.field, g.label(s, t)), g.is_twoway(s, t)));
        }
    }
    out
}

/// One-way edges as arrows, two-way edges once as undirected lines.
pub fn graph_dot(g: &TransvectionGraph) -> String {
    let mut out = String::from("digraph transvections {\n");
    for i in 0..g.len() {
        out.push_str(&format!("  {i};\n"));
    }
    let lt = |s: usize, t: usize| label_text(&g.field, g.label(s, t));
    for s in 0..g.len() {
        for &t in g.out_neighbors(s) {
            if !g.is_twoway(s, t) {
                out.push_str(&format!("  {s} -> {t} [label=\"{}\"];\n", lt(s, t)));
            } else if s < t {
                out.push_str(&format!("  {s} -> {t} [dir=none, label=\"{}/{}\"];\n", lt(s, t), lt(t, s)));
            }
        }
    }
    out.push_str("}\n");
    out
}
