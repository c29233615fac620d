//! Transvections `1 + u (x) phi`, group specs and transvection subgroups.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geom::{self, first_nonzero, is_zero, pair, vaxpy, vscale, Covector, Form, FormKind, Mat, Vector};
use crate::gf::{Fe, Field, Subfield};

/// `x -> x + phi(x) u`, stored with the first nonzero coordinate of `u` equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transvection {
    pub u: Vector,
    pub phi: Covector,
}

pub fn tv_make(f: &Field, u: &[Fe], phi: &[Fe]) -> Result<Transvection> {
    if u.len() != phi.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: phi.len() });
    }
    if is_zero(u) || is_zero(phi) {
        return Err(Error::ZeroData);
    }
    if !pair(f, phi, u).is_zero() {
        return Err(Error::NotNilpotent);
    }
    Ok(Transvection::canonical(f, u, phi))
}

impl Transvection {
    /// Canonical form of a valid pair; the caller guarantees `phi(u) = 0` and both nonzero.
    pub fn canonical(f: &Field, u: &[Fe], phi: &[Fe]) -> Transvection {
        let i = first_nonzero(u).expect("nonzero u");
        let c = u[i];
        if c == Fe::ONE {
            return Transvection { u: u.to_vec(), phi: phi.to_vec() };
        }
        let ci = f.inv(c).unwrap();
        Transvection { u: vscale(f, ci, u), phi: vscale(f, c, phi) }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn matrix(&self, f: &Field) -> Mat {
        let n = self.n();
        let mut m = Mat::identity(n);
        for i in 0..n {
            if self.u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let v = f.add(m.get(i, j), f.mul(self.u[i], self.phi[j]));
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn apply(&self, f: &Field, x: &[Fe]) -> Result<Vector> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(vaxpy(f, x, pair(f, &self.phi, x), &self.u))
    }

    /// `t^lambda = 1 + lambda u (x) phi`; `None` for `lambda = 0`.
    pub fn power(&self, f: &Field, lambda: Fe) -> Option<Transvection> {
        if lambda.is_zero() {
            return None;
        }
        Some(Transvection { u: self.u.clone(), phi: vscale(f, lambda, &self.phi) })
    }

    pub fn inverse(&self, f: &Field) -> Transvection {
        self.power(f, f.neg(Fe::ONE)).unwrap()
    }

    /// Same direction and hyperplane.
    pub fn same_root(&self, f: &Field, other: &Transvection) -> bool {
        self.u == other.u && self.scalar_to(f, other).is_some()
    }

    /// `lambda` with `other = self^lambda`, if any.
    pub fn scalar_to(&self, f: &Field, other: &Transvection) -> Option<Fe> {
        if self.u != other.u {
            return None;
        }
        let j = first_nonzero(&self.phi)?;
        let lam = f.div(other.phi[j], self.phi[j])?;
        (vscale(f, lam, &self.phi) == other.phi).then_some(lam)
    }

    /// `g t g^{-1}` for an invertible matrix `g`.
    pub fn conj_by(&self, f: &Field, g: &Mat, ginv: &Mat) -> Transvection {
        let u = g.apply(f, &self.u);
        let phi = ginv.pullback(f, &self.phi);
        Transvection::canonical(f, &u, &phi)
    }

    /// Recover `(u, phi)` from a matrix equal to `1 + u (x) phi`.
    pub fn from_matrix(f: &Field, m: &Mat) -> Option<Transvection> {
        if !m.is_square() {
            return None;
        }
        let n = m.rows;
        let d = m.sub(f, &Mat::identity(n));
        let r = (0..n).find(|&i| !is_zero(d.row(i)))?;
        let phi = d.row(r).to_vec();
        let c = first_nonzero(&phi).unwrap();
        let col = d.col(c);
        let scale = f.inv(phi[c]).unwrap();
        let u = vscale(f, scale, &col);
        for i in 0..n {
            for j in 0..n {
                if d.get(i, j) != f.mul(u[i], phi[j]) {
                    return None;
                }
            }
        }
        if !pair(f, &phi, &u).is_zero() {
            return None;
        }
        Some(Transvection::canonical(f, &u, &phi))
    }
}

/// `t2 t1 t2^{-1} = 1 + (a1 + phi2(a1) a2) (x) (phi1 - phi1(a2) phi2)`.
pub fn tv_conjugate(f: &Field, t1: &Transvection, t2: &Transvection) -> Transvection {
    let c = pair(f, &t2.phi, &t1.u);
    let d = pair(f, &t1.phi, &t2.u);
    if c.is_zero() && d.is_zero() {
        return t1.clone();
    }
    let u = vaxpy(f, &t1.u, c, &t2.u);
    let phi = vaxpy(f, &t1.phi, f.neg(d), &t2.phi);
    Transvection::canonical(f, &u, &phi)
}

/// `s^g = g^{-1} s g` for a transvection `g`.
pub fn tv_conj_right(f: &Field, s: &Transvection, g: &Transvection) -> Transvection {
    tv_conjugate(f, s, &g.inverse(f))
}

pub fn tv_power(f: &Field, t: &Transvection, lambda: Fe) -> Result<Transvection> {
    t.power(f, lambda).ok_or(Error::DivisionByZero)
}

pub fn tv_apply(f: &Field, t: &Transvection, x: &[Fe]) -> Result<Vector> {
    t.apply(f, x)
}

pub fn tv_matrix(f: &Field, t: &Transvection) -> Mat {
    t.matrix(f)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SL,
    Sp,
    SU,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SL => "SL",
            Family::Sp => "Sp",
            Family::SU => "SU",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "sl" => Ok(Family::SL),
            "sp" => Ok(Family::Sp),
            "su" => Ok(Family::SU),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// One of SL(V), Sp(V), SU(V).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: Family,
    pub field: Field,
    pub n: usize,
    pub form: Form,
}

impl GroupSpec {
    /// Validates the form against the family and sets the field role.
    pub fn new(family: Family, field: &Field, form: Form) -> Result<GroupSpec> {
        let n = form.n();
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        let field = field.with_role(family == Family::SU)?;
        let expected = match family {
            Family::SL => FormKind::None,
            Family::Sp => FormKind::Symplectic,
            Family::SU => FormKind::Hermitian,
        };
        if form.kind != expected {
            return Err(Error::InvalidForm(format!("{} needs a {:?} form", family.name(), expected)));
        }
        let form = Form::new(&field, form.kind, form.gram)?;
        Ok(GroupSpec { family, field, n, form })
    }

    pub fn sl(p: u32, k: u32, n: usize) -> Result<GroupSpec> {
        let f = Field::new(p, k)?;
        GroupSpec::new(Family::SL, &f, Form::none(n))
    }

    pub fn sp(p: u32, k: u32, n: usize) -> Result<GroupSpec> {
        let f = Field::new(p, k)?;
        GroupSpec::new(Family::Sp, &f, Form::symplectic_default(&f, n)?)
    }

    /// SU over GF(p^k) with the identity Gram matrix; `q0 = p^{k/2}`.
    pub fn su(p: u32, k: u32, n: usize) -> Result<GroupSpec> {
        let f = Field::new_unitary(p, k)?;
        GroupSpec::new(Family::SU, &f, Form::hermitian_default(&f, n)?)
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn q0(&self) -> u32 {
        self.field.q0()
    }

    /// Rejects the field orders the synthesis pipeline does not cover.
    pub fn pipeline_supported(&self) -> Result<()> {
        let q = self.q();
        let bad = match self.family {
            Family::Sp => q == 9,
            Family::SU => q == 81,
            Family::SL => q == 9 || q == 81,
        };
        if bad {
            Err(Error::UnsupportedQ(q))
        } else {
            Ok(())
        }
    }

    pub fn phi_of(&self, v: &[Fe]) -> Covector {
        self.form.phi(&self.field, v)
    }

    pub fn f(&self, u: &[Fe], v: &[Fe]) -> Fe {
        self.form.ev(&self.field, u, v)
    }

    pub fn is_singular(&self, v: &[Fe]) -> bool {
        match self.family {
            Family::SL => true,
            _ => self.form.is_singular(&self.field, v),
        }
    }

    /// `lambda` with `t = 1 + lambda u (x) phi_u`, for form families.
    pub fn lambda_of(&self, t: &Transvection) -> Option<Fe> {
        if self.family == Family::SL {
            return None;
        }
        let pu = self.phi_of(&t.u);
        let j = first_nonzero(&pu)?;
        let lam = self.field.div(t.phi[j], pu[j])?;
        (vscale(&self.field, lam, &pu) == t.phi).then_some(lam)
    }

    /// Admissible scalars `lambda` for `1 + lambda v (x) phi_v`.
    pub fn scalars(&self) -> Vec<Fe> {
        let f = &self.field;
        match self.family {
            Family::SU => f.nonzero().filter(|&a| f.trace(a).is_zero()).collect(),
            _ => f.nonzero().collect(),
        }
    }

    /// `1 + lambda v (x) phi_v`.
    pub fn tv_of(&self, v: &[Fe], lambda: Fe) -> Transvection {
        Transvection::canonical(&self.field, v, &vscale(&self.field, lambda, &self.phi_of(v)))
    }

    pub fn contains(&self, g: &Mat) -> bool {
        g.rows == self.n && g.is_square() && g.det(&self.field) == Fe::ONE && self.form.preserved_by(&self.field, g)
    }

    /// Every transvection of the group, in a fixed order.
    pub fn all_transvections(&self) -> Vec<Transvection> {
        let f = &self.field;
        let pts = geom::projective_points(f, self.n);
        let mut out = Vec::new();
        match self.family {
            Family::SL => {
                for u in &pts {
                    for phi in geom::all_vectors(f, self.n) {
                        if !is_zero(&phi) && pair(f, &phi, u).is_zero() {
                            out.push(Transvection { u: u.clone(), phi });
                        }
                    }
                }
            }
            _ => {
                let sc = self.scalars();
                for u in pts.iter().filter(|u| self.is_singular(u)) {
                    let pu = self.phi_of(u);
                    for &l in &sc {
                        out.push(Transvection { u: u.clone(), phi: vscale(f, l, &pu) });
                    }
                }
            }
        }
        out
    }

    /// A uniformly random transvection of the group.
    pub fn random_transvection<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Transvection {
        let f = &self.field;
        let rand_vec = |rng: &mut R| -> Vector { (0..self.n).map(|_| f.random(rng)).collect() };
        loop {
            let u = rand_vec(rng);
            if is_zero(&u) || !self.is_singular(&u) {
                continue;
            }
            if self.family == Family::SL {
                let phi = rand_vec(rng);
                if !is_zero(&phi) && pair(f, &phi, &u).is_zero() {
                    return Transvection::canonical(f, &u, &phi);
                }
                continue;
            }
            let sc = self.scalars();
            return self.tv_of(&u, sc[rng.gen_range(0..sc.len())]);
        }
    }

    /// Number of transvections without enumerating them.
    pub fn count_transvections(&self) -> u64 {
        let q = self.q() as u64;
        let n = self.n as u32;
        match self.family {
            Family::SL => (q.pow(n) - 1) / (q - 1) * (q.pow(n - 1) - 1),
            Family::Sp => q.pow(n) - 1,
            Family::SU => {
                let q0 = self.q0() as i64;
                let n = n as i64;
                // singular nonzero vectors in a nondegenerate hermitian space
                let s = (q0.pow(n as u32) - (-1i64).pow(n as u32)) * (q0.pow(n as u32 - 1) + (-1i64).pow(n as u32));
                (s as u64) / (q - 1) * (self.q0() as u64 - 1)
            }
        }
    }
}

pub fn tv_in_group(t: &Transvection, spec: &GroupSpec) -> bool {
    if t.n() != spec.n {
        return false;
    }
    let f = &spec.field;
    match spec.family {
        Family::SL => true,
        Family::Sp => spec.lambda_of(t).is_some(),
        Family::SU => {
            spec.is_singular(&t.u) && spec.lambda_of(t).is_some_and(|l| f.trace(l).is_zero())
        }
    }
}

/// `{ base^lambda : lambda in scalars }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransvectionSubgroup {
    pub base: Transvection,
    pub scalars: Vec<Fe>,
}

impl TransvectionSubgroup {
    pub fn elements(&self, f: &Field) -> Vec<Transvection> {
        self.scalars.iter().filter_map(|&l| self.base.power(f, l)).collect()
    }

    pub fn contains(&self, f: &Field, t: &Transvection) -> bool {
        self.base.scalar_to(f, t).is_some_and(|l| self.scalars.contains(&l))
    }
}

/// `T_v = (1 + v (x) phi_v)^F`.
pub fn tv_subgroup(v: &[Fe], spec: &GroupSpec) -> Result<TransvectionSubgroup> {
    if spec.family == Family::SL {
        return Err(Error::WrongFamily("transvection subgroups need a form".into()));
    }
    if is_zero(v) {
        return Err(Error::ZeroData);
    }
    if !spec.is_singular(v) {
        return Err(Error::NonSingularVector);
    }
    let base = Transvection::canonical(&spec.field, v, &spec.phi_of(v));
    Ok(TransvectionSubgroup { base, scalars: spec.scalars() })
}

/// `Y^K = { t^lambda : t in Y, lambda in K^x }`, first-occurrence order.
pub fn tv_k_closure(ys: &[Transvection], k: Subfield, spec: &GroupSpec) -> Result<Vec<Transvection>> {
    let f = &spec.field;
    let ks: Vec<Fe> = f.subfield_elements(k).into_iter().filter(|x| !x.is_zero()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in ys {
        for &l in &ks {
            let s = t.power(f, l).unwrap();
            if !tv_in_group(&s, spec) {
                return Err(Error::ClosureLeavesGroup);
            }
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    Ok(out)
}
