//! Vectors, matrices and forms over a [`Field`].

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

pub type Vector = Vec<Fe>;
/// Coordinates of a linear functional: `phi(x) = sum phi_i x_i`.
pub type Covector = Vec<Fe>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSpace {
    pub field: Field,
    pub n: usize,
}

impl VectorSpace {
    pub fn new(field: &Field, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        Ok(VectorSpace { field: field.clone(), n })
    }
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Fe::ZERO; n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Fe::ONE;
    v
}

pub fn is_zero(v: &[Fe]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vadd(f: &Field, a: &[Fe], b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vsub(f: &Field, a: &[Fe], b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn vscale(f: &Field, c: Fe, a: &[Fe]) -> Vector {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

/// `a + c*b`.
pub fn vaxpy(f: &Field, a: &[Fe], c: Fe, b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect()
}

pub fn vfrob(f: &Field, a: &[Fe]) -> Vector {
    a.iter().map(|&x| f.frob(x)).collect()
}

/// `phi(x)`.
pub fn pair(f: &Field, phi: &[Fe], x: &[Fe]) -> Fe {
    let mut acc = Fe::ZERO;
    for (&a, &b) in phi.iter().zip(x) {
        if !a.is_zero() && !b.is_zero() {
            acc = f.add(acc, f.mul(a, b));
        }
    }
    acc
}

pub fn first_nonzero(v: &[Fe]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Scale so the first nonzero coordinate is 1; returns the scale applied.
pub fn normalize(f: &Field, v: &[Fe]) -> Option<(Vector, Fe)> {
    let i = first_nonzero(v)?;
    let c = f.inv(v[i])?;
    Some((vscale(f, c, v), c))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fe>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: rows.iter().map(|x| x.len()).find(|&l| l != c).unwrap() });
        }
        Ok(Mat { rows: r, cols: c, data: rows.concat() })
    }

    pub fn to_rows(&self) -> Vec<Vec<Fe>> {
        self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).take(self.rows).collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Mat::identity(self.rows)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise Frobenius.
    pub fn frob(&self, f: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f.frob(x)).collect() }
    }

    pub fn mul(&self, f: &Field, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix shapes");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, f: &Field, other: &Mat) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: vadd(f, &self.data, &other.data) }
    }

    pub fn sub(&self, f: &Field, other: &Mat) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: vsub(f, &self.data, &other.data) }
    }

    pub fn apply(&self, f: &Field, v: &[Fe]) -> Vector {
        (0..self.rows).map(|i| pair(f, self.row(i), v)).collect()
    }

    /// `phi . M`, the pullback of a covector.
    pub fn pullback(&self, f: &Field, phi: &[Fe]) -> Covector {
        (0..self.cols)
            .map(|j| {
                let mut acc = Fe::ZERO;
                for i in 0..self.rows {
                    acc = f.add(acc, f.mul(phi[i], self.get(i, j)));
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self, f: &Field) -> Fe {
        (0..self.rows.min(self.cols)).fold(Fe::ZERO, |acc, i| f.add(acc, self.get(i, i)))
    }

    pub fn det(&self, f: &Field) -> Fe {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return Fe::ZERO;
            };
            if p != c {
                for j in 0..n {
                    let (a, b) = (m.get(p, j), m.get(c, j));
                    m.set(p, j, b);
                    m.set(c, j, a);
                }
                det = f.neg(det);
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let pinv = f.inv(piv).unwrap();
            for r in c + 1..n {
                let factor = f.mul(m.get(r, c), pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &Field) -> Option<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Fe::ONE);
        }
        let (r, pivots) = rref(f, &aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j));
            }
        }
        Some(out)
    }

    pub fn pow(&self, f: &Field, mut e: u64) -> Mat {
        let mut base = self.clone();
        let mut acc = Mat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }
}

/// Reduced row echelon form with leftmost pivots; returns the matrix and pivot columns.
pub fn rref(f: &Field, m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                let (x, y) = (a.get(p, j), a.get(r, j));
                a.set(p, j, y);
                a.set(r, j, x);
            }
        }
        let inv = f.inv(a.get(r, c)).unwrap();
        for j in 0..a.cols {
            let v = f.mul(a.get(r, j), inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if factor.is_zero() {
                continue;
            }
            for j in 0..a.cols {
                let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(f: &Field, rows: &[Vector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = Mat::from_rows(rows).expect("equal lengths");
    rref(f, &m).1.len()
}

/// Canonical basis (nonzero RREF rows) of the span of `rows`.
pub fn span_basis(f: &Field, rows: &[Vector]) -> Vec<Vector> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = Mat::from_rows(rows).expect("equal lengths");
    let (r, piv) = rref(f, &m);
    (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Basis of `{x : M x = 0}`, in canonical RREF form.
pub fn nullspace(f: &Field, m: &Mat) -> Vec<Vector> {
    let (r, piv) = rref(f, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !piv.contains(c)).collect();
    let mut out = Vec::new();
    for &fc in &free {
        let mut v = zero_vec(m.cols);
        v[fc] = Fe::ONE;
        for (i, &pc) in piv.iter().enumerate() {
            v[pc] = f.neg(r.get(i, fc));
        }
        out.push(v);
    }
    span_basis(f, &out)
}

/// Coordinates `c` with `sum c_i basis_i = v`, if `v` lies in the span.
pub fn solve_in_span(f: &Field, basis: &[Vector], v: &[Fe]) -> Option<Vector> {
    let k = basis.len();
    let n = v.len();
    let mut aug = Mat::zeros(n, k + 1);
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            aug.set(i, j, b[i]);
        }
    }
    for i in 0..n {
        aug.set(i, k, v[i]);
    }
    let (r, piv) = rref(f, &aug);
    if piv.last() == Some(&k) {
        return None;
    }
    let mut c = zero_vec(k);
    for (i, &pc) in piv.iter().enumerate() {
        c[pc] = r.get(i, k);
    }
    Some(c)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    None,
    Symplectic,
    Hermitian,
}

/// `f(u,v) = sigma(u)^T G v`; `sigma` is the identity unless hermitian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub kind: FormKind,
    pub gram: Mat,
}

impl Form {
    pub fn none(n: usize) -> Form {
        Form { kind: FormKind::None, gram: Mat::zeros(n, n) }
    }

    /// Block-diagonal `[[0,1],[-1,0]]`.
    pub fn symplectic_default(f: &Field, n: usize) -> Result<Form> {
        if n % 2 != 0 {
            return Err(Error::InvalidForm("symplectic form needs even dimension".into()));
        }
        let mut g = Mat::zeros(n, n);
        for b in 0..n / 2 {
            g.set(2 * b, 2 * b + 1, Fe::ONE);
            g.set(2 * b + 1, 2 * b, f.neg(Fe::ONE));
        }
        Ok(Form { kind: FormKind::Symplectic, gram: g })
    }

    pub fn hermitian_default(f: &Field, n: usize) -> Result<Form> {
        if !f.is_unitary() {
            return Err(Error::QNotSquare);
        }
        Ok(Form { kind: FormKind::Hermitian, gram: Mat::identity(n) })
    }

    /// Validated form with an explicit Gram matrix.
    pub fn new(f: &Field, kind: FormKind, gram: Mat) -> Result<Form> {
        if !gram.is_square() {
            return Err(Error::InvalidForm("gram matrix is not square".into()));
        }
        let n = gram.rows;
        match kind {
            FormKind::None => {}
            FormKind::Symplectic => {
                if n % 2 != 0 {
                    return Err(Error::InvalidForm("symplectic form needs even dimension".into()));
                }
                for i in 0..n {
                    if !gram.get(i, i).is_zero() {
                        return Err(Error::InvalidForm("alternating form has nonzero diagonal".into()));
                    }
                    for j in 0..n {
                        if gram.get(i, j) != f.neg(gram.get(j, i)) {
                            return Err(Error::InvalidForm("gram matrix is not skew-symmetric".into()));
                        }
                    }
                }
                if gram.det(f).is_zero() {
                    return Err(Error::InvalidForm("degenerate form".into()));
                }
            }
            FormKind::Hermitian => {
                if !f.is_unitary() {
                    return Err(Error::QNotSquare);
                }
                if gram.transpose() != gram.frob(f) {
                    return Err(Error::InvalidForm("gram matrix is not hermitian".into()));
                }
                if gram.det(f).is_zero() {
                    return Err(Error::InvalidForm("degenerate form".into()));
                }
            }
        }
        Ok(Form { kind, gram })
    }

    pub fn n(&self) -> usize {
        self.gram.rows
    }

    pub fn eval(&self, f: &Field, u: &[Fe], v: &[Fe]) -> Result<Fe> {
        let n = self.n();
        if u.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: if u.len() != n { u.len() } else { v.len() } });
        }
        Ok(pair(f, &self.phi(f, u), v))
    }

    /// `f(u,v)` without dimension checks.
    pub fn ev(&self, f: &Field, u: &[Fe], v: &[Fe]) -> Fe {
        pair(f, &self.phi(f, u), v)
    }

    /// Coefficients of `x -> f(u,x)`.
    pub fn phi(&self, f: &Field, u: &[Fe]) -> Covector {
        let n = self.n();
        let su: Vector = if self.kind == FormKind::Hermitian { vfrob(f, u) } else { u.to_vec() };
        (0..n)
            .map(|j| {
                let mut acc = Fe::ZERO;
                for i in 0..n {
                    if !su[i].is_zero() {
                        acc = f.add(acc, f.mul(su[i], self.gram.get(i, j)));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_singular(&self, f: &Field, v: &[Fe]) -> bool {
        match self.kind {
            FormKind::Symplectic => true,
            _ => self.ev(f, v, v).is_zero(),
        }
    }

    /// Whether `g` preserves the form: `sigma(g)^T G g = G`.
    pub fn preserved_by(&self, f: &Field, g: &Mat) -> bool {
        match self.kind {
            FormKind::None => true,
            _ => {
                let sg = if self.kind == FormKind::Hermitian { g.frob(f) } else { g.clone() };
                sg.transpose().mul(f, &self.gram).mul(f, g) == self.gram
            }
        }
    }

    /// Basis of the radical of `f` restricted to the span of `basis`.
    pub fn radical(&self, f: &Field, basis: &[Vector]) -> Vec<Vector> {
        let span = span_basis(f, basis);
        let k = span.len();
        if k == 0 {
            return Vec::new();
        }
        let mut a = Mat::zeros(k, k);
        for j in 0..k {
            for i in 0..k {
                a.set(j, i, self.ev(f, &span[j], &span[i]));
            }
        }
        let n = self.n();
        let vecs: Vec<Vector> = nullspace(f, &a)
            .iter()
            .map(|c| {
                let mut v = zero_vec(n);
                for (ci, b) in c.iter().zip(&span) {
                    v = vaxpy(f, &v, *ci, b);
                }
                v
            })
            .collect();
        span_basis(f, &vecs)
    }
}

pub fn form_eval(f: &Field, form: &Form, u: &[Fe], v: &[Fe]) -> Result<Fe> {
    form.eval(f, u, v)
}

pub fn phi_u(f: &Field, form: &Form, u: &[Fe]) -> Result<Covector> {
    if form.kind == FormKind::None {
        return Err(Error::InvalidForm("phi_u needs a nondegenerate form".into()));
    }
    Ok(form.phi(f, u))
}

pub fn is_singular(f: &Field, form: &Form, v: &[Fe]) -> bool {
    form.is_singular(f, v)
}

pub fn radical(f: &Field, form: &Form, basis: &[Vector]) -> Vec<Vector> {
    form.radical(f, basis)
}

/// All nonzero vectors of `F^n` with first nonzero coordinate 1, in packed lexicographic order.
pub fn projective_points(f: &Field, n: usize) -> Vec<Vector> {
    let q = f.q() as u64;
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        let tail = n - lead - 1;
        let count = q.pow(tail as u32);
        for m in 0..count {
            let mut v = zero_vec(n);
            v[lead] = Fe::ONE;
            let mut x = m;
            for j in (lead + 1..n).rev() {
                v[j] = Fe((x % q) as u32);
                x /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Every vector of `F^n`, zero first.
pub fn all_vectors(f: &Field, n: usize) -> impl Iterator<Item = Vector> + '_ {
    let q = f.q() as u64;
    (0..q.pow(n as u32)).map(move |mut m| {
        let mut v = zero_vec(n);
        for j in (0..n).rev() {
            v[j] = Fe((m % q) as u32);
            m /= q;
        }
        v
    })
}
