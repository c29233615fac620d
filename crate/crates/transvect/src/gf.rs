//! Exact arithmetic in GF(p^k) for odd p.
//!
//! Elements are packed as `c0 + c1*p + ... + c_{k-1}*p^{k-1}` where `c_i` are
//! the coefficients of the polynomial-basis representative. The prime subfield
//! is therefore `0..p`, zero is `Fe(0)` and one is `Fe(1)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// A packed field element. Meaningless without its [`Field`].
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const TABLE_MAX: u32 = 1024;
const UNARY_TABLE_MAX: u32 = 1 << 16;
pub const FIELD_MAX: u64 = 1 << 21;

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    q0: u32,
    modulus: Vec<u32>,
    pw: Vec<u32>,
    add_t: Option<Vec<u32>>,
    mul_t: Option<Vec<u32>>,
    inv_t: Option<Vec<u32>>,
    frob_t: Option<Vec<u32>>,
}

/// GF(p^k) together with the role parameter `q0`.
///
/// `q0 == q` for the linear and symplectic roles; `q0 == sqrt(q)` when the
/// field carries a hermitian form.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; q0={})", self.p(), self.k(), self.q0())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.same_arithmetic(other) && self.0.q0 == other.0.q0
    }
}

impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let t = (c as u64 * bi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    mod_pow(a, p - 2, p)
}

fn mod_pow(a: u32, mut e: u32, p: u32) -> u32 {
    let mut base = a as u64 % p as u64;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Trial division by every monic polynomial of degree at most half.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = match poly.iter().rposition(|&c| c != 0) {
        Some(d) => d,
        None => return false,
    };
    if deg <= 1 {
        return deg == 1;
    }
    let poly = &poly[..=deg];
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for m in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = m;
            for _ in 0..d {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            if poly_rem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `k` over GF(p),
/// comparing coefficient lists low-to-high.
pub fn canonical_modulus(p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    let count = (p as u64).pow(k as u32);
    for m in 0..count {
        // c0 is the most significant digit of m, so m enumerates lex order.
        let mut low = vec![0u32; k];
        let mut x = m;
        for i in (0..k).rev() {
            low[i] = (x % p as u64) as u32;
            x /= p as u64;
        }
        let mut poly = low;
        poly.push(1);
        if is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// GF(p^k) in the linear/symplectic role (`q0 = q`).
    pub fn new(p: u32, k: u32) -> Result<Field> {
        Self::build(p, canonical_modulus_checked(p, k)?, false)
    }

    /// GF(p^k) in the unitary role (`q0 = p^{k/2}`); `k` must be even.
    pub fn new_unitary(p: u32, k: u32) -> Result<Field> {
        Self::build(p, canonical_modulus_checked(p, k)?, true)
    }

    /// Field from an explicit modulus (low-to-high, monic) and `q0`.
    pub fn with_modulus(p: u32, modulus: Vec<u32>, q0: u32) -> Result<Field> {
        if !is_prime(p) || p == 2 {
            return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic of degree >= 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficient out of range".into()));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let k = (modulus.len() - 1) as u32;
        let q = (p as u64).pow(k);
        let unitary = if q0 as u64 == q {
            false
        } else if k % 2 == 0 && (q0 as u64) * (q0 as u64) == q {
            true
        } else {
            return Err(Error::InvalidField(format!("q0 = {q0} is neither q nor sqrt(q)")));
        };
        Self::build(p, modulus, unitary)
    }

    fn build(p: u32, modulus: Vec<u32>, unitary: bool) -> Result<Field> {
        if !is_prime(p) || p == 2 {
            return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
        }
        let k = (modulus.len() - 1) as u32;
        let q64 = (p as u64).pow(k);
        if q64 > FIELD_MAX {
            return Err(Error::InvalidField(format!("q = {q64} too large")));
        }
        if unitary && k % 2 != 0 {
            return Err(Error::QNotSquare);
        }
        let q = q64 as u32;
        let q0 = if unitary { p.pow(k / 2) } else { q };
        let pw: Vec<u32> = (0..k).map(|i| p.pow(i)).collect();
        let mut inner = Inner { p, k, q, q0, modulus, pw, add_t: None, mul_t: None, inv_t: None, frob_t: None };
        if k > 1 && q <= TABLE_MAX {
            let f = Field(Arc::new(inner));
            let mut add_t = vec![0u32; (q * q) as usize];
            let mut mul_t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add_t[(a * q + b) as usize] = f.add_raw(Fe(a), Fe(b)).0;
                    mul_t[(a * q + b) as usize] = f.mul_raw(Fe(a), Fe(b)).0;
                }
            }
            inner = Arc::try_unwrap(f.0).ok().expect("unique");
            inner.add_t = Some(add_t);
            inner.mul_t = Some(mul_t);
        }
        if q <= UNARY_TABLE_MAX {
            let f = Field(Arc::new(inner));
            let mut inv_t = vec![0u32; q as usize];
            let mut frob_t = vec![0u32; q as usize];
            for a in 0..q {
                if a != 0 {
                    inv_t[a as usize] = f.pow(Fe(a), q as u64 - 2).0;
                }
                frob_t[a as usize] = f.pow(Fe(a), q0 as u64).0;
            }
            inner = Arc::try_unwrap(f.0).ok().expect("unique");
            inner.inv_t = Some(inv_t);
            inner.frob_t = Some(frob_t);
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Same arithmetic with the other role (`unitary` selects `q0 = sqrt(q)`).
    pub fn with_role(&self, unitary: bool) -> Result<Field> {
        if unitary == self.is_unitary() {
            return Ok(self.clone());
        }
        Self::build(self.p(), self.0.modulus.clone(), unitary)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn k(&self) -> u32 {
        self.0.k
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn q0(&self) -> u32 {
        self.0.q0
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    pub fn is_unitary(&self) -> bool {
        self.0.q0 != self.0.q
    }
    pub fn is_square(&self) -> bool {
        self.0.k % 2 == 0
    }

    /// Equal characteristic and modulus, regardless of role.
    pub fn same_arithmetic(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }
    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let p = self.0.p;
        let mut x = a.0;
        (0..self.0.k)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Fe> {
        if c.len() != self.0.k as usize {
            return Err(Error::DimensionMismatch { expected: self.0.k as usize, got: c.len() });
        }
        if c.iter().any(|&x| x >= self.0.p) {
            return Err(Error::Parse(format!("coefficient out of range for p = {}", self.0.p)));
        }
        Ok(Fe(c.iter().zip(&self.0.pw).map(|(&ci, &w)| ci * w).sum()))
    }

    /// Key ordering elements lexicographically by their coefficient list `[c0, c1, ...]`.
    pub fn lex_key(&self, a: Fe) -> u32 {
        let mut key = 0u32;
        for c in self.coeffs(a) {
            key = key * self.0.p + c;
        }
        key
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> {
        (1..self.0.q).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.0.q))
    }

    fn add_raw(&self, a: Fe, b: Fe) -> Fe {
        let p = self.0.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut r = 0;
        for &w in &self.0.pw {
            r += ((x % p + y % p) % p) * w;
            x /= p;
            y /= p;
        }
        Fe(r)
    }

    fn mul_raw(&self, a: Fe, b: Fe) -> Fe {
        let p = self.0.p as u64;
        let k = self.0.k as usize;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + ca[i] as u64 * cb[j] as u64) % p;
            }
        }
        let m = &self.0.modulus;
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                let t = c * m[i] as u64 % p;
                prod[d - k + i] = (prod[d - k + i] + p - t) % p;
            }
            prod[d] = 0;
        }
        let r: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        Fe(r.iter().zip(&self.0.pw).map(|(&ci, &w)| ci * w).sum())
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.0;
        if inner.k == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= inner.p { s - inner.p } else { s });
        }
        match &inner.add_t {
            Some(t) => Fe(t[(a.0 * inner.q + b.0) as usize]),
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let inner = &*self.0;
        if inner.k == 1 {
            return Fe(if a.0 == 0 { 0 } else { inner.p - a.0 });
        }
        let p = inner.p;
        let mut x = a.0;
        let mut r = 0;
        for &w in &inner.pw {
            r += ((p - x % p) % p) * w;
            x /= p;
        }
        Fe(r)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.0;
        if inner.k == 1 {
            return Fe((a.0 as u64 * b.0 as u64 % inner.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        match &inner.mul_t {
            Some(t) => Fe(t[(a.0 * inner.q + b.0) as usize]),
            None => self.mul_raw(a, b),
        }
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents need a nonzero base.
    pub fn powi(&self, a: Fe, e: i64) -> Option<Fe> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|b| self.pow(b, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        match &self.0.inv_t {
            Some(t) => Some(Fe(t[a.0 as usize])),
            None => Some(self.pow(a, self.0.q as u64 - 2)),
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^{q0}`: the involution of the unitary role, the identity otherwise.
    #[inline]
    pub fn frob(&self, a: Fe) -> Fe {
        if !self.is_unitary() {
            return a;
        }
        match &self.0.frob_t {
            Some(t) => Fe(t[a.0 as usize]),
            None => self.pow(a, self.0.q0 as u64),
        }
    }

    /// `a + a^{q0}`.
    pub fn trace(&self, a: Fe) -> Fe {
        self.add(a, self.frob(a))
    }

    /// `a^{sqrt(q)}` regardless of role; `None` when `k` is odd.
    pub fn sqrt_frob(&self, a: Fe) -> Option<Fe> {
        if !self.is_square() {
            return None;
        }
        if self.is_unitary() {
            return Some(self.frob(a));
        }
        Some(self.pow(a, (self.0.p as u64).pow(self.0.k / 2)))
    }

    /// `a^{p^i}`.
    pub fn frob_p(&self, a: Fe, i: u32) -> Fe {
        let mut x = a;
        for _ in 0..i {
            x = self.pow(x, self.0.p as u64);
        }
        x
    }

    /// Degree over GF(p) of the smallest subfield containing `a`.
    pub fn degree(&self, a: Fe) -> u32 {
        let k = self.0.k;
        (1..=k).filter(|d| k % d == 0).find(|&d| self.frob_p(a, d) == a).unwrap_or(k)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> u64 {
        assert!(!a.is_zero());
        let n = self.0.q as u64 - 1;
        let mut ord = n;
        for (prime, _) in factor(n) {
            while ord % prime == 0 && self.pow(a, ord / prime) == Fe::ONE {
                ord /= prime;
            }
        }
        ord
    }

    /// Lex-least generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        let n = self.0.q as u64 - 1;
        let mut els: Vec<Fe> = self.nonzero().collect();
        els.sort_by_key(|&a| self.lex_key(a));
        els.into_iter().find(|&a| self.order(a) == n).expect("cyclic group")
    }

    /// Lex-least nonzero element with `trace == 0`; `None` outside the unitary role.
    pub fn lambda0(&self) -> Option<Fe> {
        if !self.is_unitary() {
            return None;
        }
        let mut els: Vec<Fe> = self.nonzero().filter(|&a| self.trace(a).is_zero()).collect();
        els.sort_by_key(|&a| self.lex_key(a));
        els.first().copied()
    }

    pub fn full_subfield(&self) -> Subfield {
        Subfield { divisor: self.0.k }
    }

    pub fn prime_subfield(&self) -> Subfield {
        Subfield { divisor: 1 }
    }

    /// GF(q0) as a subfield.
    pub fn q0_subfield(&self) -> Subfield {
        Subfield { divisor: if self.is_unitary() { self.0.k / 2 } else { self.0.k } }
    }

    /// Smallest `k' | k` with `a^{p^{k'}} = a` for every element.
    pub fn subfield_generated(&self, elems: &[Fe]) -> Subfield {
        let mut d = 1u32;
        for &a in elems {
            if !self.in_subfield(a, Subfield { divisor: d }) {
                d = lcm(d, self.degree(a));
            }
        }
        Subfield { divisor: d }
    }

    pub fn in_subfield(&self, a: Fe, s: Subfield) -> bool {
        if s.divisor >= self.0.k {
            return true;
        }
        if s.divisor == 1 {
            return a.0 < self.0.p;
        }
        self.frob_p(a, s.divisor) == a
    }

    /// Join of two subfields.
    pub fn join(&self, a: Subfield, b: Subfield) -> Subfield {
        Subfield { divisor: lcm(a.divisor, b.divisor) }
    }

    /// Elements of a subfield, sorted by packed value.
    pub fn subfield_elements(&self, s: Subfield) -> Vec<Fe> {
        if s.divisor >= self.0.k {
            return self.elements().collect();
        }
        if s.divisor == 1 {
            return (0..self.0.p).map(Fe).collect();
        }
        let g = self.primitive_element();
        let step = (self.0.q as u64 - 1) / ((self.0.p as u64).pow(s.divisor) - 1);
        let h = self.pow(g, step);
        let mut out = vec![Fe::ZERO];
        let mut x = Fe::ONE;
        loop {
            out.push(x);
            x = self.mul(x, h);
            if x == Fe::ONE {
                break;
            }
        }
        out.sort();
        out
    }

    /// Kernel of the relative trace, sorted; all of the field outside the unitary role.
    pub fn trace_zero_elements(&self) -> Vec<Fe> {
        if !self.is_unitary() {
            return self.elements().collect();
        }
        self.elements().filter(|&a| self.trace(a).is_zero()).collect()
    }

    /// Some `mu` with `mu^{q0+1} = c` for `c` in GF(q0)^x.
    pub fn norm_preimage(&self, c: Fe) -> Option<Fe> {
        let e = self.0.q0 as u64 + 1;
        self.nonzero().find(|&m| self.pow(m, e) == c)
    }

    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.0.k == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

fn canonical_modulus_checked(p: u32, k: u32) -> Result<Vec<u32>> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
    }
    if k == 0 || (p as u64).checked_pow(k).map_or(true, |q| q > FIELD_MAX) {
        return Err(Error::InvalidField(format!("unsupported degree k = {k}")));
    }
    Ok(canonical_modulus(p, k))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// GF(p^{divisor}) inside GF(p^k).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Subfield {
    pub divisor: u32,
}

impl Subfield {
    pub fn order(&self, p: u32) -> u64 {
        (p as u64).pow(self.divisor)
    }

    pub fn contains(&self, other: Subfield) -> bool {
        self.divisor % other.divisor == 0
    }
}

/// An element bundled with its field, for checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub field: Field,
    pub value: Fe,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow(i64),
}

impl FieldElement {
    pub fn new(field: &Field, value: Fe) -> Self {
        FieldElement { field: field.clone(), value }
    }

    pub fn from_coeffs(field: &Field, c: &[u32]) -> Result<Self> {
        Ok(Self::new(field, field.from_coeffs(c)?))
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field.same_arithmetic(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn frobenius_q0(&self) -> Self {
        Self::new(&self.field, self.field.frob(self.value))
    }

    pub fn trace_q0(&self) -> Self {
        Self::new(&self.field, self.field.trace(self.value))
    }
}

/// Checked arithmetic; unary operations ignore `b`.
pub fn ff_arithmetic(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    a.check(b)?;
    let f = &a.field;
    let v = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Div => f.div(a.value, b.value).ok_or(Error::DivisionByZero)?,
        ArithOp::Neg => f.neg(a.value),
        ArithOp::Inv => f.inv(a.value).ok_or(Error::DivisionByZero)?,
        ArithOp::Pow(e) => f.powi(a.value, e).ok_or(Error::DivisionByZero)?,
    };
    Ok(FieldElement::new(f, v))
}
