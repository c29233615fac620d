mod common;

use common::{elem_from, poly_mulmod};
use proptest::prelude::*;
use transvect::gf::{canonical_modulus, ff_arithmetic, is_irreducible, ArithOp, FieldElement};
use transvect::{Error, Fe, Field, Subfield};

const FIELDS: [(u32, u32); 7] = [(3, 1), (5, 1), (3, 2), (5, 2), (3, 3), (7, 2), (3, 4)];

#[test]
fn multiplication_matches_polynomial_oracle() {
    for (p, k) in FIELDS {
        let f = Field::new(p, k).unwrap();
        let m = f.modulus().to_vec();
        for a in f.elements() {
            for b in f.elements().step_by(3) {
                let want = poly_mulmod(p, &m, &f.coeffs(a), &f.coeffs(b));
                assert_eq!(f.mul(a, b), elem_from(&f, &want), "GF({p}^{k}) {a:?}*{b:?}");
            }
        }
    }
}

#[test]
fn addition_is_coefficientwise() {
    for (p, k) in FIELDS {
        let f = Field::new(p, k).unwrap();
        for a in f.elements() {
            for b in f.elements().step_by(5) {
                let want: Vec<u32> = f.coeffs(a).iter().zip(f.coeffs(b)).map(|(x, y)| (x + y) % p).collect();
                assert_eq!(f.add(a, b), elem_from(&f, &want));
            }
        }
    }
}

#[test]
fn inverses_and_division() {
    for (p, k) in FIELDS {
        let f = Field::new(p, k).unwrap();
        assert_eq!(f.inv(Fe::ZERO), None);
        assert_eq!(f.div(Fe::ONE, Fe::ZERO), None);
        for a in f.nonzero() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
        }
    }
}

#[test]
fn canonical_moduli_are_irreducible() {
    for (p, k) in FIELDS {
        let m = canonical_modulus(p, k);
        assert_eq!(m.len(), k as usize + 1);
        assert!(is_irreducible(p, &m));
    }
    // x^2 + 1 splits mod 5
    assert!(!is_irreducible(5, &[1, 0, 1]));
    assert!(is_irreducible(3, &[1, 0, 1]));
}

#[test]
fn invalid_fields_are_rejected() {
    assert!(matches!(Field::new(2, 3), Err(Error::InvalidField(_))));
    assert!(matches!(Field::new(9, 1), Err(Error::InvalidField(_))));
    assert!(matches!(Field::new_unitary(3, 3), Err(Error::QNotSquare)));
    assert!(Field::with_modulus(5, vec![1, 0, 1], 25).is_err());
}

#[test]
fn multiplicative_group_is_cyclic() {
    for (p, k) in FIELDS {
        let f = Field::new(p, k).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.order(g), f.q() as u64 - 1);
        let mut seen = std::collections::HashSet::new();
        let mut x = Fe::ONE;
        for _ in 0..f.q() - 1 {
            seen.insert(x);
            x = f.mul(x, g);
        }
        assert_eq!(seen.len() as u32, f.q() - 1);
    }
}

#[test]
fn unitary_role_frobenius_trace_norm() {
    for (p, k) in [(3, 2), (5, 2), (3, 4), (7, 2)] {
        let f = Field::new_unitary(p, k).unwrap();
        let q0 = f.q0();
        assert_eq!(q0 * q0, f.q());
        for a in f.elements() {
            assert_eq!(f.frob(a), f.pow(a, q0 as u64));
            assert_eq!(f.frob(f.frob(a)), a);
            let t = f.trace(a);
            assert_eq!(f.frob(t), t, "trace lies in GF(q0)");
        }
        // norm map onto GF(q0)^x
        for c in f.nonzero().filter(|&c| f.frob(c) == c) {
            let m = f.norm_preimage(c).unwrap();
            assert_eq!(f.pow(m, q0 as u64 + 1), c);
        }
        assert_eq!(f.trace_zero_elements().len() as u32, q0);
    }
}

#[test]
fn subfields() {
    let f = Field::new(3, 4).unwrap();
    assert_eq!(f.full_subfield(), Subfield { divisor: 4 });
    assert_eq!(f.prime_subfield(), Subfield { divisor: 1 });
    for d in [1, 2, 4] {
        let s = Subfield { divisor: d };
        let els = f.subfield_elements(s);
        assert_eq!(els.len() as u64, s.order(3));
        for &a in &els {
            assert!(f.in_subfield(a, s));
            assert_eq!(f.pow(a, s.order(3)), a);
        }
    }
    let g = f.primitive_element();
    assert_eq!(f.subfield_generated(&[g]), f.full_subfield());
    assert_eq!(f.subfield_generated(&[f.int(2)]), f.prime_subfield());
    assert_eq!(f.join(Subfield { divisor: 1 }, Subfield { divisor: 2 }), Subfield { divisor: 2 });
}

#[test]
fn checked_arithmetic_rejects_mixed_fields() {
    let f = Field::new(3, 2).unwrap();
    let g = Field::new(5, 1).unwrap();
    let a = FieldElement::new(&f, Fe(4));
    let b = FieldElement::new(&g, Fe(2));
    assert_eq!(ff_arithmetic(&a, &b, ArithOp::Add), Err(Error::FieldMismatch));
    let z = FieldElement::new(&f, Fe::ZERO);
    assert_eq!(ff_arithmetic(&a, &z, ArithOp::Div), Err(Error::DivisionByZero));
}

fn field_and_elems() -> impl Strategy<Value = (usize, u32, u32, u32)> {
    (0..FIELDS.len()).prop_flat_map(|i| {
        let (p, k) = FIELDS[i];
        let q = p.pow(k);
        (Just(i), 0..q, 0..q, 0..q)
    })
}

proptest! {
    #[test]
    fn field_axioms((i, a, b, c) in field_and_elems()) {
        let (p, k) = FIELDS[i];
        let f = Field::new(p, k).unwrap();
        let (a, b, c) = (Fe(a), Fe(b), Fe(c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.frob_p(f.mul(a, b), 1), f.mul(f.frob_p(a, 1), f.frob_p(b, 1)));
        prop_assert_eq!(f.frob_p(f.add(a, b), 1), f.add(f.frob_p(a, 1), f.frob_p(b, 1)));
    }

    #[test]
    fn coefficient_round_trip((i, a, _b, _c) in field_and_elems()) {
        let (p, k) = FIELDS[i];
        let f = Field::new(p, k).unwrap();
        prop_assert_eq!(f.from_coeffs(&f.coeffs(Fe(a))).unwrap(), Fe(a));
    }
}
