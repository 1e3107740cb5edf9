use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use cmatlas::catalog::{build_example_algebra, Example};
use cmatlas::pipeline::make_field_split;
use cmatlas::polyring::{divide_exact, radical_match, Monomial, PolyRing, Polynomial};
use cmatlas::scalars::{make_field, BaseSpec, FieldContext, ScalarElement, Specializer};
use cmatlas::structalg::{multiply, AlgebraElement, StructureConstantAlgebra};
use proptest::prelude::*;

fn ex1_field() -> &'static Arc<FieldContext> {
    static K: OnceLock<Arc<FieldContext>> = OnceLock::new();
    K.get_or_init(|| make_field(&Example::Ex1.descriptor()).unwrap())
}

fn ex1_algebra() -> &'static Arc<StructureConstantAlgebra> {
    static A: OnceLock<Arc<StructureConstantAlgebra>> = OnceLock::new();
    A.get_or_init(|| build_example_algebra(Example::Ex1, ex1_field()).unwrap())
}

/// `(Σ cᵢⱼ λⁱ εʲ) / (λ + s)` with small integer data.
fn scalar(coeffs: &[i64], shift: i64) -> ScalarElement {
    let k = ex1_field();
    let l = k.symbol("lambda").unwrap();
    let e = k.symbol("eps").unwrap();
    let mut acc = k.zero();
    for (idx, c) in coeffs.iter().enumerate() {
        let term = &(&k.from_int(*c) * &l.pow((idx / 2) as i64).unwrap()) * &e.pow((idx % 2) as i64).unwrap();
        acc = &acc + &term;
    }
    acc.div(&(&l + &k.from_int(shift))).unwrap()
}

fn arb_scalar() -> impl Strategy<Value = ScalarElement> {
    (proptest::collection::vec(-5i64..6, 1..6), 1i64..4).prop_map(|(c, s)| scalar(&c, s))
}

fn ring_uv() -> Arc<PolyRing> {
    PolyRing::new(ex1_field(), &["u", "v"])
}

fn poly(ring: &Arc<PolyRing>, terms: &[(i64, i32, i32)]) -> Polynomial {
    let k = ring.field();
    terms.iter().fold(Polynomial::zero(ring), |acc, &(c, a, b)| &acc + &Polynomial::term(ring, Monomial(vec![a, b]), k.from_int(c)))
}

fn arb_terms() -> impl Strategy<Value = Vec<(i64, i32, i32)>> {
    proptest::collection::vec((-4i64..5, 0i32..3, 0i32..3), 0..5)
}

fn specializer() -> &'static (Specializer, Arc<FieldContext>) {
    static S: OnceLock<(Specializer, Arc<FieldContext>)> = OnceLock::new();
    S.get_or_init(|| {
        let src = ex1_field();
        let desc = src.descriptor().rebased(BaseSpec::Prime(10007), BTreeMap::from([("lambda".into(), "5".into())]));
        let target = make_field_split(&desc).unwrap();
        let sp = Specializer::new(src, &target, &target.descriptor().bindings.clone()).unwrap();
        (sp, target)
    })
}

fn element(coords: &[Vec<(i64, i32, i32)>]) -> AlgebraElement {
    let a = ex1_algebra();
    a.element(coords.iter().map(|t| poly(a.ring(), t)).collect())
}

fn arb_element() -> impl Strategy<Value = AlgebraElement> {
    proptest::collection::vec(proptest::collection::vec((-3i64..4, 0i32..2, 0i32..2), 0..3), 4).prop_map(|c| element(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn specialization_is_a_homomorphism(a in arb_scalar(), b in arb_scalar()) {
        let (sp, _) = specializer();
        let m = |x: &ScalarElement| sp.map(x).unwrap();
        prop_assert_eq!(m(&(&a + &b)), &m(&a) + &m(&b));
        prop_assert_eq!(m(&(&a * &b)), &m(&a) * &m(&b));
    }

    #[test]
    fn display_round_trips(a in arb_scalar(), t in arb_terms()) {
        prop_assert_eq!(ex1_field().parse(&a.to_string()).unwrap(), a);
        let r = ring_uv();
        let f = poly(&r, &t).scale(&scalar(&[1, 2], 1));
        prop_assert_eq!(Polynomial::parse(&r, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn substitution_is_a_homomorphism(f in arb_terms(), g in arb_terms()) {
        let r = ring_uv();
        let t = PolyRing::new(ex1_field(), &["xi", "v"]);
        let b: BTreeMap<String, Polynomial> =
            [("u", "xi*v"), ("v", "v")].iter().map(|(k, v)| (k.to_string(), Polynomial::parse(&t, v).unwrap())).collect();
        let (f, g) = (poly(&r, &f), poly(&r, &g));
        let s = |p: &Polynomial| p.substitute(&t, &b).unwrap();
        prop_assert_eq!(s(&(&f * &g)), &s(&f) * &s(&g));
        prop_assert_eq!(s(&(&f + &g)), &s(&f) + &s(&g));
    }

    #[test]
    fn exact_division_round_trips(f in arb_terms(), g in arb_terms()) {
        let r = ring_uv();
        let (f, g) = (poly(&r, &f), poly(&r, &g));
        prop_assume!(!g.is_zero());
        prop_assert_eq!(divide_exact(&(&f * &g), &g).unwrap(), f);
    }

    #[test]
    fn radical_reconstruction(e in proptest::collection::vec(1u32..4, 4), c in 1i64..9) {
        let r = ring_uv();
        let comps: Vec<Polynomial> = ["u", "v", "u - v", "u - lambda*v"].iter().map(|s| Polynomial::parse(&r, s).unwrap()).collect();
        let mut f = Polynomial::from_int(&r, c);
        for (p, k) in comps.iter().zip(&e) {
            f = &f * &p.pow(*k);
        }
        let m = radical_match(&f, &comps).unwrap();
        prop_assert_eq!(m.multiplicities, e);
        prop_assert_eq!(m.unit, ex1_field().from_int(c));
    }

    #[test]
    fn reduced_trace_is_symmetric(a in arb_element(), b in arb_element()) {
        let ab = multiply(&a, &b).unwrap().reduced_trace().unwrap();
        let ba = multiply(&b, &a).unwrap().reduced_trace().unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn algebra_multiplication_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        let l = multiply(&multiply(&a, &b).unwrap(), &c).unwrap();
        let r = multiply(&a, &multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}
