use std::sync::Arc;

use cmatlas::blowup::{adjoin_generators, check_gluing, pullback_relations, BasisChoice, Chart, ChartAlgebra, ChartName};
use cmatlas::catalog::{build_example_algebra, Example, Location};
use cmatlas::polyring::{divide_exact, radical_match, Polynomial};
use cmatlas::scalars::{make_field, FieldContext};
use cmatlas::structalg::{find_radical_witness, quotient_by_generators, verify_identity, AlgError, StructureConstantAlgebra};

fn setup(ex: Example) -> (Arc<FieldContext>, Arc<StructureConstantAlgebra>) {
    let k = make_field(&ex.descriptor()).unwrap();
    let a = build_example_algebra(ex, &k).unwrap();
    (k, a)
}

fn chart(ex: Example, c: ChartName) -> ChartAlgebra {
    let (k, a) = setup(ex);
    let spec = ex.chart(c);
    adjoin_generators(&a, &Chart::new(c, &k), &spec.defs, &spec.basis).unwrap()
}

fn poly(a: &StructureConstantAlgebra, s: &str) -> Polynomial {
    Polynomial::parse(a.ring(), s).unwrap()
}

/// Divides out each factor as often as it goes; returns the cofactor.
fn strip(mut f: Polynomial, factors: &[Polynomial]) -> (Polynomial, Vec<u32>) {
    let mut mult = Vec::new();
    for g in factors {
        let mut e = 0;
        while let Ok(q) = divide_exact(&f, g) {
            f = q;
            e += 1;
        }
        mult.push(e);
    }
    (f, mult)
}

#[test]
fn catalog_identities_hold() {
    for ex in Example::ALL {
        let (k, a) = setup(ex);
        for id in ex.identities() {
            let alg = match id.location {
                Location::Original => a.clone(),
                Location::Pulled(c) => pullback_relations(&a, &Chart::new(c, &k)).unwrap(),
                Location::Chart(c) => chart(ex, c).algebra,
            };
            assert!(verify_identity(&alg, id.lhs, id.rhs).unwrap(), "{ex} {:?}: {} = {}", id.location, id.lhs, id.rhs);
        }
    }
}

#[test]
fn printed_sign_of_eta_y2_fails() {
    let a = chart(Example::Ex1, ChartName::U2).algebra;
    assert!(!verify_identity(&a, "eta*y2", "x*z2 - eps*eta*x").unwrap());
}

#[test]
fn ex1_discriminant_closed_form() {
    // Gram matrix of the trace form on (1, x, y, z) with t = trd z = 2εuv and
    // Y = u(u² + λv²) splits into the blocks [[2, t], [t, t² − 2vY]] and
    // [[2v, t], [t, 2Y]], so disc = −(t² − 4vY)² = −16u²v²(u−v)²(u−λv)².
    let (_, a) = setup(Example::Ex1);
    let expected = poly(&a, "-16*u^2*v^2*(u - v)^2*(u - lambda*v)^2");
    assert_eq!(a.trace_form_discriminant().unwrap(), expected);
}

#[test]
fn ex2_discriminant_by_trial_division() {
    // trd(xⁱyʲ) vanishes unless 3 | i and 3 | j, so the Gram matrix is a
    // signed permutation of 3·v^a·(u(u−v))^b entries with Σa = Σb = 6
    let (_, a) = setup(Example::Ex2);
    let factors: Vec<_> = ["u", "v", "u - v"].iter().map(|s| poly(&a, s)).collect();
    let (rest, mult) = strip(a.trace_form_discriminant().unwrap(), &factors);
    assert_eq!(mult, vec![6, 6, 6]);
    assert_eq!(rest.as_constant().unwrap(), a.ring().field().from_int(19683));
}

#[test]
fn radical_match_agrees_with_trial_division() {
    for ex in Example::ALL {
        let (_, a) = setup(ex);
        let factors: Vec<_> = ex.divisor().iter().map(|s| poly(&a, s)).collect();
        let d = a.trace_form_discriminant().unwrap();
        let m = radical_match(&d, &factors).unwrap();
        let (rest, mult) = strip(d, &factors);
        assert_eq!(m.multiplicities, mult);
        assert!(rest.is_constant());
        // dropping a component leaves a non-constant cofactor
        assert!(radical_match(&a.trace_form_discriminant().unwrap(), &factors[1..]).is_err());
    }
}

#[test]
fn radical_witnesses() {
    let (_, a) = setup(Example::Ex1);
    let w = find_radical_witness(&a, &poly(&a, "u - v")).unwrap();
    assert_eq!(w.power, 2);
    // (z − εuv)² = uv(u − v)(λv − u)
    assert_eq!(w.value, poly(&a, "u*v*(u - v)*(lambda*v - u)"));
    let (_, b) = setup(Example::Ex2);
    let w = find_radical_witness(&b, &poly(&b, "v")).unwrap();
    assert_eq!(w.element.to_string(), "x");
    assert_eq!(w.value, poly(&b, "v"));
}

#[test]
fn chart_bases() {
    let c = chart(Example::Ex2, ChartName::U1);
    assert_eq!(c.basis_labels(), ["1", "x", "x^2", "y", "z1", "x*z1", "w1", "x*w1", "z1^2"]);
    assert!(c.embedding_consistent());
    assert!(c.algebra.check_associativity());
    let c = chart(Example::Ex1, ChartName::U2);
    assert_eq!(c.basis_labels(), ["1", "x", "y2", "z2"]);
    assert!(c.embedding_consistent());
}

#[test]
fn original_basis_does_not_close_on_the_chart() {
    let (k, a) = setup(Example::Ex1);
    let spec = Example::Ex1.chart(ChartName::U1);
    let basis = BasisChoice::Explicit(["1", "x", "y", "z"].map(String::from).to_vec());
    let err = adjoin_generators(&a, &Chart::new(ChartName::U1, &k), &spec.defs, &basis).unwrap_err();
    assert!(matches!(err, AlgError::ClosureFailure(_)), "{err}");
}

#[test]
fn chart_discriminants_match_chart_divisors() {
    for ex in Example::ALL {
        for c in [ChartName::U1, ChartName::U2] {
            let a = chart(ex, c).algebra;
            let factors: Vec<_> = ex.chart(c).divisor.iter().map(|s| poly(&a, s)).collect();
            let (rest, mult) = strip(a.trace_form_discriminant().unwrap(), &factors);
            assert!(rest.is_constant(), "{ex} {c}: {rest}");
            assert!(mult.iter().all(|&e| e > 0));
        }
    }
}

#[test]
fn quotients_are_the_expected_curves() {
    let cases = [
        (Example::Ex1, ChartName::U1, "v", vec!["1", "z1"]),
        (Example::Ex1, ChartName::U2, "u", vec!["1", "z2"]),
        (Example::Ex2, ChartName::U1, "v", vec!["1", "z1", "z1^2"]),
        (Example::Ex2, ChartName::U2, "u", vec!["1", "z2", "z2^2"]),
    ];
    for (ex, c, killed, labels) in cases {
        let a = chart(ex, c).algebra;
        let spec = ex.chart(c);
        let kill: Vec<_> = spec.ideal.iter().map(|g| a.parse(g).unwrap()).collect();
        let q = quotient_by_generators(&a, &kill).unwrap();
        assert_eq!(q.killed_vars, vec![killed.to_string()]);
        assert_eq!(q.algebra.labels(), labels.as_slice());
        assert!(q.commutative);
        let w = q.algebra.basis(q.algebra.index_of(spec.fiber).unwrap());
        let top = w.pow(ex.degree() as u32);
        assert_eq!(top.as_scalar().unwrap(), Polynomial::parse(q.algebra.ring(), spec.curve).unwrap());
    }
}

#[test]
fn quotient_projection_kills_the_ideal() {
    let a = chart(Example::Ex2, ChartName::U2).algebra;
    let kill: Vec<_> = ["x", "w2"].iter().map(|g| a.parse(g).unwrap()).collect();
    let q = quotient_by_generators(&a, &kill).unwrap();
    // w2² = (1 − η)y and x·(x z2) = ηy put y in the ideal
    for s in ["x", "w2", "y", "x*z2", "w2*z2"] {
        assert!(q.project(&a.parse(s).unwrap()).unwrap().is_zero(), "{s}");
    }
    assert!(!q.project(&a.parse("z2").unwrap()).unwrap().is_zero());
}

#[test]
fn gluing_holds_and_detects_mutation() {
    for ex in Example::ALL {
        let v = check_gluing(&chart(ex, ChartName::U1), &chart(ex, ChartName::U2), &ex.transitions()).unwrap();
        assert!(v.glued, "{ex}");
        assert!(v.witness.is_none());
    }
    let bad = vec![("y2".to_string(), "eta*y1".to_string()), ("z2".to_string(), "eta*z1".to_string())];
    let v = check_gluing(&chart(Example::Ex1, ChartName::U1), &chart(Example::Ex1, ChartName::U2), &bad).unwrap();
    assert!(!v.glued);
    assert_eq!(v.witness.as_deref(), Some("z2"));
}

#[test]
fn bound_lambda_outside_range_is_rejected() {
    for l in ["0", "1"] {
        let desc = cmatlas::scalars::FieldDescriptor::rationals().with_transcendental("lambda").with_binding("lambda", l);
        let desc = desc.with_extension("eps", "eps^2 - 2");
        let k = make_field(&desc).unwrap();
        assert!(matches!(build_example_algebra(Example::Ex1, &k), Err(AlgError::BadSpecialization(_))));
    }
}
