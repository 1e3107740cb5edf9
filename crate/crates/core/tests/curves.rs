use std::sync::Arc;

use cmatlas::blowup::{adjoin_generators, Chart, ChartName};
use cmatlas::catalog::{build_example_algebra, Example};
use cmatlas::excurve::*;
use cmatlas::polyring::{PolyRing, Polynomial};
use cmatlas::scalars::{make_field, FieldDescriptor};
use cmatlas::structalg::quotient_by_generators;

fn quotient_curve(ex: Example, c: ChartName) -> PlaneCurveChart {
    let k = make_field(&ex.descriptor()).unwrap();
    let a = build_example_algebra(ex, &k).unwrap();
    let spec = ex.chart(c);
    let ca = adjoin_generators(&a, &Chart::new(c, &k), &spec.defs, &spec.basis).unwrap();
    let kill: Vec<_> = spec.ideal.iter().map(|g| ca.algebra.parse(g).unwrap()).collect();
    curve_from_quotient(&quotient_by_generators(&ca.algebra, &kill).unwrap().algebra).unwrap()
}

/// `Q(λ)` with λ optionally bound; no algebraic extension needed for curves.
fn lambda_ring(lambda: Option<&str>, vars: &[&str]) -> Arc<PolyRing> {
    let mut d = FieldDescriptor::rationals().with_transcendental("lambda");
    if let Some(l) = lambda {
        d = d.with_binding("lambda", l);
    }
    PolyRing::new(&make_field(&d).unwrap(), vars)
}

fn curve(ring: &Arc<PolyRing>, var: &str, n: u32, c: &str) -> PlaneCurveChart {
    PlaneCurveChart::new(var, "z", n, Polynomial::parse(ring, c).unwrap()).unwrap()
}

fn lines(ring: &Arc<PolyRing>, fs: &[&str]) -> Vec<Polynomial> {
    fs.iter().map(|s| Polynomial::parse(ring, s).unwrap()).collect()
}

#[test]
fn quotient_curves_have_the_listed_equations() {
    let c = quotient_curve(Example::Ex1, ChartName::U1);
    assert_eq!((c.variable.as_str(), c.fiber.as_str(), c.n), ("xi", "z1", 2));
    assert_eq!(c.c, Polynomial::parse(c.c.ring(), "xi*(xi - 1)*(lambda - xi)").unwrap());
    let c = quotient_curve(Example::Ex2, ChartName::U2);
    assert_eq!((c.variable.as_str(), c.fiber.as_str(), c.n), ("eta", "z2", 3));
    assert_eq!(c.c, Polynomial::parse(c.c.ring(), "eta*(1 - eta)").unwrap());
}

#[test]
fn full_chart_algebra_is_not_commutative() {
    let k = make_field(&Example::Ex1.descriptor()).unwrap();
    let a = build_example_algebra(Example::Ex1, &k).unwrap();
    let spec = Example::Ex1.chart(ChartName::U1);
    let ca = adjoin_generators(&a, &Chart::new(ChartName::U1, &k), &spec.defs, &spec.basis).unwrap();
    assert!(matches!(curve_from_quotient(&ca.algebra), Err(CurveError::NotCommutative)));
}

#[test]
fn smoothness_and_genus_of_the_example_curves() {
    for ex in Example::ALL {
        let gs: Vec<u32> = [ChartName::U1, ChartName::U2]
            .into_iter()
            .map(|c| {
                let cv = quotient_curve(ex, c);
                assert!(check_smooth(&cv).unwrap(), "{ex} {c}");
                genus(&cv).unwrap()
            })
            .collect();
        assert_eq!(gs, vec![1, 1], "{ex}");
    }
}

#[test]
fn ex1_curve_degenerates_at_excluded_lambda() {
    let sym = lambda_ring(None, &["xi"]);
    assert!(check_smooth(&curve(&sym, "xi", 2, "xi*(xi - 1)*(lambda - xi)")).unwrap());
    for l in ["0", "1"] {
        let r = lambda_ring(Some(l), &["xi"]);
        let c = curve(&r, "xi", 2, "xi*(xi - 1)*(lambda - xi)");
        assert!(!check_smooth(&c).unwrap(), "lambda = {l}");
        assert!(matches!(genus(&c), Err(CurveError::UnsupportedShape(_))));
    }
    // λ ↦ 1 gives gcd(c, c′) = ξ − 1
    let r = lambda_ring(Some("1"), &["xi"]);
    let c = Polynomial::parse(&r, "xi*(xi - 1)*(1 - xi)").unwrap();
    let g = cmatlas::polyring::gcd_univariate(&c, &c.derivative(0)).unwrap();
    assert_eq!(g, Polynomial::parse(&r, "xi - 1").unwrap());
}

#[test]
fn ex1_curve_stays_smooth_at_other_lambda() {
    for l in ["-1", "2", "1/2", "7"] {
        let r = lambda_ring(Some(l), &["xi"]);
        let c = curve(&r, "xi", 2, "xi*(xi - 1)*(lambda - xi)");
        assert!(check_smooth(&c).unwrap(), "lambda = {l}");
        assert_eq!(genus(&c).unwrap(), 1);
    }
}

#[test]
fn genus_by_riemann_hurwitz() {
    let r = lambda_ring(None, &["t"]);
    // (n, c, g): 2g − 2 = −2n + B(n − 1), B = deg c + [n ∤ deg c]
    for (n, c, g) in [(2, "t", 0), (2, "t*(t - 1)*(t + 1)", 1), (3, "t^2 - t", 1), (2, "t^5 - t", 2), (3, "t", 0), (2, "t^4 - 1", 1)] {
        assert_eq!(genus(&curve(&r, "t", n, c)).unwrap(), g, "z^{n} = {c}");
    }
}

#[test]
fn genus_agrees_across_charts() {
    let a = quotient_curve(Example::Ex1, ChartName::U1);
    let b = quotient_curve(Example::Ex1, ChartName::U2);
    assert_eq!(genus(&a).unwrap(), genus(&b).unwrap());
}

#[test]
fn normal_crossings_of_ex1_divisors() {
    let u1 = ["xi", "v", "xi - 1", "xi - lambda"];
    let u2 = ["u", "eta", "1 - eta", "1 - lambda*eta"];
    assert!(check_normal_crossings(&lines(&lambda_ring(None, &["xi", "v"]), &u1)).unwrap());
    assert!(check_normal_crossings(&lines(&lambda_ring(None, &["u", "eta"]), &u2)).unwrap());
    for l in ["0", "1"] {
        assert!(!check_normal_crossings(&lines(&lambda_ring(Some(l), &["xi", "v"]), &u1)).unwrap(), "U1, lambda = {l}");
        assert!(!check_normal_crossings(&lines(&lambda_ring(Some(l), &["u", "eta"]), &u2)).unwrap(), "U2, lambda = {l}");
    }
}

#[test]
fn small_arrangements() {
    let r = lambda_ring(Some("0"), &["xi", "v"]);
    assert!(!check_normal_crossings(&lines(&r, &["xi", "xi - lambda"])).unwrap());
    let r = lambda_ring(None, &["xi", "v"]);
    assert!(!check_normal_crossings(&lines(&r, &["v", "xi", "xi - v"])).unwrap());
    assert!(check_normal_crossings(&lines(&r, &["v", "xi", "xi - v - 1"])).unwrap());
    assert!(!check_normal_crossings(&lines(&r, &["xi - 1", "2*xi - 2"])).unwrap());
}

#[test]
fn tameness() {
    let t = |s: &str| classify_tameness(&s.parse().unwrap());
    assert_eq!(t("smooth-elliptic"), Tameness::Tame);
    assert_eq!(t("kodaira:3"), Tameness::Tame);
    assert_eq!(t("other:cuspidal cubic"), Tameness::Wild);
}
