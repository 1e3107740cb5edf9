use cmatlas::bundles::*;
use proptest::prelude::*;

fn pt(p: &str) -> PicPoint {
    if p == "inf" {
        PicPoint::infinity()
    } else {
        PicPoint::named(p)
    }
}

fn g(r: u32, d: i64, p: &str) -> AtiyahBundle {
    AtiyahBundle::new(r, d, pt(p)).unwrap()
}

fn one(r: u32, d: i64, p: &str) -> BundleSum {
    BundleSum::single(g(r, d, p))
}

fn lam() -> BundleSum {
    BundleSum::single(AtiyahBundle::trivial())
}

#[test]
fn h0_table() {
    assert_eq!(h0(&one(3, 5, "p1")), 5);
    assert_eq!(h0(&one(2, 0, "inf")), 1);
    assert_eq!(h0(&one(1, -2, "p1")), 0);
    assert_eq!(h0(&one(2, 0, "p1")), 0);
}

#[test]
fn h1_by_riemann_roch() {
    assert_eq!(h1(&one(4, 3, "p1")), 0);
    assert_eq!(h1(&one(2, 0, "inf")), 1);
    assert_eq!(h1(&one(1, -3, "p1")), 3);
}

#[test]
fn generic_global_generation() {
    assert!(is_ggg(&one(2, 1, "p1")));
    assert!(is_ggg(&lam()));
    assert!(!is_ggg(&one(2, 0, "inf")));
    assert!(!is_ggg(&one(1, 0, "p1")));
}

#[test]
fn twist() {
    assert_eq!(twist_i_dual(&one(3, 5, "p1")), one(3, 2, "p1"));
    assert_eq!(twist_i_dual(&lam()), one(1, -1, "inf"));
    assert_eq!(h0(&twist_i_dual(&one(2, 2, "inf"))), 1);
}

#[test]
fn splitting_off_trivial_summands() {
    assert_eq!(split_trivial(&one(2, 3, "p1").with_trivial(2)), (one(2, 3, "p1"), 2));
    assert_eq!(split_trivial(&lam()), (BundleSum::empty(), 1));
    assert_eq!(split_trivial(&one(2, 2, "inf")), (one(2, 2, "inf"), 0));
}

#[test]
fn fullness() {
    assert!(!is_full(&one(1, 1, "inf")));
    assert!(is_full(&one(1, 1, "inf").with_trivial(1)));
    assert!(!is_full(&one(2, 0, "inf").with_trivial(5)));
    assert!(is_full(&BundleSum::empty()));
}

#[test]
fn indecomposability() {
    assert_eq!(is_indecomposable_cm(&one(3, 5, "p1").with_trivial(2)), Ok(true));
    assert_eq!(is_indecomposable_cm(&lam()), Ok(true));
    assert_eq!(is_indecomposable_cm(&one(2, 1, "p1").with_trivial(1)), Ok(false));
}

#[test]
fn cm_ranks() {
    assert_eq!(cm_rank(&one(3, 2, "p1")), Ok(3));
    assert_eq!(cm_rank(&one(2, 2, "inf").with_trivial(1)), Ok(3));
    assert_eq!(cm_rank(&one(2, 5, "p1").with_trivial(3)), Ok(5));
}

fn shape(n: u32) -> (usize, usize, usize) {
    family_counts(&enumerate_cm(n))
}

#[test]
fn enumeration_small_ranks() {
    let e1 = enumerate_cm(1);
    assert_eq!(shape(1), (0, 1, 1));
    assert!(e1.iter().any(|c| c.bundle == lam() && c.parameter_space == ParameterSpace::Point));
    assert!(e1.iter().any(|c| c.bundle == one(1, 1, "p") && c.parameter_space == ParameterSpace::ZMinusInfinity));

    let e3 = enumerate_cm(3);
    assert_eq!(shape(3), (4, 1, 1));
    let z: Vec<String> = e3.iter().filter(|c| c.parameter_space == ParameterSpace::Z).map(|c| c.bundle.to_string()).collect();
    assert_eq!(z, ["G(3,1;p)", "G(3,2;p)", "G(1,3;p) ⊕ 2Λ", "G(2,3;p) ⊕ Λ"]);
    let iso: Vec<_> = e3.iter().filter(|c| c.parameter_space == ParameterSpace::Point).collect();
    assert_eq!(iso[0].bundle, one(2, 2, "inf").with_trivial(1));
    assert!(!iso[0].flagged);

    let e2 = enumerate_cm(2);
    assert_eq!(shape(2), (2, 1, 1));
    let flagged: Vec<_> = e2.iter().filter(|c| c.flagged).collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(flagged[0].bundle, one(1, 1, "inf").with_trivial(1));
}

#[test]
fn enumeration_counts_up_to_twelve() {
    for n in 1..=12u32 {
        let classes = enumerate_cm(n);
        let (z, punctured, isolated) = family_counts(&classes);
        assert_eq!(z, 2 * (n as usize - 1), "rank {n}");
        assert_eq!(punctured, 1);
        assert_eq!(isolated, 1);
        for c in &classes {
            assert_eq!(c.cm_rank, u64::from(n));
            assert_eq!(cm_rank(&c.bundle), Ok(u64::from(n)), "{}", c.bundle);
            assert_eq!(is_indecomposable_cm(&c.bundle), Ok(true), "{}", c.bundle);
            assert_eq!(c.flagged, n == 2 && c.parameter_space == ParameterSpace::Point);
        }
    }
}

#[test]
fn brute_force_small_bounds() {
    let found = brute_force_full(1, 1);
    assert_eq!(found, [lam(), one(1, 1, "q")].into_iter().collect());
    assert!(!brute_force_full(3, 3).contains(&BundleSum::empty()));
}

#[test]
fn brute_force_covers_enumeration() {
    let found = brute_force_full(3, 4);
    for n in 1..=3 {
        for c in enumerate_cm(n) {
            for b in instances(&c) {
                assert!(found.contains(&b), "{b}");
            }
        }
    }
    assert_eq!(found, predicted_full(3, 4));
}

fn arb_point() -> impl Strategy<Value = PicPoint> {
    prop_oneof![Just(PicPoint::infinity()), Just(PicPoint::named("q")), Just(PicPoint::named("s"))]
}

fn arb_bundle() -> impl Strategy<Value = AtiyahBundle> {
    (1u32..6, -8i64..9, arb_point()).prop_map(|(r, d, p)| AtiyahBundle::new(r, d, p).unwrap())
}

fn arb_sum() -> impl Strategy<Value = BundleSum> {
    proptest::collection::vec(arb_bundle(), 0..6).prop_map(BundleSum::new)
}

proptest! {
    #[test]
    fn riemann_roch(f in arb_sum()) {
        prop_assert_eq!(h0(&f) as i64 - h1(&f) as i64, f.degree());
    }

    #[test]
    fn twist_keeps_rank_and_lowers_degree(f in arb_sum()) {
        let t = twist_i_dual(&f);
        prop_assert_eq!(t.rank(), f.rank());
        prop_assert_eq!(t.degree(), f.degree() - f.rank() as i64);
    }

    #[test]
    fn fullness_is_monotone_in_m(gs in proptest::collection::vec(arb_bundle(), 0..4), m in 0usize..6, extra in 0usize..4) {
        let f = BundleSum::new(gs);
        if is_full(&f.with_trivial(m)) {
            prop_assert!(is_full(&f.with_trivial(m + extra)));
        }
    }

    #[test]
    fn indecomposable_for_exactly_one_m(b in arb_bundle()) {
        prop_assume!(!b.is_trivial());
        let g = BundleSum::single(b);
        let hits: Vec<usize> = (0..20).filter(|&m| is_indecomposable_cm(&g.with_trivial(m)) == Ok(true)).collect();
        if is_full(&g.with_trivial(20)) {
            prop_assert_eq!(hits, vec![h0(&twist_i_dual(&g)) as usize]);
        } else {
            prop_assert!(hits.is_empty());
        }
    }

    #[test]
    fn pic_group_axioms(a in arb_point(), b in arb_point(), c in arb_point()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert!(a.add(&a.neg()).is_infinity());
        prop_assert_eq!(a.add(&PicPoint::infinity()), a.clone());
    }
}
