use super::*;
use crate::random::{instance_rng, presheaf};

fn p(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn g(s: &str) -> TameGroup {
    s.parse().unwrap()
}

fn sheaf(s: &str) -> SpectralPresheaf {
    s.parse().unwrap()
}

#[test]
fn poset_axioms() {
    let names = |k: usize| (0..k).map(|i| format!("x{i}")).collect::<Vec<_>>();
    let chain = FinitePoset::new(names(3), &[(0, 1), (1, 2)]).unwrap();
    assert!(chain.leq(0, 2) && !chain.leq(2, 0));
    assert!(matches!(
        FinitePoset::new(names(2), &[(0, 1), (1, 0)]),
        Err(PresheafError::NotAntisymmetric(..))
    ));
    assert!(matches!(
        FinitePoset::new(vec!["a".into(), "a".into()], &[]),
        Err(PresheafError::DuplicateElement(_))
    ));
    // subsets of a 3-chain that are down-closed: {}, {0}, {0,1}, {0,1,2}
    assert_eq!(chain.down_closed_subsets().len(), 4);
}

#[test]
fn constant_presheaf_completes_to_constant() {
    let f = sheaf("elements a b\nleq a b\nsection a = 0: Z\nsection b = 0: Z\nrestrict b a 0: 0->0");
    let c = complete_sectionwise(&f, p(2)).unwrap();
    assert_eq!(c.section(0).pi(0), g("Zp(2)"));
    assert_eq!(c.section(1).pi(0), g("Zp(2)"));
    assert_eq!(c.restriction(1, 0, 0), TameHom::identity(&g("Zp(2)")));
}

#[test]
fn discrete_poset_with_prufer() {
    let f = sheaf("elements a b\nsection a = 0: Z\nsection b = 0: Prufer(2)");
    let c = complete_sectionwise(&f, p(2)).unwrap();
    assert_eq!(c.section(0).to_string(), "0: Zp(2)");
    assert_eq!(c.section(1).to_string(), "1: Zp(2)");
}

#[test]
fn zero_presheaf() {
    let f = sheaf("elements a b c\nleq a b");
    let c = complete_sectionwise(&f, p(3)).unwrap();
    assert!(c.sections().iter().all(|s| s.homotopy.is_zero()));
    assert!(product_preservation_check(&f, p(3)).unwrap());
}

#[test]
fn li_examples() {
    let constant = sheaf("elements a b\nleq a b\nsection a = 0: Z/4 + Prufer(2)\nsection b = 0: Z/4 + Prufer(2)\nrestrict b a 0: 0->0, 1->1");
    for i in [0, 1] {
        assert!(li_sectionwise_check(&constant, p(2), i).unwrap());
    }
    let surjection = sheaf("elements u v\nleq u v\nsection v = 0: Z/4\nsection u = 0: Z/2\nrestrict v u 0: 0->0");
    assert!(li_sectionwise_check(&surjection, p(2), 0).unwrap());
    let c = complete_sectionwise(&surjection, p(2)).unwrap();
    assert_eq!(c.restriction(1, 0, 0).to_string(), "0->0*1");
    let shifted = sheaf("elements a\nsection a = 1: Z");
    assert!(matches!(
        li_sectionwise_check(&shifted, p(2), 0),
        Err(PresheafError::NotHeartValued(_))
    ));
}

#[test]
fn product_examples() {
    let f = sheaf("elements a\nsection a = 0: Prufer(2) + Z");
    assert!(product_preservation_check(&f, p(2)).unwrap());
}

#[test]
fn parse_errors() {
    assert!(matches!(
        "elements a b\nleq a c".parse::<SpectralPresheaf>(),
        Err(PresheafError::UnknownElement(_))
    ));
    assert!(matches!(
        "elements a b\nleq a b\nsection a = 0: Z\nsection b = 0: Z\nrestrict a b 0: 0->0".parse::<SpectralPresheaf>(),
        Err(PresheafError::NotBelow { .. })
    ));
    assert!(matches!(
        "elements a b\nleq a b\nsection a = 0: Z/2\nsection b = 0: Prufer(2)\nrestrict b a 0: 0->0"
            .parse::<SpectralPresheaf>(),
        Err(PresheafError::BadRestriction { .. })
    ));
    let e = "elements a\nsection a = 0: Zp(4)"
        .parse::<SpectralPresheaf>()
        .unwrap_err();
    let PresheafError::Parse(e) = e else { panic!("{e:?}") };
    // offset of the 4 in the whole input
    assert_eq!(e.position, 29);
    // a -> b -> c composite differs from the declared a -> c
    let bad = "elements a b c\nleq a b\nleq b c\nsection a = 0: Z\nsection b = 0: Z\nsection c = 0: Z\nrestrict c b 0: 0->0\nrestrict b a 0: 0->0\nrestrict c a 0: 0->0*2";
    assert!(matches!(
        bad.parse::<SpectralPresheaf>(),
        Err(PresheafError::NotFunctorial(_))
    ));
}

#[test]
fn random_presheaves() {
    for i in 0..40 {
        let f = presheaf(&mut instance_rng(31, i), 4);
        assert_eq!(f.to_string().parse::<SpectralPresheaf>().unwrap(), f);
        for q in [2, 3, 5] {
            let q = p(q);
            let c = complete_sectionwise(&f, q).unwrap();
            for s in f.poset().down_closed_subsets() {
                let lhs = complete_sectionwise(&f.restrict_to(&s).unwrap(), q).unwrap();
                let rhs = c.restrict_to(&s).unwrap();
                assert_eq!(lhs, rhs);
            }
            for i in [0, 1] {
                assert!(li_sectionwise_check(&f, q, i).unwrap());
            }
            // completed heart sections are p-complete
            for s in c.sections() {
                for (_, a) in s.homotopy.iter() {
                    assert!(a.divisibility_profile(q).unwrap().p_complete);
                }
            }
        }
        assert!(product_preservation_check(&f, p(2)).unwrap());
    }
}

#[test]
fn sectionwise_p_equivalence_gives_equal_completions() {
    // adding a uniquely 2-divisible summand everywhere is a sectionwise
    // 2-equivalence
    let f = sheaf("elements a b\nleq a b\nsection a = 0: Z/4\nsection b = 0: Z/8\nrestrict b a 0: 0->0");
    let f2 = sheaf("elements a b\nleq a b\nsection a = 0: Z/4 + Q\nsection b = 0: Z/8 + Z/3\nrestrict b a 0: 1->0");
    assert_eq!(
        complete_sectionwise(&f, p(2)).unwrap(),
        complete_sectionwise(&f2, p(2)).unwrap()
    );
}
