use super::*;
use crate::random::{complex, instance_rng, ComplexParams};
use proptest::prelude::*;

fn p(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn g(s: &str) -> TameGroup {
    s.parse().unwrap()
}

fn scalar_map(k: i64) -> ChainMap {
    ChainMap::scalar(&FreeComplex::sphere(0), &BigInt::from(k))
}

/// Enumerates `(Z/q)^r`.
fn vectors(r: usize, q: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn apply_mod(m: &IntMatrix, v: &[i64], q: i64) -> Vec<i64> {
    (0..m.rows())
        .map(|i| {
            let s: i64 = (0..m.cols()).map(|j| i64::try_from(&m[(i, j)]).unwrap() * v[j]).sum();
            s.rem_euclid(q)
        })
        .collect()
}

/// `|H_n(C; Z/q)|` by enumerating cycles and boundaries mod q.
fn brute_mod_q_homology_order(c: &FreeComplex, n: i64, q: i64) -> usize {
    let zero = vec![0; c.rank(n - 1)];
    let cycles = vectors(c.rank(n), q)
        .into_iter()
        .filter(|v| apply_mod(&c.diff(n), v, q) == zero)
        .count();
    let boundaries: std::collections::BTreeSet<Vec<i64>> = vectors(c.rank(n + 1), q)
        .into_iter()
        .map(|v| apply_mod(&c.diff(n + 1), &v, q))
        .collect();
    cycles / boundaries.len()
}

/// Order of `A/q (+) A'[q]` from invariants, i.e. the universal coefficient side.
fn uct_order(h: &CokernelInvariants, below: &CokernelInvariants, q: i64) -> usize {
    let qb = BigInt::from(q);
    let gcd = |t: &BigInt| {
        use num_integer::Integer;
        usize::try_from(t.gcd(&qb)).unwrap()
    };
    let quotient: usize = (q as usize).pow(h.free_rank as u32) * h.torsion.iter().map(gcd).product::<usize>();
    let torsion: usize = below.torsion.iter().map(gcd).product();
    quotient * torsion
}

#[test]
fn sphere_and_moore_homology() {
    assert_eq!(FreeComplex::sphere(0).homology(0).unwrap(), g("Z"));
    for m in 2..10 {
        let c = FreeComplex::moore(m, 0);
        assert_eq!(c.homology(0).unwrap(), TameGroup::cyclic(m as u64).unwrap());
        assert!(c.homology(1).unwrap().is_zero());
    }
}

#[test]
fn cone_examples() {
    assert!(ChainMap::identity(&FreeComplex::sphere(0)).cone().is_acyclic());
    let cone = scalar_map(3).cone();
    assert_eq!(cone.homology(0).unwrap(), g("Z/3"));
    assert!(cone.homology(1).unwrap().is_zero());
    // zero map S^0 -> S^2: cone is S^2 (+) S^1
    let zero = ChainMap::zero(&FreeComplex::sphere(0), &FreeComplex::sphere(2));
    let h = zero.cone().graded_homology().unwrap();
    assert_eq!(h.to_string(), "1: Z; 2: Z");
    // E//0 is E (+) E[1]
    let c = FreeComplex::moore(4, 0).cone_mult(&BigInt::from(0));
    assert_eq!(c.graded_homology().unwrap().to_string(), "0: Z/4; 1: Z/4");
}

#[test]
fn p_equivalence_examples() {
    assert!(scalar_map(3).is_p_equivalence(p(2)));
    assert!(!scalar_map(3).is_p_equivalence(p(3)));
    for q in [2, 3, 5, 7] {
        assert!(ChainMap::identity(&FreeComplex::moore(6, 1)).is_p_equivalence(p(q)));
    }
    // a p-equivalence is exactly a map whose cone completes to zero
    for k in 1..30 {
        for q in [2, 3, 5] {
            let f = scalar_map(k);
            assert_eq!(f.is_p_equivalence(p(q)), f.cone().complete(p(q)).unwrap().is_zero());
        }
    }
}

#[test]
fn completion_examples() {
    let s = FreeComplex::sphere(0).complete(p(2)).unwrap();
    assert_eq!(s.to_string(), "0: Zp(2)");
    assert!(FreeComplex::moore(3, 0).complete(p(2)).unwrap().is_zero());
    assert_eq!(FreeComplex::moore(12, 0).complete(p(2)).unwrap().to_string(), "0: Z/4");
}

#[test]
fn brute_force_homology_small_complexes() {
    let params = ComplexParams {
        lo: 0,
        hi: 2,
        max_rank: 3,
        max_entry: 3,
    };
    for i in 0..60 {
        let c = complex(&mut instance_rng(11, i), params);
        for n in c.lo()..=c.hi() {
            for q in [2, 3, 4, 5, 6] {
                let brute = brute_mod_q_homology_order(&c, n, q);
                let expected = uct_order(&c.homology_invariants(n), &c.homology_invariants(n - 1), q);
                assert_eq!(brute, expected, "complex {c}, degree {n}, q = {q}");
            }
        }
    }
}

#[test]
fn completion_matches_tower_oracle() {
    for i in 0..25 {
        let c = complex(&mut instance_rng(5, i), ComplexParams::default());
        for q in [2, 3, 5] {
            let a = c.complete(p(q)).unwrap();
            let b = tower_oracle(&c, p(q), DEFAULT_STAGES).unwrap();
            assert_eq!(a, b, "complex {c} at {q}");
        }
    }
}

#[test]
fn three_zero_conditions_agree() {
    for i in 0..40 {
        let c = complex(&mut instance_rng(9, i), ComplexParams::default());
        for q in [2, 3, 5] {
            let zero_completion = c.complete(p(q)).unwrap().is_zero();
            let mod_p_acyclic = c.cone_mult(&BigInt::from(q)).is_acyclic();
            let upd = c.degrees().all(|n| {
                c.homology(n)
                    .unwrap()
                    .divisibility_profile(p(q))
                    .unwrap()
                    .uniquely_p_divisible
            });
            assert_eq!(zero_completion, mod_p_acyclic);
            assert_eq!(mod_p_acyclic, upd);
        }
    }
}

#[test]
fn truncation_bounds() {
    for i in 0..40 {
        let c = complex(&mut instance_rng(13, i), ComplexParams::default());
        for q in [2, 3, 5] {
            let comp = c.complete(p(q)).unwrap();
            if let Some((bottom, top)) = comp.support() {
                assert!(top <= c.hi() + 1 && bottom >= c.lo());
            }
        }
    }
}

#[test]
fn mod_p_power_homology_orders() {
    for i in 0..30 {
        let c = complex(&mut instance_rng(17, i), ComplexParams::default());
        for (q, k) in [(2i64, 1u32), (2, 3), (3, 2), (5, 1)] {
            let qk = q.pow(k);
            let cone = c.cone_mult(&BigInt::from(qk));
            for n in c.lo()..=c.hi() + 1 {
                let h = cone.homology_invariants(n);
                assert_eq!(h.free_rank, 0);
                let expected = uct_order(&c.homology_invariants(n), &c.homology_invariants(n - 1), qk);
                assert_eq!(h.order().unwrap(), BigInt::from(expected));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_sum_adds_homology(a in any::<u64>(), b in any::<u64>()) {
        let params = ComplexParams { lo: -1, hi: 2, max_rank: 3, max_entry: 6 };
        let x = complex(&mut instance_rng(a, 0), params);
        let y = complex(&mut instance_rng(b, 0), params);
        let sum = x.direct_sum(&y).graded_homology().unwrap();
        let expected = x.graded_homology().unwrap().direct_sum(&y.graded_homology().unwrap());
        prop_assert_eq!(sum, expected);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let c = complex(&mut instance_rng(seed, 0), ComplexParams::default());
        let back: FreeComplex = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }
}
