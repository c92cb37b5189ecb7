//! Tame abelian groups and the derived p-completion functors.
//!
//! A tame group is a finite direct sum of atoms drawn from Z, Z/m, Prufer
//! groups, Q, the q-adic integers and Z[1/q]. Every functor here is additive
//! and computed atom by atom.

mod atom;
mod group;
mod hom;
mod parse;
mod tower;

use thiserror::Error;

pub use atom::{factorize, is_prime, valuation, Atom, Prime};
pub use group::{DerivedCompletion, DivisibilityProfile, GradedTame, SesWitness, TameGroup};
pub use hom::{canonical_exists, HomEntry, TameHom};
pub(crate) use parse::parse_group;
pub use tower::{CyclicTower, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cyclic modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("integer overflow")]
    Overflow,
    #[error("limit is not tame: {0}")]
    NotTame(String),
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> TameGroup {
        s.parse().unwrap()
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    /// Brute force over Z/m: elements killed by k.
    fn cyclic_kernel_size(m: u64, k: u64) -> usize {
        (0..m).filter(|x| (x * k).is_multiple_of(m)).count()
    }

    #[test]
    fn torsion_examples() {
        assert!(g("Z").torsion_part(p(2), 3).is_zero());
        assert_eq!(g("Prufer(2)").torsion_part(p(2), 3), g("Z/8"));
        assert_eq!(g("Z/12").torsion_part(p(2), 1), g("Z/2"));
        // cross-check torsion sizes of cyclic groups by enumeration
        for m in 2..40u64 {
            for n in 1..4u32 {
                for q in [2u64, 3, 5] {
                    let t = TameGroup::cyclic(m).unwrap().torsion_part(p(q), n);
                    let brute = cyclic_kernel_size(m, q.pow(n));
                    assert_eq!(t.order().unwrap(), brute.into(), "Z/{m}[{q}^{n}]");
                }
            }
        }
    }

    #[test]
    fn prufer_torsion_by_enumeration() {
        // Prufer(2) modeled as fractions a/2^k mod 1; elements killed by 8 are a/8.
        let killed = (0..64u64).filter(|a| (a * 8) % 64 == 0).count();
        assert_eq!(g("Prufer(2)").torsion_part(p(2), 3).order().unwrap(), killed.into());
    }

    #[test]
    fn quotient_examples() {
        assert!(g("Q").mod_p_power(p(3), 2).is_zero());
        assert_eq!(g("Z").mod_p_power(p(2), 3), g("Z/8"));
        assert_eq!(g("Zp(2)").mod_p_power(p(2), 2), g("Z/4"));
        assert_eq!(g("Z[1/3]").mod_p_power(p(2), 2), g("Z/4"));
        assert!(g("Z[1/2]").mod_p_power(p(2), 2).is_zero());
        assert!(g("Zp(3)").mod_p_power(p(2), 2).is_zero());
    }

    #[test]
    fn tate_module_examples() {
        for q in [2, 3, 5, 7] {
            let prufer = TameGroup::atom(Atom::Prufer(p(q)));
            assert_eq!(
                prufer.tate_module(p(q)).unwrap(),
                TameGroup::atom(Atom::PadicInts(p(q)))
            );
            for k in 1..5 {
                let c = TameGroup::cyclic(q.pow(k)).unwrap();
                assert!(c.tate_module(p(q)).unwrap().is_zero());
            }
        }
        assert_eq!(g("Z + Prufer(2) + Prufer(3)").tate_module(p(2)).unwrap(), g("Zp(2)"));
    }

    #[test]
    fn derived_completion_examples() {
        let dc = g("Q").derived_completion(p(2)).unwrap();
        assert!(dc.l0.is_zero() && dc.l1.is_zero());
        let dc = g("Prufer(3)").derived_completion(p(3)).unwrap();
        assert!(dc.l0.is_zero());
        assert_eq!(dc.l1, g("Zp(3)"));
        let dc = g("Z + Z/12").derived_completion(p(2)).unwrap();
        assert_eq!(dc.l0, g("Zp(2) + Z/4"));
        assert!(dc.l1.is_zero());
    }

    /// Reference values of L_0 / L_1 per atom, written out by hand.
    fn l0_table(a: Atom, q: Prime) -> TameGroup {
        match a {
            Atom::Free => TameGroup::atom(Atom::PadicInts(q)),
            Atom::Cyclic { prime, .. } if prime == q => TameGroup::atom(a),
            Atom::PadicInts(r) if r == q => TameGroup::atom(a),
            Atom::InvertedInt(r) if r != q => TameGroup::atom(Atom::PadicInts(q)),
            _ => TameGroup::zero(),
        }
    }

    fn all_atoms() -> Vec<Atom> {
        let mut v = vec![Atom::Free, Atom::Rationals];
        for q in [2u64, 3, 5] {
            v.push(Atom::Prufer(p(q)));
            v.push(Atom::PadicInts(p(q)));
            v.push(Atom::InvertedInt(p(q)));
            for e in 1..4 {
                v.push(Atom::Cyclic { prime: p(q), exp: e });
            }
        }
        v
    }

    #[test]
    fn derived_completion_matches_atom_table() {
        for q in [2u64, 3, 5] {
            for a in all_atoms() {
                let dc = TameGroup::atom(a).derived_completion(p(q)).unwrap();
                assert_eq!(dc.l0, l0_table(a, p(q)), "L0 of {a} at {q}");
                let l1 = if a == Atom::Prufer(p(q)) {
                    TameGroup::atom(Atom::PadicInts(p(q)))
                } else {
                    TameGroup::zero()
                };
                assert_eq!(dc.l1, l1, "L1 of {a} at {q}");
            }
        }
    }

    #[test]
    fn divisibility_examples() {
        let prof = g("Q").divisibility_profile(p(5)).unwrap();
        assert_eq!(
            prof,
            DivisibilityProfile {
                uniquely_p_divisible: true,
                p_divisible: true,
                bounded_p_divisibility: false,
                p_complete: false
            }
        );
        // multiplication by 2 on Z/3 is a bijection
        assert!(
            (0..3u64)
                .map(|x| (2 * x) % 3)
                .collect::<std::collections::BTreeSet<_>>()
                .len()
                == 3
        );
        let prof = g("Z/3").divisibility_profile(p(2)).unwrap();
        assert!(prof.uniquely_p_divisible && prof.p_divisible);
        // Z/3 is itself 2-divisible and nonzero, so the identity map is a
        // nonzero map from a 2-divisible group.
        assert!(!prof.bounded_p_divisibility);
        assert!(!prof.p_complete);
        let prof = g("Zp(3)").divisibility_profile(p(3)).unwrap();
        assert_eq!(
            prof,
            DivisibilityProfile {
                uniquely_p_divisible: false,
                p_divisible: false,
                bounded_p_divisibility: true,
                p_complete: true
            }
        );
        let prof = g("Z[1/3]").divisibility_profile(p(2)).unwrap();
        assert!(!prof.p_divisible && !prof.p_complete && prof.bounded_p_divisibility);
        assert!(g("Z[1/2]").divisibility_profile(p(2)).unwrap().uniquely_p_divisible);
        let zero = TameGroup::zero().divisibility_profile(p(2)).unwrap();
        assert!(zero.uniquely_p_divisible && zero.bounded_p_divisibility && zero.p_complete);
    }

    #[test]
    fn l1_mod_p_examples() {
        let two = p(2);
        let w = g("Prufer(2)").l1_mod_p_sequence(two).unwrap();
        assert_eq!((w.left, w.middle, w.right), (g("Z/2"), g("Z/2"), g("0")));
        let w = g("Z").l1_mod_p_sequence(two).unwrap();
        assert!(w.left.is_zero() && w.middle.is_zero() && w.right.is_zero());
        let w = g("Z/4").l1_mod_p_sequence(two).unwrap();
        assert_eq!((w.left, w.middle, w.right), (g("0"), g("Z/2"), g("Z/2")));
        for a in all_atoms() {
            for q in [2u64, 3, 5] {
                TameGroup::atom(a).l1_mod_p_sequence(p(q)).unwrap();
            }
        }
    }

    #[test]
    fn bogus_witness_is_rejected() {
        let w = SesWitness {
            left: g("Z/2"),
            middle: g("Z/2"),
            right: g("Z/2"),
        };
        assert!(matches!(w.verify(p(2)), Err(AbelianError::VerificationFailure(_))));
    }

    #[test]
    fn finitely_generated_completion_via_cokernel() {
        use crate::intlinalg::{cokernel_invariants, IntMatrix};
        // Z^2 / <(2, 6), (0, 12)> presented by a matrix
        let m = IntMatrix::from_rows(&[[2, 0], [6, 12], [0, 0]], 2);
        let a = TameGroup::from_invariants(&cokernel_invariants(&m)).unwrap();
        assert_eq!(a, g("Z + Z/2 + Z/3 + Z/4"));
        let dc = a.derived_completion(p(2)).unwrap();
        assert_eq!(dc.l0, g("Zp(2) + Z/2 + Z/4"));
        assert!(dc.l1.is_zero());
    }
}
