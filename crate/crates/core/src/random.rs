//! Seeded generators for the property sweeps. Every generator takes the RNG
//! explicitly so a single 64-bit seed reproduces a whole suite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::{Atom, HomEntry, Prime, TameGroup, TameHom};
use crate::complexes::FreeComplex;
use crate::intlinalg::IntMatrix;
use crate::presheaf::{FinitePoset, SpectralPresheaf};
use crate::tstructure::FormalSpectrum;
use crate::unstable::FormalSpace;

pub type SuiteRng = ChaCha8Rng;

/// RNG for instance `index` of a suite seeded with `seed`. Instances are
/// independent of each other and of scheduling order.
pub fn instance_rng(seed: u64, index: u64) -> SuiteRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Shape of the random complexes.
#[derive(Clone, Copy, Debug)]
pub struct ComplexParams {
    pub lo: i64,
    pub hi: i64,
    pub max_rank: usize,
    pub max_entry: i64,
}

impl Default for ComplexParams {
    fn default() -> Self {
        ComplexParams {
            lo: -2,
            hi: 4,
            max_rank: 6,
            max_entry: 9,
        }
    }
}

/// A direct sum of spheres and two-term pieces `Z --m--> Z`, with its basis
/// scrambled by random unimodular changes of basis in every degree.
pub fn complex(rng: &mut SuiteRng, params: ComplexParams) -> FreeComplex {
    let span = (params.hi - params.lo + 1) as usize;
    let mut ranks = vec![0usize; span];
    let mut c: Option<FreeComplex> = None;
    let pieces = rng.gen_range(1..=span + 2);
    for _ in 0..pieces {
        let n = rng.gen_range(params.lo..=params.hi);
        let idx = (n - params.lo) as usize;
        let two_term = n < params.hi && rng.gen_bool(0.6);
        let fits = ranks[idx] < params.max_rank && (!two_term || ranks[idx + 1] < params.max_rank);
        if !fits {
            continue;
        }
        let piece = if two_term {
            ranks[idx + 1] += 1;
            FreeComplex::moore(rng.gen_range(1..=params.max_entry), n)
        } else {
            FreeComplex::sphere(n)
        };
        ranks[idx] += 1;
        c = Some(match c {
            None => piece,
            Some(c) => c.direct_sum(&piece),
        });
    }
    let c = c.unwrap_or_else(|| FreeComplex::sphere(params.lo));
    scramble(&c, rng, params.max_entry)
}

/// Applies elementary basis changes `e_i += k e_j` in random degrees, keeping
/// only those that leave every entry within `bound`.
fn scramble(c: &FreeComplex, rng: &mut SuiteRng, bound: i64) -> FreeComplex {
    let bound = BigInt::from(bound);
    let mut diffs: BTreeMap<i64, IntMatrix> = (c.lo() + 1..=c.hi()).map(|n| (n, c.diff(n))).collect();
    let degrees: Vec<i64> = c.degrees().filter(|&n| c.rank(n) >= 2).collect();
    if degrees.is_empty() {
        return c.clone();
    }
    for _ in 0..4 * degrees.len() {
        let n = *degrees.choose(rng).expect("nonempty");
        let r = c.rank(n);
        let i = rng.gen_range(0..r);
        let j = (i + rng.gen_range(1..r)) % r;
        let k = BigInt::from(*[-2i64, -1, 1, 2].choose(rng).expect("nonempty"));
        // New basis P = I + k e_{ij}: d_n -> d_n P^{-1}, d_{n+1} -> P d_{n+1}.
        let outgoing = diffs.get(&n).map(|d| {
            let mut d = d.clone();
            for row in 0..d.rows() {
                let v = &d[(row, j)] - &k * &d[(row, i)];
                d[(row, j)] = v;
            }
            d
        });
        let incoming = diffs.get(&(n + 1)).map(|d| {
            let mut d = d.clone();
            for col in 0..d.cols() {
                let v = &d[(i, col)] + &k * &d[(j, col)];
                d[(i, col)] = v;
            }
            d
        });
        let ok = [&outgoing, &incoming]
            .iter()
            .all(|m| m.as_ref().is_none_or(|m| m.entries().iter().all(|x| x.abs() <= bound)));
        if ok {
            if let Some(d) = outgoing {
                diffs.insert(n, d);
            }
            if let Some(d) = incoming {
                diffs.insert(n + 1, d);
            }
        }
    }
    let ranks = c.degrees().map(|n| c.rank(n)).collect();
    FreeComplex::new(c.lo(), c.hi(), ranks, diffs).expect("basis change preserves d^2 = 0")
}

pub const SUITE_PRIMES: [u64; 3] = [2, 3, 5];

pub fn suite_prime(rng: &mut SuiteRng) -> Prime {
    Prime::new(*SUITE_PRIMES.choose(rng).expect("nonempty")).expect("prime")
}

/// One atom from each of the six families, with primes from the suite set.
pub fn atom(rng: &mut SuiteRng) -> Atom {
    let q = suite_prime(rng);
    match rng.gen_range(0..6) {
        0 => Atom::Free,
        1 => Atom::Cyclic {
            prime: q,
            exp: rng.gen_range(1..=3),
        },
        2 => Atom::Prufer(q),
        3 => Atom::Rationals,
        4 => Atom::PadicInts(q),
        _ => Atom::InvertedInt(q),
    }
}

/// A sum of `0..=max_atoms` random atoms.
pub fn tame_group(rng: &mut SuiteRng, max_atoms: usize) -> TameGroup {
    let k = rng.gen_range(0..=max_atoms);
    TameGroup::new((0..k).map(|_| atom(rng)).collect())
}

/// Three Eilenberg-MacLane factors in distinct degrees `2..=7`.
pub fn formal_space(rng: &mut SuiteRng, max_atoms: usize) -> FormalSpace {
    let degrees = rand::seq::index::sample(rng, 6, 3);
    let mut x = FormalSpace::point();
    for d in degrees.iter() {
        let a = tame_group(rng, max_atoms);
        x = x.product(&FormalSpace::em(a, d as i64 + 2).expect("degree >= 2"));
    }
    x
}

/// A random partial order on `n` elements named `e0, e1, ...`, generated by
/// edges `i -> j` with `i < j`.
pub fn poset(rng: &mut SuiteRng, n: usize) -> FinitePoset {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    let names = (0..n).map(|i| format!("e{i}")).collect();
    FinitePoset::new(names, &edges).expect("edges go upward")
}

/// A degree-0 presheaf built from slots. Each slot lives on a down-closed
/// set and is either a constant atom restricting by the identity, or
/// `Z/q^h(v)` with `h(v) = 1 + #{u < v}`, restricting by the canonical
/// surjections.
pub fn presheaf(rng: &mut SuiteRng, n: usize) -> SpectralPresheaf {
    let poset = poset(rng, n);
    let slots = rng.gen_range(1..=4);
    // per element: list of (slot, atom)
    let mut content: Vec<Vec<(usize, Atom)>> = vec![Vec::new(); n];
    for slot in 0..slots {
        let top = rng.gen_range(0..n);
        let quotient = rng.gen_bool(0.4);
        let constant = atom(rng);
        let q = suite_prime(rng);
        for (v, list) in content.iter_mut().enumerate() {
            if !poset.leq(v, top) {
                continue;
            }
            let a = if quotient {
                let below = (0..n).filter(|&u| u != v && poset.leq(u, v)).count() as u32;
                Atom::Cyclic {
                    prime: q,
                    exp: 1 + below,
                }
            } else {
                constant
            };
            list.push((slot, a));
        }
    }
    let placed: Vec<(TameGroup, Vec<usize>)> = content
        .iter()
        .map(|list| TameGroup::with_positions(list.iter().map(|(_, a)| *a).collect()))
        .collect();
    let sections = placed
        .iter()
        .map(|(g, _)| FormalSpectrum::concentrated(g.clone(), 0))
        .collect();
    let mut restrictions = BTreeMap::new();
    for (v, u) in poset.strict_pairs() {
        let entries = content[v]
            .iter()
            .enumerate()
            .filter_map(|(i, (slot, _))| {
                let j = content[u].iter().position(|(s, _)| s == slot)?;
                Some(HomEntry {
                    source: placed[v].1[i],
                    target: placed[u].1[j],
                    scale: 1,
                })
            })
            .collect();
        let h = TameHom::new(placed[v].0.clone(), placed[u].0.clone(), entries).expect("canonical maps");
        restrictions.insert((v, u), [(0, h)].into_iter().collect());
    }
    SpectralPresheaf::new(poset, sections, restrictions).expect("slot presheaves are functorial")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexes_respect_bounds() {
        let params = ComplexParams::default();
        for i in 0..100 {
            let mut rng = instance_rng(7, i);
            let c = complex(&mut rng, params);
            assert!(c.lo() >= params.lo && c.hi() <= params.hi);
            assert!(c.degrees().all(|n| c.rank(n) <= params.max_rank));
            assert!(c.max_abs_entry() <= BigInt::from(params.max_entry));
        }
    }

    #[test]
    fn seeding_is_reproducible() {
        let a = complex(&mut instance_rng(42, 3), ComplexParams::default());
        let b = complex(&mut instance_rng(42, 3), ComplexParams::default());
        assert_eq!(a, b);
        let g = tame_group(&mut instance_rng(1, 1), 5);
        assert_eq!(g, tame_group(&mut instance_rng(1, 1), 5));
    }

    #[test]
    fn presheaves_are_valid() {
        for i in 0..50 {
            let f = presheaf(&mut instance_rng(8, i), 4);
            assert_eq!(f.poset().len(), 4);
        }
    }
}
