use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::atom::{Atom, Prime};
use super::tower::{CyclicTower, Transition};
use super::AbelianError;
use crate::intlinalg::CokernelInvariants;

/// A finite direct sum of atoms, kept sorted in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameGroup {
    atoms: Vec<Atom>,
}

impl TameGroup {
    pub fn zero() -> Self {
        TameGroup { atoms: Vec::new() }
    }

    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort();
        TameGroup { atoms }
    }

    /// Normalizes `atoms` and reports where each input atom ended up.
    pub fn with_positions(atoms: Vec<Atom>) -> (Self, Vec<usize>) {
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by_key(|&i| atoms[i]);
        let mut positions = vec![0; atoms.len()];
        for (pos, &i) in order.iter().enumerate() {
            positions[i] = pos;
        }
        let sorted = order.iter().map(|&i| atoms[i]).collect();
        (TameGroup { atoms: sorted }, positions)
    }

    pub fn atom(a: Atom) -> Self {
        TameGroup { atoms: vec![a] }
    }

    pub fn free(rank: usize) -> Self {
        TameGroup {
            atoms: vec![Atom::Free; rank],
        }
    }

    pub fn cyclic(m: u64) -> Result<Self, AbelianError> {
        Ok(TameGroup::new(Atom::cyclic(m)?))
    }

    /// The finitely generated group with the given cokernel invariants.
    pub fn from_invariants(inv: &CokernelInvariants) -> Result<Self, AbelianError> {
        let mut atoms = vec![Atom::Free; inv.free_rank];
        for t in &inv.torsion {
            let m = t.to_u64().ok_or(AbelianError::Overflow)?;
            atoms.extend(Atom::cyclic(m)?);
        }
        Ok(TameGroup::new(atoms))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn direct_sum(&self, other: &TameGroup) -> TameGroup {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        TameGroup::new(atoms)
    }

    /// Multiset difference; `None` if `other` is not a summand of `self`.
    pub fn remove_summand(&self, other: &TameGroup) -> Option<TameGroup> {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            let i = atoms.iter().position(|b| b == a)?;
            atoms.remove(i);
        }
        Some(TameGroup { atoms })
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Free | Atom::Cyclic { .. }))
    }

    pub fn is_finite(&self) -> bool {
        self.atoms.iter().all(Atom::is_finite)
    }

    /// Order as an exact integer, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.atoms.iter().map(|a| a.order().map(BigInt::from)).product()
    }

    /// Number of `Z_p` summands.
    pub fn padic_rank(&self, p: Prime) -> usize {
        self.atoms.iter().filter(|a| **a == Atom::PadicInts(p)).count()
    }

    /// True when every summand is `Z_p` or a finite p-group.
    pub fn is_padic_module(&self, p: Prime) -> bool {
        self.atoms.iter().all(|a| match *a {
            Atom::PadicInts(q) => q == p,
            Atom::Cyclic { prime, .. } => prime == p,
            _ => false,
        })
    }

    /// True when the group is a finite free `Z_p`-module.
    pub fn is_free_padic(&self, p: Prime) -> bool {
        self.atoms.iter().all(|a| *a == Atom::PadicInts(p))
    }

    pub fn max_p_exponent(&self, p: Prime) -> u32 {
        self.atoms
            .iter()
            .filter_map(|a| match *a {
                Atom::Cyclic { prime, exp } if prime == p => Some(exp),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// A[p^n], computed atom-wise.
    pub fn torsion_part(&self, p: Prime, n: u32) -> TameGroup {
        assert!(n >= 1, "torsion_part needs n >= 1");
        TameGroup::new(self.atoms.iter().filter_map(|a| atom_torsion(*a, p, n)).collect())
    }

    /// A/p^n, computed atom-wise.
    pub fn mod_p_power(&self, p: Prime, n: u32) -> TameGroup {
        assert!(n >= 1, "mod_p_power needs n >= 1");
        TameGroup::new(self.atoms.iter().filter_map(|a| atom_quotient(*a, p, n)).collect())
    }

    /// lim_n A[p^n] along multiplication by p.
    pub fn tate_module(&self, p: Prime) -> Result<TameGroup, AbelianError> {
        let mut out = Vec::new();
        for a in &self.atoms {
            out.extend(l1_atom(*a, p)?);
        }
        Ok(TameGroup::new(out))
    }

    /// (L_0 A, L_1 A).
    pub fn derived_completion(&self, p: Prime) -> Result<DerivedCompletion, AbelianError> {
        let mut l0 = Vec::new();
        for a in &self.atoms {
            l0.extend(l0_atom(*a, p)?);
        }
        Ok(DerivedCompletion {
            l0: TameGroup::new(l0),
            l1: self.tate_module(p)?,
        })
    }

    pub fn divisibility_profile(&self, p: Prime) -> Result<DivisibilityProfile, AbelianError> {
        let kernel_zero = self.torsion_part(p, 1).is_zero();
        let cokernel_zero = self.mod_p_power(p, 1).is_zero();
        let completion = self.derived_completion(p)?;
        Ok(DivisibilityProfile {
            uniquely_p_divisible: kernel_zero && cokernel_zero,
            p_divisible: cokernel_zero,
            bounded_p_divisibility: self.atoms.iter().all(|a| a.has_bounded_p_divisibility(p)),
            p_complete: completion.l0 == *self && completion.l1.is_zero(),
        })
    }

    /// The sequence 0 -> (L_1 A)/p -> A[p] -> (L_0 A)[p] -> 0, with its
    /// bookkeeping verified.
    pub fn l1_mod_p_sequence(&self, p: Prime) -> Result<SesWitness, AbelianError> {
        let dc = self.derived_completion(p)?;
        let w = SesWitness {
            left: dc.l1.mod_p_power(p, 1),
            middle: self.torsion_part(p, 1),
            right: dc.l0.torsion_part(p, 1),
        };
        w.verify(p)?;
        Ok(w)
    }

    /// Groups repeated atoms as `(atom, multiplicity)`.
    pub fn runs(&self) -> Vec<(Atom, usize)> {
        let mut out: Vec<(Atom, usize)> = Vec::new();
        for a in &self.atoms {
            match out.last_mut() {
                Some((b, k)) if b == a => *k += 1,
                _ => out.push((*a, 1)),
            }
        }
        out
    }
}

/// Rendered in the text grammar, so that output re-parses to an equal value.
impl fmt::Display for TameGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, k)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if k == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{k}")?;
            }
        }
        Ok(())
    }
}

impl FromIterator<Atom> for TameGroup {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        TameGroup::new(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedCompletion {
    pub l0: TameGroup,
    pub l1: TameGroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityProfile {
    pub uniquely_p_divisible: bool,
    pub p_divisible: bool,
    pub bounded_p_divisibility: bool,
    pub p_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SesWitness {
    pub left: TameGroup,
    pub middle: TameGroup,
    pub right: TameGroup,
}

impl SesWitness {
    /// Orders multiply and elementary p-ranks add. Both ends and the middle
    /// are finite for every tame input; anything else is reported.
    pub fn verify(&self, p: Prime) -> Result<(), AbelianError> {
        let fail = |why: &str| AbelianError::VerificationFailure(format!("{why} in {self:?}"));
        let (Some(l), Some(m), Some(r)) = (self.left.order(), self.middle.order(), self.right.order()) else {
            return Err(fail("infinite term"));
        };
        if l * r != m {
            return Err(fail("orders do not multiply"));
        }
        let p_rank = |g: &TameGroup| g.torsion_part(p, 1).atom_count();
        if p_rank(&self.left) + p_rank(&self.right) != p_rank(&self.middle) {
            return Err(fail("p-ranks do not add"));
        }
        let elementary = |g: &TameGroup| g.torsion_part(p, 1) == *g;
        if !(elementary(&self.left) && elementary(&self.middle) && elementary(&self.right)) {
            return Err(fail("terms not killed by p"));
        }
        Ok(())
    }
}

fn atom_torsion(a: Atom, p: Prime, n: u32) -> Option<Atom> {
    match a {
        Atom::Cyclic { prime, exp } if prime == p => Atom::prime_power_cyclic(p, exp.min(n)),
        Atom::Prufer(q) if q == p => Atom::prime_power_cyclic(p, n),
        _ => None,
    }
}

fn atom_quotient(a: Atom, p: Prime, n: u32) -> Option<Atom> {
    match a {
        Atom::Free => Atom::prime_power_cyclic(p, n),
        Atom::Cyclic { prime, exp } if prime == p => Atom::prime_power_cyclic(p, exp.min(n)),
        Atom::PadicInts(q) if q == p => Atom::prime_power_cyclic(p, n),
        Atom::InvertedInt(q) if q != p => Atom::prime_power_cyclic(p, n),
        _ => None,
    }
}

fn stage_exponent(g: Option<Atom>) -> u32 {
    match g {
        None => 0,
        Some(Atom::Cyclic { exp, .. }) => exp,
        Some(other) => unreachable!("tower stage {other} is not a cyclic p-group"),
    }
}

fn tower_length(a: Atom, p: Prime) -> usize {
    let e = match a {
        Atom::Cyclic { prime, exp } if prime == p => exp as usize,
        _ => 0,
    };
    2 * (e + 3) + 2
}

/// L_0 of an atom: the limit of the projection tower A/p^n.
pub(crate) fn l0_atom(a: Atom, p: Prime) -> Result<Option<Atom>, AbelianError> {
    let len = tower_length(a, p);
    CyclicTower {
        prime: p,
        exponents: (1..=len as u32)
            .map(|n| stage_exponent(atom_quotient(a, p, n)))
            .collect(),
        transition: Transition::Projection,
    }
    .limit()
}

/// L_1 of an atom: the limit of the torsion tower A[p^n] along multiplication by p.
pub(crate) fn l1_atom(a: Atom, p: Prime) -> Result<Option<Atom>, AbelianError> {
    let len = tower_length(a, p);
    CyclicTower {
        prime: p,
        exponents: (1..=len as u32)
            .map(|n| stage_exponent(atom_torsion(a, p, n)))
            .collect(),
        transition: Transition::MultiplyByP,
    }
    .limit()
}

/// Finitely supported graded tame group; zero degrees are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedTame {
    degrees: BTreeMap<i64, TameGroup>,
}

impl GradedTame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, n: i64, g: TameGroup) {
        if g.is_zero() {
            self.degrees.remove(&n);
        } else {
            self.degrees.insert(n, g);
        }
    }

    pub fn with(mut self, n: i64, g: TameGroup) -> Self {
        self.set(n, g);
        self
    }

    pub fn get(&self, n: i64) -> TameGroup {
        self.degrees.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &TameGroup)> {
        self.degrees.iter().map(|(n, g)| (*n, g))
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Lowest and highest nonzero degrees.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.degrees.keys().next()?;
        let hi = *self.degrees.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn direct_sum(&self, other: &GradedTame) -> GradedTame {
        let mut out = self.clone();
        for (n, g) in other.iter() {
            let sum = out.get(n).direct_sum(g);
            out.set(n, sum);
        }
        out
    }

    /// Keeps only degrees satisfying `keep`.
    pub fn filter_degrees(&self, keep: impl Fn(i64) -> bool) -> GradedTame {
        GradedTame {
            degrees: self
                .degrees
                .iter()
                .filter(|(n, _)| keep(**n))
                .map(|(n, g)| (*n, g.clone()))
                .collect(),
        }
    }

    pub fn shift(&self, by: i64) -> GradedTame {
        GradedTame {
            degrees: self.degrees.iter().map(|(n, g)| (n + by, g.clone())).collect(),
        }
    }
}

impl FromIterator<(i64, TameGroup)> for GradedTame {
    fn from_iter<I: IntoIterator<Item = (i64, TameGroup)>>(iter: I) -> Self {
        let mut g = GradedTame::new();
        for (n, a) in iter {
            let sum = g.get(n).direct_sum(&a);
            g.set(n, sum);
        }
        g
    }
}

/// `n: group; n: group`, degrees ascending, `0` when empty.
impl fmt::Display for GradedTame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degrees.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, g)) in self.degrees.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{n}: {g}")?;
        }
        Ok(())
    }
}
