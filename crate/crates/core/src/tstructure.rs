//! The p-adic t-structure on formal spectra, i.e. spectra described only by
//! their graded homotopy groups.
//!
//! `pi_n^p(E)` sits in `0 -> L_0 pi_n(E) -> pi_n^p(E) -> L_1 pi_{n-1}(E) -> 0`.
//! The middle is recorded only when the extension is forced to split: one end
//! vanishes, or the right end is a free `Z_p`-module (projective among
//! p-complete groups, so every extension by it splits).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianError, Atom, GradedTame, Prime, TameGroup, TameHom};
use crate::text::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TStructureError {
    #[error("invalid comparison: {0}")]
    InvalidComparison(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// A spectrum known through its homotopy groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalSpectrum {
    pub homotopy: GradedTame,
}

impl FormalSpectrum {
    pub fn new(homotopy: GradedTame) -> Self {
        FormalSpectrum { homotopy }
    }

    /// `A` placed in degree `n`.
    pub fn concentrated(a: TameGroup, n: i64) -> Self {
        FormalSpectrum::new(GradedTame::new().with(n, a))
    }

    pub fn pi(&self, n: i64) -> TameGroup {
        self.homotopy.get(n)
    }
}

impl fmt::Display for FormalSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.homotopy.fmt(f)
    }
}

impl FromStr for FormalSpectrum {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(FormalSpectrum::new(s.parse()?))
    }
}

/// The two ends of the sequence for `pi_n^p` and its middle when determined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SesRecord {
    pub degree: i64,
    pub left: TameGroup,
    pub right: TameGroup,
    pub middle_known: Option<TameGroup>,
}

impl SesRecord {
    /// Checks the record's invariants: left p-complete with bounded
    /// p-divisibility, right free over `Z_p`, and a middle whose `Z_p`-rank
    /// and torsion match the ends.
    pub fn is_consistent(&self, p: Prime) -> Result<bool, AbelianError> {
        let prof = self.left.divisibility_profile(p)?;
        if !(prof.p_complete && prof.bounded_p_divisibility && self.right.is_free_padic(p)) {
            return Ok(false);
        }
        Ok(match &self.middle_known {
            None => true,
            Some(m) => {
                m.padic_rank(p) == self.left.padic_rank(p) + self.right.padic_rank(p)
                    && torsion_of(m) == torsion_of(&self.left)
            }
        })
    }
}

fn torsion_of(g: &TameGroup) -> TameGroup {
    g.atoms().iter().copied().filter(Atom::is_finite).collect()
}

/// The split criteria: returns the middle when it is forced, `None` otherwise.
pub fn resolve_extension(left: &TameGroup, right: &TameGroup, p: Prime) -> Option<TameGroup> {
    if left.is_zero() {
        return Some(right.clone());
    }
    if right.is_zero() || right.is_free_padic(p) {
        return Some(left.direct_sum(right));
    }
    None
}

/// `pi_j` uniquely p-divisible for `j < i - 1` and `pi_{i-1}` p-divisible.
pub fn is_p_connective(e: &FormalSpectrum, p: Prime, i: i64) -> Result<bool, AbelianError> {
    for (j, g) in e.homotopy.iter() {
        if j >= i {
            break;
        }
        let prof = g.divisibility_profile(p)?;
        let ok = if j < i - 1 {
            prof.uniquely_p_divisible
        } else {
            prof.p_divisible
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vanishing above `i`, every homotopy group p-complete (`L_0 = id`,
/// `L_1 = 0`), and `pi_i` with bounded p-divisibility.
pub fn is_p_coconnective(e: &FormalSpectrum, p: Prime, i: i64) -> Result<bool, AbelianError> {
    if e.homotopy.support().is_some_and(|(_, hi)| hi > i) {
        return Ok(false);
    }
    for (_, g) in e.homotopy.iter() {
        if !g.divisibility_profile(p)?.p_complete {
            return Ok(false);
        }
    }
    Ok(e.pi(i).divisibility_profile(p)?.bounded_p_divisibility)
}

pub fn is_in_p_heart(e: &FormalSpectrum, p: Prime) -> Result<bool, AbelianError> {
    Ok(is_p_connective(e, p, 0)? && is_p_coconnective(e, p, 0)?)
}

pub fn pi_p(e: &FormalSpectrum, p: Prime, n: i64) -> Result<SesRecord, AbelianError> {
    let left = e.pi(n).derived_completion(p)?.l0;
    let right = e.pi(n - 1).derived_completion(p)?.l1;
    let middle_known = resolve_extension(&left, &right, p);
    Ok(SesRecord {
        degree: n,
        left,
        right,
        middle_known,
    })
}

/// Degrees in which `pi_p` can be nonzero.
pub fn pi_p_range(e: &FormalSpectrum) -> Option<std::ops::RangeInclusive<i64>> {
    e.homotopy.support().map(|(lo, hi)| lo..=hi + 1)
}

/// The two graded pieces of the completion of a group placed in degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `L_1 A`, sitting in degree 1.
    pub shifted_l1: TameGroup,
    /// `L_0 A`, sitting in degree 0.
    pub l0: TameGroup,
}

impl Decomposition {
    pub fn graded(&self) -> GradedTame {
        GradedTame::new()
            .with(0, self.l0.clone())
            .with(1, self.shifted_l1.clone())
    }
}

pub fn decomposition(a: &TameGroup, p: Prime) -> Result<Decomposition, AbelianError> {
    let dc = a.derived_completion(p)?;
    Ok(Decomposition {
        shifted_l1: dc.l1,
        l0: dc.l0,
    })
}

/// Degreewise maps `pi_n(E) -> pi_n(F)`; missing degrees are zero maps.
pub type Comparison = BTreeMap<i64, TameHom>;

/// Whether a comparison induces isomorphisms on `L_0 pi_n` and `L_1 pi_n`
/// in every degree, hence on every `pi_n^p`.
pub fn recognize_p_equivalence(
    e: &FormalSpectrum,
    f: &FormalSpectrum,
    comparison: &Comparison,
    p: Prime,
) -> Result<bool, TStructureError> {
    for (n, h) in comparison {
        if *h.source() != e.pi(*n) || *h.target() != f.pi(*n) {
            return Err(TStructureError::InvalidComparison(format!(
                "degree {n}: map {} -> {} does not match {} -> {}",
                h.source(),
                h.target(),
                e.pi(*n),
                f.pi(*n)
            )));
        }
    }
    let degrees: std::collections::BTreeSet<i64> = e.homotopy.iter().chain(f.homotopy.iter()).map(|(n, _)| n).collect();
    for n in degrees {
        let h = comparison
            .get(&n)
            .cloned()
            .unwrap_or_else(|| TameHom::zero(&e.pi(n), &f.pi(n)));
        for i in [0u8, 1] {
            if !h.derived(p, i)?.is_isomorphism_of_padic_modules(p)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
