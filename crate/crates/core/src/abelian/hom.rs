//! Homomorphisms between tame groups built from canonical atom maps.
//!
//! A `TameHom` is a sparse matrix whose entry `(i -> j, k)` contributes
//! `k` times the canonical map from source atom `i` to target atom `j`.
//! Canonical maps exist only for the pairs listed in `canonical_exists`;
//! arbitrary homomorphisms between tame groups are not finitely representable.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::atom::{Atom, Prime};
use super::group::{l0_atom, l1_atom, TameGroup};
use super::AbelianError;
use crate::intlinalg::{cokernel_invariants, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HomEntry {
    pub source: usize,
    pub target: usize,
    pub scale: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TameHom {
    source: TameGroup,
    target: TameGroup,
    entries: Vec<HomEntry>,
}

/// Whether a canonical map `s -> t` is defined.
pub fn canonical_exists(s: Atom, t: Atom) -> bool {
    use Atom::*;
    if s == t {
        return true;
    }
    match (s, t) {
        (Free, Cyclic { .. } | Rationals | PadicInts(_) | InvertedInt(_)) => true,
        (Cyclic { prime: a, .. }, Cyclic { prime: b, .. }) => a == b,
        (Cyclic { prime: a, .. }, Prufer(b)) => a == b,
        (PadicInts(a), Cyclic { prime: b, .. }) => a == b,
        (InvertedInt(_), Rationals) => true,
        (InvertedInt(a), Prufer(b)) => a == b,
        _ => false,
    }
}

/// Additive order of the canonical map `s -> t` inside `Hom(s, t)`, `None`
/// when it has infinite order.
fn canonical_order(s: Atom, t: Atom) -> Option<u64> {
    use Atom::*;
    match (s, t) {
        (_, Cyclic { prime, exp: b }) => {
            let e = match s {
                // inclusion x -> q^{b-a} x has order q^a
                Cyclic { exp: a, .. } => a.min(b),
                _ => b,
            };
            prime.pow(e).ok()
        }
        (Cyclic { prime, exp }, Prufer(_)) => prime.pow(exp).ok(),
        _ => None,
    }
}

/// `can(t -> u) . can(s -> t) = c * can(s -> u)`; returns `Some(c)`, or `None`
/// when the composite is not a multiple of a canonical map.
fn compose_coefficient(s: Atom, t: Atom, u: Atom) -> Option<i64> {
    use Atom::*;
    if s == t || t == u {
        return Some(1);
    }
    let pw = |q: Prime, e: i64| -> Option<i64> { i64::try_from(q.pow(e as u32).ok()?).ok() };
    match (s, t, u) {
        (Free, Cyclic { prime, exp: a }, Cyclic { exp: c, .. })
        | (PadicInts(prime), Cyclic { exp: a, .. }, Cyclic { exp: c, .. }) => {
            // 1 -> 1 -> q^{max(0, c-a)}, and can(s -> u) sends 1 -> 1
            pw(prime, (c as i64 - a as i64).max(0))
        }
        (Cyclic { prime, exp: a }, Cyclic { exp: b, .. }, Cyclic { exp: c, .. }) => {
            let (a, b, c) = (a as i64, b as i64, c as i64);
            let image = (b - a).max(0) + (c - b).max(0);
            let canonical = (c - a).max(0);
            pw(prime, image - canonical)
        }
        (Cyclic { prime, exp: a }, Cyclic { exp: b, .. }, Prufer(_)) => {
            // 1 -> q^{max(0,b-a)} -> q^{max(0,b-a)} / q^b, versus 1 / q^a
            pw(prime, (a as i64 - b as i64).max(0))
        }
        (Free, InvertedInt(_), Rationals) => Some(1),
        (Free, InvertedInt(q), Prufer(r)) if q == r => Some(0),
        _ => None,
    }
}

impl TameHom {
    pub fn new(source: TameGroup, target: TameGroup, entries: Vec<HomEntry>) -> Result<Self, AbelianError> {
        let mut merged: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for e in entries {
            let (Some(&s), Some(&t)) = (source.atoms().get(e.source), target.atoms().get(e.target)) else {
                return Err(AbelianError::InvalidMap(format!(
                    "entry {}->{} is out of range for {source} -> {target}",
                    e.source, e.target
                )));
            };
            if !canonical_exists(s, t) {
                return Err(AbelianError::InvalidMap(format!("no canonical map {s} -> {t}")));
            }
            let slot = merged.entry((e.source, e.target)).or_insert(0);
            *slot = slot.checked_add(e.scale).ok_or(AbelianError::Overflow)?;
        }
        let entries = merged
            .into_iter()
            .filter_map(|((i, j), k)| {
                let order = canonical_order(source.atoms()[i], target.atoms()[j]);
                let k = match order.and_then(|o| i64::try_from(o).ok()) {
                    Some(o) => k.rem_euclid(o),
                    None => k,
                };
                (k != 0).then_some(HomEntry {
                    source: i,
                    target: j,
                    scale: k,
                })
            })
            .collect();
        Ok(TameHom {
            source,
            target,
            entries,
        })
    }

    pub fn identity(g: &TameGroup) -> Self {
        TameHom {
            source: g.clone(),
            target: g.clone(),
            entries: (0..g.atom_count())
                .map(|i| HomEntry {
                    source: i,
                    target: i,
                    scale: 1,
                })
                .collect(),
        }
    }

    pub fn zero(source: &TameGroup, target: &TameGroup) -> Self {
        TameHom {
            source: source.clone(),
            target: target.clone(),
            entries: Vec::new(),
        }
    }

    pub fn source(&self) -> &TameGroup {
        &self.source
    }

    pub fn target(&self) -> &TameGroup {
        &self.target
    }

    pub fn entries(&self) -> &[HomEntry] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `next . self`.
    pub fn then(&self, next: &TameHom) -> Result<TameHom, AbelianError> {
        if self.target != next.source {
            return Err(AbelianError::InvalidMap(format!(
                "cannot compose: {} is not {}",
                self.target, next.source
            )));
        }
        let mut out = Vec::new();
        for f in &self.entries {
            for g in next.entries.iter().filter(|g| g.source == f.target) {
                let s = self.source.atoms()[f.source];
                let t = self.target.atoms()[f.target];
                let u = next.target.atoms()[g.target];
                let c = compose_coefficient(s, t, u).ok_or_else(|| {
                    AbelianError::InvalidMap(format!(
                        "composite {s} -> {t} -> {u} is not a multiple of a canonical map"
                    ))
                })?;
                if c == 0 {
                    continue;
                }
                if !canonical_exists(s, u) {
                    return Err(AbelianError::InvalidMap(format!(
                        "composite {s} -> {t} -> {u} has no canonical representative"
                    )));
                }
                let k = f
                    .scale
                    .checked_mul(g.scale)
                    .and_then(|k| k.checked_mul(c))
                    .ok_or(AbelianError::Overflow)?;
                out.push(HomEntry {
                    source: f.source,
                    target: g.target,
                    scale: k,
                });
            }
        }
        TameHom::new(self.source.clone(), next.target.clone(), out)
    }

    /// Block-diagonal sum `self (+) other`.
    pub fn direct_sum(&self, other: &TameHom) -> Result<TameHom, AbelianError> {
        let mut src = self.source.atoms().to_vec();
        src.extend_from_slice(other.source.atoms());
        let mut tgt = self.target.atoms().to_vec();
        tgt.extend_from_slice(other.target.atoms());
        let (source, spos) = TameGroup::with_positions(src);
        let (target, tpos) = TameGroup::with_positions(tgt);
        let (ns, nt) = (self.source.atom_count(), self.target.atom_count());
        let entries = self
            .entries
            .iter()
            .map(|e| HomEntry {
                source: spos[e.source],
                target: tpos[e.target],
                scale: e.scale,
            })
            .chain(other.entries.iter().map(|e| HomEntry {
                source: spos[ns + e.source],
                target: tpos[nt + e.target],
                scale: e.scale,
            }))
            .collect();
        TameHom::new(source, target, entries)
    }

    /// The induced map on `L_i`, `i` in {0, 1}.
    ///
    /// Every canonical map whose ends survive `L_0` induces the canonical map
    /// between the completed atoms; `L_1` is nonzero only on `Prufer(p)`,
    /// where the only canonical map is the identity.
    pub fn derived(&self, p: Prime, i: u8) -> Result<TameHom, AbelianError> {
        let functor = |a: Atom| match i {
            0 => l0_atom(a, p),
            1 => l1_atom(a, p),
            _ => Ok(None),
        };
        let (source, spos) = completed_positions(&self.source, &functor)?;
        let (target, tpos) = completed_positions(&self.target, &functor)?;
        let entries = self
            .entries
            .iter()
            .filter_map(|e| {
                Some(HomEntry {
                    source: spos[e.source]?,
                    target: tpos[e.target]?,
                    scale: e.scale,
                })
            })
            .collect();
        TameHom::new(source, target, entries)
    }

    /// Decides whether a map between finitely generated `Z_p`-modules is an
    /// isomorphism: the ends must be isomorphic and the map surjective
    /// modulo a power of `p` beyond every torsion exponent.
    pub fn is_isomorphism_of_padic_modules(&self, p: Prime) -> Result<bool, AbelianError> {
        if !self.source.is_padic_module(p) || !self.target.is_padic_module(p) {
            return Err(AbelianError::InvalidMap(format!(
                "{} -> {} is not a map of finitely generated Z_{p}-modules",
                self.source, self.target
            )));
        }
        if self.source != self.target {
            return Ok(false);
        }
        let n = self.source.max_p_exponent(p).max(self.target.max_p_exponent(p)) + 1;
        let rows = self.target.atom_count();
        let mut m = IntMatrix::zeros(rows, self.source.atom_count() + rows);
        for e in &self.entries {
            let s = self.source.atoms()[e.source];
            let t = self.target.atoms()[e.target];
            let generator_image = match (s, t) {
                (Atom::Cyclic { exp: a, .. }, Atom::Cyclic { exp: b, .. }) if b > a => p.pow(b - a)?,
                _ => 1,
            };
            m[(e.target, e.source)] = BigInt::from(e.scale) * BigInt::from(generator_image);
        }
        for (j, t) in self.target.atoms().iter().enumerate() {
            let e = match *t {
                Atom::Cyclic { exp, .. } => exp,
                _ => n,
            };
            m[(j, self.source.atom_count() + j)] = BigInt::from(p.pow(e)?);
        }
        Ok(cokernel_invariants(&m).is_zero())
    }
}

type PositionMap = Vec<Option<usize>>;

fn completed_positions(
    g: &TameGroup,
    functor: &dyn Fn(Atom) -> Result<Option<Atom>, AbelianError>,
) -> Result<(TameGroup, PositionMap), AbelianError> {
    let mut images = Vec::new();
    let mut owner = Vec::new();
    for (k, a) in g.atoms().iter().enumerate() {
        if let Some(b) = functor(*a)? {
            images.push(b);
            owner.push(k);
        }
    }
    let (group, pos) = TameGroup::with_positions(images);
    let mut map = vec![None; g.atom_count()];
    for (idx, k) in owner.into_iter().enumerate() {
        map[k] = Some(pos[idx]);
    }
    Ok((group, map))
}

/// `i->j*k` entries separated by commas, `0` for the zero map.
impl fmt::Display for TameHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (n, e) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}*{}", e.source, e.target, e.scale)?;
        }
        Ok(())
    }
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

    fn hom(s: &str, t: &str, entries: &[(usize, usize, i64)]) -> TameHom {
        TameHom::new(
            g(s),
            g(t),
            entries
                .iter()
                .map(|&(source, target, scale)| HomEntry { source, target, scale })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn scales_reduce_modulo_order() {
        assert!(hom("Z/4", "Z/2", &[(0, 0, 2)]).is_zero());
        assert_eq!(hom("Z/2", "Z/4", &[(0, 0, 3)]).entries()[0].scale, 1);
        assert!(TameHom::new(
            g("Q"),
            g("Z"),
            vec![HomEntry {
                source: 0,
                target: 0,
                scale: 1
            }]
        )
        .is_err());
    }

    #[test]
    fn composition_of_reductions_and_inclusions() {
        // Z/2 -> Z/4 (x -> 2x) -> Z/2 (reduction) is zero
        let inc = hom("Z/2", "Z/4", &[(0, 0, 1)]);
        let red = hom("Z/4", "Z/2", &[(0, 0, 1)]);
        assert!(inc.then(&red).unwrap().is_zero());
        // reduction then inclusion is multiplication by 2 on Z/4
        let twice = red.then(&inc).unwrap();
        assert_eq!(twice, hom("Z/4", "Z/4", &[(0, 0, 2)]));
        // Z/4 -> Z/2 -> Prufer(2): 1 -> 1 -> 1/2 = 2 * (1/4)
        let to_prufer = hom("Z/2", "Prufer(2)", &[(0, 0, 1)]);
        assert_eq!(red.then(&to_prufer).unwrap(), hom("Z/4", "Prufer(2)", &[(0, 0, 2)]));
        // Z -> Z/4 -> Prufer(2) has no canonical representative
        let z4 = hom("Z", "Z/4", &[(0, 0, 1)]);
        let into = hom("Z/4", "Prufer(2)", &[(0, 0, 1)]);
        assert!(z4.then(&into).is_err());
    }

    #[test]
    fn completion_of_canonical_maps() {
        let two = p(2);
        // Z -> Z/4 completes to Z_2 -> Z/4
        let red = hom("Z", "Z/4", &[(0, 0, 1)]).derived(two, 0).unwrap();
        assert_eq!(red, hom("Zp(2)", "Z/4", &[(0, 0, 1)]));
        // Z -> Q dies
        assert!(hom("Z", "Q", &[(0, 0, 1)]).derived(two, 0).unwrap().is_zero());
        // multiplication by 3 on Prufer(2) survives L_1
        let l1 = hom("Prufer(2)", "Prufer(2)", &[(0, 0, 3)]).derived(two, 1).unwrap();
        assert_eq!(l1, hom("Zp(2)", "Zp(2)", &[(0, 0, 3)]));
    }

    #[test]
    fn padic_isomorphism_test() {
        let two = p(2);
        assert!(TameHom::identity(&g("Zp(2) + Z/4"))
            .is_isomorphism_of_padic_modules(two)
            .unwrap());
        assert!(hom("Zp(2)", "Zp(2)", &[(0, 0, 3)])
            .is_isomorphism_of_padic_modules(two)
            .unwrap());
        assert!(!hom("Zp(2)", "Zp(2)", &[(0, 0, 2)])
            .is_isomorphism_of_padic_modules(two)
            .unwrap());
        assert!(!hom("Z/4", "Z/4", &[(0, 0, 2)])
            .is_isomorphism_of_padic_modules(two)
            .unwrap());
        // swap of two summands
        let swap = hom("Zp(2)^2", "Zp(2)^2", &[(0, 1, 1), (1, 0, 1)]);
        assert!(swap.is_isomorphism_of_padic_modules(two).unwrap());
        assert!(TameHom::zero(&g("0"), &g("0"))
            .is_isomorphism_of_padic_modules(two)
            .unwrap());
        assert!(TameHom::identity(&g("Z")).is_isomorphism_of_padic_modules(two).is_err());
    }
}
