use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::AbelianError;

/// A rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, AbelianError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(AbelianError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e`, failing on overflow.
    pub fn pow(self, e: u32) -> Result<u64, AbelianError> {
        self.0.checked_pow(e).ok_or(AbelianError::Overflow)
    }
}

impl TryFrom<u64> for Prime {
    type Error = AbelianError;

    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `v_p(n)` for `n > 0`.
pub fn valuation(mut n: u64, p: Prime) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p.get()) {
        n /= p.get();
        v += 1;
    }
    v
}

/// Indecomposable summand of a tame group.
///
/// Cyclic atoms are always of prime-power order; `Atom::cyclic` splits a
/// general modulus into its primary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// Z
    Free,
    /// Z/prime^exp, exp >= 1
    Cyclic { prime: Prime, exp: u32 },
    /// Z[1/q]/Z
    Prufer(Prime),
    /// Q
    Rationals,
    /// Z_q
    PadicInts(Prime),
    /// Z[1/q]
    InvertedInt(Prime),
}

impl Atom {
    /// The primary decomposition of `Z/m`. Errors for `m < 2`.
    pub fn cyclic(m: u64) -> Result<Vec<Atom>, AbelianError> {
        if m < 2 {
            return Err(AbelianError::BadModulus(m));
        }
        Ok(factorize(m)
            .into_iter()
            .map(|(q, e)| Atom::Cyclic {
                prime: Prime(q),
                exp: e,
            })
            .collect())
    }

    pub fn prime_power_cyclic(prime: Prime, exp: u32) -> Option<Atom> {
        (exp > 0).then_some(Atom::Cyclic { prime, exp })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Atom::Cyclic { .. })
    }

    /// Order of a cyclic atom, `None` for infinite atoms.
    pub fn order(&self) -> Option<u64> {
        match *self {
            Atom::Cyclic { prime, exp } => prime.pow(exp).ok(),
            _ => None,
        }
    }

    fn rank_key(&self) -> (u8, u64, u64) {
        match *self {
            Atom::Free => (0, 0, 0),
            Atom::Cyclic { prime, exp } => (1, prime.get().checked_pow(exp).unwrap_or(u64::MAX), prime.get()),
            Atom::Prufer(q) => (2, q.get(), 0),
            Atom::Rationals => (3, 0, 0),
            Atom::PadicInts(q) => (4, q.get(), 0),
            Atom::InvertedInt(q) => (5, q.get(), 0),
        }
    }

    /// Atom-level truth table for bounded p-divisibility: the atom admits no
    /// nonzero map from a p-divisible group, i.e. it has no nonzero
    /// p-divisible subgroup.
    ///
    /// Z, Z/p^k, Z_p and Z[1/q] (q != p) contain no element divisible by every
    /// power of p other than 0. Every other atom is itself p-divisible and
    /// nonzero, so the identity map witnesses unboundedness.
    pub fn has_bounded_p_divisibility(&self, p: Prime) -> bool {
        match *self {
            Atom::Free => true,
            Atom::Cyclic { prime, .. } => prime == p,
            Atom::Prufer(_) => false,
            Atom::Rationals => false,
            Atom::PadicInts(q) => q == p,
            Atom::InvertedInt(q) => q != p,
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free < Cyclic (ascending order) < Prufer < Q < Z_q < Z[1/q].
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_key().cmp(&other.rank_key())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Free => write!(f, "Z"),
            Atom::Cyclic { prime, exp } => match prime.get().checked_pow(exp) {
                Some(m) => write!(f, "Z/{m}"),
                None => write!(f, "Z/{}^{}", prime, exp),
            },
            Atom::Prufer(q) => write!(f, "Prufer({q})"),
            Atom::Rationals => write!(f, "Q"),
            Atom::PadicInts(q) => write!(f, "Zp({q})"),
            Atom::InvertedInt(q) => write!(f, "Z[1/{q}]"),
        }
    }
}
