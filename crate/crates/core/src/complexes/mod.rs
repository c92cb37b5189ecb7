//! Bounded chain complexes of free abelian groups of finite rank, used as
//! exactly computable models of spectra.
//!
//! Sign convention for cones: for a chain map `f: A -> B` the cone has
//! `Cone_n = B_n (+) A_{n-1}` (target block first) and differential
//!
//! ```text
//! D_n = [ d^B_n   f_{n-1}     ]
//!       [ 0       -d^A_{n-1}  ]
//! ```
//!
//! so `E//k` is the cone of `k * id` with blocks `[[d, k I], [0, -d]]`.

mod oracle;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{AbelianError, GradedTame, Prime, TameGroup};
use crate::intlinalg::{cokernel_invariants, smith_normal_form, CokernelInvariants, IntMatrix};
use crate::text::ParseError;

pub use oracle::{tower_oracle, HomologyCoordinates};
pub use parse::parse_degree_zero_map;

/// Stage budget used when none is given.
pub const DEFAULT_STAGES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("d^2 != 0: d({degree}) * d({}) is nonzero", degree + 1)]
    NotAComplex { degree: i64 },
    #[error("differential d({degree}) has shape {found:?}, expected {expected:?}")]
    Shape {
        degree: i64,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("chain map does not commute with the differentials in degree {degree}")]
    NotChainMap { degree: i64 },
    #[error("degree bounds {lo}..{hi} are empty")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("tower did not stabilize: {0}")]
    NoStabilization(String),
    #[error("stage budget must be at least 3, got {0}")]
    StageBudget(usize),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A complex `C_hi -> ... -> C_lo` of free lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    lo: i64,
    hi: i64,
    ranks: Vec<usize>,
    /// `diffs[n]` is `d_n: C_n -> C_{n-1}`; only degrees `lo+1..=hi` are stored.
    diffs: BTreeMap<i64, IntMatrix>,
}

impl FreeComplex {
    /// Builds a complex on degrees `lo..=hi`. Missing differentials are zero.
    pub fn new(lo: i64, hi: i64, ranks: Vec<usize>, diffs: BTreeMap<i64, IntMatrix>) -> Result<Self, ComplexError> {
        if hi < lo {
            return Err(ComplexError::EmptyRange { lo, hi });
        }
        assert_eq!(ranks.len() as i64, hi - lo + 1, "one rank per degree");
        let mut c = FreeComplex {
            lo,
            hi,
            ranks,
            diffs: BTreeMap::new(),
        };
        for (n, d) in diffs {
            let expected = (c.rank(n - 1), c.rank(n));
            if d.shape() != expected {
                return Err(ComplexError::Shape {
                    degree: n,
                    expected,
                    found: d.shape(),
                });
            }
            if !d.is_zero() {
                c.diffs.insert(n, d);
            }
        }
        for n in lo..hi {
            if !c.diff(n).mul(&c.diff(n + 1)).is_zero() {
                return Err(ComplexError::NotAComplex { degree: n });
            }
        }
        Ok(c)
    }

    /// Z in degree `n`.
    pub fn sphere(n: i64) -> Self {
        FreeComplex {
            lo: n,
            hi: n,
            ranks: vec![1],
            diffs: BTreeMap::new(),
        }
    }

    /// `Z --m--> Z` in degrees `n+1 -> n`, with homology `Z/m` in degree `n`.
    pub fn moore(m: i64, n: i64) -> Self {
        let mut diffs = BTreeMap::new();
        diffs.insert(n + 1, IntMatrix::from_rows(&[[m]], 1));
        FreeComplex::new(n, n + 1, vec![1, 1], diffs).expect("two-term complex")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn rank(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi {
            0
        } else {
            self.ranks[(n - self.lo) as usize]
        }
    }

    /// `d_n`, a `rank(n-1) x rank(n)` matrix (zero when not stored).
    pub fn diff(&self, n: i64) -> IntMatrix {
        self.diffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(n - 1), self.rank(n)))
    }

    /// Degrees with nonzero rank, as a range (possibly wider).
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.diffs
            .values()
            .map(IntMatrix::max_abs_entry)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Invariants of `H_n = ker d_n / im d_{n+1}`.
    pub fn homology_invariants(&self, n: i64) -> CokernelInvariants {
        let rank_out = smith_normal_form(&self.diff(n)).rank();
        let incoming = cokernel_invariants(&self.diff(n + 1));
        let kernel = self.rank(n) - rank_out;
        let image_rank = self.rank(n) - incoming.free_rank;
        CokernelInvariants {
            torsion: incoming.torsion,
            free_rank: kernel - image_rank,
        }
    }

    pub fn homology(&self, n: i64) -> Result<TameGroup, ComplexError> {
        Ok(TameGroup::from_invariants(&self.homology_invariants(n))?)
    }

    /// All homology groups as a graded group.
    pub fn graded_homology(&self) -> Result<GradedTame, ComplexError> {
        let mut g = GradedTame::new();
        for n in self.degrees() {
            g.set(n, self.homology(n)?);
        }
        Ok(g)
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|n| self.homology_invariants(n).is_zero())
    }

    /// `E//k`, the cone of multiplication by `k`.
    pub fn cone_mult(&self, k: &BigInt) -> FreeComplex {
        ChainMap::scalar(self, k).cone()
    }

    /// Completion computed degreewise from homology:
    /// `pi_n = L_0 H_n (+) L_1 H_{n-1}`. The second summand vanishes for
    /// finitely generated homology.
    pub fn complete(&self, p: Prime) -> Result<GradedTame, ComplexError> {
        let mut out = GradedTame::new();
        for n in self.lo..=self.hi + 1 {
            let here = self.homology(n)?.derived_completion(p)?;
            let below = self.homology(n - 1)?.derived_completion(p)?;
            out.set(n, here.l0.direct_sum(&below.l1));
        }
        Ok(out)
    }

    /// `(+)` of two complexes, degreewise.
    pub fn direct_sum(&self, other: &FreeComplex) -> FreeComplex {
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let ranks = (lo..=hi).map(|n| self.rank(n) + other.rank(n)).collect();
        let mut diffs = BTreeMap::new();
        for n in lo + 1..=hi {
            let (a, b) = (self.diff(n), other.diff(n));
            let mut d = IntMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
            d.set_block(0, 0, &a);
            d.set_block(a.rows(), a.cols(), &b);
            diffs.insert(n, d);
        }
        FreeComplex::new(lo, hi, ranks, diffs).expect("sum of complexes is a complex")
    }
}

/// Text format: `degrees lo..hi; rank n = r; d n = [a,b;c,d];`
impl fmt::Display for FreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degrees {}..{};", self.lo, self.hi)?;
        for n in self.degrees() {
            if self.rank(n) > 0 {
                write!(f, " rank {n} = {};", self.rank(n))?;
            }
        }
        for (n, d) in &self.diffs {
            write!(f, " d {n} = {d};")?;
        }
        Ok(())
    }
}

/// A degreewise family of matrices `A_n -> B_n` commuting with differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: FreeComplex,
    target: FreeComplex,
    components: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    pub fn new(
        source: FreeComplex,
        target: FreeComplex,
        components: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self, ComplexError> {
        let map = ChainMap {
            source,
            target,
            components,
        };
        let lo = map.source.lo.min(map.target.lo);
        let hi = map.source.hi.max(map.target.hi);
        for n in lo..=hi {
            let c = map.component(n);
            let expected = (map.target.rank(n), map.source.rank(n));
            if c.shape() != expected {
                return Err(ComplexError::Shape {
                    degree: n,
                    expected,
                    found: c.shape(),
                });
            }
        }
        for n in lo..=hi + 1 {
            let lhs = map.target.diff(n).mul(&map.component(n));
            let rhs = map.component(n - 1).mul(&map.source.diff(n));
            if lhs != rhs {
                return Err(ComplexError::NotChainMap { degree: n });
            }
        }
        Ok(map)
    }

    /// Multiplication by `k` on `c`.
    pub fn scalar(c: &FreeComplex, k: &BigInt) -> ChainMap {
        let components = c.degrees().map(|n| (n, IntMatrix::scalar(c.rank(n), k))).collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            components,
        }
    }

    pub fn identity(c: &FreeComplex) -> ChainMap {
        ChainMap::scalar(c, &BigInt::one())
    }

    pub fn zero(source: &FreeComplex, target: &FreeComplex) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &FreeComplex {
        &self.source
    }

    pub fn target(&self) -> &FreeComplex {
        &self.target
    }

    pub fn component(&self, n: i64) -> IntMatrix {
        self.components
            .get(&n)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(n), self.source.rank(n)))
    }

    /// The mapping cone, laid out as described in the module docs.
    pub fn cone(&self) -> FreeComplex {
        let (a, b) = (&self.source, &self.target);
        let lo = b.lo.min(a.lo + 1);
        let hi = b.hi.max(a.hi + 1);
        let ranks = (lo..=hi).map(|n| b.rank(n) + a.rank(n - 1)).collect();
        let mut diffs = BTreeMap::new();
        for n in lo + 1..=hi {
            let (bn, bn1) = (b.rank(n), b.rank(n - 1));
            let (an1, an2) = (a.rank(n - 1), a.rank(n - 2));
            let mut d = IntMatrix::zeros(bn1 + an2, bn + an1);
            d.set_block(0, 0, &b.diff(n));
            d.set_block(0, bn, &self.component(n - 1));
            d.set_block(bn1, bn, &a.diff(n - 1).neg());
            diffs.insert(n, d);
        }
        FreeComplex::new(lo, hi, ranks, diffs).expect("the cone of a chain map is a complex")
    }

    /// `f` is a p-equivalence iff `Cone(f)//p` is acyclic.
    pub fn is_p_equivalence(&self, p: Prime) -> bool {
        self.cone().cone_mult(&BigInt::from(p.get())).is_acyclic()
    }
}

#[cfg(test)]
mod tests;
