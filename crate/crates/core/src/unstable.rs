//! Simply connected spaces with trivial k-invariants: finite products of
//! Eilenberg-MacLane spaces `K(A, n)`, `n >= 2`, and their p-completions.
//!
//! Completion is computed degreewise from
//! `0 -> L_0 pi_n(X) -> pi_n(X^) -> L_1 pi_{n-1}(X) -> 0`,
//! with the middle resolved by the same split criteria as the stable case.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{parse_group, AbelianError, GradedTame, Prime, TameGroup};
use crate::text::{Cursor, ParseError};
use crate::tstructure::resolve_extension;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnstableError {
    #[error("homotopy in degree {0}; spaces here are simply connected (degrees >= 2)")]
    DegreeTooLow(i64),
    #[error("extension in degree {degree} is not determined: 0 -> {left} -> ? -> {right} -> 0")]
    UnresolvedExtension {
        degree: i64,
        left: TameGroup,
        right: TameGroup,
    },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A product of Eilenberg-MacLane spaces, stored as its homotopy groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalSpace {
    homotopy: GradedTame,
}

impl FormalSpace {
    pub fn point() -> Self {
        Self::default()
    }

    pub fn new(homotopy: GradedTame) -> Result<Self, UnstableError> {
        if let Some((lo, _)) = homotopy.support() {
            if lo < 2 {
                return Err(UnstableError::DegreeTooLow(lo));
            }
        }
        Ok(FormalSpace { homotopy })
    }

    pub fn em(a: TameGroup, n: i64) -> Result<Self, UnstableError> {
        FormalSpace::new(GradedTame::new().with(n, a))
    }

    pub fn homotopy(&self) -> &GradedTame {
        &self.homotopy
    }

    pub fn pi(&self, n: i64) -> TameGroup {
        self.homotopy.get(n)
    }

    pub fn is_point(&self) -> bool {
        self.homotopy.is_zero()
    }

    pub fn product(&self, other: &FormalSpace) -> FormalSpace {
        FormalSpace {
            homotopy: self.homotopy.direct_sum(&other.homotopy),
        }
    }

    /// `tau_{<= k}`: drops homotopy above `k`.
    pub fn truncate(&self, k: i64) -> FormalSpace {
        FormalSpace {
            homotopy: self.homotopy.filter_degrees(|n| n <= k),
        }
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.homotopy.support().map(|(_, hi)| hi)
    }
}

/// `K(A, n) x K(B, m)`, degrees ascending; `pt` for the point.
impl fmt::Display for FormalSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "pt");
        }
        for (i, (n, g)) in self.homotopy.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "K({g}, {n})")?;
        }
        Ok(())
    }
}

impl FromStr for FormalSpace {
    type Err = UnstableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Cursor::new(s);
        if c.eat_keyword("pt") {
            c.finish()?;
            return Ok(FormalSpace::point());
        }
        let mut homotopy = GradedTame::new();
        loop {
            if !c.eat("K") {
                return Err(c.error("K(group, n) or pt").into());
            }
            c.expect("(")?;
            let g = parse_group(&mut c)?;
            c.expect(",")?;
            let n = c.integer()?;
            c.expect(")")?;
            let sum = homotopy.get(n).direct_sum(&g);
            homotopy.set(n, sum);
            if !c.eat("x") {
                break;
            }
        }
        c.finish()?;
        FormalSpace::new(homotopy)
    }
}

/// `K(A, n)^`: `L_0 A` in degree `n` and `L_1 A` in degree `n + 1`.
pub fn complete_em(a: &TameGroup, n: i64, p: Prime) -> Result<FormalSpace, UnstableError> {
    if n < 2 {
        return Err(UnstableError::DegreeTooLow(n));
    }
    let dc = a.derived_completion(p)?;
    FormalSpace::new(GradedTame::new().with(n, dc.l0).with(n + 1, dc.l1))
}

pub fn complete_space(x: &FormalSpace, p: Prime) -> Result<FormalSpace, UnstableError> {
    let Some(top) = x.top_degree() else {
        return Ok(FormalSpace::point());
    };
    let mut out = GradedTame::new();
    for n in 2..=top + 1 {
        let left = x.pi(n).derived_completion(p)?.l0;
        let right = x.pi(n - 1).derived_completion(p)?.l1;
        let middle = resolve_extension(&left, &right, p).ok_or_else(|| UnstableError::UnresolvedExtension {
            degree: n,
            left: left.clone(),
            right: right.clone(),
        })?;
        out.set(n, middle);
    }
    FormalSpace::new(out)
}

/// Completes every truncation `tau_{<= k} X`, reads off the degreewise
/// eventual values of the tower and compares them with `X^`.
pub fn postnikov_limit_check(x: &FormalSpace, p: Prime) -> Result<bool, UnstableError> {
    let Some(top) = x.top_degree() else {
        return Ok(complete_space(x, p)?.is_point());
    };
    let stages: Vec<(i64, FormalSpace)> = (2..=top + 1)
        .map(|k| Ok((k, complete_space(&x.truncate(k), p)?)))
        .collect::<Result<_, UnstableError>>()?;
    let mut limit = GradedTame::new();
    for m in 2..=top + 1 {
        // the tower is constant in degree m from stage m on
        let values: Vec<TameGroup> = stages.iter().filter(|(k, _)| *k >= m).map(|(_, s)| s.pi(m)).collect();
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Ok(false);
        }
        if let Some(v) = values.last() {
            limit.set(m, v.clone());
        }
    }
    Ok(FormalSpace::new(limit)? == complete_space(x, p)?)
}

/// Completes `base x K(A, n+1)`, removes the completed Eilenberg-MacLane
/// factor degreewise (the fiber of the projection) and compares with the
/// completion of `base`.
pub fn fiber_completion_check(base: &FormalSpace, a: &TameGroup, n: i64, p: Prime) -> Result<bool, UnstableError> {
    let factor = FormalSpace::em(a.clone(), n + 1)?;
    let total = complete_space(&base.product(&factor), p)?;
    let em = complete_em(a, n + 1, p)?;
    let mut fiber = GradedTame::new();
    for (m, g) in total.homotopy().iter() {
        match g.remove_summand(&em.pi(m)) {
            Some(rest) => fiber.set(m, rest),
            None => return Ok(false),
        }
    }
    if em.homotopy().iter().any(|(m, _)| total.pi(m).is_zero()) {
        return Ok(false);
    }
    Ok(FormalSpace::new(fiber)? == complete_space(base, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{instance_rng, tame_group};
    use crate::tstructure::decomposition;
    use rand::seq::index::sample;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn g(s: &str) -> TameGroup {
        s.parse().unwrap()
    }

    fn space(s: &str) -> FormalSpace {
        s.parse().unwrap()
    }

    fn random_space(seed: u64, i: u64) -> FormalSpace {
        let mut rng = instance_rng(seed, i);
        let degrees = sample(&mut rng, 6, 3);
        let mut x = FormalSpace::point();
        for d in degrees.iter() {
            let a = tame_group(&mut rng, 3);
            x = x.product(&FormalSpace::em(a, d as i64 + 2).unwrap());
        }
        x
    }

    #[test]
    fn text_format() {
        let x = space("K(Prufer(2), 2) x K(Z, 5)");
        assert_eq!(x.to_string(), "K(Prufer(2), 2) x K(Z, 5)");
        assert_eq!(space("pt"), FormalSpace::point());
        assert_eq!(space("K(Z,3)xK(Z/2,3)"), space("K(Z + Z/2, 3)"));
        assert!(matches!(
            "K(Z, 1)".parse::<FormalSpace>(),
            Err(UnstableError::DegreeTooLow(1))
        ));
        assert!(matches!("K(Z 2)".parse::<FormalSpace>(), Err(UnstableError::Parse(_))));
    }

    #[test]
    fn em_examples() {
        for q in [2, 3, 5] {
            for n in 2..5 {
                let prufer = TameGroup::atom(crate::abelian::Atom::Prufer(p(q)));
                let k = complete_em(&prufer, n, p(q)).unwrap();
                assert_eq!(
                    k,
                    FormalSpace::em(TameGroup::atom(crate::abelian::Atom::PadicInts(p(q))), n + 1).unwrap()
                );
                assert!(complete_em(&g("Q"), n, p(q)).unwrap().is_point());
            }
        }
        assert_eq!(complete_em(&g("Z/8"), 3, p(2)).unwrap(), space("K(Z/8, 3)"));
        assert!(complete_em(&g("Z"), 1, p(2)).is_err());
    }

    #[test]
    fn space_examples() {
        let two = p(2);
        assert_eq!(complete_space(&space("K(Z, 2)"), two).unwrap(), space("K(Zp(2), 2)"));
        assert_eq!(
            complete_space(&space("K(Prufer(2), 2) x K(Z, 5)"), two).unwrap(),
            space("K(Zp(2), 3) x K(Zp(2), 5)")
        );
        assert!(complete_space(&space("K(Z/3, 2)"), two).unwrap().is_point());
    }

    #[test]
    fn postnikov_examples() {
        let two = p(2);
        assert!(postnikov_limit_check(&space("K(Z/4, 3)"), two).unwrap());
        assert!(postnikov_limit_check(&space("K(Prufer(2), 2) x K(Z, 5)"), two).unwrap());
        assert!(postnikov_limit_check(&FormalSpace::point(), two).unwrap());
        for i in 0..100 {
            let x = random_space(21, i);
            for q in [2, 3, 5] {
                assert!(postnikov_limit_check(&x, p(q)).unwrap(), "{x} at {q}");
            }
        }
    }

    #[test]
    fn fiber_examples() {
        let two = p(2);
        assert!(fiber_completion_check(&space("K(Z, 2)"), &g("Z/4"), 2, two).unwrap());
        assert!(fiber_completion_check(&FormalSpace::point(), &g("Z + Prufer(2)"), 3, two).unwrap());
        assert!(fiber_completion_check(&space("K(Prufer(2), 3)"), &g("Prufer(2)"), 3, two).unwrap());
    }

    #[test]
    fn space_properties() {
        for i in 0..150 {
            let x = random_space(23, i);
            let y = random_space(24, i);
            for q in [2, 3, 5] {
                let q = p(q);
                let xc = complete_space(&x, q).unwrap();
                assert_eq!(complete_space(&xc, q).unwrap(), xc, "idempotence on {x}");
                if let (Some(t), Some(tc)) = (x.top_degree(), xc.top_degree()) {
                    assert!(tc <= t + 1);
                }
                assert_eq!(
                    complete_space(&x.product(&y), q).unwrap(),
                    xc.product(&complete_space(&y, q).unwrap())
                );
                assert_eq!(x.to_string().parse::<FormalSpace>().unwrap(), x);
            }
        }
    }

    #[test]
    fn stable_and_unstable_agree_on_em_spaces() {
        for i in 0..100 {
            let a = tame_group(&mut instance_rng(29, i), 4);
            for q in [2, 3, 5] {
                let d = decomposition(&a, p(q)).unwrap().graded();
                for n in 2..5 {
                    let k = complete_em(&a, n, p(q)).unwrap();
                    assert_eq!(*k.homotopy(), d.shift(n));
                }
            }
        }
    }

    #[test]
    fn uniquely_divisible_spaces_complete_to_a_point() {
        let x = space("K(Q, 2) x K(Z[1/2], 4) x K(Z/9, 6)");
        assert!(complete_space(&x, p(2)).unwrap().is_point());
    }
}
