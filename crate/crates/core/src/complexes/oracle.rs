//! Brute-force completion: build `E//p^k` for every stage, compute its
//! homology with explicit coordinates, push the transition maps
//! `E//p^{k+1} -> E//p^k` through homology and read off the inverse limit
//! from the stable images.
//!
//! Shares nothing with `FreeComplex::complete` beyond Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{ComplexError, FreeComplex};
use crate::abelian::{valuation, Atom, GradedTame, Prime, TameGroup};
use crate::intlinalg::{cokernel_invariants, smith_normal_form, IntMatrix};

/// `H_n` of a complex as `Z^g / diag(moduli)` with explicit maps to and
/// from chains. Unit invariant factors are dropped; a zero modulus is a free
/// summand.
#[derive(Clone, Debug)]
pub struct HomologyCoordinates {
    pub moduli: Vec<BigInt>,
    /// `g x rank(n)`: sends a cycle to its class.
    pub projection: IntMatrix,
    /// `rank(n) x g`: column `i` is a cycle representing generator `i`.
    pub representatives: IntMatrix,
}

impl HomologyCoordinates {
    pub fn compute(c: &FreeComplex, n: i64) -> Self {
        let outgoing = smith_normal_form(&c.diff(n));
        let r = outgoing.rank();
        let rank_n = c.rank(n);
        let kernel_rows: Vec<usize> = (r..rank_n).collect();
        let all_cols = |m: &IntMatrix| (0..m.cols()).collect::<Vec<_>>();
        let all_rows = |m: &IntMatrix| (0..m.rows()).collect::<Vec<_>>();
        // Cycles in kernel coordinates: rows r.. of v^{-1}.
        let to_kernel = outgoing.v_inv.submatrix(&kernel_rows, &all_cols(&outgoing.v_inv));
        let kernel_basis = outgoing.v.submatrix(&all_rows(&outgoing.v), &kernel_rows);
        let boundaries = to_kernel.mul(&c.diff(n + 1));
        let rel = smith_normal_form(&boundaries);
        let diag = rel.diagonal();
        let z = kernel_rows.len();
        let keep: Vec<usize> = (0..z).filter(|&i| diag.get(i).is_none_or(|d| !d.is_one())).collect();
        let moduli = keep
            .iter()
            .map(|&i| diag.get(i).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        let projection = rel.u.submatrix(&keep, &all_cols(&rel.u)).mul(&to_kernel);
        let representatives = kernel_basis.mul(&rel.u_inv.submatrix(&all_rows(&rel.u_inv), &keep));
        HomologyCoordinates {
            moduli,
            projection,
            representatives,
        }
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }
}

/// Reduces row `i` of `m` modulo `moduli[i]` (zero moduli are left alone).
fn reduce_rows(m: &mut IntMatrix, moduli: &[BigInt]) {
    for (i, q) in moduli.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            let v = m[(i, j)].mod_floor(q);
            m[(i, j)] = v;
        }
    }
}

/// Exponents of the subgroup of `Z^b / diag(moduli)` generated by the
/// columns of `m`, for finite p-groups.
fn image_exponents(m: &IntMatrix, moduli: &[BigInt], p: Prime) -> Vec<u32> {
    let b = moduli.len();
    if b == 0 {
        return Vec::new();
    }
    let relations = IntMatrix::diagonal(moduli, b, b);
    let span = smith_normal_form(&m.hcat(&relations));
    let d = span.diagonal();
    // Basis of the span: d_i * u^{-1} e_i. Coordinates of the relation
    // generators in that basis: row i of u * relations divided by d_i.
    let mut coords = span.u.mul(&relations);
    for (i, di) in d.iter().enumerate() {
        for j in 0..b {
            let v = &coords[(i, j)] / di;
            coords[(i, j)] = v;
        }
    }
    let inv = cokernel_invariants(&coords);
    debug_assert_eq!(inv.free_rank, 0);
    let mut exps: Vec<u32> = inv
        .torsion
        .iter()
        .map(|t| valuation(t.to_u64().expect("stage group fits in u64"), p))
        .collect();
    exps.sort_unstable();
    exps
}

/// The stable image of stage `k` in a tower of finite groups, found as the
/// first composite length after which the image is unchanged for two more
/// steps. `maps[k]` goes from stage `k + 1` to stage `k`.
fn stable_image(k: usize, maps: &[IntMatrix], groups: &[HomologyCoordinates], p: Prime) -> Option<Vec<u32>> {
    let mut composite = IntMatrix::identity(groups[k].rank());
    let mut history: Vec<Vec<u32>> = vec![image_exponents(&composite, &groups[k].moduli, p)];
    for m in &maps[k..] {
        composite = composite.mul(m);
        reduce_rows(&mut composite, &groups[k].moduli);
        history.push(image_exponents(&composite, &groups[k].moduli, p));
        let h = history.len();
        if h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3] {
            return Some(history[h - 1].clone());
        }
    }
    None
}

/// Raises the `r` largest exponents by one.
fn bump_top(exps: &[u32], r: usize) -> Vec<u32> {
    let mut out = exps.to_vec();
    let len = out.len();
    for e in out.iter_mut().skip(len - r) {
        *e += 1;
    }
    out.sort_unstable();
    out
}

/// Reads the limit `Z_p^r (+) finite` off three consecutive stable images.
fn read_limit(window: &[Vec<u32>], p: Prime) -> Option<TameGroup> {
    let total = |e: &Vec<u32>| e.iter().map(|&x| x as i64).sum::<i64>();
    let r = usize::try_from(total(&window[1]) - total(&window[0])).ok()?;
    for w in window.windows(2) {
        let padded = pad_to(&w[0], w[1].len());
        if r > padded.len() {
            return None;
        }
        if bump_top(&padded, r) != w[1] {
            return None;
        }
    }
    let last = window.last()?;
    let mut atoms = vec![Atom::PadicInts(p); r];
    atoms.extend(
        last[..last.len() - r]
            .iter()
            .filter_map(|&e| Atom::prime_power_cyclic(p, e)),
    );
    Some(TameGroup::new(atoms))
}

/// Left-pads with zero exponents so both lists have `len` entries.
fn pad_to(exps: &[u32], len: usize) -> Vec<u32> {
    let mut out = vec![0; len.saturating_sub(exps.len())];
    out.extend_from_slice(exps);
    out
}

/// `pi_*` of the completion read off the tower `E//p^k`, `k = 1..=stages`.
pub fn tower_oracle(c: &FreeComplex, p: Prime, stages: usize) -> Result<GradedTame, ComplexError> {
    if stages < 3 {
        return Err(ComplexError::StageBudget(stages));
    }
    let pb = BigInt::from(p.get());
    let cones: Vec<FreeComplex> = (1..=stages)
        .map(|k| c.cone_mult(&num_traits::pow(pb.clone(), k)))
        .collect();
    let mut out = GradedTame::new();
    for n in c.lo()..=c.hi() + 1 {
        let groups: Vec<HomologyCoordinates> = cones.iter().map(|x| HomologyCoordinates::compute(x, n)).collect();
        if groups.iter().any(|g| g.moduli.iter().any(Zero::is_zero)) {
            return Err(ComplexError::NoStabilization(format!("H_{n}(E//p^k) is infinite")));
        }
        // Degree n of E//p^k is C_n (+) C_{n-1}; the transition is id (+) p.
        let (top, bottom) = (c.rank(n), c.rank(n - 1));
        let mut phi = IntMatrix::identity(top + bottom);
        for i in top..top + bottom {
            phi[(i, i)] = pb.clone();
        }
        let maps: Vec<IntMatrix> = (0..stages - 1)
            .map(|k| {
                let mut t = groups[k].projection.mul(&phi).mul(&groups[k + 1].representatives);
                reduce_rows(&mut t, &groups[k].moduli);
                t
            })
            .collect();
        let stable: Vec<Vec<u32>> = (0..stages).map_while(|k| stable_image(k, &maps, &groups, p)).collect();
        if stable.len() < 3 {
            return Err(ComplexError::NoStabilization(format!(
                "degree {n}: only {} stable images within {stages} stages",
                stable.len()
            )));
        }
        let window = &stable[stable.len() - 3..];
        let limit = read_limit(window, p).ok_or_else(|| {
            ComplexError::NoStabilization(format!("degree {n}: unrecognized stable images {window:?}"))
        })?;
        out.set(n, limit);
    }
    Ok(out)
}
