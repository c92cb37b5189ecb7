//! Text formats for complexes and for maps between free groups in degree 0.
//!
//! ```text
//! complex := "degrees" lo ".." hi ";" ("rank" n "=" r ";")* ("d" n "=" matrix ";")*
//! matrix  := "[" row (";" row)* "]"      row := int ("," int)*
//! map     := (int | matrix) ":" free "->" free      free := "0" | "Z" ("^" r)?
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;

use super::{ChainMap, ComplexError, FreeComplex};
use crate::intlinalg::IntMatrix;
use crate::text::{Cursor, ParseError};

fn parse_matrix(c: &mut Cursor<'_>) -> Result<Vec<Vec<i64>>, ParseError> {
    c.expect("[")?;
    let mut rows = Vec::new();
    if c.eat("]") {
        return Ok(rows);
    }
    loop {
        let mut row = vec![c.integer()?];
        while c.eat(",") {
            row.push(c.integer()?);
        }
        rows.push(row);
        if c.eat("]") {
            return Ok(rows);
        }
        c.expect(";")?;
    }
}

/// Builds a `rows x cols` matrix from parsed rows; an empty literal is zero.
fn shaped(lit: &[Vec<i64>], degree: i64, rows: usize, cols: usize) -> Result<IntMatrix, ComplexError> {
    if lit.is_empty() {
        return Ok(IntMatrix::zeros(rows, cols));
    }
    let width = lit[0].len();
    if lit.len() != rows || lit.iter().any(|r| r.len() != width) || width != cols {
        return Err(ComplexError::Shape {
            degree,
            expected: (rows, cols),
            found: (lit.len(), width),
        });
    }
    Ok(IntMatrix::from_rows(lit, cols))
}

impl FromStr for FreeComplex {
    type Err = ComplexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Cursor::new(s);
        if !c.eat_keyword("degrees") {
            return Err(c.error("'degrees'").into());
        }
        let lo = c.integer()?;
        c.expect("..")?;
        let hi = c.integer()?;
        c.expect(";")?;
        if hi < lo {
            return Err(ComplexError::EmptyRange { lo, hi });
        }
        let mut ranks = vec![0usize; (hi - lo + 1) as usize];
        let mut literals = Vec::new();
        while !c.at_end() {
            if c.eat_keyword("rank") {
                let start = c.position();
                let n = c.integer()?;
                if n < lo || n > hi {
                    return Err(ParseError {
                        position: start,
                        expected: format!("degree in {lo}..{hi}"),
                        found: n.to_string(),
                    }
                    .into());
                }
                c.expect("=")?;
                ranks[(n - lo) as usize] = c.count()? as usize;
            } else if c.eat_keyword("d") {
                let n = c.integer()?;
                c.expect("=")?;
                literals.push((n, parse_matrix(&mut c)?));
            } else {
                return Err(c.error("'rank', 'd' or end of input").into());
            }
            c.expect(";")?;
        }
        let rank = |n: i64| {
            if n < lo || n > hi {
                0
            } else {
                ranks[(n - lo) as usize]
            }
        };
        let mut diffs = BTreeMap::new();
        for (n, lit) in literals {
            diffs.insert(n, shaped(&lit, n, rank(n - 1), rank(n))?);
        }
        FreeComplex::new(lo, hi, ranks, diffs)
    }
}

fn parse_free_rank(c: &mut Cursor<'_>) -> Result<usize, ParseError> {
    if c.eat("0") {
        return Ok(0);
    }
    if !c.eat_keyword("Z") {
        return Err(c.error("free group Z^r or 0"));
    }
    if c.eat("^") {
        return Ok(c.count()? as usize);
    }
    Ok(1)
}

/// Parses `k: Z^a -> Z^b` (a scalar, needs `a = b`) or `[..]: Z^a -> Z^b`,
/// a map between complexes concentrated in degree 0.
pub fn parse_degree_zero_map(s: &str) -> Result<ChainMap, ComplexError> {
    let mut c = Cursor::new(s);
    enum Lit {
        Scalar(i64),
        Matrix(Vec<Vec<i64>>),
    }
    let lit = if c.peek_char() == Some('[') {
        Lit::Matrix(parse_matrix(&mut c)?)
    } else {
        Lit::Scalar(c.integer()?)
    };
    c.expect(":")?;
    let a = parse_free_rank(&mut c)?;
    c.expect("->")?;
    let before_target = c.position();
    let b = parse_free_rank(&mut c)?;
    c.finish()?;
    let m = match lit {
        Lit::Scalar(k) => {
            if a != b {
                return Err(ParseError {
                    position: before_target,
                    expected: format!("Z^{a} for a scalar map"),
                    found: format!("Z^{b}"),
                }
                .into());
            }
            IntMatrix::scalar(a, &BigInt::from(k))
        }
        Lit::Matrix(rows) => shaped(&rows, 0, b, a)?,
    };
    let free = |r: usize| FreeComplex::new(0, 0, vec![r], BTreeMap::new());
    let mut comps = BTreeMap::new();
    comps.insert(0, m);
    ChainMap::new(free(a)?, free(b)?, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c: FreeComplex = "degrees 0..2; rank 0 = 1; rank 1 = 2; rank 2 = 1; d 1 = [0,0]; d 2 = [2;0];"
            .parse()
            .unwrap();
        assert_eq!(c.rank(1), 2);
        assert_eq!(c, c.to_string().parse().unwrap());
    }

    #[test]
    fn missing_ranks_are_zero() {
        let c: FreeComplex = "degrees -1..1; rank 1 = 1;".parse().unwrap();
        assert_eq!(c.rank(0), 0);
        assert_eq!(c.rank(-1), 0);
    }

    #[test]
    fn nonzero_square_reports_degree() {
        let e = "degrees 0..2; rank 0 = 1; rank 1 = 1; rank 2 = 1; d 1 = [1]; d 2 = [1];"
            .parse::<FreeComplex>()
            .unwrap_err();
        assert_eq!(e, ComplexError::NotAComplex { degree: 1 });
    }

    #[test]
    fn shape_errors() {
        let e = "degrees 0..1; rank 0 = 1; rank 1 = 1; d 1 = [1,2];"
            .parse::<FreeComplex>()
            .unwrap_err();
        assert!(matches!(e, ComplexError::Shape { degree: 1, .. }));
        let e = "degrees 0..1; rank 0 = 1 d 1 = [1];"
            .parse::<FreeComplex>()
            .unwrap_err();
        assert!(matches!(e, ComplexError::Parse(_)));
    }

    #[test]
    fn degree_zero_maps() {
        let f = parse_degree_zero_map("3: Z -> Z").unwrap();
        assert_eq!(f.component(0), IntMatrix::from_rows(&[[3]], 1));
        let f = parse_degree_zero_map("[1,0;0,2;0,0]: Z^2 -> Z^3").unwrap();
        assert_eq!(f.target().rank(0), 3);
        assert!(parse_degree_zero_map("2: Z -> Z^2").is_err());
        assert!(parse_degree_zero_map("0: 0 -> 0").is_ok());
    }
}
