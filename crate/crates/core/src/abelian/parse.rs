//! Text grammar for tame groups:
//!
//! ```text
//! group := term ("+" term)* | "0"
//! term  := atom ("^" count)?
//! atom  := "Z" | "Z/" int | "Prufer(" prime ")" | "Q" | "Zp(" prime ")" | "Z[1/" prime "]"
//! ```

use std::str::FromStr;

use super::atom::{Atom, Prime};
use super::group::{GradedTame, TameGroup};
use crate::text::{Cursor, ParseError};

impl FromStr for TameGroup {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Cursor::new(s);
        let g = parse_group(&mut c)?;
        c.finish()?;
        Ok(g)
    }
}

/// `n: group; n: group`, or `0` for the zero graded group.
impl FromStr for GradedTame {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "0" {
            return Ok(GradedTame::new());
        }
        let mut c = Cursor::new(s);
        let mut out = GradedTame::new();
        loop {
            let n = c.integer()?;
            c.expect(":")?;
            let g = parse_group(&mut c)?;
            let sum = out.get(n).direct_sum(&g);
            out.set(n, sum);
            if !c.eat(";") || c.at_end() {
                break;
            }
        }
        c.finish()?;
        Ok(out)
    }
}

pub(crate) fn parse_group(c: &mut Cursor<'_>) -> Result<TameGroup, ParseError> {
    if c.peek_char() == Some('0') {
        c.expect("0")?;
        return Ok(TameGroup::zero());
    }
    let mut atoms = Vec::new();
    loop {
        let term = parse_atom(c)?;
        let mut k = 1;
        if c.eat("^") {
            k = c.count()?;
            if k == 0 {
                return Err(c.error("positive multiplicity"));
            }
        }
        for _ in 0..k {
            atoms.extend_from_slice(&term);
        }
        if !c.eat("+") {
            break;
        }
    }
    Ok(TameGroup::new(atoms))
}

fn parse_prime(c: &mut Cursor<'_>) -> Result<Prime, ParseError> {
    c.skip_ws();
    let start = c.position();
    let v = c.count()?;
    Prime::new(v).map_err(|_| ParseError {
        position: start,
        expected: "prime".into(),
        found: v.to_string(),
    })
}

fn parse_atom(c: &mut Cursor<'_>) -> Result<Vec<Atom>, ParseError> {
    if c.eat_keyword("Zp") {
        c.expect("(")?;
        let q = parse_prime(c)?;
        c.expect(")")?;
        return Ok(vec![Atom::PadicInts(q)]);
    }
    if c.eat_keyword("Prufer") {
        c.expect("(")?;
        let q = parse_prime(c)?;
        c.expect(")")?;
        return Ok(vec![Atom::Prufer(q)]);
    }
    if c.eat_keyword("Q") {
        return Ok(vec![Atom::Rationals]);
    }
    if c.eat_keyword("Z") {
        if c.eat("[") {
            c.expect("1")?;
            c.expect("/")?;
            let q = parse_prime(c)?;
            c.expect("]")?;
            return Ok(vec![Atom::InvertedInt(q)]);
        }
        if c.eat("/") {
            c.skip_ws();
            let start = c.position();
            let m = c.count()?;
            return Atom::cyclic(m).map_err(|_| ParseError {
                position: start,
                expected: "modulus >= 2".into(),
                found: m.to_string(),
            });
        }
        return Ok(vec![Atom::Free]);
    }
    Err(c.error("group atom (Z, Z/m, Prufer(q), Q, Zp(q), Z[1/q]) or 0"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_atom_family() {
        let g: TameGroup = "Z + Z/12 + Prufer(2) + Q + Zp(3) + Z[1/5]".parse().unwrap();
        assert_eq!(g.to_string(), "Z + Z/3 + Z/4 + Prufer(2) + Q + Zp(3) + Z[1/5]");
        assert_eq!("0".parse::<TameGroup>().unwrap(), TameGroup::zero());
    }

    #[test]
    fn whitespace_and_powers() {
        let a: TameGroup = " Z ^ 2+Z / 2^3 + Prufer ( 3 ) + Z[ 1/ 3]".parse().unwrap();
        assert_eq!(a.to_string(), "Z^2 + Z/2^3 + Prufer(3) + Z[1/3]");
        assert_eq!(a, a.to_string().parse().unwrap());
    }

    #[test]
    fn graded_round_trip() {
        let g: GradedTame = "-1: Z/2; 3: Zp(3) + Q".parse().unwrap();
        assert_eq!(g.get(3), "Zp(3) + Q".parse().unwrap());
        assert_eq!(g, g.to_string().parse().unwrap());
        assert!("0".parse::<GradedTame>().unwrap().is_zero());
        assert!("0: 0".parse::<GradedTame>().unwrap().is_zero());
    }

    #[test]
    fn errors_carry_position() {
        let e = "Z + Prufer(4)".parse::<TameGroup>().unwrap_err();
        assert_eq!(e.position, 11);
        assert!(e.expected.contains("prime"));
        let e = "Z + ".parse::<TameGroup>().unwrap_err();
        assert_eq!(e.position, 4);
        let e = "Z/1".parse::<TameGroup>().unwrap_err();
        assert!(e.expected.contains("modulus"));
        let e = "Z Z".parse::<TameGroup>().unwrap_err();
        assert_eq!(e.expected, "end of input");
    }
}
