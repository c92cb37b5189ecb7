//! Inverse limits of towers of cyclic p-groups.
//!
//! Every tower produced atom-wise from a tame group has cyclic p-group stages
//! `Z/p^{e_n}`, connected either by the canonical projections (the tower
//! `A/p^n`) or by multiplication by `p` between the nested torsion subgroups
//! (the tower `A[p^n]`). Limits are read off by pattern, never guessed.

use super::atom::{Atom, Prime};
use super::AbelianError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transition {
    /// `Z/p^{e_{n+1}} -> Z/p^{e_n}` reduction, surjective.
    Projection,
    /// `A[p^{n+1}] -> A[p^n]`, `x -> p x`.
    MultiplyByP,
}

/// Stage `n` (1-based) of the tower is `Z/p^{exponents[n-1]}` (zero if 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicTower {
    pub prime: Prime,
    pub exponents: Vec<u32>,
    pub transition: Transition,
}

/// How many trailing stages must agree before a pattern is accepted.
const WINDOW: usize = 3;

impl CyclicTower {
    /// Exponent of the image of stage `n + j` in stage `n` (both 0-based indices).
    fn image_exponent(&self, n: usize, j: usize) -> u32 {
        match self.transition {
            Transition::Projection => self.exponents[n].min(self.exponents[n + j]),
            // p^j times a cyclic group of exponent e has exponent e - j.
            Transition::MultiplyByP => self.exponents[n + j].saturating_sub(j as u32).min(self.exponents[n]),
        }
    }

    /// The inverse limit as an atom (`None` for the zero group).
    pub fn limit(&self) -> Result<Option<Atom>, AbelianError> {
        let len = self.exponents.len();
        if len < 2 * WINDOW {
            return Err(AbelianError::NotTame(format!(
                "tower of {len} stages is too short to read a limit"
            )));
        }
        // Stable images of the first half of the tower, using the second half
        // as look-ahead.
        let half = len / 2;
        let stable: Vec<u32> = (0..half).map(|n| self.image_exponent(n, len - 1 - n)).collect();
        for (n, &s) in stable.iter().enumerate() {
            let prev = self.image_exponent(n, len - 2 - n);
            if prev != s {
                return Err(AbelianError::NotTame(format!(
                    "images at stage {} have not stabilized",
                    n + 1
                )));
            }
        }
        let tail = &stable[half - WINDOW..];
        if tail.windows(2).all(|w| w[0] == w[1]) {
            return Ok(Atom::prime_power_cyclic(self.prime, tail[0]));
        }
        if tail.windows(2).all(|w| w[1] == w[0] + 1) {
            return Ok(Some(Atom::PadicInts(self.prime)));
        }
        Err(AbelianError::NotTame(format!("unrecognized tower pattern {tail:?}")))
    }
}
