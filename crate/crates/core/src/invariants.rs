//! Alexander polynomial, genus and fiberedness from HFK-hat, and the move
//! invariance harness.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::Coefficients;
use crate::error::{GridError, Result};
use crate::grid::{Axis, Grid, StabilizationVariant};
use crate::homology::BigradedRanks;
use crate::par;
use crate::pipeline::{hat_homology, Options};

/// Laurent polynomial in `t` with integer coefficients, keyed by exponent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlexanderPolynomial {
    coeffs: BTreeMap<i32, i64>,
}

impl AlexanderPolynomial {
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in coeffs {
            *map.entry(e).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        AlexanderPolynomial { coeffs: map }
    }

    pub fn coeff(&self, exponent: i32) -> i64 {
        self.coeffs.get(&exponent).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, i64> {
        &self.coeffs
    }

    /// Largest exponent, 0 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&e, &c)| self.coeff(-e) == c)
    }

    pub fn product(&self, other: &AlexanderPolynomial) -> AlexanderPolynomial {
        AlexanderPolynomial::from_coeffs(
            self.coeffs.iter().flat_map(|(&e, &c)| other.coeffs.iter().map(move |(&e2, &c2)| (e + e2, c * c2))),
        )
    }
}

impl fmt::Display for AlexanderPolynomial {
    /// Descending powers, e.g. `t^3 - t^2 + 1 - t^-2 + t^-3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, (&e, &c)) in self.coeffs.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            let var = match e {
                0 => String::new(),
                1 => "t".into(),
                e => format!("t^{e}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&var)?;
            } else {
                write!(f, "{mag}{var}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for AlexanderPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.coeffs.iter().map(|(e, c)| (e.to_string(), c)))
    }
}

/// The graded Euler characteristic `sum (-1)^M rank t^A`, signed so that
/// its value at 1 is positive.
///
/// Ranks over F2 give the same polynomial as ranks over Z, since the Euler
/// characteristic of a finite free complex does not depend on the field.
pub fn alexander_polynomial(hat: &BigradedRanks) -> Result<AlexanderPolynomial> {
    let mut p = AlexanderPolynomial::from_coeffs(hat.iter().map(|(k, e)| {
        let sign = if k.maslov.rem_euclid(2) == 0 { 1 } else { -1 };
        (k.alexander, sign * e.free as i64)
    }));
    if p.eval_at_one() < 0 {
        p = AlexanderPolynomial::from_coeffs(p.coeffs.iter().map(|(&e, &c)| (e, -c)));
    }
    if !p.is_symmetric() {
        return Err(GridError::AsymmetryDetected(p.to_string()));
    }
    Ok(p)
}

/// Largest Alexander grading carrying nonzero homology.
pub fn genus(hat: &BigradedRanks) -> u32 {
    hat.iter()
        .filter(|(_, e)| e.free > 0 || !e.torsion.is_empty())
        .map(|(k, _)| k.alexander)
        .max()
        .unwrap_or(0)
        .max(0) as u32
}

/// Whether the top Alexander grading carries exactly one copy of Z.
pub fn fibered(hat: &BigradedRanks, coefficients: Coefficients) -> Result<bool> {
    if coefficients != Coefficients::Z {
        return Err(GridError::NeedsIntegers("fiberedness"));
    }
    let g = genus(hat) as i32;
    let top: Vec<_> = hat.iter().filter(|(k, _)| k.alexander == g).collect();
    let free: u64 = top.iter().map(|(_, e)| e.free).sum();
    let torsion = top.iter().any(|(_, e)| !e.torsion.is_empty());
    Ok(free == 1 && !torsion)
}

/// One grid move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum Move {
    Commute { axis: Axis, index: usize },
    Stabilize { row: usize, variant: StabilizationVariant },
    Destabilize { row: usize, col: usize },
}

impl Move {
    pub fn apply(&self, g: &Grid) -> Result<Grid> {
        match *self {
            Move::Commute { axis, index } => g.commute(axis, index),
            Move::Stabilize { row, variant } => g.stabilize(row, variant),
            Move::Destabilize { row, col } => g.destabilize(row, col),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Commute { axis, index } => write!(f, "commute {axis} {index}"),
            Move::Stabilize { row, variant } => write!(f, "stabilize row {row} variant {variant}"),
            Move::Destabilize { row, col } => write!(f, "destabilize at ({col}, {row})"),
        }
    }
}

/// A random sequence of `k` legal moves, keeping the grid number at most
/// `max_n`.
pub fn random_moves<R: Rng + ?Sized>(g: &Grid, k: usize, max_n: usize, rng: &mut R) -> Vec<Move> {
    let mut cur = g.clone();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut options: Vec<Move> =
            cur.legal_commutations().into_iter().map(|(axis, index)| Move::Commute { axis, index }).collect();
        if cur.n() < max_n {
            for row in 0..cur.n() {
                for variant in StabilizationVariant::ALL {
                    options.push(Move::Stabilize { row, variant });
                }
            }
        }
        for (row, col) in cur.destabilization_sites() {
            options.push(Move::Destabilize { row, col });
        }
        let Some(&m) = options.choose(rng) else { break };
        cur = m.apply(&cur).expect("move was listed as legal");
        out.push(m);
    }
    out
}

pub fn seeded_moves(g: &Grid, k: usize, max_n: usize, seed: u64) -> Vec<Move> {
    random_moves(g, k, max_n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceStep {
    pub grid: Grid,
    pub after: Option<Move>,
    pub hat: BigradedRanks,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub steps: Vec<InvarianceStep>,
    /// Index of the first step whose table differs from the initial one.
    pub first_divergence: Option<usize>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.first_divergence.is_none()
    }

    pub fn summary(&self) -> String {
        let total = self.steps.len();
        match self.first_divergence {
            None => format!("PASS: {total}/{total} HFK-hat tables identical"),
            Some(i) => {
                let step = &self.steps[i];
                format!(
                    "FAIL: table {} of {total} differs after {} (grid {})",
                    i + 1,
                    step.after.map_or("start".to_string(), |m| m.to_string()),
                    step.grid.to_inline()
                )
            }
        }
    }
}

/// Applies the moves in order and compares the HFK-hat table of every
/// intermediate grid with the first.
pub fn check_invariance(g: &Grid, moves: &[Move], opts: &Options) -> Result<InvarianceReport> {
    let mut grids = vec![(g.clone(), None)];
    for m in moves {
        let next = m.apply(&grids.last().unwrap().0)?;
        grids.push((next, Some(*m)));
    }
    let inner = Options { execution: crate::par::Execution::Sequential, ..*opts };
    let tables = par::map_slice(opts.execution, &grids, |(grid, _)| hat_homology(grid, &inner));
    let mut steps = Vec::with_capacity(grids.len());
    for ((grid, after), hat) in grids.into_iter().zip(tables) {
        steps.push(InvarianceStep { grid, after, hat: hat? });
    }
    let first_divergence = steps.iter().position(|s| s.hat != steps[0].hat);
    Ok(InvarianceReport { steps, first_divergence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let p = AlexanderPolynomial::from_coeffs([(3, 1), (2, -1), (0, 1), (-2, -1), (-3, 1)]);
        assert_eq!(p.to_string(), "t^3 - t^2 + 1 - t^-2 + t^-3");
        assert_eq!(AlexanderPolynomial::from_coeffs([(1, 1), (0, -1), (-1, 1)]).to_string(), "t - 1 + t^-1");
        assert_eq!(AlexanderPolynomial::from_coeffs([(0, 1)]).to_string(), "1");
        assert_eq!(AlexanderPolynomial::from_coeffs([(1, 2), (0, -3), (-1, 2)]).to_string(), "2t - 3 + 2t^-1");
        assert_eq!(AlexanderPolynomial::from_coeffs([(1, -1), (0, 3), (-1, -1)]).to_string(), "-t + 3 - t^-1");
    }

    #[test]
    fn euler_characteristic() {
        let hat = BigradedRanks::from_free([((2, 1), 1), ((1, 0), 1), ((0, -1), 1)]);
        let d = alexander_polynomial(&hat).unwrap();
        assert_eq!(d.to_string(), "t - 1 + t^-1");
        assert_eq!(genus(&hat), 1);
        assert!(fibered(&hat, Coefficients::Z).unwrap());
        assert!(fibered(&hat, Coefficients::F2).is_err());
        let lopsided = BigradedRanks::from_free([((0, 1), 1), ((0, 0), 2)]);
        assert!(matches!(alexander_polynomial(&lopsided), Err(GridError::AsymmetryDetected(_))));
    }

    #[test]
    fn unknot_stabilized_twice() {
        let g = Grid::new(vec![0, 1], vec![1, 0]).unwrap();
        let moves = [
            Move::Stabilize { row: 0, variant: StabilizationVariant::A },
            Move::Stabilize { row: 1, variant: StabilizationVariant::C },
        ];
        let r = check_invariance(&g, &moves, &Options::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.steps[2].grid.n(), 4);
        assert_eq!(r.steps[2].hat, BigradedRanks::from_free([((0, 0), 1)]));
        assert_eq!(r.summary(), "PASS: 3/3 HFK-hat tables identical");
    }
}
