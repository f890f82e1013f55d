//! The J pairing and the absolute Maslov and Alexander gradings.
//!
//! Lattice points of the cut-open grid sit at integer coordinates and
//! markings at half-integers, so everything is kept in doubled units and
//! rational values are exact `Ratio<i64>`.

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{GridError, Result};
use crate::grid::Grid;

/// A point of the plane in doubled coordinates: `(x2 / 2, y2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarPoint {
    pub x2: i64,
    pub y2: i64,
}

impl PlanarPoint {
    pub fn lattice(col: usize, row: usize) -> Self {
        PlanarPoint { x2: 2 * col as i64, y2: 2 * row as i64 }
    }

    pub fn cell_center(col: usize, row: usize) -> Self {
        PlanarPoint { x2: 2 * col as i64 + 1, y2: 2 * row as i64 + 1 }
    }
}

/// Formal sum of points with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormalSum {
    pub terms: Vec<(PlanarPoint, Ratio<i64>)>,
}

impl FormalSum {
    pub fn from_points(points: impl IntoIterator<Item = PlanarPoint>) -> Self {
        FormalSum { terms: points.into_iter().map(|p| (p, Ratio::from_integer(1))).collect() }
    }

    pub fn scaled(&self, c: Ratio<i64>) -> Self {
        FormalSum { terms: self.terms.iter().map(|&(p, k)| (p, k * c)).collect() }
    }

    pub fn plus(&self, other: &FormalSum) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        FormalSum { terms }
    }

    pub fn minus(&self, other: &FormalSum) -> Self {
        self.plus(&other.scaled(Ratio::from_integer(-1)))
    }
}

/// `J(a, b)`: one half for every ordered pair of points with
/// `(a1 - b1)(a2 - b2) > 0`, extended bilinearly.
pub fn j_pair(a: &FormalSum, b: &FormalSum) -> Ratio<i64> {
    let half = Ratio::new(1, 2);
    let mut total = Ratio::zero();
    for &(p, cp) in &a.terms {
        for &(q, cq) in &b.terms {
            if (p.x2 - q.x2) * (p.y2 - q.y2) > 0 {
                total += cp * cq * half;
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    /// `perm[row]` is the column of the point on horizontal circle `row`.
    pub perm: Vec<usize>,
    /// U exponents, one per O marking (indexed by the O's row); minus only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_exponents: Option<Vec<u32>>,
}

impl Generator {
    pub fn new(perm: Vec<usize>) -> Self {
        Generator { perm, u_exponents: None }
    }

    pub fn with_exponents(perm: Vec<usize>, exps: Vec<u32>) -> Self {
        Generator { perm, u_exponents: Some(exps) }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn points(&self) -> impl Iterator<Item = PlanarPoint> + '_ {
        self.perm.iter().enumerate().map(|(row, &col)| PlanarPoint::lattice(col, row))
    }

    pub fn formal_sum(&self) -> FormalSum {
        FormalSum::from_points(self.points())
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.perm.len()];
        self.perm.iter().all(|&c| c < seen.len() && !std::mem::replace(&mut seen[c], true))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bigrading {
    #[serde(rename = "m")]
    pub maslov: i32,
    #[serde(rename = "a")]
    pub alexander: i32,
}

impl Bigrading {
    pub const fn new(maslov: i32, alexander: i32) -> Self {
        Bigrading { maslov, alexander }
    }
}

fn o_sum(g: &Grid) -> FormalSum {
    FormalSum::from_points(g.o_cols().iter().enumerate().map(|(r, &c)| PlanarPoint::cell_center(c, r)))
}

fn x_sum(g: &Grid) -> FormalSum {
    FormalSum::from_points(g.x_cols().iter().enumerate().map(|(r, &c)| PlanarPoint::cell_center(c, r)))
}

/// `M(x) = J(x - O, x - O) + 1`, evaluated literally with the J pairing.
pub fn maslov(g: &Grid, x: &Generator) -> i32 {
    let d = x.formal_sum().minus(&o_sum(g));
    let m = j_pair(&d, &d) + Ratio::from_integer(1);
    assert!(m.is_integer(), "Maslov grading must be integral");
    m.to_integer() as i32
}

/// `A(x) = J(x - (X + O)/2, X - O) - (n - 1)/2`, evaluated with the J pairing.
pub fn alexander(g: &Grid, x: &Generator) -> Result<i32> {
    let components = g.link_components();
    if components != 1 {
        return Err(GridError::NonIntegralAlexander { components });
    }
    let (xs, os) = (x_sum(g), o_sum(g));
    let half = Ratio::new(1, 2);
    let left = x.formal_sum().minus(&xs.plus(&os).scaled(half));
    let a = j_pair(&left, &xs.minus(&os)) - Ratio::new(g.n() as i64 - 1, 2);
    if !a.is_integer() {
        return Err(GridError::NonIntegralAlexander { components });
    }
    Ok(a.to_integer() as i32)
}

/// Bigrading of `x * prod U_i^{k_i}`: each U contributes `(-2, -1)`.
pub fn graded_bigrading(base: Bigrading, u_exponents: &[u32]) -> Bigrading {
    let k: i32 = u_exponents.iter().map(|&e| e as i32).sum();
    Bigrading::new(base.maslov - 2 * k, base.alexander - k)
}

/// Fast grading evaluation for many generators of one grid.
///
/// Uses `J(a, b) = (I(a, b) + I(b, a)) / 2` where `I` counts pairs with the
/// first point strictly south-west of the second, which turns both gradings
/// into integer counts.
#[derive(Debug, Clone)]
pub struct Grader {
    n: usize,
    x_pts: Vec<(i64, i64)>,
    o_pts: Vec<(i64, i64)>,
    /// `I(O, O) + 1`
    o_const: i64,
    x_const: i64,
}

fn count_sw(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    let mut c = 0;
    for &(ax, ay) in a {
        for &(bx, by) in b {
            if ax < bx && ay < by {
                c += 1;
            }
        }
    }
    c
}

impl Grader {
    pub fn new(g: &Grid) -> Self {
        let pts = |cols: &[usize]| cols.iter().enumerate().map(|(r, &c)| (2 * c as i64 + 1, 2 * r as i64 + 1)).collect::<Vec<_>>();
        let x_pts = pts(g.x_cols());
        let o_pts = pts(g.o_cols());
        Grader {
            n: g.n(),
            o_const: count_sw(&o_pts, &o_pts) + 1,
            x_const: count_sw(&x_pts, &x_pts) + 1,
            x_pts,
            o_pts,
        }
    }

    fn gen_pts(perm: &[u8]) -> Vec<(i64, i64)> {
        perm.iter().enumerate().map(|(r, &c)| (2 * c as i64, 2 * r as i64)).collect()
    }

    fn m_against(&self, pts: &[(i64, i64)], marks: &[(i64, i64)], konst: i64) -> i64 {
        count_sw(pts, pts) - count_sw(pts, marks) - count_sw(marks, pts) + konst
    }

    /// Maslov grading measured against the O markings.
    pub fn maslov(&self, perm: &[u8]) -> i32 {
        let p = Self::gen_pts(perm);
        self.m_against(&p, &self.o_pts, self.o_const) as i32
    }

    /// `(M, 2A)`; `2A` is odd only for grids of links with an even number of
    /// components.
    pub fn bigrading_doubled(&self, perm: &[u8]) -> (i32, i32) {
        let p = Self::gen_pts(perm);
        let mo = self.m_against(&p, &self.o_pts, self.o_const);
        let mx = self.m_against(&p, &self.x_pts, self.x_const);
        (mo as i32, (mo - mx - (self.n as i64 - 1)) as i32)
    }

    /// Bigrading of a knot-grid generator.
    pub fn bigrading(&self, perm: &[u8]) -> Bigrading {
        let (m, a2) = self.bigrading_doubled(perm);
        debug_assert!(a2 % 2 == 0, "non-integral Alexander grading on a knot grid");
        Bigrading::new(m, a2.div_euclid(2))
    }
}

/// Maslov index of a domain: sum over the points of both generators of the
/// average of the four surrounding cell coefficients.
pub fn maslov_index(d: &Domain, x: &Generator, y: &Generator) -> i32 {
    let quarters: i64 = x
        .perm
        .iter()
        .enumerate()
        .chain(y.perm.iter().enumerate())
        .map(|(row, &col)| d.corner_sum(col, row))
        .sum();
    assert!(quarters % 4 == 0, "Maslov index must be integral, got {quarters}/4");
    (quarters / 4) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unknot() -> Grid {
        Grid::new(vec![0, 1], vec![1, 0]).unwrap()
    }

    #[test]
    fn j_pair_examples() {
        let p = FormalSum::from_points([PlanarPoint::lattice(0, 0)]);
        let q = FormalSum::from_points([PlanarPoint::lattice(1, 1)]);
        assert_eq!(j_pair(&p, &q), Ratio::new(1, 2));
        assert_eq!(j_pair(&p, &p), Ratio::zero());
        let both = p.plus(&q);
        assert_eq!(j_pair(&both, &both), Ratio::from_integer(1));
    }

    #[test]
    fn unknot_gradings() {
        let g = unknot();
        let a = Generator::new(vec![0, 1]);
        let b = Generator::new(vec![1, 0]);
        assert_eq!(maslov(&g, &a), 0);
        assert_eq!(maslov(&g, &b), -1);
        assert_eq!(alexander(&g, &a).unwrap(), 0);
        assert_eq!(alexander(&g, &b).unwrap(), -1);
        let gr = Grader::new(&g);
        assert_eq!(gr.bigrading(&[0, 1]), Bigrading::new(0, 0));
        assert_eq!(gr.bigrading(&[1, 0]), Bigrading::new(-1, -1));
    }

    #[test]
    fn u_powers_shift_bigrading() {
        let b = Bigrading::new(0, 0);
        assert_eq!(graded_bigrading(b, &[0, 0, 0]), b);
        assert_eq!(graded_bigrading(b, &[1, 0, 0]), Bigrading::new(-2, -1));
        assert_eq!(graded_bigrading(b, &[1, 2, 0]), Bigrading::new(-6, -3));
    }

    #[test]
    fn links_are_rejected_for_alexander() {
        let split = Grid::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2]).unwrap();
        let x = Generator::new(vec![0, 1, 2, 3]);
        assert!(matches!(alexander(&split, &x), Err(GridError::NonIntegralAlexander { components: 2 })));
    }
}
