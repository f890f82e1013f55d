//! Tilde and U-truncated minus boundary operators as sparse column matrices.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{apply_move, empty_rectangles_from, MarkingTable, RectMove};
use crate::error::{GridError, Result};
use crate::generators::{enumerate_generators, perm_rank, GeneratorSet};
use crate::gradings::{graded_bigrading, Bigrading};
use crate::grid::Grid;
use crate::limits::{complex_bytes, factorial, Limits};
use crate::par::{self, Execution};
use crate::signs::SignAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    #[default]
    F2,
    Z,
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Coefficients::F2 => "f2",
            Coefficients::Z => "z",
        })
    }
}

/// What the basis elements of a complex are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// Basis element `j` is generator `j`.
    Generators { n: usize },
    /// Basis element `j` is generator `j / d^n` times `prod U_i^{k_i}` where
    /// `k` is the base-`d` expansion of `j mod d^n` (digit `i` for row `i`).
    Truncated { n: usize, d: u32 },
    /// An arbitrary labelled basis (sub-complexes, test fixtures).
    Abstract,
}

impl Basis {
    pub fn label(&self, j: usize) -> (usize, Vec<u32>) {
        match *self {
            Basis::Generators { .. } | Basis::Abstract => (j, Vec::new()),
            Basis::Truncated { n, d } => {
                let block = (d as usize).pow(n as u32);
                let (g, mut code) = (j / block, j % block);
                let mut k = Vec::with_capacity(n);
                for _ in 0..n {
                    k.push((code % d as usize) as u32);
                    code /= d as usize;
                }
                (g, k)
            }
        }
    }
}

/// Sparse square matrix in compressed columns: column `j` lists the
/// nonzero entries of the boundary of basis element `j`, sorted by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub coefficients: Coefficients,
    pub basis: Basis,
    pub gradings: Vec<Bigrading>,
    col_ptr: Vec<usize>,
    entries: Vec<(u32, i32)>,
}

impl BoundaryMatrix {
    /// Builds from per-column entry lists. Entries are merged, reduced mod 2
    /// for F2, and zeros dropped.
    pub fn from_columns(
        coefficients: Coefficients,
        basis: Basis,
        gradings: Vec<Bigrading>,
        columns: Vec<Vec<(u32, i32)>>,
    ) -> Self {
        assert_eq!(gradings.len(), columns.len());
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut entries = Vec::new();
        col_ptr.push(0);
        for mut col in columns {
            normalize(&mut col, coefficients);
            entries.extend_from_slice(&col);
            col_ptr.push(entries.len());
        }
        BoundaryMatrix { coefficients, basis, gradings, col_ptr, entries }
    }

    pub fn dim(&self) -> usize {
        self.gradings.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[(u32, i32)] {
        &self.entries[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every entry lowers M by one and preserves A.
    pub fn respects_gradings(&self) -> bool {
        (0..self.dim()).all(|j| {
            let gj = self.gradings[j];
            self.column(j).iter().all(|&(i, _)| {
                let gi = self.gradings[i as usize];
                gi.maslov == gj.maslov - 1 && gi.alexander == gj.alexander
            })
        })
    }

    /// Column `j` of the product `self * self`.
    fn square_column(&self, j: usize) -> Vec<(u32, i32)> {
        let mut acc: HashMap<u32, i64> = HashMap::new();
        for &(k, c) in self.column(j) {
            for &(i, c2) in self.column(k as usize) {
                *acc.entry(i).or_default() += c as i64 * c2 as i64;
            }
        }
        let mut out: Vec<(u32, i32)> = acc
            .into_iter()
            .filter_map(|(i, v)| {
                let v = match self.coefficients {
                    Coefficients::F2 => v.rem_euclid(2),
                    Coefficients::Z => v,
                };
                (v != 0).then_some((i, v as i32))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn squares_to_zero(&self, exec: Execution) -> bool {
        par::map_range(exec, self.dim(), |j| self.square_column(j).is_empty()).into_iter().all(|b| b)
    }

    /// Submatrix on the basis elements selected by `keep` (in that order).
    pub fn restrict(&self, keep: &[usize]) -> BoundaryMatrix {
        let mut pos = HashMap::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            pos.insert(old as u32, new as u32);
        }
        let columns = keep
            .iter()
            .map(|&j| self.column(j).iter().filter_map(|&(i, c)| pos.get(&i).map(|&ni| (ni, c))).collect())
            .collect();
        let gradings = keep.iter().map(|&j| self.gradings[j]).collect();
        BoundaryMatrix::from_columns(self.coefficients, Basis::Abstract, gradings, columns)
    }

    /// Sparse triplet dump: a basis manifest, then one "row col value" line
    /// per nonzero entry.
    pub fn to_triplets(&self, gens: Option<&GeneratorSet>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# basis {} {}", self.dim(), self.coefficients);
        for j in 0..self.dim() {
            let g = self.gradings[j];
            let (gi, k) = self.basis.label(j);
            let _ = write!(out, "# {j} m={} a={}", g.maslov, g.alexander);
            if let Some(set) = gens.filter(|_| self.basis != Basis::Abstract) {
                let perm: Vec<String> = set.perm(gi).iter().map(|c| c.to_string()).collect();
                let _ = write!(out, " x={}", perm.join(","));
            }
            if !k.is_empty() {
                let ks: Vec<String> = k.iter().map(|c| c.to_string()).collect();
                let _ = write!(out, " u={}", ks.join(","));
            }
            out.push('\n');
        }
        for j in 0..self.dim() {
            for &(i, c) in self.column(j) {
                let _ = writeln!(out, "{i} {j} {c}");
            }
        }
        out
    }
}

fn normalize(col: &mut Vec<(u32, i32)>, coefficients: Coefficients) {
    col.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, i32)> = Vec::with_capacity(col.len());
    for &(i, c) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += c,
            _ => out.push((i, c)),
        }
    }
    out.retain_mut(|e| {
        if coefficients == Coefficients::F2 {
            e.1 = e.1.rem_euclid(2);
        }
        e.1 != 0
    });
    *col = out;
}

fn rectangle_sign(signs: Option<&SignAssignment>, coefficients: Coefficients, gen: usize, m: &RectMove) -> i32 {
    match (coefficients, signs) {
        (Coefficients::Z, Some(s)) => s.sign(gen, m.slot as usize) as i32,
        _ => 1,
    }
}

fn require_signs(coefficients: Coefficients, signs: Option<&SignAssignment>, n: usize) -> Result<()> {
    match (coefficients, signs) {
        (Coefficients::Z, None) => Err(GridError::NeedsIntegers("integer coefficients need a sign assignment")),
        (Coefficients::Z, Some(s)) if s.n() != n => {
            Err(GridError::InvalidGrid(format!("sign assignment is for n = {}, grid has n = {n}", s.n())))
        }
        _ => Ok(()),
    }
}

/// The fully blocked complex: rectangles avoiding every X and O.
pub fn boundary_tilde(
    g: &Grid,
    gens: &GeneratorSet,
    coefficients: Coefficients,
    signs: Option<&SignAssignment>,
    exec: Execution,
) -> Result<BoundaryMatrix> {
    let n = g.n();
    require_signs(coefficients, signs, n)?;
    let table = MarkingTable::new(g);
    let columns = par::map_range(exec, gens.len(), |gx| {
        let x = gens.perm(gx);
        let mut moves = Vec::new();
        let mut y = vec![0u8; n];
        empty_rectangles_from(x, &table, &mut moves);
        moves
            .iter()
            .filter(|m| m.marks.x == 0 && m.marks.o_mask == 0)
            .map(|m| {
                apply_move(x, m.rows, &mut y);
                (perm_rank(&y) as u32, rectangle_sign(signs, coefficients, gx, m))
            })
            .collect()
    });
    let b = BoundaryMatrix::from_columns(coefficients, Basis::Generators { n }, gens.gradings().to_vec(), columns);
    debug_assert!(b.respects_gradings());
    Ok(b)
}

/// Convenience: enumerate generators and build the tilde complex.
pub fn tilde_complex(
    g: &Grid,
    coefficients: Coefficients,
    signs: Option<&SignAssignment>,
    limits: &Limits,
    exec: Execution,
) -> Result<(GeneratorSet, BoundaryMatrix)> {
    let gens = enumerate_generators(g, limits, exec)?;
    let b = boundary_tilde(g, &gens, coefficients, signs, exec)?;
    Ok((gens, b))
}

/// The minus complex modulo `U_i^d`: rectangles avoiding X, each O passed
/// over multiplying by its `U_i`.
pub fn boundary_minus_truncated(
    g: &Grid,
    gens: &GeneratorSet,
    d: u32,
    coefficients: Coefficients,
    signs: Option<&SignAssignment>,
    limits: &Limits,
    exec: Execution,
) -> Result<BoundaryMatrix> {
    let n = g.n();
    if d == 0 {
        return Err(GridError::InvalidGrid("truncation exponent must be at least 1".into()));
    }
    require_signs(coefficients, signs, n)?;
    let block = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let basis = factorial(n).saturating_mul(block);
    limits.check_memory("truncated minus complex", complex_bytes(n, basis))?;
    if basis > u32::MAX as u128 {
        return Err(GridError::ResourceLimit(format!("truncated basis of {basis} elements is too large")));
    }
    let block = block as usize;
    let table = MarkingTable::new(g);
    let per_gen = par::map_range(exec, gens.len(), |gx| {
        let x = gens.perm(gx);
        let mut moves = Vec::new();
        let mut y = vec![0u8; n];
        empty_rectangles_from(x, &table, &mut moves);
        let targets: Vec<(usize, u32, i32)> = moves
            .iter()
            .filter(|m| m.marks.x == 0)
            .map(|m| {
                apply_move(x, m.rows, &mut y);
                (perm_rank(&y), m.marks.o_mask, rectangle_sign(signs, coefficients, gx, m))
            })
            .collect();
        let base = gens.grading(gx);
        let mut cols = Vec::with_capacity(block);
        let mut grads = Vec::with_capacity(block);
        let mut k = vec![0u32; n];
        for code in 0..block {
            let mut c = code;
            for ki in k.iter_mut() {
                *ki = (c % d as usize) as u32;
                c /= d as usize;
            }
            grads.push(graded_bigrading(base, &k));
            let mut col = Vec::new();
            'rects: for &(gy, mask, s) in &targets {
                let mut code2 = 0usize;
                let mut place = 1usize;
                for (row, &ki) in k.iter().enumerate() {
                    let e = ki + (mask >> row & 1);
                    if e >= d {
                        continue 'rects;
                    }
                    code2 += e as usize * place;
                    place *= d as usize;
                }
                col.push(((gy * block + code2) as u32, s));
            }
            cols.push(col);
        }
        (grads, cols)
    });
    let mut gradings = Vec::with_capacity(gens.len() * block);
    let mut columns = Vec::with_capacity(gens.len() * block);
    for (gr, cs) in per_gen {
        gradings.extend(gr);
        columns.extend(cs);
    }
    let b = BoundaryMatrix::from_columns(coefficients, Basis::Truncated { n, d }, gradings, columns);
    debug_assert!(b.respects_gradings());
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::solve_signs;

    fn unknot() -> Grid {
        Grid::new(vec![0, 1], vec![1, 0]).unwrap()
    }

    fn trefoil() -> Grid {
        Grid::new(vec![0, 1, 2, 3, 4], vec![2, 3, 4, 0, 1]).unwrap()
    }

    #[test]
    fn unknot_tilde_is_zero() {
        let (_, b) = tilde_complex(&unknot(), Coefficients::F2, None, &Limits::default(), Execution::Sequential).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.is_zero());
    }

    #[test]
    fn truncation_one_recovers_tilde() {
        for g in [unknot(), trefoil()] {
            let (gens, t) = tilde_complex(&g, Coefficients::F2, None, &Limits::default(), Execution::Parallel).unwrap();
            let m = boundary_minus_truncated(&g, &gens, 1, Coefficients::F2, None, &Limits::default(), Execution::Parallel)
                .unwrap();
            assert_eq!(m.gradings, t.gradings);
            for j in 0..t.dim() {
                assert_eq!(m.column(j), t.column(j));
            }
        }
    }

    #[test]
    fn trefoil_squares_vanish() {
        let g = trefoil();
        let limits = Limits::default();
        let s = solve_signs(&g, &limits, Execution::Parallel).unwrap();
        for (c, signs) in [(Coefficients::F2, None), (Coefficients::Z, Some(&*s))] {
            let (gens, b) = tilde_complex(&g, c, signs, &limits, Execution::Parallel).unwrap();
            assert!(b.respects_gradings());
            assert!(b.squares_to_zero(Execution::Parallel));
            let m = boundary_minus_truncated(&g, &gens, 2, c, signs, &limits, Execution::Parallel).unwrap();
            assert!(m.respects_gradings());
            assert!(m.squares_to_zero(Execution::Parallel));
        }
    }

    #[test]
    fn integers_need_signs() {
        let r = tilde_complex(&unknot(), Coefficients::Z, None, &Limits::default(), Execution::Sequential);
        assert!(matches!(r, Err(GridError::NeedsIntegers(_))));
    }

    #[test]
    fn triplet_dump() {
        let g = unknot();
        let (gens, _) = tilde_complex(&g, Coefficients::F2, None, &Limits::default(), Execution::Sequential).unwrap();
        let m = boundary_minus_truncated(&g, &gens, 2, Coefficients::F2, None, &Limits::default(), Execution::Sequential)
            .unwrap();
        let text = m.to_triplets(Some(&gens));
        assert!(text.starts_with("# basis 8 f2\n"));
        assert!(text.contains("# 0 m=0 a=0 x=0,1 u=0,0"));
        let entries = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(entries, m.nnz());
    }
}
