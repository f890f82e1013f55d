//! The grid poset of one Alexander grading: positive-domain order,
//! covering rectangles, components, intervals, the `d_i` tower and the
//! `(s, i, t)` edge labels.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::complex::{Basis, BoundaryMatrix, Coefficients};
use crate::domain::{adjust_by_annuli, apply_move, empty_rectangles_from, staircase_domain, MarkingTable, Rect};
use crate::error::{GridError, Result};
use crate::generators::{enumerate_generators, perm_rank};
use crate::gradings::{graded_bigrading, Bigrading, Generator};
use crate::grid::Grid;
use crate::homology::{homology, BigradedRanks};
use crate::limits::Limits;
use crate::linalg::BitMatrix;
use crate::par::{self, Execution};
use crate::signs::{solve_signs, SignAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PosetMode {
    /// Generators; order by positive domains avoiding every marking.
    Hat,
    /// Truncated minus basis; order by positive domains avoiding X, the U
    /// powers recording the O multiplicities.
    Minus { d: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Element {
    pub perm: Vec<u8>,
    pub u: Vec<u32>,
    pub grading: Bigrading,
}

impl Element {
    pub fn maslov(&self) -> i32 {
        self.grading.maslov
    }

    pub fn generator(&self) -> Generator {
        Generator::new(self.perm.iter().map(|&c| c as usize).collect())
    }
}

/// `upper` covers `lower` by the empty rectangle `rect` (a domain from
/// `upper` to `lower`) sitting in `slot` of `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub upper: usize,
    pub lower: usize,
    pub rect: Rect,
    pub slot: u16,
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct GridPoset {
    pub n: usize,
    pub alexander: i32,
    pub mode: PosetMode,
    pub elements: Vec<Element>,
    pub covers: Vec<Cover>,
    /// Row `x`, column `y` set iff `y <= x`.
    order: BitMatrix,
    /// Covers leaving each element, as indices into `covers`.
    down: Vec<Vec<usize>>,
    /// Covers arriving at each element.
    up: Vec<Vec<usize>>,
    /// Column whose middle carries the reference vertical circle: the one
    /// immediately left of the X in row 0.
    pub ref_col: usize,
    pub coefficients: Coefficients,
}

fn positive_domain_exists(g: &Grid, x: &Element, y: &Element, mode: PosetMode) -> bool {
    let (gx, gy) = (x.generator(), y.generator());
    let o_target: Vec<i32> = match mode {
        PosetMode::Hat => vec![0; g.n()],
        PosetMode::Minus { .. } => x.u.iter().zip(&y.u).map(|(&a, &b)| b as i32 - a as i32).collect(),
    };
    if o_target.iter().any(|&k| k < 0) {
        return false;
    }
    match adjust_by_annuli(g, staircase_domain(&gx, &gy), &o_target) {
        Some(d) => d.is_positive(),
        None => false,
    }
}

/// Builds the poset of Alexander grading `a`. Integer coefficients attach
/// signs to the covers.
pub fn build_poset(
    g: &Grid,
    a: i32,
    mode: PosetMode,
    coefficients: Coefficients,
    limits: &Limits,
    exec: Execution,
) -> Result<GridPoset> {
    if !g.is_knot() {
        return Err(GridError::NonIntegralAlexander { components: g.link_components() });
    }
    let n = g.n();
    let gens = enumerate_generators(g, limits, exec)?;
    let signs: Option<std::sync::Arc<SignAssignment>> = match coefficients {
        Coefficients::Z => Some(solve_signs(g, limits, exec)?),
        Coefficients::F2 => None,
    };
    let d = match mode {
        PosetMode::Hat => 1,
        PosetMode::Minus { d } if d >= 1 => d,
        PosetMode::Minus { .. } => return Err(GridError::InvalidGrid("truncation exponent must be at least 1".into())),
    };
    let mut elements = Vec::new();
    let mut gen_of = Vec::new();
    let exps: Vec<Vec<u32>> = match mode {
        PosetMode::Hat => vec![vec![0; n]],
        PosetMode::Minus { .. } => {
            let block = (d as usize).pow(n as u32);
            (0..block)
                .map(|mut code| {
                    (0..n)
                        .map(|_| {
                            let k = (code % d as usize) as u32;
                            code /= d as usize;
                            k
                        })
                        .collect()
                })
                .collect()
        }
    };
    for gi in 0..gens.len() {
        for k in &exps {
            let grading = graded_bigrading(gens.grading(gi), k);
            if grading.alexander == a {
                elements.push(Element { perm: gens.perm(gi).to_vec(), u: k.clone(), grading });
                gen_of.push(gi);
            }
        }
    }
    limits.check_memory("poset order matrix", (elements.len() as u128).pow(2) / 8)?;
    let index: HashMap<(usize, &[u32]), usize> =
        elements.iter().enumerate().map(|(i, e)| ((gen_of[i], e.u.as_slice()), i)).collect();

    let table = MarkingTable::new(g);
    let per_elem = par::map_range(exec, elements.len(), |xi| {
        let x = &elements[xi];
        let mut moves = Vec::new();
        let mut y = vec![0u8; n];
        empty_rectangles_from(&x.perm, &table, &mut moves);
        let mut out = Vec::new();
        for m in &moves {
            if m.marks.x != 0 || (mode == PosetMode::Hat && m.marks.o_mask != 0) {
                continue;
            }
            let u: Vec<u32> = x.u.iter().enumerate().map(|(row, &k)| k + (m.marks.o_mask >> row & 1)).collect();
            if u.iter().any(|&k| k >= d) {
                continue;
            }
            apply_move(&x.perm, m.rows, &mut y);
            let gy = perm_rank(&y);
            if let Some(&yi) = index.get(&(gy, u.as_slice())) {
                let sign = signs.as_ref().map_or(1, |s| s.sign(gen_of[xi], m.slot as usize));
                out.push(Cover { upper: xi, lower: yi, rect: m.rect, slot: m.slot, sign });
            }
        }
        out
    });
    let covers: Vec<Cover> = per_elem.into_iter().flatten().collect();
    let mut down = vec![Vec::new(); elements.len()];
    let mut up = vec![Vec::new(); elements.len()];
    for (ci, c) in covers.iter().enumerate() {
        down[c.upper].push(ci);
        up[c.lower].push(ci);
    }

    let rows = par::map_range(exec, elements.len(), |xi| {
        let x = &elements[xi];
        (0..elements.len())
            .filter(|&yi| {
                let y = &elements[yi];
                xi == yi || (y.maslov() < x.maslov() && positive_domain_exists(g, x, y, mode))
            })
            .collect::<Vec<usize>>()
    });
    let mut order = BitMatrix::zeros(elements.len(), elements.len());
    for (xi, ys) in rows.iter().enumerate() {
        for &yi in ys {
            order.set(xi, yi, true);
        }
    }
    Ok(GridPoset {
        n,
        alexander: a,
        mode,
        elements,
        covers,
        order,
        down,
        up,
        ref_col: (g.x_cols()[0] + n - 1) % n,
        coefficients,
    })
}

/// One poset per Alexander grading that carries generators.
pub fn build_posets(
    g: &Grid,
    mode: PosetMode,
    coefficients: Coefficients,
    limits: &Limits,
    exec: Execution,
) -> Result<Vec<GridPoset>> {
    let gens = enumerate_generators(g, limits, exec)?;
    let mut a_values: Vec<i32> = gens.gradings().iter().map(|b| b.alexander).collect();
    if let PosetMode::Minus { d } = mode {
        let lowest = *a_values.iter().min().unwrap();
        a_values.extend((1..=(d as i32 - 1) * g.n() as i32).map(|k| lowest - k));
    }
    a_values.sort_unstable();
    a_values.dedup();
    a_values
        .into_iter()
        .rev()
        .map(|a| build_poset(g, a, mode, coefficients, limits, exec))
        .filter(|p| !matches!(p, Ok(p) if p.elements.is_empty()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalShape {
    /// `[y, x]`
    Closed,
    /// `(y, x)`
    Open,
    /// `(y, x]`
    Half,
}

/// Rectangle thickness used as the last label coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Thickness {
    #[default]
    Width,
    Height,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ElLabel {
    pub s: u8,
    pub i: u32,
    pub t: u32,
}

/// The label of a covering rectangle with respect to the vertical circle
/// `l` through the middle of column `ref_col`.
pub fn el_label(n: usize, rect: &Rect, ref_col: usize, thickness: Thickness) -> ElLabel {
    let a = rect.col as usize;
    let crosses = (ref_col + n - a) % n < rect.width as usize;
    let t = match thickness {
        Thickness::Width => rect.width as u32,
        Thickness::Height => rect.height as u32,
    };
    if crosses {
        // going left from l, the circles ref_col, ref_col - 1, ..., a
        ElLabel { s: 0, i: ((ref_col + n - a) % n + 1) as u32, t }
    } else {
        // going right from l, the circles ref_col + 1, ..., a
        ElLabel { s: 1, i: ((a + n - ref_col) % n) as u32, t }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ElCheck {
    pub chains: usize,
    pub increasing: usize,
    pub increasing_is_lex_min: bool,
}

impl ElCheck {
    pub fn passed(&self) -> bool {
        self.increasing == 1 && self.increasing_is_lex_min
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub elements: Vec<usize>,
    pub homology: BigradedRanks,
}

impl GridPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `y <= x`.
    pub fn le(&self, y: usize, x: usize) -> bool {
        self.order.get(x, y)
    }

    pub fn lt(&self, y: usize, x: usize) -> bool {
        x != y && self.le(y, x)
    }

    pub fn find(&self, perm: &[u8], u: &[u32]) -> Option<usize> {
        self.elements.iter().position(|e| e.perm == perm && (u.is_empty() || e.u == u))
    }

    pub fn covers_below(&self, x: usize) -> impl Iterator<Item = &Cover> {
        self.down[x].iter().map(|&c| &self.covers[c])
    }

    pub fn covers_above(&self, y: usize) -> impl Iterator<Item = &Cover> {
        self.up[y].iter().map(|&c| &self.covers[c])
    }

    /// The chain complex of the poset: each element's boundary is the signed
    /// sum of the elements it covers.
    pub fn boundary(&self) -> BoundaryMatrix {
        let mut columns = vec![Vec::new(); self.len()];
        for c in &self.covers {
            columns[c.upper].push((c.lower as u32, c.sign as i32));
        }
        BoundaryMatrix::from_columns(
            self.coefficients,
            Basis::Abstract,
            self.elements.iter().map(|e| e.grading).collect(),
            columns,
        )
    }

    /// Connected components of the covering graph with their homology.
    pub fn components(&self, exec: Execution) -> Result<Vec<Component>> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in &self.covers {
            let (a, b) = (root(&mut parent, c.upper), root(&mut parent, c.lower));
            parent[a] = b;
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.len() {
            let r = root(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        let b = self.boundary();
        let mut out: Vec<Component> = Vec::with_capacity(groups.len());
        for elements in groups.into_values() {
            let sub = b.restrict(&elements);
            let homology = homology(&sub, self.coefficients, exec)?;
            out.push(Component { elements, homology });
        }
        out.sort_by(|a, b| a.elements.len().cmp(&b.elements.len()).then(a.elements.cmp(&b.elements)));
        Ok(out)
    }

    pub fn interval(&self, y: usize, x: usize, shape: IntervalShape) -> Result<Vec<usize>> {
        if !self.le(y, x) {
            return Err(GridError::EmptyInterval);
        }
        Ok((0..self.len())
            .filter(|&z| self.le(y, z) && self.le(z, x))
            .filter(|&z| match shape {
                IntervalShape::Closed => true,
                IntervalShape::Open => z != y && z != x,
                IntervalShape::Half => z != y,
            })
            .collect())
    }

    /// Maximal chains of `[y, x]`, listed bottom-up as cover indices.
    pub fn maximal_chains(&self, y: usize, x: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.chains_from(y, x, &mut path, &mut out);
        out
    }

    fn chains_from(&self, z: usize, x: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if z == x {
            out.push(path.clone());
            return;
        }
        for &ci in &self.up[z] {
            let c = &self.covers[ci];
            if self.le(c.upper, x) {
                path.push(ci);
                self.chains_from(c.upper, x, path, out);
                path.pop();
            }
        }
    }

    pub fn label(&self, cover: &Cover, thickness: Thickness) -> ElLabel {
        el_label(self.n, &cover.rect, self.ref_col, thickness)
    }

    /// Checks that `[y, x]` has exactly one maximal chain with weakly
    /// increasing labels and that it is the lexicographically least.
    pub fn check_el(&self, y: usize, x: usize, thickness: Thickness) -> ElCheck {
        let chains = self.maximal_chains(y, x);
        let labelled: Vec<Vec<ElLabel>> = chains
            .iter()
            .map(|ch| ch.iter().map(|&ci| self.label(&self.covers[ci], thickness)).collect())
            .collect();
        let increasing: Vec<usize> =
            (0..labelled.len()).filter(|&k| labelled[k].windows(2).all(|w| w[0] <= w[1])).collect();
        let min = labelled.iter().min();
        ElCheck {
            chains: chains.len(),
            increasing: increasing.len(),
            increasing_is_lex_min: increasing.len() == 1 && Some(&labelled[increasing[0]]) == min,
        }
    }

    /// `d_i`: each element maps to the sum of the elements below it at
    /// Maslov distance `i`, mod 2.
    pub fn del_tower(&self, i: usize) -> BoundaryMatrix {
        let columns: Vec<Vec<(u32, i32)>> = (0..self.len())
            .map(|x| {
                (0..self.len())
                    .filter(|&y| self.lt(y, x) && self.elements[x].maslov() - self.elements[y].maslov() == i as i32)
                    .map(|y| (y as u32, 1))
                    .collect()
            })
            .collect();
        BoundaryMatrix::from_columns(
            Coefficients::F2,
            Basis::Abstract,
            self.elements.iter().map(|e| e.grading).collect(),
            columns,
        )
    }

    /// Every pair `y < x` with Maslov distance at most `max_len`.
    pub fn comparable_pairs(&self, max_len: i32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in 0..self.len() {
                let d = self.elements[x].maslov() - self.elements[y].maslov();
                if d >= 1 && d <= max_len && self.le(y, x) {
                    out.push((y, x));
                }
            }
        }
        out
    }

    /// Reflexivity, antisymmetry and transitivity of the order.
    pub fn order_is_partial_order(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| self.le(x, x))
            && (0..n).all(|x| (0..n).all(|y| x == y || !(self.le(x, y) && self.le(y, x))))
            && (0..n).all(|x| (0..n).all(|y| !self.le(y, x) || (0..n).all(|z| !self.le(z, y) || self.le(z, x))))
    }
}

/// Results of the tower identities on one poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerCheck {
    /// `(k, sum over i + j = k of d_i d_j vanishes)`
    pub sums: Vec<(usize, bool)>,
    /// `d_2` maps `d_1`-cycles into `d_1`-boundaries.
    pub d2_vanishes_on_homology: bool,
}

impl TowerCheck {
    pub fn passed(&self) -> bool {
        self.d2_vanishes_on_homology && self.sums.iter().all(|s| s.1)
    }
}

pub fn check_tower(p: &GridPoset, max_k: usize) -> TowerCheck {
    // index 0 is a placeholder so that tower[i] is d_i
    let tower: Vec<BitMatrix> = (0..=max_k.max(2)).map(|i| to_bits(&p.del_tower(i.max(1)))).collect();
    let sums = (2..=max_k)
        .map(|k| {
            let mut acc = BitMatrix::zeros(p.len(), p.len());
            for i in 1..k {
                acc = acc.add(&tower[i].mul(&tower[k - i]));
            }
            (k, acc.is_zero())
        })
        .collect();
    let d1 = &tower[1];
    let d2 = &tower[2];
    let d2_vanishes_on_homology =
        d1.kernel().iter().all(|v| d1.in_column_span(&d2.mul_vec(v)));
    TowerCheck { sums, d2_vanishes_on_homology }
}

/// Dense mod 2 copy of a boundary matrix: entry `(i, j)` is the
/// coefficient of basis element `i` in the boundary of `j`.
pub fn to_bits(b: &BoundaryMatrix) -> BitMatrix {
    let mut m = BitMatrix::zeros(b.dim(), b.dim());
    for j in 0..b.dim() {
        for &(i, c) in b.column(j) {
            if c % 2 != 0 {
                m.set(i as usize, j, true);
            }
        }
    }
    m
}
