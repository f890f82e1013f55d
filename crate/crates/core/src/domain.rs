//! Rectangles and domains: 2-chains of torus cells connecting generators.

use serde::Serialize;

use crate::gradings::Generator;
use crate::grid::Grid;

/// A rectangle on the torus: columns `col .. col + width` and rows
/// `row .. row + height`, both taken mod n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rect {
    pub col: u8,
    pub row: u8,
    pub width: u8,
    pub height: u8,
}

impl Rect {
    #[inline]
    pub fn contains_cell(&self, n: usize, col: usize, row: usize) -> bool {
        let dc = (col + n - self.col as usize) % n;
        let dr = (row + n - self.row as usize) % n;
        dc < self.width as usize && dr < self.height as usize
    }

    /// Lattice point strictly inside.
    #[inline]
    pub fn contains_point_interior(&self, n: usize, col: usize, row: usize) -> bool {
        let dc = (col + n - self.col as usize) % n;
        let dr = (row + n - self.row as usize) % n;
        dc > 0 && dc < self.width as usize && dr > 0 && dr < self.height as usize
    }

    pub fn cells(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height as usize).flat_map(move |dr| {
            (0..self.width as usize)
                .map(move |dc| ((self.col as usize + dc) % n, (self.row as usize + dr) % n))
        })
    }
}

/// Number of rectangle slots per generator: two per pair of rows.
pub fn slot_count(n: usize) -> usize {
    n * (n - 1)
}

/// Row pair and side of a slot. Side 0 has its south-west corner on the
/// lower row, side 1 on the upper row (wrapping around the torus).
pub fn slot_rows(n: usize, slot: usize) -> (usize, usize, usize) {
    let pair = slot / 2;
    let side = slot % 2;
    // pairs (i, j), i < j, enumerated row-major
    let mut i = 0;
    let mut rem = pair;
    while rem >= n - 1 - i {
        rem -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + rem, side)
}

pub fn slot_of(n: usize, i: usize, j: usize, side: usize) -> usize {
    debug_assert!(i < j);
    let before: usize = (0..i).map(|k| n - 1 - k).sum();
    (before + (j - i - 1)) * 2 + side
}

/// The rectangle in `slot` whose south-west and north-east corners are the
/// points of `perm` on rows `i` and `j`.
#[inline]
pub fn slot_rect(perm: &[u8], i: usize, j: usize, side: usize) -> Rect {
    let n = perm.len();
    let (a, b) = (perm[i] as usize, perm[j] as usize);
    if side == 0 {
        Rect { col: a as u8, row: i as u8, width: ((b + n - a) % n) as u8, height: (j - i) as u8 }
    } else {
        Rect { col: b as u8, row: j as u8, width: ((a + n - b) % n) as u8, height: (n - (j - i)) as u8 }
    }
}

/// No generator point strictly inside.
#[inline]
pub fn rect_is_empty(perm: &[u8], rect: &Rect) -> bool {
    let n = perm.len();
    (1..rect.height as usize).all(|dr| {
        let r = (rect.row as usize + dr) % n;
        let dc = (perm[r] as usize + n - rect.col as usize) % n;
        !(dc > 0 && dc < rect.width as usize)
    })
}

/// Markings a rectangle covers: how many X, and a bit mask of the rows whose
/// O marking it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct MarkingCount {
    pub x: u8,
    pub o_mask: u32,
}

impl MarkingCount {
    pub fn o(&self) -> u32 {
        self.o_mask.count_ones()
    }
}

/// Precomputed marking columns for fast containment tests.
#[derive(Debug, Clone)]
pub struct MarkingTable {
    pub n: usize,
    pub x_cols: Vec<u8>,
    pub o_cols: Vec<u8>,
}

impl MarkingTable {
    pub fn new(g: &Grid) -> Self {
        MarkingTable {
            n: g.n(),
            x_cols: g.x_cols().iter().map(|&c| c as u8).collect(),
            o_cols: g.o_cols().iter().map(|&c| c as u8).collect(),
        }
    }

    #[inline]
    pub fn count(&self, rect: &Rect) -> MarkingCount {
        let n = self.n;
        let mut out = MarkingCount::default();
        for dr in 0..rect.height as usize {
            let r = (rect.row as usize + dr) % n;
            if (self.x_cols[r] as usize + n - rect.col as usize) % n < rect.width as usize {
                out.x += 1;
            }
            if (self.o_cols[r] as usize + n - rect.col as usize) % n < rect.width as usize {
                out.o_mask |= 1 << r;
            }
        }
        out
    }
}

/// An empty rectangle leaving a generator, as found by slot scanning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectMove {
    pub slot: u16,
    pub rows: (u8, u8),
    pub rect: Rect,
    pub marks: MarkingCount,
}

/// All empty rectangles starting at `perm`, in slot order.
pub fn empty_rectangles_from(perm: &[u8], table: &MarkingTable, out: &mut Vec<RectMove>) {
    out.clear();
    let n = perm.len();
    for i in 0..n {
        for j in i + 1..n {
            for side in 0..2 {
                let rect = slot_rect(perm, i, j, side);
                if rect_is_empty(perm, &rect) {
                    out.push(RectMove {
                        slot: slot_of(n, i, j, side) as u16,
                        rows: (i as u8, j as u8),
                        rect,
                        marks: table.count(&rect),
                    });
                }
            }
        }
    }
}

/// Target generator of a rectangle move: the two row coordinates swapped.
pub fn apply_move(perm: &[u8], rows: (u8, u8), out: &mut [u8]) {
    out.copy_from_slice(perm);
    out.swap(rows.0 as usize, rows.1 as usize);
}

/// Empty rectangle from one generator to another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub corner_sw: (usize, usize),
    pub width: usize,
    pub height: usize,
    pub from: Generator,
    pub to: Generator,
}

impl Rectangle {
    pub fn rect(&self) -> Rect {
        Rect {
            col: self.corner_sw.0 as u8,
            row: self.corner_sw.1 as u8,
            width: self.width as u8,
            height: self.height as u8,
        }
    }

    pub fn domain(&self) -> Domain {
        let n = self.from.n();
        let mut d = Domain::zero(n, self.from.clone(), self.to.clone());
        for (c, r) in self.rect().cells(n) {
            d.coeffs[r * n + c] += 1;
        }
        d
    }
}

/// The empty rectangles from `x` to `y`: none unless the generators differ
/// in exactly two coordinates, and at most two.
pub fn rectangles_between(x: &Generator, y: &Generator) -> Vec<Rectangle> {
    let n = x.n();
    let diff: Vec<usize> = (0..n).filter(|&r| x.perm[r] != y.perm[r]).collect();
    if diff.len() != 2 {
        return Vec::new();
    }
    let (i, j) = (diff[0], diff[1]);
    if x.perm[i] != y.perm[j] || x.perm[j] != y.perm[i] {
        return Vec::new();
    }
    let perm: Vec<u8> = x.perm.iter().map(|&c| c as u8).collect();
    (0..2)
        .map(|side| slot_rect(&perm, i, j, side))
        .filter(|r| rect_is_empty(&perm, r))
        .map(|r| Rectangle {
            corner_sw: (r.col as usize, r.row as usize),
            width: r.width as usize,
            height: r.height as usize,
            from: Generator::new(x.perm.clone()),
            to: Generator::new(y.perm.clone()),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    /// No X and no O marking.
    Tilde,
    /// No X marking.
    Minus,
}

/// Keeps the rectangles allowed by `mode`, paired with their O multiplicities
/// (one entry per O row).
pub fn filter_rectangles(g: &Grid, rs: &[Rectangle], mode: FilterMode) -> Vec<(Rectangle, Vec<u32>)> {
    let table = MarkingTable::new(g);
    rs.iter()
        .filter_map(|r| {
            let m = table.count(&r.rect());
            let keep = m.x == 0 && (mode == FilterMode::Minus || m.o_mask == 0);
            keep.then(|| (r.clone(), (0..g.n()).map(|row| (m.o_mask >> row) & 1).collect()))
        })
        .collect()
}

/// A 2-chain on the torus cells, `coeffs[row * n + col]`, from `from` to `to`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    pub n: usize,
    pub coeffs: Vec<i32>,
    pub from: Generator,
    pub to: Generator,
}

impl Domain {
    pub fn zero(n: usize, from: Generator, to: Generator) -> Self {
        Domain { n, coeffs: vec![0; n * n], from, to }
    }

    #[inline]
    pub fn at(&self, col: usize, row: usize) -> i32 {
        self.coeffs[row * self.n + col]
    }

    /// Sum of the four cells around lattice point `(col, row)`; four times
    /// the point measure.
    pub fn corner_sum(&self, col: usize, row: usize) -> i64 {
        let n = self.n;
        let (cl, rl) = ((col + n - 1) % n, (row + n - 1) % n);
        (self.at(cl, rl) + self.at(col, rl) + self.at(cl, row) + self.at(col, row)) as i64
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add_rect(&mut self, rect: &Rect, k: i32) {
        let n = self.n;
        for (c, r) in rect.cells(n) {
            self.coeffs[r * n + c] += k;
        }
    }

    /// Composition: `self` from x to y followed by `other` from y to z.
    pub fn compose(&self, other: &Domain) -> Domain {
        debug_assert_eq!(self.to.perm, other.from.perm);
        Domain {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            from: self.from.clone(),
            to: other.to.clone(),
        }
    }

    pub fn x_multiplicities(&self, g: &Grid) -> Vec<i32> {
        (0..self.n).map(|r| self.at(g.x_cols()[r], r)).collect()
    }

    pub fn o_multiplicities(&self, g: &Grid) -> Vec<i32> {
        (0..self.n).map(|r| self.at(g.o_cols()[r], r)).collect()
    }

    /// Checks `d(d D restricted to alpha) = to - from`.
    pub fn has_valid_boundary(&self) -> bool {
        let n = self.n;
        for row in 0..n {
            let below = (row + n - 1) % n;
            // alpha segment [c, c+1] on circle `row`, oriented left to right
            let seg = |c: usize| self.at(c, row) - self.at(c, below);
            for c in 0..n {
                let got = seg((c + n - 1) % n) - seg(c);
                let want = (self.to.perm[row] == c) as i32 - (self.from.perm[row] == c) as i32;
                if got != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Which constraints [`connecting_domain`] imposes on marking coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainMode {
    /// Any domain; the canonical staircase is returned.
    Unconstrained,
    /// Zero at every X and every O.
    ZeroXO,
    /// Zero at every X, prescribed multiplicity at the O of each row.
    ZeroX { o_mult: Vec<i32> },
}

/// Sum of signed planar rectangles moving `x` to `y` one row at a time.
pub fn staircase_domain(x: &Generator, y: &Generator) -> Domain {
    let n = x.n();
    let mut d = Domain::zero(n, x.clone(), y.clone());
    let mut cur = x.perm.clone();
    for r in 0..n {
        if cur[r] == y.perm[r] {
            continue;
        }
        let s = (r + 1..n).find(|&s| cur[s] == y.perm[r]).expect("y is a permutation");
        let (a, b) = (cur[r], cur[s]);
        let (col, width, k) = if a < b { (a, b - a, 1) } else { (b, a - b, -1) };
        let rect = Rect { col: col as u8, row: r as u8, width: width as u8, height: (s - r) as u8 };
        d.add_rect(&rect, k);
        cur.swap(r, s);
    }
    d
}

/// The domain from `x` to `y` meeting the marking constraints of `mode`.
/// For knots the constrained domains are unique when they exist.
pub fn connecting_domain(g: &Grid, x: &Generator, y: &Generator, mode: &DomainMode) -> Option<Domain> {
    let base = staircase_domain(x, y);
    let o_target: Vec<i32> = match mode {
        DomainMode::Unconstrained => return Some(base),
        DomainMode::ZeroXO => vec![0; g.n()],
        DomainMode::ZeroX { o_mult } => o_mult.clone(),
    };
    adjust_by_annuli(g, base, &o_target)
}

/// Adds horizontal annuli `a[row]` and vertical annuli `b[col]` so that every
/// X coefficient is zero and the O coefficient of each row is `o_target[row]`.
pub(crate) fn adjust_by_annuli(g: &Grid, mut d: Domain, o_target: &[i32]) -> Option<Domain> {
    let n = g.n();
    let (x_rows, o_rows) = (g.x_rows(), g.o_rows());
    let mut a: Vec<Option<i32>> = vec![None; n];
    let mut b: Vec<Option<i32>> = vec![None; n];
    // constraint along a marking edge (row r, col c): d + a_r + b_c = target
    for start in 0..n {
        if a[start].is_some() {
            continue;
        }
        a[start] = Some(0);
        let mut stack = vec![(true, start)];
        while let Some((is_row, k)) = stack.pop() {
            if is_row {
                let ar = a[k].unwrap();
                for (c, t) in [(g.x_cols()[k], 0), (g.o_cols()[k], o_target[k])] {
                    let need = t - d.at(c, k) - ar;
                    match b[c] {
                        Some(v) if v != need => return None,
                        Some(_) => {}
                        None => {
                            b[c] = Some(need);
                            stack.push((false, c));
                        }
                    }
                }
            } else {
                let bc = b[k].unwrap();
                for (r, t) in [(x_rows[k], 0), (o_rows[k], o_target[o_rows[k]])] {
                    let need = t - d.at(k, r) - bc;
                    match a[r] {
                        Some(v) if v != need => return None,
                        Some(_) => {}
                        None => {
                            a[r] = Some(need);
                            stack.push((true, r));
                        }
                    }
                }
            }
        }
    }
    for r in 0..n {
        for c in 0..n {
            d.coeffs[r * n + c] += a[r].unwrap() + b[c].unwrap();
        }
    }
    Some(d)
}
