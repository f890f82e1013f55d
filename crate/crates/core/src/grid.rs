//! Grid diagrams on the torus: representation, text I/O, symmetries and the
//! grid moves.
//!
//! Rows are numbered bottom to top and columns left to right, both `0..n`,
//! matching the torus cut open along the bottom horizontal circle and the
//! left vertical circle. Row `r` holds its X marking in column `x_cols[r]`
//! and its O marking in column `o_cols[r]`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    n: usize,
    x_cols: Vec<usize>,
    o_cols: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    n: usize,
    x: Vec<usize>,
    o: Vec<usize>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = GridError;

    fn try_from(r: GridRepr) -> Result<Self> {
        if r.x.len() != r.n {
            return Err(GridError::InvalidGrid(format!("n = {} but {} X columns", r.n, r.x.len())));
        }
        Grid::new(r.x, r.o)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr { n: g.n, x: g.x_cols, o: g.o_cols }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarkingKind {
    X,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Marking {
    pub kind: MarkingKind,
    pub row: usize,
    pub col: usize,
}

impl Marking {
    /// Planar position `(col + 1/2, row + 1/2)` in doubled units.
    pub fn position_doubled(&self) -> (i64, i64) {
        (2 * self.col as i64 + 1, 2 * self.row as i64 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    R90,
    R180,
    R270,
    /// Reflection in a horizontal line.
    Rh,
    /// Reflection in a vertical line.
    Rv,
}

impl Symmetry {
    pub const ALL: [Symmetry; 5] = [Symmetry::R90, Symmetry::R180, Symmetry::R270, Symmetry::Rh, Symmetry::Rv];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Row => "row",
            Axis::Col => "column",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Row => "row",
            Axis::Col => "col",
        })
    }
}

/// Local pictures of a stabilization. The X being stabilized becomes a 2x2
/// block holding two X markings on one diagonal and one O on the other.
/// `C` and `D` are the half-turn rotations of `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilizationVariant {
    /// X at SW and NE, O at NW.
    A,
    /// X at NW and SE, O at NE.
    B,
    /// X at SW and NE, O at SE.
    C,
    /// X at NW and SE, O at SW.
    D,
}

impl fmt::Display for StabilizationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilizationVariant::A => "a",
            StabilizationVariant::B => "b",
            StabilizationVariant::C => "c",
            StabilizationVariant::D => "d",
        })
    }
}

impl StabilizationVariant {
    pub const ALL: [StabilizationVariant; 4] =
        [StabilizationVariant::A, StabilizationVariant::B, StabilizationVariant::C, StabilizationVariant::D];

    /// Block offsets `(dcol, drow)` of the two X markings and of the O marking.
    fn template(self) -> ([(usize, usize); 2], (usize, usize)) {
        match self {
            StabilizationVariant::A => ([(0, 0), (1, 1)], (0, 1)),
            StabilizationVariant::B => ([(0, 1), (1, 0)], (1, 1)),
            StabilizationVariant::C => ([(0, 0), (1, 1)], (1, 0)),
            StabilizationVariant::D => ([(0, 1), (1, 0)], (0, 0)),
        }
    }

    /// Half-turn rotation of the local picture.
    pub fn rotated(self) -> Self {
        match self {
            StabilizationVariant::A => StabilizationVariant::C,
            StabilizationVariant::B => StabilizationVariant::D,
            StabilizationVariant::C => StabilizationVariant::A,
            StabilizationVariant::D => StabilizationVariant::B,
        }
    }
}

fn check_permutation(cols: &[usize], n: usize, field: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for (row, &c) in cols.iter().enumerate() {
        if c >= n {
            return Err(GridError::InvalidGrid(format!("{field}: row {row} has column {c} out of range 0..{n}")));
        }
        if seen[c] {
            return Err(GridError::InvalidGrid(format!(
                "{field} is not a permutation: column {c} repeated (row {row})"
            )));
        }
        seen[c] = true;
    }
    Ok(())
}

impl Grid {
    pub fn new(x_cols: Vec<usize>, o_cols: Vec<usize>) -> Result<Self> {
        let n = x_cols.len();
        if n < 2 {
            return Err(GridError::InvalidGrid(format!("grid number must be at least 2, got {n}")));
        }
        if o_cols.len() != n {
            return Err(GridError::InvalidGrid(format!("X has {n} entries but O has {}", o_cols.len())));
        }
        check_permutation(&x_cols, n, "X")?;
        check_permutation(&o_cols, n, "O")?;
        if let Some(row) = (0..n).find(|&r| x_cols[r] == o_cols[r]) {
            return Err(GridError::InvalidGrid(format!(
                "row {row}: X and O share column {}",
                x_cols[row]
            )));
        }
        Ok(Grid { n, x_cols, o_cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_cols(&self) -> &[usize] {
        &self.x_cols
    }

    pub fn o_cols(&self) -> &[usize] {
        &self.o_cols
    }

    /// Row of the X marking in each column.
    pub fn x_rows(&self) -> Vec<usize> {
        invert(&self.x_cols)
    }

    /// Row of the O marking in each column.
    pub fn o_rows(&self) -> Vec<usize> {
        invert(&self.o_cols)
    }

    pub fn markings(&self) -> Vec<Marking> {
        let xs = (0..self.n).map(|r| Marking { kind: MarkingKind::X, row: r, col: self.x_cols[r] });
        let os = (0..self.n).map(|r| Marking { kind: MarkingKind::O, row: r, col: self.o_cols[r] });
        xs.chain(os).collect()
    }

    /// Marking in the cell at `(col, row)`, if any.
    pub fn marking_at(&self, col: usize, row: usize) -> Option<MarkingKind> {
        if self.x_cols[row] == col {
            Some(MarkingKind::X)
        } else if self.o_cols[row] == col {
            Some(MarkingKind::O)
        } else {
            None
        }
    }

    /// Number of components of the link: cycles of the map sending a row to
    /// the row reached by walking O -> X horizontally, then X -> O vertically.
    pub fn link_components(&self) -> usize {
        let x_rows = self.x_rows();
        let mut seen = vec![false; self.n];
        let mut cycles = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut r = start;
            while !seen[r] {
                seen[r] = true;
                r = x_rows[self.o_cols[r]];
            }
        }
        cycles
    }

    pub fn is_knot(&self) -> bool {
        self.link_components() == 1
    }

    fn from_markings(n: usize, marks: impl Iterator<Item = Marking>) -> Result<Self> {
        let mut x = vec![usize::MAX; n];
        let mut o = vec![usize::MAX; n];
        for m in marks {
            let slot = match m.kind {
                MarkingKind::X => &mut x[m.row],
                MarkingKind::O => &mut o[m.row],
            };
            if *slot != usize::MAX {
                return Err(GridError::InvalidGrid(format!("row {} received two {:?} markings", m.row, m.kind)));
            }
            *slot = m.col;
        }
        if x.iter().chain(o.iter()).any(|&c| c == usize::MAX) {
            return Err(GridError::InvalidGrid("a row is missing a marking".into()));
        }
        Grid::new(x, o)
    }

    pub fn apply_symmetry(&self, t: Symmetry) -> Grid {
        let n = self.n;
        let m = n - 1;
        let map = |col: usize, row: usize| -> (usize, usize) {
            match t {
                Symmetry::R90 => (m - row, col),
                Symmetry::R180 => (m - col, m - row),
                Symmetry::R270 => (row, m - col),
                Symmetry::Rh => (col, m - row),
                Symmetry::Rv => (m - col, row),
            }
        };
        let marks = self.markings().into_iter().map(|mk| {
            let (col, row) = map(mk.col, mk.row);
            Marking { kind: mk.kind, row, col }
        });
        Grid::from_markings(n, marks).expect("symmetries preserve grid validity")
    }

    /// The same torus diagram cut open along different circles: every row
    /// index moves up by `rows` and every column index right by `cols`.
    pub fn cyclic_shift(&self, rows: usize, cols: usize) -> Grid {
        let n = self.n;
        let mut x = vec![0; n];
        let mut o = vec![0; n];
        for r in 0..n {
            x[(r + rows) % n] = (self.x_cols[r] + cols) % n;
            o[(r + rows) % n] = (self.o_cols[r] + cols) % n;
        }
        Grid { n, x_cols: x, o_cols: o }
    }

    /// Swaps X and O markings.
    pub fn swap_markings(&self) -> Grid {
        Grid { n: self.n, x_cols: self.o_cols.clone(), o_cols: self.x_cols.clone() }
    }

    fn annulus_pair(&self, axis: Axis, index: usize) -> (usize, usize) {
        match axis {
            Axis::Row => (self.x_cols[index], self.o_cols[index]),
            Axis::Col => {
                let (xr, or) = (self.x_rows(), self.o_rows());
                (xr[index], or[index])
            }
        }
    }

    /// Whether the markings of annulus `index` and annulus `index + 1 mod n`
    /// are unlinked on the circle separating them. Pairs sharing a position
    /// count as unlinked.
    pub fn is_commutation_legal(&self, axis: Axis, index: usize) -> bool {
        if index >= self.n {
            return false;
        }
        let next = (index + 1) % self.n;
        let (a, b) = self.annulus_pair(axis, index);
        let (c, d) = self.annulus_pair(axis, next);
        !interleaved(self.n, (a, b), (c, d))
    }

    pub fn commute(&self, axis: Axis, index: usize) -> Result<Grid> {
        let n = self.n;
        let next = (index + 1) % n;
        if index >= n || !self.is_commutation_legal(axis, index) {
            return Err(GridError::IllegalCommutation { axis: axis.name(), index, next });
        }
        let swap = |v: &mut Vec<usize>| v.swap(index, next);
        Ok(match axis {
            Axis::Row => {
                let mut x = self.x_cols.clone();
                let mut o = self.o_cols.clone();
                swap(&mut x);
                swap(&mut o);
                Grid { n, x_cols: x, o_cols: o }
            }
            Axis::Col => {
                let relabel = |c: usize| {
                    if c == index {
                        next
                    } else if c == next {
                        index
                    } else {
                        c
                    }
                };
                let x = self.x_cols.iter().map(|&c| relabel(c)).collect();
                let o = self.o_cols.iter().map(|&c| relabel(c)).collect();
                Grid::new(x, o)?
            }
        })
    }

    /// All legal commutation sites `(axis, index)`.
    pub fn legal_commutations(&self) -> Vec<(Axis, usize)> {
        [Axis::Row, Axis::Col]
            .into_iter()
            .flat_map(|axis| (0..self.n).map(move |i| (axis, i)))
            .filter(|&(axis, i)| self.is_commutation_legal(axis, i))
            .collect()
    }

    /// Stabilizes at the X marking of `row`. The X cell `(c, row)` becomes the
    /// block with columns `c, c + 1` and rows `row, row + 1` of the new grid.
    pub fn stabilize(&self, row: usize, variant: StabilizationVariant) -> Result<Grid> {
        let n = self.n;
        if row >= n {
            return Err(GridError::InvalidGrid(format!("row {row} out of range 0..{n}")));
        }
        let c = self.x_cols[row];
        let shift_col = |k: usize| if k > c { k + 1 } else { k };
        let shift_row = |k: usize| if k > row { k + 1 } else { k };
        let col_o_row = self.o_rows()[c];
        let (xs, o_off) = variant.template();

        let mut x = vec![usize::MAX; n + 1];
        let mut o = vec![usize::MAX; n + 1];
        for r in (0..n).filter(|&r| r != row) {
            x[shift_row(r)] = shift_col(self.x_cols[r]);
            if r != col_o_row {
                o[shift_row(r)] = shift_col(self.o_cols[r]);
            }
        }
        for (dc, dr) in xs {
            x[row + dr] = c + dc;
        }
        o[row + o_off.1] = c + o_off.0;
        // The block row without the new O takes over the old row's O; the
        // block column without it receives the old column's O.
        let free_row = row + 1 - o_off.1;
        let free_col = c + 1 - o_off.0;
        o[free_row] = shift_col(self.o_cols[row]);
        o[shift_row(col_o_row)] = free_col;
        Grid::new(x, o)
    }

    /// Sites `(row, col)` whose 2x2 block (rows `row, row+1`, columns
    /// `col, col+1`, indices mod n) can be destabilized.
    pub fn destabilization_sites(&self) -> Vec<(usize, usize)> {
        if self.n <= 2 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for row in 0..self.n {
            for col in 0..self.n {
                if self.destabilization_block(row, col).is_some() {
                    out.push((row, col));
                }
            }
        }
        out
    }

    /// Recognizes a stabilization block at `(row, col)`: returns the variant.
    fn destabilization_block(&self, row: usize, col: usize) -> Option<StabilizationVariant> {
        let n = self.n;
        let cell = |dc: usize, dr: usize| self.marking_at((col + dc) % n, (row + dr) % n);
        StabilizationVariant::ALL.into_iter().find(|v| {
            let (xs, (oc, or)) = v.template();
            // The fourth cell must be empty; a full block is a split component.
            let (ec, er) = (1 - oc, 1 - or);
            xs.iter().all(|&(dc, dr)| cell(dc, dr) == Some(MarkingKind::X))
                && cell(oc, or) == Some(MarkingKind::O)
                && cell(ec, er).is_none()
        })
    }

    /// Inverse of [`Grid::stabilize`]. For a block that wraps around the cut
    /// the grid is first re-cut so that the block sits at the origin; the
    /// result is then expressed in that cut.
    pub fn destabilize(&self, row: usize, col: usize) -> Result<Grid> {
        let n = self.n;
        let fail = |reason: &str| GridError::NotDestabilizable { row, col, reason: reason.into() };
        if n <= 2 {
            return Err(fail("grid number would drop below 2"));
        }
        if row >= n || col >= n {
            return Err(fail("site out of range"));
        }
        if row + 1 >= n || col + 1 >= n {
            let shifted = self.cyclic_shift(n - row, n - col);
            return shifted.destabilize(0, 0).map_err(|_| fail("block does not match a stabilization picture"));
        }
        let variant = self.destabilization_block(row, col).ok_or_else(|| fail("block does not match a stabilization picture"))?;
        let (_, (oc, or)) = variant.template();
        let free_row = row + 1 - or;
        let free_col = col + 1 - oc;
        let merge_col = |k: usize| if k > col { k - 1 } else { k };
        let merge_row = |k: usize| if k > row { k - 1 } else { k };
        let o_rows = self.o_rows();

        let mut x = vec![usize::MAX; n - 1];
        let mut o = vec![usize::MAX; n - 1];
        for r in (0..n).filter(|&r| r != row && r != row + 1) {
            x[merge_row(r)] = merge_col(self.x_cols[r]);
            o[merge_row(r)] = merge_col(self.o_cols[r]);
        }
        x[row] = col;
        o[row] = merge_col(self.o_cols[free_row]);
        o[merge_row(o_rows[free_col])] = col;
        Grid::new(x, o)
    }

    /// Parses `N;X=a,b,...;O=c,d,...`.
    pub fn parse_inline(s: &str) -> Result<Grid> {
        let parts: Vec<&str> = s.trim().split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(GridError::parse("inline grid", "expected N;X=...;O=..."));
        }
        let n = parse_n(parts[0], "inline grid, N")?;
        let field = |part: &str, name: &str| -> Result<Vec<usize>> {
            let body = part
                .strip_prefix(name)
                .and_then(|s| s.trim_start().strip_prefix('='))
                .ok_or_else(|| GridError::parse(format!("inline grid, {name}"), format!("expected {name}=...")))?;
            parse_cols(body.split(','), n, &format!("inline grid, {name}"))
        };
        let x = field(parts[1], "X")?;
        let o = field(parts[2], "O")?;
        Grid::new(x, o)
    }

    pub fn to_inline(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        format!("{};X={};O={}", self.n, join(&self.x_cols), join(&self.o_cols))
    }

    /// Random grid with `n` rows representing a knot.
    pub fn random_knot<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Grid {
        assert!(n >= 2);
        loop {
            let mut x: Vec<usize> = (0..n).collect();
            let mut o: Vec<usize> = (0..n).collect();
            x.shuffle(rng);
            o.shuffle(rng);
            if let Ok(g) = Grid::new(x, o) {
                if g.is_knot() {
                    return g;
                }
            }
        }
    }
}

fn interleaved(n: usize, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    if c == a || c == b || d == a || d == b {
        return false;
    }
    // Strictly inside the arc going from a towards b.
    let inside = |p: usize| {
        let len = (b + n - a) % n;
        let off = (p + n - a) % n;
        off > 0 && off < len
    };
    inside(c) != inside(d)
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn parse_n(s: &str, location: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|e| GridError::parse(location, format!("bad grid number {s:?}: {e}")))
}

fn parse_cols<'a>(tokens: impl Iterator<Item = &'a str>, n: usize, location: &str) -> Result<Vec<usize>> {
    let cols = tokens
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| {
            t.parse::<usize>().map_err(|e| GridError::parse(format!("{location}, entry {i}"), format!("{t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if cols.len() != n {
        return Err(GridError::parse(location, format!("expected {n} columns, found {}", cols.len())));
    }
    Ok(cols)
}

/// Parses the three-line text format:
///
/// ```text
/// 5
/// X: 0 1 2 3 4
/// O: 2 3 4 0 1
/// ```
pub fn parse_grid(text: &str) -> Result<Grid> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    if lines.len() != 3 {
        return Err(GridError::parse("grid text", format!("expected 3 non-empty lines, found {}", lines.len())));
    }
    let n = parse_n(lines[0], "line 1")?;
    let field = |line: &str, name: &str, lineno: usize| -> Result<Vec<usize>> {
        let body = line
            .strip_prefix(name)
            .and_then(|s| s.strip_prefix(':'))
            .ok_or_else(|| GridError::parse(format!("line {lineno}"), format!("expected \"{name}:\" prefix")))?;
        parse_cols(body.split_whitespace(), n, &format!("line {lineno} ({name})"))
    };
    let x = field(lines[1], "X", 2)?;
    let o = field(lines[2], "O", 3)?;
    Grid::new(x, o).map_err(|e| match e {
        GridError::InvalidGrid(m) => GridError::parse("grid text", m),
        other => other,
    })
}

pub fn serialize_grid(g: &Grid) -> String {
    g.to_string()
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "{}", self.n)?;
        writeln!(f, "X: {}", join(&self.x_cols))?;
        writeln!(f, "O: {}", join(&self.o_cols))
    }
}

impl FromStr for Grid {
    type Err = GridError;

    /// Accepts either the multi-line format or the inline `N;X=..;O=..` form.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains(';') {
            Grid::parse_inline(s)
        } else {
            parse_grid(s)
        }
    }
}
