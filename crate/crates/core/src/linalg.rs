//! Exact rank and Smith-form computations for the boundary blocks.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense bit-packed matrix over F2, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn row_xor(&mut self, dst: usize, src: usize) {
        let w = self.words;
        if dst == src {
            return;
        }
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    pub fn from_columns(rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = BitMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for &i in col {
                m.flip(i as usize, j);
            }
        }
        m
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (dst, src) = (r * out.words, k * other.words);
                    for w in 0..out.words {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Row-reduces in place, returning the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else { continue };
            if p != r {
                for w in 0..self.words {
                    self.data.swap(p * self.words + w, r * self.words + w);
                }
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.row_xor(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Basis of the kernel, as column vectors of length `cols`.
    pub fn kernel(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let pivot_set: HashSet<usize> = pivots.iter().copied().collect();
        (0..self.cols)
            .filter(|c| !pivot_set.contains(c))
            .map(|free| {
                let mut v = vec![false; self.cols];
                v[free] = true;
                for (r, &pc) in pivots.iter().enumerate() {
                    if m.get(r, free) {
                        v[pc] = true;
                    }
                }
                v
            })
            .collect()
    }

    /// Whether `v` lies in the column span.
    pub fn in_column_span(&self, v: &[bool]) -> bool {
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, v[r]);
        }
        aug.rank() == self.rank()
    }

    pub fn mul_vec(&self, v: &[bool]) -> Vec<bool> {
        (0..self.rows).map(|r| (0..self.cols).filter(|&c| v[c] && self.get(r, c)).count() % 2 == 1).collect()
    }
}

/// Rank over F2 of a sparse matrix given by columns of row indices
/// (duplicates cancel).
pub fn f2_rank(rows: usize, cols: &[Vec<u32>]) -> usize {
    if cols.is_empty() || rows == 0 {
        return 0;
    }
    let nnz: usize = cols.iter().map(|c| c.len()).sum();
    // dense blocks go through the bit-packed path
    let dense_bits = rows as u128 * cols.len() as u128;
    if dense_bits <= 1 << 22 || (dense_bits <= 1 << 26 && (nnz as u128) * 20 >= dense_bits) {
        return BitMatrix::from_columns(rows, cols).rank();
    }
    let mut pivot_of_low: Vec<u32> = vec![u32::MAX; rows];
    let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(cols.len());
    let mut rank = 0;
    for col in cols {
        let mut c = col.clone();
        c.sort_unstable();
        dedup_mod2(&mut c);
        while let Some(&low) = c.last() {
            match pivot_of_low[low as usize] {
                u32::MAX => break,
                p => c = xor_sorted(&c, &reduced[p as usize]),
            }
        }
        if let Some(&low) = c.last() {
            pivot_of_low[low as usize] = reduced.len() as u32;
            rank += 1;
        }
        reduced.push(c);
    }
    rank
}

fn dedup_mod2(c: &mut Vec<u32>) {
    let mut out: Vec<u32> = Vec::with_capacity(c.len());
    for &v in c.iter() {
        if out.last() == Some(&v) {
            out.pop();
        } else {
            out.push(v);
        }
    }
    *c = out;
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Rank and nontrivial invariant factors (all > 1, ascending) of an integer
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegerInvariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Smith-form invariants of a sparse integer matrix given by columns of
/// `(row, value)`.
///
/// Unit pivots are eliminated sparsely with checked `i64` arithmetic; the
/// remaining core goes to dense Smith form, first in `i64`, then in big
/// integers if anything overflows.
pub fn z_invariants(rows: usize, cols: &[Vec<(u32, i64)>]) -> IntegerInvariants {
    match sparse_unit_elimination(rows, cols) {
        Some((rank, core)) => {
            let inv = match dense_smith_i64(&core) {
                Some(v) => v,
                None => dense_smith_big(to_big(&core)),
            };
            finish(rank, inv)
        }
        None => {
            let mut dense = vec![vec![BigInt::zero(); cols.len()]; rows];
            for (j, col) in cols.iter().enumerate() {
                for &(i, v) in col {
                    dense[i as usize][j] += v;
                }
            }
            finish(0, dense_smith_big(dense))
        }
    }
}

fn finish(rank: usize, diag: Vec<BigInt>) -> IntegerInvariants {
    let mut torsion: Vec<BigInt> = diag.iter().filter(|d| !d.is_one()).cloned().collect();
    torsion.sort();
    IntegerInvariants { rank: rank + diag.len(), torsion }
}

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

/// Eliminates unit pivots. Returns the number eliminated and the remaining
/// dense core, or `None` on `i64` overflow.
fn sparse_unit_elimination(rows: usize, cols: &[Vec<(u32, i64)>]) -> Option<(usize, Vec<Vec<i64>>)> {
    let mut columns: Vec<Vec<(u32, i64)>> = cols
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable_by_key(|e| e.0);
            let mut out: Vec<(u32, i64)> = Vec::with_capacity(c.len());
            for (i, v) in c {
                match out.last_mut() {
                    Some(l) if l.0 == i => l.1 += v,
                    _ => out.push((i, v)),
                }
            }
            out.retain(|e| e.1 != 0);
            out
        })
        .collect();
    let mut row_cols: Vec<HashSet<u32>> = vec![HashSet::new(); rows];
    for (j, c) in columns.iter().enumerate() {
        for &(i, _) in c {
            row_cols[i as usize].insert(j as u32);
        }
    }
    let mut alive_col = vec![true; columns.len()];
    let mut alive_row = vec![true; rows];
    let mut rank = 0;
    loop {
        let mut order: Vec<usize> = (0..columns.len()).filter(|&j| alive_col[j] && !columns[j].is_empty()).collect();
        order.sort_by_key(|&j| columns[j].len());
        let mut progressed = false;
        for j in order {
            if !alive_col[j] {
                continue;
            }
            // unit entry whose row is shortest
            let Some(&(pr, pv)) = columns[j]
                .iter()
                .filter(|e| e.1 == 1 || e.1 == -1)
                .min_by_key(|e| row_cols[e.0 as usize].len())
            else {
                continue;
            };
            let pivot_col = std::mem::take(&mut columns[j]);
            for &(i, _) in &pivot_col {
                row_cols[i as usize].remove(&(j as u32));
            }
            let others: Vec<u32> = row_cols[pr as usize].iter().copied().collect();
            for k in others {
                let k = k as usize;
                let f = columns[k].iter().find(|e| e.0 == pr).map(|e| e.1).unwrap();
                // col_k -= (f / pv) * pivot_col, and pv = +-1
                let factor = f.checked_mul(pv)?;
                let updated = axpy(&columns[k], &pivot_col, factor)?;
                for &(i, _) in &columns[k] {
                    row_cols[i as usize].remove(&(k as u32));
                }
                for &(i, _) in &updated {
                    row_cols[i as usize].insert(k as u32);
                }
                columns[k] = updated;
            }
            // drop the pivot row from every remaining column
            debug_assert!(row_cols[pr as usize].is_empty());
            alive_row[pr as usize] = false;
            alive_col[j] = false;
            rank += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let live_rows: Vec<usize> = (0..rows).filter(|&i| alive_row[i] && !row_cols[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..columns.len()).filter(|&j| alive_col[j] && !columns[j].is_empty()).collect();
    let mut row_pos = vec![usize::MAX; rows];
    for (p, &i) in live_rows.iter().enumerate() {
        row_pos[i] = p;
    }
    let mut core = vec![vec![0i64; live_cols.len()]; live_rows.len()];
    for (q, &j) in live_cols.iter().enumerate() {
        for &(i, v) in &columns[j] {
            core[row_pos[i as usize]][q] = v;
        }
    }
    Some((rank, core))
}

/// `a - f * b` on sorted sparse columns, dropping zeros.
fn axpy(a: &[(u32, i64)], b: &[(u32, i64)], f: i64) -> Option<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, b[j].1.checked_mul(f)?.checked_neg()?));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(b[j].1.checked_mul(f)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Integer arithmetic for the dense Smith form; `None` means overflow.
trait SnfInt: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn abs_cmp_key(&self) -> BigInt;
    fn div_floor(&self, other: &Self) -> Self;
    fn is_multiple_of(&self, d: &Self) -> bool;
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn add(&self, b: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl SnfInt for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn abs_cmp_key(&self) -> BigInt {
        BigInt::from(*self).abs()
    }
    fn div_floor(&self, other: &Self) -> Self {
        Integer::div_floor(self, other)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        self % d == 0
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn add(&self, b: &Self) -> Option<Self> {
        self.checked_add(*b)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SnfInt for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_cmp_key(&self) -> BigInt {
        self.abs()
    }
    fn div_floor(&self, other: &Self) -> Self {
        Integer::div_floor(self, other)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn add(&self, b: &Self) -> Option<Self> {
        Some(self + b)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Dense Smith form with optional tracking of the unimodular transforms:
/// afterwards `u * original * v = a`.
struct Smith<T: SnfInt> {
    a: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
}

fn identity<T: SnfInt>(n: usize) -> Vec<Vec<T>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::unit() } else { T::nil() }).collect()).collect()
}

impl<T: SnfInt> Smith<T> {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v {
                r.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_j
    fn row_op(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        let src = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&src) {
            *x = x.sub_mul(q, y)?;
        }
        if let Some(u) = &mut self.u {
            let src = u[j].clone();
            for (x, y) in u[i].iter_mut().zip(&src) {
                *x = x.sub_mul(q, y)?;
            }
        }
        Some(())
    }

    /// col_i -= q * col_j
    fn col_op(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        for r in &mut self.a {
            r[i] = r[i].sub_mul(q, &r[j])?;
        }
        if let Some(v) = &mut self.v {
            for r in v {
                r[i] = r[i].sub_mul(q, &r[j])?;
            }
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = x.neg();
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = x.neg();
            }
        }
    }

    fn run(&mut self) -> Option<Vec<T>> {
        let (r, c) = (self.rows(), self.cols());
        let mut diag = Vec::new();
        for t in 0..r.min(c) {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(BigInt, usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if !self.a[i][j].is_nil() {
                        let k = self.a[i][j].abs_cmp_key();
                        if best.as_ref().is_none_or(|b| k < b.0) {
                            best = Some((k, i, j));
                        }
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);
            loop {
                let p = self.a[t][t].clone();
                let mut dirty = false;
                for i in t + 1..r {
                    if !self.a[i][t].is_nil() {
                        let q = self.a[i][t].div_floor(&p);
                        self.row_op(i, t, &q)?;
                        dirty |= !self.a[i][t].is_nil();
                    }
                }
                for j in t + 1..c {
                    if !self.a[t][j].is_nil() {
                        let q = self.a[t][j].div_floor(&p);
                        self.col_op(j, t, &q)?;
                        dirty |= !self.a[t][j].is_nil();
                    }
                }
                if dirty {
                    // move the smallest remainder in row/column t to the corner
                    let mut best = (self.a[t][t].abs_cmp_key(), t, t);
                    for i in t + 1..r {
                        if !self.a[i][t].is_nil() && self.a[i][t].abs_cmp_key() < best.0 {
                            best = (self.a[i][t].abs_cmp_key(), i, t);
                        }
                    }
                    for j in t + 1..c {
                        if !self.a[t][j].is_nil() && self.a[t][j].abs_cmp_key() < best.0 {
                            best = (self.a[t][j].abs_cmp_key(), t, j);
                        }
                    }
                    self.swap_rows(t, best.1);
                    self.swap_cols(t, best.2);
                    continue;
                }
                // divisibility of the trailing block
                let p = self.a[t][t].clone();
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !self.a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        // row_t += row_i
                        let row = self.a[i].clone();
                        for (x, y) in self.a[t].iter_mut().zip(&row) {
                            *x = x.add(y)?;
                        }
                        if let Some(u) = &mut self.u {
                            let row = u[i].clone();
                            for (x, y) in u[t].iter_mut().zip(&row) {
                                *x = x.add(y)?;
                            }
                        }
                    }
                    None => break,
                }
            }
            if self.a[t][t].to_big().is_negative() {
                self.negate_row(t);
            }
            diag.push(self.a[t][t].clone());
        }
        Some(diag)
    }
}

fn dense_smith_i64(m: &[Vec<i64>]) -> Option<Vec<BigInt>> {
    let mut s = Smith { a: m.to_vec(), u: None, v: None };
    s.run().map(|d| d.iter().map(|x| x.to_big()).collect())
}

fn dense_smith_big(m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let mut s = Smith { a: m, u: None, v: None };
    s.run().expect("big integers never overflow")
}

/// Result of [`smith_normal_form`]: `u * m * v = d` with `u`, `v` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

/// Full Smith normal form with transforms, for small dense matrices.
pub fn smith_normal_form(m: &[Vec<i64>]) -> SmithForm {
    let a = to_big(m);
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut s = Smith { a, u: Some(identity(r)), v: Some(identity(c)) };
    s.run().expect("big integers never overflow");
    SmithForm { u: s.u.unwrap(), d: s.a, v: s.v.unwrap() }
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if Zero::is_zero(&a[k][k]) {
            match (k + 1..n).find(|&i| !Zero::is_zero(&a[i][k])) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn to_u64(b: &BigInt) -> Option<u64> {
    b.to_u64()
}
