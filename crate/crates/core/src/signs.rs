//! Sign assignments on empty rectangles, found by solving the square and
//! annulus rules as a linear system over F2.
//!
//! The unknowns are the exponents `e` in `s = (-1)^e`, one per empty
//! rectangle leaving a generator. The rules only involve the torus and the
//! generators, never the markings, so one assignment serves every grid of a
//! given size and is cached.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{apply_move, empty_rectangles_from, slot_count, slot_rows, MarkingTable, Rect, RectMove};
use crate::error::{GridError, Result};
use crate::generators::{perm_rank, perm_unrank};
use crate::grid::Grid;
use crate::limits::{factorial, Limits};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintKind {
    /// Two decompositions of one index-2 domain: `e1 + e2 + e3 + e4 = 1`.
    Square,
    /// Width-one annulus bounded by horizontal circles: `e1 + e2 = 0`.
    HorizontalAnnulus,
    /// Width-one annulus bounded by vertical circles: `e1 + e2 = 1`.
    VerticalAnnulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignConstraint {
    pub kind: ConstraintKind,
    pub vars: [u32; 4],
}

impl SignConstraint {
    pub fn vars(&self) -> &[u32] {
        match self.kind {
            ConstraintKind::Square => &self.vars,
            _ => &self.vars[..2],
        }
    }

    pub fn rhs(&self) -> u8 {
        match self.kind {
            ConstraintKind::HorizontalAnnulus => 0,
            _ => 1,
        }
    }

    pub fn is_satisfied(&self, s: &SignAssignment) -> bool {
        let e = self.vars().iter().fold(0u8, |acc, &v| acc ^ (s.signs[v as usize] < 0) as u8);
        e == self.rhs()
    }
}

/// `signs[gen * n(n-1) + slot]` is the sign of the rectangle in `slot`
/// leaving generator `gen` (lexicographic index), or 0 when that slot's
/// rectangle is not empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    n: usize,
    signs: Vec<i8>,
}

impl SignAssignment {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sign(&self, gen: usize, slot: usize) -> i8 {
        self.signs[gen * slot_count(self.n) + slot]
    }

    #[inline]
    pub fn var(&self, gen: usize, slot: usize) -> usize {
        gen * slot_count(self.n) + slot
    }

    /// Generator and slot of a variable.
    pub fn locate(&self, var: usize) -> (usize, usize) {
        (var / slot_count(self.n), var % slot_count(self.n))
    }

    /// The equivalence move: negate every rectangle starting or ending at `gen`.
    pub fn flipped_at(&self, gen: usize) -> SignAssignment {
        let n = self.n;
        let mut out = self.clone();
        let x = perm_unrank(n, gen);
        let mut y = vec![0u8; n];
        for slot in 0..slot_count(n) {
            let (i, j, _) = slot_rows(n, slot);
            out.signs[self.var(gen, slot)] *= -1;
            // the rectangle in the same slot of the swapped generator ends at x
            apply_move(&x, (i as u8, j as u8), &mut y);
            let src = perm_rank(&y);
            out.signs[self.var(src, slot)] *= -1;
        }
        out
    }

    pub fn satisfies(&self, constraints: &[SignConstraint]) -> std::result::Result<(), usize> {
        match constraints.iter().position(|c| !c.is_satisfied(self)) {
            Some(i) => Err(i),
            None => Ok(()),
        }
    }
}

struct Zobrist {
    n: usize,
    rect: Vec<u128>,
}

impl Zobrist {
    fn new(n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51_6e_73);
        let cell: Vec<u128> =
            (0..n * n).map(|_| ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128).collect();
        let mut rect = vec![0u128; n * n * (n + 1) * (n + 1)];
        for col in 0..n {
            for row in 0..n {
                for w in 1..=n {
                    for h in 1..=n {
                        let r = Rect { col: col as u8, row: row as u8, width: w as u8, height: h as u8 };
                        let mut hsh = 0u128;
                        for (c, rr) in r.cells(n) {
                            hsh = hsh.wrapping_add(cell[rr * n + c]);
                        }
                        rect[Self::index(n, &r)] = hsh;
                    }
                }
            }
        }
        Zobrist { n, rect }
    }

    #[inline]
    fn index(n: usize, r: &Rect) -> usize {
        ((r.col as usize * n + r.row as usize) * (n + 1) + r.width as usize) * (n + 1) + r.height as usize
    }

    #[inline]
    fn of(&self, r: &Rect) -> u128 {
        self.rect[Self::index(self.n, r)]
    }
}

/// All square and annulus constraints on `n` grids, grouped per starting
/// generator in lexicographic order.
pub fn sign_constraints(n: usize, exec: Execution) -> Result<Vec<SignConstraint>> {
    if n < 2 {
        return Err(GridError::InvalidGrid("sign constraints need n >= 2".into()));
    }
    let count = factorial(n) as usize;
    let slots = slot_count(n);
    let zob = Zobrist::new(n);
    // markings play no role; any table of the right size will do
    let table = MarkingTable { n, x_cols: vec![0; n], o_cols: vec![0; n] };
    let per_gen = par::map_range(exec, count, |gx| -> std::result::Result<Vec<SignConstraint>, String> {
        let x = perm_unrank(n, gx);
        let mut first: Vec<RectMove> = Vec::new();
        let mut second: Vec<RectMove> = Vec::new();
        let mut y = vec![0u8; n];
        let mut z = vec![0u8; n];
        empty_rectangles_from(&x, &table, &mut first);
        // (target, domain hash, var1, var2, sides equal)
        let mut comps: Vec<(usize, u128, u32, u32, bool)> = Vec::new();
        for r1 in &first {
            apply_move(&x, r1.rows, &mut y);
            let gy = perm_rank(&y);
            empty_rectangles_from(&y, &table, &mut second);
            for r2 in &second {
                apply_move(&y, r2.rows, &mut z);
                let gz = perm_rank(&z);
                comps.push((
                    gz,
                    zob.of(&r1.rect).wrapping_add(zob.of(&r2.rect)),
                    (gx * slots + r1.slot as usize) as u32,
                    (gy * slots + r2.slot as usize) as u32,
                    r1.slot % 2 == r2.slot % 2,
                ));
            }
        }
        comps.sort_unstable();
        let mut out = Vec::new();
        let mut k = 0;
        while k < comps.len() {
            let mut e = k + 1;
            while e < comps.len() && comps[e].0 == comps[k].0 && comps[e].1 == comps[k].1 {
                e += 1;
            }
            let group = &comps[k..e];
            if comps[k].0 == gx {
                if group.len() != 1 {
                    return Err(format!("annulus at generator {gx} has {} decompositions", group.len()));
                }
                let kind = if group[0].4 { ConstraintKind::HorizontalAnnulus } else { ConstraintKind::VerticalAnnulus };
                out.push(SignConstraint { kind, vars: [group[0].2, group[0].3, 0, 0] });
            } else {
                if group.len() != 2 {
                    return Err(format!(
                        "index-2 domain from generator {gx} to {} has {} decompositions",
                        comps[k].0,
                        group.len()
                    ));
                }
                out.push(SignConstraint {
                    kind: ConstraintKind::Square,
                    vars: [group[0].2, group[0].3, group[1].2, group[1].3],
                });
            }
            k = e;
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for part in per_gen {
        all.extend(part.map_err(|detail| GridError::UnsatisfiableSigns { constraint: all.len(), detail })?);
    }
    Ok(all)
}

struct ParityUnionFind {
    parent: Vec<u32>,
    parity: Vec<u8>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n as u32).collect(), parity: vec![0; n] }
    }

    /// Root of `v` and the parity of `v` relative to it.
    fn find(&mut self, v: u32) -> (u32, u8) {
        let mut path = Vec::new();
        let mut cur = v;
        while self.parent[cur as usize] != cur {
            path.push(cur);
            cur = self.parent[cur as usize];
        }
        let root = cur;
        // compress from the top so each parity is relative to the root
        let mut acc = 0u8;
        for &p in path.iter().rev() {
            acc ^= self.parity[p as usize];
            self.parity[p as usize] = acc;
            self.parent[p as usize] = root;
        }
        (root, if path.is_empty() { 0 } else { self.parity[v as usize] })
    }

    /// Imposes `e(a) + e(b) = rhs`; false on contradiction.
    fn union(&mut self, a: u32, b: u32, rhs: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rhs;
        }
        self.parent[rb as usize] = ra;
        self.parity[rb as usize] = pa ^ pb ^ rhs;
        true
    }
}

/// Solves for a sign assignment on `n` grids (uncached).
pub fn solve_signs_for_size(n: usize, exec: Execution) -> Result<SignAssignment> {
    let constraints = sign_constraints(n, exec)?;
    let count = factorial(n) as usize;
    let slots = slot_count(n);
    let nvars = count * slots;
    let unsat = |constraint: usize, detail: String| GridError::UnsatisfiableSigns { constraint, detail };

    let mut uf = ParityUnionFind::new(nvars);
    for (ci, c) in constraints.iter().enumerate() {
        if c.kind != ConstraintKind::Square && !uf.union(c.vars[0], c.vars[1], c.rhs()) {
            return Err(unsat(ci, "annulus constraints contradict each other".into()));
        }
    }

    // value per union-find root
    let mut value: Vec<Option<u8>> = vec![None; nvars];
    let assign = |uf: &mut ParityUnionFind, value: &mut Vec<Option<u8>>, v: u32, e: u8| -> bool {
        let (r, p) = uf.find(v);
        match value[r as usize] {
            Some(old) => old == e ^ p,
            None => {
                value[r as usize] = Some(e ^ p);
                true
            }
        }
    };

    // gauge: zero on a spanning tree of the rectangle graph
    let table = MarkingTable { n, x_cols: vec![0; n], o_cols: vec![0; n] };
    let mut seen = vec![false; count];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut moves = Vec::new();
    let mut y = vec![0u8; n];
    while let Some(g) = queue.pop_front() {
        let x = perm_unrank(n, g);
        empty_rectangles_from(&x, &table, &mut moves);
        for m in &moves {
            apply_move(&x, m.rows, &mut y);
            let gy = perm_rank(&y);
            if !seen[gy] {
                seen[gy] = true;
                if !assign(&mut uf, &mut value, (g * slots + m.slot as usize) as u32, 0) {
                    return Err(unsat(0, "gauge fixing contradicts the annulus constraints".into()));
                }
                queue.push_back(gy);
            }
        }
    }

    // reduce squares to root form: (roots, rhs)
    let mut reduced: Vec<(Vec<u32>, u8)> = Vec::with_capacity(constraints.len());
    for c in &constraints {
        if c.kind != ConstraintKind::Square {
            reduced.push((Vec::new(), 0));
            continue;
        }
        let mut rhs = 1u8;
        let mut roots: Vec<u32> = Vec::with_capacity(4);
        for &v in c.vars() {
            let (r, p) = uf.find(v);
            rhs ^= p;
            if let Some(pos) = roots.iter().position(|&q| q == r) {
                roots.swap_remove(pos);
            } else {
                roots.push(r);
            }
        }
        reduced.push((roots, rhs));
    }

    // unit propagation
    let mut watch: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut unknown: Vec<u8> = vec![0; reduced.len()];
    for (ci, (roots, _)) in reduced.iter().enumerate() {
        for &r in roots {
            if value[r as usize].is_none() {
                unknown[ci] += 1;
                watch.entry(r).or_default().push(ci as u32);
            }
        }
    }
    let mut stack: Vec<u32> = (0..reduced.len() as u32).filter(|&ci| unknown[ci as usize] == 1).collect();
    let set_root = |r: u32, e: u8, value: &mut Vec<Option<u8>>, unknown: &mut Vec<u8>, stack: &mut Vec<u32>| {
        value[r as usize] = Some(e);
        if let Some(cs) = watch.get(&r) {
            for &ci in cs {
                unknown[ci as usize] -= 1;
                if unknown[ci as usize] == 1 {
                    stack.push(ci);
                }
            }
        }
    };
    while let Some(ci) = stack.pop() {
        if unknown[ci as usize] != 1 {
            continue;
        }
        let (roots, rhs) = &reduced[ci as usize];
        let mut acc = *rhs;
        let mut free = None;
        for &r in roots {
            match value[r as usize] {
                Some(e) => acc ^= e,
                None => free = Some(r),
            }
        }
        let r = free.expect("one unknown left");
        set_root(r, acc, &mut value, &mut unknown, &mut stack);
    }

    // elimination on what propagation left open
    let residual: Vec<(Vec<u32>, u8)> = reduced
        .iter()
        .enumerate()
        .filter(|(ci, _)| unknown[*ci] >= 2)
        .map(|(_, (roots, rhs))| {
            let mut acc = *rhs;
            let mut open: Vec<u32> = Vec::new();
            for &r in roots {
                match value[r as usize] {
                    Some(e) => acc ^= e,
                    None => open.push(r),
                }
            }
            open.sort_unstable();
            (open, acc)
        })
        .collect();
    if !residual.is_empty() {
        for (r, e) in eliminate(residual).map_err(|_| unsat(0, "residual system is inconsistent".into()))? {
            value[r as usize] = Some(e);
        }
    }

    let mut signs = vec![0i8; nvars];
    for g in 0..count {
        let x = perm_unrank(n, g);
        empty_rectangles_from(&x, &table, &mut moves);
        for m in &moves {
            let v = (g * slots + m.slot as usize) as u32;
            let (r, p) = uf.find(v);
            let e = value[r as usize].unwrap_or(0) ^ p;
            signs[v as usize] = if e == 0 { 1 } else { -1 };
        }
    }
    let s = SignAssignment { n, signs };
    if let Err(ci) = s.satisfies(&constraints) {
        let c = &constraints[ci];
        let (g, slot) = s.locate(c.vars[0] as usize);
        return Err(unsat(ci, format!("{:?} constraint at generator {g}, slot {slot}", c.kind)));
    }
    Ok(s)
}

/// Sparse Gaussian elimination over F2. Rows are sorted variable lists.
/// Free variables are set to 0.
fn eliminate(rows: Vec<(Vec<u32>, u8)>) -> std::result::Result<Vec<(u32, u8)>, ()> {
    let mut pivots: HashMap<u32, (Vec<u32>, u8)> = HashMap::new();
    let mut order: Vec<u32> = Vec::new();
    for (mut row, mut rhs) in rows {
        while let Some(&lead) = row.first() {
            match pivots.get(&lead) {
                Some((prow, prhs)) => {
                    row = xor_sorted(&row, prow);
                    rhs ^= prhs;
                }
                None => break,
            }
        }
        match row.first() {
            Some(&lead) => {
                pivots.insert(lead, (row, rhs));
                order.push(lead);
            }
            None if rhs == 1 => return Err(()),
            None => {}
        }
    }
    order.sort_unstable();
    let mut value: HashMap<u32, u8> = HashMap::new();
    for &lead in order.iter().rev() {
        let (row, rhs) = &pivots[&lead];
        let e = row[1..].iter().fold(*rhs, |acc, v| acc ^ value.get(v).copied().unwrap_or(0));
        value.insert(lead, e);
    }
    let mut out: Vec<(u32, u8)> = value.into_iter().collect();
    // free variables in pivot rows default to zero
    for (row, _) in pivots.values() {
        for &v in row {
            if !pivots.contains_key(&v) {
                out.push((v, 0));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
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

fn cache() -> &'static Mutex<HashMap<usize, Arc<SignAssignment>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SignAssignment>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The sign assignment for grids of this size, solved once per size.
pub fn solve_signs(g: &Grid, limits: &Limits, exec: Execution) -> Result<Arc<SignAssignment>> {
    let n = g.n();
    limits.check_sign_grid(n)?;
    if let Some(s) = cache().lock().unwrap().get(&n) {
        return Ok(s.clone());
    }
    let s = Arc::new(solve_signs_for_size(n, exec)?);
    cache().lock().unwrap().insert(n, s.clone());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_parity() {
        let mut uf = ParityUnionFind::new(4);
        assert!(uf.union(0, 1, 1));
        assert!(uf.union(1, 2, 1));
        assert_eq!(uf.find(2).1 ^ uf.find(0).1, 0);
        assert!(!uf.union(0, 2, 1));
        assert!(uf.union(2, 3, 0));
    }

    #[test]
    fn elimination_solves_and_detects() {
        let rows = vec![(vec![0, 1, 2], 1), (vec![1, 2], 0), (vec![2, 3], 1)];
        let sol: HashMap<u32, u8> = eliminate(rows.clone()).unwrap().into_iter().collect();
        for (r, rhs) in rows {
            assert_eq!(r.iter().fold(0, |a, v| a ^ sol.get(v).copied().unwrap_or(0)), rhs);
        }
        assert!(eliminate(vec![(vec![0, 1], 1), (vec![0, 1], 0)]).is_err());
    }

    #[test]
    fn unknot_signs_and_annuli() {
        let cs = sign_constraints(2, Execution::Sequential).unwrap();
        let verticals = cs.iter().filter(|c| c.kind == ConstraintKind::VerticalAnnulus).count();
        let horizontals = cs.iter().filter(|c| c.kind == ConstraintKind::HorizontalAnnulus).count();
        // two generators, two annuli of each kind through each
        assert_eq!((verticals, horizontals), (4, 4));
        let s = solve_signs_for_size(2, Execution::Sequential).unwrap();
        for c in cs.iter().filter(|c| c.kind == ConstraintKind::VerticalAnnulus) {
            let prod: i32 = c.vars().iter().map(|&v| s.signs[v as usize] as i32).product();
            assert_eq!(prod, -1);
        }
    }

    #[test]
    fn solutions_for_small_sizes() {
        for n in 2..=5 {
            let cs = sign_constraints(n, Execution::Parallel).unwrap();
            let s = solve_signs_for_size(n, Execution::Parallel).unwrap();
            assert!(s.satisfies(&cs).is_ok(), "n = {n}");
            let f = s.flipped_at(3 % factorial(n) as usize);
            assert!(f.satisfies(&cs).is_ok());
            assert_ne!(f, s);
        }
    }
}
