//! Bigraded homology of boundary matrices and the division that recovers
//! HFK-hat from the tilde complex.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::complex::{BoundaryMatrix, Coefficients};
use crate::error::{GridError, Result};
use crate::gradings::Bigrading;
use crate::linalg::{f2_rank, to_u64, z_invariants};
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RankEntry {
    pub free: u64,
    pub torsion: Vec<u64>,
}

/// Homology per bigrading: free rank plus torsion coefficients. Zero
/// entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BigradedRanks {
    entries: BTreeMap<Bigrading, RankEntry>,
}

impl BigradedRanks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_free(ranks: impl IntoIterator<Item = ((i32, i32), u64)>) -> Self {
        let mut out = Self::new();
        for ((m, a), r) in ranks {
            out.add_free(Bigrading::new(m, a), r);
        }
        out
    }

    pub fn add_free(&mut self, at: Bigrading, rank: u64) {
        if rank > 0 {
            self.entries.entry(at).or_default().free += rank;
        }
    }

    pub fn add_torsion(&mut self, at: Bigrading, t: u64) {
        let e = self.entries.entry(at).or_default();
        e.torsion.push(t);
        e.torsion.sort_unstable();
    }

    pub fn free(&self, m: i32, a: i32) -> u64 {
        self.entries.get(&Bigrading::new(m, a)).map_or(0, |e| e.free)
    }

    pub fn get(&self, m: i32, a: i32) -> Option<&RankEntry> {
        self.entries.get(&Bigrading::new(m, a))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bigrading, &RankEntry)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_rank(&self) -> u64 {
        self.entries.values().map(|e| e.free).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.entries.values().any(|e| !e.torsion.is_empty())
    }

    /// Free rank summed over Maslov gradings, per Alexander grading.
    pub fn rank_by_alexander(&self) -> BTreeMap<i32, u64> {
        let mut out = BTreeMap::new();
        for (k, e) in &self.entries {
            if e.free > 0 {
                *out.entry(k.alexander).or_insert(0) += e.free;
            }
        }
        out
    }

    /// Entries summed; torsion lists are concatenated.
    pub fn merge(&mut self, other: &BigradedRanks) {
        for (k, e) in &other.entries {
            let mine = self.entries.entry(*k).or_default();
            mine.free += e.free;
            mine.torsion.extend_from_slice(&e.torsion);
            mine.torsion.sort_unstable();
        }
    }

    /// Free ranks only, for comparisons that ignore torsion.
    pub fn free_part(&self) -> BTreeMap<Bigrading, u64> {
        self.entries.iter().filter(|(_, e)| e.free > 0).map(|(k, e)| (*k, e.free)).collect()
    }
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    m: i32,
    a: i32,
    free: u64,
    torsion: &'a [u64],
}

impl Serialize for BigradedRanks {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|(k, e)| JsonEntry {
            m: k.maslov,
            a: k.alexander,
            free: e.free,
            torsion: &e.torsion,
        }))
    }
}

impl fmt::Display for BigradedRanks {
    /// A table: one row per Alexander grading (descending), one column per
    /// Maslov grading (ascending).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return writeln!(f, "(zero)");
        }
        let ms: Vec<i32> = {
            let mut v: Vec<i32> = self.entries.keys().map(|k| k.maslov).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let as_: Vec<i32> = {
            let mut v: Vec<i32> = self.entries.keys().map(|k| k.alexander).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            v.dedup();
            v
        };
        let cell = |m: i32, a: i32| -> String {
            match self.get(m, a) {
                None => ".".into(),
                Some(e) => {
                    let mut s = if e.free > 0 { e.free.to_string() } else { String::new() };
                    for t in &e.torsion {
                        if !s.is_empty() {
                            s.push('+');
                        }
                        s.push_str(&format!("Z/{t}"));
                    }
                    s
                }
            }
        };
        let width = as_
            .iter()
            .flat_map(|&a| ms.iter().map(move |&m| (m, a)))
            .map(|(m, a)| cell(m, a).len())
            .chain(ms.iter().map(|m| m.to_string().len()))
            .max()
            .unwrap_or(1);
        write!(f, "{:>6}", "A\\M")?;
        for m in &ms {
            write!(f, " {m:>width$}")?;
        }
        writeln!(f)?;
        for &a in &as_ {
            write!(f, "{a:>6}")?;
            for &m in &ms {
                write!(f, " {:>width$}", cell(m, a))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Laurent polynomial in `q` (Maslov) and `t` (Alexander) with
/// non-negative coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PoincarePolynomial {
    pub terms: BTreeMap<(i32, i32), u64>,
}

impl PoincarePolynomial {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(m, a), &c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = |var: &str, e: i32| match e {
                0 => String::new(),
                1 => var.to_string(),
                e => format!("{var}^{e}"),
            };
            let body = format!("{}{}", mono("q", m), mono("t", a));
            match (c, body.is_empty()) {
                (c, true) => write!(f, "{c}")?,
                (1, false) => f.write_str(&body)?,
                (c, false) => write!(f, "{c}{body}")?,
            }
        }
        Ok(())
    }
}

pub fn poincare(r: &BigradedRanks) -> PoincarePolynomial {
    PoincarePolynomial { terms: r.free_part().into_iter().map(|(k, v)| ((k.maslov, k.alexander), v)).collect() }
}

/// Rank and torsion of one differential block.
#[derive(Debug, Clone, Default)]
struct BlockMap {
    rank: u64,
    torsion: Vec<BigInt>,
}

/// Homology of a bigraded complex, computed block by block: the map out of
/// `(M, A)` lands in `(M - 1, A)`.
pub fn homology(b: &BoundaryMatrix, coeffs: Coefficients, exec: Execution) -> Result<BigradedRanks> {
    if coeffs == Coefficients::Z && b.coefficients == Coefficients::F2 {
        return Err(GridError::NeedsIntegers("integer homology of a mod 2 complex"));
    }
    assert!(b.respects_gradings(), "boundary does not lower M by one and preserve A");
    let mut blocks: BTreeMap<Bigrading, Vec<usize>> = BTreeMap::new();
    for (j, g) in b.gradings.iter().enumerate() {
        blocks.entry(*g).or_default().push(j);
    }
    let mut local = vec![0u32; b.dim()];
    for members in blocks.values() {
        for (p, &j) in members.iter().enumerate() {
            local[j] = p as u32;
        }
    }
    let keys: Vec<Bigrading> = blocks.keys().copied().collect();
    let maps: Vec<BlockMap> = par::map_slice(exec, &keys, |key| {
        let members = &blocks[key];
        let target = Bigrading::new(key.maslov - 1, key.alexander);
        let rows = blocks.get(&target).map_or(0, |v| v.len());
        match coeffs {
            Coefficients::F2 => {
                let cols: Vec<Vec<u32>> = members
                    .iter()
                    .map(|&j| b.column(j).iter().filter(|e| e.1 % 2 != 0).map(|e| local[e.0 as usize]).collect())
                    .collect();
                BlockMap { rank: f2_rank(rows, &cols) as u64, torsion: Vec::new() }
            }
            Coefficients::Z => {
                let cols: Vec<Vec<(u32, i64)>> = members
                    .iter()
                    .map(|&j| b.column(j).iter().map(|e| (local[e.0 as usize], e.1 as i64)).collect())
                    .collect();
                let inv = z_invariants(rows, &cols);
                BlockMap { rank: inv.rank as u64, torsion: inv.torsion }
            }
        }
    });
    let by_key: BTreeMap<Bigrading, &BlockMap> = keys.iter().copied().zip(maps.iter()).collect();
    let mut out = BigradedRanks::new();
    for (key, members) in &blocks {
        let out_rank = by_key[key].rank;
        let above = by_key.get(&Bigrading::new(key.maslov + 1, key.alexander));
        let in_rank = above.map_or(0, |m| m.rank);
        let free = members.len() as u64 - out_rank - in_rank;
        out.add_free(*key, free);
        if let Some(m) = above {
            for t in &m.torsion {
                let t = to_u64(t).ok_or_else(|| GridError::OverflowGuard(format!("torsion coefficient {t}")))?;
                out.add_torsion(*key, t);
            }
        }
    }
    Ok(out)
}

/// Divides the Poincare polynomial of the tilde homology by
/// `(1 + q^-1 t^-1)^(n-1)`.
pub fn extract_hat(tilde: &BigradedRanks, n: usize) -> Result<BigradedRanks> {
    if let Some((k, _)) = tilde.iter().find(|(_, e)| !e.torsion.is_empty()) {
        return Err(GridError::TorsionInTilde { m: k.maslov, a: k.alexander });
    }
    let mut cur: BTreeMap<(i32, i32), i64> =
        tilde.free_part().into_iter().map(|(k, v)| ((k.maslov, k.alexander), v as i64)).collect();
    for power in 1..n {
        // divide by (1 + q^-1 t^-1): the quotient at (m, a) is the current
        // coefficient minus the quotient at (m + 1, a + 1)
        let mut quotient: BTreeMap<(i32, i32), i64> = BTreeMap::new();
        let keys: Vec<(i32, i32)> = cur.keys().rev().copied().collect();
        for (m, a) in keys {
            let c = cur[&(m, a)] - quotient.get(&(m + 1, a + 1)).copied().unwrap_or(0);
            if c < 0 {
                return Err(GridError::InexactDivision {
                    power,
                    detail: format!("negative quotient coefficient {c} at (m={m}, a={a})"),
                });
            }
            if c > 0 {
                quotient.insert((m, a), c);
            }
        }
        // the remainder is what the quotient fails to reproduce
        let mut check: BTreeMap<(i32, i32), i64> = BTreeMap::new();
        for (&(m, a), &c) in &quotient {
            *check.entry((m, a)).or_default() += c;
            *check.entry((m - 1, a - 1)).or_default() += c;
        }
        check.retain(|_, v| *v != 0);
        if check != cur {
            return Err(GridError::InexactDivision {
                power,
                detail: "nonzero remainder".into(),
            });
        }
        cur = quotient;
    }
    Ok(BigradedRanks::from_free(cur.into_iter().map(|(k, v)| (k, v as u64))))
}
