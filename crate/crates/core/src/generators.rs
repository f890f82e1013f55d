//! Enumeration of grid states (one point on every horizontal and vertical
//! circle, i.e. permutations) in lexicographic order, with O(n^2) ranking.

use crate::error::Result;
use crate::gradings::{Bigrading, Generator, Grader};
use crate::grid::Grid;
use crate::limits::{complex_bytes, factorial, Limits};
use crate::par::{self, Execution};

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    perms: Vec<u8>,
    gradings: Vec<Bigrading>,
}

/// Lexicographic rank of a permutation of `0..n`.
pub fn perm_rank(perm: &[u8]) -> usize {
    let n = perm.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn perm_unrank(n: usize, mut rank: usize) -> Vec<u8> {
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let q = rank / fact[i];
        rank %= fact[i];
        out.push(pool.remove(q));
    }
    out
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All `n!` generators of `g`, each tagged with its bigrading.
pub fn enumerate_generators(g: &Grid, limits: &Limits, exec: Execution) -> Result<GeneratorSet> {
    let n = g.n();
    limits.check_grid(n)?;
    limits.check_memory("generator enumeration", complex_bytes(n, factorial(n)))?;
    let count = factorial(n) as usize;
    let mut perms = Vec::with_capacity(count * n);
    let mut p: Vec<u8> = (0..n as u8).collect();
    loop {
        perms.extend_from_slice(&p);
        if !next_permutation(&mut p) {
            break;
        }
    }
    debug_assert_eq!(perms.len(), count * n);
    let grader = Grader::new(g);
    let gradings = par::map_range(exec, count, |i| grader.bigrading(&perms[i * n..(i + 1) * n]));
    Ok(GeneratorSet { n, perms, gradings })
}

impl GeneratorSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gradings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradings.is_empty()
    }

    pub fn perm(&self, i: usize) -> &[u8] {
        &self.perms[i * self.n..(i + 1) * self.n]
    }

    pub fn grading(&self, i: usize) -> Bigrading {
        self.gradings[i]
    }

    pub fn gradings(&self) -> &[Bigrading] {
        &self.gradings
    }

    pub fn generator(&self, i: usize) -> Generator {
        Generator::new(self.perm(i).iter().map(|&c| c as usize).collect())
    }

    /// Index of a permutation; the set is in lexicographic order.
    pub fn index_of(&self, perm: &[u8]) -> usize {
        perm_rank(perm)
    }

    pub fn index_of_generator(&self, x: &Generator) -> usize {
        let p: Vec<u8> = x.perm.iter().map(|&c| c as u8).collect();
        perm_rank(&p)
    }
}
