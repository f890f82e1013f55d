#![allow(dead_code)]

use std::collections::BTreeMap;

use gridhfk::complex::BoundaryMatrix;
use gridhfk::{Bigrading, Grid};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Any valid grid (knot or link) with `lo..=hi` rows.
pub fn any_grid(lo: usize, hi: usize) -> impl Strategy<Value = Grid> {
    (lo..=hi, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut x: Vec<usize> = (0..n).collect();
            let mut o: Vec<usize> = (0..n).collect();
            x.shuffle(&mut rng);
            o.shuffle(&mut rng);
            if let Ok(g) = Grid::new(x, o) {
                return g;
            }
        }
    })
}

pub fn any_knot(lo: usize, hi: usize) -> impl Strategy<Value = Grid> {
    (lo..=hi, any::<u64>()).prop_map(|(n, seed)| Grid::random_knot(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

pub fn seeded_knots(sizes: &[usize], seed: u64) -> Vec<Grid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes.iter().map(|&n| Grid::random_knot(n, &mut rng)).collect()
}

/// Rank modulo a large prime; equals the rational rank for these sizes.
pub fn rank_mod_p(rows: usize, cols: &[Vec<(u32, i64)>]) -> usize {
    const P: i64 = 1_000_000_007;
    let mut m = vec![vec![0i64; cols.len()]; rows];
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            m[i as usize][j] = (m[i as usize][j] + v).rem_euclid(P);
        }
    }
    let pow = |mut b: i64, mut e: i64| {
        let mut r = 1i64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols.len() {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = pow(m[rank][c], P - 2);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % P;
                for k in 0..cols.len() {
                    m[r][k] = (m[r][k] - f * m[rank][k]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The naive oracle: dense ranks of every block map.
pub fn dense_free_ranks(b: &BoundaryMatrix, modulus_two: bool) -> BTreeMap<Bigrading, u64> {
    let mut blocks: BTreeMap<Bigrading, Vec<usize>> = BTreeMap::new();
    for (j, g) in b.gradings.iter().enumerate() {
        blocks.entry(*g).or_default().push(j);
    }
    let rank_out = |key: &Bigrading| -> usize {
        let target = Bigrading::new(key.maslov - 1, key.alexander);
        let Some(rows) = blocks.get(&target) else { return 0 };
        let pos: BTreeMap<usize, u32> = rows.iter().enumerate().map(|(p, &j)| (j, p as u32)).collect();
        let cols: Vec<Vec<(u32, i64)>> = blocks[key]
            .iter()
            .map(|&j| b.column(j).iter().map(|&(i, v)| (pos[&(i as usize)], v as i64)).collect())
            .collect();
        if modulus_two {
            let bits: Vec<Vec<u32>> =
                cols.iter().map(|c| c.iter().filter(|e| e.1 % 2 != 0).map(|e| e.0).collect()).collect();
            let mut m = vec![vec![false; bits.len()]; rows.len()];
            for (j, c) in bits.iter().enumerate() {
                for &i in c {
                    m[i as usize][j] ^= true;
                }
            }
            let mut rank = 0;
            for c in 0..bits.len() {
                let Some(p) = (rank..rows.len()).find(|&r| m[r][c]) else { continue };
                m.swap(rank, p);
                for r in 0..rows.len() {
                    if r != rank && m[r][c] {
                        for k in 0..bits.len() {
                            let v = m[rank][k];
                            m[r][k] ^= v;
                        }
                    }
                }
                rank += 1;
            }
            rank
        } else {
            rank_mod_p(rows.len(), &cols)
        }
    };
    let ranks: BTreeMap<Bigrading, usize> = blocks.keys().map(|k| (*k, rank_out(k))).collect();
    blocks
        .iter()
        .map(|(k, members)| {
            let above = ranks.get(&Bigrading::new(k.maslov + 1, k.alexander)).copied().unwrap_or(0);
            (*k, (members.len() - ranks[k] - above) as u64)
        })
        .filter(|(_, v)| *v > 0)
        .collect()
}

