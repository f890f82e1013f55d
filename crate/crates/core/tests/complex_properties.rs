mod common;

use common::{any_knot, seeded_knots};
use gridhfk::complex::{boundary_minus_truncated, boundary_tilde, BoundaryMatrix, Coefficients};
use gridhfk::domain::{
    connecting_domain, empty_rectangles_from, rectangles_between, staircase_domain, Domain, DomainMode,
    MarkingTable, Rect,
};
use gridhfk::generators::{enumerate_generators, perm_unrank};
use gridhfk::gradings::maslov_index;
use gridhfk::signs::solve_signs;
use gridhfk::{Execution, Generator, Grid, Limits};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense matrix square, with exact integer arithmetic.
fn squares_to_zero_dense(b: &BoundaryMatrix, modulus: Option<i64>) -> bool {
    let n = b.dim();
    let mut dense = vec![vec![0i64; n]; n];
    for j in 0..n {
        for &(i, c) in b.column(j) {
            dense[i as usize][j] = c as i64;
        }
    }
    for j in 0..n {
        let mut col = vec![0i64; n];
        for &(k, c) in b.column(j) {
            for (i, row) in dense.iter().enumerate() {
                col[i] += row[k as usize] * c as i64;
            }
        }
        let bad = match modulus {
            Some(m) => col.iter().any(|v| v % m != 0),
            None => col.iter().any(|&v| v != 0),
        };
        if bad {
            return false;
        }
    }
    true
}

fn generator(p: &[u8]) -> Generator {
    Generator::new(p.iter().map(|&c| c as usize).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tilde_squares_to_zero_mod_two(g in any_knot(2, 6)) {
        let gens = enumerate_generators(&g, &Limits::default(), Execution::Parallel).unwrap();
        let b = boundary_tilde(&g, &gens, Coefficients::F2, None, Execution::Parallel).unwrap();
        prop_assert!(b.respects_gradings());
        prop_assert!(b.squares_to_zero(Execution::Parallel));
    }

    #[test]
    fn signed_complexes_square_to_zero(g in any_knot(2, 5)) {
        let limits = Limits::default();
        let gens = enumerate_generators(&g, &limits, Execution::Parallel).unwrap();
        let s = solve_signs(&g, &limits, Execution::Parallel).unwrap();
        let b = boundary_tilde(&g, &gens, Coefficients::Z, Some(&s), Execution::Parallel).unwrap();
        prop_assert!(b.squares_to_zero(Execution::Parallel));
        if g.n() <= 4 {
            prop_assert!(squares_to_zero_dense(&b, None));
            let m = boundary_minus_truncated(&g, &gens, 2, Coefficients::Z, Some(&s), &limits, Execution::Parallel).unwrap();
            prop_assert!(m.squares_to_zero(Execution::Parallel));
            prop_assert!(m.respects_gradings());
        }
    }

    #[test]
    fn rectangles_have_index_one(g in any_knot(2, 7), seed in any::<u64>()) {
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = MarkingTable::new(&g);
        let x = perm_unrank(n, rng.gen_range(0..(1..=n).product::<usize>()));
        let mut moves = Vec::new();
        empty_rectangles_from(&x, &table, &mut moves);
        for m in &moves {
            let mut y = x.clone();
            y.swap(m.rows.0 as usize, m.rows.1 as usize);
            let (gx, gy) = (generator(&x), generator(&y));
            let mut d = Domain::zero(n, gx.clone(), gy.clone());
            d.add_rect(&m.rect, 1);
            prop_assert!(d.has_valid_boundary());
            prop_assert_eq!(maslov_index(&d, &gx, &gy), 1);
            let between = rectangles_between(&gx, &gy);
            prop_assert!(!between.is_empty() && between.len() <= 2);
            prop_assert!(between.iter().any(|r| r.rect() == m.rect));
        }
    }

    #[test]
    fn blocked_domains_are_unique(g in any_knot(2, 7), seed in any::<u64>()) {
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count: usize = (1..=n).product();
        let x = generator(&perm_unrank(n, rng.gen_range(0..count)));
        let y = generator(&perm_unrank(n, rng.gen_range(0..count)));
        let Some(d) = connecting_domain(&g, &x, &y, &DomainMode::ZeroXO) else {
            return Ok(());
        };
        prop_assert!(d.x_multiplicities(&g).iter().all(|&k| k == 0));
        prop_assert!(d.o_multiplicities(&g).iter().all(|&k| k == 0));
        // every other domain differs by periodic domains, which must then vanish
        let mut other = staircase_domain(&x, &y);
        for k in 0..n as u8 {
            other.add_rect(&Rect { col: 0, row: k, width: n as u8, height: 1 }, rng.gen_range(-2..=2));
            other.add_rect(&Rect { col: k, row: 0, width: 1, height: n as u8 }, rng.gen_range(-2..=2));
        }
        let o: Vec<i32> = vec![0; n];
        let again = connecting_domain(&g, &x, &y, &DomainMode::ZeroX { o_mult: o }).unwrap();
        prop_assert_eq!(&again.coeffs, &d.coeffs);
        prop_assert!(other.has_valid_boundary());
    }
}

#[test]
fn rectangles_between_needs_a_two_cycle() {
    let x = Generator::new(vec![0, 1, 2]);
    assert!(rectangles_between(&x, &Generator::new(vec![1, 2, 0])).is_empty());
    assert!(rectangles_between(&x, &x).is_empty());
    // the wrap-around rectangle contains the third point
    assert_eq!(rectangles_between(&x, &Generator::new(vec![1, 0, 2])).len(), 1);
    let x = Generator::new(vec![0, 1]);
    assert_eq!(rectangles_between(&x, &Generator::new(vec![1, 0])).len(), 2);
}

/// Every positive domain of index `k` from `x` to `y` on the torus, for
/// `k <= max_mu`. Domains are `D0 + sum a_r H_r + sum b_c V_c` with `a_0 = 0`.
fn positive_domains(x: &Generator, y: &Generator, max_mu: i32) -> Vec<Domain> {
    let n = x.n();
    let d0 = staircase_domain(x, y);
    let range = -(n as i32) - 2..=(n as i32) + 2;
    let mut out = Vec::new();
    let mut b = vec![0i32; n];
    fn rec(
        c: usize,
        b: &mut Vec<i32>,
        range: &std::ops::RangeInclusive<i32>,
        d0: &Domain,
        x: &Generator,
        y: &Generator,
        max_mu: i32,
        out: &mut Vec<Domain>,
    ) {
        let n = d0.n;
        if c == n {
            let mut d = d0.clone();
            for (col, &k) in b.iter().enumerate() {
                d.add_rect(&Rect { col: col as u8, row: 0, width: 1, height: n as u8 }, k);
            }
            // row 0 fixed at 0; every other row takes the smallest value keeping D positive
            if (0..n).any(|col| d.at(col, 0) < 0) {
                return;
            }
            let mut rows = d.clone();
            let mut lows = vec![0i32; n];
            for (r, low) in lows.iter_mut().enumerate().skip(1) {
                *low = -(0..n).map(|col| d.at(col, r)).min().unwrap();
            }
            for (r, &low) in lows.iter().enumerate().skip(1) {
                rows.add_rect(&Rect { col: 0, row: r as u8, width: n as u8, height: 1 }, low);
            }
            let base_mu = maslov_index(&rows, x, y);
            if base_mu > max_mu {
                return;
            }
            // extra horizontal annuli on rows 1.. each add two
            let spare = ((max_mu - base_mu) / 2) as usize;
            let mut extra = vec![0usize; n];
            loop {
                let mut d = rows.clone();
                for (r, &e) in extra.iter().enumerate().skip(1) {
                    d.add_rect(&Rect { col: 0, row: r as u8, width: n as u8, height: 1 }, e as i32);
                }
                out.push(d);
                let mut r = 1;
                loop {
                    if r == n {
                        return;
                    }
                    extra[r] += 1;
                    if extra.iter().sum::<usize>() <= spare {
                        break;
                    }
                    extra[r] = 0;
                    r += 1;
                }
            }
        }
        for v in range.clone() {
            b[c] = v;
            rec(c + 1, b, range, d0, x, y, max_mu, out);
        }
    }
    rec(0, &mut b, &range, &d0, x, y, max_mu, &mut out);
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    out.dedup_by(|a, b| a.coeffs == b.coeffs);
    out
}

fn decomposes(x: &[u8], y: &[u8], d: &Domain, k: i32) -> bool {
    if k == 0 {
        return x == y && d.is_zero();
    }
    let n = x.len();
    let table = MarkingTable { n, x_cols: vec![0; n], o_cols: vec![0; n] };
    let mut moves = Vec::new();
    empty_rectangles_from(x, &table, &mut moves);
    moves.iter().any(|m| {
        let mut rest = d.clone();
        rest.add_rect(&m.rect, -1);
        if !rest.is_positive() {
            return false;
        }
        let mut z = x.to_vec();
        z.swap(m.rows.0 as usize, m.rows.1 as usize);
        decomposes(&z, y, &rest, k - 1)
    })
}

#[test]
fn positive_domains_split_into_rectangles() {
    for g in seeded_knots(&[3, 4], 11) {
        let n = g.n();
        let count: usize = (1..=n).product();
        let mut checked = 0;
        for xi in 0..count {
            for yi in 0..count {
                let (xp, yp) = (perm_unrank(n, xi), perm_unrank(n, yi));
                let (x, y) = (generator(&xp), generator(&yp));
                for d in positive_domains(&x, &y, 3) {
                    let k = maslov_index(&d, &x, &y);
                    assert!(k >= 0);
                    assert!(decomposes(&xp, &yp, &d, k), "{:?} -> {:?}: {:?}", xp, yp, d.coeffs);
                    checked += 1;
                }
            }
        }
        assert!(checked > count, "only {checked} domains on {}", g.to_inline());
    }
}

#[test]
fn unknot_complex_by_hand() {
    let g = Grid::new(vec![0, 1], vec![1, 0]).unwrap();
    let gens = enumerate_generators(&g, &Limits::default(), Execution::Sequential).unwrap();
    let b = boundary_tilde(&g, &gens, Coefficients::F2, None, Execution::Sequential).unwrap();
    // every rectangle on the 2x2 unknot grid covers a marking
    assert!(b.is_zero());
}
