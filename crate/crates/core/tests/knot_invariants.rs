mod common;

use common::any_knot;
use gridhfk::complex::Coefficients;
use gridhfk::fixtures;
use gridhfk::homology::BigradedRanks;
use gridhfk::invariants::{alexander_polynomial, check_invariance, fibered, genus, seeded_moves, AlexanderPolynomial};
use gridhfk::pipeline::{hat_homology, Options};
use gridhfk::{Execution, Limits};
use proptest::prelude::*;

fn poly(terms: &[(i32, i64)]) -> AlexanderPolynomial {
    AlexanderPolynomial::from_coeffs(terms.iter().copied())
}

#[test]
fn figure_eight() {
    let hat = hat_homology(&fixtures::figure_eight(), &Options::new(Coefficients::Z)).unwrap();
    assert_eq!(hat, BigradedRanks::from_free([((-1, -1), 1), ((0, 0), 3), ((1, 1), 1)]));
    assert_eq!(alexander_polynomial(&hat).unwrap(), poly(&[(1, -1), (0, 3), (-1, -1)]));
    assert_eq!(genus(&hat), 1);
    assert!(fibered(&hat, Coefficients::Z).unwrap());
}

#[test]
fn five_two_is_not_fibered() {
    let hat = hat_homology(&fixtures::knot_5_2(), &Options::new(Coefficients::Z)).unwrap();
    assert_eq!(hat.rank_by_alexander().into_iter().collect::<Vec<_>>(), vec![(-1, 2), (0, 3), (1, 2)]);
    assert_eq!(alexander_polynomial(&hat).unwrap().to_string(), "2t - 3 + 2t^-1");
    assert_eq!(genus(&hat), 1);
    assert!(!fibered(&hat, Coefficients::Z).unwrap());
}

#[test]
fn granny_is_the_square_of_the_trefoil() {
    let trefoil = hat_homology(&fixtures::trefoil(), &Options::default()).unwrap();
    let granny = hat_homology(&fixtures::granny(), &Options::default()).unwrap();
    // Kunneth: the bigraded ranks multiply
    let mut square = BigradedRanks::new();
    for (k1, e1) in trefoil.iter() {
        for (k2, e2) in trefoil.iter() {
            square.add_free(gridhfk::Bigrading::new(k1.maslov + k2.maslov, k1.alexander + k2.alexander), e1.free * e2.free);
        }
    }
    assert_eq!(granny, square);
    let d = alexander_polynomial(&granny).unwrap();
    let t = alexander_polynomial(&trefoil).unwrap();
    assert_eq!(d, t.product(&t));
    assert_eq!(d.to_string(), "t^2 - 2t + 3 - 2t^-1 + t^-2");
    assert_eq!(genus(&granny), 2);
}

#[test]
fn granny_is_fibered_over_the_integers() {
    let limits = Limits { max_sign_grid: 8, ..Limits::default() };
    let opts = Options::new(Coefficients::Z).with_limits(limits);
    let hat = hat_homology(&fixtures::granny(), &opts).unwrap();
    assert!(!hat.has_torsion());
    assert!(fibered(&hat, Coefficients::Z).unwrap());
}

#[test]
fn unknot_has_genus_zero() {
    let hat = hat_homology(&fixtures::unknot(), &Options::new(Coefficients::Z)).unwrap();
    assert_eq!(genus(&hat), 0);
    assert_eq!(alexander_polynomial(&hat).unwrap().to_string(), "1");
    assert!(fibered(&hat, Coefficients::Z).unwrap());
}

#[test]
fn sign_ceiling_is_enforced() {
    let opts = Options::new(Coefficients::Z);
    let err = hat_homology(&fixtures::granny(), &opts).unwrap_err();
    assert_eq!(err.kind(), gridhfk::ErrorKind::Resource);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn hat_tables_survive_random_moves(g in any_knot(2, 6), seed in any::<u64>(), k in 1usize..=4) {
        let moves = seeded_moves(&g, k, 6, seed);
        let opts = Options::default().with_execution(Execution::Parallel);
        let report = check_invariance(&g, &moves, &opts).unwrap();
        prop_assert!(report.passed(), "{}", report.summary());
        let hat = &report.steps[0].hat;
        let d = alexander_polynomial(hat).unwrap();
        prop_assert!(d.is_symmetric());
        prop_assert_eq!(d.eval_at_one(), 1);
        prop_assert!(genus(hat) as i32 >= d.degree());
    }
}
