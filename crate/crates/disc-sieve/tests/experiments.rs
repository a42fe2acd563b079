use disc_sieve::c3::{c3_volume, closed_form, slice_width, tail_bound, C3_CLOSED_FORM};
use disc_sieve::lab::{
    box_counts, density_pair, maximality_density_experiment, mobius_sieve_identity_check, reducible_count,
    squarefree_density_experiment, tail_counts,
};
use disc_sieve::monogenic::{cross_check, height_level, monogenic_count_experiment, quasi_fraction_experiment};
use disc_sieve::{Budget, Pool, Report, RunError};
use disc_sieve_core::lattice::TIE_TOLERANCE;
use disc_sieve_core::MonicPoly;

fn pool(threads: usize) -> Pool {
    Pool::new(threads).unwrap()
}

fn budget() -> Budget {
    Budget::defaults()
}

#[test]
fn smallest_quadratic_box() {
    let c = box_counts(2, 2, &pool(1), &budget()).unwrap();
    assert_eq!(c.total, 21);
    // only x^2 has Δ = 0
    assert_eq!(c.zero_disc, 1);
    assert_eq!(c.squarefree_not_maximal, 0);
    assert!(c.maximal >= c.squarefree);
}

#[test]
fn linear_box_is_all_squarefree() {
    let r = squarefree_density_experiment(1, 7, &pool(1), &budget()).unwrap();
    assert_eq!(r.total, 13);
    assert_eq!(r.empirical, "1");
    assert_eq!(r.theoretical, 1.0);
}

#[test]
fn density_reports_are_consistent() {
    let (sf, max) = density_pair(2, 12, &pool(2), &budget()).unwrap();
    let sf2 = squarefree_density_experiment(2, 12, &pool(1), &budget()).unwrap();
    let max2 = maximality_density_experiment(2, 12, &pool(1), &budget()).unwrap();
    assert_eq!((sf.hits, max.hits), (sf2.hits, max2.hits));
    assert!(max.hits >= sf.hits);
    assert_eq!(max.implication_failures, Some(0));
    assert!((sf.empirical_value - sf.hits as f64 / sf.total as f64).abs() < 1e-15);
    assert!(sf.euler_tail < 1e-3);
}

#[test]
fn sieve_identity_small_boxes() {
    for (n, x) in [(1, 6), (2, 3), (2, 7), (3, 3)] {
        let c = mobius_sieve_identity_check(n, x, &pool(1), &budget()).unwrap();
        assert!(c.equal, "n={n} X={x}");
        assert_eq!(c.lhs as i64, c.rhs);
    }
}

#[test]
fn tail_counts_shape() {
    let t = tail_counts(2, 10, &[1, 2, 3, 5, 10, 1000], &pool(1), &budget()).unwrap();
    assert_eq!(t.rows[0].count, t.total - t.squarefree);
    for w in t.rows.windows(2) {
        assert!(w[0].count >= w[1].count);
        assert!(w[0].count_nonzero >= w[1].count_nonzero);
    }
    for r in &t.rows {
        assert_eq!(r.count - r.count_nonzero, t.zero_disc);
    }
    assert_eq!(t.rows.last().unwrap().count_nonzero, 0);
    assert!(t.primes.iter().all(|p| p.p != 2 || p.weak == 0));
}

#[test]
fn reducible_quadratics() {
    assert!(MonicPoly::from_i64(&[3, 2]).unwrap().is_reducible_over_q());
    assert!(!MonicPoly::from_i64(&[0, -2]).unwrap().is_reducible_over_q());
    let small = reducible_count(2, 10, &pool(1), &budget()).unwrap();
    let large = reducible_count(2, 40, &pool(1), &budget()).unwrap();
    assert_eq!(small.square_disc_disagreements, Some(0));
    assert_eq!(large.square_disc_disagreements, Some(0));
    assert!(large.fraction_value < small.fraction_value);
    assert!(reducible_count(3, 3, &pool(1), &budget()).unwrap().square_disc_disagreements.is_none());
}

#[test]
fn c3_closed_form_and_slices() {
    assert!((closed_form() - C3_CLOSED_FORM).abs() < 1e-12);
    // at the cusp a2 = 4^(-1/3) the slice collapses
    assert!(slice_width(libm::cbrt(0.25)) < 1e-6);
    assert!(slice_width(-1.0) > 0.0);
    assert!((tail_bound(1e6) - 4.0 / 9000.0).abs() < 1e-15);
    let r = c3_volume(200_000, 1e6, 3, &pool(1)).unwrap();
    assert!(r.rel_error < 0.01, "{r:?}");
    assert!(!r.truncation_too_small);
    assert!(c3_volume(200_000, 10.0, 3, &pool(1)).unwrap().truncation_too_small);
    assert!(matches!(c3_volume(10, 1e6, 3, &pool(1)), Err(RunError::Invalid(_))));
}

#[test]
fn monogenic_counts_nest() {
    let r = monogenic_count_experiment(3, &[2, 3, 4], TIE_TOLERANCE, &pool(1), &budget()).unwrap();
    assert_eq!(r.predicted_exponent, 5.0);
    for w in r.rows.windows(2) {
        assert!(w[0].counted <= w[1].counted);
        assert!(w[0].polynomials < w[1].polynomials);
    }
    for row in &r.rows {
        assert!(row.counted + row.undetermined + row.reduction_failures <= row.classes);
        assert!(row.classes * 2 >= row.irreducible);
    }
    assert!(r.cross_check.performed);
    assert_eq!(r.cross_check.collisions, 0);
    assert!(monogenic_count_experiment(5, &[2], TIE_TOLERANCE, &pool(1), &budget()).is_err());
}

#[test]
fn height_levels() {
    assert_eq!(height_level(&[0, 0, 0]), 1);
    assert!(height_level(&[0, 4, 0]) > height_level(&[0, 3, 0]));
    assert_eq!(cross_check(&[]).collisions, 0);
}

#[test]
fn quasi_policies() {
    let r = quasi_fraction_experiment(3, &[5, 20], 300, 9, &pool(1), &budget()).unwrap();
    for row in &r.rows {
        assert_eq!(row.samples, 300);
        assert!(row.strong <= row.quasi);
        assert!(row.strong <= row.strong_certified + row.undetermined_certified);
    }
    assert_eq!(r.tie_tolerance, TIE_TOLERANCE);
    assert!(quasi_fraction_experiment(3, &[], 10, 0, &pool(1), &budget()).is_err());
}

fn same_json<R: Report>(mut a: R, mut b: R) {
    a.clear_timing();
    b.clear_timing();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn thread_count_does_not_change_reports() {
    let (one, three) = (pool(1), pool(3));
    let b = budget();
    same_json(
        squarefree_density_experiment(3, 5, &one, &b).unwrap(),
        squarefree_density_experiment(3, 5, &three, &b).unwrap(),
    );
    same_json(tail_counts(3, 4, &[1, 3, 9], &one, &b).unwrap(), tail_counts(3, 4, &[1, 3, 9], &three, &b).unwrap());
    same_json(c3_volume(100_000, 1e4, 5, &one).unwrap(), c3_volume(100_000, 1e4, 5, &three).unwrap());
    same_json(
        quasi_fraction_experiment(3, &[5, 10], 200, 5, &one, &b).unwrap(),
        quasi_fraction_experiment(3, &[5, 10], 200, 5, &three, &b).unwrap(),
    );
}
