use disc_sieve_core::local_density::{
    bruteforce_disc_density, bruteforce_maximal_density, dedekind_is_p_maximal, lambda_limit_truncated, lambda_n_truncated,
    lambda_np, rho_np, rho_truncated, to_f64, LocalKind, ResidueSpace, SWEEP_BUDGET,
};
use disc_sieve_core::{BigInt, BigRational, MonicPoly};
use num_integer::Integer;
use num_traits::Zero;

#[test]
fn sweeps_match_formulas_small_grid() {
    for n in 1..=3 {
        for p in [2u64, 3, 5, 7] {
            let brute = bruteforce_disc_density(n, p, false, SWEEP_BUDGET).unwrap();
            assert_eq!(brute, lambda_np(n, p).unwrap(), "n={n} p={p}");
            if n >= 2 {
                let max = bruteforce_maximal_density(n, p, SWEEP_BUDGET).unwrap();
                assert_eq!(max, rho_np(n, p).unwrap(), "n={n} p={p}");
            }
        }
    }
}

#[test]
fn a1_zero_sweep_is_a_density() {
    for n in 2..=4 {
        for p in [3u64, 5] {
            let d = bruteforce_disc_density(n, p, true, SWEEP_BUDGET).unwrap();
            assert!(d > BigRational::zero() && d <= BigRational::from_integer(1.into()));
        }
    }
}

#[test]
fn sweep_partitions_add_up() {
    let space = ResidueSpace::new(3, 5, false, SWEEP_BUDGET).unwrap();
    let total = space.size().unwrap();
    let whole = space.count_range(LocalKind::Maximal, 0..total);
    let cuts = [0, 1, 777, 5000, total / 2, total];
    let parts: u128 = cuts.windows(2).map(|w| space.count_range(LocalKind::Maximal, w[0]..w[1])).sum();
    assert_eq!(parts, whole);
}

/// For quadratics `ℤ[θ]` fails to be maximal at `p` exactly when `Δ/p²` is
/// itself a discriminant, i.e. `Δ/p² ≡ 0, 1 (mod 4)`.
#[test]
fn dedekind_matches_quadratic_conductor() {
    for b in -30i64..=30 {
        for c in -30i64..=30 {
            let f = MonicPoly::from_i64(&[b, c]).unwrap();
            let d = BigInt::from(b * b - 4 * c);
            if d.is_zero() {
                continue;
            }
            for p in [2u64, 3, 5, 7] {
                let p2 = BigInt::from(p * p);
                let non_max = d.is_multiple_of(&p2) && {
                    let r = (&d / &p2).mod_floor(&BigInt::from(4));
                    r == BigInt::from(0) || r == BigInt::from(1)
                };
                assert_eq!(dedekind_is_p_maximal(&f, p).unwrap(), !non_max, "{f} at {p}");
            }
        }
    }
}

#[test]
fn truncated_products_converge() {
    let rho = rho_truncated(100_000);
    assert!((rho.value - 6.0 / std::f64::consts::PI.powi(2)).abs() <= rho.tail);
    let coarse = lambda_limit_truncated(1_000);
    let fine = lambda_limit_truncated(100_000);
    assert!((coarse.value - fine.value).abs() <= coarse.tail);
    assert!((fine.value - 0.307056).abs() < 5e-6);
    for n in 2..=6 {
        let t = lambda_n_truncated(n, 10_000);
        let p2 = to_f64(&lambda_np(n, 2).unwrap());
        assert!(t.value < p2 && t.value > 0.0);
    }
}
