use disc_sieve_core::local_density::dedekind_is_p_maximal;
use disc_sieve_core::poly::is_squarefree_integer;
use disc_sieve_core::sieve::{disc_bound, Analyzer, BoxSpec, SquareFinder, BOX_BUDGET};
use disc_sieve_core::{classify_p2, BigInt, MonicPoly};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn box_sizes_and_order() {
    for (n, x, size) in [(2usize, 2u64, 21u128), (3, 2, 315), (2, 10, 3781), (1, 5, 9)] {
        let spec = BoxSpec::new(n, x, BOX_BUDGET).unwrap();
        assert_eq!(spec.size(), size);
        let all: Vec<Vec<i64>> = spec.iter().map(|f| f.to_i64().unwrap()).collect();
        assert_eq!(all.len() as u128, size);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
    assert!(BoxSpec::new(6, 100, BOX_BUDGET).is_err());
}

#[test]
fn analyzer_agrees_with_exact_predicates() {
    for (n, x) in [(2usize, 12u64), (3, 4), (4, 2)] {
        let spec = BoxSpec::new(n, x, BOX_BUDGET).unwrap();
        let an = Analyzer::for_box(&spec);
        spec.for_each(0..spec.size(), |a| {
            let f = MonicPoly::from_i64(a).unwrap();
            let res = an.analyze(a);
            let d = f.discriminant();
            assert_eq!(res.disc.to_bigint(), d);
            if d.is_zero() {
                assert!(!res.squarefree() && !an.maximal(a, &res));
                return;
            }
            assert_eq!(res.squarefree(), is_squarefree_integer(&d).unwrap(), "{f}");
            let mut exact_max = true;
            for &p in res.square_primes.as_slice() {
                assert!(d.is_multiple_of(&BigInt::from(p * p)));
                exact_max &= dedekind_is_p_maximal(&f, p).unwrap();
                assert_eq!(an.tag_at(a, p), classify_p2(&f, p).unwrap().tag);
            }
            assert_eq!(an.maximal(a, &res), exact_max, "{f}");
            if res.squarefree() {
                assert!(an.maximal(a, &res));
            }
        });
    }
}

#[test]
fn square_finder_on_random_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let finder = SquareFinder::new(1u128 << 100);
    for _ in 0..2000 {
        let base: u128 = rng.random_range(1..1u128 << 40);
        let sq: u128 = [1u128, 4, 9, 25, 49, 121, 10_007 * 10_007][rng.random_range(0..7)];
        let v = base * sq;
        let got = finder.square_primes(v);
        let vb = BigInt::from(v);
        for &p in got.as_slice() {
            assert!(vb.is_multiple_of(&BigInt::from(p as u128 * p as u128)));
        }
        let rad: u128 = got.as_slice().iter().map(|&p| p as u128).product();
        assert_eq!(got.is_empty(), is_squarefree_integer(&vb).unwrap(), "{v}");
        assert_eq!(got.radical(), rad);
    }
}

#[test]
fn disc_bound_holds_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 2..=5 {
        let spec = BoxSpec::new(n, 6, u128::MAX - 1).unwrap();
        let bound = disc_bound(&spec);
        for _ in 0..500 {
            let idx = rng.random_range(0..spec.size());
            let f = MonicPoly::from_i64(&spec.decode(idx)).unwrap();
            assert!(f.discriminant().abs().to_u128().unwrap() <= bound);
        }
    }
}
