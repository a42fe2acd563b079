use disc_sieve_core::arith::is_prime;
use disc_sieve_core::disc_class::{classify_p2, strongly_divides_oracle, weak_normal_form, P2Tag, ORACLE_BUDGET};
use disc_sieve_core::poly::{discriminant_i128, resultant};
use disc_sieve_core::zpoly::ZPoly;
use disc_sieve_core::{sqf_decompose_mod_p, BigInt, MonicPoly, ModPoly};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn from_roots(r: &[i64]) -> MonicPoly {
    let mut p = ZPoly::from_i64(&[1]);
    for &x in r {
        p = &p * &ZPoly::from_i64(&[-x, 1]);
    }
    MonicPoly::from_zpoly(&p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discriminant_is_product_of_root_differences(r in prop::collection::vec(-12i64..12, 1..7)) {
        let f = from_roots(&r);
        let mut want = BigInt::one();
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                let d = BigInt::from(r[i] - r[j]);
                want *= &d * &d;
            }
        }
        prop_assert_eq!(f.discriminant(), want);
    }

    #[test]
    fn resultant_is_product_of_values(r in prop::collection::vec(-9i64..9, 1..5), g in prop::collection::vec(-9i64..9, 1..5)) {
        let f = from_roots(&r).to_zpoly();
        let gp = ZPoly::from_i64(&g);
        prop_assume!(!gp.is_zero());
        let want = r.iter().fold(BigInt::one(), |acc, &x| acc * gp.eval(&BigInt::from(x)));
        prop_assert_eq!(resultant(&f, &gp).unwrap(), want);
    }

    #[test]
    fn small_discriminant_matches_exact(c in prop::collection::vec(-1000i64..1000, 1..7)) {
        let f = MonicPoly::from_i64(&c).unwrap();
        if let Some(d) = discriminant_i128(&c) {
            prop_assert_eq!(BigInt::from(d), f.discriminant());
        }
    }

    #[test]
    fn sqf_decomposition_multiplies_back(c in prop::collection::vec(0u64..50, 1..9), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let mut asc: Vec<u64> = c.iter().map(|x| x % p).collect();
        asc.push(1);
        let f = ModPoly::new(p, asc);
        let d = f.sqf_decompose().unwrap();
        prop_assert_eq!(d.product(), f.clone());
        for (i, (g, _)) in d.factors.iter().enumerate() {
            prop_assert!(g.gcd(&g.derivative()).is_one());
            for (h, _) in &d.factors[i + 1..] {
                prop_assert!(g.gcd(h).is_one());
            }
        }
    }

    #[test]
    fn repeated_factors_mod_p_track_discriminant(c in prop::collection::vec(-30i64..30, 2..6), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let f = MonicPoly::from_i64(&c).unwrap();
        let d = sqf_decompose_mod_p(&f, p).unwrap();
        let divisible = f.discriminant().is_multiple_of(&BigInt::from(p));
        prop_assert_eq!(d.has_repeated_factor(), divisible);
    }
}

fn for_each_poly(n: usize, lo: i64, hi: i64, mut visit: impl FnMut(&[i64])) {
    let mut c = vec![lo; n];
    loop {
        visit(&c);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            c[k] += 1;
            if c[k] <= hi {
                break;
            }
            c[k] = lo;
            k += 1;
        }
    }
}

#[test]
fn classification_matches_perturbation_oracle() {
    for p in [2u64, 3, 5] {
        let h = (p * p) as i64;
        for n in 1..=3 {
            let mut counts = [0u32; 4];
            for_each_poly(n, -h, h, |c| {
                let f = MonicPoly::from_i64(c).unwrap();
                let class = classify_p2(&f, p).unwrap();
                match class.tag {
                    P2Tag::ZeroDisc | P2Tag::NotDivisible => {}
                    tag => {
                        let strong = strongly_divides_oracle(&f, p, ORACLE_BUDGET).unwrap();
                        assert_eq!(strong, tag == P2Tag::Strong, "{f} at {p}");
                    }
                }
                counts[class.tag as usize] += 1;
                if class.tag == P2Tag::Weak {
                    let r = class.witness.unwrap();
                    let fbar = f.reduce_mod(p);
                    assert_eq!(fbar.eval(r), 0);
                    assert_eq!(fbar.derivative().eval(r), 0);
                }
            });
            // Δ ≡ 0, 1 mod 4, so 2 | Δ(f + 2g) forces 4 | Δ(f + 2g): nothing is weak at 2
            if n >= 2 && p > 2 {
                assert!(counts[P2Tag::Weak as usize] > 0, "n={n} p={p}");
            }
            if n >= 3 || p == 2 && n >= 2 {
                assert!(counts[P2Tag::Strong as usize] > 0, "n={n} p={p}");
            }
        }
    }
}

#[test]
fn weak_normal_form_reconstructs() {
    let mut seen = 0;
    for_each_poly(3, -12, 12, |c| {
        let f = MonicPoly::from_i64(c).unwrap();
        for m in [2u64, 3, 5, 6, 10, 15, 30] {
            if let Some(nf) = weak_normal_form(&f, m).unwrap() {
                assert_eq!(nf.poly(), f);
                assert!(nf.l >= BigInt::zero() && nf.l < BigInt::from(m));
                let mm = BigInt::from(m * m);
                assert!(f.discriminant().is_multiple_of(&mm));
                seen += 1;
            }
        }
    });
    assert!(seen > 1000);
}

#[test]
fn classification_rejects_composites() {
    let f = MonicPoly::from_i64(&[0, 1]).unwrap();
    for q in [1u64, 4, 9, 15] {
        assert!(!is_prime(q));
        assert!(classify_p2(&f, q).is_err());
    }
}
