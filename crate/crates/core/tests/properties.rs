use std::collections::BTreeSet;

use hurwitz_radon::exactmat::ComplexMatrix;
use hurwitz_radon::exactmat::{frac, int, Interval, Polynomial, Rational, RationalMatrix};
use hurwitz_radon::gmanifold::{
    estimate_rho_g_complex, estimate_rho_g_subsets, realify, ComplexAction,
};
use hurwitz_radon::pencil::{check_span, is_singular_combination, PencilStatus};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-4i64..=4, n * n)
        .prop_map(move |v| RationalMatrix::from_fn(n, n, |r, c| int(v[r * n + c])))
}

fn pair_of(n: usize) -> impl Strategy<Value = (RationalMatrix, RationalMatrix)> {
    (matrix(n), matrix(n))
}

// Coefficient convolution, independent of the library's arithmetic.
fn times(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn from_roots(roots: &[Rational], lift: i64) -> Vec<Rational> {
    // x² + lift has no real root and keeps the factors non-split
    let mut p = vec![int(lift), int(0), int(1)];
    for r in roots {
        p = times(&p, &[-r.clone(), int(1)]);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=5).prop_flat_map(pair_of)) {
        prop_assert_eq!((&a * &b).det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn char_poly_agrees_with_det(a in (1usize..=5).prop_flat_map(matrix), p in -20i64..=20, q in 1i64..=7) {
        let t = frac(p, q);
        let n = a.rows();
        let shifted = &RationalMatrix::scalar(n, t.clone()) - &a;
        prop_assert_eq!(a.char_poly().unwrap().eval(&t), shifted.det().unwrap());
    }

    #[test]
    fn root_count_of_products(
        roots in prop::collection::btree_set((-30i64..=30, 1i64..=4), 0..6),
        split in 0usize..6,
        lifts in (1i64..=5, 1i64..=5),
    ) {
        let all: BTreeSet<Rational> = roots.iter().map(|&(p, q)| frac(p, q)).collect();
        let all: Vec<Rational> = all.into_iter().collect();
        let cut = split.min(all.len());
        let (left, right) = all.split_at(cut);
        let p = from_roots(left, lifts.0);
        let q = from_roots(right, lifts.1 + 5);
        let product = Polynomial::new(times(&p, &q));
        prop_assert_eq!(product.count_real_roots(&Interval::real_line()).unwrap(), all.len());
    }

    #[test]
    fn pencil_verdicts_are_sound(
        family in (2usize..=4, 1usize..=3).prop_flat_map(|(n, k)| prop::collection::vec(matrix(n), k)),
        seed in 0u64..1000,
    ) {
        let v = check_span(&family, 60, seed).unwrap();
        if let Some(t) = &v.counterexample {
            prop_assert!(is_singular_combination(&family, t).unwrap());
        }
        if v.status == PencilStatus::ProvenNonsingular {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..500 {
                let t: Vec<Rational> = family.iter().map(|_| frac(rng.random_range(-50..=50), rng.random_range(1..=9))).collect();
                if t.iter().all(Zero::is_zero) {
                    continue;
                }
                prop_assert!(!is_singular_combination(&family, &t).unwrap());
            }
        }
    }

    #[test]
    fn realify_does_not_lower_certified_estimates(
        parts in (1usize..=3, 1usize..=3).prop_flat_map(|(n, k)| prop::collection::vec(pair_of(n), k)),
        seed in 0u64..100,
    ) {
        let gens: Vec<ComplexMatrix> = parts.iter().map(|(a, b)| ComplexMatrix::from_parts(a, b).unwrap()).collect();
        let action = ComplexAction::new(gens).unwrap();
        let before = estimate_rho_g_complex(&action, 30, seed).unwrap();
        let after = estimate_rho_g_subsets(&realify(&action).unwrap(), 30, seed).unwrap();
        prop_assert!(before.certified_value <= after.certified_value);
    }
}
