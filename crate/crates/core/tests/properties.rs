use maxindex::bounds::{sigma1, sigma1_sum, sigma2_poly, sigma2_sum};
use maxindex::config::{admissible, c3_cycle_star, is_cycle_triple, length_parity, Relaxation, WeightProfile};
use maxindex::exactmath::{det_exact, rank_exact, smith_invariants, solve_rational, IntMatrix};
use maxindex::lattice::{minimal_vectors, GramMatrix};
use maxindex::search::{max_family_in, Budget, CycleRegime};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn square(n: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-range..=range, n), n)
}

fn mat(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

/// Upper unitriangular matrix with the given strictly upper entries.
fn unitriangular(n: usize, upper: &[i64]) -> Vec<Vec<i64>> {
    let mut u = vec![vec![0; n]; n];
    let mut k = 0;
    for i in 0..n {
        u[i][i] = 1;
        for j in i + 1..n {
            u[i][j] = upper[k % upper.len()];
            k += 1;
        }
    }
    u
}

fn family(n: usize, max_sets: usize) -> impl Strategy<Value = Vec<u64>> {
    let full = (1u64 << n) - 1;
    prop::collection::vec(1u64..=full, 0..=max_sets)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=5).prop_flat_map(|n| (square(n, 4), square(n, 4)))) {
        let (a, b) = (mat(&a), mat(&b));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(det_exact(&ab).unwrap(), det_exact(&a).unwrap() * det_exact(&b).unwrap());
    }

    #[test]
    fn rank_survives_unimodular_change(
        (a, upper) in (1usize..=5).prop_flat_map(|n| (square(n, 3), prop::collection::vec(-3i64..=3, 1..=10)))
    ) {
        let n = a.len();
        let a = mat(&a);
        let u = mat(&unitriangular(n, &upper));
        let r = rank_exact(&a);
        prop_assert!(r <= n);
        prop_assert_eq!(rank_exact(&u.mul(&a).unwrap()), r);
        prop_assert_eq!(rank_exact(&a.mul(&u).unwrap()), r);
        prop_assert_eq!(r == n, !det_exact(&a).unwrap().is_zero());
    }

    #[test]
    fn smith_chain_and_product(a in (1usize..=5).prop_flat_map(|n| square(n, 5))) {
        let a = mat(&a);
        let d = det_exact(&a).unwrap();
        prop_assume!(!d.is_zero());
        let inv = smith_invariants(&a).unwrap();
        let prod: BigInt = inv.iter().product();
        prop_assert_eq!(prod, d.abs());
        for w in inv.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn solve_has_zero_residual(
        (a, v) in (1usize..=5).prop_flat_map(|n| (square(n, 6), prop::collection::vec(-9i64..=9, n)))
    ) {
        let a = mat(&a);
        prop_assume!(!det_exact(&a).unwrap().is_zero());
        let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let x = solve_rational(&a, &vb).unwrap();
        for (i, vi) in vb.iter().enumerate() {
            let lhs: BigRational = (0..a.cols())
                .map(|j| BigRational::from_integer(a.get(i, j).clone()) * &x.coords()[j])
                .sum();
            prop_assert_eq!(lhs, BigRational::from_integer(vi.clone()));
        }
    }

    #[test]
    fn kissing_number_is_basis_independent(
        (diag, off, upper) in (2usize..=4).prop_flat_map(|n| (
            prop::collection::vec(4i64..=8, n),
            prop::collection::vec(-1i64..=1, n * (n - 1) / 2),
            prop::collection::vec(-2i64..=2, 1..=6),
        ))
    ) {
        // diagonally dominant, hence positive definite
        let n = diag.len();
        let mut g = vec![vec![0; n]; n];
        let mut k = 0;
        for i in 0..n {
            g[i][i] = diag[i];
            for j in i + 1..n {
                g[i][j] = off[k];
                g[j][i] = off[k];
                k += 1;
            }
        }
        let gram = GramMatrix::from_rows(&g).unwrap();
        let u = mat(&unitriangular(n, &upper));
        let moved = gram.transform(&u).unwrap();
        let a = minimal_vectors(&gram).unwrap();
        let b = minimal_vectors(&moved).unwrap();
        prop_assert_eq!(a.s(), b.s());
        prop_assert_eq!(a.min_norm, b.min_norm);
        prop_assert_eq!(gram.det(), moved.det());
    }

    #[test]
    fn weights_account_for_every_membership((n, sets) in (4usize..=12).prop_flat_map(|n| (Just(n), family(n, 8)))) {
        let w = WeightProfile::of(n, &sets);
        let total: usize = sets.iter().map(|s| s.count_ones() as usize).sum();
        prop_assert_eq!(w.weights.iter().sum::<usize>(), total);
        prop_assert_eq!(w.even() | w.odd(), (1u64 << n) - 1);
        prop_assert_eq!(w.even() & w.odd(), 0);
        prop_assert_eq!(w.m, (w.w_k(0) ^ ((1u64 << n) - 1)).count_ones() as usize);
    }

    #[test]
    fn admissibility_is_hereditary(
        (n, sets, drop) in (5usize..=10).prop_flat_map(|n| (Just(n), family(n, 7), any::<prop::sample::Index>()))
    ) {
        prop_assume!(!sets.is_empty());
        let mut sub = sets.clone();
        sub.remove(drop.index(sets.len()));
        if admissible(n, &sets) {
            prop_assert!(admissible(n, &sub));
        }
        if length_parity(n, &sets) {
            prop_assert!(length_parity(n, &sub));
        }
        if Relaxation::WithLength.admits(n, &sets) {
            prop_assert!(Relaxation::Predicates.admits(n, &sets));
        }
    }

    #[test]
    fn covering_triangle_is_rejected(n in 5usize..=16, a in 0usize..4, b in 0usize..4, c in 0usize..4) {
        // three sets pairwise sharing one private index, padded with private
        // indices, cover m < n - 1 indices and so cannot be admissible
        let (x, y, z) = (1u64 << 0, 1u64 << 1, 1u64 << 2);
        let mut next = 3;
        let mut pad = |k: usize| {
            let mut m = 0u64;
            for _ in 0..k {
                m |= 1 << next;
                next += 1;
            }
            m
        };
        let sets = [x | y | pad(a), y | z | pad(b), z | x | pad(c)];
        prop_assume!(next + 1 < n);
        prop_assert!(is_cycle_triple(sets[0], sets[1], sets[2]));
        prop_assert!(!c3_cycle_star(n, &sets));
    }

    #[test]
    fn sigma_closed_forms_agree(n in 11usize..=4000) {
        prop_assert_eq!(sigma1(n).unwrap(), sigma1_sum(n).unwrap());
        prop_assert_eq!(sigma2_sum(n).unwrap(), sigma2_poly(n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn search_witness_is_sound_and_deterministic(
        (p, n) in prop::sample::select(vec![(3usize, 6usize), (3, 7), (3, 8)]),
        regime in prop::sample::select(vec![CycleRegime::Forbid, CycleRegime::Require, CycleRegime::Any]),
        relaxation in prop::sample::select(vec![Relaxation::Predicates, Relaxation::WithLength]),
    ) {
        let a = max_family_in(p, n, regime, relaxation, Budget::unlimited()).unwrap();
        let b = max_family_in(p, n, regime, relaxation, Budget::unlimited()).unwrap();
        prop_assert!(a.is_complete());
        let masks = a.witness.masks();
        prop_assert_eq!(masks.len(), a.max_size);
        prop_assert!(masks.iter().all(|m| m.count_ones() as usize == p));
        if a.max_size > 0 {
            prop_assert!(relaxation.admits(n, &masks));
        }
        prop_assert_eq!(masks, b.witness.masks());
        prop_assert_eq!(a.nodes_explored, b.nodes_explored);
    }
}
