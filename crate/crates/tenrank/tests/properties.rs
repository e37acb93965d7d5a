//! Randomized invariants across the scalar and tensor layers. All
//! checks are exact equalities; proptest only chooses the inputs.

use proptest::prelude::*;

use tenrank::decomp::{verify_decomposition, Decomposition, Term};
use tenrank::persistence::pyramid_persistence;
use tenrank::scalar::{rat_frac, zeta, Cyclotomic, EpsLaurent, Rational};
use tenrank::tensor::{
    slocc_apply, Bipartition, CoVector, LocalMap, Matrix, Shape, Tensor,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rat_frac(n, d))
}

fn cyclotomic(order: usize) -> impl Strategy<Value = Cyclotomic> {
    proptest::collection::vec(rational(), 1..=3).prop_map(move |coeffs| {
        let mut acc = Cyclotomic::zero();
        for (k, q) in coeffs.into_iter().enumerate() {
            acc = acc.add(&Cyclotomic::root(order, k as i64).scale(&q));
        }
        acc
    })
}

fn small_order() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 3, 4, 5, 6, 8, 12])
}

fn cyclotomic_triple() -> impl Strategy<Value = (Cyclotomic, Cyclotomic, Cyclotomic)> {
    small_order().prop_flat_map(|m| (cyclotomic(m), cyclotomic(m), cyclotomic(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_hold((a, b, c) in cyclotomic_triple()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), Cyclotomic::one());
        }
    }

    #[test]
    fn order_lifting_is_a_ring_embedding(a in cyclotomic(4), b in cyclotomic(4)) {
        // lift(a * b) = lift(a) * lift(b) and likewise for sums
        let target = 12usize;
        prop_assert_eq!(a.mul(&b).lift(target), a.lift(target).mul(&b.lift(target)));
        prop_assert_eq!(a.add(&b).lift(target), a.lift(target).add(&b.lift(target)));
    }

    #[test]
    fn lowest_term_shifts_with_the_power(k in -6i64..=6, c in cyclotomic(3), e in -4i64..=4) {
        prop_assume!(!c.is_zero());
        let v = EpsLaurent::single(e, c).add(&EpsLaurent::single(e + 3, Cyclotomic::one()));
        let shifted = v.scale_by_power(k);
        prop_assert_eq!(shifted.lowest().unwrap().0, e + k);
    }

    #[test]
    fn scalar_literals_round_trip(e in -3i64..=3, m in small_order(), q in rational()) {
        let v = EpsLaurent::single(e, zeta(m).scale(&q)).add(&EpsLaurent::from_rational(rat_frac(1, 2)));
        let s = format!("{v}");
        let back = tenrank::scalar::parse_scalar(&s).unwrap();
        prop_assert_eq!(back, v);
    }
}

fn sparse_qubit_tensor(n: usize) -> impl Strategy<Value = Tensor<Cyclotomic>> {
    let entries = proptest::collection::vec(
        (proptest::collection::vec(0usize..2, n), -4i64..=4),
        1..=6,
    );
    entries.prop_map(move |list| {
        let mut t = Tensor::zero(Shape::uniform(2, n).unwrap());
        for (idx, v) in list {
            t.add_entry(idx, Cyclotomic::from_int(v)).unwrap();
        }
        t
    })
}

fn qubit_matrix() -> impl Strategy<Value = Matrix<Cyclotomic>> {
    proptest::collection::vec(-3i64..=3, 4).prop_map(|v| {
        Matrix::from_rows(vec![
            vec![Cyclotomic::from_int(v[0]), Cyclotomic::from_int(v[1])],
            vec![Cyclotomic::from_int(v[2]), Cyclotomic::from_int(v[3])],
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schmidt_rank_is_monotone_under_local_maps(
        t in sparse_qubit_tensor(3),
        m0 in qubit_matrix(),
        m1 in qubit_matrix(),
        m2 in qubit_matrix(),
    ) {
        prop_assume!(!t.is_zero());
        let map = LocalMap::new(vec![m0, m1, m2]);
        let out = slocc_apply(&t, &map).unwrap();
        for part in Bipartition::all(3) {
            let before = t.schmidt_rank(&part).unwrap();
            let after = if out.is_zero() { 0 } else { out.schmidt_rank(&part).unwrap() };
            prop_assert!(after <= before);
        }
    }

    #[test]
    fn kronecker_schmidt_rank_is_submultiplicative(
        a in sparse_qubit_tensor(3),
        b in sparse_qubit_tensor(3),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let k = a.kronecker_product(&b).unwrap();
        prop_assume!(!k.is_zero());
        for part in Bipartition::all(3) {
            let ra = a.schmidt_rank(&part).unwrap();
            let rb = b.schmidt_rank(&part).unwrap();
            let rk = k.schmidt_rank(&part).unwrap();
            prop_assert!(rk <= ra * rb);
        }
    }

    #[test]
    fn contraction_is_linear(
        t in sparse_qubit_tensor(3),
        f in proptest::collection::vec(-4i64..=4, 2),
        g in proptest::collection::vec(-4i64..=4, 2),
    ) {
        let fv = CoVector::new(f.iter().map(|&x| Cyclotomic::from_int(x)).collect());
        let gv = CoVector::new(g.iter().map(|&x| Cyclotomic::from_int(x)).collect());
        let sum = CoVector::new(
            f.iter().zip(&g).map(|(&x, &y)| Cyclotomic::from_int(x + y)).collect(),
        );
        let lhs = t.contract(0, &sum).unwrap();
        let rhs = t.contract(0, &fv).unwrap().add(&t.contract(0, &gv).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn direct_sum_schmidt_ranks_add(a in sparse_qubit_tensor(3), b in sparse_qubit_tensor(3)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let s = a.direct_sum(&b).unwrap();
        for part in Bipartition::all(3) {
            prop_assert_eq!(
                s.schmidt_rank(&part).unwrap(),
                a.schmidt_rank(&part).unwrap() + b.schmidt_rank(&part).unwrap()
            );
        }
    }

    #[test]
    fn tensor_json_round_trips(t in sparse_qubit_tensor(4)) {
        let s = tenrank::json::cyc_tensor_to_string(&t);
        let back = tenrank::json::tensor_from_str(&s).unwrap();
        prop_assert_eq!(back, tenrank::json::AnyTensor::Cyc(t));
    }
}

/// Random invertible qubit maps via shears: determinant stays 1.
fn shear_map() -> impl Strategy<Value = Matrix<Cyclotomic>> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| {
        let upper = Matrix::from_rows(vec![
            vec![Cyclotomic::one(), Cyclotomic::from_int(a)],
            vec![Cyclotomic::zero(), Cyclotomic::one()],
        ])
        .unwrap();
        let lower = Matrix::from_rows(vec![
            vec![Cyclotomic::one(), Cyclotomic::zero()],
            vec![Cyclotomic::from_int(b), Cyclotomic::one()],
        ])
        .unwrap();
        upper.matmul(&lower).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn concise_tensors_have_nonzero_slices_in_every_basis(
        ms in proptest::collection::vec(shear_map(), 3),
    ) {
        // a concise tensor keeps all first-factor slices nonzero after
        // any invertible basis change
        let w = tenrank::families::make_state(&tenrank::families::FamilySpec::w(3)).unwrap();
        let map = LocalMap::new(ms);
        let out = slocc_apply(&w, &map).unwrap();
        prop_assert!(out.multilinear_profile().all_concise());
        for j in 0..2usize {
            let slice = out.contract(0, &CoVector::basis(2, j)).unwrap();
            prop_assert!(!slice.is_zero());
        }
    }

    #[test]
    fn staircase_certificates_survive_random_basis_slices(
        ms in proptest::collection::vec(shear_map(), 4),
        coeffs in proptest::collection::vec(1i64..=5, 8),
    ) {
        // randomized staircase-supported tensors are certified, and in
        // every random basis all first-factor slices of the certified
        // tensor stay nonzero
        let n = 4usize;
        let mut t = Tensor::zero(Shape::uniform(2, n).unwrap());
        let mut k = 0;
        for pos in 0..n {
            let mut idx = vec![0usize; n];
            idx[pos] = 1;
            t.add_entry(idx, Cyclotomic::from_int(coeffs[k])).unwrap();
            k += 1;
        }
        pyramid_persistence(&t).unwrap();
        let map = LocalMap::new(ms);
        let out = slocc_apply(&t, &map).unwrap();
        for j in 0..2usize {
            let slice = out.contract(0, &CoVector::basis(2, j)).unwrap();
            prop_assert!(!slice.is_zero());
        }
    }

    #[test]
    fn verified_decompositions_stay_verified_after_permutation(
        perm_seed in any::<u64>(),
    ) {
        let dec = tenrank::decomp::decompose_l(3, 3).unwrap();
        let t = tenrank::families::make_state(&tenrank::families::FamilySpec::l(3, 3)).unwrap();
        let mut order: Vec<usize> = (0..dec.len()).collect();
        // cheap deterministic shuffle
        let mut s = perm_seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = dec.permuted(&order).unwrap();
        prop_assert!(verify_decomposition(&t, &shuffled).unwrap());
    }
}

#[test]
fn decomposition_of_wrong_scale_fails() {
    let t = tenrank::families::make_state(&tenrank::families::FamilySpec::w(3)).unwrap();
    let dec = tenrank::decomp::decompose_w(3).unwrap();
    let doubled = Decomposition::new(
        dec.shape().clone(),
        dec.terms()
            .iter()
            .map(|term| Term {
                scale: term.scale.mul(&Cyclotomic::from_int(2)),
                vectors: term.vectors.clone(),
            })
            .collect(),
    )
    .unwrap();
    assert!(!verify_decomposition(&t, &doubled).unwrap());
}
