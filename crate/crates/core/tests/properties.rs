use majorana_core::fermion::{jw_order, majorana_pauli};
use majorana_core::lattice::{build_lattice, Boundary, SignMode};
use majorana_core::pauli::{matrix_of, OperatorSum, PauliString, C64};
use majorana_core::sector::SpectrumResult;
use majorana_core::toric::{degeneracy, stabilizers_of};
use majorana_core::Error;
use proptest::prelude::*;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    let m = (1u128 << n) - 1;
    (any::<u128>(), any::<u128>(), 0u8..4).prop_map(move |(x, z, k)| PauliString::from_masks(n, x & m, z & m, k))
}

fn dense(p: &PauliString) -> nalgebra::DMatrix<C64> {
    matrix_of(&OperatorSum::from_terms(p.num_qubits(), [(C64::new(1.0, 0.0), *p)])).unwrap().to_dense()
}

proptest! {
    #[test]
    fn product_is_associative(a in pauli(40), b in pauli(40), c in pauli(40)) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn product_and_commutation_match_matrices(a in pauli(3), b in pauli(3)) {
        let (ma, mb) = (dense(&a), dense(&b));
        let ab = &ma * &mb;
        prop_assert!((&ab - dense(&a.mul(&b).unwrap())).norm() < 1e-12);
        let comm = (&ab - &mb * &ma).norm() < 1e-12;
        prop_assert_eq!(a.commutes(&b).unwrap(), comm);
    }

    #[test]
    fn adjoint_inverts(a in pauli(20)) {
        let p = a.mul(&a.adjoint()).unwrap();
        prop_assert_eq!(p, PauliString::identity(20));
    }

    #[test]
    fn spectrum_csv_round_trips(values in proptest::collection::vec(-50.0f64..50.0, 1..20)) {
        let mut r = SpectrumResult::default();
        r.push("w++/g+-".into(), values);
        let back = SpectrumResult::from_csv(&r.to_csv()).unwrap();
        prop_assert_eq!(back.to_csv(), r.to_csv());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn toric_degeneracy_ignores_link_signs(seed in any::<u64>(), l in 2usize..5) {
        let lat = build_lattice(l, Boundary::Torus).unwrap().assign_link_signs(&SignMode::Random(seed)).unwrap();
        // signs whose product over a color is -1 put -I in the group; that case must be reported
        match degeneracy(&stabilizers_of(&lat).unwrap()) {
            Ok(d) => prop_assert_eq!(d.value(), 4),
            Err(e) => prop_assert!(matches!(e, Error::InconsistentSigns)),
        }
    }

    #[test]
    fn majoranas_anticommute(i in 1usize..=32, j in 1usize..=32) {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        let order = jw_order(&lat).unwrap();
        let (a, b) = (majorana_pauli(i, &order).unwrap(), majorana_pauli(j, &order).unwrap());
        prop_assert!(a.is_hermitian());
        prop_assert_eq!(a.commutes(&b).unwrap(), i == j);
    }
}
