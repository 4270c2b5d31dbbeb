use lindfrag::effective::restrict;
use lindfrag::linalg::{self, C64};
use lindfrag::model::{builtin, BuiltinKind, LindbladModel};
use lindfrag::oracle::{
    basis_index, build_superoperator, fragment_partition, verify_conservation, verify_fragmentation,
    ConservationLevel,
};
use lindfrag::{Pauli, PauliString};
use proptest::prelude::*;

mod common;
use common::{config, model_from_candidates};

fn letters(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(prop::sample::select(Pauli::ALL.to_vec()), n)
}

fn random_model(n: usize) -> impl Strategy<Value = LindbladModel> {
    let terms = prop::collection::vec((0.2f64..2.0, letters(n)), 1..=n);
    let jumps = prop::collection::vec((0.1f64..2.0, letters(n)), 1..=n + 1);
    (terms, jumps).prop_map(move |(h, f)| model_from_candidates(n, &h, &f))
}

fn builtin_models() -> impl Strategy<Value = LindbladModel> {
    (prop::sample::select(vec![BuiltinKind::ClusterY, BuiltinKind::ClusterZiz]), 0.1f64..2.0, 0.1f64..2.0)
        .prop_map(|(kind, j, kappa)| builtin(kind, 4, j, kappa).unwrap())
}

fn union_of_blocks(model: &LindbladModel) -> Vec<C64> {
    let t = model.to_tilde().unwrap();
    let (fragments, _) = fragment_partition(&t).unwrap();
    let mut all = Vec::new();
    for f in &fragments {
        let g = restrict(&t, f).unwrap();
        all.extend(linalg::eigenvalues(g.matrix().unwrap()).unwrap());
    }
    all
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn spectrum_is_the_union_of_fragment_spectra(model in builtin_models()) {
        let t = model.to_tilde().unwrap();
        let sup = build_superoperator(&t).unwrap();
        let full = sup.eigenvalues().unwrap();
        let blocks = union_of_blocks(&model);
        prop_assert_eq!(full.len(), blocks.len());
        prop_assert!(linalg::multiset_distance(&full, &blocks) < 1e-9);
    }

    #[test]
    fn lindbladian_spectrum_is_stable(model in builtin_models()) {
        let sup = build_superoperator(&model.to_tilde().unwrap()).unwrap();
        let values = sup.eigenvalues().unwrap();
        prop_assert!(values.iter().all(|z| z.re < 1e-10));
        prop_assert!(values.iter().any(|z| z.norm() < 1e-10));
    }

    #[test]
    fn identity_is_stationary(model in (2usize..=4).prop_flat_map(random_model)) {
        let t = model.to_tilde().unwrap();
        let sup = build_superoperator(&t).unwrap();
        let col = basis_index(&PauliString::identity(t.n_qubits()));
        let m = sup.matrix();
        prop_assert!((0..m.nrows()).all(|i| m[(i, col)].norm() == 0.0));
    }

    #[test]
    fn random_models_fragment(model in (2usize..=3).prop_flat_map(random_model)) {
        let t = model.to_tilde().unwrap();
        let sup = build_superoperator(&t).unwrap();
        let report = verify_fragmentation(&t, &sup).unwrap();
        prop_assert!(report.off_block_norm < 1e-12);
        prop_assert!(report.passed, "{:?}", report);
    }
}

#[test]
fn cluster_models_conserve_fine_projectors() {
    for kind in [BuiltinKind::ClusterY, BuiltinKind::ClusterZiz] {
        let t = builtin(kind, 4, 0.9, 0.6).unwrap().to_tilde().unwrap();
        let sup = build_superoperator(&t).unwrap();
        assert!(verify_fragmentation(&t, &sup).unwrap().passed);
        assert!(verify_conservation(&t, &sup).unwrap().all_fine());
    }
}

#[test]
fn two_body_generator_conserves_only_the_coarse_projector() {
    let model =
        LindbladModel::from_strings(2, &[(1.0, "ZI"), (0.7, "IZ"), (0.4, "ZZ")], &[(0.5, "XI"), (0.3, "XX")]).unwrap();
    let t = model.to_tilde().unwrap();
    let sup = build_superoperator(&t).unwrap();
    let report = verify_conservation(&t, &sup).unwrap();
    assert!(report.sites.iter().all(|s| s.level == ConservationLevel::Coarse));
    assert!(report.sites.iter().all(|s| s.fine_residual > 1.0));
    assert!(verify_fragmentation(&t, &sup).unwrap().passed);
}

#[test]
fn hamiltonian_free_model_is_diagonal() {
    let model = builtin(BuiltinKind::ClusterZiz, 4, 0.0, 1.0).unwrap();
    let t = model.to_tilde().unwrap();
    let sup = build_superoperator(&t).unwrap();
    let m = sup.matrix();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                assert_eq!(m[(i, j)].norm(), 0.0);
            }
        }
    }
    assert!(verify_conservation(&t, &sup).unwrap().all_fine());
}
