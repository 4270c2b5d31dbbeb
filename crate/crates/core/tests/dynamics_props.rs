use faer::Mat;
use lindfrag::dynamics::{
    all_up_state, evolve_echo, evolve_effective, generator_operator, operator_correspondence, time_grid, EchoOptions,
};
use lindfrag::effective::{restrict, restrict_subsystem};
use lindfrag::fragments::{fragment_of, parse_seed};
use lindfrag::frustration::build_graph;
use lindfrag::linalg::{self, c, C64};
use lindfrag::model::{builtin, BuiltinKind};
use lindfrag::oracle::{basis_index, build_superoperator};
use lindfrag::{Pauli, PauliString};
use proptest::prelude::*;

mod common;
use common::config;

fn letters(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(prop::sample::select(Pauli::ALL.to_vec()), n)
}

fn kinds() -> impl Strategy<Value = BuiltinKind> {
    prop::sample::select(vec![BuiltinKind::ClusterY, BuiltinKind::ClusterZiz])
}

fn unit(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[index] = c(1.0, 0.0);
    v
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn echo_starts_at_one(kind in kinds(), seed in (4usize..=8).prop_flat_map(letters), kappa in 0.0f64..2.0) {
        let t = builtin(kind, seed.len(), 1.0, kappa).unwrap().to_tilde().unwrap();
        let p = PauliString::from_paulis(&seed);
        let f = fragment_of(&t, &p).unwrap();
        let g = restrict(&t, &f).unwrap();
        let start = unit(g.dim(), f.index_of(&p).unwrap());
        let series = evolve_effective(&g, &start, &time_grid(5.0, 50), &EchoOptions::default()).unwrap();
        prop_assert!((series.values[0].norm() - 1.0).abs() < 1e-12);
        prop_assert!(series.values.iter().all(|z| z.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn echo_ignores_identity_shifts(
        kind in kinds(),
        seed in (4usize..=8).prop_flat_map(letters),
        shift_re in -3.0f64..3.0,
        shift_im in -3.0f64..3.0,
    ) {
        let t = builtin(kind, seed.len(), 1.0, 0.7).unwrap().to_tilde().unwrap();
        let p = PauliString::from_paulis(&seed);
        let f = fragment_of(&t, &p).unwrap();
        let m = restrict(&t, &f).unwrap().matrix().unwrap().clone();
        let shift = c(shift_re, shift_im);
        let shifted = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] + if i == j { shift } else { c(0.0, 0.0) });
        let start = unit(m.nrows(), f.index_of(&p).unwrap());
        let times = time_grid(4.0, 40);
        let a = evolve_echo(&m, &start, &times, &EchoOptions::default()).unwrap();
        let b = evolve_echo(&shifted, &start, &times, &EchoOptions::default()).unwrap();
        for (x, y) in a.magnitudes().iter().zip(b.magnitudes()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_dynamics_preserves_the_norm(kind in kinds(), seed in (4usize..=8).prop_flat_map(letters)) {
        let t = builtin(kind, seed.len(), 1.0, 0.0).unwrap().to_tilde().unwrap();
        let p = PauliString::from_paulis(&seed);
        let f = fragment_of(&t, &p).unwrap();
        let g = restrict(&t, &f).unwrap();
        let start = unit(g.dim(), f.index_of(&p).unwrap());
        let series = evolve_effective(&g, &start, &time_grid(20.0, 400), &EchoOptions::default()).unwrap();
        prop_assert!(series.norms.iter().all(|n| (n - 1.0).abs() < 1e-10));
    }
}

/// Echo of the first nontrivial subsystem of the fragment containing `seed`.
fn odd_chain_echo(seed: &str, state_of: impl Fn(usize) -> Vec<C64>) -> (Vec<f64>, Vec<String>) {
    let t = builtin(BuiltinKind::ClusterZiz, 11, 1.0, 0.8).unwrap().to_tilde().unwrap();
    let f = fragment_of(&t, &parse_seed(seed).unwrap()).unwrap();
    let graph = build_graph(&t, Some(&f)).unwrap();
    let comp = graph.subsystem_components().into_iter().find(|c| !graph.is_trivial(c)).unwrap();
    let sub = restrict_subsystem(&t, &f, &graph, &comp).unwrap();
    assert_eq!(sub.pseudospin_sites(), [3, 5, 7]);
    let state = state_of(sub.dim());
    let ops = generator_operator(&t, &sub, &state).unwrap();
    let series = evolve_effective(&sub, &state, &time_grid(10.0, 200), &EchoOptions::default()).unwrap();
    (series.magnitudes(), ops.iter().map(|o| o.tilde.to_string()).collect())
}

#[test]
fn all_up_state_is_the_alternating_x_operator() {
    let (_, ops) = odd_chain_echo("IIIXIXIXIII", all_up_state_of);
    assert_eq!(ops, ["IIIXIXIXIII"]);
}

fn all_up_state_of(dim: usize) -> Vec<C64> {
    all_up_state(dim.trailing_zeros() as usize)
}

#[test]
fn y_pattern_gives_the_same_echo() {
    let (up, _) = odd_chain_echo("IIIXIXIXIII", all_up_state_of);
    let (down, ops) = odd_chain_echo("IZIYIYIYIZI", |dim| unit(dim, dim - 1));
    assert_eq!(ops, ["IZIYIYIYIZI"]);
    for (a, b) in up.iter().zip(&down) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn restricted_evolution_matches_the_full_superoperator() {
    let t = builtin(BuiltinKind::ClusterY, 4, 0.9, 0.6).unwrap().to_tilde().unwrap();
    let sup = build_superoperator(&t).unwrap();
    let time = 0.8;
    let full = linalg::expm(&Mat::from_fn(sup.dim(), sup.dim(), |i, j| sup.matrix()[(i, j)] * time));
    for seed in ["IXYI", "ZXXZ", "XYYX", "IZXI"] {
        let p = parse_seed(seed).unwrap();
        let f = fragment_of(&t, &p).unwrap();
        let g = restrict(&t, &f).unwrap();
        let m = g.matrix().unwrap();
        let prop = linalg::expm(&Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * time));
        let start = f.index_of(&p).unwrap();
        let evolved: Vec<C64> = (0..m.nrows()).map(|i| prop[(i, start)]).collect();
        let mut mapped = vec![c(0.0, 0.0); sup.dim()];
        for comp in operator_correspondence(&t, &f, &evolved).unwrap() {
            mapped[basis_index(&comp.tilde)] += comp.amplitude;
        }
        let col = basis_index(&p);
        for (i, v) in mapped.iter().enumerate() {
            assert!((full[(i, col)] - v).norm() < 1e-12, "{seed}: row {i}");
        }
    }
}
