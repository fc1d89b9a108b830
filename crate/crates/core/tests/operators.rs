mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qjacobi::fermion::{bch_fermionic_term, normal_order};
use qjacobi::jw::{jordan_wigner, ladder as jw_ladder};
use qjacobi::pauli::bch_pauli_term;
use qjacobi::{Execution, FermionGenerator, FermionKey, FermionOperator, Ladder, PauliGenerator, PauliKey, PauliOperator};

const N: usize = 4;
const TOL: f64 = 1e-10;

fn subset_of_size(n: usize, size: usize, seed: u64) -> u64 {
    // deterministic choice among the size-subsets of n modes
    let all: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize == size).collect();
    all[(seed as usize) % all.len()]
}

prop_compose! {
    fn fermion_key(n: usize)(rank in 0usize..=2, a in any::<u64>(), b in any::<u64>()) -> FermionKey {
        FermionKey { cre: subset_of_size(n, rank, a), ann: subset_of_size(n, rank, b) }
    }
}

prop_compose! {
    /// Pure excitation together with a compatible reference occupation.
    fn generator(n: usize)(rank in 1usize..=2, a in any::<u64>(), b in any::<u64>(), extra in any::<u64>(), neg in any::<bool>())
        -> (FermionGenerator, u64)
    {
        let cre = subset_of_size(n, rank, a);
        let free: Vec<usize> = (0..n).filter(|q| cre >> q & 1 == 0).collect();
        let ann_bits: Vec<usize> = {
            let k = subset_of_size(free.len(), rank, b);
            (0..free.len()).filter(|i| k >> i & 1 == 1).map(|i| free[i]).collect()
        };
        let ann = ann_bits.iter().fold(0u64, |m, &q| m | 1 << q);
        let reference = ann | (extra & ((1 << n) - 1) & !cre);
        let sign = if neg { -1.0 } else { 1.0 };
        (FermionGenerator::new(FermionKey { cre, ann }, sign, reference).unwrap(), reference)
    }
}

fn pauli_key(n: usize) -> impl Strategy<Value = PauliKey> {
    (0u64..1 << n, 0u64..1 << n).prop_map(|(x, z)| PauliKey::new(x, z))
}

fn generator_dense(g: &FermionGenerator) -> CMat {
    let e = fermion_key_dense(N, g.excitation().cre, g.excitation().ann) * Complex64::new(g.sign(), 0.0);
    &e - e.adjoint()
}

fn random_operator(terms: &[(FermionKey, f64)]) -> FermionOperator {
    let mut op = FermionOperator::new();
    for &(k, c) in terms {
        op.add_term(k, c);
    }
    op
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn key_action_matches_dense_column(key in fermion_key(N), det in 0u64..16) {
        let m = fermion_key_dense(N, key.cre, key.ann);
        let col = m.column(det as usize);
        match key.apply(det) {
            Some((d, s)) => {
                for i in 0..16 {
                    let expected = if i == d as usize { s } else { 0.0 };
                    prop_assert!((col[i] - Complex64::new(expected, 0.0)).norm() < 1e-15);
                }
            }
            None => prop_assert!(col.iter().all(|z| z.norm() < 1e-15)),
        }
    }

    #[test]
    fn index_list_sign_matches_dense_product(
        cre in prop::collection::vec(0usize..N, 0..3),
        ann in prop::collection::vec(0usize..N, 0..3),
    ) {
        prop_assume!(cre.len() == ann.len());
        let mut product = CMat::identity(16, 16);
        for &p in &cre {
            product *= ladder(N, p, true);
        }
        for &q in &ann {
            product *= ladder(N, q, false);
        }
        match FermionKey::from_indices(&cre, &ann) {
            Some((key, sign)) => {
                let expected = fermion_key_dense(N, key.cre, key.ann) * Complex64::new(sign, 0.0);
                prop_assert!(max_abs_diff(&product, &expected) < 1e-15);
            }
            None => prop_assert!(product.iter().all(|z| z.norm() < 1e-15)),
        }
    }

    #[test]
    fn normal_ordering_matches_dense_product(
        modes in prop::collection::vec((0usize..N, 0usize..N), 0..4),
        order in any::<prop::sample::Index>(),
    ) {
        // balanced product, shuffled deterministically from the sampled index
        let mut events: Vec<(usize, bool)> = modes.iter().flat_map(|&(p, q)| [(p, true), (q, false)]).collect();
        let len = events.len();
        for i in 0..len {
            let j = order.index(len.max(1) * (i + 1)) % len;
            events.swap(i, j);
        }
        let ladders: Vec<Ladder> = events.iter().map(|&(m, d)| if d { Ladder::create(m) } else { Ladder::annihilate(m) }).collect();
        let mut product = CMat::identity(16, 16);
        for &(m, d) in &events {
            product *= ladder(N, m, d);
        }
        let ordered = normal_order(&ladders);
        prop_assert!(max_abs_diff(&fermion_dense(&ordered, N), &product) < 1e-12);
    }

    #[test]
    fn product_and_commutator_match_dense(
        a in prop::collection::vec((fermion_key(N), -1.0f64..1.0), 1..4),
        b in prop::collection::vec((fermion_key(N), -1.0f64..1.0), 1..4),
    ) {
        let (x, y) = (random_operator(&a), random_operator(&b));
        let (dx, dy) = (fermion_dense(&x, N), fermion_dense(&y, N));
        prop_assert!(max_abs_diff(&fermion_dense(&x.multiply(&y), N), &(&dx * &dy)) < 1e-12);
        prop_assert!(max_abs_diff(&fermion_dense(&x.commutator(&y), N), &(&dx * &dy - &dy * &dx)) < 1e-12);
    }

    #[test]
    fn jordan_wigner_is_the_same_matrix(terms in prop::collection::vec((fermion_key(N), -1.0f64..1.0), 1..6)) {
        let op = random_operator(&terms);
        let qubit = jordan_wigner(&op);
        prop_assert!(max_abs_diff(&pauli_dense(&qubit, N), &fermion_dense(&op, N)) < 1e-12);
    }

    #[test]
    fn pauli_product_and_commutation(a in pauli_key(N), b in pauli_key(N)) {
        let (k, ph) = a.multiply(&b);
        let da = pauli_key_dense(N, a);
        let db = pauli_key_dense(N, b);
        let phase = qjacobi::pauli::PHASES[ph as usize];
        prop_assert!(max_abs_diff(&(&da * &db), &(pauli_key_dense(N, k) * phase)) < 1e-15);
        let comm = &da * &db - &db * &da;
        prop_assert_eq!(a.commutes_with(&b), comm.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn pauli_action_matches_dense_column(key in pauli_key(N), det in 0u64..16) {
        let (d, amp) = key.apply(det);
        let col = pauli_key_dense(N, key).column(det as usize).into_owned();
        prop_assert!((col[d as usize] - amp).norm() < 1e-15);
        prop_assert!((col.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fermionic_bch_matches_dense(key in fermion_key(N), (g, _) in generator(N), theta in -3.2f64..3.2, h in -2.0f64..2.0) {
        let closed = bch_fermionic_term(key, h, &g, theta);
        let term = fermion_key_dense(N, key.cre, key.ann) * Complex64::new(h, 0.0);
        let expected = conjugate_dense(&term, &(generator_dense(&g) * Complex64::new(theta, 0.0)));
        prop_assert!(max_abs_diff(&fermion_dense(&closed, N), &expected) < TOL);
    }

    #[test]
    fn pauli_bch_matches_dense(key in pauli_key(N), from in 0u64..16, to in 0u64..16, theta in -3.2f64..3.2, h in -2.0f64..2.0) {
        prop_assume!(from != to);
        let g = PauliGenerator::between(from, to).unwrap();
        let closed = bch_pauli_term(key, Complex64::new(h, 0.0), &g, theta);
        let term = pauli_key_dense(N, key) * Complex64::new(h, 0.0);
        let x = pauli_key_dense(N, g.key()) * Complex64::new(0.0, theta);
        prop_assert!(max_abs_diff(&pauli_dense(&closed, N), &conjugate_dense(&term, &x)) < TOL);
    }

    #[test]
    fn serial_and_parallel_conjugation_agree_bitwise(
        terms in prop::collection::vec((fermion_key(N), -1.0f64..1.0), 1..12),
        (g, _) in generator(N),
        theta in -1.0f64..1.0,
    ) {
        let op = random_operator(&terms);
        prop_assert_eq!(op.conjugate(&g, theta, Execution::Serial), op.conjugate(&g, theta, Execution::Parallel));
        let q = jordan_wigner(&op);
        let pg = PauliGenerator::between(0b0011, 0b0101).unwrap();
        prop_assert_eq!(q.conjugate(&pg, theta, Execution::Serial), q.conjugate(&pg, theta, Execution::Parallel));
    }
}

#[test]
fn whole_operator_conjugation_matches_dense() {
    let problem = load(H2);
    let g = FermionGenerator::new(FermionKey::new(&[2, 3], &[0, 1]), 1.0, 0b0011).unwrap();
    let theta = 0.37;
    let rotated = problem.hamiltonian.conjugate(&g, theta, Execution::Serial);
    let h = fermion_dense(&problem.hamiltonian, 4);
    let expected = conjugate_dense(&h, &(generator_dense(&g) * Complex64::new(theta, 0.0)));
    assert!(max_abs_diff(&fermion_dense(&rotated, 4), &expected) < TOL);
}

#[test]
fn jw_ladders_satisfy_canonical_anticommutation() {
    for p in 0..N {
        for q in 0..N {
            let ap = jw_ladder(p, false);
            let aq_dag = jw_ladder(q, true);
            let anti = ap.multiply(&aq_dag).add_scaled(&aq_dag.multiply(&ap), Complex64::new(1.0, 0.0));
            let expected = if p == q { PauliOperator::identity(1.0) } else { PauliOperator::new() };
            assert!(max_abs_diff(&pauli_dense(&anti, N), &pauli_dense(&expected, N)) < 1e-15, "p={p} q={q}");
        }
    }
}

#[test]
fn hermitian_conjugate_matches_adjoint() {
    let op = random_operator(&[(FermionKey::new(&[0, 2], &[1, 3]), 0.3), (FermionKey::new(&[1], &[0]), -0.7)]);
    assert!(max_abs_diff(&fermion_dense(&op.dagger(), N), &fermion_dense(&op, N).adjoint()) < 1e-15);
}
