use proptest::prelude::*;

use clonesim::circuitlang::{execute, parse, unparse, CircuitProgram, ExpectOp, GateOp, Statement, StatementKind};
use clonesim::cloning::universal_clone;
use clonesim::gates::{apply_unitary, rotation_gate, GateMatrix};
use clonesim::qmath::{hermitian_eigensystem, partial_trace, symmetric_projector, ComplexMatrix, Ket, C64};
use clonesim::states::{real_ket, RealQubitState};
use clonesim::ugates::apply_universal_cnot;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// `(1/n!) sum_pi P_pi`, with `P_pi` moving the bit of qubit `i` to qubit `pi(i)`.
fn permutation_average(n: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    for pi in permutations(n) {
        for x in 0..dim {
            let y = (0..n).fold(0, |acc, q| acc | (bit(x, q) << (n - 1 - pi[q])));
            sum[(y, x)] += C64::new(1.0, 0.0);
        }
    }
    sum.scale_real(1.0 / factorial(n) as f64)
}

#[test]
fn symmetric_projector_equals_permutation_average() {
    for n in 1..=6 {
        let p = symmetric_projector(n).unwrap();
        assert!(p.max_abs_diff(&permutation_average(n)) < 1e-12, "n={n}");
    }
}

fn qubit_ket() -> impl Strategy<Value = Ket> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-zero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| Ket::new(vec![C64::new(a, b), C64::new(c, d)]).unwrap())
}

fn su2() -> impl Strategy<Value = GateMatrix> {
    (0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::PI).prop_map(
        |(a, b, t)| {
            let (s, c) = t.sin_cos();
            GateMatrix::new(ComplexMatrix::from_rows(&[
                &[C64::from_polar(c, a), C64::from_polar(s, b)],
                &[-C64::from_polar(s, -b), C64::from_polar(c, -a)],
            ]))
            .unwrap()
        },
    )
}

fn mixed_qubit() -> impl Strategy<Value = ComplexMatrix> {
    (qubit_ket(), 0.0f64..=1.0)
        .prop_map(|(k, w)| &k.density().scale_real(w) + &ComplexMatrix::identity(2).scale_real((1.0 - w) / 2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn cloner_is_covariant(psi in qubit_ket(), u in su2(), n in 1usize..=2, extra in 1usize..=3) {
        let m = (n + extra).min(6);
        let out = universal_clone(&psi.density(), n, m).unwrap().joint;
        let moved = universal_clone(&u.apply_ket(&psi).unwrap().density(), n, m).unwrap().joint;
        let targets: Vec<usize> = (0..m).collect();
        let mut um = u.matrix().clone();
        for _ in 1..m {
            um = um.tensor(u.matrix());
        }
        let expected = apply_unitary(&out, &GateMatrix::new(um).unwrap(), &targets, m).unwrap();
        prop_assert!(moved.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn clones_are_symmetric_copies(psi in qubit_ket(), m in 2usize..=6) {
        let out = universal_clone(&psi.density(), 1, m).unwrap();
        let first = out.clone_state(0).unwrap();
        for k in 1..m {
            prop_assert!(out.clone_state(k).unwrap().max_abs_diff(&first) < 1e-12);
        }
    }

    #[test]
    fn one_to_two_cloner_is_a_channel(sigma in mixed_qubit()) {
        let out = universal_clone(&sigma, 1, 2).unwrap().joint;
        prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(hermitian_eigensystem(&out).unwrap().min_value() >= -1e-9);
    }

    #[test]
    fn ucnot_keeps_trace_on_real_products(t in 0.0f64..6.3, p in 0.0f64..6.3) {
        let input = real_ket(RealQubitState::new(t).unwrap()).tensor(&real_ket(RealQubitState::new(p).unwrap()));
        let r = apply_universal_cnot(&input.density()).unwrap();
        prop_assert!((r.output.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(hermitian_eigensystem(&r.output).unwrap().min_value() >= -1e-9);
    }

    #[test]
    fn partial_trace_recovers_factors(a in mixed_qubit(), b in mixed_qubit(), c in mixed_qubit()) {
        let joint = a.tensor(&b).tensor(&c);
        prop_assert!(partial_trace(&joint, &[2, 2, 2], &[1]).unwrap().max_abs_diff(&b) < 1e-12);
        prop_assert!(partial_trace(&joint, &[2, 2, 2], &[0, 2]).unwrap().max_abs_diff(&a.tensor(&c)) < 1e-12);
    }

    #[test]
    fn rotations_compose_additively(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let composed = rotation_gate(a).then(&rotation_gate(b));
        prop_assert!(composed.matrix().max_abs_diff(rotation_gate(a + b).matrix()) < 1e-12);
    }

    #[test]
    fn parse_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse(&text);
    }
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

fn program() -> impl Strategy<Value = CircuitProgram> {
    (2usize..=4).prop_flat_map(|n| {
        let q = 0..n;
        let pair = (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n));
        let gate = prop_oneof![
            q.clone().prop_map(GateOp::Not),
            (angle(), q.clone()).prop_map(|(xi, qubit)| GateOp::U { xi, qubit }),
            pair.clone().prop_map(|(control, target)| GateOp::Cnot { control, target }),
            pair.clone().prop_map(|(control, target)| GateOp::Ucnot { control, target }),
            (angle(), pair.clone()).prop_map(|(xi, (control, target))| GateOp::Ucu { xi, control, target }),
            pair.clone().prop_map(|(c, target)| GateOp::Utoffoli { controls: vec![c], target }),
        ];
        let tol = proptest::option::of(1e-9f64..1.0);
        let expect = prop_oneof![
            (q.clone(), angle(), tol.clone()).prop_map(|(qubit, alpha, tol)| ExpectOp::Fidelity { qubit, alpha, tol }),
            (pair.clone(), tol.clone()).prop_map(|((a, b), tol)| ExpectOp::Concurrence { a, b, tol }),
            (q.clone(), tol).prop_map(|(qubit, tol)| ExpectOp::Purity { qubit, tol }),
        ];
        let body = prop::collection::vec(
            prop_oneof![gate.prop_map(StatementKind::Gate), expect.prop_map(StatementKind::Expect)],
            0..8,
        );
        let prepares = prop::collection::vec((angle(), proptest::option::of(0.0f64..=1.0)), n);
        (prepares, body, prop::collection::vec(0usize..3, 8 + n)).prop_map(move |(prep, body, gaps)| {
            let mut line = 1;
            let mut statements = Vec::new();
            let kinds = prep
                .into_iter()
                .enumerate()
                .map(|(qubit, (alpha, epsilon))| StatementKind::Prepare { qubit, alpha, epsilon })
                .chain(body);
            for (kind, gap) in kinds.zip(gaps) {
                line += 1 + gap;
                statements.push(Statement { line, kind });
            }
            CircuitProgram { qubit_count: n, statements }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_programs_round_trip(p in program()) {
        let text = unparse(&p);
        let parsed = parse(&text).unwrap();
        prop_assert_eq!(&parsed, &p);
        prop_assert_eq!(parse(&unparse(&parsed)).unwrap(), parsed);
    }

    #[test]
    fn execution_keeps_a_valid_register(p in program()) {
        // some programs leave the real-product domain of the universal C-NOT; those must error, not corrupt
        if let Ok(r) = execute(&p) {
            prop_assert!((r.final_trace - 1.0).abs() <= 1e-9);
            prop_assert!(hermitian_eigensystem(&r.final_density).unwrap().min_value() >= -1e-9);
            prop_assert!(r.stats.zeta >= 0.0);
        }
    }
}
