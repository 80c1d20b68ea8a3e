use qgl::bubbling::paley9_bundle;
use qgl::constructors::{named_graph, NamedGraph};
use qgl::knots::*;
use qgl::regularity::association_scheme;
use qgl::schur_algebra::QuantumGraph;
use qgl::spin::*;
use qgl::{cr, Tolerance, C64};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn graph(name: NamedGraph) -> QuantumGraph {
    named_graph(name, &tol()).unwrap()
}

fn model(g: &QuantumGraph, eps: i32, t: Option<C64>, index: usize) -> SpinModel {
    let scheme = association_scheme(g, &tol()).unwrap();
    let sol = solve_spin_params(&scheme, eps, &tol()).unwrap();
    let p = match t {
        Some(t) => sol.at(t, &tol()).unwrap(),
        None => sol.params[index],
    };
    let m = boltzmann_weights(g, &p, &tol()).unwrap();
    assert!(m.report.all_pass);
    m
}

fn square_models() -> Vec<SpinModel> {
    let t = C64::from_polar(1.3, 0.7);
    let q = graph(NamedGraph::A3M2).irreflexive_part(&tol()).unwrap();
    vec![model(&graph(NamedGraph::ClassicalC4), 1, Some(t), 0), model(&q, 1, Some(t), 0), model(&q, -1, Some(t), 0)]
}

fn z(rep: &BraidRep, name: &str) -> C64 {
    evaluate_link(rep, &standard_braid(name).unwrap()).unwrap()
}

#[test]
fn braid_relations_on_square_and_paley() {
    for m in square_models() {
        let rep = braid_rep(&m, 5, &tol()).unwrap();
        assert!(rep.relations.max() < 1e-10, "{:?}", rep.relations);
    }
    let rep = braid_rep(&model(&graph(NamedGraph::NinePq), -1, None, 0), 3, &tol()).unwrap();
    assert!(rep.relations.max() < 1e-10);
    let op = rep.operator(&BraidWord::parse("s1 s2 s1", None).unwrap()).unwrap();
    assert_eq!(op.rows(), 81);
    let other = rep.operator(&BraidWord::parse("s2 s1 s2", None).unwrap()).unwrap();
    assert!(op.dist(&other) < 1e-10 * op.norm_fro());
}

#[test]
fn calibration_anchors() {
    for m in square_models() {
        let rep = braid_rep(&m, 5, &tol()).unwrap();
        assert!((z(&rep, "unknot") - 1.0).norm() < 1e-12);
        assert!((evaluate_link(&rep, &BraidWord::parse("", None).unwrap()).unwrap() - 1.0).norm() < 1e-12);
        assert!((evaluate_link(&rep, &BraidWord::parse("-s1", None).unwrap()).unwrap() - 1.0).norm() < 1e-12);
        // stabilisation chain of unknots
        for n in 2..=5 {
            let w = BraidWord::new(n, (1..n as i32).collect()).unwrap();
            assert!((evaluate_link(&rep, &w).unwrap() - 1.0).norm() < 1e-10, "{n}");
        }
    }
}

#[test]
fn markov_suite_on_square_models() {
    for m in square_models() {
        let rep = braid_rep(&m, 4, &tol()).unwrap();
        let r = markov_invariance_suite(&rep, 20, 7, &tol()).unwrap();
        assert_eq!(r.words.len(), 20);
        assert!(r.words.iter().all(|w| w.stabilization.is_some()));
        assert!(r.pass && r.max_residual < 1e-9, "{}", r.max_residual);
    }
}

#[test]
fn paley_classical_and_quantum_agree() {
    let classical = model(&graph(NamedGraph::ClassicalPaley9), -1, None, 0);
    let quantum = model(&graph(NamedGraph::NinePq), -1, None, 0);
    let bubbled = {
        let r = paley9_bundle().bubble(&tol()).unwrap();
        model(&r.deformed, -1, None, 0)
    };
    let reps: Vec<BraidRep> = [classical, quantum, bubbled].iter().map(|m| braid_rep(m, 3, &tol()).unwrap()).collect();
    // values of the classical model at t = e^{iπ/6}
    for (name, want) in [("unknot", 1.0), ("trefoil", -3.0), ("hopf", -1.0), ("figure-eight", 1.0), ("unlink2", 3.0)] {
        for rep in &reps {
            let v = z(rep, name);
            assert!((v - want).norm() < 1e-8, "{name}: {v}");
        }
    }
}

#[test]
fn clebsch_classical_and_quantum_agree() {
    for eps in [1, -1] {
        let a = braid_rep(&model(&graph(NamedGraph::ClassicalClebsch16), eps, None, 0), 3, &tol()).unwrap();
        let b = braid_rep(&model(&graph(NamedGraph::SixteenClq), eps, None, 0), 3, &tol()).unwrap();
        for name in ["unknot", "trefoil", "hopf", "figure-eight"] {
            assert!((z(&a, name) - z(&b, name)).norm() < 1e-8, "{name}");
        }
    }
}

#[test]
fn z_zero_models_are_constant_on_knots() {
    for name in [NamedGraph::SixteenClq, NamedGraph::G4] {
        for eps in [1, -1] {
            let rep = braid_rep(&model(&graph(name), eps, None, 0), 3, &tol()).unwrap();
            for knot in ["unknot", "trefoil", "figure-eight", "cinquefoil"] {
                assert!((z(&rep, knot) - 1.0).norm() < 1e-8, "{name} {knot} {}", z(&rep, knot));
            }
            let r = markov_invariance_suite(&rep, 20, 3, &tol()).unwrap();
            assert!(r.pass, "{}", r.max_residual);
        }
    }
}

#[test]
fn corrupted_model_is_caught() {
    let mut m = model(&graph(NamedGraph::ClassicalC4), 1, Some(cr(1.3)), 0);
    m.w_minus[(0, 1)] += 1e-2;
    m.w_minus[(1, 0)] += 1e-2;
    assert!(braid_rep(&m, 3, &tol()).is_err());
    let rep = BraidRep::unverified(&m, 3).unwrap();
    assert!(rep.relations.inverse > 1e-4);
    let r = markov_invariance_suite(&rep, 20, 7, &tol()).unwrap();
    assert!(!r.pass);
    assert!(r.words.iter().any(|w| w.conjugation > 1e-6));
}

#[test]
fn strand_budget_is_enforced() {
    let m = model(&graph(NamedGraph::ClassicalClebsch16), 1, None, 0);
    assert!(braid_rep(&m, 5, &tol()).is_err());
    assert!(braid_rep(&m, 4, &tol()).is_ok());
    let rep = braid_rep(&m, 2, &tol()).unwrap();
    assert!(evaluate_link(&rep, &standard_braid("figure-eight").unwrap()).is_err());
}
