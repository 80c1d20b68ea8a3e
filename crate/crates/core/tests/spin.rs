use qgl::constructors::{named_graph, NamedGraph};
use qgl::regularity::association_scheme;
use qgl::schur_algebra::QuantumGraph;
use qgl::spin::*;
use qgl::{c, cr, CMat, Tolerance, C64};
use std::f64::consts::PI;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn graph(name: NamedGraph) -> QuantumGraph {
    named_graph(name, &tol()).unwrap()
}

fn quantum_square() -> QuantumGraph {
    graph(NamedGraph::A3M2).irreflexive_part(&tol()).unwrap()
}

fn solutions(g: &QuantumGraph, eps: i32) -> SpinSolutions {
    let scheme = association_scheme(g, &tol()).unwrap();
    solve_spin_params(&scheme, eps, &tol()).unwrap()
}

fn failing(r: &QsmReport) -> Vec<String> {
    r.checks.iter().filter(|c| !c.pass).map(|c| format!("{} {:.3e}", c.name, c.residual)).collect()
}

fn generic_t() -> C64 {
    C64::from_polar(1.3, 0.7)
}

#[test]
fn square_parameters_are_free() {
    for g in [graph(NamedGraph::ClassicalC4), quantum_square()] {
        for eps in [1, -1] {
            let sol = solutions(&g, eps);
            assert!(sol.t_free);
            let p = sol.at(generic_t(), &tol()).unwrap();
            assert!((p.a + p.t.inv()).norm() < 1e-12);
            assert!((p.d - cr(-2.0 * eps as f64)).norm() < 1e-12);
            assert!((p.z - (p.t + eps as f64 / p.t)).norm() < 1e-12);
        }
    }
}

#[test]
fn square_weights_match_display() {
    let t = generic_t();
    for eps in [1, -1] {
        let e = eps as f64;
        let g = quantum_square();
        let p = solutions(&g, eps).at(t, &tol()).unwrap();
        let m = boltzmann_weights(&g, &p, &tol()).unwrap();
        let z = cr(0.0);
        let (x, y) = (2.0 * e * t, -2.0 / t);
        let want = CMat::from_rows(&[
            vec![z, z, z, x],
            vec![z, y, z, z],
            vec![z, z, y, z],
            vec![x, z, z, z],
        ])
        .unwrap();
        assert!(m.w_plus.dist(&want) < 1e-12, "{:?}", m.w_plus);
        let (x, y) = (2.0 * e / t, -2.0 * t);
        let want = CMat::from_rows(&[
            vec![z, z, z, x],
            vec![z, y, z, z],
            vec![z, z, y, z],
            vec![x, z, z, z],
        ])
        .unwrap();
        assert!(m.w_minus.dist(&want) < 1e-12);

        let g = graph(NamedGraph::ClassicalC4);
        let p = solutions(&g, eps).at(t, &tol()).unwrap();
        let m = boltzmann_weights(&g, &p, &tol()).unwrap();
        let (u, v, w) = (-1.0 / t, e * t, 1.0 / t);
        let want = CMat::from_rows(&[
            vec![u, v, w, v],
            vec![v, u, v, w],
            vec![w, v, u, v],
            vec![v, w, v, u],
        ])
        .unwrap();
        assert!(m.w_plus.dist(&want) < 1e-12);
    }
}

#[test]
fn nine_paley_parameters() {
    for g in [graph(NamedGraph::ClassicalPaley9), graph(NamedGraph::NinePq)] {
        let sol = solutions(&g, -1);
        assert_eq!(sol.params.len(), 4);
        for want in [PI / 6.0, -PI / 6.0, 5.0 * PI / 6.0, -5.0 * PI / 6.0] {
            let t = C64::from_polar(1.0, want);
            let p = sol.params.iter().find(|p| (p.t - t).norm() < 1e-10).expect("missing root");
            assert!((p.a - t.powi(3)).norm() < 1e-10);
            assert!((p.d - 3.0).norm() < 1e-12);
            assert!((p.z - (t - t.inv())).norm() < 1e-10);
            assert!((t * t + (t * t).inv() - 1.0).norm() < 1e-10);
        }
    }
}

#[test]
fn nine_paley_weights_match_display() {
    let g = graph(NamedGraph::ClassicalPaley9);
    let p = solutions(&g, -1).params[0];
    let m = boltzmann_weights(&g, &p, &tol()).unwrap();
    let t = p.t;
    for i in 0..9 {
        assert!((m.w_plus[(i, i)] - t.powi(3)).norm() < 1e-12);
        for j in 0..9 {
            if i != j {
                let v = m.w_plus[(i, j)];
                assert!((v + t).norm() < 1e-12 || (v - t.inv()).norm() < 1e-12);
            }
        }
    }
    // first displayed row: t³, εt, εt, εt, t⁻¹, t⁻¹, εt, t⁻¹, t⁻¹
    let row: Vec<C64> = vec![t.powi(3), -t, -t, -t, t.inv(), t.inv(), -t, t.inv(), t.inv()];
    for (j, v) in row.iter().enumerate() {
        assert!((m.w_plus[(0, j)] - v).norm() < 1e-12);
    }
}

#[test]
fn clebsch_and_g4_parameters() {
    for (name, d_unit, a_sign) in [
        (NamedGraph::SixteenClq, 4.0, -1.0),
        (NamedGraph::ClassicalClebsch16, 4.0, -1.0),
        (NamedGraph::G4, -3.0, 1.0),
    ] {
        let g = graph(name);
        for eps in [1, -1] {
            let sol = solutions(&g, eps);
            assert_eq!(sol.params.len(), 2, "{name}");
            for p in &sol.params {
                assert!((p.t * p.t + eps as f64).norm() < 1e-10);
                assert!((p.a - a_sign * p.t.inv()).norm() < 1e-10);
                assert!((p.d - d_unit * eps as f64).norm() < 1e-12);
                assert!(p.z.norm() < 1e-10);
            }
        }
    }
}

#[test]
fn g3_has_no_spin_model() {
    let scheme = association_scheme(&graph(NamedGraph::G3), &tol()).unwrap();
    assert!(solve_spin_params(&scheme, 1, &tol()).is_err());
    assert!(solve_spin_params(&scheme, -1, &tol()).is_err());
}

#[test]
fn g4_weights_match_display() {
    let g = graph(NamedGraph::G4);
    let n = 9;
    let perm = [0usize, 3, 6, 1, 4, 7, 2, 5, 8];
    for eps in [1, -1] {
        for p in solutions(&g, eps).params {
            let m = boltzmann_weights(&g, &p, &tol()).unwrap();
            let want = CMat::from_fn(n, n, |i, j| {
                if perm[i] != j {
                    cr(0.0)
                } else if i == j {
                    3.0 / p.t
                } else {
                    3.0 * eps as f64 * p.t
                }
            });
            assert!(m.w_plus.dist(&want) < 1e-10, "{:?}", m.w_plus);
            let sq = m.w_plus.matmul(&m.w_plus).unwrap();
            assert!(sq.dist(&CMat::identity(n).scale(cr(-9.0 * eps as f64))) < 1e-10);
        }
    }
}

fn all_models() -> Vec<(String, SpinModel)> {
    let mut out = Vec::new();
    for (name, g) in [("C4", graph(NamedGraph::ClassicalC4)), ("square_q", quantum_square())] {
        for eps in [1, -1] {
            let p = solutions(&g, eps).at(generic_t(), &tol()).unwrap();
            out.push((format!("{name} ε={eps}"), boltzmann_weights(&g, &p, &tol()).unwrap()));
        }
    }
    for (name, eps) in [
        (NamedGraph::ClassicalPaley9, -1),
        (NamedGraph::NinePq, -1),
        (NamedGraph::ClassicalClebsch16, 1),
        (NamedGraph::ClassicalClebsch16, -1),
        (NamedGraph::SixteenClq, 1),
        (NamedGraph::SixteenClq, -1),
        (NamedGraph::G4, 1),
        (NamedGraph::G4, -1),
    ] {
        let g = graph(name);
        for p in solutions(&g, eps).params {
            out.push((format!("{name} ε={eps} t={:.3}", p.t), boltzmann_weights(&g, &p, &tol()).unwrap()));
        }
    }
    out
}

#[test]
fn every_model_satisfies_the_axioms() {
    for (name, m) in all_models() {
        assert!(m.report.all_pass, "{name}: {:?}", failing(&m.report));
        for c in &m.report.checks {
            assert!(c.residual < 1e-8, "{name} {} {}", c.name, c.residual);
        }
        let ex = check_exchange(&m, &tol());
        assert!(ex.pass, "{name}: z = {} vs {}", ex.z, m.params.z);
    }
}

#[test]
fn operator_check_agrees_with_pointwise_oracle() {
    for (name, m) in all_models() {
        if !m.set.is_classical() {
            continue;
        }
        let oracle = classical_star_triangle_residual(&m.w_plus, &m.w_minus, m.d);
        let op = m.report.get("qsm5").unwrap().residual;
        assert!(oracle < 1e-9 && op < 1e-9, "{name}: {oracle} {op}");
    }
    // a corrupted coefficient breaks both
    let g = graph(NamedGraph::ClassicalC4);
    let mut p = solutions(&g, 1).at(generic_t(), &tol()).unwrap();
    p.t1 += 1e-3;
    let m = boltzmann_weights(&g, &p, &tol()).unwrap();
    let r = m.report.get("qsm5").unwrap();
    assert!(!r.pass && r.residual > 1e-5 && r.residual < 1e-1, "{}", r.residual);
    assert!(classical_star_triangle_residual(&m.w_plus, &m.w_minus, m.d) > 1e-5);
    assert!(!m.report.all_pass);
}

#[test]
fn hs_parameters_from_eigenvalues() {
    let sol = solve_spin_params_sr(-8.0, 2.0, -1, Some(100.0), &tol()).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let p = sol.params.iter().find(|p| (p.t - phi).norm() < 1e-10).unwrap();
    assert!((p.a + phi.powi(5)).norm() < 1e-10);
    assert!((p.d + 10.0).norm() < 1e-10);
    assert!((p.z - 1.0).norm() < 1e-10);
}

#[test]
fn exchange_values() {
    for (name, m) in all_models() {
        let ex = check_exchange(&m, &tol());
        if name.starts_with("SixteenClq") || name.starts_with("G4") || name.starts_with("ClassicalClebsch") {
            assert!(ex.z.norm() < 1e-10, "{name}");
        }
        if name.starts_with("square_q") {
            let e = m.params.epsilon as f64;
            assert!((ex.z - (generic_t() + e / generic_t())).norm() < 1e-10);
        }
    }
}

#[test]
fn hadamard_weights() {
    for name in [NamedGraph::G4, NamedGraph::SixteenClq] {
        let g = graph(name);
        for eps in [1, -1] {
            for p in solutions(&g, eps).params {
                let m = boltzmann_weights(&g, &p, &tol()).unwrap();
                assert!(check_hadamard(&m.w_plus, &m.set, &tol()).unwrap(), "{name}");
                assert!(check_hadamard(&m.w_minus.scale(cr(1.0)), &m.set, &tol()).unwrap(), "{name}");
                let mut bad = m.w_plus.clone();
                bad[(0, 0)] *= 1.0 + 1e-3;
                assert!(!check_hadamard(&bad, &m.set, &tol()).unwrap());
            }
        }
    }
}

#[test]
fn duality_on_nine_paley() {
    let g = graph(NamedGraph::NinePq);
    let p = solutions(&g, -1).params[0];
    let m = boltzmann_weights(&g, &p, &tol()).unwrap();
    let r = duality_psi(&m, &tol()).unwrap();
    assert!(r.pass, "{r:?}");
    // in the basis (id, T̂, T̂ᶜ) the duality is the eigenmatrix
    let p_mat = [[1.0, 4.0, 4.0], [1.0, 1.0, -2.0], [1.0, -2.0, 1.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((r.matrix[i][j] - p_mat[i][j]).norm() < 1e-9, "{:?}", r.matrix);
        }
    }
}

#[test]
fn duality_on_square_squares_to_d2() {
    for g in [graph(NamedGraph::ClassicalC4), quantum_square()] {
        let p = solutions(&g, 1).at(c(0.4, 1.2), &tol()).unwrap();
        let m = boltzmann_weights(&g, &p, &tol()).unwrap();
        let r = duality_psi(&m, &tol()).unwrap();
        assert!(r.pass && r.involution < 1e-10, "{r:?}");
        // Ψ(id) = Ĵ: first column is (1, 1, 1)
        for i in 0..3 {
            assert!((r.matrix[i][0] - 1.0).norm() < 1e-10);
        }
    }
}
