//! Symmetric spin models on 3-point regular quantum graphs.
//!
//! The Boltzmann weights live in the Bose–Mesner algebra
//! `span{id, T̂, T̂^c}`; their coefficients come from the eigenvalues
//! `(s, r)` of the self-dual ordering of the association scheme and a root
//! `t` of `s² + (r+1)² − ε·s·(r+1)·(t² + t⁻²) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{QglError, Result};
use crate::quantum_set::{apply_op_at, AxiomCheck, QuantumSet};
use crate::regularity::AssociationScheme;
use crate::schur_algebra::{complement_adjacency, complete_adjacency, conjugate, schur_product, QuantumGraph};
use crate::tensor_core::{gram_solve, inverse, Tolerance};
use crate::{cr, CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    pub epsilon: i32,
    pub s: f64,
    pub r: f64,
    pub t: C64,
    pub t0: C64,
    pub t1: C64,
    pub t2: C64,
    pub a: C64,
    pub d: C64,
    pub z: C64,
}

impl SpinParams {
    /// Coefficients for a given root `t` (not checked against the equation;
    /// see [`SpinParams::equation_residual`]).
    pub fn new(s: f64, r: f64, epsilon: i32, t: C64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if t.norm() == 0.0 || !t.is_finite() {
            return Err(QglError::Validation("t must be a nonzero finite complex number".into()));
        }
        let e = epsilon as f64;
        let ti = t.inv();
        let a = -s * e * t + (r + 1.0) * ti;
        Ok(SpinParams {
            epsilon,
            s,
            r,
            t,
            t0: a,
            t1: e * t,
            t2: ti,
            a,
            d: cr(e * (r - s)),
            z: t + e * ti,
        })
    }

    pub fn equation_residual(&self) -> f64 {
        let (s, r1, e) = (self.s, self.r + 1.0, self.epsilon as f64);
        (cr(s * s + r1 * r1) - e * s * r1 * (self.t * self.t + (self.t * self.t).inv()) - 1.0).norm()
    }
}

fn check_epsilon(epsilon: i32) -> Result<()> {
    if epsilon == 1 || epsilon == -1 {
        Ok(())
    } else {
        Err(QglError::Validation(format!("epsilon must be ±1, got {epsilon}")))
    }
}

/// All solutions for one sign `ε`. When `s(r+1) = 0` and
/// `s² + (r+1)² = 1` every `t ≠ 0` works; `t_free` is set and
/// [`SpinSolutions::at`] instantiates a value.
#[derive(Clone, Debug, Serialize)]
pub struct SpinSolutions {
    pub epsilon: i32,
    pub s: f64,
    pub r: f64,
    pub t_free: bool,
    pub params: Vec<SpinParams>,
}

impl SpinSolutions {
    pub fn at(&self, t: C64, tol: &Tolerance) -> Result<SpinParams> {
        let p = SpinParams::new(self.s, self.r, self.epsilon, t)?;
        if !self.t_free && p.equation_residual() > tol.abs_eps {
            return Err(QglError::Validation(format!("t = {t} does not solve the parameter equation")));
        }
        Ok(p)
    }
}

/// `(s, r)` and `δ²` from the self-dual ordering of the scheme's eigenmatrix.
pub fn scheme_sr(scheme: &AssociationScheme) -> (f64, f64, f64) {
    let p = &scheme.eigenmatrix_p;
    (p[1][1], p[2][1], p[0].iter().sum())
}

pub fn solve_spin_params(scheme: &AssociationScheme, epsilon: i32, tol: &Tolerance) -> Result<SpinSolutions> {
    if !scheme.formally_self_dual {
        return Err(QglError::Validation("scheme is not formally self-dual".into()));
    }
    let (s, r, d2) = scheme_sr(scheme);
    solve_spin_params_sr(s, r, epsilon, Some(d2), tol)
}

/// Solver on bare eigenvalue data; `delta_sq`, when given, is checked
/// against `d²`.
pub fn solve_spin_params_sr(s: f64, r: f64, epsilon: i32, delta_sq: Option<f64>, tol: &Tolerance) -> Result<SpinSolutions> {
    check_epsilon(epsilon)?;
    let e = epsilon as f64;
    let d = e * (r - s);
    if let Some(d2) = delta_sq {
        if (d * d - d2).abs() > tol.abs_eps * d2.max(1.0) {
            return Err(QglError::Numerical(format!("d² = {} differs from δ² = {d2}", d * d)));
        }
    }
    let lead = e * s * (r + 1.0);
    let constant = s * s + (r + 1.0) * (r + 1.0) - 1.0;
    if lead.abs() <= tol.abs_eps {
        if constant.abs() <= tol.abs_eps {
            return Ok(SpinSolutions { epsilon, s, r, t_free: true, params: Vec::new() });
        }
        return Err(QglError::Validation(format!(
            "no spin parameters for s = {s}, r = {r}: the equation has no t"
        )));
    }
    // u = t² + t⁻², then t² solves x² − u·x + 1 = 0
    let u = cr(constant / lead);
    let disc2 = u * u - 4.0;
    // a double root in t² would otherwise split at the 1e-8 level
    let disc = if disc2.norm() <= tol.abs_eps { cr(0.0) } else { disc2.sqrt() };
    let mut params: Vec<SpinParams> = Vec::new();
    for x in [(u + disc) / 2.0, (u - disc) / 2.0] {
        let root = x.sqrt();
        for t in [root, -root] {
            if params.iter().all(|p| (p.t - t).norm() > tol.abs_eps) {
                params.push(SpinParams::new(s, r, epsilon, t)?);
            }
        }
    }
    Ok(SpinSolutions { epsilon, s, r, t_free: false, params })
}

#[derive(Clone, Debug, Serialize)]
pub struct QsmReport {
    pub checks: Vec<AxiomCheck>,
    pub all_pass: bool,
}

impl QsmReport {
    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct SpinModel {
    pub set: QuantumSet,
    pub adj: CMat,
    pub w_plus: CMat,
    pub w_minus: CMat,
    pub d: C64,
    pub a: C64,
    pub params: SpinParams,
    pub report: QsmReport,
}

/// `W₊ = t₀·id + t₁·T̂ + t₂·T̂^c` and `W₋ = t₀⁻¹·id + t₁⁻¹·T̂ + t₂⁻¹·T̂^c`,
/// verified on construction (failures land in the report).
pub fn boltzmann_weights(g: &QuantumGraph, params: &SpinParams, tol: &Tolerance) -> Result<SpinModel> {
    if !(g.flags.irreflexive && g.flags.undirected) {
        return Err(QglError::Validation("spin models need an irreflexive undirected graph".into()));
    }
    let n = g.dim();
    let tc = complement_adjacency(&g.adj, &g.set);
    let eye = CMat::identity(n);
    let combo = |c0: C64, c1: C64, c2: C64| &(&eye.scale(c0) + &g.adj.scale(c1)) + &tc.scale(c2);
    let w_plus = combo(params.t0, params.t1, params.t2);
    let w_minus = combo(params.t0.inv(), params.t1.inv(), params.t2.inv());
    let mut model = SpinModel {
        set: g.set.clone(),
        adj: g.adj.clone(),
        w_plus,
        w_minus,
        d: params.d,
        a: params.a,
        params: *params,
        report: QsmReport { checks: Vec::new(), all_pass: false },
    };
    model.report = verify_qsm(&model, tol)?;
    Ok(model)
}

/// `c·(id⊗m)∘(id⊗W⊗id)∘(m†⊗id)` on `X⊗X`.
pub fn sandwich(set: &QuantumSet, w: &CMat, c: C64) -> CMat {
    let n = set.dim();
    let mut out = CMat::zeros(n * n, n * n);
    let mut e = vec![cr(0.0); n * n];
    for col in 0..n * n {
        e[col] = cr(1.0);
        let v = set.apply_m_dag_at(&e, 2, 0);
        let v = apply_op_at(w, &v, n, n);
        let v = set.apply_m_at(&v, 3, 1);
        out.set_col(col, &v.iter().map(|x| x * c).collect::<Vec<_>>());
        e[col] = cr(0.0);
    }
    out
}

/// Both sides of the star-triangle equation as `N × N²` matrices:
/// `W₊∘m∘(W₊⊗W₋)` and `d·δ⁻²·m∘(W₊⊗W₋)∘(m⊗id)∘(id⊗W₋⊗id)∘(id⊗m†)`.
fn star_triangle_sides(m: &SpinModel) -> Result<(CMat, CMat)> {
    let set = &m.set;
    let n = set.dim();
    let scale = m.d / set.delta_sq();
    let mut lhs = CMat::zeros(n, n * n);
    let mut rhs = CMat::zeros(n, n * n);
    let mut e = vec![cr(0.0); n * n];
    for col in 0..n * n {
        e[col] = cr(1.0);
        let v = apply_op_at(&m.w_plus, &e, 1, n);
        let v = apply_op_at(&m.w_minus, &v, n, 1);
        let v = set.apply_m_at(&v, 2, 0);
        lhs.set_col(col, &m.w_plus.matvec(&v)?);

        let v = set.apply_m_dag_at(&e, 2, 1);
        let v = apply_op_at(&m.w_minus, &v, n, n);
        let v = set.apply_m_at(&v, 3, 0);
        let v = apply_op_at(&m.w_plus, &v, 1, n);
        let v = apply_op_at(&m.w_minus, &v, n, 1);
        let v = set.apply_m_at(&v, 2, 0);
        rhs.set_col(col, &v.iter().map(|x| x * scale).collect::<Vec<_>>());
        e[col] = cr(0.0);
    }
    Ok((lhs, rhs))
}

/// The five spin-model axioms plus symmetry, the braid form of the
/// star-triangle equation and `W₋ = d²·W₊⁻¹`.
pub fn verify_qsm(m: &SpinModel, tol: &Tolerance) -> Result<QsmReport> {
    let set = &m.set;
    let n = set.dim();
    let eye = CMat::identity(n);
    let j = complete_adjacency(set);
    let (wp, wm) = (&m.w_plus, &m.w_minus);
    let mut checks = Vec::new();
    let mut push = |name: &str, lhs: &CMat, rhs: &CMat| {
        let res = lhs.dist(rhs);
        let bound = tol.op_threshold(lhs.rows(), lhs.norm_fro(), rhs.norm_fro());
        checks.push(AxiomCheck { name: name.into(), residual: res, pass: res <= bound });
    };
    let q1a = schur_product(&eye, wp, set)?;
    let q1b = schur_product(&eye, wm, set)?;
    let stacked = |a: &CMat, b: &CMat| CMat::from_fn(2 * n, n, |i, k| if i < n { a[(i, k)] } else { b[(i - n, k)] });
    push("qsm1", &stacked(&q1a, &q1b), &stacked(&eye.scale(m.a), &eye.scale(m.a.inv())));
    push(
        "qsm2",
        &stacked(&j.matmul(wp)?, &j.matmul(wm)?),
        &stacked(&j.scale(m.d / m.a), &j.scale(m.d * m.a)),
    );
    push("qsm3", &schur_product(wp, wm, set)?, &j);
    push("qsm4", &wp.matmul(wm)?, &eye.scale(m.d * m.d));
    let (lhs, rhs) = star_triangle_sides(m)?;
    push("qsm5", &lhs, &rhs);
    // linear transpose `(W*)†`; the antilinear `W*` alone moves every non-real t
    push(
        "symmetric",
        &stacked(&conjugate(wp, set)?.adjoint(), &conjugate(wm, set)?.adjoint()),
        &stacked(wp, wm),
    );
    let r1 = wp.kron(&eye);
    let r2 = sandwich(set, wm, m.d / set.delta_sq());
    push("braid", &r1.matmul(&r2)?.matmul(&r1)?, &r2.matmul(&r1)?.matmul(&r2)?);
    push("w_minus_inverse", wm, &inverse(wp)?.scale(m.d * m.d));
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(QsmReport { checks, all_pass })
}

/// Classical star-triangle identity checked pointwise,
/// `Σ_c W₊(x,c)W₊(c,a)W₋(c,b) = d·W₋(a,b)W₊(x,a)W₋(x,b)` over all triples.
pub fn classical_star_triangle_residual(wp: &CMat, wm: &CMat, d: C64) -> f64 {
    let n = wp.rows();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for a in 0..n {
            for b in 0..n {
                let lhs: C64 = (0..n).map(|c| wp[(x, c)] * wp[(c, a)] * wm[(c, b)]).sum();
                let rhs = d * wm[(a, b)] * wp[(x, a)] * wm[(x, b)];
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExchangeReport {
    pub z: C64,
    pub residual: f64,
    pub pass: bool,
}

/// Fits `W₊ + ε·W₋ = z·(d·id + ε·Ĵ)` and compares `z` with the parameters.
pub fn check_exchange(m: &SpinModel, tol: &Tolerance) -> ExchangeReport {
    let n = m.set.dim();
    let e = m.params.epsilon as f64;
    let target = &m.w_plus + &m.w_minus.scale(cr(e));
    let basis = &CMat::identity(n).scale(m.d) + &complete_adjacency(&m.set).scale(cr(e));
    let z = basis.inner(&target) / basis.inner(&basis);
    let residual = target.dist(&basis.scale(z));
    let bound = tol.op_threshold(n, target.norm_fro(), 1.0);
    ExchangeReport { z, residual, pass: residual <= bound && (z - m.params.z).norm() <= tol.abs_eps }
}

/// Quantum Hadamard: `W∘W† = δ²·id` and `W★W* = Ĵ`.
pub fn check_hadamard(w: &CMat, qs: &QuantumSet, tol: &Tolerance) -> Result<bool> {
    let n = qs.dim();
    let lhs = w.matmul(&w.adjoint())?;
    let rhs = CMat::identity(n).scale(cr(qs.delta_sq()));
    let a = lhs.dist(&rhs) <= tol.op_threshold(n, lhs.norm_fro(), rhs.norm_fro());
    let s = schur_product(w, &conjugate(w, qs)?, qs)?;
    let j = complete_adjacency(qs);
    let b = s.dist(&j) <= tol.op_threshold(n, s.norm_fro(), j.norm_fro());
    Ok(a && b)
}

/// The duality on the Bose–Mesner algebra, as a matrix on the basis
/// `(id, T̂, T̂^c)` (column `j` holds the coordinates of `Ψ(A_j)`).
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub matrix: [[C64; 3]; 3],
    /// Residual of the four defining assignments in the fitted map.
    pub consistency: f64,
    /// Largest `‖Ψ(A∘B) − Ψ(A)★Ψ(B)‖` over basis pairs.
    pub homomorphism: f64,
    /// `‖Ψ²(W₊) − d²·W₊‖`.
    pub involution: f64,
    pub pass: bool,
}

/// `Ψ: W₊ ↦ d·W₋, W₋ ↦ d·W₊, Ĵ ↦ d²·id, id ↦ Ĵ`, extended linearly.
pub fn duality_psi(m: &SpinModel, tol: &Tolerance) -> Result<DualityReport> {
    let set = &m.set;
    let n = set.dim();
    let eye = CMat::identity(n);
    let basis = [eye.clone(), m.adj.clone(), complement_adjacency(&m.adj, set)];
    let gram = CMat::from_fn(3, 3, |i, j| basis[i].inner(&basis[j]));
    let coords = |x: &CMat| -> Result<Vec<C64>> {
        let rhs = CMat::from_fn(3, 1, |i, _| basis[i].inner(x));
        let (c, _) = gram_solve(&gram, &rhs.col(0), 1e-12, tol)?;
        Ok(c)
    };
    let span = |c: &[C64]| -> CMat {
        let mut out = CMat::zeros(n, n);
        for (b, &ci) in basis.iter().zip(c) {
            out = &out + &b.scale(ci);
        }
        out
    };
    let j = complete_adjacency(set);
    let pairs = [
        (m.w_plus.clone(), m.w_minus.scale(m.d)),
        (m.w_minus.clone(), m.w_plus.scale(m.d)),
        (j.clone(), eye.scale(m.d * m.d)),
        (eye.clone(), j.clone()),
    ];
    // least-squares map M with M·src_k = dst_k
    let src: Vec<Vec<C64>> = pairs.iter().map(|(a, _)| coords(a)).collect::<Result<_>>()?;
    let dst: Vec<Vec<C64>> = pairs.iter().map(|(_, b)| coords(b)).collect::<Result<_>>()?;
    let s = CMat::from_fn(3, 4, |i, k| src[k][i]);
    let d = CMat::from_fn(3, 4, |i, k| dst[k][i]);
    let sst = s.matmul(&s.adjoint())?;
    let psi = d.matmul(&s.adjoint())?.matmul(&inverse(&sst)?)?;
    let consistency = psi.matmul(&s)?.dist(&d);
    let apply = |x: &CMat| -> Result<CMat> { Ok(span(&psi.matvec(&coords(x)?)?)) };
    let mut homomorphism: f64 = 0.0;
    for a in &basis {
        for b in &basis {
            let lhs = apply(&a.matmul(b)?)?;
            let rhs = schur_product(&apply(a)?, &apply(b)?, set)?;
            homomorphism = homomorphism.max(lhs.dist(&rhs));
        }
    }
    let involution = apply(&apply(&m.w_plus)?)?.dist(&m.w_plus.scale(m.d * m.d));
    let bound = tol.op_threshold(n, m.w_plus.norm_fro() * (m.d * m.d).norm(), 1.0);
    let mut matrix = [[cr(0.0); 3]; 3];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = psi[(i, k)];
        }
    }
    Ok(DualityReport {
        matrix,
        consistency,
        homomorphism,
        involution,
        pass: consistency <= bound && homomorphism <= bound && involution <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn hs_parameters() {
        let sol = solve_spin_params_sr(-8.0, 2.0, -1, Some(100.0), &tol()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let p = sol.params[0];
        assert!((p.t - phi).norm() < 1e-12);
        assert!((p.a + phi.powi(5)).norm() < 1e-10);
        assert!((p.d + 10.0).norm() < 1e-12 && (p.z - 1.0).norm() < 1e-12);
        assert_eq!(sol.params.len(), 4);
        assert!(sol.params.iter().all(|p| p.equation_residual() < 1e-10));
    }

    #[test]
    fn degenerate_cases() {
        let sq = solve_spin_params_sr(0.0, -2.0, 1, Some(4.0), &tol()).unwrap();
        assert!(sq.t_free && sq.params.is_empty());
        let p = sq.at(C64::new(0.3, 1.1), &tol()).unwrap();
        assert!((p.a + p.t.inv()).norm() < 1e-14);
        // G3's pair has s(r+1) = 0 but s² + (r+1)² = 4
        assert!(solve_spin_params_sr(0.0, -3.0, 1, None, &tol()).is_err());
        assert!(solve_spin_params_sr(1.0, -2.0, 1, Some(10.0), &tol()).is_err());
        assert!(solve_spin_params_sr(1.0, -2.0, 2, None, &tol()).is_err());
    }

    #[test]
    fn hadamard_toy() {
        let qs = crate::quantum_set::make_classical_set(2).unwrap();
        let h = CMat::from_rows(&[vec![cr(1.0), cr(1.0)], vec![cr(1.0), cr(-1.0)]]).unwrap();
        assert!(check_hadamard(&h, &qs, &tol()).unwrap());
        let bad = CMat::from_rows(&[vec![cr(1.0), cr(2.0)], vec![cr(1.0), cr(-1.0)]]).unwrap();
        assert!(!check_hadamard(&bad, &qs, &tol()).unwrap());
    }
}
