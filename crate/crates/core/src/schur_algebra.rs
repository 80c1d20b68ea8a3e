//! The convolution structure on `End(ℓ²(X))`: Schur product `★`, the
//! conjugation `*`, graph predicates, complements and edge projectors.

use serde::Serialize;

use crate::error::{QglError, Result};
use crate::quantum_set::{apply_op_at, QuantumSet};
use crate::tensor_core::{op_close, Tolerance};
use crate::{cr, CMat, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GraphFlags {
    pub schur_idempotent: bool,
    pub real: bool,
    pub undirected: bool,
    pub reflexive: bool,
    pub irreflexive: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FlagResiduals {
    pub schur_idempotent: f64,
    pub real: f64,
    pub undirected: f64,
    pub reflexive: f64,
    pub irreflexive: f64,
    /// Scalar `z` with `T̂★id ≈ z·id`.
    pub z: f64,
}

/// A Schur idempotent on a quantum set together with its flags.
#[derive(Clone, Debug)]
pub struct QuantumGraph {
    pub set: QuantumSet,
    pub adj: CMat,
    pub flags: GraphFlags,
    pub residuals: FlagResiduals,
}

fn check_square(t: &CMat, qs: &QuantumSet) -> Result<()> {
    let d = qs.dim();
    if t.shape() != (d, d) {
        return Err(QglError::DimensionMismatch(format!(
            "operator is {}x{}, set has dimension {d}",
            t.rows(),
            t.cols()
        )));
    }
    Ok(())
}

/// `S★T = δ⁻²·m∘(S⊗T)∘m†`.
pub fn schur_product(s: &CMat, t: &CMat, qs: &QuantumSet) -> Result<CMat> {
    check_square(s, qs)?;
    check_square(t, qs)?;
    let d = qs.dim();
    let inv = 1.0 / qs.delta_sq();
    let mut out = CMat::zeros(d, d);
    for g2 in 0..d {
        for t2 in qs.terms_out(g2) {
            let w2 = t2.coef.conj() * inv;
            for t1 in qs.terms() {
                let x = s[(t1.a, t2.a)];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                let y = t[(t1.b, t2.b)];
                if y == C64::new(0.0, 0.0) {
                    continue;
                }
                out[(t1.out, g2)] += t1.coef * x * y * w2;
            }
        }
    }
    Ok(out)
}

/// `T* = (ev⊗id)∘(id⊗T†⊗id)∘(id⊗coev)`.
pub fn conjugate(t: &CMat, qs: &QuantumSet) -> Result<CMat> {
    check_square(t, qs)?;
    let e = qs.ev_matrix();
    let k = qs.coev_matrix();
    Ok((&(&e * &t.adjoint()) * &k).transpose())
}

/// `Ĵ = δ²·ι∘ι†`.
pub fn complete_adjacency(qs: &QuantumSet) -> CMat {
    let u = qs.unit();
    let d2 = qs.delta_sq();
    CMat::from_fn(qs.dim(), qs.dim(), |i, j| u[i] * u[j].conj() * d2)
}

pub fn complete_graph(qs: &QuantumSet, tol: &Tolerance) -> Result<QuantumGraph> {
    analyze_flags(qs, &complete_adjacency(qs), tol)
}

pub fn trivial_graph(qs: &QuantumSet, tol: &Tolerance) -> Result<QuantumGraph> {
    analyze_flags(qs, &CMat::identity(qs.dim()), tol)
}

/// Populate every flag; fails only when `adj` is not a Schur idempotent.
pub fn analyze_flags(qs: &QuantumSet, adj: &CMat, tol: &Tolerance) -> Result<QuantumGraph> {
    check_square(adj, qs)?;
    let d = qs.dim();
    let sq = schur_product(adj, adj, qs)?;
    let (r_idem, idem) = op_close(&sq, adj, tol);
    if !idem {
        return Err(QglError::NotIdempotent(r_idem));
    }
    let conj = conjugate(adj, qs)?;
    let (r_real, real) = op_close(&conj, adj, tol);
    let (r_und, undirected) = op_close(&adj.adjoint(), adj, tol);
    let id = CMat::identity(d);
    let with_id = schur_product(adj, &id, qs)?;
    let zero = CMat::zeros(d, d);
    let (r_irr, irreflexive) = op_close(&with_id, &zero, tol);
    let z = with_id.trace().re / d as f64;
    let (r_ref, close) = op_close(&with_id, &id.scale(cr(z)), tol);
    let reflexive = close && z > tol.abs_eps;
    Ok(QuantumGraph {
        set: qs.clone(),
        adj: adj.clone(),
        flags: GraphFlags {
            schur_idempotent: true,
            real,
            undirected,
            reflexive,
            irreflexive,
        },
        residuals: FlagResiduals {
            schur_idempotent: r_idem,
            real: r_real,
            undirected: r_und,
            reflexive: r_ref,
            irreflexive: r_irr,
            z,
        },
    })
}

impl QuantumGraph {
    pub fn new(qs: &QuantumSet, adj: &CMat, tol: &Tolerance) -> Result<Self> {
        analyze_flags(qs, adj, tol)
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// The irreflexive version: unchanged if already irreflexive, `T̂ − id`
    /// for reflexive graphs.
    pub fn irreflexive_part(&self, tol: &Tolerance) -> Result<QuantumGraph> {
        if self.flags.irreflexive {
            return Ok(self.clone());
        }
        if !self.flags.reflexive {
            return Err(QglError::Validation(
                "graph is neither reflexive nor irreflexive".into(),
            ));
        }
        let adj = &self.adj - &CMat::identity(self.dim());
        analyze_flags(&self.set, &adj, tol)
    }

    /// Reflexive version `T̂ + id` of an irreflexive graph.
    pub fn reflexive_part(&self, tol: &Tolerance) -> Result<QuantumGraph> {
        if self.flags.reflexive {
            return Ok(self.clone());
        }
        if !self.flags.irreflexive {
            return Err(QglError::Validation(
                "graph is neither reflexive nor irreflexive".into(),
            ));
        }
        let adj = &self.adj + &CMat::identity(self.dim());
        analyze_flags(&self.set, &adj, tol)
    }
}

/// Irreflexive complement `Ĵ − id − T̂`. Reflexive inputs are first made
/// irreflexive.
pub fn complement(g: &QuantumGraph, tol: &Tolerance) -> Result<QuantumGraph> {
    let g = g.irreflexive_part(tol)?;
    let adj = complement_adjacency(&g.adj, &g.set);
    analyze_flags(&g.set, &adj, tol)
}

/// `Ĵ − id − T̂` without any checks.
pub fn complement_adjacency(adj: &CMat, qs: &QuantumSet) -> CMat {
    let j = complete_adjacency(qs);
    &(&j - &CMat::identity(qs.dim())) - adj
}

/// Edge projector `T = δ⁻²·(m⊗id)∘(id⊗T̂⊗id)∘(id⊗m†)` on `ℓ²(X)⊗ℓ²(X)`.
pub fn edge_projector(g: &QuantumGraph) -> CMat {
    edge_projector_of(&g.adj, &g.set)
}

pub fn edge_projector_of(adj: &CMat, qs: &QuantumSet) -> CMat {
    let d = qs.dim();
    let inv = 1.0 / qs.delta_sq();
    let mut out = CMat::zeros(d * d, d * d);
    for col in 0..d * d {
        let mut e = vec![C64::new(0.0, 0.0); d * d];
        e[col] = cr(1.0);
        let v = qs.apply_m_dag_at(&e, 2, 1);
        let v = apply_op_at(adj, &v, d, d);
        let v = qs.apply_m_at(&v, 3, 0);
        for (row, x) in v.into_iter().enumerate() {
            out[(row, col)] = x * inv;
        }
    }
    out
}
