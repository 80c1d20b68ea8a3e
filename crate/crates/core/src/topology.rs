//! Laplacian, degree and incidence operators and the topology they encode.

use serde::Serialize;

use crate::error::{QglError, Result};
use crate::schur_algebra::QuantumGraph;
use crate::tensor_core::{eigh, rank_from_values, Tolerance};
use crate::{CMat, C64};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TopologyReport {
    pub laplacian_spectrum: Vec<f64>,
    pub laplacian_trace: f64,
    pub components: usize,
    pub laplacian_rank: usize,
    pub edge_count: f64,
    pub has_cycle: bool,
    pub is_forest: bool,
    pub is_tree: bool,
    /// Set when a reflexive input was replaced by `T̂ − id`.
    pub converted_from_reflexive: bool,
}

fn require_laplacian_input(g: &QuantumGraph) -> Result<()> {
    if !g.flags.irreflexive {
        return Err(QglError::Validation("Laplacian needs an irreflexive graph".into()));
    }
    if !g.flags.undirected {
        return Err(QglError::Validation("Laplacian needs an undirected graph".into()));
    }
    if !g.flags.real {
        return Err(QglError::Validation("Laplacian needs a real graph".into()));
    }
    Ok(())
}

/// `Deg = (ι†⊗id)∘(T̂⊗id)∘m†`.
pub fn degree_matrix(g: &QuantumGraph) -> Result<CMat> {
    require_laplacian_input(g)?;
    Ok(degree_of(&g.adj, &g.set))
}

fn degree_of(adj: &CMat, qs: &crate::QuantumSet) -> CMat {
    let d = qs.dim();
    let u = qs.unit();
    // row vector ι†T̂
    let iota_t: Vec<C64> = (0..d)
        .map(|a| (0..d).map(|r| u[r].conj() * adj[(r, a)]).sum())
        .collect();
    let mut deg = CMat::zeros(d, d);
    for z in 0..d {
        for t in qs.terms_out(z) {
            deg[(t.b, z)] += t.coef.conj() * iota_t[t.a];
        }
    }
    deg
}

/// `L = Deg − T̂`.
pub fn laplacian(g: &QuantumGraph) -> Result<CMat> {
    require_laplacian_input(g)?;
    Ok(&degree_of(&g.adj, &g.set) - &g.adj)
}

/// `D = (T̂⊗id − id⊗T̂)∘m†`, a map `ℓ²(X) → ℓ²(X)⊗ℓ²(X)`.
pub fn incidence(g: &QuantumGraph) -> Result<CMat> {
    require_laplacian_input(g)?;
    let qs = &g.set;
    let d = qs.dim();
    let t = &g.adj;
    let mut out = CMat::zeros(d * d, d);
    for z in 0..d {
        for term in qs.terms_out(z) {
            let w = term.coef.conj();
            for r in 0..d {
                out[(r * d + term.b, z)] += w * t[(r, term.a)];
                out[(term.a * d + r, z)] -= w * t[(r, term.b)];
            }
        }
    }
    Ok(out)
}

/// The constant `C` in `D†D = C·L` and the residual of that fit.
pub fn incidence_constant(g: &QuantumGraph) -> Result<(f64, f64)> {
    let dm = incidence(g)?;
    let l = laplacian(g)?;
    let dd = &dm.adjoint() * &dm;
    let ll = l.inner(&l).re;
    if ll == 0.0 {
        return Ok((0.0, dd.norm_fro()));
    }
    let cst = l.inner(&dd).re / ll;
    let res = dd.dist(&l.scale(crate::cr(cst)));
    Ok((cst, res))
}

pub fn topology_report(g: &QuantumGraph, tol: &Tolerance) -> Result<TopologyReport> {
    if !g.flags.undirected {
        return Err(QglError::Validation("topology needs an undirected graph".into()));
    }
    let converted = !g.flags.irreflexive;
    let g = g.irreflexive_part(tol)?;
    let l = laplacian(&g)?;
    let e = eigh(&l, tol)?;
    let (rank, nullity) = rank_from_values(&e.values, tol);
    let tr = l.trace().re;
    let slack = tol.abs_eps * g.dim() as f64 * tr.abs().max(1.0);
    let excess = tr - 2.0 * rank as f64;
    let is_forest = excess.abs() <= slack;
    Ok(TopologyReport {
        laplacian_spectrum: e.values,
        laplacian_trace: tr,
        components: nullity,
        laplacian_rank: rank,
        edge_count: tr / 2.0,
        has_cycle: excess > slack,
        is_forest,
        is_tree: is_forest && nullity == 1,
        converted_from_reflexive: converted,
    })
}
