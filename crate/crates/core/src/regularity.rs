//! One-, two- and three-point regularity, triangle operators and the
//! two-class association scheme of a strongly regular quantum graph.

use serde::Serialize;

use crate::error::{QglError, Result};
use crate::quantum_set::{apply_op_at, QuantumSet};
use crate::schur_algebra::{complement_adjacency, complete_adjacency, schur_product, QuantumGraph};
use crate::tensor_core::{cluster_eigenvalues, eigh, gram_solve, op_close, Tolerance};
use crate::{cr, CMat, C64};

/// Coefficient names of the three-point system, in column order.
pub const PARAM_NAMES: [&str; 7] = ["q3", "q2", "q1", "q0", "lambda", "mu", "k"];

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub k: C64,
    pub lambda: C64,
    pub mu: C64,
    pub q3: C64,
    pub q2: C64,
    pub q1: C64,
    pub q0: C64,
    /// `(k, λ, μ)` from the two-point fit alone.
    pub two_point: [C64; 3],
    pub residual_1pt: f64,
    pub residual_2pt: f64,
    pub residual_3pt: f64,
    pub regular_1pt: bool,
    pub regular_2pt: bool,
    pub regular_3pt: bool,
    /// Joint three-point `(k, λ, μ)` agree with the two-point fit.
    pub consistent: bool,
    pub system_rank: usize,
    pub free_params: Vec<String>,
    pub triangle_free: bool,
}

impl RegularityReport {
    /// `(k, λ, μ, q3, q2, q1, q0)`.
    pub fn row(&self) -> [C64; 7] {
        [self.k, self.lambda, self.mu, self.q3, self.q2, self.q1, self.q0]
    }
}

/// Column `γ` of `_R△_S^T = (id⊗m)∘(id⊗T⊗id)∘(m†⊗id)∘(R⊗S)∘m†`.
fn triangle_column(qs: &QuantumSet, r: &CMat, s: &CMat, t: &CMat, gamma: usize) -> Vec<C64> {
    let d = qs.dim();
    let mut e = vec![C64::new(0.0, 0.0); d];
    e[gamma] = cr(1.0);
    let v = qs.apply_m_dag_at(&e, 1, 0);
    let v = apply_op_at(r, &v, 1, d);
    let v = apply_op_at(s, &v, d, 1);
    let v = qs.apply_m_dag_at(&v, 2, 0);
    let v = apply_op_at(t, &v, d, d);
    qs.apply_m_at(&v, 3, 1)
}

/// Column `γ` of `▲ = (T̂⊗T̂)∘m†∘T̂`.
fn common_neighbors_column(qs: &QuantumSet, t: &CMat, gamma: usize) -> Vec<C64> {
    let d = qs.dim();
    let v = t.col(gamma);
    let v = qs.apply_m_dag_at(&v, 1, 0);
    let v = apply_op_at(t, &v, 1, d);
    apply_op_at(t, &v, d, 1)
}

fn assemble_columns(d: usize, col: impl Fn(usize) -> Vec<C64>) -> CMat {
    let mut out = CMat::zeros(d * d, d);
    for g in 0..d {
        out.set_col(g, &col(g));
    }
    out
}

/// The white triangle operator as a `dim² × dim` matrix.
pub fn white_triangle(r: &CMat, s: &CMat, t: &CMat, qs: &QuantumSet) -> Result<CMat> {
    let d = qs.dim();
    for m in [r, s, t] {
        if m.shape() != (d, d) {
            return Err(QglError::DimensionMismatch(format!(
                "triangle operand {}x{} on a set of dimension {d}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(assemble_columns(d, |g| triangle_column(qs, r, s, t, g)))
}

/// The common-neighbour operator `▲ = (T̂⊗T̂)∘m†∘T̂` as a `dim² × dim` matrix.
pub fn common_neighbors(g: &QuantumGraph) -> CMat {
    assemble_columns(g.dim(), |c| common_neighbors_column(&g.set, &g.adj, c))
}

fn require_input(g: &QuantumGraph) -> Result<()> {
    if !(g.flags.irreflexive && g.flags.real && g.flags.undirected) {
        return Err(QglError::Validation(
            "regularity needs an irreflexive, real, undirected graph".into(),
        ));
    }
    Ok(())
}

/// Per-column values of the seven configuration operators and `δ²·▲`.
fn system_columns(
    qs: &QuantumSet,
    t: &CMat,
    c: &CMat,
    id: &CMat,
    gamma: usize,
) -> ([Vec<C64>; 7], Vec<C64>) {
    let tri = |a: &CMat, b: &CMat, x: &CMat| triangle_column(qs, a, b, x, gamma);
    let sum3 = |u: Vec<C64>, v: Vec<C64>, w: Vec<C64>| -> Vec<C64> {
        u.iter().zip(&v).zip(&w).map(|((a, b), c)| a + b + c).collect()
    };
    let cols = [
        tri(t, t, t),
        sum3(tri(c, t, t), tri(t, c, t), tri(t, t, c)),
        sum3(tri(c, c, t), tri(c, t, c), tri(t, c, c)),
        tri(c, c, c),
        sum3(tri(t, t, id), tri(t, id, t), tri(id, t, t)),
        sum3(tri(c, c, id), tri(c, id, c), tri(id, c, c)),
        tri(id, id, id),
    ];
    let d2 = qs.delta_sq();
    let rhs = common_neighbors_column(qs, t, gamma)
        .into_iter()
        .map(|x| x * d2)
        .collect();
    (cols, rhs)
}

pub fn regularity_report(g: &QuantumGraph, tol: &Tolerance) -> Result<RegularityReport> {
    require_input(g)?;
    let qs = &g.set;
    let d = qs.dim();
    let t = &g.adj;
    let id = CMat::identity(d);
    let c = complement_adjacency(t, qs);
    let u = qs.unit();

    // one point: T̂ι = kι
    let tu = t.matvec(u)?;
    let k: C64 = u.iter().zip(&tu).map(|(a, b)| a.conj() * b).sum();
    let res1 = tu
        .iter()
        .zip(u)
        .map(|(x, y)| (x - k * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let regular_1pt = res1 <= tol.abs_eps * d as f64 * k.norm().max(1.0);

    // two point: T̂² = λT̂ + μT̂^c + k·id
    let t2 = t * t;
    let basis = [t.clone(), c.clone(), id.clone()];
    let (coef2, res2) = fit_span(&basis, &t2, tol)?;
    let regular_2pt = op_close(
        &(&(&basis[0].scale(coef2[0]) + &basis[1].scale(coef2[1])) + &basis[2].scale(coef2[2])),
        &t2,
        tol,
    )
    .1;

    // three point, streamed over input basis vectors
    let mut gram = CMat::zeros(7, 7);
    let mut h = vec![C64::new(0.0, 0.0); 7];
    let mut bnorm = 0.0;
    let mut tri_norm = 0.0;
    for gamma in 0..d {
        let (cols, rhs) = system_columns(qs, t, &c, &id, gamma);
        tri_norm += cols[0].iter().map(|x| x.norm_sqr()).sum::<f64>();
        bnorm += rhs.iter().map(|x| x.norm_sqr()).sum::<f64>();
        for i in 0..7 {
            for j in i..7 {
                let v: C64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                gram[(i, j)] += v;
                if i != j {
                    gram[(j, i)] += v.conj();
                }
            }
            h[i] += cols[i].iter().zip(&rhs).map(|(a, b)| a.conj() * b).sum::<C64>();
        }
    }
    let (x, null) = gram_solve(&gram, &h, 1e-10, tol)?;
    let mut res3 = 0.0;
    for gamma in 0..d {
        let (cols, rhs) = system_columns(qs, t, &c, &id, gamma);
        for (row, b) in rhs.iter().enumerate() {
            let ax: C64 = (0..7).map(|i| cols[i][row] * x[i]).sum();
            res3 += (ax - b).norm_sqr();
        }
    }
    let res3 = res3.sqrt();
    let bnorm = bnorm.sqrt();
    let regular_3pt = res3 <= tol.op_threshold(d, bnorm, bnorm);

    let mut free = Vec::new();
    for v in &null {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, z) in v.iter().enumerate() {
            if z.norm() > 0.3 * n && !free.contains(&PARAM_NAMES[i].to_string()) {
                free.push(PARAM_NAMES[i].to_string());
            }
        }
    }

    let scale = k.norm().max(1.0);
    let consistent = [(x[6], k), (x[4], coef2[0]), (x[5], coef2[1])]
        .iter()
        .all(|(a, b)| (a - b).norm() <= 1e3 * tol.abs_eps * scale);

    Ok(RegularityReport {
        k: x[6],
        lambda: x[4],
        mu: x[5],
        q3: x[0],
        q2: x[1],
        q1: x[2],
        q0: x[3],
        two_point: [k, coef2[0], coef2[1]],
        residual_1pt: res1,
        residual_2pt: res2,
        residual_3pt: res3,
        regular_1pt,
        regular_2pt,
        regular_3pt,
        consistent,
        system_rank: 7 - null.len(),
        free_params: free,
        triangle_free: tri_norm.sqrt() <= tol.abs_eps * (d * d) as f64,
    })
}

/// Least-squares coefficients of `target` in the span of `basis`.
fn fit_span(basis: &[CMat], target: &CMat, tol: &Tolerance) -> Result<(Vec<C64>, f64)> {
    let n = basis.len();
    let gram = CMat::from_fn(n, n, |i, j| basis[i].inner(&basis[j]));
    let h: Vec<C64> = basis.iter().map(|b| b.inner(target)).collect();
    let (x, _) = gram_solve(&gram, &h, 1e-12, tol)?;
    let mut fit = CMat::zeros(target.rows(), target.cols());
    for (b, &xi) in basis.iter().zip(&x) {
        fit = &fit + &b.scale(xi);
    }
    Ok((x, fit.dist(target)))
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociationScheme {
    /// `(id, T̂, T̂^c)`.
    #[serde(skip)]
    pub adjacencies: [CMat; 3],
    /// `(E₀ = ι∘ι†, E₁, E₂)`, spectral projections of `T̂` for `(k, s, r)`.
    #[serde(skip)]
    pub idempotents: [CMat; 3],
    /// `(k, s, r)`.
    pub eigenvalues: [f64; 3],
    pub eigenmatrix_p: [[f64; 3]; 3],
    pub formally_self_dual: bool,
    /// The scheme was built from the complement because `T̂` itself has only
    /// two distinct eigenvalues.
    pub via_complement: bool,
    pub axiom_residual: f64,
}

fn eigenmatrix(k: f64, s: f64, r: f64, d2: f64) -> [[f64; 3]; 3] {
    [
        [1.0, k, d2 - k - 1.0],
        [1.0, s, -1.0 - s],
        [1.0, r, -1.0 - r],
    ]
}

fn self_dual_residual(p: &[[f64; 3]; 3], d2: f64) -> f64 {
    let mut res: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = (0..3).map(|l| p[i][l] * p[l][j]).sum();
            let want = if i == j { d2 } else { 0.0 };
            res = res.max((v - want).abs());
        }
    }
    res
}

pub fn association_scheme(g: &QuantumGraph, tol: &Tolerance) -> Result<AssociationScheme> {
    let g = g.irreflexive_part(tol)?;
    let qs = &g.set;
    match scheme_from(&g.adj, qs, tol) {
        Ok(s) => Ok(s),
        Err(QglError::Validation(msg)) => {
            // a disconnected or complete-multipartite T̂ has two eigenvalues;
            // its complement carries the same scheme
            let c = complement_adjacency(&g.adj, qs);
            let mut s = scheme_from(&c, qs, tol).map_err(|_| QglError::Validation(msg))?;
            s.via_complement = true;
            Ok(s)
        }
        Err(e) => Err(e),
    }
}

fn scheme_from(t: &CMat, qs: &QuantumSet, tol: &Tolerance) -> Result<AssociationScheme> {
    let d = qs.dim();
    let d2 = qs.delta_sq();
    let e = eigh(t, tol)?;
    let clusters = cluster_eigenvalues(&e.values, tol);
    if clusters.len() != 3 {
        return Err(QglError::Validation(format!(
            "association scheme needs 3 distinct eigenvalues, found {}",
            clusters.len()
        )));
    }
    let u = qs.unit();
    let tu = t.matvec(u)?;
    let k: f64 = u.iter().zip(&tu).map(|(a, b)| a.conj() * b).sum::<C64>().re;
    let kpos = clusters
        .iter()
        .position(|(v, _)| (v - k).abs() < tol.eig_cluster_eps * k.abs().max(1.0))
        .ok_or_else(|| QglError::Validation("degree is not an eigenvalue".into()))?;
    if clusters[kpos].1.len() != 1 {
        return Err(QglError::Validation("degree eigenvalue is not simple".into()));
    }
    let mut rest: Vec<usize> = (0..3).filter(|&i| i != kpos).collect();
    // descending order by default
    rest.sort_by(|&a, &b| clusters[b].0.partial_cmp(&clusters[a].0).unwrap());
    let proj = |idx: &[usize]| -> CMat {
        let mut p = CMat::zeros(d, d);
        for &j in idx {
            let v = e.vectors.col(j);
            for a in 0..d {
                for b in 0..d {
                    p[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        p
    };
    let (s_desc, r_desc) = (clusters[rest[0]].0, clusters[rest[1]].0);
    let p_desc = eigenmatrix(k, s_desc, r_desc, d2);
    let p_swap = eigenmatrix(k, r_desc, s_desc, d2);
    let thr = tol.abs_eps * d2.max(1.0) * 10.0;
    let (rd, rs) = (self_dual_residual(&p_desc, d2), self_dual_residual(&p_swap, d2));
    let swap = rd > thr && rs <= thr;
    let (si, ri) = if swap { (rest[1], rest[0]) } else { (rest[0], rest[1]) };
    let (s, r) = (clusters[si].0, clusters[ri].0);
    let p = eigenmatrix(k, s, r, d2);
    let formally_self_dual = rd.min(rs) <= thr;

    let id = CMat::identity(d);
    let c = complement_adjacency(t, qs);
    let adjacencies = [id.clone(), t.clone(), c];
    let idempotents = [proj(&clusters[kpos].1), proj(&clusters[si].1), proj(&clusters[ri].1)];

    // axioms: A_i★A_j = δ_ij·A_i, ΣA_i = Ĵ, E_j orthogonal projections summing to id
    let mut axiom: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let prod = schur_product(&adjacencies[i], &adjacencies[j], qs)?;
            let want = if i == j { adjacencies[i].clone() } else { CMat::zeros(d, d) };
            axiom = axiom.max(prod.dist(&want));
            let ep = &idempotents[i] * &idempotents[j];
            let want = if i == j { idempotents[i].clone() } else { CMat::zeros(d, d) };
            axiom = axiom.max(ep.dist(&want));
        }
    }
    let sum_a = &(&adjacencies[0] + &adjacencies[1]) + &adjacencies[2];
    axiom = axiom.max(sum_a.dist(&complete_adjacency(qs)));
    let sum_e = &(&idempotents[0] + &idempotents[1]) + &idempotents[2];
    axiom = axiom.max(sum_e.dist(&id));
    let uu = CMat::from_fn(d, d, |a, b| u[a] * u[b].conj());
    axiom = axiom.max(idempotents[0].dist(&uu));

    Ok(AssociationScheme {
        adjacencies,
        idempotents,
        eigenvalues: [k, s, r],
        eigenmatrix_p: p,
        formally_self_dual,
        via_complement: false,
        axiom_residual: axiom,
    })
}
