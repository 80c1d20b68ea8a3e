//! δ-forms: finite-dimensional C*-algebras with a tracial state whose GNS
//! multiplication satisfies `m∘m† = δ²·id`.
//!
//! A set is stored by its structure constants in an orthonormal basis, so
//! that block algebras and deformed (bubbled) algebras share one type. For
//! block algebras the basis is `u_{i;ab} = w_i^{-1/2}·e_ab`, block-major and
//! row-major inside each block.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{QglError, Result};
use crate::tensor_core::{op_close, Tolerance};
use crate::{cr, CMat, C64};

/// One structure constant: `m(u_a ⊗ u_b)` has coefficient `coef` on `u_out`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub out: usize,
    pub a: usize,
    pub b: usize,
    pub coef: C64,
}

#[derive(Clone, Debug)]
pub struct QuantumSet {
    blocks: Vec<usize>,
    weights: Vec<f64>,
    dim: usize,
    delta_sq: f64,
    terms: Vec<Term>,
    by_out: Vec<Vec<usize>>,
    by_ab: Vec<Vec<usize>>,
    unit: Vec<C64>,
}

/// JSON descriptor `{"blocks":[..], "weights":[..]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SetDescriptor {
    pub blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct StructureMaps {
    pub m: CMat,
    pub m_dag: CMat,
    pub unit: CMat,
    pub counit: CMat,
    pub ev: CMat,
    pub coev: CMat,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusReport {
    pub delta_sq: f64,
    pub checks: Vec<AxiomCheck>,
}

impl FrobeniusReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn make_classical_set(n: usize) -> Result<QuantumSet> {
    if n == 0 {
        return Err(QglError::Validation("classical set needs n >= 1".into()));
    }
    QuantumSet::from_blocks(&vec![1; n], None)
}

pub fn make_matrix_set(n: usize) -> Result<QuantumSet> {
    if n == 0 {
        return Err(QglError::Validation("matrix set needs n >= 1".into()));
    }
    QuantumSet::from_blocks(&[n], None)
}

pub fn make_plancherel_set(blocks: &[usize]) -> Result<QuantumSet> {
    QuantumSet::from_blocks(blocks, None)
}

impl QuantumSet {
    /// Block algebra `⊕ M_{n_i}` with state `Σ w_i·Tr_i`. Weights default to
    /// the Plancherel weights `n_i / Σ n_j²`; other weights are accepted but
    /// only Plancherel weights give a δ-form.
    pub fn from_blocks(blocks: &[usize], weights: Option<&[f64]>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(QglError::Validation(format!("invalid block sizes {blocks:?}")));
        }
        let total: usize = blocks.iter().map(|n| n * n).sum();
        let weights: Vec<f64> = match weights {
            Some(w) => {
                if w.len() != blocks.len() || w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(QglError::Validation(format!(
                        "weights {w:?} do not match blocks {blocks:?}"
                    )));
                }
                let state: f64 = w.iter().zip(blocks).map(|(w, &n)| w * n as f64).sum();
                if (state - 1.0).abs() > 1e-12 {
                    return Err(QglError::Validation(format!(
                        "weights define a functional with ψ(1) = {state}, not a state"
                    )));
                }
                w.to_vec()
            }
            None => blocks.iter().map(|&n| n as f64 / total as f64).collect(),
        };
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut off = 0;
        for &n in blocks {
            offsets.push(off);
            off += n * n;
        }
        let mut terms = Vec::new();
        let mut unit = vec![C64::new(0.0, 0.0); total];
        for (bi, &n) in blocks.iter().enumerate() {
            let o = offsets[bi];
            let s = 1.0 / weights[bi].sqrt();
            for a in 0..n {
                unit[o + a * n + a] = cr(weights[bi].sqrt());
                for b in 0..n {
                    for d in 0..n {
                        terms.push(Term {
                            out: o + a * n + d,
                            a: o + a * n + b,
                            b: o + b * n + d,
                            coef: cr(s),
                        });
                    }
                }
            }
        }
        let plancherel = is_plancherel(&weights, blocks, total);
        let mut qs = Self::assemble(total, terms, unit)?;
        if plancherel {
            qs.delta_sq = total as f64;
        }
        qs.blocks = blocks.to_vec();
        qs.weights = weights;
        Ok(qs)
    }

    /// Abstract set from structure constants in an orthonormal basis.
    /// δ² is read off as `Tr(m∘m†)/dim`; whether `m∘m†` is actually scalar is
    /// left to [`QuantumSet::verify_frobenius`].
    pub fn from_structure(dim: usize, terms: Vec<Term>, unit: Vec<C64>) -> Result<Self> {
        Self::assemble(dim, terms, unit)
    }

    /// Abstract set from a dense `dim × dim²` multiplication matrix.
    pub fn from_dense(m: &CMat, unit: Vec<C64>, drop_below: f64) -> Result<Self> {
        let dim = m.rows();
        if m.cols() != dim * dim || unit.len() != dim {
            return Err(QglError::DimensionMismatch(format!(
                "multiplication {}x{} with unit of length {}",
                m.rows(),
                m.cols(),
                unit.len()
            )));
        }
        let mut terms = Vec::new();
        for out in 0..dim {
            for ab in 0..dim * dim {
                let coef = m[(out, ab)];
                if coef.norm() > drop_below {
                    terms.push(Term {
                        out,
                        a: ab / dim,
                        b: ab % dim,
                        coef,
                    });
                }
            }
        }
        Self::assemble(dim, terms, unit)
    }

    fn assemble(dim: usize, terms: Vec<Term>, unit: Vec<C64>) -> Result<Self> {
        if dim == 0 || unit.len() != dim {
            return Err(QglError::DimensionMismatch(format!(
                "unit of length {} for dimension {dim}",
                unit.len()
            )));
        }
        let mut by_out = vec![Vec::new(); dim];
        let mut by_ab = vec![Vec::new(); dim * dim];
        for (i, t) in terms.iter().enumerate() {
            if t.out >= dim || t.a >= dim || t.b >= dim || !t.coef.is_finite() {
                return Err(QglError::Validation(format!("bad structure constant {t:?}")));
            }
            by_out[t.out].push(i);
            by_ab[t.a * dim + t.b].push(i);
        }
        let delta_sq = terms.iter().map(|t| t.coef.norm_sqr()).sum::<f64>() / dim as f64;
        Ok(QuantumSet {
            blocks: Vec::new(),
            weights: Vec::new(),
            dim,
            delta_sq,
            terms,
            by_out,
            by_ab,
            unit,
        })
    }

    pub fn from_descriptor(d: &SetDescriptor) -> Result<Self> {
        Self::from_blocks(&d.blocks, d.weights.as_deref())
    }

    /// Descriptor for block algebras; `None` for abstract sets.
    pub fn descriptor(&self) -> Option<SetDescriptor> {
        if self.blocks.is_empty() {
            return None;
        }
        let plancherel: Vec<f64> = self
            .blocks
            .iter()
            .map(|&n| n as f64 / self.dim as f64)
            .collect();
        let default = plancherel
            .iter()
            .zip(&self.weights)
            .all(|(a, b)| (a - b).abs() < 1e-15);
        Some(SetDescriptor {
            blocks: self.blocks.clone(),
            weights: if default { None } else { Some(self.weights.clone()) },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta_sq(&self) -> f64 {
        self.delta_sq
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unit(&self) -> &[C64] {
        &self.unit
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// True when every block has size one.
    pub fn is_classical(&self) -> bool {
        !self.blocks.is_empty() && self.blocks.iter().all(|&n| n == 1)
    }

    /// Terms with `out = γ`.
    pub fn terms_out(&self, gamma: usize) -> impl Iterator<Item = &Term> {
        self.by_out[gamma].iter().map(move |&i| &self.terms[i])
    }

    /// Terms with inputs `(a, b)`.
    pub fn terms_in(&self, a: usize, b: usize) -> impl Iterator<Item = &Term> {
        self.by_ab[a * self.dim + b].iter().map(move |&i| &self.terms[i])
    }

    pub fn m_matrix(&self) -> CMat {
        let d = self.dim;
        let mut m = CMat::zeros(d, d * d);
        for t in &self.terms {
            m[(t.out, t.a * d + t.b)] += t.coef;
        }
        m
    }

    pub fn structure_maps(&self) -> StructureMaps {
        let m = self.m_matrix();
        let m_dag = m.adjoint();
        let unit = CMat::column(&self.unit);
        let counit = unit.adjoint();
        let ev = counit.matmul(&m).expect("shapes fixed by construction");
        let coev = m_dag.matmul(&unit).expect("shapes fixed by construction");
        StructureMaps {
            m,
            m_dag,
            unit,
            counit,
            ev,
            coev,
        }
    }

    /// `ev` as a `dim × dim` matrix: `E[a,b] = ι†m(u_a⊗u_b)`.
    pub fn ev_matrix(&self) -> CMat {
        let d = self.dim;
        let mut e = CMat::zeros(d, d);
        for t in &self.terms {
            e[(t.a, t.b)] += self.unit[t.out].conj() * t.coef;
        }
        e
    }

    /// `coev` as a `dim × dim` matrix: `m†ι = Σ K[a,b]·u_a⊗u_b`.
    pub fn coev_matrix(&self) -> CMat {
        let d = self.dim;
        let mut k = CMat::zeros(d, d);
        for t in &self.terms {
            k[(t.a, t.b)] += t.coef.conj() * self.unit[t.out];
        }
        k
    }

    /// Apply `m` to the factor pair `(pos, pos+1)` of a vector in `X^{⊗n}`.
    pub fn apply_m_at(&self, v: &[C64], n: usize, pos: usize) -> Vec<C64> {
        let d = self.dim;
        assert!(pos + 1 < n && v.len() == d.pow(n as u32), "apply_m_at out of range");
        let right = d.pow((n - pos - 2) as u32);
        let left = d.pow(pos as u32);
        let mut out = vec![C64::new(0.0, 0.0); left * d * right];
        for l in 0..left {
            for t in &self.terms {
                let src = ((l * d + t.a) * d + t.b) * right;
                let dst = (l * d + t.out) * right;
                for r in 0..right {
                    let x = v[src + r];
                    if x != C64::new(0.0, 0.0) {
                        out[dst + r] += t.coef * x;
                    }
                }
            }
        }
        out
    }

    /// Apply `m†` to factor `pos` of a vector in `X^{⊗n}`, giving `X^{⊗(n+1)}`.
    pub fn apply_m_dag_at(&self, v: &[C64], n: usize, pos: usize) -> Vec<C64> {
        let d = self.dim;
        assert!(pos < n && v.len() == d.pow(n as u32), "apply_m_dag_at out of range");
        let right = d.pow((n - pos - 1) as u32);
        let left = d.pow(pos as u32);
        let mut out = vec![C64::new(0.0, 0.0); left * d * d * right];
        for l in 0..left {
            for t in &self.terms {
                let src = (l * d + t.out) * right;
                let dst = ((l * d + t.a) * d + t.b) * right;
                let cc = t.coef.conj();
                for r in 0..right {
                    let x = v[src + r];
                    if x != C64::new(0.0, 0.0) {
                        out[dst + r] += cc * x;
                    }
                }
            }
        }
        out
    }

    pub fn verify_frobenius(&self, tol: &Tolerance) -> FrobeniusReport {
        let d = self.dim;
        let d2 = self.delta_sq;
        let mut checks = Vec::new();
        let mut push = |name: &str, residual: f64, scale: f64| {
            let thr = tol.op_threshold(d, scale, scale);
            checks.push(AxiomCheck {
                name: name.to_string(),
                residual,
                pass: residual <= thr,
            });
        };

        // m∘m† = δ²·id, one basis vector at a time
        let mut res = 0.0;
        for g in 0..d {
            let mut acc = Sparse::default();
            for t in self.terms_out(g) {
                for s in self.terms_in(t.a, t.b) {
                    acc.add(s.out, t.coef.conj() * s.coef);
                }
            }
            acc.add(g, cr(-d2));
            res += acc.norm_sqr();
        }
        push("delta_form", res.sqrt(), d2 * (d as f64).sqrt());

        // Frobenius identity in both orientations
        let (mut left, mut right, mut scale) = (0.0, 0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                let mut mid = Sparse::default();
                for s in self.terms_in(a, b) {
                    for t in self.terms_out(s.out) {
                        mid.add(t.a * d + t.b, s.coef * t.coef.conj());
                    }
                }
                let mut l = mid.negated();
                for t in self.terms_out(a) {
                    for s in self.terms_in(t.b, b) {
                        l.add(t.a * d + s.out, t.coef.conj() * s.coef);
                    }
                }
                let mut r = mid.negated();
                for t in self.terms_out(b) {
                    for s in self.terms_in(a, t.a) {
                        r.add(s.out * d + t.b, t.coef.conj() * s.coef);
                    }
                }
                scale += mid.norm_sqr();
                left += l.norm_sqr();
                right += r.norm_sqr();
            }
        }
        let scale = scale.sqrt();
        push("frobenius_left", left.sqrt(), scale);
        push("frobenius_right", right.sqrt(), scale);

        let mut assoc = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut acc = Sparse::default();
                    for s in self.terms_in(a, b) {
                        for t in self.terms_in(s.out, c) {
                            acc.add(t.out, s.coef * t.coef);
                        }
                    }
                    for s in self.terms_in(b, c) {
                        for t in self.terms_in(a, s.out) {
                            acc.add(t.out, -s.coef * t.coef);
                        }
                    }
                    assoc += acc.norm_sqr();
                }
            }
        }
        push("associativity", assoc.sqrt(), scale);

        // unit law m(ι⊗x) = x = m(x⊗ι)
        let mut unit_res = 0.0;
        for x in 0..d {
            let mut lu = vec![C64::new(0.0, 0.0); d * d];
            let mut ru = vec![C64::new(0.0, 0.0); d * d];
            for i in 0..d {
                lu[i * d + x] = self.unit[i];
                ru[x * d + i] = self.unit[i];
            }
            for v in [self.apply_m_at(&lu, 2, 0), self.apply_m_at(&ru, 2, 0)] {
                for (i, y) in v.iter().enumerate() {
                    let want = if i == x { 1.0 } else { 0.0 };
                    unit_res += (y - cr(want)).norm_sqr();
                }
            }
        }
        push("unit", unit_res.sqrt(), (d as f64).sqrt());

        let e = self.ev_matrix();
        let k = self.coev_matrix();
        let id = CMat::identity(d);
        let (z1, _) = op_close(&e.matmul(&k).expect("square").transpose(), &id, tol);
        let (z2, _) = op_close(&k.matmul(&e).expect("square"), &id, tol);
        push("zigzag", z1.max(z2), (d as f64).sqrt());

        let evcoev: C64 = e.data().iter().zip(k.data()).map(|(a, b)| a * b).sum();
        push("ev_coev", (evcoev - cr(d2)).norm(), d2);

        let iota_norm: f64 = self.unit.iter().map(|x| x.norm_sqr()).sum();
        push("unit_norm", (iota_norm - 1.0).abs(), 1.0);

        FrobeniusReport {
            delta_sq: d2,
            checks,
        }
    }

    /// Same set with one structure constant perturbed (negative controls).
    pub fn perturbed(&self, index: usize, delta: C64) -> Self {
        let mut terms = self.terms.clone();
        if let Some(t) = terms.get_mut(index) {
            t.coef += delta;
        }
        let mut qs = Self::assemble(self.dim, terms, self.unit.clone()).expect("same shape");
        qs.blocks = self.blocks.clone();
        qs.weights = self.weights.clone();
        qs.delta_sq = self.delta_sq;
        qs
    }
}

fn is_plancherel(weights: &[f64], blocks: &[usize], total: usize) -> bool {
    weights
        .iter()
        .zip(blocks)
        .all(|(&w, &n)| w == n as f64 / total as f64)
}

#[derive(Default)]
struct Sparse(HashMap<usize, C64>);

impl Sparse {
    fn add(&mut self, k: usize, v: C64) {
        *self.0.entry(k).or_insert(C64::new(0.0, 0.0)) += v;
    }

    fn negated(&self) -> Sparse {
        Sparse(self.0.iter().map(|(&k, &v)| (k, -v)).collect())
    }

    fn norm_sqr(&self) -> f64 {
        self.0.values().map(|v| v.norm_sqr()).sum()
    }
}

#[cfg(test)]
fn dist2(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Apply a `d_out × d_in` operator to factor `pos` of a vector whose
/// factors all have dimension `d_in` (before) and `d_out` (after) at `pos`.
pub fn apply_op_at(op: &CMat, v: &[C64], left: usize, right: usize) -> Vec<C64> {
    let (dout, din) = op.shape();
    assert_eq!(v.len(), left * din * right, "apply_op_at shape");
    let mut out = vec![C64::new(0.0, 0.0); left * dout * right];
    for l in 0..left {
        for o in 0..dout {
            let dst = (l * dout + o) * right;
            for i in 0..din {
                let w = op[(o, i)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = (l * din + i) * right;
                for r in 0..right {
                    out[dst + r] += w * v[src + r];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn classical_sets() {
        let q = make_classical_set(9).unwrap();
        assert_eq!(q.delta_sq(), 9.0);
        let one = make_classical_set(1).unwrap();
        assert_eq!(one.m_matrix(), CMat::identity(1));
        let q4 = make_classical_set(4).unwrap();
        let m = q4.m_matrix();
        let mm = &m * &m.adjoint();
        assert!(mm.dist(&CMat::identity(4).scale(cr(4.0))) < 1e-12);
        // m†(u_a) = √n·u_a⊗u_a
        let s = q4.structure_maps();
        for a in 0..4 {
            assert!((s.m_dag[(a * 4 + a, a)] - cr(2.0)).norm() < 1e-14);
        }
        assert!(make_classical_set(0).is_err());
    }

    #[test]
    fn matrix_sets() {
        let q = make_matrix_set(3).unwrap();
        assert_eq!((q.dim(), q.delta_sq()), (9, 9.0));
        let r = q.verify_frobenius(&tol());
        assert!(r.all_pass(), "{r:?}");
        let q2 = make_matrix_set(2).unwrap();
        let m = q2.m_matrix();
        assert!((&m * &m.adjoint()).dist(&CMat::identity(4).scale(cr(4.0))) < 1e-12);
        assert_eq!(make_matrix_set(1).unwrap().blocks(), &[1]);
    }

    #[test]
    fn plancherel_weights_are_the_delta_form_ones() {
        let q = make_plancherel_set(&[1, 1, 2]).unwrap();
        assert_eq!(q.delta_sq(), 6.0);
        assert!(q.verify_frobenius(&tol()).all_pass());
        // uniform state weights w_i with Σ w_i n_i = 1
        let uni = QuantumSet::from_blocks(&[1, 1, 2], Some(&[0.25, 0.25, 0.25])).unwrap();
        let r = uni.verify_frobenius(&tol());
        assert!(!r.get("delta_form").unwrap().pass);
        assert!(make_plancherel_set(&[]).is_err());
    }

    #[test]
    fn corrupted_m_fails_delta_form() {
        let q = make_classical_set(4).unwrap();
        let bad = q.perturbed(0, cr(1e-3));
        let r = bad.verify_frobenius(&tol());
        let dc = r.get("delta_form").unwrap();
        assert!(!dc.pass);
        assert!(dc.residual > 1e-4 && dc.residual < 1e-2);
    }

    #[test]
    fn ev_coev_equals_delta_sq() {
        let q = make_matrix_set(3).unwrap();
        let r = q.verify_frobenius(&tol());
        assert!(r.get("ev_coev").unwrap().residual < 1e-12);
        let s = q.structure_maps();
        let x = s.ev.matmul(&s.coev).unwrap();
        assert!((x[(0, 0)] - cr(9.0)).norm() < 1e-12);
    }

    #[test]
    fn tensor_helpers_match_kron() {
        let q = make_plancherel_set(&[1, 2]).unwrap();
        let d = q.dim();
        let s = q.structure_maps();
        let v: Vec<C64> = (0..d * d * d).map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let id = CMat::identity(d);
        let dense = id.kron(&s.m).matvec(&v).unwrap();
        let fast = q.apply_m_at(&v, 3, 1);
        assert!(dist2(&dense, &fast).sqrt() < 1e-12);
        let w: Vec<C64> = v[..d * d].to_vec();
        let dense = s.m_dag.kron(&id).matvec(&w).unwrap();
        let fast = q.apply_m_dag_at(&w, 2, 0);
        assert!(dist2(&dense, &fast).sqrt() < 1e-12);
    }
}
