//! Bubbling: deforming a graph along a subgroup of central type acting by
//! automorphisms.
//!
//! A nice unitary error basis `{U_ℓ}` on `H` and an action `ℓ ▷ −` of `L`
//! give the projection `π = |L|⁻¹ Σ_ℓ Ū_ℓ ⊗ A_ℓ ⊗ U_ℓ` on `H̄⊗ℓ²(X)⊗H`.
//! Its splitting `ι ι† = π` carries the algebra structure of `X` (inflated
//! to `H̄⊗X⊗H` by matrix multiplication on the outer legs) to a new δ-form
//! `X_q`, and every operator commuting with the action is bubbled to
//! `S_q = ι†(id⊗S⊗id)ι`. The same operator is also assembled through the
//! bijection `P : H⊗ℓ²(X_q) → ℓ²(X)⊗H` and the two routes are compared.
//!
//! Index conventions: `H̄⊗ℓ²(X)⊗H` is flattened as `(i·N + x)·h + j`;
//! `P` has rows `(x, j)` and columns `(k, a)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructors::{clebsch16_data, paley9_data, shrikhande_data, AbelianGroup, ConnectionSet};
use crate::error::{QglError, Result};
use crate::quantum_set::{apply_op_at, make_classical_set, AxiomCheck, FrobeniusReport, QuantumSet};
use crate::regularity::{common_neighbors, regularity_report, RegularityReport};
use crate::schur_algebra::{analyze_flags, complete_adjacency, edge_projector_of, schur_product, QuantumGraph};
use crate::tensor_core::{cluster_eigenvalues, eigh, op_close, rank_from_values, Tolerance};
use crate::topology::{laplacian, topology_report, TopologyReport};
use crate::{c, cr, CMat, C64};

/// Groups larger than this are rejected by the permutation closure.
pub const MAX_GROUP_ORDER: usize = 20_000;

/// A finite group given by its multiplication table, `table[a][b] = a·b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(QglError::Validation("group table must be a square table of element indices".into()));
        }
        for row in &table {
            let mut seen = vec![false; n];
            for &x in row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(QglError::Validation("group table row is not a permutation".into()));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| QglError::Validation("group table has no identity".into()))?;
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| QglError::Validation(format!("element {a} has no inverse")))?;
        }
        let g = FiniteGroup { table, inverse, identity };
        g.check_associative()?;
        Ok(g)
    }

    /// Exhaustive for order ≤ 256, otherwise 200 000 seeded random triples.
    fn check_associative(&self) -> Result<()> {
        let n = self.order();
        let bad = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c));
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if bad(a, b, c) {
                            return Err(QglError::Validation(format!("table not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if bad(a, b, c) {
                    return Err(QglError::Validation(format!("table not associative at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }

    /// Closure of permutation generators (0-based images). Element 0 is the
    /// identity; products compose right to left, `(p·q)(x) = p(q(x))`.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let degree = gens.first().map_or(0, Vec::len);
        for g in gens {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if g.len() != degree || sorted.iter().enumerate().any(|(i, &x)| i != x) {
                return Err(QglError::Validation("generators must be permutations of one degree".into()));
            }
        }
        let compose = |p: &[usize], q: &[usize]| q.iter().map(|&x| p[x]).collect::<Vec<_>>();
        let mut elems: Vec<Vec<usize>> = vec![(0..degree).collect()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(elems[0].clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = compose(g, &elems[i]);
                if !index.contains_key(&p) {
                    if elems.len() >= MAX_GROUP_ORDER {
                        return Err(QglError::Validation(format!("group order exceeds {MAX_GROUP_ORDER}")));
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let table = elems
            .iter()
            .map(|p| elems.iter().map(|q| index[&compose(p, q)]).collect())
            .collect();
        Ok((Self::from_table(table)?, elems))
    }

    /// Abelian group with elements in [`AbelianGroup`] order.
    pub fn from_abelian(g: &AbelianGroup) -> Self {
        let n = g.order();
        let table = (0..n)
            .map(|a| (0..n).map(|b| g.index(&g.add(&g.element(a), &g.element(b)))).collect())
            .collect();
        Self::from_table(table).expect("abelian table is a group")
    }

    /// Heisenberg group mod `p` on `(x, y, z)` with
    /// `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+y·x')`; index `x·p² + y·p + z`.
    /// With `a = (1,0,0)`, `b = (0,1,0)`, `c = (0,0,1)`: `c` is central and
    /// `ba = abc`.
    pub fn heisenberg(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(QglError::Validation("Heisenberg group needs p ≥ 2".into()));
        }
        let idx = |x: usize, y: usize, z: usize| (x % p) * p * p + (y % p) * p + z % p;
        let n = p * p * p;
        let table = (0..n)
            .map(|a| {
                let (x, y, z) = (a / (p * p), a / p % p, a % p);
                (0..n)
                    .map(|b| {
                        let (x2, y2, z2) = (b / (p * p), b / p % p, b % p);
                        idx(x + x2, y + y2, z + z2 + y * x2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g₁^{e₁}·g₂^{e₂}⋯`.
    pub fn word(&self, gens: &[usize], exps: &[usize]) -> usize {
        let mut out = self.identity;
        for (&g, &e) in gens.iter().zip(exps) {
            for _ in 0..e {
                out = self.mul(out, g);
            }
        }
        out
    }

    /// Vertex permutation `x ↦ ℓ·x`.
    pub fn left_translation(&self, l: usize) -> Vec<usize> {
        self.table[l].clone()
    }
}

/// Parses 1-based cycle notation such as `(1 2 3)(4 5)` into 0-based images
/// on `degree` points. `()` is the identity.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..degree).collect();
    let mut seen = vec![false; degree];
    let bad = || QglError::Validation(format!("cannot parse cycle notation {s:?}"));
    for chunk in s.split(')') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let body = chunk.strip_prefix('(').ok_or_else(bad)?;
        let pts = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().ok().filter(|&p| p >= 1 && p <= degree).map(|p| p - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        for (i, &p) in pts.iter().enumerate() {
            if std::mem::replace(&mut seen[p], true) {
                return Err(QglError::Validation(format!("point {} repeated in {s:?}", p + 1)));
            }
            perm[p] = pts[(i + 1) % pts.len()];
        }
    }
    Ok(perm)
}

/// A subgroup of central type with its nice unitary error basis.
///
/// Elements of `L` are labels `0..|L|` with their own product `table`;
/// `subgroup[ℓ]` is the corresponding element of the ambient group.
#[derive(Clone, Debug)]
pub struct CentralTypeData {
    pub subgroup: Vec<usize>,
    pub table: Vec<Vec<usize>>,
    pub cocycle: CMat,
    pub ueb: Vec<CMat>,
}

impl CentralTypeData {
    pub fn order(&self) -> usize {
        self.ueb.len()
    }

    /// `dim H = √|L|`.
    pub fn h(&self) -> usize {
        self.ueb.first().map_or(0, CMat::rows)
    }

    pub fn identity_label(&self) -> Option<usize> {
        let n = self.table.len();
        (0..n).find(|&e| (0..n).all(|x| self.table[e][x] == x && self.table[x][e] == x))
    }

    pub fn trivial() -> Self {
        CentralTypeData {
            subgroup: vec![0],
            table: vec![vec![0]],
            cocycle: CMat::from_fn(1, 1, |_, _| cr(1.0)),
            ueb: vec![CMat::identity(1)],
        }
    }

    /// Reads the cocycle off a UEB: `ψ(ℓ',ℓ) = Tr(U_{ℓ'ℓ}† U_{ℓ'} U_ℓ)/h`.
    pub fn from_ueb(table: Vec<Vec<usize>>, ueb: Vec<CMat>, tol: &Tolerance) -> Result<Self> {
        let n = ueb.len();
        if table.len() != n || n == 0 {
            return Err(QglError::DimensionMismatch(format!("{} unitaries for a table of order {}", n, table.len())));
        }
        let h = ueb[0].rows();
        let mut cocycle = CMat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let ab = ueb[a].matmul(&ueb[b])?;
                cocycle[(a, b)] = ueb[table[a][b]].inner(&ab) / h as f64;
            }
        }
        let data = CentralTypeData { subgroup: (0..n).collect(), table, cocycle, ueb };
        data.validate(tol)?;
        Ok(data)
    }

    /// `L₁×L₂` with `U_{(ℓ₁,ℓ₂)} = U_{ℓ₁}⊗U_{ℓ₂}`, label `ℓ₁·|L₂| + ℓ₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n1, n2) = (self.order(), other.order());
        let n = n1 * n2;
        let split = |x: usize| (x / n2, x % n2);
        let table = (0..n)
            .map(|a| {
                let (a1, a2) = split(a);
                (0..n)
                    .map(|b| {
                        let (b1, b2) = split(b);
                        self.table[a1][b1] * n2 + other.table[a2][b2]
                    })
                    .collect()
            })
            .collect();
        let cocycle = CMat::from_fn(n, n, |a, b| {
            let ((a1, a2), (b1, b2)) = (split(a), split(b));
            self.cocycle[(a1, b1)] * other.cocycle[(a2, b2)]
        });
        let ueb = (0..n).map(|a| self.ueb[a / n2].kron(&other.ueb[a % n2])).collect();
        CentralTypeData { subgroup: (0..n).collect(), table, cocycle, ueb }
    }

    /// Places the labels at the given elements of `group`; the map must be
    /// an injective homomorphism.
    pub fn embed(mut self, group: &FiniteGroup, elements: Vec<usize>) -> Result<Self> {
        if elements.len() != self.order() || elements.iter().any(|&g| g >= group.order()) {
            return Err(QglError::DimensionMismatch("subgroup elements do not match |L|".into()));
        }
        for a in 0..self.order() {
            for b in 0..self.order() {
                if group.mul(elements[a], elements[b]) != elements[self.table[a][b]] {
                    return Err(QglError::Validation(format!(
                        "subgroup labels {a}, {b} do not multiply as in the group"
                    )));
                }
            }
        }
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != elements.len() {
            return Err(QglError::Validation("subgroup elements repeat".into()));
        }
        self.subgroup = elements;
        Ok(self)
    }

    /// Square order, normalisation, orthonormality and the projective
    /// relation. Returns the individual residuals.
    pub fn validate(&self, tol: &Tolerance) -> Result<Vec<AxiomCheck>> {
        let n = self.order();
        let h = self.h();
        if h == 0 || h * h != n || self.table.len() != n || self.cocycle.shape() != (n, n) {
            return Err(QglError::Validation(format!("|L| = {n} with unitaries of size {h}")));
        }
        if self.ueb.iter().any(|u| u.shape() != (h, h)) {
            return Err(QglError::DimensionMismatch("error basis unitaries differ in size".into()));
        }
        let e = self
            .identity_label()
            .ok_or_else(|| QglError::Validation("subgroup table has no identity".into()))?;
        let eye = CMat::identity(h);
        let mut normal: f64 = self.ueb[e].dist(&eye);
        for l in 0..n {
            normal = normal.max((self.cocycle[(l, e)] - 1.0).norm()).max((self.cocycle[(e, l)] - 1.0).norm());
        }
        let mut ortho: f64 = 0.0;
        let mut unitary: f64 = 0.0;
        for a in 0..n {
            unitary = unitary.max(self.ueb[a].adjoint().matmul(&self.ueb[a])?.dist(&eye));
            for b in 0..n {
                let want = if a == b { h as f64 } else { 0.0 };
                ortho = ortho.max((self.ueb[a].inner(&self.ueb[b]) - want).norm());
            }
        }
        let mut projective: f64 = 0.0;
        let mut modulus: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let lhs = self.ueb[a].matmul(&self.ueb[b])?;
                let rhs = self.ueb[self.table[a][b]].scale(self.cocycle[(a, b)]);
                projective = projective.max(lhs.dist(&rhs));
                modulus = modulus.max((self.cocycle[(a, b)].norm() - 1.0).abs());
            }
        }
        let eps = tol.abs_eps;
        let checks: Vec<AxiomCheck> = [
            ("normalised", normal),
            ("unitary", unitary),
            ("orthonormal", ortho),
            ("projective", projective),
            ("unit_modulus", modulus),
        ]
        .into_iter()
        .map(|(name, r)| AxiomCheck { name: name.into(), residual: r, pass: r <= eps })
        .collect();
        if let Some(bad) = checks.iter().find(|c| !c.pass) {
            return Err(QglError::Validation(format!(
                "error basis fails {} (residual {:.3e})",
                bad.name, bad.residual
            )));
        }
        Ok(checks)
    }
}

/// `{X^r Z^s}` on `ℂⁿ` with `X|k⟩ = ω^k|k⟩`, `Z|k⟩ = |k+1⟩`, labelled
/// `r·n + s` on `Z_n×Z_n`. The cocycle is `ψ((a,b),(c,d)) = ω̄^{bc}`.
pub fn pauli_ueb(n: usize) -> Result<CentralTypeData> {
    if n == 0 {
        return Err(QglError::Validation("Pauli basis needs n ≥ 1".into()));
    }
    let w = |k: usize| {
        let t = 2.0 * PI * (k % n) as f64 / n as f64;
        c(t.cos(), t.sin())
    };
    let x = CMat::from_fn(n, n, |i, j| if i == j { w(i) } else { cr(0.0) });
    let z = CMat::from_fn(n, n, |i, j| cr(if i == (j + 1) % n { 1.0 } else { 0.0 }));
    let pow = |m: &CMat, k: usize| (0..k).fold(CMat::identity(n), |acc, _| acc.matmul(m).expect("square"));
    let mut ueb = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            ueb.push(pow(&x, r).matmul(&pow(&z, s)).expect("square"));
        }
    }
    let table = (0..n * n)
        .map(|a| (0..n * n).map(|b| ((a / n + b / n) % n) * n + (a % n + b % n) % n).collect())
        .collect();
    let cocycle = CMat::from_fn(n * n, n * n, |a, b| w(n - (a % n) * (b / n) % n));
    let data = CentralTypeData { subgroup: (0..n * n).collect(), table, cocycle, ueb };
    data.validate(&Tolerance::default())?;
    Ok(data)
}

/// How `L` acts on `ℓ²(X)`: vertex permutations (classical sets) or
/// unitaries, one per label of `L`.
#[derive(Clone, Debug)]
pub enum Action {
    Permutations(Vec<Vec<usize>>),
    Unitaries(Vec<CMat>),
}

impl Action {
    pub fn left_translation(group: &FiniteGroup, data: &CentralTypeData) -> Self {
        Action::Permutations(data.subgroup.iter().map(|&l| group.left_translation(l)).collect())
    }

    pub fn matrices(&self, n: usize) -> Result<Vec<CMat>> {
        match self {
            Action::Unitaries(us) => {
                if us.iter().any(|u| u.shape() != (n, n)) {
                    return Err(QglError::DimensionMismatch(format!("action unitaries must be {n}x{n}")));
                }
                Ok(us.clone())
            }
            Action::Permutations(ps) => ps
                .iter()
                .map(|p| {
                    let mut sorted = p.clone();
                    sorted.sort_unstable();
                    if p.len() != n || sorted.iter().enumerate().any(|(i, &x)| i != x) {
                        return Err(QglError::Validation(format!("action entry is not a permutation of {n} points")));
                    }
                    let mut m = CMat::zeros(n, n);
                    for (x, &y) in p.iter().enumerate() {
                        m[(y, x)] = cr(1.0);
                    }
                    Ok(m)
                })
                .collect(),
        }
    }
}

/// Largest violation of: representation of `L`, unitarity, `[A, T̂] = 0`,
/// `A∘m = m∘(A⊗A)` and `A ι = ι`.
fn action_residual(g: &QuantumGraph, mats: &[CMat], data: &CentralTypeData) -> Result<f64> {
    let qs = &g.set;
    let n = qs.dim();
    let eye = CMat::identity(n);
    let mut worst: f64 = 0.0;
    for (l, a) in mats.iter().enumerate() {
        worst = worst.max(a.adjoint().matmul(a)?.dist(&eye));
        worst = worst.max(a.matmul(&g.adj)?.dist(&g.adj.matmul(a)?));
        let au = a.matvec(qs.unit())?;
        worst = worst.max(au.iter().zip(qs.unit()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max));
        for (l2, b) in mats.iter().enumerate() {
            worst = worst.max(a.matmul(b)?.dist(&mats[data.table[l][l2]]));
        }
        // A m(u_x ⊗ u_y) against m(A u_x ⊗ A u_y), one pair of basis vectors at a time
        for x in 0..n {
            for y in 0..n {
                let mut lhs = vec![cr(0.0); n];
                for t in qs.terms_in(x, y) {
                    for o in 0..n {
                        lhs[o] += a[(o, t.out)] * t.coef;
                    }
                }
                let mut rhs = vec![cr(0.0); n];
                for t in qs.terms() {
                    let w = a[(t.a, x)] * a[(t.b, y)];
                    if w.norm() > 0.0 {
                        rhs[t.out] += t.coef * w;
                    }
                }
                worst = worst.max(lhs.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max));
            }
        }
    }
    Ok(worst)
}

/// `π = |L|⁻¹ Σ_ℓ Ū_ℓ ⊗ A_ℓ ⊗ U_ℓ` after checking that `L` acts by graph
/// automorphisms and that `π` is an orthogonal projection of rank `dim X`.
pub fn build_pi(g: &QuantumGraph, action: &Action, data: &CentralTypeData, tol: &Tolerance) -> Result<CMat> {
    data.validate(tol)?;
    let n = g.dim();
    let mats = action.matrices(n)?;
    if mats.len() != data.order() {
        return Err(QglError::DimensionMismatch(format!(
            "{} action entries for |L| = {}",
            mats.len(),
            data.order()
        )));
    }
    let res = action_residual(g, &mats, data)?;
    if res > tol.abs_eps {
        return Err(QglError::Validation(format!(
            "L does not act by automorphisms of the graph (residual {res:.3e})"
        )));
    }
    let h = data.h();
    let d = h * n * h;
    let mut pi = CMat::zeros(d, d);
    let norm = 1.0 / data.order() as f64;
    for (u, a) in data.ueb.iter().zip(&mats) {
        let term = u.conj().kron(a).kron(u);
        for (p, t) in pi.data_mut().iter_mut().zip(term.data()) {
            *p += t * norm;
        }
    }
    let sq = pi.matmul(&pi)?.dist(&pi);
    let herm = pi.hermitian_residual();
    let trace = pi.trace().re;
    if sq > tol.abs_eps || herm > tol.abs_eps || (trace - n as f64).abs() > tol.abs_eps * d as f64 {
        return Err(QglError::Numerical(format!(
            "π is not a projection of rank {n} (π²−π {sq:.3e}, π−π† {herm:.3e}, trace {trace:.6})"
        )));
    }
    Ok(pi)
}

/// Output of a bubbling: the deformed graph together with the splitting
/// data that produced it.
#[derive(Clone, Debug)]
pub struct BubbleResult {
    pub source: QuantumGraph,
    /// `X_q` with `T̂_q`.
    pub deformed: QuantumGraph,
    pub h: usize,
    pub pi: CMat,
    /// `ι : ℓ²(X_q) → H̄⊗ℓ²(X)⊗H`.
    pub splitting_isometry: CMat,
    /// `P : H⊗ℓ²(X_q) → ℓ²(X)⊗H`.
    pub bijection_p: CMat,
    pub center_dim: usize,
    pub frobenius: FrobeniusReport,
    pub checks: Vec<AxiomCheck>,
}

impl BubbleResult {
    pub fn deformed_set(&self) -> &QuantumSet {
        &self.deformed.set
    }

    pub fn deformed_adj(&self) -> &CMat {
        &self.deformed.adj
    }
}

fn check(name: &str, residual: f64, bound: f64) -> AxiomCheck {
    AxiomCheck { name: name.into(), residual, pass: residual <= bound }
}

/// Splits `π` through its eigenvalue-1 eigenvectors and bubbles.
pub fn split_and_bubble(g: &QuantumGraph, pi: &CMat, data: &CentralTypeData, tol: &Tolerance) -> Result<BubbleResult> {
    let e = eigh(pi, tol)?;
    let keep: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > 0.5).collect();
    if keep.len() != g.dim() {
        return Err(QglError::Numerical(format!(
            "π has rank {} but the set has dimension {}",
            keep.len(),
            g.dim()
        )));
    }
    let iso = CMat::from_fn(pi.rows(), keep.len(), |r, k| e.vectors[(r, keep[k])]);
    bubble_with_isometry(g, pi, &iso, data.h(), tol)
}

/// Convenience: `build_pi` followed by `split_and_bubble`.
pub fn bubble(g: &QuantumGraph, action: &Action, data: &CentralTypeData, tol: &Tolerance) -> Result<BubbleResult> {
    let pi = build_pi(g, action, data, tol)?;
    split_and_bubble(g, &pi, data, tol)
}

/// Bubbles along a given splitting `ι` of `π` (any isometry with
/// `ιι† = π`).
pub fn bubble_with_isometry(g: &QuantumGraph, pi: &CMat, iso: &CMat, h: usize, tol: &Tolerance) -> Result<BubbleResult> {
    let qs = &g.set;
    let n = qs.dim();
    let d = h * n * h;
    if pi.shape() != (d, d) || iso.shape() != (d, n) {
        return Err(QglError::DimensionMismatch(format!(
            "π {}x{} and ι {}x{} for h = {h}, N = {n}",
            pi.rows(),
            pi.cols(),
            iso.rows(),
            iso.cols()
        )));
    }
    let iso_dag = iso.adjoint();
    let eps = tol.abs_eps;
    let mut checks = vec![
        check("isometry", iso_dag.matmul(iso)?.dist(&CMat::identity(n)), eps),
        check("splits_pi", iso.matmul(&iso_dag)?.dist(pi), eps),
    ];

    let (m_q, unit_q) = deformed_structure(qs, iso, &iso_dag, h)?;
    let set_q = QuantumSet::from_dense(&m_q, unit_q, 1e-14)?;
    let frobenius = set_q.verify_frobenius(tol);
    checks.push(check("delta_sq", (set_q.delta_sq() - qs.delta_sq()).abs(), eps));
    if !frobenius.all_pass() || !checks[2].pass {
        return Err(QglError::Numerical(format!(
            "deformed set is not a δ-form with δ² = {} (got {})",
            qs.delta_sq(),
            set_q.delta_sq()
        )));
    }

    let bijection_p = bijection(iso, n, h);
    let t_q = conjugate_through(&g.adj, iso, &iso_dag, h)?;
    let t_q_p = bubble_through_p(&g.adj, &bijection_p, n, h)?;
    checks.push(check("routes_agree", t_q.dist(&t_q_p), eps));
    let deformed = analyze_flags(&set_q, &t_q, tol)?;
    checks.push(check("schur_idempotent", deformed.residuals.schur_idempotent, eps));
    if let Some(bad) = checks.iter().find(|c| !c.pass) {
        return Err(QglError::Numerical(format!(
            "bubbling check {} failed (residual {:.3e})",
            bad.name, bad.residual
        )));
    }
    let center_dim = algebra_center_dimension(&set_q, tol)?;
    Ok(BubbleResult {
        source: g.clone(),
        deformed,
        h,
        pi: pi.clone(),
        splitting_isometry: iso.clone(),
        bijection_p,
        center_dim,
        frobenius,
        checks,
    })
}

/// `m_q(u_a⊗u_b) = ι† m_E(ι u_a ⊗ ι u_b)` and `ι_q = ι† ι_E`, where on
/// `H̄⊗X⊗H` the inflated structure is
/// `m_E((i,x,j)⊗(k,y,l)) = √h·δ_{jk}·(i, m(x⊗y), l)` and
/// `ι_E = h^{-1/2} Σ_i (i, ι, i)`.
fn deformed_structure(qs: &QuantumSet, iso: &CMat, iso_dag: &CMat, h: usize) -> Result<(CMat, Vec<C64>)> {
    let n = qs.dim();
    let d = h * n * h;
    let at = |i: usize, x: usize, j: usize| (i * n + x) * h + j;
    let sh = (h as f64).sqrt();
    let cols: Vec<Vec<C64>> = (0..n).map(|a| iso.col(a)).collect();
    let mut m_q = CMat::zeros(n, n * n);
    let mut buf = vec![cr(0.0); d];
    for a in 0..n {
        for b in 0..n {
            buf.iter_mut().for_each(|z| *z = cr(0.0));
            let (va, vb) = (&cols[a], &cols[b]);
            for t in qs.terms() {
                let coef = t.coef * sh;
                for i in 0..h {
                    for l in 0..h {
                        let mut s = cr(0.0);
                        for j in 0..h {
                            s += va[at(i, t.a, j)] * vb[at(j, t.b, l)];
                        }
                        buf[at(i, t.out, l)] += coef * s;
                    }
                }
            }
            let out = iso_dag.matvec(&buf)?;
            for (z, v) in out.into_iter().enumerate() {
                m_q[(z, a * n + b)] = v;
            }
        }
    }
    let mut unit_e = vec![cr(0.0); d];
    for i in 0..h {
        for x in 0..n {
            unit_e[at(i, x, i)] = qs.unit()[x] / sh;
        }
    }
    Ok((m_q, iso_dag.matvec(&unit_e)?))
}

/// `P[(x,j),(k,a)] = √h·ι[(k,x,j), a]`.
fn bijection(iso: &CMat, n: usize, h: usize) -> CMat {
    let sh = (h as f64).sqrt();
    CMat::from_fn(n * h, h * n, |row, col| {
        let (x, j) = (row / h, row % h);
        let (k, a) = (col / n, col % n);
        iso[((k * n + x) * h + j, a)] * sh
    })
}

/// `ι†(id⊗S⊗id)ι`.
fn conjugate_through(s: &CMat, iso: &CMat, iso_dag: &CMat, h: usize) -> Result<CMat> {
    let n = iso.cols();
    let mut inner = CMat::zeros(iso.rows(), n);
    for a in 0..n {
        inner.set_col(a, &apply_op_at(s, &iso.col(a), h, h));
    }
    iso_dag.matmul(&inner)
}

/// `h⁻¹·(id⊗ev)∘(P̄⊗id)∘(id⊗S⊗id)∘(id⊗P)∘(coev⊗id)` assembled from
/// explicit matrices. `P̄ : H̄⊗ℓ²(X) → ℓ²(X_q)⊗H̄` is the entrywise
/// conjugate of `P` with both leg orders kept, `P̄[(a,k),(i,x)] =
/// conj P[(x,k),(i,a)]`.
fn bubble_through_p(s: &CMat, p: &CMat, n: usize, h: usize) -> Result<CMat> {
    let eye_h = CMat::identity(h);
    let mut coev = CMat::zeros(h * h * n, n);
    for a in 0..n {
        for i in 0..h {
            coev[((i * h + i) * n + a, a)] = cr(1.0);
        }
    }
    let p_bar = CMat::from_fn(n * h, h * n, |row, col| {
        let (a, k) = (row / h, row % h);
        let (i, x) = (col / n, col % n);
        p[(x * h + k, i * n + a)].conj()
    });
    let mut ev = CMat::zeros(n, n * h * h);
    for a in 0..n {
        for k in 0..h {
            ev[(a, (a * h + k) * h + k)] = cr(1.0);
        }
    }
    let v = eye_h.kron(p).matmul(&coev)?;
    let v = eye_h.kron(&s.kron(&eye_h)).matmul(&v)?;
    let v = p_bar.kron(&eye_h).matmul(&v)?;
    Ok(ev.matmul(&v)?.scale(cr(1.0 / h as f64)))
}

/// `‖(id⊗S⊗id)π − π(id⊗S⊗id)‖`, the second term taken as
/// `((id⊗S†⊗id)π)†` since `π` is self-adjoint.
fn commutator_with_pi(s: &CMat, r: &BubbleResult) -> f64 {
    let d = r.pi.rows();
    let s_dag = s.adjoint();
    let mut lhs = CMat::zeros(d, d);
    let mut rhs = CMat::zeros(d, d);
    for col in 0..d {
        let v = r.pi.col(col);
        lhs.set_col(col, &apply_op_at(s, &v, r.h, r.h));
        rhs.set_col(col, &apply_op_at(&s_dag, &v, r.h, r.h));
    }
    lhs.dist(&rhs.adjoint())
}

/// `S_q = ι†(id⊗S⊗id)ι` for `S` commuting with the action.
pub fn bubble_operator(s: &CMat, r: &BubbleResult, tol: &Tolerance) -> Result<CMat> {
    let n = r.source.dim();
    if s.shape() != (n, n) {
        return Err(QglError::DimensionMismatch(format!("operator must be {n}x{n}")));
    }
    let res = commutator_with_pi(s, r);
    if res > tol.op_threshold(r.pi.rows(), s.norm_fro(), 1.0) {
        return Err(QglError::Validation(format!(
            "operator does not commute with the quantum automorphism (residual {res:.3e})"
        )));
    }
    conjugate_through(s, &r.splitting_isometry, &r.splitting_isometry.adjoint(), r.h)
}

/// The same operator through the bijection `P`.
pub fn bubble_operator_via_p(s: &CMat, r: &BubbleResult) -> Result<CMat> {
    bubble_through_p(s, &r.bijection_p, r.source.dim(), r.h)
}

/// Dimension of the centre of a δ-form, computed from `m` as the kernel of
/// `z ↦ (m(z⊗u_x) − m(u_x⊗z))_x`.
pub fn algebra_center_dimension(qs: &QuantumSet, tol: &Tolerance) -> Result<usize> {
    let n = qs.dim();
    // gram[z', z] = Σ_x ⟨C_x e_z', C_x e_z⟩ with C_x e_z = m(e_z⊗u_x) − m(u_x⊗e_z)
    let mut cols: Vec<Vec<C64>> = vec![vec![cr(0.0); n * n]; n];
    for t in qs.terms() {
        // contributes to C_{t.b} e_{t.a} (+) and C_{t.a} e_{t.b} (−)
        cols[t.a][t.b * n + t.out] += t.coef;
        cols[t.b][t.a * n + t.out] -= t.coef;
    }
    let gram = CMat::from_fn(n, n, |i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum());
    let e = eigh(&gram, tol)?;
    let (_, nullity) = rank_from_values(&e.values, tol);
    Ok(nullity)
}

/// Centre dimension of the bubbled set from group data alone:
/// `|L|⁻¹ Σ_{v} Φ_{Stab_L(v)}`, `Φ_Λ = Σ_{α,β∈Λ, αβ=βα} ψ(α,β)·ψ̄(αβα⁻¹, α)`.
/// `action` permutes the vertices, one permutation per label of `L`.
pub fn center_dimension(data: &CentralTypeData, action: &[Vec<usize>], tol: &Tolerance) -> Result<usize> {
    let n = data.order();
    if action.len() != n {
        return Err(QglError::DimensionMismatch(format!("{} permutations for |L| = {n}", action.len())));
    }
    let inv: Vec<usize> = (0..n)
        .map(|a| {
            let e = data.identity_label().unwrap_or(0);
            (0..n).find(|&b| data.table[a][b] == e).unwrap_or(e)
        })
        .collect();
    let verts = action.first().map_or(0, Vec::len);
    let mut cache: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    let mut total = cr(0.0);
    for v in 0..verts {
        let stab: Vec<usize> = (0..n).filter(|&l| action[l][v] == v).collect();
        let phi = *cache.entry(stab.clone()).or_insert_with(|| {
            let mut s = cr(0.0);
            for &a in &stab {
                for &b in &stab {
                    if data.table[a][b] == data.table[b][a] {
                        let conj = data.table[data.table[a][b]][inv[a]];
                        s += data.cocycle[(a, b)] * data.cocycle[(conj, a)].conj();
                    }
                }
            }
            s
        });
        total += phi;
    }
    let value = total / n as f64;
    let rounded = value.re.round();
    if (value - cr(rounded)).norm() > tol.abs_eps || rounded < 0.0 {
        return Err(QglError::Numerical(format!("centre dimension {value} is not an integer")));
    }
    Ok(rounded as usize)
}

/// Comparison of a graph with its bubbling.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub checks: Vec<AxiomCheck>,
    pub spectrum: Vec<(f64, usize)>,
    pub source_topology: Option<TopologyReport>,
    pub deformed_topology: Option<TopologyReport>,
    pub source_regularity: Option<RegularityReport>,
    pub deformed_regularity: Option<RegularityReport>,
    pub center_dim: usize,
    pub all_pass: bool,
}

fn sorted_eigs(m: &CMat, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(eigh(m, tol)?.values)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn power_sum(t: &CMat, coeffs: &[f64]) -> Result<CMat> {
    let n = t.rows();
    let mut out = CMat::zeros(n, n);
    let mut p = CMat::identity(n);
    for (k, &ck) in coeffs.iter().enumerate() {
        if k > 0 {
            p = p.matmul(t)?;
        }
        out = &out + &p.scale(cr(ck));
    }
    Ok(out)
}

/// Everything bubbling must preserve: polynomial functional calculus,
/// spectra, Laplacian and topology, regularity, spectral projections,
/// edge projectors, `Ĵ`, traces and `★`.
pub fn invariance_suite(r: &BubbleResult, tol: &Tolerance) -> Result<InvarianceReport> {
    let t = &r.source.adj;
    let t_q = &r.deformed.adj;
    let qs = &r.source.set;
    let qs_q = &r.deformed.set;
    let n = qs.dim();
    let eps = tol.abs_eps;
    let bub = |s: &CMat| bubble_operator(s, r, tol);
    let mut checks = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lhs = bub(&power_sum(t, &coeffs)?)?;
    checks.push(check("polynomial_degree_4", lhs.dist(&power_sum(t_q, &coeffs)?), eps * 10.0));

    let e_src = eigh(t, tol)?;
    let e_q = sorted_eigs(t_q, tol)?;
    checks.push(check("spectrum", max_diff(&e_src.values, &e_q), eps));
    checks.push(check("trace", (t.trace() - t_q.trace()).norm(), eps));
    checks.push(check("routes_agree", bubble_operator_via_p(t, r)?.dist(t_q), eps));

    let mut proj_res: f64 = 0.0;
    let e_qq = eigh(t_q, tol)?;
    for (value, idx) in cluster_eigenvalues(&e_src.values, tol) {
        let q = spectral_projection(&e_src.vectors, &idx);
        let idx_q: Vec<usize> = (0..n).filter(|&i| (e_qq.values[i] - value).abs() <= tol.eig_cluster_eps).collect();
        let r_q = spectral_projection(&e_qq.vectors, &idx_q);
        proj_res = proj_res.max(bub(&q)?.dist(&r_q));
    }
    checks.push(check("spectral_projections", proj_res, eps));

    let j = complete_adjacency(qs);
    checks.push(check("complete_graph", bub(&j)?.dist(&complete_adjacency(qs_q)), eps));

    let t2 = t.matmul(t)?;
    let lhs = bub(&schur_product(&t2, t, qs)?)?;
    let rhs = schur_product(&t_q.matmul(t_q)?, t_q, qs_q)?;
    checks.push(check("schur_functoriality", lhs.dist(&rhs), eps * 10.0));

    let p = &r.bijection_p;
    checks.push(check("bijection_unitary", p.adjoint().matmul(p)?.dist(&CMat::identity(p.cols())), eps));

    let tri = common_neighbors(&r.source);
    let tri_q = common_neighbors(&r.deformed);
    checks.push(check("common_neighbors_norm", (tri.norm_fro() - tri_q.norm_fro()).abs(), eps));

    let edge = edge_projector_of(t, qs);
    let edge_q = edge_projector_of(t_q, qs_q);
    let edge_res = (edge.trace() - edge_q.trace())
        .norm()
        .max((edge.norm_fro() - edge_q.norm_fro()).abs());
    checks.push(check("edge_projector", edge_res, eps));

    let laplacian_ok = r.source.flags.irreflexive && r.source.flags.real && r.source.flags.undirected;
    let (mut source_topology, mut deformed_topology) = (None, None);
    let (mut source_regularity, mut deformed_regularity) = (None, None);
    if laplacian_ok {
        let l = laplacian(&r.source)?;
        let l_q = laplacian(&r.deformed)?;
        checks.push(check("laplacian_bubbles", bub(&l)?.dist(&l_q), eps));
        checks.push(check("laplacian_spectrum", max_diff(&sorted_eigs(&l, tol)?, &sorted_eigs(&l_q, tol)?), eps));
        let a = topology_report(&r.source, tol)?;
        let b = topology_report(&r.deformed, tol)?;
        let same = a.components == b.components
            && a.laplacian_rank == b.laplacian_rank
            && a.has_cycle == b.has_cycle
            && a.is_forest == b.is_forest
            && a.is_tree == b.is_tree;
        let res = if same {
            (a.laplacian_trace - b.laplacian_trace)
                .abs()
                .max((a.edge_count - b.edge_count).abs())
                .max(max_diff(&a.laplacian_spectrum, &b.laplacian_spectrum))
        } else {
            f64::INFINITY
        };
        checks.push(check("topology", res, eps));
        source_topology = Some(a);
        deformed_topology = Some(b);

        let a = regularity_report(&r.source, tol)?;
        let b = regularity_report(&r.deformed, tol)?;
        let flags_same = a.regular_1pt == b.regular_1pt && a.regular_2pt == b.regular_2pt && a.regular_3pt == b.regular_3pt;
        let res = if flags_same {
            a.row().iter().zip(b.row()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        checks.push(check("regularity", res, eps));
        source_regularity = Some(a);
        deformed_regularity = Some(b);
    }
    checks.extend(r.frobenius.checks.iter().map(|c| AxiomCheck {
        name: format!("deformed_{}", c.name),
        ..c.clone()
    }));

    let spectrum = cluster_eigenvalues(&e_q, tol).into_iter().map(|(v, idx)| (v, idx.len())).collect();
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(InvarianceReport {
        checks,
        spectrum,
        source_topology,
        deformed_topology,
        source_regularity,
        deformed_regularity,
        center_dim: r.center_dim,
        all_pass,
    })
}

fn spectral_projection(vectors: &CMat, idx: &[usize]) -> CMat {
    let n = vectors.rows();
    CMat::from_fn(n, n, |i, j| idx.iter().map(|&k| vectors[(i, k)] * vectors[(j, k)].conj()).sum())
}

/// Classical Cayley graph `x ~ x·s` on a finite group; left translations
/// are automorphisms.
pub fn group_cayley_graph(group: &FiniteGroup, s: &[usize], tol: &Tolerance) -> Result<QuantumGraph> {
    let n = group.order();
    if s.iter().any(|&x| x >= n) {
        return Err(QglError::Validation("connection set element out of range".into()));
    }
    if s.contains(&group.identity()) {
        return Err(QglError::Validation("connection set contains the identity".into()));
    }
    if s.iter().any(|&x| !s.contains(&group.inv(x))) {
        return Err(QglError::Validation("connection set is not closed under inverses".into()));
    }
    let mut adj = CMat::zeros(n, n);
    for x in 0..n {
        for &g in s {
            adj[(group.mul(x, g), x)] = cr(1.0);
        }
    }
    analyze_flags(&make_classical_set(n)?, &adj, tol)
}

/// A complete bubbling input: group, Cayley graph, central-type data and
/// the vertex action.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub group: FiniteGroup,
    pub connection_set: Vec<usize>,
    pub data: CentralTypeData,
    pub action: Vec<Vec<usize>>,
}

impl Bundle {
    pub fn graph(&self, tol: &Tolerance) -> Result<QuantumGraph> {
        group_cayley_graph(&self.group, &self.connection_set, tol)
    }

    pub fn bubble(&self, tol: &Tolerance) -> Result<BubbleResult> {
        bubble(&self.graph(tol)?, &Action::Permutations(self.action.clone()), &self.data, tol)
    }

    pub fn center_dimension(&self, tol: &Tolerance) -> Result<usize> {
        center_dimension(&self.data, &self.action, tol)
    }

    pub fn from_json(text: &str, tol: &Tolerance) -> Result<Self> {
        let spec: BundleSpec =
            serde_json::from_str(text).map_err(|e| QglError::Validation(format!("bundle JSON: {e}")))?;
        spec.build(tol)
    }
}

#[derive(Debug, Deserialize)]
struct GroupSpec {
    #[serde(default)]
    order: Option<usize>,
    #[serde(default)]
    table: Option<Vec<Vec<usize>>>,
    /// Cycle notation generators, e.g. `"(1 2 3 4 5)"`.
    #[serde(default)]
    generators: Option<Vec<String>>,
    #[serde(default)]
    degree: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CocycleSpec {
    Named(String),
    Table(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ActionSpec {
    Named(String),
    Permutations(Vec<Vec<usize>>),
}

#[derive(Debug, Deserialize)]
struct BundleSpec {
    group: GroupSpec,
    connection_set: Vec<usize>,
    subgroup: Vec<usize>,
    cocycle: CocycleSpec,
    action: ActionSpec,
    /// Error basis as matrices of `[re, im]`; required with an explicit cocycle.
    #[serde(default)]
    ueb: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl BundleSpec {
    fn build(self, tol: &Tolerance) -> Result<Bundle> {
        let group = match (self.group.table, self.group.generators) {
            (Some(t), _) => FiniteGroup::from_table(t)?,
            (None, Some(gens)) => {
                let degree = self
                    .group
                    .degree
                    .ok_or_else(|| QglError::Validation("generators need \"degree\"".into()))?;
                let perms = gens.iter().map(|g| parse_cycles(g, degree)).collect::<Result<Vec<_>>>()?;
                FiniteGroup::from_permutations(&perms)?.0
            }
            (None, None) => return Err(QglError::Validation("group needs \"table\" or \"generators\"".into())),
        };
        if let Some(o) = self.group.order {
            if o != group.order() {
                return Err(QglError::Validation(format!("group has order {}, expected {o}", group.order())));
            }
        }
        let l = self.subgroup.len();
        let data = match (&self.cocycle, self.ueb) {
            (CocycleSpec::Named(name), None) => named_cocycle(name)?,
            (cocycle, Some(ueb)) => {
                let ueb = ueb
                    .into_iter()
                    .map(|m| CMat::from_rows(&m.into_iter().map(|r| r.into_iter().map(|[a, b]| c(a, b)).collect()).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>>>()?;
                let table = subgroup_table(&group, &self.subgroup)?;
                let data = CentralTypeData::from_ueb(table, ueb, tol)?;
                if let CocycleSpec::Table(t) = cocycle {
                    let given = CMat::from_rows(&t.iter().map(|r| r.iter().map(|&[a, b]| c(a, b)).collect()).collect::<Vec<_>>())?;
                    if !op_close(&given, &data.cocycle, tol).1 {
                        return Err(QglError::Validation("cocycle table disagrees with the error basis".into()));
                    }
                }
                data
            }
            (CocycleSpec::Table(_), None) => {
                return Err(QglError::Validation("an explicit cocycle table needs an explicit \"ueb\"".into()))
            }
        };
        if data.order() != l {
            return Err(QglError::Validation(format!("subgroup has {l} elements but the cocycle has order {}", data.order())));
        }
        let data = data.embed(&group, self.subgroup)?;
        let action = match self.action {
            ActionSpec::Named(s) if s == "left-translation" => data.subgroup.iter().map(|&g| group.left_translation(g)).collect(),
            ActionSpec::Named(s) => return Err(QglError::Validation(format!("unknown action {s:?}"))),
            ActionSpec::Permutations(p) => p,
        };
        Ok(Bundle { group, connection_set: self.connection_set, data, action })
    }
}

fn subgroup_table(group: &FiniteGroup, elems: &[usize]) -> Result<Vec<Vec<usize>>> {
    let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    elems
        .iter()
        .map(|&a| {
            elems
                .iter()
                .map(|&b| {
                    pos.get(&group.mul(a, b))
                        .copied()
                        .ok_or_else(|| QglError::Validation("subgroup is not closed".into()))
                })
                .collect()
        })
        .collect()
}

/// `"pauli:n"` or a composite `"pauli:n1,n2,…"`.
fn named_cocycle(name: &str) -> Result<CentralTypeData> {
    let rest = name
        .strip_prefix("pauli:")
        .ok_or_else(|| QglError::Validation(format!("unknown cocycle {name:?}")))?;
    let mut out: Option<CentralTypeData> = None;
    for part in rest.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| QglError::Validation(format!("bad Pauli size in {name:?}")))?;
        let p = pauli_ueb(n)?;
        out = Some(match out {
            None => p,
            Some(prev) => prev.tensor(&p),
        });
    }
    out.ok_or_else(|| QglError::Validation(format!("empty cocycle {name:?}")))
}

/// Cayley bundle on an abelian group with `L = Γ` acting by left translation;
/// `data` must be labelled by the group's elements in index order.
pub fn abelian_bundle(group: AbelianGroup, s: ConnectionSet, data: CentralTypeData) -> Bundle {
    let g = FiniteGroup::from_abelian(&group);
    let connection_set = s.elements().iter().map(|x| group.index(x)).collect();
    let elements = (0..g.order()).collect();
    let data = data.embed(&g, elements).expect("identity embedding of a product of Pauli labels");
    let action = Action::left_translation(&g, &data);
    let Action::Permutations(action) = action else { unreachable!() };
    Bundle { group: g, connection_set, data, action }
}

/// 9-Paley on `Z₃×Z₃` with `L = Γ` and the Pauli basis of size 3.
pub fn paley9_bundle() -> Bundle {
    let (g, s) = paley9_data();
    abelian_bundle(g, s, pauli_ueb(3).expect("n = 3"))
}

/// Clebsch on `Z₂⁴` with the composite Pauli basis of size 4.
pub fn clebsch16_bundle() -> Bundle {
    let (g, s) = clebsch16_data();
    let p = pauli_ueb(2).expect("n = 2");
    abelian_bundle(g, s, p.tensor(&p))
}

/// Shrikhande on `Z₄×Z₄` with the Pauli basis of size 4.
pub fn shrikhande_bundle() -> Bundle {
    let (g, s) = shrikhande_data();
    abelian_bundle(g, s, pauli_ueb(4).expect("n = 4"))
}

/// Cayley graph on the Heisenberg group mod 3 with
/// `S = {a, a², b, b², c, c², cba, a²b²c², aba, bab}` and `L = ⟨a, c⟩`,
/// label `(r, s) ↦ a^r c^s`.
pub fn heisenberg27_bundle() -> Bundle {
    let g = FiniteGroup::heisenberg(3).expect("p = 3");
    let (a, b, cc) = (9, 3, 1);
    let w = |gens: &[usize]| gens.iter().fold(g.identity(), |acc, &x| g.mul(acc, x));
    let s = vec![
        a,
        w(&[a, a]),
        b,
        w(&[b, b]),
        cc,
        w(&[cc, cc]),
        w(&[cc, b, a]),
        w(&[a, a, b, b, cc, cc]),
        w(&[a, b, a]),
        w(&[b, a, b]),
    ];
    let elements = (0..9).map(|l| g.word(&[a, cc], &[l / 3, l % 3])).collect();
    let data = pauli_ueb(3).expect("n = 3").embed(&g, elements).expect("⟨a, c⟩ ≅ Z₃×Z₃");
    let Action::Permutations(action) = Action::left_translation(&g, &data) else { unreachable!() };
    Bundle { group: g, connection_set: s, data, action }
}

/// The order-100 group `⟨(1 2 3 4 5), (6 7 8 9 10), (2 3 5 4)⟩ ≤ S₁₀` with
/// `L = ⟨g₁, g₂⟩` and `g₁^i g₂^j ↦ X^i Z^j`. The connection set realising
/// the Higman–Sims graph is not included; supply it to bubble.
pub fn hs_recipe() -> Result<Bundle> {
    let gens = ["(1 2 3 4 5)", "(6 7 8 9 10)", "(2 3 5 4)"]
        .iter()
        .map(|s| parse_cycles(s, 10))
        .collect::<Result<Vec<_>>>()?;
    let (full, perms) = FiniteGroup::from_permutations(&gens)?;
    let find = |p: &[usize]| perms.iter().position(|q| q == p).expect("generator in closure");
    let (g1, g2) = (find(&gens[0]), find(&gens[1]));
    let elements = (0..25).map(|l| full.word(&[g1, g2], &[l / 5, l % 5])).collect();
    let data = pauli_ueb(5)?.embed(&full, elements)?;
    let Action::Permutations(action) = Action::left_translation(&full, &data) else { unreachable!() };
    Ok(Bundle { group: full, connection_set: Vec::new(), data, action })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pauli_bases_satisfy_relations() {
        for n in [1, 2, 3, 5] {
            let p = pauli_ueb(n).unwrap();
            assert_eq!(p.order(), n * n);
            assert!(p.validate(&tol()).unwrap().iter().all(|c| c.pass));
        }
        let p = pauli_ueb(2).unwrap();
        let q = p.tensor(&p);
        assert!(q.validate(&tol()).is_ok());
        assert_eq!(q.h(), 4);
        assert!(pauli_ueb(0).is_err());
    }

    #[test]
    fn cocycle_read_off_matches_formula() {
        let p = pauli_ueb(3).unwrap();
        let q = CentralTypeData::from_ueb(p.table.clone(), p.ueb.clone(), &tol()).unwrap();
        assert!(q.cocycle.dist(&p.cocycle) < 1e-12);
    }

    #[test]
    fn group_tables() {
        let h = FiniteGroup::heisenberg(3).unwrap();
        assert_eq!(h.order(), 27);
        let (a, b, cc) = (9, 3, 1);
        assert_eq!(h.mul(b, a), h.mul(h.mul(a, b), cc));
        assert_eq!(h.mul(a, cc), h.mul(cc, a));
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert_eq!(parse_cycles("(1 3)(2)", 3).unwrap(), vec![2, 1, 0]);
        assert!(parse_cycles("(1 1)", 3).is_err());
        let hs = hs_recipe().unwrap();
        assert_eq!(hs.group.order(), 100);
    }

    #[test]
    fn trivial_bubbling_is_identity() {
        let b = paley9_bundle();
        let g = b.graph(&tol()).unwrap();
        let r = bubble(&g, &Action::Permutations(vec![(0..9).collect()]), &CentralTypeData::trivial(), &tol()).unwrap();
        assert!(r.pi.dist(&CMat::identity(9)) < 1e-15);
        assert!(same_up_to_unitary(&r.deformed.adj, &g.adj));
        assert_eq!(r.center_dim, 9);
    }

    fn same_up_to_unitary(a: &CMat, b: &CMat) -> bool {
        let ea = eigh(a, &tol()).unwrap().values;
        let eb = eigh(b, &tol()).unwrap().values;
        max_diff(&ea, &eb) < 1e-9
    }

    #[test]
    fn non_automorphism_rejected() {
        let b = paley9_bundle();
        let g = b.graph(&tol()).unwrap();
        let mut bad = b.action.clone();
        bad[1].swap(0, 1);
        assert!(build_pi(&g, &Action::Permutations(bad), &b.data, &tol()).is_err());
    }
}
