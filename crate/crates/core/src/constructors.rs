//! Graph builders: Cayley graphs over finite abelian groups, their twisted
//! versions over matrix algebras, the named catalog, an idempotent search
//! and a Fourier transform of diagonal projections.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QglError, Result};
use crate::quantum_set::{make_classical_set, make_matrix_set, QuantumSet};
use crate::render::{snap_rational, MAX_DENOMINATOR};
use crate::schur_algebra::{analyze_flags, schur_product, QuantumGraph};
use crate::tensor_core::{cluster_eigenvalues, eigh, gram_solve, op_close, Tolerance};
use crate::{c, cr, CMat, Q64, C64};

/// `Z_{n₁}×…×Z_{n_k}`, elements enumerated lexicographically (last factor
/// fastest).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    cycle_orders: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(cycle_orders: &[usize]) -> Result<Self> {
        if cycle_orders.is_empty() || cycle_orders.contains(&0) {
            return Err(QglError::Validation("cycle orders must be >= 1".into()));
        }
        Ok(Self { cycle_orders: cycle_orders.to_vec() })
    }

    pub fn cycle_orders(&self) -> &[usize] {
        &self.cycle_orders
    }

    pub fn order(&self) -> usize {
        self.cycle_orders.iter().product()
    }

    pub fn element(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.cycle_orders.len()];
        for (slot, &n) in out.iter_mut().zip(&self.cycle_orders).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.cycle_orders).fold(0, |acc, (&v, &n)| acc * n + v % n)
    }

    pub fn add(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        x.iter().zip(y).zip(&self.cycle_orders).map(|((a, b), n)| (a + b) % n).collect()
    }

    pub fn neg(&self, x: &[usize]) -> Vec<usize> {
        x.iter().zip(&self.cycle_orders).map(|(a, n)| (n - a % n) % n).collect()
    }

    /// The character `μ ↦ exp(2πi Σ μ_j x_j / n_j)` evaluated at `x`.
    pub fn character(&self, mu: &[usize], x: &[usize]) -> C64 {
        let phase: f64 = mu
            .iter()
            .zip(x)
            .zip(&self.cycle_orders)
            .map(|((m, v), &n)| ((m * v) % n) as f64 / n as f64)
            .sum();
        C64::from_polar(1.0, 2.0 * PI * phase)
    }
}

impl FromStr for AbelianGroup {
    type Err = QglError;

    /// `"3x3"`, `"2x2x2x2"`, `"4"`.
    fn from_str(s: &str) -> Result<Self> {
        let orders = s
            .split(['x', 'X', '*'])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| QglError::Validation(format!("bad group factor {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&orders)
    }
}

/// A symmetric connection set not containing the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionSet {
    elements: Vec<Vec<usize>>,
}

impl ConnectionSet {
    pub fn new(group: &AbelianGroup, elements: &[Vec<usize>]) -> Result<Self> {
        let k = group.cycle_orders().len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for e in elements {
            if e.len() != k {
                return Err(QglError::Validation(format!(
                    "element {e:?} has {} coordinates, group has {k}",
                    e.len()
                )));
            }
            let e = group.element(group.index(e));
            if !out.contains(&e) {
                out.push(e);
            }
        }
        let zero = vec![0; k];
        if out.contains(&zero) {
            return Err(QglError::Validation("connection set contains the identity".into()));
        }
        for e in &out {
            if !out.contains(&group.neg(e)) {
                return Err(QglError::Validation(format!(
                    "connection set is not symmetric: {e:?} has no inverse"
                )));
            }
        }
        Ok(Self { elements: out })
    }

    /// Parse `"(1,0),(2,0),(0,1),(0,2)"`; bare integers are accepted for
    /// cyclic groups.
    pub fn parse(group: &AbelianGroup, s: &str) -> Result<Self> {
        let mut elems = Vec::new();
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.contains('(') {
            for chunk in cleaned.split(')') {
                let chunk = chunk.trim_start_matches(',').trim_start_matches('(');
                if chunk.is_empty() {
                    continue;
                }
                elems.push(parse_coords(group, chunk)?);
            }
        } else if !cleaned.is_empty() {
            for t in cleaned.split(',') {
                elems.push(parse_coords(group, t)?);
            }
        }
        Self::new(group, &elems)
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }
}

fn parse_coords(group: &AbelianGroup, s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .zip(group.cycle_orders())
        .map(|(t, &n)| {
            let v: i64 = t
                .parse()
                .map_err(|_| QglError::Validation(format!("bad coordinate {t:?}")))?;
            Ok(v.rem_euclid(n as i64) as usize)
        })
        .collect()
}

/// `λ_μ = Σ_{s∈S} χ_μ(−s)`.
pub fn character_sum(group: &AbelianGroup, s: &ConnectionSet, mu: &[usize]) -> C64 {
    s.elements().iter().map(|x| group.character(mu, &group.neg(x))).sum()
}

pub fn cayley_adjacency(group: &AbelianGroup, s: &ConnectionSet) -> CMat {
    let n = group.order();
    let mut a = CMat::zeros(n, n);
    for x in 0..n {
        let gx = group.element(x);
        for e in s.elements() {
            a[(group.index(&group.add(&gx, e)), x)] = cr(1.0);
        }
    }
    a
}

fn sorted_real(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn spectra_match(a: &[f64], b: &[f64], tol: &Tolerance) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol.eig_cluster_eps * scale)
}

/// Classical Cayley graph on `ℂ^{|Γ|}`; the spectrum is checked against the
/// character sums.
pub fn cayley_graph(group: &AbelianGroup, s: &ConnectionSet, tol: &Tolerance) -> Result<QuantumGraph> {
    let a = cayley_adjacency(group, s);
    let n = group.order();
    let qs = make_classical_set(n)?;
    let g = analyze_flags(&qs, &a, tol)?;
    let e = eigh(&a, tol)?;
    let chars = sorted_real((0..n).map(|m| character_sum(group, s, &group.element(m)).re).collect());
    if !spectra_match(&e.values, &chars, tol) {
        return Err(QglError::Numerical("Cayley spectrum disagrees with character sums".into()));
    }
    Ok(g)
}

/// Weyl operator `τ₁^a τ₂^b` on `ℂⁿ`: clock `τ₁ = diag(ω^k)`, shift `τ₂`
/// with ones at `(r, r+1)`.
pub fn weyl_operator(n: usize, a: usize, b: usize) -> CMat {
    let w = |k: usize| C64::from_polar(1.0, 2.0 * PI * ((a * k) % n) as f64 / n as f64);
    CMat::from_fn(n, n, |r, col| if col == (r + b) % n { w(r) } else { cr(0.0) })
}

fn pauli(i: usize) -> CMat {
    match i {
        1 => CMat::from_fn(2, 2, |r, c_| cr(if r != c_ { 1.0 } else { 0.0 })),
        2 => CMat::from_fn(2, 2, |r, c_| match (r, c_) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => cr(0.0),
        }),
        3 => CMat::diag(&[cr(1.0), cr(-1.0)]),
        _ => CMat::identity(2),
    }
}

/// `2m+1` pairwise anticommuting Hermitian unitaries on `ℂ^{2^m}`.
fn anticommuting_family(m: usize) -> Vec<CMat> {
    if m == 0 {
        return vec![CMat::identity(1)];
    }
    let rest = CMat::identity(1 << (m - 1));
    let mut out = vec![pauli(1).kron(&rest), pauli(2).kron(&rest)];
    out.extend(anticommuting_family(m - 1).iter().map(|g| pauli(3).kron(g)));
    out
}

/// Generators `τ̌₁..τ̌_{2m}` of the Clifford algebra `Cl_{2m} ≅ M_{2^m}`:
/// `σ₁⊗I` followed by `σ₃⊗g` for a `(2m−1)`-element anticommuting family.
/// For `m = 2` these are `σ₁⊗I, σ₃⊗σ₁, σ₃⊗σ₂, σ₃⊗σ₃`.
pub fn clifford_generators(m: usize) -> Vec<CMat> {
    let rest = CMat::identity(1 << (m - 1));
    let mut out = vec![pauli(1).kron(&rest)];
    let fam = anticommuting_family(m - 1);
    out.extend(fam.iter().map(|g| pauli(3).kron(g)));
    out
}

/// Ordered product of the Clifford generators selected by `mask`.
pub fn clifford_word(gens: &[CMat], mask: &[usize]) -> CMat {
    let n = gens[0].rows();
    let mut t = CMat::identity(n);
    for (g, &bit) in gens.iter().zip(mask) {
        if bit % 2 == 1 {
            t = &t * g;
        }
    }
    t
}

/// `Ad(τ) = τ ⊗ τ̄` acting on row-major vectorisations.
pub fn adjoint_action(tau: &CMat) -> CMat {
    tau.kron(&tau.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TwistedShape {
    /// `Z_n × Z_n` over `M_n`.
    Weyl(usize),
    /// `Z₂^{2m}` over `M_{2^m}`.
    Clifford(usize),
}

pub fn twisted_shape(group: &AbelianGroup) -> Result<TwistedShape> {
    let o = group.cycle_orders();
    if o.len() == 2 && o[0] == o[1] && o[0] >= 2 {
        return Ok(TwistedShape::Weyl(o[0]));
    }
    if o.len() >= 4 && o.len().is_multiple_of(2) && o.iter().all(|&n| n == 2) {
        return Ok(TwistedShape::Clifford(o.len() / 2));
    }
    Err(QglError::Validation(format!(
        "twisted Cayley needs Z_n x Z_n or Z_2^(2m), got {o:?}"
    )))
}

/// Twisted basis `{τ_μ}` indexed like the group elements.
fn twisted_basis(group: &AbelianGroup, shape: TwistedShape) -> Vec<CMat> {
    match shape {
        TwistedShape::Weyl(n) => (0..group.order())
            .map(|i| {
                let mu = group.element(i);
                weyl_operator(n, mu[0], mu[1])
            })
            .collect(),
        TwistedShape::Clifford(m) => {
            let gens = clifford_generators(m);
            (0..group.order()).map(|i| clifford_word(&gens, &group.element(i))).collect()
        }
    }
}

/// Images of the standard basis of `Z₂^{2m}` as Clifford words.
///
/// For `m = 2` this is `e₁ ↦ τ̌₁, e₂ ↦ τ̌₁τ̌₃, e₃ ↦ τ̌₃τ̌₄, e₄ ↦ τ̌₂τ̌₃`, the
/// labelling under which the Clebsch set yields the displayed 16Cl_q matrix.
/// Other `m` use the identity labelling.
pub fn clifford_labelling(m: usize) -> Vec<Vec<usize>> {
    if m == 2 {
        return vec![vec![1, 0, 0, 0], vec![1, 0, 1, 0], vec![0, 0, 1, 1], vec![0, 1, 1, 0]];
    }
    (0..2 * m)
        .map(|i| (0..2 * m).map(|j| usize::from(i == j)).collect())
        .collect()
}

fn relabel(x: &[usize], images: &[Vec<usize>]) -> Vec<usize> {
    let mut out = vec![0; x.len()];
    for (xi, img) in x.iter().zip(images) {
        if xi % 2 == 1 {
            for (o, b) in out.iter_mut().zip(img) {
                *o ^= b % 2;
            }
        }
    }
    out
}

/// `+1` when the Clifford words with masks `a` and `b` commute, else `−1`.
fn clifford_commutation(a: &[usize], b: &[usize]) -> f64 {
    let wa: usize = a.iter().sum();
    let wb: usize = b.iter().sum();
    let both: usize = a.iter().zip(b).map(|(x, y)| x * y).sum();
    if (wa * wb + both).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Fourier eigenvalue of the twisted Cayley graph on the basis vector `τ_μ`:
/// the connection set summed against the commutation character of the
/// twisted basis.
fn twisted_eigenvalue(shape: TwistedShape, s: &ConnectionSet, mu: &[usize]) -> C64 {
    match shape {
        TwistedShape::Weyl(n) => s
            .elements()
            .iter()
            .map(|x| {
                // τ_s τ_μ τ_s† = ω^{s₁μ₀ − s₀μ₁} τ_μ
                let k = (x[1] * mu[0] + (n - x[0]) * mu[1]) % n;
                C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
            })
            .sum(),
        TwistedShape::Clifford(m) => {
            let images = clifford_labelling(m);
            s.elements()
                .iter()
                .map(|x| cr(clifford_commutation(&relabel(x, &images), mu)))
                .sum()
        }
    }
}

/// Twisted Cayley graph: the Fourier eigenvalue `λ_μ` is placed on the
/// normalised twisted basis vector `vec(τ_μ)/√n` and the result is written in
/// matrix units.
pub fn twisted_cayley(group: &AbelianGroup, s: &ConnectionSet, tol: &Tolerance) -> Result<QuantumGraph> {
    let shape = twisted_shape(group)?;
    let n = match shape {
        TwistedShape::Weyl(n) => n,
        TwistedShape::Clifford(m) => 1 << m,
    };
    let basis = twisted_basis(group, shape);
    let d = n * n;
    let mut t = CMat::zeros(d, d);
    for (idx, tau) in basis.iter().enumerate() {
        let lam = twisted_eigenvalue(shape, s, &group.element(idx));
        let v = tau.data();
        for r in 0..d {
            if v[r] == cr(0.0) {
                continue;
            }
            for col in 0..d {
                t[(r, col)] += lam * v[r] * v[col].conj() / n as f64;
            }
        }
    }
    let qs = make_matrix_set(n)?;
    analyze_flags(&qs, &t, tol)
}

/// `Σ_{s∈S} Ad(τ_s)`: the twisted Cayley graph assembled from the operators
/// of the connection set instead of the Fourier side.
pub fn twisted_cayley_adjoint(group: &AbelianGroup, s: &ConnectionSet, tol: &Tolerance) -> Result<QuantumGraph> {
    let shape = twisted_shape(group)?;
    let (n, taus): (usize, Vec<CMat>) = match shape {
        TwistedShape::Weyl(n) => (n, s.elements().iter().map(|e| weyl_operator(n, e[0], e[1])).collect()),
        TwistedShape::Clifford(m) => {
            let gens = clifford_generators(m);
            let images = clifford_labelling(m);
            let taus = s.elements().iter().map(|e| clifford_word(&gens, &relabel(e, &images))).collect();
            (1 << m, taus)
        }
    };
    let mut t = CMat::zeros(n * n, n * n);
    for tau in &taus {
        t = &t + &adjoint_action(tau);
    }
    analyze_flags(&make_matrix_set(n)?, &t, tol)
}

/// `λ_{a,b} = 2Re(ω^a) + 2Re(ω^b) + 2Re(ω^{a−b})` for the Shrikhande data on
/// `Z₄×Z₄`.
pub fn shrikhande_eigenvalue(a: usize, b: usize) -> f64 {
    let re = |k: i64| (2.0 * PI * k as f64 / 4.0).cos();
    2.0 * re(a as i64) + 2.0 * re(b as i64) + 2.0 * re(a as i64 - b as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NamedGraph {
    A1M2,
    A2M2,
    A3M2,
    A4M2,
    G3,
    G4,
    G6,
    G7,
    NinePq,
    JM3,
    SixteenClq,
    ShrikhandeQ,
    ClassicalPaley9,
    ClassicalClebsch16,
    ClassicalShrikhande,
    ClassicalC4,
    ClassicalK33x3,
}

impl NamedGraph {
    pub const ALL: [NamedGraph; 17] = [
        NamedGraph::A1M2,
        NamedGraph::A2M2,
        NamedGraph::A3M2,
        NamedGraph::A4M2,
        NamedGraph::G3,
        NamedGraph::G4,
        NamedGraph::G6,
        NamedGraph::G7,
        NamedGraph::NinePq,
        NamedGraph::JM3,
        NamedGraph::SixteenClq,
        NamedGraph::ShrikhandeQ,
        NamedGraph::ClassicalPaley9,
        NamedGraph::ClassicalClebsch16,
        NamedGraph::ClassicalShrikhande,
        NamedGraph::ClassicalC4,
        NamedGraph::ClassicalK33x3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedGraph::A1M2 => "A1_M2",
            NamedGraph::A2M2 => "A2_M2",
            NamedGraph::A3M2 => "A3_M2",
            NamedGraph::A4M2 => "A4_M2",
            NamedGraph::G3 => "G3",
            NamedGraph::G4 => "G4",
            NamedGraph::G6 => "G6",
            NamedGraph::G7 => "G7",
            NamedGraph::NinePq => "NinePq",
            NamedGraph::JM3 => "J_M3",
            NamedGraph::SixteenClq => "SixteenClq",
            NamedGraph::ShrikhandeQ => "Shrikhande_q",
            NamedGraph::ClassicalPaley9 => "ClassicalPaley9",
            NamedGraph::ClassicalClebsch16 => "ClassicalClebsch16",
            NamedGraph::ClassicalShrikhande => "ClassicalShrikhande",
            NamedGraph::ClassicalC4 => "ClassicalC4",
            NamedGraph::ClassicalK33x3 => "ClassicalK33x3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            NamedGraph::A1M2 => "trivial reflexive graph on M2",
            NamedGraph::A2M2 => "reflexive graph on M2, two components",
            NamedGraph::A3M2 => "reflexive quantum square on M2",
            NamedGraph::A4M2 => "complete reflexive graph on M2",
            NamedGraph::G3 => "irreflexive graph on M3, k=2, disconnected",
            NamedGraph::G4 => "irreflexive graph on M3, k=3",
            NamedGraph::G6 => "complement of G4",
            NamedGraph::G7 => "complement of G3",
            NamedGraph::NinePq => "quantum 9-Paley graph on M3",
            NamedGraph::JM3 => "irreflexive complete graph on M3",
            NamedGraph::SixteenClq => "quantum 16-Clebsch graph on M4",
            NamedGraph::ShrikhandeQ => "quantum Shrikhande graph on M4",
            NamedGraph::ClassicalPaley9 => "Paley graph on 9 vertices",
            NamedGraph::ClassicalClebsch16 => "folded 5-cube, SRG(16,5,0,2)",
            NamedGraph::ClassicalShrikhande => "Shrikhande graph, SRG(16,6,2,2)",
            NamedGraph::ClassicalC4 => "4-cycle",
            NamedGraph::ClassicalK33x3 => "complete tripartite K_{3,3,3}",
        }
    }

    /// The displayed matrix carries `T̂* = −T̂` in the source data; the
    /// computed matrix satisfies `T̂* = T̂`.
    pub fn is_shrikhande_type(self) -> bool {
        self == NamedGraph::ShrikhandeQ
    }
}

impl fmt::Display for NamedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedGraph {
    type Err = QglError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        NamedGraph::ALL
            .into_iter()
            .find(|g| g.name().to_ascii_lowercase().replace('_', "") == key)
            .ok_or_else(|| QglError::Validation(format!("unknown graph name {s:?}")))
    }
}

fn rational_matrix<const N: usize>(rows: &[[i8; N]; N], den: i64) -> CMat {
    CMat::from_fn(N, N, |i, j| {
        cr(Q64::new(rows[i][j] as i64, den).to_f64().unwrap_or(f64::NAN))
    })
}

const A1: [[i8; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
const A2: [[i8; 4]; 4] = [[2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 2]];
const A3: [[i8; 4]; 4] = [[1, 0, 0, 2], [0, 1, 0, 0], [0, 0, 1, 0], [2, 0, 0, 1]];
const A4: [[i8; 4]; 4] = [[2, 0, 0, 2], [0, 0, 0, 0], [0, 0, 0, 0], [2, 0, 0, 2]];

const G3: [[i8; 9]; 9] = [
    [2, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2],
];

// G4 and G6 in halves
const G4_TWICE: [[i8; 9]; 9] = [
    [0, 0, 0, 0, 3, 0, 0, 0, 3],
    [0, 0, 0, 3, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 3, 0, 0],
    [0, 3, 0, 0, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 0, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, 0, 0, 3, 0],
    [0, 0, 3, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 3, 0, 0, 0],
    [3, 0, 0, 0, 3, 0, 0, 0, 0],
];

const G6_TWICE: [[i8; 9]; 9] = [
    [4, 0, 0, 0, 3, 0, 0, 0, 3],
    [0, -2, 0, -3, 0, 0, 0, 0, 0],
    [0, 0, -2, 0, 0, 0, -3, 0, 0],
    [0, -3, 0, -2, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 4, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, -2, 0, -3, 0],
    [0, 0, -3, 0, 0, 0, -2, 0, 0],
    [0, 0, 0, 0, 0, -3, 0, -2, 0],
    [3, 0, 0, 0, 3, 0, 0, 0, 4],
];

const G7: [[i8; 9]; 9] = [
    [0, 0, 0, 0, 3, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 0, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 3, 0, 0, 0, 0],
];

const NINE_PQ: [[i8; 9]; 9] = [
    [2, 0, 0, 0, 1, 0, 0, 0, 1],
    [0, -1, 0, 0, 0, 1, 1, 0, 0],
    [0, 0, -1, 1, 0, 0, 0, 1, 0],
    [0, 0, 1, -1, 0, 0, 0, 1, 0],
    [1, 0, 0, 0, 2, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, -1, 1, 0, 0],
    [0, 1, 0, 0, 0, 1, -1, 0, 0],
    [0, 0, 1, 1, 0, 0, 0, -1, 0],
    [1, 0, 0, 0, 1, 0, 0, 0, 2],
];

const J_M3: [[i8; 9]; 9] = [
    [2, 0, 0, 0, 3, 0, 0, 0, 3],
    [0, -1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0, 0],
    [3, 0, 0, 0, 2, 0, 0, 0, 3],
    [0, 0, 0, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -1, 0],
    [3, 0, 0, 0, 3, 0, 0, 0, 2],
];

const SIXTEEN_CL_Q: [[i8; 16]; 16] = [
    [2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, -2, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0],
    [1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0, 0, -2, 0, 0, 1, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 1, 0, 0, -2, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, -2, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2],
];

// (row, col, re, im)
const SHRIKHANDE_Q: [(usize, usize, i8, i8); 32] = [
    (0, 0, 2, 0), (0, 5, 2, 0), (0, 15, 2, 0),
    (1, 6, 1, 1), (1, 12, 1, -1),
    (2, 2, -2, 0),
    (3, 4, 1, -1), (3, 14, 1, 1),
    (4, 3, 1, 1), (4, 9, 1, -1),
    (5, 0, 2, 0), (5, 5, 2, 0), (5, 10, 2, 0),
    (6, 1, 1, -1), (6, 11, 1, 1),
    (7, 7, -2, 0),
    (8, 8, -2, 0),
    (9, 4, 1, 1), (9, 14, 1, -1),
    (10, 5, 2, 0), (10, 10, 2, 0), (10, 15, 2, 0),
    (11, 6, 1, -1), (11, 12, 1, 1),
    (12, 1, 1, 1), (12, 11, 1, -1),
    (13, 13, -2, 0),
    (14, 3, 1, -1), (14, 9, 1, 1),
    (15, 0, 2, 0), (15, 10, 2, 0), (15, 15, 2, 0),
];

/// Connection sets of the classical catalog entries and their twisted versions.
pub fn paley9_data() -> (AbelianGroup, ConnectionSet) {
    let g = AbelianGroup::new(&[3, 3]).expect("valid group");
    let s = ConnectionSet::new(&g, &[vec![1, 0], vec![2, 0], vec![0, 1], vec![0, 2]]).expect("symmetric");
    (g, s)
}

pub fn clebsch16_data() -> (AbelianGroup, ConnectionSet) {
    let g = AbelianGroup::new(&[2, 2, 2, 2]).expect("valid group");
    let s = ConnectionSet::new(
        &g,
        &[
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, 1, 1, 1],
        ],
    )
    .expect("symmetric");
    (g, s)
}

pub fn shrikhande_data() -> (AbelianGroup, ConnectionSet) {
    let g = AbelianGroup::new(&[4, 4]).expect("valid group");
    let s = ConnectionSet::new(
        &g,
        &[vec![1, 0], vec![3, 0], vec![0, 1], vec![0, 3], vec![1, 3], vec![3, 1]],
    )
    .expect("symmetric");
    (g, s)
}

fn c4_data() -> (AbelianGroup, ConnectionSet) {
    let g = AbelianGroup::new(&[4]).expect("valid group");
    let s = ConnectionSet::new(&g, &[vec![1], vec![3]]).expect("symmetric");
    (g, s)
}

fn k333_data() -> (AbelianGroup, ConnectionSet) {
    let g = AbelianGroup::new(&[3, 3]).expect("valid group");
    let s: Vec<Vec<usize>> = (1..3).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
    let s = ConnectionSet::new(&g, &s).expect("symmetric");
    (g, s)
}

/// Set and adjacency of a catalog entry, before any checks.
pub fn named_matrix(name: NamedGraph) -> Result<(QuantumSet, CMat)> {
    use NamedGraph::*;
    let classical = |(g, s): (AbelianGroup, ConnectionSet)| -> Result<(QuantumSet, CMat)> {
        Ok((make_classical_set(g.order())?, cayley_adjacency(&g, &s)))
    };
    match name {
        A1M2 => Ok((make_matrix_set(2)?, rational_matrix(&A1, 1))),
        A2M2 => Ok((make_matrix_set(2)?, rational_matrix(&A2, 1))),
        A3M2 => Ok((make_matrix_set(2)?, rational_matrix(&A3, 1))),
        A4M2 => Ok((make_matrix_set(2)?, rational_matrix(&A4, 1))),
        G3 => Ok((make_matrix_set(3)?, rational_matrix(&self::G3, 1))),
        G4 => Ok((make_matrix_set(3)?, rational_matrix(&G4_TWICE, 2))),
        G6 => Ok((make_matrix_set(3)?, rational_matrix(&G6_TWICE, 2))),
        G7 => Ok((make_matrix_set(3)?, rational_matrix(&self::G7, 1))),
        NinePq => Ok((make_matrix_set(3)?, rational_matrix(&NINE_PQ, 1))),
        JM3 => Ok((make_matrix_set(3)?, rational_matrix(&J_M3, 1))),
        SixteenClq => Ok((make_matrix_set(4)?, rational_matrix(&SIXTEEN_CL_Q, 1))),
        ShrikhandeQ => {
            let mut t = CMat::zeros(16, 16);
            for &(i, j, re, im) in &SHRIKHANDE_Q {
                t[(i, j)] = c(re as f64, im as f64);
            }
            Ok((make_matrix_set(4)?, t))
        }
        ClassicalPaley9 => classical(paley9_data()),
        ClassicalClebsch16 => classical(clebsch16_data()),
        ClassicalShrikhande => classical(shrikhande_data()),
        ClassicalC4 => classical(c4_data()),
        ClassicalK33x3 => classical(k333_data()),
    }
}

/// A catalog entry, verified to be a Schur idempotent.
pub fn named_graph(name: NamedGraph, tol: &Tolerance) -> Result<QuantumGraph> {
    let (qs, t) = named_matrix(name)?;
    analyze_flags(&qs, &t, tol)
}

pub fn named_graph_str(name: &str, tol: &Tolerance) -> Result<QuantumGraph> {
    named_graph(name.parse()?, tol)
}

/// Search for Schur idempotents with the given symmetric support.
///
/// Every support entry (tied to its transpose) becomes a real parameter.
/// Gauss–Newton runs from the constant grid points of `range` and from
/// seeded random grid points; converged points are snapped to fractions with
/// denominator at most 16, re-verified and deduplicated. Points on a
/// continuous solution family that do not snap are dropped.
pub fn search_schur_idempotent(
    pattern: &CMat,
    qs: &QuantumSet,
    range: (f64, f64),
    step: f64,
    tol: &Tolerance,
) -> Result<Vec<CMat>> {
    let d = qs.dim();
    if pattern.shape() != (d, d) {
        return Err(QglError::DimensionMismatch("pattern does not match the set".into()));
    }
    let (lo, hi) = range;
    if !(lo <= hi) || !(step > 0.0) {
        return Err(QglError::Validation("empty search range".into()));
    }
    let mut params: Vec<(usize, usize)> = Vec::new();
    for i in 0..d {
        for j in i..d {
            let a = pattern[(i, j)].norm() > 0.5;
            if a != (pattern[(j, i)].norm() > 0.5) {
                return Err(QglError::Validation("pattern support is not symmetric".into()));
            }
            if a {
                params.push((i, j));
            }
        }
    }
    let build = |p: &[f64]| -> CMat {
        let mut m = CMat::zeros(d, d);
        for (&(i, j), &v) in params.iter().zip(p) {
            m[(i, j)] = cr(v);
            m[(j, i)] = cr(v);
        }
        m
    };
    let residual = |m: &CMat| -> Result<CMat> { Ok(&schur_product(m, m, qs)? - m) };

    let grid: Vec<f64> = {
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| lo + k as f64 * step).collect()
    };
    let np = params.len();
    let mut starts: Vec<Vec<f64>> = grid.iter().map(|&v| vec![v; np]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    if np > 1 {
        for _ in 0..64 {
            starts.push((0..np).map(|_| *grid.choose(&mut rng).unwrap_or(&lo)).collect());
        }
    }

    let units: Vec<CMat> = (0..np).map(|k| {
        let mut p = vec![0.0; np];
        p[k] = 1.0;
        build(&p)
    }).collect();

    let mut found: BTreeMap<Vec<Q64>, CMat> = BTreeMap::new();
    for start in starts {
        let mut p = start;
        let mut r = residual(&build(&p))?;
        let mut rn = r.norm_fro();
        for _ in 0..80 {
            if rn < 1e-13 {
                break;
            }
            let m = build(&p);
            let jac: Vec<CMat> = units
                .iter()
                .map(|e| -> Result<CMat> {
                    Ok(&(&schur_product(e, &m, qs)? + &schur_product(&m, e, qs)?) - e)
                })
                .collect::<Result<_>>()?;
            let gram = CMat::from_fn(np, np, |a, b| cr(jac[a].inner(&jac[b]).re));
            let h: Vec<C64> = jac.iter().map(|j| cr(-j.inner(&r).re)).collect();
            let (dx, _) = gram_solve(&gram, &h, 1e-14, tol)?;
            let mut alpha = 1.0;
            let mut improved = false;
            for _ in 0..12 {
                let trial: Vec<f64> = p.iter().zip(&dx).map(|(x, s)| x + alpha * s.re).collect();
                let rt = residual(&build(&trial))?;
                let rtn = rt.norm_fro();
                if rtn < rn {
                    p = trial;
                    r = rt;
                    rn = rtn;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if rn > 1e-9 {
            continue;
        }
        let snapped: Option<Vec<Q64>> = p
            .iter()
            .map(|&x| snap_rational(x, MAX_DENOMINATOR, 1e-3))
            .collect();
        let Some(key) = snapped else { continue };
        if found.contains_key(&key) {
            continue;
        }
        let vals: Vec<f64> = key.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
        let m = build(&vals);
        if residual(&m)?.norm_fro() <= 1e-9 && analyze_flags(qs, &m, tol).is_ok() {
            found.insert(key, m);
        }
    }
    Ok(found.into_values().collect())
}

/// Weyl index `j = b·n + a` of `τ₁^a τ₂^b`.
pub fn weyl_index(n: usize, a: usize, b: usize) -> usize {
    b * n + a
}

/// Fourier transform of a diagonal 0/1 projection on `M_n`:
/// `p ↦ c·Σ_j p_j Ad(τ_j)` with the Weyl index `j = b·n + a` and `c` the
/// scalar that makes the result a Schur idempotent.
pub fn qft_of_projection(p: &CMat, qs: &QuantumSet, tol: &Tolerance) -> Result<QuantumGraph> {
    if qs.blocks().len() != 1 {
        return Err(QglError::Validation("Fourier transform is defined on a single matrix block".into()));
    }
    let n = qs.blocks()[0];
    let d = n * n;
    if p.shape() != (d, d) {
        return Err(QglError::DimensionMismatch(format!("projection must be {d}x{d}")));
    }
    for i in 0..d {
        for j in 0..d {
            let v = p[(i, j)];
            let ok = if i == j {
                v.norm() <= tol.abs_eps || (v - cr(1.0)).norm() <= tol.abs_eps
            } else {
                v.norm() <= tol.abs_eps
            };
            if !ok {
                return Err(QglError::Validation("input is not a diagonal 0/1 projection".into()));
            }
        }
    }
    let mut t = CMat::zeros(d, d);
    for a in 0..n {
        for b in 0..n {
            if p[(weyl_index(n, a, b), weyl_index(n, a, b))].re > 0.5 {
                t = &t + &adjoint_action(&weyl_operator(n, a, b));
            }
        }
    }
    let sq = schur_product(&t, &t, qs)?;
    let den = t.inner(&sq).re;
    if den.abs() > 0.0 {
        t = t.scale(cr(t.inner(&t).re / den));
    }
    analyze_flags(qs, &t, tol)
        .map_err(|_| QglError::Validation("transform is not a Schur idempotent for this projection".into()))
}

/// `true` when two real spectra agree with multiplicity.
pub fn same_spectrum(a: &CMat, b: &CMat, tol: &Tolerance) -> Result<bool> {
    let ea = eigh(a, tol)?;
    let eb = eigh(b, tol)?;
    Ok(spectra_match(&ea.values, &eb.values, tol))
}

/// Spectrum as `(value, multiplicity)` pairs.
pub fn spectrum_with_multiplicity(a: &CMat, tol: &Tolerance) -> Result<Vec<(f64, usize)>> {
    let e = eigh(a, tol)?;
    Ok(cluster_eigenvalues(&e.values, tol)
        .into_iter()
        .map(|(v, idx)| (v, idx.len()))
        .collect())
}

/// Entrywise agreement of two operators at the operator tolerance.
pub fn matrices_agree(a: &CMat, b: &CMat, tol: &Tolerance) -> bool {
    a.shape() == b.shape() && op_close(a, b, tol).1
}
