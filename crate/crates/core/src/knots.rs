//! Braid words, the spin-model braid representation and closure invariants.
//!
//! Strands `1..=n` are grouped in pairs: `σ_odd` acts on one tensor factor
//! by `W₊`, `σ_even` straddles two neighbouring factors through the
//! `m`-sandwich of `W₋`. A word on `n` strands acts on `ℓ²(X)^{⊗⌈n/2⌉}`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QglError, Result};
use crate::spin::{sandwich, SpinModel};
use crate::tensor_core::Tolerance;
use crate::{cr, CMat, C64};

/// Largest factor-space dimension (the operators then stay below 10⁶ entries).
pub const MAX_SPACE_DIM: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(QglError::Validation("a braid needs at least one strand".into()));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(QglError::Validation(format!("generator {l} out of range for {strands} strands")));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses `"s1 -s2 s1"`; the strand count is one more than the largest
    /// index unless `strands` is given.
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let (sign, rest) = match tok.strip_prefix('-') {
                Some(r) => (-1, r),
                None => (1, tok),
            };
            let idx = rest
                .strip_prefix('s')
                .or_else(|| rest.strip_prefix('σ'))
                .ok_or_else(|| QglError::Validation(format!("bad braid letter {tok:?}")))?;
            let i: i32 = idx
                .parse()
                .map_err(|_| QglError::Validation(format!("bad braid letter {tok:?}")))?;
            letters.push(sign * i);
        }
        let needed = letters.iter().map(|l| l.unsigned_abs() as usize + 1).max().unwrap_or(1);
        Self::new(strands.unwrap_or(needed).max(needed), letters)
    }

    pub fn writhe(&self) -> i32 {
        self.letters.iter().map(|l| l.signum()).sum()
    }

    pub fn inverse(&self) -> Self {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands.max(other.strands), letters }
    }

    /// Cancels adjacent `σᵢσᵢ⁻¹` pairs.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord { strands: self.strands, letters: out }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if *l < 0 { format!("-s{}", -l) } else { format!("s{l}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = QglError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}

/// Named closures used throughout the tests and CLI.
pub fn standard_braid(name: &str) -> Option<BraidWord> {
    let (n, w): (usize, &[i32]) = match name {
        "unknot" => (2, &[1]),
        "unlink2" => (2, &[]),
        "hopf" => (2, &[1, 1]),
        "trefoil" => (2, &[1, 1, 1]),
        "figure-eight" => (3, &[1, -2, 1, -2]),
        "solomon" => (2, &[1, 1, 1, 1]),
        "cinquefoil" => (2, &[1, 1, 1, 1, 1]),
        _ => return None,
    };
    Some(BraidWord { strands: n, letters: w.to_vec() })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResiduals {
    pub inverse: f64,
    pub braid: f64,
    pub far_commutation: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.inverse.max(self.braid).max(self.far_commutation)
    }
}

/// Nonzero entries `(row, col, value)` of a local generator image.
#[derive(Clone, Debug)]
struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn new(m: &CMat) -> Self {
        let cutoff = 1e-15 * m.norm_fro();
        let mut entries = Vec::new();
        for o in 0..m.rows() {
            for i in 0..m.cols() {
                if m[(o, i)].norm() > cutoff {
                    entries.push((o, i, m[(o, i)]));
                }
            }
        }
        SparseOp { dim: m.rows(), entries }
    }

    fn apply_at(&self, v: &[C64], left: usize, right: usize) -> Vec<C64> {
        let mut out = vec![cr(0.0); v.len()];
        for l in 0..left {
            let base = l * self.dim;
            for &(o, i, w) in &self.entries {
                let (dst, src) = ((base + o) * right, (base + i) * right);
                for r in 0..right {
                    out[dst + r] += w * v[src + r];
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BraidRep {
    pub model: SpinModel,
    pub strands: usize,
    r1_plus: SparseOp,
    r1_minus: SparseOp,
    r2_plus: SparseOp,
    r2_minus: SparseOp,
    /// `c_w` in `Z = c_w^w · c_t^{n−1} · tr(ρ(β))`.
    pub c_writhe: C64,
    pub c_trace: C64,
    pub relations: RelationResiduals,
}

fn factors(strands: usize) -> usize {
    strands.div_ceil(2)
}

/// Representation on up to `strands` strands, with the relations checked
/// to `tol` and the Markov constants calibrated.
pub fn braid_rep(model: &SpinModel, strands: usize, tol: &Tolerance) -> Result<BraidRep> {
    let rep = BraidRep::unverified(model, strands)?;
    if rep.relations.max() > tol.abs_eps {
        return Err(QglError::Numerical(format!(
            "braid relations fail: residual {:.3e}",
            rep.relations.max()
        )));
    }
    Ok(rep)
}

impl BraidRep {
    /// Builds the generator images without rejecting a bad model; the
    /// relation residuals are still recorded.
    pub fn unverified(model: &SpinModel, strands: usize) -> Result<Self> {
        let n = model.set.dim();
        if !(1..=5).contains(&strands) {
            return Err(QglError::Validation(format!("strand count {strands} outside 1..=5")));
        }
        let space = n.checked_pow(factors(strands) as u32).unwrap_or(usize::MAX);
        if space > MAX_SPACE_DIM {
            return Err(QglError::Validation(format!(
                "{strands} strands over a dimension-{n} set need a {space}-dimensional space"
            )));
        }
        let d = model.d;
        if d.norm() == 0.0 {
            return Err(QglError::Validation("loop value d is zero".into()));
        }
        let delta_sq = model.set.delta_sq();
        let mut rep = BraidRep {
            model: model.clone(),
            strands,
            r1_plus: SparseOp::new(&model.w_plus),
            r1_minus: SparseOp::new(&model.w_minus.scale((d * d).inv())),
            r2_plus: SparseOp::new(&sandwich(&model.set, &model.w_minus, d / delta_sq)),
            r2_minus: SparseOp::new(&sandwich(&model.set, &model.w_plus, (d * delta_sq).inv())),
            c_writhe: cr(1.0),
            c_trace: cr(1.0),
            relations: RelationResiduals { inverse: 0.0, braid: 0.0, far_commutation: 0.0 },
        };
        rep.relations = rep.relation_residuals();
        let tau_plus = rep.normalized_trace(&BraidWord { strands: 2, letters: vec![1] })?;
        let tau_minus = rep.normalized_trace(&BraidWord { strands: 2, letters: vec![-1] })?;
        let prod = tau_plus * tau_minus;
        if prod.norm() < 1e-12 {
            return Err(QglError::Numerical("closure of σ₁^{±1} vanishes; cannot calibrate".into()));
        }
        rep.c_trace = prod.sqrt().inv();
        rep.c_writhe = (rep.c_trace * tau_plus).inv();
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.model.set.dim()
    }

    fn apply_letter(&self, letter: i32, v: &[C64], f: usize) -> Vec<C64> {
        let n = self.dim();
        let i = letter.unsigned_abs() as usize;
        if i % 2 == 1 {
            let j = (i - 1) / 2;
            let op = if letter > 0 { &self.r1_plus } else { &self.r1_minus };
            op.apply_at(v, n.pow(j as u32), n.pow((f - j - 1) as u32))
        } else {
            let j = i / 2 - 1;
            let op = if letter > 0 { &self.r2_plus } else { &self.r2_minus };
            op.apply_at(v, n.pow(j as u32), n.pow((f - j - 2) as u32))
        }
    }

    fn check_word(&self, beta: &BraidWord) -> Result<()> {
        if beta.strands > self.strands {
            return Err(QglError::Validation(format!(
                "word has {} strands, representation has {}",
                beta.strands, self.strands
            )));
        }
        Ok(())
    }

    /// `ρ(β)v` with `ρ(σ_{i₁}⋯σ_{i_k}) = ρ(σ_{i₁})⋯ρ(σ_{i_k})`.
    pub fn apply(&self, beta: &BraidWord, v: &[C64]) -> Result<Vec<C64>> {
        self.check_word(beta)?;
        let f = factors(beta.strands);
        let mut out = v.to_vec();
        for &l in beta.letters.iter().rev() {
            out = self.apply_letter(l, &out, f);
        }
        Ok(out)
    }

    pub fn operator(&self, beta: &BraidWord) -> Result<CMat> {
        let space = self.dim().pow(factors(beta.strands) as u32);
        let mut out = CMat::zeros(space, space);
        let mut e = vec![cr(0.0); space];
        for col in 0..space {
            e[col] = cr(1.0);
            out.set_col(col, &self.apply(beta, &e)?);
            e[col] = cr(0.0);
        }
        Ok(out)
    }

    /// `tr(ρ(β)) / N^{⌈n/2⌉}`.
    pub fn normalized_trace(&self, beta: &BraidWord) -> Result<C64> {
        self.check_word(beta)?;
        let space = self.dim().pow(factors(beta.strands) as u32);
        let mut e = vec![cr(0.0); space];
        let mut sum = cr(0.0);
        for col in 0..space {
            e[col] = cr(1.0);
            sum += self.apply(beta, &e)?[col];
            e[col] = cr(0.0);
        }
        Ok(sum / space as f64)
    }

    fn relation_residuals(&self) -> RelationResiduals {
        let strands = self.strands.max(2);
        let space = self.dim().pow(factors(strands) as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let probes: Vec<Vec<C64>> = (0..3)
            .map(|_| (0..space).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let word = |l: &[i32]| BraidWord { strands, letters: l.to_vec() };
        let gap = |a: &BraidWord, b: &BraidWord| -> f64 {
            probes
                .iter()
                .map(|v| {
                    let (x, y) = (self.apply(a, v).unwrap(), self.apply(b, v).unwrap());
                    let diff: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
                    let scale: f64 = x.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt().max(1.0);
                    diff / scale
                })
                .fold(0.0, f64::max)
        };
        let top = strands as i32 - 1;
        let mut r = RelationResiduals { inverse: 0.0, braid: 0.0, far_commutation: 0.0 };
        for i in 1..=top {
            r.inverse = r.inverse.max(gap(&word(&[i, -i]), &word(&[]))).max(gap(&word(&[-i, i]), &word(&[])));
            if i < top {
                r.braid = r.braid.max(gap(&word(&[i, i + 1, i]), &word(&[i + 1, i, i + 1])));
            }
            for j in i + 2..=top {
                r.far_commutation = r.far_commutation.max(gap(&word(&[i, j]), &word(&[j, i])));
            }
        }
        r
    }
}

/// `Z(β) = c_w^{w(β)} · c_t^{n−1} · tr(ρ(β))/N^{⌈n/2⌉}`; `Z(σ₁ ∈ B₂) = 1` and
/// `Z(∅ ∈ B₁) = 1` by construction.
pub fn evaluate_link(rep: &BraidRep, beta: &BraidWord) -> Result<C64> {
    let tr = rep.normalized_trace(beta)?;
    Ok(rep.c_writhe.powi(beta.writhe()) * rep.c_trace.powi(beta.strands as i32 - 1) * tr)
}

#[derive(Clone, Debug, Serialize)]
pub struct WordCheck {
    pub word: String,
    pub z: C64,
    pub conjugation: f64,
    pub cancel_pair: f64,
    pub braid_rewrite: f64,
    pub free_reduction: f64,
    /// `None` when the stabilised word exceeds the strand budget.
    pub stabilization: Option<f64>,
}

impl WordCheck {
    pub fn max_residual(&self) -> f64 {
        [self.conjugation, self.cancel_pair, self.braid_rewrite, self.free_reduction, self.stabilization.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovReport {
    pub words: Vec<WordCheck>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Rewrites the first `σᵢσᵢ₊₁σᵢ` to `σᵢ₊₁σᵢσᵢ₊₁`; without one, splices in
/// the trivial word `σ₁σ₂σ₁(σ₂σ₁σ₂)⁻¹` at `at`.
fn braid_rewrite(beta: &BraidWord, at: usize) -> BraidWord {
    let l = &beta.letters;
    for k in 0..l.len().saturating_sub(2) {
        let (a, b, c) = (l[k], l[k + 1], l[k + 2]);
        if a == c && a.signum() == b.signum() && (a.abs() - b.abs()).abs() == 1 {
            let mut out = l.clone();
            out[k] = b;
            out[k + 1] = a;
            out[k + 2] = b;
            return BraidWord { strands: beta.strands, letters: out };
        }
    }
    let mut out = l.clone();
    let at = at.min(out.len());
    out.splice(at..at, [1, 2, 1, -2, -1, -2]);
    BraidWord { strands: beta.strands.max(3), letters: out }
}

/// Seeded random words in `B_strands`.
pub fn random_words(strands: usize, count: usize, max_len: usize, seed: u64) -> Vec<BraidWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let letters = (0..len)
                .map(|_| {
                    let i = rng.gen_range(1..strands as i32);
                    if rng.gen_bool(0.5) {
                        i
                    } else {
                        -i
                    }
                })
                .collect();
            BraidWord { strands, letters }
        })
        .collect()
}

/// Conjugation, `σᵢσᵢ⁻¹` insertion, braid rewrites, free reduction and
/// (within the strand budget) stabilisation, on `count` random words of
/// length at most 8 in `B₃`.
pub fn markov_invariance_suite(rep: &BraidRep, count: usize, seed: u64, tol: &Tolerance) -> Result<MarkovReport> {
    let strands = 3.min(rep.strands).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d61726b);
    let mut words = Vec::new();
    for beta in random_words(strands, count, 8, seed) {
        let z = evaluate_link(rep, &beta)?;
        let gap = |other: &BraidWord| -> Result<f64> { Ok((evaluate_link(rep, other)? - z).norm() / z.norm().max(1.0)) };
        let g = rng.gen_range(1..strands as i32) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let gamma = BraidWord { strands, letters: vec![g] };
        let conj = gamma.concat(&beta).concat(&gamma.inverse());
        let mut inserted = beta.letters.clone();
        let at = rng.gen_range(0..=inserted.len());
        let i = rng.gen_range(1..strands as i32);
        inserted.splice(at..at, [i, -i]);
        let inserted = BraidWord { strands, letters: inserted };
        let rewritten = braid_rewrite(&beta, rng.gen_range(0..=beta.letters.len()));
        let stabilization = if strands < rep.strands {
            let n = strands as i32;
            let up = BraidWord { strands: strands + 1, letters: [beta.letters.clone(), vec![n]].concat() };
            let down = BraidWord { strands: strands + 1, letters: [beta.letters.clone(), vec![-n]].concat() };
            Some(gap(&up)?.max(gap(&down)?))
        } else {
            None
        };
        words.push(WordCheck {
            word: beta.to_string(),
            z,
            conjugation: gap(&conj)?,
            cancel_pair: gap(&inserted)?,
            braid_rewrite: if rewritten.strands <= rep.strands { gap(&rewritten)? } else { 0.0 },
            free_reduction: gap(&inserted.free_reduce())?,
            stabilization,
        });
    }
    let max_residual = words.iter().map(WordCheck::max_residual).fold(0.0, f64::max);
    Ok(MarkovReport { words, max_residual, pass: max_residual <= tol.abs_eps })
}
