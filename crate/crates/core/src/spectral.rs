//! Finite-depth brackets for the extremal exponents, from product norms and
//! periodic orbits, plus the inverse and determinant-normalising transforms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{words_of_length, Cocycle, ScaledMat};
use crate::error::{CocycleError, Result};
use crate::geom2::{mininorm, op_norm, spectral_radius, Mat2};

/// Largest number of products any exhaustive enumeration may visit.
pub const MAX_PRODUCTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
}

impl ExponentBracket {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// Extremes over all words of one length.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LevelStats {
    max_norm: f64,
    min_norm: f64,
    max_mini: f64,
    min_mini: f64,
    max_rho_hi: f64,
    min_rho_hi: f64,
    max_rho_lo: f64,
    min_rho_lo: f64,
    min_ncf: f64,
}

impl LevelStats {
    fn empty() -> Self {
        let (n, p) = (f64::NEG_INFINITY, f64::INFINITY);
        Self { max_norm: n, min_norm: p, max_mini: n, min_mini: p, max_rho_hi: n, min_rho_hi: p, max_rho_lo: n, min_rho_lo: p, min_ncf: p }
    }

    /// Records one product; all values are logs, not yet divided by length.
    fn push(&mut self, p: ScaledMat) {
        let s = p.log_scale;
        let norm = op_norm(p.m).ln() + s;
        let det = p.m.det().abs().ln() + 2.0 * s;
        let mini = det - norm;
        let hi = spectral_radius(p.m).ln() + s;
        let lo = det - hi;
        self.max_norm = self.max_norm.max(norm);
        self.min_norm = self.min_norm.min(norm);
        self.max_mini = self.max_mini.max(mini);
        self.min_mini = self.min_mini.min(mini);
        self.max_rho_hi = self.max_rho_hi.max(hi);
        self.min_rho_hi = self.min_rho_hi.min(hi);
        self.max_rho_lo = self.max_rho_lo.max(lo);
        self.min_rho_lo = self.min_rho_lo.min(lo);
        self.min_ncf = self.min_ncf.min(norm - mini);
    }

    fn merge(&mut self, o: &LevelStats) {
        self.max_norm = self.max_norm.max(o.max_norm);
        self.min_norm = self.min_norm.min(o.min_norm);
        self.max_mini = self.max_mini.max(o.max_mini);
        self.min_mini = self.min_mini.min(o.min_mini);
        self.max_rho_hi = self.max_rho_hi.max(o.max_rho_hi);
        self.min_rho_hi = self.min_rho_hi.min(o.min_rho_hi);
        self.max_rho_lo = self.max_rho_lo.max(o.max_rho_lo);
        self.min_rho_lo = self.min_rho_lo.min(o.min_rho_lo);
        self.min_ncf = self.min_ncf.min(o.min_ncf);
    }
}

fn count_products(k: usize, n: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut level: usize = 1;
    for _ in 0..n {
        level = level.checked_mul(k)?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

fn dfs(c: &Cocycle, p: ScaledMat, depth: usize, n: usize, stats: &mut [LevelStats]) {
    if depth == n {
        return;
    }
    for &a in c.mats() {
        let q = p.left_mul(a);
        stats[depth].push(q);
        dfs(c, q, depth + 1, n, stats);
    }
}

/// Statistics for every length `1..=n`, visiting each product once.
fn level_stats(c: &Cocycle, n: usize) -> Result<Vec<LevelStats>> {
    let k = c.k();
    match count_products(k, n) {
        Some(t) if t <= MAX_PRODUCTS => {}
        _ => {
            return Err(CocycleError::Budget(format!(
                "{k}^{n} products exceed the enumeration cap of {MAX_PRODUCTS}"
            )))
        }
    }
    // Split into independent subtrees below a short prefix.
    let mut split = 0;
    while split < n && k.pow(split as u32) < 256 {
        split += 1;
    }
    let mut stats = vec![LevelStats::empty(); n];
    for len in 1..=split {
        for w in words_of_length(k, len) {
            stats[len - 1].push(c.scaled_product(&w));
        }
    }
    if split < n {
        let prefixes = words_of_length(k, split);
        let parts: Vec<Vec<LevelStats>> = prefixes
            .par_iter()
            .map(|w| {
                let mut local = vec![LevelStats::empty(); n];
                dfs(c, c.scaled_product(w), split, n, &mut local);
                local
            })
            .collect();
        for part in &parts {
            for (s, o) in stats.iter_mut().zip(part) {
                s.merge(o);
            }
        }
    }
    Ok(stats)
}

/// Bracket for the joint spectral radius exponent `λ₁^⊤`.
///
/// The lower end is the best periodic exponent over words of length at most
/// `n`; the upper end is the best norm bound `(1/j) log max |P|` over `j ≤ n`.
pub fn jsr_bracket(c: &Cocycle, n: usize) -> Result<ExponentBracket> {
    if n == 0 {
        return Err(CocycleError::Domain("depth must be positive".into()));
    }
    let stats = level_stats(c, n)?;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for (j, s) in stats.iter().enumerate() {
        let len = (j + 1) as f64;
        lower = lower.max(s.max_rho_hi / len);
        upper = upper.min(s.max_norm / len);
    }
    Ok(ExponentBracket { lower, upper, depth: n })
}

/// Width of the beam used once exhaustive enumeration would exceed the cap.
const BEAM_WIDTH: usize = 1 << 16;

/// Upper bound for the joint spectral subradius exponent `λ₁^⊥`, non-increasing in `n`.
///
/// Every candidate value is realised by an actual word, so the bound stays
/// valid when the search is restricted. Up to the product cap all words are
/// visited; beyond it a beam keeps the products of smallest norm at each
/// length.
pub fn jssr_upper(c: &Cocycle, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(CocycleError::Domain("depth must be positive".into()));
    }
    match level_stats(c, n) {
        Ok(stats) => Ok(stats
            .iter()
            .enumerate()
            .map(|(j, s)| s.min_norm.min(s.min_rho_hi) / (j + 1) as f64)
            .fold(f64::INFINITY, f64::min)),
        Err(CocycleError::Budget(_)) => Ok(jssr_upper_beam(c, n)),
        Err(e) => Err(e),
    }
}

fn jssr_upper_beam(c: &Cocycle, n: usize) -> f64 {
    let mut beam = vec![ScaledMat::identity()];
    let mut best = f64::INFINITY;
    for j in 1..=n {
        let mut next: Vec<(f64, ScaledMat)> = beam
            .iter()
            .flat_map(|p| c.mats().iter().map(move |&a| p.left_mul(a)))
            .map(|q| (q.log_norm(), q))
            .collect();
        for (ln, q) in &next {
            let hi = spectral_radius(q.m).ln() + q.log_scale;
            best = best.min(ln.min(hi) / j as f64);
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        next.truncate(BEAM_WIDTH);
        beam = next.into_iter().map(|(_, q)| q).collect();
    }
    best
}

/// Bracket for an extremal second exponent `λ₂^⋆`.
///
/// For `Bottom` both ends come from finite data. For `Top` the lower end is
/// the best of the superadditive mininorm term and periodic values; the upper
/// end uses `λ₂ ≤ λ₁` and `λ₂ ≤ ½ ∫ log |det|`.
pub fn lambda2_bracket(c: &Cocycle, n: usize, top: bool) -> Result<ExponentBracket> {
    if n == 0 {
        return Err(CocycleError::Domain("depth must be positive".into()));
    }
    let stats = level_stats(c, n)?;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for (j, s) in stats.iter().enumerate() {
        let len = (j + 1) as f64;
        if top {
            lower = lower.max(s.max_mini / len).max(s.max_rho_lo / len);
            upper = upper.min(s.max_norm / len);
        } else {
            lower = lower.max(s.min_mini / len);
            upper = upper.min(s.min_rho_lo / len);
        }
    }
    if top {
        let half_det = c.mats().iter().map(|m| 0.5 * m.det().abs().ln()).fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(half_det);
    }
    Ok(ExponentBracket { lower, upper, depth: n })
}

/// `min log(|P| / m(P))` over all words of length exactly `n`.
pub(crate) fn min_log_conformality(c: &Cocycle, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(CocycleError::Domain("length must be positive".into()));
    }
    Ok(level_stats(c, n)?[n - 1].min_ncf)
}

/// `(1/|w|) log ρ(A^{(|w|)})` for the periodic orbit of `w`.
pub fn periodic_exponent(c: &Cocycle, w: &[usize]) -> Result<f64> {
    if w.is_empty() {
        return Err(CocycleError::Domain("periodic word must be nonempty".into()));
    }
    let p = c.scaled_product(w);
    Ok((spectral_radius(p.m).ln() + p.log_scale) / w.len() as f64)
}

/// `B_i = A_i⁻¹`; exchanges `λ₂^⊤(A) = −λ₁^⊥(B)` and `λ₂^⊥(A) = −λ₁^⊤(B)`.
pub fn inverse_cocycle(c: &Cocycle) -> Cocycle {
    crate::multicone::inverse_cocycle_of(c)
}

/// `C_i = |det A_i|^{-1/2} A_i`; then `λ₁ − λ₂ = 2 λ₁(C)` along any orbit.
pub fn normalize_cocycle(c: &Cocycle) -> Cocycle {
    let mats = c.mats().iter().map(|m| m.scale(m.det().abs().powf(-0.5))).collect();
    Cocycle::new(mats).expect("normalised generators have unit determinant")
}

/// `|P| / m(P)` for a product; equals `|P_norm|²` after normalisation.
pub fn conformality_ratio(p: Mat2) -> Result<f64> {
    Ok(op_norm(p) / mininorm(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub mode: crate::cocycle::Mode,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}
