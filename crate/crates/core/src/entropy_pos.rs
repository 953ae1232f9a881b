//! Unit-determinant cocycles with many bounded products: elliptic words,
//! contraction schemes, the bounded-products lemma and the resulting
//! positive-entropy words.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{words_of_length, Cocycle, Word};
use crate::error::{CocycleError, Result};
use crate::geom2::{mininorm, op_norm, singular_values, top_singular, wrap_pi, Mat2, Vec2};

const DET_TOL: f64 = 1e-9;

fn check_unit(m: Mat2) -> Result<()> {
    if (m.det() - 1.0).abs() > DET_TOL {
        return Err(CocycleError::Domain(format!("determinant {} is not 1", m.det())));
    }
    Ok(())
}

fn check_unit_cocycle(c: &Cocycle) -> Result<()> {
    c.mats().iter().try_for_each(|&m| check_unit(m))
}

pub fn is_elliptic(m: Mat2) -> Result<bool> {
    check_unit(m)?;
    Ok(m.trace().abs() < 2.0)
}

/// Shortest word (lexicographically first among those) with elliptic product.
pub fn find_elliptic_product(c: &Cocycle, max_len: usize) -> Result<Option<Word>> {
    check_unit_cocycle(c)?;
    for n in 1..=max_len {
        if let Some(w) = words_of_length(c.k(), n).into_iter().find(|w| c.product(w).trace().abs() < 2.0) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// For every direction cell of P¹, a word of length `ℓ − 1` contracting the whole
/// cell below `κ / C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionScheme {
    pub grid_size: usize,
    pub words: Vec<Word>,
    /// Largest generator norm.
    pub c: f64,
    pub kappa: f64,
    pub ell: usize,
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    #[serde(rename = "C")]
    pub c: f64,
    pub kappa: f64,
    pub ell: usize,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub grid_size: usize,
    pub coverage_fraction: f64,
}

impl ContractionScheme {
    pub fn cell_width(&self) -> f64 {
        PI / self.grid_size as f64
    }

    pub fn cell_of(&self, theta: f64) -> usize {
        ((wrap_pi(theta) / self.cell_width()) as usize).min(self.grid_size - 1)
    }

    pub fn summary(&self) -> SchemeSummary {
        SchemeSummary { c: self.c, kappa: self.kappa, ell: self.ell, c1: self.c1, grid_size: self.grid_size, coverage_fraction: 1.0 }
    }
}

/// Exact maximum of `|P u|` over unit `u` with angle in `[a, b]`: the squared
/// norm is a sinusoid in `2θ`, so the maximum sits at an endpoint or at the top
/// right singular direction.
fn max_norm_on_cell(p: Mat2, a: f64, b: f64) -> f64 {
    let ends = p.apply(Vec2::from_angle(a)).norm().max(p.apply(Vec2::from_angle(b)).norm());
    let (s, u, _) = top_singular(p);
    let phi = u.proj_angle();
    if crate::geom2::ccw_dist(a, phi) <= b - a {
        ends.max(s)
    } else {
        ends
    }
}

/// Fraction of cells covered by words of length exactly `len`, and the words.
fn cover(c: &Cocycle, grid_size: usize, len: usize, bound: f64) -> (usize, Vec<Option<Word>>) {
    let words = words_of_length(c.k(), len);
    let prods: Vec<Mat2> = words.iter().map(|w| c.product(w)).collect();
    let h = PI / grid_size as f64;
    let found: Vec<Option<Word>> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            prods
                .iter()
                .enumerate()
                .map(|(i, &p)| (i, max_norm_on_cell(p, a, b)))
                .filter(|&(_, n)| n < bound)
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(i, _)| words[i].clone())
        })
        .collect();
    (found.iter().filter(|w| w.is_some()).count(), found)
}

/// Best coverage fraction reached by any single word length up to `max_len`.
pub fn scheme_coverage(c: &Cocycle, grid_size: usize, max_len: usize, kappa: f64) -> Result<f64> {
    check_unit_cocycle(c)?;
    let bound = kappa / c.max_norm();
    Ok((1..=max_len).map(|n| cover(c, grid_size, n, bound).0).max().unwrap_or(0) as f64 / grid_size as f64)
}

/// Contraction scheme with uniform word length, or `None` if no length up to
/// `max_len` covers every cell.
pub fn class_c_scheme(c: &Cocycle, grid_size: usize, max_len: usize, kappa: f64) -> Result<Option<ContractionScheme>> {
    check_unit_cocycle(c)?;
    if !(kappa > 0.0 && kappa < 1.0) || grid_size == 0 {
        return Err(CocycleError::Domain("need 0 < kappa < 1 and a nonempty grid".into()));
    }
    let big_c = c.max_norm();
    if big_c <= 1.0 {
        return Ok(None);
    }
    for len in 1..=max_len {
        let (n, found) = cover(c, grid_size, len, kappa / big_c);
        if n == grid_size {
            let ell = len + 1;
            let c1 = 2f64.sqrt() * big_c.powi(ell as i32) / (1.0 - kappa * kappa).sqrt();
            return Ok(Some(ContractionScheme {
                grid_size,
                words: found.into_iter().map(|w| w.expect("all cells covered")).collect(),
                c: big_c,
                kappa,
                ell,
                c1,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LemmaOutcome {
    Holds,
    /// A hypothesis fails at step `index`; the lemma says nothing.
    HypothesisFailure { index: usize },
    /// Hypotheses hold but the bound fails: an implementation bug.
    ConclusionFailure { index: usize, norm: f64, bound: f64 },
}

/// Check the bounded-products lemma along `bs`, with `P_i = B_{i−1} ⋯ B_0`.
pub fn verify_bounded_lemma(bs: &[Mat2], big_c: f64, kappa: f64) -> Result<LemmaOutcome> {
    bs.iter().try_for_each(|&b| check_unit(b))?;
    let bound = 2f64.sqrt() * big_c / (1.0 - kappa * kappa).sqrt();
    let mut p = Mat2::IDENTITY;
    for (i, &b) in bs.iter().enumerate() {
        let (s1, s2) = singular_values(p);
        // When P is conformal every unit vector is a valid v; take the best one.
        let bv = if s1 - s2 <= 1e-12 * s1 { mininorm(b)? } else { b.apply(top_singular(p).2).norm() };
        if op_norm(b) > big_c + 1e-12 || bv > kappa + 1e-12 {
            return Ok(LemmaOutcome::HypothesisFailure { index: i });
        }
        p = b * p;
        let n = op_norm(p);
        if n > bound + 1e-9 {
            return Ok(LemmaOutcome::ConclusionFailure { index: i + 1, norm: n, bound });
        }
    }
    Ok(LemmaOutcome::Holds)
}

/// Word of length `ℓ · n` with `free[n]` at each block start; the rest of each
/// block is read off the scheme at the direction the running product stretches most.
pub fn build_bounded_word(scheme: &ContractionScheme, c: &Cocycle, free: &[usize]) -> Result<Word> {
    if scheme.words.len() != scheme.grid_size {
        return Err(CocycleError::SchemeIncomplete(format!("{} of {} cells filled", scheme.words.len(), scheme.grid_size)));
    }
    let mut out = Vec::with_capacity(scheme.ell * free.len());
    let mut p = Mat2::IDENTITY;
    for &s in free {
        if s >= c.k() {
            return Err(CocycleError::Domain(format!("symbol {} outside alphabet", s + 1)));
        }
        let v = top_singular(p).2;
        let w = c.gen(s).apply(v).proj_angle();
        if !w.is_finite() {
            return Err(CocycleError::SchemeIncomplete("direction lookup failed".into()));
        }
        let q = &scheme.words[scheme.cell_of(w)];
        out.push(s);
        out.extend(q);
        p = c.product(q) * c.gen(s) * p;
    }
    Ok(out)
}

/// `|P_{ℓ n}|` at every block end.
pub fn checkpoint_norms(c: &Cocycle, word: &[usize], ell: usize) -> Vec<f64> {
    let mut p = Mat2::IDENTITY;
    let mut out = Vec::new();
    for (i, &s) in word.iter().enumerate() {
        p = c.gen(s) * p;
        if (i + 1) % ell == 0 {
            out.push(op_norm(p));
        }
    }
    out
}

pub fn entropy_lower_bound(scheme: &ContractionScheme, k: usize) -> f64 {
    (k as f64).ln() / scheme.ell as f64
}

pub const ELLIPTIC_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub theta: Option<f64>,
    /// Finite-difference derivative of the trace at `θ = 0`.
    pub derivative: f64,
}

/// Trace of `R_θ A_{iₙ} ⋯ R_θ A_{i₁}`.
pub fn rotated_trace(c: &Cocycle, w: &[usize], theta: f64) -> f64 {
    let r = Mat2::rotation(theta);
    w.iter().fold(Mat2::IDENTITY, |p, &i| r * c.gen(i) * p).trace()
}

/// Smallest `|θ| ≤ θ_max` (scanning outward) putting the rotated product's
/// trace inside `(−2 + margin, 2 − margin)`.
pub fn elliptic_perturbation_search(c: &Cocycle, w: &[usize], theta_max: f64) -> Result<Perturbation> {
    check_unit_cocycle(c)?;
    if w.is_empty() {
        return Err(CocycleError::Domain("empty word".into()));
    }
    let h = 1e-6;
    let derivative = (rotated_trace(c, w, h) - rotated_trace(c, w, -h)) / (2.0 * h);
    let ok = |t: f64| rotated_trace(c, w, t).abs() < 2.0 - ELLIPTIC_MARGIN;
    const STEPS: usize = 20_000;
    let theta = (0..=STEPS)
        .flat_map(|i| {
            let t = theta_max * i as f64 / STEPS as f64;
            [t, -t]
        })
        .find(|&t| ok(t));
    Ok(Perturbation { theta, derivative })
}
