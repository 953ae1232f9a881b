//! One-step cocycles over the full shift and their finite products.

use serde::{Deserialize, Serialize};

use crate::error::{CocycleError, Result};
use crate::geom2::{op_norm, Mat2};

/// A finite word over the alphabet `{0, .., k-1}`, read left to right in time order.
pub type Word = Vec<usize>;

/// Which extremal exponent is being optimised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Maximise (joint spectral radius side).
    Top,
    /// Minimise (joint spectral subradius side).
    Bottom,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Top => "top",
            Mode::Bottom => "bottom",
        }
    }

    /// `max` for `Top`, `min` for `Bottom`.
    pub fn better(self, a: f64, b: f64) -> f64 {
        match self {
            Mode::Top => a.max(b),
            Mode::Bottom => a.min(b),
        }
    }

    /// Worst possible value, the identity for [`Mode::better`].
    pub fn worst(self) -> f64 {
        match self {
            Mode::Top => f64::NEG_INFINITY,
            Mode::Bottom => f64::INFINITY,
        }
    }
}

/// Generators `A_0, .., A_{k-1}`, all invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    mats: Vec<Mat2>,
}

impl Cocycle {
    pub fn new(mats: Vec<Mat2>) -> Result<Self> {
        if mats.is_empty() {
            return Err(CocycleError::Domain("a cocycle needs at least one generator".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if !m.is_finite() || m.det().abs() <= 1e-12 {
                return Err(CocycleError::Domain(format!(
                    "generator {} has |det| <= 1e-12",
                    i + 1
                )));
            }
        }
        Ok(Self { mats })
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    pub fn gen(&self, i: usize) -> Mat2 {
        self.mats[i]
    }

    pub fn mats(&self) -> &[Mat2] {
        &self.mats
    }

    /// `A_{w_{n-1}} ... A_{w_0}`.
    pub fn product(&self, w: &[usize]) -> Mat2 {
        w.iter().fold(Mat2::IDENTITY, |p, &i| self.mats[i] * p)
    }

    /// Product returned as a unit-scale matrix plus a log scale, safe for long words.
    pub fn scaled_product(&self, w: &[usize]) -> ScaledMat {
        let mut p = ScaledMat::identity();
        for &i in w {
            p = p.left_mul(self.mats[i]);
        }
        p
    }

    pub fn max_norm(&self) -> f64 {
        self.mats.iter().map(|m| op_norm(*m)).fold(0.0, f64::max)
    }
}

/// `exp(log_scale) * m` with `m` kept near unit size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMat {
    pub m: Mat2,
    pub log_scale: f64,
}

impl ScaledMat {
    pub fn identity() -> Self {
        Self { m: Mat2::IDENTITY, log_scale: 0.0 }
    }

    pub fn left_mul(self, a: Mat2) -> Self {
        let m = a * self.m;
        let s = m.max_abs();
        if s > 0.0 && (s > 1e8 || s < 1e-8) {
            Self { m: m.scale(1.0 / s), log_scale: self.log_scale + s.ln() }
        } else {
            Self { m, log_scale: self.log_scale }
        }
    }

    pub fn log_norm(self) -> f64 {
        op_norm(self.m).ln() + self.log_scale
    }
}

/// Render a word with 1-based symbols, as used in reports.
pub fn word_to_string(w: &[usize]) -> String {
    if w.iter().all(|&s| s < 9) {
        w.iter().map(|&s| char::from(b'1' + s as u8)).collect()
    } else {
        w.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Inverse of [`word_to_string`] for single-digit alphabets.
pub fn parse_word(s: &str, k: usize) -> Result<Word> {
    let parts: Vec<&str> = if s.contains(',') {
        s.split(',').collect()
    } else {
        s.split("").filter(|p| !p.is_empty()).collect()
    };
    parts
        .iter()
        .map(|p| {
            let v: usize = p
                .trim()
                .parse()
                .map_err(|_| CocycleError::Domain(format!("bad symbol {p:?}")))?;
            if v == 0 || v > k {
                return Err(CocycleError::Domain(format!("symbol {v} outside 1..={k}")));
            }
            Ok(v - 1)
        })
        .collect()
}

/// All words of length exactly `n`, in lexicographic order.
pub fn words_of_length(k: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k);
        for w in &out {
            for s in 0..k {
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
