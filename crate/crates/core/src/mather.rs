//! Finite-depth over-approximation of the Mather sets: admissible words,
//! word complexity, and the cross-ratio and disjointness audits.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barabanov::BarabanovTable;
use crate::cocycle::{word_to_string, Cocycle, Mode, Word};
use crate::error::{CocycleError, Result};
use crate::geom2::{ccw_dist, classify_configuration, cross_ratio, mininorm, op_norm, Configuration, Vec2};
use crate::multicone::ProjInterval;
use crate::splitting::{periodic_splitting, DominationCertificate};

pub const DEFAULT_MAX_NODES: u64 = 50_000_000;

/// Caveat attached to every word-count output.
pub const OVER_APPROXIMATION_NOTE: &str =
    "counts over-approximate the Mather-set language; the gap is not bounded even as m grows and tol shrinks";

/// Admissibility tolerance matched to the accuracy of the table.
pub fn default_tol(table: &BarabanovTable) -> f64 {
    f64::max(1e-3, 3.0 * table.residual + table.angle_lipschitz * table.resolution())
}

/// Word search over padded strings `u w v`. The state after a prefix is the set
/// of cone components transported by it, each dropped once it is certain that
/// no direction in it can have a small residual at the current position.
struct Search<'a> {
    table: &'a BarabanovTable,
    c: &'a Cocycle,
    tol: f64,
    /// Angle-Lipschitz constant of `x ↦ ψ` increment for each generator.
    lips: Vec<f64>,
    m: usize,
    ell: usize,
    nodes: AtomicU64,
    max_nodes: u64,
}

impl<'a> Search<'a> {
    fn new(table: &'a BarabanovTable, c: &'a Cocycle, ell: usize, m: usize, tol: f64, max_nodes: u64) -> Result<Self> {
        let lf = table.angle_lipschitz;
        let lips = c
            .mats()
            .iter()
            .map(|&a| {
                let q = op_norm(a) / mininorm(a)?;
                Ok(lf * (q + 1.0) + q)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { table, c, tol, lips, m, ell, nodes: AtomicU64::new(0), max_nodes })
    }

    fn step(&self, arcs: &[ProjInterval], s: usize) -> Result<Option<Vec<ProjInterval>>> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.max_nodes {
            return Err(CocycleError::Budget(format!("word search exceeded {} nodes", self.max_nodes)));
        }
        let a = self.c.gen(s);
        let mut out = Vec::with_capacity(arcs.len());
        for arc in arcs {
            let keep = self.tol.is_infinite() || {
                let r = (self.table.increment(self.c, s, arc.midpoint())? - self.table.beta).abs();
                r - self.lips[s] * 0.5 * arc.length <= self.tol
            };
            if keep {
                out.push(arc.image(a));
            }
        }
        Ok((!out.is_empty()).then_some(out))
    }

    fn tail_exists(&self, arcs: &[ProjInterval], remaining: usize) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        for s in 0..self.c.k() {
            if let Some(next) = self.step(arcs, s)? {
                if self.tail_exists(&next, remaining - 1)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn walk_word(&self, arcs: &[ProjInterval], w: &mut Word, out: &mut BTreeSet<Word>) -> Result<()> {
        if w.len() == self.ell {
            if !out.contains(w) && self.tail_exists(arcs, self.m)? {
                out.insert(w.clone());
            }
            return Ok(());
        }
        for s in 0..self.c.k() {
            if let Some(next) = self.step(arcs, s)? {
                w.push(s);
                self.walk_word(&next, w, out)?;
                w.pop();
            }
        }
        Ok(())
    }

    fn walk_pad(&self, arcs: &[ProjInterval], depth: usize, out: &mut BTreeSet<Word>) -> Result<()> {
        if depth == self.m {
            return self.walk_word(arcs, &mut Vec::with_capacity(self.ell), out);
        }
        for s in 0..self.c.k() {
            if let Some(next) = self.step(arcs, s)? {
                self.walk_pad(&next, depth + 1, out)?;
            }
        }
        Ok(())
    }

    fn run(&self, start: &[ProjInterval]) -> Result<Vec<Word>> {
        let sets: Vec<BTreeSet<Word>> = if self.m == 0 {
            let mut out = BTreeSet::new();
            self.walk_word(start, &mut Vec::new(), &mut out)?;
            vec![out]
        } else {
            (0..self.c.k())
                .into_par_iter()
                .map(|s| {
                    let mut out = BTreeSet::new();
                    if let Some(next) = self.step(start, s)? {
                        self.walk_pad(&next, 1, &mut out)?;
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?
        };
        let merged: BTreeSet<Word> = sets.into_iter().flatten().collect();
        Ok(merged.into_iter().collect())
    }
}

/// Words `w` of length `ℓ` for which some paddings `u`, `v` of length `m` keep
/// every residual of `u w v` at most `tol`. Sorted lexicographically.
pub fn admissible_words(table: &BarabanovTable, cert: &DominationCertificate, c: &Cocycle, ell: usize, m: usize, tol: f64) -> Result<Vec<Word>> {
    admissible_words_budget(table, cert, c, ell, m, tol, DEFAULT_MAX_NODES)
}

pub fn admissible_words_budget(
    table: &BarabanovTable,
    cert: &DominationCertificate,
    c: &Cocycle,
    ell: usize,
    m: usize,
    tol: f64,
    max_nodes: u64,
) -> Result<Vec<Word>> {
    if !(tol >= 0.0) {
        return Err(CocycleError::Domain("tolerance must be nonnegative".into()));
    }
    let search = Search::new(table, c, ell, m, tol, max_nodes)?;
    search.run(cert.multicone.components())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordComplexityReport {
    pub mode: Mode,
    pub lengths: Vec<usize>,
    pub counts: Vec<usize>,
    /// `(1/ℓ) log w(ℓ)`, reported raw.
    pub entropy_estimates: Vec<f64>,
    pub padding: usize,
    pub tol: f64,
    pub note: String,
}

pub fn complexity_report(
    table: &BarabanovTable,
    cert: &DominationCertificate,
    c: &Cocycle,
    ell_max: usize,
    m: usize,
    tol: f64,
) -> Result<WordComplexityReport> {
    let mut counts = Vec::with_capacity(ell_max);
    for ell in 1..=ell_max {
        counts.push(admissible_words(table, cert, c, ell, m, tol)?.len());
    }
    let lengths: Vec<usize> = (1..=ell_max).collect();
    let entropy_estimates = lengths.iter().zip(&counts).map(|(&l, &n)| (n as f64).ln() / l as f64).collect();
    Ok(WordComplexityReport {
        mode: table.mode,
        lengths,
        counts,
        entropy_estimates,
        padding: m,
        tol,
        note: OVER_APPROXIMATION_NOTE.into(),
    })
}

impl WordComplexityReport {
    /// CSV with columns `ell,count,entropy_estimate`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ell,count,entropy_estimate")?;
        for ((l, n), h) in self.lengths.iter().zip(&self.counts).zip(&self.entropy_estimates) {
            writeln!(w, "{l},{n},{h:.16e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    CrossRatio,
    Configuration,
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub first: String,
    pub second: String,
    /// How far past the tolerance the inequality fails.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub xi: String,
    pub eta: String,
    pub cross_ratio: f64,
    pub configuration: Configuration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: Mode,
    pub tol: f64,
    pub pairs: Vec<PairRecord>,
    pub violations: Vec<Violation>,
}

/// Shortest `r` with `w` a prefix of `r^∞`.
fn period_root(w: &[usize]) -> &[usize] {
    let n = w.len();
    let d = (1..=n).find(|&d| (d..n).all(|i| w[i] == w[i - d])).unwrap_or(n);
    &w[..d]
}

/// Primitive roots `r` such that every length-`ℓ` factor of `r^∞` is admissible.
/// Rotations are kept as distinct points of the orbit.
pub fn periodic_samples(words: &[Word]) -> Vec<Word> {
    let Some(ell) = words.first().map(|w| w.len()) else { return Vec::new() };
    let set: BTreeSet<&[usize]> = words.iter().map(|w| w.as_slice()).collect();
    let mut out = BTreeSet::new();
    for w in words {
        let r = period_root(w);
        let ext: Vec<usize> = r.iter().cycle().take(ell + r.len()).copied().collect();
        if (0..r.len()).all(|i| set.contains(&ext[i..i + ell])) {
            out.insert(r.to_vec());
        }
    }
    out.into_iter().collect()
}

fn splitting_of(cert: &DominationCertificate, c: &Cocycle, r: &[usize]) -> Result<(f64, f64)> {
    let (e1, e2) = periodic_splitting(c, r)
        .ok_or_else(|| CocycleError::Precision { radius: f64::INFINITY, resolution: 0.0 })?;
    if !cert.multicone.contains(e1) {
        return Err(CocycleError::InvalidCertificate(format!("e1 of {} lies outside the cone", word_to_string(r))));
    }
    Ok((e1, e2))
}

fn mode_violation(mode: Mode, cr: f64, tol: f64) -> Option<f64> {
    let a = cr.abs();
    match mode {
        Mode::Top if a < 1.0 - tol => Some(1.0 - tol - a),
        Mode::Bottom if a > 1.0 + tol => Some(a - 1.0 - tol),
        _ => None,
    }
}

pub const DEFAULT_AUDIT_SEED: u64 = 0xa0d1;

/// Cross-ratio audit on periodic points built from `words` (all of one length).
/// At most `max_pairs` pairs are checked, drawn with a fixed seed when there are more.
pub fn cross_ratio_audit(
    cert: &DominationCertificate,
    c: &Cocycle,
    mode: Mode,
    words: &[Word],
    tol: f64,
    max_pairs: usize,
) -> Result<AuditReport> {
    cross_ratio_audit_seeded(cert, c, mode, words, tol, max_pairs, DEFAULT_AUDIT_SEED)
}

pub fn cross_ratio_audit_seeded(
    cert: &DominationCertificate,
    c: &Cocycle,
    mode: Mode,
    words: &[Word],
    tol: f64,
    max_pairs: usize,
    seed: u64,
) -> Result<AuditReport> {
    let samples = periodic_samples(words);
    let dirs = samples.iter().map(|r| splitting_of(cert, c, r)).collect::<Result<Vec<_>>>()?;
    let mut pairs: Vec<(usize, usize)> = (0..samples.len()).flat_map(|i| (i + 1..samples.len()).map(move |j| (i, j))).collect();
    if pairs.len() > max_pairs {
        pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        pairs.truncate(max_pairs);
        pairs.sort_unstable();
    }
    let mut report = AuditReport { mode, tol, pairs: Vec::new(), violations: Vec::new() };
    for (i, j) in pairs {
        let (x1, x2) = dirs[i];
        let (y1, y2) = dirs[j];
        let cr = cross_ratio(Vec2::from_angle(x1), Vec2::from_angle(y1), Vec2::from_angle(x2), Vec2::from_angle(y2))?;
        let conf = classify_configuration(cr);
        let (xi, eta) = (word_to_string(&samples[i]), word_to_string(&samples[j]));
        if let Some(mag) = mode_violation(mode, cr, tol) {
            report.violations.push(Violation { kind: ViolationKind::CrossRatio, first: xi.clone(), second: eta.clone(), magnitude: mag });
            let forbidden = match mode {
                Mode::Top => Configuration::Coparallel,
                Mode::Bottom => Configuration::Crossing,
            };
            if conf == forbidden {
                report.violations.push(Violation { kind: ViolationKind::Configuration, first: xi.clone(), second: eta.clone(), magnitude: mag });
            }
        }
        report.pairs.push(PairRecord { xi, eta, cross_ratio: cr, configuration: conf });
    }
    Ok(report)
}

/// One fibre of `G`: a direction `e₁` and the `e₂` directions paired with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub label: String,
    pub e1: f64,
    pub e2s: Vec<f64>,
}

/// Least closed arc of `P¹ ∖ {x}` containing all of `zs`.
fn spanning_arc(x: f64, zs: &[f64]) -> ProjInterval {
    let offs: Vec<f64> = zs.iter().map(|&z| ccw_dist(x, z)).collect();
    let lo = offs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = offs.iter().copied().fold(0.0, f64::max);
    ProjInterval { start: crate::geom2::wrap_pi(x + lo), length: hi - lo }
}

fn arc_overlap(a: &ProjInterval, b: &ProjInterval) -> f64 {
    let part = |a: &ProjInterval, b: &ProjInterval| {
        let o = a.offset(b.start);
        if o < a.length {
            (a.length - o).min(b.length)
        } else {
            0.0
        }
    };
    part(a, b).max(part(b, a))
}

/// Ideal vertex on the unit circle, using the boundary parametrisation `2θ`.
fn disk_point(theta: f64) -> (f64, f64) {
    ((2.0 * theta).cos(), (2.0 * theta).sin())
}

/// Depth of interior overlap of two triangles (0 when they are separated),
/// by the separating-axis test. Geodesics are chords in the Klein model, so
/// ideal triangles are Euclidean there.
fn triangle_overlap(a: &[(f64, f64); 3], b: &[(f64, f64); 3]) -> f64 {
    let mut depth = f64::INFINITY;
    for tri in [a, b] {
        for i in 0..3 {
            let (p, q) = (tri[i], tri[(i + 1) % 3]);
            let (nx, ny) = (-(q.1 - p.1), q.0 - p.0);
            let len = nx.hypot(ny);
            if len == 0.0 {
                continue;
            }
            let proj = |t: &[(f64, f64); 3]| {
                t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = (v.0 * nx + v.1 * ny) / len;
                    (lo.min(d), hi.max(d))
                })
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            depth = depth.min((ahi.min(bhi) - alo.max(blo)).max(0.0));
        }
    }
    depth
}

/// Disjointness audit on explicitly given fibres; fibres with fewer than two
/// distinct `e₂` values are skipped.
pub fn geometry_audit_fibers(mode: Mode, fibers: &[Fiber], tol: f64) -> AuditReport {
    let big: Vec<&Fiber> = fibers
        .iter()
        .filter(|f| f.e2s.iter().any(|&z| crate::geom2::angle(z, f.e2s[0]) > tol))
        .collect();
    let mut violations = Vec::new();
    for i in 0..big.len() {
        for j in i + 1..big.len() {
            let (f, g) = (big[i], big[j]);
            let (ia, ib) = (spanning_arc(f.e1, &f.e2s), spanning_arc(g.e1, &g.e2s));
            let mag = match mode {
                Mode::Top => {
                    if ia.interiors_overlap(&ib, tol) {
                        arc_overlap(&ia, &ib)
                    } else {
                        0.0
                    }
                }
                Mode::Bottom => {
                    let t = |x: f64, a: &ProjInterval| [disk_point(x), disk_point(a.start), disk_point(a.end())];
                    let d = triangle_overlap(&t(f.e1, &ia), &t(g.e1, &ib));
                    if d > tol {
                        d
                    } else {
                        0.0
                    }
                }
            };
            if mag > 0.0 {
                violations.push(Violation { kind: ViolationKind::Overlap, first: f.label.clone(), second: g.label.clone(), magnitude: mag });
            }
        }
    }
    AuditReport { mode, tol, pairs: Vec::new(), violations }
}

/// Disjointness audit on samples `p^∞.q^∞` whose every length-`ℓ` window is
/// admissible, grouped by the past `p`.
pub fn geometry_audit(cert: &DominationCertificate, c: &Cocycle, mode: Mode, words: &[Word], tol: f64) -> Result<AuditReport> {
    let roots = periodic_samples(words);
    let Some(ell) = words.first().map(|w| w.len()) else {
        return Ok(AuditReport { mode, tol, pairs: Vec::new(), violations: Vec::new() });
    };
    let set: BTreeSet<&[usize]> = words.iter().map(|w| w.as_slice()).collect();
    let dirs = roots.iter().map(|r| splitting_of(cert, c, r)).collect::<Result<Vec<_>>>()?;
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (i, p) in roots.iter().enumerate() {
        for (j, q) in roots.iter().enumerate() {
            let left: Vec<usize> = p.iter().rev().cycle().take(ell).copied().collect::<Vec<_>>().into_iter().rev().collect();
            let mut s = left;
            s.extend(q.iter().cycle().take(ell));
            if (0..=ell).all(|t| set.contains(&s[t..t + ell])) {
                groups.entry(i).or_default().push(dirs[j].1);
            }
        }
    }
    let fibers: Vec<Fiber> = groups
        .into_iter()
        .map(|(i, e2s)| Fiber { label: word_to_string(&roots[i]), e1: dirs[i].0, e2s })
        .collect();
    Ok(geometry_audit_fibers(mode, &fibers, tol))
}
