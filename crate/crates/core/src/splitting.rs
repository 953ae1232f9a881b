//! Domination certificates and the dominated splitting `e₁ ⊕ e₂` as nested
//! cone intersections.

use serde::{Deserialize, Serialize};

use crate::cocycle::Cocycle;
use crate::error::{CocycleError, Result};
use crate::geom2::{real_eigen, wrap_pi, Mat2};
use crate::multicone::{
    build_adapted_metric, check_noc, complementary, component_maps, contraction_factor, find_multicone,
    inverse_cocycle_of, AdaptedMetric, Multicone, NocDirection, ProjInterval, SearchBudget,
    DEFAULT_CONTRACTION_PAIRS,
};

/// Evidence that a cocycle is dominated.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationCertificate {
    pub multicone: Multicone,
    pub complementary: Multicone,
    /// Empirical contraction of the generators in the adapted metric.
    pub tau: f64,
    pub c1: f64,
    pub noc_forward: bool,
    pub noc_backward: bool,
    /// Cone of the inverse tuple witnessing backward no-overlap, when the
    /// complement of `multicone` does not already do so.
    pub backward_cone: Option<Multicone>,
    /// `image_records[i][j]`: component receiving `A_i` of component `j`.
    pub image_records: Vec<Vec<usize>>,
    pub metric: AdaptedMetric,
}

/// Search for a domination certificate. `None` means the search was inconclusive;
/// [`nonconformality_min`] gives a diagnostic in that case.
pub fn certify_domination(c: &Cocycle, budget: &SearchBudget) -> Option<DominationCertificate> {
    let found = find_multicone(c, budget)?;
    let mc = found.multicone;
    let metric = build_adapted_metric(&mc, c).ok()?;
    let report = contraction_factor(&metric, c, DEFAULT_CONTRACTION_PAIRS);
    if !report.contracting {
        return None;
    }
    let image_records = component_maps(c, &mc)?;
    let (noc_backward, backward_cone) = if found.noc_backward {
        (true, None)
    } else {
        match find_multicone(&inverse_cocycle_of(c), budget) {
            Some(g) if g.noc_forward => (true, Some(g.multicone)),
            _ => (false, None),
        }
    };
    debug_assert_eq!(check_noc(c, &mc, NocDirection::Forward).ok(), Some(found.noc_forward));
    Some(DominationCertificate {
        complementary: complementary(&mc),
        multicone: mc,
        tau: report.tau,
        c1: metric.c1,
        noc_forward: found.noc_forward,
        noc_backward,
        backward_cone,
        image_records,
        metric,
    })
}

/// `(1/n) log min |P| / m(P)` over words of length `n`; grows linearly in `n`
/// exactly when the cocycle is dominated.
pub fn nonconformality_min(c: &Cocycle, n: usize) -> Result<f64> {
    Ok(crate::spectral::min_log_conformality(c, n)? / n as f64)
}

/// A direction in P¹ together with a guaranteed enclosing radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionEstimate {
    pub direction: f64,
    pub radius: f64,
}

pub const DEFAULT_DEPTH: usize = 40;
const STOP_RADIUS: f64 = 1e-12;

/// Smallest arc containing a family of disjoint arcs: the complement of the largest gap.
pub fn hull(arcs: &[ProjInterval]) -> ProjInterval {
    if arcs.len() == 1 {
        return arcs[0];
    }
    let mut v = arcs.to_vec();
    v.sort_by(|a, b| a.start.total_cmp(&b.start));
    let n = v.len();
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..n {
        let gap = crate::geom2::ccw_dist(v[i].end(), v[(i + 1) % n].start);
        if gap > best.0 {
            best = (gap, i);
        }
    }
    let i = best.1;
    ProjInterval::from_endpoints(v[(i + 1) % n].start, v[i].end())
}

/// Images of `cone` under the products `Q_1, Q_2, ..`, stopping once the
/// enclosing arc is below the stop radius.
fn nested(cone: &Multicone, factors: impl Iterator<Item = Mat2>) -> Vec<ProjInterval> {
    let mut q = Mat2::IDENTITY;
    let mut arcs = cone.components().to_vec();
    for a in factors {
        q = q * a;
        q = q.scale(1.0 / q.max_abs());
        arcs = cone.components().iter().map(|c| c.image(q)).collect();
        if hull(&arcs).length < 2.0 * STOP_RADIUS {
            break;
        }
    }
    arcs
}

fn estimate(arcs: &[ProjInterval]) -> DirectionEstimate {
    let h = hull(arcs);
    DirectionEstimate { direction: h.midpoint(), radius: 0.5 * h.length }
}

/// Image of the cone under the last `depth` symbols of `past`
/// (the last entry of `past` is the symbol just before time 0).
pub fn past_image(cert: &DominationCertificate, c: &Cocycle, past: &[usize], depth: usize) -> Vec<ProjInterval> {
    let used = &past[past.len().saturating_sub(depth)..];
    nested(&cert.multicone, used.iter().rev().map(|&s| c.gen(s)))
}

/// Preimage of the complementary cone under the first `depth` symbols of `future`.
pub fn future_preimage(cert: &DominationCertificate, c: &Cocycle, future: &[usize], depth: usize) -> Vec<ProjInterval> {
    let used = &future[..future.len().min(depth)];
    nested(&cert.complementary, used.iter().map(|&s| c.gen(s).inverse().expect("invertible")))
}

pub fn e1_estimate(cert: &DominationCertificate, c: &Cocycle, past: &[usize]) -> Result<DirectionEstimate> {
    e1_estimate_depth(cert, c, past, DEFAULT_DEPTH)
}

/// Estimate of `e₁(ω)` from the past `(.., ω₋₂, ω₋₁)`. With a short past the
/// radius honestly reflects the whole image of the cone.
pub fn e1_estimate_depth(cert: &DominationCertificate, c: &Cocycle, past: &[usize], depth: usize) -> Result<DirectionEstimate> {
    check_symbols(c, past)?;
    Ok(estimate(&past_image(cert, c, past, depth)))
}

pub fn e2_estimate(cert: &DominationCertificate, c: &Cocycle, future: &[usize]) -> Result<DirectionEstimate> {
    e2_estimate_depth(cert, c, future, DEFAULT_DEPTH)
}

/// Estimate of `e₂(ω)` from the future `(ω₀, ω₁, ..)`.
pub fn e2_estimate_depth(cert: &DominationCertificate, c: &Cocycle, future: &[usize], depth: usize) -> Result<DirectionEstimate> {
    check_symbols(c, future)?;
    Ok(estimate(&future_preimage(cert, c, future, depth)))
}

fn check_symbols(c: &Cocycle, w: &[usize]) -> Result<()> {
    match w.iter().find(|&&s| s >= c.k()) {
        Some(s) => Err(CocycleError::Domain(format!("symbol {} outside alphabet of size {}", s + 1, c.k()))),
        None => Ok(()),
    }
}

/// `(e₁, e₂)` of the periodic sequence `w^∞` at position 0, from the eigen-directions
/// of its period product.
pub fn periodic_splitting(c: &Cocycle, w: &[usize]) -> Option<(f64, f64)> {
    let p = c.scaled_product(w).m;
    let e = real_eigen(p)?;
    Some((wrap_pi(e.dir_hi), wrap_pi(e.dir_lo)))
}
