//! Multicones in P¹, their images, invariance and the no-overlap condition,
//! plus the piecewise adapted metric built on an invariant multicone.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cocycle::{words_of_length, Cocycle};
use crate::error::{CocycleError, Result};
use crate::geom2::{angle, ccw_dist, proj_act, real_eigen, wrap_pi, Mat2};

/// Strict clearance used by every invariance test.
pub const INVARIANCE_CLEARANCE: f64 = 1e-9;

/// Closed arc of P¹ swept counterclockwise from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjInterval {
    pub start: f64,
    pub length: f64,
}

impl ProjInterval {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length < PI) {
            return Err(CocycleError::Domain(format!("arc length {length} not in (0, π)")));
        }
        Ok(Self { start: wrap_pi(start), length })
    }

    /// Arc from `a` counterclockwise to `b`.
    pub fn from_endpoints(a: f64, b: f64) -> Self {
        Self { start: wrap_pi(a), length: ccw_dist(a, b) }
    }

    pub fn end(&self) -> f64 {
        wrap_pi(self.start + self.length)
    }

    pub fn midpoint(&self) -> f64 {
        wrap_pi(self.start + 0.5 * self.length)
    }

    /// Counterclockwise offset of `theta` from the start.
    pub fn offset(&self, theta: f64) -> f64 {
        ccw_dist(self.start, theta)
    }

    /// Closed membership, forgiving rounding at the endpoints.
    pub fn contains(&self, theta: f64) -> bool {
        let o = self.offset(theta);
        o <= self.length + 1e-12 || o >= PI - 1e-12
    }

    /// `theta` lies inside with at least `clearance` to spare on both sides.
    pub fn contains_strictly(&self, theta: f64, clearance: f64) -> bool {
        let o = self.offset(theta);
        o > clearance && o < self.length - clearance
    }

    pub fn contains_interval(&self, other: &ProjInterval, clearance: f64) -> bool {
        let o = self.offset(other.start);
        o > clearance && o + other.length < self.length - clearance
    }

    /// Closed arcs share at least one point.
    pub fn intersects(&self, other: &ProjInterval) -> bool {
        self.contains(other.start) || other.contains(self.start)
    }

    /// Open arcs share a point; `tol` shrinks both arcs first.
    pub fn interiors_overlap(&self, other: &ProjInterval, tol: f64) -> bool {
        let a = self.shrink(tol);
        let b = other.shrink(tol);
        match (a, b) {
            (Some(a), Some(b)) => a.contains_strictly(b.start, 0.0) || b.contains_strictly(a.start, 0.0) || a.start == b.start,
            _ => false,
        }
    }

    fn shrink(&self, tol: f64) -> Option<ProjInterval> {
        (self.length > 2.0 * tol).then(|| ProjInterval { start: wrap_pi(self.start + tol), length: self.length - 2.0 * tol })
    }

    pub fn widen(&self, before: f64, after: f64) -> ProjInterval {
        ProjInterval { start: wrap_pi(self.start - before), length: self.length + before + after }
    }

    /// Image under `m`, using that a projective map sends arcs to arcs and
    /// reverses orientation exactly when `det m < 0`.
    pub fn image(&self, m: Mat2) -> ProjInterval {
        let s = proj_act(m, self.start);
        let e = proj_act(m, self.start + self.length);
        if m.det() > 0.0 {
            ProjInterval::from_endpoints(s, e)
        } else {
            ProjInterval::from_endpoints(e, s)
        }
    }
}

/// Finite union of pairwise disjoint closed arcs, sorted by start angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multicone {
    comps: Vec<ProjInterval>,
}

impl Multicone {
    pub fn new(mut comps: Vec<ProjInterval>) -> Result<Self> {
        if comps.is_empty() {
            return Err(CocycleError::Domain("multicone needs a component".into()));
        }
        comps.sort_by(|a, b| a.start.total_cmp(&b.start));
        let n = comps.len();
        let total: f64 = comps.iter().map(|c| c.length).sum();
        if !(total < PI) {
            return Err(CocycleError::Domain("multicone covers all of P¹".into()));
        }
        if n > 1 {
            for i in 0..n {
                let a = comps[i];
                let b = comps[(i + 1) % n];
                if !(ccw_dist(a.start, b.start) > a.length) {
                    return Err(CocycleError::Domain("multicone components overlap".into()));
                }
            }
        }
        Ok(Self { comps })
    }

    pub fn single(start: f64, length: f64) -> Result<Self> {
        Self::new(vec![ProjInterval::new(start, length)?])
    }

    pub fn components(&self) -> &[ProjInterval] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component_of(&self, theta: f64) -> Option<usize> {
        self.comps.iter().position(|c| c.contains(theta))
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.component_of(theta).is_some()
    }
}

/// Image of every component under `m`.
pub fn mc_image(mc: &Multicone, m: Mat2) -> Vec<ProjInterval> {
    mc.components().iter().map(|c| c.image(m)).collect()
}

/// Closure of the complement: the gaps between consecutive components.
pub fn complementary(mc: &Multicone) -> Multicone {
    let cs = mc.components();
    let n = cs.len();
    let gaps = (0..n)
        .map(|i| {
            let a = cs[i];
            let b = cs[(i + 1) % n];
            let len = if n == 1 { PI - a.length } else { ccw_dist(a.end(), b.start) };
            ProjInterval { start: a.end(), length: len }
        })
        .collect();
    // Gaps of a valid multicone are disjoint up to shared endpoints, which the
    // closed-arc check in `Multicone::new` would reject, so build directly.
    let mut comps: Vec<ProjInterval> = gaps;
    comps.sort_by(|a, b| a.start.total_cmp(&b.start));
    Multicone { comps }
}

/// For each generator, the component index receiving each component, or `None`
/// if some image is not strictly inside one component.
pub fn component_maps(c: &Cocycle, mc: &Multicone) -> Option<Vec<Vec<usize>>> {
    c.mats()
        .iter()
        .map(|&a| {
            mc.components()
                .iter()
                .map(|comp| {
                    let img = comp.image(a);
                    mc.components()
                        .iter()
                        .position(|t| t.contains_interval(&img, INVARIANCE_CLEARANCE))
                })
                .collect()
        })
        .collect()
}

/// Every generator maps `mc` into its interior with clearance above `1e-9`.
pub fn is_forward_invariant(c: &Cocycle, mc: &Multicone) -> bool {
    component_maps(c, mc).is_some()
}

pub fn inverse_cocycle_of(c: &Cocycle) -> Cocycle {
    let inv = c.mats().iter().map(|m| m.inverse().expect("generators are invertible")).collect();
    Cocycle::new(inv).expect("inverses of invertible generators are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NocDirection {
    Forward,
    Backward,
}

/// No-overlap test: forward asks that the images `A_i(M)` be pairwise
/// disjoint, backward asks the same of `A_i⁻¹(M_co)`.
pub fn check_noc(c: &Cocycle, mc: &Multicone, dir: NocDirection) -> Result<bool> {
    let (cocycle, cone) = match dir {
        NocDirection::Forward => (c.clone(), mc.clone()),
        NocDirection::Backward => (inverse_cocycle_of(c), complementary(mc)),
    };
    if !is_forward_invariant(&cocycle, &cone) {
        return Err(CocycleError::InvalidCertificate(format!(
            "{dir:?} no-overlap check needs an invariant cone"
        )));
    }
    let images: Vec<Vec<ProjInterval>> = cocycle.mats().iter().map(|&m| mc_image(&cone, m)).collect();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].iter().any(|a| images[j].iter().any(|b| a.intersects(b))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Knobs for [`find_multicone`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Upper bound on the number of products used as seeds.
    pub max_products: usize,
    /// Cap on the number of components; `None` means `k²`.
    pub max_components: Option<usize>,
    /// Number of interpolation levels tried between the two attractors.
    pub levels: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_products: 4096, max_components: None, levels: 49 }
    }
}

/// Result of the multicone search, with the no-overlap flags of the chosen cone
/// (the backward flag refers to its complement).
#[derive(Debug, Clone, PartialEq)]
pub struct MulticoneFound {
    pub multicone: Multicone,
    pub noc_forward: bool,
    pub noc_backward: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tag {
    Attract,
    Repel,
}

/// Attracting and repelling directions of all products up to the budget.
fn seed_points(c: &Cocycle, budget: &SearchBudget) -> Vec<(f64, Tag)> {
    let k = c.k();
    let mut pts = Vec::new();
    let mut total = 0usize;
    let mut n = 1;
    loop {
        let count = k.pow(n as u32);
        if n > 4 && total + count > budget.max_products {
            break;
        }
        for w in words_of_length(k, n) {
            let p = c.scaled_product(&w).m;
            if let Some(e) = real_eigen(p) {
                if e.lambda_hi.abs() > e.lambda_lo.abs() * (1.0 + 1e-9) {
                    pts.push((e.dir_hi, Tag::Attract));
                    pts.push((e.dir_lo, Tag::Repel));
                }
            }
        }
        total += count;
        n += 1;
        if n > 24 {
            break;
        }
    }
    pts
}

/// Cyclic runs of equally tagged points, as arcs.
fn runs(mut pts: Vec<(f64, Tag)>) -> Option<Vec<(ProjInterval, Tag)>> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if a.1 != b.1 && angle(a.0, b.0) < 1e-9 {
            return None;
        }
    }
    let first_change = (0..n).find(|&i| pts[i].1 != pts[(i + n - 1) % n].1)?;
    let mut out = Vec::new();
    let mut i = first_change;
    let mut done = 0;
    while done < n {
        let tag = pts[i].1;
        let start = pts[i].0;
        let mut last = start;
        while done < n && pts[i].1 == tag {
            last = pts[i].0;
            i = (i + 1) % n;
            done += 1;
        }
        out.push((ProjInterval::from_endpoints(start, last), tag));
    }
    Some(out)
}

/// Search for a forward-invariant multicone.
///
/// Seeds are the attracting and repelling directions of all products up to
/// the budget. Their cyclic runs give hulls of the forward and backward
/// attractors; candidate cones widen the forward hulls part of the way
/// towards the neighbouring backward hulls. Among invariant candidates,
/// forward no-overlap is preferred, then no-overlap of the complement,
/// and remaining ties go to the middle level. `None` means the search
/// was inconclusive.
pub fn find_multicone(c: &Cocycle, budget: &SearchBudget) -> Option<MulticoneFound> {
    let pts = seed_points(c, budget);
    if pts.is_empty() {
        return None;
    }
    let arcs = runs(pts)?;
    let cap = budget.max_components.unwrap_or(c.k() * c.k()).max(1);
    if arcs.len() / 2 > cap {
        return None;
    }
    let n = arcs.len();
    let mut scored: Vec<(usize, MulticoneFound)> = Vec::new();
    for lvl in 1..=budget.levels {
        let t = lvl as f64 / (budget.levels + 1) as f64;
        let mut comps = Vec::new();
        for i in 0..n {
            let (arc, tag) = arcs[i];
            if tag != Tag::Attract {
                continue;
            }
            let prev = arcs[(i + n - 1) % n].0;
            let next = arcs[(i + 1) % n].0;
            let before = ccw_dist(prev.end(), arc.start);
            let after = ccw_dist(arc.end(), next.start);
            comps.push(arc.widen(t * before, t * after));
        }
        let Ok(mc) = Multicone::new(comps) else { continue };
        if !is_forward_invariant(c, &mc) {
            continue;
        }
        let fwd = check_noc(c, &mc, NocDirection::Forward).unwrap_or(false);
        let bwd = check_noc(c, &mc, NocDirection::Backward).unwrap_or(false);
        scored.push((2 * fwd as usize + bwd as usize, MulticoneFound { multicone: mc, noc_forward: fwd, noc_backward: bwd }));
    }
    let best = scored.iter().map(|s| s.0).max()?;
    let top: Vec<&MulticoneFound> = scored.iter().filter(|s| s.0 == best).map(|s| &s.1).collect();
    Some(top[top.len() / 2].clone())
}

/// Piecewise metric on an invariant multicone: a rescaled Hilbert metric inside
/// each component and an integer separation time across components.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedMetric {
    pub multicone: Multicone,
    /// Arcs `U_j` strictly containing each component, mapped into the cone.
    pub neighborhoods: Vec<ProjInterval>,
    /// Factor applied to the Hilbert metric so each component has diameter at most 1/2.
    pub scale: f64,
    /// `ell[p][q]`: steps needed before images of components `p` and `q` share a component.
    pub ell: Vec<Vec<usize>>,
    /// Comparison constant with the angle metric inside components.
    pub c1: f64,
}

impl AdaptedMetric {
    fn hilbert(&self, j: usize, x: f64, y: f64) -> f64 {
        let u = self.neighborhoods[j];
        let (sx, sy, l) = (u.offset(x), u.offset(y), u.length);
        let r = ((sy.sin() * (l - sx).sin()) / (sx.sin() * (l - sy).sin())).ln();
        0.5 * r.abs()
    }

    pub fn distance(&self, x: f64, y: f64) -> Result<f64> {
        let cx = self.multicone.component_of(x).ok_or(CocycleError::OutsideCone { angle: x })?;
        let cy = self.multicone.component_of(y).ok_or(CocycleError::OutsideCone { angle: y })?;
        if cx == cy {
            Ok(self.scale * self.hilbert(cx, x, y))
        } else {
            Ok(self.ell[cx][cy] as f64)
        }
    }
}

/// Hilbert density `½ sin L / (sin s sin(L − s))` at offset `s` in an arc of length `L`.
fn hilbert_density(s: f64, l: f64) -> f64 {
    0.5 * l.sin() / (s.sin() * (l - s).sin())
}

pub fn build_adapted_metric(mc: &Multicone, c: &Cocycle) -> Result<AdaptedMetric> {
    let maps = component_maps(c, mc)
        .ok_or_else(|| CocycleError::InvalidCertificate("adapted metric needs an invariant multicone".into()))?;
    let comps = mc.components();
    let n = comps.len();
    let min_gap = complementary(mc).components().iter().map(|g| g.length).fold(PI, f64::min);

    // Largest margin whose widened arcs still land inside the cone.
    let mut eta = 0.45 * min_gap;
    let mut nbhd = Vec::new();
    for _ in 0..80 {
        let cand: Vec<ProjInterval> = comps.iter().map(|c| c.widen(eta, eta)).collect();
        let fits = cand.iter().all(|u| u.length < PI)
            && c.mats().iter().all(|&a| {
                cand.iter().all(|u| {
                    let img = u.image(a);
                    comps.iter().any(|t| t.contains_interval(&img, 0.0))
                })
            });
        if fits {
            nbhd = cand;
            break;
        }
        eta *= 0.5;
    }
    if nbhd.is_empty() {
        return Err(CocycleError::InvalidCertificate("no neighbourhood maps into the cone".into()));
    }

    let mut diam: f64 = 0.0;
    let mut rho_min = f64::INFINITY;
    let mut rho_max: f64 = 0.0;
    let mut fold: f64 = 1.0;
    for (comp, u) in comps.iter().zip(&nbhd) {
        let (s0, l) = (u.offset(comp.start), u.length);
        let s1 = s0 + comp.length;
        let d = 0.5 * ((s1.sin() * (l - s0).sin()) / (s0.sin() * (l - s1).sin())).ln().abs();
        diam = diam.max(d);
        rho_min = rho_min.min(hilbert_density(0.5 * l, l));
        rho_max = rho_max.max(hilbert_density(s0, l)).max(hilbert_density(s1, l));
        if comp.length > PI / 2.0 {
            fold = fold.max(comp.length / (PI - comp.length));
        }
    }
    let scale = if diam > 0.5 { 0.5 / diam } else { 1.0 };
    let c1 = (scale * rho_max * fold).max(1.0 / (scale * rho_min)).max(1.0) * (1.0 + 1e-12);

    let ell = separation_times(&maps, n)?;
    Ok(AdaptedMetric { multicone: mc.clone(), neighborhoods: nbhd, scale, ell, c1 })
}

/// `ℓ(p, p) = 0`, `ℓ(p, q) = 1 + max_i ℓ(σ_i p, σ_i q)`.
fn separation_times(maps: &[Vec<usize>], n: usize) -> Result<Vec<Vec<usize>>> {
    const UNSET: usize = usize::MAX;
    const ACTIVE: usize = usize::MAX - 1;
    let mut memo = vec![vec![UNSET; n]; n];
    fn visit(p: usize, q: usize, maps: &[Vec<usize>], memo: &mut Vec<Vec<usize>>) -> Result<usize> {
        if p == q {
            return Ok(0);
        }
        match memo[p][q] {
            UNSET => {}
            ACTIVE => {
                return Err(CocycleError::InvalidCertificate(
                    "component images never merge; separation time is infinite".into(),
                ))
            }
            v => return Ok(v),
        }
        memo[p][q] = ACTIVE;
        let mut worst = 0;
        for sigma in maps {
            worst = worst.max(visit(sigma[p], sigma[q], maps, memo)?);
        }
        memo[p][q] = worst + 1;
        Ok(worst + 1)
    }
    let mut out = vec![vec![0; n]; n];
    for p in 0..n {
        for q in 0..n {
            out[p][q] = visit(p, q, maps, &mut memo)?;
        }
    }
    Ok(out)
}

/// Empirical Lipschitz constant of the generators in the adapted metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub tau: f64,
    pub pairs: usize,
    /// `tau < 1`.
    pub contracting: bool,
}

pub const DEFAULT_CONTRACTION_PAIRS: usize = 4096;

/// Supremum of `d(Ax, Ay) / d(x, y)` over sampled pairs and generators.
///
/// Half of the pairs in each component are close together, so the
/// infinitesimal rate is seen; the rest are spread uniformly. A fixed
/// seed keeps the estimate reproducible.
pub fn contraction_factor(metric: &AdaptedMetric, c: &Cocycle, pairs_per_component: usize) -> ContractionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let comps = metric.multicone.components();
    let mut pairs = Vec::new();
    for comp in comps {
        for i in 0..pairs_per_component {
            let x = comp.start + rng.gen::<f64>() * comp.length;
            let y = if i % 2 == 0 {
                let h = comp.length * 1e-5;
                if x + h <= comp.start + comp.length { x + h } else { x - h }
            } else {
                comp.start + rng.gen::<f64>() * comp.length
            };
            pairs.push((wrap_pi(x), wrap_pi(y)));
        }
    }
    for p in comps {
        for q in comps {
            if p == q {
                continue;
            }
            for _ in 0..16 {
                let x = p.start + rng.gen::<f64>() * p.length;
                let y = q.start + rng.gen::<f64>() * q.length;
                pairs.push((wrap_pi(x), wrap_pi(y)));
            }
        }
    }
    let mut tau: f64 = 0.0;
    let mut used = 0;
    for &(x, y) in &pairs {
        let Ok(d0) = metric.distance(x, y) else { continue };
        if !(d0 > 0.0) {
            continue;
        }
        used += 1;
        for &a in c.mats() {
            let r = match metric.distance(proj_act(a, x), proj_act(a, y)) {
                Ok(d1) => d1 / d0,
                Err(_) => f64::INFINITY,
            };
            tau = tau.max(r);
        }
    }
    ContractionReport { tau, pairs: used, contracting: tau < 1.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_cone() -> Multicone {
        Multicone::single(0.0, PI / 2.0).unwrap()
    }

    #[test]
    fn image_of_standard_cone() {
        let img = mc_image(&std_cone(), Mat2::new(2.0, 1.0, 1.0, 1.0));
        assert_eq!(img.len(), 1);
        assert!((img[0].start - 0.5f64.atan()).abs() < 1e-12);
        assert!((img[0].length - (PI / 4.0 - 0.5f64.atan())).abs() < 1e-12);
        assert!((img[0].length - 0.3217505544).abs() < 1e-9);
    }

    #[test]
    fn orientation_reversing_image() {
        let arc = ProjInterval::new(0.1, 0.3).unwrap();
        let img = arc.image(Mat2::diag(1.0, -1.0));
        assert!((img.start - (PI - 0.4)).abs() < 1e-12);
        assert!((img.length - 0.3).abs() < 1e-12);
    }

    #[test]
    fn complement_of_standard_cone() {
        let co = complementary(&std_cone());
        assert_eq!(co.len(), 1);
        assert!((co.components()[0].start - PI / 2.0).abs() < 1e-15);
        assert!((co.components()[0].length - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn invariance_needs_clearance() {
        let pos = Cocycle::new(vec![Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::new(1.0, 1.0, 1.0, 2.0)]).unwrap();
        assert!(is_forward_invariant(&pos, &std_cone()));
        // The shear fixes the boundary ray θ = 0, so there is no clearance.
        let shear = Cocycle::new(vec![Mat2::new(1.0, 1.0, 0.0, 1.0)]).unwrap();
        assert!(!is_forward_invariant(&shear, &std_cone()));
    }

    #[test]
    fn search_on_simple_cases() {
        let rot = Cocycle::new(vec![Mat2::rotation(1.0)]).unwrap();
        assert!(find_multicone(&rot, &SearchBudget::default()).is_none());
        let d = Cocycle::new(vec![Mat2::diag(2.0, 0.5)]).unwrap();
        let f = find_multicone(&d, &SearchBudget::default()).unwrap();
        assert_eq!(f.multicone.len(), 1);
        assert!(f.multicone.components()[0].contains_strictly(0.0, 0.1));
        assert!(!f.multicone.contains(PI / 2.0));
        assert!(f.noc_forward && f.noc_backward);
    }

    #[test]
    fn positive_pair_cone_contains_attractor() {
        let pos = Cocycle::new(vec![Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::new(1.0, 1.0, 1.0, 2.0)]).unwrap();
        let f = find_multicone(&pos, &SearchBudget::default()).unwrap();
        let lo = ((5f64.sqrt() - 1.0) / 2.0).atan();
        let hi = ((5f64.sqrt() + 1.0) / 2.0).atan();
        let comp = f.multicone.components()[0];
        assert!(comp.contains_strictly(lo, 1e-3) && comp.contains_strictly(hi, 1e-3));
        assert!(f.noc_forward);
        // Backward no-overlap needs its own cone for the inverses.
        let g = find_multicone(&inverse_cocycle_of(&pos), &SearchBudget::default()).unwrap();
        assert!(g.noc_forward);
    }

    #[test]
    fn noc_single_generator_is_true() {
        let d = Cocycle::new(vec![Mat2::diag(2.0, 0.5)]).unwrap();
        let mc = Multicone::single(wrap_pi(-0.5), 1.0).unwrap();
        assert!(check_noc(&d, &mc, NocDirection::Forward).unwrap());
        assert!(check_noc(&d, &mc, NocDirection::Backward).unwrap());
        let bad = Multicone::single(0.5, 0.5).unwrap();
        assert!(matches!(check_noc(&d, &bad, NocDirection::Forward), Err(CocycleError::InvalidCertificate(_))));
    }

    #[test]
    fn metric_properties() {
        let d = Cocycle::new(vec![Mat2::diag(4.0, 0.25)]).unwrap();
        let mc = Multicone::single(wrap_pi(-0.6), 1.2).unwrap();
        let m = build_adapted_metric(&mc, &d).unwrap();
        assert!(m.distance(wrap_pi(-0.6), 0.6).unwrap() <= 0.5 + 1e-9);
        let (x, y) = (0.1, wrap_pi(-0.3));
        assert_eq!(m.distance(x, y).unwrap(), m.distance(y, x).unwrap());
        // Local rate at the fixed point equals the projective derivative there.
        let h = 1e-6;
        let a = Mat2::diag(4.0, 0.25);
        let r = m.distance(proj_act(a, h), proj_act(a, wrap_pi(-h))).unwrap() / m.distance(h, wrap_pi(-h)).unwrap();
        assert!((r - 1.0 / 16.0).abs() < 1e-6);
        let rep = contraction_factor(&m, &d, 512);
        assert!(rep.contracting && rep.tau < 0.1);
        let id = Cocycle::new(vec![Mat2::IDENTITY]).unwrap();
        let rep = contraction_factor(&m, &id, 64);
        assert!((rep.tau - 1.0).abs() < 1e-12 && !rep.contracting);
    }
}
