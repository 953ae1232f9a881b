//! Maximizing and minimizing Barabanov functions on an invariant multicone.
//!
//! A table holds `f` on a grid of directions; `p(x) = f(x') + log |x|` then
//! satisfies `max_i p(A_i x) = p(x) + β` (or `min`) up to the recorded residual.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{Cocycle, Mode, Word};
use crate::error::{CocycleError, Result};
use crate::geom2::{angle, log_gain, proj_act, Vec2};
use crate::multicone::Multicone;
use crate::splitting::{e1_estimate, DominationCertificate};

/// Directions sampled uniformly in angle inside each component.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub multicone: Multicone,
    pub angles: Vec<f64>,
    /// `ranges[j] = (first index, point count)` for component `j`.
    pub ranges: Vec<(usize, usize)>,
}

impl Grid {
    pub fn new(mc: &Multicone, size: usize) -> Result<Self> {
        if size < 64 {
            return Err(CocycleError::Domain("grid needs at least 64 points".into()));
        }
        let total: f64 = mc.components().iter().map(|c| c.length).sum();
        let mut angles = Vec::with_capacity(size);
        let mut ranges = Vec::new();
        for comp in mc.components() {
            let n = ((size as f64 * comp.length / total).round() as usize).max(2);
            ranges.push((angles.len(), n));
            for j in 0..n {
                angles.push(crate::geom2::wrap_pi(comp.start + comp.length * j as f64 / (n - 1) as f64));
            }
        }
        Ok(Self { multicone: mc.clone(), angles, ranges })
    }

    /// Largest angular spacing between neighbouring grid points.
    pub fn spacing(&self) -> f64 {
        self.multicone
            .components()
            .iter()
            .zip(&self.ranges)
            .map(|(c, &(_, n))| c.length / (n - 1) as f64)
            .fold(0.0, f64::max)
    }

    /// Linear interpolation weights `(i, j, t)` meaning `(1 − t) v_i + t v_j`.
    fn locate(&self, theta: f64) -> Result<(usize, usize, f64)> {
        let j = self.multicone.component_of(theta).ok_or(CocycleError::OutsideCone { angle: theta })?;
        let comp = self.multicone.components()[j];
        let (first, n) = self.ranges[j];
        let o = comp.offset(theta);
        let o = if o > comp.length { 0.0 } else { o };
        let h = comp.length / (n - 1) as f64;
        let pos = (o / h).min((n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        Ok((first + i, first + i + 1, pos - i as f64))
    }

    pub fn interpolate(&self, values: &[f64], theta: f64) -> Result<f64> {
        let (i, j, t) = self.locate(theta)?;
        Ok((1.0 - t) * values[i] + t * values[j])
    }
}

/// `log |A_i u| / |u|` at direction `theta`.
pub fn h_gain(c: &Cocycle, i: usize, theta: f64) -> f64 {
    log_gain(c.gen(i), Vec2::from_angle(theta))
}

/// One application of the transfer operator `T^⋆` on grid values.
pub fn transfer_apply(grid: &Grid, values: &[f64], c: &Cocycle, mode: Mode) -> Result<Vec<f64>> {
    grid.angles
        .par_iter()
        .map(|&x| {
            let mut best = mode.worst();
            for i in 0..c.k() {
                let y = proj_act(c.gen(i), x);
                let v = grid.interpolate(values, y).map_err(|_| {
                    CocycleError::InvalidCertificate(format!("image of {x} under generator {} leaves the cone", i + 1))
                })?;
                best = mode.better(best, v + h_gain(c, i, x));
            }
            Ok(best)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub grid_size: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { grid_size: 4096, tol: 1e-8, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarabanovTable {
    pub mode: Mode,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub beta: f64,
    pub residual: f64,
    /// Lipschitz constant of the interpolant in the adapted metric.
    pub lipschitz_bound: f64,
    /// Lipschitz constant of the interpolant in angle.
    pub angle_lipschitz: f64,
    pub iterations: usize,
}

/// Precomputed image locations and gains, so each iteration is a gather.
struct Stencil {
    idx: Vec<(usize, usize, f64, f64)>,
    k: usize,
}

impl Stencil {
    fn new(grid: &Grid, c: &Cocycle) -> Result<Self> {
        let k = c.k();
        let mut idx = Vec::with_capacity(grid.angles.len() * k);
        for &x in &grid.angles {
            for i in 0..k {
                let y = proj_act(c.gen(i), x);
                let (a, b, t) = grid.locate(y).map_err(|_| {
                    CocycleError::InvalidCertificate(format!("image of {x} under generator {} leaves the cone", i + 1))
                })?;
                idx.push((a, b, t, h_gain(c, i, x)));
            }
        }
        Ok(Self { idx, k })
    }

    fn apply(&self, f: &[f64], mode: Mode, out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(p, o)| {
            let mut best = mode.worst();
            for &(a, b, t, h) in &self.idx[p * self.k..(p + 1) * self.k] {
                best = mode.better(best, (1.0 - t) * f[a] + t * f[b] + h);
            }
            *o = best;
        });
    }
}

/// Solve `T^⋆ f = f + β` by normalised iteration from `f = 0`.
pub fn solve_barabanov(cert: &DominationCertificate, c: &Cocycle, mode: Mode, opts: &SolveOptions) -> Result<BarabanovTable> {
    let grid = Grid::new(&cert.multicone, opts.grid_size)?;
    let stencil = Stencil::new(&grid, c)?;
    let n = grid.angles.len();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut shifts: Vec<f64> = Vec::new();
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    // Once converged, run ten more steps so that the averaged shifts are all post-convergence.
    let mut settled = None;
    while iterations < opts.max_iter {
        stencil.apply(&f, mode, &mut g);
        let shift = g[0];
        change = 0.0;
        for (fi, gi) in f.iter_mut().zip(&g) {
            let v = gi - shift;
            change = f64::max(change, (v - *fi).abs());
            *fi = v;
        }
        shifts.push(shift);
        iterations += 1;
        if change < opts.tol {
            let since = *settled.get_or_insert(iterations);
            if iterations >= since + 10 {
                break;
            }
        }
    }
    if settled.is_none() || change >= opts.tol {
        return Err(CocycleError::Convergence { iterations, residual: change });
    }
    let tail = &shifts[shifts.len().saturating_sub(10)..];
    let beta = tail.iter().sum::<f64>() / tail.len() as f64;
    stencil.apply(&f, mode, &mut g);
    let residual = f.iter().zip(&g).map(|(fi, gi)| (gi - fi - beta).abs()).fold(0.0, f64::max);

    let mut lip: f64 = 0.0;
    let mut alip: f64 = 0.0;
    for &(first, cnt) in &grid.ranges {
        for p in first..first + cnt - 1 {
            let df = (f[p + 1] - f[p]).abs();
            let (x, y) = (grid.angles[p], grid.angles[p + 1]);
            alip = alip.max(df / angle(x, y));
            if let Ok(d) = cert.metric.distance(x, y) {
                if d > 0.0 {
                    lip = lip.max(df / d);
                }
            }
        }
    }
    Ok(BarabanovTable { mode, grid, values: f, beta, residual, lipschitz_bound: lip, angle_lipschitz: alip, iterations })
}

impl BarabanovTable {
    /// Interpolated `f` at a direction of the cone.
    pub fn f(&self, theta: f64) -> Result<f64> {
        self.grid.interpolate(&self.values, theta)
    }

    /// `f(A_i' x) + h_i(x) − f(x)`: the one-step increment of `p` at direction `x`.
    pub fn increment(&self, c: &Cocycle, i: usize, theta: f64) -> Result<f64> {
        Ok(self.f(proj_act(c.gen(i), theta))? + h_gain(c, i, theta) - self.f(theta)?)
    }

    /// Largest angular spacing; direction estimates finer than this are exact enough.
    pub fn resolution(&self) -> f64 {
        self.grid.spacing()
    }

    /// Write the table as CSV: a header row with mode, beta, residual, then `angle,value` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "mode,beta,residual")?;
        writeln!(w, "{},{:.16e},{:.16e}", self.mode.name(), self.beta, self.residual)?;
        writeln!(w, "angle,value")?;
        for (a, v) in self.grid.angles.iter().zip(&self.values) {
            writeln!(w, "{a:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// `p(x) = f(x') + log |x|`.
pub fn p_star(table: &BarabanovTable, x: Vec2) -> Result<f64> {
    let theta = x.proj_angle();
    let v = table.f(theta).map_err(|_| CocycleError::Domain(format!("direction {theta} is outside the cone")))?;
    Ok(v + x.norm().ln())
}

fn representative(table: &BarabanovTable, cert: &DominationCertificate, c: &Cocycle, past: &[usize]) -> Result<f64> {
    let est = e1_estimate(cert, c, past)?;
    let res = table.resolution();
    if est.radius > res {
        return Err(CocycleError::Precision { radius: est.radius, resolution: res });
    }
    Ok(est.direction)
}

/// `ψ(ω) = p(A_{ω₀} x) − p(x)` with `x ∈ e₁(ω)`, where `ω₀ = window[position]`
/// and the past is `window[..position]`.
pub fn psi_star(table: &BarabanovTable, cert: &DominationCertificate, c: &Cocycle, window: &[usize], position: usize) -> Result<f64> {
    if position >= window.len() {
        return Err(CocycleError::Domain("position outside the window".into()));
    }
    let x = representative(table, cert, c, &window[..position])?;
    table.increment(c, window[position], x)
}

/// Symbols chosen greedily so that each step attains the max (or min) in the
/// extremality relation; ties within `1e-12` go to the lowest index.
pub fn greedy_optimal_future(
    table: &BarabanovTable,
    cert: &DominationCertificate,
    c: &Cocycle,
    past: &[usize],
    steps: usize,
) -> Result<Word> {
    let mut x = representative(table, cert, c, past)?;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..c.k() {
            let v = table.increment(c, i, x)?;
            let better = match (best, table.mode) {
                (None, _) => true,
                (Some((_, b)), Mode::Top) => v > b + 1e-12,
                (Some((_, b)), Mode::Bottom) => v < b - 1e-12,
            };
            if better {
                best = Some((i, v));
            }
        }
        let (i, _) = best.expect("alphabet is nonempty");
        out.push(i);
        x = proj_act(c.gen(i), x);
    }
    Ok(out)
}

/// Serializable summary of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub mode: Mode,
    pub beta: f64,
    pub residual: f64,
    pub lipschitz_bound: f64,
    pub grid_size: usize,
    pub iterations: usize,
}

impl From<&BarabanovTable> for TableSummary {
    fn from(t: &BarabanovTable) -> Self {
        Self {
            mode: t.mode,
            beta: t.beta,
            residual: t.residual,
            lipschitz_bound: t.lipschitz_bound,
            grid_size: t.grid.angles.len(),
            iterations: t.iterations,
        }
    }
}
