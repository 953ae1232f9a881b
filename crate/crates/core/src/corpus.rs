//! Named example cocycles. The constructed ones are built from their defining
//! constraints and re-checked on the spot.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cocycle::Cocycle;
use crate::error::{CocycleError, Result};
use crate::geom2::{ccw_dist, classify_configuration, cross_ratio, real_eigen, Configuration, Mat2, Vec2};

/// On-disk cocycle: a name and row-major matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleFile {
    pub name: String,
    pub matrices: Vec<Mat2>,
}

impl CocycleFile {
    pub fn cocycle(&self) -> Result<Cocycle> {
        Cocycle::new(self.matrices.clone())
    }
}

/// What is known about an example in advance. `None` means no claim.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub dominated: Option<bool>,
    pub noc_forward: Option<bool>,
    pub noc_backward: Option<bool>,
    /// Periodic roots (1-based) whose orbits make up the Mather set.
    pub mather_top: Option<Vec<String>>,
    pub mather_bottom: Option<Vec<String>>,
    /// Known exponent values, keyed `top` / `bottom`.
    pub exponents: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedExample {
    pub name: String,
    pub description: String,
    pub cocycle: Cocycle,
    pub expected: Expected,
}

impl NamedExample {
    pub fn file(&self) -> CocycleFile {
        CocycleFile { name: self.name.clone(), matrices: self.cocycle.mats().to_vec() }
    }
}

fn roots(r: &[&str]) -> Option<Vec<String>> {
    Some(r.iter().map(|s| s.to_string()).collect())
}

fn example(name: &str, description: &str, mats: Vec<Mat2>, expected: Expected) -> NamedExample {
    NamedExample {
        name: name.into(),
        description: description.into(),
        cocycle: Cocycle::new(mats).expect("corpus matrices are invertible"),
        expected,
    }
}

/// `A₁ = diag(1/α, α)`, `A₂ = [[1/β, 0], [1, β]]`: forward no-overlap holds, backward fails.
pub fn noc_remark_example(alpha: f64, beta: f64) -> Result<NamedExample> {
    if !(alpha > 0.0 && beta > 0.0 && alpha * alpha + beta * beta < 1.0) {
        return Err(CocycleError::Domain(format!("need α, β > 0 and α² + β² < 1, got ({alpha}, {beta})")));
    }
    Ok(example(
        "noc-remark",
        "forward no-overlap without backward no-overlap",
        vec![Mat2::diag(1.0 / alpha, alpha), Mat2::new(1.0 / beta, 0.0, 1.0, beta)],
        Expected { dominated: Some(true), noc_forward: Some(true), noc_backward: Some(false), ..Default::default() },
    ))
}

/// `(u_L, s_L)` of a hyperbolic matrix.
fn axes(m: Mat2) -> (f64, f64) {
    let e = real_eigen(m).expect("hyperbolic");
    (e.dir_hi, e.dir_lo)
}

/// Whether the points are met in this order going once around P¹, in one
/// of the two orientations; returns the orientation (`1` ccw, `-1` cw).
pub fn cyclic_orientation(pts: &[f64]) -> Option<i8> {
    let walk = |p: &[f64]| {
        let n = p.len();
        let gaps: Vec<f64> = (0..n).map(|i| ccw_dist(p[i], p[(i + 1) % n])).collect();
        gaps.iter().all(|&g| g > 1e-9) && (gaps.iter().sum::<f64>() - PI).abs() < 1e-9
    };
    let rev: Vec<f64> = pts.iter().rev().copied().collect();
    if walk(pts) {
        Some(1)
    } else if walk(&rev) {
        Some(-1)
    } else {
        None
    }
}

/// `x` strictly inside the arc from `a` to `b` taken in orientation `o`.
fn between(o: i8, a: f64, x: f64, b: f64) -> bool {
    let (a, b) = if o > 0 { (a, b) } else { (b, a) };
    let (dx, db) = (ccw_dist(a, x), ccw_dist(a, b));
    dx > 1e-9 && dx < db - 1e-9
}

/// Every defining constraint of the heteroclinic triple, by name.
pub fn heteroclinic_constraints(c: &Cocycle) -> Vec<(&'static str, bool)> {
    let (a1, a2, a3) = (c.gen(0), c.gen(1), c.gen(2));
    let unit = |m: Mat2| (m.det() - 1.0).abs() < 1e-9;
    let (u1, s1) = axes(a1);
    let (u2, s2) = axes(a2);
    let (u21, s21) = axes(a2 * a1);
    let (u12, s12) = axes(a1 * a2);
    let (u3, s3) = axes(a3);
    let order = cyclic_orientation(&[u2, u21, s21, s1, u1, u12, s12, s2]);
    let o = order.unwrap_or(1);
    let hit = a3.apply(Vec2::from_angle(u2)).cross(Vec2::from_angle(s1)).abs() / a3.apply(Vec2::from_angle(u2)).norm();
    vec![
        ("unit determinants", unit(a1) && unit(a2) && unit(a3)),
        ("tr A1 > 2", a1.trace() > 2.0),
        ("tr A2 > 2", a2.trace() > 2.0),
        ("tr A1A2 < -2", (a1 * a2).trace() < -2.0),
        ("A3 hyperbolic", a3.trace().abs() > 2.0),
        ("cyclic order of axes", order.is_some()),
        ("u_A3 in (s_A1, u_A1)", between(o, s1, u3, u1)),
        ("s_A3 in (s_A2, u_A2)", between(o, s2, s3, u2)),
        ("A3 u_A2 = s_A1", hit < 1e-9),
    ]
}

/// Triple `(A₁, A₂, A₃)` in SL(2,ℝ) with a heteroclinic connection `A₃ u_{A₂} = s_{A₁}`:
/// not uniformly hyperbolic, yet every periodic orbit has a positive exponent.
pub fn heteroclinic_example() -> NamedExample {
    let (s1, u1, s2, u2) = (0.0, 0.5, 1.0, 1.5);
    let a1 = Mat2::from_eigen(u1, 2.0, s1, 0.5).expect("distinct axes");
    let a2 = Mat2::from_eigen(u2, 2.0, s2, 0.5).expect("distinct axes");
    let u3 = s1 + 0.2 * (u1 - s1);
    let s3 = s2 + 0.2 * (u2 - s2);
    // Coordinates in the eigenbasis (u3, s3): A3 multiplies them by (μ, 1/μ),
    // and μ is fixed by asking A3 u_A2 to be parallel to s_A1.
    let coords = |t: f64| {
        let (eu, es, v) = (Vec2::from_angle(u3), Vec2::from_angle(s3), Vec2::from_angle(t));
        let d = eu.cross(es);
        (v.cross(es) / d, eu.cross(v) / d)
    };
    let (p, q) = coords(u2);
    let (r, s) = coords(s1);
    let mu = (q * r / (p * s)).sqrt();
    let a3 = Mat2::from_eigen(u3, mu, s3, 1.0 / mu).expect("distinct axes");
    let ex = example(
        "heteroclinic",
        "triple with a heteroclinic connection and no minimizing measure for the bottom exponent",
        vec![a1, a2, a3],
        Expected { dominated: Some(false), flags: vec!["no minimizing measure expected".into()], ..Default::default() },
    );
    for (name, ok) in heteroclinic_constraints(&ex.cocycle) {
        assert!(ok, "heteroclinic construction: {name} fails");
    }
    ex
}

/// Configuration of the oriented axis geodesics `v₂(A₁) → v₁(A₁)` and `v₂(A₂) → v₁(A₂)`.
pub fn axis_configuration(a1: Mat2, a2: Mat2) -> Configuration {
    let (x1, x2) = axes(a1);
    let (y1, y2) = axes(a2);
    let cr = cross_ratio(Vec2::from_angle(x1), Vec2::from_angle(y1), Vec2::from_angle(x2), Vec2::from_angle(y2))
        .expect("distinct axes");
    classify_configuration(cr)
}

const NONUNIQUE_CHI: f64 = 3.0;

/// Pair with equal top eigenvalues whose Mather set for `mode` is the two fixed
/// points. `A₂` is the mirror image of `A₁` in the vertical axis; the axes of
/// `A₁` are `π/2 − 0.3` (expanding) and `2.8` (Top: crossing axes) or `0.2`
/// (Bottom: coparallel axes).
pub fn nonunique_example(mode: crate::cocycle::Mode) -> NamedExample {
    use crate::cocycle::Mode;
    let chi = NONUNIQUE_CHI;
    let stable = match mode {
        Mode::Top => 2.8,
        Mode::Bottom => 0.2,
    };
    let a1 = Mat2::from_eigen(PI / 2.0 - 0.3, chi, stable, 1.0 / chi).expect("distinct axes");
    let mirror = Mat2::diag(-1.0, 1.0);
    let a2 = mirror * a1 * mirror;
    let (w1, w2) = (real_eigen(a1).expect("hyperbolic"), real_eigen(a2).expect("hyperbolic"));
    assert!(w1.lambda_lo > 0.0 && w2.lambda_lo > 0.0, "eigenvalues must be positive");
    assert!((w1.lambda_hi - w2.lambda_hi).abs() < 1e-12, "top eigenvalues must agree");
    let config = axis_configuration(a1, a2);
    let want = match mode {
        Mode::Top => Configuration::Crossing,
        Mode::Bottom => Configuration::Coparallel,
    };
    assert_eq!(config, want, "axis configuration");
    let mut expected = Expected { dominated: Some(true), noc_forward: Some(true), noc_backward: Some(true), ..Default::default() };
    match mode {
        Mode::Top => {
            expected.mather_top = roots(&["1", "2"]);
            expected.exponents.insert("top".into(), chi.ln());
        }
        Mode::Bottom => {
            expected.mather_bottom = roots(&["1", "2"]);
            expected.exponents.insert("bottom".into(), chi.ln());
        }
    }
    example(
        &format!("nonunique-{}", mode.name()),
        "pair whose Mather set for this mode is the two fixed points",
        vec![a1, a2],
        expected,
    )
}

/// `(H, c R_θ)` with `H = diag(3/2, 2/3)`.
pub fn no_minimizer_simple(c_scale: f64, theta: f64) -> Result<NamedExample> {
    if !(c_scale > 0.0) {
        return Err(CocycleError::Domain("scale must be positive".into()));
    }
    let h = Mat2::diag(1.5, 1.0 / 1.5);
    let mut flags = Vec::new();
    if c_scale == 1.0 && theta == 0.0 {
        flags.push("degenerate: the identity generator is a trivial minimizer".to_string());
    } else if c_scale > 1.0 {
        flags.push("no minimizing measure for the top exponent expected".to_string());
    } else if c_scale < 1.0 {
        flags.push("no maximizing measure for the second exponent expected".to_string());
    }
    Ok(example(
        "no-minimizer",
        "a hyperbolic matrix together with a scaled rotation",
        vec![h, Mat2::rotation(theta).scale(c_scale)],
        Expected { dominated: Some(false), flags, ..Default::default() },
    ))
}

pub const GOLDEN_ANGLE: f64 = PI * 0.763_932_022_500_210_3; // π (3 − √5)

/// Every named example, with default parameters, in listing order.
pub fn all_examples() -> Vec<NamedExample> {
    use crate::cocycle::Mode;
    let ln2 = 2f64.ln();
    let ln3 = 3f64.ln();
    vec![
        example(
            "diag",
            "single generator diag(2, 1/2)",
            vec![Mat2::diag(2.0, 0.5)],
            Expected {
                dominated: Some(true),
                noc_forward: Some(true),
                noc_backward: Some(true),
                mather_top: roots(&["1"]),
                mather_bottom: roots(&["1"]),
                exponents: [("top".to_string(), ln2), ("bottom".to_string(), ln2)].into(),
                ..Default::default()
            },
        ),
        example(
            "diagonal-pair",
            "diag(2, 1/2) and diag(3, 1/3)",
            vec![Mat2::diag(2.0, 0.5), Mat2::diag(3.0, 1.0 / 3.0)],
            Expected {
                dominated: Some(true),
                mather_top: roots(&["2"]),
                mather_bottom: roots(&["1"]),
                exponents: [("top".to_string(), ln3), ("bottom".to_string(), ln2)].into(),
                ..Default::default()
            },
        ),
        example(
            "positive-pair",
            "[[2,1],[1,1]] and [[1,1],[1,2]]",
            vec![Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::new(1.0, 1.0, 1.0, 2.0)],
            Expected {
                dominated: Some(true),
                noc_forward: Some(true),
                noc_backward: Some(true),
                mather_top: roots(&["1", "2"]),
                mather_bottom: roots(&["12", "21"]),
                exponents: [
                    ("top".to_string(), (1.5 + 1.25f64.sqrt()).ln()),
                    ("bottom".to_string(), 0.5 * (3.0 + 8f64.sqrt()).ln()),
                ]
                .into(),
                ..Default::default()
            },
        ),
        example(
            "dominant-pair",
            "[[2,1],[1,1]] and [[4,1],[1,1]]; the second generator dominates",
            vec![Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::new(4.0, 1.0, 1.0, 1.0)],
            Expected {
                dominated: Some(true),
                mather_top: roots(&["2"]),
                exponents: [("top".to_string(), ((5.0 + 13f64.sqrt()) / 2.0).ln())].into(),
                ..Default::default()
            },
        ),
        noc_remark_example(0.6, 0.6).expect("valid parameters"),
        nonunique_example(Mode::Top),
        nonunique_example(Mode::Bottom),
        heteroclinic_example(),
        no_minimizer_simple(1.5, GOLDEN_ANGLE).expect("valid parameters"),
        example(
            "rotations",
            "two irrational rotations",
            vec![Mat2::rotation(1.0), Mat2::rotation(2f64.sqrt())],
            Expected { dominated: Some(false), ..Default::default() },
        ),
        example(
            "rotation-contraction",
            "rotation by 1 rad and diag(1/2, 2)",
            vec![Mat2::rotation(1.0), Mat2::diag(0.5, 2.0)],
            Expected { dominated: Some(false), flags: vec!["contraction scheme expected".into()], ..Default::default() },
        ),
    ]
}

pub fn by_name(name: &str) -> Option<NamedExample> {
    all_examples().into_iter().find(|e| e.name == name)
}
