//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails. Tolerances are pinned in the constants below.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cocycle_core::barabanov::{solve_barabanov, SolveOptions};
use cocycle_core::cocycle::{words_of_length, Cocycle, Mode, Word};
use cocycle_core::corpus::{all_examples, heteroclinic_example, nonunique_example, NamedExample};
use cocycle_core::entropy_pos::{
    build_bounded_word, checkpoint_norms, class_c_scheme, verify_bounded_lemma, LemmaOutcome,
};
use cocycle_core::geom2::{
    angle, cross_ratio, fiber_log_derivative, hs_norm, mininorm, op_norm, proj_act, singular_values, top_singular, Mat2,
    Vec2,
};
use cocycle_core::mather::{admissible_words, complexity_report, cross_ratio_audit, default_tol, periodic_samples};
use cocycle_core::multicone::SearchBudget;
use cocycle_core::spectral::{
    inverse_cocycle, jsr_bracket, jssr_upper, lambda2_bracket, normalize_cocycle, periodic_exponent,
};
use cocycle_core::splitting::{certify_domination, DominationCertificate};
use cocycle_optim::{cmd_certify, cmd_posent, CertifyOptions, PosentOptions};

const BETA_K1_TOL: f64 = 1e-6;
const RESIDUAL_MAX: f64 = 1e-6;
const SANDWICH_TOL: f64 = 2e-2;
const ENTROPY_DECAY: f64 = 0.5;
const AUDIT_TOL: f64 = 1e-2;
const MIN_PAIRS: usize = 50;
const AUDIT_ELL: usize = 10;
const PAD: usize = 8;
const JSSR_MAX_16: f64 = 0.08;
const PERIODIC_FLOOR: f64 = 0.01;
const LEMMA_SLACK: f64 = 1e-9;
const HS_TOL: f64 = 1e-10;
const CR_TOL: f64 = 1e-8;
const FD_REL_TOL: f64 = 1e-4;
const NORMALIZE_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let t = start.elapsed();
    (t <= limit, format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn dominated() -> Vec<(NamedExample, DominationCertificate)> {
    all_examples()
        .into_iter()
        .filter_map(|e| certify_domination(&e.cocycle, &SearchBudget::default()).map(|c| (e, c)))
        .collect()
}

fn noc_both() -> Vec<(NamedExample, DominationCertificate)> {
    dominated().into_iter().filter(|(_, c)| c.noc_forward && c.noc_backward).collect()
}

fn c1_noc_asymmetry() -> Outcome {
    let e = all_examples().into_iter().find(|e| e.name == "noc-remark").unwrap();
    let start = Instant::now();
    let r = cmd_certify(&e.file(), &e.cocycle, &CertifyOptions::default()).unwrap();
    let (fast, t) = within(Duration::from_secs(1), start);
    let cert = &r.results["certificate"];
    let (f, b) = (cert["noc_forward"].as_bool(), cert["noc_backward"].as_bool());
    outcome(f == Some(true) && b == Some(false) && fast, format!("forward {f:?}, backward {b:?}, {t}"))
}

fn c2_barabanov() -> Outcome {
    let start = Instant::now();
    let opts = SolveOptions { grid_size: 4096, ..SolveOptions::default() };
    let mut worst: f64 = 0.0;
    let mut beta_k1 = f64::NAN;
    let pair = Cocycle::new(vec![Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::new(1.0, 1.0, 1.0, 2.0)]).unwrap();
    let single = Cocycle::new(vec![Mat2::diag(2.0, 0.5)]).unwrap();
    for (c, k1) in [(&pair, false), (&single, true)] {
        let cert = certify_domination(c, &SearchBudget::default()).expect("certified");
        for mode in [Mode::Top, Mode::Bottom] {
            let t = solve_barabanov(&cert, c, mode, &opts).unwrap();
            worst = worst.max(t.residual);
            if k1 && mode == Mode::Top {
                beta_k1 = t.beta;
            }
        }
    }
    let err = (beta_k1 - 2f64.ln()).abs();
    let (fast, t) = within(Duration::from_secs(60), start);
    outcome(
        worst <= RESIDUAL_MAX && err <= BETA_K1_TOL && fast,
        format!("max residual {worst:.2e} (<= {RESIDUAL_MAX:e}), |beta - log 2| {err:.2e} (<= {BETA_K1_TOL:e}), {t}"),
    )
}

fn c3_sandwich() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut n = 0;
    for (e, cert) in dominated() {
        n += 1;
        let c = &e.cocycle;
        let b = jsr_bracket(c, 12).unwrap();
        let ju = jssr_upper(c, 12).unwrap();
        let top = solve_barabanov(&cert, c, Mode::Top, &SolveOptions::default()).unwrap().beta;
        let bot = solve_barabanov(&cert, c, Mode::Bottom, &SolveOptions::default()).unwrap().beta;
        if !b.contains(top, SANDWICH_TOL) {
            bad.push(format!("{} top {top:.5} vs [{:.5}, {:.5}]", e.name, b.lower, b.upper));
        }
        if bot > ju + SANDWICH_TOL {
            bad.push(format!("{} bottom {bot:.5} vs {ju:.5}", e.name));
        }
    }
    let (fast, t) = within(Duration::from_secs(300), start);
    outcome(bad.is_empty() && fast && n > 0, format!("{n} dominated examples, tol {SANDWICH_TOL:e}, {t} {bad:?}"))
}

fn c4_zero_entropy() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (e, cert) in noc_both() {
        let c = &e.cocycle;
        for mode in [Mode::Top, Mode::Bottom] {
            let t = solve_barabanov(&cert, c, mode, &SolveOptions::default()).unwrap();
            let r = complexity_report(&t, &cert, c, 12, PAD, default_tol(&t)).unwrap();
            let h = &r.entropy_estimates[3..];
            let mono = h.windows(2).all(|p| p[1] <= p[0]);
            let (first, last) = (h[0], *h.last().unwrap());
            let decays = last <= ENTROPY_DECAY * first;
            summary.push(format!("{}/{}: {:.3}->{:.3}", e.name, mode.name(), first, last));
            if !(mono && decays) {
                bad.push(format!("{}/{} counts {:?}", e.name, mode.name(), r.counts));
            }
        }
    }
    let (fast, t) = within(Duration::from_secs(600), start);
    outcome(bad.is_empty() && fast, format!("{} {t} {bad:?}", summary.join(", ")))
}

fn c5_cross_ratio() -> Outcome {
    let mut violations = 0;
    let mut min_pairs = usize::MAX;
    let mut summary = Vec::new();
    for (e, cert) in noc_both() {
        let c = &e.cocycle;
        for mode in [Mode::Top, Mode::Bottom] {
            let t = solve_barabanov(&cert, c, mode, &SolveOptions::default()).unwrap();
            let words = admissible_words(&t, &cert, c, AUDIT_ELL, PAD, default_tol(&t)).unwrap();
            let a = cross_ratio_audit(&cert, c, mode, &words, AUDIT_TOL, 1000).unwrap();
            violations += a.violations.len();
            min_pairs = min_pairs.min(a.pairs.len());
            summary.push(format!("{}/{}: {} pts {} pairs", e.name, mode.name(), periodic_samples(&words).len(), a.pairs.len()));
        }
    }
    outcome(
        violations == 0 && min_pairs >= MIN_PAIRS,
        format!("{violations} violations at tol {AUDIT_TOL:e}; fewest pairs {min_pairs} (need {MIN_PAIRS}); {}", summary.join(", ")),
    )
}

fn c6_nonunique() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for mode in [Mode::Top, Mode::Bottom] {
        let e = nonunique_example(mode);
        let c = &e.cocycle;
        let cert = certify_domination(c, &SearchBudget::default()).expect("certified");
        let t = solve_barabanov(&cert, c, mode, &SolveOptions::default()).unwrap();
        for ell in 1..=8 {
            let got = admissible_words(&t, &cert, c, ell, PAD, default_tol(&t)).unwrap();
            let want: Vec<Word> = vec![vec![0; ell], vec![1; ell]];
            if got != want {
                bad.push(format!("{}: ell {ell} gives {} words", mode.name(), got.len()));
            }
        }
    }
    let (fast, t) = within(Duration::from_secs(120), start);
    outcome(bad.is_empty() && fast, format!("ell 1..8, pad {PAD}, default tol, {t} {bad:?}"))
}

fn c7_no_minimizer() -> Outcome {
    let start = Instant::now();
    let e = heteroclinic_example();
    let c = &e.cocycle;
    let js: Vec<f64> = [4, 8, 12, 16].iter().map(|&n| jssr_upper(c, n).unwrap()).collect();
    let strict = js.windows(2).all(|p| p[1] < p[0]);
    let mut floor = f64::INFINITY;
    for n in 1..=8 {
        for w in words_of_length(c.k(), n) {
            floor = floor.min(periodic_exponent(c, &w).unwrap());
        }
    }
    let (fast, t) = within(Duration::from_secs(120), start);
    outcome(
        strict && js[3] <= JSSR_MAX_16 && floor >= PERIODIC_FLOOR && fast,
        format!("jssr_upper at 4,8,12,16 = {js:.4?} (last <= {JSSR_MAX_16}); min periodic exponent {floor:.4} (>= {PERIODIC_FLOOR}); {t}"),
    )
}

fn random_sl2(rng: &mut ChaCha8Rng, max_norm: f64) -> Mat2 {
    let s = rng.gen_range(1.0..max_norm);
    Mat2::rotation(rng.gen_range(0.0..PI)) * Mat2::diag(s, 1.0 / s) * Mat2::rotation(rng.gen_range(0.0..PI))
}

fn c8_bounded_products() -> Outcome {
    let start = Instant::now();
    let (big_c, kappa): (f64, f64) = (3.0, 0.8);
    let bound = 2f64.sqrt() * big_c / (1.0 - kappa * kappa).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut lemma_ok = true;
    for _ in 0..1000 {
        let mut bs = Vec::with_capacity(200);
        let mut p = Mat2::IDENTITY;
        while bs.len() < 200 {
            // Rejection sampling against the hypotheses.
            let b = random_sl2(&mut rng, big_c);
            let (s1, s2) = singular_values(p);
            let bv = if s1 - s2 <= 1e-12 * s1 { mininorm(b).unwrap() } else { b.apply(top_singular(p).2).norm() };
            if bv <= kappa {
                bs.push(b);
                p = b * p;
                worst = worst.max(op_norm(p));
            }
        }
        lemma_ok &= verify_bounded_lemma(&bs, big_c, kappa).unwrap() == LemmaOutcome::Holds;
    }
    let mc_ok = worst <= bound + LEMMA_SLACK && lemma_ok;

    let c = Cocycle::new(vec![Mat2::rotation(1.0), Mat2::diag(0.5, 2.0)]).unwrap();
    let s = class_c_scheme(&c, 720, 12, 0.9).unwrap().expect("scheme");
    let k_bound = s.c.powi(2 * s.ell as i32) * s.c1 * s.c1;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut max_cp, mut max_sub): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let free: Vec<usize> = (0..50).map(|_| rng.gen_range(0..2)).collect();
        let w = build_bounded_word(&s, &c, &free).unwrap();
        max_cp = checkpoint_norms(&c, &w, s.ell).into_iter().fold(max_cp, f64::max);
        for i in 0..w.len() {
            let mut p = Mat2::IDENTITY;
            for &x in &w[i..] {
                p = c.gen(x) * p;
                max_sub = max_sub.max(op_norm(p));
            }
        }
    }
    let words_ok = max_cp <= s.c1 && max_sub <= k_bound;
    let (fast, t) = within(Duration::from_secs(120), start);
    outcome(
        mc_ok && words_ok && fast,
        format!(
            "MC max norm {worst:.4} <= {bound:.4} + {LEMMA_SLACK:e}; checkpoints {max_cp:.2} <= C1 {:.2}; subwords {max_sub:.3e} <= {k_bound:.3e}; {t}",
            s.c1
        ),
    )
}

fn c9_entropy_bound() -> Outcome {
    let e = all_examples().into_iter().find(|e| e.name == "rotation-contraction").unwrap();
    let opts = PosentOptions { trials: 0, injectivity_max: 10, ..PosentOptions::default() };
    let r = cmd_posent(&e.file(), &e.cocycle, &opts).unwrap();
    let ell = r.results["scheme"]["ell"].as_u64().unwrap();
    let h = r.results["entropy_lower_bound"].as_f64().unwrap();
    let exact = (h - 2f64.ln() / ell as f64).abs() < 1e-15 && h > 0.0;
    let rows = r.results["injectivity"].as_array().unwrap();
    let injective = rows.len() == 10
        && rows.iter().all(|row| {
            let n = row["n"].as_u64().unwrap();
            row["distinct_words"].as_u64() == Some(1 << n)
        });
    outcome(exact && injective, format!("ell {ell}, bound {h:.6} = log 2/{ell}; 2^n distinct words for n <= {}", rows.len()))
}

fn mat_dist(a: Mat2, b: Mat2) -> f64 {
    [a.a - b.a, a.b - b.b, a.c - b.c, a.d - b.d].iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn c10_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let rand_mat = |rng: &mut ChaCha8Rng| loop {
        let m = Mat2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if m.det().abs() > 1e-2 {
            return m;
        }
    };
    let (mut hs_err, mut cr_err, mut fd_err, mut nm_err): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..2000 {
        let m = rand_mat(&mut rng);
        let hs = hs_norm(m);
        hs_err = hs_err.max((op_norm(m).powi(2) + mininorm(m).unwrap().powi(2) - hs * hs).abs() / hs.powi(2).max(1.0));

        let pts: Vec<Vec2> = (0..4).map(|_| Vec2::from_angle(rng.gen_range(0.0..PI))).collect();
        if let Ok(cr) = cross_ratio(pts[0], pts[1], pts[2], pts[3]) {
            if cr.is_finite() && cr.abs() < 1e6 {
                let img = cross_ratio(m.apply(pts[0]), m.apply(pts[1]), m.apply(pts[2]), m.apply(pts[3])).unwrap();
                cr_err = cr_err.max((img - cr).abs() / cr.abs().max(1.0));
            }
        }

        let t = rng.gen_range(0.0..PI);
        let h = 1e-6;
        let fd = angle(proj_act(m, t), proj_act(m, t + h)) / h;
        let d = fiber_log_derivative(m, Vec2::from_angle(t));
        fd_err = fd_err.max((fd - d).abs() / d);

        let p = m * rand_mat(&mut rng) * rand_mat(&mut rng);
        let pn = p.scale(p.det().abs().powf(-0.5));
        let ratio = op_norm(p) / mininorm(p).unwrap();
        nm_err = nm_err.max((ratio - op_norm(pn).powi(2)).abs() / ratio);
    }

    let mut duality = Vec::new();
    for name in ["positive-pair", "noc-remark", "heteroclinic", "dominant-pair"] {
        let e = all_examples().into_iter().find(|e| e.name == name).unwrap();
        let c = &e.cocycle;
        let inv = inverse_cocycle(c);
        let back = inverse_cocycle(&inv);
        let round = c.mats().iter().zip(back.mats()).all(|(a, b)| mat_dist(*a, *b) <= 1e-12 * a.max_abs());
        let n = 8;
        let l2b = lambda2_bracket(c, n, false).unwrap();
        let dual = jsr_bracket(&inv, n).unwrap();
        let (dl, du) = (-dual.upper, -dual.lower);
        let slack = (l2b.upper - l2b.lower) + (du - dl) + 1e-12;
        let bottom_ok = l2b.lower <= du + slack && dl <= l2b.upper + slack;
        let l2t = lambda2_bracket(c, n, true).unwrap();
        let top_ok = -jssr_upper(&inv, n).unwrap() <= l2t.upper + 1e-12;
        // Normalising twice changes nothing.
        let nn = normalize_cocycle(&normalize_cocycle(c));
        let idem = nn.mats().iter().zip(normalize_cocycle(c).mats()).all(|(a, b)| mat_dist(*a, *b) < 1e-12);
        if !(round && bottom_ok && top_ok && idem) {
            duality.push(name);
        }
    }
    let (fast, t) = within(Duration::from_secs(30), start);
    let pass = hs_err <= HS_TOL && cr_err <= CR_TOL && fd_err <= FD_REL_TOL && nm_err <= NORMALIZE_TOL && duality.is_empty() && fast;
    outcome(
        pass,
        format!(
            "HS {hs_err:.1e} (<= {HS_TOL:e}), cross-ratio {cr_err:.1e} (<= {CR_TOL:e}), derivative {fd_err:.1e} (<= {FD_REL_TOL:e}), normalisation {nm_err:.1e} (<= {NORMALIZE_TOL:e}), duality failures {duality:?}, {t}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 NOC asymmetry", c1_noc_asymmetry),
        ("2 Barabanov extremality", c2_barabanov),
        ("3 sandwich consistency", c3_sandwich),
        ("4 zero-entropy evidence", c4_zero_entropy),
        ("5 cross-ratio obstruction", c5_cross_ratio),
        ("6 non-uniqueness", c6_nonunique),
        ("7 no minimizing measure", c7_no_minimizer),
        ("8 bounded products", c8_bounded_products),
        ("9 entropy lower bound", c9_entropy_bound),
        ("10 identity suite", c10_identities),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
