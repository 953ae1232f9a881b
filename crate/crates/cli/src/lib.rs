//! Subcommands behind the `cocycle-optim` binary. Every `cmd_*` function
//! returns a [`RunReport`]; the binary only parses flags, prints and maps
//! errors to exit codes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cocycle_core::barabanov::{solve_barabanov, BarabanovTable, SolveOptions, TableSummary};
use cocycle_core::cocycle::{word_to_string, Cocycle, Mode};
use cocycle_core::corpus::{all_examples, by_name, CocycleFile};
use cocycle_core::entropy_pos::{
    build_bounded_word, checkpoint_norms, class_c_scheme, entropy_lower_bound, find_elliptic_product, scheme_coverage,
    verify_bounded_lemma, LemmaOutcome,
};
use cocycle_core::error::CocycleError;
use cocycle_core::geom2::{op_norm, Mat2};
use cocycle_core::mather::{
    admissible_words, complexity_report, cross_ratio_audit_seeded, default_tol, geometry_audit, periodic_samples,
    AuditReport, DEFAULT_AUDIT_SEED, OVER_APPROXIMATION_NOTE,
};
use cocycle_core::multicone::{Multicone, SearchBudget};
use cocycle_core::spectral::{inverse_cocycle, jsr_bracket, jssr_upper, lambda2_bracket, normalize_cocycle};
use cocycle_core::splitting::{certify_domination, nonconformality_min, DominationCertificate};

pub const CONTRACTION_CAVEAT: &str =
    "contraction factor tau is an empirical supremum over sampled pairs, not a proof of contraction";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("budget or convergence error: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<CocycleError> for CliError {
    fn from(e: CocycleError) -> Self {
        match e {
            CocycleError::Domain(_) => CliError::Input(e.to_string()),
            CocycleError::Budget(_)
            | CocycleError::Convergence { .. }
            | CocycleError::Precision { .. }
            | CocycleError::SchemeIncomplete(_) => CliError::Budget(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    /// Seconds; only filled in when timing is requested, so that reports
    /// stay byte-identical across runs by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    fn new(command: &str, parameters: impl Serialize, results: Value, warnings: Vec<String>) -> Self {
        Self {
            command: command.into(),
            parameters: serde_json::to_value(parameters).expect("parameters serialize"),
            results,
            warnings,
            wall_time_s: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn parse_cocycle_json(text: &str) -> CliResult<(CocycleFile, Cocycle)> {
    let file: CocycleFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed cocycle JSON: {e}")))?;
    let c = file.cocycle()?;
    Ok((file, c))
}

pub fn load_cocycle(path: &Path) -> CliResult<(CocycleFile, Cocycle)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_cocycle_json(&text)
}

/// Writes a table to `path` through `f`, mapping I/O failures to input errors.
fn write_table(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    f(&mut out).map_err(io)?;
    out.flush().map_err(io)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn certificate(c: &Cocycle, budget: &SearchBudget) -> CliResult<DominationCertificate> {
    certify_domination(c, budget)
        .ok_or_else(|| CliError::Budget("no domination certificate found within the search budget".into()))
}

#[derive(Debug, Clone, Serialize)]
struct CertificateView<'a> {
    multicone: &'a Multicone,
    complementary: &'a Multicone,
    tau: f64,
    c1: f64,
    noc_forward: bool,
    noc_backward: bool,
    backward_cone: Option<&'a Multicone>,
    /// `image_components[i][j]`: component (0-based) receiving generator `i + 1` of component `j`.
    image_components: &'a [Vec<usize>],
    metric_scale: f64,
}

impl<'a> From<&'a DominationCertificate> for CertificateView<'a> {
    fn from(c: &'a DominationCertificate) -> Self {
        Self {
            multicone: &c.multicone,
            complementary: &c.complementary,
            tau: c.tau,
            c1: c.c1,
            noc_forward: c.noc_forward,
            noc_backward: c.noc_backward,
            backward_cone: c.backward_cone.as_ref(),
            image_components: &c.image_records,
            metric_scale: c.metric.scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub max_products: usize,
    pub levels: usize,
    /// Lengths `1..=n` sampled for the nonconformality diagnostic.
    pub diagnostic_depth: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        let b = SearchBudget::default();
        Self { max_products: b.max_products, levels: b.levels, diagnostic_depth: 8 }
    }
}

impl CertifyOptions {
    fn budget(&self) -> SearchBudget {
        SearchBudget { max_products: self.max_products, levels: self.levels, ..SearchBudget::default() }
    }
}

pub fn cmd_certify(file: &CocycleFile, c: &Cocycle, opts: &CertifyOptions) -> CliResult<RunReport> {
    let cert = certify_domination(c, &opts.budget());
    let mut diag = Vec::new();
    for n in 1..=opts.diagnostic_depth {
        match nonconformality_min(c, n) {
            Ok(v) => diag.push(json!({ "n": n, "value": v })),
            Err(CocycleError::Budget(_)) => break,
            Err(e) => return Err(e.into()),
        }
    }
    let mut warnings = Vec::new();
    let results = match &cert {
        Some(cert) => {
            warnings.push(CONTRACTION_CAVEAT.to_string());
            json!({
                "name": file.name,
                "k": c.k(),
                "status": "dominated",
                "certificate": CertificateView::from(cert),
                "nonconformality_min": diag,
            })
        }
        None => {
            warnings.push("search inconclusive: no invariant multicone found; see nonconformality_min".into());
            json!({
                "name": file.name,
                "k": c.k(),
                "status": "inconclusive",
                "certificate": null,
                "nonconformality_min": diag,
            })
        }
    };
    Ok(RunReport::new("certify", opts, results, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentMode {
    Top,
    Bottom,
    Lambda2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentOptions {
    pub mode: ExponentMode,
    pub depth: usize,
    /// Grid for the Barabanov value of the exponent; 0 skips it.
    pub grid: usize,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        Self { mode: ExponentMode::Top, depth: 12, grid: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRow {
    pub depth: usize,
    pub quantity: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

fn row(depth: usize, quantity: &str, lower: Option<f64>, upper: Option<f64>) -> BracketRow {
    BracketRow { depth, quantity: quantity.into(), lower, upper }
}

pub fn write_bracket_csv<W: Write + ?Sized>(rows: &[BracketRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "depth,quantity,lower,upper")?;
    let cell = |x: Option<f64>| x.map(num).unwrap_or_default();
    for r in rows {
        writeln!(w, "{},{},{},{}", r.depth, r.quantity, cell(r.lower), cell(r.upper))?;
    }
    Ok(())
}

/// Bracket rows for depths `1..=depth`.
pub fn exponent_rows(c: &Cocycle, mode: ExponentMode, depth: usize) -> CliResult<Vec<BracketRow>> {
    let mut rows = Vec::new();
    let inv = inverse_cocycle(c);
    let normed = normalize_cocycle(c);
    for n in 1..=depth {
        match mode {
            ExponentMode::Top => {
                let b = jsr_bracket(c, n)?;
                rows.push(row(n, "lambda1_top", Some(b.lower), Some(b.upper)));
                // λ₁ − λ₂ = 2 λ₁ of the normalised cocycle.
                let g = jsr_bracket(&normed, n)?;
                rows.push(row(n, "gap_top", Some(2.0 * g.lower), Some(2.0 * g.upper)));
            }
            ExponentMode::Bottom => {
                rows.push(row(n, "lambda1_bottom", None, Some(jssr_upper(c, n)?)));
            }
            ExponentMode::Lambda2 => {
                let t = lambda2_bracket(c, n, true)?;
                rows.push(row(n, "lambda2_top", Some(t.lower), Some(t.upper)));
                rows.push(row(n, "lambda2_top_dual", Some(-jssr_upper(&inv, n)?), None));
                let b = lambda2_bracket(c, n, false)?;
                rows.push(row(n, "lambda2_bottom", Some(b.lower), Some(b.upper)));
                let d = jsr_bracket(&inv, n)?;
                rows.push(row(n, "lambda2_bottom_dual", Some(-d.upper), Some(-d.lower)));
            }
        }
    }
    Ok(rows)
}

pub fn cmd_exponents(file: &CocycleFile, c: &Cocycle, opts: &ExponentOptions, csv: Option<&Path>) -> CliResult<RunReport> {
    if opts.depth == 0 {
        return Err(CliError::Input("depth must be positive".into()));
    }
    let rows = exponent_rows(c, opts.mode, opts.depth)?;
    let mut warnings = Vec::new();
    let beta_mode = match opts.mode {
        ExponentMode::Top => Some(Mode::Top),
        ExponentMode::Bottom => Some(Mode::Bottom),
        ExponentMode::Lambda2 => None,
    };
    let mut beta = Value::Null;
    if let (Some(mode), true) = (beta_mode, opts.grid > 0) {
        match certify_domination(c, &SearchBudget::default()) {
            Some(cert) => {
                let so = SolveOptions { grid_size: opts.grid, ..SolveOptions::default() };
                let t = solve_barabanov(&cert, c, mode, &so)?;
                beta = json!({ "beta": t.beta, "residual": t.residual, "grid_size": opts.grid, "tol": so.tol });
            }
            None => warnings.push("not certified dominated: Barabanov value skipped".into()),
        }
    }
    if let Some(p) = csv {
        write_table(p, |w| write_bracket_csv(&rows, w))?;
    }
    let results = json!({ "name": file.name, "brackets": rows, "barabanov": beta });
    Ok(RunReport::new("exponents", opts, results, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarabanovOptions {
    pub mode: Mode,
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BarabanovOptions {
    fn default() -> Self {
        let s = SolveOptions::default();
        Self { mode: Mode::Top, grid: s.grid_size, tol: s.tol, max_iter: s.max_iter }
    }
}

impl BarabanovOptions {
    fn solve(&self) -> SolveOptions {
        SolveOptions { grid_size: self.grid, tol: self.tol, max_iter: self.max_iter }
    }
}

pub fn cmd_barabanov(file: &CocycleFile, c: &Cocycle, opts: &BarabanovOptions, csv: Option<&Path>) -> CliResult<RunReport> {
    let cert = certificate(c, &SearchBudget::default())?;
    let t = solve_barabanov(&cert, c, opts.mode, &opts.solve())?;
    if let Some(p) = csv {
        write_table(p, |w| t.write_csv(w))?;
    }
    let results = json!({
        "name": file.name,
        "table": TableSummary::from(&t),
        "angle_lipschitz": t.angle_lipschitz,
        "resolution": t.resolution(),
        "multicone": cert.multicone,
    });
    Ok(RunReport::new("barabanov", opts, results, vec![CONTRACTION_CAVEAT.into()]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatherOptions {
    pub mode: Mode,
    pub ell_max: usize,
    pub pad: usize,
    /// Admissibility tolerance; `None` picks the table's default.
    pub tol: Option<f64>,
    pub grid: usize,
    /// Word length used to build audit samples.
    pub audit_ell: usize,
    pub audit_tol: f64,
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for MatherOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Top,
            ell_max: 12,
            pad: 8,
            tol: None,
            grid: SolveOptions::default().grid_size,
            audit_ell: 10,
            audit_tol: 1e-2,
            max_pairs: 200,
            seed: DEFAULT_AUDIT_SEED,
        }
    }
}

struct Prepared {
    cert: DominationCertificate,
    table: BarabanovTable,
    tol: f64,
}

fn prepare(c: &Cocycle, opts: &MatherOptions) -> CliResult<Prepared> {
    let cert = certificate(c, &SearchBudget::default())?;
    let so = SolveOptions { grid_size: opts.grid, ..SolveOptions::default() };
    let table = solve_barabanov(&cert, c, opts.mode, &so)?;
    let tol = opts.tol.unwrap_or_else(|| default_tol(&table));
    Ok(Prepared { cert, table, tol })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditBundle {
    pub word_length: usize,
    pub padding: usize,
    pub word_tol: f64,
    pub periodic_roots: Vec<String>,
    pub cross_ratio: AuditReport,
    pub geometry: AuditReport,
}

fn audits(c: &Cocycle, p: &Prepared, opts: &MatherOptions) -> CliResult<AuditBundle> {
    let words = admissible_words(&p.table, &p.cert, c, opts.audit_ell, opts.pad, p.tol)?;
    let roots = periodic_samples(&words).iter().map(|r| word_to_string(r)).collect();
    let cross_ratio = cross_ratio_audit_seeded(&p.cert, c, opts.mode, &words, opts.audit_tol, opts.max_pairs, opts.seed)?;
    let geometry = geometry_audit(&p.cert, c, opts.mode, &words, opts.audit_tol)?;
    Ok(AuditBundle { word_length: opts.audit_ell, padding: opts.pad, word_tol: p.tol, periodic_roots: roots, cross_ratio, geometry })
}

pub fn cmd_mather(file: &CocycleFile, c: &Cocycle, opts: &MatherOptions, csv: Option<&Path>) -> CliResult<RunReport> {
    let p = prepare(c, opts)?;
    let report = complexity_report(&p.table, &p.cert, c, opts.ell_max, opts.pad, p.tol)?;
    if let Some(path) = csv {
        write_table(path, |w| report.write_csv(w))?;
    }
    let bundle = audits(c, &p, opts)?;
    let results = json!({
        "name": file.name,
        "table": TableSummary::from(&p.table),
        "complexity": report,
        "audit": bundle,
    });
    let warnings = vec![OVER_APPROXIMATION_NOTE.into(), CONTRACTION_CAVEAT.into()];
    Ok(RunReport::new("mather", opts, results, warnings))
}

pub fn cmd_audit(file: &CocycleFile, c: &Cocycle, opts: &MatherOptions) -> CliResult<RunReport> {
    let p = prepare(c, opts)?;
    let bundle = audits(c, &p, opts)?;
    let results = json!({ "name": file.name, "table": TableSummary::from(&p.table), "audit": bundle });
    Ok(RunReport::new("audit", opts, results, vec![OVER_APPROXIMATION_NOTE.into()]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosentOptions {
    pub grid: usize,
    pub kappa: f64,
    pub max_len: usize,
    pub blocks: usize,
    pub trials: usize,
    /// Largest number of free symbols in the injectivity check.
    pub injectivity_max: usize,
    pub seed: u64,
}

impl Default for PosentOptions {
    fn default() -> Self {
        Self { grid: 720, kappa: 0.9, max_len: 12, blocks: 50, trials: 100, injectivity_max: 10, seed: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub blocks: usize,
    pub max_checkpoint_norm: f64,
    pub checkpoint_bound: f64,
    pub max_subword_norm: f64,
    pub subword_bound: f64,
    /// Trials whose blocks satisfy the bounded-products lemma.
    pub lemma_holds: usize,
    pub lemma_failures: Vec<LemmaOutcome>,
    pub all_within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityRow {
    pub n: usize,
    pub free_words: usize,
    pub distinct_words: usize,
}

/// Largest `|A_w|` over all factors `w` of `word`.
pub fn max_subword_norm(c: &Cocycle, word: &[usize]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..word.len() {
        let mut p = Mat2::IDENTITY;
        for &x in &word[i..] {
            p = c.gen(x) * p;
            best = best.max(op_norm(p));
        }
    }
    best
}

fn all_free_words(k: usize, n: usize) -> Vec<Vec<usize>> {
    cocycle_core::cocycle::words_of_length(k, n)
}

pub fn cmd_posent(file: &CocycleFile, c: &Cocycle, opts: &PosentOptions) -> CliResult<RunReport> {
    let elliptic = find_elliptic_product(c, 8)?.map(|w| word_to_string(&w));
    let Some(scheme) = class_c_scheme(c, opts.grid, opts.max_len, opts.kappa)? else {
        let coverage = scheme_coverage(c, opts.grid, opts.max_len, opts.kappa)?;
        let results = json!({
            "name": file.name,
            "scheme": null,
            "status": "no scheme",
            "best_coverage_fraction": coverage,
            "elliptic_product": elliptic,
        });
        return Ok(RunReport::new("posent", opts, results, Vec::new()));
    };
    let bound = entropy_lower_bound(&scheme, c.k());
    let mut injectivity = Vec::new();
    for n in 1..=opts.injectivity_max {
        let frees = all_free_words(c.k(), n);
        if frees.len() > 1 << 16 {
            break;
        }
        let words = frees.iter().map(|f| build_bounded_word(&scheme, c, f)).collect::<Result<BTreeSet<_>, _>>()?;
        injectivity.push(InjectivityRow { n, free_words: frees.len(), distinct_words: words.len() });
    }
    let trials = if opts.trials == 0 {
        Value::Null
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let subword_bound = scheme.c.powi(2 * scheme.ell as i32) * scheme.c1 * scheme.c1;
        let mut s = TrialSummary {
            trials: opts.trials,
            blocks: opts.blocks,
            max_checkpoint_norm: 0.0,
            checkpoint_bound: scheme.c1,
            max_subword_norm: 0.0,
            subword_bound,
            lemma_holds: 0,
            lemma_failures: Vec::new(),
            all_within_bounds: true,
        };
        for _ in 0..opts.trials {
            let free: Vec<usize> = (0..opts.blocks).map(|_| rng.gen_range(0..c.k())).collect();
            let w = build_bounded_word(&scheme, c, &free)?;
            let cp = checkpoint_norms(c, &w, scheme.ell).into_iter().fold(0.0, f64::max);
            s.max_checkpoint_norm = s.max_checkpoint_norm.max(cp);
            s.max_subword_norm = s.max_subword_norm.max(max_subword_norm(c, &w));
            let blocks: Vec<Mat2> = w.chunks(scheme.ell).map(|b| c.product(b)).collect();
            match verify_bounded_lemma(&blocks, scheme.c.powi(scheme.ell as i32), scheme.kappa)? {
                LemmaOutcome::Holds => s.lemma_holds += 1,
                other => s.lemma_failures.push(other),
            }
        }
        s.all_within_bounds = s.max_checkpoint_norm <= s.checkpoint_bound
            && s.max_subword_norm <= s.subword_bound
            && s.lemma_failures.is_empty();
        serde_json::to_value(s).expect("summary serializes")
    };
    let results = json!({
        "name": file.name,
        "status": "scheme found",
        "scheme": scheme.summary(),
        "scheme_words": scheme.words.iter().map(|w| word_to_string(w)).collect::<BTreeSet<_>>(),
        "entropy_lower_bound": bound,
        "entropy_lower_bound_formula": format!("log({})/{}", c.k(), scheme.ell),
        "injectivity": injectivity,
        "trials": trials,
        "elliptic_product": elliptic,
    });
    Ok(RunReport::new("posent", opts, results, Vec::new()))
}

pub fn cmd_corpus_list() -> RunReport {
    let list: Vec<Value> = all_examples()
        .iter()
        .map(|e| json!({ "name": e.name, "description": e.description, "k": e.cocycle.k(), "expected": e.expected }))
        .collect();
    RunReport::new("corpus list", BTreeMap::<String, Value>::new(), json!({ "examples": list }), Vec::new())
}

/// The named example as a cocycle JSON document.
pub fn corpus_emit(name: &str) -> CliResult<String> {
    let e = by_name(name).ok_or_else(|| CliError::Input(format!("unknown corpus example '{name}'")))?;
    Ok(serde_json::to_string_pretty(&e.file()).expect("file serializes") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(name: &str) -> (CocycleFile, Cocycle) {
        parse_cocycle_json(&corpus_emit(name).unwrap()).unwrap()
    }

    #[test]
    fn malformed_input_is_an_input_error() {
        for bad in ["{", r#"{"name":"x","matrices":[]}"#, r#"{"name":"x","matrices":[[[1,2],[2,4]]]}"#] {
            assert_eq!(parse_cocycle_json(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn emit_round_trips() {
        for e in all_examples() {
            let (f, c) = load(&e.name);
            assert_eq!(f.name, e.name);
            assert_eq!(c, e.cocycle);
        }
        assert_eq!(corpus_emit("nope").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn certify_rotations_is_inconclusive() {
        let (f, c) = load("rotations");
        let r = cmd_certify(&f, &c, &CertifyOptions::default()).unwrap();
        assert_eq!(r.results["status"], "inconclusive");
        for s in r.results["nonconformality_min"].as_array().unwrap() {
            assert!(s["value"].as_f64().unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn exponents_of_diagonal_pair() {
        let (f, c) = load("diagonal-pair");
        let top = exponent_rows(&c, ExponentMode::Top, 6).unwrap();
        let last = top.iter().rev().find(|r| r.quantity == "lambda1_top").unwrap();
        assert!((last.lower.unwrap() - 3f64.ln()).abs() < 1e-12 && (last.upper.unwrap() - 3f64.ln()).abs() < 1e-12);
        let bot = exponent_rows(&c, ExponentMode::Bottom, 6).unwrap();
        assert!((bot.last().unwrap().upper.unwrap() - 2f64.ln()).abs() < 1e-12);
        let r = cmd_exponents(&f, &c, &ExponentOptions { depth: 4, grid: 0, ..Default::default() }, None).unwrap();
        assert_eq!(r.results["brackets"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn lambda2_rows_match_duality() {
        let (_, c) = load("positive-pair");
        let rows = exponent_rows(&c, ExponentMode::Lambda2, 6).unwrap();
        let get = |q: &str| rows.iter().rev().find(|r| r.quantity == q).unwrap().clone();
        let (b, d) = (get("lambda2_bottom"), get("lambda2_bottom_dual"));
        // Both bracket the same number, so they must intersect.
        assert!(b.lower.unwrap() <= d.upper.unwrap() + 1e-12 && d.lower.unwrap() <= b.upper.unwrap() + 1e-12);
    }

    #[test]
    fn posent_without_scheme() {
        let (f, c) = load("diag");
        let r = cmd_posent(&f, &c, &PosentOptions::default()).unwrap();
        assert_eq!(r.results["status"], "no scheme");
    }

    #[test]
    fn posent_scheme_only() {
        let (f, c) = load("rotation-contraction");
        let opts = PosentOptions { trials: 0, injectivity_max: 3, ..Default::default() };
        let r = cmd_posent(&f, &c, &opts).unwrap();
        assert!(r.results["trials"].is_null());
        assert_eq!(r.results["scheme"]["ell"], 10);
    }

    #[test]
    fn barabanov_needs_a_certificate() {
        let (f, c) = load("rotations");
        assert_eq!(cmd_barabanov(&f, &c, &BarabanovOptions::default(), None).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn reports_are_deterministic() {
        let (f, c) = load("positive-pair");
        let opts = MatherOptions { ell_max: 6, grid: 1024, ..Default::default() };
        let a = cmd_mather(&f, &c, &opts, None).unwrap().to_json();
        let b = cmd_mather(&f, &c, &opts, None).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let rows = vec![row(1, "q", Some(0.1), None)];
        let mut buf = Vec::new();
        write_bracket_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "depth,quantity,lower,upper\n1,q,1.0000000000000001e-1,\n");
    }
}
