use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cocycle_core::cocycle::Mode;
use cocycle_optim::{
    cmd_audit, cmd_barabanov, cmd_certify, cmd_corpus_list, cmd_exponents, cmd_mather, cmd_posent, corpus_emit,
    load_cocycle, BarabanovOptions, CertifyOptions, CliError, CliResult, ExponentMode, ExponentOptions, MatherOptions,
    PosentOptions, RunReport,
};

#[derive(Parser)]
#[command(name = "cocycle-optim", version, about = "Extremal exponents, Mather sets and domination for 2x2 cocycles")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "COCYCLE_OPTIM_THREADS")]
    threads: Option<usize>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Top,
    Bottom,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Top => Mode::Top,
            ModeArg::Bottom => Mode::Bottom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpModeArg {
    Top,
    Bottom,
    Lambda2,
}

#[derive(clap::Args)]
struct MatherArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "top")]
    mode: ModeArg,
    #[arg(long, default_value_t = 12)]
    ell_max: usize,
    /// Padding length `m` on each side of a word.
    #[arg(long, default_value_t = 8)]
    pad: usize,
    /// Admissibility tolerance (default derived from the table).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, default_value_t = 10)]
    audit_ell: usize,
    #[arg(long, default_value_t = 1e-2)]
    audit_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_pairs: usize,
    #[arg(long, default_value_t = cocycle_core::mather::DEFAULT_AUDIT_SEED)]
    seed: u64,
    /// Word-count CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl MatherArgs {
    fn options(&self) -> MatherOptions {
        MatherOptions {
            mode: self.mode.into(),
            ell_max: self.ell_max,
            pad: self.pad,
            tol: self.tol,
            grid: self.grid,
            audit_ell: self.audit_ell,
            audit_tol: self.audit_tol,
            max_pairs: self.max_pairs,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search for an invariant multicone and check the no-overlap conditions.
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = CertifyOptions::default().max_products)]
        max_products: usize,
        #[arg(long, default_value_t = CertifyOptions::default().levels)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        diagnostic_depth: usize,
    },
    /// Brackets for the extremal exponents across depths.
    Exponents {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "top")]
        mode: ExpModeArg,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Grid for the Barabanov value (0 skips it).
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve for the Barabanov function on the certified multicone.
    Barabanov {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "top")]
        mode: ModeArg,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Admissible word counts and audits.
    Mather(MatherArgs),
    /// Cross-ratio and disjointness audits only.
    Audit(MatherArgs),
    /// Contraction scheme, bounded words and the entropy lower bound.
    Posent {
        file: PathBuf,
        #[arg(long, default_value_t = 720)]
        grid: usize,
        #[arg(long, default_value_t = 0.9)]
        kappa: f64,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 50)]
        blocks: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        injectivity_max: usize,
        #[arg(long, default_value_t = 5)]
        seed: u64,
    },
    /// Built-in examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    /// Print one example as a cocycle file.
    Emit { name: String },
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let start = Instant::now();
    let mut report: RunReport = match cli.command {
        Command::Certify { file, max_products, levels, diagnostic_depth } => {
            let (f, c) = load_cocycle(&file)?;
            cmd_certify(&f, &c, &CertifyOptions { max_products, levels, diagnostic_depth })?
        }
        Command::Exponents { file, mode, depth, grid, csv } => {
            let (f, c) = load_cocycle(&file)?;
            let mode = match mode {
                ExpModeArg::Top => ExponentMode::Top,
                ExpModeArg::Bottom => ExponentMode::Bottom,
                ExpModeArg::Lambda2 => ExponentMode::Lambda2,
            };
            cmd_exponents(&f, &c, &ExponentOptions { mode, depth, grid }, csv.as_deref())?
        }
        Command::Barabanov { file, mode, grid, tol, max_iter, csv } => {
            let (f, c) = load_cocycle(&file)?;
            cmd_barabanov(&f, &c, &BarabanovOptions { mode: mode.into(), grid, tol, max_iter }, csv.as_deref())?
        }
        Command::Mather(a) => {
            let (f, c) = load_cocycle(&a.file)?;
            cmd_mather(&f, &c, &a.options(), a.csv.as_deref())?
        }
        Command::Audit(a) => {
            let (f, c) = load_cocycle(&a.file)?;
            cmd_audit(&f, &c, &a.options())?
        }
        Command::Posent { file, grid, kappa, max_len, blocks, trials, injectivity_max, seed } => {
            let (f, c) = load_cocycle(&file)?;
            cmd_posent(&f, &c, &PosentOptions { grid, kappa, max_len, blocks, trials, injectivity_max, seed })?
        }
        Command::Corpus { action: CorpusAction::List } => cmd_corpus_list(),
        Command::Corpus { action: CorpusAction::Emit { name } } => return emit(&corpus_emit(&name)?, cli.out.as_deref()),
    };
    if cli.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    emit(&report.to_json(), cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Panics are internal assertion failures.
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(4),
    }
}
