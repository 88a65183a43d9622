//! Command-line front end and output formats.
//!
//! JADED rows are tab separated, one per selection, no header:
//!
//! ```text
//! iteration  batch_index  sentence_id  trigger_word  penalty  gain  delta_h  h_after  original_text
//! ```
//!
//! Reals carry six decimals. Exit codes: 0 ok, 2 input error, 3 empty result.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::corpus::{count_corpus_par, read_lines, CorpusError};
use crate::eval::{evaluate_subset, moore_lewis_rank, EvalReport};
use crate::pipeline::{prepare, tokenize_lines, CorpusSource, SelectionConfig, SelectionInputs};
use crate::score::{LogBase, DEFAULT_DELTA};
use crate::select::{Mode, SelectError, SelectionEvent, StopConfig};
use crate::squash::{partition_vocab_with, Category, SquashConfig};
use crate::Error;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_EMPTY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "cynical", version, about = "Rank candidate sentences by how much they help model a representative corpus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count a text file into a stats file.
    Stats {
        input: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the category of every word.
    Squash(SquashArgs),
    /// Rank the available pool and write JADED rows.
    Select(SelectArgs),
    /// Evaluate a subset against the representative corpus, or rank a pool with a baseline.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Representative corpus (text or stats file).
    #[arg(long)]
    pub repr: PathBuf,
    /// Unadapted corpus (text or stats file); defaults to the available pool.
    #[arg(long)]
    pub unadapt: Option<PathBuf>,
    /// Already-selected text that primes the model.
    #[arg(long)]
    pub seed: Option<PathBuf>,
    /// Candidate pool, one sentence per line.
    #[arg(long)]
    pub avail: PathBuf,
}

#[derive(Debug, Args)]
pub struct SquashFlags {
    #[arg(long, default_value_t = 3)]
    pub min_count: u64,
    /// Overrides --min-count for the representative corpus.
    #[arg(long)]
    pub min_count_repr: Option<u64>,
    /// Overrides --min-count for the unadapted corpus.
    #[arg(long)]
    pub min_count_unadapt: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub ratio_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    pub ratio_hi: f64,
}

impl SquashFlags {
    fn config(&self) -> SquashConfig {
        SquashConfig {
            min_count_repr: self.min_count_repr.unwrap_or(self.min_count),
            min_count_unadapt: self.min_count_unadapt.unwrap_or(self.min_count),
            ratio_lo: self.ratio_lo,
            ratio_hi: self.ratio_hi,
        }
    }
}

#[derive(Debug, Args)]
pub struct SquashArgs {
    #[command(flatten)]
    pub corpora: CorpusArgs,
    #[command(flatten)]
    pub squash: SquashFlags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Fast,
    Batch,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Fast => Mode::Fast,
            ModeArg::Batch => Mode::Batch,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LogBaseArg(pub LogBase);

impl FromStr for LogBaseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "2" => Ok(LogBaseArg(LogBase::Two)),
            "e" => Ok(LogBaseArg(LogBase::E)),
            "10" => Ok(LogBaseArg(LogBase::Ten)),
            _ => Err(format!("log base must be 2, e or 10, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub corpora: CorpusArgs,
    /// JADED output file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "fast")]
    pub mode: ModeArg,
    /// Add-δ smoothing per vocabulary type.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[command(flatten)]
    pub squash: SquashFlags,
    /// Consecutive positive-ΔH selections before halting.
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long)]
    pub max_lines: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<u64>,
    /// Keep selecting past positive ΔH until the pool (or a cap) runs out.
    #[arg(long)]
    pub exhaustive: bool,
    /// Base for reported scores (2 = bits).
    #[arg(long, default_value = "2")]
    pub log_base: LogBaseArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Baseline {
    MooreLewis,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
pub enum ReportFormat {
    #[default]
    Kv,
    Tsv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Representative corpus (text or stats file).
    #[arg(long)]
    pub repr: PathBuf,
    /// Selected subset to evaluate (text).
    #[arg(long, required_unless_present = "baseline")]
    pub subset: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, value_enum, default_value = "kv")]
    pub format: ReportFormat,
    /// Rank --avail with a baseline instead of evaluating a subset.
    #[arg(long, value_enum, requires = "avail")]
    pub baseline: Option<Baseline>,
    #[arg(long)]
    pub avail: Option<PathBuf>,
    /// Pool model for the baseline; defaults to --avail.
    #[arg(long)]
    pub unadapt: Option<PathBuf>,
    /// Baseline ranking output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Select(SelectError::NothingSelectable) => EXIT_EMPTY,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        Error::from(e).into()
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

/// Writes JADED rows, converting scores from bits to the requested base.
pub struct JadedWriter<W: Write> {
    out: W,
    base: LogBase,
}

impl<W: Write> JadedWriter<W> {
    pub fn new(out: W, base: LogBase) -> Self {
        JadedWriter { out, base }
    }

    pub fn write_event(&mut self, ev: &SelectionEvent, original_text: &str) -> io::Result<()> {
        let b = |x: f64| self.base.from_bits(x);
        writeln!(
            self.out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}",
            ev.iteration,
            ev.batch_index,
            ev.sentence_id,
            ev.trigger,
            b(ev.penalty),
            b(ev.gain),
            b(ev.delta_h),
            b(ev.h_after),
            original_text
        )
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn read_text(path: &Path) -> Result<Vec<String>, CliError> {
    Ok(read_lines(path)?)
}

fn cmd_stats(input: &Path, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let lines = read_text(input)?;
    let (tokens, _) = tokenize_lines(&lines);
    let joined: Vec<String> = tokens.iter().map(|t| t.join(" ")).collect();
    let stats = count_corpus_par(&joined);
    match output {
        Some(path) => stats.save_to_path(path)?,
        None => stats.save(stdout)?,
    }
    Ok(())
}

fn load_inputs(c: &CorpusArgs) -> Result<SelectionInputs, CliError> {
    Ok(SelectionInputs {
        repr: CorpusSource::from_path(&c.repr)?,
        unadapt: c.unadapt.as_deref().map(CorpusSource::from_path).transpose()?,
        seed: c.seed.as_deref().map(read_text).transpose()?.unwrap_or_default(),
        avail: read_text(&c.avail)?,
    })
}

fn cmd_squash(args: &SquashArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inputs = load_inputs(&args.corpora)?;
    let cfg = args.squash.config();
    let (avail, _) = tokenize_lines(&inputs.avail);
    let (seed, _) = tokenize_lines(&inputs.seed);
    let (repr, _) = inputs.repr.escaped_stats();
    let unadapt = match &inputs.unadapt {
        Some(src) => src.escaped_stats().0,
        None => crate::corpus::count_corpus(avail.iter().map(|l| l.join(" "))),
    };
    let avail_vocab = avail.iter().flatten().cloned().collect();
    let partition = partition_vocab_with(&repr, &unadapt, &avail_vocab, seed.iter().flatten().map(String::as_str), &cfg)
        .map_err(Error::from)?;
    let mut rows: Vec<(&str, Category)> = partition.iter().collect();
    rows.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.as_bytes().cmp(b.0.as_bytes())));
    let mut out = BufWriter::new(stdout);
    for (word, cat) in rows {
        writeln!(out, "{word}\t{cat}").map_err(|e| CliError::input(e.to_string()))?;
    }
    let sizes = partition.category_sizes();
    info!(
        "kept={} dubious={} bad={} meh={} impossible={} useless={}",
        sizes[0], sizes[1], sizes[2], sizes[3], sizes[4], sizes[5]
    );
    Ok(())
}

fn cmd_select(args: &SelectArgs, stdout: &mut dyn Write) -> Result<u8, CliError> {
    let c = &args.corpora;
    for input in [Some(&c.repr), c.unadapt.as_ref(), c.seed.as_ref(), Some(&c.avail)].into_iter().flatten() {
        if same_file(input, &args.out) {
            return Err(CliError::input(format!(
                "output {} would overwrite input {}",
                args.out.display(),
                input.display()
            )));
        }
    }
    let stop = StopConfig {
        patience: args.patience,
        max_lines: args.max_lines,
        max_tokens: args.max_tokens,
        halt_on_positive: !args.exhaustive,
    };
    stop.validate().map_err(|e| CliError::input(e.to_string()))?;
    let cfg = SelectionConfig {
        squash: args.squash.config(),
        delta: args.delta,
    };
    cfg.squash.validate().map_err(Error::from)?;

    let inputs = load_inputs(c)?;
    let mut prepared = prepare(&inputs, &cfg)?;
    info!(
        "{} candidate lines, {} kept words in the pool",
        prepared.engine.sentences().len(),
        prepared.engine.kept_in_avail()
    );
    let h_start = prepared.engine.state().h_current();

    let file = File::create(&args.out).map_err(|e| io_error(&args.out, e))?;
    let mut writer = JadedWriter::new(BufWriter::new(file), args.log_base.0);
    let mut run = prepared.engine.run(stop, args.mode.into()).map_err(Error::from)?;
    let (mut lines, mut tokens, mut h_final) = (0usize, 0u64, h_start);
    for ev in run.by_ref() {
        writer
            .write_event(&ev, &inputs.avail[ev.sentence_id])
            .map_err(|e| io_error(&args.out, e))?;
        lines += 1;
        tokens += ev.token_count;
        h_final = ev.h_after;
    }
    let reason = run.stop_reason().expect("run finished");
    writer.into_inner().map_err(|e| io_error(&args.out, e))?;

    writeln!(
        stdout,
        "lines\t{lines}\ntokens\t{tokens}\nh_bits\t{:.6}\nstop\t{reason}",
        args.log_base.0.from_bits(h_final)
    )
    .map_err(|e| CliError::input(e.to_string()))?;
    Ok(if lines == 0 { EXIT_EMPTY } else { 0 })
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (repr, _) = CorpusSource::from_path(&args.repr)?.escaped_stats();
    if let Some(Baseline::MooreLewis) = args.baseline {
        let avail_path = args.avail.as_ref().expect("clap enforces --avail");
        let avail = read_text(avail_path)?;
        let pool = match &args.unadapt {
            Some(p) => CorpusSource::from_path(p)?,
            None => CorpusSource::Lines(avail.clone()),
        };
        let (pool, _) = pool.escaped_stats();
        let (tokens, _) = tokenize_lines(&avail);
        let escaped: Vec<String> = tokens.iter().map(|t| t.join(" ")).collect();
        let ranked = moore_lewis_rank(&escaped, &repr, &pool, args.delta).map_err(Error::from)?;
        let mut buf = Vec::new();
        for (rank, (id, score)) in ranked.iter().enumerate() {
            writeln!(buf, "{}\t{id}\t{score:.6}\t{}", rank + 1, avail[*id]).expect("write to memory");
        }
        match &args.out {
            Some(path) => fs::write(path, buf).map_err(|e| io_error(path, e))?,
            None => stdout.write_all(&buf).map_err(|e| CliError::input(e.to_string()))?,
        }
    }
    if let Some(subset_path) = &args.subset {
        let subset = read_text(subset_path)?;
        let (tokens, _) = tokenize_lines(&subset);
        let subset: Vec<String> = tokens.iter().map(|t| t.join(" ")).collect();
        let report = evaluate_subset(&subset, &repr, args.delta).map_err(Error::from)?;
        let text = match args.format {
            ReportFormat::Kv => format!("{}\n", report.to_kv_line()),
            ReportFormat::Tsv => format!("{}\n{}\n", EvalReport::tsv_header(), report.to_tsv_row()),
        };
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(())
}

/// Runs one parsed command. Returns the process exit code on success.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Stats { input, output } => cmd_stats(input, output.as_deref(), stdout).map(|_| 0),
        Command::Squash(args) => cmd_squash(args, stdout).map(|_| 0),
        Command::Select(args) => cmd_select(args, stdout),
        Command::Eval(args) => cmd_eval(args, stdout).map(|_| 0),
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cynical: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
