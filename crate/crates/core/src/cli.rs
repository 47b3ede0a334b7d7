//! Command-line front end. Every randomized subcommand draws from a single
//! generator seeded by `--seed`, so identical flags give identical bytes.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::baselines::{evolve, greedy_complete, random_search, EvoConfig, DEFAULT_MAX_STEPS};
use crate::closures::{is_in_full_intersection, multilabel, ClosureSpec};
use crate::commexpr::expand_text;
use crate::datasets::{
    gen_negative_stream, gen_nontrivial_eval, gen_training_stream, to_jsonl, to_tokens, DatasetConfig,
    DatasetRecord,
};
use crate::metrics::{evaluate, evaluate_completions, read_completions, EvalReport};
use crate::sampling::{
    naive_length_matched, sample_closure_bracket, sample_closure_naive, sample_commutator, sample_symmetric,
    SamplerConfig,
};
use crate::stats::{count_valleys, ks_two_sample, mean_variance, word_dyck_path};
use crate::{seeded_rng, Error, Rank, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "freegroup",
    version,
    about = "Words in intersections of normal closures of a free group"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Rank of the free group.
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Jsonl,
    Tokens,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Naive,
    Bracket,
    Commutator,
    Symmetric,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetMode {
    Train,
    Negative,
    Nontrivial,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Random,
    Evo,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw words from a normal closure or a commutator of closures.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "bracket")]
        mode: SampleMode,
        /// Closure index for naive and bracket modes.
        #[arg(long, default_value_t = 1)]
        closure: usize,
        /// Comma-separated closure indices for the commutator modes.
        #[arg(long, value_delimiter = ',')]
        indices: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Leaf length cap (naive: conjugator length).
        #[arg(long)]
        max_length: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Print the multi-label of every word read from stdin.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Expand a commutator expression (or one per stdin line) to a reduced word.
    Expand {
        expr: Option<String>,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run a search baseline and report its completion ratio.
    Baseline {
        #[arg(value_enum)]
        method: BaselineMethod,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        batch: usize,
        /// Greedy: tokens appended per prefix.
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Evolutionary search: iterations per run.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Greedy: prefix length.
        #[arg(long, default_value_t = 5)]
        prefix_length: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Greedy: also write the completions file consumed by `evaluate`.
        #[arg(long)]
        completions: Option<PathBuf>,
    },
    /// Generate training, negative or evaluation datasets.
    Dataset {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "train")]
        mode: DatasetMode,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: OutputFormat,
        /// Tokens format: omit the closure prompt.
        #[arg(long)]
        no_prompt: bool,
    },
    /// Score a completions file and print the report as JSON.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Completions JSONL; stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Length and valley counts of naive versus bracket-style samples.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        closure: usize,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        max_length: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidRank | Error::InvalidArgument(_) | Error::UnsupportedRank(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let target: &mut dyn Write = if informational { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli.command, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn execute(command: Command, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Outcome {
    let common = match &command {
        Command::Sample { common, .. }
        | Command::Check { common, .. }
        | Command::Expand { common, .. }
        | Command::Baseline { common, .. }
        | Command::Dataset { common, .. }
        | Command::Evaluate { common, .. }
        | Command::Stats { common, .. } => common.clone(),
    };
    let rank = Rank::new(common.n)?;
    let mut file;
    let out: &mut dyn Write = match &common.out {
        Some(path) => {
            file = BufWriter::new(File::create(path)?);
            &mut file
        }
        None => stdout,
    };
    match command {
        Command::Sample {
            mode,
            closure,
            indices,
            count,
            max_length,
            format,
            ..
        } => sample(
            rank,
            common.seed,
            mode,
            closure,
            indices,
            count,
            max_length,
            format,
            out,
        ),
        Command::Check { format, .. } => check(rank, format, stdin, out),
        Command::Expand { expr, format, .. } => expand(rank, expr, format, stdin, out),
        Command::Baseline {
            method,
            batch,
            max_steps,
            budget,
            prefix_length,
            format,
            completions,
            ..
        } => {
            let opts = BaselineOpts {
                batch,
                max_steps,
                budget,
                prefix_length,
                completions,
            };
            baseline(rank, common.seed, method, &opts, format, out)
        }
        Command::Dataset {
            mode,
            count,
            format,
            no_prompt,
            ..
        } => dataset(rank, common.seed, mode, count, format, !no_prompt, out),
        Command::Evaluate { input, .. } => evaluate_file(rank, input, stdin, out),
        Command::Stats {
            closure,
            count,
            max_length,
            format,
            ..
        } => stats(rank, common.seed, closure, count, max_length, format, out),
    }?;
    out.flush()?;
    Ok(())
}

fn unsupported(format: OutputFormat, command: &str) -> Failure {
    Failure::Usage(format!("format {format:?} is not available for `{command}`").to_lowercase())
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let line = serde_json::to_string(value).map_err(|e| Failure::Data(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

fn write_word(out: &mut dyn Write, w: &Word, format: OutputFormat) -> Outcome {
    match format {
        OutputFormat::Text => writeln!(out, "{w}")?,
        OutputFormat::Jsonl => json_line(out, w)?,
        _ => unreachable!("checked by caller"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    rank: Rank,
    seed: u64,
    mode: SampleMode,
    closure: usize,
    indices: Vec<usize>,
    count: usize,
    max_length: Option<usize>,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Outcome {
    if !matches!(format, OutputFormat::Text | OutputFormat::Jsonl) {
        return Err(unsupported(format, "sample"));
    }
    let mut rng = seeded_rng(seed);
    let mut config = SamplerConfig::for_rank(rank);
    if let Some(cap) = max_length {
        config.max_r0_length = cap;
        config.max_ri_length = cap;
    }
    let spec = ClosureSpec::new(closure, rank)?;
    let indices = if indices.is_empty() {
        (0..rank.closures()).collect()
    } else {
        indices
    };
    for _ in 0..count {
        let word = match mode {
            SampleMode::Naive => {
                let conj = max_length.unwrap_or(10);
                sample_closure_naive(&spec, 3, conj, &mut rng)?
            }
            SampleMode::Bracket => sample_closure_bracket(&spec, &config, &mut rng)?.word,
            SampleMode::Commutator => sample_commutator(&indices, &config, &mut rng)?.word,
            SampleMode::Symmetric => sample_symmetric(&indices, &config, &mut rng)?.word,
        };
        write_word(out, &word, format)?;
    }
    Ok(())
}

fn read_words(rank: Rank, stdin: &mut dyn BufRead) -> std::result::Result<Vec<Word>, Failure> {
    let mut words = Vec::new();
    for (i, line) in stdin.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let w = Word::parse_text(&line, rank).map_err(|e| Failure::Data(format!("line {}: {e}", i + 1)))?;
        words.push(w);
    }
    Ok(words)
}

fn check(rank: Rank, format: OutputFormat, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    if !matches!(format, OutputFormat::Text | OutputFormat::Jsonl) {
        return Err(unsupported(format, "check"));
    }
    for w in read_words(rank, stdin)? {
        let label = multilabel(&w, rank);
        match format {
            OutputFormat::Text => writeln!(out, "{label}")?,
            _ => json_line(out, &json!({ "word": w, "label": label }))?,
        }
    }
    Ok(())
}

fn expand(
    rank: Rank,
    expr: Option<String>,
    format: OutputFormat,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Outcome {
    if !matches!(format, OutputFormat::Text | OutputFormat::Jsonl) {
        return Err(unsupported(format, "expand"));
    }
    let exprs = match expr {
        Some(e) => vec![e],
        None => stdin
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .collect::<io::Result<Vec<_>>>()?,
    };
    for e in exprs {
        let w = expand_text(&e, rank).map_err(|err| Failure::Data(err.to_string()))?;
        write_word(out, &w, format)?;
    }
    Ok(())
}

struct BaselineOpts {
    batch: usize,
    max_steps: usize,
    budget: usize,
    prefix_length: usize,
    completions: Option<PathBuf>,
}

fn baseline(
    rank: Rank,
    seed: u64,
    method: BaselineMethod,
    opts: &BaselineOpts,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Outcome {
    if !matches!(format, OutputFormat::Text | OutputFormat::Jsonl) {
        return Err(unsupported(format, "baseline"));
    }
    if opts.completions.is_some() && method != BaselineMethod::Greedy {
        return Err(Failure::Usage(
            "--completions is only produced by the greedy baseline".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let (hits, ratio, report): (Vec<Word>, f64, Option<EvalReport>) = match method {
        BaselineMethod::Random => {
            let r = random_search(opts.batch, &SamplerConfig::for_rank(rank), &mut rng)?;
            (r.hits, r.completion_ratio, None)
        }
        BaselineMethod::Evo => {
            if opts.batch == 0 {
                return Err(Failure::Usage("batch must be at least 1".into()));
            }
            let config = EvoConfig {
                max_iterations: opts.budget,
                ..EvoConfig::new(rank)
            };
            let mut hits = Vec::new();
            for _ in 0..opts.batch {
                if let Some(w) = evolve(&config, &mut rng)? {
                    hits.push(w);
                }
            }
            let ratio = hits.len() as f64 / opts.batch as f64;
            (hits, ratio, None)
        }
        BaselineMethod::Greedy => {
            let config = DatasetConfig::for_rank(rank);
            let max_steps = opts.max_steps;
            let mut completer = |p: &Word| greedy_complete(p, rank, max_steps).ok_or(Error::Empty);
            let (report, records) =
                evaluate(&mut completer, &config, opts.prefix_length, opts.batch, &mut rng)?;
            if let Some(path) = &opts.completions {
                let mut f = BufWriter::new(File::create(path)?);
                for r in &records {
                    json_line(&mut f, r)?;
                }
                f.flush()?;
            }
            let hits = records
                .into_iter()
                .filter(|r| !r.completion.is_empty() && is_in_full_intersection(&r.completion, rank))
                .map(|r| r.completion)
                .collect();
            (hits, report.completion_ratio, Some(report))
        }
    };
    match format {
        OutputFormat::Text => {
            for w in &hits {
                writeln!(out, "{w}")?;
            }
            writeln!(out, "completion_ratio={ratio}")?;
        }
        _ => {
            let method = format!("{method:?}").to_lowercase();
            json_line(
                out,
                &json!({
                    "method": method,
                    "n": rank.get(),
                    "seed": seed,
                    "batch": opts.batch,
                    "completion_ratio": ratio,
                    "report": report,
                    "hits": hits,
                }),
            )?;
        }
    }
    Ok(())
}

fn dataset(
    rank: Rank,
    seed: u64,
    mode: DatasetMode,
    count: usize,
    format: OutputFormat,
    prompt: bool,
    out: &mut dyn Write,
) -> Outcome {
    let write = |out: &mut dyn Write, r: &DatasetRecord| -> Outcome {
        match format {
            OutputFormat::Jsonl => writeln!(out, "{}", to_jsonl(r))?,
            OutputFormat::Tokens => writeln!(out, "{}", to_tokens(r, prompt))?,
            OutputFormat::Text => writeln!(out, "{}", r.word)?,
            OutputFormat::Csv => return Err(unsupported(format, "dataset")),
        }
        Ok(())
    };
    if format == OutputFormat::Csv {
        return Err(unsupported(format, "dataset"));
    }
    let mut rng = seeded_rng(seed);
    let config = DatasetConfig::for_rank(rank);
    match mode {
        DatasetMode::Train => {
            for r in gen_training_stream(&config, &mut rng)?.take(count) {
                write(out, &r?)?;
            }
        }
        DatasetMode::Negative => {
            for r in gen_negative_stream(&config, &mut rng)?.take(count) {
                write(out, &r?)?;
            }
        }
        // the evaluation set is fixed; `count` caps it
        DatasetMode::Nontrivial => {
            for r in gen_nontrivial_eval(rank)?.iter().take(count) {
                write(out, r)?;
            }
        }
    }
    Ok(())
}

fn evaluate_file(
    rank: Rank,
    input: Option<PathBuf>,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Outcome {
    let records = match input {
        Some(path) => read_completions(BufReader::new(File::open(path)?), rank)?,
        None => read_completions(stdin, rank)?,
    };
    let report = evaluate_completions(&records, rank)?;
    json_line(out, &report)
}

fn stats(
    rank: Rank,
    seed: u64,
    closure: usize,
    count: usize,
    max_length: usize,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Outcome {
    if !matches!(format, OutputFormat::Csv | OutputFormat::Jsonl) {
        return Err(unsupported(format, "stats"));
    }
    if count == 0 {
        return Err(Failure::Usage("count must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let spec = ClosureSpec::new(closure, rank)?;
    let config = SamplerConfig {
        max_r0_length: max_length,
        max_ri_length: max_length,
        ..SamplerConfig::for_rank(rank)
    };
    let bracket: Vec<Word> = (0..count)
        .map(|_| sample_closure_bracket(&spec, &config, &mut rng).map(|s| s.word))
        .collect::<crate::Result<_>>()?;
    let targets: Vec<usize> = bracket.iter().map(Word::len).collect();
    let naive = naive_length_matched(&spec, &targets, 8, max_length.div_ceil(2), &mut rng)?;

    let valleys = |ws: &[Word]| -> Vec<usize> {
        ws.iter()
            .map(|w| count_valleys(&word_dyck_path(w, &spec)))
            .collect()
    };
    let (naive_valleys, bracket_valleys) = (valleys(&naive), valleys(&bracket));
    match format {
        OutputFormat::Csv => {
            writeln!(out, "sampler,length,valleys")?;
            for (name, ws, vs) in [
                ("naive", &naive, &naive_valleys),
                ("bracket", &bracket, &bracket_valleys),
            ] {
                for (w, v) in ws.iter().zip(vs) {
                    writeln!(out, "{name},{},{v}", w.len())?;
                }
            }
        }
        _ => {
            let as_f64 = |xs: &[usize]| xs.iter().map(|&x| x as f64).collect::<Vec<_>>();
            let naive_len = as_f64(&naive.iter().map(Word::len).collect::<Vec<_>>());
            let ks = ks_two_sample(&naive_len, &as_f64(&targets))?;
            let (naive_mean, naive_var) = mean_variance(&as_f64(&naive_valleys));
            let (bracket_mean, bracket_var) = mean_variance(&as_f64(&bracket_valleys));
            json_line(
                out,
                &json!({
                    "n": rank.get(),
                    "closure": closure,
                    "count": count,
                    "ks_statistic": ks.statistic,
                    "ks_p_value": ks.p_value,
                    "naive_valleys": { "mean": naive_mean, "variance": naive_var },
                    "bracket_valleys": { "mean": bracket_mean, "variance": bracket_var },
                }),
            )?;
        }
    }
    Ok(())
}
