//! Command-line front end shared by the `wcdp` binary and the tests.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::disambiguator::{self, diagnose, Analysis};
use crate::domains::DomainOptions;
use crate::error::Error;
use crate::grammar::{parse_grammar, Grammar};
use crate::lexicon::{Lexicon, Sentence};
use crate::network::build_network;
use crate::oracle::{search, SearchOptions};
use crate::output::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GRAMMAR: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wcdp", version, about = "Weighted constraint dependency parser")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyse sentences with a grammar and lexicon.
    Parse(ParseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Eliminative pruning over the constraint network.
    Propagate,
    /// Exhaustive best-first search.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(short = 'g', long)]
    pub grammar: PathBuf,
    #[arg(short = 'l', long)]
    pub lexicon: PathBuf,
    /// A single sentence.
    #[arg(short = 's', long, conflicts_with = "input")]
    pub sentence: Option<String>,
    /// File with one sentence per line; `-` reads standard input.
    #[arg(short = 'i', long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Propagate)]
    pub mode: Mode,
    /// Number of oracle analyses per sentence.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
    /// Include the pruning and activation trace (propagate mode).
    #[arg(long)]
    pub trace: bool,
    /// Include violated constraints and expectation violations.
    #[arg(long)]
    pub diagnose: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Sentence(String),
    File(PathBuf),
    Stdin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub grammar: PathBuf,
    pub lexicon: PathBuf,
    pub input: Input,
    pub mode: Mode,
    pub top_k: usize,
    pub trace: bool,
    pub diagnose: bool,
    pub format: Format,
}

impl From<ParseArgs> for RunConfig {
    fn from(a: ParseArgs) -> Self {
        let input = match (a.sentence, a.input) {
            (Some(s), _) => Input::Sentence(s),
            (None, Some(p)) if p.as_os_str() != "-" => Input::File(p),
            _ => Input::Stdin,
        };
        RunConfig {
            grammar: a.grammar,
            lexicon: a.lexicon,
            input,
            mode: a.mode,
            top_k: a.top_k as usize,
            trace: a.trace,
            diagnose: a.diagnose,
            format: a.format,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_GRAMMAR,
    }
}

fn read(path: &PathBuf) -> Result<String, (i32, String)> {
    fs::read_to_string(path).map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))
}

fn load(config: &RunConfig) -> Result<(Grammar, Lexicon), (i32, String)> {
    let g = parse_grammar(&read(&config.grammar)?)
        .map_err(|e| (EXIT_GRAMMAR, format!("{}: {e}", config.grammar.display())))?;
    let l = Lexicon::parse(&read(&config.lexicon)?)
        .map_err(|e| (EXIT_GRAMMAR, format!("{}: {e}", config.lexicon.display())))?;
    Ok((g, l))
}

fn input_lines(input: &Input) -> Result<Vec<String>, (i32, String)> {
    let lines = match input {
        Input::Sentence(s) => vec![s.clone()],
        Input::File(p) => read(p)?.lines().map(str::to_string).collect(),
        Input::Stdin => io::stdin()
            .lock()
            .lines()
            .collect::<io::Result<_>>()
            .map_err(|e| (EXIT_IO, format!("stdin: {e}")))?,
    };
    Ok(lines)
}

/// Records for one sentence under `config`.
pub fn analyse(sentence: &Sentence, grammar: &Grammar, config: &RunConfig) -> crate::Result<Vec<Record>> {
    match config.mode {
        Mode::Propagate => {
            let d = disambiguator::run(sentence, grammar, DomainOptions::default())?;
            let mut rec = Record::from_analysis(sentence, &d.analysis);
            if config.diagnose {
                rec = rec.with_diagnosis(&diagnose(&d.analysis, &d.network));
            }
            if config.trace {
                rec = rec.with_trace(d.network.trace());
            }
            Ok(vec![rec])
        }
        Mode::Oracle => {
            let top = search(sentence, grammar, SearchOptions::top(config.top_k))?;
            let net = if config.diagnose {
                Some(build_network(sentence, grammar)?)
            } else {
                None
            };
            Ok(top
                .iter()
                .enumerate()
                .map(|(i, scored)| {
                    let rec = Record::from_scored(sentence, scored, i + 1);
                    match &net {
                        Some(net) => {
                            let analysis = Analysis {
                                relations: scored.assignment.clone(),
                                score: scored.score,
                                violations: scored.violations.clone(),
                            };
                            rec.with_diagnosis(&diagnose(&analysis, net))
                        }
                        None => rec,
                    }
                })
                .collect())
        }
    }
}

fn render(rec: &Record, format: Format) -> String {
    match format {
        Format::JsonLines => rec.to_json_line() + "\n",
        Format::Text => rec.to_text() + "\n",
    }
}

/// Runs one configuration, writing records to `out` and errors to `err`.
/// Returns the process exit status.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = (|| {
        let (grammar, lexicon) = load(config)?;
        let mut status = EXIT_OK;
        for line in input_lines(&config.input)? {
            let sentence = Sentence::parse(&line, &lexicon);
            if sentence.is_empty() {
                continue;
            }
            match analyse(&sentence, &grammar, config) {
                Ok(records) => {
                    for rec in &records {
                        out.write_all(render(rec, config.format).as_bytes())
                            .map_err(|e| (EXIT_IO, format!("output: {e}")))?;
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "{}: {e}", sentence.text());
                    status = status.max(exit_code(&e));
                }
            }
        }
        Ok(status)
    })();
    match result {
        Ok(status) => status,
        Err((status, message)) => {
            let _ = writeln!(err, "error: {message}");
            status
        }
    }
}

/// Parses process arguments and runs; used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let Command::Parse(args) = cli.command;
    let config = RunConfig::from(args);
    run(&config, &mut io::stdout().lock(), &mut io::stderr().lock())
}
