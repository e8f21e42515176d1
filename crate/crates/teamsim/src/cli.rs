//! Command-line driver.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use teamsim_core::batch::BallOrder;
use teamsim_core::{batch_topk_with, BatchOptions, Capacity, IncrementalEngine};

use crate::bench::{bench_row, crossover, BenchInput, BenchRow, UpdateKind};
use crate::generate::{gen_planted, pattern_from_neighborhood, GenConfig};
use crate::names::Labels;
use crate::session::{teams_table, Session, SessionConfig, SessionError, TeamJson};
use crate::snapshot::{dump_text, read_snapshot, write_snapshot};
use crate::text::{parse_graph, parse_pattern, parse_script, write_graph, write_pattern, GraphDoc, ScriptItem};

pub const EXIT_ERROR: u8 = 1;
pub const EXIT_UNSATISFIABLE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "teamsim", version, about = "Top-k team formation over labeled graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the batch top-k query once.
    Query(QueryArgs),
    /// Maintain top-k teams across update sets from a script or stdin.
    Session(SessionArgs),
    /// Time batch against incremental processing over update ratios.
    Bench(BenchArgs),
    /// Write a planted-partition graph.
    Gen(GenArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Jsonl,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads; 1 runs serially, 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[command(flatten)]
    pub common: Common,
    /// Skip no ball by its density bound.
    #[arg(long)]
    pub no_filter: bool,
}

#[derive(Args, Debug)]
pub struct SessionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub h: usize,
    /// Update script; stdin when absent.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub no_early_return: bool,
    /// Resume from an index snapshot taken for the same graph and pattern.
    #[arg(long)]
    pub load_index: Option<PathBuf>,
    /// Write an index snapshot after the script.
    #[arg(long)]
    pub save_index: Option<PathBuf>,
    /// Write a text dump of the index after the script.
    #[arg(long)]
    pub dump_index: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenFlags {
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0)]
    pub d: f64,
    #[arg(long, default_value_t = 200)]
    pub labels: u32,
    #[arg(long, default_value_t = 100)]
    pub communities: usize,
    #[arg(long, default_value_t = 0.8)]
    pub intra: f64,
    #[arg(long, default_value_t = 0.2)]
    pub inter: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl GenFlags {
    pub fn config(&self) -> GenConfig {
        GenConfig {
            n: self.n,
            avg_degree: self.d,
            labels: self.labels,
            communities: self.communities,
            intra: self.intra,
            inter: self.inter,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    /// Use this graph instead of generating one.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Use this pattern instead of one copied from the graph.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub pattern_nodes: usize,
    #[arg(long, value_enum, default_value_t = UpdateKind::Data)]
    pub kind: UpdateKind,
    /// Comma-separated update ratios.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5])]
    pub ratio: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub h: usize,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Check every incremental result against batch.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    /// Bind address; defaults to TEAMSIM_ADDR or 127.0.0.1:8080.
    #[arg(long)]
    pub addr: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: crate::text::ParseError },
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{0}")]
    Other(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(common: &Common, labels: &mut Labels) -> Result<(GraphDoc, teamsim_core::PatternGraph), CliError> {
    let parse_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Parse { path, source }
    };
    let doc = parse_graph(&read(&common.graph)?, labels).map_err(parse_err(&common.graph))?;
    let pattern = parse_pattern(&read(&common.pattern)?, labels).map_err(parse_err(&common.pattern))?;
    pattern.validate().map_err(SessionError::from)?;
    Ok((doc, pattern))
}

fn configure_threads(threads: usize) -> bool {
    if threads > 0 {
        // Fails only when a pool already exists, which keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    threads != 1
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    match command {
        Command::Query(a) => cmd_query(&a, out, err),
        Command::Session(a) => cmd_session(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out, err),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Serve(a) => {
            let addr = a
                .addr
                .or_else(|| std::env::var("TEAMSIM_ADDR").ok())
                .unwrap_or_else(|| "127.0.0.1:8080".to_string());
            crate::service::serve(&addr).map_err(|e| CliError::Other(format!("{addr}: {e}")))?;
            Ok(0)
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<output>".to_string(),
        source: e,
    }
}

fn print_teams(out: &mut dyn Write, format: Format, teams: &[teamsim_core::Team], names: &crate::NodeNames) -> Result<(), CliError> {
    match format {
        Format::Table => out.write_all(teams_table(teams, names).as_bytes()).map_err(io_err),
        Format::Jsonl => {
            for t in teams {
                let json = serde_json::to_string(&TeamJson::new(t, names, None)).expect("serializable");
                writeln!(out, "{json}").map_err(io_err)?;
            }
            Ok(())
        }
    }
}

pub fn cmd_query(a: &QueryArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let mut labels = Labels::new();
    let (doc, pattern) = load(&a.common, &mut labels)?;
    let opts = BatchOptions {
        filter: !a.no_filter,
        order: BallOrder::CenterAscending,
        parallel: configure_threads(a.common.threads),
    };
    let (outcome, _) = batch_topk_with(&pattern, &doc.graph, a.common.r, a.common.k, &opts)
        .map_err(|e| SessionError::from(teamsim_core::EngineError::from(e)))?;
    if !outcome.is_satisfiable() {
        let _ = writeln!(err, "unsatisfiable pattern");
        return Ok(EXIT_UNSATISFIABLE);
    }
    print_teams(out, a.common.format, outcome.teams(), &doc.names)?;
    Ok(0)
}

fn report_set(out: &mut dyn Write, format: Format, index: usize, session: &Session, result: &teamsim_core::QueryResult) -> Result<(), CliError> {
    match format {
        Format::Table => {
            writeln!(
                out,
                "== set {index}: {} affected balls, {} visited, early return {}",
                result.stats.affected_balls,
                result.stats.balls_visited,
                if result.early_returned { "yes" } else { "no" }
            )
            .map_err(io_err)?;
            if !result.satisfiable {
                writeln!(out, "unsatisfiable pattern").map_err(io_err)?;
            }
            print_teams(out, format, result.topk.teams(), session.names())
        }
        Format::Jsonl => {
            let json = serde_json::json!({
                "set": index,
                "satisfiable": result.satisfiable,
                "earlyReturned": result.early_returned,
                "affectedBalls": result.stats.affected_balls,
                "teams": session.teams_json(false),
            });
            writeln!(out, "{json}").map_err(io_err)
        }
    }
}

fn totals_json(session: &Session) -> serde_json::Value {
    let t = session.engine().totals();
    serde_json::json!({
        "updateSets": t.update_sets,
        "patternUnits": t.pattern_units,
        "dataUnits": t.data_units,
        "affectedBalls": t.affected_balls,
        "ballsVisited": t.balls_visited,
        "ballsCombined": t.balls_combined,
        "relationsRecomputed": t.relations_recomputed,
        "relationsIncremental": t.relations_incremental,
        "earlyReturns": t.early_returns,
        "rebuilds": t.rebuilds,
    })
}

pub fn cmd_session(a: &SessionArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let mut labels = Labels::new();
    let (doc, pattern) = load(&a.common, &mut labels)?;
    let cfg = SessionConfig {
        r: a.common.r,
        k: a.common.k,
        h: a.h,
        early_return: !a.no_early_return,
        parallel: configure_threads(a.common.threads),
    };
    let mut session = match &a.load_index {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let (fragmentation, index) =
                read_snapshot(&bytes, &pattern).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
            let engine = IncrementalEngine::from_parts(pattern, doc.graph, fragmentation, index, cfg.k, cfg.engine_options())
                .map_err(SessionError::from)?;
            Session::from_engine(engine, labels, doc.names)
        }
        None => Session::new(doc, pattern, labels, cfg)?,
    };
    let script = match &a.script {
        Some(path) => read(path)?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
                path: "<stdin>".to_string(),
                source,
            })?;
            s
        }
    };
    let items = parse_script(&script).map_err(|source| CliError::Parse {
        path: a.script.as_ref().map_or("<stdin>".to_string(), |p| p.display().to_string()),
        source,
    })?;

    if !session.engine().is_satisfiable() {
        let _ = writeln!(err, "unsatisfiable pattern");
    }
    let mut rejected = 0;
    let mut index = 0;
    for item in items {
        match item {
            ScriptItem::Set(set) => {
                index += 1;
                match session.apply(&set) {
                    Ok(result) => report_set(out, a.common.format, index, &session, &result)?,
                    Err(e) => {
                        rejected += 1;
                        let _ = writeln!(err, "set {index} rejected: {e}");
                    }
                }
            }
            ScriptItem::Stats => writeln!(out, "{}", totals_json(&session)).map_err(io_err)?,
            ScriptItem::Rebuild => {
                session.rebuild()?;
                if a.common.format == Format::Table {
                    writeln!(out, "== rebuilt with h={}", a.h).map_err(io_err)?;
                }
            }
        }
    }
    let engine = session.engine();
    if let Some(path) = &a.save_index {
        write_file(path, &write_snapshot(engine.fragmentation(), engine.index()))?;
    }
    if let Some(path) = &a.dump_index {
        write_file(path, dump_text(engine.fragmentation(), engine.index()).as_bytes())?;
    }
    Ok(if rejected > 0 { EXIT_ERROR } else { 0 })
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut labels = Labels::new();
    let doc = gen_planted(&a.gen.config(), &mut labels).map_err(|e| CliError::Other(e.to_string()))?;
    let text = write_graph(&doc, &labels);
    match &a.out {
        Some(path) => write_file(path, text.as_bytes())?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(0)
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let parallel = configure_threads(a.threads);
    let mut labels = Labels::new();
    let doc = match &a.graph {
        Some(path) => parse_graph(&read(path)?, &mut labels).map_err(|source| CliError::Parse {
            path: path.display().to_string(),
            source,
        })?,
        None => gen_planted(&a.gen.config(), &mut labels).map_err(|e| CliError::Other(e.to_string()))?,
    };
    let pattern = match &a.pattern {
        Some(path) => parse_pattern(&read(path)?, &mut labels).map_err(|source| CliError::Parse {
            path: path.display().to_string(),
            source,
        })?,
        None => pattern_from_neighborhood(&doc.graph, a.pattern_nodes, Capacity::default(), a.gen.seed)
            .ok_or_else(|| CliError::Other("graph has no connected piece of the requested pattern size".into()))?,
    };
    let _ = writeln!(err, "pattern:\n{}", write_pattern(&pattern, &labels));
    let cfg = SessionConfig {
        r: a.r,
        k: a.k,
        h: a.h,
        early_return: true,
        parallel,
    };
    let engine =
        IncrementalEngine::new(pattern, doc.graph, a.r, a.k, a.h, cfg.engine_options()).map_err(SessionError::from)?;
    let input = BenchInput {
        engine: &engine,
        labels: labels.len() as u32,
        seed: a.gen.seed,
        parallel,
        verify: a.verify,
    };
    writeln!(out, "{}", BenchRow::CSV_HEADER).map_err(io_err)?;
    let mut rows = Vec::new();
    for &ratio in &a.ratio {
        let row = bench_row(&input, a.kind, ratio).map_err(|e| CliError::Other(e.to_string()))?;
        writeln!(out, "{}", row.csv()).map_err(io_err)?;
        rows.push(row);
    }
    match crossover(&rows) {
        Some(c) => writeln!(err, "crossover at ratio {c}"),
        None => writeln!(err, "no crossover in the swept ratios"),
    }
    .map_err(io_err)?;
    Ok(0)
}
