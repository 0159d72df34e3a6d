use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tripwise_agents::{BackendConfig, HttpConfig, MockConfig};
use tripwise_core::ingest::{convert_reference_to_csv, RawReferenceDocument};
use tripwise_core::model::Split;
use tripwise_core::promptgen::DEFAULT_EPS;
use tripwise_core::solver::{solve, SearchConfig, Strategy};
use tripwise_core::synth::world;
use tripwise_core::{write_plan, EvaluationReport, Percent};
use tripwise_orchestrator::{api, OrchError, Project, RunRecord};

#[derive(Parser)]
#[command(name = "tripwise", version, about = "Travel plan evaluation, search and prompt refinement")]
struct Cli {
    /// Data directory holding reference tables, queries, revisions and runs.
    #[arg(long, global = true, default_value = "data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw reference document (JSON of embedded CSV blocks) to CSV files.
    Convert {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one query and print the plan.
    Plan {
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Beam)]
        strategy: StrategyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one prompt revision over a split.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// Revision index; defaults to the latest.
        #[arg(long)]
        revision: Option<u32>,
    },
    /// Run the automated refinement loop.
    Loop {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_EPS.to_string())]
        eps: String,
        #[arg(long, default_value_t = 5)]
        max_iters: u32,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value_t = 2)]
        workers: usize,
    },
    /// Print a pass-rate table over runs, with deltas between rows.
    Report {
        /// Run ids in row order; defaults to every run.
        #[arg(long, value_delimiter = ',')]
        runs: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic data directory.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 45)]
        train: usize,
        #[arg(long, default_value_t = 180)]
        validation: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Beam,
    Exhaustive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Mock,
    Http,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "train")]
    split: Split,
    #[arg(long, value_enum, default_value_t = BackendKind::Mock)]
    backend: BackendKind,
    /// JSON backend configuration; required for the http backend.
    #[arg(long)]
    backend_config: Option<PathBuf>,
    /// Mock fault injection, `constraint-id=probability`. Repeatable.
    #[arg(long = "fault")]
    faults: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    prompt_sensitive: bool,
    /// Write the run record(s) as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, OrchError> {
    let text = std::fs::read_to_string(path).map_err(|e| OrchError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| OrchError::Validation(format!("{}: {e}", path.display())))
}

fn backend(args: &RunArgs) -> Result<BackendConfig, OrchError> {
    let cfg = match (args.backend, &args.backend_config) {
        (BackendKind::Http, None) => {
            return Err(OrchError::Validation("--backend http needs --backend-config".into()));
        }
        (BackendKind::Http, Some(path)) => {
            let v: serde_json::Value = read_json(path)?;
            if v.get("kind").is_some() {
                serde_json::from_value(v).map_err(|e| OrchError::Validation(e.to_string()))?
            } else {
                let h: HttpConfig = serde_json::from_value(v).map_err(|e| OrchError::Validation(e.to_string()))?;
                BackendConfig::HttpLlm(h)
            }
        }
        (BackendKind::Mock, Some(path)) => read_json(path)?,
        (BackendKind::Mock, None) => {
            let mut fault_profile = BTreeMap::new();
            for f in &args.faults {
                let (id, p) = f
                    .split_once('=')
                    .ok_or_else(|| OrchError::Validation(format!("fault {f:?} is not id=probability")))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| OrchError::Validation(format!("fault {f:?}: bad probability")))?;
                fault_profile.insert(id.to_string(), p);
            }
            BackendConfig::ScriptedMock(MockConfig {
                fault_profile,
                seed: args.seed,
                prompt_sensitive: args.prompt_sensitive,
            })
        }
    };
    match (&cfg, args.backend) {
        (BackendConfig::HttpLlm(_), BackendKind::Mock) | (BackendConfig::ScriptedMock(_), BackendKind::Http) => {
            Err(OrchError::Validation("--backend disagrees with the config file kind".into()))
        }
        _ => Ok(cfg),
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), OrchError> {
    std::fs::write(path, text).map_err(|e| OrchError::Storage(format!("{}: {e}", path.display())))
}

fn headline(r: &RunRecord) -> String {
    let rep: &EvaluationReport = &r.report;
    format!(
        "{} {} {} plans={} delivery={} cs_micro={} cs_macro={} hard_micro={} hard_macro={} final={}",
        r.run_id,
        r.revision_id,
        r.split,
        r.artifacts.len(),
        rep.delivery_rate,
        rep.commonsense_micro,
        rep.commonsense_macro,
        rep.hard_micro,
        rep.hard_macro,
        rep.final_pass_rate
    )
}

fn backend_dead(r: &RunRecord) -> bool {
    !r.artifacts.is_empty() && r.artifacts.iter().all(|a| a.backend_failure.is_some())
}

fn run(cli: Cli) -> Result<(), OrchError> {
    match cli.command {
        Command::Convert { input, out } => {
            let doc = RawReferenceDocument::from_json_file(&input)?;
            for p in convert_reference_to_csv(&doc, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Synth { seed, train, validation } => {
            let w = world(seed, train, validation);
            let p = Project::init(&cli.data_dir, &w.bundle, &w.queries)?;
            println!("{}: {} queries, R0 ready", p.root().display(), p.queries().len());
        }
        Command::Plan { query, strategy, out } => {
            let p = Project::open(&cli.data_dir)?;
            let q = p.query(&query)?;
            let cfg = SearchConfig {
                strategy: match strategy {
                    StrategyArg::Greedy => Strategy::Greedy,
                    StrategyArg::Beam => Strategy::Beam,
                    StrategyArg::Exhaustive => Strategy::Exhaustive,
                },
                ..SearchConfig::default()
            };
            let sol = solve(q, p.bundle(), &cfg).map_err(|e| OrchError::Validation(e.to_string()))?;
            let text = write_plan(&sol.plan);
            match out {
                Some(path) => write_out(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!("total cost ${}", sol.cost);
        }
        Command::Evaluate { run, revision } => {
            let cfg = backend(&run)?;
            let p = Project::open(&cli.data_dir)?;
            let r = p.run_evaluation(run.split, revision, &cfg)?;
            println!("{}", headline(&r));
            if let Some(path) = &run.out {
                write_out(path, &serde_json::to_string_pretty(&r).expect("record serializes"))?;
            }
            if backend_dead(&r) {
                return Err(OrchError::Backend(format!(
                    "every request failed, first: {}",
                    r.artifacts[0].backend_failure.as_deref().unwrap_or_default()
                )));
            }
        }
        Command::Loop { run, eps, max_iters } => {
            let cfg = backend(&run)?;
            let eps: Percent = eps.parse().map_err(OrchError::Validation)?;
            let p = Project::open(&cli.data_dir)?;
            let outcome = p.run_loop(max_iters, eps, run.split, &cfg)?;
            for r in &outcome.records {
                println!("{}", headline(r));
            }
            println!("stopped: {}", outcome.stop_reason);
            let ids: Vec<String> = outcome.records.iter().map(|r| r.run_id.clone()).collect();
            print!("{}", p.report_table(&ids)?);
            if let Some(path) = &run.out {
                write_out(path, &serde_json::to_string_pretty(&outcome).expect("outcome serializes"))?;
            }
            if outcome.records.iter().any(backend_dead) {
                return Err(OrchError::Backend("every request of a run failed".into()));
            }
        }
        Command::Serve { addr, workers } => {
            let p = Arc::new(Project::open(&cli.data_dir)?);
            let rt = tokio::runtime::Runtime::new().map_err(|e| OrchError::Storage(e.to_string()))?;
            rt.block_on(api::serve(p, &addr, workers))
                .map_err(|e| OrchError::Storage(format!("serve on {addr}: {e}")))?;
        }
        Command::Report { runs, out } => {
            let p = Project::open(&cli.data_dir)?;
            let ids = if runs.is_empty() {
                p.runs().list().into_iter().map(|e| e.run_id).collect()
            } else {
                runs
            };
            if ids.is_empty() {
                return Err(OrchError::Validation("no runs to report".into()));
            }
            let table = p.report_table(&ids)?;
            match out {
                Some(path) => write_out(&path, &table)?,
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
