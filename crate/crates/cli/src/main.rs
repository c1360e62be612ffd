//! `mwb`: consequence checks, counterexamples, frame classification,
//! translations and the verification suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use modal_workbench::consequence::{
    global_consequence, local_consequence, SearchBound, SearchError, Verdict, Witness,
};
use modal_workbench::domain::{informational_consequence, DomainError};
use modal_workbench::frameprops::FrameClass;
use modal_workbench::harness::{self, run_suite, CheckSpec, Report, DEFAULT_SEED};
use modal_workbench::io::{classification_json, parse_frames, verdict_to_json, WorldNames};
use modal_workbench::kripke::{Frame, MAX_WORLDS};
use modal_workbench::syntax::{parse, Formula};
use modal_workbench::update::{
    pal_reduce, sequential_update_consequence, translate_pal, update_consequence, UpdateError,
};

const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "mwb", version, about = "Bounded model checking for local and global modal consequence")]
struct Cli {
    /// Worker threads; defaults to MWB_THREADS, then to the number of cores.
    #[arg(long, global = true, env = "MWB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a consequence query within a bound.
    Check(CheckArgs),
    /// Like `check`, always printing the witness; isomorphic frames are skipped.
    Counterexample(CheckArgs),
    /// Named-class memberships and global properties of a frame, as JSON.
    Classify {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Translate a formula to announcement form.
    Translate {
        #[arg(long, conflicts_with = "reduce", required_unless_present = "reduce")]
        pal: bool,
        /// Translate, then eliminate announcements.
        #[arg(long)]
        reduce: bool,
        formula: String,
    },
    /// Parse and print a formula in canonical form.
    Parse {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Run registered checks and report discrepancies.
    Verify {
        /// Comma-separated check ids, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Replaces every check's default bound.
        #[arg(long)]
        max_worlds: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_stats: bool,
        /// List the registered checks and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryType {
    Local,
    Global,
    Informational,
    Update,
    SequentialUpdate,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "type", alias = "semantics", value_enum)]
    kind: QueryType,
    /// A named class: K, T, D, B, K4, KD4, S4, S5, K45, KD45.
    #[arg(long, conflicts_with = "frames")]
    class: Option<String>,
    /// A frame file: the class of the frames it lists.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Defaults to 3, or to the largest frame in `--frames`.
    #[arg(long)]
    max_worlds: Option<usize>,
    /// Repeatable. For sequential-update: the update steps, in order.
    #[arg(long = "premise")]
    premises: Vec<String>,
    #[arg(long)]
    conclusion: String,
    /// Comma-separated atoms added to the valuation sweep.
    #[arg(long, value_delimiter = ',')]
    atoms: Vec<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    no_stats: bool,
    /// Skip frames isomorphic to an earlier one.
    #[arg(long)]
    dedup: bool,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::usage(format!("{e:#}"))
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Failure {
        let code = match e {
            SearchError::ZeroBound => EXIT_USAGE,
            _ => EXIT_LIMIT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Failure {
        match e {
            DomainError::Search(s) => s.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<UpdateError> for Failure {
    fn from(e: UpdateError) -> Failure {
        match e {
            UpdateError::Search(s) => s.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| Failure::usage(format!("{e}\n{}", e.caret(text))))
}

fn read(path: &Path) -> Result<String, Failure> {
    Ok(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)
}

fn load_frames(path: &Path) -> Result<Vec<(Frame, WorldNames)>, Failure> {
    Ok(parse_frames(&read(path)?).with_context(|| format!("bad frame file {}", path.display()))?)
}

/// World names for a witness: those of the loaded frame it lives on, if any.
fn names_for(v: &Verdict, loaded: &[(Frame, WorldNames)]) -> WorldNames {
    if let Some(Witness::Relational { model, .. }) = &v.witness {
        if let Some((_, names)) = loaded.iter().find(|(f, _)| f == model.frame()) {
            return names.clone();
        }
    }
    WorldNames::numeric(MAX_WORLDS)
}

fn run_check(args: &CheckArgs, force_witness: bool) -> Result<u8, Failure> {
    let relational = matches!(args.kind, QueryType::Local | QueryType::Global);
    if !relational && (args.class.is_some() || args.frames.is_some()) {
        return Err(Failure::usage(
            "informational and update checks range over their own models; --class and --frames do not apply",
        ));
    }
    if relational && args.class.is_none() && args.frames.is_none() {
        return Err(Failure::usage("local and global checks need --class or --frames"));
    }
    let premises = args
        .premises
        .iter()
        .map(|p| formula(p))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = formula(&args.conclusion)?;

    let mut loaded = Vec::new();
    let class = if let Some(name) = &args.class {
        Some(name.parse::<FrameClass>().map_err(|e| Failure::usage(e.to_string()))?)
    } else if let Some(path) = &args.frames {
        loaded = load_frames(path)?;
        Some(
            FrameClass::explicit(loaded.iter().map(|(f, _)| *f))
                .map_err(|e| Failure::usage(e.to_string()))?,
        )
    } else {
        None
    };
    let default_worlds = loaded.iter().map(|(f, _)| f.size()).max().unwrap_or(3);
    let bound = SearchBound::new(args.max_worlds.unwrap_or(default_worlds))
        .with_atoms(args.atoms.iter().cloned())
        .dedup(args.dedup || force_witness);

    let verdict = match (args.kind, &class) {
        (QueryType::Local, Some(c)) => local_consequence(&premises, &conclusion, c, &bound)?,
        (QueryType::Global, Some(c)) => global_consequence(&premises, &conclusion, c, &bound)?,
        (QueryType::Informational, _) => informational_consequence(&premises, &conclusion, &bound)?,
        (QueryType::Update, _) => update_consequence(&premises, &conclusion, &bound)?,
        (QueryType::SequentialUpdate, _) => {
            sequential_update_consequence(&premises, &conclusion, &bound)?
        }
        _ => unreachable!("relational checks have a class"),
    };

    let names = names_for(&verdict, &loaded);
    let out = verdict_to_json(&verdict, &names, !args.no_stats);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        print_verdict(&out, force_witness);
    }
    Ok(if verdict.holds() { 0 } else { EXIT_REFUTED })
}

fn names_list(v: &Value) -> String {
    v.as_array()
        .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn print_verdict(out: &Value, force_witness: bool) {
    println!("{}", out["outcome"].as_str().unwrap_or_default());
    if let Some(w) = out.get("witness") {
        if let Some(world) = w.get("world") {
            println!("  world:     {}", world.as_str().unwrap_or_default());
        }
        if let Some(state) = w.get("state") {
            println!("  state:     {{{}}}", names_list(state));
        }
        println!("  worlds:    {{{}}}", names_list(&w["worlds"]));
        if let Some(rel) = w.get("relation").and_then(Value::as_array) {
            let pairs: Vec<String> = rel
                .iter()
                .map(|p| format!("{}->{}", p[0].as_str().unwrap_or(""), p[1].as_str().unwrap_or("")))
                .collect();
            println!("  relation:  {}", if pairs.is_empty() { "(empty)".to_string() } else { pairs.join(" ") });
        }
        if let Some(val) = w.get("valuation").and_then(Value::as_object) {
            for (atom, ws) in val {
                println!("  {atom:<9}  {{{}}}", names_list(ws));
            }
        }
    } else if force_witness {
        println!("  no counterexample within the bound");
    }
    if let Some(s) = out.get("stats") {
        println!("  searched {} frames, {} models in {} ms", s["frames"], s["models"], s["elapsed_ms"]);
    }
}

fn select_suite(suite: &str, max_worlds: Option<usize>, seed: u64) -> Result<Vec<CheckSpec>, Failure> {
    let all = harness::registry(max_worlds, seed);
    if suite == "all" {
        return Ok(all);
    }
    suite
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|id| {
            harness::find_spec(&all, id).ok_or_else(|| {
                Failure::usage(format!(
                    "unknown check {id:?}; known checks: {}",
                    harness::check_ids().join(", ")
                ))
            })
        })
        .collect()
}

fn verify_exit(report: &Report) -> u8 {
    if !report.passed() {
        EXIT_REFUTED
    } else if report.limited() {
        EXIT_LIMIT
    } else {
        0
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check(args) => run_check(&args, false),
        Command::Counterexample(args) => run_check(&args, true),
        Command::Classify { frame } => {
            let frames = load_frames(&frame)?;
            let out: Vec<Value> = frames.iter().map(|(f, _)| classification_json(f)).collect();
            let out = if out.len() == 1 { out[0].clone() } else { Value::Array(out) };
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            Ok(0)
        }
        Command::Translate { pal: _, reduce, formula: text } => {
            let f = translate_pal(&formula(&text)?);
            let out = if reduce { pal_reduce(&f)? } else { f };
            println!("{out}");
            Ok(0)
        }
        Command::Parse { formula: text, json } => {
            let f = formula(&text)?;
            if json {
                let out = json!({
                    "formula": f.to_string(),
                    "full": f.render_full(),
                    "fragment": format!("{:?}", f.fragment()),
                    "modal_depth": f.modal_depth(),
                    "size": f.size(),
                    "atoms": f.atoms(),
                });
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            } else {
                println!("{f}");
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            max_worlds,
            seed,
            json,
            no_stats,
            list,
        } => {
            if list {
                for s in harness::registry(max_worlds, seed) {
                    println!("{:<26} n={}  {}", s.id, s.bound.max_worlds, s.title);
                }
                return Ok(0);
            }
            let specs = select_suite(&suite, max_worlds, seed)?;
            let report = run_suite(&specs);
            if json {
                let out = report.to_json(!no_stats);
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            } else {
                print!("{}", report.table(!no_stats));
            }
            Ok(verify_exit(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let pool = match rayon_pool(threads) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn rayon_pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        anyhow::ensure!(n >= 1, "--threads must be at least 1");
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}
