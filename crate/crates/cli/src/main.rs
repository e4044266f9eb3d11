use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxindex::catalog::{load_catalog, CatalogEntry};
use maxindex::invariants::{
    index2_frame_of, length_of, maximal_index_of, perfection_rank_of, quotient_structure, type_profile, InvariantError,
};
use maxindex::lattice::{minimal_vectors, GramMatrix};
use maxindex::config::Relaxation;
use maxindex::search::{classify, max_family_in, Budget, CycleRegime, SearchStatus};
use maxindex_cli::checks;
use maxindex_cli::{exit_code, parse_range, render, Format, Record, Status};
use serde_json::json;

const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "maxindex", version, about = "Lattice invariants and kissing-number bounds for maximal index 2")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table, global = true)]
    format: OutputFormat,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory holding catalog files (default: the shipped data).
    #[arg(long, global = true, env = "MAXINDEX_DATA")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum, kissing number, maximal index, length, frame and perfection of one lattice.
    Invariants(InvariantsArgs),
    /// The kissing-number bound, its recomputation, the type sums and the perfection gap.
    Bounds {
        /// `N`, `A..B` or `A..=B` (both ends inclusive).
        #[arg(long)]
        n: String,
    },
    /// Largest admissible family of p-subsets of {1..n}.
    Search(SearchArgs),
    /// Maximal admissible graphs of 2-sets on n indices.
    Classify {
        #[arg(long)]
        n: usize,
        /// Allow singletons as well (marked vertices).
        #[arg(long)]
        singletons: bool,
    },
    /// Check every published statement the toolkit can reproduce.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InvariantsArgs {
    /// Gram file in the catalog format (a single entry or the first of a list).
    #[arg(long, conflicts_with = "catalog")]
    gram: Option<PathBuf>,
    /// Entry name looked up in the catalog files.
    #[arg(long)]
    catalog: Option<String>,
    /// Verify the entry's expected fields.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Node limit per search.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Time limit per search in seconds.
    #[arg(long)]
    budget_secs: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, String> {
        if self.budget_nodes == Some(0) || self.budget_secs.is_some_and(|s| s <= 0.0 || !s.is_finite()) {
            return Err("budget must be positive".into());
        }
        Ok(Budget { max_nodes: self.budget_nodes, max_time: self.budget_secs.map(Duration::from_secs_f64) })
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    /// Require a 3-cycle of the weight-2 relation.
    #[arg(long, conflicts_with = "no_cycles")]
    cycles: bool,
    /// Forbid 3-cycles of the weight-2 relation.
    #[arg(long)]
    no_cycles: bool,
    /// Use the configuration predicates only, without the length condition.
    #[arg(long)]
    predicates_only: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Extra catalog file to validate (repeatable).
    #[arg(long)]
    catalog_file: Vec<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

fn shipped_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn catalog_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let cat = dir.join("catalog");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&cat)
        .map_err(|e| format!("cannot read {}: {e}", cat.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn load_all(files: &[PathBuf]) -> Result<Vec<CatalogEntry>, String> {
    let mut out = Vec::new();
    for f in files {
        out.extend(load_catalog(f, false).map_err(|e| format!("{}: {e}", f.display()))?);
    }
    Ok(out)
}

struct Failure(String);

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(s)
    }
}

fn invariant_records(entry: &CatalogEntry, strict: bool) -> Result<Vec<Record>, Failure> {
    let g: &GramMatrix = &entry.gram;
    let mut out = vec![Record::info("name", &entry.name), Record::info("dim", entry.dim)];
    if strict {
        match entry.verify() {
            Ok(()) => out.push(Record::new("expected fields", "", &entry.expected, "verified", Status::Pass)),
            Err(e) => out.push(Record::new("expected fields", "", &entry.expected, e.to_string(), Status::Fail)),
        }
    }
    let mv = minimal_vectors(g).map_err(|e| e.to_string())?;
    out.push(Record::info("min", mv.min_norm.to_string()));
    out.push(Record::info("s", mv.s()));
    let perf = perfection_rank_of(&mv, g.dim());
    out.push(Record::info("perfection_rank", format!("{}/{}", perf.rank, perf.full)));
    out.push(Record::info("perfect", perf.is_perfect()));
    let mi = match maximal_index_of(g, &mv) {
        Ok(mi) => mi,
        Err(InvariantError::NotWellRounded { .. }) => {
            out.push(Record::info("well_rounded", false));
            return Ok(out);
        }
        Err(e) => return Err(Failure(e.to_string())),
    };
    out.push(Record::info("well_rounded", true));
    out.push(Record::info("maximal_index", mi.index));
    out.push(Record::info("witness", &mi.vectors));
    if let Ok(q) = quotient_structure(g, &mi.vectors) {
        out.push(Record::info("quotient_divisors", q.iter().map(|d| d.to_string()).collect::<Vec<_>>()));
    }
    if mi.index != 2 {
        return Ok(out);
    }
    let len = length_of(g, &mv, &mi).map_err(|e| e.to_string())?;
    out.push(Record::info("length", len.length));
    match index2_frame_of(g, &mv, &mi, &len) {
        Ok(f) => {
            let tp = type_profile(&f);
            out.push(Record::info("glue_minimal", f.glue_minimal));
            out.push(Record::info("type_profile", &tp.t));
            out.push(Record::info(
                "index_sets",
                f.index_sets().map(|s| s.to_string()).collect::<Vec<_>>(),
            ));
        }
        Err(InvariantError::WrongLength { .. }) => out.push(Record::info("frame", "length < n: no index-2 frame")),
        Err(e) => return Err(Failure(e.to_string())),
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<Vec<Record>, Failure> {
    let data_dir = cli.data_dir.clone().unwrap_or_else(shipped_data_dir);
    match cli.command {
        Command::Invariants(a) => {
            let entry = match (&a.gram, &a.catalog) {
                (Some(path), _) => load_catalog(path, false)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .next()
                    .ok_or_else(|| format!("{}: no entries", path.display()))?,
                (None, Some(name)) => load_all(&catalog_files(&data_dir)?)?
                    .into_iter()
                    .find(|e| &e.name == name)
                    .ok_or_else(|| format!("no catalog entry named {name:?}"))?,
                (None, None) => return Err(Failure("give --gram FILE or --catalog NAME".into())),
            };
            invariant_records(&entry, a.strict)
        }
        Command::Bounds { n } => {
            let range = parse_range(&n)?;
            Ok(checks::bound_rows(range).map_err(|e| e.to_string())?)
        }
        Command::Search(a) => {
            let regime = match (a.cycles, a.no_cycles) {
                (true, _) => CycleRegime::Require,
                (_, true) => CycleRegime::Forbid,
                _ => CycleRegime::Any,
            };
            let relaxation = if a.predicates_only { Relaxation::Predicates } else { Relaxation::WithLength };
            let r = max_family_in(a.p, a.n, regime, relaxation, a.budget.budget()?).map_err(|e| e.to_string())?;
            eprintln!("elapsed: {:.3}s", r.elapsed.as_secs_f64());
            let status = match r.status {
                SearchStatus::Complete => Status::Pass,
                SearchStatus::BudgetExhausted => Status::BudgetExhausted,
            };
            let bound = maxindex::config::bound_tp(a.p, a.n).ok();
            let expected = if status == Status::Pass { json!({"bound_tp": bound}) } else { json!("lower bound only") };
            Ok(vec![Record::new(
                format!("max family p={} n={} {:?} {:?}", a.p, a.n, regime, relaxation).to_lowercase(),
                "",
                expected,
                json!({
                    "max_size": r.max_size,
                    "status": r.status,
                    "nodes": r.nodes_explored,
                    "witness": r.witness.sets.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                }),
                status,
            )])
        }
        Command::Classify { n, singletons } => {
            let c = classify(n, singletons).map_err(|e| e.to_string())?;
            let mut out = vec![
                Record::info("admissible classes", c.admissible_classes),
                Record::info("max sets", c.max_total),
                Record::info("max profiles (t1,t2)", &c.max_profiles),
            ];
            for g in &c.maximal {
                let shape = if g.is_c5 {
                    "C5"
                } else if g.in_k33 {
                    "in K3,3"
                } else {
                    "other"
                };
                out.push(Record::info(
                    format!("maximal {shape}"),
                    json!({"edges": g.edges.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
                           "marked": g.marked.iter().map(|a| a + 1).collect::<Vec<_>>()}),
                ));
            }
            Ok(out)
        }
        Command::Verify(a) => {
            let budget = a.budget.budget()?;
            let mut files = catalog_files(&data_dir)?;
            files.extend(a.catalog_file.iter().cloned());
            let entries = load_all(&files)?;
            let mut out = checks::table_records();
            out.extend(checks::sigma_records());
            out.extend(checks::gap_records());
            out.extend(checks::catalog_records(&entries));
            out.extend(checks::theorem_records(&entries));
            out.extend(checks::search_records(budget));
            out.extend(checks::graph_records());
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        OutputFormat::Table => Format::Table,
        OutputFormat::Json => Format::Json,
    };
    if let Some(w) = cli.workers {
        if w == 0 || rayon::ThreadPoolBuilder::new().num_threads(w).build_global().is_err() {
            eprintln!("error: invalid worker count {w}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(cli) {
        Ok(records) => {
            print!("{}", render(&records, format));
            ExitCode::from(exit_code(&records) as u8)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
