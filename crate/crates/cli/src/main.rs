use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use nfts_core::bench::{self, BenchRecord, Family, GenSpec, Pipeline, ScalingOptions};
use nfts_core::io::{self, Kind, LoadedModel, ModelDocument, RelationDocument, RelationInput};
use nfts_core::oracle::{
    gfp_crisp_sim_flg, gfp_fuzzy_sim_flg, is_crisp_bisim_nfts, is_crisp_sim_nflts, is_fuzzy_bisim_nfts,
    is_fuzzy_sim_nflts, WitnessReport,
};
use nfts_core::{
    bisimulation_between_nflts, crisp_partition_system, fuzzy_partition_system, greatest_crisp_simulation_flg,
    greatest_fuzzy_simulation_flg, nflts_to_flg, BetweenRelation, CrispEngineConfig, CrispRelation, FuzzyEngineConfig,
    FuzzyRelation, Mode, Nflts, Strategy,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "nfts", version, about = "Bisimulations and simulations of fuzzy transition systems")]
struct Cli {
    /// Engine behind every computation: `efficient` or `oracle`.
    #[arg(long, global = true, default_value = "efficient")]
    engine: Strategy,
    /// Log intermediate partitions and relations to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    /// Print a JSON object instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition of the states by the greatest crisp bisimulation.
    CrispPartition { model: PathBuf },
    /// Compact fuzzy partition of the states by the greatest fuzzy bisimulation.
    FuzzyPartition { model: PathBuf },
    /// Degree to which two states are fuzzy bisimilar.
    Degree { model: PathBuf, x: String, y: String },
    /// Greatest crisp simulation between the states of two systems.
    CrispSim { a: PathBuf, b: PathBuf },
    /// Greatest fuzzy simulation between the states of two systems.
    FuzzySim { a: PathBuf, b: PathBuf },
    /// Greatest bisimulation between the states of two systems.
    BisimBetween {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        mode: Mode,
    },
    /// Checks a relation document against a definition.
    Check {
        model: PathBuf,
        relation: PathBuf,
        #[arg(long, value_enum)]
        kind: CheckKind,
        /// Second system, for the simulation kinds.
        #[arg(long, required_if_eq_any([("kind", "crisp-sim"), ("kind", "fuzzy-sim")]))]
        against: Option<PathBuf>,
    },
    /// Generates a random model.
    Gen(GenArgs),
    /// Times the pipelines on a generated family and writes CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    CrispBisim,
    FuzzyBisim,
    CrispSim,
    FuzzySim,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 1)]
    dists_min: usize,
    #[arg(long, default_value_t = 2)]
    dists_max: usize,
    #[arg(long, default_value_t = 2)]
    support_min: usize,
    #[arg(long, default_value_t = 3)]
    support_max: usize,
    /// `l`: the number of distinct degrees plus 2.
    #[arg(long, default_value_t = 6)]
    values: usize,
    #[arg(long, default_value_t = 0)]
    labels: usize,
    #[arg(long, default_value_t = 0.0)]
    label_density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Default,
    Layered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PipelineName {
    Crisp,
    Fuzzy,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// State counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,250,630,1600,4000,10000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "crisp,fuzzy")]
    pipelines: Vec<PipelineName>,
    /// The oracle also runs on instances with at most this many states.
    #[arg(long, default_value_t = 30)]
    oracle_max_states: usize,
    #[arg(long, value_enum, default_value = "default")]
    family: FamilyName,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// What a command produced: the plain text, the JSON result and whether the
/// answer was affirmative.
struct Outcome {
    text: String,
    result: Value,
    ok: bool,
}

impl Outcome {
    fn new(text: String, result: Value) -> Self {
        Outcome { text, result, ok: true }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CrispPartition { .. } => "crisp-partition",
            Command::FuzzyPartition { .. } => "fuzzy-partition",
            Command::Degree { .. } => "degree",
            Command::CrispSim { .. } => "crisp-sim",
            Command::FuzzySim { .. } => "fuzzy-sim",
            Command::BisimBetween { .. } => "bisim-between",
            Command::Check { .. } => "check",
            Command::Gen(_) => "gen",
            Command::Bench(_) => "bench",
        }
    }

    fn inputs(&self) -> Vec<String> {
        let show = |p: &PathBuf| p.display().to_string();
        match self {
            Command::CrispPartition { model } | Command::FuzzyPartition { model } | Command::Degree { model, .. } => {
                vec![show(model)]
            }
            Command::CrispSim { a, b } | Command::FuzzySim { a, b } | Command::BisimBetween { a, b, .. } => {
                vec![show(a), show(b)]
            }
            Command::Check { model, relation, against, .. } => {
                let mut v = vec![show(model), show(relation)];
                v.extend(against.iter().map(show));
                v
            }
            Command::Gen(_) | Command::Bench(_) => Vec::new(),
        }
    }
}

fn load(path: &Path) -> Result<Nflts> {
    Ok(io::load_model(path)?.model)
}

fn crisp_lines(r: &CrispRelation, rows: &[String], cols: &[String]) -> String {
    r.pairs().map(|(x, y)| format!("{} {}\n", rows[x], cols[y])).collect()
}

fn fuzzy_lines(r: &FuzzyRelation, rows: &[String], cols: &[String]) -> String {
    r.entries().map(|(x, y, d)| format!("{} {} {d}\n", rows[x], cols[y])).collect()
}

fn crisp_outcome(r: &CrispRelation, rows: &[String], cols: &[String]) -> Result<Outcome> {
    let doc = RelationDocument::from_crisp(r, rows, cols);
    Ok(Outcome::new(crisp_lines(r, rows, cols), serde_json::to_value(doc)?))
}

fn fuzzy_outcome(r: &FuzzyRelation, rows: &[String], cols: &[String]) -> Result<Outcome> {
    let doc = RelationDocument::from_fuzzy(r, rows, cols);
    Ok(Outcome::new(fuzzy_lines(r, rows, cols), serde_json::to_value(doc)?))
}

/// Both systems as graphs over the same alphabets, plus the state index
/// ranges that restrict graph relations to states.
fn simulation_graphs(a: &Nflts, b: &Nflts) -> Result<(nfts_core::Flg, nfts_core::Flg, Vec<usize>, Vec<usize>)> {
    let b = b.realign(a.nfts().actions(), a.labels())?;
    let rows = (0..a.nfts().state_count()).collect();
    let cols = (0..b.nfts().state_count()).collect();
    Ok((nflts_to_flg(a), nflts_to_flg(&b), rows, cols))
}

fn report_outcome(report: WitnessReport) -> Outcome {
    let result = match &report.violation {
        None => json!({ "holds": true }),
        Some(v) => json!({ "holds": false, "clause": v.clause, "witness": v.witness }),
    };
    Outcome { text: format!("{report}\n"), result, ok: report.holds() }
}

fn run(command: &Command, engine: Strategy, verbose: bool) -> Result<Outcome> {
    let crisp_cfg = CrispEngineConfig { strategy: engine, verbose };
    let fuzzy_cfg = FuzzyEngineConfig { strategy: engine, verbose };
    match command {
        Command::CrispPartition { model } => {
            let m = load(model)?;
            let p = crisp_partition_system(&m, &crisp_cfg);
            let names = m.nfts().states();
            let text = p.to_text(names);
            let result = json!({ "text": text, "blocks": p.to_named_blocks(names) });
            Ok(Outcome::new(format!("{text}\n"), result))
        }
        Command::FuzzyPartition { model } => {
            let m = load(model)?;
            let b = fuzzy_partition_system(&m, &fuzzy_cfg);
            let names = m.nfts().states();
            let text = b.to_text(names);
            let result = json!({ "text": text, "tree": b.to_json(names) });
            Ok(Outcome::new(format!("{text}\n"), result))
        }
        Command::Degree { model, x, y } => {
            let m = load(model)?;
            let (sx, sy) = (m.nfts().state(x)?, m.nfts().state(y)?);
            let b = fuzzy_partition_system(&m, &fuzzy_cfg);
            let d = b.lca_index().degree(sx.index(), sy.index())?;
            Ok(Outcome::new(format!("{d}\n"), json!(d.to_string())))
        }
        Command::CrispSim { a, b } => {
            let (ma, mb) = (load(a)?, load(b)?);
            let (g, h, rows, cols) = simulation_graphs(&ma, &mb)?;
            let z = match engine {
                Strategy::Efficient => greatest_crisp_simulation_flg(&g, &h)?,
                Strategy::Baseline => gfp_crisp_sim_flg(&g, &h)?,
            };
            let r = z.restrict(&rows, &cols);
            if verbose {
                info!("graph simulation has {} pairs, {} between states", z.len(), r.len());
            }
            crisp_outcome(&r, ma.nfts().states(), mb.nfts().states())
        }
        Command::FuzzySim { a, b } => {
            let (ma, mb) = (load(a)?, load(b)?);
            let (g, h, rows, cols) = simulation_graphs(&ma, &mb)?;
            let z = match engine {
                Strategy::Efficient => greatest_fuzzy_simulation_flg(&g, &h)?,
                Strategy::Baseline => gfp_fuzzy_sim_flg(&g, &h)?,
            };
            if verbose {
                info!("graph simulation:\n{}", fuzzy_lines(&z, g.vertex_names(), h.vertex_names()));
            }
            fuzzy_outcome(&z.restrict(&rows, &cols), ma.nfts().states(), mb.nfts().states())
        }
        Command::BisimBetween { a, b, mode } => {
            let (ma, mb) = (load(a)?, load(b)?);
            let (rows, cols) = (ma.nfts().states(), mb.nfts().states());
            match bisimulation_between_nflts(&ma, &mb, *mode, engine)? {
                BetweenRelation::Crisp(r) => crisp_outcome(&r, rows, cols),
                BetweenRelation::Fuzzy(r) => fuzzy_outcome(&r, rows, cols),
            }
        }
        Command::Check { model, relation, kind, against } => {
            let m = load(model)?;
            let text = std::fs::read_to_string(relation).with_context(|| relation.display().to_string())?;
            let doc = io::parse_relation(&text).with_context(|| relation.display().to_string())?;
            let other = match against {
                Some(path) => Some(load(path)?),
                None => None,
            };
            let cols = other.as_ref().unwrap_or(&m).nfts().states();
            let input = doc.resolve(m.nfts().states(), cols).with_context(|| relation.display().to_string())?;
            let crisp = |input: RelationInput| match input {
                RelationInput::Crisp(r) => Ok(r),
                RelationInput::Fuzzy(_) => Err(anyhow!("crisp checks take a crisp relation document")),
            };
            let fuzzy = |input: RelationInput| match input {
                RelationInput::Crisp(r) => r.to_fuzzy(),
                RelationInput::Fuzzy(r) => r,
            };
            let second = || other.as_ref().ok_or_else(|| anyhow!("--against is required for simulation checks"));
            let report = match kind {
                CheckKind::CrispBisim => is_crisp_bisim_nfts(&crisp(input)?, &m),
                CheckKind::FuzzyBisim => is_fuzzy_bisim_nfts(&fuzzy(input), &m),
                CheckKind::CrispSim => is_crisp_sim_nflts(&crisp(input)?, &m, second()?)?,
                CheckKind::FuzzySim => is_fuzzy_sim_nflts(&fuzzy(input), &m, second()?)?,
            };
            Ok(report_outcome(report))
        }
        Command::Gen(args) => {
            let spec = GenSpec {
                states: args.states,
                actions: args.actions,
                dists_per_pair: (args.dists_min, args.dists_max),
                support: (args.support_min, args.support_max),
                values: args.values,
                labels: args.labels,
                label_density: args.label_density,
                seed: args.seed,
            };
            let model = bench::generate(&spec)?;
            let kind = if args.labels > 0 { Kind::Nflts } else { Kind::Nfts };
            let loaded = LoadedModel { kind, model };
            let text = match args.format {
                Format::Json => format!("{}\n", io::model_to_json(&loaded)),
                Format::Text => io::model_to_text(&loaded),
            };
            Ok(Outcome::new(text, serde_json::to_value(ModelDocument::from_model(&loaded))?))
        }
        Command::Bench(args) => run_bench(args),
    }
}

fn run_bench(args: &BenchArgs) -> Result<Outcome> {
    if args.sizes.is_empty() || args.repetitions == 0 {
        bail!("bench needs at least one size and one repetition");
    }
    let family = match args.family {
        FamilyName::Default => Family::default(),
        FamilyName::Layered => Family::layered(),
    };
    let pipelines: Vec<Pipeline> = args
        .pipelines
        .iter()
        .map(|p| match p {
            PipelineName::Crisp => Pipeline::Crisp,
            PipelineName::Fuzzy => Pipeline::Fuzzy,
        })
        .collect();
    let opts = ScalingOptions {
        sizes: args.sizes.clone(),
        repetitions: args.repetitions,
        pipelines: pipelines.clone(),
        oracle_max_states: args.oracle_max_states,
        base_seed: args.seed,
    };
    let records = bench::scaling_run(&family, &opts)?;
    let slopes = slopes(&records, &pipelines);
    let mut summary = String::new();
    for (engine, slope) in &slopes {
        match slope {
            Some(s) => summary.push_str(&format!("{engine}: log-log slope {s:.3}\n")),
            None => summary.push_str(&format!("{engine}: too few sizes for a slope\n")),
        }
    }
    let result = json!({
        "records": records,
        "slopes": slopes.iter().map(|(e, s)| (e.clone(), json!(s))).collect::<serde_json::Map<_, _>>(),
    });
    let text = match &args.csv {
        Some(path) => {
            let file = File::create(path).with_context(|| path.display().to_string())?;
            bench::write_csv(&records, file)?;
            summary
        }
        None => {
            let mut buf = Vec::new();
            bench::write_csv(&records, &mut buf)?;
            eprint!("{summary}");
            String::from_utf8(buf)?
        }
    };
    Ok(Outcome::new(text, result))
}

fn slopes(records: &[BenchRecord], pipelines: &[Pipeline]) -> Vec<(String, Option<f64>)> {
    let mut out = Vec::new();
    for &p in pipelines {
        for strategy in [Strategy::Efficient, Strategy::Baseline] {
            let engine = p.name(strategy);
            if records.iter().any(|r| r.engine == engine) {
                let slope = bench::engine_slope(records, &engine);
                out.push((engine, slope));
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let start = Instant::now();
    let outcome = match run(&cli.command, cli.engine, cli.verbose) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut stdout = std::io::stdout().lock();
    let written = if cli.json {
        let doc = json!({
            "command": cli.command.name(),
            "input": cli.command.inputs(),
            "result": outcome.result,
            "engine": cli.engine.to_string(),
            "wall_time_ms": wall_time_ms,
        });
        writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("values serialize"))
    } else {
        stdout.write_all(outcome.text.as_bytes())
    };
    if let Err(e) = written {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
