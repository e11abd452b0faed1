use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use parity_trees::bounds::{f_upper_closed, g_lower_closed, BoundTable};
use parity_trees::game::{generate_random_game, ParityGame, Region};
use parity_trees::measure::{value_iteration, LiftStats, MeasureValue, Policy};
use parity_trees::oracle::BruteForce;
use parity_trees::pgsolver::{parse_pgsolver, write_pgsolver};
use parity_trees::tree::{
    find_minimal_universal, is_universal, make_naive_tree, make_succinct_tree, OrderedTree,
    DEFAULT_ENUMERATION_LIMIT,
};
use parity_trees::zielonka::{solve_with_signature, solve_zielonka};

#[derive(Parser, Debug)]
#[command(name = "ptree", version, about = "Parity games, universal trees and progress measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a game in PGSolver format
    Solve(SolveArgs),
    /// Generate a random game in PGSolver format
    Gen(GenArgs),
    /// Build, check or search for universal trees
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Tables of the universal tree size bounds
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Lift counts and timings of value iteration over naive and succinct trees
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Zielonka,
    Brute,
    Vi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum TreeChoice {
    Naive,
    Succinct,
    File(PathBuf),
}

impl FromStr for TreeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(TreeChoice::Naive),
            "succinct" => Ok(TreeChoice::Succinct),
            _ => s
                .strip_prefix("file:")
                .map(|p| TreeChoice::File(PathBuf::from(p)))
                .ok_or_else(|| format!("unknown tree `{s}` (expected naive, succinct or file:PATH)")),
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Input file; standard input when absent or `-`
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(short, long, value_enum, default_value = "zielonka")]
    algorithm: Algorithm,
    /// Tree for value iteration: naive, succinct or file:PATH
    #[arg(long, default_value = "succinct")]
    tree: TreeChoice,
    /// fifo, roundrobin or random:SEED
    #[arg(long, default_value = "fifo")]
    policy: Policy,
    /// Per-vertex lift counts and final values
    #[arg(long)]
    stats: bool,
    /// Print the signature extracted from Zielonka's algorithm
    #[arg(long)]
    emit_signature: bool,
    /// Run every solver and fail with exit code 2 if they disagree
    #[arg(long)]
    cross_check: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    min_degree: usize,
    #[arg(long, default_value_t = 2)]
    max_degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Naive,
    Succinct,
}

#[derive(Subcommand, Debug)]
enum TreeCommand {
    /// Build a naive or succinct universal tree
    Build {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        /// Print every leaf code
        #[arg(long)]
        dump: bool,
    },
    /// Check a dumped tree for (n, h)-universality
    Check {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        file: PathBuf,
        #[arg(long, env = "PTREE_ENUM_LIMIT", default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: u128,
    },
    /// Smallest (n, h)-universal tree by exhaustive search
    Minimal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        dump: bool,
        #[arg(long, env = "PTREE_ENUM_LIMIT", default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: u128,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Tsv,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// f and g with their closed-form bounds
    Table {
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        #[arg(long, default_value_t = 4)]
        h_max: u32,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 10)]
    games: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    max_degree: usize,
    #[arg(long, default_value = "fifo")]
    policy: Policy,
}

/// What one solver run produced.
struct RunReport {
    input: String,
    algorithm: String,
    tree: Option<(String, usize)>,
    region: Region,
    stats: Option<LiftStats>,
    /// Final measure, one rendered value per vertex.
    values: Option<Vec<String>>,
    elapsed: Duration,
}

fn read_input(path: &Option<PathBuf>) -> Result<(String, String)> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok((p.display().to_string(), text))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).context("cannot read standard input")?;
            Ok(("<stdin>".to_string(), text))
        }
    }
}

fn load_game(path: &Option<PathBuf>) -> Result<(String, ParityGame)> {
    let (name, text) = read_input(path)?;
    let game = parse_pgsolver(&text).with_context(|| format!("{name}: parse error"))?;
    Ok((name, game))
}

fn build_tree(choice: &TreeChoice, game: &ParityGame) -> Result<(String, OrderedTree)> {
    let (n, h) = (game.num_vertices(), game.d() / 2);
    match choice {
        TreeChoice::Naive => Ok(("naive".into(), make_naive_tree(n, h)?)),
        TreeChoice::Succinct => Ok(("succinct".into(), make_succinct_tree(n, h)?)),
        TreeChoice::File(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let tree = OrderedTree::parse_dump(&text).with_context(|| format!("{}: bad tree", path.display()))?;
            if tree.height() != h {
                bail!("{}: tree has height {}, the game needs {h}", path.display(), tree.height());
            }
            warn!(
                "tree from {} is not known to be ({n}, {h})-universal; regions may be wrong",
                path.display()
            );
            Ok((format!("file:{}", path.display()), tree))
        }
    }
}

fn run_vi(input: &str, game: &ParityGame, name: String, tree: &OrderedTree, policy: Policy) -> Result<RunReport> {
    let result = value_iteration(game, tree, policy)?;
    let values = result
        .measure
        .values()
        .iter()
        .map(|value| match value {
            MeasureValue::Top => "TOP".to_string(),
            MeasureValue::Leaf(l) => tree.leaf_code(*l).to_string(),
        })
        .collect();
    Ok(RunReport {
        input: input.to_string(),
        algorithm: "vi".into(),
        tree: Some((name, tree.leaf_count())),
        region: result.region,
        elapsed: result.stats.elapsed,
        values: Some(values),
        stats: Some(result.stats),
    })
}

fn run(input: &str, game: &ParityGame, algorithm: Algorithm, args: &SolveArgs) -> Result<RunReport> {
    let clock = Instant::now();
    let region = match algorithm {
        Algorithm::Vi => {
            let (name, tree) = build_tree(&args.tree, game)?;
            return run_vi(input, game, name, &tree, args.policy);
        }
        Algorithm::Zielonka => solve_zielonka(game),
        Algorithm::Brute => BruteForce::default().solve(game)?.region,
    };
    Ok(RunReport {
        input: input.to_string(),
        algorithm: format!("{algorithm:?}").to_lowercase(),
        tree: None,
        region,
        stats: None,
        values: None,
        elapsed: clock.elapsed(),
    })
}

fn set_text(region: &Region, eve: bool) -> String {
    let set = if eve { &region.eve_wins } else { &region.adam_wins };
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn print_report(report: &RunReport, format: Format, with_stats: bool) {
    match format {
        Format::Text => {
            println!("input: {}", report.input);
            match &report.tree {
                Some((name, leaves)) => println!("algorithm: {} (tree {name}, {leaves} leaves)", report.algorithm),
                None => println!("algorithm: {}", report.algorithm),
            }
            println!("eve wins: {}", set_text(&report.region, true));
            println!("adam wins: {}", set_text(&report.region, false));
            if let Some(stats) = &report.stats {
                println!("lifts: {}", stats.total);
            }
            println!("time: {:.3} ms", report.elapsed.as_secs_f64() * 1e3);
        }
        Format::Tsv => {
            println!("vertex\twinner");
            for v in 0..report.region.eve_wins.universe() {
                println!("{v}\t{}", report.region.winner(v));
            }
        }
    }
    if with_stats {
        if let (Some(stats), Some(values)) = (&report.stats, &report.values) {
            println!("vertex\tlifts\tvalue");
            for (v, (lifts, value)) in stats.per_vertex.iter().zip(values).enumerate() {
                println!("{v}\t{lifts}\t{value}");
            }
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let (input, game) = load_game(&args.input)?;
    info!("{input}: {} vertices, {} edges, d = {}", game.num_vertices(), game.num_edges(), game.d());

    let primary = run(&input, &game, args.algorithm, args)?;
    print_report(&primary, args.format, args.stats);

    if args.emit_signature {
        let (_, sig) = solve_with_signature(&game);
        println!("vertex\tsignature");
        for (v, t) in sig.iter().enumerate() {
            match t {
                Some(t) => {
                    let parts: Vec<String> = t.values().iter().map(|c| c.to_string()).collect();
                    println!("{v}\t({})", parts.join(","));
                }
                None => println!("{v}\tTOP"),
            }
        }
    }

    if !args.cross_check {
        return Ok(ExitCode::SUCCESS);
    }
    let mut reports = vec![primary];
    if args.algorithm != Algorithm::Zielonka {
        reports.push(run(&input, &game, Algorithm::Zielonka, args)?);
    }
    for choice in [TreeChoice::Naive, TreeChoice::Succinct] {
        if args.algorithm == Algorithm::Vi && args.tree == choice {
            continue;
        }
        match build_tree(&choice, &game) {
            Ok((name, tree)) => reports.push(run_vi(&input, &game, name, &tree, args.policy)?),
            Err(e) => warn!("skipping vi over {choice:?}: {e:#}"),
        }
    }
    if args.algorithm != Algorithm::Brute && BruteForce::default().check_size(&game).is_ok() {
        reports.push(run(&input, &game, Algorithm::Brute, args)?);
    }

    let reference = reports[0].region.clone();
    let agree = reports.iter().all(|r| r.region == reference);
    println!("solver\ttree\tleaves\teve_wins\tagrees");
    for r in &reports {
        let (tree, leaves) = r.tree.clone().map_or(("-".to_string(), "-".to_string()), |(t, l)| (t, l.to_string()));
        println!(
            "{}\t{tree}\t{leaves}\t{}\t{}",
            r.algorithm,
            set_text(&r.region, true),
            r.region == reference
        );
    }
    if agree {
        println!("cross-check: all {} solvers agree", reports.len());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("cross-check: solvers disagree on {input}; offending game:");
        eprintln!("{}", write_pgsolver(&game)?);
        Ok(ExitCode::from(2))
    }
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let game = generate_random_game(args.n, args.d, (args.min_degree, args.max_degree), args.seed)?;
    let text = write_pgsolver(&game)?;
    match &args.output {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tree(command: &TreeCommand) -> Result<ExitCode> {
    match command {
        TreeCommand::Build { kind, n, h, dump } => {
            let tree = match kind {
                Kind::Naive => make_naive_tree(*n, *h)?,
                Kind::Succinct => make_succinct_tree(*n, *h)?,
            };
            if *dump {
                println!("{}", tree.dump());
            } else {
                println!("kind\tn\th\tleaves\tnodes");
                println!("{kind:?}\t{n}\t{h}\t{}\t{}", tree.leaf_count(), tree.node_count());
            }
        }
        TreeCommand::Check { n, h, file, limit } => {
            let text = fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
            let tree = OrderedTree::parse_dump(&text).with_context(|| format!("{}: bad tree", file.display()))?;
            let verdict = is_universal(&tree, *n, *h, *limit)?;
            if verdict.universal {
                println!("universal: {} leaves, every ({n}, {h}) tree embeds", tree.leaf_count());
            } else {
                println!("not universal: this {n}-leaf tree does not embed");
                println!("{}", verdict.witness.expect("failure has a witness").dump());
            }
        }
        TreeCommand::Minimal { n, h, dump, limit } => {
            let (size, witness) = find_minimal_universal(*n, *h, *limit)?;
            println!("{size}");
            if *dump {
                println!("{}", witness.dump());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(command: &BoundsCommand) -> Result<ExitCode> {
    let BoundsCommand::Table { n_max, h_max, format } = command;
    if *n_max == 0 || *h_max == 0 {
        bail!("--n-max and --h-max must be at least 1");
    }
    let mut table = BoundTable::new();
    let header = ["n", "h", "g_lower", "g", "f", "f_upper"];
    let mut out = String::new();
    match format {
        TableFormat::Tsv => writeln!(out, "{}", header.join("\t"))?,
        TableFormat::Markdown => {
            writeln!(out, "| {} |", header.join(" | "))?;
            writeln!(out, "|{}", "---:|".repeat(header.len()))?;
        }
    }
    for n in 1..=*n_max {
        for h in 1..=*h_max {
            let row = [
                n.to_string(),
                h.to_string(),
                g_lower_closed(n, h).to_string(),
                table.g(n, h).to_string(),
                table.f(n, h).to_string(),
                f_upper_closed(n, h).to_string(),
            ];
            match format {
                TableFormat::Tsv => writeln!(out, "{}", row.join("\t"))?,
                TableFormat::Markdown => writeln!(out, "| {} |", row.join(" | "))?,
            }
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let (n, h) = (args.n, args.d / 2);
    let trees = [("naive", make_naive_tree(n, h)?), ("succinct", make_succinct_tree(n, h)?)];
    let mut totals = [0u64; 2];
    println!("seed\ttree\tleaves\tlifts\tmicros");
    for seed in args.first_seed..args.first_seed + args.games {
        let game = generate_random_game(n, args.d, (1, args.max_degree.min(n)), seed)?;
        for (i, (name, tree)) in trees.iter().enumerate() {
            let r = value_iteration(&game, tree, args.policy)?;
            totals[i] += r.stats.total;
            println!(
                "{seed}\t{name}\t{}\t{}\t{}",
                tree.leaf_count(),
                r.stats.total,
                r.stats.elapsed.as_micros()
            );
        }
    }
    for (i, (name, tree)) in trees.iter().enumerate() {
        println!("total\t{name}\t{}\t{}\t-", tree.leaf_count(), totals[i]);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Tree(command) => cmd_tree(command),
        Command::Bounds(command) => cmd_bounds(command),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
