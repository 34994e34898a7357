use std::fmt::Display;
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use num_traits::Zero;

use regflip::config::PointConfiguration;
use regflip::flip::find_flips;
use regflip::input::parse_input;
use regflip::regularity::{is_regular, regularity_rows, Regularity, ScreeningStats};
use regflip::search::{
    self, baseline_dfs, classified_flips, reverse_search, SearchError, SearchMode, SearchStats,
};
use regflip::symmetry::{expand_group, OrbitCounter, SymmetryError, SymmetryGroup, DEFAULT_ORDER_CAP};
use regflip::triangulation::{Triangulation, Validator};

#[derive(Parser)]
#[command(name = "regflip", version, about = "Enumerate regular triangulations of a point configuration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate triangulations by reverse search.
    Enumerate(EnumerateArgs),
    /// Decide whether a triangulation is regular.
    Regular(TriangulationArgs),
    /// List the flips of a triangulation.
    Flips(TriangulationArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Point configuration file.
    #[arg(long)]
    input: PathBuf,
    /// Restrict to regular triangulations (default).
    #[arg(long, conflicts_with = "all")]
    regular: bool,
    /// Follow all flips.
    #[arg(long)]
    all: bool,
    /// Print every triangulation with its GKZ-vector.
    #[arg(long)]
    print: bool,
    /// Print search statistics.
    #[arg(long)]
    stats: bool,
    /// Capacity of the flip cache; 0 disables it.
    #[arg(long, default_value_t = search::DEFAULT_FLIP_CACHE)]
    flip_cache: usize,
    /// Count orbits under the symmetry group of the input.
    #[arg(long)]
    orbits: bool,
    /// Use a depth-first search with a visited set instead of reverse search.
    #[arg(long)]
    baseline: bool,
    /// Node budget of the baseline search.
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: usize,
    /// Stop reverse search after this many triangulations.
    #[arg(long, conflicts_with = "baseline")]
    limit: Option<u64>,
}

#[derive(Args)]
struct TriangulationArgs {
    /// Point configuration file.
    #[arg(long)]
    input: PathBuf,
    /// Triangulation file, e.g. `{{0,1,2},{0,2,3}}`.
    #[arg(long)]
    triangulation: PathBuf,
}

enum Failure {
    Usage(String),
    Parse(String),
    Semantic(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Semantic(_) => 3,
            Failure::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Semantic(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Resource(format!("output: {e}"))
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Budget(_) => Failure::Resource(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

impl From<SymmetryError> for Failure {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::OrderCap(_) | SymmetryError::OrbitBudget(_) => {
                Failure::Resource(e.to_string())
            }
            _ => Failure::Semantic(format!("symmetry: {e}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let out = io::stdout().lock();
    let mut out = BufWriter::new(out);
    let result = match &cli.command {
        Command::Enumerate(args) => enumerate(args, &mut out),
        Command::Regular(args) => regular(args, &mut out),
        Command::Flips(args) => flips(args, &mut out),
    };
    let flushed = out.flush();
    match result.and(flushed.map_err(Failure::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("regflip: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(PointConfiguration, Option<SymmetryGroup>), Failure> {
    let doc = parse_input(&read(path)?)
        .map_err(|e| Failure::Parse(format!("{}:{e}", path.display())))?;
    let config = PointConfiguration::new(doc.points.clone())
        .map_err(|e| Failure::Semantic(format!("{}: {e}", path.display())))?;
    let group = match doc.symmetry {
        Some(_) => Some(expand_group(&config, &doc.generators()?, DEFAULT_ORDER_CAP)?),
        None => None,
    };
    Ok((config, group))
}

fn load_triangulation(config: &PointConfiguration, path: &Path) -> Result<Triangulation, Failure> {
    let t: Triangulation = read(path)?
        .trim()
        .parse()
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    Validator::new(config)
        .validate(&t)
        .map_err(|v| Failure::Semantic(format!("{}: invalid triangulation: {v}", path.display())))?;
    Ok(t)
}

fn enumerate(args: &EnumerateArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (config, group) = load(&args.input)?;
    let mode = if args.all {
        SearchMode::AllFlips
    } else {
        SearchMode::RegularOnly
    };
    let mut oracle = search::geometric_oracle(&config, mode, args.flip_cache);
    let (seed, seed_gkz) = search::seed(&config);
    let mut orbits = match (&group, args.orbits) {
        (Some(g), true) => Some(OrbitCounter::new(g)),
        (None, true) => {
            eprintln!("regflip: no symmetry in the input; orbits not counted");
            None
        }
        _ => None,
    };

    let mut count = 0u64;
    let mut failure = None;
    let mut stopped = false;
    let stats = if args.baseline {
        let mut found = baseline_dfs(&mut oracle, seed, seed_gkz, args.max_nodes)?;
        found.sort();
        for (t, g) in &found {
            count += 1;
            if args.print {
                writeln!(out, "{t} {g}")?;
            }
            if let Some(o) = orbits.as_mut() {
                o.insert(t)?;
            }
        }
        SearchStats {
            nodes: count,
            ..oracle.stats()
        }
    } else {
        reverse_search(&mut oracle, seed, seed_gkz, |t, g, _| {
            count += 1;
            let step = (|| -> Result<(), Failure> {
                if args.print {
                    writeln!(out, "{t} {g}")?;
                }
                if let Some(o) = orbits.as_mut() {
                    o.insert(t)?;
                }
                Ok(())
            })();
            match step {
                Ok(()) if args.limit.is_some_and(|l| count >= l) => {
                    stopped = true;
                    ControlFlow::Break(())
                }
                Ok(()) => ControlFlow::Continue(()),
                Err(f) => {
                    failure = Some(f);
                    ControlFlow::Break(())
                }
            }
        })?
    };
    if let Some(f) = failure {
        return Err(f);
    }

    writeln!(out, "triangulations: {count}")?;
    if stopped {
        writeln!(out, "stopped: limit")?;
    }
    if let Some(o) = &orbits {
        writeln!(out, "orbits: {}", o.count())?;
    }
    if args.stats {
        write_stats(out, &stats)?;
    }
    Ok(())
}

fn write_stats(out: &mut impl Write, s: &SearchStats) -> io::Result<()> {
    let ScreeningStats {
        isolated,
        opposite_pair,
        one_against_many,
        one_sided,
        parallel,
        targeted,
        sign_verdicts,
        scalar_tests,
        lps_solved,
    } = s.screening;
    let rows: [(&str, u64); 14] = [
        ("nodes", s.nodes),
        ("flips_evaluated", s.flips_evaluated),
        ("reductions_isolated", isolated),
        ("reductions_opposite_pair", opposite_pair),
        ("reductions_one_against_many", one_against_many),
        ("reductions_one_sided", one_sided),
        ("reductions_targeted", targeted),
        ("parallel_tests", parallel),
        ("sign_verdicts", sign_verdicts),
        ("scalar_tests", scalar_tests),
        ("lps_solved", lps_solved),
        ("cache_hits", s.cache_hits),
        ("cache_misses", s.cache_misses),
        ("flip_list_requests", s.cache_hits + s.cache_misses),
    ];
    for (name, value) in rows {
        writeln!(out, "{name}: {value}")?;
    }
    Ok(())
}

fn tuple<T: Display>(xs: &[T]) -> String {
    let inner: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", inner.join(","))
}

fn regular(args: &TriangulationArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (config, _) = load(&args.input)?;
    let t = load_triangulation(&config, &args.triangulation)?;
    let rows = regularity_rows(&config, &t);
    let verdict = is_regular(&config, &t);
    if !verdict.verify(&rows) {
        return Err(Failure::Semantic("regularity witness failed verification".into()));
    }
    match verdict {
        Regularity::Regular(w) => {
            writeln!(out, "regular")?;
            writeln!(out, "heights: {}", tuple(&w.heights))?;
        }
        Regularity::NonRegular(c) => {
            writeln!(out, "non-regular")?;
            writeln!(out, "certificate:")?;
            for (row, g) in rows.iter().zip(&c.multipliers) {
                if !g.is_zero() {
                    writeln!(out, "  {g} * {}", tuple(row))?;
                }
            }
        }
    }
    Ok(())
}

fn flips(args: &TriangulationArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (config, _) = load(&args.input)?;
    let t = load_triangulation(&config, &args.triangulation)?;
    if is_regular(&config, &t).is_regular() {
        for (flip, ok) in classified_flips(&config, &t)? {
            let verdict = if ok { "regular" } else { "non-regular" };
            writeln!(out, "{flip} {verdict}")?;
        }
    } else {
        // The flip cone of a non-regular triangulation need not be pointed.
        for flip in find_flips(&config, &t) {
            writeln!(out, "{flip}")?;
        }
    }
    Ok(())
}
