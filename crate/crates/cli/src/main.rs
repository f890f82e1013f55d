use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridhfk::complex::Coefficients;
use gridhfk::homology::{extract_hat, poincare, BigradedRanks};
use gridhfk::invariants::{alexander_polynomial, check_invariance, fibered, genus, seeded_moves};
use gridhfk::pipeline::{minus_homology, tilde_complex, tilde_homology, Options};
use gridhfk::poset::{build_posets, IntervalShape, PosetMode, Thickness};
use gridhfk::signs::{sign_constraints, solve_signs};
use gridhfk::{Axis, ErrorKind, Execution, Grid, GridError, Limits, StabilizationVariant};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "gridhfk", about = "Knot Floer homology from grid diagrams", disable_version_flag = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Coefficient ring
    #[arg(long, value_enum, default_value_t = Ring::F2, global = true)]
    coefficients: Ring,
    /// Which version of the homology to report
    #[arg(long = "version", value_enum, default_value_t = Version::Hat, global = true)]
    version: Version,
    /// Truncation exponent d for the minus version (U_i^d = 0)
    #[arg(long, default_value_t = 2, global = true)]
    truncate: u32,
    /// Machine-readable output on stdout, and errors as JSON on stderr
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest grid number accepted; above 7 it also raises the sign-solver ceiling
    #[arg(long, global = true)]
    max_grid: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Ring {
    F2,
    Z,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Version {
    Tilde,
    Hat,
    Minus,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bigraded homology table
    Homology { grid: String },
    /// Alexander polynomial, as the graded Euler characteristic of HFK-hat
    Alexander { grid: String },
    /// Seifert genus
    Genus { grid: String },
    /// Whether the knot is fibered (needs --coefficients z)
    Fibered { grid: String },
    /// Grid poset laboratory
    #[command(subcommand)]
    Poset(PosetCommand),
    /// Consistency checks
    #[command(subcommand)]
    Check(CheckCommand),
    /// Apply one grid move and print the new grid
    #[command(subcommand)]
    Moves(MoveCommand),
}

#[derive(Subcommand, Debug)]
enum PosetCommand {
    /// Components, interval parity and EL-labelling statistics per Alexander grading
    Stats {
        grid: String,
        /// Most intervals sampled per poset for the parity and EL checks
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Compare HFK-hat along a random sequence of legal moves
    Invariance {
        grid: String,
        #[arg(long, default_value_t = 3)]
        moves: usize,
    },
    /// Solve the sign constraints and check the signed boundary squares to zero
    Signs { grid: String },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AxisArg {
    Row,
    Col,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum VariantArg {
    A,
    B,
    C,
    D,
}

#[derive(Subcommand, Debug)]
enum MoveCommand {
    /// Swap two adjacent rows or columns
    Commute {
        grid: String,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Swaps annulus `index` with `index + 1` (mod n)
        #[arg(long)]
        index: usize,
    },
    /// Replace the X of a row by a 2x2 block
    Stabilize {
        grid: String,
        #[arg(long)]
        row: usize,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Collapse the 2x2 block whose lower-left cell is (col, row)
    Destabilize {
        grid: String,
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
    },
}

/// Everything that can end a run early.
enum Failure {
    Usage(String),
    Engine(GridError),
    Io(String),
    /// A consistency check ran to completion and found a violation.
    Check(String),
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Check(_) => 4,
            Failure::Engine(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Resource => 3,
                ErrorKind::Internal => 4,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Check(_) => "check",
            Failure::Engine(e) => match e.kind() {
                ErrorKind::Validation => "validation",
                ErrorKind::Resource => "resource",
                ErrorKind::Internal => "internal",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Check(m) => m.clone(),
            Failure::Engine(e) => e.to_string(),
        }
    }
}

type Run<T> = Result<T, Failure>;

struct Ctx {
    opts: Options,
    global: Global,
}

impl Ctx {
    fn new(global: Global) -> Self {
        let mut limits = Limits::from_env();
        if let Some(n) = global.max_grid {
            limits.max_grid = n;
            limits.max_sign_grid = limits.max_sign_grid.max(n);
        }
        let coefficients = match global.coefficients {
            Ring::F2 => Coefficients::F2,
            Ring::Z => Coefficients::Z,
        };
        Ctx { opts: Options { coefficients, limits, execution: Execution::Parallel }, global }
    }

    fn load(&self, source: &str) -> Run<Grid> {
        let grid = if source == "-" {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            text.parse::<Grid>()?
        } else if source.contains(';') {
            Grid::parse_inline(source)?
        } else {
            let text = std::fs::read_to_string(source).map_err(|e| Failure::Io(format!("{source}: {e}")))?;
            text.parse::<Grid>()?
        };
        self.opts.limits.check_grid(grid.n())?;
        Ok(grid)
    }

    fn hat(&self, g: &Grid) -> Run<BigradedRanks> {
        Ok(extract_hat(&tilde_homology(g, &self.opts)?, g.n())?)
    }
}

fn version_name(v: Version) -> &'static str {
    match v {
        Version::Tilde => "tilde",
        Version::Hat => "hat",
        Version::Minus => "minus",
    }
}

/// Text and JSON renderings of one result.
struct Output {
    text: String,
    json: Value,
}

fn homology_cmd(ctx: &Ctx, source: &str) -> Run<Output> {
    let g = ctx.load(source)?;
    let version = ctx.global.version;
    let ranks = match version {
        Version::Tilde => tilde_homology(&g, &ctx.opts)?,
        Version::Hat => ctx.hat(&g)?,
        Version::Minus => {
            if ctx.global.truncate == 0 {
                return Err(Failure::Usage("--truncate must be at least 1".into()));
            }
            minus_homology(&g, ctx.global.truncate, &ctx.opts)?
        }
    };
    let mut json = json!({
        "grid": g.to_inline(),
        "version": version_name(version),
        "coefficients": ctx.opts.coefficients,
        "ranks": ranks,
        "total_rank": ranks.total_rank(),
        "poincare": poincare(&ranks).to_string(),
    });
    let mut text = format!("{}{}\n", ranks, poincare(&ranks));
    if version == Version::Minus {
        let exact_above = -2 * (ctx.global.truncate as i64 - 1);
        json["truncate"] = json!(ctx.global.truncate);
        json["exact_above_maslov"] = json!(exact_above);
        text.push_str(&format!("(truncated at U^{}: exact for M > {exact_above})\n", ctx.global.truncate));
    }
    Ok(Output { text, json })
}

fn alexander_cmd(ctx: &Ctx, source: &str) -> Run<Output> {
    let g = ctx.load(source)?;
    let d = alexander_polynomial(&ctx.hat(&g)?)?;
    Ok(Output {
        text: format!("{d}\n"),
        json: json!({ "grid": g.to_inline(), "alexander": d, "display": d.to_string(), "coefficients": ctx.opts.coefficients }),
    })
}

fn genus_cmd(ctx: &Ctx, source: &str) -> Run<Output> {
    let g = ctx.load(source)?;
    let hat = ctx.hat(&g)?;
    let genus = genus(&hat);
    let d = alexander_polynomial(&hat)?;
    debug_assert!(genus as i32 >= d.degree());
    Ok(Output { text: format!("{genus}\n"), json: json!({ "grid": g.to_inline(), "genus": genus }) })
}

fn fibered_cmd(ctx: &Ctx, source: &str) -> Run<Output> {
    let g = ctx.load(source)?;
    if ctx.opts.coefficients != Coefficients::Z {
        return Err(GridError::NeedsIntegers("fiberedness").into());
    }
    let hat = ctx.hat(&g)?;
    let f = fibered(&hat, Coefficients::Z)?;
    Ok(Output {
        text: format!("{f}\n"),
        json: json!({ "grid": g.to_inline(), "fibered": f, "genus": genus(&hat) }),
    })
}

fn poset_stats(ctx: &Ctx, source: &str, samples: usize) -> Run<Output> {
    let g = ctx.load(source)?;
    let mode = match ctx.global.version {
        Version::Minus => PosetMode::Minus { d: ctx.global.truncate },
        Version::Hat | Version::Tilde => PosetMode::Hat,
    };
    let posets = build_posets(&g, mode, ctx.opts.coefficients, &ctx.opts.limits, ctx.opts.execution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed);
    let mut per_a = Vec::new();
    let mut text = String::new();
    let (mut total_components, mut parity_total, mut parity_bad, mut el_total, mut el_bad) = (0, 0, 0, 0, 0);
    for p in &posets {
        let components = p.components(ctx.opts.execution)?;
        total_components += components.len();
        let mut pairs = p.comparable_pairs(5);
        if pairs.len() > samples {
            pairs.shuffle(&mut rng);
            pairs.truncate(samples);
            pairs.sort_unstable();
        }
        let mut odd = 0;
        let mut el_fail = 0;
        for &(y, x) in &pairs {
            if p.interval(y, x, IntervalShape::Open)?.len() % 2 != 0 {
                odd += 1;
            }
            if !p.check_el(y, x, Thickness::Width).passed() {
                el_fail += 1;
            }
        }
        parity_total += pairs.len();
        parity_bad += odd;
        el_total += pairs.len();
        el_bad += el_fail;
        let sizes: Vec<usize> = components.iter().map(|c| c.elements.len()).collect();
        let singletons = sizes.iter().filter(|&&s| s == 1).count();
        text.push_str(&format!(
            "A={:>3}: {} elements, {} covers, {} components ({} singletons)",
            p.alexander,
            p.len(),
            p.covers.len(),
            components.len(),
            singletons
        ));
        for c in components.iter().filter(|c| c.elements.len() > 1) {
            text.push_str(&format!("; {} elements, H = {}", c.elements.len(), poincare(&c.homology)));
        }
        text.push('\n');
        per_a.push(json!({
            "alexander": p.alexander,
            "elements": p.len(),
            "covers": p.covers.len(),
            "components": components.iter().map(|c| json!({ "size": c.elements.len(), "ranks": c.homology })).collect::<Vec<_>>(),
            "parity": { "intervals": pairs.len(), "odd": odd },
            "el": { "intervals": pairs.len(), "failed": el_fail },
        }));
    }
    text.push_str(&format!("{total_components} components in total\n"));
    text.push_str(&format!("parity: {parity_total} open intervals checked, {parity_bad} odd\n"));
    text.push_str(&format!("EL: {el_total} closed intervals of length <= 5 checked, {el_bad} failed\n"));
    let json = json!({
        "grid": g.to_inline(),
        "mode": mode,
        "components": total_components,
        "posets": per_a,
        "parity": { "intervals": parity_total, "odd": parity_bad, "passed": parity_bad == 0 },
        "el": { "intervals": el_total, "failed": el_bad, "passed": el_bad == 0, "thickness": Thickness::Width },
    });
    Ok(Output { text, json })
}

fn check_invariance_cmd(ctx: &Ctx, source: &str, k: usize) -> Run<Output> {
    let g = ctx.load(source)?;
    let max_n = (g.n() + 2).min(ctx.opts.limits.max_grid);
    let moves = seeded_moves(&g, k, max_n, ctx.global.seed);
    let opts = Options { coefficients: ctx.opts.coefficients, ..ctx.opts };
    let report = check_invariance(&g, &moves, &opts)?;
    let summary = report.summary();
    let json = json!({
        "passed": report.passed(),
        "summary": summary,
        "moves": moves,
        "steps": report.steps,
        "first_divergence": report.first_divergence,
    });
    let out = Output { text: format!("{summary}\n"), json };
    if report.passed() {
        Ok(out)
    } else {
        emit(ctx, &out);
        Err(Failure::Check(summary))
    }
}

fn check_signs_cmd(ctx: &Ctx, source: &str) -> Run<Output> {
    let g = ctx.load(source)?;
    let n = g.n();
    let signs = solve_signs(&g, &ctx.opts.limits, ctx.opts.execution)?;
    let constraints = sign_constraints(n, ctx.opts.execution)?;
    if let Err(i) = signs.satisfies(&constraints) {
        return Err(GridError::UnsatisfiableSigns { constraint: i, detail: "solution fails verification".into() }.into());
    }
    let opts = Options { coefficients: Coefficients::Z, ..ctx.opts };
    let (_, b) = tilde_complex(&g, &opts)?;
    let squares = b.squares_to_zero(ctx.opts.execution);
    let summary = format!(
        "{}: {} constraints satisfied on grid number {n}; signed boundary {}",
        if squares { "PASS" } else { "FAIL" },
        constraints.len(),
        if squares { "squares to zero" } else { "does not square to zero" }
    );
    let out = Output {
        text: format!("{summary}\n"),
        json: json!({ "passed": squares, "constraints": constraints.len(), "n": n, "summary": summary }),
    };
    if squares {
        Ok(out)
    } else {
        emit(ctx, &out);
        Err(Failure::Check(summary))
    }
}

fn move_cmd(ctx: &Ctx, m: &MoveCommand) -> Run<Output> {
    let next = match *m {
        MoveCommand::Commute { ref grid, axis, index } => {
            let axis = match axis {
                AxisArg::Row => Axis::Row,
                AxisArg::Col => Axis::Col,
            };
            ctx.load(grid)?.commute(axis, index)
        }
        MoveCommand::Stabilize { ref grid, row, variant } => {
            let variant = match variant {
                VariantArg::A => StabilizationVariant::A,
                VariantArg::B => StabilizationVariant::B,
                VariantArg::C => StabilizationVariant::C,
                VariantArg::D => StabilizationVariant::D,
            };
            ctx.load(grid)?.stabilize(row, variant)
        }
        MoveCommand::Destabilize { ref grid, row, col } => ctx.load(grid)?.destabilize(row, col),
    };
    let next = next?;
    Ok(Output { text: next.to_string(), json: json!({ "grid": next, "inline": next.to_inline() }) })
}

fn emit(ctx: &Ctx, out: &Output) {
    if ctx.global.json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json values serialize"));
    } else {
        print!("{}", out.text);
    }
}

fn run(cli: Cli) -> Run<()> {
    if let Some(t) = cli.global.threads {
        gridhfk::par::configure_threads(t);
    }
    let ctx = Ctx::new(cli.global);
    let out = match &cli.command {
        Command::Homology { grid } => homology_cmd(&ctx, grid)?,
        Command::Alexander { grid } => alexander_cmd(&ctx, grid)?,
        Command::Genus { grid } => genus_cmd(&ctx, grid)?,
        Command::Fibered { grid } => fibered_cmd(&ctx, grid)?,
        Command::Poset(PosetCommand::Stats { grid, samples }) => poset_stats(&ctx, grid, *samples)?,
        Command::Check(CheckCommand::Invariance { grid, moves }) => check_invariance_cmd(&ctx, grid, *moves)?,
        Command::Check(CheckCommand::Signs { grid }) => check_signs_cmd(&ctx, grid)?,
        Command::Moves(m) => move_cmd(&ctx, m)?,
    };
    emit(&ctx, &out);
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let json = args.iter().any(|a| a == "--json");
    let failure = match Cli::try_parse_from(&args) {
        Ok(cli) => match run(cli) {
            Ok(()) => return ExitCode::SUCCESS,
            Err(f) => f,
        },
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if !json {
                let _ = e.print();
                return ExitCode::from(1);
            }
            Failure::Usage(e.render().to_string().trim().to_string())
        }
    };
    if json {
        let v = json!({ "error": failure.kind(), "message": failure.message(), "exit_code": failure.exit_code() });
        eprintln!("{v}");
    } else {
        eprintln!("error: {}", failure.message());
    }
    ExitCode::from(failure.exit_code())
}
