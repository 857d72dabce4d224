//! Command-line surface and handlers.
//!
//! Exit codes: 0 on success, 1 when generation or simulation fails, 2 on
//! usage or input errors (clap reports its own parse failures as 2).

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use wayfarer_core::wfcgen::{self, default_tileset, Preset, TileSet};
use wayfarer_core::world::{build_level, LevelDoc};

use crate::config::RunConfig;
use crate::experiment;
use crate::report;

/// Failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad file, flag, or other caller mistake: exit 2.
    Input(anyhow::Error),
    /// The requested work itself failed: exit 1.
    Run(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        let (CliError::Input(e) | CliError::Run(e)) = self;
        write!(f, "{e:#}")
    }
}

impl std::error::Error for CliError {}

fn input(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn failure(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Run(e.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "wayfarer",
    version,
    about = "Tile-based level generation and motivation-driven agent evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate level files with the wave-function-collapse generator
    Generate(GenerateArgs),
    /// Run the agent battery over level files and write fitness reports
    Evaluate(EvaluateArgs),
    /// Render SVG charts from evaluate outputs
    Report(ReportArgs),
    /// Check a level file and print its stats
    ValidateLevel(ValidateLevelArgs),
    /// Check a tile set file and print its stats
    ValidateTileset(ValidateTilesetArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Weight preset: "a" (engaging) or "b" (unengaging)
    #[arg(long)]
    pub preset: Preset,
    /// Seed of the first level; level i uses seed + i
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of levels to generate
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Tile set TOML (defaults to the built-in set)
    #[arg(long)]
    pub tileset: Option<PathBuf>,
    /// Directory for the level files
    #[arg(long, default_value = "out/levels")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Level files to evaluate
    #[arg(long, num_args = 1.., required = true)]
    pub levels: Vec<PathBuf>,
    /// Master seed; every spawn set and episode derives from it
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Spawn points per level
    #[arg(long, default_value_t = 3)]
    pub spawns: usize,
    /// Episode length in seconds (overrides the config file)
    #[arg(long)]
    pub duration: Option<f64>,
    /// Worker threads; 0 means one per core
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Harness config TOML
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Tile set TOML overriding every level's tileset reference
    #[arg(long)]
    pub tileset: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Evaluate output directory
    #[arg(default_value = "out")]
    pub input: PathBuf,
    /// Directory for the rendered charts
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    /// Harness config TOML (sets the novelty parameters of the charts)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateLevelArgs {
    /// Level file to check
    pub file: PathBuf,
    /// Tile set TOML overriding the file's tileset reference
    #[arg(long)]
    pub tileset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateTilesetArgs {
    /// Tile set file to check
    pub file: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => generate_cmd(args),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Report(args) => report_cmd(args),
        Command::ValidateLevel(args) => validate_level_cmd(args),
        Command::ValidateTileset(args) => validate_tileset_cmd(args),
    }
}

fn load_tileset_file(path: &Path) -> anyhow::Result<TileSet> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading tileset {}", path.display()))?;
    let set = TileSet::from_toml(&text)
        .with_context(|| format!("parsing tileset {}", path.display()))?;
    set.validate()
        .with_context(|| format!("validating tileset {}", path.display()))?;
    Ok(set)
}

/// Tile set for a level file: the --tileset flag wins, then the file's
/// own reference ("default" or a path tried as given and next to the
/// level file).
fn resolve_tileset(
    flag: Option<&Path>,
    doc_ref: &str,
    level_path: &Path,
) -> anyhow::Result<TileSet> {
    if let Some(path) = flag {
        return load_tileset_file(path);
    }
    if doc_ref == "default" {
        return Ok(default_tileset());
    }
    let raw = PathBuf::from(doc_ref);
    let beside = level_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(doc_ref);
    for candidate in [&raw, &beside] {
        if candidate.is_file() {
            return load_tileset_file(candidate);
        }
    }
    bail!(
        "tileset '{doc_ref}' referenced by {} not found",
        level_path.display()
    )
}

fn generate_cmd(args: &GenerateArgs) -> Result<(), CliError> {
    let (set, set_ref) = match &args.tileset {
        Some(path) => (
            load_tileset_file(path).map_err(input)?,
            path.display().to_string(),
        ),
        None => (default_tileset(), "default".to_string()),
    };
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(failure)?;

    for i in 0..args.count {
        let seed = args.seed + i as u64;
        let id = format!("{}-{}", args.preset.token(), seed);
        let tiles = wfcgen::generate(&set, args.preset, seed).map_err(failure)?;
        let level = build_level(&id, &set_ref, tiles, &set, None).map_err(failure)?;
        let path = args.out.join(format!("level_{id}.toml"));
        fs::write(&path, level.to_doc().to_toml())
            .with_context(|| format!("writing {}", path.display()))
            .map_err(failure)?;
        println!(
            "level {id}: {} objects -> {}",
            level.objects.len(),
            path.display()
        );
    }
    Ok(())
}

fn evaluate_cmd(args: &EvaluateArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path).map_err(input)?,
        None => RunConfig::default(),
    };
    if let Some(duration) = args.duration {
        if duration <= 0.0 {
            return Err(input(anyhow!("--duration must be positive")));
        }
        config.agent.sim_duration = duration;
    }
    if args.spawns == 0 {
        return Err(input(anyhow!("--spawns must be at least 1")));
    }

    let mut levels = Vec::new();
    let mut ids = HashSet::new();
    for path in &args.levels {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading level {}", path.display()))
            .map_err(input)?;
        let doc = LevelDoc::from_toml(&text)
            .with_context(|| format!("parsing level {}", path.display()))
            .map_err(input)?;
        let set = resolve_tileset(args.tileset.as_deref(), &doc.tileset, path).map_err(input)?;
        let level = doc
            .build(&set)
            .with_context(|| format!("building level {}", path.display()))
            .map_err(input)?;
        if !ids.insert(level.id.clone()) {
            return Err(input(anyhow!("duplicate level id '{}'", level.id)));
        }
        levels.push(level);
    }

    let battery = experiment::run_battery(&levels, &config, args.seed, args.spawns, args.workers)
        .map_err(failure)?;
    experiment::write_outputs(&args.out, &battery).map_err(failure)?;

    for run in &battery.levels {
        match &run.fitness {
            Some(report) => println!("level {:<16} fitness {:.4}", run.level_id, report.total),
            None => println!(
                "level {:<16} partial ({} failures)",
                run.level_id,
                run.failures.len()
            ),
        }
    }
    println!("outputs in {}", args.out.display());

    if battery.failed() {
        return Err(failure(anyhow!(
            "some episodes failed; partial results written to {}",
            args.out.display()
        )));
    }
    Ok(())
}

fn report_cmd(args: &ReportArgs) -> Result<(), CliError> {
    let config = match &args.config {
        Some(path) => RunConfig::load(path).map_err(input)?,
        None => RunConfig::default(),
    };
    let data = report::load_outputs(&args.input).map_err(input)?;
    let files = report::write_report(&data, &args.out, &config).map_err(failure)?;
    for level in &data.partial {
        println!("note: level {level} has partial results; it contributes no fitness rows");
    }
    println!("wrote {} charts to {}", files.len(), args.out.display());
    Ok(())
}

fn validate_level_cmd(args: &ValidateLevelArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.file)
        .with_context(|| format!("reading level {}", args.file.display()))
        .map_err(input)?;
    let doc = LevelDoc::from_toml(&text)
        .with_context(|| format!("parsing level {}", args.file.display()))
        .map_err(input)?;
    let set = resolve_tileset(args.tileset.as_deref(), &doc.tileset, &args.file).map_err(input)?;
    let level = doc
        .build(&set)
        .with_context(|| format!("building level {}", args.file.display()))
        .map_err(input)?;

    let dim = level.nav.dim();
    let walkable = (0..dim)
        .flat_map(|iz| (0..dim).map(move |ix| (ix, iz)))
        .filter(|&(ix, iz)| level.nav.is_walkable(ix, iz))
        .count();
    println!(
        "ok: level {} ({} tiles, {} objects, {:.1}% walkable)",
        level.id,
        level.tiles.len(),
        level.objects.len(),
        100.0 * walkable as f64 / (dim * dim) as f64
    );
    Ok(())
}

fn validate_tileset_cmd(args: &ValidateTilesetArgs) -> Result<(), CliError> {
    let set = load_tileset_file(&args.file).map_err(input)?;
    let labels: HashSet<&str> = set
        .tiles
        .iter()
        .flat_map(|t| t.sockets.iter().map(String::as_str))
        .collect();
    let decorated = set.tiles.iter().filter(|t| !t.decorations.is_empty()).count();
    let (sum_a, sum_b) = set
        .tiles
        .iter()
        .fold((0.0, 0.0), |(a, b), t| (a + t.weight_a, b + t.weight_b));
    println!(
        "ok: {} tiles, {} socket labels, {} decorated; weight sums a={sum_a:.2} b={sum_b:.2}",
        set.tiles.len(),
        labels.len(),
        decorated
    );
    Ok(())
}
