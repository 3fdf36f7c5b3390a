//! Command-line harness: profile, baseline, optimize, compare, presets.
//!
//! Exit codes: 0 success, 1 infeasible workload or area, 2 configuration or
//! workload parse error, 3 internal report invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mtpim::allocator::OptimizerConfig;
use mtpim::error::{Error, Result};
use mtpim::hardware::{ChipTopology, PowerModel};
use mtpim::profiler::CostConfig;
use mtpim::reconstruct::GridSpec;
use mtpim::report;
use mtpim::workload::{parse_workload, ChipSection, OptimizerSection};
use mtpim::MultiTenantWorkload;

#[derive(Parser)]
#[command(
    name = "mtpim",
    about = "Simulate and optimize multi-tenant DNN deployment on ReRAM crossbar PIM chips",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classic per-tenant profile on the full chip (cycles, seconds, joules)
    Profile(RunArgs),
    /// Classic sequential deployment: per-tenant results and summed latency
    Baseline(RunArgs),
    /// Iterative tenant-level partitioning with operator reconstruction
    Optimize(RunArgs),
    /// Full comparison: baseline vs optimized plus both ablations
    Compare(RunArgs),
    /// List built-in networks, bundles, and chip presets
    Presets {
        /// Write the listing as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args)]
struct RunArgs {
    /// Workload document (TOML with [[tenant]] entries)
    #[arg(long, conflicts_with = "bundle")]
    workload: Option<PathBuf>,

    /// Built-in multi-tenant bundle (MT1..MT8)
    #[arg(long)]
    bundle: Option<String>,

    /// Chip preset name (chip1, chip2) or a TOML file with a [chip] section
    #[arg(long)]
    chip: Option<String>,

    /// Fraction of total tiles moved per iteration [default: 1/tiles]
    #[arg(long)]
    eta: Option<f64>,

    /// Acceptable inter-tenant delay in seconds [default: 5% of the fastest
    /// tenant's time at the initial allocation]
    #[arg(long)]
    delay_budget: Option<f64>,

    /// Iteration cap for the allocation loop [default: 1000]
    #[arg(long)]
    max_iters: Option<u64>,

    /// Comma-separated duplicate parameters
    /// [default: 1/32,1/16,1/8,1/4,1/2,1]
    #[arg(long)]
    alpha_grid: Option<String>,

    /// Comma-separated split thresholds in arrays; token "inf" allowed
    /// [default: powers of two 1..16384 plus inf]
    #[arg(long)]
    beta_grid: Option<String>,

    /// Calculation bit width N_b [default: 16]
    #[arg(long)]
    n_bits: Option<u32>,

    /// Cycles to program one crossbar row [default: 1]
    #[arg(long)]
    write_cycles_per_row: Option<u64>,

    /// Charge chip-level overhead power in energy accounting
    #[arg(long)]
    include_chip_overhead: bool,

    /// Machine-readable output path
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format for --out
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the per-iteration allocation trace (optimize/compare only)
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Presets { out } => run_presets(out.as_deref()),
        Command::Profile(args) => run_profile(&args),
        Command::Baseline(args) => run_baseline(&args),
        Command::Optimize(args) => run_optimize(&args),
        Command::Compare(args) => run_compare(&args),
    }
}

struct Inputs {
    workload: MultiTenantWorkload,
    chip: ChipTopology,
    power: PowerModel,
    config: OptimizerConfig,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Layer flags over file sections over built-in defaults.
fn resolve(args: &RunArgs) -> Result<Inputs> {
    let mut file_chip: Option<ChipSection> = None;
    let mut file_opt: Option<OptimizerSection> = None;

    let workload = match (&args.workload, &args.bundle) {
        (Some(path), None) => {
            let parsed = parse_workload(&read_file(path)?)?;
            file_chip = parsed.chip;
            file_opt = parsed.optimizer;
            parsed.workload
        }
        (None, Some(bundle)) => mtpim::load_bundle(bundle)?,
        (None, None) => {
            return Err(Error::validation(
                "arguments",
                "one of --workload or --bundle is required",
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let (chip, power) = match &args.chip {
        Some(selector) => {
            if selector.ends_with(".toml") || Path::new(selector).exists() {
                let text = read_file(Path::new(selector))?;
                #[derive(serde::Deserialize)]
                struct ChipDoc {
                    chip: ChipSection,
                }
                let doc: ChipDoc =
                    toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                doc.chip.resolve()?
            } else {
                mtpim::chip_preset(selector)?
            }
        }
        None => match &file_chip {
            Some(section) => section.resolve()?,
            None => mtpim::chip_preset("chip1")?,
        },
    };

    let section = file_opt.unwrap_or_default();
    let grid = if args.alpha_grid.is_some() || args.beta_grid.is_some() {
        let base = GridSpec::from_toml(
            section.alpha_grid.as_deref(),
            section.beta_grid.as_deref(),
        )?;
        let mut g = GridSpec::from_cli(args.alpha_grid.as_deref(), args.beta_grid.as_deref())?;
        if args.alpha_grid.is_none() {
            g.alphas = base.alphas;
        }
        if args.beta_grid.is_none() {
            g.betas = base.betas;
        }
        g
    } else {
        GridSpec::from_toml(
            section.alpha_grid.as_deref(),
            section.beta_grid.as_deref(),
        )?
    };

    let cost = CostConfig {
        n_bits: args.n_bits.or(section.n_bits).unwrap_or(16),
        write_cycles_per_row: args
            .write_cycles_per_row
            .or(section.write_cycles_per_row)
            .unwrap_or(1),
        include_chip_overhead: args.include_chip_overhead
            || section.include_chip_overhead.unwrap_or(false),
    };

    let config = OptimizerConfig {
        eta: args.eta.or(section.eta),
        delay_budget_s: args.delay_budget.or(section.delay_budget_s),
        max_iterations: args.max_iters.or(section.max_iterations).unwrap_or(1000),
        grid,
        cost,
    };
    config.validate()?;

    Ok(Inputs {
        workload,
        chip,
        power,
        config,
    })
}

/// Write `contents` under the requested format(s), deriving the sibling
/// extension when both are requested.
fn emit(path: &Path, format: Format, json: &str, csv: &str) -> Result<()> {
    match format {
        Format::Json => write_file(path, json),
        Format::Csv => write_file(path, csv),
        Format::Both => {
            let json_path = path.with_extension("json");
            let csv_path = path.with_extension("csv");
            write_file(&json_path, json)?;
            write_file(&csv_path, csv)
        }
    }
}

fn run_presets(out: Option<&Path>) -> Result<()> {
    println!("networks:");
    for name in mtpim::NETWORK_PRESETS {
        let t = mtpim::load_preset(name)?;
        println!(
            "  {name:<6} {} layers, input {}x{}x{}",
            t.layers.len(),
            t.input_height,
            t.input_width,
            t.input_channels
        );
    }
    println!("bundles:");
    for name in mtpim::BUNDLE_PRESETS {
        let b = mtpim::load_bundle(name)?;
        let members: Vec<&str> = b.tenants.iter().map(|t| t.name.as_str()).collect();
        println!("  {name}: {}", members.join("+"));
    }
    println!("chips:");
    for name in mtpim::hardware::CHIP_PRESETS {
        let (chip, _) = mtpim::chip_preset(name)?;
        println!(
            "  {name}: {}-{}-{}-{} ({} arrays)",
            chip.tiles,
            chip.imas_per_tile,
            chip.arrays_per_ima,
            chip.array_rows,
            chip.total_arrays()
        );
    }
    if let Some(path) = out {
        #[derive(serde::Serialize)]
        struct Listing {
            networks: Vec<&'static str>,
            bundles: Vec<&'static str>,
            chips: Vec<&'static str>,
        }
        let listing = Listing {
            networks: mtpim::NETWORK_PRESETS.to_vec(),
            bundles: mtpim::BUNDLE_PRESETS.to_vec(),
            chips: mtpim::hardware::CHIP_PRESETS.to_vec(),
        };
        write_file(path, &report::to_json(&listing))?;
    }
    Ok(())
}

fn run_profile(args: &RunArgs) -> Result<()> {
    let inputs = resolve(args)?;
    let profile =
        report::profile_workload(&inputs.workload, &inputs.chip, &inputs.power, &inputs.config.cost)?;
    println!("classic profile ({} tiles):", inputs.chip.tiles);
    for t in &profile.tenants {
        println!(
            "  {:<8} {:>12} cycles  {:>12.6} ms  {:>10.4} mJ  {} tiles",
            t.name,
            t.cycles,
            t.seconds * 1e3,
            t.energy_joules * 1e3,
            t.tiles_used
        );
    }
    if let Some(path) = &args.out {
        emit(path, args.format, &report::to_json(&profile), &report::profile_to_csv(&profile))?;
    }
    Ok(())
}

fn run_baseline(args: &RunArgs) -> Result<()> {
    let inputs = resolve(args)?;
    let baseline =
        report::baseline_report(&inputs.workload, &inputs.chip, &inputs.power, &inputs.config.cost)?;
    println!("baseline (sequential, full chip):");
    for t in &baseline.tenants {
        println!(
            "  {:<8} {:>12.6} ms  {:>10.4} mJ",
            t.name,
            t.seconds * 1e3,
            t.energy_joules * 1e3
        );
    }
    println!(
        "  total    {:>12.6} ms  {:>10.4} mJ",
        baseline.total_latency_s * 1e3,
        baseline.total_energy_j * 1e3
    );
    if let Some(path) = &args.out {
        emit(path, args.format, &report::to_json(&baseline), &report::baseline_to_csv(&baseline))?;
    }
    Ok(())
}

fn run_optimize(args: &RunArgs) -> Result<()> {
    let inputs = resolve(args)?;
    let (opt, outcome) =
        report::optimize_report(&inputs.workload, &inputs.chip, &inputs.power, &inputs.config)?;
    println!(
        "optimize: {:?} after {} iterations, delay {:.6} ms",
        opt.stop_reason,
        opt.iterations,
        opt.delay_s * 1e3
    );
    for t in &opt.tenants {
        println!(
            "  {:<8} {:>4} tiles  alpha {:<7} beta {:<6} {:>12.6} ms  {:>10.4} mJ",
            t.name,
            t.tiles,
            t.alpha,
            t.beta.to_string(),
            t.seconds * 1e3,
            t.energy_joules * 1e3
        );
    }
    if let Some(path) = &args.out {
        emit(path, args.format, &report::to_json(&opt), &report::optimize_to_csv(&opt))?;
    }
    if let Some(path) = &args.plot_data {
        let names: Vec<String> = inputs.workload.tenants.iter().map(|t| t.name.clone()).collect();
        write_file(path, &report::history_to_csv(&outcome.history, &names))?;
    }
    Ok(())
}

fn run_compare(args: &RunArgs) -> Result<()> {
    let inputs = resolve(args)?;
    let artifacts = report::compare(&inputs.workload, &inputs.chip, &inputs.power, &inputs.config)?;
    let r = &artifacts.report;
    println!("compare (baseline sequential vs optimized parallel):");
    for t in &r.tenants {
        println!(
            "  {:<8} {:>4} tiles  alpha {:<7} beta {:<6} baseline {:>12.6} ms  optimized {:>12.6} ms",
            t.name,
            t.tiles,
            t.chosen_alpha,
            t.chosen_beta.to_string(),
            t.baseline_seconds * 1e3,
            t.optimized_seconds * 1e3
        );
    }
    println!(
        "  overall speedup {:.3}x  (tenant-level only {:.3}x, operator-level only {:.3}x)",
        r.totals.overall_speedup,
        r.totals.te_level_speedup,
        r.totals.op_level_speedup
    );
    println!(
        "  energy {:.4} mJ -> {:.4} mJ (ratio {:.3})",
        r.totals.baseline_energy_j * 1e3,
        r.totals.optimized_energy_j * 1e3,
        r.totals.energy_ratio
    );
    if let Some(path) = &args.out {
        emit(path, args.format, &report::to_json(r), &report::comparison_to_csv(r))?;
    }
    if let Some(path) = &args.plot_data {
        let names: Vec<String> = inputs.workload.tenants.iter().map(|t| t.name.clone()).collect();
        write_file(path, &report::history_to_csv(&artifacts.joint.history, &names))?;
    }
    Ok(())
}
