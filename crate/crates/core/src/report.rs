//! Baseline deployment, optimized-vs-baseline comparison, and report
//! emission.
//!
//! The baseline is classic sequential deployment: each tenant gets the whole
//! chip with classic duplication and no reconstruction (operators larger
//! than the chip split only at physical capacity), and tenants run one after
//! another, so baseline latency is the sum of per-tenant times. The
//! optimized run partitions the chip and runs tenants in parallel, so its
//! latency is the slowest tenant. Two ablations isolate the mechanisms:
//! tenant-level-only keeps the iterative partition but pins the grid to the
//! classic point; operator-level-only keeps the full grid on a fixed equal
//! partition.
//!
//! Reports are deterministic: identical inputs yield byte-identical output,
//! and every totals field is recomputable from the per-tenant rows (checked
//! by [`validate_report`] on every emission).

use serde::Serialize;

use crate::allocator::{
    allocate_area, initial_allocation, min_feasible_tiles, AllocationOutcome, IterationRecord,
    OptimizerConfig, StopReason,
};
use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::hardware::{ChipTopology, PowerModel};
use crate::profiler::{classic_duplication, CostConfig, ProfileResult};
use crate::reconstruct::{processing_time, Beta, GridSpec};
use crate::workload::MultiTenantWorkload;

/// Classic full-chip deployment of every tenant, in workload order.
/// Tenants execute sequentially; total latency is the sum.
pub fn baseline_deploy(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> Result<Vec<ProfileResult>> {
    let grid = GridSpec::classic_only();
    let results = map_collect(&workload.tenants, |tenant| {
        processing_time(tenant, chip.total_arrays(), &grid, chip, power, cost)
            .map(|r| r.best_profile)
    });
    results.into_iter().collect()
}

/// Configuration echoed into every report for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub chip: ChipTopology,
    pub power: PowerModel,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<Beta>,
    pub eta: f64,
    pub delay_budget_s: f64,
    pub max_iterations: u64,
    pub n_bits: u32,
    pub write_cycles_per_row: u64,
    pub include_chip_overhead: bool,
    pub note: String,
}

const DETERMINISM_NOTE: &str =
    "seed-free deterministic pipeline: identical inputs produce byte-identical reports";

/// Per-tenant comparison row.
#[derive(Debug, Clone, Serialize)]
pub struct TenantComparison {
    pub name: String,
    /// Tiles allocated to the tenant in the optimized partition.
    pub tiles: u64,
    pub chosen_alpha: f64,
    pub chosen_beta: Beta,
    pub baseline_cycles: u64,
    pub baseline_seconds: f64,
    pub baseline_energy_j: f64,
    pub baseline_tiles_used: u64,
    pub optimized_cycles: u64,
    pub optimized_seconds: f64,
    pub optimized_energy_j: f64,
    pub optimized_tiles_used: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTotals {
    /// Sum of per-tenant baseline times (sequential execution).
    pub baseline_latency_s: f64,
    /// Max over per-tenant optimized times (parallel execution).
    pub optimized_latency_s: f64,
    pub overall_speedup: f64,
    pub baseline_energy_j: f64,
    pub optimized_energy_j: f64,
    /// baseline / optimized energy; below 1 means the optimized run costs more.
    pub energy_ratio: f64,
    pub te_level_latency_s: f64,
    pub te_level_speedup: f64,
    pub op_level_latency_s: f64,
    pub op_level_speedup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AllocationSummary {
    pub final_tiles: Vec<u64>,
    pub stop_reason: StopReason,
    pub iterations: u64,
    pub delay_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub config: ConfigEcho,
    pub tenants: Vec<TenantComparison>,
    pub allocation: AllocationSummary,
    pub totals: ComparisonTotals,
}

/// A comparison report together with the allocation trace behind it.
#[derive(Debug, Clone)]
pub struct CompareArtifacts {
    pub report: ComparisonReport,
    pub joint: AllocationOutcome,
}

fn config_echo(
    chip: &ChipTopology,
    power: &PowerModel,
    config: &OptimizerConfig,
    eta: f64,
    delay_budget_s: f64,
) -> ConfigEcho {
    ConfigEcho {
        chip: chip.clone(),
        power: power.clone(),
        alpha_grid: config.grid.alphas.clone(),
        beta_grid: config.grid.betas.clone(),
        eta,
        delay_budget_s,
        max_iterations: config.max_iterations,
        n_bits: config.cost.n_bits,
        write_cycles_per_row: config.cost.write_cycles_per_row,
        include_chip_overhead: config.cost.include_chip_overhead,
        note: DETERMINISM_NOTE.to_string(),
    }
}

/// Full comparison: baseline, joint optimization, and both ablations.
pub fn compare(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    config: &OptimizerConfig,
) -> Result<CompareArtifacts> {
    let baseline = baseline_deploy(workload, chip, power, &config.cost)?;
    let joint = allocate_area(workload, chip, power, config)?;

    // Ablation (a): tenant-level only, grid pinned to the classic point.
    let te_config = OptimizerConfig {
        grid: GridSpec::classic_only(),
        ..config.clone()
    };
    let te_only = allocate_area(workload, chip, power, &te_config)?;

    // Ablation (b): operator-level only, fixed equal partition.
    let minimums: Vec<u64> = workload
        .tenants
        .iter()
        .map(|t| min_feasible_tiles(t, chip))
        .collect();
    let equal = repair_equal_split(workload.tenants.len(), chip, &minimums)?;
    let op_results = map_collect(
        &workload
            .tenants
            .iter()
            .zip(&equal)
            .map(|(t, &tiles)| (t.clone(), tiles))
            .collect::<Vec<_>>(),
        |(tenant, tiles)| {
            processing_time(
                tenant,
                tiles * chip.arrays_per_tile(),
                &config.grid,
                chip,
                power,
                &config.cost,
            )
            .map(|r| r.best_profile)
        },
    );
    let op_only: Vec<ProfileResult> = op_results.into_iter().collect::<Result<_>>()?;

    let tenants: Vec<TenantComparison> = workload
        .tenants
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let opt = &joint.per_tenant[i];
            TenantComparison {
                name: t.name.clone(),
                tiles: joint.final_tiles[i],
                chosen_alpha: opt.search.best_params.alpha,
                chosen_beta: opt.search.best_params.beta,
                baseline_cycles: baseline[i].cycles,
                baseline_seconds: baseline[i].seconds,
                baseline_energy_j: baseline[i].energy_joules,
                baseline_tiles_used: baseline[i].tiles_used,
                optimized_cycles: opt.profile.cycles,
                optimized_seconds: opt.profile.seconds,
                optimized_energy_j: opt.profile.energy_joules,
                optimized_tiles_used: opt.profile.tiles_used,
            }
        })
        .collect();

    let baseline_latency_s: f64 = tenants.iter().map(|t| t.baseline_seconds).sum();
    let optimized_latency_s = tenants
        .iter()
        .map(|t| t.optimized_seconds)
        .fold(0.0, f64::max);
    let baseline_energy_j: f64 = tenants.iter().map(|t| t.baseline_energy_j).sum();
    let optimized_energy_j: f64 = tenants.iter().map(|t| t.optimized_energy_j).sum();
    let te_level_latency_s = te_only
        .per_tenant
        .iter()
        .map(|t| t.profile.seconds)
        .fold(0.0, f64::max);
    let op_level_latency_s = op_only.iter().map(|p| p.seconds).fold(0.0, f64::max);

    let totals = ComparisonTotals {
        baseline_latency_s,
        optimized_latency_s,
        overall_speedup: baseline_latency_s / optimized_latency_s,
        baseline_energy_j,
        optimized_energy_j,
        energy_ratio: baseline_energy_j / optimized_energy_j,
        te_level_latency_s,
        te_level_speedup: baseline_latency_s / te_level_latency_s,
        op_level_latency_s,
        op_level_speedup: baseline_latency_s / op_level_latency_s,
    };

    let report = ComparisonReport {
        config: config_echo(chip, power, config, joint.eta, joint.delay_budget_s),
        tenants,
        allocation: AllocationSummary {
            final_tiles: joint.final_tiles.clone(),
            stop_reason: joint.stop_reason,
            iterations: joint.iterations,
            delay_s: joint.delay_s,
        },
        totals,
    };
    validate_report(&report)?;
    Ok(CompareArtifacts { report, joint })
}

/// Equal split raised to per-tenant minimums, as used by the fixed-partition
/// ablation.
fn repair_equal_split(tenants: usize, chip: &ChipTopology, minimums: &[u64]) -> Result<Vec<u64>> {
    let required: u64 = minimums.iter().sum();
    if required > chip.tiles {
        return Err(Error::InfeasibleWorkload {
            tiles: chip.tiles,
            minimums: minimums
                .iter()
                .enumerate()
                .map(|(i, &m)| (format!("tenant{}", i + 1), m))
                .collect(),
        });
    }
    let mut alloc = initial_allocation(tenants, chip)?;
    // Raise below-minimum tenants, taking from the largest headroom.
    loop {
        let deficit: u64 = alloc
            .iter()
            .zip(minimums)
            .map(|(&a, &m)| m.saturating_sub(a))
            .sum();
        if deficit == 0 {
            return Ok(alloc);
        }
        for (a, &m) in alloc.iter_mut().zip(minimums) {
            if *a < m {
                *a = m;
            }
        }
        let mut to_take = deficit;
        for i in 0..alloc.len() {
            let headroom = alloc[i].saturating_sub(minimums[i]);
            let take = headroom.min(to_take);
            alloc[i] -= take;
            to_take -= take;
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() <= 1e-12 * scale
}

/// Recompute every totals field from the per-tenant rows and the config
/// echo. Emission paths call this before writing anything.
pub fn validate_report(report: &ComparisonReport) -> Result<()> {
    let fail = |msg: String| Err(Error::ReportInvariant(msg));
    let t = &report.totals;
    let rows = &report.tenants;
    if rows.is_empty() {
        return fail("report has no tenant rows".into());
    }

    let base_lat: f64 = rows.iter().map(|r| r.baseline_seconds).sum();
    if !close(base_lat, t.baseline_latency_s) {
        return fail(format!(
            "baseline_latency_s {} != sum of rows {}",
            t.baseline_latency_s, base_lat
        ));
    }
    let opt_lat = rows.iter().map(|r| r.optimized_seconds).fold(0.0, f64::max);
    if !close(opt_lat, t.optimized_latency_s) {
        return fail(format!(
            "optimized_latency_s {} != max of rows {}",
            t.optimized_latency_s, opt_lat
        ));
    }
    if !close(t.overall_speedup, base_lat / opt_lat) {
        return fail(format!("overall_speedup {} inconsistent", t.overall_speedup));
    }
    let base_e: f64 = rows.iter().map(|r| r.baseline_energy_j).sum();
    let opt_e: f64 = rows.iter().map(|r| r.optimized_energy_j).sum();
    if !close(base_e, t.baseline_energy_j) || !close(opt_e, t.optimized_energy_j) {
        return fail("energy totals inconsistent with rows".into());
    }
    if !close(t.energy_ratio, base_e / opt_e) {
        return fail(format!("energy_ratio {} inconsistent", t.energy_ratio));
    }
    if !close(t.te_level_speedup, base_lat / t.te_level_latency_s)
        || !close(t.op_level_speedup, base_lat / t.op_level_latency_s)
    {
        return fail("ablation speedups inconsistent with stored latencies".into());
    }

    let cycle_s = report.config.chip.cycle_ns * 1e-9;
    let overhead = if report.config.include_chip_overhead {
        report.config.power.chip_overhead_w
    } else {
        0.0
    };
    for r in rows {
        for (what, cycles, seconds, energy, tiles_used) in [
            (
                "baseline",
                r.baseline_cycles,
                r.baseline_seconds,
                r.baseline_energy_j,
                r.baseline_tiles_used,
            ),
            (
                "optimized",
                r.optimized_cycles,
                r.optimized_seconds,
                r.optimized_energy_j,
                r.optimized_tiles_used,
            ),
        ] {
            if !close(seconds, cycles as f64 * cycle_s) {
                return fail(format!("{what} seconds for '{}' inconsistent with cycles", r.name));
            }
            let expect =
                tiles_used as f64 * report.config.power.tile_power_w * seconds + overhead * seconds;
            if !close(energy, expect) {
                return fail(format!("{what} energy for '{}' inconsistent", r.name));
            }
        }
    }
    let tile_sum: u64 = rows.iter().map(|r| r.tiles).sum();
    if tile_sum > report.config.chip.tiles {
        return fail(format!(
            "allocated tiles {} exceed chip tiles {}",
            tile_sum, report.config.chip.tiles
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Flat CSV: one row per tenant plus a totals row.
pub fn comparison_to_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(
        "tenant,tiles,chosen_alpha,chosen_beta,baseline_cycles,baseline_seconds,baseline_energy_j,optimized_cycles,optimized_seconds,optimized_energy_j,overall_speedup,energy_ratio\n",
    );
    for r in &report.tenants {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},,\n",
            r.name,
            r.tiles,
            r.chosen_alpha,
            r.chosen_beta,
            r.baseline_cycles,
            r.baseline_seconds,
            r.baseline_energy_j,
            r.optimized_cycles,
            r.optimized_seconds,
            r.optimized_energy_j,
        ));
    }
    let t = &report.totals;
    out.push_str(&format!(
        "TOTAL,{},,,,{},{},,{},{},{},{}\n",
        report.tenants.iter().map(|r| r.tiles).sum::<u64>(),
        t.baseline_latency_s,
        t.baseline_energy_j,
        t.optimized_latency_s,
        t.optimized_energy_j,
        t.overall_speedup,
        t.energy_ratio,
    ));
    out
}

/// Plot-data CSV: iteration index, per-tenant seconds, delay.
pub fn history_to_csv(history: &[IterationRecord], names: &[String]) -> String {
    let mut out = String::from("iteration");
    for n in names {
        out.push_str(&format!(",{n}_tiles,{n}_seconds"));
    }
    out.push_str(",delay_s\n");
    for rec in history {
        out.push_str(&rec.iteration.to_string());
        for (tiles, secs) in rec.tiles.iter().zip(&rec.seconds) {
            out.push_str(&format!(",{tiles},{secs}"));
        }
        out.push_str(&format!(",{}\n", rec.delay_s));
    }
    out
}

// ---------------------------------------------------------------------------
// Reports for the simpler subcommands
// ---------------------------------------------------------------------------

/// Per-layer detail of the classic profile.
#[derive(Debug, Clone, Serialize)]
pub struct LayerDetail {
    pub index: usize,
    pub kind: String,
    pub out_h: u64,
    pub out_w: u64,
    pub duplication: u64,
    pub rows: u64,
    pub cols: u64,
    pub arrays: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TenantProfileReport {
    pub name: String,
    pub cycles: u64,
    pub seconds: f64,
    pub energy_joules: f64,
    pub tiles_used: u64,
    pub layers: Vec<LayerDetail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub chip: ChipTopology,
    pub tenants: Vec<TenantProfileReport>,
}

/// Classic per-tenant profile at full chip area.
pub fn profile_workload(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> Result<ProfileReport> {
    let baseline = baseline_deploy(workload, chip, power, cost)?;
    let tenants = workload
        .tenants
        .iter()
        .zip(&baseline)
        .map(|(t, profile)| {
            let maps = t.feature_maps();
            let layers = t
                .layers
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let fp = crate::mapping::footprint(l, chip);
                    LayerDetail {
                        index: i,
                        kind: l.kind.to_string(),
                        out_h: maps[i].out_h,
                        out_w: maps[i].out_w,
                        duplication: classic_duplication(t, i),
                        rows: fp.map_or(0, |f| f.rows),
                        cols: fp.map_or(0, |f| f.cols),
                        arrays: fp.map_or(0, |f| f.arrays),
                    }
                })
                .collect();
            TenantProfileReport {
                name: t.name.clone(),
                cycles: profile.cycles,
                seconds: profile.seconds,
                energy_joules: profile.energy_joules,
                tiles_used: profile.tiles_used,
                layers,
            }
        })
        .collect();
    Ok(ProfileReport {
        chip: chip.clone(),
        tenants,
    })
}

pub fn profile_to_csv(report: &ProfileReport) -> String {
    let mut out = String::from("tenant,cycles,seconds,energy_joules,tiles_used\n");
    for t in &report.tenants {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.name, t.cycles, t.seconds, t.energy_joules, t.tiles_used
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineReport {
    pub chip: ChipTopology,
    pub tenants: Vec<TenantProfileReport>,
    pub total_latency_s: f64,
    pub total_energy_j: f64,
}

/// Classic sequential deployment report.
pub fn baseline_report(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> Result<BaselineReport> {
    let profile = profile_workload(workload, chip, power, cost)?;
    let total_latency_s = profile.tenants.iter().map(|t| t.seconds).sum();
    let total_energy_j = profile.tenants.iter().map(|t| t.energy_joules).sum();
    Ok(BaselineReport {
        chip: profile.chip,
        tenants: profile.tenants,
        total_latency_s,
        total_energy_j,
    })
}

pub fn baseline_to_csv(report: &BaselineReport) -> String {
    let mut out = String::from("tenant,cycles,seconds,energy_joules,tiles_used\n");
    for t in &report.tenants {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.name, t.cycles, t.seconds, t.energy_joules, t.tiles_used
        ));
    }
    out.push_str(&format!(
        "TOTAL,,{},{},\n",
        report.total_latency_s, report.total_energy_j
    ));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TenantOptimizeReport {
    pub name: String,
    pub tiles: u64,
    pub alpha: f64,
    pub beta: Beta,
    pub cycles: u64,
    pub seconds: f64,
    pub energy_joules: f64,
    pub tiles_used: u64,
    pub rounds: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub config: ConfigEcho,
    pub stop_reason: StopReason,
    pub iterations: u64,
    pub delay_s: f64,
    pub tenants: Vec<TenantOptimizeReport>,
    pub history: Vec<IterationRecord>,
}

/// Run the allocator and package the outcome for emission.
pub fn optimize_report(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    config: &OptimizerConfig,
) -> Result<(OptimizeReport, AllocationOutcome)> {
    let outcome = allocate_area(workload, chip, power, config)?;
    let tenants = outcome
        .per_tenant
        .iter()
        .map(|t| TenantOptimizeReport {
            name: t.name.clone(),
            tiles: t.tiles,
            alpha: t.search.best_params.alpha,
            beta: t.search.best_params.beta,
            cycles: t.profile.cycles,
            seconds: t.profile.seconds,
            energy_joules: t.profile.energy_joules,
            tiles_used: t.profile.tiles_used,
            rounds: t.search.best_plan.rounds.len(),
        })
        .collect();
    let report = OptimizeReport {
        config: config_echo(chip, power, config, outcome.eta, outcome.delay_budget_s),
        stop_reason: outcome.stop_reason,
        iterations: outcome.iterations,
        delay_s: outcome.delay_s,
        tenants,
        history: outcome.history.clone(),
    };
    Ok((report, outcome))
}

pub fn optimize_to_csv(report: &OptimizeReport) -> String {
    let mut out = String::from("tenant,tiles,alpha,beta,cycles,seconds,energy_joules,tiles_used,rounds\n");
    for t in &report.tenants {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            t.name, t.tiles, t.alpha, t.beta, t.cycles, t.seconds, t.energy_joules, t.tiles_used, t.rounds
        ));
    }
    out
}
