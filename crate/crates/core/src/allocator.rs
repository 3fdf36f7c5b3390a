//! Tenant-level iterative area partitioning.
//!
//! Tiles start equally split, then each iteration moves `max(1, round(eta *
//! tiles))` tiles from the fastest tenant to the slowest, re-running the
//! per-tenant grid search at the new areas. The loop stops when the spread
//! between tenant completion times drops inside the delay budget, when the
//! allocation matches the one from two rounds ago, or at the iteration cap.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::hardware::{ChipTopology, PowerModel};
use crate::mapping::footprint;
use crate::profiler::{CostConfig, ProfileResult};
use crate::reconstruct::{processing_time, GridSearchResult, GridSpec};
use crate::workload::{MultiTenantWorkload, TenantSpec};

/// Optimizer knobs. `eta` and `delay_budget_s` resolve per run when unset:
/// eta defaults to one tile per step (1/tiles) and the budget to 5% of the
/// fastest tenant's time at the initial allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub eta: Option<f64>,
    pub delay_budget_s: Option<f64>,
    pub max_iterations: u64,
    pub grid: GridSpec,
    pub cost: CostConfig,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            eta: None,
            delay_budget_s: None,
            max_iterations: 1000,
            grid: GridSpec::default(),
            cost: CostConfig::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
                return Err(Error::validation("optimizer", format!("eta {eta} outside (0, 1]")));
            }
        }
        if let Some(l) = self.delay_budget_s {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::validation("optimizer", "delay budget must be >= 0"));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::validation("optimizer", "max_iterations must be >= 1"));
        }
        self.grid.validate()
    }
}

/// Why the allocation loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    DelayMet,
    EarlyStopRepeat,
    MaxIterations,
}

/// One evaluated allocation state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub tiles: Vec<u64>,
    pub seconds: Vec<f64>,
    pub delay_s: f64,
}

/// Final allocation for one tenant plus its winning reconstruction.
#[derive(Debug, Clone)]
pub struct TenantAllocation {
    pub name: String,
    pub tiles: u64,
    pub search: GridSearchResult,
    pub profile: ProfileResult,
}

/// Result of the full partitioning loop.
#[derive(Debug, Clone)]
pub struct AllocationOutcome {
    pub final_tiles: Vec<u64>,
    pub per_tenant: Vec<TenantAllocation>,
    pub delay_s: f64,
    pub stop_reason: StopReason,
    pub iterations: u64,
    pub history: Vec<IterationRecord>,
    /// Learning rate and delay budget actually used, after defaulting.
    pub eta: f64,
    pub delay_budget_s: f64,
}

/// Minimum tiles in which the tenant's largest indivisible re-operator (one
/// row band of its widest layer) fits in a single round.
pub fn min_feasible_tiles(tenant: &TenantSpec, chip: &ChipTopology) -> u64 {
    let min_arrays = tenant
        .layers
        .iter()
        .filter_map(|l| footprint(l, chip))
        .map(|fp| fp.col_slices)
        .max()
        .unwrap_or(1);
    min_arrays.div_ceil(chip.arrays_per_tile()).max(1)
}

/// Equal integer split of the chip's tiles; remainder tiles go one each to
/// the first tenants.
pub fn initial_allocation(tenants: usize, chip: &ChipTopology) -> Result<Vec<u64>> {
    if tenants == 0 {
        return Err(Error::validation("allocation", "no tenants"));
    }
    let n = tenants as u64;
    if n > chip.tiles {
        return Err(Error::InfeasibleWorkload {
            tiles: chip.tiles,
            minimums: (0..tenants).map(|i| (format!("tenant{}", i + 1), 1)).collect(),
        });
    }
    let base = chip.tiles / n;
    let remainder = chip.tiles % n;
    Ok((0..n).map(|i| base + u64::from(i < remainder)).collect())
}

/// Raise any tenant below its minimum to the minimum, taking tiles from the
/// tenants with the most headroom. Assumes the minimums fit the chip.
fn repair_minimums(mut alloc: Vec<u64>, minimums: &[u64]) -> Vec<u64> {
    let mut deficit: u64 = alloc
        .iter()
        .zip(minimums)
        .map(|(&a, &m)| m.saturating_sub(a))
        .sum();
    if deficit == 0 {
        return alloc;
    }
    for (a, &m) in alloc.iter_mut().zip(minimums) {
        if *a < m {
            *a = m;
        }
    }
    while deficit > 0 {
        let donor = (0..alloc.len())
            .max_by_key(|&i| alloc[i].saturating_sub(minimums[i]))
            .expect("nonempty allocation");
        let headroom = alloc[donor] - minimums[donor];
        let take = headroom.min(deficit);
        alloc[donor] -= take;
        deficit -= take;
        debug_assert!(take > 0, "repair requires total headroom >= deficit");
    }
    alloc
}

/// Index of the first minimum / first maximum, so ties break to the lowest
/// tenant index.
fn arg_first(times: &[f64], prefer_larger: bool) -> usize {
    let mut best = 0;
    for (i, &t) in times.iter().enumerate().skip(1) {
        let better = if prefer_larger { t > times[best] } else { t < times[best] };
        if better {
            best = i;
        }
    }
    best
}

/// One reallocation step: move tiles from the fastest tenant to the
/// slowest, clamped so the donor keeps its minimum. Ties break to the
/// lowest index; a self-move leaves the allocation unchanged.
pub fn iter_allocation(
    alloc: &[u64],
    times: &[f64],
    eta: f64,
    chip: &ChipTopology,
    minimums: &[u64],
) -> Vec<u64> {
    let donor = arg_first(times, false);
    let receiver = arg_first(times, true);
    let mut next = alloc.to_vec();
    if donor == receiver {
        return next;
    }
    let step = ((eta * chip.tiles as f64).round() as u64).max(1);
    let moved = step.min(alloc[donor].saturating_sub(minimums[donor]));
    next[donor] -= moved;
    next[receiver] += moved;
    next
}

/// Run the full iterative partitioning loop for a workload.
pub fn allocate_area(
    workload: &MultiTenantWorkload,
    chip: &ChipTopology,
    power: &PowerModel,
    config: &OptimizerConfig,
) -> Result<AllocationOutcome> {
    chip.validate()?;
    power.validate()?;
    config.validate()?;
    let tenants = &workload.tenants;

    let minimums: Vec<u64> = tenants
        .iter()
        .map(|t| min_feasible_tiles(t, chip))
        .collect();
    let required: u64 = minimums.iter().sum();
    if required > chip.tiles || tenants.len() as u64 > chip.tiles {
        return Err(Error::InfeasibleWorkload {
            tiles: chip.tiles,
            minimums: tenants
                .iter()
                .zip(&minimums)
                .map(|(t, &m)| (t.name.clone(), m))
                .collect(),
        });
    }

    let eta = config.eta.unwrap_or(1.0 / chip.tiles as f64);
    let mut alloc = repair_minimums(initial_allocation(tenants.len(), chip)?, &minimums);

    // Grid searches repeat whenever the walk revisits an area; memoize per
    // (tenant, tiles).
    let mut memo: HashMap<(usize, u64), Arc<GridSearchResult>> = HashMap::new();
    let evaluate = |alloc: &[u64],
                        memo: &mut HashMap<(usize, u64), Arc<GridSearchResult>>|
     -> Result<Vec<Arc<GridSearchResult>>> {
        let missing: Vec<(usize, u64)> = alloc
            .iter()
            .enumerate()
            .map(|(i, &tiles)| (i, tiles))
            .filter(|key| !memo.contains_key(key))
            .collect();
        let computed = map_collect(&missing, |&(i, tiles)| {
            processing_time(
                &tenants[i],
                tiles * chip.arrays_per_tile(),
                &config.grid,
                chip,
                power,
                &config.cost,
            )
        });
        for (key, result) in missing.into_iter().zip(computed) {
            memo.insert(key, Arc::new(result?));
        }
        Ok(alloc
            .iter()
            .enumerate()
            .map(|(i, &tiles)| Arc::clone(&memo[&(i, tiles)]))
            .collect())
    };

    let mut history: Vec<IterationRecord> = Vec::new();
    let mut delay_budget = config.delay_budget_s;
    let mut stop_reason = StopReason::MaxIterations;
    let mut final_results: Vec<Arc<GridSearchResult>> = Vec::new();
    let mut final_alloc = alloc.clone();
    let mut iterations = 0;

    for iter in 0..config.max_iterations {
        debug_assert_eq!(alloc.iter().sum::<u64>(), chip.tiles);
        let results = evaluate(&alloc, &mut memo)?;
        let seconds: Vec<f64> = results.iter().map(|r| r.best_profile.seconds).collect();
        let (min_t, max_t) = seconds
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
                (lo.min(t), hi.max(t))
            });
        let delay = max_t - min_t;
        if delay_budget.is_none() {
            delay_budget = Some(0.05 * min_t);
        }
        history.push(IterationRecord {
            iteration: iter,
            tiles: alloc.clone(),
            seconds: seconds.clone(),
            delay_s: delay,
        });
        final_results = results;
        final_alloc = alloc.clone();
        iterations = iter + 1;

        if delay <= delay_budget.expect("resolved above") {
            stop_reason = StopReason::DelayMet;
            break;
        }
        if iter >= 2 && history[(iter - 2) as usize].tiles == alloc {
            stop_reason = StopReason::EarlyStopRepeat;
            break;
        }
        alloc = iter_allocation(&alloc, &seconds, eta, chip, &minimums);
    }

    let delay_s = history.last().map(|h| h.delay_s).unwrap_or(0.0);
    let per_tenant = tenants
        .iter()
        .zip(&final_alloc)
        .zip(&final_results)
        .map(|((t, &tiles), result)| TenantAllocation {
            name: t.name.clone(),
            tiles,
            search: (**result).clone(),
            profile: result.best_profile,
        })
        .collect();

    Ok(AllocationOutcome {
        final_tiles: final_alloc,
        per_tenant,
        delay_s,
        stop_reason,
        iterations,
        history,
        eta,
        delay_budget_s: delay_budget.unwrap_or(0.0),
    })
}
