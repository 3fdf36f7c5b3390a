//! The classic profiler: per-operator latency, inter-layer duplication, and
//! energy from active tiles times processing time.
//!
//! Operator latency is `T = C_l * [(1 + N_b) + (6 + N_b + N_p)]` with `C_l`
//! the operator's compute cycles, `N_b` the calculation bit width (16 for
//! the ISAAC-style pipeline) and `N_p` the downstream pooling factor. The
//! same downstream product of pool strides drives both `N_p` and the classic
//! duplication count: an operator feeding a stride-2 pool chain must be
//! replicated to keep the inter-layer pipeline full. The two uses share one
//! value here; the source material reuses the symbol for both.
//!
//! Energy counts only the tiles a plan actually spans, for only the active
//! seconds, disregarding static power of idle components. Chip-level
//! overhead power can be added back in for sensitivity studies.

use serde::{Deserialize, Serialize};

use crate::hardware::{ChipTopology, PowerModel};
use crate::mapping::DeploymentPlan;
use crate::workload::{LayerKind, TenantSpec};

/// Cost-model knobs shared by every profiling path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    /// Calculation bit width N_b.
    pub n_bits: u32,
    /// Cycles to program one crossbar row (1 = one row per cycle).
    pub write_cycles_per_row: u64,
    /// Add chip-level overhead power to energy accounting.
    pub include_chip_overhead: bool,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            n_bits: 16,
            write_cycles_per_row: 1,
            include_chip_overhead: false,
        }
    }
}

/// Latency inputs for one operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfiledOperator {
    pub compute_cycles: u64,
    pub n_bits: u32,
    pub pool_factor: u64,
}

/// `T = C_l * [(1 + N_b) + (6 + N_b + N_p)]`.
pub fn eval_latency(compute_cycles: u64, n_bits: u32, pool_factor: u64) -> u64 {
    compute_cycles * ((1 + u64::from(n_bits)) + (6 + u64::from(n_bits) + pool_factor))
}

/// Classic duplication count for the layer at `layer_index`: the product of
/// the strides of all pooling layers strictly after it.
pub fn classic_duplication(tenant: &TenantSpec, layer_index: usize) -> u64 {
    tenant.layers[layer_index + 1..]
        .iter()
        .filter(|l| l.kind == LayerKind::Pool)
        .map(|l| l.stride)
        .product()
}

/// Compute cycles for one operator: a conv produces its output pixels
/// spread over `duplication` replicas; an fc fires once.
pub fn operator_cycles(kind: LayerKind, out_h: u64, out_w: u64, duplication: u64) -> u64 {
    match kind {
        LayerKind::Conv => (out_h * out_w).div_ceil(duplication),
        LayerKind::Fc => 1,
        LayerKind::Pool => 0,
    }
}

/// Joules for `tiles_used` active tiles over `seconds`.
pub fn energy(tiles_used: u64, seconds: f64, power: &PowerModel) -> f64 {
    tiles_used as f64 * power.tile_power_w * seconds
}

/// Cycle, wall-clock, and energy totals for one deployed tenant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileResult {
    pub cycles: u64,
    pub seconds: f64,
    pub energy_joules: f64,
    pub tiles_used: u64,
}

/// Profile a deployment plan against the chip clock and power model.
pub fn profile_plan(
    plan: &DeploymentPlan,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> ProfileResult {
    let cycles = plan.total_cycles;
    let seconds = cycles as f64 * chip.cycle_ns * 1e-9;
    let mut energy_joules = energy(plan.tiles_used, seconds, power);
    if cost.include_chip_overhead {
        energy_joules += power.chip_overhead_w * seconds;
    }
    ProfileResult {
        cycles,
        seconds,
        energy_joules,
        tiles_used: plan.tiles_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::load_preset;
    use crate::workload::{LayerRecord, TenantSpec};

    #[test]
    fn latency_anchors() {
        assert_eq!(eval_latency(100, 16, 2), 4100);
        assert_eq!(eval_latency(0, 16, 7), 0);
        assert_eq!(eval_latency(1, 16, 1), 40);
    }

    #[test]
    fn latency_monotonic_in_pool_factor_and_bits() {
        assert!(eval_latency(10, 16, 2) < eval_latency(10, 16, 3));
        assert!(eval_latency(10, 16, 2) < eval_latency(10, 17, 2));
        // linear in C_l
        assert_eq!(eval_latency(7, 16, 2), 7 * eval_latency(1, 16, 2));
    }

    #[test]
    fn vgg16_duplication_anchors() {
        let t = load_preset("VGG16").unwrap();
        // first conv sits above five stride-2 pools
        assert_eq!(classic_duplication(&t, 0), 32);
        // last conv of block 5 sits above one pool
        let last_conv = t
            .layers
            .iter()
            .rposition(|l| l.kind == LayerKind::Conv)
            .unwrap();
        assert_eq!(classic_duplication(&t, last_conv), 2);
        // fc layers sit below every pool
        let first_fc = t.layers.iter().position(|l| l.kind == LayerKind::Fc).unwrap();
        assert_eq!(classic_duplication(&t, first_fc), 1);
    }

    #[test]
    fn duplication_is_empty_product_without_pools() {
        let rows = vec![LayerRecord::conv(3, 8, 2), LayerRecord::fc(10, 1)];
        let t = TenantSpec::build("flat", (8, 8, 3), &rows).unwrap();
        for i in 0..t.layers.len() {
            assert_eq!(classic_duplication(&t, i), 1);
        }
    }

    #[test]
    fn operator_cycle_rules() {
        assert_eq!(operator_cycles(LayerKind::Conv, 112, 112, 32), 392);
        assert_eq!(operator_cycles(LayerKind::Fc, 1, 1, 17), 1);
        assert_eq!(operator_cycles(LayerKind::Conv, 1, 1, 1), 1);
        // ceil rounding
        assert_eq!(operator_cycles(LayerKind::Conv, 3, 3, 2), 5);
    }

    #[test]
    fn energy_products() {
        let power = PowerModel {
            tile_power_w: 0.330,
            chip_overhead_w: 0.0,
        };
        let full = energy(168, 1.0, &power);
        assert!((full - 55.44).abs() < 1e-9);
        assert!((full - 55.4).abs() / 55.4 < 0.001);
        assert_eq!(energy(10, 0.0, &power), 0.0);
        assert!((energy(10, 0.01, &power) - 0.033).abs() < 1e-12);
    }

    #[test]
    fn profile_plan_consistency() {
        let chip = crate::hardware::chip_preset("chip1").unwrap().0;
        let power = crate::hardware::chip_preset("chip1").unwrap().1;
        let plan = DeploymentPlan {
            rounds: vec![],
            total_cycles: 6660,
            tiles_used: 2,
        };
        let r = profile_plan(&plan, &chip, &power, &CostConfig::default());
        assert_eq!(r.cycles, 6660);
        assert!((r.seconds - 666e-6).abs() < 1e-18);
        assert!((r.energy_joules - 2.0 * 0.330 * 666e-6).abs() < 1e-15);

        let empty = profile_plan(&DeploymentPlan::default(), &chip, &power, &CostConfig::default());
        assert_eq!(empty.cycles, 0);
        assert_eq!(empty.energy_joules, 0.0);
    }

    #[test]
    fn overhead_flag_adds_chip_power() {
        let (chip, power) = crate::hardware::chip_preset("chip1").unwrap();
        let plan = DeploymentPlan {
            rounds: vec![],
            total_cycles: 10_000_000,
            tiles_used: 1,
        };
        let base = profile_plan(&plan, &chip, &power, &CostConfig::default());
        let with = profile_plan(
            &plan,
            &chip,
            &power,
            &CostConfig {
                include_chip_overhead: true,
                ..CostConfig::default()
            },
        );
        let seconds = 10_000_000.0 * 100.0 * 1e-9;
        assert!((with.energy_joules - base.energy_joules - power.chip_overhead_w * seconds).abs() < 1e-12);
    }
}
