//! End-to-end flows through the public surface: document in, report out.

use mtpim::allocator::{allocate_area, OptimizerConfig};
use mtpim::error::Error;
use mtpim::hardware::chip_preset;
use mtpim::profiler::CostConfig;
use mtpim::reconstruct::GridSpec;
use mtpim::report;
use mtpim::workload::parse_workload;
use mtpim::{load_bundle, load_preset, MultiTenantWorkload};

const CUSTOM_DOC: &str = r#"
[chip]
preset = "chip1"

[optimizer]
eta = 0.01
delay_budget_s = 0.0001
max_iterations = 50
alpha_grid = ["1/4", "1/2", 1]
beta_grid = [4, 64, "inf"]

[[tenant]]
name = "smallA"
input = [16, 16, 3]
layers = [
    { kind = "conv", kernel = 3, out = 16, repeat = 2 },
    { kind = "pool" },
    { kind = "conv", kernel = 3, out = 32 },
    { kind = "pool" },
    { kind = "fc", out = 64 },
]

[[tenant]]
name = "smallB"
input = [32, 32, 1]
layers = [
    { kind = "conv", kernel = 5, out = 8 },
    { kind = "pool" },
    { kind = "fc", out = 32 },
    { kind = "fc", out = 10 },
]
"#;

#[test]
fn document_to_validated_report() {
    let file = parse_workload(CUSTOM_DOC).unwrap();
    let (chip, power) = file.chip.as_ref().unwrap().resolve().unwrap();
    let section = file.optimizer.as_ref().unwrap();
    let config = OptimizerConfig {
        eta: section.eta,
        delay_budget_s: section.delay_budget_s,
        max_iterations: section.max_iterations.unwrap(),
        grid: GridSpec::from_toml(
            section.alpha_grid.as_deref(),
            section.beta_grid.as_deref(),
        )
        .unwrap(),
        cost: CostConfig::default(),
    };
    let artifacts = report::compare(&file.workload, &chip, &power, &config).unwrap();
    report::validate_report(&artifacts.report).unwrap();
    assert_eq!(artifacts.report.tenants.len(), 2);
    assert!(artifacts.report.totals.overall_speedup > 0.0);
    // the echoed config reflects the document, not the defaults
    assert_eq!(artifacts.report.config.eta, 0.01);
    assert_eq!(artifacts.report.config.alpha_grid, vec![0.25, 0.5, 1.0]);
}

#[test]
fn optimize_twice_is_identical() {
    let file = parse_workload(CUSTOM_DOC).unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let config = OptimizerConfig {
        max_iterations: 30,
        ..Default::default()
    };
    let a = allocate_area(&file.workload, &chip, &power, &config).unwrap();
    let b = allocate_area(&file.workload, &chip, &power, &config).unwrap();
    assert_eq!(a.final_tiles, b.final_tiles);
    assert_eq!(a.stop_reason, b.stop_reason);
    assert_eq!(a.history, b.history);
}

#[test]
fn pinned_classic_grid_and_fixed_split_is_self_identical() {
    // With the grid pinned to the classic point and a single iteration, the
    // joint run IS the operator-level ablation, so the speedup of that
    // configuration relative to itself is exactly 1.
    let workload = load_bundle("MT4").unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let config = OptimizerConfig {
        grid: GridSpec::classic_only(),
        max_iterations: 1,
        ..Default::default()
    };
    let artifacts = report::compare(&workload, &chip, &power, &config).unwrap();
    let t = &artifacts.report.totals;
    assert_eq!(t.optimized_latency_s, t.op_level_latency_s);
    assert_eq!(t.optimized_latency_s, t.te_level_latency_s);
    assert!((t.op_level_latency_s / t.optimized_latency_s - 1.0).abs() < 1e-15);
}

#[test]
fn ablations_bracket_the_joint_run() {
    let workload = load_bundle("MT6").unwrap();
    let (chip, power) = chip_preset("chip2").unwrap();
    let artifacts =
        report::compare(&workload, &chip, &power, &OptimizerConfig::default()).unwrap();
    let t = &artifacts.report.totals;
    // Each ablation disables one mechanism, so neither can beat the joint
    // run by more than rounding, and all must beat or match the baseline's
    // sequential latency.
    assert!(t.overall_speedup >= t.te_level_speedup * 0.999);
    assert!(t.overall_speedup >= t.op_level_speedup * 0.999);
    assert!(t.te_level_latency_s <= t.baseline_latency_s);
}

#[test]
fn four_tenant_bundles_allocate_all_tiles() {
    let workload = load_bundle("MT7").unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let outcome =
        allocate_area(&workload, &chip, &power, &OptimizerConfig::default()).unwrap();
    assert_eq!(outcome.final_tiles.len(), 4);
    assert_eq!(outcome.final_tiles.iter().sum::<u64>(), 168);
    for t in &outcome.per_tenant {
        assert!(t.profile.cycles > 0);
    }
}

#[test]
fn workload_round_trip_through_toml() {
    let original = load_bundle("MT8").unwrap();
    let text = mtpim::workload::workload_to_toml(&original);
    let reparsed = parse_workload(&text).unwrap().workload;
    assert_eq!(original, reparsed);
}

#[test]
fn single_tenant_compare_degenerates_cleanly() {
    let workload = MultiTenantWorkload::new(vec![load_preset("DNN2").unwrap()]).unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let artifacts =
        report::compare(&workload, &chip, &power, &OptimizerConfig::default()).unwrap();
    let row = &artifacts.report.tenants[0];
    assert_eq!(row.tiles, 168);
    assert!(row.optimized_cycles <= row.baseline_cycles);
}

#[test]
fn chip_overhead_flag_raises_energy_only() {
    let workload = load_bundle("MT4").unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let base = report::baseline_report(&workload, &chip, &power, &CostConfig::default()).unwrap();
    let with = report::baseline_report(
        &workload,
        &chip,
        &power,
        &CostConfig {
            include_chip_overhead: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(with.total_energy_j > base.total_energy_j);
    assert_eq!(with.total_latency_s, base.total_latency_s);
}

#[test]
fn write_cost_knob_scales_write_cycles() {
    let workload = load_bundle("MT4").unwrap();
    let (chip, power) = chip_preset("chip1").unwrap();
    let base = report::baseline_report(&workload, &chip, &power, &CostConfig::default()).unwrap();
    let slow_writes = report::baseline_report(
        &workload,
        &chip,
        &power,
        &CostConfig {
            write_cycles_per_row: 4,
            ..Default::default()
        },
    )
    .unwrap();
    for (a, b) in base.tenants.iter().zip(&slow_writes.tenants) {
        assert!(b.cycles > a.cycles);
    }
}

#[test]
fn infeasible_workload_surfaces_minimums() {
    let doc = r#"
        [chip]
        tiles = 2
        imas_per_tile = 1
        arrays_per_ima = 2
        array_rows = 32
        array_cols = 32

        [[tenant]]
        preset = "DNN3"
        [[tenant]]
        preset = "DNN2"
        [[tenant]]
        preset = "DNN1"
    "#;
    let file = parse_workload(doc).unwrap();
    let (chip, power) = file.chip.unwrap().resolve().unwrap();
    match allocate_area(&file.workload, &chip, &power, &OptimizerConfig::default()) {
        Err(Error::InfeasibleWorkload { tiles, minimums }) => {
            assert_eq!(tiles, 2);
            assert_eq!(minimums.len(), 3);
            assert_eq!(minimums[0].0, "DNN3");
        }
        other => panic!("expected infeasible workload, got {other:?}"),
    }
}
