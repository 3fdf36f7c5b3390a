//! Throughput benchmarks for the grid search and the full comparison
//! pipeline.
//!
//! Benchmark names carry the execution mode so the two build flavors can be
//! compared side by side:
//!
//! ```text
//! cargo bench -p mtpim                          # parallel (rayon)
//! cargo bench -p mtpim --no-default-features    # sequential
//! ```

use criterion::{criterion_group, criterion_main, Criterion};

use mtpim::allocator::OptimizerConfig;
use mtpim::profiler::CostConfig;
use mtpim::reconstruct::{processing_time, GridSpec};
use mtpim::report::compare;
use mtpim::{chip_preset, load_bundle, load_preset};

fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_grid_search(c: &mut Criterion) {
    let (chip, power) = chip_preset("chip1").unwrap();
    let tenant = load_preset("VGG16").unwrap();
    let grid = GridSpec::default();
    let cost = CostConfig::default();
    let area = 56 * chip.arrays_per_tile();
    c.bench_function(&format!("grid_search_vgg16_{}", mode()), |b| {
        b.iter(|| processing_time(&tenant, area, &grid, &chip, &power, &cost).unwrap())
    });
}

fn bench_compare_bundle(c: &mut Criterion) {
    let (chip, power) = chip_preset("chip1").unwrap();
    let workload = load_bundle("MT4").unwrap();
    let config = OptimizerConfig {
        max_iterations: 40,
        ..Default::default()
    };
    c.bench_function(&format!("compare_mt4_chip1_{}", mode()), |b| {
        b.iter(|| compare(&workload, &chip, &power, &config).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_grid_search, bench_compare_bundle
}
criterion_main!(benches);
