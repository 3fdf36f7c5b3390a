//! Weight-to-crossbar footprints and round-based deployment.
//!
//! An operator's weight matrix occupies `ceil(rows/array_rows) x
//! ceil(cols/array_cols)` crossbar arrays. Re-operators are packed into a
//! tenant's allocated area in write-and-compute rounds: each round programs
//! its arrays, then the round's members run as parallel pipeline stages, so
//! the round's compute latency is its slowest member.

use crate::error::{Error, Result};
use crate::hardware::ChipTopology;
use crate::reconstruct::{ReOpId, ReOperator};
use crate::workload::{LayerKind, LayerSpec};

/// Crossbar-array occupancy of one conv or fc operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    /// Weight-matrix rows: kernel^2 * in_channels for conv, in_features for fc.
    pub rows: u64,
    /// Cell columns: out_channels * cells_per_weight.
    pub cols: u64,
    pub row_slices: u64,
    pub col_slices: u64,
    pub arrays: u64,
}

/// Footprint of a layer, or `None` for pools (the dedicated pooling unit
/// occupies no crossbar area).
pub fn footprint(layer: &LayerSpec, chip: &ChipTopology) -> Option<Footprint> {
    let rows = match layer.kind {
        LayerKind::Conv => layer.kernel * layer.kernel * layer.in_channels,
        LayerKind::Fc => layer.in_channels,
        LayerKind::Pool => return None,
    };
    let cols = layer.out_channels * chip.cells_per_weight();
    let row_slices = rows.div_ceil(chip.array_rows);
    let col_slices = cols.div_ceil(chip.array_cols);
    Some(Footprint {
        rows,
        cols,
        row_slices,
        col_slices,
        arrays: row_slices * col_slices,
    })
}

/// One write-and-compute round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub members: Vec<ReOpId>,
    pub arrays_used: u64,
    pub write_cycles: u64,
    pub compute_cycles: u64,
}

/// The packing of a tenant's re-operators into its allocated area.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeploymentPlan {
    pub rounds: Vec<Round>,
    pub total_cycles: u64,
    /// Peak tiles touched by any single round.
    pub tiles_used: u64,
}

/// Tiles spanned by a given number of occupied arrays.
pub fn tiles_spanned(arrays_used: u64, chip: &ChipTopology) -> u64 {
    arrays_used.div_ceil(chip.arrays_per_tile())
}

/// First-fit-decreasing packing of re-operators into rounds of `area`
/// arrays. Ties are broken by id so identical inputs yield identical plans.
///
/// Per round, programming costs `arrays_used * array_rows *
/// write_cycles_per_row` cycles (one row per cycle by default) and compute
/// costs the maximum member latency.
pub fn naive_deploy(
    reops: &[ReOperator],
    area: u64,
    chip: &ChipTopology,
    write_cycles_per_row: u64,
) -> Result<DeploymentPlan> {
    if reops.is_empty() {
        return Ok(DeploymentPlan::default());
    }
    let mut order: Vec<usize> = (0..reops.len()).collect();
    order.sort_by(|&a, &b| {
        reops[b]
            .arrays
            .cmp(&reops[a].arrays)
            .then_with(|| reops[a].id.cmp(&reops[b].id))
    });

    struct Bin {
        members: Vec<usize>,
        free: u64,
    }
    let mut bins: Vec<Bin> = Vec::new();
    for idx in order {
        let op = &reops[idx];
        if op.arrays > area {
            return Err(Error::InfeasibleArea {
                op_id: op.id.to_string(),
                needed: op.arrays,
                available: area,
            });
        }
        match bins.iter_mut().find(|b| b.free >= op.arrays) {
            Some(bin) => {
                bin.members.push(idx);
                bin.free -= op.arrays;
            }
            None => bins.push(Bin {
                members: vec![idx],
                free: area - op.arrays,
            }),
        }
    }

    let mut rounds = Vec::with_capacity(bins.len());
    let mut total_cycles = 0u64;
    let mut tiles_used = 0u64;
    for bin in bins {
        let arrays_used: u64 = bin.members.iter().map(|&i| reops[i].arrays).sum();
        let write_cycles = arrays_used * chip.array_rows * write_cycles_per_row;
        let compute_cycles = bin
            .members
            .iter()
            .map(|&i| reops[i].compute_cycles)
            .max()
            .unwrap_or(0);
        total_cycles += write_cycles + compute_cycles;
        tiles_used = tiles_used.max(tiles_spanned(arrays_used, chip));
        rounds.push(Round {
            members: bin.members.iter().map(|&i| reops[i].id).collect(),
            arrays_used,
            write_cycles,
            compute_cycles,
        });
    }
    Ok(DeploymentPlan {
        rounds,
        total_cycles,
        tiles_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::chip_preset;
    use crate::reconstruct::{ReOpId, ReOperator};

    fn chip() -> ChipTopology {
        chip_preset("chip1").unwrap().0
    }

    fn conv_layer(kernel: u64, inp: u64, out: u64) -> LayerSpec {
        LayerSpec {
            kind: LayerKind::Conv,
            kernel,
            in_channels: inp,
            out_channels: out,
            stride: 1,
            repeat: 1,
        }
    }

    fn reop(layer: u32, arrays: u64, compute: u64) -> ReOperator {
        ReOperator {
            id: ReOpId {
                layer,
                replica: 0,
                slice: 0,
            },
            group: layer as usize,
            rows: arrays * 128,
            cols: 128,
            arrays,
            compute_cycles: compute,
        }
    }

    #[test]
    fn conv_footprint() {
        let fp = footprint(&conv_layer(3, 64, 64), &chip()).unwrap();
        assert_eq!(fp.rows, 576);
        assert_eq!(fp.cols, 512);
        assert_eq!(fp.row_slices, 5);
        assert_eq!(fp.col_slices, 4);
        assert_eq!(fp.arrays, 20);
    }

    #[test]
    fn minimal_conv_footprint() {
        let fp = footprint(&conv_layer(1, 1, 1), &chip()).unwrap();
        assert_eq!((fp.rows, fp.cols, fp.arrays), (1, 8, 1));
    }

    #[test]
    fn fc_footprint() {
        let fc = LayerSpec {
            kind: LayerKind::Fc,
            kernel: 1,
            in_channels: 512,
            out_channels: 100,
            stride: 1,
            repeat: 1,
        };
        let fp = footprint(&fc, &chip()).unwrap();
        assert_eq!(fp.rows, 512);
        assert_eq!(fp.cols, 800);
        assert_eq!(fp.arrays, 4 * 7);
    }

    #[test]
    fn pool_has_no_footprint() {
        let pool = LayerSpec {
            kind: LayerKind::Pool,
            kernel: 2,
            in_channels: 8,
            out_channels: 8,
            stride: 2,
            repeat: 1,
        };
        assert!(footprint(&pool, &chip()).is_none());
    }

    #[test]
    fn single_round_costs() {
        let plan = naive_deploy(&[reop(0, 20, 4100)], 20, &chip(), 1).unwrap();
        assert_eq!(plan.rounds.len(), 1);
        assert_eq!(plan.rounds[0].write_cycles, 2560);
        assert_eq!(plan.rounds[0].compute_cycles, 4100);
        assert_eq!(plan.total_cycles, 6660);
    }

    #[test]
    fn empty_reops() {
        let plan = naive_deploy(&[], 100, &chip(), 1).unwrap();
        assert_eq!(plan.rounds.len(), 0);
        assert_eq!(plan.total_cycles, 0);
        assert_eq!(plan.tiles_used, 0);
    }

    #[test]
    fn ffd_forces_separate_rounds() {
        let ops = [reop(0, 20, 100), reop(1, 20, 300)];
        let plan = naive_deploy(&ops, 20, &chip(), 1).unwrap();
        assert_eq!(plan.rounds.len(), 2);
        assert_eq!(plan.total_cycles, 2 * 2560 + 100 + 300);
    }

    #[test]
    fn oversized_reop_is_infeasible() {
        let err = naive_deploy(&[reop(0, 21, 1)], 20, &chip(), 1).unwrap_err();
        match err {
            Error::InfeasibleArea { needed, available, .. } => {
                assert_eq!((needed, available), (21, 20));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tiles_spanned_ceils() {
        let c = chip();
        assert_eq!(tiles_spanned(96, &c), 1);
        assert_eq!(tiles_spanned(0, &c), 0);
        assert_eq!(tiles_spanned(97, &c), 2);
    }

    #[test]
    fn packing_preserves_multiset_and_capacity() {
        let ops: Vec<ReOperator> = (0..17).map(|i| reop(i, (i as u64 % 7) + 1, 10)).collect();
        let plan = naive_deploy(&ops, 9, &chip(), 1).unwrap();
        let mut seen: Vec<ReOpId> = plan.rounds.iter().flat_map(|r| r.members.clone()).collect();
        seen.sort();
        let mut expect: Vec<ReOpId> = ops.iter().map(|o| o.id).collect();
        expect.sort();
        assert_eq!(seen, expect);
        for r in &plan.rounds {
            assert!(r.arrays_used <= 9);
        }
        assert!(plan.rounds.len() <= ops.len());
    }
}
