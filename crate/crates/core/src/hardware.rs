//! Accelerator topology and power model.
//!
//! Area is counted in crossbar arrays; tenant regions are allocated in whole
//! tiles (a tile carries the shared peripherals, so power accounting is per
//! tile). The two presets mirror the ISAAC-style chips used throughout:
//! chip1 (168-12-8-128) and chip2 (256-12-12-128).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tile/IMA/array hierarchy plus array geometry and the clock period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipTopology {
    pub tiles: u64,
    pub imas_per_tile: u64,
    pub arrays_per_ima: u64,
    pub array_rows: u64,
    pub array_cols: u64,
    pub bits_per_cell: u32,
    pub weight_bits: u32,
    /// Clock period in nanoseconds (100 ns for the ISAAC pipeline).
    pub cycle_ns: f64,
}

impl ChipTopology {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tiles", self.tiles),
            ("imas_per_tile", self.imas_per_tile),
            ("arrays_per_ima", self.arrays_per_ima),
            ("array_rows", self.array_rows),
            ("array_cols", self.array_cols),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::validation("chip", format!("{name} must be >= 1")));
            }
        }
        if self.bits_per_cell == 0 || self.weight_bits == 0 {
            return Err(Error::validation("chip", "bit widths must be >= 1"));
        }
        if self.weight_bits % self.bits_per_cell != 0 {
            return Err(Error::validation(
                "chip",
                format!(
                    "weight_bits {} not divisible by bits_per_cell {}",
                    self.weight_bits, self.bits_per_cell
                ),
            ));
        }
        if !(self.cycle_ns.is_finite() && self.cycle_ns > 0.0) {
            return Err(Error::validation("chip", "cycle_ns must be positive"));
        }
        Ok(())
    }

    /// Total crossbar arrays on the chip.
    pub fn total_arrays(&self) -> u64 {
        self.tiles * self.imas_per_tile * self.arrays_per_ima
    }

    /// Arrays contained in one tile.
    pub fn arrays_per_tile(&self) -> u64 {
        self.imas_per_tile * self.arrays_per_ima
    }

    /// Memristor cells needed per weight (columns occupied by one weight).
    pub fn cells_per_weight(&self) -> u64 {
        u64::from(self.weight_bits / self.bits_per_cell)
    }
}

/// Per-tile power plus the chip-level overhead outside tiles.
///
/// The overhead (eDRAM, links, etc.) is recorded but excluded from default
/// energy accounting, which disregards idle/static components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub tile_power_w: f64,
    pub chip_overhead_w: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tile_power_w", self.tile_power_w),
            ("chip_overhead_w", self.chip_overhead_w),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(
                    "power",
                    format!("{name} must be finite and >= 0"),
                ));
            }
        }
        Ok(())
    }
}

/// ISAAC tile total: 330 mW.
pub const TILE_POWER_W: f64 = 0.330;
/// Chip total (65.8 W) minus 168 tiles at 330 mW.
pub const CHIP_OVERHEAD_W: f64 = 65.8 - 168.0 * TILE_POWER_W;
/// ISAAC pipeline clock period.
pub const CYCLE_NS: f64 = 100.0;

fn isaac_topology(tiles: u64, imas_per_tile: u64, arrays_per_ima: u64) -> ChipTopology {
    ChipTopology {
        tiles,
        imas_per_tile,
        arrays_per_ima,
        array_rows: 128,
        array_cols: 128,
        bits_per_cell: 2,
        weight_bits: 16,
        cycle_ns: CYCLE_NS,
    }
}

/// Named chip presets. chip3 appears in the source experiments but its
/// topology tuple was never published, so it is rejected explicitly.
pub fn chip_preset(name: &str) -> Result<(ChipTopology, PowerModel)> {
    let power = PowerModel {
        tile_power_w: TILE_POWER_W,
        chip_overhead_w: CHIP_OVERHEAD_W,
    };
    match name {
        "chip1" => Ok((isaac_topology(168, 12, 8), power)),
        "chip2" => Ok((isaac_topology(256, 12, 12), power)),
        other => Err(Error::UnknownChip(other.to_string())),
    }
}

/// Names accepted by [`chip_preset`].
pub const CHIP_PRESETS: [&str; 2] = ["chip1", "chip2"];
