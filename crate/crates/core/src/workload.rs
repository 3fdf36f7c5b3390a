//! Tenant DNN architectures: layer specs, validation, feature-map
//! propagation, and the TOML workload document.
//!
//! A tenant is an ordered list of conv/pool/fc layers. Convolutions use
//! "same" padding (spatial size changes only at pools and strided convs),
//! so derived feature-map sizes are recomputable from the input dimensions
//! alone. Repeated rows like `3x3,64(2)` expand at construction time; the
//! first instance takes the chained input channels, the rest map
//! out-to-out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Conv,
    Pool,
    Fc,
}

impl std::fmt::Display for LayerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LayerKind::Conv => write!(f, "conv"),
            LayerKind::Pool => write!(f, "pool"),
            LayerKind::Fc => write!(f, "fc"),
        }
    }
}

/// One validated layer. For fc layers `in_channels` holds the flattened
/// input feature count and kernel/stride are pinned to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub kernel: u64,
    #[serde(rename = "in")]
    pub in_channels: u64,
    #[serde(rename = "out")]
    pub out_channels: u64,
    pub stride: u64,
    pub repeat: u64,
}

/// A layer as written in a workload document or preset table, before
/// channel chaining has filled in the derivable fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRecord {
    pub kind: String,
    pub kernel: Option<u64>,
    #[serde(rename = "in")]
    pub in_channels: Option<u64>,
    #[serde(rename = "out")]
    pub out_channels: Option<u64>,
    pub stride: Option<u64>,
    pub repeat: Option<u64>,
}

impl LayerRecord {
    pub fn conv(kernel: u64, out: u64, repeat: u64) -> Self {
        LayerRecord {
            kind: "conv".into(),
            kernel: Some(kernel),
            out_channels: Some(out),
            repeat: Some(repeat),
            ..Default::default()
        }
    }

    /// The 2x2 stride-2 max-pool used by every preset table row.
    pub fn pool2() -> Self {
        LayerRecord {
            kind: "pool".into(),
            kernel: Some(2),
            stride: Some(2),
            ..Default::default()
        }
    }

    pub fn fc(out: u64, repeat: u64) -> Self {
        LayerRecord {
            kind: "fc".into(),
            out_channels: Some(out),
            repeat: Some(repeat),
            ..Default::default()
        }
    }
}

/// Output spatial extent of a layer, derived by propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureShape {
    pub out_h: u64,
    pub out_w: u64,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// One DNN tenant. Layers are stored fully expanded (`repeat == 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TenantSpec {
    pub name: String,
    pub input_height: u64,
    pub input_width: u64,
    pub input_channels: u64,
    pub layers: Vec<LayerSpec>,
}

impl TenantSpec {
    /// Build a tenant from declared rows, expanding repeats and chaining
    /// channels. Declared `in` fields are checked against the chain; omitted
    /// ones are derived (the fc input-feature count comes from the flattened
    /// map).
    pub fn build(
        name: impl Into<String>,
        input: (u64, u64, u64),
        rows: &[LayerRecord],
    ) -> Result<TenantSpec> {
        let name = name.into();
        let ctx = |msg: String| Error::validation(format!("tenant '{name}'"), msg);
        let (ih, iw, ic) = input;
        if ih == 0 || iw == 0 || ic == 0 {
            return Err(ctx(format!("input dimensions must be positive, got [{ih}, {iw}, {ic}]")));
        }
        if rows.is_empty() {
            return Err(ctx("at least one layer is required".into()));
        }

        let (mut h, mut w, mut c) = (ih, iw, ic);
        let mut layers = Vec::new();
        for (idx, row) in rows.iter().enumerate() {
            let field = |f: &str| format!("layer {idx} ({}) field '{f}'", row.kind);
            let kind = match row.kind.as_str() {
                "conv" => LayerKind::Conv,
                "pool" => LayerKind::Pool,
                "fc" => LayerKind::Fc,
                other => return Err(ctx(format!("layer {idx}: unknown kind '{other}'"))),
            };
            let repeat = row.repeat.unwrap_or(1);
            if repeat == 0 {
                return Err(ctx(format!("{}: repeat must be >= 1", field("repeat"))));
            }
            for rep in 0..repeat {
                match kind {
                    LayerKind::Conv => {
                        let kernel = row
                            .kernel
                            .ok_or_else(|| ctx(format!("{} is required", field("kernel"))))?;
                        let stride = row.stride.unwrap_or(1);
                        let out = row
                            .out_channels
                            .ok_or_else(|| ctx(format!("{} is required", field("out"))))?;
                        if kernel == 0 || stride == 0 || out == 0 {
                            return Err(ctx(format!("{}: nonpositive dimension", field("kernel/stride/out"))));
                        }
                        if rep == 0 {
                            if let Some(declared) = row.in_channels {
                                if declared != c {
                                    return Err(ctx(format!(
                                        "{}: channel mismatch, declared {declared} but previous layer provides {c}",
                                        field("in")
                                    )));
                                }
                            }
                        }
                        layers.push(LayerSpec {
                            kind,
                            kernel,
                            in_channels: c,
                            out_channels: out,
                            stride,
                            repeat: 1,
                        });
                        h = ceil_div(h, stride);
                        w = ceil_div(w, stride);
                        c = out;
                    }
                    LayerKind::Pool => {
                        let kernel = row.kernel.unwrap_or(2);
                        let stride = row.stride.unwrap_or(2);
                        if kernel == 0 || stride == 0 {
                            return Err(ctx(format!("{}: nonpositive dimension", field("kernel/stride"))));
                        }
                        for (f, declared) in [("in", row.in_channels), ("out", row.out_channels)] {
                            if let Some(d) = declared {
                                if d != c {
                                    return Err(ctx(format!(
                                        "{}: pool passes channels through, expected {c} got {d}",
                                        field(f)
                                    )));
                                }
                            }
                        }
                        layers.push(LayerSpec {
                            kind,
                            kernel,
                            in_channels: c,
                            out_channels: c,
                            stride,
                            repeat: 1,
                        });
                        h = ceil_div(h, stride);
                        w = ceil_div(w, stride);
                    }
                    LayerKind::Fc => {
                        if row.kernel.is_some_and(|k| k != 1) || row.stride.is_some_and(|s| s != 1) {
                            return Err(ctx(format!(
                                "{}: fc layers have kernel = 1 and stride = 1",
                                field("kernel/stride")
                            )));
                        }
                        let out = row
                            .out_channels
                            .ok_or_else(|| ctx(format!("{} is required", field("out"))))?;
                        if out == 0 {
                            return Err(ctx(format!("{}: nonpositive dimension", field("out"))));
                        }
                        let flat = h * w * c;
                        if rep == 0 {
                            if let Some(declared) = row.in_channels {
                                if declared != flat {
                                    return Err(ctx(format!(
                                        "{}: channel mismatch, declared {declared} but flattened input is {flat}",
                                        field("in")
                                    )));
                                }
                            }
                        }
                        layers.push(LayerSpec {
                            kind,
                            kernel: 1,
                            in_channels: flat,
                            out_channels: out,
                            stride: 1,
                            repeat: 1,
                        });
                        h = 1;
                        w = 1;
                        c = out;
                    }
                }
            }
        }
        Ok(TenantSpec {
            name,
            input_height: ih,
            input_width: iw,
            input_channels: ic,
            layers,
        })
    }

    /// Re-run structural validation on an already-built tenant. Used after
    /// deserialization, where the fields arrive fully populated.
    pub fn validate(&self) -> Result<()> {
        let rows: Vec<LayerRecord> = self
            .layers
            .iter()
            .map(|l| LayerRecord {
                kind: l.kind.to_string(),
                kernel: Some(l.kernel),
                in_channels: Some(l.in_channels),
                out_channels: Some(l.out_channels),
                stride: Some(l.stride),
                repeat: Some(l.repeat),
            })
            .collect();
        let rebuilt = TenantSpec::build(
            self.name.clone(),
            (self.input_height, self.input_width, self.input_channels),
            &rows,
        )?;
        if rebuilt != *self {
            return Err(Error::validation(
                format!("tenant '{}'", self.name),
                "layer list is not in expanded canonical form".to_string(),
            ));
        }
        Ok(())
    }

    /// Per-layer output spatial extents, in layer order.
    pub fn feature_maps(&self) -> Vec<FeatureShape> {
        let (mut h, mut w) = (self.input_height, self.input_width);
        self.layers
            .iter()
            .map(|l| {
                match l.kind {
                    LayerKind::Conv | LayerKind::Pool => {
                        h = ceil_div(h, l.stride);
                        w = ceil_div(w, l.stride);
                    }
                    LayerKind::Fc => {
                        h = 1;
                        w = 1;
                    }
                }
                FeatureShape { out_h: h, out_w: w }
            })
            .collect()
    }
}

/// An ordered set of tenants deployed together on one chip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTenantWorkload {
    pub tenants: Vec<TenantSpec>,
}

impl MultiTenantWorkload {
    pub fn new(tenants: Vec<TenantSpec>) -> Result<Self> {
        if tenants.is_empty() {
            return Err(Error::validation("workload", "at least one tenant is required"));
        }
        for i in 0..tenants.len() {
            for j in (i + 1)..tenants.len() {
                if tenants[i].name == tenants[j].name {
                    return Err(Error::validation(
                        "workload",
                        format!("duplicate tenant name '{}'", tenants[i].name),
                    ));
                }
            }
        }
        Ok(MultiTenantWorkload { tenants })
    }
}

// ---------------------------------------------------------------------------
// Workload document (TOML)
// ---------------------------------------------------------------------------

/// `[chip]` section: either a preset name or the full field set.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChipSection {
    pub preset: Option<String>,
    pub tiles: Option<u64>,
    pub imas_per_tile: Option<u64>,
    pub arrays_per_ima: Option<u64>,
    pub array_rows: Option<u64>,
    pub array_cols: Option<u64>,
    pub bits_per_cell: Option<u32>,
    pub weight_bits: Option<u32>,
    pub cycle_ns: Option<f64>,
    pub tile_power_mw: Option<f64>,
    pub chip_overhead_mw: Option<f64>,
}

impl ChipSection {
    pub fn resolve(&self) -> Result<(crate::hardware::ChipTopology, crate::hardware::PowerModel)> {
        if let Some(name) = &self.preset {
            let mut pair = crate::hardware::chip_preset(name)?;
            // Power fields may still override a preset.
            if let Some(mw) = self.tile_power_mw {
                pair.1.tile_power_w = mw / 1000.0;
            }
            if let Some(mw) = self.chip_overhead_mw {
                pair.1.chip_overhead_w = mw / 1000.0;
            }
            return Ok(pair);
        }
        let req = |name: &str, v: Option<u64>| {
            v.ok_or_else(|| Error::validation("chip", format!("missing field '{name}'")))
        };
        let chip = crate::hardware::ChipTopology {
            tiles: req("tiles", self.tiles)?,
            imas_per_tile: req("imas_per_tile", self.imas_per_tile)?,
            arrays_per_ima: req("arrays_per_ima", self.arrays_per_ima)?,
            array_rows: req("array_rows", self.array_rows)?,
            array_cols: req("array_cols", self.array_cols)?,
            bits_per_cell: self.bits_per_cell.unwrap_or(2),
            weight_bits: self.weight_bits.unwrap_or(16),
            cycle_ns: self.cycle_ns.unwrap_or(crate::hardware::CYCLE_NS),
        };
        chip.validate()?;
        let power = crate::hardware::PowerModel {
            tile_power_w: self.tile_power_mw.unwrap_or(crate::hardware::TILE_POWER_W * 1000.0) / 1000.0,
            chip_overhead_w: self.chip_overhead_mw.unwrap_or(0.0) / 1000.0,
        };
        power.validate()?;
        Ok((chip, power))
    }
}

/// `[optimizer]` section: raw optimizer knobs, all optional. Grids accept
/// numbers or strings (`"1/32"`, `"inf"`).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub eta: Option<f64>,
    pub delay_budget_s: Option<f64>,
    pub max_iterations: Option<u64>,
    pub alpha_grid: Option<Vec<toml::Value>>,
    pub beta_grid: Option<Vec<toml::Value>>,
    pub n_bits: Option<u32>,
    pub write_cycles_per_row: Option<u64>,
    pub include_chip_overhead: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TenantSection {
    preset: Option<String>,
    name: Option<String>,
    input: Option<[u64; 3]>,
    layers: Option<Vec<LayerRecord>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadDoc {
    chip: Option<ChipSection>,
    optimizer: Option<OptimizerSection>,
    #[serde(default)]
    tenant: Vec<TenantSection>,
}

/// A parsed workload document: tenants plus the optional chip and optimizer
/// sections for the CLI to layer under its flags.
#[derive(Debug)]
pub struct WorkloadFile {
    pub workload: MultiTenantWorkload,
    pub chip: Option<ChipSection>,
    pub optimizer: Option<OptimizerSection>,
}

/// Parse and validate a TOML workload document. Syntax errors carry the
/// offending line; semantic errors name the tenant and field.
pub fn parse_workload(document: &str) -> Result<WorkloadFile> {
    let doc: WorkloadDoc = toml::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.tenant.is_empty() {
        return Err(Error::validation("workload", "no [[tenant]] entries"));
    }
    let mut tenants = Vec::new();
    for (idx, sec) in doc.tenant.iter().enumerate() {
        let tenant = match (&sec.preset, &sec.layers) {
            (Some(preset), None) => {
                let mut t = crate::presets::load_preset(preset)?;
                if let Some(name) = &sec.name {
                    t.name = name.clone();
                }
                if let Some([h, w, c]) = sec.input {
                    // Rebuild with the overridden input so derived fc widths follow.
                    t = rebuild_with_input(&t, (h, w, c))?;
                }
                t
            }
            (None, Some(layers)) => {
                let name = sec
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("tenant{}", idx + 1));
                let input = sec.input.ok_or_else(|| {
                    Error::validation(format!("tenant '{name}'"), "inline tenants require 'input = [H, W, C]'")
                })?;
                TenantSpec::build(name, (input[0], input[1], input[2]), layers)?
            }
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    format!("tenant entry {}", idx + 1),
                    "specify either 'preset' or 'layers', not both",
                ))
            }
            (None, None) => {
                return Err(Error::validation(
                    format!("tenant entry {}", idx + 1),
                    "specify 'preset' or 'layers'",
                ))
            }
        };
        tenants.push(tenant);
    }
    Ok(WorkloadFile {
        workload: MultiTenantWorkload::new(tenants)?,
        chip: doc.chip,
        optimizer: doc.optimizer,
    })
}

/// Rebuild a tenant against a different input size, rederiving fc widths
/// from the new flattened map.
pub fn rebuild_with_input(tenant: &TenantSpec, input: (u64, u64, u64)) -> Result<TenantSpec> {
    let rows: Vec<LayerRecord> = tenant
        .layers
        .iter()
        .map(|l| LayerRecord {
            kind: l.kind.to_string(),
            kernel: Some(l.kernel),
            // in-features are rederived from the new input
            in_channels: None,
            out_channels: match l.kind {
                LayerKind::Pool => None,
                _ => Some(l.out_channels),
            },
            stride: Some(l.stride),
            repeat: Some(l.repeat),
        })
        .collect();
    TenantSpec::build(tenant.name.clone(), input, &rows)
}

/// Serialize a workload back into document form. Reparsing the output yields
/// a structurally equal workload.
pub fn workload_to_toml(workload: &MultiTenantWorkload) -> String {
    let mut out = String::new();
    for t in &workload.tenants {
        out.push_str("[[tenant]]\n");
        out.push_str(&format!("name = {:?}\n", t.name));
        out.push_str(&format!(
            "input = [{}, {}, {}]\n",
            t.input_height, t.input_width, t.input_channels
        ));
        out.push_str("layers = [\n");
        for l in &t.layers {
            out.push_str(&format!(
                "  {{ kind = \"{}\", kernel = {}, in = {}, out = {}, stride = {}, repeat = {} }},\n",
                l.kind, l.kernel, l.in_channels, l.out_channels, l.stride, l.repeat
            ));
        }
        out.push_str("]\n\n");
    }
    out
}
