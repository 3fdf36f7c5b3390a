//! Built-in network and bundle presets.
//!
//! Eight base networks of varying depth (DNN1-DNN4 and the VGG family) and
//! eight multi-tenant bundles composed from them. The shallow DNN1-DNN3
//! carry a small fc-100 head and default to 32x32x3 inputs; DNN4 and the
//! VGGs carry the fc-4096/fc-1000 tail and default to 224x224x3. Inputs are
//! overridable in the workload document.

use crate::error::{Error, Result};
use crate::workload::{LayerRecord, MultiTenantWorkload, TenantSpec};

pub const NETWORK_PRESETS: [&str; 8] = [
    "DNN1", "DNN2", "DNN3", "DNN4", "VGG11", "VGG13", "VGG16", "VGG19",
];

pub const BUNDLE_PRESETS: [&str; 8] = ["MT1", "MT2", "MT3", "MT4", "MT5", "MT6", "MT7", "MT8"];

const CIFAR_INPUT: (u64, u64, u64) = (32, 32, 3);
const IMAGENET_INPUT: (u64, u64, u64) = (224, 224, 3);

fn conv(kernel: u64, out: u64, repeat: u64) -> LayerRecord {
    LayerRecord::conv(kernel, out, repeat)
}

fn pool() -> LayerRecord {
    LayerRecord::pool2()
}

/// fc-512(2) + fc-100, shared by DNN1-DNN3.
fn small_fc_tail(rows: &mut Vec<LayerRecord>) {
    rows.push(LayerRecord::fc(512, 2));
    rows.push(LayerRecord::fc(100, 1));
}

/// fc-4096(2) + fc-1000, shared by DNN4 and the VGGs.
fn large_fc_tail(rows: &mut Vec<LayerRecord>) {
    rows.push(LayerRecord::fc(4096, 2));
    rows.push(LayerRecord::fc(1000, 1));
}

fn preset_rows(name: &str) -> Option<(Vec<LayerRecord>, (u64, u64, u64))> {
    let mut rows = Vec::new();
    let input = match name {
        "DNN1" => {
            rows.extend([
                conv(3, 64, 1),
                pool(),
                conv(3, 128, 1),
                pool(),
                conv(3, 256, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
            ]);
            small_fc_tail(&mut rows);
            CIFAR_INPUT
        }
        "DNN2" => {
            rows.extend([
                conv(7, 96, 1),
                pool(),
                conv(3, 256, 1),
                pool(),
                conv(3, 512, 1),
                pool(),
                conv(3, 512, 1),
                pool(),
            ]);
            small_fc_tail(&mut rows);
            CIFAR_INPUT
        }
        "DNN3" => {
            rows.extend([
                conv(7, 16, 1),
                pool(),
                conv(3, 48, 2),
                pool(),
                conv(3, 64, 2),
                pool(),
            ]);
            small_fc_tail(&mut rows);
            CIFAR_INPUT
        }
        "DNN4" => {
            rows.extend([
                conv(7, 16, 1),
                pool(),
                conv(3, 48, 5),
                pool(),
                conv(3, 64, 5),
                pool(),
                conv(3, 64, 5),
                pool(),
            ]);
            large_fc_tail(&mut rows);
            IMAGENET_INPUT
        }
        "VGG11" => {
            rows.extend([
                conv(3, 64, 1),
                pool(),
                conv(3, 128, 1),
                pool(),
                conv(3, 256, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
            ]);
            large_fc_tail(&mut rows);
            IMAGENET_INPUT
        }
        "VGG13" => {
            rows.extend([
                conv(3, 64, 2),
                pool(),
                conv(3, 128, 2),
                pool(),
                conv(3, 256, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
                conv(3, 512, 2),
                pool(),
            ]);
            large_fc_tail(&mut rows);
            IMAGENET_INPUT
        }
        // The source table lists blocks 4 and 5 of VGG16 as 512(2) + 256(1);
        // each listed row is taken literally, in order.
        "VGG16" => {
            rows.extend([
                conv(3, 64, 2),
                pool(),
                conv(3, 128, 2),
                pool(),
                conv(3, 256, 3),
                pool(),
                conv(3, 512, 2),
                conv(3, 256, 1),
                pool(),
                conv(3, 512, 2),
                conv(3, 256, 1),
                pool(),
            ]);
            large_fc_tail(&mut rows);
            IMAGENET_INPUT
        }
        "VGG19" => {
            rows.extend([
                conv(3, 64, 2),
                pool(),
                conv(3, 128, 2),
                pool(),
                conv(3, 256, 4),
                pool(),
                conv(3, 512, 4),
                pool(),
                conv(3, 512, 4),
                pool(),
            ]);
            large_fc_tail(&mut rows);
            IMAGENET_INPUT
        }
        _ => return None,
    };
    Some((rows, input))
}

/// Load one of the eight built-in network presets.
pub fn load_preset(name: &str) -> Result<TenantSpec> {
    let canonical = name.to_ascii_uppercase();
    let (rows, input) =
        preset_rows(&canonical).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    TenantSpec::build(canonical, input, &rows)
}

/// Load one of the eight multi-tenant bundles.
pub fn load_bundle(name: &str) -> Result<MultiTenantWorkload> {
    let members: &[&str] = match name.to_ascii_uppercase().as_str() {
        "MT1" => &["DNN4", "VGG11", "VGG16"],
        "MT2" => &["VGG13", "VGG16", "VGG19"],
        "MT3" => &["VGG11", "VGG13", "VGG19"],
        "MT4" => &["DNN1", "DNN2", "DNN3"],
        "MT5" => &["DNN2", "DNN3", "DNN4"],
        "MT6" => &["DNN1", "DNN3", "VGG16", "VGG19"],
        "MT7" => &["VGG11", "VGG13", "VGG16", "VGG19"],
        "MT8" => &["DNN1", "VGG11", "VGG13", "VGG16"],
        _ => return Err(Error::UnknownBundle(name.to_string())),
    };
    let tenants = members
        .iter()
        .map(|m| load_preset(m))
        .collect::<Result<Vec<_>>>()?;
    MultiTenantWorkload::new(tenants)
}
