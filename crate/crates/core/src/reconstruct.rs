//! Fine-grained operator reconstruction: duplicate, split, and the
//! (alpha, beta) grid search.
//!
//! The duplicator scales every layer's classic replica count by a single
//! parameter alpha, preserving the inter-layer ratio. The splitter cuts
//! operators larger than beta arrays into row bands at integer multiples of
//! the crossbar row count; slices inherit the parent's latency since each
//! processes the same activations and partial sums merge in the existing
//! shift-and-add path. The grid search deploys every (alpha, beta)
//! combination and keeps the fastest.
//!
//! Every search also evaluates one implicit anchor: alpha = 1 with the split
//! threshold at the full allocated area. That point is the classic pipeline,
//! split only where an operator physically exceeds the area, so the search
//! can never lose to classic deployment at equal area and stays feasible
//! whenever classic deployment is.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::hardware::{ChipTopology, PowerModel};
use crate::mapping::{footprint, naive_deploy, DeploymentPlan, Footprint};
use crate::profiler::{
    classic_duplication, eval_latency, operator_cycles, profile_plan, CostConfig, ProfileResult,
};
use crate::workload::TenantSpec;

/// Maximum re-operator area in arrays, or no limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Beta {
    Finite(u64),
    Inf,
}

impl Beta {
    pub fn allows(&self, arrays: u64) -> bool {
        match self {
            Beta::Finite(b) => arrays <= *b,
            Beta::Inf => true,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Beta::Inf);
        }
        let v: u64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid beta '{s}' (expected integer or 'inf')")))?;
        if v == 0 {
            return Err(Error::Parse("beta must be >= 1".into()));
        }
        Ok(Beta::Finite(v))
    }
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// One point of the reconstruction search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionParams {
    pub alpha: f64,
    pub beta: Beta,
}

/// Identity of a re-operator: parent layer, replica, and slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReOpId {
    pub layer: u32,
    pub replica: u32,
    pub slice: u32,
}

impl fmt::Display for ReOpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}R{}S{}", self.layer, self.replica, self.slice)
    }
}

/// An operator after duplication and splitting, ready to deploy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReOperator {
    pub id: ReOpId,
    /// Duplication group: the parent layer index.
    pub group: usize,
    pub rows: u64,
    pub cols: u64,
    pub arrays: u64,
    /// Full pipeline latency of this re-operator (already through the
    /// latency equation; slices inherit the parent's value).
    pub compute_cycles: u64,
}

/// Per-layer replica counts at the given alpha: `max(1, round(alpha * D))`
/// where `D` is the classic duplication count. Pools never replicate.
pub fn duplicate(tenant: &TenantSpec, alpha: f64) -> Vec<u64> {
    (0..tenant.layers.len())
        .map(|i| {
            let base = classic_duplication(tenant, i);
            ((alpha * base as f64).round() as u64).max(1)
        })
        .collect()
}

/// Shape of one split slice: a contiguous band of whole crossbar rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceShape {
    pub rows: u64,
    pub cols: u64,
    pub arrays: u64,
}

/// Split a footprint into row-band slices of at most `beta` arrays. Bands
/// are integer multiples of the array row count; the remainder rows land in
/// the final slice. Sliced or not, the total rows and arrays are conserved.
pub fn split(fp: &Footprint, beta: Beta, chip: &ChipTopology) -> Result<Vec<SliceShape>> {
    if beta.allows(fp.arrays) {
        return Ok(vec![SliceShape {
            rows: fp.rows,
            cols: fp.cols,
            arrays: fp.arrays,
        }]);
    }
    let limit = match beta {
        Beta::Finite(b) => b,
        Beta::Inf => unreachable!("Inf allows every footprint"),
    };
    let band_arrays = fp.col_slices;
    let bands_per_slice = limit / band_arrays;
    if bands_per_slice == 0 {
        return Err(Error::InfeasibleBeta {
            beta: limit,
            band_arrays,
        });
    }
    let last_band_rows = fp.rows - (fp.row_slices - 1) * chip.array_rows;
    let mut slices = Vec::new();
    let mut band = 0;
    while band < fp.row_slices {
        let take = bands_per_slice.min(fp.row_slices - band);
        let includes_last = band + take == fp.row_slices;
        let rows = if includes_last {
            (take - 1) * chip.array_rows + last_band_rows
        } else {
            take * chip.array_rows
        };
        slices.push(SliceShape {
            rows,
            cols: fp.cols,
            arrays: take * band_arrays,
        });
        band += take;
    }
    Ok(slices)
}

/// Duplicate-and-split a tenant into re-operators at one (alpha, beta)
/// point. Conv compute cycles divide across the realized replica count of
/// each duplication group.
pub fn build_reoperators(
    tenant: &TenantSpec,
    chip: &ChipTopology,
    cost: &CostConfig,
    alpha: f64,
    beta: Beta,
) -> Result<Vec<ReOperator>> {
    let maps = tenant.feature_maps();
    let replicas = duplicate(tenant, alpha);
    let mut reops = Vec::new();
    for (idx, layer) in tenant.layers.iter().enumerate() {
        let Some(fp) = footprint(layer, chip) else {
            continue;
        };
        let pool_factor = classic_duplication(tenant, idx);
        let count = replicas[idx];
        let cycles = operator_cycles(layer.kind, maps[idx].out_h, maps[idx].out_w, count);
        let latency = eval_latency(cycles, cost.n_bits, pool_factor);
        let slices = split(&fp, beta, chip)?;
        for replica in 0..count {
            for (s, slice) in slices.iter().enumerate() {
                reops.push(ReOperator {
                    id: ReOpId {
                        layer: idx as u32,
                        replica: replica as u32,
                        slice: s as u32,
                    },
                    group: idx,
                    rows: slice.rows,
                    cols: slice.cols,
                    arrays: slice.arrays,
                    compute_cycles: latency,
                });
            }
        }
    }
    Ok(reops)
}

/// Deploy and profile a tenant at one grid point.
pub fn evaluate_point(
    tenant: &TenantSpec,
    area: u64,
    params: ReconstructionParams,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> Result<(DeploymentPlan, ProfileResult)> {
    let reops = build_reoperators(tenant, chip, cost, params.alpha, params.beta)?;
    let plan = naive_deploy(&reops, area, chip, cost.write_cycles_per_row)?;
    let profile = profile_plan(&plan, chip, power, cost);
    Ok((plan, profile))
}

/// The search grid. Defaults bracket the classic point (alpha = 1,
/// beta = inf): alphas are the powers of two down to 1/32 and betas the
/// powers of two up to 16384 arrays plus infinity, wide enough to split the
/// large fc operators of the preset networks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<Beta>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alphas: vec![1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0, 1.0],
            betas: (0..=14)
                .map(|p| Beta::Finite(1 << p))
                .chain([Beta::Inf])
                .collect(),
        }
    }
}

impl GridSpec {
    /// The degenerate grid holding only the classic point.
    pub fn classic_only() -> Self {
        GridSpec {
            alphas: vec![1.0],
            betas: vec![Beta::Inf],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.betas.is_empty() {
            return Err(Error::validation("grid", "alpha and beta grids must be nonempty"));
        }
        for &a in &self.alphas {
            if !(a.is_finite() && a > 0.0 && a <= 1.0) {
                return Err(Error::validation("grid", format!("alpha {a} outside (0, 1]")));
            }
        }
        if self.betas.iter().any(|b| matches!(b, Beta::Finite(0))) {
            return Err(Error::validation("grid", "beta must be >= 1"));
        }
        Ok(())
    }

    /// Parse an alpha value: decimal (`0.25`) or fraction (`1/4`).
    pub fn parse_alpha(s: &str) -> Result<f64> {
        let s = s.trim();
        let v = if let Some((num, den)) = s.split_once('/') {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid alpha '{s}'")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid alpha '{s}'")))?;
            num / den
        } else {
            s.parse()
                .map_err(|_| Error::Parse(format!("invalid alpha '{s}'")))?
        };
        if !(v.is_finite() && v > 0.0 && v <= 1.0) {
            return Err(Error::Parse(format!("alpha '{s}' outside (0, 1]")));
        }
        Ok(v)
    }

    /// Parse comma-separated grids as given on the command line.
    pub fn from_cli(alphas: Option<&str>, betas: Option<&str>) -> Result<Self> {
        let mut grid = GridSpec::default();
        if let Some(list) = alphas {
            grid.alphas = list
                .split(',')
                .map(Self::parse_alpha)
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(list) = betas {
            grid.betas = list.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
        }
        grid.validate()?;
        Ok(grid)
    }

    /// Interpret TOML grid entries, which may be numbers or strings.
    pub fn from_toml(
        alphas: Option<&[toml::Value]>,
        betas: Option<&[toml::Value]>,
    ) -> Result<Self> {
        let mut grid = GridSpec::default();
        if let Some(values) = alphas {
            grid.alphas = values
                .iter()
                .map(|v| match v {
                    toml::Value::Integer(i) => Self::parse_alpha(&i.to_string()),
                    toml::Value::Float(f) => Self::parse_alpha(&f.to_string()),
                    toml::Value::String(s) => Self::parse_alpha(s),
                    other => Err(Error::Parse(format!("invalid alpha entry {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(values) = betas {
            grid.betas = values
                .iter()
                .map(|v| match v {
                    toml::Value::Integer(i) => i.to_string().parse(),
                    toml::Value::String(s) => s.parse(),
                    other => Err(Error::Parse(format!("invalid beta entry {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
        }
        grid.validate()?;
        Ok(grid)
    }
}

/// One evaluated grid point; `cycles` is `None` when deployment was
/// infeasible at this point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluatedPoint {
    pub alpha: f64,
    pub beta: Beta,
    pub cycles: Option<u64>,
}

/// Outcome of the grid search for one tenant at one area.
#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub best_params: ReconstructionParams,
    pub best_plan: DeploymentPlan,
    pub best_profile: ProfileResult,
    pub evaluated: Vec<EvaluatedPoint>,
}

/// Grid-search the reconstruction space for the fastest deployment of
/// `tenant` into `area` arrays. All Cartesian grid points plus the classic
/// capacity anchor are evaluated; infeasible points are recorded and
/// skipped. Ties break toward the smallest alpha, then the largest beta.
pub fn processing_time(
    tenant: &TenantSpec,
    area: u64,
    grid: &GridSpec,
    chip: &ChipTopology,
    power: &PowerModel,
    cost: &CostConfig,
) -> Result<GridSearchResult> {
    grid.validate()?;
    if area == 0 {
        return Err(Error::InfeasibleTenantArea {
            tenant: tenant.name.clone(),
            area,
        });
    }
    let mut points: Vec<ReconstructionParams> = Vec::new();
    for &alpha in &grid.alphas {
        for &beta in &grid.betas {
            points.push(ReconstructionParams { alpha, beta });
        }
    }
    let anchor = ReconstructionParams {
        alpha: 1.0,
        beta: Beta::Finite(area),
    };
    if !points.iter().any(|p| *p == anchor) {
        points.push(anchor);
    }

    let outcomes = map_collect(&points, |&params| {
        match evaluate_point(tenant, area, params, chip, power, cost) {
            Ok(ok) => Ok(Some(ok)),
            Err(Error::InfeasibleArea { .. }) | Err(Error::InfeasibleBeta { .. }) => Ok(None),
            Err(other) => Err(other),
        }
    });

    let mut evaluated = Vec::with_capacity(points.len());
    let mut best: Option<(usize, u64)> = None;
    let mut results: Vec<Option<(DeploymentPlan, ProfileResult)>> = Vec::with_capacity(points.len());
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        let cycles = outcome.as_ref().map(|(plan, _)| plan.total_cycles);
        evaluated.push(EvaluatedPoint {
            alpha: points[i].alpha,
            beta: points[i].beta,
            cycles,
        });
        if let Some(c) = cycles {
            let better = match best {
                None => true,
                Some((bi, bc)) => {
                    c < bc
                        || (c == bc
                            && (points[i].alpha < points[bi].alpha
                                || (points[i].alpha == points[bi].alpha
                                    && points[i].beta > points[bi].beta)))
                }
            };
            if better {
                best = Some((i, c));
            }
        }
        results.push(outcome);
    }

    let Some((bi, _)) = best else {
        return Err(Error::InfeasibleTenantArea {
            tenant: tenant.name.clone(),
            area,
        });
    };
    let (best_plan, best_profile) = results[bi].take().expect("best point was feasible");
    Ok(GridSearchResult {
        best_params: points[bi],
        best_plan,
        best_profile,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::chip_preset;
    use crate::workload::{LayerKind, LayerRecord, LayerSpec};

    fn chip() -> ChipTopology {
        chip_preset("chip1").unwrap().0
    }

    fn fp(rows: u64, cols: u64) -> Footprint {
        let c = chip();
        Footprint {
            rows,
            cols,
            row_slices: rows.div_ceil(c.array_rows),
            col_slices: cols.div_ceil(c.array_cols),
            arrays: rows.div_ceil(c.array_rows) * cols.div_ceil(c.array_cols),
        }
    }

    #[test]
    fn beta_ordering_and_display() {
        assert!(Beta::Finite(4) < Beta::Finite(8));
        assert!(Beta::Finite(u64::MAX) < Beta::Inf);
        assert_eq!(Beta::Inf.to_string(), "inf");
        assert_eq!("inf".parse::<Beta>().unwrap(), Beta::Inf);
        assert_eq!("16".parse::<Beta>().unwrap(), Beta::Finite(16));
        assert!("0".parse::<Beta>().is_err());
    }

    #[test]
    fn duplicate_identity_at_one() {
        let t = crate::presets::load_preset("VGG16").unwrap();
        let base: Vec<u64> = (0..t.layers.len())
            .map(|i| classic_duplication(&t, i))
            .collect();
        assert_eq!(duplicate(&t, 1.0), base);
    }

    #[test]
    fn duplicate_halves_and_floors() {
        let rows = vec![
            LayerRecord::conv(3, 4, 1),
            LayerRecord::pool2(),
            LayerRecord::conv(3, 4, 1),
            LayerRecord::pool2(),
            LayerRecord::conv(3, 4, 1),
            LayerRecord::pool2(),
            LayerRecord::conv(3, 4, 1),
            LayerRecord::pool2(),
            LayerRecord::conv(3, 4, 1),
            LayerRecord::pool2(),
        ];
        let t = crate::workload::TenantSpec::build("t", (32, 32, 3), &rows).unwrap();
        let conv_counts = |alpha: f64| -> Vec<u64> {
            duplicate(&t, alpha)
                .into_iter()
                .zip(&t.layers)
                .filter(|(_, l)| l.kind == LayerKind::Conv)
                .map(|(d, _)| d)
                .collect()
        };
        assert_eq!(conv_counts(1.0), vec![32, 16, 8, 4, 2]);
        assert_eq!(conv_counts(0.5), vec![16, 8, 4, 2, 1]);
        assert_eq!(conv_counts(1.0 / 32.0), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn duplicate_monotone_in_alpha() {
        let t = crate::presets::load_preset("DNN1").unwrap();
        let alphas = [0.03125, 0.0625, 0.125, 0.25, 0.5, 0.7, 1.0];
        for w in alphas.windows(2) {
            let lo = duplicate(&t, w[0]);
            let hi = duplicate(&t, w[1]);
            for (a, b) in lo.iter().zip(&hi) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn split_bands_20_arrays_at_beta_8() {
        let parent = fp(576, 512); // 5 x 4 slices
        let slices = split(&parent, Beta::Finite(8), &chip()).unwrap();
        let arrays: Vec<u64> = slices.iter().map(|s| s.arrays).collect();
        assert_eq!(arrays, vec![8, 8, 4]);
        let rows: Vec<u64> = slices.iter().map(|s| s.rows).collect();
        assert_eq!(rows, vec![256, 256, 64]);
        assert_eq!(rows.iter().sum::<u64>(), parent.rows);
        assert_eq!(arrays.iter().sum::<u64>(), parent.arrays);
    }

    #[test]
    fn split_identity_cases() {
        let parent = fp(576, 512);
        let whole = split(&parent, Beta::Inf, &chip()).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].arrays, parent.arrays);

        let small = fp(128, 512); // exactly 4 arrays
        let at_threshold = split(&small, Beta::Finite(4), &chip()).unwrap();
        assert_eq!(at_threshold.len(), 1);
    }

    #[test]
    fn split_rejects_indivisible_beta() {
        let parent = fp(576, 512); // band spans 4 arrays
        let err = split(&parent, Beta::Finite(3), &chip()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBeta { band_arrays: 4, .. }));
    }

    #[test]
    fn split_conserves_rows_and_arrays() {
        let c = chip();
        for rows in [1u64, 100, 128, 129, 640, 12544] {
            for cols in [8u64, 128, 500, 4096] {
                let parent = fp(rows, cols);
                for beta in [1, 2, 5, 8, 32, 256, 1024] {
                    match split(&parent, Beta::Finite(beta), &c) {
                        Ok(slices) => {
                            assert_eq!(slices.iter().map(|s| s.rows).sum::<u64>(), parent.rows);
                            assert_eq!(slices.iter().map(|s| s.arrays).sum::<u64>(), parent.arrays);
                            for s in &slices {
                                assert!(s.arrays <= beta);
                            }
                        }
                        Err(Error::InfeasibleBeta { band_arrays, .. }) => {
                            assert!(band_arrays > beta);
                        }
                        Err(other) => panic!("unexpected error {other:?}"),
                    }
                }
            }
        }
    }

    fn tiny_tenant() -> TenantSpec {
        let rows = vec![
            LayerRecord::conv(3, 8, 1),
            LayerRecord::pool2(),
            LayerRecord::conv(3, 8, 1),
            LayerRecord::fc(10, 1),
        ];
        TenantSpec::build("tiny", (8, 8, 3), &rows).unwrap()
    }

    #[test]
    fn reoperators_share_group_and_latency() {
        let t = tiny_tenant();
        let cost = CostConfig::default();
        let reops = build_reoperators(&t, &chip(), &cost, 1.0, Beta::Inf).unwrap();
        // conv(8x8 out, dup 2) -> 2 replicas; conv(4x4, dup 1); fc
        let groups: Vec<usize> = reops.iter().map(|r| r.group).collect();
        assert_eq!(groups, vec![0, 0, 2, 3]);
        assert_eq!(reops[0].compute_cycles, reops[1].compute_cycles);
        // replica count divides conv cycles: ceil(64/2) = 32, N_p = 2
        assert_eq!(reops[0].compute_cycles, eval_latency(32, 16, 2));
    }

    #[test]
    fn grid_search_degenerate_single_point() {
        let t = tiny_tenant();
        let (chip, power) = chip_preset("chip1").unwrap();
        let grid = GridSpec {
            alphas: vec![1.0],
            betas: vec![Beta::Inf],
        };
        let r = processing_time(&t, 96, &grid, &chip, &power, &CostConfig::default()).unwrap();
        let single = evaluate_point(
            &t,
            96,
            ReconstructionParams { alpha: 1.0, beta: Beta::Inf },
            &chip,
            &power,
            &CostConfig::default(),
        )
        .unwrap();
        assert_eq!(r.best_profile.cycles, single.1.cycles);
    }

    #[test]
    fn grid_search_never_loses_to_classic() {
        let t = tiny_tenant();
        let (chip, power) = chip_preset("chip1").unwrap();
        let grid = GridSpec::default();
        let r = processing_time(&t, 96, &grid, &chip, &power, &CostConfig::default()).unwrap();
        let classic = evaluate_point(
            &t,
            96,
            ReconstructionParams { alpha: 1.0, beta: Beta::Inf },
            &chip,
            &power,
            &CostConfig::default(),
        )
        .unwrap();
        assert!(r.best_profile.cycles <= classic.1.cycles);
    }

    #[test]
    fn grid_search_matches_exhaustive_min() {
        let t = tiny_tenant();
        let (chip, power) = chip_preset("chip1").unwrap();
        let grid = GridSpec {
            alphas: vec![0.5, 1.0],
            betas: vec![Beta::Finite(1), Beta::Inf],
        };
        let r = processing_time(&t, 96, &grid, &chip, &power, &CostConfig::default()).unwrap();
        let min = r
            .evaluated
            .iter()
            .filter_map(|p| p.cycles)
            .min()
            .unwrap();
        assert_eq!(r.best_profile.cycles, min);
        assert_eq!(
            r.best_profile.cycles,
            r.evaluated
                .iter()
                .find(|p| (p.alpha, p.beta) == (r.best_params.alpha, r.best_params.beta))
                .unwrap()
                .cycles
                .unwrap()
        );
    }

    #[test]
    fn all_points_infeasible_errors() {
        let t = tiny_tenant();
        let (chip, power) = chip_preset("chip1").unwrap();
        let grid = GridSpec::classic_only();
        // conv1 at dup 2 needs 2 arrays minimum; area 1 cannot hold the
        // 2-array fc... the largest re-op here is fc 72->10 = 1x1. Use a
        // tenant whose smallest piece exceeds the area instead.
        let wide = TenantSpec::build(
            "wide",
            (8, 8, 3),
            &[LayerRecord::fc(4096, 1)],
        )
        .unwrap();
        let err = processing_time(&wide, 2, &grid, &chip, &power, &CostConfig::default());
        assert!(matches!(err, Err(Error::InfeasibleTenantArea { .. })), "{err:?}");
        // the same tenant fits once the area admits one column band
        let _ = processing_time(&wide, 256, &grid, &chip, &power, &CostConfig::default()).unwrap();
        let _ = t;
    }

    #[test]
    fn tie_break_prefers_small_alpha_then_large_beta() {
        // A tenant with no pools: duplication is 1 at every alpha, so all
        // alphas give identical cycles and the tie-break decides.
        let t = TenantSpec::build(
            "flat",
            (4, 4, 1),
            &[LayerRecord::conv(1, 1, 1), LayerRecord::fc(4, 1)],
        )
        .unwrap();
        let (chip, power) = chip_preset("chip1").unwrap();
        let grid = GridSpec {
            alphas: vec![0.25, 0.5, 1.0],
            betas: vec![Beta::Finite(64), Beta::Inf],
        };
        let r = processing_time(&t, 96, &grid, &chip, &power, &CostConfig::default()).unwrap();
        assert_eq!(r.best_params.alpha, 0.25);
        assert_eq!(r.best_params.beta, Beta::Inf);
    }

    #[test]
    fn grid_parsing() {
        let g = GridSpec::from_cli(Some("1/32,0.5,1"), Some("1,8,inf")).unwrap();
        assert_eq!(g.alphas, vec![1.0 / 32.0, 0.5, 1.0]);
        assert_eq!(g.betas, vec![Beta::Finite(1), Beta::Finite(8), Beta::Inf]);
        assert!(GridSpec::from_cli(Some("0"), None).is_err());
        assert!(GridSpec::from_cli(Some("2.0"), None).is_err());
        assert!(GridSpec::from_cli(None, Some("nope")).is_err());
    }
}
