//! Group averages and report file emission.
//!
//! A finished sweep is written into an output directory as a fixed set of
//! files:
//!
//! * `rates.csv`: solved rate pair per completed scenario
//! * `redistribution_delta.csv`: per-category bill change, one column per scenario
//! * `redistribution_relative.csv`: same, relative to the flat bill
//! * `group_averages_<dims>.csv`: weighted group means, one file per grouping
//! * `ldc.csv`: load duration curve of the system load
//! * `failures.csv`: scenarios that could not be solved
//! * `manifest.json`: engine version, dataset hash, scenario echo, counts
//!
//! Emission is deterministic: the same results produce byte-identical files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classification::load_duration_curve;
use crate::dataset::{CategoryKey, Dataset};
use crate::scenario::{ScenarioDiagnostics, ScenarioSpec, SweepEntry};
use crate::solver::{RedistributionRow, TariffRates};
use crate::{Error, Result, ENGINE_VERSION};

/// Socio-technical dimension a grouping can aggregate over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupDim {
    Dwelling,
    Occupancy,
    Area,
    Income,
    Ev,
    Hp,
}

impl GroupDim {
    pub const ALL: [GroupDim; 6] = [
        GroupDim::Dwelling,
        GroupDim::Occupancy,
        GroupDim::Area,
        GroupDim::Income,
        GroupDim::Ev,
        GroupDim::Hp,
    ];

    /// Short name used in file names and on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            GroupDim::Dwelling => "dwelling",
            GroupDim::Occupancy => "occupancy",
            GroupDim::Area => "area",
            GroupDim::Income => "income",
            GroupDim::Ev => "ev",
            GroupDim::Hp => "hp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        GroupDim::ALL
            .into_iter()
            .find(|d| d.short_name() == s)
            .ok_or_else(|| Error::config(format!("unknown grouping dimension {s:?}")))
    }

    /// Label part of a category under this dimension, e.g. `Ap` or `EV1`.
    fn part(self, key: &CategoryKey) -> String {
        match self {
            GroupDim::Dwelling => key.dwelling.label_part().to_string(),
            GroupDim::Occupancy => key.occupancy.code().to_string(),
            GroupDim::Area => key.area.code().to_string(),
            GroupDim::Income => key.income.label_part().to_string(),
            GroupDim::Ev => format!("EV{}", u8::from(key.ev)),
            GroupDim::Hp => format!("HP{}", u8::from(key.hp)),
        }
    }

    /// Sort rank of a category under this dimension.
    fn rank(self, key: &CategoryKey) -> u8 {
        match self {
            GroupDim::Dwelling => key.dwelling as u8,
            GroupDim::Occupancy => key.occupancy as u8,
            GroupDim::Area => key.area as u8,
            GroupDim::Income => key.income as u8,
            GroupDim::Ev => u8::from(key.ev),
            GroupDim::Hp => u8::from(key.hp),
        }
    }
}

/// Whether group means weight categories by household count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    HouseholdCount,
    Unweighted,
}

/// A grouping: the dimensions to aggregate over plus the weighting mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupingSpec {
    pub dims: Vec<GroupDim>,
    pub weighting: Weighting,
}

impl GroupingSpec {
    pub fn new(dims: Vec<GroupDim>, weighting: Weighting) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::config("grouping needs at least one dimension"));
        }
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].contains(d) {
                return Err(Error::config(format!(
                    "duplicate grouping dimension {}",
                    d.short_name()
                )));
            }
        }
        Ok(GroupingSpec { dims, weighting })
    }

    /// File name this grouping is written to.
    pub fn file_name(&self) -> String {
        let dims: Vec<&str> = self.dims.iter().map(|d| d.short_name()).collect();
        let suffix = match self.weighting {
            Weighting::HouseholdCount => "",
            Weighting::Unweighted => "_unweighted",
        };
        format!("group_averages_{}{suffix}.csv", dims.join("_"))
    }

    fn label(&self, key: &CategoryKey) -> String {
        let parts: Vec<String> = self.dims.iter().map(|d| d.part(key)).collect();
        parts.join("/")
    }

    fn rank(&self, key: &CategoryKey) -> Vec<u8> {
        self.dims.iter().map(|d| d.rank(key)).collect()
    }
}

/// Mean bill change of one group of categories.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAverageRow {
    /// Group label, dimension parts joined by `/`, e.g. `Ap/A1`.
    pub group: String,
    /// Mean of `bill_design / bill_flat - 1` over the group.
    pub mean_relative_change: f64,
    /// Mean bill change in Øre per household and year.
    pub mean_delta_ore: f64,
    /// Households in the group, regardless of weighting.
    pub n_households: u64,
}

/// Averages `(delta, relative)` values over groups of categories.
///
/// With household-count weighting the mean of a group is the average over
/// its households; unweighted, every category counts once.
pub fn group_average_values(
    values: &[(CategoryKey, f64, f64)],
    counts: &BTreeMap<CategoryKey, u64>,
    grouping: &GroupingSpec,
) -> Result<Vec<GroupAverageRow>> {
    struct Acc {
        label: String,
        delta_sum: f64,
        relative_sum: f64,
        weight_sum: f64,
        n_households: u64,
    }
    let mut groups: BTreeMap<Vec<u8>, Acc> = BTreeMap::new();
    for &(key, delta, relative) in values {
        let n = *counts.get(&key).ok_or_else(|| Error::CategoryMismatch {
            label: key.label(),
            missing_in: "household counts".to_string(),
        })?;
        let weight = match grouping.weighting {
            Weighting::HouseholdCount => n as f64,
            Weighting::Unweighted => 1.0,
        };
        let acc = groups.entry(grouping.rank(&key)).or_insert_with(|| Acc {
            label: grouping.label(&key),
            delta_sum: 0.0,
            relative_sum: 0.0,
            weight_sum: 0.0,
            n_households: 0,
        });
        acc.delta_sum += weight * delta;
        acc.relative_sum += weight * relative;
        acc.weight_sum += weight;
        acc.n_households += n;
    }
    Ok(groups
        .into_values()
        .map(|acc| GroupAverageRow {
            group: acc.label,
            mean_relative_change: acc.relative_sum / acc.weight_sum,
            mean_delta_ore: acc.delta_sum / acc.weight_sum,
            n_households: acc.n_households,
        })
        .collect())
}

/// Averages redistribution rows over groups of categories.
pub fn group_average(
    rows: &[RedistributionRow],
    counts: &BTreeMap<CategoryKey, u64>,
    grouping: &GroupingSpec,
) -> Result<Vec<GroupAverageRow>> {
    let values: Vec<(CategoryKey, f64, f64)> = rows
        .iter()
        .map(|r| (r.key, r.delta_ore, r.relative_change))
        .collect();
    group_average_values(&values, counts, grouping)
}

/// Scenario echo in `manifest.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioManifest {
    pub name: String,
    pub spec: ScenarioSpec,
    pub status: ScenarioStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<TariffRates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ScenarioDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ScenarioError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioStatus {
    Completed,
    Failed,
}

/// Structured record of a failed scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioError {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category_id: String,
    pub n_households: u64,
}

/// Top level structure of `manifest.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportManifest {
    pub engine_version: String,
    pub dataset_sha256: String,
    pub hours: usize,
    pub year: i32,
    pub categories: Vec<CategoryCount>,
    pub scenarios: Vec<ScenarioManifest>,
    pub groupings: Vec<GroupingSpec>,
}

/// The groupings every sweep report includes by default.
pub fn default_groupings() -> Vec<GroupingSpec> {
    [
        vec![GroupDim::Dwelling, GroupDim::Area],
        vec![GroupDim::Ev, GroupDim::Hp],
        vec![GroupDim::Income, GroupDim::Occupancy],
    ]
    .into_iter()
    .map(|dims| GroupingSpec::new(dims, Weighting::HouseholdCount).unwrap())
    .collect()
}

fn csv_to_string<F>(build: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> std::result::Result<(), csv::Error>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    build(&mut writer).map_err(|e| Error::schema("report", e.to_string()))?;
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::schema("report", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("report CSV is UTF-8"))
}

fn fmt(value: f64) -> String {
    format!("{value}")
}

/// Writes all report files for a sweep into `out_dir`.
///
/// Failed scenarios appear in `failures.csv` and the manifest but contribute
/// no columns to the redistribution files. Re-running with identical results
/// overwrites every file with byte-identical content.
pub fn emit_reports(
    dataset: &Dataset,
    entries: &[SweepEntry],
    groupings: &[GroupingSpec],
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let counts = dataset.household_counts();

    let completed: Vec<_> = entries.iter().filter_map(|e| e.result()).collect();

    let rates = csv_to_string(|w| {
        w.write_record(["scenario", "base_ore_per_kwh", "peak_ore_per_kwh"])?;
        for r in &completed {
            w.write_record([
                r.spec.name.as_str(),
                &fmt(r.rates.base_rate),
                &fmt(r.rates.peak_rate),
            ])?;
        }
        Ok(())
    })?;
    std::fs::write(out_dir.join("rates.csv"), rates)?;

    let failures = csv_to_string(|w| {
        w.write_record(["scenario", "error_kind", "message"])?;
        for entry in entries {
            if let SweepEntry::Failed { spec, error } = entry {
                w.write_record([spec.name.as_str(), error.kind(), &error.to_string()])?;
            }
        }
        Ok(())
    })?;
    std::fs::write(out_dir.join("failures.csv"), failures)?;

    for (file, pick) in [
        ("redistribution_delta.csv", 0usize),
        ("redistribution_relative.csv", 1usize),
    ] {
        let table = csv_to_string(|w| {
            let mut header = vec!["category_id".to_string()];
            header.extend(completed.iter().map(|r| r.spec.name.clone()));
            w.write_record(&header)?;
            for (i, record) in dataset.categories().iter().enumerate() {
                let mut row = vec![record.key.label()];
                for r in &completed {
                    debug_assert_eq!(r.rows[i].key, record.key);
                    let value = match pick {
                        0 => r.rows[i].delta_ore,
                        _ => r.rows[i].relative_change,
                    };
                    row.push(fmt(value));
                }
                w.write_record(&row)?;
            }
            Ok(())
        })?;
        std::fs::write(out_dir.join(file), table)?;
    }

    for grouping in groupings {
        let table = csv_to_string(|w| {
            w.write_record([
                "scenario",
                "group",
                "mean_relative_change",
                "mean_delta_ore",
                "n_households",
            ])?;
            for r in &completed {
                let rows = group_average(&r.rows, &counts, grouping)
                    .expect("sweep rows cover all categories");
                for g in rows {
                    w.write_record([
                        r.spec.name.as_str(),
                        &g.group,
                        &fmt(g.mean_relative_change),
                        &fmt(g.mean_delta_ore),
                        &g.n_households.to_string(),
                    ])?;
                }
            }
            Ok(())
        })?;
        std::fs::write(out_dir.join(grouping.file_name()), table)?;
    }

    let ldc = load_duration_curve(dataset.system_load());
    let ldc_csv = csv_to_string(|w| {
        w.write_record(["rank", "load_mw"])?;
        for (i, mw) in ldc.values().iter().enumerate() {
            w.write_record([(i + 1).to_string(), fmt(*mw)])?;
        }
        Ok(())
    })?;
    std::fs::write(out_dir.join("ldc.csv"), ldc_csv)?;

    let manifest = ReportManifest {
        engine_version: ENGINE_VERSION.to_string(),
        dataset_sha256: dataset.sha256_hex(),
        hours: dataset.hours(),
        year: dataset.year(),
        categories: dataset
            .categories()
            .iter()
            .map(|c| CategoryCount {
                category_id: c.key.label(),
                n_households: c.n_households,
            })
            .collect(),
        scenarios: entries
            .iter()
            .map(|entry| match entry {
                SweepEntry::Completed(r) => ScenarioManifest {
                    name: r.spec.name.clone(),
                    spec: r.spec.clone(),
                    status: ScenarioStatus::Completed,
                    rates: Some(r.rates),
                    diagnostics: Some(r.diagnostics),
                    error: None,
                },
                SweepEntry::Failed { spec, error } => ScenarioManifest {
                    name: spec.name.clone(),
                    spec: spec.clone(),
                    status: ScenarioStatus::Failed,
                    rates: None,
                    diagnostics: None,
                    error: Some(ScenarioError {
                        kind: error.kind().to_string(),
                        message: error.to_string(),
                    }),
                },
            })
            .collect(),
        groupings: groupings.to_vec(),
    };
    let mut json =
        serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail");
    json.push('\n');
    std::fs::write(out_dir.join("manifest.json"), json)?;
    Ok(())
}

/// Redistribution results read back from a report directory.
#[derive(Debug)]
pub struct StoredResults {
    pub manifest: ReportManifest,
    /// Completed scenario names, in report column order.
    pub scenarios: Vec<String>,
    /// `(category, delta, relative)` triples per scenario, same order.
    pub values: Vec<Vec<(CategoryKey, f64, f64)>>,
}

impl StoredResults {
    /// Household counts recorded in the manifest.
    pub fn counts(&self) -> Result<BTreeMap<CategoryKey, u64>> {
        self.manifest
            .categories
            .iter()
            .map(|c| Ok((CategoryKey::parse_label(&c.category_id)?, c.n_households)))
            .collect()
    }
}

/// Scenario column names plus one value row per category.
type Matrix = (Vec<String>, Vec<(CategoryKey, Vec<f64>)>);

fn read_matrix(path: &Path) -> Result<Matrix> {
    if !path.is_file() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::schema(&file, e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| Error::schema(&file, e.to_string()))?
        .clone();
    if header.get(0) != Some("category_id") {
        return Err(Error::schema(&file, "first column must be category_id"));
    }
    let scenarios: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::schema(&file, e.to_string()))?;
        let key = CategoryKey::parse_label(&record[0])
            .map_err(|_| Error::schema(&file, format!("row {}: bad category_id", i + 1)))?;
        let values: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| {
                    Error::schema(&file, format!("row {}: bad number {cell:?}", i + 1))
                })
            })
            .collect::<Result<_>>()?;
        if values.len() != scenarios.len() {
            return Err(Error::schema(&file, format!("row {}: wrong width", i + 1)));
        }
        rows.push((key, values));
    }
    Ok((scenarios, rows))
}

/// Loads manifest and redistribution tables back from a report directory.
pub fn load_results(dir: &Path) -> Result<StoredResults> {
    let manifest_path = dir.join("manifest.json");
    if !manifest_path.is_file() {
        return Err(Error::MissingFile {
            path: manifest_path,
        });
    }
    let manifest: ReportManifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)
        .map_err(|e| Error::schema("manifest.json", e.to_string()))?;
    let (scenarios, deltas) = read_matrix(&dir.join("redistribution_delta.csv"))?;
    let (scenarios_rel, relatives) = read_matrix(&dir.join("redistribution_relative.csv"))?;
    if scenarios != scenarios_rel {
        return Err(Error::schema(
            "redistribution_relative.csv",
            "scenario columns differ from redistribution_delta.csv",
        ));
    }
    let mut values = vec![Vec::with_capacity(deltas.len()); scenarios.len()];
    for ((key, delta_row), (key_rel, rel_row)) in deltas.iter().zip(&relatives) {
        if key != key_rel {
            return Err(Error::schema(
                "redistribution_relative.csv",
                "category rows differ from redistribution_delta.csv",
            ));
        }
        for (s, (&delta, &rel)) in delta_row.iter().zip(rel_row).enumerate() {
            values[s].push((*key, delta, rel));
        }
    }
    Ok(StoredResults {
        manifest,
        scenarios,
        values,
    })
}

/// Computes one grouping over stored results and writes its report file.
///
/// Returns the path of the written file.
pub fn write_group_averages(
    stored: &StoredResults,
    grouping: &GroupingSpec,
    dir: &Path,
) -> Result<PathBuf> {
    let counts = stored.counts()?;
    let table = csv_to_string(|w| {
        w.write_record([
            "scenario",
            "group",
            "mean_relative_change",
            "mean_delta_ore",
            "n_households",
        ])?;
        for (name, values) in stored.scenarios.iter().zip(&stored.values) {
            let rows = group_average_values(values, &counts, grouping)
                .expect("stored rows cover all categories");
            for g in rows {
                w.write_record([
                    name.as_str(),
                    &g.group,
                    &fmt(g.mean_relative_change),
                    &fmt(g.mean_delta_ore),
                    &g.n_households.to_string(),
                ])?;
            }
        }
        Ok(())
    })?;
    let path = dir.join(grouping.file_name());
    std::fs::write(&path, table)?;
    Ok(path)
}
