//! Scenario runs: one design end to end, sweeps, and recovery-share
//! sensitivity tables.
//!
//! A scenario couples a tariff design with a solver configuration and the
//! flat reference level. Running it classifies every category, solves the
//! revenue-neutral rates and reports the per-category redistribution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classification::{classify_all, classify_all_seq, peak_hours_for, DesignSpec};
use crate::dataset::{AreaBand, Dataset, DwellingType};
use crate::exec;
use crate::solver::{
    annual_bill, redistribution, revenue_target, solve_peak_tariff, RedistributionRow,
    SolverConfig, TariffRates,
};
use crate::{Error, Result};

/// One fully specified scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Unique scenario name used in report columns and rows.
    pub name: String,
    pub design: DesignSpec,
    pub solver: SolverConfig,
    /// Flat reference tariff the revenue target is derived from, Øre per kWh.
    pub gt_flat: f64,
}

impl ScenarioSpec {
    /// Builds a spec with the canonical name for its design.
    pub fn named(design: DesignSpec, solver: SolverConfig, gt_flat: f64) -> Self {
        ScenarioSpec {
            name: scenario_name(&design),
            design,
            solver,
            gt_flat,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::config("scenario name must not be empty"));
        }
        self.design.validate()?;
        self.solver.validate()?;
        if !(self.gt_flat.is_finite() && self.gt_flat > 0.0) {
            return Err(Error::config(format!(
                "gt_flat must be positive, got {}",
                self.gt_flat
            )));
        }
        Ok(())
    }
}

/// Formats a number with the shortest representation, e.g. `2`, `1.5`.
fn compact(value: f64) -> String {
    let rounded = (value * 1e10).round() / 1e10;
    format!("{rounded}")
}

/// Canonical scenario name of a design, e.g. `IPP;2kWh` or `DCIPP;(2kWh,5%)`.
pub fn scenario_name(design: &DesignSpec) -> String {
    match *design {
        DesignSpec::Flat => "Flat".to_string(),
        DesignSpec::Tou { .. } => "TOU".to_string(),
        DesignSpec::Ipp { threshold_kwh } => format!("IPP;{}kWh", compact(threshold_kwh)),
        DesignSpec::Dcpp { trigger_fraction } => {
            format!("DCPP;{}%", compact(trigger_fraction * 100.0))
        }
        DesignSpec::Dcipp {
            threshold_kwh,
            trigger_fraction,
        } => format!(
            "DCIPP;({}kWh,{}%)",
            compact(threshold_kwh),
            compact(trigger_fraction * 100.0)
        ),
    }
}

/// Aggregate quantities of a solved scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDiagnostics {
    /// Count-weighted peak consumption over all households, kWh.
    pub q_peak_total_kwh: f64,
    /// Count-weighted base consumption over all households, kWh.
    pub q_base_total_kwh: f64,
    /// Size of the shared peak hour set, where the design uses one.
    pub peak_hour_count: Option<usize>,
}

/// Outcome of one scenario run.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub rates: TariffRates,
    /// Per-category redistribution rows in canonical key order.
    pub rows: Vec<RedistributionRow>,
    pub diagnostics: ScenarioDiagnostics,
}

/// Runs a single scenario on a dataset.
///
/// A `Flat` design is solved with full recovery by definition, so its rates
/// equal the anchor and every delta is zero.
pub fn run_scenario(dataset: &Dataset, spec: &ScenarioSpec) -> Result<ScenarioResult> {
    run_impl(dataset, spec, true)
}

fn run_impl(dataset: &Dataset, spec: &ScenarioSpec, parallel: bool) -> Result<ScenarioResult> {
    spec.validate()?;
    let solver = if matches!(spec.design, DesignSpec::Flat) {
        SolverConfig {
            gt_base: spec.solver.gt_base,
            f_recov: 1.0,
        }
    } else {
        spec.solver
    };
    let classes = if parallel {
        classify_all(dataset, &spec.design)?
    } else {
        classify_all_seq(dataset, &spec.design)?
    };
    let counts = dataset.household_counts();
    let target = revenue_target(dataset, spec.gt_flat)?;
    let rates = solve_peak_tariff(&classes, &counts, &solver, &target)?;
    let rows = redistribution(&classes, &rates, spec.gt_flat);
    let peak_hour_count = peak_hours_for(dataset, &spec.design)?.map(|set| set.count());
    let mut q_peak_total_kwh = 0.0;
    let mut q_base_total_kwh = 0.0;
    for c in classes.values() {
        let n = counts[&c.key] as f64;
        q_peak_total_kwh += n * c.q_peak_kwh;
        q_base_total_kwh += n * c.q_base_kwh;
    }
    Ok(ScenarioResult {
        spec: spec.clone(),
        rates,
        rows,
        diagnostics: ScenarioDiagnostics {
            q_peak_total_kwh,
            q_base_total_kwh,
            peak_hour_count,
        },
    })
}

/// One sweep slot: either a completed scenario or its error.
#[derive(Debug)]
pub enum SweepEntry {
    Completed(ScenarioResult),
    Failed { spec: ScenarioSpec, error: Error },
}

impl SweepEntry {
    pub fn spec(&self) -> &ScenarioSpec {
        match self {
            SweepEntry::Completed(result) => &result.spec,
            SweepEntry::Failed { spec, .. } => spec,
        }
    }

    pub fn name(&self) -> &str {
        &self.spec().name
    }

    pub fn result(&self) -> Option<&ScenarioResult> {
        match self {
            SweepEntry::Completed(result) => Some(result),
            SweepEntry::Failed { .. } => None,
        }
    }
}

/// Runs a list of scenarios, keeping results in input order.
///
/// A failing scenario does not abort the sweep; its error is captured in the
/// corresponding entry. Names must be unique because reports key on them.
pub fn sweep(dataset: &Dataset, specs: &[ScenarioSpec]) -> Result<Vec<SweepEntry>> {
    sweep_impl(dataset, specs, true)
}

/// Sequential twin of [`sweep`] for benchmarks and determinism tests.
pub fn sweep_seq(dataset: &Dataset, specs: &[ScenarioSpec]) -> Result<Vec<SweepEntry>> {
    sweep_impl(dataset, specs, false)
}

fn sweep_impl(
    dataset: &Dataset,
    specs: &[ScenarioSpec],
    parallel: bool,
) -> Result<Vec<SweepEntry>> {
    if specs.is_empty() {
        return Err(Error::config("sweep contains no scenarios"));
    }
    for (i, spec) in specs.iter().enumerate() {
        if spec.name.trim().is_empty() {
            return Err(Error::config(format!("scenario {i} has an empty name")));
        }
        if specs[..i].iter().any(|other| other.name == spec.name) {
            return Err(Error::config(format!(
                "duplicate scenario name {:?}",
                spec.name
            )));
        }
    }
    let run = |spec: &ScenarioSpec| match run_impl(dataset, spec, parallel) {
        Ok(result) => SweepEntry::Completed(result),
        Err(error) => SweepEntry::Failed {
            spec: spec.clone(),
            error,
        },
    };
    let entries = if parallel {
        exec::map_ordered(specs, run)
    } else {
        exec::map_ordered_seq(specs, run)
    };
    Ok(entries)
}

/// Rates and group cost ratios for one recovery share.
#[derive(Clone, Debug, PartialEq)]
pub struct FSensitivityRow {
    pub f_recov: f64,
    pub rates: TariffRates,
    /// Household-weighted mean of `bill_design / bill_flat` per
    /// dwelling-type and area-band group, keyed like `Ap/A1`.
    pub group_cost_ratio: BTreeMap<String, f64>,
}

/// Sensitivity of one design to the recovery share.
#[derive(Clone, Debug, PartialEq)]
pub struct FSensitivity {
    pub scenario: ScenarioSpec,
    /// One row per requested recovery share, in input order.
    pub rows: Vec<FSensitivityRow>,
}

/// Re-solves one scenario for several recovery shares.
///
/// Classification does not depend on the recovery share, so it is done once
/// and only the rate solve and billing are repeated.
pub fn f_sensitivity(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    f_values: &[f64],
) -> Result<FSensitivity> {
    spec.validate()?;
    if f_values.is_empty() {
        return Err(Error::config("no recovery shares given"));
    }
    for (i, &f) in f_values.iter().enumerate() {
        if !(f.is_finite() && f > 0.0 && f <= 1.0) {
            return Err(Error::config(format!(
                "f_recov must lie in (0, 1], got {f}"
            )));
        }
        if f_values[..i].contains(&f) {
            return Err(Error::config(format!("duplicate f_recov value {f}")));
        }
    }
    let classes = classify_all(dataset, &spec.design)?;
    let counts = dataset.household_counts();
    let target = revenue_target(dataset, spec.gt_flat)?;
    let mut rows = Vec::with_capacity(f_values.len());
    for &f_recov in f_values {
        let solver = SolverConfig {
            gt_base: spec.solver.gt_base,
            f_recov,
        };
        let rates = solve_peak_tariff(&classes, &counts, &solver, &target)?;
        // Weighted mean relative change per (dwelling, area) group.
        let mut acc: BTreeMap<(DwellingType, AreaBand), (f64, f64)> = BTreeMap::new();
        for c in classes.values() {
            let n = counts[&c.key] as f64;
            let bill_flat = spec.gt_flat * c.annual_kwh();
            let relative = if bill_flat == 0.0 {
                0.0
            } else {
                annual_bill(c, &rates) / bill_flat - 1.0
            };
            let slot = acc
                .entry((c.key.dwelling, c.key.area))
                .or_insert((0.0, 0.0));
            slot.0 += n * relative;
            slot.1 += n;
        }
        let group_cost_ratio = acc
            .into_iter()
            .map(|((dwelling, area), (sum, weight))| {
                let label = format!("{}/{}", dwelling.label_part(), area.code());
                (label, 1.0 + sum / weight)
            })
            .collect();
        rows.push(FSensitivityRow {
            f_recov,
            rates,
            group_cost_ratio,
        });
    }
    Ok(FSensitivity {
        scenario: spec.clone(),
        rows,
    })
}

/// `f_recov` in a sweep file: a single share or a list of shares.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum FRecovField {
    One(f64),
    Many(Vec<f64>),
}

impl Default for FRecovField {
    fn default() -> Self {
        FRecovField::One(SolverConfig::default().f_recov)
    }
}

#[derive(Debug, Deserialize)]
struct SweepScenarioEntry {
    #[serde(default)]
    name: Option<String>,
    #[serde(flatten)]
    design: DesignSpec,
}

/// On-disk sweep description.
///
/// ```json
/// {
///   "gt_flat": 18.25,
///   "f_recov": [0.95, 0.9],
///   "scenarios": [
///     {"kind": "ipp", "threshold_kwh": 2.0},
///     {"name": "winter peak", "kind": "tou"}
///   ]
/// }
/// ```
#[derive(Debug, Deserialize)]
struct SweepFile {
    gt_flat: f64,
    /// Base rate anchor; defaults to `gt_flat`.
    #[serde(default)]
    gt_base: Option<f64>,
    #[serde(default)]
    f_recov: FRecovField,
    scenarios: Vec<SweepScenarioEntry>,
}

/// Parses a sweep file into a flat scenario list.
///
/// With more than one `f_recov` value every scenario is expanded once per
/// share and its name gets an `;f=<share>` suffix.
pub fn parse_sweep_file(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: SweepFile =
        serde_json::from_str(text).map_err(|e| Error::schema("sweep file", e.to_string()))?;
    let gt_base = file.gt_base.unwrap_or(file.gt_flat);
    let shares = match file.f_recov {
        FRecovField::One(f) => vec![f],
        FRecovField::Many(list) => list,
    };
    if shares.is_empty() {
        return Err(Error::config("sweep file lists no f_recov values"));
    }
    let suffix_share = shares.len() > 1;
    let mut specs = Vec::with_capacity(file.scenarios.len() * shares.len());
    for entry in &file.scenarios {
        let base_name = entry
            .name
            .clone()
            .unwrap_or_else(|| scenario_name(&entry.design));
        for &f_recov in &shares {
            let name = if suffix_share {
                format!("{base_name};f={}", compact(f_recov))
            } else {
                base_name.clone()
            };
            let spec = ScenarioSpec {
                name,
                design: entry.design.clone(),
                solver: SolverConfig { gt_base, f_recov },
                gt_flat: file.gt_flat,
            };
            spec.validate()?;
            specs.push(spec);
        }
    }
    if specs.is_empty() {
        return Err(Error::config("sweep file lists no scenarios"));
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{tiny_dataset, toy_dataset};

    fn toy_spec(design: DesignSpec, f_recov: f64) -> ScenarioSpec {
        ScenarioSpec::named(
            design,
            SolverConfig {
                gt_base: 10.0,
                f_recov,
            },
            10.0,
        )
    }

    #[test]
    fn scenario_names() {
        assert_eq!(scenario_name(&DesignSpec::Flat), "Flat");
        assert_eq!(
            scenario_name(&DesignSpec::Tou {
                window: Default::default()
            }),
            "TOU"
        );
        assert_eq!(
            scenario_name(&DesignSpec::Ipp { threshold_kwh: 2.0 }),
            "IPP;2kWh"
        );
        assert_eq!(
            scenario_name(&DesignSpec::Ipp { threshold_kwh: 1.5 }),
            "IPP;1.5kWh"
        );
        assert_eq!(
            scenario_name(&DesignSpec::Dcpp {
                trigger_fraction: 0.01
            }),
            "DCPP;1%"
        );
        assert_eq!(
            scenario_name(&DesignSpec::Dcpp {
                trigger_fraction: 0.4
            }),
            "DCPP;40%"
        );
        assert_eq!(
            scenario_name(&DesignSpec::Dcipp {
                threshold_kwh: 2.0,
                trigger_fraction: 0.05
            }),
            "DCIPP;(2kWh,5%)"
        );
    }

    #[test]
    fn run_scenario_toy_ipp() {
        let result = run_scenario(
            &toy_dataset(),
            &toy_spec(DesignSpec::Ipp { threshold_kwh: 1.0 }, 0.5),
        )
        .unwrap();
        assert_eq!(result.rates.base_rate, 5.0);
        assert_eq!(result.rates.peak_rate, 11.0);
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.diagnostics.q_peak_total_kwh, 5.0);
        assert_eq!(result.diagnostics.q_base_total_kwh, 1.0);
        assert_eq!(result.diagnostics.peak_hour_count, None);
    }

    #[test]
    fn flat_scenario_is_neutral_bit_for_bit() {
        let result = run_scenario(&tiny_dataset(), &toy_spec(DesignSpec::Flat, 0.5)).unwrap();
        assert_eq!(result.rates.base_rate, 10.0);
        assert_eq!(result.rates.peak_rate, 10.0);
        for row in &result.rows {
            assert_eq!(row.delta_ore, 0.0);
            assert_eq!(row.relative_change, 0.0);
        }
    }

    #[test]
    fn dcpp_reports_peak_hour_count() {
        let result = run_scenario(
            &toy_dataset(),
            &toy_spec(
                DesignSpec::Dcpp {
                    trigger_fraction: 0.25,
                },
                0.5,
            ),
        )
        .unwrap();
        assert_eq!(result.diagnostics.peak_hour_count, Some(1));
    }

    #[test]
    fn sweep_preserves_order_and_captures_failures() {
        let dataset = toy_dataset();
        let specs = vec![
            toy_spec(DesignSpec::Ipp { threshold_kwh: 1.0 }, 0.5),
            toy_spec(
                DesignSpec::Ipp {
                    threshold_kwh: 99.0,
                },
                0.5,
            ),
        ];
        let entries = sweep(&dataset, &specs).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].name(), "IPP;1kWh");
        assert!(entries[0].result().is_some());
        match &entries[1] {
            SweepEntry::Failed { spec, error } => {
                assert_eq!(spec.name, "IPP;99kWh");
                assert!(matches!(error, Error::InfeasiblePeakRecovery { .. }));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn sweep_rejects_duplicate_names() {
        let dataset = toy_dataset();
        let specs = vec![
            toy_spec(DesignSpec::Ipp { threshold_kwh: 1.0 }, 0.5),
            toy_spec(DesignSpec::Ipp { threshold_kwh: 1.0 }, 0.9),
        ];
        assert!(matches!(
            sweep(&dataset, &specs),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn sweep_rejects_empty_list() {
        assert!(sweep(&toy_dataset(), &[]).is_err());
    }

    #[test]
    fn parallel_and_sequential_sweeps_agree() {
        let dataset = tiny_dataset();
        let specs = vec![
            toy_spec(DesignSpec::Ipp { threshold_kwh: 0.8 }, 0.95),
            toy_spec(
                DesignSpec::Dcpp {
                    trigger_fraction: 0.25,
                },
                0.95,
            ),
            toy_spec(DesignSpec::Flat, 0.95),
        ];
        let par = sweep(&dataset, &specs).unwrap();
        let seq = sweep_seq(&dataset, &specs).unwrap();
        for (a, b) in par.iter().zip(&seq) {
            let a = a.result().unwrap();
            let b = b.result().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn f_sensitivity_is_exact_at_full_recovery() {
        let dataset = tiny_dataset();
        let spec = ScenarioSpec::named(
            DesignSpec::Ipp { threshold_kwh: 0.8 },
            SolverConfig::default(),
            18.25,
        );
        let table = f_sensitivity(&dataset, &spec, &[1.0]).unwrap();
        for ratio in table.rows[0].group_cost_ratio.values() {
            assert_eq!(*ratio, 1.0);
        }
        assert_eq!(table.rows[0].rates.peak_rate, 18.25);
    }

    #[test]
    fn f_sensitivity_deviations_scale_linearly() {
        let dataset = tiny_dataset();
        let spec = ScenarioSpec::named(
            DesignSpec::Ipp { threshold_kwh: 0.8 },
            SolverConfig::default(),
            18.25,
        );
        let table = f_sensitivity(&dataset, &spec, &[0.95, 0.9, 0.8]).unwrap();
        let dev = |row: &FSensitivityRow, group: &str| row.group_cost_ratio[group] - 1.0;
        for group in table.rows[0].group_cost_ratio.keys() {
            let d95 = dev(&table.rows[0], group);
            let d90 = dev(&table.rows[1], group);
            let d80 = dev(&table.rows[2], group);
            if d95.abs() < 1e-12 {
                continue;
            }
            assert!((d90 / d95 - 2.0).abs() < 1e-6, "{group}: {d90} vs {d95}");
            assert!((d80 / d95 - 4.0).abs() < 1e-6, "{group}: {d80} vs {d95}");
        }
    }

    #[test]
    fn sweep_file_round_trip() {
        let text = r#"{
            "gt_flat": 18.25,
            "scenarios": [
                {"kind": "ipp", "threshold_kwh": 2.0},
                {"name": "winter", "kind": "tou"},
                {"kind": "flat"}
            ]
        }"#;
        let specs = parse_sweep_file(text).unwrap();
        assert_eq!(specs.len(), 3);
        assert_eq!(specs[0].name, "IPP;2kWh");
        assert_eq!(specs[0].solver.f_recov, 0.95);
        assert_eq!(specs[0].solver.gt_base, 18.25);
        assert_eq!(specs[1].name, "winter");
        assert_eq!(specs[2].design, DesignSpec::Flat);
    }

    #[test]
    fn sweep_file_expands_f_recov_lists() {
        let text = r#"{
            "gt_flat": 18.25,
            "f_recov": [0.95, 0.9, 0.8],
            "scenarios": [{"kind": "dcpp", "trigger_fraction": 0.05}]
        }"#;
        let specs = parse_sweep_file(text).unwrap();
        let names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["DCPP;5%;f=0.95", "DCPP;5%;f=0.9", "DCPP;5%;f=0.8"]);
        assert_eq!(specs[2].solver.f_recov, 0.8);
    }

    #[test]
    fn sweep_file_rejects_garbage() {
        assert!(parse_sweep_file("not json").is_err());
        assert!(parse_sweep_file(r#"{"scenarios": []}"#).is_err());
        assert!(parse_sweep_file(r#"{"gt_flat": 18.25, "scenarios": []}"#).is_err());
        let missing_param = r#"{"gt_flat": 18.25, "scenarios": [{"kind": "ipp"}]}"#;
        assert!(parse_sweep_file(missing_param).is_err());
        let bad_share = r#"{"gt_flat": 18.25, "f_recov": 1.5,
                            "scenarios": [{"kind": "flat"}]}"#;
        assert!(parse_sweep_file(bad_share).is_err());
    }

    #[test]
    fn f_sensitivity_rejects_bad_shares() {
        let dataset = toy_dataset();
        let spec = toy_spec(DesignSpec::Ipp { threshold_kwh: 1.0 }, 0.95);
        assert!(f_sensitivity(&dataset, &spec, &[]).is_err());
        assert!(f_sensitivity(&dataset, &spec, &[0.0]).is_err());
        assert!(f_sensitivity(&dataset, &spec, &[1.5]).is_err());
        assert!(f_sensitivity(&dataset, &spec, &[0.9, 0.9]).is_err());
    }
}
