//! Slow reference implementation used to cross-check the engine.
//!
//! The oracle recomputes every scenario from first principles: it classifies
//! hour by hour, bills hour by hour, and finds the peak rate numerically by
//! bisecting the revenue balance instead of solving it in closed form. It
//! shares no code with the classification or solver modules, so agreement
//! between the two paths is meaningful evidence of correctness.

use std::collections::BTreeMap;

use crate::classification::DesignSpec;
use crate::dataset::{CategoryKey, Dataset};
use crate::scenario::{run_scenario, scenario_name, ScenarioSpec};
use crate::solver::SolverConfig;
use crate::{Error, Result};

/// Scenario outcome computed by the reference path.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub base_rate: f64,
    pub peak_rate: f64,
    /// Per-household `(q_peak, q_base)` in kWh.
    pub split_kwh: BTreeMap<CategoryKey, (f64, f64)>,
    /// Per-household annual bill in Øre.
    pub bills_ore: BTreeMap<CategoryKey, f64>,
    /// Per-household bill change against the flat tariff in Øre.
    pub deltas_ore: BTreeMap<CategoryKey, f64>,
}

/// Cumulative days before each month, for non-leap and leap years.
const CUM_DAYS: [u32; 13] = [0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334, 365];
const CUM_DAYS_LEAP: [u32; 13] = [0, 31, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335, 366];

fn month_of_day(day: u32, leap: bool) -> u32 {
    let table = if leap { &CUM_DAYS_LEAP } else { &CUM_DAYS };
    (1..=12)
        .find(|&m| day < table[m as usize])
        .expect("day within year")
}

/// Marks each hour of the year that falls into the time of use window.
fn tou_mask(design: &DesignSpec, hours: usize, year: i32) -> Result<Vec<bool>> {
    let DesignSpec::Tou { window } = design else {
        unreachable!("tou_mask called for {design:?}")
    };
    if hours != 8760 && hours != 8784 {
        return Err(Error::TouUnavailable { hours });
    }
    let leap = hours == 8784;
    if (year % 4 == 0 && year % 100 != 0 || year % 400 == 0) != leap {
        return Err(Error::config(format!(
            "year {year} does not have {hours} hours"
        )));
    }
    Ok((0..hours)
        .map(|t| {
            let hod = (t % 24) as u32;
            let month = month_of_day((t / 24) as u32, leap);
            hod >= window.start_hour && hod < window.end_hour && window.months.contains(&month)
        })
        .collect())
}

/// Marks the `floor(p * T + 0.5)` highest load hours, earlier hours first on
/// ties. Uses a stable sort of hour indices, which preserves index order for
/// equal loads.
fn trigger_mask(dataset: &Dataset, trigger_fraction: f64) -> Result<Vec<bool>> {
    if !(trigger_fraction.is_finite() && trigger_fraction > 0.0 && trigger_fraction <= 1.0) {
        return Err(Error::config(format!(
            "trigger fraction must lie in (0, 1], got {trigger_fraction}"
        )));
    }
    let load = dataset.system_load().values();
    let hours = load.len();
    let k = (trigger_fraction * hours as f64 + 0.5).floor() as usize;
    let mut order: Vec<usize> = (0..hours).collect();
    order.sort_by(|&a, &b| load[b].total_cmp(&load[a]));
    let mut mask = vec![false; hours];
    for &t in order.iter().take(k.min(hours)) {
        mask[t] = true;
    }
    Ok(mask)
}

/// Recomputes one scenario from first principles.
pub fn evaluate(
    dataset: &Dataset,
    design: &DesignSpec,
    solver: &SolverConfig,
    gt_flat: f64,
) -> Result<OracleResult> {
    solver.validate()?;
    if !(gt_flat.is_finite() && gt_flat > 0.0) {
        return Err(Error::config(format!(
            "gt_flat must be positive, got {gt_flat}"
        )));
    }
    let hours = dataset.hours();
    let shared_mask = match design {
        DesignSpec::Flat | DesignSpec::Ipp { .. } => None,
        DesignSpec::Tou { .. } => Some(tou_mask(design, hours, dataset.year())?),
        DesignSpec::Dcpp { trigger_fraction }
        | DesignSpec::Dcipp {
            trigger_fraction, ..
        } => Some(trigger_mask(dataset, *trigger_fraction)?),
    };

    // Hour-by-hour peak flags per category.
    let mut peak_flags: BTreeMap<CategoryKey, Vec<bool>> = BTreeMap::new();
    for record in dataset.categories() {
        let flags: Vec<bool> = (0..hours)
            .map(|t| {
                let q = record.hourly_kwh[t];
                match *design {
                    DesignSpec::Flat => false,
                    DesignSpec::Tou { .. } | DesignSpec::Dcpp { .. } => {
                        shared_mask.as_ref().unwrap()[t]
                    }
                    DesignSpec::Ipp { threshold_kwh } => q >= threshold_kwh,
                    DesignSpec::Dcipp { threshold_kwh, .. } => {
                        shared_mask.as_ref().unwrap()[t] && q >= threshold_kwh
                    }
                }
            })
            .collect();
        peak_flags.insert(record.key, flags);
    }

    let mut split_kwh = BTreeMap::new();
    for record in dataset.categories() {
        let flags = &peak_flags[&record.key];
        let mut q_peak = 0.0;
        let mut q_base = 0.0;
        for (&peak, &q) in flags.iter().zip(&record.hourly_kwh) {
            if peak {
                q_peak += q;
            } else {
                q_base += q;
            }
        }
        split_kwh.insert(record.key, (q_peak, q_base));
    }

    // Revenue the flat tariff would collect.
    let mut target = 0.0;
    for record in dataset.categories() {
        target += record.n_households as f64 * gt_flat * record.annual_kwh();
    }
    if target == 0.0 {
        return Err(Error::ZeroConsumption);
    }

    let effective_f = if matches!(design, DesignSpec::Flat) {
        1.0
    } else {
        solver.f_recov
    };
    let (base_rate, peak_rate) = if effective_f == 1.0 {
        (solver.gt_base, solver.gt_base)
    } else {
        let base_rate = effective_f * solver.gt_base;
        let revenue = |peak_rate: f64| -> f64 {
            let mut total = 0.0;
            for record in dataset.categories() {
                let (q_peak, q_base) = split_kwh[&record.key];
                total += record.n_households as f64 * (q_peak * peak_rate + q_base * base_rate);
            }
            total
        };
        let total_peak: f64 = dataset
            .categories()
            .iter()
            .map(|r| r.n_households as f64 * split_kwh[&r.key].0)
            .sum();
        if total_peak == 0.0 {
            return Err(Error::InfeasiblePeakRecovery {
                f_recov: effective_f,
            });
        }
        // Revenue grows monotonically in the peak rate; bracket the root
        // and bisect to machine precision.
        let mut lo = 0.0;
        let mut hi = solver.gt_base.max(1.0);
        let mut guard = 0;
        while revenue(hi) < target {
            hi *= 2.0;
            guard += 1;
            assert!(guard < 1100, "revenue balance cannot be bracketed");
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if revenue(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (base_rate, 0.5 * (lo + hi))
    };

    // Bill hour by hour at the found rates.
    let mut bills_ore = BTreeMap::new();
    let mut deltas_ore = BTreeMap::new();
    for record in dataset.categories() {
        let flags = &peak_flags[&record.key];
        let mut bill = 0.0;
        let mut flat_bill = 0.0;
        for (&peak, &q) in flags.iter().zip(&record.hourly_kwh) {
            bill += q * if peak { peak_rate } else { base_rate };
            flat_bill += q * gt_flat;
        }
        bills_ore.insert(record.key, bill);
        deltas_ore.insert(record.key, bill - flat_bill);
    }

    Ok(OracleResult {
        base_rate,
        peak_rate,
        split_kwh,
        bills_ore,
        deltas_ore,
    })
}

/// Worst observed deviations between engine and oracle for one scenario.
///
/// Rates and classification are compared relative to the oracle value;
/// bills relative to the bill size; deltas relative to the flat bill, since
/// a delta can legitimately be zero.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub scenario: String,
    pub max_rate_error: f64,
    pub max_split_error: f64,
    pub max_bill_error: f64,
    pub max_delta_error: f64,
}

impl Comparison {
    /// Largest deviation over all compared quantities.
    pub fn max_error(&self) -> f64 {
        self.max_rate_error
            .max(self.max_split_error)
            .max(self.max_bill_error)
            .max(self.max_delta_error)
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.max_error() <= tolerance
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.abs().max(1.0)
}

/// Runs engine and oracle on the same scenario and compares the results.
pub fn compare(
    dataset: &Dataset,
    design: &DesignSpec,
    solver: &SolverConfig,
    gt_flat: f64,
) -> Result<Comparison> {
    let spec = ScenarioSpec::named(design.clone(), *solver, gt_flat);
    let engine = run_scenario(dataset, &spec)?;
    let reference = evaluate(dataset, design, solver, gt_flat)?;

    let mut max_rate_error =
        (engine.rates.base_rate - reference.base_rate).abs() / reference.base_rate.abs().max(1.0);
    max_rate_error = max_rate_error.max(
        (engine.rates.peak_rate - reference.peak_rate).abs() / reference.peak_rate.abs().max(1.0),
    );

    let mut max_split_error: f64 = 0.0;
    let mut max_bill_error: f64 = 0.0;
    let mut max_delta_error: f64 = 0.0;
    let engine_classes = crate::classification::classify_all(dataset, design)?;
    for row in &engine.rows {
        let (q_peak, q_base) = reference.split_kwh[&row.key];
        let class = &engine_classes[&row.key];
        let annual = class.annual_kwh();
        max_split_error = max_split_error
            .max(rel(class.q_peak_kwh, q_peak, annual))
            .max(rel(class.q_base_kwh, q_base, annual));
        max_bill_error = max_bill_error.max(rel(
            row.bill_design_ore,
            reference.bills_ore[&row.key],
            reference.bills_ore[&row.key],
        ));
        max_delta_error = max_delta_error.max(rel(
            row.delta_ore,
            reference.deltas_ore[&row.key],
            row.bill_flat_ore,
        ));
    }
    Ok(Comparison {
        scenario: scenario_name(design),
        max_rate_error,
        max_split_error,
        max_bill_error,
        max_delta_error,
    })
}

/// Deterministic design battery for a dataset, derived from the data itself.
///
/// Thresholds are taken from quantiles of the positive hourly consumption
/// values, so IPP and DCIPP designs always see both peak and base hours.
pub fn design_battery(dataset: &Dataset) -> Vec<DesignSpec> {
    let mut positive: Vec<f64> = dataset
        .categories()
        .iter()
        .flat_map(|c| c.hourly_kwh.iter().copied())
        .filter(|&q| q > 0.0)
        .collect();
    positive.sort_by(|a, b| a.total_cmp(b));
    let quantile = |p: f64| -> Option<f64> {
        if positive.is_empty() {
            return None;
        }
        let idx = ((positive.len() - 1) as f64 * p).round() as usize;
        Some(positive[idx])
    };

    let mut designs = vec![DesignSpec::Flat];
    if dataset.hours() == 8760 || dataset.hours() == 8784 {
        designs.push(DesignSpec::Tou {
            window: Default::default(),
        });
    }
    let thresholds: Vec<f64> = [0.5, 0.9]
        .iter()
        .filter_map(|&p| quantile(p))
        .filter(|&q| q > 0.0)
        .collect();
    for &threshold_kwh in &thresholds {
        designs.push(DesignSpec::Ipp { threshold_kwh });
    }
    for trigger_fraction in [0.25, 0.5] {
        designs.push(DesignSpec::Dcpp { trigger_fraction });
        if let Some(&threshold_kwh) = thresholds.first() {
            designs.push(DesignSpec::Dcipp {
                threshold_kwh,
                trigger_fraction,
            });
        }
    }
    designs
}

/// Compares engine and oracle over the whole design battery.
pub fn check_battery(
    dataset: &Dataset,
    solver: &SolverConfig,
    gt_flat: f64,
) -> Result<Vec<Comparison>> {
    design_battery(dataset)
        .iter()
        .map(|design| compare(dataset, design, solver, gt_flat))
        .collect()
}
