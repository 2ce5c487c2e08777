//! Revenue-neutral tariff rates and per-category bills.
//!
//! Under the flat reference tariff every kWh costs `gt_flat`, which fixes the
//! annual revenue of the system operator. A capacity-based design keeps base
//! consumption at the discounted rate `f_recov * gt_base` and recovers the
//! withheld revenue through the peak rate, so that total revenue over all
//! households is unchanged. With household counts `n_g` and per-household
//! peak/base consumption `q_peak_g` / `q_base_g`, the peak rate solves
//!
//! ```text
//! sum_g n_g * (q_peak_g * peak_rate + q_base_g * f_recov * gt_base) = target
//! ```
//!
//! which is linear in `peak_rate` and solved in closed form. All monetary
//! values are in Danish Øre; consumption is in kWh per household and year.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classification::{Classification, ClassificationMap};
use crate::dataset::{CategoryKey, Dataset};
use crate::{Error, Result};

/// Base rate anchor and recovery share of a capacity-based design.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Flat grid tariff level the base rate is anchored to, Øre per kWh.
    pub gt_base: f64,
    /// Share of the base anchor still charged on base consumption, in (0, 1].
    pub f_recov: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gt_base: 18.25,
            f_recov: 0.95,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gt_base.is_finite() && self.gt_base > 0.0) {
            return Err(Error::config(format!(
                "gt_base must be positive, got {}",
                self.gt_base
            )));
        }
        if !(self.f_recov.is_finite() && self.f_recov > 0.0 && self.f_recov <= 1.0) {
            return Err(Error::config(format!(
                "f_recov must lie in (0, 1], got {}",
                self.f_recov
            )));
        }
        Ok(())
    }
}

/// Annual revenue the system operator must collect, in Øre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevenueTarget {
    pub total_ore: f64,
}

/// Revenue of a flat volumetric tariff at `gt_flat` Øre per kWh.
pub fn revenue_target(dataset: &Dataset, gt_flat: f64) -> Result<RevenueTarget> {
    if !(gt_flat.is_finite() && gt_flat > 0.0) {
        return Err(Error::config(format!(
            "gt_flat must be positive, got {gt_flat}"
        )));
    }
    let totals = dataset.total_consumption();
    if totals.grand_total_kwh == 0.0 {
        return Err(Error::ZeroConsumption);
    }
    Ok(RevenueTarget {
        total_ore: gt_flat * totals.grand_total_kwh,
    })
}

/// Solved rate pair of a design, Øre per kWh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TariffRates {
    pub base_rate: f64,
    pub peak_rate: f64,
}

/// Solves the peak rate so total revenue matches the target exactly.
///
/// With `f_recov == 1` nothing is withheld and both rates equal `gt_base`
/// exactly. Otherwise the withheld base revenue is loaded onto aggregate
/// peak consumption, which must be positive.
pub fn solve_peak_tariff(
    classes: &ClassificationMap,
    counts: &BTreeMap<CategoryKey, u64>,
    config: &SolverConfig,
    target: &RevenueTarget,
) -> Result<TariffRates> {
    config.validate()?;
    for key in counts.keys() {
        if !classes.contains_key(key) {
            return Err(Error::CategoryMismatch {
                label: key.label(),
                missing_in: "classifications".to_string(),
            });
        }
    }
    let mut q_peak_total = 0.0;
    let mut q_base_total = 0.0;
    for (key, c) in classes {
        let n = *counts.get(key).ok_or_else(|| Error::CategoryMismatch {
            label: key.label(),
            missing_in: "household counts".to_string(),
        })? as f64;
        q_peak_total += n * c.q_peak_kwh;
        q_base_total += n * c.q_base_kwh;
    }

    if config.f_recov == 1.0 {
        return Ok(TariffRates {
            base_rate: config.gt_base,
            peak_rate: config.gt_base,
        });
    }
    if q_peak_total == 0.0 {
        return Err(Error::InfeasiblePeakRecovery {
            f_recov: config.f_recov,
        });
    }
    let base_rate = config.f_recov * config.gt_base;
    let peak_rate = (target.total_ore - base_rate * q_base_total) / q_peak_total;
    if !peak_rate.is_finite() || peak_rate < base_rate {
        return Err(Error::config(format!(
            "revenue target {} implies peak rate {peak_rate} below base rate {base_rate}; \
             the target is inconsistent with the solver configuration",
            target.total_ore
        )));
    }
    Ok(TariffRates {
        base_rate,
        peak_rate,
    })
}

/// Annual grid bill of one household in Øre.
///
/// When both rates coincide the bill is computed as rate times annual
/// consumption, so a design that charges everything at the flat level
/// reproduces flat bills bit for bit.
pub fn annual_bill(c: &Classification, rates: &TariffRates) -> f64 {
    if rates.peak_rate == rates.base_rate {
        return rates.base_rate * c.annual_kwh();
    }
    c.q_peak_kwh * rates.peak_rate + c.q_base_kwh * rates.base_rate
}

/// Per-household bill change of one category relative to the flat tariff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedistributionRow {
    pub key: CategoryKey,
    /// Annual bill under the flat tariff, Øre.
    pub bill_flat_ore: f64,
    /// Annual bill under the design, Øre.
    pub bill_design_ore: f64,
    /// `bill_design - bill_flat`, Øre.
    pub delta_ore: f64,
    /// `bill_design / bill_flat - 1`; zero when the flat bill is zero.
    pub relative_change: f64,
    /// Set when the flat bill is zero and the relative change is undefined.
    pub zero_flat_bill: bool,
}

/// Compares design bills against the flat tariff for every category.
pub fn redistribution(
    classes: &ClassificationMap,
    rates: &TariffRates,
    gt_flat: f64,
) -> Vec<RedistributionRow> {
    classes
        .values()
        .map(|c| {
            let bill_flat_ore = gt_flat * c.annual_kwh();
            let bill_design_ore = annual_bill(c, rates);
            let delta_ore = bill_design_ore - bill_flat_ore;
            let zero_flat_bill = bill_flat_ore == 0.0;
            let relative_change = if zero_flat_bill {
                0.0
            } else {
                bill_design_ore / bill_flat_ore - 1.0
            };
            RedistributionRow {
                key: c.key,
                bill_flat_ore,
                bill_design_ore,
                delta_ore,
                relative_change,
                zero_flat_bill,
            }
        })
        .collect()
}
