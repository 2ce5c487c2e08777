//! Splits household consumption into peak and base parts per tariff design.
//!
//! Five designs are supported:
//!
//! * `Flat`: everything is base consumption.
//! * `TOU` (time of use): hours inside a fixed calendar window are peak.
//! * `IPP` (individual peak pricing): an hour is peak for a household when
//!   its own consumption reaches a threshold.
//! * `DCPP` (demand charge peak pricing): an hour is peak for everyone when
//!   it belongs to the highest system load hours.
//! * `DCIPP`: both conditions of IPP and DCPP must hold at once.
//!
//! Every hour of a household's year lands in exactly one bucket, so peak and
//! base consumption always add up to annual consumption.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calendar;
use crate::dataset::{CategoryKey, CategoryRecord, Dataset, SystemLoad};
use crate::exec;
use crate::{Error, Result};

/// Calendar window for the time of use design.
///
/// An hour is inside the window when its month is listed and its hour of day
/// lies in `[start_hour, end_hour)`. The default is 17:00 to 20:00 daily from
/// October through March.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TouWindow {
    pub start_hour: u32,
    pub end_hour: u32,
    pub months: Vec<u32>,
}

impl Default for TouWindow {
    fn default() -> Self {
        TouWindow {
            start_hour: 17,
            end_hour: 20,
            months: vec![1, 2, 3, 10, 11, 12],
        }
    }
}

impl TouWindow {
    fn validate(&self) -> Result<()> {
        if self.start_hour >= self.end_hour || self.end_hour > 24 {
            return Err(Error::config(format!(
                "time of use window {}..{} is not a valid hour range",
                self.start_hour, self.end_hour
            )));
        }
        if self.months.is_empty() {
            return Err(Error::config("time of use window lists no months"));
        }
        let mut seen = [false; 13];
        for &m in &self.months {
            if !(1..=12).contains(&m) {
                return Err(Error::config(format!("invalid month {m}")));
            }
            if seen[m as usize] {
                return Err(Error::config(format!("duplicate month {m}")));
            }
            seen[m as usize] = true;
        }
        Ok(())
    }

    fn contains(&self, year: i32, t: usize) -> bool {
        let hod = calendar::hour_of_day(t);
        hod >= self.start_hour
            && hod < self.end_hour
            && self.months.contains(&calendar::month_of_hour(year, t))
    }
}

/// Tariff design with all parameters it needs.
///
/// Serialized with a `kind` tag, so a scenario in JSON reads for example
/// `{"kind": "ipp", "threshold_kwh": 2.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DesignSpec {
    Flat,
    Tou {
        #[serde(default)]
        window: TouWindow,
    },
    Ipp {
        threshold_kwh: f64,
    },
    Dcpp {
        trigger_fraction: f64,
    },
    Dcipp {
        threshold_kwh: f64,
        trigger_fraction: f64,
    },
}

impl DesignSpec {
    /// Uppercase design name as used in reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            DesignSpec::Flat => "Flat",
            DesignSpec::Tou { .. } => "TOU",
            DesignSpec::Ipp { .. } => "IPP",
            DesignSpec::Dcpp { .. } => "DCPP",
            DesignSpec::Dcipp { .. } => "DCIPP",
        }
    }

    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let check_threshold = |threshold: f64| {
            if threshold.is_finite() && threshold > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "threshold must be positive, got {threshold}"
                )))
            }
        };
        let check_trigger = |fraction: f64| {
            if fraction.is_finite() && fraction > 0.0 && fraction <= 1.0 {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "trigger fraction must lie in (0, 1], got {fraction}"
                )))
            }
        };
        match *self {
            DesignSpec::Flat => Ok(()),
            DesignSpec::Tou { ref window } => window.validate(),
            DesignSpec::Ipp { threshold_kwh } => check_threshold(threshold_kwh),
            DesignSpec::Dcpp { trigger_fraction } => check_trigger(trigger_fraction),
            DesignSpec::Dcipp {
                threshold_kwh,
                trigger_fraction,
            } => {
                check_threshold(threshold_kwh)?;
                check_trigger(trigger_fraction)
            }
        }
    }

    /// Whether classification needs a precomputed peak hour set.
    pub fn needs_peak_hours(&self) -> bool {
        matches!(
            self,
            DesignSpec::Tou { .. } | DesignSpec::Dcpp { .. } | DesignSpec::Dcipp { .. }
        )
    }
}

/// System load sorted in non-increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadDurationCurve {
    values: Vec<f64>,
}

impl LoadDurationCurve {
    /// Load values from highest to lowest, one per hour.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sorts the system load descending into a load duration curve.
pub fn load_duration_curve(load: &SystemLoad) -> LoadDurationCurve {
    let mut values = load.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    LoadDurationCurve { values }
}

/// Set of hours that count as peak hours for a whole dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakHourSet {
    mask: Vec<bool>,
    count: usize,
}

impl PeakHourSet {
    /// Builds a set from explicit hour indices over `[0, total_hours)`.
    pub fn from_hours(hours: impl IntoIterator<Item = usize>, total_hours: usize) -> Self {
        let mut mask = vec![false; total_hours];
        let mut count = 0;
        for h in hours {
            if !mask[h] {
                mask[h] = true;
                count += 1;
            }
        }
        PeakHourSet { mask, count }
    }

    pub fn contains(&self, t: usize) -> bool {
        self.mask.get(t).copied().unwrap_or(false)
    }

    /// Number of peak hours in the set.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Length of the underlying hour range.
    pub fn total_hours(&self) -> usize {
        self.mask.len()
    }

    /// Peak hour indices in ascending order.
    pub fn hours(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(t, _)| t)
    }
}

/// Selects the `round(trigger_fraction * T)` highest system load hours.
///
/// Ties at the cutoff load are broken in favor of the earlier hour. The
/// selection depends only on the ordering of loads, so rescaling the whole
/// series leaves it unchanged.
pub fn peak_hour_set(load: &SystemLoad, trigger_fraction: f64) -> Result<PeakHourSet> {
    if !(trigger_fraction.is_finite() && trigger_fraction > 0.0 && trigger_fraction <= 1.0) {
        return Err(Error::config(format!(
            "trigger fraction must lie in (0, 1], got {trigger_fraction}"
        )));
    }
    let total = load.len();
    let k = (trigger_fraction * total as f64).round() as usize;
    let values = load.values();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(PeakHourSet::from_hours(order, total))
}

/// Builds the peak hour set of the time of use window for a calendar year.
pub fn tou_hour_set(year: i32, window: &TouWindow) -> Result<PeakHourSet> {
    window.validate()?;
    let total = calendar::hours_in_year(year);
    let hours = (0..total).filter(|&t| window.contains(year, t));
    Ok(PeakHourSet::from_hours(hours, total))
}

/// Peak and base consumption of one household over the year, in kWh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub key: CategoryKey,
    pub q_peak_kwh: f64,
    pub q_base_kwh: f64,
}

impl Classification {
    /// Annual consumption, the sum of both buckets.
    pub fn annual_kwh(&self) -> f64 {
        self.q_peak_kwh + self.q_base_kwh
    }
}

/// Classifications for all categories, in canonical key order.
pub type ClassificationMap = BTreeMap<CategoryKey, Classification>;

/// Splits one household profile into peak and base consumption.
///
/// `peak_hours` must be given for designs that need one (TOU, DCPP, DCIPP)
/// and cover the same hour range as the profile.
pub fn classify_category(
    record: &CategoryRecord,
    design: &DesignSpec,
    peak_hours: Option<&PeakHourSet>,
) -> Result<Classification> {
    design.validate()?;
    let hours = record.hourly_kwh.len();
    let set = if design.needs_peak_hours() {
        let set = peak_hours.ok_or_else(|| Error::MissingPeakHours {
            design: design.kind_name().to_string(),
        })?;
        if set.total_hours() != hours {
            return Err(Error::LengthMismatch {
                subject: format!("peak hour set for category {}", record.key.label()),
                expected: hours,
                found: set.total_hours(),
            });
        }
        Some(set)
    } else {
        None
    };

    let is_peak = |t: usize, kwh: f64| match *design {
        DesignSpec::Flat => false,
        DesignSpec::Tou { .. } | DesignSpec::Dcpp { .. } => set.unwrap().contains(t),
        DesignSpec::Ipp { threshold_kwh } => kwh >= threshold_kwh,
        DesignSpec::Dcipp { threshold_kwh, .. } => set.unwrap().contains(t) && kwh >= threshold_kwh,
    };

    let mut q_peak_kwh = 0.0;
    let mut q_base_kwh = 0.0;
    for (t, &kwh) in record.hourly_kwh.iter().enumerate() {
        if is_peak(t, kwh) {
            q_peak_kwh += kwh;
        } else {
            q_base_kwh += kwh;
        }
    }
    Ok(Classification {
        key: record.key,
        q_peak_kwh,
        q_base_kwh,
    })
}

/// Builds the peak hour set a design needs on this dataset, if any.
pub fn peak_hours_for(dataset: &Dataset, design: &DesignSpec) -> Result<Option<PeakHourSet>> {
    match design {
        DesignSpec::Flat | DesignSpec::Ipp { .. } => Ok(None),
        DesignSpec::Tou { window } => {
            if calendar::hours_in_year(dataset.year()) != dataset.hours() {
                return Err(Error::TouUnavailable {
                    hours: dataset.hours(),
                });
            }
            Ok(Some(tou_hour_set(dataset.year(), window)?))
        }
        DesignSpec::Dcpp { trigger_fraction }
        | DesignSpec::Dcipp {
            trigger_fraction, ..
        } => Ok(Some(peak_hour_set(
            dataset.system_load(),
            *trigger_fraction,
        )?)),
    }
}

/// Classifies every category of the dataset under one design.
pub fn classify_all(dataset: &Dataset, design: &DesignSpec) -> Result<ClassificationMap> {
    classify_impl(dataset, design, true)
}

/// Sequential twin of [`classify_all`] for benchmarks and determinism tests.
pub fn classify_all_seq(dataset: &Dataset, design: &DesignSpec) -> Result<ClassificationMap> {
    classify_impl(dataset, design, false)
}

fn classify_impl(
    dataset: &Dataset,
    design: &DesignSpec,
    parallel: bool,
) -> Result<ClassificationMap> {
    design.validate()?;
    let peak_hours = peak_hours_for(dataset, design)?;
    let run = |c: &CategoryRecord| classify_category(c, design, peak_hours.as_ref());
    let results = if parallel {
        exec::map_ordered(dataset.categories(), run)
    } else {
        exec::map_ordered_seq(dataset.categories(), run)
    };
    let mut map = ClassificationMap::new();
    for result in results {
        let c = result?;
        map.insert(c.key, c);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{CategoryRecord, SystemLoad};

    fn toy_record() -> CategoryRecord {
        CategoryRecord {
            key: CategoryKey::parse_label("Ap_P1_A1_\u{20ac}1_EV0_HP0").unwrap(),
            n_households: 1,
            hourly_kwh: vec![0.5, 2.0, 0.5, 3.0],
        }
    }

    fn toy_load() -> SystemLoad {
        SystemLoad::new(vec![10.0, 40.0, 20.0, 30.0]).unwrap()
    }

    #[test]
    fn ldc_sorts_descending() {
        let ldc = load_duration_curve(&toy_load());
        assert_eq!(ldc.values(), &[40.0, 30.0, 20.0, 10.0]);
    }

    #[test]
    fn ldc_preserves_values() {
        let load = SystemLoad::new(vec![3.0, 1.0, 3.0, 2.0]).unwrap();
        let mut expected = load.values().to_vec();
        expected.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(load_duration_curve(&load).values(), expected.as_slice());
    }

    #[test]
    fn peak_hour_set_picks_top_quarter() {
        let set = peak_hour_set(&toy_load(), 0.25).unwrap();
        assert_eq!(set.hours().collect::<Vec<_>>(), vec![1]);
        assert_eq!(set.count(), 1);
    }

    #[test]
    fn peak_hour_set_breaks_ties_by_earlier_hour() {
        let load = SystemLoad::new(vec![30.0, 40.0, 30.0, 30.0]).unwrap();
        let set = peak_hour_set(&load, 0.5).unwrap();
        assert_eq!(set.hours().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn peak_hour_set_rounds_half_up() {
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let load = SystemLoad::new(values).unwrap();
        // 0.25 * 10 = 2.5 rounds to 3.
        let set = peak_hour_set(&load, 0.25).unwrap();
        assert_eq!(set.count(), 3);
        assert_eq!(set.hours().collect::<Vec<_>>(), vec![7, 8, 9]);
    }

    #[test]
    fn peak_hour_set_one_percent_of_a_year() {
        let values: Vec<f64> = (0..8760).map(|i| (i % 4001) as f64).collect();
        let load = SystemLoad::new(values).unwrap();
        let set = peak_hour_set(&load, 0.01).unwrap();
        assert_eq!(set.count(), 88);
    }

    #[test]
    fn peak_hour_set_scale_invariant() {
        let load = toy_load();
        let scaled = SystemLoad::new(load.values().iter().map(|v| v * 17.5).collect()).unwrap();
        for p in [0.25, 0.5, 0.75, 1.0] {
            let a: Vec<usize> = peak_hour_set(&load, p).unwrap().hours().collect();
            let b: Vec<usize> = peak_hour_set(&scaled, p).unwrap().hours().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn peak_hour_set_rejects_bad_fraction() {
        for p in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(peak_hour_set(&toy_load(), p).is_err());
        }
    }

    #[test]
    fn tou_set_counts_winter_evening_hours() {
        let window = TouWindow::default();
        // 182 days in Jan..Mar plus Oct..Dec of 2017, 3 hours each.
        assert_eq!(tou_hour_set(2017, &window).unwrap().count(), 546);
        // 2016 has 29 February, adding one day.
        assert_eq!(tou_hour_set(2016, &window).unwrap().count(), 549);
    }

    #[test]
    fn tou_set_membership() {
        let set = tou_hour_set(2017, &TouWindow::default()).unwrap();
        assert!(set.contains(17)); // 1 Jan 17:00
        assert!(set.contains(19)); // 1 Jan 19:00
        assert!(!set.contains(16));
        assert!(!set.contains(20)); // end is exclusive
        let july_1 = (31 + 28 + 31 + 30 + 31 + 30) * 24;
        assert!(!set.contains(july_1 + 18));
        let oct_1 = (31 + 28 + 31 + 30 + 31 + 30 + 31 + 31 + 30) * 24;
        assert!(set.contains(oct_1 + 17));
    }

    #[test]
    fn ipp_threshold_is_inclusive() {
        let record = toy_record();
        let c = classify_category(&record, &DesignSpec::Ipp { threshold_kwh: 1.0 }, None).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (5.0, 1.0));
        let c = classify_category(&record, &DesignSpec::Ipp { threshold_kwh: 3.0 }, None).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (3.0, 3.0));
    }

    #[test]
    fn dcipp_requires_both_conditions() {
        let record = toy_record();
        let set = peak_hour_set(&toy_load(), 0.25).unwrap();
        let design = DesignSpec::Dcipp {
            threshold_kwh: 1.0,
            trigger_fraction: 0.25,
        };
        let c = classify_category(&record, &design, Some(&set)).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (2.0, 4.0));

        let design = DesignSpec::Dcipp {
            threshold_kwh: 2.5,
            trigger_fraction: 0.25,
        };
        let c = classify_category(&record, &design, Some(&set)).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (0.0, 6.0));
    }

    #[test]
    fn dcpp_uses_trigger_hours_only() {
        let record = toy_record();
        let set = peak_hour_set(&toy_load(), 0.25).unwrap();
        let design = DesignSpec::Dcpp {
            trigger_fraction: 0.25,
        };
        let c = classify_category(&record, &design, Some(&set)).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (2.0, 4.0));
    }

    #[test]
    fn flat_puts_everything_in_base() {
        let c = classify_category(&toy_record(), &DesignSpec::Flat, None).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (0.0, 6.0));
        assert_eq!(c.annual_kwh(), 6.0);
    }

    #[test]
    fn tou_classification_via_explicit_set() {
        let set = PeakHourSet::from_hours([1, 3], 4);
        let design = DesignSpec::Tou {
            window: TouWindow::default(),
        };
        let c = classify_category(&toy_record(), &design, Some(&set)).unwrap();
        assert_eq!((c.q_peak_kwh, c.q_base_kwh), (5.0, 1.0));
    }

    #[test]
    fn missing_peak_hours_is_reported() {
        let design = DesignSpec::Dcpp {
            trigger_fraction: 0.25,
        };
        assert!(matches!(
            classify_category(&toy_record(), &design, None),
            Err(Error::MissingPeakHours { .. })
        ));
    }

    #[test]
    fn classify_all_matches_single_classification() {
        let dataset = crate::testutil::tiny_dataset();
        let design = DesignSpec::Ipp { threshold_kwh: 1.0 };
        let map = classify_all(&dataset, &design).unwrap();
        assert_eq!(map.len(), dataset.categories().len());
        for record in dataset.categories() {
            let single = classify_category(record, &design, None).unwrap();
            assert_eq!(map[&record.key], single);
        }
    }

    #[test]
    fn classify_all_parallel_equals_sequential() {
        let dataset = crate::testutil::tiny_dataset();
        for design in [
            DesignSpec::Flat,
            DesignSpec::Ipp { threshold_kwh: 1.0 },
            DesignSpec::Dcpp {
                trigger_fraction: 0.05,
            },
            DesignSpec::Dcipp {
                threshold_kwh: 2.0,
                trigger_fraction: 0.05,
            },
        ] {
            let par = classify_all(&dataset, &design).unwrap();
            let seq = classify_all_seq(&dataset, &design).unwrap();
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn tou_needs_a_full_year() {
        let dataset = crate::testutil::toy_dataset();
        let design = DesignSpec::Tou {
            window: TouWindow::default(),
        };
        assert!(matches!(
            classify_all(&dataset, &design),
            Err(Error::TouUnavailable { hours: 4 })
        ));
    }

    #[test]
    fn design_spec_json_shape() {
        let design: DesignSpec =
            serde_json::from_str(r#"{"kind": "ipp", "threshold_kwh": 2.0}"#).unwrap();
        assert_eq!(design, DesignSpec::Ipp { threshold_kwh: 2.0 });
        let design: DesignSpec = serde_json::from_str(
            r#"{"kind": "dcipp", "threshold_kwh": 2.0, "trigger_fraction": 0.05}"#,
        )
        .unwrap();
        assert_eq!(
            design,
            DesignSpec::Dcipp {
                threshold_kwh: 2.0,
                trigger_fraction: 0.05
            }
        );
        let design: DesignSpec = serde_json::from_str(r#"{"kind": "tou"}"#).unwrap();
        assert_eq!(
            design,
            DesignSpec::Tou {
                window: TouWindow::default()
            }
        );
        assert!(serde_json::from_str::<DesignSpec>(r#"{"kind": "ipp"}"#).is_err());
    }
}
