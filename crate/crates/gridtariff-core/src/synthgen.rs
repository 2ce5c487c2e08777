//! Deterministic synthetic dataset generator.
//!
//! Generates hourly consumption profiles for the 90 household categories of
//! the 2017 Danish reference dataset, plus a system load series derived from
//! them. A profile is the sum of up to three components:
//!
//! * a base component with a morning and a stronger evening hump, scaled by
//!   a winter-peaking seasonal factor,
//! * a heat pump component proportional to a heating demand proxy that
//!   vanishes in summer, present for `HP1` categories,
//! * an electric vehicle charging component made of discrete two-hour
//!   sessions, mostly at night, present for `EV1` categories.
//!
//! Every component draws from its own random stream keyed by seed, the
//! socio-economic cell and the component name. Categories that share a cell
//! therefore share their base component bit for bit, so the difference
//! between an `HP1` profile and its `HP0` counterpart is exactly the heat
//! pump component. Generation is fully deterministic: the same configuration
//! always produces a byte-identical dataset.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calendar;
use crate::dataset::{
    AreaBand, CategoryKey, CategoryRecord, Dataset, DwellingType, IncomeBand, Occupancy, SystemLoad,
};
use crate::exec;
use crate::{Error, Result, ENGINE_VERSION};

/// Category labels of the 2017 Danish reference dataset: the 90 observed
/// combinations of dwelling type, occupancy, area band, income band, EV and
/// heat pump ownership, in canonical order.
pub const DEFAULT_CATEGORY_LABELS: [&str; 90] = [
    "Ap_P1_A1_€1_EV0_HP0",
    "Ap_P1_A1_€1_EV0_HP1",
    "Ap_P1_A1_€2_EV0_HP0",
    "Ap_P1_A1_€2_EV0_HP1",
    "Ap_P1_A1_€3_EV0_HP0",
    "Ap_P1_A2_€1_EV0_HP0",
    "Ap_P1_A2_€1_EV0_HP1",
    "Ap_P1_A2_€2_EV0_HP0",
    "Ap_P1_A2_€2_EV0_HP1",
    "Ap_P1_A2_€3_EV0_HP0",
    "Ap_P1_A3_€1_EV0_HP0",
    "Ap_P1_A3_€1_EV0_HP1",
    "Ap_P1_A3_€2_EV0_HP0",
    "Ap_P1_A3_€2_EV0_HP1",
    "Ap_P1_A3_€3_EV0_HP0",
    "Ap_P2_A1_€1_EV0_HP0",
    "Ap_P2_A1_€1_EV0_HP1",
    "Ap_P2_A1_€2_EV0_HP0",
    "Ap_P2_A1_€2_EV0_HP1",
    "Ap_P2_A1_€3_EV0_HP0",
    "Ap_P2_A2_€1_EV0_HP0",
    "Ap_P2_A2_€1_EV0_HP1",
    "Ap_P2_A2_€2_EV0_HP0",
    "Ap_P2_A2_€2_EV0_HP1",
    "Ap_P2_A2_€3_EV0_HP0",
    "Ap_P2_A3_€1_EV0_HP0",
    "Ap_P2_A3_€1_EV0_HP1",
    "Ap_P2_A3_€2_EV0_HP0",
    "Ap_P2_A3_€2_EV0_HP1",
    "Ap_P2_A3_€3_EV0_HP0",
    "Ap_P2_A3_€3_EV0_HP1",
    "Ap_P3_A3_€3_EV0_HP0",
    "H_P1_A1_€1_EV0_HP0",
    "H_P1_A1_€1_EV0_HP1",
    "H_P1_A1_€2_EV0_HP0",
    "H_P1_A1_€2_EV0_HP1",
    "H_P1_A1_€3_EV0_HP0",
    "H_P1_A2_€1_EV0_HP0",
    "H_P1_A2_€1_EV0_HP1",
    "H_P1_A2_€2_EV0_HP0",
    "H_P1_A2_€2_EV0_HP1",
    "H_P1_A2_€3_EV0_HP0",
    "H_P1_A3_€1_EV0_HP0",
    "H_P1_A3_€1_EV0_HP1",
    "H_P1_A3_€2_EV0_HP0",
    "H_P1_A3_€2_EV0_HP1",
    "H_P1_A3_€3_EV0_HP0",
    "H_P2_A1_€1_EV0_HP0",
    "H_P2_A1_€2_EV0_HP0",
    "H_P2_A1_€2_EV0_HP1",
    "H_P2_A1_€3_EV0_HP0",
    "H_P2_A1_€3_EV0_HP1",
    "H_P2_A2_€1_EV0_HP0",
    "H_P2_A2_€1_EV0_HP1",
    "H_P2_A2_€2_EV0_HP0",
    "H_P2_A2_€2_EV0_HP1",
    "H_P2_A2_€3_EV0_HP0",
    "H_P2_A2_€3_EV0_HP1",
    "H_P2_A3_€2_EV0_HP0",
    "H_P2_A3_€2_EV0_HP1",
    "H_P2_A3_€3_EV0_HP0",
    "H_P2_A3_€3_EV0_HP1",
    "H_P3_A1_€1_EV0_HP0",
    "H_P3_A1_€2_EV0_HP0",
    "H_P3_A1_€3_EV0_HP0",
    "H_P3_A1_€3_EV0_HP1",
    "H_P3_A2_€1_EV0_HP0",
    "H_P3_A2_€2_EV0_HP0",
    "H_P3_A2_€2_EV0_HP1",
    "H_P3_A2_€3_EV0_HP0",
    "H_P3_A2_€3_EV0_HP1",
    "H_P3_A2_€3_EV1_HP0",
    "H_P3_A3_€1_EV0_HP0",
    "H_P3_A3_€2_EV0_HP0",
    "H_P3_A3_€2_EV0_HP1",
    "H_P3_A3_€3_EV0_HP0",
    "H_P3_A3_€3_EV0_HP1",
    "H_P3_A3_€3_EV1_HP0",
    "H_P5+_A1_€1_EV0_HP0",
    "H_P5+_A1_€2_EV0_HP0",
    "H_P5+_A1_€3_EV0_HP0",
    "H_P5+_A2_€1_EV0_HP0",
    "H_P5+_A2_€2_EV0_HP0",
    "H_P5+_A2_€3_EV0_HP0",
    "H_P5+_A2_€3_EV0_HP1",
    "H_P5+_A3_€1_EV0_HP0",
    "H_P5+_A3_€2_EV0_HP0",
    "H_P5+_A3_€3_EV0_HP0",
    "H_P5+_A3_€3_EV0_HP1",
    "H_P5+_A3_€3_EV1_HP0",
];

/// All knobs of the generator. Unset fields fall back to defaults, so a
/// JSON configuration may specify only what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    /// Calendar year the profiles cover; decides 8760 vs 8784 hours.
    pub year: i32,
    pub seed: u64,
    /// Annual base consumption of a one-person small apartment, kWh.
    pub base_annual_kwh: f64,
    /// Consumption multiplier per occupancy band.
    pub occupancy_factors: BTreeMap<Occupancy, f64>,
    /// Consumption multiplier per area band, within each dwelling type.
    pub area_factors: BTreeMap<DwellingType, BTreeMap<AreaBand, f64>>,
    /// Consumption multiplier per income band.
    pub income_factors: BTreeMap<IncomeBand, f64>,
    /// Annual heat pump consumption, kWh.
    pub hp_annual_kwh: f64,
    /// Annual EV charging consumption, kWh.
    pub ev_annual_kwh: f64,
    /// Share of EV energy charged in the night window (22:00 to 06:00).
    pub night_charging_share: f64,
    /// Standard deviation of the log-normal per-hour noise.
    pub noise_amplitude: f64,
    /// Non-household load added to the derived system load, MW.
    pub industrial_baseline_mw: f64,
    /// Same household count for every category, overriding the built-in
    /// census-like table.
    pub default_n_households: Option<u64>,
    /// Per-label household count overrides, applied last.
    pub n_households_overrides: BTreeMap<String, u64>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let occupancy_factors = [
            (Occupancy::One, 1.0),
            (Occupancy::Two, 1.55),
            (Occupancy::ThreeToFour, 2.05),
            (Occupancy::FivePlus, 2.65),
        ]
        .into_iter()
        .collect();
        let apartment_areas: BTreeMap<AreaBand, f64> = [
            (AreaBand::A1, 1.0),
            (AreaBand::A2, 1.25),
            (AreaBand::A3, 1.55),
        ]
        .into_iter()
        .collect();
        let house_areas: BTreeMap<AreaBand, f64> = [
            (AreaBand::A1, 1.6),
            (AreaBand::A2, 1.95),
            (AreaBand::A3, 2.4),
        ]
        .into_iter()
        .collect();
        let area_factors = [
            (DwellingType::Apartment, apartment_areas),
            (DwellingType::House, house_areas),
        ]
        .into_iter()
        .collect();
        let income_factors = [
            (IncomeBand::E1, 1.0),
            (IncomeBand::E2, 1.12),
            (IncomeBand::E3, 1.28),
        ]
        .into_iter()
        .collect();
        GeneratorConfig {
            year: 2017,
            seed: 42,
            base_annual_kwh: 1600.0,
            occupancy_factors,
            area_factors,
            income_factors,
            hp_annual_kwh: 3600.0,
            ev_annual_kwh: 2600.0,
            night_charging_share: 0.85,
            noise_amplitude: 0.08,
            industrial_baseline_mw: 150.0,
            default_n_households: None,
            n_households_overrides: BTreeMap::new(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("base_annual_kwh", self.base_annual_kwh)?;
        for occupancy in Occupancy::ALL {
            let v = self
                .occupancy_factors
                .get(&occupancy)
                .copied()
                .ok_or_else(|| {
                    Error::config(format!("occupancy_factors misses {}", occupancy.code()))
                })?;
            positive("occupancy factor", v)?;
        }
        for dwelling in DwellingType::ALL {
            let areas = self
                .area_factors
                .get(&dwelling)
                .ok_or_else(|| Error::config(format!("area_factors misses {}", dwelling.code())))?;
            for area in AreaBand::ALL {
                let v = areas.get(&area).copied().ok_or_else(|| {
                    Error::config(format!(
                        "area_factors misses {}/{}",
                        dwelling.code(),
                        area.code()
                    ))
                })?;
                positive("area factor", v)?;
            }
        }
        for income in IncomeBand::ALL {
            let v =
                self.income_factors.get(&income).copied().ok_or_else(|| {
                    Error::config(format!("income_factors misses {}", income.code()))
                })?;
            positive("income factor", v)?;
        }
        positive("hp_annual_kwh", self.hp_annual_kwh)?;
        positive("ev_annual_kwh", self.ev_annual_kwh)?;
        if !(self.night_charging_share.is_finite()
            && (0.0..=1.0).contains(&self.night_charging_share))
        {
            return Err(Error::config(format!(
                "night_charging_share must lie in [0, 1], got {}",
                self.night_charging_share
            )));
        }
        if !(self.noise_amplitude.is_finite() && (0.0..=0.5).contains(&self.noise_amplitude)) {
            return Err(Error::config(format!(
                "noise_amplitude must lie in [0, 0.5], got {}",
                self.noise_amplitude
            )));
        }
        if !(self.industrial_baseline_mw.is_finite() && self.industrial_baseline_mw >= 0.0) {
            return Err(Error::config(format!(
                "industrial_baseline_mw must be non-negative, got {}",
                self.industrial_baseline_mw
            )));
        }
        if self.default_n_households == Some(0) {
            return Err(Error::config("default_n_households must be at least 1"));
        }
        for (label, &n) in &self.n_households_overrides {
            if !DEFAULT_CATEGORY_LABELS.contains(&label.as_str()) {
                return Err(Error::config(format!(
                    "n_households_overrides names unknown category {label:?}"
                )));
            }
            if n == 0 {
                return Err(Error::config(format!(
                    "n_households_overrides sets {label:?} to zero"
                )));
            }
        }
        Ok(())
    }
}

/// One random stream per (seed, socio-economic cell, component).
fn component_rng(seed: u64, socio_cell: &str, component: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(socio_cell.as_bytes());
    hasher.update([0u8]);
    hasher.update(component.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Unnormalized Gaussian bump.
fn bump(x: f64, center: f64, width: f64) -> f64 {
    (-((x - center) / width).powi(2)).exp()
}

/// Multiplies each value by log-normal noise with mean one.
fn apply_noise(values: &mut [f64], sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma == 0.0 {
        return;
    }
    for v in values.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v *= (sigma * z - 0.5 * sigma * sigma).exp();
    }
}

/// Scales values so they sum to `target`.
fn scale_to_annual(values: &mut [f64], target: f64) {
    let sum: f64 = values.iter().sum();
    if sum > 0.0 {
        let factor = target / sum;
        for v in values.iter_mut() {
            *v *= factor;
        }
    }
}

/// Seasonal factor peaking in mid January, 0-based day of year.
fn seasonal(day: u32, days_in_year: f64, swing: f64) -> f64 {
    1.0 + swing * (2.0 * PI * (day as f64 - 14.0) / days_in_year).cos()
}

/// Base household component: double-humped day shape times winter seasonality.
fn base_component(
    hours: usize,
    days_in_year: f64,
    annual_kwh: f64,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut values: Vec<f64> = (0..hours)
        .map(|t| {
            let hod = (t % 24) as f64;
            let day = (t / 24) as u32;
            let daily = 0.35 + 0.35 * bump(hod, 7.5, 2.0) + 0.85 * bump(hod, 18.5, 2.5);
            daily * seasonal(day, days_in_year, 0.32)
        })
        .collect();
    apply_noise(&mut values, sigma, rng);
    scale_to_annual(&mut values, annual_kwh);
    values
}

/// Heat pump component: heating demand proxy, zero in summer, strongest on
/// winter evenings.
fn hp_component(
    hours: usize,
    days_in_year: f64,
    annual_kwh: f64,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let cutoff = -0.3;
    let mut values: Vec<f64> = (0..hours)
        .map(|t| {
            let hod = (t % 24) as f64;
            let day = (t / 24) as u32;
            let phase = (2.0 * PI * (day as f64 - 14.0) / days_in_year).cos();
            let heating = ((phase - cutoff) / (1.0 - cutoff)).max(0.0);
            let daily = 0.6 + 0.5 * bump(hod, 18.5, 3.0) + 0.2 * bump(hod, 7.0, 2.5);
            heating * daily
        })
        .collect();
    apply_noise(&mut values, sigma, rng);
    scale_to_annual(&mut values, annual_kwh);
    values
}

/// First hour of day inside the night charging window (22:00 to 06:00).
fn is_night_hour(t: usize) -> bool {
    !(6..22).contains(&(t % 24))
}

/// EV charging component: discrete two-hour sessions, split between night
/// and day windows exactly according to the configured share.
fn ev_component(
    hours: usize,
    annual_kwh: f64,
    night_share: f64,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let days = hours / 24;
    let total_sessions: u32 = 180;
    let mut night_sessions = (total_sessions as f64 * night_share).round() as u32;
    if night_share > 0.0 {
        night_sessions = night_sessions.max(1);
    }
    if night_share < 1.0 {
        night_sessions = night_sessions.min(total_sessions - 1);
    }
    let day_sessions = total_sessions - night_sessions;
    let energy_per_session = annual_kwh / total_sessions as f64;

    let mut values = vec![0.0; hours];
    let mut place = |starts: &[usize], sessions: u32, rng: &mut ChaCha8Rng| {
        for _ in 0..sessions {
            let day = rng.random_range(0..days);
            let start_hod = starts[rng.random_range(0..starts.len())];
            let power = 0.5 * energy_per_session * rng.random_range(0.8..1.2);
            let t = day * 24 + start_hod;
            values[t] += power;
            if t + 1 < hours {
                values[t + 1] += power;
            }
        }
    };
    // Night sessions stay inside the window even when they cross midnight.
    place(&[22, 23, 0, 1, 2, 3, 4], night_sessions, rng);
    place(&[9, 10, 11, 12, 13, 14, 15], day_sessions, rng);

    apply_noise(&mut values, sigma, rng);

    // Rescale each window separately so the night share is exact.
    let mut night_sum = 0.0;
    let mut day_sum = 0.0;
    for (t, v) in values.iter().enumerate() {
        if is_night_hour(t) {
            night_sum += v;
        } else {
            day_sum += v;
        }
    }
    for (t, v) in values.iter_mut().enumerate() {
        if is_night_hour(t) {
            if night_sum > 0.0 {
                *v *= night_share * annual_kwh / night_sum;
            }
        } else if day_sum > 0.0 {
            *v *= (1.0 - night_share) * annual_kwh / day_sum;
        }
    }
    values
}

/// Built-in census-like household count for a category.
fn builtin_count(key: &CategoryKey) -> u64 {
    let dwelling = match key.dwelling {
        DwellingType::Apartment => 1.3,
        DwellingType::House => 1.0,
    };
    let occupancy = match key.occupancy {
        Occupancy::One => 1.6,
        Occupancy::Two => 1.3,
        Occupancy::ThreeToFour => 0.9,
        Occupancy::FivePlus => 0.45,
    };
    let area = match key.area {
        AreaBand::A1 => 1.3,
        AreaBand::A2 => 1.0,
        AreaBand::A3 => 0.75,
    };
    let income = match key.income {
        IncomeBand::E1 => 1.15,
        IncomeBand::E2 => 1.0,
        IncomeBand::E3 => 0.85,
    };
    let ev = if key.ev { 0.06 } else { 1.0 };
    let hp = if key.hp { 0.25 } else { 1.0 };
    let count: f64 = 1000.0 * dwelling * occupancy * area * income * ev * hp;
    (count.round() as u64).max(1)
}

fn resolve_count(cfg: &GeneratorConfig, label: &str, key: &CategoryKey) -> u64 {
    if let Some(&n) = cfg.n_households_overrides.get(label) {
        return n;
    }
    if let Some(n) = cfg.default_n_households {
        return n;
    }
    builtin_count(key)
}

/// Builds the profile of one category from its components.
fn build_record(cfg: &GeneratorConfig, label: &str) -> CategoryRecord {
    let key = CategoryKey::parse_label(label).expect("labels in the table are canonical");
    let hours = calendar::hours_in_year(cfg.year);
    let days_in_year = (hours / 24) as f64;
    let socio_cell = format!(
        "{}_{}_{}_{}",
        key.dwelling.label_part(),
        key.occupancy.code(),
        key.area.code(),
        key.income.label_part()
    );
    let annual_base = cfg.base_annual_kwh
        * cfg.occupancy_factors[&key.occupancy]
        * cfg.area_factors[&key.dwelling][&key.area]
        * cfg.income_factors[&key.income];

    let mut rng = component_rng(cfg.seed, &socio_cell, "base");
    let mut hourly_kwh = base_component(
        hours,
        days_in_year,
        annual_base,
        cfg.noise_amplitude,
        &mut rng,
    );
    if key.hp {
        let mut rng = component_rng(cfg.seed, &socio_cell, "hp");
        let hp = hp_component(
            hours,
            days_in_year,
            cfg.hp_annual_kwh,
            cfg.noise_amplitude,
            &mut rng,
        );
        for (v, h) in hourly_kwh.iter_mut().zip(&hp) {
            *v += h;
        }
    }
    if key.ev {
        let mut rng = component_rng(cfg.seed, &socio_cell, "ev");
        let ev = ev_component(
            hours,
            cfg.ev_annual_kwh,
            cfg.night_charging_share,
            cfg.noise_amplitude,
            &mut rng,
        );
        for (v, e) in hourly_kwh.iter_mut().zip(&ev) {
            *v += e;
        }
    }
    CategoryRecord {
        key,
        n_households: resolve_count(cfg, label, &key),
        hourly_kwh,
    }
}

/// Derives the system load: industrial baseline plus aggregate household
/// consumption converted from kWh to MW.
pub fn derive_system_load(dataset: &Dataset, industrial_baseline_mw: f64) -> Result<SystemLoad> {
    if !(industrial_baseline_mw.is_finite() && industrial_baseline_mw >= 0.0) {
        return Err(Error::config(format!(
            "industrial_baseline_mw must be non-negative, got {industrial_baseline_mw}"
        )));
    }
    let mut load = vec![industrial_baseline_mw; dataset.hours()];
    for record in dataset.categories() {
        let n = record.n_households as f64;
        for (slot, &kwh) in load.iter_mut().zip(&record.hourly_kwh) {
            *slot += n * kwh / 1000.0;
        }
    }
    SystemLoad::new(load)
}

/// Generates the full synthetic dataset for a configuration.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<Dataset> {
    cfg.validate()?;
    let records = exec::map_ordered(&DEFAULT_CATEGORY_LABELS, |label| build_record(cfg, label));
    let hours = calendar::hours_in_year(cfg.year);
    let mut load = vec![cfg.industrial_baseline_mw; hours];
    for record in &records {
        let n = record.n_households as f64;
        for (slot, &kwh) in load.iter_mut().zip(&record.hourly_kwh) {
            *slot += n * kwh / 1000.0;
        }
    }
    Dataset::new(cfg.year, records, SystemLoad::new(load)?)
}

/// Provenance record written next to a generated dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub engine_version: String,
    pub dataset_sha256: String,
    pub category_count: usize,
    pub hours: usize,
    pub config: GeneratorConfig,
}

pub fn provenance(dataset: &Dataset, cfg: &GeneratorConfig) -> Provenance {
    Provenance {
        engine_version: ENGINE_VERSION.to_string(),
        dataset_sha256: dataset.sha256_hex(),
        category_count: dataset.categories().len(),
        hours: dataset.hours(),
        config: cfg.clone(),
    }
}
