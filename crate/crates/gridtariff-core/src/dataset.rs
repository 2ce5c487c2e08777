//! Household category data model and CSV input/output.
//!
//! A dataset couples per-category hourly consumption profiles with household
//! counts and an hourly system load series. On disk it is a directory with
//! three files:
//!
//! * `categories.csv`: `category_id,dwelling_type,occupancy,area_band,income_band,ev,hp,n_households`
//! * `profiles.csv`: `category_id,hour,kwh_per_household` in long format
//! * `system_load.csv`: `hour,load_mw`
//!
//! All files are UTF-8 with `.` as decimal separator. Hours are 0-based local
//! standard time starting at 00:00 on 1 January. Floats are written in
//! shortest round-trip notation, so writing and re-reading a dataset
//! reproduces it bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calendar;
use crate::{Error, Result};

/// Dwelling type of a household category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DwellingType {
    #[serde(rename = "AP")]
    Apartment,
    #[serde(rename = "H")]
    House,
}

impl DwellingType {
    pub const ALL: [DwellingType; 2] = [DwellingType::Apartment, DwellingType::House];

    /// Code used in `categories.csv`.
    pub fn code(self) -> &'static str {
        match self {
            DwellingType::Apartment => "AP",
            DwellingType::House => "H",
        }
    }

    /// Part used in canonical category labels.
    pub fn label_part(self) -> &'static str {
        match self {
            DwellingType::Apartment => "Ap",
            DwellingType::House => "H",
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "AP" => Some(DwellingType::Apartment),
            "H" => Some(DwellingType::House),
            _ => None,
        }
    }

    fn from_label_part(s: &str) -> Option<Self> {
        match s {
            "Ap" => Some(DwellingType::Apartment),
            "H" => Some(DwellingType::House),
            _ => None,
        }
    }
}

/// Occupancy band: one, two, three to four, or five and more persons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Occupancy {
    #[serde(rename = "P1")]
    One,
    #[serde(rename = "P2")]
    Two,
    #[serde(rename = "P3")]
    ThreeToFour,
    #[serde(rename = "P5+")]
    FivePlus,
}

impl Occupancy {
    pub const ALL: [Occupancy; 4] = [
        Occupancy::One,
        Occupancy::Two,
        Occupancy::ThreeToFour,
        Occupancy::FivePlus,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Occupancy::One => "P1",
            Occupancy::Two => "P2",
            Occupancy::ThreeToFour => "P3",
            Occupancy::FivePlus => "P5+",
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "P1" => Some(Occupancy::One),
            "P2" => Some(Occupancy::Two),
            "P3" => Some(Occupancy::ThreeToFour),
            "P5+" => Some(Occupancy::FivePlus),
            _ => None,
        }
    }
}

/// Dwelling area band, smallest to largest within a dwelling type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AreaBand {
    A1,
    A2,
    A3,
}

impl AreaBand {
    pub const ALL: [AreaBand; 3] = [AreaBand::A1, AreaBand::A2, AreaBand::A3];

    pub fn code(self) -> &'static str {
        match self {
            AreaBand::A1 => "A1",
            AreaBand::A2 => "A2",
            AreaBand::A3 => "A3",
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "A1" => Some(AreaBand::A1),
            "A2" => Some(AreaBand::A2),
            "A3" => Some(AreaBand::A3),
            _ => None,
        }
    }
}

/// Household income band, lowest to highest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IncomeBand {
    E1,
    E2,
    E3,
}

impl IncomeBand {
    pub const ALL: [IncomeBand; 3] = [IncomeBand::E1, IncomeBand::E2, IncomeBand::E3];

    pub fn code(self) -> &'static str {
        match self {
            IncomeBand::E1 => "E1",
            IncomeBand::E2 => "E2",
            IncomeBand::E3 => "E3",
        }
    }

    /// Part used in canonical category labels.
    pub fn label_part(self) -> &'static str {
        match self {
            IncomeBand::E1 => "\u{20ac}1",
            IncomeBand::E2 => "\u{20ac}2",
            IncomeBand::E3 => "\u{20ac}3",
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "E1" => Some(IncomeBand::E1),
            "E2" => Some(IncomeBand::E2),
            "E3" => Some(IncomeBand::E3),
            _ => None,
        }
    }

    fn from_label_part(s: &str) -> Option<Self> {
        match s {
            "\u{20ac}1" => Some(IncomeBand::E1),
            "\u{20ac}2" => Some(IncomeBand::E2),
            "\u{20ac}3" => Some(IncomeBand::E3),
            _ => None,
        }
    }
}

/// Full socio-techno-economic key of a household category.
///
/// The derived ordering (dwelling, occupancy, area, income, EV, HP) matches
/// the lexicographic order of canonical labels and is the canonical row order
/// of all emitted files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CategoryKey {
    pub dwelling: DwellingType,
    pub occupancy: Occupancy,
    pub area: AreaBand,
    pub income: IncomeBand,
    /// Household owns an electric vehicle charged at home.
    pub ev: bool,
    /// Household heats with a heat pump.
    pub hp: bool,
}

impl CategoryKey {
    /// Canonical label, e.g. `Ap_P1_A1_€1_EV0_HP0`.
    pub fn label(&self) -> String {
        format!(
            "{}_{}_{}_{}_EV{}_HP{}",
            self.dwelling.label_part(),
            self.occupancy.code(),
            self.area.code(),
            self.income.label_part(),
            u8::from(self.ev),
            u8::from(self.hp),
        )
    }

    /// Parses a canonical label back into a key.
    pub fn parse_label(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('_').collect();
        let err = || Error::schema("category label", format!("malformed label {s:?}"));
        if parts.len() != 6 {
            return Err(err());
        }
        let flag = |part: &str, prefix: &str| match part.strip_prefix(prefix) {
            Some("0") => Some(false),
            Some("1") => Some(true),
            _ => None,
        };
        Ok(CategoryKey {
            dwelling: DwellingType::from_label_part(parts[0]).ok_or_else(err)?,
            occupancy: Occupancy::from_code(parts[1]).ok_or_else(err)?,
            area: AreaBand::from_code(parts[2]).ok_or_else(err)?,
            income: IncomeBand::from_label_part(parts[3]).ok_or_else(err)?,
            ev: flag(parts[4], "EV").ok_or_else(err)?,
            hp: flag(parts[5], "HP").ok_or_else(err)?,
        })
    }
}

impl fmt::Display for CategoryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for CategoryKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryKey::parse_label(s)
    }
}

/// One household category: key, household count and hourly profile.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoryRecord {
    pub key: CategoryKey,
    /// Number of households aggregated into this category.
    pub n_households: u64,
    /// Consumption of a single average household, kWh per hour.
    pub hourly_kwh: Vec<f64>,
}

impl CategoryRecord {
    /// Annual consumption of one household in kWh.
    pub fn annual_kwh(&self) -> f64 {
        self.hourly_kwh.iter().sum()
    }
}

/// Hourly system load of the grid area in MW.
///
/// Guaranteed non-empty, finite, non-negative and not constant, so ranking
/// hours by load is always meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemLoad {
    values: Vec<f64>,
}

impl SystemLoad {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_series("system load", &values)?;
        if values.iter().all(|&v| v == values[0]) {
            return Err(Error::DegenerateLoad);
        }
        Ok(SystemLoad { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Checks that a series is non-empty with finite, non-negative values.
fn validate_series(subject: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::schema(subject, "series is empty"));
    }
    for (hour, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::schema(
                subject,
                format!("non-finite value {v} at hour {hour}"),
            ));
        }
        if v < 0.0 {
            return Err(Error::NegativeValue {
                subject: subject.to_string(),
                hour,
                value: v,
            });
        }
    }
    Ok(())
}

/// A validated set of household categories plus the system load series.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    year: i32,
    hours: usize,
    categories: Vec<CategoryRecord>,
    system_load: SystemLoad,
}

/// Annual per-household consumption by category and the system-wide total.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsumptionTotals {
    /// kWh per year for one household of each category.
    pub per_household_kwh: BTreeMap<CategoryKey, f64>,
    /// kWh per year over all households, weighted by household counts.
    pub grand_total_kwh: f64,
}

impl Dataset {
    /// Builds a dataset from parts, validating all invariants.
    ///
    /// Categories are sorted into canonical key order. The year only matters
    /// for calendar-based schedules and must match the hour count when the
    /// data covers a full year.
    pub fn new(
        year: i32,
        categories: Vec<CategoryRecord>,
        system_load: SystemLoad,
    ) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::config("dataset needs at least one category"));
        }
        let hours = categories[0].hourly_kwh.len();
        for c in &categories {
            let label = c.key.label();
            if c.hourly_kwh.len() != hours {
                return Err(Error::LengthMismatch {
                    subject: format!("category {label}"),
                    expected: hours,
                    found: c.hourly_kwh.len(),
                });
            }
            validate_series(&format!("category {label}"), &c.hourly_kwh)?;
            if c.n_households == 0 {
                return Err(Error::config(format!(
                    "category {label} has zero households"
                )));
            }
        }
        if system_load.len() != hours {
            return Err(Error::LengthMismatch {
                subject: "system load".to_string(),
                expected: hours,
                found: system_load.len(),
            });
        }
        if (hours == 8760 || hours == 8784) && calendar::hours_in_year(year) != hours {
            return Err(Error::config(format!(
                "year {year} does not have {hours} hours"
            )));
        }
        let mut categories = categories;
        categories.sort_by_key(|c| c.key);
        for pair in categories.windows(2) {
            if pair[0].key == pair[1].key {
                return Err(Error::config(format!(
                    "duplicate category {}",
                    pair[0].key.label()
                )));
            }
        }
        Ok(Dataset {
            year,
            hours,
            categories,
            system_load,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// Number of hours covered by every profile and the system load.
    pub fn hours(&self) -> usize {
        self.hours
    }

    /// Categories in canonical key order.
    pub fn categories(&self) -> &[CategoryRecord] {
        &self.categories
    }

    pub fn get(&self, key: &CategoryKey) -> Option<&CategoryRecord> {
        self.categories
            .binary_search_by(|c| c.key.cmp(key))
            .ok()
            .map(|i| &self.categories[i])
    }

    pub fn system_load(&self) -> &SystemLoad {
        &self.system_load
    }

    /// Household count per category.
    pub fn household_counts(&self) -> BTreeMap<CategoryKey, u64> {
        self.categories
            .iter()
            .map(|c| (c.key, c.n_households))
            .collect()
    }

    /// Replaces the system load series, revalidating the length.
    pub fn with_system_load(self, system_load: SystemLoad) -> Result<Self> {
        Dataset::new(self.year, self.categories, system_load)
    }

    /// Annual per-household consumption and the count-weighted grand total.
    pub fn total_consumption(&self) -> ConsumptionTotals {
        let per_household_kwh: BTreeMap<CategoryKey, f64> = self
            .categories
            .iter()
            .map(|c| (c.key, c.annual_kwh()))
            .collect();
        let grand_total_kwh = self
            .categories
            .iter()
            .map(|c| c.n_households as f64 * c.annual_kwh())
            .sum();
        ConsumptionTotals {
            per_household_kwh,
            grand_total_kwh,
        }
    }

    /// Loads a dataset from a directory holding the three standard files.
    pub fn load(dir: &Path) -> Result<Self> {
        load_dataset(
            &dir.join("profiles.csv"),
            &dir.join("categories.csv"),
            &dir.join("system_load.csv"),
        )
    }

    /// Writes `categories.csv`, `profiles.csv` and `system_load.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let (categories, profiles, system_load) = self.to_csv_strings();
        std::fs::write(dir.join("categories.csv"), categories)?;
        std::fs::write(dir.join("profiles.csv"), profiles)?;
        std::fs::write(dir.join("system_load.csv"), system_load)?;
        Ok(())
    }

    /// SHA-256 over the canonical CSV serialization, as a hex string.
    pub fn sha256_hex(&self) -> String {
        let (categories, profiles, system_load) = self.to_csv_strings();
        let mut hasher = Sha256::new();
        hasher.update(categories.as_bytes());
        hasher.update(profiles.as_bytes());
        hasher.update(system_load.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Canonical CSV serialization of the three files.
    fn to_csv_strings(&self) -> (String, String, String) {
        let mut categories = String::from(
            "category_id,dwelling_type,occupancy,area_band,income_band,ev,hp,n_households\n",
        );
        for c in &self.categories {
            categories.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.key.label(),
                c.key.dwelling.code(),
                c.key.occupancy.code(),
                c.key.area.code(),
                c.key.income.code(),
                u8::from(c.key.ev),
                u8::from(c.key.hp),
                c.n_households,
            ));
        }
        let mut profiles = String::from("category_id,hour,kwh_per_household\n");
        for c in &self.categories {
            let label = c.key.label();
            for (hour, kwh) in c.hourly_kwh.iter().enumerate() {
                profiles.push_str(&format!("{label},{hour},{kwh}\n"));
            }
        }
        let mut system_load = String::from("hour,load_mw\n");
        for (hour, mw) in self.system_load.values().iter().enumerate() {
            system_load.push_str(&format!("{hour},{mw}\n"));
        }
        (categories, profiles, system_load)
    }
}

/// Raw row of `categories.csv` before cross-field validation.
struct CategoryRow {
    key: CategoryKey,
    n_households: u64,
}

/// Loads and validates a dataset from the three CSV files.
///
/// The calendar year is inferred from the hour count: 8760 hours map to a
/// non-leap year, 8784 to a leap year. Datasets with any other hour count are
/// accepted but cannot use calendar-based schedules.
pub fn load_dataset(
    profiles_path: &Path,
    categories_path: &Path,
    system_load_path: &Path,
) -> Result<Dataset> {
    let categories = read_categories(categories_path)?;
    let profiles = read_profiles(profiles_path)?;
    let load = read_system_load(system_load_path)?;

    let file = file_name(profiles_path);
    let mut records = Vec::with_capacity(categories.len());
    let mut profiles = profiles;
    for row in &categories {
        let label = row.key.label();
        let series = profiles
            .remove(&label)
            .ok_or_else(|| Error::schema(&file, format!("no profile rows for category {label}")))?;
        records.push(CategoryRecord {
            key: row.key,
            n_households: row.n_households,
            hourly_kwh: assemble_series(&file, &format!("category {label}"), series, None)?,
        });
    }
    if let Some(orphan) = profiles.keys().next() {
        return Err(Error::schema(
            &file,
            format!("category {orphan} is not listed in categories.csv"),
        ));
    }

    let hours = records[0].hourly_kwh.len();
    for r in &records {
        if r.hourly_kwh.len() != hours {
            return Err(Error::LengthMismatch {
                subject: format!("category {}", r.key.label()),
                expected: hours,
                found: r.hourly_kwh.len(),
            });
        }
    }
    let load = assemble_series(
        &file_name(system_load_path),
        "system load",
        load,
        Some(hours),
    )?;
    let year = if hours == 8784 { 2016 } else { 2017 };
    Dataset::new(year, records, SystemLoad::new(load)?)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Turns unordered `(hour, value)` rows into a dense series over `[0, T)`.
fn assemble_series(
    file: &str,
    subject: &str,
    rows: Vec<(usize, f64)>,
    expected: Option<usize>,
) -> Result<Vec<f64>> {
    let hours = expected.unwrap_or_else(|| rows.iter().map(|&(h, _)| h + 1).max().unwrap_or(0));
    if let Some(expected) = expected {
        if rows.len() != expected {
            return Err(Error::LengthMismatch {
                subject: subject.to_string(),
                expected,
                found: rows.len(),
            });
        }
    }
    let mut series = vec![f64::NAN; hours];
    for (hour, value) in rows {
        if hour >= hours {
            return Err(Error::schema(
                file,
                format!("{subject}: hour {hour} is out of range (expected 0..{hours})"),
            ));
        }
        if !series[hour].is_nan() {
            return Err(Error::schema(
                file,
                format!("{subject}: duplicate hour {hour}"),
            ));
        }
        series[hour] = value;
    }
    if let Some(missing) = series.iter().position(|v| v.is_nan()) {
        return Err(Error::schema(
            file,
            format!("{subject}: missing hour {missing}"),
        ));
    }
    Ok(series)
}

fn open_reader(path: &Path, expected_header: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    if !path.is_file() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let file = file_name(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::schema(&file, e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| Error::schema(&file, e.to_string()))?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected_header {
        return Err(Error::schema(
            &file,
            format!(
                "unexpected header {:?}, expected {:?}",
                found.join(","),
                expected_header.join(",")
            ),
        ));
    }
    Ok(reader)
}

/// Parses one cell, mapping failures to a schema violation with row context.
fn parse_cell<T: FromStr>(file: &str, row: usize, column: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| {
        Error::schema(
            file,
            format!("row {row}: cannot parse {column} value {raw:?}"),
        )
    })
}

fn parse_kwh(file: &str, row: usize, column: &str, raw: &str, hour: usize) -> Result<f64> {
    let value: f64 = parse_cell(file, row, column, raw)?;
    if !value.is_finite() {
        return Err(Error::schema(
            file,
            format!("row {row}: non-finite {column} value {raw:?}"),
        ));
    }
    if value < 0.0 {
        return Err(Error::NegativeValue {
            subject: format!("{file} row {row}"),
            hour,
            value,
        });
    }
    Ok(value)
}

fn read_categories(path: &Path) -> Result<Vec<CategoryRow>> {
    let file = file_name(path);
    let header = [
        "category_id",
        "dwelling_type",
        "occupancy",
        "area_band",
        "income_band",
        "ev",
        "hp",
        "n_households",
    ];
    let mut reader = open_reader(path, &header)?;
    let mut rows: Vec<CategoryRow> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::schema(&file, e.to_string()))?;
        if record.len() != header.len() {
            return Err(Error::schema(
                &file,
                format!(
                    "row {row}: expected {} columns, found {}",
                    header.len(),
                    record.len()
                ),
            ));
        }
        let field = |col: usize| record[col].trim();
        let code_err = |column: &str, raw: &str| {
            Error::schema(&file, format!("row {row}: unknown {column} code {raw:?}"))
        };
        let dwelling =
            DwellingType::from_code(field(1)).ok_or_else(|| code_err("dwelling_type", field(1)))?;
        let occupancy =
            Occupancy::from_code(field(2)).ok_or_else(|| code_err("occupancy", field(2)))?;
        let area = AreaBand::from_code(field(3)).ok_or_else(|| code_err("area_band", field(3)))?;
        let income =
            IncomeBand::from_code(field(4)).ok_or_else(|| code_err("income_band", field(4)))?;
        let flag = |col: usize, column: &str| match field(col) {
            "0" => Ok(false),
            "1" => Ok(true),
            raw => Err(code_err(column, raw)),
        };
        let key = CategoryKey {
            dwelling,
            occupancy,
            area,
            income,
            ev: flag(5, "ev")?,
            hp: flag(6, "hp")?,
        };
        if field(0) != key.label() {
            return Err(Error::schema(
                &file,
                format!(
                    "row {row}: category_id {:?} does not match its fields (expected {:?})",
                    field(0),
                    key.label()
                ),
            ));
        }
        let n_households: u64 = parse_cell(&file, row, "n_households", field(7))?;
        if n_households == 0 {
            return Err(Error::schema(
                &file,
                format!("row {row}: n_households must be at least 1"),
            ));
        }
        if rows.iter().any(|r| r.key == key) {
            return Err(Error::schema(
                &file,
                format!("row {row}: duplicate category {}", key.label()),
            ));
        }
        rows.push(CategoryRow { key, n_households });
    }
    if rows.is_empty() {
        return Err(Error::schema(&file, "no category rows"));
    }
    Ok(rows)
}

fn read_profiles(path: &Path) -> Result<BTreeMap<String, Vec<(usize, f64)>>> {
    let file = file_name(path);
    let mut reader = open_reader(path, &["category_id", "hour", "kwh_per_household"])?;
    let mut by_category: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::schema(&file, e.to_string()))?;
        if record.len() != 3 {
            return Err(Error::schema(
                &file,
                format!("row {row}: expected 3 columns, found {}", record.len()),
            ));
        }
        let label = record[0].trim().to_string();
        CategoryKey::parse_label(&label).map_err(|_| {
            Error::schema(&file, format!("row {row}: malformed category_id {label:?}"))
        })?;
        let hour: usize = parse_cell(&file, row, "hour", &record[1])?;
        let kwh = parse_kwh(&file, row, "kwh_per_household", &record[2], hour)?;
        by_category.entry(label).or_default().push((hour, kwh));
    }
    if by_category.is_empty() {
        return Err(Error::schema(&file, "no profile rows"));
    }
    Ok(by_category)
}

fn read_system_load(path: &Path) -> Result<Vec<(usize, f64)>> {
    let file = file_name(path);
    let mut reader = open_reader(path, &["hour", "load_mw"])?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::schema(&file, e.to_string()))?;
        if record.len() != 2 {
            return Err(Error::schema(
                &file,
                format!("row {row}: expected 2 columns, found {}", record.len()),
            ));
        }
        let hour: usize = parse_cell(&file, row, "hour", &record[0])?;
        let mw = parse_kwh(&file, row, "load_mw", &record[1], hour)?;
        rows.push((hour, mw));
    }
    if rows.is_empty() {
        return Err(Error::schema(&file, "no system load rows"));
    }
    Ok(rows)
}
