//! Shared fixtures for unit tests.

use crate::dataset::{CategoryKey, CategoryRecord, Dataset, SystemLoad};

pub(crate) fn key(label: &str) -> CategoryKey {
    CategoryKey::parse_label(label).unwrap()
}

/// Single category, four hours: profile `[0.5, 2.0, 0.5, 3.0]`, one
/// household, system load `[10, 40, 20, 30]` MW.
pub(crate) fn toy_dataset() -> Dataset {
    let record = CategoryRecord {
        key: key("Ap_P1_A1_\u{20ac}1_EV0_HP0"),
        n_households: 1,
        hourly_kwh: vec![0.5, 2.0, 0.5, 3.0],
    };
    let load = SystemLoad::new(vec![10.0, 40.0, 20.0, 30.0]).unwrap();
    Dataset::new(2017, vec![record], load).unwrap()
}

/// A handful of categories over 48 hours with distinct deterministic shapes.
pub(crate) fn tiny_dataset() -> Dataset {
    let labels = [
        ("Ap_P1_A1_\u{20ac}1_EV0_HP0", 40, 0.3),
        ("Ap_P2_A2_\u{20ac}2_EV0_HP0", 25, 0.5),
        ("H_P2_A1_\u{20ac}1_EV0_HP0", 20, 0.7),
        ("H_P3_A2_\u{20ac}2_EV0_HP1", 10, 1.1),
        ("H_P3_A2_\u{20ac}3_EV1_HP0", 5, 0.9),
        ("H_P5+_A3_\u{20ac}3_EV0_HP1", 5, 1.4),
    ];
    let hours = 48;
    let categories: Vec<CategoryRecord> = labels
        .iter()
        .map(|&(label, n_households, scale)| {
            let hourly_kwh: Vec<f64> = (0..hours)
                .map(|t| {
                    let hod = (t % 24) as f64;
                    // Evening hump plus a small household-specific wobble.
                    let shape = 0.4 + 1.2 * (-((hod - 18.0) / 3.0).powi(2)).exp();
                    scale * shape * (1.0 + 0.05 * ((t * 7 + label.len()) % 13) as f64 / 13.0)
                })
                .collect();
            CategoryRecord {
                key: key(label),
                n_households,
                hourly_kwh,
            }
        })
        .collect();
    let load: Vec<f64> = (0..hours)
        .map(|t| {
            let household: f64 = categories
                .iter()
                .map(|c| c.n_households as f64 * c.hourly_kwh[t])
                .sum();
            2.0 + household / 1000.0
        })
        .collect();
    Dataset::new(2017, categories, SystemLoad::new(load).unwrap()).unwrap()
}
