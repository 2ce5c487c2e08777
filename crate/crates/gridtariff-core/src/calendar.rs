//! Minimal calendar arithmetic for hourly time series.
//!
//! Hour indices run from 0 at 00:00 on 1 January in local standard time;
//! daylight saving time is ignored, so every day has 24 hours.

/// Days per month in a non-leap year, January first.
const MONTH_DAYS: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Gregorian leap year rule.
pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

/// Number of hours in the given year (8760 or 8784).
pub fn hours_in_year(year: i32) -> usize {
    if is_leap_year(year) {
        8784
    } else {
        8760
    }
}

/// Calendar month (1 to 12) containing hour `t` of the given year.
///
/// Panics if `t` lies beyond the end of the year.
pub fn month_of_hour(year: i32, t: usize) -> u32 {
    let mut day = (t / 24) as u32;
    let leap = is_leap_year(year);
    for (i, &len) in MONTH_DAYS.iter().enumerate() {
        let len = if i == 1 && leap { len + 1 } else { len };
        if day < len {
            return i as u32 + 1;
        }
        day -= len;
    }
    panic!("hour {t} is beyond the end of year {year}");
}

/// Hour of day (0 to 23) for hour index `t`.
pub fn hour_of_day(t: usize) -> u32 {
    (t % 24) as u32
}

/// Day of year (0-based) for hour index `t`.
pub fn day_of_year(t: usize) -> u32 {
    (t / 24) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leap_years() {
        assert!(is_leap_year(2016));
        assert!(is_leap_year(2000));
        assert!(!is_leap_year(2017));
        assert!(!is_leap_year(1900));
        assert_eq!(hours_in_year(2017), 8760);
        assert_eq!(hours_in_year(2016), 8784);
    }

    #[test]
    fn month_boundaries() {
        assert_eq!(month_of_hour(2017, 0), 1);
        assert_eq!(month_of_hour(2017, 31 * 24 - 1), 1);
        assert_eq!(month_of_hour(2017, 31 * 24), 2);
        // 28 February 2017 ends at hour (31 + 28) * 24 - 1.
        assert_eq!(month_of_hour(2017, 59 * 24 - 1), 2);
        assert_eq!(month_of_hour(2017, 59 * 24), 3);
        // 2016 is a leap year, so hour 59 * 24 is still 29 February.
        assert_eq!(month_of_hour(2016, 59 * 24), 2);
        assert_eq!(month_of_hour(2016, 60 * 24), 3);
        assert_eq!(month_of_hour(2017, 8759), 12);
        assert_eq!(month_of_hour(2016, 8783), 12);
    }

    #[test]
    fn hour_of_day_wraps() {
        assert_eq!(hour_of_day(0), 0);
        assert_eq!(hour_of_day(23), 23);
        assert_eq!(hour_of_day(24), 0);
        assert_eq!(hour_of_day(8759), 23);
    }

    #[test]
    #[should_panic]
    fn month_of_hour_rejects_out_of_range() {
        month_of_hour(2017, 8760);
    }
}
