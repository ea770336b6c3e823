//! Observed trip-duration statistics and the observed-to-simulated ratio table.
//!
//! The ratio table is a diagnostic. Nothing here feeds back into `alpha`.

use std::fmt;

use chrono::{DateTime, FixedOffset, NaiveDateTime, TimeZone, Utc};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub dispatch_time: DateTime<FixedOffset>,
    pub arrival_time: DateTime<FixedOffset>,
    pub severity_tag: Option<String>,
}

/// Parsed timestamp plus whether it lacked an offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsedTimestamp {
    pub time: DateTime<FixedOffset>,
    pub naive: bool,
}

/// ISO-8601 with offset, or naive (read as UTC and flagged). Accepts `T` or a
/// space between date and time.
pub fn parse_timestamp(raw: &str) -> Option<ParsedTimestamp> {
    let raw = raw.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(ParsedTimestamp { time: t, naive: false });
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f%:z", "%Y-%m-%dT%H:%M:%S%.f%z", "%Y-%m-%d %H:%M:%S%.f%z"] {
        if let Ok(t) = DateTime::parse_from_str(raw, fmt) {
            return Some(ParsedTimestamp { time: t, naive: false });
        }
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            let utc = Utc.from_utc_datetime(&t).fixed_offset();
            return Some(ParsedTimestamp { time: utc, naive: true });
        }
    }
    None
}

impl TripRecord {
    /// Errors with the row number when arrival precedes dispatch.
    pub fn new(
        row: usize,
        dispatch_time: DateTime<FixedOffset>,
        arrival_time: DateTime<FixedOffset>,
        severity_tag: Option<String>,
    ) -> Result<Self> {
        if arrival_time < dispatch_time {
            return Err(Error::InvalidTrip {
                row,
                reason: format!("arrival {arrival_time} precedes dispatch {dispatch_time}"),
            });
        }
        Ok(TripRecord {
            dispatch_time,
            arrival_time,
            severity_tag,
        })
    }

    pub fn duration_seconds(&self) -> f64 {
        let d = self.arrival_time - self.dispatch_time;
        d.num_milliseconds() as f64 / 1000.0
    }
}

pub fn trip_durations(records: &[TripRecord]) -> Result<Vec<f64>> {
    if records.is_empty() {
        return Err(Error::InvalidTrip {
            row: 0,
            reason: "no trip records".into(),
        });
    }
    Ok(records.iter().map(TripRecord::duration_seconds).collect())
}

/// Row label of a summary: a percentile in `[0, 100]` or the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Statistic {
    Percentile(f64),
    Mean,
}

impl Statistic {
    /// 25, 50, 75, 97.5, 100 and the mean.
    pub const STANDARD: [Statistic; 6] = [
        Statistic::Percentile(25.0),
        Statistic::Percentile(50.0),
        Statistic::Percentile(75.0),
        Statistic::Percentile(97.5),
        Statistic::Percentile(100.0),
        Statistic::Mean,
    ];
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Percentile(p) => write!(f, "p{p}"),
            Statistic::Mean => f.write_str("mean"),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("mean") || s.eq_ignore_ascii_case("average") {
            return Ok(Statistic::Mean);
        }
        let digits = s.trim_start_matches(['p', 'P']).trim_end_matches('%');
        digits
            .parse::<f64>()
            .ok()
            .filter(|p| (0.0..=100.0).contains(p))
            .map(Statistic::Percentile)
            .ok_or_else(|| format!("unknown statistic `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub statistic: Statistic,
    pub value: f64,
}

/// Percentile of already-sorted data by linear interpolation between closest
/// ranks: position `(n - 1) * p / 100`.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (n - 1) as f64 * p / 100.0;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn percentile_summary(durations: &[f64], statistics: &[Statistic]) -> Result<Vec<SummaryRow>> {
    if durations.is_empty() {
        return Err(Error::param("durations", "empty sample"));
    }
    if let Some(d) = durations.iter().find(|d| !d.is_finite()) {
        return Err(Error::param("durations", format!("non-finite value {d}")));
    }
    let mut sorted = durations.to_vec();
    sorted.sort_by(f64::total_cmp);
    statistics
        .iter()
        .map(|&statistic| {
            let value = match statistic {
                Statistic::Percentile(p) if (0.0..=100.0).contains(&p) => percentile_sorted(&sorted, p),
                Statistic::Percentile(p) => {
                    return Err(Error::param("percentile", format!("must be in [0, 100], got {p}")))
                }
                Statistic::Mean => sorted.iter().sum::<f64>() / sorted.len() as f64,
            };
            Ok(SummaryRow { statistic, value })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub statistic: Statistic,
    pub actual: f64,
    pub simulated: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    pub fn ratio(&self, statistic: Statistic) -> Option<f64> {
        self.rows.iter().find(|r| r.statistic == statistic).map(|r| r.ratio)
    }
}

/// Same-statistic pairing of observed and simulated summaries.
pub fn ratio_table(actual: &[SummaryRow], simulated: &[SummaryRow]) -> Result<RatioTable> {
    if actual.len() != simulated.len() {
        return Err(Error::SummaryMismatch(format!(
            "{} actual rows, {} simulated rows",
            actual.len(),
            simulated.len()
        )));
    }
    let rows = actual
        .iter()
        .zip(simulated)
        .map(|(a, s)| {
            if a.statistic != s.statistic {
                return Err(Error::SummaryMismatch(format!("{} paired with {}", a.statistic, s.statistic)));
            }
            if !(s.value > 0.0) {
                return Err(Error::SummaryMismatch(format!(
                    "simulated {} must be > 0, got {}",
                    s.statistic, s.value
                )));
            }
            Ok(RatioRow {
                statistic: a.statistic,
                actual: a.value,
                simulated: s.value,
                ratio: a.value / s.value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RatioTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> DateTime<FixedOffset> {
        parse_timestamp(s).unwrap().time
    }

    #[test]
    fn durations_from_timestamps() {
        let r = TripRecord::new(1, ts("2024-01-01T12:00:00Z"), ts("2024-01-01T12:07:37Z"), None).unwrap();
        assert_eq!(r.duration_seconds(), 457.0);
        let z = TripRecord::new(2, ts("2024-01-01T12:00:00Z"), ts("2024-01-01T12:00:00Z"), None).unwrap();
        assert_eq!(trip_durations(&[r, z]).unwrap(), vec![457.0, 0.0]);
        let err = TripRecord::new(7, ts("2024-01-01T12:00:00Z"), ts("2024-01-01T11:59:00Z"), None).unwrap_err();
        assert!(err.to_string().contains("record 7"), "{err}");
        assert!(trip_durations(&[]).is_err());
    }

    #[test]
    fn timestamp_forms() {
        let p = parse_timestamp("2024-03-05 08:00:00").unwrap();
        assert!(p.naive);
        assert_eq!(p.time, ts("2024-03-05T08:00:00+00:00"));
        let q = parse_timestamp("2024-03-05T04:00:00-04:00").unwrap();
        assert!(!q.naive);
        assert_eq!(q.time, p.time);
        assert!(parse_timestamp("yesterday").is_none());
    }

    #[test]
    fn interpolated_percentiles() {
        let rows = percentile_summary(
            &[4.0, 1.0, 3.0, 2.0],
            &[Statistic::Percentile(50.0), Statistic::Percentile(100.0), Statistic::Percentile(0.0), Statistic::Mean],
        )
        .unwrap();
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![2.5, 4.0, 1.0, 2.5]);
        assert!(percentile_summary(&[1.0], &[Statistic::Percentile(101.0)]).is_err());
    }

    #[test]
    fn ratio_rows() {
        let a = [SummaryRow { statistic: Statistic::Mean, value: 7.96 }];
        let s = [SummaryRow { statistic: Statistic::Mean, value: 4.41 }];
        let t = ratio_table(&a, &s).unwrap();
        assert!((t.ratio(Statistic::Mean).unwrap() - 1.805).abs() < 1e-3);
        let same = ratio_table(&a, &a).unwrap();
        assert_eq!(same.rows[0].ratio, 1.0);
        let p = [SummaryRow { statistic: Statistic::Percentile(50.0), value: 1.0 }];
        assert!(matches!(ratio_table(&a, &p), Err(Error::SummaryMismatch(_))));
        let zero = [SummaryRow { statistic: Statistic::Mean, value: 0.0 }];
        assert!(ratio_table(&a, &zero).is_err());
    }

    #[test]
    fn statistic_labels_round_trip() {
        for s in Statistic::STANDARD {
            assert_eq!(s.to_string().parse::<Statistic>().unwrap(), s);
        }
        assert_eq!("97.5%".parse::<Statistic>().unwrap(), Statistic::Percentile(97.5));
    }
}
