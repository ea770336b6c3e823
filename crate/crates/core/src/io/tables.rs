//! Comma-separated tables with a header row.

use std::collections::HashMap;

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use super::{num, parse_error, UNREACHABLE};
use crate::accessibility::{CoverageCurve, ScenarioResult};
use crate::calibration::{parse_timestamp, RatioTable, Statistic, SummaryRow, TripRecord};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::network::{EdgeRecord, NodeRecord, RoadClass, RoadNetwork, MPH};
use crate::population::PopulationWeights;
use crate::travel::{EdgeTimes, FacilityKind, RawFacility, TravelTimeField};

/// Header lookup for one table. Column names are matched case-insensitively.
struct Table<'a> {
    source: &'a str,
    columns: HashMap<String, usize>,
    rows: Vec<StringRecord>,
}

impl<'a> Table<'a> {
    fn read(text: &str, source: &'a str) -> Result<Self> {
        let mut reader = ReaderBuilder::new()
            .trim(Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| parse_error(source, 0, format!("header: {e}")))?
            .clone();
        let columns = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_ascii_lowercase(), i))
            .collect();
        let mut rows = Vec::new();
        for (i, row) in reader.records().enumerate() {
            rows.push(row.map_err(|e| parse_error(source, i + 1, e.to_string()))?);
        }
        Ok(Table { source, columns, rows })
    }

    fn has(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| parse_error(self.source, 0, format!("missing column `{name}`")))
    }

    /// Iterates `(record number, row)` with 1-based record numbers.
    fn records(&self) -> impl Iterator<Item = (usize, &StringRecord)> {
        self.rows.iter().enumerate().map(|(i, r)| (i + 1, r))
    }

    fn text<'r>(&self, row: &'r StringRecord, record: usize, col: usize) -> Result<&'r str> {
        row.get(col)
            .ok_or_else(|| parse_error(self.source, record, format!("missing field {}", col + 1)))
    }

    fn float(&self, row: &StringRecord, record: usize, col: usize) -> Result<f64> {
        let raw = self.text(row, record, col)?;
        raw.parse::<f64>()
            .map_err(|_| parse_error(self.source, record, format!("`{raw}` is not a number")))
    }

    fn optional_float(&self, row: &StringRecord, record: usize, col: Option<usize>) -> Result<Option<f64>> {
        match col.and_then(|c| row.get(c)) {
            None | Some("") => Ok(None),
            Some(_) => self.float(row, record, col.unwrap()).map(Some),
        }
    }
}

fn write_rows<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn parse_bool(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "" | "false" | "f" | "0" | "no" | "n" => Some(false),
        "true" | "t" | "1" | "yes" | "y" => Some(true),
        _ => None,
    }
}

/// `node_id,x,y`
pub fn parse_nodes(text: &str, source: &str) -> Result<Vec<NodeRecord>> {
    let t = Table::read(text, source)?;
    let (id, x, y) = (t.require("node_id")?, t.require("x")?, t.require("y")?);
    t.records()
        .map(|(rec, row)| {
            Ok(NodeRecord::new(
                t.text(row, rec, id)?,
                t.float(row, rec, x)?,
                t.float(row, rec, y)?,
            ))
        })
        .collect()
}

pub fn emit_nodes(nodes: &[NodeRecord]) -> String {
    write_rows(
        &["node_id", "x", "y"],
        nodes.iter().map(|n| [n.node_id.clone(), num(n.x), num(n.y)]),
    )
}

/// `edge_id,from,to[,length],speed_mps|speed_mph[,road_class][,oneway]`.
/// A blank length means "use the endpoint distance"; a missing road class
/// reads as `street`.
pub fn parse_edges(text: &str, source: &str) -> Result<Vec<EdgeRecord>> {
    let t = Table::read(text, source)?;
    let (id, from, to) = (t.require("edge_id")?, t.require("from")?, t.require("to")?);
    let length = t.columns.get("length").copied();
    let (speed, factor) = if t.has("speed_mps") {
        (t.require("speed_mps")?, 1.0)
    } else if t.has("speed_mph") {
        (t.require("speed_mph")?, MPH)
    } else {
        return Err(parse_error(source, 0, "missing column `speed_mps` or `speed_mph`"));
    };
    let class = t.columns.get("road_class").copied();
    let oneway = t.columns.get("oneway").copied();
    t.records()
        .map(|(rec, row)| {
            let road_class = match class.and_then(|c| row.get(c)) {
                None | Some("") => RoadClass::Street,
                Some(raw) => raw.parse().map_err(|e: String| parse_error(source, rec, e))?,
            };
            let oneway = match oneway.and_then(|c| row.get(c)) {
                None => false,
                Some(raw) => parse_bool(raw)
                    .ok_or_else(|| parse_error(source, rec, format!("`{raw}` is not a boolean")))?,
            };
            Ok(EdgeRecord {
                edge_id: t.text(row, rec, id)?.to_string(),
                from: t.text(row, rec, from)?.to_string(),
                to: t.text(row, rec, to)?.to_string(),
                length: t.optional_float(row, rec, length)?,
                speed_limit: t.float(row, rec, speed)? * factor,
                road_class,
                oneway,
            })
        })
        .collect()
}

pub fn emit_edges(edges: &[EdgeRecord]) -> String {
    write_rows(
        &["edge_id", "from", "to", "length", "speed_mps", "road_class", "oneway"],
        edges.iter().map(|e| {
            [
                e.edge_id.clone(),
                e.from.clone(),
                e.to.clone(),
                e.length.map(num).unwrap_or_default(),
                num(e.speed_limit),
                e.road_class.to_string(),
                e.oneway.to_string(),
            ]
        }),
    )
}

/// `facility_id,kind,x,y`, kind one of `ems_station`, `hospital`.
pub fn parse_facilities(text: &str, source: &str) -> Result<Vec<RawFacility>> {
    let t = Table::read(text, source)?;
    let (id, kind, x, y) = (
        t.require("facility_id")?,
        t.require("kind")?,
        t.require("x")?,
        t.require("y")?,
    );
    t.records()
        .map(|(rec, row)| {
            Ok(RawFacility {
                facility_id: t.text(row, rec, id)?.to_string(),
                kind: t
                    .text(row, rec, kind)?
                    .parse::<FacilityKind>()
                    .map_err(|e| parse_error(source, rec, e))?,
                x: t.float(row, rec, x)?,
                y: t.float(row, rec, y)?,
            })
        })
        .collect()
}

pub fn emit_facilities(facilities: &[RawFacility]) -> String {
    write_rows(
        &["facility_id", "kind", "x", "y"],
        facilities
            .iter()
            .map(|f| [f.facility_id.clone(), f.kind.as_str().to_string(), num(f.x), num(f.y)]),
    )
}

/// Trips plus the record numbers whose timestamps had no offset.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrips {
    pub records: Vec<TripRecord>,
    pub naive_rows: Vec<usize>,
}

/// `dispatch_ts,arrival_ts[,severity]`
pub fn parse_trips(text: &str, source: &str) -> Result<ParsedTrips> {
    let t = Table::read(text, source)?;
    let (dispatch, arrival) = (t.require("dispatch_ts")?, t.require("arrival_ts")?);
    let severity = t.columns.get("severity").copied();
    let mut records = Vec::with_capacity(t.rows.len());
    let mut naive_rows = Vec::new();
    for (rec, row) in t.records() {
        let stamp = |col: usize| -> Result<_> {
            let raw = t.text(row, rec, col)?;
            parse_timestamp(raw).ok_or_else(|| parse_error(source, rec, format!("bad timestamp `{raw}`")))
        };
        let d = stamp(dispatch)?;
        let a = stamp(arrival)?;
        if d.naive || a.naive {
            naive_rows.push(rec);
        }
        let tag = severity
            .and_then(|c| row.get(c))
            .filter(|s| !s.is_empty())
            .map(str::to_string);
        let trip = TripRecord::new(rec, d.time, a.time, tag).map_err(|e| match e {
            Error::InvalidTrip { reason, .. } => parse_error(source, rec, reason),
            other => other,
        })?;
        records.push(trip);
    }
    Ok(ParsedTrips { records, naive_rows })
}

/// `node_id,x,y,count,density,radius_m,unit_scale_m2`
pub fn emit_density(network: &RoadNetwork, field: &DensityField) -> String {
    write_rows(
        &["node_id", "x", "y", "count", "density", "radius_m", "unit_scale_m2"],
        network.nodes().iter().enumerate().map(|(i, n)| {
            [
                n.node_id.clone(),
                num(n.x),
                num(n.y),
                field.counts[i].to_string(),
                num(field.values[i]),
                num(field.radius),
                num(field.unit_scale),
            ]
        }),
    )
}

pub fn parse_density(text: &str, source: &str) -> Result<DensityField> {
    let t = Table::read(text, source)?;
    let (id, density, radius, scale) = (
        t.require("node_id")?,
        t.require("density")?,
        t.require("radius_m")?,
        t.require("unit_scale_m2")?,
    );
    let mut ids = Vec::with_capacity(t.rows.len());
    let mut values = Vec::with_capacity(t.rows.len());
    let mut meta = None;
    for (rec, row) in t.records() {
        ids.push(t.text(row, rec, id)?.to_string());
        values.push(t.float(row, rec, density)?);
        let this = (t.float(row, rec, radius)?, t.float(row, rec, scale)?);
        match meta {
            None => meta = Some(this),
            Some(m) if m != this => {
                return Err(parse_error(source, rec, "radius_m/unit_scale_m2 differ between rows"))
            }
            _ => {}
        }
    }
    let (radius, scale) = meta.ok_or_else(|| parse_error(source, 0, "no rows"))?;
    DensityField::from_values(radius, scale, ids, values)
}

/// `edge_id,baseline_s,delay_s,adjusted_s`
pub fn emit_edge_times(network: &RoadNetwork, times: &EdgeTimes) -> String {
    write_rows(
        &["edge_id", "baseline_s", "delay_s", "adjusted_s"],
        network.edges().iter().enumerate().map(|(k, e)| {
            [
                e.id.clone(),
                num(times.baseline[k]),
                num(times.delay[k]),
                num(times.adjusted[k]),
            ]
        }),
    )
}

/// `node_id,x,y,seconds` with [`UNREACHABLE`] for disconnected nodes.
pub fn emit_field(network: &RoadNetwork, field: &TravelTimeField) -> String {
    write_rows(
        &["node_id", "x", "y", "seconds"],
        network.nodes().iter().zip(&field.times).map(|(n, t)| {
            [
                n.node_id.clone(),
                num(n.x),
                num(n.y),
                t.map(num).unwrap_or_else(|| UNREACHABLE.to_string()),
            ]
        }),
    )
}

/// Per-node times as `(node_id, seconds)`.
pub fn parse_field(text: &str, source: &str) -> Result<Vec<(String, Option<f64>)>> {
    let t = Table::read(text, source)?;
    let (id, secs) = (t.require("node_id")?, t.require("seconds")?);
    t.records()
        .map(|(rec, row)| {
            let raw = t.text(row, rec, secs)?;
            let time = if raw.eq_ignore_ascii_case(UNREACHABLE) {
                None
            } else {
                Some(t.float(row, rec, secs)?)
            };
            Ok((t.text(row, rec, id)?.to_string(), time))
        })
        .collect()
}

/// `node_id,persons`
pub fn emit_weights(network: &RoadNetwork, weights: &PopulationWeights) -> String {
    write_rows(
        &["node_id", "persons"],
        network
            .nodes()
            .iter()
            .zip(&weights.weights)
            .map(|(n, w)| [n.node_id.clone(), num(*w)]),
    )
}

pub fn parse_weights(text: &str, source: &str) -> Result<Vec<(String, f64)>> {
    let t = Table::read(text, source)?;
    let (id, persons) = (t.require("node_id")?, t.require("persons")?);
    t.records()
        .map(|(rec, row)| {
            let w = t.float(row, rec, persons)?;
            if !(w >= 0.0) {
                return Err(parse_error(source, rec, format!("negative population {w}")));
            }
            Ok((t.text(row, rec, id)?.to_string(), w))
        })
        .collect()
}

/// Reorders `(node_id, value)` pairs into network node order.
pub fn align_to_network<T: Clone>(network: &RoadNetwork, pairs: &[(String, T)], source: &str) -> Result<Vec<T>> {
    if pairs.len() != network.node_count() {
        return Err(parse_error(
            source,
            0,
            format!("{} rows for {} network nodes", pairs.len(), network.node_count()),
        ));
    }
    let mut out: Vec<Option<T>> = vec![None; network.node_count()];
    for (rec, (id, v)) in pairs.iter().enumerate() {
        let i = network
            .node_index(id)
            .ok_or_else(|| parse_error(source, rec + 1, format!("unknown node `{id}`")))?;
        if out[i].replace(v.clone()).is_some() {
            return Err(parse_error(source, rec + 1, format!("duplicate node `{id}`")));
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every node seen once")).collect())
}

/// `tau_seconds,fraction`
pub fn emit_curve(curve: &CoverageCurve) -> String {
    write_rows(
        &["tau_seconds", "fraction"],
        curve.samples.iter().map(|s| [num(s.tau), num(s.covered_fraction)]),
    )
}

pub fn parse_curve(text: &str, source: &str) -> Result<Vec<(f64, f64)>> {
    let t = Table::read(text, source)?;
    let (tau, frac) = (t.require("tau_seconds")?, t.require("fraction")?);
    t.records()
        .map(|(rec, row)| Ok((t.float(row, rec, tau)?, t.float(row, rec, frac)?)))
        .collect()
}

/// `tau_seconds,before,after,delta`
pub fn emit_scenario(result: &ScenarioResult) -> String {
    write_rows(
        &["tau_seconds", "before", "after", "delta"],
        result
            .before
            .samples
            .iter()
            .zip(&result.after.samples)
            .zip(&result.deltas)
            .map(|((b, a), d)| [num(b.tau), num(b.covered_fraction), num(a.covered_fraction), num(*d)]),
    )
}

/// `statistic,value`, statistic as `p25`, `p97.5`, `mean`, ...
pub fn parse_summary(text: &str, source: &str) -> Result<Vec<SummaryRow>> {
    let t = Table::read(text, source)?;
    let (stat, value) = (t.require("statistic")?, t.require("value")?);
    t.records()
        .map(|(rec, row)| {
            Ok(SummaryRow {
                statistic: t
                    .text(row, rec, stat)?
                    .parse::<Statistic>()
                    .map_err(|e| parse_error(source, rec, e))?,
                value: t.float(row, rec, value)?,
            })
        })
        .collect()
}

pub fn emit_summary(rows: &[SummaryRow]) -> String {
    write_rows(
        &["statistic", "value"],
        rows.iter().map(|r| [r.statistic.to_string(), num(r.value)]),
    )
}

/// `statistic,actual_seconds,simulated_seconds,ratio`
pub fn emit_ratio_table(table: &RatioTable) -> String {
    write_rows(
        &["statistic", "actual_seconds", "simulated_seconds", "ratio"],
        table
            .rows
            .iter()
            .map(|r| [r.statistic.to_string(), num(r.actual), num(r.simulated), num(r.ratio)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::generate_grid;
    use crate::travel::Category;

    #[test]
    fn edges_accept_mph_and_blank_length() {
        let text = "edge_id,from,to,length,speed_mph,road_class,oneway\n\
                    e1,a,b,,25,highway,yes\n\
                    e2,b,c,12.5,55,,\n";
        let edges = parse_edges(text, "edges.csv").unwrap();
        assert_eq!(edges[0].length, None);
        assert!((edges[0].speed_limit - 11.176).abs() < 1e-12);
        assert_eq!(edges[0].road_class, RoadClass::Highway);
        assert!(edges[0].oneway);
        assert_eq!(edges[1].length, Some(12.5));
        assert_eq!(edges[1].road_class, RoadClass::Street);
    }

    #[test]
    fn malformed_rows_name_file_and_record() {
        let err = parse_nodes("node_id,x,y\na,1,2\nb,oops,3\n", "nodes.csv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nodes.csv") && msg.contains("record 2"), "{msg}");
        let err = parse_nodes("id,x,y\n", "n.csv").unwrap_err();
        assert!(err.to_string().contains("node_id"));
    }

    #[test]
    fn unreachable_marker_round_trips() {
        let g = generate_grid(2, 2, 10.0, 1.0).unwrap();
        let field = TravelTimeField {
            category: Category::Overall,
            alpha: 0.0,
            times: vec![Some(0.0), Some(10.000000000000002), None, Some(1e-7)],
        };
        let text = emit_field(&g, &field);
        assert!(text.contains(UNREACHABLE));
        let parsed = parse_field(&text, "f.csv").unwrap();
        let times = align_to_network(&g, &parsed, "f.csv").unwrap();
        assert_eq!(times, field.times);
    }

    #[test]
    fn trip_rows() {
        let text = "dispatch_ts,arrival_ts,severity\n\
                    2024-01-01T12:00:00Z,2024-01-01T12:07:37Z,life\n\
                    2024-01-01 12:00:00,2024-01-01 12:00:00,\n";
        let trips = parse_trips(text, "trips.csv").unwrap();
        assert_eq!(trips.records.len(), 2);
        assert_eq!(trips.naive_rows, vec![2]);
        assert_eq!(trips.records[0].severity_tag.as_deref(), Some("life"));
        let bad = "dispatch_ts,arrival_ts\n2024-01-01T12:00:00Z,2024-01-01T11:00:00Z\n";
        let err = parse_trips(bad, "trips.csv").unwrap_err();
        assert!(err.to_string().contains("record 1"), "{err}");
    }

    #[test]
    fn density_round_trip() {
        let g = generate_grid(3, 3, 100.0, 10.0).unwrap();
        let set = crate::density::derive_intersections(&g, &[RoadClass::Street], 1.0).unwrap();
        let field = crate::density::density_field(&g, &set, 150.0, 1e4).unwrap();
        let back = parse_density(&emit_density(&g, &field), "d.csv").unwrap();
        assert_eq!(back, field);
    }
}
