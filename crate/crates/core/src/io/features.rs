//! GeoJSON feature collections (projected meters, no CRS handling).

use serde_json::{json, Map, Value};

use super::parse_error;
use crate::accessibility::VulnerabilityReport;
use crate::density::IntersectionSet;
use crate::error::Result;
use crate::geometry::{Point, Polygon};
use crate::network::RoadNetwork;
use crate::population::CensusTract;

fn collection(features: Vec<Value>) -> String {
    let mut text = serde_json::to_string_pretty(&json!({
        "type": "FeatureCollection",
        "features": features,
    }))
    .expect("json values serialize");
    text.push('\n');
    text
}

fn position(p: Point) -> Value {
    json!([p.x, p.y])
}

fn ring_coords(ring: &[Point]) -> Value {
    // GeoJSON rings repeat the first vertex.
    let mut coords: Vec<Value> = ring.iter().map(|p| position(*p)).collect();
    if let Some(first) = ring.first() {
        coords.push(position(*first));
    }
    Value::Array(coords)
}

fn polygon_coords(poly: &Polygon) -> Value {
    Value::Array(poly.rings().map(|r| ring_coords(r)).collect())
}

fn features_of<'v>(doc: &'v Value, source: &str) -> Result<Vec<&'v Value>> {
    match doc.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => doc
            .get("features")
            .and_then(Value::as_array)
            .map(|a| a.iter().collect())
            .ok_or_else(|| parse_error(source, 0, "FeatureCollection without `features` array")),
        Some("Feature") => Ok(vec![doc]),
        Some(other) => Err(parse_error(source, 0, format!("expected a FeatureCollection, got `{other}`"))),
        None => Err(parse_error(source, 0, "missing `type`")),
    }
}

fn parse_json(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_error(source, 0, format!("invalid JSON: {e}")))
}

fn parse_position(v: &Value, source: &str, record: usize) -> Result<Point> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| parse_error(source, record, "position must be [x, y]"))?;
    match (arr[0].as_f64(), arr[1].as_f64()) {
        (Some(x), Some(y)) => Ok(Point::new(x, y)),
        _ => Err(parse_error(source, record, "position coordinates must be numbers")),
    }
}

fn parse_polygon(v: &Value, source: &str, record: usize) -> Result<Polygon> {
    let rings = v
        .as_array()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| parse_error(source, record, "polygon must be a non-empty ring array"))?;
    let mut parsed = Vec::with_capacity(rings.len());
    for ring in rings {
        let pts = ring
            .as_array()
            .ok_or_else(|| parse_error(source, record, "ring must be an array"))?
            .iter()
            .map(|p| parse_position(p, source, record))
            .collect::<Result<Vec<_>>>()?;
        parsed.push(pts);
    }
    let exterior = parsed.remove(0);
    Ok(Polygon::new(exterior, parsed))
}

/// Polygons of a feature's geometry (`Polygon` or `MultiPolygon`).
fn feature_polygons(feature: &Value, source: &str, record: usize) -> Result<Vec<Polygon>> {
    let geometry = feature
        .get("geometry")
        .filter(|g| !g.is_null())
        .ok_or_else(|| parse_error(source, record, "feature has no geometry"))?;
    let coords = geometry
        .get("coordinates")
        .ok_or_else(|| parse_error(source, record, "geometry has no coordinates"))?;
    match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => Ok(vec![parse_polygon(coords, source, record)?]),
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or_else(|| parse_error(source, record, "MultiPolygon coordinates must be an array"))?
            .iter()
            .map(|p| parse_polygon(p, source, record))
            .collect(),
        Some(other) => Err(parse_error(source, record, format!("expected polygon geometry, got `{other}`"))),
        None => Err(parse_error(source, record, "geometry has no type")),
    }
}

fn property<'v>(feature: &'v Value, name: &str) -> Option<&'v Value> {
    feature
        .get("properties")
        .and_then(|p| p.get(name))
        .filter(|v| !v.is_null())
}

fn number_property(feature: &Value, name: &str, source: &str, record: usize) -> Result<Option<f64>> {
    match property(feature, name) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .or_else(|| v.as_str().and_then(|s| s.trim().parse().ok()))
            .map(Some)
            .ok_or_else(|| parse_error(source, record, format!("`{name}` must be a number"))),
    }
}

/// Tract polygons with a required `population` and optional `area_sq_m`.
/// The id comes from `tract_id`, else the feature `id`, else the record
/// number. Ring orientation is normalized.
///
/// A `MultiPolygon` tract is split into one tract per part (`<id>#<k>`)
/// sharing the original effective density.
pub fn parse_tracts(text: &str, source: &str) -> Result<Vec<CensusTract>> {
    let doc = parse_json(text, source)?;
    let mut tracts = Vec::new();
    for (i, feature) in features_of(&doc, source)?.into_iter().enumerate() {
        let record = i + 1;
        let id = property(feature, "tract_id")
            .or_else(|| feature.get("id"))
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .unwrap_or_else(|| record.to_string());
        let population = number_property(feature, "population", source, record)?
            .ok_or_else(|| parse_error(source, record, format!("tract `{id}` has no `population`")))?;
        let area_override = number_property(feature, "area_sq_m", source, record)?;
        let mut parts = feature_polygons(feature, source, record)?;
        for p in &mut parts {
            p.normalize();
        }
        if parts.len() == 1 {
            let poly = parts.pop().expect("one part");
            tracts.push(CensusTract::new(id, poly, population, area_override)?);
            continue;
        }
        let total: f64 = parts.iter().map(Polygon::area).sum();
        if !(total > 0.0) {
            return Err(parse_error(source, record, format!("tract `{id}` has zero area")));
        }
        for (k, poly) in parts.into_iter().enumerate() {
            let share = poly.area() / total;
            tracts.push(CensusTract::new(
                format!("{id}#{k}"),
                poly,
                population * share,
                area_override.map(|a| a * share),
            )?);
        }
    }
    Ok(tracts)
}

pub fn emit_tracts(tracts: &[CensusTract]) -> String {
    let features = tracts
        .iter()
        .map(|t| {
            json!({
                "type": "Feature",
                "properties": {
                    "tract_id": t.tract_id,
                    "population": t.population,
                    "area_sq_m": t.area,
                },
                "geometry": { "type": "Polygon", "coordinates": polygon_coords(&t.polygon) },
            })
        })
        .collect();
    collection(features)
}

/// First polygon in a study-area file.
pub fn parse_boundary(text: &str, source: &str) -> Result<Polygon> {
    let doc = parse_json(text, source)?;
    let feature = features_of(&doc, source)?
        .into_iter()
        .next()
        .ok_or_else(|| parse_error(source, 0, "no features"))?;
    let mut polys = feature_polygons(feature, source, 1)?;
    if polys.len() != 1 {
        return Err(parse_error(source, 1, "study area must be a single polygon"));
    }
    Ok(polys.remove(0))
}

pub fn emit_boundary(boundary: &Polygon) -> String {
    collection(vec![json!({
        "type": "Feature",
        "properties": {},
        "geometry": { "type": "Polygon", "coordinates": polygon_coords(boundary) },
    })])
}

pub fn emit_intersections(set: &IntersectionSet) -> String {
    let features = set
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "type": "Feature",
                "properties": { "index": i, "rounding_grid_m": set.rounding_grid },
                "geometry": { "type": "Point", "coordinates": position(*p) },
            })
        })
        .collect();
    collection(features)
}

pub fn parse_intersections(text: &str, source: &str) -> Result<IntersectionSet> {
    let doc = parse_json(text, source)?;
    let mut points = Vec::new();
    let mut grid = None;
    for (i, feature) in features_of(&doc, source)?.into_iter().enumerate() {
        let record = i + 1;
        let geometry = feature
            .get("geometry")
            .ok_or_else(|| parse_error(source, record, "feature has no geometry"))?;
        if geometry.get("type").and_then(Value::as_str) != Some("Point") {
            return Err(parse_error(source, record, "expected Point geometry"));
        }
        points.push(parse_position(
            geometry.get("coordinates").unwrap_or(&Value::Null),
            source,
            record,
        )?);
        if grid.is_none() {
            grid = number_property(feature, "rounding_grid_m", source, record)?;
        }
    }
    Ok(IntersectionSet {
        points,
        rounding_grid: grid.unwrap_or(crate::density::DEFAULT_ROUNDING_GRID),
    })
}

/// One MultiPoint feature per reported cluster.
pub fn emit_vulnerability(network: &RoadNetwork, report: &VulnerabilityReport) -> String {
    let features = report
        .clusters
        .iter()
        .map(|c| {
            let mut props = Map::new();
            props.insert("cluster_id".into(), json!(c.cluster_id));
            props.insert("population".into(), json!(c.population));
            props.insert("node_count".into(), json!(c.nodes.len()));
            props.insert("max_time_s".into(), json!(c.max_time));
            props.insert("mean_time_s".into(), json!(c.mean_time));
            props.insert("unreachable_nodes".into(), json!(c.unreachable_nodes));
            props.insert("tau_s".into(), json!(report.tau));
            props.insert(
                "node_ids".into(),
                json!(c.nodes.iter().map(|&v| network.node(v).node_id.as_str()).collect::<Vec<_>>()),
            );
            json!({
                "type": "Feature",
                "properties": Value::Object(props),
                "geometry": {
                    "type": "MultiPoint",
                    "coordinates": c.nodes.iter().map(|&v| position(network.position(v))).collect::<Vec<_>>(),
                },
            })
        })
        .collect();
    collection(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::signed_area;

    #[test]
    fn reversed_hole_is_normalized_on_parse() {
        // Exterior clockwise and hole counter-clockwise: both reversed.
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","id":"t1",
            "properties":{"population":500},
            "geometry":{"type":"Polygon","coordinates":[
                [[0,0],[0,10],[10,10],[10,0],[0,0]],
                [[2,2],[4,2],[4,4],[2,4],[2,2]]]}}]}"#;
        let tracts = parse_tracts(text, "tracts.geojson").unwrap();
        assert_eq!(tracts[0].tract_id, "t1");
        assert!(signed_area(&tracts[0].polygon.exterior) > 0.0);
        assert!(signed_area(&tracts[0].polygon.holes[0]) < 0.0);
        assert_eq!(tracts[0].area, 96.0);
        let again = parse_tracts(&emit_tracts(&tracts), "again").unwrap();
        assert_eq!(again, tracts);
    }

    #[test]
    fn multipolygon_tract_keeps_density() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature",
            "properties":{"tract_id":"m","population":300},
            "geometry":{"type":"MultiPolygon","coordinates":[
                [[[0,0],[1,0],[1,1],[0,1],[0,0]]],
                [[[5,0],[7,0],[7,1],[5,1],[5,0]]]]}}]}"#;
        let tracts = parse_tracts(text, "t").unwrap();
        assert_eq!(tracts.len(), 2);
        assert_eq!(tracts[0].effective_density(), 100.0);
        assert_eq!(tracts[1].effective_density(), 100.0);
        assert_eq!(tracts[1].tract_id, "m#1");
    }

    #[test]
    fn missing_population_is_an_error() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{},
            "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]}"#;
        let err = parse_tracts(text, "t.geojson").unwrap_err();
        assert!(err.to_string().contains("record 1"), "{err}");
    }

    #[test]
    fn intersections_round_trip() {
        let set = IntersectionSet {
            points: vec![Point::new(1.0, 2.0), Point::new(-3.5, 1e6)],
            rounding_grid: 0.5,
        };
        assert_eq!(parse_intersections(&emit_intersections(&set), "i").unwrap(), set);
    }
}
