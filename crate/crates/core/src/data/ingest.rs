use std::io::Read;
use std::path::Path;

use log::warn;

use super::{FlightRecord, ATTACK, NORMAL};
use crate::error::{Error, Result};

/// Records read from a CSV file plus the number of rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvLoad {
    pub records: Vec<FlightRecord>,
    pub skipped: usize,
}

#[derive(Clone, Copy)]
enum Field {
    Time,
    Icao24,
    Lat,
    Lon,
    Velocity,
    Heading,
    BaroAltitude,
    GeoAltitude,
    Label,
}

const FIELDS: [(Field, &str, &[&str]); 9] = [
    (Field::Time, "time", &["time", "timestamp", "unixtime"]),
    (Field::Icao24, "icao24", &["icao24", "icao"]),
    (Field::Lat, "lat", &["lat", "latitude"]),
    (Field::Lon, "lon", &["lon", "lng", "longitude"]),
    (Field::Velocity, "velocity", &["velocity", "speed", "groundspeed"]),
    (Field::Heading, "heading", &["heading", "track"]),
    (
        Field::BaroAltitude,
        "baroaltitude",
        &["baroaltitude", "barometricaltitude"],
    ),
    (
        Field::GeoAltitude,
        "geoaltitude",
        &["geoaltitude", "geometricaltitude"],
    ),
    (
        Field::Label,
        "label",
        &["label", "class", "anomaly", "attack", "isattack", "isanomaly", "target"],
    ),
];

/// Lowercase with everything but ASCII letters and digits removed, so
/// `baroAltitude`, `baro_altitude` and `Baro Altitude` all match.
fn normalize(header: &str) -> String {
    header
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn parse_label(s: &str) -> Option<u8> {
    match s.trim().to_ascii_lowercase().as_str() {
        "0" | "0.0" | "normal" | "false" | "benign" => Some(NORMAL),
        "1" | "1.0" | "attack" | "anomaly" | "true" | "spoofed" => Some(ATTACK),
        _ => None,
    }
}

fn parse_finite(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<CsvLoad> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}

/// Header-driven parse of comma-separated ADS-B rows.
pub fn read_csv<R: Read>(reader: R) -> Result<CsvLoad> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Data("CSV file is empty".into()));
    }
    let normalized: Vec<String> = headers.iter().map(normalize).collect();

    let mut columns = [0usize; 9];
    let mut missing = Vec::new();
    for (slot, (_, name, aliases)) in columns.iter_mut().zip(FIELDS.iter()) {
        match normalized.iter().position(|h| aliases.contains(&h.as_str())) {
            Some(i) => *slot = i,
            None => missing.push(name.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Schema { missing });
    }

    let mut records = Vec::new();
    let mut skipped = 0;
    for (line, row) in rdr.records().enumerate() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                warn!("skipping unreadable CSV row {}: {e}", line + 2);
                skipped += 1;
                continue;
            }
        };
        let mut rec = FlightRecord {
            time: 0.0,
            icao24: String::new(),
            lat: 0.0,
            lon: 0.0,
            velocity: 0.0,
            heading: 0.0,
            baroaltitude: 0.0,
            geoaltitude: 0.0,
            label: 0,
        };
        let mut ok = true;
        for (&col, (field, _, _)) in columns.iter().zip(FIELDS.iter()) {
            let Some(cell) = row.get(col) else {
                ok = false;
                break;
            };
            let num = || parse_finite(cell);
            let parsed = match field {
                Field::Icao24 => {
                    rec.icao24 = cell.to_string();
                    Some(())
                }
                Field::Label => parse_label(cell).map(|l| rec.label = l),
                Field::Time => num().map(|v| rec.time = v),
                Field::Lat => num().map(|v| rec.lat = v),
                Field::Lon => num().map(|v| rec.lon = v),
                Field::Velocity => num().map(|v| rec.velocity = v),
                Field::Heading => num().map(|v| rec.heading = v),
                Field::BaroAltitude => num().map(|v| rec.baroaltitude = v),
                Field::GeoAltitude => num().map(|v| rec.geoaltitude = v),
            };
            if parsed.is_none() {
                ok = false;
                break;
            }
        }
        if ok {
            records.push(rec);
        } else {
            skipped += 1;
        }
    }
    if skipped > 0 {
        warn!("skipped {skipped} malformed CSV row(s)");
    }
    if records.is_empty() && skipped == 0 {
        return Err(Error::Data("CSV file has a header but no rows".into()));
    }
    Ok(CsvLoad { records, skipped })
}
