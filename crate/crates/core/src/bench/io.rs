//! JSON files for instances and certificates, CSV for run records.
//!
//! Every JSON document carries `"format_version": 1` next to the fields of
//! the value it holds. Parse failures name the offending location, such as
//! `groups[3][1]`.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::records::RunRecord;
use crate::error::{Error, Result};
use crate::hardness::LabelCoverInstance;
use crate::instance::RkmInstance;
use crate::mcsp::McspInstance;

pub const FORMAT_VERSION: u64 = 1;
pub const CSV_HEADER: &str =
    "instance_id,family,n_facilities,n_clients,n_groups,k,solver,seed,objective,lp_value,ratio,wall_time_ms,iterations";

/// Pretty JSON of `value` with the format version added. Non-object values
/// are wrapped as `{"format_version": 1, "value": ...}`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut doc = serde_json::to_value(value).map_err(|e| Error::schema("$", e.to_string()))?;
    match &mut doc {
        Value::Object(map) => {
            map.insert("format_version".into(), FORMAT_VERSION.into());
        }
        other => {
            let inner = other.take();
            doc = serde_json::json!({ "format_version": FORMAT_VERSION, "value": inner });
        }
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::schema("$", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Inverse of [`to_json`]. A missing version is accepted, any other
/// version than 1 is rejected.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut doc: Value = serde_json::from_str(text)
        .map_err(|e| Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    if let Value::Object(map) = &mut doc {
        if let Some(v) = map.remove("format_version") {
            if v.as_u64() != Some(FORMAT_VERSION) {
                return Err(Error::schema("format_version", format!("unsupported version {v}")));
            }
            if map.len() == 1 && map.contains_key("value") {
                doc = map.remove("value").expect("checked");
            }
        }
    }
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })
}

/// Parses and fully checks an instance.
pub fn parse_instance(text: &str) -> Result<RkmInstance> {
    let raw: RkmInstance = from_json(text)?;
    RkmInstance::new(raw.metric, raw.facility_sites, raw.client_points, raw.groups, raw.k)
}

pub fn parse_mcsp(text: &str) -> Result<McspInstance> {
    let raw: McspInstance = from_json(text)?;
    raw.check()?;
    Ok(raw)
}

pub fn parse_label_cover(text: &str) -> Result<LabelCoverInstance> {
    let raw: LabelCoverInstance = from_json(text)?;
    raw.validate()?;
    Ok(raw)
}

pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::schema("header", format!("expected {CSV_HEADER:?}")));
    }
    let mut out = Vec::new();
    for (i, row) in rd.deserialize().enumerate() {
        out.push(row.map_err(|e: csv::Error| Error::schema(format!("row {}", i + 1), e.to_string()))?);
    }
    Ok(out)
}
