//! Settings (JSON) and counts (CSV) files.
//!
//! Settings: `{"L": 7, "settings": ["XXYZZXY", ...]}`, one character per
//! qubit with qubit 1 first.
//!
//! Counts: header `setting,outcome_index,count,shots`, one row per setting and
//! outcome, `outcome_index` 0-based with qubit 1 as the most significant bit.
//! Readers accept rows in any order and treat missing outcomes as zero
//! counts.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::counts::{pauli_correlator, MeasurementRecord};
use super::pauli::{MeasurementSetting, SettingEnsemble};
use crate::error::{Error, Result};

pub const COUNTS_HEADER: [&str; 4] = ["setting", "outcome_index", "count", "shots"];

#[derive(Debug, Serialize, Deserialize)]
pub struct SettingsFile {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub settings: Vec<String>,
}

impl SettingsFile {
    pub fn from_ensemble(ens: &SettingEnsemble) -> Self {
        SettingsFile {
            num_qubits: ens.num_qubits(),
            settings: ens.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn into_ensemble(self) -> Result<SettingEnsemble> {
        let settings = self
            .settings
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<MeasurementSetting>>>()?;
        SettingEnsemble::new(self.num_qubits, settings).map_err(|e| Error::data(e.to_string()))
    }
}

pub fn read_settings_json<R: Read>(reader: R) -> Result<SettingEnsemble> {
    let file: SettingsFile = serde_json::from_reader(reader)?;
    file.into_ensemble()
}

pub fn write_settings_json<W: Write>(ens: &SettingEnsemble, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &SettingsFile::from_ensemble(ens))?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::data(format!("csv: {other:?}")),
    }
}

/// Writes every outcome of every record, zero counts included.
pub fn write_counts_csv<W: Write>(records: &[MeasurementRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COUNTS_HEADER).map_err(csv_error)?;
    for rec in records {
        let name = rec.setting.to_string();
        for (k, c) in rec.counts.iter().enumerate() {
            w.write_record([name.as_str(), &k.to_string(), &c.to_string(), &rec.shots.to_string()])
                .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct CountsRow {
    setting: String,
    outcome_index: usize,
    count: u64,
    shots: u64,
}

struct PendingRecord {
    setting: MeasurementSetting,
    counts: Vec<u64>,
    seen: Vec<bool>,
    shots: u64,
    rows: Vec<usize>,
}

/// Reads a counts file; records come back in order of first appearance.
/// Line numbers in errors are 1-based file lines (the header is line 1).
pub fn read_counts_csv<R: Read>(reader: R) -> Result<Vec<MeasurementRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != COUNTS_HEADER {
        return Err(Error::data(format!(
            "counts header must be {}, found {}",
            COUNTS_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, PendingRecord> = HashMap::new();
    let mut num_qubits = None;
    for (i, row) in rdr.deserialize::<CountsRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::data(format!("line {line}: {e}")))?;
        let setting: MeasurementSetting = row
            .setting
            .parse()
            .map_err(|e| Error::data(format!("line {line}: {e}")))?;
        let l = *num_qubits.get_or_insert(setting.num_qubits());
        if setting.num_qubits() != l {
            return Err(Error::data(format!(
                "line {line}: setting {setting} has {} qubits, earlier rows have {l}",
                setting.num_qubits()
            )));
        }
        let d = 1usize << l;
        if row.outcome_index >= d {
            return Err(Error::data(format!(
                "line {line}: outcome_index {} out of range 0..{d}",
                row.outcome_index
            )));
        }
        let key = setting.to_string();
        let entry = pending.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            PendingRecord {
                setting,
                counts: vec![0; d],
                seen: vec![false; d],
                shots: row.shots,
                rows: Vec::new(),
            }
        });
        if entry.seen[row.outcome_index] {
            return Err(Error::data(format!(
                "line {line}: duplicate row for setting {key}, outcome {}",
                row.outcome_index
            )));
        }
        if entry.shots != row.shots {
            return Err(Error::data(format!(
                "line {line}: shots {} disagree with {} on earlier rows of setting {key}",
                row.shots, entry.shots
            )));
        }
        entry.seen[row.outcome_index] = true;
        entry.counts[row.outcome_index] = row.count;
        entry.rows.push(line);
    }
    if order.is_empty() {
        return Err(Error::data("counts file has no rows"));
    }
    order
        .into_iter()
        .map(|key| {
            let p = pending.remove(&key).expect("key recorded on insert");
            let total: u64 = p.counts.iter().sum();
            if total != p.shots {
                let lines: Vec<String> = p.rows.iter().map(|r| r.to_string()).collect();
                return Err(Error::data(format!(
                    "setting {key}: counts sum to {total} but shots is {} (lines {})",
                    p.shots,
                    lines.join(", ")
                )));
            }
            MeasurementRecord::new(p.setting, p.counts)
        })
        .collect()
}

/// One row per record: `setting,correlator,shots`.
pub fn write_correlators_csv<W: Write>(records: &[MeasurementRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["setting", "correlator", "shots"]).map_err(csv_error)?;
    for rec in records {
        w.write_record([
            rec.setting.to_string(),
            crate::format_float(pauli_correlator(rec)),
            rec.shots.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_round_trip() {
        let json = r#"{"L":3,"settings":["XYZ","ZZZ"]}"#;
        let ens = read_settings_json(json.as_bytes()).unwrap();
        assert_eq!(ens.len(), 2);
        let mut out = Vec::new();
        write_settings_json(&ens, &mut out).unwrap();
        assert_eq!(read_settings_json(out.as_slice()).unwrap(), ens);
        assert!(read_settings_json(r#"{"L":2,"settings":["XYZ"]}"#.as_bytes()).is_err());
    }

    #[test]
    fn counts_round_trip() {
        let recs = vec![
            MeasurementRecord::new("XZ".parse().unwrap(), vec![3, 0, 5, 2]).unwrap(),
            MeasurementRecord::new("YY".parse().unwrap(), vec![0, 10, 0, 0]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_counts_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("setting,outcome_index,count,shots\nXZ,0,3,10\n"));
        assert_eq!(text.lines().count(), 9);
        assert_eq!(read_counts_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn sparse_rows_are_zero_filled() {
        let text = "setting,outcome_index,count,shots\nZ,0,4,4\n";
        let recs = read_counts_csv(text.as_bytes()).unwrap();
        assert_eq!(recs[0].counts, vec![4, 0]);
    }

    #[test]
    fn bad_sums_report_lines() {
        let text = "setting,outcome_index,count,shots\nZ,0,4,10\nZ,1,4,10\nX,0,10,10\n";
        let err = read_counts_csv(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("lines 2, 3"), "{err}");
    }

    #[test]
    fn malformed_rows() {
        for text in [
            "setting,outcome_index,count,shots\nQ,0,4,4\n",
            "setting,outcome_index,count,shots\nZ,2,4,4\n",
            "setting,outcome_index,count,shots\nZ,0,x,4\n",
            "setting,outcome_index,count,shots\nZ,0,4,4\nZ,0,0,4\n",
            "setting,outcome_index,count,shots\nZ,0,4,4\nZZ,0,4,4\n",
            "a,b,c,d\nZ,0,4,4\n",
        ] {
            assert!(matches!(read_counts_csv(text.as_bytes()), Err(Error::Data(_))), "{text}");
        }
    }
}
