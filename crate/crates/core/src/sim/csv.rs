//! Sample-per-row CSV exchange format for run-to-failure sequences.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{DegradationMode, OperatingConditions, RunToFailureSequence};

pub const SEQUENCE_CSV_HEADER: [&str; 9] = [
    "sequence_id",
    "mode_label",
    "t_hours",
    "current_mA",
    "temperature_K",
    "power_mW",
    "wavelength_nm",
    "threshold_current_mA",
    "failure_time_hours",
];

fn csv_error(err: ::csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        ::csv::ErrorKind::Io(e) => Error::io("<csv stream>", e),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Writes the header and one row per sample. Floats use Rust's shortest
/// round-trip formatting, so reading the file back is lossless.
pub fn write_sequences<W: Write>(writer: W, sequences: &[RunToFailureSequence]) -> Result<()> {
    let mut out = ::csv::Writer::from_writer(writer);
    out.write_record(SEQUENCE_CSV_HEADER).map_err(csv_error)?;
    for seq in sequences {
        seq.validate()?;
        let c = &seq.conditions;
        let fixed = [seq.id.to_string(), seq.mode_label.to_string()];
        let conditions = [
            c.temperature_k.to_string(),
            c.optical_power_mw.to_string(),
            c.wavelength_nm.to_string(),
            c.threshold_current_ma.to_string(),
            seq.failure_time_h
                .map(|t| t.to_string())
                .unwrap_or_default(),
        ];
        for (t, i) in seq.times_h.iter().zip(&seq.currents_ma) {
            out.write_record(
                fixed
                    .iter()
                    .cloned()
                    .chain([t.to_string(), i.to_string()])
                    .chain(conditions.iter().cloned()),
            )
            .map_err(csv_error)?;
        }
    }
    out.flush().map_err(|e| Error::io("<csv stream>", e))?;
    Ok(())
}

fn parse_f64(field: &str, name: &str, line: u64) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: not a number: {field:?}"),
    })
}

/// Reads sequences back, grouping rows by `sequence_id` in order of first
/// appearance. Rows of one sequence must be contiguous.
pub fn read_sequences<R: Read>(reader: R) -> Result<Vec<RunToFailureSequence>> {
    let mut input = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);

    let header = input.headers().map_err(csv_error)?.clone();
    if header.iter().map(str::trim).ne(SEQUENCE_CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "unexpected header, expected {}",
                SEQUENCE_CSV_HEADER.join(",")
            ),
        });
    }

    let mut sequences: Vec<RunToFailureSequence> = Vec::new();
    let mut record = ::csv::StringRecord::new();
    while input.read_record(&mut record).map_err(csv_error)? {
        let line = record.position().map_or(0, |p| p.line());
        let id: u64 = record[0].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("sequence_id: not an integer: {:?}", &record[0]),
        })?;
        let mode: DegradationMode = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("mode_label: unknown mode {:?}", &record[1]),
        })?;
        let t = parse_f64(&record[2], "t_hours", line)?;
        let current = parse_f64(&record[3], "current_mA", line)?;
        let conditions = OperatingConditions {
            temperature_k: parse_f64(&record[4], "temperature_K", line)?,
            optical_power_mw: parse_f64(&record[5], "power_mW", line)?,
            wavelength_nm: parse_f64(&record[6], "wavelength_nm", line)?,
            threshold_current_ma: parse_f64(&record[7], "threshold_current_mA", line)?,
        };
        let failure_time_h = match record[8].trim() {
            "" => None,
            s => Some(parse_f64(s, "failure_time_hours", line)?),
        };

        match sequences.last_mut() {
            Some(seq) if seq.id == id => {
                if seq.mode_label != mode
                    || seq.conditions != conditions
                    || seq.failure_time_h != failure_time_h
                {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "sequence {id}: per-sequence columns changed mid-sequence"
                        ),
                    });
                }
                if t <= *seq.times_h.last().expect("non-empty") {
                    return Err(Error::Parse {
                        line,
                        message: format!("sequence {id}: times must be strictly increasing"),
                    });
                }
                seq.times_h.push(t);
                seq.currents_ma.push(current);
            }
            _ => {
                if sequences.iter().any(|s| s.id == id) {
                    return Err(Error::Parse {
                        line,
                        message: format!("sequence {id}: rows are not contiguous"),
                    });
                }
                sequences.push(RunToFailureSequence {
                    id,
                    mode_label: mode,
                    conditions,
                    times_h: vec![t],
                    currents_ma: vec![current],
                    failure_time_h,
                    scenario: None,
                });
            }
        }
    }
    Ok(sequences)
}
