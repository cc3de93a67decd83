//! Measurement trace CSV: header `trial,step,setting_rad,outcome`, one record
//! per line, LF endings, settings with 10 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{AngleRad, Outcome};

pub const TRACE_HEADER: &str = "trial,step,setting_rad,outcome";

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate record for trial {trial} step {step}")]
    Duplicate { trial: u64, step: u64 },
    #[error("trial {trial}: step {step} out of order, expected step {expected}")]
    OutOfOrder {
        trial: u64,
        step: u64,
        expected: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub trial: u64,
    pub step: u64,
    pub setting: AngleRad,
    pub outcome: Outcome,
}

impl TraceRecord {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.trial,
            self.step,
            format_setting(self.setting.value()),
            self.outcome.label()
        )
    }
}

/// Decimal rendering with 10 significant digits and no exponent.
pub fn format_setting(x: f64) -> String {
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Appends trace records, enforcing dense, unique steps per trial.
pub struct TraceWriter<W: Write> {
    out: W,
    path: PathBuf,
    next_step: BTreeMap<u64, u64>,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, TraceError> {
        let file = File::create(path).map_err(|source| TraceError::Io {
            path: path.to_owned(),
            source,
        })?;
        TraceWriter::with_path(BufWriter::new(file), path.to_owned())
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Result<Self, TraceError> {
        TraceWriter::with_path(out, PathBuf::from("<trace>"))
    }

    fn with_path(out: W, path: PathBuf) -> Result<Self, TraceError> {
        let mut writer = TraceWriter {
            out,
            path,
            next_step: BTreeMap::new(),
        };
        writeln!(writer.out, "{TRACE_HEADER}").map_err(|e| writer.io(e))?;
        Ok(writer)
    }

    fn io(&self, source: io::Error) -> TraceError {
        TraceError::Io {
            path: self.path.clone(),
            source,
        }
    }

    pub fn record(&mut self, record: &TraceRecord) -> Result<(), TraceError> {
        let expected = self.next_step.get(&record.trial).copied().unwrap_or(0);
        if record.step < expected {
            return Err(TraceError::Duplicate {
                trial: record.trial,
                step: record.step,
            });
        }
        if record.step > expected {
            return Err(TraceError::OutOfOrder {
                trial: record.trial,
                step: record.step,
                expected,
            });
        }
        writeln!(self.out, "{}", record.to_csv_line()).map_err(|e| self.io(e))?;
        self.next_step.insert(record.trial, expected + 1);
        Ok(())
    }

    pub fn finish_trial(&mut self) -> Result<(), TraceError> {
        self.out.flush().map_err(|e| self.io(e))
    }

    pub fn into_inner(mut self) -> Result<W, TraceError> {
        self.finish_trial()?;
        Ok(self.out)
    }
}

/// A parsed trace, grouped by trial id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub trials: BTreeMap<u64, Vec<TraceRecord>>,
}

impl Trace {
    pub fn record_count(&self) -> usize {
        self.trials.values().map(Vec::len).sum()
    }
}

pub fn read_trace(path: &Path) -> Result<Trace, TraceError> {
    let file = File::open(path).map_err(|source| TraceError::Io {
        path: path.to_owned(),
        source,
    })?;
    read_trace_from(BufReader::new(file), path)
}

/// Parses a trace; `path` is only used in error messages.
pub fn read_trace_from<R: BufRead>(reader: R, path: &Path) -> Result<Trace, TraceError> {
    let parse_err = |line: usize, message: String| TraceError::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut trace = Trace::default();
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header == TRACE_HEADER => {}
        Some((_, Ok(header))) => {
            return Err(parse_err(
                1,
                format!("expected header `{TRACE_HEADER}`, found `{header}`"),
            ))
        }
        Some((_, Err(source))) => {
            return Err(TraceError::Io {
                path: path.to_owned(),
                source,
            })
        }
        None => return Err(parse_err(1, "empty trace file".into())),
    }
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line.map_err(|source| TraceError::Io {
            path: path.to_owned(),
            source,
        })?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let trial: u64 = fields[0]
            .parse()
            .map_err(|e| parse_err(line_no, format!("trial: {e}")))?;
        let step: u64 = fields[1]
            .parse()
            .map_err(|e| parse_err(line_no, format!("step: {e}")))?;
        let setting: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(line_no, format!("setting_rad: {e}")))?;
        if !setting.is_finite() {
            return Err(parse_err(line_no, "setting_rad is not finite".into()));
        }
        let label: u8 = fields[3]
            .parse()
            .map_err(|e| parse_err(line_no, format!("outcome: {e}")))?;
        let outcome = Outcome::try_from(label).map_err(|e| parse_err(line_no, e.to_string()))?;

        let records = trace.trials.entry(trial).or_default();
        let expected = records.len() as u64;
        if step < expected {
            return Err(TraceError::Duplicate { trial, step });
        }
        if step > expected {
            return Err(TraceError::OutOfOrder {
                trial,
                step,
                expected,
            });
        }
        records.push(TraceRecord {
            trial,
            step,
            setting: AngleRad::new(setting),
            outcome,
        });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    fn rec(trial: u64, step: u64, setting: f64, outcome: Outcome) -> TraceRecord {
        TraceRecord {
            trial,
            step,
            setting: AngleRad::new(setting),
            outcome,
        }
    }

    #[test]
    fn line_format() {
        assert_eq!(
            rec(0, 0, FRAC_PI_8, Outcome::One).to_csv_line(),
            "0,0,0.3926990817,1"
        );
        assert_eq!(format_setting(0.0), "0");
        assert_eq!(format_setting(1.2345678901234), "1.23456789");
        assert_eq!(format_setting(0.000123456789012), "0.000123456789");
    }

    #[test]
    fn writer_rejects_duplicates_and_gaps() {
        let mut w = TraceWriter::new(Vec::new()).unwrap();
        w.record(&rec(0, 0, 0.1, Outcome::One)).unwrap();
        assert!(matches!(
            w.record(&rec(0, 0, 0.1, Outcome::One)),
            Err(TraceError::Duplicate { trial: 0, step: 0 })
        ));
        assert!(matches!(
            w.record(&rec(0, 2, 0.1, Outcome::One)),
            Err(TraceError::OutOfOrder {
                trial: 0,
                step: 2,
                expected: 1
            })
        ));
        w.record(&rec(1, 0, 0.2, Outcome::Two)).unwrap();
        w.record(&rec(0, 1, 0.3, Outcome::Two)).unwrap();
        let bytes = w.into_inner().unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "trial,step,setting_rad,outcome\n0,0,0.1,1\n1,0,0.2,2\n0,1,0.3,2\n"
        );

        let trace = read_trace_from(text.as_bytes(), Path::new("t.csv")).unwrap();
        assert_eq!(trace.trials.len(), 2);
        assert_eq!(trace.trials[&0].len(), 2);
        assert_eq!(trace.record_count(), 3);
    }

    #[test]
    fn reader_reports_line_numbers() {
        let text = "trial,step,setting_rad,outcome\n0,0,0.1,1\n0,1,0.2";
        match read_trace_from(text.as_bytes(), Path::new("t.csv")) {
            Err(TraceError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "trial,step,setting_rad,outcome\n0,0,0.1,3\n";
        assert!(matches!(
            read_trace_from(text.as_bytes(), Path::new("t.csv")),
            Err(TraceError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_trace_from("".as_bytes(), Path::new("t.csv")),
            Err(TraceError::Parse { line: 1, .. })
        ));
        let text = "trial,step,setting_rad,outcome\n0,0,0.1,1\n0,0,0.1,1\n";
        assert!(matches!(
            read_trace_from(text.as_bytes(), Path::new("t.csv")),
            Err(TraceError::Duplicate { .. })
        ));
    }

    #[test]
    fn grid_settings_survive_formatting() {
        let step = crate::model::PERIOD / 10_000.0;
        for k in (0..10_000).step_by(37) {
            let x = k as f64 * step;
            let back: f64 = format_setting(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-9);
            assert_eq!((back / step).round() as usize, k);
        }
    }
}
