//! Output encoding: compact JSON and CSV with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

/// Formats a float with 17 significant digits, enough to round-trip `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

struct SigFigs;

impl Formatter for SigFigs {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn write_null<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// Serializes `value` as one JSON line.
pub fn to_json_line<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Scan table: `mu,value` plus `stderr` when present.
pub fn scan_csv(rows: &[(f64, f64, Option<f64>)]) -> csv::Result<Vec<u8>> {
    let with_stderr = rows.iter().any(|r| r.2.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    if with_stderr {
        w.write_record(["mu", "value", "stderr"])?;
    } else {
        w.write_record(["mu", "value"])?;
    }
    for &(mu, value, stderr) in rows {
        if with_stderr {
            w.write_record([fmt_f64(mu), fmt_f64(value), stderr.map(fmt_f64).unwrap_or_default()])?;
        } else {
            w.write_record([fmt_f64(mu), fmt_f64(value)])?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
