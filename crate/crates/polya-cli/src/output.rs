//! Machine-readable output records.
//!
//! One record per computed value, as CSV (fixed header) or JSON lines with
//! identical keys. All real numbers are printed with 17 significant digits
//! (`{:.16e}`), which round-trips every finite `f64` bit-exactly.

use std::io::Write;

/// The serialization formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Comma-separated values with a header row.
    Csv,
    /// One JSON object per line, same keys as the CSV columns.
    Jsonl,
}

/// One output row.
pub struct OutputRecord {
    pub d: u32,
    pub method: &'static str,
    pub value: f64,
    pub error_estimate: f64,
    pub elapsed_ms: f64,
    /// Extra trailing column for cross-method tables: the largest pairwise
    /// relative difference among the methods evaluated at this `d`.
    pub max_pairwise_rel_diff: Option<f64>,
}

/// Formats a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records in one format, emitting the CSV header exactly once.
pub struct Emitter {
    format: Format,
    with_diff_column: bool,
    header_written: bool,
}

impl Emitter {
    pub fn new(format: Format, with_diff_column: bool) -> Self {
        Emitter {
            format,
            with_diff_column,
            header_written: false,
        }
    }

    pub fn emit(&mut self, out: &mut impl Write, record: &OutputRecord) -> std::io::Result<()> {
        match self.format {
            Format::Csv => {
                if !self.header_written {
                    self.header_written = true;
                    if self.with_diff_column {
                        writeln!(
                            out,
                            "d,method,value,error_estimate,elapsed_ms,max_pairwise_rel_diff"
                        )?;
                    } else {
                        writeln!(out, "d,method,value,error_estimate,elapsed_ms")?;
                    }
                }
                write!(
                    out,
                    "{},{},{},{},{}",
                    record.d,
                    record.method,
                    real(record.value),
                    real(record.error_estimate),
                    real(record.elapsed_ms)
                )?;
                if self.with_diff_column {
                    write!(out, ",{}", real(record.max_pairwise_rel_diff.unwrap_or(0.0)))?;
                }
                writeln!(out)
            }
            Format::Jsonl => {
                write!(
                    out,
                    "{{\"d\":{},\"method\":\"{}\",\"value\":{},\"error_estimate\":{},\"elapsed_ms\":{}",
                    record.d,
                    record.method,
                    real(record.value),
                    real(record.error_estimate),
                    real(record.elapsed_ms)
                )?;
                if self.with_diff_column {
                    write!(
                        out,
                        ",\"max_pairwise_rel_diff\":{}",
                        real(record.max_pairwise_rel_diff.unwrap_or(0.0))
                    )?;
                }
                writeln!(out, "}}")
            }
        }
    }
}
