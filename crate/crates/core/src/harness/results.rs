//! BER records and their CSV persistence.
//!
//! Files start with `#`-prefixed metadata lines, followed by a CSV table with
//! the header `receiver_label,snr_db,tx_bits,compared_bits,bit_errors,ber,symbol_errors,ser`.
//! The `# generated_unix:` line is the only one that varies between runs.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "receiver_label",
    "snr_db",
    "tx_bits",
    "compared_bits",
    "bit_errors",
    "ber",
    "symbol_errors",
    "ser",
];

/// Prefix of the metadata line carrying the wall-clock time of a run.
pub const TIMESTAMP_PREFIX: &str = "# generated_unix:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub receiver_label: String,
    /// Receive-side Es/N0 in dB.
    pub snr_db: f64,
    pub tx_bits: u64,
    pub compared_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub symbol_errors: u64,
    pub ser: f64,
}

impl BerRecord {
    pub fn from_counts(
        receiver_label: String,
        snr_db: f64,
        tx_bits: u64,
        compared_bits: u64,
        bit_errors: u64,
        symbol_errors: u64,
        symbols: u64,
    ) -> Self {
        BerRecord {
            receiver_label,
            snr_db,
            tx_bits,
            compared_bits,
            bit_errors,
            ber: ratio(bit_errors, compared_bits),
            symbol_errors,
            ser: ratio(symbol_errors, symbols),
        }
    }

    /// Checks the invariants that hold for every record we produce.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !self.snr_db.is_finite() {
            return Err("snr_db is not finite".into());
        }
        if self.compared_bits > self.tx_bits {
            return Err(format!(
                "compared_bits {} exceeds tx_bits {}",
                self.compared_bits, self.tx_bits
            ));
        }
        if self.bit_errors > self.compared_bits {
            return Err(format!(
                "bit_errors {} exceeds compared_bits {}",
                self.bit_errors, self.compared_bits
            ));
        }
        let ber = ratio(self.bit_errors, self.compared_bits);
        if ber != self.ber {
            return Err(format!(
                "ber {} does not equal bit_errors/compared_bits = {ber}",
                self.ber
            ));
        }
        if self.symbol_errors > self.bit_errors || self.symbol_errors > self.compared_bits {
            return Err(format!("symbol_errors {} inconsistent with bit counts", self.symbol_errors));
        }
        if !(0.0..=1.0).contains(&self.ser) || (self.symbol_errors == 0) != (self.ser == 0.0) {
            return Err(format!("ser {} inconsistent with symbol_errors {}", self.ser, self.symbol_errors));
        }
        Ok(())
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Writes records without metadata.
pub fn write_results(records: &[BerRecord], path: impl AsRef<Path>) -> Result<()> {
    write_results_with_metadata(records, &[], path)
}

/// Writes `metadata` as `# key: value` lines, then the CSV table.
pub fn write_results_with_metadata(
    records: &[BerRecord],
    metadata: &[(String, String)],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}").map_err(|e| Error::io(path, e))?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads records back, verifying the header and each record's invariants.
pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<BerRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let record_err = |line: u64, msg: String| Error::Record {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(std::io::BufReader::new(file));
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        let line = header.position().map_or(1, |p| p.line());
        return Err(record_err(line, format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            record_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let rec: BerRecord = row
            .deserialize(Some(&header))
            .map_err(|e| record_err(line, e.to_string()))?;
        rec.check().map_err(|msg| record_err(line, msg))?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<BerRecord> {
        vec![
            BerRecord::from_counts("intended".into(), 0.0, 40_000, 40_000, 1234, 1100, 10_000),
            BerRecord::from_counts("eve_bpsk".into(), 12.5, 40_000, 10_000, 5003, 5003, 10_000),
        ]
    }

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("cdiv-results-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip() {
        let p = tmp("rt.csv");
        let meta = vec![("seed".to_string(), "7".to_string())];
        write_results_with_metadata(&sample(), &meta, &p).unwrap();
        assert_eq!(read_results(&p).unwrap(), sample());
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# seed: 7\nreceiver_label,snr_db,"));
    }

    #[test]
    fn empty_is_header_only() {
        let p = tmp("empty.csv");
        write_results(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 1);
        assert!(read_results(&p).unwrap().is_empty());
    }

    #[test]
    fn integrity_error_reports_line() {
        let p = tmp("bad.csv");
        let mut recs = sample();
        recs[1].ber = 0.4;
        write_results_with_metadata(&recs, &[("k".into(), "v".into())], &p).unwrap();
        match read_results(&p) {
            Err(Error::Record { line, msg, .. }) => {
                assert_eq!(line, 4, "{msg}");
                assert!(msg.contains("ber"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let p = tmp("malformed.csv");
        std::fs::write(
            &p,
            "# x: y\nreceiver_label,snr_db,tx_bits,compared_bits,bit_errors,ber,symbol_errors,ser\n\
             a,1.0,10,10,0,0.0,0,0.0\nb,oops,10,10,0,0.0,0,0.0\n",
        )
        .unwrap();
        match read_results(&p) {
            Err(Error::Record { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_header() {
        let p = tmp("hdr.csv");
        std::fs::write(&p, "label,snr\n").unwrap();
        assert!(matches!(read_results(&p), Err(Error::Record { .. })));
    }
}
