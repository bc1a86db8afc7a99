//! Plot-ready tables for the figures of the eavesdropper study.
//!
//! * `fig5`: analytic correct/incorrect decoding probability vs SNR.
//! * `fig7`..`fig12`: BER vs SNR, one column per receiver of the standard
//!   roster (see [`ROSTER`]); figs 7–9 are α = 2 at 10/50/100 m, figs
//!   10–12 α = 1.4 at the same distances.
//! * `fig13`: distribution summary of every eavesdropper BER pooled across
//!   the supplied result sets.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::results::BerRecord;
use crate::analytic::analytic_sweep;
use crate::error::{Error, Result};

/// Receiver labels every BER-vs-SNR figure must contain.
pub const ROSTER: [&str; 4] = ["intended", "eve_qam16_rect", "eve_qpsk", "eve_bpsk"];

/// Labels with this prefix are pooled as eavesdroppers.
pub const EAVESDROPPER_PREFIX: &str = "eve";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig5,
    /// BER vs SNR, figures 7 through 12.
    BerVsSnr(u8),
    Fig13,
}

impl FigureId {
    /// Nominal path-loss exponent and distance of a BER-vs-SNR figure.
    pub fn scenario(self) -> Option<(f64, f64)> {
        match self {
            FigureId::BerVsSnr(n) => {
                let alpha = if n <= 9 { 2.0 } else { 1.4 };
                let d = [10.0, 50.0, 100.0][((n - 7) % 3) as usize];
                Some((alpha, d))
            }
            _ => None,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FigureId::Fig5 => f.write_str("fig5"),
            FigureId::BerVsSnr(n) => write!(f, "fig{n}"),
            FigureId::Fig13 => f.write_str("fig13"),
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u8 = s
            .trim()
            .strip_prefix("fig")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure `{s}`")))?;
        match n {
            5 => Ok(FigureId::Fig5),
            7..=12 => Ok(FigureId::BerVsSnr(n)),
            13 => Ok(FigureId::Fig13),
            _ => Err(Error::InvalidArgument(format!(
                "unknown figure `{s}` (expected fig5, fig7..fig12 or fig13)"
            ))),
        }
    }
}

/// A small CSV table with a title line.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl FigureTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.title, self.columns.join(","));
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Analytic curves: `snr_db,p_correct,p_error`.
pub fn fig5_table(start_db: f64, stop_db: f64, step_db: f64) -> Result<FigureTable> {
    let rows = analytic_sweep(start_db, stop_db, step_db)?
        .into_iter()
        .map(|r| vec![r.snr_db.to_string(), format!("{:e}", r.p_correct), r.p_error.to_string()])
        .collect();
    Ok(FigureTable {
        title: "fig5: probability the 16QAM-rect eavesdropper decodes 16QAM-circ correctly / incorrectly".into(),
        columns: vec!["snr_db".into(), "p_correct".into(), "p_error".into()],
        rows,
    })
}

/// Builds a figure from simulation records. `fig5` ignores the records and
/// uses the default 0–25 dB, 0.5 dB grid.
pub fn emit_figure_data(records: &[BerRecord], fig: FigureId) -> Result<FigureTable> {
    match fig {
        FigureId::Fig5 => fig5_table(0.0, 25.0, 0.5),
        FigureId::BerVsSnr(_) => ber_vs_snr(records, fig),
        FigureId::Fig13 => eavesdropper_summary(records),
    }
}

fn ber_vs_snr(records: &[BerRecord], fig: FigureId) -> Result<FigureTable> {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        series.entry(r.receiver_label.as_str()).or_default().push((r.snr_db, r.ber));
    }
    let missing: Vec<String> = ROSTER
        .iter()
        .filter(|l| !series.contains_key(*l))
        .map(|l| l.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSeries(missing));
    }
    let mut cols: Vec<Vec<(f64, f64)>> = ROSTER.iter().map(|l| series[l].clone()).collect();
    for c in &mut cols {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let snrs: Vec<f64> = cols[0].iter().map(|p| p.0).collect();
    for (label, c) in ROSTER.iter().zip(&cols) {
        if c.iter().map(|p| p.0).ne(snrs.iter().copied()) {
            return Err(Error::Consistency(format!(
                "series `{label}` does not share the SNR grid of `{}`",
                ROSTER[0]
            )));
        }
    }
    let rows = snrs
        .iter()
        .enumerate()
        .map(|(i, snr)| {
            std::iter::once(snr.to_string())
                .chain(cols.iter().map(|c| c[i].1.to_string()))
                .collect()
        })
        .collect();
    let (alpha, d) = fig.scenario().expect("BER figure has a scenario");
    Ok(FigureTable {
        title: format!("{fig}: BER vs SNR, alpha={alpha}, d={d} m"),
        columns: std::iter::once("snr_db".to_string())
            .chain(ROSTER.iter().map(|l| format!("{l}_ber")))
            .collect(),
        rows,
    })
}

/// Order statistics of a pooled sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantiles with linear interpolation between order statistics.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Some(Summary {
        count: v.len(),
        min: v[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: v[v.len() - 1],
    })
}

/// Pooled eavesdropper BER summary.
pub fn eavesdropper_summary(records: &[BerRecord]) -> Result<FigureTable> {
    let bers: Vec<f64> = records
        .iter()
        .filter(|r| r.receiver_label.starts_with(EAVESDROPPER_PREFIX))
        .map(|r| r.ber)
        .collect();
    let s = summarize(&bers).ok_or_else(|| Error::MissingSeries(vec![format!("{EAVESDROPPER_PREFIX}*")]))?;
    let rows = [
        ("count", s.count as f64),
        ("min", s.min),
        ("q1", s.q1),
        ("median", s.median),
        ("q3", s.q3),
        ("max", s.max),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), v.to_string()])
    .collect();
    Ok(FigureTable {
        title: "fig13: eavesdropper BER pooled across scenarios".into(),
        columns: vec!["statistic".into(), "value".into()],
        rows,
    })
}
