//! `#timetag-v1` text format: a header line
//! `#timetag-v1 pulse_ns=<T> seed=<seed> trials=<n>` followed by one
//! `trial_id<TAB>t_ns<TAB>channel` line per record. Times are written from
//! integer picoseconds as fixed three-decimal nanoseconds.

use std::io::{BufRead, Write};

use super::PhotonRecord;
use crate::error::{Error, Result};

const MAGIC: &str = "#timetag-v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimetagHeader {
    /// Pulse length, s.
    pub pulse_length: f64,
    pub seed: u64,
    /// Number of trials, including those without detections. Absent in
    /// minimal headers, in which case readers fall back to `max id + 1`.
    pub n_trials: Option<u64>,
}

fn to_ps(t: f64) -> i64 {
    (t * 1e12).round() as i64
}

fn format_ns(ps: i64) -> String {
    let sign = if ps < 0 { "-" } else { "" };
    let a = ps.unsigned_abs();
    format!("{sign}{}.{:03}", a / 1000, a % 1000)
}

fn parse_ns(s: &str) -> Option<i64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let ps = if frac.len() <= 3 {
        let padded = format!("{frac:0<3}");
        whole * 1000 + padded.parse::<i64>().ok()?
    } else {
        // sub-picosecond digits: round
        let v: f64 = format!("0.{frac}").parse().ok()?;
        whole * 1000 + (v * 1000.0).round() as i64
    };
    Some(if neg { -ps } else { ps })
}

pub fn write_timetag<W: Write>(mut w: W, header: &TimetagHeader, records: &[PhotonRecord]) -> Result<()> {
    let pulse_ps = to_ps(header.pulse_length);
    let pulse = if pulse_ps % 1000 == 0 { (pulse_ps / 1000).to_string() } else { format_ns(pulse_ps) };
    write!(w, "{MAGIC} pulse_ns={pulse} seed={}", header.seed)?;
    if let Some(n) = header.n_trials {
        write!(w, " trials={n}")?;
    }
    writeln!(w)?;
    for r in records {
        writeln!(w, "{}\t{}\t{}", r.trial_id, format_ns(to_ps(r.t)), r.channel)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_timetag<R: BufRead>(r: R) -> Result<(TimetagHeader, Vec<PhotonRecord>)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })??;
    let mut fields = first.split_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(Error::Parse { line: 1, msg: format!("missing {MAGIC} header") });
    }
    let mut pulse = None;
    let mut seed = None;
    let mut n_trials = None;
    for kv in fields {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("bad header field {kv:?}") })?;
        let bad = || Error::Parse { line: 1, msg: format!("bad value for {k}: {v:?}") };
        match k {
            "pulse_ns" => pulse = Some(parse_ns(v).ok_or_else(bad)? as f64 * 1e-12),
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad())?),
            "trials" => n_trials = Some(v.parse::<u64>().map_err(|_| bad())?),
            _ => {}
        }
    }
    let header = TimetagHeader {
        pulse_length: pulse.ok_or(Error::Parse { line: 1, msg: "missing pulse_ns".into() })?,
        seed: seed.ok_or(Error::Parse { line: 1, msg: "missing seed".into() })?,
        n_trials,
    };
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
        let mut cols = line.split('\t');
        let trial_id = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("trial_id"))?;
        let ps = cols.next().and_then(|s| parse_ns(s.trim())).ok_or_else(|| bad("t_ns"))?;
        let channel = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("channel"))?;
        if cols.next().is_some() {
            return Err(bad("too many columns"));
        }
        records.push(PhotonRecord { trial_id, t: ps as f64 * 1e-12, channel });
    }
    Ok((header, records))
}
