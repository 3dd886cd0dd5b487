//! CSV formats shared by the simulator, the calibration pipeline and the CLI.
//!
//! Trace: header `t,v1,v2,v3,v4,v5,v6,Fx,Fy,Fz,Mx,My,Mz` (s, V, N, N·m);
//! the six reference columns may be absent for inference-only traces.
//! Sweep: header `channel,v,gap_mm` with channels numbered 1 to 6.
//! Lines starting with `#` carry provenance and precede the header.

use std::io::{Read, Write};

use crate::calibration::{RawSample, SweepPoint};
use crate::sensitivity::Wrench;
use crate::{Error, Result};

pub const TRACE_HEADER: [&str; 13] = [
    "t", "v1", "v2", "v3", "v4", "v5", "v6", "Fx", "Fy", "Fz", "Mx", "My", "Mz",
];
pub const SWEEP_HEADER: [&str; 3] = ["channel", "v", "gap_mm"];

fn write_comments<W: Write>(out: &mut W, provenance: &[String]) -> Result<()> {
    for line in provenance {
        if line.contains('\n') {
            return Err(Error::TraceFormat("provenance lines must be single lines".into()));
        }
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

/// Split `#` lines from the CSV body.
fn split_comments(text: &str) -> (Vec<String>, String) {
    let mut comments = Vec::new();
    let mut body = String::with_capacity(text.len());
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim_start().to_string());
        } else if !line.trim().is_empty() {
            body.push_str(line);
            body.push('\n');
        }
    }
    (comments, body)
}

fn num(s: &str, row: usize, col: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::TraceFormat(format!("row {row}, column {col}: `{s}` is not a number")))
}

/// Write a trace. Reference columns are written when any sample has one;
/// samples without a reference then leave them empty.
pub fn write_trace<W: Write>(mut out: W, samples: &[RawSample], provenance: &[String]) -> Result<()> {
    write_comments(&mut out, provenance)?;
    let with_ref = samples.iter().any(|s| s.reference.is_some());
    let cols = if with_ref { 13 } else { 7 };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&TRACE_HEADER[..cols])?;
    let mut rec: Vec<String> = Vec::with_capacity(13);
    for s in samples {
        rec.clear();
        rec.push(s.t.to_string());
        rec.extend(s.v.iter().map(f64::to_string));
        if with_ref {
            match s.reference {
                Some(r) => rec.extend(r.to_array().iter().map(f64::to_string)),
                None => rec.extend(std::iter::repeat(String::new()).take(6)),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a trace and its provenance lines. Time must increase strictly.
pub fn read_trace<R: Read>(mut input: R) -> Result<(Vec<RawSample>, Vec<String>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (comments, body) = split_comments(&text);
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let cols = header.len();
    if !(cols == 13 || cols == 7) || header.iter().zip(TRACE_HEADER).any(|(a, b)| a != b) {
        return Err(Error::TraceFormat(format!(
            "expected header `{}` (reference columns optional), got `{}`",
            TRACE_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut out: Vec<RawSample> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let t = num(&rec[0], row, "t")?;
        let mut v = [0.0; 6];
        for (k, x) in v.iter_mut().enumerate() {
            *x = num(&rec[k + 1], row, TRACE_HEADER[k + 1])?;
        }
        let reference = if cols == 13 && (7..13).any(|k| !rec[k].trim().is_empty()) {
            let mut w = [0.0; 6];
            for (k, x) in w.iter_mut().enumerate() {
                *x = num(&rec[k + 7], row, TRACE_HEADER[k + 7])?;
            }
            Some(Wrench::from_array(w))
        } else {
            None
        };
        if let Some(prev) = out.last() {
            if !(t > prev.t) {
                return Err(Error::TraceFormat(format!("row {row}: time does not increase")));
            }
        }
        out.push(RawSample { t, v, reference });
    }
    Ok((out, comments))
}

pub fn write_sweep<W: Write>(mut out: W, points: &[SweepPoint], provenance: &[String]) -> Result<()> {
    write_comments(&mut out, provenance)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in points {
        w.write_record([(p.channel + 1).to_string(), p.v.to_string(), p.gap_mm.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep<R: Read>(mut input: R) -> Result<(Vec<SweepPoint>, Vec<String>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (comments, body) = split_comments(&text);
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::TraceFormat(format!(
            "expected header `{}`, got `{}`",
            SWEEP_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let ch: usize = rec[0]
            .trim()
            .parse()
            .ok()
            .filter(|c| (1..=6).contains(c))
            .ok_or_else(|| Error::TraceFormat(format!("row {}: channel must be 1..6", i + 1)))?;
        out.push(SweepPoint {
            channel: ch - 1,
            v: num(&rec[1], i + 1, "v")?,
            gap_mm: num(&rec[2], i + 1, "gap_mm")?,
        });
    }
    Ok((out, comments))
}
