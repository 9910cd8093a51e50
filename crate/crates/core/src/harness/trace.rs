//! Per-step CSV files of single episodes.
//!
//! Columns are `k, p1, p2, b, r, u_v, u_h, reward`, one row per step, plus
//! a closing row with the terminal position and buffer whose rate, action
//! and reward are zero. Floats carry 9 significant digits.

use std::io::{Read, Write};

use crate::episode::EpisodeLog;
use crate::error::{Error, Result};
use crate::world::Position;

pub const TRACE_HEADER: [&str; 8] = ["k", "p1", "p2", "b", "r", "u_v", "u_h", "reward"];

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// One row of an episode CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub position: Position,
    pub buffer: f64,
    pub rate: f64,
    pub velocity: f64,
    pub heading: f64,
    pub reward: f64,
}

/// Rows of `log`, closed by the terminal state.
pub fn trace_rows(log: &EpisodeLog) -> Vec<TraceRow> {
    let mut rows: Vec<TraceRow> = log
        .rows
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            position: r.position,
            buffer: r.buffer,
            rate: r.rate,
            velocity: r.action.velocity,
            heading: r.action.heading,
            reward: r.reward,
        })
        .collect();
    rows.push(TraceRow {
        k: log.steps(),
        position: log.final_position,
        buffer: log.final_buffer,
        rate: 0.0,
        velocity: 0.0,
        heading: 0.0,
        reward: 0.0,
    });
    rows
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_error)?;
    for r in rows {
        let fields = [
            r.k.to_string(),
            format_float(r.position.x),
            format_float(r.position.y),
            format_float(r.buffer),
            format_float(r.rate),
            format_float(r.velocity),
            format_float(r.heading),
            format_float(r.reward),
        ];
        w.write_record(&fields).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(input);
    let header = rd.headers().map_err(csv_error)?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse { what: "episode CSV".into(), message: format!("unexpected header {header:?}") });
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_error)?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| Error::Parse {
                what: "episode CSV".into(),
                message: format!("column {}: {e}", TRACE_HEADER[i]),
            })
        };
        let k = rec[0]
            .parse::<usize>()
            .map_err(|e| Error::Parse { what: "episode CSV".into(), message: format!("column k: {e}") })?;
        rows.push(TraceRow {
            k,
            position: Position::new(num(1)?, num(2)?),
            buffer: num(3)?,
            rate: num(4)?,
            velocity: num(5)?,
            heading: num(6)?,
            reward: num(7)?,
        });
    }
    Ok(rows)
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Parse { what: "CSV".into(), message: e.to_string() }
}
