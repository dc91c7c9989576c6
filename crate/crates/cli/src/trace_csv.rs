//! Trace export and import.
//!
//! One row per sample: time, body pose, each foot's world position and
//! support flag, then the stability margin. Floats use Rust's shortest
//! round-trip formatting so a read-back trace is bit-identical.

use std::io::{Read, Write};
use std::path::Path;

use quadgait::sim::SimTrace;
use quadgait::Leg;

pub fn header() -> Vec<String> {
    let mut h: Vec<String> = ["t", "body_x", "body_y", "body_z", "body_yaw"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for leg in Leg::ALL {
        for field in ["x", "y", "z", "support"] {
            h.push(format!("leg{}_{field}", leg.id()));
        }
    }
    h.push("margin".into());
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// x, y, z, yaw.
    pub body: [f64; 4],
    /// World foot positions indexed by leg id minus one.
    pub feet: [[f64; 3]; 4],
    pub support: [bool; 4],
    pub margin: f64,
}

pub fn rows_from_trace(trace: &SimTrace) -> Vec<TraceRow> {
    trace
        .samples
        .iter()
        .map(|s| {
            let b = &s.state.body;
            let mut feet = [[0.0; 3]; 4];
            let mut support = [false; 4];
            for leg in Leg::ALL {
                let f = s.state.foot(leg);
                feet[leg.index()] = [f.position.x, f.position.y, f.position.z];
                support[leg.index()] = f.support;
            }
            TraceRow {
                t: s.t,
                body: [b.position.x, b.position.y, b.position.z, b.yaw],
                feet,
                support,
                margin: s.margin,
            }
        })
        .collect()
}

pub fn write_rows<W: Write>(rows: &[TraceRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in rows {
        let mut rec: Vec<String> = Vec::with_capacity(22);
        rec.push(r.t.to_string());
        rec.extend(r.body.iter().map(f64::to_string));
        for i in 0..4 {
            rec.extend(r.feet[i].iter().map(f64::to_string));
            rec.push(if r.support[i] { "1" } else { "0" }.into());
        }
        rec.push(r.margin.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &SimTrace, path: &Path) -> Result<(), csv::Error> {
    let file = std::fs::File::create(path)?;
    write_rows(&rows_from_trace(trace), std::io::BufWriter::new(file))
}

fn bad(line: u64, msg: String) -> csv::Error {
    csv::Error::from(std::io::Error::new(
        std::io::ErrorKind::InvalidData,
        format!("row {line}: {msg}"),
    ))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<TraceRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    let expected = header();
    if r.headers()?.iter().ne(expected.iter().map(String::as_str)) {
        return Err(bad(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let num = |k: usize| -> Result<f64, csv::Error> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| bad(line, format!("column {}: {e}", expected[k])))
        };
        let mut row = TraceRow {
            t: num(0)?,
            body: [num(1)?, num(2)?, num(3)?, num(4)?],
            feet: [[0.0; 3]; 4],
            support: [false; 4],
            margin: num(21)?,
        };
        for i in 0..4 {
            let c = 5 + 4 * i;
            row.feet[i] = [num(c)?, num(c + 1)?, num(c + 2)?];
            row.support[i] = match &rec[c + 3] {
                "1" => true,
                "0" => false,
                other => return Err(bad(line, format!("support flag `{other}`"))),
            };
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, csv::Error> {
    read_rows(std::fs::File::open(path)?)
}
