//! CSV persistence of snapshots and front traces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::front::{Direction, FrontTrace};
use super::grid::{Grid1D, SimState};
use crate::error::{Error, Result};

/// 17 significant digits: enough to round-trip any `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_snapshot_csv(path: &Path, state: &SimState, grid: &Grid1D) -> Result<()> {
    let mut w = create(path)?;
    let mut body = String::with_capacity(grid.n * 96);
    body.push_str("t,x,u,v\n");
    let t = fmt_f64(state.t);
    for i in 0..grid.n {
        body.push_str(&format!(
            "{t},{},{},{}\n",
            fmt_f64(grid.x(i)),
            fmt_f64(state.u[i]),
            fmt_f64(state.v[i])
        ));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn check_header(rdr: &mut csv::Reader<File>, want: &[&str], path: &Path) -> Result<()> {
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != want {
        return Err(Error::invalid(
            path.display().to_string(),
            format!("expected columns {want:?}, found {got:?}"),
        ));
    }
    Ok(())
}

/// Reads a snapshot back as `(x, state)`.
pub fn read_snapshot_csv(path: &Path) -> Result<(Vec<f64>, SimState)> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, &["t", "x", "u", "v"], path)?;
    let mut xs = Vec::new();
    let mut state = SimState {
        t: 0.0,
        u: Vec::new(),
        v: Vec::new(),
    };
    for rec in rdr.deserialize() {
        let (t, x, u, v): (f64, f64, f64, f64) = rec?;
        state.t = t;
        xs.push(x);
        state.u.push(u);
        state.v.push(v);
    }
    if xs.is_empty() {
        return Err(Error::invalid(path.display().to_string(), "no rows"));
    }
    Ok((xs, state))
}

pub fn write_trace_csv(path: &Path, trace: &FrontTrace) -> Result<()> {
    let mut w = create(path)?;
    let mut body = String::from("t,x_front,threshold,direction\n");
    let s = fmt_f64(trace.threshold);
    let d = trace.direction.as_str();
    for &(t, x) in &trace.samples {
        body.push_str(&format!("{},{},{s},{d}\n", fmt_f64(t), fmt_f64(x)));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// The trace name is taken from the file stem.
pub fn read_trace_csv(path: &Path) -> Result<FrontTrace> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, &["t", "x_front", "threshold", "direction"], path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trace")
        .trim_start_matches("trace_")
        .to_string();
    let mut trace: Option<FrontTrace> = None;
    for rec in rdr.deserialize() {
        let (t, x, s, d): (f64, f64, f64, String) = rec?;
        let tr = trace.get_or_insert_with(|| FrontTrace::new(name.clone(), s, Direction::RightmostCrossing));
        tr.direction = Direction::parse(&d)?;
        tr.samples.push((t, x));
    }
    trace.ok_or_else(|| Error::invalid(path.display().to_string(), "no rows"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid1D::new(-1.0, 2.0, 0.1).unwrap();
        let state = SimState {
            t: 1.0 / 3.0,
            u: (0..g.n).map(|i| (i as f64 * 0.37).sin().abs()).collect(),
            v: (0..g.n).map(|i| 1e-200 * i as f64).collect(),
        };
        let path = dir.path().join("snapshot_0.csv");
        write_snapshot_csv(&path, &state, &g).unwrap();
        let (xs, back) = read_snapshot_csv(&path).unwrap();
        assert_eq!(back, state);
        assert_eq!(xs, g.xs());
    }

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut tr = FrontTrace::new("v_left", 1.0 / 3.0, Direction::LeftmostCrossing);
        for i in 1..20 {
            tr.push(i as f64 * 0.1, -(i as f64).sqrt());
        }
        let path = dir.path().join("trace_v_left.csv");
        write_trace_csv(&path, &tr).unwrap();
        assert_eq!(read_trace_csv(&path).unwrap(), tr);
    }

    #[test]
    fn wrong_columns_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_snapshot_csv(&path).is_err());
        assert!(read_trace_csv(&path).is_err());
    }
}
