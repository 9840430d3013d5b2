use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::state::FieldState;

#[derive(Serialize)]
struct Sidecar<'a> {
    mode: &'a str,
    h: f64,
    nodes_per_axis: usize,
    t: f64,
    dt: f64,
    columns: [&'a str; 6],
}

/// Writes `<stem>.csv` with one row per grid point and a `<stem>.json` sidecar
/// describing the geometry.
pub fn write_snapshot(state: &FieldState, dir: &Path, stem: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let g = state.geometry();
    let mut out = BufWriter::new(fs::File::create(dir.join(format!("{stem}.csv")))?);
    writeln!(out, "x,y,u1,u2,ut1,ut2")?;
    for k in 0..g.len() {
        let p = g.position(k);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p[0],
            p[1],
            state.field(0)[k],
            state.field(1)[k],
            state.velocity(0)[k],
            state.velocity(1)[k]
        )?;
    }
    out.flush()?;
    let sidecar = Sidecar {
        mode: g.mode.as_str(),
        h: g.h,
        nodes_per_axis: g.n,
        t: state.time(),
        dt: state.dt(),
        columns: ["x", "y", "u1", "u2", "ut1", "ut2"],
    };
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&sidecar).map_err(std::io::Error::other)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BumpSpec, BumpSum, ComponentData, InitialData, SolverMode};
    use crate::solver::{init_state, RunSetup};

    #[test]
    fn writes_csv_and_sidecar() {
        let c = ComponentData {
            f: BumpSum::single(BumpSpec::new([0.0, 0.0], 1.0, 1.0).unwrap()),
            g: BumpSum::default(),
        };
        let d = InitialData::new([c.clone(), c], 0.5).unwrap();
        let s = init_state(&RunSetup::new(SolverMode::Radial, 0.25, 1.0), &d, true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_snapshot(&s, dir.path(), "snap").unwrap();
        let csv = fs::read_to_string(dir.path().join("snap.csv")).unwrap();
        assert_eq!(csv.lines().count(), s.geometry().len() + 1);
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("snap.json")).unwrap()).unwrap();
        assert_eq!(json["mode"], "radial");
        assert_eq!(json["h"], 0.25);
    }
}
