//! CSV and JSON writers. Floats are written with 17 significant digits so a
//! parse of the output recovers the exact doubles.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::measures::fmt_f64;
use crate::wavesim::TimeSeriesReport;

pub const TIMESERIES_HEADER: &str = "t,E_total,E_wave,E_delay,E_diff,E_eta,u_n,p_boundary";

pub fn timeseries_csv(report: &TimeSeriesReport) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in &report.rows {
        let e = &r.energy;
        let cols = [
            r.t,
            e.total,
            e.wave,
            e.delay,
            e.diffusive,
            e.eta,
            r.un,
            r.p_boundary,
        ];
        let line: Vec<String> = cols.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Write `contents`, creating parent directories as needed.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::wavesim::{BCSpec, BoundaryCondition, Grid1D, InitialCondition, Simulation};

    fn sim(seed: u64) -> Simulation {
        let grid = Grid1D::new(1.0, 20).unwrap();
        Simulation {
            grid,
            bc: BCSpec::new(
                BoundaryCondition::Neumann,
                BoundaryCondition::Impedance(KernelSpec::delay(1.0, 0.5, 0.3)),
            ),
            dt: 0.025,
            t_final: 0.5,
            initial: InitialCondition::RandomSmooth { modes: 3 },
            seed,
            source: None,
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let rep = sim(3).run().unwrap();
        let csv = timeseries_csv(&rep);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TIMESERIES_HEADER));
        for (line, row) in lines.zip(&rep.rows).skip(1) {
            let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(vals[0], row.t);
            assert_eq!(vals[1], row.energy.total);
            assert_eq!(vals[7], row.p_boundary);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        assert_eq!(
            timeseries_csv(&sim(9).run().unwrap()),
            timeseries_csv(&sim(9).run().unwrap())
        );
        assert_ne!(
            timeseries_csv(&sim(9).run().unwrap()),
            timeseries_csv(&sim(10).run().unwrap())
        );
    }

    #[test]
    fn writes_into_new_directory() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/out.json");
        write_json(&path, &vec![1.0, 2.5]).unwrap();
        let back: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, vec![1.0, 2.5]);
    }
}
