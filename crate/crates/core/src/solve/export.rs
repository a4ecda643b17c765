use std::io::{self, Write};

use serde::Serialize;

use super::Trajectory;

/// Structured form of a trajectory, one row per grid point, with the same
/// column names as the CSV export.
#[derive(Debug, Serialize)]
pub struct TrajectoryRecord {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl From<&Trajectory> for TrajectoryRecord {
    fn from(traj: &Trajectory) -> Self {
        let mut columns = vec!["t".to_string()];
        columns.extend(traj.labels.iter().cloned());
        let rows = traj
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| std::iter::once(traj.time(i)).chain(s.iter().copied()).collect())
            .collect();
        TrajectoryRecord { columns, rows }
    }
}

/// `t,<symbol>@<word>,...` followed by one line per grid point.
pub fn write_csv(traj: &Trajectory, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "t,{}", traj.labels.join(","))?;
    for (i, s) in traj.states.iter().enumerate() {
        let cells: Vec<String> = s.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{:e},{}", traj.time(i), cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let traj = Trajectory {
            t0: 0.0,
            h: 0.5,
            labels: vec!["x@1".into(), "xi@e1".into()],
            states: vec![vec![1.0, 0.0], vec![2.0, 0.25]],
        };
        let mut buf = Vec::new();
        write_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x@1,xi@e1");
        assert_eq!(lines[2], "5e-1,2e0,2.5e-1");
        let rec = TrajectoryRecord::from(&traj);
        assert_eq!(rec.columns, ["t", "x@1", "xi@e1"]);
    }
}
