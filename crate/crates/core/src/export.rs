//! CSV output of solver snapshots.

use std::io::{self, Write};

use crate::grid::Grid;
use crate::scalar::Real;
use crate::solver::{density, total_cdf, FieldState};

/// `<run>_t<time>.csv`, with the time printed in its shortest round-trip form.
pub fn snapshot_filename(run: &str, t: f64) -> String {
    format!("{run}_t{t}.csv")
}

/// One row per node: `x,F_1..F_S,p_1..p_S,F_total,p_total`.
pub fn write_snapshot_csv<T: Real, W: Write>(grid: &Grid<T>, state: &FieldState<T>, mut w: W) -> io::Result<()> {
    let s = state.states();
    let mut header = vec!["x".to_string()];
    header.extend((1..=s).map(|l| format!("F_{l}")));
    header.extend((1..=s).map(|l| format!("p_{l}")));
    header.push("F_total".into());
    header.push("p_total".into());
    writeln!(w, "{}", header.join(","))?;

    let dens = density(state, grid.dx());
    let total = total_cdf(state);
    let mut line = String::new();
    for (k, &f_total) in total.iter().enumerate() {
        line.clear();
        push(&mut line, grid.node(k));
        for l in 0..s {
            push(&mut line, state.get(l, k));
        }
        for l in 0..s {
            push(&mut line, dens.per_state.get(l, k));
        }
        push(&mut line, f_total);
        push(&mut line, dens.total[k]);
        line.pop();
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn push<T: Real>(line: &mut String, v: T) {
    use std::fmt::Write as _;
    let _ = write!(line, "{:.16e},", v.as_f64());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Resolution};
    use crate::model::Domain;

    #[test]
    fn filename_pattern() {
        assert_eq!(snapshot_filename("sec4", 4.0), "sec4_t4.csv");
        assert_eq!(snapshot_filename("run", 0.25), "run_t0.25.csv");
    }

    #[test]
    fn rows_round_trip() {
        let grid = build_grid(Domain::new(0.0, 1.0), Resolution::Nodes(3)).unwrap();
        let state = FieldState::from_rows(vec![vec![0.0, 0.1, 0.5], vec![0.0, 1.0 / 3.0, 0.5]], 0.0);
        let mut buf = Vec::new();
        write_snapshot_csv(&grid, &state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,F_1,F_2,p_1,p_2,F_total,p_total");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 0.5);
        assert_eq!(row[2], 1.0 / 3.0);
        assert!((row[5] - (0.1 + 1.0 / 3.0)).abs() < 1e-16);
        assert!((row[3] - 0.2).abs() < 1e-15);
    }
}
