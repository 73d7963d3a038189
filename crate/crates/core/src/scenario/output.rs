use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::grid::{GridFunction, MeasureGrid};
use crate::solver::SolvePath;

pub const CSV_HEADER: &str = "step,lambda,residual_sup,residual_l1,inner_iters";

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per step, LF line endings.
pub fn path_csv(path: &SolvePath) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (n, step) in path.steps.iter().enumerate() {
        writeln!(
            s,
            "{},{},{},{},{}",
            n + 1,
            fmt_real(step.lambda),
            fmt_real(step.residual_sup),
            fmt_real(step.residual_l1),
            step.inner_iterations
        )
        .expect("write to string");
    }
    s
}

/// Whitespace-separated columns: `x` followed by each named function.
pub fn plot_columns(grid: &MeasureGrid, columns: &[(String, &GridFunction)]) -> String {
    let mut s = String::from("# x");
    for (name, _) in columns {
        s.push(' ');
        s.push_str(name);
    }
    s.push('\n');
    for (i, x) in grid.atoms().iter().enumerate() {
        s.push_str(&fmt_real(*x));
        for (_, f) in columns {
            s.push(' ');
            s.push_str(&fmt_real(f[i]));
        }
        s.push('\n');
    }
    s
}

/// First, middle and last iterates plus the extracted limit.
pub fn path_plot(grid: &MeasureGrid, path: &SolvePath, limit: &GridFunction) -> String {
    let n = path.len();
    let mut picks: Vec<usize> = [0, n / 2, n.saturating_sub(1)].into_iter().filter(|&i| i < n).collect();
    picks.dedup();
    let mut cols: Vec<(String, &GridFunction)> = picks
        .into_iter()
        .map(|i| (format!("u_{}", i + 1), &path.steps[i].solution))
        .collect();
    cols.push(("limit".into(), limit));
    plot_columns(grid, &cols)
}

/// Sibling file holding plot data: `run.csv` -> `run.plot.dat`.
pub fn plot_path_for(csv: &Path) -> PathBuf {
    csv.with_extension("plot.dat")
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format() {
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn plot_file_name() {
        assert_eq!(plot_path_for(Path::new("a/run.csv")), PathBuf::from("a/run.plot.dat"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_atomic(&p, "one\n").unwrap();
        write_atomic(&p, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
