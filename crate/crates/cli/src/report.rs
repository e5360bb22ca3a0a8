//! Output writers: plot-ready CSV (full double precision, header row)
//! and pretty-printed JSON reports.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use stimrwa_core::linalg::CMatrix;

use crate::error::CliError;

/// Create the output directory (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// Write a CSV file: one header row, then rows of numbers formatted with
/// 17 significant digits (`{:.16e}`), comma-separated.
pub fn write_csv<R>(path: &Path, header: &[String], rows: R) -> Result<(), CliError>
where
    R: IntoIterator,
    R::Item: AsRef<[f64]>,
{
    let file = File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let fail = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    writeln!(w, "{}", header.join(",")).map_err(fail)?;
    for row in rows {
        let row = row.as_ref();
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for v in row {
            if !first {
                write!(w, ",").map_err(fail)?;
            }
            first = false;
            write!(w, "{v:.16e}").map_err(fail)?;
        }
        writeln!(w).map_err(fail)?;
    }
    w.flush().map_err(fail)
}

/// Serialize a report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// A complex number as a JSON-friendly `[re, im]` pair.
pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// A complex matrix as rows of `[re, im]` pairs.
pub fn matrix_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_pair(m[(i, j)])).collect())
        .collect()
}

/// Column names for the entries of an `n×n` complex matrix signal:
/// `re_<tag>_11, im_<tag>_11, re_<tag>_12, …` in row-major order.
pub fn matrix_columns(tag: &str, n: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * n * n);
    for i in 1..=n {
        for j in 1..=n {
            cols.push(format!("re_{tag}_{i}{j}"));
            cols.push(format!("im_{tag}_{i}{j}"));
        }
    }
    cols
}

/// Flatten a complex matrix into the column order of [`matrix_columns`].
pub fn matrix_row(m: &CMatrix, out: &mut Vec<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format_is_full_precision() {
        let dir = std::env::temp_dir().join(format!("stimrwa-csv-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        write_csv(
            &path,
            &["a".into(), "b".into()],
            [[std::f64::consts::PI, 1.0e-22], [0.1, 2.0]],
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a,b");
        let first = lines.next().unwrap();
        // Round trip exactly: 17 significant digits preserve any f64.
        let pi_back: f64 = first.split(',').next().unwrap().parse().unwrap();
        assert_eq!(pi_back, std::f64::consts::PI);
        assert!(first.contains("1.0000000000000000e-22"));
        assert_eq!(lines.count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn matrix_columns_and_rows_align() {
        let cols = matrix_columns("Hc", 2);
        assert_eq!(
            cols,
            ["re_Hc_11", "im_Hc_11", "re_Hc_12", "im_Hc_12", "re_Hc_21", "im_Hc_21", "re_Hc_22", "im_Hc_22"]
        );
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        let mut row = Vec::new();
        matrix_row(&m, &mut row);
        assert_eq!(row, [0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(row.len(), cols.len());
    }

    #[test]
    fn complex_and_matrix_pairs() {
        assert_eq!(complex_pair(Complex64::new(1.5, -2.0)), [1.5, -2.0]);
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + j) as f64, 0.5));
        let pairs = matrix_pairs(&m);
        assert_eq!(pairs[1][0], [1.0, 0.5]);
    }
}
