//! Sparse matrices as text triplets.
//!
//! ```text
//! <rows> <cols> <nnz>
//! <row> <col> <p/q>
//! ...
//! ```
//! Indices are 1-based; entries are listed row by row in increasing column order.

use std::fmt::Write;

use gpi_core::linalg::SparseRow;
use gpi_core::Q;

use crate::error::CliError;

pub fn write_triplets(n_cols: usize, rows: &[SparseRow]) -> String {
    let nnz: usize = rows.iter().map(Vec::len).sum();
    let mut out = format!("{} {} {}\n", rows.len(), n_cols, nnz);
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row {
            writeln!(out, "{} {} {}", i + 1, j + 1, c).expect("write to string");
        }
    }
    out
}

pub fn read_triplets(text: &str) -> Result<(usize, Vec<SparseRow>), CliError> {
    let bad = |line: usize, msg: &str| CliError::Usage(format!("triplet line {line}: {msg}"));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| bad(hl + 1, "header must be three integers"))?;
    let [n_rows, n_cols, nnz] = h[..] else {
        return Err(bad(hl + 1, "header must be three integers"));
    };
    let mut rows: Vec<SparseRow> = vec![Vec::new(); n_rows];
    let mut count = 0;
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = parts[..] else {
            return Err(bad(ln + 1, "expected `row col value`"));
        };
        let r: usize = r.parse().map_err(|_| bad(ln + 1, "bad row index"))?;
        let c: usize = c.parse().map_err(|_| bad(ln + 1, "bad column index"))?;
        let v: Q = v.parse().map_err(|_| bad(ln + 1, "bad rational value"))?;
        if r == 0 || r > n_rows || c == 0 || c > n_cols {
            return Err(bad(ln + 1, "index out of range"));
        }
        let row = &mut rows[r - 1];
        if row.last().is_some_and(|(j, _)| *j >= c - 1) {
            return Err(bad(ln + 1, "columns must increase within a row"));
        }
        if v != Q::from_integer(0.into()) {
            row.push((c - 1, v));
        }
        count += 1;
    }
    if count != nnz {
        return Err(CliError::Usage(format!("triplet header announces {nnz} entries, found {count}")));
    }
    Ok((n_cols, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let q = |p: i64, d: i64| Q::new(p.into(), d.into());
        let rows = vec![vec![(0, q(1, 1)), (3, q(-2, 3))], vec![], vec![(1, q(5, 1))]];
        let text = write_triplets(4, &rows);
        assert_eq!(text, "3 4 3\n1 1 1\n1 4 -2/3\n3 2 5\n");
        assert_eq!(read_triplets(&text).unwrap(), (4, rows));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_triplets("").is_err());
        assert!(read_triplets("1 2 1\n1 3 1\n").is_err());
        assert!(read_triplets("1 2 2\n1 1 1\n").is_err());
        assert!(read_triplets("1 2 2\n1 2 1\n1 1 1\n").is_err());
    }
}
