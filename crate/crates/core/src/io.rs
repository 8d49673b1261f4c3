//! Covariance-matrix files.
//!
//! JSON: `{"n_a": 1, "n_b": 1, "matrix": [row-major 2(n+m)² reals]}`.
//! CSV: a first line `n_a,n_b`, then one matrix row per line.
//! Writers emit 17 significant digits.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cm::CovarianceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CmFile {
    n_a: usize,
    n_b: usize,
    matrix: Vec<f64>,
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn build(n_a: usize, n_b: usize, values: Vec<f64>) -> Result<CovarianceMatrix> {
    let dim = 2 * (n_a + n_b);
    if values.len() != dim * dim {
        return Err(Error::Parse(format!(
            "partition ({n_a}, {n_b}) needs {} entries, found {}",
            dim * dim,
            values.len()
        )));
    }
    CovarianceMatrix::new(DMatrix::from_row_slice(dim, dim, &values), n_a, n_b)
}

pub fn parse_cm_json(text: &str) -> Result<CovarianceMatrix> {
    let file: CmFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    build(file.n_a, file.n_b, file.matrix)
}

pub fn parse_cm_csv(text: &str) -> Result<CovarianceMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV input".into()))?;
    let parts: Vec<&str> = header.split(',').map(str::trim).collect();
    let [n_a, n_b] = parts[..] else {
        return Err(Error::Parse(format!("expected header `n_a,n_b`, found `{header}`")));
    };
    let parse_usize =
        |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("bad mode count `{s}`: {e}")));
    let (n_a, n_b) = (parse_usize(n_a)?, parse_usize(n_b)?);
    let dim = 2 * (n_a + n_b);
    let mut values = Vec::with_capacity(dim * dim);
    for (row, line) in lines.enumerate() {
        let before = values.len();
        for field in line.split(',') {
            let v = field
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: `{}`: {e}", row + 1, field.trim())))?;
            values.push(v);
        }
        if values.len() - before != dim {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {dim}",
                row + 1,
                values.len() - before
            )));
        }
    }
    build(n_a, n_b, values)
}

/// Parses JSON or CSV, chosen by the first non-blank character.
pub fn parse_cm(text: &str) -> Result<CovarianceMatrix> {
    if text.trim_start().starts_with('{') {
        parse_cm_json(text)
    } else {
        parse_cm_csv(text)
    }
}

pub fn read_cm(path: &Path) -> Result<CovarianceMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_cm(&text)
}

pub fn cm_to_json(sigma: &CovarianceMatrix) -> String {
    let m = sigma.matrix();
    let entries: Vec<String> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| fmt17(m[(i, j)])))
        .collect();
    format!(
        "{{\"n_a\": {}, \"n_b\": {}, \"matrix\": [{}]}}\n",
        sigma.n_a(),
        sigma.n_b(),
        entries.join(", ")
    )
}

pub fn cm_to_csv(sigma: &CovarianceMatrix) -> String {
    let m = sigma.matrix();
    let mut out = format!("{},{}\n", sigma.n_a(), sigma.n_b());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt17(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_cm;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_json() {
        let s = parse_cm(r#"{"n_a": 1, "n_b": 1, "matrix": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]}"#)
            .unwrap();
        assert_eq!(s, CovarianceMatrix::vacuum(1, 1).unwrap());
    }

    #[test]
    fn parses_csv() {
        let s = parse_cm("1,1\n2,0,1,0\n0,2,0,-1\n1,0,2,0\n0,-1,0,2\n").unwrap();
        assert_eq!(s.block_c()[(1, 1)], -1.0);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_cm("{\"n_a\": 1}"), Err(Error::Parse(_))));
        assert!(matches!(parse_cm("1,1\n1,0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_cm("1;1\n"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_cm(r#"{"n_a": 1, "n_b": 1, "matrix": [1,2,3]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn writers_use_seventeen_digits() {
        let s = CovarianceMatrix::vacuum(1, 1).unwrap();
        assert!(cm_to_csv(&s).contains("1.0000000000000000e0"));
    }

    proptest! {
        #[test]
        fn json_and_csv_round_trip_exactly(seed in any::<u64>(), n in 1usize..3, m in 1usize..3) {
            let s = random_cm(n, m, 4.0, seed);
            prop_assert_eq!(&parse_cm(&cm_to_json(&s)).unwrap(), &s);
            prop_assert_eq!(&parse_cm(&cm_to_csv(&s)).unwrap(), &s);
        }
    }
}
