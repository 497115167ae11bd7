//! Plain-text matrix dumps.
//!
//! The first line is `rows cols b mode qsign`; each following line is one
//! row of space-separated scalars in the `a0`, `a0+a1*r`, `a0-a1*r`
//! encoding, where `r` is the chosen square root of `b`.

use rug::Rational;
use thiserror::Error;

use crate::field::{FieldError, FieldMode, GroundField, QSign, Scalar};
use crate::linalg::{FieldElem, Mat};

#[derive(Debug, Error, PartialEq)]
pub enum DumpError {
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}: expected {want} entries, found {found}")]
    RowLength { row: usize, want: usize, found: usize },
    #[error("expected {want} rows, found {found}")]
    RowCount { want: usize, found: usize },
    #[error("entry `{0}` is not representable in this entry type")]
    NotRepresentable(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Entry types with an exact scalar encoding.
pub trait ExactEntry: FieldElem {
    fn to_scalar(&self) -> Scalar;
}

impl ExactEntry for Rational {
    fn to_scalar(&self) -> Scalar {
        Scalar::from_rational(self.clone())
    }
}

impl ExactEntry for Scalar {
    fn to_scalar(&self) -> Scalar {
        self.clone()
    }
}

pub fn write_matrix<F: ExactEntry>(m: &Mat<F>, field: &GroundField) -> String {
    let mut out = format!("{} {} {} {} {}\n", m.rows(), m.cols(), field.b(), field.mode(), field.qsign());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| x.to_scalar().to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix<F: FieldElem>(text: &str) -> Result<(GroundField, Mat<F>), DumpError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| DumpError::Header("empty input".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let bad = || DumpError::Header(header.to_string());
    let [rows, cols, b, mode, qsign] = parts.as_slice() else {
        return Err(bad());
    };
    let rows: usize = rows.parse().map_err(|_| bad())?;
    let cols: usize = cols.parse().map_err(|_| bad())?;
    let b: i64 = b.parse().map_err(|_| bad())?;
    let qsign: QSign = qsign.parse().map_err(|_| bad())?;
    let field = GroundField::new(b, qsign)?;
    let want_mode = match *mode {
        "rational" => FieldMode::Rational,
        "quadratic" => FieldMode::Quadratic,
        _ => return Err(bad()),
    };
    if field.mode() != want_mode {
        return Err(bad());
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut found = 0;
    for (r, line) in lines.enumerate() {
        if r >= rows {
            if line.trim().is_empty() {
                continue;
            }
            return Err(DumpError::RowCount { want: rows, found: r + 1 });
        }
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(DumpError::RowLength {
                row: r,
                want: cols,
                found: entries.len(),
            });
        }
        for e in entries {
            let s = field.parse_scalar(e)?;
            data.push(F::from_scalar(&s, &field).ok_or_else(|| DumpError::NotRepresentable(e.to_string()))?);
        }
        found += 1;
    }
    if found != rows {
        return Err(DumpError::RowCount { want: rows, found });
    }
    Ok((field, Mat::from_vec(rows, cols, data)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_quadratic() {
        let k = GroundField::new(-2, QSign::Minus).unwrap();
        let m = Mat::from_fn(2, 3, |r, c| k.scalar(Rational::from((r as i64 - 1, 3)), Rational::from(c as i64 - 1)));
        let text = write_matrix(&m, &k);
        assert!(text.starts_with("2 3 -2 quadratic -\n"));
        let (k2, back) = read_matrix::<Scalar>(&text).unwrap();
        assert_eq!(k2, k);
        assert_eq!(back, m);
        assert_eq!(write_matrix(&back, &k2), text);
    }

    #[test]
    fn rational_entries() {
        let k = GroundField::new(4, QSign::Plus).unwrap();
        let m = Mat::from_fn(2, 2, |r, c| Rational::from((r as i64 + 2 * c as i64, 2)));
        let text = write_matrix(&m, &k);
        assert_eq!(text, "2 2 4 rational +\n0 1\n1/2 3/2\n");
        assert_eq!(read_matrix::<Rational>(&text).unwrap().1, m);
    }

    #[test]
    fn malformed_input() {
        assert!(read_matrix::<Rational>("2 2 1 rational +\n1 2\n").is_err());
        assert!(read_matrix::<Rational>("1 2 1 rational +\n1\n").is_err());
        assert!(read_matrix::<Rational>("1 1 2 rational +\n1\n").is_err());
        assert!(read_matrix::<Rational>("1 1 -2 quadratic +\n1+1*r\n").is_err());
    }
}
