//! Matrix Market coordinate files and the SuiteSparse collection fetcher.

#[cfg(feature = "fetch")]
mod fetch;

#[cfg(feature = "fetch")]
pub use fetch::{default_cache_dir, fetch_collection_matrix, Fetcher, CACHE_ENV, DEFAULT_BASE_URL};

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::CsrMatrix;

const BANNER: &str = "%%matrixmarket";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Pattern,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// The banner line of a Matrix Market file. The object is always `matrix`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixMarketHeader {
    pub format: MmFormat,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

impl FromStr for MatrixMarketHeader {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let lower = line.trim().to_ascii_lowercase();
        let mut tokens = lower.split_whitespace();
        if tokens.next() != Some(BANNER) {
            return Err(Error::parse(1, "missing %%MatrixMarket banner"));
        }
        let object = tokens.next().ok_or_else(|| Error::parse(1, "missing object"))?;
        if object != "matrix" {
            return Err(Error::parse(1, format!("unsupported object `{object}`")));
        }
        let format = match tokens.next() {
            Some("coordinate") => MmFormat::Coordinate,
            Some("array") => MmFormat::Array,
            other => return Err(Error::parse(1, format!("unknown format {other:?}"))),
        };
        let field = match tokens.next() {
            Some("real") | Some("double") => MmField::Real,
            Some("integer") => MmField::Integer,
            Some("pattern") => MmField::Pattern,
            Some("complex") => MmField::Complex,
            other => return Err(Error::parse(1, format!("unknown field {other:?}"))),
        };
        let symmetry = match tokens.next() {
            Some("general") => MmSymmetry::General,
            Some("symmetric") => MmSymmetry::Symmetric,
            Some("skew-symmetric") => MmSymmetry::SkewSymmetric,
            Some("hermitian") => MmSymmetry::Hermitian,
            other => return Err(Error::parse(1, format!("unknown symmetry {other:?}"))),
        };
        Ok(MatrixMarketHeader {
            format,
            field,
            symmetry,
        })
    }
}

/// Parses a Matrix Market coordinate file into CSR.
///
/// Symmetric and skew-symmetric storage is expanded to full storage, pattern
/// entries get the value 1.0, and duplicate coordinates are summed.
pub fn parse_matrix_market(text: &str) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input"))?;
    let header: MatrixMarketHeader = banner.parse()?;
    match header.field {
        MmField::Complex => return Err(Error::UnsupportedField("complex".into())),
        MmField::Real | MmField::Integer | MmField::Pattern => {}
    }
    if header.format == MmFormat::Array {
        return Err(Error::UnsupportedFormat("array".into()));
    }
    if header.symmetry == MmSymmetry::Hermitian {
        return Err(Error::UnsupportedSymmetry("hermitian".into()));
    }

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = data
        .next()
        .ok_or_else(|| Error::parse(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(size_line, format!("bad size line: {e}")))?;
    let [n_rows, n_cols, declared] = dims[..] else {
        return Err(Error::parse(
            size_line,
            format!("size line needs 3 integers, found {}", dims.len()),
        ));
    };
    if header.symmetry != MmSymmetry::General && n_rows != n_cols {
        return Err(Error::parse(
            size_line,
            "symmetric storage requires a square matrix",
        ));
    }

    let expanded = if header.symmetry == MmSymmetry::General { 1 } else { 2 };
    let mut triplets = Vec::with_capacity(declared * expanded);
    let mut count = 0usize;
    for (line_no, line) in data {
        count += 1;
        if count > declared {
            return Err(Error::parse(
                line_no,
                format!("more entries than the declared {declared}"),
            ));
        }
        let mut tokens = line.split_whitespace();
        let mut index = |what: &str, bound: usize| -> Result<usize> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("missing {what} index")))?;
            let i: usize = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad {what} index `{tok}`")))?;
            if i == 0 || i > bound {
                return Err(Error::parse(
                    line_no,
                    format!("{what} index {i} outside 1..={bound}"),
                ));
            }
            Ok(i - 1)
        };
        let r = index("row", n_rows)?;
        let c = index("column", n_cols)?;
        let v = match header.field {
            MmField::Pattern => 1.0,
            _ => {
                let tok = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "missing value"))?;
                tok.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("bad value `{tok}`")))?
            }
        };
        if tokens.next().is_some() {
            return Err(Error::parse(line_no, "trailing tokens"));
        }
        triplets.push((r, c, v));
        if r != c {
            match header.symmetry {
                MmSymmetry::Symmetric => triplets.push((c, r, v)),
                MmSymmetry::SkewSymmetric => triplets.push((c, r, -v)),
                _ => {}
            }
        }
    }
    if count < declared {
        return Err(Error::parse(
            text.lines().count(),
            format!("expected {declared} entries, found {count}"),
        ));
    }
    CsrMatrix::from_triplets(n_rows, n_cols, triplets)
}

/// Serializes as `coordinate real general` with 1-based indices. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_matrix_market(m: &CsrMatrix) -> String {
    let mut out = String::with_capacity(32 + m.nnz() * 24);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz());
    for (r, c, v) in m.iter() {
        let _ = writeln!(out, "{} {} {:?}", r + 1, c + 1, v);
    }
    out
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let mut text = String::new();
    fs::File::open(path.as_ref())?.read_to_string(&mut text)?;
    parse_matrix_market(&text)
}

pub fn write_matrix_market_file(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_matrix_market(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_general_diagonal() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 5.0\n2 2 7.0",
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.values(), &[5.0, 7.0]);
        assert_eq!(m.col_idx(), &[0, 1]);
    }

    #[test]
    fn expands_symmetric_lower_triangle() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n\
                    % lower triangle of a tridiagonal\n\
                    3 3 5\n1 1 2\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m.nnz(), 7);
        assert_eq!(m.get(0, 1), Some(-1.0));
        assert_eq!(m.get(1, 0), Some(-1.0));
        for (r, c, _) in m.iter() {
            assert!(m.get(c, r).is_some());
        }
    }

    #[test]
    fn pattern_entries_are_one() {
        let m = parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n3 1\n")
            .unwrap();
        assert_eq!(m.get(2, 0), Some(1.0));
    }

    #[test]
    fn skew_symmetric_negates_mirror() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3.5\n",
        )
        .unwrap();
        assert_eq!(m.get(1, 0), Some(3.5));
        assert_eq!(m.get(0, 1), Some(-3.5));
    }

    #[test]
    fn banner_is_case_insensitive() {
        let m = parse_matrix_market("%%MATRIXMARKET Matrix Coordinate Integer General\n1 1 1\n1 1 4\n")
            .unwrap();
        assert_eq!(m.get(0, 0), Some(4.0));
    }

    #[test]
    fn duplicates_are_summed() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 2 1.5\n1 2 2.5\n2 1 1\n",
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), Some(4.0));
    }

    #[test]
    fn rejects_complex_array_hermitian() {
        let complex = "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n";
        assert!(matches!(parse_matrix_market(complex), Err(Error::UnsupportedField(_))));
        let array = "%%MatrixMarket matrix array real general\n1 1\n1\n";
        assert!(matches!(parse_matrix_market(array), Err(Error::UnsupportedFormat(_))));
        let herm = "%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n";
        assert!(matches!(parse_matrix_market(herm), Err(Error::UnsupportedSymmetry(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 1.0\n2 x 1.0\n";
        match parse_matrix_market(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(matches!(parse_matrix_market(oob), Err(Error::Parse { line: 3, .. })));
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        assert!(matches!(parse_matrix_market(short), Err(Error::Parse { .. })));
        assert!(matches!(parse_matrix_market("2 2 0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn writes_size_lines() {
        let text = write_matrix_market(&CsrMatrix::identity(2));
        assert!(text.lines().any(|l| l == "2 2 2"));
        let empty = CsrMatrix::from_triplets(3, 3, []).unwrap();
        let text = write_matrix_market(&empty);
        assert_eq!(text.lines().collect::<Vec<_>>(), vec![
            "%%MatrixMarket matrix coordinate real general",
            "3 3 0"
        ]);
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(
            (r, c, t) in (1usize..20, 1usize..20).prop_flat_map(|(r, c)| {
                (Just(r), Just(c), prop::collection::vec((0..r, 0..c, any::<f64>().prop_filter("finite", |v| v.is_finite())), 0..60))
            })
        ) {
            let m = CsrMatrix::from_triplets(r, c, t).unwrap();
            let back = parse_matrix_market(&write_matrix_market(&m)).unwrap();
            prop_assert_eq!(back.row_ptr(), m.row_ptr());
            prop_assert_eq!(back.col_idx(), m.col_idx());
            let a: Vec<u64> = back.values().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = m.values().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
