//! Text format for linear systems.
//!
//! ```text
//! n
//! a_11 ... a_1n
//! ...
//! a_n1 ... a_nn
//! b_1 ... b_n
//! ```
//!
//! Values are whitespace-separated decimals. Blank lines are ignored.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bsf_core::jacobi::LinearSystem;

#[derive(Debug, thiserror::Error)]
pub enum MatrixFileError {
    #[error("MatrixFile: cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("MatrixFile: line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("MatrixFile: line {line}: expected {expected} values, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("MatrixFile: expected {expected} non-blank lines, found {found}")]
    LineCount { expected: usize, found: usize },
}

pub fn read_system(path: &Path) -> Result<LinearSystem, MatrixFileError> {
    let text = fs::read_to_string(path).map_err(|source| MatrixFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_system(&text)
}

pub fn parse_system(text: &str) -> Result<LinearSystem, MatrixFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, header) = lines
        .next()
        .ok_or(MatrixFileError::LineCount { expected: 3, found: 0 })?;
    let n: usize = header.parse().map_err(|_| MatrixFileError::Parse {
        line: first,
        detail: format!("dimension {header:?} is not a positive integer"),
    })?;
    if n == 0 {
        return Err(MatrixFileError::Parse {
            line: first,
            detail: "dimension must be at least 1".into(),
        });
    }

    let rest: Vec<(usize, &str)> = lines.collect();
    if rest.len() != n + 1 {
        return Err(MatrixFileError::LineCount {
            expected: n + 2,
            found: rest.len() + 1,
        });
    }
    let mut a = Vec::with_capacity(n * n);
    for &(line, l) in &rest[..n] {
        a.extend(parse_row(line, l, n)?);
    }
    let (line, l) = rest[n];
    let b = parse_row(line, l, n)?;
    Ok(LinearSystem::new(n, a, b).expect("dimensions checked while parsing"))
}

fn parse_row(line: usize, text: &str, n: usize) -> Result<Vec<f64>, MatrixFileError> {
    let row = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MatrixFileError::Parse {
                    line,
                    detail: format!("{tok:?} is not a finite real number"),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != n {
        return Err(MatrixFileError::Dimension {
            line,
            expected: n,
            found: row.len(),
        });
    }
    Ok(row)
}

/// Writes with shortest round-trip formatting, so reading back is exact.
pub fn write_system<W: Write>(mut out: W, sys: &LinearSystem) -> io::Result<()> {
    let n = sys.n();
    writeln!(out, "{n}")?;
    for i in 0..n {
        write_row(&mut out, sys.row(i))?;
    }
    write_row(&mut out, sys.b())
}

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let mut sep = "";
    for v in values {
        write!(out, "{sep}{v:?}")?;
        sep = " ";
    }
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsf_core::jacobi::generate_diagonally_dominant_system;
    use proptest::prelude::*;

    #[test]
    fn reads_small_system() {
        let sys = parse_system("2\n2 1\n1 3\n\n3 4\n").unwrap();
        assert_eq!(sys.n(), 2);
        assert_eq!(sys.row(1), &[1.0, 3.0]);
        assert_eq!(sys.b(), &[3.0, 4.0]);
    }

    #[test]
    fn rejects_short_row() {
        let err = parse_system("2\n2 1\n1\n3 4\n").unwrap_err();
        assert!(
            matches!(
                err,
                MatrixFileError::Dimension {
                    line: 3,
                    expected: 2,
                    found: 1
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn rejects_long_b() {
        let err = parse_system("2\n2 1\n1 3\n3 4 5\n").unwrap_err();
        assert!(matches!(err, MatrixFileError::Dimension { line: 4, .. }), "{err}");
    }

    #[test]
    fn rejects_missing_and_extra_lines() {
        assert!(matches!(
            parse_system("2\n2 1\n1 3\n").unwrap_err(),
            MatrixFileError::LineCount { expected: 4, found: 3 }
        ));
        assert!(matches!(
            parse_system("1\n2\n3\n4\n").unwrap_err(),
            MatrixFileError::LineCount { expected: 3, found: 4 }
        ));
        assert!(matches!(
            parse_system("").unwrap_err(),
            MatrixFileError::LineCount { .. }
        ));
    }

    #[test]
    fn rejects_bad_tokens() {
        assert!(matches!(
            parse_system("x\n").unwrap_err(),
            MatrixFileError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_system("0\n").unwrap_err(),
            MatrixFileError::Parse { .. }
        ));
        assert!(matches!(
            parse_system("1\nabc\n1\n").unwrap_err(),
            MatrixFileError::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_system("1\nNaN\n1\n").unwrap_err(),
            MatrixFileError::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn zero_diagonal_parses() {
        let sys = parse_system("2\n1 1\n1 0\n1 1\n").unwrap();
        assert_eq!(sys.a(1, 1), 0.0);
    }

    #[test]
    fn missing_file() {
        let err = read_system(Path::new("/nonexistent/matrix.txt")).unwrap_err();
        assert!(matches!(err, MatrixFileError::Io { .. }));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..12, seed in any::<u64>()) {
            let sys = generate_diagonally_dominant_system(n, seed);
            let mut buf = Vec::new();
            write_system(&mut buf, &sys).unwrap();
            let back = parse_system(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, sys);
        }
    }
}
