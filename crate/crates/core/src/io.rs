//! Plain-text matrix/vector files and CSV output.
//!
//! Matrix file: a header line `m n`, then `m` lines of `n` numbers.
//! Vector file: a header line `n`, then `n` numbers in any whitespace layout.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(src: &str) -> impl Iterator<Item = Token<'_>> {
    src.lines().enumerate().flat_map(|(li, line)| {
        let mut out = Vec::new();
        let mut start = None;
        for (ci, ch) in line
            .char_indices()
            .chain(std::iter::once((line.len(), ' ')))
        {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push(Token {
                        text: &line[s..ci],
                        line: li + 1,
                        column: line[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(ci);
            }
        }
        out
    })
}

fn parse_err(path: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        column,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(path: &str, tok: &Token<'_>, what: &str) -> Result<T> {
    tok.text.parse().map_err(|_| {
        parse_err(
            path,
            tok.line,
            tok.column,
            format!("expected {what}, found '{}'", tok.text),
        )
    })
}

fn real(path: &str, tok: &Token<'_>) -> Result<f64> {
    let v: f64 = number(path, tok, "a decimal number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(path, tok.line, tok.column, "value is not finite"))
    }
}

/// Parses the matrix text format; `origin` is used in error messages.
pub fn parse_matrix(src: &str, origin: &str) -> Result<DenseMatrix> {
    let mut lines = src
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((hl, header)) = lines.next() else {
        return Err(parse_err(origin, 1, 1, "empty matrix file"));
    };
    let head: Vec<Token<'_>> = tokens(header)
        .map(|t| Token { line: hl + 1, ..t })
        .collect();
    if head.len() != 2 {
        return Err(parse_err(origin, hl + 1, 1, "header must be 'm n'"));
    }
    let m: usize = number(origin, &head[0], "a row count")?;
    let n: usize = number(origin, &head[1], "a column count")?;
    if m == 0 || n == 0 {
        return Err(parse_err(origin, hl + 1, 1, "dimensions must be positive"));
    }
    let mut data = Vec::with_capacity(m * n);
    let mut rows = 0;
    for (li, line) in lines {
        if rows == m {
            return Err(parse_err(origin, li + 1, 1, format!("more than {m} rows")));
        }
        let toks: Vec<Token<'_>> = tokens(line).map(|t| Token { line: li + 1, ..t }).collect();
        if toks.len() != n {
            let col = toks.get(n).map_or(line.len() + 1, |t| t.column);
            return Err(parse_err(
                origin,
                li + 1,
                col,
                format!("expected {n} values, found {}", toks.len()),
            ));
        }
        for t in &toks {
            data.push(real(origin, t)?);
        }
        rows += 1;
    }
    if rows != m {
        return Err(parse_err(
            origin,
            src.lines().count().max(1),
            1,
            format!("expected {m} rows, found {rows}"),
        ));
    }
    DenseMatrix::new(m, n, data)
}

/// Parses the vector text format.
pub fn parse_vector(src: &str, origin: &str) -> Result<Vec<f64>> {
    let mut toks = tokens(src);
    let Some(first) = toks.next() else {
        return Err(parse_err(origin, 1, 1, "empty vector file"));
    };
    let n: usize = number(origin, &first, "a length")?;
    let mut out = Vec::with_capacity(n);
    for t in toks {
        if out.len() == n {
            return Err(parse_err(
                origin,
                t.line,
                t.column,
                format!("more than {n} values"),
            ));
        }
        out.push(real(origin, &t)?);
    }
    if out.len() != n {
        return Err(parse_err(
            origin,
            src.lines().count().max(1),
            1,
            format!("expected {n} values, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&read_text(path)?, &path.display().to_string())
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = format!("{}\n", v.len());
    for x in v {
        s.push_str(&fmt_real(*x));
        s.push('\n');
    }
    s
}

pub fn format_matrix(a: &DenseMatrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| fmt_real(*v)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_text(path, &format_vector(v))
}

pub fn write_matrix(path: &Path, a: &DenseMatrix) -> Result<()> {
    write_text(path, &format_matrix(a))
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A record type with a fixed CSV header.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];

    fn to_fields(&self) -> Vec<String>;

    fn from_fields(fields: &[&str]) -> std::result::Result<Self, String>;
}

/// Renders rows as CSV text: header, then one newline-terminated line per row.
pub fn csv_string<R: CsvRow>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let _ = w.write_record(R::HEADER);
    for r in rows {
        let _ = w.write_record(r.to_fields());
    }
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("fields are valid UTF-8")
}

pub fn write_csv<R: CsvRow>(rows: &[R], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(csv_string(rows).as_bytes()).map_err(io_err)
}

pub fn read_csv<R: CsvRow>(path: &Path) -> Result<Vec<R>> {
    let origin = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let header = rdr
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    if header.iter().ne(R::HEADER.iter().copied()) {
        return Err(parse_err(
            &origin,
            1,
            1,
            format!("expected header '{}'", R::HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let fields: Vec<&str> = rec.iter().collect();
        out.push(R::from_fields(&fields).map_err(|m| parse_err(&origin, i + 2, 1, m))?);
    }
    Ok(out)
}

pub(crate) fn field<T: std::str::FromStr>(
    fields: &[&str],
    i: usize,
    name: &str,
) -> std::result::Result<T, String> {
    fields
        .get(i)
        .ok_or_else(|| format!("missing field '{name}'"))?
        .parse()
        .map_err(|_| format!("invalid value for '{name}': '{}'", fields[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_matrix_and_vector() {
        let a = parse_matrix("2 3\n1 2 3\n4.5 -1e-3 0\n\n", "a.txt").unwrap();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.row(1), &[4.5, -1e-3, 0.0]);
        let v = parse_vector("3\n1\n2 3.5e2", "v.txt").unwrap();
        assert_eq!(v, vec![1.0, 2.0, 350.0]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_matrix("2 2\n1 2\n3 x\n", "a.txt").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_matrix("2 2\n1 2 3\n3 4\n", "a").is_err());
        assert!(parse_matrix("2 2\n1 2\n", "a").is_err());
        assert!(parse_matrix("", "a").is_err());
        assert!(parse_vector("3\n1 2", "v").is_err());
        assert!(parse_vector("1\n1 2", "v").is_err());
        assert!(parse_vector("2\n1 inf", "v").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_matrix(Path::new("/definitely/not/here.txt")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/definitely/not/here.txt"));
    }

    proptest! {
        #[test]
        fn text_formats_round_trip(v in proptest::collection::vec(-1e6f64..1e6, 1..12)) {
            prop_assert_eq!(parse_vector(&format_vector(&v), "v").unwrap(), v.clone());
            let a = DenseMatrix::new(1, v.len(), v).unwrap();
            prop_assert_eq!(parse_matrix(&format_matrix(&a), "a").unwrap(), a);
        }
    }
}
