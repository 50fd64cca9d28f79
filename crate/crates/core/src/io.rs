//! Embedding matrix files.
//!
//! * `csv`: one row per sample, `d` comma-separated `.`-decimal reals per
//!   row, optionally preceded by a single header row starting with `#`.
//! * `bin-f64`: the 8 ASCII bytes `FIMEFF01`, `n` and `d` as little-endian
//!   `u64`, then `n·d` little-endian binary64 values in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::report::format_real;
use crate::spectral::{EmbeddingBatch, Matrix};

pub const MAGIC: &[u8; 8] = b"FIMEFF01";
const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingFormat {
    Csv,
    BinF64,
}

impl EmbeddingFormat {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingFormat::Csv => "csv",
            EmbeddingFormat::BinF64 => "bin-f64",
        }
    }
}

impl std::str::FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmbeddingFormat::Csv),
            "bin-f64" => Ok(EmbeddingFormat::BinF64),
            other => Err(Error::InvalidInput(format!(
                "unknown embedding format {other:?} (expected csv or bin-f64)"
            ))),
        }
    }
}

fn parse_error(source: &str, location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.into(),
        location: location.into(),
        message: message.into(),
    }
}

/// Reads a batch, requiring at least two rows.
pub fn read_embeddings(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingBatch> {
    let name = path.display().to_string();
    let bytes = fs::read(path)?;
    let matrix = match format {
        EmbeddingFormat::Csv => parse_csv(&bytes, &name)?,
        EmbeddingFormat::BinF64 => parse_bin(&bytes, &name)?,
    };
    if matrix.rows() < 2 {
        return Err(parse_error(
            &name,
            "end of file",
            format!("need at least 2 rows, found {}", matrix.rows()),
        ));
    }
    EmbeddingBatch::new(matrix)
}

pub fn parse_csv(bytes: &[u8], source: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let location = e
                .position()
                .map_or_else(|| "unknown position".to_string(), |p| format!("line {}", p.line()));
            parse_error(source, location, e.to_string())
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if index == 0 && record.get(0).is_some_and(|f| f.starts_with('#')) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_error(
                source,
                format!("line {line}"),
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                parse_error(
                    source,
                    format!("line {line}, field {}", col + 1),
                    format!("{field:?} is not a decimal number"),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_error(
                    source,
                    format!("line {line}, field {}", col + 1),
                    format!("{field:?} is not finite"),
                ));
            }
            data.push(value);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(parse_error(source, "end of file", "no data rows"));
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn parse_bin(bytes: &[u8], source: &str) -> Result<Matrix> {
    if bytes.len() < HEADER_LEN {
        return Err(parse_error(
            source,
            format!("byte {}", bytes.len()),
            format!("truncated header: need {HEADER_LEN} bytes"),
        ));
    }
    if &bytes[..8] != MAGIC {
        return Err(parse_error(source, "byte 0", "missing FIMEFF01 magic"));
    }
    let read_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"));
    let n = read_u64(8);
    let d = read_u64(16);
    let count = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| parse_error(source, "byte 8", format!("shape {n}x{d} is too large")))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != count {
        return Err(parse_error(
            source,
            format!("byte {}", HEADER_LEN + body.len().min(count)),
            format!(
                "header declares {n}x{d} values ({count} bytes), payload has {} bytes",
                body.len()
            ),
        ));
    }
    let mut data = Vec::with_capacity(count / 8);
    for (k, chunk) in body.chunks_exact(8).enumerate() {
        let value = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        if !value.is_finite() {
            return Err(parse_error(
                source,
                format!("byte {}", HEADER_LEN + 8 * k),
                format!("value {value} is not finite"),
            ));
        }
        data.push(value);
    }
    Matrix::from_vec(n as usize, d as usize, data)
}

pub fn encode_bin(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// CSV rows with every value at 17 significant digits.
pub fn encode_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let fields: Vec<String> = m.row(r).iter().map(|&v| format_real(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_embeddings(path: &Path, m: &Matrix, format: EmbeddingFormat) -> Result<()> {
    let mut f = fs::File::create(path)?;
    match format {
        EmbeddingFormat::Csv => f.write_all(encode_csv(m).as_bytes())?,
        EmbeddingFormat::BinF64 => f.write_all(&encode_bin(m))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn location(err: Error) -> String {
        match err {
            Error::Parse { location, .. } => location,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_with_header_and_whitespace() {
        let m = parse_csv(b"# a,b\n1.5, -2\n3e-1,4\n", "t").unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.5, -2.0], vec![0.3, 4.0]]);
    }

    #[test]
    fn csv_header_only_allowed_first() {
        let err = parse_csv(b"1,2\n# late,header\n", "t").unwrap_err();
        assert_eq!(location(err), "line 2, field 1");
    }

    #[test]
    fn csv_empty_is_parse_error() {
        assert!(matches!(parse_csv(b"", "t"), Err(Error::Parse { .. })));
        assert!(matches!(parse_csv(b"# only header\n", "t"), Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_ragged_row_reports_line() {
        let err = parse_csv(b"1,2\n3,4\n5\n", "t").unwrap_err();
        assert_eq!(location(err), "line 3");
    }

    #[test]
    fn csv_rejects_locale_decimal_and_non_finite() {
        assert_eq!(location(parse_csv(b"1;5,2\n", "t").unwrap_err()), "line 1, field 1");
        assert_eq!(location(parse_csv(b"1,inf\n", "t").unwrap_err()), "line 1, field 2");
        assert_eq!(location(parse_csv(b"NaN,1\n", "t").unwrap_err()), "line 1, field 1");
    }

    #[test]
    fn bin_layout_is_exact() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let bytes = encode_bin(&m);
        assert_eq!(&bytes[..8], b"FIMEFF01");
        assert_eq!(&bytes[8..16], &1u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &2u64.to_le_bytes());
        assert_eq!(&bytes[24..32], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[32..40], &2.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 40);
    }

    #[test]
    fn bin_errors_carry_offsets() {
        assert_eq!(location(parse_bin(b"FIMEFF", "t").unwrap_err()), "byte 6");
        let mut bad_magic = encode_bin(&Matrix::zeros(2, 2));
        bad_magic[0] = b'X';
        assert_eq!(location(parse_bin(&bad_magic, "t").unwrap_err()), "byte 0");
        let full = encode_bin(&Matrix::zeros(2, 2));
        assert_eq!(location(parse_bin(&full[..full.len() - 3], "t").unwrap_err()), "byte 53");
        let mut nan = encode_bin(&Matrix::zeros(2, 2));
        nan[32..40].copy_from_slice(&f64::NAN.to_le_bytes());
        assert_eq!(location(parse_bin(&nan, "t").unwrap_err()), "byte 32");
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("csv".parse::<EmbeddingFormat>().unwrap(), EmbeddingFormat::Csv);
        assert_eq!("bin-f64".parse::<EmbeddingFormat>().unwrap(), EmbeddingFormat::BinF64);
        assert!("json".parse::<EmbeddingFormat>().is_err());
    }

    proptest! {
        #[test]
        fn csv_and_bin_decode_identically(
            rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20),
        ) {
            let m = Matrix::from_rows(&rows).unwrap();
            let from_csv = parse_csv(encode_csv(&m).as_bytes(), "t").unwrap();
            let from_bin = parse_bin(&encode_bin(&m), "t").unwrap();
            prop_assert_eq!(&from_csv, &m);
            prop_assert_eq!(&from_bin, &m);
        }
    }
}
