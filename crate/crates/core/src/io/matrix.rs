use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::EmbeddingMatrix;
use crate::stability::LabelVector;

pub const GSTB_MAGIC: &[u8; 4] = b"GSTB";
pub const GSTB_VERSION: u16 = 1;
pub const GSTB_HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Gstb,
}

impl MatrixFormat {
    /// `.gstb`/`.bin` extensions select the binary format; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gstb") | Some("bin") => MatrixFormat::Gstb,
            _ => MatrixFormat::Csv,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Encodes a matrix as GSTB: magic, u16 version, u16 flags, u64 n, u64 d,
/// then n*d little-endian f64 in row-major order.
pub fn encode_gstb(x: &EmbeddingMatrix) -> Vec<u8> {
    let (n, d) = (x.nrows(), x.ncols());
    let mut out = Vec::with_capacity(GSTB_HEADER_LEN + 8 * n * d);
    out.extend_from_slice(GSTB_MAGIC);
    out.extend_from_slice(&GSTB_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(d as u64).to_le_bytes());
    for v in x.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_gstb(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    if bytes.len() < GSTB_HEADER_LEN || &bytes[..4] != GSTB_MAGIC {
        return Err(Error::Format("missing GSTB header".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let version = u16_at(4);
    if version != GSTB_VERSION {
        return Err(Error::Format(format!("unsupported GSTB version {version}")));
    }
    let (n, d) = (u64_at(8), u64_at(16));
    let expected = n.checked_mul(d).and_then(|c| c.checked_mul(8)).and_then(|c| c.checked_add(GSTB_HEADER_LEN as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(Error::Format(format!("length {} does not match 24 + 8*{n}*{d}", bytes.len())));
    }
    let values: Vec<f64> =
        bytes[GSTB_HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    EmbeddingMatrix::from_row_major(n as usize, d as usize, &values)
}

/// Parsed CSV table: optional header and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a rectangular numeric CSV. The first row is a header when any of
/// its fields fails to parse as a number.
pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("csv: {e}")))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => header = Some(rec.iter().map(str::to_string).collect()),
            Err(_) => return Err(Error::Format(format!("non-numeric value on line {}", i + 1))),
        }
    }
    if let Some(w) = rows.first().map(Vec::len) {
        if let Some(bad) = rows.iter().position(|r| r.len() != w) {
            return Err(Error::Format(format!("row {bad} has {} fields, expected {w}", rows[bad].len())));
        }
        if matches!(&header, Some(h) if h.len() != w) {
            return Err(Error::Format("header width differs from data width".into()));
        }
    }
    Ok(CsvTable { header, rows })
}

pub fn csv_to_matrix(table: &CsvTable) -> Result<EmbeddingMatrix> {
    if table.rows.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }
    EmbeddingMatrix::from_rows(&table.rows)
}

/// Writes values with shortest round-trip formatting, so parsing returns
/// the same bits.
pub fn encode_csv(x: &EmbeddingMatrix) -> String {
    let mut out = String::new();
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|j| format!("{:?}", x.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads a matrix, choosing the format by the GSTB magic bytes.
pub fn read_matrix(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.starts_with(GSTB_MAGIC) {
        return decode_gstb(&bytes);
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::Format(format!("{}: not UTF-8", path.display())))?;
    csv_to_matrix(&parse_csv(&text)?)
}

pub fn write_matrix(path: &Path, x: &EmbeddingMatrix, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Gstb => encode_gstb(x),
        MatrixFormat::Csv => encode_csv(x).into_bytes(),
    };
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&bytes).map_err(|e| io_err(path, e))
}

fn integer_labels(values: &[f64]) -> Result<LabelVector> {
    let raw = values
        .iter()
        .map(|v| {
            if v.fract() == 0.0 && v.is_finite() {
                Ok(*v as i64)
            } else {
                Err(Error::Format(format!("label {v} is not an integer")))
            }
        })
        .collect::<Result<Vec<i64>>>()?;
    LabelVector::from_raw(&raw)
}

/// Labels from a single-column CSV of integers.
pub fn read_labels(path: &Path) -> Result<LabelVector> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let table = parse_csv(&text)?;
    if table.rows.first().is_some_and(|r| r.len() != 1) {
        return Err(Error::Format("labels file must have one column".into()));
    }
    integer_labels(&table.rows.iter().map(|r| r[0]).collect::<Vec<_>>())
}

/// Splits the named column out of a headered CSV as labels; the remaining
/// columns form the matrix.
pub fn read_matrix_with_label_column(path: &Path, column: &str) -> Result<(EmbeddingMatrix, LabelVector)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let table = parse_csv(&text)?;
    let header = table.header.as_ref().ok_or_else(|| Error::Format("--label-col needs a header row".into()))?;
    let col =
        header.iter().position(|h| h == column).ok_or_else(|| Error::Format(format!("no column named '{column}'")))?;
    let labels = integer_labels(&table.rows.iter().map(|r| r[col]).collect::<Vec<_>>())?;
    let rows: Vec<Vec<f64>> =
        table.rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| *v).collect()).collect();
    Ok((EmbeddingMatrix::from_rows(&rows)?, labels))
}

/// One real per line (optional header), e.g. accuracy per perturbation level.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let table = parse_csv(&text)?;
    if table.rows.first().is_some_and(|r| r.len() != 1) {
        return Err(Error::Format("expected a single column".into()));
    }
    Ok(table.rows.into_iter().map(|r| r[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingMatrix {
        EmbeddingMatrix::from_row_major(2, 3, &[0.1, -2.5, 1e-300, std::f64::consts::PI, 7.0, -0.0]).unwrap()
    }

    #[test]
    fn gstb_layout_and_round_trip() {
        let x = sample();
        let b = encode_gstb(&x);
        assert_eq!(b.len(), 24 + 8 * 6);
        assert_eq!(&b[..4], b"GSTB");
        assert_eq!(u16::from_le_bytes([b[4], b[5]]), 1);
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(b[24..32].try_into().unwrap()), 0.1);
        let back = decode_gstb(&b).unwrap();
        assert_eq!(encode_gstb(&back), b);
        assert!(decode_gstb(&b[..b.len() - 1]).is_err());
        let mut v2 = b.clone();
        v2[4] = 2;
        assert!(matches!(decode_gstb(&v2), Err(Error::Format(_))));
    }

    #[test]
    fn csv_header_detection_and_round_trip() {
        let t = parse_csv("a,b\n1,2\n3.5,4e-3\n").unwrap();
        assert_eq!(t.header, Some(vec!["a".into(), "b".into()]));
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.5, 0.004]]);
        assert_eq!(parse_csv("1,2\n3,4\n").unwrap().header, None);
        assert!(parse_csv("1,2\n3\n").is_err());
        assert!(parse_csv("1,2\nx,4\n").is_err());
        let x = sample();
        let back = csv_to_matrix(&parse_csv(&encode_csv(&x)).unwrap()).unwrap();
        assert_eq!(
            back.to_row_major().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            x.to_row_major().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
