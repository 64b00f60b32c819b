//! Embedding matrix ingestion: CSV (id column + d numeric columns) and a
//! simple binary matrix format (magic, u64 rows, u64 cols, then row-major
//! little-endian f64 values).

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

use super::linalg::Matrix;

pub const EMBEDDING_MAGIC: &[u8; 8] = b"DTEMB001";

/// Read an embedding CSV: header row, first column `id`, remaining columns
/// numeric. Returns ids and the matrix in file order.
pub fn read_embedding_csv(path: &Path) -> Result<(Vec<String>, Matrix)> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?.clone();
    if header.is_empty() || &header[0] != "id" {
        return Err(Error::InvalidInput(format!(
            "{}: first column must be id",
            path.display()
        )));
    }
    let dim = header.len() - 1;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let id = record
            .get(0)
            .ok_or_else(|| Error::InvalidInput("empty csv row".into()))?
            .to_string();
        let mut row = Vec::with_capacity(dim);
        for field in record.iter().skip(1) {
            row.push(
                field
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("{id}: bad value {field:?}: {e}")))?,
            );
        }
        if row.len() != dim {
            return Err(Error::InvalidInput(format!(
                "{id}: expected {dim} values, got {}",
                row.len()
            )));
        }
        ids.push(id);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no embedding rows",
            path.display()
        )));
    }
    Ok((ids, Matrix::from_rows(rows)?))
}

/// Write an embedding CSV with columns id, e0..e{d-1}.
pub fn write_embedding_csv(path: &Path, ids: &[String], matrix: &Matrix) -> Result<()> {
    if ids.len() != matrix.rows {
        return Err(Error::InvalidInput(format!(
            "{} ids vs {} rows",
            ids.len(),
            matrix.rows
        )));
    }
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend((0..matrix.cols).map(|j| format!("e{j}")));
    writer.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut record = vec![id.clone()];
        record.extend(matrix.row(i).iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Write the binary matrix format.
pub fn write_embedding_bin(path: &Path, matrix: &Matrix) -> Result<()> {
    let mut bytes = Vec::with_capacity(24 + matrix.rows * matrix.cols * 8);
    bytes.extend_from_slice(EMBEDDING_MAGIC);
    bytes.extend_from_slice(&(matrix.rows as u64).to_le_bytes());
    bytes.extend_from_slice(&(matrix.cols as u64).to_le_bytes());
    for v in matrix.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

/// Read the binary matrix format.
pub fn read_embedding_bin(path: &Path) -> Result<Matrix> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic)?;
    if &magic != EMBEDDING_MAGIC {
        return Err(Error::InvalidInput(format!(
            "{}: bad magic, not an embedding matrix file",
            path.display()
        )));
    }
    let mut word = [0u8; 8];
    file.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    file.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::InvalidInput("matrix dimensions overflow".into()))?;
    let mut payload = Vec::with_capacity(expected);
    file.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(Error::InvalidInput(format!(
            "{}: expected {expected} payload bytes, got {}",
            path.display(),
            payload.len()
        )));
    }
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let offset = (i * cols + j) * 8;
            let mut chunk = [0u8; 8];
            chunk.copy_from_slice(&payload[offset..offset + 8]);
            out.set(i, j, f64::from_le_bytes(chunk));
        }
    }
    Ok(out)
}
