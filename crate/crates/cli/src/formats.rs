//! Artifact formats: binary complex matrices, CSV tables and JSON documents with a header block.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use semiqc_core::quantum::UnitaryMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MATRIX_MAGIC: &[u8; 4] = b"SQCM";

/// Provenance written at the top of every artifact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Header {
    pub fn new(config: &ExperimentConfig) -> Self {
        Header {
            tool: "semiqc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config.hash(),
            seed: config.seed,
        }
    }

    fn comment_lines(&self) -> String {
        format!(
            "# {} {}\n# config_sha256 {}\n# seed {}\n",
            self.tool, self.version, self.config_sha256, self.seed
        )
    }
}

/// Layout: magic `SQCM`, rows and cols as u64 LE, a row-major flag byte, then interleaved
/// `re, im` f64 LE values.
pub fn write_matrix(path: &Path, rows: usize, cols: usize, data: &[Complex64]) -> CliResult<()> {
    if data.len() != rows * cols {
        return Err(CliError::Format(format!(
            "{} values for a {rows}x{cols} matrix",
            data.len()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    w.write_all(&[1u8])?;
    for z in data {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix written by [`write_matrix`] (either storage order); returns row-major values.
pub fn read_matrix(path: &Path) -> CliResult<(usize, usize, Vec<Complex64>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 21 || &bytes[..4] != MATRIX_MAGIC {
        return Err(CliError::Format(format!(
            "{} is not a matrix file",
            path.display()
        )));
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap()) as usize;
    let (rows, cols) = (u64_at(4), u64_at(12));
    let row_major = match bytes[20] {
        0 => false,
        1 => true,
        f => return Err(CliError::Format(format!("bad storage flag {f}"))),
    };
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| CliError::Format("dimensions overflow".into()))?;
    if bytes.len() != 21 + 16 * count {
        return Err(CliError::Format(format!(
            "expected {} data bytes, found {}",
            16 * count,
            bytes.len() - 21
        )));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[21 + 8 * i..29 + 8 * i].try_into().unwrap());
    let stored: Vec<Complex64> = (0..count)
        .map(|k| Complex64::new(f(2 * k), f(2 * k + 1)))
        .collect();
    let data = if row_major {
        stored
    } else {
        (0..count)
            .map(|k| stored[(k % cols) * rows + k / cols])
            .collect()
    };
    Ok((rows, cols, data))
}

pub fn write_unitary(path: &Path, u: &UnitaryMatrix) -> CliResult<()> {
    write_matrix(path, u.dim(), u.dim(), &u.row_major())
}

pub fn read_unitary(path: &Path) -> CliResult<UnitaryMatrix> {
    let (rows, cols, data) = read_matrix(path)?;
    if rows != cols {
        return Err(CliError::Format(format!(
            "{rows}x{cols} matrix is not square"
        )));
    }
    Ok(UnitaryMatrix::from_row_major(rows, &data)?)
}

/// CSV with `#` header lines.
pub fn write_csv<S: AsRef<str>>(
    path: &Path,
    header: &Header,
    columns: &[&str],
    rows: &[Vec<S>],
) -> CliResult<()> {
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(header.comment_lines().as_bytes())?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref()))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of `(index, re, im)`.
pub fn complex_rows(first: usize, values: &[Complex64]) -> Vec<Vec<String>> {
    values
        .iter()
        .enumerate()
        .map(|(i, z)| vec![(first + i).to_string(), num(z.re), num(z.im)])
        .collect()
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// JSON document `{"header": …, "config": …, "result": …}`.
pub fn write_json(
    path: &Path,
    header: &Header,
    config: &ExperimentConfig,
    result: &Value,
) -> CliResult<()> {
    let doc = json!({ "header": header, "config": config, "result": result });
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &doc)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// JSON lines; the first line is the header.
pub fn write_jsonl(path: &Path, header: &Header, lines: &[Value]) -> CliResult<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut f, &json!({ "header": header }))?;
    f.write_all(b"\n")?;
    for l in lines {
        serde_json::to_writer(&mut f, l)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}
