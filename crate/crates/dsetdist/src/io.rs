//! Dataset files: CSV with a header row and the DSD binary layout.
//!
//! DSD is `"DSD1"`, little-endian `u32` rows, `u32` cols, `u8` has_labels,
//! `rows × cols` `f64` row-major, then `rows` `i64` labels when flagged.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use dsetdist_core::{Dataset, Label, Matrix};

pub const DSD_MAGIC: &[u8; 4] = b"DSD1";
const DSD_HEADER: usize = 13;
const LABEL_COLUMN: &str = "label";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("CSV line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("DSD byte {offset}: {message}")]
    Dsd { offset: usize, message: String },
    #[error("unknown file extension for {0}; use .csv or .dsd")]
    UnknownFormat(PathBuf),
    #[error(transparent)]
    Invalid(#[from] dsetdist_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Dsd,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Result<Self, FormatError> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(FileFormat::Csv),
            Some("dsd") => Ok(FileFormat::Dsd),
            _ => Err(FormatError::UnknownFormat(path.to_path_buf())),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            FileFormat::Csv => "csv",
            FileFormat::Dsd => "dsd",
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> FormatError + '_ {
    move |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Dataset name used for a file: its stem.
pub fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads a dataset, taking the format from the extension unless given.
pub fn load_dataset(path: &Path, format: Option<FileFormat>) -> Result<Dataset, FormatError> {
    let format = match format {
        Some(f) => f,
        None => FileFormat::from_path(path)?,
    };
    let name = dataset_name(path);
    match format {
        FileFormat::Csv => {
            let file = fs::File::open(path).map_err(io_error(path))?;
            read_csv(name, file)
        }
        FileFormat::Dsd => {
            let bytes = fs::read(path).map_err(io_error(path))?;
            read_dsd(name, &bytes)
        }
    }
}

pub fn save_dataset(dataset: &Dataset, path: &Path, format: Option<FileFormat>) -> Result<(), FormatError> {
    let format = match format {
        Some(f) => f,
        None => FileFormat::from_path(path)?,
    };
    match format {
        FileFormat::Csv => {
            let mut buf = Vec::new();
            write_csv(dataset, &mut buf).map_err(io_error(path))?;
            fs::write(path, buf).map_err(io_error(path))
        }
        FileFormat::Dsd => fs::write(path, write_dsd(dataset)).map_err(io_error(path)),
    }
}

/// Parses CSV: a header of feature names, optionally ending in `label`.
pub fn read_csv<R: Read>(name: impl Into<String>, reader: R) -> Result<Dataset, FormatError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let has_labels = header.iter().last() == Some(LABEL_COLUMN);
    let cols = header.len() - usize::from(has_labels);
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, field) in record.iter().enumerate().take(cols) {
            let v: f64 = field.parse().map_err(|_| FormatError::Csv {
                line,
                message: format!("column {j}: `{field}` is not a number"),
            })?;
            data.push(v);
        }
        if has_labels {
            let field = &record[cols];
            let l: Label = field.parse().map_err(|_| FormatError::Csv {
                line,
                message: format!("label `{field}` is not an integer"),
            })?;
            labels.push(l);
        }
        rows += 1;
    }
    let matrix = Matrix::new(rows, cols, data)?;
    Ok(Dataset::new(name, matrix, has_labels.then_some(labels))?)
}

fn csv_error(e: csv::Error) -> FormatError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    };
    FormatError::Csv { line, message }
}

/// Writes CSV with 17 significant digits, so values read back exactly.
pub fn write_csv<W: Write>(dataset: &Dataset, mut out: W) -> io::Result<()> {
    let n = dataset.dim();
    let mut header: Vec<String> = (0..n).map(|j| format!("f{j}")).collect();
    if dataset.labels().is_some() {
        header.push(LABEL_COLUMN.into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, row) in dataset.rows().enumerate() {
        let mut line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        if let Some(labels) = dataset.labels() {
            line.push(labels[i].to_string());
        }
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

pub fn write_dsd(dataset: &Dataset) -> Vec<u8> {
    let (m, n) = (dataset.len(), dataset.dim());
    let labels = dataset.labels();
    let mut out = Vec::with_capacity(DSD_HEADER + 8 * m * n + labels.map_or(0, |_| 8 * m));
    out.extend_from_slice(DSD_MAGIC);
    out.extend_from_slice(&(m as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.push(u8::from(labels.is_some()));
    for v in dataset.data().as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(labels) = labels {
        for l in labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
    }
    out
}

pub fn read_dsd(name: impl Into<String>, bytes: &[u8]) -> Result<Dataset, FormatError> {
    let dsd = |offset: usize, message: String| FormatError::Dsd { offset, message };
    if bytes.len() < DSD_HEADER {
        return Err(dsd(bytes.len(), format!("truncated header ({} of {DSD_HEADER} bytes)", bytes.len())));
    }
    if &bytes[..4] != DSD_MAGIC {
        return Err(dsd(0, "bad magic, expected \"DSD1\"".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
    let (rows, cols) = (u32_at(4), u32_at(8));
    let has_labels = match bytes[12] {
        0 => false,
        1 => true,
        other => return Err(dsd(12, format!("has_labels must be 0 or 1, got {other}"))),
    };
    let cells = rows
        .checked_mul(cols)
        .ok_or_else(|| dsd(4, format!("{rows}x{cols} overflows")))?;
    let expected = DSD_HEADER + 8 * cells + if has_labels { 8 * rows } else { 0 };
    if bytes.len() < expected {
        return Err(dsd(
            bytes.len(),
            format!("truncated: {rows}x{cols} needs {expected} bytes, file has {}", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(dsd(expected, format!("{} trailing bytes", bytes.len() - expected)));
    }
    let word = |o: usize| -> [u8; 8] { bytes[o..o + 8].try_into().expect("8 bytes") };
    let data: Vec<f64> = (0..cells).map(|i| f64::from_le_bytes(word(DSD_HEADER + 8 * i))).collect();
    let labels = has_labels.then(|| {
        let base = DSD_HEADER + 8 * cells;
        (0..rows).map(|i| i64::from_le_bytes(word(base + 8 * i))).collect()
    });
    Ok(Dataset::new(name, Matrix::new(rows, cols, data)?, labels)?)
}
