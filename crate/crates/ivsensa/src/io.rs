//! CSV input (`y,x,z[,w]`) and atomic output files.

use std::io::{Read, Write};
use std::path::Path;

use ivsensa_core::distributions::{Dataset, Observation};

use crate::error::CliError;
use crate::format::format_number;

fn data_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Data {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads microdata with a header naming `y`, `x`, `z` and optionally `w`, in
/// any column order. Extra columns are ignored.
pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let file = std::fs::File::open(path).map_err(|e| data_error(path, e.to_string()))?;
    read_dataset_from(file, path)
}

pub fn read_dataset_from<R: Read>(reader: R, path: &Path) -> Result<Dataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| data_error(path, e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(yc), Some(xc), Some(zc)) = (column("y"), column("x"), column("z")) else {
        return Err(data_error(path, "header must contain columns y, x and z"));
    };
    let wc = column("w");

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // Line numbers count the header as line 1.
        let line = i + 2;
        let record = record.map_err(|e| data_error(path, format!("line {line}: {e}")))?;
        let field = |c: usize, name: &str| {
            record
                .get(c)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| data_error(path, format!("line {line}: missing {name}")))
        };
        let y: f64 = field(yc, "y")?
            .parse()
            .map_err(|_| data_error(path, format!("line {line}: y is not a number")))?;
        let mut obs = Observation::new(y, field(xc, "x")?, field(zc, "z")?);
        if let Some(wc) = wc {
            let w: f64 = field(wc, "w")?
                .parse()
                .map_err(|_| data_error(path, format!("line {line}: w is not a number")))?;
            obs = obs.weighted(w);
        }
        rows.push(obs);
    }
    if rows.is_empty() {
        return Err(data_error(path, "no data rows"));
    }
    Dataset::new(rows).map_err(|e| data_error(path, e.to_string()))
}

/// Renders a dataset in the input schema; the `w` column is written only when
/// some weight differs from one.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let weighted = data.rows().iter().any(|r| r.weight != 1.0);
    let mut out = String::from(if weighted { "y,x,z,w\n" } else { "y,x,z\n" });
    for r in data.rows() {
        out.push_str(&format_number(r.y));
        for label in [&r.x, &r.z] {
            out.push(',');
            out.push_str(&csv_field(label));
        }
        if weighted {
            out.push(',');
            out.push_str(&format_number(r.weight));
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(contents.as_bytes()).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}
