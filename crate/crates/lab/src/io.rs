//! File formats: binary fields, CSV tables and JSON records.
//!
//! Every float goes out as `{:.16e}`, i.e. 17 significant digits, which
//! round-trips an `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rieszflow_core::decay::NormTimeSeries;
use rieszflow_core::solver::weighted_sum;
use rieszflow_core::{GridSpec, ModelParams, NormRecord, RealField};
use serde::Serialize;

use crate::error::{LabError, LabResult};

const HEADER_BYTES: usize = 24;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> LabResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| LabError::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, text).map_err(|e| LabError::io(format!("writing {}", path.display()), e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Encodes a field as `dim, N` (u64), `L` (f64), then the samples in
/// row-major order, all little-endian.
pub fn encode_field(field: &RealField) -> Vec<u8> {
    let g = field.grid;
    let mut out = Vec::with_capacity(HEADER_BYTES + 8 * field.values.len());
    out.extend_from_slice(&(g.dim as u64).to_le_bytes());
    out.extend_from_slice(&(g.points_per_axis as u64).to_le_bytes());
    out.extend_from_slice(&g.box_length.to_le_bytes());
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> LabResult<RealField> {
    if bytes.len() < HEADER_BYTES || !(bytes.len() - HEADER_BYTES).is_multiple_of(8) {
        return Err(LabError::Format(format!(
            "{} bytes is not a header plus samples",
            bytes.len()
        )));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().expect("8-byte slice") };
    let dim = u64::from_le_bytes(word(0));
    let points = u64::from_le_bytes(word(1));
    let box_length = f64::from_le_bytes(word(2));
    let grid = GridSpec::new(
        usize::try_from(dim).map_err(|_| LabError::Format(format!("dimension {dim}")))?,
        usize::try_from(points).map_err(|_| LabError::Format(format!("N = {points}")))?,
        box_length,
    )?;
    let values: Vec<f64> = bytes[HEADER_BYTES..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(RealField::new(grid, values)?)
}

pub fn write_field(path: &Path, field: &RealField) -> LabResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| LabError::io(format!("creating {}", dir.display()), e))?;
    }
    let file = fs::File::create(path)
        .map_err(|e| LabError::io(format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_field(field))
        .and_then(|_| w.flush())
        .map_err(|e| LabError::io(format!("writing {}", path.display()), e))
}

pub fn read_field(path: &Path) -> LabResult<RealField> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| LabError::io(format!("reading {}", path.display()), e))?;
    decode_field(&bytes)
}

/// `t, L2, dtL2, Hsigma, Lm`.
pub fn norms_csv(series: &NormTimeSeries) -> String {
    let mut s = String::from("t,L2,dtL2,Hsigma,Lm\n");
    for (t, r) in series.times.iter().zip(&series.norms) {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            float(*t),
            float(r.l2),
            float(r.dt_l2),
            float(r.hsigma),
            float(r.lm)
        );
    }
    s
}

/// `t, L2, dtL2, Hsigma_semi, Lm, weighted_sum`.
pub fn trajectory_csv(times: &[f64], norms: &[NormRecord], params: &ModelParams) -> String {
    let mut s = String::from("t,L2,dtL2,Hsigma_semi,Lm,weighted_sum\n");
    for (t, r) in times.iter().zip(norms) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            float(*t),
            float(r.l2),
            float(r.dt_l2),
            float(r.hsigma),
            float(r.lm),
            float(weighted_sum(*t, r, params))
        );
    }
    s
}

/// Output paths of one run, in the order they were written.
#[derive(Debug, Default, Clone)]
pub struct Outputs {
    pub root: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn text(&mut self, name: &str, text: &str) -> LabResult<()> {
        write_text(&self.root.join(name), text)?;
        self.files.push(name.into());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> LabResult<()> {
        write_json(&self.root.join(name), value)?;
        self.files.push(name.into());
        Ok(())
    }

    pub fn field(&mut self, name: &str, field: &RealField) -> LabResult<()> {
        write_field(&self.root.join(name), field)?;
        self.files.push(name.into());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        let x = 1.0 / 3.0;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn truncated_field_is_rejected() {
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        let bytes = encode_field(&RealField::zeros(g));
        assert!(decode_field(&bytes[..bytes.len() - 3]).is_err());
        assert!(decode_field(&bytes[..bytes.len() - 8]).is_err());
    }
}
