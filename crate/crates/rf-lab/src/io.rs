//! File formats: versioned CSV schemas and a raw little-endian f64 matrix
//! container.
//!
//! Every CSV starts with a schema comment line
//! `# rf-lab csv v1 schema=<name> config=<hex hash>`; readers reject
//! unknown versions. Floats are written with Rust's shortest round-trip
//! formatting, so identical data produces byte-identical files.

use std::io::{Read, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::stimulus::LabeledBatch;
use crate::trajectory::WeightTrajectory;

/// Current CSV schema version.
pub const CSV_VERSION: &str = "v1";

/// Magic prefix of the binary matrix container.
pub const BINARY_MAGIC: &[u8; 8] = b"RFLABF64";

/// Schema comment line placed at the top of every CSV.
pub fn csv_schema_line(schema: &str, config_hash: u64) -> String {
    format!("# rf-lab csv {CSV_VERSION} schema={schema} config={config_hash:016x}")
}

/// Validate a schema line against the expected schema name; rejects other
/// versions and schemas.
pub fn check_csv_schema(line: &str, expected_schema: &str) -> Result<()> {
    let rest = line
        .strip_prefix("# rf-lab csv ")
        .ok_or_else(|| Error::Schema(format!("missing schema comment: {line:?}")))?;
    let mut parts = rest.split_whitespace();
    let version = parts.next().unwrap_or("");
    if version != CSV_VERSION {
        return Err(Error::Schema(format!("unsupported version {version:?}")));
    }
    let schema = parts
        .find_map(|p| p.strip_prefix("schema="))
        .ok_or_else(|| Error::Schema(format!("missing schema name: {line:?}")))?;
    if schema != expected_schema {
        return Err(Error::Schema(format!("expected schema {expected_schema:?}, got {schema:?}")));
    }
    Ok(())
}

/// Write a labelled batch as CSV with header `x0..x{n-1},y`.
pub fn write_batch_csv<W: Write>(out: &mut W, batch: &LabeledBatch, config_hash: u64) -> Result<()> {
    writeln!(out, "{}", csv_schema_line("batch", config_hash))?;
    let n = batch.n();
    let header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    writeln!(out, "{},y", header.join(","))?;
    for (row, &label) in batch.inputs.rows().into_iter().zip(&batch.labels) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{}", cells.join(","), label)?;
    }
    Ok(())
}

/// Write a trajectory as CSV rows `time, unit, w_0..w_{N-1}`.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    traj: &WeightTrajectory,
    config_hash: u64,
) -> Result<()> {
    writeln!(out, "{}", csv_schema_line("trajectory", config_hash))?;
    let n = traj.final_weights().ncols();
    let header: Vec<String> = (0..n).map(|i| format!("w_{i}")).collect();
    writeln!(out, "time,unit,{}", header.join(","))?;
    for (t, w) in traj.times.iter().zip(&traj.weights) {
        for (unit, row) in w.rows().into_iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{t},{unit},{}", cells.join(","))?;
        }
    }
    Ok(())
}

/// Write an amplifier tabulation as CSV rows `a, phi, taylor3`.
pub fn write_amplifier_csv<W: Write>(
    out: &mut W,
    rows: &[(f64, f64, f64)],
    config_hash: u64,
) -> Result<()> {
    writeln!(out, "{}", csv_schema_line("amplifier", config_hash))?;
    writeln!(out, "a,phi,taylor3")?;
    for (a, p, t) in rows {
        writeln!(out, "{a},{p},{t}")?;
    }
    Ok(())
}

/// Write a matrix as magic + u64 row/col header + row-major little-endian
/// f64 payload.
pub fn write_matrix_binary<W: Write>(out: &mut W, m: &Array2<f64>) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(m.nrows() as u64).to_le_bytes())?;
    out.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for v in m.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Read a matrix written by [`write_matrix_binary`].
pub fn read_matrix_binary<R: Read>(input: &mut R) -> Result<Array2<f64>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Schema(format!("bad magic {magic:?}")));
    }
    let mut dims = [0u8; 16];
    input.read_exact(&mut dims)?;
    let rows = u64::from_le_bytes(dims[..8].try_into().expect("8 bytes")) as usize;
    let cols = u64::from_le_bytes(dims[8..].try_into().expect("8 bytes")) as usize;
    let mut buf = vec![0u8; rows * cols * 8];
    input.read_exact(&mut buf)?;
    let data: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::Schema(format!("inconsistent dimensions: {e}")))
}

/// A labelled batch as one matrix with the label in the last column
/// (the layout used for binary export).
pub fn batch_to_matrix(batch: &LabeledBatch) -> Array2<f64> {
    let (rows, n) = batch.inputs.dim();
    Array2::from_shape_fn((rows, n + 1), |(i, j)| {
        if j < n {
            batch.inputs[(i, j)]
        } else {
            batch.labels[i] as f64
        }
    })
}
