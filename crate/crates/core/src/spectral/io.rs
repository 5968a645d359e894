//! Matrix golden files: a JSON header line followed by row-major
//! little-endian `(re, im)` f64 pairs.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, C64};

pub const CONVENTION: &str = "col-major-vec";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub rows: usize,
    pub cols: usize,
    pub convention: String,
    pub layout: String,
}

pub fn write_matrix<W: Write>(mut w: W, m: &Mat) -> Result<()> {
    let header = MatrixHeader {
        rows: m.nrows(),
        cols: m.ncols(),
        convention: CONVENTION.into(),
        layout: "row-major-complex-f64-le".into(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Parse(e.to_string()))?;
    let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
    writeln!(w, "{line}").map_err(io)?;
    let mut buf = Vec::with_capacity(16 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            buf.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io)
}

pub fn read_matrix<R: Read>(r: R) -> Result<(MatrixHeader, Mat)> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line).map_err(|e| Error::Parse(format!("read failed: {e}")))?;
    let header: MatrixHeader = serde_json::from_str(line.trim_end()).map_err(|e| Error::Parse(format!("bad header: {e}")))?;
    if header.convention != CONVENTION {
        return Err(Error::Parse(format!("unexpected convention {:?}", header.convention)));
    }
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes).map_err(|e| Error::Parse(format!("read failed: {e}")))?;
    if bytes.len() != 16 * header.rows * header.cols {
        return Err(Error::Parse(format!("payload has {} bytes, expected {}", bytes.len(), 16 * header.rows * header.cols)));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let m = Mat::from_fn(header.rows, header.cols, |i, j| {
        let k = 2 * (i * header.cols + j);
        C64::new(f(k), f(k + 1))
    });
    Ok((header, m))
}
