//! Point-set CSV files: a header `x0,x1,...` and one point per row.

use crate::error::{Error, Result};
use crate::geometry::SampleSet;
use std::io::{Read, Write};
use std::path::Path;

pub fn read_points_from<R: Read>(reader: R) -> Result<SampleSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let dim = rdr.headers()?.len();
    if dim == 0 {
        return Err(Error::EmptyInput);
    }
    let mut coords = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: record.len() });
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Domain(format!("not a number: {field:?}")))?;
            coords.push(v);
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyInput);
    }
    SampleSet::from_flat(dim, coords)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<SampleSet> {
    read_points_from(std::fs::File::open(path)?)
}

pub fn write_points_to<W: Write>(writer: W, s: &SampleSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((0..s.dim()).map(|j| format!("x{j}")))?;
    for p in s.iter() {
        w.write_record(p.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_points(path: impl AsRef<Path>, s: &SampleSet) -> Result<()> {
    write_points_to(std::fs::File::create(path)?, s)
}

/// Writes per-point log terms as `index,term`.
pub fn write_terms_to<W: Write>(writer: W, terms: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "term"])?;
    for (i, t) in terms.iter().enumerate() {
        w.write_record([i.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
