use std::path::Path;

use crate::error::Result;
use crate::metrics::CurvePoint;

/// Writes `es_n0_db,value,ci_low,ci_high` rows with a header.
pub fn write_curve<W: std::io::Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_file(path: &Path, points: &[CurvePoint]) -> Result<()> {
    write_curve(std::fs::File::create(path)?, points)
}

pub fn read_curve<R: std::io::Read>(input: R) -> Result<Vec<CurvePoint>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<CurvePoint>, _>>()?)
}

pub fn read_curve_file(path: &Path) -> Result<Vec<CurvePoint>> {
    read_curve(std::fs::File::open(path)?)
}
