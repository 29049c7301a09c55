//! Complex JSON and barcode CSV formats.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::barcode::Barcode;
use super::complex::{build_complex, ComplexError, FilteredComplex, Generator};

pub const COMPLEX_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed complex file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("unsupported complex file version {0}")]
    Version(u32),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexFile {
    version: u32,
    generators: Vec<Generator>,
    #[serde(default)]
    boundary: BTreeMap<String, Vec<String>>,
}

pub fn read_complex<R: Read>(reader: R) -> Result<FilteredComplex, IoError> {
    let file: ComplexFile = serde_json::from_reader(reader)?;
    if file.version != COMPLEX_FORMAT_VERSION {
        return Err(IoError::Version(file.version));
    }
    Ok(build_complex(file.generators, file.boundary)?)
}

pub fn write_complex<W: Write>(complex: &FilteredComplex, writer: W) -> Result<(), IoError> {
    let file = ComplexFile {
        version: COMPLEX_FORMAT_VERSION,
        generators: complex.generators().to_vec(),
        boundary: complex.boundary_by_id().into_iter().collect(),
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

/// Writes `kind,birth,death,length`, one row per bar. Multiplicities are
/// expanded unless `with_multiplicity` is set, in which case a trailing
/// `multiplicity` column is added and each run is one row.
pub fn write_barcode_csv<W: Write>(
    barcode: &Barcode,
    writer: W,
    with_multiplicity: bool,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    if with_multiplicity {
        w.write_record(["kind", "birth", "death", "length", "multiplicity"])?;
    } else {
        w.write_record(["kind", "birth", "death", "length"])?;
    }
    for b in barcode.finite() {
        let row = [
            "finite".to_string(),
            b.birth.to_string(),
            b.death.to_string(),
            b.length().to_string(),
        ];
        if with_multiplicity {
            w.write_record(row.iter().map(String::as_str).chain([b.mult.to_string().as_str()]))?;
        } else {
            for _ in 0..b.mult {
                w.write_record(&row)?;
            }
        }
    }
    for b in barcode.infinite() {
        let row = ["infinite".to_string(), b.birth.to_string(), String::new(), String::new()];
        if with_multiplicity {
            w.write_record(row.iter().map(String::as_str).chain([b.mult.to_string().as_str()]))?;
        } else {
            for _ in 0..b.mult {
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
