//! Preparation of the Pima Indians diabetes data: complete cases only, each
//! feature split at its median into low/high, outcome mapped to neg/pos.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Dataset, Variable};

pub const PIMA_COLUMNS: [&str; 9] = ["PREG", "GLUC", "PRES", "TRIC", "INS", "MASS", "PED", "AGE", "DIAB"];

/// Columns where a zero marks a missing measurement: glucose, blood
/// pressure, skin thickness, insulin and BMI.
const ZERO_IS_MISSING: [usize; 5] = [1, 2, 3, 4, 5];

/// Where values equal to the median go.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MedianTie {
    #[default]
    Low,
    High,
}

pub fn pima_variables() -> Vec<Variable> {
    PIMA_COLUMNS
        .iter()
        .map(|&name| {
            let levels = if name == "DIAB" {
                ["neg", "pos"]
            } else {
                ["low", "high"]
            };
            Variable::new(name, levels).expect("static schema")
        })
        .collect()
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Reads the raw 9-column numeric file. A leading header row is skipped if
/// its first cell is not a number.
pub fn read_pima<R: Read>(reader: R, source: &str, tie: MedianTie) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let data_err = |row: usize, column: usize, message: String| Error::Data {
        path: source.to_string(),
        row,
        column: PIMA_COLUMNS
            .get(column)
            .map_or_else(|| format!("#{}", column + 1), |c| c.to_string()),
        message,
    };

    let mut raw: Vec<[f64; 9]> = Vec::new();
    for (r, record) in csv.records().enumerate() {
        let record = record?;
        if r == 0 && record.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != PIMA_COLUMNS.len() {
            return Err(data_err(
                r + 1,
                record.len().min(8),
                format!("expected 9 columns, found {}", record.len()),
            ));
        }
        let mut values = [0.0; 9];
        for (c, cell) in record.iter().enumerate() {
            values[c] = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(r + 1, c, format!("`{cell}` is not a number")))?;
        }
        if values[8] != 0.0 && values[8] != 1.0 {
            return Err(data_err(
                r + 1,
                8,
                format!("outcome must be 0 or 1, found {}", values[8]),
            ));
        }
        raw.push(values);
    }

    let complete: Vec<[f64; 9]> = raw
        .into_iter()
        .filter(|v| ZERO_IS_MISSING.iter().all(|&c| v[c] != 0.0))
        .collect();
    let medians: Vec<f64> = (0..8)
        .map(|c| median(&mut complete.iter().map(|v| v[c]).collect::<Vec<_>>()).unwrap_or(0.0))
        .collect();
    let rows = complete
        .iter()
        .map(|v| {
            let mut row: Vec<usize> = (0..8)
                .map(|c| {
                    let high = match tie {
                        MedianTie::Low => v[c] > medians[c],
                        MedianTie::High => v[c] >= medians[c],
                    };
                    usize::from(high)
                })
                .collect();
            row.push(usize::from(v[8] == 1.0));
            row
        })
        .collect();
    Dataset::new(pima_variables(), rows)
}

pub fn prepare_pima(path: impl AsRef<Path>, tie: MedianTie) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    read_pima(file, &path.display().to_string(), tie)
}
