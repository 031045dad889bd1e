//! Categorical datasets as CSV: a header naming the variables, then one
//! level label per cell. Row numbers in errors count data rows from 1.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Dataset, Variable};

/// Reads a dataset whose columns are a permutation of `schema`; the result
/// uses the schema's column order.
pub fn read_dataset<R: Read>(reader: R, source: &str, schema: &[Variable]) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let data_err = |row: usize, column: &str, message: String| Error::Data {
        path: source.to_string(),
        row,
        column: column.to_string(),
        message,
    };

    let header: Vec<String> = csv.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut position = vec![None; schema.len()];
    for (col, name) in header.iter().enumerate() {
        let var = schema
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| data_err(0, name, "unknown column".into()))?;
        if position[var].replace(col).is_some() {
            return Err(data_err(0, name, "duplicate column".into()));
        }
    }
    if let Some(missing) = position.iter().position(Option::is_none) {
        return Err(data_err(0, schema[missing].name(), "column missing from header".into()));
    }
    let position: Vec<usize> = position.into_iter().map(Option::unwrap).collect();

    let mut rows = Vec::new();
    for (r, record) in csv.records().enumerate() {
        let record = record?;
        let row_number = r + 1;
        if record.len() != header.len() {
            let column = header.get(record.len()).map_or("", String::as_str);
            return Err(data_err(
                row_number,
                column,
                format!("expected {} cells, found {}", header.len(), record.len()),
            ));
        }
        let row = schema
            .iter()
            .zip(&position)
            .map(|(var, &col)| {
                let cell = record[col].trim();
                if cell.is_empty() {
                    return Err(data_err(row_number, var.name(), "missing value".into()));
                }
                var.level_index(cell)
                    .map_err(|_| data_err(row_number, var.name(), format!("unknown level `{cell}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Dataset::new(schema.to_vec(), rows)
}

pub fn load_dataset(path: impl AsRef<Path>, schema: &[Variable]) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    read_dataset(file, &path.display().to_string(), schema)
}

pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(data.variables().iter().map(Variable::name))?;
    for row in data.rows() {
        csv.write_record(data.variables().iter().zip(row).map(|(v, &x)| v.levels()[x].as_str()))?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Vec<Variable> {
        vec![
            Variable::new("A", ["low", "high"]).unwrap(),
            Variable::new("B", ["neg", "pos"]).unwrap(),
        ]
    }

    #[test]
    fn reads_in_schema_order() {
        let data = read_dataset("B,A\npos,low\nneg,high\n".as_bytes(), "t", &schema()).unwrap();
        assert_eq!(data.rows(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(read_dataset("A,B\n".as_bytes(), "t", &schema()).unwrap().is_empty());
    }

    #[test]
    fn labels_are_case_sensitive() {
        let err = read_dataset("A,B\nlow,neg\nLOW,pos\n".as_bytes(), "t", &schema()).unwrap_err();
        match err {
            Error::Data { row, column, .. } => assert_eq!((row, column.as_str()), (2, "A")),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_and_missing_cells() {
        let err = read_dataset("A,C\n".as_bytes(), "t", &schema()).unwrap_err();
        assert!(matches!(err, Error::Data { ref column, .. } if column == "C"));
        let err = read_dataset("A,B\nlow,\n".as_bytes(), "t", &schema()).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, ref column, .. } if column == "B"));
        let err = read_dataset("A,B\nlow\n".as_bytes(), "t", &schema()).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
    }

    #[test]
    fn write_then_read() {
        let data = Dataset::new(schema(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &data).unwrap();
        assert_eq!(read_dataset(buf.as_slice(), "t", &schema()).unwrap(), data);
    }
}
