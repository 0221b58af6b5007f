use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::Dataset;

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("last") {
            Ok(LabelColumn::Last)
        } else if let Ok(i) = s.parse::<usize>() {
            Ok(LabelColumn::Index(i))
        } else if s.is_empty() {
            Err(Error::invalid("empty label column selector"))
        } else {
            Ok(LabelColumn::Name(s.to_string()))
        }
    }
}

impl LabelColumn {
    fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Last if !header.is_empty() => Ok(header.len() - 1),
            LabelColumn::Last => Err(Error::InvalidDataset("empty header".into())),
            LabelColumn::Index(i) if *i < header.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::InvalidDataset(format!(
                "label column index {i} out of range for {} columns",
                header.len()
            ))),
            LabelColumn::Name(n) => header.iter().position(|h| h == n).ok_or_else(|| {
                Error::InvalidDataset(format!("label column {n:?} not in header"))
            }),
        }
    }
}

/// Loads a headered CSV file. The dataset is named after the file stem.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    read_csv(file, &name, label)
}

/// Parses CSV text from any reader. Missing cells are rejected like any
/// other non-numeric value.
pub fn read_csv<R: Read>(reader: R, name: &str, label: &LabelColumn) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_col = label.resolve(&header)?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.clone())
        .collect();
    let n_cols = feature_names.len();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::InvalidDataset(format!(
                "row {row} has {} fields, header has {}",
                rec.len(),
                header.len()
            )));
        }
        let mut col = 0;
        for (i, cell) in rec.iter().enumerate() {
            if i == label_col {
                labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row,
                col,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonNumeric {
                    row,
                    col,
                    value: cell.to_string(),
                });
            }
            data.push(v);
            col += 1;
        }
    }
    let n_rows = labels.len();
    Dataset::from_labelled_rows(name, Matrix::new(n_rows, n_cols, data), &labels, feature_names)
}

/// Writes features followed by a final `class` column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = d.feature_names().iter().map(String::as_str).collect();
    header.push("class");
    w.write_record(&header)?;
    for i in 0..d.n_instances() {
        let mut rec: Vec<String> = d.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(d.class_names()[d.labels()[i]].clone());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_file() {
        let text = "f1,f2,label\n1.0,2.0,a\n3,4,b\n5,6,a\n7,8.5,b\n";
        let d = read_csv(text.as_bytes(), "t", &LabelColumn::Last).unwrap();
        assert_eq!(d.n_instances(), 4);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.labels(), &[0, 1, 0, 1]);
        assert_eq!(d.row(3), &[7.0, 8.5]);
    }

    #[test]
    fn label_by_name_and_index() {
        let text = "y,f1,f2\nA,1,2\nB,3,4\n";
        let by_name = read_csv(text.as_bytes(), "t", &LabelColumn::Name("y".into())).unwrap();
        let by_idx = read_csv(text.as_bytes(), "t", &LabelColumn::Index(0)).unwrap();
        assert_eq!(by_name, by_idx);
        assert_eq!(by_name.feature_names(), &["f1".to_string(), "f2".to_string()]);
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let text = "f1,f2,label\n1,2,a\n3,oops,b\n";
        let err = read_csv(text.as_bytes(), "t", &LabelColumn::Last).unwrap_err();
        assert_eq!(err.to_string(), "non-numeric value at (1, 1): \"oops\"");
    }

    #[test]
    fn missing_cell_rejected() {
        let text = "f1,f2,label\n1,,a\n3,4,b\n";
        assert!(matches!(
            read_csv(text.as_bytes(), "t", &LabelColumn::Last),
            Err(Error::NonNumeric { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn duplicate_feature_names_rejected() {
        let text = "f,f,label\n1,2,a\n3,4,b\n";
        assert!(read_csv(text.as_bytes(), "t", &LabelColumn::Last).is_err());
    }

    #[test]
    fn single_class_rejected() {
        let text = "f,label\n1,a\n3,a\n";
        assert!(read_csv(text.as_bytes(), "t", &LabelColumn::Last).is_err());
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_csv("/nonexistent/x.csv", &LabelColumn::Last),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("last".parse::<LabelColumn>().unwrap(), LabelColumn::Last);
        assert_eq!("3".parse::<LabelColumn>().unwrap(), LabelColumn::Index(3));
        assert_eq!(
            "Class".parse::<LabelColumn>().unwrap(),
            LabelColumn::Name("Class".into())
        );
    }
}
