use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{Dataset, Matrix};
use crate::error::{Error, Result};

/// A dataset read from CSV plus the label mapping and an optional grouping column.
#[derive(Debug, Clone)]
pub struct CsvData {
    pub dataset: Dataset,
    /// `class_names[k]` is the raw label text mapped to class `k`.
    pub class_names: Vec<String>,
    pub groups: Option<Vec<String>>,
}

pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    Ok(read_csv(path, label_column, None, None)?.dataset)
}

/// Reads a comma-separated file with a header row.
///
/// Every column other than the label (and the optional group column) must be
/// numeric. Labels that are all integers map to classes in ascending numeric
/// order; any other labels map in order of first appearance. A `mapping`
/// fixes the label order instead (used when evaluating a saved model).
pub fn read_csv(
    path: &Path,
    label_column: &str,
    group_column: Option<&str>,
    mapping: Option<&[String]>,
) -> Result<CsvData> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_owned()))?;
    let group_idx = match group_column {
        Some(g) => Some(
            header
                .iter()
                .position(|h| h == g)
                .ok_or_else(|| Error::InvalidDataset(format!("group column `{g}` not found")))?,
        ),
        None => None,
    };
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&j| j != label_idx && Some(j) != group_idx)
        .collect();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut groups = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for &j in &feature_cols {
            let cell = record.get(j).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row: row + 1,
                column: header[j].clone(),
                value: cell.to_owned(),
            })?;
            values.push(v);
        }
        raw_labels.push(record.get(label_idx).unwrap_or("").to_owned());
        if let Some(g) = group_idx {
            groups.push(record.get(g).unwrap_or("").to_owned());
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let class_names = match mapping {
        Some(m) => m.to_vec(),
        None => label_order(&raw_labels),
    };
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses);
    }
    let labels = raw_labels
        .iter()
        .map(|l| {
            class_names
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| Error::InvalidDataset(format!("unknown label `{l}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = labels.len();
    let names = feature_cols.iter().map(|&j| header[j].clone()).collect();
    let x = Matrix::from_vec(n, feature_cols.len(), values)?;
    let class_count = class_names.len();
    Ok(CsvData {
        dataset: Dataset::new(x, labels, names, class_count)?,
        class_names,
        groups: group_idx.map(|_| groups),
    })
}

fn label_order(raw: &[String]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for l in raw {
        if !seen.contains(l) {
            seen.push(l.clone());
        }
    }
    let numeric: Option<Vec<i64>> = seen.iter().map(|s| s.parse().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(i64, String)> = nums.into_iter().zip(seen).collect();
        pairs.sort_by_key(|(k, _)| *k);
        return pairs.into_iter().map(|(_, s)| s).collect();
    }
    seen
}

/// Writes the dataset with a trailing `y` column holding class indices.
pub fn write_csv(ds: &Dataset, out: &mut dyn Write) -> std::io::Result<()> {
    let mut header = ds.feature_names().join(",");
    header.push_str(",y\n");
    out.write_all(header.as_bytes())?;
    for i in 0..ds.len() {
        let mut line = String::new();
        for v in ds.row(i) {
            line.push_str(&v.to_string());
            line.push(',');
        }
        line.push_str(&ds.labels()[i].to_string());
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}
