use super::{Column, DataError, Dataset, Result, SplitSpec};
use crate::linalg::Matrix;
use std::collections::BTreeSet;
use std::io::Write;

/// Parsed column values of a raw table.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn render(&self, row: usize) -> String {
        match self {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Categorical(v) => v[row].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub data: ColumnData,
}

/// Typed, column-major table of parsed records.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    columns: Vec<RawColumn>,
    n_rows: usize,
}

impl RawTable {
    pub fn new(columns: Vec<RawColumn>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.data.len());
        if let Some(bad) = columns.iter().find(|c| c.data.len() != n_rows) {
            return Err(DataError::Invariant(format!(
                "column {} has a different length",
                bad.name
            )));
        }
        Ok(Self { columns, n_rows })
    }

    pub fn len(&self) -> usize {
        self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn columns(&self) -> &[RawColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&RawColumn> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    /// Distinct string values of a categorical column, sorted.
    pub fn categories(&self, name: &str) -> Result<Vec<String>> {
        match &self.column(name)?.data {
            ColumnData::Categorical(v) => Ok(v
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()),
            ColumnData::Numeric(v) => Ok(v
                .iter()
                .map(|x| format!("{x}"))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()),
        }
    }

    fn value_string(&self, col: usize, row: usize) -> String {
        self.columns[col].data.render(row)
    }
}

/// Write a table as one CSV with a header row, in column order.
pub fn write_table_csv<W: Write>(table: &RawTable, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.columns().iter().map(|c| c.name.as_str()))?;
    for r in 0..table.len() {
        w.write_record((0..table.columns().len()).map(|c| table.value_string(c, r)))?;
    }
    w.flush()?;
    Ok(())
}

/// Which column holds the target and which value of it is favorable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpec {
    pub column: String,
    pub favorable: String,
}

/// Binary protected attribute and its privileged value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectedAttribute {
    pub column: String,
    pub privileged: String,
}

/// Per-column standardization statistics, computed on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    /// Raw column names, in feature order of the continuous columns.
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    /// Population standard deviations; constant columns store 1.
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(columns: Vec<String>, values: &[Vec<f64>]) -> Self {
        let mut means = Vec::with_capacity(values.len());
        let mut stds = Vec::with_capacity(values.len());
        for v in values {
            let (m, s) = mean_std(v);
            means.push(m);
            stds.push(if s > 0.0 { s } else { 1.0 });
        }
        Self {
            columns,
            means,
            stds,
        }
    }

    pub fn apply(&self, index: usize, x: f64) -> f64 {
        (x - self.means[index]) / self.stds[index]
    }
}

pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Output of [`preprocess`].
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub train: Dataset,
    pub dev: Dataset,
    pub test: Dataset,
    pub scaler: Standardizer,
    /// Raw-table row indices that make up each split.
    pub rows: [Vec<usize>; 3],
}

enum Encoder {
    Continuous { raw: usize, scaler_index: usize },
    OneHot { raw: usize, categories: Vec<String> },
}

/// One-hot encode categorical columns, standardize continuous ones with
/// training-split statistics, extract the protected column and split.
pub fn preprocess(
    raw: &RawTable,
    label: &LabelSpec,
    protected: &ProtectedAttribute,
    split: &SplitSpec,
) -> Result<Preprocessed> {
    if raw.is_empty() {
        return Err(DataError::NoRecords);
    }
    let groups = raw.categories(&protected.column)?;
    if groups.len() != 2 || !groups.contains(&protected.privileged) {
        return Err(DataError::NotBinary {
            column: protected.column.clone(),
            found: groups.len(),
        });
    }
    let label_col = raw
        .columns()
        .iter()
        .position(|c| c.name == label.column)
        .ok_or_else(|| DataError::UnknownColumn(label.column.clone()))?;
    let protected_col = raw
        .columns()
        .iter()
        .position(|c| c.name == protected.column)
        .ok_or_else(|| DataError::UnknownColumn(protected.column.clone()))?;

    let rows = split.assign(raw.len())?;

    let mut encoders = Vec::new();
    let mut schema = Vec::new();
    let mut scaler_cols = Vec::new();
    let mut scaler_values = Vec::new();
    for (ci, col) in raw.columns().iter().enumerate() {
        if ci == label_col || ci == protected_col {
            continue;
        }
        match &col.data {
            ColumnData::Numeric(v) => {
                encoders.push(Encoder::Continuous {
                    raw: ci,
                    scaler_index: scaler_cols.len(),
                });
                schema.push(Column::continuous(col.name.clone()));
                scaler_cols.push(col.name.clone());
                scaler_values.push(rows[0].iter().map(|&r| v[r]).collect::<Vec<_>>());
            }
            ColumnData::Categorical(_) => {
                let categories = raw.categories(&col.name)?;
                for c in &categories {
                    schema.push(Column::one_hot(&col.name, c));
                }
                encoders.push(Encoder::OneHot {
                    raw: ci,
                    categories,
                });
            }
        }
    }
    let scaler = Standardizer::fit(scaler_cols, &scaler_values);

    let encode = |indices: &[usize]| -> Result<Dataset> {
        let width = schema.len();
        let mut features = Matrix::zeros(indices.len(), width);
        let mut labels = Vec::with_capacity(indices.len());
        let mut groups = Vec::with_capacity(indices.len());
        for (out_row, &r) in indices.iter().enumerate() {
            let row = features.row_mut(out_row);
            let mut j = 0;
            for enc in &encoders {
                match enc {
                    Encoder::Continuous {
                        raw: ci,
                        scaler_index,
                    } => {
                        let ColumnData::Numeric(v) = &raw.columns()[*ci].data else {
                            unreachable!()
                        };
                        row[j] = scaler.apply(*scaler_index, v[r]);
                        j += 1;
                    }
                    Encoder::OneHot {
                        raw: ci,
                        categories,
                    } => {
                        let value = raw.value_string(*ci, r);
                        let k = categories
                            .binary_search(&value)
                            .expect("category vocabulary covers all rows");
                        row[j + k] = 1.0;
                        j += categories.len();
                    }
                }
            }
            labels.push(u8::from(raw.value_string(label_col, r) == label.favorable));
            groups.push(u8::from(
                raw.value_string(protected_col, r) == protected.privileged,
            ));
        }
        Dataset::new(features, labels, groups, schema.clone())
    };

    let train = encode(&rows[0])?;
    let dev = encode(&rows[1])?;
    let test = encode(&rows[2])?;
    Ok(Preprocessed {
        train,
        dev,
        test,
        scaler,
        rows,
    })
}
