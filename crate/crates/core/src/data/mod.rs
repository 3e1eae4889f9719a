//! Datasets, splits and preprocessing.

mod adult;
mod synthetic;
mod table;

pub use adult::{
    adult_label, adult_protected_sex, download_adult, load_adult, parse_adult, ADULT_COLUMNS,
    ADULT_URLS,
};
pub use synthetic::{generate_synthetic, SyntheticSpec, MEPS_LIKE_BIAS};
pub use table::{
    preprocess, write_table_csv, ColumnData, LabelSpec, Preprocessed, ProtectedAttribute,
    RawColumn, RawTable, Standardizer,
};

use crate::linalg::Matrix;
use crate::rng::{self, Stream};
use rand::seq::SliceRandom;
use thiserror::Error;

/// Label value of the favorable outcome.
pub const FAVORABLE_LABEL: u8 = 1;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("download of {url} failed: {reason}")]
    Download { url: String, reason: String },
    #[error("no records")]
    NoRecords,
    #[error("row {row}: expected {expected} columns, found {found}")]
    ColumnCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: malformed value {value:?} in column {column}")]
    Malformed {
        row: usize,
        column: String,
        value: String,
    },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("protected column {column:?} is not binary (found {found} distinct values)")]
    NotBinary { column: String, found: usize },
    #[error("a split is empty")]
    EmptySplit,
    #[error("split fractions must be non-negative and sum to 1, got {0:?}")]
    BadFractions([f64; 3]),
    #[error("dataset invariant violated: {0}")]
    Invariant(String),
    #[error("invalid synthetic spec: {0}")]
    BadSynthetic(String),
}

pub type Result<T> = std::result::Result<T, DataError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    Continuous,
    /// Indicator column of one category of a source attribute.
    OneHot {
        attribute: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn continuous(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Continuous,
        }
    }

    pub fn one_hot(attribute: &str, category: &str) -> Self {
        Self {
            name: format!("{attribute}={category}"),
            kind: ColumnKind::OneHot {
                attribute: attribute.to_string(),
            },
        }
    }
}

/// Encoded feature matrix with binary labels and a binary protected-group
/// indicator (1 = privileged).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<u8>,
    protected: Vec<u8>,
    schema: Vec<Column>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<u8>,
        protected: Vec<u8>,
        schema: Vec<Column>,
    ) -> Result<Self> {
        let n = features.rows();
        if labels.len() != n || protected.len() != n {
            return Err(DataError::Invariant(format!(
                "{} feature rows, {} labels, {} protected entries",
                n,
                labels.len(),
                protected.len()
            )));
        }
        if schema.len() != features.cols() {
            return Err(DataError::Invariant(format!(
                "schema has {} columns, features have {}",
                schema.len(),
                features.cols()
            )));
        }
        if labels.iter().chain(&protected).any(|&v| v > 1) {
            return Err(DataError::Invariant("labels and groups must be 0/1".into()));
        }
        let privileged = protected.iter().filter(|&&g| g == 1).count();
        if privileged == 0 || privileged == n {
            return Err(DataError::Invariant("both groups must be non-empty".into()));
        }
        Ok(Self {
            features,
            labels,
            protected,
            schema,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn protected(&self) -> &[u8] {
        &self.protected
    }

    pub fn schema(&self) -> &[Column] {
        &self.schema
    }

    pub fn favorable_label(&self) -> u8 {
        FAVORABLE_LABEL
    }

    pub fn continuous_columns(&self) -> Vec<usize> {
        self.schema
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ColumnKind::Continuous)
            .map(|(i, _)| i)
            .collect()
    }

    /// Same labels, groups and schema with replaced features.
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        if features.rows() != self.len() || features.cols() != self.n_features() {
            return Err(DataError::Invariant(
                "replacement features have a different shape".into(),
            ));
        }
        Ok(Self {
            features,
            labels: self.labels.clone(),
            protected: self.protected.clone(),
            schema: self.schema.clone(),
        })
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.features.select_rows(indices),
            indices.iter().map(|&i| self.labels[i]).collect(),
            indices.iter().map(|&i| self.protected[i]).collect(),
            self.schema.clone(),
        )
    }

    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        if self.schema != other.schema {
            return Err(DataError::Invariant(
                "cannot concatenate datasets with different schemas".into(),
            ));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut protected = self.protected.clone();
        protected.extend_from_slice(&other.protected);
        Self::new(
            self.features.vstack(&other.features),
            labels,
            protected,
            self.schema.clone(),
        )
    }

    /// Random three-way split without re-normalization.
    pub fn split(&self, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
        let [a, b, c] = spec.assign(self.len())?;
        Ok((self.subset(&a)?, self.subset(&b)?, self.subset(&c)?))
    }
}

/// Train / dev / test fractions and the shuffling seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub fractions: [f64; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(fractions: [f64; 3], seed: u64) -> Result<Self> {
        let spec = Self { fractions, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// 53.4 / 13.3 / 33.3 split used by the replication studies.
    pub fn replication(seed: u64) -> Self {
        Self {
            fractions: [0.534, 0.133, 0.333],
            seed,
        }
    }

    /// 80/20 train/test with 10% of the training portion held out for
    /// postprocessing fits.
    pub fn pareto(seed: u64) -> Self {
        Self {
            fractions: [0.72, 0.08, 0.20],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.fractions.iter().sum();
        if self.fractions.iter().any(|f| !(*f >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(DataError::BadFractions(self.fractions));
        }
        Ok(())
    }

    /// Split sizes for `n` records; the test split absorbs rounding.
    pub fn sizes(&self, n: usize) -> Result<[usize; 3]> {
        self.validate()?;
        let train = (self.fractions[0] * n as f64).round() as usize;
        let dev = ((self.fractions[1] * n as f64).round() as usize).min(n - train.min(n));
        let train = train.min(n);
        let test = n - train - dev;
        if train == 0 || dev == 0 || test == 0 {
            return Err(DataError::EmptySplit);
        }
        Ok([train, dev, test])
    }

    /// Shuffled row indices for each split.
    pub fn assign(&self, n: usize) -> Result<[Vec<usize>; 3]> {
        let [train, dev, _] = self.sizes(n)?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng::stream(self.seed, Stream::Split));
        let test = idx.split_off(train + dev);
        let dev_part = idx.split_off(train);
        Ok([idx, dev_part, test])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(n: usize) -> Dataset {
        let features = Matrix::from_vec(n, 1, (0..n).map(|i| i as f64).collect());
        let labels = (0..n).map(|i| (i % 2) as u8).collect();
        let protected = (0..n).map(|i| ((i / 2) % 2) as u8).collect();
        Dataset::new(features, labels, protected, vec![Column::continuous("x")]).unwrap()
    }

    #[test]
    fn rejects_length_mismatch_and_single_group() {
        let f = Matrix::from_vec(2, 1, vec![0.0, 1.0]);
        let s = vec![Column::continuous("x")];
        assert!(Dataset::new(f.clone(), vec![0], vec![0, 1], s.clone()).is_err());
        assert!(Dataset::new(f.clone(), vec![0, 1], vec![1, 1], s.clone()).is_err());
        assert!(Dataset::new(f, vec![0, 1], vec![0, 1], s).is_ok());
    }

    #[test]
    fn degenerate_split_is_rejected() {
        let spec = SplitSpec::new([1.0, 0.0, 0.0], 0).unwrap();
        assert!(matches!(spec.assign(10), Err(DataError::EmptySplit)));
        assert!(SplitSpec::new([0.5, 0.5, 0.5], 0).is_err());
    }

    #[test]
    fn split_is_deterministic_and_partitions_rows() {
        let spec = SplitSpec::new([0.5, 0.2, 0.3], 11).unwrap();
        let a = spec.assign(10).unwrap();
        let b = spec.assign(10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(Vec::len).collect::<Vec<_>>(), vec![5, 2, 3]);
        let mut all: Vec<usize> = a.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        let d = tiny(20);
        let (tr, dv, te) = d
            .split(&SplitSpec::new([0.5, 0.2, 0.3], 3).unwrap())
            .unwrap();
        assert_eq!((tr.len(), dv.len(), te.len()), (10, 4, 6));
    }
}
