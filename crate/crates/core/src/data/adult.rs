//! UCI Adult census income data.
//!
//! Accepts a directory holding the original `adult.data` / `adult.test` pair,
//! a single file in the original layout, or the single-CSV cache written by
//! `pfairdp ingest` (same 15 columns, with a header row). Records with a
//! missing value (`?`) are dropped.

use super::table::{ColumnData, LabelSpec, ProtectedAttribute, RawColumn, RawTable};
use super::{DataError, Result};
use std::fs;
use std::path::Path;

/// Standard column layout; `true` marks continuous columns.
pub const ADULT_COLUMNS: [(&str, bool); 15] = [
    ("age", true),
    ("workclass", false),
    ("fnlwgt", true),
    ("education", false),
    ("education-num", true),
    ("marital-status", false),
    ("occupation", false),
    ("relationship", false),
    ("race", false),
    ("sex", false),
    ("capital-gain", true),
    ("capital-loss", true),
    ("hours-per-week", true),
    ("native-country", false),
    ("income", false),
];

pub const ADULT_URLS: [(&str, &str); 2] = [
    (
        "adult.data",
        "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data",
    ),
    (
        "adult.test",
        "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.test",
    ),
];

const MISSING: &str = "?";

pub fn adult_label() -> LabelSpec {
    LabelSpec {
        column: "income".into(),
        favorable: ">50K".into(),
    }
}

pub fn adult_protected_sex() -> ProtectedAttribute {
    ProtectedAttribute {
        column: "sex".into(),
        privileged: "Male".into(),
    }
}

/// Load Adult from a directory with the train/test pair or from one file.
pub fn load_adult(path: impl AsRef<Path>) -> Result<RawTable> {
    let path = path.as_ref();
    let files: Vec<_> = if path.is_dir() {
        ADULT_URLS.iter().map(|(name, _)| path.join(name)).collect()
    } else {
        vec![path.to_path_buf()]
    };
    let mut rows: Vec<Vec<String>> = Vec::new();
    for file in &files {
        let text = fs::read_to_string(file).map_err(|source| DataError::Io {
            path: file.display().to_string(),
            source,
        })?;
        parse_into(&text, &mut rows)?;
    }
    if rows.is_empty() {
        return Err(DataError::NoRecords);
    }
    to_table(rows)
}

/// Parse Adult-formatted text (either file of the original pair, or the
/// cache CSV) into a table.
pub fn parse_adult(text: &str) -> Result<RawTable> {
    let mut rows = Vec::new();
    parse_into(text, &mut rows)?;
    if rows.is_empty() {
        return Err(DataError::NoRecords);
    }
    to_table(rows)
}

fn parse_into(text: &str, rows: &mut Vec<Vec<String>>) -> Result<()> {
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        // adult.test opens with a "|1x3 Cross validator" banner.
        if line.is_empty() || line.starts_with('|') {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != ADULT_COLUMNS.len() {
            return Err(DataError::ColumnCount {
                row: line_no + 1,
                expected: ADULT_COLUMNS.len(),
                found: fields.len(),
            });
        }
        if fields[0] == ADULT_COLUMNS[0].0 {
            continue; // header of the cache file
        }
        if fields.iter().any(|f| f == MISSING || f.is_empty()) {
            continue;
        }
        for (i, (name, continuous)) in ADULT_COLUMNS.iter().enumerate() {
            if *continuous && fields[i].parse::<f64>().is_err() {
                return Err(DataError::Malformed {
                    row: line_no + 1,
                    column: name.to_string(),
                    value: fields[i].clone(),
                });
            }
        }
        rows.push(fields);
    }
    Ok(())
}

fn to_table(rows: Vec<Vec<String>>) -> Result<RawTable> {
    let columns = ADULT_COLUMNS
        .iter()
        .enumerate()
        .map(|(i, (name, continuous))| {
            let data = if *continuous {
                ColumnData::Numeric(
                    rows.iter()
                        .map(|r| r[i].parse().expect("validated"))
                        .collect(),
                )
            } else if *name == "income" {
                // the test file writes ">50K." / "<=50K."
                ColumnData::Categorical(
                    rows.iter()
                        .map(|r| r[i].trim_end_matches('.').to_string())
                        .collect(),
                )
            } else {
                ColumnData::Categorical(rows.iter().map(|r| r[i].clone()).collect())
            };
            RawColumn {
                name: name.to_string(),
                data,
            }
        })
        .collect();
    RawTable::new(columns)
}

/// Fetch the original train/test pair into `dir`.
pub fn download_adult(dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| DataError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for (name, url) in ADULT_URLS {
        let body = ureq::get(url)
            .call()
            .and_then(|mut r| r.body_mut().with_config().limit(64 << 20).read_to_string())
            .map_err(|e| DataError::Download {
                url: url.to_string(),
                reason: e.to_string(),
            })?;
        let target = dir.join(name);
        fs::write(&target, body).map_err(|source| DataError::Io {
            path: target.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K";

    #[test]
    fn single_intact_row() {
        let t = parse_adult(ROW).unwrap();
        assert_eq!(t.len(), 1);
        match &t.column("age").unwrap().data {
            ColumnData::Numeric(v) => assert_eq!(v, &vec![39.0]),
            _ => panic!("age must be numeric"),
        }
    }

    #[test]
    fn empty_input_has_no_records() {
        assert!(matches!(parse_adult(""), Err(DataError::NoRecords)));
        assert!(matches!(
            parse_adult("|1x3 Cross validator\n\n"),
            Err(DataError::NoRecords)
        ));
    }

    #[test]
    fn missing_values_are_dropped_and_test_labels_normalized() {
        let text = format!(
            "{ROW}\n25, ?, 226802, 11th, 7, Never-married, Machine-op-inspct, Own-child, Black, Male, 0, 0, 40, United-States, <=50K.\n\
             52, Self-emp-inc, 287927, HS-grad, 9, Married-civ-spouse, Exec-managerial, Wife, White, Female, 15024, 0, 40, United-States, >50K.\n"
        );
        let t = parse_adult(&text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            t.categories("income").unwrap(),
            vec!["<=50K".to_string(), ">50K".to_string()]
        );
    }

    #[test]
    fn malformed_rows_report_their_index() {
        let bad = ROW.replace("77516", "seventy");
        let text = format!("{ROW}\n{bad}\n");
        match parse_adult(&text) {
            Err(DataError::Malformed { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "fnlwgt");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_adult("1, 2, 3"),
            Err(DataError::ColumnCount {
                row: 1,
                found: 3,
                ..
            })
        ));
    }
}
