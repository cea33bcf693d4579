use std::path::Path;

use csv::{ReaderBuilder, Trim};

use super::{Dataset, RawCase};
use crate::{Error, Result};

/// Tokens treated as a missing value. Incomplete records are rejected.
const MISSING_TOKENS: &[&str] = &["", "?", "NA", "N/A", "na", "nan", "NaN"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name; requires a header row.
    Name(String),
    /// Zero-based column index.
    Index(usize),
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Integers select by index, `last` the final column, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub label: LabelColumn,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label: LabelColumn::Last,
            delimiter: b',',
            has_header: true,
        }
    }
}

/// Loads a headed, comma-delimited file.
pub fn load_csv(path: impl AsRef<Path>, label: LabelColumn) -> Result<Dataset> {
    load_csv_with(
        path,
        &CsvOptions {
            label,
            ..CsvOptions::default()
        },
    )
}

/// Loads a CSV file into a [`Dataset`]. Cases keep file order and get
/// `case_id` equal to their row index; labels are interned to class indices
/// in order of first appearance.
pub fn load_csv_with(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .trim(Trim::All)
        .from_reader(file);

    let headers: Option<Vec<String>> = if options.has_header {
        let h = reader.headers().map_err(|e| csv_error(e, 1))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    let width = match (&headers, rows.first()) {
        (Some(h), _) => h.len(),
        (None, Some((_, r))) => r.len(),
        (None, None) => return Err(Error::Empty("CSV file has no rows")),
    };

    let label_idx = match &options.label {
        LabelColumn::Last => width.checked_sub(1),
        LabelColumn::Index(i) => (*i < width).then_some(*i),
        LabelColumn::Name(name) => headers
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name)),
    }
    .ok_or_else(|| Error::MissingLabel(format!("{:?}", options.label)))?;
    if width < 2 {
        return Err(Error::Empty("CSV needs at least one attribute column"));
    }

    let attribute_names: Vec<String> = (0..width)
        .filter(|&c| c != label_idx)
        .map(|c| {
            headers
                .as_ref()
                .map_or_else(|| format!("x{}", c + 1), |h| h[c].clone())
        })
        .collect();

    let mut class_names: Vec<String> = Vec::new();
    let mut cases = Vec::with_capacity(rows.len());
    for (row_idx, (line, record)) in rows.iter().enumerate() {
        let mut attributes = Vec::with_capacity(width - 1);
        let mut label = None;
        for (c, field) in record.iter().enumerate() {
            if MISSING_TOKENS.contains(&field) {
                return Err(Error::MissingValue {
                    line: *line,
                    column: c,
                });
            }
            if c == label_idx {
                let idx = match class_names.iter().position(|n| n == field) {
                    Some(i) => i,
                    None => {
                        class_names.push(field.to_string());
                        class_names.len() - 1
                    }
                };
                label = Some(idx);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::NonNumeric {
                    line: *line,
                    column: c,
                    value: field.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        line: *line,
                        column: c,
                        value: field.to_string(),
                    });
                }
                attributes.push(v);
            }
        }
        cases.push(RawCase {
            case_id: row_idx,
            attributes,
            label: label.ok_or_else(|| Error::MissingLabel(format!("line {line}")))?,
        });
    }
    if cases.is_empty() {
        return Err(Error::Empty("CSV file has no data rows"));
    }

    let name = path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::new(name, attribute_names, class_names, cases)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> Error {
    let line = err
        .position()
        .map_or(fallback_line, |p| p.line());
    match err.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::MalformedRow {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        _ => Error::MalformedRow {
            line,
            message: err.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_rows_with_header() {
        let f = write_tmp("a,b,label\n1,2,x\n3.5,-4,y\n0,0,x\n");
        let ds = load_csv(f.path(), LabelColumn::Name("label".into())).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.n_attributes(), 2);
        assert_eq!(ds.class_names, vec!["x", "y"]);
        assert_eq!(ds.cases()[1].attributes, vec![3.5, -4.0]);
        assert_eq!(ds.cases()[2].label, 0);
    }

    #[test]
    fn label_by_index_in_the_middle() {
        let f = write_tmp("1;b;2\n3;a;4\n");
        let opts = CsvOptions {
            label: LabelColumn::Index(1),
            delimiter: b';',
            has_header: false,
        };
        let ds = load_csv_with(f.path(), &opts).unwrap();
        assert_eq!(ds.attribute_names, vec!["x1", "x3"]);
        assert_eq!(ds.cases()[1].attributes, vec![3.0, 4.0]);
        assert_eq!(ds.class_names, vec!["b", "a"]);
    }

    #[test]
    fn non_numeric_reports_line() {
        let f = write_tmp("a,b,label\n1,2,x\n3,x,y\n");
        match load_csv(f.path(), LabelColumn::Last) {
            Err(Error::NonNumeric { line, column, value }) => {
                assert_eq!((line, column, value.as_str()), (3, 1, "x"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_malformed() {
        let f = write_tmp("a,b,label\n1,2,x\n3,y\n");
        assert!(matches!(
            load_csv(f.path(), LabelColumn::Last),
            Err(Error::MalformedRow { line: 3, .. })
        ));
    }

    #[test]
    fn missing_token_and_missing_label() {
        let f = write_tmp("a,b,label\n1,?,x\n3,4,y\n");
        assert!(matches!(
            load_csv(f.path(), LabelColumn::Last),
            Err(Error::MissingValue { line: 2, column: 1 })
        ));
        let f = write_tmp("a,b,label\n1,2,x\n3,4,y\n");
        assert!(matches!(
            load_csv(f.path(), LabelColumn::Name("cls".into())),
            Err(Error::MissingLabel(_))
        ));
    }

    #[test]
    fn label_column_parsing() {
        assert_eq!("3".parse::<LabelColumn>().unwrap(), LabelColumn::Index(3));
        assert_eq!("last".parse::<LabelColumn>().unwrap(), LabelColumn::Last);
        assert_eq!(
            "class".parse::<LabelColumn>().unwrap(),
            LabelColumn::Name("class".into())
        );
    }
}
