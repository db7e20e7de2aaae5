//! Performance-matrix ingestion: parsing, validation, and orientation.
//!
//! The single input artifact is an N-datasets x k-methods matrix of metric
//! values. Downstream code consumes only the canonical higher-is-better
//! form produced by [`orient`].

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether larger metric values are better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "higher")]
    HigherBetter,
    #[serde(rename = "lower")]
    LowerBetter,
}

/// Input format accepted by [`parse_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

/// Validated N x k matrix of metric values with naming metadata.
///
/// Invariants, enforced at construction: k >= 2, N >= 1, all values finite,
/// no duplicate method or dataset names, rectangular shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    method_names: Vec<String>,
    dataset_names: Vec<String>,
    values: Vec<Vec<f64>>,
    direction: Direction,
}

impl PerformanceMatrix {
    pub fn new(
        method_names: Vec<String>,
        dataset_names: Vec<String>,
        values: Vec<Vec<f64>>,
        direction: Direction,
    ) -> Result<Self> {
        let k = method_names.len();
        let n = dataset_names.len();
        if k < 2 {
            return Err(Error::TooFewMethods(k));
        }
        if n == 0 || values.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if values.len() != n {
            return Err(Error::MalformedInput(format!(
                "{} dataset names but {} value rows",
                n,
                values.len()
            )));
        }
        check_unique(&method_names, "method")?;
        check_unique(&dataset_names, "dataset")?;
        for (i, row) in values.iter().enumerate() {
            if row.len() != k {
                return Err(Error::MalformedInput(format!(
                    "row `{}` has {} values, expected {}",
                    dataset_names[i],
                    row.len(),
                    k
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue {
                        dataset: dataset_names[i].clone(),
                        method: method_names[j].clone(),
                    });
                }
            }
        }
        Ok(PerformanceMatrix {
            method_names,
            dataset_names,
            values,
            direction,
        })
    }

    pub fn n_methods(&self) -> usize {
        self.method_names.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.dataset_names.len()
    }

    pub fn method_names(&self) -> &[String] {
        &self.method_names
    }

    pub fn dataset_names(&self) -> &[String] {
        &self.dataset_names
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Same matrix with the direction metadata replaced (CSV input carries
    /// no direction of its own).
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::MalformedInput(format!(
                "duplicate {what} name `{n}`"
            )));
        }
    }
    Ok(())
}

/// JSON wire form: {"methods", "datasets", "values", "direction"}.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    methods: Vec<String>,
    datasets: Vec<String>,
    values: Vec<Vec<f64>>,
    direction: Direction,
}

/// Parse a matrix from a byte stream in the declared format.
///
/// CSV: mandatory header `dataset,<m1>,...,<mk>`, one row per dataset,
/// decimal point `.`, no locale handling. Direction defaults to
/// higher-is-better; use [`PerformanceMatrix::with_direction`] to override.
pub fn parse_matrix<R: Read>(mut source: R, format: MatrixFormat) -> Result<PerformanceMatrix> {
    match format {
        MatrixFormat::Csv => parse_csv(source),
        MatrixFormat::Json => {
            let mut buf = String::new();
            source.read_to_string(&mut buf)?;
            let wire: MatrixJson = serde_json::from_str(&buf)
                .map_err(|e| Error::MalformedInput(format!("invalid json: {e}")))?;
            PerformanceMatrix::new(wire.methods, wire.datasets, wire.values, wire.direction)
        }
    }
}

fn parse_csv<R: Read>(source: R) -> Result<PerformanceMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(Error::MalformedInput("empty csv".into())),
    };
    let mut fields = header.iter();
    match fields.next() {
        Some("dataset") => {}
        other => {
            return Err(Error::MalformedInput(format!(
                "first header field must be `dataset`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let method_names: Vec<String> = fields.map(str::to_owned).collect();

    let mut dataset_names = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let mut it = record.iter();
        let name = it.next().unwrap_or("").to_owned();
        let row: Vec<f64> = it
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| {
                    Error::MalformedInput(format!("non-numeric cell `{cell}` in row `{name}`"))
                })
            })
            .collect::<Result<_>>()?;
        dataset_names.push(name);
        values.push(row);
    }
    PerformanceMatrix::new(
        method_names,
        dataset_names,
        values,
        Direction::HigherBetter,
    )
}

fn csv_err(e: csv::Error) -> Error {
    Error::MalformedInput(format!("csv: {e}"))
}

/// Canonicalize to higher-is-better; negates every value of a
/// lower-is-better matrix and is the identity otherwise.
///
/// Negation is exact in floating point and MARS weights are invariant under
/// positive affine maps, so no information is lost.
pub fn orient(matrix: &PerformanceMatrix) -> PerformanceMatrix {
    match matrix.direction {
        Direction::HigherBetter => matrix.clone(),
        Direction::LowerBetter => PerformanceMatrix {
            method_names: matrix.method_names.clone(),
            dataset_names: matrix.dataset_names.clone(),
            values: matrix
                .values
                .iter()
                .map(|row| row.iter().map(|v| -v).collect())
                .collect(),
            direction: Direction::HigherBetter,
        },
    }
}

/// Write the matrix in the CSV interchange form (`dataset` header column).
pub fn write_csv<W: Write>(matrix: &PerformanceMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["dataset".to_owned()];
    header.extend(matrix.method_names.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (name, row) in matrix.dataset_names.iter().zip(&matrix.values) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Serialize to the JSON wire form.
pub fn to_json_string(matrix: &PerformanceMatrix) -> String {
    let wire = MatrixJson {
        methods: matrix.method_names.clone(),
        datasets: matrix.dataset_names.clone(),
        values: matrix.values.clone(),
        direction: matrix.direction,
    };
    serde_json::to_string_pretty(&wire).expect("matrix serialization cannot fail")
}
