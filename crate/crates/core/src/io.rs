//! Text formats: distance matrices (CSV and JSON), modulus and measure
//! documents, point clouds, plans and histories.
//!
//! Numbers are read from `"p/q"` strings, decimal strings or bare JSON
//! numbers; rationals are written back as `"p/q"` strings so that a round
//! trip is exact.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::katetov::ExtensionStep;
use crate::maps::Coords;
use crate::measure::{DiscreteMeasure, MeasureError, TransportPlan};
use crate::metric::{validate_metric, FiniteMetricSpace, MetricError, MetricSpace};
use crate::moduli::{ContinuityModulus, ModulusError};
use crate::scalar::{LiteralError, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("Csv: {0}")]
    Csv(String),
    #[error("Json: {0}")]
    Json(String),
    #[error("Literal in {context}: {source}")]
    Literal {
        context: String,
        #[source]
        source: LiteralError,
    },
    #[error("Shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl IoError {
    /// Structured name of the underlying error, e.g. `TriangleViolation`.
    pub fn name(&self) -> String {
        let text = match self {
            IoError::Metric(e) => e.to_string(),
            IoError::Modulus(e) => e.to_string(),
            IoError::Measure(e) => e.to_string(),
            IoError::Csv(_) => "Csv".into(),
            IoError::Json(_) => "Json".into(),
            IoError::Literal { .. } => "Literal".into(),
            IoError::Shape(_) => "Shape".into(),
        };
        text.split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("")
            .to_string()
    }
}

/// A number as written in a document: a string literal or a JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Number(serde_json::Number),
}

impl Literal {
    pub fn parse<S: Scalar>(&self, context: &str) -> Result<S, IoError> {
        let text = match self {
            Literal::Text(t) => t.clone(),
            Literal::Number(n) => n.to_string(),
        };
        S::from_literal(&text).map_err(|source| IoError::Literal {
            context: context.into(),
            source,
        })
    }

    pub fn of<S: Scalar>(value: &S) -> Literal {
        Literal::Text(value.to_literal())
    }
}

fn parse_all<S: Scalar>(values: &[Literal], context: &str) -> Result<Vec<S>, IoError> {
    values.iter().map(|v| v.parse(context)).collect()
}

/// `{"labels": [...], "dist": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<Literal>>,
}

impl MatrixDoc {
    pub fn from_space<S: Scalar>(space: &FiniteMetricSpace<S>) -> Self {
        MatrixDoc {
            labels: space.labels().to_vec(),
            dist: space
                .matrix()
                .iter()
                .map(|row| row.iter().map(Literal::of).collect())
                .collect(),
        }
    }

    /// Parses entries and validates the metric axioms.
    pub fn to_space<S: Scalar>(&self) -> Result<FiniteMetricSpace<S>, IoError> {
        let matrix = self
            .dist
            .iter()
            .enumerate()
            .map(|(i, row)| parse_all(row, &format!("dist row {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(validate_metric(self.labels.clone(), matrix)?)
    }
}

pub fn space_from_json<S: Scalar>(text: &str) -> Result<FiniteMetricSpace<S>, IoError> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    doc.to_space()
}

pub fn space_to_json<S: Scalar>(space: &FiniteMetricSpace<S>) -> String {
    to_pretty(&MatrixDoc::from_space(space))
}

/// Header row of labels, then one row of literals per point.
pub fn space_from_csv<S: Scalar>(text: &str) -> Result<FiniteMetricSpace<S>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| IoError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut matrix = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Csv(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| {
                S::from_literal(cell).map_err(|source| IoError::Literal {
                    context: format!("csv row {i}"),
                    source,
                })
            })
            .collect::<Result<Vec<S>, _>>()?;
        matrix.push(row);
    }
    Ok(validate_metric(labels, matrix)?)
}

pub fn space_to_csv<S: Scalar>(space: &FiniteMetricSpace<S>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(space.labels())
        .expect("in-memory write");
    for row in space.matrix() {
        writer
            .write_record(row.iter().map(Scalar::to_literal))
            .expect("in-memory write");
    }
    into_string(writer)
}

fn into_string(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// `{"breakpoints": [[t, φ(t)], ...], "tail_slope": s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusDoc {
    pub breakpoints: Vec<[Literal; 2]>,
    pub tail_slope: Literal,
}

impl ModulusDoc {
    pub fn to_modulus<S: Scalar>(&self) -> Result<ContinuityModulus<S>, IoError> {
        let breakpoints = self
            .breakpoints
            .iter()
            .map(|[t, v]| Ok((t.parse("breakpoint")?, v.parse("breakpoint")?)))
            .collect::<Result<Vec<(S, S)>, IoError>>()?;
        Ok(ContinuityModulus::new(
            breakpoints,
            self.tail_slope.parse("tail_slope")?,
        )?)
    }

    pub fn from_modulus<S: Scalar>(phi: &ContinuityModulus<S>) -> Self {
        ModulusDoc {
            breakpoints: phi
                .breakpoints()
                .iter()
                .map(|(t, v)| [Literal::of(t), Literal::of(v)])
                .collect(),
            tail_slope: Literal::of(phi.tail_slope()),
        }
    }
}

/// A point reference: a label of a table space or a coordinate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Label(String),
    Coords(Vec<Literal>),
}

impl PointRef {
    pub fn to_index<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<usize, IoError> {
        match self {
            PointRef::Label(l) => space
                .index_of(l)
                .ok_or_else(|| MetricError::UnknownLabel(l.clone()).into()),
            PointRef::Coords(_) => Err(IoError::Shape(
                "table spaces take labels, not coordinates".into(),
            )),
        }
    }

    pub fn to_coords<S: Scalar>(&self, dim: usize) -> Result<Coords<S>, IoError> {
        match self {
            PointRef::Coords(values) if values.len() == dim => {
                Ok(parse_all::<S>(values, "coordinates")?.into_iter().collect())
            }
            PointRef::Coords(values) => Err(IoError::Shape(format!(
                "point has {} coordinates, space has dimension {dim}",
                values.len()
            ))),
            PointRef::Label(l) => Err(IoError::Shape(format!(
                "`{l}` is a label, expected coordinates"
            ))),
        }
    }
}

/// `{"support": [...], "weights": ["1/3", "2/3"]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub support: Vec<PointRef>,
    pub weights: Vec<Literal>,
}

impl MeasureDoc {
    pub fn on_table<S: Scalar>(
        &self,
        space: &FiniteMetricSpace<S>,
    ) -> Result<DiscreteMeasure<usize, S>, IoError> {
        let support = self
            .support
            .iter()
            .map(|p| p.to_index(space))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DiscreteMeasure::new(
            space,
            support,
            parse_all(&self.weights, "weights")?,
        )?)
    }

    pub fn from_table<S: Scalar>(
        space: &FiniteMetricSpace<S>,
        mu: &DiscreteMeasure<usize, S>,
    ) -> Self {
        MeasureDoc {
            support: mu
                .support()
                .iter()
                .map(|&p| PointRef::Label(space.label(p).into()))
                .collect(),
            weights: mu.weights().iter().map(Literal::of).collect(),
        }
    }
}

/// Dense matrix of literal strings.
pub fn plan_to_json<S: Scalar>(plan: &TransportPlan<S>) -> Value {
    Value::Array(
        plan.matrix()
            .iter()
            .map(|row| Value::Array(row.iter().map(|m| Value::String(m.to_literal())).collect()))
            .collect(),
    )
}

/// Step distances as decimal JSON numbers.
pub fn history_to_json<S: Scalar>(history: &[S]) -> Value {
    Value::Array(history.iter().map(|d| json!(d.to_f64_lossy())).collect())
}

/// One point per row: coordinates as literals.
pub fn coords_to_csv<S: Scalar>(points: &[Coords<S>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let dim = points.first().map_or(0, |p| p.len());
    let header: Vec<String> = ["x", "y", "z"]
        .iter()
        .take(dim)
        .map(|s| s.to_string())
        .collect();
    writer.write_record(&header).expect("in-memory write");
    for p in points {
        writer
            .write_record(p.iter().map(Scalar::to_literal))
            .expect("in-memory write");
    }
    into_string(writer)
}

/// One point per row: the point's label.
pub fn labels_to_csv<M: MetricSpace>(space: &M, points: &[M::Point]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["label"]).expect("in-memory write");
    for p in points {
        writer
            .write_record([space.describe(p)])
            .expect("in-memory write");
    }
    into_string(writer)
}

pub fn transcript_to_json<S: Scalar>(steps: &[ExtensionStep<S>]) -> Value {
    Value::Array(
        steps
            .iter()
            .map(|s| {
                json!({
                    "map": s.map,
                    "point": s.point,
                    "image": s.image,
                    "reused": s.reused,
                    "katetov": s.katetov.iter().map(Scalar::to_literal).collect::<Vec<_>>(),
                    "ambient_size": s.ambient_size,
                })
            })
            .collect(),
    )
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
