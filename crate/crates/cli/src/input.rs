//! The JSON input document: `{"matrices": [...], "weights": [...]?, "metadata": {...}?}`.

use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use spd_means::{Error, SpdMatrix, SymMatrix, Weight};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Map<String, Value>>,
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct Input {
    pub points: Vec<SpdMatrix>,
    /// Uniform when the document has no weights.
    pub weight: Weight,
    pub metadata: Option<Map<String, Value>>,
}

impl Input {
    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

fn matrix_error(index: usize, err: Error) -> String {
    match err {
        Error::NotPositiveDefinite { min_eigenvalue } => {
            format!("matrix {index}: not positive definite, eigenvalue {min_eigenvalue} <= 0")
        }
        other => format!("matrix {index}: {other}"),
    }
}

/// Validates a parsed document: square, symmetric to `1e-12` relative,
/// positive definite, one common dimension, and a valid weight if present.
pub fn validate(doc: InputDocument) -> Result<Input, String> {
    if doc.matrices.is_empty() {
        return Err("the document contains no matrices".into());
    }
    let mut points = Vec::with_capacity(doc.matrices.len());
    for (index, rows) in doc.matrices.iter().enumerate() {
        let sym = SymMatrix::from_rows(rows).map_err(|e| matrix_error(index, e))?;
        let spd = SpdMatrix::new(sym).map_err(|e| matrix_error(index, e))?;
        if let Some(first) = points.first().map(SpdMatrix::dim) {
            if spd.dim() != first {
                return Err(format!(
                    "matrix {index}: dimension {} differs from {first}",
                    spd.dim()
                ));
            }
        }
        points.push(spd);
    }
    let weight = match doc.weights {
        None => Weight::uniform(points.len()),
        Some(w) => {
            if w.len() != points.len() {
                return Err(format!(
                    "{} weights given for {} matrices",
                    w.len(),
                    points.len()
                ));
            }
            Weight::new(w).map_err(|e| e.to_string())?
        }
    };
    Ok(Input {
        points,
        weight,
        metadata: doc.metadata,
    })
}

pub fn parse_input(mut reader: impl Read) -> Result<Input, String> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| format!("cannot read input: {e}"))?;
    let doc: InputDocument =
        serde_json::from_str(&text).map_err(|e| format!("malformed input: {e}"))?;
    validate(doc)
}

pub fn document_from_points(
    points: &[SpdMatrix],
    metadata: Option<Map<String, Value>>,
) -> InputDocument {
    InputDocument {
        matrices: points.iter().map(SpdMatrix::to_rows).collect(),
        weights: None,
        metadata,
    }
}
