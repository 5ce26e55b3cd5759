//! `box-v1` JSON: `{"format":"box-v1","p":[[...4 strings...] x4]}` with
//! `p[2a+b][2A+B]` written as lowest-terms `"num/den"`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BoxError, CorrelationBox};
use crate::scalar::{format_rational, parse_rational, Rational, RationalParseError};

pub const BOX_FORMAT: &str = "box-v1";

#[derive(Debug, Error)]
pub enum BoxFormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format tag {0:?}, expected \"box-v1\"")]
    Format(String),
    #[error("p must be 4 arrays of 4 entries")]
    Shape,
    #[error("entry p[{setting}][{outcome}]: {source}")]
    Entry { setting: usize, outcome: usize, source: RationalParseError },
    #[error(transparent)]
    Invalid(#[from] BoxError),
}

#[derive(Serialize, Deserialize)]
struct BoxDocument {
    format: String,
    p: Vec<Vec<String>>,
}

fn document(b: &CorrelationBox<Rational>) -> BoxDocument {
    BoxDocument {
        format: BOX_FORMAT.to_string(),
        p: b.columns().iter().map(|col| col.iter().map(format_rational).collect()).collect(),
    }
}

pub fn box_to_json(b: &CorrelationBox<Rational>) -> String {
    serde_json::to_string(&document(b)).expect("box documents always serialize")
}

/// Same document as [`box_to_json`], for embedding in larger reports.
pub fn box_to_value(b: &CorrelationBox<Rational>) -> serde_json::Value {
    serde_json::to_value(document(b)).expect("box documents always serialize")
}

pub fn box_from_json(text: &str) -> Result<CorrelationBox<Rational>, BoxFormatError> {
    from_document(serde_json::from_str(text)?)
}

pub fn box_from_value(v: &serde_json::Value) -> Result<CorrelationBox<Rational>, BoxFormatError> {
    from_document(BoxDocument::deserialize(v)?)
}

fn from_document(doc: BoxDocument) -> Result<CorrelationBox<Rational>, BoxFormatError> {
    if doc.format != BOX_FORMAT {
        return Err(BoxFormatError::Format(doc.format));
    }
    if doc.p.len() != 4 || doc.p.iter().any(|col| col.len() != 4) {
        return Err(BoxFormatError::Shape);
    }
    let mut cols: [[Rational; 4]; 4] = Default::default();
    for (s, col) in doc.p.iter().enumerate() {
        for (o, cell) in col.iter().enumerate() {
            cols[s][o] = parse_rational(cell)
                .map_err(|source| BoxFormatError::Entry { setting: s, outcome: o, source })?;
        }
    }
    Ok(CorrelationBox::from_columns(cols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{mix, DeterministicBox};
    use crate::scalar::Scalar;

    #[test]
    fn pr_box_document() {
        let d01 = DeterministicBox::by_name("d0_1").unwrap().to_box();
        let d31 = DeterministicBox::by_name("d3_1").unwrap().to_box();
        let pr = mix(&[(Rational::ratio(1, 2), &d01), (Rational::ratio(1, 2), &d31)]).unwrap();
        let text = box_to_json(&pr);
        assert_eq!(
            text,
            r#"{"format":"box-v1","p":[["1/2","0/1","0/1","1/2"],["1/2","0/1","0/1","1/2"],["0/1","1/2","1/2","0/1"],["1/2","0/1","0/1","1/2"]]}"#
        );
        assert_eq!(box_from_json(&text).unwrap(), pr);
    }

    #[test]
    fn rejects_non_normalized_and_bad_shapes() {
        let bad = r#"{"format":"box-v1","p":[["1/2","0","0","1/2"],["1","0","0","0"],["1","0","0","0"],["1","0","0","1/2"]]}"#;
        assert!(matches!(
            box_from_json(bad),
            Err(BoxFormatError::Invalid(BoxError::NotNormalized { a: 1, b: 1, .. }))
        ));
        let short = r#"{"format":"box-v1","p":[["1"]]}"#;
        assert!(matches!(box_from_json(short), Err(BoxFormatError::Shape)));
        let tag = r#"{"format":"box-v2","p":[]}"#;
        assert!(matches!(box_from_json(tag), Err(BoxFormatError::Format(_))));
        let cell = r#"{"format":"box-v1","p":[["x","0","0","0"],["1","0","0","0"],["1","0","0","0"],["1","0","0","0"]]}"#;
        assert!(matches!(box_from_json(cell), Err(BoxFormatError::Entry { setting: 0, outcome: 0, .. })));
    }
}
