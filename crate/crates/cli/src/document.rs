//! JSON tuple documents.
//!
//! A document fixes the backend up front (`"float64"` or
//! `"gaussian-rational"`) and lists the r matrices as 2×2 entry arrays.
//! Float entries are compact `[re, im]` pairs; rational entries are
//! `{"re": "p/q", "im": "p/q"}` objects so the strings stay labeled.
//! Serialization always reduces fractions, so parse ∘ serialize is the
//! identity on anything this module emits.

use mat2gen::{AnyTuple, ExactScalar, FloatScalar, Mat2, MatTuple};
use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarKind {
    #[serde(rename = "float64")]
    Float64,
    #[serde(rename = "gaussian-rational")]
    GaussianRational,
}

/// One matrix entry in either backend's wire form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Float([f64; 2]),
    Exact { re: String, im: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    pub scalar: ScalarKind,
    pub r: usize,
    pub matrices: Vec<[[Entry; 2]; 2]>,
}

impl TupleDocument {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        let doc: TupleDocument = serde_json::from_str(text)
            .map_err(|e| Failure::Input(format!("tuple document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization is infallible")
    }

    /// Single-line form for newline-delimited streams.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("document serialization is infallible")
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.matrices.len() != self.r {
            return Err(Failure::Input(format!(
                "document declares r = {} but lists {} matrices",
                self.r,
                self.matrices.len()
            )));
        }
        for (k, m) in self.matrices.iter().enumerate() {
            for row in m {
                for entry in row {
                    match (self.scalar, entry) {
                        (ScalarKind::Float64, Entry::Float(p)) => {
                            if !p[0].is_finite() || !p[1].is_finite() {
                                return Err(Failure::Input(format!(
                                    "matrix {k}: non-finite float entry"
                                )));
                            }
                        }
                        (ScalarKind::GaussianRational, Entry::Exact { re, im }) => {
                            parse_rational(re)?;
                            parse_rational(im)?;
                        }
                        (ScalarKind::Float64, Entry::Exact { .. }) => {
                            return Err(Failure::Input(format!(
                                "matrix {k}: rational entry in a float64 document"
                            )));
                        }
                        (ScalarKind::GaussianRational, Entry::Float(_)) => {
                            return Err(Failure::Input(format!(
                                "matrix {k}: bare number pair in a gaussian-rational document \
                                 (entries must be {{\"re\": \"p/q\", \"im\": \"p/q\"}})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_tuple(&self) -> Result<AnyTuple, Failure> {
        match self.scalar {
            ScalarKind::Float64 => {
                let mats = self
                    .matrices
                    .iter()
                    .map(|m| {
                        Mat2::new(
                            float_entry(&m[0][0]),
                            float_entry(&m[0][1]),
                            float_entry(&m[1][0]),
                            float_entry(&m[1][1]),
                        )
                    })
                    .collect();
                let t = MatTuple::new(mats)
                    .map_err(|e| Failure::Input(format!("tuple document: {e}")))?;
                Ok(AnyTuple::Float(t))
            }
            ScalarKind::GaussianRational => {
                let mut mats = Vec::with_capacity(self.matrices.len());
                for m in &self.matrices {
                    mats.push(Mat2::new(
                        exact_entry(&m[0][0])?,
                        exact_entry(&m[0][1])?,
                        exact_entry(&m[1][0])?,
                        exact_entry(&m[1][1])?,
                    ));
                }
                let t = MatTuple::new(mats)
                    .map_err(|e| Failure::Input(format!("tuple document: {e}")))?;
                Ok(AnyTuple::Exact(t))
            }
        }
    }

    pub fn from_float(t: &MatTuple<FloatScalar>) -> Self {
        let matrices = t
            .iter()
            .map(|m| {
                [
                    [float_repr(&m.a), float_repr(&m.b)],
                    [float_repr(&m.c), float_repr(&m.d)],
                ]
            })
            .collect();
        TupleDocument { scalar: ScalarKind::Float64, r: t.r(), matrices }
    }

    pub fn from_exact(t: &MatTuple<ExactScalar>) -> Self {
        let matrices = t
            .iter()
            .map(|m| {
                [
                    [exact_repr(&m.a), exact_repr(&m.b)],
                    [exact_repr(&m.c), exact_repr(&m.d)],
                ]
            })
            .collect();
        TupleDocument { scalar: ScalarKind::GaussianRational, r: t.r(), matrices }
    }

    pub fn from_tuple(t: &AnyTuple) -> Self {
        match t {
            AnyTuple::Float(t) => Self::from_float(t),
            AnyTuple::Exact(t) => Self::from_exact(t),
        }
    }
}

fn float_entry(e: &Entry) -> FloatScalar {
    match e {
        Entry::Float([re, im]) => FloatScalar::new(*re, *im),
        Entry::Exact { .. } => unreachable!("rejected by validate"),
    }
}

fn exact_entry(e: &Entry) -> Result<ExactScalar, Failure> {
    match e {
        Entry::Exact { re, im } => Ok(ExactScalar::new(parse_rational(re)?, parse_rational(im)?)),
        Entry::Float(_) => unreachable!("rejected by validate"),
    }
}

pub(crate) fn float_repr(s: &FloatScalar) -> Entry {
    Entry::Float([s.re, s.im])
}

pub(crate) fn exact_repr(s: &ExactScalar) -> Entry {
    Entry::Exact { re: s.re.to_string(), im: s.im.to_string() }
}

pub fn parse_rational(text: &str) -> Result<BigRational, Failure> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|e| Failure::Input(format!("rational {text:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mat2gen::Scalar;

    #[test]
    fn parse_serialize_round_trips() {
        let text = r#"{
            "scalar": "float64",
            "r": 2,
            "matrices": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
                [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
            ]
        }"#;
        let doc = TupleDocument::from_json(text).unwrap();
        let again = TupleDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(doc, again);

        let exact = r#"{
            "scalar": "gaussian-rational",
            "r": 1,
            "matrices": [
                [[{"re": "1/2", "im": "0"}, {"re": "-3", "im": "2/7"}],
                 [{"re": "0", "im": "0"}, {"re": "5/3", "im": "-1/2"}]]
            ]
        }"#;
        let doc = TupleDocument::from_json(exact).unwrap();
        let again = TupleDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn canonicalization_reduces_fractions() {
        let text = r#"{
            "scalar": "gaussian-rational",
            "r": 1,
            "matrices": [
                [[{"re": "2/4", "im": "0/9"}, {"re": "6/3", "im": "0"}],
                 [{"re": "0", "im": "0"}, {"re": "-10/4", "im": "0"}]]
            ]
        }"#;
        let doc = TupleDocument::from_json(text).unwrap();
        let AnyTuple::Exact(t) = doc.to_tuple().unwrap() else {
            panic!("exact document")
        };
        let canonical = TupleDocument::from_exact(&t);
        let m = &canonical.matrices[0];
        assert_eq!(m[0][0], Entry::Exact { re: "1/2".into(), im: "0".into() });
        assert_eq!(m[0][1], Entry::Exact { re: "2".into(), im: "0".into() });
        assert_eq!(m[1][1], Entry::Exact { re: "-5/2".into(), im: "0".into() });
        // And the canonical form is a fixed point.
        let reparsed = TupleDocument::from_json(&canonical.to_json()).unwrap();
        assert_eq!(reparsed, canonical);
    }

    #[test]
    fn mismatched_backend_and_shape_are_rejected() {
        let wrong_count = r#"{"scalar": "float64", "r": 2, "matrices": []}"#;
        assert!(matches!(
            TupleDocument::from_json(wrong_count),
            Err(Failure::Input(_))
        ));

        let wrong_backend = r#"{
            "scalar": "float64",
            "r": 1,
            "matrices": [
                [[{"re": "1", "im": "0"}, {"re": "0", "im": "0"}],
                 [{"re": "0", "im": "0"}, {"re": "1", "im": "0"}]]
            ]
        }"#;
        assert!(matches!(
            TupleDocument::from_json(wrong_backend),
            Err(Failure::Input(_))
        ));
    }

    #[test]
    fn exact_tuples_survive_the_wire_format() {
        let m = Mat2::new(
            ExactScalar::from_int(1, 2),
            ExactScalar::new(parse_rational("3/7").unwrap(), parse_rational("-1/3").unwrap()),
            ExactScalar::from_int(0, 0),
            ExactScalar::from_int(-4, 1),
        );
        let t = MatTuple::new(vec![m]).unwrap();
        let doc = TupleDocument::from_exact(&t);
        let AnyTuple::Exact(back) = TupleDocument::from_json(&doc.to_json())
            .unwrap()
            .to_tuple()
            .unwrap()
        else {
            panic!("exact document")
        };
        assert_eq!(back.get(0).a, t.get(0).a);
        assert_eq!(back.get(0).b, t.get(0).b);
        assert_eq!(back.get(0).c, t.get(0).c);
        assert_eq!(back.get(0).d, t.get(0).d);
    }
}
