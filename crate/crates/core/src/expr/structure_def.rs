//! Structure definition documents.
//!
//! A document supplies the metric `g`, the (1,1)-tensor `f` and the vector
//! field `ξ` as expression matrices over a chart. The 1-form `η` and the
//! tensor `Q` are derived downstream; an explicit `Q` is kept only as a
//! cross-check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{parse, Expr, ParseError};
use crate::jet::Point;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("malformed structure document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("metric is not symmetric: entry ({row},{col}) does not mirror ({col},{row})")]
    AsymmetricMetric { row: usize, col: usize },
    #[error("in {field}: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
}

/// Per-coordinate closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self, StructureError> {
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(StructureError::Schema(format!(
                    "domain interval {i} is empty or not finite: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self {
            bounds: vec![(-half_width, half_width); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn center(&self) -> Point {
        Point::new(self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && self
                .bounds
                .iter()
                .zip(p.coords())
                .all(|((lo, hi), x)| lo <= x && x <= hi)
    }
}

/// The serialized form, field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub name: String,
    pub n: usize,
    pub coords: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    pub metric: Vec<Vec<String>>,
    pub f: Vec<Vec<String>>,
    pub xi: Vec<String>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureDef {
    pub name: String,
    pub n: usize,
    pub coords: Vec<String>,
    pub domain: Domain,
    /// Full symmetric matrix `g_ij`.
    pub metric: Vec<Vec<Expr>>,
    /// `f[i][j]` is the component `f^i_j`.
    pub f: Vec<Vec<Expr>>,
    pub xi: Vec<Expr>,
    pub q: Option<Vec<Vec<Expr>>>,
}

/// Parse a structure definition from JSON bytes.
pub fn load_structure_def(source: &[u8]) -> Result<StructureDef, StructureError> {
    let doc: StructureDoc = serde_json::from_slice(source)?;
    StructureDef::from_doc(&doc)
}

fn check_square(what: &str, m: &[Vec<String>], d: usize) -> Result<(), StructureError> {
    if m.len() != d {
        return Err(StructureError::DimensionMismatch {
            what: what.into(),
            expected: d,
            got: m.len(),
        });
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != d {
            return Err(StructureError::DimensionMismatch {
                what: format!("{what} row {i}"),
                expected: d,
                got: row.len(),
            });
        }
    }
    Ok(())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl StructureDef {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn from_doc(doc: &StructureDoc) -> Result<Self, StructureError> {
        if doc.n == 0 {
            return Err(StructureError::Schema("n must be positive".into()));
        }
        let d = 2 * doc.n + 1;
        if doc.coords.len() != d {
            return Err(StructureError::DimensionMismatch {
                what: "coords".into(),
                expected: d,
                got: doc.coords.len(),
            });
        }
        for (i, c) in doc.coords.iter().enumerate() {
            if !is_identifier(c) || super::Func::from_name(c).is_some() {
                return Err(StructureError::Schema(format!(
                    "invalid coordinate name {c:?}"
                )));
            }
            if doc.coords[..i].contains(c) {
                return Err(StructureError::Schema(format!(
                    "duplicate coordinate name {c:?}"
                )));
            }
        }
        if doc.domain.len() != d {
            return Err(StructureError::DimensionMismatch {
                what: "domain".into(),
                expected: d,
                got: doc.domain.len(),
            });
        }
        let domain = Domain::new(doc.domain.iter().map(|[lo, hi]| (*lo, *hi)).collect())?;
        check_square("metric", &doc.metric, d)?;
        check_square("f", &doc.f, d)?;
        if doc.xi.len() != d {
            return Err(StructureError::DimensionMismatch {
                what: "xi".into(),
                expected: d,
                got: doc.xi.len(),
            });
        }
        if let Some(q) = &doc.q {
            check_square("Q", q, d)?;
        }

        let coords = &doc.coords;
        let field = |name: &str, text: &str| {
            parse(text, coords).map_err(|source| StructureError::Parse {
                field: name.to_string(),
                source,
            })
        };

        let mut metric = vec![vec![Expr::zero(); d]; d];
        for i in 0..d {
            for j in i..d {
                let upper = doc.metric[i][j].trim();
                let lower = doc.metric[j][i].trim();
                if j > i && !lower.is_empty() && lower != upper {
                    return Err(StructureError::AsymmetricMetric { row: j, col: i });
                }
                let e = field(&format!("metric[{i}][{j}]"), upper)?;
                metric[j][i] = e.clone();
                metric[i][j] = e;
            }
        }
        let parse_matrix = |name: &str, m: &[Vec<String>]| -> Result<Vec<Vec<Expr>>, StructureError> {
            m.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, s)| field(&format!("{name}[{i}][{j}]"), s))
                        .collect()
                })
                .collect()
        };
        let f = parse_matrix("f", &doc.f)?;
        let q = doc.q.as_ref().map(|q| parse_matrix("Q", q)).transpose()?;
        let xi = doc
            .xi
            .iter()
            .enumerate()
            .map(|(i, s)| field(&format!("xi[{i}]"), s))
            .collect::<Result<_, _>>()?;

        Ok(Self {
            name: doc.name.clone(),
            n: doc.n,
            coords: doc.coords.clone(),
            domain,
            metric,
            f,
            xi,
            q,
        })
    }

    pub fn to_doc(&self) -> StructureDoc {
        let src = |e: &Expr| e.to_source(&self.coords);
        let matrix = |m: &[Vec<Expr>]| -> Vec<Vec<String>> {
            m.iter().map(|row| row.iter().map(src).collect()).collect()
        };
        StructureDoc {
            name: self.name.clone(),
            n: self.n,
            coords: self.coords.clone(),
            domain: self.domain.bounds().iter().map(|(lo, hi)| [*lo, *hi]).collect(),
            metric: matrix(&self.metric),
            f: matrix(&self.f),
            xi: self.xi.iter().map(src).collect(),
            q: self.q.as_deref().map(matrix),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("structure documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_json(metric: &str) -> String {
        format!(
            r#"{{
  "name": "flat",
  "n": 1,
  "coords": ["x", "y", "z"],
  "domain": [[-1, 1], [-1, 1], [-1, 1]],
  "metric": {metric},
  "f": [["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]],
  "xi": ["0", "0", "1"]
}}"#
        )
    }

    #[test]
    fn loads_and_mirrors_metric() {
        let json = doc_json(r#"[["1", "y", "0"], ["", "1", "0"], ["0", "0", "1"]]"#);
        let def = load_structure_def(json.as_bytes()).unwrap();
        assert_eq!(def.metric[1][0], def.metric[0][1]);
        assert_eq!(def.metric[1][0], Expr::Coord(1));
        assert!(def.q.is_none());
    }

    #[test]
    fn rejects_wrong_metric_size() {
        let json = doc_json(r#"[["1", "0"], ["0", "1"]]"#);
        let err = load_structure_def(json.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            StructureError::DimensionMismatch { expected: 3, got: 2, .. }
        ));
    }

    #[test]
    fn rejects_asymmetric_metric() {
        let json = doc_json(r#"[["1", "y", "0"], ["x", "1", "0"], ["0", "0", "1"]]"#);
        let err = load_structure_def(json.as_bytes()).unwrap_err();
        assert!(matches!(err, StructureError::AsymmetricMetric { row: 1, col: 0 }));
    }

    #[test]
    fn reports_parse_errors_with_field() {
        let json = doc_json(r#"[["1", "q", "0"], ["", "1", "0"], ["0", "0", "1"]]"#);
        let err = load_structure_def(json.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("metric[0][1]"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields_and_bad_domain() {
        let json = doc_json(r#"[["1", "0", "0"], ["", "1", "0"], ["0", "0", "1"]]"#)
            .replace("\"n\": 1", "\"n\": 1, \"extra\": 3");
        assert!(matches!(
            load_structure_def(json.as_bytes()),
            Err(StructureError::Json(_))
        ));
        let json = doc_json(r#"[["1", "0", "0"], ["", "1", "0"], ["0", "0", "1"]]"#)
            .replace("[[-1, 1], [-1, 1]", "[[1, -1], [-1, 1]");
        assert!(matches!(
            load_structure_def(json.as_bytes()),
            Err(StructureError::Schema(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let json = doc_json(r#"[["1 + y^2", "-y", "0"], ["", "2", "0"], ["0", "0", "exp(x)"]]"#);
        let def = load_structure_def(json.as_bytes()).unwrap();
        let again = load_structure_def(def.to_json().as_bytes()).unwrap();
        assert_eq!(def, again);
    }
}
