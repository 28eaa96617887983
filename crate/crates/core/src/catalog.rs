//! Built-in structure definitions.
//!
//! - `sasakian-r(2n+1)`: the standard Sasakian structure on ℝ^{2n+1} with
//!   `η = ½(dz − Σ yⁱ dxⁱ)`, `ξ = 2∂_z`, `g = η⊗η + ¼ Σ((dxⁱ)² + (dyⁱ)²)`.
//! - `scaled`: the same chart, metric and `ξ` with `f = s·φ`, a genuine weak
//!   structure with `Q = s²·id + (1 − s²) η⊗ξ`.
//! - `graded`: `f = φ` rescaled by `sᵢ` on the i-th `(xⁱ, yⁱ)` leg, so `Q`
//!   has eigenvalue `sᵢ²` on that leg.
//! - `flat-const`: Euclidean ℝ³ with constant `f` and `ξ = ∂_z`.
//!
//! Keys are addressed as `builtin:<key>[?n=..,s=..]`.

use thiserror::Error;

use crate::expr::{StructureDef, StructureDoc, StructureError};
use crate::jet::Point;
use crate::structure::WeakAcm;

/// Largest supported `n` (chart dimension 7).
pub const MAX_N: usize = 3;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog key {0:?}")]
    UnknownKey(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("neither sign of f gives dη = Φ for {0}")]
    NoContactSign(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogKey {
    Sasakian { n: usize },
    Scaled { n: usize, s: f64 },
    Graded { s: Vec<f64> },
    FlatConst,
}

/// One row of the catalog listing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            key: "sasakian-r3 | sasakian-r5 | sasakian-r7",
            params: "n (alternative to the suffix)",
            summary: "standard Sasakian structure on R^(2n+1)",
        },
        CatalogEntry {
            key: "scaled",
            params: "s > 0 (required), n = 1..3",
            summary: "Sasakian chart with f = s*phi; weak structure with Q = s^2 id + (1 - s^2) eta(x)xi",
        },
        CatalogEntry {
            key: "graded",
            params: "n = 1..3, s1..sn > 0 (default 1)",
            summary: "Sasakian chart with phi rescaled by s_i on the i-th leg; Q eigenvalues s_i^2",
        },
        CatalogEntry {
            key: "flat-const",
            params: "none",
            summary: "Euclidean R^3, constant f, xi = d/dz; weak a.c.m. but not contact",
        },
    ]
}

fn parse_positive(name: &str, v: &str) -> Result<f64, CatalogError> {
    let x: f64 = v
        .parse()
        .map_err(|_| CatalogError::InvalidParameter(format!("{name}={v} is not a number")))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(CatalogError::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(x)
}

fn parse_n(v: &str) -> Result<usize, CatalogError> {
    let n: usize = v
        .parse()
        .map_err(|_| CatalogError::InvalidParameter(format!("n={v} is not an integer")))?;
    if n == 0 || n > MAX_N {
        return Err(CatalogError::InvalidParameter(format!("n must be in 1..={MAX_N}, got {n}")));
    }
    Ok(n)
}

impl CatalogKey {
    /// Parse `key[?a=1,b=2]`, with or without the `builtin:` prefix.
    pub fn parse(spec: &str) -> Result<Self, CatalogError> {
        let spec = spec.strip_prefix("builtin:").unwrap_or(spec);
        let (key, query) = spec.split_once('?').unwrap_or((spec, ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for part in query.split([',', '&']).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CatalogError::InvalidParameter(format!("expected name=value, got {part:?}")))?;
            params.push((k.trim(), v.trim()));
        }
        let get = |name: &str| params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let allow = |names: &[&str]| -> Result<(), CatalogError> {
            match params.iter().find(|(k, _)| !names.contains(k)) {
                Some((k, _)) => Err(CatalogError::InvalidParameter(format!(
                    "unknown parameter {k:?} for {key}"
                ))),
                None => Ok(()),
            }
        };
        let n_param = || get("n").map(parse_n).transpose();

        if let Some(dim) = key.strip_prefix("sasakian-r") {
            allow(&["n"])?;
            let dim: usize = dim
                .parse()
                .map_err(|_| CatalogError::UnknownKey(key.to_string()))?;
            if dim.is_multiple_of(2) {
                return Err(CatalogError::UnknownKey(key.to_string()));
            }
            let n = parse_n(&((dim - 1) / 2).to_string())?;
            if let Some(m) = n_param()? {
                if m != n {
                    return Err(CatalogError::InvalidParameter(format!(
                        "n={m} contradicts {key}"
                    )));
                }
            }
            return Ok(CatalogKey::Sasakian { n });
        }
        match key {
            "sasakian" => {
                allow(&["n"])?;
                Ok(CatalogKey::Sasakian {
                    n: n_param()?.unwrap_or(1),
                })
            }
            "scaled" => {
                allow(&["n", "s"])?;
                let s = get("s")
                    .ok_or_else(|| CatalogError::InvalidParameter("scaled requires s".into()))?;
                Ok(CatalogKey::Scaled {
                    n: n_param()?.unwrap_or(1),
                    s: parse_positive("s", s)?,
                })
            }
            "graded" => {
                let n = n_param()?.unwrap_or(1);
                let names: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
                let mut allowed: Vec<&str> = names.iter().map(String::as_str).collect();
                allowed.push("n");
                allow(&allowed)?;
                let s = names
                    .iter()
                    .map(|nm| get(nm).map_or(Ok(1.0), |v| parse_positive(nm, v)))
                    .collect::<Result<_, _>>()?;
                Ok(CatalogKey::Graded { s })
            }
            "flat-const" => {
                allow(&[])?;
                Ok(CatalogKey::FlatConst)
            }
            _ => Err(CatalogError::UnknownKey(key.to_string())),
        }
    }
}

/// Build the structure for a catalog key string.
pub fn catalog(spec: &str) -> Result<StructureDef, CatalogError> {
    build(&CatalogKey::parse(spec)?)
}

pub fn build(key: &CatalogKey) -> Result<StructureDef, CatalogError> {
    match key {
        CatalogKey::Sasakian { n } => {
            contact_chart(&format!("sasakian-r{}", 2 * n + 1), &vec![1.0; *n])
        }
        CatalogKey::Scaled { n, s } => contact_chart(&format!("scaled(s={s},n={n})"), &vec![*s; *n]),
        CatalogKey::Graded { s } => {
            let label: Vec<String> = s.iter().map(f64::to_string).collect();
            contact_chart(&format!("graded(s={})", label.join(",")), s)
        }
        CatalogKey::FlatConst => flat_const(),
    }
}

fn coord_names(n: usize) -> (Vec<String>, Vec<String>) {
    if n == 1 {
        (vec!["x".into()], vec!["y".into()])
    } else {
        (
            (1..=n).map(|i| format!("x{i}")).collect(),
            (1..=n).map(|i| format!("y{i}")).collect(),
        )
    }
}

/// `c·v` as source text, dropping unit coefficients.
fn scaled_term(c: f64, v: &str) -> String {
    if c == 1.0 {
        v.to_string()
    } else if c == -1.0 {
        format!("-{v}")
    } else {
        format!("{c}*{v}")
    }
}

fn number(c: f64) -> String {
    format!("{c}")
}

/// The Sasakian chart with `φ` rescaled by `scales[i]` on leg `i`. The sign
/// of `φ` is the one for which the unscaled chart satisfies `dη = Φ`.
fn contact_chart(name: &str, scales: &[f64]) -> Result<StructureDef, CatalogError> {
    let unit = vec![1.0; scales.len()];
    for sign in [1.0, -1.0] {
        if contact_sign_ok(&contact_chart_with_sign(name, &unit, sign)?) {
            return contact_chart_with_sign(name, scales, sign);
        }
    }
    Err(CatalogError::NoContactSign(name.to_string()))
}

fn contact_sign_ok(def: &StructureDef) -> bool {
    let d = def.dim();
    let acm = WeakAcm::new(def.clone());
    let probes = [
        def.domain.center(),
        Point::new((0..d).map(|k| 0.3 - 0.17 * k as f64).collect()),
    ];
    probes.iter().all(|p| match acm.at(p) {
        Ok(ev) => (&ev.deta.value - &ev.phi.value).amax() < 1e-10,
        Err(_) => false,
    })
}

fn contact_chart_with_sign(
    name: &str,
    scales: &[f64],
    sign: f64,
) -> Result<StructureDef, CatalogError> {
    let n = scales.len();
    let d = 2 * n + 1;
    let (xs, ys) = coord_names(n);
    let mut coords = xs.clone();
    coords.extend(ys.iter().cloned());
    coords.push("z".into());
    let z = 2 * n;

    let mut metric = vec![vec!["0".to_string(); d]; d];
    for i in 0..n {
        for j in 0..n {
            metric[i][j] = if i == j {
                format!("{}*{}/4 + 1/4", ys[i], ys[i])
            } else {
                format!("{}*{}/4", ys[i.min(j)], ys[i.max(j)])
            };
        }
        metric[n + i][n + i] = "1/4".into();
        metric[i][z] = format!("-{}/4", ys[i]);
        metric[z][i] = metric[i][z].clone();
    }
    metric[z][z] = "1/4".into();

    // φ∂x_i = −σ s_i ∂y_i,  φ∂y_i = σ s_i (∂x_i + y_i ∂z)
    let mut f = vec![vec!["0".to_string(); d]; d];
    for (i, s) in scales.iter().enumerate() {
        let c = sign * s;
        f[n + i][i] = number(-c);
        f[i][n + i] = number(c);
        f[z][n + i] = scaled_term(c, &ys[i]);
    }
    let mut xi = vec!["0".to_string(); d];
    xi[z] = "2".into();

    let doc = StructureDoc {
        name: name.to_string(),
        n,
        coords,
        domain: vec![[-1.0, 1.0]; d],
        metric,
        f,
        xi,
        q: None,
    };
    Ok(StructureDef::from_doc(&doc)?)
}

fn flat_const() -> Result<StructureDef, CatalogError> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let doc = StructureDoc {
        name: "flat-const".into(),
        n: 1,
        coords: s(&["x", "y", "z"]),
        domain: vec![[-1.0, 1.0]; 3],
        metric: vec![s(&["1", "0", "0"]), s(&["0", "1", "0"]), s(&["0", "0", "1"])],
        f: vec![s(&["0", "1", "0"]), s(&["-1", "0", "0"]), s(&["0", "0", "0"])],
        xi: s(&["0", "0", "1"]),
        q: None,
    };
    Ok(StructureDef::from_doc(&doc)?)
}
