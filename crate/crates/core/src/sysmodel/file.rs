//! JSON model files.
//!
//! ```text
//! {"kind":"quadratic","n":2,"A":[[..]],"H":[[[..]]],"x_eq":[..],"labels":[..]}
//! {"kind":"swing","inertia":[..],"damping":[..],"p_mech":[..],"emf":[..],
//!  "Y_re":[[..]],"Y_im":[[..]],"omega_s":377.0}
//! ```
//!
//! Matrices are row-major; `H` lists one matrix per state equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_swing_model, QuadraticModel, SwingParams, SwingSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelFile {
    Quadratic(QuadraticSpec),
    Swing(SwingSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<Vec<f64>>>,
    pub x_eq: Vec<f64>,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwingSpec {
    pub inertia: Vec<f64>,
    pub damping: Vec<f64>,
    pub p_mech: Vec<f64>,
    pub emf: Vec<f64>,
    #[serde(rename = "Y_re")]
    pub y_re: Vec<Vec<f64>>,
    #[serde(rename = "Y_im")]
    pub y_im: Vec<Vec<f64>>,
    pub omega_s: f64,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn with_path<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(
            if path.is_empty() { ".".into() } else { path },
            e.inner().to_string(),
        )
    })
}

fn square(path: &str, rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        return Err(schema(
            path,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(schema(
                format!("{path}[{r}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector(path: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(schema(
            path,
            format!("expected {n} entries, found {}", v.len()),
        ));
    }
    Ok(())
}

impl ModelFile {
    /// Parses JSON text; failures carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| schema(".", e.to_string()))?;
        let kind = match value.get("kind") {
            Some(serde_json::Value::String(k)) => k.clone(),
            Some(_) => return Err(schema("kind", "expected a string")),
            None => return Err(schema("kind", "missing field")),
        };
        let mut body = value;
        if let Some(obj) = body.as_object_mut() {
            obj.remove("kind");
        }
        match kind.as_str() {
            "quadratic" => with_path(body).map(ModelFile::Quadratic),
            "swing" => with_path(body).map(ModelFile::Swing),
            other => Err(schema(
                "kind",
                format!("unknown model kind {other:?}, expected \"quadratic\" or \"swing\""),
            )),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    pub fn from_swing_params(p: &SwingParams) -> Self {
        let m = p.machines();
        let rows = |f: &dyn Fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m)
                .map(|i| (0..m).map(|j| f(p.y[(i, j)])).collect())
                .collect()
        };
        ModelFile::Swing(SwingSpec {
            inertia: p.inertia.clone(),
            damping: p.damping.clone(),
            p_mech: p.p_mech.clone(),
            emf: p.emf.clone(),
            y_re: rows(&|c| c.re),
            y_im: rows(&|c| c.im),
            omega_s: p.omega_s,
        })
    }

    pub fn from_quadratic(model: &QuadraticModel) -> Self {
        let n = model.n();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)]).collect())
                .collect()
        };
        ModelFile::Quadratic(QuadraticSpec {
            n,
            a: rows(model.a()),
            h: model.hessians().iter().map(rows).collect(),
            x_eq: model.x_eq().iter().copied().collect(),
            labels: model.labels().to_vec(),
        })
    }

    /// Validates the file contents and builds the model.
    pub fn load(&self) -> Result<LoadedModel> {
        match self {
            ModelFile::Quadratic(q) => {
                let n = q.n;
                if n == 0 {
                    return Err(schema("n", "must be positive"));
                }
                let a = square("A", &q.a, n)?;
                if q.h.len() != n {
                    return Err(schema(
                        "H",
                        format!("expected {n} matrices, found {}", q.h.len()),
                    ));
                }
                let h =
                    q.h.iter()
                        .enumerate()
                        .map(|(k, m)| square(&format!("H[{k}]"), m, n))
                        .collect::<Result<Vec<_>>>()?;
                vector("x_eq", &q.x_eq, n)?;
                if q.labels.len() != n {
                    return Err(schema(
                        "labels",
                        format!("expected {n} entries, found {}", q.labels.len()),
                    ));
                }
                let model =
                    QuadraticModel::new(a, h, DVector::from_vec(q.x_eq.clone()), q.labels.clone())
                        .map_err(|e| match e {
                            Error::InvalidInput(msg) => schema("labels", msg),
                            Error::NonFinite(msg) => schema(".", msg),
                            other => other,
                        })?;
                Ok(LoadedModel::Quadratic(model))
            }
            ModelFile::Swing(s) => {
                let m = s.inertia.len();
                if m < 2 {
                    return Err(schema("inertia", "need at least two machines"));
                }
                vector("damping", &s.damping, m)?;
                vector("p_mech", &s.p_mech, m)?;
                vector("emf", &s.emf, m)?;
                let re = square("Y_re", &s.y_re, m)?;
                let im = square("Y_im", &s.y_im, m)?;
                let params = SwingParams {
                    inertia: s.inertia.clone(),
                    damping: s.damping.clone(),
                    p_mech: s.p_mech.clone(),
                    emf: s.emf.clone(),
                    y: DMatrix::from_fn(m, m, |i, j| Complex64::new(re[(i, j)], im[(i, j)])),
                    omega_s: s.omega_s,
                };
                params.validate().map_err(|e| match e {
                    Error::InvalidInput(msg) | Error::NonFinite(msg) => schema(".", msg),
                    other => other,
                })?;
                let model = build_swing_model(&params)?;
                let system = SwingSystem::new(params)?;
                Ok(LoadedModel::Swing { system, model })
            }
        }
    }
}

/// A model ready for analysis. Swing files keep the full trigonometric
/// vector field alongside its quadratic truncation.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Quadratic(QuadraticModel),
    Swing {
        system: SwingSystem,
        model: QuadraticModel,
    },
}

impl LoadedModel {
    pub fn quadratic(&self) -> &QuadraticModel {
        match self {
            LoadedModel::Quadratic(m) => m,
            LoadedModel::Swing { model, .. } => model,
        }
    }

    pub fn swing(&self) -> Option<&SwingSystem> {
        match self {
            LoadedModel::Swing { system, .. } => Some(system),
            LoadedModel::Quadratic(_) => None,
        }
    }
}
