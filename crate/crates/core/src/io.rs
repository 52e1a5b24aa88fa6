//! JSON input formats for fans, cones and fibered models.
//!
//! A model file bundles the total fan, the base fan, the projection, the
//! polarization and the marked base stratum:
//!
//! ```json
//! {
//!   "id": "p1xp1",
//!   "total": {"rank": 2, "rays": [[1,0],[0,1],[-1,0],[0,-1]], "max_cones": [[0,1],[1,2],[2,3],[3,0]]},
//!   "base": "p1.fan",
//!   "projection": {"matrix": [[0,1]], "source": "total", "target": "base"},
//!   "polarization": {"coeffs": [1, 1, 0, 0]},
//!   "base_ray_p": 0
//! }
//! ```
//!
//! Fans may be given inline or as a path relative to the model file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::divisors::TorusDivisor;
use crate::error::{Result, TorickError};
use crate::exact::rational::serde_rational_vec;
use crate::exact::Rational;
use crate::model::FiberedModel;
use crate::toric::{Cone, Fan, FanWire, ToricMorphism};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| TorickError::schema(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn fan_from_value(v: Value) -> Result<Fan> {
    let wire: FanWire = serde_json::from_value(v)?;
    wire.build()
}

pub fn parse_fan(text: &str) -> Result<Fan> {
    fan_from_value(parse_json(text)?)
}

pub fn load_fan(path: &Path) -> Result<Fan> {
    parse_fan(&read(path)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeWire {
    rank: usize,
    rays: Vec<Vec<i64>>,
}

pub fn parse_cone(text: &str) -> Result<Cone> {
    let w: ConeWire = serde_json::from_str(text)?;
    Cone::new(w.rank, w.rays)
}

pub fn load_cone(path: &Path) -> Result<Cone> {
    parse_cone(&read(path)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FanRef {
    File(String),
    Inline(Value),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionWire {
    matrix: Vec<Vec<i64>>,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    target: Option<String>,
}

#[derive(Deserialize)]
struct Coeffs(#[serde(with = "serde_rational_vec")] Vec<Rational>);

#[derive(Deserialize)]
#[serde(untagged)]
enum PolarizationWire {
    Bare(Coeffs),
    Object {
        coeffs: Coeffs,
        #[serde(default)]
        #[allow(dead_code)]
        fan: Option<String>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MarkedWire {
    Ray(usize),
    Cone(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelWire {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    total: FanRef,
    base: FanRef,
    projection: ProjectionWire,
    polarization: PolarizationWire,
    base_ray_p: MarkedWire,
}

fn resolve_fan(r: FanRef, dir: Option<&Path>) -> Result<Fan> {
    match r {
        FanRef::Inline(v) => fan_from_value(v),
        FanRef::File(name) => {
            let path = match dir {
                Some(d) => d.join(&name),
                None => PathBuf::from(&name),
            };
            load_fan(&path)
        }
    }
}

/// Parses a model; file references are resolved against `dir`.
pub fn parse_model(text: &str, dir: Option<&Path>) -> Result<FiberedModel> {
    let w: ModelWire = serde_json::from_str(text)?;
    for (field, value) in [("source", &w.projection.source), ("target", &w.projection.target)] {
        let expected = if field == "source" { "total" } else { "base" };
        if let Some(v) = value {
            if v != expected {
                return Err(TorickError::schema(format!("projection {field} must be \"{expected}\", got \"{v}\"")));
            }
        }
    }
    let total = Arc::new(resolve_fan(w.total, dir)?);
    let base = Arc::new(resolve_fan(w.base, dir)?);
    let pi = ToricMorphism::new(w.projection.matrix, total.clone(), base)?;
    let coeffs = match w.polarization {
        PolarizationWire::Bare(c) | PolarizationWire::Object { coeffs: c, .. } => c.0,
    };
    let l = TorusDivisor::new(total, coeffs)?;
    let marked = match w.base_ray_p {
        MarkedWire::Ray(r) => vec![r],
        MarkedWire::Cone(rs) => rs,
    };
    FiberedModel::new(w.id.unwrap_or_else(|| "model".into()), pi, l, marked)
}

pub fn load_model(path: &Path) -> Result<FiberedModel> {
    let text = read(path)?;
    parse_model(&text, path.parent())
}

#[derive(Serialize)]
struct ModelOut<'a> {
    id: &'a str,
    total: &'a Fan,
    base: &'a Fan,
    projection: ProjectionOut<'a>,
    polarization: &'a TorusDivisor,
    base_ray_p: &'a [usize],
}

#[derive(Serialize)]
struct ProjectionOut<'a> {
    matrix: &'a [Vec<i64>],
    source: &'static str,
    target: &'static str,
}

/// Self-contained JSON form of a model, readable by [`parse_model`].
pub fn model_to_value(m: &FiberedModel) -> Value {
    serde_json::to_value(ModelOut {
        id: &m.id,
        total: m.total(),
        base: m.base(),
        projection: ProjectionOut { matrix: m.projection().matrix(), source: "total", target: "base" },
        polarization: m.polarization(),
        base_ray_p: m.marked(),
    })
    .expect("model serializes")
}
