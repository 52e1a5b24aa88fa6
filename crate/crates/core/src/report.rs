//! Versioned JSON reports shared by the command-line tool and the C bindings.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::divisors::TorusDivisor;
use crate::error::{Result, TorickError};
use crate::exact::linalg::{is_primitive, to_rat_vec};
use crate::exact::rational::parse_rational;
use crate::exact::{format_rational, AlgebraicValue, Rational, Sign};
use crate::functionals::{
    canonical_direction, central_fiber_multiplicities, df_path, df_via_derivative, donaldson_futaki,
    normalized_volume_v, InvariantReport, PathReport,
};
use crate::model::FiberedModel;
use crate::singularities::{classify, destabilizer_search};
use crate::toric::Cone;

pub const SCHEMA: &str = "torick/1";
pub const DEFAULT_SEED: u64 = 1729;

fn stamp(command: &str, body: impl Serialize) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let Value::Object(extra) = serde_json::to_value(body).expect("report serializes") {
        v.as_object_mut().unwrap().extend(extra);
    }
    v
}

/// A report plus whether an internal cross-check failed.
pub struct Outcome {
    pub report: Value,
    pub mismatch: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, mismatch: false }
    }
}

pub fn volume(m: &FiberedModel) -> Result<Outcome> {
    let v = normalized_volume_v(m)?;
    Ok(Outcome::ok(stamp(
        "volume",
        json!({
            "model": m.id,
            "n": m.dim(),
            "dim_base": m.base_dim(),
            "dim_fiber": m.fiber_dim(),
            "volume": v,
        }),
    )))
}

#[derive(Serialize)]
struct DerivativeCheck {
    value: Option<AlgebraicValue>,
    agrees: Option<bool>,
    note: Option<&'static str>,
}

#[derive(Serialize)]
struct DfReport {
    #[serde(flatten)]
    invariants: InvariantReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivative_check: Option<DerivativeCheck>,
}

pub fn df(m: &FiberedModel, derivative_check: bool) -> Result<Outcome> {
    let invariants = donaldson_futaki(m)?;
    let mut mismatch = false;
    let check = if !derivative_check {
        None
    } else if invariants.dim_fiber == 0 {
        Some(DerivativeCheck { value: None, agrees: None, note: Some("derivative form degenerates for a point fiber") })
    } else {
        let value = df_via_derivative(m)?;
        let agrees = value == invariants.df;
        mismatch = !agrees;
        Some(DerivativeCheck { value: Some(value), agrees: Some(agrees), note: None })
    };
    Ok(Outcome { report: stamp("df", DfReport { invariants, derivative_check: check }), mismatch })
}

/// `zero`, `canonical`, `ray:<i>`, or a comma-separated coefficient list.
pub fn parse_direction(m: &FiberedModel, direction: &str) -> Result<TorusDivisor> {
    let total = m.total().clone();
    let direction = direction.trim();
    match direction {
        "zero" => Ok(TorusDivisor::zero(total)),
        "canonical" => Ok(canonical_direction(m)?.1),
        _ => {
            if let Some(i) = direction.strip_prefix("ray:") {
                let i: usize = i.parse().map_err(|_| TorickError::schema(format!("bad ray index in \"{direction}\"")))?;
                if i >= total.num_rays() {
                    return Err(TorickError::InvalidArgument(format!("ray {i} out of range")));
                }
                return Ok(TorusDivisor::prime(total, i));
            }
            let list = direction.strip_prefix("coeffs:").unwrap_or(direction);
            let coeffs = list.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>()?;
            TorusDivisor::new(total, coeffs)
        }
    }
}

#[derive(Serialize)]
pub struct Sample {
    #[serde(with = "crate::exact::rational::serde_rational")]
    pub t: Rational,
    pub df: AlgebraicValue,
    pub ddf_sign: Sign,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concavity: Option<AlgebraicValue>,
}

/// `k` evenly spaced points of `[0, t_max]`, or of `[0, 1]` for an unbounded interval.
pub fn samples(p: &PathReport, k: usize) -> Vec<Sample> {
    let end = p.t_max.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
    (0..k)
        .map(|i| {
            let t = if k == 1 { Rational::zero() } else { &end * Rational::new(i.into(), (k - 1).into()) };
            Sample {
                df: p.df_at(&t),
                ddf_sign: p.derivative_sign_at(&t),
                concavity: p.concavity_at(&t),
                t,
            }
        })
        .collect()
}

pub fn samples_csv(samples: &[Sample]) -> String {
    let vertical = samples.first().is_some_and(|s| s.concavity.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t", "DF", "dDF_sign"];
    if vertical {
        header.push("concavity");
    }
    w.write_record(&header).expect("in-memory csv");
    for s in samples {
        let mut row = vec![format_rational(&s.t), s.df.to_string(), s.ddf_sign.as_str().to_string()];
        if let Some(c) = &s.concavity {
            row.push(c.to_string());
        }
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// The path report and its CSV rendering.
pub fn path(m: &FiberedModel, direction: &str, k: usize) -> Result<(Outcome, String)> {
    let e = parse_direction(m, direction)?;
    let p = df_path(m, &e)?;
    let s = samples(&p, k);
    let csv = samples_csv(&s);
    let report = stamp("path", json!({ "path": p, "samples": s }));
    Ok((Outcome::ok(report), csv))
}

pub fn classify_cone(c: &Cone) -> Result<Outcome> {
    let r = classify(c)?;
    Ok(Outcome::ok(stamp("classify", json!({ "cone": c.rays(), "report": r }))))
}

pub fn search(c: &Cone, bound: u32) -> Result<Outcome> {
    Ok(Outcome::ok(stamp("search", destabilizer_search(c, bound)?)))
}

pub fn multiplicities(m: &FiberedModel) -> Result<Outcome> {
    Ok(Outcome::ok(stamp("multiplicities", json!({ "model": m.id, "components": central_fiber_multiplicities(m)? }))))
}

#[derive(Serialize)]
struct Trial {
    vector: Vec<i64>,
    volume: Option<AlgebraicValue>,
    df: AlgebraicValue,
    equal: bool,
}

fn draw(rng: &mut ChaCha8Rng, m: &FiberedModel) -> Option<Vec<i64>> {
    let total = m.total();
    for _ in 0..10_000 {
        let v: Vec<i64> = (0..total.rank()).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().all(|&x| x == 0) || !is_primitive(&v) || total.ray_index(&v).is_some() {
            continue;
        }
        if total.contains(&to_rat_vec(&v)) {
            return Some(v);
        }
    }
    None
}

fn invariants(m: &FiberedModel) -> Result<(Option<AlgebraicValue>, AlgebraicValue)> {
    let r = donaldson_futaki(m)?;
    Ok((r.volume, r.df))
}

/// Compares V and DF before and after random star subdivisions of the total fan.
///
/// With `corrupt`, each pulled-back polarization is perturbed by a small
/// multiple of the new exceptional divisor, which must be detected.
pub fn pullback_check(m: &FiberedModel, trials: usize, seed: u64, corrupt: bool) -> Result<Outcome> {
    let (v0, df0) = invariants(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut attempts = 0usize;
    while out.len() < trials {
        attempts += 1;
        if attempts > 50 * trials.max(1) {
            return Err(TorickError::InvalidArgument("could not draw enough admissible subdivision centers".into()));
        }
        let Some(v) = draw(&mut rng, m) else {
            return Err(TorickError::InvalidArgument("no admissible subdivision centers in the box".into()));
        };
        let mut r = m.refine(&v)?;
        if corrupt {
            let e = TorusDivisor::prime(r.total().clone(), r.total().num_rays() - 1);
            let l = r.polarization().add_scaled(&-Rational::new(1.into(), 1000.into()), &e)?;
            r = r.with_polarization(l)?;
        }
        let (v1, df1) = match invariants(&r) {
            Ok(x) => x,
            // subdividing a boundary face of a non-complete fan adds a non-compact divisor
            Err(TorickError::Unsupported(_)) => continue,
            Err(e) => return Err(e),
        };
        let equal = v1 == v0 && df1 == df0;
        out.push(Trial { vector: v, volume: v1, df: df1, equal });
    }
    let mismatches = out.iter().filter(|t| !t.equal).count();
    let report = stamp(
        "pullback-check",
        json!({
            "model": m.id,
            "seed": seed,
            "trials": trials,
            "volume": v0,
            "df": df0,
            "mismatches": mismatches,
            "all_equal": mismatches == 0,
            "results": out,
        }),
    );
    Ok(Outcome { report, mismatch: mismatches > 0 })
}
