//! File formats and deterministic result serialization.
//!
//! One JSON-shaped text format covers spaces, graphs, subspaces and results,
//! so fixtures are diffable and hand-writable. Numbers may be JSON numbers
//! or exact-rational strings "p/q"; the presence of any rational string in
//! the inputs selects the rational backend unless overridden.

use ghp_metrics::graphs::RootedGraph;
use ghp_metrics::scalar::{Rational, Scalar};
use ghp_metrics::spaces::{validate_space, FiniteSpace};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use std::str::FromStr;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Budget(m) => m,
        }
    }
}

pub fn from_core(err: ghp_metrics::Error) -> CliError {
    match err {
        ghp_metrics::Error::BudgetExceeded { .. } => CliError::Budget(err.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_json(path: &str) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{path}: invalid JSON: {e}")))
}

/// Does any number anywhere in the document use the exact "p/q" syntax?
pub fn contains_rational_literal(v: &Value) -> bool {
    match v {
        Value::String(s) => parse_rational_literal(s).is_some(),
        Value::Array(a) => a.iter().any(contains_rational_literal),
        Value::Object(o) => o.iter().any(|(k, v)| {
            k != "points" && k != "comment" && k != "root" && contains_rational_literal(v)
        }),
        _ => false,
    }
}

fn parse_rational_literal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(s).ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Numeric scalar from a JSON number or a "p/q" string. JSON numbers convert
/// through their exact binary value.
pub fn scalar_from_value<S: Scalar>(v: &Value, what: &str) -> CliResult<S> {
    match v {
        Value::Number(n) => {
            let f = n
                .as_f64()
                .ok_or_else(|| CliError::Validation(format!("{what}: number out of range")))?;
            S::from_f64_exact(f)
                .ok_or_else(|| CliError::Validation(format!("{what}: non-finite number")))
        }
        Value::String(s) => {
            let q = parse_rational_literal(s)
                .ok_or_else(|| CliError::Validation(format!("{what}: bad rational '{s}'")))?;
            // Exact when S is rational; the float backend rounds.
            let (n, d) = (q.numer(), q.denom());
            let approx = n.to_string().parse::<f64>().unwrap_or(f64::NAN)
                / d.to_string().parse::<f64>().unwrap_or(f64::NAN);
            if S::EXACT {
                rational_into_scalar(&q)
                    .ok_or_else(|| CliError::Validation(format!("{what}: bad rational")))
            } else {
                S::from_f64_exact(approx)
                    .ok_or_else(|| CliError::Validation(format!("{what}: non-finite number")))
            }
        }
        _ => Err(CliError::Validation(format!(
            "{what}: expected a number or 'p/q' string"
        ))),
    }
}

fn rational_into_scalar<S: Scalar>(q: &Rational) -> Option<S> {
    // Reconstruct through the scalar's own constructors so this works for
    // both backends without a dedicated conversion trait.
    let n: i64 = q.numer().to_string().parse().ok()?;
    let d: i64 = q.denom().to_string().parse().ok()?;
    Some(S::from_ratio(n, d))
}

pub fn parse_space<S: Scalar>(doc: &Value, path: &str) -> CliResult<(FiniteSpace<S>, Vec<String>)> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Validation(format!("{path}: expected an object")))?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "comment" | "points" | "metric" | "coords" | "norm" | "root" | "mass"
        ) {
            return Err(CliError::Validation(format!(
                "{path}: unknown field '{key}'"
            )));
        }
    }
    let metric = obj.get("metric");
    let coords = obj.get("coords");
    if metric.is_some() == coords.is_some() {
        return Err(CliError::Validation(format!(
            "{path}: exactly one of 'metric' and 'coords' is required"
        )));
    }

    let n;
    let dist: Vec<Vec<S>>;
    if let Some(metric) = metric {
        let rows = metric
            .as_array()
            .ok_or_else(|| CliError::Validation(format!("{path}: 'metric' must be a matrix")))?;
        n = rows.len();
        let mut out = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| {
                CliError::Validation(format!("{path}: metric row {i} must be an array"))
            })?;
            let mut r = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                r.push(scalar_from_value::<S>(
                    v,
                    &format!("{path}: metric[{i}][{j}]"),
                )?);
            }
            out.push(r);
        }
        dist = out;
    } else {
        let norm = obj
            .get("norm")
            .and_then(|v| v.as_str())
            .unwrap_or("euclidean");
        let rows = coords
            .unwrap()
            .as_array()
            .ok_or_else(|| CliError::Validation(format!("{path}: 'coords' must be an array")))?;
        n = rows.len();
        let mut pts: Vec<Vec<S>> = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| {
                CliError::Validation(format!("{path}: coords[{i}] must be a vector"))
            })?;
            let mut r = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                r.push(scalar_from_value::<S>(
                    v,
                    &format!("{path}: coords[{i}][{j}]"),
                )?);
            }
            pts.push(r);
        }
        if pts.iter().any(|p| p.len() != pts[0].len()) {
            return Err(CliError::Validation(format!(
                "{path}: coords must share a dimension"
            )));
        }
        if norm == "euclidean" && S::EXACT {
            return Err(CliError::Validation(format!(
                "{path}: euclidean coords are not exactly representable; \
                 use the float backend or norms l1/linf"
            )));
        }
        dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diffs: Vec<S> = pts[i]
                            .iter()
                            .zip(&pts[j])
                            .map(|(a, b)| (a.clone() - b.clone()).abs())
                            .collect();
                        match norm {
                            "l1" => diffs.into_iter().fold(S::zero(), |acc, d| acc + d),
                            "linf" => diffs.into_iter().fold(S::zero(), S::max_val),
                            "euclidean" => {
                                let sq: f64 = diffs.iter().map(|d| d.to_f64() * d.to_f64()).sum();
                                S::from_f64_exact(sq.sqrt()).unwrap()
                            }
                            other => panic!("unknown norm {other}"),
                        }
                    })
                    .collect()
            })
            .collect();
        if !matches!(norm, "euclidean" | "l1" | "linf") {
            return Err(CliError::Validation(format!(
                "{path}: unknown norm '{norm}'"
            )));
        }
    }

    let names: Vec<String> = match obj.get("points") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| {
                v.as_str().map(str::to_owned).ok_or_else(|| {
                    CliError::Validation(format!("{path}: point names must be strings"))
                })
            })
            .collect::<CliResult<_>>()?,
        Some(_) => {
            return Err(CliError::Validation(format!(
                "{path}: 'points' must be an array"
            )))
        }
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    if names.len() != n {
        return Err(CliError::Validation(format!(
            "{path}: {} point names for {n} points",
            names.len()
        )));
    }

    let root = match obj.get("root") {
        None => 0,
        Some(Value::Number(k)) => k
            .as_u64()
            .ok_or_else(|| CliError::Validation(format!("{path}: bad root index")))?
            as usize,
        Some(Value::String(name)) => names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| CliError::Validation(format!("{path}: unknown root '{name}'")))?,
        Some(_) => return Err(CliError::Validation(format!("{path}: bad root"))),
    };

    let mass: Vec<S> = match obj.get("mass") {
        None => vec![S::zero(); n],
        Some(Value::Array(a)) => {
            if a.len() != n {
                return Err(CliError::Validation(format!(
                    "{path}: {} masses for {n} points",
                    a.len()
                )));
            }
            a.iter()
                .enumerate()
                .map(|(i, v)| scalar_from_value::<S>(v, &format!("{path}: mass[{i}]")))
                .collect::<CliResult<_>>()?
        }
        Some(_) => {
            return Err(CliError::Validation(format!(
                "{path}: 'mass' must be an array"
            )))
        }
    };

    let space = validate_space(dist, root, mass, Some(names.clone()))
        .map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
    Ok((space, names))
}

pub fn parse_graph(doc: &Value, path: &str) -> CliResult<(RootedGraph, Vec<String>)> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Validation(format!("{path}: expected an object")))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "comment" | "vertices" | "edges" | "root") {
            return Err(CliError::Validation(format!(
                "{path}: unknown field '{key}'"
            )));
        }
    }
    let names: Vec<String> = match obj.get("vertices") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| {
                v.as_str().map(str::to_owned).ok_or_else(|| {
                    CliError::Validation(format!("{path}: vertex names must be strings"))
                })
            })
            .collect::<CliResult<_>>()?,
        Some(Value::Number(k)) => {
            let n = k
                .as_u64()
                .ok_or_else(|| CliError::Validation(format!("{path}: bad vertex count")))?;
            (0..n).map(|i| i.to_string()).collect()
        }
        _ => {
            return Err(CliError::Validation(format!(
                "{path}: 'vertices' is required"
            )))
        }
    };
    let vertex = |v: &Value, what: &str| -> CliResult<usize> {
        match v {
            Value::Number(k) => k
                .as_u64()
                .map(|k| k as usize)
                .ok_or_else(|| CliError::Validation(format!("{path}: {what}: bad index"))),
            Value::String(name) => names.iter().position(|p| p == name).ok_or_else(|| {
                CliError::Validation(format!("{path}: {what}: unknown vertex '{name}'"))
            }),
            _ => Err(CliError::Validation(format!(
                "{path}: {what}: expected name or index"
            ))),
        }
    };
    let mut edges = Vec::new();
    match obj.get("edges") {
        Some(Value::Array(a)) => {
            for (k, e) in a.iter().enumerate() {
                let pair = e.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    CliError::Validation(format!("{path}: edge {k} must be a pair"))
                })?;
                edges.push((
                    vertex(&pair[0], &format!("edge {k}"))?,
                    vertex(&pair[1], &format!("edge {k}"))?,
                ));
            }
        }
        _ => return Err(CliError::Validation(format!("{path}: 'edges' is required"))),
    }
    let root = match obj.get("root") {
        None => 0,
        Some(v) => vertex(v, "root")?,
    };
    let graph = RootedGraph::new(names.len(), edges, root)
        .map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
    Ok((graph, names))
}

/// A subspace specification: support (names or indices into the parent),
/// optional masses (default: the parent's), optional radius for the
/// inner-ball clause.
pub struct SubspaceDoc {
    pub support: Vec<usize>,
    pub mass: Option<Vec<Value>>,
    pub radius: Option<Value>,
}

pub fn parse_subspace(doc: &Value, names: &[String], path: &str) -> CliResult<SubspaceDoc> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Validation(format!("{path}: expected an object")))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "comment" | "support" | "mass" | "radius") {
            return Err(CliError::Validation(format!(
                "{path}: unknown field '{key}'"
            )));
        }
    }
    let support = match obj.get("support") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::Number(k) => k
                    .as_u64()
                    .map(|k| k as usize)
                    .ok_or_else(|| CliError::Validation(format!("{path}: bad support index"))),
                Value::String(name) => names.iter().position(|p| p == name).ok_or_else(|| {
                    CliError::Validation(format!("{path}: unknown support point '{name}'"))
                }),
                _ => Err(CliError::Validation(format!("{path}: bad support entry"))),
            })
            .collect::<CliResult<Vec<usize>>>()?,
        _ => {
            return Err(CliError::Validation(format!(
                "{path}: 'support' is required"
            )))
        }
    };
    let mass = match obj.get("mass") {
        None => None,
        Some(Value::Array(a)) => Some(a.clone()),
        Some(_) => {
            return Err(CliError::Validation(format!(
                "{path}: 'mass' must be an array"
            )))
        }
    };
    Ok(SubspaceDoc {
        support,
        mass,
        radius: obj.get("radius").cloned(),
    })
}

/// Round to 12 significant digits so repeated runs print identical bytes.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - exp);
    (x * factor).round() / factor
}

/// Serialize a scalar: rational backends as exact "p/q" strings, floats as
/// 12-significant-digit numbers.
pub fn scalar_to_value<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        let text = format!("{v}");
        Value::String(text)
    } else {
        json!(sig12(v.to_f64()))
    }
}

/// A space as a document that parses back to an equivalent space.
pub fn space_to_value<S: Scalar>(space: &FiniteSpace<S>) -> Value {
    let n = space.n();
    let names: Vec<String> = (0..n).map(|i| space.label(i)).collect();
    let metric: Vec<Value> = (0..n)
        .map(|i| Value::Array((0..n).map(|j| scalar_to_value(space.dist(i, j))).collect()))
        .collect();
    let mass: Vec<Value> = (0..n).map(|i| scalar_to_value(space.mass(i))).collect();
    let mut obj = Map::new();
    obj.insert("points".into(), json!(names));
    obj.insert("metric".into(), Value::Array(metric));
    obj.insert("root".into(), json!(space.label(space.root())));
    obj.insert("mass".into(), Value::Array(mass));
    Value::Object(obj)
}

pub fn print_result(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("result serialization")
    );
}
