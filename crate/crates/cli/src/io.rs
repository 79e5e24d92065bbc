//! Problem and solution files.
//!
//! Rationals travel as strings (`"9/2"`), so exact data survives a round trip.
//! Floats are written with 17 significant digits.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use maxent_core::maxent::{kl_divergence, Diagnostics};
use maxent_core::numkernel::{format_rational, parse_rational, to_f64};
use maxent_core::{Distribution, Error, MaxEntProblem, Rational, Solution};
use serde_json::{json, Map, Number, Value};

/// A parsed problem file: the problem plus optional outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub problem: MaxEntProblem,
    pub names: Option<Vec<String>>,
}

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{path}: {msg}"))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| schema(&path.display().to_string(), format!("not valid JSON ({e})")).into())
}

pub fn parse_problem(path: &Path) -> Result<ProblemFile> {
    Ok(problem_from_value(&read_json(path)?)?)
}

fn rational_at(v: &Value, path: &str) -> maxent_core::Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| schema(path, e)),
        Value::Number(n) if n.as_i64().is_some() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(schema(path, "expected a rational string such as \"9/2\"")),
    }
}

fn array_at<'a>(v: &'a Value, path: &str) -> maxent_core::Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

pub fn problem_from_value(v: &Value) -> maxent_core::Result<ProblemFile> {
    let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    if let Some(key) = obj
        .keys()
        .find(|k| !["m", "features", "targets", "samples", "prior", "names"].contains(&k.as_str()))
    {
        return Err(schema(&format!("$.{key}"), "unknown field"));
    }
    let m = obj
        .get("m")
        .ok_or_else(|| schema("$.m", "missing"))?
        .as_u64()
        .ok_or_else(|| schema("$.m", "expected a nonnegative integer"))? as usize;

    let mut features = Vec::new();
    for (i, row) in array_at(obj.get("features").ok_or_else(|| schema("$.features", "missing"))?, "$.features")?
        .iter()
        .enumerate()
    {
        let path = format!("$.features[{i}]");
        let mut values = Vec::new();
        for (j, x) in array_at(row, &path)?.iter().enumerate() {
            let here = format!("{path}[{j}]");
            let Value::Number(n) = x else {
                return Err(schema(&here, "expected an integer"));
            };
            let whole = n.as_f64().filter(|x| x.fract() == 0.0 && x.abs() < 9.0e15);
            let k = n.as_i64().or(whole.map(|x| x as i64)).ok_or_else(|| {
                Error::Integrality(format!(
                    "{here} = {n}: feature functions must be integer valued; \
                     only then is the maximum-entropy family a toric model"
                ))
            })?;
            values.push(k);
        }
        features.push(values);
    }

    let rationals = |key: &str| -> maxent_core::Result<Option<Vec<Rational>>> {
        obj.get(key)
            .map(|v| {
                let path = format!("$.{key}");
                array_at(v, &path)?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| rational_at(x, &format!("{path}[{i}]")))
                    .collect()
            })
            .transpose()
    };
    let targets = rationals("targets")?;
    let prior = rationals("prior")?;
    let samples = obj
        .get("samples")
        .map(|v| {
            array_at(v, "$.samples")?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_u64()
                        .map(|o| o as usize)
                        .ok_or_else(|| schema(&format!("$.samples[{i}]"), "expected an outcome label in 1..m"))
                })
                .collect::<maxent_core::Result<Vec<_>>>()
        })
        .transpose()?;
    let names = obj
        .get("names")
        .map(|v| {
            let list = array_at(v, "$.names")?;
            if list.len() != m {
                return Err(schema("$.names", format!("expected {m} labels")));
            }
            list.iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| schema(&format!("$.names[{i}]"), "expected a string"))
                })
                .collect()
        })
        .transpose()?;

    let problem = MaxEntProblem::new(m, features, targets, samples, prior)?;
    Ok(ProblemFile { problem, names })
}

pub fn problem_to_value(file: &ProblemFile) -> Value {
    let p = &file.problem;
    let rationals = |v: &[Rational]| Value::from(v.iter().map(format_rational).collect::<Vec<_>>());
    let mut obj = Map::new();
    obj.insert("m".into(), json!(p.m()));
    obj.insert("features".into(), json!(p.features()));
    if let Some(t) = p.targets() {
        obj.insert("targets".into(), rationals(t));
    }
    if let Some(s) = p.samples() {
        obj.insert("samples".into(), json!(s));
    }
    if let Some(r) = p.prior() {
        obj.insert("prior".into(), rationals(r));
    }
    if let Some(n) = &file.names {
        obj.insert("names".into(), json!(n));
    }
    Value::Object(obj)
}

/// `x` with 17 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format!("{x:.16e}").parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

fn diagnostics_value(d: &Diagnostics) -> Value {
    let mut obj = Map::new();
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(k.into(), v);
        }
    };
    put("positive_roots", d.positive_roots.map(Value::from));
    put("basis_size", d.basis_size.map(Value::from));
    put("eliminant_degree", d.eliminant_degree.map(Value::from));
    put("saturated", Some(Value::from(d.saturated)));
    put("sign_flip", Some(Value::from(d.sign_flip)));
    put("cycles", d.cycles.map(Value::from));
    put("iterations", d.iterations.map(Value::from));
    put("gradient_norm", d.gradient_norm.map(float));
    put("backtracks", d.backtracks.map(Value::from));
    put("gis_constant", d.gis_constant.map(float));
    if !d.notes.is_empty() {
        put("notes", Some(json!(d.notes)));
    }
    Value::Object(obj)
}

/// Outcome of the `--verify` cross-check against the Newton baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum Verification {
    Gap(f64),
    Failed(String),
}

pub fn solution_to_value(
    solution: &Solution,
    problem: &MaxEntProblem,
    verification: Option<&Verification>,
) -> Value {
    let mut obj = Map::new();
    obj.insert("method".into(), Value::from(solution.method.name()));
    obj.insert("distribution".into(), floats(solution.distribution.probs()));
    if let Some(exact) = &solution.distribution_exact {
        obj.insert(
            "distribution_exact".into(),
            Value::from(exact.iter().map(format_rational).collect::<Vec<_>>()),
        );
    }
    obj.insert("theta".into(), floats(&solution.theta));
    obj.insert("xi".into(), floats(&solution.xi));
    obj.insert("normalizer".into(), float(solution.normalizer));
    obj.insert("entropy".into(), float(solution.entropy()));
    if let Some(prior) = problem.prior() {
        let kl = Distribution::new(prior.iter().map(to_f64).collect())
            .and_then(|r| kl_divergence(&solution.distribution, &r));
        obj.insert("kl_to_prior".into(), kl.map(float).unwrap_or(Value::Null));
    }
    obj.insert("residuals".into(), floats(&solution.residuals));
    obj.insert("diagnostics".into(), diagnostics_value(&solution.diagnostics));
    if !solution.diagnostics.certificates.is_empty() {
        let certs = solution
            .diagnostics
            .certificates
            .iter()
            .map(|c| {
                json!({
                    "variable": c.variable() + 1,
                    "interval": [format_rational(c.interval().low()), format_rational(c.interval().high())],
                })
            })
            .collect();
        obj.insert("certificates".into(), Value::Array(certs));
    }
    match verification {
        Some(Verification::Gap(g)) => {
            obj.insert("verify".into(), json!({"reference": "newton", "gap": float(*g)}));
        }
        Some(Verification::Failed(msg)) => {
            obj.insert("verify".into(), json!({"reference": "newton", "gap": null, "error": msg}));
        }
        None => {}
    }
    Value::Object(obj)
}

/// Reads a distribution: a bare array, or any object with a `distribution`
/// array (such as a solution file). Entries may be numbers or rational strings.
pub fn parse_distribution(path: &Path) -> Result<Vec<f64>> {
    let v = read_json(path)?;
    let (list, base) = match &v {
        Value::Array(a) => (a, "$".to_string()),
        Value::Object(o) => (
            o.get("distribution")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("$.distribution", "missing or not an array"))?,
            "$.distribution".to_string(),
        ),
        _ => return Err(schema("$", "expected an array or an object").into()),
    };
    list.iter()
        .enumerate()
        .map(|(i, x)| {
            let here = format!("{base}[{i}]");
            match x {
                Value::Number(n) => n.as_f64().ok_or_else(|| schema(&here, "not a finite number").into()),
                Value::String(_) => Ok(to_f64(&rational_at(x, &here)?)),
                _ => Err(schema(&here, "expected a number or rational string").into()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> maxent_core::Result<ProblemFile> {
        problem_from_value(&serde_json::from_str(text).unwrap())
    }

    #[test]
    fn parses_examples() {
        let bin = parse(r#"{"m":2, "features":[[0,1]], "targets":["1/2"]}"#).unwrap();
        assert_eq!(bin.problem.d(), 1);
        let die = parse(r#"{"m":6, "features":[[1,2,3,4,5,6]], "targets":["9/2"], "names":["1","2","3","4","5","6"]}"#)
            .unwrap();
        assert_eq!(die.problem.targets().unwrap()[0], Rational::new(9.into(), 2.into()));
    }

    #[test]
    fn rejects_fractional_features() {
        let err = parse(r#"{"m":2, "features":[[0.5,1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Integrality(ref s) if s.contains("$.features[0][0]")), "{err}");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse(r#"{"m":2, "features":[[0,1]], "targets":[true]}"#).unwrap_err();
        assert!(err.to_string().contains("$.targets[0]"));
        let err = parse(r#"{"m":2, "features":[[0,1]], "target":["1/2"]}"#).unwrap_err();
        assert!(err.to_string().contains("$.target"));
        let err = parse(r#"{"m":2, "features":[[0,1]], "prior":["1/2","1/3"]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn round_trip() {
        for text in [
            r#"{"m":3, "features":[[0,1,2],[1,0,-1]], "targets":["2/3","-1/5"], "prior":["1/2","1/4","1/4"]}"#,
            r#"{"m":4, "features":[[0,1,2,3]], "samples":[1,2,2,4], "names":["a","b","c","d"]}"#,
        ] {
            let file = parse(text).unwrap();
            assert_eq!(problem_from_value(&problem_to_value(&file)).unwrap(), file);
        }
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = float(0.1);
        assert_eq!(v.to_string(), "1.0000000000000001e-1");
        assert_eq!(v.as_f64(), Some(0.1));
        assert_eq!(float(f64::NAN), Value::Null);
    }
}
