//! String specs for densities and group elements.
//!
//! Grammar: `name(key=value,...)`, where values are numbers, vectors
//! `[a,b,...]` or row-major matrices `[[..],[..]]`. Shape keys are `k`
//! (Weibull), `nu` (Student-t) and `d` (MVN); group keys are `l`, `s` and `P`.
//! The dimension is inferred from `l` or `P` when `d` is absent.
//!
//! ```
//! use lsdiv::registry::parse_density;
//! let p = parse_density("weibull(k=2,s=3)").unwrap();
//! assert_eq!(p.params_1d().unwrap(), (0.0, 3.0));
//! ```

use serde_json::Value;

use crate::density::{LocationScaleDensity, StandardDensity};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::SpdMatrix;

#[derive(Debug, Clone, PartialEq)]
enum Param {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

fn parse_value(key: &str, text: &str) -> Result<Param> {
    let v: Value = serde_json::from_str(text.trim())
        .map_err(|e| Error::parse(format!("value of '{key}' is not a number, vector or matrix: {e}")))?;
    let num = |v: &Value| v.as_f64().ok_or_else(|| Error::parse(format!("'{key}' has a non-numeric entry")));
    match &v {
        Value::Number(_) => Ok(Param::Scalar(num(&v)?)),
        Value::Array(items) if items.iter().all(|x| x.is_array()) && !items.is_empty() => {
            let rows = items
                .iter()
                .map(|r| r.as_array().into_iter().flatten().map(num).collect::<Result<Vec<f64>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(Param::Matrix(rows))
        }
        Value::Array(items) => Ok(Param::Vector(items.iter().map(num).collect::<Result<_>>()?)),
        _ => Err(Error::parse(format!("'{key}' must be a number, vector or matrix"))),
    }
}

/// Splits on commas outside brackets.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse(format!("unbalanced brackets in '{s}'")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(format!("unbalanced brackets in '{s}'")));
    }
    out.push(&s[start..]);
    Ok(out.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect())
}

fn parse_pairs(body: &str) -> Result<Vec<(String, Param)>> {
    split_top_level(body)?
        .into_iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got '{item}'")))?;
            let key = k.trim().to_string();
            let value = parse_value(&key, v)?;
            Ok((key, value))
        })
        .collect()
}

/// Splits `name(args)` into the lower-cased name and the argument body.
fn split_call(spec: &str) -> Result<(String, &str)> {
    let spec = spec.trim();
    match spec.find('(') {
        None => Ok((spec.to_ascii_lowercase(), "")),
        Some(open) => {
            let body = spec[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(format!("missing closing parenthesis in '{spec}'")))?;
            Ok((spec[..open].trim().to_ascii_lowercase(), body))
        }
    }
}

#[derive(Default)]
struct GroupParts {
    l: Option<Param>,
    s: Option<f64>,
    p: Option<Vec<Vec<f64>>>,
}

impl GroupParts {
    fn take(&mut self, key: &str, value: Param) -> Result<bool> {
        match (key, value) {
            ("l", v @ (Param::Scalar(_) | Param::Vector(_))) => self.l = Some(v),
            ("s", Param::Scalar(v)) => self.s = Some(v),
            ("P", Param::Matrix(m)) => self.p = Some(m),
            ("P", Param::Scalar(v)) => self.p = Some(vec![vec![v]]),
            ("l" | "s" | "P", _) => return Err(Error::parse(format!("'{key}' has the wrong shape"))),
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn inferred_dim(&self) -> Option<usize> {
        match (&self.l, &self.p) {
            (Some(Param::Vector(v)), _) => Some(v.len()),
            (_, Some(m)) => Some(m.len()),
            _ => None,
        }
    }

    fn build(self, d: usize) -> Result<GroupElement> {
        if self.s.is_some() && self.p.is_some() {
            return Err(Error::parse("give either s or P, not both"));
        }
        let location = match self.l {
            None => vec![0.0; d],
            Some(Param::Scalar(v)) => vec![v; d],
            Some(Param::Vector(v)) => v,
            Some(Param::Matrix(_)) => unreachable!("rejected in take"),
        };
        if location.len() != d {
            return Err(Error::parse(format!("l has length {} but d = {d}", location.len())));
        }
        let scale = match (self.s, self.p) {
            (Some(s), None) => {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::domain(format!("scale s must be positive, got {s}")));
                }
                SpdMatrix::scalar(s).and_then(|m| {
                    if d == 1 {
                        Ok(m)
                    } else {
                        SpdMatrix::from_diag(&vec![s; d])
                    }
                })?
            }
            (None, Some(rows)) => {
                if rows.len() != d {
                    return Err(Error::parse(format!("P is {}x{} but d = {d}", rows.len(), rows.len())));
                }
                SpdMatrix::from_rows(&rows)?
            }
            _ => SpdMatrix::identity(d),
        };
        GroupElement::new(location, scale)
    }
}

fn base_from(name: &str, shape: &[(String, f64)], d: Option<usize>) -> Result<StandardDensity> {
    let get = |key: &str| shape.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
    let need = |key: &str| get(key).ok_or_else(|| Error::parse(format!("{name} needs shape parameter '{key}'")));
    let base = match name {
        "normal" | "gaussian" => StandardDensity::Normal,
        "cauchy" => StandardDensity::Cauchy,
        "laplace" => StandardDensity::Laplace,
        "logistic" => StandardDensity::Logistic,
        "student" | "t" => StandardDensity::student(need("nu")?)?,
        "halfnormal" | "half_normal" => StandardDensity::HalfNormal,
        "exponential" | "exp" => StandardDensity::Exponential,
        "rayleigh" => StandardDensity::Rayleigh,
        "weibull" => StandardDensity::weibull(need("k")?)?,
        "uniform" => StandardDensity::Uniform,
        "mvn" => {
            let dim = match (get("d"), d) {
                (Some(v), _) if v >= 1.0 && v.fract() == 0.0 => v as usize,
                (Some(v), _) => return Err(Error::parse(format!("d must be a positive integer, got {v}"))),
                (None, Some(d)) => d,
                (None, None) => return Err(Error::parse("mvn needs d, l or P to fix the dimension")),
            };
            StandardDensity::mvn(dim)?
        }
        other => return Err(Error::parse(format!("unknown family '{other}'"))),
    };
    let allowed: &[&str] = match base {
        StandardDensity::StudentT { .. } => &["nu"],
        StandardDensity::Weibull { .. } => &["k"],
        StandardDensity::Mvn { .. } => &["d"],
        _ => &[],
    };
    if let Some((k, _)) = shape.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::parse(format!("unknown parameter '{k}' for {name}")));
    }
    Ok(base)
}

fn parse_parts(spec: &str) -> Result<(StandardDensity, GroupParts)> {
    let (name, body) = split_call(spec)?;
    let mut parts = GroupParts::default();
    let mut shape = Vec::new();
    for (key, value) in parse_pairs(body)? {
        if parts.take(&key, value.clone())? {
            continue;
        }
        match value {
            Param::Scalar(v) => shape.push((key, v)),
            _ => return Err(Error::parse(format!("shape parameter '{key}' must be a number"))),
        }
    }
    let base = base_from(&name, &shape, parts.inferred_dim())?;
    if let Some(d) = parts.inferred_dim() {
        if d != base.dim() {
            return Err(Error::parse(format!("{base} has d={} but the parameters have d={d}", base.dim())));
        }
    }
    Ok((base, parts))
}

/// Parses a density spec such as `normal(l=0,s=2)` or `mvn(l=[0,1],P=[[2,0],[0,1]])`.
pub fn parse_density(spec: &str) -> Result<LocationScaleDensity> {
    let (base, parts) = parse_parts(spec)?;
    let g = parts.build(base.dim())?;
    LocationScaleDensity::new(base, g)
}

/// Parses a standard density spec such as `weibull(k=2)`; group keys are
/// rejected.
pub fn parse_base(spec: &str) -> Result<StandardDensity> {
    let (base, parts) = parse_parts(spec)?;
    if parts.l.is_some() || parts.s.is_some() || parts.p.is_some() {
        return Err(Error::parse(format!("'{spec}' names a family; drop l, s and P")));
    }
    Ok(base)
}

/// Parses a group element `l=1,s=2` or `l=[1,2],P=[[..],[..]]`.
pub fn parse_group(spec: &str) -> Result<GroupElement> {
    let spec = spec.trim();
    let body = spec.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(spec);
    let mut parts = GroupParts::default();
    for (key, value) in parse_pairs(body)? {
        if !parts.take(&key, value)? {
            return Err(Error::parse(format!("unknown group parameter '{key}'")));
        }
    }
    let d = parts.inferred_dim().unwrap_or(1);
    parts.build(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_specs() {
        let p = parse_density("normal(l=1,s=2)").unwrap();
        assert_eq!(p.params_1d().unwrap(), (1.0, 2.0));
        let p = parse_density("normal").unwrap();
        assert_eq!(p.params_1d().unwrap(), (0.0, 1.0));
        assert_eq!(parse_density("student(nu=3)").unwrap().base(), &StandardDensity::StudentT { nu: 3.0 });
        assert_eq!(parse_density(" Weibull( k = 1.5 , s=2 ) ").unwrap().params_1d().unwrap(), (0.0, 2.0));
    }

    #[test]
    fn multivariate_specs() {
        let p = parse_density("mvn(l=[1,2],P=[[2,0.5],[0.5,1]])").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.group_element().location(), &[1.0, 2.0]);
        assert_eq!(parse_density("mvn(d=3)").unwrap().dim(), 3);
        assert!(parse_density("mvn(d=2,l=[1,2,3])").is_err());
        assert!(parse_density("mvn(P=[[1,2],[0,1]])").is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_density("banana"), Err(Error::Parse(_))));
        assert!(matches!(parse_density("weibull(s=2)"), Err(Error::Parse(_))));
        assert!(matches!(parse_density("normal(q=2)"), Err(Error::Parse(_))));
        assert!(matches!(parse_density("normal(s=-1)"), Err(Error::Domain(_))));
        assert!(matches!(parse_density("exponential(l=1)"), Err(Error::Domain(_))));
        assert!(matches!(parse_density("normal(l=[1,2"), Err(Error::Parse(_))));
        assert!(parse_base("normal(l=1)").is_err());
    }

    #[test]
    fn group_specs() {
        let g = parse_group("l=1,s=2").unwrap();
        assert_eq!(g.as_univariate().unwrap(), (1.0, 2.0));
        let g = parse_group("l=[1,2],P=[[1,0],[0,3]]").unwrap();
        assert_eq!(g.dim(), 2);
        assert!(parse_group("l=1,x=2").is_err());
    }
}
