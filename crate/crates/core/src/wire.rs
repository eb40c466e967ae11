//! JSON encoding of problems, forms, GW elements and results.
//!
//! Rationals travel as `"num/den"` strings (or bare integers); elements of
//! ℚ(√d) and of quadratic extensions as `[u, v]` pairs meaning `u + v√·`.
//! Every decoding error names the JSON path of the offending value.

use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::exactnum::{format_rat, parse_rat, Rat};
use crate::fields::{FieldDescriptor, FieldElem, Level, SquareClass};
use crate::gwring::{
    ExtElem, ExtGWElem, Functional, GWElem, GWInvariants, MembershipReport, QuadExtension,
    QuotientReport,
};
use crate::hedgehog::{Decision, LinearPoly, Obstruction, QuadricProblem, SectionCertificate};
use crate::linalg::Matrix;
use crate::quadform::{DiagonalForm, ValueGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Engine(#[from] Error),
}

impl WireError {
    pub fn kind(&self) -> &'static str {
        match self {
            WireError::Schema { .. } => "SchemaError",
            WireError::Engine(e) => e.kind(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            WireError::Schema { path, .. } => Some(path),
            WireError::Engine(_) => None,
        }
    }
}

pub type WireResult<T> = std::result::Result<T, WireError>;

fn schema(path: &str, message: impl Into<String>) -> WireError {
    WireError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Attaches `path` to element-level engine errors raised while decoding.
fn at<T>(path: &str, r: crate::error::Result<T>) -> WireResult<T> {
    r.map_err(|e| match e {
        Error::InvalidElement(m) | Error::InvalidField(m) => schema(path, m),
        Error::FieldMismatch => schema(path, "element does not belong to the field"),
        other => WireError::Engine(other),
    })
}

fn object<'a>(v: &'a Value, path: &str) -> WireResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn member<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> WireResult<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn array<'a>(v: &'a Value, path: &str) -> WireResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn unsigned(v: &Value, path: &str) -> WireResult<u64> {
    v.as_u64().ok_or_else(|| schema(path, "expected a non-negative integer"))
}

pub fn parse_rational(v: &Value, path: &str) -> WireResult<Rat> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|_| schema(path, format!("not a rational literal: {s:?}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(crate::exactnum::int(i)),
            None => Err(schema(path, "numbers must be integers; write fractions as \"num/den\"")),
        },
        _ => Err(schema(path, "expected a rational as a string or integer")),
    }
}

pub fn parse_field(v: &Value, path: &str) -> WireResult<FieldDescriptor> {
    let obj = object(v, path)?;
    let kind = member(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| schema(&format!("{path}.kind"), "expected a string"))?;
    let k = match kind {
        "rationals" => FieldDescriptor::Rationals,
        "reals" => FieldDescriptor::Reals,
        "qbar" => FieldDescriptor::QuadraticallyClosed,
        "fp" => FieldDescriptor::FinitePrime(unsigned(member(obj, "p", path)?, &format!("{path}.p"))?),
        "padic" => FieldDescriptor::PAdic(unsigned(member(obj, "p", path)?, &format!("{path}.p"))?),
        "realquad" => {
            let d = member(obj, "d", path)?
                .as_i64()
                .ok_or_else(|| schema(&format!("{path}.d"), "expected an integer"))?;
            FieldDescriptor::RealQuadratic(d)
        }
        other => {
            return Err(schema(
                &format!("{path}.kind"),
                format!("unknown field kind {other:?}; expected rationals, reals, qbar, fp, padic or realquad"),
            ))
        }
    };
    at(path, k.validate())
}

pub fn parse_elem(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<FieldElem> {
    if let (FieldDescriptor::RealQuadratic(_), Value::Array(pair)) = (k, v) {
        if pair.len() != 2 {
            return Err(schema(path, "expected a pair [u, v] meaning u + v*sqrt(d)"));
        }
        let u = parse_rational(&pair[0], &format!("{path}[0]"))?;
        let w = parse_rational(&pair[1], &format!("{path}[1]"))?;
        return Ok(FieldElem::Quad(u, w));
    }
    let r = parse_rational(v, path)?;
    at(path, k.from_rat(&r))
}

pub fn parse_elems(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<Vec<FieldElem>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_elem(k, x, &format!("{path}[{i}]")))
        .collect()
}

fn nonzero_elems(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<Vec<FieldElem>> {
    let xs = parse_elems(k, v, path)?;
    for (i, x) in xs.iter().enumerate() {
        if k.is_zero(x) {
            return Err(schema(&format!("{path}[{i}]"), "coefficient must be nonzero in the field"));
        }
    }
    Ok(xs)
}

/// `{"field": …, "coefficients": […], "point"?: […]}`.
pub fn parse_problem(v: &Value) -> WireResult<QuadricProblem> {
    let obj = object(v, "$")?;
    let k = parse_field(member(obj, "field", "$")?, "$.field")?;
    let coeffs = nonzero_elems(k, member(obj, "coefficients", "$")?, "$.coefficients")?;
    if coeffs.len() < 2 {
        return Err(schema("$.coefficients", "need at least two coefficients (n >= 1)"));
    }
    let point = match obj.get("point") {
        None | Some(Value::Null) => None,
        Some(p) => {
            let x = parse_elems(k, p, "$.point")?;
            if x.len() != coeffs.len() {
                return Err(schema("$.point", format!("expected {} coordinates", coeffs.len())));
            }
            Some(x)
        }
    };
    Ok(QuadricProblem::new(k, coeffs, point)?)
}

/// `{"field": …, "coefficients": […]}`.
pub fn parse_form(v: &Value) -> WireResult<DiagonalForm> {
    let obj = object(v, "$")?;
    let k = parse_field(member(obj, "field", "$")?, "$.field")?;
    let coeffs = nonzero_elems(k, member(obj, "coefficients", "$")?, "$.coefficients")?;
    if coeffs.is_empty() {
        return Err(schema("$.coefficients", "need at least one coefficient"));
    }
    Ok(DiagonalForm::new(k, coeffs)?)
}

/// `{"plus": […], "minus"?: […]}`.
pub fn parse_gw(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<GWElem> {
    let obj = object(v, path)?;
    let plus = nonzero_elems(k, member(obj, "plus", path)?, &format!("{path}.plus"))?;
    let minus = match obj.get("minus") {
        None | Some(Value::Null) => Vec::new(),
        Some(m) => nonzero_elems(k, m, &format!("{path}.minus"))?,
    };
    Ok(GWElem::new(k, plus, minus)?)
}

pub fn parse_gw_list(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<Vec<GWElem>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, g)| parse_gw(k, g, &format!("{path}[{i}]")))
        .collect()
}

/// `{"alpha": …, "functional"?: "trace" | "s_one"}` over `k`.
pub fn parse_extension(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<QuadExtension> {
    let obj = object(v, path)?;
    let alpha = parse_elem(k, member(obj, "alpha", path)?, &format!("{path}.alpha"))?;
    let functional = match obj.get("functional").map(Value::as_str) {
        None | Some(Some("trace")) => Functional::FieldTrace,
        Some(Some("s_one")) => Functional::SOne,
        Some(_) => return Err(schema(&format!("{path}.functional"), "expected \"trace\" or \"s_one\"")),
    };
    Ok(QuadExtension::new(k, alpha, functional)?)
}

fn parse_ext_elem(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<ExtElem> {
    let pair = array(v, path)?;
    if pair.len() != 2 {
        return Err(schema(path, "expected a pair [u, v] meaning u + v*sqrt(alpha)"));
    }
    Ok(ExtElem(
        parse_elem(k, &pair[0], &format!("{path}[0]"))?,
        parse_elem(k, &pair[1], &format!("{path}[1]"))?,
    ))
}

/// `{"plus": [[u,v], …], "minus"?: […]}` in GW of the extension.
pub fn parse_ext_gw(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<ExtGWElem> {
    let obj = object(v, path)?;
    let side = |key: &str| -> WireResult<Vec<ExtElem>> {
        match obj.get(key) {
            None | Some(Value::Null) if key == "minus" => Ok(Vec::new()),
            None => Err(schema(&format!("{path}.{key}"), "missing field")),
            Some(xs) => array(xs, &format!("{path}.{key}"))?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let p = format!("{path}.{key}[{i}]");
                    let e = parse_ext_elem(k, x, &p)?;
                    if k.is_zero(&e.0) && k.is_zero(&e.1) {
                        return Err(schema(&p, "entry must be nonzero"));
                    }
                    Ok(e)
                })
                .collect(),
        }
    };
    Ok(ExtGWElem {
        plus: side("plus")?,
        minus: side("minus")?,
    })
}

/// `{"entries": [{"constant"?: c, "linear": […], "quadratic"?: …}], "basis_change"?: [[…]]}`.
///
/// A present, nonzero `quadratic` part is rejected with `DegreeTooHigh`.
pub fn parse_certificate(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<SectionCertificate> {
    let obj = object(v, path)?;
    let entries_path = format!("{path}.entries");
    let mut entries = Vec::new();
    for (i, e) in array(member(obj, "entries", path)?, &entries_path)?.iter().enumerate() {
        let p = format!("{entries_path}[{i}]");
        let eo = object(e, &p)?;
        if let Some(quad) = eo.get("quadratic") {
            if !quadratic_part_is_zero(k, quad, &format!("{p}.quadratic"))? {
                return Err(WireError::Engine(Error::DegreeTooHigh));
            }
        }
        let constant = match eo.get("constant") {
            None => k.zero(),
            Some(c) => parse_elem(k, c, &format!("{p}.constant"))?,
        };
        let linear = parse_elems(k, member(eo, "linear", &p)?, &format!("{p}.linear"))?;
        entries.push(LinearPoly { constant, linear });
    }
    let basis_change = match obj.get("basis_change") {
        None | Some(Value::Null) => None,
        Some(m) => Some(parse_matrix(k, m, &format!("{path}.basis_change"))?),
    };
    Ok(SectionCertificate {
        entries,
        basis_change,
    })
}

fn quadratic_part_is_zero(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<bool> {
    match v {
        Value::Null => Ok(true),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if !quadratic_part_is_zero(k, x, &format!("{path}[{i}]"))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        other => Ok(k.is_zero(&parse_elem(k, other, path)?)),
    }
}

pub fn parse_matrix(k: FieldDescriptor, v: &Value, path: &str) -> WireResult<Matrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| parse_elems(k, r, &format!("{path}[{i}]")))
        .collect::<WireResult<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(schema(path, "matrix has no rows"));
    }
    at(path, Matrix::from_rows(rows)).map_err(|e| match e {
        WireError::Engine(Error::DimensionMismatch(m)) => schema(path, m),
        other => other,
    })
}

pub fn field_json(k: FieldDescriptor) -> Value {
    match k {
        FieldDescriptor::Rationals => json!({"kind": "rationals"}),
        FieldDescriptor::Reals => json!({"kind": "reals"}),
        FieldDescriptor::QuadraticallyClosed => json!({"kind": "qbar"}),
        FieldDescriptor::FinitePrime(p) => json!({"kind": "fp", "p": p}),
        FieldDescriptor::PAdic(p) => json!({"kind": "padic", "p": p}),
        FieldDescriptor::RealQuadratic(d) => json!({"kind": "realquad", "d": d}),
    }
}

pub fn elem_json(x: &FieldElem) -> Value {
    match x {
        FieldElem::Rat(r) => Value::String(format_rat(r)),
        FieldElem::Residue(r) => Value::String(r.to_string()),
        FieldElem::Quad(u, v) => json!([format_rat(u), format_rat(v)]),
    }
}

pub fn elems_json(xs: &[FieldElem]) -> Value {
    Value::Array(xs.iter().map(elem_json).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| elems_json(m.row(i))).collect())
}

pub fn gw_json(x: &GWElem) -> Value {
    json!({"plus": elems_json(&x.plus), "minus": elems_json(&x.minus)})
}

pub fn square_class_json(c: &SquareClass) -> Value {
    Value::String(c.rep.to_string())
}

pub fn value_group_json(g: &ValueGroup) -> Value {
    Value::Array(g.members.iter().map(square_class_json).collect())
}

pub fn level_json(s: Level) -> Value {
    match s {
        Level::Finite(n) => json!(n),
        Level::Infinite => json!("infinite"),
    }
}

pub fn certificate_json(c: &SectionCertificate) -> Value {
    let entries: Vec<Value> = c
        .entries
        .iter()
        .map(|e| json!({"constant": elem_json(&e.constant), "linear": elems_json(&e.linear)}))
        .collect();
    let mut out = json!({"entries": entries});
    if let Some(p) = &c.basis_change {
        out["basis_change"] = matrix_json(p);
    }
    out
}

pub fn obstruction_json(o: &Obstruction) -> Value {
    match o {
        Obstruction::AllEmbeddingsPositive => json!({"kind": "AllEmbeddingsPositive"}),
        Obstruction::LevelTooLarge { level, bound } => {
            json!({"kind": "LevelTooLarge", "level": level_json(*level), "bound": bound})
        }
        Obstruction::NecessaryConditionFails => json!({"kind": "NecessaryConditionFails"}),
    }
}

pub fn decision_json(d: &Decision) -> Value {
    json!({
        "verdict": d.verdict.to_string(),
        "certificate": d.certificate.as_ref().map(certificate_json),
        "obstruction": d.obstruction.as_ref().map(obstruction_json),
        "diagnostics": d.diagnostics,
    })
}

pub fn invariants_json(inv: &GWInvariants) -> Value {
    let hasse: Map<String, Value> = inv
        .hasse
        .iter()
        .map(|(place, s)| (place.to_string(), json!(s)))
        .collect();
    json!({
        "rank": inv.rank,
        "disc": inv.disc.as_ref().map(square_class_json),
        "signed_disc": inv.signed_disc.as_ref().map(square_class_json),
        "hasse": hasse,
        "signature": inv.signature,
    })
}

pub fn membership_json(r: &MembershipReport) -> Value {
    json!({
        "member": r.member,
        "rank_gcd": r.rank_gcd,
        "kernel_size": r.kernel_size,
        "iterations": r.iterations,
        "iteration_bound": r.iteration_bound,
    })
}

pub fn quotient_json(r: &QuotientReport) -> Value {
    match r {
        QuotientReport::CyclicOfOrderTwo => json!({"iso": "Z/2"}),
        QuotientReport::Summary {
            all_generators_even,
            contains_even_ideal,
            rank_gcd,
            kernel_size,
            witt_order,
        } => json!({
            "iso": "summary",
            "all_generators_even": all_generators_even,
            "contains_even_ideal": contains_even_ideal,
            "rank_gcd": rank_gcd,
            "kernel_size": kernel_size,
            "witt_order": witt_order,
        }),
    }
}
