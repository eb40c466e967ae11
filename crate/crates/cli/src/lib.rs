//! `hedgehog <command> [--input FILE] [--search-bound N] [--factor-bound N]`
//!
//! Reads one JSON payload, runs one engine operation and prints one JSON
//! response `{"status", "result", "citations"}`. Exit codes: 0 ok, 1 unknown, 2 error.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};

use hedgehog_core::exactnum::{set_factor_bound, DEFAULT_FACTOR_BOUND};
use hedgehog_core::fields::level;
use hedgehog_core::gwring::{
    euler_characteristic, gw_equal, ideal_membership_report, invariants_of, quotient_by_even_ideal,
    scharlau_transfer, GWElem,
};
use hedgehog_core::hedgehog::{
    decide_section_with, section_isotropic, section_odd, sphere_decision, tags, verify_section,
    DecideOptions, Verdict,
};
use hedgehog_core::quadform::{
    find_isotropic_vector, is_isotropic, represented_classes, represents, value_group,
    value_group_squared,
};
use hedgehog_core::wire::{self, WireError, WireResult};
use hedgehog_core::{Decision, Error, FieldDescriptor};

#[derive(Debug, Parser)]
#[command(name = "hedgehog", version, about = "Exact decisions for tangent vector fields on affine quadrics")]
pub struct Cli {
    pub command: Command,
    /// Read the JSON payload from this file instead of stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Height bound for isotropic-vector searches.
    #[arg(long, default_value_t = 1000)]
    pub search_bound: u64,
    /// Trial-division bound for integer factorization.
    #[arg(long, default_value_t = DEFAULT_FACTOR_BOUND)]
    pub factor_bound: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Decide,
    Sphere,
    Section,
    Verify,
    Isotropy,
    Represent,
    Invariants,
    Transfer,
    Euler,
    Level,
    Ideal,
    Quotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Unknown,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Unknown => 1,
            Status::Error => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unknown => "unknown",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: Status,
    pub result: Value,
    pub citations: Vec<String>,
}

impl Response {
    fn ok(result: Value) -> Self {
        Response {
            status: Status::Ok,
            result,
            citations: Vec::new(),
        }
    }

    fn error(e: &WireError) -> Self {
        let mut result = json!({"kind": e.kind(), "message": e.to_string()});
        if let Some(p) = e.path() {
            result["path"] = json!(p);
        }
        Response {
            status: Status::Error,
            result,
            citations: Vec::new(),
        }
    }

    fn decision(d: &Decision) -> Self {
        Response {
            status: if d.verdict == Verdict::Unknown {
                Status::Unknown
            } else {
                Status::Ok
            },
            result: wire::decision_json(d),
            citations: d.citations.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "result": self.result,
            "citations": self.citations,
        })
    }

    /// Pretty-printed JSON plus a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values always serialize");
        s.push('\n');
        s
    }
}

/// Parses `argv` (program name first), reads the payload and executes it.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (e.to_string(), 0);
            }
            let r = Response {
                status: Status::Error,
                result: json!({"kind": "UsageError", "message": e.to_string().trim_end()}),
                citations: Vec::new(),
            };
            return (r.render(), 2);
        }
    };
    let response = match read_payload(&cli, stdin) {
        Ok(payload) => execute(&cli, &payload),
        Err(e) => Response::error(&e),
    };
    (response.render(), response.status.exit_code())
}

fn read_payload(cli: &Cli, stdin: &mut dyn Read) -> WireResult<Value> {
    let io_error = |m: String| WireError::Schema {
        path: "$".into(),
        message: m,
    };
    let text = match &cli.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| io_error(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| io_error(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| io_error(format!("invalid JSON: {e}")))
}

/// Runs one command on an already-parsed payload.
pub fn execute(cli: &Cli, payload: &Value) -> Response {
    set_factor_bound(cli.factor_bound);
    let options = DecideOptions {
        search_bound: cli.search_bound,
        ..DecideOptions::default()
    };
    let out = match cli.command {
        Command::Decide => cmd_decide(payload, &options),
        Command::Sphere => cmd_sphere(payload),
        Command::Section => cmd_section(payload, cli.search_bound),
        Command::Verify => cmd_verify(payload),
        Command::Isotropy => cmd_isotropy(payload, cli.search_bound),
        Command::Represent => cmd_represent(payload),
        Command::Invariants => cmd_invariants(payload),
        Command::Transfer => cmd_transfer(payload),
        Command::Euler => cmd_euler(payload),
        Command::Level => cmd_level(payload),
        Command::Ideal => cmd_ideal(payload),
        Command::Quotient => cmd_quotient(payload),
    };
    out.unwrap_or_else(|e| Response::error(&e))
}

fn obj(v: &Value) -> WireResult<&Map<String, Value>> {
    v.as_object().ok_or_else(|| WireError::Schema {
        path: "$".into(),
        message: "expected an object".into(),
    })
}

fn field_of(v: &Value) -> WireResult<FieldDescriptor> {
    let field = obj(v)?.get("field").ok_or_else(|| WireError::Schema {
        path: "$.field".into(),
        message: "missing field".into(),
    })?;
    wire::parse_field(field, "$.field")
}

fn required<'a>(v: &'a Value, key: &str) -> WireResult<&'a Value> {
    obj(v)?.get(key).ok_or_else(|| WireError::Schema {
        path: format!("$.{key}"),
        message: "missing field".into(),
    })
}

fn positive(v: &Value, key: &str) -> WireResult<usize> {
    required(v, key)?
        .as_u64()
        .filter(|&n| n >= 1)
        .map(|n| n as usize)
        .ok_or_else(|| WireError::Schema {
            path: format!("$.{key}"),
            message: "expected a positive integer".into(),
        })
}

/// Adds `"equal"` when the payload carries a `"compare"` element.
fn compare(v: &Value, k: FieldDescriptor, x: &GWElem, result: &mut Value) -> WireResult<()> {
    if let Some(c) = obj(v)?.get("compare") {
        let other = wire::parse_gw(k, c, "$.compare")?;
        result["equal"] = json!(gw_equal(x, &other)?);
    }
    Ok(())
}

fn cmd_decide(v: &Value, options: &DecideOptions) -> WireResult<Response> {
    let p = wire::parse_problem(v)?;
    Ok(Response::decision(&decide_section_with(&p, options)?))
}

fn cmd_sphere(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let n = positive(v, "n")?;
    Ok(Response::decision(&sphere_decision(k, n)?))
}

fn cmd_section(v: &Value, bound: u64) -> WireResult<Response> {
    let p = wire::parse_problem(v)?;
    let (cert, tag) = if p.n() % 2 == 1 {
        (section_odd(p.field, &p.coeffs)?, tags::ODD_PAIRING)
    } else {
        (section_isotropic(&p, bound)?, tags::ISOTROPIC_SPLIT)
    };
    let mut r = Response::ok(json!({"certificate": wire::certificate_json(&cert)}));
    r.citations.push(tag.to_string());
    Ok(r)
}

fn cmd_verify(v: &Value) -> WireResult<Response> {
    let p = wire::parse_problem(v)?;
    let cert = wire::parse_certificate(p.field, required(v, "certificate")?, "$.certificate")?;
    Ok(Response::ok(json!({"valid": verify_section(&p, &cert)?})))
}

fn cmd_isotropy(v: &Value, bound: u64) -> WireResult<Response> {
    let q = wire::parse_form(v)?;
    let iso = is_isotropic(&q)?;
    let mut result = json!({"isotropic": iso, "vector": null});
    if iso {
        match find_isotropic_vector(&q, bound) {
            Ok(x) => result["vector"] = wire::elems_json(&x),
            Err(Error::SearchExhausted { bound }) => {
                result["note"] = json!(format!("no isotropic vector of height <= {bound} over the rationals"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Response::ok(result))
}

fn cmd_represent(v: &Value) -> WireResult<Response> {
    let q = wire::parse_form(v)?;
    let k = q.field;
    let mut result = json!({});
    let value = obj(v)?.get("value");
    if let Some(c) = value {
        let c = wire::parse_elem(k, c, "$.value")?;
        result["value"] = wire::elem_json(&c);
        result["represents"] = json!(represents(&q, &c)?);
    }
    if k.has_finite_square_classes() {
        result["represented_classes"] = json!(represented_classes(&q)?
            .iter()
            .map(wire::square_class_json)
            .collect::<Vec<_>>());
        result["value_group"] = wire::value_group_json(&value_group(&q)?);
        result["value_group_squared"] = wire::value_group_json(&value_group_squared(&q)?);
    } else if value.is_none() {
        return Err(WireError::Schema {
            path: "$.value".into(),
            message: format!("required over {k}, whose square-class group is infinite"),
        });
    }
    Ok(Response::ok(result))
}

fn cmd_invariants(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let x = match obj(v)?.get("element") {
        Some(e) => wire::parse_gw(k, e, "$.element")?,
        None => GWElem::from_diagonal(&wire::parse_form(v)?),
    };
    let mut result = wire::invariants_json(&invariants_of(&x)?);
    compare(v, k, &x, &mut result)?;
    Ok(Response::ok(result))
}

fn cmd_transfer(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let ext = wire::parse_extension(k, required(v, "extension")?, "$.extension")?;
    let x = wire::parse_ext_gw(k, required(v, "element")?, "$.element")?;
    let t = scharlau_transfer(&ext, &x)?;
    let mut result = json!({"transfer": wire::gw_json(&t), "rank": t.rank()});
    compare(v, k, &t, &mut result)?;
    Ok(Response::ok(result))
}

fn cmd_euler(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let n = positive(v, "n")?;
    let a = wire::parse_elems(k, required(v, "coefficients")?, "$.coefficients")?;
    let chi = euler_characteristic(k, n, &a)?;
    let mut result = json!({"euler": wire::gw_json(&chi), "rank": chi.rank()});
    compare(v, k, &chi, &mut result)?;
    Ok(Response::ok(result))
}

fn cmd_level(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    Ok(Response::ok(json!({"field": wire::field_json(k), "level": wire::level_json(level(k))})))
}

fn cmd_ideal(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let target = wire::parse_gw(k, required(v, "target")?, "$.target")?;
    let gens = wire::parse_gw_list(k, required(v, "generators")?, "$.generators")?;
    Ok(Response::ok(wire::membership_json(&ideal_membership_report(&target, &gens)?)))
}

fn cmd_quotient(v: &Value) -> WireResult<Response> {
    let k = field_of(v)?;
    let gens = wire::parse_gw_list(k, required(v, "generators")?, "$.generators")?;
    Ok(Response::ok(wire::quotient_json(&quotient_by_even_ideal(k, &gens)?)))
}
