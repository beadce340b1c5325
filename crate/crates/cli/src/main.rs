use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lsdiv::divergence::{canonical_reduce, divergence, DivergenceOptions, MethodChoice};
use lsdiv::fisher::{fisher_constants, fisher_rao_distance, FisherMetric};
use lsdiv::mc::McConfig;
use lsdiv::projection::{project_left, project_right, Family, FamilyMode, ProjectionOptions, ProjectionResult};
use lsdiv::registry::{parse_base, parse_density, parse_group};
use lsdiv::{selftest, Error, FGenerator, GroupElement, StandardDensity, Support};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "lsdiv", version, about = "f-divergences, projections and Fisher-Rao distances for location-scale families")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Compute or estimate I_f(p:q).
    Divergence(DivergenceArgs),
    /// Project a density onto a family.
    Project(ProjectArgs),
    /// Fisher constants and Fisher-Rao distances.
    Fisher(FisherArgs),
    /// Location-scale group algebra.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Recompute the reference-value table.
    Selftest,
}

#[derive(Args)]
struct McArgs {
    /// Monte Carlo sample size.
    #[arg(long, default_value_t = 200_000)]
    m: usize,
    #[arg(long, env = "LSDIV_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    partitions: usize,
}

impl McArgs {
    fn config(&self) -> Result<McConfig, Error> {
        if self.m == 0 || self.partitions == 0 {
            return Err(Error::Parse("--m and --partitions must be at least 1".into()));
        }
        Ok(McConfig { m: self.m, seed: self.seed, partitions: self.partitions })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Quadrature,
    Mc,
}

#[derive(Args)]
struct DivergenceArgs {
    /// Generator: kl, reverse_kl, hellinger2, chi2, tv or alpha(a=x).
    #[arg(long, default_value = "kl")]
    f: String,
    /// First density, e.g. "normal(l=0,s=1)".
    #[arg(long)]
    p: String,
    /// Second density.
    #[arg(long)]
    q: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = lsdiv::divergence::QUADRATURE_TOL)]
    tol: f64,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Scale,
    Location,
    LocationScale,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    side: SideArg,
    #[arg(long, default_value = "kl")]
    f: String,
    /// Fixed first argument (right side).
    #[arg(long, required_if_eq("side", "right"))]
    p: Option<String>,
    /// Family of second arguments (right side), e.g. "exponential".
    #[arg(long, required_if_eq("side", "right"))]
    q_family: Option<String>,
    /// Family of first arguments (left side).
    #[arg(long, required_if_eq("side", "left"))]
    p_family: Option<String>,
    /// Fixed second argument (left side).
    #[arg(long, required_if_eq("side", "left"))]
    q: Option<String>,
    /// Defaults to scale for half-line families and location-scale otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Fixed scale for location families.
    #[arg(long, default_value_t = 1.0)]
    family_scale: f64,
    #[arg(long, default_value_t = lsdiv::projection::OBJECTIVE_QUADRATURE_TOL)]
    tol: f64,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Args)]
struct FisherArgs {
    /// Standard density, e.g. "cauchy" or "student(nu=3)".
    #[arg(long)]
    family: String,
    /// Print the Fisher constants (default when no distance is asked).
    #[arg(long)]
    constants: bool,
    /// First point, "l=..,s=..".
    #[arg(long, requires = "to")]
    from: Option<String>,
    /// Second point.
    #[arg(long, requires = "from")]
    to: Option<String>,
}

#[derive(Subcommand)]
enum GroupOp {
    /// g1·g2
    Compose {
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
    },
    Inverse {
        #[arg(long)]
        g: String,
    },
    /// Block matrix [[P, l], [0, 1]].
    Matrix {
        #[arg(long)]
        g: String,
    },
}

fn num(v: f64) -> Value {
    if v.is_infinite() {
        Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(v)
    }
}

fn group_json(g: &GroupElement) -> Value {
    match g.as_univariate() {
        Ok((l, s)) => json!({ "l": num(l), "s": num(s) }),
        Err(_) => json!({
            "l": g.location().iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "P": g.scale().rows().iter().map(|r| r.iter().map(|&v| num(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

fn metric_json(m: &FisherMetric) -> Value {
    json!({
        "a2": num(m.a2),
        "b2": num(m.b2),
        "c": num(m.c),
        "curvature": num(m.curvature),
        "even_density": m.even_density,
    })
}

fn projection_json(r: &ProjectionResult) -> Value {
    json!({
        "side": r.side.name(),
        "argmin": group_json(&r.argmin),
        "min_value": num(r.min_value),
        "diverged": r.min_value == f64::INFINITY,
        "method": r.method.to_string(),
        "attained": r.attained,
        "feasible": r.feasible,
        "stationarity": r.stationarity.map(num),
        "solver": {
            "name": r.trace.solver,
            "iterations": r.trace.iterations,
            "evaluations": r.trace.evaluations,
            "final_step": num(r.trace.final_step),
            "restarts": r.trace.restarts,
        },
    })
}

fn cmd_divergence(a: &DivergenceArgs) -> Result<Value, Error> {
    let f = FGenerator::by_name(&a.f)?;
    let p = parse_density(&a.p)?;
    let q = parse_density(&a.q)?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Error::Parse("--tol must be positive".into()));
    }
    let method = match a.method {
        MethodArg::Auto => MethodChoice::Auto,
        MethodArg::Closed => MethodChoice::Closed,
        MethodArg::Quadrature => MethodChoice::Quadrature,
        MethodArg::Mc => MethodChoice::MonteCarlo,
    };
    let opts = DivergenceOptions { method, quadrature_tol: a.tol, mc: a.mc.config()? };
    let v = divergence(&p, &q, &f, &opts)?;
    let reduced = canonical_reduce(p.group_element(), q.group_element())?;
    let mut out = json!({
        "command": "divergence",
        "generator": f.name(),
        "p": a.p,
        "q": a.q,
        "value": num(v.value),
        "diverged": v.diverged(),
        "method": v.method.to_string(),
        "reduced": group_json(&reduced),
    });
    if let Some(se) = v.stderr {
        out["stderr"] = num(se);
        out["m"] = json!(opts.mc.m);
        out["seed"] = json!(opts.mc.seed);
    }
    Ok(out)
}

fn family_from(spec: &str, mode: Option<ModeArg>, family_scale: f64) -> Result<Family, Error> {
    let base: StandardDensity = parse_base(spec)?;
    let mode = match mode {
        Some(ModeArg::Scale) => FamilyMode::Scale,
        Some(ModeArg::Location) => FamilyMode::Location,
        Some(ModeArg::LocationScale) => FamilyMode::LocationScale,
        None if base.support() == Support::Full => FamilyMode::LocationScale,
        None => FamilyMode::Scale,
    };
    let d = base.dim();
    let anchor = if mode == FamilyMode::Location {
        GroupElement::new(vec![0.0; d], lsdiv::SpdMatrix::from_diag(&vec![family_scale; d])?)?
    } else {
        GroupElement::identity(d)
    };
    Family::new(base, mode, anchor)
}

fn cmd_project(a: &ProjectArgs) -> Result<Value, Error> {
    let f = FGenerator::by_name(&a.f)?;
    let opts = ProjectionOptions { quadrature_tol: a.tol, mc: a.mc.config()?, ..ProjectionOptions::default() };
    let missing = |flag: &str| Error::Parse(format!("{flag} is required for this side"));
    let r = match a.side {
        SideArg::Right => {
            let p = parse_density(a.p.as_deref().ok_or_else(|| missing("--p"))?)?;
            let fam = family_from(a.q_family.as_deref().ok_or_else(|| missing("--q-family"))?, a.mode, a.family_scale)?;
            project_right(&p, &fam, &f, &opts)?
        }
        SideArg::Left => {
            let q = parse_density(a.q.as_deref().ok_or_else(|| missing("--q"))?)?;
            let fam = family_from(a.p_family.as_deref().ok_or_else(|| missing("--p-family"))?, a.mode, a.family_scale)?;
            project_left(&fam, &q, &f, &opts)?
        }
    };
    let mut out = json!({ "command": "project", "generator": f.name() });
    if let (Value::Object(o), Value::Object(extra)) = (&mut out, projection_json(&r)) {
        o.extend(extra);
    }
    Ok(out)
}

fn cmd_fisher(a: &FisherArgs) -> Result<Value, Error> {
    let base = parse_base(&a.family)?;
    let metric = fisher_constants(&base)?;
    let mut out = json!({ "command": "fisher", "family": base.to_string() });
    if a.constants || a.from.is_none() {
        out["constants"] = metric_json(&metric);
    }
    if let (Some(from), Some(to)) = (&a.from, &a.to) {
        let p1 = parse_group(from)?.as_univariate()?;
        let p2 = parse_group(to)?.as_univariate()?;
        out["distance"] = num(fisher_rao_distance(&metric, p1, p2)?);
    }
    Ok(out)
}

fn cmd_group(op: &GroupOp) -> Result<Value, Error> {
    Ok(match op {
        GroupOp::Compose { g1, g2 } => {
            let g = parse_group(g1)?.compose(&parse_group(g2)?)?;
            json!({ "command": "group.compose", "result": group_json(&g) })
        }
        GroupOp::Inverse { g } => {
            let g = parse_group(g)?.inverse()?;
            json!({ "command": "group.inverse", "result": group_json(&g) })
        }
        GroupOp::Matrix { g } => {
            let m = parse_group(g)?.as_matrix();
            let rows: Vec<Vec<Value>> = m.matrix().rows().iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect();
            json!({ "command": "group.matrix", "matrix": rows })
        }
    })
}

fn cmd_selftest() -> Result<Value, Error> {
    let rows = selftest::run()?;
    let passed = rows.iter().filter(|r| r.pass).count();
    let table: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "expected": num(r.expected),
                "computed": num(r.computed),
                "tolerance": num(r.tolerance),
                "pass": r.pass,
            })
        })
        .collect();
    Ok(json!({ "command": "selftest", "passed": passed, "total": rows.len(), "rows": table }))
}

fn has_nan(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(a) => a.iter().any(has_nan),
        Value::Object(o) => o.iter().any(|(k, v)| k != "stationarity" && has_nan(v)),
        _ => false,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("json values serialize"),
        Format::Csv | Format::Table => {
            // Selftest rows render one line per row.
            if let Some(rows) = v.get("rows").and_then(Value::as_array) {
                let flat: Vec<Vec<(String, String)>> = rows
                    .iter()
                    .map(|r| {
                        let mut out = Vec::new();
                        flatten("", r, &mut out);
                        out
                    })
                    .collect();
                return render_rows(&flat, format);
            }
            let mut out = Vec::new();
            flatten("", v, &mut out);
            render_rows(&[out], format)
        }
    }
}

fn render_rows(rows: &[Vec<(String, String)>], format: Format) -> String {
    let Some(first) = rows.first() else { return String::new() };
    match format {
        Format::Csv => {
            let mut lines = vec![first.iter().map(|(k, _)| csv_field(k)).collect::<Vec<_>>().join(",")];
            for r in rows {
                lines.push(r.iter().map(|(_, v)| csv_field(v)).collect::<Vec<_>>().join(","));
            }
            lines.join("\n")
        }
        _ if rows.len() == 1 => {
            let width = first.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            first.iter().map(|(k, v)| format!("{k:<width$}  {v}")).collect::<Vec<_>>().join("\n")
        }
        _ => {
            let headers: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
            let widths: Vec<usize> = (0..headers.len())
                .map(|i| rows.iter().map(|r| r[i].1.len()).chain([headers[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<&str>| {
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            let mut lines = vec![line(headers.clone())];
            for r in rows {
                lines.push(line(r.iter().map(|(_, v)| v.as_str()).collect()));
            }
            lines.join("\n")
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Domain(_) => 2,
        Error::Capability(_) => 3,
        Error::Accuracy { .. } | Error::Numerical { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Divergence(a) => cmd_divergence(a),
        Command::Project(a) => cmd_project(a),
        Command::Fisher(a) => cmd_fisher(a),
        Command::Group { op } => cmd_group(op),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(mut v) => {
            if has_nan(&v) {
                eprintln!("error: result contains NaN");
                return ExitCode::from(4);
            }
            if let Value::Object(o) = &mut v {
                let mut with_schema = Map::new();
                with_schema.insert("schema".into(), json!(SCHEMA));
                with_schema.extend(std::mem::take(o));
                *o = with_schema;
            }
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{}", render(&v, cli.format)) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
