//! Subcommand implementations, independent of argument parsing.

use std::fs;
use std::io::Write;
use std::path::Path;

use poisson_core::catalog::{self, Integration};
use poisson_core::dynamics::{
    hamiltonian_vector_field, integrate, nambu_vector_field, Monitor, PolyVectorField, Precision,
    TrajectoryReport,
};
use poisson_core::geometry::transport_bracket;
use poisson_core::{Error, Execution, PolyExpr, Rational};

use crate::checks::{run_checks, Model, Report, RunOptions};
use crate::dsl::{self, Literal, ModelSpec, StructureDecl};
use crate::mapfile::parse_map;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable file, parse error, bad parameter.
    #[error("{0}")]
    Usage(String),
    /// The input was valid but the requested computation failed.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAIL,
        }
    }
}

fn usage(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{context}: {e}"))
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

pub fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into())
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(&path.display().to_string(), e))?;
    let spec = dsl::parse(&text).map_err(|e| usage(&path.display().to_string(), e))?;
    Model::build(spec).map_err(|e| usage(&path.display().to_string(), e))
}

pub struct CheckArgs<'a> {
    pub file: &'a Path,
    pub json: Option<&'a Path>,
    pub seed: u64,
    pub sequential: bool,
    pub timings: bool,
}

pub fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let model = load_model(args.file)?;
    let opts = RunOptions {
        seed: args.seed,
        exec: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        timings: args.timings,
    };
    let report: Report = run_checks(&model, &model_name(args.file), opts);
    if let Some(path) = args.json {
        if path == Path::new("-") {
            let _ = out.write_all(report.to_json().as_bytes());
        } else {
            write_out(path, &report.to_json())?;
        }
    }
    if args.json != Some(Path::new("-")) {
        let _ = out.write_all(report.to_text().as_bytes());
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

/// Vector field of the model: Hamiltonian flow for Poisson models, the
/// multi-Hamiltonian flow for Nambu models.
pub fn vector_field(model: &Model) -> Result<PolyVectorField, Error> {
    let hs = &model.spec.hamiltonians;
    if let Some(ns) = model.nambu() {
        return nambu_vector_field(ns, hs);
    }
    let Some(ps) = model.poisson() else {
        return Err(Error::Contract("model declares no structure".into()));
    };
    match hs.as_slice() {
        [h] => hamiltonian_vector_field(ps, h),
        _ => Err(Error::Arity {
            expected: 1,
            found: hs.len(),
        }),
    }
}

pub fn monitors(model: &Model, names: &[String]) -> Result<Vec<Monitor>, Error> {
    names
        .iter()
        .map(|n| {
            model
                .spec
                .named(n)
                .map(|p| Monitor::new(n.clone(), p.clone()))
                .ok_or_else(|| Error::Contract(format!("monitor `{n}` is not defined")))
        })
        .collect()
}

pub struct IntegrateArgs<'a> {
    pub file: &'a Path,
    pub out: &'a Path,
    pub precision: Precision,
    pub step: Option<f64>,
    pub until: Option<f64>,
    pub max_drift: Option<f64>,
}

pub fn run_integration(model: &Model, req: &Integration, precision: Precision) -> Result<TrajectoryReport, Error> {
    let field = vector_field(model)?;
    let mons = monitors(model, &req.monitor)?;
    integrate(&field, &req.x0, req.step, req.t_end, &mons, precision)
}

pub fn integrate_cmd(args: &IntegrateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let model = load_model(args.file)?;
    let Some(mut req) = model.spec.integrate.clone() else {
        return Err(CliError::Usage(format!(
            "{}: no `integrate` statement",
            args.file.display()
        )));
    };
    if let Some(s) = args.step {
        req.step = s;
    }
    if let Some(t) = args.until {
        req.t_end = t;
    }
    let report = match run_integration(&model, &req, args.precision) {
        Ok(r) => r,
        Err(e @ Error::Divergence { .. }) => return Err(CliError::Failure(e.to_string())),
        Err(e) => return Err(usage(&args.file.display().to_string(), e)),
    };
    let mut csv = Vec::new();
    report
        .write_csv(&mut csv)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    write_out(args.out, &String::from_utf8(csv).expect("csv is ascii"))?;
    let _ = writeln!(out, "steps: {}", report.times.len() - 1);
    for (name, d) in &report.drift {
        let _ = writeln!(out, "drift {name}: {d:.3e}");
    }
    match args.max_drift {
        Some(limit) if report.max_drift() > limit => {
            let _ = writeln!(out, "drift exceeds {limit:e}");
            Ok(EXIT_FAIL)
        }
        _ => Ok(EXIT_PASS),
    }
}

pub fn parse_param(text: &str) -> Result<(String, Rational), CliError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("parameter `{text}` is not NAME=VALUE")))?;
    match Literal::parse_str(v.trim()) {
        Ok(Literal::Number(r)) => Ok((k.trim().to_string(), r)),
        _ => Err(CliError::Usage(format!("parameter `{text}` needs a rational value"))),
    }
}

pub fn catalog_listing() -> String {
    let mut out = String::new();
    for name in catalog::names() {
        let specs = catalog::param_specs(name).expect("listed entry");
        let ps: Vec<String> = specs.iter().map(|s| format!("{}={}", s.name, s.default)).collect();
        out.push_str(name);
        if !ps.is_empty() {
            out.push_str(&format!(" ({})", ps.join(", ")));
        }
        out.push('\n');
    }
    out
}

/// DSL text for a catalog entry.
pub fn catalog_text(name: &str, params: &[(String, Rational)]) -> Result<String, CliError> {
    let inst = catalog::build(name, params).map_err(|e| usage("catalog", e))?;
    let spec = ModelSpec::from_catalog(&inst).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(format!("# catalog entry {name}\n{}", spec.render()))
}

pub fn catalog_cmd(
    name: &str,
    params: &[(String, Rational)],
    emit: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let text = catalog_text(name, params)?;
    match emit {
        Some(path) => write_out(path, &text)?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_PASS)
}

/// Re-express the model's brackets and named polynomials in the map's new variables.
pub fn transport_spec(model: &Model, map_text: &str) -> Result<(ModelSpec, bool), CliError> {
    let vars = &model.spec.vars;
    let map = parse_map(map_text, vars).map_err(|e| usage("map", e))?;
    let Some(ps) = model.poisson() else {
        return Err(CliError::Usage("transport needs a Poisson structure".into()));
    };
    let moved = transport_bracket(ps.matrix(), &map).map_err(|e| CliError::Failure(e.to_string()))?;
    let target = map.target().clone();
    let sub = |p: &PolyExpr| p.substitute(&map).map_err(|e| CliError::Failure(e.to_string()));
    let rename = |items: &[(String, PolyExpr)]| -> Result<Vec<(String, PolyExpr)>, CliError> {
        items.iter().map(|(n, p)| Ok((n.clone(), sub(p)?))).collect()
    };
    let entries = moved
        .matrix
        .upper()
        .filter(|(_, _, p)| !p.is_zero())
        .map(|(i, j, p)| (target.name(i).to_string(), target.name(j).to_string(), p.clone()))
        .collect();
    let spec = ModelSpec {
        vars: target,
        weights: None,
        params: Vec::new(),
        lets: rename(&model.spec.lets)?,
        casimirs: rename(&model.spec.casimirs)?,
        structure: Some(StructureDecl::Table(entries)),
        hamiltonians: model.spec.hamiltonians.iter().map(sub).collect::<Result<_, _>>()?,
        checks: vec![catalog::CheckKind::Jacobi, catalog::CheckKind::Casimirs],
        expects: Vec::new(),
        integrate: None,
    };
    Ok((spec, moved.polynomial_grade))
}

pub fn transport_cmd(
    file: &Path,
    map_file: &Path,
    emit: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let model = load_model(file)?;
    let map_text = fs::read_to_string(map_file).map_err(|e| usage(&map_file.display().to_string(), e))?;
    let (spec, polynomial) = transport_spec(&model, &map_text)?;
    let text = spec.render();
    match emit {
        Some(path) => write_out(path, &text)?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if polynomial {
        Ok(EXIT_PASS)
    } else {
        eprintln!("transported brackets have non-polynomial terms");
        Ok(EXIT_FAIL)
    }
}
