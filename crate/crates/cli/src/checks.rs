//! Build a model from its description and run the requested checks.

use std::time::Instant;

use num_traits::Zero;
use poisson_core::catalog::CheckKind;
use poisson_core::geometry::check_projective_extendability;
use poisson_core::poly::exp_int;
use poisson_core::regularity::{degree_sum_check, theorem31_check_with, Homogeneity};
use poisson_core::structures::{
    casimir_residuals, check_fundamental_identity_with, check_jacobi_with, constant_ratio,
    generic_rank_with, is_quasi_casimir, jacobian_structure, plucker_rank2_test_with,
    random_arguments, NambuStructure, PoissonStructure,
};
use poisson_core::{Error, Execution, PolyExpr, Result};
use serde::Serialize;

use crate::dsl::{Literal, ModelSpec, StructureDecl};

/// Sample points used by the generic-rank estimate.
pub const RANK_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub enum Built {
    Poisson(PoissonStructure),
    Nambu(NambuStructure),
}

#[derive(Clone, Debug)]
pub struct Model {
    pub spec: ModelSpec,
    pub structure: Option<Built>,
}

impl Model {
    pub fn build(spec: ModelSpec) -> Result<Model> {
        let vars = &spec.vars;
        let casimirs: Vec<PolyExpr> = spec.casimirs.iter().map(|(_, p)| p.clone()).collect();
        let one = PolyExpr::one(vars);
        let structure = match &spec.structure {
            None => None,
            Some(StructureDecl::Jacobian { lambda }) => Some(Built::Poisson(jacobian_structure(
                vars,
                &casimirs,
                lambda.as_ref().unwrap_or(&one),
            )?)),
            Some(StructureDecl::Table(entries)) => Some(Built::Poisson(
                PoissonStructure::from_named_table(
                    vars,
                    entries.iter().map(|(a, b, p)| (a.as_str(), b.as_str(), p.clone())),
                )?,
            )),
            Some(StructureDecl::Nambu { arity, lambda }) => {
                if casimirs.len() + arity != vars.len() {
                    return Err(Error::Arity {
                        expected: vars.len().saturating_sub(*arity),
                        found: casimirs.len(),
                    });
                }
                Some(Built::Nambu(NambuStructure::new(
                    vars,
                    casimirs,
                    lambda.clone().unwrap_or(one),
                )?))
            }
        };
        Ok(Model { spec, structure })
    }

    pub fn poisson(&self) -> Option<&PoissonStructure> {
        match &self.structure {
            Some(Built::Poisson(ps)) => Some(ps),
            _ => None,
        }
    }

    pub fn nambu(&self) -> Option<&NambuStructure> {
        match &self.structure {
            Some(Built::Nambu(ns)) => Some(ns),
            _ => None,
        }
    }

    pub fn casimir_polys(&self) -> Vec<PolyExpr> {
        self.spec.casimirs.iter().map(|(_, p)| p.clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Info,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Info => "info",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub model: String,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("model {}: {}\n", self.model, self.status);
        for c in &self.checks {
            out.push_str(&format!("  {}: {}", c.name, c.status));
            if let Some(v) = &c.value {
                out.push_str(&format!(" value={v}"));
            }
            if let Some(l) = &c.lambda {
                out.push_str(&format!(" lambda={l}"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" ({d})"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("\n    witness: {w}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub exec: Execution,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            exec: Execution::default(),
            timings: false,
        }
    }
}

/// Outcome before the pass/fail decision.
#[derive(Default)]
struct Outcome {
    observed: Option<Literal>,
    informational: bool,
    skipped: Option<String>,
    lambda: Option<String>,
    witness: Option<String>,
    detail: Option<String>,
}

impl Outcome {
    fn predicate(holds: bool) -> Self {
        Outcome {
            observed: Some(Literal::Bool(holds)),
            ..Outcome::default()
        }
    }

    fn skip(reason: impl Into<String>) -> Self {
        Outcome {
            skipped: Some(reason.into()),
            ..Outcome::default()
        }
    }
}

pub fn run_checks(model: &Model, name: &str, opts: RunOptions) -> Report {
    let checks: Vec<CheckResult> = model
        .spec
        .requested_checks()
        .iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = run_one(model, c, opts);
            let millis = if opts.timings {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            decide(c, model.spec.expectation(c), outcome, millis)
        })
        .collect();
    let status = if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    };
    Report {
        model: name.to_string(),
        seed: opts.seed,
        status,
        checks,
    }
}

fn decide(check: &CheckKind, expect: Option<&Literal>, out: Result<Outcome>, millis: u64) -> CheckResult {
    let mut res = CheckResult {
        name: check.to_string(),
        status: Status::Fail,
        lambda: None,
        witness: None,
        value: None,
        detail: None,
        millis,
    };
    let out = match out {
        Ok(o) => o,
        Err(e) => {
            res.detail = Some(e.to_string());
            return res;
        }
    };
    res.lambda = out.lambda;
    res.witness = out.witness;
    res.value = out.observed.as_ref().map(ToString::to_string);
    if let Some(reason) = out.skipped {
        res.status = if expect.is_some() { Status::Fail } else { Status::Skipped };
        res.detail = Some(reason);
        return res;
    }
    res.status = match (expect, &out.observed) {
        (Some(lit), observed) => {
            if observed.as_ref() == Some(lit) {
                Status::Pass
            } else {
                Status::Fail
            }
        }
        (None, _) if out.informational => Status::Info,
        (None, Some(Literal::Bool(true))) => Status::Pass,
        (None, _) => Status::Fail,
    };
    res.detail = match (expect, out.detail) {
        (Some(lit), Some(d)) => Some(format!("expected {lit}; {d}")),
        (Some(lit), None) => Some(format!("expected {lit}")),
        (None, d) => d,
    };
    res
}

fn subset_label(model: &Model, idx: &[usize]) -> String {
    let names: Vec<&str> = idx.iter().map(|&i| model.spec.vars.name(i)).collect();
    format!("({})", names.join(","))
}

fn need_poisson<'m>(model: &'m Model) -> std::result::Result<&'m PoissonStructure, Outcome> {
    match &model.structure {
        Some(Built::Poisson(ps)) => Ok(ps),
        Some(Built::Nambu(_)) => Err(Outcome::skip("needs a Poisson structure, model is Nambu")),
        None => Err(Outcome::skip("model declares no structure")),
    }
}

macro_rules! poisson_or_skip {
    ($model:expr) => {
        match need_poisson($model) {
            Ok(ps) => ps,
            Err(o) => return Ok(o),
        }
    };
}

fn run_one(model: &Model, check: &CheckKind, opts: RunOptions) -> Result<Outcome> {
    let exec = opts.exec;
    match check {
        CheckKind::Jacobi => {
            let ps = poisson_or_skip!(model);
            let r = check_jacobi_with(ps, exec);
            let mut o = Outcome::predicate(r.holds);
            if let Some(w) = r.witnesses.first() {
                let (i, j, k) = w.triple;
                o.witness = Some(format!("{}: {}", subset_label(model, &[i, j, k]), w.residual));
            }
            Ok(o)
        }
        CheckKind::Casimirs => {
            if model.nambu().is_some() {
                return Ok(Outcome::skip("Casimirs of a Nambu structure annihilate by construction"));
            }
            let ps = poisson_or_skip!(model);
            if model.spec.casimirs.is_empty() {
                return Ok(Outcome::skip("no Casimirs declared"));
            }
            for (name, q) in &model.spec.casimirs {
                let residuals = casimir_residuals(ps, q)?;
                if let Some((i, r)) = residuals.iter().enumerate().find(|(_, r)| !r.is_zero()) {
                    let mut o = Outcome::predicate(false);
                    o.witness = Some(format!("{{{name},{}}} = {r}", model.spec.vars.name(i)));
                    return Ok(o);
                }
            }
            Ok(Outcome::predicate(true))
        }
        CheckKind::Quasi(name) => {
            let ps = poisson_or_skip!(model);
            let q = model
                .spec
                .named(name)
                .ok_or_else(|| Error::Contract(format!("quasi({name}) names no polynomial")))?;
            Ok(Outcome::predicate(is_quasi_casimir(ps, q)?))
        }
        CheckKind::Theorem31 => {
            let ps = poisson_or_skip!(model);
            let qs = model.casimir_polys();
            let r = match theorem31_check_with(ps, &qs, exec) {
                Err(Error::Parity(d)) => {
                    return Ok(Outcome::skip(format!(
                        "dimension minus Casimir count is {d}, which is odd"
                    )))
                }
                other => other?,
            };
            let norm = r
                .lambda_normalized
                .as_ref()
                .map_or("non-constant".to_string(), ToString::to_string);
            // A pinned value is compared with the Pfaffian-to-minor ratio.
            let observed = if model.spec.expectation(check).is_some() {
                r.lambda_normalized
                    .clone()
                    .filter(|_| r.holds)
                    .map(Literal::Number)
            } else {
                Some(Literal::Bool(r.holds))
            };
            let witness = r.residual.iter().find(|(_, c)| !c.is_zero()).map(|(s, c)| {
                let idx = poisson_core::exterior::subset_indices(s);
                format!("{}: {c}", subset_label(model, &idx))
            });
            Ok(Outcome {
                observed,
                lambda: Some(r.lambda.to_string()),
                witness,
                detail: Some(format!("half rank {}, pfaffian ratio {norm}", r.half_rank)),
                ..Outcome::default()
            })
        }
        CheckKind::Plucker => {
            let ps = poisson_or_skip!(model);
            let r = plucker_rank2_test_with(ps, exec);
            let mut o = Outcome::predicate(r.rank_le_2);
            o.informational = true;
            if let (Some(w), Some(v)) = (r.witness, r.value) {
                o.witness = Some(format!("{}: {v}", subset_label(model, &w)));
            }
            Ok(o)
        }
        CheckKind::Rank => {
            let ps = poisson_or_skip!(model);
            let rank = generic_rank_with(ps, RANK_SAMPLES, opts.seed, exec)?;
            Ok(Outcome {
                observed: Some(Literal::Number(poisson_core::poly::int(rank as i64))),
                informational: true,
                detail: Some(format!("{RANK_SAMPLES} seeded sample points")),
                ..Outcome::default()
            })
        }
        CheckKind::Extendability => {
            let ps = poisson_or_skip!(model);
            let v = check_projective_extendability(ps);
            let mut o = Outcome::predicate(v.necessary_conditions);
            o.detail = Some(v.verdict().to_string());
            if let Some((&(i, j, k), r)) = v.first_obstruction() {
                o.witness = Some(format!("{}: {r}", subset_label(model, &[i, j, k])));
            } else if !v.degree_ok {
                o.witness = Some(format!(
                    "degree {}",
                    v.max_degree.map_or("-".into(), |d| d.to_string())
                ));
            }
            Ok(o)
        }
        CheckKind::Fi(count) => {
            let Some(ns) = model.nambu() else {
                return Ok(Outcome::skip("needs a Nambu structure"));
            };
            let r = ns.arity();
            if r < 2 {
                return Ok(Outcome::skip("fundamental identity needs arity at least 2"));
            }
            let vars = &model.spec.vars;
            let width = 2 * r - 1;
            let mut tuples: Vec<Vec<PolyExpr>> = (0..*count)
                .map(|t| random_arguments(vars, width, opts.seed.wrapping_add(t as u64)))
                .collect();
            tuples.push((0..width).map(|i| PolyExpr::var(vars, i % vars.len())).collect());
            for (t, args) in tuples.iter().enumerate() {
                let rep = check_fundamental_identity_with(ns, args, exec)?;
                if !rep.holds {
                    let mut o = Outcome::predicate(false);
                    o.witness = Some(format!("tuple {t}: {}", rep.residual));
                    return Ok(o);
                }
            }
            let mut o = Outcome::predicate(true);
            o.detail = Some(format!("{} argument tuples", tuples.len()));
            Ok(o)
        }
        CheckKind::DegreeSum => {
            let qs = model.casimir_polys();
            if qs.is_empty() {
                return Ok(Outcome::skip("no Casimirs declared"));
            }
            let weights = model
                .spec
                .weights
                .as_ref()
                .map(|ws| ws.iter().map(|&w| exp_int(w)).collect::<Vec<_>>());
            let n = model.spec.vars.len();
            let d = degree_sum_check(&qs, n, weights.as_deref(), Homogeneity::LeadingForm)?;
            let homogeneous = match &weights {
                Some(w) => qs.iter().all(|q| q.is_weighted_homogeneous(w)),
                None => qs.iter().all(|q| q.is_weighted_homogeneous(&vec![exp_int(1); n])),
            };
            let degrees: Vec<String> = d.degrees.iter().map(ToString::to_string).collect();
            let mut o = Outcome::predicate(d.equals_dimension);
            o.detail = Some(format!(
                "{} = {} against weight sum {}{}",
                degrees.join("+"),
                d.sum_of_degrees,
                d.weight_sum,
                if homogeneous { "" } else { ", leading forms" }
            ));
            Ok(o)
        }
        CheckKind::BduRelation => bdu_relation(model),
    }
}

/// `{x,y}{p,z} + {y,z}{p,x} + {z,x}{p,y}` against the 2x2 Jacobian of the
/// first two Casimirs in `(q, r)`.
fn bdu_relation(model: &Model) -> Result<Outcome> {
    let ps = poisson_or_skip!(model);
    let vars = &model.spec.vars;
    let mut idx = [0usize; 6];
    for (slot, name) in ["p", "q", "r", "x", "y", "z"].iter().enumerate() {
        match vars.index_of(name) {
            Some(i) => idx[slot] = i,
            None => return Ok(Outcome::skip("needs variables p q r x y z")),
        }
    }
    if model.spec.casimirs.len() < 2 {
        return Ok(Outcome::skip("needs two Casimirs"));
    }
    if ps.matrix().upper().all(|(_, _, e)| e.is_zero()) {
        return Ok(Outcome::skip("no brackets supplied"));
    }
    let [p, q, r, x, y, z] = idx;
    let b = |i: usize, j: usize| ps.entry(i, j);
    let lhs = &(&(b(x, y) * b(p, z)) + &(b(y, z) * b(p, x))) + &(b(z, x) * b(p, y));
    let p1 = &model.spec.casimirs[0].1;
    let p2 = &model.spec.casimirs[1].1;
    let rhs = &(&p2.partial_derivative(q) * &p1.partial_derivative(r))
        - &(&p2.partial_derivative(r) * &p1.partial_derivative(q));
    let ratio = constant_ratio(&lhs, &rhs).filter(|c| !c.is_zero());
    let mut o = Outcome::predicate(ratio.is_some());
    o.lambda = ratio.map(|c| c.to_string());
    if o.lambda.is_none() {
        o.witness = Some(format!("lhs {lhs}; rhs {rhs}"));
    }
    Ok(o)
}
