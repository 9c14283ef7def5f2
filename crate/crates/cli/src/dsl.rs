//! Model description language: parser and canonical renderer.
//!
//! ```text
//! vars x1 x2 x3;
//! param k = 2;
//! casimir P = 1/3*x1^3 + 1/3*x2^3 + 1/3*x3^3 + k*x1*x2*x3;
//! structure jacobian;
//! check jacobi, casimirs, theorem31;
//! ```
//!
//! Rendering expands every polynomial with its parameters substituted, so
//! `parse(render(spec)) == spec` and rendering is a fixed point.

use std::fmt::Write as _;

use num_traits::{One, ToPrimitive};
use poisson_core::catalog::{CatalogInstance, CheckKind, Integration, Model};
use poisson_core::structures::Provenance;
use poisson_core::syntax::{tokenize, Cursor, ExprParser, TokenKind};
use poisson_core::{Error, PolyExpr, Rational, Result, Vars};

#[derive(Clone, Debug, PartialEq)]
pub enum StructureDecl {
    /// Bracket from all declared Casimirs, scaled by `lambda` (default 1).
    Jacobian { lambda: Option<PolyExpr> },
    /// Upper-triangle entries by variable name; unlisted pairs vanish.
    Table(Vec<(String, String, PolyExpr)>),
    /// Nambu bracket of the given arity from all declared Casimirs.
    Nambu { arity: usize, lambda: Option<PolyExpr> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Bool(bool),
    Number(Rational),
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Number(r) => write!(f, "{r}"),
        }
    }
}

impl Literal {
    pub fn parse_str(text: &str) -> Result<Literal> {
        let tokens = tokenize(text)?;
        let mut cur = Cursor::new(&tokens);
        let lit = parse_literal(&mut cur)?;
        if !cur.at_eof() {
            return Err(cur.error("trailing input after literal"));
        }
        Ok(lit)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub vars: Vars,
    pub weights: Option<Vec<i64>>,
    pub params: Vec<(String, Rational)>,
    pub lets: Vec<(String, PolyExpr)>,
    pub casimirs: Vec<(String, PolyExpr)>,
    pub structure: Option<StructureDecl>,
    pub hamiltonians: Vec<PolyExpr>,
    pub checks: Vec<CheckKind>,
    pub expects: Vec<(CheckKind, Literal)>,
    pub integrate: Option<Integration>,
}

impl ModelSpec {
    pub fn named(&self, name: &str) -> Option<&PolyExpr> {
        self.lets
            .iter()
            .chain(&self.casimirs)
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }

    /// Requested checks followed by any check that only appears in an `expect`.
    pub fn requested_checks(&self) -> Vec<CheckKind> {
        let mut out = self.checks.clone();
        for (c, _) in &self.expects {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        out
    }

    pub fn expectation(&self, check: &CheckKind) -> Option<&Literal> {
        self.expects
            .iter()
            .rev()
            .find(|(c, _)| c == check)
            .map(|(_, l)| l)
    }

    pub fn from_catalog(inst: &CatalogInstance) -> Result<ModelSpec> {
        let vars = inst.vars.clone();
        let lambda_opt = |l: &PolyExpr| {
            if l.is_constant() && l.constant_term().is_one() {
                None
            } else {
                Some(l.clone())
            }
        };
        let structure = match &inst.model {
            Model::Poisson(ps) => match ps.provenance() {
                Provenance::Jacobian { casimirs, lambda } => {
                    if casimirs != &inst.casimir_polys() {
                        return Err(Error::Contract(format!(
                            "catalog entry `{}` declares Casimirs other than its construction",
                            inst.name
                        )));
                    }
                    StructureDecl::Jacobian {
                        lambda: lambda_opt(lambda),
                    }
                }
                Provenance::Table => StructureDecl::Table(
                    ps.matrix()
                        .upper()
                        .filter(|(_, _, p)| !p.is_zero())
                        .map(|(i, j, p)| (vars.name(i).to_string(), vars.name(j).to_string(), p.clone()))
                        .collect(),
                ),
            },
            Model::Nambu(ns) => {
                if ns.casimirs() != inst.casimir_polys().as_slice() {
                    return Err(Error::Contract(format!(
                        "catalog entry `{}` declares Casimirs other than its construction",
                        inst.name
                    )));
                }
                StructureDecl::Nambu {
                    arity: ns.arity(),
                    lambda: lambda_opt(ns.lambda()),
                }
            }
        };
        let weights = match &inst.weights {
            None => None,
            Some(ws) => Some(
                ws.iter()
                    .map(|w| {
                        if w.is_integer() {
                            Ok(*w.numer())
                        } else {
                            Err(Error::Contract(format!("weight {w} is not an integer")))
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(ModelSpec {
            vars,
            weights,
            params: inst.params.clone(),
            lets: inst.lets.clone(),
            casimirs: inst.casimirs.clone(),
            structure: Some(structure),
            hamiltonians: inst.hamiltonians.clone(),
            checks: inst.checks.clone(),
            expects: inst
                .expect
                .iter()
                .map(|(c, l)| Ok((c.clone(), Literal::parse_str(l)?)))
                .collect::<Result<_>>()?,
            integrate: inst.integration.clone(),
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let names = self.vars.names().join(" ");
        let _ = writeln!(out, "vars {names};");
        if let Some(ws) = &self.weights {
            let ws: Vec<String> = ws.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "weights {};", ws.join(" "));
        }
        for (name, v) in &self.params {
            let _ = writeln!(out, "param {name} = {v};");
        }
        for (name, p) in &self.lets {
            let _ = writeln!(out, "let {name} = {p};");
        }
        for (name, p) in &self.casimirs {
            let _ = writeln!(out, "casimir {name} = {p};");
        }
        match &self.structure {
            None => {}
            Some(StructureDecl::Jacobian { lambda }) => {
                out.push_str("structure jacobian");
                if let Some(l) = lambda {
                    let _ = write!(out, " lambda {l}");
                }
                out.push_str(";\n");
            }
            Some(StructureDecl::Table(entries)) => {
                out.push_str("structure table {\n");
                for (a, b, p) in entries {
                    let _ = writeln!(out, "  {{{a},{b}}} = {p};");
                }
                out.push_str("};\n");
            }
            Some(StructureDecl::Nambu { arity, lambda }) => {
                let _ = write!(out, "structure nambu {arity}");
                if let Some(l) = lambda {
                    let _ = write!(out, " lambda {l}");
                }
                out.push_str(";\n");
            }
        }
        for h in &self.hamiltonians {
            let by_name = self.lets.iter().chain(&self.casimirs).find(|(_, p)| p == h);
            match by_name {
                Some((n, _)) => {
                    let _ = writeln!(out, "hamiltonian {n};");
                }
                None => {
                    let _ = writeln!(out, "hamiltonian {h};");
                }
            }
        }
        if !self.checks.is_empty() {
            let cs: Vec<String> = self.checks.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "check {};", cs.join(", "));
        }
        for (c, l) in &self.expects {
            let _ = writeln!(out, "expect {c} = {l};");
        }
        if let Some(int) = &self.integrate {
            let x0: Vec<String> = int.x0.iter().map(|v| format!("{v:?}")).collect();
            let _ = write!(
                out,
                "integrate from ({}) step {:?} until {:?}",
                x0.join(", "),
                int.step,
                int.t_end
            );
            if !int.monitor.is_empty() {
                let _ = write!(out, " monitor {}", int.monitor.join(" "));
            }
            out.push_str(";\n");
        }
        out
    }
}

const KEYWORDS: &[&str] = &[
    "vars",
    "weights",
    "param",
    "let",
    "casimir",
    "structure",
    "hamiltonian",
    "check",
    "expect",
    "integrate",
];

pub fn parse(text: &str) -> Result<ModelSpec> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens);
    let mut p = Parser::default();
    while !cur.at_eof() {
        p.statement(&mut cur)?;
    }
    p.finish(&mut cur)
}

#[derive(Default)]
struct Parser {
    vars: Option<Vars>,
    weights: Option<Vec<i64>>,
    params: Vec<(String, Rational)>,
    lets: Vec<(String, PolyExpr)>,
    casimirs: Vec<(String, PolyExpr)>,
    structure: Option<StructureDecl>,
    hamiltonians: Vec<PolyExpr>,
    checks: Vec<CheckKind>,
    expects: Vec<(CheckKind, Literal)>,
    integrate: Option<Integration>,
}

impl Parser {
    fn vars(&self, cur: &Cursor) -> Result<&Vars> {
        self.vars
            .as_ref()
            .ok_or_else(|| cur.error("`vars` must be declared before this statement"))
    }

    fn is_taken(&self, name: &str) -> bool {
        self.vars.as_ref().is_some_and(|v| v.index_of(name).is_some())
            || self.params.iter().any(|(n, _)| n == name)
            || self.lets.iter().chain(&self.casimirs).any(|(n, _)| n == name)
    }

    fn poly(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        let vars = self.vars(cur)?.clone();
        let resolve = |name: &str| -> Option<PolyExpr> {
            if let Some((_, v)) = self.params.iter().find(|(n, _)| n == name) {
                return Some(PolyExpr::constant(&vars, v.clone()));
            }
            self.lets
                .iter()
                .chain(&self.casimirs)
                .find(|(n, _)| n == name)
                .map(|(_, p)| p.clone())
        };
        ExprParser::new(&vars, &resolve).expr(cur)
    }

    fn fresh_name<'a>(&self, cur: &mut Cursor<'a>) -> Result<&'a str> {
        let tok = cur.peek();
        let name = cur.expect_ident()?;
        if KEYWORDS.contains(&name) || self.is_taken(name) {
            return Err(cur.error_at(tok, format!("name `{name}` is reserved or already defined")));
        }
        Ok(name)
    }

    fn statement(&mut self, cur: &mut Cursor) -> Result<()> {
        let tok = cur.peek();
        let TokenKind::Ident(kw) = &tok.kind else {
            return Err(cur.error("expected a statement keyword"));
        };
        cur.advance();
        match kw.as_str() {
            "vars" => {
                if self.vars.is_some() {
                    return Err(cur.error_at(tok, "`vars` declared twice"));
                }
                let mut names: Vec<String> = Vec::new();
                while !cur.at_punct(';') {
                    let t = cur.peek();
                    let name = cur.expect_ident()?;
                    if KEYWORDS.contains(&name) || names.iter().any(|n| n == name) {
                        return Err(cur.error_at(t, format!("bad variable name `{name}`")));
                    }
                    names.push(name.to_string());
                }
                if names.is_empty() {
                    return Err(cur.error("`vars` needs at least one name"));
                }
                if names.len() > poisson_core::exterior::MAX_DIM {
                    return Err(cur.error_at(
                        tok,
                        format!("at most {} variables are supported", poisson_core::exterior::MAX_DIM),
                    ));
                }
                self.vars = Some(Vars::new(names));
            }
            "weights" => {
                let mut ws = Vec::new();
                while !cur.at_punct(';') {
                    let neg = cur.eat_punct('-');
                    let v = cur.expect_int()?;
                    let v = v.to_i64().ok_or_else(|| cur.error("weight out of range"))?;
                    ws.push(if neg { -v } else { v });
                }
                self.weights = Some(ws);
            }
            "param" => {
                let name = self.fresh_name(cur)?.to_string();
                cur.expect_punct('=')?;
                let v = cur.expect_rational()?;
                self.params.push((name, v));
            }
            "let" | "casimir" => {
                let name = self.fresh_name(cur)?.to_string();
                cur.expect_punct('=')?;
                let p = self.poly(cur)?;
                if kw == "let" {
                    self.lets.push((name, p));
                } else {
                    self.casimirs.push((name, p));
                }
            }
            "structure" => {
                if self.structure.is_some() {
                    return Err(cur.error_at(tok, "`structure` declared twice"));
                }
                self.structure = Some(self.structure_decl(cur)?);
            }
            "hamiltonian" => {
                let p = self.poly(cur)?;
                self.hamiltonians.push(p);
            }
            "check" => loop {
                self.checks.push(parse_check(cur)?);
                if !cur.eat_punct(',') {
                    break;
                }
            },
            "expect" => {
                let c = parse_check(cur)?;
                cur.expect_punct('=')?;
                let lit = parse_literal(cur)?;
                self.expects.push((c, lit));
            }
            "integrate" => {
                cur.expect_keyword("from")?;
                cur.expect_punct('(')?;
                let mut x0 = vec![cur.expect_float()?];
                while cur.eat_punct(',') {
                    x0.push(cur.expect_float()?);
                }
                cur.expect_punct(')')?;
                cur.expect_keyword("step")?;
                let step = cur.expect_float()?;
                cur.expect_keyword("until")?;
                let t_end = cur.expect_float()?;
                let mut monitor = Vec::new();
                if cur.eat_keyword("monitor") {
                    while !cur.at_punct(';') {
                        monitor.push(cur.expect_ident()?.to_string());
                    }
                }
                self.integrate = Some(Integration {
                    x0,
                    step,
                    t_end,
                    monitor,
                });
            }
            other => {
                return Err(cur.error_at(tok, format!("unknown statement `{other}`")));
            }
        }
        cur.expect_punct(';')
    }

    fn structure_decl(&self, cur: &mut Cursor) -> Result<StructureDecl> {
        if cur.eat_keyword("jacobian") {
            let lambda = if cur.eat_keyword("lambda") {
                Some(self.poly(cur)?)
            } else {
                None
            };
            Ok(StructureDecl::Jacobian { lambda })
        } else if cur.eat_keyword("table") {
            let vars = self.vars(cur)?.clone();
            cur.expect_punct('{')?;
            let mut entries = Vec::new();
            while !cur.eat_punct('}') {
                cur.expect_punct('{')?;
                let mut side = || -> Result<String> {
                    let t = cur.peek();
                    let n = cur.expect_ident()?;
                    if vars.index_of(n).is_none() {
                        return Err(cur.error_at(t, format!("`{n}` is not a variable")));
                    }
                    Ok(n.to_string())
                };
                let a = side()?;
                cur.expect_punct(',')?;
                let b = {
                    let t = cur.peek();
                    let n = cur.expect_ident()?;
                    if vars.index_of(n).is_none() {
                        return Err(cur.error_at(t, format!("`{n}` is not a variable")));
                    }
                    n.to_string()
                };
                cur.expect_punct('}')?;
                cur.expect_punct('=')?;
                let p = self.poly(cur)?;
                cur.expect_punct(';')?;
                entries.push((a, b, p));
            }
            Ok(StructureDecl::Table(entries))
        } else if cur.eat_keyword("nambu") {
            let arity = cur.expect_int()?;
            let arity = arity
                .to_usize()
                .ok_or_else(|| cur.error("arity out of range"))?;
            let lambda = if cur.eat_keyword("lambda") {
                Some(self.poly(cur)?)
            } else {
                None
            };
            Ok(StructureDecl::Nambu { arity, lambda })
        } else {
            Err(cur.error("expected `jacobian`, `table` or `nambu`"))
        }
    }

    fn finish(self, cur: &mut Cursor) -> Result<ModelSpec> {
        let vars = self.vars(cur)?.clone();
        if let Some(ws) = &self.weights {
            if ws.len() != vars.len() {
                return Err(Error::Arity {
                    expected: vars.len(),
                    found: ws.len(),
                });
            }
        }
        if let Some(int) = &self.integrate {
            if int.x0.len() != vars.len() {
                return Err(Error::Arity {
                    expected: vars.len(),
                    found: int.x0.len(),
                });
            }
            for m in &int.monitor {
                if !self.lets.iter().chain(&self.casimirs).any(|(n, _)| n == m) {
                    return Err(Error::Contract(format!("monitor `{m}` is not a defined polynomial")));
                }
            }
        }
        for c in self.checks.iter().chain(self.expects.iter().map(|(c, _)| c)) {
            if let CheckKind::Quasi(name) = c {
                if !self.lets.iter().chain(&self.casimirs).any(|(n, _)| n == name) {
                    return Err(Error::Contract(format!("quasi({name}) names no polynomial")));
                }
            }
        }
        Ok(ModelSpec {
            vars,
            weights: self.weights,
            params: self.params,
            lets: self.lets,
            casimirs: self.casimirs,
            structure: self.structure,
            hamiltonians: self.hamiltonians,
            checks: self.checks,
            expects: self.expects,
            integrate: self.integrate,
        })
    }
}

fn parse_check(cur: &mut Cursor) -> Result<CheckKind> {
    let tok = cur.peek();
    let name = cur.expect_ident()?;
    Ok(match name {
        "jacobi" => CheckKind::Jacobi,
        "casimirs" => CheckKind::Casimirs,
        "theorem31" => CheckKind::Theorem31,
        "plucker" => CheckKind::Plucker,
        "rank" => CheckKind::Rank,
        "extendability" => CheckKind::Extendability,
        "degree_sum" => CheckKind::DegreeSum,
        "bdu_relation" => CheckKind::BduRelation,
        "quasi" => {
            cur.expect_punct('(')?;
            let n = cur.expect_ident()?.to_string();
            cur.expect_punct(')')?;
            CheckKind::Quasi(n)
        }
        "fi" => {
            cur.expect_punct('(')?;
            let n = cur.expect_int()?;
            let n = n.to_usize().ok_or_else(|| cur.error("count out of range"))?;
            cur.expect_punct(')')?;
            CheckKind::Fi(n)
        }
        other => return Err(cur.error_at(tok, format!("unknown check `{other}`"))),
    })
}

fn parse_literal(cur: &mut Cursor) -> Result<Literal> {
    if cur.eat_keyword("true") {
        Ok(Literal::Bool(true))
    } else if cur.eat_keyword("false") {
        Ok(Literal::Bool(false))
    } else {
        Ok(Literal::Number(cur.expect_rational()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# torus algebra
vars x1 x2 x3;
param k = 2;
casimir P = 1/3*(x1^3 + x2^3 + x3^3) + k*x1*x2*x3;
structure jacobian;
check jacobi, casimirs, theorem31;
expect theorem31 = 1;
";

    #[test]
    fn parses_and_renders_canonically() {
        let spec = parse(SAMPLE).unwrap();
        assert_eq!(spec.params, vec![("k".to_string(), Rational::from_integer(2.into()))]);
        let text = spec.render();
        assert!(text.contains("casimir P = 1/3*x1^3 + 2*x1*x2*x3 + 1/3*x2^3 + 1/3*x3^3;"), "{text}");
        let again = parse(&text).unwrap();
        assert_eq!(again, spec);
        assert_eq!(again.render(), text);
    }

    #[test]
    fn table_and_integrate() {
        let text = "vars a b;\nlet H = a^2 + b^2;\nstructure table {\n  {a,b} = 1;\n};\nhamiltonian H;\nintegrate from (1.0, -0.5) step 0.001 until 2.0 monitor H;\n";
        let spec = parse(text).unwrap();
        assert_eq!(spec.render(), text);
        let int = spec.integrate.unwrap();
        assert_eq!(int.x0, vec![1.0, -0.5]);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("vars x;\ncasimir P = x +;\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(parse("casimir P = 1;").is_err());
        assert!(parse("vars x x;").is_err());
        assert!(parse("vars x; check bogus;").is_err());
        assert!(parse("vars x; param x = 1;").is_err());
        assert!(parse("vars x y; weights 1;").is_err());
    }
}
