//! Named, parameterised example models.
//!
//! Every builder binds its parameters to rationals and returns a fully
//! constructed [`CatalogInstance`]: the structure, its Casimirs, optional
//! weights, Hamiltonians, default checks with expected outcomes, and an
//! optional integration request.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::transport_bracket;
use crate::poly::{exp, exp_int, int, rat, Exponent, MonomialMap, PolyExpr, Rational, Vars};
use crate::regularity::Homogeneity;
use crate::structures::{jacobian_structure, NambuStructure, PoissonStructure};
use crate::syntax::{tokenize, Cursor, ExprParser};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    Jacobi,
    Casimirs,
    Quasi(String),
    Theorem31,
    Plucker,
    Rank,
    Extendability,
    Fi(usize),
    DegreeSum,
    BduRelation,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckKind::Jacobi => f.write_str("jacobi"),
            CheckKind::Casimirs => f.write_str("casimirs"),
            CheckKind::Quasi(name) => write!(f, "quasi({name})"),
            CheckKind::Theorem31 => f.write_str("theorem31"),
            CheckKind::Plucker => f.write_str("plucker"),
            CheckKind::Rank => f.write_str("rank"),
            CheckKind::Extendability => f.write_str("extendability"),
            CheckKind::Fi(n) => write!(f, "fi({n})"),
            CheckKind::DegreeSum => f.write_str("degree_sum"),
            CheckKind::BduRelation => f.write_str("bdu_relation"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Poisson(PoissonStructure),
    Nambu(NambuStructure),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Integration {
    pub x0: Vec<f64>,
    pub step: f64,
    pub t_end: f64,
    pub monitor: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogInstance {
    pub name: String,
    pub params: Vec<(String, Rational)>,
    pub vars: Vars,
    pub weights: Option<Vec<Exponent>>,
    pub homogeneity: Homogeneity,
    /// Auxiliary named polynomials (monitors, quasi-Casimir candidates).
    pub lets: Vec<(String, PolyExpr)>,
    pub casimirs: Vec<(String, PolyExpr)>,
    pub model: Model,
    pub hamiltonians: Vec<PolyExpr>,
    pub checks: Vec<CheckKind>,
    /// Pinned outcomes as DSL literals (`true`, `4`, `1/5`).
    pub expect: Vec<(CheckKind, String)>,
    pub integration: Option<Integration>,
}

impl CatalogInstance {
    pub fn casimir_polys(&self) -> Vec<PolyExpr> {
        self.casimirs.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn poisson(&self) -> Option<&PoissonStructure> {
        match &self.model {
            Model::Poisson(ps) => Some(ps),
            Model::Nambu(_) => None,
        }
    }

    pub fn nambu(&self) -> Option<&NambuStructure> {
        match &self.model {
            Model::Nambu(ns) => Some(ns),
            Model::Poisson(_) => None,
        }
    }

    pub fn param(&self, name: &str) -> Option<&Rational> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn named(&self, name: &str) -> Option<&PolyExpr> {
        self.lets
            .iter()
            .chain(&self.casimirs)
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Rational,
    pub alternates: [Rational; 2],
}

fn spec(name: &'static str, default: Rational, a: Rational, b: Rational) -> ParamSpec {
    ParamSpec {
        name,
        default,
        alternates: [a, b],
    }
}

pub const NAMES: &[&str] = &[
    "q3",
    "mirror_y",
    "mirror_z",
    "markov",
    "bdu_casimirs",
    "askey_wilson",
    "sklyanin",
    "quadrics61",
    "q5",
    "euler_top",
    "dell",
    "fairlie",
    "fermat_k3",
    "singular_k3_affine",
    "singular_k3_split",
    "canonical_cone4",
    "dell_nambu",
];

pub fn names() -> &'static [&'static str] {
    NAMES
}

pub fn param_specs(name: &str) -> Result<Vec<ParamSpec>> {
    let k = || spec("k", int(2), rat(3, 2), int(-1));
    Ok(match name {
        "q3" | "mirror_y" | "mirror_z" => vec![k()],
        "markov" | "bdu_casimirs" | "fermat_k3" | "singular_k3_affine" | "singular_k3_split" => {
            vec![]
        }
        "askey_wilson" => vec![
            spec("a", int(1), int(2), rat(-1, 3)),
            spec("a1", int(2), int(1), rat(1, 2)),
            spec("a2", int(-1), int(3), int(0)),
            spec("a3", int(3), rat(-2, 5), int(1)),
            spec("a4", rat(1, 2), int(1), int(-4)),
            spec("a5", int(-2), int(0), int(7)),
            spec("a6", int(1), int(5), rat(2, 3)),
            spec("a7", int(5), int(-1), int(2)),
        ],
        "sklyanin" => vec![
            spec("J1", int(1), int(2), int(-3)),
            spec("J2", int(2), int(-1), rat(5, 2)),
            spec("J3", int(3), rat(1, 2), int(7)),
            spec("lambda", rat(1, 4), rat(1, 4), rat(1, 4)),
        ],
        "quadrics61" => vec![spec("k", int(2), rat(1, 2), int(-3))],
        "q5" => vec![spec("k", int(2), rat(3, 2), rat(-5, 7))],
        "euler_top" => vec![
            spec("J1", int(1), int(2), rat(-1, 2)),
            spec("J2", int(2), int(5), int(3)),
            spec("J3", int(3), rat(1, 3), int(4)),
        ],
        "dell" => vec![
            spec("k", rat(1, 2), rat(1, 3), rat(2, 3)),
            spec("kt", int(1), int(2), rat(1, 2)),
            spec("g2", int(4), int(9), rat(1, 4)),
            spec("E", rat(1, 2), rat(1, 3), int(1)),
        ],
        "fairlie" => vec![spec("g2", int(4), int(1), rat(9, 4))],
        "canonical_cone4" => vec![
            spec("a", int(2), int(0), rat(1, 3)),
            spec("b", int(-1), int(4), int(2)),
            spec("c", int(3), int(1), rat(-3, 2)),
            spec("d", int(1), int(-2), int(5)),
        ],
        "dell_nambu" => vec![
            spec("k", rat(1, 2), rat(1, 3), rat(2, 3)),
            spec("g2", int(4), int(9), rat(1, 4)),
            spec("E", rat(1, 2), rat(1, 3), int(1)),
        ],
        other => return Err(Error::UnknownEntry(other.to_string())),
    })
}

/// The default binding followed by the two alternates.
pub fn bindings(name: &str) -> Result<Vec<Vec<(String, Rational)>>> {
    let specs = param_specs(name)?;
    Ok((0..3)
        .map(|slot| {
            specs
                .iter()
                .map(|s| {
                    let v = match slot {
                        0 => s.default.clone(),
                        n => s.alternates[n - 1].clone(),
                    };
                    (s.name.to_string(), v)
                })
                .collect()
        })
        .collect())
}

pub fn build_default(name: &str) -> Result<CatalogInstance> {
    build(name, &[])
}

/// Build `name` with the given overrides; unspecified parameters take defaults.
pub fn build(name: &str, overrides: &[(String, Rational)]) -> Result<CatalogInstance> {
    let specs = param_specs(name)?;
    for (k, _) in overrides {
        if !specs.iter().any(|s| s.name == k) {
            return Err(Error::ParameterGuard(format!(
                "`{name}` has no parameter `{k}`"
            )));
        }
    }
    let params: Vec<(String, Rational)> = specs
        .iter()
        .map(|s| {
            let v = overrides
                .iter()
                .rev()
                .find(|(k, _)| k == s.name)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| s.default.clone());
            (s.name.to_string(), v)
        })
        .collect();
    let b = Builder {
        name: name.to_string(),
        params,
    };
    match name {
        "q3" => b.q3(),
        "mirror_y" => b.mirror(MirrorMap::Y),
        "mirror_z" => b.mirror(MirrorMap::Z),
        "markov" => b.markov(),
        "bdu_casimirs" => b.bdu(),
        "askey_wilson" => b.askey_wilson(),
        "sklyanin" => b.sklyanin(),
        "quadrics61" => b.quadrics61(),
        "q5" => b.q5(),
        "euler_top" => b.euler_top(),
        "dell" => b.dell(),
        "fairlie" => b.fairlie(),
        "fermat_k3" => b.fermat(),
        "singular_k3_affine" => b.singular_affine(),
        "singular_k3_split" => b.singular_split(),
        "canonical_cone4" => b.cone4(),
        "dell_nambu" => b.dell_nambu(),
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

#[derive(Clone, Copy)]
enum MirrorMap {
    Y,
    Z,
}

/// Monomial change `y1 = x1, y2 = x2 x3^(-1/2), y3 = x3^(3/2)`.
pub fn mirror_map_y() -> MonomialMap {
    let (o, z) = (exp_int(1), exp_int(0));
    MonomialMap::from_rows(
        Vars::numbered("x", 3),
        Vars::numbered("y", 3),
        vec![vec![o, z, z], vec![z, o, exp(-1, 2)], vec![z, z, exp(3, 2)]],
    )
    .expect("invertible")
}

/// Monomial change `z1 = x1^(-3/4) x2^(3/2), z2 = x1^(1/4) x2^(-1/2) x3, z3 = x1^(3/2)`.
pub fn mirror_map_z() -> MonomialMap {
    let z = exp_int(0);
    MonomialMap::from_rows(
        Vars::numbered("x", 3),
        Vars::numbered("z", 3),
        vec![
            vec![exp(-3, 4), exp(3, 2), z],
            vec![exp(1, 4), exp(-1, 2), exp_int(1)],
            vec![exp(3, 2), z, z],
        ],
    )
    .expect("invertible")
}

/// Generic model: `vars`, Casimirs, structure and checks, with defaults for the rest.
struct Draft {
    vars: Vars,
    casimirs: Vec<(String, PolyExpr)>,
    model: Model,
    checks: Vec<CheckKind>,
    expect: Vec<(CheckKind, String)>,
    weights: Option<Vec<Exponent>>,
    homogeneity: Homogeneity,
    lets: Vec<(String, PolyExpr)>,
    hamiltonians: Vec<PolyExpr>,
    integration: Option<Integration>,
}

impl Draft {
    fn new(vars: &Vars, model: Model) -> Self {
        Draft {
            vars: vars.clone(),
            casimirs: Vec::new(),
            model,
            checks: Vec::new(),
            expect: Vec::new(),
            weights: None,
            homogeneity: Homogeneity::Require,
            lets: Vec::new(),
            hamiltonians: Vec::new(),
            integration: None,
        }
    }
}

use CheckKind::*;

struct Builder {
    name: String,
    params: Vec<(String, Rational)>,
}

impl Builder {
    fn p(&self, name: &str) -> Rational {
        self.params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .expect("declared parameter")
    }

    /// Parse `text` over `vars` with parameters in scope.
    fn poly(&self, vars: &Vars, text: &str) -> PolyExpr {
        let tokens = tokenize(text).expect("catalog formula tokenizes");
        let params = &self.params;
        let names = |n: &str| {
            params
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, v)| PolyExpr::constant(vars, v.clone()))
        };
        let mut cur = Cursor::new(&tokens);
        let p = ExprParser::new(vars, &names)
            .expr(&mut cur)
            .unwrap_or_else(|e| panic!("catalog formula `{text}`: {e}"));
        assert!(cur.at_eof(), "catalog formula `{text}` has trailing input");
        p
    }

    fn guard(&self, ok: bool, msg: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterGuard(format!("{}: {msg}", self.name)))
        }
    }

    fn finish(self, d: Draft) -> Result<CatalogInstance> {
        Ok(CatalogInstance {
            name: self.name,
            params: self.params,
            vars: d.vars,
            weights: d.weights,
            homogeneity: d.homogeneity,
            lets: d.lets,
            casimirs: d.casimirs,
            model: d.model,
            hamiltonians: d.hamiltonians,
            checks: d.checks,
            expect: d.expect,
            integration: d.integration,
        })
    }

    fn jacobian(&self, vars: &Vars, casimirs: &[(String, PolyExpr)], lambda: Rational) -> Result<Model> {
        let qs: Vec<PolyExpr> = casimirs.iter().map(|(_, q)| q.clone()).collect();
        Ok(Model::Poisson(jacobian_structure(
            vars,
            &qs,
            &PolyExpr::constant(vars, lambda),
        )?))
    }

    fn q3_casimir(&self, vars: &Vars) -> PolyExpr {
        self.poly(vars, "1/3*(x1^3 + x2^3 + x3^3) + k*x1*x2*x3")
    }

    fn q3(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 3);
        let cas = vec![("P".to_string(), self.q3_casimir(&vars))];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(1))?);
        d.casimirs = cas;
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Extendability, Plucker, Rank];
        d.expect = vec![
            (Theorem31, "1".into()),
            (Rank, "2".into()),
            (Extendability, "true".into()),
        ];
        self.finish(d)
    }

    fn mirror(self, which: MirrorMap) -> Result<CatalogInstance> {
        let x = Vars::numbered("x", 3);
        let p = self.q3_casimir(&x);
        let q3 = jacobian_structure(&x, std::slice::from_ref(&p), &PolyExpr::one(&x))?;
        let (map, weights) = match which {
            MirrorMap::Y => (mirror_map_y(), [2, 1, 3]),
            MirrorMap::Z => (mirror_map_z(), [1, 1, 2]),
        };
        let moved = transport_bracket(q3.matrix(), &map)?;
        let ps = moved.into_structure()?;
        let vars = map.target().clone();
        let mut d = Draft::new(&vars, Model::Poisson(ps));
        d.casimirs = vec![("P".to_string(), p.substitute(&map)?)];
        d.weights = Some(weights.iter().map(|&w| exp_int(w)).collect());
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Rank];
        d.expect = vec![(Rank, "2".into())];
        self.finish(d)
    }

    fn markov(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 3);
        let cas = vec![(
            "P".to_string(),
            self.poly(&vars, "x1^2 + x2^2 + x3^2 + 3*x1*x2*x3"),
        )];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(1))?);
        d.casimirs = cas;
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![Jacobi, Casimirs, Theorem31, Extendability, Rank];
        d.expect = vec![(Theorem31, "1".into()), (Extendability, "true".into())];
        self.finish(d)
    }

    fn bdu(self) -> Result<CatalogInstance> {
        let vars = Vars::new(["p", "q", "r", "x", "y", "z"]);
        let ps = PoissonStructure::from_table(&vars, [])?;
        let mut d = Draft::new(&vars, Model::Poisson(ps));
        d.casimirs = vec![
            (
                "P1".to_string(),
                self.poly(
                    &vars,
                    "p^2 + q^2 + r^2 + x^2 + y^2 + z^2 - p*q*x - p*r*y - q*r*z - x*y*z + p*r*x*z",
                ),
            ),
            ("P2".to_string(), self.poly(&vars, "p*z + x*r - q*y")),
        ];
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![DegreeSum, BduRelation];
        self.finish(d)
    }

    fn askey_wilson(self) -> Result<CatalogInstance> {
        let vars = Vars::new(["x", "y", "z"]);
        let cas = vec![(
            "P".to_string(),
            self.poly(
                &vars,
                "z^2 - (a*x^2*y^2 + a1*x^2*y + a2*x*y^2 + a3*x^2 + a4*y^2 + a5*x*y + a6*x + a7*y)",
            ),
        )];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(1))?);
        d.casimirs = cas;
        d.weights = Some(vec![exp_int(1), exp_int(1), exp_int(2)]);
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum];
        d.expect = vec![(Theorem31, "1".into()), (DegreeSum, "true".into())];
        self.finish(d)
    }

    fn sklyanin(self) -> Result<CatalogInstance> {
        let (j1, j2, j3) = (self.p("J1"), self.p("J2"), self.p("J3"));
        self.guard(j1 != j2 && j2 != j3 && j1 != j3, "J1, J2, J3 must be pairwise distinct")?;
        self.guard(!self.p("lambda").is_zero(), "lambda must be nonzero")?;
        let vars = Vars::numbered("x", 4);
        let cas = vec![
            ("Q1".to_string(), self.poly(&vars, "x1^2 + x2^2 + x3^2")),
            (
                "Q2".to_string(),
                self.poly(&vars, "x4^2 + J1*x1^2 + J2*x2^2 + J3*x3^2"),
            ),
        ];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, self.p("lambda"))?);
        d.casimirs = cas;
        d.hamiltonians = vec![PolyExpr::var(&vars, 3)];
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Plucker, Rank];
        d.expect = vec![(Plucker, "true".into()), (Rank, "2".into()), (DegreeSum, "true".into())];
        self.finish(d)
    }

    fn quadrics61(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 4);
        let k = self.p("k");
        let x = |i: usize| PolyExpr::var(&vars, i % 4);
        let mut table = Vec::new();
        for i in 0..4 {
            let adj = &(&x(i) * &x(i + 1)).scale(&(&k * &k)) - &(&x(i + 2) * &x(i + 3));
            let opp = (&(&x(i + 3) * &x(i + 3)) - &(&x(i + 1) * &x(i + 1))).scale(&k);
            table.push((i, (i + 1) % 4, adj));
            table.push((i, (i + 2) % 4, opp));
        }
        let ps = PoissonStructure::from_table(&vars, table)?;
        let mut d = Draft::new(&vars, Model::Poisson(ps));
        d.casimirs = vec![
            ("p1".to_string(), self.poly(&vars, "1/2*(x1^2 + x3^2) + k*x2*x4")),
            ("p2".to_string(), self.poly(&vars, "1/2*(x2^2 + x4^2) + k*x1*x3")),
        ];
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Plucker, Rank];
        d.expect = vec![(Theorem31, "-1".into()), (Plucker, "true".into())];
        self.finish(d)
    }

    fn q5(self) -> Result<CatalogInstance> {
        let k = self.p("k");
        self.guard(!k.is_zero(), "k must be nonzero")?;
        let vars = Vars::numbered_from("x", 0, 5);
        let ps = PoissonStructure::from_table(&vars, q5_table(&vars, &k))?;
        let mut d = Draft::new(&vars, Model::Poisson(ps));
        d.casimirs = vec![("P".to_string(), q5_casimir(&vars, &k))];
        d.checks = vec![Jacobi, Casimirs, Theorem31, Plucker, Rank, DegreeSum];
        d.expect = vec![
            (Theorem31, "1/5".into()),
            (Plucker, "false".into()),
            (Rank, "4".into()),
        ];
        self.finish(d)
    }

    fn euler_top(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 3);
        let ps = PoissonStructure::from_table(
            &vars,
            [
                (0, 1, PolyExpr::var(&vars, 2)),
                (1, 2, PolyExpr::var(&vars, 0)),
                (2, 0, PolyExpr::var(&vars, 1)),
            ],
        )?;
        let mut d = Draft::new(&vars, Model::Poisson(ps));
        d.casimirs = vec![("Q1".to_string(), self.poly(&vars, "1/2*(x1^2 + x2^2 + x3^2)"))];
        let h = self.poly(&vars, "1/2*(J1*x1^2 + J2*x2^2 + J3*x3^2)");
        d.lets = vec![("H".to_string(), h.clone())];
        d.hamiltonians = vec![h];
        d.checks = vec![Jacobi, Casimirs, Theorem31, Rank];
        d.expect = vec![(Theorem31, "1".into()), (Rank, "2".into())];
        d.integration = Some(Integration {
            x0: vec![1.0, 0.5, 0.25],
            step: 1e-3,
            t_end: 10.0,
            monitor: vec!["Q1".into(), "H".into()],
        });
        self.finish(d)
    }

    fn dell_quadrics(&self, vars: &Vars) -> Vec<(String, PolyExpr)> {
        vec![
            ("Q1".to_string(), self.poly(vars, "x1^2 - x2^2")),
            ("Q2".to_string(), self.poly(vars, "x1^2 - x3^2")),
            ("Q3".to_string(), self.poly(vars, "-g2*x1^2 + x4^2 - x5^2")),
            ("Q4".to_string(), self.poly(vars, "-g2*x1^2 + x4^2 + x6^2/kt^2")),
        ]
    }

    fn dell(self) -> Result<CatalogInstance> {
        let kt = self.p("kt");
        self.guard(self.p("g2").is_positive(), "g2 must be positive")?;
        self.guard(!kt.is_zero(), "kt must be nonzero")?;
        let vars = Vars::numbered("x", 6);
        let cas = self.dell_quadrics(&vars);
        let lambda = -(&kt * &kt) / int(16);
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, lambda)?);
        d.casimirs = cas;
        d.hamiltonians = vec![PolyExpr::var(&vars, 4)];
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Plucker, Rank];
        d.expect = vec![
            (Rank, "2".into()),
            (Plucker, "true".into()),
            (DegreeSum, "false".into()),
        ];
        d.integration = Some(Integration {
            x0: dell_initial_point(&self.p("k"), &self.p("g2"), &self.p("E")),
            step: 1e-3,
            t_end: 10.0,
            monitor: vec!["Q1".into(), "Q2".into(), "Q3".into(), "Q4".into()],
        });
        self.finish(d)
    }

    fn fairlie(self) -> Result<CatalogInstance> {
        self.guard(self.p("g2").is_positive(), "g2 must be positive")?;
        let vars = Vars::numbered("x", 4);
        let ns = NambuStructure::new(&vars, Vec::new(), PolyExpr::constant(&vars, rat(-1, 8)))?;
        let mut d = Draft::new(&vars, Model::Nambu(ns));
        d.hamiltonians = vec![
            self.poly(&vars, "x1^2 - x2^2"),
            self.poly(&vars, "x1^2 - x3^2"),
            self.poly(&vars, "-g2*x1^2 + x4^2"),
        ];
        d.checks = vec![Fi(3)];
        d.expect = vec![(Fi(3), "true".into())];
        self.finish(d)
    }

    fn fermat(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 3);
        let cas = vec![("P4".to_string(), self.poly(&vars, "1 + x1^4 + x2^4 + x3^4"))];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(-1))?);
        d.casimirs = cas;
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![Jacobi, Casimirs, Theorem31, Extendability];
        d.expect = vec![(Theorem31, "-1".into()), (Extendability, "false".into())];
        self.finish(d)
    }

    fn singular_affine(self) -> Result<CatalogInstance> {
        let vars = Vars::new(["X2", "X3", "X4"]);
        let cas = vec![(
            "P".to_string(),
            self.poly(&vars, "1 + X3^3 + X4^3 - X2^4 - X2*X3^3 + X2*X4^3"),
        )];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(-1))?);
        d.casimirs = cas;
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![Jacobi, Casimirs, Theorem31, Extendability];
        d.expect = vec![(Extendability, "false".into())];
        self.finish(d)
    }

    fn singular_split(self) -> Result<CatalogInstance> {
        let vars = Vars::new(["X2", "X3", "X4", "Z"]);
        let cas = vec![
            ("P1".to_string(), self.poly(&vars, "1 + Z*X2")),
            (
                "P2".to_string(),
                self.poly(&vars, "X2^3 + X3^3 - X4^3 + Z*(1 + X3^3 + X4^3)"),
            ),
        ];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(1))?);
        d.casimirs = cas;
        d.homogeneity = Homogeneity::LeadingForm;
        d.checks = vec![Jacobi, Casimirs, Theorem31, Plucker];
        d.expect = vec![(Plucker, "true".into())];
        self.finish(d)
    }

    fn cone4(self) -> Result<CatalogInstance> {
        let vars = Vars::numbered("x", 3);
        let cas = vec![(
            "p".to_string(),
            self.poly(
                &vars,
                "x1^4 + x2^4 + x3^4 + a*x1^2*x2^2 + b*x2^2*x3^2 + c*x3^2*x1^2 + d*x1*x2*x3*(x1 + x2 + x3)",
            ),
        )];
        let mut d = Draft::new(&vars, self.jacobian(&vars, &cas, int(1))?);
        d.casimirs = cas;
        d.checks = vec![Jacobi, Casimirs, Theorem31, DegreeSum, Extendability];
        d.expect = vec![(Extendability, "false".into()), (DegreeSum, "false".into())];
        self.finish(d)
    }

    fn dell_nambu(self) -> Result<CatalogInstance> {
        self.guard(self.p("g2").is_positive(), "g2 must be positive")?;
        let vars = Vars::numbered("x", 5);
        let level = PolyExpr::var(&vars, 4);
        let ns = NambuStructure::new(&vars, vec![level.clone()], PolyExpr::one(&vars))?;
        let mut d = Draft::new(&vars, Model::Nambu(ns));
        d.casimirs = vec![("L".to_string(), level)];
        d.hamiltonians = vec![
            self.poly(&vars, "x1^2 - x2^2"),
            self.poly(&vars, "x1^2 - x3^2"),
            self.poly(&vars, "-g2*x1^2 + x4^2 + x5^2"),
        ];
        d.checks = vec![Fi(2)];
        d.expect = vec![(Fi(2), "true".into())];
        self.finish(d)
    }
}

/// Bracket table of the five-generator elliptic algebra (indices mod 5).
pub fn q5_table(vars: &Vars, k: &Rational) -> Vec<(usize, usize, PolyExpr)> {
    let x = |i: usize| PolyExpr::var(vars, i % 5);
    let k2 = k * k;
    let k3 = &k2 * k;
    let fifth = rat(1, 5);
    let mut out = Vec::new();
    for i in 0..5 {
        let far = &(&(&x(i + 1) * &x(i + 4)).scale(&(-&fifth * (&k2 + int(3) / &k3)))
            + &(&x(i + 2) * &x(i + 3)).scale(&int(2)))
            + (&x(i) * &x(i)).scale(k);
        let near = &(&(&x(i + 2) * &x(i + 3)).scale(&(&fifth * (int(3) * &k2 - int(1) / &k3)))
            + &(&x(i + 1) * &x(i + 4)).scale(&(int(2) / k)))
            - (&x(i) * &x(i)).scale(&(int(1) / &k2));
        out.push(((i + 1) % 5, (i + 4) % 5, far));
        out.push(((i + 2) % 5, (i + 3) % 5, near));
    }
    out
}

/// Degree-5 central element of the five-generator algebra, each coefficient
/// multiplying a full orbit under the cyclic shift `x_i -> x_{i+1}`.
pub fn q5_casimir(vars: &Vars, k: &Rational) -> PolyExpr {
    let k_pow = |e: i32| -> Rational {
        if e >= 0 {
            num_traits::pow(k.clone(), e as usize)
        } else {
            num_traits::pow(k.recip(), (-e) as usize)
        }
    };
    let orbit = |shape: [i64; 5]| -> PolyExpr {
        (0..5).fold(PolyExpr::zero(vars), |acc, shift| {
            let mut e = [0i64; 5];
            for (j, s) in shape.iter().enumerate() {
                e[(j + shift) % 5] = *s;
            }
            acc + PolyExpr::term(vars, Rational::one(), crate::poly::Monomial::from_ints(&e))
        })
    };
    let groups: [(Rational, [i64; 5]); 5] = [
        (-k_pow(-1), [5, 0, 0, 0, 0]),
        (k_pow(-5) - int(3), [3, 1, 0, 0, 1]),
        (k_pow(3) + int(3) * k_pow(-2), [3, 0, 1, 1, 0]),
        (-(int(2) * k_pow(1) + k_pow(-4)), [1, 2, 0, 0, 2]),
        (k_pow(2) - int(2) * k_pow(-3), [1, 0, 2, 2, 0]),
    ];
    let mut p = groups
        .iter()
        .fold(PolyExpr::zero(vars), |acc, (c, shape)| acc + orbit(*shape).scale(c));
    let top = k_pow(4) + int(16) * k_pow(-1) - k_pow(-6);
    p = p + PolyExpr::term(vars, top, crate::poly::Monomial::from_ints(&[1, 1, 1, 1, 1]));
    p
}

/// Point with `x1 = 5/4`, `x2, x3` on the first two quadrics, `x5 = E`,
/// `x4` on the third quadric and `x6 = 1` (positive roots throughout).
pub fn dell_initial_point(k: &Rational, g2: &Rational, e: &Rational) -> Vec<f64> {
    use crate::poly::rational::to_f64;
    let (k, g2, e) = (to_f64(k), to_f64(g2), to_f64(e));
    let x1: f64 = 1.25;
    let x2 = (x1 * x1 - 1.0).sqrt();
    let x3 = (x1 * x1 - k * k).sqrt();
    let x5 = e;
    let x4 = (1.0 + g2 * x1 * x1 + x5 * x5).sqrt();
    vec![x1, x2, x3, x4, x5, 1.0]
}
