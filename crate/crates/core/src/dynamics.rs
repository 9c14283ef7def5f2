//! Polynomial vector fields: Hamiltonian and Nambu flows, symbolic constants
//! of motion, the Nahm decoupling of the four-dimensional Fairlie flow, and
//! fixed-step RK4 integration with invariant-drift monitoring.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::poly::rational::{rational_sqrt, to_f64};
use crate::poly::{int, PolyExpr, Rational, Vars};
use crate::structures::{nambu_bracket, NambuStructure, PoissonStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    vars: Vars,
    components: Vec<PolyExpr>,
}

impl PolyVectorField {
    pub fn new(vars: &Vars, components: Vec<PolyExpr>) -> Result<Self> {
        if components.len() != vars.len() {
            return Err(Error::Arity {
                expected: vars.len(),
                found: components.len(),
            });
        }
        let components = components
            .into_iter()
            .map(|c| {
                c.require_polynomial_grade()?;
                if c.vars() == vars {
                    Ok(c)
                } else {
                    c.reindex(vars)
                }
            })
            .collect::<Result<_>>()?;
        Ok(PolyVectorField {
            vars: vars.clone(),
            components,
        })
    }

    pub fn zero(vars: &Vars) -> Self {
        PolyVectorField {
            vars: vars.clone(),
            components: vec![PolyExpr::zero(vars); vars.len()],
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn components(&self) -> &[PolyExpr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &PolyExpr {
        &self.components[i]
    }

    /// `sum_i dF/dx_i * xdot_i`.
    pub fn lie_derivative(&self, f: &PolyExpr) -> Result<PolyExpr> {
        let f = if f.vars() == &self.vars {
            f.clone()
        } else {
            f.reindex(&self.vars)?
        };
        Ok(self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(PolyExpr::zero(&self.vars), |acc, (i, c)| {
                acc + &f.partial_derivative(i) * c
            }))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PolyVectorField {
            vars: self.vars.clone(),
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }
}

/// `xdot_i = {x_i, H}`.
pub fn hamiltonian_vector_field(ps: &PoissonStructure, h: &PolyExpr) -> Result<PolyVectorField> {
    let vars = ps.vars();
    let h = if h.vars() == vars {
        h.clone()
    } else {
        h.reindex(vars)?
    };
    h.require_polynomial_grade()?;
    let dh = h.gradient();
    let n = ps.dim();
    let comps = (0..n)
        .map(|i| {
            (0..n).fold(PolyExpr::zero(vars), |acc, j| {
                let p = ps.entry(i, j);
                if p.is_zero() || dh[j].is_zero() {
                    acc
                } else {
                    acc + p * &dh[j]
                }
            })
        })
        .collect();
    PolyVectorField::new(vars, comps)
}

/// `xdot_i = {H_1, .., H_{r-1}, x_i}`.
pub fn nambu_vector_field(ns: &NambuStructure, hamiltonians: &[PolyExpr]) -> Result<PolyVectorField> {
    if hamiltonians.len() + 1 != ns.arity() {
        return Err(Error::Arity {
            expected: ns.arity() - 1,
            found: hamiltonians.len(),
        });
    }
    let vars = ns.vars();
    let comps = (0..ns.dim())
        .map(|i| {
            let mut args = hamiltonians.to_vec();
            args.push(PolyExpr::var(vars, i));
            nambu_bracket(ns, &args)
        })
        .collect::<Result<_>>()?;
    PolyVectorField::new(vars, comps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conservation {
    pub conserved: bool,
    pub residual: PolyExpr,
}

pub fn constants_of_motion_check(
    field: &PolyVectorField,
    invariants: &[PolyExpr],
) -> Result<Vec<Conservation>> {
    invariants
        .iter()
        .map(|f| {
            let residual = field.lie_derivative(f)?;
            Ok(Conservation {
                conserved: residual.is_zero(),
                residual,
            })
        })
        .collect()
}

/// The four-dimensional flow `xdot_i = prod_{j != i} x_j` with `g2` on the last component.
pub fn fairlie_field(vars: &Vars, g2: &Rational) -> Result<PolyVectorField> {
    if vars.len() != 4 {
        return Err(Error::Arity {
            expected: 4,
            found: vars.len(),
        });
    }
    let x = |i: usize| PolyExpr::var(vars, i);
    let comps = vec![
        &(&x(1) * &x(2)) * &x(3),
        &(&x(0) * &x(2)) * &x(3),
        &(&x(0) * &x(1)) * &x(3),
        (&(&x(0) * &x(1)) * &x(2)).scale(g2),
    ];
    PolyVectorField::new(vars, comps)
}

/// `[u+, v+, w+, u-, v-, w-]` with multiplier `a`:
/// `u = x3 x4 +- a x1 x2`, `v = x2 x4 +- a x1 x3`, `w = x1 x4 +- a x2 x3`.
pub fn decoupling_variables(vars: &Vars, a: &PolyExpr) -> Vec<PolyExpr> {
    let x = |i: usize| PolyExpr::var(vars, i);
    let pairs = [((2, 3), (0, 1)), ((1, 3), (0, 2)), ((0, 3), (1, 2))];
    let mut out = Vec::with_capacity(6);
    for sign in [1, -1] {
        for ((p, q), (r, s)) in pairs {
            let base = &x(p) * &x(q);
            let twist = &(a * &x(r)) * &x(s);
            out.push(if sign > 0 { base + twist } else { base - twist });
        }
    }
    out
}

pub const DECOUPLING_NAMES: [&str; 6] = ["u+", "v+", "w+", "u-", "v-", "w-"];

#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingReport {
    pub g2: Rational,
    /// Exact multiplier when one exists over the rationals.
    pub a: Option<Rational>,
    /// Floating multiplier when the exact solve has no rational root.
    pub a_float: Option<f64>,
    /// `rhs - lhs` of the six top equations at the solved multiplier.
    pub solved_residuals: Vec<PolyExpr>,
    /// Same residuals with the multiplier set to `g2` itself.
    pub literal_residuals: Vec<PolyExpr>,
    pub plus_residual: PolyExpr,
    pub minus_residual: PolyExpr,
    pub nahm_match: bool,
    pub literal_match: bool,
    /// `u+^2 - v+^2 = (x3^2 - x2^2)(x4^2 - a^2 x1^2)` at the solved multiplier.
    pub factored_identity: Option<bool>,
    pub inconsistency: Option<String>,
}

/// Solve for the multiplier `a` making both triples `u,v,w` Euler-Nahm tops
/// (`udot = v w` and cyclic) under the Fairlie flow with parameter `g2`.
pub fn decoupling_check(g2: &Rational) -> Result<DecouplingReport> {
    let all = Vars::new(["x1", "x2", "x3", "x4", "a"]);
    let xs = Vars::numbered("x", 4);
    let a = PolyExpr::var(&all, 4);
    let field = {
        let f = fairlie_field(&xs, g2)?;
        let mut comps: Vec<PolyExpr> = f
            .components()
            .iter()
            .map(|c| c.reindex(&all))
            .collect::<Result<_>>()?;
        comps.push(PolyExpr::zero(&all));
        PolyVectorField::new(&all, comps)?
    };
    let residuals = top_residuals(&field, &decoupling_variables(&all, &a))?;

    // Each x-monomial coefficient is a polynomial in `a`; collect them.
    let mut univariate: Vec<Vec<Rational>> = Vec::new();
    for r in &residuals {
        let mut by_x: BTreeMap<Vec<i64>, Vec<Rational>> = BTreeMap::new();
        for (m, c) in r.terms() {
            let ex: Vec<i64> = m.exponents()[..4].iter().map(|e| e.to_integer()).collect();
            let da = m.exponent(4).to_integer() as usize;
            let v = by_x.entry(ex).or_default();
            if v.len() <= da {
                v.resize(da + 1, Rational::zero());
            }
            v[da] += c;
        }
        univariate.extend(by_x.into_values());
    }

    let mut inconsistency = None;
    let mut a_exact = None;
    let mut a_float = None;
    let eval = |coeffs: &[Rational], x: &Rational| {
        coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    };
    if let Some(first) = univariate.iter().find(|u| u.iter().skip(1).any(|c| !c.is_zero())) {
        let (exact, float) = real_roots(first);
        a_exact = exact
            .into_iter()
            .find(|r| univariate.iter().all(|u| eval(u, r).is_zero()));
        if a_exact.is_none() {
            a_float = float.into_iter().find(|r| {
                univariate.iter().all(|u| {
                    let scale = u.iter().map(|c| to_f64(c).abs()).fold(1.0, f64::max);
                    let v = u.iter().rev().fold(0.0, |acc, c| acc * r + to_f64(c));
                    v.abs() <= 1e-12 * scale
                })
            });
            if a_float.is_none() {
                inconsistency = Some("no multiplier solves every coefficient equation".into());
            }
        }
    } else if univariate.iter().any(|u| u.iter().any(|c| !c.is_zero())) {
        inconsistency = Some("residual independent of the multiplier does not vanish".into());
    } else {
        a_exact = Some(Rational::zero());
    }

    let at = |value: &Rational| -> Result<Vec<PolyExpr>> {
        let images: Vec<PolyExpr> = (0..4)
            .map(|i| PolyExpr::var(&xs, i))
            .chain(std::iter::once(PolyExpr::constant(&xs, value.clone())))
            .collect();
        residuals.iter().map(|r| r.compose(&images)).collect()
    };
    let literal_residuals = at(g2)?;
    let solved_residuals = match &a_exact {
        Some(v) => at(v)?,
        None => Vec::new(),
    };
    let nahm_match = match &a_exact {
        Some(_) => solved_residuals.iter().all(PolyExpr::is_zero),
        None => a_float.is_some(),
    };
    let factored_identity = a_exact.as_ref().map(|v| {
        let av = PolyExpr::constant(&xs, v.clone());
        let d = decoupling_variables(&xs, &av);
        let x = |i: usize| PolyExpr::var(&xs, i);
        let lhs = &(&d[0] * &d[0]) - &(&d[1] * &d[1]);
        let rhs = (&(&x(2) * &x(2)) - &(&x(1) * &x(1)))
            * (&(&x(3) * &x(3)) - &(&(&av * &av) * &(&x(0) * &x(0))));
        lhs == rhs
    });
    Ok(DecouplingReport {
        g2: g2.clone(),
        plus_residual: literal_residuals[0].clone(),
        minus_residual: literal_residuals[3].clone(),
        literal_match: literal_residuals.iter().all(PolyExpr::is_zero),
        a: a_exact,
        a_float,
        solved_residuals,
        literal_residuals,
        nahm_match,
        factored_identity,
        inconsistency,
    })
}

/// `v w - udot`, `w u - vdot`, `u v - wdot` for each triple.
fn top_residuals(field: &PolyVectorField, d: &[PolyExpr]) -> Result<Vec<PolyExpr>> {
    let mut out = Vec::with_capacity(6);
    for t in [&d[0..3], &d[3..6]] {
        for k in 0..3 {
            let rhs = &t[(k + 1) % 3] * &t[(k + 2) % 3];
            out.push(rhs - field.lie_derivative(&t[k])?);
        }
    }
    Ok(out)
}

/// Roots of a polynomial of degree at most 2 given by ascending coefficients:
/// exact rational roots, plus floating roots, each sorted descending.
fn real_roots(c: &[Rational]) -> (Vec<Rational>, Vec<f64>) {
    let deg = c.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
    let mut exact = Vec::new();
    let mut float = Vec::new();
    match deg {
        1 => {
            let r = -&c[0] / &c[1];
            float.push(to_f64(&r));
            exact.push(r);
        }
        2 => {
            let (a2, b, c0) = (&c[2], &c[1], &c[0]);
            let disc = b * b - int(4) * a2 * c0;
            if !disc.is_negative() {
                let two_a = int(2) * a2;
                if let Some(s) = rational_sqrt(&disc) {
                    exact.push((-b + &s) / &two_a);
                    exact.push((-b - &s) / &two_a);
                }
                let sd = to_f64(&disc).sqrt();
                let (bf, af) = (to_f64(b), to_f64(&two_a));
                float.push((-bf + sd) / af);
                float.push((-bf - sd) / af);
            }
        }
        _ => {}
    }
    exact.sort_by(|x, y| y.cmp(x));
    exact.dedup();
    float.sort_by(|x, y| y.total_cmp(x));
    (exact, float)
}

/// Scalar type the integrator runs in.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn is_finite(self) -> bool;
    fn abs(self) -> Self;

    fn from_rational(q: &Rational) -> Self {
        match (q.numer().to_f64(), q.denom().to_f64()) {
            (Some(n), Some(d)) => Self::from_f64(n) / Self::from_f64(d),
            _ => Self::from_f64(to_f64(q)),
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn is_finite(self) -> bool {
        self.hi().is_finite() && self.lo().is_finite()
    }
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
}

/// Polynomial flattened for repeated numeric evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly<R> {
    terms: Vec<(R, Vec<(usize, u32)>)>,
}

impl<R: Real> CompiledPoly<R> {
    pub fn new(p: &PolyExpr) -> Result<Self> {
        p.require_polynomial_grade()?;
        let terms = p
            .terms()
            .map(|(m, c)| {
                let powers = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(i, e)| (i, e.to_integer() as u32))
                    .collect();
                (R::from_rational(c), powers)
            })
            .collect();
        Ok(CompiledPoly { terms })
    }

    pub fn eval(&self, x: &[R]) -> R {
        let mut total = R::from_f64(0.0);
        for (c, powers) in &self.terms {
            let mut t = *c;
            for &(i, e) in powers {
                for _ in 0..e {
                    t = t * x[i];
                }
            }
            total = total + t;
        }
        total
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// Double-double arithmetic, so that truncation rather than rounding
    /// dominates the drift at small steps.
    #[default]
    DoubleDouble,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monitor {
    pub name: String,
    pub poly: PolyExpr,
}

impl Monitor {
    pub fn new(name: impl Into<String>, poly: PolyExpr) -> Self {
        Monitor {
            name: name.into(),
            poly,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryReport {
    pub variables: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitor_names: Vec<String>,
    pub monitor_values: Vec<Vec<f64>>,
    /// Maximum over steps of `|F(x(t)) - F(x0)| / max(1, |F(x0)|)`.
    pub drift: BTreeMap<String, f64>,
}

impl TrajectoryReport {
    pub fn max_drift(&self) -> f64 {
        self.drift.values().copied().fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    /// `t,x1,..,xn,<monitors>` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.variables.iter().cloned());
        header.extend(self.monitor_names.iter().cloned());
        writeln!(out, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![fmt17(*t)];
            row.extend(self.states[k].iter().map(|v| fmt17(*v)));
            row.extend(self.monitor_values[k].iter().map(|v| fmt17(*v)));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Classical fixed-step RK4 from `x0` until `t_end`.
pub fn integrate(
    field: &PolyVectorField,
    x0: &[f64],
    step: f64,
    t_end: f64,
    monitored: &[Monitor],
    precision: Precision,
) -> Result<TrajectoryReport> {
    if x0.len() != field.dim() {
        return Err(Error::Arity {
            expected: field.dim(),
            found: x0.len(),
        });
    }
    if !(step > 0.0 && step.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Contract(format!(
            "integration needs positive finite step and horizon, got {step} and {t_end}"
        )));
    }
    match precision {
        Precision::Double => run::<f64>(field, x0, step, t_end, monitored),
        Precision::DoubleDouble => run::<TwoFloat>(field, x0, step, t_end, monitored),
    }
}

fn run<R: Real>(
    field: &PolyVectorField,
    x0: &[f64],
    step: f64,
    t_end: f64,
    monitored: &[Monitor],
) -> Result<TrajectoryReport> {
    let rhs: Vec<CompiledPoly<R>> = field
        .components()
        .iter()
        .map(CompiledPoly::new)
        .collect::<Result<_>>()?;
    let monitors: Vec<CompiledPoly<R>> = monitored
        .iter()
        .map(|m| {
            let p = if m.poly.vars() == field.vars() {
                m.poly.clone()
            } else {
                m.poly.reindex(field.vars())?
            };
            CompiledPoly::new(&p)
        })
        .collect::<Result<_>>()?;
    let n = x0.len();
    let nsteps = (t_end / step).round().max(1.0) as usize;
    let h = R::from_f64(step);
    let half = R::from_f64(0.5);
    let sixth = R::from_f64(1.0) / R::from_f64(6.0);
    let two = R::from_f64(2.0);
    let f = |x: &[R]| -> Vec<R> { rhs.iter().map(|p| p.eval(x)).collect() };

    let mut x: Vec<R> = x0.iter().map(|&v| R::from_f64(v)).collect();
    let initial: Vec<R> = monitors.iter().map(|m| m.eval(&x)).collect();
    let mut drift = vec![0.0f64; monitors.len()];
    let mut times = Vec::with_capacity(nsteps + 1);
    let mut states = Vec::with_capacity(nsteps + 1);
    let mut values = Vec::with_capacity(nsteps + 1);
    times.push(0.0);
    states.push(x0.to_vec());
    values.push(initial.iter().map(|v| v.to_f64()).collect::<Vec<_>>());

    let mut tmp = vec![R::from_f64(0.0); n];
    for k in 1..=nsteps {
        let k1 = f(&x);
        for i in 0..n {
            tmp[i] = x[i] + half * h * k1[i];
        }
        let k2 = f(&tmp);
        for i in 0..n {
            tmp[i] = x[i] + half * h * k2[i];
        }
        let k3 = f(&tmp);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        let k4 = f(&tmp);
        for i in 0..n {
            x[i] = x[i] + h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                last_time: (k - 1) as f64 * step,
            });
        }
        let row: Vec<R> = monitors.iter().map(|m| m.eval(&x)).collect();
        for (j, v) in row.iter().enumerate() {
            let denom = initial[j].abs().to_f64().max(1.0);
            let d = (*v - initial[j]).abs().to_f64() / denom;
            if d > drift[j] {
                drift[j] = d;
            }
        }
        times.push(k as f64 * step);
        states.push(x.iter().map(|v| v.to_f64()).collect());
        values.push(row.iter().map(|v| v.to_f64()).collect());
    }
    Ok(TrajectoryReport {
        variables: field.vars().names().to_vec(),
        times,
        states,
        monitor_names: monitored.iter().map(|m| m.name.clone()).collect(),
        monitor_values: values,
        drift: monitored
            .iter()
            .map(|m| m.name.clone())
            .zip(drift)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn zero_field_is_static() {
        let vars = Vars::numbered("x", 2);
        let f = PolyVectorField::zero(&vars);
        let q = PolyExpr::parse("x1^2 + x2", &vars).unwrap();
        assert!(constants_of_motion_check(&f, &[q.clone()]).unwrap()[0].conserved);
        let r = integrate(&f, &[1.0, 2.0], 0.1, 1.0, &[Monitor::new("q", q)], Precision::Double)
            .unwrap();
        assert_eq!(r.final_state(), &[1.0, 2.0]);
        assert_eq!(r.max_drift(), 0.0);
        assert_eq!(r.times.len(), 11);
    }

    #[test]
    fn roots_of_quadratics() {
        let (e, f) = real_roots(&[int(-4), int(0), int(1)]);
        assert_eq!(e, vec![int(2), int(-2)]);
        assert_eq!(f, vec![2.0, -2.0]);
        let (e, f) = real_roots(&[int(-2), int(0), int(1)]);
        assert!(e.is_empty());
        assert!((f[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn non_square_parameter_falls_back_to_floats() {
        let r = decoupling_check(&int(2)).unwrap();
        assert!(r.a.is_none());
        assert!((r.a_float.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.nahm_match);
        let r = decoupling_check(&rat(9, 4)).unwrap();
        assert_eq!(r.a, Some(rat(3, 2)));
    }

    #[test]
    fn csv_layout() {
        let vars = Vars::numbered("x", 1);
        let f = PolyVectorField::new(&vars, vec![PolyExpr::one(&vars)]).unwrap();
        let r = integrate(&f, &[0.0], 0.5, 1.0, &[], Precision::Double).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,x1");
        assert_eq!(lines[2], "5.0000000000000000e-1,5.0000000000000000e-1");
    }
}
