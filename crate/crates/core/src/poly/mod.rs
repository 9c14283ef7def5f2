//! Exact sparse multivariate polynomials over the rationals.
//!
//! Exponents are rational so that monomial changes of variables with
//! fractional powers can be carried through; everything that needs a genuine
//! polynomial (division, exact evaluation, bracket construction) checks
//! [`PolyExpr::is_polynomial_grade`] first.

mod map;
mod monomial;
pub mod rational;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

pub use map::MonomialMap;
pub use monomial::Monomial;
pub use rational::{exp, exp_int, int, rat, Exponent, Rational};

use crate::error::{Error, Result};
use rational::{is_integer_exponent, rational_pow};

/// Ordered, named variable set shared by all polynomials of one ring.
#[derive(Clone)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vars(names.into_iter().map(Into::into).collect())
    }

    /// `prefix1 .. prefixN`
    pub fn numbered(prefix: &str, n: usize) -> Self {
        Vars::numbered_from(prefix, 1, n)
    }

    /// `prefix{start} .. prefix{start+n-1}`
    pub fn numbered_from(prefix: &str, start: usize, n: usize) -> Self {
        Vars::new((start..start + n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Vars {}

impl std::hash::Hash for Vars {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(" "))
    }
}

/// Result of [`PolyExpr::exact_divisibility`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    pub divisible: bool,
    pub quotient: Option<PolyExpr>,
    pub remainder: PolyExpr,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PolyExpr {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl PolyExpr {
    pub fn zero(vars: &Vars) -> Self {
        PolyExpr {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn var(vars: &Vars, index: usize) -> Self {
        assert!(index < vars.len(), "variable index {index} out of range");
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial::var(vars.len(), index), Rational::one());
        p
    }

    pub fn var_named(vars: &Vars, name: &str) -> Option<Self> {
        vars.index_of(name).map(|i| Self::var(vars, i))
    }

    pub fn term(vars: &Vars, coeff: Rational, monomial: Monomial) -> Self {
        assert_eq!(monomial.nvars(), vars.len());
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(monomial, coeff);
        }
        p
    }

    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), vars.len());
            p.add_term(m, c);
        }
        p
    }

    /// Parse the canonical text form (`1/3*x1^3 - 2*x2*x3^(1/2)`) over `vars`.
    pub fn parse(text: &str, vars: &Vars) -> Result<Self> {
        crate::syntax::parse_poly_str(text, vars)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.nvars()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The single coefficient and monomial of a one-term polynomial.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Greatest term under the graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<Exponent> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn weighted_degree(&self, weights: &[Exponent]) -> Option<Exponent> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    /// Split into weighted-homogeneous pieces keyed by weighted degree.
    pub fn homogeneous_components(&self, weights: &[Exponent]) -> BTreeMap<Exponent, PolyExpr> {
        let mut out: BTreeMap<Exponent, PolyExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weighted_degree(weights))
                .or_insert_with(|| PolyExpr::zero(&self.vars))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn is_weighted_homogeneous(&self, weights: &[Exponent]) -> bool {
        self.homogeneous_components(weights).len() <= 1
    }

    pub fn unit_weights(&self) -> Vec<Exponent> {
        vec![Exponent::one(); self.nvars()]
    }

    pub fn is_polynomial_grade(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial_grade)
    }

    /// Error naming the first offending term when not polynomial-grade.
    pub fn require_polynomial_grade(&self) -> Result<()> {
        for m in self.terms.keys() {
            if let Some(e) = m
                .exponents()
                .iter()
                .find(|e| !is_integer_exponent(**e) || e.is_negative())
            {
                return Err(Error::NotPolynomialGrade {
                    term: render::monomial_string(&self.vars, m),
                    exponent: e.to_string(),
                });
            }
        }
        Ok(())
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Bring two operands onto one variable set; a constant adapts to the other side.
    fn aligned<'a>(&'a self, other: &'a PolyExpr) -> Result<(Vars, PolyExpr, PolyExpr)> {
        if self.vars == other.vars {
            return Ok((self.vars.clone(), self.clone(), other.clone()));
        }
        if other.is_constant() {
            let o = PolyExpr::constant(&self.vars, other.constant_term());
            return Ok((self.vars.clone(), self.clone(), o));
        }
        if self.is_constant() {
            let s = PolyExpr::constant(&other.vars, self.constant_term());
            return Ok((other.vars.clone(), s, other.clone()));
        }
        Err(Error::VariableSet {
            left: self.vars.names().join(" "),
            right: other.vars.names().join(" "),
        })
    }

    pub fn try_add(&self, other: &PolyExpr) -> Result<PolyExpr> {
        if self.vars == other.vars {
            let mut out = self.clone();
            for (m, c) in &other.terms {
                out.add_term(m.clone(), c.clone());
            }
            return Ok(out);
        }
        let (_, a, b) = self.aligned(other)?;
        a.try_add(&b)
    }

    pub fn try_sub(&self, other: &PolyExpr) -> Result<PolyExpr> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &PolyExpr) -> Result<PolyExpr> {
        if self.vars != other.vars {
            let (_, a, b) = self.aligned(other)?;
            return a.try_mul(&b);
        }
        let mut out = PolyExpr::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> PolyExpr {
        PolyExpr {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyExpr {
        if c.is_zero() {
            return PolyExpr::zero(&self.vars);
        }
        PolyExpr {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> PolyExpr {
        PolyExpr {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> PolyExpr {
        let mut acc = PolyExpr::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// General power: nonnegative integers for any polynomial, otherwise only
    /// single terms whose coefficient has an exact rational power.
    pub fn pow_rational(&self, e: Exponent) -> Result<PolyExpr> {
        if is_integer_exponent(e) && !e.is_negative() {
            let k = e
                .to_integer()
                .to_u32()
                .ok_or_else(|| Error::Domain(format!("exponent {e} too large")))?;
            return Ok(self.pow(k));
        }
        let (m, c) = self.as_single_term().ok_or_else(|| {
            Error::Domain(format!(
                "cannot raise multi-term polynomial `{self}` to the power {e}"
            ))
        })?;
        let coeff = rational_pow(c, e)?;
        Ok(PolyExpr::term(&self.vars, coeff, m.pow(e)))
    }

    /// Formal derivative; `d/dx x^r = r x^(r-1)` for rational `r`.
    pub fn partial_derivative(&self, index: usize) -> PolyExpr {
        let mut out = PolyExpr::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e.is_zero() {
                continue;
            }
            let factor = rational::exponent_to_rational(e);
            out.add_term(m.with_exponent(index, e - Exponent::one()), c * factor);
        }
        out
    }

    pub fn derivative_by_name(&self, name: &str) -> Option<PolyExpr> {
        self.vars.index_of(name).map(|i| self.partial_derivative(i))
    }

    pub fn gradient(&self) -> Vec<PolyExpr> {
        (0..self.nvars()).map(|i| self.partial_derivative(i)).collect()
    }

    /// Replace variable `i` by `images[i]`; all images share one variable set,
    /// which becomes the variable set of the result.
    pub fn compose(&self, images: &[PolyExpr]) -> Result<PolyExpr> {
        if images.len() != self.nvars() {
            return Err(Error::Arity {
                expected: self.nvars(),
                found: images.len(),
            });
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        if let Some(bad) = images.iter().find(|p| p.vars != target) {
            return Err(Error::VariableSet {
                left: target.names().join(" "),
                right: bad.vars.names().join(" "),
            });
        }
        let mut cache: BTreeMap<(usize, Exponent), PolyExpr> = BTreeMap::new();
        let mut out = PolyExpr::zero(&target);
        for (m, c) in &self.terms {
            let mut acc = PolyExpr::constant(&target, c.clone());
            for (i, e) in m.exponents().iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let factor = match cache.get(&(i, *e)) {
                    Some(f) => f.clone(),
                    None => {
                        let f = images[i].pow_rational(*e)?;
                        cache.insert((i, *e), f.clone());
                        f
                    }
                };
                acc = &acc * &factor;
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Rewrite `self` (over the map's source variables) in the map's target
    /// variables through the inverse monomial substitution.
    pub fn substitute(&self, map: &MonomialMap) -> Result<PolyExpr> {
        if self.vars != *map.source() {
            return Err(Error::VariableSet {
                left: self.vars.names().join(" "),
                right: map.source().names().join(" "),
            });
        }
        self.compose(&map.inverse_images()?)
    }

    /// Single-divisor division under the graded-lex order.
    pub fn exact_divisibility(&self, divisor: &PolyExpr) -> Result<Division> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.require_polynomial_grade()?;
        divisor.require_polynomial_grade()?;
        let (_, p, q) = self.aligned(divisor)?;
        let (lm, lc) = {
            let (m, c) = q.leading_term().expect("nonzero divisor");
            (m.clone(), c.clone())
        };
        let mut rest = p.clone();
        let mut quotient = PolyExpr::zero(&p.vars);
        let mut remainder = PolyExpr::zero(&p.vars);
        while let Some((m, c)) = rest.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            if lm.divides(&m) {
                let tm = m.div(&lm);
                let tc = &c / &lc;
                quotient.add_term(tm.clone(), tc.clone());
                let sub = q.mul_monomial(&tm).scale(&tc);
                rest = &rest - &sub;
            } else {
                rest.terms.remove(&m);
                remainder.add_term(m, c);
            }
        }
        let divisible = remainder.is_zero();
        Ok(Division {
            divisible,
            quotient: divisible.then_some(quotient),
            remainder,
        })
    }

    /// Exact value at a rational point. Integer exponents only (negative ones
    /// need a nonzero coordinate).
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars() {
            return Err(Error::Arity {
                expected: self.nvars(),
                found: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, e) in point.iter().zip(m.exponents()) {
                if e.is_zero() {
                    continue;
                }
                if !is_integer_exponent(*e) {
                    return Err(Error::Domain(format!(
                        "fractional exponent {e} in exact evaluation"
                    )));
                }
                t *= rational_pow(x, *e)?;
            }
            total += t;
        }
        Ok(total)
    }

    /// Double-precision value. Fractional exponents need positive coordinates.
    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars() {
            return Err(Error::Arity {
                expected: self.nvars(),
                found: point.len(),
            });
        }
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational::to_f64(c);
            for (&x, e) in point.iter().zip(m.exponents()) {
                if e.is_zero() {
                    continue;
                }
                if is_integer_exponent(*e) {
                    if x == 0.0 && e.is_negative() {
                        return Err(Error::Domain("zero raised to a negative power".into()));
                    }
                    t *= x.powi(e.to_integer() as i32);
                } else {
                    if x < 0.0 {
                        return Err(Error::Domain(format!(
                            "negative base {x} with fractional exponent {e}"
                        )));
                    }
                    t *= x.powf(*e.numer() as f64 / *e.denom() as f64);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Re-express over a different variable set by name; every variable that
    /// occurs must exist in `target`.
    pub fn reindex(&self, target: &Vars) -> Result<PolyExpr> {
        let map: Vec<Option<usize>> = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect();
        let mut out = PolyExpr::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![Exponent::zero(); target.len()];
            for (i, ex) in m.exponents().iter().enumerate() {
                if ex.is_zero() {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::VariableSet {
                    left: self.vars.names().join(" "),
                    right: target.names().join(" "),
                })?;
                e[j] = *ex;
            }
            out.add_term(Monomial::from_exponents(e), c.clone());
        }
        Ok(out)
    }

    /// Multiply by the least monomial that clears all negative exponents.
    pub fn clear_negative_exponents(&self) -> (PolyExpr, Monomial) {
        let n = self.nvars();
        let mut shift = vec![Exponent::zero(); n];
        for m in self.terms.keys() {
            for (i, e) in m.exponents().iter().enumerate() {
                if -*e > shift[i] {
                    shift[i] = -*e;
                }
            }
        }
        let shift = Monomial::from_exponents(shift);
        (self.mul_monomial(&shift), shift)
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render::write_poly(f, self)
    }
}

impl fmt::Debug for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyExpr({self})")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&PolyExpr> for &PolyExpr {
            type Output = PolyExpr;
            /// Panics when the variable sets differ; use the `try_` form to recover.
            fn $method(self, rhs: &PolyExpr) -> PolyExpr {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<PolyExpr> for PolyExpr {
            type Output = PolyExpr;
            fn $method(self, rhs: PolyExpr) -> PolyExpr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&PolyExpr> for PolyExpr {
            type Output = PolyExpr;
            fn $method(self, rhs: &PolyExpr) -> PolyExpr {
                (&self).$method(rhs)
            }
        }
        impl $trait<PolyExpr> for &PolyExpr {
            type Output = PolyExpr;
            fn $method(self, rhs: PolyExpr) -> PolyExpr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        self.neg_ref()
    }
}

impl Neg for PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        self.neg_ref()
    }
}

impl Mul<&Rational> for &PolyExpr {
    type Output = PolyExpr;
    fn mul(self, rhs: &Rational) -> PolyExpr {
        self.scale(rhs)
    }
}
