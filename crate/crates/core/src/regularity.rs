//! Wedge powers of the bivector against the dual of the Casimir differentials,
//! and the degree-sum relation of the Casimir generators.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exterior::{factorial, subset_indices, subsets_of_size, PolyForm, PolyMultivector, Subset};
use crate::par::{par_map, Execution};
use crate::poly::{Exponent, PolyExpr, Rational};
use crate::structures::{is_casimir, PoissonStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Constant(Rational),
    NonConstant,
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Constant(c) => write!(f, "{c}"),
            Lambda::NonConstant => f.write_str("non-constant"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetDetail {
    /// Zero-based coordinate indices, increasing.
    pub subset: Vec<usize>,
    pub wedge: PolyExpr,
    pub pfaffian: PolyExpr,
    pub minor: PolyExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem31Report {
    pub holds: bool,
    /// Ratio of the wedge power to the dual form, including the `m!` of the power.
    pub lambda: Lambda,
    /// `lambda / m!`: the ratio of the principal Pfaffians to the minors.
    pub lambda_normalized: Option<Rational>,
    pub half_rank: usize,
    pub residual: PolyMultivector,
    /// Whether every wedge coefficient equals `m!` times the Pfaffian.
    pub wedge_matches_pfaffian: bool,
    pub subsets: Vec<SubsetDetail>,
}

pub fn theorem31_check(ps: &PoissonStructure, casimirs: &[PolyExpr]) -> Result<Theorem31Report> {
    theorem31_check_with(ps, casimirs, Execution::default())
}

/// Compare `pi^m` with `dual(dQ_1 ^ .. ^ dQ_l)` for `m = (n - l) / 2`.
pub fn theorem31_check_with(
    ps: &PoissonStructure,
    casimirs: &[PolyExpr],
    exec: Execution,
) -> Result<Theorem31Report> {
    let n = ps.dim();
    let l = casimirs.len();
    if l > n || (n - l) % 2 != 0 {
        return Err(Error::Parity(n.abs_diff(l)));
    }
    for q in casimirs {
        if !is_casimir(ps, q)? {
            return Err(Error::UnverifiedCasimir(q.to_string()));
        }
    }
    let vars = ps.vars();
    let m = (n - l) / 2;
    let pi = PolyMultivector::bivector(vars, ps.matrix().rows());
    let power = pi.wedge_power(m, exec);
    let dual = PolyForm::wedge_of_differentials(vars, casimirs, exec).volume_dual();
    let mfact = factorial(m);

    let keys: Vec<Subset> = subsets_of_size(n, 2 * m);
    let subsets: Vec<SubsetDetail> = par_map(exec, &keys, |&s| {
        let idx = subset_indices(s);
        SubsetDetail {
            pfaffian: crate::exterior::pfaffian(ps.matrix().rows(), &idx).expect("even subset"),
            wedge: power.coefficient(s),
            minor: dual.coefficient(s),
            subset: idx,
        }
    });
    let wedge_matches_pfaffian = subsets
        .iter()
        .all(|d| d.wedge == d.pfaffian.scale(&mfact));

    let anchor = subsets.iter().find(|d| !d.minor.is_zero());
    let Some(anchor) = anchor else {
        if power.is_zero() {
            return Ok(Theorem31Report {
                holds: false,
                lambda: Lambda::NonConstant,
                lambda_normalized: None,
                half_rank: m,
                residual: power,
                wedge_matches_pfaffian,
                subsets,
            });
        }
        return Err(Error::DegenerateCasimirs);
    };
    let proportional = subsets
        .iter()
        .all(|d| &d.wedge * &anchor.minor == &anchor.wedge * &d.minor);
    let lambda = if proportional {
        let div = anchor.wedge.exact_divisibility(&anchor.minor)?;
        match div.quotient {
            Some(q) if q.is_constant() => Lambda::Constant(q.constant_term()),
            _ => Lambda::NonConstant,
        }
    } else {
        Lambda::NonConstant
    };
    let residual = match &lambda {
        Lambda::Constant(c) => power.try_sub(&dual.scale(&PolyExpr::constant(vars, c.clone())))?,
        Lambda::NonConstant => power
            .scale(&anchor.minor)
            .try_sub(&dual.scale(&anchor.wedge))?,
    };
    let holds = matches!(&lambda, Lambda::Constant(c) if !c.is_zero()) && residual.is_zero();
    let lambda_normalized = match &lambda {
        Lambda::Constant(c) => Some(c / &mfact),
        Lambda::NonConstant => None,
    };
    Ok(Theorem31Report {
        holds,
        lambda,
        lambda_normalized,
        half_rank: m,
        residual,
        wedge_matches_pfaffian,
        subsets,
    })
}

/// How inhomogeneous generators are treated by [`degree_sum_check`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Homogeneity {
    /// Every generator must be weighted-homogeneous.
    #[default]
    Require,
    /// Use the top weighted-degree component (the degree of the projective closure).
    LeadingForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSum {
    pub degrees: Vec<Exponent>,
    pub sum_of_degrees: Exponent,
    pub weight_sum: Exponent,
    pub equals_dimension: bool,
}

/// `sum deg Q_a` against `sum of weights` (`= n` for unit weights).
pub fn degree_sum_check(
    casimirs: &[PolyExpr],
    n: usize,
    weights: Option<&[Exponent]>,
    policy: Homogeneity,
) -> Result<DegreeSum> {
    let unit = vec![Exponent::from_integer(1); n];
    let weights = weights.unwrap_or(&unit);
    if weights.len() != n {
        return Err(Error::Arity {
            expected: n,
            found: weights.len(),
        });
    }
    let mut degrees = Vec::with_capacity(casimirs.len());
    for q in casimirs {
        if q.nvars() != n {
            return Err(Error::Arity {
                expected: n,
                found: q.nvars(),
            });
        }
        if policy == Homogeneity::Require && !q.is_weighted_homogeneous(weights) {
            return Err(Error::NotHomogeneous(q.to_string()));
        }
        let d = q
            .weighted_degree(weights)
            .ok_or_else(|| Error::Contract("degree of the zero polynomial".into()))?;
        degrees.push(d);
    }
    let sum_of_degrees: Exponent = degrees.iter().copied().sum();
    let weight_sum: Exponent = weights.iter().copied().sum();
    Ok(DegreeSum {
        equals_dimension: sum_of_degrees == weight_sum && !weight_sum.is_negative(),
        degrees,
        sum_of_degrees,
        weight_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, Vars};
    use crate::structures::jacobian_structure;

    #[test]
    fn jacobian_structures_have_unit_ratio() {
        let vars = Vars::numbered("x", 3);
        let q = PolyExpr::parse("x1^2 + x2^2 + x3^2 + 3*x1*x2*x3", &vars).unwrap();
        let ps = jacobian_structure(&vars, &[q.clone()], &PolyExpr::one(&vars)).unwrap();
        let r = theorem31_check(&ps, &[q]).unwrap();
        assert!(r.holds);
        assert_eq!(r.lambda, Lambda::Constant(int(1)));
        assert!(r.wedge_matches_pfaffian);
    }

    #[test]
    fn parity_and_unverified() {
        let vars = Vars::numbered("x", 3);
        let ps = PoissonStructure::from_table(&vars, [(0, 1, PolyExpr::one(&vars))]).unwrap();
        assert_eq!(theorem31_check(&ps, &[]), Err(Error::Parity(3)));
        let x1 = PolyExpr::var(&vars, 0);
        assert!(matches!(
            theorem31_check(&ps, &[x1]),
            Err(Error::UnverifiedCasimir(_))
        ));
    }

    #[test]
    fn degree_sums() {
        let vars = Vars::numbered("x", 3);
        let q = PolyExpr::parse("x1^3 + x2^3 + x3^3", &vars).unwrap();
        let d = degree_sum_check(&[q], 3, None, Homogeneity::Require).unwrap();
        assert!(d.equals_dimension);
        let bad = PolyExpr::parse("x1^3 + x2", &vars).unwrap();
        assert!(matches!(
            degree_sum_check(&[bad.clone()], 3, None, Homogeneity::Require),
            Err(Error::NotHomogeneous(_))
        ));
        let lead = degree_sum_check(&[bad], 3, None, Homogeneity::LeadingForm).unwrap();
        assert_eq!(lead.sum_of_degrees, Exponent::from_integer(3));
    }
}
