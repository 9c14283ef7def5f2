//! Monomial changes of coordinates, projective extendability conditions and
//! comparison of brackets computed in two affine charts.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Exponent, MonomialMap, PolyExpr, Rational, Vars};
use crate::structures::{constant_ratio, BracketMatrix, PoissonStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportResult {
    pub matrix: BracketMatrix,
    /// Every transported entry has nonnegative integer exponents.
    pub polynomial_grade: bool,
}

impl TransportResult {
    pub fn into_structure(self) -> Result<PoissonStructure> {
        PoissonStructure::from_matrix(self.matrix)
    }
}

/// `{y_a, y_b} = sum_{i<j} (dy_a/dx_i dy_b/dx_j - dy_a/dx_j dy_b/dx_i) p_ij`,
/// rewritten in the new variables through the inverse map.
pub fn transport_bracket(matrix: &BracketMatrix, map: &MonomialMap) -> Result<TransportResult> {
    if matrix.vars() != map.source() {
        return Err(Error::VariableSet {
            left: matrix.vars().names().join(" "),
            right: map.source().names().join(" "),
        });
    }
    let inverse = map.inverse_images()?;
    let images = map.forward_images();
    let grads: Vec<Vec<PolyExpr>> = images.iter().map(PolyExpr::gradient).collect();
    let target = map.target();
    let n = target.len();
    let mut entries = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut acc = PolyExpr::zero(map.source());
            for (i, j, p) in matrix.upper() {
                if p.is_zero() {
                    continue;
                }
                let w = &(&grads[a][i] * &grads[b][j]) - &(&grads[a][j] * &grads[b][i]);
                if !w.is_zero() {
                    acc = acc + &w * p;
                }
            }
            entries.push((a, b, acc.compose(&inverse)?));
        }
    }
    let matrix = BracketMatrix::from_upper(target, entries)?;
    Ok(TransportResult {
        polynomial_grade: matrix.is_polynomial_grade(),
        matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendabilityVerdict {
    pub max_degree: Option<Exponent>,
    pub degree_ok: bool,
    /// `X_k {X_i,X_j}_3 + X_i {X_j,X_k}_3 + X_j {X_k,X_i}_3` for `i<j<k`,
    /// where `{.,.}_3` is the cubic component.
    pub cyclic_residuals: BTreeMap<(usize, usize, usize), PolyExpr>,
    pub necessary_conditions: bool,
}

impl ExtendabilityVerdict {
    pub fn first_obstruction(&self) -> Option<(&(usize, usize, usize), &PolyExpr)> {
        self.cyclic_residuals.iter().find(|(_, r)| !r.is_zero())
    }

    /// Sufficiency is not decided, so a pass is only "no obstruction found".
    pub fn verdict(&self) -> &'static str {
        if self.necessary_conditions {
            "no obstruction found"
        } else if !self.degree_ok {
            "obstructed: bracket degree exceeds 3"
        } else {
            "obstructed: cubic parts fail the cyclic identity"
        }
    }
}

pub fn check_projective_extendability(ps: &PoissonStructure) -> ExtendabilityVerdict {
    let vars = ps.vars();
    let n = ps.dim();
    let unit = vec![Exponent::one(); n];
    let cubic = Exponent::from_integer(3);
    let max_degree = ps
        .matrix()
        .upper()
        .filter_map(|(_, _, p)| p.total_degree())
        .max();
    let degree_ok = max_degree.is_none_or(|d| d <= cubic);
    let top: Vec<Vec<PolyExpr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    ps.entry(i, j)
                        .homogeneous_components(&unit)
                        .remove(&cubic)
                        .unwrap_or_else(|| PolyExpr::zero(vars))
                })
                .collect()
        })
        .collect();
    let x = |i: usize| PolyExpr::var(vars, i);
    let mut cyclic_residuals = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let r = &(&x(k) * &top[i][j]) + &(&x(i) * &top[j][k]) + &x(j) * &top[k][i];
                cyclic_residuals.insert((i, j, k), r);
            }
        }
    }
    let necessary_conditions = degree_ok && cyclic_residuals.values().all(PolyExpr::is_zero);
    ExtendabilityVerdict {
        max_degree,
        degree_ok,
        cyclic_residuals,
        necessary_conditions,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryAgreement {
    Exact,
    /// Equal after reduction modulo the supplied surface equation.
    ModuloSurface,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEntry {
    pub pair: (usize, usize),
    pub status: EntryAgreement,
    /// `B|_{z solved} - c * A`.
    pub residual: PolyExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartComparison {
    pub agree: bool,
    /// The `c` with `B|_{z solved} = c * A` fixed on the first nonzero pair.
    pub constant: Option<Rational>,
    /// Solved value of the eliminated variable (a Laurent expression).
    pub solved: PolyExpr,
    pub entries: Vec<ChartEntry>,
}

/// Compare brackets of `ps_a` (variables `V`) with those of `ps_b`
/// (variables `V` plus one extra `z`) after solving `eliminator = 0` for `z`.
pub fn chart_compare(
    ps_a: &PoissonStructure,
    ps_b: &PoissonStructure,
    eliminator: &PolyExpr,
    surface: Option<&PolyExpr>,
) -> Result<ChartComparison> {
    let va = ps_a.vars();
    let vb = ps_b.vars();
    let extra: Vec<usize> = (0..vb.len())
        .filter(|&i| va.index_of(vb.name(i)).is_none())
        .collect();
    if extra.len() != 1 || vb.len() != va.len() + 1 {
        return Err(Error::Contract(
            "second chart must have exactly the first chart's variables plus one".into(),
        ));
    }
    let z = extra[0];
    let e = if eliminator.vars() == vb {
        eliminator.clone()
    } else {
        eliminator.reindex(vb)?
    };
    let solved = solve_linear(&e, z, va)?;
    let images: Vec<PolyExpr> = (0..vb.len())
        .map(|i| {
            if i == z {
                Ok(solved.clone())
            } else {
                Ok(PolyExpr::var(va, va.index_of(vb.name(i)).expect("shared variable")))
            }
        })
        .collect::<Result<_>>()?;
    let surface = match surface {
        Some(s) if s.vars() != va => Some(s.reindex(va)?),
        Some(s) => Some(s.clone()),
        None => None,
    };

    let mut pairs = Vec::new();
    for (i, j, a) in ps_a.matrix().upper() {
        let bi = vb.index_of(va.name(i)).expect("shared variable");
        let bj = vb.index_of(va.name(j)).expect("shared variable");
        let b = ps_b.entry(bi, bj).compose(&images)?;
        pairs.push(((i, j), a.clone(), b));
    }
    let constant = pairs
        .iter()
        .find(|(_, a, b)| !a.is_zero() && !b.is_zero())
        .and_then(|(_, a, b)| constant_ratio(b, a));
    let c = constant.clone().unwrap_or_else(Rational::one);
    let mut entries = Vec::new();
    for (pair, a, b) in pairs {
        let residual = &b - &a.scale(&c);
        let status = if residual.is_zero() {
            EntryAgreement::Exact
        } else if let Some(s) = &surface {
            let (cleared, _) = residual.clear_negative_exponents();
            if cleared.exact_divisibility(s)?.divisible {
                EntryAgreement::ModuloSurface
            } else {
                EntryAgreement::Mismatch
            }
        } else {
            EntryAgreement::Mismatch
        };
        entries.push(ChartEntry {
            pair,
            status,
            residual,
        });
    }
    let agree = constant.as_ref().is_some_and(|c| !c.is_zero())
        && entries.iter().all(|e| e.status != EntryAgreement::Mismatch);
    Ok(ChartComparison {
        agree,
        constant,
        solved,
        entries,
    })
}

/// `e = A z + B` with `A` a single term free of `z`: return `-B / A` over `target`.
fn solve_linear(e: &PolyExpr, z: usize, target: &Vars) -> Result<PolyExpr> {
    let one = Exponent::one();
    let mut lead = PolyExpr::zero(e.vars());
    let mut rest = PolyExpr::zero(e.vars());
    for (m, c) in e.terms() {
        let t = PolyExpr::term(e.vars(), c.clone(), m.clone());
        let ez = m.exponent(z);
        if ez == one {
            lead = lead + t.partial_derivative(z);
        } else if ez.is_zero() {
            rest = rest + t;
        } else {
            return Err(Error::Contract(format!(
                "eliminator `{e}` is not linear in {}",
                e.vars().name(z)
            )));
        }
    }
    let Some((m, c)) = lead.as_single_term() else {
        return Err(Error::Contract(format!(
            "coefficient of {} in `{e}` is not a single monomial",
            e.vars().name(z)
        )));
    };
    let inv = PolyExpr::term(e.vars(), c.recip(), m.pow(-one));
    let solved = -(&rest * &inv);
    solved.reindex(target)
}
