//! Poisson and Nambu structures on polynomial rings and their verification
//! predicates.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{full_subset, subsets_of_size, subset_indices, PolyForm};
use crate::par::{par_map, Execution};
use crate::poly::{int, PolyExpr, Rational, Vars};

/// Antisymmetric matrix of brackets `{x_i, x_j}`; entries may carry
/// fractional exponents (used as the carrier for coordinate changes).
#[derive(Clone, PartialEq, Eq)]
pub struct BracketMatrix {
    vars: Vars,
    entries: Vec<Vec<PolyExpr>>,
}

impl BracketMatrix {
    pub fn zero(vars: &Vars) -> Self {
        let n = vars.len();
        BracketMatrix {
            vars: vars.clone(),
            entries: vec![vec![PolyExpr::zero(vars); n]; n],
        }
    }

    /// Upper-triangle entries `(i, j, p_ij)`; the lower triangle is filled by
    /// antisymmetry. A pair given twice must agree.
    pub fn from_upper<I>(vars: &Vars, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, PolyExpr)>,
    {
        let mut m = Self::zero(vars);
        let mut seen = vec![vec![false; vars.len()]; vars.len()];
        for (i, j, p) in entries {
            if i >= vars.len() || j >= vars.len() {
                return Err(Error::Contract(format!("bracket index ({i}, {j}) out of range")));
            }
            if i == j {
                if p.is_zero() {
                    continue;
                }
                return Err(Error::Contract(format!(
                    "diagonal bracket {{{0},{0}}} must vanish",
                    vars.name(i)
                )));
            }
            let p = if p.vars() == vars {
                p
            } else {
                p.reindex(vars)?
            };
            let (a, b, v) = if i < j { (i, j, p) } else { (j, i, -p) };
            if seen[a][b] && m.entries[a][b] != v {
                return Err(Error::Contract(format!(
                    "conflicting values for {{{},{}}}",
                    vars.name(a),
                    vars.name(b)
                )));
            }
            seen[a][b] = true;
            m.entries[b][a] = -&v;
            m.entries[a][b] = v;
        }
        Ok(m)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyExpr {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<PolyExpr>] {
        &self.entries
    }

    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, &PolyExpr)> {
        let n = self.dim();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, &self.entries[i][j])))
    }

    pub fn is_polynomial_grade(&self) -> bool {
        self.upper().all(|(_, _, p)| p.is_polynomial_grade())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BracketMatrix {
            vars: self.vars.clone(),
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|p| p.scale(c)).collect())
                .collect(),
        }
    }
}

impl fmt::Display for BracketMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, p) in self.upper() {
            writeln!(f, "{{{},{}}} = {p}", self.vars.name(i), self.vars.name(j))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BracketMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BracketMatrix[{:?}]\n{self}", self.vars)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Table,
    Jacobian {
        casimirs: Vec<PolyExpr>,
        lambda: PolyExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    matrix: BracketMatrix,
    provenance: Provenance,
}

impl PoissonStructure {
    pub fn from_matrix(matrix: BracketMatrix) -> Result<Self> {
        for (_, _, p) in matrix.upper() {
            p.require_polynomial_grade()?;
        }
        Ok(PoissonStructure {
            matrix,
            provenance: Provenance::Table,
        })
    }

    pub fn from_table<I>(vars: &Vars, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, PolyExpr)>,
    {
        Self::from_matrix(BracketMatrix::from_upper(vars, entries)?)
    }

    /// Table keyed by variable names.
    pub fn from_named_table<'a, I>(vars: &Vars, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, PolyExpr)>,
    {
        let mut indexed = Vec::new();
        for (a, b, p) in entries {
            let i = vars
                .index_of(a)
                .ok_or_else(|| Error::Contract(format!("unknown variable `{a}`")))?;
            let j = vars
                .index_of(b)
                .ok_or_else(|| Error::Contract(format!("unknown variable `{b}`")))?;
            indexed.push((i, j, p));
        }
        Self::from_table(vars, indexed)
    }

    pub fn matrix(&self) -> &BracketMatrix {
        &self.matrix
    }

    pub fn vars(&self) -> &Vars {
        self.matrix.vars()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &PolyExpr {
        self.matrix.get(i, j)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Same brackets with `i`/`j` entry replaced (antisymmetric partner updated).
    pub fn with_entry(&self, i: usize, j: usize, p: PolyExpr) -> Result<Self> {
        let mut m = self.matrix.clone();
        p.require_polynomial_grade()?;
        m.entries[j][i] = -&p;
        m.entries[i][j] = p;
        Ok(PoissonStructure {
            matrix: m,
            provenance: Provenance::Table,
        })
    }

    fn align(&self, f: &PolyExpr) -> Result<PolyExpr> {
        if f.vars() == self.vars() {
            Ok(f.clone())
        } else {
            f.reindex(self.vars())
        }
    }
}

impl fmt::Display for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.matrix.fmt(f)
    }
}

/// `p_ij = lambda * (dx_i ^ dx_j ^ dQ_1 ^ ... ^ dQ_{n-2}) / vol`.
pub fn jacobian_structure(
    vars: &Vars,
    casimirs: &[PolyExpr],
    lambda: &PolyExpr,
) -> Result<PoissonStructure> {
    let n = vars.len();
    if n < 2 || casimirs.len() + 2 != n {
        return Err(Error::Arity {
            expected: n.saturating_sub(2),
            found: casimirs.len(),
        });
    }
    lambda.require_polynomial_grade()?;
    let casimirs: Vec<PolyExpr> = casimirs
        .iter()
        .map(|q| {
            q.require_polynomial_grade()?;
            if q.vars() == vars {
                Ok(q.clone())
            } else {
                q.reindex(vars)
            }
        })
        .collect::<Result<_>>()?;
    let lambda = if lambda.vars() == vars {
        lambda.clone()
    } else {
        lambda.reindex(vars)?
    };
    let omega = PolyForm::wedge_of_differentials(vars, &casimirs, Execution::Sequential);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let top = PolyForm::basis(vars, &[i, j]).wedge(&omega).top_coefficient();
            entries.push((i, j, &lambda * &top));
        }
    }
    let matrix = BracketMatrix::from_upper(vars, entries)?;
    Ok(PoissonStructure {
        matrix,
        provenance: Provenance::Jacobian { casimirs, lambda },
    })
}

/// `{f, g} = sum_{i<j} p_ij (f_i g_j - f_j g_i)`.
pub fn bracket_of(ps: &PoissonStructure, f: &PolyExpr, g: &PolyExpr) -> Result<PolyExpr> {
    let f = ps.align(f)?;
    let g = ps.align(g)?;
    f.require_polynomial_grade()?;
    g.require_polynomial_grade()?;
    let df = f.gradient();
    let dg = g.gradient();
    let mut acc = PolyExpr::zero(ps.vars());
    for (i, j, p) in ps.matrix.upper() {
        if p.is_zero() {
            continue;
        }
        let w = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
        if !w.is_zero() {
            acc = acc + p * &w;
        }
    }
    Ok(acc)
}

/// `{Q, x_i}` for every coordinate.
pub fn casimir_residuals(ps: &PoissonStructure, q: &PolyExpr) -> Result<Vec<PolyExpr>> {
    let q = ps.align(q)?;
    q.require_polynomial_grade()?;
    let dq = q.gradient();
    let n = ps.dim();
    Ok((0..n)
        .map(|i| {
            (0..n).fold(PolyExpr::zero(ps.vars()), |acc, j| {
                let p = ps.entry(j, i);
                if p.is_zero() || dq[j].is_zero() {
                    acc
                } else {
                    acc + &dq[j] * p
                }
            })
        })
        .collect())
}

pub fn is_casimir(ps: &PoissonStructure, q: &PolyExpr) -> Result<bool> {
    Ok(casimir_residuals(ps, q)?.iter().all(PolyExpr::is_zero))
}

/// Every `{Q, x_i}` is a polynomial multiple of `Q`.
pub fn is_quasi_casimir(ps: &PoissonStructure, q: &PolyExpr) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::Contract("quasi-casimir test of the zero polynomial".into()));
    }
    let q = ps.align(q)?;
    for r in casimir_residuals(ps, &q)? {
        if !r.exact_divisibility(&q)?.divisible {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiWitness {
    pub triple: (usize, usize, usize),
    pub residual: PolyExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    pub holds: bool,
    pub witnesses: Vec<JacobiWitness>,
}

pub fn check_jacobi(ps: &PoissonStructure) -> JacobiReport {
    check_jacobi_with(ps, Execution::default())
}

/// Jacobiator of every coordinate triple `i<j<k`, exactly.
pub fn check_jacobi_with(ps: &PoissonStructure, exec: Execution) -> JacobiReport {
    let n = ps.dim();
    let p = ps.matrix.rows();
    let rows: Vec<usize> = (0..n).collect();
    // grad[i][j][l] = d p_ij / d x_l
    let grad: Vec<Vec<Vec<PolyExpr>>> = par_map(exec, &rows, |&i| {
        (0..n).map(|j| p[i][j].gradient()).collect()
    });
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push((i, j, k));
            }
        }
    }
    let residuals = par_map(exec, &triples, |&(i, j, k)| {
        let mut acc = PolyExpr::zero(ps.vars());
        for l in 0..n {
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                let x = &p[a][l];
                let y = &grad[b][c][l];
                if !x.is_zero() && !y.is_zero() {
                    acc = acc + x * y;
                }
            }
        }
        acc
    });
    let witnesses: Vec<JacobiWitness> = triples
        .into_iter()
        .zip(residuals)
        .filter(|(_, r)| !r.is_zero())
        .map(|(triple, residual)| JacobiWitness { triple, residual })
        .collect();
    JacobiReport {
        holds: witnesses.is_empty(),
        witnesses,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerReport {
    pub rank_le_2: bool,
    pub witness: Option<[usize; 4]>,
    pub value: Option<PolyExpr>,
}

/// Every 4x4 principal Pfaffian `p_ij p_kl - p_ik p_jl + p_il p_jk` vanishes.
pub fn plucker_rank2_test(ps: &PoissonStructure) -> PluckerReport {
    plucker_rank2_test_with(ps, Execution::default())
}

pub fn plucker_rank2_test_with(ps: &PoissonStructure, exec: Execution) -> PluckerReport {
    let quads = subsets_of_size(ps.dim(), 4);
    let values = par_map(exec, &quads, |&s| {
        let idx = subset_indices(s);
        crate::exterior::pfaffian(ps.matrix.rows(), &idx).expect("four indices")
    });
    match quads.iter().zip(values).find(|(_, v)| !v.is_zero()) {
        Some((&s, v)) => {
            let idx = subset_indices(s);
            PluckerReport {
                rank_le_2: false,
                witness: Some([idx[0], idx[1], idx[2], idx[3]]),
                value: Some(v),
            }
        }
        None => PluckerReport {
            rank_le_2: true,
            witness: None,
            value: None,
        },
    }
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] * &inv;
            for c in col..ncols {
                let d = &f * &rows[rank][c];
                rows[r][c] -= d;
            }
        }
        rank += 1;
    }
    rank
}

/// Points on the grid `{-7..7} \ {0}` scaled by 1/3, reproducible from `seed`.
pub fn sample_points(n: usize, samples: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let mut k: i64 = rng.gen_range(-7..=6);
                    if k >= 0 {
                        k += 1;
                    }
                    Rational::new(k.into(), 3.into())
                })
                .collect()
        })
        .collect()
}

/// Maximum rank of the evaluated bracket matrix over sampled points.
pub fn generic_rank(ps: &PoissonStructure, samples: usize, seed: u64) -> Result<usize> {
    generic_rank_with(ps, samples, seed, Execution::default())
}

pub fn generic_rank_with(
    ps: &PoissonStructure,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<usize> {
    if samples == 0 {
        return Err(Error::Contract("rank sampling needs at least one sample".into()));
    }
    let n = ps.dim();
    let points = sample_points(n, samples, seed);
    let ranks = par_map(exec, &points, |pt| -> Result<usize> {
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, j, p) in ps.matrix.upper() {
            let v = p.evaluate(pt)?;
            m[j][i] = -&v;
            m[i][j] = v;
        }
        Ok(rational_rank(m))
    });
    ranks
        .into_iter()
        .try_fold(0, |acc, r| r.map(|r| acc.max(r)))
}

/// `(n - m)`-ary bracket `lambda * df_1 ^ .. ^ df_r ^ dQ_1 ^ .. ^ dQ_m / vol`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NambuStructure {
    vars: Vars,
    casimirs: Vec<PolyExpr>,
    lambda: PolyExpr,
    casimir_form: PolyForm,
}

impl NambuStructure {
    pub fn new(vars: &Vars, casimirs: Vec<PolyExpr>, lambda: PolyExpr) -> Result<Self> {
        if casimirs.len() >= vars.len() {
            return Err(Error::Arity {
                expected: vars.len().saturating_sub(1),
                found: casimirs.len(),
            });
        }
        let casimirs: Vec<PolyExpr> = casimirs
            .into_iter()
            .map(|q| {
                q.require_polynomial_grade()?;
                if q.vars() == vars {
                    Ok(q)
                } else {
                    q.reindex(vars)
                }
            })
            .collect::<Result<_>>()?;
        lambda.require_polynomial_grade()?;
        let lambda = if lambda.vars() == vars {
            lambda
        } else {
            lambda.reindex(vars)?
        };
        let casimir_form = PolyForm::wedge_of_differentials(vars, &casimirs, Execution::Sequential);
        Ok(NambuStructure {
            vars: vars.clone(),
            casimirs,
            lambda,
            casimir_form,
        })
    }

    /// Jacobian-determinant bracket with no Casimirs.
    pub fn canonical(vars: &Vars) -> Self {
        Self::new(vars, Vec::new(), PolyExpr::one(vars)).expect("canonical structure")
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn arity(&self) -> usize {
        self.vars.len() - self.casimirs.len()
    }

    pub fn casimirs(&self) -> &[PolyExpr] {
        &self.casimirs
    }

    pub fn lambda(&self) -> &PolyExpr {
        &self.lambda
    }
}

pub fn nambu_bracket(ns: &NambuStructure, args: &[PolyExpr]) -> Result<PolyExpr> {
    if args.len() != ns.arity() {
        return Err(Error::Arity {
            expected: ns.arity(),
            found: args.len(),
        });
    }
    let args: Vec<PolyExpr> = args
        .iter()
        .map(|a| {
            a.require_polynomial_grade()?;
            if a.vars() == ns.vars() {
                Ok(a.clone())
            } else {
                a.reindex(ns.vars())
            }
        })
        .collect::<Result<_>>()?;
    let front = PolyForm::wedge_of_differentials(ns.vars(), &args, Execution::Sequential);
    let top = front.wedge(&ns.casimir_form);
    debug_assert!(top.is_zero() || top.iter().all(|(s, _)| s == full_subset(ns.dim())));
    Ok(&ns.lambda * &top.top_coefficient())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalIdentityReport {
    pub holds: bool,
    pub residual: PolyExpr,
}

/// `{f_1..f_{r-1}, {g_1..g_r}} = sum_i {g_1..{f_1..f_{r-1}, g_i}..g_r}` for
/// `args = (f_1, .., f_{r-1}, g_1, .., g_r)`.
pub fn check_fundamental_identity(
    ns: &NambuStructure,
    args: &[PolyExpr],
) -> Result<FundamentalIdentityReport> {
    check_fundamental_identity_with(ns, args, Execution::default())
}

pub fn check_fundamental_identity_with(
    ns: &NambuStructure,
    args: &[PolyExpr],
    exec: Execution,
) -> Result<FundamentalIdentityReport> {
    let r = ns.arity();
    if r < 2 {
        return Err(Error::Contract(format!(
            "fundamental identity needs arity at least 2, structure has {r}"
        )));
    }
    if args.len() != 2 * r - 1 {
        return Err(Error::Arity {
            expected: 2 * r - 1,
            found: args.len(),
        });
    }
    let (fs, gs) = args.split_at(r - 1);
    let derive = |h: &PolyExpr| -> Result<PolyExpr> {
        let mut v = fs.to_vec();
        v.push(h.clone());
        nambu_bracket(ns, &v)
    };
    let lhs = derive(&nambu_bracket(ns, gs)?)?;
    let slots: Vec<usize> = (0..r).collect();
    let terms = par_map(exec, &slots, |&i| -> Result<PolyExpr> {
        let mut v = gs.to_vec();
        v[i] = derive(&gs[i])?;
        nambu_bracket(ns, &v)
    });
    let mut rhs = PolyExpr::zero(ns.vars());
    for t in terms {
        rhs = rhs + t?;
    }
    let residual = lhs - rhs;
    Ok(FundamentalIdentityReport {
        holds: residual.is_zero(),
        residual,
    })
}

/// Seeded argument tuples of degree at most 2 for fundamental-identity runs.
pub fn random_arguments(vars: &Vars, count: usize, seed: u64) -> Vec<PolyExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = vars.len();
    (0..count)
        .map(|_| {
            let mut p = PolyExpr::zero(vars);
            for _ in 0..3 {
                let c: i64 = rng.gen_range(-3..=3);
                if c == 0 {
                    continue;
                }
                let mut term = PolyExpr::constant(vars, int(c));
                for _ in 0..rng.gen_range(0..=2) {
                    term = term * PolyExpr::var(vars, rng.gen_range(0..n));
                }
                p = p + term;
            }
            if p.is_zero() {
                PolyExpr::var(vars, rng.gen_range(0..n))
            } else {
                p
            }
        })
        .collect()
}

/// Constant `c` with `a = c * b`, if one exists.
pub fn constant_ratio(a: &PolyExpr, b: &PolyExpr) -> Option<Rational> {
    match (a.leading_term(), b.leading_term()) {
        (None, None) => Some(Rational::one()),
        (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
            let c = ca / cb;
            (a - &b.scale(&c)).is_zero().then_some(c)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn v(n: usize) -> Vars {
        Vars::numbered("x", n)
    }

    fn p(s: &str, vars: &Vars) -> PolyExpr {
        PolyExpr::parse(s, vars).unwrap()
    }

    #[test]
    fn markov_jacobian_brackets() {
        let vars = v(3);
        let q = p("x1^2 + x2^2 + x3^2 + 3*x1*x2*x3", &vars);
        let ps = jacobian_structure(&vars, &[q.clone()], &PolyExpr::one(&vars)).unwrap();
        assert_eq!(ps.entry(0, 1), &p("2*x3 + 3*x1*x2", &vars));
        assert_eq!(ps.entry(1, 2), &p("2*x1 + 3*x2*x3", &vars));
        assert_eq!(ps.entry(2, 0), &p("2*x2 + 3*x1*x3", &vars));
        assert!(is_casimir(&ps, &q).unwrap());
        assert!(check_jacobi(&ps).holds);
    }

    #[test]
    fn canonical_plane() {
        let vars = v(3);
        let ps = jacobian_structure(&vars, &[p("x3", &vars)], &PolyExpr::one(&vars)).unwrap();
        assert_eq!(ps.entry(0, 1), &PolyExpr::one(&vars));
        assert!(ps.entry(0, 2).is_zero());
        assert!(ps.entry(1, 2).is_zero());
        assert_eq!(generic_rank(&ps, 4, 7).unwrap(), 2);
    }

    #[test]
    fn wrong_casimir_count() {
        let vars = v(4);
        let r = jacobian_structure(&vars, &[p("x1", &vars)], &PolyExpr::one(&vars));
        assert!(matches!(r, Err(Error::Arity { .. })));
    }

    #[test]
    fn lie_poisson_so3() {
        let vars = v(3);
        let ps = PoissonStructure::from_table(
            &vars,
            [
                (0, 1, p("x3", &vars)),
                (1, 2, p("x1", &vars)),
                (2, 0, p("x2", &vars)),
            ],
        )
        .unwrap();
        assert!(check_jacobi(&ps).holds);
        assert!(is_casimir(&ps, &p("x1^2 + x2^2 + x3^2", &vars)).unwrap());
    }

    #[test]
    fn quasi_casimir_example() {
        let vars = v(3);
        let ps = PoissonStructure::from_table(&vars, [(0, 1, p("x1", &vars))]).unwrap();
        assert!(check_jacobi(&ps).holds);
        assert!(is_quasi_casimir(&ps, &p("x1", &vars)).unwrap());
        assert!(!is_casimir(&ps, &p("x1", &vars)).unwrap());
        assert!(!is_quasi_casimir(&ps, &p("x2", &vars)).unwrap());
        assert!(is_quasi_casimir(&ps, &PolyExpr::zero(&vars)).is_err());
    }

    #[test]
    fn rank_by_elimination() {
        let m = vec![
            vec![int(0), int(1), int(2)],
            vec![int(-1), int(0), int(3)],
            vec![int(-2), int(-3), int(0)],
        ];
        assert_eq!(rational_rank(m), 2);
        assert_eq!(rational_rank(vec![vec![rat(1, 2)]]), 1);
    }

    #[test]
    fn canonical_nambu() {
        let vars = v(3);
        let ns = NambuStructure::canonical(&vars);
        let xs: Vec<PolyExpr> = (0..3).map(|i| PolyExpr::var(&vars, i)).collect();
        assert_eq!(nambu_bracket(&ns, &xs).unwrap(), PolyExpr::one(&vars));
        let swapped = [xs[1].clone(), xs[0].clone(), xs[2].clone()];
        assert_eq!(nambu_bracket(&ns, &swapped).unwrap(), -PolyExpr::one(&vars));
        assert!(matches!(
            nambu_bracket(&ns, &xs[..2]),
            Err(Error::Arity { .. })
        ));
        let args = random_arguments(&vars, 5, 11);
        assert!(check_fundamental_identity(&ns, &args).unwrap().holds);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_points(5, 3, 42);
        assert_eq!(a, sample_points(5, 3, 42));
        assert!(a.iter().flatten().all(|q| !q.is_zero()));
    }
}
