//! Forms and multivectors with polynomial coefficients on at most eight
//! coordinates. Index subsets are bitmasks (bit `i` = coordinate `i`).

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::One;

use crate::error::{Error, Result};
use crate::par::{par_map, Execution};
use crate::poly::{PolyExpr, Vars};

pub const MAX_DIM: usize = 8;

pub type Subset = u32;

pub fn subset_of(indices: &[usize]) -> Subset {
    indices.iter().fold(0, |acc, &i| acc | (1 << i))
}

pub fn subset_indices(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s & (1 << i) != 0).collect()
}

pub fn full_subset(n: usize) -> Subset {
    (1u32 << n) - 1
}

/// All subsets of `{0..n}` with `k` elements, in increasing bitmask order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Subset> {
    (0..(1u32 << n))
        .filter(|s| s.count_ones() as usize == k)
        .collect()
}

/// Sign of the permutation that sorts the concatenation `(S, T)` of two
/// disjoint increasing index lists.
pub fn shuffle_sign(s: Subset, t: Subset) -> i32 {
    debug_assert_eq!(s & t, 0);
    let mut inversions = 0;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (s >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormBasis {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorBasis {}

pub trait Basis {
    const SYMBOL: &'static str;
}

impl Basis for FormBasis {
    const SYMBOL: &'static str = "d";
}

impl Basis for VectorBasis {
    const SYMBOL: &'static str = "d/d";
}

/// Homogeneous element of grade `grade`; the basis kind is a type tag.
pub struct Graded<K> {
    vars: Vars,
    grade: usize,
    coeffs: BTreeMap<Subset, PolyExpr>,
    kind: PhantomData<fn() -> K>,
}

pub type PolyForm = Graded<FormBasis>;
pub type PolyMultivector = Graded<VectorBasis>;

impl<K> Clone for Graded<K> {
    fn clone(&self) -> Self {
        Graded {
            vars: self.vars.clone(),
            grade: self.grade,
            coeffs: self.coeffs.clone(),
            kind: PhantomData,
        }
    }
}

impl<K> PartialEq for Graded<K> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.grade == other.grade && self.coeffs == other.coeffs
    }
}

impl<K> Eq for Graded<K> {}

impl<K> Graded<K> {
    pub fn zero(vars: &Vars, grade: usize) -> Self {
        assert!(vars.len() <= MAX_DIM, "ambient dimension above {MAX_DIM}");
        Graded {
            vars: vars.clone(),
            grade,
            coeffs: BTreeMap::new(),
            kind: PhantomData,
        }
    }

    /// The grade-0 element `c`.
    pub fn scalar(c: PolyExpr) -> Self {
        let mut g = Self::zero(&c.vars().clone(), 0);
        g.set(0, c);
        g
    }

    /// Basis element on the given (unsorted) indices, with the sign of sorting them.
    pub fn basis(vars: &Vars, indices: &[usize]) -> Self {
        let mut out = Self::scalar(PolyExpr::one(vars));
        for &i in indices {
            out = out.wedge(&Self::coordinate(vars, i));
        }
        out
    }

    pub fn coordinate(vars: &Vars, i: usize) -> Self {
        let mut g = Self::zero(vars, 1);
        g.set(1 << i, PolyExpr::one(vars));
        g
    }

    pub fn from_coefficients<I>(vars: &Vars, grade: usize, coeffs: I) -> Self
    where
        I: IntoIterator<Item = (Subset, PolyExpr)>,
    {
        let mut g = Self::zero(vars, grade);
        for (s, c) in coeffs {
            let c = g.coefficient(s) + c;
            g.set(s, c);
        }
        g
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, s: Subset) -> PolyExpr {
        self.coeffs
            .get(&s)
            .cloned()
            .unwrap_or_else(|| PolyExpr::zero(&self.vars))
    }

    pub fn coefficient_at(&self, indices: &[usize]) -> PolyExpr {
        self.coefficient(subset_of(indices))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &PolyExpr)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    /// Panics on a subset of the wrong size; zero coefficients are dropped.
    pub fn set(&mut self, s: Subset, c: PolyExpr) {
        assert_eq!(s.count_ones() as usize, self.grade, "subset size must equal grade");
        assert!(s >> self.dim() == 0, "index out of range");
        if c.is_zero() {
            self.coeffs.remove(&s);
        } else {
            self.coeffs.insert(s, c);
        }
    }

    pub fn scale(&self, f: &PolyExpr) -> Self {
        Self::from_coefficients(
            &self.vars,
            self.grade,
            self.coeffs.iter().map(|(s, c)| (*s, c * f)),
        )
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.grade != other.grade {
            return Err(Error::Contract(format!(
                "adding grades {} and {}",
                self.grade, other.grade
            )));
        }
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            let v = out.coefficient(*s) + c;
            out.set(*s, v);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-PolyExpr::one(&self.vars)))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VariableSet {
                left: self.vars.names().join(" "),
                right: other.vars.names().join(" "),
            })
        }
    }

    /// Exterior product; grades summing past the dimension give zero.
    pub fn wedge(&self, other: &Self) -> Self {
        self.wedge_with(other, Execution::Sequential)
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.wedge(other))
    }

    pub fn wedge_with(&self, other: &Self, exec: Execution) -> Self {
        assert!(self.vars == other.vars, "wedge across different variable sets");
        let grade = self.grade + other.grade;
        if grade > self.dim() {
            return Self::zero(&self.vars, grade);
        }
        let left: Vec<(Subset, &PolyExpr)> = self.iter().collect();
        let partials = par_map(exec, &left, |(s, a)| {
            let mut acc: BTreeMap<Subset, PolyExpr> = BTreeMap::new();
            for (t, b) in other.iter() {
                if s & t != 0 {
                    continue;
                }
                let mut prod = *a * b;
                if shuffle_sign(*s, t) < 0 {
                    prod = -prod;
                }
                let key = s | t;
                let v = match acc.remove(&key) {
                    Some(old) => old + prod,
                    None => prod,
                };
                acc.insert(key, v);
            }
            acc
        });
        let mut out = Self::zero(&self.vars, grade);
        for part in partials {
            for (s, c) in part {
                let v = out.coefficient(s) + c;
                out.set(s, v);
            }
        }
        out
    }

    pub fn wedge_power(&self, m: usize, exec: Execution) -> Self {
        let mut acc = Self::scalar(PolyExpr::one(&self.vars));
        for _ in 0..m {
            acc = acc.wedge_with(self, exec);
        }
        acc
    }

    fn dual_into<L>(&self) -> Graded<L> {
        let full = full_subset(self.dim());
        let mut out = Graded::<L>::zero(&self.vars, self.dim() - self.grade);
        for (s, c) in self.iter() {
            let t = full & !s;
            let v = if shuffle_sign(s, t) < 0 { -c } else { c.clone() };
            out.set(t, v);
        }
        out
    }

    /// Coefficient of a top-degree element (zero for other grades).
    pub fn top_coefficient(&self) -> PolyExpr {
        if self.grade == self.dim() {
            self.coefficient(full_subset(self.dim()))
        } else {
            PolyExpr::zero(&self.vars)
        }
    }
}

impl PolyForm {
    /// `dp = sum_i dp/dx_i dx_i`.
    pub fn differential(p: &PolyExpr) -> PolyForm {
        PolyForm::from_coefficients(
            p.vars(),
            1,
            (0..p.nvars()).map(|i| (1 << i, p.partial_derivative(i))),
        )
    }

    /// `dp_1 ^ ... ^ dp_k`; the empty product is the scalar 1.
    pub fn wedge_of_differentials(vars: &Vars, ps: &[PolyExpr], exec: Execution) -> PolyForm {
        ps.iter()
            .fold(PolyForm::scalar(PolyExpr::one(vars)), |acc, p| {
                acc.wedge_with(&PolyForm::differential(p), exec)
            })
    }

    /// Contraction with the standard volume multivector: the coefficient on
    /// `S` moves to the complement `T` with sign `sign(S, T)`.
    pub fn volume_dual(&self) -> PolyMultivector {
        self.dual_into()
    }
}

impl PolyMultivector {
    /// `sum_{i<j} p_ij d/dx_i ^ d/dx_j` for an antisymmetric matrix.
    pub fn bivector(vars: &Vars, matrix: &[Vec<PolyExpr>]) -> PolyMultivector {
        let n = vars.len();
        let mut pi = PolyMultivector::zero(vars, 2);
        for i in 0..n {
            for j in i + 1..n {
                pi.set((1 << i) | (1 << j), matrix[i][j].clone());
            }
        }
        pi
    }

    pub fn volume_dual(&self) -> PolyForm {
        self.dual_into()
    }
}

impl<K: Basis> fmt::Display for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut entries: Vec<(Vec<usize>, &PolyExpr)> =
            self.iter().map(|(s, c)| (subset_indices(s), c)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, (idx, c)) in entries.into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let basis: Vec<String> = idx
                .iter()
                .map(|&i| format!("{}{}", K::SYMBOL, self.vars.name(i)))
                .collect();
            let basis = if basis.is_empty() {
                "1".to_string()
            } else {
                basis.join("^")
            };
            write!(f, "({c})*{basis}")?;
        }
        Ok(())
    }
}

impl<K: Basis> fmt::Debug for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graded<{}>[{}]({self})", K::SYMBOL, self.grade)
    }
}

/// Pfaffian of the principal submatrix on `indices`, in the given order,
/// by expansion along the first row.
pub fn pfaffian(matrix: &[Vec<PolyExpr>], indices: &[usize]) -> Result<PolyExpr> {
    if indices.len() % 2 != 0 {
        return Err(Error::Contract(format!(
            "pfaffian of odd-size index set {indices:?}"
        )));
    }
    if indices.len() > MAX_DIM {
        return Err(Error::Contract(format!(
            "pfaffian of {} indices exceeds the dimension cap",
            indices.len()
        )));
    }
    let vars = match matrix.first().and_then(|r| r.first()) {
        Some(p) => p.vars().clone(),
        None => return Ok(PolyExpr::one(&Vars::new(Vec::<String>::new()))),
    };
    Ok(pf_rec(matrix, indices, &vars))
}

fn pf_rec(matrix: &[Vec<PolyExpr>], idx: &[usize], vars: &Vars) -> PolyExpr {
    if idx.is_empty() {
        return PolyExpr::one(vars);
    }
    let first = idx[0];
    let mut acc = PolyExpr::zero(vars);
    for k in 1..idx.len() {
        let a = &matrix[first][idx[k]];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|(pos, _)| pos + 1 != k)
            .map(|(_, &i)| i)
            .collect();
        let term = a * &pf_rec(matrix, &rest, vars);
        if k % 2 == 1 {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    acc
}

/// `m!` as a rational.
pub fn factorial(m: usize) -> crate::poly::Rational {
    (1..=m).fold(crate::poly::Rational::one(), |acc, k| {
        acc * crate::poly::int(k as i64)
    })
}
