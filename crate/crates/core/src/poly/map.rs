use num_traits::{One, ToPrimitive, Zero};

use super::rational::{exponent_to_rational, rational_pow};
use super::{Exponent, Monomial, PolyExpr, Rational, Vars};
use crate::error::{Error, Result};

/// Invertible monomial change of variables
/// `target[a] = scales[a] * prod_i source[i]^rows[a][i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    source: Vars,
    target: Vars,
    rows: Vec<Vec<Exponent>>,
    scales: Vec<Rational>,
}

impl MonomialMap {
    pub fn new(
        source: Vars,
        target: Vars,
        rows: Vec<Vec<Exponent>>,
        scales: Vec<Rational>,
    ) -> Result<Self> {
        let n = source.len();
        if target.len() != n || rows.len() != n || scales.len() != n {
            return Err(Error::Arity {
                expected: n,
                found: target.len().min(rows.len()).min(scales.len()),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Arity {
                expected: n,
                found: r.len(),
            });
        }
        if scales.iter().any(Zero::is_zero) {
            return Err(Error::SingularMap);
        }
        let map = MonomialMap {
            source,
            target,
            rows,
            scales,
        };
        map.inverse_matrix()?;
        Ok(map)
    }

    /// Unit scales.
    pub fn from_rows(source: Vars, target: Vars, rows: Vec<Vec<Exponent>>) -> Result<Self> {
        let n = rows.len();
        Self::new(source, target, rows, vec![Rational::one(); n])
    }

    /// Each image must be a single term over `source`.
    pub fn from_images(source: Vars, target: Vars, images: &[PolyExpr]) -> Result<Self> {
        let mut rows = Vec::with_capacity(images.len());
        let mut scales = Vec::with_capacity(images.len());
        for img in images {
            if img.vars() != &source {
                return Err(Error::VariableSet {
                    left: source.names().join(" "),
                    right: img.vars().names().join(" "),
                });
            }
            let (m, c) = img.as_single_term().ok_or_else(|| {
                Error::Contract(format!("map image `{img}` is not a single monomial"))
            })?;
            rows.push(m.exponents().to_vec());
            scales.push(c.clone());
        }
        Self::new(source, target, rows, scales)
    }

    pub fn identity(vars: &Vars) -> Self {
        let n = vars.len();
        let rows = (0..n)
            .map(|i| Monomial::var(n, i).exponents().to_vec())
            .collect();
        Self::from_rows(vars.clone(), vars.clone(), rows).expect("identity is invertible")
    }

    pub fn source(&self) -> &Vars {
        &self.source
    }

    pub fn target(&self) -> &Vars {
        &self.target
    }

    pub fn rows(&self) -> &[Vec<Exponent>] {
        &self.rows
    }

    pub fn scales(&self) -> &[Rational] {
        &self.scales
    }

    /// Exact Gauss-Jordan inverse of the exponent matrix.
    fn inverse_matrix(&self) -> Result<Vec<Vec<Exponent>>> {
        let n = self.rows.len();
        let mut a: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row: Vec<Rational> = r.iter().map(|e| exponent_to_rational(*e)).collect();
                row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or(Error::SingularMap)?;
            a.swap(col, pivot);
            let inv = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..2 * n {
                        let d = &f * &a[col][c];
                        a[r][c] -= d;
                    }
                }
            }
        }
        a.into_iter()
            .map(|row| {
                row[n..]
                    .iter()
                    .map(|q| {
                        match (q.numer().to_i64(), q.denom().to_i64()) {
                            (Some(p), Some(d)) => Ok(Exponent::new(p, d)),
                            _ => Err(Error::Domain(format!("inverse exponent {q} overflows"))),
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `source[i] = s_i * prod_a target[a]^inv[i][a]`
    pub fn inverse(&self) -> Result<MonomialMap> {
        let inv = self.inverse_matrix()?;
        let n = inv.len();
        let mut scales = Vec::with_capacity(n);
        for row in &inv {
            let mut s = Rational::one();
            for (a, e) in row.iter().enumerate() {
                s *= rational_pow(&self.scales[a], -*e)?;
            }
            scales.push(s);
        }
        Ok(MonomialMap {
            source: self.target.clone(),
            target: self.source.clone(),
            rows: inv,
            scales,
        })
    }

    /// The new variables as (Puiseux) monomials in the old ones.
    pub fn forward_images(&self) -> Vec<PolyExpr> {
        self.rows
            .iter()
            .zip(&self.scales)
            .map(|(r, s)| {
                PolyExpr::term(&self.source, s.clone(), Monomial::from_exponents(r.clone()))
            })
            .collect()
    }

    /// The old variables as monomials in the new ones.
    pub fn inverse_images(&self) -> Result<Vec<PolyExpr>> {
        Ok(self.inverse()?.forward_images())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{exp, exp_int};
    use super::*;

    fn torus_map() -> MonomialMap {
        let z = exp_int(0);
        let one = exp_int(1);
        MonomialMap::from_rows(
            Vars::numbered("x", 3),
            Vars::numbered("y", 3),
            vec![
                vec![one, z, z],
                vec![z, one, exp(-1, 2)],
                vec![z, z, exp(3, 2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn inverse_of_mirror_map() {
        let m = torus_map();
        let inv = m.inverse_images().unwrap();
        let y = m.target().clone();
        assert_eq!(inv[0], PolyExpr::parse("y1", &y).unwrap());
        assert_eq!(inv[1], PolyExpr::parse("y2*y3^(1/3)", &y).unwrap());
        assert_eq!(inv[2], PolyExpr::parse("y3^(2/3)", &y).unwrap());
    }

    #[test]
    fn singular_rows_rejected() {
        let one = exp_int(1);
        let r = MonomialMap::from_rows(
            Vars::numbered("x", 2),
            Vars::numbered("y", 2),
            vec![vec![one, one], vec![exp_int(2), exp_int(2)]],
        );
        assert_eq!(r, Err(Error::SingularMap));
    }
}
