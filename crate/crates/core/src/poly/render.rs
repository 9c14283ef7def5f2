use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Exponent, Monomial, PolyExpr, Rational, Vars};

fn write_exponent(out: &mut impl Write, e: &Exponent) -> fmt::Result {
    if *e.denom() == 1 && *e.numer() >= 0 {
        write!(out, "^{}", e.numer())
    } else {
        write!(out, "^({e})")
    }
}

pub(super) fn write_monomial(out: &mut impl Write, vars: &Vars, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, e) in m.exponents().iter().enumerate() {
        if *e.numer() == 0 {
            continue;
        }
        if !first {
            out.write_char('*')?;
        }
        first = false;
        out.write_str(vars.name(i))?;
        if !e.is_one() {
            write_exponent(out, e)?;
        }
    }
    if first {
        out.write_char('1')?;
    }
    Ok(())
}

pub(super) fn monomial_string(vars: &Vars, m: &Monomial) -> String {
    let mut s = String::new();
    write_monomial(&mut s, vars, m).expect("writing to a String");
    s
}

fn write_abs_coefficient(out: &mut impl Write, c: &Rational) -> fmt::Result {
    let a = c.abs();
    if a.is_integer() {
        write!(out, "{}", a.numer())
    } else {
        write!(out, "{}/{}", a.numer(), a.denom())
    }
}

/// Leading term first; `-`/`+` joiners; unit coefficients dropped.
pub(super) fn write_poly(out: &mut impl Write, p: &PolyExpr) -> fmt::Result {
    if p.is_zero() {
        return out.write_char('0');
    }
    for (idx, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (idx, neg) {
            (0, true) => out.write_char('-')?,
            (0, false) => {}
            (_, true) => out.write_str(" - ")?,
            (_, false) => out.write_str(" + ")?,
        }
        if m.is_one() {
            write_abs_coefficient(out, c)?;
        } else {
            if !c.abs().is_one() {
                write_abs_coefficient(out, c)?;
                out.write_char('*')?;
            }
            write_monomial(out, p.vars(), m)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{exp, rat, PolyExpr, Vars};
    use super::*;

    #[test]
    fn canonical_text() {
        let v = Vars::numbered("x", 3);
        let p = PolyExpr::parse("x3^2 + k*x1*x2", &v);
        assert!(p.is_err());
        let p = PolyExpr::parse("x3^2 + 2*x1*x2 - 1/3", &v).unwrap();
        assert_eq!(p.to_string(), "2*x1*x2 + x3^2 - 1/3");
        assert_eq!(PolyExpr::zero(&v).to_string(), "0");
        let m = Monomial::from_exponents(vec![exp(-1, 2), exp(3, 2), exp(0, 1)]);
        let q = PolyExpr::term(&v, rat(-5, 7), m);
        assert_eq!(q.to_string(), "-5/7*x1^(-1/2)*x2^(3/2)");
        assert_eq!(PolyExpr::parse(&q.to_string(), &v).unwrap(), q);
    }
}
