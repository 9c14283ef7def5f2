//! Monomial-map files: one `map NEW = monomial-in-old-vars;` per line.

use poisson_core::poly::MonomialMap;
use poisson_core::syntax::{tokenize, Cursor, ExprParser};
use poisson_core::{Error, PolyExpr, Result, Vars};

pub fn parse_map(text: &str, source: &Vars) -> Result<MonomialMap> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens);
    let none = |_: &str| -> Option<PolyExpr> { None };
    let mut names: Vec<String> = Vec::new();
    let mut images = Vec::new();
    while !cur.at_eof() {
        cur.expect_keyword("map")?;
        let tok = cur.peek();
        let name = cur.expect_ident()?;
        if names.iter().any(|n| n == name) {
            return Err(cur.error_at(tok, format!("`{name}` mapped twice")));
        }
        cur.expect_punct('=')?;
        let start = cur.peek();
        let img = ExprParser::new(source, &none).expr(&mut cur)?;
        if img.as_single_term().is_none() {
            return Err(cur.error_at(start, format!("image of `{name}` is not a single monomial")));
        }
        cur.expect_punct(';')?;
        names.push(name.to_string());
        images.push(img);
    }
    if names.len() != source.len() {
        return Err(Error::Arity {
            expected: source.len(),
            found: names.len(),
        });
    }
    MonomialMap::from_images(source.clone(), Vars::new(names), &images)
}
