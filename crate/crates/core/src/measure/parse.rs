//! Measure expressions: `name`, `sum(a,b)`, `product(a,b)`,
//! `lipschitz(a,L)` with `L` an integer or `num/den`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::MeasureExpr;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// Parses an expression, resolving bare names with `resolve`. Repeated names
/// share one schedule.
pub fn parse_measure(
    text: &str,
    resolve: impl Fn(&str) -> Result<Schedule>,
) -> Result<MeasureExpr> {
    let mut p = Parser {
        src: text,
        pos: 0,
        resolve: &resolve,
        cache: BTreeMap::new(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Result<Schedule>,
    cache: BTreeMap<String, Arc<Schedule>>,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Expression(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '/'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn peek(&mut self, c: char) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(c)
    }

    fn expr(&mut self) -> Result<MeasureExpr> {
        let name = self.word().to_string();
        if name.is_empty() {
            return Err(self.error("expected a measure"));
        }
        if !self.peek('(') {
            let s = match self.cache.get(&name) {
                Some(s) => s.clone(),
                None => {
                    let s = Arc::new((self.resolve)(&name)?);
                    self.cache.insert(name, s.clone());
                    s
                }
            };
            return Ok(MeasureExpr::Base(s));
        }
        self.expect('(')?;
        let a = self.expr()?;
        self.expect(',')?;
        let e = match name.as_str() {
            "sum" => MeasureExpr::sum(a, self.expr()?)?,
            "product" => MeasureExpr::product(a, self.expr()?),
            "lipschitz" => {
                let l = self.word().to_string();
                MeasureExpr::lipschitz(a, parse_rational(&l)?)?
            }
            other => return Err(Error::Expression(format!("unknown combinator `{other}`"))),
        };
        self.expect(')')?;
        Ok(e)
    }
}

/// `p` or `p/q` with positive integers.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Expression(format!("bad rational `{text}`"));
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d <= BigInt::from(0) || n <= BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<MeasureExpr> {
        parse_measure(text, Schedule::named)
    }

    #[test]
    fn parses_nested_expressions() {
        let e = parse("lipschitz( sum(cantor, cantor), 3/2 )").unwrap();
        let MeasureExpr::Lipschitz(inner, l) = &e else {
            panic!("{e}")
        };
        assert_eq!(*l, BigRational::new(3.into(), 2.into()));
        let MeasureExpr::Sum(a, b) = inner.as_ref() else {
            panic!()
        };
        let (MeasureExpr::Base(a), MeasureExpr::Base(b)) = (a.as_ref(), b.as_ref()) else {
            panic!()
        };
        assert!(Arc::ptr_eq(a, b));
        assert_eq!(parse("product(cantor,carpet-vicsek)").unwrap().dim(), 3);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "sum(cantor)",
            "sum(cantor,carpet)",
            "lipschitz(cantor,1/2)",
            "lipschitz(cantor,x)",
            "cantor)",
            "pow(cantor,cantor)",
            "sponge",
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
