//! Text form of polynomials and polynomial files.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := uint | 'x' uint | '(' expr ')'
//! ```
//!
//! Files carry a header line `p=<prime> n=<nvars>`, then one polynomial per
//! line. Lines starting with `#` hold `key=value` metadata.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{Monomial, MultiPoly};

/// Exponents above this are rejected to keep `(...)^e` expansions sane.
const MAX_EXPONENT: u32 = 1 << 16;

pub fn parse_poly(text: &str, field: PrimeField) -> Result<MultiPoly> {
    parse_poly_n(text, field, 0)
}

/// Parses with at least `nvars` variables.
pub fn parse_poly_n(text: &str, field: PrimeField, nvars: usize) -> Result<MultiPoly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        field,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out.with_nvars(nvars))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: PrimeField,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let mut v: u64 = 0;
        while let Some(&b) = self.src.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or(Error::Overflow {
                    pos: start,
                    what: "integer literal".into(),
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.uint()?;
            if e > MAX_EXPONENT as u64 {
                return Err(Error::Overflow {
                    pos: at,
                    what: format!("exponent {e} exceeds {MAX_EXPONENT}"),
                });
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let f = self.field;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(self.err("expected variable index after 'x'"));
                }
                let k = self.uint()?;
                if k == 0 {
                    return Err(Error::Syntax {
                        pos: at,
                        msg: "variables are numbered from x1".into(),
                    });
                }
                if k > u32::MAX as u64 {
                    return Err(Error::Overflow {
                        pos: at,
                        what: "variable index".into(),
                    });
                }
                let i = (k - 1) as usize;
                Ok(MultiPoly::monomial(f, i + 1, Monomial::var(i, 1), 1))
            }
            Some(b) if b.is_ascii_digit() => {
                let v = self.uint()?;
                Ok(MultiPoly::constant(f, 0, (v % f.p() as u64) as u32))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// A parsed polynomial file.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFile {
    pub field: PrimeField,
    pub nvars: usize,
    pub metadata: Vec<(String, String)>,
    pub polys: Vec<MultiPoly>,
}

impl PolyFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut header: Option<(PrimeField, usize)> = None;
        let mut polys = Vec::new();
        let mut offset = 0usize;
        for line in text.lines() {
            let line_start = offset;
            offset += line.len() + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some((k, v)) = tok.split_once('=') {
                        metadata.push((k.to_string(), v.to_string()));
                    }
                }
                continue;
            }
            match header {
                None => header = Some(parse_header(trimmed, line_start)?),
                Some((field, n)) => {
                    polys.push(parse_poly_n(trimmed, field, n).map_err(|e| shift(e, line_start))?)
                }
            }
        }
        let (field, nvars) = header.ok_or(Error::Syntax {
            pos: 0,
            msg: "missing header line `p=<prime> n=<nvars>`".into(),
        })?;
        Ok(PolyFile {
            field,
            nvars,
            metadata,
            polys,
        })
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        if !self.metadata.is_empty() {
            out.push('#');
            for (k, v) in &self.metadata {
                out.push_str(&format!(" {k}={v}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("p={} n={}\n", self.field.p(), self.nvars));
        for p in &self.polys {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { pos, msg } => Error::Syntax { pos: pos + by, msg },
        Error::Overflow { pos, what } => Error::Overflow { pos: pos + by, what },
        other => other,
    }
}

fn parse_header(line: &str, at: usize) -> Result<(PrimeField, usize)> {
    let mut p = None;
    let mut n = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("p", v)) => p = v.parse::<u64>().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            _ => {
                return Err(Error::Syntax {
                    pos: at,
                    msg: format!("bad header token `{tok}`"),
                })
            }
        }
    }
    match (p, n) {
        (Some(p), Some(n)) => Ok((PrimeField::new(p)?, n)),
        _ => Err(Error::Syntax {
            pos: at,
            msg: "header must be `p=<prime> n=<nvars>`".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn simple_terms() {
        let p = parse_poly("x1*x2 + 3", f(5)).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial::new(vec![1, 1])), 1);
        assert_eq!(p.constant_term(), 3);
    }

    #[test]
    fn characteristic_two_sign() {
        let p = parse_poly("x1^2 - x1", f(2)).unwrap();
        assert_eq!(p.coeff(&Monomial::new(vec![2])), 1);
        assert_eq!(p.coeff(&Monomial::new(vec![1])), 1);
    }

    #[test]
    fn mixed_quartic() {
        let p = parse_poly("4*x1^3*x2 + 4*x3^2*x4^2", f(7)).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.degree(), Some(4));
        assert_eq!(p.nvars(), 4);
    }

    #[test]
    fn parentheses_and_unary() {
        let a = parse_poly("-(x1 + 2)^2 * -1", f(5)).unwrap();
        let b = parse_poly("x1^2 + 4*x1 + 4", f(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_poly("x1 + * x2", f(5)),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(parse_poly("x0", f(5)), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_poly("99999999999999999999999", f(5)),
            Err(Error::Overflow { pos: 0, .. })
        ));
        assert!(matches!(
            parse_poly("x1^99999999", f(5)),
            Err(Error::Overflow { .. })
        ));
        assert!(matches!(parse_poly("(x1", f(5)), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("", f(5)), Err(Error::Syntax { .. })));
    }

    #[test]
    fn file_roundtrip() {
        let text = "# kind=demo seed=7\np=5 n=4\nx1*x2 + 3\nx4^2\n";
        let file = PolyFile::parse(text).unwrap();
        assert_eq!(file.nvars, 4);
        assert_eq!(file.polys.len(), 2);
        assert_eq!(file.polys[0].nvars(), 4);
        assert_eq!(file.format(), text);
        assert!(PolyFile::parse("x1\n").is_err());
    }

    fn arb_poly(p: u64) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, 0..4), 0u32..p as u32), 0..8)
            .prop_map(move |terms| {
                MultiPoly::from_terms(
                    f(p),
                    0,
                    terms.into_iter().map(|(e, c)| (Monomial::new(e), c)),
                )
            })
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(p in arb_poly(7)) {
            let back = parse_poly(&p.to_string(), f(7)).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
