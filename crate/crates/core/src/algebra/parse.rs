//! Expression parser for rational functions in the variable z.
//!
//! Grammar: `+ - * / ^`, parentheses, integer and decimal literals, the
//! variable `z` and the imaginary unit `i`. Juxtaposition multiplies
//! (`2z`, `3(z+1)`), and `^` takes a signed integer exponent.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::gaussian::GaussianRational as Gq;
use super::laurent::LaurentPolynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Z,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' | '\n' => {}
            '+' => out.push(Tok::Plus),
            '-' | '−' => out.push(Tok::Minus),
            '*' | '·' => {
                if chars.get(k + 1) == Some(&'*') {
                    out.push(Tok::Caret);
                    k += 1;
                } else {
                    out.push(Tok::Star);
                }
            }
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            'z' | 'Z' | 'x' => out.push(Tok::Z),
            'i' | 'I' | 'j' => out.push(Tok::I),
            d if d.is_ascii_digit() || d == '.' => {
                let start = k;
                while k + 1 < chars.len() && (chars[k + 1].is_ascii_digit() || chars[k + 1] == '.') {
                    k += 1;
                }
                let lit: String = chars[start..=k].iter().collect();
                out.push(Tok::Num(decimal(&lit)?));
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
        k += 1;
    }
    Ok(out)
}

fn decimal(lit: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number '{lit}'"));
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = BigInt::from(10).pow(frac.len() as u32);
    Ok(BigRational::new(n, d))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc = &acc / &d;
                }
                Some(Tok::Num(_)) | Some(Tok::Z) | Some(Tok::I) | Some(Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let mut neg = false;
        let mut paren = false;
        if self.peek() == Some(&Tok::LParen) {
            paren = true;
            self.pos += 1;
        }
        if self.peek() == Some(&Tok::Minus) {
            neg = true;
            self.pos += 1;
        }
        let e = match self.next() {
            Some(Tok::Num(n)) if n.is_integer() => n.to_integer(),
            _ => return Err(Error::Parse("exponent must be an integer".into())),
        };
        if paren && self.next() != Some(Tok::RParen) {
            return Err(Error::Parse("unbalanced parenthesis in exponent".into()));
        }
        let e: i32 = e.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
        if e > 10_000 {
            return Err(Error::Parse("exponent too large".into()));
        }
        base.pow(if neg { -e } else { e }).map_err(|_| Error::Parse("negative power of zero".into()))
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(RationalFunction::constant(Gq::real(n))),
            Some(Tok::Z) => Ok(RationalFunction::z()),
            Some(Tok::I) => Ok(RationalFunction::constant(Gq::i())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<RationalFunction> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(r)
}

/// Parse an expression that must reduce to a Laurent polynomial.
pub fn parse_laurent(s: &str) -> Result<LaurentPolynomial> {
    let r = parse_rational(s)?;
    LaurentPolynomial::from_rational(&r)
        .ok_or_else(|| Error::Parse(format!("'{s}' is not a Laurent polynomial")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Poly;

    #[test]
    fn basic_expressions() {
        let p = parse_rational("z^2 + 2z + 1").unwrap();
        assert_eq!(p, RationalFunction::from_poly(Poly::from_ints(&[1, 2, 1])));
        let l = parse_laurent("z + 1/z").unwrap();
        assert_eq!(l, LaurentPolynomial::from_terms(&[(1, 1), (-1, 1)]));
        let l = parse_laurent("3z^-2 + z^5").unwrap();
        assert_eq!(l.bidegree().unwrap(), (-2, 5));
        let q = parse_rational("(z+1)/(z-1)").unwrap();
        assert_eq!(q.den(), &Poly::from_ints(&[-1, 1]));
    }

    #[test]
    fn precedence_and_units() {
        assert_eq!(parse_rational("-z^2").unwrap(), parse_rational("-(z*z)").unwrap());
        assert_eq!(parse_rational("2^3").unwrap(), RationalFunction::from_int(8));
        let c = parse_rational("1/2 + 3i/4").unwrap();
        assert_eq!(c, RationalFunction::constant(Gq::from_parts((1, 2), (3, 4))));
        assert_eq!(parse_rational("0.25z").unwrap(), parse_rational("z/4").unwrap());
        assert_eq!(parse_rational("z**2").unwrap(), parse_rational("z^2").unwrap());
    }

    #[test]
    fn errors() {
        assert!(parse_rational("z +").is_err());
        assert!(parse_rational("(z").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("z^0.5").is_err());
        assert!(parse_laurent("1/(z-1)").is_err());
    }
}
