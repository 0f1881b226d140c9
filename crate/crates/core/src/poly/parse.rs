use rug::{Integer, Rational};
use thiserror::Error;

use super::multi::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("zero denominator at position {pos}")]
    ZeroDenominator { pos: usize },
}

/// Parses a polynomial over the given variable names.
///
/// ```text
/// expr     := ('+'|'-')? term (('+'|'-') term)*
/// term     := factor ('*' factor)*
/// factor   := base ('^' uint)?
/// base     := var | rational | '(' expr ')'
/// rational := uint ('/' uint)?
/// ```
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<Poly, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn arity(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let b = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let e = self.uint()?;
            let e = e.to_u32().ok_or(ParseError::Syntax {
                pos: start,
                msg: "exponent too large".into(),
            })?;
            return Ok(b.pow(e));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                if self.eat(b'/') {
                    self.skip_ws();
                    let at = self.pos;
                    let den = self.uint()?;
                    if den == 0 {
                        return Err(ParseError::ZeroDenominator { pos: at });
                    }
                    Ok(Poly::constant(self.arity(), Rational::from((num, den))))
                } else {
                    Ok(Poly::constant(self.arity(), Rational::from(num)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Poly::var(self.arity(), i)),
                    None => Err(ParseError::UnknownVariable {
                        name: name.to_string(),
                        pos: start,
                    }),
                }
            }
            Some(_) => Err(self.syntax("expected a variable, number or `(`")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<Integer, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an unsigned integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse::<Integer>().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: &[&str] = &["x", "y"];

    #[test]
    fn golden_inputs() {
        let f = parse_poly("x + x^2*y", XY).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.coeff([1, 0, 0]), 1);
        assert_eq!(f.coeff([2, 1, 0]), 1);
        let g = parse_poly("x*y + 1/3*x^3*y^2", XY).unwrap();
        assert_eq!(g.coeff([3, 2, 0]), Rational::from((1, 3)));
        assert!(parse_poly("0", XY).unwrap().is_zero());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_poly("x + w", XY),
            Err(ParseError::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(
            parse_poly("1/0*x", XY),
            Err(ParseError::ZeroDenominator { pos: 2 })
        ));
        assert!(matches!(parse_poly("x +", XY), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("x y", XY), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn nested_and_signed() {
        let f = parse_poly("-(x - 2*y)^2 + 4", XY).unwrap();
        assert_eq!(f.coeff([2, 0, 0]), -1);
        assert_eq!(f.coeff([1, 1, 0]), 4);
        assert_eq!(f.coeff([0, 2, 0]), -4);
        assert_eq!(f.coeff([0, 0, 0]), 4);
    }

    #[test]
    fn print_parse_fixed_point() {
        for s in ["x*y + 1/3*x^3*y^2", "-x^6 + 7/2*y - 3", "x - y", "5"] {
            let p = parse_poly(s, XY).unwrap();
            let printed = p.to_string_with(XY);
            assert_eq!(parse_poly(&printed, XY).unwrap(), p);
            assert_eq!(parse_poly(&printed, XY).unwrap().to_string_with(XY), printed);
        }
    }
}
