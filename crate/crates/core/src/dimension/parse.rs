//! Recursive-descent parser for unit expressions.
//!
//! ```text
//! expr     := term (('*' | '·' | '/') term)*
//! term     := factor ('^' exponent)?
//! factor   := symbol | '1' | '(' expr ')'
//! exponent := int | '(' int ('/' int)? ')'        int := ('+' | '-')? digits
//! ```
//!
//! Whitespace is ignored. Operators are left-associative, so `kg/m*s` reads
//! as `(kg/m)*s`. Error positions are zero-based character offsets.

use num_traits::Zero;

use super::{Dimension, Exponent};
use crate::error::{Error, Result};

/// Parsed unit expression. Every symbol leaf has already been resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitExpr {
    One,
    Symbol { name: String, dimension: Dimension },
    Mul(Box<UnitExpr>, Box<UnitExpr>),
    Div(Box<UnitExpr>, Box<UnitExpr>),
    Pow(Box<UnitExpr>, Exponent),
}

/// Dimension of a recognised unit symbol.
pub fn lookup_symbol(name: &str) -> Option<Dimension> {
    let ints = match name {
        "kg" => [1, 0, 0, 0, 0, 0, 0],
        "m" => [0, 1, 0, 0, 0, 0, 0],
        "s" => [0, 0, 1, 0, 0, 0, 0],
        "A" => [0, 0, 0, 1, 0, 0, 0],
        "K" => [0, 0, 0, 0, 1, 0, 0],
        "mol" => [0, 0, 0, 0, 0, 1, 0],
        "cd" => [0, 0, 0, 0, 0, 0, 1],
        "Pa" => [1, -1, -2, 0, 0, 0, 0],
        "W" => [1, 2, -3, 0, 0, 0, 0],
        "J" => [1, 2, -2, 0, 0, 0, 0],
        "N" => [1, 1, -2, 0, 0, 0, 0],
        "T" => [1, 0, -2, -1, 0, 0, 0],
        "Hz" => [0, 0, -1, 0, 0, 0, 0],
        "rad" => [0, 0, 0, 0, 0, 0, 0],
        _ => return None,
    };
    Some(Dimension::from_ints(ints))
}

impl UnitExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: text.chars().count(),
        };
        let expr = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(syntax(tok.pos, format!("unexpected {}", tok.kind.describe())));
        }
        Ok(expr)
    }

    pub fn dimension(&self) -> Result<Dimension> {
        Ok(self.eval())
    }

    fn eval(&self) -> Dimension {
        match self {
            UnitExpr::One => Dimension::dimensionless(),
            UnitExpr::Symbol { dimension, .. } => *dimension,
            UnitExpr::Mul(a, b) => a.eval() * b.eval(),
            UnitExpr::Div(a, b) => a.eval() / b.eval(),
            UnitExpr::Pow(a, q) => a.eval().pow(*q),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Ident(String),
    Int(i64),
    Star,
    Slash,
    Caret,
    Plus,
    Minus,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Ident(s) => format!("symbol `{s}`"),
            Kind::Int(n) => format!("number `{n}`"),
            Kind::Star => "`*`".into(),
            Kind::Slash => "`/`".into(),
            Kind::Caret => "`^`".into(),
            Kind::Plus => "`+`".into(),
            Kind::Minus => "`-`".into(),
            Kind::LParen => "`(`".into(),
            Kind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::UnitSyntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '*' | '·' | '⋅' => Kind::Star,
            '/' => Kind::Slash,
            '^' => Kind::Caret,
            '+' => Kind::Plus,
            '-' => Kind::Minus,
            '(' => Kind::LParen,
            ')' => Kind::RParen,
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| syntax(start, format!("integer `{digits}` out of range")))?;
                tokens.push(Token { kind: Kind::Int(n), pos: start });
                continue;
            }
            c if c.is_alphabetic() => {
                while i < chars.len() && chars[i].is_alphabetic() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                tokens.push(Token { kind: Kind::Ident(name), pos: start });
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        };
        tokens.push(Token { kind, pos: start });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: Kind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {}", kind.describe())))
        }
    }

    fn expr(&mut self) -> Result<UnitExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Kind::Star) {
                lhs = UnitExpr::Mul(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Kind::Slash) {
                lhs = UnitExpr::Div(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<UnitExpr> {
        let base = self.factor()?;
        if self.eat(&Kind::Caret) {
            let q = self.exponent()?;
            Ok(UnitExpr::Pow(Box::new(base), q))
        } else {
            Ok(base)
        }
    }

    fn factor(&mut self) -> Result<UnitExpr> {
        let at = self.here();
        match self.next() {
            Some(Token { kind: Kind::Ident(name), pos }) => match lookup_symbol(&name) {
                Some(dimension) => Ok(UnitExpr::Symbol { name, dimension }),
                None => Err(Error::UnknownUnitSymbol { symbol: name, position: pos }),
            },
            Some(Token { kind: Kind::Int(1), .. }) => Ok(UnitExpr::One),
            Some(Token { kind: Kind::Int(n), pos }) => {
                Err(syntax(pos, format!("numeric factor `{n}` is not a unit; only `1` is allowed")))
            }
            Some(Token { kind: Kind::LParen, .. }) => {
                let inner = self.expr()?;
                self.expect(Kind::RParen)?;
                Ok(inner)
            }
            Some(tok) => Err(syntax(tok.pos, format!("unexpected {}", tok.kind.describe()))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let negative = if self.eat(&Kind::Minus) {
            true
        } else {
            self.eat(&Kind::Plus);
            false
        };
        let at = self.here();
        match self.next() {
            Some(Token { kind: Kind::Int(n), .. }) => Ok(if negative { -n } else { n }),
            _ => Err(syntax(at, "expected integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        if self.eat(&Kind::LParen) {
            let numer = self.signed_int()?;
            let denom = if self.eat(&Kind::Slash) {
                let at = self.here();
                let d = self.signed_int()?;
                if d.is_zero() {
                    return Err(syntax(at, "zero denominator in exponent"));
                }
                d
            } else {
                1
            };
            self.expect(Kind::RParen)?;
            Ok(Exponent::new(numer, denom))
        } else {
            Ok(Exponent::from_integer(self.signed_int()?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(text: &str) -> Dimension {
        Dimension::parse(text).unwrap()
    }

    #[test]
    fn pressure_forms_agree() {
        let expected = Dimension::from_ints([1, -1, -2, 0, 0, 0, 0]);
        assert_eq!(dim("kg/(m*s^2)"), expected);
        assert_eq!(dim("Pa"), expected);
        assert_eq!(dim(" kg · m^-1 · s^-2 "), expected);
        assert_eq!(dim("N/m^2"), expected);
    }

    #[test]
    fn tesla_ampere_square_metre() {
        // T = kg s^-2 A^-1, so T*A*m^2 = kg m^2 s^-2 (an energy)
        assert_eq!(dim("T*A*m^2"), Dimension::from_ints([1, 2, -2, 0, 0, 0, 0]));
        assert_eq!(dim("T*A*m^2"), dim("J"));
    }

    #[test]
    fn dimensionless_forms() {
        assert!(dim("1").is_dimensionless());
        assert!(dim("rad").is_dimensionless());
        assert_eq!(dim("1/s"), dim("Hz"));
    }

    #[test]
    fn rational_and_grouped_powers() {
        assert_eq!(dim("(m^(1/2))^2"), dim("m"));
        assert_eq!(dim("(m/s)^2"), dim("m^2/s^2"));
        assert_eq!(dim("m^(-2/4)"), dim("m^(-1/2)"));
    }

    #[test]
    fn left_associative() {
        assert_eq!(dim("kg/m*s"), dim("kg*s/m"));
    }

    #[test]
    fn unknown_symbol_is_located() {
        match Dimension::parse("kg/(m*furlong)") {
            Err(Error::UnknownUnitSymbol { symbol, position }) => {
                assert_eq!(symbol, "furlong");
                assert_eq!(position, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_located() {
        for (text, at) in [("kg/(m*s", 7), ("kg**m", 3), ("", 0), ("m^", 2), ("2*m", 0), ("m^(1/0)", 5), ("m)", 1)] {
            match Dimension::parse(text) {
                Err(Error::UnitSyntax { position, .. }) => assert_eq!(position, at, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn table_units_parse() {
        for unit in [
            "kg/(m*s^2)", "kg/m^3", "m/s", "m^3/s", "m^2", "kg/(m*s)", "m", "Pa", "T", "1/s",
            "rad", "s", "kg", "kg*m^2", "kg*m^2/s^2", "W", "J", "A", "T*A*m", "T^2/m",
            "T*m^2", "T*A/m", "T/m", "T*A*m^2", "T·A·m^2",
        ] {
            assert!(Dimension::parse(unit).is_ok(), "{unit}");
        }
    }
}
