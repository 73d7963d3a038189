use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func1, Func2};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    BadNumber(String),
    UnknownIdentifier(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    /// A `(` that is never closed; the offset points at it.
    UnclosedParen,
    /// A `)` without a matching `(`.
    UnmatchedParen,
    UnexpectedToken(String),
    UnexpectedEnd,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => f.write_str("empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}`"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => write!(f, "`{name}` takes {expected} argument(s), got {found}"),
            ParseErrorKind::UnclosedParen => f.write_str("unclosed parenthesis"),
            ParseErrorKind::UnmatchedParen => f.write_str("unmatched closing parenthesis"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
        }
    }
}

/// A parse failure at a character offset (counted in `char`s from 0).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, offset: usize) -> Self {
        Self { kind, offset }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{00b7}' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // optional exponent, only when followed by a digit
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j], '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|_| ParseError::new(ParseErrorKind::BadNumber(s.clone()), start))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(ParseError::new(ParseErrorKind::UnexpectedChar(other), start)),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, o)| o)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            None => ParseError::new(ParseErrorKind::UnexpectedEnd, self.end),
            Some(Tok::RParen) => ParseError::new(ParseErrorKind::UnmatchedParen, self.offset()),
            Some(t) => ParseError::new(ParseErrorKind::UnexpectedToken(t.to_string()), self.offset()),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    /// Parses `expr` up to the `)` matching the `(` at `open`.
    fn close(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(ParseError::new(ParseErrorKind::UnclosedParen, open)),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().is_none() {
            return Err(self.unexpected());
        }
        let (tok, at) = self.bump().expect("peeked");
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.close(at)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "u" => Ok(Expr::U),
                _ => self.call(name, at),
            },
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }

    fn call(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        enum Kind {
            Unary(Func1),
            Binary(Func2),
        }
        let kind = match name.as_str() {
            "sin" => Kind::Unary(Func1::Sin),
            "cos" => Kind::Unary(Func1::Cos),
            "tanh" => Kind::Unary(Func1::Tanh),
            "abs" => Kind::Unary(Func1::Abs),
            "min" => Kind::Binary(Func2::Min),
            "max" => Kind::Binary(Func2::Max),
            _ => return Err(ParseError::new(ParseErrorKind::UnknownIdentifier(name), at)),
        };
        let open = self.offset();
        if self.peek() != Some(&Tok::LParen) {
            return Err(self.unexpected());
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
        } else {
            loop {
                args.push(self.expr()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    _ => {
                        self.close(open)?;
                        break;
                    }
                }
            }
        }
        let expected = match kind {
            Kind::Unary(_) => 1,
            Kind::Binary(_) => 2,
        };
        if args.len() != expected {
            return Err(ParseError::new(
                ParseErrorKind::Arity {
                    name,
                    expected,
                    found: args.len(),
                },
                at,
            ));
        }
        let mut args = args.into_iter();
        let a = args.next().expect("arity checked");
        Ok(match kind {
            Kind::Unary(f) => Expr::call1(f, a),
            Kind::Binary(f) => Expr::call2(f, a, args.next().expect("arity checked")),
        })
    }
}

/// Parses an operator expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::new(ParseErrorKind::Empty, 0));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    #[test]
    fn parses_product() {
        assert_eq!(parse("x*u").unwrap(), Expr::binary(BinOp::Mul, Expr::X, Expr::U));
        assert_eq!(parse("  u ").unwrap(), Expr::U);
    }

    #[test]
    fn parses_mixed() {
        let e = parse("0.5*u + 0.25*sin(u)").unwrap();
        let expected = Expr::binary(
            BinOp::Add,
            Expr::binary(BinOp::Mul, num(0.5), Expr::U),
            Expr::binary(BinOp::Mul, num(0.25), Expr::call1(Func1::Sin, Expr::U)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn left_associative() {
        let e = parse("x - u - 1").unwrap();
        let expected = Expr::binary(
            BinOp::Sub,
            Expr::binary(BinOp::Sub, Expr::X, Expr::U),
            num(1.0),
        );
        assert_eq!(e, expected);
        let e = parse("x / u * 2").unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Mul, ..)));
    }

    #[test]
    fn unary_minus_binds_tighter_than_product() {
        let e = parse("-x*u").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Mul, Expr::Neg(Box::new(Expr::X)), Expr::U)
        );
        assert_eq!(parse("2 \u{2212} u").unwrap(), parse("2 - u").unwrap());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.25").unwrap(), num(1.25));
        assert_eq!(parse(".5").unwrap(), num(0.5));
        assert_eq!(parse("1e-3").unwrap(), num(1e-3));
        let err = parse("1.2.3").unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(matches!(err.kind, ParseErrorKind::BadNumber(_)));
    }

    #[test]
    fn error_offsets() {
        let err = parse("x*(u").unwrap_err();
        assert_eq!((err.kind, err.offset), (ParseErrorKind::UnclosedParen, 2));

        let err = parse("x $ u").unwrap_err();
        assert_eq!((err.kind, err.offset), (ParseErrorKind::UnexpectedChar('$'), 2));

        let err = parse("1 + foo(u)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("foo".into()));

        let err = parse("u + min(u)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));

        let err = parse("sin(u, x)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 1, found: 2, .. }));

        let err = parse("u)").unwrap_err();
        assert_eq!((err.kind, err.offset), (ParseErrorKind::UnmatchedParen, 1));

        let err = parse("cos(u").unwrap_err();
        assert_eq!((err.kind, err.offset), (ParseErrorKind::UnclosedParen, 3));

        let err = parse("u +").unwrap_err();
        assert_eq!((err.kind, err.offset), (ParseErrorKind::UnexpectedEnd, 3));

        let err = parse("   ").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Empty);

        let err = parse("u u").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn offsets_count_chars_not_bytes() {
        let err = parse("x\u{b7}u $").unwrap_err();
        assert_eq!(err.offset, 4);
    }
}
