use std::fmt;

use super::lexer::{tokenize, Tok};
use super::{DslError, ErrorKind, Pos};
use crate::coeff::{parse_rational, Rational};

/// Source position attached to a node; never part of equality.
#[derive(Debug, Clone, Copy, Default)]
pub struct At(pub Pos);

impl PartialEq for At {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// `.`, the separator used between odd factors in canonical text.
    Dot,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Dot => ".",
            BinOp::Div => "/",
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    D(Option<u8>),
    Q(Option<u8>),
    Dt(u32),
    Exp,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        let indexed = |rest: &str| -> Option<Option<u8>> {
            if rest.is_empty() {
                Some(None)
            } else {
                rest.parse::<u8>().ok().filter(|i| *i >= 1).map(Some)
            }
        };
        match name {
            "dt" => Some(Func::Dt(1)),
            "exp" => Some(Func::Exp),
            _ => {
                if let Some(rest) = name.strip_prefix('D') {
                    indexed(rest).map(Func::D)
                } else if let Some(rest) = name.strip_prefix('Q') {
                    indexed(rest).map(Func::Q)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::D(None) => f.write_str("D"),
            Func::D(Some(i)) => write!(f, "D{i}"),
            Func::Q(None) => f.write_str("Q"),
            Func::Q(Some(i)) => write!(f, "Q{i}"),
            Func::Dt(1) => f.write_str("dt"),
            Func::Dt(k) => write!(f, "dt^{k}"),
            Func::Exp => f.write_str("exp"),
        }
    }
}

/// Parsed expression, kept close to the source so that it renders back to
/// the same canonical text.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num { text: String, value: Rational },
    Ident { name: String, at: At },
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Pow { base: Box<Expr>, exp: Box<Expr> },
    Call { func: Func, arg: Box<Expr>, at: At },
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.prec(),
            Expr::Neg(_) => 3,
            Expr::Pow { .. } => 4,
            _ => 5,
        }
    }

    /// Position of the first identifier or call, if any.
    pub fn pos(&self) -> Option<Pos> {
        match self {
            Expr::Num { .. } => None,
            Expr::Ident { at, .. } | Expr::Call { at, .. } => Some(at.0),
            Expr::Neg(e) => e.pos(),
            Expr::Binary { lhs, rhs, .. } => lhs.pos().or_else(|| rhs.pos()),
            Expr::Pow { base, exp } => base.pos().or_else(|| exp.pos()),
        }
    }

    pub fn integer(&self) -> Option<u32> {
        match self {
            Expr::Num { text, .. } if text.chars().all(|c| c.is_ascii_digit()) => text.parse().ok(),
            _ => None,
        }
    }
}

fn wrap(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { text, .. } => f.write_str(text),
            Expr::Ident { name, .. } => f.write_str(name),
            Expr::Neg(e) => write!(f, "-{}", wrap(e, e.prec() != 3 && e.prec() != 5)),
            Expr::Binary { op, lhs, rhs } => {
                let p = op.prec();
                write!(
                    f,
                    "{}{}{}",
                    wrap(lhs, lhs.prec() < p),
                    op.symbol(),
                    wrap(rhs, rhs.prec() <= p)
                )
            }
            Expr::Pow { base, exp } => write!(f, "{}^{}", wrap(base, base.prec() < 3), wrap(exp, exp.prec() < 5)),
            Expr::Call { func, arg, .. } => write!(f, "{func}({arg})"),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn error(&self, msg: String) -> DslError {
        DslError::new(self.pos(), ErrorKind::Syntax(msg))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.idx += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {}, found {}", tok.describe(), t.describe()))),
            None => Err(self.error(format!("expected {}, found end of input", tok.describe()))),
        }
    }

    fn sum(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.idx += 1;
            let rhs = self.product()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn product(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                Some(Tok::Dot) => BinOp::Dot,
                _ => return Ok(lhs),
            };
            self.idx += 1;
            let rhs = self.power()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let mut base = self.unary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            let exp = self.primary()?;
            base = Expr::Pow {
                base: Box::new(base),
                exp: Box::new(exp),
            };
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn call(&mut self, func: Func, at: Pos) -> Result<Expr, DslError> {
        self.expect(Tok::LParen)?;
        let arg = self.sum()?;
        self.expect(Tok::RParen)?;
        Ok(Expr::Call {
            func,
            arg: Box::new(arg),
            at: At(at),
        })
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let here = self.pos();
        match self.bump() {
            Some((Tok::Num(text), _)) => {
                let value = parse_rational(&text)
                    .ok_or_else(|| DslError::new(here, ErrorKind::Syntax(format!("bad number `{text}`"))))?;
                Ok(Expr::Num { text, value })
            }
            Some((Tok::DtPow(k), _)) => self.call(Func::Dt(k), here),
            Some((Tok::Ident(name), _)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::lookup(&name)
                        .ok_or_else(|| DslError::new(here, ErrorKind::Syntax(format!("unknown function `{name}`"))))?;
                    self.call(func, here)
                } else {
                    Ok(Expr::Ident { name, at: At(here) })
                }
            }
            Some((Tok::LParen, _)) => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some((t, _)) => Err(DslError::new(
                here,
                ErrorKind::Syntax(format!("unexpected {}", t.describe())),
            )),
            None => Err(DslError::new(here, ErrorKind::Syntax("unexpected end of input".into()))),
        }
    }
}

/// Parse a complete expression starting at `start`.
pub fn parse_expr_at(text: &str, start: Pos) -> Result<Expr, DslError> {
    let toks = tokenize(text, start)?;
    let end = Pos {
        line: start.line,
        col: start.col + text.chars().count(),
    };
    let mut p = Parser { toks, idx: 0, end };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(p.error(format!("unexpected {} after expression", t.describe())));
    }
    Ok(e)
}

pub fn parse_expr(text: &str) -> Result<Expr, DslError> {
    parse_expr_at(text, Pos { line: 1, col: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(s: &str) -> String {
        parse_expr(s).unwrap().to_string()
    }

    #[test]
    fn canonical_forms_round_trip() {
        for s in [
            "X^2 + D2(X)*D1(X)",
            "-X1 - 2*lambda*D1(X1)*D2(X3)",
            "-X3 - lambda*(D1(X1)*D2(X1) - D1(X3)*D2(X3))",
            "-1/2*(Y3*D(Y5) - Y4*D(Y6) + D(Y3)*Y5 - D(Y4)*Y6)",
            "(x1 - xi1.xi2)/x2",
            "xi1*exp(-x2)",
            "a - (b - c)",
            "-(x^2)",
            "-x^2",
            "dt^2(X1)",
            "3 + 2*e1^e2 - e1^e3^e4",
        ] {
            assert_eq!(round(s), s);
        }
        assert_eq!(round("((a)) * (b)"), "a*b");
    }

    #[test]
    fn unary_binds_tighter_than_power() {
        let e = parse_expr("-x^2").unwrap();
        assert!(matches!(e, Expr::Pow { ref base, .. } if matches!(**base, Expr::Neg(_))));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr_at("x + * y", Pos { line: 4, col: 10 }).unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (4, 14));
        let err = parse_expr("foo(x)").unwrap_err();
        assert!(err.to_string().contains("unknown function"));
        assert!(parse_expr("(x").is_err());
    }
}
