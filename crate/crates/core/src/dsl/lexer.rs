use super::{DslError, ErrorKind, Pos};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(String),
    Ident(String),
    /// `dt^k` immediately followed by `(`.
    DtPow(u32),
    Plus,
    Minus,
    Star,
    Slash,
    Dot,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(s) | Tok::Ident(s) => format!("`{s}`"),
            Tok::DtPow(k) => format!("`dt^{k}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

/// Tokenize one expression; `start` is the position of its first character.
pub fn tokenize(text: &str, start: Pos) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let pos = |i: usize| Pos {
        line: start.line,
        col: start.col + i,
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let here = pos(i);
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((Tok::Num(chars[begin..i].iter().collect()), here));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[begin..i].iter().collect();
            if word == "dt" && chars.get(i) == Some(&'^') {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > i + 1 && chars.get(j) == Some(&'(') {
                    let k: u32 = chars[i + 1..j]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| DslError::new(here, ErrorKind::Syntax("derivative order too large".into())))?;
                    out.push((Tok::DtPow(k), here));
                    i = j;
                    continue;
                }
            }
            out.push((Tok::Ident(word), here));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '.' => Tok::Dot,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => {
                return Err(DslError::new(
                    here,
                    ErrorKind::Syntax(format!("unexpected character `{other}`")),
                ))
            }
        };
        out.push((tok, here));
        i += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, Pos { line: 1, col: 1 })
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect()
    }

    #[test]
    fn derivative_power_and_dot() {
        assert_eq!(
            toks("dt^2(X1) - xi1.xi2"),
            [
                Tok::DtPow(2),
                Tok::LParen,
                Tok::Ident("X1".into()),
                Tok::RParen,
                Tok::Minus,
                Tok::Ident("xi1".into()),
                Tok::Dot,
                Tok::Ident("xi2".into())
            ]
        );
        assert_eq!(
            toks("dt^2"),
            [Tok::Ident("dt".into()), Tok::Caret, Tok::Num("2".into())]
        );
        assert_eq!(
            toks("0.001*x"),
            [Tok::Num("0.001".into()), Tok::Star, Tok::Ident("x".into())]
        );
    }

    #[test]
    fn reports_column() {
        let err = tokenize("x + $", Pos { line: 3, col: 5 }).unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (3, 9));
    }
}
