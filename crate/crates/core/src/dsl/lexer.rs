use super::{DslError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase identifier: constants, keywords, rule ids.
    Name(String),
    /// Uppercase identifier.
    Var(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Minus,
    Neq,
    Eq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(s) => format!("'{s}'"),
            Tok::Var(s) => format!("variable '{s}'"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Colon => "':'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Neq => "'!='".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>,
                    line: &mut usize,
                    col: &mut usize| {
            let c = chars.next();
            if c == Some('\n') {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    bump(&mut chars, &mut line, &mut col);
                } else {
                    break;
                }
            }
            let tok = if s.starts_with(|c: char| c.is_ascii_uppercase()) {
                Tok::Var(s)
            } else {
                Tok::Name(s)
            };
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    bump(&mut chars, &mut line, &mut col);
                } else {
                    break;
                }
            }
            let n = s
                .parse::<u64>()
                .map_err(|_| DslError::syntax(pos, format!("integer '{s}' is too large")))?;
            out.push((Tok::Int(n), pos));
            continue;
        }

        bump(&mut chars, &mut line, &mut col);
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '-' => Tok::Minus,
            '=' => Tok::Eq,
            '!' if chars.peek() == Some(&'=') => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Neq
            }
            other => {
                return Err(DslError::syntax(
                    pos,
                    format!("unexpected character '{other}'"),
                ));
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("sort loc\n  { a }.").unwrap();
        assert_eq!(toks[0].1, Pos { line: 1, col: 1 });
        assert_eq!(toks[1].1, Pos { line: 1, col: 6 });
        assert_eq!(toks[2], (Tok::LBrace, Pos { line: 2, col: 3 }));
    }

    #[test]
    fn comments_and_neq() {
        let toks = tokenize("X != Y % trailing\n.").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.0).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Var("X".into()),
                Tok::Neq,
                Tok::Var("Y".into()),
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn stray_bang_is_error() {
        let err = tokenize("a ! b").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 3 });
    }
}
