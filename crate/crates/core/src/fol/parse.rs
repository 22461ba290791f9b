use super::{FolError, FolFormula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    And,
    Or,
    Not,
    Dot,
    Less,
    Eq,
    Name(String),
    Num(u64),
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, FolError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'!' => Some(Tok::Not),
            b'.' => Some(Tok::Dot),
            b'<' => Some(Tok::Less),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().map_err(|_| FolError::Syntax {
                offset: start,
                expected: "a numeral that fits in 64 bits".into(),
            })?;
            out.push((Tok::Num(n), start));
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(src[start..i].to_string()), start));
        } else {
            return Err(FolError::Syntax { offset: start, expected: "a formula token".into() });
        }
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, FolError> {
        Err(FolError::Syntax { offset: self.toks[self.pos].1, expected: expected.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FolError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn disj(&mut self) -> Result<FolFormula, FolError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = FolFormula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<FolFormula, FolError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = FolFormula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<Term, FolError> {
        match self.peek().clone() {
            Tok::Name(x) if !is_keyword(&x) => {
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Num(n))
            }
            _ => self.err("a variable or numeral"),
        }
    }

    fn unary(&mut self) -> Result<FolFormula, FolError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(FolFormula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.disj()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Name(w) if w == "exists" || w == "forall" => {
                self.bump();
                let x = match self.peek().clone() {
                    Tok::Name(x) if !is_keyword(&x) => x,
                    _ => return self.err("a variable after the quantifier"),
                };
                self.bump();
                self.expect(Tok::Dot, "'.'")?;
                let body = self.unary()?;
                Ok(if w == "exists" { FolFormula::exists(x, body) } else { FolFormula::forall(x, body) })
            }
            Tok::Name(w) if w == "true" => {
                self.bump();
                Ok(FolFormula::True)
            }
            Tok::Name(w) if w == "false" => {
                self.bump();
                Ok(FolFormula::False)
            }
            Tok::Name(p) if *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(FolFormula::Pred(p, t))
            }
            _ => {
                let a = self.term()?;
                let op = self.peek().clone();
                if !matches!(op, Tok::Less | Tok::Eq) {
                    return self.err("'<' or '='");
                }
                self.bump();
                let b = self.term()?;
                Ok(if op == Tok::Less { FolFormula::Less(a, b) } else { FolFormula::Eq(a, b) })
            }
        }
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "exists" | "forall" | "true" | "false")
}

/// Parses the first-order text syntax: `exists x.` / `forall x.` prefixes
/// binding a unary body, atoms `s < t`, `s = t`, `P(t)`, connectives `!`,
/// `&`, `|`, and parentheses. Terms are variables or numerals.
pub fn parse_fol(text: &str) -> Result<FolFormula, FolError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.disj()?;
    if *p.peek() != Tok::Eof {
        return p.err("end of input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for src in [
            "exists x. (0 < x & x < 2)",
            "forall x. exists y. (x < y)",
            "exists x. forall y. (P(x) | !(y < x) | x = 3)",
            "!(exists x. (x < 0))",
            "(true & false)",
        ] {
            let f = parse_fol(src).unwrap();
            assert_eq!(parse_fol(&f.to_string()).unwrap(), f, "{src}");
        }
    }

    #[test]
    fn structure() {
        assert_eq!(
            parse_fol("exists x. x < 0").unwrap(),
            FolFormula::exists("x", FolFormula::Less(Term::var("x"), Term::Num(0)))
        );
        assert_eq!(
            parse_fol("P(x) & x = y").unwrap(),
            FolFormula::and(
                FolFormula::Pred("P".into(), Term::var("x")),
                FolFormula::Eq(Term::var("x"), Term::var("y"))
            )
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_fol("x <"), Err(FolError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_fol("exists . x"), Err(FolError::Syntax { offset: 7, .. })));
        assert!(matches!(parse_fol("x ? y"), Err(FolError::Syntax { offset: 2, .. })));
    }
}
