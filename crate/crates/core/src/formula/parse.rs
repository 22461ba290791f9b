use thiserror::Error;

use super::{Formula, Target};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown sigil {sigil:?} at byte {offset}")]
    UnknownSigil { offset: usize, sigil: char },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownSigil { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    And,
    Or,
    Not,
    Dia,
    Box,
    Dot,
    At,
    Word(String),
    Nominal(String),
    SVar(String),
    Eof,
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let name_at = |start: usize| -> (String, usize) {
        let mut end = start;
        while end < bytes.len() && is_name_byte(bytes[end]) {
            end += 1;
        }
        (src[start..end].to_string(), end)
    };
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'&' => {
                i += 1;
                Tok::And
            }
            b'|' => {
                i += 1;
                Tok::Or
            }
            b'!' => {
                i += 1;
                Tok::Not
            }
            b'.' => {
                i += 1;
                Tok::Dot
            }
            b'@' => {
                i += 1;
                Tok::At
            }
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Dia
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                i += 2;
                Tok::Box
            }
            b'#' | b'$' => {
                let (name, end) = name_at(i + 1);
                if name.is_empty() {
                    return Err(ParseError::Syntax { offset: i + 1, expected: "a name".into() });
                }
                i = end;
                if b == b'#' {
                    Tok::Nominal(name)
                } else {
                    Tok::SVar(name)
                }
            }
            b if is_name_byte(b) => {
                let (name, end) = name_at(i);
                i = end;
                Tok::Word(name)
            }
            _ => {
                let c = src[i..].chars().next().unwrap_or('?');
                if bytes.get(i + c.len_utf8()).copied().is_some_and(is_name_byte) {
                    return Err(ParseError::UnknownSigil { offset: i, sigil: c });
                }
                return Err(ParseError::Syntax { offset: i, expected: "a formula token".into() });
            }
        };
        toks.push((tok, start));
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

fn is_prop_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos.min(self.toks.len() - 1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), expected: expected.into() })
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Tok::Dia => Ok(Formula::dia(self.unary()?)),
            Tok::Box => Ok(Formula::boxed(self.unary()?)),
            Tok::Not => Ok(Formula::neg(self.unary()?)),
            Tok::LParen => {
                let f = self.disj()?;
                if self.bump() != Tok::RParen {
                    self.pos -= 1;
                    return self.err("')'");
                }
                Ok(f)
            }
            Tok::Nominal(i) => Ok(Formula::Nominal(i)),
            Tok::SVar(x) => Ok(Formula::SVar(x)),
            Tok::At => {
                let target = match self.bump() {
                    Tok::Nominal(i) => Target::Nominal(i),
                    Tok::SVar(x) | Tok::Word(x) => Target::SVar(x),
                    _ => {
                        self.pos -= 1;
                        return self.err("a nominal or state variable after '@'");
                    }
                };
                Ok(Formula::At(target, Box::new(self.unary()?)))
            }
            Tok::Word(w) => match w.as_str() {
                "true" => Ok(Formula::Top),
                "false" => Ok(Formula::Bottom),
                "down" => {
                    let var = match self.bump() {
                        Tok::Word(x) => x,
                        Tok::SVar(x) => x,
                        _ => {
                            self.pos -= 1;
                            return self.err("a state variable after 'down'");
                        }
                    };
                    if self.bump() != Tok::Dot {
                        self.pos -= 1;
                        return self.err("'.'");
                    }
                    Ok(Formula::down(var, self.unary()?))
                }
                p if is_prop_name(p) => Ok(Formula::Prop(w)),
                _ => {
                    self.pos -= 1;
                    self.err("a proposition name ([a-z][a-z0-9_]*)")
                }
            },
            _ => {
                self.pos -= 1;
                self.err("a formula")
            }
        }
    }
}

/// Parses the concrete formula syntax.
///
/// ```text
/// formula := disj ; disj := conj ('|' conj)* ; conj := unary ('&' unary)*
/// unary   := 'true' | 'false' | atom | '<>' unary | '[]' unary | '!' unary
///          | 'down' NAME '.' unary | '@' ('#'NAME | '$'NAME | NAME) unary | '(' formula ')'
/// ```
///
/// A bare name after `@` denotes a state variable.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
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
    fn grammar_examples() {
        assert_eq!(
            parse("down x. <> $x").unwrap(),
            Formula::down("x", Formula::dia(Formula::var("x")))
        );
        assert_eq!(
            parse("(#i0 & <> #i1)").unwrap(),
            Formula::and(Formula::nom("i0"), Formula::dia(Formula::nom("i1")))
        );
        assert_eq!(
            parse("down x. @x @y $z").unwrap(),
            Formula::down("x", Formula::at_var("x", Formula::at_var("y", Formula::var("z"))))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("p | q & r | s").unwrap();
        let expected = Formula::or(
            Formula::or(Formula::prop("p"), Formula::and(Formula::prop("q"), Formula::prop("r"))),
            Formula::prop("s"),
        );
        assert_eq!(f, expected);
        assert_eq!(
            parse("<> p & q").unwrap(),
            Formula::and(Formula::dia(Formula::prop("p")), Formula::prop("q"))
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse("down x.<>$x").unwrap(), parse("  down   x .  <>  $x ").unwrap());
        assert_eq!(parse("@#i[]#i").unwrap(), parse("@#i [] #i").unwrap());
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse("(p & q"),
            Err(ParseError::Syntax { offset: 6, expected: "')'".into() })
        );
        assert_eq!(parse("p & %x"), Err(ParseError::UnknownSigil { offset: 4, sigil: '%' }));
        assert!(matches!(parse("down . p"), Err(ParseError::Syntax { offset: 5, .. })));
        assert!(matches!(parse("P"), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("p q"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("#"), Err(ParseError::Syntax { offset: 1, .. })));
    }
}
