use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ReductionError;
use crate::formula::{fresh_name, Formula};

const ORACLE_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Var(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(x: impl Into<String>) -> Self {
        BoolExpr::Var(x.into())
    }

    pub fn not(a: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(a))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Var(_) => 1,
            BoolExpr::Not(a) => 1 + a.size(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            BoolExpr::Var(_) => true,
            BoolExpr::Not(a) => matches!(**a, BoolExpr::Var(_)),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.is_nnf() && b.is_nnf(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            BoolExpr::Var(x) => {
                out.insert(x.clone());
            }
            BoolExpr::Not(a) => a.collect(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn eval(&self, env: &BTreeMap<String, bool>) -> bool {
        match self {
            BoolExpr::Var(x) => env[x],
            BoolExpr::Not(a) => !a.eval(env),
            BoolExpr::And(a, b) => a.eval(env) && b.eval(env),
            BoolExpr::Or(a, b) => a.eval(env) || b.eval(env),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Var(x) => write!(f, "{x}"),
            BoolExpr::Not(a) => write!(f, "!{a}"),
            BoolExpr::And(a, b) => write!(f, "({a} & {b})"),
            BoolExpr::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// Closed prenex QBF with an NNF matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfInstance {
    prefix: Vec<(Quantifier, String)>,
    matrix: BoolExpr,
}

impl QbfInstance {
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: BoolExpr) -> Result<Self, ReductionError> {
        if !matrix.is_nnf() {
            return Err(ReductionError::NotNnf);
        }
        let mut bound = BTreeSet::new();
        for (_, x) in &prefix {
            if !bound.insert(x.clone()) {
                return Err(ReductionError::Requantified(x.clone()));
            }
        }
        if let Some(x) = matrix.vars().into_iter().find(|x| !bound.contains(x)) {
            return Err(ReductionError::NotClosed(x));
        }
        Ok(QbfInstance { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &BoolExpr {
        &self.matrix
    }

    pub fn eval(&self) -> Result<bool, ReductionError> {
        if self.prefix.len() > ORACLE_LIMIT {
            return Err(ReductionError::TooLarge { size: self.prefix.len(), limit: ORACLE_LIMIT });
        }
        fn go(prefix: &[(Quantifier, String)], m: &BoolExpr, env: &mut BTreeMap<String, bool>) -> bool {
            let Some(((q, x), rest)) = prefix.split_first() else {
                return m.eval(env);
            };
            let mut branch = |v: bool| {
                env.insert(x.clone(), v);
                go(rest, m, env)
            };
            match q {
                Quantifier::Exists => branch(false) || branch(true),
                Quantifier::Forall => branch(false) && branch(true),
            }
        }
        Ok(go(&self.prefix, &self.matrix, &mut BTreeMap::new()))
    }
}

impl fmt::Display for QbfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, x) in &self.prefix {
            let kw = match q {
                Quantifier::Exists => "exists",
                Quantifier::Forall => "forall",
            };
            write!(f, "{kw} {x}. ")?;
        }
        write!(f, "{}", self.matrix)
    }
}

/// `f(phi) = down r. <> down s. <> h(phi)`. Variables keep their names;
/// `r` and `s` are renamed if the instance already uses them.
pub fn encode_qbf(q: &QbfInstance) -> Formula {
    let mut used: BTreeSet<String> = q.prefix.iter().map(|(_, x)| x.clone()).collect();
    let mut pick = |base: &str| if used.insert(base.to_string()) { base.to_string() } else { fresh_name(base, &mut used) };
    let r = pick("r");
    let s = pick("s");
    fn matrix(m: &BoolExpr, s: &str) -> Formula {
        match m {
            BoolExpr::Var(x) => Formula::at_var(s, Formula::var(x)),
            BoolExpr::Not(a) => match &**a {
                BoolExpr::Var(x) => Formula::at_var(s, Formula::dia(Formula::var(x))),
                _ => unreachable!("matrix is NNF"),
            },
            BoolExpr::And(a, b) => Formula::and(matrix(a, s), matrix(b, s)),
            BoolExpr::Or(a, b) => Formula::or(matrix(a, s), matrix(b, s)),
        }
    }
    let h = q.prefix.iter().rev().fold(matrix(&q.matrix, &s), |body, (quant, x)| {
        let bound = Formula::down(x.clone(), body);
        match quant {
            Quantifier::Exists => Formula::at_var(&r, Formula::dia(bound)),
            Quantifier::Forall => Formula::at_var(&r, Formula::boxed(bound)),
        }
    });
    Formula::down(r, Formula::dia(Formula::down(s, Formula::dia(h))))
}

/// Parses `forall x. exists y. ((x & y) | (!x & !y))`. `&` binds tighter
/// than `|`.
pub fn parse_qbf(text: &str) -> Result<QbfInstance, ReductionError> {
    let mut p = Parser { src: text, pos: 0 };
    let mut prefix = Vec::new();
    loop {
        p.skip_ws();
        let save = p.pos;
        let q = match p.word() {
            Some("exists") => Quantifier::Exists,
            Some("forall") => Quantifier::Forall,
            _ => {
                p.pos = save;
                break;
            }
        };
        p.skip_ws();
        let x = p.word().ok_or_else(|| p.err("a variable name"))?.to_string();
        p.expect('.')?;
        prefix.push((q, x));
    }
    let matrix = p.or()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    QbfInstance::new(prefix, matrix)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> ReductionError {
        ReductionError::Syntax { offset: self.pos, expected: expected.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ReductionError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("'{c}'")))
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        let rest = &self.src[self.pos..];
        let n = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if n == 0 {
            return None;
        }
        self.pos += n;
        Some(&rest[..n])
    }

    fn or(&mut self) -> Result<BoolExpr, ReductionError> {
        let mut left = self.and()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            left = BoolExpr::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<BoolExpr, ReductionError> {
        let mut left = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            left = BoolExpr::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<BoolExpr, ReductionError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(BoolExpr::not(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.or()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.word().map(BoolExpr::var).ok_or_else(|| self.err("a variable, '!' or '('")),
        }
    }
}
