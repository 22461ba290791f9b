//! First-order logic over `(N, <)` with numerals: the standard translation
//! of hybrid formulas, quantifier elimination, and a bounded evaluator.

mod parse;
mod qe;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use parse::parse_fol;
pub use qe::{qe_decide, qe_decide_with_limit, DiffConstraint, DifferenceSystem, DEFAULT_CLAUSE_LIMIT};
pub use translate::{close_sentence, decide_at, decide_at_with_limit, translate_h};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("formula contains negation; the translation needs a monotone formula")]
    NotMonotone,
    #[error("variable {0:?} is free; a sentence is required")]
    NotClosed(String),
    #[error("no value assigned to {0:?}")]
    MissingAssignment(String),
    #[error("quantifier elimination exceeded the limit of {limit} clauses")]
    ResourceLimit { limit: usize },
    #[error("predicate {0:?} is outside the signature {{<}}")]
    PredicateUnsupported(String),
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Num(u64),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Num(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FolFormula {
    Less(Term, Term),
    Eq(Term, Term),
    True,
    False,
    /// Unary predicate; only accepted as reduction input.
    Pred(String, Term),
    Not(Box<FolFormula>),
    And(Box<FolFormula>, Box<FolFormula>),
    Or(Box<FolFormula>, Box<FolFormula>),
    Exists(String, Box<FolFormula>),
    Forall(String, Box<FolFormula>),
}

impl FolFormula {
    pub fn less(a: Term, b: Term) -> Self {
        FolFormula::Less(a, b)
    }

    pub fn eq(a: Term, b: Term) -> Self {
        FolFormula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: FolFormula) -> Self {
        FolFormula::Not(Box::new(a))
    }

    pub fn and(a: FolFormula, b: FolFormula) -> Self {
        FolFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FolFormula, b: FolFormula) -> Self {
        FolFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, body: FolFormula) -> Self {
        FolFormula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<String>, body: FolFormula) -> Self {
        FolFormula::Forall(x.into(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn term(t: &Term, bound: &[String], out: &mut BTreeSet<String>) {
            if let Term::Var(x) = t {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
        }
        fn go(f: &FolFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                FolFormula::Less(a, b) | FolFormula::Eq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                FolFormula::Pred(_, a) => term(a, bound, out),
                FolFormula::True | FolFormula::False => {}
                FolFormula::Not(a) => go(a, bound, out),
                FolFormula::And(a, b) | FolFormula::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                FolFormula::Exists(x, a) | FolFormula::Forall(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            FolFormula::Not(a) => a.quantifier_count(),
            FolFormula::And(a, b) | FolFormula::Or(a, b) => a.quantifier_count() + b.quantifier_count(),
            FolFormula::Exists(_, a) | FolFormula::Forall(_, a) => 1 + a.quantifier_count(),
            _ => 0,
        }
    }

    pub fn max_numeral(&self) -> u64 {
        let num = |t: &Term| if let Term::Num(n) = t { *n } else { 0 };
        match self {
            FolFormula::Less(a, b) | FolFormula::Eq(a, b) => num(a).max(num(b)),
            FolFormula::Pred(_, a) => num(a),
            FolFormula::True | FolFormula::False => 0,
            FolFormula::Not(a) | FolFormula::Exists(_, a) | FolFormula::Forall(_, a) => a.max_numeral(),
            FolFormula::And(a, b) | FolFormula::Or(a, b) => a.max_numeral().max(b.max_numeral()),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            FolFormula::Less(..) | FolFormula::Eq(..) | FolFormula::Pred(..) => 1,
            FolFormula::True | FolFormula::False => 0,
            FolFormula::Not(a) | FolFormula::Exists(_, a) | FolFormula::Forall(_, a) => a.atom_count(),
            FolFormula::And(a, b) | FolFormula::Or(a, b) => a.atom_count() + b.atom_count(),
        }
    }

    /// Replaces free occurrences of `x` by `t`. `t` must not contain a
    /// variable bound inside `self`.
    pub fn substitute(&self, x: &str, t: &Term) -> FolFormula {
        let st = |s: &Term| match s {
            Term::Var(y) if y == x => t.clone(),
            other => other.clone(),
        };
        match self {
            FolFormula::Less(a, b) => FolFormula::Less(st(a), st(b)),
            FolFormula::Eq(a, b) => FolFormula::Eq(st(a), st(b)),
            FolFormula::Pred(p, a) => FolFormula::Pred(p.clone(), st(a)),
            FolFormula::True => FolFormula::True,
            FolFormula::False => FolFormula::False,
            FolFormula::Not(a) => FolFormula::not(a.substitute(x, t)),
            FolFormula::And(a, b) => FolFormula::and(a.substitute(x, t), b.substitute(x, t)),
            FolFormula::Or(a, b) => FolFormula::or(a.substitute(x, t), b.substitute(x, t)),
            FolFormula::Exists(y, _) | FolFormula::Forall(y, _) if y == x => self.clone(),
            FolFormula::Exists(y, a) => FolFormula::exists(y.clone(), a.substitute(x, t)),
            FolFormula::Forall(y, a) => FolFormula::forall(y.clone(), a.substitute(x, t)),
        }
    }
}

impl fmt::Display for FolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolFormula::Less(a, b) => write!(f, "{a} < {b}"),
            FolFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            FolFormula::True => f.write_str("true"),
            FolFormula::False => f.write_str("false"),
            FolFormula::Pred(p, a) => write!(f, "{p}({a})"),
            FolFormula::Not(a) => match **a {
                FolFormula::Less(..) | FolFormula::Eq(..) => write!(f, "!({a})"),
                _ => write!(f, "!{a}"),
            },
            FolFormula::And(a, b) => write!(f, "({a} & {b})"),
            FolFormula::Or(a, b) => write!(f, "({a} | {b})"),
            FolFormula::Exists(x, a) => write!(f, "exists {x}. {}", Paren(a)),
            FolFormula::Forall(x, a) => write!(f, "forall {x}. {}", Paren(a)),
        }
    }
}

/// Comparison atoms need parentheses when they form a quantifier body.
struct Paren<'a>(&'a FolFormula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FolFormula::Less(..) | FolFormula::Eq(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

/// Bound used by the bounded evaluator: largest numeral, plus the number of
/// quantifiers, plus two.
pub fn bounded_oracle_bound(s: &FolFormula) -> u64 {
    s.max_numeral() + s.quantifier_count() as u64 + 2
}

/// Evaluates a sentence with every quantifier ranging over `0..=bound`.
pub fn eval_bounded(s: &FolFormula, bound: u64) -> Result<bool, FolError> {
    fn term(t: &Term, env: &BTreeMap<String, u64>) -> Result<u64, FolError> {
        match t {
            Term::Num(n) => Ok(*n),
            Term::Var(x) => env.get(x).copied().ok_or_else(|| FolError::NotClosed(x.clone())),
        }
    }
    fn go(f: &FolFormula, b: u64, env: &mut BTreeMap<String, u64>) -> Result<bool, FolError> {
        Ok(match f {
            FolFormula::Less(x, y) => term(x, env)? < term(y, env)?,
            FolFormula::Eq(x, y) => term(x, env)? == term(y, env)?,
            FolFormula::True => true,
            FolFormula::False => false,
            FolFormula::Pred(p, _) => return Err(FolError::PredicateUnsupported(p.clone())),
            FolFormula::Not(a) => !go(a, b, env)?,
            FolFormula::And(x, y) => go(x, b, env)? && go(y, b, env)?,
            FolFormula::Or(x, y) => go(x, b, env)? || go(y, b, env)?,
            FolFormula::Exists(v, a) | FolFormula::Forall(v, a) => {
                let want = matches!(f, FolFormula::Exists(..));
                let saved = env.get(v).copied();
                let mut result = !want;
                for n in 0..=b {
                    env.insert(v.clone(), n);
                    if go(a, b, env)? == want {
                        result = want;
                        break;
                    }
                }
                match saved {
                    Some(old) => env.insert(v.clone(), old),
                    None => env.remove(v),
                };
                result
            }
        })
    }
    go(s, bound, &mut BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FolFormula {
        parse_fol(s).unwrap()
    }

    #[test]
    fn bounded_examples() {
        assert!(!eval_bounded(&p("forall x. exists y. x < y"), 3).unwrap());
        assert!(eval_bounded(&p("exists x. (0 < x & x < 2)"), 5).unwrap());
        for b in 0..4 {
            assert!(!eval_bounded(&FolFormula::False, b).unwrap());
        }
    }

    #[test]
    fn bound_constant() {
        assert_eq!(bounded_oracle_bound(&p("forall x. exists y. (x < y | y = 5)")), 9);
    }

    #[test]
    fn free_variables_and_substitution() {
        let f = p("exists x. (x < y & forall y. y = z)");
        assert_eq!(f.free_vars(), ["y", "z"].into_iter().map(String::from).collect());
        let g = f.substitute("y", &Term::Num(3));
        assert_eq!(g, p("exists x. (x < 3 & forall y. y = z)"));
    }
}
