//! Encoders from QBF, 3SAT, ORD and FOL(<,P) into hybrid logic, the
//! binder-removing rewrites used by the small-model search, and brute-force
//! oracles for the source problems.

mod cnf;
mod folp;
mod ord;
mod qbf;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{fresh_name, rename_apart, Formula, Target};

pub use cnf::{encode_3sat, parse_dimacs, CnfInstance};
pub use folp::{encode_folp, folp_input_size, macro_library_size, Macros};
pub use ord::{encode_ord, OrdInstance};
pub use qbf::{encode_qbf, parse_qbf, BoolExpr, QbfInstance, Quantifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("matrix is not in negation normal form")]
    NotNnf,
    #[error("formula is not in prenex form")]
    NotPrenex,
    #[error("variable {0:?} is not quantified")]
    NotClosed(String),
    #[error("variable {0:?} is quantified more than once")]
    Requantified(String),
    #[error("clause {index} has {arity} literals; exactly 3 are required")]
    ClauseArity { index: usize, arity: usize },
    #[error("literal {literal} refers to a variable outside 1..={vars}")]
    LiteralOutOfRange { literal: i64, vars: usize },
    #[error("malformed DIMACS input: {0}")]
    Dimacs(String),
    #[error("not a directed line graph: {0}")]
    NotLineGraph(String),
    #[error("vertex name {0:?} is not a valid variable name")]
    BadName(String),
    #[error("numeral {0} is not allowed in FOL(<,P) input")]
    Numeral(u64),
    #[error("predicate {0:?} is not supported; only P is")]
    Predicate(String),
    #[error("formula uses {0}, which this rewrite does not accept")]
    Operator(&'static str),
    #[error("instance has {size} variables; the oracle accepts at most {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// Any instance accepted by [`oracle_eval`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Qbf(QbfInstance),
    Cnf(CnfInstance),
    Ord(OrdInstance),
}

/// Truth of the source instance by exhaustive evaluation.
pub fn oracle_eval(instance: &Instance) -> Result<bool, ReductionError> {
    match instance {
        Instance::Qbf(q) => q.eval(),
        Instance::Cnf(c) => c.brute_force(),
        Instance::Ord(o) => o.holds(),
    }
}

/// Rewrites `down x. psi` to `(#ix & psi[x := #ix])` with a fresh nominal
/// per binder, and free state variables to fresh nominals. Only for
/// formulas without `[]`, where every binder fires at most once.
pub fn skolemize(f: &Formula) -> Result<Formula, ReductionError> {
    if f.operators().contains(&crate::formula::Operator::Box) {
        return Err(ReductionError::Operator("[]"));
    }
    let g = rename_apart(f);
    let mut used: BTreeSet<String> = g.nominal_names();
    used.extend(g.svar_names());
    let name = |x: &str, used: &mut BTreeSet<String>| {
        let base = format!("i{x}");
        if used.insert(base.clone()) {
            base
        } else {
            fresh_name(&base, used)
        }
    };
    let mut env: Vec<(String, String)> = g.free_svars().into_iter().map(|x| (x.clone(), name(&x, &mut used))).collect();
    fn go(f: &Formula, env: &mut Vec<(String, String)>, name: &mut dyn FnMut(&str) -> String) -> Formula {
        let lookup = |x: &str, env: &Vec<(String, String)>| {
            env.iter().rev().find(|(v, _)| v == x).map(|(_, i)| i.clone()).expect("renamed apart, all variables mapped")
        };
        match f {
            Formula::SVar(x) => Formula::Nominal(lookup(x, env)),
            Formula::At(Target::SVar(x), a) => {
                let i = lookup(x, env);
                Formula::at_nom(i, go(a, env, name))
            }
            Formula::Down(x, a) => {
                let i = name(x);
                env.push((x.clone(), i.clone()));
                let body = go(a, env, name);
                env.pop();
                Formula::and(Formula::Nominal(i), body)
            }
            Formula::Neg(a) => Formula::neg(go(a, env, name)),
            Formula::Diamond(a) => Formula::dia(go(a, env, name)),
            Formula::Box(a) => Formula::boxed(go(a, env, name)),
            Formula::At(t, a) => Formula::At(t.clone(), Box::new(go(a, env, name))),
            Formula::And(a, b) => {
                let a = go(a, env, name);
                Formula::and(a, go(b, env, name))
            }
            Formula::Or(a, b) => {
                let a = go(a, env, name);
                Formula::or(a, go(b, env, name))
            }
            atom => atom.clone(),
        }
    }
    Ok(go(&g, &mut env, &mut |x| name(x, &mut used)))
}

/// Removes `down` from `@`-free formulas. A bound occurrence becomes `true`
/// when no `<>`/`[]` separates it from its binder and `false` otherwise;
/// over irreflexive orders a modal step never returns to the bound state.
/// Free state variables are left in place.
pub fn eliminate_down_no_at(f: &Formula) -> Result<Formula, ReductionError> {
    if f.operators().contains(&crate::formula::Operator::At) {
        return Err(ReductionError::Operator("@"));
    }
    fn go(f: &Formula, env: &mut Vec<(String, usize)>, depth: usize) -> Formula {
        match f {
            Formula::SVar(x) => match env.iter().rev().find(|(v, _)| v == x) {
                Some(&(_, d)) if d == depth => Formula::Top,
                Some(_) => Formula::Bottom,
                None => f.clone(),
            },
            Formula::Down(x, a) => {
                env.push((x.clone(), depth));
                let body = go(a, env, depth);
                env.pop();
                body
            }
            Formula::Diamond(a) => Formula::dia(go(a, env, depth + 1)),
            Formula::Box(a) => Formula::boxed(go(a, env, depth + 1)),
            Formula::Neg(a) => Formula::neg(go(a, env, depth)),
            Formula::And(a, b) => Formula::and(go(a, env, depth), go(b, env, depth)),
            Formula::Or(a, b) => Formula::or(go(a, env, depth), go(b, env, depth)),
            other => other.clone(),
        }
    }
    Ok(go(f, &mut Vec::new(), 0))
}
