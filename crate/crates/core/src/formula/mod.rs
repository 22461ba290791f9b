//! Hybrid-logic formulas: syntax tree, concrete syntax, and the static
//! analyses shared by every decision procedure.

mod parse;
mod print;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse, ParseError};
pub use tree::{classify_occurrence, NodeId, NodeKind, OccurrenceClass, Tree};

/// Target of a satisfaction operator `@t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Nominal(String),
    SVar(String),
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Nominal(n) | Target::SVar(n) => n,
        }
    }
}

/// A hybrid formula. Node identifiers are the preorder indices of the
/// tree; see [`Tree`] for the position-addressed view.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prop(String),
    Nominal(String),
    SVar(String),
    Top,
    Bottom,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    Box(Box<Formula>),
    Down(String, Box<Formula>),
    At(Target, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn nom(name: impl Into<String>) -> Self {
        Formula::Nominal(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Formula::SVar(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn dia(f: Formula) -> Self {
        Formula::Diamond(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    pub fn down(var: impl Into<String>, f: Formula) -> Self {
        Formula::Down(var.into(), Box::new(f))
    }

    pub fn at_var(var: impl Into<String>, f: Formula) -> Self {
        Formula::At(Target::SVar(var.into()), Box::new(f))
    }

    pub fn at_nom(nom: impl Into<String>, f: Formula) -> Self {
        Formula::At(Target::Nominal(nom.into()), Box::new(f))
    }

    /// Left-nested conjunction; `Top` for an empty list.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bottom` for an empty list.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().map(Formula::size).sum::<usize>()
    }

    /// Number of non-atomic nodes (operators and connectives).
    pub fn operator_count(&self) -> usize {
        let own = usize::from(!self.is_atomic());
        own + self.children().map(Formula::operator_count).sum::<usize>()
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Prop(_) | Formula::Nominal(_) | Formula::SVar(_) | Formula::Top | Formula::Bottom
        )
    }

    pub fn children(&self) -> impl Iterator<Item = &Formula> {
        let (a, b): (Option<&Formula>, Option<&Formula>) = match self {
            Formula::Prop(_)
            | Formula::Nominal(_)
            | Formula::SVar(_)
            | Formula::Top
            | Formula::Bottom => (None, None),
            Formula::Neg(f) | Formula::Diamond(f) | Formula::Box(f) => (Some(f), None),
            Formula::Down(_, f) | Formula::At(_, f) => (Some(f), None),
            Formula::And(l, r) | Formula::Or(l, r) => (Some(l), Some(r)),
        };
        a.into_iter().chain(b)
    }

    /// Applies `f` bottom-up to every node.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Formula) -> Formula) -> Formula {
        let rebuilt = match self {
            Formula::Neg(a) => Formula::neg(a.map_bottom_up(f)),
            Formula::And(a, b) => Formula::and(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::Or(a, b) => Formula::or(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::Diamond(a) => Formula::dia(a.map_bottom_up(f)),
            Formula::Box(a) => Formula::boxed(a.map_bottom_up(f)),
            Formula::Down(x, a) => Formula::down(x.clone(), a.map_bottom_up(f)),
            Formula::At(t, a) => Formula::At(t.clone(), Box::new(a.map_bottom_up(f))),
            atom => atom.clone(),
        };
        f(rebuilt)
    }

    /// Every state-variable name occurring anywhere (free, bound, binder or
    /// `@` subscript).
    pub fn svar_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| match g {
            Formula::SVar(x) | Formula::Down(x, _) | Formula::At(Target::SVar(x), _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Every nominal name, including `@` subscripts.
    pub fn nominal_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| match g {
            Formula::Nominal(i) | Formula::At(Target::Nominal(i), _) => {
                out.insert(i.clone());
            }
            _ => {}
        });
        out
    }

    pub fn prop_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Formula::Prop(p) = g {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Preorder visit.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// State variables with an occurrence (including `@` subscripts) that is
    /// not in the scope of a matching binder.
    pub fn free_svars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let is_free = |x: &String, bound: &Vec<String>| !bound.iter().any(|b| b == x);
            match f {
                Formula::SVar(x) => {
                    if is_free(x, bound) {
                        out.insert(x.clone());
                    }
                }
                Formula::At(t, body) => {
                    if let Target::SVar(x) = t {
                        if is_free(x, bound) {
                            out.insert(x.clone());
                        }
                    }
                    go(body, bound, out);
                }
                Formula::Down(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                other => {
                    for c in other.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Nesting depth of `<>`/`[]`; binders and `@` contribute nothing.
    pub fn modal_depth(&self) -> usize {
        let below = self.children().map(Formula::modal_depth).max().unwrap_or(0);
        match self {
            Formula::Diamond(_) | Formula::Box(_) => below + 1,
            _ => below,
        }
    }

    pub fn operators(&self) -> BTreeSet<Operator> {
        let mut ops = BTreeSet::new();
        self.visit(&mut |g| {
            let op = match g {
                Formula::Diamond(_) => Operator::Diamond,
                Formula::Box(_) => Operator::Box,
                Formula::Down(..) => Operator::Down,
                Formula::At(..) => Operator::At,
                _ => return,
            };
            ops.insert(op);
        });
        ops
    }

    pub fn is_monotone(&self) -> bool {
        let mut neg = false;
        self.visit(&mut |g| neg |= matches!(g, Formula::Neg(_)));
        !neg
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_formula(self, f)
    }
}

/// Canonical concrete syntax of `f`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// The four modal and hybrid operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "diamond")]
    Diamond,
    #[serde(rename = "box")]
    Box,
    #[serde(rename = "down")]
    Down,
    #[serde(rename = "at")]
    At,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::Diamond, Operator::Box, Operator::Down, Operator::At];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Diamond => "<>",
            Operator::Box => "[]",
            Operator::Down => "down",
            Operator::At => "@",
        }
    }
}

/// Which operators and atom kinds a formula uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentSignature {
    pub operators: BTreeSet<Operator>,
    pub monotone: bool,
    pub uses_props: bool,
    pub uses_nominals: bool,
    pub uses_svars: bool,
}

impl FragmentSignature {
    /// Membership of the analysed formula in HL(ops) (or MHL(ops) when
    /// `monotone_only`).
    pub fn within(&self, ops: &[Operator], monotone_only: bool) -> bool {
        self.operators.iter().all(|o| ops.contains(o)) && (self.monotone || !monotone_only)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub signature: FragmentSignature,
    pub modal_depth: usize,
    pub free_svars: BTreeSet<String>,
}

pub fn analyze(f: &Formula) -> Analysis {
    let mut uses_props = false;
    let mut uses_nominals = false;
    let mut uses_svars = false;
    f.visit(&mut |g| match g {
        Formula::Prop(_) => uses_props = true,
        Formula::Nominal(_) | Formula::At(Target::Nominal(_), _) => uses_nominals = true,
        Formula::SVar(_) | Formula::Down(..) | Formula::At(Target::SVar(_), _) => uses_svars = true,
        _ => {}
    });
    Analysis {
        signature: FragmentSignature {
            operators: f.operators(),
            monotone: f.is_monotone(),
            uses_props,
            uses_nominals,
            uses_svars,
        },
        modal_depth: f.modal_depth(),
        free_svars: f.free_svars(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula contains negation; only monotone formulas are accepted here")]
    NotMonotone,
    #[error("node {0} does not exist")]
    InvalidNode(usize),
    #[error("node {0} is not a nominal or state-variable occurrence")]
    NotAnAtom(usize),
}

/// Picks `base1`, `base2`, ... until a name outside `used` is found, and
/// reserves it.
pub(crate) fn fresh_name(base: &str, used: &mut BTreeSet<String>) -> String {
    let mut k = 1usize;
    loop {
        let candidate = format!("{base}{k}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        k += 1;
    }
}

/// Renames bound state variables so that no variable is bound twice and no
/// bound variable also occurs free. Free variables keep their names.
pub fn rename_apart(f: &Formula) -> Formula {
    fn go(
        f: &Formula,
        scope: &mut Vec<(String, String)>,
        seen_binders: &mut BTreeSet<String>,
        free: &BTreeSet<String>,
        used: &mut BTreeSet<String>,
    ) -> Formula {
        let lookup = |x: &str, scope: &Vec<(String, String)>| {
            scope
                .iter()
                .rev()
                .find(|(orig, _)| orig == x)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| x.to_string())
        };
        match f {
            Formula::SVar(x) => Formula::SVar(lookup(x, scope)),
            Formula::At(Target::SVar(x), body) => {
                let target = lookup(x, scope);
                Formula::at_var(target, go(body, scope, seen_binders, free, used))
            }
            Formula::Down(x, body) => {
                let new = if free.contains(x) || seen_binders.contains(x) {
                    fresh_name(x, used)
                } else {
                    x.clone()
                };
                seen_binders.insert(x.clone());
                seen_binders.insert(new.clone());
                scope.push((x.clone(), new.clone()));
                let body = go(body, scope, seen_binders, free, used);
                scope.pop();
                Formula::down(new, body)
            }
            Formula::Neg(a) => Formula::neg(go(a, scope, seen_binders, free, used)),
            Formula::Diamond(a) => Formula::dia(go(a, scope, seen_binders, free, used)),
            Formula::Box(a) => Formula::boxed(go(a, scope, seen_binders, free, used)),
            Formula::At(t, a) => Formula::At(t.clone(), Box::new(go(a, scope, seen_binders, free, used))),
            Formula::And(a, b) => {
                let a = go(a, scope, seen_binders, free, used);
                Formula::and(a, go(b, scope, seen_binders, free, used))
            }
            Formula::Or(a, b) => {
                let a = go(a, scope, seen_binders, free, used);
                Formula::or(a, go(b, scope, seen_binders, free, used))
            }
            atom => atom.clone(),
        }
    }
    let free = f.free_svars();
    let mut used = f.svar_names();
    go(f, &mut Vec::new(), &mut BTreeSet::new(), &free, &mut used)
}

/// Whether no variable is bound twice and no bound variable occurs free.
pub fn is_renamed_apart(f: &Formula) -> bool {
    let free = f.free_svars();
    let mut binders = BTreeSet::new();
    let mut ok = true;
    f.visit(&mut |g| {
        if let Formula::Down(x, _) = g {
            ok &= !free.contains(x) && binders.insert(x.clone());
        }
    });
    ok
}

/// Replaces propositions by `true`; with `binder_mode`, additionally turns
/// each nominal into a fresh free state variable (consistently per name).
pub fn normalize_monotone(f: &Formula, binder_mode: bool) -> Result<Formula, FormulaError> {
    normalize_with_map(f, binder_mode).map(|(g, _)| g)
}

/// As [`normalize_monotone`], also returning the nominal-to-variable renaming.
pub fn normalize_with_map(
    f: &Formula,
    binder_mode: bool,
) -> Result<(Formula, BTreeMap<String, String>), FormulaError> {
    if !f.is_monotone() {
        return Err(FormulaError::NotMonotone);
    }
    let mut renaming = BTreeMap::new();
    if binder_mode {
        let mut used = f.svar_names();
        for i in f.nominal_names() {
            let base = format!("v{i}");
            let name = if used.insert(base.clone()) { base } else { fresh_name(&base, &mut used) };
            renaming.insert(i, name);
        }
    }
    let out = f.map_bottom_up(&mut |g| match g {
        Formula::Prop(_) => Formula::Top,
        Formula::Nominal(i) if binder_mode => Formula::SVar(renaming[&i].clone()),
        Formula::At(Target::Nominal(i), body) if binder_mode => {
            Formula::At(Target::SVar(renaming[&i].clone()), body)
        }
        other => other,
    });
    Ok((out, renaming))
}

/// Substitutes `replacement` for every free occurrence of state variable `x`
/// (leaf occurrences only; `@x` subscripts are untouched).
pub fn substitute_free_var(f: &Formula, x: &str, replacement: &Formula) -> Formula {
    match f {
        Formula::SVar(y) if y == x => replacement.clone(),
        Formula::Down(y, _) if y == x => f.clone(),
        Formula::Down(y, body) => Formula::down(y.clone(), substitute_free_var(body, x, replacement)),
        Formula::Neg(a) => Formula::neg(substitute_free_var(a, x, replacement)),
        Formula::Diamond(a) => Formula::dia(substitute_free_var(a, x, replacement)),
        Formula::Box(a) => Formula::boxed(substitute_free_var(a, x, replacement)),
        Formula::At(t, a) => Formula::At(t.clone(), Box::new(substitute_free_var(a, x, replacement))),
        Formula::And(a, b) => Formula::and(
            substitute_free_var(a, x, replacement),
            substitute_free_var(b, x, replacement),
        ),
        Formula::Or(a, b) => Formula::or(
            substitute_free_var(a, x, replacement),
            substitute_free_var(b, x, replacement),
        ),
        other => other.clone(),
    }
}

/// Structural equality up to a bijective renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn go<'a>(a: &'a Formula, b: &'a Formula, env: &mut Vec<(&'a str, &'a str)>) -> bool {
        let same_var = |x: &str, y: &str, env: &Vec<(&str, &str)>| {
            for (l, r) in env.iter().rev() {
                if *l == x || *r == y {
                    return *l == x && *r == y;
                }
            }
            x == y
        };
        match (a, b) {
            (Formula::SVar(x), Formula::SVar(y)) => same_var(x, y, env),
            (Formula::At(Target::SVar(x), p), Formula::At(Target::SVar(y), q)) => {
                same_var(x, y, env) && go(p, q, env)
            }
            (Formula::Down(x, p), Formula::Down(y, q)) => {
                env.push((x, y));
                let r = go(p, q, env);
                env.pop();
                r
            }
            (Formula::Neg(p), Formula::Neg(q))
            | (Formula::Diamond(p), Formula::Diamond(q))
            | (Formula::Box(p), Formula::Box(q)) => go(p, q, env),
            (Formula::At(s, p), Formula::At(t, q)) => s == t && go(p, q, env),
            (Formula::And(p1, p2), Formula::And(q1, q2)) | (Formula::Or(p1, p2), Formula::Or(q1, q2)) => {
                go(p1, q1, env) && go(p2, q2, env)
            }
            _ => a == b,
        }
    }
    go(a, b, &mut Vec::new())
}
