use std::collections::BTreeSet;

use super::ReductionError;
use crate::fol::{FolFormula, Term};
use crate::formula::{fresh_name, Formula};

/// Macro expander. Every expansion binds fresh variables, so nested uses
/// never capture each other.
#[derive(Clone, Debug)]
pub struct Macros {
    anchor: String,
    used: BTreeSet<String>,
}

fn at(x: &str, f: Formula) -> Formula {
    Formula::at_var(x, f)
}

fn v(x: &str) -> Formula {
    Formula::var(x)
}

impl Macros {
    /// `anchor` names the left bound `a`; `reserved` lists names the
    /// expansions must avoid.
    pub fn new(anchor: &str, reserved: impl IntoIterator<Item = String>) -> Self {
        let mut used: BTreeSet<String> = reserved.into_iter().collect();
        used.insert(anchor.to_string());
        Macros { anchor: anchor.to_string(), used }
    }

    fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            base.to_string()
        } else {
            fresh_name(base, &mut self.used)
        }
    }

    /// `@x [] down z. (@y z | @y <> z)`
    pub fn dir_suc(&mut self, x: &str, y: &str) -> Formula {
        let z = self.fresh("z");
        let body = Formula::or(at(y, v(&z)), at(y, Formula::dia(v(&z))));
        at(x, Formula::boxed(Formula::down(z, body)))
    }

    /// `@a [] down r. (@x <> r | @x r | @r <> <> x)`
    pub fn no_dir_pred(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let body = Formula::disj([
            at(x, Formula::dia(v(&r))),
            at(x, v(&r)),
            at(&r, Formula::dia(Formula::dia(v(x)))),
        ]);
        at(&self.anchor.clone(), Formula::boxed(Formula::down(r, body)))
    }

    /// `@a <> down r. dirSuc(r, x)`
    pub fn dir_pred(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let body = self.dir_suc(&r, x);
        at(&self.anchor.clone(), Formula::dia(Formula::down(r, body)))
    }

    /// `@x [] down r. (@y <> r | noDirPred(r))`
    pub fn dense(&mut self, x: &str, y: &str) -> Formula {
        let r = self.fresh("r");
        let body = Formula::or(at(y, Formula::dia(v(&r))), self.no_dir_pred(&r));
        at(x, Formula::boxed(Formula::down(r, body)))
    }

    /// `@x <> down r. dense(x, r)`
    pub fn sep(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let body = self.dense(x, &r);
        at(x, Formula::dia(Formula::down(r, body)))
    }

    /// `@x <> down r. (dirSuc(x, r) & sep(r)) & noDirPred(x)`
    pub fn neg(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let body = Formula::and(self.dir_suc(x, &r), self.sep(&r));
        let first = at(x, Formula::dia(Formula::down(r, body)));
        Formula::and(first, self.no_dir_pred(x))
    }

    /// `@x <> down r. (dirSuc(x, r) & <> down s. (dirSuc(r, s) & sep(s))) & noDirPred(x)`
    pub fn pos(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let s = self.fresh("s");
        let inner = Formula::and(self.dir_suc(&r, &s), self.sep(&s));
        let body = Formula::and(self.dir_suc(x, &r), Formula::dia(Formula::down(s, inner)));
        let first = at(x, Formula::dia(Formula::down(r, body)));
        Formula::and(first, self.no_dir_pred(x))
    }

    /// `@x <> down r. (dense(x, r) & (neg(r) | pos(r)))`
    pub fn sep_m(&mut self, x: &str) -> Formula {
        let r = self.fresh("r");
        let marker = Formula::or(self.neg(&r), self.pos(&r));
        let body = Formula::and(self.dense(x, &r), marker);
        at(x, Formula::dia(Formula::down(r, body)))
    }

    /// `a` lies in a separator that ends with a marker.
    pub fn psi1(&mut self) -> Formula {
        let a = self.anchor.clone();
        self.sep_m(&a)
    }

    /// Every marker has a direct successor marker. The final disjunct is
    /// read as `@a <> down s. (dirSuc(s, r) & pos(s)) & <> down t. (dirSuc(r, t) & sepM(t))`.
    pub fn psi2(&mut self) -> Formula {
        let a = self.anchor.clone();
        let r = self.fresh("r");

        let d1 = self.sep_m(&r);

        let s = self.fresh("s");
        let step = Formula::and(self.dir_suc(&r, &s), self.sep_m(&s));
        let d2 = Formula::and(self.neg(&r), Formula::dia(Formula::down(s, step)));

        let s = self.fresh("s");
        let t = self.fresh("t");
        let step2 = Formula::and(self.dir_suc(&s, &t), self.sep_m(&t));
        let step1 = Formula::and(self.dir_suc(&r, &s), Formula::dia(Formula::down(t, step2)));
        let d3 = Formula::and(self.pos(&r), Formula::dia(Formula::down(s, step1)));

        let s = self.fresh("s");
        let t = self.fresh("t");
        let pred = Formula::and(self.dir_suc(&s, &r), self.pos(&s));
        let pred = at(&a, Formula::dia(Formula::down(s, pred)));
        let next = Formula::and(self.dir_suc(&r, &t), self.sep_m(&t));
        let d4 = Formula::and(pred, Formula::dia(Formula::down(t, next)));

        at(&a, Formula::boxed(Formula::down(r, Formula::disj([d1, d2, d3, d4]))))
    }
}

/// Total size of one expansion of each macro.
pub fn macro_library_size() -> usize {
    let mut m = Macros::new("a", ["x".to_string(), "y".to_string()]);
    [
        m.dir_suc("x", "y"),
        m.no_dir_pred("x"),
        m.dir_pred("x"),
        m.dense("x", "y"),
        m.sep("x"),
        m.neg("x"),
        m.pos("x"),
        m.sep_m("x"),
    ]
    .iter()
    .map(Formula::size)
    .sum()
}

fn folp_size(f: &FolFormula) -> usize {
    match f {
        FolFormula::Not(a) | FolFormula::Exists(_, a) | FolFormula::Forall(_, a) => 1 + folp_size(a),
        FolFormula::And(a, b) | FolFormula::Or(a, b) => 1 + folp_size(a) + folp_size(b),
        _ => 1,
    }
}

/// Node count of a FOL(<,P) formula, the measure used by the size bound.
pub fn folp_input_size(f: &FolFormula) -> usize {
    folp_size(f)
}

fn var_of(t: &Term) -> Result<&str, ReductionError> {
    match t {
        Term::Var(x) => Ok(x),
        Term::Num(n) => Err(ReductionError::Numeral(*n)),
    }
}

/// `g(phi) = psi1 & psi2 & f(phi)` over the free state variable `a`.
pub fn encode_folp(phi: &FolFormula) -> Result<Formula, ReductionError> {
    if let Some(x) = phi.free_vars().into_iter().next() {
        return Err(ReductionError::NotClosed(x));
    }
    let mut prefix = Vec::new();
    let mut matrix = phi;
    loop {
        match matrix {
            FolFormula::Exists(x, _) => prefix.push((true, x.as_str())),
            FolFormula::Forall(x, _) => prefix.push((false, x.as_str())),
            _ => break,
        }
        matrix = match matrix {
            FolFormula::Exists(_, b) | FolFormula::Forall(_, b) => b,
            _ => unreachable!(),
        };
    }
    let mut names = BTreeSet::new();
    collect_names(matrix, &mut names)?;
    names.extend(prefix.iter().map(|(_, x)| x.to_string()));
    let mut m = Macros::new("a", names.iter().cloned());
    // The input may itself use `a`; it then gets a fresh name.
    let renamed_a = names.contains("a").then(|| m.fresh("a"));
    let name = |x: &str| -> String {
        match &renamed_a {
            Some(r) if x == "a" => r.clone(),
            _ => x.to_string(),
        }
    };

    let mut body = translate_matrix(matrix, &mut m, &name)?;
    for (exists, x) in prefix.into_iter().rev() {
        let x = name(x);
        body = if exists {
            let marker = Formula::or(m.neg(&x), m.pos(&x));
            at("a", Formula::dia(Formula::down(x, Formula::and(marker, body))))
        } else {
            let skip = Formula::disj([m.sep(&x), m.dir_pred(&x), body]);
            at("a", Formula::boxed(Formula::down(x, skip)))
        };
    }
    let psi1 = m.psi1();
    let psi2 = m.psi2();
    Ok(Formula::conj([psi1, psi2, body]))
}

fn collect_names(f: &FolFormula, out: &mut BTreeSet<String>) -> Result<(), ReductionError> {
    match f {
        FolFormula::Exists(..) | FolFormula::Forall(..) => Err(ReductionError::NotPrenex),
        FolFormula::Less(s, t) | FolFormula::Eq(s, t) => {
            out.insert(var_of(s)?.to_string());
            out.insert(var_of(t)?.to_string());
            Ok(())
        }
        FolFormula::Pred(_, t) => {
            out.insert(var_of(t)?.to_string());
            Ok(())
        }
        FolFormula::True | FolFormula::False => Ok(()),
        FolFormula::Not(a) => match **a {
            FolFormula::Less(..) | FolFormula::Eq(..) | FolFormula::Pred(..) => collect_names(a, out),
            FolFormula::Exists(..) | FolFormula::Forall(..) => Err(ReductionError::NotPrenex),
            _ => Err(ReductionError::NotNnf),
        },
        FolFormula::And(a, b) | FolFormula::Or(a, b) => {
            collect_names(a, out)?;
            collect_names(b, out)
        }
    }
}

fn translate_matrix(f: &FolFormula, m: &mut Macros, name: &dyn Fn(&str) -> String) -> Result<Formula, ReductionError> {
    let pred = |p: &str| -> Result<(), ReductionError> {
        if p == "P" {
            Ok(())
        } else {
            Err(ReductionError::Predicate(p.to_string()))
        }
    };
    Ok(match f {
        FolFormula::True => Formula::Top,
        FolFormula::False => Formula::Bottom,
        FolFormula::Pred(p, t) => {
            pred(p)?;
            m.pos(&name(var_of(t)?))
        }
        FolFormula::Less(s, t) => at(&name(var_of(s)?), Formula::dia(v(&name(var_of(t)?)))),
        FolFormula::Eq(s, t) => at(&name(var_of(s)?), v(&name(var_of(t)?))),
        FolFormula::Not(a) => match &**a {
            FolFormula::Pred(p, t) => {
                pred(p)?;
                m.neg(&name(var_of(t)?))
            }
            FolFormula::Less(s, t) => {
                let (x, y) = (name(var_of(s)?), name(var_of(t)?));
                Formula::or(at(&x, v(&y)), at(&y, Formula::dia(v(&x))))
            }
            FolFormula::Eq(s, t) => {
                let (x, y) = (name(var_of(s)?), name(var_of(t)?));
                Formula::or(at(&x, Formula::dia(v(&y))), at(&y, Formula::dia(v(&x))))
            }
            _ => return Err(ReductionError::NotNnf),
        },
        FolFormula::And(a, b) => Formula::and(translate_matrix(a, m, name)?, translate_matrix(b, m, name)?),
        FolFormula::Or(a, b) => Formula::or(translate_matrix(a, m, name)?, translate_matrix(b, m, name)?),
        FolFormula::Exists(..) | FolFormula::Forall(..) => return Err(ReductionError::NotPrenex),
    })
}
