use std::collections::BTreeSet;

use super::{qe::qe_decide_with_limit, FolError, FolFormula, Term, DEFAULT_CLAUSE_LIMIT};
use crate::deciders::PartialAssignment;
use crate::formula::{fresh_name, rename_apart, Formula, Target};

struct Translator {
    used: BTreeSet<String>,
}

impl Translator {
    fn fresh(&mut self) -> String {
        if self.used.insert("t".to_string()) {
            "t".to_string()
        } else {
            fresh_name("t", &mut self.used)
        }
    }

    fn h(&mut self, f: &Formula, z: &Term) -> Result<FolFormula, FolError> {
        Ok(match f {
            Formula::Prop(_) | Formula::Top => FolFormula::True,
            Formula::Bottom => FolFormula::False,
            Formula::Nominal(v) | Formula::SVar(v) => FolFormula::Eq(Term::var(v), z.clone()),
            Formula::Neg(_) => return Err(FolError::NotMonotone),
            Formula::And(a, b) => FolFormula::and(self.h(a, z)?, self.h(b, z)?),
            Formula::Or(a, b) => FolFormula::or(self.h(a, z)?, self.h(b, z)?),
            Formula::Diamond(a) => {
                let t = self.fresh();
                let tv = Term::var(&t);
                FolFormula::exists(&t, FolFormula::and(FolFormula::Less(z.clone(), tv.clone()), self.h(a, &tv)?))
            }
            Formula::Box(a) => {
                let t = self.fresh();
                let tv = Term::var(&t);
                let not_later = FolFormula::or(
                    FolFormula::Less(tv.clone(), z.clone()),
                    FolFormula::Eq(tv.clone(), z.clone()),
                );
                FolFormula::forall(&t, FolFormula::or(not_later, self.h(a, &tv)?))
            }
            Formula::Down(x, a) => FolFormula::exists(
                x,
                FolFormula::and(FolFormula::Eq(Term::var(x), z.clone()), self.h(a, z)?),
            ),
            Formula::At(Target::Nominal(v) | Target::SVar(v), a) => self.h(a, &Term::var(v))?,
        })
    }
}

fn translator_for(f: &Formula, z: &Term) -> Translator {
    let mut used = f.svar_names();
    used.extend(f.nominal_names());
    if let Term::Var(v) = z {
        used.insert(v.clone());
    }
    Translator { used }
}

/// Standard translation `H(f, z)`. Nominals and state variables become
/// first-order variables of the same name; every `<>`/`[]` gets a fresh
/// variable `t`, `t1`, ...
pub fn translate_h(f: &Formula, z: &Term) -> Result<FolFormula, FolError> {
    translator_for(f, z).h(f, z)
}

/// `exists x1 ... xk. H(f | <> f, 0)` over the free state variables (and
/// nominals) of `f`.
pub fn close_sentence(f: &Formula) -> Result<FolFormula, FolError> {
    let zero = Term::Num(0);
    let g = Formula::or(f.clone(), Formula::dia(f.clone()));
    let mut body = translator_for(f, &zero).h(&g, &zero)?;
    let mut free: Vec<String> = f.free_svars().into_iter().collect();
    free.extend(f.nominal_names());
    for x in free.iter().rev() {
        body = FolFormula::exists(x, body);
    }
    Ok(body)
}

/// Whether `g, n |= f` over `(N, <)`, by deciding `H(f, n)` with the free
/// variables (and nominals) replaced by their values under `g`.
pub fn decide_at(f: &Formula, g: &PartialAssignment, n: u64) -> Result<bool, FolError> {
    decide_at_with_limit(f, g, n, DEFAULT_CLAUSE_LIMIT)
}

pub fn decide_at_with_limit(f: &Formula, g: &PartialAssignment, n: u64, limit: usize) -> Result<bool, FolError> {
    let f = rename_apart(f);
    let mut s = translate_h(&f, &Term::Num(n))?;
    let mut names: Vec<String> = f.free_svars().into_iter().collect();
    names.extend(f.nominal_names());
    for x in names {
        let v = g.get(&x).ok_or_else(|| FolError::MissingAssignment(x.clone()))?;
        s = s.substitute(&x, &Term::Num(v));
    }
    qe_decide_with_limit(&s, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_fol, qe_decide};
    use crate::formula::parse;

    fn h(src: &str) -> String {
        translate_h(&parse(src).unwrap(), &Term::var("z")).unwrap().to_string()
    }

    #[test]
    fn translation_clauses() {
        assert_eq!(h("$x"), "x = z");
        assert_eq!(h("<> $x"), "exists t. (z < t & x = t)");
        assert_eq!(h("down x. $x"), "exists x. (x = z & x = z)");
        assert_eq!(h("[] $x"), "forall t. ((t < z | t = z) | x = t)");
        assert_eq!(h("@$y <> <> true"), "exists t. (y < t & exists t1. (t < t1 & true))");
        assert_eq!(h("p"), "true");
    }

    #[test]
    fn closing() {
        let s = close_sentence(&parse("$x").unwrap()).unwrap();
        assert_eq!(s, parse_fol("exists x. ((x = 0) | exists t. (0 < t & x = t))").unwrap());
        let s = close_sentence(&Formula::Top).unwrap();
        assert!(s.free_vars().is_empty());
        assert!(qe_decide(&s).unwrap());
        assert!(!matches!(close_sentence(&parse("[] false").unwrap()).unwrap(), FolFormula::Exists(..)));
    }

    #[test]
    fn decide_at_examples() {
        let g = PartialAssignment::from_pairs([("x", 0)]);
        assert!(decide_at(&parse("$x").unwrap(), &g, 0).unwrap());
        assert!(decide_at(&parse("<> true").unwrap(), &PartialAssignment::default(), 0).unwrap());
        let g = PartialAssignment::from_pairs([("x", 3)]);
        assert!(!decide_at(&parse("[] $x").unwrap(), &g, 7).unwrap());
        assert!(!decide_at(&parse("$x").unwrap(), &g, 4).unwrap());
        assert_eq!(
            decide_at(&parse("$y").unwrap(), &g, 0),
            Err(FolError::MissingAssignment("y".into()))
        );
        assert_eq!(decide_at(&parse("!$x").unwrap(), &g, 0), Err(FolError::NotMonotone));
    }
}
