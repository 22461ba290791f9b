use super::ReductionError;
use crate::formula::Formula;

const ORACLE_LIMIT: usize = 16;

/// 3-CNF over variables `1..=vars`; literal `-v` is the negation of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    vars: usize,
    clauses: Vec<[i64; 3]>,
}

impl CnfInstance {
    pub fn new(vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, ReductionError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (index, c) in clauses.into_iter().enumerate() {
            let arity = c.len();
            let lits: [i64; 3] = c.try_into().map_err(|_| ReductionError::ClauseArity { index, arity })?;
            if let Some(&literal) = lits.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > vars) {
                return Err(ReductionError::LiteralOutOfRange { literal, vars });
            }
            out.push(lits);
        }
        Ok(CnfInstance { vars, clauses: out })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[[i64; 3]] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        let val = |l: i64| ((assignment >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0);
        self.clauses.iter().all(|c| c.iter().any(|&l| val(l)))
    }

    pub fn brute_force(&self) -> Result<bool, ReductionError> {
        if self.vars > ORACLE_LIMIT {
            return Err(ReductionError::TooLarge { size: self.vars, limit: ORACLE_LIMIT });
        }
        Ok((0..1u64 << self.vars).any(|a| self.satisfied_by(a)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for [a, b, c] in &self.clauses {
            s.push_str(&format!("{a} {b} {c} 0\n"));
        }
        s
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance, ReductionError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", v, c] if header.is_none() => {
                    let parse = |s: &str| s.parse::<usize>().map_err(|_| ReductionError::Dimacs(format!("bad header count {s:?}")));
                    header = Some((parse(v)?, parse(c)?));
                }
                _ => return Err(ReductionError::Dimacs(format!("bad header line {line:?}"))),
            }
            continue;
        }
        if header.is_none() {
            return Err(ReductionError::Dimacs("clause before 'p cnf' header".into()));
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| ReductionError::Dimacs(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| ReductionError::Dimacs("missing 'p cnf' header".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(ReductionError::Dimacs(format!("header declares {count} clauses, found {}", clauses.len())));
    }
    CnfInstance::new(vars, clauses)
}

/// `<>(i0 & <> i1) & /\_l (<>(i0 & x_l) | <>(i1 & x_l)) & /\_c h(c)` with
/// every atom a nominal.
pub fn encode_3sat(c: &CnfInstance) -> Formula {
    let i0 = || Formula::nom("i0");
    let i1 = || Formula::nom("i1");
    let x = |v: u64| Formula::nom(format!("x{v}"));
    let lit = |l: i64| {
        let side = if l > 0 { i1() } else { i0() };
        Formula::and(side, x(l.unsigned_abs()))
    };
    let mut parts = vec![Formula::dia(Formula::and(i0(), Formula::dia(i1())))];
    for v in 1..=c.vars as u64 {
        parts.push(Formula::or(Formula::dia(Formula::and(i0(), x(v))), Formula::dia(Formula::and(i1(), x(v)))));
    }
    for clause in &c.clauses {
        parts.push(Formula::dia(Formula::disj(clause.iter().map(|&l| lit(l)))));
    }
    Formula::conj(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn parses_dimacs() {
        let c = parse_dimacs("c example\np cnf 3 2\n1 2 -3 0\n-1\n-2 3 0\n").unwrap();
        assert_eq!(c.clauses(), &[[1, 2, -3], [-1, -2, 3]]);
        assert_eq!(parse_dimacs(&c.to_dimacs()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_dimacs() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2 0\n"),
            Err(ReductionError::ClauseArity { index: 0, arity: 2 })
        );
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2 3 0\n"),
            Err(ReductionError::LiteralOutOfRange { literal: 3, vars: 2 })
        );
        assert!(matches!(parse_dimacs("1 2 3 0\n"), Err(ReductionError::Dimacs(_))));
        assert!(matches!(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), Err(ReductionError::Dimacs(_))));
    }

    #[test]
    fn oracle() {
        let c = CnfInstance::new(1, vec![vec![1, 1, 1], vec![-1, -1, -1]]).unwrap();
        assert!(!c.brute_force().unwrap());
        let c = CnfInstance::new(3, vec![vec![1, 2, -3]]).unwrap();
        assert!(c.brute_force().unwrap());
    }

    #[test]
    fn encoding_shape() {
        let c = CnfInstance::new(1, vec![vec![1, -1, 1]]).unwrap();
        let expected = parse(
            "<>(#i0 & <> #i1) & (<>(#i0 & #x1) | <>(#i1 & #x1)) & <>((#i1 & #x1) | (#i0 & #x1) | (#i1 & #x1))",
        )
        .unwrap();
        assert_eq!(encode_3sat(&c), expected);
        let empty = CnfInstance::new(0, vec![]).unwrap();
        assert_eq!(encode_3sat(&empty), parse("<>(#i0 & <> #i1)").unwrap());
    }
}
