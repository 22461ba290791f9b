use std::collections::BTreeSet;

use super::{FolError, FolFormula, Term};

pub const DEFAULT_CLAUSE_LIMIT: usize = 1_000_000;

const INF: i64 = i64::MAX / 4;

/// `a - b <= c` over variable indices; index 0 is the zero variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffConstraint {
    pub a: u32,
    pub b: u32,
    pub c: i64,
}

impl DiffConstraint {
    pub fn new(a: u32, b: u32, c: i64) -> Self {
        DiffConstraint { a, b, c }
    }

    /// The integer complement `b - a <= -c - 1`.
    pub fn negated(self) -> Self {
        DiffConstraint { a: self.b, b: self.a, c: -self.c - 1 }
    }

    pub fn holds(self, value: impl Fn(u32) -> i64) -> bool {
        value(self.a) - value(self.b) <= self.c
    }
}

/// A conjunction of difference constraints over natural-number variables.
/// Every variable other than the zero variable is implicitly `>= 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DifferenceSystem {
    /// Sorted by `(a, b)`, one entry per pair, never `a == b`.
    constraints: Vec<DiffConstraint>,
}

impl DifferenceSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a system; `None` when some constraint `v - v <= c` has `c < 0`.
    pub fn from_constraints(cs: impl IntoIterator<Item = DiffConstraint>) -> Option<Self> {
        let mut s = Self::new();
        for c in cs {
            if !s.add(c) {
                return None;
            }
        }
        Some(s)
    }

    pub fn constraints(&self) -> &[DiffConstraint] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Adds a constraint keeping the tighter bound per pair. Returns false
    /// on a trivially contradictory constraint `v - v <= c`, `c < 0`.
    pub fn add(&mut self, k: DiffConstraint) -> bool {
        if k.a == k.b {
            return k.c >= 0;
        }
        match self.constraints.binary_search_by(|e| (e.a, e.b).cmp(&(k.a, k.b))) {
            Ok(i) => {
                let e = &mut self.constraints[i];
                e.c = e.c.min(k.c);
            }
            Err(i) => self.constraints.insert(i, k),
        }
        true
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        self.constraints.iter().flat_map(|k| [k.a, k.b]).filter(|&v| v != 0).collect()
    }

    pub fn mentions(&self, x: u32) -> bool {
        self.constraints.iter().any(|k| k.a == x || k.b == x)
    }

    pub fn satisfied_by(&self, value: impl Fn(u32) -> i64) -> bool {
        self.constraints.iter().all(|k| k.holds(&value))
    }

    /// Whether some assignment of naturals satisfies the system (no negative
    /// cycle once `v >= 0` is added for every variable).
    pub fn is_feasible(&self) -> bool {
        if self.constraints.is_empty() {
            return true;
        }
        let mut ids: Vec<u32> = vec![0];
        for k in &self.constraints {
            for v in [k.a, k.b] {
                if !ids.contains(&v) {
                    ids.push(v);
                }
            }
        }
        let n = ids.len();
        let pos = |v: u32| ids.iter().position(|&w| w == v).expect("collected above");
        let mut d = vec![INF; n * n];
        for i in 0..n {
            d[i * n + i] = 0;
        }
        // Edge b -> a with weight c for a - b <= c; v >= 0 is 0 - v <= 0.
        for i in 1..n {
            d[i * n] = d[i * n].min(0);
        }
        for k in &self.constraints {
            let (a, b) = (pos(k.a), pos(k.b));
            d[b * n + a] = d[b * n + a].min(k.c);
        }
        for m in 0..n {
            for i in 0..n {
                let dim = d[i * n + m];
                if dim >= INF {
                    continue;
                }
                for j in 0..n {
                    let cand = dim + d[m * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                    }
                }
            }
            if (0..n).any(|i| d[i * n + i] < 0) {
                return false;
            }
        }
        true
    }

    /// Eliminates `x` (existentially, over the naturals). Exact: the result
    /// has a natural solution exactly when the system extends to one with
    /// some value for `x`. `None` when the result is trivially infeasible.
    pub fn project(&self, x: u32) -> Option<DifferenceSystem> {
        assert_ne!(x, 0, "the zero variable cannot be eliminated");
        let mut lowers = vec![(0u32, 0i64)];
        let mut uppers = Vec::new();
        let mut out = DifferenceSystem::new();
        for &k in &self.constraints {
            if k.b == x {
                lowers.push((k.a, k.c));
            } else if k.a == x {
                uppers.push((k.b, k.c));
            } else {
                out.constraints.push(k);
            }
        }
        for &(a, c1) in &lowers {
            for &(b, c2) in &uppers {
                if !out.add(DiffConstraint::new(a, b, c1 + c2)) {
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Whether every constraint here is implied by a same-pair constraint of
    /// `other`, i.e. `other` is at least as strong.
    fn weaker_than(&self, other: &DifferenceSystem) -> bool {
        if self.constraints.len() > other.constraints.len() {
            return false;
        }
        let mut j = 0;
        for k in &self.constraints {
            while j < other.constraints.len() && (other.constraints[j].a, other.constraints[j].b) < (k.a, k.b) {
                j += 1;
            }
            match other.constraints.get(j) {
                Some(o) if o.a == k.a && o.b == k.b && o.c <= k.c => {}
                _ => return false,
            }
        }
        true
    }

    fn merged(&self, other: &DifferenceSystem) -> Option<DifferenceSystem> {
        let mut s = self.clone();
        for &k in &other.constraints {
            s.add(k);
        }
        s.is_feasible().then_some(s)
    }
}

/// Negation-normal quantified formula over difference literals, with
/// every bound variable given its own index.
#[derive(Clone, Debug)]
enum Q {
    Lit(DiffConstraint),
    True,
    False,
    And(Vec<Q>),
    Or(Vec<Q>),
    Exists(u32, Box<Q>),
    Forall(u32, Box<Q>),
}

impl Q {
    fn and(parts: Vec<Q>) -> Q {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Q::True => {}
                Q::False => return Q::False,
                Q::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Q::True,
            1 => out.pop().expect("one element"),
            _ => Q::And(out),
        }
    }

    fn or(parts: Vec<Q>) -> Q {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Q::False => {}
                Q::True => return Q::True,
                Q::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Q::False,
            1 => out.pop().expect("one element"),
            _ => Q::Or(out),
        }
    }

    fn lit(a: u32, b: u32, c: i64) -> Q {
        if a == b {
            if c >= 0 {
                Q::True
            } else {
                Q::False
            }
        } else {
            Q::Lit(DiffConstraint::new(a, b, c))
        }
    }

    fn mentions(&self, x: u32) -> bool {
        match self {
            Q::Lit(k) => k.a == x || k.b == x,
            Q::True | Q::False => false,
            Q::And(v) | Q::Or(v) => v.iter().any(|q| q.mentions(x)),
            Q::Exists(_, b) | Q::Forall(_, b) => b.mentions(x),
        }
    }

    fn negate(self) -> Q {
        match self {
            Q::Lit(k) => Q::Lit(k.negated()),
            Q::True => Q::False,
            Q::False => Q::True,
            Q::And(v) => Q::or(v.into_iter().map(Q::negate).collect()),
            Q::Or(v) => Q::and(v.into_iter().map(Q::negate).collect()),
            Q::Exists(x, b) => Q::Forall(x, Box::new(b.negate())),
            Q::Forall(x, b) => Q::Exists(x, Box::new(b.negate())),
        }
    }

    /// Replaces `x` by `v + off`.
    fn substitute(self, x: u32, v: u32, off: i64) -> Q {
        match self {
            Q::Lit(k) if k.a == x => Q::lit(v, k.b, k.c - off),
            Q::Lit(k) if k.b == x => Q::lit(k.a, v, k.c + off),
            Q::And(parts) => Q::and(parts.into_iter().map(|q| q.substitute(x, v, off)).collect()),
            Q::Or(parts) => Q::or(parts.into_iter().map(|q| q.substitute(x, v, off)).collect()),
            Q::Exists(y, b) => exists(y, b.substitute(x, v, off)),
            Q::Forall(y, b) => forall(y, b.substitute(x, v, off)),
            other => other,
        }
    }
}

/// Pushes `exists x` inwards and resolves `x = v + c` conjuncts by
/// substitution.
fn exists(x: u32, body: Q) -> Q {
    if !body.mentions(x) {
        return body;
    }
    match body {
        Q::Or(parts) => Q::or(parts.into_iter().map(|p| exists(x, p)).collect()),
        Q::And(parts) => {
            let (with, without): (Vec<Q>, Vec<Q>) = parts.into_iter().partition(|p| p.mentions(x));
            let lits: Vec<DiffConstraint> =
                with.iter().filter_map(|p| if let Q::Lit(k) = p { Some(*k) } else { None }).collect();
            let equation = lits.iter().find_map(|k| {
                (k.a == x && lits.contains(&DiffConstraint::new(k.b, x, -k.c))).then_some((k.b, k.c))
            });
            let mut out = without;
            match equation {
                Some((v, off)) => {
                    out.push(Q::lit(0, v, off));
                    out.extend(with.into_iter().map(|p| p.substitute(x, v, off)));
                }
                None => out.push(Q::Exists(x, Box::new(Q::and(with)))),
            }
            Q::and(out)
        }
        other => Q::Exists(x, Box::new(other)),
    }
}

fn forall(x: u32, body: Q) -> Q {
    if !body.mentions(x) {
        return body;
    }
    match body {
        Q::And(parts) => Q::and(parts.into_iter().map(|p| forall(x, p)).collect()),
        Q::Or(parts) => {
            let (with, mut without): (Vec<Q>, Vec<Q>) = parts.into_iter().partition(|p| p.mentions(x));
            without.push(Q::Forall(x, Box::new(Q::or(with))));
            Q::or(without)
        }
        other => Q::Forall(x, Box::new(other)),
    }
}

struct Builder {
    scope: Vec<(String, u32)>,
    next: u32,
}

impl Builder {
    fn term(&self, t: &Term) -> Result<(u32, i64), FolError> {
        match t {
            Term::Num(n) => Ok((0, *n as i64)),
            Term::Var(x) => self
                .scope
                .iter()
                .rev()
                .find(|(name, _)| name == x)
                .map(|&(_, i)| (i, 0))
                .ok_or_else(|| FolError::NotClosed(x.clone())),
        }
    }

    /// `s - t <= c` for terms.
    fn diff(&self, s: &Term, t: &Term, c: i64) -> Result<Q, FolError> {
        let (vs, ks) = self.term(s)?;
        let (vt, kt) = self.term(t)?;
        Ok(Q::lit(vs, vt, c - ks + kt))
    }

    fn build(&mut self, f: &FolFormula, neg: bool) -> Result<Q, FolError> {
        Ok(match f {
            FolFormula::True => if neg { Q::False } else { Q::True },
            FolFormula::False => if neg { Q::True } else { Q::False },
            FolFormula::Less(s, t) if !neg => self.diff(s, t, -1)?,
            FolFormula::Less(s, t) => self.diff(t, s, 0)?,
            FolFormula::Eq(s, t) if !neg => Q::and(vec![self.diff(s, t, 0)?, self.diff(t, s, 0)?]),
            FolFormula::Eq(s, t) => Q::or(vec![self.diff(s, t, -1)?, self.diff(t, s, -1)?]),
            FolFormula::Pred(p, _) => return Err(FolError::PredicateUnsupported(p.clone())),
            FolFormula::Not(a) => self.build(a, !neg)?,
            FolFormula::And(a, b) | FolFormula::Or(a, b) => {
                let parts = vec![self.build(a, neg)?, self.build(b, neg)?];
                if matches!(f, FolFormula::And(..)) != neg {
                    Q::and(parts)
                } else {
                    Q::or(parts)
                }
            }
            FolFormula::Exists(x, a) | FolFormula::Forall(x, a) => {
                let id = self.next;
                self.next += 1;
                self.scope.push((x.clone(), id));
                let body = self.build(a, neg);
                self.scope.pop();
                let body = body?;
                if matches!(f, FolFormula::Exists(..)) != neg {
                    exists(id, body)
                } else {
                    forall(id, body)
                }
            }
        })
    }
}

type Dnf = Vec<DifferenceSystem>;

struct Eliminator {
    limit: usize,
}

impl Eliminator {
    fn check(&self, n: usize) -> Result<(), FolError> {
        if n > self.limit {
            Err(FolError::ResourceLimit { limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn elim(&self, q: Q) -> Result<Dnf, FolError> {
        match q {
            Q::True => Ok(vec![DifferenceSystem::new()]),
            Q::False => Ok(Vec::new()),
            Q::Lit(k) => Ok(DifferenceSystem::from_constraints([k]).into_iter().collect()),
            Q::Or(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(self.elim(p)?);
                    self.check(out.len())?;
                }
                Ok(reduce(out))
            }
            Q::And(parts) => {
                let mut dnfs = parts.into_iter().map(|p| self.elim(p)).collect::<Result<Vec<_>, _>>()?;
                dnfs.sort_by_key(Vec::len);
                let mut acc = vec![DifferenceSystem::new()];
                for d in dnfs {
                    let mut next = Vec::new();
                    for a in &acc {
                        for b in &d {
                            if let Some(m) = a.merged(b) {
                                next.push(m);
                            }
                        }
                        self.check(next.len())?;
                    }
                    acc = reduce(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc)
            }
            Q::Exists(x, body) => {
                let d = self.elim(*body)?;
                Ok(reduce(d.iter().filter_map(|s| project_feasible(s, x)).collect()))
            }
            Q::Forall(x, body) => {
                let inner = exists(x, body.negate());
                let d = self.elim(inner)?;
                self.negate(d)
            }
        }
    }

    fn negate(&self, mut d: Dnf) -> Result<Dnf, FolError> {
        d.sort_by_key(|s| s.constraints.len());
        let mut acc = vec![DifferenceSystem::new()];
        for s in d {
            let mut next = Vec::new();
            for a in &acc {
                for &k in &s.constraints {
                    let mut m = a.clone();
                    if m.add(k.negated()) && m.is_feasible() {
                        next.push(m);
                    }
                }
                self.check(next.len())?;
            }
            acc = reduce(next);
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }
}

fn project_feasible(s: &DifferenceSystem, x: u32) -> Option<DifferenceSystem> {
    if !s.mentions(x) {
        return Some(s.clone());
    }
    s.project(x).filter(DifferenceSystem::is_feasible)
}

/// Drops duplicates and systems implied by a weaker one already present.
fn reduce(mut d: Dnf) -> Dnf {
    d.sort_by(|a, b| a.constraints.len().cmp(&b.constraints.len()).then_with(|| a.constraints.cmp(&b.constraints)));
    d.dedup();
    let mut kept: Vec<DifferenceSystem> = Vec::with_capacity(d.len());
    for s in d {
        if kept.iter().any(|k| k.weaker_than(&s)) {
            continue;
        }
        kept.retain(|k| !s.weaker_than(k));
        kept.push(s);
    }
    kept
}

/// Decides a sentence over `(N, <)` with the default clause ceiling.
pub fn qe_decide(s: &FolFormula) -> Result<bool, FolError> {
    qe_decide_with_limit(s, DEFAULT_CLAUSE_LIMIT)
}

/// Decides a sentence over `(N, <)`: negation normal form, innermost
/// elimination of each quantifier through disjunctive normal form and
/// projection of difference systems, universal quantifiers as negated
/// existentials. Fails with [`FolError::ResourceLimit`] once an
/// intermediate normal form exceeds `limit` systems.
pub fn qe_decide_with_limit(s: &FolFormula, limit: usize) -> Result<bool, FolError> {
    let mut b = Builder { scope: Vec::new(), next: 1 };
    let q = b.build(s, false)?;
    let d = Eliminator { limit }.elim(q)?;
    Ok(d.iter().any(DifferenceSystem::is_feasible))
}
