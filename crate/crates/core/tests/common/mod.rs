//! Formula enumerators and random generators shared by the test targets.
#![allow(dead_code)]

use hylosat::formula::{Formula, Target};
use rand::Rng;

pub const SVARS: [&str; 3] = ["x", "y", "z"];
pub const NOMINALS: [&str; 3] = ["i", "j", "k"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unary {
    Diamond,
    Box,
    Down,
    AtVar,
    AtNom,
}

/// Describes a finite space of formulas. Variable and nominal names are
/// introduced in order of first occurrence, so spaces contain one
/// representative per renaming.
#[derive(Clone, Debug)]
pub struct Space {
    pub unary: Vec<Unary>,
    pub binary: bool,
    pub svars: usize,
    pub nominals: usize,
    pub constants: bool,
    pub props: usize,
    /// When set, leaves count towards the size.
    pub count_leaves: bool,
}

impl Space {
    pub fn new(unary: &[Unary]) -> Self {
        Space {
            unary: unary.to_vec(),
            binary: true,
            svars: 0,
            nominals: 0,
            constants: false,
            props: 0,
            count_leaves: true,
        }
    }

    pub fn svars(mut self, n: usize) -> Self {
        self.svars = n;
        self
    }

    pub fn nominals(mut self, n: usize) -> Self {
        self.nominals = n;
        self
    }

    pub fn constants(mut self) -> Self {
        self.constants = true;
        self
    }

    pub fn props(mut self, n: usize) -> Self {
        self.props = n;
        self
    }

    pub fn internal_only(mut self) -> Self {
        self.count_leaves = false;
        self
    }

    /// Calls `k` on every formula of size at most `max`.
    pub fn for_each(&self, max: usize, k: &mut dyn FnMut(Formula)) {
        let lo = if self.count_leaves { 1 } else { 0 };
        for n in lo..=max {
            self.gen(n, (0, 0), &mut |f, _| k(f));
        }
    }

    pub fn gen_count(&self, exact: usize, n: &mut usize) {
        self.gen(exact, (0, 0), &mut |_, _| *n += 1);
    }

    pub fn collect(&self, max: usize) -> Vec<Formula> {
        let mut out = Vec::new();
        self.for_each(max, &mut |f| out.push(f));
        out
    }

    fn leaf_cost(&self) -> usize {
        self.count_leaves as usize
    }

    /// Picks a name index under the first-occurrence discipline.
    fn names(used: usize, limit: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=used.min(limit.saturating_sub(1))).filter(move |_| limit > 0).map(move |i| (i, used.max(i + 1)))
    }

    fn gen(&self, n: usize, used: (usize, usize), k: &mut dyn FnMut(Formula, (usize, usize))) {
        let (vars, noms) = used;
        if n == self.leaf_cost() {
            if self.constants {
                k(Formula::Top, used);
                k(Formula::Bottom, used);
            }
            for p in 0..self.props {
                k(Formula::prop(format!("p{p}")), used);
            }
            for (i, v) in Self::names(vars, self.svars) {
                k(Formula::var(SVARS[i]), (v, noms));
            }
            for (i, m) in Self::names(noms, self.nominals) {
                k(Formula::nom(NOMINALS[i]), (vars, m));
            }
        }
        if n == 0 {
            return;
        }
        for &u in &self.unary {
            match u {
                Unary::Diamond => self.gen(n - 1, used, &mut |f, u2| k(Formula::dia(f), u2)),
                Unary::Box => self.gen(n - 1, used, &mut |f, u2| k(Formula::boxed(f), u2)),
                Unary::Down => {
                    for (i, v) in Self::names(vars, self.svars) {
                        self.gen(n - 1, (v, noms), &mut |f, u2| k(Formula::down(SVARS[i], f), u2));
                    }
                }
                Unary::AtVar => {
                    for (i, v) in Self::names(vars, self.svars) {
                        self.gen(n - 1, (v, noms), &mut |f, u2| k(Formula::at_var(SVARS[i], f), u2));
                    }
                }
                Unary::AtNom => {
                    for (i, m) in Self::names(noms, self.nominals) {
                        self.gen(n - 1, (vars, m), &mut |f, u2| k(Formula::at_nom(NOMINALS[i], f), u2));
                    }
                }
            }
        }
        if self.binary && n > self.leaf_cost() {
            let rest = n - 1;
            let lo = self.leaf_cost();
            for left in lo..=rest - lo {
                let right = rest - left;
                self.gen(left, used, &mut |a, u1| {
                    self.gen(right, u1, &mut |b, u2| {
                        k(Formula::and(a.clone(), b.clone()), u2);
                        k(Formula::or(a.clone(), b), u2);
                    })
                });
            }
        }
    }
}

/// Random monotone formula with at most `max` nodes drawn from `space`.
pub fn random_formula(rng: &mut impl Rng, space: &Space, max: usize) -> Formula {
    let budget = rng.gen_range(1..=max.max(1));
    random_sized(rng, space, budget)
}

fn random_leaf(rng: &mut impl Rng, space: &Space) -> Formula {
    let mut options: Vec<Formula> = Vec::new();
    if space.constants {
        options.push(Formula::Top);
        options.push(Formula::Bottom);
    }
    options.extend((0..space.props).map(|p| Formula::prop(format!("p{p}"))));
    options.extend(SVARS[..space.svars].iter().map(|x| Formula::var(*x)));
    options.extend(NOMINALS[..space.nominals].iter().map(|i| Formula::nom(*i)));
    if options.is_empty() {
        return Formula::Top;
    }
    options.swap_remove(rng.gen_range(0..options.len()))
}

fn random_sized(rng: &mut impl Rng, space: &Space, n: usize) -> Formula {
    if n <= 1 || (space.unary.is_empty() && !space.binary) {
        return random_leaf(rng, space);
    }
    let unary_ok = space.unary.iter().any(|u| match u {
        Unary::Down | Unary::AtVar => space.svars > 0,
        Unary::AtNom => space.nominals > 0,
        _ => true,
    });
    let binary = space.binary && n >= 3 && (!unary_ok || rng.gen_bool(0.4));
    if binary {
        let left = rng.gen_range(1..=n - 2);
        let a = random_sized(rng, space, left);
        let b = random_sized(rng, space, n - 1 - left);
        return if rng.gen_bool(0.5) { Formula::and(a, b) } else { Formula::or(a, b) };
    }
    if !unary_ok {
        return random_leaf(rng, space);
    }
    loop {
        let u = space.unary[rng.gen_range(0..space.unary.len())];
        match u {
            Unary::Diamond => return Formula::dia(random_sized(rng, space, n - 1)),
            Unary::Box => return Formula::boxed(random_sized(rng, space, n - 1)),
            Unary::Down if space.svars > 0 => {
                let x = SVARS[rng.gen_range(0..space.svars)];
                return Formula::down(x, random_sized(rng, space, n - 1));
            }
            Unary::AtVar if space.svars > 0 => {
                let x = SVARS[rng.gen_range(0..space.svars)];
                return Formula::At(Target::SVar(x.into()), Box::new(random_sized(rng, space, n - 1)));
            }
            Unary::AtNom if space.nominals > 0 => {
                let i = NOMINALS[rng.gen_range(0..space.nominals)];
                return Formula::at_nom(i, random_sized(rng, space, n - 1));
            }
            _ => continue,
        }
    }
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

use hylosat::fol::{FolFormula, Term};

/// Random closed FOL(<) sentence with at most `max_q` quantifiers, at most
/// `max_atoms` atoms and numerals up to `max_num`.
pub fn random_sentence(rng: &mut impl Rng, max_q: usize, max_atoms: usize, max_num: u64) -> FolFormula {
    let q = rng.gen_range(0..=max_q);
    let atoms = rng.gen_range(1..=max_atoms);
    let mut next = 0;
    fol_node(rng, &mut Vec::new(), q, atoms, max_num, &mut next)
}

fn random_term(rng: &mut impl Rng, scope: &[String], max_num: u64) -> Term {
    if !scope.is_empty() && rng.gen_bool(0.75) {
        Term::Var(scope[rng.gen_range(0..scope.len())].clone())
    } else {
        Term::Num(rng.gen_range(0..=max_num))
    }
}

fn fol_node(
    rng: &mut impl Rng,
    scope: &mut Vec<String>,
    q: usize,
    atoms: usize,
    max_num: u64,
    next: &mut usize,
) -> FolFormula {
    if q > 0 && (atoms == 1 || rng.gen_bool(0.5)) {
        let x = format!("v{next}");
        *next += 1;
        scope.push(x.clone());
        let body = fol_node(rng, scope, q - 1, atoms, max_num, next);
        scope.pop();
        return if rng.gen_bool(0.5) { FolFormula::exists(x, body) } else { FolFormula::forall(x, body) };
    }
    if atoms >= 2 {
        let left_atoms = rng.gen_range(1..atoms);
        let left_q = rng.gen_range(0..=q);
        let a = fol_node(rng, scope, left_q, left_atoms, max_num, next);
        let b = fol_node(rng, scope, q - left_q, atoms - left_atoms, max_num, next);
        return if rng.gen_bool(0.5) { FolFormula::and(a, b) } else { FolFormula::or(a, b) };
    }
    let s = random_term(rng, scope, max_num);
    let t = random_term(rng, scope, max_num);
    let atom = if rng.gen_bool(0.7) { FolFormula::less(s, t) } else { FolFormula::eq(s, t) };
    if rng.gen_bool(0.3) {
        FolFormula::not(atom)
    } else {
        atom
    }
}

/// Random prenex FOL(<,P) sentence with an NNF matrix.
pub fn random_folp(rng: &mut impl Rng, max_q: usize, max_literals: usize) -> FolFormula {
    let q = rng.gen_range(1..=max_q);
    let vars: Vec<String> = (0..q).map(|k| format!("x{k}")).collect();
    let literals = rng.gen_range(1..=max_literals);
    let mut matrix = folp_literal(rng, &vars);
    for _ in 1..literals {
        let lit = folp_literal(rng, &vars);
        matrix = if rng.gen_bool(0.5) { FolFormula::and(matrix, lit) } else { FolFormula::or(matrix, lit) };
    }
    vars.iter().rev().fold(matrix, |body, x| {
        if rng.gen_bool(0.5) {
            FolFormula::exists(x.clone(), body)
        } else {
            FolFormula::forall(x.clone(), body)
        }
    })
}

fn folp_literal(rng: &mut impl Rng, vars: &[String]) -> FolFormula {
    let pick = |rng: &mut dyn rand::RngCore| Term::Var(vars[rng.gen_range(0..vars.len())].clone());
    let atom = match rng.gen_range(0..3) {
        0 => FolFormula::Pred("P".into(), pick(rng)),
        1 => FolFormula::less(pick(rng), pick(rng)),
        _ => FolFormula::eq(pick(rng), pick(rng)),
    };
    if rng.gen_bool(0.4) {
        FolFormula::not(atom)
    } else {
        atom
    }
}

/// Reference semantics over (N,<) with each quantifier relativized to
/// `0..=max(values in scope, numerals) + 2^(quantifier rank)`. Gaps wider
/// than `2^r` cannot be told apart by `r` more quantifiers, so this is
/// exact; it is only used to explain disagreements with `eval_bounded`.
pub fn eval_relativized(s: &FolFormula) -> bool {
    fn rank(f: &FolFormula) -> u32 {
        match f {
            FolFormula::Not(a) => rank(a),
            FolFormula::And(a, b) | FolFormula::Or(a, b) => rank(a).max(rank(b)),
            FolFormula::Exists(_, a) | FolFormula::Forall(_, a) => 1 + rank(a),
            _ => 0,
        }
    }
    fn term(t: &Term, env: &[(String, u64)]) -> u64 {
        match t {
            Term::Num(n) => *n,
            Term::Var(x) => env.iter().rev().find(|(v, _)| v == x).expect("closed").1,
        }
    }
    fn go(f: &FolFormula, env: &mut Vec<(String, u64)>, m: u64) -> bool {
        match f {
            FolFormula::Less(a, b) => term(a, env) < term(b, env),
            FolFormula::Eq(a, b) => term(a, env) == term(b, env),
            FolFormula::True => true,
            FolFormula::False => false,
            FolFormula::Pred(..) => panic!("no predicates over (N,<)"),
            FolFormula::Not(a) => !go(a, env, m),
            FolFormula::And(a, b) => go(a, env, m) && go(b, env, m),
            FolFormula::Or(a, b) => go(a, env, m) || go(b, env, m),
            FolFormula::Exists(x, a) | FolFormula::Forall(x, a) => {
                let top = env.iter().map(|e| e.1).max().unwrap_or(0).max(m) + (1u64 << rank(f));
                let exists = matches!(f, FolFormula::Exists(..));
                for v in 0..=top {
                    env.push((x.clone(), v));
                    let r = go(a, env, m);
                    env.pop();
                    if r == exists {
                        return exists;
                    }
                }
                !exists
            }
        }
    }
    go(s, &mut Vec::new(), s.max_numeral())
}

use proptest::prelude::*;

/// Proptest strategy over the formulas of `space` (leaf costs ignored;
/// depth is bounded instead).
pub fn formula_strategy(space: &Space, depth: u32) -> BoxedStrategy<Formula> {
    let mut leaves: Vec<BoxedStrategy<Formula>> = Vec::new();
    if space.constants {
        leaves.push(Just(Formula::Top).boxed());
        leaves.push(Just(Formula::Bottom).boxed());
    }
    if space.props > 0 {
        leaves.push((0..space.props).prop_map(|p| Formula::prop(format!("p{p}"))).boxed());
    }
    if space.svars > 0 {
        leaves.push(prop::sample::select(&SVARS[..space.svars]).prop_map(Formula::var).boxed());
    }
    if space.nominals > 0 {
        leaves.push(prop::sample::select(&NOMINALS[..space.nominals]).prop_map(Formula::nom).boxed());
    }
    if leaves.is_empty() {
        leaves.push(Just(Formula::Top).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    let space = space.clone();
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let mut arms: Vec<BoxedStrategy<Formula>> = Vec::new();
        if space.binary {
            arms.push((inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed());
            arms.push((inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed());
        }
        for &u in &space.unary {
            let arm = match u {
                Unary::Diamond => inner.clone().prop_map(Formula::dia).boxed(),
                Unary::Box => inner.clone().prop_map(Formula::boxed).boxed(),
                Unary::Down if space.svars > 0 => (prop::sample::select(&SVARS[..space.svars]), inner.clone())
                    .prop_map(|(x, f)| Formula::down(x, f))
                    .boxed(),
                Unary::AtVar if space.svars > 0 => (prop::sample::select(&SVARS[..space.svars]), inner.clone())
                    .prop_map(|(x, f)| Formula::at_var(x, f))
                    .boxed(),
                Unary::AtNom if space.nominals > 0 => (prop::sample::select(&NOMINALS[..space.nominals]), inner.clone())
                    .prop_map(|(i, f)| Formula::at_nom(i, f))
                    .boxed(),
                _ => continue,
            };
            arms.push(arm);
        }
        if arms.is_empty() {
            return inner.boxed();
        }
        proptest::strategy::Union::new(arms).boxed()
    })
    .boxed()
}

pub fn all_unary() -> Vec<Unary> {
    vec![Unary::Diamond, Unary::Box, Unary::Down, Unary::AtVar, Unary::AtNom]
}
