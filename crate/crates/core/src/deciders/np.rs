//! Small-model search for the proper fragments containing `<>`.
//!
//! After the binders are gone the formula only uses `<>`, `[]`, `@` and
//! nominals. A candidate model is a left-to-right sequence of points and
//! dense blocks (over the naturals: points followed by an infinite
//! nominal-free tail). The search builds such sequences from the right,
//! keeping only what the prefix can observe of the suffix: which closure
//! members hold somewhere to the right, which hold everywhere to the
//! right, which nominals are placed, and whether the formula held yet.
//! That summary space is finite, so the search is a plain reachability
//! problem. The values of the `@`-subformulas are guessed up front and
//! confirmed at the state carrying the nominal.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{require_ops, DecideError, Frame, PartialAssignment, Route, Verdict, Witness};
use crate::fol::decide_at;
use crate::formula::{fresh_name, normalize_monotone, rename_apart, Formula, Operator, Target};
use crate::kripke::{check_segmented, ModelFile, Segment, SegmentedLinearModel};
use crate::reductions::{eliminate_down_no_at, skolemize};

/// The binder-free, variable-free formula the search runs on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpReduction {
    pub formula: Formula,
    /// "none", "skolemize" or "eliminate-down".
    pub rewrite: &'static str,
}

/// Removes `down` (skolemization with `@`, elimination without) and turns
/// the remaining state variables into nominals.
pub fn np_reduce(f: &Formula) -> Result<NpReduction, DecideError> {
    use Operator::*;
    let proper = [Diamond, Box, Down, At];
    let ops = f.operators();
    if ops.len() == proper.len() {
        return Err(DecideError::WrongFragment {
            route: Route::NpSmallModel,
            allowed: "a proper subset of <>,[],down,@".into(),
            found: ops.iter().map(|o| o.symbol()).collect::<Vec<_>>().join(","),
        });
    }
    let g = rename_apart(&normalize_monotone(f, false)?);
    let (g, rewrite) = if !ops.contains(&Down) {
        (g, "none")
    } else if ops.contains(&Box) {
        (eliminate_down_no_at(&g)?, "eliminate-down")
    } else {
        (skolemize(&g)?, "skolemize")
    };
    Ok(NpReduction { formula: svars_to_nominals(&g), rewrite })
}

fn svars_to_nominals(f: &Formula) -> Formula {
    let mut used = f.nominal_names();
    used.extend(f.svar_names());
    let names: BTreeMap<String, String> = f
        .svar_names()
        .into_iter()
        .map(|x| {
            let base = format!("i{x}");
            let n = if used.insert(base.clone()) { base } else { fresh_name(&base, &mut used) };
            (x, n)
        })
        .collect();
    f.map_bottom_up(&mut |g| match g {
        Formula::SVar(x) => Formula::Nominal(names[&x].clone()),
        Formula::At(Target::SVar(x), b) => Formula::At(Target::Nominal(names[&x].clone()), b),
        other => other,
    })
}

pub fn decide_np_nat(f: &Formula) -> Result<Verdict, DecideError> {
    decide_np(f, Frame::Nat)
}

pub fn decide_np_lin(f: &Formula) -> Result<Verdict, DecideError> {
    decide_np(f, Frame::Lin)
}

fn decide_np(f: &Formula, frame: Frame) -> Result<Verdict, DecideError> {
    if !f.is_monotone() {
        return Err(crate::formula::FormulaError::NotMonotone.into());
    }
    let red = np_reduce(f)?;
    let h = &red.formula;
    require_ops(h, &[Operator::Diamond, Operator::Box, Operator::At], Route::NpSmallModel)?;
    let search = Search::new(h);
    let found = (0..1u64 << search.pairs.len()).find_map(|profile| search.run(frame, profile));
    let witness = found.map(|path| search.witness(frame, path));
    if let Some(w) = &witness {
        if frame == Frame::Lin {
            debug_assert!(verify_np_witness(h, frame, w).unwrap_or(false), "segmented witness fails to check");
        }
    }
    Ok(Verdict::new(witness.is_some(), Route::NpSmallModel, frame, witness))
}

/// Re-checks a witness produced by the search against the reduced formula:
/// by segment model checking over `lin`, by quantifier elimination with the
/// nominals fixed over `nat`.
pub fn verify_np_witness(reduced: &Formula, frame: Frame, w: &Witness) -> Result<bool, DecideError> {
    let state = w.state.unwrap_or(0);
    match (frame, &w.model) {
        (Frame::Lin, Some(ModelFile::Segmented(m))) => Ok(check_segmented(m, state as usize, reduced)?),
        (Frame::Nat, _) => {
            let g = PartialAssignment(w.valuation.clone().unwrap_or_default());
            Ok(decide_at(reduced, &g, state)?)
        }
        _ => Ok(false),
    }
}

#[derive(Clone, Debug)]
enum Node {
    Top,
    Bottom,
    Nom(usize),
    And(usize, usize),
    Or(usize, usize),
    Dia(usize),
    Box(usize),
    /// Index into the guessed profile.
    At(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, v: bool) {
        if v {
            self.0[i / 64] |= 1 << (i % 64);
        } else {
            self.0[i / 64] &= !(1 << (i % 64));
        }
    }

    fn or_masked(&self, other: &Bits, mask: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).zip(&mask.0).map(|((a, b), m)| a | (b & m)).collect())
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Seg {
    /// Bitmask of the nominals placed here.
    Point(u64),
    Dense,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Summary {
    /// Diamond operands true somewhere to the right.
    some: Bits,
    /// Box operands true everywhere to the right.
    all: Bits,
    placed: u64,
    seen_root: bool,
    dense_front: bool,
}

struct Search {
    nodes: Vec<Node>,
    root: usize,
    nominals: Vec<String>,
    /// Distinct `(nominal, operand)` pairs under `@`.
    pairs: Vec<(usize, usize)>,
    dia_mask: Bits,
    box_mask: Bits,
}

/// Left-to-right segments of a found model, each with whether the formula
/// holds there.
type Path = Vec<(Seg, bool)>;

impl Search {
    fn new(f: &Formula) -> Self {
        let nominals: Vec<String> = f.nominal_names().into_iter().collect();
        let mut s = Search {
            nodes: Vec::new(),
            root: 0,
            nominals,
            pairs: Vec::new(),
            dia_mask: Bits(Vec::new()),
            box_mask: Bits(Vec::new()),
        };
        let mut memo = HashMap::new();
        let mut pair_ix = HashMap::new();
        s.root = s.intern(f, &mut memo, &mut pair_ix);
        let n = s.nodes.len();
        s.dia_mask = Bits::zeros(n);
        s.box_mask = Bits::zeros(n);
        for node in &s.nodes {
            match *node {
                Node::Dia(a) => s.dia_mask.set(a, true),
                Node::Box(a) => s.box_mask.set(a, true),
                _ => {}
            }
        }
        s
    }

    fn intern(
        &mut self,
        f: &Formula,
        memo: &mut HashMap<Formula, usize>,
        pair_ix: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let nom = |s: &Search, i: &str| s.nominals.iter().position(|n| n == i).expect("nominal collected");
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Nominal(i) => Node::Nom(nom(self, i)),
            Formula::And(a, b) => Node::And(self.intern(a, memo, pair_ix), self.intern(b, memo, pair_ix)),
            Formula::Or(a, b) => Node::Or(self.intern(a, memo, pair_ix), self.intern(b, memo, pair_ix)),
            Formula::Diamond(a) => Node::Dia(self.intern(a, memo, pair_ix)),
            Formula::Box(a) => Node::Box(self.intern(a, memo, pair_ix)),
            Formula::At(Target::Nominal(i), a) => {
                let i = nom(self, i);
                let a = self.intern(a, memo, pair_ix);
                let next = pair_ix.len();
                let p = *pair_ix.entry((i, a)).or_insert(next);
                if p == self.pairs.len() {
                    self.pairs.push((i, a));
                }
                Node::At(p)
            }
            other => unreachable!("reduced formula contains {other}"),
        };
        self.nodes.push(node);
        memo.insert(f.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Truth of every closure member at a segment, given the summary of the
    /// segments to its right.
    fn eval(&self, seg: Seg, right: &Summary, profile: u64) -> Bits {
        let mut val = Bits::zeros(self.nodes.len());
        let dense = seg == Seg::Dense;
        for (k, node) in self.nodes.iter().enumerate() {
            let v = match *node {
                Node::Top => true,
                Node::Bottom => false,
                Node::Nom(i) => matches!(seg, Seg::Point(m) if m >> i & 1 == 1),
                Node::And(a, b) => val.get(a) && val.get(b),
                Node::Or(a, b) => val.get(a) || val.get(b),
                Node::Dia(a) => right.some.get(a) || (dense && val.get(a)),
                Node::Box(a) => right.all.get(a) && (!dense || val.get(a)),
                Node::At(p) => profile >> p & 1 == 1,
            };
            val.set(k, v);
        }
        val
    }

    /// The guessed `@` values claimed for a nominal must hold where it sits.
    fn consistent(&self, seg: Seg, val: &Bits, profile: u64) -> bool {
        let Seg::Point(mask) = seg else { return true };
        self.pairs
            .iter()
            .enumerate()
            .all(|(p, &(i, a))| mask >> i & 1 == 0 || profile >> p & 1 == 0 || val.get(a))
    }

    fn step(&self, seg: Seg, right: &Summary, profile: u64) -> Option<(Summary, bool)> {
        let val = self.eval(seg, right, profile);
        if !self.consistent(seg, &val, profile) {
            return None;
        }
        let placed = match seg {
            Seg::Point(m) => right.placed | m,
            Seg::Dense => right.placed,
        };
        let here = val.get(self.root);
        let next = Summary {
            some: right.some.or_masked(&val, &self.dia_mask),
            all: right.all.and(&val),
            placed,
            seen_root: right.seen_root || here,
            dense_front: seg == Seg::Dense,
        };
        Some((next, here))
    }

    fn run(&self, frame: Frame, profile: u64) -> Option<Path> {
        let k = self.nominals.len();
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let empty = Summary {
            some: Bits::zeros(self.nodes.len()),
            all: self.box_mask.clone(),
            placed: 0,
            seen_root: false,
            dense_front: false,
        };
        // Over the naturals the rightmost part is an infinite nominal-free
        // tail; its states all agree, like those of a dense block.
        let (start, tail) = match frame {
            Frame::Lin => (empty, None),
            Frame::Nat => {
                let (s, here) = self.step(Seg::Dense, &empty, profile)?;
                (s, Some(here))
            }
        };
        let accept = |s: &Summary| s.placed == full && s.seen_root;
        let mut parent: HashMap<Summary, Option<(Summary, Seg, bool)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start.clone()]);
        let mut goal = accept(&start).then_some(start);
        while goal.is_none() {
            let Some(cur) = queue.pop_front() else { break };
            let free = full & !cur.placed;
            let mut moves = vec![Seg::Point(0)];
            let mut sub = free;
            while sub != 0 {
                moves.push(Seg::Point(sub));
                sub = (sub - 1) & free;
            }
            if frame == Frame::Lin && !cur.dense_front {
                moves.push(Seg::Dense);
            }
            for seg in moves {
                let Some((next, here)) = self.step(seg, &cur, profile) else { continue };
                if parent.contains_key(&next) {
                    continue;
                }
                parent.insert(next.clone(), Some((cur.clone(), seg, here)));
                if accept(&next) {
                    goal = Some(next);
                    break;
                }
                queue.push_back(next);
            }
        }
        let mut cur = goal?;
        let mut path = Vec::new();
        while let Some((prev, seg, here)) = parent[&cur].clone() {
            path.push((seg, here));
            cur = prev;
        }
        if let Some(here) = tail {
            path.push((Seg::Dense, here));
        }
        Some(path)
    }

    fn witness(&self, frame: Frame, path: Path) -> Witness {
        let names = |m: u64| -> BTreeSet<String> {
            (0..self.nominals.len()).filter(|i| m >> i & 1 == 1).map(|i| self.nominals[i].clone()).collect()
        };
        let mut valuation = BTreeMap::new();
        for (pos, (seg, _)) in path.iter().enumerate() {
            if let Seg::Point(m) = *seg {
                for n in names(m) {
                    valuation.insert(n, pos as u64);
                }
            }
        }
        let state = path.iter().position(|&(_, here)| here).map(|p| p as u64);
        let model = (frame == Frame::Lin).then(|| {
            ModelFile::Segmented(SegmentedLinearModel::new(path.iter().map(|&(seg, _)| match seg {
                Seg::Point(m) => Segment::Point { nominals: names(m) },
                Seg::Dense => Segment::Dense,
            })))
        });
        Witness { assignment: None, valuation: Some(valuation), model, state }
    }
}
