use std::collections::BTreeMap;

use super::{nc1::BoolResidue, require_ops, DecideError, Frame, PartialAssignment, Route, Verdict, Witness};
use crate::formula::{normalize_with_map, rename_apart, Formula, NodeId, NodeKind, Operator, Tree};

const BOX_DOWN_AT: [Operator; 3] = [Operator::Box, Operator::Down, Operator::At];

/// Nominals become free state variables even without `down`; both name a
/// single state and the procedure places every free variable at 0.
fn as_variables(f: &Formula) -> Result<Formula, DecideError> {
    let (g, _) = normalize_with_map(f, true)?;
    Ok(rename_apart(&g))
}

/// Residue of a `([], down, @)` formula computed from the state of
/// evaluation of every subformula, starting at state 0 under the canonical
/// assignment. `[]` steps to `n_g`, `down` extends the assignment, `@x`
/// jumps to the value of `x`.
pub fn bool_transform(f: &Formula) -> Result<BoolResidue, DecideError> {
    require_ops(f, &BOX_DOWN_AT, Route::NatLogspace)?;
    let g = as_variables(f)?;
    fn se(f: &Formula, g: &mut BTreeMap<String, u64>, i: u64) -> Formula {
        match f {
            Formula::Top | Formula::Prop(_) => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::SVar(x) => {
                if g.get(x) == Some(&i) {
                    Formula::Top
                } else {
                    Formula::Bottom
                }
            }
            Formula::And(a, b) => Formula::and(se(a, g, i), se(b, g, i)),
            Formula::Or(a, b) => Formula::or(se(a, g, i), se(b, g, i)),
            Formula::Box(a) => {
                let n_g = g.values().max().map_or(0, |m| m + 1);
                se(a, g, n_g)
            }
            Formula::Down(x, a) => {
                let old = g.insert(x.clone(), i);
                let r = se(a, g, i);
                match old {
                    Some(v) => g.insert(x.clone(), v),
                    None => g.remove(x),
                };
                r
            }
            Formula::At(t, a) => {
                let j = g[t.name()];
                se(a, g, j)
            }
            Formula::Nominal(_) | Formula::Neg(_) | Formula::Diamond(_) => {
                unreachable!("normalized ([], down, @) input")
            }
        }
    }
    let mut g0 = PartialAssignment::canonical(&g).0;
    Ok(BoolResidue(se(&g, &mut g0, 0)))
}

/// Position-based residue computation: one preorder pass over the node
/// array, deciding each variable occurrence by comparing node pairs along
/// the ancestor chain. Keeps only a constant number of node indices live.
struct Streamer<'a> {
    tree: &'a Tree,
}

/// A node on an ancestor chain, or the virtual node above the root where
/// free variables are bound (to state 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Anchor {
    Top,
    Node(NodeId),
}

impl Streamer<'_> {
    fn depth(&self, a: Anchor) -> isize {
        match a {
            Anchor::Top => -1,
            Anchor::Node(id) => self.tree.ancestors(id).count() as isize,
        }
    }

    /// Binder of `x` seen from `from`, or the virtual top when `x` is free.
    fn binder(&self, from: NodeId, x: &str) -> Anchor {
        self.tree.binder_of(from, x).map_or(Anchor::Top, Anchor::Node)
    }

    /// The deepest `[]` or `@` strictly below `upper` and strictly above
    /// `lower` (which lies below `upper`).
    fn last_jump(&self, upper: Anchor, lower: NodeId) -> Option<NodeId> {
        for a in self.tree.ancestors(lower) {
            if Anchor::Node(a) == upper {
                return None;
            }
            if self.tree.kind(a).is_jumping() {
                return Some(a);
            }
        }
        None
    }

    /// Whether two nodes on one ancestor chain are evaluated at the same
    /// state. Anchors other than the lower node are binders or the top.
    fn same_state(&self, a: Anchor, b: Anchor) -> bool {
        let (mut upper, mut lower) = if self.depth(a) <= self.depth(b) { (a, b) } else { (b, a) };
        loop {
            let Anchor::Node(low) = lower else { return true };
            if upper == lower {
                return true;
            }
            match self.last_jump(upper, low) {
                None => return true,
                Some(j) => match self.tree.kind(j) {
                    NodeKind::Box => return false,
                    NodeKind::At(t) => {
                        let target = self.binder(j, t.name());
                        if self.depth(target) <= self.depth(upper) {
                            lower = upper;
                            upper = target;
                        } else {
                            lower = target;
                        }
                    }
                    _ => unreachable!("jumping operators are [] and @"),
                },
            }
        }
    }

    /// Truth of the variable occurrence at `id` under the canonical run.
    fn rep(&self, id: NodeId) -> bool {
        let NodeKind::SVar(x) = self.tree.kind(id) else { unreachable!("variable leaf") };
        let binder = self.binder(id, x);
        self.same_state(binder, Anchor::Node(id))
    }
}

/// Residue built by the streaming pass.
pub fn streaming_residue(f: &Formula) -> Result<BoolResidue, DecideError> {
    require_ops(f, &BOX_DOWN_AT, Route::NatLogspace)?;
    let g = as_variables(f)?;
    let tree = Tree::new(&g);
    let s = Streamer { tree: &tree };
    // Tokens arrive in preorder; a stack of pending binary nodes assembles
    // the residue.
    enum Pending {
        And(Option<Formula>),
        Or(Option<Formula>),
    }
    let mut stack: Vec<Pending> = Vec::new();
    let mut done: Option<Formula> = None;
    for id in tree.ids() {
        let leaf = match tree.kind(id) {
            NodeKind::And => {
                stack.push(Pending::And(None));
                continue;
            }
            NodeKind::Or => {
                stack.push(Pending::Or(None));
                continue;
            }
            NodeKind::Box | NodeKind::Down(_) | NodeKind::At(_) => continue,
            NodeKind::Top | NodeKind::Prop(_) => Formula::Top,
            NodeKind::Bottom => Formula::Bottom,
            NodeKind::SVar(_) => {
                if s.rep(id) {
                    Formula::Top
                } else {
                    Formula::Bottom
                }
            }
            NodeKind::Nominal(_) | NodeKind::Neg | NodeKind::Diamond => {
                unreachable!("normalized ([], down, @) input")
            }
        };
        let mut value = leaf;
        loop {
            match stack.pop() {
                None => {
                    done = Some(value);
                    break;
                }
                Some(Pending::And(None)) => {
                    stack.push(Pending::And(Some(value)));
                    break;
                }
                Some(Pending::Or(None)) => {
                    stack.push(Pending::Or(Some(value)));
                    break;
                }
                Some(Pending::And(Some(left))) => value = Formula::and(left, value),
                Some(Pending::Or(Some(left))) => value = Formula::or(left, value),
            }
        }
    }
    Ok(BoolResidue(done.expect("a formula has at least one leaf")))
}

/// `([], down, @)` over the naturals: satisfiable iff the streamed residue
/// is true; the witness is the canonical assignment at state 0.
pub fn decide_nat_logspace(f: &Formula) -> Result<Verdict, DecideError> {
    let residue = streaming_residue(f)?;
    let sat = residue.eval();
    let witness = Witness {
        assignment: Some(PartialAssignment::canonical(f)),
        valuation: Some(f.nominal_names().into_iter().map(|i| (i, 0)).collect()),
        model: None,
        state: Some(0),
    };
    Ok(Verdict::new(sat, Route::NatLogspace, Frame::Nat, Some(witness)))
}
