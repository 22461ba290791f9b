use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{prepare, require_ops, DecideError, Frame, PartialAssignment, Route, Verdict, Witness};
use crate::formula::{classify_occurrence, Formula, NodeId, NodeKind, OccurrenceClass, Operator, Tree};
use crate::kripke::{FiniteLinearModel, ModelFile};

/// A formula built from `true`, `false`, `&` and `|` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoolResidue(#[serde(with = "as_text")] pub Formula);

mod as_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::formula::{parse, Formula};

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(f)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

impl BoolResidue {
    pub fn eval(&self) -> bool {
        fn go(f: &Formula) -> bool {
            match f {
                Formula::Top => true,
                Formula::Bottom => false,
                Formula::And(a, b) => go(a) && go(b),
                Formula::Or(a, b) => go(a) || go(b),
                other => unreachable!("residue contains {other}"),
            }
        }
        go(&self.0)
    }

    pub fn is_operator_free(&self) -> bool {
        let mut ok = true;
        self.0.visit(&mut |g| {
            ok &= matches!(g, Formula::Top | Formula::Bottom | Formula::And(..) | Formula::Or(..))
        });
        ok
    }
}

impl fmt::Display for BoolResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Drops every unary operator and replaces each nominal or state-variable
/// leaf by the constant `leaf` chooses for it.
pub(super) fn residue(tree: &Tree, id: NodeId, leaf: &mut impl FnMut(NodeId) -> bool) -> Formula {
    let node = tree.node(id);
    match &node.kind {
        NodeKind::Top | NodeKind::Prop(_) => Formula::Top,
        NodeKind::Bottom => Formula::Bottom,
        NodeKind::Nominal(_) | NodeKind::SVar(_) => {
            if leaf(id) {
                Formula::Top
            } else {
                Formula::Bottom
            }
        }
        NodeKind::And => Formula::and(residue(tree, node.children[0], leaf), residue(tree, node.children[1], leaf)),
        NodeKind::Or => Formula::or(residue(tree, node.children[0], leaf), residue(tree, node.children[1], leaf)),
        NodeKind::Neg => unreachable!("monotone input"),
        NodeKind::Diamond | NodeKind::Box | NodeKind::Down(_) | NodeKind::At(_) => {
            residue(tree, node.children[0], leaf)
        }
    }
}

/// Everything at state 0: the free variables and nominals of the original
/// formula, and every proposition true there.
fn canonical_witness(f: &Formula, model: bool) -> Witness {
    let assignment = PartialAssignment::canonical(f);
    let valuation: BTreeMap<String, u64> = f.nominal_names().into_iter().map(|i| (i, 0)).collect();
    let model = model.then(|| {
        let mut m = FiniteLinearModel::new(1);
        m.nominals = valuation.keys().map(|i| (i.clone(), 0)).collect();
        m.svars = assignment.0.keys().map(|x| (x.clone(), 0)).collect();
        m.props = f.prop_names().into_iter().map(|p| (p, [0].into())).collect();
        ModelFile::Finite(m)
    });
    Witness { assignment: Some(assignment), valuation: Some(valuation), model, state: Some(0) }
}

/// Fragments without `<>` and `[]`: satisfiable exactly in the one-state
/// model with every atom at that state.
pub fn decide_one_state(f: &Formula, frame: Frame) -> Result<Verdict, DecideError> {
    require_ops(f, &[Operator::Down, Operator::At], Route::OneState)?;
    let (g, _) = prepare(f)?;
    let tree = Tree::new(&g);
    let sat = BoolResidue(residue(&tree, NodeId(0), &mut |_| true)).eval();
    Ok(Verdict::new(sat, Route::OneState, frame, Some(canonical_witness(f, true))))
}

/// Over linear orders without `<>`: a last state satisfies every `[]`
/// formula, so `[]`-subformulas become `true`.
pub fn decide_lin_box_free(f: &Formula) -> Result<Verdict, DecideError> {
    require_ops(f, &[Operator::Box, Operator::Down, Operator::At], Route::LinBoxFree)?;
    let (g, _) = prepare(f)?;
    let g = g.map_bottom_up(&mut |h| match h {
        Formula::Box(_) => Formula::Top,
        other => other,
    });
    let tree = Tree::new(&g);
    let sat = BoolResidue(residue(&tree, NodeId(0), &mut |_| true)).eval();
    Ok(Verdict::new(sat, Route::LinBoxFree, Frame::Lin, Some(canonical_witness(f, true))))
}

fn occurrence_residue(g: &Formula, truth: impl Fn(OccurrenceClass) -> bool) -> BoolResidue {
    let tree = Tree::new(g);
    BoolResidue(residue(&tree, NodeId(0), &mut |id| {
        truth(classify_occurrence(&tree, id).expect("leaf ids are atom occurrences"))
    }))
}

/// `([], @)` over the naturals, with every nominal at state 0: atoms bound
/// by `[]` are false, all others true.
pub fn decide_nat_box_at(f: &Formula) -> Result<Verdict, DecideError> {
    require_ops(f, &[Operator::Box, Operator::At], Route::NatBoxAt)?;
    let (g, _) = prepare(f)?;
    let sat = occurrence_residue(&g, |c| c != OccurrenceClass::BoundByBox).eval();
    Ok(Verdict::new(sat, Route::NatBoxAt, Frame::Nat, Some(canonical_witness(f, false))))
}

/// `([], down)` over the naturals: variables bound by `[]` are false, all
/// others true.
pub fn decide_nat_box_down(f: &Formula) -> Result<Verdict, DecideError> {
    require_ops(f, &[Operator::Box, Operator::Down], Route::NatBoxDown)?;
    let (g, _) = prepare(f)?;
    let sat = occurrence_residue(&g, |c| c != OccurrenceClass::BoundByBox).eval();
    Ok(Verdict::new(sat, Route::NatBoxDown, Frame::Nat, Some(canonical_witness(f, false))))
}
