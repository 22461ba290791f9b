use serde::{Deserialize, Serialize};

use super::{Formula, FormulaError, Target};

/// Preorder index of a node; the root is 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Prop(String),
    Nominal(String),
    SVar(String),
    Top,
    Bottom,
    Neg,
    And,
    Or,
    Diamond,
    Box,
    Down(String),
    At(Target),
}

impl NodeKind {
    /// `[]` and `@` change the state of evaluation of their operand.
    pub fn is_jumping(&self) -> bool {
        matches!(self, NodeKind::Box | NodeKind::At(_))
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Arena view of a formula in preorder with parent links.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn new(f: &Formula) -> Self {
        fn push(f: &Formula, parent: Option<NodeId>, nodes: &mut Vec<Node>) -> NodeId {
            let id = NodeId(nodes.len());
            let kind = match f {
                Formula::Prop(p) => NodeKind::Prop(p.clone()),
                Formula::Nominal(i) => NodeKind::Nominal(i.clone()),
                Formula::SVar(x) => NodeKind::SVar(x.clone()),
                Formula::Top => NodeKind::Top,
                Formula::Bottom => NodeKind::Bottom,
                Formula::Neg(_) => NodeKind::Neg,
                Formula::And(..) => NodeKind::And,
                Formula::Or(..) => NodeKind::Or,
                Formula::Diamond(_) => NodeKind::Diamond,
                Formula::Box(_) => NodeKind::Box,
                Formula::Down(x, _) => NodeKind::Down(x.clone()),
                Formula::At(t, _) => NodeKind::At(t.clone()),
            };
            nodes.push(Node { kind, parent, children: Vec::new() });
            for c in f.children() {
                let cid = push(c, Some(id), nodes);
                nodes[id.0].children.push(cid);
            }
            id
        }
        let mut nodes = Vec::with_capacity(f.size());
        push(f, None, &mut nodes);
        Tree { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id.0].kind
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Strict ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent(id), move |&n| self.parent(n))
    }

    /// Nearest ancestor `down x.` binding the variable `x`, searched from
    /// `from` (exclusive) upwards.
    pub fn binder_of(&self, from: NodeId, x: &str) -> Option<NodeId> {
        self.ancestors(from)
            .find(|&a| matches!(self.kind(a), NodeKind::Down(v) if v == x))
    }

    pub fn to_formula(&self, id: NodeId) -> Formula {
        let node = self.node(id);
        let child = |k: usize| Box::new(self.to_formula(node.children[k]));
        match &node.kind {
            NodeKind::Prop(p) => Formula::Prop(p.clone()),
            NodeKind::Nominal(i) => Formula::Nominal(i.clone()),
            NodeKind::SVar(x) => Formula::SVar(x.clone()),
            NodeKind::Top => Formula::Top,
            NodeKind::Bottom => Formula::Bottom,
            NodeKind::Neg => Formula::Neg(child(0)),
            NodeKind::And => Formula::And(child(0), child(1)),
            NodeKind::Or => Formula::Or(child(0), child(1)),
            NodeKind::Diamond => Formula::Diamond(child(0)),
            NodeKind::Box => Formula::Box(child(0)),
            NodeKind::Down(x) => Formula::Down(x.clone(), child(0)),
            NodeKind::At(t) => Formula::At(t.clone(), child(0)),
        }
    }
}

/// How an atom occurrence is bound, in the sense used by the box-fragment
/// procedures over the naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OccurrenceClass {
    Free,
    BoundByBox,
    BoundByDown,
    BoundByAt,
}

/// Walks from the occurrence towards the root and reports the first `[]`,
/// `@`, or own `down`-binder met. Other binders are transparent.
pub fn classify_occurrence(tree: &Tree, atom: NodeId) -> Result<OccurrenceClass, FormulaError> {
    let node = tree.get(atom).ok_or(FormulaError::InvalidNode(atom.0))?;
    let var = match &node.kind {
        NodeKind::SVar(x) => Some(x.as_str()),
        NodeKind::Nominal(_) => None,
        _ => return Err(FormulaError::NotAnAtom(atom.0)),
    };
    for a in tree.ancestors(atom) {
        match tree.kind(a) {
            NodeKind::Box => return Ok(OccurrenceClass::BoundByBox),
            NodeKind::At(_) => return Ok(OccurrenceClass::BoundByAt),
            NodeKind::Down(x) if Some(x.as_str()) == var => return Ok(OccurrenceClass::BoundByDown),
            _ => {}
        }
    }
    Ok(OccurrenceClass::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn class_of_first_atom(src: &str, name: &str) -> OccurrenceClass {
        let tree = Tree::new(&parse(src).unwrap());
        let id = tree
            .ids()
            .find(|&i| matches!(tree.kind(i), NodeKind::SVar(x) | NodeKind::Nominal(x) if x == name))
            .unwrap();
        classify_occurrence(&tree, id).unwrap()
    }

    #[test]
    fn preorder_ids() {
        let tree = Tree::new(&parse("(down x. $x & [] #i)").unwrap());
        let kinds: Vec<_> = tree.ids().map(|i| tree.kind(i).clone()).collect();
        assert_eq!(
            kinds,
            vec![
                NodeKind::And,
                NodeKind::Down("x".into()),
                NodeKind::SVar("x".into()),
                NodeKind::Box,
                NodeKind::Nominal("i".into()),
            ]
        );
        assert_eq!(tree.parent(NodeId(4)), Some(NodeId(3)));
        assert_eq!(tree.to_formula(NodeId(0)), parse("(down x. $x & [] #i)").unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(class_of_first_atom("down x. $x", "x"), OccurrenceClass::BoundByDown);
        assert_eq!(class_of_first_atom("down x. $y", "y"), OccurrenceClass::Free);
        assert_eq!(class_of_first_atom("down x. [] $x", "x"), OccurrenceClass::BoundByBox);
        assert_eq!(class_of_first_atom("[] @#j #i", "i"), OccurrenceClass::BoundByAt);
        assert_eq!(class_of_first_atom("@#i [] #i", "i"), OccurrenceClass::BoundByBox);
        assert_eq!(class_of_first_atom("down x. down y. $x", "x"), OccurrenceClass::BoundByDown);
    }

    #[test]
    fn classify_rejects_bad_nodes() {
        let tree = Tree::new(&parse("<> $x").unwrap());
        assert_eq!(classify_occurrence(&tree, NodeId(9)), Err(FormulaError::InvalidNode(9)));
        assert_eq!(classify_occurrence(&tree, NodeId(0)), Err(FormulaError::NotAnAtom(0)));
    }
}
