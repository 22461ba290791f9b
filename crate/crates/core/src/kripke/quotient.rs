use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{FiniteLinearModel, ModelError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientResult {
    pub model: FiniteLinearModel,
    /// State of `model` representing each original state.
    pub class_map: Vec<usize>,
    pub class_sizes: Vec<usize>,
    /// Distance to the next nominal state (or to the end of the chain);
    /// `None` at nominal states.
    pub delta: Vec<Option<usize>>,
}

/// Collapses, inside each gap between nominal states, the states whose
/// distance to the gap's right end exceeds `md`.
///
/// The right end of a gap is its next nominal state, or the end of the
/// chain for the trailing gap.
pub fn quotient(m: &FiniteLinearModel, md: usize) -> Result<QuotientResult, ModelError> {
    m.validate()?;
    if !m.svars.is_empty() {
        return Err(ModelError::AssignmentNotEmpty);
    }
    let n = m.states;
    let named: BTreeSet<usize> = m.nominals.values().copied().collect();
    let mut delta = vec![None; n];
    let mut gap_end = vec![n; n];
    let mut next = n;
    for w in (0..n).rev() {
        if named.contains(&w) {
            next = w;
        } else {
            delta[w] = Some(next - w - 1);
            gap_end[w] = next;
        }
    }
    let mergeable = |w: usize| delta[w].is_some_and(|d| d > md);
    let mut class_map = Vec::with_capacity(n);
    let mut class_sizes: Vec<usize> = Vec::new();
    for w in 0..n {
        let joins = w > 0 && mergeable(w) && mergeable(w - 1) && gap_end[w] == gap_end[w - 1];
        if joins {
            *class_sizes.last_mut().expect("previous class exists") += 1;
        } else {
            class_sizes.push(1);
        }
        class_map.push(class_sizes.len() - 1);
    }
    let mut model = FiniteLinearModel::new(class_sizes.len());
    for (i, &s) in &m.nominals {
        model.nominals.insert(i.clone(), class_map[s]);
    }
    for (p, set) in &m.props {
        model.props.insert(p.clone(), set.iter().map(|&s| class_map[s]).collect());
    }
    Ok(QuotientResult { model, class_map, class_sizes, delta })
}
