//! Explicit linear Kripke structures: finite chains, segmented models with
//! dense blocks, and the depth-bounded quotient.

mod quotient;
mod segmented;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Target};

pub use quotient::{quotient, QuotientResult};
pub use segmented::{check_segmented, Segment, SegmentedLinearModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("state {state} is out of range for a model with {size} states")]
    StateOutOfRange { state: usize, size: usize },
    #[error("{kind} {name:?} is not interpreted by the model")]
    Uninterpreted { kind: &'static str, name: String },
    #[error("nominal {0:?} is placed more than once")]
    DuplicateNominal(String),
    #[error("quotient is defined only for models without state-variable assignment")]
    AssignmentNotEmpty,
    #[error("formula uses {0}, which segmented models do not support")]
    UnsupportedOperator(&'static str),
    #[error("model has no states")]
    Empty,
}

/// States `0..states` ordered by `<`, with a nominal valuation, a
/// state-variable assignment, and optional proposition sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLinearModel {
    pub states: usize,
    #[serde(default)]
    pub nominals: BTreeMap<String, usize>,
    #[serde(default)]
    pub svars: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub props: BTreeMap<String, BTreeSet<usize>>,
}

impl FiniteLinearModel {
    pub fn new(states: usize) -> Self {
        FiniteLinearModel { states, ..Default::default() }
    }

    pub fn with_nominal(mut self, name: impl Into<String>, state: usize) -> Self {
        self.nominals.insert(name.into(), state);
        self
    }

    pub fn with_svar(mut self, name: impl Into<String>, state: usize) -> Self {
        self.svars.insert(name.into(), state);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.states == 0 {
            return Err(ModelError::Empty);
        }
        let targets = self
            .nominals
            .values()
            .chain(self.svars.values())
            .chain(self.props.values().flatten());
        for &s in targets {
            if s >= self.states {
                return Err(ModelError::StateOutOfRange { state: s, size: self.states });
            }
        }
        Ok(())
    }
}

impl Default for FiniteLinearModel {
    fn default() -> Self {
        FiniteLinearModel {
            states: 1,
            nominals: BTreeMap::new(),
            svars: BTreeMap::new(),
            props: BTreeMap::new(),
        }
    }
}

/// Either kind of model file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelFile {
    Finite(FiniteLinearModel),
    Segmented(SegmentedLinearModel),
}

/// Evaluates `f` at state `w`. Propositions missing from `m.props` are
/// false everywhere.
pub fn check_finite(m: &FiniteLinearModel, w: usize, f: &Formula) -> Result<bool, ModelError> {
    m.validate()?;
    if w >= m.states {
        return Err(ModelError::StateOutOfRange { state: w, size: m.states });
    }
    let mut g = m.svars.clone();
    eval(m, &mut g, w, f)
}

fn eval(
    m: &FiniteLinearModel,
    g: &mut BTreeMap<String, usize>,
    w: usize,
    f: &Formula,
) -> Result<bool, ModelError> {
    let nominal = |i: &str| {
        m.nominals
            .get(i)
            .copied()
            .ok_or_else(|| ModelError::Uninterpreted { kind: "nominal", name: i.to_string() })
    };
    let svar = |g: &BTreeMap<String, usize>, x: &str| {
        g.get(x)
            .copied()
            .ok_or_else(|| ModelError::Uninterpreted { kind: "state variable", name: x.to_string() })
    };
    Ok(match f {
        Formula::Prop(p) => m.props.get(p).is_some_and(|s| s.contains(&w)),
        Formula::Nominal(i) => nominal(i)? == w,
        Formula::SVar(x) => svar(g, x)? == w,
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Neg(a) => !eval(m, g, w, a)?,
        Formula::And(a, b) => eval(m, g, w, a)? && eval(m, g, w, b)?,
        Formula::Or(a, b) => eval(m, g, w, a)? || eval(m, g, w, b)?,
        Formula::Diamond(a) => {
            for v in w + 1..m.states {
                if eval(m, g, v, a)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Box(a) => {
            for v in w + 1..m.states {
                if !eval(m, g, v, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Down(x, a) => {
            let old = g.insert(x.clone(), w);
            let r = eval(m, g, w, a);
            match old {
                Some(v) => g.insert(x.clone(), v),
                None => g.remove(x),
            };
            r?
        }
        Formula::At(t, a) => {
            let v = match t {
                Target::Nominal(i) => nominal(i)?,
                Target::SVar(x) => svar(g, x)?,
            };
            eval(m, g, v, a)?
        }
    })
}

/// Brute-force search over chains of `1..=max_states` states and every
/// interpretation of the atoms of `f`. Returns the first model and state
/// satisfying `f`, if any.
pub fn sat_search_finite(f: &Formula, max_states: usize) -> Option<(FiniteLinearModel, usize)> {
    let noms: Vec<String> = f.nominal_names().into_iter().collect();
    let svars: Vec<String> = f.free_svars().into_iter().collect();
    let props: Vec<String> = f.prop_names().into_iter().collect();
    for n in 1..=max_states {
        let points = noms.len() + svars.len();
        let mut placement = vec![0usize; points];
        loop {
            let mut m = FiniteLinearModel::new(n);
            for (k, i) in noms.iter().enumerate() {
                m.nominals.insert(i.clone(), placement[k]);
            }
            for (k, x) in svars.iter().enumerate() {
                m.svars.insert(x.clone(), placement[noms.len() + k]);
            }
            let prop_choices = 1u64 << (n * props.len()).min(63);
            for mask in 0..prop_choices {
                m.props.clear();
                for (k, p) in props.iter().enumerate() {
                    let set = (0..n).filter(|&s| mask >> (k * n + s) & 1 == 1).collect();
                    m.props.insert(p.clone(), set);
                }
                for w in 0..n {
                    if check_finite(&m, w, f) == Ok(true) {
                        return Some((m, w));
                    }
                }
            }
            if !next_tuple(&mut placement, n) {
                break;
            }
        }
    }
    None
}

/// Advances `t` as an odometer over `0..base`; false once it wraps.
fn next_tuple(t: &mut [usize], base: usize) -> bool {
    for d in t.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
