use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{FiniteLinearModel, ModelError};
use crate::formula::{Formula, Target};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Point {
        #[serde(default)]
        nominals: BTreeSet<String>,
    },
    /// A copy of the rationals in (0,1); all of its points are alike.
    Dense,
}

impl Segment {
    pub fn point<I, S>(nominals: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Segment::Point { nominals: nominals.into_iter().map(Into::into).collect() }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Segment::Dense)
    }
}

/// A linear order given as a left-to-right sequence of discrete points and
/// dense blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedLinearModel {
    pub segments: Vec<Segment>,
}

impl SegmentedLinearModel {
    /// Builds the model, merging adjacent dense blocks.
    pub fn new(segments: impl IntoIterator<Item = Segment>) -> Self {
        let mut out: Vec<Segment> = Vec::new();
        for s in segments {
            if s.is_dense() && out.last().is_some_and(Segment::is_dense) {
                continue;
            }
            out.push(s);
        }
        SegmentedLinearModel { segments: out }
    }

    pub fn has_dense_block(&self) -> bool {
        self.segments.iter().any(Segment::is_dense)
    }

    /// Segment index of every nominal.
    pub fn valuation(&self) -> Result<BTreeMap<String, usize>, ModelError> {
        let mut out = BTreeMap::new();
        for (k, s) in self.segments.iter().enumerate() {
            if let Segment::Point { nominals } = s {
                for i in nominals {
                    if out.insert(i.clone(), k).is_some() {
                        return Err(ModelError::DuplicateNominal(i.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The finite chain with the same points, when there is no dense block.
    pub fn to_finite(&self) -> Option<FiniteLinearModel> {
        if self.has_dense_block() || self.segments.is_empty() {
            return None;
        }
        let nominals = self.valuation().ok()?;
        Some(FiniteLinearModel { states: self.segments.len(), nominals, ..Default::default() })
    }
}

/// Evaluates an `@`/`<>`/`[]` formula at segment `e`, using one
/// representative point per dense block.
pub fn check_segmented(m: &SegmentedLinearModel, e: usize, f: &Formula) -> Result<bool, ModelError> {
    let val = m.valuation()?;
    if e >= m.segments.len() {
        return Err(ModelError::StateOutOfRange { state: e, size: m.segments.len() });
    }
    let mut bad = None;
    f.visit(&mut |g| match g {
        Formula::Down(..) => bad = Some("the down binder"),
        Formula::SVar(_) | Formula::At(Target::SVar(_), _) => bad = Some("state variables"),
        Formula::Prop(_) => bad = Some("propositions"),
        _ => {}
    });
    if let Some(what) = bad {
        return Err(ModelError::UnsupportedOperator(what));
    }
    for i in f.nominal_names() {
        if !val.contains_key(&i) {
            return Err(ModelError::Uninterpreted { kind: "nominal", name: i });
        }
    }
    Ok(eval(m, &val, e, f))
}

fn eval(m: &SegmentedLinearModel, val: &BTreeMap<String, usize>, e: usize, f: &Formula) -> bool {
    let dense = m.segments[e].is_dense();
    let later = e + 1..m.segments.len();
    match f {
        Formula::Nominal(i) => val[i] == e,
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Neg(a) => !eval(m, val, e, a),
        Formula::And(a, b) => eval(m, val, e, a) && eval(m, val, e, b),
        Formula::Or(a, b) => eval(m, val, e, a) || eval(m, val, e, b),
        Formula::Diamond(a) => {
            (dense && eval(m, val, e, a)) || later.into_iter().any(|k| eval(m, val, k, a))
        }
        Formula::Box(a) => {
            (!dense || eval(m, val, e, a)) && later.into_iter().all(|k| eval(m, val, k, a))
        }
        Formula::At(t, a) => eval(m, val, val[t.name()], a),
        Formula::Prop(_) | Formula::SVar(_) | Formula::Down(..) => {
            unreachable!("rejected before evaluation")
        }
    }
}
