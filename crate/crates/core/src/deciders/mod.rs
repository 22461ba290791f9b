//! Satisfiability procedures per fragment and frame, and the routing table
//! that picks one.

mod logspace;
mod nc1;
mod np;
mod qe;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{FolError, DEFAULT_CLAUSE_LIMIT};
use crate::formula::{normalize_with_map, rename_apart, Formula, FormulaError, Operator};
use crate::kripke::{ModelError, ModelFile};
use crate::reductions::ReductionError;

pub use logspace::{bool_transform, decide_nat_logspace, streaming_residue};
pub use nc1::{decide_lin_box_free, decide_nat_box_at, decide_nat_box_down, decide_one_state, BoolResidue};
pub use np::{decide_np_lin, decide_np_nat, np_reduce, verify_np_witness, NpReduction};
pub use qe::{decide_nat_qe, decide_nat_qe_with};

/// A finite map from state variables to natural numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialAssignment(pub BTreeMap<String, u64>);

impl PartialAssignment {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        PartialAssignment(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Every free state variable of `f` mapped to 0.
    pub fn canonical(f: &Formula) -> Self {
        PartialAssignment(f.free_svars().into_iter().map(|x| (x, 0)).collect())
    }

    pub fn get(&self, x: &str) -> Option<u64> {
        self.0.get(x).copied()
    }

    pub fn insert(&mut self, x: impl Into<String>, v: u64) {
        self.0.insert(x.into(), v);
    }

    /// One past the largest value; 0 for the empty assignment.
    pub fn n_g(&self) -> u64 {
        self.0.values().max().map_or(0, |m| m + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Nat,
    Lin,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Nat => "nat",
            Frame::Lin => "lin",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    OneState,
    LinBoxFree,
    NatBoxAt,
    NatBoxDown,
    NatLogspace,
    NpSmallModel,
    NatQe,
    UnsupportedNonelementary,
}

impl Route {
    pub const ALL: [Route; 8] = [
        Route::OneState,
        Route::LinBoxFree,
        Route::NatBoxAt,
        Route::NatBoxDown,
        Route::NatLogspace,
        Route::NpSmallModel,
        Route::NatQe,
        Route::UnsupportedNonelementary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::OneState => "one-state",
            Route::LinBoxFree => "lin-box-free",
            Route::NatBoxAt => "nat-box-at",
            Route::NatBoxDown => "nat-box-down",
            Route::NatLogspace => "nat-logspace",
            Route::NpSmallModel => "np-small-model",
            Route::NatQe => "nat-qe",
            Route::UnsupportedNonelementary => "unsupported-nonelementary",
        }
    }

    pub fn from_name(s: &str) -> Option<Route> {
        Route::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

/// Evidence for a `sat` verdict. Which parts are present depends on the
/// route.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<PartialAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuation: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
    /// State (or segment index) at which the formula holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub status: Status,
    pub route: Route,
    pub frame: Frame,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    fn new(sat: bool, route: Route, frame: Frame, witness: Option<Witness>) -> Self {
        Verdict {
            status: if sat { Status::Sat } else { Status::Unsat },
            route,
            frame,
            witness: if sat { witness } else { None },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("route {route} needs operators within {{{allowed}}}, found {{{found}}}")]
    WrongFragment { route: Route, allowed: String, found: String },
    #[error("no decision procedure for this fragment over {frame} (route {route})")]
    Unsupported { route: Route, frame: Frame },
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Tuning shared by all procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Clause ceiling for quantifier elimination.
    pub qe_limit: usize,
    /// Whether procedures that pay extra for witnesses should compute them.
    pub witness: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { qe_limit: DEFAULT_CLAUSE_LIMIT, witness: true }
    }
}

fn op_list(ops: &BTreeSet<Operator>) -> String {
    ops.iter().map(|o| o.symbol()).collect::<Vec<_>>().join(",")
}

/// Fails unless the operators of `f` lie within `allowed`.
fn require_ops(f: &Formula, allowed: &[Operator], route: Route) -> Result<BTreeSet<Operator>, DecideError> {
    let ops = f.operators();
    if ops.iter().all(|o| allowed.contains(o)) {
        Ok(ops)
    } else {
        Err(DecideError::WrongFragment {
            route,
            allowed: allowed.iter().map(|o| o.symbol()).collect::<Vec<_>>().join(","),
            found: op_list(&ops),
        })
    }
}

/// Monotone normalization followed by renaming apart. Nominals turn into
/// state variables when `down` occurs. Returns the nominal renaming too.
fn prepare(f: &Formula) -> Result<(Formula, BTreeMap<String, String>), DecideError> {
    let binder_mode = f.operators().contains(&Operator::Down);
    let (g, map) = normalize_with_map(f, binder_mode)?;
    Ok((rename_apart(&g), map))
}

/// Picks the procedure for `f` over `frame` from the operators it uses.
pub fn route(f: &Formula, frame: Frame) -> Result<Route, DecideError> {
    use Operator::*;
    if !f.is_monotone() {
        return Err(FormulaError::NotMonotone.into());
    }
    let ops = f.operators();
    let within = |allowed: &[Operator]| ops.iter().all(|o| allowed.contains(o));
    let full = ops.len() == 4;
    Ok(if within(&[Down, At]) {
        Route::OneState
    } else if frame == Frame::Lin && !ops.contains(&Diamond) {
        Route::LinBoxFree
    } else if frame == Frame::Nat && ops == BTreeSet::from([Box, At]) {
        Route::NatBoxAt
    } else if frame == Frame::Nat && ops == BTreeSet::from([Box, Down]) {
        Route::NatBoxDown
    } else if frame == Frame::Nat && within(&[Box, Down, At]) {
        Route::NatLogspace
    } else if !full {
        Route::NpSmallModel
    } else if frame == Frame::Nat {
        Route::NatQe
    } else {
        Route::UnsupportedNonelementary
    })
}

/// Decides satisfiability of `f` over `frame` through [`route`].
pub fn decide(f: &Formula, frame: Frame) -> Result<Verdict, DecideError> {
    decide_with(f, frame, None, &Options::default())
}

/// As [`decide`], optionally forcing a route. A forced route still rejects
/// formulas outside its fragment.
pub fn decide_with(
    f: &Formula,
    frame: Frame,
    forced: Option<Route>,
    opts: &Options,
) -> Result<Verdict, DecideError> {
    let r = match forced {
        Some(r) => {
            if !f.is_monotone() {
                return Err(FormulaError::NotMonotone.into());
            }
            r
        }
        None => route(f, frame)?,
    };
    let frame_only = |want: Frame| {
        if frame == want {
            Ok(())
        } else {
            Err(DecideError::Unsupported { route: r, frame })
        }
    };
    match r {
        Route::OneState => decide_one_state(f, frame),
        Route::LinBoxFree => {
            frame_only(Frame::Lin)?;
            decide_lin_box_free(f)
        }
        Route::NatBoxAt => {
            frame_only(Frame::Nat)?;
            decide_nat_box_at(f)
        }
        Route::NatBoxDown => {
            frame_only(Frame::Nat)?;
            decide_nat_box_down(f)
        }
        Route::NatLogspace => {
            frame_only(Frame::Nat)?;
            decide_nat_logspace(f)
        }
        Route::NpSmallModel => match frame {
            Frame::Nat => decide_np_nat(f),
            Frame::Lin => decide_np_lin(f),
        },
        Route::NatQe => {
            frame_only(Frame::Nat)?;
            decide_nat_qe_with(f, opts)
        }
        Route::UnsupportedNonelementary => Err(DecideError::Unsupported { route: r, frame }),
    }
}

/// Re-checks the witness of a `sat` verdict for `f` with a checker other
/// than the procedure that produced it: model checking when the witness
/// carries a model, quantifier elimination at the reported state otherwise.
/// Verdicts without a witness do not verify.
pub fn verify_witness(f: &Formula, v: &Verdict) -> Result<bool, DecideError> {
    let Some(w) = &v.witness else { return Ok(false) };
    if v.route == Route::NpSmallModel {
        let red = np_reduce(f)?;
        return verify_np_witness(&red.formula, v.frame, w);
    }
    let state = w.state.unwrap_or(0);
    match &w.model {
        Some(ModelFile::Finite(m)) => Ok(crate::kripke::check_finite(m, state as usize, f)?),
        Some(ModelFile::Segmented(m)) => Ok(crate::kripke::check_segmented(m, state as usize, f)?),
        None => {
            let mut g = w.assignment.clone().unwrap_or_default();
            for (i, &n) in w.valuation.iter().flatten() {
                g.insert(i.clone(), n);
            }
            Ok(crate::fol::decide_at(f, &g, state)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn r(src: &str, frame: Frame) -> Route {
        route(&parse(src).unwrap(), frame).unwrap()
    }

    #[test]
    fn routing_table() {
        assert_eq!(r("down x. @$x $x", Frame::Lin), Route::OneState);
        assert_eq!(r("[] false", Frame::Nat), Route::NatLogspace);
        assert_eq!(r("[] false", Frame::Lin), Route::LinBoxFree);
        assert_eq!(r("down x. <> [] @$x $x", Frame::Lin), Route::UnsupportedNonelementary);
        assert_eq!(r("down x. <> [] @$x $x", Frame::Nat), Route::NatQe);
        assert_eq!(r("[] @#i #j", Frame::Nat), Route::NatBoxAt);
        assert_eq!(r("down x. [] $x", Frame::Nat), Route::NatBoxDown);
        assert_eq!(r("down x. [] @$x $x", Frame::Nat), Route::NatLogspace);
        assert_eq!(r("<> #i", Frame::Nat), Route::NpSmallModel);
        assert_eq!(r("true", Frame::Nat), Route::OneState);
        assert!(route(&parse("!p").unwrap(), Frame::Nat).is_err());
    }

    #[test]
    fn n_g_convention() {
        assert_eq!(PartialAssignment::default().n_g(), 0);
        assert_eq!(PartialAssignment::from_pairs([("x", 3), ("y", 1)]).n_g(), 4);
    }

    #[test]
    fn dispatch_examples() {
        let f = parse("[] false").unwrap();
        let v = decide(&f, Frame::Lin).unwrap();
        assert_eq!((v.status, v.route), (Status::Sat, Route::LinBoxFree));
        let v = decide(&f, Frame::Nat).unwrap();
        assert_eq!((v.status, v.route), (Status::Unsat, Route::NatLogspace));
        let full = parse("down x. <> [] @$x $x").unwrap();
        assert!(matches!(
            decide(&full, Frame::Lin),
            Err(DecideError::Unsupported { route: Route::UnsupportedNonelementary, .. })
        ));
    }

    #[test]
    fn witnesses_verify() {
        for (src, frame) in [
            ("[] false", Frame::Lin),
            ("down x. [] @$x $x", Frame::Nat),
            ("<> #i & @#i [] false", Frame::Lin),
            ("<> (#i & <> #j)", Frame::Nat),
            ("down x. <> [] @$x $x", Frame::Nat),
            ("[] @#i #j", Frame::Nat),
            ("down x. @$x p", Frame::Lin),
        ] {
            let f = parse(src).unwrap();
            let v = decide(&f, frame).unwrap();
            assert!(v.is_sat(), "{src}");
            assert!(verify_witness(&f, &v).unwrap(), "{src} over {frame}");
        }
    }

    #[test]
    fn verdict_json_shape() {
        let v = decide(&parse("[] false").unwrap(), Frame::Nat).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["verdict"], "unsat");
        assert_eq!(json["route"], "nat-logspace");
        assert_eq!(json["frame"], "nat");
    }
}
