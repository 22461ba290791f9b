use std::collections::BTreeMap;

use super::{DecideError, Frame, Options, PartialAssignment, Route, Status, Verdict, Witness};
use crate::fol::{
    bounded_oracle_bound, close_sentence, decide_at_with_limit, qe_decide_with_limit, FolError, FolFormula, Term,
};
use crate::formula::{normalize_with_map, rename_apart, Formula};

/// Over the naturals, any monotone fragment: decides the closing sentence
/// of the standard translation by quantifier elimination.
pub fn decide_nat_qe(f: &Formula) -> Result<Verdict, DecideError> {
    decide_nat_qe_with(f, &Options::default())
}

pub fn decide_nat_qe_with(f: &Formula, opts: &Options) -> Result<Verdict, DecideError> {
    // Nominals always become variables here so that first-order names
    // cannot collide.
    let (g, noms) = normalize_with_map(f, true)?;
    let g = rename_apart(&g);
    let sentence = close_sentence(&g)?;
    let unknown = || Verdict { status: Status::Unknown, route: Route::NatQe, frame: Frame::Nat, witness: None };
    let sat = match qe_decide_with_limit(&sentence, opts.qe_limit) {
        Ok(b) => b,
        Err(FolError::ResourceLimit { .. }) => return Ok(unknown()),
        Err(e) => return Err(e.into()),
    };
    let witness = if sat && opts.witness { extract_witness(&g, &noms, opts)? } else { None };
    Ok(Verdict::new(sat, Route::NatQe, Frame::Nat, witness))
}

/// Fixes the free variables one at a time to the least value keeping the
/// closing sentence true, then looks for an evaluation state.
fn extract_witness(
    g: &Formula,
    noms: &BTreeMap<String, String>,
    opts: &Options,
) -> Result<Option<Witness>, DecideError> {
    let sentence = close_sentence(g)?;
    let bound = bounded_oracle_bound(&sentence) + g.size() as u64;
    let free: Vec<String> = g.free_svars().into_iter().collect();
    let mut fixed = PartialAssignment::default();
    for (k, x) in free.iter().enumerate() {
        let mut found = None;
        for v in 0..=bound {
            let mut s = sentence.clone();
            // Peel the leading existentials of the variables fixed so far.
            for _ in 0..=k {
                if let FolFormula::Exists(_, body) = s {
                    s = *body;
                }
            }
            for (y, &val) in fixed.0.iter().chain([(x, &v)]) {
                s = s.substitute(y, &Term::Num(val));
            }
            match qe_decide_with_limit(&s, opts.qe_limit) {
                Ok(true) => {
                    found = Some(v);
                    break;
                }
                Ok(false) => {}
                Err(FolError::ResourceLimit { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            }
        }
        match found {
            Some(v) => fixed.insert(x.clone(), v),
            None => return Ok(None),
        }
    }
    let horizon = fixed.n_g() + g.size() as u64 + 1;
    let mut state = None;
    for n in 0..=horizon {
        match decide_at_with_limit(g, &fixed, n, opts.qe_limit) {
            Ok(true) => {
                state = Some(n);
                break;
            }
            Ok(false) => {}
            Err(FolError::ResourceLimit { .. }) => break,
            Err(e) => return Err(e.into()),
        }
    }
    let by_var: BTreeMap<&String, &String> = noms.iter().map(|(i, v)| (v, i)).collect();
    let mut assignment = PartialAssignment::default();
    let mut valuation = BTreeMap::new();
    for (x, v) in fixed.0 {
        match by_var.get(&x) {
            Some(i) => {
                valuation.insert((*i).clone(), v);
            }
            None => assignment.insert(x, v),
        }
    }
    Ok(Some(Witness { assignment: Some(assignment), valuation: Some(valuation), model: None, state }))
}
