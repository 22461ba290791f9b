use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::formula::Formula;

/// A directed line graph with two designated vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdInstance {
    pub vertices: Vec<String>,
    pub successor: Vec<(String, String)>,
    pub s: String,
    pub t: String,
}

fn valid_name(x: &str) -> bool {
    !x.is_empty() && x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl OrdInstance {
    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        let o: OrdInstance = serde_json::from_str(text).map_err(|e| ReductionError::Syntax {
            offset: 0,
            expected: format!("an ORD JSON object ({e})"),
        })?;
        o.validate()?;
        Ok(o)
    }

    /// Checks that `(V,S)` is a single chain through every vertex.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |m: String| Err(ReductionError::NotLineGraph(m));
        if let Some(x) = self.vertices.iter().find(|x| !valid_name(x)) {
            return Err(ReductionError::BadName(x.clone()));
        }
        let set: BTreeSet<&String> = self.vertices.iter().collect();
        if set.len() != self.vertices.len() {
            return bad("duplicate vertex".into());
        }
        if self.vertices.is_empty() {
            return bad("no vertices".into());
        }
        for x in [&self.s, &self.t] {
            if !set.contains(x) {
                return bad(format!("{x:?} is not a vertex"));
            }
        }
        let mut succ = BTreeMap::new();
        let mut pred = BTreeMap::new();
        for (a, b) in &self.successor {
            if !set.contains(a) || !set.contains(b) {
                return bad(format!("edge ({a},{b}) leaves the vertex set"));
            }
            if succ.insert(a, b).is_some() {
                return bad(format!("{a:?} has two successors"));
            }
            if pred.insert(b, a).is_some() {
                return bad(format!("{b:?} has two predecessors"));
            }
        }
        if self.successor.len() + 1 != self.vertices.len() {
            return bad("not a single chain".into());
        }
        let Some(mut cur) = self.vertices.iter().find(|v| !pred.contains_key(v)) else {
            return bad("cycle".into());
        };
        let mut seen = 1;
        while let Some(next) = succ.get(cur) {
            cur = next;
            seen += 1;
            if seen > self.vertices.len() {
                return bad("cycle".into());
            }
        }
        if seen != self.vertices.len() {
            return bad("not a single chain".into());
        }
        Ok(())
    }

    /// `s <=_S t`, by walking successors from `s`.
    pub fn holds(&self) -> Result<bool, ReductionError> {
        self.validate()?;
        let succ: BTreeMap<&String, &String> = self.successor.iter().map(|(a, b)| (a, b)).collect();
        let mut cur = &self.s;
        loop {
            if cur == &self.t {
                return Ok(true);
            }
            match succ.get(cur) {
                Some(next) => cur = next,
                None => return Ok(false),
            }
        }
    }
}

/// `down v0 ... down vn. [] down s. alpha^n @s t`, where `alpha` chains
/// `@vk down vl` over the edges not ending in `s`. Vertices are state
/// variables under their own names.
pub fn encode_ord(o: &OrdInstance) -> Result<Formula, ReductionError> {
    o.validate()?;
    let n = o.vertices.len() - 1;
    let alpha: Vec<&(String, String)> = o.successor.iter().filter(|(_, l)| l != &o.s).collect();
    let mut body = Formula::at_var(&o.s, Formula::var(&o.t));
    for _ in 0..n {
        for (k, l) in alpha.iter().rev() {
            body = Formula::at_var(k, Formula::down(l.clone(), body));
        }
    }
    let mut f = Formula::boxed(Formula::down(o.s.clone(), body));
    for v in o.vertices.iter().rev() {
        f = Formula::down(v.clone(), f);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn chain(s: &str, t: &str) -> OrdInstance {
        OrdInstance {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            successor: vec![("a".into(), "b".into()), ("b".into(), "c".into())],
            s: s.into(),
            t: t.into(),
        }
    }

    #[test]
    fn oracle() {
        assert!(chain("a", "c").holds().unwrap());
        assert!(!chain("c", "a").holds().unwrap());
        assert!(chain("b", "b").holds().unwrap());
    }

    #[test]
    fn encoding_shape() {
        let f = encode_ord(&chain("a", "c")).unwrap();
        let expected = parse(
            "down a. down b. down c. [] down a. @$a down b. @$b down c. @$a down b. @$b down c. @$a $c",
        )
        .unwrap();
        assert_eq!(f, expected);
        let f = encode_ord(&chain("b", "a")).unwrap();
        let expected = parse("down a. down b. down c. [] down b. @$b down c. @$b down c. @$b $a").unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn json_and_validation() {
        let o = OrdInstance::from_json(r#"{"vertices":["a","b","c"],"successor":[["a","b"],["b","c"]],"s":"a","t":"c"}"#)
            .unwrap();
        assert_eq!(o, chain("a", "c"));
        let mut bad = chain("a", "c");
        bad.successor.push(("c".into(), "a".into()));
        assert!(matches!(bad.validate(), Err(ReductionError::NotLineGraph(_))));
        let mut bad = chain("a", "c");
        bad.successor.pop();
        assert!(matches!(bad.validate(), Err(ReductionError::NotLineGraph(_))));
        let mut bad = chain("a", "z");
        bad.t = "z".into();
        assert!(bad.validate().is_err());
        let two_parts = OrdInstance {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            successor: vec![("a".into(), "b".into()), ("b".into(), "a".into())],
            s: "a".into(),
            t: "a".into(),
        };
        assert!(two_parts.validate().is_err());
    }
}
