//! Tree specification documents.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::trees::{AutomaticTree, Builtin, TreeSource, TruncatedTree};
use crate::weights::Dyadic;
use serde::{Deserialize, Serialize};

/// The JSON form of a tree presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TreeSpec {
    Explicit {
        depth: u32,
        members: Vec<BitString>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Dyadic>,
    },
    Automatic {
        states: usize,
        start: usize,
        transitions: Vec<[usize; 2]>,
        accepting: Vec<usize>,
    },
}

/// A parsed presentation.
#[derive(Clone, Debug)]
pub enum SpecSource {
    Builtin(Builtin),
    Explicit(TruncatedTree),
    Automatic(AutomaticTree),
}

impl TreeSpec {
    pub fn builtin(name: &str) -> Self {
        TreeSpec::Builtin { name: name.to_string(), c: None }
    }

    pub fn build(&self) -> Result<SpecSource> {
        match self {
            TreeSpec::Explicit { depth, members } => {
                Ok(SpecSource::Explicit(TruncatedTree::new(*depth, members.iter().cloned())?))
            }
            TreeSpec::Builtin { name, c } => match (name.as_str(), c) {
                ("dyadic", Some(c)) => Ok(SpecSource::Builtin(Builtin::dyadic(c)?)),
                ("dyadic", None) => Err(Error::Parse("builtin dyadic tree needs a measure c".into())),
                (other, None) => Ok(SpecSource::Builtin(Builtin::parse(other)?)),
                (other, Some(_)) => Err(Error::Parse(format!("builtin {other:?} takes no parameter"))),
            },
            TreeSpec::Automatic { states, start, transitions, accepting } => {
                if transitions.len() != *states {
                    return Err(Error::Parse(format!(
                        "automaton declares {states} states but has {} transition rows",
                        transitions.len()
                    )));
                }
                let mut acc = vec![false; *states];
                for &a in accepting {
                    *acc.get_mut(a).ok_or_else(|| Error::Parse(format!("accepting state {a} out of range")))? = true;
                }
                Ok(SpecSource::Automatic(AutomaticTree::new(*start, transitions.clone(), acc)?))
            }
        }
    }
}

/// A JSON document, or a bare builtin name such as `full` or `dyadic:3/4`.
pub fn parse_spec(text: &str) -> Result<SpecSource> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let spec: TreeSpec = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()
    } else {
        Ok(SpecSource::Builtin(Builtin::parse(trimmed)?))
    }
}

impl SpecSource {
    fn inner(&self) -> &dyn TreeSource {
        match self {
            SpecSource::Builtin(b) => b,
            SpecSource::Explicit(t) => t,
            SpecSource::Automatic(a) => a,
        }
    }
}

impl TreeSource for SpecSource {
    fn member(&self, s: &BitString) -> bool {
        self.inner().member(s)
    }

    fn extendible(&self, s: &BitString) -> Option<bool> {
        self.inner().extendible(s)
    }

    fn node_class(&self, s: &BitString) -> Option<u64> {
        self.inner().node_class(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_full() {
        let t = parse_spec(r#"{"kind":"builtin","name":"full"}"#).unwrap();
        assert_eq!(t.extendible(&"0110".parse().unwrap()), Some(true));
        assert!(parse_spec("full").is_ok());
    }

    #[test]
    fn explicit_members() {
        let t = parse_spec(r#"{"kind":"explicit","depth":2,"members":["⟨⟩","0","00","01"]}"#).unwrap();
        assert!(t.member(&"01".parse().unwrap()));
        assert!(!t.member(&"1".parse().unwrap()));
    }

    #[test]
    fn explicit_not_prefix_closed() {
        let r = parse_spec(r#"{"kind":"explicit","depth":2,"members":["","01"]}"#);
        assert!(matches!(r, Err(Error::NotPrefixClosed { witness }) if witness.to_string() == "01"));
    }

    #[test]
    fn dyadic_builtin_with_parameter() {
        let t = parse_spec(r#"{"kind":"builtin","name":"dyadic","c":"3/4"}"#).unwrap();
        assert!(t.member(&"10".parse().unwrap()));
        assert!(!t.member(&"11".parse().unwrap()));
    }

    #[test]
    fn automatic_spec() {
        let doc = r#"{"kind":"automatic","states":2,"start":0,"transitions":[[0,1],[1,1]],"accepting":[0]}"#;
        let t = parse_spec(doc).unwrap();
        assert!(t.member(&"000".parse().unwrap()));
        assert!(!t.member(&"01".parse().unwrap()));
        assert!(parse_spec(r#"{"kind":"automatic","states":1,"start":0,"transitions":[[0,0]],"accepting":[3]}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let s = TreeSpec::Explicit { depth: 1, members: vec![BitString::empty(), "1".parse().unwrap()] };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<TreeSpec>(&j).unwrap(), s);
    }
}
