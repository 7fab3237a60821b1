//! Canonical JSON formats.
//!
//! ```text
//! ConceptClass    {"instances": ["a","b"], "concepts": [{"name":"h1","labels":[0,1]}]}
//! PatternClass    {"instances": ["a"], "horizon": 2, "patterns": [[["a",0],["a",1]]]}
//! PiecewiseStream {"horizon": 2.0, "segments": [{"start":0.0,"end":2.0,"x":"a","y":0}]}
//! ```
//!
//! Parsing always validates; a value that parses is a valid value.

use serde::{Deserialize, Serialize};

use super::{
    Concept, ConceptClass, DiscretePattern, InstanceSpace, Label, PatternClass, PiecewiseStream,
    Validate, Violation,
};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ConceptClassJson {
    instances: Vec<String>,
    concepts: Vec<Concept>,
}

/// Pattern class file. `budget` is only meaningful to the query solvers.
#[derive(Serialize, Deserialize)]
pub struct PatternClassJson {
    pub instances: Vec<String>,
    pub horizon: usize,
    pub patterns: Vec<Vec<(String, Label)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
}

impl ConceptClass {
    pub fn from_json(s: &str) -> Result<ConceptClass> {
        let raw: ConceptClassJson = serde_json::from_str(s)?;
        let class = ConceptClass {
            space: InstanceSpace::new(raw.instances),
            concepts: raw.concepts,
        };
        class.check()?;
        Ok(class)
    }

    pub fn to_json(&self) -> String {
        let raw = ConceptClassJson {
            instances: self.space.ids().to_vec(),
            concepts: self.concepts.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("concept class serializes")
    }
}

impl PatternClassJson {
    pub fn into_class(self) -> Result<PatternClass> {
        let space = InstanceSpace::new(self.instances);
        let mut unknown = Vec::new();
        let patterns = self
            .patterns
            .into_iter()
            .map(|steps| DiscretePattern {
                steps: steps
                    .into_iter()
                    .filter_map(|(x, y)| match space.lookup(&x) {
                        Some(id) => Some((id, y)),
                        None => {
                            unknown.push(Violation(format!("instance not in space: {x:?}")));
                            None
                        }
                    })
                    .collect(),
            })
            .collect();
        if !unknown.is_empty() {
            return Err(Error::Invalid(unknown));
        }
        let class = PatternClass {
            space,
            horizon: self.horizon,
            patterns,
        };
        class.check()?;
        Ok(class)
    }

    pub fn from_class(class: &PatternClass) -> PatternClassJson {
        PatternClassJson {
            instances: class.space.ids().to_vec(),
            horizon: class.horizon,
            patterns: class
                .patterns
                .iter()
                .map(|p| {
                    p.steps
                        .iter()
                        .map(|&(x, y)| (class.space.name(x).to_owned(), y))
                        .collect()
                })
                .collect(),
            budget: None,
        }
    }
}

impl PatternClass {
    pub fn from_json(s: &str) -> Result<PatternClass> {
        serde_json::from_str::<PatternClassJson>(s)?.into_class()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PatternClassJson::from_class(self))
            .expect("pattern class serializes")
    }
}

impl PiecewiseStream {
    pub fn from_json(s: &str) -> Result<PiecewiseStream> {
        let stream: PiecewiseStream = serde_json::from_str(s)?;
        stream.check()?;
        Ok(stream)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stream serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concept_class_format() {
        let s = r#"{"instances":["a","b"],"concepts":[{"name":"h1","labels":[0,1]},{"name":"h2","labels":[1,1]}]}"#;
        let h = ConceptClass::from_json(s).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.concepts[0].labels, vec![Label::Zero, Label::One]);
        assert_eq!(ConceptClass::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn empty_concepts_rejected() {
        let err = ConceptClass::from_json(r#"{"instances":["a"],"concepts":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)), "{err}");
    }

    #[test]
    fn non_binary_label_rejected() {
        let err = ConceptClass::from_json(
            r#"{"instances":["a"],"concepts":[{"name":"h","labels":[2]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Json(_)));
    }

    #[test]
    fn pattern_class_format() {
        let s = r#"{"instances":["a","b"],"horizon":2,"patterns":[[["a",0],["b",1]],[["b",1],["b",1]]],"budget":1}"#;
        let raw: PatternClassJson = serde_json::from_str(s).unwrap();
        assert_eq!(raw.budget, Some(1));
        let p = raw.into_class().unwrap();
        assert_eq!(p.horizon, 2);
        assert_eq!(PatternClass::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn pattern_unknown_instance() {
        let s = r#"{"instances":["a"],"horizon":1,"patterns":[[["z",0]]]}"#;
        let err = PatternClass::from_json(s).unwrap_err();
        assert!(err.to_string().contains("\"z\""), "{err}");
    }

    #[test]
    fn stream_format() {
        let s = r#"{"horizon":2.5,"segments":[{"start":0.0,"end":1.5,"x":"a","y":0},{"start":1.5,"end":2.5,"x":"b","y":1}]}"#;
        let st = PiecewiseStream::from_json(s).unwrap();
        assert_eq!(st.segments[1].x, "b");
        assert_eq!(PiecewiseStream::from_json(&st.to_json()).unwrap(), st);
        let gap = r#"{"horizon":3,"segments":[{"start":0,"end":1,"x":"a","y":0},{"start":2,"end":3,"x":"a","y":0}]}"#;
        assert!(PiecewiseStream::from_json(gap).is_err());
    }
}
