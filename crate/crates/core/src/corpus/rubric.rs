use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RubricError {
    #[error("rubric JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("criterion `{code}` has {found} level descriptors, expected 5")]
    MissingLevelDescriptors { code: String, found: usize },
    #[error("criterion code `{0}` appears more than once")]
    DuplicateCriterionCode(String),
    #[error("criterion `{code}` names unknown element `{element}`")]
    UnknownElement { code: String, element: String },
    #[error("rubric has no criteria")]
    NoCriteria,
}

/// Aggregation bucket a criterion reports into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportingElement {
    Experiential,
    Conceptual,
    Analytical,
    Applied,
    Communication,
}

impl ReportingElement {
    pub const ALL: [ReportingElement; 5] = [
        ReportingElement::Experiential,
        ReportingElement::Conceptual,
        ReportingElement::Analytical,
        ReportingElement::Applied,
        ReportingElement::Communication,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReportingElement::Experiential => "Experiential",
            ReportingElement::Conceptual => "Conceptual",
            ReportingElement::Analytical => "Analytical",
            ReportingElement::Applied => "Applied",
            ReportingElement::Communication => "Communication",
        }
    }
}

impl fmt::Display for ReportingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReportingElement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReportingElement::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub code: String,
    pub name: String,
    pub definition: String,
    pub reviewer_advice: String,
    pub marker_words: Vec<String>,
    /// Descriptor for rating `k` lives at index `k - 1`.
    pub level_descriptors: [String; 5],
    pub element: ReportingElement,
}

impl Criterion {
    pub fn descriptor(&self, rating: u8) -> Option<&str> {
        (1..=5)
            .contains(&rating)
            .then(|| self.level_descriptors[rating as usize - 1].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rubric {
    pub id: String,
    pub name: String,
    pub criteria: Vec<Criterion>,
}

impl Rubric {
    pub fn criterion(&self, code: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.code == code)
    }

    pub fn validate(&self) -> Result<(), RubricError> {
        if self.criteria.is_empty() {
            return Err(RubricError::NoCriteria);
        }
        let mut seen = HashSet::new();
        for c in &self.criteria {
            if !seen.insert(c.code.as_str()) {
                return Err(RubricError::DuplicateCriterionCode(c.code.clone()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rubric serializes")
    }
}

#[derive(Deserialize)]
struct RawRubric {
    id: String,
    name: String,
    criteria: Vec<RawCriterion>,
}

#[derive(Deserialize)]
struct RawCriterion {
    code: String,
    name: String,
    definition: String,
    reviewer_advice: String,
    #[serde(default)]
    marker_words: Vec<String>,
    level_descriptors: Vec<String>,
    element: String,
}

/// Parse the rubric JSON format, keeping criteria in file order.
pub fn parse_rubric(source: &str) -> Result<Rubric, RubricError> {
    let raw: RawRubric = serde_json::from_str(source)?;
    let mut criteria = Vec::with_capacity(raw.criteria.len());
    for c in raw.criteria {
        let found = c.level_descriptors.len();
        let level_descriptors: [String; 5] =
            c.level_descriptors
                .try_into()
                .map_err(|_| RubricError::MissingLevelDescriptors {
                    code: c.code.clone(),
                    found,
                })?;
        let element = c
            .element
            .parse()
            .map_err(|element| RubricError::UnknownElement {
                code: c.code.clone(),
                element,
            })?;
        criteria.push(Criterion {
            code: c.code,
            name: c.name,
            definition: c.definition,
            reviewer_advice: c.reviewer_advice,
            marker_words: c.marker_words,
            level_descriptors,
            element,
        });
    }
    let rubric = Rubric {
        id: raw.id,
        name: raw.name,
        criteria,
    };
    rubric.validate()?;
    Ok(rubric)
}

const DEFAULT_RUBRIC_JSON: &str = include_str!("../../data/default_rubric.json");

/// The knowledge-processes rubric: four macro elements each split in two,
/// plus a communication criterion.
pub fn default_rubric() -> Rubric {
    parse_rubric(DEFAULT_RUBRIC_JSON).expect("bundled rubric is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::count_words;

    fn criterion_json(code: &str, descriptors: usize, element: &str) -> String {
        let levels: Vec<String> = (1..=descriptors).map(|i| format!("\"level {i}\"")).collect();
        format!(
            r#"{{"code":"{code}","name":"n","definition":"d","reviewer_advice":"a",
               "marker_words":["m"],"level_descriptors":[{}],"element":"{element}"}}"#,
            levels.join(",")
        )
    }

    fn rubric_json(criteria: &[String]) -> String {
        format!(r#"{{"id":"r","name":"R","criteria":[{}]}}"#, criteria.join(","))
    }

    #[test]
    fn parses_nine_criteria_in_order() {
        let codes = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];
        let src = rubric_json(
            &codes
                .iter()
                .map(|c| criterion_json(c, 5, "Conceptual"))
                .collect::<Vec<_>>(),
        );
        let r = parse_rubric(&src).unwrap();
        assert_eq!(r.criteria.len(), 9);
        let got: Vec<_> = r.criteria.iter().map(|c| c.code.as_str()).collect();
        assert_eq!(got, codes);
    }

    #[test]
    fn four_descriptors_rejected() {
        let src = rubric_json(&[criterion_json("X", 4, "applied")]);
        assert!(matches!(
            parse_rubric(&src),
            Err(RubricError::MissingLevelDescriptors { found: 4, .. })
        ));
    }

    #[test]
    fn duplicate_code_rejected() {
        let src = rubric_json(&[
            criterion_json("CON", 5, "conceptual"),
            criterion_json("CON", 5, "applied"),
        ]);
        assert!(matches!(
            parse_rubric(&src),
            Err(RubricError::DuplicateCriterionCode(c)) if c == "CON"
        ));
    }

    #[test]
    fn unknown_element_rejected() {
        let src = rubric_json(&[criterion_json("X", 5, "aesthetic")]);
        assert!(matches!(
            parse_rubric(&src),
            Err(RubricError::UnknownElement { element, .. }) if element == "aesthetic"
        ));
    }

    #[test]
    fn empty_rubric_rejected() {
        assert!(matches!(
            parse_rubric(&rubric_json(&[])),
            Err(RubricError::NoCriteria)
        ));
    }

    #[test]
    fn default_rubric_shape() {
        let r = default_rubric();
        assert_eq!(r.criteria.len(), 9);
        r.validate().unwrap();
        assert_eq!(
            r.criterion("analyzing-critically").unwrap().element,
            ReportingElement::Analytical
        );

        let expected = [
            ("experiencing-the-known", ReportingElement::Experiential),
            ("experiencing-the-new", ReportingElement::Experiential),
            ("conceptualizing-by-naming", ReportingElement::Conceptual),
            ("conceptualizing-with-theory", ReportingElement::Conceptual),
            ("analyzing-functionally", ReportingElement::Analytical),
            ("analyzing-critically", ReportingElement::Analytical),
            ("applying-appropriately", ReportingElement::Applied),
            ("applying-creatively", ReportingElement::Applied),
            ("communication", ReportingElement::Communication),
        ];
        let got: Vec<_> = r.criteria.iter().map(|c| (c.code.as_str(), c.element)).collect();
        assert_eq!(got, expected);

        for c in &r.criteria {
            assert!(c.level_descriptors.iter().all(|d| !d.is_empty()));
            assert!(!c.marker_words.is_empty());
            let words = count_words(&c.definition)
                + count_words(&c.reviewer_advice)
                + c.marker_words.len()
                + c.level_descriptors.iter().map(|d| count_words(d)).sum::<usize>();
            assert!((70..=160).contains(&words), "{}: {words} words", c.code);
        }
    }

    #[test]
    fn json_round_trip() {
        let r = default_rubric();
        assert_eq!(parse_rubric(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn element_names_case_insensitive() {
        assert_eq!("ANALYTICAL".parse(), Ok(ReportingElement::Analytical));
        assert_eq!(" applied ".parse(), Ok(ReportingElement::Applied));
        assert!("x".parse::<ReportingElement>().is_err());
    }
}
