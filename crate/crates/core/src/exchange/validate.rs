use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    /// Identifier of the offending node; the model id for root-level findings.
    pub node: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn first(&self) -> Option<&Finding> {
        self.findings.first()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", finding.node, finding.message)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Element,
    Relationship,
}

/// Checks every document invariant. Findings follow document order: root
/// first, then elements, then relationships.
pub fn validate_model(doc: &ModelDocument) -> ValidationReport {
    let mut findings = Vec::new();
    let mut push = |node: &str, message: String| {
        findings.push(Finding {
            severity: Severity::Error,
            node: node.to_string(),
            message,
        })
    };

    if doc.model_id.is_empty() {
        push("", "model identifier is empty".into());
    }
    for (field, value) in [
        ("model identifier", &doc.model_id),
        ("model name", &doc.name),
    ] {
        if let Some(c) = first_illegal_char(value) {
            push(
                &doc.model_id,
                format!(
                    "{field} contains character U+{:04X} not allowed in XML",
                    c as u32
                ),
            );
        }
    }
    for (key, value) in &doc.properties {
        if key.is_empty() {
            push(&doc.model_id, "property with empty key".into());
        }
        if let Some(c) = first_illegal_char(key).or_else(|| first_illegal_char(value)) {
            push(
                &doc.model_id,
                format!(
                    "property {key:?} contains character U+{:04X} not allowed in XML",
                    c as u32
                ),
            );
        }
    }

    let mut seen: HashMap<&str, NodeKind> = HashMap::new();
    for element in &doc.elements {
        if element.id.is_empty() {
            push(
                "",
                format!("element {:?} has an empty identifier", element.name),
            );
        } else if seen.insert(&element.id, NodeKind::Element).is_some() {
            push(&element.id, "duplicate identifier".into());
        }
        if element.kind.is_empty() {
            push(&element.id, "element has an empty type".into());
        }
        let strings = [&element.id, &element.kind, &element.name]
            .into_iter()
            .chain(element.documentation.as_ref());
        for value in strings {
            if let Some(c) = first_illegal_char(value) {
                push(
                    &element.id,
                    format!("character U+{:04X} not allowed in XML", c as u32),
                );
                break;
            }
        }
    }

    for rel in &doc.relationships {
        if rel.id.is_empty() {
            push(
                "",
                format!(
                    "relationship {} -> {} has an empty identifier",
                    rel.source, rel.target
                ),
            );
        } else if let Some(prior) = seen.insert(&rel.id, NodeKind::Relationship) {
            let what = match prior {
                NodeKind::Element => "identifier already used by an element",
                NodeKind::Relationship => "duplicate identifier",
            };
            push(&rel.id, what.into());
        }
        if rel.kind.is_empty() {
            push(&rel.id, "relationship has an empty type".into());
        }
        let strings = [&rel.id, &rel.kind, &rel.source, &rel.target]
            .into_iter()
            .chain(rel.name.as_ref());
        for value in strings {
            if let Some(c) = first_illegal_char(value) {
                push(
                    &rel.id,
                    format!("character U+{:04X} not allowed in XML", c as u32),
                );
                break;
            }
        }
    }

    // Endpoints are checked after all identifiers are known so that forward
    // references to relationships are classified correctly.
    let elements: HashMap<&str, ()> = doc.elements.iter().map(|e| (e.id.as_str(), ())).collect();
    let relationships: HashMap<&str, ()> = doc
        .relationships
        .iter()
        .map(|r| (r.id.as_str(), ()))
        .collect();
    for rel in &doc.relationships {
        for (end, id) in [("source", &rel.source), ("target", &rel.target)] {
            if elements.contains_key(id.as_str()) {
                continue;
            }
            if id.is_empty() {
                push(&rel.id, format!("{end} is empty"));
            } else if relationships.contains_key(id.as_str()) {
                push(
                    &rel.id,
                    format!("{end} {id:?} is a relationship; endpoints must be elements"),
                );
            } else {
                push(
                    &rel.id,
                    format!("{end} {id:?} does not identify an element"),
                );
            }
        }
    }

    ValidationReport { findings }
}

fn first_illegal_char(s: &str) -> Option<char> {
    s.chars().find(|&c| {
        !matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
    })
}
