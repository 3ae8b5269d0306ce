//! XML model exchange format.
//!
//! Every model stored in the library travels as a small subset of the
//! ArchiMate exchange file format: a `model` root with `elements`,
//! `relationships` and an optional `properties` list. Views, diagrams and
//! relationships that point at other relationships are rejected. The
//! supported grammar is described in `docs/exchange-format.md`.

mod reader;
mod validate;
mod writer;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use reader::parse_model;
pub use validate::{validate_model, Finding, Severity, ValidationReport};
pub use writer::serialize_model;

/// Content type used for model payloads on the wire.
pub const CONTENT_TYPE: &str = "application/xml";

/// Root property naming the element that acts as the model's boundary when
/// it replaces a placeholder inside a composite.
pub const INTERFACE_PROPERTY: &str = "interface";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelElement {
    pub id: String,
    pub kind: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub documentation: Option<String>,
}

impl ModelElement {
    pub fn new(id: impl Into<String>, kind: impl Into<String>, name: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            name: name.into(),
            documentation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRelationship {
    pub id: String,
    pub kind: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ModelRelationship {
    pub fn new(
        id: impl Into<String>,
        kind: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            source: source.into(),
            target: target.into(),
            name: None,
        }
    }
}

/// A parsed model: typed elements and typed relationships between them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub model_id: String,
    pub name: String,
    pub elements: Vec<ModelElement>,
    pub relationships: Vec<ModelRelationship>,
    #[serde(default)]
    pub properties: BTreeMap<String, String>,
}

impl ModelDocument {
    pub fn new(model_id: impl Into<String>, name: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn element(&self, id: &str) -> Option<&ModelElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Element that stands in for the whole model when it is substituted
    /// for a placeholder: the one named by the `interface` property, or the
    /// first element in document order.
    pub fn boundary_element(&self) -> Option<&ModelElement> {
        match self.properties.get(INTERFACE_PROPERTY) {
            Some(id) => self.element(id),
            None => self.elements.first(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.relationships.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("malformed XML at byte {offset}: {message}")]
    MalformedXml { offset: u64, message: String },
    #[error("unsupported encoding {0:?}: only UTF-8 is accepted")]
    UnsupportedEncoding(String),
    #[error("schema violation at {node}: {message}")]
    SchemaViolation { node: String, message: String },
    #[error("model violates its invariants: {0}")]
    InvariantViolation(ValidationReport),
}
