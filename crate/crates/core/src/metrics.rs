//! Generated complexity and connectivity ratings.
//!
//! Complexity counts components (elements plus relationships); connectivity
//! is the mean number of relationship endpoints per element. Both map onto a
//! three-level scale with closed middle bands: 20..=40 components is
//! Moderate, a mean degree in 2..=3 is Average.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exchange::ModelDocument;

pub const MODERATE_MIN_COMPONENTS: u64 = 20;
pub const MODERATE_MAX_COMPONENTS: u64 = 40;
pub const AVERAGE_MIN_DEGREE: u64 = 2;
pub const AVERAGE_MAX_DEGREE: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComplexityRating {
    Easy,
    Moderate,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConnectivityRating {
    Simple,
    Average,
    Difficult,
}

impl fmt::Display for ComplexityRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for ConnectivityRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityScore {
    pub component_count: u64,
    pub rating: ComplexityRating,
}

impl ComplexityScore {
    pub fn from_count(component_count: u64) -> Self {
        let rating = if component_count < MODERATE_MIN_COMPONENTS {
            ComplexityRating::Easy
        } else if component_count <= MODERATE_MAX_COMPONENTS {
            ComplexityRating::Moderate
        } else {
            ComplexityRating::Complex
        };
        Self {
            component_count,
            rating,
        }
    }
}

/// Mean degree kept as the exact fraction `endpoint_sum / element_count` so
/// that band boundaries compare without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityScore {
    pub endpoint_sum: u64,
    pub element_count: u64,
    pub rating: ConnectivityRating,
}

impl ConnectivityScore {
    pub fn from_degree_sum(endpoint_sum: u64, element_count: u64) -> Result<Self, MetricsError> {
        if element_count == 0 {
            return Err(MetricsError::EmptyModel);
        }
        let rating = if endpoint_sum < AVERAGE_MIN_DEGREE * element_count {
            ConnectivityRating::Simple
        } else if endpoint_sum <= AVERAGE_MAX_DEGREE * element_count {
            ConnectivityRating::Average
        } else {
            ConnectivityRating::Difficult
        };
        Ok(Self {
            endpoint_sum,
            element_count,
            rating,
        })
    }

    pub fn mean_degree(&self) -> f64 {
        self.endpoint_sum as f64 / self.element_count as f64
    }

    /// Mean degree rounded to two decimals, for display.
    pub fn display_degree(&self) -> String {
        format!("{:.2}", self.mean_degree())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("model has no elements; mean degree is undefined")]
    EmptyModel,
}

pub fn complexity_score(doc: &ModelDocument) -> ComplexityScore {
    ComplexityScore::from_count((doc.elements.len() + doc.relationships.len()) as u64)
}

pub fn connectivity_score(doc: &ModelDocument) -> Result<ConnectivityScore, MetricsError> {
    // Each relationship contributes one endpoint per end that lands on an
    // element; a self-loop therefore counts twice for its element.
    let endpoints = doc
        .relationships
        .iter()
        .flat_map(|r| [&r.source, &r.target])
        .filter(|id| doc.element(id).is_some())
        .count();
    ConnectivityScore::from_degree_sum(endpoints as u64, doc.elements.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "advice", rename_all = "lowercase")]
pub enum Advice {
    None,
    Subdivide { reason: String },
}

impl fmt::Display for Advice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Advice::None => f.write_str("none"),
            Advice::Subdivide { .. } => f.write_str("subdivide"),
        }
    }
}

/// Suggests splitting a model into sub-models when it is too complex or its
/// elements are too densely connected. A model without elements has no
/// connectivity score and is judged on complexity alone.
pub fn decomposition_advice(
    complexity: &ComplexityScore,
    connectivity: Option<&ConnectivityScore>,
) -> Advice {
    let complex = complexity.rating == ComplexityRating::Complex;
    let difficult = connectivity.is_some_and(|k| k.rating == ConnectivityRating::Difficult);
    let reason = match (complex, difficult) {
        (false, false) => return Advice::None,
        (true, false) => format!(
            "{} components exceed {}; split into sub-models or structure hierarchically",
            complexity.component_count, MODERATE_MAX_COMPONENTS
        ),
        (false, true) => format!(
            "mean degree {} exceeds {}; split into sub-models or structure hierarchically",
            connectivity.map(|k| k.display_degree()).unwrap_or_default(),
            AVERAGE_MAX_DEGREE
        ),
        (true, true) => format!(
            "{} components and mean degree {} are both above range; split into sub-models or structure hierarchically",
            complexity.component_count,
            connectivity.map(|k| k.display_degree()).unwrap_or_default()
        ),
    };
    Advice::Subdivide { reason }
}

/// Scores of a single document, as printed by the `metrics` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub complexity: ComplexityScore,
    pub connectivity: Option<ConnectivityScore>,
    pub advice: Advice,
}

impl MetricsReport {
    pub fn of(doc: &ModelDocument) -> Self {
        let complexity = complexity_score(doc);
        let connectivity = connectivity_score(doc).ok();
        let advice = decomposition_advice(&complexity, connectivity.as_ref());
        Self {
            complexity,
            connectivity,
            advice,
        }
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "count={} complexity={} ",
            self.complexity.component_count, self.complexity.rating
        )?;
        match &self.connectivity {
            Some(k) => write!(
                f,
                "mean_degree={} connectivity={} ",
                k.display_degree(),
                k.rating
            )?,
            None => f.write_str("mean_degree=undefined connectivity=undefined ")?,
        }
        write!(f, "advice={}", self.advice)
    }
}
