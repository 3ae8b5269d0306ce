//! Category and layer axes used to classify entries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Position of an entry on the enterprise continuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    DomainNeutral,
    DomainSpecific,
    CompanySpecific,
}

impl Scope {
    pub const ALL: [Scope; 3] = [
        Scope::DomainNeutral,
        Scope::DomainSpecific,
        Scope::CompanySpecific,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::DomainNeutral => "domain-neutral",
            Scope::DomainSpecific => "domain-specific",
            Scope::CompanySpecific => "company-specific",
        }
    }
}

/// What kind of reuse an entry offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    BuildingBlock,
    DesignPattern,
    ReferenceModel,
    ApplicationModel,
}

impl EntryKind {
    pub const ALL: [EntryKind; 4] = [
        EntryKind::BuildingBlock,
        EntryKind::DesignPattern,
        EntryKind::ReferenceModel,
        EntryKind::ApplicationModel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::BuildingBlock => "building-block",
            EntryKind::DesignPattern => "design-pattern",
            EntryKind::ReferenceModel => "reference-model",
            EntryKind::ApplicationModel => "application-model",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scope::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scope {s:?}; expected one of domain-neutral, domain-specific, company-specific"))
    }
}

impl FromStr for EntryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntryKind::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown kind {s:?}; expected one of building-block, design-pattern, reference-model, application-model")
            })
    }
}

/// Scope × kind, written `scope/kind`, e.g. `domain-specific/reference-model`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Category {
    pub scope: Scope,
    pub kind: EntryKind,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.scope, self.kind)
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (scope, kind) = s
            .split_once('/')
            .ok_or_else(|| format!("category {s:?} must be written scope/kind"))?;
        Ok(Category {
            scope: scope.parse()?,
            kind: kind.parse()?,
        })
    }
}

/// Category filter: a scope alone matches every kind within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryFilter {
    pub scope: Scope,
    pub kind: Option<EntryKind>,
}

impl CategoryFilter {
    pub fn matches(&self, category: &Category) -> bool {
        self.scope == category.scope && self.kind.is_none_or(|k| k == category.kind)
    }
}

impl FromStr for CategoryFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some(_) => {
                let c: Category = s.parse()?;
                Ok(CategoryFilter {
                    scope: c.scope,
                    kind: Some(c.kind),
                })
            }
            None => Ok(CategoryFilter {
                scope: s.parse()?,
                kind: None,
            }),
        }
    }
}

impl fmt::Display for CategoryFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Some(kind) => write!(f, "{}/{}", self.scope, kind),
            None => write!(f, "{}", self.scope),
        }
    }
}

pub fn default_layers() -> Vec<String> {
    [
        "Strategy",
        "Business",
        "Application",
        "Technology",
        "Physical",
    ]
    .map(String::from)
    .to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_parses_and_prints() {
        let c: Category = "domain-specific/reference-model".parse().unwrap();
        assert_eq!(c.scope, Scope::DomainSpecific);
        assert_eq!(c.to_string(), "domain-specific/reference-model");
        assert!("domain-specific".parse::<Category>().is_err());
        assert!("galactic/reference-model".parse::<Category>().is_err());
    }

    #[test]
    fn scope_filter_matches_every_kind() {
        let f: CategoryFilter = "company-specific".parse().unwrap();
        for kind in EntryKind::ALL {
            assert!(f.matches(&Category {
                scope: Scope::CompanySpecific,
                kind
            }));
        }
        assert!(!f.matches(&Category {
            scope: Scope::DomainNeutral,
            kind: EntryKind::BuildingBlock
        }));
        let f: CategoryFilter = "company-specific/building-block".parse().unwrap();
        assert!(!f.matches(&Category {
            scope: Scope::CompanySpecific,
            kind: EntryKind::DesignPattern
        }));
    }
}
