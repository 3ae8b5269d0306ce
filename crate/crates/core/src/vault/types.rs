use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::exchange::ModelDocument;
use crate::lifecycle::{FeedbackComment, LifecycleState, LifecycleStatus};
use crate::metrics::{ComplexityScore, ConnectivityScore};
use crate::taxonomy::Category;

/// 26-character Crockford base32 ULID; lexicographic order follows creation
/// order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntryId(String);

impl EntryId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn from_ulid(id: ulid::Ulid) -> Self {
        Self(id.to_string())
    }
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for EntryId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ulid::Ulid::from_string(s)
            .map(|u| EntryId(u.to_string()))
            .map_err(|_| format!("{s:?} is not a valid entry id"))
    }
}

impl AsRef<str> for EntryId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A concrete `(entry, variant, version)` triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VersionRef {
    pub entry: EntryId,
    pub variant: String,
    pub version: u32,
}

impl VersionRef {
    pub fn new(entry: EntryId, variant: impl Into<String>, version: u32) -> Self {
        Self {
            entry,
            variant: variant.into(),
            version,
        }
    }
}

impl fmt::Display for VersionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.entry, self.variant, self.version)
    }
}

impl FromStr for VersionRef {
    type Err = String;

    /// Parses `ENTRY:VARIANT:VERSION`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(3, ':');
        let (Some(entry), Some(variant), Some(version)) =
            (parts.next(), parts.next(), parts.next())
        else {
            return Err(format!("{s:?} must be written ENTRY:VARIANT:VERSION"));
        };
        Ok(VersionRef {
            entry: entry.parse()?,
            variant: variant.to_string(),
            version: version
                .parse()
                .map_err(|_| format!("bad version number in {s:?}"))?,
        })
    }
}

/// Catalog record: generated attributes plus the mandatory core meta-data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryMaster {
    pub id: EntryId,
    pub title: String,
    pub category: Category,
    pub layer: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub keywords: BTreeSet<String>,
    pub responsible_authors: BTreeSet<String>,
    pub is_composite: bool,
    pub created_at: DateTime<Utc>,
}

/// Core attributes supplied when creating an entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewEntry {
    pub title: String,
    pub category: Category,
    pub layer: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: BTreeSet<String>,
    pub responsible_authors: BTreeSet<String>,
    #[serde(default)]
    pub optional_info: OptionalInfo,
    #[serde(default)]
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stakeholder {
    pub name: String,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependencyRef {
    Entry(EntryId),
    Text(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionalInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub application_context: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stakeholders: Vec<Stakeholder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capabilities: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limitations: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dependencies: Vec<DependencyRef>,
    /// Building blocks applied in this entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bricks: Vec<EntryId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants_links: Vec<EntryId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<String>,
}

impl OptionalInfo {
    /// Every entry id this record points at.
    pub fn entry_refs(&self) -> impl Iterator<Item = &EntryId> {
        let deps = self.dependencies.iter().filter_map(|d| match d {
            DependencyRef::Entry(id) => Some(id),
            DependencyRef::Text(_) => None,
        });
        deps.chain(&self.bricks).chain(&self.variants_links)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    Qualification,
    Effectivity,
    Alternate,
}

impl FromStr for ConditionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qualification" => Ok(ConditionKind::Qualification),
            "effectivity" => Ok(ConditionKind::Effectivity),
            "alternate" => Ok(ConditionKind::Alternate),
            _ => Err(format!("unknown condition kind {s:?}")),
        }
    }
}

/// Stored as-is; conditions are never evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub kind: ConditionKind,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Link,
    Replace,
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "link" => Ok(RelationKind::Link),
            "replace" => Ok(RelationKind::Replace),
            _ => Err(format!(
                "unknown relation kind {s:?}; expected link or replace"
            )),
        }
    }
}

/// A pinned reference from a composite to another entry's version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeRelation {
    pub kind: RelationKind,
    pub target: VersionRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placeholder: Option<String>,
}

/// A relation as requested by a caller; variant and version must both be
/// given for it to resolve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub kind: RelationKind,
    pub target_entry: EntryId,
    #[serde(default)]
    pub target_variant: Option<String>,
    #[serde(default)]
    pub target_version: Option<u32>,
    #[serde(default)]
    pub placeholder: Option<String>,
}

impl RelationSpec {
    pub fn link(target: &VersionRef) -> Self {
        Self {
            kind: RelationKind::Link,
            target_entry: target.entry.clone(),
            target_variant: Some(target.variant.clone()),
            target_version: Some(target.version),
            placeholder: None,
        }
    }

    pub fn replace(target: &VersionRef, placeholder: impl Into<String>) -> Self {
        Self {
            kind: RelationKind::Replace,
            placeholder: Some(placeholder.into()),
            ..Self::link(target)
        }
    }
}

impl FromStr for RelationSpec {
    type Err = String;

    /// `ENTRY[:VARIANT[:VERSION]]` for a link, with `@PLACEHOLDER` appended
    /// for a replacement.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (target, placeholder) = match s.split_once('@') {
            Some((t, p)) => (t, Some(p.to_string())),
            None => (s, None),
        };
        let mut parts = target.splitn(3, ':');
        let target_entry = parts.next().unwrap_or_default().parse()?;
        let target_variant = parts.next().map(str::to_string);
        let target_version = parts
            .next()
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("bad version number in {s:?}"))
            })
            .transpose()?;
        Ok(RelationSpec {
            kind: if placeholder.is_some() {
                RelationKind::Replace
            } else {
                RelationKind::Link
            },
            target_entry,
            target_variant,
            target_version,
            placeholder,
        })
    }
}

/// One numbered revision within a variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryVersion {
    pub version_number: u32,
    pub created_at: DateTime<Utc>,
    pub status: LifecycleStatus,
    /// The model payload; for composites, the optional parent shell. Stored
    /// separately as `model.xml`.
    #[serde(skip)]
    pub model: Option<ModelDocument>,
    pub complexity: ComplexityScore,
    pub connectivity: Option<ConnectivityScore>,
    #[serde(default)]
    pub optional_info: OptionalInfo,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    #[serde(default)]
    pub relations: Vec<CompositeRelation>,
    pub predecessor: Option<u32>,
    #[serde(default)]
    pub feedback: Vec<FeedbackComment>,
}

impl EntryVersion {
    pub fn state(&self) -> LifecycleState {
        self.status.state
    }

    pub fn is_draft(&self) -> bool {
        self.status.state == LifecycleState::Draft
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantOrigin {
    pub variant: String,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub variant_id: String,
    pub origin: Option<VariantOrigin>,
    pub created_at: DateTime<Utc>,
    #[serde(skip)]
    pub versions: Vec<EntryVersion>,
}

impl Variant {
    pub fn version(&self, number: u32) -> Option<&EntryVersion> {
        number
            .checked_sub(1)
            .and_then(|i| self.versions.get(i as usize))
    }

    pub fn latest(&self) -> Option<&EntryVersion> {
        self.versions.last()
    }
}

/// An entry master with all of its variants and versions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub master: EntryMaster,
    pub variants: Vec<Variant>,
}

impl Entry {
    pub fn variant(&self, id: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.variant_id == id)
    }

    pub(crate) fn variant_mut(&mut self, id: &str) -> Option<&mut Variant> {
        self.variants.iter_mut().find(|v| v.variant_id == id)
    }

    pub fn versions(&self) -> impl Iterator<Item = (&Variant, &EntryVersion)> {
        self.variants
            .iter()
            .flat_map(|variant| variant.versions.iter().map(move |v| (variant, v)))
    }

    pub fn version_ref(&self, variant: &Variant, version: &EntryVersion) -> VersionRef {
        VersionRef::new(
            self.master.id.clone(),
            variant.variant_id.clone(),
            version.version_number,
        )
    }

    /// True when the entry has versions and every one of them is Invalid.
    pub fn is_invalid_only(&self) -> bool {
        let mut versions = self.versions().peekable();
        versions.peek().is_some() && versions.all(|(_, v)| v.state() == LifecycleState::Invalid)
    }

    pub fn last_status_change(&self) -> Option<DateTime<Utc>> {
        self.versions().map(|(_, v)| v.status.changed_at).max()
    }
}

/// Filters for listing entries. Entries whose versions are all Invalid are
/// hidden unless `state` is Invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryFilter {
    #[serde(default)]
    pub category: Option<crate::taxonomy::CategoryFilter>,
    #[serde(default)]
    pub layer: Option<String>,
    #[serde(default)]
    pub state: Option<LifecycleState>,
}

impl EntryFilter {
    pub fn matches(&self, entry: &Entry) -> bool {
        let master = &entry.master;
        if let Some(c) = &self.category {
            if !c.matches(&master.category) {
                return false;
            }
        }
        if let Some(layer) = &self.layer {
            if !layer.eq_ignore_ascii_case(&master.layer) {
                return false;
            }
        }
        match self.state {
            Some(state) => entry.versions().any(|(_, v)| v.state() == state),
            None => !entry.is_invalid_only(),
        }
    }
}

/// Vault-wide settings stored in `vault.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VaultConfig {
    pub format_version: u32,
    /// Layers from top (strategy) to bottom (physical systems).
    pub layers: Vec<String>,
    /// Controlled keyword vocabulary; empty means any keyword is accepted
    /// without warning.
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl Default for VaultConfig {
    fn default() -> Self {
        Self {
            format_version: super::FORMAT_VERSION,
            layers: crate::taxonomy::default_layers(),
            keywords: Vec::new(),
        }
    }
}

impl VaultConfig {
    /// Canonical spelling of a configured layer, matched case-insensitively.
    pub fn layer(&self, name: &str) -> Option<&str> {
        self.layers
            .iter()
            .find(|l| l.eq_ignore_ascii_case(name.trim()))
            .map(String::as_str)
    }

    /// Keywords outside the configured vocabulary.
    pub fn unknown_keywords<'a>(
        &self,
        keywords: impl IntoIterator<Item = &'a String>,
    ) -> Vec<String> {
        if self.keywords.is_empty() {
            return Vec::new();
        }
        keywords
            .into_iter()
            .filter(|k| !self.keywords.iter().any(|v| v.eq_ignore_ascii_case(k)))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_spec_parsing() {
        let id = EntryId::from_ulid(ulid::Ulid::new());
        let link: RelationSpec = format!("{id}:main:2").parse().unwrap();
        assert_eq!(link.kind, RelationKind::Link);
        assert_eq!(link.target_version, Some(2));
        let unpinned: RelationSpec = format!("{id}:main").parse().unwrap();
        assert_eq!(unpinned.target_version, None);
        let replace: RelationSpec = format!("{id}:cloud-eu:1@p1").parse().unwrap();
        assert_eq!(replace.kind, RelationKind::Replace);
        assert_eq!(replace.placeholder.as_deref(), Some("p1"));
        assert!("not-an-id:main:1".parse::<RelationSpec>().is_err());
    }

    #[test]
    fn version_ref_round_trips_through_text() {
        let r = VersionRef::new(EntryId::from_ulid(ulid::Ulid::new()), "main", 3);
        assert_eq!(r.to_string().parse::<VersionRef>().unwrap(), r);
    }
}
