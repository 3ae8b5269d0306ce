//! Request and response bodies.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use archlib_core::access::{Decision, Role, User};
use archlib_core::vault::{
    Condition, Entry, EntryId, EntryMaster, EntryVersion, NewEntry, OptionalInfo, RelationSpec,
    Variant, VariantOrigin, MAIN_VARIANT,
};

/// An entry with every variant and version, models excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryView {
    #[serde(flatten)]
    pub master: EntryMaster,
    pub variants: Vec<VariantView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantView {
    pub variant_id: String,
    pub origin: Option<VariantOrigin>,
    pub created_at: DateTime<Utc>,
    pub versions: Vec<EntryVersion>,
}

impl From<&Variant> for VariantView {
    fn from(v: &Variant) -> Self {
        Self {
            variant_id: v.variant_id.clone(),
            origin: v.origin.clone(),
            created_at: v.created_at,
            versions: v.versions.clone(),
        }
    }
}

impl From<&Entry> for EntryView {
    fn from(e: &Entry) -> Self {
        Self {
            master: e.master.clone(),
            variants: e.variants.iter().map(VariantView::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
}

impl<T> Page<T> {
    pub fn slice(all: Vec<T>, offset: usize, limit: usize) -> Self {
        let total = all.len();
        let items = all.into_iter().skip(offset).take(limit).collect();
        Self {
            items,
            total,
            offset,
            limit,
        }
    }
}

/// `model` carries the exchange XML document as a string.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateEntryRequest {
    #[serde(flatten)]
    pub entry: NewEntry,
    pub model: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateCompositeRequest {
    #[serde(flatten)]
    pub entry: NewEntry,
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub parent_model: Option<String>,
}

fn main_variant() -> String {
    MAIN_VARIANT.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewVariantRequest {
    pub name: String,
    #[serde(default = "main_variant")]
    pub from_variant: String,
    pub from_version: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DraftDetailsRequest {
    #[serde(default)]
    pub optional_info: OptionalInfo,
    #[serde(default)]
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackRequest {
    pub text: String,
}

/// The authenticated user, without the token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeView {
    pub user_id: String,
    pub display_name: String,
    pub role: Role,
}

impl From<&User> for MeView {
    fn from(u: &User) -> Self {
        Self {
            user_id: u.user_id.clone(),
            display_name: u.display_name.clone(),
            role: u.role,
        }
    }
}

/// What the caller may do with one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionsView {
    pub user_id: String,
    pub entry: EntryId,
    pub decisions: Vec<Decision>,
}
