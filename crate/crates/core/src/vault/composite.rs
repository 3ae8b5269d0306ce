//! Composite pinning, cycle checks and flattening.
//!
//! Flattening merges each child's (recursively flattened) model into the
//! parent shell, prefixing every child id with `<child-entry-id>.`. A
//! replace relation additionally removes the placeholder element and points
//! every relationship that touched it at the child's boundary element.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exchange::{validate_model, ModelDocument};
use crate::lifecycle::LifecycleState;

use super::{CompositeRelation, EntryId, RelationKind, RelationSpec, VaultState, VersionRef};

pub(crate) fn pin(state: &VaultState, spec: RelationSpec) -> Result<CompositeRelation> {
    let entry = state.entries.get(&spec.target_entry).ok_or_else(|| {
        Error::UnresolvedRelation(format!("entry {} does not exist", spec.target_entry))
    })?;
    let (Some(variant), Some(version)) = (spec.target_variant, spec.target_version) else {
        return Err(Error::UnresolvedRelation(format!(
            "relation to {} is not pinned; name both a variant and a version",
            spec.target_entry
        )));
    };
    let target = VersionRef::new(spec.target_entry, variant, version);
    let pinned = entry
        .variant(&target.variant)
        .and_then(|v| v.version(target.version))
        .ok_or_else(|| Error::UnresolvedRelation(format!("version {target} does not exist")))?;
    if !matches!(
        pinned.state(),
        LifecycleState::Released | LifecycleState::InUse
    ) {
        return Err(Error::UnresolvedRelation(format!(
            "version {target} is {}; relations pin Released or InUse versions only",
            pinned.state()
        )));
    }
    Ok(CompositeRelation {
        kind: spec.kind,
        target,
        placeholder: spec.placeholder,
    })
}

/// Entries directly related from any version of `entry`.
pub(crate) fn children(state: &VaultState, entry: &EntryId) -> BTreeSet<EntryId> {
    state
        .entries
        .get(entry)
        .map(|e| {
            e.versions()
                .flat_map(|(_, v)| v.relations.iter().map(|r| r.target.entry.clone()))
                .collect()
        })
        .unwrap_or_default()
}

/// Rejects relations from `owner` to `targets` if any target already
/// reaches `owner` through existing relations.
pub(crate) fn check_acyclic<'a>(
    state: &VaultState,
    owner: &EntryId,
    targets: impl IntoIterator<Item = &'a EntryId>,
) -> Result<()> {
    for target in targets {
        if target == owner {
            return Err(Error::CyclicComposition(format!(
                "{owner} cannot contain itself"
            )));
        }
        if let Some(path) = path_between(state, target, owner) {
            let path: Vec<_> = path.iter().map(EntryId::to_string).collect();
            return Err(Error::CyclicComposition(format!(
                "{owner} -> {}",
                path.join(" -> ")
            )));
        }
    }
    Ok(())
}

fn path_between(state: &VaultState, from: &EntryId, to: &EntryId) -> Option<Vec<EntryId>> {
    let mut stack = vec![vec![from.clone()]];
    let mut seen = BTreeSet::new();
    while let Some(path) = stack.pop() {
        let last = path.last().expect("paths are never empty");
        if last == to {
            return Some(path);
        }
        if !seen.insert(last.clone()) {
            continue;
        }
        for child in children(state, last) {
            let mut next = path.clone();
            next.push(child);
            stack.push(next);
        }
    }
    None
}

/// Model content of any version: composites are flattened.
pub(crate) fn resolve(state: &VaultState, r: &VersionRef) -> Result<ModelDocument> {
    let entry = state
        .entries
        .get(&r.entry)
        .ok_or_else(|| Error::UnresolvedRelation(format!("entry {} does not exist", r.entry)))?;
    let version = entry
        .variant(&r.variant)
        .and_then(|v| v.version(r.version))
        .ok_or_else(|| Error::UnresolvedRelation(format!("version {r} does not exist")))?;
    if entry.master.is_composite {
        flatten(
            state,
            entry.master.id.as_str(),
            &entry.master.title,
            version.model.as_ref(),
            &version.relations,
        )
    } else {
        version
            .model
            .clone()
            .ok_or_else(|| Error::UnresolvedRelation(format!("version {r} has no model")))
    }
}

pub(crate) fn flatten(
    state: &VaultState,
    model_id: &str,
    name: &str,
    shell: Option<&ModelDocument>,
    relations: &[CompositeRelation],
) -> Result<ModelDocument> {
    let mut doc = shell
        .cloned()
        .unwrap_or_else(|| ModelDocument::new(model_id, name));

    for relation in relations {
        let child = resolve(state, &relation.target)?;
        let prefix = format!("{}.", relation.target.entry);

        if relation.kind == RelationKind::Replace {
            let placeholder = relation
                .placeholder
                .as_deref()
                .ok_or_else(|| Error::MissingPlaceholder(String::new()))?;
            let boundary = child.boundary_element().ok_or_else(|| {
                Error::UnresolvedRelation(format!(
                    "{} has no boundary element to stand in for placeholder {placeholder}",
                    relation.target
                ))
            })?;
            let boundary = format!("{prefix}{}", boundary.id);
            let before = doc.elements.len();
            doc.elements.retain(|e| e.id != placeholder);
            if doc.elements.len() == before {
                return Err(Error::MissingPlaceholder(placeholder.to_string()));
            }
            for rel in &mut doc.relationships {
                if rel.source == placeholder {
                    rel.source.clone_from(&boundary);
                }
                if rel.target == placeholder {
                    rel.target.clone_from(&boundary);
                }
            }
        }

        doc.elements.extend(child.elements.into_iter().map(|mut e| {
            e.id.insert_str(0, &prefix);
            e
        }));
        doc.relationships
            .extend(child.relationships.into_iter().map(|mut r| {
                r.id.insert_str(0, &prefix);
                r.source.insert_str(0, &prefix);
                r.target.insert_str(0, &prefix);
                r
            }));
    }

    let report = validate_model(&doc);
    if !report.is_empty() {
        return Err(Error::Validation(format!(
            "flattened model of {model_id} is inconsistent: {report}"
        )));
    }
    Ok(doc)
}
