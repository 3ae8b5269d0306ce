use std::collections::{BTreeMap, BTreeSet};

use archlib_core::access::{Action, Role};
use archlib_core::discovery::SearchQuery;
use archlib_core::exchange::{ModelDocument, INTERFACE_PROPERTY};
use archlib_core::lifecycle::LifecycleState;
use archlib_core::vault::{EntryId, VaultState};

use crate::fixtures::{BuiltNode, DepGraph};

/// Entries that transitively depend on `changed` through edges leaving
/// Released or InUse entries. Plain queue walk over the generator's own
/// adjacency lists.
pub fn cascade_closure(graph: &DepGraph, changed: usize) -> BTreeSet<usize> {
    let live = |i: usize| {
        matches!(
            graph.states[i],
            LifecycleState::Released | LifecycleState::InUse
        )
    };
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); graph.len()];
    for i in 0..graph.len() {
        if live(i) {
            for j in graph.deps(i) {
                dependents[j].push(i);
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut frontier = vec![changed];
    while let Some(j) = frontier.pop() {
        for &i in &dependents[j] {
            if i != changed && out.insert(i) {
                frontier.push(i);
            }
        }
    }
    out
}

/// Recursive flatten computed from the build record alone.
pub fn flatten(node: &BuiltNode) -> ModelDocument {
    if !node.composite {
        return node.model.clone().expect("leaves carry a model");
    }
    let mut doc = node
        .model
        .clone()
        .unwrap_or_else(|| ModelDocument::new(node.id.as_str(), node.title.as_str()));

    let mut substitutes: BTreeMap<String, String> = BTreeMap::new();
    let mut appended_elements = Vec::new();
    let mut appended_relationships = Vec::new();
    for (child, placeholder) in &node.children {
        let sub = flatten(child);
        let qualify = |id: &str| format!("{}.{id}", child.id);
        if let Some(p) = placeholder {
            let boundary = sub
                .properties
                .get(INTERFACE_PROPERTY)
                .filter(|id| sub.elements.iter().any(|e| &&e.id == id))
                .cloned()
                .unwrap_or_else(|| sub.elements[0].id.clone());
            substitutes.insert(p.clone(), qualify(&boundary));
        }
        for mut e in sub.elements {
            e.id = qualify(&e.id);
            appended_elements.push(e);
        }
        for mut r in sub.relationships {
            r.id = qualify(&r.id);
            r.source = qualify(&r.source);
            r.target = qualify(&r.target);
            appended_relationships.push(r);
        }
    }
    doc.elements.retain(|e| !substitutes.contains_key(&e.id));
    for r in &mut doc.relationships {
        if let Some(s) = substitutes.get(&r.source) {
            r.source = s.clone();
        }
        if let Some(s) = substitutes.get(&r.target) {
            r.target = s.clone();
        }
    }
    doc.elements.extend(appended_elements);
    doc.relationships.extend(appended_relationships);
    doc
}

fn words(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            out.insert(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.insert(current);
    }
    out
}

/// Brute-force search: every entry is checked against every filter and
/// scored from its master record.
pub fn search(state: &VaultState, query: &SearchQuery) -> Vec<(EntryId, u32)> {
    let terms: BTreeSet<String> = query.terms.iter().flat_map(|t| words(t)).collect();
    let mut hits = Vec::new();
    for entry in state.entries.values() {
        let m = &entry.master;
        let states: Vec<LifecycleState> = entry
            .variants
            .iter()
            .flat_map(|v| &v.versions)
            .map(|v| v.status.state)
            .collect();
        let state_ok = match query.state {
            Some(s) => states.contains(&s),
            None => states.iter().any(|s| *s != LifecycleState::Invalid),
        };
        let category_ok = query.category.is_none_or(|c| {
            c.scope == m.category.scope && c.kind.is_none_or(|k| k == m.category.kind)
        });
        let layer_ok = query
            .layer
            .as_ref()
            .is_none_or(|l| l.to_lowercase() == m.layer.to_lowercase());
        let keywords_ok = query.keywords.iter().all(|k| m.keywords.contains(k));
        if !(state_ok && category_ok && layer_ok && keywords_ok) {
            continue;
        }

        let text: BTreeSet<String> = words(&m.title)
            .into_iter()
            .chain(words(&m.abstract_text))
            .collect();
        let keyword_words: BTreeSet<String> = m.keywords.iter().flat_map(|k| words(k)).collect();
        let mut score = 0;
        let mut matched = false;
        for t in &terms {
            if keyword_words.contains(t) {
                score += 2;
                matched = true;
            } else if text.contains(t) {
                score += 1;
                matched = true;
            }
        }
        if !terms.is_empty() && !matched {
            continue;
        }
        let changed = entry
            .variants
            .iter()
            .flat_map(|v| &v.versions)
            .map(|v| v.status.changed_at)
            .max();
        hits.push((score, changed, m.id.clone()));
    }
    hits.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    hits.into_iter().map(|(score, _, id)| (id, score)).collect()
}

/// The documented permission table, one row per (role, responsible,
/// action) combination.
pub const PERMISSIONS: [(Role, bool, Action, bool); 48] = {
    use Action::{Acknowledge, CreateEntry, Deprecate, Feedback, ModifyEntry, Read, Release};
    const READER: Role = Role::Reader;
    const MODELER: Role = Role::Modeler;
    const ADMIN: Role = Role::Admin;
    const ADMINISTER: Action = Action::Admin;
    [
        (READER, false, Read, true),
        (READER, false, CreateEntry, false),
        (READER, false, ModifyEntry, false),
        (READER, false, Release, false),
        (READER, false, Deprecate, false),
        (READER, false, Acknowledge, false),
        (READER, false, Feedback, true),
        (READER, false, ADMINISTER, false),
        (READER, true, Read, true),
        (READER, true, CreateEntry, false),
        (READER, true, ModifyEntry, true),
        (READER, true, Release, true),
        (READER, true, Deprecate, true),
        (READER, true, Acknowledge, true),
        (READER, true, Feedback, true),
        (READER, true, ADMINISTER, false),
        (MODELER, false, Read, true),
        (MODELER, false, CreateEntry, true),
        (MODELER, false, ModifyEntry, false),
        (MODELER, false, Release, false),
        (MODELER, false, Deprecate, false),
        (MODELER, false, Acknowledge, false),
        (MODELER, false, Feedback, true),
        (MODELER, false, ADMINISTER, false),
        (MODELER, true, Read, true),
        (MODELER, true, CreateEntry, true),
        (MODELER, true, ModifyEntry, true),
        (MODELER, true, Release, true),
        (MODELER, true, Deprecate, true),
        (MODELER, true, Acknowledge, true),
        (MODELER, true, Feedback, true),
        (MODELER, true, ADMINISTER, false),
        (ADMIN, false, Read, true),
        (ADMIN, false, CreateEntry, true),
        (ADMIN, false, ModifyEntry, true),
        (ADMIN, false, Release, true),
        (ADMIN, false, Deprecate, true),
        (ADMIN, false, Acknowledge, true),
        (ADMIN, false, Feedback, true),
        (ADMIN, false, ADMINISTER, true),
        (ADMIN, true, Read, true),
        (ADMIN, true, CreateEntry, true),
        (ADMIN, true, ModifyEntry, true),
        (ADMIN, true, Release, true),
        (ADMIN, true, Deprecate, true),
        (ADMIN, true, Acknowledge, true),
        (ADMIN, true, Feedback, true),
        (ADMIN, true, ADMINISTER, true),
    ]
};
