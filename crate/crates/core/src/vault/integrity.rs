use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::discovery::SearchIndex;
use crate::lifecycle::LifecycleState;
use crate::metrics::{complexity_score, connectivity_score};

use super::{composite, EntryId, VaultState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityIssue {
    pub subject: String,
    pub message: String,
}

impl IntegrityIssue {
    pub(crate) fn new(subject: impl fmt::Display, message: impl fmt::Display) -> Self {
        Self {
            subject: subject.to_string(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for IntegrityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

pub(crate) fn check_state(state: &VaultState) -> Vec<IntegrityIssue> {
    let mut issues = Vec::new();
    let mut issue = |subject: &dyn fmt::Display, message: String| {
        issues.push(IntegrityIssue::new(subject, message))
    };

    for (id, entry) in &state.entries {
        let master = &entry.master;
        if master.title.trim().is_empty() {
            issue(id, "empty title".into());
        }
        if state.config.layer(&master.layer) != Some(master.layer.as_str()) {
            issue(id, format!("layer {} is not configured", master.layer));
        }
        if master.responsible_authors.is_empty() {
            issue(id, "no responsible author".into());
        }
        for author in &master.responsible_authors {
            if !state.users.contains(author) {
                issue(
                    id,
                    format!("responsible author {author} is not a registered user"),
                );
            }
        }
        if entry.variant(super::MAIN_VARIANT).is_none() {
            issue(id, "main variant is missing".into());
        }

        for variant in &entry.variants {
            if variant.versions.is_empty() {
                issue(
                    id,
                    format!("variant {} has no versions", variant.variant_id),
                );
            }
            if let Some(origin) = &variant.origin {
                if entry
                    .variant(&origin.variant)
                    .and_then(|v| v.version(origin.version))
                    .is_none()
                {
                    issue(
                        id,
                        format!(
                            "variant {} branches from missing {}:{}",
                            variant.variant_id, origin.variant, origin.version
                        ),
                    );
                }
            }
            let last = variant.versions.len();
            for (i, version) in variant.versions.iter().enumerate() {
                let r = entry.version_ref(variant, version);
                let n = i as u32 + 1;
                if version.version_number != n {
                    issue(
                        &r,
                        format!("numbered {} at position {n}", version.version_number),
                    );
                }
                if version.predecessor != n.checked_sub(1).filter(|&p| p > 0) {
                    issue(
                        &r,
                        format!(
                            "predecessor {:?} should be {:?}",
                            version.predecessor,
                            n.checked_sub(1).filter(|&p| p > 0)
                        ),
                    );
                }
                if version.is_draft() && i + 1 != last {
                    issue(&r, "draft is not the latest version of its variant".into());
                }
                let flag_allowed = matches!(
                    version.state(),
                    LifecycleState::Released | LifecycleState::InUse
                );
                if version.status.check_required && !flag_allowed {
                    issue(
                        &r,
                        format!("check flagged on a {} version", version.state()),
                    );
                }
                if version.status.check_required != version.status.check_reason.is_some() {
                    issue(&r, "check flag and check reason disagree".into());
                }

                if master.is_composite {
                    for rel in &version.relations {
                        match state.version(&rel.target) {
                            Ok(t) if t.is_draft() => {
                                issue(&r, format!("relation pins draft {}", rel.target))
                            }
                            Ok(_) => {}
                            Err(_) => issue(
                                &r,
                                format!("relation target {} does not resolve", rel.target),
                            ),
                        }
                    }
                    match composite::resolve(state, &r) {
                        Ok(flat) => {
                            if version.complexity != complexity_score(&flat)
                                || version.connectivity != connectivity_score(&flat).ok()
                            {
                                issue(&r, "stored metrics differ from the flattened model".into());
                            }
                        }
                        Err(e) => issue(&r, format!("cannot flatten: {e}")),
                    }
                } else {
                    if !version.relations.is_empty() {
                        issue(&r, "plain entry carries composite relations".into());
                    }
                    match &version.model {
                        Some(model) => {
                            if version.complexity != complexity_score(model)
                                || version.connectivity != connectivity_score(model).ok()
                            {
                                issue(&r, "stored metrics differ from the model".into());
                            }
                        }
                        None => issue(&r, "model is missing".into()),
                    }
                }

                for target in version.optional_info.entry_refs() {
                    if !state.entries.contains_key(target) {
                        issue(
                            &r,
                            format!("optional information references unknown entry {target}"),
                        );
                    }
                }
                for comment in &version.feedback {
                    if comment.text.trim().is_empty() {
                        issue(&r, "empty feedback comment".into());
                    }
                }
            }
        }
    }

    if let Some(cycle_members) = find_cycle(state) {
        let names: Vec<_> = cycle_members.iter().map(EntryId::to_string).collect();
        issue(
            &"composition graph",
            format!("cycle among {}", names.join(", ")),
        );
    }

    for n in &state.notifications {
        match state.entries.get(&n.affected.entry) {
            Some(e) if e.master.responsible_authors.contains(&n.recipient) => {}
            Some(_) => issue(
                &n.affected,
                format!(
                    "notification recipient {} is not a responsible author",
                    n.recipient
                ),
            ),
            None => issue(&n.affected, "notification for unknown entry".into()),
        }
    }

    if *state.index != SearchIndex::build(state) {
        issue(&"search index", "index differs from a rebuild".into());
    }
    issues
}

/// Kahn's algorithm over the entry-level relation graph; returns the
/// entries left over when no source remains.
fn find_cycle(state: &VaultState) -> Option<BTreeSet<EntryId>> {
    let mut edges: BTreeMap<&EntryId, BTreeSet<&EntryId>> = BTreeMap::new();
    let mut indegree: BTreeMap<&EntryId, usize> = state.entries.keys().map(|id| (id, 0)).collect();
    for (id, entry) in &state.entries {
        for (_, version) in entry.versions() {
            for rel in &version.relations {
                if edges.entry(id).or_default().insert(&rel.target.entry) {
                    *indegree.entry(&rel.target.entry).or_default() += 1;
                }
            }
        }
    }
    let mut ready: Vec<&EntryId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(id, _)| *id)
        .collect();
    while let Some(id) = ready.pop() {
        indegree.remove(id);
        for next in edges.get(id).into_iter().flatten() {
            let d = indegree
                .get_mut(next)
                .expect("every edge target has a degree");
            *d -= 1;
            if *d == 0 {
                ready.push(next);
            }
        }
    }
    (!indegree.is_empty()).then(|| indegree.into_keys().cloned().collect())
}
