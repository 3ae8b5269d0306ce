//! Version life-cycle, change cascade and feedback.
//!
//! ```text
//!   Draft --release--> Released --implement--> InUse
//!     |                   |                      |
//!     +----deprecate------+------deprecate-------+--> Invalid (terminal)
//! ```
//!
//! Releasing a version flags every Released or InUse version that depends
//! on the released entry, directly or transitively, and notifies the
//! responsible authors of each flagged version.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::access::Action;
use crate::error::{Error, Result};
use crate::vault::{EntryId, Txn, Vault, VaultState, VersionRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LifecycleState {
    Draft,
    Released,
    InUse,
    Invalid,
}

impl LifecycleState {
    pub const ALL: [LifecycleState; 4] = [
        LifecycleState::Draft,
        LifecycleState::Released,
        LifecycleState::InUse,
        LifecycleState::Invalid,
    ];
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for LifecycleState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let wanted = s.replace(['-', '_'], "");
        LifecycleState::ALL
            .into_iter()
            .find(|st| st.to_string().eq_ignore_ascii_case(&wanted))
            .ok_or_else(|| {
                format!("unknown state {s:?}; expected draft, released, in-use or invalid")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionAction {
    Release,
    Implement,
    Deprecate,
}

impl TransitionAction {
    pub const ALL: [TransitionAction; 3] = [
        TransitionAction::Release,
        TransitionAction::Implement,
        TransitionAction::Deprecate,
    ];

    fn permission(self) -> Action {
        match self {
            TransitionAction::Release | TransitionAction::Implement => Action::Release,
            TransitionAction::Deprecate => Action::Deprecate,
        }
    }
}

impl fmt::Display for TransitionAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionAction::Release => "release",
            TransitionAction::Implement => "implement",
            TransitionAction::Deprecate => "deprecate",
        })
    }
}

impl FromStr for TransitionAction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TransitionAction::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown action {s:?}; expected release, implement or deprecate")
            })
    }
}

/// The transition table; `None` marks a rejected pair.
pub fn next_state(state: LifecycleState, action: TransitionAction) -> Option<LifecycleState> {
    use LifecycleState::*;
    use TransitionAction::*;
    match (state, action) {
        (Draft, Release) => Some(Released),
        (Released, Implement) => Some(InUse),
        (Draft | Released | InUse, Deprecate) => Some(Invalid),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleStatus {
    pub state: LifecycleState,
    pub changed_at: DateTime<Utc>,
    pub check_required: bool,
    /// The released version that raised the pending check.
    pub check_reason: Option<VersionRef>,
}

impl LifecycleStatus {
    pub fn draft(at: DateTime<Utc>) -> Self {
        Self {
            state: LifecycleState::Draft,
            changed_at: at,
            check_required: false,
            check_reason: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackComment {
    pub author: String,
    pub at: DateTime<Utc>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    /// Vault-wide arrival sequence; higher is newer.
    pub seq: u64,
    pub recipient: String,
    pub affected: VersionRef,
    pub cause: VersionRef,
    pub at: DateTime<Utc>,
    pub acknowledged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Propagation {
    pub affected: Vec<VersionRef>,
    pub notifications: Vec<Notification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionOutcome {
    pub version: VersionRef,
    pub status: LifecycleStatus,
    /// Present for releases.
    pub propagation: Option<Propagation>,
}

/// Released or InUse versions that depend on `changed`, directly or through
/// other affected entries, ordered by `(entry, variant, version)`.
///
/// A version depends on an entry when one of its composite relations or one
/// of its applied building blocks names that entry, whatever variant or
/// version is pinned. Each version appears at most once.
pub fn dependents_closure(state: &VaultState, changed: &EntryId) -> Vec<VersionRef> {
    let mut reverse: BTreeMap<&EntryId, Vec<VersionRef>> = BTreeMap::new();
    for entry in state.entries.values() {
        for (variant, version) in entry.versions() {
            if !matches!(
                version.state(),
                LifecycleState::Released | LifecycleState::InUse
            ) {
                continue;
            }
            let deps: BTreeSet<&EntryId> = version
                .relations
                .iter()
                .map(|r| &r.target.entry)
                .chain(&version.optional_info.bricks)
                .collect();
            for dep in deps {
                reverse
                    .entry(dep)
                    .or_default()
                    .push(entry.version_ref(variant, version));
            }
        }
    }

    let mut affected = BTreeSet::new();
    let mut visited = BTreeSet::from([changed.clone()]);
    let mut queue = VecDeque::from([changed.clone()]);
    while let Some(id) = queue.pop_front() {
        for dependent in reverse.get(&id).into_iter().flatten() {
            if dependent.entry == *changed || !affected.insert(dependent.clone()) {
                continue;
            }
            if visited.insert(dependent.entry.clone()) {
                queue.push_back(dependent.entry.clone());
            }
        }
    }
    affected.into_iter().collect()
}

impl Txn<'_> {
    /// Flags every dependent of a just-released version and queues one
    /// notification per flagged version and responsible author.
    fn propagate_check(&mut self, changed: &VersionRef) -> Result<Propagation> {
        let affected = dependents_closure(&self.state, &changed.entry);
        let now = Utc::now();
        let mut seq = self
            .state
            .notifications
            .iter()
            .map(|n| n.seq)
            .max()
            .unwrap_or(0);
        let mut notifications = Vec::new();
        for r in &affected {
            let status = &mut self.version_mut(r, false)?.status;
            status.check_required = true;
            status.check_reason = Some(changed.clone());
            let authors = self
                .state
                .entry(&r.entry)?
                .master
                .responsible_authors
                .clone();
            for recipient in authors {
                seq += 1;
                notifications.push(Notification {
                    seq,
                    recipient,
                    affected: r.clone(),
                    cause: changed.clone(),
                    at: now,
                    acknowledged: false,
                });
            }
        }
        if !notifications.is_empty() {
            self.state
                .notifications
                .extend(notifications.iter().cloned());
            self.changes.notifications = true;
        }
        Ok(Propagation {
            affected,
            notifications,
        })
    }

    fn acknowledge_notifications(&mut self, r: &VersionRef) {
        for n in &mut self.state.notifications {
            if n.affected == *r && !n.acknowledged {
                n.acknowledged = true;
                self.changes.notifications = true;
            }
        }
    }
}

impl Vault {
    /// Moves a version along the life-cycle. Releasing runs the dependency
    /// cascade in the same transaction.
    pub fn transition(
        &self,
        r: &VersionRef,
        action: TransitionAction,
        actor: &str,
    ) -> Result<TransitionOutcome> {
        self.write(|txn| {
            txn.authorize(actor, action.permission(), Some(&r.entry))?;
            let current = txn.state.version(r)?.status.state;
            let next = next_state(current, action).ok_or(Error::IllegalTransition {
                state: current,
                action,
            })?;

            let status = &mut txn.version_mut(r, false)?.status;
            status.state = next;
            status.changed_at = Utc::now();
            if next == LifecycleState::Invalid {
                status.check_required = false;
                status.check_reason = None;
            }
            let status = status.clone();
            if next == LifecycleState::Invalid {
                txn.acknowledge_notifications(r);
            }

            let propagation = match action {
                TransitionAction::Release => Some(txn.propagate_check(r)?),
                _ => None,
            };
            Ok(TransitionOutcome {
                version: r.clone(),
                status,
                propagation,
            })
        })
    }

    /// Clears a pending check on a version and marks its notifications read.
    pub fn acknowledge_check(&self, r: &VersionRef, actor: &str) -> Result<LifecycleStatus> {
        self.write(|txn| {
            txn.authorize(actor, Action::Acknowledge, Some(&r.entry))?;
            if !txn.state.version(r)?.status.check_required {
                return Err(Error::NothingToAcknowledge);
            }
            let status = &mut txn.version_mut(r, false)?.status;
            status.check_required = false;
            status.check_reason = None;
            let status = status.clone();
            txn.acknowledge_notifications(r);
            Ok(status)
        })
    }

    /// Appends a comment to any version, whatever its state.
    pub fn add_feedback(&self, r: &VersionRef, text: &str, actor: &str) -> Result<FeedbackComment> {
        self.write(|txn| {
            txn.authorize(actor, Action::Feedback, Some(&r.entry))?;
            txn.state.version(r)?;
            let text = text.trim();
            if text.is_empty() {
                return Err(Error::Validation("feedback text must not be empty".into()));
            }
            let comment = FeedbackComment {
                author: actor.to_string(),
                at: Utc::now(),
                text: text.to_string(),
            };
            txn.version_mut(r, false)?.feedback.push(comment.clone());
            Ok(comment)
        })
    }

    pub fn feedback(&self, r: &VersionRef) -> Result<Vec<FeedbackComment>> {
        Ok(self.snapshot().version(r)?.feedback.clone())
    }

    /// A user's notifications: unacknowledged first, newest first within
    /// each group.
    pub fn list_notifications(&self, recipient: &str) -> Vec<Notification> {
        let mut out: Vec<_> = self
            .snapshot()
            .notifications
            .iter()
            .filter(|n| n.recipient == recipient)
            .cloned()
            .collect();
        out.sort_by(|a, b| a.acknowledged.cmp(&b.acknowledged).then(b.seq.cmp(&a.seq)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LifecycleState::*;
    use TransitionAction::*;

    #[test]
    fn transition_table() {
        let expected = [
            ((Draft, Release), Some(Released)),
            ((Draft, Implement), None),
            ((Draft, Deprecate), Some(Invalid)),
            ((Released, Release), None),
            ((Released, Implement), Some(InUse)),
            ((Released, Deprecate), Some(Invalid)),
            ((InUse, Release), None),
            ((InUse, Implement), None),
            ((InUse, Deprecate), Some(Invalid)),
            ((Invalid, Release), None),
            ((Invalid, Implement), None),
            ((Invalid, Deprecate), None),
        ];
        for ((state, action), next) in expected {
            assert_eq!(next_state(state, action), next, "{state} + {action}");
        }
    }

    #[test]
    fn state_names_parse() {
        assert_eq!("in-use".parse::<LifecycleState>(), Ok(InUse));
        assert_eq!("Released".parse::<LifecycleState>(), Ok(Released));
        assert!("archived".parse::<LifecycleState>().is_err());
    }
}
