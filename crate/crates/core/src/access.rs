//! Users, roles and the permission matrix.
//!
//! | action                                        | Reader | Modeler | Admin |
//! |-----------------------------------------------|--------|---------|-------|
//! | read, feedback                                | yes    | yes     | yes   |
//! | create_entry                                  | no     | yes     | yes   |
//! | modify_entry, release, deprecate, acknowledge | if responsible author | if responsible author | yes |
//! | admin                                         | no     | no      | yes   |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vault::{EntryId, EntryMaster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Reader,
    Modeler,
    Admin,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Reader, Role::Modeler, Role::Admin];
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown role {s:?}; expected reader, modeler or admin"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Read,
    CreateEntry,
    ModifyEntry,
    Release,
    Deprecate,
    Acknowledge,
    Feedback,
    Admin,
}

impl Action {
    pub const ALL: [Action; 8] = [
        Action::Read,
        Action::CreateEntry,
        Action::ModifyEntry,
        Action::Release,
        Action::Deprecate,
        Action::Acknowledge,
        Action::Feedback,
        Action::Admin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Read => "read",
            Action::CreateEntry => "create_entry",
            Action::ModifyEntry => "modify_entry",
            Action::Release => "release",
            Action::Deprecate => "deprecate",
            Action::Acknowledge => "acknowledge",
            Action::Feedback => "feedback",
            Action::Admin => "admin",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub user_id: String,
    pub display_name: String,
    pub role: Role,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Allow,
    Deny { rule: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Action,
    pub subject: Option<EntryId>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl Decision {
    pub fn is_allowed(&self) -> bool {
        matches!(self.verdict, Verdict::Allow)
    }

    fn allow(action: Action, subject: Option<&EntryMaster>) -> Self {
        Self {
            action,
            subject: subject.map(|m| m.id.clone()),
            verdict: Verdict::Allow,
        }
    }

    fn deny(action: Action, subject: Option<&EntryMaster>, rule: &str, reason: String) -> Self {
        Self {
            action,
            subject: subject.map(|m| m.id.clone()),
            verdict: Verdict::Deny {
                rule: rule.to_string(),
                reason,
            },
        }
    }

    /// Converts a denial into an authorization error.
    pub fn into_result(self, user: &str) -> Result<()> {
        match self.verdict {
            Verdict::Allow => Ok(()),
            Verdict::Deny { rule, reason } => Err(Error::Unauthorized {
                user: user.to_string(),
                action: self.action,
                rule,
                reason,
            }),
        }
    }
}

/// Decides whether a user may perform an action. Every mutating vault
/// operation asks the installed authorizer before touching state.
pub trait Authorizer: Send + Sync {
    fn authorize(&self, user: &User, action: Action, subject: Option<&EntryMaster>) -> Decision;
}

/// The standard role matrix with per-entry responsibility.
#[derive(Debug, Default, Clone, Copy)]
pub struct RoleMatrix;

impl Authorizer for RoleMatrix {
    fn authorize(&self, user: &User, action: Action, subject: Option<&EntryMaster>) -> Decision {
        if user.role == Role::Admin {
            return Decision::allow(action, subject);
        }
        match action {
            Action::Read | Action::Feedback => Decision::allow(action, subject),
            Action::CreateEntry if user.role == Role::Modeler => Decision::allow(action, subject),
            Action::CreateEntry => Decision::deny(
                action,
                subject,
                "create-requires-modeler",
                format!("{} users may not create entries", user.role),
            ),
            Action::Admin => Decision::deny(
                action,
                subject,
                "admin-only",
                "administrative actions require the Admin role".into(),
            ),
            Action::ModifyEntry | Action::Release | Action::Deprecate | Action::Acknowledge => {
                match subject {
                    Some(master) if master.responsible_authors.contains(&user.user_id) => {
                        Decision::allow(action, subject)
                    }
                    Some(master) => Decision::deny(
                        action,
                        subject,
                        "responsible-author",
                        format!(
                            "{} is not a responsible author of {}",
                            user.user_id, master.id
                        ),
                    ),
                    None => Decision::deny(
                        action,
                        subject,
                        "entry-scoped",
                        format!("{action} needs an entry to check responsibility against"),
                    ),
                }
            }
        }
    }
}

/// The user registry persisted as `users.json` in the vault root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Users {
    users: BTreeMap<String, User>,
}

impl Users {
    pub fn get(&self, user_id: &str) -> Result<&User> {
        self.users
            .get(user_id)
            .ok_or_else(|| Error::UnknownUser(user_id.to_string()))
    }

    pub fn contains(&self, user_id: &str) -> bool {
        self.users.contains_key(user_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &User> {
        self.users.values()
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn authenticate(&self, token: &str) -> Result<&User> {
        self.users
            .values()
            .find(|u| !token.is_empty() && u.token == token)
            .ok_or(Error::InvalidToken)
    }

    /// Adds a user with a freshly generated token, or the given one.
    pub fn add(
        &mut self,
        user_id: &str,
        display_name: &str,
        role: Role,
        token: Option<String>,
    ) -> Result<User> {
        if user_id.is_empty() || user_id.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(Error::Validation(format!("invalid user id {user_id:?}")));
        }
        if self.users.contains_key(user_id) {
            return Err(Error::Conflict(format!("user {user_id} already exists")));
        }
        let token = match token {
            Some(t) if t.is_empty() => {
                return Err(Error::Validation("token must not be empty".into()))
            }
            Some(t) => t,
            None => generate_token(),
        };
        if self.users.values().any(|u| u.token == token) {
            return Err(Error::Conflict(
                "token is already assigned to another user".into(),
            ));
        }
        let user = User {
            user_id: user_id.to_string(),
            display_name: display_name.to_string(),
            role,
            token,
        };
        self.users.insert(user.user_id.clone(), user.clone());
        Ok(user)
    }
}

fn generate_token() -> String {
    let mut bytes = [0u8; 24];
    rand::thread_rng().fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_are_unique_and_authenticate() {
        let mut users = Users::default();
        let a = users.add("ana", "Ana", Role::Modeler, None).unwrap();
        let b = users.add("ben", "Ben", Role::Reader, None).unwrap();
        assert_ne!(a.token, b.token);
        assert_eq!(users.authenticate(&a.token).unwrap().user_id, "ana");
        assert!(matches!(
            users.authenticate("nope"),
            Err(Error::InvalidToken)
        ));
        assert!(matches!(users.authenticate(""), Err(Error::InvalidToken)));
        assert!(matches!(
            users.add("cy", "Cy", Role::Reader, Some(a.token.clone())),
            Err(Error::Conflict(_))
        ));
        assert!(matches!(
            users.add("ana", "Again", Role::Reader, None),
            Err(Error::Conflict(_))
        ));
    }

    #[test]
    fn unknown_user_is_an_error() {
        assert!(matches!(
            Users::default().get("ghost"),
            Err(Error::UnknownUser(_))
        ));
    }
}
