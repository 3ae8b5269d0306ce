use archlib_core::access::{Action, Authorizer, Decision, Role, User, Verdict};
use archlib_core::lifecycle::TransitionAction;
use archlib_core::taxonomy::{EntryKind, Scope};
use archlib_core::vault::{
    EntryMaster, OptionalInfo, RelationSpec, Vault, VaultConfig, MAIN_VARIANT,
};
use archlib_core::ErrorCode;
use archlib_testkit::fixtures::{
    category, main_ref, new_entry, populate, seed_users, ADMIN, MODELER,
};
use archlib_testkit::models::sized_model;
use archlib_testkit::{oracles, rng};

#[test]
fn all_48_cases_match_the_table() {
    let v = Vault::in_memory(VaultConfig::default());
    for role in Role::ALL {
        v.add_user(&format!("owner-{role}"), "Owner", role).unwrap();
        v.add_user(&format!("other-{role}"), "Other", role).unwrap();
    }
    let owners: Vec<&str> = vec!["owner-Reader", "owner-Modeler", "owner-Admin"];
    let core = new_entry(
        "Subject",
        category(Scope::DomainNeutral, EntryKind::BuildingBlock),
        "Business",
        &owners,
    );
    let id = v
        .create_entry(core, sized_model(1, 0), "owner-Admin")
        .unwrap()
        .id;

    let mut checked = 0;
    for (role, responsible, action, allowed) in oracles::PERMISSIONS {
        let user = format!("{}-{role}", if responsible { "owner" } else { "other" });
        let decision = v.authorize(&user, action, Some(&id)).unwrap();
        assert_eq!(
            decision.is_allowed(),
            allowed,
            "{role} responsible={responsible} {action:?}"
        );
        if let Verdict::Deny { rule, .. } = &decision.verdict {
            assert!(!rule.is_empty());
        }
        checked += 1;
    }
    assert_eq!(checked, 48);
    assert_eq!(
        v.authorize("nobody", Action::Read, None)
            .unwrap_err()
            .code(),
        ErrorCode::Auth
    );
}

struct DenyAll;

impl Authorizer for DenyAll {
    fn authorize(&self, _: &User, action: Action, subject: Option<&EntryMaster>) -> Decision {
        Decision {
            action,
            subject: subject.map(|m| m.id.clone()),
            verdict: Verdict::Deny {
                rule: "deny-all".into(),
                reason: "test double".into(),
            },
        }
    }
}

#[test]
fn deny_all_blocks_every_mutation() {
    let dir = tempfile::tempdir().unwrap();
    {
        let v = Vault::init(dir.path(), VaultConfig::default()).unwrap();
        seed_users(&v).unwrap();
        populate(&v, &mut rng(11), 12).unwrap();
    }
    let v = Vault::open(dir.path()).unwrap().with_authorizer(DenyAll);
    let before = v.snapshot();
    let entry = before
        .entries
        .values()
        .find(|e| !e.master.is_composite)
        .unwrap();
    let id = entry.master.id.clone();
    let latest = entry
        .variant(MAIN_VARIANT)
        .unwrap()
        .latest()
        .unwrap()
        .version_number;
    let r = main_ref(&id, latest);
    let core = || {
        new_entry(
            "New",
            category(Scope::DomainNeutral, EntryKind::BuildingBlock),
            "Business",
            &[MODELER],
        )
    };

    let attempts: Vec<(&str, archlib_core::Result<()>)> = vec![
        (
            "create_entry",
            v.create_entry(core(), sized_model(1, 0), ADMIN).map(drop),
        ),
        (
            "create_composite",
            v.create_composite(
                core(),
                vec![RelationSpec::link(&main_ref(&id, 1))],
                None,
                ADMIN,
            )
            .map(drop),
        ),
        (
            "new_version",
            v.new_version(&id, MAIN_VARIANT, None, ADMIN).map(drop),
        ),
        (
            "new_variant",
            v.new_variant(&id, "other", MAIN_VARIANT, 1, ADMIN)
                .map(drop),
        ),
        (
            "put_draft_model",
            v.put_draft_model(&id, MAIN_VARIANT, sized_model(2, 0), ADMIN)
                .map(drop),
        ),
        (
            "set_draft_relations",
            v.set_draft_relations(&id, MAIN_VARIANT, Vec::new(), ADMIN)
                .map(drop),
        ),
        (
            "update_draft_details",
            v.update_draft_details(
                &id,
                MAIN_VARIANT,
                OptionalInfo::default(),
                Vec::new(),
                ADMIN,
            )
            .map(drop),
        ),
        (
            "release",
            v.transition(&r, TransitionAction::Release, ADMIN).map(drop),
        ),
        (
            "implement",
            v.transition(&r, TransitionAction::Implement, ADMIN)
                .map(drop),
        ),
        (
            "deprecate",
            v.transition(&r, TransitionAction::Deprecate, ADMIN)
                .map(drop),
        ),
        ("acknowledge", v.acknowledge_check(&r, ADMIN).map(drop)),
        ("feedback", v.add_feedback(&r, "hello", ADMIN).map(drop)),
    ];
    for (name, result) in attempts {
        let err = result.expect_err(name);
        assert_eq!(err.code(), ErrorCode::Auth, "{name}: {err}");
    }
    assert_eq!(*v.snapshot(), *before);
    drop(v);
    assert_eq!(*Vault::open(dir.path()).unwrap().snapshot(), *before);
}

#[test]
fn tokens_authenticate_their_owner_only() {
    let v = Vault::in_memory(VaultConfig::default());
    let a = v.add_user("a", "A", Role::Modeler).unwrap();
    let b = v.add_user("b", "B", Role::Reader).unwrap();
    assert_ne!(a.token, b.token);
    assert_eq!(v.authenticate(&a.token).unwrap().user_id, "a");
    assert_eq!(v.authenticate("bogus").unwrap_err().code(), ErrorCode::Auth);
    assert_eq!(
        v.add_user("a", "again", Role::Admin).unwrap_err().code(),
        ErrorCode::Conflict
    );
}
