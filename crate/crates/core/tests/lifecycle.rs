use archlib_core::lifecycle::{next_state, LifecycleState, TransitionAction};
use archlib_core::taxonomy::{EntryKind, Scope};
use archlib_core::vault::{Vault, VaultConfig, MAIN_VARIANT};
use archlib_core::ErrorCode;
use archlib_testkit::fixtures::{
    category, main_ref, new_entry, seed_users, ADMIN, MODELER, MODELER_2, READER,
};
use archlib_testkit::models::sized_model;
use proptest::prelude::*;

const LEGAL: [(LifecycleState, TransitionAction, LifecycleState); 5] = [
    (
        LifecycleState::Draft,
        TransitionAction::Release,
        LifecycleState::Released,
    ),
    (
        LifecycleState::Draft,
        TransitionAction::Deprecate,
        LifecycleState::Invalid,
    ),
    (
        LifecycleState::Released,
        TransitionAction::Implement,
        LifecycleState::InUse,
    ),
    (
        LifecycleState::Released,
        TransitionAction::Deprecate,
        LifecycleState::Invalid,
    ),
    (
        LifecycleState::InUse,
        TransitionAction::Deprecate,
        LifecycleState::Invalid,
    ),
];

fn vault() -> Vault {
    let v = Vault::in_memory(VaultConfig::default());
    seed_users(&v).unwrap();
    v
}

#[test]
fn table_is_exactly_the_legal_set() {
    for state in LifecycleState::ALL {
        for action in TransitionAction::ALL {
            let expected = LEGAL
                .iter()
                .find(|(s, a, _)| *s == state && *a == action)
                .map(|t| t.2);
            assert_eq!(next_state(state, action), expected, "{state} {action}");
        }
    }
}

proptest! {
    #[test]
    fn stored_versions_follow_the_table(actions in proptest::collection::vec(0usize..3, 1..60)) {
        let v = vault();
        let core = new_entry("Fuzz", category(Scope::DomainNeutral, EntryKind::BuildingBlock), "Business", &[MODELER]);
        let id = v.create_entry(core, sized_model(2, 1), MODELER).unwrap().id;
        let r = main_ref(&id, 1);
        let mut state = LifecycleState::Draft;
        for a in actions {
            let action = TransitionAction::ALL[a];
            match (v.transition(&r, action, MODELER), next_state(state, action)) {
                (Ok(out), Some(next)) => {
                    prop_assert_eq!(out.status.state, next);
                    state = next;
                }
                (Err(e), None) => prop_assert_eq!(e.code(), ErrorCode::IllegalTransition),
                (got, want) => prop_assert!(false, "{:?} vs {:?}", got.map(|o| o.status.state), want),
            }
            prop_assert_eq!(v.get_version(&r).unwrap().state(), state);
        }
    }
}

#[test]
fn released_versions_are_immutable() {
    let v = vault();
    let core = new_entry(
        "Frozen",
        category(Scope::DomainNeutral, EntryKind::BuildingBlock),
        "Business",
        &[MODELER],
    );
    let id = v.create_entry(core, sized_model(2, 1), MODELER).unwrap().id;
    v.put_draft_model(&id, MAIN_VARIANT, sized_model(3, 3), MODELER)
        .unwrap();
    v.transition(&main_ref(&id, 1), TransitionAction::Release, MODELER)
        .unwrap();

    let err = v
        .put_draft_model(&id, MAIN_VARIANT, sized_model(5, 1), MODELER)
        .unwrap_err();
    assert_eq!(err.code(), ErrorCode::Conflict);
    assert_eq!(
        v.get_version(&main_ref(&id, 1)).unwrap().model,
        Some(sized_model(3, 3))
    );

    let v2 = v.new_version(&id, MAIN_VARIANT, None, MODELER).unwrap();
    assert_eq!(v2.version_number, 2);
    assert_eq!(v2.predecessor, Some(1));
    assert_eq!(v2.model, Some(sized_model(3, 3)));
    let err = v.new_version(&id, MAIN_VARIANT, None, MODELER).unwrap_err();
    assert_eq!(err.code(), ErrorCode::Conflict);
}

#[test]
fn feedback_is_open_in_every_state_but_must_have_text() {
    let v = vault();
    let core = new_entry(
        "Commented",
        category(Scope::DomainNeutral, EntryKind::BuildingBlock),
        "Business",
        &[MODELER],
    );
    let id = v.create_entry(core, sized_model(2, 1), MODELER).unwrap().id;
    let r = main_ref(&id, 1);
    v.add_feedback(&r, "draft remark", READER).unwrap();
    v.transition(&r, TransitionAction::Release, MODELER)
        .unwrap();
    v.add_feedback(&r, "  released remark  ", MODELER_2)
        .unwrap();
    v.transition(&r, TransitionAction::Deprecate, MODELER)
        .unwrap();
    v.add_feedback(&r, "why deprecated?", ADMIN).unwrap();
    let texts: Vec<_> = v
        .feedback(&r)
        .unwrap()
        .into_iter()
        .map(|c| (c.author, c.text))
        .collect();
    assert_eq!(
        texts,
        [
            (READER.to_string(), "draft remark".to_string()),
            (MODELER_2.to_string(), "released remark".to_string()),
            (ADMIN.to_string(), "why deprecated?".to_string()),
        ]
    );
    assert_eq!(
        v.add_feedback(&r, " \n ", READER).unwrap_err().code(),
        ErrorCode::Validation
    );
    assert_eq!(
        v.add_feedback(&r, "x", "ghost").unwrap_err().code(),
        ErrorCode::Auth
    );
}
