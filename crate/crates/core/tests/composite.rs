use archlib_core::exchange::{ModelDocument, ModelElement, ModelRelationship};
use archlib_core::lifecycle::TransitionAction;
use archlib_core::metrics::complexity_score;
use archlib_core::taxonomy::{EntryKind, Scope};
use archlib_core::vault::{EntryId, RelationSpec, Vault, VaultConfig, VersionRef, MAIN_VARIANT};
use archlib_core::ErrorCode;
use archlib_testkit::fixtures::{build_tree, category, main_ref, new_entry, seed_users, MODELER};
use archlib_testkit::models::sized_model;
use archlib_testkit::{oracles, rng};
use proptest::prelude::*;

fn vault() -> Vault {
    let v = Vault::in_memory(VaultConfig::default());
    seed_users(&v).unwrap();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resolution_matches_recursive_oracle(seed in any::<u64>()) {
        let v = vault();
        let root = build_tree(&v, &mut rng(seed), 4).unwrap();
        let resolved = v.resolve_composite(&root.version).unwrap();
        let expected = oracles::flatten(&root);
        prop_assert_eq!(&resolved, &expected);
        let stored = v.get_version(&root.version).unwrap();
        prop_assert_eq!(stored.complexity, complexity_score(&expected));
        prop_assert!(v.check_integrity().is_empty(), "{:?}", v.check_integrity());
    }
}

fn released(v: &Vault, title: &str, model: ModelDocument) -> EntryId {
    let core = new_entry(
        title,
        category(Scope::DomainNeutral, EntryKind::BuildingBlock),
        "Application",
        &[MODELER],
    );
    let id = v.create_entry(core, model, MODELER).unwrap().id;
    v.transition(&main_ref(&id, 1), TransitionAction::Release, MODELER)
        .unwrap();
    id
}

fn composite(
    v: &Vault,
    specs: Vec<RelationSpec>,
    shell: Option<ModelDocument>,
) -> archlib_core::Result<EntryId> {
    let core = new_entry(
        "Composite",
        category(Scope::DomainSpecific, EntryKind::ReferenceModel),
        "Business",
        &[MODELER],
    );
    v.create_composite(core, specs, shell, MODELER)
        .map(|m| m.id)
}

fn shell_with_placeholder() -> ModelDocument {
    let mut shell = ModelDocument::new("shell", "Shell");
    shell.elements.push(ModelElement::new(
        "portal",
        "ApplicationComponent",
        "Portal",
    ));
    shell.elements.push(ModelElement::new(
        "slot",
        "ApplicationComponent",
        "Ticketing slot",
    ));
    shell
        .relationships
        .push(ModelRelationship::new("uses", "Serving", "slot", "portal"));
    shell
}

#[test]
fn replace_retargets_edges_at_the_child_boundary() {
    let v = vault();
    let mut child = sized_model(2, 1);
    child.properties.insert("interface".into(), "e1".into());
    let c = released(&v, "Ticketing", child);
    let p = composite(
        &v,
        vec![RelationSpec::replace(&main_ref(&c, 1), "slot")],
        Some(shell_with_placeholder()),
    )
    .unwrap();
    let flat = v.resolve_composite(&main_ref(&p, 1)).unwrap();
    let ids: Vec<_> = flat.elements.iter().map(|e| e.id.clone()).collect();
    assert_eq!(
        ids,
        ["portal".to_string(), format!("{c}.e0"), format!("{c}.e1")]
    );
    assert_eq!(flat.relationships[0].source, format!("{c}.e1"));
    assert_eq!(flat.relationships[0].target, "portal");
    assert_eq!(flat.model_id, "shell");
}

#[test]
fn relation_errors() {
    let v = vault();
    let c = released(&v, "Child", sized_model(2, 1));

    let err = composite(
        &v,
        vec![RelationSpec::replace(&main_ref(&c, 1), "nowhere")],
        Some(shell_with_placeholder()),
    )
    .unwrap_err();
    assert_eq!(err.code(), ErrorCode::Validation);
    assert!(err.to_string().contains("nowhere"));

    let unpinned: RelationSpec = c.to_string().parse().unwrap();
    assert_eq!(
        composite(&v, vec![unpinned], None).unwrap_err().code(),
        ErrorCode::Validation
    );

    let missing = VersionRef::new(c.clone(), MAIN_VARIANT, 9);
    assert_eq!(
        composite(&v, vec![RelationSpec::link(&missing)], None)
            .unwrap_err()
            .code(),
        ErrorCode::Validation
    );

    let draft = {
        let core = new_entry(
            "Draft",
            category(Scope::DomainNeutral, EntryKind::BuildingBlock),
            "Business",
            &[MODELER],
        );
        v.create_entry(core, sized_model(1, 0), MODELER).unwrap().id
    };
    let err = composite(&v, vec![RelationSpec::link(&main_ref(&draft, 1))], None).unwrap_err();
    assert!(err.to_string().contains("Draft"), "{err}");

    let twice = vec![
        RelationSpec::link(&main_ref(&c, 1)),
        RelationSpec::link(&main_ref(&c, 1)),
    ];
    assert_eq!(
        composite(&v, twice, None).unwrap_err().code(),
        ErrorCode::Validation
    );
    assert!(v.check_integrity().is_empty());
}

#[test]
fn cycles_are_rejected_with_their_path() {
    let v = vault();
    let a = released(&v, "A", sized_model(1, 0));
    let b = composite(&v, vec![RelationSpec::link(&main_ref(&a, 1))], None).unwrap();
    v.transition(&main_ref(&b, 1), TransitionAction::Release, MODELER)
        .unwrap();
    let c = composite(&v, vec![RelationSpec::link(&main_ref(&b, 1))], None).unwrap();
    v.transition(&main_ref(&c, 1), TransitionAction::Release, MODELER)
        .unwrap();

    // b's next draft tries to include c, which already contains b.
    v.new_version(&b, MAIN_VARIANT, None, MODELER).unwrap();
    let err = v
        .set_draft_relations(
            &b,
            MAIN_VARIANT,
            vec![RelationSpec::link(&main_ref(&c, 1))],
            MODELER,
        )
        .unwrap_err();
    assert_eq!(err.code(), ErrorCode::Cycle);
    assert!(
        err.to_string().contains(&format!("{b} -> {c} -> {b}")),
        "{err}"
    );

    let err = v
        .set_draft_relations(
            &b,
            MAIN_VARIANT,
            vec![RelationSpec::link(&main_ref(&b, 1))],
            MODELER,
        )
        .unwrap_err();
    assert_eq!(err.code(), ErrorCode::Cycle);
    assert!(v.check_integrity().is_empty());
}

#[test]
fn resolving_a_plain_entry_is_refused() {
    let v = vault();
    let a = released(&v, "A", sized_model(1, 0));
    assert_eq!(
        v.resolve_composite(&main_ref(&a, 1)).unwrap_err().code(),
        ErrorCode::Validation
    );
}
