use std::collections::BTreeSet;

use archlib_core::access::Role;
use archlib_core::discovery::SearchQuery;
use archlib_core::exchange::{ModelDocument, ModelElement, ModelRelationship, INTERFACE_PROPERTY};
use archlib_core::lifecycle::{LifecycleState, Propagation, TransitionAction};
use archlib_core::taxonomy::{default_layers, Category, CategoryFilter, EntryKind, Scope};
use archlib_core::vault::{
    Condition, ConditionKind, DependencyRef, EntryId, NewEntry, OptionalInfo, RelationSpec,
    Stakeholder, Vault, VersionRef, MAIN_VARIANT,
};
use archlib_core::Result;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use crate::models::random_model;

pub const ADMIN: &str = "ada";
pub const MODELER: &str = "mo";
pub const MODELER_2: &str = "max";
pub const READER: &str = "rita";

/// Registers one admin, two modelers and one reader.
pub fn seed_users(vault: &Vault) -> Result<()> {
    vault.add_user(ADMIN, "Ada Admin", Role::Admin)?;
    vault.add_user(MODELER, "Mo Modeler", Role::Modeler)?;
    vault.add_user(MODELER_2, "Max Modeler", Role::Modeler)?;
    vault.add_user(READER, "Rita Reader", Role::Reader)?;
    Ok(())
}

pub fn new_entry(title: &str, category: Category, layer: &str, authors: &[&str]) -> NewEntry {
    NewEntry {
        title: title.to_string(),
        category,
        layer: layer.to_string(),
        abstract_text: String::new(),
        keywords: BTreeSet::new(),
        responsible_authors: authors.iter().map(|a| a.to_string()).collect(),
        optional_info: OptionalInfo::default(),
        conditions: Vec::new(),
    }
}

pub fn category(scope: Scope, kind: EntryKind) -> Category {
    Category { scope, kind }
}

fn random_category(rng: &mut impl Rng) -> Category {
    let kinds = [
        EntryKind::BuildingBlock,
        EntryKind::DesignPattern,
        EntryKind::ReferenceModel,
        EntryKind::ApplicationModel,
    ];
    category(
        *Scope::ALL.choose(rng).expect("non-empty"),
        *kinds.choose(rng).expect("non-empty"),
    )
}

fn random_authors(rng: &mut impl Rng) -> Vec<&'static str> {
    match rng.gen_range(0..4) {
        0 => vec![MODELER],
        1 => vec![MODELER_2],
        2 => vec![MODELER, MODELER_2],
        _ => vec![READER, MODELER],
    }
}

pub fn main_ref(id: &EntryId, version: u32) -> VersionRef {
    VersionRef::new(id.clone(), MAIN_VARIANT, version)
}

// ---- dependency graphs ---------------------------------------------------

/// A random acyclic dependency structure. Entry `i` only depends on entries
/// with a smaller index.
#[derive(Debug, Clone)]
pub struct DepGraph {
    /// Composite relations, always to non-composite entries.
    pub links: Vec<Vec<usize>>,
    /// Applied building blocks.
    pub bricks: Vec<Vec<usize>>,
    pub states: Vec<LifecycleState>,
}

impl DepGraph {
    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let mut links = vec![Vec::new(); n];
        let mut bricks = vec![Vec::new(); n];
        let mut states = Vec::with_capacity(n);
        for i in 0..n {
            states.push(match rng.gen_range(0..10) {
                0 => LifecycleState::Draft,
                1 => LifecycleState::Invalid,
                2 | 3 => LifecycleState::InUse,
                _ => LifecycleState::Released,
            });
            if i == 0 {
                continue;
            }
            let k = rng.gen_range(0..=3.min(i));
            let deps: Vec<usize> = (0..i).choose_multiple(rng, k);
            let composite = rng.gen_bool(0.4);
            for j in deps {
                let pinnable = links[j].is_empty() && states[j] != LifecycleState::Draft;
                if composite && pinnable && rng.gen_bool(0.7) {
                    links[i].push(j);
                } else {
                    bricks[i].push(j);
                }
            }
        }
        Self {
            links,
            bricks,
            states,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn deps(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.links[i].iter().chain(&self.bricks[i]).copied()
    }
}

/// Materializes `graph` in `vault`; returns the entry id of every node.
/// Every entry is released right after creation unless it stays a draft,
/// then moved to its final state.
pub fn build_graph(vault: &Vault, graph: &DepGraph, rng: &mut impl Rng) -> Result<Vec<EntryId>> {
    let mut ids: Vec<EntryId> = Vec::with_capacity(graph.len());
    for i in 0..graph.len() {
        let mut core = new_entry(
            &format!("Node {i}"),
            random_category(rng),
            "Application",
            &random_authors(rng),
        );
        core.optional_info.bricks = graph.bricks[i].iter().map(|&j| ids[j].clone()).collect();
        let master = if graph.links[i].is_empty() {
            let (elements, relationships) = (rng.gen_range(1..5), rng.gen_range(0..5));
            let model = random_model(rng, &format!("node-{i}"), elements, relationships);
            vault.create_entry(core, model, ADMIN)?
        } else {
            let specs = graph.links[i]
                .iter()
                .map(|&j| RelationSpec::link(&main_ref(&ids[j], 1)))
                .collect();
            vault.create_composite(core, specs, None, ADMIN)?
        };
        if graph.states[i] != LifecycleState::Draft {
            vault.transition(&main_ref(&master.id, 1), TransitionAction::Release, ADMIN)?;
        }
        ids.push(master.id);
    }
    for (i, id) in ids.iter().enumerate() {
        let action = match graph.states[i] {
            LifecycleState::InUse => TransitionAction::Implement,
            LifecycleState::Invalid => TransitionAction::Deprecate,
            _ => continue,
        };
        vault.transition(&main_ref(id, 1), action, ADMIN)?;
    }
    Ok(ids)
}

/// Releases fresh content on entry `t`: a new version, or the pending
/// draft when the entry has never been released.
pub fn release_change(
    vault: &Vault,
    graph: &DepGraph,
    ids: &[EntryId],
    t: usize,
) -> Result<(VersionRef, Propagation)> {
    let r = if graph.states[t] == LifecycleState::Draft {
        main_ref(&ids[t], 1)
    } else {
        let v = vault.new_version(&ids[t], MAIN_VARIANT, None, ADMIN)?;
        main_ref(&ids[t], v.version_number)
    };
    let outcome = vault.transition(&r, TransitionAction::Release, ADMIN)?;
    Ok((r, outcome.propagation.unwrap_or_default()))
}

// ---- composite trees -----------------------------------------------------

/// A stored entry together with what it was built from.
#[derive(Debug, Clone)]
pub struct BuiltNode {
    pub id: EntryId,
    pub title: String,
    pub version: VersionRef,
    /// Leaf model, or the composite's parent model.
    pub model: Option<ModelDocument>,
    pub composite: bool,
    /// Children with the placeholder they replace, if any.
    pub children: Vec<(BuiltNode, Option<String>)>,
}

/// Builds and releases a random composite tree of at most `max_depth`
/// levels below the root.
pub fn build_tree(vault: &Vault, rng: &mut impl Rng, max_depth: usize) -> Result<BuiltNode> {
    build_node(vault, rng, 0, max_depth, true)
}

fn build_node(
    vault: &Vault,
    rng: &mut impl Rng,
    depth: usize,
    max_depth: usize,
    root: bool,
) -> Result<BuiltNode> {
    let leaf = depth == max_depth || (!root && rng.gen_bool(0.35));
    let title = format!("Tree node d{depth}");
    let core = new_entry(&title, random_category(rng), "Business", &[MODELER]);
    if leaf {
        let (elements, relationships) = (rng.gen_range(1..6), rng.gen_range(0..6));
        let model = random_model(rng, "leaf", elements, relationships);
        let master = vault.create_entry(core, model.clone(), ADMIN)?;
        let version = main_ref(&master.id, 1);
        vault.transition(&version, TransitionAction::Release, ADMIN)?;
        return Ok(BuiltNode {
            id: master.id,
            title,
            version,
            model: Some(model),
            composite: false,
            children: Vec::new(),
        });
    }

    let with_shell = rng.gen_bool(0.7);
    let mut children = Vec::new();
    for k in 0..rng.gen_range(1..=3) {
        let child = build_node(vault, rng, depth + 1, max_depth, false)?;
        let placeholder = (with_shell && rng.gen_bool(0.5)).then(|| format!("p{k}"));
        children.push((child, placeholder));
    }
    let shell =
        with_shell.then(|| random_shell(rng, children.iter().filter_map(|(_, p)| p.as_deref())));
    let specs = children
        .iter()
        .map(|(child, placeholder)| match placeholder {
            Some(p) => RelationSpec::replace(&child.version, p.clone()),
            None => RelationSpec::link(&child.version),
        })
        .collect();
    let master = vault.create_composite(core, specs, shell.clone(), ADMIN)?;
    let version = main_ref(&master.id, 1);
    vault.transition(&version, TransitionAction::Release, ADMIN)?;
    Ok(BuiltNode {
        id: master.id,
        title,
        version,
        model: shell,
        composite: true,
        children,
    })
}

/// A parent model whose first element is a regular element `s0`, followed
/// by more regular elements and the given placeholders.
fn random_shell<'a>(
    rng: &mut impl Rng,
    placeholders: impl Iterator<Item = &'a str>,
) -> ModelDocument {
    let mut doc = ModelDocument::new(format!("shell-{}", rng.gen::<u16>()), "Shell");
    for i in 0..rng.gen_range(1..=3) {
        doc.elements.push(ModelElement::new(
            format!("s{i}"),
            "ApplicationComponent",
            format!("Shell {i}"),
        ));
    }
    for p in placeholders {
        doc.elements
            .push(ModelElement::new(p, "ApplicationComponent", "Placeholder"));
    }
    let ids: Vec<String> = doc.elements.iter().map(|e| e.id.clone()).collect();
    for j in 0..rng.gen_range(0..=ids.len() + 1) {
        let src = ids.choose(rng).expect("non-empty").clone();
        let tgt = ids.choose(rng).expect("non-empty").clone();
        doc.relationships.push(ModelRelationship::new(
            format!("sr{j}"),
            "Serving",
            src,
            tgt,
        ));
    }
    if rng.gen_bool(0.5) {
        doc.properties
            .insert(INTERFACE_PROPERTY.into(), "s0".into());
    }
    doc
}

// ---- mixed corpora -------------------------------------------------------

pub const VOCABULARY: &[&str] = &[
    "incident",
    "management",
    "service",
    "desk",
    "customer",
    "billing",
    "order",
    "logistics",
    "payment",
    "identity",
    "access",
    "monitoring",
    "event",
    "data",
    "lake",
    "integration",
    "gateway",
    "portal",
    "workflow",
    "reporting",
    "analytics",
    "cloud",
    "network",
    "security",
    "archive",
];

pub const KEYWORDS: &[&str] = &[
    "ITIL",
    "Incident",
    "SOA",
    "Cloud",
    "Security",
    "Data",
    "Process",
    "Integration",
];

fn phrase(rng: &mut impl Rng, words: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(words);
    let picked: Vec<String> = (0..n)
        .map(|_| {
            let w = *VOCABULARY.choose(rng).expect("non-empty");
            if rng.gen_bool(0.3) {
                let mut c = w.chars();
                c.next()
                    .map(|f| f.to_uppercase().chain(c).collect())
                    .unwrap_or_default()
            } else {
                w.to_string()
            }
        })
        .collect();
    picked.join(if rng.gen_bool(0.2) { "-" } else { " " })
}

/// Fills `vault` with `n` entries drawn from a small vocabulary, then
/// exercises the life-cycle: releases, cascades, variants, feedback,
/// acknowledgements and deprecations. Returns the created ids.
pub fn populate(vault: &Vault, rng: &mut impl Rng, n: usize) -> Result<Vec<EntryId>> {
    let layers = default_layers();
    let mut ids: Vec<EntryId> = Vec::new();
    let mut released_plain: Vec<EntryId> = Vec::new();

    for i in 0..n {
        let layer = layers.choose(rng).expect("non-empty");
        let mut core = new_entry(
            &phrase(rng, 1..=4),
            random_category(rng),
            layer,
            &random_authors(rng),
        );
        core.abstract_text = phrase(rng, 0..=8);
        let n_keywords = rng.gen_range(0..3);
        core.keywords = KEYWORDS
            .choose_multiple(rng, n_keywords)
            .map(|k| k.to_string())
            .collect();
        if !ids.is_empty() && rng.gen_bool(0.3) {
            let n_bricks = rng.gen_range(1..=2);
            core.optional_info.bricks = ids.choose_multiple(rng, n_bricks).cloned().collect();
        }
        if rng.gen_bool(0.2) {
            core.optional_info.application_context = Some(phrase(rng, 2..=5));
            core.optional_info.stakeholders = vec![Stakeholder {
                name: "Operations".into(),
                role: "owner".into(),
            }];
            core.optional_info.dependencies = vec![DependencyRef::Text("ticketing system".into())];
            core.conditions = vec![Condition {
                kind: ConditionKind::Effectivity,
                value: "2026".into(),
            }];
        }

        let composite = released_plain.len() >= 2 && rng.gen_bool(0.15);
        let master = if composite {
            let n_links = rng.gen_range(1..=2);
            let specs = released_plain
                .choose_multiple(rng, n_links)
                .map(|id| RelationSpec::link(&main_ref(id, 1)))
                .collect();
            vault.create_composite(core, specs, None, ADMIN)?
        } else {
            let (elements, relationships) = (rng.gen_range(1..8), rng.gen_range(0..10));
            let model = random_model(rng, &format!("m{i}"), elements, relationships);
            vault.create_entry(core, model, MODELER)?
        };

        let v1 = main_ref(&master.id, 1);
        let roll = rng.gen_range(0..10);
        if roll >= 2 {
            vault.transition(&v1, TransitionAction::Release, ADMIN)?;
            if !composite {
                released_plain.push(master.id.clone());
            }
        }
        if roll >= 7 {
            vault.transition(&v1, TransitionAction::Implement, ADMIN)?;
        }
        if rng.gen_bool(0.15) {
            vault.add_feedback(&v1, &phrase(rng, 2..=6), READER)?;
        }
        ids.push(master.id);
    }

    // Later activity on existing entries.
    for _ in 0..n / 5 {
        let id = ids.choose(rng).expect("non-empty").clone();
        let entry = vault.get_entry(&id)?;
        let main = entry.variant(MAIN_VARIANT).expect("main variant");
        let latest = main.latest().expect("non-empty");
        let r = main_ref(&id, latest.version_number);
        match (latest.state(), rng.gen_range(0..4)) {
            (LifecycleState::Draft, _) => {
                vault.transition(&r, TransitionAction::Release, ADMIN)?;
            }
            (LifecycleState::Released | LifecycleState::InUse, 0) => {
                let name = format!("adapted-{}", rng.gen::<u16>());
                vault.new_variant(&id, &name, MAIN_VARIANT, latest.version_number, ADMIN)?;
            }
            (LifecycleState::Released | LifecycleState::InUse, 1) => {
                vault.new_version(&id, MAIN_VARIANT, None, ADMIN)?;
            }
            (LifecycleState::Released | LifecycleState::InUse, _) => {
                let v = vault.new_version(&id, MAIN_VARIANT, None, ADMIN)?;
                vault.transition(
                    &main_ref(&id, v.version_number),
                    TransitionAction::Release,
                    ADMIN,
                )?;
            }
            (LifecycleState::Invalid, _) => {}
        }
    }

    // Work through part of the resulting check flags.
    let snapshot = vault.snapshot();
    let flagged: Vec<VersionRef> = snapshot
        .entries
        .values()
        .flat_map(|e| {
            e.versions()
                .filter(|(_, v)| v.status.check_required)
                .map(|(variant, v)| e.version_ref(variant, v))
        })
        .collect();
    for r in &flagged {
        if rng.gen_bool(0.5) {
            vault.acknowledge_check(r, ADMIN)?;
        }
    }

    for id in ids.iter().filter(|_| rng.gen_bool(0.08)) {
        let entry = vault.get_entry(id)?;
        for variant in &entry.variants {
            for version in &variant.versions {
                if version.state() != LifecycleState::Invalid {
                    vault.transition(
                        &entry.version_ref(variant, version),
                        TransitionAction::Deprecate,
                        ADMIN,
                    )?;
                }
            }
        }
    }
    Ok(ids)
}

/// A non-empty query mixing corpus words, keywords, misses and facets.
pub fn random_query(rng: &mut impl Rng) -> SearchQuery {
    let mut q = SearchQuery::default();
    for _ in 0..rng.gen_range(0..=3) {
        q.terms.push(match rng.gen_range(0..6) {
            0 => "unmatched".to_string(),
            1 => VOCABULARY.choose(rng).unwrap().to_uppercase(),
            2 => KEYWORDS.choose(rng).unwrap().to_string(),
            _ => VOCABULARY.choose(rng).unwrap().to_string(),
        });
    }
    if rng.gen_bool(0.25) {
        let scope = *Scope::ALL.choose(rng).unwrap();
        let kind = rng.gen_bool(0.5).then_some(EntryKind::ReferenceModel);
        q.category = Some(CategoryFilter { scope, kind });
    }
    if rng.gen_bool(0.25) {
        q.layer = default_layers().choose(rng).cloned();
    }
    if rng.gen_bool(0.2) {
        q.state = LifecycleState::ALL.choose(rng).copied();
    }
    if rng.gen_bool(0.15) {
        q.keywords = vec![KEYWORDS.choose(rng).unwrap().to_string()];
    }
    if q.is_empty() {
        q.terms.push(VOCABULARY.choose(rng).unwrap().to_string());
    }
    q
}
