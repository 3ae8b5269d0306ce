use archlib_core::exchange::{ModelDocument, ModelElement, ModelRelationship, INTERFACE_PROPERTY};
use proptest::collection::{btree_map, vec};
use proptest::prelude::*;
use proptest::sample::Index;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ELEMENT_KINDS: &[&str] = &[
    "BusinessActor",
    "BusinessRole",
    "BusinessProcess",
    "BusinessObject",
    "ApplicationComponent",
    "ApplicationService",
    "DataObject",
    "Node",
    "Capability",
];

pub const RELATIONSHIP_KINDS: &[&str] = &[
    "Serving",
    "Flow",
    "Triggering",
    "Assignment",
    "Composition",
    "Access",
    "Realization",
];

/// Free text including markup characters, whitespace and non-ASCII.
pub fn arb_text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 &<>\"'\t\n\r.,;:éüß€中-]{0,16}"
}

fn arb_id() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9._-]{0,10}"
}

type ElementParts = (Index, String, Option<String>);
type RelationshipParts = (Index, Index, Index, Option<String>);

/// Valid models with up to `max_nodes` elements plus relationships.
pub fn arb_model(max_nodes: usize) -> impl Strategy<Value = ModelDocument> {
    (0..=max_nodes)
        .prop_flat_map(|total| (Just(total), 0..=total))
        .prop_flat_map(|(total, n_elements)| {
            let n_relationships = if n_elements == 0 {
                0
            } else {
                total - n_elements
            };
            (
                arb_id(),
                arb_text(),
                btree_map("[a-z][a-z0-9-]{0,8}", arb_text(), 0..4),
                vec(
                    (any::<Index>(), arb_text(), proptest::option::of(arb_text())),
                    n_elements,
                ),
                vec(
                    (
                        any::<Index>(),
                        any::<Index>(),
                        any::<Index>(),
                        proptest::option::of(arb_text()),
                    ),
                    n_relationships,
                ),
            )
        })
        .prop_map(|(model_id, name, properties, elements, relationships)| {
            assemble(model_id, name, properties, elements, relationships)
        })
}

fn assemble(
    model_id: String,
    name: String,
    properties: std::collections::BTreeMap<String, String>,
    elements: Vec<ElementParts>,
    relationships: Vec<RelationshipParts>,
) -> ModelDocument {
    let mut doc = ModelDocument::new(model_id, name);
    doc.properties = properties;
    for (i, (kind, name, documentation)) in elements.into_iter().enumerate() {
        let mut e = ModelElement::new(format!("e{i}"), *kind.get(ELEMENT_KINDS), name);
        e.documentation = documentation;
        doc.elements.push(e);
    }
    let n = doc.elements.len();
    for (j, (kind, src, tgt, name)) in relationships.into_iter().enumerate() {
        let mut r = ModelRelationship::new(
            format!("r{j}"),
            *kind.get(RELATIONSHIP_KINDS),
            format!("e{}", src.index(n)),
            format!("e{}", tgt.index(n)),
        );
        r.name = name;
        doc.relationships.push(r);
    }
    doc
}

/// A seeded random model with `elements` elements (at least one) and
/// `relationships` relationships between them.
pub fn random_model(
    rng: &mut impl Rng,
    model_id: &str,
    elements: usize,
    relationships: usize,
) -> ModelDocument {
    let elements = elements.max(1);
    let mut doc = ModelDocument::new(model_id, format!("Model {model_id}"));
    for i in 0..elements {
        let kind = ELEMENT_KINDS.choose(rng).expect("non-empty");
        doc.elements.push(ModelElement::new(
            format!("e{i}"),
            *kind,
            format!("Element {i}"),
        ));
    }
    for j in 0..relationships {
        let kind = RELATIONSHIP_KINDS.choose(rng).expect("non-empty");
        doc.relationships.push(ModelRelationship::new(
            format!("r{j}"),
            *kind,
            format!("e{}", rng.gen_range(0..elements)),
            format!("e{}", rng.gen_range(0..elements)),
        ));
    }
    if rng.gen_bool(0.4) {
        let boundary = format!("e{}", rng.gen_range(0..elements));
        doc.properties.insert(INTERFACE_PROPERTY.into(), boundary);
    }
    doc
}

/// `elements` elements and relationships forming a chain, giving an exact
/// endpoint sum of `2 * relationships`.
pub fn sized_model(elements: usize, relationships: usize) -> ModelDocument {
    let mut doc = ModelDocument::new("sized", "Sized");
    for i in 0..elements {
        doc.elements
            .push(ModelElement::new(format!("e{i}"), "Node", format!("n{i}")));
    }
    for j in 0..relationships {
        let a = j % elements.max(1);
        let b = (j + 1) % elements.max(1);
        doc.relationships.push(ModelRelationship::new(
            format!("r{j}"),
            "Flow",
            format!("e{a}"),
            format!("e{b}"),
        ));
    }
    doc
}
