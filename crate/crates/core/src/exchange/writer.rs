use std::fmt::Write as _;

use super::{validate_model, ExchangeError, ModelDocument};

const NAMESPACE: &str = "http://www.opengroup.org/xsd/archimate/3.0/";

/// Serializes a document in canonical form: fixed attribute order
/// (`identifier`, `type`, `source`, `target`, `name`), two-space
/// indentation, `\n` line endings. Equal documents produce equal bytes.
pub fn serialize_model(doc: &ModelDocument) -> Result<Vec<u8>, ExchangeError> {
    let report = validate_model(doc);
    if !report.is_empty() {
        return Err(ExchangeError::InvariantViolation(report));
    }

    let mut out = String::with_capacity(128 + 96 * (doc.elements.len() + doc.relationships.len()));
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<model xmlns=\"{NAMESPACE}\" identifier=\"{}\" name=\"{}\">",
        attr(&doc.model_id),
        attr(&doc.name)
    );

    if !doc.properties.is_empty() {
        out.push_str("  <properties>\n");
        for (key, value) in &doc.properties {
            let _ = writeln!(
                out,
                "    <property key=\"{}\" value=\"{}\"/>",
                attr(key),
                attr(value)
            );
        }
        out.push_str("  </properties>\n");
    }

    if !doc.elements.is_empty() {
        out.push_str("  <elements>\n");
        for e in &doc.elements {
            let _ = write!(
                out,
                "    <element identifier=\"{}\" type=\"{}\" name=\"{}\"",
                attr(&e.id),
                attr(&e.kind),
                attr(&e.name)
            );
            match &e.documentation {
                Some(doc) => {
                    let _ = writeln!(
                        out,
                        "><documentation>{}</documentation></element>",
                        text(doc)
                    );
                }
                None => out.push_str("/>\n"),
            }
        }
        out.push_str("  </elements>\n");
    }

    if !doc.relationships.is_empty() {
        out.push_str("  <relationships>\n");
        for r in &doc.relationships {
            let _ = write!(
                out,
                "    <relationship identifier=\"{}\" type=\"{}\" source=\"{}\" target=\"{}\"",
                attr(&r.id),
                attr(&r.kind),
                attr(&r.source),
                attr(&r.target)
            );
            if let Some(name) = &r.name {
                let _ = write!(out, " name=\"{}\"", attr(name));
            }
            out.push_str("/>\n");
        }
        out.push_str("  </relationships>\n");
    }

    out.push_str("</model>\n");
    Ok(out.into_bytes())
}

fn attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

fn text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{parse_model, ModelElement, ModelRelationship};

    fn fixture() -> ModelDocument {
        let mut doc = ModelDocument::new("m1", "Fixture");
        let mut e2 = ModelElement::new("e2", "ApplicationComponent", "Desk \"A\" & <B>");
        e2.documentation = Some("line one\r\nline two\t ".into());
        doc.elements
            .push(ModelElement::new("e1", "BusinessProcess", " Handle "));
        doc.elements.push(e2);
        let mut r1 = ModelRelationship::new("r1", "Serving", "e2", "e1");
        r1.name = Some(String::new());
        doc.relationships.push(r1);
        doc.properties.insert("interface".into(), "e2".into());
        doc
    }

    #[test]
    fn round_trips_fixture() {
        let doc = fixture();
        let bytes = serialize_model(&doc).unwrap();
        assert_eq!(parse_model(&bytes).unwrap(), doc);
    }

    #[test]
    fn empty_document_is_minimal_and_reparses() {
        let doc = ModelDocument::new("m0", "");
        let bytes = serialize_model(&doc).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(parse_model(&bytes).unwrap(), doc);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut doc = fixture();
        doc.elements.push(ModelElement::new("e1", "Node", "again"));
        assert!(matches!(
            serialize_model(&doc),
            Err(ExchangeError::InvariantViolation(_))
        ));
    }

    #[test]
    fn output_is_byte_stable() {
        let doc = fixture();
        let a = serialize_model(&doc).unwrap();
        let b = serialize_model(&parse_model(&a).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
