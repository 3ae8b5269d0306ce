use std::collections::HashMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{validate_model, ExchangeError, ModelDocument, ModelElement, ModelRelationship};

type Result<T> = std::result::Result<T, ExchangeError>;

/// Parses an exchange document. The result always satisfies every
/// [`ModelDocument`] invariant; anything else is reported as an error.
pub fn parse_model(xml: &[u8]) -> Result<ModelDocument> {
    let text = std::str::from_utf8(xml).map_err(|e| ExchangeError::MalformedXml {
        offset: e.valid_up_to() as u64,
        message: "input is not valid UTF-8".into(),
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut parser = Parser::new(text);
    let doc = parser.document()?;

    if let Some(finding) = validate_model(&doc).first() {
        return Err(ExchangeError::SchemaViolation {
            node: finding.node.clone(),
            message: finding.message.clone(),
        });
    }
    Ok(doc)
}

struct Parser<'a> {
    reader: Reader<&'a [u8]>,
    /// Byte offset where the most recently read event starts.
    at: u64,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let mut reader = Reader::from_str(text);
        let config = reader.config_mut();
        config.trim_text(false);
        config.check_end_names = true;
        Self { reader, at: 0 }
    }

    fn next(&mut self) -> Result<Event<'a>> {
        self.at = self.reader.buffer_position();
        self.reader
            .read_event()
            .map_err(|e| ExchangeError::MalformedXml {
                offset: self.reader.error_position(),
                message: e.to_string(),
            })
    }

    fn malformed(&self, message: impl Into<String>) -> ExchangeError {
        ExchangeError::MalformedXml {
            offset: self.at,
            message: message.into(),
        }
    }

    fn skip(&mut self, start: &BytesStart<'a>) -> Result<()> {
        self.reader
            .read_to_end(start.name())
            .map(|_| ())
            .map_err(|e| ExchangeError::MalformedXml {
                offset: self.reader.error_position(),
                message: e.to_string(),
            })
    }

    fn document(&mut self) -> Result<ModelDocument> {
        let mut doc = None;
        loop {
            match self.next()? {
                Event::Decl(decl) => {
                    if let Some(enc) = decl.encoding() {
                        let enc = enc.map_err(|e| self.malformed(e.to_string()))?;
                        let enc = String::from_utf8_lossy(&enc).into_owned();
                        if !matches!(enc.to_ascii_lowercase().as_str(), "utf-8" | "utf8") {
                            return Err(ExchangeError::UnsupportedEncoding(enc));
                        }
                    }
                }
                Event::Start(e) | Event::Empty(e) if doc.is_some() => {
                    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                    return Err(
                        self.malformed(format!("unexpected <{name}> after the root element"))
                    );
                }
                Event::Start(e) => {
                    self.expect_model_root(&e)?;
                    doc = Some(self.model(&e, false)?);
                }
                Event::Empty(e) => {
                    self.expect_model_root(&e)?;
                    doc = Some(self.model(&e, true)?);
                }
                Event::Text(t) => {
                    let text = t.unescape().map_err(|e| self.malformed(e.to_string()))?;
                    if !text.trim().is_empty() {
                        return Err(self.malformed("text outside the root element"));
                    }
                }
                Event::CData(_) => return Err(self.malformed("CDATA outside the root element")),
                Event::End(_) => return Err(self.malformed("unbalanced closing tag")),
                Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
                Event::Eof => break,
            }
        }
        doc.ok_or_else(|| self.malformed("document has no root element"))
    }

    fn expect_model_root(&self, e: &BytesStart<'_>) -> Result<()> {
        if e.local_name().as_ref() == b"model" {
            Ok(())
        } else {
            Err(ExchangeError::SchemaViolation {
                node: format!("byte {}", self.at),
                message: format!(
                    "root element must be <model>, found <{}>",
                    String::from_utf8_lossy(e.name().as_ref())
                ),
            })
        }
    }

    fn attributes(&self, e: &BytesStart<'_>) -> Result<HashMap<String, String>> {
        let mut out = HashMap::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.malformed(err.to_string()))?;
            let key = String::from_utf8_lossy(attr.key.local_name().as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|err| self.malformed(err.to_string()))?;
            out.insert(key, value.into_owned());
        }
        Ok(out)
    }

    fn required(
        &self,
        attrs: &mut HashMap<String, String>,
        key: &str,
        node: &str,
        what: &str,
    ) -> Result<String> {
        match attrs.remove(key) {
            Some(value) if !value.is_empty() => Ok(value),
            _ => Err(ExchangeError::SchemaViolation {
                node: node.to_string(),
                message: format!("{what} is missing the `{key}` attribute"),
            }),
        }
    }

    fn model(&mut self, root: &BytesStart<'a>, empty: bool) -> Result<ModelDocument> {
        let mut attrs = self.attributes(root)?;
        let at = format!("byte {}", self.at);
        let model_id = self.required(&mut attrs, "identifier", &at, "model")?;
        let name_attr = attrs.remove("name");
        let mut doc = ModelDocument::new(model_id, name_attr.clone().unwrap_or_default());
        if empty {
            return Ok(doc);
        }

        loop {
            match self.next()? {
                Event::Start(e) => match e.local_name().as_ref() {
                    b"elements" => self.elements(&mut doc)?,
                    b"relationships" => self.relationships(&mut doc)?,
                    b"properties" => self.properties(&mut doc)?,
                    b"name" => {
                        let text = self.text()?;
                        if name_attr.is_none() {
                            doc.name = text;
                        }
                    }
                    b"views" | b"diagrams" => return Err(unsupported_views(&doc)),
                    _ => self.skip(&e)?,
                },
                Event::Empty(e) => {
                    if matches!(e.local_name().as_ref(), b"views" | b"diagrams") {
                        return Err(unsupported_views(&doc));
                    }
                }
                Event::End(_) => break,
                Event::Eof => return Err(self.malformed("unexpected end of input inside <model>")),
                _ => {}
            }
        }
        Ok(doc)
    }

    fn elements(&mut self, doc: &mut ModelDocument) -> Result<()> {
        loop {
            match self.next()? {
                Event::Start(e) if e.local_name().as_ref() == b"element" => {
                    let element = self.element(&e, false)?;
                    doc.elements.push(element);
                }
                Event::Empty(e) if e.local_name().as_ref() == b"element" => {
                    let element = self.element(&e, true)?;
                    doc.elements.push(element);
                }
                Event::Start(e) => self.skip(&e)?,
                Event::End(_) => return Ok(()),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside <elements>"))
                }
                _ => {}
            }
        }
    }

    fn element(&mut self, start: &BytesStart<'a>, empty: bool) -> Result<ModelElement> {
        let mut attrs = self.attributes(start)?;
        let at = format!("element at byte {}", self.at);
        let id = self.required(&mut attrs, "identifier", &at, "element")?;
        let kind = self.required(&mut attrs, "type", &id, "element")?;
        let name_attr = attrs.remove("name");
        let mut element = ModelElement::new(id, kind, name_attr.clone().unwrap_or_default());
        if empty {
            return Ok(element);
        }
        loop {
            match self.next()? {
                Event::Start(e) => match e.local_name().as_ref() {
                    b"name" => {
                        let text = self.text()?;
                        if name_attr.is_none() {
                            element.name = text;
                        }
                    }
                    b"documentation" => element.documentation = Some(self.text()?),
                    _ => self.skip(&e)?,
                },
                Event::Empty(e) if e.local_name().as_ref() == b"documentation" => {
                    element.documentation = Some(String::new());
                }
                Event::End(_) => return Ok(element),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside <element>"))
                }
                _ => {}
            }
        }
    }

    fn relationships(&mut self, doc: &mut ModelDocument) -> Result<()> {
        loop {
            match self.next()? {
                Event::Start(e) if e.local_name().as_ref() == b"relationship" => {
                    let rel = self.relationship(&e, false)?;
                    doc.relationships.push(rel);
                }
                Event::Empty(e) if e.local_name().as_ref() == b"relationship" => {
                    let rel = self.relationship(&e, true)?;
                    doc.relationships.push(rel);
                }
                Event::Start(e) => self.skip(&e)?,
                Event::End(_) => return Ok(()),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside <relationships>"))
                }
                _ => {}
            }
        }
    }

    fn relationship(&mut self, start: &BytesStart<'a>, empty: bool) -> Result<ModelRelationship> {
        let mut attrs = self.attributes(start)?;
        let at = format!("relationship at byte {}", self.at);
        let id = self.required(&mut attrs, "identifier", &at, "relationship")?;
        let kind = self.required(&mut attrs, "type", &id, "relationship")?;
        let source = self.required(&mut attrs, "source", &id, "relationship")?;
        let target = self.required(&mut attrs, "target", &id, "relationship")?;
        let mut rel = ModelRelationship::new(id, kind, source, target);
        rel.name = attrs.remove("name");
        if empty {
            return Ok(rel);
        }
        let has_name_attr = rel.name.is_some();
        loop {
            match self.next()? {
                Event::Start(e) if e.local_name().as_ref() == b"name" => {
                    let text = self.text()?;
                    if !has_name_attr {
                        rel.name = Some(text);
                    }
                }
                Event::Start(e) => self.skip(&e)?,
                Event::End(_) => return Ok(rel),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside <relationship>"))
                }
                _ => {}
            }
        }
    }

    fn properties(&mut self, doc: &mut ModelDocument) -> Result<()> {
        loop {
            match self.next()? {
                Event::Start(e) if e.local_name().as_ref() == b"property" => {
                    self.property(&e, doc)?;
                    self.skip(&e)?;
                }
                Event::Empty(e) if e.local_name().as_ref() == b"property" => {
                    self.property(&e, doc)?
                }
                Event::Start(e) => self.skip(&e)?,
                Event::End(_) => return Ok(()),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside <properties>"))
                }
                _ => {}
            }
        }
    }

    fn property(&self, e: &BytesStart<'_>, doc: &mut ModelDocument) -> Result<()> {
        let mut attrs = self.attributes(e)?;
        if let (Some(key), Some(value)) = (attrs.remove("key"), attrs.remove("value")) {
            doc.properties.insert(key, value);
        }
        Ok(())
    }

    /// Text content of a simple element; nested markup is skipped.
    fn text(&mut self) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.next()? {
                Event::Text(t) => {
                    out.push_str(&t.unescape().map_err(|e| self.malformed(e.to_string()))?)
                }
                Event::CData(c) => {
                    out.push_str(&c.decode().map_err(|e| self.malformed(e.to_string()))?)
                }
                Event::Start(e) => self.skip(&e)?,
                Event::End(_) => return Ok(out),
                Event::Eof => {
                    return Err(self.malformed("unexpected end of input inside text node"))
                }
                _ => {}
            }
        }
    }
}

fn unsupported_views(doc: &ModelDocument) -> ExchangeError {
    ExchangeError::SchemaViolation {
        node: doc.model_id.clone(),
        message: "views and diagrams are not supported by the exchange subset".into(),
    }
}
