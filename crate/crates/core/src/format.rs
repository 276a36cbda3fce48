//! Canonical JSON interchange and document-kind detection.

use serde::Serialize;

use crate::error::{Error, Result};

/// Pretty JSON with a trailing newline. All maps in the data model are
/// ordered, so equal values serialize to identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("data model serializes");
    s.push('\n');
    s
}

/// The kind of an interchange document, recognized by its top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Tree,
    MarkedTree,
    Cover,
    System,
    State,
}

impl DocumentKind {
    pub fn name(self) -> &'static str {
        match self {
            DocumentKind::Tree => "tree",
            DocumentKind::MarkedTree => "marked tree",
            DocumentKind::Cover => "cover",
            DocumentKind::System => "system",
            DocumentKind::State => "state",
        }
    }
}

pub fn detect_kind(doc: &str) -> Result<DocumentKind> {
    let value: serde_json::Value = serde_json::from_str(doc)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    let has = |k: &str| obj.contains_key(k);
    Ok(if has("system") && has("roles") {
        DocumentKind::State
    } else if has("cover") && has("dynamic") {
        DocumentKind::System
    } else if has("source") && has("target") {
        DocumentKind::Cover
    } else if has("attachments") {
        DocumentKind::MarkedTree
    } else if has("vertices") && has("edges") {
        DocumentKind::Tree
    } else {
        return Err(Error::Parse("unrecognized document kind".into()));
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_are_recognized_by_their_keys() {
        let cases = [
            (
                r#"{"vertices":[],"leaves":[],"edges":[]}"#,
                DocumentKind::Tree,
            ),
            (
                r#"{"vertices":[],"leaves":[],"edges":[],"attachments":{}}"#,
                DocumentKind::MarkedTree,
            ),
            (r#"{"source":{},"target":{}}"#, DocumentKind::Cover),
            (r#"{"cover":{},"dynamic":{}}"#, DocumentKind::System),
            (r#"{"note":"","system":{},"roles":{}}"#, DocumentKind::State),
        ];
        for (doc, kind) in cases {
            assert_eq!(detect_kind(doc).unwrap(), kind, "{doc}");
        }
    }

    #[test]
    fn unknown_and_malformed_documents_are_errors() {
        assert!(matches!(detect_kind(r#"{"x":1}"#), Err(Error::Parse(_))));
        assert!(matches!(detect_kind("[1, 2]"), Err(Error::Parse(_))));
        assert!(matches!(detect_kind("{"), Err(Error::Json(_))));
    }

    #[test]
    fn canonical_json_ends_with_a_newline() {
        let s = to_canonical_json(&std::collections::BTreeMap::from([("b", 1), ("a", 2)]));
        assert_eq!(s, "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
    }
}
